//! Equilibrium search: exhaustive positional search and support enumeration
//! with real-arithmetic queries for stationary equilibria.

mod formula;
mod posne;
mod statne;
mod support;

pub use crate::analysis::Thresholds;
pub use formula::{build_statne_formula, Comparison, FormulaError, RealFormula, Term};
pub use posne::{positional_profile_count, solve_posne, PosNeOutcome, DEFAULT_POSNE_CAP};
pub use statne::{
    parse_model, profile_from_model, query_support, solve_statne, ModelValue, SolverConfig, SolverError, StatNeOutcome,
    SupportReport, WitnessCheck,
};
pub use support::{enumerate_supports, reach_sets, support_count, Support};
