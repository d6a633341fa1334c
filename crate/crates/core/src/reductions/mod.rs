//! Game families from the hardness reductions, the small example games and
//! exact checkers for the numeric identities behind them.

mod bounded;
mod counter;
mod examples;
mod sat;
mod sqrtsum;

use crate::analysis::AnalysisError;
use crate::game::GameError;
use crate::profile::ProfileError;

pub use bounded::{bounded_payoff, BoundedPayoff};
pub use counter::{
    counter_game, gen_2cm_game, intended_2cm_profile, parse_2cm, segment_probability, update_holds, CGadget,
    Config, CounterGame, Instruction, IntendedProfile, Label, SGadget, TwoCounterMachine, DEFAULT_COUNTER_CAP,
};
pub use examples::{example_game, example_profile, EXAMPLE_NAMES};
pub use sat::{gen_sat_game, literal_name, parse_dimacs, sat_equilibrium_profile, CnfFormula};
pub use sqrtsum::{
    gen_sqrtsum_game, gp_max_payoff, parse_sqrtsum, sqrt_bounds, sqrtsum_threshold_check, GpMaxPayoff, RealBound,
    SqrtSumCheck, SqrtSumInstance,
};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ReductionError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("invalid formula: {0}")]
    Formula(String),
    #[error("assignment does not satisfy clause {0}")]
    NotSatisfying(usize),
    #[error("invalid instance: {0}")]
    Instance(String),
    #[error("{0} is outside the domain [1/2, 1)")]
    Domain(String),
    #[error("invalid machine: {0}")]
    Machine(String),
    #[error("counter value exceeds {cap} at step {step}")]
    CounterCapExceeded { step: usize, cap: u64 },
    #[error("unknown example `{0}`")]
    UnknownExample(String),
    #[error(transparent)]
    Game(#[from] GameError),
    #[error(transparent)]
    Profile(#[from] ProfileError),
    #[error(transparent)]
    Analysis(#[from] AnalysisError),
}
