//! Exact rational linear algebra and linear programming.

mod lp;
mod system;

pub use lp::{lp_min, Constraint, LinearProgram, LpOutcome, Relation};
pub use system::{solve_system, LinearSystem};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum MathError {
    #[error("linear system is singular")]
    SingularSystem,
    #[error("dimension mismatch: {0}")]
    Dimension(String),
}
