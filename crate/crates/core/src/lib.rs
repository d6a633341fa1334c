//! Simple stochastic multiplayer games: exact payoffs, best responses,
//! equilibrium search and the classic hardness gadgets.

pub mod analysis;
pub mod cli;
pub mod format;
pub mod game;
pub mod math;
pub mod profile;
pub mod reductions;
pub mod rational;
pub mod solvers;
