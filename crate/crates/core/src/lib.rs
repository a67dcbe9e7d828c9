//! Connected ε-equitable cake division.
//!
//! The cake is `[0, 1]`, cut into `n` connected pieces handed out left to
//! right. [`sperner::solve`] labels a Kuhn triangulation of the cut-set
//! simplex by happiest agent and refines until a fully labeled cell yields a
//! cut-set whose values differ by at most `eps`. [`classes`] recognizes
//! instance families for which such a labeling is guaranteed, and
//! [`two_agent`] handles `n = 2` by bisection.

pub mod catalog;
pub mod classes;
pub mod cli;
pub mod format;
pub mod generate;
pub mod linalg;
pub mod oracle;
pub mod rational;
pub mod simplex;
pub mod sperner;
pub mod two_agent;
pub mod valuation;

pub use rational::Rational;
pub use sperner::{solve, solve_sanp, SolveOptions, SolveReport, SolveStatus};
pub use valuation::{
    AdditiveInstance, CutSet, GlobalInstance, Interval, Permutation, PiecewiseConstantDensity,
    Valuations,
};
