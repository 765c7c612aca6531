//! Strategy analysis and responsibility attribution for agents with
//! prioritised finite-trace temporal values.
//!
//! The library models a deterministic multiagent transition system with a
//! start state, a finite horizon and a prioritised base of temporal values.
//! On top of that it provides:
//!
//! - finite-trace temporal logic (parsing and evaluation over histories),
//! - exhaustive strategy enumeration, weak dominance and non-dominance,
//! - symbolic regret and regret minimisation,
//! - responsibility attribution (passive and inexcusable), accusations,
//!   liability, weak and strong excuses,
//! - responsibility anticipation and minimisation, and strategy
//!   recommendation,
//! - a scenario/matrix file format with shipped fixtures,
//! - a randomized brute-force checker that revalidates the library's
//!   analyses definitionally on small instances.

// The exhaustive quantifications index several parallel tables with one
// coordinate that also feeds substitution arithmetic; iterator rewrites
// would hide that.
#![allow(clippy::needless_range_loop)]

pub mod ltlf;
pub mod oracle;
#[cfg(test)]
pub(crate) mod test_support;
pub mod responsibility;
pub mod scenario;
pub mod strategy;
pub mod system;
pub mod values;

pub use ltlf::{parse_formula, Formula};
pub use responsibility::ResponsibilityKind;
pub use scenario::LoadedScenario;
pub use strategy::{JointStrategy, Strategy};
pub use system::{History, JointAction, Scenario, State, TransitionSystem};
pub use values::{OutcomeSet, ScoreVector, Sign, ValueBase};
