//! Regret-based interactive preference elicitation for multi-objective
//! combinatorial optimization.

pub mod baselines;
pub mod dm;
pub mod elicitation;
pub mod error;
pub mod lp;
pub mod metrics;
pub mod models;
pub mod polytope;
pub mod problems;
pub mod regret;
pub mod riga;
pub mod trace;

pub use dm::{Answer, DmOracle, Progress, ScriptedDm, SimulatedDm};
pub use error::{DmError, Error, ModelError, RegretError, Result, SolverError};
pub use models::{CostVector, Family, Orientation, PreferenceModel};
pub use problems::{Instance, ProblemKind, Solution};
pub use riga::{riga_kcss_run, riga_run, riga_s_run, RigaConfig};
pub use trace::RunTrace;
