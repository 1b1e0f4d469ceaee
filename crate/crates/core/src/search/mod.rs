//! Expected improvement and the subset search loop.

mod acquisition;
mod config;
mod graphcombo;
mod init;
mod record;
mod tracker;

pub use acquisition::{expected_improvement, select_next};
pub use config::{InitMethod, RestartMethod, RunConfig};
pub use graphcombo::{restart_location, run_graphcombo, run_graphcombo_noisy};
pub use init::{initialize, walk_step, Initialization};
pub use record::{Hyperparameters, InitRow, OracleAudit, QueryRow, RunRecord};
pub(crate) use graphcombo::restart_pool;
pub(crate) use init::{initialize_into, random_subset};
pub(crate) use tracker::{RowContext, Tracker};
