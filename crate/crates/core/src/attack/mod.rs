//! Projected-gradient spectral attack: budgeted relaxation, gradient ascent,
//! projection, and randomized rounding back to edge flips.

mod config;
mod objective;
mod pgd;
mod projection;
mod sampling;

pub use config::{step_size, ApproxParams, AttackConfig, StepSchedule};
pub use objective::{ObjectiveMode, SpectralObjective};
pub use pgd::{pgd_spectral_attack, run_attack, AttackResult, TaskLoss};
pub use projection::project_feasible;
pub use sampling::{sample_binary, BernoulliRounding};
