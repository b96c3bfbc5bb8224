//! Run orchestration: configuration files, checkpoints, training, Monte Carlo
//! evaluation, single-episode simulation and the validation suite.

mod checkpoint;
mod config;
mod eval;
pub mod plot;
mod simulate;
mod train;
mod validate;

pub use checkpoint::{Checkpoint, CHECKPOINT_VERSION};
pub use config::{variant_defaults, EvalSettings, RunConfig, TrainSettings, Variant, OUTPUT_DIR_ENV};
pub use eval::{episode_seed, evaluate, evaluate_episode, run_eval, EvalAggregate, EvalReport, EvalRow, Stat};
pub use simulate::{run_simulate, simulate_episode, Simulation, SimulationSummary};
pub use train::{
    checkpoint_name, initial_checkpoint, learning_curve_svg, run_train, TrainSummary, LATEST_CHECKPOINT,
    TRAINING_LOG,
};
pub use validate::{
    check_bptt_gradient, check_circular_balance, check_episode_smoke, check_gravity_far_field,
    check_gravity_laplacian, check_gravity_sphere, check_momentum_conservation, check_rk4_order,
    check_seeker_invariance, check_seeker_projection, run_validate, run_validate_with, BackwardFn,
    CheckResult, GravityFn, Oracles, RotationalFn, SeekerFn, StepperFn, TranslationalFn, ValidationReport,
};
