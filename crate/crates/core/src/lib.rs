//! Populations of variable-length prefix arithmetic programs evolved toward
//! a target value.
//!
//! * [`expr`]: genomes, evaluation, fitness, parsing and rendering.
//! * [`engine`]: crossover, mutation and the two population models.
//! * [`diagnostics`]: diversity metrics and run classification.
//! * [`experiment`]: configuration files, environment schedules, batches.
//! * [`golden`]: reference programs with known error values.

pub mod diagnostics;
pub mod engine;
pub mod experiment;
pub mod expr;
pub mod golden;

pub use diagnostics::{classify, Behavior, GenerationRecord, RunClassification, RunLog};
pub use engine::{
    generational_step, init_population, mutate, one_point_crossover, run, run_rng, run_seeded, splice,
    steady_state_step, ConfigError, EcaConfig, Individual, LogOptions, Model, Population, Replacement, RunOutcome, TieBreak,
};
pub use experiment::{
    apply_environment_event, load_config, parse_config, run_experiment, EnvironmentEvent, EnvironmentSchedule,
    ExperimentConfig, ExperimentError, ExperimentSummary,
};
pub use expr::{
    evaluate, fitness, parse_genome, random_genome, render_infix, render_prefix, Environment, EvalResult,
    ExprError, Fitness, Genome, InvalidReason, Operator, Token,
};
