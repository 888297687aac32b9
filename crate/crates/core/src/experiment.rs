//! Experiment configuration, environment schedules, batches of seeded runs
//! and their on-disk artifacts.
//!
//! Output layout for a batch rooted at `output_dir`:
//!
//! ```text
//! output_dir/
//!   run_<r>/generations.csv   per-generation metrics
//!   run_<r>/population.tsv    final population, `<fitness>\t<genome>`
//!   run_<r>/meta              JSON: seed, config hash, classification
//!   summary                   JSON: cross-run fractions
//! ```
//!
//! A run directory containing a `.partial` marker was not completely written.

use std::fmt::Write as _;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::diagnostics::{Behavior, GenerationRecord, RunClassification, DEFAULT_WINDOW};
use crate::engine::{run_seeded, ConfigError, EcaConfig, LogOptions, Model, Replacement, RunOutcome, TieBreak};
use crate::expr::{Environment, ExprError, Genome, Token};

pub const CSV_HEADER: &str =
    "generation,best_fitness,mean_finite_fitness,distinct_genomes,mean_pairwise_distance,worst_count";

const PARTIAL_MARKER: &str = ".partial";

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error("cannot read config {path}: {source}")]
    ReadConfig { path: PathBuf, source: io::Error },
    #[error("cannot parse config: {0}")]
    Parse(#[from] toml::de::Error),
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("I/O error at {path}: {source}")]
    Io { path: PathBuf, source: io::Error },
}

fn io_err(path: &Path) -> impl FnOnce(io::Error) -> ExperimentError + '_ {
    move |source| ExperimentError::Io {
        path: path.to_path_buf(),
        source,
    }
}

/// A change of inputs and/or target applied before generation
/// `at_generation` is stepped.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EnvironmentEvent {
    pub at_generation: u64,
    pub new_inputs: Option<Vec<i64>>,
    pub new_target: Option<i64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EnvironmentSchedule {
    pub initial: Environment,
    /// Strictly increasing in `at_generation`.
    pub events: Vec<EnvironmentEvent>,
}

impl EnvironmentSchedule {
    pub fn fixed(initial: Environment) -> EnvironmentSchedule {
        EnvironmentSchedule {
            initial,
            events: Vec::new(),
        }
    }

    pub fn new(initial: Environment, events: Vec<EnvironmentEvent>) -> Result<EnvironmentSchedule, ConfigError> {
        for (i, ev) in events.iter().enumerate() {
            let field = format!("events[{i}]");
            if ev.new_inputs.is_none() && ev.new_target.is_none() {
                return Err(ConfigError::new(field, "must change inputs or target"));
            }
            if ev.new_inputs.as_ref().is_some_and(Vec::is_empty) {
                return Err(ConfigError::new(format!("{field}.inputs"), "must not be empty"));
            }
            if i > 0 && events[i - 1].at_generation >= ev.at_generation {
                return Err(ConfigError::new(
                    format!("{field}.at"),
                    "events must be strictly increasing in generation",
                ));
            }
        }
        Ok(EnvironmentSchedule { initial, events })
    }
}

/// Returns the environment after `event`. Genomes keep their operand
/// indices; those pointing past a shrunk input vector become invalid.
pub fn apply_environment_event(env: &Environment, event: &EnvironmentEvent) -> Result<Environment, ExprError> {
    let mut next = env.clone();
    if let Some(inputs) = &event.new_inputs {
        next = next.with_inputs(inputs.clone())?;
    }
    if let Some(target) = event.new_target {
        next = next.with_target(target);
    }
    Ok(next)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    /// `seed` is ignored; run `r` uses `base_seed + r`.
    pub eca: EcaConfig,
    pub schedule: EnvironmentSchedule,
    pub n_runs: usize,
    pub base_seed: u64,
    pub log_stride: u64,
    /// Classifier window, in logged records.
    pub window: usize,
    pub output_dir: PathBuf,
}

impl ExperimentConfig {
    pub fn log_options(&self) -> LogOptions {
        LogOptions {
            stride: self.log_stride,
            window: self.window,
        }
    }

    pub fn seed_for(&self, run: usize) -> u64 {
        self.base_seed.wrapping_add(run as u64)
    }

    pub fn eca_for_seed(&self, seed: u64) -> EcaConfig {
        EcaConfig { seed, ..self.eca.clone() }
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        self.eca.validate()?;
        if self.n_runs == 0 {
            return Err(ConfigError::new("experiment.n_runs", "must be at least 1"));
        }
        if self.log_stride == 0 {
            return Err(ConfigError::new("experiment.log_stride", "must be at least 1"));
        }
        if self.window == 0 {
            return Err(ConfigError::new("experiment.window", "must be at least 1"));
        }
        Ok(())
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ConfigFile {
    eca: EcaSection,
    environment: EnvironmentSection,
    #[serde(default)]
    events: Vec<EventSection>,
    #[serde(default)]
    experiment: ExperimentSection,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct EcaSection {
    model: Model,
    d_init: Option<usize>,
    np: Option<usize>,
    n_gen: Option<u64>,
    p_m: Option<f64>,
    lambda: Option<usize>,
    p_c: Option<f64>,
    d_max: Option<usize>,
    tie_break: Option<TieBreak>,
    replacement: Option<Replacement>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct EnvironmentSection {
    inputs: Vec<i64>,
    target: i64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct EventSection {
    at: u64,
    inputs: Option<Vec<i64>>,
    target: Option<i64>,
}

#[derive(Deserialize)]
#[serde(default, deny_unknown_fields)]
struct ExperimentSection {
    n_runs: usize,
    base_seed: u64,
    log_stride: u64,
    window: usize,
    output_dir: PathBuf,
}

impl Default for ExperimentSection {
    fn default() -> Self {
        ExperimentSection {
            n_runs: 1,
            base_seed: 0,
            log_stride: 100,
            window: DEFAULT_WINDOW,
            output_dir: PathBuf::from("runs"),
        }
    }
}

/// Parses a TOML experiment description. Unset algorithm fields take the
/// reference defaults of [`EcaConfig::default`].
pub fn parse_config(text: &str) -> Result<ExperimentConfig, ExperimentError> {
    let file: ConfigFile = toml::from_str(text)?;
    let d = EcaConfig::default();
    let eca = EcaConfig {
        d_init: file.eca.d_init.unwrap_or(d.d_init),
        np: file.eca.np.unwrap_or(d.np),
        n_gen: file.eca.n_gen.unwrap_or(d.n_gen),
        p_m: file.eca.p_m.unwrap_or(d.p_m),
        model: file.eca.model,
        lambda: file.eca.lambda.unwrap_or(d.lambda),
        p_c: file.eca.p_c.unwrap_or(d.p_c),
        d_max: file.eca.d_max.unwrap_or(d.d_max),
        tie_break: file.eca.tie_break.unwrap_or(d.tie_break),
        replacement: file.eca.replacement.unwrap_or(d.replacement),
        seed: 0,
    };
    let initial = Environment::new(file.environment.inputs, file.environment.target)
        .map_err(|e| ConfigError::new("environment.inputs", e.to_string()))?;
    let events = file
        .events
        .into_iter()
        .map(|e| EnvironmentEvent {
            at_generation: e.at,
            new_inputs: e.inputs,
            new_target: e.target,
        })
        .collect();
    let cfg = ExperimentConfig {
        eca,
        schedule: EnvironmentSchedule::new(initial, events)?,
        n_runs: file.experiment.n_runs,
        base_seed: file.experiment.base_seed,
        log_stride: file.experiment.log_stride,
        window: file.experiment.window,
        output_dir: file.experiment.output_dir,
    };
    cfg.validate()?;
    Ok(cfg)
}

pub fn load_config(path: &Path) -> Result<ExperimentConfig, ExperimentError> {
    let text = fs::read_to_string(path).map_err(|source| ExperimentError::ReadConfig {
        path: path.to_path_buf(),
        source,
    })?;
    parse_config(&text)
}

/// Hex SHA-256 of the canonical JSON form of everything that determines a
/// run.
pub fn config_hash(eca: &EcaConfig, schedule: &EnvironmentSchedule, opts: &LogOptions) -> String {
    let canonical = serde_json::json!({
        "eca": eca,
        "schedule": schedule,
        "log_stride": opts.stride,
        "window": opts.window,
    });
    let digest = Sha256::digest(canonical.to_string().as_bytes());
    digest.iter().fold(String::with_capacity(64), |mut s, b| {
        let _ = write!(s, "{b:02x}");
        s
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunMeta {
    pub run: usize,
    pub seed: u64,
    pub config_hash: String,
    pub classification: RunClassification,
    /// Whether the final population holds a fitness-0 member.
    pub optimum_at_end: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentSummary {
    pub runs: Vec<RunMeta>,
    pub fraction_converged: f64,
    pub fraction_oscillating: f64,
    pub fraction_with_optimum: f64,
    /// Mean first-optimum generation among runs that found one.
    pub mean_first_optimum: Option<f64>,
}

impl ExperimentSummary {
    pub fn from_runs(runs: Vec<RunMeta>) -> ExperimentSummary {
        let n = runs.len().max(1) as f64;
        let frac = |pred: &dyn Fn(&RunMeta) -> bool| runs.iter().filter(|r| pred(r)).count() as f64 / n;
        let fraction_converged = frac(&|r| r.classification.behavior == Behavior::Converged);
        let fraction_oscillating = frac(&|r| r.classification.behavior == Behavior::Oscillating);
        let fraction_with_optimum = frac(&|r| r.optimum_at_end);
        let firsts: Vec<u64> = runs
            .iter()
            .filter_map(|r| r.classification.generation_of_first_optimum)
            .collect();
        let mean_first_optimum =
            (!firsts.is_empty()).then(|| firsts.iter().map(|&g| g as f64).sum::<f64>() / firsts.len() as f64);
        ExperimentSummary {
            runs,
            fraction_converged,
            fraction_oscillating,
            fraction_with_optimum,
            mean_first_optimum,
        }
    }
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

/// CSV body for a sequence of records, header included.
pub fn generations_csv(records: &[GenerationRecord]) -> String {
    let mut out = String::with_capacity(64 * (records.len() + 1));
    out.push_str(CSV_HEADER);
    out.push('\n');
    for r in records {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{}",
            r.generation,
            r.best_fitness,
            fmt_opt(r.mean_finite_fitness),
            r.distinct_genomes,
            fmt_opt(r.mean_pairwise_distance),
            r.worst_count
        );
    }
    out
}

// Like `render_prefix`, but operands left dangling by a shrunk input vector
// are shown as `$<index>` instead of failing.
fn render_dump(genome: &Genome, env: &Environment) -> String {
    genome
        .tokens()
        .iter()
        .map(|t| match *t {
            Token::Op(op) => op.symbol().to_string(),
            Token::Operand(i) => env
                .inputs()
                .get(i)
                .map_or_else(|| format!("${i}"), |v| v.to_string()),
        })
        .collect::<Vec<_>>()
        .join(" ")
}

/// One `<fitness>\t<prefix genome>` line per member.
pub fn population_tsv(outcome: &RunOutcome) -> String {
    let mut out = String::new();
    for m in outcome.final_population.members() {
        let _ = writeln!(out, "{}\t{}", m.fitness(), render_dump(m.genome(), &outcome.final_environment));
    }
    out
}

pub fn write_run_artifacts(outcome: &RunOutcome, meta: &RunMeta, dir: &Path) -> Result<(), ExperimentError> {
    fs::create_dir_all(dir).map_err(io_err(dir))?;
    let marker = dir.join(PARTIAL_MARKER);
    fs::write(&marker, b"").map_err(io_err(&marker))?;

    let csv = dir.join("generations.csv");
    fs::write(&csv, generations_csv(&outcome.log.records)).map_err(io_err(&csv))?;
    let tsv = dir.join("population.tsv");
    fs::write(&tsv, population_tsv(outcome)).map_err(io_err(&tsv))?;
    let meta_path = dir.join("meta");
    let json = serde_json::to_string_pretty(meta).expect("run metadata serializes");
    fs::write(&meta_path, json + "\n").map_err(io_err(&meta_path))?;

    fs::remove_file(&marker).map_err(io_err(&marker))
}

pub fn run_dir(output_dir: &Path, run: usize) -> PathBuf {
    output_dir.join(format!("run_{run}"))
}

/// Executes one run of the batch with the given seed and writes its
/// artifacts into `dir`.
pub fn execute_run(
    cfg: &ExperimentConfig,
    run: usize,
    seed: u64,
    dir: &Path,
) -> Result<(RunOutcome, RunMeta), ExperimentError> {
    let eca = cfg.eca_for_seed(seed);
    let opts = cfg.log_options();
    let outcome = run_seeded(&eca, &cfg.schedule, &opts);
    let meta = RunMeta {
        run,
        seed,
        config_hash: config_hash(&eca, &cfg.schedule, &opts),
        classification: outcome.classification,
        optimum_at_end: outcome.final_population.has_optimum(),
    };
    write_run_artifacts(&outcome, &meta, dir)?;
    Ok((outcome, meta))
}

/// Runs every seed of the batch in parallel, writes per-run artifacts and
/// then the summary.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentSummary, ExperimentError> {
    cfg.validate()?;
    let out = &cfg.output_dir;
    fs::create_dir_all(out).map_err(io_err(out))?;
    let metas = (0..cfg.n_runs)
        .into_par_iter()
        .map(|r| execute_run(cfg, r, cfg.seed_for(r), &run_dir(out, r)).map(|(_, meta)| meta))
        .collect::<Result<Vec<_>, _>>()?;
    let summary = ExperimentSummary::from_runs(metas);
    let path = out.join("summary");
    let json = serde_json::to_string_pretty(&summary).expect("summary serializes");
    fs::write(&path, json + "\n").map_err(io_err(&path))?;
    Ok(summary)
}
