//! The evolutionary control algorithm: population initialization, one-point
//! crossover on variable-sized genomes, single-token mutation, and the
//! generational (elitist) and steady-state (non-elitist) population models.
//!
//! Every stochastic choice of a run comes from one random stream, consumed
//! in a fixed order: the initial population first, then per offspring
//!
//! * generational: crossover coin (only when `p_c < 1`), mate, both cut
//!   points, mutation coin and, when mutating, position, token kind and
//!   token value;
//! * steady-state: first parent, mate, both cut points, the mutation draws,
//!   and finally, under [`Replacement::Worst`], the pick among the worst
//!   members. Under [`Replacement::Random`] the first parent is the target.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::diagnostics::{classify, Epoch, GenerationRecord, RunClassification, RunLog, DEFAULT_WINDOW};
use crate::expr::{fitness, random_genome, Environment, Fitness, Genome, Token};
use crate::experiment::{apply_environment_event, EnvironmentSchedule};

/// The random stream used by a run.
pub type RunRng = ChaCha8Rng;

pub fn run_rng(seed: u64) -> RunRng {
    ChaCha8Rng::seed_from_u64(seed)
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Individual {
    genome: Genome,
    fitness: Fitness,
}

impl Individual {
    pub fn new(genome: Genome, env: &Environment) -> Individual {
        let fitness = fitness(&genome, env);
        Individual { genome, fitness }
    }

    pub fn genome(&self) -> &Genome {
        &self.genome
    }

    pub fn fitness(&self) -> Fitness {
        self.fitness
    }

    fn refresh(&mut self, env: &Environment) {
        self.fitness = fitness(&self.genome, env);
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Population {
    members: Vec<Individual>,
}

impl Population {
    pub fn from_members(members: Vec<Individual>) -> Population {
        Population { members }
    }

    pub fn members(&self) -> &[Individual] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn best_fitness(&self) -> Fitness {
        self.members.iter().map(Individual::fitness).min().unwrap_or(Fitness::Worst)
    }

    pub fn worst_fitness(&self) -> Fitness {
        self.members.iter().map(Individual::fitness).max().unwrap_or(Fitness::Worst)
    }

    pub fn has_optimum(&self) -> bool {
        self.members.iter().any(|m| m.fitness.is_optimal())
    }

    /// Recomputes every cached fitness against `env`.
    pub fn refresh(&mut self, env: &Environment) {
        for m in &mut self.members {
            m.refresh(env);
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Model {
    Generational,
    SteadyState,
}

/// How the generational model breaks fitness ties between a trial and its
/// target.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TieBreak {
    /// The trial always wins ties.
    Trial,
    /// The shorter genome wins; the trial wins at equal length.
    Shorter,
}

/// Which member a steady-state offspring displaces. Replacement is
/// unconditional either way: the offspring goes in even when it is worse.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Replacement {
    /// A uniformly chosen member of worst fitness; parents are uniform.
    Worst,
    /// The first parent itself, chosen uniformly.
    Random,
}

#[derive(Debug, Clone, PartialEq, Error)]
#[error("invalid `{field}`: {message}")]
pub struct ConfigError {
    pub field: String,
    pub message: String,
}

impl ConfigError {
    pub fn new(field: impl Into<String>, message: impl Into<String>) -> ConfigError {
        ConfigError {
            field: field.into(),
            message: message.into(),
        }
    }
}

/// Algorithm settings. `Default` reproduces the reference setting: initial
/// size 10, population 10, 1,000,000 generations, mutation probability 0.1,
/// generational gap 1/10 and crossover probability 1.0.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EcaConfig {
    /// Upper bound of the uniform initial genome length.
    pub d_init: usize,
    /// Population size.
    pub np: usize,
    /// Number of generations.
    pub n_gen: u64,
    /// Per-offspring probability of a single-token replacement.
    pub p_m: f64,
    pub model: Model,
    /// Offspring per steady-state generation.
    pub lambda: usize,
    /// Crossover probability in the generational model.
    pub p_c: f64,
    /// Genome length cap applied to crossover children.
    pub d_max: usize,
    pub tie_break: TieBreak,
    pub replacement: Replacement,
    pub seed: u64,
}

impl Default for EcaConfig {
    fn default() -> Self {
        EcaConfig {
            d_init: 10,
            np: 10,
            n_gen: 1_000_000,
            p_m: 0.1,
            model: Model::SteadyState,
            lambda: 1,
            p_c: 1.0,
            d_max: 100,
            tie_break: TieBreak::Shorter,
            replacement: Replacement::Worst,
            seed: 0,
        }
    }
}

impl EcaConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.d_init == 0 {
            return Err(ConfigError::new("d_init", "must be at least 1"));
        }
        if self.np == 0 {
            return Err(ConfigError::new("np", "must be at least 1"));
        }
        if !(0.0..=1.0).contains(&self.p_m) {
            return Err(ConfigError::new("p_m", "must be a probability in [0, 1]"));
        }
        if !(0.0..=1.0).contains(&self.p_c) {
            return Err(ConfigError::new("p_c", "must be a probability in [0, 1]"));
        }
        if self.lambda == 0 || self.lambda > self.np {
            return Err(ConfigError::new("lambda", "must be in [1, np]"));
        }
        if self.d_max < self.d_init {
            return Err(ConfigError::new("d_max", "must be at least d_init"));
        }
        Ok(())
    }
}

/// Logging and classification settings of a run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LogOptions {
    /// Record every `stride`-th generation (and always the last one).
    pub stride: u64,
    /// Trailing records considered by the classifier.
    pub window: usize,
}

impl Default for LogOptions {
    fn default() -> Self {
        LogOptions {
            stride: 1,
            window: DEFAULT_WINDOW,
        }
    }
}

#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub final_population: Population,
    pub final_environment: Environment,
    pub log: RunLog,
    pub classification: RunClassification,
}

pub fn init_population<R: Rng + ?Sized>(cfg: &EcaConfig, env: &Environment, rng: &mut R) -> Population {
    let members = (0..cfg.np)
        .map(|_| Individual::new(random_genome(rng, env, cfg.d_init), env))
        .collect();
    Population { members }
}

/// Child of `a[..cut_a] ++ b[cut_b..]`, truncated to `d_max` tokens.
///
/// Panics unless `1 <= cut_a <= |a|` and `cut_b < |b|`.
pub fn splice(a: &Genome, b: &Genome, cut_a: usize, cut_b: usize, d_max: usize) -> Genome {
    assert!((1..=a.len()).contains(&cut_a), "cut_a out of range");
    assert!(cut_b < b.len(), "cut_b out of range");
    let tokens: Vec<Token> = a.tokens()[..cut_a]
        .iter()
        .chain(&b.tokens()[cut_b..])
        .take(d_max.max(1))
        .copied()
        .collect();
    Genome::new(tokens).expect("splice keeps at least one token")
}

/// One-point crossover with independent cut points: `cut_a` uniform in
/// `[1, |a|]`, `cut_b` uniform in `[0, |b| - 1]`.
pub fn one_point_crossover<R: Rng + ?Sized>(a: &Genome, b: &Genome, d_max: usize, rng: &mut R) -> Genome {
    let cut_a = rng.gen_range(1..=a.len());
    let cut_b = rng.gen_range(0..b.len());
    splice(a, b, cut_a, cut_b, d_max)
}

/// With probability `p_m`, replaces one uniformly chosen token by a fresh
/// random token.
pub fn mutate<R: Rng + ?Sized>(mut g: Genome, env: &Environment, p_m: f64, rng: &mut R) -> Genome {
    if rng.gen::<f64>() < p_m {
        let pos = rng.gen_range(0..g.len());
        g.tokens_mut()[pos] = Token::random(rng, env.inputs().len());
    }
    g
}

// Uniform index in [0, np) other than `target`; `target` itself when np = 1.
fn pick_mate<R: Rng + ?Sized>(np: usize, target: usize, rng: &mut R) -> usize {
    if np == 1 {
        return target;
    }
    let j = rng.gen_range(0..np - 1);
    if j >= target {
        j + 1
    } else {
        j
    }
}

/// Every member is challenged by a trial built from it; the better of trial
/// and target survives, ties resolved by `cfg.tie_break`.
pub fn generational_step<R: Rng + ?Sized>(
    pop: &Population,
    env: &Environment,
    cfg: &EcaConfig,
    rng: &mut R,
) -> Population {
    let np = pop.len();
    let members = pop
        .members
        .iter()
        .enumerate()
        .map(|(i, target)| {
            let cross = cfg.p_c >= 1.0 || rng.gen::<f64>() < cfg.p_c;
            let base = if cross {
                let mate = &pop.members[pick_mate(np, i, rng)];
                one_point_crossover(&target.genome, &mate.genome, cfg.d_max, rng)
            } else {
                target.genome.clone()
            };
            let trial = Individual::new(mutate(base, env, cfg.p_m, rng), env);
            let trial_wins = match cfg.tie_break {
                TieBreak::Trial => trial.fitness <= target.fitness,
                TieBreak::Shorter => {
                    (trial.fitness, trial.genome.len()) <= (target.fitness, target.genome.len())
                }
            };
            if trial_wins {
                trial
            } else {
                target.clone()
            }
        })
        .collect();
    Population { members }
}

/// `lambda` times: the mutated crossover child of two distinct random
/// parents replaces a member chosen by `cfg.replacement`, whatever the
/// child's fitness.
pub fn steady_state_step<R: Rng + ?Sized>(
    mut pop: Population,
    env: &Environment,
    cfg: &EcaConfig,
    rng: &mut R,
) -> Population {
    let np = pop.len();
    for _ in 0..cfg.lambda {
        let parent = rng.gen_range(0..np);
        let mate = pick_mate(np, parent, rng);
        let child = one_point_crossover(&pop.members[parent].genome, &pop.members[mate].genome, cfg.d_max, rng);
        let child = mutate(child, env, cfg.p_m, rng);
        let target = match cfg.replacement {
            Replacement::Random => parent,
            Replacement::Worst => pick_worst(&pop, rng),
        };
        pop.members[target] = Individual::new(child, env);
    }
    pop
}

fn pick_worst<R: Rng + ?Sized>(pop: &Population, rng: &mut R) -> usize {
    let worst = pop.worst_fitness();
    let ties = pop.members.iter().filter(|m| m.fitness == worst).count();
    let k = rng.gen_range(0..ties);
    pop.members
        .iter()
        .enumerate()
        .filter(|(_, m)| m.fitness == worst)
        .nth(k)
        .map(|(i, _)| i)
        .expect("k < ties")
}

/// Runs `cfg.n_gen` generations from a fresh population, applying due
/// schedule events before each generation.
pub fn run<R: Rng + ?Sized>(
    cfg: &EcaConfig,
    schedule: &EnvironmentSchedule,
    opts: &LogOptions,
    rng: &mut R,
) -> RunOutcome {
    let stride = opts.stride.max(1);
    let mut env = schedule.initial.clone();
    let mut pop = init_population(cfg, &env, rng);
    let mut log = RunLog {
        initial: GenerationRecord::capture(0, &pop),
        records: Vec::new(),
        epochs: vec![Epoch {
            start_generation: 0,
            first_optimum: pop.has_optimum().then_some(0),
        }],
    };
    let mut events = schedule.events.iter().peekable();

    for gen in 0..cfg.n_gen {
        while let Some(event) = events.next_if(|e| e.at_generation <= gen) {
            env = apply_environment_event(&env, event).expect("schedule events are validated");
            pop.refresh(&env);
            log.epochs.push(Epoch {
                start_generation: gen,
                first_optimum: pop.has_optimum().then_some(gen),
            });
        }

        pop = match cfg.model {
            Model::Generational => generational_step(&pop, &env, cfg, rng),
            Model::SteadyState => steady_state_step(pop, &env, cfg, rng),
        };

        let generation = gen + 1;
        let epoch = log.epochs.last_mut().expect("at least one epoch");
        if epoch.first_optimum.is_none() && pop.has_optimum() {
            epoch.first_optimum = Some(generation);
        }
        if generation % stride == 0 || generation == cfg.n_gen {
            log.records.push(GenerationRecord::capture(generation, &pop));
        }
    }

    let classification = classify(&log, opts.window);
    RunOutcome {
        final_population: pop,
        final_environment: env,
        log,
        classification,
    }
}

/// [`run`] with a stream seeded from `cfg.seed`.
pub fn run_seeded(cfg: &EcaConfig, schedule: &EnvironmentSchedule, opts: &LogOptions) -> RunOutcome {
    run(cfg, schedule, opts, &mut run_rng(cfg.seed))
}
