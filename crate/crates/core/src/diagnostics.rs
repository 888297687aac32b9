//! Population diversity metrics and run-behavior classification.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::engine::Population;
use crate::expr::{Fitness, Genome};

/// Metrics for one logged generation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenerationRecord {
    pub generation: u64,
    pub best_fitness: Fitness,
    /// Mean error over members with finite fitness; absent if there are none.
    pub mean_finite_fitness: Option<f64>,
    pub distinct_genomes: usize,
    /// Absent for populations of fewer than two members.
    pub mean_pairwise_distance: Option<f64>,
    pub worst_count: usize,
}

impl GenerationRecord {
    pub fn capture(generation: u64, pop: &Population) -> GenerationRecord {
        let mut finite_sum = 0u128;
        let mut finite_count = 0u64;
        let mut worst_count = 0;
        for ind in pop.members() {
            match ind.fitness() {
                Fitness::Finite(e) => {
                    finite_sum += u128::from(e);
                    finite_count += 1;
                }
                Fitness::Worst => worst_count += 1,
            }
        }
        GenerationRecord {
            generation,
            best_fitness: pop.best_fitness(),
            mean_finite_fitness: (finite_count > 0).then(|| finite_sum as f64 / finite_count as f64),
            distinct_genomes: distinct_genomes(pop),
            mean_pairwise_distance: mean_pairwise_distance(pop),
            worst_count,
        }
    }
}

/// The per-environment segment of a run. A new epoch starts whenever an
/// environment event is applied.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Epoch {
    pub start_generation: u64,
    /// First generation at or after `start_generation` whose population held
    /// a member of fitness 0.
    pub first_optimum: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunLog {
    /// State of the initial population, before any step.
    pub initial: GenerationRecord,
    /// One record per logged generation, in order.
    pub records: Vec<GenerationRecord>,
    pub epochs: Vec<Epoch>,
}

impl RunLog {
    pub fn current_epoch(&self) -> &Epoch {
        self.epochs.last().expect("a run log always has an epoch")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Behavior {
    Converged,
    Oscillating,
    Failed,
}

impl std::fmt::Display for Behavior {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        std::fmt::Debug::fmt(self, f)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunClassification {
    pub behavior: Behavior,
    /// First optimum within the final environment epoch.
    pub generation_of_first_optimum: Option<u64>,
    /// Distinct genomes in the last logged generation.
    pub terminal_diversity: usize,
}

pub const DEFAULT_WINDOW: usize = 1000;

/// Number of distinct token sequences in the population.
pub fn distinct_genomes(pop: &Population) -> usize {
    genome_classes(pop).len()
}

fn genome_classes(pop: &Population) -> Vec<(&Genome, usize)> {
    let mut counts: HashMap<&Genome, usize> = HashMap::new();
    let mut order = Vec::new();
    for ind in pop.members() {
        let c = counts.entry(ind.genome()).or_insert_with(|| {
            order.push(ind.genome());
            0
        });
        *c += 1;
    }
    order.into_iter().map(|g| (g, counts[g])).collect()
}

/// Mean over unordered pairs of token Levenshtein distance divided by the
/// longer genome's length. `None` when the population has fewer than two
/// members.
pub fn mean_pairwise_distance(pop: &Population) -> Option<f64> {
    let n = pop.len();
    if n < 2 {
        return None;
    }
    // Identical members contribute zero, so only pairs across classes count.
    let classes = genome_classes(pop);
    let mut total = 0.0;
    for (i, (a, ca)) in classes.iter().enumerate() {
        for (b, cb) in &classes[i + 1..] {
            let d = levenshtein(a.tokens(), b.tokens()) as f64 / a.len().max(b.len()) as f64;
            total += d * (*ca * *cb) as f64;
        }
    }
    let pairs = (n * (n - 1) / 2) as f64;
    Some(total / pairs)
}

/// Edit distance with unit-cost insertion, deletion and substitution.
pub fn levenshtein<T: PartialEq>(a: &[T], b: &[T]) -> usize {
    if a.len() < b.len() {
        return levenshtein(b, a);
    }
    let mut row: Vec<usize> = (0..=b.len()).collect();
    for (i, x) in a.iter().enumerate() {
        let mut diag = row[0];
        row[0] = i + 1;
        for (j, y) in b.iter().enumerate() {
            let sub = diag + usize::from(x != y);
            diag = row[j + 1];
            row[j + 1] = sub.min(diag + 1).min(row[j] + 1);
        }
    }
    row[b.len()]
}

/// Classifies the trailing `window` records of a run (the whole log if it
/// is shorter; the initial state if nothing was logged).
///
/// * Converged: every record has a fitness-0 best and a single genome.
/// * Oscillating: every record holds a fitness-0 member and at least half
///   of them have more than one distinct genome.
/// * Failed: anything else.
pub fn classify(log: &RunLog, window: usize) -> RunClassification {
    let window = window.max(1);
    let records: &[GenerationRecord] = if log.records.is_empty() {
        std::slice::from_ref(&log.initial)
    } else {
        &log.records[log.records.len().saturating_sub(window)..]
    };
    let all_optimal = records.iter().all(|r| r.best_fitness.is_optimal());
    let diverse = records.iter().filter(|r| r.distinct_genomes > 1).count();
    let behavior = if all_optimal && diverse == 0 {
        Behavior::Converged
    } else if all_optimal && 2 * diverse >= records.len() {
        Behavior::Oscillating
    } else {
        Behavior::Failed
    };
    RunClassification {
        behavior,
        generation_of_first_optimum: log.current_epoch().first_optimum,
        terminal_diversity: records.last().map_or(0, |r| r.distinct_genomes),
    }
}
