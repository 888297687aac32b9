//! Reference programs and their published error values, replayed through an
//! evaluator to check that it reads genomes the same way.

use crate::expr::{fitness, parse_genome, Environment, Fitness, Genome};

pub const REFERENCE_INPUTS: [i64; 3] = [10, 20, 30];
pub const REFERENCE_TARGET: i64 = 100;

/// The program every member of a converged generational population carries.
pub const OPTIMAL_PROGRAM: &str = "* 10 10";
pub const OPTIMAL_INFIX: &str = "10*10";

/// Terminal population of a steady-state run: program and error.
pub const STEADY_STATE_POPULATION: [(&str, u64); 10] = [
    ("+ / 20 30 / * - 30 20 10 / * 20 30 10", 99),
    ("+ / * 30 30 10 - 30 20", 0),
    ("+ / * 30 20 10 / * 20 20 10", 0),
    ("+ / 20 30 / * * 10 20 10 20", 0),
    ("+ / / * 30 30 10 / 10 10 10", 0),
    ("+ / / * 30 30 10 / + 20 30 / * 30 10 10 - 30 20", 0),
    ("+ / * 30 30 10 - 30 20 30 10 10", 0),
    ("+ / / 30 10 10 / * * 10 20 10 20", 0),
    ("+ / / * 30 30 10 / + 20 30 30 10", 0),
    ("+ / / 30 10 10 / * * 10 10 30 30", 0),
];

pub fn reference_environment() -> Environment {
    Environment::new(REFERENCE_INPUTS.to_vec(), REFERENCE_TARGET).expect("non-empty inputs")
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GoldenCheck {
    pub label: String,
    pub program: &'static str,
    pub expected: Fitness,
    pub computed: Fitness,
}

impl GoldenCheck {
    pub fn passed(&self) -> bool {
        self.expected == self.computed
    }
}

/// Replays the optimal program and the ten steady-state programs through
/// `fitness_fn`.
pub fn check_tables<F>(fitness_fn: F) -> Vec<GoldenCheck>
where
    F: Fn(&Genome, &Environment) -> Fitness,
{
    let env = reference_environment();
    let mut checks = Vec::with_capacity(11);
    let mut push = |label: String, program: &'static str, expected: u64| {
        let genome = parse_genome(program, &env).expect("golden programs parse");
        checks.push(GoldenCheck {
            label,
            program,
            expected: Fitness::Finite(expected),
            computed: fitness_fn(&genome, &env),
        });
    };
    push("generational optimum".to_string(), OPTIMAL_PROGRAM, 0);
    for (i, (program, err)) in STEADY_STATE_POPULATION.iter().enumerate() {
        push(format!("steady-state row {}", i + 1), program, *err);
    }
    checks
}

/// [`check_tables`] with the crate's evaluator.
pub fn check_reference_tables() -> Vec<GoldenCheck> {
    check_tables(fitness)
}
