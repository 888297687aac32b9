mod support;

use proptest::prelude::*;
use replica_core::diagnostics::{distinct_genomes, levenshtein, mean_pairwise_distance};
use replica_core::golden::{reference_environment, STEADY_STATE_POPULATION};
use replica_core::{init_population, parse_genome, run_rng, EcaConfig, Individual, Population};
use support::levenshtein_oracle;

fn steady_state_population() -> Population {
    let env = reference_environment();
    Population::from_members(
        STEADY_STATE_POPULATION
            .iter()
            .map(|(p, _)| Individual::new(parse_genome(p, &env).unwrap(), &env))
            .collect(),
    )
}

#[test]
fn steady_state_table_diversity() {
    let pop = steady_state_population();
    assert_eq!(distinct_genomes(&pop), 10);

    let mut total = 0.0;
    let members = pop.members();
    for i in 0..members.len() {
        for j in i + 1..members.len() {
            let (a, b) = (members[i].genome().tokens(), members[j].genome().tokens());
            total += levenshtein_oracle(a, b) as f64 / a.len().max(b.len()) as f64;
        }
    }
    let expected = total / 45.0;
    let got = mean_pairwise_distance(&pop).unwrap();
    assert!((got - expected).abs() < 1e-12, "{got} vs {expected}");
    assert!(got > 0.0 && got < 1.0);
}

#[test]
fn converged_table_diversity() {
    let env = reference_environment();
    let pop = Population::from_members(vec![Individual::new(parse_genome("* 10 10", &env).unwrap(), &env); 10]);
    assert_eq!(distinct_genomes(&pop), 1);
    assert_eq!(mean_pairwise_distance(&pop), Some(0.0));
}

fn seq() -> impl Strategy<Value = Vec<u8>> {
    prop::collection::vec(0u8..7, 0..=12)
}

proptest! {
    #[test]
    fn levenshtein_matches_oracle(a in seq(), b in seq()) {
        prop_assert_eq!(levenshtein(&a, &b), levenshtein_oracle(&a, &b));
    }

    #[test]
    fn levenshtein_is_a_metric(a in seq(), b in seq(), c in seq()) {
        prop_assert_eq!(levenshtein(&a, &b), levenshtein(&b, &a));
        prop_assert_eq!(levenshtein(&a, &b) == 0, a == b);
        prop_assert!(levenshtein(&a, &c) <= levenshtein(&a, &b) + levenshtein(&b, &c));
    }

    #[test]
    fn single_genome_iff_zero_distance(seed in any::<u64>(), np in 2usize..8, d_init in 1usize..4) {
        let env = reference_environment();
        let cfg = EcaConfig { np, d_init, ..EcaConfig::default() };
        let pop = init_population(&cfg, &env, &mut run_rng(seed));
        let d = mean_pairwise_distance(&pop).unwrap();
        prop_assert_eq!(distinct_genomes(&pop) == 1, d == 0.0);
        prop_assert!((0.0..=1.0).contains(&d));
        prop_assert!((1..=np).contains(&distinct_genomes(&pop)));
    }
}
