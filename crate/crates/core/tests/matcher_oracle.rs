mod common;

use std::collections::BTreeSet;

use common::oracles::{brute_force, random_pattern};
use common::random_molecule;
use proptest::prelude::*;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use retrokit_core::molgraph::Element;
use retrokit_core::pattern::{find_matches, PatternGraph};

#[test]
fn two_hundred_random_pairs_match_the_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut nonempty = 0;
    for _ in 0..200 {
        let pattern = random_pattern(&mut rng);
        let target = random_molecule(&mut rng, 10);
        let found: Vec<Vec<usize>> = find_matches(&pattern, &target).into_iter().map(|m| m.assignment).collect();
        let expected = brute_force(&pattern, &target);
        assert!(found.windows(2).all(|w| w[0] < w[1]), "unsorted or duplicated");
        assert_eq!(found.into_iter().collect::<BTreeSet<_>>(), expected, "{pattern:?} vs {target}");
        nonempty += usize::from(!expected.is_empty());
    }
    println!("{nonempty} of 200 pairs have matches");
    assert!(nonempty > 50, "too few informative pairs: {nonempty}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn matcher_equals_oracle(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let pattern = random_pattern(&mut rng);
        let target = random_molecule(&mut rng, 10);
        let found: BTreeSet<Vec<usize>> = find_matches(&pattern, &target).into_iter().map(|m| m.assignment).collect();
        prop_assert_eq!(found, brute_force(&pattern, &target));
    }

    #[test]
    fn adding_a_constraint_never_adds_matches(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let pattern = random_pattern(&mut rng);
        let target = random_molecule(&mut rng, 10);
        let before = find_matches(&pattern, &target).len();
        let mut atoms = pattern.atoms().to_vec();
        let k = rng.gen_range(0..atoms.len());
        match rng.gen_range(0..3) {
            0 => atoms[k].element = atoms[k].element.or(Some(Element::C)),
            1 => atoms[k].hydrogens = atoms[k].hydrogens.or(Some(rng.gen_range(0..=3))),
            _ => atoms[k].degree = atoms[k].degree.or(Some(rng.gen_range(1..=3))),
        }
        let tightened = PatternGraph::new(atoms, pattern.bonds().to_vec());
        prop_assert!(find_matches(&tightened, &target).len() <= before);
    }
}
