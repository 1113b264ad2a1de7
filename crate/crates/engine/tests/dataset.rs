use std::collections::BTreeSet;

use proptest::prelude::*;

use retrokit_engine::dataset::*;
use retrokit_engine::synth::{augmentation_templates, generate_corpus, SynthConfig, SynthCorpus};

fn corpus(seed: u64, pathways: usize) -> SynthCorpus {
    generate_corpus(&SynthConfig { seed, pathways, ..SynthConfig::default() })
}

fn mono_of(c: &SynthCorpus) -> Vec<MonoProductReaction> {
    let (records, _) = clean_reactions(&c.reactions, &build_compound_table(&[]));
    split_mono_product(&records)
}

#[test]
fn synthetic_corpus_cleans_without_losses() {
    let c = corpus(0, 20);
    let (records, stats) = clean_reactions(&c.reactions, &build_compound_table(&[]));
    assert_eq!(stats.reactions_in, c.reactions.len());
    assert_eq!(stats.reactions_broken, 0);
    assert_eq!(records.len() + stats.duplicates_merged, c.reactions.len());
}

#[test]
fn mono_split_conserves_products() {
    let c = corpus(1, 20);
    let (records, _) = clean_reactions(&c.reactions, &build_compound_table(&[]));
    let mono = split_mono_product(&records);
    assert_eq!(mono.len(), records.iter().map(|r| r.products.len()).sum::<usize>());
    for m in &mono {
        let parent = records.iter().find(|r| r.reaction_id == m.parent_id).unwrap();
        assert_eq!(m.reactants, parent.reactants);
        assert!(parent.products.contains(&m.product));
    }
}

#[test]
fn augmentation_is_strict_and_repeatable() {
    let mono = mono_of(&corpus(2, 15));
    let templates = augmentation_templates();
    let a = augment_negatives(&mono, &templates);
    assert_eq!(strict_check_violations(&mono, &a.negatives), 0);
    assert!(!a.negatives.is_empty());
    assert_eq!(a, augment_negatives(&mono, &templates));
    let histogram_total: usize = a.histogram(&mono).values().sum();
    assert_eq!(histogram_total, mono.len());
}

#[test]
fn augmentation_matches_across_thread_counts() {
    let mono = mono_of(&corpus(3, 10));
    let templates = augmentation_templates();
    let run = |threads: usize| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| write_mono_tsv(&augment_negatives(&mono, &templates).negatives))
    };
    assert_eq!(run(1), run(4));
}

#[test]
fn pathway_chains_join_at_the_main_reactant() {
    let c = corpus(4, 12);
    let mono = mono_of(&c);
    let (chains, skipped) = chains_from_pathways(&c.pathways, &mono);
    assert_eq!(skipped, 0);
    assert!(!chains.is_empty());
    let aug = augment_negatives(&mono, &augmentation_templates());
    let rows = make_pathway_pairs(&chains, &aug.sets_by_product());
    let positives: BTreeSet<_> = rows.iter().filter(|r| r.label).map(|r| r.steps.clone()).collect();
    for r in rows.iter().filter(|r| !r.label) {
        assert!(!positives.contains(&r.steps));
        assert_eq!(r.steps.len(), 2);
    }
}

#[test]
fn dataset_tsv_round_trips() {
    let mono = mono_of(&corpus(5, 6));
    let aug = augment_negatives(&mono, &augmentation_templates());
    let rows = one_step_rows(&mono, &aug);
    let text = write_dataset_tsv(&rows);
    assert_eq!(parse_dataset_tsv(&text).unwrap(), rows);
    let mono_text = write_mono_tsv(&mono);
    assert_eq!(parse_mono_tsv(&mono_text).unwrap(), mono);
    let raw = corpus(5, 6).reactions;
    assert_eq!(parse_reaction_tsv(&write_reaction_tsv(&raw)).unwrap(), raw);
}

fn rows_for(seed: u64) -> Vec<DatasetRow> {
    let mono = mono_of(&corpus(seed, 6));
    let aug = augment_negatives(&mono, &augmentation_templates());
    one_step_rows(&mono, &aug)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn group_split_never_leaks(seed in 0u64..4, split_seed in any::<u64>(), fraction in 0.0f64..=1.0) {
        let rows = rows_for(seed);
        let (train, test) = split_train_test(rows.clone(), fraction, split_seed).unwrap();
        prop_assert_eq!(train.len() + test.len(), rows.len());
        let a: BTreeSet<_> = train.iter().map(|r| &r.group_key).collect();
        let b: BTreeSet<_> = test.iter().map(|r| &r.group_key).collect();
        prop_assert!(a.is_disjoint(&b));
        let again = split_train_test(rows, fraction, split_seed).unwrap();
        prop_assert_eq!(again, (train, test));
    }

    #[test]
    fn subsampling_keeps_every_positive(seed in 0u64..4, sub_seed in any::<u64>(), fraction in 0.01f64..=1.0) {
        let rows = rows_for(seed);
        let negatives = rows.iter().filter(|r| !r.label).count();
        let kept = subsample_negatives(rows.clone(), fraction, sub_seed).unwrap();
        prop_assert_eq!(kept.iter().filter(|r| r.label).count(), rows.iter().filter(|r| r.label).count());
        prop_assert_eq!(kept.iter().filter(|r| !r.label).count(), (negatives as f64 * fraction).ceil() as usize);
    }

    #[test]
    fn negatives_never_equal_a_positive(seed in 0u64..50) {
        let mono = mono_of(&corpus(seed, 3));
        let aug = augment_negatives(&mono, &augmentation_templates());
        prop_assert_eq!(strict_check_violations(&mono, &aug.negatives), 0);
        let total: usize = aug.per_product.values().sum();
        prop_assert_eq!(total, aug.negatives.len());
    }
}
