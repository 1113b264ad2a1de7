//! Seeded synthetic reaction worlds.
//!
//! A small set of forward rules (each with an optional co-substrate) is
//! applied to random acyclic molecules to build multi-step pathways. The
//! backward versions of those rules, plus decoy templates describing
//! transformations that never occur in the generated world, form the
//! template set used for augmentation and search. Everything derives from
//! one seed.

use std::collections::{BTreeMap, BTreeSet};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use retrokit_core::molgraph::parse_smiles;
use retrokit_core::pattern::{apply_template, main_component, Direction, ReactionTemplate};
use retrokit_core::CanonicalSmiles;

use crate::dataset::RawReaction;
use crate::pipeline::GoldPathway;

/// A forward transformation of the toy world.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SynthRule {
    pub name: &'static str,
    pub ec: &'static str,
    /// Reaction SMARTS read reactants to product.
    pub forward: &'static str,
    pub cosubstrate: Option<&'static str>,
}

pub const RULES: &[SynthRule] = &[
    SynthRule { name: "aldehyde_reduction", ec: "1.1.1.1", forward: "[C;H1:1]=[O:2]>>[C:1][O:2]", cosubstrate: None },
    SynthRule {
        name: "alcohol_oxidation",
        ec: "1.1.1.2",
        forward: "[C;H1:1]([C:2])([C:3])[O;H1:4]>>[C:1]([C:2])([C:3])=[O:4]",
        cosubstrate: None,
    },
    SynthRule {
        name: "ketone_reduction",
        ec: "1.1.1.3",
        forward: "[C:2][C:1](=[O:3])[C:4]>>[C:2][C:1]([O:3])[C:4]",
        cosubstrate: None,
    },
    SynthRule {
        name: "alkene_hydration",
        ec: "4.2.1.1",
        forward: "[C:1]=[C:2].[O;H2:3]>>[C:1][C:2][O:3]",
        cosubstrate: Some("O"),
    },
    SynthRule {
        name: "alcohol_dehydration",
        ec: "4.2.1.2",
        forward: "[C;H2:1][C:2][O;H1]>>[C:1]=[C:2]",
        cosubstrate: None,
    },
    SynthRule {
        name: "carboxylation",
        ec: "4.1.1.1",
        forward: "[C;H3:1][C:5].[O:2]=[C:3]=[O:4]>>[C:5][C:1][C:3](=[O:2])[O:4]",
        cosubstrate: Some("O=C=O"),
    },
    SynthRule { name: "decarboxylation", ec: "4.1.1.2", forward: "[C:1]C(=O)[O;H1]>>[C:1]", cosubstrate: None },
    SynthRule {
        name: "reductive_amination",
        ec: "2.6.1.1",
        forward: "[C:4][C:1](=O)[C:5].[N;H3:3]>>[C:4][C:1]([N:3])[C:5]",
        cosubstrate: Some("N"),
    },
    SynthRule {
        name: "o_methylation",
        ec: "2.1.1.1",
        forward: "[C:2][O;H1:1].[C;H3:3][O;H1]>>[C:2][O:1][C:3]",
        cosubstrate: Some("CO"),
    },
    SynthRule {
        name: "phosphorylation",
        ec: "2.7.1.1",
        forward: "[C:1][O;H1:2].[P:3](=[O:4])([O:5])([O:6])[O;H1]>>[C:1][O:2][P:3](=[O:4])([O:5])[O:6]",
        cosubstrate: Some("OP(=O)(O)O"),
    },
    SynthRule {
        name: "esterification",
        ec: "3.1.1.1",
        forward: "[C:1](=[O:2])[O;H1].[C;H2:4][O;H1:5]>>[C:1](=[O:2])[O:5][C:4]",
        cosubstrate: Some("CCO"),
    },
    SynthRule {
        name: "amidation",
        ec: "6.3.2.1",
        forward: "[C:1](=[O:2])[O;H1].[N;H2:4][C:5]>>[C:1](=[O:2])[N:4][C:5]",
        cosubstrate: Some("NCC(=O)O"),
    },
];

/// Backward templates `(id, ec, smarts)` for transformations the generator
/// never performs. They yield precursors very similar to the product.
pub const DECOYS: &[(&str, &str, &str)] = &[
    ("decoy_hydroxylation", "1.14.1.1", "[C:1][O;H1]>>[C:1]"),
    ("decoy_desaturation", "1.3.1.1", "[C:1]-[C:2]>>[C:1]=[C:2]"),
    ("decoy_methyl_transfer", "2.1.1.9", "[C:1][C;H3]>>[C:1]"),
    ("decoy_chain_trim", "3.7.1.1", "[C;H3:1]>>[C:1]C"),
    ("decoy_oxo", "1.14.2.1", "[C;H2:1]>>[C:1]=O"),
    ("decoy_amine_swap", "3.5.1.1", "[C:1][O;H1]>>[C:1]N"),
];

impl SynthRule {
    pub fn forward_template(&self) -> ReactionTemplate {
        ReactionTemplate::parse(self.forward)
            .expect("built-in rule parses")
            .with_id(self.name)
            .with_direction(Direction::Forward)
            .with_ec_numbers(vec![self.ec.to_string()])
    }

    pub fn backward_template(&self) -> ReactionTemplate {
        self.forward_template().to_backward().expect("built-in rule reverses")
    }

    /// Distinct single-molecule products of applying the rule to
    /// `reactant` together with the co-substrate, in key order.
    pub fn apply(&self, reactant: &CanonicalSmiles) -> Vec<CanonicalSmiles> {
        let text = match self.cosubstrate {
            Some(c) => format!("{}.{c}", reactant.as_str()),
            None => reactant.as_str().to_string(),
        };
        let Ok(graph) = parse_smiles(&text) else {
            return Vec::new();
        };
        let Ok(outcomes) = apply_template(&self.forward_template(), &graph) else {
            return Vec::new();
        };
        let products: BTreeSet<CanonicalSmiles> = outcomes
            .into_iter()
            .filter(|o| o.keys.len() == 1)
            .map(|o| o.keys.into_iter().next().expect("one key"))
            .collect();
        products.into_iter().collect()
    }

    /// The reactant multiset of the rule applied to `reactant`, sorted.
    pub fn reactants(&self, reactant: &CanonicalSmiles) -> Vec<CanonicalSmiles> {
        let mut out = vec![reactant.clone()];
        if let Some(c) = self.cosubstrate {
            out.push(CanonicalSmiles::from_smiles(c).expect("built-in co-substrate parses"));
        }
        out.sort();
        out
    }
}

/// Backward versions of every rule, ids equal to the rule names.
pub fn rule_templates() -> Vec<ReactionTemplate> {
    RULES.iter().map(SynthRule::backward_template).collect()
}

pub fn decoy_templates() -> Vec<ReactionTemplate> {
    DECOYS
        .iter()
        .map(|&(id, ec, smarts)| {
            ReactionTemplate::parse(smarts)
                .expect("built-in decoy parses")
                .with_id(id)
                .with_ec_numbers(vec![ec.to_string()])
        })
        .collect()
}

/// Rule templates followed by decoys.
pub fn augmentation_templates() -> Vec<ReactionTemplate> {
    let mut out = rule_templates();
    out.extend(decoy_templates());
    out
}

#[derive(Debug, Clone, PartialEq)]
pub struct SynthConfig {
    pub seed: u64,
    pub pathways: usize,
    /// Maximum reactions per pathway; pathways stop early when no rule applies.
    pub steps: usize,
    /// Heavy-atom range of pathway start molecules.
    pub min_atoms: usize,
    pub max_atoms: usize,
}

impl Default for SynthConfig {
    fn default() -> Self {
        SynthConfig { seed: 0, pathways: 60, steps: 3, min_atoms: 6, max_atoms: 12 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SynthCorpus {
    /// Reactants and products written as SMILES tokens.
    pub reactions: Vec<RawReaction>,
    /// Pathway id and its reaction ids in forward order.
    pub pathways: Vec<(String, Vec<String>)>,
    /// Reactions generated per rule name.
    pub rule_counts: BTreeMap<String, usize>,
}

/// Generates `config.pathways` pathways of at least two reactions each.
/// Each step applies a random applicable rule to the previous product; a
/// step is accepted only if the previous product stays the main reactant
/// and no molecule repeats within the pathway.
pub fn generate_corpus(config: &SynthConfig) -> SynthCorpus {
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut reactions = Vec::new();
    let mut pathways = Vec::new();
    let mut rule_counts = BTreeMap::new();
    let mut seen_reactions = BTreeSet::new();
    let mut attempts = 0usize;
    while pathways.len() < config.pathways && attempts < config.pathways * 50 {
        attempts += 1;
        let Some(start) = random_molecule(&mut rng, config.min_atoms, config.max_atoms) else {
            continue;
        };
        let walk = random_walk(&mut rng, &start, config.steps);
        if walk.len() < 2 {
            continue;
        }
        let pathway_id = format!("SP{:04}", pathways.len() + 1);
        let mut ids = Vec::new();
        for (k, (rule, reactants, product)) in walk.into_iter().enumerate() {
            let id = format!("{pathway_id}_{}", k + 1);
            if seen_reactions.insert((reactants.clone(), product.clone())) {
                *rule_counts.entry(rule.name.to_string()).or_insert(0) += 1;
            }
            reactions.push(RawReaction {
                reaction_id: id.clone(),
                ec_numbers: vec![rule.ec.to_string()],
                reactants: reactants.iter().map(|k| k.as_str().to_string()).collect(),
                products: vec![product.as_str().to_string()],
            });
            ids.push(id);
        }
        pathways.push((pathway_id, ids));
    }
    SynthCorpus { reactions, pathways, rule_counts }
}

type WalkStep = (&'static SynthRule, Vec<CanonicalSmiles>, CanonicalSmiles);

fn random_walk(rng: &mut ChaCha8Rng, start: &CanonicalSmiles, steps: usize) -> Vec<WalkStep> {
    let mut visited = BTreeSet::from([start.clone()]);
    let mut current = start.clone();
    let mut out = Vec::new();
    for _ in 0..steps {
        let mut order: Vec<&'static SynthRule> = RULES.iter().collect();
        order.shuffle(rng);
        let next = order.into_iter().find_map(|rule| {
            let reactants = rule.reactants(&current);
            if main_component(&reactants) != &current {
                return None;
            }
            let products: Vec<CanonicalSmiles> =
                rule.apply(&current).into_iter().filter(|p| !visited.contains(p)).collect();
            products.choose(rng).cloned().map(|p| (rule, reactants, p))
        });
        let Some((rule, reactants, product)) = next else {
            break;
        };
        visited.insert(product.clone());
        current = product.clone();
        out.push((rule, reactants, product));
    }
    out
}

const GROUPS: &[(&str, u8, usize)] =
    &[("O", 1, 1), ("O", 1, 1), ("=O", 2, 1), ("N", 1, 1), ("C(=O)O", 1, 3), ("OC", 1, 2)];

/// A random acyclic molecule: a branched carbon skeleton with up to one
/// double bond and one to three functional groups. `None` when the draw
/// falls outside the heavy-atom range.
pub fn random_molecule<R: Rng>(rng: &mut R, min_atoms: usize, max_atoms: usize) -> Option<CanonicalSmiles> {
    let carbons = rng.gen_range(3..=max_atoms.max(4) - 1);
    let mut children: Vec<Vec<usize>> = vec![Vec::new(); carbons];
    let mut used = vec![0u8; carbons];
    for i in 1..carbons {
        let open: Vec<usize> = (0..i).filter(|&p| children[p].len() < 2 && used[p] < 3).collect();
        let &parent = open.choose(rng)?;
        children[parent].push(i);
        used[parent] += 1;
        used[i] += 1;
    }
    let mut double = vec![false; carbons];
    if rng.gen_bool(0.3) {
        let options: Vec<usize> = (1..carbons)
            .filter(|&c| {
                let p = (0..c).find(|&p| children[p].contains(&c)).expect("tree parent");
                used[p] <= 2 && used[c] <= 2
            })
            .collect();
        if let Some(&c) = options.choose(rng) {
            let p = (0..c).find(|&p| children[p].contains(&c)).expect("tree parent");
            double[c] = true;
            used[p] += 1;
            used[c] += 1;
        }
    }
    let mut decor: Vec<Vec<&str>> = vec![Vec::new(); carbons];
    let mut atoms = carbons;
    for _ in 0..rng.gen_range(1..=3) {
        let &(group, valence, size) = GROUPS.choose(rng).expect("groups");
        let open: Vec<usize> = (0..carbons).filter(|&c| used[c] + valence <= 4).collect();
        let Some(&c) = open.choose(rng) else {
            continue;
        };
        used[c] += valence;
        decor[c].push(group);
        atoms += size;
    }
    if atoms < min_atoms || atoms > max_atoms + 3 {
        return None;
    }
    let text = emit(0, &children, &double, &decor);
    CanonicalSmiles::from_smiles(&text).ok()
}

fn emit(node: usize, children: &[Vec<usize>], double: &[bool], decor: &[Vec<&str>]) -> String {
    let mut s = String::from("C");
    for g in &decor[node] {
        s.push('(');
        s.push_str(g);
        s.push(')');
    }
    let kids = &children[node];
    for (k, &c) in kids.iter().enumerate() {
        let bond = if double[c] { "=" } else { "" };
        let branch = format!("{bond}{}", emit(c, children, double, decor));
        if k + 1 < kids.len() {
            s.push('(');
            s.push_str(&branch);
            s.push(')');
        } else {
            s.push_str(&branch);
        }
    }
    s
}

/// A multi-step chain built forward from a random start, for search tests.
#[derive(Debug, Clone, PartialEq)]
pub struct PlantedChain {
    pub start: CanonicalSmiles,
    pub target: CanonicalSmiles,
    /// Retrosynthetic order: the first step produces the target.
    pub gold: GoldPathway,
    pub rules: Vec<&'static str>,
}

/// Draws start molecules from `seed` until a walk of exactly `steps`
/// reactions exists.
pub fn planted_chain(seed: u64, steps: usize) -> PlantedChain {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    loop {
        let Some(start) = random_molecule(&mut rng, 6, 12) else {
            continue;
        };
        let walk = random_walk(&mut rng, &start, steps);
        if walk.len() != steps {
            continue;
        }
        let target = walk.last().expect("nonempty walk").2.clone();
        let rules = walk.iter().map(|(r, _, _)| r.name).collect();
        let gold =
            GoldPathway { steps: walk.into_iter().rev().map(|(_, reactants, product)| (product, reactants)).collect() };
        return PlantedChain { start, target, gold, rules };
    }
}

/// Held-out top-10 coverage of each scorer in one toy learning trial.
#[derive(Debug, Clone, PartialEq)]
pub struct ToyTrial {
    pub seed: u64,
    pub positives: usize,
    pub rules_used: usize,
    pub one_step_test_groups: usize,
    pub chain_test_groups: usize,
    pub baseline_top10: f64,
    pub nn1_top10: f64,
    pub nn1_chain_top10: f64,
    pub nn2_chain_top10: f64,
}

/// Generates a corpus from `seed`, augments it with the synthetic template
/// set, splits one-step and two-step rows by target (30% held out), trains
/// both networks for `epochs` epochs with class balancing and scores the
/// held-out groups.
pub fn run_toy_trial(seed: u64, epochs: usize) -> Result<ToyTrial, String> {
    use crate::dataset::{
        augment_negatives, build_compound_table, chains_from_pathways, clean_reactions, make_pathway_pairs,
        one_step_rows, split_mono_product, split_train_test,
    };
    use crate::ranking::{evaluate_ranking, training_examples, Featurizer, Scorer};
    use retrokit_neural::{train, Architecture, ClassWeighting, TrainConfig};

    let corpus = generate_corpus(&SynthConfig { seed, ..SynthConfig::default() });
    let table = build_compound_table(&[]);
    let (records, _) = clean_reactions(&corpus.reactions, &table);
    let mono = split_mono_product(&records);
    let augmentation = augment_negatives(&mono, &augmentation_templates());
    let one_step = one_step_rows(&mono, &augmentation);
    let (chains, _) = chains_from_pathways(&corpus.pathways, &mono);
    let two_step = make_pathway_pairs(&chains, &augmentation.sets_by_product());

    let (train1, test1) = split_train_test(one_step, 0.3, seed).map_err(|e| e.to_string())?;
    let (train2, test2) = split_train_test(two_step, 0.3, seed).map_err(|e| e.to_string())?;
    let featurizer = Featurizer::default();
    let config = TrainConfig { epochs, seed, class_weighting: ClassWeighting::Balanced, ..TrainConfig::default() };
    let fit = |arch: Architecture, rows: &[crate::dataset::DatasetRow]| {
        let examples = training_examples(&featurizer, rows).map_err(|e| e.to_string())?;
        train(&arch.build(seed), &examples, &config).map(|(model, _)| model).map_err(|e| e.to_string())
    };
    let nn1 = fit(Architecture::Nn1pr, &train1)?;
    let nn2 = fit(Architecture::Nn2pr, &train2)?;

    let top10 = |scorer: Scorer<'_>, rows: &[crate::dataset::DatasetRow]| {
        evaluate_ranking(|r| scorer.score_row(&featurizer, r), rows)
            .map(|e| e.coverage.at(10).unwrap_or(0.0))
            .map_err(|e| e.to_string())
    };
    let groups =
        |rows: &[crate::dataset::DatasetRow]| rows.iter().map(|r| r.group_key.as_str()).collect::<BTreeSet<_>>().len();
    Ok(ToyTrial {
        seed,
        positives: mono.len(),
        rules_used: corpus.rule_counts.len(),
        one_step_test_groups: groups(&test1),
        chain_test_groups: groups(&test2),
        baseline_top10: top10(Scorer::Baseline, &test1)?,
        nn1_top10: top10(Scorer::Nn1(&nn1), &test1)?,
        nn1_chain_top10: top10(Scorer::Nn1(&nn1), &test2)?,
        nn2_chain_top10: top10(Scorer::Nn2(&nn2), &test2)?,
    })
}
