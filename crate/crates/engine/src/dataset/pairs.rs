use std::collections::{BTreeMap, BTreeSet, HashMap};

use retrokit_core::pattern::main_component;
use retrokit_core::CanonicalSmiles;

use super::{Augmentation, DatasetRow, MonoProductReaction};

/// An assembled two-step chain read backwards: `target` is made from
/// `step1`, whose main component is made from `step2`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TwoStepChain {
    pub target: CanonicalSmiles,
    pub step1: Vec<CanonicalSmiles>,
    pub step2: Vec<CanonicalSmiles>,
}

impl TwoStepChain {
    /// The step-1 component that step 2 produces.
    pub fn junction(&self) -> &CanonicalSmiles {
        main_component(&self.step1)
    }

    fn into_row(self, label: bool) -> DatasetRow {
        DatasetRow {
            label,
            group_key: self.target.as_str().to_string(),
            target: self.target,
            steps: vec![self.step1, self.step2],
            weight: 1.0,
        }
    }
}

/// Positive single-step rows followed by their negatives, grouped by
/// product in key order.
pub fn one_step_rows(positives: &[MonoProductReaction], augmentation: &Augmentation) -> Vec<DatasetRow> {
    let mut by_product: BTreeMap<&CanonicalSmiles, (Vec<&MonoProductReaction>, Vec<&MonoProductReaction>)> =
        BTreeMap::new();
    for p in positives.iter().filter(|p| p.label.is_positive()) {
        by_product.entry(&p.product).or_default().0.push(p);
    }
    for n in &augmentation.negatives {
        by_product.entry(&n.product).or_default().1.push(n);
    }
    let mut rows = Vec::new();
    for (product, (pos, neg)) in by_product {
        for (label, list) in [(true, pos), (false, neg)] {
            for r in list {
                rows.push(DatasetRow {
                    label,
                    group_key: product.as_str().to_string(),
                    target: product.clone(),
                    steps: vec![r.reactants.clone()],
                    weight: 1.0,
                });
            }
        }
    }
    rows
}

/// Chains from consecutive reactions of each pathway (reaction ids in
/// forward order). A pair contributes when a product of the earlier reaction
/// is the main reactant of the later one. Returns the distinct chains in
/// first-seen order and the number of consecutive pairs that gave none.
pub fn chains_from_pathways(
    pathways: &[(String, Vec<String>)],
    mono: &[MonoProductReaction],
) -> (Vec<TwoStepChain>, usize) {
    let mut by_parent: HashMap<&str, Vec<&MonoProductReaction>> = HashMap::new();
    for m in mono.iter().filter(|m| m.label.is_positive()) {
        by_parent.entry(m.parent_id.as_str()).or_default().push(m);
    }
    let mut seen = BTreeSet::new();
    let mut chains = Vec::new();
    let mut skipped = 0;
    for (_, reactions) in pathways {
        for pair in reactions.windows(2) {
            let earlier = by_parent.get(pair[0].as_str()).map(Vec::as_slice).unwrap_or_default();
            let later = by_parent.get(pair[1].as_str()).map(Vec::as_slice).unwrap_or_default();
            let mut found = false;
            for b in later {
                let junction = main_component(&b.reactants);
                for a in earlier.iter().filter(|a| &a.product == junction) {
                    found = true;
                    let chain = TwoStepChain {
                        target: b.product.clone(),
                        step1: b.reactants.clone(),
                        step2: a.reactants.clone(),
                    };
                    if seen.insert(chain.clone()) {
                        chains.push(chain);
                    }
                }
            }
            if !found {
                skipped += 1;
            }
        }
    }
    (chains, skipped)
}

/// Labeled two-step rows: every positive chain, then negatives made by
/// substituting a generated precursor set for step 1 (negatives of the
/// target) or for step 2 (negatives of the junction). Negatives equal to
/// any positive chain, and repeats, are removed.
pub fn make_pathway_pairs(
    positives: &[TwoStepChain],
    negatives_by_product: &BTreeMap<CanonicalSmiles, Vec<Vec<CanonicalSmiles>>>,
) -> Vec<DatasetRow> {
    let truth: BTreeSet<&TwoStepChain> = positives.iter().collect();
    let mut emitted: BTreeSet<TwoStepChain> = BTreeSet::new();
    let mut negatives = Vec::new();
    let none: Vec<Vec<CanonicalSmiles>> = Vec::new();
    for chain in positives {
        let step1_subs = negatives_by_product.get(&chain.target).unwrap_or(&none);
        let step2_subs = negatives_by_product.get(chain.junction()).unwrap_or(&none);
        let candidates = step1_subs
            .iter()
            .map(|s1| TwoStepChain { target: chain.target.clone(), step1: s1.clone(), step2: chain.step2.clone() })
            .chain(step2_subs.iter().map(|s2| TwoStepChain {
                target: chain.target.clone(),
                step1: chain.step1.clone(),
                step2: s2.clone(),
            }));
        for negative in candidates {
            if truth.contains(&negative) || emitted.contains(&negative) {
                continue;
            }
            emitted.insert(negative.clone());
            negatives.push(negative);
        }
    }
    let mut seen_pos = BTreeSet::new();
    let mut rows: Vec<DatasetRow> =
        positives.iter().filter(|c| seen_pos.insert(*c)).map(|c| c.clone().into_row(true)).collect();
    rows.extend(negatives.into_iter().map(|c| c.into_row(false)));
    rows
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::{Label, Origin};

    fn key(s: &str) -> CanonicalSmiles {
        CanonicalSmiles::from_smiles(s).unwrap()
    }

    fn keys(s: &[&str]) -> Vec<CanonicalSmiles> {
        let mut v: Vec<_> = s.iter().map(|x| key(x)).collect();
        v.sort();
        v
    }

    fn chain() -> TwoStepChain {
        TwoStepChain { target: key("OCCCCO"), step1: keys(&["OCCCC=O"]), step2: keys(&["OC(=O)CCCC=O"]) }
    }

    #[test]
    fn substitution_count() {
        let mut negs = BTreeMap::new();
        negs.insert(key("OCCCCO"), vec![keys(&["CCCCO"]), keys(&["OCCCO"]), keys(&["OCC=CCO"])]);
        let rows = make_pathway_pairs(&[chain()], &negs);
        assert_eq!(rows.iter().filter(|r| !r.label).count(), 3);
        assert_eq!(rows.iter().filter(|r| r.label).count(), 1);
    }

    #[test]
    fn no_negatives_gives_no_negative_chains() {
        let rows = make_pathway_pairs(&[chain()], &BTreeMap::new());
        assert_eq!(rows.len(), 1);
        assert!(rows[0].label);
    }

    #[test]
    fn positive_never_reappears_as_negative() {
        let c = chain();
        let mut negs = BTreeMap::new();
        negs.insert(c.target.clone(), vec![c.step1.clone(), keys(&["CCCCO"])]);
        negs.insert(c.junction().clone(), vec![c.step2.clone()]);
        let rows = make_pathway_pairs(std::slice::from_ref(&c), &negs);
        let negatives: Vec<_> = rows.iter().filter(|r| !r.label).collect();
        assert_eq!(negatives.len(), 1);
        assert!(negatives.iter().all(|r| r.steps != vec![c.step1.clone(), c.step2.clone()]));
    }

    fn mono(parent: &str, reactants: &[&str], product: &str) -> MonoProductReaction {
        MonoProductReaction {
            parent_id: parent.into(),
            ec_numbers: vec![],
            reactants: keys(reactants),
            product: key(product),
            label: Label::Positive,
            origin: Origin::Assembled,
            no_shared_bits: false,
        }
    }

    #[test]
    fn chains_follow_main_reactants() {
        let corpus = vec![
            mono("R1", &["OC(=O)CCCC=O"], "OCCCC=O"),
            mono("R2", &["OCCCC=O", "O"], "OCCCCO"),
            mono("R3", &["CC"], "CCO"),
        ];
        let pathways = vec![
            ("P1".to_string(), vec!["R1".to_string(), "R2".to_string()]),
            ("P2".to_string(), vec!["R3".to_string(), "R2".to_string()]),
        ];
        let (chains, skipped) = chains_from_pathways(&pathways, &corpus);
        assert_eq!(skipped, 1);
        assert_eq!(chains.len(), 1);
        assert_eq!(chains[0].target, key("OCCCCO"));
        assert_eq!(chains[0].junction(), &key("OCCCC=O"));
        assert_eq!(chains[0].step2, keys(&["OC(=O)CCCC=O"]));
    }
}
