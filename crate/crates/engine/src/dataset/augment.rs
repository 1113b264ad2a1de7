use std::collections::{BTreeMap, BTreeSet, HashSet};

use rayon::prelude::*;

use retrokit_core::pattern::{enumerate_precursors, ReactionTemplate};
use retrokit_core::CanonicalSmiles;

use super::{Label, MonoProductReaction, Origin};

/// Template-generated negatives for a set of positive mono-product reactions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Augmentation {
    /// Grouped by product in key order; within a product, enumeration order.
    pub negatives: Vec<MonoProductReaction>,
    /// Negative count per unique positive product (zero included).
    pub per_product: BTreeMap<CanonicalSmiles, usize>,
}

impl Augmentation {
    /// For each positive reaction, how many negatives share its product;
    /// returned as count → number of positives.
    pub fn histogram(&self, positives: &[MonoProductReaction]) -> BTreeMap<usize, usize> {
        let mut out = BTreeMap::new();
        for p in positives.iter().filter(|p| p.label.is_positive()) {
            *out.entry(self.per_product.get(&p.product).copied().unwrap_or(0)).or_insert(0) += 1;
        }
        out
    }

    /// Negative precursor sets keyed by product.
    pub fn sets_by_product(&self) -> BTreeMap<CanonicalSmiles, Vec<Vec<CanonicalSmiles>>> {
        let mut out: BTreeMap<CanonicalSmiles, Vec<Vec<CanonicalSmiles>>> = BTreeMap::new();
        for n in &self.negatives {
            out.entry(n.product.clone()).or_default().push(n.reactants.clone());
        }
        out
    }
}

/// Applies every template to every unique positive product in parallel,
/// then removes each precursor set that equals the reactant multiset of any
/// positive reaction with the same product.
pub fn augment_negatives(positives: &[MonoProductReaction], templates: &[ReactionTemplate]) -> Augmentation {
    let mut truth: BTreeMap<&CanonicalSmiles, HashSet<&[CanonicalSmiles]>> = BTreeMap::new();
    for p in positives.iter().filter(|p| p.label.is_positive()) {
        truth.entry(&p.product).or_default().insert(&p.reactants);
    }
    let products: Vec<&CanonicalSmiles> = truth.keys().copied().collect();
    let enumerated: Vec<_> =
        products.par_iter().map(|product| enumerate_precursors(&product.to_graph(), templates)).collect();

    let mut negatives = Vec::new();
    let mut per_product = BTreeMap::new();
    for (product, candidates) in products.into_iter().zip(enumerated) {
        let known = &truth[product];
        let mut count = 0;
        for c in candidates {
            if known.contains(c.precursors.as_slice()) {
                continue;
            }
            let first = &c.provenance[0];
            negatives.push(MonoProductReaction {
                parent_id: format!("aug:{}", first.template_id),
                ec_numbers: first.ec_numbers.clone(),
                reactants: c.precursors,
                product: product.clone(),
                label: Label::Negative,
                origin: Origin::Augmented { template_id: first.template_id.clone() },
                no_shared_bits: false,
            });
            count += 1;
        }
        per_product.insert(product.clone(), count);
    }
    Augmentation { negatives, per_product }
}

/// Number of negatives whose (reactants, product) equals a positive's.
pub fn strict_check_violations(positives: &[MonoProductReaction], negatives: &[MonoProductReaction]) -> usize {
    let truth: BTreeSet<(&[CanonicalSmiles], &CanonicalSmiles)> =
        positives.iter().filter(|p| p.label.is_positive()).map(|p| (p.reactants.as_slice(), &p.product)).collect();
    negatives.iter().filter(|n| truth.contains(&(n.reactants.as_slice(), &n.product))).count()
}

#[cfg(test)]
mod tests {
    use super::*;
    use retrokit_core::pattern::ReactionTemplate;

    fn key(s: &str) -> CanonicalSmiles {
        CanonicalSmiles::from_smiles(s).unwrap()
    }

    fn positive(reactants: &[&str], product: &str) -> MonoProductReaction {
        let mut reactants: Vec<_> = reactants.iter().map(|s| key(s)).collect();
        reactants.sort();
        MonoProductReaction {
            parent_id: "R".into(),
            ec_numbers: vec![],
            reactants,
            product: key(product),
            label: Label::Positive,
            origin: Origin::Assembled,
            no_shared_bits: false,
        }
    }

    fn template(id: &str, smarts: &str) -> ReactionTemplate {
        ReactionTemplate::parse(smarts).unwrap().with_id(id)
    }

    #[test]
    fn true_precursors_are_removed() {
        // the only outcome is the real reactant, so nothing survives
        let positives = vec![positive(&["OCCCCO"], "OCCCC=O")];
        let templates = vec![template("red", "[C:1]=[O:2]>>[C:1][O:2]")];
        let aug = augment_negatives(&positives, &templates);
        assert!(aug.negatives.is_empty());
        assert_eq!(aug.per_product[&key("OCCCC=O")], 0);
    }

    #[test]
    fn set_difference_per_product() {
        let positives = vec![positive(&["CCCO"], "CCC=O"), positive(&["OCCO"], "OCCO")];
        let templates = vec![
            template("red", "[C:1]=[O:2]>>[C:1][O:2]"),
            template("hyd", "[C:1][O:2]>>[C:1]"),
            template("ext", "[C:1]>>[C:1]C"),
        ];
        let aug = augment_negatives(&positives, &templates);
        let total: usize = aug.per_product.values().sum();
        assert_eq!(total, aug.negatives.len());
        assert_eq!(strict_check_violations(&positives, &aug.negatives), 0);
        for n in &aug.negatives {
            assert!(n.label == Label::Negative);
            assert!(!positives.iter().any(|p| p.product == n.product && p.reactants == n.reactants));
        }
        let hist = aug.histogram(&positives);
        assert_eq!(hist.values().sum::<usize>(), 2);
    }
}
