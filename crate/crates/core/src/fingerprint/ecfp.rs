use std::collections::HashSet;

use crate::molgraph::{strip_explicit_hydrogens, MolecularGraph};

use super::hash::hash_sequence;
use super::{Fingerprint, FingerprintError};

pub const DEFAULT_WIDTH: usize = 512;
pub const DEFAULT_RADIUS: usize = 2;

/// Hashed circular fingerprint.
///
/// Radius-0 identifiers hash `[atomic number, degree, charge, total H,
/// aromatic]`. Iteration `r` hashes `[r, own id, (bond code, neighbour id)...]`
/// with the pairs sorted. An environment at `r >= 1` is dropped when it
/// covers the same bond set as one already kept (the smaller identifier wins
/// within an iteration). Each kept identifier sets bit `id % width`.
pub fn molecule_fingerprint(
    mol: &MolecularGraph,
    width: usize,
    radius: usize,
) -> Result<Fingerprint, FingerprintError> {
    if !width.is_power_of_two() {
        return Err(FingerprintError::WidthNotPowerOfTwo(width));
    }
    let mut fp = Fingerprint::zeros(width);
    for id in environment_ids(mol, radius) {
        fp.set((id % width as u64) as usize);
    }
    Ok(fp)
}

/// OR of the members' fingerprints.
pub fn set_fingerprint(mols: &[MolecularGraph], width: usize, radius: usize) -> Result<Fingerprint, FingerprintError> {
    let parts = mols.iter().map(|m| molecule_fingerprint(m, width, radius)).collect::<Result<Vec<_>, _>>()?;
    Fingerprint::union_all(&parts)
}

/// Kept environment identifiers, radius 0 first.
pub(crate) fn environment_ids(mol: &MolecularGraph, radius: usize) -> Vec<u64> {
    let mol = strip_explicit_hydrogens(&mol.without_map_indices());
    let n = mol.atom_count();
    let words = mol.bond_count().div_ceil(64).max(1);
    let mut ids: Vec<u64> = (0..n)
        .map(|i| {
            let atom = mol.atom(i);
            hash_sequence(&[
                u64::from(atom.element.atomic_number()),
                mol.degree(i) as u64,
                i64::from(atom.charge) as u64,
                u64::from(mol.total_hydrogens(i)),
                u64::from(atom.aromatic),
            ])
        })
        .collect();
    let mut kept = ids.clone();
    let mut envs: Vec<Vec<u64>> = vec![vec![0; words]; n];
    let mut seen: HashSet<Vec<u64>> = HashSet::new();
    seen.insert(vec![0; words]);

    for r in 1..=radius {
        let mut next_ids = Vec::with_capacity(n);
        let mut next_envs = Vec::with_capacity(n);
        for a in 0..n {
            let mut pairs: Vec<(u64, u64)> =
                mol.neighbors(a).iter().map(|&(nb, b)| (u64::from(mol.bond(b).order.code()), ids[nb])).collect();
            pairs.sort_unstable();
            let mut values = Vec::with_capacity(2 + 2 * pairs.len());
            values.push(r as u64);
            values.push(ids[a]);
            values.extend(pairs.iter().flat_map(|&(o, id)| [o, id]));
            next_ids.push(hash_sequence(&values));

            let mut env = envs[a].clone();
            for &(nb, b) in mol.neighbors(a) {
                for (w, x) in env.iter_mut().zip(&envs[nb]) {
                    *w |= x;
                }
                env[b / 64] |= 1 << (b % 64);
            }
            next_envs.push(env);
        }
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&x, &y| next_envs[x].cmp(&next_envs[y]).then(next_ids[x].cmp(&next_ids[y])));
        for a in order {
            if seen.insert(next_envs[a].clone()) {
                kept.push(next_ids[a]);
            }
        }
        ids = next_ids;
        envs = next_envs;
    }
    kept
}
