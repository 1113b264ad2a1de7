use retrokit_core::pattern::CandidatePrecursor;

/// An item with its 1-based rank among `total` items.
#[derive(Debug, Clone, PartialEq)]
pub struct Ranked<T> {
    pub item: T,
    /// Tie-break key; canonical precursor text for candidates.
    pub key: String,
    pub score: f64,
    pub rank: usize,
    pub total: usize,
    /// `100 * rank / total`.
    pub rank_percent: f64,
}

pub type RankedCandidate = Ranked<CandidatePrecursor>;

/// Sorts by score (descending), then key (ascending), then input position,
/// and assigns contiguous ranks. Scores compare with `total_cmp`, so a NaN
/// never panics and sorts deterministically.
pub fn rank_by_score<T>(items: Vec<(T, String, f64)>) -> Vec<Ranked<T>> {
    let total = items.len();
    let mut items: Vec<(usize, (T, String, f64))> = items.into_iter().enumerate().collect();
    items.sort_by(|(ia, a), (ib, b)| b.2.total_cmp(&a.2).then_with(|| a.1.cmp(&b.1)).then(ia.cmp(ib)));
    items
        .into_iter()
        .enumerate()
        .map(|(pos, (_, (item, key, score)))| Ranked {
            item,
            key,
            score,
            rank: pos + 1,
            total,
            rank_percent: 100.0 * (pos + 1) as f64 / total as f64,
        })
        .collect()
}

pub fn rank_candidates(scored: Vec<(CandidatePrecursor, f64)>) -> Vec<RankedCandidate> {
    rank_by_score(
        scored
            .into_iter()
            .map(|(c, s)| {
                let key = c.key();
                (c, key, s)
            })
            .collect(),
    )
}
