use std::collections::BTreeMap;
use std::fmt::Write;

use rayon::prelude::*;
use serde::Serialize;

use super::rank::rank_by_score;
use super::RankingError;
use crate::dataset::DatasetRow;

pub const COVERAGE_KS: [usize; 6] = [1, 5, 10, 50, 100, 1000];
pub const REPORT_SCHEMA_VERSION: u32 = 1;

/// The positive's placement in one ranking instance.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RankRow {
    pub group_key: String,
    pub rank: usize,
    pub total: usize,
    pub rank_percent: f64,
    pub score: f64,
}

/// Fraction of positives ranked at or above each `k`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoverageCurve {
    pub points: Vec<(usize, f64)>,
}

impl CoverageCurve {
    fn from_ranks(ranks: &[usize], ks: &[usize]) -> Self {
        let n = ranks.len().max(1) as f64;
        CoverageCurve {
            points: ks.iter().map(|&k| (k, ranks.iter().filter(|&&r| r <= k).count() as f64 / n)).collect(),
        }
    }

    /// Coverage at `k`, which must be one of the curve's points.
    pub fn at(&self, k: usize) -> Option<f64> {
        self.points.iter().find(|p| p.0 == k).map(|p| p.1)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Evaluation {
    pub rows: Vec<RankRow>,
    pub coverage: CoverageCurve,
    /// rank → number of positives.
    pub rank_histogram: BTreeMap<usize, usize>,
    /// Ten bins of rank percentage: (0,10], (10,20], …, (90,100].
    pub percent_histogram: [usize; 10],
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoveragePoint {
    pub k: usize,
    pub fraction: f64,
}

/// JSON summary of one evaluation.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EvalReport {
    pub schema_version: u32,
    pub scorer: String,
    pub instances: usize,
    pub mean_rank: f64,
    pub coverage: Vec<CoveragePoint>,
    pub rank_histogram: BTreeMap<usize, usize>,
    pub percent_histogram: [usize; 10],
}

impl Evaluation {
    pub fn mean_rank(&self) -> f64 {
        if self.rows.is_empty() {
            return 0.0;
        }
        self.rows.iter().map(|r| r.rank as f64).sum::<f64>() / self.rows.len() as f64
    }

    pub fn to_tsv(&self) -> String {
        let mut out = String::from("group_key\trank\ttotal\trank_percent\tscore\n");
        for r in &self.rows {
            let _ = writeln!(out, "{}\t{}\t{}\t{}\t{}", r.group_key, r.rank, r.total, r.rank_percent, r.score);
        }
        out
    }

    pub fn report(&self, scorer: &str) -> EvalReport {
        EvalReport {
            schema_version: REPORT_SCHEMA_VERSION,
            scorer: scorer.to_string(),
            instances: self.rows.len(),
            mean_rank: self.mean_rank(),
            coverage: self.coverage.points.iter().map(|&(k, fraction)| CoveragePoint { k, fraction }).collect(),
            rank_histogram: self.rank_histogram.clone(),
            percent_histogram: self.percent_histogram,
        }
    }
}

/// Ranks every positive among all negatives of its group (rows sharing a
/// group key). Rows are scored once, in parallel; instances are reported in
/// group-key order, then row order.
pub fn evaluate_ranking<F>(scorer: F, rows: &[DatasetRow]) -> Result<Evaluation, RankingError>
where
    F: Fn(&DatasetRow) -> Result<f64, RankingError> + Sync,
{
    if rows.is_empty() {
        return Err(RankingError::NoCandidates);
    }
    let scores: Vec<f64> = rows.par_iter().map(&scorer).collect::<Result<_, _>>()?;
    let mut groups: BTreeMap<&str, (Vec<usize>, Vec<usize>)> = BTreeMap::new();
    for (i, r) in rows.iter().enumerate() {
        let g = groups.entry(r.group_key.as_str()).or_default();
        if r.label {
            g.0.push(i);
        } else {
            g.1.push(i);
        }
    }
    let mut out = Vec::new();
    for (key, (positives, negatives)) in &groups {
        if positives.is_empty() {
            return Err(RankingError::GroupWithoutPositive(key.to_string()));
        }
        for &p in positives {
            let items: Vec<(bool, String, f64)> = std::iter::once(p)
                .chain(negatives.iter().copied())
                .map(|i| (i == p, rows[i].candidate_key(), scores[i]))
                .collect();
            let ranked = rank_by_score(items);
            let hit = ranked.iter().find(|r| r.item).expect("positive is ranked");
            out.push(RankRow {
                group_key: key.to_string(),
                rank: hit.rank,
                total: hit.total,
                rank_percent: hit.rank_percent,
                score: hit.score,
            });
        }
    }
    let ranks: Vec<usize> = out.iter().map(|r| r.rank).collect();
    let mut rank_histogram = BTreeMap::new();
    let mut percent_histogram = [0usize; 10];
    for r in &out {
        *rank_histogram.entry(r.rank).or_insert(0) += 1;
        let bin = ((r.rank_percent / 10.0).ceil() as usize).clamp(1, 10) - 1;
        percent_histogram[bin] += 1;
    }
    Ok(Evaluation {
        coverage: CoverageCurve::from_ranks(&ranks, &COVERAGE_KS),
        rows: out,
        rank_histogram,
        percent_histogram,
    })
}
