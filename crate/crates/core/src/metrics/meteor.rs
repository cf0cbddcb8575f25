use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use super::metric_units;
use crate::text::Document;

const RECALL_WEIGHT: f64 = 9.0;
const PENALTY_WEIGHT: f64 = 0.5;
const PENALTY_EXPONENT: i32 = 3;

/// Node budget for the exact alignment search. Past it the best alignment
/// found so far is used and the report is flagged as inexact.
pub const DEFAULT_SEARCH_BUDGET: usize = 200_000;

/// METEOR with exact unigram matching only (no stemming, no synonyms).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeteorReport {
    pub matches: usize,
    pub chunks: usize,
    pub precision: f64,
    pub recall: f64,
    pub fmean: f64,
    pub fragmentation_penalty: f64,
    pub score: f64,
    /// False when the chunk-minimizing search ran out of budget.
    pub exact_alignment: bool,
}

impl MeteorReport {
    fn zero(exact_alignment: bool) -> Self {
        Self {
            matches: 0,
            chunks: 0,
            precision: 0.0,
            recall: 0.0,
            fmean: 0.0,
            fragmentation_penalty: 0.0,
            score: 0.0,
            exact_alignment,
        }
    }
}

pub fn meteor(prediction: &Document, reference: &Document) -> MeteorReport {
    meteor_units(&metric_units(prediction), &metric_units(reference))
}

pub fn meteor_units(prediction: &[String], reference: &[String]) -> MeteorReport {
    if prediction.is_empty() || reference.is_empty() {
        return MeteorReport::zero(true);
    }
    let mut ids: HashMap<&str, u32> = HashMap::new();
    let pred: Vec<u32> = prediction
        .iter()
        .map(|s| {
            let next = ids.len() as u32;
            *ids.entry(s.as_str()).or_insert(next)
        })
        .collect();
    let refs: Vec<u32> = reference
        .iter()
        .map(|s| {
            let next = ids.len() as u32;
            *ids.entry(s.as_str()).or_insert(next)
        })
        .collect();
    let alignment = align(&pred, &refs, DEFAULT_SEARCH_BUDGET);
    score_alignment(&alignment, pred.len(), refs.len())
}

fn score_alignment(alignment: &Alignment, pred_len: usize, ref_len: usize) -> MeteorReport {
    let m = alignment.matches;
    if m == 0 {
        return MeteorReport::zero(alignment.exact);
    }
    let precision = m as f64 / pred_len as f64;
    let recall = m as f64 / ref_len as f64;
    let fmean = (1.0 + RECALL_WEIGHT) * precision * recall / (recall + RECALL_WEIGHT * precision);
    let fragmentation_penalty =
        PENALTY_WEIGHT * (alignment.chunks as f64 / m as f64).powi(PENALTY_EXPONENT);
    MeteorReport {
        matches: m,
        chunks: alignment.chunks,
        precision,
        recall,
        fmean,
        fragmentation_penalty,
        score: fmean * (1.0 - fragmentation_penalty),
        exact_alignment: alignment.exact,
    }
}

/// A unigram alignment: `pairs[i]` is the reference position matched to
/// prediction position `i`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Alignment {
    pub pairs: Vec<Option<usize>>,
    pub matches: usize,
    pub chunks: usize,
    pub exact: bool,
}

/// Maximum-cardinality alignment between equal symbols, choosing the fewest
/// chunks among all maximum alignments. A chunk is a maximal run of matches
/// that are contiguous and in the same order on both sides.
///
/// Minimizing chunks is a common-string-partition problem, so the search is
/// a depth-first branch and bound seeded with a greedy longest-run tiling.
/// It stops after `budget` nodes.
pub fn align(prediction: &[u32], reference: &[u32], budget: usize) -> Alignment {
    let greedy = greedy_tiling(prediction, reference);
    let matches = greedy.iter().filter(|p| p.is_some()).count();
    let chunks = count_chunks(&greedy);
    if chunks <= 1 {
        return Alignment {
            pairs: greedy,
            matches,
            chunks,
            exact: true,
        };
    }

    let mut ref_positions: HashMap<u32, Vec<usize>> = HashMap::new();
    for (j, &w) in reference.iter().enumerate() {
        ref_positions.entry(w).or_default().push(j);
    }
    let mut pred_counts: HashMap<u32, usize> = HashMap::new();
    for &w in prediction {
        *pred_counts.entry(w).or_default() += 1;
    }
    // how many occurrences of each word may stay unmatched
    let slack: HashMap<u32, usize> = pred_counts
        .iter()
        .map(|(w, &cp)| {
            let cr = ref_positions.get(w).map_or(0, Vec::len);
            (*w, cp - cp.min(cr))
        })
        .collect();

    let mut search = Search {
        prediction,
        reference,
        ref_positions,
        slack,
        used: vec![false; reference.len()],
        current: vec![None; prediction.len()],
        best: greedy,
        best_chunks: chunks,
        nodes: 0,
        budget,
        exhausted: false,
    };
    search.visit(0, 0);
    Alignment {
        chunks: search.best_chunks,
        pairs: search.best,
        matches,
        exact: !search.exhausted,
    }
}

struct Search<'a> {
    prediction: &'a [u32],
    reference: &'a [u32],
    ref_positions: HashMap<u32, Vec<usize>>,
    slack: HashMap<u32, usize>,
    used: Vec<bool>,
    current: Vec<Option<usize>>,
    best: Vec<Option<usize>>,
    best_chunks: usize,
    nodes: usize,
    budget: usize,
    exhausted: bool,
}

impl Search<'_> {
    fn visit(&mut self, i: usize, chunks: usize) {
        if self.exhausted || chunks >= self.best_chunks {
            return;
        }
        self.nodes += 1;
        if self.nodes > self.budget {
            self.exhausted = true;
            return;
        }
        if i == self.prediction.len() {
            self.best_chunks = chunks;
            self.best.clone_from(&self.current);
            return;
        }
        let word = self.prediction[i];
        let prev = if i > 0 { self.current[i - 1] } else { None };
        let candidates: Vec<usize> = match self.ref_positions.get(&word) {
            None => Vec::new(),
            Some(positions) => {
                let extend = prev
                    .map(|j| j + 1)
                    .filter(|&j| j < self.reference.len() && self.reference[j] == word);
                extend
                    .into_iter()
                    .chain(positions.iter().copied().filter(|&j| Some(j) != extend))
                    .filter(|&j| !self.used[j])
                    .collect()
            }
        };
        for j in candidates {
            let opens = prev.map_or(true, |p| p + 1 != j);
            self.used[j] = true;
            self.current[i] = Some(j);
            self.visit(i + 1, chunks + usize::from(opens));
            self.current[i] = None;
            self.used[j] = false;
            if self.exhausted {
                return;
            }
        }
        let slack = self.slack.get(&word).copied().unwrap_or(0);
        if slack > 0 {
            self.slack.insert(word, slack - 1);
            self.visit(i + 1, chunks);
            self.slack.insert(word, slack);
        }
    }
}

fn count_chunks(pairs: &[Option<usize>]) -> usize {
    let mut chunks = 0;
    for (i, pair) in pairs.iter().enumerate() {
        if let Some(j) = pair {
            let continues = i > 0 && *j > 0 && pairs[i - 1] == Some(j - 1);
            if !continues {
                chunks += 1;
            }
        }
    }
    chunks
}

/// Repeatedly match the longest common run of still-unmatched positions
/// (earliest prediction position, then earliest reference position, on ties).
/// Stops only when no unmatched equal pair is left, so the match count is
/// maximal.
fn greedy_tiling(prediction: &[u32], reference: &[u32]) -> Vec<Option<usize>> {
    let (n, m) = (prediction.len(), reference.len());
    let mut pairs = vec![None; n];
    let mut pred_used = vec![false; n];
    let mut ref_used = vec![false; m];
    // run[j] = length of the common unmatched run ending at (i, j)
    let mut prev_row = vec![0usize; m + 1];
    let mut row = vec![0usize; m + 1];
    loop {
        let mut best = (0usize, 0usize, 0usize); // (len, end_i, end_j)
        prev_row.iter_mut().for_each(|x| *x = 0);
        for i in 0..n {
            row[0] = 0;
            for j in 0..m {
                row[j + 1] = if !pred_used[i] && !ref_used[j] && prediction[i] == reference[j] {
                    prev_row[j] + 1
                } else {
                    0
                };
                let len = row[j + 1];
                if len > best.0 {
                    best = (len, i, j);
                } else if len == best.0 && len > 0 {
                    let (si, sj) = (i + 1 - len, j + 1 - len);
                    let (bi, bj) = (best.1 + 1 - best.0, best.2 + 1 - best.0);
                    if (si, sj) < (bi, bj) {
                        best = (len, i, j);
                    }
                }
            }
            std::mem::swap(&mut prev_row, &mut row);
        }
        let (len, end_i, end_j) = best;
        if len == 0 {
            return pairs;
        }
        for k in 0..len {
            let (i, j) = (end_i + 1 - len + k, end_j + 1 - len + k);
            pairs[i] = Some(j);
            pred_used[i] = true;
            ref_used[j] = true;
        }
    }
}
