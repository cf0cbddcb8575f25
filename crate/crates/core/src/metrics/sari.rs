use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use super::{metric_units, MetricError, MAX_ORDER};
use crate::text::Document;

/// Which operation sets were empty on both sides, so that the component was
/// set to 1.0 by convention rather than computed.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct EmptySets {
    pub add: bool,
    pub keep: bool,
    pub delete: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SariNgramScores {
    pub n: usize,
    pub add_f: f64,
    pub keep_f: f64,
    pub del_precision: f64,
    pub empty_sets: EmptySets,
}

/// Single-reference SARI over distinct n-grams, n = 1..=4, with equal
/// weights for orders and operations.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SariReport {
    pub per_ngram: [SariNgramScores; MAX_ORDER],
    pub add_f: f64,
    pub keep_f: f64,
    pub del_p: f64,
    pub score: f64,
}

/// Interns n-grams so documents can be compared as sorted id sets.
/// Profiles are only comparable when built by the same index.
#[derive(Debug, Default, Clone)]
pub struct NgramIndex {
    ids: HashMap<Vec<String>, u32>,
}

/// Distinct n-grams of one document for n = 1..=4, as sorted interned ids.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NgramProfile {
    pub sets: [Vec<u32>; MAX_ORDER],
}

impl NgramProfile {
    pub fn is_empty(&self) -> bool {
        self.sets[0].is_empty()
    }
}

impl NgramIndex {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn profile(&mut self, doc: &Document) -> NgramProfile {
        self.profile_units(&metric_units(doc))
    }

    pub fn profile_units(&mut self, units: &[String]) -> NgramProfile {
        let sets = std::array::from_fn(|k| {
            let n = k + 1;
            let mut ids: Vec<u32> = if units.len() < n {
                Vec::new()
            } else {
                units
                    .windows(n)
                    .map(|w| {
                        let next = self.ids.len() as u32;
                        *self.ids.entry(w.to_vec()).or_insert(next)
                    })
                    .collect()
            };
            ids.sort_unstable();
            ids.dedup();
            ids
        });
        NgramProfile { sets }
    }
}

pub fn sari(
    source: &Document,
    prediction: &Document,
    reference: &Document,
) -> Result<SariReport, MetricError> {
    let mut index = NgramIndex::new();
    let s = index.profile(source);
    let p = index.profile(prediction);
    let r = index.profile(reference);
    sari_profiles(&s, &p, &r)
}

/// SARI from precomputed profiles.
///
/// Per order, with S, P, R the source, prediction and reference n-gram sets:
/// added = X \ S, kept = X ∩ S, deleted = S \ X for X in {P, R}. Add and
/// keep are F1 of the prediction's set against the reference's set; delete
/// is the precision of the prediction's deletions. A component whose two
/// sets are both empty scores 1.
pub fn sari_profiles(
    source: &NgramProfile,
    prediction: &NgramProfile,
    reference: &NgramProfile,
) -> Result<SariReport, MetricError> {
    if source.is_empty() {
        return Err(MetricError::EmptySource);
    }
    let per_ngram: [SariNgramScores; MAX_ORDER] = std::array::from_fn(|k| {
        order_scores(
            k + 1,
            &source.sets[k],
            &prediction.sets[k],
            &reference.sets[k],
        )
    });
    let avg = |f: fn(&SariNgramScores) -> f64| {
        per_ngram.iter().map(f).sum::<f64>() / MAX_ORDER as f64
    };
    let add_f = avg(|s| s.add_f);
    let keep_f = avg(|s| s.keep_f);
    let del_p = avg(|s| s.del_precision);
    Ok(SariReport {
        per_ngram,
        add_f,
        keep_f,
        del_p,
        score: 100.0 * (add_f + keep_f + del_p) / 3.0,
    })
}

fn order_scores(n: usize, s: &[u32], p: &[u32], r: &[u32]) -> SariNgramScores {
    let Overlaps { ps, rs, pr, prs } = overlaps(s, p, r);

    let (add_pred, add_ref, add_good) = (p.len() - ps, r.len() - rs, pr - prs);
    let (keep_pred, keep_ref, keep_good) = (ps, rs, prs);
    let (del_pred, del_ref) = (s.len() - ps, s.len() - rs);
    let del_good = s.len() + prs - ps - rs;

    let empty_sets = EmptySets {
        add: add_pred == 0 && add_ref == 0,
        keep: keep_pred == 0 && keep_ref == 0,
        delete: del_pred == 0 && del_ref == 0,
    };
    SariNgramScores {
        n,
        add_f: f1(add_good, add_pred, add_ref),
        keep_f: f1(keep_good, keep_pred, keep_ref),
        del_precision: if empty_sets.delete {
            1.0
        } else if del_pred == 0 {
            0.0
        } else {
            del_good as f64 / del_pred as f64
        },
        empty_sets,
    }
}

fn f1(good: usize, predicted: usize, expected: usize) -> f64 {
    if predicted == 0 && expected == 0 {
        return 1.0;
    }
    if good == 0 {
        return 0.0;
    }
    let precision = good as f64 / predicted as f64;
    let recall = good as f64 / expected as f64;
    2.0 * precision * recall / (precision + recall)
}

#[derive(Debug, Default, PartialEq, Eq)]
struct Overlaps {
    ps: usize,
    rs: usize,
    pr: usize,
    prs: usize,
}

/// Pairwise and triple intersection sizes of three sorted, deduplicated
/// sets.
fn overlaps(s: &[u32], p: &[u32], r: &[u32]) -> Overlaps {
    let mut prs = 0;
    let (mut j, mut k) = (0, 0);
    for &x in p {
        while j < r.len() && r[j] < x {
            j += 1;
        }
        if j < r.len() && r[j] == x {
            while k < s.len() && s[k] < x {
                k += 1;
            }
            prs += usize::from(k < s.len() && s[k] == x);
        }
    }
    Overlaps {
        ps: intersection_len(p, s),
        rs: intersection_len(r, s),
        pr: intersection_len(p, r),
        prs,
    }
}

/// Branch-free merge count; both inputs sorted and deduplicated.
fn intersection_len(a: &[u32], b: &[u32]) -> usize {
    let (mut i, mut j, mut count) = (0, 0, 0);
    while i < a.len() && j < b.len() {
        let (x, y) = (a[i], b[j]);
        count += usize::from(x == y);
        i += usize::from(x <= y);
        j += usize::from(y <= x);
    }
    count
}
