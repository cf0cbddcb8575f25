//! Exhaustive metric comparison over every document of up to `max_len`
//! tokens from a three-symbol alphabet.
//!
//! Scores are invariant under renaming the symbols, so pairs and triples
//! are visited in canonical form only: the symbols first appear in the
//! order a, b, c across the concatenation. SARI triples are further reduced
//! by reversal, since reversing all three documents maps each n-gram set
//! one-to-one. [`relabel_check`] verifies both invariances on the full,
//! unreduced space.

use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use simplikit::metrics::{bleu_units, meteor_units, sari, sari_profiles, NgramIndex, NgramProfile, SariReport};
use simplikit::Document;

use super::alphabet::{all_sequences, canonical_table, relabel, text, PERMUTATIONS};
use super::oracles::{self, NgramBits};

pub const TOLERANCE: f64 = 1e-9;

#[derive(Debug, Default)]
pub struct Outcome {
    pub cases: u64,
    pub mismatches: Vec<String>,
    pub max_error: f64,
}

impl Outcome {
    fn check(&mut self, what: &str, got: f64, want: f64, case: impl FnOnce() -> String) {
        let err = (got - want).abs();
        if err > self.max_error {
            self.max_error = err;
        }
        if !(err <= TOLERANCE) && self.mismatches.len() < 10 {
            self.mismatches.push(format!("{what}: got {got}, want {want} for {}", case()));
        }
    }

    pub fn passed(&self) -> bool {
        self.mismatches.is_empty()
    }
}

struct Space {
    seqs: Vec<Vec<u8>>,
    units: Vec<Vec<String>>,
    table: [Vec<Option<u8>>; 4],
}

impl Space {
    fn new(max_len: usize) -> Self {
        let seqs = all_sequences(max_len);
        let units = seqs
            .iter()
            .map(|s| {
                let doc = Document::new(&text(s));
                simplikit::metrics::metric_units(&doc)
            })
            .collect();
        let table = canonical_table(&seqs);
        Self { seqs, units, table }
    }

    /// Canonical (i, j) pairs.
    fn pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.seqs.len()).flat_map(move |i| {
            let seen = self.table[0][i];
            (0..self.seqs.len())
                .filter(move |&j| seen.is_some_and(|k| self.table[k as usize][j].is_some()))
                .map(move |j| (i, j))
        })
    }
}

pub fn bleu_all(max_len: usize) -> Outcome {
    let space = Space::new(max_len);
    let mut out = Outcome::default();
    for (i, j) in space.pairs() {
        out.cases += 1;
        let case = || format!("pred {:?} ref {:?}", text(&space.seqs[i]), text(&space.seqs[j]));
        let got = bleu_units(&space.units[i], &space.units[j]);
        match (got, oracles::bleu(&space.seqs[i], &space.seqs[j])) {
            (Err(_), None) => {}
            (Ok(got), Some(want)) => {
                out.check("bleu", got.score, want.score, case);
                out.check("brevity penalty", got.brevity_penalty, want.brevity_penalty, case);
                for n in 0..4 {
                    out.check("precision", got.precisions[n], want.precisions[n], case);
                }
            }
            (got, want) => out.mismatches.push(format!(
                "bleu defined mismatch ({} vs {}) for {}",
                got.is_ok(),
                want.is_some(),
                case()
            )),
        }
    }
    out
}

pub fn meteor_all(max_len: usize) -> Outcome {
    let space = Space::new(max_len);
    let mut out = Outcome::default();
    for (i, j) in space.pairs() {
        out.cases += 1;
        let case = || format!("pred {:?} ref {:?}", text(&space.seqs[i]), text(&space.seqs[j]));
        let got = meteor_units(&space.units[i], &space.units[j]);
        let want = oracles::meteor(&space.seqs[i], &space.seqs[j]);
        if !got.exact_alignment || got.matches != want.matches || got.chunks != want.chunks {
            if out.mismatches.len() < 10 {
                out.mismatches.push(format!(
                    "alignment ({}, {}) vs ({}, {}) for {}",
                    got.matches,
                    got.chunks,
                    want.matches,
                    want.chunks,
                    case()
                ));
            }
        }
        out.check("meteor", got.score, want.score, case);
        out.check("penalty", got.fragmentation_penalty, want.penalty, case);
    }
    out
}

fn compare_sari(out: &mut Outcome, got: &SariReport, want: &oracles::SariOracle, case: impl Fn() -> String) {
    let mut err = (got.score - want.score).abs();
    for k in 0..4 {
        let g = &got.per_ngram[k];
        err = err
            .max((g.add_f - want.add[k]).abs())
            .max((g.keep_f - want.keep[k]).abs())
            .max((g.del_precision - want.del[k]).abs());
    }
    if err > out.max_error {
        out.max_error = err;
    }
    if !(err <= TOLERANCE) && out.mismatches.len() < 10 {
        out.mismatches.push(format!("sari off by {err:e} (got {}, want {}) for {}", got.score, want.score, case()));
    }
}

/// Symbols in order of first appearance.
#[derive(Clone, Copy, Default)]
struct Order {
    symbols: [u8; 3],
    len: usize,
}

/// Lookups for mapping a relabel-canonical triple to the canonical form of
/// its reversal.
struct Reversal {
    rev: Vec<usize>,
    relabeled: Vec<[usize; 6]>,
    first_seen: Vec<Vec<u8>>,
}

impl Reversal {
    fn new(seqs: &[Vec<u8>]) -> Self {
        let index: HashMap<&[u8], usize> = seqs.iter().enumerate().map(|(i, s)| (s.as_slice(), i)).collect();
        let find = |s: Vec<u8>| index[s.as_slice()];
        Self {
            rev: seqs.iter().map(|s| find(s.iter().rev().copied().collect())).collect(),
            relabeled: seqs
                .iter()
                .map(|s| std::array::from_fn(|k| find(relabel(s, PERMUTATIONS[k]))))
                .collect(),
            first_seen: seqs
                .iter()
                .map(|s| {
                    let mut order = Vec::new();
                    for &x in s {
                        if !order.contains(&x) {
                            order.push(x);
                        }
                    }
                    order
                })
                .collect(),
        }
    }

    fn extend(&self, order: &mut Order, doc: usize) {
        for &x in &self.first_seen[self.rev[doc]] {
            if !order.symbols[..order.len].contains(&x) {
                order.symbols[order.len] = x;
                order.len += 1;
            }
        }
    }

    /// Canonical form of the reversed triple, given the first-appearance
    /// order across all three reversed documents.
    fn canonical(&self, order: &Order, triple: [usize; 3]) -> [usize; 3] {
        let mut perm = [u8::MAX; 3];
        let mut next = 0;
        for &x in &order.symbols[..order.len] {
            perm[x as usize] = next;
            next += 1;
        }
        for slot in perm.iter_mut().filter(|x| **x == u8::MAX) {
            *slot = next;
            next += 1;
        }
        let k = PERMUTATIONS.iter().position(|q| *q == perm).expect("a permutation");
        triple.map(|d| self.relabeled[self.rev[d]][k])
    }
}

pub fn sari_all(max_len: usize) -> Outcome {
    let space = Space::new(max_len);
    let mut index = NgramIndex::new();
    let profiles: Vec<NgramProfile> = space.units.iter().map(|u| index.profile_units(u)).collect();
    let bits: Vec<NgramBits> = space.seqs.iter().map(|s| oracles::ngram_bits(s)).collect();
    let reversal = Reversal::new(&space.seqs);
    let n = space.seqs.len();
    let mut out = Outcome::default();
    for s in 0..n {
        let Some(k1) = space.table[0][s] else { continue };
        if space.seqs[s].is_empty() {
            out.cases += 1;
            if sari_profiles(&profiles[s], &profiles[s], &profiles[s]).is_ok() {
                out.mismatches.push("empty source accepted".into());
            }
            continue;
        }
        for p in 0..n {
            let Some(k2) = space.table[k1 as usize][p] else { continue };
            let row = &space.table[k2 as usize];
            let mut prefix = Order::default();
            reversal.extend(&mut prefix, s);
            reversal.extend(&mut prefix, p);
            for r in 0..n {
                if row[r].is_none() {
                    continue;
                }
                let mut order = prefix;
                reversal.extend(&mut order, r);
                if reversal.canonical(&order, [s, p, r]) < [s, p, r] {
                    continue;
                }
                out.cases += 1;
                let got = sari_profiles(&profiles[s], &profiles[p], &profiles[r]).expect("non-empty source");
                let want = oracles::sari(&bits[s], &bits[p], &bits[r]).expect("non-empty source");
                compare_sari(&mut out, &got, &want, || {
                    format!("{:?} {:?} {:?}", text(&space.seqs[s]), text(&space.seqs[p]), text(&space.seqs[r]))
                });
            }
        }
    }
    out
}

/// Random triples from the full space through the document-level entry
/// points, each checked against the oracle, under every relabeling and,
/// for SARI, under reversal.
pub fn relabel_check(max_len: usize, samples: usize, seed: u64) -> Outcome {
    let seqs = all_sequences(max_len);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Outcome::default();
    for _ in 0..samples {
        let pick = |rng: &mut ChaCha8Rng| seqs[rng.gen_range(0..seqs.len())].clone();
        let (s, p, r) = (pick(&mut rng), pick(&mut rng), pick(&mut rng));
        let case = || format!("{:?} {:?} {:?}", text(&s), text(&p), text(&r));
        let doc = |x: &[u8]| Document::new(&text(x));
        let base = (
            simplikit::metrics::bleu(&doc(&p), &doc(&r)).ok(),
            simplikit::metrics::meteor(&doc(&p), &doc(&r)),
            sari(&doc(&s), &doc(&p), &doc(&r)).ok(),
        );
        out.cases += 1;
        if let Some(got) = &base.0 {
            out.check("bleu", got.score, oracles::bleu(&p, &r).unwrap().score, case);
        }
        out.check("meteor", base.1.score, oracles::meteor(&p, &r).score, case);
        if let Some(got) = &base.2 {
            let want = oracles::sari(&oracles::ngram_bits(&s), &oracles::ngram_bits(&p), &oracles::ngram_bits(&r)).unwrap();
            compare_sari(&mut out, got, &want, case);
        }
        for (perm, reverse) in PERMUTATIONS.iter().flat_map(|&q| [(q, false), (q, true)]) {
            let turn = |x: &[u8]| {
                let mut y = relabel(x, perm);
                if reverse {
                    y.reverse();
                }
                y
            };
            let (s2, p2, r2) = (turn(&s), turn(&p), turn(&r));
            let sari_renamed = sari(&doc(&s2), &doc(&p2), &doc(&r2)).ok();
            let mut invariant = sari_renamed == base.2;
            if !reverse {
                invariant &= simplikit::metrics::bleu(&doc(&p2), &doc(&r2)).ok() == base.0
                    && simplikit::metrics::meteor(&doc(&p2), &doc(&r2)) == base.1;
            }
            if !invariant && out.mismatches.len() < 10 {
                out.mismatches.push(format!("not invariant under {perm:?} (reversed: {reverse}): {}", case()));
            }
        }
    }
    out
}
