//! Brute-force reference implementations of the metrics and of beam search.
//!
//! They work on symbol sequences directly and share no code with the crate.

use std::collections::HashMap;

/// BLEU from the definition: clipped n-gram precisions for n = 1..=4,
/// brevity penalty, geometric mean. `None` when the reference is empty.
pub struct BleuOracle {
    pub score: f64,
    pub precisions: [f64; 4],
    pub brevity_penalty: f64,
}

pub fn bleu(pred: &[u8], reference: &[u8]) -> Option<BleuOracle> {
    if reference.is_empty() {
        return None;
    }
    let mut precisions = [0.0; 4];
    for n in 1..=4 {
        fn count(seq: &[u8], n: usize) -> HashMap<&[u8], usize> {
            let mut m: HashMap<&[u8], usize> = HashMap::new();
            if seq.len() >= n {
                for i in 0..=seq.len() - n {
                    *m.entry(&seq[i..i + n]).or_default() += 1;
                }
            }
            m
        }
        let (cp, cr) = (count(pred, n), count(reference, n));
        let total: usize = cp.values().sum();
        let clipped: usize = cp.iter().map(|(g, &c)| c.min(*cr.get(g).unwrap_or(&0))).sum();
        precisions[n - 1] = if total == 0 { 0.0 } else { clipped as f64 / total as f64 };
    }
    let (c, r) = (pred.len() as f64, reference.len() as f64);
    let brevity_penalty = if c > r {
        1.0
    } else if c == 0.0 {
        0.0
    } else {
        (1.0 - r / c).exp()
    };
    let score = if precisions.contains(&0.0) {
        0.0
    } else {
        100.0 * brevity_penalty * (precisions.iter().map(|p| p.ln()).sum::<f64>() / 4.0).exp()
    };
    Some(BleuOracle {
        score,
        precisions,
        brevity_penalty,
    })
}

pub struct MeteorOracle {
    pub matches: usize,
    pub chunks: usize,
    pub penalty: f64,
    pub score: f64,
}

/// METEOR by enumerating every alignment of equal symbols: keep the most
/// matches, then the fewest chunks.
pub fn meteor(pred: &[u8], reference: &[u8]) -> MeteorOracle {
    let mut best = (0usize, usize::MAX);
    let mut pairs: Vec<Option<usize>> = vec![None; pred.len()];
    let mut used = vec![false; reference.len()];
    enumerate(pred, reference, 0, &mut pairs, &mut used, &mut best);
    let (m, ch) = best;
    if m == 0 {
        return MeteorOracle {
            matches: 0,
            chunks: 0,
            penalty: 0.0,
            score: 0.0,
        };
    }
    let p = m as f64 / pred.len() as f64;
    let r = m as f64 / reference.len() as f64;
    let fmean = 10.0 * p * r / (r + 9.0 * p);
    let penalty = 0.5 * (ch as f64 / m as f64).powi(3);
    MeteorOracle {
        matches: m,
        chunks: ch,
        penalty,
        score: fmean * (1.0 - penalty),
    }
}

fn enumerate(
    pred: &[u8],
    reference: &[u8],
    i: usize,
    pairs: &mut Vec<Option<usize>>,
    used: &mut Vec<bool>,
    best: &mut (usize, usize),
) {
    if i == pred.len() {
        let m = pairs.iter().flatten().count();
        let mut chunks = 0;
        for k in 0..pairs.len() {
            if let Some(j) = pairs[k] {
                let continues = k > 0 && j > 0 && pairs[k - 1] == Some(j - 1);
                chunks += usize::from(!continues);
            }
        }
        if m > best.0 || (m == best.0 && chunks < best.1) {
            *best = (m, chunks);
        }
        return;
    }
    for j in 0..reference.len() {
        if !used[j] && reference[j] == pred[i] {
            used[j] = true;
            pairs[i] = Some(j);
            enumerate(pred, reference, i + 1, pairs, used, best);
            pairs[i] = None;
            used[j] = false;
        }
    }
    enumerate(pred, reference, i + 1, pairs, used, best);
}

/// Distinct n-grams of a sequence over three symbols as bit sets: n-gram g
/// is bit `sum g[k]·3^k`. Orders 1..=4 need 3, 9, 27 and 81 bits. `sizes`
/// caches the cardinality of each set.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NgramBits {
    pub sets: [u128; 4],
    pub sizes: [u32; 4],
}

pub fn ngram_bits(seq: &[u8]) -> NgramBits {
    let mut sets = [0u128; 4];
    for (k, set) in sets.iter_mut().enumerate() {
        let n = k + 1;
        if seq.len() < n {
            continue;
        }
        for window in seq.windows(n) {
            let code = window.iter().rev().fold(0u32, |acc, &s| acc * 3 + u32::from(s));
            *set |= 1u128 << code;
        }
    }
    NgramBits {
        sets,
        sizes: sets.map(u128::count_ones),
    }
}

pub struct SariOracle {
    pub add: [f64; 4],
    pub keep: [f64; 4],
    pub del: [f64; 4],
    pub score: f64,
}

fn ones(x: u128) -> u32 {
    // the sets of orders 1..=3 fit in 27 bits
    if x >> 64 == 0 {
        (x as u64).count_ones()
    } else {
        x.count_ones()
    }
}

/// SARI by set algebra on bit sets. `None` when the source is empty.
///
/// Per order, inclusion-exclusion over |S|, |P|, |R| and the intersections
/// gives every operation set: e.g. |P \ S| = |P| - |P ∩ S| and
/// |S \ P \ R| = |S| - |S ∩ P| - |S ∩ R| + |S ∩ P ∩ R|.
pub fn sari(s: &NgramBits, p: &NgramBits, r: &NgramBits) -> Option<SariOracle> {
    if s.sets[0] == 0 {
        return None;
    }
    let f = |good: u32, sys: u32, gold: u32| -> f64 {
        if sys == 0 && gold == 0 {
            1.0
        } else if good == 0 {
            0.0
        } else {
            2.0 * f64::from(good) / f64::from(sys + gold)
        }
    };
    let (mut add, mut keep, mut del) = ([0.0; 4], [0.0; 4], [0.0; 4]);
    for k in 0..4 {
        let (ss, ps, rs) = (s.sets[k], p.sets[k], r.sets[k]);
        let (ns, np, nr) = (s.sizes[k], p.sizes[k], r.sizes[k]);
        let pr = ps & rs;
        let (sp, sr, spr, npr) = (ones(ss & ps), ones(ss & rs), ones(ss & pr), ones(pr));
        add[k] = f(npr - spr, np - sp, nr - sr);
        keep[k] = f(spr, sp, sr);
        let (sys, gold, good) = (ns - sp, ns - sr, ns + spr - sp - sr);
        del[k] = if sys == 0 && gold == 0 {
            1.0
        } else if sys == 0 {
            0.0
        } else {
            f64::from(good) / f64::from(sys)
        };
    }
    let total: f64 = add.iter().chain(&keep).chain(&del).sum();
    Some(SariOracle {
        add,
        keep,
        del,
        score: 100.0 * total / 12.0,
    })
}

/// Best leaf of the full decoding tree under the same masking and halting
/// rules as the decoders: (score, tie-break key).
#[derive(Debug, Clone, PartialEq)]
pub struct Leaf {
    pub score: f64,
    pub key: Vec<u32>,
    pub leaves: usize,
}

pub struct TreeRules {
    pub reserved_masked: [u32; 3],
    pub eos: u32,
    pub no_repeat: usize,
    pub window: usize,
    pub threshold: usize,
    pub max_length: usize,
}

pub fn best_leaf(next: &dyn Fn(&[u32]) -> Vec<f64>, prompt: &[u32], rules: &TreeRules) -> Leaf {
    let mut best = Leaf {
        score: f64::NEG_INFINITY,
        key: Vec::new(),
        leaves: 0,
    };
    let mut generated = Vec::new();
    walk(next, prompt, rules, &mut generated, 0.0, &mut best);
    best
}

fn offer(best: &mut Leaf, score: f64, key: Vec<u32>) {
    best.leaves += 1;
    if score > best.score || (score == best.score && key < best.key) {
        best.score = score;
        best.key = key;
    }
}

fn walk(
    next: &dyn Fn(&[u32]) -> Vec<f64>,
    prompt: &[u32],
    rules: &TreeRules,
    generated: &mut Vec<u32>,
    score: f64,
    best: &mut Leaf,
) {
    if generated.len() == rules.max_length {
        offer(best, score, generated.clone());
        return;
    }
    let context: Vec<u32> = prompt.iter().chain(generated.iter()).copied().collect();
    let mut p = next(&context);
    for &id in &rules.reserved_masked {
        p[id as usize] = 0.0;
    }
    let n = rules.no_repeat;
    for (t, pt) in p.iter_mut().enumerate() {
        if n == 0 || generated.len() < n {
            continue;
        }
        let mut gram: Vec<u32> = generated[generated.len() + 1 - n..].to_vec();
        gram.push(t as u32);
        let seen = (0..=generated.len() - n).any(|i| generated[i..i + n] == gram[..]);
        if seen {
            *pt = 0.0;
        }
    }
    if p.iter().all(|&x| x <= 0.0) {
        offer(best, score, generated.clone());
        return;
    }
    for (t, &pt) in p.iter().enumerate() {
        if pt <= 0.0 {
            continue;
        }
        let t = t as u32;
        let s = score + pt.ln();
        let lo = generated.len().saturating_sub(rules.window - 1);
        let copies = generated[lo..].iter().filter(|&&x| x == t).count() + 1;
        let mut key = generated.clone();
        key.push(t);
        if t == rules.eos || copies > rules.threshold {
            offer(best, s, key);
        } else {
            generated.push(t);
            walk(next, prompt, rules, generated, s, best);
            generated.pop();
        }
    }
}
