//! Documents over a small alphabet, and canonical relabeling.

pub const SYMBOLS: [&str; 3] = ["a", "b", "c"];

/// Every sequence over `{0, 1, 2}` of length `0..=max_len`, shortest first.
pub fn all_sequences(max_len: usize) -> Vec<Vec<u8>> {
    let mut all = vec![Vec::new()];
    let mut frontier: Vec<Vec<u8>> = vec![Vec::new()];
    for _ in 0..max_len {
        let mut next = Vec::with_capacity(frontier.len() * 3);
        for seq in &frontier {
            for s in 0..3u8 {
                let mut extended = seq.clone();
                extended.push(s);
                next.push(extended);
            }
        }
        all.extend(next.iter().cloned());
        frontier = next;
    }
    all
}

pub fn text(seq: &[u8]) -> String {
    seq.iter()
        .map(|&s| SYMBOLS[s as usize])
        .collect::<Vec<_>>()
        .join(" ")
}

/// With `seen` symbols already introduced in order (0, 1, ...), whether
/// `seq` introduces any new symbol only as the next unused one. Returns the
/// number of symbols seen afterwards.
pub fn extend_canonical(seen: u8, seq: &[u8]) -> Option<u8> {
    let mut seen = seen;
    for &s in seq {
        if s > seen {
            return None;
        }
        if s == seen {
            seen += 1;
        }
    }
    Some(seen)
}

/// Table `[seen][doc]` of [`extend_canonical`] for every doc.
pub fn canonical_table(docs: &[Vec<u8>]) -> [Vec<Option<u8>>; 4] {
    std::array::from_fn(|seen| docs.iter().map(|d| extend_canonical(seen as u8, d)).collect())
}

/// Apply a permutation of the symbols.
pub fn relabel(seq: &[u8], perm: [u8; 3]) -> Vec<u8> {
    seq.iter().map(|&s| perm[s as usize]).collect()
}

pub const PERMUTATIONS: [[u8; 3]; 6] = [
    [0, 1, 2],
    [0, 2, 1],
    [1, 0, 2],
    [1, 2, 0],
    [2, 0, 1],
    [2, 1, 0],
];
