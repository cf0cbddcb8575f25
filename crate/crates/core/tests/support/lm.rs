//! Small random language models for decoder tests.

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use simplikit::corpus::{CorpusRecord, Split};
use simplikit::decoding::{NGramLM, TrainConfig, Vocabulary, BOS, EOS, SEP};

/// An n-gram model over `content` words `w0..`, trained on random
/// `BOS src SEP tgt EOS` sequences, plus a prompt that ends with SEP.
pub struct TinyModel {
    pub lm: NGramLM,
    pub prompt: Vec<u32>,
    pub content: usize,
}

pub fn tiny_model(rng: &mut ChaCha8Rng, content: usize) -> TinyModel {
    let mut vocab = Vocabulary::new();
    let ids: Vec<u32> = (0..content).map(|i| vocab.insert(&format!("w{i}"))).collect();
    let n_seq = rng.gen_range(2..=6);
    let random_words = |rng: &mut ChaCha8Rng, lo: usize, hi: usize| -> Vec<u32> {
        let len = rng.gen_range(lo..=hi);
        (0..len).map(|_| *ids.choose(rng).unwrap()).collect()
    };
    let mut sequences = Vec::new();
    for _ in 0..n_seq {
        let mut seq = vec![BOS];
        seq.extend(random_words(rng, 1, 3));
        seq.push(SEP);
        seq.extend(random_words(rng, 1, 6));
        seq.push(EOS);
        sequences.push(seq);
    }
    let config = TrainConfig {
        order: rng.gen_range(1..=4),
        discount: [0.0, 0.25, 0.5, 0.75, 0.9][rng.gen_range(0..5)],
        min_count: 1,
    };
    let lm = NGramLM::from_sequences(vocab, &sequences, &config).expect("valid model");
    let mut prompt = vec![BOS];
    prompt.extend(random_words(rng, 1, 3));
    prompt.push(SEP);
    TinyModel { lm, prompt, content }
}

const WORDS: [&str; 24] = [
    "der", "die", "das", "Hund", "Katze", "Haus", "Stadt", "Arzt", "geht", "kommt", "sieht",
    "hilft", "heute", "morgen", "schnell", "gern", "und", "mit", "in", "ein", "eine", "klein",
    "groß", ".",
];

/// Records with words drawn from a fixed pool; sources are longer than
/// targets.
pub fn random_records(rng: &mut ChaCha8Rng, n: usize) -> Vec<CorpusRecord> {
    (0..n)
        .map(|i| {
            let mut sentence = |lo: usize, hi: usize| {
                let len = rng.gen_range(lo..=hi);
                (0..len).map(|_| *WORDS.choose(rng).unwrap()).collect::<Vec<_>>().join(" ")
            };
            let source = sentence(4, 12);
            let target = sentence(2, 8);
            CorpusRecord {
                id: format!("r{i}"),
                source,
                target,
                provenance: "fixture".into(),
                split: Split::Train,
                template_id: None,
            }
        })
        .collect()
}

/// A model trained on random records, with a prompt from one of them.
pub fn trained_model(rng: &mut ChaCha8Rng) -> (NGramLM, Vec<Vec<u32>>) {
    let n = rng.gen_range(3..=12);
    let records = random_records(rng, n);
    let config = TrainConfig {
        order: rng.gen_range(1..=5),
        discount: rng.gen_range(0.05..0.95),
        min_count: 1,
    };
    let lm = NGramLM::train(&records, &config).expect("trainable");
    let prompts = records.iter().map(|r| lm.encode_prompt(&r.source)).collect();
    (lm, prompts)
}

/// A random tiny model with a decoding configuration whose beam is wide
/// enough to keep every hypothesis alive.
pub fn full_width_case(rng: &mut ChaCha8Rng) -> (TinyModel, simplikit::decoding::DecodeConfig) {
    use simplikit::decoding::{Algorithm, DecodeConfig};
    let content = rng.gen_range(2..=5);
    let model = tiny_model(rng, content);
    let max_length = rng.gen_range(1..=6);
    let cfg = DecodeConfig {
        algorithm: Algorithm::Beam,
        max_length,
        num_beams: (content + 1).pow(max_length as u32),
        early_stopping: rng.gen_bool(0.5),
        no_ngram_repeat_size: [0, 2, 3][rng.gen_range(0..3)],
        repeat_window: rng.gen_range(2..=6),
        repeat_threshold: rng.gen_range(1..=3),
        ..DecodeConfig::default()
    };
    (model, cfg)
}

/// Compare full-width beam search against the exhaustive tree walk.
pub fn check_full_width(model: &TinyModel, cfg: &simplikit::decoding::DecodeConfig) -> Result<usize, String> {
    use simplikit::decoding::{decode, LanguageModel, UNK};
    let result = decode(&model.lm, &model.prompt, cfg).map_err(|e| e.to_string())?;
    let rules = super::oracles::TreeRules {
        reserved_masked: [UNK, BOS, SEP],
        eos: EOS,
        no_repeat: cfg.no_ngram_repeat_size,
        window: cfg.repeat_window,
        threshold: cfg.repeat_threshold,
        max_length: cfg.max_length,
    };
    let next = |ctx: &[u32]| model.lm.next_distribution(ctx);
    let best = super::oracles::best_leaf(&next, &model.prompt, &rules);
    let score = result.search_score();
    if result.search_key() != best.key || (score - best.score).abs() > 1e-12 {
        return Err(format!(
            "beam {:?} ({score}) vs exhaustive {:?} ({}) over {} leaves",
            result.search_key(),
            best.key,
            best.score,
            best.leaves
        ));
    }
    Ok(best.leaves)
}

/// Fixed next-token distribution whatever the context.
pub struct Fixed(pub Vec<f64>);

impl simplikit::decoding::LanguageModel for Fixed {
    fn vocab_size(&self) -> usize {
        self.0.len()
    }
    fn next_distribution(&self, _context: &[u32]) -> Vec<f64> {
        self.0.clone()
    }
    fn represent(&self, context: &[u32]) -> Vec<Vec<f64>> {
        vec![vec![1.0]; context.len()]
    }
}

/// Sampling support computed from the definition: q ∝ p^(1/T), the k most
/// probable, then the shortest prefix reaching `top_p`, renormalized.
pub fn expected_support(p: &[f64], t: f64, k: usize, top_p: f64) -> Vec<(u32, f64)> {
    let mut q: Vec<(u32, f64)> =
        p.iter().enumerate().filter(|x| *x.1 > 0.0).map(|(i, &x)| (i as u32, x.powf(1.0 / t))).collect();
    q.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
    q.truncate(k);
    let z: f64 = q.iter().map(|x| x.1).sum();
    let mut mass = 0.0;
    let mut keep = q.len();
    for (i, x) in q.iter().enumerate() {
        mass += x.1 / z;
        if mass >= top_p - 1e-12 {
            keep = i + 1;
            break;
        }
    }
    q.truncate(keep);
    let z: f64 = q.iter().map(|x| x.1).sum();
    q.into_iter().map(|(i, x)| (i, x / z)).collect()
}

/// Counts per token id of the first sampled token, one decode per seed in
/// `0..draws`.
pub fn sampled_counts(lm: &Fixed, cfg: &simplikit::decoding::DecodeConfig, draws: u64) -> Vec<u64> {
    use simplikit::decoding::{decode, DecodeConfig, LanguageModel};
    let mut counts = vec![0u64; lm.vocab_size()];
    for seed in 0..draws {
        let cfg = DecodeConfig { seed, ..cfg.clone() };
        let r = decode(lm, &[BOS, SEP], &cfg).expect("valid config");
        counts[r.tokens[0] as usize] += 1;
    }
    counts
}

/// Whether every count lies within three binomial standard deviations of
/// its expectation; tokens outside the support must never appear.
pub fn within_three_sigma(counts: &[u64], support: &[(u32, f64)], draws: u64) -> Result<(), String> {
    let n = draws as f64;
    for (id, &c) in counts.iter().enumerate() {
        let q = support.iter().find(|x| x.0 as usize == id).map_or(0.0, |x| x.1);
        let sigma = (n * q * (1.0 - q)).sqrt();
        if (c as f64 - n * q).abs() > 3.0 * sigma {
            return Err(format!("token {id}: {c} draws, expected {:.1} ± {:.1}", n * q, 3.0 * sigma));
        }
    }
    Ok(())
}

/// Token-weighted cross-entropy of every record's target and EOS under the
/// model, and under the uniform model over the same vocabulary.
pub fn corpus_cross_entropy(lm: &NGramLM, records: &[CorpusRecord]) -> (f64, f64) {
    use simplikit::decoding::{cross_entropy, lm_surfaces, UniformLM};
    let uniform = UniformLM { vocab_size: lm.vocab().len() };
    let (mut total, mut base, mut tokens) = (0.0, 0.0, 0.0);
    for r in records {
        let source = lm.vocab().encode(&lm_surfaces(&r.source));
        let mut target = lm.vocab().encode(&lm_surfaces(&r.target));
        target.push(EOS);
        let n = target.len() as f64;
        total += n * cross_entropy(lm, &source, &target).expect("non-empty target");
        base += n * cross_entropy(&uniform, &source, &target).expect("non-empty target");
        tokens += n;
    }
    (total / tokens, base / tokens)
}
