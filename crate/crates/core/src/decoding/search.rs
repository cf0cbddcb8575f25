use std::cmp::Ordering;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::config::{Algorithm, DecodeConfig};
use super::lm::LanguageModel;
use super::vocab::{BOS, EOS, SEP, UNK};
use super::DecodeError;

/// Temperatures at or below this sample the argmax.
pub const GREEDY_TEMPERATURE: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum HaltReason {
    #[serde(rename = "EOS")]
    Eos,
    MaxLength,
    RepetitionHalt,
    NoValidToken,
}

/// Generated continuation of a prompt. `tokens` ends with EOS when the
/// reason is `Eos`. Log-probabilities are the model's, before any masking
/// or filtering.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenerationResult {
    pub tokens: Vec<u32>,
    pub step_logprobs: Vec<f64>,
    pub total_logprob: f64,
    pub halt_reason: HaltReason,
    /// For `RepetitionHalt`: the token that would have broken the window
    /// limit, and its log-probability. It is not part of `tokens`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub halt_token: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub halt_logprob: Option<f64>,
}

impl GenerationResult {
    /// Tokens without the trailing EOS.
    pub fn content(&self) -> &[u32] {
        match self.tokens.split_last() {
            Some((&EOS, rest)) => rest,
            _ => &self.tokens,
        }
    }

    /// Score beam search ranks finished hypotheses by: the total plus the
    /// log-probability of a halting token.
    pub fn search_score(&self) -> f64 {
        self.total_logprob + self.halt_logprob.unwrap_or(0.0)
    }

    /// Path used to break score ties: tokens followed by the halting token.
    pub fn search_key(&self) -> Vec<u32> {
        let mut key = self.tokens.clone();
        key.extend(self.halt_token);
        key
    }
}

/// Run the configured algorithm. The prompt must end with SEP.
pub fn decode(
    lm: &dyn LanguageModel,
    prompt: &[u32],
    cfg: &DecodeConfig,
) -> Result<GenerationResult, DecodeError> {
    cfg.validate()?;
    if prompt.last() != Some(&SEP) {
        return Err(DecodeError::PromptWithoutSep);
    }
    Ok(match cfg.algorithm {
        Algorithm::Greedy => greedy(lm, prompt, cfg),
        Algorithm::Beam => beam(lm, prompt, cfg),
        Algorithm::Sampling => sample(lm, prompt, cfg),
        Algorithm::Contrastive => contrastive(lm, prompt, cfg),
    })
}

/// Tokens that would complete an n-gram already present in `generated`.
pub fn banned_tokens(generated: &[u32], n: usize) -> Vec<u32> {
    if n == 0 || generated.len() + 1 < n {
        return Vec::new();
    }
    let suffix = &generated[generated.len() + 1 - n..];
    generated
        .windows(n)
        .filter(|w| &w[..n - 1] == suffix)
        .map(|w| w[n - 1])
        .collect()
}

/// Whether emitting `candidate` puts more than `threshold` copies of it in
/// the trailing `window` tokens.
pub fn exceeds_window(generated: &[u32], candidate: u32, window: usize, threshold: usize) -> bool {
    let start = generated.len().saturating_sub(window.saturating_sub(1));
    let count = generated[start..].iter().filter(|&&t| t == candidate).count() + 1;
    count > threshold
}

/// Model distribution with reserved tokens and n-gram repeats zeroed.
fn masked_distribution(
    lm: &dyn LanguageModel,
    context: &[u32],
    generated: &[u32],
    cfg: &DecodeConfig,
) -> Vec<f64> {
    let mut p = lm.next_distribution(context);
    for id in [UNK, BOS, SEP] {
        if let Some(x) = p.get_mut(id as usize) {
            *x = 0.0;
        }
    }
    for id in banned_tokens(generated, cfg.no_ngram_repeat_size) {
        p[id as usize] = 0.0;
    }
    p
}

/// Highest positive entry, lowest id on ties.
fn argmax(p: &[f64]) -> Option<u32> {
    let mut best: Option<(u32, f64)> = None;
    for (id, &x) in p.iter().enumerate() {
        if x > 0.0 && best.map_or(true, |(_, b)| x > b) {
            best = Some((id as u32, x));
        }
    }
    best.map(|(id, _)| id)
}

/// Token-by-token generation with a pluggable choice rule.
fn stepwise(
    lm: &dyn LanguageModel,
    prompt: &[u32],
    cfg: &DecodeConfig,
    mut choose: impl FnMut(&[f64], &[u32]) -> Option<u32>,
) -> GenerationResult {
    let mut context = prompt.to_vec();
    let mut tokens = Vec::new();
    let mut step_logprobs = Vec::new();
    let finish = |tokens, step_logprobs: Vec<f64>, halt_reason, halt: Option<(u32, f64)>| GenerationResult {
        total_logprob: step_logprobs.iter().sum(),
        tokens,
        step_logprobs,
        halt_reason,
        halt_token: halt.map(|h| h.0),
        halt_logprob: halt.map(|h| h.1),
    };
    while tokens.len() < cfg.max_length {
        let p = masked_distribution(lm, &context, &tokens, cfg);
        let Some(token) = choose(&p, &context) else {
            return finish(tokens, step_logprobs, HaltReason::NoValidToken, None);
        };
        let logp = p[token as usize].ln();
        if exceeds_window(&tokens, token, cfg.repeat_window, cfg.repeat_threshold) {
            return finish(tokens, step_logprobs, HaltReason::RepetitionHalt, Some((token, logp)));
        }
        tokens.push(token);
        step_logprobs.push(logp);
        context.push(token);
        if token == EOS {
            return finish(tokens, step_logprobs, HaltReason::Eos, None);
        }
    }
    finish(tokens, step_logprobs, HaltReason::MaxLength, None)
}

pub fn greedy(lm: &dyn LanguageModel, prompt: &[u32], cfg: &DecodeConfig) -> GenerationResult {
    stepwise(lm, prompt, cfg, |p, _| argmax(p))
}

/// Sampling support after temperature scaling, top-k and top-p, sorted by
/// decreasing probability (lowest id first on ties) and renormalized.
///
/// The nucleus is the shortest prefix of that order whose mass reaches
/// `top_p`.
pub fn filter_distribution(p: &[f64], temperature: f64, top_k: usize, top_p: f64) -> Vec<(u32, f64)> {
    let max = p.iter().copied().fold(0.0_f64, f64::max);
    if max <= 0.0 {
        return Vec::new();
    }
    let mut support: Vec<(u32, f64)> = p
        .iter()
        .enumerate()
        .filter(|(_, &x)| x > 0.0)
        .map(|(id, &x)| (id as u32, ((x.ln() - max.ln()) / temperature).exp()))
        .collect();
    support.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap_or(Ordering::Equal).then(a.0.cmp(&b.0)));
    support.truncate(top_k.max(1));
    normalize(&mut support);
    let mut mass = 0.0;
    let mut keep = support.len();
    for (i, &(_, x)) in support.iter().enumerate() {
        mass += x;
        if mass >= top_p - 1e-12 {
            keep = i + 1;
            break;
        }
    }
    support.truncate(keep);
    normalize(&mut support);
    support
}

fn normalize(support: &mut [(u32, f64)]) {
    let total: f64 = support.iter().map(|s| s.1).sum();
    support.iter_mut().for_each(|s| s.1 /= total);
}

/// Draw from a filtered distribution with one uniform variate.
pub fn draw(support: &[(u32, f64)], rng: &mut impl Rng) -> Option<u32> {
    let u: f64 = rng.gen();
    let mut cumulative = 0.0;
    for &(id, x) in support {
        cumulative += x;
        if u < cumulative {
            return Some(id);
        }
    }
    support.last().map(|s| s.0)
}

pub fn sample(lm: &dyn LanguageModel, prompt: &[u32], cfg: &DecodeConfig) -> GenerationResult {
    if cfg.temperature <= GREEDY_TEMPERATURE {
        return greedy(lm, prompt, cfg);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    stepwise(lm, prompt, cfg, |p, _| {
        draw(&filter_distribution(p, cfg.temperature, cfg.top_k, cfg.top_p), &mut rng)
    })
}

/// Top-k candidates scored by `(1 - alpha)·P(v) - alpha·max cos(h_v, h_j)`,
/// where h_v is the last representation of context + v and h_j ranges over
/// the context's representations. `represent` must be prefix-consistent.
pub fn contrastive(lm: &dyn LanguageModel, prompt: &[u32], cfg: &DecodeConfig) -> GenerationResult {
    let alpha = cfg.penalty_alpha;
    stepwise(lm, prompt, cfg, |p, context| {
        let mut candidates: Vec<(u32, f64)> = p
            .iter()
            .enumerate()
            .filter(|(_, &x)| x > 0.0)
            .map(|(id, &x)| (id as u32, x))
            .collect();
        candidates.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap_or(Ordering::Equal).then(a.0.cmp(&b.0)));
        candidates.truncate(cfg.top_k);
        let context_reps = if alpha > 0.0 { lm.represent(context) } else { Vec::new() };
        let mut extended = context.to_vec();
        let mut best: Option<(u32, f64)> = None;
        for (id, prob) in candidates {
            let penalty = if alpha > 0.0 {
                extended.push(id);
                let last = lm.represent_last(&extended);
                extended.pop();
                let max = context_reps
                    .iter()
                    .map(|r| cosine(&last, r))
                    .fold(f64::NEG_INFINITY, f64::max);
                if max.is_finite() { max } else { 0.0 }
            } else {
                0.0
            };
            let score = (1.0 - alpha) * prob - alpha * penalty;
            let better = match best {
                None => true,
                Some((best_id, best_score)) => score > best_score || (score == best_score && id < best_id),
            };
            if better {
                best = Some((id, score));
            }
        }
        best.map(|b| b.0)
    })
}

/// Cosine similarity; 0 when either vector is zero.
pub fn cosine(a: &[f64], b: &[f64]) -> f64 {
    let dot: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
    let na = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    let nb = b.iter().map(|x| x * x).sum::<f64>().sqrt();
    if na == 0.0 || nb == 0.0 {
        0.0
    } else {
        dot / (na * nb)
    }
}

struct Hypothesis {
    tokens: Vec<u32>,
    step_logprobs: Vec<f64>,
    score: f64,
}

impl Hypothesis {
    fn finish(&self, halt_reason: HaltReason) -> GenerationResult {
        GenerationResult {
            tokens: self.tokens.clone(),
            step_logprobs: self.step_logprobs.clone(),
            total_logprob: self.score,
            halt_reason,
            halt_token: None,
            halt_logprob: None,
        }
    }

    fn extend(&self, token: u32, logp: f64) -> Hypothesis {
        let mut tokens = self.tokens.clone();
        tokens.push(token);
        let mut step_logprobs = self.step_logprobs.clone();
        step_logprobs.push(logp);
        Hypothesis {
            tokens,
            step_logprobs,
            score: self.score + logp,
        }
    }
}

fn rank(a: &GenerationResult, b: &GenerationResult) -> Ordering {
    b.search_score()
        .partial_cmp(&a.search_score())
        .unwrap_or(Ordering::Equal)
        .then_with(|| a.search_key().cmp(&b.search_key()))
}

/// Beam search over raw log-probabilities.
///
/// Each step ranks every expansion of every live hypothesis by score, then
/// by token sequence. EOS and window-halting expansions become finished
/// hypotheses if they rank among the first `num_beams`; the best
/// `num_beams` other expansions stay live. With `early_stopping` the search
/// ends once `num_beams` hypotheses have finished, otherwise once no live
/// hypothesis scores at least the best finished one.
pub fn beam(lm: &dyn LanguageModel, prompt: &[u32], cfg: &DecodeConfig) -> GenerationResult {
    let width = cfg.num_beams;
    let mut live = vec![Hypothesis {
        tokens: Vec::new(),
        step_logprobs: Vec::new(),
        score: 0.0,
    }];
    let mut finished: Vec<GenerationResult> = Vec::new();
    let mut context = prompt.to_vec();

    while !live.is_empty() {
        // (hypothesis, token, logp, score)
        let mut expansions: Vec<(usize, u32, f64, f64)> = Vec::new();
        for (h, hyp) in live.iter().enumerate() {
            context.truncate(prompt.len());
            context.extend_from_slice(&hyp.tokens);
            let p = masked_distribution(lm, &context, &hyp.tokens, cfg);
            let before = expansions.len();
            for (id, &x) in p.iter().enumerate() {
                if x > 0.0 {
                    let logp = x.ln();
                    expansions.push((h, id as u32, logp, hyp.score + logp));
                }
            }
            if expansions.len() == before {
                finished.push(hyp.finish(HaltReason::NoValidToken));
            }
        }
        expansions.sort_by(|a, b| {
            b.3.partial_cmp(&a.3)
                .unwrap_or(Ordering::Equal)
                .then_with(|| live[a.0].tokens.cmp(&live[b.0].tokens))
                .then(a.1.cmp(&b.1))
        });

        let mut next: Vec<Hypothesis> = Vec::new();
        for (position, &(h, token, logp, _)) in expansions.iter().enumerate() {
            if next.len() == width && position >= width {
                break;
            }
            let hyp = &live[h];
            if token == EOS {
                if position < width {
                    finished.push(hyp.extend(token, logp).finish(HaltReason::Eos));
                }
            } else if exceeds_window(&hyp.tokens, token, cfg.repeat_window, cfg.repeat_threshold) {
                if position < width {
                    let mut halted = hyp.finish(HaltReason::RepetitionHalt);
                    halted.halt_token = Some(token);
                    halted.halt_logprob = Some(logp);
                    finished.push(halted);
                }
            } else if next.len() < width {
                next.push(hyp.extend(token, logp));
            }
        }
        let (at_limit, rest): (Vec<_>, Vec<_>) =
            next.into_iter().partition(|h| h.tokens.len() >= cfg.max_length);
        finished.extend(at_limit.iter().map(|h| h.finish(HaltReason::MaxLength)));
        live = rest;

        if cfg.early_stopping {
            if finished.len() >= width {
                break;
            }
        } else if let Some(best) = finished.iter().map(GenerationResult::search_score).reduce(f64::max) {
            if live.iter().all(|h| h.score < best) {
                break;
            }
        }
    }
    finished.sort_by(rank);
    finished.into_iter().next().unwrap_or(GenerationResult {
        tokens: Vec::new(),
        step_logprobs: Vec::new(),
        total_logprob: 0.0,
        halt_reason: HaltReason::NoValidToken,
        halt_token: None,
        halt_logprob: None,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Violation {
    /// The n-gram ending at `index` (0-based) occurred earlier.
    RepeatedNgram { index: usize },
    /// The token at `index` occurs more than the threshold within the
    /// window ending at `index`.
    WindowExceeded { index: usize },
    TooLong { length: usize },
    /// A repetition halt whose halting token would not break the window.
    HaltWithoutViolation,
    /// A step with zero or non-finite log-probability.
    InvalidStep { index: usize },
}

/// Check a result against the repetition and length constraints of `cfg`.
pub fn check_constraints(result: &GenerationResult, cfg: &DecodeConfig) -> Vec<Violation> {
    let mut violations = Vec::new();
    let tokens = &result.tokens;
    if tokens.len() > cfg.max_length {
        violations.push(Violation::TooLong { length: tokens.len() });
    }
    let n = cfg.no_ngram_repeat_size;
    if n > 0 {
        for end in n..=tokens.len() {
            let gram = &tokens[end - n..end];
            if tokens[..end - 1].windows(n).any(|w| w == gram) {
                violations.push(Violation::RepeatedNgram { index: end - 1 });
            }
        }
    }
    for index in 0..tokens.len() {
        if exceeds_window(&tokens[..index], tokens[index], cfg.repeat_window, cfg.repeat_threshold) {
            violations.push(Violation::WindowExceeded { index });
        }
    }
    if result.halt_reason == HaltReason::RepetitionHalt {
        let halts = result
            .halt_token
            .is_some_and(|t| exceeds_window(tokens, t, cfg.repeat_window, cfg.repeat_threshold));
        if !halts {
            violations.push(Violation::HaltWithoutViolation);
        }
    }
    for (index, lp) in result.step_logprobs.iter().enumerate() {
        if !lp.is_finite() {
            violations.push(Violation::InvalidStep { index });
        }
    }
    violations
}
