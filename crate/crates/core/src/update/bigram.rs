//! Bigram language model: sampling, watermarked generation, and local
//! training by full-batch gradient descent on next-token cross-entropy.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::update::watermark::{green_mask, GreenListKey};
use crate::vector::ParameterVector;

/// Bigram model over a vocabulary of V tokens: a V x V logit table, row =
/// context token, column = next token. The flattened row-major table is the
/// model's parameter vector (d = V^2).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BigramModel {
    pub vocab_size: usize,
    pub logits: Vec<f64>,
}

impl BigramModel {
    pub fn uniform(vocab_size: usize) -> Self {
        BigramModel {
            vocab_size,
            logits: vec![0.0; vocab_size * vocab_size],
        }
    }

    /// Random teacher with i.i.d. normal logits of the given spread.
    pub fn random_teacher<R: Rng>(vocab_size: usize, spread: f64, rng: &mut R) -> Self {
        let logits = (0..vocab_size * vocab_size)
            .map(|_| spread * crate::update::synthetic::standard_normal(rng))
            .collect();
        BigramModel { vocab_size, logits }
    }

    pub fn from_vector(vocab_size: usize, w: &ParameterVector) -> Result<Self> {
        if w.dim() != vocab_size * vocab_size {
            return Err(Error::Dimension {
                expected: vocab_size * vocab_size,
                got: w.dim(),
            });
        }
        Ok(BigramModel {
            vocab_size,
            logits: w.0.clone(),
        })
    }

    pub fn to_vector(&self) -> ParameterVector {
        ParameterVector(self.logits.clone())
    }

    pub fn row(&self, context: u32) -> &[f64] {
        let v = self.vocab_size;
        &self.logits[context as usize * v..(context as usize + 1) * v]
    }

    /// Softmax of one context row, optionally with the green-list logit boost
    /// applied before normalization.
    pub fn next_token_probs(&self, context: u32, key: Option<&GreenListKey>) -> Vec<f64> {
        let row = self.row(context);
        let mut shifted: Vec<f64> = row.to_vec();
        if let Some(key) = key {
            let mask = green_mask(key, self.vocab_size, context);
            for (logit, &is_green) in shifted.iter_mut().zip(&mask) {
                if is_green {
                    *logit += key.delta_boost;
                }
            }
        }
        softmax_in_place(&mut shifted);
        shifted
    }
}

fn softmax_in_place(row: &mut [f64]) {
    let max = row.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let mut sum = 0.0;
    for x in row.iter_mut() {
        *x = (*x - max).exp();
        sum += *x;
    }
    for x in row.iter_mut() {
        *x /= sum;
    }
}

/// Inverse-CDF sample from a probability row. Fixed vocabulary order keeps
/// paired evaluations with shared uniforms coupled.
pub fn sample_token<R: Rng>(probs: &[f64], rng: &mut R) -> u32 {
    let u: f64 = rng.gen();
    let mut acc = 0.0;
    for (i, &p) in probs.iter().enumerate() {
        acc += p;
        if u < acc {
            return i as u32;
        }
    }
    (probs.len() - 1) as u32
}

/// Autoregressive token sequence from the teacher; with a key present, the
/// green-token logits get the delta boost at every step before sampling.
/// The first token is drawn uniformly.
pub fn gen_corpus<R: Rng>(
    teacher: &BigramModel,
    key: Option<&GreenListKey>,
    length: usize,
    rng: &mut R,
) -> Vec<u32> {
    debug_assert!(length >= 1);
    let v = teacher.vocab_size;
    let mut tokens = Vec::with_capacity(length);
    let mut context = rng.gen_range(0..v as u32);
    tokens.push(context);
    while tokens.len() < length {
        let probs = teacher.next_token_probs(context, key);
        context = sample_token(&probs, rng);
        tokens.push(context);
    }
    tokens
}

/// Bigram transition counts of a corpus: counts[c][x] over consecutive pairs.
fn transition_counts(vocab_size: usize, corpus: &[u32]) -> (Vec<f64>, f64) {
    let mut counts = vec![0.0f64; vocab_size * vocab_size];
    for pair in corpus.windows(2) {
        counts[pair[0] as usize * vocab_size + pair[1] as usize] += 1.0;
    }
    (counts, (corpus.len() - 1) as f64)
}

/// Mean next-token cross-entropy of a model on a corpus.
pub fn cross_entropy(model: &BigramModel, corpus: &[u32]) -> Result<f64> {
    if corpus.len() < 2 {
        return Err(Error::EmptyCorpus(corpus.len()));
    }
    let v = model.vocab_size;
    let (counts, total) = transition_counts(v, corpus);
    let mut loss = 0.0;
    for c in 0..v {
        let probs = model.next_token_probs(c as u32, None);
        for x in 0..v {
            let n = counts[c * v + x];
            if n > 0.0 {
                loss -= n * probs[x].ln();
            }
        }
    }
    Ok(loss / total)
}

/// Gradient of the mean cross-entropy with respect to the logits:
/// grad[c][x] = (n_c * p_model(x|c) - counts[c][x]) / total.
pub fn cross_entropy_gradient(model: &BigramModel, corpus: &[u32]) -> Result<Vec<f64>> {
    if corpus.len() < 2 {
        return Err(Error::EmptyCorpus(corpus.len()));
    }
    let v = model.vocab_size;
    let (counts, total) = transition_counts(v, corpus);
    let mut grad = vec![0.0f64; v * v];
    for c in 0..v {
        let row_total: f64 = counts[c * v..(c + 1) * v].iter().sum();
        if row_total == 0.0 {
            continue;
        }
        let probs = model.next_token_probs(c as u32, None);
        for x in 0..v {
            grad[c * v + x] = (row_total * probs[x] - counts[c * v + x]) / total;
        }
    }
    Ok(grad)
}

/// Local fine-tuning: `epochs` full-batch gradient steps from the global
/// model, returning the update delta = w_local - w_global.
pub fn train_local(
    w_global: &BigramModel,
    corpus: &[u32],
    lr: f64,
    epochs: usize,
) -> Result<ParameterVector> {
    if corpus.len() < 2 {
        return Err(Error::EmptyCorpus(corpus.len()));
    }
    debug_assert!(lr >= 0.0);
    let mut model = w_global.clone();
    for _ in 0..epochs {
        let grad = cross_entropy_gradient(&model, corpus)?;
        for (w, g) in model.logits.iter_mut().zip(&grad) {
            *w -= lr * g;
        }
    }
    Ok(model.to_vector().sub(&w_global.to_vector()))
}
