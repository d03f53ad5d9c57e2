//! Watermark scoring: the green-token z-test on the bigram testbed, the
//! differential-scoring transform, the direct-scoring baseline, and a
//! synthetic score generator with separated conditional means.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::{derive_rng, purpose};
use crate::update::bigram::{sample_token, BigramModel};
use crate::update::synthetic::standard_normal;
use crate::update::watermark::{green_mask, GreenListKey};
use crate::vector::ParameterVector;

/// Evaluation context for one scoring pass: prompt contexts, generation
/// length per prompt, the detection key, and the detection seed shared by
/// paired evaluations.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ScoreContext {
    pub prompts: Vec<u32>,
    pub gen_len: usize,
    pub key: GreenListKey,
    pub detection_rng_seed: u64,
}

impl ScoreContext {
    pub fn validate(&self) -> Result<()> {
        if self.prompts.is_empty() {
            return Err(Error::Config("prompt set is empty".into()));
        }
        if self.gen_len < 1 {
            return Err(Error::Config("gen_len must be >= 1".into()));
        }
        Ok(())
    }
}

/// A scoring function over model parameter vectors.
///
/// `eval_pair` scores two models under the same context; the default simply
/// evaluates twice. Decorators whose effect provably cancels in differences
/// (an additive baseline) override it so the cancellation is exact in float
/// arithmetic, not approximate.
pub trait ScoreFn: Sync {
    fn eval(&self, w: &ParameterVector, ctx: &ScoreContext) -> f64;

    fn eval_pair(
        &self,
        w_a: &ParameterVector,
        w_b: &ParameterVector,
        ctx: &ScoreContext,
    ) -> (f64, f64) {
        (self.eval(w_a, ctx), self.eval(w_b, ctx))
    }
}

/// Green-token z-test statistic: z = (G - gamma T) / sqrt(T gamma (1-gamma)).
pub fn green_z_stat(green_count: f64, scored_tokens: f64, gamma: f64) -> f64 {
    (green_count - gamma * scored_tokens) / (scored_tokens * gamma * (1.0 - gamma)).sqrt()
}

/// Green-token z-score of a bigram model.
///
/// Each prompt seeds an autoregressive generation of `gen_len` tokens under
/// temperature-1 sampling; each generated token is scored against the green
/// list of its context (the previous token). Per-prompt RNG streams derive
/// from the detection seed, so the statistic is deterministic given (model,
/// ctx) and independent of prompt evaluation order.
pub fn kgw_score(model: &BigramModel, ctx: &ScoreContext) -> f64 {
    let v = model.vocab_size;
    let gamma = ctx.key.gamma_green;
    let mut green = 0u64;
    let mut scored = 0u64;
    for (p_idx, &prompt) in ctx.prompts.iter().enumerate() {
        let mut rng = derive_rng(ctx.detection_rng_seed, &[purpose::DETECTION, p_idx as u64]);
        let mut context = prompt % v as u32;
        for _ in 0..ctx.gen_len {
            let probs = model.next_token_probs(context, None);
            let tok = sample_token(&probs, &mut rng);
            if green_mask(&ctx.key, v, context)[tok as usize] {
                green += 1;
            }
            scored += 1;
            context = tok;
        }
    }
    green_z_stat(green as f64, scored as f64, gamma)
}

/// KGW scoring packaged as a [`ScoreFn`] over flattened bigram logits.
pub struct KgwScore {
    pub vocab_size: usize,
}

impl ScoreFn for KgwScore {
    fn eval(&self, w: &ParameterVector, ctx: &ScoreContext) -> f64 {
        let model = BigramModel::from_vector(self.vocab_size, w)
            .expect("score input dimension must be V^2");
        kgw_score(&model, ctx)
    }
}

/// Linear projection score used by the synthetic backend:
/// `scale * <w, direction>`. Its differential response to an update is exact,
/// which realizes the separation condition with zero benign mean.
pub struct ProjectionScore {
    pub direction: ParameterVector,
    pub scale: f64,
}

impl ScoreFn for ProjectionScore {
    fn eval(&self, w: &ParameterVector, _ctx: &ScoreContext) -> f64 {
        self.scale * self.direction.dot(w)
    }
}

/// A score function shifted by an additive baseline.
///
/// Direct scores move by exactly the shift; paired evaluation delegates to
/// the inner function because a shared additive term cancels in the
/// difference, keeping differential scores bit-identical to the unshifted
/// ones.
pub struct ShiftedScore<F: ScoreFn> {
    pub inner: F,
    pub shift: f64,
}

impl<F: ScoreFn> ScoreFn for ShiftedScore<F> {
    fn eval(&self, w: &ParameterVector, ctx: &ScoreContext) -> f64 {
        self.inner.eval(w, ctx) + self.shift
    }

    fn eval_pair(
        &self,
        w_a: &ParameterVector,
        w_b: &ParameterVector,
        ctx: &ScoreContext,
    ) -> (f64, f64) {
        self.inner.eval_pair(w_a, w_b, ctx)
    }
}

/// Differential score: score(w_prev + delta_hat) - score(w_prev), both
/// evaluations under the same prompts and detection seed.
pub fn differential_score<F: ScoreFn + ?Sized>(
    score_fn: &F,
    w_prev: &ParameterVector,
    delta_hat: &ParameterVector,
    ctx: &ScoreContext,
) -> f64 {
    let candidate = w_prev.add(delta_hat);
    let (s_candidate, s_reference) = score_fn.eval_pair(&candidate, w_prev, ctx);
    s_candidate - s_reference
}

/// Direct-scoring baseline: score(w_prev + delta) with no reference
/// subtraction. Inherits whatever watermark bias the global model has
/// already accumulated.
pub fn direct_score<F: ScoreFn + ?Sized>(
    score_fn: &F,
    w_prev: &ParameterVector,
    delta: &ParameterVector,
    ctx: &ScoreContext,
) -> f64 {
    score_fn.eval(&w_prev.add(delta), ctx)
}

/// Synthetic per-round score model: watermarked conditional-mean floor `m`,
/// benign mean ceiling `eps`, sub-Gaussian (here Gaussian) noise scale `nu`.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct SyntheticScoreSpec {
    pub m: f64,
    pub eps: f64,
    pub nu: f64,
}

impl SyntheticScoreSpec {
    /// Constants fitted in the reference experiments.
    pub fn fitted() -> Self {
        SyntheticScoreSpec {
            m: 3.3,
            eps: 1.2,
            nu: 0.85,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.m > 0.0) {
            return Err(Error::Config("m must be > 0".into()));
        }
        if !(self.eps >= 0.0 && self.eps < self.m) {
            return Err(Error::Config("eps must lie in [0, m)".into()));
        }
        if !(self.nu > 0.0) {
            return Err(Error::Config("nu must be > 0".into()));
        }
        Ok(())
    }
}

/// One synthetic per-round score: mean `m` for watermarked clients, a mean
/// drawn uniformly from [-eps, eps] for benign ones, plus nu-scaled Gaussian
/// noise.
pub fn synth_score<R: Rng>(spec: &SyntheticScoreSpec, is_watermarked: bool, rng: &mut R) -> f64 {
    let mean = if is_watermarked {
        spec.m
    } else {
        // Benign means stress the full allowed band.
        spec.eps * (2.0 * rng.gen::<f64>() - 1.0)
    };
    mean + spec.nu * standard_normal(rng)
}
