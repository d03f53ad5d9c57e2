//! Paired-subset query designs and the client-level update estimator.
//!
//! A design pairs M include-target subsets (size N+1, containing the target)
//! with M exclude-target subsets (size N, avoiding the target). The masking
//! coefficient of each non-target client is its net inclusion frequency
//! across the pair; the design is accepted only when the masking strength and
//! effective size clear the rejection threshold, which guarantees the privacy
//! bound pointwise. The estimator itself touches client updates exclusively
//! through [`RoundVault::subset_sum`].

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::config::ProtocolConfig;
use crate::error::{Error, Result};
use crate::sa::RoundVault;
use crate::vector::{covariance_trace, ParameterVector};

/// Proposal cap for rejection sampling; exceeding it signals a misconfigured
/// regime rather than bad luck, since the rejection probability decays
/// exponentially in N.
pub const DEFAULT_RETRY_CAP: usize = 10_000;

/// One paired include/exclude subset design for a single target client.
///
/// Serialized field names follow the audit-log contract: `U_sets`, `V_sets`,
/// `alpha`, `c`, `m_eff`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct QueryDesign {
    pub target: usize,
    /// M include-target subsets, each of size N+1, sorted ids.
    #[serde(rename = "U_sets")]
    pub include_sets: Vec<Vec<usize>>,
    /// M exclude-target subsets, each of size N, sorted ids.
    #[serde(rename = "V_sets")]
    pub exclude_sets: Vec<Vec<usize>>,
    /// Masking coefficients indexed by client id; the target slot is unused
    /// and held at zero (the expansion fixes the target's own coefficient at
    /// exactly 1).
    pub alpha: Vec<f64>,
    /// Masking strength c = sum_j alpha_j^2.
    #[serde(rename = "c")]
    pub masking_strength: f64,
    /// Effective size c^2 / sum_j alpha_j^4, zero when c = 0.
    #[serde(rename = "m_eff")]
    pub effective_size: f64,
    pub accepted: bool,
    /// Rejected proposals drawn before this design.
    pub redraws: usize,
}

impl QueryDesign {
    /// Build a design from explicit subset families, computing the masking
    /// coefficients and acceptance flag. Used by tests and audit tooling;
    /// sampling goes through [`propose_design`].
    pub fn from_sets(
        cfg: &ProtocolConfig,
        target: usize,
        include_sets: Vec<Vec<usize>>,
        exclude_sets: Vec<Vec<usize>>,
    ) -> QueryDesign {
        let k = cfg.k;
        let m = include_sets.len() as f64;
        let mut alpha = vec![0.0f64; k];
        for u in &include_sets {
            for &j in u {
                if j != target {
                    alpha[j] += 1.0;
                }
            }
        }
        for v in &exclude_sets {
            for &j in v {
                alpha[j] -= 1.0;
            }
        }
        for a in alpha.iter_mut() {
            *a /= m;
        }
        let masking_strength: f64 = alpha.iter().map(|a| a * a).sum();
        let quartic: f64 = alpha.iter().map(|a| a * a * a * a).sum();
        let effective_size = if masking_strength > 0.0 {
            masking_strength * masking_strength / quartic
        } else {
            0.0
        };
        let mut design = QueryDesign {
            target,
            include_sets,
            exclude_sets,
            alpha,
            masking_strength,
            effective_size,
            accepted: false,
            redraws: 0,
        };
        design.accepted = rejection_check(&design, cfg);
        design
    }
}

/// Uniform N-subset of [K] \ {target} by partial Fisher-Yates shuffle.
fn sample_non_target_subset<R: Rng>(k: usize, target: usize, n: usize, rng: &mut R) -> Vec<usize> {
    let mut pool: Vec<usize> = (0..k).filter(|&j| j != target).collect();
    let l = pool.len();
    for i in 0..n {
        let j = rng.gen_range(i..l);
        pool.swap(i, j);
    }
    let mut subset = pool[..n].to_vec();
    subset.sort_unstable();
    subset
}

/// Draw one proposal: U_m = {target} ∪ X_m and V_m = Y_m with the X's and
/// Y's i.i.d. uniform N-subsets of the non-target clients. The acceptance
/// flag reflects the rejection check; no retrying happens here.
pub fn propose_design<R: Rng>(cfg: &ProtocolConfig, target: usize, rng: &mut R) -> QueryDesign {
    debug_assert!(target < cfg.k);
    let mut include_sets = Vec::with_capacity(cfg.m);
    for _ in 0..cfg.m {
        let mut u = sample_non_target_subset(cfg.k, target, cfg.n, rng);
        u.push(target);
        u.sort_unstable();
        include_sets.push(u);
    }
    let exclude_sets: Vec<Vec<usize>> = (0..cfg.m)
        .map(|_| sample_non_target_subset(cfg.k, target, cfg.n, rng))
        .collect();
    QueryDesign::from_sets(cfg, target, include_sets, exclude_sets)
}

/// Privacy condition: c >= aN, M_eff >= aN, and N < K-1, with
/// aN = N (1 - rho) / M and rho = N / (K-1).
pub fn rejection_check(design: &QueryDesign, cfg: &ProtocolConfig) -> bool {
    if cfg.n >= cfg.k - 1 {
        return false;
    }
    let threshold = cfg.rejection_threshold();
    design.masking_strength >= threshold && design.effective_size >= threshold
}

/// Redraw proposals until the rejection check passes.
///
/// Resampling consumes no SA queries; the oracle is only contacted after
/// acceptance. Errors with [`Error::RetryLimitExceeded`] after `retry_cap`
/// proposals.
pub fn sample_accepted_design_capped<R: Rng>(
    cfg: &ProtocolConfig,
    target: usize,
    rng: &mut R,
    retry_cap: usize,
) -> Result<QueryDesign> {
    for attempt in 0..retry_cap {
        let mut design = propose_design(cfg, target, rng);
        if design.accepted {
            design.redraws = attempt;
            return Ok(design);
        }
    }
    Err(Error::RetryLimitExceeded(retry_cap))
}

/// [`sample_accepted_design_capped`] with the default proposal cap.
pub fn sample_accepted_design<R: Rng>(
    cfg: &ProtocolConfig,
    target: usize,
    rng: &mut R,
) -> Result<QueryDesign> {
    sample_accepted_design_capped(cfg, target, rng, DEFAULT_RETRY_CAP)
}

/// Form the update estimate through the SA oracle:
/// mean of include-subset sums minus mean of exclude-subset sums.
/// Consumes exactly 2M subset-sum queries.
pub fn estimate_update(vault: &RoundVault, design: &QueryDesign) -> Result<ParameterVector> {
    debug_assert!(design.accepted, "estimate requested for a rejected design");
    let m = design.include_sets.len() as f64;
    let d = {
        let first = vault.subset_sum(&design.include_sets[0])?;
        let mut acc = first;
        for u in &design.include_sets[1..] {
            acc.axpy(1.0, &vault.subset_sum(u)?);
        }
        for v in &design.exclude_sets {
            acc.axpy(-1.0, &vault.subset_sum(v)?);
        }
        acc
    };
    Ok(d.scale(1.0 / m))
}

/// Trace bound on the conditional covariance of the accepted estimator:
/// `(1/p_accept) * (2/M) * N(K-1-N)/(K-2) * trace(Sigma_{-i})`, where
/// `Sigma_{-i}` is the empirical covariance of the non-target updates about
/// their mean (1/(K-1) normalization).
pub fn variance_bound(
    cfg: &ProtocolConfig,
    non_target_updates: &[ParameterVector],
    p_accept: f64,
) -> Result<f64> {
    if cfg.k <= 2 {
        return Err(Error::Degenerate(format!(
            "variance factor undefined at K = {}",
            cfg.k
        )));
    }
    if !(p_accept > 0.0 && p_accept <= 1.0) {
        return Err(Error::Config(format!("p_accept = {p_accept} outside (0, 1]")));
    }
    let sigma_trace = covariance_trace(non_target_updates);
    Ok((1.0 / p_accept) * (2.0 / cfg.m as f64) * cfg.variance_factor() * sigma_trace)
}
