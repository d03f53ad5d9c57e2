//! Synthetic update generator: mean plus independent Gaussian fluctuations
//! on a diagonal-covariance effective subspace, with a planted watermark
//! drift added to watermarked clients' means.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::vector::ParameterVector;

/// Box-Muller standard normal draw; two uniforms per sample keeps the stream
/// layout simple and platform-independent.
pub fn standard_normal<R: Rng>(rng: &mut R) -> f64 {
    let u1: f64 = rng.gen_range(f64::MIN_POSITIVE..1.0);
    let u2: f64 = rng.gen();
    (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
}

/// Round-level specification of the synthetic update distribution.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SyntheticUpdateSpec {
    /// Round mean shared by every client.
    pub mu: ParameterVector,
    /// Diagonal of the fluctuation covariance; zeros shrink the effective
    /// subspace.
    pub cov_diag: Vec<f64>,
    /// Unit direction of the planted watermark.
    pub wm_direction: ParameterVector,
    /// Per-round drift added along `wm_direction` for watermarked clients.
    pub wm_strength: f64,
}

impl SyntheticUpdateSpec {
    /// Effective dimension: count of strictly positive covariance entries.
    pub fn d_star(&self) -> usize {
        self.cov_diag.iter().filter(|&&v| v > 0.0).count()
    }

    pub fn validate(&self) -> Result<()> {
        let d = self.mu.dim();
        if self.cov_diag.len() != d {
            return Err(Error::Dimension {
                expected: d,
                got: self.cov_diag.len(),
            });
        }
        self.wm_direction.check(d)?;
        if self.cov_diag.iter().any(|&v| v < 0.0 || !v.is_finite()) {
            return Err(Error::Config("cov_diag entries must be >= 0".into()));
        }
        if self.wm_strength < 0.0 {
            return Err(Error::Config("wm_strength must be >= 0".into()));
        }
        if (self.wm_direction.norm() - 1.0).abs() > 1e-9 {
            return Err(Error::Config(format!(
                "wm_direction norm {} != 1",
                self.wm_direction.norm()
            )));
        }
        Ok(())
    }
}

/// Draw K client updates: delta_j = mu + xi_j (+ wm_strength * wm_direction
/// when flagged), with xi_j zero-mean Gaussian, diagonal covariance,
/// independent across clients.
pub fn synth_updates<R: Rng>(
    spec: &SyntheticUpdateSpec,
    wm_flags: &[bool],
    rng: &mut R,
) -> Vec<ParameterVector> {
    let d = spec.mu.dim();
    wm_flags
        .iter()
        .map(|&flagged| {
            let mut delta = spec.mu.clone();
            for ell in 0..d {
                let var = spec.cov_diag[ell];
                if var > 0.0 {
                    delta.0[ell] += var.sqrt() * standard_normal(rng);
                }
            }
            if flagged {
                delta.axpy(spec.wm_strength, &spec.wm_direction);
            }
            delta
        })
        .collect()
}
