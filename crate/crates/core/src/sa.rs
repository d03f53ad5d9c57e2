//! Functional secure-aggregation oracle.
//!
//! The vault holds one round's client updates behind a subset-sum interface.
//! Only sums over authorized subsets (size >= N_sa) are answerable; no code
//! path returns an individual update. The verification layer receives ground
//! truth through its own explicitly labeled channel, never through here.

use std::sync::atomic::{AtomicU64, Ordering};

use crate::config::ProtocolConfig;
use crate::error::{Error, Result};
use crate::vector::ParameterVector;

/// Write-once store of one round's K updates plus the query counter.
#[derive(Debug)]
pub struct RoundVault {
    round: usize,
    updates: Vec<ParameterVector>,
    n_sa: usize,
    query_count: AtomicU64,
}

impl RoundVault {
    pub fn new(round: usize, updates: Vec<ParameterVector>, n_sa: usize) -> Self {
        RoundVault {
            round,
            updates,
            n_sa,
            query_count: AtomicU64::new(0),
        }
    }

    pub fn round(&self) -> usize {
        self.round
    }

    pub fn client_count(&self) -> usize {
        self.updates.len()
    }

    /// Number of successful subset-sum queries answered so far.
    pub fn query_count(&self) -> u64 {
        self.query_count.load(Ordering::Relaxed)
    }

    /// Sum of updates over the client subset `w`.
    ///
    /// `w` must hold distinct ids below K and satisfy |w| >= N_sa. Increments
    /// the query counter on success only.
    pub fn subset_sum(&self, w: &[usize]) -> Result<ParameterVector> {
        if w.len() < self.n_sa {
            return Err(Error::Authorization {
                got: w.len(),
                n_sa: self.n_sa,
            });
        }
        let k = self.updates.len();
        let mut seen = vec![false; k];
        for &id in w {
            if id >= k {
                return Err(Error::UnknownClient { id, k });
            }
            if seen[id] {
                return Err(Error::Config(format!("duplicate client id {id} in subset")));
            }
            seen[id] = true;
        }
        let d = self.updates[0].dim();
        let mut sum = ParameterVector::zeros(d);
        for &id in w {
            sum.axpy(1.0, &self.updates[id]);
        }
        self.query_count.fetch_add(1, Ordering::Relaxed);
        Ok(sum)
    }
}

/// Nominal SA query total of a full attribution run: 2 M K T.
pub fn query_budget(cfg: &ProtocolConfig) -> u64 {
    2 * cfg.m as u64 * cfg.k as u64 * cfg.t as u64
}
