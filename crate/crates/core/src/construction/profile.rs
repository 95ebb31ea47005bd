//! Bhattacharyya profiles and polarized sets.

use serde::{Deserialize, Serialize};

use crate::channel::check_probability;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ProfileKind {
    Exact,
    MonteCarlo,
}

/// Per-index Bhattacharyya values of the synthetic channels.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReliabilityProfile {
    pub z: Vec<f64>,
    pub kind: ProfileKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stderr: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trials: Option<u64>,
}

impl ReliabilityProfile {
    pub fn exact(z: Vec<f64>) -> Self {
        Self {
            z,
            kind: ProfileKind::Exact,
            stderr: None,
            trials: None,
        }
    }

    pub fn len(&self) -> usize {
        self.z.len()
    }

    pub fn is_empty(&self) -> bool {
        self.z.is_empty()
    }

    pub fn mean(&self) -> f64 {
        self.z.iter().sum::<f64>() / self.z.len() as f64
    }

    /// Mean of `1 - Z`; equals the symmetric capacity for erasure channels.
    pub fn capacity(&self) -> f64 {
        1.0 - self.mean()
    }

    /// Values at the given positions (e.g. a user's slice of a path profile).
    pub fn select(&self, positions: &[usize]) -> ReliabilityProfile {
        ReliabilityProfile {
            z: positions.iter().map(|&k| self.z[k]).collect(),
            kind: self.kind,
            stderr: self.stderr.as_ref().map(|s| positions.iter().map(|&k| s[k]).collect()),
            trials: self.trials,
        }
    }
}

/// Exact profile of a BEC(`eps`) at length `2^n`. Index `2i` of level
/// `k+1` is the degraded (`2z - z²`) child of index `i` of level `k`.
pub fn bec_z_profile(n: u32, eps: f64) -> Result<ReliabilityProfile> {
    check_probability("eps", eps)?;
    let mut z = vec![eps];
    for _ in 0..n {
        z = z.iter().flat_map(|&v| [2.0 * v - v * v, v * v]).collect();
    }
    Ok(ReliabilityProfile::exact(z))
}

/// `δ_N = 2^{-N^β}`.
pub fn delta_threshold(n: u32, beta: f64) -> Result<f64> {
    if !(beta > 0.0 && beta < 0.5) {
        return Err(Error::InvalidInput(format!("beta = {beta} is not in (0, 1/2)")));
    }
    let big_n = (1u64 << n) as f64;
    Ok((-big_n.powf(beta)).exp2())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PolarizedSetFamily {
    /// `Z ≥ 1 - δ`
    pub high: Vec<usize>,
    /// `Z ≤ δ`
    pub low: Vec<usize>,
    pub mid: Vec<usize>,
}

impl PolarizedSetFamily {
    pub fn low_mask(&self, len: usize) -> Vec<bool> {
        mask(&self.low, len)
    }

    pub fn high_mask(&self, len: usize) -> Vec<bool> {
        mask(&self.high, len)
    }
}

pub(crate) fn mask(set: &[usize], len: usize) -> Vec<bool> {
    let mut m = vec![false; len];
    for &i in set {
        m[i] = true;
    }
    m
}

pub fn classify_sets(profile: &ReliabilityProfile, delta: f64) -> Result<PolarizedSetFamily> {
    // N = 1 gives δ = ½ for every β, so the closed upper end is accepted.
    if !(delta > 0.0 && delta <= 0.5) {
        return Err(Error::InvalidInput(format!("delta = {delta} is not in (0, 1/2]")));
    }
    let mut sets = PolarizedSetFamily {
        high: Vec::new(),
        low: Vec::new(),
        mid: Vec::new(),
    };
    for (i, &z) in profile.z.iter().enumerate() {
        if z >= 1.0 - delta {
            sets.high.push(i);
        } else if z <= delta {
            sets.low.push(i);
        } else {
            sets.mid.push(i);
        }
    }
    Ok(sets)
}
