//! Analytic leakage and block-error bounds.

use serde::{Deserialize, Serialize};

use crate::construction::partition::IndexPartition;
use crate::construction::path::MonotonePath;
use crate::construction::profile::ReliabilityProfile;
use crate::error::{Error, Result};

/// `m · Σ_j Σ_{i ∈ I_j ∪ F_j} (1 - Z_e(f_j(i))²)` in bits. Monte-Carlo
/// profiles contribute their point estimates.
pub fn leakage_upper_bound(
    eve: &ReliabilityProfile,
    path: &MonotonePath,
    partition: &impl IndexPartition,
    m: usize,
) -> Result<f64> {
    if path.block_len() != partition.block_len() {
        return Err(Error::InvalidInput("path and partition block lengths differ".into()));
    }
    let mut total = 0.0;
    for user in 1..=2 {
        let map = path.index_map(user);
        for i in partition.protected(user) {
            let z = map
                .get(i)
                .and_then(|&k| eve.z.get(k))
                .ok_or_else(|| Error::InvalidInput(format!("eve profile has no value for user {user} index {i}")))?;
            total += 1.0 - z * z;
        }
    }
    Ok(m as f64 * total)
}

/// `m · (Σ_{i ∈ L1} Z1(i) + Σ_{i ∈ L2} Z2(i))`, clipped at 1.
pub fn bler_upper_bound(legit: &[ReliabilityProfile; 2], partition: &impl IndexPartition, m: usize) -> Result<f64> {
    let mut total = 0.0;
    for user in 1..=2 {
        let z = &legit[user - 1].z;
        for i in partition.decoded(user) {
            total += z
                .get(i)
                .ok_or_else(|| Error::InvalidInput(format!("legit profile has no value for user {user} index {i}")))?;
        }
    }
    Ok((m as f64 * total).min(1.0))
}

/// Both bounds with a note on what they leave out.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub leakage_bound: f64,
    pub bler_bound: f64,
    /// The total-variation terms are zero only when the induced input
    /// distribution equals the target, as under uniform inputs with
    /// identity prefixing; otherwise the bounds above are partial.
    pub total_variation_omitted: bool,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::construction::partition::{WeakPartition, WeakUserSets};

    fn weak(len: usize, i: [Vec<usize>; 2], decoded: [Vec<usize>; 2]) -> WeakPartition {
        let user = |k: usize| WeakUserSets {
            i: i[k].clone(),
            f: vec![],
            r: vec![],
            d: vec![],
            decoded: decoded[k].clone(),
        };
        WeakPartition {
            block_len: len,
            users: [user(0), user(1)],
        }
    }

    #[test]
    fn leakage_examples() {
        let path = crate::construction::path::make_path(16, 4).unwrap();
        let p = weak(16, [(0..10).collect(), vec![]], [vec![], vec![]]);
        let ones = ReliabilityProfile::exact(vec![1.0; 32]);
        assert_eq!(leakage_upper_bound(&ones, &path, &p, 3).unwrap(), 0.0);
        let d = 0.0625;
        let eve = ReliabilityProfile::exact(vec![1.0 - d; 32]);
        assert_eq!(leakage_upper_bound(&eve, &path, &p, 1).unwrap(), 1.2109375);
        let short = ReliabilityProfile::exact(vec![1.0; 4]);
        assert!(leakage_upper_bound(&short, &path, &p, 1).is_err());
    }

    #[test]
    fn bler_examples() {
        let p = weak(2, [vec![], vec![]], [vec![1], vec![]]);
        let z = ReliabilityProfile::exact(vec![0.75, 0.25]);
        let zero = ReliabilityProfile::exact(vec![0.0, 0.0]);
        assert_eq!(bler_upper_bound(&[z.clone(), zero.clone()], &p, 1).unwrap(), 0.25);
        assert_eq!(bler_upper_bound(&[z.clone(), zero.clone()], &p, 3).unwrap(), 0.75);
        assert_eq!(bler_upper_bound(&[z, zero.clone()], &p, 5).unwrap(), 1.0);
        assert_eq!(bler_upper_bound(&[zero.clone(), zero], &p, 5).unwrap(), 0.0);
    }
}
