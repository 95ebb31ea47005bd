//! Successive-cancellation engine for a single binary polar transform.
//!
//! The engine works on the `F^{⊗m}` structure in natural order: given
//! independent per-position factors `P(obs_j | x_j)` for `x = w·F^{⊗m}`, it
//! visits `w_0, w_1, ...` in order, hands the exact posterior
//! `P(w_t | obs, w_{<t})` to a decision callback and continues with the bit
//! the callback returns. Factors and messages are kept as normalised
//! probability pairs; on erasure channels every value is one of `0`, `½`,
//! `1` and the arithmetic is exact.
//!
//! Because `G_N = B_N F^{⊗n}` and the two factors commute, `u·G_N` is
//! `u·F^{⊗n}` with its positions bit-reversed. Callers that decode `u` of a
//! `G_N` code therefore feed the factor of codeword position `rev(j)` at
//! engine position `j` (see [`to_engine_order`]).

use crate::gf2_polar::reverse_bits;

/// `[P(0), P(1)]`, normalised.
pub type Prob = [f64; 2];

pub const UNIFORM: Prob = [0.5, 0.5];

#[inline]
pub(crate) fn normalize(p: Prob) -> Option<Prob> {
    let s = p[0] + p[1];
    if s > 0.0 {
        Some([p[0] / s, p[1] / s])
    } else {
        None
    }
}

/// Check-node combination: the distribution of `a ⊕ b`.
#[inline]
fn combine_xor(a: Prob, b: Prob) -> Prob {
    let p0 = a[0] * b[0] + a[1] * b[1];
    let p1 = a[0] * b[1] + a[1] * b[0];
    normalize([p0, p1]).unwrap_or(UNIFORM)
}

/// Variable-node combination given the left partial sum `s`.
#[inline]
fn combine_eq(top: Prob, bot: Prob, s: u8) -> Option<Prob> {
    let t = if s == 0 { top } else { [top[1], top[0]] };
    normalize([t[0] * bot[0], t[1] * bot[1]])
}

/// Permutes per-codeword-position factors into engine order.
pub fn to_engine_order(factors: &[Prob]) -> Vec<Prob> {
    let n = factors.len().trailing_zeros();
    (0..factors.len()).map(|i| factors[reverse_bits(i, n)]).collect()
}

/// Reusable SC workspace for one transform length.
pub struct ScEngine {
    levels: Vec<Vec<Prob>>,
    /// Lowest engine index whose incoming messages were computed from an
    /// impossible partial sum.
    pub conflict: Option<usize>,
}

impl ScEngine {
    pub fn new(len: usize) -> Self {
        assert!(len.is_power_of_two());
        let depth = len.trailing_zeros() as usize;
        Self {
            levels: (0..=depth).map(|d| vec![UNIFORM; len >> d]).collect(),
            conflict: None,
        }
    }

    pub fn len(&self) -> usize {
        self.levels[0].len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Runs SC over `factors` (engine order). `decide(t, posterior)` returns
    /// the value of `w_t`. Returns the re-encoded codeword `w·F^{⊗m}`.
    pub fn run<F>(&mut self, factors: &[Prob], mut decide: F) -> Vec<u8>
    where
        F: FnMut(usize, Prob) -> u8,
    {
        assert_eq!(factors.len(), self.len());
        self.levels[0].copy_from_slice(factors);
        self.conflict = None;
        let mut out = vec![0u8; factors.len()];
        self.node(0, 0, &mut out, &mut decide);
        out
    }

    fn node<F>(&mut self, depth: usize, offset: usize, out: &mut [u8], decide: &mut F)
    where
        F: FnMut(usize, Prob) -> u8,
    {
        let len = out.len();
        if len == 1 {
            out[0] = decide(offset, self.levels[depth][0]) & 1;
            return;
        }
        let half = len / 2;
        {
            let (upper, lower) = self.levels.split_at_mut(depth + 1);
            let cur = &upper[depth];
            let next = &mut lower[0][..half];
            for (j, slot) in next.iter_mut().enumerate() {
                *slot = combine_xor(cur[j], cur[j + half]);
            }
        }
        let (left, right) = out.split_at_mut(half);
        self.node(depth + 1, offset, left, decide);
        {
            let (upper, lower) = self.levels.split_at_mut(depth + 1);
            let cur = &upper[depth];
            let next = &mut lower[0][..half];
            for (j, slot) in next.iter_mut().enumerate() {
                *slot = match combine_eq(cur[j], cur[j + half], left[j]) {
                    Some(p) => p,
                    None => {
                        let at = offset + half;
                        self.conflict = Some(self.conflict.map_or(at, |c| c.min(at)));
                        UNIFORM
                    }
                };
            }
        }
        self.node(depth + 1, offset + half, right, decide);
        for (l, r) in left.iter_mut().zip(right.iter()) {
            *l ^= r;
        }
    }
}

/// Bhattacharyya value `2·√(P(0)·P(1))` of a posterior.
#[inline]
pub fn bhattacharyya(p: Prob) -> f64 {
    (2.0 * (p[0] * p[1]).sqrt()).min(1.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gf2_polar::butterfly_bits;

    #[test]
    fn noiseless_factors_decode_exactly() {
        let w = vec![1u8, 0, 1, 1, 0, 0, 1, 0];
        let mut x = w.clone();
        butterfly_bits(&mut x);
        let factors: Vec<Prob> = x
            .iter()
            .map(|&b| if b == 0 { [1.0, 0.0] } else { [0.0, 1.0] })
            .collect();
        let mut engine = ScEngine::new(8);
        let mut decided = Vec::new();
        let coded = engine.run(&factors, |_, p| {
            assert!(p == [1.0, 0.0] || p == [0.0, 1.0]);
            let b = (p[1] > p[0]) as u8;
            decided.push(b);
            b
        });
        assert_eq!(decided, w);
        assert_eq!(coded, x);
        assert_eq!(engine.conflict, None);
    }

    #[test]
    fn all_uniform_gives_half_everywhere() {
        let mut engine = ScEngine::new(16);
        engine.run(&[UNIFORM; 16], |_, p| {
            assert_eq!(p, UNIFORM);
            0
        });
    }

    #[test]
    fn wrong_decision_is_flagged_as_conflict() {
        // x = (w0 ^ w1, w1) observed as (0, 0); forcing w0 = 1 makes the
        // right branch inconsistent.
        let mut engine = ScEngine::new(2);
        engine.run(&[[1.0, 0.0], [1.0, 0.0]], |t, _| if t == 0 { 1 } else { 0 });
        assert_eq!(engine.conflict, Some(1));
    }
}
