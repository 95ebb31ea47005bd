//! Successive-cancellation posteriors for the joint two-user decoder.
//!
//! The receiver observes `y = W(x1, x2)` with `x_j = u_j·G_N` and decodes
//! the `2N` bits of `u1, u2` in the order given by a monotone path. For a
//! path `p = l·b` (every symbol of a base path `b` of length `2N0` repeated
//! `l` times) the posteriors are computed exactly:
//!
//! `F^{⊗n} = F^{⊗n0} ⊗ F^{⊗m}` with `l = 2^m`, so writing each `u_j` as an
//! `N0 × l` matrix `U_j` and `V_j = U_j·F^{⊗m}` (row-wise), column `c` of the
//! codeword depends only on column `c` of `V_1` and `V_2`. A run of `l`
//! path symbols is one row of one `U_j`; rows already decided are known,
//! rows not yet decided are uniform, and each column contributes an exact
//! likelihood for the current row by enumerating the unknown entries of
//! that column. The row itself is then an `l`-bit polar code decoded by
//! [`ScEngine`]. Corner paths have `N0 = 1` and cost `O(N log N)`.

use crate::channel::{adder_likelihood, MacOutput};
use crate::codec::sc::{normalize, Prob, ScEngine, UNIFORM};
use crate::construction::path::MonotonePath;
use crate::error::{Error, Result};
use crate::gf2_polar::{butterfly_word, reverse_bits};

/// Largest base length `N0` handled by column enumeration.
pub const MAX_BASE_LEN: usize = 8;

/// One decoding step: path position `k` carries bit `index` of `user`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PathSlot {
    pub position: usize,
    pub user: usize,
    pub index: usize,
}

pub struct MacScEngine {
    n: u32,
    l: usize,
    n0: usize,
    /// Base path symbols, one per super-node.
    base: Vec<u8>,
    inner: ScEngine,
}

/// Per-position likelihood `P(y | x1, x2)`, indexed `[x1][x2]`.
pub type PairLikelihood = [[f64; 2]; 2];

impl MacScEngine {
    pub fn new(path: &MonotonePath) -> Result<Self> {
        let (l, base) = path.decompose();
        let n0 = base.block_len();
        if n0 > MAX_BASE_LEN {
            return Err(Error::UnsupportedPath(format!(
                "path {path} reduces to a base of length {} (> {} per user); exact joint \
                 SC needs a path of the form l·b with a short base",
                2 * n0,
                MAX_BASE_LEN
            )));
        }
        Ok(Self {
            n: path.log_len(),
            l,
            n0,
            base: base.bits().to_vec(),
            inner: ScEngine::new(l),
        })
    }

    pub fn block_len(&self) -> usize {
        self.n0 * self.l
    }

    /// Runs the joint SC decoder. `lik` is indexed by codeword position.
    /// `decide` receives each slot in path order with the exact posterior
    /// of that bit given `y` and all earlier decisions, and returns the
    /// bit to condition on. Returns the decided `(u1, u2)`. The second
    /// element is the first path position whose conditioning became
    /// impossible, if any.
    pub fn run<F>(&mut self, lik: &[PairLikelihood], mut decide: F) -> ([Vec<u8>; 2], Option<usize>)
    where
        F: FnMut(PathSlot, Prob) -> u8,
    {
        let big_n = self.block_len();
        assert_eq!(lik.len(), big_n);
        let (l, n0) = (self.l, self.n0);
        // Engine order: position r*l + c of the F^{⊗n} output.
        let lik_e: Vec<PairLikelihood> = (0..big_n).map(|t| lik[reverse_bits(t, self.n)]).collect();
        let mut u = [vec![0u8; big_n], vec![0u8; big_n]];
        let mut v = [vec![0u8; big_n], vec![0u8; big_n]];
        let mut known = [vec![false; n0], vec![false; n0]];
        let mut next_row = [0usize; 2];
        let mut conflict: Option<usize> = None;
        let mut factors = vec![UNIFORM; l];

        for (s, &sym) in self.base.iter().enumerate() {
            let j = sym as usize;
            let r = next_row[j];
            next_row[j] += 1;

            // Unknown entries of a column: (user, row) pairs not yet decided.
            let unknown: Vec<(usize, usize)> = (0..2)
                .flat_map(|jj| (0..n0).map(move |rr| (jj, rr)))
                .filter(|&(jj, rr)| !known[jj][rr] && !(jj == j && rr == r))
                .collect();
            let combos = 1usize << unknown.len();
            for (c, f) in factors.iter_mut().enumerate() {
                let mut base_cols = [0u64; 2];
                for (jj, cols) in base_cols.iter_mut().enumerate() {
                    for rr in 0..n0 {
                        if known[jj][rr] {
                            *cols |= (v[jj][rr * l + c] as u64) << rr;
                        }
                    }
                }
                let mut acc = [0.0f64; 2];
                for (bit, a) in acc.iter_mut().enumerate() {
                    let mut cols = base_cols;
                    cols[j] |= (bit as u64) << r;
                    for mask in 0..combos {
                        let mut cc = cols;
                        for (k, &(jj, rr)) in unknown.iter().enumerate() {
                            cc[jj] |= (((mask >> k) & 1) as u64) << rr;
                        }
                        let x1 = butterfly_word(cc[0], n0);
                        let x2 = butterfly_word(cc[1], n0);
                        let mut p = 1.0;
                        for rr in 0..n0 {
                            let li = &lik_e[rr * l + c];
                            p *= li[((x1 >> rr) & 1) as usize][((x2 >> rr) & 1) as usize];
                            if p == 0.0 {
                                break;
                            }
                        }
                        *a += p;
                    }
                }
                *f = match normalize(acc) {
                    Some(p) => p,
                    None => {
                        conflict.get_or_insert(s * l);
                        UNIFORM
                    }
                };
            }

            let row = &mut u[j][r * l..(r + 1) * l];
            let coded = self.inner.run(&factors, |c, p| {
                let slot = PathSlot {
                    position: s * l + c,
                    user: j + 1,
                    index: r * l + c,
                };
                let b = decide(slot, p) & 1;
                if p[b as usize] == 0.0 {
                    conflict.get_or_insert(slot.position);
                }
                row[c] = b;
                b
            });
            v[j][r * l..(r + 1) * l].copy_from_slice(&coded);
            known[j][r] = true;
        }
        (u, conflict)
    }
}

/// Likelihood table of the adder-erasure MAC for a whole observation. The
/// erasure probability only rescales every position uniformly, so it does
/// not affect posteriors.
pub fn adder_pair_likelihoods(y: &MacOutput) -> Vec<PairLikelihood> {
    y.0.iter().map(|&s| adder_likelihood(s, 0.5)).collect()
}

/// `P(S^k = 0 | y, s^{1:k-1})` along `path` for the adder-erasure MAC, where
/// `k = s_prefix.len()`. Inputs are uniform.
pub fn mac_sc_posterior(path: &MonotonePath, y: &MacOutput, s_prefix: &[u8]) -> Result<f64> {
    let big_n = path.block_len();
    if y.0.len() != big_n {
        return Err(Error::InvalidInput(format!(
            "observation length {} does not match path block length {big_n}",
            y.0.len()
        )));
    }
    if s_prefix.len() >= 2 * big_n {
        return Err(Error::InvalidInput(format!(
            "prefix length {} must be below {}",
            s_prefix.len(),
            2 * big_n
        )));
    }
    let mut engine = MacScEngine::new(path)?;
    let lik = adder_pair_likelihoods(y);
    let target = s_prefix.len();
    let mut answer = None;
    let mut impossible = None;
    engine.run(&lik, |slot, p| {
        let k = slot.position;
        if k < target {
            let b = s_prefix[k] & 1;
            if p[b as usize] == 0.0 && impossible.is_none() {
                impossible = Some(k);
            }
            b
        } else {
            if k == target {
                answer = Some(p[0]);
            }
            0
        }
    });
    if let Some(index) = impossible {
        return Err(Error::Contradiction { index });
    }
    Ok(answer.expect("target position visited"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::MacSymbol;
    use crate::construction::path::make_path;
    use crate::gf2_polar::{polar_transform, BinaryBlock};
    use crate::rng::{stream, Component};
    use rand::Rng;

    /// Exhaustive Bayes over all input pairs.
    fn brute_force(path: &MonotonePath, y: &MacOutput, prefix: &[u8]) -> Option<f64> {
        let big_n = path.block_len();
        let (f1, f2) = path.index_maps();
        let lik = adder_pair_likelihoods(y);
        let k = prefix.len();
        let mut mass = [0.0; 2];
        for a in 0..1usize << big_n {
            for b in 0..1usize << big_n {
                let u1: Vec<u8> = (0..big_n).map(|i| ((a >> i) & 1) as u8).collect();
                let u2: Vec<u8> = (0..big_n).map(|i| ((b >> i) & 1) as u8).collect();
                let mut s = vec![0u8; 2 * big_n];
                for i in 0..big_n {
                    s[f1[i]] = u1[i];
                    s[f2[i]] = u2[i];
                }
                if s[..k] != *prefix {
                    continue;
                }
                let x1 = polar_transform(&BinaryBlock::from_bits(&u1).unwrap());
                let x2 = polar_transform(&BinaryBlock::from_bits(&u2).unwrap());
                let p: f64 = (0..big_n)
                    .map(|i| lik[i][x1.get(i) as usize][x2.get(i) as usize])
                    .product();
                mass[s[k] as usize] += p;
            }
        }
        let total = mass[0] + mass[1];
        (total > 0.0).then(|| mass[0] / total)
    }

    fn random_path(n: u32, rng: &mut impl Rng) -> MonotonePath {
        use rand::seq::SliceRandom;
        let len = 1usize << n;
        let mut bits: Vec<u8> = (0..2 * len).map(|k| (k >= len) as u8).collect();
        bits.shuffle(rng);
        MonotonePath::new(bits).unwrap()
    }

    #[test]
    fn all_erased_is_uninformative() {
        let path = make_path(2, 2).unwrap();
        let y = MacOutput(vec![MacSymbol::Erased; 4]);
        let prefix = [1u8, 0, 1];
        assert_eq!(mac_sc_posterior(&path, &y, &prefix).unwrap(), 0.5);
    }

    #[test]
    fn single_use_sum_of_one() {
        let path: MonotonePath = "01".parse().unwrap();
        let y = MacOutput(vec![MacSymbol::Sum(1)]);
        assert_eq!(mac_sc_posterior(&path, &y, &[]).unwrap(), 0.5);
        // Once user 1's bit is known the sum reveals user 2's.
        assert_eq!(mac_sc_posterior(&path, &y, &[1]).unwrap(), 1.0);
    }

    #[test]
    fn matches_bayes_on_every_small_path() {
        let mut rng = stream(7, Component::MonteCarlo, 0);
        for n in 0..=2u32 {
            let big_n = 1usize << n;
            for _ in 0..30 {
                let path = random_path(n, &mut rng);
                // Sample a consistent observation, then a true prefix.
                let u1 = BinaryBlock::random(big_n, &mut rng).unwrap();
                let u2 = BinaryBlock::random(big_n, &mut rng).unwrap();
                let x1 = polar_transform(&u1);
                let x2 = polar_transform(&u2);
                let y = crate::channel::transmit_adder_mac(&x1, &x2, 0.3, &mut rng).unwrap();
                let (f1, f2) = path.index_maps();
                let mut s = vec![0u8; 2 * big_n];
                for i in 0..big_n {
                    s[f1[i]] = u1.get(i);
                    s[f2[i]] = u2.get(i);
                }
                for k in 0..2 * big_n {
                    let exact = brute_force(&path, &y, &s[..k]).unwrap();
                    let got = mac_sc_posterior(&path, &y, &s[..k]).unwrap();
                    assert!((exact - got).abs() < 1e-12, "path {path} k {k}: {exact} vs {got}");
                }
                // Random (possibly impossible) prefixes.
                let k = rng.random_range(0..2 * big_n);
                let prefix: Vec<u8> = (0..k).map(|_| rng.random_range(0..2)).collect();
                match (brute_force(&path, &y, &prefix), mac_sc_posterior(&path, &y, &prefix)) {
                    (Some(e), Ok(g)) => assert!((e - g).abs() < 1e-12),
                    (None, Err(Error::Contradiction { .. })) => {}
                    other => panic!("mismatch on path {path}: {other:?}"),
                }
            }
        }
    }

    #[test]
    fn long_base_is_unsupported() {
        // A path on N = 16 whose base does not shrink.
        let mut bits = vec![0u8; 32];
        for k in (1..32).step_by(2) {
            bits[k] = 1;
        }
        let p = MonotonePath::new(bits).unwrap();
        assert!(matches!(MacScEngine::new(&p), Err(Error::UnsupportedPath(_))));
    }
}
