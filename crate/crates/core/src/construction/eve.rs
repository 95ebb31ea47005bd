//! Eavesdropper profiles along a decoding path, plus Monte-Carlo profile
//! estimators for channels without a closed-form recursion.

use rand::Rng;
use rayon::prelude::*;

use crate::channel::{adder_likelihood, check_probability, transmit_adder_mac, BecSymbol, MacSymbol};
use crate::codec::mac::{adder_pair_likelihoods, MacScEngine};
use crate::codec::prefix::PrefixTable;
use crate::codec::sc::{bhattacharyya, to_engine_order, Prob, ScEngine};
use crate::construction::path::MonotonePath;
use crate::construction::profile::{bec_z_profile, ProfileKind, ReliabilityProfile};
use crate::error::{Error, Result};
use crate::gf2_polar::{polar_transform, BinaryBlock};
use crate::rng::{stream, Component, StreamRng};

/// Largest block length accepted by the exhaustive oracle.
pub const ORACLE_MAX_LEN: usize = 4;

const TRIALS_PER_CHUNK: u64 = 64;

/// Exact profiles of the two single-user channels a corner path splits
/// Eve's MAC into: `(first-decoded, second-decoded)`. The first-decoded
/// user sees the other as uniform noise, which is a BEC((1+ε)/2); the
/// second is decoded with the first known, a BEC(ε).
pub fn eve_corner_profiles(n: u32, epse: f64, first_user: usize) -> Result<(ReliabilityProfile, ReliabilityProfile)> {
    if first_user != 1 && first_user != 2 {
        return Err(Error::InvalidInput(format!("user must be 1 or 2, got {first_user}")));
    }
    check_probability("epse", epse)?;
    Ok((bec_z_profile(n, (1.0 + epse) / 2.0)?, bec_z_profile(n, epse)?))
}

/// Exact profile over the `2N` path positions for a corner path.
pub fn eve_path_profile(path: &MonotonePath, epse: f64) -> Result<ReliabilityProfile> {
    let first = path
        .corner_first_user()
        .ok_or_else(|| Error::UnsupportedPath(format!("{path} is not a corner path; use the Monte-Carlo estimator")))?;
    let (a, b) = eve_corner_profiles(path.log_len(), epse, first)?;
    let (f1, f2) = path.index_maps();
    let (first_map, second_map) = if first == 1 { (f1, f2) } else { (f2, f1) };
    let mut z = vec![0.0; 2 * path.block_len()];
    for (i, (&p, &q)) in first_map.iter().zip(&second_map).enumerate() {
        z[p] = a.z[i];
        z[q] = b.z[i];
    }
    Ok(ReliabilityProfile::exact(z))
}

/// Accumulates `Σz` and `Σz²` per position over fixed-size trial chunks;
/// chunks run in parallel and are summed in order, so results do not
/// depend on the thread count.
fn mc_profile<F>(len: usize, trials: u64, trial: F) -> Result<ReliabilityProfile>
where
    F: Fn(u64, &mut Vec<f64>) + Sync,
{
    if trials == 0 {
        return Err(Error::InvalidInput("Monte-Carlo needs at least one trial".into()));
    }
    let chunks = trials.div_ceil(TRIALS_PER_CHUNK);
    let partial: Vec<(Vec<f64>, Vec<f64>)> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut sum = vec![0.0; len];
            let mut sq = vec![0.0; len];
            let mut z = vec![0.0; len];
            let end = ((c + 1) * TRIALS_PER_CHUNK).min(trials);
            for t in c * TRIALS_PER_CHUNK..end {
                trial(t, &mut z);
                for k in 0..len {
                    sum[k] += z[k];
                    sq[k] += z[k] * z[k];
                }
            }
            (sum, sq)
        })
        .collect();
    let mut sum = vec![0.0; len];
    let mut sq = vec![0.0; len];
    for (s, q) in partial {
        for k in 0..len {
            sum[k] += s[k];
            sq[k] += q[k];
        }
    }
    let t = trials as f64;
    let mean: Vec<f64> = sum.iter().map(|s| (s / t).clamp(0.0, 1.0)).collect();
    let stderr = sq
        .iter()
        .zip(&mean)
        .map(|(q, m)| {
            if trials < 2 {
                0.0
            } else {
                ((q / t - m * m).max(0.0) * t / (t - 1.0) / t).sqrt()
            }
        })
        .collect();
    Ok(ReliabilityProfile {
        z: mean,
        kind: ProfileKind::MonteCarlo,
        stderr: Some(stderr),
        trials: Some(trials),
    })
}

fn sample_prefixed_symbols(c: &BinaryBlock, table: &PrefixTable, rng: &mut StreamRng) -> BinaryBlock {
    let mut x = c.clone();
    for j in 0..c.len() {
        let p1 = table.rows[c.get(j) as usize][1];
        x.set(j, (rng.random::<f64>() < p1) as u8);
    }
    x
}

/// Monte-Carlo estimate of `Z(S^k | Y_e, S^{1:k-1})` for every path
/// position `k`, using the exact joint SC posterior at the true prefix.
/// Trial `t` draws from stream `(seed, MonteCarlo, t)`.
pub fn mc_mac_profile(path: &MonotonePath, epse: f64, trials: u64, seed: u64) -> Result<ReliabilityProfile> {
    mc_mac_profile_with(path, epse, None, trials, seed)
}

/// As [`mc_mac_profile`], with optional prefix tables mapping each user's
/// polarized block `c_j` to its channel input.
pub fn mc_mac_profile_with(
    path: &MonotonePath,
    epse: f64,
    tables: Option<[PrefixTable; 2]>,
    trials: u64,
    seed: u64,
) -> Result<ReliabilityProfile> {
    check_probability("epse", epse)?;
    MacScEngine::new(path)?;
    let big_n = path.block_len();
    mc_profile(2 * big_n, trials, |t, z| {
        let mut rng = stream(seed, Component::MonteCarlo, t);
        let u1 = BinaryBlock::random(big_n, &mut rng).expect("power-of-two length");
        let u2 = BinaryBlock::random(big_n, &mut rng).expect("power-of-two length");
        let (c1, c2) = (polar_transform(&u1), polar_transform(&u2));
        let (x1, x2) = match &tables {
            Some([t1, t2]) => (
                sample_prefixed_symbols(&c1, t1, &mut rng),
                sample_prefixed_symbols(&c2, t2, &mut rng),
            ),
            None => (c1, c2),
        };
        let y = transmit_adder_mac(&x1, &x2, epse, &mut rng).expect("validated inputs");
        let mut lik = adder_pair_likelihoods(&y);
        if let Some([t1, t2]) = &tables {
            for l in lik.iter_mut() {
                *l = PrefixTable::compose_pair(t1, t2, *l);
            }
        }
        let mut engine = MacScEngine::new(path).expect("checked above");
        let truth = [&u1, &u2];
        engine.run(&lik, |slot, p| {
            z[slot.position] = bhattacharyya(p);
            truth[slot.user - 1].get(slot.index)
        });
    })
}

/// Genie-aided SC over one block: `sample` returns the true `u` and the
/// per-codeword-position factors; the profile is the mean Bhattacharyya
/// value of each posterior.
fn mc_genie_profile<S>(n: u32, trials: u64, seed: u64, sample: S) -> Result<ReliabilityProfile>
where
    S: Fn(&mut StreamRng) -> (BinaryBlock, Vec<Prob>) + Sync,
{
    let len = 1usize << n;
    mc_profile(len, trials, |t, z| {
        let mut rng = stream(seed, Component::MonteCarlo, t);
        let (u, factors) = sample(&mut rng);
        let mut engine = ScEngine::new(len);
        engine.run(&to_engine_order(&factors), |i, p| {
            z[i] = bhattacharyya(p);
            u.get(i)
        });
    })
}

/// `Z(C^i | C^{1:i-1}, Y)` of a legitimate link: uniform `c = u·G_N`,
/// `x` drawn through `table`, observed over a BEC(`eps`).
pub fn mc_legit_profile(n: u32, eps: f64, table: &PrefixTable, trials: u64, seed: u64) -> Result<ReliabilityProfile> {
    check_probability("eps", eps)?;
    let len = 1usize << n;
    mc_genie_profile(n, trials, seed, |rng| {
        let u = BinaryBlock::random(len, rng).expect("power-of-two length");
        let x = sample_prefixed_symbols(&polar_transform(&u), table, rng);
        let factors = (0..len)
            .map(|j| {
                let y = if rng.random::<f64>() < eps {
                    BecSymbol::Erased
                } else {
                    BecSymbol::Bit(x.get(j))
                };
                table.bec_factor(y)
            })
            .collect();
        (u, factors)
    })
}

/// `Z(V^i | V^{1:i-1}, C)` of the prefix channel, `x = v·G_N`. Its high
/// set is where the prefixing sampler draws uniform bits.
pub fn mc_prefix_profile(n: u32, table: &PrefixTable, trials: u64, seed: u64) -> Result<ReliabilityProfile> {
    let len = 1usize << n;
    mc_genie_profile(n, trials, seed, |rng| {
        let c = BinaryBlock::random(len, rng).expect("power-of-two length");
        let x = sample_prefixed_symbols(&c, table, rng);
        let factors = (0..len).map(|j| table.rows[c.get(j) as usize]).collect();
        (polar_transform(&x), factors)
    })
}

/// Exact `Z(S^k | Y_e, S^{1:k-1})` and `H(S^k | Y_e, S^{1:k-1})` (bits) by
/// enumeration of every input pair and output sequence.
#[derive(Debug, Clone, PartialEq)]
pub struct ExactMacProfile {
    pub z: Vec<f64>,
    pub entropy: Vec<f64>,
}

fn binary_entropy(p: f64) -> f64 {
    if p <= 0.0 || p >= 1.0 {
        0.0
    } else {
        -p * p.log2() - (1.0 - p) * (1.0 - p).log2()
    }
}

pub fn exact_mac_oracle(path: &MonotonePath, epse: f64) -> Result<ExactMacProfile> {
    check_probability("epse", epse)?;
    let big_n = path.block_len();
    if big_n > ORACLE_MAX_LEN {
        return Err(Error::TooLarge(format!(
            "exhaustive MAC enumeration supports N <= {ORACLE_MAX_LEN}, got {big_n}"
        )));
    }
    let slots = 2 * big_n;
    let (f1, f2) = path.index_maps();
    let prior = 1.0 / (1usize << slots) as f64;
    // joint[y][s] = P(y, s) with s packed so path position k is bit k.
    let outputs = 4usize.pow(big_n as u32);
    let mut joint = vec![vec![0.0f64; 1 << slots]; outputs];
    for a in 0..1usize << big_n {
        for b in 0..1usize << big_n {
            let u1: Vec<u8> = (0..big_n).map(|i| ((a >> i) & 1) as u8).collect();
            let u2: Vec<u8> = (0..big_n).map(|i| ((b >> i) & 1) as u8).collect();
            let x1 = polar_transform(&BinaryBlock::from_bits(&u1)?);
            let x2 = polar_transform(&BinaryBlock::from_bits(&u2)?);
            let mut s = 0usize;
            for i in 0..big_n {
                s |= (u1[i] as usize) << f1[i];
                s |= (u2[i] as usize) << f2[i];
            }
            for (yi, row) in joint.iter_mut().enumerate() {
                let mut p = prior;
                for j in 0..big_n {
                    let sym = MacSymbol::from_index((yi >> (2 * j)) & 3);
                    p *= adder_likelihood(sym, epse)[x1.get(j) as usize][x2.get(j) as usize];
                }
                row[s] += p;
            }
        }
    }
    let mut z = vec![0.0; slots];
    let mut entropy = vec![0.0; slots];
    for row in &joint {
        for k in 0..slots {
            let mut marg = vec![[0.0f64; 2]; 1 << k];
            for (s, &p) in row.iter().enumerate() {
                marg[s & ((1 << k) - 1)][(s >> k) & 1] += p;
            }
            for m in marg {
                let t = m[0] + m[1];
                z[k] += 2.0 * (m[0] * m[1]).sqrt();
                if t > 0.0 {
                    entropy[k] += t * binary_entropy(m[0] / t);
                }
            }
        }
    }
    Ok(ExactMacProfile { z, entropy })
}

/// Exact profile over all path positions for `N <= 4`.
pub fn exact_mac_profile_oracle(path: &MonotonePath, epse: f64) -> Result<ReliabilityProfile> {
    Ok(ReliabilityProfile::exact(exact_mac_oracle(path, epse)?.z))
}
