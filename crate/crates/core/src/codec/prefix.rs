//! Channel prefixing: `X` drawn from an auxiliary codeword `C` through a
//! memoryless table `P(x | c)`.
//!
//! The transmitted block is produced as a polar sample: `x = v·G_N` where
//! the bits of `v` are drawn successively from `P(v^i | v^{1:i-1}, c)`,
//! except positions in the high-entropy set, which take fresh uniform bits.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::channel::BecSymbol;
use crate::codec::sc::{to_engine_order, Prob, ScEngine};
use crate::error::{Error, Result};
use crate::gf2_polar::{reverse_bits, BinaryBlock};

/// Row `c` holds `[P(x=0 | c), P(x=1 | c)]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PrefixTable {
    pub rows: [[f64; 2]; 2],
}

impl PrefixTable {
    pub const IDENTITY: PrefixTable = PrefixTable {
        rows: [[1.0, 0.0], [0.0, 1.0]],
    };

    pub fn new(rows: [[f64; 2]; 2]) -> Result<Self> {
        for (c, row) in rows.iter().enumerate() {
            if row.iter().any(|&p| !(0.0..=1.0).contains(&p)) || (row[0] + row[1] - 1.0).abs() > 1e-12 {
                return Err(Error::InvalidInput(format!(
                    "prefix table row {c} is not a distribution: {row:?}"
                )));
            }
        }
        Ok(Self { rows })
    }

    /// Binary symmetric prefix flipping `c` with probability `q`.
    pub fn symmetric(q: f64) -> Result<Self> {
        Self::new([[1.0 - q, q], [q, 1.0 - q]])
    }

    pub fn is_identity(&self) -> bool {
        *self == Self::IDENTITY
    }

    /// `P(y | c)` up to a common factor, for an observed legitimate symbol.
    pub fn bec_factor(&self, y: BecSymbol) -> Prob {
        match y {
            BecSymbol::Bit(b) => [self.rows[0][b as usize], self.rows[1][b as usize]],
            BecSymbol::Erased => [1.0, 1.0],
        }
    }

    /// Collapses a pair likelihood `P(y | x1, x2)` to `P(y | c1, c2)`.
    pub fn compose_pair(t1: &Self, t2: &Self, lik: [[f64; 2]; 2]) -> [[f64; 2]; 2] {
        let mut out = [[0.0; 2]; 2];
        for (c1, row) in out.iter_mut().enumerate() {
            for (c2, v) in row.iter_mut().enumerate() {
                for x1 in 0..2 {
                    for x2 in 0..2 {
                        *v += t1.rows[c1][x1] * t2.rows[c2][x2] * lik[x1][x2];
                    }
                }
            }
        }
        out
    }
}

/// A prefix table together with the high-entropy index set of
/// `V | C` whose bits are filled uniformly.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Prefixing {
    pub table: PrefixTable,
    pub uniform_set: Vec<usize>,
}

/// Draws `x` given `c` through `table` by successive sampling of `v`.
pub fn sample_prefixed<R: Rng + ?Sized>(c: &BinaryBlock, prefixing: &Prefixing, rng: &mut R) -> Result<BinaryBlock> {
    let len = c.len();
    let n = c.log_len();
    let mut uniform = vec![false; len];
    for &i in &prefixing.uniform_set {
        if i >= len {
            return Err(Error::InvalidInput(format!("uniform-set index {i} out of range")));
        }
        uniform[i] = true;
    }
    let factors: Vec<Prob> = (0..len).map(|j| prefixing.table.rows[c.get(j) as usize]).collect();
    let mut engine = ScEngine::new(len);
    let coded = engine.run(&to_engine_order(&factors), |i, p| {
        let draw: f64 = rng.random();
        if uniform[i] {
            (draw < 0.5) as u8
        } else {
            (draw < p[1]) as u8
        }
    });
    let mut x = BinaryBlock::zeros(len)?;
    for (t, &b) in coded.iter().enumerate() {
        x.set(reverse_bits(t, n), b);
    }
    Ok(x)
}
