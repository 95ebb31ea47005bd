//! Monotone chain-rule expansions of a two-user MAC.
//!
//! A path is a string `b ∈ {0,1}^{2N}` with exactly `N` zeros and `N` ones.
//! Reading it left to right gives the successive decoding order: a `0`
//! takes the next bit of user 1, a `1` the next bit of user 2.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct MonotonePath {
    bits: Vec<u8>,
}

impl MonotonePath {
    pub fn new(bits: Vec<u8>) -> Result<Self> {
        let total = bits.len();
        if total < 2 || total % 2 != 0 || !(total / 2).is_power_of_two() {
            return Err(Error::InvalidInput(format!(
                "path length {total} is not twice a power of two"
            )));
        }
        if bits.iter().any(|&b| b > 1) {
            return Err(Error::InvalidInput("path symbols must be 0 or 1".into()));
        }
        let ones = bits.iter().filter(|&&b| b == 1).count();
        if ones != total / 2 {
            return Err(Error::InvalidInput(format!(
                "path has {ones} ones, expected {}",
                total / 2
            )));
        }
        Ok(Self { bits })
    }

    /// Block length `N` of each user.
    pub fn block_len(&self) -> usize {
        self.bits.len() / 2
    }

    pub fn log_len(&self) -> u32 {
        self.block_len().trailing_zeros()
    }

    pub fn bits(&self) -> &[u8] {
        &self.bits
    }

    /// `Some(i)` when the path has the form `0^i 1^N 0^{N-i}`.
    pub fn corner_parameter(&self) -> Option<usize> {
        let n = self.block_len();
        let i = self.bits.iter().take_while(|&&b| b == 0).count().min(n);
        (make_path_bits(i, n) == self.bits).then_some(i)
    }

    /// Which user is decoded first when the path is a corner (`0^N 1^N` or
    /// `1^N 0^N`).
    pub fn corner_first_user(&self) -> Option<usize> {
        let n = self.block_len();
        match self.corner_parameter() {
            Some(i) if i == n => Some(1),
            Some(0) => Some(2),
            _ => None,
        }
    }

    /// Repeats every symbol `l` times.
    pub fn scale(&self, l: usize) -> Result<Self> {
        if !l.is_power_of_two() {
            return Err(Error::InvalidInput(format!("scale factor {l} is not a power of two")));
        }
        Self::new(self.bits.iter().flat_map(|&b| std::iter::repeat_n(b, l)).collect())
    }

    /// Largest `l` with `self = base.scale(l)`, together with `base`.
    pub fn decompose(&self) -> (usize, MonotonePath) {
        let mut l = self.block_len();
        loop {
            let aligned = self.bits.chunks(l).all(|chunk| chunk.iter().all(|&b| b == chunk[0]));
            if aligned {
                let base = self.bits.chunks(l).map(|c| c[0]).collect();
                return (l, MonotonePath { bits: base });
            }
            l /= 2;
        }
    }

    /// `(f1, f2)`: `f_j[i]` is the path position of user `j`'s bit `i`.
    pub fn index_maps(&self) -> (Vec<usize>, Vec<usize>) {
        let mut f1 = Vec::with_capacity(self.block_len());
        let mut f2 = Vec::with_capacity(self.block_len());
        for (k, &b) in self.bits.iter().enumerate() {
            if b == 0 {
                f1.push(k)
            } else {
                f2.push(k)
            }
        }
        (f1, f2)
    }

    /// The map of one user (1 or 2).
    pub fn index_map(&self, user: usize) -> Vec<usize> {
        let (f1, f2) = self.index_maps();
        if user == 1 {
            f1
        } else {
            f2
        }
    }
}

fn make_path_bits(i: usize, n: usize) -> Vec<u8> {
    let mut bits = vec![0u8; 2 * n];
    bits[i..i + n].fill(1);
    bits
}

/// The path `0^i 1^N 0^{N-i}` for `N = 2^n`.
pub fn make_path(i: usize, n: u32) -> Result<MonotonePath> {
    let len = 1usize << n;
    if i > len {
        return Err(Error::InvalidInput(format!("corner parameter {i} exceeds N = {len}")));
    }
    Ok(MonotonePath {
        bits: make_path_bits(i, len),
    })
}

pub fn scale_path(p: &MonotonePath, l: usize) -> Result<MonotonePath> {
    p.scale(l)
}

pub fn index_maps(p: &MonotonePath) -> (Vec<usize>, Vec<usize>) {
    p.index_maps()
}

impl fmt::Display for MonotonePath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: String = self.bits.iter().map(|&b| if b == 0 { '0' } else { '1' }).collect();
        f.write_str(&s)
    }
}

impl FromStr for MonotonePath {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bits = s
            .chars()
            .map(|c| match c {
                '0' => Ok(0),
                '1' => Ok(1),
                other => Err(Error::InvalidInput(format!("invalid path character {other:?}"))),
            })
            .collect::<Result<Vec<u8>>>()?;
        Self::new(bits)
    }
}

impl Serialize for MonotonePath {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for MonotonePath {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn corner_paths() {
        assert_eq!(make_path(0, 1).unwrap().to_string(), "1100");
        assert_eq!(make_path(2, 1).unwrap().to_string(), "0011");
        assert_eq!(make_path(1, 1).unwrap().to_string(), "0110");
        assert_eq!(make_path(4, 2).unwrap().to_string(), "00001111");
        assert!(make_path(3, 1).is_err());
        assert_eq!(make_path(2, 1).unwrap().corner_first_user(), Some(1));
        assert_eq!(make_path(0, 1).unwrap().corner_first_user(), Some(2));
        assert_eq!(make_path(1, 1).unwrap().corner_first_user(), None);
    }

    #[test]
    fn scaling_repeats_symbols() {
        let p: MonotonePath = "0110".parse().unwrap();
        assert_eq!(scale_path(&p, 2).unwrap().to_string(), "00111100");
        assert!(p.scale(3).is_err());
    }

    #[test]
    fn index_map_examples() {
        let p: MonotonePath = "0011".parse().unwrap();
        assert_eq!(p.index_maps(), (vec![0, 1], vec![2, 3]));
        let p: MonotonePath = "0110".parse().unwrap();
        assert_eq!(p.index_maps(), (vec![0, 3], vec![1, 2]));
        // "01" scaled by 2 is "0011": each map is dilated by the factor.
        let p: MonotonePath = "01".parse().unwrap();
        let (f1, f2) = p.scale(2).unwrap().index_maps();
        assert_eq!((f1, f2), (vec![0, 1], vec![2, 3]));
    }

    #[test]
    fn rejects_unbalanced_or_bad_length() {
        assert!("0111".parse::<MonotonePath>().is_err());
        assert!("010".parse::<MonotonePath>().is_err());
        assert!("010110".parse::<MonotonePath>().is_err());
        assert!("01x0".parse::<MonotonePath>().is_err());
    }

    #[test]
    fn decompose_finds_largest_factor() {
        let p: MonotonePath = "00111100".parse().unwrap();
        let (l, base) = p.decompose();
        assert_eq!((l, base.to_string()), (2, "0110".to_string()));
        let (l, base) = make_path(8, 3).unwrap().decompose();
        assert_eq!((l, base.to_string()), (8, "01".to_string()));
        let (l, _) = "0101".parse::<MonotonePath>().unwrap().decompose();
        assert_eq!(l, 1);
    }

    proptest! {
        #[test]
        fn maps_are_increasing_and_cover(n in 0u32..6, seed in any::<u64>()) {
            use rand::seq::SliceRandom;
            let len = 1usize << n;
            let mut bits: Vec<u8> = (0..2 * len).map(|k| (k >= len) as u8).collect();
            bits.shuffle(&mut crate::rng::stream(seed, crate::rng::Component::MonteCarlo, 0));
            let p = MonotonePath::new(bits).unwrap();
            let (f1, f2) = p.index_maps();
            prop_assert!(f1.windows(2).all(|w| w[0] < w[1]));
            prop_assert!(f2.windows(2).all(|w| w[0] < w[1]));
            let mut all: Vec<usize> = f1.iter().chain(f2.iter()).copied().collect();
            all.sort_unstable();
            prop_assert_eq!(all, (0..2 * len).collect::<Vec<_>>());
            let (l, base) = p.decompose();
            prop_assert_eq!(base.scale(l).unwrap(), p);
        }
    }
}
