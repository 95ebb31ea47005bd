//! GF(2) polar transform machinery.
//!
//! [`BinaryBlock`] is a packed bit vector whose length is a power of two.
//! [`polar_transform`] computes `x = u·G_N` with `G_N = B_N F^{⊗n}`: the
//! bit-reversal permutation followed by `n` butterfly stages of the kernel
//! `F = [[1,0],[1,1]]`. All indices are 0-based.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

const WORD_BITS: usize = 64;

// Lanes whose in-word index has bit `h` clear, for h = 1, 2, 4, ..., 32.
const LOW_LANES: [u64; 6] = [
    0x5555_5555_5555_5555,
    0x3333_3333_3333_3333,
    0x0F0F_0F0F_0F0F_0F0F,
    0x00FF_00FF_00FF_00FF,
    0x0000_FFFF_0000_FFFF,
    0x0000_0000_FFFF_FFFF,
];

/// Packed length-`2^n` bit vector.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BinaryBlock {
    words: Vec<u64>,
    len: usize,
}

impl BinaryBlock {
    pub fn zeros(len: usize) -> Result<Self> {
        if !len.is_power_of_two() {
            return Err(Error::InvalidInput(format!("block length {len} is not a power of two")));
        }
        Ok(Self {
            words: vec![0; len.div_ceil(WORD_BITS)],
            len,
        })
    }

    pub fn from_bits(bits: &[u8]) -> Result<Self> {
        let mut block = Self::zeros(bits.len())?;
        for (i, &b) in bits.iter().enumerate() {
            if b > 1 {
                return Err(Error::InvalidInput(format!("bit {i} has value {b}")));
            }
            block.set(i, b);
        }
        Ok(block)
    }

    pub fn random<R: Rng + ?Sized>(len: usize, rng: &mut R) -> Result<Self> {
        let mut block = Self::zeros(len)?;
        for w in block.words.iter_mut() {
            *w = rng.random();
        }
        block.clear_tail();
        Ok(block)
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// `n` such that `len = 2^n`.
    pub fn log_len(&self) -> u32 {
        self.len.trailing_zeros()
    }

    #[inline]
    pub fn get(&self, i: usize) -> u8 {
        debug_assert!(i < self.len);
        ((self.words[i / WORD_BITS] >> (i % WORD_BITS)) & 1) as u8
    }

    #[inline]
    pub fn set(&mut self, i: usize, bit: u8) {
        debug_assert!(i < self.len);
        let mask = 1u64 << (i % WORD_BITS);
        let w = &mut self.words[i / WORD_BITS];
        if bit & 1 == 1 {
            *w |= mask;
        } else {
            *w &= !mask;
        }
    }

    pub fn to_bits(&self) -> Vec<u8> {
        (0..self.len).map(|i| self.get(i)).collect()
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn xor(&self, other: &Self) -> Result<Self> {
        if self.len != other.len {
            return Err(Error::InvalidInput(format!(
                "length mismatch: {} vs {}",
                self.len, other.len
            )));
        }
        Ok(Self {
            words: self.words.iter().zip(&other.words).map(|(a, b)| a ^ b).collect(),
            len: self.len,
        })
    }

    fn clear_tail(&mut self) {
        let rem = self.len % WORD_BITS;
        if rem != 0 {
            if let Some(last) = self.words.last_mut() {
                *last &= (1u64 << rem) - 1;
            }
        }
    }
}

impl fmt::Display for BinaryBlock {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.len {
            f.write_str(if self.get(i) == 1 { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for BinaryBlock {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BinaryBlock({self})")
    }
}

impl FromStr for BinaryBlock {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::from_bits(&parse_bit_chars(s)?)
    }
}

impl Serialize for BinaryBlock {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for BinaryBlock {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Arbitrary-length bit string (messages, seeds, frozen values).
/// Serialized as a `"0110..."` string.
#[derive(Clone, Default, PartialEq, Eq, Hash)]
pub struct BitString(pub Vec<u8>);

impl BitString {
    pub fn random<R: Rng + ?Sized>(len: usize, rng: &mut R) -> Self {
        Self((0..len).map(|_| rng.random::<bool>() as u8).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[u8] {
        &self.0
    }

    /// First `len` bits of a hex string, most significant bit first.
    pub fn from_hex(hex_str: &str, len: usize) -> Result<Self> {
        let bytes = hex::decode(hex_str.trim()).map_err(|e| Error::InvalidInput(format!("bad hex seed: {e}")))?;
        if bytes.len() * 8 < len {
            return Err(Error::InvalidInput(format!(
                "hex seed has {} bits, need {len}",
                bytes.len() * 8
            )));
        }
        Ok(Self((0..len).map(|i| (bytes[i / 8] >> (7 - i % 8)) & 1).collect()))
    }
}

impl From<Vec<u8>> for BitString {
    fn from(v: Vec<u8>) -> Self {
        Self(v)
    }
}

impl fmt::Display for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.0 {
            f.write_str(if b == 1 { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitString({self})")
    }
}

impl FromStr for BitString {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(Self(parse_bit_chars(s)?))
    }
}

impl Serialize for BitString {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for BitString {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

fn parse_bit_chars(s: &str) -> Result<Vec<u8>> {
    s.chars()
        .map(|c| match c {
            '0' => Ok(0),
            '1' => Ok(1),
            other => Err(Error::InvalidInput(format!("invalid bit character {other:?}"))),
        })
        .collect()
}

#[inline]
pub fn reverse_bits(i: usize, n: u32) -> usize {
    if n == 0 {
        0
    } else {
        i.reverse_bits() >> (usize::BITS - n)
    }
}

/// `π(i)` = `i` with its `n`-bit binary representation reversed.
pub fn bit_reversal_permutation(n: u32) -> Vec<usize> {
    (0..1usize << n).map(|i| reverse_bits(i, n)).collect()
}

/// In-place `x ← x·F^{⊗n}` (no bit reversal).
pub(crate) fn butterfly_in_place(block: &mut BinaryBlock) {
    let len = block.len;
    let mut h = 1;
    while h < len {
        if h < WORD_BITS {
            let mask = LOW_LANES[h.trailing_zeros() as usize];
            for w in block.words.iter_mut() {
                *w ^= (*w >> h) & mask;
            }
        } else {
            let hw = h / WORD_BITS;
            for k in 0..block.words.len() {
                if k & hw == 0 {
                    block.words[k] ^= block.words[k + hw];
                }
            }
        }
        h <<= 1;
    }
}

pub fn bit_reverse(block: &BinaryBlock) -> BinaryBlock {
    let n = block.log_len();
    let mut out = BinaryBlock {
        words: vec![0; block.words.len()],
        len: block.len,
    };
    for i in 0..block.len {
        if block.get(i) == 1 {
            out.set(reverse_bits(i, n), 1);
        }
    }
    out
}

/// `x = u·G_N` over GF(2). The transform is an involution.
pub fn polar_transform(u: &BinaryBlock) -> BinaryBlock {
    let mut x = bit_reverse(u);
    butterfly_in_place(&mut x);
    x
}

/// `x·F^{⊗n}` for a vector of at most 64 bits packed LSB-first in a word.
pub(crate) fn butterfly_word(mut w: u64, len: usize) -> u64 {
    debug_assert!(len <= WORD_BITS && len.is_power_of_two());
    let mut h = 1;
    while h < len {
        w ^= (w >> h) & LOW_LANES[h.trailing_zeros() as usize];
        h <<= 1;
    }
    w
}

/// `x = u·F^{⊗n}` on an unpacked bit slice (length a power of two).
#[cfg(test)]
pub(crate) fn butterfly_bits(bits: &mut [u8]) {
    let len = bits.len();
    let mut h = 1;
    while h < len {
        for start in (0..len).step_by(2 * h) {
            for j in start..start + h {
                bits[j] ^= bits[j + h];
            }
        }
        h <<= 1;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn naive_transform(u: &[u8]) -> Vec<u8> {
        // Row vector times explicit G_N = B_N F^{⊗n}.
        let len = u.len();
        let n = len.trailing_zeros();
        let mut x = vec![0u8; len];
        for (i, &ui) in u.iter().enumerate() {
            if ui == 0 {
                continue;
            }
            let r = reverse_bits(i, n);
            // Row r of F^{⊗n}: entry (r, c) = 1 iff c ⊆ r bitwise.
            for (c, xc) in x.iter_mut().enumerate() {
                if c & r == c {
                    *xc ^= 1;
                }
            }
        }
        x
    }

    #[test]
    fn bit_reversal_examples() {
        assert_eq!(bit_reversal_permutation(0), vec![0]);
        assert_eq!(bit_reversal_permutation(1), vec![0, 1]);
        assert_eq!(bit_reversal_permutation(3), vec![0, 4, 2, 6, 1, 5, 3, 7]);
    }

    #[test]
    fn bit_reversal_is_involution() {
        for n in 0..12 {
            let p = bit_reversal_permutation(n);
            assert!(p.iter().enumerate().all(|(i, &j)| p[j] == i));
        }
    }

    #[test]
    fn transform_small_examples() {
        let u: BinaryBlock = "00".parse().unwrap();
        assert_eq!(polar_transform(&u).to_string(), "00");
        let u: BinaryBlock = "11".parse().unwrap();
        assert_eq!(polar_transform(&u).to_string(), "01");
        let u: BinaryBlock = "1".parse().unwrap();
        assert_eq!(polar_transform(&u).to_string(), "1");
    }

    #[test]
    fn transform_rejects_bad_length() {
        assert!(BinaryBlock::from_bits(&[0, 1, 1]).is_err());
        assert!("012".parse::<BinaryBlock>().is_err());
    }

    #[test]
    fn transform_matches_generator_matrix() {
        let mut rng = crate::rng::stream(1, crate::rng::Component::MonteCarlo, 0);
        for n in 0..9 {
            for _ in 0..5 {
                let u = BinaryBlock::random(1 << n, &mut rng).unwrap();
                assert_eq!(polar_transform(&u).to_bits(), naive_transform(&u.to_bits()));
            }
        }
    }

    #[test]
    fn involution_at_1024() {
        let mut rng = crate::rng::stream(2, crate::rng::Component::MonteCarlo, 0);
        let u = BinaryBlock::random(1024, &mut rng).unwrap();
        assert_eq!(polar_transform(&polar_transform(&u)), u);
    }

    #[test]
    fn packed_and_unpacked_butterflies_agree() {
        let mut rng = crate::rng::stream(3, crate::rng::Component::MonteCarlo, 0);
        for n in 0..11 {
            let mut u = BinaryBlock::random(1 << n, &mut rng).unwrap();
            let mut bits = u.to_bits();
            butterfly_in_place(&mut u);
            butterfly_bits(&mut bits);
            assert_eq!(u.to_bits(), bits);
        }
    }

    #[test]
    fn hex_seed_parsing() {
        assert_eq!(BitString::from_hex("a0", 4).unwrap().to_string(), "1010");
        assert!(BitString::from_hex("a0", 9).is_err());
        assert!(BitString::from_hex("zz", 1).is_err());
    }

    proptest! {
        #[test]
        fn involution(n in 0u32..15, seed in any::<u64>()) {
            let mut rng = crate::rng::stream(seed, crate::rng::Component::MonteCarlo, 0);
            let u = BinaryBlock::random(1 << n, &mut rng).unwrap();
            prop_assert_eq!(polar_transform(&polar_transform(&u)), u);
        }

        #[test]
        fn linearity(n in 0u32..12, seed in any::<u64>()) {
            let mut rng = crate::rng::stream(seed, crate::rng::Component::MonteCarlo, 1);
            let a = BinaryBlock::random(1 << n, &mut rng).unwrap();
            let b = BinaryBlock::random(1 << n, &mut rng).unwrap();
            let lhs = polar_transform(&a.xor(&b).unwrap());
            let rhs = polar_transform(&a).xor(&polar_transform(&b)).unwrap();
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn string_round_trip(n in 0u32..10, seed in any::<u64>()) {
            let mut rng = crate::rng::stream(seed, crate::rng::Component::MonteCarlo, 2);
            let a = BinaryBlock::random(1 << n, &mut rng).unwrap();
            let json = serde_json::to_string(&a).unwrap();
            prop_assert_eq!(serde_json::from_str::<BinaryBlock>(&json).unwrap(), a);
        }
    }
}
