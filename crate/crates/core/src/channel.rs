//! Erasure channel models.
//!
//! Every channel in the system is the binary adder-erasure MAC: the two
//! inputs are added as integers (`0 + 1 = 1`, `1 + 1 = 2`) and the sum is
//! erased with probability `eps`. A legitimate receiver knows its own input
//! and subtracts it, which leaves a point-to-point BEC.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::gf2_polar::BinaryBlock;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MacSymbol {
    Sum(u8),
    Erased,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BecSymbol {
    Bit(u8),
    Erased,
}

impl MacSymbol {
    fn to_char(self) -> char {
        match self {
            MacSymbol::Sum(0) => '0',
            MacSymbol::Sum(1) => '1',
            MacSymbol::Sum(_) => '2',
            MacSymbol::Erased => '?',
        }
    }

    /// Dense index in `0..4` (`3` = erased), used for enumeration.
    pub fn index(self) -> usize {
        match self {
            MacSymbol::Sum(s) => s as usize,
            MacSymbol::Erased => 3,
        }
    }

    pub fn from_index(i: usize) -> Self {
        match i {
            0..=2 => MacSymbol::Sum(i as u8),
            _ => MacSymbol::Erased,
        }
    }
}

impl BecSymbol {
    fn to_char(self) -> char {
        match self {
            BecSymbol::Bit(0) => '0',
            BecSymbol::Bit(_) => '1',
            BecSymbol::Erased => '?',
        }
    }
}

/// A sequence of MAC outputs, serialized as e.g. `"01?2"`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct MacOutput(pub Vec<MacSymbol>);

/// A sequence of BEC outputs, serialized as e.g. `"01?"`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct BecOutput(pub Vec<BecSymbol>);

macro_rules! symbol_string_serde {
    ($seq:ident, $sym:ident, $parse:expr) => {
        impl fmt::Display for $seq {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                let s: String = self.0.iter().map(|s| s.to_char()).collect();
                f.write_str(&s)
            }
        }

        impl FromStr for $seq {
            type Err = Error;
            fn from_str(s: &str) -> Result<Self> {
                let parse: fn(char) -> Option<$sym> = $parse;
                s.chars()
                    .map(|c| parse(c).ok_or_else(|| Error::InvalidInput(format!("invalid channel symbol {c:?}"))))
                    .collect::<Result<Vec<_>>>()
                    .map($seq)
            }
        }

        impl Serialize for $seq {
            fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
                s.collect_str(self)
            }
        }

        impl<'de> Deserialize<'de> for $seq {
            fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
                let s = String::deserialize(d)?;
                s.parse().map_err(serde::de::Error::custom)
            }
        }
    };
}

symbol_string_serde!(MacOutput, MacSymbol, |c| match c {
    '0' => Some(MacSymbol::Sum(0)),
    '1' => Some(MacSymbol::Sum(1)),
    '2' => Some(MacSymbol::Sum(2)),
    '?' => Some(MacSymbol::Erased),
    _ => None,
});

symbol_string_serde!(BecOutput, BecSymbol, |c| match c {
    '0' => Some(BecSymbol::Bit(0)),
    '1' => Some(BecSymbol::Bit(1)),
    '?' => Some(BecSymbol::Erased),
    _ => None,
});

/// Erasure probabilities of Bob's, Alice's and Eve's observations.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChannelParams {
    pub eps1: f64,
    pub eps2: f64,
    pub epse: f64,
}

impl ChannelParams {
    pub fn new(eps1: f64, eps2: f64, epse: f64) -> Result<Self> {
        let p = Self { eps1, eps2, epse };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("eps1", self.eps1), ("eps2", self.eps2), ("epse", self.epse)] {
            check_probability(name, v)?;
        }
        Ok(())
    }

    /// Erasure probability of the legitimate channel carrying `user`'s
    /// codeword (user 1 is received by Bob, user 2 by Alice).
    pub fn legit_eps(&self, user: usize) -> f64 {
        if user == 1 {
            self.eps1
        } else {
            self.eps2
        }
    }
}

pub(crate) fn check_probability(name: &str, v: f64) -> Result<()> {
    if (0.0..=1.0).contains(&v) {
        Ok(())
    } else {
        Err(Error::InvalidInput(format!("{name} = {v} is not in [0, 1]")))
    }
}

/// `P(y | x1, x2)` of the adder-erasure MAC, indexed `[x1][x2]`.
pub fn adder_likelihood(y: MacSymbol, eps: f64) -> [[f64; 2]; 2] {
    let mut l = [[0.0; 2]; 2];
    for (x1, row) in l.iter_mut().enumerate() {
        for (x2, v) in row.iter_mut().enumerate() {
            *v = match y {
                MacSymbol::Erased => eps,
                MacSymbol::Sum(s) if s as usize == x1 + x2 => 1.0 - eps,
                MacSymbol::Sum(_) => 0.0,
            };
        }
    }
    l
}

pub fn transmit_adder_mac<R: Rng + ?Sized>(
    x1: &BinaryBlock,
    x2: &BinaryBlock,
    eps: f64,
    rng: &mut R,
) -> Result<MacOutput> {
    if x1.len() != x2.len() {
        return Err(Error::InvalidInput(format!(
            "input length mismatch: {} vs {}",
            x1.len(),
            x2.len()
        )));
    }
    check_probability("eps", eps)?;
    Ok(MacOutput(
        (0..x1.len())
            .map(|i| {
                // eps = 0 and eps = 1 consume no randomness.
                let erased = eps >= 1.0 || (eps > 0.0 && rng.random::<f64>() < eps);
                if erased {
                    MacSymbol::Erased
                } else {
                    MacSymbol::Sum(x1.get(i) + x2.get(i))
                }
            })
            .collect(),
    ))
}

/// Removes the receiver's own input from each unerased sum.
pub fn reduce_with_side_info(y: &MacOutput, x_own: &BinaryBlock) -> Result<BecOutput> {
    if y.0.len() != x_own.len() {
        return Err(Error::InvalidInput(format!(
            "observation length {} does not match own block length {}",
            y.0.len(),
            x_own.len()
        )));
    }
    y.0.iter()
        .enumerate()
        .map(|(i, &s)| match s {
            MacSymbol::Erased => Ok(BecSymbol::Erased),
            MacSymbol::Sum(v) => {
                let own = x_own.get(i);
                match v.checked_sub(own) {
                    Some(d @ 0..=1) => Ok(BecSymbol::Bit(d)),
                    _ => Err(Error::CorruptedObservation {
                        index: i,
                        received: v,
                        own,
                    }),
                }
            }
        })
        .collect::<Result<Vec<_>>>()
        .map(BecOutput)
}

/// Single-use posterior `[P(bit = 0 | y), P(bit = 1 | y)]` of one user's
/// input at Eve, with the other user's bit either known or uniformly
/// unknown. Inputs are uniform. An observation that has zero probability
/// under the conditioning returns the uninformative `[½, ½]`.
pub fn single_use_eve_posteriors(y: MacSymbol, known_other: Option<u8>) -> [f64; 2] {
    // eps cancels in the normalisation; any value in (0, 1) works.
    let l = adder_likelihood(y, 0.5);
    let weight = |bit: usize| match known_other {
        Some(o) => l[bit][o as usize],
        None => 0.5 * (l[bit][0] + l[bit][1]),
    };
    let (w0, w1) = (weight(0), weight(1));
    let total = w0 + w1;
    if total == 0.0 {
        [0.5, 0.5]
    } else {
        [w0 / total, w1 / total]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::{stream, Component};

    fn block(s: &str) -> BinaryBlock {
        s.parse().unwrap()
    }

    #[test]
    fn mac_examples() {
        let mut rng = stream(0, Component::ChannelEve, 0);
        let y = transmit_adder_mac(&block("1"), &block("1"), 0.0, &mut rng).unwrap();
        assert_eq!(y.0, vec![MacSymbol::Sum(2)]);
        let y = transmit_adder_mac(&block("01"), &block("11"), 1.0, &mut rng).unwrap();
        assert_eq!(y.0, vec![MacSymbol::Erased, MacSymbol::Erased]);
        assert!(transmit_adder_mac(&block("01"), &block("1"), 0.5, &mut rng).is_err());
        assert!(transmit_adder_mac(&block("0"), &block("1"), 1.5, &mut rng).is_err());
    }

    #[test]
    fn mac_erasure_fraction() {
        let mut rng = stream(11, Component::ChannelEve, 0);
        let n = 1 << 20;
        let x1 = BinaryBlock::random(n, &mut rng).unwrap();
        let x2 = BinaryBlock::random(n, &mut rng).unwrap();
        let y = transmit_adder_mac(&x1, &x2, 0.4, &mut rng).unwrap();
        let erased = y.0.iter().filter(|s| **s == MacSymbol::Erased).count();
        let frac = erased as f64 / n as f64;
        assert!((frac - 0.4).abs() < 0.002, "erasure fraction {frac}");
    }

    #[test]
    fn noiseless_mac_is_invertible_given_either_input() {
        let mut rng = stream(5, Component::ChannelEve, 0);
        let x1 = BinaryBlock::random(256, &mut rng).unwrap();
        let x2 = BinaryBlock::random(256, &mut rng).unwrap();
        let y = transmit_adder_mac(&x1, &x2, 0.0, &mut rng).unwrap();
        let r2 = reduce_with_side_info(&y, &x1).unwrap();
        let r1 = reduce_with_side_info(&y, &x2).unwrap();
        for i in 0..256 {
            assert_eq!(r2.0[i], BecSymbol::Bit(x2.get(i)));
            assert_eq!(r1.0[i], BecSymbol::Bit(x1.get(i)));
        }
    }

    #[test]
    fn reduction_examples() {
        let y: MacOutput = "2".parse().unwrap();
        assert_eq!(reduce_with_side_info(&y, &block("1")).unwrap().to_string(), "1");
        let y: MacOutput = "?".parse().unwrap();
        assert_eq!(reduce_with_side_info(&y, &block("0")).unwrap().to_string(), "?");
        let y: MacOutput = "102?".parse().unwrap();
        assert_eq!(reduce_with_side_info(&y, &block("1011")).unwrap().to_string(), "001?");
    }

    #[test]
    fn reduction_flags_corruption() {
        let y: MacOutput = "2".parse().unwrap();
        assert_eq!(
            reduce_with_side_info(&y, &block("0")),
            Err(Error::CorruptedObservation {
                index: 0,
                received: 2,
                own: 0
            })
        );
        let y: MacOutput = "10".parse().unwrap();
        assert!(reduce_with_side_info(&y, &block("01")).is_err());
        assert!(reduce_with_side_info(&y, &block("1")).is_err());
    }

    #[test]
    fn posterior_examples() {
        assert_eq!(single_use_eve_posteriors(MacSymbol::Sum(0), None), [1.0, 0.0]);
        assert_eq!(single_use_eve_posteriors(MacSymbol::Sum(1), None), [0.5, 0.5]);
        assert_eq!(single_use_eve_posteriors(MacSymbol::Sum(2), None), [0.0, 1.0]);
        assert_eq!(single_use_eve_posteriors(MacSymbol::Sum(2), Some(1)), [0.0, 1.0]);
        assert_eq!(single_use_eve_posteriors(MacSymbol::Sum(1), Some(1)), [1.0, 0.0]);
        assert_eq!(single_use_eve_posteriors(MacSymbol::Erased, Some(0)), [0.5, 0.5]);
    }

    #[test]
    fn posteriors_sum_to_one() {
        for y in 0..4 {
            for known in [None, Some(0), Some(1)] {
                let p = single_use_eve_posteriors(MacSymbol::from_index(y), known);
                assert_eq!(p[0] + p[1], 1.0);
            }
        }
    }

    /// Brute-force single-use joint: with the other input unknown, the
    /// channel to one user is a BEC((1 + eps) / 2).
    #[test]
    fn unknown_other_input_is_bec_half_plus() {
        for &eps in &[0.0, 0.2, 0.4, 0.7, 1.0] {
            let mut uninformative = 0.0;
            let mut revealing = 0.0;
            for x1 in 0..2u8 {
                for x2 in 0..2u8 {
                    for yi in 0..4 {
                        let y = MacSymbol::from_index(yi);
                        let p = 0.25 * adder_likelihood(y, eps)[x1 as usize][x2 as usize];
                        if p == 0.0 {
                            continue;
                        }
                        let post = single_use_eve_posteriors(y, None);
                        if post == [0.5, 0.5] {
                            uninformative += p;
                        } else {
                            assert_eq!(post[x1 as usize], 1.0);
                            revealing += p;
                        }
                    }
                }
            }
            assert!((uninformative - (eps + (1.0 - eps) / 2.0)).abs() < 1e-15);
            assert!((uninformative - (1.0 + eps) / 2.0).abs() < 1e-15);
            assert!((revealing - (1.0 - eps) / 2.0).abs() < 1e-15);
        }
    }

    #[test]
    fn params_validation() {
        assert!(ChannelParams::new(0.2, 0.3, 0.4).is_ok());
        assert!(ChannelParams::new(-0.1, 0.3, 0.4).is_err());
        assert!(ChannelParams::new(0.2, 1.3, 0.4).is_err());
    }
}
