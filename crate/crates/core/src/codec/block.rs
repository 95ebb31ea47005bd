//! Per-block encoder and decoder.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::channel::{reduce_with_side_info, MacOutput};
use crate::codec::legit::legit_factors;
use crate::codec::prefix::{sample_prefixed, Prefixing};
use crate::codec::sc::ScEngine;
use crate::error::{Error, Result};
use crate::gf2_polar::{polar_transform, BinaryBlock, BitString};

/// What an index of `u` carries.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Role {
    /// Secret message bit.
    Message,
    /// Random bit whose value is chained into the next block.
    ChainSource,
    /// Plain random bit.
    Random,
    /// Takes the chained value (the seed in the first block).
    ChainSink,
    Frozen,
    /// Drawn from the source distribution given the preceding bits.
    Deterministic,
}

/// Assignment of roles to the `N` indices of one user's block, plus the
/// set of indices the legitimate receiver decodes by SC.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct UserLayout {
    pub roles: Vec<Role>,
    pub decoded: Vec<bool>,
}

impl UserLayout {
    pub fn new(roles: Vec<Role>, decoded: Vec<bool>) -> Result<Self> {
        if !roles.len().is_power_of_two() || roles.len() != decoded.len() {
            return Err(Error::InvalidInput(format!(
                "layout of length {} with {} decode flags",
                roles.len(),
                decoded.len()
            )));
        }
        let layout = Self { roles, decoded };
        let sources = layout.positions(&[Role::ChainSource]).len();
        let sinks = layout.positions(&[Role::ChainSink]).len();
        if sources != sinks {
            return Err(Error::InvalidInput(format!(
                "{sources} chain sources but {sinks} chain sinks"
            )));
        }
        Ok(layout)
    }

    pub fn len(&self) -> usize {
        self.roles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.roles.is_empty()
    }

    /// Ascending indices whose role is one of `roles`.
    pub fn positions(&self, roles: &[Role]) -> Vec<usize> {
        (0..self.len()).filter(|&i| roles.contains(&self.roles[i])).collect()
    }

    pub fn message_positions(&self) -> Vec<usize> {
        self.positions(&[Role::Message])
    }

    pub fn random_positions(&self) -> Vec<usize> {
        self.positions(&[Role::Random, Role::ChainSource])
    }

    pub fn chain_source_positions(&self) -> Vec<usize> {
        self.positions(&[Role::ChainSource])
    }

    pub fn chain_sink_positions(&self) -> Vec<usize> {
        self.positions(&[Role::ChainSink])
    }

    pub fn frozen_positions(&self) -> Vec<usize> {
        self.positions(&[Role::Frozen])
    }

    /// Deterministic indices the receiver cannot decode; conveyed out of band.
    pub fn det_payload_positions(&self) -> Vec<usize> {
        (0..self.len())
            .filter(|&i| self.roles[i] == Role::Deterministic && !self.decoded[i])
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EncoderInput {
    pub message: BitString,
    pub chain_in: BitString,
    pub random_fill: BitString,
    pub frozen: BitString,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EncodedBlock {
    pub u: BinaryBlock,
    pub x: BinaryBlock,
    pub det_payload: BitString,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DecodeResult {
    pub u_hat: BinaryBlock,
    pub message_hat: BitString,
    pub chain_out: BitString,
    /// First index whose supplied or decided value had zero posterior.
    pub contradiction: Option<usize>,
    /// Comparison with the transmitted block, when it was supplied.
    pub success: Option<bool>,
    pub first_error: Option<usize>,
}

impl DecodeResult {
    /// Records the genie comparison against the transmitted `u`.
    pub fn compare(&mut self, u_true: &BinaryBlock) {
        let first = (0..u_true.len()).find(|&i| u_true.get(i) != self.u_hat.get(i));
        self.first_error = first;
        self.success = Some(first.is_none());
    }
}

fn check_len(what: &str, got: usize, want: usize) -> Result<()> {
    if got != want {
        return Err(Error::InvalidInput(format!(
            "{what} has {got} bits, layout expects {want}"
        )));
    }
    Ok(())
}

/// Assembles `u` from the inputs, draws the deterministic bits, and forms
/// the transmitted block (`x = u·G_N` unless a prefix is given).
pub fn encode_block<R: Rng + ?Sized>(
    layout: &UserLayout,
    input: &EncoderInput,
    prefixing: Option<&Prefixing>,
    rng: &mut R,
) -> Result<EncodedBlock> {
    let len = layout.len();
    let msg = layout.message_positions();
    let rnd = layout.random_positions();
    let sink = layout.chain_sink_positions();
    let frz = layout.frozen_positions();
    check_len("message", input.message.len(), msg.len())?;
    check_len("random fill", input.random_fill.len(), rnd.len())?;
    check_len("chain input", input.chain_in.len(), sink.len())?;
    check_len("frozen", input.frozen.len(), frz.len())?;

    let mut u = BinaryBlock::zeros(len)?;
    for (positions, bits) in [
        (&msg, &input.message),
        (&rnd, &input.random_fill),
        (&sink, &input.chain_in),
        (&frz, &input.frozen),
    ] {
        for (&i, &b) in positions.iter().zip(bits.as_slice()) {
            u.set(i, b & 1);
        }
    }
    // Under uniform inputs P(u^i | u^{1:i-1}) = ½ for every i.
    for i in layout.positions(&[Role::Deterministic]) {
        u.set(i, rng.random_range(0..2u8));
    }
    let det_payload = BitString(layout.det_payload_positions().iter().map(|&i| u.get(i)).collect());
    let c = polar_transform(&u);
    let x = match prefixing {
        Some(p) if !p.table.is_identity() => sample_prefixed(&c, p, rng)?,
        _ => c,
    };
    Ok(EncodedBlock { u, x, det_payload })
}

/// SC decoding of one user's block from the MAC output seen by the other
/// user. `x_own` is the receiver's own transmitted block.
#[allow(clippy::too_many_arguments)]
pub fn decode_block(
    layout: &UserLayout,
    y: &MacOutput,
    x_own: &BinaryBlock,
    frozen: &BitString,
    chain_in: &BitString,
    det_payload: &BitString,
    prefixing: Option<&Prefixing>,
) -> Result<DecodeResult> {
    let len = layout.len();
    check_len("observation", y.0.len(), len)?;
    let frz = layout.frozen_positions();
    let sink = layout.chain_sink_positions();
    let det = layout.det_payload_positions();
    check_len("frozen", frozen.len(), frz.len())?;
    check_len("chain input", chain_in.len(), sink.len())?;
    check_len("deterministic payload", det_payload.len(), det.len())?;

    let reduced = reduce_with_side_info(y, x_own)?;
    let mut known: Vec<Option<u8>> = vec![None; len];
    for (positions, bits) in [(&frz, frozen), (&sink, chain_in), (&det, det_payload)] {
        for (&i, &b) in positions.iter().zip(bits.as_slice()) {
            known[i] = Some(b & 1);
        }
    }
    let table = prefixing.map(|p| &p.table).filter(|t| !t.is_identity());
    let factors = legit_factors(&reduced, table);
    let mut u_hat = BinaryBlock::zeros(len)?;
    let mut contradiction = None;
    let mut engine = ScEngine::new(len);
    engine.run(&factors, |i, p| {
        let b = if layout.decoded[i] {
            (p[1] > p[0]) as u8
        } else {
            known[i].unwrap_or((p[1] > p[0]) as u8)
        };
        if p[b as usize] == 0.0 && contradiction.is_none() {
            contradiction = Some(i);
        }
        u_hat.set(i, b);
        b
    });
    let pick = |positions: Vec<usize>| BitString(positions.into_iter().map(|i| u_hat.get(i)).collect());
    Ok(DecodeResult {
        message_hat: pick(layout.message_positions()),
        chain_out: pick(layout.chain_source_positions()),
        u_hat,
        contradiction,
        success: None,
        first_error: None,
    })
}
