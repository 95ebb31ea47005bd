//! Chained multi-block sessions in both directions.
//!
//! Alice (user 1) and Bob (user 2) transmit simultaneously in every block.
//! Bob observes the MAC output over a BEC(ε1) and decodes Alice's block
//! using his own input; Alice does the same with ε2; Eve observes a third
//! independent output with εe. In the strong scheme the `Ib` bits of block
//! `k` become the `Rb` bits of block `k+1`, and block 1 takes a shared
//! secret seed. Decoders feed their own decoded `Ib` bits forward, so an
//! error propagates along the chain.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::channel::{transmit_adder_mac, MacOutput};
use crate::codec::block::{decode_block, encode_block, DecodeResult, EncodedBlock, EncoderInput};
use crate::construction::build::{construct, Construction, Scheme, DEFAULT_MC_TRIALS};
use crate::construction::partition::{rate_report, ConstructionParams, FrozenPolicy, IndexPartition, RateReport};
use crate::error::{Error, Result};
use crate::gf2_polar::BitString;
use crate::rng::{block_user_index, stream, Component};

/// Receiver-side corruption of one shared seed bit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeedFault {
    /// Whose seed (1 = Alice's, used by Bob to decode Alice).
    pub user: usize,
    pub bit: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SessionConfig {
    pub params: ConstructionParams,
    #[serde(default)]
    pub scheme: Scheme,
    pub m: usize,
    /// Hex seeds for Alice and Bob; missing seeds are drawn from the master stream.
    #[serde(default)]
    pub seeds_hex: [Option<String>; 2],
    pub master_seed: u64,
    #[serde(default)]
    pub frozen_policy: FrozenPolicy,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fault: Option<SeedFault>,
    /// Monte-Carlo trials for Eve's profile on non-corner paths.
    pub mc_trials: u64,
}

impl SessionConfig {
    pub fn new(params: ConstructionParams, m: usize, master_seed: u64) -> Self {
        Self {
            params,
            scheme: Scheme::Strong,
            m,
            seeds_hex: [None, None],
            master_seed,
            frozen_policy: FrozenPolicy::Reuse,
            fault: None,
            mc_trials: DEFAULT_MC_TRIALS,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.params.validate()?;
        if self.m == 0 {
            return Err(Error::InvalidInput("m must be at least 1".into()));
        }
        if let Some(f) = self.fault {
            if f.user != 1 && f.user != 2 {
                return Err(Error::InvalidInput(format!(
                    "fault user must be 1 or 2, got {}",
                    f.user
                )));
            }
        }
        Ok(())
    }
}

/// One user's side of one block.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct UserBlockRecord {
    pub input: EncoderInput,
    pub encoded: EncodedBlock,
    /// MAC output seen by this user's partner.
    pub received_by_partner: MacOutput,
    /// The partner's decode of this user's block.
    pub decode: DecodeResult,
    pub message_ok: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlockRecord {
    pub index: usize,
    pub users: [UserBlockRecord; 2],
    pub eve_output: MacOutput,
}

/// Bits exchanged outside the channel during the session.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RandomnessAccount {
    pub seed_bits: usize,
    pub frozen_bits: usize,
    pub det_bits: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Transcript {
    pub config: SessionConfig,
    pub seeds: [BitString; 2],
    pub rates: RateReport,
    pub randomness: RandomnessAccount,
    pub blocks: Vec<BlockRecord>,
    pub success: bool,
    /// First block (0-based) in which either decode failed.
    pub first_failure: Option<usize>,
    /// Every decoder's chain output equals the next block's chained input.
    pub chain_intact: bool,
}

impl Transcript {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("transcript serializes")
    }
}

fn resolve_seed(cfg: &SessionConfig, user: usize, len: usize) -> Result<BitString> {
    match &cfg.seeds_hex[user - 1] {
        Some(h) => BitString::from_hex(h, len),
        None => Ok(BitString::random(
            len,
            &mut stream(cfg.master_seed, Component::Seed, user as u64),
        )),
    }
}

/// Shared-randomness rates of `partition` under the session's `m` and
/// frozen-bit policy.
pub fn randomness_rate_report(cfg: &SessionConfig, partition: &impl IndexPartition) -> Result<RateReport> {
    rate_report(partition, &cfg.params.channel, cfg.m, cfg.frozen_policy)
}

/// Builds the construction and runs the session.
pub fn run_session(cfg: &SessionConfig) -> Result<Transcript> {
    cfg.validate()?;
    let c = construct(&cfg.params, cfg.scheme, cfg.m, cfg.mc_trials, cfg.master_seed)?;
    run_session_with(cfg, &c)
}

/// Runs the session on a prepared construction (reused across sessions).
pub fn run_session_with(cfg: &SessionConfig, c: &Construction) -> Result<Transcript> {
    cfg.validate()?;
    if c.params != cfg.params {
        return Err(Error::InvalidInput(
            "construction was built for different parameters".into(),
        ));
    }
    let partition = &c.partition;
    let layouts = [partition.layout(1), partition.layout(2)];
    let seeds = [
        resolve_seed(cfg, 1, partition.chained(1).len())?,
        resolve_seed(cfg, 2, partition.chained(2).len())?,
    ];
    let mut receiver_seeds = seeds.clone();
    if let Some(f) = cfg.fault {
        let s = &mut receiver_seeds[f.user - 1];
        if f.bit >= s.len() {
            return Err(Error::InvalidInput(format!(
                "fault bit {} outside seed of length {}",
                f.bit,
                s.len()
            )));
        }
        s.0[f.bit] ^= 1;
    }
    let master = cfg.master_seed;
    let ch = cfg.params.channel;
    let frozen_for = |user: usize, block: usize| {
        let len = layouts[user - 1].frozen_positions().len();
        let index = match cfg.frozen_policy {
            FrozenPolicy::Reuse => block_user_index(0, user),
            FrozenPolicy::Fresh => block_user_index(block, user),
        };
        BitString::random(len, &mut stream(master, Component::Frozen, index))
    };

    // Encoder-side and decoder-side chain states.
    let mut tx_chain = seeds.clone();
    let mut rx_chain = receiver_seeds;
    let mut blocks = Vec::with_capacity(cfg.m);
    let mut first_failure = None;
    let mut chain_intact = true;
    let mut frozen_bits = 0;
    let mut det_bits = 0;

    for k in 0..cfg.m {
        let mut inputs = Vec::with_capacity(2);
        let mut encoded = Vec::with_capacity(2);
        for user in 1..=2 {
            let layout = &layouts[user - 1];
            let idx = block_user_index(k, user);
            let input = EncoderInput {
                message: BitString::random(
                    layout.message_positions().len(),
                    &mut stream(master, Component::Message, idx),
                ),
                chain_in: tx_chain[user - 1].clone(),
                random_fill: BitString::random(
                    layout.random_positions().len(),
                    &mut stream(master, Component::RandomFill, idx),
                ),
                frozen: frozen_for(user, k),
            };
            let block = encode_block(layout, &input, None, &mut stream(master, Component::Deterministic, idx))?;
            if k == 0 || cfg.frozen_policy == FrozenPolicy::Fresh {
                frozen_bits += input.frozen.len();
            }
            det_bits += block.det_payload.len();
            inputs.push(input);
            encoded.push(block);
        }
        let (x1, x2) = (&encoded[0].x, &encoded[1].x);
        let kk = k as u64;
        let y_bob = transmit_adder_mac(x1, x2, ch.eps1, &mut stream(master, Component::ChannelBob, kk))?;
        let y_alice = transmit_adder_mac(x1, x2, ch.eps2, &mut stream(master, Component::ChannelAlice, kk))?;
        let y_eve = transmit_adder_mac(x1, x2, ch.epse, &mut stream(master, Component::ChannelEve, kk))?;

        // Bob decodes Alice's block with x2; Alice decodes Bob's with x1.
        let decode = |user: usize, y: &MacOutput, own: &crate::gf2_polar::BinaryBlock, chain: &BitString| {
            let mut d = decode_block(
                &layouts[user - 1],
                y,
                own,
                &inputs[user - 1].frozen,
                chain,
                &encoded[user - 1].det_payload,
                None,
            )?;
            d.compare(&encoded[user - 1].u);
            Ok::<_, Error>(d)
        };
        let (d1, d2) = rayon::join(
            || decode(1, &y_bob, x2, &rx_chain[0]),
            || decode(2, &y_alice, x1, &rx_chain[1]),
        );
        let decodes = [d1?, d2?];

        let failed = decodes.iter().any(|d| d.success != Some(true));
        if failed && first_failure.is_none() {
            first_failure = Some(k);
        }
        let ground_truth_out: Vec<BitString> = (0..2)
            .map(|j| {
                let u = &encoded[j].u;
                BitString(layouts[j].chain_source_positions().iter().map(|&i| u.get(i)).collect())
            })
            .collect();
        if k + 1 < cfg.m {
            for j in 0..2 {
                chain_intact &= decodes[j].chain_out == ground_truth_out[j];
            }
        }
        for j in 0..2 {
            tx_chain[j] = ground_truth_out[j].clone();
            rx_chain[j] = decodes[j].chain_out.clone();
        }

        let mut inputs = inputs.into_iter();
        let mut encoded = encoded.into_iter();
        let [d1, d2] = decodes;
        let record = |input: EncoderInput, enc: EncodedBlock, y: MacOutput, d: DecodeResult| UserBlockRecord {
            message_ok: d.message_hat == input.message,
            input,
            encoded: enc,
            received_by_partner: y,
            decode: d,
        };
        let r1 = record(inputs.next().unwrap(), encoded.next().unwrap(), y_bob, d1);
        let r2 = record(inputs.next().unwrap(), encoded.next().unwrap(), y_alice, d2);
        blocks.push(BlockRecord {
            index: k,
            users: [r1, r2],
            eve_output: y_eve,
        });
    }

    Ok(Transcript {
        config: cfg.clone(),
        rates: randomness_rate_report(cfg, partition)?,
        randomness: RandomnessAccount {
            seed_bits: seeds[0].len() + seeds[1].len(),
            frozen_bits,
            det_bits,
        },
        seeds,
        blocks,
        success: first_failure.is_none(),
        first_failure,
        chain_intact,
    })
}

/// Draws a fault position uniformly from a user's seed.
pub fn random_fault<R: Rng + ?Sized>(c: &Construction, user: usize, rng: &mut R) -> Result<SeedFault> {
    let len = c.partition.chained(user).len();
    if len == 0 {
        return Err(Error::InvalidInput(format!("user {user} has no seed bits to corrupt")));
    }
    Ok(SeedFault {
        user,
        bit: rng.random_range(0..len),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::ChannelParams;
    use crate::construction::path::make_path;

    fn config(n: u32, beta: f64, ch: (f64, f64, f64), m: usize, seed: u64) -> SessionConfig {
        let params = ConstructionParams::new(
            n,
            beta,
            ChannelParams::new(ch.0, ch.1, ch.2).unwrap(),
            make_path(1 << n, n).unwrap(),
        )
        .unwrap();
        SessionConfig::new(params, m, seed)
    }

    #[test]
    fn noiseless_single_block() {
        let cfg = config(8, 0.16, (0.0, 0.0, 0.4), 1, 3);
        let t = run_session(&cfg).unwrap();
        assert!(t.success);
        assert!(t.blocks[0].users.iter().all(|u| u.message_ok));
    }

    #[test]
    fn chain_links_blocks() {
        let cfg = config(12, 0.3, (0.5, 0.3, 0.6), 3, 5);
        let t = run_session(&cfg).unwrap();
        assert!(!t.seeds[0].is_empty() && !t.seeds[1].is_empty());
        assert_eq!(t.blocks[0].users[0].input.chain_in, t.seeds[0]);
        assert!(t.success && t.chain_intact);
        for k in 0..2 {
            for j in 0..2 {
                let next_in = &t.blocks[k + 1].users[j].input.chain_in;
                assert_eq!(&t.blocks[k].users[j].decode.chain_out, next_in);
            }
        }
        // Frozen bits are reused.
        assert_eq!(t.blocks[0].users[0].input.frozen, t.blocks[2].users[0].input.frozen);
    }

    #[test]
    fn replay_is_bit_identical() {
        let cfg = config(8, 0.2, (0.5, 0.3, 0.6), 2, 11);
        assert_eq!(
            run_session(&cfg).unwrap().to_json(),
            run_session(&cfg).unwrap().to_json()
        );
    }

    #[test]
    fn hex_seeds_are_used() {
        let mut cfg = config(10, 0.3, (0.5, 0.3, 0.6), 1, 1);
        cfg.seeds_hex = [Some("ffffffff".into()), Some("00000000".into())];
        let t = run_session(&cfg).unwrap();
        assert!(t.seeds[0].0.iter().all(|&b| b == 1));
        assert!(t.seeds[1].0.iter().all(|&b| b == 0));
    }

    #[test]
    fn fault_breaks_the_chain_receiver_side() {
        let mut cfg = config(10, 0.3, (0.5, 0.3, 0.6), 1, 2);
        cfg.fault = Some(SeedFault { user: 1, bit: 0 });
        let t = run_session(&cfg).unwrap();
        assert_ne!(t.blocks[0].users[0].decode.u_hat, t.blocks[0].users[0].encoded.u);
        assert!(!t.success);
        assert_eq!(t.first_failure, Some(0));
        cfg.fault = Some(SeedFault { user: 1, bit: 10_000 });
        assert!(run_session(&cfg).is_err());
    }

    #[test]
    fn rates_follow_policy() {
        let cfg = config(10, 0.2, (0.5, 0.3, 0.6), 2, 2);
        let c = construct(&cfg.params, cfg.scheme, cfg.m, 10, 0).unwrap();
        let reuse = randomness_rate_report(&cfg, &c.partition).unwrap();
        let mut fresh_cfg = cfg.clone();
        fresh_cfg.frozen_policy = FrozenPolicy::Fresh;
        let fresh = randomness_rate_report(&fresh_cfg, &c.partition).unwrap();
        assert_eq!(fresh.r_f, 2.0 * reuse.r_f);
        assert_eq!(reuse.r_d, 0.0);
        let t = run_session(&fresh_cfg).unwrap();
        assert_ne!(t.blocks[0].users[0].input.frozen, t.blocks[1].users[0].input.frozen);
    }
}
