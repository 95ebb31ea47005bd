//! Exact information leakage `I(M; Y_e | F)` by enumeration at `N ≤ 4`.
//!
//! Every random quantity of the scheme is enumerated: messages, random
//! fills, the shared seeds, the chained values and Eve's erasure
//! patterns. Chained blocks are handled by a forward recursion over the
//! chain state (the `Ib` bits that become the next block's `Rb` bits).

use std::collections::BTreeMap;

use crate::channel::MacSymbol;
use crate::codec::block::{Role, UserLayout};
use crate::construction::build::Construction;
use crate::construction::partition::{FrozenPolicy, IndexPartition};
use crate::error::{Error, Result};
use crate::gf2_polar::{butterfly_word, reverse_bits};

pub const LEAKAGE_MAX_N: u32 = 2;
pub const LEAKAGE_MAX_M: usize = 2;
/// Cap on message assignments enumerated for `H(Y | M, F)`.
const MAX_MESSAGE_CONFIGS: u64 = 1 << 16;

/// Transition of one block: for each incoming chain state, the map from
/// Eve's output (base-4 packed) to the weight of each outgoing state.
type BlockTable = Vec<BTreeMap<u32, Vec<f64>>>;

struct UserBits {
    message: Vec<usize>,
    free: Vec<usize>,
    sink: Vec<usize>,
    source: Vec<usize>,
    frozen: Vec<usize>,
}

impl UserBits {
    fn new(layout: &UserLayout) -> Self {
        Self {
            message: layout.positions(&[Role::Message]),
            free: layout.positions(&[Role::Random, Role::ChainSource, Role::Deterministic]),
            sink: layout.chain_sink_positions(),
            source: layout.chain_source_positions(),
            frozen: layout.frozen_positions(),
        }
    }
}

fn scatter(word: &mut u64, positions: &[usize], bits: u64) {
    for (k, &i) in positions.iter().enumerate() {
        *word |= ((bits >> k) & 1) << i;
    }
}

fn gather(word: u64, positions: &[usize]) -> u64 {
    positions
        .iter()
        .enumerate()
        .fold(0, |acc, (k, &i)| acc | (((word >> i) & 1) << k))
}

fn encode(u: u64, n: u32) -> u64 {
    let len = 1usize << n;
    let mut rev = 0u64;
    for i in 0..len {
        rev |= ((u >> i) & 1) << reverse_bits(i, n);
    }
    butterfly_word(rev, len)
}

struct Model {
    n: u32,
    epse: f64,
    users: [UserBits; 2],
}

impl Model {
    fn sink_bits(&self) -> usize {
        self.users[0].sink.len() + self.users[1].sink.len()
    }

    fn message_bits(&self) -> usize {
        self.users[0].message.len() + self.users[1].message.len()
    }

    fn frozen_bits(&self) -> usize {
        self.users[0].frozen.len() + self.users[1].frozen.len()
    }

    /// Block transition for frozen values `f` and, optionally, fixed
    /// messages `msg` (both users packed, user 1 in the low bits).
    fn table(&self, f: u64, msg: Option<u64>) -> BlockTable {
        let len = 1usize << self.n;
        let [a, b] = &self.users;
        let states = 1usize << self.sink_bits();
        let outs = 1usize << (a.source.len() + b.source.len());
        let m_bits = self.message_bits();
        let free_bits = a.free.len() + b.free.len() + if msg.is_none() { m_bits } else { 0 };
        let weight = 1.0 / (1u64 << free_bits) as f64;
        let mut table: BlockTable = vec![BTreeMap::new(); states];
        let f1 = f & ((1 << a.frozen.len()) - 1);
        let f2 = f >> a.frozen.len();
        for (c_in, row) in table.iter_mut().enumerate() {
            let c1 = c_in as u64 & ((1 << a.sink.len()) - 1);
            let c2 = c_in as u64 >> a.sink.len();
            for free in 0..1u64 << free_bits {
                let mut rest = free;
                let mut take = |k: usize| {
                    let v = rest & ((1 << k) - 1);
                    rest >>= k;
                    v
                };
                let (m1, m2) = match msg {
                    Some(mm) => (mm & ((1 << a.message.len()) - 1), mm >> a.message.len()),
                    None => (take(a.message.len()), take(b.message.len())),
                };
                let (r1, r2) = (take(a.free.len()), take(b.free.len()));
                let mut u1 = 0u64;
                let mut u2 = 0u64;
                for (u, bits, m, r, c, fz) in [(&mut u1, a, m1, r1, c1, f1), (&mut u2, b, m2, r2, c2, f2)] {
                    scatter(u, &bits.message, m);
                    scatter(u, &bits.free, r);
                    scatter(u, &bits.sink, c);
                    scatter(u, &bits.frozen, fz);
                }
                let c_out = (gather(u1, &a.source) | (gather(u2, &b.source) << a.source.len())) as usize;
                let (x1, x2) = (encode(u1, self.n), encode(u2, self.n));
                for erase in 0..1u32 << len {
                    let k = erase.count_ones() as i32;
                    let p = self.epse.powi(k) * (1.0 - self.epse).powi(len as i32 - k);
                    if p == 0.0 {
                        continue;
                    }
                    let mut y = 0u32;
                    for j in 0..len {
                        let sym = if (erase >> j) & 1 == 1 {
                            MacSymbol::Erased
                        } else {
                            MacSymbol::Sum((((x1 >> j) & 1) + ((x2 >> j) & 1)) as u8)
                        };
                        y |= (sym.index() as u32) << (2 * j);
                    }
                    row.entry(y).or_insert_with(|| vec![0.0; outs])[c_out] += weight * p;
                }
            }
        }
        table
    }
}

/// `H(Y_1..Y_m)` in bits for a chain of block tables started from a
/// uniform chain state.
fn chain_entropy(tables: &[&BlockTable]) -> f64 {
    let states = tables[0].len();
    let alpha = vec![1.0 / states as f64; states];
    let mut h = 0.0;
    recurse(tables, 0, &alpha, &mut h);
    h
}

fn recurse(tables: &[&BlockTable], k: usize, alpha: &[f64], h: &mut f64) {
    let table = tables[k];
    let mut next: BTreeMap<u32, Vec<f64>> = BTreeMap::new();
    for (c_in, &a) in alpha.iter().enumerate() {
        if a == 0.0 {
            continue;
        }
        for (&y, outs) in &table[c_in] {
            let acc = next.entry(y).or_insert_with(|| vec![0.0; outs.len()]);
            for (s, &w) in acc.iter_mut().zip(outs) {
                *s += a * w;
            }
        }
    }
    for beta in next.values() {
        if k + 1 == tables.len() {
            let p: f64 = beta.iter().sum();
            if p > 0.0 {
                *h -= p * p.log2();
            }
        } else {
            recurse(tables, k + 1, beta, h);
        }
    }
}

/// Exact `I(M^m; Y_e^m | F^m)` in bits for a partition over `m` blocks.
pub fn exact_leakage(partition: &impl IndexPartition, epse: f64, m: usize, policy: FrozenPolicy) -> Result<f64> {
    let len = partition.block_len();
    let n = len.trailing_zeros();
    if n > LEAKAGE_MAX_N || m > LEAKAGE_MAX_M || m == 0 {
        return Err(Error::TooLarge(format!(
            "exact leakage supports N <= {} and 1 <= m <= {LEAKAGE_MAX_M}, got N = {len}, m = {m}",
            1 << LEAKAGE_MAX_N
        )));
    }
    let model = Model {
        n,
        epse,
        users: [UserBits::new(&partition.layout(1)), UserBits::new(&partition.layout(2))],
    };
    let m_bits = model.message_bits();
    let msg_configs = 1u64 << (m_bits * m);
    if msg_configs > MAX_MESSAGE_CONFIGS {
        return Err(Error::TooLarge(format!("{} message bits over {m} blocks", m_bits)));
    }
    let f_bits = model.frozen_bits();
    let f_values = 1u64 << f_bits;
    let f_configs: Vec<Vec<u64>> = match policy {
        FrozenPolicy::Reuse => (0..f_values).map(|f| vec![f; m]).collect(),
        FrozenPolicy::Fresh => (0..f_values.pow(m as u32))
            .map(|mut v| {
                (0..m)
                    .map(|_| {
                        let f = v % f_values;
                        v /= f_values;
                        f
                    })
                    .collect()
            })
            .collect(),
    };
    let mut unconditioned: BTreeMap<u64, BlockTable> = BTreeMap::new();
    let mut total = 0.0;
    for fs in &f_configs {
        for &f in fs {
            unconditioned.entry(f).or_insert_with(|| model.table(f, None));
        }
        let tables: Vec<&BlockTable> = fs.iter().map(|f| &unconditioned[f]).collect();
        let h_y = chain_entropy(&tables);

        let mut fixed: BTreeMap<(u64, u64), BlockTable> = BTreeMap::new();
        let mut h_y_given_m = 0.0;
        for mm in 0..msg_configs {
            let per_block: Vec<u64> = (0..m).map(|k| (mm >> (k * m_bits)) & ((1 << m_bits) - 1)).collect();
            for (k, &f) in fs.iter().enumerate() {
                fixed
                    .entry((f, per_block[k]))
                    .or_insert_with(|| model.table(f, Some(per_block[k])));
            }
            let tables: Vec<&BlockTable> = fs.iter().zip(&per_block).map(|(&f, &b)| &fixed[&(f, b)]).collect();
            h_y_given_m += chain_entropy(&tables);
        }
        total += h_y - h_y_given_m / msg_configs as f64;
    }
    Ok((total / f_configs.len() as f64).max(0.0))
}

/// [`exact_leakage`] for a construction, with its own `m` and Eve channel.
pub fn exact_leakage_oracle(c: &Construction, policy: FrozenPolicy) -> Result<f64> {
    exact_leakage(&c.partition, c.params.channel.epse, c.m, policy)
}
