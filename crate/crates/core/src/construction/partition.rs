//! Index partitions of each user's block and the resulting rates.
//!
//! Under uniform inputs with identity prefixing the source high set `H_C`
//! is all of `[N]`, so the deterministic set `D` is empty. A source
//! profile may be supplied to exercise the general set algebra.

use serde::{Deserialize, Serialize};

use crate::channel::ChannelParams;
use crate::codec::block::{Role, UserLayout};
use crate::construction::path::MonotonePath;
use crate::construction::profile::{classify_sets, delta_threshold, mask, ReliabilityProfile};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConstructionParams {
    pub n: u32,
    pub beta: f64,
    pub channel: ChannelParams,
    pub path: MonotonePath,
}

impl ConstructionParams {
    pub fn new(n: u32, beta: f64, channel: ChannelParams, path: MonotonePath) -> Result<Self> {
        let p = Self { n, beta, channel, path };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        self.channel.validate()?;
        delta_threshold(self.n, self.beta)?;
        if self.path.log_len() != self.n {
            return Err(Error::InvalidInput(format!(
                "path has block length {} but n = {}",
                self.path.block_len(),
                self.n
            )));
        }
        Ok(())
    }

    pub fn block_len(&self) -> usize {
        1 << self.n
    }

    pub fn delta(&self) -> f64 {
        delta_threshold(self.n, self.beta).expect("validated")
    }
}

/// Profiles a partition is built from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProfileSet {
    /// `Z(C_j^i | C_j^{1:i-1}, Y_j, X_other)` per user.
    pub legit: [ReliabilityProfile; 2],
    /// `Z(S^k | Y_e, S^{1:k-1})` over the `2N` path positions.
    pub eve: ReliabilityProfile,
    /// `Z(C_j^i | C_j^{1:i-1})`; `None` means uniform inputs (`H_C = [N]`).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub source: Option<[ReliabilityProfile; 2]>,
}

impl ProfileSet {
    fn check(&self, params: &ConstructionParams) -> Result<()> {
        let len = params.block_len();
        let bad = self.legit.iter().any(|p| p.len() != len)
            || self.eve.len() != 2 * len
            || self.source.as_ref().is_some_and(|s| s.iter().any(|p| p.len() != len));
        if bad {
            return Err(Error::InvalidInput(format!(
                "profile lengths do not match N = {len} (legit N, eve 2N)"
            )));
        }
        Ok(())
    }

    /// Eve's values for `user`'s indices, in index order.
    pub fn eve_for(&self, path: &MonotonePath, user: usize) -> ReliabilityProfile {
        self.eve.select(&path.index_map(user))
    }
}

/// Polarized sets of one user that every partition is built from.
#[derive(Debug, Clone, PartialEq, Eq)]
struct UserSetBasis {
    source_high: Vec<bool>,
    legit_low: Vec<bool>,
    eve_high: Vec<bool>,
    eve_low: Vec<bool>,
}

fn basis(params: &ConstructionParams, profiles: &ProfileSet, user: usize) -> Result<UserSetBasis> {
    profiles.check(params)?;
    let len = params.block_len();
    let delta = params.delta();
    let legit = classify_sets(&profiles.legit[user - 1], delta)?;
    let eve = classify_sets(&profiles.eve_for(&params.path, user), delta)?;
    let source_high = match &profiles.source {
        Some(s) => classify_sets(&s[user - 1], delta)?.high_mask(len),
        None => vec![true; len],
    };
    Ok(UserSetBasis {
        source_high,
        legit_low: legit.low_mask(len),
        eve_high: eve.high_mask(len),
        eve_low: eve.low_mask(len),
    })
}

fn select(len: usize, pred: impl Fn(usize) -> bool) -> Vec<usize> {
    (0..len).filter(|&i| pred(i)).collect()
}

/// Sets of one user in the strong-secrecy scheme.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StrongUserSets {
    /// `I = Ia ∪ Ib`
    pub i: Vec<usize>,
    pub ia: Vec<usize>,
    pub ib: Vec<usize>,
    pub f: Vec<usize>,
    pub ra: Vec<usize>,
    pub rb: Vec<usize>,
    pub d: Vec<usize>,
    /// Legitimate low set `L`, decoded by SC.
    pub decoded: Vec<usize>,
}

/// Strong-scheme sets before the feasibility check (`Ib` not chosen).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StrongSets {
    pub block_len: usize,
    pub users: [StrongUserSets; 2],
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StrongPartition {
    pub block_len: usize,
    pub users: [StrongUserSets; 2],
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WeakUserSets {
    pub i: Vec<usize>,
    pub f: Vec<usize>,
    pub r: Vec<usize>,
    pub d: Vec<usize>,
    pub decoded: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WeakPartition {
    pub block_len: usize,
    pub users: [WeakUserSets; 2],
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FrozenPolicy {
    /// The same frozen bits in every block.
    #[default]
    Reuse,
    /// New frozen bits per block.
    Fresh,
}

/// Analytic secrecy region of the adder-erasure two-way channel with
/// uniform inputs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RegionCaps {
    pub r1: f64,
    pub r2: f64,
    pub sum: f64,
}

pub fn region_caps(ch: &ChannelParams) -> RegionCaps {
    let c_sum = 1.5 * (1.0 - ch.epse);
    let single = 1.0 - ch.epse;
    RegionCaps {
        r1: (1.0 - ch.eps1) - (c_sum - single),
        r2: (1.0 - ch.eps2) - (c_sum - single),
        sum: (1.0 - ch.eps1) + (1.0 - ch.eps2) - c_sum,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RateReport {
    pub r1: f64,
    pub r2: f64,
    pub sum_rate: f64,
    pub r_seed: f64,
    pub r_f: f64,
    pub r_d: f64,
    pub m: usize,
    pub frozen_policy: FrozenPolicy,
    pub caps: RegionCaps,
}

/// Common view of strong and weak partitions used by the codec, the
/// session runner and the bounds.
pub trait IndexPartition {
    fn block_len(&self) -> usize;
    /// Role assignment and SC decode set of `user` (1 or 2).
    fn layout(&self, user: usize) -> UserLayout;
    /// Indices whose Eve-side entropy enters the leakage bound (`I ∪ F`).
    fn protected(&self, user: usize) -> Vec<usize>;
    fn decoded(&self, user: usize) -> Vec<usize>;
    fn frozen(&self, user: usize) -> Vec<usize>;
    fn chained(&self, user: usize) -> Vec<usize>;
    fn deterministic(&self, user: usize) -> Vec<usize>;
    /// Message bits per block.
    fn message_len(&self, user: usize) -> usize;
}

fn union(a: &[usize], b: &[usize]) -> Vec<usize> {
    let mut v: Vec<usize> = a.iter().chain(b).copied().collect();
    v.sort_unstable();
    v
}

impl StrongSets {
    /// Unchained raw sets (`Ib` empty, `Rb` not) fill `Rb` with fresh
    /// randomness.
    fn layout(&self, user: usize) -> UserLayout {
        let s = &self.users[user - 1];
        let sink = if s.ib.len() == s.rb.len() {
            Role::ChainSink
        } else {
            Role::Random
        };
        let mut roles = vec![Role::Deterministic; self.block_len];
        for (set, role) in [
            (&s.ia, Role::Message),
            (&s.ib, Role::ChainSource),
            (&s.ra, Role::Random),
            (&s.rb, sink),
            (&s.f, Role::Frozen),
        ] {
            for &i in set {
                roles[i] = role;
            }
        }
        UserLayout::new(roles, mask(&s.decoded, self.block_len)).expect("consistent partition")
    }
}

macro_rules! strong_partition_view {
    ($t:ty) => {
        impl IndexPartition for $t {
            fn block_len(&self) -> usize {
                self.block_len
            }
            fn layout(&self, user: usize) -> UserLayout {
                StrongSets {
                    block_len: self.block_len,
                    users: self.users.clone(),
                }
                .layout(user)
            }
            fn protected(&self, user: usize) -> Vec<usize> {
                let s = &self.users[user - 1];
                union(&s.i, &s.f)
            }
            fn decoded(&self, user: usize) -> Vec<usize> {
                self.users[user - 1].decoded.clone()
            }
            fn frozen(&self, user: usize) -> Vec<usize> {
                self.users[user - 1].f.clone()
            }
            fn chained(&self, user: usize) -> Vec<usize> {
                self.users[user - 1].rb.clone()
            }
            fn deterministic(&self, user: usize) -> Vec<usize> {
                self.users[user - 1].d.clone()
            }
            fn message_len(&self, user: usize) -> usize {
                self.users[user - 1].ia.len()
            }
        }
    };
}

strong_partition_view!(StrongPartition);
strong_partition_view!(StrongSets);

impl IndexPartition for WeakPartition {
    fn block_len(&self) -> usize {
        self.block_len
    }
    fn layout(&self, user: usize) -> UserLayout {
        let s = &self.users[user - 1];
        let mut roles = vec![Role::Deterministic; self.block_len];
        for (set, role) in [(&s.i, Role::Message), (&s.r, Role::Random), (&s.f, Role::Frozen)] {
            for &i in set {
                roles[i] = role;
            }
        }
        UserLayout::new(roles, mask(&s.decoded, self.block_len)).expect("consistent partition")
    }
    fn protected(&self, user: usize) -> Vec<usize> {
        let s = &self.users[user - 1];
        union(&s.i, &s.f)
    }
    fn decoded(&self, user: usize) -> Vec<usize> {
        self.users[user - 1].decoded.clone()
    }
    fn frozen(&self, user: usize) -> Vec<usize> {
        self.users[user - 1].f.clone()
    }
    fn chained(&self, _user: usize) -> Vec<usize> {
        Vec::new()
    }
    fn deterministic(&self, user: usize) -> Vec<usize> {
        self.users[user - 1].d.clone()
    }
    fn message_len(&self, user: usize) -> usize {
        self.users[user - 1].i.len()
    }
}

/// Strong-scheme set algebra without the positive-rate requirement.
pub fn strong_sets(params: &ConstructionParams, profiles: &ProfileSet) -> Result<StrongSets> {
    params.validate()?;
    let len = params.block_len();
    let mut users = Vec::with_capacity(2);
    for user in 1..=2 {
        let b = basis(params, profiles, user)?;
        let h = |i: usize| b.source_high[i];
        let l = |i: usize| b.legit_low[i];
        let e = |i: usize| b.eve_high[i];
        let i_set = select(len, |i| h(i) && l(i) && e(i));
        users.push(StrongUserSets {
            ia: i_set.clone(),
            i: i_set,
            ib: Vec::new(),
            f: select(len, |i| h(i) && !l(i) && e(i)),
            ra: select(len, |i| h(i) && l(i) && !e(i)),
            rb: select(len, |i| h(i) && !l(i) && !e(i)),
            d: select(len, |i| !h(i)),
            decoded: select(len, l),
        });
    }
    let users: [StrongUserSets; 2] = users.try_into().expect("two users");
    Ok(StrongSets { block_len: len, users })
}

/// Builds the strong-secrecy partition. `Ib` takes the `|Rb|` indices of
/// `I` with the smallest legitimate `Z` (ties to the lower index).
pub fn build_strong_partition(
    params: &ConstructionParams,
    profiles: &ProfileSet,
    m: usize,
) -> Result<(StrongPartition, RateReport)> {
    let sets = strong_sets(params, profiles)?;
    let mut users = sets.users.clone();
    for (k, s) in users.iter_mut().enumerate() {
        if s.i.len() < s.rb.len() {
            return Err(Error::NegativeSecrecyRate {
                user: k + 1,
                info: s.i.len(),
                chained: s.rb.len(),
            });
        }
        let z = &profiles.legit[k].z;
        let mut ranked = s.i.clone();
        ranked.sort_by(|&a, &b| z[a].total_cmp(&z[b]).then(a.cmp(&b)));
        let mut ib: Vec<usize> = ranked[..s.rb.len()].to_vec();
        ib.sort_unstable();
        s.ia = s.i.iter().copied().filter(|i| ib.binary_search(i).is_err()).collect();
        s.ib = ib;
    }
    let partition = StrongPartition {
        block_len: sets.block_len,
        users,
    };
    check_cover(&partition)?;
    let report = rate_report(&partition, &params.channel, m, FrozenPolicy::Reuse)?;
    Ok((partition, report))
}

/// Builds the weak-secrecy partition; requires Eve's low sets to lie
/// inside the legitimate ones.
pub fn build_weak_partition(params: &ConstructionParams, profiles: &ProfileSet) -> Result<(WeakPartition, RateReport)> {
    params.validate()?;
    let len = params.block_len();
    let mut users = Vec::with_capacity(2);
    for user in 1..=2 {
        let b = basis(params, profiles, user)?;
        let violations = select(len, |i| b.eve_low[i] && !b.legit_low[i]);
        if !violations.is_empty() {
            return Err(Error::NotDegraded {
                user,
                indices: violations,
            });
        }
        let h = |i: usize| b.source_high[i];
        let l = |i: usize| b.legit_low[i];
        let le = |i: usize| b.eve_low[i];
        users.push(WeakUserSets {
            i: select(len, |i| h(i) && l(i) && !le(i)),
            f: select(len, |i| h(i) && !l(i) && !le(i)),
            r: select(len, |i| h(i) && l(i) && le(i)),
            d: select(len, |i| !h(i)),
            decoded: select(len, l),
        });
    }
    let partition = WeakPartition {
        block_len: len,
        users: users.try_into().expect("two users"),
    };
    check_cover(&partition)?;
    let report = rate_report(&partition, &params.channel, 1, FrozenPolicy::Reuse)?;
    Ok((partition, report))
}

/// Asserts that the role assignment of each user covers `[N]` exactly once.
fn check_cover(p: &impl IndexPartition) -> Result<()> {
    for user in 1..=2 {
        let layout = p.layout(user);
        let mut seen = vec![0u8; p.block_len()];
        let all = [
            layout.positions(&[Role::Message]),
            layout.positions(&[Role::ChainSource]),
            layout.positions(&[Role::Random]),
            layout.positions(&[Role::ChainSink]),
            layout.positions(&[Role::Frozen]),
            layout.positions(&[Role::Deterministic]),
        ];
        for i in all.iter().flatten() {
            seen[*i] += 1;
        }
        if seen.iter().any(|&c| c != 1) {
            return Err(Error::InvalidInput(format!(
                "partition of user {user} does not cover [N]"
            )));
        }
    }
    Ok(())
}

/// Secrecy and shared-randomness rates of a partition used over `m` blocks.
pub fn rate_report(
    p: &impl IndexPartition,
    channel: &ChannelParams,
    m: usize,
    policy: FrozenPolicy,
) -> Result<RateReport> {
    if m == 0 {
        return Err(Error::InvalidInput("m must be at least 1".into()));
    }
    let n = p.block_len() as f64;
    let r = |user: usize| p.message_len(user) as f64 / n;
    let seed = (p.chained(1).len() + p.chained(2).len()) as f64;
    let frozen = (p.frozen(1).len() + p.frozen(2).len()) as f64;
    let det_unknown = |user: usize| {
        let decoded = p.decoded(user);
        p.deterministic(user)
            .iter()
            .filter(|i| decoded.binary_search(i).is_err())
            .count()
    };
    let (r1, r2) = (r(1), r(2));
    Ok(RateReport {
        r1,
        r2,
        sum_rate: r1 + r2,
        r_seed: seed / (2.0 * m as f64 * n),
        r_f: match policy {
            FrozenPolicy::Reuse => frozen / (2.0 * m as f64 * n),
            FrozenPolicy::Fresh => frozen / (2.0 * n),
        },
        r_d: (det_unknown(1) + det_unknown(2)) as f64 / (2.0 * n),
        m,
        frozen_policy: policy,
        caps: region_caps(channel),
    })
}

/// Result of comparing Eve's low sets with the legitimate ones.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DegradationReport {
    pub holds: bool,
    /// Per user, indices in Eve's low set but not in the legitimate one.
    pub violations: [Vec<usize>; 2],
}

/// Checks `L_{S_Uj | Ye} ⊆ L_{Cj | Yj X_other}` for both users.
pub fn check_degraded_inclusion(
    legit: &[ReliabilityProfile; 2],
    eve: &ReliabilityProfile,
    path: &MonotonePath,
    delta: f64,
) -> Result<DegradationReport> {
    let len = path.block_len();
    if legit.iter().any(|p| p.len() != len) || eve.len() != 2 * len {
        return Err(Error::InvalidInput("profile lengths do not match the path".into()));
    }
    let mut violations: [Vec<usize>; 2] = [Vec::new(), Vec::new()];
    for user in 1..=2 {
        let l = classify_sets(&legit[user - 1], delta)?.low_mask(len);
        let e = classify_sets(&eve.select(&path.index_map(user)), delta)?.low_mask(len);
        violations[user - 1] = select(len, |i| e[i] && !l[i]);
    }
    Ok(DegradationReport {
        holds: violations.iter().all(Vec::is_empty),
        violations,
    })
}
