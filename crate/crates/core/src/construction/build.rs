//! One-call construction: profiles, partition and rates bundled into a
//! serializable document.

use serde::{Deserialize, Serialize};

use crate::codec::block::UserLayout;
use crate::construction::eve::{eve_path_profile, mc_mac_profile};
use crate::construction::partition::{
    build_strong_partition, build_weak_partition, ConstructionParams, IndexPartition, ProfileSet, RateReport,
    StrongPartition, WeakPartition,
};
use crate::construction::profile::bec_z_profile;
use crate::error::{Error, Result};
use crate::rng::{derive_seed, Component};

/// Monte-Carlo trials for Eve's profile on non-corner paths.
pub const DEFAULT_MC_TRIALS: u64 = 100_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scheme {
    /// Chained scheme with strong secrecy.
    #[default]
    Strong,
    /// Unchained scheme for degraded eavesdroppers.
    Weak,
}

impl std::str::FromStr for Scheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "strong" => Ok(Scheme::Strong),
            "weak" => Ok(Scheme::Weak),
            other => Err(Error::InvalidInput(format!("unknown scheme {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "scheme", rename_all = "snake_case")]
pub enum Partition {
    Strong(StrongPartition),
    Weak(WeakPartition),
}

macro_rules! delegate {
    ($self:ident, $p:ident => $e:expr) => {
        match $self {
            Partition::Strong($p) => $e,
            Partition::Weak($p) => $e,
        }
    };
}

impl IndexPartition for Partition {
    fn block_len(&self) -> usize {
        delegate!(self, p => p.block_len())
    }
    fn layout(&self, user: usize) -> UserLayout {
        delegate!(self, p => p.layout(user))
    }
    fn protected(&self, user: usize) -> Vec<usize> {
        delegate!(self, p => p.protected(user))
    }
    fn decoded(&self, user: usize) -> Vec<usize> {
        delegate!(self, p => p.decoded(user))
    }
    fn frozen(&self, user: usize) -> Vec<usize> {
        delegate!(self, p => p.frozen(user))
    }
    fn chained(&self, user: usize) -> Vec<usize> {
        delegate!(self, p => p.chained(user))
    }
    fn deterministic(&self, user: usize) -> Vec<usize> {
        delegate!(self, p => p.deterministic(user))
    }
    fn message_len(&self, user: usize) -> usize {
        delegate!(self, p => p.message_len(user))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Construction {
    pub params: ConstructionParams,
    pub delta: f64,
    pub m: usize,
    pub profiles: ProfileSet,
    pub partition: Partition,
    pub rates: RateReport,
}

/// Exact legitimate profiles and Eve's profile: exact on corner paths,
/// Monte-Carlo (`mc_trials`, seeded from `seed`) otherwise.
pub fn build_profiles(params: &ConstructionParams, mc_trials: u64, seed: u64) -> Result<ProfileSet> {
    params.validate()?;
    let ch = &params.channel;
    let eve = match eve_path_profile(&params.path, ch.epse) {
        Ok(p) => p,
        Err(Error::UnsupportedPath(_)) => mc_mac_profile(
            &params.path,
            ch.epse,
            mc_trials,
            derive_seed(seed, Component::MonteCarlo, 0),
        )?,
        Err(e) => return Err(e),
    };
    Ok(ProfileSet {
        legit: [bec_z_profile(params.n, ch.eps1)?, bec_z_profile(params.n, ch.eps2)?],
        eve,
        source: None,
    })
}

pub fn construct(
    params: &ConstructionParams,
    scheme: Scheme,
    m: usize,
    mc_trials: u64,
    seed: u64,
) -> Result<Construction> {
    let profiles = build_profiles(params, mc_trials, seed)?;
    construct_from_profiles(params, scheme, m, profiles)
}

pub fn construct_from_profiles(
    params: &ConstructionParams,
    scheme: Scheme,
    m: usize,
    profiles: ProfileSet,
) -> Result<Construction> {
    if m == 0 {
        return Err(Error::InvalidInput("m must be at least 1".into()));
    }
    let (partition, mut rates) = match scheme {
        Scheme::Strong => {
            let (p, r) = build_strong_partition(params, &profiles, m)?;
            (Partition::Strong(p), r)
        }
        Scheme::Weak => {
            let (p, r) = build_weak_partition(params, &profiles)?;
            (Partition::Weak(p), r)
        }
    };
    rates = crate::construction::partition::rate_report(&partition, &params.channel, m, rates.frozen_policy)?;
    Ok(Construction {
        params: params.clone(),
        delta: params.delta(),
        m,
        profiles,
        partition,
        rates,
    })
}

impl Construction {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("construction serializes")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| Error::InvalidInput(format!("construction document: {e}")))
    }
}
