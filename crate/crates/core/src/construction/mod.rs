//! Everything fixed before transmission: reliability profiles, polarized
//! sets, decoding paths and index partitions.

pub mod build;
pub mod eve;
pub mod partition;
pub mod path;
pub mod profile;

pub use build::{
    build_profiles, construct, construct_from_profiles, Construction, Partition, Scheme, DEFAULT_MC_TRIALS,
};
pub use eve::{
    eve_corner_profiles, eve_path_profile, exact_mac_oracle, exact_mac_profile_oracle, mc_legit_profile,
    mc_mac_profile, mc_prefix_profile,
};
pub use partition::{
    build_strong_partition, build_weak_partition, check_degraded_inclusion, rate_report, region_caps, strong_sets,
    ConstructionParams, DegradationReport, FrozenPolicy, IndexPartition, ProfileSet, RateReport, RegionCaps,
    StrongPartition, StrongSets, StrongUserSets, WeakPartition, WeakUserSets,
};
pub use path::{index_maps, make_path, scale_path, MonotonePath};
pub use profile::{bec_z_profile, classify_sets, delta_threshold, PolarizedSetFamily, ProfileKind, ReliabilityProfile};
