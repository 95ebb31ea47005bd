use proptest::prelude::*;

use twoway_polar::channel::ChannelParams;
use twoway_polar::construction::{
    bec_z_profile, build_profiles, exact_mac_profile_oracle, make_path, region_caps, strong_sets, ConstructionParams,
    FrozenPolicy, IndexPartition, ProfileSet, StrongSets, StrongUserSets,
};
use twoway_polar::eval::bounds::{bler_upper_bound, leakage_upper_bound};
use twoway_polar::eval::leakage::exact_leakage;
use twoway_polar::eval::sweep::wilson_interval;

fn random_sets(assign: &[u8]) -> StrongSets {
    // Each index of each user goes to one of I, F, Ra, D by `assign`.
    let user = |k: usize| {
        let pick = |r: u8| (0..4).filter(|&i| assign[4 * k + i] == r).collect::<Vec<usize>>();
        StrongUserSets {
            i: pick(0),
            ia: pick(0),
            ib: vec![],
            f: pick(1),
            ra: pick(2),
            rb: vec![],
            d: pick(3),
            decoded: pick(0).into_iter().chain(pick(2)).collect(),
        }
    };
    StrongSets {
        block_len: 4,
        users: [user(0), user(1)],
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 48, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn exact_leakage_below_bound(
        assign in proptest::collection::vec(0u8..4, 8),
        i in 0usize..=4,
        epse in 0.0f64..=1.0,
        m in 1usize..=2,
        fresh in any::<bool>(),
    ) {
        let mut sets = random_sets(&assign);
        for u in &mut sets.users {
            u.decoded.sort_unstable();
        }
        let path = make_path(i, 2).unwrap();
        let eve = exact_mac_profile_oracle(&path, epse).unwrap();
        let policy = if fresh { FrozenPolicy::Fresh } else { FrozenPolicy::Reuse };
        let exact = exact_leakage(&sets, epse, m, policy).unwrap();
        let bound = leakage_upper_bound(&eve, &path, &sets, m).unwrap();
        prop_assert!(exact >= 0.0);
        prop_assert!(exact <= bound + 1e-9, "exact {} bound {}", exact, bound);
    }

    #[test]
    fn bounds_are_in_range(n in 1u32..12, eps1 in 0.0f64..1.0, eps2 in 0.0f64..1.0, epse in 0.0f64..1.0, beta in 0.05f64..0.49, m in 1usize..4) {
        let channel = ChannelParams::new(eps1, eps2, epse).unwrap();
        let params = ConstructionParams::new(n, beta, channel, make_path(1 << n, n).unwrap()).unwrap();
        let profiles = build_profiles(&params, 0, 0).unwrap();
        let sets = strong_sets(&params, &profiles).unwrap();
        let bler = bler_upper_bound(&profiles.legit, &sets, m).unwrap();
        prop_assert!((0.0..=1.0).contains(&bler));
        let leak = leakage_upper_bound(&profiles.eve, &params.path, &sets, m).unwrap();
        prop_assert!(leak >= 0.0);
        prop_assert!(leak <= (m * (sets.protected(1).len() + sets.protected(2).len())) as f64 + 1e-9);
    }

    #[test]
    fn wilson_contains_point_estimate(trials in 1u64..100_000, frac in 0.0f64..=1.0) {
        let failures = (frac * trials as f64).floor() as u64;
        let (lo, hi) = wilson_interval(failures, trials);
        let p = failures as f64 / trials as f64;
        prop_assert!(0.0 <= lo && lo <= p + 1e-12 && p <= hi + 1e-12 && hi <= 1.0);
    }

    #[test]
    fn region_caps_are_consistent(eps1 in 0.0f64..=1.0, eps2 in 0.0f64..=1.0, epse in 0.0f64..=1.0) {
        let caps = region_caps(&ChannelParams::new(eps1, eps2, epse).unwrap());
        prop_assert!((caps.r1 + caps.r2 - (caps.sum + 0.5 * (1.0 - epse))).abs() < 1e-12);
    }
}

#[test]
fn frozen_only_profiles_use_no_eve_entropy() {
    // Eve sees nothing: every protected index has Z = 1, so the bound is 0.
    let path = make_path(4, 2).unwrap();
    let profiles = ProfileSet {
        legit: [bec_z_profile(2, 0.1).unwrap(), bec_z_profile(2, 0.1).unwrap()],
        eve: exact_mac_profile_oracle(&path, 1.0).unwrap(),
        source: None,
    };
    let params = ConstructionParams::new(2, 0.3, ChannelParams::new(0.1, 0.1, 1.0).unwrap(), path.clone()).unwrap();
    let sets = strong_sets(&params, &profiles).unwrap();
    assert_eq!(leakage_upper_bound(&profiles.eve, &path, &sets, 2).unwrap(), 0.0);
    assert_eq!(exact_leakage(&sets, 1.0, 2, FrozenPolicy::Reuse).unwrap(), 0.0);
}
