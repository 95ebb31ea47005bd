use twoway_polar::channel::ChannelParams;
use twoway_polar::eval::sweep::{run_sweep, MetricsRow, SweepGrid};

fn grid() -> Vec<MetricsRow> {
    let mut grid = SweepGrid::new(ChannelParams::new(0.2, 0.3, 0.4).unwrap());
    grid.ns = (8..=16).collect();
    grid.betas = vec![0.16, 0.25, 0.3];
    run_sweep(&grid)
}

#[test]
fn rows_respect_ranges_and_region() {
    for r in grid() {
        let leak = r.leakage_bound.expect("bounds come from the raw sets");
        assert!(leak >= 0.0);
        assert!((0.0..=1.0).contains(&r.bler_bound.unwrap()));
        if r.status == "ok" {
            let (r1, r2, sum) = (r.r1.unwrap(), r.r2.unwrap(), r.sum_rate.unwrap());
            assert!(r1 <= 0.5 && r2 <= 0.4 && sum <= 0.6, "{r:?}");
        } else {
            assert!(r.sum_rate.is_none());
        }
    }
}

#[test]
fn larger_beta_leaks_less() {
    let rows = grid();
    for chunk in rows.chunks(3) {
        let b: Vec<f64> = chunk.iter().map(|r| r.leakage_bound.unwrap()).collect();
        assert!(b[0] > b[1] && b[1] > b[2], "n = {}: {b:?}", chunk[0].n);
    }
}

#[test]
fn sum_rate_grows_with_n() {
    let rates: Vec<f64> = grid()
        .iter()
        .filter(|r| r.beta == 0.16)
        .filter_map(|r| r.sum_rate)
        .collect();
    assert!(rates.len() >= 4);
    assert!(rates.windows(2).all(|w| w[1] >= w[0]), "{rates:?}");
}
