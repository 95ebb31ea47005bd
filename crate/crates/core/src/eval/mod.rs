//! Bounds, exact small-length oracles and parameter sweeps.

pub mod bounds;
pub mod leakage;

pub use bounds::{bler_upper_bound, leakage_upper_bound, BoundReport};
pub use leakage::{exact_leakage, exact_leakage_oracle};
pub mod sweep;

pub use sweep::{run_sweep, sweep_csv, write_csv, MetricsRow, PathParam, SweepGrid};
