//! Polar-coded cooperative jamming over the two-way wiretap channel.
//!
//! Alice and Bob exchange messages through an adder-erasure multiple access
//! channel; each one's transmission jams the other's for an eavesdropper.
//! The crate covers the GF(2) polar transform, channel models, code
//! construction along monotone chain-rule paths, successive-cancellation
//! codecs, chained multi-block sessions, and secrecy/reliability metrics.

pub mod channel;
pub mod codec;
pub mod construction;
pub mod error;
pub mod eval;
pub mod gf2_polar;
pub mod rng;
pub mod session;
