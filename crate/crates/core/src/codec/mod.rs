//! Per-block encoding and successive-cancellation decoding.

pub mod block;
pub mod legit;
pub mod mac;
pub mod prefix;
pub mod sc;

pub use block::{decode_block, encode_block, DecodeResult, EncodedBlock, EncoderInput, Role, UserLayout};
pub use legit::sc_posterior_legit;
pub use mac::{mac_sc_posterior, MacScEngine, PathSlot};
pub use prefix::{PrefixTable, Prefixing};
