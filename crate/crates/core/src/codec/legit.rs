//! Legitimate receiver posteriors over the side-information-reduced BEC.

use crate::channel::{BecOutput, BecSymbol};
use crate::codec::prefix::PrefixTable;
use crate::codec::sc::{to_engine_order, Prob, ScEngine};
use crate::error::{Error, Result};

/// Per-position factors `P(y_j | c_j)` in engine order.
pub(crate) fn legit_factors(y: &BecOutput, table: Option<&PrefixTable>) -> Vec<Prob> {
    let raw: Vec<Prob> =
        y.0.iter()
            .map(|&s| match (table, s) {
                (Some(t), s) => t.bec_factor(s),
                (None, BecSymbol::Bit(0)) => [1.0, 0.0],
                (None, BecSymbol::Bit(_)) => [0.0, 1.0],
                (None, BecSymbol::Erased) => [0.5, 0.5],
            })
            .collect();
    to_engine_order(&raw)
}

/// `P(u^k = 0 | y, u^{1:k-1})` for `k = u_prefix.len()`, uniform prior.
pub fn sc_posterior_legit(y_reduced: &BecOutput, u_prefix: &[u8]) -> Result<f64> {
    let len = y_reduced.0.len();
    if !len.is_power_of_two() {
        return Err(Error::InvalidInput(format!(
            "observation length {len} is not a power of two"
        )));
    }
    if u_prefix.len() >= len {
        return Err(Error::InvalidInput(format!(
            "prefix length {} must be below {len}",
            u_prefix.len()
        )));
    }
    let target = u_prefix.len();
    let mut engine = ScEngine::new(len);
    let mut answer = None;
    let mut impossible = None;
    engine.run(&legit_factors(y_reduced, None), |i, p| {
        if i < target {
            let b = u_prefix[i] & 1;
            if p[b as usize] == 0.0 && impossible.is_none() {
                impossible = Some(i);
            }
            b
        } else {
            if i == target {
                answer = Some(p[0]);
            }
            0
        }
    });
    if let Some(index) = impossible {
        return Err(Error::Contradiction { index });
    }
    Ok(answer.expect("target index visited"))
}
