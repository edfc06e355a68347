use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Gate and measurement probabilities for a given `u = p_u / p_m`.
///
/// For `u <= 1` measurements always fire and `p_u = u`; above one the roles
/// swap so that the larger of the two probabilities is pinned at one.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Schedule {
    u: f64,
    p_u: f64,
    p_m: f64,
}

impl Schedule {
    pub fn new(u: f64) -> Result<Self> {
        if !u.is_finite() || u < 0.0 {
            return Err(Error::Config(format!("u must be finite and non-negative, got {u}")));
        }
        let (p_u, p_m) = if u <= 1.0 { (u, 1.0) } else { (1.0, 1.0 / u) };
        Ok(Self { u, p_u, p_m })
    }

    pub fn u(&self) -> f64 {
        self.u
    }

    pub fn p_unitary(&self) -> f64 {
        self.p_u
    }

    pub fn p_measure(&self) -> f64 {
        self.p_m
    }
}
