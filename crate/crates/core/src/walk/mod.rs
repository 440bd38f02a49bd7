//! The up-biased simple random walk and the last time `T` it visits its
//! bottommost point.
//!
//! `Z_i = +1` with probability `p > 1/2`, `−1` otherwise, `S_0 = 0`,
//! `B = min_t S_t` and `T = max{t : S_t = B}`. The module offers
//!
//! * a triangular dynamic-programming oracle for the exact law of `T`
//!   ([`tail_dp_oracle`]),
//! * the closed hypergeometric tail ([`tail_exact`]) and the Lerch-series
//!   surrogate of its order of magnitude ([`tail_asymptotic`]),
//! * the moment generating function, first two moments and the tail bounds
//!   derived from them ([`mgf`], [`moments`], [`tail_upper_mgf`],
//!   [`tail_elementary_bounds`]),
//! * a certified-error simulator ([`simulate_t`]).

mod bounds;
mod dp;
mod exact;
mod sim;

use serde::Serialize;

use crate::error::{domain, Result};

pub use bounds::{
    calibrate_elementary_constants, mgf, mgf_s_max, moments, tail_elementary_bounds,
    tail_elementary_bounds_with, tail_upper_mgf, ElementaryConstants, Moments,
    ELEMENTARY_LOWER_CONST, ELEMENTARY_UPPER_CONST,
};
pub use dp::{tail_dp_oracle, DpOracle, DP_MAX_HORIZON, DP_STORED_ROWS};
pub use exact::{tail_asymptotic, tail_exact, tau};
pub use sim::{escape_height, simulate_t, PathStats, WalkPath};

/// Step probabilities of the walk: up with `p`, down with `q = 1 − p`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BiasParams {
    p: f64,
    q: f64,
}

impl BiasParams {
    /// Accepts `1/2 < p ≤ 1`. `p = 1/2` is rejected: the walk is recurrent and
    /// `T` is infinite.
    pub fn new(p: f64) -> Result<Self> {
        if !(p.is_finite() && p > 0.5 && p <= 1.0) {
            return domain(format!("bias must satisfy 1/2 < p <= 1 (got {p})"));
        }
        Ok(BiasParams { p, q: 1.0 - p })
    }

    /// Parameters for a noise level `η = q`, i.e. `p = 1 − η`.
    pub fn from_noise(eta: f64) -> Result<Self> {
        if !(eta.is_finite() && (0.0..0.5).contains(&eta)) {
            return domain(format!("noise must satisfy 0 <= q < 1/2 (got {eta})"));
        }
        Ok(BiasParams { p: 1.0 - eta, q: eta })
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    /// `4pq ∈ [0, 1)`.
    pub fn four_pq(&self) -> f64 {
        4.0 * self.p * self.q
    }

    /// `p − q ∈ (0, 1]`.
    pub fn drift(&self) -> f64 {
        self.p - self.q
    }

    pub fn is_degenerate(&self) -> bool {
        self.q == 0.0
    }

    pub(crate) fn require_interior(&self, what: &str) -> Result<()> {
        if self.is_degenerate() {
            return domain(format!("{what} needs 1/2 < p < 1 (got p = 1)"));
        }
        Ok(())
    }
}

/// Which computation produced a [`TailEstimate`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TailMethod {
    ExactSeries,
    DpOracle,
    MgfBound,
    LerchAsymptotic,
    ElementaryUpper,
    ElementaryLower,
    MonteCarlo,
}

impl TailMethod {
    pub fn name(&self) -> &'static str {
        match self {
            TailMethod::ExactSeries => "exact_series",
            TailMethod::DpOracle => "dp_oracle",
            TailMethod::MgfBound => "mgf_bound",
            TailMethod::LerchAsymptotic => "lerch_asymptotic",
            TailMethod::ElementaryUpper => "elementary_upper",
            TailMethod::ElementaryLower => "elementary_lower",
            TailMethod::MonteCarlo => "monte_carlo",
        }
    }
}

/// A value for `P(T ≥ t)`.
///
/// `probability` is clamped to `[0, 1]`; `raw_value` keeps what the method
/// actually computed so that bound violations stay visible.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TailEstimate {
    pub t: u64,
    pub probability: f64,
    pub raw_value: f64,
    pub method: TailMethod,
    pub error_bound: f64,
    pub tau: Option<u64>,
}

impl TailEstimate {
    pub(crate) fn new(t: u64, raw: f64, method: TailMethod, error_bound: f64, tau: Option<u64>) -> Self {
        TailEstimate {
            t,
            probability: raw.clamp(0.0, 1.0),
            raw_value: raw,
            method,
            error_bound,
            tau,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn params_validation() {
        assert!(BiasParams::new(0.5).is_err());
        assert!(BiasParams::new(1.01).is_err());
        assert!(BiasParams::new(f64::NAN).is_err());
        let b = BiasParams::new(0.75).unwrap();
        assert_eq!(b.q(), 0.25);
        assert_eq!(b.four_pq(), 0.75);
        assert_eq!(b.drift(), 0.5);
        let one = BiasParams::new(1.0).unwrap();
        assert!(one.is_degenerate());
        assert_eq!(one.four_pq(), 0.0);
        assert_eq!(BiasParams::from_noise(0.25).unwrap(), b);
        assert!(BiasParams::from_noise(0.5).is_err());
    }
}
