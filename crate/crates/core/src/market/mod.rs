//! Pricing inputs: the bond, call curves `λ(a)` with their digital curves,
//! barrier-conditioned joint curves, and the Monte Carlo sampler that serves
//! as the brute-force oracle.
//!
//! `λ(a)` is the discounted value of the call struck at `a`. Its negated
//! one-sided slopes are discounted digital prices, which is what every
//! pricing formula in this crate consumes.

mod bs;
mod joint;
mod sample;
mod table;

pub use bs::{bs_curve, BsCurve};
pub use joint::{
    joint_curve, mc_price_gated, BarrierEvent, Interval, JointCallCurve, StatKind,
};
pub use sample::{
    empirical_curve, gbm_pool, mc_price, BarrierKind, EmpiricalCurve, SamplePool,
};
pub use table::{table_curve, table_curve_with_digitals, TableCurve};

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::payoff::Payoff;

#[derive(Debug, thiserror::Error)]
pub enum MarketError {
    #[error("bad market parameters: {0}")]
    BadParams(String),
    #[error("arbitrage violation: {0}")]
    ArbitrageViolation(String),
    #[error("missing barrier statistic: {0}")]
    MissingBarrierStat(String),
}

/// Deterministic bond with constant continuously compounded rate.
///
/// `discount_factor(t)` is `B_t⁻¹ = e^{−rate·t}`; `B_0 = 1` and `B` is
/// nondecreasing since the rate is nonnegative.
#[derive(Clone, Copy, Debug)]
pub struct Bond {
    rate: f64,
}

impl Bond {
    pub fn constant_rate(rate: f64) -> Result<Self, MarketError> {
        if !rate.is_finite() || rate < 0.0 {
            return Err(MarketError::BadParams(format!(
                "bond rate must be finite and nonnegative, got {rate}"
            )));
        }
        Ok(Self { rate })
    }

    /// Zero-rate bond: every discount factor is 1.
    pub fn flat() -> Self {
        Self { rate: 0.0 }
    }

    pub fn rate(&self) -> f64 {
        self.rate
    }

    /// `B_t⁻¹` for `t ≥ 0`.
    pub fn discount_factor(&self, t: f64) -> f64 {
        assert!(t >= 0.0 && t.is_finite(), "bad time {t}");
        libm::exp(-self.rate * t)
    }
}

impl Default for Bond {
    fn default() -> Self {
        Self::flat()
    }
}

/// Outcome of a backend's payoff-integrability probe.
#[derive(Clone, Debug)]
pub struct IntegrabilityCheck {
    pub ok: bool,
    pub detail: String,
}

/// A discounted call price curve with its two digital flavors.
///
/// Invariants every backend maintains: `λ` is nonincreasing, convex, and
/// nonnegative with `λ(0)` the discounted forward; `0 ≤ digital_gt ≤
/// digital_ge ≤ 1`, both nonincreasing; slopes of `λ` lie in
/// `[−discount, 0]`.
pub trait CallCurve: Send + Sync {
    /// Maturity the curve refers to (reporting metadata).
    fn maturity(&self) -> f64;

    /// Discount factor `B_T⁻¹`.
    fn discount(&self) -> f64;

    /// Discounted call value at strike `a ≥ 0`.
    fn lambda(&self, a: f64) -> f64;

    /// `Q(X_T ≥ a)`.
    fn digital_ge(&self, a: f64) -> f64;

    /// `Q(X_T > a)`.
    fn digital_gt(&self, a: f64) -> f64;

    /// Discounted forward `λ(0)`.
    fn forward(&self) -> f64 {
        self.lambda(0.0)
    }

    /// Second strike derivative `λ″(a)` where the backend has one in closed
    /// form (the discounted risk-neutral density).
    fn lambda_second(&self, _a: f64) -> Option<f64> {
        None
    }

    /// Strikes at which `λ` has kinks, for backends with a finite quote
    /// grid. Quadrature forces partition nodes here.
    fn strike_grid(&self) -> Option<Vec<f64>> {
        None
    }

    /// Backend-specific evidence that `E_Q|f(X_T)|` is finite.
    fn integrability(&self, payoff: &Payoff) -> IntegrabilityCheck;
}

/// Integrability probe for the lognormal backend: every polynomial-growth
/// payoff has finite expectation, so estimate the growth degree of `|f|` on
/// a doubling strike grid and require it to be bounded and stable.
pub(crate) fn polynomial_growth_check(p: &Payoff, forward: f64) -> IntegrabilityCheck {
    const POINTS: usize = 17;
    let a0 = if forward > 1.0 { forward } else { 1.0 };
    let mut g = [0.0_f64; POINTS];
    let mut a = a0;
    for slot in g.iter_mut() {
        let v = libm::fabs(p.value_left(a));
        if v.is_nan() || v.is_infinite() {
            return IntegrabilityCheck {
                ok: false,
                detail: format!(
                    "payoff magnitude overflows double precision near strike {a}; \
                     growth is super-polynomial or unrepresentable"
                ),
            };
        }
        *slot = v;
        a *= 2.0;
    }
    let (v14, v15, v16) = (g[POINTS - 3], g[POINTS - 2], g[POINTS - 1]);
    if v16 < 1e-250 && v15 < 1e-250 && v14 < 1e-250 {
        return IntegrabilityCheck {
            ok: true,
            detail: "payoff vanishes at large strikes".into(),
        };
    }
    if v14 == 0.0 || v15 == 0.0 {
        return IntegrabilityCheck {
            ok: false,
            detail: "payoff tail magnitude is erratic on the doubling grid".into(),
        };
    }
    let d_prev = libm::log2(v15 / v14);
    let d_last = libm::log2(v16 / v15);
    let ok = d_last <= 64.5 && d_last - d_prev <= 0.5;
    IntegrabilityCheck {
        ok,
        detail: if ok {
            format!("polynomial growth of degree about {d_last:.2}; all lognormal moments are finite")
        } else {
            format!(
                "growth degree {d_last:.2} after {d_prev:.2} on the doubling grid is \
                 unbounded or accelerating; expectation may be infinite"
            )
        },
    }
}

/// Integrability probe for sampled backends: the sample mean of `f` must be
/// finite and agree between the first half of the pool and the whole pool
/// within Monte Carlo error.
pub(crate) fn half_pool_stability(values: &[f64]) -> IntegrabilityCheck {
    let n = values.len();
    let (full_mean, full_se) = mean_and_se(values);
    if !full_mean.is_finite() {
        return IntegrabilityCheck {
            ok: false,
            detail: "sample mean of the payoff is not finite".into(),
        };
    }
    if n < 4 {
        return IntegrabilityCheck {
            ok: true,
            detail: "pool too small for a stability split; mean is finite".into(),
        };
    }
    let (half_mean, half_se) = mean_and_se(&values[..n / 2]);
    let noise = full_se.max(half_se);
    let slack = 6.0 * noise + 1e-12 * (1.0 + libm::fabs(full_mean));
    let ok = half_mean.is_finite() && libm::fabs(full_mean - half_mean) <= slack;
    IntegrabilityCheck {
        ok,
        detail: if ok {
            format!(
                "half-pool mean {half_mean:.6e} agrees with full-pool mean {full_mean:.6e} \
                 within sampling error"
            )
        } else {
            format!(
                "half-pool mean {half_mean:.6e} vs full-pool mean {full_mean:.6e} exceeds \
                 6x sampling error {noise:.3e}; the payoff mean is unstable under pool growth"
            )
        },
    }
}

pub(crate) fn mean_and_se(values: &[f64]) -> (f64, f64) {
    let n = values.len();
    if n == 0 {
        return (0.0, 0.0);
    }
    let mean = crate::math::kahan_sum(values.iter().copied()) / n as f64;
    if n == 1 || !mean.is_finite() {
        return (mean, 0.0);
    }
    let var = crate::math::kahan_sum(values.iter().map(|&v| {
        let d = v - mean;
        d * d
    })) / (n as f64 - 1.0);
    (mean, libm::sqrt(var / n as f64))
}
