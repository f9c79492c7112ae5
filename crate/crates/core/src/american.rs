//! Upper bound for American options on convex payoffs, the certificate for
//! when the bound collapses to equality, and a CRR binomial oracle.
//!
//! For convex `f` and a submartingale discounted underlying `X̄`, the
//! American value is at most
//!
//! `V^eur + max(f(0), 0)·(B_t⁻¹ − B_T⁻¹) + min(f′₊(0), 0)·(X̄_t − E_Q[X̄_T])`
//!
//! where `E_Q[X̄_T] = λ(0)`. Both gap terms are nonnegative under the
//! submartingale hypothesis, and each vanishes under a simple condition
//! (constant bond or `f(0) ≤ 0`; martingale `X̄` or `f′₊(0) ≥ 0`), which is
//! what [`equality_certificate`] checks.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::market::{CallCurve, MarketError};
use crate::payoff::{ConvexDecomposition, Payoff};
use crate::pricer::{price_convex, PriceError, QuadConfig};

/// Valuation-time market state: the discounted underlying `X̄_t` and the
/// inverse bond price `B_t⁻¹`. At `t = 0` these are the spot and 1.
#[derive(Clone, Copy, Debug)]
pub struct MarketState {
    pub x_bar: f64,
    pub bond_factor_t: f64,
}

impl MarketState {
    /// State at inception: `X̄_0 = spot`, `B_0⁻¹ = 1`.
    pub fn at_inception(spot: f64) -> Self {
        Self {
            x_bar: spot,
            bond_factor_t: 1.0,
        }
    }
}

/// Model properties the caller asserts; they are not statistically tested.
/// The analytic and sampled backends document theirs: a GBM underlying
/// discounted at its own rate is a martingale, and any deterministic
/// nonincreasing discount curve makes the bond "constant" only when the
/// rate is zero.
#[derive(Clone, Copy, Debug)]
pub struct ModelAssumptions {
    /// `B_t = B_T` for all `t` (zero rate).
    pub bond_constant: bool,
    /// `X̄` is a martingale, not merely a submartingale.
    pub martingale: bool,
}

/// Outcome of [`equality_certificate`].
#[derive(Clone, Debug)]
pub struct EqualityCertificate {
    pub certified: bool,
    /// One line per clause saying why it held or failed.
    pub reasons: Vec<String>,
}

/// The American upper bound and its pieces.
#[derive(Clone, Debug)]
pub struct AmericanBoundReport {
    /// `V^f` from the convex pricing form.
    pub european_value: f64,
    /// `european_value + cash_gap + slope_gap`.
    pub bound: f64,
    /// `max(f(0), 0)·(B_t⁻¹ − B_T⁻¹)`.
    pub cash_gap: f64,
    /// `min(f′₊(0), 0)·(X̄_t − λ(0))`.
    pub slope_gap: f64,
    /// `(cash_gap + slope_gap) / european_value`; large values mean the
    /// bound is loose. No verdict is attached.
    pub gap_ratio: f64,
    pub equality_certified: bool,
    /// Binomial oracle value, attached by callers that know the model.
    pub oracle_value: Option<f64>,
}

/// Checks the two equality clauses: `(bond constant ∨ f(0) ≤ 0)` and
/// `(martingale ∨ f′₊(0) ≥ 0)`. When both hold, the American value equals
/// the European one.
pub fn equality_certificate(
    d: &ConvexDecomposition<'_>,
    assumptions: ModelAssumptions,
) -> EqualityCertificate {
    let mut reasons = Vec::new();
    let cash_ok = assumptions.bond_constant || d.f0 <= 0.0;
    reasons.push(if assumptions.bond_constant {
        format!("cash clause holds: the bond is constant (f(0) = {})", d.f0)
    } else if d.f0 <= 0.0 {
        format!("cash clause holds: f(0) = {} ≤ 0", d.f0)
    } else {
        format!(
            "cash clause fails: f(0) = {} > 0 and the bond is not constant",
            d.f0
        )
    });
    let slope_ok = assumptions.martingale || d.slope0 >= 0.0;
    reasons.push(if assumptions.martingale {
        format!(
            "slope clause holds: X̄ is a martingale (f′₊(0) = {})",
            d.slope0
        )
    } else if d.slope0 >= 0.0 {
        format!("slope clause holds: f′₊(0) = {} ≥ 0", d.slope0)
    } else {
        format!(
            "slope clause fails: f′₊(0) = {} < 0 and X̄ is only a submartingale",
            d.slope0
        )
    });
    EqualityCertificate {
        certified: cash_ok && slope_ok,
        reasons,
    }
}

/// Prices the European leg with the convex form and assembles the American
/// upper bound at the given state.
///
/// The submartingale hypothesis on `X̄` is taken from `assumptions` (a
/// martingale is in particular a submartingale); `state.bond_factor_t`
/// must be at least the curve's discount factor so the cash gap cannot be
/// negative.
pub fn american_bound(
    d: &ConvexDecomposition<'_>,
    c: &dyn CallCurve,
    state: MarketState,
    assumptions: ModelAssumptions,
    cfg: &QuadConfig,
) -> Result<AmericanBoundReport, PriceError> {
    assert!(
        state.x_bar.is_finite() && state.x_bar >= 0.0,
        "discounted underlying must be finite and nonnegative"
    );
    assert!(
        state.bond_factor_t.is_finite() && state.bond_factor_t >= c.discount(),
        "inverse bond price at t must be finite and at least the maturity discount factor"
    );

    let european_value = price_convex(d, c, cfg)?.value;
    let cash_gap = d.f0.max(0.0) * (state.bond_factor_t - c.discount());
    let slope_gap = d.slope0.min(0.0) * (state.x_bar - c.lambda(0.0));
    let gaps = cash_gap + slope_gap;
    let gap_ratio = if gaps == 0.0 {
        0.0
    } else {
        gaps / european_value
    };
    Ok(AmericanBoundReport {
        european_value,
        bound: european_value + gaps,
        cash_gap,
        slope_gap,
        gap_ratio,
        equality_certified: equality_certificate(d, assumptions).certified,
        oracle_value: None,
    })
}

/// American and European values of `p` on a CRR binomial lattice
/// (`u = e^{σ√Δt}`, `d = 1/u`), both read off the same tree by backward
/// induction.
pub fn binomial_american(
    p: &Payoff,
    spot: f64,
    vol: f64,
    rate: f64,
    maturity: f64,
    steps: usize,
) -> Result<(f64, f64), MarketError> {
    if !(spot.is_finite() && spot > 0.0)
        || !(vol.is_finite() && vol > 0.0)
        || !(rate.is_finite() && rate >= 0.0)
        || !(maturity.is_finite() && maturity > 0.0)
    {
        return Err(MarketError::BadParams(format!(
            "need spot > 0, vol > 0, rate ≥ 0, maturity > 0; \
             got spot = {spot}, vol = {vol}, rate = {rate}, maturity = {maturity}"
        )));
    }
    if steps == 0 {
        return Err(MarketError::BadParams("need at least one lattice step".into()));
    }
    let dt = maturity / steps as f64;
    let u = libm::exp(vol * libm::sqrt(dt));
    let d = 1.0 / u;
    let q = (libm::exp(rate * dt) - d) / (u - d);
    if !(0.0..=1.0).contains(&q) {
        return Err(MarketError::BadParams(format!(
            "risk-neutral up-probability {q} outside [0, 1]; \
             the time step is too coarse for these parameters"
        )));
    }
    let disc = libm::exp(-rate * dt);

    let node = |level: usize, j: usize| spot * libm::pow(u, (2 * j as i64 - level as i64) as f64);
    let mut amer: Vec<f64> = (0..=steps).map(|j| p.eval(node(steps, j))).collect();
    let mut euro = amer.clone();
    for level in (0..steps).rev() {
        for j in 0..=level {
            let cont = disc * (q * amer[j + 1] + (1.0 - q) * amer[j]);
            let exercise = p.eval(node(level, j));
            amer[j] = if cont > exercise { cont } else { exercise };
            euro[j] = disc * (q * euro[j + 1] + (1.0 - q) * euro[j]);
        }
    }
    Ok((amer[0], euro[0]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::market::bs_curve;
    use crate::payoff::{catalog, convex_decompose};

    const MARTINGALE_GBM: ModelAssumptions = ModelAssumptions {
        bond_constant: false,
        martingale: true,
    };

    #[test]
    fn one_step_lattice_by_hand() {
        // Two states: up pays 0, down pays 100 − 100·e^{−0.2}; the root
        // exercise value is 0, so American and European coincide.
        let p = catalog::put(100.0).unwrap();
        let (amer, euro) = binomial_american(&p, 100.0, 0.2, 0.05, 1.0, 1).unwrap();
        assert!((amer - 7.2852274146953403).abs() <= 1e-12, "{amer}");
        assert_eq!(amer, euro);
    }

    #[test]
    fn put_lattice_reference_values() {
        let p = catalog::put(100.0).unwrap();
        let (amer, euro) = binomial_american(&p, 100.0, 0.2, 0.05, 1.0, 1000).unwrap();
        assert!((amer - 6.0895952829777089).abs() <= 1e-9 * amer, "{amer}");
        assert!((euro - 5.5715265538333512).abs() <= 1e-9 * euro, "{euro}");
        assert!(amer > euro);

        let (amer0, euro0) = binomial_american(&p, 100.0, 0.2, 0.0, 1.0, 1000).unwrap();
        assert!((amer0 - 7.9635763260240857).abs() <= 1e-9 * amer0, "{amer0}");
        assert!((amer0 - euro0).abs() <= 1e-10 * amer0);
    }

    #[test]
    fn call_never_exercised_early() {
        let p = catalog::call(100.0).unwrap();
        for rate in [0.0, 0.05] {
            let (amer, euro) = binomial_american(&p, 100.0, 0.2, rate, 1.0, 500).unwrap();
            assert!((amer - euro).abs() <= 1e-12 * amer.max(1.0), "{amer} vs {euro}");
        }
    }

    #[test]
    fn put_bound_dominates_the_lattice() {
        let c = bs_curve(100.0, 0.2, 0.05, 1.0).unwrap();
        let cfg = QuadConfig::for_curve(&c);
        let p = catalog::put(100.0).unwrap();
        let d = convex_decompose(&p).unwrap();
        let r = american_bound(&d, &c, MarketState::at_inception(100.0), MARTINGALE_GBM, &cfg)
            .unwrap();
        assert!((r.bound - (r.european_value + r.cash_gap + r.slope_gap)).abs() <= 1e-12);
        assert!((r.cash_gap - 100.0 * (1.0 - c.discount())).abs() <= 1e-12);
        assert!(r.slope_gap.abs() <= 1e-9, "{}", r.slope_gap);
        assert!(!r.equality_certified);

        let (amer, _) = binomial_american(&p, 100.0, 0.2, 0.05, 1.0, 1000).unwrap();
        assert!(amer <= r.bound, "{amer} vs {}", r.bound);
        assert!(r.gap_ratio > 0.0);
    }

    #[test]
    fn call_bound_is_tight() {
        let c = bs_curve(100.0, 0.2, 0.05, 1.0).unwrap();
        let cfg = QuadConfig::for_curve(&c);
        let p = catalog::call(100.0).unwrap();
        let d = convex_decompose(&p).unwrap();
        let r = american_bound(&d, &c, MarketState::at_inception(100.0), MARTINGALE_GBM, &cfg)
            .unwrap();
        assert_eq!(r.cash_gap, 0.0);
        assert_eq!(r.slope_gap, 0.0);
        assert_eq!(r.bound, r.european_value);
        assert_eq!(r.gap_ratio, 0.0);
        assert!(r.equality_certified);
    }

    #[test]
    fn zero_rate_martingale_kills_both_gaps_for_the_put() {
        let c = bs_curve(100.0, 0.2, 0.0, 1.0).unwrap();
        let cfg = QuadConfig::for_curve(&c);
        let p = catalog::put(100.0).unwrap();
        let d = convex_decompose(&p).unwrap();
        let assumptions = ModelAssumptions {
            bond_constant: true,
            martingale: true,
        };
        let r = american_bound(&d, &c, MarketState::at_inception(100.0), assumptions, &cfg)
            .unwrap();
        assert_eq!(r.cash_gap, 0.0);
        assert!(r.slope_gap.abs() <= 1e-9, "{}", r.slope_gap);
        assert!(r.equality_certified);
    }

    #[test]
    fn certificate_clauses() {
        let call = catalog::power_call(2, 10_000.0).unwrap();
        let d = convex_decompose(&call).unwrap();
        let cert = equality_certificate(
            &d,
            ModelAssumptions {
                bond_constant: false,
                martingale: false,
            },
        );
        assert!(cert.certified, "{:?}", cert.reasons);

        let put = catalog::put(100.0).unwrap();
        let d = convex_decompose(&put).unwrap();
        let cert = equality_certificate(&d, MARTINGALE_GBM);
        assert!(!cert.certified);
        assert!(cert.reasons.iter().any(|r| r.contains("cash clause fails")));
        assert!(cert.reasons.iter().any(|r| r.contains("slope clause holds")));
    }

    #[test]
    fn lattice_rejects_bad_parameters() {
        let p = catalog::call(100.0).unwrap();
        assert!(binomial_american(&p, 0.0, 0.2, 0.05, 1.0, 10).is_err());
        assert!(binomial_american(&p, 100.0, 0.0, 0.05, 1.0, 10).is_err());
        assert!(binomial_american(&p, 100.0, 0.2, -0.01, 1.0, 10).is_err());
        assert!(binomial_american(&p, 100.0, 0.2, 0.05, 0.0, 10).is_err());
        assert!(binomial_american(&p, 100.0, 0.2, 0.05, 1.0, 0).is_err());
        // Rate dominating volatility over one huge step pushes q above 1.
        assert!(binomial_american(&p, 100.0, 0.01, 0.5, 4.0, 1).is_err());
    }
}
