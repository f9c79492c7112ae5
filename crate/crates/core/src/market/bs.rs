//! Closed-form lognormal call curve (Black-Scholes terminal distribution).

use alloc::format;
use alloc::string::String;

use crate::math::{norm_cdf, norm_pdf};
use crate::payoff::Payoff;

use super::{polynomial_growth_check, CallCurve, IntegrabilityCheck, MarketError};

/// Call curve of a lognormal terminal price
/// `X_T = spot·exp((rate − vol²/2)T + vol·√T·Z)` discounted at `rate`.
#[derive(Clone, Copy, Debug)]
pub struct BsCurve {
    spot: f64,
    vol: f64,
    rate: f64,
    maturity: f64,
    discount: f64,
    vol_sqrt_t: f64,
}

pub fn bs_curve(spot: f64, vol: f64, rate: f64, maturity: f64) -> Result<BsCurve, MarketError> {
    let bad = |msg: String| Err(MarketError::BadParams(msg));
    if !(spot.is_finite() && spot > 0.0) {
        return bad(format!("spot must be finite and positive, got {spot}"));
    }
    if !(vol.is_finite() && vol > 0.0) {
        return bad(format!("vol must be finite and positive, got {vol}"));
    }
    if !(rate.is_finite() && rate >= 0.0) {
        return bad(format!("rate must be finite and nonnegative, got {rate}"));
    }
    if !(maturity.is_finite() && maturity > 0.0) {
        return bad(format!("maturity must be finite and positive, got {maturity}"));
    }
    Ok(BsCurve {
        spot,
        vol,
        rate,
        maturity,
        discount: libm::exp(-rate * maturity),
        vol_sqrt_t: vol * libm::sqrt(maturity),
    })
}

impl BsCurve {
    pub fn spot(&self) -> f64 {
        self.spot
    }

    pub fn vol(&self) -> f64 {
        self.vol
    }

    pub fn rate(&self) -> f64 {
        self.rate
    }

    /// `d2(a) = (ln(spot/a) + (rate − vol²/2)T) / (vol√T)` for `a > 0`.
    fn d2(&self, a: f64) -> f64 {
        (libm::log(self.spot / a) + (self.rate - 0.5 * self.vol * self.vol) * self.maturity)
            / self.vol_sqrt_t
    }
}

impl CallCurve for BsCurve {
    fn maturity(&self) -> f64 {
        self.maturity
    }

    fn discount(&self) -> f64 {
        self.discount
    }

    fn lambda(&self, a: f64) -> f64 {
        assert!(a >= 0.0 && !a.is_nan(), "bad strike {a}");
        if a == 0.0 {
            // Discounted forward e^{−rT}·E[X_T] = spot.
            return self.spot;
        }
        if a.is_infinite() {
            return 0.0;
        }
        let d2 = self.d2(a);
        let d1 = d2 + self.vol_sqrt_t;
        let v = self.spot * norm_cdf(d1) - a * self.discount * norm_cdf(d2);
        if v > 0.0 {
            v
        } else {
            0.0
        }
    }

    fn digital_ge(&self, a: f64) -> f64 {
        assert!(a >= 0.0 && !a.is_nan(), "bad strike {a}");
        if a == 0.0 {
            return 1.0;
        }
        if a.is_infinite() {
            return 0.0;
        }
        norm_cdf(self.d2(a))
    }

    fn digital_gt(&self, a: f64) -> f64 {
        // The lognormal law is atomless, so both digital flavors coincide.
        self.digital_ge(a)
    }

    fn forward(&self) -> f64 {
        self.spot
    }

    fn lambda_second(&self, a: f64) -> Option<f64> {
        assert!(a >= 0.0 && !a.is_nan(), "bad strike {a}");
        if a == 0.0 || a.is_infinite() {
            return Some(0.0);
        }
        Some(self.discount * norm_pdf(self.d2(a)) / (a * self.vol_sqrt_t))
    }

    fn integrability(&self, payoff: &Payoff) -> IntegrabilityCheck {
        polynomial_growth_check(payoff, self.forward())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn assert_close(x: f64, y: f64, tol: f64) {
        assert!((x - y).abs() <= tol, "{x} vs {y}");
    }

    #[test]
    fn zero_rate_reference_values() {
        let c = bs_curve(100.0, 0.2, 0.0, 1.0).unwrap();
        assert_eq!(c.discount(), 1.0);
        assert_eq!(c.forward(), 100.0);
        assert_close(c.lambda(100.0), 7.9655674554057963, 1e-13);
        assert_close(c.lambda(90.0), 13.589108116054802, 1e-13);
        assert_close(c.lambda(110.0), 4.292010941409888, 1e-13);
        assert_close(c.digital_ge(100.0), 0.46017216272297102, 1e-15);
        assert_eq!(c.digital_ge(100.0), c.digital_gt(100.0));
    }

    #[test]
    fn positive_rate_reference_values() {
        let c = bs_curve(100.0, 0.2, 0.05, 1.0).unwrap();
        assert_close(c.discount(), 0.95122942450071401, 1e-16);
        assert_close(c.lambda(90.0), 16.699448408415997, 1e-13);
        assert_close(c.lambda(100.0), 10.450583572185567, 1e-13);
        assert_close(c.lambda(110.0), 6.040088129724236, 1e-13);
        assert_close(c.digital_ge(100.0), 0.55961769237024252, 1e-15);
        assert_eq!(c.forward(), 100.0);
    }

    #[test]
    fn curve_shape_invariants() {
        let c = bs_curve(100.0, 0.2, 0.05, 1.0).unwrap();
        let mut prev_l = c.lambda(0.0);
        let mut prev_d = c.digital_ge(0.0);
        let mut a = 1.0;
        while a < 1.0e6 {
            let l = c.lambda(a);
            let d = c.digital_ge(a);
            assert!(l <= prev_l + 1e-12);
            assert!(d <= prev_d + 1e-15);
            assert!(l >= 0.0 && (0.0..=1.0).contains(&d));
            prev_l = l;
            prev_d = d;
            a *= 1.7;
        }
        assert_eq!(c.lambda(f64::INFINITY), 0.0);
    }

    #[test]
    fn density_integrates_digital_slope() {
        // λ″ is the negative derivative of the discounted digital in strike.
        let c = bs_curve(100.0, 0.2, 0.05, 1.0).unwrap();
        for a in [60.0, 95.0, 100.0, 140.0] {
            let h = 1e-4 * a;
            let slope = (c.digital_ge(a + h) - c.digital_ge(a - h)) / (2.0 * h);
            let dens = c.lambda_second(a).unwrap();
            assert_close(dens, -c.discount() * slope, 1e-8);
        }
    }

    #[test]
    fn rejects_bad_params() {
        assert!(bs_curve(0.0, 0.2, 0.0, 1.0).is_err());
        assert!(bs_curve(100.0, 0.0, 0.0, 1.0).is_err());
        assert!(bs_curve(100.0, 0.2, -0.01, 1.0).is_err());
        assert!(bs_curve(100.0, 0.2, 0.0, 0.0).is_err());
    }
}
