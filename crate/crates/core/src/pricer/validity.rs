//! Admissibility checks run before pricing: the vanishing-product tail
//! condition that justifies truncating the integration domain, and a
//! backend-specific integrability probe.

use alloc::format;
use alloc::string::String;

use crate::market::CallCurve;
use crate::payoff::Payoff;

use super::QuadConfig;

/// Digital threshold in the truncation rule: the tail may be cut only
/// where `Q(X_T ≥ a)` has fallen below this.
const DIGITAL_CUTOFF: f64 = 1e-9;

/// Longest geometric scan before giving up (`a₀·2^120` overflows every
/// realistic curve long before this).
const MAX_DOUBLINGS: usize = 120;

pub(crate) struct TailScan {
    /// Truncation strike, when found.
    pub a_max: Option<f64>,
    /// Discounted neglected-tail estimate at `a_max`.
    pub tail_bound: f64,
    /// Product decayed below tolerance and was nonincreasing over the last
    /// three grid points.
    pub decayed: bool,
    pub detail: String,
}

/// Scans the geometric grid `aₘ = a₀·2^m`, `a₀ = max(1, forward)`, for the
/// first strike where both `Q(X_T ≥ aₘ) < 1e-9` and
/// `|f(aₘ−)|·Q(X_T ≥ aₘ) < tail_tol`. A product that is NaN (infinite
/// payoff against a vanished digital) counts as a failure at that point.
pub(crate) fn tail_scan(p: &Payoff, c: &dyn CallCurve, cfg: &QuadConfig) -> TailScan {
    let a0 = c.forward().max(1.0);
    let product = |a: f64| libm::fabs(p.value_left(a)) * c.digital_ge(a);

    let mut a = a0;
    let mut found = None;
    for _ in 0..=MAX_DOUBLINGS {
        let digital = c.digital_ge(a);
        let prod = product(a);
        if digital < DIGITAL_CUTOFF && prod < cfg.tail_tol {
            found = Some((a, prod));
            break;
        }
        a *= 2.0;
        if !a.is_finite() {
            break;
        }
    }

    let Some((a_max, prod_here)) = found else {
        return TailScan {
            a_max: None,
            tail_bound: f64::INFINITY,
            decayed: false,
            detail: format!(
                "vanishing-product tail condition failed: |f(a)|·Q(X_T ≥ a) never fell \
                 below {:.1e} on the doubling strike grid from {a0}",
                cfg.tail_tol
            ),
        };
    };

    // Beyond the cut the product must keep shrinking, otherwise the bound
    // at a_max says nothing about the neglected mass.
    let p1 = product(a_max * 2.0);
    let p2 = product(a_max * 4.0);
    let decreasing = prod_here >= p1 && p1 >= p2 && !p1.is_nan() && !p2.is_nan();
    if !decreasing {
        return TailScan {
            a_max: Some(a_max),
            tail_bound: c.discount() * prod_here,
            decayed: false,
            detail: format!(
                "vanishing-product tail condition failed: |f(a)|·Q(X_T ≥ a) is not \
                 decreasing past the cut ({prod_here:.3e}, {p1:.3e}, {p2:.3e} at strikes \
                 {a_max}, {}, {})",
                a_max * 2.0,
                a_max * 4.0
            ),
        };
    }

    TailScan {
        a_max: Some(a_max),
        tail_bound: c.discount() * prod_here,
        decayed: true,
        detail: format!(
            "tail product fell below {:.1e} at strike {a_max} and keeps decreasing",
            cfg.tail_tol
        ),
    }
}

/// Outcome of the admissibility checks for pricing `p` off `c`.
#[derive(Clone, Debug)]
pub struct ValidityReport {
    /// The payoff is piecewise C¹ with finitely many kinks (guaranteed by
    /// construction of [`Payoff`]).
    pub piecewise_smooth: bool,
    /// Backend integrability probe passed.
    pub integrable: bool,
    pub integrable_detail: String,
    /// Tail product vanished and was eventually decreasing.
    pub tail_decay: bool,
    pub tail_detail: String,
    /// Truncation strike the pricers would use, when one exists.
    pub truncation: Option<f64>,
    /// Discounted neglected-tail estimate at the truncation strike.
    pub tail_bound: Option<f64>,
}

impl ValidityReport {
    pub fn all_pass(&self) -> bool {
        self.piecewise_smooth && self.integrable && self.tail_decay
    }
}

/// Checks that `p` is in the admissible class for pricing off `c`:
/// piecewise smoothness, backend integrability, and the vanishing-product
/// tail condition with the truncation strike it yields.
pub fn validate_class(p: &Payoff, c: &dyn CallCurve, cfg: &QuadConfig) -> ValidityReport {
    cfg.validate();
    let integ = c.integrability(p);
    let tail = tail_scan(p, c, cfg);
    ValidityReport {
        piecewise_smooth: true,
        integrable: integ.ok,
        integrable_detail: integ.detail,
        tail_decay: tail.decayed,
        tail_detail: tail.detail,
        truncation: tail.a_max,
        tail_bound: tail.a_max.map(|_| tail.tail_bound),
    }
}
