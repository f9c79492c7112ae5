//! Payoff functions `f: [0, ∞) → ℝ` that are piecewise C¹ with finitely many
//! kink/jump points `0 = s_0 < s_1 < … < s_N`.
//!
//! A [`Payoff`] stores one [`Segment`] per maximal smooth piece plus the
//! function value at every boundary point, so the value at a boundary, its
//! one-sided limits, and the two jumps `f(s_k) − f(s_k−)` and
//! `f(s_k+) − f(s_k)` are all distinct, queryable quantities. The jump from
//! the left at zero is defined to be zero.

pub mod catalog;
mod convex;

pub use catalog::{builtin_catalog, FamilyParams};
pub use convex::{convex_decompose, ConvexDecomposition};

use alloc::boxed::Box;
use alloc::format;
use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec::Vec;

/// Hard cap on the number of boundary points beyond zero.
pub const MAX_KINKS: usize = 10_000;

type ScalarFn = Box<dyn Fn(f64) -> f64 + Send + Sync>;

#[derive(Debug, thiserror::Error)]
pub enum PayoffError {
    #[error("unknown payoff family `{0}`")]
    UnknownPayoff(String),
    #[error("bad payoff parameters: {0}")]
    BadParams(String),
    #[error("payoff is not convex: {0}")]
    NotConvex(String),
}

/// One maximal C¹ piece of a payoff on the open interval `(lo, hi)`.
///
/// `value` and `deriv` must be evaluable on the closed interval so one-sided
/// limits at the endpoints can be taken; `hi` may be `f64::INFINITY`.
pub struct Segment {
    lo: f64,
    hi: f64,
    value: ScalarFn,
    deriv: ScalarFn,
    second: Option<ScalarFn>,
}

impl Segment {
    pub fn new(
        lo: f64,
        hi: f64,
        value: impl Fn(f64) -> f64 + Send + Sync + 'static,
        deriv: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        Self {
            lo,
            hi,
            value: Box::new(value),
            deriv: Box::new(deriv),
            second: None,
        }
    }

    /// Attach a second derivative, enabling the pricing forms that need `f″`.
    pub fn with_second(mut self, second: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        self.second = Some(Box::new(second));
        self
    }

    pub fn lo(&self) -> f64 {
        self.lo
    }

    pub fn hi(&self) -> f64 {
        self.hi
    }

    fn value_at(&self, x: f64) -> f64 {
        (self.value)(x)
    }

    fn deriv_at(&self, x: f64) -> f64 {
        (self.deriv)(x)
    }

    fn second_at(&self, x: f64) -> Option<f64> {
        self.second.as_ref().map(|f| f(x))
    }

    /// A finite stand-in for `hi` used when sampling the segment.
    fn sample_hi(&self) -> f64 {
        if self.hi.is_finite() {
            self.hi
        } else {
            self.lo + 4.0 * if self.lo > 1.0 { self.lo } else { 1.0 }
        }
    }
}

impl core::fmt::Debug for Segment {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.debug_struct("Segment")
            .field("lo", &self.lo)
            .field("hi", &self.hi)
            .field("second", &self.second.is_some())
            .finish()
    }
}

/// A boundary point of a payoff with its two one-sided jumps.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Jump {
    pub strike: f64,
    /// `f(s) − f(s−)`; forced to zero at `s = 0`.
    pub left: f64,
    /// `f(s+) − f(s)`.
    pub right: f64,
}

/// A piecewise-C¹ payoff on `[0, ∞)`.
pub struct Payoff {
    segments: Vec<Segment>,
    /// `boundaries[k] == segments[k].lo`; `boundaries[0] == 0`.
    boundaries: Vec<f64>,
    /// `f(s_k)` for each boundary, defaulting to the right limit.
    point_values: Vec<f64>,
    label: String,
}

impl core::fmt::Debug for Payoff {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.debug_struct("Payoff")
            .field("label", &self.label)
            .field("boundaries", &self.boundaries)
            .finish()
    }
}

impl Payoff {
    /// Build a payoff from segments covering `[0, ∞)`.
    ///
    /// Segments must start at 0, have matching endpoints, and end at
    /// `+∞`. `point_values` overrides `f(s_k)` at the given boundaries; any
    /// boundary without an override takes its right limit. Derivatives are
    /// spot-checked against finite differences of the values.
    pub fn new(
        segments: Vec<Segment>,
        point_values: &[(f64, f64)],
        label: impl Into<String>,
    ) -> Result<Self, PayoffError> {
        let label = label.into();
        if segments.is_empty() {
            return Err(PayoffError::BadParams(format!(
                "{label}: payoff needs at least one segment"
            )));
        }
        if segments.len() > MAX_KINKS + 1 {
            return Err(PayoffError::BadParams(format!(
                "{label}: more than {MAX_KINKS} boundary points"
            )));
        }
        if segments[0].lo != 0.0 {
            return Err(PayoffError::BadParams(format!(
                "{label}: first segment must start at 0, starts at {}",
                segments[0].lo
            )));
        }
        for pair in segments.windows(2) {
            if pair[0].hi != pair[1].lo {
                return Err(PayoffError::BadParams(format!(
                    "{label}: segment gap between {} and {}",
                    pair[0].hi, pair[1].lo
                )));
            }
        }
        let last = segments.last().expect("nonempty");
        if last.hi != f64::INFINITY {
            return Err(PayoffError::BadParams(format!(
                "{label}: last segment must extend to infinity, ends at {}",
                last.hi
            )));
        }
        for seg in &segments {
            if !seg.lo.is_finite() || seg.lo < 0.0 || !(seg.hi > seg.lo) {
                return Err(PayoffError::BadParams(format!(
                    "{label}: bad segment interval [{}, {})",
                    seg.lo, seg.hi
                )));
            }
        }

        let boundaries: Vec<f64> = segments.iter().map(|s| s.lo).collect();
        let mut values: Vec<f64> = segments.iter().map(|s| s.value_at(s.lo)).collect();
        for &(s, v) in point_values {
            match boundaries.binary_search_by(|b| b.partial_cmp(&s).expect("finite")) {
                Ok(k) => {
                    if !v.is_finite() {
                        return Err(PayoffError::BadParams(format!(
                            "{label}: non-finite point value at {s}"
                        )));
                    }
                    values[k] = v;
                }
                Err(_) => {
                    return Err(PayoffError::BadParams(format!(
                        "{label}: point value at {s} does not match any boundary"
                    )));
                }
            }
        }

        let payoff = Self {
            segments,
            boundaries,
            point_values: values,
            label,
        };
        payoff.check_segments()?;
        Ok(payoff)
    }

    /// Finite-difference check of `deriv` against `value` plus finiteness of
    /// the one-sided limits, sampled per segment.
    fn check_segments(&self) -> Result<(), PayoffError> {
        const SAMPLES: usize = 8;
        for seg in &self.segments {
            let hi = seg.sample_hi();
            for limit in [seg.value_at(seg.lo), seg.deriv_at(seg.lo)] {
                if !limit.is_finite() {
                    return Err(PayoffError::BadParams(format!(
                        "{}: non-finite one-sided limit at {}",
                        self.label, seg.lo
                    )));
                }
            }
            if seg.hi.is_finite() {
                for limit in [seg.value_at(seg.hi), seg.deriv_at(seg.hi)] {
                    if !limit.is_finite() {
                        return Err(PayoffError::BadParams(format!(
                            "{}: non-finite one-sided limit at {}",
                            self.label, seg.hi
                        )));
                    }
                }
            }
            for i in 0..SAMPLES {
                let a = seg.lo + (hi - seg.lo) * (i as f64 + 1.0) / (SAMPLES as f64 + 1.0);
                let h = 1e-5 * if a > 1.0 { a } else { 1.0 };
                let (a_lo, a_hi) = (a - h, a + h);
                if a_lo <= seg.lo || a_hi >= hi {
                    continue;
                }
                let fd = (seg.value_at(a_hi) - seg.value_at(a_lo)) / (2.0 * h);
                let d = seg.deriv_at(a);
                if !d.is_finite() || !fd.is_finite() {
                    return Err(PayoffError::BadParams(format!(
                        "{}: non-finite derivative near {a}",
                        self.label
                    )));
                }
                let scale = 1.0_f64.max(libm::fabs(d)).max(libm::fabs(fd));
                if libm::fabs(fd - d) > 1e-6 * scale {
                    return Err(PayoffError::BadParams(format!(
                        "{}: derivative mismatch at {a}: closed form {d}, finite difference {fd}",
                        self.label
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    /// The boundary points `s_0 = 0 < s_1 < … < s_N`.
    pub fn boundaries(&self) -> &[f64] {
        &self.boundaries
    }

    /// Index of the segment whose closure contains `x`, mapping boundary
    /// points to the segment on their right.
    fn segment_index(&self, x: f64) -> usize {
        // partition_point returns the count of boundaries <= x; x >= 0 makes
        // this at least 1.
        self.boundaries.partition_point(|&b| b <= x) - 1
    }

    /// Evaluate `f(x)`. Boundary points return the stored point value.
    ///
    /// `x` must be nonnegative; negative arguments are a precondition
    /// violation.
    pub fn eval(&self, x: f64) -> f64 {
        assert!(x >= 0.0, "payoff evaluated at negative argument {x}");
        if let Ok(k) = self
            .boundaries
            .binary_search_by(|b| b.partial_cmp(&x).expect("finite boundary"))
        {
            return self.point_values[k];
        }
        self.segments[self.segment_index(x)].value_at(x)
    }

    /// Left limit `f(x−)`, with `f(0−)` defined as `f(0)`.
    pub fn value_left(&self, x: f64) -> f64 {
        assert!(x >= 0.0, "payoff evaluated at negative argument {x}");
        if x == 0.0 {
            return self.eval(0.0);
        }
        match self
            .boundaries
            .binary_search_by(|b| b.partial_cmp(&x).expect("finite boundary"))
        {
            Ok(k) => self.segments[k - 1].value_at(x),
            Err(_) => self.segments[self.segment_index(x)].value_at(x),
        }
    }

    /// Right limit `f(x+)`.
    pub fn value_right(&self, x: f64) -> f64 {
        assert!(x >= 0.0, "payoff evaluated at negative argument {x}");
        self.segments[self.segment_index(x)].value_at(x)
    }

    /// Left derivative limit `f′(x−)`, with `f′(0−)` defined as `0`.
    pub fn deriv_left(&self, x: f64) -> f64 {
        assert!(x >= 0.0, "payoff evaluated at negative argument {x}");
        if x == 0.0 {
            return 0.0;
        }
        match self
            .boundaries
            .binary_search_by(|b| b.partial_cmp(&x).expect("finite boundary"))
        {
            Ok(k) => self.segments[k - 1].deriv_at(x),
            Err(_) => self.segments[self.segment_index(x)].deriv_at(x),
        }
    }

    /// Right derivative limit `f′(x+)`.
    pub fn deriv_right(&self, x: f64) -> f64 {
        assert!(x >= 0.0, "payoff evaluated at negative argument {x}");
        self.segments[self.segment_index(x)].deriv_at(x)
    }

    /// Derivative at an interior point (boundaries resolve to the right
    /// segment). Quadrature only calls this at cell midpoints, which are
    /// never boundary points.
    pub fn derivative(&self, x: f64) -> f64 {
        self.deriv_right(x)
    }

    /// Second derivative at an interior point, when the segment carries one.
    pub fn second(&self, x: f64) -> Option<f64> {
        assert!(x >= 0.0, "payoff evaluated at negative argument {x}");
        self.segments[self.segment_index(x)].second_at(x)
    }

    /// Whether every segment carries a second derivative.
    pub fn has_second(&self) -> bool {
        self.segments.iter().all(|s| s.second.is_some())
    }

    /// All boundary points with a nonzero jump on either side.
    pub fn jumps(&self) -> Vec<Jump> {
        let mut out = Vec::new();
        for (k, &s) in self.boundaries.iter().enumerate() {
            let left = if k == 0 {
                0.0
            } else {
                self.point_values[k] - self.segments[k - 1].value_at(s)
            };
            let right = self.segments[k].value_at(s) - self.point_values[k];
            if left != 0.0 || right != 0.0 {
                out.push(Jump {
                    strike: s,
                    left,
                    right,
                });
            }
        }
        out
    }

    /// The payoff `α·p + β·q`, with boundaries merged.
    pub fn linear_combination(
        alpha: f64,
        p: &Arc<Payoff>,
        beta: f64,
        q: &Arc<Payoff>,
    ) -> Result<Payoff, PayoffError> {
        if !alpha.is_finite() || !beta.is_finite() {
            return Err(PayoffError::BadParams(
                "non-finite combination coefficient".into(),
            ));
        }
        let mut bounds: Vec<f64> = p
            .boundaries
            .iter()
            .chain(q.boundaries.iter())
            .copied()
            .collect();
        bounds.sort_by(|a, b| a.partial_cmp(b).expect("finite boundary"));
        bounds.dedup();

        let mut segments = Vec::with_capacity(bounds.len());
        for (k, &lo) in bounds.iter().enumerate() {
            let hi = bounds.get(k + 1).copied().unwrap_or(f64::INFINITY);
            let mid = if hi.is_finite() {
                0.5 * (lo + hi)
            } else {
                lo + 1.0
            };
            let (pi, qi) = (p.segment_index(mid), q.segment_index(mid));
            let (pa, qa) = (Arc::clone(p), Arc::clone(q));
            let value = move |x: f64| {
                alpha * pa.segments[pi].value_at(x) + beta * qa.segments[qi].value_at(x)
            };
            let (pa, qa) = (Arc::clone(p), Arc::clone(q));
            let deriv = move |x: f64| {
                alpha * pa.segments[pi].deriv_at(x) + beta * qa.segments[qi].deriv_at(x)
            };
            let mut seg = Segment::new(lo, hi, value, deriv);
            if p.segments[pi].second.is_some() && q.segments[qi].second.is_some() {
                let (pa, qa) = (Arc::clone(p), Arc::clone(q));
                seg = seg.with_second(move |x: f64| {
                    alpha * pa.segments[pi].second_at(x).expect("checked")
                        + beta * qa.segments[qi].second_at(x).expect("checked")
                });
            }
            segments.push(seg);
        }

        let point_values: Vec<(f64, f64)> = bounds
            .iter()
            .map(|&s| (s, alpha * p.eval(s) + beta * q.eval(s)))
            .collect();
        let label = format!("{}*({}) + {}*({})", alpha, p.label, beta, q.label);
        Payoff::new(segments, &point_values, label)
    }
}
