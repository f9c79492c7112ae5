//! Decomposition of a convex payoff into cash, an initial slope, kink atoms,
//! and an absolutely continuous curvature density:
//!
//! `f(x) = f(0) + f′₊(0)·x + Σᵢ mᵢ·(x − aᵢ)⁺ + ∫ (x − a)⁺ μ_ac(a) da`
//!
//! with `mᵢ = f′(aᵢ+) − f′(aᵢ−) ≥ 0` and `μ_ac = f″` on smooth pieces.

use alloc::format;
use alloc::vec::Vec;

use super::{Payoff, PayoffError};

/// Grid density used for the sample-based convexity verification.
const GRID: usize = 1024;
/// Relative slack allowed when comparing derivative samples.
const SLOPE_SLACK: f64 = 1e-9;

pub struct ConvexDecomposition<'a> {
    payoff: &'a Payoff,
    /// `f(0)`.
    pub f0: f64,
    /// `f′₊(0)`.
    pub slope0: f64,
    /// Kink atoms `(aᵢ, mᵢ)` with `aᵢ > 0` and `mᵢ > 0`.
    pub atoms: Vec<(f64, f64)>,
}

impl core::fmt::Debug for ConvexDecomposition<'_> {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.debug_struct("ConvexDecomposition")
            .field("f0", &self.f0)
            .field("slope0", &self.slope0)
            .field("atoms", &self.atoms)
            .finish()
    }
}

impl<'a> ConvexDecomposition<'a> {
    pub fn payoff(&self) -> &'a Payoff {
        self.payoff
    }

    /// Curvature density `μ_ac(a)`; zero on segments without curvature.
    pub fn density(&self, a: f64) -> f64 {
        self.payoff.second(a).unwrap_or(0.0).max(0.0)
    }

    /// Evaluate the decomposition's right side at `x`.
    ///
    /// The density integral uses composite Simpson panels split at the
    /// payoff's boundaries; accurate well past the 1e-8 relative level for
    /// the polynomial densities the catalog produces.
    pub fn reconstruct(&self, x: f64) -> f64 {
        assert!(x >= 0.0, "payoff evaluated at negative argument {x}");
        let mut v = self.f0 + self.slope0 * x;
        for &(a, m) in &self.atoms {
            if x > a {
                v += m * (x - a);
            }
        }
        // Integration nodes: payoff boundaries inside (0, x).
        let mut cuts: Vec<f64> = [0.0]
            .into_iter()
            .chain(
                self.payoff
                    .boundaries()
                    .iter()
                    .copied()
                    .filter(|&b| b > 0.0 && b < x),
            )
            .chain([x])
            .collect();
        cuts.dedup();
        for pair in cuts.windows(2) {
            // Evaluate curvature through the segment owning this piece so
            // panel endpoints that touch a kink do not leak the neighbour's
            // curvature into the integral.
            let seg = &self.payoff.segments[self.payoff.segment_index(0.5 * (pair[0] + pair[1]))];
            let density = |a: f64| seg.second_at(a).unwrap_or(0.0).max(0.0);
            v += simpson(|a| (x - a) * density(a), pair[0], pair[1], 256);
        }
        v
    }
}

fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, panels: usize) -> f64 {
    if b <= a {
        return 0.0;
    }
    let h = (b - a) / panels as f64;
    let mut acc = f(a) + f(b);
    for i in 1..panels {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        acc += w * f(a + h * i as f64);
    }
    acc * h / 3.0
}

/// Verify convexity by sampling and extract the decomposition.
///
/// The check is sample-based: 1024 derivative samples per segment plus the
/// one-sided limits at every kink must be nondecreasing, value jumps must be
/// zero, and curvature (where available) must be nonnegative. Segments
/// without a second derivative must have constant sampled slope.
pub fn convex_decompose(p: &Payoff) -> Result<ConvexDecomposition<'_>, PayoffError> {
    for j in p.jumps() {
        if j.left != 0.0 || j.right != 0.0 {
            return Err(PayoffError::NotConvex(format!(
                "value jump at {}",
                j.strike
            )));
        }
    }

    let bounds = p.boundaries();
    for (k, seg) in p.segments.iter().enumerate() {
        let hi = seg.sample_hi();
        let mut prev = seg.deriv_at(seg.lo);
        for i in 1..=GRID {
            let a = seg.lo + (hi - seg.lo) * i as f64 / GRID as f64;
            let d = seg.deriv_at(a);
            let slack = SLOPE_SLACK * (1.0 + libm::fabs(prev).max(libm::fabs(d)));
            if d < prev - slack {
                return Err(PayoffError::NotConvex(format!(
                    "derivative decreases from {prev} to {d} near {a}"
                )));
            }
            if seg.second.is_none() {
                let first = seg.deriv_at(seg.lo);
                if libm::fabs(d - first) > slack {
                    return Err(PayoffError::NotConvex(format!(
                        "segment starting at {} has curvature but no second derivative",
                        seg.lo
                    )));
                }
            } else if let Some(s2) = seg.second_at(a) {
                if s2 < -SLOPE_SLACK * (1.0 + libm::fabs(s2)) {
                    return Err(PayoffError::NotConvex(format!(
                        "negative curvature {s2} at {a}"
                    )));
                }
            }
            prev = d;
        }
        if k + 1 < p.segments.len() {
            let s = bounds[k + 1];
            let (dl, dr) = (p.deriv_left(s), p.deriv_right(s));
            let slack = SLOPE_SLACK * (1.0 + libm::fabs(dl).max(libm::fabs(dr)));
            if dr < dl - slack {
                return Err(PayoffError::NotConvex(format!(
                    "derivative drops from {dl} to {dr} across kink {s}"
                )));
            }
        }
    }

    let atoms: Vec<(f64, f64)> = bounds
        .iter()
        .skip(1)
        .filter_map(|&s| {
            let m = p.deriv_right(s) - p.deriv_left(s);
            let keep = m > 1e-12 * (1.0 + libm::fabs(p.deriv_left(s)));
            keep.then_some((s, m))
        })
        .collect();

    Ok(ConvexDecomposition {
        payoff: p,
        f0: p.eval(0.0),
        slope0: p.deriv_right(0.0),
        atoms,
    })
}
