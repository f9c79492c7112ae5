//! Replication pricing of European payoffs off a call curve.
//!
//! Five interchangeable forms of the same value are provided:
//!
//! * [`price_theorem1`]: Stieltjes form `B_T⁻¹f(0) − ∫f′ dλ` plus the two
//!   digital jump sums. The reference form; works on every backend.
//! * [`price_lebesgue`]: the Stieltjes integral rewritten as
//!   `+∫f′(a)·B_T⁻¹·Q(X_T > a) da`.
//! * [`price_bick`]: integrate by parts once more, `∫f″(a)λ(a) da` plus
//!   slope-break terms `Σ(f′(s⁺)−f′(s⁻))λ(s)`; needs second derivatives.
//! * [`price_bl`]: integrate the payoff against the curve's density
//!   `λ″`; only backends with a closed-form density.
//! * [`price_convex`]: a convex decomposition priced as cash, forward,
//!   calls at the atoms, and `∫λ dμ_ac`.
//!
//! [`price_windowed`] prices `f·1{x ∈ window}` with configurable open or
//! closed endpoints. All forms share one adaptive refinement driver, one
//! truncation rule, and one report layout whose four value fields sum to
//! the price exactly.

mod forms;
mod quad;
mod validity;

pub use forms::{
    price_bick, price_bl, price_convex, price_lebesgue, price_theorem1, price_windowed,
};
pub use validity::{validate_class, ValidityReport};

pub(crate) use forms::forced_nodes;
pub(crate) use quad::{adaptive_refine, CachedCurve};
pub(crate) use validity::tail_scan;

use alloc::string::String;

use crate::market::CallCurve;

/// Quadrature and truncation controls.
#[derive(Clone, Copy, Debug)]
pub struct QuadConfig {
    /// Stop refining once two successive partition values agree within
    /// this absolute tolerance.
    pub tol: f64,
    /// Truncation threshold for the neglected tail product
    /// `|f(a)|·Q(X_T ≥ a)`.
    pub tail_tol: f64,
    /// Refinement budget in quadrature cells.
    pub max_nodes: usize,
}

impl QuadConfig {
    /// Defaults scaled to the curve: `tol = 1e-6·max(1, λ(0))`,
    /// `tail_tol = 1e-9·max(1, λ(0))`, budget `2·10⁵` cells.
    pub fn for_curve(c: &dyn CallCurve) -> Self {
        let scale = c.forward().max(1.0);
        Self {
            tol: 1e-6 * scale,
            tail_tol: 1e-9 * scale,
            max_nodes: 200_000,
        }
    }

    pub(crate) fn validate(&self) {
        assert!(self.tol.is_finite() && self.tol > 0.0, "bad tol {}", self.tol);
        assert!(
            self.tail_tol.is_finite() && self.tail_tol > 0.0,
            "bad tail_tol {}",
            self.tail_tol
        );
        assert!(self.max_nodes >= 4, "bad max_nodes {}", self.max_nodes);
    }
}

/// Priced value with its replication breakdown.
///
/// The four value fields always satisfy
/// `value = cash_term + integral_term + jump_left_term + jump_right_term`
/// as an exact floating-point identity. Which conceptual piece lands in
/// which field depends on the form; each pricing function documents its
/// mapping.
#[derive(Clone, Debug)]
pub struct PriceReport {
    pub value: f64,
    /// Discounted payoff-at-zero leg (zero for forms without one).
    pub cash_term: f64,
    /// Quadrature leg.
    pub integral_term: f64,
    /// Leg paired with `Q(X_T ≥ ·)` digitals.
    pub jump_left_term: f64,
    /// Leg paired with `Q(X_T > ·)` digitals.
    pub jump_right_term: f64,
    /// Strike at which the integration domain was truncated.
    pub truncation: f64,
    /// Estimated discounted magnitude of the neglected tail,
    /// `B_T⁻¹·|f(a_max−)|·Q(X_T ≥ a_max)`.
    pub tail_bound: f64,
    /// Cells in the final quadrature partition.
    pub n_quadrature: usize,
}

impl PriceReport {
    pub(crate) fn assemble(
        cash_term: f64,
        integral_term: f64,
        jump_left_term: f64,
        jump_right_term: f64,
        truncation: f64,
        tail_bound: f64,
        n_quadrature: usize,
    ) -> Self {
        Self {
            value: cash_term + integral_term + jump_left_term + jump_right_term,
            cash_term,
            integral_term,
            jump_left_term,
            jump_right_term,
            truncation,
            tail_bound,
            n_quadrature,
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum PriceError {
    /// The payoff is outside the admissible class for this curve: the
    /// vanishing-product tail condition or the integrability probe failed.
    #[error("tail condition failed: {0}")]
    TailConditionFailed(String),
    #[error("quadrature did not converge: {0}")]
    QuadratureNoConvergence(String),
    #[error("second derivative unavailable: {0}")]
    SecondDerivativeUnavailable(String),
    #[error("density unavailable: {0}")]
    DensityUnavailable(String),
    #[error("bad window: {0}")]
    BadWindow(String),
}
