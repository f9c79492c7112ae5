//! Pricing of barrier payoffs `f(X_T)·1{Y ∈ C}` over joint call curves.
//!
//! The value decomposes exactly like the plain European case, with every
//! curve quantity replaced by its event-gated counterpart:
//!
//! `value = B_T⁻¹f(0)·Q(Y∈C) − ∫f′ dλ^{Y,C}
//!        + B_T⁻¹ΣΔ₋f(s)·Q(X_T≥s, Y∈C) + B_T⁻¹ΣΔ₊f(s)·Q(X_T>s, Y∈C)`.
//!
//! The quadrature partition is driven by the *marginal* curve of the pool,
//! not the gated one. The marginal curve dominates every gated curve
//! (`λ^{Y,C} ≤ λ`, gated digitals ≤ plain digitals), so its admissibility
//! checks imply the gated ones, and because the partition is independent of
//! the event, knock-in plus knock-out reproduces the vanilla pricer's sum
//! cell by cell. That is what makes in-out parity exact on coupled samples
//! instead of merely tolerance-close.

use alloc::format;

use crate::market::{CallCurve, JointCallCurve};
use crate::math::kahan_sum;
use crate::payoff::Payoff;
use crate::pricer::{adaptive_refine, forced_nodes, tail_scan, CachedCurve, PriceError, QuadConfig};

/// Priced barrier option, split into the same legs as
/// [`PriceReport`](crate::pricer::PriceReport) plus the event probability.
#[derive(Clone, Debug)]
pub struct BarrierPriceReport {
    /// `cash_term + integral_term + jump_left_term + jump_right_term`.
    pub value: f64,
    /// `B_T⁻¹·f(0)·Q(Y ∈ C)`.
    pub cash_term: f64,
    /// `−∫₀^truncation f′(a) λ^{Y,C}(da)`.
    pub integral_term: f64,
    /// `B_T⁻¹·Σ Δ₋f(s)·Q(X_T ≥ s, Y ∈ C)`.
    pub jump_left_term: f64,
    /// `B_T⁻¹·Σ Δ₊f(s)·Q(X_T > s, Y ∈ C)`.
    pub jump_right_term: f64,
    /// `Q(Y ∈ C)`.
    pub barrier_prob: f64,
    /// Strike where the integral was cut.
    pub truncation: f64,
    /// `B_T⁻¹·|f(truncation−)|·Q(X_T ≥ truncation, Y ∈ C)`.
    pub tail_bound: f64,
    /// Cells in the shared quadrature partition.
    pub n_quadrature: usize,
}

/// Prices `f(X_T)·1{Y ∈ C}` from a joint call curve.
///
/// Admissibility (integrability probe, vanishing-product tail scan) and the
/// adaptive partition both run on the marginal curve; the gated Stieltjes
/// increments and digitals are then summed over that fixed partition. See
/// the module docs for why.
pub fn price_barrier(
    p: &Payoff,
    jc: &JointCallCurve,
    cfg: &QuadConfig,
) -> Result<BarrierPriceReport, PriceError> {
    cfg.validate();
    let marginal = jc.marginal();

    let integ = marginal.integrability(p);
    if !integ.ok {
        return Err(PriceError::TailConditionFailed(format!(
            "integrability probe failed: {}",
            integ.detail
        )));
    }
    let tail = tail_scan(p, &marginal, cfg);
    if !tail.decayed {
        return Err(PriceError::TailConditionFailed(tail.detail));
    }
    let a_max = tail.a_max.expect("decayed implies a cut");

    let forced = forced_nodes(0.0, a_max, p, &marginal);
    let cached = CachedCurve::new(&marginal);
    let mut cell =
        |a: f64, b: f64| p.derivative(0.5 * (a + b)) * (cached.lambda(b) - cached.lambda(a));
    let out = adaptive_refine(&forced, cfg.tol, cfg.max_nodes, &mut cell)?;

    let gated = CachedCurve::new(jc);
    let gated_sum = kahan_sum(out.nodes.windows(2).map(|w| {
        p.derivative(0.5 * (w[0] + w[1])) * (gated.lambda(w[1]) - gated.lambda(w[0]))
    }));

    let disc = jc.discount();
    let jumps = p.jumps();
    let jump_left_term =
        disc * kahan_sum(jumps.iter().map(|j| j.left * jc.digital_ge(j.strike)));
    let jump_right_term =
        disc * kahan_sum(jumps.iter().map(|j| j.right * jc.digital_gt(j.strike)));

    let cash_term = disc * p.eval(0.0) * jc.barrier_prob();
    let integral_term = -gated_sum;
    let tail_bound = disc * libm::fabs(p.value_left(a_max)) * jc.digital_ge(a_max);
    Ok(BarrierPriceReport {
        value: cash_term + integral_term + jump_left_term + jump_right_term,
        cash_term,
        integral_term,
        jump_left_term,
        jump_right_term,
        barrier_prob: jc.barrier_prob(),
        truncation: a_max,
        tail_bound,
        n_quadrature: out.cells,
    })
}
