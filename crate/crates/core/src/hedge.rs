//! Static replication portfolios and their error measurement.
//!
//! Two constructions are provided. The digital strip discretizes
//! `∫f′(a)·1{X_T > a} da` with midpoint weights per partition cell and adds
//! the payoff's jump digitals exactly. The call-spread hedge approximates a
//! continuous payoff on a window `[α, β]` with
//! `f(α)·1{x ≥ α} − f(β)·1{x > β} + Σ c_k[(x−a_k)⁺ − (x−a_{k+1})⁺]`
//! on a uniform partition, where `c_k` is the secant slope of `f` over the
//! cell. Both are fixed portfolios: no rebalancing, terminal payoff a pure
//! function of `X_T`.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::market::{empirical_curve, mc_price, CallCurve, SamplePool};
use crate::math::kahan_sum;
use crate::payoff::Payoff;

#[derive(Debug, thiserror::Error)]
pub enum HedgeError {
    #[error("bad hedge grid: {0}")]
    BadGrid(String),
    #[error("bad window: {0}")]
    BadWindow(String),
}

/// Whether a digital pays on `{X_T ≥ a}` or `{X_T > a}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DigitalFlavor {
    Ge,
    Gt,
}

impl DigitalFlavor {
    /// Name used in portfolio CSV files.
    pub fn as_str(self) -> &'static str {
        match self {
            DigitalFlavor::Ge => "ge",
            DigitalFlavor::Gt => "gt",
        }
    }
}

#[derive(Clone, Copy, Debug)]
pub struct DigitalPosition {
    pub strike: f64,
    pub weight: f64,
    pub flavor: DigitalFlavor,
}

/// `weight` units of the spread `(x − lo)⁺ − (x − hi)⁺`.
#[derive(Clone, Copy, Debug)]
pub struct CallSpreadPosition {
    pub lo: f64,
    pub hi: f64,
    pub weight: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HedgeKind {
    DigitalStrip,
    CallSpread,
}

/// A static portfolio of T-bonds, digitals, and call spreads.
#[derive(Clone, Debug)]
pub struct HedgePortfolio {
    /// Units of the T-bond (each pays 1 at maturity).
    pub cash: f64,
    /// Digital positions, ascending by strike.
    pub digital_strip: Vec<DigitalPosition>,
    /// Call-spread positions, ascending by lower strike.
    pub call_spreads: Vec<CallSpreadPosition>,
    pub kind: HedgeKind,
}

/// Digital-strip replication of `p` over a partition.
///
/// The grid must be strictly increasing, nonnegative, and contain every
/// payoff kink that falls strictly inside its range. Each cell contributes
/// a `{X_T > a_j}` digital at its left node weighted by
/// `f′(midpoint)·width`; every payoff jump contributes its exact digital
/// (`≥` for the left part, `>` for the right part). Cash is `f(0)`.
pub fn build_digital_hedge(p: &Payoff, grid: &[f64]) -> Result<HedgePortfolio, HedgeError> {
    if grid.len() < 2 {
        return Err(HedgeError::BadGrid(format!(
            "need at least 2 grid nodes, got {}",
            grid.len()
        )));
    }
    if !grid.iter().all(|x| x.is_finite() && *x >= 0.0) {
        return Err(HedgeError::BadGrid("grid nodes must be finite and ≥ 0".into()));
    }
    if !grid.windows(2).all(|w| w[0] < w[1]) {
        return Err(HedgeError::BadGrid("grid must be strictly increasing".into()));
    }
    let (lo, hi) = (grid[0], grid[grid.len() - 1]);
    for &s in p.boundaries() {
        if s > lo && s < hi && grid.binary_search_by(|g| g.total_cmp(&s)).is_err() {
            return Err(HedgeError::BadGrid(format!(
                "payoff kink at {s} is not a grid node"
            )));
        }
    }

    let mut digital_strip: Vec<DigitalPosition> = grid
        .windows(2)
        .map(|w| DigitalPosition {
            strike: w[0],
            weight: p.derivative(0.5 * (w[0] + w[1])) * (w[1] - w[0]),
            flavor: DigitalFlavor::Gt,
        })
        .collect();
    for j in p.jumps() {
        if j.left != 0.0 {
            digital_strip.push(DigitalPosition {
                strike: j.strike,
                weight: j.left,
                flavor: DigitalFlavor::Ge,
            });
        }
        if j.right != 0.0 {
            digital_strip.push(DigitalPosition {
                strike: j.strike,
                weight: j.right,
                flavor: DigitalFlavor::Gt,
            });
        }
    }

    Ok(HedgePortfolio {
        cash: p.eval(0.0),
        digital_strip,
        call_spreads: Vec::new(),
        kind: HedgeKind::DigitalStrip,
    })
}

/// Call-spread replication of `p` on `[α, β]` with `n` uniform cells.
///
/// The payoff must be continuous on the window. The portfolio is the two
/// boundary digitals `f(α)·1{x ≥ α}` and `−f(β)·1{x > β}` plus `n` spreads
/// whose weights are the secant slopes of `p` over each cell; it reproduces
/// any payoff that is linear between partition nodes exactly on `[α, β]`.
pub fn build_call_spread_hedge(
    p: &Payoff,
    alpha: f64,
    beta: f64,
    n: usize,
) -> Result<HedgePortfolio, HedgeError> {
    if !(alpha >= 0.0 && alpha.is_finite() && beta.is_finite() && alpha < beta) {
        return Err(HedgeError::BadWindow(format!(
            "need 0 ≤ α < β < ∞, got α = {alpha}, β = {beta}"
        )));
    }
    if n == 0 {
        return Err(HedgeError::BadWindow("need at least one cell".into()));
    }
    for j in p.jumps() {
        if j.strike >= alpha && j.strike <= beta && (j.left != 0.0 || j.right != 0.0) {
            return Err(HedgeError::BadWindow(format!(
                "payoff must be continuous on the window; it jumps at {}",
                j.strike
            )));
        }
    }

    let width = (beta - alpha) / n as f64;
    let node = |k: usize| {
        if k == n {
            beta
        } else {
            alpha + k as f64 * width
        }
    };
    let call_spreads: Vec<CallSpreadPosition> = (0..n)
        .map(|k| {
            let (a, b) = (node(k), node(k + 1));
            CallSpreadPosition {
                lo: a,
                hi: b,
                weight: (p.eval(b) - p.eval(a)) / (b - a),
            }
        })
        .collect();
    let digital_strip = alloc::vec![
        DigitalPosition {
            strike: alpha,
            weight: p.eval(alpha),
            flavor: DigitalFlavor::Ge,
        },
        DigitalPosition {
            strike: beta,
            weight: -p.eval(beta),
            flavor: DigitalFlavor::Gt,
        },
    ];

    Ok(HedgePortfolio {
        cash: 0.0,
        digital_strip,
        call_spreads,
        kind: HedgeKind::CallSpread,
    })
}

/// What the portfolio pays if the underlying finishes at `x`.
pub fn terminal_payoff(h: &HedgePortfolio, x: f64) -> f64 {
    let digitals = h.digital_strip.iter().map(|d| {
        let on = match d.flavor {
            DigitalFlavor::Ge => x >= d.strike,
            DigitalFlavor::Gt => x > d.strike,
        };
        if on {
            d.weight
        } else {
            0.0
        }
    });
    let spreads = h.call_spreads.iter().map(|s| {
        let lo_leg = if x > s.lo { x - s.lo } else { 0.0 };
        let hi_leg = if x > s.hi { x - s.hi } else { 0.0 };
        s.weight * (lo_leg - hi_leg)
    });
    h.cash + kahan_sum(digitals.chain(spreads))
}

/// Marks the portfolio against a call curve: bonds at the discount factor,
/// digitals at their discounted curve prices, spreads at call-price
/// differences.
pub fn portfolio_value(h: &HedgePortfolio, c: &dyn CallCurve) -> f64 {
    let disc = c.discount();
    let digitals = h.digital_strip.iter().map(|d| {
        let q = match d.flavor {
            DigitalFlavor::Ge => c.digital_ge(d.strike),
            DigitalFlavor::Gt => c.digital_gt(d.strike),
        };
        d.weight * disc * q
    });
    let spreads = h
        .call_spreads
        .iter()
        .map(|s| s.weight * (c.lambda(s.lo) - c.lambda(s.hi)));
    h.cash * disc + kahan_sum(digitals.chain(spreads))
}

/// Replication quality of `h` against `p` over a sample pool.
#[derive(Clone, Copy, Debug)]
pub struct ReplicationReport {
    /// `max |terminal_payoff − f|` over the pool's terminal draws.
    pub sup_error: f64,
    /// Mean of the same absolute errors.
    pub mean_abs_error: f64,
    /// Portfolio value on the pool's empirical curve minus the pool's
    /// discounted sample mean of `f`.
    pub value_gap: f64,
}

pub fn replication_report(
    h: &HedgePortfolio,
    p: &Payoff,
    pool: &SamplePool,
    discount: f64,
) -> ReplicationReport {
    let xs = pool.terminal();
    let mut sup = 0.0_f64;
    let errs = xs.iter().map(|&x| {
        let e = libm::fabs(terminal_payoff(h, x) - p.eval(x));
        if e > sup {
            sup = e;
        }
        e
    });
    let mean = kahan_sum(errs) / xs.len() as f64;
    let curve = empirical_curve(pool, discount);
    let (mc, _se) = mc_price(pool, p, discount);
    ReplicationReport {
        sup_error: sup,
        mean_abs_error: mean,
        value_gap: portfolio_value(h, &curve) - mc,
    }
}
