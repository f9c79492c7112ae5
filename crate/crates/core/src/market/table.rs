//! Call curve interpolated from a finite table of quotes.
//!
//! `λ` is the piecewise-linear interpolant through the quotes, extended
//! left of the first strike with the first quoted slope and right of the
//! last strike with the last quoted slope until it hits zero at `a*`; it is
//! identically zero beyond. Digitals are the negated one-sided slopes of
//! `λ` times `B_T`, so they are right-continuous step functions for the
//! `>` flavor and left-continuous for the `≥` flavor, with atoms wherever
//! the slope jumps (including 0 and `a*`).

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::payoff::Payoff;

use super::{CallCurve, IntegrabilityCheck, MarketError};

/// Relative slack for convexity and slope-bound checks, absorbing the
/// rounding of quotes given to few decimals.
const SLACK: f64 = 1e-12;

#[derive(Clone, Debug)]
struct DigitalOverrides {
    strikes: Vec<f64>,
    dge: Vec<f64>,
}

/// Piecewise-linear call curve through quoted strikes.
#[derive(Clone, Debug)]
pub struct TableCurve {
    /// `0 = n_0 < k_1 < … < k_m < a*`.
    nodes: Vec<f64>,
    /// `λ` at each node; last entry is zero.
    values: Vec<f64>,
    /// Slope of `λ` on each cell `(nodes[i], nodes[i+1])`.
    slopes: Vec<f64>,
    discount: f64,
    maturity: f64,
    overrides: Option<DigitalOverrides>,
}

pub fn table_curve(rows: &[(f64, f64)], discount: f64) -> Result<TableCurve, MarketError> {
    TableCurve::build(rows, discount, None)
}

/// Like [`table_curve`], but the third column pins `digital_ge` at each
/// quoted strike. The quotes extend as a step function: `digital_ge(a)`
/// takes the value at the next quoted strike `≥ a`, `digital_gt(a)` the
/// value at the next strike `> a`, and both are zero past the last quote.
/// Consistency of the overrides with the call quotes is not enforced.
pub fn table_curve_with_digitals(
    rows: &[(f64, f64, f64)],
    discount: f64,
) -> Result<TableCurve, MarketError> {
    let calls: Vec<(f64, f64)> = rows.iter().map(|&(k, c, _)| (k, c)).collect();
    let strikes: Vec<f64> = rows.iter().map(|&(k, _, _)| k).collect();
    let dge: Vec<f64> = rows.iter().map(|&(_, _, d)| d).collect();
    for (i, &d) in dge.iter().enumerate() {
        if !(d.is_finite() && (0.0..=1.0).contains(&d)) {
            return Err(MarketError::BadParams(format!(
                "digital quote {d} at strike {} is outside [0, 1]",
                strikes[i]
            )));
        }
        if i > 0 && d > dge[i - 1] + SLACK {
            return Err(MarketError::ArbitrageViolation(format!(
                "digital quotes increase from {} at strike {} to {} at strike {}",
                dge[i - 1],
                strikes[i - 1],
                d,
                strikes[i]
            )));
        }
    }
    TableCurve::build(&calls, discount, Some(DigitalOverrides { strikes, dge }))
}

impl TableCurve {
    fn build(
        rows: &[(f64, f64)],
        discount: f64,
        overrides: Option<DigitalOverrides>,
    ) -> Result<TableCurve, MarketError> {
        let bad = |msg: String| Err(MarketError::BadParams(msg));
        if !(discount.is_finite() && discount > 0.0 && discount <= 1.0) {
            return bad(format!("discount must lie in (0, 1], got {discount}"));
        }
        if rows.len() < 2 {
            return bad(format!(
                "need at least two quotes to interpolate, got {}",
                rows.len()
            ));
        }
        for &(k, c) in rows {
            if !(k.is_finite() && k > 0.0) {
                return bad(format!("strikes must be finite and positive, got {k}"));
            }
            if !(c.is_finite() && c > 0.0) {
                return bad(format!("call price at strike {k} must be positive, got {c}"));
            }
        }
        for w in rows.windows(2) {
            if w[1].0 <= w[0].0 {
                return bad(format!(
                    "strikes must be strictly increasing, got {} then {}",
                    w[0].0, w[1].0
                ));
            }
        }

        let m = rows.len();
        let quoted_slopes: Vec<f64> = rows
            .windows(2)
            .map(|w| (w[1].1 - w[0].1) / (w[1].0 - w[0].0))
            .collect();

        for (w, &s) in rows.windows(2).zip(&quoted_slopes) {
            if s > 0.0 {
                return Err(MarketError::ArbitrageViolation(format!(
                    "call price increases from ({}, {}) to ({}, {})",
                    w[0].0, w[0].1, w[1].0, w[1].1
                )));
            }
        }
        for (i, w) in quoted_slopes.windows(2).enumerate() {
            if w[1] < w[0] - SLACK * (1.0 + libm::fabs(w[0])) {
                return Err(MarketError::ArbitrageViolation(format!(
                    "negative butterfly at strikes {}/{}/{}",
                    rows[i].0,
                    rows[i + 1].0,
                    rows[i + 2].0
                )));
            }
        }
        let first = quoted_slopes[0];
        if -first > discount * (1.0 + SLACK) {
            return Err(MarketError::ArbitrageViolation(format!(
                "slope {first} between strikes {} and {} implies a digital above 1",
                rows[0].0, rows[1].0
            )));
        }
        let last = *quoted_slopes.last().expect("at least one slope");
        if last >= 0.0 {
            return Err(MarketError::ArbitrageViolation(format!(
                "call prices do not decay after strike {}; the curve cannot reach zero",
                rows[m - 1].0
            )));
        }

        let a_star = rows[m - 1].0 - rows[m - 1].1 / last;
        let mut nodes = Vec::with_capacity(m + 2);
        let mut values = Vec::with_capacity(m + 2);
        let mut slopes = Vec::with_capacity(m + 1);
        nodes.push(0.0);
        values.push(rows[0].1 - first * rows[0].0);
        slopes.push(first);
        for (i, &(k, c)) in rows.iter().enumerate() {
            nodes.push(k);
            values.push(c);
            slopes.push(if i + 1 < m { quoted_slopes[i] } else { last });
        }
        nodes.push(a_star);
        values.push(0.0);

        Ok(TableCurve {
            nodes,
            values,
            slopes,
            discount,
            maturity: 1.0,
            overrides,
        })
    }

    /// Sets the maturity reported by the curve (metadata only; quote
    /// tables carry no timestamp of their own).
    pub fn with_maturity(mut self, maturity: f64) -> Self {
        assert!(maturity.is_finite() && maturity > 0.0, "bad maturity {maturity}");
        self.maturity = maturity;
        self
    }

    /// Strike at which the extrapolated curve reaches zero.
    pub fn support_end(&self) -> f64 {
        *self.nodes.last().expect("nonempty")
    }

    fn slope_based_ge(&self, a: f64) -> f64 {
        if a == 0.0 {
            return 1.0;
        }
        if a > self.support_end() {
            return 0.0;
        }
        // Incoming slope: cell whose half-open interval (n_j, n_{j+1}] holds a.
        let j = self.nodes.partition_point(|&n| n < a).saturating_sub(1);
        clamp01(-self.slopes[j.min(self.slopes.len() - 1)] / self.discount)
    }

    fn slope_based_gt(&self, a: f64) -> f64 {
        if a >= self.support_end() {
            return 0.0;
        }
        // Outgoing slope: cell whose half-open interval [n_j, n_{j+1}) holds a.
        let j = self.nodes.partition_point(|&n| n <= a).saturating_sub(1);
        clamp01(-self.slopes[j.min(self.slopes.len() - 1)] / self.discount)
    }
}

fn clamp01(x: f64) -> f64 {
    x.clamp(0.0, 1.0)
}

impl CallCurve for TableCurve {
    fn maturity(&self) -> f64 {
        self.maturity
    }

    fn discount(&self) -> f64 {
        self.discount
    }

    fn lambda(&self, a: f64) -> f64 {
        assert!(a >= 0.0 && !a.is_nan(), "bad strike {a}");
        if a >= self.support_end() {
            return 0.0;
        }
        let i = self.nodes.partition_point(|&n| n <= a).saturating_sub(1);
        let v = self.values[i] + self.slopes[i] * (a - self.nodes[i]);
        if v > 0.0 {
            v
        } else {
            0.0
        }
    }

    fn digital_ge(&self, a: f64) -> f64 {
        assert!(a >= 0.0 && !a.is_nan(), "bad strike {a}");
        match &self.overrides {
            None => self.slope_based_ge(a),
            Some(o) => {
                if a == 0.0 {
                    return 1.0;
                }
                match o.strikes.partition_point(|&k| k < a) {
                    i if i < o.dge.len() => o.dge[i],
                    _ => 0.0,
                }
            }
        }
    }

    fn digital_gt(&self, a: f64) -> f64 {
        assert!(a >= 0.0 && !a.is_nan(), "bad strike {a}");
        match &self.overrides {
            None => self.slope_based_gt(a),
            Some(o) => match o.strikes.partition_point(|&k| k <= a) {
                i if i < o.dge.len() => o.dge[i],
                _ => 0.0,
            },
        }
    }

    fn strike_grid(&self) -> Option<Vec<f64>> {
        Some(self.nodes.clone())
    }

    fn integrability(&self, _payoff: &Payoff) -> IntegrabilityCheck {
        IntegrabilityCheck {
            ok: true,
            detail: format!(
                "quoted curve has compact support: no mass beyond strike {}",
                self.support_end()
            ),
        }
    }
}
