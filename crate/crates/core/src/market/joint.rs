//! Call curves conditioned on a barrier event `{Y ∈ C}` where `Y` is a path
//! statistic coupled to the terminal draw.
//!
//! A [`JointCallCurve`] carries both the indicator-weighted quantities
//! (`λ^{Y,C}`, joint digitals, the event probability) and a marginal view of
//! the same pool, so barrier prices and their in-out complements are
//! computed from one set of samples in one summation order.

use alloc::format;
use alloc::vec::Vec;

use crate::math::KahanSum;
use crate::payoff::Payoff;

use super::sample::{BarrierKind, SamplePool};
use super::{half_pool_stability, mean_and_se, CallCurve, IntegrabilityCheck, MarketError};

/// Which coupled draw the event constrains.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StatKind {
    Terminal,
    RunningMax,
    RunningMin,
    Average,
}

impl StatKind {
    /// Barrier recording the pool must carry for this statistic.
    pub fn required_kind(self) -> Option<BarrierKind> {
        match self {
            StatKind::Terminal => None,
            StatKind::RunningMax => Some(BarrierKind::RunningMax),
            StatKind::RunningMin => Some(BarrierKind::RunningMin),
            StatKind::Average => Some(BarrierKind::Average),
        }
    }
}

/// One-dimensional interval with optionally open/closed finite endpoints.
/// `lo = −∞` or `hi = +∞` give rays; `lo == hi` with both ends closed is a
/// point; other degenerate combinations are the empty set.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
    pub lo_closed: bool,
    pub hi_closed: bool,
}

impl Interval {
    pub fn new(lo: f64, hi: f64, lo_closed: bool, hi_closed: bool) -> Result<Self, MarketError> {
        if lo.is_nan() || hi.is_nan() {
            return Err(MarketError::BadParams("interval endpoint is NaN".into()));
        }
        if lo > hi {
            return Err(MarketError::BadParams(format!(
                "interval endpoints out of order: lo {lo} > hi {hi}"
            )));
        }
        Ok(Self {
            lo,
            hi,
            lo_closed,
            hi_closed,
        })
    }

    /// `(−∞, b)` or `(−∞, b]`.
    pub fn below(b: f64, closed: bool) -> Result<Self, MarketError> {
        Self::new(f64::NEG_INFINITY, b, false, closed)
    }

    /// `(b, ∞)` or `[b, ∞)`.
    pub fn above(b: f64, closed: bool) -> Result<Self, MarketError> {
        Self::new(b, f64::INFINITY, closed, false)
    }

    pub fn full() -> Self {
        Self {
            lo: f64::NEG_INFINITY,
            hi: f64::INFINITY,
            lo_closed: false,
            hi_closed: false,
        }
    }

    pub fn empty() -> Self {
        Self {
            lo: 0.0,
            hi: 0.0,
            lo_closed: false,
            hi_closed: false,
        }
    }

    pub fn contains(&self, y: f64) -> bool {
        let above_lo = if self.lo_closed {
            y >= self.lo
        } else {
            y > self.lo
        };
        let below_hi = if self.hi_closed {
            y <= self.hi
        } else {
            y < self.hi
        };
        above_lo && below_hi
    }
}

/// Event `{Y ∈ C}` (or its complement) on one path statistic.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BarrierEvent {
    pub stat: StatKind,
    pub set: Interval,
    negated: bool,
}

impl BarrierEvent {
    pub fn new(stat: StatKind, set: Interval) -> Self {
        Self {
            stat,
            set,
            negated: false,
        }
    }

    /// Same statistic, complementary set.
    pub fn complement(&self) -> Self {
        Self {
            negated: !self.negated,
            ..*self
        }
    }

    pub fn is_negated(&self) -> bool {
        self.negated
    }

    pub fn contains(&self, y: f64) -> bool {
        self.set.contains(y) ^ self.negated
    }
}

/// Draws of the statistic the event refers to, or an error naming what the
/// pool actually carries.
fn stat_values<'a>(pool: &'a SamplePool, stat: StatKind) -> Result<&'a [f64], MarketError> {
    match stat.required_kind() {
        None => Ok(pool.terminal()),
        Some(need) => match pool.barrier_kind() {
            Some(have) if have == need => Ok(pool.barrier_stat().expect("kind implies draws")),
            Some(have) => Err(MarketError::MissingBarrierStat(format!(
                "event needs {need:?} draws but the pool carries {have:?}"
            ))),
            None => Err(MarketError::MissingBarrierStat(format!(
                "event needs {need:?} draws but the pool has no barrier statistic"
            ))),
        },
    }
}

/// Call curve weighted by an event indicator, plus the marginal curve of
/// the same pool in the same summation order.
#[derive(Clone, Debug)]
pub struct JointCallCurve {
    sorted: Vec<f64>,
    mask: Vec<bool>,
    /// `suffix_in[i]` counts masked draws in `sorted[i..]`; length n+1.
    suffix_in: Vec<u32>,
    original: Vec<f64>,
    original_mask: Vec<bool>,
    discount: f64,
    maturity: f64,
    joint_forward: f64,
    marginal_forward: f64,
}

pub fn joint_curve(
    pool: &SamplePool,
    event: &BarrierEvent,
    discount: f64,
) -> Result<JointCallCurve, MarketError> {
    if !(discount.is_finite() && discount > 0.0 && discount <= 1.0) {
        return Err(MarketError::BadParams(format!("bad discount {discount}")));
    }
    let n = pool.len();
    if n > u32::MAX as usize {
        return Err(MarketError::BadParams("pool too large".into()));
    }
    let ys = stat_values(pool, event.stat)?;
    let xs = pool.terminal();
    let original_mask: Vec<bool> = ys.iter().map(|&y| event.contains(y)).collect();

    // Deterministic ascending order with index tiebreak, so equal terminals
    // keep their generation order and the permutation is reproducible.
    let mut order: Vec<u32> = (0..n as u32).collect();
    order.sort_unstable_by(|&i, &j| {
        xs[i as usize]
            .total_cmp(&xs[j as usize])
            .then(i.cmp(&j))
    });
    let sorted: Vec<f64> = order.iter().map(|&i| xs[i as usize]).collect();
    let mask: Vec<bool> = order.iter().map(|&i| original_mask[i as usize]).collect();

    let mut c = JointCallCurve {
        suffix_in: suffix_counts(&mask),
        sorted,
        mask,
        original: xs.to_vec(),
        original_mask,
        discount,
        maturity: pool.maturity(),
        joint_forward: 0.0,
        marginal_forward: 0.0,
    };
    c.joint_forward = c.lambda(0.0);
    c.marginal_forward = c.marginal().lambda(0.0);
    Ok(c)
}

fn suffix_counts(mask: &[bool]) -> Vec<u32> {
    let n = mask.len();
    let mut suffix = alloc::vec![0u32; n + 1];
    for i in (0..n).rev() {
        suffix[i] = suffix[i + 1] + u32::from(mask[i]);
    }
    suffix
}

impl JointCallCurve {
    pub fn n(&self) -> usize {
        self.sorted.len()
    }

    /// `Q(Y ∈ C)`.
    pub fn barrier_prob(&self) -> f64 {
        self.suffix_in[0] as f64 / self.sorted.len() as f64
    }

    /// The complementary-event curve from the same pool: masks flipped,
    /// samples and summation order shared.
    pub fn complement(&self) -> JointCallCurve {
        let mask: Vec<bool> = self.mask.iter().map(|m| !m).collect();
        let mut c = JointCallCurve {
            suffix_in: suffix_counts(&mask),
            sorted: self.sorted.clone(),
            mask,
            original: self.original.clone(),
            original_mask: self.original_mask.iter().map(|m| !m).collect(),
            discount: self.discount,
            maturity: self.maturity,
            joint_forward: 0.0,
            marginal_forward: self.marginal_forward,
        };
        c.joint_forward = c.lambda(0.0);
        c
    }

    /// Unconditioned curve of the same samples (indicator dropped). Its
    /// `λ` matches the empirical curve of the pool bit for bit.
    pub fn marginal(&self) -> MarginalView<'_> {
        MarginalView(self)
    }

    fn tail_start(&self, a: f64) -> usize {
        self.sorted.partition_point(|&x| x < a)
    }
}

impl CallCurve for JointCallCurve {
    fn maturity(&self) -> f64 {
        self.maturity
    }

    fn discount(&self) -> f64 {
        self.discount
    }

    fn lambda(&self, a: f64) -> f64 {
        assert!(a >= 0.0 && !a.is_nan(), "bad strike {a}");
        if a.is_infinite() {
            return 0.0;
        }
        let start = self.tail_start(a);
        let mut sum = KahanSum::new();
        for (&x, &m) in self.sorted[start..].iter().zip(&self.mask[start..]) {
            if m {
                sum.add(x - a);
            }
        }
        self.discount * (sum.value() / self.sorted.len() as f64)
    }

    fn digital_ge(&self, a: f64) -> f64 {
        assert!(a >= 0.0 && !a.is_nan(), "bad strike {a}");
        self.suffix_in[self.tail_start(a)] as f64 / self.sorted.len() as f64
    }

    fn digital_gt(&self, a: f64) -> f64 {
        assert!(a >= 0.0 && !a.is_nan(), "bad strike {a}");
        let idx = self.sorted.partition_point(|&x| x <= a);
        self.suffix_in[idx] as f64 / self.sorted.len() as f64
    }

    fn forward(&self) -> f64 {
        self.joint_forward
    }

    fn integrability(&self, payoff: &Payoff) -> IntegrabilityCheck {
        let vals: Vec<f64> = self
            .original
            .iter()
            .zip(&self.original_mask)
            .map(|(&x, &m)| if m { payoff.eval(x) } else { 0.0 })
            .collect();
        half_pool_stability(&vals)
    }
}

/// Borrowed marginal (indicator-free) view of a [`JointCallCurve`].
pub struct MarginalView<'a>(&'a JointCallCurve);

impl CallCurve for MarginalView<'_> {
    fn maturity(&self) -> f64 {
        self.0.maturity
    }

    fn discount(&self) -> f64 {
        self.0.discount
    }

    fn lambda(&self, a: f64) -> f64 {
        assert!(a >= 0.0 && !a.is_nan(), "bad strike {a}");
        if a.is_infinite() {
            return 0.0;
        }
        let mut sum = KahanSum::new();
        for &x in &self.0.sorted[self.0.tail_start(a)..] {
            sum.add(x - a);
        }
        self.0.discount * (sum.value() / self.0.sorted.len() as f64)
    }

    fn digital_ge(&self, a: f64) -> f64 {
        assert!(a >= 0.0 && !a.is_nan(), "bad strike {a}");
        let n = self.0.sorted.len();
        (n - self.0.tail_start(a)) as f64 / n as f64
    }

    fn digital_gt(&self, a: f64) -> f64 {
        assert!(a >= 0.0 && !a.is_nan(), "bad strike {a}");
        let n = self.0.sorted.len();
        let idx = self.0.sorted.partition_point(|&x| x <= a);
        (n - idx) as f64 / n as f64
    }

    fn forward(&self) -> f64 {
        self.0.marginal_forward
    }

    fn integrability(&self, payoff: &Payoff) -> IntegrabilityCheck {
        let vals: Vec<f64> = self.0.original.iter().map(|&x| payoff.eval(x)).collect();
        half_pool_stability(&vals)
    }
}

/// Discounted sample mean of `f(X_T)·1{Y ∈ C}` with its standard error,
/// summed in the same ascending order as the joint curve.
pub fn mc_price_gated(
    pool: &SamplePool,
    p: &Payoff,
    event: &BarrierEvent,
    discount: f64,
) -> Result<(f64, f64), MarketError> {
    let ys = stat_values(pool, event.stat)?;
    let xs = pool.terminal();
    let n = xs.len();
    let mut order: Vec<u32> = (0..n as u32).collect();
    order.sort_unstable_by(|&i, &j| {
        xs[i as usize]
            .total_cmp(&xs[j as usize])
            .then(i.cmp(&j))
    });
    let vals: Vec<f64> = order
        .iter()
        .map(|&i| {
            if event.contains(ys[i as usize]) {
                p.eval(xs[i as usize])
            } else {
                0.0
            }
        })
        .collect();
    let (mean, se) = mean_and_se(&vals);
    Ok((discount * mean, discount * se))
}
