//! Monte Carlo sample pools, the empirical call curve they induce, and the
//! brute-force pricer used as an oracle in tests.
//!
//! Exactness contract: `empirical_curve(pool).lambda(a)` and
//! `mc_price(pool, call(a))` form the same compensated sum in the same
//! ascending order, so they agree bit for bit, not just to rounding.

use alloc::format;
use alloc::vec::Vec;

use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::math::KahanSum;
use crate::payoff::Payoff;

use super::{half_pool_stability, mean_and_se, CallCurve, IntegrabilityCheck, MarketError};

/// Path statistic recorded alongside the terminal draw.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BarrierKind {
    RunningMax,
    RunningMin,
    Average,
}

/// Coupled draws of the terminal price `X_T` and optionally one path
/// statistic `Y`, deterministic in the seed.
#[derive(Clone, Debug)]
pub struct SamplePool {
    seed: u64,
    maturity: f64,
    terminal: Vec<f64>,
    barrier: Option<(BarrierKind, Vec<f64>)>,
}

impl SamplePool {
    /// Wraps externally produced draws. `seed` is recorded as provenance
    /// only; regeneration guarantees apply to [`gbm_pool`].
    pub fn from_samples(
        seed: u64,
        terminal: Vec<f64>,
        maturity: f64,
    ) -> Result<Self, MarketError> {
        if terminal.is_empty() {
            return Err(MarketError::BadParams("sample pool is empty".into()));
        }
        if let Some(&x) = terminal.iter().find(|x| !x.is_finite() || **x < 0.0) {
            return Err(MarketError::BadParams(format!(
                "terminal draws must be finite and nonnegative, got {x}"
            )));
        }
        if !(maturity.is_finite() && maturity > 0.0) {
            return Err(MarketError::BadParams(format!(
                "maturity must be finite and positive, got {maturity}"
            )));
        }
        Ok(Self {
            seed,
            maturity,
            terminal,
            barrier: None,
        })
    }

    /// Attaches pathwise-coupled draws of a barrier statistic.
    pub fn with_barrier_stat(
        mut self,
        kind: BarrierKind,
        stat: Vec<f64>,
    ) -> Result<Self, MarketError> {
        if stat.len() != self.terminal.len() {
            return Err(MarketError::BadParams(format!(
                "barrier statistic has {} draws for {} terminals",
                stat.len(),
                self.terminal.len()
            )));
        }
        if let Some(&y) = stat.iter().find(|y| !y.is_finite()) {
            return Err(MarketError::BadParams(format!(
                "barrier draws must be finite, got {y}"
            )));
        }
        self.barrier = Some((kind, stat));
        Ok(self)
    }

    pub fn len(&self) -> usize {
        self.terminal.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn maturity(&self) -> f64 {
        self.maturity
    }

    pub fn terminal(&self) -> &[f64] {
        &self.terminal
    }

    pub fn barrier_kind(&self) -> Option<BarrierKind> {
        self.barrier.as_ref().map(|(k, _)| *k)
    }

    pub fn barrier_stat(&self) -> Option<&[f64]> {
        self.barrier.as_ref().map(|(_, s)| s.as_slice())
    }
}

/// Number of Euler steps used when a path statistic is requested. The
/// recorded max/min/average are grid quantities on this partition, not
/// continuous-time ones.
pub const EULER_STEPS: usize = 256;

/// Draws `n` geometric Brownian motion paths. Terminal draws are exact
/// lognormal samples; path statistics use [`EULER_STEPS`] exact lognormal
/// increments. Running max/min include the starting spot; the average is
/// the arithmetic mean of the post-start grid points.
///
/// Each path uses its own ChaCha stream of the seeded generator, so pools
/// are reproducible bit for bit and any prefix of a larger pool matches the
/// smaller pool with the same seed.
pub fn gbm_pool(
    seed: u64,
    n: usize,
    spot: f64,
    vol: f64,
    rate: f64,
    maturity: f64,
    barrier_kind: Option<BarrierKind>,
) -> Result<SamplePool, MarketError> {
    if n == 0 {
        return Err(MarketError::BadParams("need at least one path".into()));
    }
    if !(spot.is_finite() && spot > 0.0) {
        return Err(MarketError::BadParams(format!(
            "spot must be finite and positive, got {spot}"
        )));
    }
    if !(vol.is_finite() && vol >= 0.0) {
        return Err(MarketError::BadParams(format!(
            "vol must be finite and nonnegative, got {vol}"
        )));
    }
    if !(rate.is_finite() && rate >= 0.0) {
        return Err(MarketError::BadParams(format!(
            "rate must be finite and nonnegative, got {rate}"
        )));
    }
    if !(maturity.is_finite() && maturity > 0.0) {
        return Err(MarketError::BadParams(format!(
            "maturity must be finite and positive, got {maturity}"
        )));
    }

    let base = ChaCha12Rng::seed_from_u64(seed);
    let mut terminal = Vec::with_capacity(n);
    let mut stat = Vec::with_capacity(if barrier_kind.is_some() { n } else { 0 });

    match barrier_kind {
        None => {
            let drift = (rate - 0.5 * vol * vol) * maturity;
            let sig = vol * libm::sqrt(maturity);
            for i in 0..n {
                let mut rng = base.clone();
                rng.set_stream(i as u64);
                let z: f64 = StandardNormal.sample(&mut rng);
                terminal.push(spot * libm::exp(drift + sig * z));
            }
        }
        Some(kind) => {
            let dt = maturity / EULER_STEPS as f64;
            let drift = (rate - 0.5 * vol * vol) * dt;
            let sig = vol * libm::sqrt(dt);
            for i in 0..n {
                let mut rng = base.clone();
                rng.set_stream(i as u64);
                // Work in log space: acc = ln(S_t / spot), so running
                // extremes need a single exp at the end of the path.
                let mut acc = 0.0_f64;
                match kind {
                    BarrierKind::RunningMax => {
                        let mut hi = 0.0_f64;
                        for _ in 0..EULER_STEPS {
                            let z: f64 = StandardNormal.sample(&mut rng);
                            acc += drift + sig * z;
                            if acc > hi {
                                hi = acc;
                            }
                        }
                        stat.push(spot * libm::exp(hi));
                    }
                    BarrierKind::RunningMin => {
                        let mut lo = 0.0_f64;
                        for _ in 0..EULER_STEPS {
                            let z: f64 = StandardNormal.sample(&mut rng);
                            acc += drift + sig * z;
                            if acc < lo {
                                lo = acc;
                            }
                        }
                        stat.push(spot * libm::exp(lo));
                    }
                    BarrierKind::Average => {
                        let mut sum = KahanSum::new();
                        for _ in 0..EULER_STEPS {
                            let z: f64 = StandardNormal.sample(&mut rng);
                            acc += drift + sig * z;
                            sum.add(spot * libm::exp(acc));
                        }
                        stat.push(sum.value() / EULER_STEPS as f64);
                    }
                }
                terminal.push(spot * libm::exp(acc));
            }
        }
    }

    let pool = SamplePool::from_samples(seed, terminal, maturity)?;
    match barrier_kind {
        Some(kind) => pool.with_barrier_stat(kind, stat),
        None => Ok(pool),
    }
}

/// Discounted sample mean of `f(X_T)` with its standard error. The sum runs
/// over the draws in ascending order with compensated accumulation, which
/// is the same order the empirical curve uses.
pub fn mc_price(pool: &SamplePool, p: &Payoff, discount: f64) -> (f64, f64) {
    let mut xs = pool.terminal().to_vec();
    xs.sort_unstable_by(f64::total_cmp);
    let vals: Vec<f64> = xs.iter().map(|&x| p.eval(x)).collect();
    let (mean, se) = mean_and_se(&vals);
    (discount * mean, discount * se)
}

/// Exact (not interpolated) call curve of a sample pool:
/// `λ(a) = discount · mean (Xᵢ−a)⁺`, digitals are sample fractions.
pub struct EmpiricalCurve {
    sorted: Vec<f64>,
    original: Vec<f64>,
    discount: f64,
    maturity: f64,
    forward: f64,
}

impl core::fmt::Debug for EmpiricalCurve {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.debug_struct("EmpiricalCurve")
            .field("n", &self.sorted.len())
            .field("discount", &self.discount)
            .field("maturity", &self.maturity)
            .field("forward", &self.forward)
            .finish()
    }
}

pub fn empirical_curve(pool: &SamplePool, discount: f64) -> EmpiricalCurve {
    assert!(
        discount.is_finite() && discount > 0.0 && discount <= 1.0,
        "bad discount {discount}"
    );
    let mut sorted = pool.terminal().to_vec();
    sorted.sort_unstable_by(f64::total_cmp);
    let mut c = EmpiricalCurve {
        sorted,
        original: pool.terminal().to_vec(),
        discount,
        maturity: pool.maturity(),
        forward: 0.0,
    };
    c.forward = c.lambda(0.0);
    c
}

impl EmpiricalCurve {
    pub fn n(&self) -> usize {
        self.sorted.len()
    }

    /// Index of the first draw `≥ a` in the sorted order.
    fn tail_start(&self, a: f64) -> usize {
        self.sorted.partition_point(|&x| x < a)
    }
}

impl CallCurve for EmpiricalCurve {
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
        let mut sum = KahanSum::new();
        for &x in &self.sorted[self.tail_start(a)..] {
            sum.add(x - a);
        }
        self.discount * (sum.value() / self.sorted.len() as f64)
    }

    fn digital_ge(&self, a: f64) -> f64 {
        assert!(a >= 0.0 && !a.is_nan(), "bad strike {a}");
        let n = self.sorted.len();
        (n - self.tail_start(a)) as f64 / n as f64
    }

    fn digital_gt(&self, a: f64) -> f64 {
        assert!(a >= 0.0 && !a.is_nan(), "bad strike {a}");
        let n = self.sorted.len();
        let idx = self.sorted.partition_point(|&x| x <= a);
        (n - idx) as f64 / n as f64
    }

    fn forward(&self) -> f64 {
        self.forward
    }

    fn integrability(&self, payoff: &Payoff) -> IntegrabilityCheck {
        let vals: Vec<f64> = self.original.iter().map(|&x| payoff.eval(x)).collect();
        half_pool_stability(&vals)
    }
}
