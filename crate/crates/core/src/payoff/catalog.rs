//! Builtin payoff families.
//!
//! Construction is endpoint-exact: a segment's closure reproduces the
//! intended boundary value bit-for-bit, so continuous families report no
//! spurious jumps.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use super::{Payoff, PayoffError, Segment};

fn constant(lo: f64, hi: f64, c: f64) -> Segment {
    Segment::new(lo, hi, move |_| c, |_| 0.0).with_second(|_| 0.0)
}

/// Line through `(anchor, y)` with the given slope.
fn ray(lo: f64, hi: f64, anchor: f64, y: f64, slope: f64) -> Segment {
    Segment::new(lo, hi, move |x| y + slope * (x - anchor), move |_| slope).with_second(|_| 0.0)
}

/// Chord from `(x0, y0)` to `(x1, y1)`, exact at both ends.
fn chord(x0: f64, y0: f64, x1: f64, y1: f64) -> Segment {
    let slope = (y1 - y0) / (x1 - x0);
    let value = move |x: f64| if x == x1 { y1 } else { y0 + slope * (x - x0) };
    Segment::new(x0, x1, value, move |_| slope).with_second(|_| 0.0)
}

fn positive_strike(family: &str, name: &str, k: f64) -> Result<(), PayoffError> {
    if !(k > 0.0) || !k.is_finite() {
        return Err(PayoffError::BadParams(format!(
            "{family}: {name} must be positive and finite, got {k}"
        )));
    }
    Ok(())
}

/// `(x − K)⁺`.
pub fn call(k: f64) -> Result<Payoff, PayoffError> {
    positive_strike("call", "K", k)?;
    Payoff::new(
        vec![constant(0.0, k, 0.0), ray(k, f64::INFINITY, k, 0.0, 1.0)],
        &[],
        format!("call K={k}"),
    )
}

/// `(K − x)⁺`.
pub fn put(k: f64) -> Result<Payoff, PayoffError> {
    positive_strike("put", "K", k)?;
    Payoff::new(
        vec![ray(0.0, k, k, 0.0, -1.0), constant(k, f64::INFINITY, 0.0)],
        &[],
        format!("put K={k}"),
    )
}

/// `1{x ≥ K}`.
pub fn digital_ge(k: f64) -> Result<Payoff, PayoffError> {
    positive_strike("digital_ge", "K", k)?;
    Payoff::new(
        vec![constant(0.0, k, 0.0), constant(k, f64::INFINITY, 1.0)],
        &[],
        format!("digital_ge K={k}"),
    )
}

/// `1{x > K}`.
pub fn digital_gt(k: f64) -> Result<Payoff, PayoffError> {
    positive_strike("digital_gt", "K", k)?;
    Payoff::new(
        vec![constant(0.0, k, 0.0), constant(k, f64::INFINITY, 1.0)],
        &[(k, 0.0)],
        format!("digital_gt K={k}"),
    )
}

/// `|x − K|`.
pub fn straddle(k: f64) -> Result<Payoff, PayoffError> {
    positive_strike("straddle", "K", k)?;
    Payoff::new(
        vec![
            ray(0.0, k, k, 0.0, -1.0),
            ray(k, f64::INFINITY, k, 0.0, 1.0),
        ],
        &[],
        format!("straddle K={k}"),
    )
}

/// Tent payoff: zero outside `[lo, hi]`, rising with slope 1 to a peak of
/// `mid − lo` at `mid`, then falling linearly back to zero.
pub fn butterfly(lo: f64, mid: f64, hi: f64) -> Result<Payoff, PayoffError> {
    if !(lo > 0.0 && mid > lo && hi > mid) || !hi.is_finite() {
        return Err(PayoffError::BadParams(format!(
            "butterfly: need 0 < lo < mid < hi finite, got {lo}/{mid}/{hi}"
        )));
    }
    let peak = mid - lo;
    Payoff::new(
        vec![
            constant(0.0, lo, 0.0),
            ray(lo, mid, lo, 0.0, 1.0),
            chord(mid, peak, hi, 0.0),
            constant(hi, f64::INFINITY, 0.0),
        ],
        &[(mid, peak)],
        format!("butterfly {lo}/{mid}/{hi}"),
    )
}

/// `(min(x, cap) − K)⁺`.
pub fn capped_call(k: f64, cap: f64) -> Result<Payoff, PayoffError> {
    positive_strike("capped_call", "K", k)?;
    if !(cap > k) || !cap.is_finite() {
        return Err(PayoffError::BadParams(format!(
            "capped_call: cap must exceed K, got K={k} cap={cap}"
        )));
    }
    let top = cap - k;
    Payoff::new(
        vec![
            constant(0.0, k, 0.0),
            ray(k, cap, k, 0.0, 1.0),
            constant(cap, f64::INFINITY, top),
        ],
        &[(cap, top)],
        format!("capped_call K={k} cap={cap}"),
    )
}

/// `(xⁿ − K)⁺` with the kink at `K^(1/n)`; `K = 0` gives the pure power `xⁿ`.
pub fn power_call(n: u32, k: f64) -> Result<Payoff, PayoffError> {
    if n < 1 || n > 64 {
        return Err(PayoffError::BadParams(format!(
            "power_call: n must be in 1..=64, got {n}"
        )));
    }
    if !(k >= 0.0) || !k.is_finite() {
        return Err(PayoffError::BadParams(format!(
            "power_call: K must be nonnegative and finite, got {k}"
        )));
    }
    let label = format!("power_call n={n} K={k}");
    let nf = n as f64;
    let kink = if k == 0.0 { 0.0 } else { libm::pow(k, 1.0 / nf) };
    // The smooth branch is x^n − k; at the (rounded) kink the payoff value
    // is pinned to exactly zero.
    let value = move |x: f64| if x == kink { 0.0 } else { libm::pow(x, nf) - k };
    let deriv = move |x: f64| nf * libm::pow(x, nf - 1.0);
    let c2 = nf * (nf - 1.0);
    let second = move |x: f64| {
        if c2 == 0.0 {
            0.0
        } else {
            c2 * libm::pow(x, nf - 2.0)
        }
    };
    let body = Segment::new(kink, f64::INFINITY, value, deriv).with_second(second);
    let segments = if kink == 0.0 {
        vec![body]
    } else {
        vec![constant(0.0, kink, 0.0), body]
    };
    Payoff::new(segments, &[], label)
}

/// Piecewise-linear interpolant through `nodes`, flat beyond the last node.
/// The first node must sit at `x = 0`.
pub fn piecewise_linear(nodes: &[(f64, f64)]) -> Result<Payoff, PayoffError> {
    if nodes.len() < 2 {
        return Err(PayoffError::BadParams(
            "piecewise_linear: need at least two nodes".into(),
        ));
    }
    if nodes[0].0 != 0.0 {
        return Err(PayoffError::BadParams(format!(
            "piecewise_linear: first node must be at x=0, got {}",
            nodes[0].0
        )));
    }
    for pair in nodes.windows(2) {
        if !(pair[1].0 > pair[0].0) {
            return Err(PayoffError::BadParams(format!(
                "piecewise_linear: node x-values must be strictly increasing, got {} then {}",
                pair[0].0, pair[1].0
            )));
        }
    }
    if nodes.iter().any(|&(x, y)| !x.is_finite() || !y.is_finite()) {
        return Err(PayoffError::BadParams(
            "piecewise_linear: non-finite node".into(),
        ));
    }
    let mut segments: Vec<Segment> = nodes
        .windows(2)
        .map(|pair| chord(pair[0].0, pair[0].1, pair[1].0, pair[1].1))
        .collect();
    let &(last_x, last_y) = nodes.last().expect("nonempty");
    segments.push(constant(last_x, f64::INFINITY, last_y));
    Payoff::new(segments, &[], format!("piecewise_linear {} nodes", nodes.len()))
}

fn horner(coeffs: &[f64], x: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, &c| acc * x + c)
}

/// Polynomial `Σ coeffs[i]·xⁱ` on the closed window `[lo, hi]`, zero outside.
pub fn polynomial(lo: f64, hi: f64, coeffs: &[f64]) -> Result<Payoff, PayoffError> {
    if coeffs.is_empty() || coeffs.len() > 32 {
        return Err(PayoffError::BadParams(
            "polynomial: need 1..=32 coefficients".into(),
        ));
    }
    if coeffs.iter().any(|c| !c.is_finite()) {
        return Err(PayoffError::BadParams("polynomial: non-finite coefficient".into()));
    }
    if !(lo >= 0.0 && hi > lo) || !hi.is_finite() {
        return Err(PayoffError::BadParams(format!(
            "polynomial: need 0 <= lo < hi finite, got lo={lo} hi={hi}"
        )));
    }
    let c: Vec<f64> = coeffs.to_vec();
    let d1: Vec<f64> = c
        .iter()
        .enumerate()
        .skip(1)
        .map(|(i, &ci)| ci * i as f64)
        .collect();
    let d2: Vec<f64> = d1
        .iter()
        .enumerate()
        .skip(1)
        .map(|(i, &ci)| ci * i as f64)
        .collect();
    let at_hi = horner(&c, hi);

    let (cv, cd, cs) = (c.clone(), d1, d2);
    let body = Segment::new(lo, hi, move |x| horner(&cv, x), move |x| horner(&cd, x))
        .with_second(move |x| horner(&cs, x));
    let mut segments = Vec::new();
    if lo > 0.0 {
        segments.push(constant(0.0, lo, 0.0));
    }
    segments.push(body);
    segments.push(constant(hi, f64::INFINITY, 0.0));
    Payoff::new(
        segments,
        &[(hi, at_hi)],
        format!("polynomial deg {} on [{lo}, {hi}]", coeffs.len() - 1),
    )
}

/// Named scalar/list parameters for [`builtin_catalog`].
#[derive(Clone, Debug, Default)]
pub struct FamilyParams {
    scalars: Vec<(String, f64)>,
    nodes: Vec<(f64, f64)>,
    coeffs: Vec<f64>,
}

impl FamilyParams {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_scalar(mut self, name: impl Into<String>, value: f64) -> Self {
        self.scalars.push((name.into(), value));
        self
    }

    pub fn with_nodes(mut self, nodes: Vec<(f64, f64)>) -> Self {
        self.nodes = nodes;
        self
    }

    pub fn with_coeffs(mut self, coeffs: Vec<f64>) -> Self {
        self.coeffs = coeffs;
        self
    }

    pub fn get(&self, name: &str) -> Option<f64> {
        self.scalars
            .iter()
            .rev()
            .find(|(n, _)| n == name)
            .map(|&(_, v)| v)
    }

    fn require(&self, family: &str, name: &str) -> Result<f64, PayoffError> {
        self.get(name).ok_or_else(|| {
            PayoffError::BadParams(format!("{family}: missing parameter `{name}`"))
        })
    }
}

/// Build a catalog payoff by family name.
///
/// Families: `call`, `put`, `digital_ge`, `digital_gt`, `straddle` (scalar
/// `K`), `butterfly` (`lo`, `mid`, `hi`), `capped_call` (`K`, `cap`),
/// `power_call` (`n`, `K`), `piecewise_linear` (node list), `polynomial`
/// (`lo`, `hi`, coefficient list).
pub fn builtin_catalog(name: &str, params: &FamilyParams) -> Result<Payoff, PayoffError> {
    match name {
        "call" => call(params.require(name, "K")?),
        "put" => put(params.require(name, "K")?),
        "digital_ge" => digital_ge(params.require(name, "K")?),
        "digital_gt" => digital_gt(params.require(name, "K")?),
        "straddle" => straddle(params.require(name, "K")?),
        "butterfly" => butterfly(
            params.require(name, "lo")?,
            params.require(name, "mid")?,
            params.require(name, "hi")?,
        ),
        "capped_call" => capped_call(params.require(name, "K")?, params.require(name, "cap")?),
        "power_call" => {
            let n = params.require(name, "n")?;
            if libm::floor(n) != n || !(1.0..=64.0).contains(&n) {
                return Err(PayoffError::BadParams(format!(
                    "power_call: n must be an integer in 1..=64, got {n}"
                )));
            }
            power_call(n as u32, params.require(name, "K")?)
        }
        "piecewise_linear" => piecewise_linear(&params.nodes),
        "polynomial" => polynomial(
            params.require(name, "lo")?,
            params.require(name, "hi")?,
            &params.coeffs,
        ),
        _ => Err(PayoffError::UnknownPayoff(name.into())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn butterfly_shape() {
        let p = butterfly(90.0, 100.0, 110.0).unwrap();
        assert_eq!(p.eval(89.0), 0.0);
        assert_eq!(p.eval(90.0), 0.0);
        assert_eq!(p.eval(95.0), 5.0);
        assert_eq!(p.eval(100.0), 10.0);
        assert_eq!(p.eval(105.0), 5.0);
        assert_eq!(p.eval(110.0), 0.0);
        assert_eq!(p.eval(150.0), 0.0);
        assert!(p.jumps().is_empty());
    }

    #[test]
    fn asymmetric_butterfly_is_continuous() {
        let p = butterfly(80.0, 95.0, 130.0).unwrap();
        assert_eq!(p.eval(95.0), 15.0);
        assert!((p.eval(112.5) - 7.5).abs() < 1e-12);
        assert!(p.jumps().is_empty());
    }

    #[test]
    fn capped_call_flattens() {
        let p = capped_call(90.0, 110.0).unwrap();
        assert_eq!(p.eval(100.0), 10.0);
        assert_eq!(p.eval(110.0), 20.0);
        assert_eq!(p.eval(500.0), 20.0);
        assert!(p.jumps().is_empty());
    }

    #[test]
    fn put_value_at_zero() {
        let p = put(100.0).unwrap();
        assert_eq!(p.eval(0.0), 100.0);
        assert_eq!(p.derivative(50.0), -1.0);
        assert_eq!(p.eval(130.0), 0.0);
    }

    #[test]
    fn piecewise_linear_hits_nodes_exactly() {
        let nodes = [(0.0, 1.0), (80.0, 3.5), (120.0, 0.25), (200.0, 7.0)];
        let p = piecewise_linear(&nodes).unwrap();
        for &(x, y) in &nodes {
            assert_eq!(p.eval(x), y);
        }
        assert_eq!(p.eval(350.0), 7.0);
        assert!(p.jumps().is_empty());
    }

    #[test]
    fn pure_power_has_single_segment() {
        let p = power_call(2, 0.0).unwrap();
        assert_eq!(p.boundaries(), &[0.0]);
        assert_eq!(p.eval(11.0), 121.0);
        assert_eq!(p.second(5.0), Some(2.0));
        let fwd = power_call(1, 0.0).unwrap();
        assert_eq!(fwd.eval(73.25), 73.25);
        assert_eq!(fwd.derivative(10.0), 1.0);
    }

    #[test]
    fn polynomial_window_jumps() {
        // 1 + x^2 on [50, 150], zero outside.
        let p = polynomial(50.0, 150.0, &[1.0, 0.0, 1.0]).unwrap();
        assert_eq!(p.eval(49.0), 0.0);
        assert_eq!(p.eval(50.0), 2501.0);
        assert_eq!(p.eval(150.0), 22_501.0);
        assert_eq!(p.eval(151.0), 0.0);
        let jumps = p.jumps();
        assert_eq!(jumps.len(), 2);
        assert_eq!(jumps[0].strike, 50.0);
        assert_eq!(jumps[0].left, 2501.0);
        assert_eq!(jumps[0].right, 0.0);
        assert_eq!(jumps[1].strike, 150.0);
        assert_eq!(jumps[1].left, 0.0);
        assert_eq!(jumps[1].right, -22_501.0);
    }

    #[test]
    fn catalog_dispatch() {
        let p = builtin_catalog("call", &FamilyParams::new().with_scalar("K", 100.0)).unwrap();
        assert_eq!(p.eval(120.0), 20.0);
        let p = builtin_catalog(
            "power_call",
            &FamilyParams::new().with_scalar("n", 2.0).with_scalar("K", 10_000.0),
        )
        .unwrap();
        assert_eq!(p.eval(110.0), 2_100.0);
        let p = builtin_catalog(
            "piecewise_linear",
            &FamilyParams::new().with_nodes(alloc::vec![(0.0, 0.0), (100.0, 5.0)]),
        )
        .unwrap();
        assert_eq!(p.eval(100.0), 5.0);

        assert!(matches!(
            builtin_catalog("gamma_swap", &FamilyParams::new()),
            Err(PayoffError::UnknownPayoff(_))
        ));
        assert!(matches!(
            builtin_catalog("call", &FamilyParams::new()),
            Err(PayoffError::BadParams(_))
        ));
        assert!(matches!(
            builtin_catalog(
                "power_call",
                &FamilyParams::new().with_scalar("n", 2.5).with_scalar("K", 1.0)
            ),
            Err(PayoffError::BadParams(_))
        ));
    }

    #[test]
    fn bad_params_rejected() {
        assert!(call(-5.0).is_err());
        assert!(call(0.0).is_err());
        assert!(butterfly(100.0, 90.0, 110.0).is_err());
        assert!(capped_call(100.0, 90.0).is_err());
        assert!(piecewise_linear(&[(1.0, 0.0), (2.0, 0.0)]).is_err());
        assert!(piecewise_linear(&[(0.0, 0.0)]).is_err());
        assert!(polynomial(10.0, 5.0, &[1.0]).is_err());
        assert!(polynomial(0.0, 10.0, &[]).is_err());
    }
}
