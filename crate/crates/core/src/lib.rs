//! Pricing of European, barrier, and American-bounded options driven entirely
//! by call-option and digital-option price curves.
//!
//! The library is organised around a small set of ideas:
//!
//! * [`payoff`]: piecewise-C¹ payoff functions on `[0, ∞)` with explicit
//!   kink and jump metadata, a builtin catalog, and convex decomposition.
//! * [`market`]: the pricing inputs. A deterministic bond, call curves
//!   `λ(a)` with `≥`/`>` digital curves from analytic, quoted-table, and
//!   Monte Carlo backends, plus barrier-conditioned joint curves.
//! * [`pricer`]: the replication pricing forms (Stieltjes, Lebesgue, Bick,
//!   density, convex) with adaptive quadrature, truncation control, and
//!   admissibility checks.
//! * [`barrier`]: pricing of `f(X_T)·1{Y ∈ C}` over joint curves.
//! * [`hedge`]: static digital-strip and call-spread replication portfolios.
//! * [`american`]: the convex-payoff American upper bound, its equality
//!   certificate, and a CRR binomial oracle.
//!
//! The crate is `no_std` (with `alloc`); all floating-point work is `f64`.

#![no_std]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod american;
pub mod barrier;
pub mod hedge;
pub mod market;
pub(crate) mod math;
pub mod payoff;
pub mod pricer;

pub use market::{
    bs_curve, empirical_curve, gbm_pool, joint_curve, mc_price, mc_price_gated, table_curve,
    table_curve_with_digitals, BarrierEvent, BarrierKind, Bond, BsCurve, CallCurve,
    EmpiricalCurve, IntegrabilityCheck, Interval, JointCallCurve, MarketError, SamplePool,
    StatKind, TableCurve,
};
pub use payoff::{
    builtin_catalog, convex_decompose, ConvexDecomposition, FamilyParams, Jump, Payoff,
    PayoffError, Segment,
};
pub use american::{
    american_bound, binomial_american, equality_certificate, AmericanBoundReport,
    EqualityCertificate, MarketState, ModelAssumptions,
};
pub use barrier::{price_barrier, BarrierPriceReport};
pub use hedge::{
    build_call_spread_hedge, build_digital_hedge, portfolio_value, replication_report,
    terminal_payoff, CallSpreadPosition, DigitalFlavor, DigitalPosition, HedgeError,
    HedgeKind, HedgePortfolio, ReplicationReport,
};
pub use pricer::{
    price_bick, price_bl, price_convex, price_lebesgue, price_theorem1, price_windowed,
    validate_class, PriceError, PriceReport, QuadConfig, ValidityReport,
};
