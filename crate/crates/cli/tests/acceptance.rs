//! Release gate: one test per acceptance criterion. Each prints an
//! `ACCEPTANCE <n> PASS|FAIL - <summary>` line (run with
//! `cargo test --test acceptance -- --nocapture` to see the lines for
//! passing criteria too) and enforces that criterion's runtime budget.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::Command;
use std::time::Instant;

use strikespan_core::payoff::catalog;
use strikespan_core::{
    american_bound, binomial_american, bs_curve, build_call_spread_hedge, build_digital_hedge,
    convex_decompose, empirical_curve, equality_certificate, gbm_pool, joint_curve, mc_price,
    portfolio_value, price_barrier, price_bick, price_bl, price_convex, price_lebesgue,
    price_theorem1, price_windowed, replication_report, table_curve, validate_class, BarrierEvent,
    BarrierKind, CallCurve, Interval, MarketState, ModelAssumptions, Payoff, PriceError,
    QuadConfig, Segment, StatKind,
};

const SPOT: f64 = 100.0;

fn criterion(n: u32, desc: &str, limit_s: f64, body: impl FnOnce()) {
    let start = Instant::now();
    let outcome = catch_unwind(AssertUnwindSafe(body));
    let elapsed = start.elapsed().as_secs_f64();
    match outcome {
        Ok(()) if elapsed <= limit_s => println!("ACCEPTANCE {n} PASS - {desc} ({elapsed:.2}s)"),
        Ok(()) => {
            println!(
                "ACCEPTANCE {n} FAIL - {desc}: runtime {elapsed:.2}s exceeds the {limit_s:.0}s budget"
            );
            panic!("criterion {n} exceeded its runtime budget");
        }
        Err(cause) => {
            println!("ACCEPTANCE {n} FAIL - {desc} ({elapsed:.2}s)");
            std::panic::resume_unwind(cause);
        }
    }
}

/// The eight fixed-shape catalog payoffs.
fn fixed_catalog() -> Vec<Payoff> {
    vec![
        catalog::call(100.0).unwrap(),
        catalog::put(100.0).unwrap(),
        catalog::digital_ge(110.0).unwrap(),
        catalog::digital_gt(90.0).unwrap(),
        catalog::straddle(105.0).unwrap(),
        catalog::butterfly(90.0, 100.0, 110.0).unwrap(),
        catalog::capped_call(95.0, 130.0).unwrap(),
        catalog::power_call(2, 10_000.0).unwrap(),
    ]
}

/// Every catalog family, one instance each.
fn full_catalog() -> Vec<Payoff> {
    let mut v = fixed_catalog();
    v.push(catalog::piecewise_linear(&[(0.0, 5.0), (80.0, 1.0), (120.0, 6.0)]).unwrap());
    v.push(catalog::polynomial(0.0, 200.0, &[0.0, 0.0, 1.0]).unwrap());
    v
}

#[test]
fn cross_form_agreement() {
    criterion(
        1,
        "five pricing forms agree pairwise within 2e-4 on the catalog",
        10.0,
        || {
            let c = bs_curve(SPOT, 0.2, 0.05, 1.0).unwrap();
            let cfg = QuadConfig::for_curve(&c);
            let mut convex_count = 0usize;
            for p in fixed_catalog() {
                let mut vals = vec![
                    ("theorem1", price_theorem1(&p, &c, &cfg).unwrap().value),
                    ("lebesgue", price_lebesgue(&p, &c, &cfg).unwrap().value),
                    ("bick", price_bick(&p, &c, &cfg).unwrap().value),
                    ("bl", price_bl(&p, &c, &cfg).unwrap().value),
                ];
                if let Ok(d) = convex_decompose(&p) {
                    vals.push(("convex", price_convex(&d, &c, &cfg).unwrap().value));
                    convex_count += 1;
                }
                for i in 0..vals.len() {
                    for j in i + 1..vals.len() {
                        let gap = (vals[i].1 - vals[j].1).abs();
                        assert!(
                            gap <= 2e-4,
                            "{}: {} = {} vs {} = {} differ by {gap:.3e}",
                            p.label(),
                            vals[i].0,
                            vals[i].1,
                            vals[j].0,
                            vals[j].1
                        );
                    }
                }
            }
            assert_eq!(
                convex_count, 4,
                "convex form should apply to exactly call, put, straddle, power call"
            );
        },
    );
}

/// The three curve backends over one Black-Scholes market, plus the strike
/// grid the recovery and parity criteria share.
fn three_backends() -> (strikespan_core::BsCurve, strikespan_core::TableCurve, strikespan_core::EmpiricalCurve)
{
    let bs = bs_curve(SPOT, 0.2, 0.05, 1.0).unwrap();
    let quotes: Vec<(f64, f64)> = (1..=15)
        .map(|i| {
            let k = 20.0 * i as f64;
            (k, bs.lambda(k))
        })
        .collect();
    let table = table_curve(&quotes, bs.discount()).unwrap();
    let pool = gbm_pool(7, 50_000, SPOT, 0.2, 0.05, 1.0, None).unwrap();
    let emp = empirical_curve(&pool, bs.discount());
    (bs, table, emp)
}

fn strike_grid() -> Vec<f64> {
    (0..50).map(|i| 52.0 + 2.0 * i as f64).collect()
}

#[test]
fn quote_recovery_on_every_backend() {
    criterion(
        2,
        "calls and digitals recover curve quotes on all three backends",
        5.0,
        || {
            let (bs, table, emp) = three_backends();
            let backends: [(&str, &dyn CallCurve); 3] =
                [("bs", &bs), ("table", &table), ("empirical", &emp)];
            let tol = 1e-6 * SPOT;
            for (name, c) in backends {
                let cfg = QuadConfig::for_curve(c);
                for k in strike_grid() {
                    let call = catalog::call(k).unwrap();
                    let got = price_theorem1(&call, c, &cfg).unwrap().value;
                    let want = c.lambda(k);
                    assert!(
                        (got - want).abs() <= tol,
                        "{name} call K={k}: {got} vs lambda {want}"
                    );

                    let dig = catalog::digital_ge(k).unwrap();
                    let got = price_theorem1(&dig, c, &cfg).unwrap().value;
                    assert_eq!(
                        got,
                        c.discount() * c.digital_ge(k),
                        "{name} digital K={k} must be exact"
                    );
                }
            }
        },
    );
}

#[test]
fn put_call_parity() {
    criterion(
        3,
        "put-call parity holds within 2e-4 on the shared strike grid",
        10.0,
        || {
            let (bs, table, emp) = three_backends();
            let backends: [(&str, &dyn CallCurve); 3] =
                [("bs", &bs), ("table", &table), ("empirical", &emp)];
            for (name, c) in backends {
                let cfg = QuadConfig::for_curve(c);
                for k in strike_grid() {
                    let call = price_theorem1(&catalog::call(k).unwrap(), c, &cfg)
                        .unwrap()
                        .value;
                    let put = price_theorem1(&catalog::put(k).unwrap(), c, &cfg)
                        .unwrap()
                        .value;
                    let gap = (call - put - (c.forward() - k * c.discount())).abs();
                    assert!(gap <= 2e-4, "{name} K={k}: parity gap {gap:.3e}");
                }
            }
        },
    );
}

#[test]
fn coupled_pool_matches_sample_means() {
    criterion(
        4,
        "pricing formula matches coupled sample means on a shared 1e6 pool",
        30.0,
        || {
            let pool = gbm_pool(7, 1_000_000, SPOT, 0.2, 0.05, 1.0, None).unwrap();
            let disc = (-0.05f64).exp();
            let c = empirical_curve(&pool, disc);
            let cfg = QuadConfig::for_curve(&c);
            let tol = 1e-6 * SPOT;
            for p in full_catalog() {
                let formula = price_theorem1(&p, &c, &cfg).unwrap().value;
                let (brute, _se) = mc_price(&pool, &p, disc);
                assert!(
                    (formula - brute).abs() <= tol,
                    "{}: formula {formula} vs sample mean {brute}",
                    p.label()
                );
            }
        },
    );
}

#[test]
fn barrier_in_out_parity() {
    criterion(
        5,
        "knock-in plus knock-out equals vanilla within 1e-10 relative",
        60.0,
        || {
            let disc = (-0.02f64).exp();
            let cases = [
                (
                    BarrierKind::RunningMax,
                    StatKind::RunningMax,
                    Interval::below(130.0, false).unwrap(),
                    7u64,
                ),
                (
                    BarrierKind::RunningMin,
                    StatKind::RunningMin,
                    Interval::above(80.0, true).unwrap(),
                    8,
                ),
                (
                    BarrierKind::Average,
                    StatKind::Average,
                    Interval::above(100.0, true).unwrap(),
                    9,
                ),
            ];
            let payoffs = [
                catalog::call(100.0).unwrap(),
                catalog::put(100.0).unwrap(),
                catalog::straddle(105.0).unwrap(),
                catalog::butterfly(90.0, 100.0, 110.0).unwrap(),
            ];
            for (kind, stat, set, seed) in cases {
                let pool = gbm_pool(seed, 100_000, SPOT, 0.25, 0.02, 1.0, Some(kind)).unwrap();
                let event = BarrierEvent::new(stat, set);
                let gated_in = joint_curve(&pool, &event, disc).unwrap();
                let gated_out = gated_in.complement();
                let marginal = gated_in.marginal();
                let cfg = QuadConfig::for_curve(&marginal);
                for p in &payoffs {
                    let v_in = price_barrier(p, &gated_in, &cfg).unwrap().value;
                    let v_out = price_barrier(p, &gated_out, &cfg).unwrap().value;
                    let vanilla = price_theorem1(p, &marginal, &cfg).unwrap().value;
                    let gap = (v_in + v_out - vanilla).abs();
                    assert!(
                        gap <= 1e-10 * vanilla.abs().max(1.0),
                        "{:?} seed {seed} {}: in {v_in} + out {v_out} vs vanilla {vanilla}",
                        stat,
                        p.label()
                    );
                }
            }
        },
    );
}

#[test]
fn hedge_refinement_convergence() {
    criterion(
        6,
        "hedge replication error shrinks as spread and digital grids refine",
        10.0,
        || {
            let c = bs_curve(SPOT, 0.2, 0.05, 1.0).unwrap();

            // Call-spread ladder for x^2 on the closed window [0, 200].
            let square = catalog::power_call(2, 0.0).unwrap();
            let cfg = QuadConfig {
                tol: 1e-6,
                ..QuadConfig::for_curve(&c)
            };
            let window = price_windowed(&square, 0.0, 200.0, (true, true), &c, &cfg)
                .unwrap()
                .value;
            let ladder_err = |n: usize| {
                let h = build_call_spread_hedge(&square, 0.0, 200.0, n).unwrap();
                (portfolio_value(&h, &c) - window).abs()
            };
            let coarse = ladder_err(64);
            let fine = ladder_err(2048);
            assert!(
                fine < coarse,
                "call-spread error did not shrink: n=64 gives {coarse:.3e}, n=2048 gives {fine:.3e}"
            );

            // Digital strip for the straddle, sup error over a sample pool.
            let straddle = catalog::straddle(100.0).unwrap();
            let pool = gbm_pool(7, 20_000, SPOT, 0.2, 0.05, 1.0, None).unwrap();
            let strip_sup = |nodes: usize| {
                let step = 400.0 / (nodes - 1) as f64;
                let grid: Vec<f64> = (0..nodes).map(|i| step * i as f64).collect();
                let h = build_digital_hedge(&straddle, &grid).unwrap();
                replication_report(&h, &straddle, &pool, c.discount()).sup_error
            };
            let coarse = strip_sup(65);
            let fine = strip_sup(513);
            assert!(
                fine < coarse,
                "digital-strip sup error did not shrink: 65 nodes give {coarse:.3e}, \
                 513 nodes give {fine:.3e}"
            );
        },
    );
}

#[test]
fn american_bound_against_lattice() {
    criterion(
        7,
        "lattice American values respect the bound; certified cases match European",
        30.0,
        || {
            let put = catalog::put(100.0).unwrap();
            let d = convex_decompose(&put).unwrap();
            for rate in [0.0, 0.05] {
                for vol in [0.1, 0.3] {
                    let c = bs_curve(SPOT, vol, rate, 1.0).unwrap();
                    let cfg = QuadConfig::for_curve(&c);
                    let assumptions = ModelAssumptions {
                        bond_constant: rate == 0.0,
                        martingale: true,
                    };
                    let rep = american_bound(
                        &d,
                        &c,
                        MarketState::at_inception(SPOT),
                        assumptions,
                        &cfg,
                    )
                    .unwrap();
                    let (am1, _) = binomial_american(&put, SPOT, vol, rate, 1.0, 1000).unwrap();
                    let (am2, _) = binomial_american(&put, SPOT, vol, rate, 1.0, 2000).unwrap();
                    let allowance = (am1 - am2).abs();
                    assert!(
                        am1 <= rep.bound + allowance,
                        "rate {rate} vol {vol}: lattice put {am1} above bound {} + {allowance:.3e}",
                        rep.bound
                    );
                }
            }

            let certified = [
                catalog::power_call(2, 10_000.0).unwrap(),
                catalog::call(100.0).unwrap(),
            ];
            for p in &certified {
                let d = convex_decompose(p).unwrap();
                for rate in [0.0, 0.05] {
                    for vol in [0.1, 0.3] {
                        let assumptions = ModelAssumptions {
                            bond_constant: rate == 0.0,
                            martingale: true,
                        };
                        assert!(
                            equality_certificate(&d, assumptions).certified,
                            "{} should certify equality",
                            p.label()
                        );
                        let (am1, eu1) =
                            binomial_american(p, SPOT, vol, rate, 1.0, 1000).unwrap();
                        let (am2, _) = binomial_american(p, SPOT, vol, rate, 1.0, 2000).unwrap();
                        let lattice_err = (am1 - am2).abs();
                        assert!(
                            (am1 - eu1).abs() <= lattice_err + 1e-12,
                            "{} rate {rate} vol {vol}: American {am1} vs European {eu1} \
                             with lattice error {lattice_err:.3e}",
                            p.label()
                        );
                    }
                }
            }
        },
    );
}

fn run_bin(args: &[&str]) -> Vec<u8> {
    let out = Command::new(env!("CARGO_BIN_EXE_strikespan"))
        .env_remove("STRIKESPAN_SEED")
        .args(args)
        .output()
        .expect("binary runs");
    assert!(
        out.status.success(),
        "exit {:?} for {args:?}, stderr: {}",
        out.status.code(),
        String::from_utf8_lossy(&out.stderr)
    );
    out.stdout
}

#[test]
fn seeded_runs_are_byte_identical() {
    criterion(
        8,
        "seeded binary runs emit byte-identical JSON reports",
        f64::INFINITY,
        || {
            let suite: &[&[&str]] = &[
                &[
                    "price",
                    "--payoff",
                    "straddle:K=105",
                    "--mc",
                    "seed=7,n=50000,spot=100,vol=0.2,rate=0.05,T=1",
                    "--form",
                    "all",
                ],
                &[
                    "barrier",
                    "--payoff",
                    "call:K=100",
                    "--event",
                    "maxlt:B=130",
                    "--mc",
                    "seed=7,n=50000,spot=100,vol=0.25,rate=0.02,T=1,stat=max",
                ],
                &[
                    "hedge",
                    "--payoff",
                    "straddle:K=100",
                    "--kind",
                    "digital",
                    "--lo",
                    "0",
                    "--hi",
                    "400",
                    "--nodes",
                    "65",
                    "--mc",
                    "seed=7,n=20000,spot=100,vol=0.2,rate=0.05,T=1",
                ],
                &[
                    "american",
                    "--payoff",
                    "put:K=100",
                    "--bs",
                    "spot=100,vol=0.2,rate=0.05,T=1",
                    "--oracle-steps",
                    "500",
                ],
            ];
            let first: Vec<Vec<u8>> = suite.iter().map(|args| run_bin(args)).collect();
            let second: Vec<Vec<u8>> = suite.iter().map(|args| run_bin(args)).collect();
            for ((args, a), b) in suite.iter().zip(&first).zip(&second) {
                assert!(!a.is_empty(), "{args:?} produced no output");
                let _: serde_json::Value =
                    serde_json::from_slice(a).expect("stdout is well-formed JSON");
                assert_eq!(a, b, "{args:?} differed between runs");
            }
        },
    );
}

#[test]
fn validity_gate() {
    criterion(
        9,
        "explosive tails are rejected and the whole catalog passes the gate",
        5.0,
        || {
            let c = bs_curve(SPOT, 0.2, 0.05, 1.0).unwrap();
            let cfg = QuadConfig::for_curve(&c);

            let exp_payoff = Payoff::new(
                vec![Segment::new(0.0, f64::INFINITY, |x: f64| x.exp(), |x: f64| x.exp())
                    .with_second(|x: f64| x.exp())],
                &[],
                "exponential growth",
            )
            .unwrap();
            let rep = validate_class(&exp_payoff, &c, &cfg);
            assert!(!rep.all_pass());
            assert!(!rep.integrable || !rep.tail_decay);
            let details = format!("{} {}", rep.integrable_detail, rep.tail_detail);
            assert!(
                details.contains("overflow") || details.contains("vanishing-product"),
                "details should name the failing condition: {details}"
            );
            match price_theorem1(&exp_payoff, &c, &cfg) {
                Err(PriceError::TailConditionFailed(msg)) => {
                    assert!(!msg.is_empty());
                }
                other => panic!("expected TailConditionFailed, got {other:?}"),
            }

            for p in full_catalog() {
                let rep = validate_class(&p, &c, &cfg);
                assert!(
                    rep.all_pass(),
                    "{} failed the gate: {} / {}",
                    p.label(),
                    rep.integrable_detail,
                    rep.tail_detail
                );
                assert!(price_theorem1(&p, &c, &cfg).is_ok());
            }
        },
    );
}
