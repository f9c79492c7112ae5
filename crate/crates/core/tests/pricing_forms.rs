//! Cross-form, reference-value, and admissibility checks for the European
//! pricing forms over the analytic, quoted-table, and sampled backends.

use std::sync::Arc;

use strikespan_core::payoff::catalog;
use strikespan_core::{
    bs_curve, convex_decompose, empirical_curve, gbm_pool, price_bick, price_bl, price_convex,
    price_lebesgue, price_theorem1, price_windowed, table_curve, validate_class, CallCurve,
    Payoff, QuadConfig, Segment, TableCurve,
};

fn bs5() -> strikespan_core::BsCurve {
    bs_curve(100.0, 0.2, 0.05, 1.0).unwrap()
}

fn catalog_eight() -> Vec<Payoff> {
    vec![
        catalog::call(100.0).unwrap(),
        catalog::put(100.0).unwrap(),
        catalog::straddle(100.0).unwrap(),
        catalog::butterfly(90.0, 100.0, 110.0).unwrap(),
        catalog::capped_call(100.0, 130.0).unwrap(),
        catalog::power_call(2, 10_000.0).unwrap(),
        catalog::digital_ge(110.0).unwrap(),
        catalog::piecewise_linear(&[(0.0, 5.0), (80.0, 1.0), (120.0, 6.0)]).unwrap(),
    ]
}

/// Quoted table sampled off the lognormal curve, so its values are known.
fn table_from_bs() -> TableCurve {
    let c = bs5();
    let rows: Vec<(f64, f64)> = (3..=9)
        .map(|i| {
            let k = 20.0 * i as f64;
            (k, c.lambda(k))
        })
        .collect();
    table_curve(&rows, c.discount()).unwrap()
}

#[test]
fn all_applicable_forms_agree_pairwise() {
    let c = bs5();
    let cfg = QuadConfig::for_curve(&c);
    for p in catalog_eight() {
        let mut values = vec![
            ("theorem1", price_theorem1(&p, &c, &cfg).unwrap().value),
            ("lebesgue", price_lebesgue(&p, &c, &cfg).unwrap().value),
            ("bl", price_bl(&p, &c, &cfg).unwrap().value),
        ];
        if p.has_second() {
            values.push(("bick", price_bick(&p, &c, &cfg).unwrap().value));
        }
        if let Ok(d) = convex_decompose(&p) {
            values.push(("convex", price_convex(&d, &c, &cfg).unwrap().value));
        }
        for i in 0..values.len() {
            for j in i + 1..values.len() {
                let (na, va) = values[i];
                let (nb, vb) = values[j];
                assert!(
                    (va - vb).abs() <= 2e-4,
                    "{}: {na} = {va} vs {nb} = {vb}",
                    p.label()
                );
            }
        }
    }
}

#[test]
fn frozen_lognormal_reference_values() {
    let c = bs5();
    let cfg = QuadConfig::for_curve(&c);
    let price = |p: &Payoff| price_theorem1(p, &c, &cfg).unwrap().value;

    let cases = [
        (catalog::call(90.0).unwrap(), 16.699448408415997),
        (catalog::call(100.0).unwrap(), 10.450583572185567),
        (catalog::call(110.0).unwrap(), 6.040088129724236),
        (catalog::put(100.0).unwrap(), 5.5735260222569677),
        (catalog::straddle(100.0).unwrap(), 16.024109594442534),
        (
            catalog::butterfly(90.0, 100.0, 110.0).unwrap(),
            1.8383693937690999,
        ),
        (
            catalog::capped_call(90.0, 110.0).unwrap(),
            10.659360278691761,
        ),
        (
            catalog::power_call(2, 10_000.0).unwrap(),
            2432.7002651597466,
        ),
    ];
    for (p, want) in &cases {
        let got = price(p);
        assert!(
            (got - want).abs() <= 2e-4,
            "{}: {got} vs {want}",
            p.label()
        );
    }

    let digital = price(&catalog::digital_ge(100.0).unwrap());
    let want = 0.95122942450071401 * 0.55961769237024252;
    assert!((digital - want).abs() <= 1e-12, "{digital} vs {want}");
}

#[test]
fn call_and_digital_recovery_on_every_backend() {
    let bs = bs5();
    let table = table_from_bs();
    let pool = gbm_pool(7, 50_000, 100.0, 0.2, 0.05, 1.0, None).unwrap();
    let emp = empirical_curve(&pool, bs.discount());

    let backends: [(&str, &dyn CallCurve); 3] = [("bs", &bs), ("table", &table), ("mc", &emp)];
    for (name, c) in backends {
        let cfg = QuadConfig::for_curve(c);
        for i in 0..8 {
            let k = 65.0 + 15.0 * i as f64;
            let call = catalog::call(k).unwrap();
            let got = price_theorem1(&call, c, &cfg).unwrap().value;
            assert!(
                (got - c.lambda(k)).abs() <= 1e-6 * 100.0,
                "{name} call {k}: {got} vs {}",
                c.lambda(k)
            );

            let digital = catalog::digital_ge(k).unwrap();
            let got = price_theorem1(&digital, c, &cfg).unwrap().value;
            assert_eq!(
                got,
                c.discount() * c.digital_ge(k),
                "{name} digital {k}"
            );
        }
    }
}

#[test]
fn put_call_parity_on_every_backend() {
    let bs = bs5();
    let table = table_from_bs();
    let pool = gbm_pool(7, 50_000, 100.0, 0.2, 0.05, 1.0, None).unwrap();
    let emp = empirical_curve(&pool, bs.discount());

    let backends: [&dyn CallCurve; 3] = [&bs, &table, &emp];
    for c in backends {
        let cfg = QuadConfig::for_curve(c);
        for k in [70.0, 90.0, 100.0, 110.0, 140.0] {
            let call = price_theorem1(&catalog::call(k).unwrap(), c, &cfg)
                .unwrap()
                .value;
            let put = price_theorem1(&catalog::put(k).unwrap(), c, &cfg)
                .unwrap()
                .value;
            let parity = call - put - (c.lambda(0.0) - c.discount() * k);
            assert!(parity.abs() <= 2e-4, "K = {k}: parity gap {parity}");
        }
    }
}

#[test]
fn windowed_prices_satisfy_hand_identities() {
    let c = bs5();
    let cfg = QuadConfig::for_curve(&c);
    let disc = c.discount();

    // Indicator of the window.
    let one = catalog::piecewise_linear(&[(0.0, 1.0), (1.0, 1.0)]).unwrap();
    let r = price_windowed(&one, 85.0, 115.0, (true, true), &c, &cfg).unwrap();
    let want = disc * (c.digital_ge(85.0) - c.digital_gt(115.0));
    assert!((r.value - want).abs() <= 1e-12);

    // f(x) = x on [0, β]: the forward minus everything above β.
    let ident = catalog::power_call(1, 0.0).unwrap();
    let beta = 150.0;
    let r = price_windowed(&ident, 0.0, beta, (true, true), &c, &cfg).unwrap();
    let want = c.lambda(0.0) - c.lambda(beta) - beta * disc * c.digital_gt(beta);
    assert!((r.value - want).abs() <= 1e-9, "{} vs {want}", r.value);

    // Adjacent half-open windows add up to the union.
    let p = catalog::straddle(100.0).unwrap();
    let left = price_windowed(&p, 60.0, 100.0, (true, false), &c, &cfg).unwrap();
    let right = price_windowed(&p, 100.0, 140.0, (true, false), &c, &cfg).unwrap();
    let union = price_windowed(&p, 60.0, 140.0, (true, false), &c, &cfg).unwrap();
    assert!(
        ((left.value + right.value) - union.value).abs() <= 1e-9,
        "{} + {} vs {}",
        left.value,
        right.value,
        union.value
    );

    // A wide window on a payoff that goes flat approaches the full price.
    let capped = catalog::capped_call(100.0, 130.0).unwrap();
    let full = price_theorem1(&capped, &c, &cfg).unwrap().value;
    let windowed = price_windowed(&capped, 0.0, 1_000.0, (true, true), &c, &cfg)
        .unwrap()
        .value;
    assert!((full - windowed).abs() <= 1e-6, "{full} vs {windowed}");
}

#[test]
fn exponential_payoff_fails_the_class_gate_on_lognormal() {
    let c = bs5();
    let cfg = QuadConfig::for_curve(&c);
    let exp = Payoff::new(
        vec![Segment::new(
            0.0,
            f64::INFINITY,
            |x| x.exp(),
            |x| x.exp(),
        )],
        &[],
        "exp(x)",
    )
    .unwrap();

    let report = validate_class(&exp, &c, &cfg);
    assert!(!report.all_pass());
    assert!(!report.integrable, "{}", report.integrable_detail);
    assert!(!report.tail_decay);
    assert!(
        report.tail_detail.contains("vanishing-product tail condition"),
        "{}",
        report.tail_detail
    );
    assert!(price_theorem1(&exp, &c, &cfg).is_err());

    for bounded in [
        catalog::capped_call(100.0, 130.0).unwrap(),
        catalog::butterfly(90.0, 100.0, 110.0).unwrap(),
        catalog::digital_gt(120.0).unwrap(),
    ] {
        let report = validate_class(&bounded, &c, &cfg);
        assert!(report.all_pass(), "{}: {}", bounded.label(), report.tail_detail);
    }
}

#[test]
fn tighter_tail_tolerance_extends_the_truncation() {
    let c = bs5();
    let p = catalog::power_call(2, 10_000.0).unwrap();
    let mut prev_trunc = 0.0;
    let mut prev_bound = f64::INFINITY;
    let mut values = Vec::new();
    for tail_tol in [1e-7, 1e-10, 1e-13] {
        let mut cfg = QuadConfig::for_curve(&c);
        cfg.tail_tol = tail_tol;
        let r = price_theorem1(&p, &c, &cfg).unwrap();
        assert!(r.truncation >= prev_trunc);
        assert!(r.tail_bound <= prev_bound);
        prev_trunc = r.truncation;
        prev_bound = r.tail_bound;
        values.push(r.value);
    }
    assert!((values[0] - values[2]).abs() <= 1e-4);
}

#[test]
fn pricing_is_linear_in_the_payoff() {
    let c = bs5();
    let cfg = QuadConfig::for_curve(&c);
    let call = Arc::new(catalog::call(100.0).unwrap());
    let put = Arc::new(catalog::put(90.0).unwrap());
    let combo = Payoff::linear_combination(2.0, &call, -3.0, &put).unwrap();

    let vc = price_theorem1(&call, &c, &cfg).unwrap().value;
    let vp = price_theorem1(&put, &c, &cfg).unwrap().value;
    let vcombo = price_theorem1(&combo, &c, &cfg).unwrap().value;
    assert!(
        (vcombo - (2.0 * vc - 3.0 * vp)).abs() <= 4.0 * cfg.tol,
        "{vcombo} vs {}",
        2.0 * vc - 3.0 * vp
    );
}

#[test]
fn table_curves_price_quotes_back_exactly() {
    let table = table_from_bs();
    let cfg = QuadConfig::for_curve(&table);
    let bs = bs5();
    for i in 3..=9 {
        let k = 20.0 * i as f64;
        let got = price_theorem1(&catalog::call(k).unwrap(), &table, &cfg)
            .unwrap()
            .value;
        assert!(
            (got - bs.lambda(k)).abs() <= 1e-10,
            "K = {k}: {got} vs {}",
            bs.lambda(k)
        );
    }
}
