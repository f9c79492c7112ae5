//! The four subcommands. Each returns the full report document as a JSON
//! tree; rendering and exit codes live in `main`.

use serde_json::{json, Map, Value};
use strikespan_core::{
    american_bound, binomial_american, convex_decompose, empirical_curve, equality_certificate,
    joint_curve, price_barrier, price_bick, price_bl, price_convex, price_lebesgue,
    price_theorem1, price_windowed, replication_report, terminal_payoff, validate_class,
};
use strikespan_core::{
    BarrierPriceReport, CallCurve, HedgeKind, MarketState, ModelAssumptions, Payoff, PriceReport,
    QuadConfig,
};

use crate::backend::{Backend, BackendArgs};
use crate::event::{event_echo, parse_event};
use crate::output::num;
use crate::payoff_spec::parse_payoff;
use crate::portfolio_io::{portfolio_rows, write_portfolio_csv};
use crate::CliError;

/// `--tol`, `--tail-tol`, `--max-nodes` overrides on the curve-scaled
/// defaults.
#[derive(Clone, Copy, Debug, Default)]
pub struct QuadOverrides {
    pub tol: Option<f64>,
    pub tail_tol: Option<f64>,
    pub max_nodes: Option<usize>,
}

impl QuadOverrides {
    pub fn resolve(&self, c: &dyn CallCurve) -> Result<QuadConfig, CliError> {
        let mut cfg = QuadConfig::for_curve(c);
        if let Some(t) = self.tol {
            if !(t.is_finite() && t > 0.0) {
                return Err(CliError::data(format!("--tol must be positive, got {t}")));
            }
            cfg.tol = t;
        }
        if let Some(t) = self.tail_tol {
            if !(t.is_finite() && t > 0.0) {
                return Err(CliError::data(format!(
                    "--tail-tol must be positive, got {t}"
                )));
            }
            cfg.tail_tol = t;
        }
        if let Some(n) = self.max_nodes {
            if n < 4 {
                return Err(CliError::data(format!(
                    "--max-nodes must be at least 4, got {n}"
                )));
            }
            cfg.max_nodes = n;
        }
        Ok(cfg)
    }
}

fn quad_echo(cfg: &QuadConfig) -> Value {
    json!({
        "tol": num(cfg.tol),
        "tail_tol": num(cfg.tail_tol),
        "max_nodes": cfg.max_nodes,
    })
}

fn envelope(config: Value, report: Value) -> Value {
    json!({
        "schema": 1,
        "tool": {
            "name": "strikespan",
            "version": env!("CARGO_PKG_VERSION"),
        },
        "config": config,
        "report": report,
    })
}

fn price_report_json(r: &PriceReport) -> Value {
    json!({
        "value": num(r.value),
        "cash_term": num(r.cash_term),
        "integral_term": num(r.integral_term),
        "jump_left_term": num(r.jump_left_term),
        "jump_right_term": num(r.jump_right_term),
        "truncation": num(r.truncation),
        "tail_bound": num(r.tail_bound),
        "n_quadrature": r.n_quadrature,
    })
}

const FORMS: [&str; 5] = ["theorem1", "lebesgue", "bick", "bl", "convex"];

fn run_form(
    form: &str,
    p: &Payoff,
    c: &dyn CallCurve,
    cfg: &QuadConfig,
) -> Result<PriceReport, CliError> {
    match form {
        "theorem1" => Ok(price_theorem1(p, c, cfg)?),
        "lebesgue" => Ok(price_lebesgue(p, c, cfg)?),
        "bick" => Ok(price_bick(p, c, cfg)?),
        "bl" => Ok(price_bl(p, c, cfg)?),
        "convex" => {
            let d = convex_decompose(p)?;
            Ok(price_convex(&d, c, cfg)?)
        }
        other => Err(CliError::data(format!(
            "unknown form `{other}` (expected theorem1, lebesgue, bick, bl, convex, or all)"
        ))),
    }
}

/// Whether a form's failure means "inapplicable here" rather than a hard
/// error; `--form all` skips those.
fn skippable(form: &str, e: &CliError) -> bool {
    match form {
        "bick" => e.message().contains("second derivative"),
        "bl" => e.message().contains("density"),
        "convex" => e.message().contains("not convex"),
        _ => false,
    }
}

pub fn cmd_price(
    payoff_spec: &str,
    form: &str,
    backend_args: &BackendArgs,
    quad: &QuadOverrides,
) -> Result<Value, CliError> {
    let p = parse_payoff(payoff_spec)?;
    let b = Backend::build(backend_args)?;
    let c = b.curve();
    let cfg = quad.resolve(c)?;

    let report = if form == "all" {
        let mut forms = Map::new();
        let mut values = Vec::new();
        for name in FORMS {
            match run_form(name, &p, c, &cfg) {
                Ok(r) => {
                    values.push(r.value);
                    forms.insert(name.to_string(), price_report_json(&r));
                }
                Err(e) if skippable(name, &e) => {
                    forms.insert(name.to_string(), Value::Null);
                }
                Err(e) => return Err(e),
            }
        }
        let mut gap = 0.0_f64;
        for (i, a) in values.iter().enumerate() {
            for bv in &values[i + 1..] {
                gap = gap.max((a - bv).abs());
            }
        }
        json!({
            "forms": Value::Object(forms),
            "applicable_forms": values.len(),
            "max_pairwise_gap": num(gap),
        })
    } else {
        let r = run_form(form, &p, c, &cfg)?;
        price_report_json(&r)
    };

    let config = json!({
        "command": "price",
        "payoff": p.label(),
        "form": form,
        "backend": b.echo(),
        "quad": quad_echo(&cfg),
    });
    Ok(envelope(config, report))
}

pub fn cmd_validate(
    payoff_spec: &str,
    backend_args: &BackendArgs,
    quad: &QuadOverrides,
) -> Result<Value, CliError> {
    let p = parse_payoff(payoff_spec)?;
    let b = Backend::build(backend_args)?;
    let c = b.curve();
    let cfg = quad.resolve(c)?;
    let v = validate_class(&p, c, &cfg);
    let report = json!({
        "all_pass": v.all_pass(),
        "piecewise_smooth": v.piecewise_smooth,
        "integrable": v.integrable,
        "integrable_detail": v.integrable_detail,
        "tail_decay": v.tail_decay,
        "tail_detail": v.tail_detail,
        "truncation": v.truncation.map(num).unwrap_or(Value::Null),
        "tail_bound": v.tail_bound.map(num).unwrap_or(Value::Null),
    });
    let config = json!({
        "command": "validate",
        "payoff": p.label(),
        "backend": b.echo(),
        "quad": quad_echo(&cfg),
    });
    Ok(envelope(config, report))
}

pub struct HedgeRequest<'a> {
    pub payoff_spec: &'a str,
    pub kind: &'a str,
    pub lo: f64,
    pub hi: f64,
    pub nodes: usize,
    pub out: Option<&'a str>,
}

pub fn cmd_hedge(
    req: &HedgeRequest<'_>,
    backend_args: &BackendArgs,
    quad: &QuadOverrides,
) -> Result<Value, CliError> {
    let p = parse_payoff(req.payoff_spec)?;
    let b = Backend::build(backend_args)?;
    let c = b.curve();
    let cfg = quad.resolve(c)?;

    if req.nodes < 2 {
        return Err(CliError::data(format!(
            "--nodes must be at least 2, got {}",
            req.nodes
        )));
    }
    let grid: Vec<f64> = (0..req.nodes)
        .map(|k| {
            if k + 1 == req.nodes {
                req.hi
            } else {
                req.lo + (req.hi - req.lo) * k as f64 / (req.nodes - 1) as f64
            }
        })
        .collect();

    let (h, direct) = match req.kind {
        "digital" => {
            let h = strikespan_core::build_digital_hedge(&p, &grid)?;
            let direct = price_theorem1(&p, c, &cfg)?.value;
            (h, direct)
        }
        "callspread" => {
            let h = strikespan_core::build_call_spread_hedge(&p, req.lo, req.hi, req.nodes - 1)?;
            let direct = price_windowed(&p, req.lo, req.hi, (true, true), c, &cfg)?.value;
            (h, direct)
        }
        other => {
            return Err(CliError::data(format!(
                "unknown hedge kind `{other}` (expected digital or callspread)"
            )))
        }
    };

    // Replication error over the hedge grid itself; both constructions are
    // exact there when every payoff kink is a grid node.
    let mut grid_sup = 0.0_f64;
    for &x in &grid {
        grid_sup = grid_sup.max((terminal_payoff(&h, x) - p.eval(x)).abs());
    }

    let value = strikespan_core::portfolio_value(&h, c);
    let sample = match b.pool() {
        Some(pool) => {
            let r = replication_report(&h, &p, pool, c.discount());
            json!({
                "sup_error": num(r.sup_error),
                "mean_abs_error": num(r.mean_abs_error),
                "value_gap": num(r.value_gap),
            })
        }
        None => Value::Null,
    };

    let rows = portfolio_rows(&h);
    let written = match req.out {
        Some(path) => {
            write_portfolio_csv(&h, path)?;
            Value::from(path)
        }
        None => Value::Null,
    };

    let report = json!({
        "kind": match h.kind {
            HedgeKind::DigitalStrip => "digital",
            HedgeKind::CallSpread => "callspread",
        },
        "cash": num(h.cash),
        "digital_positions": h.digital_strip.len(),
        "spread_positions": h.call_spreads.len(),
        "rows": rows.len(),
        "portfolio_value": num(value),
        "direct_value": num(direct),
        "value_gap": num(value - direct),
        "grid_sup_error": num(grid_sup),
        "sample": sample,
        "portfolio_csv": written,
    });
    let config = json!({
        "command": "hedge",
        "payoff": p.label(),
        "kind": req.kind,
        "grid": {"lo": num(req.lo), "hi": num(req.hi), "nodes": req.nodes},
        "backend": b.echo(),
        "quad": quad_echo(&cfg),
    });
    Ok(envelope(config, report))
}

pub struct AmericanRequest<'a> {
    pub payoff_spec: &'a str,
    pub oracle_steps: usize,
    pub assume_bond_constant: bool,
    pub assume_martingale: bool,
    pub x_bar: Option<f64>,
    pub bond_factor_t: Option<f64>,
}

pub fn cmd_american(
    req: &AmericanRequest<'_>,
    backend_args: &BackendArgs,
    quad: &QuadOverrides,
) -> Result<Value, CliError> {
    let p = parse_payoff(req.payoff_spec)?;
    let b = Backend::build(backend_args)?;
    let c = b.curve();
    let cfg = quad.resolve(c)?;

    let d = convex_decompose(&p)?;
    let assumptions = ModelAssumptions {
        bond_constant: b.bond_constant() || req.assume_bond_constant,
        martingale: b.martingale() || req.assume_martingale,
    };
    let state = MarketState {
        x_bar: req.x_bar.unwrap_or_else(|| b.default_x_bar()),
        bond_factor_t: req.bond_factor_t.unwrap_or(1.0),
    };
    if !(state.x_bar.is_finite() && state.x_bar >= 0.0) {
        return Err(CliError::data(format!(
            "--xbar must be finite and nonnegative, got {}",
            state.x_bar
        )));
    }
    if !(state.bond_factor_t.is_finite() && state.bond_factor_t >= c.discount()) {
        return Err(CliError::data(format!(
            "--bond-t must be at least the maturity discount {} (bond prices nondecreasing), got {}",
            c.discount(),
            state.bond_factor_t
        )));
    }

    let mut rep = american_bound(&d, c, state, assumptions, &cfg)?;
    let cert = equality_certificate(&d, assumptions);

    let oracle = if req.oracle_steps > 0 {
        let (spot, vol, rate, maturity) = b.dynamics().ok_or_else(|| {
            CliError::data("--oracle-steps needs a parametric backend (--bs or --mc)")
        })?;
        let (am, eu) = binomial_american(&p, spot, vol, rate, maturity, req.oracle_steps)?;
        rep.oracle_value = Some(am);
        json!({
            "steps": req.oracle_steps,
            "american_value": num(am),
            "european_value": num(eu),
            "within_bound": am <= rep.bound + 1e-9 * (1.0 + rep.bound.abs()),
        })
    } else {
        Value::Null
    };

    let report = json!({
        "european_value": num(rep.european_value),
        "bound": num(rep.bound),
        "cash_gap": num(rep.cash_gap),
        "slope_gap": num(rep.slope_gap),
        "gap_ratio": num(rep.gap_ratio),
        "equality_certified": rep.equality_certified,
        "certificate_reasons": cert.reasons,
        "decomposition": {
            "f0": num(d.f0),
            "slope0": num(d.slope0),
            "atoms": d.atoms.len(),
        },
        "oracle": oracle,
    });
    let config = json!({
        "command": "american",
        "payoff": p.label(),
        "backend": b.echo(),
        "quad": quad_echo(&cfg),
        "assumptions": {
            "bond_constant": assumptions.bond_constant,
            "martingale": assumptions.martingale,
        },
        "state": {
            "x_bar": num(state.x_bar),
            "bond_factor_t": num(state.bond_factor_t),
        },
        "oracle_steps": req.oracle_steps,
    });
    Ok(envelope(config, report))
}

fn barrier_report_json(r: &BarrierPriceReport) -> Value {
    json!({
        "value": num(r.value),
        "cash_term": num(r.cash_term),
        "integral_term": num(r.integral_term),
        "jump_left_term": num(r.jump_left_term),
        "jump_right_term": num(r.jump_right_term),
        "barrier_prob": num(r.barrier_prob),
        "truncation": num(r.truncation),
        "tail_bound": num(r.tail_bound),
        "n_quadrature": r.n_quadrature,
    })
}

pub fn cmd_barrier(
    payoff_spec: &str,
    event_spec: &str,
    backend_args: &BackendArgs,
    quad: &QuadOverrides,
) -> Result<Value, CliError> {
    let p = parse_payoff(payoff_spec)?;
    let b = Backend::build(backend_args)?;
    let Backend::Mc { discount, .. } = &b else {
        return Err(CliError::data(
            "barrier pricing requires the --mc backend (coupled path statistics)",
        ));
    };
    let discount = *discount;
    let pool = b.pool().expect("mc backend has a pool");
    let event = parse_event(event_spec)?;

    let jc = joint_curve(pool, &event, discount)?;
    let marginal = jc.marginal();
    let cfg = quad.resolve(&marginal)?;

    let rep = price_barrier(&p, &jc, &cfg)?;
    let comp = price_barrier(&p, &jc.complement(), &cfg)?;
    let vanilla = price_theorem1(&p, &empirical_curve(pool, discount), &cfg)?;
    let parity_gap = rep.value + comp.value - vanilla.value;

    let report = json!({
        "event": barrier_report_json(&rep),
        "complement_value": num(comp.value),
        "vanilla_value": num(vanilla.value),
        "parity_gap": num(parity_gap),
    });
    let config = json!({
        "command": "barrier",
        "payoff": p.label(),
        "event": event_echo(&event),
        "backend": b.echo(),
        "quad": quad_echo(&cfg),
    });
    Ok(envelope(config, report))
}
