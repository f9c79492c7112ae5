//! Curve backend selection and construction.
//!
//! Exactly one of `--bs`, `--table`, `--mc` picks the call curve:
//!
//! * `--bs spot=100,vol=0.2,rate=0.05,T=1`: lognormal closed form,
//! * `--table quotes.csv`: quoted strikes, linearly interpolated
//!   (`--discount` supplies `B_T⁻¹`, default 1),
//! * `--mc seed=7,n=100000,spot=100,vol=0.2,rate=0,T=1[,stat=max|min|avg]`:
//!   empirical curve over a reproducible sample pool; `seed` may come
//!   from the `STRIKESPAN_SEED` environment variable instead.

use serde_json::{json, Value};
use strikespan_core::{
    bs_curve, empirical_curve, gbm_pool, BarrierKind, BsCurve, CallCurve, EmpiricalCurve,
    SamplePool, TableCurve,
};

use crate::market_io::read_market_csv;
use crate::output::num;
use crate::{parse_f64, parse_kv_list, CliError};

pub const SEED_ENV: &str = "STRIKESPAN_SEED";

#[derive(Clone, Debug, Default)]
pub struct BackendArgs {
    pub bs: Option<String>,
    pub table: Option<String>,
    pub mc: Option<String>,
    pub discount: Option<f64>,
}

#[derive(Debug)]
pub enum Backend {
    Bs {
        spot: f64,
        vol: f64,
        rate: f64,
        maturity: f64,
        curve: BsCurve,
    },
    Table {
        path: String,
        discount: f64,
        curve: TableCurve,
    },
    Mc {
        seed: u64,
        n: usize,
        spot: f64,
        vol: f64,
        rate: f64,
        maturity: f64,
        stat: Option<BarrierKind>,
        discount: f64,
        pool: SamplePool,
        curve: EmpiricalCurve,
    },
}

/// Key=value lookup that records which keys were consumed.
struct KvArgs {
    pairs: Vec<(String, String)>,
    used: Vec<bool>,
    flag: &'static str,
}

impl KvArgs {
    fn new(flag: &'static str, s: &str) -> Result<Self, CliError> {
        let pairs = parse_kv_list(s)?;
        let used = vec![false; pairs.len()];
        Ok(Self { pairs, used, flag })
    }

    fn get(&mut self, key: &str) -> Option<&str> {
        for (i, (k, v)) in self.pairs.iter().enumerate() {
            if k == key {
                self.used[i] = true;
                return Some(v);
            }
        }
        None
    }

    fn require_f64(&mut self, key: &str) -> Result<f64, CliError> {
        let flag = self.flag;
        let v = self
            .get(key)
            .ok_or_else(|| CliError::data(format!("--{flag}: missing `{key}=`")))?
            .to_string();
        parse_f64(key, &v)
    }

    fn finish(&self) -> Result<(), CliError> {
        for (i, (k, _)) in self.pairs.iter().enumerate() {
            if !self.used[i] {
                return Err(CliError::data(format!(
                    "--{}: unknown key `{k}`",
                    self.flag
                )));
            }
        }
        Ok(())
    }
}

impl Backend {
    pub fn build(args: &BackendArgs) -> Result<Self, CliError> {
        let chosen = usize::from(args.bs.is_some())
            + usize::from(args.table.is_some())
            + usize::from(args.mc.is_some());
        if chosen != 1 {
            return Err(CliError::data(
                "select exactly one curve backend: --bs, --table, or --mc",
            ));
        }
        if args.discount.is_some() && args.table.is_none() {
            return Err(CliError::data("--discount only applies to --table"));
        }

        if let Some(spec) = &args.bs {
            let mut kv = KvArgs::new("bs", spec)?;
            let spot = kv.require_f64("spot")?;
            let vol = kv.require_f64("vol")?;
            let rate = kv.require_f64("rate")?;
            let maturity = kv.require_f64("T")?;
            kv.finish()?;
            let curve = bs_curve(spot, vol, rate, maturity)?;
            return Ok(Backend::Bs {
                spot,
                vol,
                rate,
                maturity,
                curve,
            });
        }

        if let Some(path) = &args.table {
            let discount = args.discount.unwrap_or(1.0);
            let curve = read_market_csv(path, discount)?;
            return Ok(Backend::Table {
                path: path.clone(),
                discount,
                curve,
            });
        }

        let spec = args.mc.as_ref().expect("one backend is set");
        let mut kv = KvArgs::new("mc", spec)?;
        let seed = match kv.get("seed") {
            Some(v) => v
                .parse::<u64>()
                .map_err(|_| CliError::data(format!("--mc: seed must be a u64, got `{v}`")))?,
            None => match std::env::var(SEED_ENV) {
                Ok(v) => v.parse::<u64>().map_err(|_| {
                    CliError::data(format!("{SEED_ENV} must be a u64, got `{v}`"))
                })?,
                Err(_) => {
                    return Err(CliError::data(format!(
                        "--mc: missing `seed=` (or set {SEED_ENV})"
                    )))
                }
            },
        };
        let n_raw = kv
            .get("n")
            .ok_or_else(|| CliError::data("--mc: missing `n=`"))?
            .to_string();
        let n = n_raw
            .parse::<usize>()
            .map_err(|_| CliError::data(format!("--mc: n must be a count, got `{n_raw}`")))?;
        let spot = kv.require_f64("spot")?;
        let vol = kv.require_f64("vol")?;
        let rate = kv.require_f64("rate")?;
        let maturity = kv.require_f64("T")?;
        let stat = match kv.get("stat") {
            None => None,
            Some("max") => Some(BarrierKind::RunningMax),
            Some("min") => Some(BarrierKind::RunningMin),
            Some("avg") => Some(BarrierKind::Average),
            Some(other) => {
                return Err(CliError::data(format!(
                    "--mc: unknown stat `{other}` (expected max, min, or avg)"
                )))
            }
        };
        kv.finish()?;

        let pool = gbm_pool(seed, n, spot, vol, rate, maturity, stat)?;
        let discount = (-rate * maturity).exp();
        let curve = empirical_curve(&pool, discount);
        Ok(Backend::Mc {
            seed,
            n,
            spot,
            vol,
            rate,
            maturity,
            stat,
            discount,
            pool,
            curve,
        })
    }

    pub fn curve(&self) -> &dyn CallCurve {
        match self {
            Backend::Bs { curve, .. } => curve,
            Backend::Table { curve, .. } => curve,
            Backend::Mc { curve, .. } => curve,
        }
    }

    pub fn pool(&self) -> Option<&SamplePool> {
        match self {
            Backend::Mc { pool, .. } => Some(pool),
            _ => None,
        }
    }

    /// Lattice/oracle parameters, when the backend is parametric.
    pub fn dynamics(&self) -> Option<(f64, f64, f64, f64)> {
        match *self {
            Backend::Bs {
                spot,
                vol,
                rate,
                maturity,
                ..
            }
            | Backend::Mc {
                spot,
                vol,
                rate,
                maturity,
                ..
            } => Some((spot, vol, rate, maturity)),
            Backend::Table { .. } => None,
        }
    }

    /// Spot used as the default current underlying level.
    pub fn default_x_bar(&self) -> f64 {
        match *self {
            Backend::Bs { spot, .. } | Backend::Mc { spot, .. } => spot,
            Backend::Table { ref curve, .. } => curve.forward() / curve.discount(),
        }
    }

    /// True when the backend's own model discounts to a martingale.
    pub fn martingale(&self) -> bool {
        !matches!(self, Backend::Table { .. })
    }

    /// True when the backend's bond is constant over time.
    pub fn bond_constant(&self) -> bool {
        match *self {
            Backend::Bs { rate, .. } | Backend::Mc { rate, .. } => rate == 0.0,
            Backend::Table { .. } => false,
        }
    }

    pub fn echo(&self) -> Value {
        match self {
            Backend::Bs {
                spot,
                vol,
                rate,
                maturity,
                ..
            } => json!({
                "kind": "bs",
                "spot": num(*spot),
                "vol": num(*vol),
                "rate": num(*rate),
                "maturity": num(*maturity),
            }),
            Backend::Table {
                path, discount, ..
            } => json!({
                "kind": "table",
                "path": path,
                "discount": num(*discount),
            }),
            Backend::Mc {
                seed,
                n,
                spot,
                vol,
                rate,
                maturity,
                stat,
                discount,
                ..
            } => json!({
                "kind": "mc",
                "seed": seed,
                "n": n,
                "spot": num(*spot),
                "vol": num(*vol),
                "rate": num(*rate),
                "maturity": num(*maturity),
                "stat": match stat {
                    None => Value::Null,
                    Some(BarrierKind::RunningMax) => Value::from("max"),
                    Some(BarrierKind::RunningMin) => Value::from("min"),
                    Some(BarrierKind::Average) => Value::from("avg"),
                },
                "discount": num(*discount),
            }),
        }
    }
}
