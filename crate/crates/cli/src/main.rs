use clap::{Args, Parser, Subcommand};
use strikespan::backend::BackendArgs;
use strikespan::commands::{
    cmd_american, cmd_barrier, cmd_hedge, cmd_price, cmd_validate, AmericanRequest, HedgeRequest,
    QuadOverrides,
};
use strikespan::output::OutputFormat;
use strikespan::{CliError, EXIT_DATA};

/// Option prices from call prices: European forms, static hedges, barrier
/// contracts, and American bounds, all driven by a call-price curve.
#[derive(Parser)]
#[command(name = "strikespan", version, max_term_width = 100)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct CommonArgs {
    /// Payoff: `family:key=val,...`, `@file.json`, or a raw JSON document
    #[arg(long)]
    payoff: Option<String>,

    /// Lognormal backend: `spot=100,vol=0.2,rate=0.05,T=1`
    #[arg(long)]
    bs: Option<String>,

    /// Quoted-strike backend: path to a `strike,call_price[,digital_ge]` CSV
    #[arg(long)]
    table: Option<String>,

    /// Sampled backend: `seed=7,n=100000,spot=100,vol=0.2,rate=0,T=1[,stat=max|min|avg]`
    #[arg(long)]
    mc: Option<String>,

    /// Discount factor for --table quotes (default 1)
    #[arg(long)]
    discount: Option<f64>,

    /// Quadrature convergence tolerance (absolute)
    #[arg(long)]
    tol: Option<f64>,

    /// Neglected-tail tolerance for the truncation strike
    #[arg(long = "tail-tol")]
    tail_tol: Option<f64>,

    /// Quadrature cell budget
    #[arg(long = "max-nodes")]
    max_nodes: Option<usize>,

    /// Report format: json, table, or csv
    #[arg(long, default_value = "json")]
    output: String,
}

impl CommonArgs {
    fn backend(&self) -> BackendArgs {
        BackendArgs {
            bs: self.bs.clone(),
            table: self.table.clone(),
            mc: self.mc.clone(),
            discount: self.discount,
        }
    }

    fn quad(&self) -> QuadOverrides {
        QuadOverrides {
            tol: self.tol,
            tail_tol: self.tail_tol,
            max_nodes: self.max_nodes,
        }
    }

    fn payoff(&self) -> Result<&str, CliError> {
        self.payoff
            .as_deref()
            .ok_or_else(|| CliError::data("missing --payoff"))
    }
}

#[derive(Subcommand)]
enum Command {
    /// Price a payoff with one pricing form, or all applicable forms
    Price {
        #[command(flatten)]
        common: CommonArgs,
        /// theorem1, lebesgue, bick, bl, convex, or all
        #[arg(long, default_value = "theorem1")]
        form: String,
    },
    /// Check the admissibility conditions without pricing
    Validate {
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Build a static replication portfolio and report its accuracy
    Hedge {
        #[command(flatten)]
        common: CommonArgs,
        /// digital (strip of one-strike digitals) or callspread
        #[arg(long, default_value = "digital")]
        kind: String,
        /// Lower edge of the hedge grid
        #[arg(long)]
        lo: Option<f64>,
        /// Upper edge of the hedge grid
        #[arg(long)]
        hi: Option<f64>,
        /// Grid node count (cells + 1)
        #[arg(long)]
        nodes: Option<usize>,
        /// Write the portfolio CSV here
        #[arg(long)]
        out: Option<String>,
    },
    /// European value, American upper bound, and equality certificate
    American {
        #[command(flatten)]
        common: CommonArgs,
        /// CRR lattice steps for the oracle (0 = skip)
        #[arg(long = "oracle-steps", default_value_t = 0)]
        oracle_steps: usize,
        /// Assert a constant bond even if the backend does not imply one
        #[arg(long = "assume-bond-constant")]
        assume_bond_constant: bool,
        /// Assert a martingale discounted underlying
        #[arg(long = "assume-martingale")]
        assume_martingale: bool,
        /// Current discounted underlying (default: backend spot)
        #[arg(long)]
        xbar: Option<f64>,
        /// Current inverse bond price B_t^-1 (default 1)
        #[arg(long = "bond-t")]
        bond_t: Option<f64>,
    },
    /// Price a payoff gated by a path-statistic event
    Barrier {
        #[command(flatten)]
        common: CommonArgs,
        /// Event: `maxlt:B=130` style, `@file.json`, or raw JSON
        #[arg(long)]
        event: Option<String>,
    },
}

fn run(cli: Cli) -> Result<(serde_json::Value, OutputFormat), CliError> {
    match &cli.command {
        Command::Price { common, form } => {
            let fmt = OutputFormat::parse(&common.output)?;
            let doc = cmd_price(common.payoff()?, form, &common.backend(), &common.quad())?;
            Ok((doc, fmt))
        }
        Command::Validate { common } => {
            let fmt = OutputFormat::parse(&common.output)?;
            let doc = cmd_validate(common.payoff()?, &common.backend(), &common.quad())?;
            Ok((doc, fmt))
        }
        Command::Hedge {
            common,
            kind,
            lo,
            hi,
            nodes,
            out,
        } => {
            let fmt = OutputFormat::parse(&common.output)?;
            let missing = |name: &str| CliError::data(format!("missing --{name}"));
            let req = HedgeRequest {
                payoff_spec: common.payoff()?,
                kind,
                lo: lo.ok_or_else(|| missing("lo"))?,
                hi: hi.ok_or_else(|| missing("hi"))?,
                nodes: nodes.ok_or_else(|| missing("nodes"))?,
                out: out.as_deref(),
            };
            let doc = cmd_hedge(&req, &common.backend(), &common.quad())?;
            Ok((doc, fmt))
        }
        Command::American {
            common,
            oracle_steps,
            assume_bond_constant,
            assume_martingale,
            xbar,
            bond_t,
        } => {
            let fmt = OutputFormat::parse(&common.output)?;
            let req = AmericanRequest {
                payoff_spec: common.payoff()?,
                oracle_steps: *oracle_steps,
                assume_bond_constant: *assume_bond_constant,
                assume_martingale: *assume_martingale,
                x_bar: *xbar,
                bond_factor_t: *bond_t,
            };
            let doc = cmd_american(&req, &common.backend(), &common.quad())?;
            Ok((doc, fmt))
        }
        Command::Barrier { common, event } => {
            let fmt = OutputFormat::parse(&common.output)?;
            let event = event
                .as_deref()
                .ok_or_else(|| CliError::data("missing --event"))?;
            let doc = cmd_barrier(common.payoff()?, event, &common.backend(), &common.quad())?;
            Ok((doc, fmt))
        }
    }
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // Help and version print to stdout and exit 0; real usage errors
            // land on the data exit code.
            if e.use_stderr() {
                eprint!("{e}");
                std::process::exit(EXIT_DATA);
            }
            print!("{e}");
            std::process::exit(0);
        }
    };
    match run(cli) {
        Ok((doc, fmt)) => {
            print!("{}", fmt.render(&doc));
        }
        Err(e) => {
            eprintln!("error: {e}");
            std::process::exit(e.exit_code());
        }
    }
}
