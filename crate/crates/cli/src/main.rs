//! `utm-heat`: command-line access to the half-line and interval heat
//! solvers, obstruction certificates and control synthesis.

mod error;
mod output;
mod run;
mod spec;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use utm_heat::control::Regularization;

use crate::error::CliError;
use crate::spec::{
    parse_complex, parse_manufactured, parse_profile, parse_signal, parse_tangential, Command, Format, IntervalArm, Manufactured,
    ProblemKind, ProblemSpecDocument, ScanSpec, Spacing,
};

#[derive(Parser, Debug)]
#[command(name = "utm-heat", version, about = "Heat equation on the half line and the interval via the unified transform")]
struct Cli {
    #[command(subcommand)]
    command: Sub,

    /// Contour leg angle in (0, π/4).
    #[arg(long, global = true)]
    theta: Option<f64>,
    /// Contour truncation radius (derived from the evaluation window when absent).
    #[arg(long, global = true)]
    lambda_max: Option<f64>,
    /// Geometric panels per contour leg.
    #[arg(long, global = true)]
    panels: Option<usize>,
    /// Origin indentation radius of the interval contours.
    #[arg(long, global = true)]
    indent: Option<f64>,
    /// Worker threads.
    #[arg(long, global = true, env = "UTM_HEAT_JOBS")]
    jobs: Option<usize>,
    /// Output file (stdout when absent).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
}

#[derive(Args, Debug)]
struct RegArgs {
    /// Tikhonov weight relative to ‖A‖₂² (default 1e-10).
    #[arg(long, conflicts_with = "mu_abs")]
    mu: Option<f64>,
    /// Absolute Tikhonov weight.
    #[arg(long)]
    mu_abs: Option<f64>,
}

impl RegArgs {
    fn get(&self) -> Option<Regularization> {
        match (self.mu, self.mu_abs) {
            (Some(r), _) => Some(Regularization::Relative(r)),
            (_, Some(a)) => Some(Regularization::Absolute(a)),
            _ => None,
        }
    }
}

#[derive(Subcommand, Debug)]
enum Sub {
    /// Evaluate u(x, t) on the half line.
    SolveHalfline {
        #[arg(long, default_value = "zero")]
        u0: String,
        #[arg(long, default_value = "zero")]
        g: String,
        #[arg(long = "T", default_value_t = 1.0)]
        horizon: f64,
        #[arg(long, value_delimiter = ',')]
        x: Vec<f64>,
        #[arg(long)]
        t: Option<f64>,
    },
    /// Evaluate u(x, t) on [0, L] with u(0, t) = 0 and u(L, t) = h(t).
    SolveInterval {
        #[arg(long, default_value = "zero")]
        u0: String,
        #[arg(long, default_value = "zero")]
        h: String,
        #[arg(long = "T", default_value_t = 1.0)]
        horizon: f64,
        #[arg(long = "L", default_value_t = 1.0)]
        length: f64,
        #[arg(long, value_delimiter = ',')]
        x: Vec<f64>,
        #[arg(long)]
        t: Option<f64>,
    },
    /// Global relation residual of a manufactured solution.
    CheckGr {
        /// `exp:a=<a>` (half line) or `half_space:b=<b>`.
        #[arg(long)]
        manufactured: String,
        /// Spectral point `re,im`; repeat for several.
        #[arg(long, allow_hyphen_values = true)]
        lambda: Vec<String>,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        lambda_prime: Vec<f64>,
        #[arg(long)]
        t: Option<f64>,
        #[arg(long = "T", default_value_t = 1.0)]
        horizon: f64,
    },
    /// Obstruction certificate of a half-line initial state.
    Certify {
        #[arg(long)]
        u0: String,
        /// `min:max:points`, log-spaced.
        #[arg(long)]
        scan: Option<String>,
    },
    /// Growth of the t-transform of a boundary signal in λ².
    GrowthTest {
        #[arg(long)]
        g: String,
        #[arg(long = "T", default_value_t = 1.0)]
        horizon: f64,
        /// `min:max:points` of λ², linearly spaced.
        #[arg(long)]
        k_grid: Option<String>,
        #[arg(long)]
        bound: Option<f64>,
    },
    /// Boundary control steering an interval state to rest.
    Synthesize {
        #[arg(long)]
        u0: String,
        #[arg(long = "T", default_value_t = 0.5)]
        horizon: f64,
        #[arg(long = "L", default_value_t = 1.0)]
        length: f64,
        /// Basis sizes.
        #[arg(long = "K", value_delimiter = ',')]
        k: Vec<usize>,
        #[arg(long)]
        basis: Option<String>,
        #[arg(long)]
        collocation: Option<usize>,
        #[command(flatten)]
        reg: RegArgs,
    },
    /// Best-effort boundary control on the half line.
    AttemptHalfline {
        #[arg(long)]
        u0: String,
        #[arg(long = "T", default_value_t = 1.0)]
        horizon: f64,
        #[arg(long = "K", value_delimiter = ',')]
        k: Vec<usize>,
        #[command(flatten)]
        reg: RegArgs,
    },
    /// Interval synthesis and half-line attempt side by side.
    Dichotomy {
        #[arg(long, default_value = "exp_decay:a=1")]
        u0: String,
        #[arg(long = "T", default_value_t = 1.0)]
        horizon: f64,
        #[arg(long, default_value = "sine_mode:n=1")]
        interval_u0: String,
        #[arg(long = "interval-T", default_value_t = 0.5)]
        interval_horizon: f64,
        #[arg(long = "L", default_value_t = 1.0)]
        length: f64,
        #[arg(long = "K", value_delimiter = ',')]
        k: Vec<usize>,
        #[command(flatten)]
        reg: RegArgs,
    },
    /// Per-frequency certificates for a separable half-space state a(x′)·b(x_N).
    HalfspaceCertify {
        /// Normal factor b(x_N).
        #[arg(long)]
        u0: String,
        /// Tangential factor, e.g. `gaussian:amp=1,s=1` or `two_sided_exp:r=1`.
        #[arg(long)]
        tangential: Option<String>,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        lambda_prime: Vec<f64>,
        #[arg(long)]
        scan: Option<String>,
        /// Temporal factor of a separable boundary datum, for the growth diagnostic.
        #[arg(long)]
        g: Option<String>,
        /// The datum's tangential factor evolves by the free heat flow.
        #[arg(long)]
        evolving: bool,
        #[arg(long)]
        k_grid: Option<String>,
        #[arg(long = "T", default_value_t = 1.0)]
        horizon: f64,
    },
    /// Representation against Crank–Nicolson (and the sine series when h = 0).
    OracleCompare {
        #[arg(long, value_enum, default_value = "half_line")]
        problem: ProblemKind,
        #[arg(long, default_value = "zero")]
        u0: String,
        /// Boundary datum: g on the half line, h at x = L on the interval.
        #[arg(long, default_value = "zero")]
        boundary: String,
        #[arg(long = "T", default_value_t = 1.0)]
        horizon: f64,
        #[arg(long = "L")]
        length: Option<f64>,
        #[arg(long, value_delimiter = ',')]
        x: Vec<f64>,
        #[arg(long)]
        nx: Option<usize>,
        #[arg(long)]
        nt: Option<usize>,
        #[arg(long)]
        x_max: Option<f64>,
        #[arg(long)]
        tol: Option<f64>,
    },
    /// Replay a run document or the document embedded in an earlier output.
    Run {
        #[arg(long)]
        spec: PathBuf,
    },
}

fn scan(text: &Option<String>, spacing: Spacing) -> Result<Option<ScanSpec>, CliError> {
    text.as_deref().map(|s| ScanSpec::parse(s, spacing)).transpose()
}

impl Sub {
    fn into_doc(self) -> Result<ProblemSpecDocument, CliError> {
        use ProblemKind::*;
        Ok(match self {
            Sub::SolveHalfline { u0, g, horizon, x, t } => {
                let mut d = ProblemSpecDocument::new(Command::SolveHalfline, HalfLine, horizon);
                d.u0 = Some(parse_profile(&u0)?);
                d.g = Some(parse_signal(&g)?);
                d.query.x = x;
                d.query.t = t;
                d
            }
            Sub::SolveInterval { u0, h, horizon, length, x, t } => {
                let mut d = ProblemSpecDocument::new(Command::SolveInterval, Interval, horizon);
                d.length = Some(length);
                d.u0 = Some(parse_profile(&u0)?);
                d.h = Some(parse_signal(&h)?);
                d.query.x = x;
                d.query.t = t;
                d
            }
            Sub::CheckGr { manufactured, lambda, lambda_prime, t, horizon } => {
                let m = parse_manufactured(&manufactured)?;
                let problem = if matches!(m, Manufactured::Exp { .. }) { HalfLine } else { HalfSpace2d };
                let mut d = ProblemSpecDocument::new(Command::CheckGr, problem, horizon);
                d.query.manufactured = Some(m);
                d.query.lambda = lambda.iter().map(|l| parse_complex(l)).collect::<Result<_, _>>()?;
                d.query.lambda_prime = lambda_prime;
                d.query.t = t;
                d
            }
            Sub::Certify { u0, scan: s } => {
                let mut d = ProblemSpecDocument::new(Command::Certify, HalfLine, 1.0);
                d.u0 = Some(parse_profile(&u0)?);
                d.query.scan = scan(&s, Spacing::Log)?;
                d
            }
            Sub::GrowthTest { g, horizon, k_grid, bound } => {
                let mut d = ProblemSpecDocument::new(Command::GrowthTest, HalfLine, horizon);
                d.g = Some(parse_signal(&g)?);
                d.query.k_grid = scan(&k_grid, Spacing::Linear)?;
                d.query.bound = bound;
                d
            }
            Sub::Synthesize { u0, horizon, length, k, basis, collocation, reg } => {
                let mut d = ProblemSpecDocument::new(Command::Synthesize, Interval, horizon);
                d.length = Some(length);
                d.u0 = Some(parse_profile(&u0)?);
                d.query.k = k;
                d.query.basis = basis;
                d.query.collocation_points = collocation;
                d.query.regularization = reg.get();
                d
            }
            Sub::AttemptHalfline { u0, horizon, k, reg } => {
                let mut d = ProblemSpecDocument::new(Command::AttemptHalfline, HalfLine, horizon);
                d.u0 = Some(parse_profile(&u0)?);
                d.query.k = k;
                d.query.regularization = reg.get();
                d
            }
            Sub::Dichotomy { u0, horizon, interval_u0, interval_horizon, length, k, reg } => {
                let mut d = ProblemSpecDocument::new(Command::Dichotomy, HalfLine, horizon);
                d.u0 = Some(parse_profile(&u0)?);
                d.query.interval = Some(IntervalArm { u0: parse_profile(&interval_u0)?, horizon: interval_horizon, length });
                d.query.k = k;
                d.query.regularization = reg.get();
                d
            }
            Sub::HalfspaceCertify { u0, tangential, lambda_prime, scan: s, g, evolving, k_grid, horizon } => {
                let mut d = ProblemSpecDocument::new(Command::HalfspaceCertify, HalfSpace2d, horizon);
                d.u0 = Some(parse_profile(&u0)?);
                d.query.tangential = tangential.as_deref().map(parse_tangential).transpose()?;
                d.query.lambda_prime = lambda_prime;
                d.query.scan = scan(&s, Spacing::Log)?;
                if let Some(g) = g {
                    d.g = Some(parse_signal(&g)?);
                    d.query.evolving = Some(evolving);
                    d.query.k_grid = scan(&k_grid, Spacing::Linear)?;
                }
                d
            }
            Sub::OracleCompare { problem, u0, boundary, horizon, length, x, nx, nt, x_max, tol } => {
                let mut d = ProblemSpecDocument::new(Command::OracleCompare, problem, horizon);
                d.length = length;
                d.u0 = Some(parse_profile(&u0)?);
                let b = Some(parse_signal(&boundary)?);
                if problem == Interval {
                    d.length.get_or_insert(1.0);
                    d.h = b;
                } else {
                    d.g = b;
                }
                d.query.x = x;
                d.query.nx = nx;
                d.query.nt = nt;
                d.query.x_max = x_max;
                d.query.tol = tol;
                d
            }
            Sub::Run { .. } => unreachable!("handled by the caller"),
        })
    }
}

fn configure_jobs(jobs: Option<usize>) -> Result<(), CliError> {
    if let Some(n) = jobs {
        if n == 0 {
            return Err(CliError::validation("Argument", "--jobs must be at least 1"));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::validation("Argument", e.to_string()))?;
    }
    Ok(())
}

fn execute(cli: Cli) -> Result<ExitCode, CliError> {
    configure_jobs(cli.jobs)?;
    let mut doc = match cli.command {
        Sub::Run { spec } => output::load_document(&spec)?,
        other => other.into_doc()?,
    };
    if let Some(theta) = cli.theta {
        doc.contour.theta = theta;
    }
    if let Some(l) = cli.lambda_max {
        doc.contour.lambda_max = Some(l);
    }
    if let Some(p) = cli.panels {
        doc.contour.panels = Some(p);
    }
    if let Some(r) = cli.indent {
        doc.contour.indent = Some(r);
    }
    if let Some(out) = cli.out {
        doc.output.path = Some(out.to_string_lossy().into_owned());
    }
    if let Some(f) = cli.format {
        doc.output.format = f;
    }
    doc.fill_defaults()?;
    let report = run::execute(&doc)?;
    output::emit(&doc, &report)?;
    if let Some(failure) = report.failure {
        eprintln!("{}", failure.to_json());
        return Ok(ExitCode::from(failure.exit_code()));
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = e.print();
                return ExitCode::SUCCESS;
            }
            let err = CliError::validation("Usage", e.to_string().trim_end());
            eprintln!("{}", err.to_json());
            return ExitCode::from(err.exit_code());
        }
    };
    match execute(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("{}", e.to_json());
            ExitCode::from(e.exit_code())
        }
    }
}
