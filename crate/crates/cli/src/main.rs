//! `padic-zeta`: compute the p-adic Hurwitz-type Euler zeta function and
//! check the identities it satisfies.
//!
//! Exit codes: 0 success, 1 verification shortfall, 2 bad input or domain
//! error, 3 convergence cap reached.

mod config;
mod render;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use config::{load_config, OutputFormat, Overrides, RunConfig};
use padic_zeta::operator::{taylor_shift_check, verify_ode, TAYLOR_TARGET_DIGITS};
use padic_zeta::padic::parse_rational;
use padic_zeta::zeta::{euler_polynomial, interpolation_check, zeta_pe};
use padic_zeta::{ExactRational, PadicContext, QpValue};

#[derive(Parser)]
#[command(name = "padic-zeta", version)]
#[command(about = "p-adic Hurwitz-type Euler zeta values and the operator identity they satisfy")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    #[command(flatten)]
    run: RunArgs,

    /// More log output on stderr (repeatable).
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    verbose: u8,
}

#[derive(Args)]
struct RunArgs {
    /// Odd prime p.
    #[arg(short = 'p', long = "prime", global = true, env = "PADIC_PRIME")]
    prime: Option<u64>,

    /// Relative p-adic digits N.
    #[arg(long, global = true, env = "PADIC_PRECISION")]
    precision: Option<u32>,

    /// Largest level r of the partial sums over p^r points.
    #[arg(long = "rmax", global = true, env = "PADIC_RMAX")]
    r_max: Option<u32>,

    /// Cap on the number of series terms.
    #[arg(long, global = true, env = "PADIC_TERM_CAP")]
    term_cap: Option<usize>,

    /// JSON on stdout.
    #[arg(long, global = true)]
    json: bool,

    /// key = value file with prime, precision, r_max, term_cap, output_format.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// zeta_{p,E}(s, a) from the fermionic integral.
    Zeta {
        #[arg(short, allow_hyphen_values = true, value_parser = rational)]
        a: ExactRational,
        #[arg(short, allow_hyphen_values = true, value_parser = rational)]
        s: ExactRational,
    },
    /// Both sides of T_p^a[zeta(s,a) - <a>^(1-s)] = (<a-1>^(1-s) - <a>^(1-s))/(s-1).
    VerifyOde {
        #[arg(short, allow_hyphen_values = true, value_parser = rational)]
        a: ExactRational,
        #[arg(short, allow_hyphen_values = true, value_parser = rational)]
        s: ExactRational,
        /// Digits of agreement required for exit code 0.
        #[arg(long, default_value_t = 10)]
        digits: i64,
    },
    /// zeta_{p,E}(1-m, a) against E_m(a) / omega_v(a)^m.
    Interpolate {
        #[arg(short, allow_hyphen_values = true, value_parser = rational)]
        a: ExactRational,
        #[arg(short)]
        m: u32,
        #[arg(long, default_value_t = 10)]
        digits: i64,
    },
    /// Exact coefficients of the Euler polynomial E_m.
    Euler {
        #[arg(short)]
        m: usize,
    },
    /// Partial sums of the Taylor series of exp_p(nD)[zeta(s,a) - <a>^(1-s)].
    Taylor {
        #[arg(short, allow_hyphen_values = true, value_parser = rational)]
        a: ExactRational,
        #[arg(short, allow_hyphen_values = true, value_parser = rational)]
        s: ExactRational,
        #[arg(short, default_value_t = 2)]
        n: u32,
        #[arg(short = 'K', default_value_t = 40)]
        max_k: u32,
    },
}

fn rational(text: &str) -> Result<ExactRational, String> {
    parse_rational(text).map_err(|e| e.to_string())
}

enum Failure {
    Input(String),
    Engine(padic_zeta::Error),
}

impl From<padic_zeta::Error> for Failure {
    fn from(e: padic_zeta::Error) -> Self {
        Failure::Engine(e)
    }
}

struct Outcome {
    json: Value,
    text: String,
    exit: u8,
}

fn envelope(command: &str, ctx: Option<&PadicContext>, inputs: Value) -> Value {
    json!({
        "command": command,
        "prime": ctx.map(|c| c.p()),
        "precision": ctx.map(|c| c.precision()),
        "inputs": inputs,
    })
}

fn merge(mut base: Value, extra: Value) -> Value {
    if let (Some(b), Value::Object(e)) = (base.as_object_mut(), extra) {
        b.extend(e);
    }
    base
}

fn run_command(command: &Command, cfg: &RunConfig) -> Result<Outcome, Failure> {
    let context = || cfg.context().map_err(Failure::Input);
    match command {
        Command::Zeta { a, s } => {
            let ctx = context()?;
            let z = zeta_pe(&s.clone().into(), &a.clone().into(), &ctx)?;
            let converged = z.integral_diag.converged;
            let json = merge(
                envelope("zeta", Some(&ctx), json!({"a": a.to_string(), "s": s.to_string()})),
                json!({
                    "value": render::padic(&z.value),
                    "agree_digits": null,
                    "diagnostics": {"integral": render::integral(&z.integral_diag)},
                }),
            );
            let text = format!(
                "zeta_{{{},E}}({s}, {a}) = {}\n{}\n",
                ctx.p(),
                render::padic_text(&z.value),
                render::integral_text(&z.integral_diag)
            );
            Ok(Outcome {
                json,
                text,
                exit: if converged { 0 } else { 3 },
            })
        }
        Command::VerifyOde { a, s, digits } => {
            let ctx = context()?;
            let check = verify_ode(&s.clone().into(), &a.clone().into(), &ctx)?;
            let exit = if !check.report.converged() {
                3
            } else if check.agree_digits < *digits {
                1
            } else {
                0
            };
            let json = merge(
                envelope(
                    "verify-ode",
                    Some(&ctx),
                    json!({"a": a.to_string(), "s": s.to_string(), "digits": digits}),
                ),
                json!({
                    "lhs": render::padic(&check.lhs),
                    "rhs": render::padic(&check.rhs),
                    "agree_digits": check.agree_digits,
                    "terms": render::terms(&check.report),
                    "diagnostics": {"series": render::convergence(&check.report)},
                }),
            );
            let text = format!(
                "lhs = {}\nrhs = {}\nagreement: {} digits (required {digits})\n{}",
                render::padic_text(&check.lhs),
                render::padic_text(&check.rhs),
                check.agree_digits,
                render::convergence_text(&check.report)
            );
            Ok(Outcome { json, text, exit })
        }
        Command::Interpolate { a, m, digits } => {
            let ctx = context()?;
            let check = interpolation_check(*m, a, &ctx)?;
            let converged = check.lhs.integral_diag.converged;
            let exit = if !converged {
                3
            } else if check.agree_digits < *digits {
                1
            } else {
                0
            };
            let json = merge(
                envelope(
                    "interpolate",
                    Some(&ctx),
                    json!({"a": a.to_string(), "m": m, "digits": digits}),
                ),
                json!({
                    "lhs": render::padic(&check.lhs.value),
                    "rhs": render::padic(&check.rhs),
                    "agree_digits": check.agree_digits,
                    "diagnostics": {
                        "euler_polynomial": euler_polynomial(*m as usize).to_string(),
                        "integral": render::integral(&check.lhs.integral_diag),
                    },
                }),
            );
            let text = format!(
                "zeta(1-{m}, {a}) = {}\nE_{m}(a)/omega_v(a)^{m} = {}\nagreement: {} digits (required {digits})\n{}\n",
                render::padic_text(&check.lhs.value),
                render::padic_text(&check.rhs),
                check.agree_digits,
                render::integral_text(&check.lhs.integral_diag)
            );
            Ok(Outcome { json, text, exit })
        }
        Command::Euler { m } => {
            let e = euler_polynomial(*m);
            let coeffs: Vec<String> = e.coeffs().iter().map(|c| c.to_string()).collect();
            let json = merge(
                envelope("euler", None, json!({"m": m})),
                json!({
                    "value": e.to_string(),
                    "agree_digits": null,
                    "diagnostics": {"coefficients": coeffs},
                }),
            );
            Ok(Outcome {
                json,
                text: format!("E_{m}(x) = {e}\n"),
                exit: 0,
            })
        }
        Command::Taylor { a, s, n, max_k } => {
            let ctx = context()?;
            let check = taylor_shift_check(&s.clone().into(), &QpValue::from(a.clone()), *n, *max_k, &ctx)?;
            let last = check.steps.last().map(|s| s.error_valuation);
            let json = merge(
                envelope(
                    "taylor",
                    Some(&ctx),
                    json!({"a": a.to_string(), "s": s.to_string(), "n": n, "K": max_k}),
                ),
                json!({
                    "lhs": check.partial_sums.last().map(render::padic),
                    "rhs": render::padic(&check.target),
                    "agree_digits": last,
                    "diagnostics": render::taylor(&check),
                }),
            );
            let text = format!(
                "{}target zeta(s+n, a) - <a>^(1-s-n) = {}\nerror <= p^-{TAYLOR_TARGET_DIGITS} first at k = {}\n",
                render::taylor_text(&check),
                render::padic_text(&check.target),
                check.reached_at.map_or("never".into(), |k| k.to_string())
            );
            Ok(Outcome {
                json,
                text,
                exit: if check.reached_at.is_some() { 0 } else { 3 },
            })
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level))
        .target(env_logger::Target::Stderr)
        .init();

    let file = match &cli.run.config {
        Some(path) => match load_config(path) {
            Ok(o) => o,
            Err(e) => {
                eprintln!("error: {e}");
                return ExitCode::from(2);
            }
        },
        None => Overrides::default(),
    };
    let flags = Overrides {
        prime: cli.run.prime,
        precision: cli.run.precision,
        r_max: cli.run.r_max,
        term_cap: cli.run.term_cap,
        output: cli.run.json.then_some(OutputFormat::Json),
    };
    let cfg = RunConfig::resolve(file, flags);
    log::info!("configuration: {cfg:?}");

    match run_command(&cli.command, &cfg) {
        Ok(outcome) => {
            let body = match cfg.output {
                OutputFormat::Json => {
                    serde_json::to_string_pretty(&outcome.json).expect("serializable") + "\n"
                }
                OutputFormat::Text => outcome.text,
            };
            // A closed pipe (e.g. `| head`) is not an error worth reporting.
            let _ = std::io::stdout().lock().write_all(body.as_bytes());
            ExitCode::from(outcome.exit)
        }
        Err(Failure::Input(message)) => {
            eprintln!("error: {message}");
            ExitCode::from(2)
        }
        Err(Failure::Engine(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
