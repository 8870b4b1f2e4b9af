//! `bhmm`: command-line access to the forward maps, coordinate changes,
//! recovery, membership testing, invariants and multi-symbol identification.
//!
//! Exit codes: 0 success, 1 domain error (or a rejected membership test),
//! 64 usage error, 65 malformed input. `membership` reports malformed input
//! with exit code 2.

use std::fs;
use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use bhmm::invariants::{self, InvariantSet};
use bhmm::json::{self, AnyParams};
use bhmm::recover::{self, Stratum};
use bhmm::{membership, multistate, CoordSystem, Distribution, Error, Rational, Scalar, Tolerance};
use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

const EXIT_DOMAIN: u8 = 1;
const EXIT_MEMBERSHIP_INPUT: u8 = 2;
const EXIT_USAGE: u8 = 64;
const EXIT_DATA: u8 = 65;

#[derive(Parser, Debug)]
#[command(name = "bhmm", version, about = "Algebraic tools for two-state binary hidden Markov models")]
struct Cli {
    #[command(flatten)]
    global: GlobalArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
struct GlobalArgs {
    /// Exact rational arithmetic (default).
    #[arg(long, global = true, conflicts_with = "float")]
    exact: bool,
    /// Double-precision arithmetic with tolerances.
    #[arg(long, global = true)]
    float: bool,
    /// Relative tolerance for float equality tests.
    #[arg(long, global = true, value_name = "TOL")]
    tol: Option<f64>,
    /// Relative threshold for float recovery denominators.
    #[arg(long, global = true, value_name = "TOL")]
    guard_tol: Option<f64>,
    /// JSON file with "mode", "tol_equality", "tol_guard" and "seed".
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Distribution of a parameter point on n nodes.
    Forward {
        /// Parameters: {"pi","T","E"}, {"a0","b","c0","u","v0"} or {"a","b","c","u","v"}.
        #[arg(long, value_name = "FILE")]
        params: PathBuf,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value = "probability")]
        system: String,
        /// Evaluate by enumerating hidden paths instead of matrix products.
        #[arg(long)]
        bruteforce: bool,
    },
    /// Draw observed strings from a stochastic parameter point.
    Sample {
        #[arg(long, value_name = "FILE")]
        params: PathBuf,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 1)]
        count: usize,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Change coordinates between probability, moment and cumulant.
    Convert {
        #[arg(long, value_name = "FILE")]
        dist: PathBuf,
        /// Source system; must agree with the file's "system" if both are given.
        #[arg(long)]
        from: Option<String>,
        #[arg(long)]
        to: String,
    },
    /// Recover parameters from a distribution on n ≥ 3 nodes.
    Recover {
        #[arg(long, value_name = "FILE")]
        dist: PathBuf,
        #[arg(long, default_value = "auto")]
        stratum: String,
    },
    /// Decide membership in the model, with a certificate.
    Membership {
        #[arg(long, value_name = "FILE")]
        dist: PathBuf,
        /// Also report the real fiber without requiring stochasticity.
        #[arg(long)]
        relaxed: bool,
    },
    /// Evaluate polynomial invariants.
    Invariants {
        #[arg(long, value_name = "FILE")]
        dist: PathBuf,
        #[arg(long, default_value = "all")]
        set: String,
        /// "all" or a comma-separated list of window offsets.
        #[arg(long, default_value = "all")]
        windows: String,
    },
    /// Identify a process with k visible symbols.
    Identify {
        #[arg(long, value_name = "FILE")]
        dist: PathBuf,
        #[arg(long)]
        k: Option<usize>,
    },
    /// All parameter points mapping to a distribution.
    Fiber {
        #[arg(long, value_name = "FILE")]
        dist: PathBuf,
        /// Drop the stochasticity requirement.
        #[arg(long)]
        relaxed: bool,
    },
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct Config {
    exact: bool,
    tol: Tolerance,
    seed: Option<u64>,
}

/// An error with the exit code it maps to.
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Self { code: EXIT_USAGE, message: message.into() }
    }

    fn data(message: impl Into<String>) -> Self {
        Self { code: EXIT_DATA, message: message.into() }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::MalformedParameters(_)
            | Error::MalformedDistribution(_)
            | Error::WrongSystem { .. }
            | Error::OutOfRange(_)
            | Error::Parse(_) => EXIT_DATA,
            Error::Config(_) => EXIT_USAGE,
            _ => EXIT_DOMAIN,
        };
        Self { code, message: e.to_string() }
    }
}

fn read_input(path: &Path) -> Result<Value, Failure> {
    let text = if path == Path::new("-") {
        let mut s = String::new();
        io::stdin().read_to_string(&mut s).map_err(|e| Failure::data(format!("reading stdin: {e}")))?;
        s
    } else {
        fs::read_to_string(path).map_err(|e| Failure::data(format!("reading {}: {e}", path.display())))?
    };
    serde_json::from_str(&text).map_err(|e| Failure::data(format!("{}: invalid JSON: {e}", path.display())))
}

fn load_config(args: &GlobalArgs) -> Result<Config, Failure> {
    let mut exact = true;
    let mut equality = Tolerance::default().equality;
    let mut guard = Tolerance::default().guard;
    let mut seed = None;
    if let Some(path) = &args.config {
        let v = read_input(path)?;
        let bad = |what: &str| Failure::usage(format!("config: {what}"));
        if let Some(m) = v.get("mode") {
            exact = match m.as_str() {
                Some("exact") => true,
                Some("float") => false,
                _ => return Err(bad("\"mode\" must be \"exact\" or \"float\"")),
            };
        }
        if let Some(t) = v.get("tol_equality") {
            equality = t.as_f64().ok_or_else(|| bad("\"tol_equality\" must be a number"))?;
        }
        if let Some(t) = v.get("tol_guard") {
            guard = t.as_f64().ok_or_else(|| bad("\"tol_guard\" must be a number"))?;
        }
        if let Some(s) = v.get("seed") {
            seed = Some(s.as_u64().ok_or_else(|| bad("\"seed\" must be a non-negative integer"))?);
        }
    }
    if args.float {
        exact = false;
    }
    if args.exact {
        exact = true;
    }
    equality = args.tol.unwrap_or(equality);
    guard = args.guard_tol.unwrap_or(guard);
    Ok(Config { exact, tol: Tolerance::new(equality, guard)?, seed })
}

fn parse_system(s: &str) -> Result<CoordSystem, Failure> {
    CoordSystem::parse(s).map_err(|e| Failure::usage(e.to_string()))
}

fn load_dist<S: Scalar>(path: &Path, tol: &Tolerance) -> Result<Distribution<S>, Failure> {
    let d: Distribution<S> = json::distribution_from_json(&read_input(path)?)?;
    if d.system() == CoordSystem::Probability {
        return Ok(d);
    }
    Ok(d.convert(CoordSystem::Probability, tol)?)
}

/// Output document and exit code of one command.
type Outcome = Result<(Value, u8), Failure>;

fn run<S: Scalar>(command: &Command, cfg: &Config) -> Outcome {
    let tol = &cfg.tol;
    match command {
        Command::Forward { params, n, system, bruteforce } => {
            let system = parse_system(system)?;
            let params: AnyParams<S> = json::any_params_from_json(&read_input(params)?, tol)?;
            let d = match params {
                AnyParams::Stochastic(theta) if *bruteforce => bhmm::phi_bruteforce(&theta, *n)?.convert(system, tol)?,
                AnyParams::Stochastic(theta) => bhmm::phi_baum(&theta, *n, system)?,
                AnyParams::Linear(lin) => bhmm::phi_baum(&lin.to_stochastic(), *n, system)?,
                AnyParams::Birational(eta) => bhmm::psi_n(&eta, *n)?.convert(system, tol)?,
            };
            Ok((json::distribution_to_json(&d), 0))
        }
        Command::Sample { params, n, count, seed } => {
            let theta = json::params_from_json::<S>(&read_input(params)?, tol)?;
            let seed = seed.or(cfg.seed).unwrap_or(0);
            let samples = bhmm::sample_sequences(&theta, *n, *count, seed)?;
            Ok((json!({"n": n, "seed": seed, "samples": samples}), 0))
        }
        Command::Convert { dist, from, to } => {
            let v = read_input(dist)?;
            let mut v = v;
            if let Some(from) = from {
                let from = parse_system(from)?;
                match v.get("system").and_then(Value::as_str) {
                    Some(found) if CoordSystem::parse(found)? != from => {
                        return Err(Failure::data(format!("--from {from} but the file holds {found} coordinates")))
                    }
                    Some(_) => {}
                    None => {
                        v["system"] = Value::String(from.name().into());
                    }
                }
            }
            let d: Distribution<S> = json::distribution_from_json(&v)?;
            let out = d.convert(parse_system(to)?, tol)?;
            Ok((json::distribution_to_json(&out), 0))
        }
        Command::Recover { dist, stratum } => {
            let m = json::distribution_from_json::<S>(&read_input(dist)?)?.convert(CoordSystem::Moment, tol)?;
            let outcome = match stratum.as_str() {
                "auto" => recover::classify(&m, tol)?,
                name => {
                    let stratum = Stratum::parse(name).map_err(|e| Failure::usage(e.to_string()))?;
                    recover::recover_stratum(&m, stratum, tol)?
                }
            };
            let code = if outcome.params.is_some() { 0 } else { EXIT_DOMAIN };
            Ok((json::outcome_to_json(&outcome), code))
        }
        Command::Membership { dist, relaxed } => {
            let input = |f: Failure| if f.code == EXIT_DATA { Failure { code: EXIT_MEMBERSHIP_INPUT, ..f } } else { f };
            let p = load_dist::<S>(dist, tol).map_err(input)?;
            let cert = membership::membership_test(&p, tol).map_err(|e| input(e.into()))?;
            let mut out = json::certificate_to_json(&cert);
            if *relaxed {
                out["fiber"] = match membership::fiber(&p, tol, true) {
                    Ok(points) => Value::Array(points.iter().map(json::params_to_json).collect()),
                    Err(e) => json!({"error": e.to_string()}),
                };
            }
            Ok((out, if cert.accepted() { 0 } else { EXIT_DOMAIN }))
        }
        Command::Invariants { dist, set, windows } => {
            let d = json::distribution_from_json::<S>(&read_input(dist)?)?;
            let set = InvariantSet::parse(set).map_err(|e| Failure::usage(e.to_string()))?;
            let offsets: Option<Vec<usize>> = match windows.as_str() {
                "all" => None,
                list => Some(
                    list.split(',')
                        .map(|s| s.trim().parse().map_err(|_| Failure::usage(format!("bad window offset {s:?}"))))
                        .collect::<Result<_, _>>()?,
                ),
            };
            let report = invariants::evaluate(&d, set, offsets.as_deref(), tol)?;
            Ok((json::report_to_json(&report), 0))
        }
        Command::Identify { dist, k } => {
            let d = json::multistate_distribution_from_json::<S>(&read_input(dist)?, *k)?;
            let id = multistate::identify(&d, tol)?;
            Ok((json::identification_to_json(&id), 0))
        }
        Command::Fiber { dist, relaxed } => {
            let p = load_dist::<S>(dist, tol)?;
            let points = membership::fiber(&p, tol, *relaxed)?;
            Ok((json!({"points": points.iter().map(json::params_to_json).collect::<Vec<_>>()}), 0))
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(EXIT_USAGE),
            };
        }
    };
    let result = load_config(&cli.global).and_then(|cfg| {
        if cfg.exact {
            run::<Rational>(&cli.command, &cfg)
        } else {
            run::<f64>(&cli.command, &cfg)
        }
    });
    match result {
        Ok((doc, code)) => {
            let mut stdout = io::stdout().lock();
            let text = serde_json::to_string_pretty(&doc).expect("JSON values serialize");
            if writeln!(stdout, "{text}").is_err() {
                return ExitCode::from(EXIT_DOMAIN);
            }
            ExitCode::from(code)
        }
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
