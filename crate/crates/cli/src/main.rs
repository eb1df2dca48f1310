use std::path::Path;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use fliess_core::composition::{comp_inverse, compose, feedback, group_product, mod_compose, GroupElement};
use fliess_core::eval::{
    ct_bilinear_simulate, ct_fliess_trajectory, dt_fliess_eval, dt_state_affine_simulate, CTSignal, DTSignal,
};
use fliess_core::feedback_hopf::{hopf, AntipodeAlgorithm, CoordinateFunction};
use fliess_core::io::{
    ct_signal_from_csv, dt_signal_from_csv, read_series, rep_from_json, rep_to_json, series_to_json,
    trajectory_to_csv,
};
use fliess_core::quasishuffle::qsh_series;
use fliess_core::rational::{rep_qshuffle, rep_shuffle, state_affine_realize, LinearRepresentation, DEFAULT_DIMENSION_CAP};
use fliess_core::shuffle::shuffle_series;
use fliess_core::verify::{run_all_criteria, run_suite, DegreeCaps, Settings, SUITES};
use fliess_core::{Error, Rational, Series, Word};

#[derive(Parser)]
#[command(name = "fliess", version, about = "Chen-Fliess series algebra and evaluation")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Global {
    /// Maximum word length kept in results
    #[arg(long, global = true, default_value_t = 4)]
    degree: usize,
    /// Number of inputs
    #[arg(long, global = true, default_value_t = 2)]
    m: u32,
    /// Quasi-shuffle sign, +1 or -1
    #[arg(long, global = true, default_value = "1", allow_hyphen_values = true)]
    theta: String,
    #[arg(long, global = true, default_value_t = 1e-5)]
    tolerance: f64,
    #[arg(long, global = true, default_value_t = fliess_core::testing::DEFAULT_SEED)]
    seed: u64,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
    Csv,
}

#[derive(Subcommand)]
enum Command {
    /// Shuffle product of two series
    Shuffle { a: String, b: String },
    /// Quasi-shuffle product of two series
    Qshuffle { a: String, b: String },
    /// Composition product c o d
    Compose { c: String, d: String },
    /// Modified composition product
    Modcompose { c: String, d: String },
    /// Product in the output feedback group
    Groupmul { c: String, d: String },
    /// Inverse in the output feedback group
    Invert { c: String },
    /// Feedback product of c with d in the loop
    Feedback { c: String, d: String },
    /// Antipode of a coordinate function
    Antipode {
        #[arg(long)]
        word: String,
        #[arg(long, default_value_t = 1)]
        out_index: u32,
        #[arg(long, default_value = "cfree")]
        algo: String,
    },
    /// Coproduct of a coordinate function
    Coproduct {
        #[arg(long)]
        word: String,
        #[arg(long, default_value_t = 1)]
        out_index: u32,
    },
    /// Linear representations of rational series
    #[command(subcommand)]
    Rep(RepCommand),
    /// Evaluate a series on a continuous-time input
    EvalCt {
        series: String,
        signal: String,
        /// Words longer than this are dropped; defaults to --degree
        #[arg(long)]
        max_len: Option<usize>,
    },
    /// Evaluate a series on a discrete-time input, exactly
    EvalDt {
        series: String,
        signal: String,
        /// Horizon; defaults to the signal length
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        max_len: Option<usize>,
    },
    /// Simulate the realization of a representation
    Simulate {
        rep: String,
        signal: String,
        #[arg(long, value_enum, default_value_t = Time::Dt)]
        time: Time,
    },
    /// Run a verification suite
    Verify { suite: String },
    /// Run every acceptance criterion
    Selftest,
}

#[derive(Subcommand)]
enum RepCommand {
    /// Coefficient of a word
    Coeff {
        rep: String,
        #[arg(long)]
        word: String,
    },
    Shuffle { a: String, b: String },
    Qshuffle { a: String, b: String },
    /// State-affine realization
    Realize { rep: String },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Time {
    Ct,
    Dt,
}

/// Anything that should exit with the usage code.
#[derive(Debug)]
struct Usage(String);

impl std::fmt::Display for Usage {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for Usage {}

enum Outcome {
    Ok,
    Failed,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(Outcome::Ok) => ExitCode::SUCCESS,
        Ok(Outcome::Failed) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            let usage = e.downcast_ref::<Usage>().is_some()
                || matches!(e.downcast_ref::<Error>(), Some(Error::Parse(_)));
            ExitCode::from(if usage { 2 } else { 1 })
        }
    }
}

/// A path to a file, or else the series literal itself.
fn load_text(arg: &str) -> Result<String> {
    if Path::new(arg).is_file() {
        std::fs::read_to_string(arg).with_context(|| format!("reading {arg}"))
    } else {
        Ok(arg.to_string())
    }
}

fn load_file(arg: &str) -> Result<String> {
    std::fs::read_to_string(arg).map_err(|e| Usage(format!("cannot read {arg}: {e}")).into())
}

fn series(arg: &str) -> Result<Series<Rational>> {
    Ok(read_series(&load_text(arg)?)?)
}

fn rep(arg: &str) -> Result<LinearRepresentation<Rational>> {
    Ok(rep_from_json(&load_file(arg)?)?)
}

fn theta(g: &Global) -> Result<Rational> {
    match g.theta.trim_start_matches('+') {
        "1" => Ok(Rational::from_integer(1.into())),
        "-1" => Ok(Rational::from_integer((-1).into())),
        other => Err(Usage(format!("--theta must be +1 or -1, got {other}")).into()),
    }
}

fn caps(g: &Global) -> Result<DegreeCaps> {
    let caps = DegreeCaps::from_env()?;
    caps.check_word_len(g.degree)?;
    Ok(caps)
}

fn print_series(s: &Series<Rational>, format: Format) {
    match format {
        Format::Text => println!("{s}"),
        Format::Json => println!("{}", pretty(&series_to_json(s))),
        Format::Csv => {
            let header: Vec<String> = (1..=s.ell()).map(|i| format!("c{i}")).collect();
            println!("word,{}", header.join(","));
            for (w, v) in s.terms() {
                let cells: Vec<String> = v.iter().map(|c| c.to_string()).collect();
                println!("{},{}", w, cells.join(","));
            }
        }
    }
}

fn pretty(v: &Value) -> String {
    serde_json::to_string_pretty(v).expect("serializable")
}

fn print_trajectory<C: std::fmt::Display>(y: &[Vec<C>], format: Format, extra: Value) {
    match format {
        Format::Csv => print!("{}", trajectory_to_csv(y)),
        Format::Json => {
            let rows: Vec<Vec<String>> = y.iter().map(|r| r.iter().map(|c| c.to_string()).collect()).collect();
            let mut doc = json!({"final": rows.last(), "trajectory": rows});
            if let (Value::Object(d), Value::Object(e)) = (&mut doc, extra) {
                d.extend(e);
            }
            println!("{}", pretty(&doc));
        }
        Format::Text => {
            let last = y.last().map(|r| r.iter().map(|c| c.to_string()).collect::<Vec<_>>().join(" "));
            println!("{}", last.unwrap_or_default());
        }
    }
}

fn coordinate(word: &str, out_index: u32) -> Result<CoordinateFunction> {
    let w: Word = if word.trim().is_empty() { Word::empty() } else { word.parse()? };
    Ok(CoordinateFunction::new(out_index, w))
}

fn run(cli: Cli) -> Result<Outcome> {
    let g = &cli.global;
    let d = g.degree;
    match &cli.command {
        Command::Shuffle { a, b } => {
            caps(g)?;
            print_series(&shuffle_series(&series(a)?, &series(b)?, d)?, g.format);
        }
        Command::Qshuffle { a, b } => {
            caps(g)?;
            print_series(&qsh_series(&series(a)?, &series(b)?, &theta(g)?, d)?, g.format);
        }
        Command::Compose { c, d: e } => {
            caps(g)?;
            print_series(&compose(&series(c)?, &series(e)?, d)?, g.format);
        }
        Command::Modcompose { c, d: e } => {
            caps(g)?;
            print_series(&mod_compose(&series(c)?, &series(e)?, d)?, g.format);
        }
        Command::Groupmul { c, d: e } => {
            caps(g)?;
            let p = group_product(&GroupElement::new(series(c)?), &GroupElement::new(series(e)?), d)?;
            print_series(&p.body, g.format);
        }
        Command::Invert { c } => {
            caps(g)?;
            print_series(&comp_inverse(&series(c)?, d)?, g.format);
        }
        Command::Feedback { c, d: e } => {
            caps(g)?;
            print_series(&feedback(&series(c)?, &series(e)?, d)?, g.format);
        }
        Command::Antipode { word, out_index, algo } => {
            let a = coordinate(word, *out_index)?;
            let algo: AntipodeAlgorithm = algo.parse()?;
            DegreeCaps::from_env()?.check_hopf_norm(a.degree() - 1)?;
            let s = hopf(g.m).antipode(algo, &a)?;
            match g.format {
                Format::Json => println!("{}", pretty(&s.to_json())),
                _ => println!("{s}"),
            }
        }
        Command::Coproduct { word, out_index } => {
            let a = coordinate(word, *out_index)?;
            DegreeCaps::from_env()?.check_hopf_norm(a.degree() - 1)?;
            let delta = hopf(g.m).coproduct(&a)?;
            match g.format {
                Format::Json => {
                    let terms: Vec<Value> = delta
                        .terms()
                        .map(|((l, r), c)| json!({"left": l.to_string(), "right": r.to_string(), "coeff": c.to_string()}))
                        .collect();
                    println!("{}", pretty(&json!({"generator": a.to_string(), "terms": terms})));
                }
                _ => println!("{delta}"),
            }
        }
        Command::Rep(cmd) => run_rep(g, cmd)?,
        Command::EvalCt { series: s, signal, max_len } => {
            let c = series(s)?;
            let u: CTSignal = ct_signal_from_csv(&load_file(signal)?)?;
            let y = ct_fliess_trajectory(&c, &u, max_len.unwrap_or(d))?;
            print_trajectory(&y, g.format, json!({"t": u.time(u.len() - 1)}));
        }
        Command::EvalDt { series: s, signal, n, max_len } => {
            let c = series(s)?;
            let u: DTSignal<Rational> = dt_signal_from_csv(&load_file(signal)?)?;
            let horizon = n.unwrap_or(u.horizon());
            let len = max_len.unwrap_or(d);
            let y = (0..=horizon).map(|k| dt_fliess_eval(&c, &u, k, len)).collect::<fliess_core::Result<Vec<_>>>()?;
            print_trajectory(&y, g.format, json!({"n": horizon}));
        }
        Command::Simulate { rep: r, signal, time } => {
            let r = rep(r)?;
            match time {
                Time::Ct => {
                    let u = ct_signal_from_csv(&load_file(signal)?)?;
                    let y = ct_bilinear_simulate(&r.to_f64(), &u)?;
                    print_trajectory(&y, g.format, json!({"t": u.time(u.len() - 1)}));
                }
                Time::Dt => {
                    let u: DTSignal<Rational> = dt_signal_from_csv(&load_file(signal)?)?;
                    let sys = state_affine_realize(&r);
                    let y = dt_state_affine_simulate(&sys, &u, u.horizon())?;
                    print_trajectory(&y, g.format, json!({"n": u.horizon()}));
                }
            }
        }
        Command::Verify { suite } => {
            if !SUITES.contains(&suite.as_str()) {
                bail!(Usage(format!("unknown suite {suite:?}; expected one of {}", SUITES.join(", "))));
            }
            let settings = Settings {
                degree: d,
                m: g.m,
                seed: g.seed,
                tolerance: g.tolerance,
                caps: DegreeCaps::from_env()?,
                ..Settings::default()
            };
            let report = run_suite(suite, &settings)?;
            match g.format {
                Format::Json => println!("{}", pretty(&report.to_json())),
                _ => println!("{}", report.to_text()),
            }
            return Ok(if report.passed() { Outcome::Ok } else { Outcome::Failed });
        }
        Command::Selftest => {
            let reports = run_all_criteria(g.seed);
            match g.format {
                Format::Json => println!("{}", pretty(&serde_json::to_value(&reports)?)),
                _ => reports.iter().for_each(|r| println!("{}", r.line())),
            }
            return Ok(if reports.iter().all(|r| r.passed) { Outcome::Ok } else { Outcome::Failed });
        }
    }
    Ok(Outcome::Ok)
}

fn run_rep(g: &Global, cmd: &RepCommand) -> Result<()> {
    let show = |r: &LinearRepresentation<Rational>| match g.format {
        Format::Text => println!("{r:?}"),
        _ => println!("{}", pretty(&rep_to_json(r))),
    };
    match cmd {
        RepCommand::Coeff { rep: r, word } => {
            let r = rep(r)?;
            let w: Word = if word.trim().is_empty() { Word::empty() } else { word.parse()? };
            let v = r.coefficient(&w)?;
            let cells: Vec<String> = v.iter().map(|c| c.to_string()).collect();
            match g.format {
                Format::Json => println!("{}", pretty(&json!({"word": w.to_string(), "coeff": cells}))),
                _ => println!("{}", cells.join(" ")),
            }
        }
        RepCommand::Shuffle { a, b } => show(&rep_shuffle(&rep(a)?, &rep(b)?, DEFAULT_DIMENSION_CAP)?),
        RepCommand::Qshuffle { a, b } => show(&rep_qshuffle(&rep(a)?, &rep(b)?, &theta(g)?, DEFAULT_DIMENSION_CAP)?),
        RepCommand::Realize { rep: r } => {
            let r = rep(r)?;
            let sys = state_affine_realize(&r);
            match g.format {
                Format::Json => println!(
                    "{}",
                    pretty(&json!({
                        "dim": sys.dim(),
                        "transition": sys.describe(),
                        "invertibility_radius": sys.invertibility_radius(),
                        "representation": rep_to_json(&r),
                    }))
                ),
                _ => println!("{}\ninvertibility radius {}", sys.describe(), sys.invertibility_radius()),
            }
        }
    }
    Ok(())
}
