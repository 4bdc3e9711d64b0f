use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use pdtoda_core::algebra::rational::format_rational;
use pdtoda_core::divisor::{smoothness_probe, track_divisor, trajectory_report, Smoothness};
use pdtoda_core::lax::{degree_profile, DegreeProfile, SpectralData, SpectralReport};
use pdtoda_core::random::{random_state, rng_from_seed};
use pdtoda_core::theta::theta_check;
use pdtoda_core::verify::{run_verify, Fault, Suite, VerifyOptions, DEFAULT_THETA_TOL};
use pdtoda_core::{Error, TodaState};

const EXIT_FAIL: u8 = 1;
const EXIT_INPUT: u8 = 2;
const EXIT_NUMERIC: u8 = 3;

#[derive(Parser)]
#[command(name = "pdtoda", version, about = "Generalized periodic discrete Toda lattice")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Io {
    /// State JSON
    #[arg(long)]
    input: PathBuf,
    /// Report path; stdout when omitted
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Evolve a state and write t = 0..steps
    Simulate {
        #[command(flatten)]
        io: Io,
        #[arg(long, default_value_t = 10)]
        steps: usize,
    },
    /// Spectral polynomial coefficients, degree profile and genus
    Spectrum {
        #[command(flatten)]
        io: Io,
    },
    /// Divisor polynomial along a trajectory
    Divisor {
        #[command(flatten)]
        io: Io,
        #[arg(long, default_value_t = 10)]
        steps: usize,
    },
    /// Run a verification suite
    Verify {
        #[arg(long, default_value = "all")]
        suite: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Tolerance for the theta suite
        #[arg(long, default_value_t = DEFAULT_THETA_TOL)]
        tol: f64,
        /// Add 1 to β_J in every band-level check
        #[arg(long, value_name = "J")]
        corrupt_beta: Option<isize>,
        /// Divide sample counts by this factor
        #[arg(long, default_value_t = 1)]
        thin: usize,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Compare the theta-function a_1 with the exact divisor (N = 2, M = 1)
    ThetaCheck {
        #[command(flatten)]
        io: Io,
        #[arg(long, default_value_t = 10)]
        steps: usize,
        #[arg(long, default_value_t = DEFAULT_THETA_TOL)]
        tol: f64,
    },
    /// Draw a reproducible valid state
    RandomState {
        /// "N,M"
        #[arg(long)]
        nm: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        output: Option<PathBuf>,
    },
}

enum Failure {
    Input(String),
    Numeric(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Numeric(_)
            | Error::DegenerateEvolution(_)
            | Error::NonGeneric(_)
            | Error::SingularCurve(_) => Failure::Numeric(e.to_string()),
            _ => Failure::Input(e.to_string()),
        }
    }
}

type CmdResult = Result<bool, Failure>;

fn read_state(path: &PathBuf) -> Result<TodaState, Failure> {
    let text = fs::read_to_string(path)
        .map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn emit<T: Serialize>(value: &T, output: Option<&PathBuf>) -> Result<(), Failure> {
    let mut text = serde_json::to_string_pretty(value)
        .map_err(|e| Failure::Input(format!("serialization: {e}")))?;
    text.push('\n');
    match output {
        Some(p) => fs::write(p, text).map_err(|e| Failure::Input(format!("{}: {e}", p.display()))),
        None => io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| Failure::Input(format!("stdout: {e}"))),
    }
}

#[derive(Serialize)]
struct Conserved {
    #[serde(rename = "V")]
    v: String,
    #[serde(rename = "I")]
    i: Vec<String>,
}

#[derive(Serialize)]
struct Frame {
    state: TodaState,
    conserved: Conserved,
}

#[derive(Serialize)]
struct Trajectory {
    states: Vec<Frame>,
}

fn simulate(io: &Io, steps: usize) -> CmdResult {
    let s = read_state(&io.input)?;
    s.validate().map_err(|v| Failure::Input(format!("invalid state: {v}")))?;
    let states = s
        .trajectory(steps)?
        .into_iter()
        .map(|st| {
            let c = st.conserved_products();
            // Layer products rotate under evolution; their sorted list does not.
            let mut layers = c.prod_i.clone();
            layers.sort();
            Frame {
                conserved: Conserved {
                    v: format_rational(&c.prod_v),
                    i: layers.iter().map(format_rational).collect(),
                },
                state: st,
            }
        })
        .collect();
    emit(&Trajectory { states }, io.output.as_ref())?;
    Ok(true)
}

#[derive(Serialize)]
struct Spectrum {
    #[serde(flatten)]
    report: SpectralReport,
    profile: DegreeProfile,
    smoothness: Smoothness,
}

fn spectrum(io: &Io) -> CmdResult {
    let s = read_state(&io.input)?;
    let sd = SpectralData::of_state(&s)?;
    let profile = degree_profile(&sd);
    let ok = profile.holds();
    let out = Spectrum {
        report: sd.report(),
        smoothness: smoothness_probe(&sd.phi, sd.genus)?,
        profile,
    };
    emit(&out, io.output.as_ref())?;
    Ok(ok)
}

fn divisor(io: &Io, steps: usize) -> CmdResult {
    let s = read_state(&io.input)?;
    let sd = SpectralData::of_state(&s)?;
    let rep = trajectory_report(&track_divisor(&s, steps)?, sd.genus)?;
    emit(&rep, io.output.as_ref())?;
    Ok(true)
}

fn parse_nm(nm: &str) -> Result<(usize, usize), Failure> {
    let bad = || Failure::Input(format!("--nm expects \"N,M\", got {nm:?}"));
    let (n, m) = nm.split_once(',').ok_or_else(bad)?;
    let n = n.trim().parse().map_err(|_| bad())?;
    let m = m.trim().parse().map_err(|_| bad())?;
    Ok((n, m))
}

fn run(cli: Cli) -> CmdResult {
    match cli.command {
        Command::Simulate { io, steps } => simulate(&io, steps),
        Command::Spectrum { io } => spectrum(&io),
        Command::Divisor { io, steps } => divisor(&io, steps),
        Command::Verify {
            suite,
            seed,
            tol,
            corrupt_beta,
            thin,
            output,
        } => {
            let opts = VerifyOptions {
                suite: suite.parse::<Suite>()?,
                seed,
                fault: corrupt_beta.map(Fault::CorruptBeta),
                theta_tol: tol,
                thin,
            };
            let rep = run_verify(&opts);
            emit(&rep, output.as_ref())?;
            Ok(rep.pass)
        }
        Command::ThetaCheck { io, steps, tol } => {
            let s = read_state(&io.input)?;
            let rep = theta_check(&s, steps, tol)?;
            emit(&rep, io.output.as_ref())?;
            Ok(rep.pass)
        }
        Command::RandomState { nm, seed, output } => {
            let (n, m) = parse_nm(&nm)?;
            let s = random_state(n, m, &mut rng_from_seed(seed))?;
            emit(&s, output.as_ref())?;
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(EXIT_INPUT)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(EXIT_FAIL),
        Err(Failure::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_INPUT)
        }
        Err(Failure::Numeric(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_NUMERIC)
        }
    }
}
