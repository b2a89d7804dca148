use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use moran::decomposition::{suitable_decomposition, verify_decomposition};
use moran::error::Error;
use moran::fourier::MeasureWindow;
use moran::fuglede::fuglede_report;
use moran::rational::{format_rational, parse_rational, Rational};
use moran::search::{spectrum_search, DEFAULT_VERTEX_BUDGET};
use moran::spectra::{
    canonical_spectrum, is_spectrum, q_grid, truncation_spectral_verdict, CandidateSet,
    SpectrumStatus,
};
use moran::system::{check_convergence, parse_system, serialize_system, support_info, MoranSystem};
use moran::tiling::{
    canonical_complement, is_integer_tile, parse_digits, tijdeman_rescale, TileVerdict,
    DEFAULT_MAX_PERIOD,
};

#[derive(Parser)]
#[command(
    name = "moran",
    version,
    about = "Exact computations with Cantor-Moran measures"
)]
struct Cli {
    /// Worker threads (default: all cores). Output does not depend on this.
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Convergence, support and spectrality of a system
    Analyze { system: PathBuf },
    /// Canonical spectrum of the level-n truncation
    Spectrum {
        system: PathBuf,
        #[arg(long)]
        level: usize,
    },
    /// Decide whether a candidate set is a spectrum of the level-n truncation
    CheckSpectrum {
        system: PathBuf,
        #[arg(long)]
        level: usize,
        #[arg(long)]
        lambda: PathBuf,
    },
    /// Least spectrum containing 0 by exhaustive clique search
    Search {
        system: PathBuf,
        #[arg(long)]
        level: usize,
        #[arg(long, default_value_t = DEFAULT_VERTEX_BUDGET)]
        budget: usize,
    },
    /// Suitable decomposition of a spectrum along the split k
    Decompose {
        system: PathBuf,
        #[arg(long)]
        level: usize,
        #[arg(long)]
        split: usize,
        #[arg(long)]
        lambda: PathBuf,
    },
    /// Completeness functional Q on a rational grid, as CSV
    Qgrid {
        system: PathBuf,
        #[arg(long)]
        level: usize,
        #[arg(long)]
        lambda: PathBuf,
        #[arg(long, value_parser = rational_arg)]
        from: Rational,
        #[arg(long, value_parser = rational_arg)]
        to: Rational,
        #[arg(long, value_parser = rational_arg)]
        step: Rational,
        #[arg(long, default_value_t = 1e-12)]
        eps: f64,
    },
    /// Integer tile decision for a digit set
    Tile {
        digits: PathBuf,
        #[arg(long, default_value_t = DEFAULT_MAX_PERIOD)]
        max_period: u64,
    },
    /// Canonical complement of the level-n digit set
    Complement {
        system: PathBuf,
        #[arg(long)]
        level: usize,
    },
    /// Spectrality, complement and Lebesgue factorization report
    Fuglede {
        system: PathBuf,
        #[arg(long)]
        level: usize,
        #[arg(long)]
        json: bool,
    },
    /// Dilate A by r in a tiling A ⊕ B of Z_m
    Tijdeman {
        #[arg(long)]
        a: PathBuf,
        #[arg(long)]
        b: PathBuf,
        #[arg(long)]
        period: u64,
        #[arg(long)]
        r: u64,
    },
}

fn rational_arg(s: &str) -> Result<Rational, String> {
    parse_rational(s).map_err(|e| e.to_string())
}

/// A failure mapped to an exit status.
enum Failure {
    Input(String),
    Resource(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::BudgetExceeded { .. }
            | Error::LevelOverflow(_)
            | Error::PrecisionUnreachable(_) => Failure::Resource(e.to_string()),
            _ => Failure::Input(e.to_string()),
        }
    }
}

/// Stdout text plus whether a resource bound cut the verdict short.
struct Outcome {
    text: String,
    bounded: bool,
}

impl Outcome {
    fn done(text: String) -> Self {
        Outcome {
            text,
            bounded: false,
        }
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn load_system(path: &Path) -> Result<MoranSystem, Failure> {
    Ok(parse_system(&read(path)?)?)
}

fn load_set(path: &Path) -> Result<CandidateSet, Failure> {
    Ok(CandidateSet::parse(&read(path)?)?)
}

fn load_digits(path: &Path) -> Result<Vec<u64>, Failure> {
    Ok(parse_digits(&read(path)?)?)
}

fn list(values: &[u64]) -> String {
    values
        .iter()
        .map(u64::to_string)
        .collect::<Vec<_>>()
        .join(",")
}

fn run(command: Command) -> Result<Outcome, Failure> {
    let mut out = String::new();
    match command {
        Command::Analyze { system } => {
            let system = load_system(&system)?;
            let report = check_convergence(&system);
            // finite systems are described by their last level
            let level = system.horizon();
            let support = match support_info(&system, level) {
                Ok(info) => Some(info),
                Err(Error::InvalidWindow(_)) => None,
                Err(e) => return Err(e.into()),
            };
            let verdict = truncation_spectral_verdict(&system, level)?;
            writeln!(out, "convergence  {}", report.verdict).unwrap();
            writeln!(out, "certificate  {}", report.certificate.tag()).unwrap();
            if let Some(sum) = &report.sum {
                let kind = if report.sum_is_exact {
                    "exact"
                } else {
                    "upper bound"
                };
                writeln!(out, "sum          {} ({kind})", format_rational(sum)).unwrap();
            }
            match &support {
                Some(info) => {
                    writeln!(out, "diameter     {}", format_rational(&info.diameter)).unwrap()
                }
                None => writeln!(out, "diameter     unavailable for this tail").unwrap(),
            }
            writeln!(out, "spectrality  {verdict}").unwrap();
            if let Some(note) = &report.note {
                writeln!(out, "note         {note}").unwrap();
            }
        }
        Command::Spectrum { system, level } => {
            let system = load_system(&system)?;
            match canonical_spectrum(&system, level) {
                Ok(set) => out.push_str(&set.to_text()),
                Err(Error::NotSpectral(j)) => writeln!(out, "NotSpectral({j})").unwrap(),
                Err(e) => return Err(e.into()),
            }
        }
        Command::CheckSpectrum {
            system,
            level,
            lambda,
        } => {
            let system = load_system(&system)?;
            let set = load_set(&lambda)?;
            let window = MeasureWindow::head(&system, level)?;
            let cert = is_spectrum(&window, &set)?;
            match &cert.status {
                SpectrumStatus::Spectrum => writeln!(out, "Spectrum").unwrap(),
                SpectrumStatus::OrthogonalityFail(a, b) => writeln!(
                    out,
                    "OrthogonalityFail {} {}",
                    format_rational(a),
                    format_rational(b)
                )
                .unwrap(),
                SpectrumStatus::CardinalityFail { found, expected } => {
                    writeln!(out, "CardinalityFail found={found} expected={expected}").unwrap()
                }
            }
            writeln!(out, "atoms {}", cert.atom_count).unwrap();
        }
        Command::Search {
            system,
            level,
            budget,
        } => {
            let system = load_system(&system)?;
            let window = MeasureWindow::head(&system, level)?;
            match spectrum_search(&window, budget)? {
                Some(set) => out.push_str(&set.to_text()),
                None => writeln!(out, "NONE").unwrap(),
            }
        }
        Command::Decompose {
            system,
            level,
            split,
            lambda,
        } => {
            let system = load_system(&system)?;
            let set = load_set(&lambda)?;
            let result = suitable_decomposition(&system, level, split, &set)?;
            let report = verify_decomposition(&result)?;
            let head: Vec<String> = result.head.iter().map(format_rational).collect();
            writeln!(out, "head {}", head.join(",")).unwrap();
            for (alpha, part) in &result.parts {
                let part: Vec<String> = part.iter().map(format_rational).collect();
                writeln!(out, "part {} {}", format_rational(alpha), part.join(",")).unwrap();
            }
            for failure in &report.failures {
                writeln!(out, "FAIL {}: {}", failure.clause, failure.witness).unwrap();
            }
            writeln!(
                out,
                "{}",
                if report.passed() {
                    "VERIFIED"
                } else {
                    "FAILED"
                }
            )
            .unwrap();
        }
        Command::Qgrid {
            system,
            level,
            lambda,
            from,
            to,
            step,
            eps,
        } => {
            let system = load_system(&system)?;
            let set = load_set(&lambda)?;
            let window = MeasureWindow::head(&system, level)?;
            out.push_str("xi,Q\n");
            for row in q_grid(&window, &set, &from, &to, &step, eps)? {
                writeln!(out, "{},{}", format_rational(&row.xi), row.q.value).unwrap();
            }
        }
        Command::Tile { digits, max_period } => {
            let verdict = is_integer_tile(&load_digits(&digits)?, max_period)?;
            writeln!(out, "{verdict}").unwrap();
            let bounded = matches!(verdict, TileVerdict::Unknown { .. });
            return Ok(Outcome { text: out, bounded });
        }
        Command::Complement { system, level } => {
            let system = load_system(&system)?;
            match canonical_complement(&system, level) {
                Ok(cert) => {
                    writeln!(out, "complement {}", serialize_system(&cert.complement)).unwrap();
                    writeln!(out, "digits {}", list(&cert.digits.elements)).unwrap();
                    writeln!(
                        out,
                        "complement_digits {}",
                        list(&cert.complement_digits.elements)
                    )
                    .unwrap();
                    writeln!(out, "L {}", cert.length).unwrap();
                    writeln!(out, "uniform {}", cert.verified).unwrap();
                }
                Err(Error::NotSpectral(j)) => writeln!(out, "NotSpectral({j})").unwrap(),
                Err(e) => return Err(e.into()),
            }
        }
        Command::Fuglede {
            system,
            level,
            json,
        } => {
            let system = load_system(&system)?;
            let report = fuglede_report(&system, level)?;
            if json {
                let text =
                    serde_json::to_string_pretty(&report.to_json()).expect("JSON values serialize");
                writeln!(out, "{text}").unwrap();
            } else {
                out.push_str(&report.to_text());
            }
        }
        Command::Tijdeman { a, b, period, r } => {
            let tiling = tijdeman_rescale(&load_digits(&a)?, &load_digits(&b)?, period, r)?;
            writeln!(
                out,
                "TILE m={} rA={} B={}",
                tiling.period,
                list(&tiling.a),
                list(&tiling.b)
            )
            .unwrap();
        }
    }
    Ok(Outcome::done(out))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            // --help and --version
            print!("{e}");
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            eprint!("{e}");
            return ExitCode::from(1);
        }
    };
    if let Some(threads) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
        {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    }
    match run(cli.command) {
        Ok(outcome) => {
            let mut stdout = std::io::stdout().lock();
            if stdout
                .write_all(outcome.text.as_bytes())
                .and_then(|_| stdout.flush())
                .is_err()
            {
                return ExitCode::from(1);
            }
            ExitCode::from(if outcome.bounded { 2 } else { 0 })
        }
        Err(Failure::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Resource(msg)) => {
            eprintln!("resource bound: {msg}");
            ExitCode::from(2)
        }
    }
}
