use std::fs::File;
use std::io::BufWriter;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use entfilter::filtering::{apply_filter, optimal_filter, ratio_upper_bound};
use entfilter::io::{read_filter, read_measurement, read_state, write_filter, write_state};
use entfilter::measurement::{
    expected_concurrence, expected_concurrence_product, predicted_expected_concurrence,
    predicted_expected_concurrence_product,
};
use entfilter::{concurrence, random_state, sweep, verify, Error, Side};

mod report;

use report::{AnalyzeReport, ApplyReport, FilterReport, MeasureReport};

/// Local filtering of two-qubit states.
#[derive(Parser)]
#[command(name = "entfilter", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Concurrence, EoF, Pauli decomposition and optimal-filter predictions.
    Analyze {
        state: PathBuf,
        /// Print JSON instead of text.
        #[arg(long)]
        json: bool,
    },
    /// Optimal one-sided filter for a state.
    OptimalFilter {
        state: PathBuf,
        #[arg(long, value_parser = parse_side)]
        side: Side,
        /// Write the filter file here.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        json: bool,
    },
    /// Apply a filter and report the outcome.
    Apply {
        state: PathBuf,
        filter: PathBuf,
        /// Write the post-filter state here.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        json: bool,
    },
    /// Expected concurrence after a dichotomic measurement.
    Measure {
        state: PathBuf,
        measurement: PathBuf,
        #[arg(long, value_parser = parse_side, default_value = "A")]
        side: Side,
        /// Measurement for Bob; `measurement` then acts on Alice.
        #[arg(long)]
        bob: Option<PathBuf>,
        #[arg(long)]
        json: bool,
    },
    /// Tabulate optimal ratio, gain and probability against |a| as CSV.
    Sweep {
        #[arg(long, allow_negative_numbers = true)]
        min: f64,
        #[arg(long, allow_negative_numbers = true)]
        max: f64,
        #[arg(long)]
        steps: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run the seeded property suites.
    Verify {
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long, default_value_t = 1000)]
        trials: usize,
        /// Write the full report, including any failing case, as JSON.
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Write a seeded random state.
    Random {
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
}

fn parse_side(s: &str) -> Result<Side, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}

fn print_json<T: serde::Serialize>(value: &T) {
    println!("{}", serde_json::to_string_pretty(value).expect("report serialises"));
}

fn run(command: Command) -> entfilter::Result<ExitCode> {
    match command {
        Command::Analyze { state, json } => {
            let s = read_state(&state)?;
            let r = AnalyzeReport::new(&s)?;
            if json {
                print_json(&r);
            } else {
                print!("{r}");
            }
        }
        Command::OptimalFilter {
            state,
            side,
            out,
            json,
        } => {
            let s = read_state(&state)?;
            let r = s.bloch(side);
            let f = optimal_filter(&r, side)?;
            let a = entfilter::state::norm3(&r);
            let report = FilterReport::new(&f, ratio_upper_bound(a)?, f.success_probability(&s));
            if let Some(path) = out {
                write_filter(&path, &f)?;
            }
            if json {
                print_json(&report);
            } else {
                print!("{report}");
            }
        }
        Command::Apply {
            state,
            filter,
            out,
            json,
        } => {
            let s = read_state(&state)?;
            let f = read_filter(&filter)?;
            let outcome = apply_filter(&s, &f)?;
            if let Some(path) = out {
                write_state(&path, &outcome.post_state)?;
            }
            let report = ApplyReport::new(&outcome);
            if json {
                print_json(&report);
            } else {
                print!("{report}");
            }
        }
        Command::Measure {
            state,
            measurement,
            side,
            bob,
            json,
        } => {
            let s = read_state(&state)?;
            let m = read_measurement(&measurement)?;
            let c = concurrence(&s)?.concurrence;
            let report = match bob {
                None => MeasureReport {
                    concurrence: c,
                    expected: expected_concurrence(&s, &m, side)?,
                    predicted: predicted_expected_concurrence(&s, &m)?,
                },
                Some(path) => {
                    let mb = read_measurement(&path)?;
                    MeasureReport {
                        concurrence: c,
                        expected: expected_concurrence_product(&s, &m, &mb)?,
                        predicted: predicted_expected_concurrence_product(&s, &m, &mb)?,
                    }
                }
            };
            if json {
                print_json(&report);
            } else {
                print!("{report}");
            }
        }
        Command::Sweep {
            min,
            max,
            steps,
            out,
        } => {
            let rows = sweep(min, max, steps)?;
            let file = File::create(&out).map_err(|e| Error::Io(format!("{}: {e}", out.display())))?;
            entfilter::sweep::write_csv(BufWriter::new(file), &rows)?;
            println!("wrote {} rows to {}", rows.len(), out.display());
        }
        Command::Verify {
            seed,
            trials,
            report,
        } => {
            if trials == 0 {
                return Err(Error::InvalidArgument("trials must be at least 1".into()));
            }
            let r = verify::run(seed, trials);
            print!("{}", report::verify_summary(&r));
            if let Some(path) = report {
                let text = serde_json::to_string_pretty(&r).expect("report serialises");
                std::fs::write(&path, text + "\n")
                    .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
            }
            if !r.passed() {
                for s in r.suites.iter().filter(|s| !s.passed) {
                    if let Some(case) = &s.failure {
                        eprintln!("failing case: {case}");
                    }
                }
                return Ok(ExitCode::from(1));
            }
        }
        Command::Random { seed, out } => {
            write_state(&out, &random_state(seed))?;
            println!("wrote random state (seed {seed}) to {}", out.display());
        }
    }
    Ok(ExitCode::SUCCESS)
}
