//! Command-line front end: orbits, scans, catalogs, and claim checks.
//!
//! Data goes to standard output or `--out`; summaries and progress go to
//! standard error. Exit codes: 0 success, 1 verification failure, 2 usage
//! error, 3 I/O or corruption error.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigUint;

use hailstone::report;
use hailstone::{
    classify_orbit_with, scan_range, Bounds, CycleCatalog, Error, MapSpec, PrefixRetention,
};

#[derive(Parser)]
#[command(name = "hailstone", version, about = "Explore halve-or-(a*n+b) maps: orbits, cycles, scans, and structural checks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct MapArgs {
    /// Preset map: "3n+1", "5n+1", or "3n+5"
    #[arg(long, value_name = "NAME", conflicts_with_all = ["odd_mul", "odd_add"])]
    map: Option<String>,
    /// Odd-branch multiplier of a custom map (odd, >= 1)
    #[arg(long, value_name = "A", requires = "odd_add")]
    odd_mul: Option<u64>,
    /// Odd-branch addend of a custom map (odd, >= 1)
    #[arg(long, value_name = "B", requires = "odd_mul")]
    odd_add: Option<u64>,
}

impl MapArgs {
    fn resolve(&self) -> Result<MapSpec, Error> {
        match (&self.map, self.odd_mul, self.odd_add) {
            (Some(name), None, None) => MapSpec::preset(name),
            (None, Some(a), Some(b)) => MapSpec::new(a, b, format!("{a}n+{b}")),
            _ => Err(Error::Format(
                "select a map with --map NAME or with --odd-mul A --odd-add B".into(),
            )),
        }
    }
}

#[derive(Args)]
struct BoundsArgs {
    /// Iteration cap per seed
    #[arg(long, default_value_t = 100_000)]
    max_steps: u64,
    /// Bit-length cap on visited values
    #[arg(long, default_value_t = 4096)]
    max_value_bits: u64,
    /// Iterate through 1 instead of stopping, exposing its true cycle
    #[arg(long)]
    no_stop_at_one: bool,
}

impl BoundsArgs {
    fn resolve(&self) -> Bounds {
        Bounds {
            max_steps: self.max_steps,
            max_value_bits: self.max_value_bits,
            stop_at_one: !self.no_stop_at_one,
        }
    }
}

#[derive(Copy, Clone, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Copy, Clone, ValueEnum)]
enum Claim {
    /// Doubled cycle members stay in their cycle
    Pow2,
    /// Constant entry offset of the 10*2^r family
    Entry,
    /// Odd cycle members end in 3 or 7
    Digits,
    /// Multiples of five fall into [5, 20, 10]
    Mult5,
    /// 3n+5 trajectories of 5k are five times 3n+1 trajectories of k
    Correspondence,
    /// All of the above
    All,
}

#[derive(Subcommand)]
enum Command {
    /// Classify a single seed; optionally print the visited values
    Orbit {
        #[command(flatten)]
        map: MapArgs,
        #[command(flatten)]
        bounds: BoundsArgs,
        /// Seed to classify (any positive integer, arbitrary size)
        #[arg(long, value_parser = parse_seed)]
        seed: BigUint,
        /// Print the trajectory, one decimal value per line
        #[arg(long)]
        trajectory: bool,
    },
    /// Classify every seed in a range and emit a report
    Scan {
        #[command(flatten)]
        map: MapArgs,
        #[command(flatten)]
        bounds: BoundsArgs,
        #[arg(long)]
        from: u64,
        #[arg(long)]
        to: u64,
        #[arg(long, default_value_t = 1)]
        workers: usize,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
        /// Write the report here instead of standard output
        #[arg(long)]
        out: Option<PathBuf>,
        /// Start from a saved catalog instead of an empty one
        #[arg(long)]
        catalog: Option<PathBuf>,
    },
    /// Print a cycle catalog, from the built-in fixtures or from a file
    Cycles {
        #[command(flatten)]
        map: MapArgs,
        /// Use the built-in catalog of the selected preset map
        #[arg(long)]
        fixtures: bool,
        /// Load a catalog file
        #[arg(long, conflicts_with = "fixtures")]
        catalog: Option<PathBuf>,
        /// Also write the catalog as JSON to this path
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run structural claim checkers; exits 1 if any check fails
    Verify {
        #[arg(value_enum)]
        claim: Claim,
        /// pow2/entry: largest power of two; mult5: largest multiple;
        /// correspondence: largest k
        #[arg(long)]
        limit: Option<u64>,
        /// correspondence: steps compared per seed
        #[arg(long)]
        steps: Option<u64>,
    },
}

fn parse_seed(s: &str) -> Result<BigUint, String> {
    s.parse::<BigUint>()
        .map_err(|_| format!("expected a positive decimal integer, got {s:?}"))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(exit_code_for(&err))
        }
    }
}

fn exit_code_for(err: &Error) -> u8 {
    match err {
        Error::Io(_) | Error::Format(_) | Error::CatalogCorruption(_) | Error::InvalidCycle(_) => 3,
        _ => 2,
    }
}

fn run(cli: Cli) -> Result<u8, Error> {
    match cli.command {
        Command::Orbit {
            map,
            bounds,
            seed,
            trajectory,
        } => {
            let map = map.resolve()?;
            let retention = if trajectory {
                PrefixRetention::Full
            } else {
                PrefixRetention::None
            };
            let orbit = classify_orbit_with(&map, &seed, &bounds.resolve(), retention)?;
            print!("{}", report::render_orbit(&orbit, trajectory));
            Ok(0)
        }
        Command::Scan {
            map,
            bounds,
            from,
            to,
            workers,
            format,
            out,
            catalog,
        } => {
            let map = map.resolve()?;
            let starting = match catalog {
                Some(path) => CycleCatalog::load(path)?,
                None => CycleCatalog::new(map.clone()),
            };
            let (scan_report, _updated) =
                scan_range(&map, from, to, &bounds.resolve(), &starting, workers)?;
            let rendered = match format {
                Format::Csv => report::records_to_csv(&scan_report.records),
                Format::Json => report::report_to_json(&scan_report),
            };
            match out {
                Some(path) => std::fs::write(path, rendered)?,
                None => print!("{rendered}"),
            }
            eprint!("{}", report::render_scan_summary(&scan_report));
            Ok(0)
        }
        Command::Cycles {
            map,
            fixtures,
            catalog,
            out,
        } => {
            let loaded = if fixtures {
                let name = map.map.as_deref().ok_or_else(|| {
                    Error::Format("--fixtures needs --map with a preset name".into())
                })?;
                CycleCatalog::fixtures(name)?
            } else if let Some(path) = catalog {
                CycleCatalog::load(path)?
            } else {
                return Err(Error::Format(
                    "select a catalog with --fixtures or --catalog FILE".into(),
                ));
            };
            print!("{}", report::render_catalog_listing(&loaded));
            if let Some(path) = out {
                loaded.save(path)?;
            }
            Ok(0)
        }
        Command::Verify {
            claim,
            limit,
            steps,
        } => run_verify(claim, limit, steps),
    }
}

fn run_verify(claim: Claim, limit: Option<u64>, steps: Option<u64>) -> Result<u8, Error> {
    use hailstone::{
        verify_10_pow2_entry, verify_correspondence, verify_multiples_of_5,
        verify_odd_digit_pattern, verify_pow2_all_members,
    };

    let mut results = Vec::new();
    let fixture_51 = || CycleCatalog::fixtures("5n+1");
    let run_pow2 = matches!(claim, Claim::Pow2 | Claim::All);
    let run_entry = matches!(claim, Claim::Entry | Claim::All);
    let run_digits = matches!(claim, Claim::Digits | Claim::All);
    let run_mult5 = matches!(claim, Claim::Mult5 | Claim::All);
    let run_corr = matches!(claim, Claim::Correspondence | Claim::All);

    if run_pow2 {
        let r_max = u32::try_from(limit.unwrap_or(20)).unwrap_or(u32::MAX);
        results.push(verify_pow2_all_members(&fixture_51()?, r_max)?);
    }
    if run_entry {
        let r_max = u32::try_from(limit.unwrap_or(10)).unwrap_or(u32::MAX);
        results.push(verify_10_pow2_entry(r_max)?);
    }
    if run_digits {
        results.push(verify_odd_digit_pattern(&fixture_51()?)?);
    }
    if run_mult5 {
        let extras: Vec<BigUint> = [225u64, 17_585, 3_698_450]
            .iter()
            .map(|&n| BigUint::from(n))
            .collect();
        results.push(verify_multiples_of_5(limit.unwrap_or(100), &extras)?);
    }
    if run_corr {
        results.push(verify_correspondence(
            limit.unwrap_or(10_000),
            steps.unwrap_or(1_000),
        )?);
    }

    let mut any_failed = false;
    for result in &results {
        println!("{result}");
        for line in result.failure_lines() {
            println!("{line}");
        }
        any_failed |= !result.passed();
    }
    Ok(u8::from(any_failed))
}
