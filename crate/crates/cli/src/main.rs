//! `sincnls` command-line driver: runs presets, dumps spectra and stability
//! regions, and replays benchmark tables.

use std::collections::HashMap;
use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;

use sincnls::experiments::{preset, run_with_spectrum, ExperimentConfig, RunArtifact, RunOutcome};
use sincnls::io::{self as out, ComparisonEntry, RunSettings};
use sincnls::reference::{table_rows, TableName, TableRow};
use sincnls::spectral::{frozen_spectrum, Spectrum};
use sincnls::stability::stability_region_sample;
use sincnls::Error;

#[derive(Parser)]
#[command(name = "sincnls", version, about = "Sinc differential quadrature solver for the cubic NLS equation")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Integrate a preset or config file and write diagnostics and snapshots
    Run {
        #[command(flatten)]
        experiment: ExperimentArgs,
        /// Output directory
        #[arg(long, default_value = ".")]
        out_dir: PathBuf,
    },
    /// Write the frozen-coefficient eigenvalues of a configuration
    Spectrum {
        #[command(flatten)]
        experiment: ExperimentArgs,
        /// Write spectrum.csv here instead of stdout
        #[arg(long)]
        out_dir: Option<PathBuf>,
    },
    /// Sample the stability region of the order-p truncated exponential
    Region {
        #[arg(long)]
        order: u32,
        /// Real range as lo:hi
        #[arg(long, allow_hyphen_values = true, default_value = "-4:1")]
        re: String,
        /// Imaginary range as lo:hi
        #[arg(long, allow_hyphen_values = true, default_value = "-4:4")]
        im: String,
        /// Samples per axis
        #[arg(long, default_value_t = 200)]
        resolution: usize,
        /// Write region.csv here instead of stdout
        #[arg(long)]
        out_dir: Option<PathBuf>,
    },
    /// Replay every row of a benchmark table and compare
    Table {
        /// t1 .. t5
        #[arg(long)]
        name: String,
        /// Concurrent rows; 0 uses every logical core
        #[arg(long, default_value_t = 0)]
        workers: usize,
        #[arg(long, default_value = ".")]
        out_dir: PathBuf,
    },
}

#[derive(Args)]
struct ExperimentArgs {
    /// single-soliton, collision, maxwellian-standing, maxwellian-moving, bound-state
    #[arg(long)]
    preset: Option<String>,
    /// key=value file; flags given on the command line win
    #[arg(long)]
    config: Option<PathBuf>,
    /// heun, rk2, rk3, rk4, rkf, ck
    #[arg(long)]
    method: Option<String>,
    #[arg(long)]
    dx: Option<String>,
    #[arg(long)]
    dt: Option<String>,
    #[arg(long)]
    t_end: Option<String>,
    #[arg(long)]
    amplitude: Option<String>,
    #[arg(long)]
    bound_n: Option<String>,
    /// Comma-separated times
    #[arg(long, allow_hyphen_values = true)]
    snapshot_times: Option<String>,
    #[arg(long)]
    diag_every: Option<String>,
    #[arg(long)]
    stability_tolerance: Option<String>,
}

#[derive(Debug)]
enum Failure {
    Solver(Error),
    Io(io::Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Solver(e)
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Io(e)
    }
}

const EXIT_INVALID: u8 = 2;
const EXIT_DIVERGED: u8 = 3;
const EXIT_NUMERICAL: u8 = 4;
const EXIT_IO: u8 = 1;

impl Failure {
    fn exit_code(&self) -> u8 {
        match self {
            Failure::Solver(Error::InvalidArgument(_) | Error::UnsupportedPreset(_)) => EXIT_INVALID,
            Failure::Solver(Error::Divergence { .. }) => EXIT_DIVERGED,
            Failure::Solver(Error::NumericalFailure(_) | Error::DivisionByZero(_)) => EXIT_NUMERICAL,
            Failure::Io(_) => EXIT_IO,
        }
    }
}

impl ExperimentArgs {
    fn settings(&self) -> Result<RunSettings, Failure> {
        let mut settings = match &self.config {
            Some(path) => {
                let text = fs::read_to_string(path)
                    .map_err(|e| Error::InvalidArgument(format!("cannot read {}: {e}", path.display())))?;
                RunSettings::parse(&text)?
            }
            None => RunSettings::default(),
        };
        let mut flags = RunSettings::default();
        let pairs = [
            ("preset", &self.preset),
            ("method", &self.method),
            ("dx", &self.dx),
            ("dt", &self.dt),
            ("t-end", &self.t_end),
            ("amplitude", &self.amplitude),
            ("bound-n", &self.bound_n),
            ("snapshot-times", &self.snapshot_times),
            ("diag-every", &self.diag_every),
            ("stability-tolerance", &self.stability_tolerance),
        ];
        for (key, value) in pairs {
            if let Some(v) = value {
                flags.set(key, v)?;
            }
        }
        settings = settings.overlay(flags);
        Ok(settings)
    }

    fn config(&self) -> Result<ExperimentConfig, Failure> {
        let settings = self.settings()?;
        let Some(name) = settings.preset else {
            return Err(Error::InvalidArgument("a preset is required (--preset or preset= in --config)".into()).into());
        };
        let config = preset(name, &settings.overrides)?;
        config.validate()?;
        Ok(config)
    }
}

fn create(dir: &Path, name: &str) -> io::Result<BufWriter<File>> {
    Ok(BufWriter::new(File::create(dir.join(name))?))
}

fn write_run(dir: &Path, art: &RunArtifact, elapsed: f64) -> Result<(), Failure> {
    fs::create_dir_all(dir)?;
    let outcome = match art.outcome {
        RunOutcome::Completed => "completed".to_string(),
        RunOutcome::Diverged { step, time } => format!("diverged at step {step} t={time}"),
    };
    let manifest = out::manifest(
        &art.config,
        art.config.diag_cadence()?,
        &[
            ("version", env!("CARGO_PKG_VERSION").to_string()),
            ("outcome", outcome),
            ("elapsed-seconds", format!("{elapsed:.3}")),
        ],
    );
    fs::write(dir.join("manifest.txt"), manifest)?;
    let mut w = create(dir, "diagnostics.csv")?;
    out::write_diagnostics(&mut w, &art.records)?;
    w.flush()?;
    let mut w = create(dir, "snapshots.csv")?;
    out::write_snapshots(&mut w, &art.grid.nodes(), &art.snapshots)?;
    w.flush()?;
    let mut w = create(dir, "spectrum.csv")?;
    out::write_spectrum(&mut w, &art.spectrum)?;
    w.flush()?;
    let mut w = create(dir, "stability.csv")?;
    out::write_stability(&mut w, &art.stability)?;
    w.flush()?;
    Ok(())
}

fn cmd_run(experiment: &ExperimentArgs, out_dir: &Path) -> Result<u8, Failure> {
    let config = experiment.config()?;
    let start = Instant::now();
    let art = run_with_spectrum(&config, None)?;
    write_run(out_dir, &art, start.elapsed().as_secs_f64())?;
    if !art.stability.admissible {
        eprintln!(
            "warning: dt = {} is outside the order-{} region (max |S| = {:.6})",
            config.delta_t, art.stability.order, art.stability.worst_magnitude
        );
    }
    let last = art.last_record();
    let summary = last.map(|r| {
        let linf = r.linf.map(|v| format!(" linf={v:.4e}")).unwrap_or_default();
        format!("t={}{linf} rel_c1={:.4e} rel_c3={:.4e}", r.time, r.rel_change_c1, r.rel_change_c3)
    });
    match art.outcome {
        RunOutcome::Completed => {
            println!("completed {}", summary.unwrap_or_default());
            Ok(0)
        }
        RunOutcome::Diverged { step, time } => {
            eprintln!("diverged at step {step} (t = {time}); partial output written");
            Ok(EXIT_DIVERGED)
        }
    }
}

fn cmd_spectrum(experiment: &ExperimentArgs, out_dir: Option<&Path>) -> Result<u8, Failure> {
    let config = experiment.config()?;
    let grid = config.grid()?;
    let spectrum = frozen_spectrum(&config.problem()?, &config.initial_state(&grid)?)?;
    match out_dir {
        Some(dir) => {
            fs::create_dir_all(dir)?;
            let mut w = create(dir, "spectrum.csv")?;
            out::write_spectrum(&mut w, &spectrum)?;
            w.flush()?;
        }
        None => out::write_spectrum(&mut io::stdout().lock(), &spectrum)?,
    }
    eprintln!("max |Im lambda| = {:.6}", spectrum.max_abs_imag());
    Ok(0)
}

fn parse_range(flag: &str, s: &str) -> Result<(f64, f64), Failure> {
    let bad = || Failure::from(Error::InvalidArgument(format!("--{flag} expects lo:hi, got `{s}`")));
    let (lo, hi) = s.split_once(':').ok_or_else(bad)?;
    let lo: f64 = lo.trim().parse().map_err(|_| bad())?;
    let hi: f64 = hi.trim().parse().map_err(|_| bad())?;
    Ok((lo, hi))
}

fn cmd_region(order: u32, re: &str, im: &str, resolution: usize, out_dir: Option<&Path>) -> Result<u8, Failure> {
    let region = stability_region_sample(
        order,
        parse_range("re", re)?,
        parse_range("im", im)?,
        (resolution, resolution),
    )?;
    match out_dir {
        Some(dir) => {
            fs::create_dir_all(dir)?;
            let mut w = create(dir, "region.csv")?;
            out::write_region(&mut w, &region)?;
            w.flush()?;
        }
        None => out::write_region(&mut BufWriter::new(io::stdout().lock()), &region)?,
    }
    Ok(0)
}

fn row_dir(index: usize, row: &TableRow) -> String {
    let mut name = format!("{index:02}-{}-dx{}-dt{}", row.method, row.delta_x, row.delta_t);
    if let Some(a) = row.amplitude {
        name += &format!("-a{a}");
    }
    if let Some(n) = row.bound_n {
        name += &format!("-n{n}");
    }
    name
}

type SpectrumKey = (u64, Option<u64>, Option<u32>);

fn spectrum_key(c: &ExperimentConfig) -> SpectrumKey {
    (c.delta_x.to_bits(), c.amplitude().map(f64::to_bits), c.bound_n)
}

fn cmd_table(name: &str, workers: usize, out_dir: &Path) -> Result<u8, Failure> {
    let table: TableName = name.parse()?;
    let rows = table_rows(table);
    let configs = rows.iter().map(TableRow::config).collect::<Result<Vec<_>, _>>()?;
    for c in &configs {
        c.validate()?;
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::InvalidArgument(format!("cannot start {workers} workers: {e}")))?;

    let mut distinct: Vec<&ExperimentConfig> = Vec::new();
    for c in &configs {
        if !distinct.iter().any(|d| spectrum_key(d) == spectrum_key(c)) {
            distinct.push(c);
        }
    }
    let spectra: HashMap<SpectrumKey, Spectrum> = pool.install(|| {
        distinct
            .par_iter()
            .map(|c| {
                let grid = c.grid()?;
                let s = frozen_spectrum(&c.problem()?, &c.initial_state(&grid)?)?;
                Ok((spectrum_key(c), s))
            })
            .collect::<Result<_, Error>>()
    })?;

    let rows_dir = out_dir.join("rows");
    fs::create_dir_all(&rows_dir)?;
    let results: Vec<Result<ComparisonEntry, Failure>> = pool.install(|| {
        rows.par_iter()
            .zip(&configs)
            .enumerate()
            .map(|(i, (row, config))| {
                let start = Instant::now();
                let art = run_with_spectrum(config, spectra.get(&spectrum_key(config)).cloned())?;
                write_run(&rows_dir.join(row_dir(i, row)), &art, start.elapsed().as_secs_f64())?;
                Ok(ComparisonEntry::from_run(row.clone(), &art))
            })
            .collect()
    });

    let mut entries = Vec::new();
    let mut failure = None;
    for r in results {
        match r {
            Ok(e) => entries.push(e),
            Err(e) => {
                eprintln!("row failed: {}", describe(&e));
                failure.get_or_insert(e);
            }
        }
    }
    let mut w = create(out_dir, "comparison.csv")?;
    out::write_comparison(&mut w, &entries)?;
    w.flush()?;
    let count = |s: &str| entries.iter().filter(|e| e.status.as_str() == s).count();
    println!(
        "{table}: {} rows, {} ok, {} diverged, {} mismatch",
        entries.len(),
        count("ok"),
        count("diverged"),
        count("mismatch")
    );
    match failure {
        Some(e) => Err(e),
        None => Ok(0),
    }
}

fn describe(f: &Failure) -> String {
    match f {
        Failure::Solver(e) => e.to_string(),
        Failure::Io(e) => format!("i/o error: {e}"),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Run { experiment, out_dir } => cmd_run(experiment, out_dir),
        Command::Spectrum { experiment, out_dir } => cmd_spectrum(experiment, out_dir.as_deref()),
        Command::Region {
            order,
            re,
            im,
            resolution,
            out_dir,
        } => cmd_region(*order, re, im, *resolution, out_dir.as_deref()),
        Command::Table { name, workers, out_dir } => cmd_table(name, *workers, out_dir),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(Failure::Io(e)) if e.kind() == io::ErrorKind::BrokenPipe => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", describe(&f));
            ExitCode::from(f.exit_code())
        }
    }
}
