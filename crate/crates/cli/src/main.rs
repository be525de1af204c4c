//! Command-line front end: correlation, unit-root tests, the full pair audit,
//! random-walk simulations and type-token ratios from 1-gram counts.

use std::fs::File;
use std::io::{self, BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use trendaudit::csv_io::{read_series_csv_path, DEFAULT_TIME_COLUMN, DEFAULT_VALUE_COLUMN};
use trendaudit::lexdiv::{
    ingest_ngram_counts, ttr_series, write_ttr_csv, IngestOptions, TtrConfig,
};
use trendaudit::montecarlo::{linear_trend_target, DEFAULT_BINS};
use trendaudit::report::write_simulation_csv;
use trendaudit::{
    adf_test, align, audit, difference, pearson, run_monte_carlo, to_canonical_json, write_report,
    AuditConfig, CorrelationMode, Deterministic, Error, Format, SimulationReport, TimeSeries,
    WalkParams,
};

const THREADS_VAR: &str = "TRENDAUDIT_THREADS";

#[derive(Parser, Debug)]
#[command(
    name = "trendaudit",
    version,
    about = "Check whether correlations between trending series survive differencing"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
struct Columns {
    /// Name of the integer time column
    #[arg(long, default_value = DEFAULT_TIME_COLUMN)]
    time_col: String,
    /// Name of the value column
    #[arg(long, default_value = DEFAULT_VALUE_COLUMN)]
    value_col: String,
}

#[derive(Args, Debug, Clone)]
struct PairColumns {
    #[command(flatten)]
    shared: Columns,
    /// Value column of --a, overriding --value-col
    #[arg(long)]
    a_col: Option<String>,
    /// Value column of --b, overriding --value-col
    #[arg(long)]
    b_col: Option<String>,
}

impl PairColumns {
    fn read_pair(&self, a: &Path, b: &Path) -> Result<(TimeSeries, TimeSeries), Error> {
        let side = |col: &Option<String>| Columns {
            time_col: self.shared.time_col.clone(),
            value_col: col.clone().unwrap_or_else(|| self.shared.value_col.clone()),
        };
        Ok((
            read_series(a, &side(&self.a_col))?,
            read_series(b, &side(&self.b_col))?,
        ))
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum OutFmt {
    Text,
    Json,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Pearson correlation of two series on their common time stamps
    Corr {
        #[arg(long)]
        a: PathBuf,
        #[arg(long)]
        b: PathBuf,
        /// Correlate first differences instead of levels
        #[arg(long)]
        changes: bool,
        #[arg(long, value_enum, default_value_t = OutFmt::Text)]
        format: OutFmt,
        #[command(flatten)]
        columns: PairColumns,
    },
    /// Augmented Dickey-Fuller test on one series
    Adf {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, default_value_t = 1)]
        lags: usize,
        /// none, constant or constant_trend
        #[arg(long, default_value = "constant", value_parser = parse_deterministic)]
        deterministic: Deterministic,
        #[arg(long, value_enum, default_value_t = OutFmt::Text)]
        format: OutFmt,
        #[command(flatten)]
        columns: Columns,
    },
    /// Full audit of a pair: unit roots, level and change correlations,
    /// residual autocorrelation and an optional random-walk null
    Audit {
        #[arg(long)]
        a: PathBuf,
        #[arg(long)]
        b: PathBuf,
        /// Random walks simulated against b (0 skips the simulation)
        #[arg(long, default_value_t = 0)]
        walks: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Output file; standard output when absent
        #[arg(long)]
        out: Option<PathBuf>,
        /// json, text or csv
        #[arg(long, default_value = "json", value_parser = parse_format)]
        format: Format,
        #[arg(long, default_value_t = 0.05)]
        alpha: f64,
        #[arg(long, default_value_t = 1)]
        lags: usize,
        #[arg(long, default_value = "constant", value_parser = parse_deterministic)]
        deterministic: Deterministic,
        /// Minimum number of common time stamps
        #[arg(long, default_value_t = 20)]
        min_overlap: usize,
        #[arg(long, default_value_t = 0.02)]
        drift_min: f64,
        #[arg(long, default_value_t = 0.2)]
        drift_max: f64,
        #[arg(long, default_value_t = DEFAULT_BINS)]
        bins: usize,
        #[command(flatten)]
        columns: PairColumns,
    },
    /// Correlate simulated drift walks with a target series
    Simulate {
        /// Target series; a jittered linear trend is used when absent
        #[arg(long)]
        target: Option<PathBuf>,
        #[arg(long, default_value_t = 10_000)]
        walks: usize,
        #[arg(long, default_value_t = 0.02)]
        drift_min: f64,
        #[arg(long, default_value_t = 0.2)]
        drift_max: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = DEFAULT_BINS)]
        bins: usize,
        /// Slope of the synthetic target
        #[arg(long, default_value_t = 1.2)]
        trend_slope: f64,
        /// Length of the synthetic target
        #[arg(long, default_value_t = 101)]
        trend_length: usize,
        /// Standard deviation of the synthetic target's jitter
        #[arg(long, default_value_t = 1.0)]
        trend_jitter: f64,
        #[arg(long)]
        out: Option<PathBuf>,
        /// json or csv (histogram rows)
        #[arg(long, default_value = "json", value_parser = parse_format)]
        format: Format,
        #[command(flatten)]
        columns: Columns,
    },
    /// Type-token ratio per year from 1-gram counts
    Ttr {
        /// TAB-separated 1-gram file, or - for standard input
        #[arg(long)]
        ngrams: PathBuf,
        #[arg(long, default_value_t = 1_000_000)]
        sample_size: u64,
        #[arg(long, default_value_t = 1_000_000)]
        min_corpus: u64,
        /// Drop tokens whose yearly count is below this
        #[arg(long, default_value_t = 1)]
        min_count: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1)]
        repeats: u32,
        #[arg(long)]
        year_from: Option<i64>,
        #[arg(long)]
        year_to: Option<i64>,
        /// Fail on the first malformed line
        #[arg(long)]
        strict: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn parse_deterministic(s: &str) -> Result<Deterministic, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_format(s: &str) -> Result<Format, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

enum Failure {
    Usage(String),
    Run(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Run(e)
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Run(e.into())
    }
}

type CliResult = Result<(), Failure>;

fn exit_code(e: &Error) -> u8 {
    if e.is_precondition() {
        4
    } else if matches!(
        e.root(),
        Error::InvalidParameter(_) | Error::InvalidWindow(_)
    ) {
        2
    } else {
        3
    }
}

fn configure_threads() -> Result<(), String> {
    let Ok(raw) = std::env::var(THREADS_VAR) else {
        return Ok(());
    };
    let threads: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| format!("{THREADS_VAR} must be a positive integer, got `{raw}`"))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| e.to_string())
}

fn read_series(path: &Path, columns: &Columns) -> Result<TimeSeries, Error> {
    let parsed = read_series_csv_path(path, &columns.time_col, &columns.value_col)?;
    if parsed.dropped_rows > 0 {
        eprintln!(
            "{}: dropped {} rows with missing values",
            path.display(),
            parsed.dropped_rows
        );
    }
    Ok(parsed.series)
}

fn output(out: Option<&Path>) -> io::Result<Box<dyn Write>> {
    Ok(match out {
        Some(path) => Box::new(BufWriter::new(File::create(path)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn run(command: Command) -> CliResult {
    match command {
        Command::Corr {
            a,
            b,
            changes,
            format,
            columns,
        } => {
            let (a, b) = columns.read_pair(&a, &b)?;
            let (a, b) = align(&a, &b)?.into_series(a.label(), b.label());
            let result = if changes {
                let da = difference(&a).map_err(|e| e.context("differencing"))?;
                let db = difference(&b).map_err(|e| e.context("differencing"))?;
                pearson(
                    da.series.values(),
                    db.series.values(),
                    CorrelationMode::Changes,
                )?
            } else {
                pearson(a.values(), b.values(), CorrelationMode::Levels)?
            };
            let mut w = output(None)?;
            match format {
                OutFmt::Json => w.write_all(to_canonical_json(&result)?.as_bytes())?,
                OutFmt::Text => writeln!(
                    w,
                    "{} vs {} ({}): r = {:.6}, t = {:.4}, p = {:.6}, n = {}",
                    a.label(),
                    b.label(),
                    if changes { "changes" } else { "levels" },
                    result.r,
                    result.t_stat,
                    result.p_two_sided,
                    result.n
                )?,
            }
            w.flush()?;
        }
        Command::Adf {
            input,
            lags,
            deterministic,
            format,
            columns,
        } => {
            let s = read_series(&input, &columns)?;
            let r = adf_test(&s, lags, deterministic)?;
            let mut w = output(None)?;
            match format {
                OutFmt::Json => w.write_all(to_canonical_json(&r)?.as_bytes())?,
                OutFmt::Text => {
                    writeln!(
                        w,
                        "{}: ADF statistic {:.4} (lags {}, {}, n = {})",
                        s.label(),
                        r.statistic,
                        r.lags,
                        r.deterministic,
                        r.n_effective
                    )?;
                    writeln!(
                        w,
                        "critical values: 1% {:.4}, 5% {:.4}, 10% {:.4}",
                        r.critical_values.one_pct,
                        r.critical_values.five_pct,
                        r.critical_values.ten_pct
                    )?;
                    if let Some(p) = r.approx_p {
                        writeln!(w, "approximate p-value: {p:.4}")?;
                    }
                    writeln!(w, "{}", r.verdict_text())?;
                }
            }
            w.flush()?;
        }
        Command::Audit {
            a,
            b,
            walks,
            seed,
            out,
            format,
            alpha,
            lags,
            deterministic,
            min_overlap,
            drift_min,
            drift_max,
            bins,
            columns,
        } => {
            let (a, b) = columns.read_pair(&a, &b)?;
            let config = AuditConfig {
                alpha,
                lags,
                deterministic,
                min_overlap,
                walks,
                seed,
                drift_min,
                drift_max,
                bins,
            };
            let report = audit(&a, &b, &config)?;
            let mut w = output(out.as_deref())?;
            write_report(&report, format, &mut w)?;
            w.flush()?;
            if out.is_some() {
                eprintln!("verdict: {}", report.verdict.category);
            }
        }
        Command::Simulate {
            target,
            walks,
            drift_min,
            drift_max,
            seed,
            bins,
            trend_slope,
            trend_length,
            trend_jitter,
            out,
            format,
            columns,
        } => {
            let target = match target {
                Some(path) => read_series(&path, &columns)?,
                None => linear_trend_target(0, trend_length, trend_slope, trend_jitter, seed)?,
            };
            let params = WalkParams {
                drift_min,
                drift_max,
                length: target.len(),
                ..WalkParams::default()
            };
            let summary = run_monte_carlo(&target, walks, &params, seed)?;
            let report = SimulationReport::new(&target, &summary, bins)?;
            let mut w = output(out.as_deref())?;
            match format {
                Format::Json => w.write_all(to_canonical_json(&report)?.as_bytes())?,
                Format::CsvDigest => write_simulation_csv(&report, &mut w)?,
                Format::Text => return Err(Failure::Usage("simulate writes json or csv".into())),
            }
            w.flush()?;
        }
        Command::Ttr {
            ngrams,
            sample_size,
            min_corpus,
            min_count,
            seed,
            repeats,
            year_from,
            year_to,
            strict,
            out,
        } => {
            let year_range = match (year_from, year_to) {
                (None, None) => None,
                (from, to) => Some(from.unwrap_or(i64::MIN)..=to.unwrap_or(i64::MAX)),
            };
            let options = IngestOptions {
                min_count,
                year_range,
                strict,
            };
            let reader: Box<dyn BufRead> = if ngrams.as_os_str() == "-" {
                Box::new(io::stdin().lock())
            } else {
                let file = File::open(&ngrams)
                    .map_err(|e| Error::from(e).context(ngrams.display().to_string()))?;
                Box::new(BufReader::new(file))
            };
            let (table, stats) = ingest_ngram_counts(reader, &options)?;
            eprintln!(
                "read {} lines: {} malformed, {} tokens retained, {} below the minimum count",
                stats.lines, stats.malformed_lines, stats.retained_count, stats.below_min_count
            );
            let config = TtrConfig {
                sample_size,
                min_corpus,
                master_seed: seed,
                repeats,
            };
            let result = ttr_series(&table, &config)?;
            let skipped = result.points.iter().filter(|p| p.skipped.is_some()).count();
            if skipped > 0 {
                eprintln!("skipped {skipped} years with an insufficient corpus");
            }
            let mut w = output(out.as_deref())?;
            write_ttr_csv(&result.points, &mut w)?;
            w.flush()?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    if let Err(msg) = configure_threads() {
        eprintln!("error: {msg}");
        return ExitCode::from(2);
    }
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Run(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
