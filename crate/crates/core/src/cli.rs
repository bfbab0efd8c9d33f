//! The `primes-lab` command line.
//!
//! Exit codes: 0 success, 2 invalid arguments, 3 resource guard, 4 I/O.

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::analysis::{
    build_series, find_crossover, fit_model, mape, mape_at_checkpoints, Census, ClassicalEstimate,
    CountSeries, Estimator,
};
use crate::error::{LabError, Result};
use crate::gaussian::{AxisConvention, GaussianCensus, GaussianEstimate};
use crate::monoid::{estimate_pi_d, MonoidCensus, MonoidEstimate, MonoidParams};
use crate::quadratic::{QuadCensus, QuadRing, RegionKind, RegionSpec, BRUTE_FORCE_MAX};
use crate::report::{self, Table1Row, Table2Row};
use crate::sieve::{sieve_primes, MAX_SIEVE_LIMIT};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_GUARD: i32 = 3;
pub const EXIT_IO: i32 = 4;

/// Default ceiling on census limits; `PRIMES_LAB_MAX_LIMIT` can raise it.
pub const DEFAULT_MAX_LIMIT: u64 = 100_000_000;
pub const MAX_LIMIT_ENV: &str = "PRIMES_LAB_MAX_LIMIT";

/// `d` values and limit of the monoid summary table.
pub const TABLE1_MODULI: [u64; 8] = [3, 5, 7, 9, 11, 13, 21, 50];
pub const TABLE1_LIMIT: u64 = 10_000;
/// Norm bounds of the Gaussian MAPE table.
pub const TABLE2_BOUNDS: [u64; 5] = [1_000, 10_000, 100_000, 1_000_000, 10_000_000];

/// Series written to CSV by `gauss` and `fit` are thinned to at most this
/// many rows unless `--step` is given.
const DEFAULT_MAX_ROWS: u64 = 100_000;

#[derive(Debug, Parser)]
#[command(name = "primes-lab", version, about = "Prime censuses in congruence monoids, Gaussian integers and Z[√−d]")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Monoid primes of A_d = {n ≡ 1 (mod d)} against x/(d·(ln x)^(1/d))
    Monoid(MonoidArgs),
    /// Gaussian primes in the first quadrant against r²/(2 ln r)
    Gauss(GaussArgs),
    /// Irreducibles of Z[√−d] against the x/ln x reference
    Quad(QuadArgs),
    /// Fit c·x/(ln x)^e to a census
    Fit(FitArgs),
    /// Monoid summary for d ∈ {3,5,7,9,11,13,21,50} up to 10⁴
    Table1(Table1Args),
    /// Gaussian MAPE at norm bounds 10³ … 10⁷
    Table2(Table2Args),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum EvalAt {
    /// the requested limit
    Limit,
    /// the largest element of A_d not above the limit
    Largest,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Region {
    /// a² + d·b² ≤ bound
    Norm,
    /// a² + b² ≤ bound
    Euclidean,
}

impl From<Region> for RegionKind {
    fn from(r: Region) -> Self {
        match r {
            Region::Norm => RegionKind::NormBall,
            Region::Euclidean => RegionKind::EuclideanBall,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum FitDomain {
    Classical,
    Monoid,
    Gauss,
    Quad,
}

#[derive(Debug, Args)]
struct MonoidArgs {
    #[arg(long)]
    d: u64,
    #[arg(long)]
    limit: u64,
    #[arg(long, value_enum, default_value = "limit")]
    eval_at: EvalAt,
    /// summary row (d,largest_element,actual_count,estimate,R_d,abs_R_minus_1,mape_pct)
    #[arg(long)]
    csv: Option<PathBuf>,
    /// full evaluation series
    #[arg(long)]
    series_csv: Option<PathBuf>,
    #[arg(long)]
    svg: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct GaussArgs {
    #[arg(long)]
    norm_limit: u64,
    /// count q but not qi for inert primes q
    #[arg(long)]
    dedupe_axes: bool,
    #[arg(long)]
    csv: Option<PathBuf>,
    #[arg(long)]
    svg: Option<PathBuf>,
    /// keep every k-th grid point in the CSV
    #[arg(long)]
    step: Option<u64>,
}

#[derive(Debug, Args)]
struct QuadArgs {
    /// ring Z[√−d]; d must be squarefree and ≥ 1
    #[arg(long, allow_negative_numbers = true)]
    d: i64,
    #[arg(long)]
    bound: u64,
    #[arg(long, value_enum, default_value = "norm")]
    region: Region,
    #[arg(long)]
    csv: Option<PathBuf>,
    #[arg(long)]
    svg: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct FitArgs {
    #[arg(long, value_enum)]
    domain: FitDomain,
    /// modulus (monoid) or ring parameter (quad)
    #[arg(long, allow_negative_numbers = true)]
    d: Option<i64>,
    /// census limit / norm limit / region bound
    #[arg(long)]
    limit: u64,
    /// smallest x used in the fit
    #[arg(long, default_value_t = 3)]
    from: u64,
    #[arg(long, value_enum, default_value = "norm")]
    region: Region,
    #[arg(long)]
    dedupe_axes: bool,
    #[arg(long)]
    step: Option<u64>,
    #[arg(long)]
    csv: Option<PathBuf>,
    #[arg(long)]
    svg: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct Table1Args {
    #[arg(long)]
    csv: Option<PathBuf>,
    /// write monoid_d<d>.svg for every row into this directory
    #[arg(long)]
    svg_dir: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct Table2Args {
    #[arg(long)]
    dedupe_axes: bool,
    #[arg(long)]
    csv: Option<PathBuf>,
    /// counts up to norm 10⁷ against the estimate
    #[arg(long)]
    svg: Option<PathBuf>,
}

/// Runs the CLI against the process' stdout and stderr.
pub fn run_cli<I, S>(argv: I) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run_cli_with(argv, &mut stdout.lock(), &mut stderr.lock())
}

/// `argv[0]` is the program name.
pub fn run_cli_with<I, S>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let rendered = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{rendered}");
                    EXIT_OK
                }
                _ => {
                    let _ = write!(err, "{rendered}");
                    EXIT_USAGE
                }
            };
        }
    };
    match execute(cli.command, out) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            exit_code(&e)
        }
    }
}

pub fn exit_code(e: &LabError) -> i32 {
    match e {
        LabError::ResourceGuard { .. } => EXIT_GUARD,
        LabError::Io { .. } => EXIT_IO,
        LabError::InvalidArgument(_)
        | LabError::OutOfRange { .. }
        | LabError::Overflow(_)
        | LabError::RealQuadratic(_) => EXIT_USAGE,
    }
}

/// Current ceiling on census limits.
pub fn max_limit() -> u64 {
    let raised = std::env::var(MAX_LIMIT_ENV).ok().and_then(|v| v.trim().parse::<u64>().ok());
    raised.unwrap_or(0).clamp(DEFAULT_MAX_LIMIT, MAX_SIEVE_LIMIT)
}

fn guard(what: &'static str, value: u64, max: u64) -> Result<()> {
    if value > max {
        return Err(LabError::ResourceGuard { what, value, max });
    }
    Ok(())
}

fn execute(cmd: Command, out: &mut dyn Write) -> Result<()> {
    match cmd {
        Command::Monoid(a) => run_monoid(a, out),
        Command::Gauss(a) => run_gauss(a, out),
        Command::Quad(a) => run_quad(a, out),
        Command::Fit(a) => run_fit(a, out),
        Command::Table1(a) => run_table1(a, out),
        Command::Table2(a) => run_table2(a, out),
    }
}

fn say(out: &mut dyn Write, line: impl AsRef<str>) -> Result<()> {
    writeln!(out, "{}", line.as_ref())
        .map_err(|source| LabError::Io { path: "<stdout>".to_string(), source })
}

fn write_artifact(out: &mut dyn Write, path: &Path, kind: &str, contents: &str) -> Result<()> {
    report::write_file(path, contents)?;
    say(out, format!("wrote {kind} to {}", path.display()))
}

fn write_series(out: &mut dyn Write, series: &CountSeries, csv: Option<&Path>, svg: Option<&Path>) -> Result<()> {
    if let Some(p) = csv {
        write_artifact(out, p, &format!("series CSV ({} rows)", series.len()), &report::series_csv(series))?;
    }
    if let Some(p) = svg {
        write_artifact(out, p, "SVG chart", &report::svg_string(series)?)?;
    }
    Ok(())
}

/// Default grid from `from` upward, keeping every `step`-th point (or enough
/// to stay under `max_rows`). The last grid point is always kept.
fn thinned_grid(census: &dyn Census, from: u64, step: Option<u64>, max_rows: u64) -> Result<Vec<u64>> {
    let total = census.default_grid().filter(|&x| x >= from).count() as u64;
    if total == 0 {
        return Err(LabError::invalid("nothing to evaluate: the census has no nonzero counts in range"));
    }
    let step = match step {
        Some(0) => return Err(LabError::invalid("--step must be at least 1")),
        Some(s) => s,
        None => total.div_ceil(max_rows).max(1),
    };
    let mut grid: Vec<u64> = census
        .default_grid()
        .filter(|&x| x >= from)
        .enumerate()
        .filter(|(i, _)| *i as u64 % step == 0)
        .map(|(_, x)| x)
        .collect();
    let last = census.default_grid().last().expect("nonempty grid");
    if grid.last() != Some(&last) {
        grid.push(last);
    }
    Ok(grid)
}

/// Summary row for one monoid census.
pub fn monoid_summary(census: &MonoidCensus, eval_at_largest: bool) -> Result<(Table1Row, CountSeries)> {
    let params = census.params();
    let d = params.d();
    let largest = params.largest_element();
    let x = if eval_at_largest { largest } else { params.limit() };
    let actual = census.pi_d(x)?;
    let estimate = estimate_pi_d(d, x as f64)?;
    let has_primes = census.default_grid().next().is_some();
    if !has_primes {
        return Err(LabError::invalid(format!(
            "A_{d} has no monoid primes up to {}; nothing to evaluate",
            params.limit()
        )));
    }
    let series = build_series(census, &MonoidEstimate { d }, None)?;
    let row = Table1Row {
        d,
        largest_element: largest,
        actual_count: actual,
        estimate,
        r_d: crate::analysis::ratio_r(actual, estimate)?,
        mape_pct: mape(&series)?,
    };
    Ok((row, series))
}

fn run_monoid(a: MonoidArgs, out: &mut dyn Write) -> Result<()> {
    let params = MonoidParams::new(a.d, a.limit)?;
    guard("limit", a.limit, max_limit())?;
    let census = MonoidCensus::build(params);
    let largest = matches!(a.eval_at, EvalAt::Largest);
    let (row, series) = monoid_summary(&census, largest)?;
    let crossover = find_crossover(&series).map_or("none".to_string(), |x| x.to_string());
    say(
        out,
        format!(
            "d={} limit={} eval_at={} pi_d={} estimate={:.2} R_d={:.5} mape={:.2}% crossover={}",
            row.d,
            a.limit,
            if largest { row.largest_element } else { a.limit },
            row.actual_count,
            row.estimate,
            row.r_d,
            row.mape_pct,
            crossover
        ),
    )?;
    if let Some(p) = &a.csv {
        write_artifact(out, p, "summary CSV", &report::table1_csv(&[row]))?;
    }
    write_series(out, &series, a.series_csv.as_deref(), a.svg.as_deref())
}

fn run_gauss(a: GaussArgs, out: &mut dyn Write) -> Result<()> {
    if a.norm_limit < 2 {
        return Err(LabError::invalid("--norm-limit must be at least 2"));
    }
    guard("norm limit", a.norm_limit, max_limit())?;
    let convention = if a.dedupe_axes { AxisConvention::DedupeAxes } else { AxisConvention::PaperLiteral };
    let table = sieve_primes(a.norm_limit)?;
    let census = GaussianCensus::build(a.norm_limit, convention, &table)?;
    let m = mape_at_checkpoints(&census, &GaussianEstimate, &[a.norm_limit])?[0];
    let count = census.pi_g(a.norm_limit)?;
    let estimate = GaussianEstimate.estimate(a.norm_limit)?;
    say(
        out,
        format!(
            "norm_limit={} convention={convention} pi_G={count} estimate={:.2} ratio={:.5} mape={:.3}%",
            a.norm_limit,
            estimate,
            crate::analysis::ratio_r(count, estimate)?,
            m
        ),
    )?;
    if a.csv.is_some() || a.svg.is_some() {
        let grid = thinned_grid(&census, 0, a.step, DEFAULT_MAX_ROWS)?;
        let series = build_series(&census, &GaussianEstimate, Some(&grid))?;
        write_series(out, &series, a.csv.as_deref(), a.svg.as_deref())?;
    }
    Ok(())
}

fn quad_census(d: i64, kind: RegionKind, bound: u64) -> Result<QuadCensus> {
    let ring = QuadRing::new(d)?;
    let region = RegionSpec::new(kind, bound)?;
    guard("bound", bound, BRUTE_FORCE_MAX)?;
    let table_limit = (bound.saturating_mul(ring.d())).isqrt().max(2);
    let table = sieve_primes(table_limit)?;
    QuadCensus::build(ring, region, &table)
}

fn run_quad(a: QuadArgs, out: &mut dyn Write) -> Result<()> {
    if a.bound < 2 {
        return Err(LabError::invalid("--bound must be at least 2"));
    }
    let census = quad_census(a.d, a.region.into(), a.bound)?;
    // x/ln x is undefined at x = 1
    let grid = thinned_grid(&census, 2, Some(1), u64::MAX)?;
    let series = build_series(&census, &ClassicalEstimate, Some(&grid))?;
    let last = series.last().expect("nonempty series");
    say(
        out,
        format!(
            "ring={} region={} bound={} irreducibles={} reference={:.2} ratio={:.5}",
            census.ring(),
            census.region().kind,
            a.bound,
            last.actual,
            last.estimate,
            last.ratio
        ),
    )?;
    write_series(out, &series, a.csv.as_deref(), a.svg.as_deref())
}

fn run_fit(a: FitArgs, out: &mut dyn Write) -> Result<()> {
    let need_d = || a.d.ok_or_else(|| LabError::invalid("--d is required for this domain"));
    let convention = if a.dedupe_axes { AxisConvention::DedupeAxes } else { AxisConvention::PaperLiteral };
    let census: Box<dyn Census> = match a.domain {
        FitDomain::Classical => {
            guard("limit", a.limit, max_limit())?;
            Box::new(sieve_primes(a.limit)?)
        }
        FitDomain::Monoid => {
            let d = need_d()?;
            if d < 2 {
                return Err(LabError::invalid(format!("modulus d must be at least 2, got {d}")));
            }
            let params = MonoidParams::new(d as u64, a.limit)?;
            guard("limit", a.limit, max_limit())?;
            Box::new(MonoidCensus::build(params))
        }
        FitDomain::Gauss => {
            guard("norm limit", a.limit, max_limit())?;
            let table = sieve_primes(a.limit.max(2))?;
            Box::new(GaussianCensus::build(a.limit, convention, &table)?)
        }
        FitDomain::Quad => Box::new(quad_census(need_d()?, a.region.into(), a.limit)?),
    };
    let grid = thinned_grid(census.as_ref(), a.from.max(3), a.step, DEFAULT_MAX_ROWS)?;
    let raw = build_series(census.as_ref(), &ClassicalEstimate, Some(&grid))?;
    let fit = fit_model(&raw)?;
    say(
        out,
        format!(
            "domain={} points={} c={:.6} e={:.6} rms_rel_err={:.6}",
            census.domain(),
            raw.len(),
            fit.c,
            fit.e,
            fit.rms_rel_err
        ),
    )?;
    if a.csv.is_some() || a.svg.is_some() {
        let fitted = build_series(census.as_ref(), &fit, Some(&grid))?;
        write_series(out, &fitted, a.csv.as_deref(), a.svg.as_deref())?;
    }
    Ok(())
}

/// Rows of the monoid summary table, with each row's full series.
pub fn table1_rows() -> Result<Vec<(Table1Row, CountSeries)>> {
    TABLE1_MODULI
        .iter()
        .map(|&d| monoid_summary(&MonoidCensus::build(MonoidParams::new(d, TABLE1_LIMIT)?), true))
        .collect()
}

fn run_table1(a: Table1Args, out: &mut dyn Write) -> Result<()> {
    let rows = table1_rows()?;
    say(out, report::TABLE1_HEADER)?;
    for (row, _) in &rows {
        say(out, row.csv_line())?;
    }
    if let Some(p) = &a.csv {
        let only: Vec<Table1Row> = rows.iter().map(|(r, _)| *r).collect();
        write_artifact(out, p, "table CSV", &report::table1_csv(&only))?;
    }
    if let Some(dir) = &a.svg_dir {
        std::fs::create_dir_all(dir)
            .map_err(|source| LabError::Io { path: dir.display().to_string(), source })?;
        for (row, series) in &rows {
            let path = dir.join(format!("monoid_d{}.svg", row.d));
            write_artifact(out, &path, "SVG chart", &report::svg_string(series)?)?;
        }
    }
    Ok(())
}

/// MAPE of the Gaussian estimate at each bound of the table.
pub fn table2_rows(convention: AxisConvention) -> Result<(Vec<Table2Row>, GaussianCensus)> {
    let top = *TABLE2_BOUNDS.last().expect("bounds");
    let table = sieve_primes(top)?;
    let census = GaussianCensus::build(top, convention, &table)?;
    let mapes = mape_at_checkpoints(&census, &GaussianEstimate, &TABLE2_BOUNDS)?;
    let rows = TABLE2_BOUNDS
        .iter()
        .zip(mapes)
        .map(|(&norm_bound, mape_pct)| Table2Row { norm_bound, mape_pct })
        .collect();
    Ok((rows, census))
}

fn run_table2(a: Table2Args, out: &mut dyn Write) -> Result<()> {
    let convention = if a.dedupe_axes { AxisConvention::DedupeAxes } else { AxisConvention::PaperLiteral };
    let (rows, census) = table2_rows(convention)?;
    say(out, report::TABLE2_HEADER)?;
    for r in &rows {
        say(out, r.csv_line())?;
    }
    if let Some(p) = &a.csv {
        write_artifact(out, p, "table CSV", &report::table2_csv(&rows))?;
    }
    if let Some(p) = &a.svg {
        let grid = thinned_grid(&census, 0, None, report::MAX_PLOT_POINTS as u64)?;
        let series = build_series(&census, &GaussianEstimate, Some(&grid))?;
        write_artifact(out, p, "SVG chart", &report::svg_string(&series)?)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let argv = std::iter::once("primes-lab").chain(args.iter().copied());
        let code = run_cli_with(argv, &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn monoid_d_must_be_at_least_two() {
        let (code, _, err) = run(&["monoid", "--d", "1", "--limit", "100"]);
        assert_eq!(code, EXIT_USAGE);
        assert!(err.contains("at least 2"), "{err}");
    }

    #[test]
    fn real_quadratic_rejected() {
        let (code, _, err) = run(&["quad", "--d", "-7", "--bound", "100"]);
        assert_eq!(code, EXIT_USAGE);
        assert!(err.contains("infinitely many units"), "{err}");
    }

    #[test]
    fn unknown_flag_is_usage_error() {
        assert_eq!(run(&["monoid", "--bogus"]).0, EXIT_USAGE);
        assert_eq!(run(&[]).0, EXIT_USAGE);
    }

    #[test]
    fn help_exits_zero() {
        let (code, out, _) = run(&["--help"]);
        assert_eq!(code, EXIT_OK);
        assert!(out.contains("table1"));
    }

    #[test]
    fn guard_violations_exit_three() {
        assert_eq!(run(&["monoid", "--d", "3", "--limit", "1000000000000"]).0, EXIT_GUARD);
        assert_eq!(run(&["gauss", "--norm-limit", "1000000000000"]).0, EXIT_GUARD);
        assert_eq!(run(&["quad", "--d", "5", "--bound", "2000000"]).0, EXIT_GUARD);
    }

    #[test]
    fn monoid_summary_line() {
        let (code, out, _) = run(&["monoid", "--d", "3", "--limit", "2000"]);
        assert_eq!(code, EXIT_OK);
        assert!(out.contains("crossover=805"), "{out}");
    }

    #[test]
    fn quad_summary_line() {
        let (code, out, _) = run(&["quad", "--d", "5", "--bound", "100"]);
        assert_eq!(code, EXIT_OK, "{out}");
        assert!(out.contains("ring=Z[√−5]"));
    }

    #[test]
    fn unwritable_path_exits_four() {
        let (code, _, _) = run(&["monoid", "--d", "3", "--limit", "100", "--csv", "/nonexistent/dir/out.csv"]);
        assert_eq!(code, EXIT_IO);
    }
}
