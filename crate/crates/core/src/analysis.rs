//! Evaluation series, accuracy statistics and model fits.

use std::fmt;

use crate::error::{LabError, Result};
use crate::gaussian::AxisConvention;
use crate::quadratic::RegionKind;
use crate::sieve::PrimeTable;
use crate::MAX_EXACT_F64;

/// What a census counts. Rendered into CSV/SVG titles.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Domain {
    Classical,
    Monoid { d: u64 },
    Gaussian { convention: AxisConvention },
    Quadratic { d: u64, region: RegionKind },
}

impl fmt::Display for Domain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Domain::Classical => f.write_str("rational primes"),
            Domain::Monoid { d } => write!(f, "monoid primes of A_{d}"),
            Domain::Gaussian { convention } => {
                write!(f, "Gaussian primes with a,b ≥ 0 ({convention}), x = norm bound")
            }
            Domain::Quadratic { d, region } => {
                write!(f, "irreducibles (not primes) of Z[√−{d}], {region}")
            }
        }
    }
}

/// A cumulative count evaluable at integer points.
pub trait Census {
    fn count_at(&self, x: u64) -> Result<u64>;

    /// Inclusive range of valid evaluation points.
    fn range(&self) -> (u64, u64);

    /// Every point where the count can change, from the first point with a
    /// count of at least one.
    fn default_grid(&self) -> Box<dyn Iterator<Item = u64> + '_>;

    fn domain(&self) -> Domain;
}

pub trait Estimator {
    fn estimate(&self, x: u64) -> Result<f64>;

    fn describe(&self) -> String;
}

impl<E: Estimator + ?Sized> Estimator for &E {
    fn estimate(&self, x: u64) -> Result<f64> {
        (**self).estimate(x)
    }

    fn describe(&self) -> String {
        (**self).describe()
    }
}

/// `x / ln x`.
#[derive(Clone, Copy, Debug, Default)]
pub struct ClassicalEstimate;

impl Estimator for ClassicalEstimate {
    fn estimate(&self, x: u64) -> Result<f64> {
        if !(2..=MAX_EXACT_F64).contains(&x) {
            return Err(LabError::invalid(format!("x/ln x needs 2 ≤ x ≤ 2^53, got {x}")));
        }
        let x = x as f64;
        Ok(x / x.ln())
    }

    fn describe(&self) -> String {
        "x/ln x".to_string()
    }
}

impl Census for PrimeTable {
    fn count_at(&self, x: u64) -> Result<u64> {
        self.pi(x)
    }

    fn range(&self) -> (u64, u64) {
        (0, self.limit())
    }

    fn default_grid(&self) -> Box<dyn Iterator<Item = u64> + '_> {
        Box::new(2..=self.limit())
    }

    fn domain(&self) -> Domain {
        Domain::Classical
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SeriesPoint {
    pub x: u64,
    pub actual: u64,
    pub estimate: f64,
    pub ratio: f64,
    /// `100·|actual − estimate|/actual`; absent when `actual = 0`.
    pub pct_err: Option<f64>,
}

impl SeriesPoint {
    pub fn new(x: u64, actual: u64, estimate: f64) -> Result<Self> {
        if actual > MAX_EXACT_F64 {
            return Err(LabError::invalid(format!("count {actual} exceeds 2^53")));
        }
        let ratio = ratio_r(actual, estimate)?;
        Ok(SeriesPoint { x, actual, estimate, ratio, pct_err: pct_err(actual, estimate) })
    }
}

fn pct_err(actual: u64, estimate: f64) -> Option<f64> {
    (actual >= 1).then(|| 100.0 * (actual as f64 - estimate).abs() / actual as f64)
}

/// Ordered `(x, actual, estimate)` evaluations of one census.
#[derive(Clone, Debug, PartialEq)]
pub struct CountSeries {
    domain: Domain,
    estimator: String,
    points: Vec<SeriesPoint>,
}

impl CountSeries {
    /// Checks that `x` is strictly increasing and `actual` nondecreasing.
    pub fn new(domain: Domain, estimator: impl Into<String>, points: Vec<SeriesPoint>) -> Result<Self> {
        for w in points.windows(2) {
            if w[1].x <= w[0].x {
                return Err(LabError::invalid(format!(
                    "series points must be strictly increasing in x ({} then {})",
                    w[0].x, w[1].x
                )));
            }
            if w[1].actual < w[0].actual {
                return Err(LabError::invalid(format!(
                    "actual counts must be nondecreasing (x = {})",
                    w[1].x
                )));
            }
        }
        Ok(CountSeries { domain, estimator: estimator.into(), points })
    }

    pub fn points(&self) -> &[SeriesPoint] {
        &self.points
    }

    pub fn domain(&self) -> Domain {
        self.domain
    }

    pub fn estimator(&self) -> &str {
        &self.estimator
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn last(&self) -> Option<&SeriesPoint> {
        self.points.last()
    }

    pub fn title(&self) -> String {
        format!("{} vs {}", self.domain, self.estimator)
    }
}

/// Evaluates `census` and `estimator` at each grid point; `None` selects the
/// census' default grid.
pub fn build_series(
    census: &dyn Census,
    estimator: &dyn Estimator,
    grid: Option<&[u64]>,
) -> Result<CountSeries> {
    let points: Vec<u64> = match grid {
        Some(g) => g.to_vec(),
        None => census.default_grid().collect(),
    };
    if points.is_empty() {
        return Err(LabError::invalid("evaluation grid is empty"));
    }
    let (lo, hi) = census.range();
    let evaluated = points
        .iter()
        .map(|&x| {
            if x < lo || x > hi {
                return Err(LabError::OutOfRange { what: "grid point", value: x, min: lo, max: hi });
            }
            SeriesPoint::new(x, census.count_at(x)?, estimator.estimate(x)?)
        })
        .collect::<Result<Vec<_>>>()?;
    CountSeries::new(census.domain(), estimator.describe(), evaluated)
}

/// `actual / estimate`.
pub fn ratio_r(actual: u64, estimate: f64) -> Result<f64> {
    if estimate.is_nan() || estimate <= 0.0 || estimate.is_infinite() {
        return Err(LabError::invalid(format!("estimate must be positive, got {estimate}")));
    }
    Ok(actual as f64 / estimate)
}

/// Running mean of absolute percentage errors, skipping zero counts.
#[derive(Clone, Copy, Debug, Default)]
pub struct MapeAccumulator {
    sum: f64,
    n: u64,
}

impl MapeAccumulator {
    pub fn push(&mut self, actual: u64, estimate: f64) {
        if let Some(e) = pct_err(actual, estimate) {
            self.sum += e;
            self.n += 1;
        }
    }

    pub fn count(&self) -> u64 {
        self.n
    }

    pub fn value(&self) -> Result<f64> {
        if self.n == 0 {
            return Err(LabError::invalid("no points with a nonzero count"));
        }
        Ok(self.sum / self.n as f64)
    }
}

/// Mean of `pct_err` over the points that carry one.
pub fn mape(series: &CountSeries) -> Result<f64> {
    let mut acc = MapeAccumulator::default();
    for p in series.points() {
        acc.push(p.actual, p.estimate);
    }
    acc.value()
}

/// MAPE over the default grid truncated at each checkpoint, in one pass.
///
/// Equivalent to `mape(build_series(census, estimator, None))` restricted to
/// grid points `<= checkpoint`, without materializing the series.
pub fn mape_at_checkpoints(
    census: &dyn Census,
    estimator: &dyn Estimator,
    checkpoints: &[u64],
) -> Result<Vec<f64>> {
    if checkpoints.windows(2).any(|w| w[1] <= w[0]) {
        return Err(LabError::invalid("checkpoints must be strictly increasing"));
    }
    let mut out = Vec::with_capacity(checkpoints.len());
    let mut acc = MapeAccumulator::default();
    let mut next = checkpoints.iter().peekable();
    for x in census.default_grid() {
        while let Some(&&c) = next.peek() {
            if x > c {
                out.push(acc.value()?);
                next.next();
            } else {
                break;
            }
        }
        if next.peek().is_none() {
            break;
        }
        acc.push(census.count_at(x)?, estimator.estimate(x)?);
    }
    for _ in next {
        out.push(acc.value()?);
    }
    Ok(out)
}

/// First grid point of the final stretch where `estimate ≥ actual` holds.
///
/// This is the last sign change of `actual − estimate` from positive to
/// nonpositive. `None` when the estimate is never below the count, or is
/// still below it at the last point.
pub fn find_crossover(series: &CountSeries) -> Option<u64> {
    let pts = series.points();
    let last_under = pts.iter().rposition(|p| p.actual as f64 > p.estimate)?;
    pts.get(last_under + 1).map(|p| p.x)
}

/// `count(x) ≈ c·x/(ln x)^e`, fitted by minimizing RMS relative error.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FitResult {
    pub c: f64,
    pub e: f64,
    pub rms_rel_err: f64,
}

impl Estimator for FitResult {
    fn estimate(&self, x: u64) -> Result<f64> {
        if !(2..=MAX_EXACT_F64).contains(&x) {
            return Err(LabError::invalid(format!("model needs 2 ≤ x ≤ 2^53, got {x}")));
        }
        let x = x as f64;
        Ok(self.c * x / x.ln().powf(self.e))
    }

    fn describe(&self) -> String {
        format!("{:.6}·x/(ln x)^{:.6}", self.c, self.e)
    }
}

pub const FIT_C_RANGE: (f64, f64) = (1e-3, 10.0);
pub const FIT_E_RANGE: (f64, f64) = (-2.0, 3.0);
const FIT_C_STEPS: usize = 80;
const FIT_E_STEP: f64 = 0.05;
pub const FIT_MIN_POINTS: usize = 8;

/// Fitting data: for each usable point, `x/actual` and `ln ln x`.
struct FitData {
    scaled: Vec<f64>,
    lnln: Vec<f64>,
}

impl FitData {
    /// Means of `h` and `h²` where `h_i = (x_i/(ln x_i)^e)/actual_i`.
    fn moments(&self, e: f64) -> (f64, f64) {
        let (mut s1, mut s2) = (0.0, 0.0);
        for (s, l) in self.scaled.iter().zip(&self.lnln) {
            let h = s * (-e * l).exp();
            s1 += h;
            s2 += h * h;
        }
        let n = self.scaled.len() as f64;
        (s1 / n, s2 / n)
    }

    /// Mean squared relative residual from precomputed moments.
    fn mse(c: f64, (s1, s2): (f64, f64)) -> f64 {
        (c * c * s2 - 2.0 * c * s1 + 1.0).max(0.0)
    }

    fn best_c(e_moments: (f64, f64)) -> f64 {
        (e_moments.0 / e_moments.1).clamp(FIT_C_RANGE.0, FIT_C_RANGE.1)
    }

    /// Mean squared error with `c` chosen optimally for this `e`.
    fn profile(&self, e: f64) -> f64 {
        let m = self.moments(e);
        Self::mse(Self::best_c(m), m)
    }

    fn rms_direct(&self, c: f64, e: f64) -> f64 {
        let sum: f64 = self
            .scaled
            .iter()
            .zip(&self.lnln)
            .map(|(s, l)| {
                let r = c * s * (-e * l).exp() - 1.0;
                r * r
            })
            .sum();
        (sum / self.scaled.len() as f64).sqrt()
    }
}

/// Fits `c·x/(ln x)^e` to the points with `actual ≥ 1` and `x ≥ 3`.
///
/// A coarse grid over `c ∈ [10⁻³, 10]` (log-spaced) and `e ∈ [−2, 3]`
/// (step 0.05) picks a starting cell. Refinement then alternates the exact
/// minimizer in `c` (the objective is quadratic in `c`) with a
/// golden-section search in `e`, recentring until the optimum is interior.
pub fn fit_model(series: &CountSeries) -> Result<FitResult> {
    let (scaled, lnln): (Vec<f64>, Vec<f64>) = series
        .points()
        .iter()
        .filter(|p| p.actual >= 1 && p.x >= 3)
        .map(|p| {
            let x = p.x as f64;
            (x / p.actual as f64, x.ln().ln())
        })
        .unzip();
    if scaled.len() < FIT_MIN_POINTS {
        return Err(LabError::invalid(format!(
            "model fit needs at least {FIT_MIN_POINTS} points with count ≥ 1 and x ≥ 3, got {}",
            scaled.len()
        )));
    }
    let data = FitData { scaled, lnln };

    let e_steps = ((FIT_E_RANGE.1 - FIT_E_RANGE.0) / FIT_E_STEP).round() as usize;
    let (lc0, lc1) = (FIT_C_RANGE.0.log10(), FIT_C_RANGE.1.log10());
    let mut best = (f64::INFINITY, 0.0, 0.0);
    for j in 0..=e_steps {
        let e = FIT_E_RANGE.0 + j as f64 * FIT_E_STEP;
        let m = data.moments(e);
        for k in 0..=FIT_C_STEPS {
            let c = 10f64.powf(lc0 + (lc1 - lc0) * k as f64 / FIT_C_STEPS as f64);
            let err = FitData::mse(c, m);
            if err < best.0 {
                best = (err, c, e);
            }
        }
    }

    let mut e = best.2;
    for _ in 0..64 {
        let lo = (e - FIT_E_STEP).max(FIT_E_RANGE.0);
        let hi = (e + FIT_E_STEP).min(FIT_E_RANGE.1);
        let next = golden_section(|t| data.profile(t), lo, hi, 1e-12);
        let at_edge = (next - lo).abs() < 1e-9 && lo > FIT_E_RANGE.0
            || (hi - next).abs() < 1e-9 && hi < FIT_E_RANGE.1;
        e = next;
        if !at_edge {
            break;
        }
    }
    let c = FitData::best_c(data.moments(e));
    Ok(FitResult { c, e, rms_rel_err: data.rms_direct(c, e) })
}

fn golden_section(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64, tol: f64) -> f64 {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = b - inv_phi * (b - a);
    let mut x2 = a + inv_phi * (b - a);
    let (mut f1, mut f2) = (f(x1), f(x2));
    while b - a > tol {
        if f1 <= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - inv_phi * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + inv_phi * (b - a);
            f2 = f(x2);
        }
    }
    if f1 <= f2 { x1 } else { x2 }
}
