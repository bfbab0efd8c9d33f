//! Gaussian primes `a + bi` with `a, b ≥ 0`, counted inside norm circles.
//!
//! A point `(a, b)` is classified by the usual rule: off the axes it is prime
//! iff `a² + b²` is a rational prime; on an axis it is prime iff the nonzero
//! coordinate is a rational prime `q ≡ 3 (mod 4)`.

use std::fmt;

use crate::analysis::{Census, Domain, Estimator};
use crate::error::{LabError, Result};
use crate::sieve::PrimeTable;
use crate::MAX_EXACT_F64;

/// Largest norm accepted by [`gaussian_brute_irreducible`].
pub const BRUTE_FORCE_MAX_NORM: u64 = 1_000_000;

/// A nonzero Gaussian integer `a + bi` in the closed first quadrant.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GaussPoint {
    a: u64,
    b: u64,
}

impl GaussPoint {
    pub fn new(a: u64, b: u64) -> Result<Self> {
        if a == 0 && b == 0 {
            return Err(LabError::invalid("0 + 0i is not a valid Gaussian point"));
        }
        if a > u32::MAX as u64 || b > u32::MAX as u64 {
            return Err(LabError::Overflow("Gaussian norm"));
        }
        Ok(GaussPoint { a, b })
    }

    pub fn a(&self) -> u64 {
        self.a
    }

    pub fn b(&self) -> u64 {
        self.b
    }

    /// `a² + b²`.
    pub fn norm(&self) -> u64 {
        self.a * self.a + self.b * self.b
    }
}

impl fmt::Display for GaussPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}+{}i", self.a, self.b)
    }
}

/// How primes on the two axes are counted.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum AxisConvention {
    /// Every point with `a, b ≥ 0`: both `q` and `qi` are counted for an
    /// inert prime `q`, although they are associates.
    #[default]
    PaperLiteral,
    /// Only `q` is counted; `qi` is dropped.
    DedupeAxes,
}

impl fmt::Display for AxisConvention {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AxisConvention::PaperLiteral => f.write_str("paper-literal"),
            AxisConvention::DedupeAxes => f.write_str("dedupe-axes"),
        }
    }
}

/// Closed-form classification against a rational prime table.
pub fn is_gaussian_prime(p: GaussPoint, table: &PrimeTable) -> Result<bool> {
    let n = p.norm();
    if n > table.limit() {
        return Err(LabError::invalid(format!(
            "norm {n} of {p} exceeds the prime table limit {}",
            table.limit()
        )));
    }
    Ok(classify(p.a, p.b, table))
}

#[inline]
fn classify(a: u64, b: u64, table: &PrimeTable) -> bool {
    match (a, b) {
        (q, 0) | (0, q) => q % 4 == 3 && table.is_prime(q),
        _ => table.is_prime(a * a + b * b),
    }
}

/// Irreducibility by exhaustive search for a divisor of intermediate norm.
///
/// Each associate class of a nonzero divisor has exactly one member `u + vi`
/// with `u ≥ 1, v ≥ 0`, so only those are tried. `β` divides `p` iff both
/// coordinates of `p·conj(β)` are multiples of `N(β)`.
pub fn gaussian_brute_irreducible(p: GaussPoint) -> Result<bool> {
    let n = p.norm();
    if n > BRUTE_FORCE_MAX_NORM {
        return Err(LabError::OutOfRange { what: "norm", value: n, min: 1, max: BRUTE_FORCE_MAX_NORM });
    }
    if n == 1 {
        return Ok(false);
    }
    let (a, b) = (p.a as i64, p.b as i64);
    let n = n as i64;
    let mut u = 1i64;
    while u * u < n {
        let mut v = 0i64;
        loop {
            let m = u * u + v * v;
            if m >= n {
                break;
            }
            if m > 1 && n % m == 0 {
                // p · conj(β) = (a + bi)(u − vi)
                let re = a * u + b * v;
                let im = b * u - a * v;
                if re % m == 0 && im % m == 0 {
                    return Ok(false);
                }
            }
            v += 1;
        }
        u += 1;
    }
    Ok(true)
}

/// Cumulative Gaussian-prime counts indexed by integer norm.
#[derive(Clone, Debug)]
pub struct GaussianCensus {
    norm_limit: u64,
    convention: AxisConvention,
    /// `cumulative[n]` = primes with norm `<= n`; entry 0 is always 0.
    cumulative: Vec<u32>,
}

impl GaussianCensus {
    /// Enumerates every point with `a² + b² ≤ norm_limit`, row by row in `b`.
    pub fn build(norm_limit: u64, convention: AxisConvention, table: &PrimeTable) -> Result<Self> {
        if norm_limit < 1 {
            return Err(LabError::invalid("norm limit must be at least 1"));
        }
        if norm_limit > table.limit() {
            return Err(LabError::invalid(format!(
                "norm limit {norm_limit} exceeds the prime table limit {}",
                table.limit()
            )));
        }
        if norm_limit >= u32::MAX as u64 {
            return Err(LabError::invalid(format!("norm limit {norm_limit} exceeds 2^32")));
        }
        let mut hits = vec![0u32; norm_limit as usize + 1];
        let top = norm_limit.isqrt();
        for b in 0..=top {
            let row = norm_limit - b * b;
            let a_start = if b == 0 { 1 } else { 0 };
            let a_end = row.isqrt();
            for a in a_start..=a_end {
                if a == 0 && convention == AxisConvention::DedupeAxes {
                    continue;
                }
                if classify(a, b, table) {
                    hits[(a * a + b * b) as usize] += 1;
                }
            }
        }
        let mut acc = 0u32;
        for h in hits.iter_mut() {
            acc += *h;
            *h = acc;
        }
        Ok(GaussianCensus { norm_limit, convention, cumulative: hits })
    }

    pub fn norm_limit(&self) -> u64 {
        self.norm_limit
    }

    pub fn convention(&self) -> AxisConvention {
        self.convention
    }

    /// `π_G` for the norm circle of radius `√norm_bound`.
    pub fn pi_g(&self, norm_bound: u64) -> Result<u64> {
        if norm_bound < 1 || norm_bound > self.norm_limit {
            return Err(LabError::OutOfRange {
                what: "norm bound",
                value: norm_bound,
                min: 1,
                max: self.norm_limit,
            });
        }
        Ok(u64::from(self.cumulative[norm_bound as usize]))
    }

    /// `π_G(r)`; depends on `r` only through `⌊r²⌋`.
    pub fn pi_g_radius(&self, r: f64) -> Result<u64> {
        if r.is_nan() || r < 1.0 || r.is_infinite() {
            return Err(LabError::invalid(format!("radius must be at least 1, got {r}")));
        }
        let mut n = (r * r).floor() as u64;
        // guard against r·r rounding across an integer
        while n > 0 && (n as f64).sqrt() > r {
            n -= 1;
        }
        while ((n + 1) as f64).sqrt() <= r {
            n += 1;
        }
        self.pi_g(n)
    }
}

/// `r² / (2 ln r)`.
pub fn estimate_pi_g(r: f64) -> Result<f64> {
    if r.is_nan() || r <= 1.0 || r.is_infinite() {
        return Err(LabError::invalid(format!("estimate needs r > 1, got {r}")));
    }
    Ok(r * r / (2.0 * r.ln()))
}

/// [`estimate_pi_g`] evaluated at `r = √norm_bound`.
#[derive(Clone, Copy, Debug, Default)]
pub struct GaussianEstimate;

impl Estimator for GaussianEstimate {
    fn estimate(&self, norm_bound: u64) -> Result<f64> {
        if norm_bound > MAX_EXACT_F64 {
            return Err(LabError::invalid(format!("{norm_bound} exceeds 2^53")));
        }
        estimate_pi_g((norm_bound as f64).sqrt())
    }

    fn describe(&self) -> String {
        "r²/(2 ln r)".to_string()
    }
}

impl Census for GaussianCensus {
    fn count_at(&self, x: u64) -> Result<u64> {
        self.pi_g(x)
    }

    fn range(&self) -> (u64, u64) {
        (1, self.norm_limit)
    }

    fn default_grid(&self) -> Box<dyn Iterator<Item = u64> + '_> {
        let first = self.cumulative.iter().position(|&c| c >= 1).unwrap_or(self.cumulative.len());
        Box::new(first as u64..=self.norm_limit)
    }

    fn domain(&self) -> Domain {
        Domain::Gaussian { convention: self.convention }
    }
}
