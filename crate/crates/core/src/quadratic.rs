//! Exact arithmetic in the imaginary quadratic rings `Z[√−d]`.
//!
//! Elements are `a + b√−d` with integer `a, b` and squarefree `d ≥ 1`; the
//! norm is `a² + d·b²`. These are the literal rings `Z[√−d]`, not the
//! maximal orders: for `d ≡ 3 (mod 4)` the half-integer elements of the
//! maximal order are absent. Many of these rings are not factorial (`6 = 2·3
//! = (1+√−5)(1−√−5)` in `Z[√−5]`), so the census counts irreducibles, which
//! need not be prime.

use std::fmt;

use crate::analysis::{Census, Domain};
use crate::error::{LabError, Result};
use crate::sieve::PrimeTable;

/// Largest norm accepted by [`QuadInt::is_irreducible`], and largest region
/// bound accepted by [`QuadCensus::build`].
pub const BRUTE_FORCE_MAX: u64 = 1_000_000;

/// The ring `Z[√−d]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct QuadRing {
    d: u64,
}

impl QuadRing {
    /// `d` is the radicand sign-flipped: `d = 5` selects `Z[√−5]`. Zero,
    /// negative (real quadratic) and non-squarefree values are rejected.
    pub fn new(d: i64) -> Result<Self> {
        if d < 0 {
            return Err(LabError::RealQuadratic(d.unsigned_abs()));
        }
        if d == 0 {
            return Err(LabError::invalid("d must be a squarefree integer ≥ 1, got 0"));
        }
        let d = d as u64;
        if !is_squarefree(d) {
            return Err(LabError::invalid(format!("d = {d} is not squarefree")));
        }
        Ok(QuadRing { d })
    }

    pub fn d(&self) -> u64 {
        self.d
    }

    pub fn elem(&self, a: i64, b: i64) -> Result<QuadInt> {
        QuadInt::with_ring(a, b, *self)
    }

    pub fn one(&self) -> QuadInt {
        QuadInt { a: 1, b: 0, d: self.d }
    }
}

impl fmt::Display for QuadRing {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Z[√−{}]", self.d)
    }
}

fn is_squarefree(d: u64) -> bool {
    let mut p = 2u64;
    while p <= d / p {
        if d % (p * p) == 0 {
            return false;
        }
        p += 1;
    }
    true
}

/// `a + b√−d`. The norm is guaranteed to fit in a `u64`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct QuadInt {
    a: i64,
    b: i64,
    d: u64,
}

impl QuadInt {
    pub fn new(a: i64, b: i64, d: i64) -> Result<Self> {
        Self::with_ring(a, b, QuadRing::new(d)?)
    }

    fn with_ring(a: i64, b: i64, ring: QuadRing) -> Result<Self> {
        checked_norm(a as i128, b as i128, ring.d).ok_or(LabError::Overflow("quadratic norm"))?;
        Ok(QuadInt { a, b, d: ring.d })
    }

    pub fn a(&self) -> i64 {
        self.a
    }

    pub fn b(&self) -> i64 {
        self.b
    }

    pub fn d(&self) -> u64 {
        self.d
    }

    pub fn ring(&self) -> QuadRing {
        QuadRing { d: self.d }
    }

    /// `a² + d·b²`.
    pub fn norm(&self) -> u64 {
        checked_norm(self.a as i128, self.b as i128, self.d).expect("norm checked at construction")
    }

    pub fn conj(&self) -> QuadInt {
        QuadInt { a: self.a, b: -self.b, d: self.d }
    }

    pub fn is_zero(&self) -> bool {
        self.a == 0 && self.b == 0
    }

    /// Units are exactly the elements of norm 1: `±1`, plus `±√−1` when `d = 1`.
    pub fn is_unit(&self) -> bool {
        self.norm() == 1
    }

    /// `(a₁a₂ − d·b₁b₂) + (a₁b₂ + a₂b₁)√−d`, overflow-checked.
    pub fn mul(&self, other: &QuadInt) -> Result<QuadInt> {
        self.same_ring(other)?;
        let (a1, b1, a2, b2, d) =
            (self.a as i128, self.b as i128, other.a as i128, other.b as i128, self.d as i128);
        let re = a1 * a2 - d * b1 * b2;
        let im = a1 * b2 + a2 * b1;
        let re = i64::try_from(re).map_err(|_| LabError::Overflow("quadratic product"))?;
        let im = i64::try_from(im).map_err(|_| LabError::Overflow("quadratic product"))?;
        Self::with_ring(re, im, self.ring())
    }

    /// The `q` with `q·divisor = self`, if it exists in the ring.
    pub fn divide_exact(&self, divisor: &QuadInt) -> Result<Option<QuadInt>> {
        self.same_ring(divisor)?;
        if divisor.is_zero() {
            return Err(LabError::invalid("division by zero"));
        }
        let m = divisor.norm() as i128;
        // self · conj(divisor)
        let (a1, b1, a2, b2, d) =
            (self.a as i128, self.b as i128, divisor.a as i128, divisor.b as i128, self.d as i128);
        let re = a1 * a2 + d * b1 * b2;
        let im = b1 * a2 - a1 * b2;
        if re % m != 0 || im % m != 0 {
            return Ok(None);
        }
        // N(q) = N(self)/N(divisor), so the coordinates fit
        Ok(Some(QuadInt { a: (re / m) as i64, b: (im / m) as i64, d: self.d }))
    }

    pub fn divides(&self, x: &QuadInt) -> Result<bool> {
        Ok(x.divide_exact(self)?.is_some())
    }

    /// Brute-force irreducibility for norms in `[2, 10⁶]`.
    ///
    /// Tries every divisor norm `m` of `N(x)` with `1 < m < N(x)`, every
    /// element of norm `m` (one per `±` pair), and tests exact division.
    pub fn is_irreducible(&self) -> Result<bool> {
        let n = self.norm();
        if !(2..=BRUTE_FORCE_MAX).contains(&n) {
            return Err(LabError::OutOfRange { what: "norm", value: n, min: 2, max: BRUTE_FORCE_MAX });
        }
        let mut i = 1u64;
        while i * i <= n {
            if n % i == 0 {
                for m in [i, n / i] {
                    if m > 1 && m < n && self.has_divisor_of_norm(m)? {
                        return Ok(false);
                    }
                }
            }
            i += 1;
        }
        Ok(true)
    }

    /// Whether some element of norm `m` divides `self`.
    fn has_divisor_of_norm(&self, m: u64) -> Result<bool> {
        let d = self.d;
        let mut beta = 0u64;
        while d * beta * beta <= m {
            if let Some(alpha) = exact_sqrt(m - d * beta * beta) {
                let (alpha, beta) = (alpha as i64, beta as i64);
                for y in [QuadInt { a: alpha, b: beta, d }, QuadInt { a: alpha, b: -beta, d }] {
                    if y.divides(self)? {
                        return Ok(true);
                    }
                }
            }
            beta += 1;
        }
        Ok(false)
    }

    fn same_ring(&self, other: &QuadInt) -> Result<()> {
        if self.d != other.d {
            return Err(LabError::invalid(format!(
                "elements of Z[√−{}] and Z[√−{}] cannot be combined",
                self.d, other.d
            )));
        }
        Ok(())
    }
}

impl fmt::Display for QuadInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sign = if self.b < 0 { '−' } else { '+' };
        write!(f, "{} {} {}√−{}", self.a, sign, self.b.unsigned_abs(), self.d)
    }
}

fn checked_norm(a: i128, b: i128, d: u64) -> Option<u64> {
    let n = a.checked_mul(a)?.checked_add(b.checked_mul(b)?.checked_mul(d as i128)?)?;
    u64::try_from(n).ok()
}

fn exact_sqrt(n: u64) -> Option<u64> {
    let r = n.isqrt();
    (r * r == n).then_some(r)
}

/// Which disc of the closed first quadrant is counted.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum RegionKind {
    /// `a² + d·b² ≤ bound`.
    NormBall,
    /// `a² + b² ≤ bound`.
    EuclideanBall,
}

impl fmt::Display for RegionKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RegionKind::NormBall => f.write_str("norm ball a²+d·b² ≤ x"),
            RegionKind::EuclideanBall => f.write_str("euclidean ball a²+b² ≤ x"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RegionSpec {
    pub kind: RegionKind,
    pub bound: u64,
}

impl RegionSpec {
    pub fn new(kind: RegionKind, bound: u64) -> Result<Self> {
        if bound < 1 {
            return Err(LabError::invalid("region bound must be at least 1"));
        }
        Ok(RegionSpec { kind, bound })
    }

    fn value(&self, a: u64, b: u64, d: u64) -> u64 {
        match self.kind {
            RegionKind::NormBall => a * a + d * b * b,
            RegionKind::EuclideanBall => a * a + b * b,
        }
    }

    fn max_norm(&self, d: u64) -> u64 {
        match self.kind {
            RegionKind::NormBall => self.bound,
            RegionKind::EuclideanBall => self.bound * d.max(1),
        }
    }
}

/// Irreducibility test backed by a prime table.
///
/// A nontrivial factorization `x = y·z` has `min(N(y), N(z)) ≤ √N(x)`, so
/// only divisor norms up to `√N(x)` are tried, and prime norms short-circuit.
struct TableTester<'t> {
    table: &'t PrimeTable,
}

impl TableTester<'_> {
    fn is_irreducible(&self, x: &QuadInt) -> Result<bool> {
        let n = x.norm();
        if n < 2 {
            return Ok(false);
        }
        let factors = self.table.factorize(n)?;
        if factors.len() == 1 && factors[0].1 == 1 {
            return Ok(true);
        }
        let mut divisors = vec![1u64];
        for &(p, e) in &factors {
            let current = divisors.len();
            let mut pk = 1u64;
            for _ in 0..e {
                pk *= p;
                for i in 0..current {
                    divisors.push(divisors[i] * pk);
                }
            }
        }
        divisors.sort_unstable();
        for m in divisors.into_iter().filter(|&m| m > 1 && m <= n / m) {
            if x.has_divisor_of_norm(m)? {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

/// Cumulative irreducible counts over a first-quadrant region, indexed by
/// the region parameter (`a² + d·b²` or `a² + b²`).
#[derive(Clone, Debug)]
pub struct QuadCensus {
    ring: QuadRing,
    region: RegionSpec,
    cumulative: Vec<u32>,
}

impl QuadCensus {
    /// Counts every nonzero non-unit `a + b√−d` with `a, b ≥ 0` in the region.
    ///
    /// Requires `region.bound ≤ 10⁶` and a table reaching `√(max norm)`.
    pub fn build(ring: QuadRing, region: RegionSpec, table: &PrimeTable) -> Result<Self> {
        if region.bound > BRUTE_FORCE_MAX {
            return Err(LabError::OutOfRange {
                what: "region bound",
                value: region.bound,
                min: 1,
                max: BRUTE_FORCE_MAX,
            });
        }
        let d = ring.d;
        let max_norm = region.max_norm(d);
        if table.limit() < max_norm.isqrt() {
            return Err(LabError::invalid(format!(
                "prime table limit {} is below √{max_norm}",
                table.limit()
            )));
        }
        let tester = TableTester { table };
        let bound = region.bound;
        let mut hits = vec![0u32; bound as usize + 1];
        let mut b = 0u64;
        while region.value(0, b, d) <= bound {
            let mut a = 0u64;
            loop {
                let v = region.value(a, b, d);
                if v > bound {
                    break;
                }
                let x = QuadInt { a: a as i64, b: b as i64, d };
                if !x.is_zero() && !x.is_unit() && tester.is_irreducible(&x)? {
                    hits[v as usize] += 1;
                }
                a += 1;
            }
            b += 1;
        }
        let mut acc = 0u32;
        for h in hits.iter_mut() {
            acc += *h;
            *h = acc;
        }
        Ok(QuadCensus { ring, region, cumulative: hits })
    }

    pub fn ring(&self) -> QuadRing {
        self.ring
    }

    pub fn region(&self) -> RegionSpec {
        self.region
    }

    /// Irreducibles with region parameter `<= x`.
    pub fn count(&self, x: u64) -> Result<u64> {
        if x < 1 || x > self.region.bound {
            return Err(LabError::OutOfRange { what: "bound", value: x, min: 1, max: self.region.bound });
        }
        Ok(u64::from(self.cumulative[x as usize]))
    }
}

impl Census for QuadCensus {
    fn count_at(&self, x: u64) -> Result<u64> {
        self.count(x)
    }

    fn range(&self) -> (u64, u64) {
        (1, self.region.bound)
    }

    fn default_grid(&self) -> Box<dyn Iterator<Item = u64> + '_> {
        let first = self.cumulative.iter().position(|&c| c >= 1).unwrap_or(self.cumulative.len());
        Box::new(first as u64..=self.region.bound)
    }

    fn domain(&self) -> Domain {
        Domain::Quadratic { d: self.ring.d, region: self.region.kind }
    }
}
