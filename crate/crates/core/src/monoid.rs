//! Congruence monoids `A_d = {n ≥ 1 : n ≡ 1 (mod d)}` under multiplication.
//!
//! A monoid prime is an element `p ≠ 1` of `A_d` that cannot be written as
//! `a·b` with `a, b ∈ A_d` both greater than 1. Divisors outside `A_d` do not
//! count, so `9 = 3·3` and `21 = 3·7` are monoid primes of `A_4` while
//! `25 = 5·5` and `45 = 5·9` are not.

use crate::analysis::{Census, Domain, Estimator};
use crate::bits::{BitBuf, RankedBits};
use crate::error::{LabError, Result};
use crate::sieve::{PrimeTable, MAX_SIEVE_LIMIT};
use crate::MAX_EXACT_F64;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct MonoidParams {
    d: u64,
    limit: u64,
}

impl MonoidParams {
    pub fn new(d: u64, limit: u64) -> Result<Self> {
        if d < 2 {
            return Err(LabError::invalid(format!("modulus d must be at least 2, got {d}")));
        }
        if limit < 1 {
            return Err(LabError::invalid("census limit must be at least 1"));
        }
        if limit > MAX_SIEVE_LIMIT {
            return Err(LabError::invalid(format!(
                "census limit {limit} exceeds the 2^40 guard"
            )));
        }
        Ok(MonoidParams { d, limit })
    }

    pub fn d(&self) -> u64 {
        self.d
    }

    pub fn limit(&self) -> u64 {
        self.limit
    }

    /// Largest element of `A_d` not exceeding the limit.
    pub fn largest_element(&self) -> u64 {
        1 + (self.limit - 1) / self.d * self.d
    }

    /// Number of elements of `A_d ∩ [1, limit]`.
    fn element_count(&self) -> u64 {
        (self.limit - 1) / self.d + 1
    }
}

/// Largest `n <= limit` with `n ≡ 1 (mod d)`.
pub fn largest_element(params: MonoidParams) -> u64 {
    params.largest_element()
}

/// Monoid primes of `A_d` up to a limit. Element `1 + k·d` sits at index `k`.
#[derive(Clone, Debug)]
pub struct MonoidCensus {
    params: MonoidParams,
    flags: RankedBits,
}

impl MonoidCensus {
    /// Sieves the monoid primes of `A_d ∩ [1, limit]`.
    ///
    /// Every product `a·b` with `a ≤ b` in `A_d` is marked composite, with `a`
    /// running over monoid primes only: any factorization `n = a·b` refines to
    /// `n = p·(a'b)` with `p` a monoid prime dividing `a`, and `p ≤ a'b`.
    /// If `a ≡ 1` divides `n ≡ 1` then the cofactor is `≡ 1` too, so marking
    /// from one side is enough.
    pub fn build(params: MonoidParams) -> Self {
        let d = params.d;
        let limit = params.limit;
        let len = params.element_count() as usize;
        let mut buf = BitBuf::ones(len);
        buf.clear(0);
        let mut k = 1usize;
        while k < len {
            let a = 1 + k as u64 * d;
            if a > limit / a {
                break;
            }
            if buf.get(k) {
                // b runs over A_d from a upward while a·b <= limit
                let mut product = a * a;
                let step = a * d;
                while product <= limit {
                    buf.clear(((product - 1) / d) as usize);
                    match product.checked_add(step) {
                        Some(p) => product = p,
                        None => break,
                    }
                }
            }
            k += 1;
        }
        MonoidCensus { params, flags: RankedBits::from_words(buf.words, len) }
    }

    pub fn params(&self) -> MonoidParams {
        self.params
    }

    pub fn d(&self) -> u64 {
        self.params.d
    }

    pub fn limit(&self) -> u64 {
        self.params.limit
    }

    /// Whether the element `1 + k·d` is a monoid prime.
    pub fn flag(&self, k: usize) -> bool {
        self.flags.get(k)
    }

    /// Number of elements `1 + k·d` held by the census.
    pub fn len(&self) -> usize {
        self.flags.len()
    }

    pub fn is_empty(&self) -> bool {
        self.flags.len() == 0
    }

    /// Number of monoid primes `<= 1 + k·d`.
    pub fn cumulative(&self, k: usize) -> u64 {
        self.flags.rank_inclusive(k)
    }

    /// Whether `n` (which must lie in `A_d ∩ [1, limit]`) is a monoid prime.
    pub fn is_prime(&self, n: u64) -> Result<bool> {
        self.check_member(n)?;
        Ok(self.flag(((n - 1) / self.params.d) as usize))
    }

    /// Monoid primes in increasing order.
    pub fn primes(&self) -> impl Iterator<Item = u64> + '_ {
        let d = self.params.d;
        (0..self.len()).filter(|&k| self.flag(k)).map(move |k| 1 + k as u64 * d)
    }

    /// `π_d(x)`: number of monoid primes `<= x`.
    pub fn pi_d(&self, x: u64) -> Result<u64> {
        if x < 1 || x > self.params.limit {
            return Err(LabError::OutOfRange { what: "x", value: x, min: 1, max: self.params.limit });
        }
        Ok(self.cumulative(((x - 1) / self.params.d) as usize))
    }

    fn check_member(&self, n: u64) -> Result<()> {
        if n < 1 || n > self.params.limit {
            return Err(LabError::OutOfRange { what: "n", value: n, min: 1, max: self.params.limit });
        }
        if n % self.params.d != 1 {
            return Err(LabError::invalid(format!("{n} is not ≡ 1 (mod {})", self.params.d)));
        }
        Ok(())
    }
}

/// Trial-division monoid primality: `n > 1` and no `a ≡ 1 (mod d)` with
/// `1 < a ≤ √n` divides `n`.
pub fn is_monoid_prime(n: u64, d: u64) -> Result<bool> {
    if d < 2 {
        return Err(LabError::invalid(format!("modulus d must be at least 2, got {d}")));
    }
    if n < 1 || n % d != 1 {
        return Err(LabError::invalid(format!("{n} is not an element of A_{d}")));
    }
    if n == 1 {
        return Ok(false);
    }
    let mut a = 1 + d;
    while a <= n / a {
        if n % a == 0 {
            return Ok(false);
        }
        a += d;
    }
    Ok(true)
}

/// Classifies `n ∈ A_4` through its rational factorization: monoid primes of
/// the Hilbert monoid are the rational primes `≡ 1 (mod 4)` and the products
/// `p·q` of two (not necessarily distinct) rational primes `≡ 3 (mod 4)`.
///
/// Requires `table.limit() >= √n`.
pub fn hilbert_classify(n: u64, table: &PrimeTable) -> Result<bool> {
    if n < 1 || n % 4 != 1 {
        return Err(LabError::invalid(format!("{n} is not an element of A_4")));
    }
    let factors = table.factorize(n)?;
    let omega: u32 = factors.iter().map(|&(_, e)| e).sum();
    Ok(match omega {
        1 => true,
        2 => factors.iter().all(|&(p, _)| p % 4 == 3),
        _ => false,
    })
}

/// `x / (d · (ln x)^(1/d))`.
pub fn estimate_pi_d(d: u64, x: f64) -> Result<f64> {
    if d < 2 {
        return Err(LabError::invalid(format!("modulus d must be at least 2, got {d}")));
    }
    if x.is_nan() || x <= 1.0 || x.is_infinite() {
        return Err(LabError::invalid(format!("estimate needs x > 1, got {x}")));
    }
    Ok(x / (d as f64 * x.ln().powf(1.0 / d as f64)))
}

/// [`estimate_pi_d`] as a series estimator.
#[derive(Clone, Copy, Debug)]
pub struct MonoidEstimate {
    pub d: u64,
}

impl Estimator for MonoidEstimate {
    fn estimate(&self, x: u64) -> Result<f64> {
        if x > MAX_EXACT_F64 {
            return Err(LabError::invalid(format!("{x} exceeds 2^53")));
        }
        estimate_pi_d(self.d, x as f64)
    }

    fn describe(&self) -> String {
        format!("x/({}·(ln x)^(1/{}))", self.d, self.d)
    }
}

impl Census for MonoidCensus {
    fn count_at(&self, x: u64) -> Result<u64> {
        self.pi_d(x)
    }

    fn range(&self) -> (u64, u64) {
        (1, self.params.limit)
    }

    fn default_grid(&self) -> Box<dyn Iterator<Item = u64> + '_> {
        let d = self.params.d;
        let first = (0..self.len()).find(|&k| self.flag(k)).unwrap_or(self.len());
        Box::new((first..self.len()).map(move |k| 1 + k as u64 * d))
    }

    fn domain(&self) -> Domain {
        Domain::Monoid { d: self.params.d }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sieve::sieve_primes;

    /// Exhaustive search over every divisor pair.
    fn brute_monoid_prime(n: u64, d: u64) -> bool {
        n > 1 && !(2..n).any(|a| n % a == 0 && a % d == 1 && (n / a) % d == 1)
    }

    #[test]
    fn a4_to_45() {
        let c = MonoidCensus::build(MonoidParams::new(4, 45).unwrap());
        let primes: Vec<u64> = c.primes().collect();
        let brute: Vec<u64> = (1..=45).step_by(4).filter(|&n| brute_monoid_prime(n, 4)).collect();
        assert_eq!(primes, brute);
        assert_eq!(primes, vec![5, 9, 13, 17, 21, 29, 33, 37, 41]);
        assert_eq!(c.pi_d(45).unwrap(), 9);
    }

    #[test]
    fn a4_to_5() {
        let c = MonoidCensus::build(MonoidParams::new(4, 5).unwrap());
        assert_eq!(c.primes().collect::<Vec<_>>(), vec![5]);
    }

    #[test]
    fn element_one_is_not_prime() {
        for d in 2..20 {
            let c = MonoidCensus::build(MonoidParams::new(d, 1).unwrap());
            assert!(!c.flag(0));
            assert_eq!(c.pi_d(1).unwrap(), 0);
        }
        assert!(!is_monoid_prime(1, 4).unwrap());
    }

    #[test]
    fn a5_has_no_prime_up_to_5() {
        let c = MonoidCensus::build(MonoidParams::new(5, 10).unwrap());
        assert_eq!(c.pi_d(5).unwrap(), 0);
    }

    #[test]
    fn a3_table_count() {
        let c = MonoidCensus::build(MonoidParams::new(3, 10_000).unwrap());
        assert_eq!(c.pi_d(10_000).unwrap(), 1380);
    }

    #[test]
    fn worked_examples_in_a4() {
        assert!(is_monoid_prime(9, 4).unwrap());
        assert!(is_monoid_prime(21, 4).unwrap());
        assert!(is_monoid_prime(33, 4).unwrap());
        assert!(!is_monoid_prime(25, 4).unwrap());
        assert!(!is_monoid_prime(45, 4).unwrap());
    }

    #[test]
    fn predicate_rejects_non_members() {
        assert!(is_monoid_prime(7, 4).is_err());
        assert!(is_monoid_prime(0, 4).is_err());
        assert!(is_monoid_prime(5, 1).is_err());
        let c = MonoidCensus::build(MonoidParams::new(4, 45).unwrap());
        assert!(c.is_prime(7).is_err());
        assert!(c.is_prime(49).is_err());
    }

    #[test]
    fn params_validation() {
        assert!(MonoidParams::new(1, 100).is_err());
        assert!(MonoidParams::new(3, 0).is_err());
        assert!(MonoidParams::new(3, MAX_SIEVE_LIMIT + 1).is_err());
    }

    #[test]
    fn pi_d_out_of_range() {
        let c = MonoidCensus::build(MonoidParams::new(3, 100).unwrap());
        assert!(matches!(c.pi_d(0), Err(LabError::OutOfRange { .. })));
        assert!(matches!(c.pi_d(101), Err(LabError::OutOfRange { .. })));
    }

    #[test]
    fn largest_element_rows() {
        let le = |d| largest_element(MonoidParams::new(d, 10_000).unwrap());
        assert_eq!(le(3), 10_000);
        assert_eq!(le(5), 9_996);
        assert_eq!(le(7), 9_997);
        assert_eq!(le(13), 9_998);
        assert_eq!(le(50), 9_951);
    }

    #[test]
    fn hilbert_examples() {
        let t = sieve_primes(1_000).unwrap();
        assert!(hilbert_classify(21, &t).unwrap());
        assert!(hilbert_classify(49, &t).unwrap());
        assert!(!hilbert_classify(105, &t).unwrap());
        assert!(!hilbert_classify(1, &t).unwrap());
        assert!(hilbert_classify(5, &t).unwrap());
        assert!(!hilbert_classify(25, &t).unwrap());
        assert!(hilbert_classify(33, &t).unwrap());
        assert!(hilbert_classify(3, &t).is_err());
        assert_eq!(hilbert_classify(49, &t).unwrap(), is_monoid_prime(49, 4).unwrap());
        assert_eq!(hilbert_classify(105, &t).unwrap(), is_monoid_prime(105, 4).unwrap());
    }

    #[test]
    fn estimate_values() {
        let e3 = estimate_pi_d(3, 10_000.0).unwrap();
        assert!((e3 - 1590.21).abs() < 0.05, "{e3}");
        let e7 = estimate_pi_d(7, 9_997.0).unwrap();
        assert!((e7 - 1039.97).abs() < 0.05, "{e7}");
        let at_e = estimate_pi_d(3, std::f64::consts::E).unwrap();
        assert!((at_e - std::f64::consts::E / 3.0).abs() < 1e-12);
        assert!(estimate_pi_d(3, 1.0).is_err());
        assert!(estimate_pi_d(3, 0.5).is_err());
        assert!(estimate_pi_d(1, 10.0).is_err());
    }

    #[test]
    fn other_reading_of_the_exponent_is_far_off() {
        // x / (d · ln(x^(1/d))) = x / ln x, nowhere near the tabulated 1590.21
        let alt = 10_000.0 / (3.0 * (10_000f64.ln() / 3.0));
        assert!((alt - 1085.7).abs() < 0.1);
    }

    #[test]
    fn default_grid_starts_at_first_prime() {
        let c = MonoidCensus::build(MonoidParams::new(4, 45).unwrap());
        let grid: Vec<u64> = c.default_grid().collect();
        assert_eq!(grid.first(), Some(&5));
        assert_eq!(grid.last(), Some(&45));
        assert_eq!(grid.len(), 11);
    }
}
