//! Sieve of Eratosthenes over odd numbers and the classical `π(x)`.

use crate::bits::{BitBuf, RankedBits};
use crate::error::{LabError, Result};

/// Hard upper bound accepted by [`sieve_primes`].
pub const MAX_SIEVE_LIMIT: u64 = 1 << 40;

/// Limits above this are sieved segment by segment.
pub const SEGMENT_THRESHOLD: u64 = 100_000_000;

/// Default segment length, in 64-bit words of odd-number flags (256 KiB).
pub const DEFAULT_SEGMENT_WORDS: usize = 1 << 15;

/// Primality flags for every integer in `0..=limit`.
///
/// Only odd numbers are stored: bit `i` stands for `2i + 1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PrimeTable {
    limit: u64,
    odd: RankedBits,
}

/// Sieves all primes up to and including `limit`.
///
/// Deterministic; switches to the segmented sieve above [`SEGMENT_THRESHOLD`].
pub fn sieve_primes(limit: u64) -> Result<PrimeTable> {
    check_limit(limit)?;
    if limit > SEGMENT_THRESHOLD {
        sieve_primes_segmented(limit, DEFAULT_SEGMENT_WORDS)
    } else {
        Ok(sieve_unsegmented(limit))
    }
}

/// Segmented sieve with an explicit segment length (in words of 64 odd numbers).
pub fn sieve_primes_segmented(limit: u64, segment_words: usize) -> Result<PrimeTable> {
    check_limit(limit)?;
    if segment_words == 0 {
        return Err(LabError::invalid("segment length must be at least one word"));
    }
    let len = odd_len(limit);
    let base = sieve_unsegmented(limit.isqrt().max(2));
    let base_primes: Vec<u64> = base.primes().skip(1).collect();

    let mut buf = BitBuf::ones(len);
    buf.clear(0);
    let seg = segment_words * 64;
    let mut lo = 0usize;
    while lo < len {
        let hi = (lo + seg).min(len);
        for &p in &base_primes {
            let p2 = p * p;
            // Smallest odd multiple of p that is >= max(p², 2·lo + 1).
            let first = 2 * lo as u64 + 1;
            let mut m = if p2 >= first { p2 } else { first.div_ceil(p) * p };
            if m % 2 == 0 {
                m += p;
            }
            let mut i = (m / 2) as usize;
            if i >= hi {
                continue;
            }
            let step = p as usize;
            while i < hi {
                buf.clear(i);
                i += step;
            }
        }
        lo = hi;
    }
    Ok(PrimeTable { limit, odd: RankedBits::from_words(buf.words, len) })
}

fn sieve_unsegmented(limit: u64) -> PrimeTable {
    let len = odd_len(limit);
    let mut buf = BitBuf::ones(len);
    buf.clear(0);
    let mut p = 3u64;
    while p * p <= limit {
        if buf.get((p / 2) as usize) {
            let mut i = (p * p / 2) as usize;
            while i < len {
                buf.clear(i);
                i += p as usize;
            }
        }
        p += 2;
    }
    PrimeTable { limit, odd: RankedBits::from_words(buf.words, len) }
}

fn check_limit(limit: u64) -> Result<()> {
    if !(2..=MAX_SIEVE_LIMIT).contains(&limit) {
        return Err(LabError::invalid(format!(
            "sieve limit must lie in [2, 2^40], got {limit}"
        )));
    }
    Ok(())
}

fn odd_len(limit: u64) -> usize {
    limit.div_ceil(2) as usize
}

impl PrimeTable {
    pub fn limit(&self) -> u64 {
        self.limit
    }

    /// Panics if `n > limit`.
    #[inline]
    pub fn is_prime(&self, n: u64) -> bool {
        assert!(n <= self.limit, "{n} is beyond the sieve limit {}", self.limit);
        if n % 2 == 0 {
            n == 2
        } else {
            self.odd.get((n / 2) as usize)
        }
    }

    /// Number of primes `<= x`.
    pub fn pi(&self, x: u64) -> Result<u64> {
        if x > self.limit {
            return Err(LabError::OutOfRange { what: "x", value: x, min: 0, max: self.limit });
        }
        if x < 2 {
            return Ok(0);
        }
        Ok(1 + self.odd.rank_inclusive(((x - 1) / 2) as usize))
    }

    /// Total number of primes up to the limit.
    pub fn count(&self) -> u64 {
        1 + self.odd.count_ones()
    }

    /// Primes in increasing order.
    pub fn primes(&self) -> impl Iterator<Item = u64> + '_ {
        std::iter::once(2).chain(
            (1..self.odd.len()).filter(|&i| self.odd.get(i)).map(|i| 2 * i as u64 + 1),
        )
    }

    /// Raw odd-number flag words, exposed for equality checks between sieves.
    pub fn odd_flag_words(&self) -> &[u64] {
        self.odd.words()
    }

    /// Smallest prime factor of `n` by trial division against the table.
    ///
    /// Requires `limit >= √n`; returns `None` for `n < 2`.
    pub fn smallest_factor(&self, n: u64) -> Result<Option<u64>> {
        if n < 2 {
            return Ok(None);
        }
        let root = n.isqrt();
        if root > self.limit {
            return Err(LabError::invalid(format!(
                "table limit {} is below √{n}",
                self.limit
            )));
        }
        for p in self.primes() {
            if p > root {
                break;
            }
            if n % p == 0 {
                return Ok(Some(p));
            }
        }
        Ok(Some(n))
    }

    /// Prime factorization as `(prime, exponent)` pairs. Requires `limit >= √n`.
    pub fn factorize(&self, mut n: u64) -> Result<Vec<(u64, u32)>> {
        let mut out = Vec::new();
        while let Some(p) = self.smallest_factor(n)? {
            let mut e = 0;
            while n % p == 0 {
                n /= p;
                e += 1;
            }
            out.push((p, e));
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn trial_division(n: u64) -> bool {
        n >= 2 && (2..).take_while(|d| d * d <= n).all(|d| n % d != 0)
    }

    #[test]
    fn small_limit_flags() {
        let t = sieve_primes(10).unwrap();
        let primes: Vec<u64> = (0..=10).filter(|&n| t.is_prime(n)).collect();
        assert_eq!(primes, vec![2, 3, 5, 7]);
        assert!(!t.is_prime(0));
        assert!(!t.is_prime(1));
    }

    #[test]
    fn rejects_bad_limits() {
        assert!(matches!(sieve_primes(1), Err(LabError::InvalidArgument(_))));
        assert!(matches!(sieve_primes(0), Err(LabError::InvalidArgument(_))));
        assert!(sieve_primes(MAX_SIEVE_LIMIT + 1).is_err());
    }

    #[test]
    fn pi_small_values() {
        let t = sieve_primes(10_000).unwrap();
        assert_eq!(t.pi(0).unwrap(), 0);
        assert_eq!(t.pi(1).unwrap(), 0);
        assert_eq!(t.pi(2).unwrap(), 1);
        assert_eq!(t.pi(3).unwrap(), 2);
        assert_eq!(t.pi(10_000).unwrap(), 1229);
        assert!(matches!(t.pi(10_001), Err(LabError::OutOfRange { .. })));
    }

    #[test]
    fn pi_matches_trial_division_count() {
        let t = sieve_primes(10_000).unwrap();
        let mut running = 0;
        for x in 0..=10_000 {
            if trial_division(x) {
                running += 1;
            }
            assert_eq!(t.pi(x).unwrap(), running);
        }
        assert_eq!(running, 1229);
        assert_eq!(t.count(), 1229);
    }

    #[test]
    fn odd_limits_include_the_limit() {
        let t = sieve_primes(13).unwrap();
        assert!(t.is_prime(13));
        assert_eq!(t.pi(13).unwrap(), 6);
        let t = sieve_primes(2).unwrap();
        assert_eq!(t.count(), 1);
    }

    #[test]
    fn segmented_equals_unsegmented() {
        for limit in [2, 3, 64, 127, 128, 129, 1_000, 65_537, 1_000_003] {
            let plain = sieve_unsegmented(limit);
            for words in [1, 3, 64] {
                let seg = sieve_primes_segmented(limit, words).unwrap();
                assert_eq!(plain, seg, "limit {limit}, segment {words} words");
            }
        }
    }

    #[test]
    fn factorize_reconstructs() {
        let t = sieve_primes(1_000).unwrap();
        assert_eq!(t.factorize(360).unwrap(), vec![(2, 3), (3, 2), (5, 1)]);
        assert_eq!(t.factorize(999_983).unwrap(), vec![(999_983, 1)]);
        assert_eq!(t.factorize(1).unwrap(), vec![]);
        let small = sieve_primes(10).unwrap();
        assert!(small.factorize(1_000).is_err());
    }
}
