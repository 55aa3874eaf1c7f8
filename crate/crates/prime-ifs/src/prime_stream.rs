//! Prime, twin-prime and k-tuple-center generation over arbitrary ranges
//! via a segmented sieve of Eratosthenes.
//!
//! Two range conventions exist side by side: an explicit value range
//! `[lo, hi]`, and "the first `count` primes at or above a start value".
//! Everything downstream records which convention produced its input, so
//! the two are never silently conflated.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest admissible sieve bound. Keeps `p * p` and segment arithmetic
/// comfortably inside u64.
pub const MAX_SIEVE_BOUND: u64 = 1 << 62;

/// Integers per sieve segment.
pub const SEGMENT_SIZE: u64 = 1 << 20;

/// How a prime range was selected.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PrimeRangeQuery {
    /// All primes p with lo <= p <= hi.
    ByValueRange { lo: u64, hi: u64 },
    /// The first `count` primes p >= start.
    ByCountFrom { start: u64, count: usize },
}

impl PrimeRangeQuery {
    pub fn validate(&self) -> Result<()> {
        match *self {
            PrimeRangeQuery::ByValueRange { lo, hi } => {
                if lo > hi {
                    return Err(Error::InvalidRange { lo, hi });
                }
                if hi > MAX_SIEVE_BOUND {
                    return Err(Error::Capacity(hi, MAX_SIEVE_BOUND));
                }
            }
            PrimeRangeQuery::ByCountFrom { start, .. } => {
                if start > MAX_SIEVE_BOUND {
                    return Err(Error::Capacity(start, MAX_SIEVE_BOUND));
                }
            }
        }
        Ok(())
    }

    pub fn convention(&self) -> RangeConvention {
        match *self {
            PrimeRangeQuery::ByValueRange { lo, hi } => RangeConvention::ValueRange { lo, hi },
            PrimeRangeQuery::ByCountFrom { start, count } => {
                RangeConvention::CountFrom { start, count }
            }
        }
    }
}

/// Serializable record of the convention a data set was produced under.
/// Carried through every frequency table and run manifest.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum RangeConvention {
    ValueRange {
        lo: u64,
        hi: u64,
    },
    CountFrom {
        start: u64,
        count: usize,
    },
    #[default]
    Unspecified,
}

/// Query for centers n such that n - d and n + d are both prime.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TupleCenterQuery {
    /// Offset d >= 1; d = 1 gives twin midpoints, d = 3 sexy midpoints.
    pub offset: u64,
    /// Range over the centers n themselves.
    pub query: PrimeRangeQuery,
}

/// Simple unsegmented sieve; used for base primes and as an oracle.
pub fn simple_sieve(limit: u64) -> Vec<u64> {
    if limit < 2 {
        return Vec::new();
    }
    let n = limit as usize;
    let mut composite = vec![false; n + 1];
    let mut primes = Vec::new();
    for i in 2..=n {
        if !composite[i] {
            primes.push(i as u64);
            let mut j = i * i;
            while j <= n {
                composite[j] = true;
                j += i;
            }
        }
    }
    primes
}

fn isqrt(n: u64) -> u64 {
    let mut r = (n as f64).sqrt() as u64;
    while r.saturating_mul(r) > n {
        r -= 1;
    }
    while (r + 1) * (r + 1) <= n {
        r += 1;
    }
    r
}

/// Sieve one segment [lo, hi] (inclusive) with the given base primes.
/// Base primes must cover sqrt(hi).
fn sieve_segment(base: &[u64], lo: u64, hi: u64) -> Vec<u64> {
    debug_assert!(lo <= hi);
    let len = (hi - lo + 1) as usize;
    let mut composite = vec![false; len];
    for &p in base {
        if p * p > hi {
            break;
        }
        let first = p.max(lo.div_ceil(p)) * p;
        let mut j = first.max(p * p);
        while j <= hi {
            composite[(j - lo) as usize] = true;
            j += p;
        }
    }
    let mut out = Vec::new();
    for (i, &c) in composite.iter().enumerate() {
        let v = lo + i as u64;
        if !c && v >= 2 {
            out.push(v);
        }
    }
    out
}

fn segment_ranges(lo: u64, hi: u64) -> Vec<(u64, u64)> {
    let mut ranges = Vec::new();
    let mut start = lo;
    while start <= hi {
        let end = hi.min(start + SEGMENT_SIZE - 1);
        ranges.push((start, end));
        start = end + 1;
    }
    ranges
}

/// All primes in [lo, hi], ascending. Segments are sieved in parallel
/// when the `parallel` feature is enabled; output order is identical
/// regardless of worker count.
pub fn primes_in_range(lo: u64, hi: u64) -> Result<Vec<u64>> {
    PrimeRangeQuery::ByValueRange { lo, hi }.validate()?;
    let base = simple_sieve(isqrt(hi));
    let ranges = segment_ranges(lo, hi);
    #[cfg(feature = "parallel")]
    let segments: Vec<Vec<u64>> = {
        use rayon::prelude::*;
        ranges
            .par_iter()
            .map(|&(a, b)| sieve_segment(&base, a, b))
            .collect()
    };
    #[cfg(not(feature = "parallel"))]
    let segments: Vec<Vec<u64>> = ranges
        .iter()
        .map(|&(a, b)| sieve_segment(&base, a, b))
        .collect();
    Ok(segments.concat())
}

/// Sequential reference path for [`primes_in_range`]; used by the bench
/// suite and the worker-count determinism tests.
pub fn primes_in_range_seq(lo: u64, hi: u64) -> Result<Vec<u64>> {
    PrimeRangeQuery::ByValueRange { lo, hi }.validate()?;
    let base = simple_sieve(isqrt(hi));
    let mut out = Vec::new();
    for (a, b) in segment_ranges(lo, hi) {
        out.extend(sieve_segment(&base, a, b));
    }
    Ok(out)
}

/// The first `count` primes >= start_value, ascending.
pub fn primes_from_count(start_value: u64, count: usize) -> Result<Vec<u64>> {
    PrimeRangeQuery::ByCountFrom {
        start: start_value,
        count,
    }
    .validate()?;
    let mut out = Vec::with_capacity(count);
    let mut lo = start_value.max(2);
    // Window width grows with the expected prime gap at this magnitude.
    let mut window = SEGMENT_SIZE.max(estimated_span(start_value, count));
    while out.len() < count {
        let hi = lo
            .checked_add(window - 1)
            .filter(|&h| h <= MAX_SIEVE_BOUND)
            .ok_or(Error::Capacity(lo.saturating_add(window), MAX_SIEVE_BOUND))?;
        out.extend(primes_in_range(lo, hi)?);
        lo = hi + 1;
        window = SEGMENT_SIZE * 4;
    }
    out.truncate(count);
    Ok(out)
}

fn estimated_span(start: u64, count: usize) -> u64 {
    let ln = (start.max(3) as f64).ln().max(2.0);
    ((count as f64) * (ln + 2.0)) as u64 + SEGMENT_SIZE
}

/// Primes selected by either convention.
pub fn primes(query: &PrimeRangeQuery) -> Result<Vec<u64>> {
    query.validate()?;
    match *query {
        PrimeRangeQuery::ByValueRange { lo, hi } => primes_in_range(lo, hi),
        PrimeRangeQuery::ByCountFrom { start, count } => primes_from_count(start, count),
    }
}

/// Twin prime pairs (p, p + 2), ordered by p.
///
/// Under `ByValueRange` a pair is included when p >= lo and p + 2 <= hi.
/// Under `ByCountFrom`, `count` bounds the number of pairs with p >= start.
pub fn twin_pairs(query: &PrimeRangeQuery) -> Result<Vec<(u64, u64)>> {
    query.validate()?;
    match *query {
        PrimeRangeQuery::ByValueRange { lo, hi } => {
            if hi < 2 {
                return Ok(Vec::new());
            }
            let ps = primes_in_range(lo, hi)?;
            Ok(ps
                .windows(2)
                .filter(|w| w[1] - w[0] == 2)
                .map(|w| (w[0], w[1]))
                .collect())
        }
        PrimeRangeQuery::ByCountFrom { start, count } => {
            let mut out = Vec::with_capacity(count);
            let mut lo = start.max(2);
            let mut window = SEGMENT_SIZE.max(estimated_span(start, count * 40));
            let mut prev: Option<u64> = None;
            while out.len() < count {
                let hi = lo
                    .checked_add(window - 1)
                    .filter(|&h| h <= MAX_SIEVE_BOUND)
                    .ok_or(Error::Capacity(lo.saturating_add(window), MAX_SIEVE_BOUND))?;
                for p in primes_in_range(lo, hi)? {
                    if let Some(q) = prev {
                        if p - q == 2 {
                            out.push((q, p));
                        }
                    }
                    prev = Some(p);
                }
                lo = hi + 1;
                window = SEGMENT_SIZE * 16;
            }
            out.truncate(count);
            Ok(out)
        }
    }
}

/// Centers n with n - d and n + d both prime, ascending.
pub fn tuple_centers(q: &TupleCenterQuery) -> Result<Vec<u64>> {
    if q.offset == 0 {
        return Err(Error::InvalidOffset);
    }
    q.query.validate()?;
    let d = q.offset;
    match q.query {
        PrimeRangeQuery::ByValueRange { lo, hi } => {
            if hi < d + 2 {
                return Ok(Vec::new());
            }
            let plo = lo.saturating_sub(d).max(2);
            let ps = primes_in_range(plo, hi + d)?;
            Ok(centers_from_primes(&ps, d)
                .into_iter()
                .filter(|&n| n >= lo && n <= hi)
                .collect())
        }
        PrimeRangeQuery::ByCountFrom { start, count } => {
            let mut out = Vec::with_capacity(count);
            let mut lo = start.saturating_sub(d).max(2);
            let mut window = SEGMENT_SIZE.max(estimated_span(start, count * 40));
            let mut carry: Vec<u64> = Vec::new();
            while out.len() < count {
                let hi = lo
                    .checked_add(window - 1)
                    .filter(|&h| h <= MAX_SIEVE_BOUND)
                    .ok_or(Error::Capacity(lo.saturating_add(window), MAX_SIEVE_BOUND))?;
                let mut ps = carry.clone();
                ps.extend(primes_in_range(lo, hi)?);
                // A partner prime can lie up to 2d past the window end, so
                // only emit centers whose partner is certainly inside.
                for n in centers_from_primes(&ps, d) {
                    if n + d <= hi && n >= start {
                        out.push(n);
                    }
                }
                carry = ps.into_iter().filter(|&p| p + 2 * d > hi).collect();
                lo = hi + 1;
                window = SEGMENT_SIZE * 16;
            }
            out.truncate(count);
            Ok(out)
        }
    }
}

fn centers_from_primes(primes: &[u64], d: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut j = 0usize;
    for (i, &p) in primes.iter().enumerate() {
        let target = p + 2 * d;
        if j < i + 1 {
            j = i + 1;
        }
        while j < primes.len() && primes[j] < target {
            j += 1;
        }
        if j < primes.len() && primes[j] == target {
            out.push(p + d);
        }
    }
    out
}
