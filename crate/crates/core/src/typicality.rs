//! Strong typicality for binary sequences and sequence pairs.
//!
//! A sequence of length n is ε-typical for a pmf P when every symbol's
//! empirical frequency N(a)/n is within ε of P(a). Pairs are checked the same
//! way against a joint pmf over the four symbol pairs.

use crate::error::{Error, Result};

/// Absolute slack added to every comparison so that frequencies sitting
/// exactly on the ε boundary are not lost to rounding in `k / n`.
pub const BOUNDARY_SLACK: f64 = 1e-12;

/// Longest block length accepted by [`typical_set_census`].
pub const CENSUS_MAX_LEN: usize = 24;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TypicalityParams {
    pub epsilon: f64,
    pub block_length: usize,
}

impl TypicalityParams {
    pub fn new(epsilon: f64, block_length: usize) -> Result<Self> {
        if epsilon.is_nan() || epsilon <= 0.0 {
            return Err(Error::param("epsilon", format!("{epsilon} must be positive")));
        }
        if block_length == 0 {
            return Err(Error::param("block_length", "must be at least 1"));
        }
        Ok(TypicalityParams {
            epsilon,
            block_length,
        })
    }
}

#[inline]
fn within(count: usize, n: usize, target: f64, epsilon: f64) -> bool {
    (count as f64 / n as f64 - target).abs() <= epsilon + BOUNDARY_SLACK
}

/// Typicality of a length-`n` sequence with `ones` ones against Bernoulli(`q`).
#[inline]
pub fn is_typical_count(ones: usize, n: usize, q: f64, epsilon: f64) -> bool {
    n > 0 && within(ones, n, q, epsilon) && within(n - ones, n, 1.0 - q, epsilon)
}

/// Joint typicality from pair counts `counts[a][b] = N(a, b)` against a joint
/// pmf indexed the same way.
#[inline]
pub fn is_jointly_typical_counts(
    counts: &[[usize; 2]; 2],
    joint: &[[f64; 2]; 2],
    epsilon: f64,
) -> bool {
    let n: usize = counts.iter().flatten().sum();
    n > 0
        && (0..2).all(|a| (0..2).all(|b| within(counts[a][b], n, joint[a][b], epsilon)))
}

pub fn is_typical(x: &[bool], q: f64, epsilon: f64) -> Result<bool> {
    if x.is_empty() {
        return Err(Error::param("x", "sequence must be non-empty"));
    }
    let ones = x.iter().filter(|&&b| b).count();
    Ok(is_typical_count(ones, x.len(), q, epsilon))
}

/// Whether `(u, y)` is jointly ε-typical for `joint[u][y]`, i.e. whether `u`
/// lies in the conditional typical set given `y`.
pub fn is_conditionally_typical(
    u: &[bool],
    y: &[bool],
    joint: &[[f64; 2]; 2],
    epsilon: f64,
) -> Result<bool> {
    if u.len() != y.len() {
        return Err(Error::param(
            "y",
            format!("length {} differs from u's length {}", y.len(), u.len()),
        ));
    }
    if u.is_empty() {
        return Err(Error::param("u", "sequences must be non-empty"));
    }
    Ok(is_jointly_typical_counts(&pair_counts(u, y), joint, epsilon))
}

/// `counts[a][b]` = number of positions with `u = a` and `y = b`.
pub fn pair_counts(u: &[bool], y: &[bool]) -> [[usize; 2]; 2] {
    let mut counts = [[0usize; 2]; 2];
    for (&a, &b) in u.iter().zip(y) {
        counts[a as usize][b as usize] += 1;
    }
    counts
}

/// Exact size and probability of a binary typical set.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Census {
    pub cardinality: u64,
    pub probability: f64,
}

pub(crate) fn binomial(n: usize, k: usize) -> u64 {
    let k = k.min(n - k);
    let mut acc: u64 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u64 / (i + 1) as u64;
    }
    acc
}

/// Counts A_ε^n for Bernoulli(`q`) one weight class at a time.
pub fn typical_set_census(n: usize, q: f64, epsilon: f64) -> Result<Census> {
    TypicalityParams::new(epsilon, n)?;
    crate::error::check_probability("q", q)?;
    if n > CENSUS_MAX_LEN {
        return Err(Error::param(
            "block_length",
            format!("{n} exceeds the exact-census cap of {CENSUS_MAX_LEN}"),
        ));
    }
    let mut cardinality = 0u64;
    let mut probability = 0.0;
    for k in 0..=n {
        if is_typical_count(k, n, q, epsilon) {
            let c = binomial(n, k);
            cardinality += c;
            probability += c as f64 * q.powi(k as i32) * (1.0 - q).powi((n - k) as i32);
        }
    }
    Ok(Census {
        cardinality,
        probability,
    })
}
