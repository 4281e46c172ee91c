//! Exact expected query counts for tiny noiseless instances.
//!
//! Kept deliberately separate from the strategy code: graphs are plain
//! boolean matrices, every strategy is re-traced from its definition, and the
//! expectation is a weighted sum over all `2^(m n)` graphs and all victims.
//! Groups are taken in index order; since the columns of a random graph are
//! i.i.d., this has the same expectation as a random selection.

use crate::error::{Error, Result};
use crate::strategies::Strategy;
use crate::typicality::BOUNDARY_SLACK;

pub const TINY_MAX_USERS: usize = 4;
pub const TINY_MAX_GROUPS: usize = 3;
pub const TINY_MAX_CELLS: usize = 12;

type Rows = Vec<Vec<bool>>;

fn close(count: usize, len: usize, prob: f64, eps: f64) -> bool {
    (count as f64 / len as f64 - prob).abs() <= eps + BOUNDARY_SLACK
}

/// UID-queries `order` (skipping repeats), then everyone else ascending.
/// Returns the number of UID queries until the victim is named.
fn uid_queries(order: &[usize], m: usize, victim: usize) -> usize {
    let mut asked = vec![false; m];
    let mut q = 0;
    for &u in order.iter().chain(&(0..m).collect::<Vec<_>>()) {
        if asked[u] {
            continue;
        }
        asked[u] = true;
        q += 1;
        if u == victim {
            return q;
        }
    }
    unreachable!("victim is always reached")
}

fn trace_gis(rows: &Rows, victim: usize, n_prime: usize) -> usize {
    let m = rows.len();
    let set: Vec<usize> = (0..m)
        .filter(|&u| (0..n_prime).all(|g| !rows[victim][g] || rows[u][g]))
        .collect();
    n_prime + uid_queries(&set, m, victim)
}

fn trace_map(rows: &Rows, victim: usize, n_prime: usize) -> usize {
    // Noiseless: the posterior is uniform over exact signature matches.
    let m = rows.len();
    let set: Vec<usize> = (0..m)
        .filter(|&u| (0..n_prime).all(|g| rows[u][g] == rows[victim][g]))
        .collect();
    n_prime + uid_queries(&set, m, victim)
}

fn trace_tss(rows: &Rows, victim: usize, p: f64, n_prime: usize, eps: f64, rounds: usize) -> usize {
    let m = rows.len();
    let n = rows[0].len();
    let blocks = rounds.min(n / n_prime);
    let mut order = Vec::new();
    for r in 0..blocks {
        let block = r * n_prime..(r + 1) * n_prime;
        let y: Vec<bool> = block.clone().map(|g| rows[victim][g]).collect();
        let ones = y.iter().filter(|&&b| b).count();
        if !(close(ones, n_prime, p, eps) && close(n_prime - ones, n_prime, 1.0 - p, eps)) {
            continue;
        }
        let before = order.len();
        for u in 0..m {
            let mut counts = [[0usize; 2]; 2];
            for (k, g) in block.clone().enumerate() {
                counts[rows[u][g] as usize][y[k] as usize] += 1;
            }
            let target = [[1.0 - p, 0.0], [0.0, p]];
            let typical = (0..2).all(|a| (0..2).all(|b| close(counts[a][b], n_prime, target[a][b], eps)));
            if typical {
                order.push(u);
            }
        }
        if order[before..].contains(&victim) {
            // The victim is named in this round; later rounds never happen.
            let gm = (r + 1) * n_prime;
            let prefix = order.iter().position(|&u| u == victim).unwrap() + 1;
            return gm + uid_queries(&order[..prefix], m, victim);
        }
    }
    blocks * n_prime + uid_queries(&order, m, victim)
}

/// Exact `E[Q]` for a noiseless instance with `m <= 4` users, `n <= 3`
/// groups and `m n <= 12`. `epsilon` and `rounds` are used by TSS only.
pub fn exact_tiny_oracle(
    strategy: Strategy,
    m: usize,
    n: usize,
    p: f64,
    n_prime: usize,
    epsilon: Option<f64>,
    rounds: Option<usize>,
) -> Result<f64> {
    if m == 0 || m > TINY_MAX_USERS || n == 0 || n > TINY_MAX_GROUPS || m * n > TINY_MAX_CELLS {
        return Err(Error::param(
            "size",
            format!("tiny oracle needs 1 <= m <= {TINY_MAX_USERS}, 1 <= n <= {TINY_MAX_GROUPS}, got m={m}, n={n}"),
        ));
    }
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::param("p", format!("{p} is not a probability")));
    }
    if strategy != Strategy::Exhaustive && n_prime > n {
        return Err(Error::param("nprime", format!("{n_prime} exceeds {n} groups")));
    }
    let typicality = match strategy {
        Strategy::Tss => {
            let eps = epsilon.ok_or_else(|| Error::param("epsilon", "required by tss"))?;
            let l = rounds.ok_or_else(|| Error::param("rounds", "required by tss"))?;
            if n_prime == 0 {
                return Err(Error::param("nprime", "tss needs at least one query per round"));
            }
            Some((eps, l))
        }
        _ => None,
    };

    let cells = m * n;
    let mut expected = 0.0;
    for mask in 0u32..(1 << cells) {
        let rows: Rows = (0..m)
            .map(|i| (0..n).map(|j| mask >> (i * n + j) & 1 == 1).collect())
            .collect();
        let ones = mask.count_ones() as i32;
        let weight = p.powi(ones) * (1.0 - p).powi(cells as i32 - ones);
        if weight == 0.0 {
            continue;
        }
        let total: usize = (0..m)
            .map(|victim| match strategy {
                Strategy::Exhaustive => victim + 1,
                Strategy::Gis => trace_gis(&rows, victim, n_prime),
                Strategy::Map => trace_map(&rows, victim, n_prime),
                Strategy::Tss => {
                    let (eps, l) = typicality.unwrap();
                    trace_tss(&rows, victim, p, n_prime, eps, l)
                }
            })
            .sum();
        expected += weight * total as f64 / m as f64;
    }
    Ok(expected)
}
