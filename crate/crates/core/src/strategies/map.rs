//! Maximum a posteriori strategy.

use super::{
    check_nprime, ensure_fresh, pair_counts, select_groups, signature_counts, AttackOutcome,
    StrategyParams, UidSearch,
};
use crate::channels::JointUYZ;
use crate::error::Result;
use crate::oracle::AttackSession;

/// log2 P(y | u) through the hidden true bit, indexed `[u][y]`.
pub(crate) fn log_likelihoods(joint: &JointUYZ) -> [[f64; 2]; 2] {
    let mut ll = [[f64::NEG_INFINITY; 2]; 2];
    for (u, row) in ll.iter_mut().enumerate() {
        for (y, cell) in row.iter_mut().enumerate() {
            if let Some(prob) = joint.response_given_attacker_bit(y == 1, u == 1) {
                if prob > 0.0 {
                    *cell = prob.log2();
                }
            }
        }
    }
    ll
}

#[inline]
fn score(counts: &[[usize; 2]; 2], ll: &[[f64; 2]; 2]) -> f64 {
    let mut s = 0.0;
    for u in 0..2 {
        for y in 0..2 {
            if counts[u][y] > 0 {
                s += counts[u][y] as f64 * ll[u][y];
            }
        }
    }
    s
}

/// Queries `n_prime` random groups, scores every user by the log-likelihood
/// of the responses given its attacker-graph signature (uniform prior, so
/// this orders by posterior), then UID-queries users by decreasing score with
/// ties in ascending index. Users of zero posterior come last, in ascending
/// order. The ambiguity set is the set of users with non-zero posterior.
pub fn run_map(
    session: &mut AttackSession,
    params: &StrategyParams,
    joint: &JointUYZ,
) -> Result<AttackOutcome> {
    ensure_fresh(session)?;
    let g1 = session.attacker_graph().clone();
    let m = g1.num_users();
    check_nprime(params.n_prime, g1.num_groups())?;

    let groups = select_groups(params.group_selection_seed, g1.num_groups(), params.n_prime);
    let responses = groups
        .iter()
        .map(|&g| session.query_gm(g))
        .collect::<Result<Vec<bool>>>()?;
    let y_ones = responses.iter().filter(|&&y| y).count();
    let y_zeros = responses.len() - y_ones;

    let (n11, n10) = signature_counts(&g1, &groups, &responses);
    let ll = log_likelihoods(joint);
    let scores: Vec<f64> = (0..m)
        .map(|i| score(&pair_counts(n11[i], n10[i], y_ones, y_zeros), &ll))
        .collect();

    let mut ranked: Vec<usize> = (0..m).filter(|&i| scores[i].is_finite()).collect();
    // Stable sort keeps ascending index among equal scores.
    ranked.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]));
    let size = ranked.len();

    let mut search = UidSearch::new(m);
    for &user in &ranked {
        if search.try_user(session, user)? {
            return Ok(AttackOutcome::from_session(session, 1, vec![size], false));
        }
    }
    search.exhaust(session)?;
    Ok(AttackOutcome::from_session(session, 1, vec![size], true))
}
