//! Typical set strategy.

use super::{
    ensure_fresh, pair_counts, select_groups, signature_counts, AttackOutcome, StrategyParams,
    UidSearch,
};
use crate::channels::JointUYZ;
use crate::error::{Error, Result};
use crate::oracle::AttackSession;
use crate::typicality::{is_jointly_typical_counts, is_typical_count};

/// Runs up to `rounds` rounds over disjoint blocks of `n_prime` random groups.
///
/// In each round the block is GM-queried. If the responses are not ε-typical
/// for P_Y the round ends. Otherwise every user whose attacker-graph
/// signature over the block is jointly ε-typical with the responses under
/// P_{U,Y} enters the ambiguity set, which is UID-queried in ascending order.
/// Users already ruled out in an earlier round are not asked again. When the
/// rounds (or the groups) run out, the remaining users are searched
/// exhaustively.
pub fn run_tss(
    session: &mut AttackSession,
    params: &StrategyParams,
    joint: &JointUYZ,
) -> Result<AttackOutcome> {
    ensure_fresh(session)?;
    let epsilon = params
        .epsilon
        .ok_or_else(|| Error::param("epsilon", "required by tss"))?;
    let rounds = params
        .rounds
        .ok_or_else(|| Error::param("rounds", "required by tss"))?;
    if epsilon.is_nan() || epsilon <= 0.0 {
        return Err(Error::param("epsilon", format!("{epsilon} must be positive")));
    }
    if params.n_prime == 0 {
        return Err(Error::param("n_prime", "tss needs at least one query per round"));
    }

    let g1 = session.attacker_graph().clone();
    let m = g1.num_users();
    let n_prime = params.n_prime;
    let wanted = rounds.saturating_mul(n_prime).min(g1.num_groups());
    let order = select_groups(params.group_selection_seed, g1.num_groups(), wanted);

    let p_y1 = joint.p_y1();
    let uy = joint.uy_marginal();
    let mut search = UidSearch::new(m);
    let mut sizes = Vec::new();
    let mut rounds_used = 0;

    for block in order.chunks_exact(n_prime).take(rounds) {
        rounds_used += 1;
        let responses = block
            .iter()
            .map(|&g| session.query_gm(g))
            .collect::<Result<Vec<bool>>>()?;
        let y_ones = responses.iter().filter(|&&y| y).count();
        let y_zeros = n_prime - y_ones;
        if !is_typical_count(y_ones, n_prime, p_y1, epsilon) {
            continue;
        }

        let (n11, n10) = signature_counts(&g1, block, &responses);
        let candidates: Vec<usize> = (0..m)
            .filter(|&i| {
                is_jointly_typical_counts(&pair_counts(n11[i], n10[i], y_ones, y_zeros), &uy, epsilon)
            })
            .collect();
        sizes.push(candidates.len());
        for user in candidates {
            if search.try_user(session, user)? {
                return Ok(AttackOutcome::from_session(session, rounds_used, sizes, false));
            }
        }
    }

    search.exhaust(session)?;
    Ok(AttackOutcome::from_session(session, rounds_used, sizes, true))
}
