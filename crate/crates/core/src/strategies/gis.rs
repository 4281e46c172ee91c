//! Group intersection strategy.

use super::{check_nprime, ensure_fresh, select_groups, AttackOutcome, StrategyParams, UidSearch};
use crate::error::Result;
use crate::graph::GroupColumn;
use crate::oracle::AttackSession;

/// Queries `n_prime` random groups, intersects the attacker-graph member lists
/// of the groups that answered yes, then UID-queries the intersection in
/// ascending order. With no positive answer the intersection is every user.
/// If the victim is not in the intersection (only possible under noise) the
/// remaining users are searched exhaustively.
pub fn run_gis(session: &mut AttackSession, params: &StrategyParams) -> Result<AttackOutcome> {
    ensure_fresh(session)?;
    let g1 = session.attacker_graph().clone();
    check_nprime(params.n_prime, g1.num_groups())?;

    let groups = select_groups(params.group_selection_seed, g1.num_groups(), params.n_prime);
    let mut candidates = GroupColumn::full(g1.num_users());
    for &g in &groups {
        if session.query_gm(g)? {
            candidates.intersect_with(g1.column(g));
        }
    }
    let size = candidates.count_ones();

    let mut search = UidSearch::new(g1.num_users());
    for user in candidates.iter_ones() {
        if search.try_user(session, user)? {
            return Ok(AttackOutcome::from_session(session, 1, vec![size], false));
        }
    }
    search.exhaust(session)?;
    Ok(AttackOutcome::from_session(session, 1, vec![size], true))
}

#[cfg(test)]
mod tests {
    use super::super::test_support::*;
    use super::*;
    use crate::channels::BinaryChannel;
    use crate::graph::{BipartiteGraph, GraphNoiseParams, Stream};
    use rand::SeedableRng;

    #[test]
    fn hand_trace_three_users() {
        let g = three_user_graph();
        let mut s = noiseless_session(&g, 0);
        let out = run_gis(&mut s, &StrategyParams::new(2, 1)).unwrap();
        assert_eq!(out.ambiguity_size_per_round, vec![2]);
        assert_eq!((out.total_q, out.gm_q, out.uid_q), (3, 2, 1));
        assert!(!out.fell_back_to_exhaustive);
    }

    #[test]
    fn no_positive_answer_keeps_everyone() {
        // Victim 4 belongs to no group.
        let g = BipartiteGraph::from_fn(5, 3, |i, _| i != 4);
        let mut s = noiseless_session(&g, 4);
        let out = run_gis(&mut s, &StrategyParams::new(3, 9)).unwrap();
        assert_eq!(out.ambiguity_size_per_round, vec![5]);
        assert_eq!(out.total_q, 3 + 5);
    }

    #[test]
    fn nprime_above_group_count_rejected() {
        let g = three_user_graph();
        let mut s = noiseless_session(&g, 0);
        assert!(run_gis(&mut s, &StrategyParams::new(3, 0)).is_err());
    }

    #[test]
    fn falls_back_when_noise_hides_victim() {
        // The victim is in every true group but missing from every group of
        // the attacker's graph; everybody else is present.
        let g0 = BipartiteGraph::from_fn(6, 4, |_, _| true);
        let g1 = BipartiteGraph::from_fn(6, 4, |i, _| i != 2);
        let mut s = AttackSession::with_victim(g0, g1, BinaryChannel::noiseless(), 2, Stream::seed_from_u64(0)).unwrap();
        let out = run_gis(&mut s, &StrategyParams::new(4, 0)).unwrap();
        assert!(out.fell_back_to_exhaustive);
        assert_eq!(out.ambiguity_size_per_round, vec![5]);
        // 4 GM, 5 misses in the intersection, then user 2 (0 and 1 already asked).
        assert_eq!(out.total_q, 4 + 5 + 1);
        assert_eq!(s.transcript().last().unwrap().query, crate::oracle::Query::UserId(2));
    }

    #[test]
    fn always_terminates_under_heavy_noise() {
        let g0 = BipartiteGraph::random(40, 30, 0.4, 5).unwrap();
        let params = GraphNoiseParams::new(0.4, 0.3, 0.2).unwrap();
        let g1 = crate::graph::observe_noisy(&g0, &params, &mut Stream::seed_from_u64(1)).unwrap();
        let channel = BinaryChannel::new(0.3, 0.3).unwrap();
        for seed in 0..200 {
            let mut s = AttackSession::new(g0.clone(), g1.clone(), channel, Stream::seed_from_u64(seed)).unwrap();
            let out = run_gis(&mut s, &StrategyParams::new(10, seed)).unwrap();
            assert!(s.is_terminated());
            assert_eq!(out.total_q, out.gm_q + out.uid_q);
            assert!(out.total_q <= 10 + 40);
        }
    }
}
