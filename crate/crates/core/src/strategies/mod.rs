//! Attack strategies. Each drives a fresh [`AttackSession`] to termination.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};

use crate::channels::JointUYZ;
use crate::error::{Error, Result};
use crate::graph::{BipartiteGraph, GroupColumn, Stream};
use crate::oracle::AttackSession;

mod gis;
mod map;
mod schedule;
mod tss;

pub use gis::run_gis;
pub use map::run_map;
pub use schedule::{
    gis_default_nprime, map_default_nprime, map_uniqueness_nprime, tss_default_params,
    TssSchedule,
};
pub use tss::run_tss;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Strategy {
    Exhaustive,
    Gis,
    Map,
    Tss,
}

impl Strategy {
    pub const ALL: [Strategy; 4] = [
        Strategy::Exhaustive,
        Strategy::Gis,
        Strategy::Map,
        Strategy::Tss,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Strategy::Exhaustive => "exhaustive",
            Strategy::Gis => "gis",
            Strategy::Map => "map",
            Strategy::Tss => "tss",
        }
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Strategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Strategy::ALL
            .into_iter()
            .find(|st| st.name() == s)
            .ok_or_else(|| {
                Error::param(
                    "strategy",
                    format!("unknown strategy {s:?} (expected exhaustive, gis, map or tss)"),
                )
            })
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StrategyParams {
    /// GM queries per round.
    pub n_prime: usize,
    /// Typicality slack (TSS only).
    pub epsilon: Option<f64>,
    /// Maximum number of rounds (TSS only).
    pub rounds: Option<usize>,
    pub group_selection_seed: u64,
}

impl StrategyParams {
    pub fn new(n_prime: usize, group_selection_seed: u64) -> Self {
        StrategyParams {
            n_prime,
            epsilon: None,
            rounds: None,
            group_selection_seed,
        }
    }

    pub fn with_typicality(mut self, epsilon: f64, rounds: usize) -> Self {
        self.epsilon = Some(epsilon);
        self.rounds = Some(rounds);
        self
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AttackOutcome {
    pub total_q: usize,
    pub gm_q: usize,
    pub uid_q: usize,
    pub rounds_used: usize,
    /// Size of every ambiguity set the strategy formed, in order.
    pub ambiguity_size_per_round: Vec<usize>,
    pub fell_back_to_exhaustive: bool,
}

impl AttackOutcome {
    fn from_session(
        session: &AttackSession,
        rounds_used: usize,
        ambiguity_size_per_round: Vec<usize>,
        fell_back_to_exhaustive: bool,
    ) -> Self {
        debug_assert!(session.is_terminated());
        AttackOutcome {
            total_q: session.query_count(),
            gm_q: session.gm_count(),
            uid_q: session.uid_count(),
            rounds_used,
            ambiguity_size_per_round,
            fell_back_to_exhaustive,
        }
    }

    /// The first ambiguity set formed, or all `num_users` when none was.
    pub fn ambiguity_size(&self, num_users: usize) -> usize {
        self.ambiguity_size_per_round
            .first()
            .copied()
            .unwrap_or(num_users)
    }
}

/// The first `count` entries of a uniformly random permutation of `0..n`.
///
/// Partial Fisher-Yates, so a longer request extends a shorter one drawn from
/// the same seed.
pub fn select_groups(seed: u64, n: usize, count: usize) -> Vec<usize> {
    assert!(count <= n, "cannot select {count} of {n} groups");
    let mut rng = Stream::seed_from_u64(seed);
    let mut pool: Vec<usize> = (0..n).collect();
    for i in 0..count {
        let j = rng.gen_range(i..n);
        pool.swap(i, j);
    }
    pool.truncate(count);
    pool
}

fn ensure_fresh(session: &AttackSession) -> Result<()> {
    if session.query_count() != 0 || session.is_terminated() {
        return Err(Error::Protocol(
            "strategies must start from a fresh session".into(),
        ));
    }
    Ok(())
}

fn check_nprime(n_prime: usize, num_groups: usize) -> Result<()> {
    if n_prime > num_groups {
        return Err(Error::param(
            "n_prime",
            format!("{n_prime} exceeds the number of groups {num_groups}"),
        ));
    }
    Ok(())
}

/// UID queries that skip users already ruled out.
struct UidSearch {
    queried: GroupColumn,
}

impl UidSearch {
    fn new(num_users: usize) -> Self {
        UidSearch {
            queried: GroupColumn::empty(num_users),
        }
    }

    /// Queries `user` unless it was already asked; true on termination.
    fn try_user(&mut self, session: &mut AttackSession, user: usize) -> Result<bool> {
        if self.queried.contains(user) {
            return Ok(false);
        }
        self.queried.set(user, true);
        session.query_uid(user)
    }

    /// Queries every remaining user in ascending order until termination.
    fn exhaust(&mut self, session: &mut AttackSession) -> Result<()> {
        for user in 0..session.num_users() {
            if self.try_user(session, user)? {
                return Ok(());
            }
        }
        Err(Error::Protocol(
            "exhaustive search ended without identifying the victim".into(),
        ))
    }
}

/// Per-user agreement counts between attacker-graph signatures over `groups`
/// and the received `responses`: `(N(u=1, y=1), N(u=1, y=0))` per user.
fn signature_counts(
    g1: &BipartiteGraph,
    groups: &[usize],
    responses: &[bool],
) -> (Vec<u32>, Vec<u32>) {
    let m = g1.num_users();
    let mut ones_on_one = vec![0u32; m];
    let mut ones_on_zero = vec![0u32; m];
    for (&g, &y) in groups.iter().zip(responses) {
        let target = if y {
            &mut ones_on_one
        } else {
            &mut ones_on_zero
        };
        for i in g1.column(g).iter_ones() {
            target[i] += 1;
        }
    }
    (ones_on_one, ones_on_zero)
}

/// Full `[u][y]` pair counts for one user, given its `(N(1,1), N(1,0))` and
/// the response weights.
#[inline]
fn pair_counts(n11: u32, n10: u32, y_ones: usize, y_zeros: usize) -> [[usize; 2]; 2] {
    let (n11, n10) = (n11 as usize, n10 as usize);
    [[y_zeros - n10, y_ones - n11], [n10, n11]]
}

/// Queries every user in ascending order.
pub fn run_exhaustive(session: &mut AttackSession) -> Result<AttackOutcome> {
    ensure_fresh(session)?;
    UidSearch::new(session.num_users()).exhaust(session)?;
    Ok(AttackOutcome::from_session(session, 0, Vec::new(), true))
}

/// Runs `strategy` on a fresh session. `joint` is the attacker's noise model
/// and is only consulted by MAP and TSS.
pub fn run_strategy(
    strategy: Strategy,
    session: &mut AttackSession,
    params: &StrategyParams,
    joint: &JointUYZ,
) -> Result<AttackOutcome> {
    match strategy {
        Strategy::Exhaustive => run_exhaustive(session),
        Strategy::Gis => run_gis(session, params),
        Strategy::Map => run_map(session, params, joint),
        Strategy::Tss => run_tss(session, params, joint),
    }
}

#[cfg(test)]
pub(crate) mod test_support {
    use super::*;
    use crate::channels::BinaryChannel;

    /// Users u1, u2 in r1 only; u3 in r2 only.
    pub fn three_user_graph() -> BipartiteGraph {
        BipartiteGraph::from_rows(&[
            vec![true, false],
            vec![true, false],
            vec![false, true],
        ])
        .unwrap()
    }

    pub fn noiseless_session(g: &BipartiteGraph, victim: usize) -> AttackSession {
        AttackSession::with_victim(
            g.clone(),
            g.clone(),
            BinaryChannel::noiseless(),
            victim,
            Stream::seed_from_u64(0),
        )
        .unwrap()
    }

    pub fn noiseless_joint(p: f64) -> JointUYZ {
        crate::channels::build_joint(p, BinaryChannel::noiseless(), BinaryChannel::noiseless())
            .unwrap()
    }
}
