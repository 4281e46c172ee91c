//! The query protocol between an attacker and the network.
//!
//! A session hides the true graph and the victim. Strategies see the
//! attacker's graph and may ask two kinds of questions: group-membership (GM)
//! queries, answered through the noisy response channel, and user-identity
//! (UID) queries, answered exactly. The session ends on the first UID query
//! that names the victim.

use std::fmt::{self, Write as _};

use rand::Rng;

use crate::channels::BinaryChannel;
use crate::error::{Error, Result};
use crate::graph::{bernoulli, BipartiteGraph, Stream};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Query {
    GroupMembership(usize),
    UserId(usize),
}

impl fmt::Display for Query {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Query::GroupMembership(g) => write!(f, "GM {g}"),
            Query::UserId(u) => write!(f, "UID {u}"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TranscriptEntry {
    pub query: Query,
    /// Noiseless answer.
    pub truth: bool,
    /// Answer actually delivered to the attacker.
    pub response: bool,
}

pub struct AttackSession {
    g0: BipartiteGraph,
    g1: BipartiteGraph,
    victim: usize,
    channel: BinaryChannel,
    rng: Stream,
    transcript: Vec<TranscriptEntry>,
    gm_count: usize,
    uid_count: usize,
    terminated: bool,
}

impl fmt::Debug for AttackSession {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("AttackSession")
            .field("users", &self.g1.num_users())
            .field("groups", &self.g1.num_groups())
            .field("queries", &self.transcript.len())
            .field("terminated", &self.terminated)
            .finish_non_exhaustive()
    }
}

impl AttackSession {
    /// Opens a session. The victim is the first draw from `rng`; the stream
    /// then supplies response noise in transcript order.
    pub fn new(
        g0: BipartiteGraph,
        g1: BipartiteGraph,
        channel: BinaryChannel,
        mut rng: Stream,
    ) -> Result<Self> {
        check_same_shape(&g0, &g1)?;
        let victim = rng.gen_range(0..g0.num_users());
        Self::with_victim(g0, g1, channel, victim, rng)
    }

    /// Opens a session with a chosen victim.
    pub fn with_victim(
        g0: BipartiteGraph,
        g1: BipartiteGraph,
        channel: BinaryChannel,
        victim: usize,
        rng: Stream,
    ) -> Result<Self> {
        check_same_shape(&g0, &g1)?;
        if victim >= g0.num_users() {
            return Err(Error::param(
                "victim",
                format!("{victim} out of range for {} users", g0.num_users()),
            ));
        }
        let channel = BinaryChannel::new(channel.p10, channel.p01)?;
        Ok(AttackSession {
            g0,
            g1,
            victim,
            channel,
            rng,
            transcript: Vec::new(),
            gm_count: 0,
            uid_count: 0,
            terminated: false,
        })
    }

    /// The attacker's view of the network.
    pub fn attacker_graph(&self) -> &BipartiteGraph {
        &self.g1
    }

    pub fn num_users(&self) -> usize {
        self.g1.num_users()
    }

    pub fn num_groups(&self) -> usize {
        self.g1.num_groups()
    }

    pub fn response_channel(&self) -> BinaryChannel {
        self.channel
    }

    fn ensure_open(&self) -> Result<()> {
        if self.terminated {
            Err(Error::Protocol(
                "session already terminated; no further queries allowed".into(),
            ))
        } else {
            Ok(())
        }
    }

    /// Asks whether the victim belongs to `group`; the answer is noisy.
    pub fn query_gm(&mut self, group: usize) -> Result<bool> {
        self.ensure_open()?;
        if group >= self.g0.num_groups() {
            return Err(Error::param(
                "group",
                format!("{group} out of range for {} groups", self.g0.num_groups()),
            ));
        }
        let truth = self.g0.contains(self.victim, group);
        let flip = if truth {
            self.channel.p10
        } else {
            self.channel.p01
        };
        let response = truth ^ bernoulli(&mut self.rng, flip);
        self.transcript.push(TranscriptEntry {
            query: Query::GroupMembership(group),
            truth,
            response,
        });
        self.gm_count += 1;
        Ok(response)
    }

    /// Asks whether the victim is `user`; answered exactly.
    pub fn query_uid(&mut self, user: usize) -> Result<bool> {
        self.ensure_open()?;
        if user >= self.g0.num_users() {
            return Err(Error::param(
                "user",
                format!("{user} out of range for {} users", self.g0.num_users()),
            ));
        }
        let hit = user == self.victim;
        self.transcript.push(TranscriptEntry {
            query: Query::UserId(user),
            truth: hit,
            response: hit,
        });
        self.uid_count += 1;
        self.terminated = hit;
        Ok(hit)
    }

    pub fn query(&mut self, query: Query) -> Result<bool> {
        match query {
            Query::GroupMembership(g) => self.query_gm(g),
            Query::UserId(u) => self.query_uid(u),
        }
    }

    /// Total number of queries so far (Q once terminated).
    pub fn query_count(&self) -> usize {
        self.transcript.len()
    }

    pub fn gm_count(&self) -> usize {
        self.gm_count
    }

    pub fn uid_count(&self) -> usize {
        self.uid_count
    }

    pub fn is_terminated(&self) -> bool {
        self.terminated
    }

    pub fn transcript(&self) -> &[TranscriptEntry] {
        &self.transcript
    }

    /// The victim, revealed only once the session has terminated.
    pub fn revealed_victim(&self) -> Option<usize> {
        self.terminated.then_some(self.victim)
    }

    /// One line per query: `t kind index z y`, with `t` starting at 1.
    pub fn transcript_dump(&self) -> String {
        let mut out = String::new();
        for (t, e) in self.transcript.iter().enumerate() {
            let (kind, index) = match e.query {
                Query::GroupMembership(g) => ("GM", g),
                Query::UserId(u) => ("UID", u),
            };
            writeln!(
                out,
                "{} {} {} {} {}",
                t + 1,
                kind,
                index,
                e.truth as u8,
                e.response as u8
            )
            .unwrap();
        }
        out
    }
}

fn check_same_shape(g0: &BipartiteGraph, g1: &BipartiteGraph) -> Result<()> {
    if g0.num_users() != g1.num_users() || g0.num_groups() != g1.num_groups() {
        return Err(Error::param(
            "g1",
            format!(
                "shape {}x{} differs from true graph {}x{}",
                g1.num_users(),
                g1.num_groups(),
                g0.num_users(),
                g0.num_groups()
            ),
        ));
    }
    Ok(())
}
