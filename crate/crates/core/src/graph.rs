//! Bipartite user/group membership graphs.
//!
//! A graph is stored one group at a time: each group owns a packed bitset
//! over users (its member list). Random graphs are generated lazily, group by
//! group, and every group draws from its own ChaCha stream selected by the
//! group index. Within a group, users are visited in ascending order and each
//! entry consumes exactly one 64-bit draw. A graph seed therefore pins every
//! entry, no matter which groups are touched first or whether the graph is
//! ever fully materialized.

use std::fmt::Write as _;
use std::sync::{Arc, OnceLock};

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{check_probability, Error, Result};

/// The random stream type used throughout the simulator.
pub type Stream = ChaCha8Rng;

/// Returns the stream that fills group `group` of a graph seeded with `seed`.
pub fn group_stream(seed: u64, group: usize) -> Stream {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(group as u64);
    rng
}

/// One Bernoulli(`p`) draw; always consumes exactly one `u64`.
#[inline]
pub(crate) fn bernoulli<R: RngCore + ?Sized>(rng: &mut R, p: f64) -> bool {
    rng.gen::<f64>() < p
}

/// Edge probability and per-edge observation noise of the attacker's copy.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GraphNoiseParams {
    pub p: f64,
    /// Probability that a true edge is missing from the observed graph.
    pub e1: f64,
    /// Probability that a non-edge shows up in the observed graph.
    pub e2: f64,
}

impl GraphNoiseParams {
    pub fn new(p: f64, e1: f64, e2: f64) -> Result<Self> {
        Ok(GraphNoiseParams {
            p: check_probability("p", p)?,
            e1: check_probability("e1", e1)?,
            e2: check_probability("e2", e2)?,
        })
    }

    pub fn noiseless(p: f64) -> Result<Self> {
        Self::new(p, 0.0, 0.0)
    }

    pub fn is_noiseless(&self) -> bool {
        self.e1 == 0.0 && self.e2 == 0.0
    }
}

/// Packed member set of a single group.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroupColumn {
    words: Vec<u64>,
    len: usize,
}

impl GroupColumn {
    pub fn empty(len: usize) -> Self {
        GroupColumn {
            words: vec![0; len.div_ceil(64)],
            len,
        }
    }

    pub fn full(len: usize) -> Self {
        let mut col = GroupColumn {
            words: vec![u64::MAX; len.div_ceil(64)],
            len,
        };
        col.clear_tail();
        col
    }

    fn clear_tail(&mut self) {
        let rem = self.len % 64;
        if rem != 0 {
            if let Some(last) = self.words.last_mut() {
                *last &= (1u64 << rem) - 1;
            }
        }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    #[inline]
    pub fn contains(&self, user: usize) -> bool {
        (self.words[user >> 6] >> (user & 63)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, user: usize, value: bool) {
        let mask = 1u64 << (user & 63);
        if value {
            self.words[user >> 6] |= mask;
        } else {
            self.words[user >> 6] &= !mask;
        }
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    /// Ascending indices of the members.
    pub fn iter_ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &word)| {
            let mut w = word;
            std::iter::from_fn(move || {
                if w == 0 {
                    return None;
                }
                let bit = w.trailing_zeros() as usize;
                w &= w - 1;
                Some(wi * 64 + bit)
            })
        })
    }

    pub fn intersect_with(&mut self, other: &GroupColumn) {
        debug_assert_eq!(self.len, other.len);
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a &= *b;
        }
    }

    pub fn subtract(&mut self, other: &GroupColumn) {
        debug_assert_eq!(self.len, other.len);
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a &= !*b;
        }
    }
}

#[derive(Debug)]
enum Origin {
    Random { p: f64, seed: u64 },
    Observed { parent: BipartiteGraph, e1: f64, e2: f64, seed: u64 },
    Explicit,
}

#[derive(Debug)]
struct Inner {
    num_users: usize,
    num_groups: usize,
    origin: Origin,
    columns: Vec<OnceLock<GroupColumn>>,
}

/// Membership graph between `num_users` users and `num_groups` groups.
///
/// Cheap to clone (shared handle) and immutable once built; lazily generated
/// groups are filled at most once and may be read from many threads.
#[derive(Clone, Debug)]
pub struct BipartiteGraph {
    inner: Arc<Inner>,
}

fn check_dims(m: usize, n: usize) -> Result<()> {
    if m == 0 {
        return Err(Error::param("num_users", "must be at least 1"));
    }
    if n == 0 {
        return Err(Error::param("num_groups", "must be at least 1"));
    }
    Ok(())
}

impl BipartiteGraph {
    fn with_origin(num_users: usize, num_groups: usize, origin: Origin) -> Self {
        BipartiteGraph {
            inner: Arc::new(Inner {
                num_users,
                num_groups,
                origin,
                columns: (0..num_groups).map(|_| OnceLock::new()).collect(),
            }),
        }
    }

    /// Random graph with i.i.d. Bernoulli(`p`) edges, fully determined by `seed`.
    pub fn random(num_users: usize, num_groups: usize, p: f64, seed: u64) -> Result<Self> {
        check_dims(num_users, num_groups)?;
        check_probability("p", p)?;
        Ok(Self::with_origin(
            num_users,
            num_groups,
            Origin::Random { p, seed },
        ))
    }

    /// Builds a graph from `rows[user][group]`.
    pub fn from_rows(rows: &[Vec<bool>]) -> Result<Self> {
        let m = rows.len();
        let n = rows.first().map_or(0, Vec::len);
        check_dims(m, n)?;
        if let Some(bad) = rows.iter().position(|r| r.len() != n) {
            return Err(Error::param(
                "rows",
                format!("row {bad} has {} entries, expected {n}", rows[bad].len()),
            ));
        }
        Ok(Self::from_fn(m, n, |i, j| rows[i][j]))
    }

    /// Builds a graph whose entry `(user, group)` is `f(user, group)`.
    pub fn from_fn(m: usize, n: usize, mut f: impl FnMut(usize, usize) -> bool) -> Self {
        let g = Self::with_origin(m, n, Origin::Explicit);
        for j in 0..n {
            let mut col = GroupColumn::empty(m);
            for i in 0..m {
                col.set(i, f(i, j));
            }
            g.inner.columns[j]
                .set(col)
                .expect("fresh graph has no materialized columns");
        }
        g
    }

    pub fn num_users(&self) -> usize {
        self.inner.num_users
    }

    pub fn num_groups(&self) -> usize {
        self.inner.num_groups
    }

    /// Whether two handles refer to the same underlying graph.
    pub fn same_as(&self, other: &BipartiteGraph) -> bool {
        Arc::ptr_eq(&self.inner, &other.inner)
    }

    /// Member set of `group`, generating it on first access.
    pub fn column(&self, group: usize) -> &GroupColumn {
        self.inner.columns[group].get_or_init(|| self.build_column(group))
    }

    fn build_column(&self, group: usize) -> GroupColumn {
        let m = self.inner.num_users;
        match &self.inner.origin {
            Origin::Random { p, seed } => {
                let mut rng = group_stream(*seed, group);
                let mut col = GroupColumn::empty(m);
                for i in 0..m {
                    if bernoulli(&mut rng, *p) {
                        col.set(i, true);
                    }
                }
                col
            }
            Origin::Observed {
                parent,
                e1,
                e2,
                seed,
            } => {
                let truth = parent.column(group);
                let mut rng = group_stream(*seed, group);
                let mut col = GroupColumn::empty(m);
                for i in 0..m {
                    let kept = if truth.contains(i) {
                        !bernoulli(&mut rng, *e1)
                    } else {
                        bernoulli(&mut rng, *e2)
                    };
                    if kept {
                        col.set(i, true);
                    }
                }
                col
            }
            Origin::Explicit => unreachable!("explicit graphs are materialized at construction"),
        }
    }

    #[inline]
    pub fn contains(&self, user: usize, group: usize) -> bool {
        self.column(group).contains(user)
    }

    /// Ascending member list of `group`.
    pub fn members(&self, group: usize) -> impl Iterator<Item = usize> + '_ {
        self.column(group).iter_ones()
    }

    /// Full group signature of `user`.
    pub fn row(&self, user: usize) -> Vec<bool> {
        (0..self.num_groups())
            .map(|j| self.contains(user, j))
            .collect()
    }

    /// Total number of edges; materializes every group.
    pub fn edge_count(&self) -> usize {
        (0..self.num_groups())
            .map(|j| self.column(j).count_ones())
            .sum()
    }

    /// Partial signature of `user` over `groups`, in the given order.
    pub fn signature(
        &self,
        user: usize,
        groups: &[usize],
        source: SignatureSource,
    ) -> Result<GroupSignature> {
        if user >= self.num_users() {
            return Err(Error::param(
                "user",
                format!("{user} out of range for {} users", self.num_users()),
            ));
        }
        if let Some(&bad) = groups.iter().find(|&&j| j >= self.num_groups()) {
            return Err(Error::param(
                "group",
                format!("{bad} out of range for {} groups", self.num_groups()),
            ));
        }
        Ok(GroupSignature {
            bits: groups.iter().map(|&j| self.contains(user, j)).collect(),
            owner: user,
            source,
        })
    }

    /// Parameters recorded in the dump header: `(p, seed)`.
    fn header_params(&self) -> (f64, u64) {
        match &self.inner.origin {
            Origin::Random { p, seed } => (*p, *seed),
            Origin::Observed { parent, seed, .. } => (parent.header_params().0, *seed),
            Origin::Explicit => {
                let total = (self.num_users() * self.num_groups()) as f64;
                (self.edge_count() as f64 / total, 0)
            }
        }
    }

    /// Plain-text dump: a `m n p seed` header, then one line of '0'/'1' per user.
    ///
    /// Explicit graphs have no generating parameters; they record the edge
    /// density as `p` and a zero seed.
    pub fn to_dump(&self) -> String {
        let (p, seed) = self.header_params();
        let mut out = String::with_capacity(self.num_users() * (self.num_groups() + 1) + 32);
        writeln!(out, "{} {} {} {}", self.num_users(), self.num_groups(), p, seed).unwrap();
        for i in 0..self.num_users() {
            for j in 0..self.num_groups() {
                out.push(if self.contains(i, j) { '1' } else { '0' });
            }
            out.push('\n');
        }
        out
    }

    /// Parses a dump produced by [`to_dump`](Self::to_dump). Returns the graph
    /// with the header's `p` and `seed`.
    pub fn from_dump(text: &str) -> Result<(Self, f64, u64)> {
        let mut lines = text.lines();
        let header = lines.next().ok_or(Error::Dump {
            line: 1,
            reason: "missing header".into(),
        })?;
        let fields: Vec<&str> = header.split_whitespace().collect();
        let bad_header = |reason: String| Error::Dump { line: 1, reason };
        if fields.len() != 4 {
            return Err(bad_header(format!("expected 4 fields, found {}", fields.len())));
        }
        let m: usize = fields[0].parse().map_err(|e| bad_header(format!("m: {e}")))?;
        let n: usize = fields[1].parse().map_err(|e| bad_header(format!("n: {e}")))?;
        let p: f64 = fields[2].parse().map_err(|e| bad_header(format!("p: {e}")))?;
        let seed: u64 = fields[3].parse().map_err(|e| bad_header(format!("seed: {e}")))?;

        let mut rows = Vec::with_capacity(m);
        for (k, line) in lines.enumerate() {
            let line_no = k + 2;
            if line.is_empty() {
                continue;
            }
            let row = line
                .chars()
                .map(|c| match c {
                    '0' => Ok(false),
                    '1' => Ok(true),
                    other => Err(Error::Dump {
                        line: line_no,
                        reason: format!("unexpected character {other:?}"),
                    }),
                })
                .collect::<Result<Vec<bool>>>()?;
            if row.len() != n {
                return Err(Error::Dump {
                    line: line_no,
                    reason: format!("expected {n} entries, found {}", row.len()),
                });
            }
            rows.push(row);
        }
        if rows.len() != m {
            return Err(Error::Dump {
                line: rows.len() + 2,
                reason: format!("expected {m} rows, found {}", rows.len()),
            });
        }
        Ok((Self::from_rows(&rows)?, p, seed))
    }
}

/// Where a signature was read from.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SignatureSource {
    TrueGraph,
    AttackerGraph,
    Response,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroupSignature {
    pub bits: Vec<bool>,
    pub owner: usize,
    pub source: SignatureSource,
}

impl GroupSignature {
    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }
}

/// Draws a graph seed from `rng` and returns the corresponding random graph.
pub fn generate_graph<R: RngCore + ?Sized>(
    m: usize,
    n: usize,
    p: f64,
    rng: &mut R,
) -> Result<BipartiteGraph> {
    check_dims(m, n)?;
    check_probability("p", p)?;
    let seed = rng.next_u64();
    BipartiteGraph::random(m, n, p, seed)
}

/// Passes every entry of `g0` through the per-edge channel `(e1, e2)`.
///
/// A noiseless channel returns a handle to `g0` itself.
pub fn observe_noisy<R: RngCore + ?Sized>(
    g0: &BipartiteGraph,
    params: &GraphNoiseParams,
    rng: &mut R,
) -> Result<BipartiteGraph> {
    let params = GraphNoiseParams::new(params.p, params.e1, params.e2)?;
    let seed = rng.next_u64();
    if params.is_noiseless() {
        return Ok(g0.clone());
    }
    Ok(BipartiteGraph::with_origin(
        g0.num_users(),
        g0.num_groups(),
        Origin::Observed {
            parent: g0.clone(),
            e1: params.e1,
            e2: params.e2,
            seed,
        },
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rng(seed: u64) -> Stream {
        Stream::seed_from_u64(seed)
    }

    #[test]
    fn extreme_edge_probabilities() {
        let g = generate_graph(3, 2, 0.0, &mut rng(1)).unwrap();
        assert_eq!(g.edge_count(), 0);
        let g = generate_graph(3, 2, 1.0, &mut rng(1)).unwrap();
        assert_eq!(g.edge_count(), 6);
    }

    #[test]
    fn zero_dimensions_rejected() {
        assert!(generate_graph(0, 2, 0.5, &mut rng(1)).is_err());
        assert!(generate_graph(2, 0, 0.5, &mut rng(1)).is_err());
        assert!(generate_graph(2, 2, 1.5, &mut rng(1)).is_err());
    }

    #[test]
    fn edge_count_within_three_sigma() {
        let g = generate_graph(1000, 100, 0.3, &mut rng(2024)).unwrap();
        let mean = 30_000.0;
        let sd = (1000.0 * 100.0 * 0.3 * 0.7f64).sqrt();
        let count = g.edge_count() as f64;
        assert!((count - mean).abs() <= 3.0 * sd, "count {count}");
    }

    #[test]
    fn noiseless_observation_is_identity() {
        let g0 = generate_graph(50, 20, 0.4, &mut rng(3)).unwrap();
        let g1 = observe_noisy(&g0, &GraphNoiseParams::noiseless(0.4).unwrap(), &mut rng(4)).unwrap();
        for j in 0..20 {
            assert_eq!(g0.column(j), g1.column(j));
        }
    }

    #[test]
    fn certain_deletion_empties_graph() {
        let g0 = BipartiteGraph::from_fn(5, 4, |_, _| true);
        let params = GraphNoiseParams::new(1.0, 1.0, 0.0).unwrap();
        let g1 = observe_noisy(&g0, &params, &mut rng(5)).unwrap();
        assert_eq!(g1.edge_count(), 0);
    }

    #[test]
    fn noisy_counts_match_binomial() {
        // 10^4 ones followed by 10^4 zeros in a single group.
        let g0 = BipartiteGraph::from_fn(20_000, 1, |i, _| i < 10_000);
        let params = GraphNoiseParams::new(0.5, 0.2, 0.05).unwrap();
        let g1 = observe_noisy(&g0, &params, &mut rng(6)).unwrap();
        let col = g1.column(0);
        let kept = (0..10_000).filter(|&i| col.contains(i)).count() as f64;
        let spurious = (10_000..20_000).filter(|&i| col.contains(i)).count() as f64;
        let sd_kept = (10_000.0 * 0.8 * 0.2f64).sqrt();
        let sd_spur = (10_000.0 * 0.05 * 0.95f64).sqrt();
        assert!((kept - 8000.0).abs() <= 3.0 * sd_kept, "kept {kept}");
        assert!((spurious - 500.0).abs() <= 3.0 * sd_spur, "spurious {spurious}");
    }

    #[test]
    fn signature_reads_adjacency() {
        let g = BipartiteGraph::from_rows(&[
            vec![true, false],
            vec![true, false],
            vec![false, true],
        ])
        .unwrap();
        let sig = g.signature(0, &[0, 1], SignatureSource::TrueGraph).unwrap();
        assert_eq!(sig.bits, vec![true, false]);
        let sig = g.signature(2, &[1, 0], SignatureSource::TrueGraph).unwrap();
        assert_eq!(sig.bits, vec![true, false]);
        assert!(g.signature(1, &[], SignatureSource::TrueGraph).unwrap().is_empty());
        assert!(g.signature(3, &[0], SignatureSource::TrueGraph).is_err());
        assert!(g.signature(0, &[2], SignatureSource::TrueGraph).is_err());
    }

    #[test]
    fn signature_matches_documented_generation_order() {
        let seed = 0xDEAD_BEEF;
        let g = BipartiteGraph::random(7, 10, 0.5, seed).unwrap();
        let groups: Vec<usize> = (0..10).collect();
        let sig = g.signature(0, &groups, SignatureSource::TrueGraph).unwrap();
        // Row 0 is the first draw of each group's stream.
        let expected: Vec<bool> = (0..10)
            .map(|j| group_stream(seed, j).gen::<f64>() < 0.5)
            .collect();
        assert_eq!(sig.bits, expected);
    }

    #[test]
    fn generation_is_independent_of_access_order() {
        let a = BipartiteGraph::random(100, 30, 0.3, 77).unwrap();
        let b = BipartiteGraph::random(100, 30, 0.3, 77).unwrap();
        let forward: Vec<_> = (0..30).map(|j| a.column(j).clone()).collect();
        let backward: Vec<_> = (0..30).rev().map(|j| b.column(j).clone()).collect();
        for j in 0..30 {
            assert_eq!(forward[j], backward[29 - j]);
        }
    }

    #[test]
    fn member_lists_agree_with_matrix() {
        let g = BipartiteGraph::random(130, 5, 0.4, 9).unwrap();
        for j in 0..5 {
            let members: Vec<usize> = g.members(j).collect();
            let expected: Vec<usize> = (0..130).filter(|&i| g.row(i)[j]).collect();
            assert_eq!(members, expected);
        }
    }

    #[test]
    fn dump_round_trip() {
        let g = BipartiteGraph::random(6, 9, 0.5, 42).unwrap();
        let text = g.to_dump();
        assert!(text.starts_with("6 9 0.5 42\n"));
        let (h, p, seed) = BipartiteGraph::from_dump(&text).unwrap();
        assert_eq!((p, seed), (0.5, 42));
        for i in 0..6 {
            assert_eq!(g.row(i), h.row(i));
        }
        assert!(BipartiteGraph::from_dump("2 2 0.5 1\n01\n0x\n").is_err());
        assert!(BipartiteGraph::from_dump("2 2 0.5 1\n01\n").is_err());
    }

    #[test]
    fn full_column_clears_tail() {
        let col = GroupColumn::full(70);
        assert_eq!(col.count_ones(), 70);
        assert_eq!(col.iter_ones().last(), Some(69));
    }
}
