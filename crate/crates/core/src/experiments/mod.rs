//! Monte Carlo estimation of the expected query count, closed forms, and an
//! exact enumeration oracle for tiny instances.
//!
//! Every trial of a cell draws a fresh true graph, a fresh attacker graph, a
//! fresh victim and a fresh group selection, each from its own substream of
//! a per-trial seed (see [`seeds::SEED_SCHEME`]). Trials run in parallel in
//! fixed-size chunks whose moments are merged in chunk order, so a cell's
//! statistics depend only on its configuration.

use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::channels::{build_joint, mutual_information_uy, BinaryChannel, JointUYZ};
use crate::error::{check_probability, Error, Result};
use crate::graph::{generate_graph, observe_noisy, BipartiteGraph, GraphNoiseParams};
use crate::oracle::{AttackSession, Query};
use crate::strategies::{
    gis_default_nprime, map_default_nprime, map_uniqueness_nprime, run_strategy,
    tss_default_params, Strategy, StrategyParams,
};

pub mod seeds;
pub mod stats;
mod tiny;

pub use stats::{Moments, Summary};
pub use tiny::{exact_tiny_oracle, TINY_MAX_CELLS, TINY_MAX_GROUPS, TINY_MAX_USERS};

use seeds::{selection_seed, substream, trial_seed, Substream, FIXED_GRAPH_TRIAL};

/// Edge probability plus the graph-observation and response channels.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NoiseModel {
    pub p: f64,
    pub e1: f64,
    pub e2: f64,
    pub f1: f64,
    pub f2: f64,
}

impl NoiseModel {
    pub fn noiseless(p: f64) -> Self {
        NoiseModel {
            p,
            e1: 0.0,
            e2: 0.0,
            f1: 0.0,
            f2: 0.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        check_probability("p", self.p)?;
        check_probability("e1", self.e1)?;
        check_probability("e2", self.e2)?;
        check_probability("f1", self.f1)?;
        check_probability("f2", self.f2)?;
        Ok(())
    }

    pub fn is_noiseless(&self) -> bool {
        self.e1 == 0.0 && self.e2 == 0.0 && self.f1 == 0.0 && self.f2 == 0.0
    }

    pub fn graph_params(&self) -> Result<GraphNoiseParams> {
        GraphNoiseParams::new(self.p, self.e1, self.e2)
    }

    pub fn graph_channel(&self) -> Result<BinaryChannel> {
        BinaryChannel::new(self.e1, self.e2)
    }

    pub fn response_channel(&self) -> Result<BinaryChannel> {
        BinaryChannel::new(self.f1, self.f2)
    }

    pub fn joint(&self) -> Result<JointUYZ> {
        build_joint(self.p, self.graph_channel()?, self.response_channel()?)
    }
}

/// One experiment cell: a strategy at fixed dimensions and noise.
#[derive(Clone, Debug, PartialEq)]
pub struct CellConfig {
    pub strategy: Strategy,
    pub m: usize,
    pub n: usize,
    pub model: NoiseModel,
    pub n_prime: Option<usize>,
    pub epsilon: Option<f64>,
    pub rounds: Option<usize>,
    pub trials: usize,
    pub master_seed: u64,
    pub confidence: f64,
    /// Draw the graphs once per cell instead of once per trial.
    pub fixed_graph: bool,
    /// Record wall-clock time in the report (makes output non-reproducible).
    pub timing: bool,
}

impl CellConfig {
    pub fn new(strategy: Strategy, m: usize, n: usize, model: NoiseModel) -> Self {
        CellConfig {
            strategy,
            m,
            n,
            model,
            n_prime: None,
            epsilon: None,
            rounds: None,
            trials: 1000,
            master_seed: 0,
            confidence: 0.95,
            fixed_graph: false,
            timing: false,
        }
    }

    pub fn with_trials(mut self, trials: usize) -> Self {
        self.trials = trials;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.master_seed = seed;
        self
    }

    pub fn with_nprime(mut self, n_prime: usize) -> Self {
        self.n_prime = Some(n_prime);
        self
    }

    pub fn with_typicality(mut self, epsilon: f64, rounds: usize) -> Self {
        self.epsilon = Some(epsilon);
        self.rounds = Some(rounds);
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.m == 0 {
            return Err(Error::param("users", "must be at least 1"));
        }
        if self.n == 0 {
            return Err(Error::param("groups", "must be at least 1"));
        }
        if self.trials == 0 {
            return Err(Error::param("trials", "must be at least 1"));
        }
        if !(self.confidence > 0.0 && self.confidence < 1.0) {
            return Err(Error::param(
                "confidence",
                format!("{} must lie in (0,1)", self.confidence),
            ));
        }
        if let Some(np) = self.n_prime {
            if np > self.n {
                return Err(Error::param(
                    "nprime",
                    format!("{np} exceeds the number of groups {}", self.n),
                ));
            }
        }
        if let Some(eps) = self.epsilon {
            if eps.is_nan() || eps <= 0.0 {
                return Err(Error::param("epsilon", format!("{eps} must be positive")));
            }
        }
        if self.rounds == Some(0) {
            return Err(Error::param("rounds", "must be at least 1"));
        }
        self.model.validate()
    }
}

/// Budget actually used by a cell after defaults are filled in.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ResolvedParams {
    pub n_prime: usize,
    pub epsilon: Option<f64>,
    pub rounds: Option<usize>,
}

/// Fills in default budgets: the GIS and MAP defaults (clamped to `[1, n]`)
/// and the TSS schedule for any of n', ε, l left unset.
pub fn resolve_params(cfg: &CellConfig, joint: &JointUYZ) -> Result<ResolvedParams> {
    cfg.validate()?;
    let clamp = |x: usize| x.clamp(1, cfg.n);
    let resolved = match cfg.strategy {
        Strategy::Exhaustive => ResolvedParams {
            n_prime: 0,
            epsilon: None,
            rounds: None,
        },
        Strategy::Gis => ResolvedParams {
            n_prime: match cfg.n_prime {
                Some(np) => np,
                None => clamp(gis_default_nprime(cfg.m, cfg.model.p)?),
            },
            epsilon: None,
            rounds: None,
        },
        Strategy::Map => ResolvedParams {
            n_prime: match cfg.n_prime {
                Some(np) => np,
                None => clamp(map_default_nprime(cfg.m, cfg.model.p)?),
            },
            epsilon: None,
            rounds: None,
        },
        Strategy::Tss => {
            let (n_prime, epsilon, rounds) = match (cfg.n_prime, cfg.epsilon, cfg.rounds) {
                (Some(np), Some(eps), Some(l)) => (np, eps, l),
                (np, eps, l) => {
                    let s = tss_default_params(cfg.m, joint)?;
                    (
                        np.unwrap_or_else(|| clamp(s.n_prime)),
                        eps.unwrap_or(s.epsilon),
                        l.unwrap_or(s.rounds),
                    )
                }
            };
            if n_prime == 0 {
                return Err(Error::param("nprime", "tss needs at least one query per round"));
            }
            ResolvedParams {
                n_prime,
                epsilon: Some(epsilon),
                rounds: Some(rounds),
            }
        }
    };
    Ok(resolved)
}

/// One row of a report. Field order is the CSV column order.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReportRecord {
    pub strategy: String,
    pub m: usize,
    pub n: usize,
    pub p: f64,
    pub e1: f64,
    pub e2: f64,
    pub f1: f64,
    pub f2: f64,
    pub nprime: usize,
    pub epsilon: Option<f64>,
    pub rounds: Option<usize>,
    pub trials: usize,
    pub seed: u64,
    pub mean_q: f64,
    pub std_q: f64,
    pub ci95_halfwidth: f64,
    pub mean_gm_q: f64,
    pub mean_uid_q: f64,
    pub mean_ambiguity: f64,
    pub q_per_log2m: Option<f64>,
    pub theory_ref_value: Option<f64>,
    pub runtime_s: Option<f64>,
}

/// A finished cell: the report row plus statistics used by checks.
#[derive(Clone, Debug, PartialEq)]
pub struct CellResult {
    pub record: ReportRecord,
    pub params: ResolvedParams,
    pub q: Summary,
    pub gm_q: Summary,
    pub uid_q: Summary,
    pub ambiguity: Summary,
    /// Fraction of trials whose ambiguity set had more than one user.
    pub ambiguous_fraction: f64,
    /// Fraction of trials that ended with a correct positive UID query.
    pub success_rate: f64,
    pub fallback_rate: f64,
}

#[derive(Clone, Copy, Debug, Default)]
struct ChunkStats {
    q: Moments,
    gm: Moments,
    uid: Moments,
    ambiguity: Moments,
    ambiguous: u64,
    successes: u64,
    fallbacks: u64,
}

impl ChunkStats {
    fn merge(&mut self, other: &ChunkStats) {
        self.q.merge(&other.q);
        self.gm.merge(&other.gm);
        self.uid.merge(&other.uid);
        self.ambiguity.merge(&other.ambiguity);
        self.ambiguous += other.ambiguous;
        self.successes += other.successes;
        self.fallbacks += other.fallbacks;
    }
}

const CHUNK: usize = 256;

struct TrialOutcome {
    q: usize,
    gm: usize,
    uid: usize,
    ambiguity: usize,
    success: bool,
    fallback: bool,
}

/// The victim was found by the last query and never named before it.
fn completed_correctly(session: &AttackSession) -> bool {
    let Some(victim) = session.revealed_victim() else {
        return false;
    };
    let transcript = session.transcript();
    let (last, earlier) = transcript.split_last().expect("terminated session has queries");
    last.query == Query::UserId(victim)
        && last.response
        && !earlier.iter().any(|e| e.query == Query::UserId(victim))
}

fn draw_graphs(cfg: &CellConfig, seed: u64) -> Result<(BipartiteGraph, BipartiteGraph)> {
    let g0 = generate_graph(
        cfg.m,
        cfg.n,
        cfg.model.p,
        &mut substream(seed, Substream::TrueGraph),
    )?;
    let g1 = observe_noisy(
        &g0,
        &cfg.model.graph_params()?,
        &mut substream(seed, Substream::Observation),
    )?;
    Ok((g0, g1))
}

fn run_trial(
    cfg: &CellConfig,
    params: &ResolvedParams,
    joint: &JointUYZ,
    channel: BinaryChannel,
    shared: Option<&(BipartiteGraph, BipartiteGraph)>,
    seed: u64,
) -> Result<TrialOutcome> {
    let (g0, g1) = match shared {
        Some((g0, g1)) => (g0.clone(), g1.clone()),
        None => draw_graphs(cfg, seed)?,
    };
    let mut session = AttackSession::new(g0, g1, channel, substream(seed, Substream::Session))?;
    let strategy_params = StrategyParams {
        n_prime: params.n_prime,
        epsilon: params.epsilon,
        rounds: params.rounds,
        group_selection_seed: selection_seed(seed),
    };
    let outcome = run_strategy(cfg.strategy, &mut session, &strategy_params, joint)?;
    Ok(TrialOutcome {
        q: outcome.total_q,
        gm: outcome.gm_q,
        uid: outcome.uid_q,
        ambiguity: outcome.ambiguity_size(cfg.m),
        success: completed_correctly(&session),
        fallback: outcome.fell_back_to_exhaustive,
    })
}

/// Runs every trial of a cell. `cell_index` feeds the seed derivation.
pub fn run_cell(cfg: &CellConfig, cell_index: u64) -> Result<CellResult> {
    let started = Instant::now();
    cfg.validate()?;
    let joint = cfg.model.joint()?;
    let params = resolve_params(cfg, &joint)?;
    let channel = cfg.model.response_channel()?;
    let shared = if cfg.fixed_graph {
        Some(draw_graphs(
            cfg,
            trial_seed(cfg.master_seed, cell_index, FIXED_GRAPH_TRIAL),
        )?)
    } else {
        None
    };

    let chunks = cfg.trials.div_ceil(CHUNK);
    let per_chunk: Vec<ChunkStats> = (0..chunks)
        .into_par_iter()
        .map(|c| -> Result<ChunkStats> {
            let mut stats = ChunkStats::default();
            for t in c * CHUNK..((c + 1) * CHUNK).min(cfg.trials) {
                let seed = trial_seed(cfg.master_seed, cell_index, t as u64);
                let o = run_trial(cfg, &params, &joint, channel, shared.as_ref(), seed)?;
                stats.q.push(o.q as f64);
                stats.gm.push(o.gm as f64);
                stats.uid.push(o.uid as f64);
                stats.ambiguity.push(o.ambiguity as f64);
                stats.ambiguous += (o.ambiguity > 1) as u64;
                stats.successes += o.success as u64;
                stats.fallbacks += o.fallback as u64;
            }
            Ok(stats)
        })
        .collect::<Result<_>>()?;
    let mut total = ChunkStats::default();
    for chunk in &per_chunk {
        total.merge(chunk);
    }

    let trials = cfg.trials as f64;
    let q = total.q.summary();
    let z = stats::normal_quantile(cfg.confidence);
    let log2m = (cfg.m as f64).log2();
    let record = ReportRecord {
        strategy: cfg.strategy.to_string(),
        m: cfg.m,
        n: cfg.n,
        p: cfg.model.p,
        e1: cfg.model.e1,
        e2: cfg.model.e2,
        f1: cfg.model.f1,
        f2: cfg.model.f2,
        nprime: params.n_prime,
        epsilon: params.epsilon,
        rounds: params.rounds,
        trials: cfg.trials,
        seed: cfg.master_seed,
        mean_q: q.mean,
        std_q: q.std,
        ci95_halfwidth: z * q.std / trials.sqrt(),
        mean_gm_q: total.gm.mean,
        mean_uid_q: total.uid.mean,
        mean_ambiguity: total.ambiguity.mean,
        q_per_log2m: (log2m > 0.0).then(|| q.mean / log2m),
        theory_ref_value: theory_reference(cfg, &params, &joint),
        runtime_s: cfg.timing.then(|| started.elapsed().as_secs_f64()),
    };
    Ok(CellResult {
        record,
        params,
        q,
        gm_q: total.gm.summary(),
        uid_q: total.uid.summary(),
        ambiguity: total.ambiguity.summary(),
        ambiguous_fraction: total.ambiguous as f64 / trials,
        success_rate: total.successes as f64 / trials,
        fallback_rate: total.fallbacks as f64 / trials,
    })
}

/// Reference value for the report: the exact expected query count where one
/// is known (exhaustive; noiseless GIS and MAP), and the leading term
/// `log2 m / I(U;Y)` for TSS.
fn theory_reference(cfg: &CellConfig, params: &ResolvedParams, joint: &JointUYZ) -> Option<f64> {
    let m = cfg.m as f64;
    match cfg.strategy {
        Strategy::Exhaustive => Some((m + 1.0) / 2.0),
        Strategy::Gis | Strategy::Map => {
            let size = closed_form_candidates(cfg.strategy, cfg.m, &cfg.model, params.n_prime).ok()?;
            // The victim is always a candidate; the other candidates ahead of it
            // in ascending order number (size - 1) / 2 on average.
            Some(params.n_prime as f64 + (size + 1.0) / 2.0)
        }
        Strategy::Tss => {
            let info = mutual_information_uy(joint);
            (info > 0.0 && m > 1.0).then(|| m.log2() / info)
        }
    }
}

/// Budgets used for tiny-instance comparisons: GIS and MAP query all but one
/// group (at least one), TSS runs one-query rounds over every group with a
/// slack that separates the two signature values.
pub fn tiny_instance_params(strategy: Strategy, n: usize) -> ResolvedParams {
    match strategy {
        Strategy::Exhaustive => ResolvedParams { n_prime: 0, epsilon: None, rounds: None },
        Strategy::Gis | Strategy::Map => ResolvedParams {
            n_prime: n.saturating_sub(1).max(1),
            epsilon: None,
            rounds: None,
        },
        Strategy::Tss => ResolvedParams { n_prime: 1, epsilon: Some(0.55), rounds: Some(n) },
    }
}

/// Exact oracle value next to a Monte Carlo estimate of the same instance.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TinyComparison {
    pub exact: f64,
    pub estimate: Summary,
}

impl TinyComparison {
    /// Distance of the estimate from the exact value, in standard errors.
    pub fn z(&self) -> f64 {
        self.estimate.z_score(self.exact)
    }
}

/// Runs a noiseless tiny instance both ways with the budgets of
/// [`tiny_instance_params`].
pub fn compare_tiny(
    strategy: Strategy,
    m: usize,
    n: usize,
    p: f64,
    trials: usize,
    seed: u64,
) -> Result<TinyComparison> {
    let params = tiny_instance_params(strategy, n);
    let exact = exact_tiny_oracle(strategy, m, n, p, params.n_prime, params.epsilon, params.rounds)?;
    let mut cfg = CellConfig::new(strategy, m, n, NoiseModel::noiseless(p))
        .with_trials(trials)
        .with_seed(seed);
    if strategy != Strategy::Exhaustive {
        cfg.n_prime = Some(params.n_prime);
        cfg.epsilon = params.epsilon;
        cfg.rounds = params.rounds;
    }
    let estimate = run_cell(&cfg, 0)?.q;
    Ok(TinyComparison { exact, estimate })
}

/// Expected candidate-set size in the noiseless model:
/// `(m-1)(1-p+p²)^n' + 1` for GIS and `(m-1)(p²+(1-p)²)^n' + 1` for MAP.
pub fn closed_form_candidates(
    strategy: Strategy,
    m: usize,
    model: &NoiseModel,
    n_prime: usize,
) -> Result<f64> {
    model.validate()?;
    if !model.is_noiseless() {
        return Err(Error::param(
            "model",
            "closed-form candidate counts hold only without noise",
        ));
    }
    if m == 0 {
        return Err(Error::param("users", "must be at least 1"));
    }
    let p = model.p;
    let survive = match strategy {
        Strategy::Gis => 1.0 - p + p * p,
        Strategy::Map => p * p + (1.0 - p) * (1.0 - p),
        other => {
            return Err(Error::param(
                "strategy",
                format!("no closed form for {other}"),
            ))
        }
    };
    Ok((m as f64 - 1.0) * survive.powi(n_prime as i32) + 1.0)
}

/// How the query budget scales with `m` in a sweep.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Schedule {
    /// The strategy's default budget.
    Default,
    /// MAP with twice its default budget (unique signatures).
    MapUniqueness,
    /// A fixed budget at every `m`.
    Fixed(usize),
}

#[derive(Clone, Debug, PartialEq)]
pub struct ScalingRow {
    pub m: usize,
    pub result: CellResult,
    pub q_per_log2m: f64,
    /// `mean Q - n'`: queries spent beyond the first round of GM queries.
    pub residual: f64,
    /// Markov bound (m-1)(p²+(1-p)²)^n' on P(|L| > 1), noiseless MAP only.
    pub markov_bound: Option<f64>,
}

/// Runs `base` at each `m`, with the budget given by `schedule` and exactly
/// as many groups as the budget consumes. Reports without judging.
pub fn scaling_sweep(base: &CellConfig, ms: &[usize], schedule: Schedule) -> Result<Vec<ScalingRow>> {
    let joint = base.model.joint()?;
    ms.iter()
        .enumerate()
        .map(|(k, &m)| {
            let mut cfg = base.clone();
            cfg.m = m;
            let (n_prime, n) = match (cfg.strategy, schedule) {
                (Strategy::Exhaustive, _) => (None, 1),
                (_, Schedule::Fixed(np)) => (Some(np), np.max(1)),
                (Strategy::Gis, Schedule::Default) => {
                    let np = gis_default_nprime(m, cfg.model.p)?;
                    (Some(np), np)
                }
                (Strategy::Map, Schedule::Default) => {
                    let np = map_default_nprime(m, cfg.model.p)?;
                    (Some(np), np)
                }
                (Strategy::Map | Strategy::Gis, Schedule::MapUniqueness) => {
                    let np = map_uniqueness_nprime(m, cfg.model.p)?;
                    (Some(np), np)
                }
                (Strategy::Tss, _) => {
                    let s = tss_default_params(m, &joint)?;
                    cfg.epsilon.get_or_insert(s.epsilon);
                    let rounds = *cfg.rounds.get_or_insert(s.rounds);
                    let np = cfg.n_prime.unwrap_or(s.n_prime);
                    (Some(np), np * rounds)
                }
            };
            cfg.n_prime = n_prime;
            cfg.n = n;
            let result = run_cell(&cfg, k as u64)?;
            let log2m = (m as f64).log2();
            let np = result.params.n_prime;
            let markov_bound = (cfg.strategy == Strategy::Map && cfg.model.is_noiseless()).then(|| {
                let p = cfg.model.p;
                (m as f64 - 1.0) * (p * p + (1.0 - p) * (1.0 - p)).powi(np as i32)
            });
            Ok(ScalingRow {
                m,
                q_per_log2m: result.q.mean / log2m,
                residual: result.q.mean - np as f64,
                markov_bound,
                result,
            })
        })
        .collect()
}

/// Cross product of parameter lists, expanded in a fixed nesting order
/// (strategy, users, groups, p, e1, e2, f1, f2, n').
#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub strategies: Vec<Strategy>,
    pub users: Vec<usize>,
    pub groups: Vec<usize>,
    pub edge_probs: Vec<f64>,
    pub e1: Vec<f64>,
    pub e2: Vec<f64>,
    pub f1: Vec<f64>,
    pub f2: Vec<f64>,
    /// Empty means "strategy default".
    pub n_primes: Vec<usize>,
    pub epsilon: Option<f64>,
    pub rounds: Option<usize>,
    pub trials: usize,
    pub master_seed: u64,
    pub confidence: f64,
    pub fixed_graph: bool,
    pub timing: bool,
}

impl ExperimentConfig {
    pub fn cells(&self) -> Result<Vec<CellConfig>> {
        let lists = [
            ("strategy", self.strategies.len()),
            ("users", self.users.len()),
            ("groups", self.groups.len()),
            ("edge-prob", self.edge_probs.len()),
            ("e1", self.e1.len()),
            ("e2", self.e2.len()),
            ("f1", self.f1.len()),
            ("f2", self.f2.len()),
        ];
        if let Some((name, _)) = lists.iter().find(|(_, len)| *len == 0) {
            return Err(Error::param(name, "sweep list is empty"));
        }
        let n_primes: Vec<Option<usize>> = if self.n_primes.is_empty() {
            vec![None]
        } else {
            self.n_primes.iter().copied().map(Some).collect()
        };
        let mut cells = Vec::new();
        for &strategy in &self.strategies {
            for &m in &self.users {
                for &n in &self.groups {
                    for &p in &self.edge_probs {
                        for &e1 in &self.e1 {
                            for &e2 in &self.e2 {
                                for &f1 in &self.f1 {
                                    for &f2 in &self.f2 {
                                        for &n_prime in &n_primes {
                                            cells.push(CellConfig {
                                                strategy,
                                                m,
                                                n,
                                                model: NoiseModel { p, e1, e2, f1, f2 },
                                                n_prime,
                                                epsilon: self.epsilon,
                                                rounds: self.rounds,
                                                trials: self.trials,
                                                master_seed: self.master_seed,
                                                confidence: self.confidence,
                                                fixed_graph: self.fixed_graph,
                                                timing: self.timing,
                                            });
                                        }
                                    }
                                }
                            }
                        }
                    }
                }
            }
        }
        Ok(cells)
    }
}

/// Outcome of a multi-cell run: completed rows and the cells that failed.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ExperimentReport {
    pub records: Vec<ReportRecord>,
    pub failed_cells: Vec<FailedCell>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FailedCell {
    pub index: usize,
    pub description: String,
    pub error: String,
}

/// Runs every cell; a cell's error is recorded and the run moves on.
pub fn run_experiment(cells: &[CellConfig]) -> ExperimentReport {
    let mut report = ExperimentReport::default();
    for (index, cell) in cells.iter().enumerate() {
        match run_cell(cell, index as u64) {
            Ok(result) => report.records.push(result.record),
            Err(err) => report.failed_cells.push(FailedCell {
                index,
                description: format!(
                    "strategy={} m={} n={} p={} e1={} e2={} f1={} f2={}",
                    cell.strategy,
                    cell.m,
                    cell.n,
                    cell.model.p,
                    cell.model.e1,
                    cell.model.e2,
                    cell.model.f1,
                    cell.model.f2
                ),
                error: err.to_string(),
            }),
        }
    }
    report
}
