// SPDX-License-Identifier: Apache-2.0

//! Synchronous evolutionary prisoner's dilemma on a graph.
//!
//! Each timestep every node plays the one-shot game against all of its
//! neighbours (payoffs are reset first), then every node compares itself
//! with one uniformly chosen neighbour `j` and copies `j`'s strategy with
//! probability `(PO_j - PO_i) / (b * max(k_i, k_j))` when `PO_j > PO_i`.
//! Both phases read a frozen snapshot, so node order is irrelevant.
//!
//! Randomness comes from one ChaCha8 stream per realization, keyed by the
//! base seed and the realization index. Within a timestep, nodes with at
//! least one neighbour draw `(neighbour, uniform)` in index order.

use std::io::Write;

use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::graph::Graph;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[repr(u8)]
pub enum Strategy {
    Defect = 0,
    Cooperate = 1,
}

impl Strategy {
    pub fn is_cooperator(self) -> bool {
        self == Strategy::Cooperate
    }

    pub fn as_bit(self) -> u8 {
        self as u8
    }
}

/// Row player's payoffs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PayoffMatrix {
    /// Temptation: defector against cooperator.
    pub temptation: f64,
    /// Reward: mutual cooperation.
    pub reward: f64,
    /// Punishment: mutual defection.
    pub punishment: f64,
    /// Sucker: cooperator against defector.
    pub sucker: f64,
}

impl PayoffMatrix {
    /// `T = b`, `R = 1`, `P = S = 0`.
    pub fn nowak_may(b: f64) -> Self {
        PayoffMatrix {
            temptation: b,
            reward: 1.0,
            punishment: 0.0,
            sucker: 0.0,
        }
    }

    pub fn payoff(&self, own: Strategy, other: Strategy) -> f64 {
        match (own, other) {
            (Strategy::Cooperate, Strategy::Cooperate) => self.reward,
            (Strategy::Cooperate, Strategy::Defect) => self.sucker,
            (Strategy::Defect, Strategy::Cooperate) => self.temptation,
            (Strategy::Defect, Strategy::Defect) => self.punishment,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GameParams {
    /// Temptation to defect, `> 1`.
    pub b: f64,
    /// Timesteps per realization.
    pub time_window: usize,
    /// Independent realizations.
    pub repetitions: usize,
    pub seed: u64,
}

impl GameParams {
    pub fn new(b: f64, time_window: usize, repetitions: usize, seed: u64) -> Result<Self> {
        let params = GameParams {
            b,
            time_window,
            repetitions,
            seed,
        };
        params.validate()?;
        Ok(params)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.b > 1.0 && self.b.is_finite()) {
            return Err(Error::InvalidArgument(format!("b must be a finite value > 1, got {}", self.b)));
        }
        if self.time_window == 0 {
            return Err(Error::InvalidArgument("time_window must be at least 1".into()));
        }
        if self.repetitions == 0 {
            return Err(Error::InvalidArgument("repetitions must be at least 1".into()));
        }
        Ok(())
    }

    pub fn matrix(&self) -> PayoffMatrix {
        PayoffMatrix::nowak_may(self.b)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GameState {
    pub strategies: Vec<Strategy>,
    pub payoffs: Vec<f64>,
}

impl GameState {
    pub fn cooperators(&self) -> usize {
        self.strategies.iter().filter(|s| s.is_cooperator()).count()
    }

    pub fn cooperativity(&self) -> f64 {
        self.cooperators() as f64 / self.strategies.len() as f64
    }
}

/// Bookkeeping from strategy updates.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct UpdateStats {
    pub switches: usize,
    /// Imitation probabilities that exceeded 1 and were clamped.
    pub clamped: usize,
    /// Largest imitation probability seen before clamping.
    pub max_probability: f64,
    /// Smallest imitation probability evaluated (only for richer neighbours).
    pub min_probability: f64,
}

impl UpdateStats {
    fn empty() -> Self {
        UpdateStats {
            switches: 0,
            clamped: 0,
            max_probability: 0.0,
            min_probability: f64::INFINITY,
        }
    }

    fn merge(&mut self, other: &UpdateStats) {
        self.switches += other.switches;
        self.clamped += other.clamped;
        self.max_probability = self.max_probability.max(other.max_probability);
        self.min_probability = self.min_probability.min(other.min_probability);
    }
}

/// The RNG for one realization: base seed selects the key, the realization
/// index selects the ChaCha stream.
pub fn realization_rng(seed: u64, realization_index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(realization_index);
    rng
}

/// `floor(N / 2)` cooperators placed uniformly at random; payoffs zeroed.
pub fn init_state<R: Rng + ?Sized>(g: &Graph, rng: &mut R) -> GameState {
    let n = g.node_count();
    let mut strategies = vec![Strategy::Defect; n];
    for i in index::sample(rng, n, n / 2) {
        strategies[i] = Strategy::Cooperate;
    }
    GameState {
        strategies,
        payoffs: vec![0.0; n],
    }
}

/// Recomputes every payoff from scratch against the current strategies.
pub fn payoff_round(g: &Graph, state: &mut GameState, m: &PayoffMatrix) {
    let strategies = &state.strategies;
    for (i, payoff) in state.payoffs.iter_mut().enumerate() {
        let own = strategies[i];
        *payoff = g
            .neighbors(i)
            .iter()
            .map(|&j| m.payoff(own, strategies[j]))
            .sum();
    }
}

/// One node's random draws for a strategy update.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UpdateDraw {
    pub neighbor: usize,
    pub uniform: f64,
}

/// Draws `(neighbour, uniform)` for every node with neighbours, in index order.
pub fn draw_updates<R: Rng + ?Sized>(g: &Graph, rng: &mut R) -> Vec<Option<UpdateDraw>> {
    (0..g.node_count())
        .map(|i| {
            let nbrs = g.neighbors(i);
            if nbrs.is_empty() {
                return None;
            }
            let neighbor = nbrs[rng.gen_range(0..nbrs.len())];
            let uniform = rng.gen::<f64>();
            Some(UpdateDraw { neighbor, uniform })
        })
        .collect()
}

/// Imitation probability of `i` copying `j`, or `None` when `j` is not richer.
pub fn imitation_probability(g: &Graph, payoffs: &[f64], i: usize, j: usize, b: f64) -> Option<f64> {
    let gap = payoffs[j] - payoffs[i];
    if gap > 0.0 {
        let scale = b * g.degree(i).max(g.degree(j)) as f64;
        Some(gap / scale)
    } else {
        None
    }
}

/// Next strategy of node `i` given the frozen snapshot and its draw.
pub fn next_strategy(
    g: &Graph,
    state: &GameState,
    i: usize,
    draw: Option<UpdateDraw>,
    b: f64,
    stats: &mut UpdateStats,
) -> Strategy {
    let own = state.strategies[i];
    let Some(UpdateDraw { neighbor, uniform }) = draw else {
        return own;
    };
    let Some(raw) = imitation_probability(g, &state.payoffs, i, neighbor, b) else {
        return own;
    };
    stats.max_probability = stats.max_probability.max(raw);
    stats.min_probability = stats.min_probability.min(raw);
    let p = if raw > 1.0 {
        stats.clamped += 1;
        1.0
    } else {
        raw
    };
    if uniform < p {
        let theirs = state.strategies[neighbor];
        if theirs != own {
            stats.switches += 1;
        }
        theirs
    } else {
        own
    }
}

/// Synchronous imitation step. Payoffs must be fresh from [`payoff_round`].
pub fn strategy_update<R: Rng + ?Sized>(
    g: &Graph,
    state: &mut GameState,
    b: f64,
    rng: &mut R,
) -> UpdateStats {
    let draws = draw_updates(g, rng);
    apply_updates(g, state, b, &draws)
}

pub fn apply_updates(
    g: &Graph,
    state: &mut GameState,
    b: f64,
    draws: &[Option<UpdateDraw>],
) -> UpdateStats {
    let mut stats = UpdateStats::empty();
    let next: Vec<Strategy> = (0..g.node_count())
        .map(|i| next_strategy(g, state, i, draws[i], b, &mut stats))
        .collect();
    state.strategies = next;
    stats
}

/// Strategy snapshots of one realization, one per timestep.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    node_count: usize,
    snapshots: Vec<Strategy>,
    cooperativity: Vec<f64>,
    initial_cooperativity: f64,
    stats: UpdateStats,
}

impl Trajectory {
    /// Builds a trajectory from externally produced snapshots (one per timestep).
    pub fn from_snapshots(snapshots: Vec<Vec<Strategy>>) -> Result<Self> {
        let node_count = snapshots.first().map_or(0, Vec::len);
        if node_count == 0 {
            return Err(Error::InvalidArgument("trajectory needs at least one non-empty snapshot".into()));
        }
        if snapshots.iter().any(|s| s.len() != node_count) {
            return Err(Error::InvalidArgument("snapshots differ in length".into()));
        }
        let cooperativity = snapshots
            .iter()
            .map(|s| s.iter().filter(|x| x.is_cooperator()).count() as f64 / node_count as f64)
            .collect();
        Ok(Trajectory {
            node_count,
            initial_cooperativity: f64::NAN,
            snapshots: snapshots.concat(),
            cooperativity,
            stats: UpdateStats::empty(),
        })
    }

    pub fn node_count(&self) -> usize {
        self.node_count
    }

    pub fn timesteps(&self) -> usize {
        self.cooperativity.len()
    }

    /// Strategies after timestep `t` (0-based).
    pub fn snapshot(&self, t: usize) -> &[Strategy] {
        &self.snapshots[t * self.node_count..(t + 1) * self.node_count]
    }

    pub fn snapshots(&self) -> impl ExactSizeIterator<Item = &[Strategy]> + '_ {
        self.snapshots.chunks_exact(self.node_count)
    }

    /// Fraction of cooperators after each timestep.
    pub fn cooperativity_series(&self) -> &[f64] {
        &self.cooperativity
    }

    /// Cooperator fraction before the first timestep; NaN for trajectories
    /// built with [`Trajectory::from_snapshots`].
    pub fn initial_cooperativity(&self) -> f64 {
        self.initial_cooperativity
    }

    /// Update bookkeeping accumulated over every timestep.
    pub fn update_stats(&self) -> &UpdateStats {
        &self.stats
    }
}

/// Plays one realization. The game always runs on the undirected view.
pub fn run_realization(g: &Graph, params: &GameParams, realization_index: usize) -> Result<Trajectory> {
    params.validate()?;
    let n = g.node_count();
    let matrix = params.matrix();
    let mut rng = realization_rng(params.seed, realization_index as u64);
    let mut state = init_state(g, &mut rng);
    let initial_cooperativity = state.cooperativity();

    let mut snapshots = Vec::with_capacity(n * params.time_window);
    let mut cooperativity = Vec::with_capacity(params.time_window);
    let mut stats = UpdateStats::empty();
    for _ in 0..params.time_window {
        payoff_round(g, &mut state, &matrix);
        let step = strategy_update(g, &mut state, params.b, &mut rng);
        stats.merge(&step);
        snapshots.extend_from_slice(&state.strategies);
        cooperativity.push(state.cooperativity());
    }

    Ok(Trajectory {
        node_count: n,
        snapshots,
        cooperativity,
        initial_cooperativity,
        stats,
    })
}

/// Runs `params.repetitions` independent realizations, indexed from 0.
pub fn run_game(g: &Graph, params: &GameParams) -> Result<Vec<Trajectory>> {
    params.validate()?;
    (0..params.repetitions)
        .into_par_iter()
        .map(|r| run_realization(g, params, r))
        .collect()
}

/// SHA-256 over every snapshot of every trajectory, hex encoded.
pub fn trajectory_checksum(trajectories: &[Trajectory]) -> String {
    let mut hasher = Sha256::new();
    for t in trajectories {
        hasher.update((t.node_count as u64).to_le_bytes());
        hasher.update((t.timesteps() as u64).to_le_bytes());
        let bytes: Vec<u8> = t.snapshots.iter().map(|s| s.as_bit()).collect();
        hasher.update(&bytes);
    }
    hasher
        .finalize()
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}

/// `realization,timestep,node,strategy` rows, strategy as 1 (C) or 0 (D).
pub fn write_strategies_csv<W: Write>(trajectories: &[Trajectory], mut out: W) -> std::io::Result<()> {
    writeln!(out, "realization,timestep,node,strategy")?;
    for (r, traj) in trajectories.iter().enumerate() {
        for (t, snap) in traj.snapshots().enumerate() {
            for (node, s) in snap.iter().enumerate() {
                writeln!(out, "{r},{t},{node},{}", s.as_bit())?;
            }
        }
    }
    Ok(())
}

pub fn write_cooperativity_csv<W: Write>(trajectories: &[Trajectory], mut out: W) -> std::io::Result<()> {
    writeln!(out, "realization,timestep,cooperativity")?;
    for (r, traj) in trajectories.iter().enumerate() {
        for (t, c) in traj.cooperativity_series().iter().enumerate() {
            writeln!(out, "{r},{t},{c}")?;
        }
    }
    Ok(())
}
