// SPDX-License-Identifier: Apache-2.0

//! Rank versus cooperation correlation series.
//!
//! Three strategies are supported:
//!
//! * node-level Hamming distance between the binarized rank vector and the
//!   strategy vector,
//! * KL divergence between the neighbour-mean of the rank vector and the
//!   neighbour-mean cooperativity,
//! * KL divergence between neighbour variances (of rank, and of either the
//!   strategies or their neighbour-mean, see [`Strategy3Mode`]).
//!
//! Nodes without neighbours carry no neighbour aggregate and are left out of
//! both KL inputs.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::game::Trajectory;
use crate::graph::Graph;
use crate::ranking::{binarize, Algorithm, BinaryVector, RankVector};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CorrelationStrategy {
    NodeHamming,
    NeighborMeanKl,
    NeighborVarKl,
}

impl CorrelationStrategy {
    pub const ALL: [CorrelationStrategy; 3] = [
        CorrelationStrategy::NodeHamming,
        CorrelationStrategy::NeighborMeanKl,
        CorrelationStrategy::NeighborVarKl,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            CorrelationStrategy::NodeHamming => "hamming",
            CorrelationStrategy::NeighborMeanKl => "mean-kl",
            CorrelationStrategy::NeighborVarKl => "var-kl",
        }
    }
}

impl fmt::Display for CorrelationStrategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// How realizations are combined before a KL value is reported.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum AverageMode {
    /// One correlation value per realization, averaged.
    #[default]
    PerRealization,
    /// Strategy vectors averaged across realizations first, then one value.
    Pooled,
}

impl FromStr for AverageMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "per-realization" => Ok(AverageMode::PerRealization),
            "pooled" => Ok(AverageMode::Pooled),
            _ => Err(Error::InvalidArgument(format!("unknown average mode {s:?}"))),
        }
    }
}

impl fmt::Display for AverageMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            AverageMode::PerRealization => "per-realization",
            AverageMode::Pooled => "pooled",
        })
    }
}

/// Cooperation side of the variance strategy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Strategy3Mode {
    /// Neighbour variance of rank against neighbour variance of strategies.
    #[default]
    VarVsVar,
    /// Neighbour variance of rank against neighbour-mean cooperativity.
    VarVsMean,
}

impl FromStr for Strategy3Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "var-vs-var" => Ok(Strategy3Mode::VarVsVar),
            "var-vs-mean" => Ok(Strategy3Mode::VarVsMean),
            _ => Err(Error::InvalidArgument(format!("unknown strategy-3 mode {s:?}"))),
        }
    }
}

impl fmt::Display for Strategy3Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Strategy3Mode::VarVsVar => "var-vs-var",
            Strategy3Mode::VarVsMean => "var-vs-mean",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CorrelationOptions {
    /// Added to every KL input entry before normalization.
    pub epsilon: f64,
    pub average_mode: AverageMode,
    pub strategy3_mode: Strategy3Mode,
}

impl Default for CorrelationOptions {
    fn default() -> Self {
        CorrelationOptions {
            epsilon: 1e-9,
            average_mode: AverageMode::PerRealization,
            strategy3_mode: Strategy3Mode::VarVsVar,
        }
    }
}

/// One value per timestep. Timesteps whose value was not finite are listed in
/// `omitted_timesteps`; their entry in `values` is NaN or infinite.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationSeries {
    pub strategy: CorrelationStrategy,
    pub algorithm: Algorithm,
    pub values: Vec<f64>,
    pub omitted_timesteps: Vec<usize>,
}

impl CorrelationSeries {
    fn from_values(strategy: CorrelationStrategy, algorithm: Algorithm, values: Vec<f64>) -> Self {
        let omitted_timesteps = values
            .iter()
            .enumerate()
            .filter(|(_, v)| !v.is_finite())
            .map(|(t, _)| t)
            .collect();
        CorrelationSeries {
            strategy,
            algorithm,
            values,
            omitted_timesteps,
        }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn value(&self, t: usize) -> Option<f64> {
        let v = self.values[t];
        v.is_finite().then_some(v)
    }

    /// Mean over the finite values at timesteps in `range`.
    pub fn mean_over(&self, range: std::ops::Range<usize>) -> Option<f64> {
        let finite: Vec<f64> = self.values[range].iter().copied().filter(|v| v.is_finite()).collect();
        (!finite.is_empty()).then(|| finite.iter().sum::<f64>() / finite.len() as f64)
    }
}

/// Fraction of positions where `a` and `b` differ.
pub fn hamming(a: &BinaryVector, b: &BinaryVector) -> Result<f64> {
    hamming_bits(a.bits(), b.bits())
}

fn hamming_bits(a: &[u8], b: &[u8]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::InvalidArgument(format!(
            "hamming distance needs equal lengths, got {} and {}",
            a.len(),
            b.len()
        )));
    }
    if a.is_empty() {
        return Err(Error::InvalidArgument("hamming distance of empty vectors".into()));
    }
    let differ = a.iter().zip(b).filter(|(x, y)| x != y).count();
    Ok(differ as f64 / a.len() as f64)
}

/// Neighbour mean and population variance of a per-node quantity.
#[derive(Debug, Clone, PartialEq)]
pub struct NeighborAggregate {
    pub mean: Vec<f64>,
    pub variance: Vec<f64>,
    /// Nodes without neighbours; their mean and variance are set to 0.
    pub isolated: Vec<bool>,
}

impl NeighborAggregate {
    pub fn of(g: &Graph, x: &[f64]) -> Self {
        let n = g.node_count();
        let mut mean = vec![0.0; n];
        let mut variance = vec![0.0; n];
        let mut isolated = vec![false; n];
        for i in 0..n {
            let (m, v) = mean_and_variance(g.neighbors(i).iter().map(|&j| x[j]), g.degree(i));
            mean[i] = m;
            variance[i] = v;
            isolated[i] = g.degree(i) == 0;
        }
        NeighborAggregate {
            mean,
            variance,
            isolated,
        }
    }
}

fn mean_and_variance(values: impl Iterator<Item = f64> + Clone, k: usize) -> (f64, f64) {
    if k == 0 {
        return (0.0, 0.0);
    }
    let kf = k as f64;
    let mean = values.clone().sum::<f64>() / kf;
    let var = values.map(|v| (v - mean) * (v - mean)).sum::<f64>() / kf;
    (mean, var)
}

/// `out[i]` is the mean of `x` over the neighbours of `i`; 0 without neighbours.
pub fn neighbor_mean(g: &Graph, x: &[f64]) -> Vec<f64> {
    assert_eq!(x.len(), g.node_count(), "one value per node expected");
    (0..g.node_count())
        .map(|i| mean_and_variance(g.neighbors(i).iter().map(|&j| x[j]), g.degree(i)).0)
        .collect()
}

/// Population variance of `x` over the neighbours of each node; 0 without neighbours.
pub fn neighbor_variance(g: &Graph, x: &[f64]) -> Vec<f64> {
    assert_eq!(x.len(), g.node_count(), "one value per node expected");
    (0..g.node_count())
        .map(|i| mean_and_variance(g.neighbors(i).iter().map(|&j| x[j]), g.degree(i)).1)
        .collect()
}

/// Relative entropy `sum p_k ln(p_k / q_k)` after shifting both vectors by
/// `epsilon` and normalizing them to sum 1. Terms with `p_k = 0` vanish; a
/// `q_k = 0 < p_k` term makes the result `+inf`.
pub fn kl_divergence(p: &[f64], q: &[f64], epsilon: f64) -> Result<f64> {
    if p.len() != q.len() {
        return Err(Error::InvalidArgument(format!(
            "kl divergence needs equal lengths, got {} and {}",
            p.len(),
            q.len()
        )));
    }
    if p.is_empty() {
        return Err(Error::InvalidArgument("kl divergence of empty vectors".into()));
    }
    if !(epsilon >= 0.0 && epsilon.is_finite()) {
        return Err(Error::InvalidArgument(format!("epsilon must be >= 0, got {epsilon}")));
    }
    if let Some(bad) = p.iter().chain(q).find(|v| !(**v >= 0.0 && v.is_finite())) {
        return Err(Error::InvalidArgument(format!(
            "kl divergence inputs must be finite and non-negative, got {bad}"
        )));
    }
    let p_total: f64 = p.iter().map(|v| v + epsilon).sum();
    let q_total: f64 = q.iter().map(|v| v + epsilon).sum();
    if p_total == 0.0 || q_total == 0.0 {
        return Err(Error::Degenerate("kl divergence of an all-zero vector".into()));
    }

    let mut total = 0.0;
    for (&pk, &qk) in p.iter().zip(q) {
        let pk = (pk + epsilon) / p_total;
        let qk = (qk + epsilon) / q_total;
        if pk == 0.0 {
            continue;
        }
        if qk == 0.0 {
            return Ok(f64::INFINITY);
        }
        total += pk * (pk / qk).ln();
    }
    // rounding can leave a tiny negative sum for near-identical inputs
    Ok(total.max(0.0))
}

fn check_trajectories(g: &Graph, trajs: &[Trajectory]) -> Result<usize> {
    let first = trajs
        .first()
        .ok_or_else(|| Error::InvalidArgument("at least one trajectory is required".into()))?;
    let steps = first.timesteps();
    for t in trajs {
        if t.node_count() != g.node_count() {
            return Err(Error::InvalidArgument(format!(
                "trajectory covers {} nodes, graph has {}",
                t.node_count(),
                g.node_count()
            )));
        }
        if t.timesteps() != steps {
            return Err(Error::InvalidArgument(
                "trajectories have different lengths".into(),
            ));
        }
    }
    Ok(steps)
}

/// Per-timestep Hamming distance between `rank` and the strategy vector,
/// averaged across realizations.
pub fn strategy1_series(
    algorithm: Algorithm,
    rank: &BinaryVector,
    trajs: &[Trajectory],
) -> Result<CorrelationSeries> {
    let first = trajs
        .first()
        .ok_or_else(|| Error::InvalidArgument("at least one trajectory is required".into()))?;
    let steps = first.timesteps();
    let mut values = Vec::with_capacity(steps);
    let mut bits = vec![0u8; rank.len()];
    for t in 0..steps {
        let mut sum = 0.0;
        for traj in trajs {
            if traj.timesteps() != steps {
                return Err(Error::InvalidArgument("trajectories have different lengths".into()));
            }
            for (b, s) in bits.iter_mut().zip(traj.snapshot(t)) {
                *b = s.as_bit();
            }
            sum += hamming_bits(rank.bits(), &bits)?;
        }
        values.push(sum / trajs.len() as f64);
    }
    Ok(CorrelationSeries::from_values(
        CorrelationStrategy::NodeHamming,
        algorithm,
        values,
    ))
}

pub fn strategy2_series(
    g: &Graph,
    rank: &RankVector,
    trajs: &[Trajectory],
    opts: &CorrelationOptions,
) -> Result<CorrelationSeries> {
    let mut out = kl_series(g, std::slice::from_ref(rank), trajs, opts)?;
    Ok(out.swap_remove(0).0)
}

pub fn strategy3_series(
    g: &Graph,
    rank: &RankVector,
    trajs: &[Trajectory],
    opts: &CorrelationOptions,
) -> Result<CorrelationSeries> {
    let mut out = kl_series(g, std::slice::from_ref(rank), trajs, opts)?;
    Ok(out.swap_remove(0).1)
}

/// All three series for every rank vector, computed against the same
/// trajectories. Output order is `ranks` order, and within each rank
/// Hamming, neighbour-mean KL, neighbour-variance KL.
pub fn correlate_all(
    g: &Graph,
    ranks: &[RankVector],
    trajs: &[Trajectory],
    opts: &CorrelationOptions,
) -> Result<Vec<CorrelationSeries>> {
    let kl = kl_series(g, ranks, trajs, opts)?;
    let mut out = Vec::with_capacity(3 * ranks.len());
    for (rank, (mean_kl, var_kl)) in ranks.iter().zip(kl) {
        out.push(strategy1_series(rank.algorithm, &binarize(rank), trajs)?);
        out.push(mean_kl);
        out.push(var_kl);
    }
    Ok(out)
}

/// Restriction of a per-node vector to nodes with neighbours.
fn restrict(values: &[f64], active: &[usize]) -> Vec<f64> {
    active.iter().map(|&i| values[i]).collect()
}

fn kl_or_nan(p: &[f64], q: &[f64], epsilon: f64) -> f64 {
    kl_divergence(p, q, epsilon).unwrap_or(f64::NAN)
}

/// Neighbour-mean and neighbour-variance KL series for each rank vector.
fn kl_series(
    g: &Graph,
    ranks: &[RankVector],
    trajs: &[Trajectory],
    opts: &CorrelationOptions,
) -> Result<Vec<(CorrelationSeries, CorrelationSeries)>> {
    let steps = check_trajectories(g, trajs)?;
    for r in ranks {
        if r.normalized.len() != g.node_count() {
            return Err(Error::InvalidArgument(format!(
                "{} rank vector has {} entries, graph has {} nodes",
                r.algorithm,
                r.normalized.len(),
                g.node_count()
            )));
        }
    }
    if !(opts.epsilon >= 0.0) {
        return Err(Error::InvalidArgument(format!("epsilon must be >= 0, got {}", opts.epsilon)));
    }

    let active: Vec<usize> = (0..g.node_count()).filter(|&i| g.degree(i) > 0).collect();
    let rank_sides: Vec<(Vec<f64>, Vec<f64>)> = ranks
        .iter()
        .map(|r| {
            let agg = NeighborAggregate::of(g, &r.normalized);
            (restrict(&agg.mean, &active), restrict(&agg.variance, &active))
        })
        .collect();

    let coop_sides = |x: &[f64]| -> (Vec<f64>, Vec<f64>) {
        let agg = NeighborAggregate::of(g, x);
        let var_side = match opts.strategy3_mode {
            Strategy3Mode::VarVsVar => &agg.variance,
            Strategy3Mode::VarVsMean => &agg.mean,
        };
        (restrict(&agg.mean, &active), restrict(var_side, &active))
    };

    // per timestep: one (mean KL, var KL) pair per rank
    let per_step: Vec<Vec<(f64, f64)>> = (0..steps)
        .into_par_iter()
        .map(|t| {
            let n = g.node_count();
            match opts.average_mode {
                AverageMode::PerRealization => {
                    let mut sums = vec![(0.0, 0.0); ranks.len()];
                    let mut x = vec![0.0; n];
                    for traj in trajs {
                        for (xi, s) in x.iter_mut().zip(traj.snapshot(t)) {
                            *xi = f64::from(s.as_bit());
                        }
                        let (q_mean, q_var) = coop_sides(&x);
                        for (sum, (p_mean, p_var)) in sums.iter_mut().zip(&rank_sides) {
                            sum.0 += kl_or_nan(p_mean, &q_mean, opts.epsilon);
                            sum.1 += kl_or_nan(p_var, &q_var, opts.epsilon);
                        }
                    }
                    let reps = trajs.len() as f64;
                    sums.into_iter().map(|(a, b)| (a / reps, b / reps)).collect()
                }
                AverageMode::Pooled => {
                    let mut x = vec![0.0; n];
                    for traj in trajs {
                        for (xi, s) in x.iter_mut().zip(traj.snapshot(t)) {
                            *xi += f64::from(s.as_bit());
                        }
                    }
                    let reps = trajs.len() as f64;
                    x.iter_mut().for_each(|v| *v /= reps);
                    let (q_mean, q_var) = coop_sides(&x);
                    rank_sides
                        .iter()
                        .map(|(p_mean, p_var)| {
                            (
                                kl_or_nan(p_mean, &q_mean, opts.epsilon),
                                kl_or_nan(p_var, &q_var, opts.epsilon),
                            )
                        })
                        .collect()
                }
            }
        })
        .collect();

    Ok(ranks
        .iter()
        .enumerate()
        .map(|(k, r)| {
            let mean_values = per_step.iter().map(|step| step[k].0).collect();
            let var_values = per_step.iter().map(|step| step[k].1).collect();
            (
                CorrelationSeries::from_values(CorrelationStrategy::NeighborMeanKl, r.algorithm, mean_values),
                CorrelationSeries::from_values(CorrelationStrategy::NeighborVarKl, r.algorithm, var_values),
            )
        })
        .collect())
}
