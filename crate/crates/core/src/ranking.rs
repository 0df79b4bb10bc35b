// SPDX-License-Identifier: Apache-2.0

//! Per-node ranking algorithms and the normalized/binarized views used for
//! correlation.
//!
//! All functions are pure reads of an immutable [`Graph`]. Algorithms that
//! loop over source nodes (closeness, betweenness) run in parallel but reduce
//! in a fixed order, so results are bit-identical across thread counts.

use std::collections::VecDeque;
use std::fmt;
use std::io::Write;
use std::str::FromStr;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::graph::{Graph, UNREACHABLE};

/// Source nodes handled per parallel work item in betweenness. Fixed so the
/// floating-point reduction order never depends on the thread pool.
const BETWEENNESS_CHUNK: usize = 32;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Algorithm {
    SimpleDegree,
    PageRank,
    Hits,
    Closeness,
    Betweenness,
    Clustering,
}

impl Algorithm {
    pub const ALL: [Algorithm; 6] = [
        Algorithm::SimpleDegree,
        Algorithm::PageRank,
        Algorithm::Hits,
        Algorithm::Closeness,
        Algorithm::Betweenness,
        Algorithm::Clustering,
    ];

    /// Short lowercase name used in file names and on the command line.
    pub fn as_str(self) -> &'static str {
        match self {
            Algorithm::SimpleDegree => "sd",
            Algorithm::PageRank => "pagerank",
            Algorithm::Hits => "hits",
            Algorithm::Closeness => "cl",
            Algorithm::Betweenness => "bw",
            Algorithm::Clustering => "cc",
        }
    }

    /// Whether the algorithm reads edge direction at all.
    pub fn uses_direction(self) -> bool {
        matches!(self, Algorithm::PageRank | Algorithm::Hits)
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "sd" | "degree" => Ok(Algorithm::SimpleDegree),
            "pagerank" | "pr" => Ok(Algorithm::PageRank),
            "hits" => Ok(Algorithm::Hits),
            "cl" | "closeness" => Ok(Algorithm::Closeness),
            "bw" | "betweenness" => Ok(Algorithm::Betweenness),
            "cc" | "clustering" => Ok(Algorithm::Clustering),
            _ => Err(Error::InvalidArgument(format!("unknown ranking algorithm {s:?}"))),
        }
    }
}

/// Parameters for the iterative algorithms.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RankingParams {
    /// PageRank damping factor, in (0, 1).
    pub beta: f64,
    /// Stop once the L1 change between sweeps drops below this.
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for RankingParams {
    fn default() -> Self {
        RankingParams {
            beta: 0.85,
            tol: 1e-10,
            max_iter: 200,
        }
    }
}

/// Scores for one algorithm, with the min-max normalized view.
#[derive(Debug, Clone, PartialEq)]
pub struct RankVector {
    pub algorithm: Algorithm,
    pub values: Vec<f64>,
    /// `(v - min) / (max - min)`, or 0.5 everywhere for a constant vector.
    pub normalized: Vec<f64>,
    /// Sweeps performed by iterative algorithms; 0 for direct ones.
    pub iterations: usize,
    /// False when an iterative algorithm stopped at `max_iter`.
    pub converged: bool,
    /// Set when HITS was run on a graph without edges.
    pub degenerate: bool,
}

impl RankVector {
    pub fn new(algorithm: Algorithm, values: Vec<f64>) -> Self {
        let normalized = min_max_normalize(&values);
        RankVector {
            algorithm,
            values,
            normalized,
            iterations: 0,
            converged: true,
            degenerate: false,
        }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Writes `node_index,raw,normalized` rows.
    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "node_index,raw,normalized")?;
        for (i, (raw, norm)) in self.values.iter().zip(&self.normalized).enumerate() {
            writeln!(out, "{i},{raw:.17e},{norm:.17e}")?;
        }
        Ok(())
    }
}

pub fn min_max_normalize(values: &[f64]) -> Vec<f64> {
    let (min, max) = values
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v)));
    if max > min {
        let span = max - min;
        values.iter().map(|&v| (v - min) / span).collect()
    } else {
        vec![0.5; values.len()]
    }
}

/// A per-node 0/1 vector.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BinaryVector(Vec<u8>);

impl BinaryVector {
    /// Panics if any entry is not 0 or 1.
    pub fn new(bits: Vec<u8>) -> Self {
        assert!(bits.iter().all(|&b| b <= 1), "binary vector entries must be 0 or 1");
        BinaryVector(bits)
    }

    pub fn bits(&self) -> &[u8] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// 1 where the normalized score is at or above the mean normalized score.
pub fn binarize(r: &RankVector) -> BinaryVector {
    let n = r.normalized.len() as f64;
    let mean = r.normalized.iter().sum::<f64>() / n;
    BinaryVector(r.normalized.iter().map(|&x| u8::from(x >= mean)).collect())
}

pub fn rank(g: &Graph, algorithm: Algorithm, params: &RankingParams) -> Result<RankVector> {
    match algorithm {
        Algorithm::SimpleDegree => Ok(simple_degree(g)),
        Algorithm::PageRank => pagerank(g, params.beta, params.tol, params.max_iter),
        Algorithm::Hits => Ok(hits(g, params.tol, params.max_iter)),
        Algorithm::Closeness => Ok(closeness(g)),
        Algorithm::Betweenness => Ok(betweenness(g)),
        Algorithm::Clustering => Ok(clustering_coefficient(g)),
    }
}

pub fn simple_degree(g: &Graph) -> RankVector {
    let values = g.degrees().into_iter().map(|d| d as f64).collect();
    RankVector::new(Algorithm::SimpleDegree, values)
}

/// Power iteration on `R_i = beta * sum_{j->i} R_j / out(j) + (1 - beta) / N`,
/// starting from the uniform vector. Dangling nodes spread their mass evenly.
pub fn pagerank(g: &Graph, beta: f64, tol: f64, max_iter: usize) -> Result<RankVector> {
    if !(beta > 0.0 && beta < 1.0) {
        return Err(Error::InvalidArgument(format!("beta must lie in (0, 1), got {beta}")));
    }
    if !(tol > 0.0) {
        return Err(Error::InvalidArgument(format!("tol must be positive, got {tol}")));
    }
    let n = g.node_count();
    let nf = n as f64;
    let inv_out: Vec<f64> = (0..n)
        .map(|j| match g.out_degree(j) {
            0 => 0.0,
            d => 1.0 / d as f64,
        })
        .collect();
    let dangling: Vec<usize> = (0..n).filter(|&j| g.out_degree(j) == 0).collect();

    let mut rank = vec![1.0 / nf; n];
    let mut next = vec![0.0; n];
    let mut iterations = 0;
    let mut converged = false;
    while iterations < max_iter {
        iterations += 1;
        let dangling_mass: f64 = dangling.iter().map(|&j| rank[j]).sum();
        let base = (1.0 - beta) / nf + beta * dangling_mass / nf;
        for (i, slot) in next.iter_mut().enumerate() {
            let inflow: f64 = g.in_neighbors(i).iter().map(|&j| rank[j] * inv_out[j]).sum();
            *slot = base + beta * inflow;
        }
        let change: f64 = rank.iter().zip(&next).map(|(a, b)| (a - b).abs()).sum();
        std::mem::swap(&mut rank, &mut next);
        if change < tol {
            converged = true;
            break;
        }
    }

    let mut out = RankVector::new(Algorithm::PageRank, rank);
    out.iterations = iterations;
    out.converged = converged;
    Ok(out)
}

fn l1_normalize(v: &mut [f64]) {
    let total: f64 = v.iter().sum();
    if total > 0.0 {
        v.iter_mut().for_each(|x| *x /= total);
    }
}

/// Hubs and authorities from uniform `1/N` starts. Each sweep sets
/// authorities from incoming hub scores, then hubs from outgoing authority
/// scores, L1-normalizing both. The authority vector is returned.
pub fn hits(g: &Graph, tol: f64, max_iter: usize) -> RankVector {
    let n = g.node_count();
    let uniform = 1.0 / n as f64;
    if g.edge_count() == 0 {
        let mut out = RankVector::new(Algorithm::Hits, vec![uniform; n]);
        out.degenerate = true;
        return out;
    }

    let mut hub = vec![uniform; n];
    let mut auth = vec![uniform; n];
    let mut iterations = 0;
    let mut converged = false;
    while iterations < max_iter {
        iterations += 1;
        let mut new_auth: Vec<f64> = (0..n)
            .map(|i| g.in_neighbors(i).iter().map(|&j| hub[j]).sum())
            .collect();
        l1_normalize(&mut new_auth);
        let mut new_hub: Vec<f64> = (0..n)
            .map(|i| g.out_neighbors(i).iter().map(|&j| new_auth[j]).sum())
            .collect();
        l1_normalize(&mut new_hub);

        let da: f64 = auth.iter().zip(&new_auth).map(|(a, b)| (a - b).abs()).sum();
        let dh: f64 = hub.iter().zip(&new_hub).map(|(a, b)| (a - b).abs()).sum();
        auth = new_auth;
        hub = new_hub;
        if da < tol && dh < tol {
            converged = true;
            break;
        }
    }

    let mut out = RankVector::new(Algorithm::Hits, auth);
    out.iterations = iterations;
    out.converged = converged;
    out
}

/// `(r - 1) / sum of distances to reachable nodes`, where `r` counts the
/// reachable nodes including the source. Isolated nodes score 0.
pub fn closeness(g: &Graph) -> RankVector {
    let n = g.node_count();
    let values = (0..n)
        .into_par_iter()
        .map_init(
            || (vec![UNREACHABLE; n], VecDeque::new()),
            |(dist, queue), source| {
                dist.fill(UNREACHABLE);
                g.bfs_fill(source, dist, queue);
                let (reached, total) = dist
                    .iter()
                    .filter(|&&d| d != UNREACHABLE)
                    .fold((0usize, 0usize), |(r, t), &d| (r + 1, t + d));
                if total == 0 {
                    0.0
                } else {
                    (reached - 1) as f64 / total as f64
                }
            },
        )
        .collect();
    RankVector::new(Algorithm::Closeness, values)
}

/// Exact betweenness by Brandes accumulation, unnormalized. On undirected
/// graphs each unordered endpoint pair is counted once.
pub fn betweenness(g: &Graph) -> RankVector {
    let n = g.node_count();
    let sources: Vec<usize> = (0..n).collect();
    let partials: Vec<Vec<f64>> = sources
        .par_chunks(BETWEENNESS_CHUNK)
        .map(|chunk| {
            let mut work = BrandesWork::new(n);
            let mut acc = vec![0.0; n];
            for &s in chunk {
                work.accumulate(g, s, &mut acc);
            }
            acc
        })
        .collect();

    let mut values = vec![0.0; n];
    for part in &partials {
        for (v, p) in values.iter_mut().zip(part) {
            *v += p;
        }
    }
    if !g.is_directed() {
        values.iter_mut().for_each(|v| *v /= 2.0);
    }
    RankVector::new(Algorithm::Betweenness, values)
}

struct BrandesWork {
    dist: Vec<usize>,
    sigma: Vec<f64>,
    delta: Vec<f64>,
    preds: Vec<Vec<usize>>,
    order: Vec<usize>,
    queue: VecDeque<usize>,
}

impl BrandesWork {
    fn new(n: usize) -> Self {
        BrandesWork {
            dist: vec![UNREACHABLE; n],
            sigma: vec![0.0; n],
            delta: vec![0.0; n],
            preds: vec![Vec::new(); n],
            order: Vec::with_capacity(n),
            queue: VecDeque::with_capacity(n),
        }
    }

    fn accumulate(&mut self, g: &Graph, s: usize, acc: &mut [f64]) {
        for &v in &self.order {
            self.dist[v] = UNREACHABLE;
            self.sigma[v] = 0.0;
            self.delta[v] = 0.0;
            self.preds[v].clear();
        }
        self.order.clear();

        self.dist[s] = 0;
        self.sigma[s] = 1.0;
        self.queue.push_back(s);
        while let Some(v) = self.queue.pop_front() {
            self.order.push(v);
            let next = self.dist[v] + 1;
            for &w in g.out_neighbors(v) {
                if self.dist[w] == UNREACHABLE {
                    self.dist[w] = next;
                    self.queue.push_back(w);
                }
                if self.dist[w] == next {
                    self.sigma[w] += self.sigma[v];
                    self.preds[w].push(v);
                }
            }
        }

        for &w in self.order.iter().rev() {
            let coeff = (1.0 + self.delta[w]) / self.sigma[w];
            for &v in &self.preds[w] {
                self.delta[v] += self.sigma[v] * coeff;
            }
            if w != s {
                acc[w] += self.delta[w];
            }
        }
    }
}

pub fn clustering_coefficient(g: &Graph) -> RankVector {
    RankVector::new(Algorithm::Clustering, g.local_clustering())
}
