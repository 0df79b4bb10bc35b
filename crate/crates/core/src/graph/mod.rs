// SPDX-License-Identifier: Apache-2.0

//! Immutable simple graphs with dense node indices.

mod io;

use std::collections::{HashSet, VecDeque};

pub use io::{load_edge_list, load_gml, parse_edge_list, parse_gml, write_edge_list};

use crate::error::{Error, Result};

/// Marker stored by [`Graph::bfs_distances`] for nodes the source cannot reach.
pub const UNREACHABLE: usize = usize::MAX;

/// A simple graph (no self-loops, no parallel edges) over nodes `0..N`.
///
/// Three adjacency views are kept: out-neighbours, in-neighbours and the
/// undirected view (union of both). For undirected graphs all three coincide.
/// Every adjacency list is sorted ascending.
#[derive(Debug, Clone, PartialEq)]
pub struct Graph {
    directed: bool,
    labels: Vec<String>,
    edges: Vec<(usize, usize)>,
    out_adj: Vec<Vec<usize>>,
    in_adj: Vec<Vec<usize>>,
    neighbors: Vec<Vec<usize>>,
}

impl Graph {
    /// Builds a graph from raw index pairs. Self-loops and duplicate edges are
    /// dropped; for undirected graphs `(u, v)` and `(v, u)` are the same edge and
    /// the first orientation seen is kept.
    pub fn from_edges<I>(node_count: usize, edges: I, directed: bool) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let labels = (0..node_count).map(|i| i.to_string()).collect();
        Self::with_labels(labels, edges, directed)
    }

    pub fn with_labels<I>(labels: Vec<String>, edges: I, directed: bool) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let n = labels.len();
        if n == 0 {
            return Err(Error::EmptyGraph);
        }
        let mut seen = HashSet::new();
        let mut kept = Vec::new();
        for (u, v) in edges {
            if u >= n || v >= n {
                return Err(Error::InvalidArgument(format!(
                    "edge ({u}, {v}) references a node outside 0..{n}"
                )));
            }
            if u == v {
                continue;
            }
            let key = if directed { (u, v) } else { (u.min(v), u.max(v)) };
            if seen.insert(key) {
                kept.push((u, v));
            }
        }

        let mut out_adj = vec![Vec::new(); n];
        let mut in_adj = vec![Vec::new(); n];
        for &(u, v) in &kept {
            out_adj[u].push(v);
            in_adj[v].push(u);
            if !directed {
                out_adj[v].push(u);
                in_adj[u].push(v);
            }
        }
        for list in out_adj.iter_mut().chain(in_adj.iter_mut()) {
            list.sort_unstable();
        }
        let neighbors = if directed {
            out_adj
                .iter()
                .zip(&in_adj)
                .map(|(o, i)| {
                    let mut merged: Vec<usize> = o.iter().chain(i).copied().collect();
                    merged.sort_unstable();
                    merged.dedup();
                    merged
                })
                .collect()
        } else {
            out_adj.clone()
        };

        Ok(Graph {
            directed,
            labels,
            edges: kept,
            out_adj,
            in_adj,
            neighbors,
        })
    }

    pub fn node_count(&self) -> usize {
        self.labels.len()
    }

    /// Number of stored edges: arcs for directed graphs, unordered pairs otherwise.
    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn is_directed(&self) -> bool {
        self.directed
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, node: usize) -> &str {
        &self.labels[node]
    }

    /// Neighbours in the undirected view.
    pub fn neighbors(&self, node: usize) -> &[usize] {
        &self.neighbors[node]
    }

    pub fn out_neighbors(&self, node: usize) -> &[usize] {
        &self.out_adj[node]
    }

    pub fn in_neighbors(&self, node: usize) -> &[usize] {
        &self.in_adj[node]
    }

    /// Degree in the undirected view.
    pub fn degree(&self, node: usize) -> usize {
        self.neighbors[node].len()
    }

    pub fn out_degree(&self, node: usize) -> usize {
        self.out_adj[node].len()
    }

    pub fn degrees(&self) -> Vec<usize> {
        self.neighbors.iter().map(Vec::len).collect()
    }

    /// Undirected graph whose edges are the union of this graph's edges and
    /// their reverses. Undirected graphs are returned unchanged.
    pub fn symmetrize(&self) -> Graph {
        if !self.directed {
            return self.clone();
        }
        Graph::with_labels(self.labels.clone(), self.edges.iter().copied(), false)
            .expect("a valid graph stays valid when symmetrized")
    }

    /// Hop distances from `source` following out-edges. Unreachable nodes hold
    /// [`UNREACHABLE`].
    pub fn bfs_distances(&self, source: usize) -> Result<Vec<usize>> {
        if source >= self.node_count() {
            return Err(Error::InvalidArgument(format!(
                "source {source} out of range 0..{}",
                self.node_count()
            )));
        }
        let mut dist = vec![UNREACHABLE; self.node_count()];
        let mut queue = VecDeque::new();
        self.bfs_fill(source, &mut dist, &mut queue);
        Ok(dist)
    }

    /// BFS into caller-owned buffers. `dist` must be all [`UNREACHABLE`] on entry.
    pub(crate) fn bfs_fill(&self, source: usize, dist: &mut [usize], queue: &mut VecDeque<usize>) {
        queue.clear();
        dist[source] = 0;
        queue.push_back(source);
        while let Some(v) = queue.pop_front() {
            let next = dist[v] + 1;
            for &w in &self.out_adj[v] {
                if dist[w] == UNREACHABLE {
                    dist[w] = next;
                    queue.push_back(w);
                }
            }
        }
    }

    /// Local clustering coefficient of every node in the undirected view:
    /// `2 * links among neighbours / (k * (k - 1))`, zero when `k < 2`.
    pub fn local_clustering(&self) -> Vec<f64> {
        let n = self.node_count();
        let mut mark = vec![usize::MAX; n];
        (0..n)
            .map(|i| {
                let nbrs = &self.neighbors[i];
                let k = nbrs.len();
                if k < 2 {
                    return 0.0;
                }
                for &j in nbrs {
                    mark[j] = i;
                }
                // each link among neighbours is seen from both ends
                let mut twice_links = 0usize;
                for &j in nbrs {
                    twice_links += self.neighbors[j].iter().filter(|&&w| mark[w] == i).count();
                }
                twice_links as f64 / (k * (k - 1)) as f64
            })
            .collect()
    }

    pub fn stats(&self) -> GraphStats {
        GraphStats::of(self)
    }
}

/// Summary statistics in the column order of the usual dataset table.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GraphStats {
    pub node_count: usize,
    pub edge_count: usize,
    pub avg_degree: f64,
    /// Population standard deviation of the undirected degree.
    pub degree_std: f64,
    pub mean_clustering: f64,
}

impl GraphStats {
    pub fn of(g: &Graph) -> Self {
        let n = g.node_count() as f64;
        let degrees = g.degrees();
        let avg = degrees.iter().sum::<usize>() as f64 / n;
        let var = degrees
            .iter()
            .map(|&d| (d as f64 - avg).powi(2))
            .sum::<f64>()
            / n;
        let mean_clustering = g.local_clustering().iter().sum::<f64>() / n;
        GraphStats {
            node_count: g.node_count(),
            edge_count: g.edge_count(),
            avg_degree: avg,
            degree_std: var.sqrt(),
            mean_clustering,
        }
    }

    /// Edge count with every undirected edge counted once per endpoint.
    pub fn half_edge_count(&self) -> usize {
        2 * self.edge_count
    }
}
