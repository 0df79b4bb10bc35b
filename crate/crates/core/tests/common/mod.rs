// SPDX-License-Identifier: Apache-2.0

//! Random graph generators and brute-force reference implementations shared
//! by the integration suites.

#![allow(dead_code)]

use std::path::PathBuf;

use nalgebra::{DMatrix, SymmetricEigen};
use netcoop::Graph;
use rand::Rng;

pub fn data_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data")
}

pub fn karate() -> Graph {
    netcoop::graph::load_edge_list(data_dir().join("karate.txt"), false).expect("karate edge list")
}

/// Random connected undirected graph: a random spanning tree plus extra
/// edges with probability `p`.
pub fn random_connected<R: Rng>(rng: &mut R, n: usize, p: f64) -> Graph {
    let mut edges = Vec::new();
    for v in 1..n {
        edges.push((rng.gen_range(0..v), v));
    }
    for i in 0..n {
        for j in i + 1..n {
            if rng.gen_bool(p) {
                edges.push((i, j));
            }
        }
    }
    Graph::from_edges(n, edges, false).unwrap()
}

/// Erdos-Renyi style undirected graph, possibly disconnected.
pub fn random_undirected<R: Rng>(rng: &mut R, n: usize, p: f64) -> Graph {
    let mut edges = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if rng.gen_bool(p) {
                edges.push((i, j));
            }
        }
    }
    Graph::from_edges(n, edges, false).unwrap()
}

/// Random directed graph with at least one arc.
pub fn random_directed<R: Rng>(rng: &mut R, n: usize, p: f64) -> Graph {
    loop {
        let mut edges = Vec::new();
        for i in 0..n {
            for j in 0..n {
                if i != j && rng.gen_bool(p) {
                    edges.push((i, j));
                }
            }
        }
        if !edges.is_empty() {
            return Graph::from_edges(n, edges, true).unwrap();
        }
    }
}

pub fn adjacency_matrix(g: &Graph) -> Vec<Vec<bool>> {
    let n = g.node_count();
    let mut a = vec![vec![false; n]; n];
    for &(u, v) in g.edges() {
        a[u][v] = true;
        if !g.is_directed() {
            a[v][u] = true;
        }
    }
    a
}

/// All-pairs hop distances by Floyd-Warshall; `None` when unreachable.
pub fn floyd_warshall(g: &Graph) -> Vec<Vec<Option<usize>>> {
    let n = g.node_count();
    let a = adjacency_matrix(g);
    let mut d: Vec<Vec<Option<usize>>> = (0..n)
        .map(|i| (0..n).map(|j| if i == j { Some(0) } else if a[i][j] { Some(1) } else { None }).collect())
        .collect();
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                if let (Some(x), Some(y)) = (d[i][k], d[k][j]) {
                    if d[i][j].is_none_or(|cur| x + y < cur) {
                        d[i][j] = Some(x + y);
                    }
                }
            }
        }
    }
    d
}

/// Every shortest path from `s` to `t`, listed explicitly.
pub fn all_shortest_paths(g: &Graph, dist: &[Vec<Option<usize>>], s: usize, t: usize) -> Vec<Vec<usize>> {
    let a = adjacency_matrix(g);
    let Some(target) = dist[s][t] else { return Vec::new() };
    let mut paths = Vec::new();
    let mut stack = vec![vec![s]];
    while let Some(path) = stack.pop() {
        let last = *path.last().unwrap();
        if path.len() - 1 == target {
            if last == t {
                paths.push(path);
            }
            continue;
        }
        for next in 0..g.node_count() {
            if a[last][next] && dist[s][next] == Some(path.len()) {
                let mut extended = path.clone();
                extended.push(next);
                stack.push(extended);
            }
        }
    }
    paths
}

/// Betweenness from explicit path enumeration, one count per unordered pair
/// on undirected graphs.
pub fn brute_betweenness(g: &Graph) -> Vec<f64> {
    let n = g.node_count();
    let dist = floyd_warshall(g);
    let mut bw = vec![0.0; n];
    for s in 0..n {
        for t in 0..n {
            if s == t || (!g.is_directed() && t < s) {
                continue;
            }
            let paths = all_shortest_paths(g, &dist, s, t);
            if paths.is_empty() {
                continue;
            }
            let total = paths.len() as f64;
            for (v, score) in bw.iter_mut().enumerate() {
                if v == s || v == t {
                    continue;
                }
                let through = paths.iter().filter(|p| p.contains(&v)).count();
                *score += through as f64 / total;
            }
        }
    }
    bw
}

pub fn brute_closeness(g: &Graph) -> Vec<f64> {
    let dist = floyd_warshall(g);
    dist.iter()
        .map(|row| {
            let reachable: Vec<usize> = row.iter().flatten().copied().collect();
            let total: usize = reachable.iter().sum();
            if total == 0 {
                0.0
            } else {
                (reachable.len() - 1) as f64 / total as f64
            }
        })
        .collect()
}

/// Local clustering by checking every neighbour pair.
pub fn brute_clustering(g: &Graph) -> Vec<f64> {
    let a = adjacency_matrix(g);
    let n = g.node_count();
    (0..n)
        .map(|v| {
            let nbrs: Vec<usize> = (0..n).filter(|&u| a[v][u] || a[u][v]).collect();
            let k = nbrs.len();
            if k < 2 {
                return 0.0;
            }
            let mut linked = 0;
            for (i, &x) in nbrs.iter().enumerate() {
                for &y in &nbrs[i + 1..] {
                    if a[x][y] || a[y][x] {
                        linked += 1;
                    }
                }
            }
            linked as f64 / (k * (k - 1) / 2) as f64
        })
        .collect()
}

pub fn brute_degree(g: &Graph) -> Vec<f64> {
    let a = adjacency_matrix(g);
    let n = g.node_count();
    (0..n)
        .map(|v| (0..n).filter(|&u| u != v && (a[v][u] || a[u][v])).count() as f64)
        .collect()
}

/// PageRank by iterating the full dense Google matrix until it stops moving.
pub fn dense_pagerank(g: &Graph, beta: f64) -> Vec<f64> {
    let n = g.node_count();
    let a = adjacency_matrix(g);
    let nf = n as f64;
    let mut m = DMatrix::<f64>::zeros(n, n);
    for j in 0..n {
        let out = a[j].iter().filter(|&&x| x).count();
        for i in 0..n {
            let link = if out == 0 {
                1.0 / nf
            } else if a[j][i] {
                1.0 / out as f64
            } else {
                0.0
            };
            m[(i, j)] = beta * link + (1.0 - beta) / nf;
        }
    }
    let mut x = nalgebra::DVector::from_element(n, 1.0 / nf);
    for _ in 0..100_000 {
        let next = &m * &x;
        let change = (&next - &x).abs().sum();
        x = next;
        if change < 1e-15 {
            break;
        }
    }
    x.iter().copied().collect()
}

/// Dominant eigenvector of `A^T A`, L1-normalized, together with the ratio
/// of the second largest to the largest eigenvalue.
pub fn authority_eigenvector(g: &Graph) -> (Vec<f64>, f64) {
    let n = g.node_count();
    let a = adjacency_matrix(g);
    let mat: DMatrix<f64> = DMatrix::from_fn(n, n, |i, j| if a[i][j] { 1.0 } else { 0.0 });
    let ata = mat.transpose() * &mat;
    let eig = SymmetricEigen::new(ata);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&x, &y| f64::total_cmp(&eig.eigenvalues[y], &eig.eigenvalues[x]));
    let top = eig.eigenvalues[order[0]];
    let second = if n > 1 { eig.eigenvalues[order[1]] } else { 0.0 };
    let v = eig.eigenvectors.column(order[0]);
    let sign = if v.sum() < 0.0 { -1.0 } else { 1.0 };
    let total: f64 = v.iter().map(|x| x * sign).sum();
    let vec: Vec<f64> = v.iter().map(|x| x * sign / total).collect();
    (vec, second.max(0.0) / top)
}

pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}
