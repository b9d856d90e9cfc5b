//! Exact BFS distances, all-pairs distances, diameter and degree
//! diagnostics, and successively edge-disjoint shortest paths.

use std::collections::{HashSet, VecDeque};

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::graph::Graph;

/// Sentinel distance for vertices not reachable from the source.
pub const UNREACHABLE: u32 = u32::MAX;

/// One BFS row: distances from `source` to every vertex.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DistanceRow {
    pub source: u32,
    pub dist: Vec<u32>,
}

/// Set of banned undirected edges, stored normalized as (min, max).
#[derive(Debug, Clone, Default)]
pub struct EdgeSet(HashSet<(u32, u32)>);

impl EdgeSet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, u: u32, v: u32) {
        self.0.insert((u.min(v), u.max(v)));
    }

    pub fn contains(&self, u: u32, v: u32) -> bool {
        self.0.contains(&(u.min(v), u.max(v)))
    }

    pub fn insert_path(&mut self, path: &PathSeq) {
        for w in path.vertices.windows(2) {
            self.insert(w[0], w[1]);
        }
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// Exact unweighted distances from `source`; neighbors are expanded in
/// ascending id order (adjacency lists are sorted).
pub fn bfs_distances(g: &Graph, source: u32) -> DistanceRow {
    DistanceRow {
        source,
        dist: bfs_masked(g, source, &EdgeSet::new()),
    }
}

fn bfs_masked(g: &Graph, source: u32, banned: &EdgeSet) -> Vec<u32> {
    let n = g.n();
    assert!((source as usize) < n, "source {source} out of range");
    let mut dist = vec![UNREACHABLE; n];
    dist[source as usize] = 0;
    let mut queue = VecDeque::from([source]);
    while let Some(u) = queue.pop_front() {
        let du = dist[u as usize];
        for &v in g.neighbors(u) {
            if dist[v as usize] == UNREACHABLE && !(banned.contains(u, v)) {
                dist[v as usize] = du + 1;
                queue.push_back(v);
            }
        }
    }
    dist
}

/// A vertex sequence forming a path; `len()` is the edge count.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PathSeq {
    pub vertices: Vec<u32>,
}

impl PathSeq {
    pub fn len(&self) -> usize {
        self.vertices.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn edges(&self) -> Vec<(u32, u32)> {
        self.vertices
            .windows(2)
            .map(|w| (w[0].min(w[1]), w[0].max(w[1])))
            .collect()
    }
}

/// Canonical shortest path from `u` to `v` avoiding `banned` edges.
///
/// Among equal-length shortest paths the canonical one is fixed by walking
/// back from `v` and always taking the smallest-id predecessor; this makes
/// path-dependent quantities reproducible across runs and platforms.
pub fn shortest_path_masked(g: &Graph, u: u32, v: u32, banned: &EdgeSet) -> Option<PathSeq> {
    let dist = bfs_masked(g, u, banned);
    if dist[v as usize] == UNREACHABLE {
        return None;
    }
    let mut vertices = vec![v];
    let mut cur = v;
    while cur != u {
        let want = dist[cur as usize] - 1;
        let pred = g
            .neighbors(cur)
            .iter()
            .copied()
            .find(|&w| dist[w as usize] == want && !banned.contains(w, cur))
            .expect("BFS-reachable vertex has a predecessor");
        vertices.push(pred);
        cur = pred;
    }
    vertices.reverse();
    Some(PathSeq { vertices })
}

/// The first up-to-three successively edge-disjoint shortest paths.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TShortestResult {
    pub p1: Option<PathSeq>,
    pub p2: Option<PathSeq>,
    pub p3: Option<PathSeq>,
}

/// Compute P^1..P^t_max for a vertex pair, where each P^t is the canonical
/// shortest path after greedily deleting every edge of the previous paths.
/// Absence of a later path is a value, not an error.
pub fn t_shortest_paths(g: &Graph, u: u32, v: u32, t_max: usize) -> TShortestResult {
    assert!(u != v, "t-shortest paths need distinct endpoints");
    assert!((1..=3).contains(&t_max), "t_max must be 1, 2 or 3");
    let mut banned = EdgeSet::new();
    let mut paths = [None, None, None];
    for slot in paths.iter_mut().take(t_max) {
        let Some(path) = shortest_path_masked(g, u, v, &banned) else {
            break;
        };
        banned.insert_path(&path);
        *slot = Some(path);
    }
    let [p1, p2, p3] = paths;
    TShortestResult { p1, p2, p3 }
}

/// All n BFS rows, ordered by source. Sources run in parallel; the output
/// is identical to sequential execution.
pub fn all_pairs_distances(g: &Graph) -> Vec<DistanceRow> {
    (0..g.n() as u32)
        .into_par_iter()
        .map(|s| bfs_distances(g, s))
        .collect()
}

/// Maximum distance over all pairs. Errors on disconnected input rather
/// than reporting infinity.
pub fn diameter(g: &Graph) -> Result<u32> {
    let mut best = 0;
    for s in 0..g.n() as u32 {
        let row = bfs_distances(g, s);
        for &d in &row.dist {
            if d == UNREACHABLE {
                return Err(Error::Disconnected);
            }
            best = best.max(d);
        }
    }
    Ok(best)
}

/// Mean distance over ordered pairs (u != v).
pub fn avg_distance(g: &Graph) -> Result<f64> {
    let n = g.n();
    if n < 2 {
        return Err(Error::InvalidParameter(
            "average distance needs at least two vertices".into(),
        ));
    }
    let mut sum = 0u64;
    for s in 0..n as u32 {
        let row = bfs_distances(g, s);
        for &d in &row.dist {
            if d == UNREACHABLE {
                return Err(Error::Disconnected);
            }
            sum += d as u64;
        }
    }
    Ok(sum as f64 / (n * n - n) as f64)
}

/// Degree-sequence statistics feeding the diameter upper bound.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DegreeStats {
    pub min_degree: usize,
    pub distinct_degree_count: usize,
    pub degree_sequence: Vec<usize>,
}

pub fn degree_stats(g: &Graph) -> DegreeStats {
    let mut seq: Vec<usize> = (0..g.n() as u32).map(|v| g.degree(v)).collect();
    seq.sort_unstable();
    let min_degree = seq.first().copied().unwrap_or(0);
    let mut distinct = 0;
    let mut prev = None;
    for &d in &seq {
        if Some(d) != prev {
            distinct += 1;
            prev = Some(d);
        }
    }
    DegreeStats {
        min_degree,
        distinct_degree_count: distinct,
        degree_sequence: seq,
    }
}

/// Degree-based diameter upper bound, a diagnostic.
///
/// For actual diameter d not in {3,4} the bound is
/// floor(3(n-t)/(min+1) - 1 + 3/(min+1)); for d in {3,4} the middle term
/// flips sign to +1. `t` is the number of distinct degrees. The two
/// fractions share a denominator, so the floor is evaluated exactly as
/// integer division of 3(n-t+1) by min+1 (the middle term is an integer
/// and commutes with the floor).
pub fn diameter_upper_bound(stats: &DegreeStats, n: usize, d_actual: u32) -> u32 {
    let t = stats.distinct_degree_count as i64;
    let denom = stats.min_degree as i64 + 1;
    let middle: i64 = if d_actual == 3 || d_actual == 4 { 1 } else { -1 };
    let bound = 3 * (n as i64 - t + 1) / denom + middle;
    bound.max(0) as u32
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synth;

    #[test]
    fn bfs_basics() {
        let p5 = synth::path_graph(5).unwrap();
        assert_eq!(bfs_distances(&p5, 0).dist, vec![0, 1, 2, 3, 4]);

        let k4 = synth::complete_graph(4).unwrap();
        assert_eq!(bfs_distances(&k4, 2).dist, vec![1, 1, 0, 1]);

        // K3 plus K2: the other component is unreachable.
        let g = crate::graph::Graph::from_edges(5, &[(0, 1), (0, 2), (1, 2), (3, 4)]).unwrap();
        let row = bfs_distances(&g, 0);
        assert_eq!(row.dist[3], UNREACHABLE);
        assert_eq!(row.dist[4], UNREACHABLE);
    }

    #[test]
    fn all_pairs_matches_single_source() {
        let c4 = synth::cycle_graph(4).unwrap();
        let rows = all_pairs_distances(&c4);
        for (s, row) in rows.iter().enumerate() {
            assert_eq!(*row, bfs_distances(&c4, s as u32));
            for (v, &d) in row.dist.iter().enumerate() {
                if s != v {
                    assert!(d == 1 || d == 2);
                }
            }
        }
    }

    #[test]
    fn diameter_values() {
        assert_eq!(diameter(&synth::complete_graph(7).unwrap()).unwrap(), 1);
        assert_eq!(diameter(&synth::path_graph(5).unwrap()).unwrap(), 4);
        assert_eq!(diameter(&synth::cycle_graph(6).unwrap()).unwrap(), 3);
        let g = crate::graph::Graph::from_edges(5, &[(0, 1), (0, 2), (1, 2), (3, 4)]).unwrap();
        assert!(matches!(diameter(&g), Err(Error::Disconnected)));
    }

    #[test]
    fn degree_stats_cases() {
        let k4 = synth::complete_graph(4).unwrap();
        let s = degree_stats(&k4);
        assert_eq!((s.min_degree, s.distinct_degree_count), (3, 1));

        let p5 = synth::path_graph(5).unwrap();
        let s = degree_stats(&p5);
        assert_eq!((s.min_degree, s.distinct_degree_count), (1, 2));

        // Star on 5 vertices.
        let star = crate::graph::Graph::from_edges(5, &[(0, 1), (0, 2), (0, 3), (0, 4)]).unwrap();
        let s = degree_stats(&star);
        assert_eq!((s.min_degree, s.distinct_degree_count), (1, 2));
    }

    #[test]
    fn diameter_bound_examples() {
        // P5: n=5, t=2, min=1, d=4 -> floor(4.5 + 1 + 1.5) = 7.
        let p5 = synth::path_graph(5).unwrap();
        let b = diameter_upper_bound(&degree_stats(&p5), 5, 4);
        assert_eq!(b, 7);
        assert!(4 <= b);

        // K5: n=5, t=1, min=4, d=1 -> floor(12/5 - 1 + 3/5) = 2.
        let k5 = synth::complete_graph(5).unwrap();
        let b = diameter_upper_bound(&degree_stats(&k5), 5, 1);
        assert_eq!(b, 2);

        // C6: n=6, t=1, min=2, d=3 -> floor(5 + 1 + 1) = 7.
        let c6 = synth::cycle_graph(6).unwrap();
        let b = diameter_upper_bound(&degree_stats(&c6), 6, 3);
        assert_eq!(b, 7);
        assert!(3 <= b);
    }

    #[test]
    fn t_shortest_on_cycle() {
        let c6 = synth::cycle_graph(6).unwrap();
        let r = t_shortest_paths(&c6, 0, 1, 3);
        assert_eq!(r.p1.as_ref().unwrap().vertices, vec![0, 1]);
        assert_eq!(r.p2.as_ref().unwrap().vertices, vec![0, 5, 4, 3, 2, 1]);
        assert!(r.p3.is_none());
    }

    #[test]
    fn t_shortest_on_complete() {
        let k4 = synth::complete_graph(4).unwrap();
        let r = t_shortest_paths(&k4, 0, 1, 3);
        assert_eq!(r.p1.as_ref().unwrap().len(), 1);
        assert_eq!(r.p2.as_ref().unwrap().vertices, vec![0, 2, 1]);
        assert_eq!(r.p3.as_ref().unwrap().vertices, vec![0, 3, 1]);
    }

    #[test]
    fn t_shortest_on_tree_has_unique_path() {
        let p4 = synth::path_graph(4).unwrap();
        let r = t_shortest_paths(&p4, 0, 3, 2);
        assert_eq!(r.p1.as_ref().unwrap().vertices, vec![0, 1, 2, 3]);
        assert!(r.p2.is_none());
    }

    #[test]
    fn successive_paths_are_edge_disjoint() {
        let g = synth::harary(&synth::HararySpec { k: 3, n: 10 }).unwrap();
        for u in 0..g.n() as u32 {
            for v in (u + 1)..g.n() as u32 {
                let r = t_shortest_paths(&g, u, v, 3);
                let mut seen = EdgeSet::new();
                for p in [&r.p1, &r.p2, &r.p3].into_iter().flatten() {
                    for (a, b) in p.edges() {
                        assert!(!seen.contains(a, b), "paths share edge ({a},{b})");
                        seen.insert(a, b);
                    }
                }
                // And P1 length equals the BFS distance.
                let d = bfs_distances(&g, u).dist[v as usize];
                assert_eq!(r.p1.as_ref().unwrap().len() as u32, d);
            }
        }
    }
}
