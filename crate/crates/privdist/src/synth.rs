//! Synthetic graph generators: Harary graphs and elementary fixtures.

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::noise::stream_rng;

/// Parameters for the Harary graph H_{k,n}: the minimum-edge k-edge-connected
/// circulant construction on n vertices.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct HararySpec {
    pub k: usize,
    pub n: usize,
}

/// Build H_{k,n} with the standard circulant construction.
///
/// Even k = 2r: vertex i is adjacent to i±1..i±r (mod n). Odd k with even n:
/// the (k-1)-construction plus diametric edges i <-> i+n/2. Odd k with odd n
/// is rejected.
pub fn harary(spec: &HararySpec) -> Result<Graph> {
    let HararySpec { k, n } = *spec;
    if k < 2 {
        return Err(Error::InvalidParameter(format!(
            "harary connectivity k must be >= 2, got {k}"
        )));
    }
    if n <= k {
        return Err(Error::InvalidParameter(format!(
            "harary needs n > k, got n={n}, k={k}"
        )));
    }
    if k % 2 == 1 && n % 2 == 1 {
        return Err(Error::InvalidParameter(format!(
            "harary with odd k={k} needs even n, got n={n}"
        )));
    }
    let mut edges = Vec::new();
    let r = k / 2;
    for i in 0..n {
        for step in 1..=r {
            let j = (i + step) % n;
            edges.push((i as u32, j as u32));
        }
    }
    if k % 2 == 1 {
        for i in 0..n / 2 {
            edges.push((i as u32, (i + n / 2) as u32));
        }
    }
    // Steps are distinct and <= n/2, so no duplicates arise except the
    // shared diametric chord when n = 2r which the bound n > k excludes.
    Graph::from_edges(n, &edges)
}

pub fn path_graph(n: usize) -> Result<Graph> {
    if n < 1 {
        return Err(Error::InvalidParameter("path needs n >= 1".into()));
    }
    let edges: Vec<(u32, u32)> = (1..n as u32).map(|v| (v - 1, v)).collect();
    Graph::from_edges(n, &edges)
}

pub fn cycle_graph(n: usize) -> Result<Graph> {
    if n < 3 {
        return Err(Error::InvalidParameter("cycle needs n >= 3".into()));
    }
    let mut edges: Vec<(u32, u32)> = (1..n as u32).map(|v| (v - 1, v)).collect();
    edges.push((n as u32 - 1, 0));
    Graph::from_edges(n, &edges)
}

pub fn complete_graph(n: usize) -> Result<Graph> {
    if n < 1 {
        return Err(Error::InvalidParameter(
            "complete graph needs n >= 1".into(),
        ));
    }
    let mut edges = Vec::new();
    for u in 0..n as u32 {
        for v in (u + 1)..n as u32 {
            edges.push((u, v));
        }
    }
    Graph::from_edges(n, &edges)
}

/// G(n, p) with a seeded stream; may be disconnected.
pub fn gnp_random_graph(n: usize, p: f64, seed: u64) -> Graph {
    let mut rng: ChaCha8Rng = stream_rng(seed, &[0x67_6e_70]);
    let mut edges = Vec::new();
    for u in 0..n as u32 {
        for v in (u + 1)..n as u32 {
            if rng.random::<f64>() < p {
                edges.push((u, v));
            }
        }
    }
    Graph::from_edges(n, &edges).expect("generated edges are valid")
}

/// Connected graph with exactly `m` edges sampled uniformly from all vertex
/// pairs, retrying derived seeds until connected. Panics if `m` is out of
/// range or too sparse to ever connect n vertices.
pub fn dense_random_graph(n: usize, m: usize, seed: u64) -> Graph {
    let max = n * (n - 1) / 2;
    assert!(m <= max, "m={m} exceeds {max} possible edges");
    assert!(m + 1 >= n, "m={m} cannot connect {n} vertices");
    let mut all: Vec<(u32, u32)> = Vec::with_capacity(max);
    for u in 0..n as u32 {
        for v in (u + 1)..n as u32 {
            all.push((u, v));
        }
    }
    for attempt in 0..1000u64 {
        let mut rng: ChaCha8Rng = stream_rng(seed, &[0x64656e7365, attempt]);
        let mut pool = all.clone();
        pool.shuffle(&mut rng);
        pool.truncate(m);
        let g = Graph::from_edges(n, &pool).expect("sampled edges are valid");
        if g.is_connected() {
            return g;
        }
    }
    panic!("no connected sample with n={n}, m={m} after 1000 attempts");
}
