//! Immutable simple undirected unweighted graph, edge-list ingestion and
//! cleaning, connectivity checks.
//!
//! The text interchange format is one edge per line, two whitespace-separated
//! endpoint tokens (extra tokens such as weights are ignored), `#` comments
//! and blank lines skipped. Vertex labels may be arbitrary strings; they are
//! mapped to dense ids `0..n-1` in first-appearance order.

use std::collections::{HashMap, HashSet, VecDeque};
use std::fs::File;
use std::io::{BufRead, BufReader, Read};
use std::path::Path;

use crate::error::{Error, Result};

/// Simple undirected unweighted graph with dense vertex ids.
///
/// Invariants: no self-loops, no duplicate edges, adjacency symmetric,
/// neighbor lists sorted ascending (the determinism contract relied on by
/// BFS tie-breaking downstream).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    adj: Vec<Vec<u32>>,
    m: usize,
}

impl Graph {
    /// Build a graph from an explicit edge list over vertices `0..n`.
    /// Rejects self-loops, duplicates and out-of-range endpoints.
    pub fn from_edges(n: usize, edges: &[(u32, u32)]) -> Result<Graph> {
        let mut adj = vec![Vec::new(); n];
        let mut seen = HashSet::with_capacity(edges.len());
        for &(u, v) in edges {
            if u == v {
                return Err(Error::SelfLoop(u));
            }
            for w in [u, v] {
                if w as usize >= n {
                    return Err(Error::VertexOutOfRange { vertex: w, n });
                }
            }
            let key = (u.min(v), u.max(v));
            if !seen.insert(key) {
                return Err(Error::EdgeExists(u, v));
            }
            adj[u as usize].push(v);
            adj[v as usize].push(u);
        }
        for list in &mut adj {
            list.sort_unstable();
        }
        Ok(Graph {
            adj,
            m: edges.len(),
        })
    }

    /// Number of vertices.
    pub fn n(&self) -> usize {
        self.adj.len()
    }

    /// Number of unordered edges.
    pub fn m(&self) -> usize {
        self.m
    }

    /// Neighbors of `v`, sorted ascending.
    pub fn neighbors(&self, v: u32) -> &[u32] {
        &self.adj[v as usize]
    }

    pub fn degree(&self, v: u32) -> usize {
        self.adj[v as usize].len()
    }

    pub fn has_edge(&self, u: u32, v: u32) -> bool {
        self.adj[u as usize].binary_search(&v).is_ok()
    }

    /// Unordered edges as (u, v) with u < v, in ascending order.
    pub fn edges(&self) -> Vec<(u32, u32)> {
        let mut out = Vec::with_capacity(self.m);
        for u in 0..self.n() as u32 {
            for &v in self.neighbors(u) {
                if u < v {
                    out.push((u, v));
                }
            }
        }
        out
    }

    pub fn check_vertex(&self, v: u32) -> Result<()> {
        if (v as usize) < self.n() {
            Ok(())
        } else {
            Err(Error::VertexOutOfRange {
                vertex: v,
                n: self.n(),
            })
        }
    }

    /// New graph with edge (u,v) added; the original is untouched.
    pub fn with_edge_added(&self, u: u32, v: u32) -> Result<Graph> {
        self.check_vertex(u)?;
        self.check_vertex(v)?;
        if u == v {
            return Err(Error::SelfLoop(u));
        }
        if self.has_edge(u, v) {
            return Err(Error::EdgeExists(u, v));
        }
        let mut g = self.clone();
        let (au, av) = (u as usize, v as usize);
        let pos_v = g.adj[au].binary_search(&v).unwrap_err();
        g.adj[au].insert(pos_v, v);
        let pos_u = g.adj[av].binary_search(&u).unwrap_err();
        g.adj[av].insert(pos_u, u);
        g.m += 1;
        Ok(g)
    }

    /// New graph with edge (u,v) removed; the original is untouched.
    pub fn with_edge_removed(&self, u: u32, v: u32) -> Result<Graph> {
        self.check_vertex(u)?;
        self.check_vertex(v)?;
        if u == v {
            return Err(Error::SelfLoop(u));
        }
        if !self.has_edge(u, v) {
            return Err(Error::EdgeMissing(u, v));
        }
        let mut g = self.clone();
        let (au, av) = (u as usize, v as usize);
        let pos_v = g.adj[au].binary_search(&v).unwrap();
        g.adj[au].remove(pos_v);
        let pos_u = g.adj[av].binary_search(&u).unwrap();
        g.adj[av].remove(pos_u);
        g.m -= 1;
        Ok(g)
    }

    /// True iff one BFS from vertex 0 visits all n vertices.
    pub fn is_connected(&self) -> bool {
        let n = self.n();
        if n == 0 {
            return false;
        }
        let mut seen = vec![false; n];
        let mut queue = VecDeque::new();
        seen[0] = true;
        queue.push_back(0u32);
        let mut count = 1;
        while let Some(u) = queue.pop_front() {
            for &v in self.neighbors(u) {
                if !seen[v as usize] {
                    seen[v as usize] = true;
                    count += 1;
                    queue.push_back(v);
                }
            }
        }
        count == n
    }

    /// Connected component labels and component count.
    fn components(&self) -> (Vec<usize>, usize) {
        let n = self.n();
        let mut comp = vec![usize::MAX; n];
        let mut count = 0;
        for start in 0..n {
            if comp[start] != usize::MAX {
                continue;
            }
            comp[start] = count;
            let mut queue = VecDeque::from([start as u32]);
            while let Some(u) = queue.pop_front() {
                for &v in self.neighbors(u) {
                    if comp[v as usize] == usize::MAX {
                        comp[v as usize] = count;
                        queue.push_back(v);
                    }
                }
            }
            count += 1;
        }
        (comp, count)
    }

    /// Induced subgraph on the largest connected component, vertices
    /// relabeled densely in their original relative order. Ties between
    /// equal-sized components go to the one containing the smallest id.
    pub fn largest_component(&self) -> Graph {
        let (comp, count) = self.components();
        if count <= 1 {
            return self.clone();
        }
        let mut sizes = vec![0usize; count];
        for &c in &comp {
            sizes[c] += 1;
        }
        // Component labels are assigned in order of their smallest vertex,
        // so the first maximal entry is the tie-break winner.
        let best = (0..count)
            .max_by_key(|&c| (sizes[c], std::cmp::Reverse(c)))
            .unwrap();
        let mut remap = HashMap::new();
        for (v, &c) in comp.iter().enumerate() {
            if c == best {
                let next = remap.len() as u32;
                remap.insert(v as u32, next);
            }
        }
        let mut edges = Vec::new();
        for (u, v) in self.edges() {
            if comp[u as usize] == best {
                edges.push((remap[&u], remap[&v]));
            }
        }
        Graph::from_edges(remap.len(), &edges).expect("component of a valid graph is valid")
    }
}

/// What ingestion dropped and found while cleaning a raw edge list.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CleanReport {
    pub raw_vertices: usize,
    pub raw_edges: usize,
    pub dropped_self_loops: usize,
    pub dropped_duplicates: usize,
    pub dropped_isolated: usize,
    pub components_found: usize,
    pub kept_component_size: usize,
}

/// Load and clean an edge-list file.
///
/// Vertices are relabeled to dense ids preserving first-appearance order,
/// directed duplicates are merged, self-loops and isolated vertices dropped.
/// Connectedness is *not* enforced here; callers reduce with
/// [`Graph::largest_component`] explicitly.
pub fn load_edge_list<P: AsRef<Path>>(path: P) -> Result<(Graph, CleanReport)> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_edge_list(BufReader::new(file))
}

/// Parse the edge-list format from any reader. See [`load_edge_list`].
pub fn parse_edge_list<R: Read>(reader: R) -> Result<(Graph, CleanReport)> {
    let mut label_ids: HashMap<String, u32> = HashMap::new();
    let mut order: Vec<String> = Vec::new();
    let mut intern = |tok: &str, order: &mut Vec<String>| -> u32 {
        if let Some(&id) = label_ids.get(tok) {
            return id;
        }
        let id = order.len() as u32;
        label_ids.insert(tok.to_string(), id);
        order.push(tok.to_string());
        id
    };

    let mut report = CleanReport::default();
    let mut seen = HashSet::new();
    let mut raw_pairs: Vec<(u32, u32)> = Vec::new();

    for (idx, line) in BufReader::new(reader).lines().enumerate() {
        let line_no = idx + 1;
        let line = line.map_err(|source| Error::Io {
            path: "<input>".into(),
            source,
        })?;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let mut tokens = trimmed.split_whitespace();
        let (Some(a), Some(b)) = (tokens.next(), tokens.next()) else {
            return Err(Error::MalformedLine {
                line_no,
                content: trimmed.to_string(),
            });
        };
        // Third and later tokens (weights etc.) are ignored.
        report.raw_edges += 1;
        let u = intern(a, &mut order);
        let v = intern(b, &mut order);
        if u == v {
            report.dropped_self_loops += 1;
            continue;
        }
        let key = (u.min(v), u.max(v));
        if !seen.insert(key) {
            report.dropped_duplicates += 1;
            continue;
        }
        raw_pairs.push(key);
    }
    report.raw_vertices = order.len();

    // Drop vertices that lost every incident line to cleaning.
    let mut has_edge = vec![false; order.len()];
    for &(u, v) in &raw_pairs {
        has_edge[u as usize] = true;
        has_edge[v as usize] = true;
    }
    let mut dense = vec![u32::MAX; order.len()];
    let mut n = 0u32;
    for (v, &keep) in has_edge.iter().enumerate() {
        if keep {
            dense[v] = n;
            n += 1;
        } else {
            report.dropped_isolated += 1;
        }
    }
    if n == 0 {
        return Err(Error::EmptyGraph);
    }
    let edges: Vec<(u32, u32)> = raw_pairs
        .iter()
        .map(|&(u, v)| (dense[u as usize], dense[v as usize]))
        .collect();
    let graph = Graph::from_edges(n as usize, &edges)?;
    let (comp, count) = graph.components();
    report.components_found = count;
    let mut sizes = vec![0usize; count];
    for &c in &comp {
        sizes[c] += 1;
    }
    report.kept_component_size = sizes.iter().copied().max().unwrap_or(0);
    Ok((graph, report))
}

/// Exact edge connectivity: the minimum over vertex pairs of unit-capacity
/// max-flow. Computed as `min_t maxflow(0, t)`, which attains the same
/// minimum because every cut separates vertex 0 from someone. Returns 0 for
/// disconnected input. Intended for desk-scale validation.
pub fn edge_connectivity(g: &Graph) -> usize {
    if g.n() < 2 || !g.is_connected() {
        return 0;
    }
    (1..g.n() as u32)
        .map(|t| max_flow_unit(g, 0, t))
        .min()
        .unwrap_or(0)
}

/// Edmonds-Karp max-flow with every undirected edge as a pair of
/// unit-capacity arcs.
fn max_flow_unit(g: &Graph, source: u32, sink: u32) -> usize {
    let n = g.n();
    // Arc storage: arcs 2e and 2e+1 are twins.
    let mut arc_to: Vec<u32> = Vec::with_capacity(4 * g.m());
    let mut residual: Vec<i32> = Vec::with_capacity(4 * g.m());
    let mut head: Vec<Vec<u32>> = vec![Vec::new(); n];
    for (u, v) in g.edges() {
        for (a, b) in [(u, v), (v, u)] {
            head[a as usize].push(arc_to.len() as u32);
            arc_to.push(b);
            residual.push(1);
            head[b as usize].push(arc_to.len() as u32);
            arc_to.push(a);
            residual.push(0);
        }
    }
    let mut flow = 0;
    let mut parent_arc = vec![u32::MAX; n];
    loop {
        parent_arc.fill(u32::MAX);
        let mut queue = VecDeque::from([source]);
        let mut reached = false;
        'bfs: while let Some(u) = queue.pop_front() {
            for &a in &head[u as usize] {
                let v = arc_to[a as usize];
                if residual[a as usize] > 0 && parent_arc[v as usize] == u32::MAX && v != source {
                    parent_arc[v as usize] = a;
                    if v == sink {
                        reached = true;
                        break 'bfs;
                    }
                    queue.push_back(v);
                }
            }
        }
        if !reached {
            return flow;
        }
        // Unit capacities: each augmenting path carries exactly 1.
        let mut v = sink;
        while v != source {
            let a = parent_arc[v as usize] as usize;
            residual[a] -= 1;
            residual[a ^ 1] += 1;
            v = arc_to[a ^ 1];
        }
        flow += 1;
    }
}
