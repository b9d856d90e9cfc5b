//! Individual asymmetric sensitivity and smooth sensitivity of the
//! distance query under the two neighbor operations, plus brute-force
//! oracles for desk-scale validation.
//!
//! Add-edge: the largest possible drop of any pair distance is achieved by
//! joining two endpoints of the diameter, so iAS = diameter - 1 (floored at
//! 1 on complete graphs, where every edge still contributes 1 to some
//! distance). Distances only shrink under edge addition, so the one-step
//! smooth sensitivity equals iAS.
//!
//! Remove-edge: scanning all vertex pairs once and peeling up to three
//! successively edge-disjoint shortest paths yields the maxima
//! phi = max(|P2| - |P1|) and psi = max(|P3| - |P2|), combined as
//! ss = max(phi, psi * e^{-beta}). Total cost O(n^2 (n + m)) instead of the
//! naive O(|E|^2 n^2).

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::paths::{all_pairs_distances, diameter, shortest_path_masked, EdgeSet, UNREACHABLE};

/// The asymmetric neighbor operation defining the protected direction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum NeighborOp {
    AddEdge,
    RemoveEdge,
}

impl NeighborOp {
    pub fn as_str(&self) -> &'static str {
        match self {
            NeighborOp::AddEdge => "add",
            NeighborOp::RemoveEdge => "remove",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "add" => Ok(NeighborOp::AddEdge),
            "remove" => Ok(NeighborOp::RemoveEdge),
            other => Err(Error::InvalidParameter(format!(
                "unknown neighbor op {other:?}, expected add or remove"
            ))),
        }
    }
}

/// Sensitivity of the distance query for one graph and neighbor operation.
#[derive(Debug, Clone, PartialEq)]
pub struct SensitivityReport {
    pub op: NeighborOp,
    pub ias: f64,
    pub phi: Option<f64>,
    pub psi: Option<f64>,
    pub beta: f64,
    pub ss: f64,
    pub pairs_scanned: usize,
    /// Pairs whose required alternate path was absent. Always empty on
    /// success; failures surface the list through [`Error::AbsentPaths`].
    pub absent_path_pairs: Vec<(u32, u32)>,
}

impl SensitivityReport {
    /// Flat key=value block, one entry per line.
    pub fn to_kv_block(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("op={}\n", self.op.as_str()));
        out.push_str(&format!("ias={}\n", self.ias));
        if let Some(phi) = self.phi {
            out.push_str(&format!("phi={phi}\n"));
        }
        if let Some(psi) = self.psi {
            out.push_str(&format!("psi={psi}\n"));
        }
        out.push_str(&format!("beta={}\n", self.beta));
        out.push_str(&format!("ss={}\n", self.ss));
        out.push_str(&format!("pairs_scanned={}\n", self.pairs_scanned));
        out
    }

    pub fn csv_header() -> &'static str {
        "op,ias,phi,psi,beta,ss,pairs_scanned"
    }

    pub fn to_csv_row(&self) -> String {
        let opt = |x: Option<f64>| x.map(|v| v.to_string()).unwrap_or_default();
        format!(
            "{},{},{},{},{},{},{}",
            self.op.as_str(),
            self.ias,
            opt(self.phi),
            opt(self.psi),
            self.beta,
            self.ss,
            self.pairs_scanned
        )
    }
}

/// Smooth sensitivity under the add-edge neighborhood: iAS = diameter - 1,
/// floored at 1 for complete graphs, and SS = iAS.
pub fn add_edge_smooth_sensitivity(g: &Graph, beta: f64) -> Result<SensitivityReport> {
    if g.n() < 2 {
        return Err(Error::InvalidParameter(
            "add-edge sensitivity needs at least two vertices".into(),
        ));
    }
    let dia = diameter(g)?;
    let ias = if dia >= 2 { (dia - 1) as f64 } else { 1.0 };
    Ok(SensitivityReport {
        op: NeighborOp::AddEdge,
        ias,
        phi: None,
        psi: None,
        beta,
        ss: ias,
        pairs_scanned: g.n() * (g.n() - 1) / 2,
        absent_path_pairs: Vec::new(),
    })
}

/// Per-pair contributions to the remove-edge maxima.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PairTerms {
    /// |P2| - |P1| for non-adjacent pairs, |P2| - 1 for adjacent ones.
    pub phi_term: u32,
    /// |P3| - |P2|, present only for adjacent pairs.
    pub psi_term: Option<u32>,
}

/// Contribution of a single unordered pair to the phi/psi sets.
pub fn remove_edge_pair_terms(g: &Graph, u: u32, v: u32) -> Result<PairTerms> {
    pair_terms(g, u, v).ok_or(Error::AbsentPaths {
        pairs: vec![(u, v)],
    })
}

fn pair_terms(g: &Graph, u: u32, v: u32) -> Option<PairTerms> {
    let mut banned = EdgeSet::new();
    if g.has_edge(u, v) {
        banned.insert(u, v);
        let p2 = shortest_path_masked(g, u, v, &banned)?;
        banned.insert_path(&p2);
        let p3 = shortest_path_masked(g, u, v, &banned)?;
        Some(PairTerms {
            phi_term: p2.len() as u32 - 1,
            psi_term: Some((p3.len() - p2.len()) as u32),
        })
    } else {
        let p1 = shortest_path_masked(g, u, v, &banned)?;
        banned.insert_path(&p1);
        let p2 = shortest_path_masked(g, u, v, &banned)?;
        Some(PairTerms {
            phi_term: (p2.len() - p1.len()) as u32,
            psi_term: None,
        })
    }
}

/// The beta-independent maxima of the remove-edge pair scan.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RemoveEdgeTerms {
    pub phi: u32,
    pub psi: u32,
    pub pairs_scanned: usize,
}

/// Scan all unordered pairs and collect phi/psi maxima. Parallelized over
/// sources with a max-reduction; equal to the sequential result. Errors
/// with the full offending-pair list if any required path is absent.
pub fn remove_edge_terms(g: &Graph) -> Result<RemoveEdgeTerms> {
    if g.n() < 2 {
        return Err(Error::InvalidParameter(
            "remove-edge sensitivity needs at least two vertices".into(),
        ));
    }
    struct SourceScan {
        phi: u32,
        psi: u32,
        absent: Vec<(u32, u32)>,
    }

    let n = g.n() as u32;
    let per_source: Vec<SourceScan> = (0..n)
        .into_par_iter()
        .map(|u| {
            let mut scan = SourceScan {
                phi: 0,
                psi: 0,
                absent: Vec::new(),
            };
            for v in (u + 1)..n {
                match pair_terms(g, u, v) {
                    Some(t) => {
                        scan.phi = scan.phi.max(t.phi_term);
                        scan.psi = scan.psi.max(t.psi_term.unwrap_or(0));
                    }
                    None => scan.absent.push((u, v)),
                }
            }
            scan
        })
        .collect();
    let mut phi = 0;
    let mut psi = 0;
    let mut absent = Vec::new();
    for mut scan in per_source {
        phi = phi.max(scan.phi);
        psi = psi.max(scan.psi);
        absent.append(&mut scan.absent);
    }
    if !absent.is_empty() {
        absent.sort_unstable();
        return Err(Error::AbsentPaths { pairs: absent });
    }
    Ok(RemoveEdgeTerms {
        phi,
        psi,
        pairs_scanned: (n as usize) * (n as usize - 1) / 2,
    })
}

/// SS = max(phi, psi * e^{-beta}).
pub fn combine_smooth(phi: f64, psi: f64, beta: f64) -> f64 {
    phi.max(psi * (-beta).exp())
}

/// Smooth sensitivity under the remove-edge neighborhood.
///
/// Intended for 3-edge-connected graphs; insufficient connectivity (or a
/// greedy-peeling pathology) surfaces as [`Error::AbsentPaths`] rather than
/// contributing an infinite term.
pub fn remove_edge_smooth_sensitivity(g: &Graph, beta: f64) -> Result<SensitivityReport> {
    let terms = remove_edge_terms(g)?;
    let phi = terms.phi as f64;
    let psi = terms.psi as f64;
    Ok(SensitivityReport {
        op: NeighborOp::RemoveEdge,
        ias: phi,
        phi: Some(phi),
        psi: Some(psi),
        beta,
        ss: combine_smooth(phi, psi, beta),
        pairs_scanned: terms.pairs_scanned,
        absent_path_pairs: Vec::new(),
    })
}

/// Dispatch on the neighbor operation.
pub fn smooth_sensitivity(g: &Graph, op: NeighborOp, beta: f64) -> Result<SensitivityReport> {
    match op {
        NeighborOp::AddEdge => add_edge_smooth_sensitivity(g, beta),
        NeighborOp::RemoveEdge => remove_edge_smooth_sensitivity(g, beta),
    }
}

fn finite_distance(d: u32) -> Result<i64> {
    if d == UNREACHABLE {
        Err(Error::Disconnected)
    } else {
        Ok(d as i64)
    }
}

/// Brute-force individual asymmetric sensitivity: enumerate every one-step
/// neighbor and take the worst pair-distance change. Oracle scale only.
pub fn brute_force_ias(g: &Graph, op: NeighborOp) -> Result<f64> {
    let base = all_pairs_distances(g);
    let n = g.n() as u32;
    let mut best: i64 = 0;
    match op {
        NeighborOp::AddEdge => {
            for s in 0..n {
                for t in (s + 1)..n {
                    if g.has_edge(s, t) {
                        continue;
                    }
                    let after = all_pairs_distances(&g.with_edge_added(s, t)?);
                    for u in 0..n as usize {
                        for v in 0..n as usize {
                            let before = finite_distance(base[u].dist[v])?;
                            let now = finite_distance(after[u].dist[v])?;
                            best = best.max(before - now);
                        }
                    }
                }
            }
        }
        NeighborOp::RemoveEdge => {
            for (s, t) in g.edges() {
                let removed = g.with_edge_removed(s, t)?;
                if !removed.is_connected() {
                    return Err(Error::BridgeEdge(s, t));
                }
                let after = all_pairs_distances(&removed);
                for u in 0..n as usize {
                    for v in 0..n as usize {
                        let before = finite_distance(base[u].dist[v])?;
                        let now = finite_distance(after[u].dist[v])?;
                        best = best.max(now - before);
                    }
                }
            }
        }
    }
    // Complete graphs have no add-edge neighbor and a zero change would
    // answer queries unmasked, so 1 is the floor under either operation.
    Ok((best.max(1)) as f64)
}

/// Brute-force one-step smooth sensitivity:
/// max(iAS(g), e^{-beta} * max over one-step neighbors g' of iAS(g')).
pub fn brute_force_smooth_sensitivity(g: &Graph, op: NeighborOp, beta: f64) -> Result<f64> {
    let own = brute_force_ias(g, op)?;
    let n = g.n() as u32;
    let mut neighbor_best: f64 = 0.0;
    match op {
        NeighborOp::AddEdge => {
            for s in 0..n {
                for t in (s + 1)..n {
                    if !g.has_edge(s, t) {
                        let ias = brute_force_ias(&g.with_edge_added(s, t)?, op)?;
                        neighbor_best = neighbor_best.max(ias);
                    }
                }
            }
        }
        NeighborOp::RemoveEdge => {
            for (s, t) in g.edges() {
                let removed = g.with_edge_removed(s, t)?;
                if !removed.is_connected() {
                    return Err(Error::BridgeEdge(s, t));
                }
                let ias = brute_force_ias(&removed, op)?;
                neighbor_best = neighbor_best.max(ias);
            }
        }
    }
    Ok(own.max(neighbor_best * (-beta).exp()))
}
