//! Private distance-query answerers: the smooth-sensitivity mechanism with
//! one-sided exponential noise for each neighbor operation, plus the
//! global-sensitivity SDP (two-sided Laplace) and ADP (one-sided
//! exponential) baselines with identical post-processing.
//!
//! Noise calibration follows the mechanism definitions: exponential noise
//! at rate lambda = epsilon / sensitivity (scale = sensitivity / epsilon),
//! Laplace at scale sensitivity / epsilon. One-sided samples are shifted by
//! their median (scale * ln 2) so the pre-rounding answer has median equal
//! to the true distance; random rounding then preserves expectation, and
//! truncation bounds the output range per operation.

use rand::Rng;

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::noise::{
    random_round, sample_exp_minus, sample_exp_plus, sample_laplace, stream_rng, PrivacyParams,
};
use crate::paths::{all_pairs_distances, bfs_distances, UNREACHABLE};
use crate::sensitivity::{smooth_sensitivity, NeighborOp};

const LN2: f64 = std::f64::consts::LN_2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MechanismKind {
    Iadp,
    Adp,
    Sdp,
}

impl MechanismKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            MechanismKind::Iadp => "iadp",
            MechanismKind::Adp => "adp",
            MechanismKind::Sdp => "sdp",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "iadp" => Ok(MechanismKind::Iadp),
            "adp" => Ok(MechanismKind::Adp),
            "sdp" => Ok(MechanismKind::Sdp),
            other => Err(Error::InvalidParameter(format!(
                "unknown mechanism {other:?}, expected iadp, adp or sdp"
            ))),
        }
    }

    /// Stable id used in stream derivation.
    pub fn stream_tag(&self) -> u64 {
        match self {
            MechanismKind::Iadp => 1,
            MechanismKind::Adp => 2,
            MechanismKind::Sdp => 3,
        }
    }
}

impl NeighborOp {
    pub fn stream_tag(&self) -> u64 {
        match self {
            NeighborOp::AddEdge => 1,
            NeighborOp::RemoveEdge => 2,
        }
    }
}

/// One private answer. `true_distance` exists for benchmarking only and is
/// never part of externally served output.
#[derive(Debug, Clone, PartialEq)]
pub struct QueryAnswer {
    pub u: u32,
    pub v: u32,
    pub true_distance: u32,
    pub noisy_distance: i64,
    pub sensitivity_used: f64,
    pub mechanism: MechanismKind,
    pub op: NeighborOp,
    pub params: PrivacyParams,
    pub seed: u64,
}

/// A mechanism with its sensitivity resolved and noise scale fixed.
///
/// Calibration happens once per (graph, mechanism, op, params) and the
/// result can answer any number of queries; this is also the seam that lets
/// validation feed neighbor-graph distances through a mechanism calibrated
/// on the actual graph.
#[derive(Debug, Clone, Copy)]
pub struct Calibrated {
    kind: MechanismKind,
    op: NeighborOp,
    params: PrivacyParams,
    sensitivity: f64,
    scale: f64,
    n: usize,
    clamp_lower: bool,
}

impl Calibrated {
    /// Resolve the sensitivity for `kind` on `g` and fix the noise scale.
    pub fn for_graph(
        g: &Graph,
        kind: MechanismKind,
        op: NeighborOp,
        params: PrivacyParams,
    ) -> Result<Calibrated> {
        let sensitivity = match kind {
            MechanismKind::Iadp => smooth_sensitivity(g, op, params.beta)?.ss,
            MechanismKind::Adp | MechanismKind::Sdp => {
                if !g.is_connected() {
                    return Err(Error::Disconnected);
                }
                (g.n() - 1) as f64
            }
        };
        Ok(Self::from_sensitivity(kind, op, params, sensitivity, g.n()))
    }

    /// Build directly from a precomputed sensitivity.
    pub fn from_sensitivity(
        kind: MechanismKind,
        op: NeighborOp,
        params: PrivacyParams,
        sensitivity: f64,
        n: usize,
    ) -> Calibrated {
        Calibrated {
            kind,
            op,
            params,
            sensitivity,
            scale: sensitivity / params.epsilon,
            n,
            clamp_lower: false,
        }
    }

    /// Also clamp add-edge answers below at 1. Post-processing beyond the
    /// base mechanism; off by default.
    pub fn with_lower_clamp(mut self, on: bool) -> Calibrated {
        self.clamp_lower = on;
        self
    }

    pub fn sensitivity(&self) -> f64 {
        self.sensitivity
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn kind(&self) -> MechanismKind {
        self.kind
    }

    pub fn op(&self) -> NeighborOp {
        self.op
    }

    /// Pre-rounding answer for a unit-scale noise draw `z` (non-negative
    /// exponential for add, non-positive for remove, standard Laplace for
    /// the SDP baseline).
    pub fn raw(&self, true_distance: u32, z: f64) -> f64 {
        let d = true_distance as f64;
        match (self.kind, self.op) {
            (MechanismKind::Sdp, _) => d + self.scale * z,
            (_, NeighborOp::AddEdge) => d + self.scale * z - self.scale * LN2,
            (_, NeighborOp::RemoveEdge) => d + self.scale * z + self.scale * LN2,
        }
    }

    fn clamp(&self, x: i64) -> i64 {
        let mut x = x;
        match self.op {
            NeighborOp::AddEdge => {
                x = x.min(self.n as i64 - 1);
                if self.clamp_lower {
                    x = x.max(1);
                }
            }
            NeighborOp::RemoveEdge => {
                x = x.max(1);
            }
        }
        x
    }

    /// Noise, rounding and truncation for one true distance. Consumes
    /// exactly two uniforms from `rng`.
    pub fn answer_distance<R: Rng + ?Sized>(&self, true_distance: u32, rng: &mut R) -> i64 {
        let z = match (self.kind, self.op) {
            (MechanismKind::Sdp, _) => sample_laplace(rng, 1.0).value,
            (_, NeighborOp::AddEdge) => sample_exp_plus(rng, 1.0).value,
            (_, NeighborOp::RemoveEdge) => sample_exp_minus(rng, 1.0).value,
        };
        let raw = self.raw(true_distance, z);
        self.clamp(random_round(rng, raw))
    }

    fn answer_pair<R: Rng + ?Sized>(
        &self,
        g: &Graph,
        u: u32,
        v: u32,
        rng: &mut R,
        seed: u64,
    ) -> Result<QueryAnswer> {
        g.check_vertex(u)?;
        g.check_vertex(v)?;
        if u == v {
            return Err(Error::InvalidParameter(
                "query endpoints must be distinct".into(),
            ));
        }
        let d = bfs_distances(g, u).dist[v as usize];
        if d == UNREACHABLE {
            return Err(Error::Disconnected);
        }
        Ok(QueryAnswer {
            u,
            v,
            true_distance: d,
            noisy_distance: self.answer_distance(d, rng),
            sensitivity_used: self.sensitivity,
            mechanism: self.kind,
            op: self.op,
            params: self.params,
            seed,
        })
    }
}

/// Answer one query with positive noise under the add-edge neighborhood.
pub fn answer_add<R: Rng + ?Sized>(
    g: &Graph,
    u: u32,
    v: u32,
    params: PrivacyParams,
    rng: &mut R,
    seed: u64,
) -> Result<QueryAnswer> {
    Calibrated::for_graph(g, MechanismKind::Iadp, NeighborOp::AddEdge, params)?
        .answer_pair(g, u, v, rng, seed)
}

/// Answer one query with negative noise under the remove-edge neighborhood.
/// The graph is expected to be 3-edge-connected; insufficient connectivity
/// surfaces as an absent-path error from the sensitivity scan.
pub fn answer_remove<R: Rng + ?Sized>(
    g: &Graph,
    u: u32,
    v: u32,
    params: PrivacyParams,
    rng: &mut R,
    seed: u64,
) -> Result<QueryAnswer> {
    Calibrated::for_graph(g, MechanismKind::Iadp, NeighborOp::RemoveEdge, params)?
        .answer_pair(g, u, v, rng, seed)
}

/// Laplace baseline at global sensitivity n-1, with the same rounding and
/// per-op truncation as the main mechanisms.
pub fn answer_sdp<R: Rng + ?Sized>(
    g: &Graph,
    u: u32,
    v: u32,
    params: PrivacyParams,
    rng: &mut R,
    op: NeighborOp,
    seed: u64,
) -> Result<QueryAnswer> {
    Calibrated::for_graph(g, MechanismKind::Sdp, op, params)?.answer_pair(g, u, v, rng, seed)
}

/// One-sided exponential baseline at global sensitivity n-1, median-aligned
/// like the main mechanisms.
pub fn answer_adp<R: Rng + ?Sized>(
    g: &Graph,
    u: u32,
    v: u32,
    params: PrivacyParams,
    rng: &mut R,
    op: NeighborOp,
    seed: u64,
) -> Result<QueryAnswer> {
    Calibrated::for_graph(g, MechanismKind::Adp, op, params)?.answer_pair(g, u, v, rng, seed)
}

impl Calibrated {
    /// One independent answer per ordered pair (u, v), u != v, in
    /// ascending order, from the stream identified by `seed`.
    pub fn answer_all_pairs(&self, g: &Graph, seed: u64) -> Result<Vec<QueryAnswer>> {
        let truth = all_pairs_distances(g);
        let n = g.n() as u32;
        let mut rng = stream_rng(seed, &[self.kind.stream_tag(), self.op.stream_tag()]);
        let mut out = Vec::with_capacity((n as usize) * (n as usize - 1));
        for u in 0..n {
            for v in 0..n {
                if u == v {
                    continue;
                }
                let d = truth[u as usize].dist[v as usize];
                if d == UNREACHABLE {
                    return Err(Error::Disconnected);
                }
                out.push(QueryAnswer {
                    u,
                    v,
                    true_distance: d,
                    noisy_distance: self.answer_distance(d, &mut rng),
                    sensitivity_used: self.sensitivity,
                    mechanism: self.kind,
                    op: self.op,
                    params: self.params,
                    seed,
                });
            }
        }
        Ok(out)
    }
}

/// One independent answer per ordered pair (u, v), u != v, in ascending
/// order. Sensitivity is resolved once and reused.
pub fn answer_all_pairs(
    g: &Graph,
    kind: MechanismKind,
    op: NeighborOp,
    params: PrivacyParams,
    seed: u64,
) -> Result<Vec<QueryAnswer>> {
    Calibrated::for_graph(g, kind, op, params)?.answer_all_pairs(g, seed)
}

/// Columns of the served-answer export: the query line fields plus the
/// sensitivity. True distances are benchmarking scaffolding and are never
/// written.
pub const ANSWERS_CSV_HEADER: &str =
    "u,v,noisy_distance,mechanism,op,epsilon,delta,seed,sensitivity_used";

pub fn write_answers_csv<W: std::io::Write>(answers: &[QueryAnswer], mut w: W) -> Result<()> {
    let io_err = |e: std::io::Error| Error::Csv(e.to_string());
    writeln!(w, "{ANSWERS_CSV_HEADER}").map_err(io_err)?;
    for a in answers {
        writeln!(
            w,
            "{},{},{},{},{},{},{},{},{}",
            a.u,
            a.v,
            a.noisy_distance,
            a.mechanism.as_str(),
            a.op.as_str(),
            a.params.epsilon,
            a.params.delta,
            a.seed,
            a.sensitivity_used
        )
        .map_err(io_err)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::noise::derive_params;
    use crate::synth;

    #[test]
    fn add_raw_matches_hand_evaluation() {
        // eps = 2, sensitivity 3 (diameter-4 graph), d = 2, injected z = 0.4:
        // scale = 3/2, raw = 2 + 1.5*0.4 - 1.5*ln2.
        let params = derive_params(2.0, 0.01).unwrap();
        let m =
            Calibrated::from_sensitivity(MechanismKind::Iadp, NeighborOp::AddEdge, params, 3.0, 5);
        assert_eq!(m.scale(), 1.5);
        let raw = m.raw(2, 0.4);
        assert!((raw - (2.6 - 1.5 * LN2)).abs() < 1e-12, "raw={raw}");
        assert!((raw - 1.56028).abs() < 1e-4);
    }

    #[test]
    fn remove_raw_matches_hand_evaluation() {
        // K4: ss = 1, eps = 2: scale = 0.5; injected z = -0.3, d = 1:
        // raw = 1 - 0.15 + 0.5*ln2.
        let params = derive_params(2.0, 0.01).unwrap();
        let m = Calibrated::from_sensitivity(
            MechanismKind::Iadp,
            NeighborOp::RemoveEdge,
            params,
            1.0,
            4,
        );
        let raw = m.raw(1, -0.3);
        assert!((raw - (0.85 + 0.5 * LN2)).abs() < 1e-12);
        assert!((raw - 1.19657).abs() < 1e-4);
    }

    #[test]
    fn median_draw_cancels_exactly() {
        let params = derive_params(7.0, 0.001).unwrap();
        let add =
            Calibrated::from_sensitivity(MechanismKind::Iadp, NeighborOp::AddEdge, params, 1.0, 5);
        assert_eq!(add.raw(3, LN2), 3.0);
        let remove = Calibrated::from_sensitivity(
            MechanismKind::Iadp,
            NeighborOp::RemoveEdge,
            params,
            4.0,
            5,
        );
        assert_eq!(remove.raw(3, -LN2), 3.0);
    }

    #[test]
    fn sdp_and_adp_scales() {
        let params = derive_params(1.0, 0.01).unwrap();
        let g = synth::dense_random_graph(34, 474, 7);
        let sdp =
            Calibrated::for_graph(&g, MechanismKind::Sdp, NeighborOp::AddEdge, params).unwrap();
        assert_eq!(sdp.sensitivity(), 33.0);
        assert_eq!(sdp.scale(), 33.0);
        assert_eq!(sdp.raw(2, 0.0), 2.0);

        let params8 = derive_params(8.0, 0.01).unwrap();
        let adp =
            Calibrated::for_graph(&g, MechanismKind::Adp, NeighborOp::AddEdge, params8).unwrap();
        assert_eq!(adp.sensitivity(), 33.0);
        assert_eq!(adp.scale(), 33.0 / 8.0);
        // Median cancellation holds for the baseline too.
        assert_eq!(adp.raw(2, LN2), 2.0);

        // Two-vertex graph: the global sensitivity bottoms out at 1.
        let p2 = synth::path_graph(2).unwrap();
        let tiny =
            Calibrated::for_graph(&p2, MechanismKind::Sdp, NeighborOp::AddEdge, params).unwrap();
        assert_eq!(tiny.scale(), 1.0 / params.epsilon);
    }

    #[test]
    fn add_answers_clamp_above_only() {
        let k4 = synth::complete_graph(4).unwrap();
        let params = derive_params(0.05, 0.01).unwrap(); // scale 20: noise dominates
        let m =
            Calibrated::for_graph(&k4, MechanismKind::Iadp, NeighborOp::AddEdge, params).unwrap();
        let mut rng = stream_rng(3, &[]);
        let mut seen_below_one = false;
        for _ in 0..20_000 {
            let a = m.answer_distance(1, &mut rng);
            assert!(a <= 3);
            if a < 1 {
                seen_below_one = true;
            }
        }
        // No lower clamp on the add path: the median shift drives some
        // answers to 0 or below.
        assert!(seen_below_one);

        let clamped = m.with_lower_clamp(true);
        for _ in 0..2_000 {
            assert!(clamped.answer_distance(1, &mut rng) >= 1);
        }
    }

    #[test]
    fn remove_answers_clamp_below() {
        let k4 = synth::complete_graph(4).unwrap();
        let params = derive_params(0.05, 0.01).unwrap();
        let m = Calibrated::for_graph(&k4, MechanismKind::Iadp, NeighborOp::RemoveEdge, params)
            .unwrap();
        let mut rng = stream_rng(4, &[]);
        for _ in 0..20_000 {
            assert!(m.answer_distance(3, &mut rng) >= 1);
        }
    }

    #[test]
    fn one_sidedness_of_pre_rounding_error() {
        let params = derive_params(1.0, 0.01).unwrap();
        let p6 = synth::path_graph(6).unwrap();
        let add =
            Calibrated::for_graph(&p6, MechanismKind::Iadp, NeighborOp::AddEdge, params).unwrap();
        let mut rng = stream_rng(5, &[]);
        let floor = -add.scale() * LN2;
        for _ in 0..10_000 {
            let z = sample_exp_plus(&mut rng, 1.0).value;
            assert!(add.raw(3, z) - 3.0 >= floor - 1e-12);
        }
    }

    #[test]
    fn pre_rounding_error_median_is_zero() {
        // The median shift centers the one-sided noise: the median of
        // (raw - true) must sit at zero before rounding and clamping.
        let params = derive_params(2.0, 0.01).unwrap();
        let n = 200_000;
        for (op, sign) in [(NeighborOp::AddEdge, 1.0), (NeighborOp::RemoveEdge, -1.0)] {
            let m = Calibrated::from_sensitivity(MechanismKind::Iadp, op, params, 3.0, 100);
            let mut rng = stream_rng(9, &[op.stream_tag()]);
            let mut errs: Vec<f64> = (0..n)
                .map(|_| m.raw(5, sign * sample_exp_plus(&mut rng, 1.0).value) - 5.0)
                .collect();
            errs.sort_by(|a, b| a.partial_cmp(b).unwrap());
            let median = errs[n / 2];
            assert!(median.abs() < 0.01, "{op:?} median {median}");
        }
    }

    #[test]
    fn all_pairs_count_and_determinism() {
        let p3 = synth::path_graph(3).unwrap();
        let params = derive_params(2.0, 0.01).unwrap();
        let a =
            answer_all_pairs(&p3, MechanismKind::Iadp, NeighborOp::AddEdge, params, 99).unwrap();
        assert_eq!(a.len(), 6);
        let b =
            answer_all_pairs(&p3, MechanismKind::Iadp, NeighborOp::AddEdge, params, 99).unwrap();
        assert_eq!(a, b);
        let c =
            answer_all_pairs(&p3, MechanismKind::Iadp, NeighborOp::AddEdge, params, 100).unwrap();
        assert_ne!(a, c);
        // Ordered ascending by (u, v).
        let pairs: Vec<(u32, u32)> = a.iter().map(|q| (q.u, q.v)).collect();
        assert_eq!(pairs, vec![(0, 1), (0, 2), (1, 0), (1, 2), (2, 0), (2, 1)]);
    }

    #[test]
    fn all_pairs_on_dense_small_graph_is_fast_and_complete() {
        let g = synth::dense_random_graph(34, 474, 7);
        let params = derive_params(8.0, 1.0 / 340.0).unwrap();
        let start = std::time::Instant::now();
        let answers =
            answer_all_pairs(&g, MechanismKind::Iadp, NeighborOp::AddEdge, params, 1).unwrap();
        assert_eq!(answers.len(), 34 * 33);
        assert!(start.elapsed().as_secs() < 1);
    }

    #[test]
    fn answers_csv_has_fixed_columns_and_no_true_distance() {
        let p3 = synth::path_graph(3).unwrap();
        let params = derive_params(2.0, 0.01).unwrap();
        let answers =
            answer_all_pairs(&p3, MechanismKind::Iadp, NeighborOp::AddEdge, params, 99).unwrap();
        let mut buf = Vec::new();
        write_answers_csv(&answers, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().count(), 7);
        assert!(text.starts_with(ANSWERS_CSV_HEADER));
        let row: Vec<&str> = text.lines().nth(1).unwrap().split(',').collect();
        assert_eq!(row.len(), ANSWERS_CSV_HEADER.split(',').count());
        assert_eq!(row[0], "0");
        assert_eq!(row[3], "iadp");
        // The true distance is deliberately not exported.
        assert!(!ANSWERS_CSV_HEADER.contains("true"));
    }

    #[test]
    fn query_rejects_equal_endpoints() {
        let k4 = synth::complete_graph(4).unwrap();
        let params = derive_params(1.0, 0.01).unwrap();
        let mut rng = stream_rng(1, &[]);
        assert!(answer_add(&k4, 2, 2, params, &mut rng, 1).is_err());
    }

    #[test]
    fn remove_mechanism_propagates_absent_paths() {
        let c6 = synth::cycle_graph(6).unwrap();
        let params = derive_params(1.0, 0.01).unwrap();
        let mut rng = stream_rng(1, &[]);
        assert!(matches!(
            answer_remove(&c6, 0, 3, params, &mut rng, 1),
            Err(Error::AbsentPaths { .. })
        ));
    }
}
