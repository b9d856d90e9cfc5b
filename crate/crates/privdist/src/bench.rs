//! Experiment harness: epsilon sweeps across mechanisms, all-pair mean
//! relative error, repetition averaging, CSV emission.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;
use std::time::Instant;

use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::mechanisms::{Calibrated, MechanismKind, QueryAnswer};
use crate::noise::{derive_params, derive_stream_seed};
use crate::paths::{all_pairs_distances, DistanceRow, UNREACHABLE};
use crate::sensitivity::{
    add_edge_smooth_sensitivity, combine_smooth, remove_edge_terms, NeighborOp,
};
use rand::SeedableRng;

/// One sweep: a graph, a neighbor operation, a mechanism subset, an epsilon
/// list and a repetition count.
#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub dataset: String,
    pub graph: Graph,
    pub op: NeighborOp,
    pub mechanisms: Vec<MechanismKind>,
    pub epsilons: Vec<f64>,
    /// Defaults to 1/(10 n) when unset.
    pub delta: Option<f64>,
    pub repetitions: usize,
    pub master_seed: u64,
    pub clamp_lower: bool,
}

/// One (mechanism, epsilon, repetition) cell.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentRecord {
    pub dataset: String,
    pub mechanism: MechanismKind,
    pub op: NeighborOp,
    pub epsilon: f64,
    pub delta: f64,
    pub rep: usize,
    pub seed: u64,
    pub mre: f64,
    pub wall_ms: u64,
}

/// All-pair distance mean relative error over the n^2 - n ordered pairs:
/// (1/(n^2-n)) * sum |noisy - true| / true.
pub fn mre(truth: &[DistanceRow], answers: &[QueryAnswer]) -> Result<f64> {
    let n = truth.len();
    if n < 2 {
        return Err(Error::InvalidParameter(
            "mre needs at least two vertices".into(),
        ));
    }
    let expected = n * n - n;
    if answers.len() != expected {
        return Err(Error::InvalidParameter(format!(
            "mre needs {expected} ordered-pair answers, got {}",
            answers.len()
        )));
    }
    let mut seen = vec![false; n * n];
    let mut sum = 0.0;
    for a in answers {
        let (u, v) = (a.u as usize, a.v as usize);
        if u >= n || v >= n || u == v {
            return Err(Error::InvalidParameter(format!(
                "bad answer pair ({},{})",
                a.u, a.v
            )));
        }
        if std::mem::replace(&mut seen[u * n + v], true) {
            return Err(Error::InvalidParameter(format!(
                "duplicate answer for pair ({},{})",
                a.u, a.v
            )));
        }
        let d = truth[u].dist[v];
        if d == UNREACHABLE {
            return Err(Error::Disconnected);
        }
        assert!(d >= 1, "off-diagonal zero distance on a simple graph");
        sum += (a.noisy_distance as f64 - d as f64).abs() / d as f64;
    }
    Ok(sum / expected as f64)
}

fn validate(cfg: &ExperimentConfig) -> Result<()> {
    if cfg.dataset.contains(',') || cfg.dataset.contains('\n') {
        return Err(Error::InvalidParameter(
            "dataset label must not contain commas or newlines".into(),
        ));
    }
    if cfg.mechanisms.is_empty() {
        return Err(Error::InvalidParameter("no mechanisms selected".into()));
    }
    if cfg.epsilons.is_empty() {
        return Err(Error::InvalidParameter("epsilon list is empty".into()));
    }
    if cfg.epsilons.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidParameter(
            "epsilon list must be strictly ascending".into(),
        ));
    }
    if cfg.repetitions < 1 {
        return Err(Error::InvalidParameter("repetitions must be >= 1".into()));
    }
    if !cfg.graph.is_connected() {
        return Err(Error::Disconnected);
    }
    Ok(())
}

/// Run the sweep. True distances are computed once; the remove-edge
/// phi/psi scan runs once and only the beta recombination varies with
/// epsilon. Cells run in parallel on streams keyed by
/// (master_seed, mechanism, epsilon index, repetition); output order is
/// (mechanism, epsilon, repetition) regardless of scheduling.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<Vec<ExperimentRecord>> {
    validate(cfg)?;
    let n = cfg.graph.n();
    let delta = cfg.delta.unwrap_or(1.0 / (10.0 * n as f64));
    let truth = all_pairs_distances(&cfg.graph);

    // Beta-independent sensitivity inputs, resolved once.
    let smooth_base = match cfg.op {
        NeighborOp::AddEdge => {
            // Beta does not enter the add-edge value; any admissible one works.
            let report = add_edge_smooth_sensitivity(&cfg.graph, 1.0)?;
            (report.ss, 0.0)
        }
        NeighborOp::RemoveEdge => {
            let terms = remove_edge_terms(&cfg.graph)?;
            (terms.phi as f64, terms.psi as f64)
        }
    };

    struct Cell {
        mechanism: MechanismKind,
        epsilon: f64,
        rep: usize,
        seed: u64,
        calibrated: Calibrated,
    }

    let mut cells = Vec::new();
    for &mechanism in &cfg.mechanisms {
        for (ei, &epsilon) in cfg.epsilons.iter().enumerate() {
            let params = derive_params(epsilon, delta)?;
            let sensitivity = match mechanism {
                MechanismKind::Iadp => match cfg.op {
                    NeighborOp::AddEdge => smooth_base.0,
                    NeighborOp::RemoveEdge => {
                        combine_smooth(smooth_base.0, smooth_base.1, params.beta)
                    }
                },
                MechanismKind::Adp | MechanismKind::Sdp => (n - 1) as f64,
            };
            let calibrated =
                Calibrated::from_sensitivity(mechanism, cfg.op, params, sensitivity, n)
                    .with_lower_clamp(cfg.clamp_lower);
            for rep in 0..cfg.repetitions {
                let seed = derive_stream_seed(
                    cfg.master_seed,
                    &[mechanism.stream_tag(), ei as u64, rep as u64],
                );
                cells.push(Cell {
                    mechanism,
                    epsilon,
                    rep,
                    seed,
                    calibrated,
                });
            }
        }
    }

    let records: Result<Vec<ExperimentRecord>> = cells
        .par_iter()
        .map(|cell| {
            let start = Instant::now();
            let mut rng = ChaCha8Rng::seed_from_u64(cell.seed);
            let mut sum = 0.0;
            for (u, row) in truth.iter().enumerate() {
                for (v, &d) in row.dist.iter().enumerate() {
                    if u == v {
                        continue;
                    }
                    if d == UNREACHABLE {
                        return Err(Error::Disconnected);
                    }
                    let noisy = cell.calibrated.answer_distance(d, &mut rng);
                    sum += (noisy as f64 - d as f64).abs() / d as f64;
                }
            }
            Ok(ExperimentRecord {
                dataset: cfg.dataset.clone(),
                mechanism: cell.mechanism,
                op: cfg.op,
                epsilon: cell.epsilon,
                delta,
                rep: cell.rep,
                seed: cell.seed,
                mre: sum / (n * n - n) as f64,
                wall_ms: start.elapsed().as_millis() as u64,
            })
        })
        .collect();
    records
}

pub const CSV_HEADER: &str = "dataset,mechanism,op,epsilon,delta,rep,seed,mre,wall_ms";

/// Write header plus one row per record. Floats use the shortest
/// round-tripping representation.
pub fn write_csv<W: Write>(records: &[ExperimentRecord], mut w: W) -> Result<()> {
    let io_err = |e: std::io::Error| Error::Csv(e.to_string());
    writeln!(w, "{CSV_HEADER}").map_err(io_err)?;
    for r in records {
        writeln!(
            w,
            "{},{},{},{},{},{},{},{},{}",
            r.dataset,
            r.mechanism.as_str(),
            r.op.as_str(),
            r.epsilon,
            r.delta,
            r.rep,
            r.seed,
            r.mre,
            r.wall_ms
        )
        .map_err(io_err)?;
    }
    Ok(())
}

pub fn write_csv_file<P: AsRef<Path>>(records: &[ExperimentRecord], path: P) -> Result<()> {
    let file = File::create(path.as_ref()).map_err(|source| Error::Io {
        path: path.as_ref().to_path_buf(),
        source,
    })?;
    write_csv(records, BufWriter::new(file))
}

/// Parse a CSV produced by [`write_csv`].
pub fn read_csv_file<P: AsRef<Path>>(path: P) -> Result<Vec<ExperimentRecord>> {
    let file = File::open(path.as_ref()).map_err(|source| Error::Io {
        path: path.as_ref().to_path_buf(),
        source,
    })?;
    let mut lines = BufReader::new(file).lines();
    let header = lines
        .next()
        .transpose()
        .map_err(|e| Error::Csv(e.to_string()))?
        .ok_or_else(|| Error::Csv("empty file".into()))?;
    if header != CSV_HEADER {
        return Err(Error::Csv(format!("unexpected header {header:?}")));
    }
    let mut out = Vec::new();
    for (idx, line) in lines.enumerate() {
        let line = line.map_err(|e| Error::Csv(e.to_string()))?;
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 9 {
            return Err(Error::Csv(format!("row {}: expected 9 fields", idx + 2)));
        }
        let parse_f = |s: &str| -> Result<f64> {
            s.parse()
                .map_err(|_| Error::Csv(format!("row {}: bad float {s:?}", idx + 2)))
        };
        let parse_u = |s: &str| -> Result<u64> {
            s.parse()
                .map_err(|_| Error::Csv(format!("row {}: bad integer {s:?}", idx + 2)))
        };
        out.push(ExperimentRecord {
            dataset: fields[0].to_string(),
            mechanism: MechanismKind::parse(fields[1])?,
            op: NeighborOp::parse(fields[2])?,
            epsilon: parse_f(fields[3])?,
            delta: parse_f(fields[4])?,
            rep: parse_u(fields[5])? as usize,
            seed: parse_u(fields[6])?,
            mre: parse_f(fields[7])?,
            wall_ms: parse_u(fields[8])?,
        });
    }
    Ok(out)
}

/// Mean and sample standard deviation of the per-repetition MREs in one
/// (mechanism, epsilon) group.
pub fn mean_and_std(values: &[f64]) -> (f64, f64) {
    let n = values.len();
    let mean = values.iter().sum::<f64>() / n as f64;
    if n < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1) as f64;
    (mean, var.sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::noise::derive_params;
    use crate::synth;

    fn fake_answers(truth: &[DistanceRow], noisy: i64) -> Vec<QueryAnswer> {
        let n = truth.len();
        let params = derive_params(1.0, 0.01).unwrap();
        let mut out = Vec::new();
        for u in 0..n as u32 {
            for v in 0..n as u32 {
                if u != v {
                    out.push(QueryAnswer {
                        u,
                        v,
                        true_distance: truth[u as usize].dist[v as usize],
                        noisy_distance: noisy,
                        sensitivity_used: 1.0,
                        mechanism: MechanismKind::Iadp,
                        op: NeighborOp::AddEdge,
                        params,
                        seed: 0,
                    });
                }
            }
        }
        out
    }

    #[test]
    fn mre_identity_is_zero() {
        let g = synth::cycle_graph(5).unwrap();
        let truth = all_pairs_distances(&g);
        let mut answers = fake_answers(&truth, 0);
        for a in &mut answers {
            a.noisy_distance = a.true_distance as i64;
        }
        assert_eq!(mre(&truth, &answers).unwrap(), 0.0);
    }

    #[test]
    fn mre_two_vertex_example() {
        let g = synth::path_graph(2).unwrap();
        let truth = all_pairs_distances(&g);
        let answers = fake_answers(&truth, 2);
        assert_eq!(mre(&truth, &answers).unwrap(), 1.0);
    }

    #[test]
    fn mre_three_vertex_path_example() {
        // Ordered true distances 1,1,1,1,2,2; all answers 2 gives
        // (1/6)(1+1+1+1+0+0) = 2/3.
        let g = synth::path_graph(3).unwrap();
        let truth = all_pairs_distances(&g);
        let answers = fake_answers(&truth, 2);
        let eta = mre(&truth, &answers).unwrap();
        assert!((eta - 2.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn mre_rejects_size_mismatch() {
        let g = synth::path_graph(3).unwrap();
        let truth = all_pairs_distances(&g);
        let mut answers = fake_answers(&truth, 2);
        answers.pop();
        assert!(mre(&truth, &answers).is_err());
    }

    fn small_config() -> ExperimentConfig {
        ExperimentConfig {
            dataset: "p4".into(),
            graph: synth::path_graph(4).unwrap(),
            op: NeighborOp::AddEdge,
            mechanisms: vec![MechanismKind::Iadp, MechanismKind::Sdp],
            epsilons: vec![1.0, 2.0],
            delta: None,
            repetitions: 3,
            master_seed: 17,
            clamp_lower: false,
        }
    }

    #[test]
    fn experiment_cartesian_count_and_order() {
        let records = run_experiment(&small_config()).unwrap();
        assert_eq!(records.len(), 12);
        assert_eq!(records[0].mechanism, MechanismKind::Iadp);
        assert_eq!(records[0].epsilon, 1.0);
        assert_eq!(records[0].rep, 0);
        assert_eq!(records[11].mechanism, MechanismKind::Sdp);
        assert_eq!(records[11].epsilon, 2.0);
        assert_eq!(records[11].rep, 2);
        // Default delta is 1/(10 n).
        assert_eq!(records[0].delta, 1.0 / 40.0);
    }

    #[test]
    fn experiment_is_deterministic_modulo_wall_ms() {
        let a = run_experiment(&small_config()).unwrap();
        let b = run_experiment(&small_config()).unwrap();
        for (x, y) in a.iter().zip(&b) {
            assert_eq!(x.mre, y.mre);
            assert_eq!(x.seed, y.seed);
        }
    }

    #[test]
    fn experiment_rejects_bad_epsilons() {
        let mut cfg = small_config();
        cfg.epsilons = vec![2.0, 1.0];
        assert!(run_experiment(&cfg).is_err());
        cfg.epsilons = vec![];
        assert!(run_experiment(&cfg).is_err());
    }

    #[test]
    fn csv_round_trip() {
        let records = run_experiment(&small_config()).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("r.csv");
        write_csv_file(&records, &path).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        assert_eq!(text.lines().count(), 13);
        assert!(text.starts_with(CSV_HEADER));
        let back = read_csv_file(&path).unwrap();
        assert_eq!(records, back);

        write_csv_file(&[], &path).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        assert_eq!(text.lines().count(), 1);
    }
}
