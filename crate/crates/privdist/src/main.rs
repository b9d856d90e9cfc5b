//! Command-line surface: stats, generate, sensitivity, query, experiment.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Parser, Subcommand};

use privdist::bench::{self, ExperimentConfig};
use privdist::error::{Error, Result};
use privdist::graph::{edge_connectivity, load_edge_list, CleanReport, Graph};
use privdist::mechanisms::{Calibrated, MechanismKind};
use privdist::noise::{derive_params, stream_rng};
use privdist::paths::{
    avg_distance, bfs_distances, degree_stats, diameter, diameter_upper_bound, UNREACHABLE,
};
use privdist::sensitivity::{smooth_sensitivity, NeighborOp};
use privdist::synth::{harary, HararySpec};

const SEED_ENV: &str = "PRIVDIST_SEED";
const EDGE_CONNECTIVITY_CAP: usize = 5_000;

#[derive(Parser)]
#[command(
    name = "privdist",
    version,
    about = "Differentially private distance queries on unweighted graphs"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print structural statistics for an edge-list file
    Stats {
        graph: PathBuf,
        /// Reduce to the largest connected component first
        #[arg(long)]
        largest_component: bool,
        /// Also export all-pairs distances as CSV (u,v,distance)
        #[arg(long, value_name = "FILE")]
        distances_out: Option<PathBuf>,
    },
    /// Generate synthetic graphs in the edge-list format
    Generate {
        #[command(subcommand)]
        family: Generate,
    },
    /// Compute the smooth sensitivity of the distance query
    Sensitivity {
        graph: PathBuf,
        /// Neighbor operation: add | remove
        #[arg(long)]
        op: String,
        #[arg(long)]
        eps: f64,
        /// Defaults to 1/(10 n)
        #[arg(long)]
        delta: Option<f64>,
        #[arg(long)]
        largest_component: bool,
        /// Emit a CSV row instead of the key=value block
        #[arg(long)]
        csv: bool,
    },
    /// Answer private distance queries (one pair, or all ordered pairs as CSV)
    Query {
        graph: PathBuf,
        #[arg(long, required_unless_present = "all_pairs")]
        u: Option<u32>,
        #[arg(long, required_unless_present = "all_pairs")]
        v: Option<u32>,
        #[arg(long)]
        eps: f64,
        /// Defaults to 1/(10 n)
        #[arg(long)]
        delta: Option<f64>,
        /// Neighbor operation: add | remove
        #[arg(long)]
        op: String,
        /// Mechanism: iadp | adp | sdp
        #[arg(long)]
        mech: String,
        /// Master seed (falls back to PRIVDIST_SEED, then a time default)
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        largest_component: bool,
        /// Additionally clamp add-edge answers below at 1 (post-processing
        /// beyond the base mechanism)
        #[arg(long)]
        clamp_lower: bool,
        /// Answer every ordered pair and write them as CSV to --out
        #[arg(long, requires = "out", conflicts_with_all = ["u", "v"])]
        all_pairs: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run an epsilon sweep and write per-repetition MREs as CSV
    Experiment {
        /// Edge-list file to load
        #[arg(long, conflicts_with = "harary")]
        graph: Option<PathBuf>,
        /// Generate a Harary graph instead, as "K,N"
        #[arg(long, value_name = "K,N")]
        harary: Option<String>,
        /// Neighbor operation: add | remove
        #[arg(long)]
        op: String,
        /// Comma-separated mechanism list, e.g. iadp,adp,sdp
        #[arg(long)]
        mechs: String,
        /// Epsilon sweep as from:to:step (inclusive), a comma list, or one value
        #[arg(long)]
        eps: String,
        #[arg(long, default_value_t = 20)]
        reps: usize,
        /// Defaults to 1/(10 n)
        #[arg(long)]
        delta: Option<f64>,
        #[arg(long)]
        seed: Option<u64>,
        /// Dataset label for the CSV (defaults to the file stem)
        #[arg(long)]
        label: Option<String>,
        #[arg(long)]
        largest_component: bool,
        #[arg(long)]
        clamp_lower: bool,
        #[arg(short, long)]
        out: PathBuf,
    },
}

#[derive(Subcommand)]
enum Generate {
    /// Harary graph H_{k,n}
    Harary {
        #[arg(long)]
        k: usize,
        #[arg(long)]
        n: usize,
        #[arg(short, long)]
        out: PathBuf,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error[{}]: {e}", e.code());
            ExitCode::FAILURE
        }
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Stats {
            graph,
            largest_component,
            distances_out,
        } => cmd_stats(&graph, largest_component, distances_out.as_deref()),
        Command::Generate { family } => match family {
            Generate::Harary { k, n, out } => cmd_generate_harary(k, n, &out),
        },
        Command::Sensitivity {
            graph,
            op,
            eps,
            delta,
            largest_component,
            csv,
        } => cmd_sensitivity(&graph, &op, eps, delta, largest_component, csv),
        Command::Query {
            graph,
            u,
            v,
            eps,
            delta,
            op,
            mech,
            seed,
            largest_component,
            clamp_lower,
            all_pairs,
            out,
        } => cmd_query(QueryArgs {
            graph,
            u,
            v,
            eps,
            delta,
            op,
            mech,
            seed,
            largest_component,
            clamp_lower,
            all_pairs,
            out,
        }),
        Command::Experiment {
            graph,
            harary,
            op,
            mechs,
            eps,
            reps,
            delta,
            seed,
            label,
            largest_component,
            clamp_lower,
            out,
        } => cmd_experiment(
            graph.as_deref(),
            harary.as_deref(),
            &op,
            &mechs,
            &eps,
            reps,
            delta,
            seed,
            label,
            largest_component,
            clamp_lower,
            &out,
        ),
    }
}

/// Flag beats the environment variable beats a time-based default; the
/// default case is echoed so a run can be reproduced.
fn resolve_seed(flag: Option<u64>) -> Result<(u64, bool)> {
    if let Some(s) = flag {
        return Ok((s, false));
    }
    if let Ok(raw) = std::env::var(SEED_ENV) {
        let s = raw.parse::<u64>().map_err(|_| {
            Error::InvalidParameter(format!("{SEED_ENV}={raw:?} is not a valid u64 seed"))
        })?;
        return Ok((s, false));
    }
    let nanos = SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_nanos() as u64)
        .unwrap_or(0);
    Ok((nanos, true))
}

fn load(path: &Path, reduce: bool) -> Result<(Graph, CleanReport)> {
    let (g, report) = load_edge_list(path)?;
    let g = if reduce { g.largest_component() } else { g };
    Ok((g, report))
}

fn cmd_stats(path: &Path, reduce: bool, distances_out: Option<&Path>) -> Result<()> {
    let (g, report) = load(path, reduce)?;
    println!("raw_vertices={}", report.raw_vertices);
    println!("raw_edges={}", report.raw_edges);
    println!("dropped_self_loops={}", report.dropped_self_loops);
    println!("dropped_duplicates={}", report.dropped_duplicates);
    println!("dropped_isolated={}", report.dropped_isolated);
    println!("components_found={}", report.components_found);
    println!("kept_component_size={}", report.kept_component_size);
    println!("n={}", g.n());
    println!("m={}", g.m());
    let connected = g.is_connected();
    println!("connected={connected}");
    let stats = degree_stats(&g);
    println!("min_degree={}", stats.min_degree);
    println!("distinct_degree_count={}", stats.distinct_degree_count);
    if connected {
        let d = diameter(&g)?;
        println!("diameter={d}");
        if g.n() >= 2 {
            println!("avg_distance={:.4}", avg_distance(&g)?);
        }
        println!(
            "diameter_upper_bound={}",
            diameter_upper_bound(&stats, g.n(), d)
        );
    } else {
        println!("diameter=skipped(disconnected)");
    }
    if g.n() <= EDGE_CONNECTIVITY_CAP {
        println!("edge_connectivity={}", edge_connectivity(&g));
    } else {
        println!("edge_connectivity=skipped(n>{EDGE_CONNECTIVITY_CAP})");
    }
    if let Some(out) = distances_out {
        write_distances_csv(&g, out)?;
        println!("distances_out={}", out.display());
    }
    Ok(())
}

fn write_distances_csv(g: &Graph, path: &Path) -> Result<()> {
    let file = File::create(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let mut w = BufWriter::new(file);
    let io_err = |e: std::io::Error| Error::Csv(e.to_string());
    writeln!(w, "u,v,distance").map_err(io_err)?;
    for u in 0..g.n() as u32 {
        let row = bfs_distances(g, u);
        for (v, &d) in row.dist.iter().enumerate() {
            if u as usize == v {
                continue;
            }
            if d == UNREACHABLE {
                writeln!(w, "{u},{v},unreachable").map_err(io_err)?;
            } else {
                writeln!(w, "{u},{v},{d}").map_err(io_err)?;
            }
        }
    }
    Ok(())
}

fn cmd_generate_harary(k: usize, n: usize, out: &Path) -> Result<()> {
    let g = harary(&HararySpec { k, n })?;
    let file = File::create(out).map_err(|source| Error::Io {
        path: out.to_path_buf(),
        source,
    })?;
    let mut w = BufWriter::new(file);
    let io_err = |e: std::io::Error| Error::Csv(e.to_string());
    writeln!(w, "# harary k={k} n={n}").map_err(io_err)?;
    // Ordered by (max, min): every vertex k has the cycle neighbor k-1, so
    // labels first appear in 0..n-1 order and re-parsing the file keeps the
    // construction's vertex ids.
    let mut edges = g.edges();
    edges.sort_unstable_by_key(|&(u, v)| (u.max(v), u.min(v)));
    for (u, v) in edges {
        writeln!(w, "{u} {v}").map_err(io_err)?;
    }
    println!("n={} m={} out={}", g.n(), g.m(), out.display());
    Ok(())
}

fn default_delta(n: usize) -> f64 {
    1.0 / (10.0 * n as f64)
}

fn cmd_sensitivity(
    path: &Path,
    op: &str,
    eps: f64,
    delta: Option<f64>,
    reduce: bool,
    csv: bool,
) -> Result<()> {
    let (g, _) = load(path, reduce)?;
    let op = NeighborOp::parse(op)?;
    let params = derive_params(eps, delta.unwrap_or_else(|| default_delta(g.n())))?;
    let report = smooth_sensitivity(&g, op, params.beta)?;
    if csv {
        println!("{}", privdist::SensitivityReport::csv_header());
        println!("{}", report.to_csv_row());
    } else {
        print!("{}", report.to_kv_block());
    }
    Ok(())
}

struct QueryArgs {
    graph: PathBuf,
    u: Option<u32>,
    v: Option<u32>,
    eps: f64,
    delta: Option<f64>,
    op: String,
    mech: String,
    seed: Option<u64>,
    largest_component: bool,
    clamp_lower: bool,
    all_pairs: bool,
    out: Option<PathBuf>,
}

fn cmd_query(args: QueryArgs) -> Result<()> {
    let (g, _) = load(&args.graph, args.largest_component)?;
    let op = NeighborOp::parse(&args.op)?;
    let mech = MechanismKind::parse(&args.mech)?;
    let delta = args.delta.unwrap_or_else(|| default_delta(g.n()));
    let params = derive_params(args.eps, delta)?;
    let (seed, defaulted) = resolve_seed(args.seed)?;
    let calibrated =
        Calibrated::for_graph(&g, mech, op, params)?.with_lower_clamp(args.clamp_lower);
    if defaulted {
        println!("# seed defaulted; rerun with --seed {seed} to reproduce");
    }
    if args.all_pairs {
        let out = args.out.expect("clap enforces --out with --all-pairs");
        let answers = calibrated.answer_all_pairs(&g, seed)?;
        let file = File::create(&out).map_err(|source| Error::Io {
            path: out.clone(),
            source,
        })?;
        privdist::mechanisms::write_answers_csv(&answers, BufWriter::new(file))?;
        println!("answers={} out={}", answers.len(), out.display());
        return Ok(());
    }
    let (u, v) = (args.u.unwrap(), args.v.unwrap());
    g.check_vertex(u)?;
    g.check_vertex(v)?;
    if u == v {
        return Err(Error::InvalidParameter(
            "query endpoints must be distinct".into(),
        ));
    }
    let d = bfs_distances(&g, u).dist[v as usize];
    if d == UNREACHABLE {
        return Err(Error::Disconnected);
    }
    let mut rng = stream_rng(
        seed,
        &[mech.stream_tag(), op.stream_tag(), u as u64, v as u64],
    );
    let noisy = calibrated.answer_distance(d, &mut rng);
    println!(
        "{u} {v} {noisy} {} {} {} {} {seed}",
        mech.as_str(),
        op.as_str(),
        params.epsilon,
        params.delta
    );
    Ok(())
}

fn parse_mechs(s: &str) -> Result<Vec<MechanismKind>> {
    let mut out = Vec::new();
    for tok in s.split(',') {
        let kind = MechanismKind::parse(tok.trim())?;
        if out.contains(&kind) {
            return Err(Error::InvalidParameter(format!(
                "mechanism {tok:?} listed twice"
            )));
        }
        out.push(kind);
    }
    Ok(out)
}

/// "from:to:step" inclusive of both endpoints, or a comma list, or a single
/// value.
fn parse_eps(s: &str) -> Result<Vec<f64>> {
    let bad = |m: &str| Error::InvalidParameter(format!("epsilon sweep {s:?}: {m}"));
    let values: Vec<f64> = if s.contains(':') {
        let parts: Vec<&str> = s.split(':').collect();
        if parts.len() != 3 {
            return Err(bad("expected from:to:step"));
        }
        let from: f64 = parts[0].parse().map_err(|_| bad("bad from"))?;
        let to: f64 = parts[1].parse().map_err(|_| bad("bad to"))?;
        let step: f64 = parts[2].parse().map_err(|_| bad("bad step"))?;
        if step <= 0.0 || from > to {
            return Err(bad("need step > 0 and from <= to"));
        }
        let mut values = Vec::new();
        let mut i = 0;
        loop {
            let x = from + step * i as f64;
            if x > to + 1e-9 {
                break;
            }
            values.push(x);
            i += 1;
        }
        values
    } else {
        s.split(',')
            .map(|tok| tok.trim().parse::<f64>().map_err(|_| bad("bad value")))
            .collect::<Result<Vec<f64>>>()?
    };
    if values.is_empty() {
        return Err(bad("empty sweep"));
    }
    Ok(values)
}

fn parse_harary_spec(s: &str) -> Result<HararySpec> {
    let parts: Vec<&str> = s.split(',').collect();
    let bad = || Error::InvalidParameter(format!("expected --harary K,N got {s:?}"));
    if parts.len() != 2 {
        return Err(bad());
    }
    let k = parts[0].trim().parse().map_err(|_| bad())?;
    let n = parts[1].trim().parse().map_err(|_| bad())?;
    Ok(HararySpec { k, n })
}

#[allow(clippy::too_many_arguments)]
fn cmd_experiment(
    graph_path: Option<&Path>,
    harary_spec: Option<&str>,
    op: &str,
    mechs: &str,
    eps: &str,
    reps: usize,
    delta: Option<f64>,
    seed: Option<u64>,
    label: Option<String>,
    reduce: bool,
    clamp_lower: bool,
    out: &Path,
) -> Result<()> {
    let (graph, default_label) = match (graph_path, harary_spec) {
        (Some(path), None) => {
            let (g, _) = load(path, reduce)?;
            let stem = path
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_else(|| "graph".into());
            (g, stem)
        }
        (None, Some(spec)) => {
            let spec = parse_harary_spec(spec)?;
            (harary(&spec)?, format!("harary_{}_{}", spec.k, spec.n))
        }
        _ => {
            return Err(Error::InvalidParameter(
                "exactly one of --graph or --harary is required".into(),
            ))
        }
    };
    let (master_seed, defaulted) = resolve_seed(seed)?;
    let cfg = ExperimentConfig {
        dataset: label.unwrap_or(default_label),
        graph,
        op: NeighborOp::parse(op)?,
        mechanisms: parse_mechs(mechs)?,
        epsilons: parse_eps(eps)?,
        delta,
        repetitions: reps,
        master_seed,
        clamp_lower,
    };
    let records = bench::run_experiment(&cfg)?;
    bench::write_csv_file(&records, out)?;
    if defaulted {
        println!("# seed defaulted; rerun with --seed {master_seed} to reproduce");
    }
    println!("master_seed={master_seed}");
    // Mean and sample std per (mechanism, epsilon), in record order.
    let mut groups: BTreeMap<(u64, u64), Vec<f64>> = BTreeMap::new();
    for r in &records {
        groups
            .entry((r.mechanism.stream_tag(), r.epsilon.to_bits()))
            .or_default()
            .push(r.mre);
    }
    for r in &records {
        if r.rep != 0 {
            continue;
        }
        let key = (r.mechanism.stream_tag(), r.epsilon.to_bits());
        let (mean, std) = bench::mean_and_std(&groups[&key]);
        println!(
            "mechanism={} eps={} reps={} mean_mre={mean:.6} std={std:.6}",
            r.mechanism.as_str(),
            r.epsilon,
            groups[&key].len()
        );
    }
    println!("records={} out={}", records.len(), out.display());
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eps_sweep_parsing() {
        assert_eq!(
            parse_eps("1:8:1").unwrap(),
            (1..=8).map(|x| x as f64).collect::<Vec<_>>()
        );
        assert_eq!(parse_eps("2").unwrap(), vec![2.0]);
        assert_eq!(parse_eps("0.5,1,2").unwrap(), vec![0.5, 1.0, 2.0]);
        assert_eq!(parse_eps("1:2:0.5").unwrap(), vec![1.0, 1.5, 2.0]);
        assert!(parse_eps("8:1:1").is_err());
        assert!(parse_eps("1:8:0").is_err());
        assert!(parse_eps("1:8").is_err());
    }

    #[test]
    fn mech_list_parsing() {
        assert_eq!(
            parse_mechs("iadp,adp,sdp").unwrap(),
            vec![MechanismKind::Iadp, MechanismKind::Adp, MechanismKind::Sdp]
        );
        assert!(parse_mechs("iadp,iadp").is_err());
        assert!(parse_mechs("nope").is_err());
    }

    #[test]
    fn harary_spec_parsing() {
        let spec = parse_harary_spec("3,200").unwrap();
        assert_eq!((spec.k, spec.n), (3, 200));
        assert!(parse_harary_spec("3").is_err());
    }
}
