//! Shortest-path distance queries on unweighted graphs under edge
//! differential privacy.
//!
//! Distances are monotone under one-directional edge changes: adding an
//! edge never lengthens a shortest path and removing one never shortens it.
//! Calibrating one-sided exponential noise to a smooth upper bound of the
//! per-graph sensitivity exploits that monotonicity and replaces the
//! global-sensitivity scale of n-1 with diameter-1 (add-edge neighborhood)
//! or the edge-disjoint path gap max(phi, psi e^{-beta}) (remove-edge
//! neighborhood).
//!
//! Modules:
//! - [`graph`]: immutable graph, edge-list ingestion and cleaning,
//!   connectivity and exact edge connectivity.
//! - [`paths`]: BFS distances, diameter and degree diagnostics,
//!   successively edge-disjoint shortest paths.
//! - [`sensitivity`]: smooth-sensitivity computation for both neighbor
//!   operations plus brute-force oracles.
//! - [`noise`]: privacy-parameter derivation, seeded samplers, random
//!   rounding.
//! - [`mechanisms`]: the private query answerers and baselines.
//! - [`synth`]: Harary graphs and test fixtures.
//! - [`bench`]: epsilon-sweep experiment harness with CSV output.

pub mod bench;
pub mod error;
pub mod graph;
pub mod mechanisms;
pub mod noise;
pub mod paths;
pub mod sensitivity;
pub mod synth;

pub use error::{Error, Result};
pub use graph::{edge_connectivity, load_edge_list, parse_edge_list, CleanReport, Graph};
pub use mechanisms::{
    answer_add, answer_adp, answer_all_pairs, answer_remove, answer_sdp, write_answers_csv,
    Calibrated, MechanismKind, QueryAnswer,
};
pub use noise::{derive_params, random_round, PrivacyParams};
pub use paths::{
    all_pairs_distances, avg_distance, bfs_distances, degree_stats, diameter, diameter_upper_bound,
    t_shortest_paths, DegreeStats, DistanceRow, PathSeq, TShortestResult, UNREACHABLE,
};
pub use sensitivity::{
    add_edge_smooth_sensitivity, brute_force_ias, brute_force_smooth_sensitivity,
    remove_edge_smooth_sensitivity, NeighborOp, SensitivityReport,
};
