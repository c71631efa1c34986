//! Desk-scale simulator for three-sided fair online bipartite matching.
//!
//! Offline vertices (drivers) wait; online types (ride requests) arrive
//! over a finite horizon, either i.i.d. from a stationary distribution or
//! with known per-round probabilities. Matches are *probed*: an edge
//! succeeds only with its success probability, and both sides have
//! patience budgets limiting failed probes. Three parties care about the
//! outcome — the platform (total expected profit) and the two vertex
//! sides (max-min fairness over their groups, or over individuals).
//!
//! The crate provides:
//!
//! * [`model`] — instance schema (JSON), validation, type fragmentation,
//!   run traces, and the trace-level objective evaluator;
//! * [`lp`] — the benchmark linear programs for all three objectives in
//!   both arrival models (plus direct individual-fairness LPs), solved
//!   deterministically with an independent feasibility re-check;
//! * [`rounding`] — dependent rounding with exact marginals, degree
//!   preservation, and negative correlation;
//! * [`algo`] — the randomized online algorithms: the three-way
//!   convex-combination probing algorithm for stationary arrivals
//!   ([`algo::run_tsf`]) and its known-distribution variant with
//!   availability-compensated probe probabilities ([`algo::run_tsf_kad`]),
//!   plus the individual-to-group fairness reduction;
//! * [`baselines`] — greedy baselines for profit, rider utility, and
//!   poorest-group-first matching;
//! * [`harness`] — trip-record ingestion, synthetic data generation,
//!   adversarial fixtures with closed-form optima, multi-trial experiment
//!   orchestration, and CSV/JSON competitive-ratio reports;
//! * [`rng`], [`stats`] — seeded reproducible randomness (independent of
//!   thread count) and small-sample statistics (standard errors, rank
//!   correlation).
//!
//! Everything is deterministic given a seed. With the default `parallel`
//! feature, trials and LP solves fan out across a thread pool without
//! changing any result.

pub mod algo;
pub mod baselines;
pub mod harness;
pub mod lp;
pub mod model;
pub mod rng;
pub mod rounding;
pub mod stats;

pub use algo::{
    availability_table, estimate_rho, exact_rho, reduce_individual_to_group, run_tsf, run_tsf_kad,
    AlgoError, ClampStats, RhoTable, Weights,
};
pub use baselines::{greedy_d, greedy_o, greedy_r};
pub use harness::{
    alpha_sweep_configs, emit_report, generate_trip_records, ingest_trips,
    make_hardness_group_instance, make_hardness_indiv_group_instance, read_trip_records,
    run_experiment, run_experiment_seq, run_unit_weight_ablation, synthetic_trip_instance,
    with_unit_fairness_weights, write_report, write_trip_records, AlgoConfig, HarnessError,
    IngestConfig, IngestSummary, ObjectiveRow, RatioReport, ReportFormat, TripRecord,
};

/// Caps the worker pool used by parallel trials and LP solves. Call once,
/// before any parallel work; later calls are ignored. A no-op without the
/// `parallel` feature. Results never depend on the thread count.
pub fn configure_thread_pool(threads: usize) -> Result<(), String> {
    #[cfg(feature = "parallel")]
    {
        if threads == 0 {
            return Err("thread count must be >= 1".into());
        }
        return rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .map_err(|e| e.to_string());
    }
    #[cfg(not(feature = "parallel"))]
    {
        let _ = threads;
        Ok(())
    }
}
pub use lp::{
    benchmarks, benchmarks_seq, build_kad_indiv_lp, build_kad_lp, build_kiid_lp, solve_lp,
    BenchmarkBundle, LpError, LpObjective, LpProgram, LpSolution, Side,
};
pub use model::{
    check_trace, evaluate_objectives, fragment_types, to_kad, validate_instance, Arrival,
    ArrivalModel, Edge, Instance, ModelError, ObjectiveEstimate, OfflineVertex, OnlineType,
    Probe, RoundEvent, RunTrace, Violation,
};
pub use rng::{mix, rng_from, TrialRng};
pub use stats::{mean_and_stderr, spearman, Estimate, SpearmanTest};
