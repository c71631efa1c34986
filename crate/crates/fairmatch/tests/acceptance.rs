//! Acceptance checklist. Each test verifies one numbered claim about the
//! implementation — closed-form optima, statistical guarantee floors,
//! hardness ceilings, structural equivalences, and qualitative directions
//! at desk scale — and prints exactly one `[acceptance NN] PASS/FAIL`
//! line (visible with `cargo test --test acceptance -- --nocapture`).
//!
//! Statistical checks use a fixed 3-standard-error policy: lower bounds
//! are asserted as `empirical ≥ bound − 3σ`, upper bounds as
//! `empirical ≤ bound + 3σ`, with σ the standard error of the empirical
//! quantity. All runs are seeded; every number here is reproducible.

use std::sync::OnceLock;
use std::time::{Duration, Instant};

use fairmatch::harness::{
    alpha_sweep_configs, make_hardness_group_instance, make_hardness_indiv_group_instance,
    synthetic_trip_instance, AlgoConfig, RatioReport,
};
use fairmatch::lp::{build_kad_indiv_lp, build_kad_lp, solve_lp, LpObjective, Side};
use fairmatch::model::{evaluate_objectives, ObjectiveEstimate};
use fairmatch::rounding::dependent_round;
use fairmatch::stats::binomial_stderr;
use fairmatch::{
    availability_table, benchmarks, exact_rho, fragment_types, mix, reduce_individual_to_group,
    rng_from, run_experiment, run_tsf, run_tsf_kad, spearman, to_kad, Arrival, ArrivalModel,
    BenchmarkBundle, Edge, Instance, OfflineVertex, OnlineType, TrialRng, Weights,
};
use rand::Rng;

// ---------------------------------------------------------------------
// Pinned tolerances and sample sizes.
// ---------------------------------------------------------------------

/// Absolute tolerance for closed-form LP optima.
const LP_TOL: f64 = 1e-6;
/// Every statistical bound uses this many standard errors of slack.
const N_SIGMA: f64 = 3.0;
/// Draws for the rounding-distribution check.
const ROUNDING_DRAWS: usize = 200_000;
/// Trials for the guarantee-floor and availability checks.
const FLOOR_TRIALS: usize = 50_000;
/// Trials per configuration for the hardness-ceiling checks.
const HARDNESS_TRIALS: usize = 20_000;
/// Trials per sweep point on the city-style instance.
const CITY_TRIALS: usize = 100;
/// One-sided 95% critical value of Student's t with 9 degrees of freedom
/// (11-point sweep), for the rank-correlation trend check.
const T_CRIT_DF9: f64 = 1.8331;
/// The guarantee floor per unit of objective weight: each objective's
/// ratio is guaranteed at least (weight)/(2e) on stationary arrivals.
const FLOOR_PER_WEIGHT: f64 = 1.0 / (2.0 * std::f64::consts::E);

const SEED_ROUNDING: u64 = 11;
const SEED_FLOOR: u64 = 303;
const SEED_KAD_FLOOR: u64 = 404;
const SEED_HARDNESS_KIID: u64 = 505;
const SEED_HARDNESS_KAD: u64 = 515;
const SEED_WEIGHT_GAP: u64 = 606;
const SEED_REDUCTION: u64 = 707;
const CITY_SEED: u64 = 42;
const SEED_CITY_SWEEP: u64 = 2026;
const SEED_CITY_COMPARE: u64 = 77;

/// The five weight settings used wherever "every weight setting" is
/// swept: the three pure objectives, the balanced point, and an
/// asymmetric interior point.
const WEIGHT_SWEEP: [(f64, f64, f64); 5] = [
    (1.0, 0.0, 0.0),
    (0.0, 1.0, 0.0),
    (0.0, 0.0, 1.0),
    (1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0),
    (0.5, 0.25, 0.25),
];

fn verdict(num: u8, name: &str, pass: bool, detail: &str) {
    let tag = if pass { "PASS" } else { "FAIL" };
    println!("[acceptance {num:02}] {tag} — {name}: {detail}");
    assert!(pass, "acceptance {num:02} ({name}) failed: {detail}");
}

// ---------------------------------------------------------------------
// Shared artifacts (each built once, reused across criteria).
// ---------------------------------------------------------------------

struct GroupArtifacts {
    /// The 3×3 adversarial fixture at horizon 9, fragmented.
    inst: Instance,
    bundle: BenchmarkBundle,
}

fn group_artifacts() -> &'static GroupArtifacts {
    static CELL: OnceLock<GroupArtifacts> = OnceLock::new();
    CELL.get_or_init(|| {
        let inst = fragment_types(&make_hardness_group_instance(9).expect("fixture")).expect("fragment");
        let bundle = benchmarks(&inst).expect("benchmarks");
        GroupArtifacts { inst, bundle }
    })
}

struct FloorRun {
    est: ObjectiveEstimate,
    /// Start-of-round availability counts, indexed `u * horizon + t`.
    avail_counts: Vec<usize>,
    trials: usize,
    elapsed: Duration,
}

/// The shared 50k-trial equal-weight run on the group fixture.
fn floor_run() -> &'static FloorRun {
    static CELL: OnceLock<FloorRun> = OnceLock::new();
    CELL.get_or_init(|| {
        let ga = group_artifacts();
        let w = Weights::new(1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0).expect("weights");
        let start = Instant::now();
        let mut traces = Vec::with_capacity(FLOOR_TRIALS);
        let mut avail_counts = vec![0usize; ga.inst.offline.len() * ga.inst.horizon];
        for i in 0..FLOOR_TRIALS {
            let trial = TrialRng::new(SEED_FLOOR, i as u64);
            let trace = run_tsf(&ga.inst, &ga.bundle, &w, &trial).expect("tsf trial");
            for (slot, avail) in avail_counts
                .iter_mut()
                .zip(availability_table(&ga.inst, &trace))
            {
                *slot += avail as usize;
            }
            traces.push(trace);
        }
        let est = evaluate_objectives(&ga.inst, &traces).expect("evaluate");
        FloorRun {
            est,
            avail_counts,
            trials: FLOOR_TRIALS,
            elapsed: start.elapsed(),
        }
    })
}

/// Reports for the five-setting weight sweep plus greedy baselines on the
/// group fixture, for both arrival models (the stationary-arrival
/// algorithm on the fixture itself; the known-distribution algorithm on
/// its per-round conversion, whose benchmark optima coincide).
fn hardness_reports() -> &'static Vec<RatioReport> {
    static CELL: OnceLock<Vec<RatioReport>> = OnceLock::new();
    CELL.get_or_init(|| {
        let ga = group_artifacts();
        let mut kiid_configs: Vec<AlgoConfig> = WEIGHT_SWEEP
            .iter()
            .map(|&(a, b, g)| AlgoConfig::tsf(a, b, g).expect("weights"))
            .collect();
        kiid_configs.extend([AlgoConfig::GreedyO, AlgoConfig::GreedyR, AlgoConfig::GreedyD]);
        let mut reports =
            run_experiment(&ga.inst, &kiid_configs, HARDNESS_TRIALS, SEED_HARDNESS_KIID)
                .expect("kiid hardness runs");
        let kad = to_kad(&ga.inst);
        let kad_bundle = benchmarks(&kad).expect("kad benchmarks");
        assert!(
            (kad_bundle.opt_op - 3.0).abs() < LP_TOL
                && (kad_bundle.opt_off - 1.0).abs() < LP_TOL
                && (kad_bundle.opt_on - 1.0).abs() < LP_TOL,
            "per-round re-encoding must preserve the fixture optima (3, 1, 1), got ({}, {}, {})",
            kad_bundle.opt_op,
            kad_bundle.opt_off,
            kad_bundle.opt_on
        );
        let kad_configs: Vec<AlgoConfig> = WEIGHT_SWEEP
            .iter()
            .map(|&(a, b, g)| AlgoConfig::tsf_kad(a, b, g, 0).expect("weights"))
            .collect();
        reports.extend(
            run_experiment(&kad, &kad_configs, HARDNESS_TRIALS, SEED_HARDNESS_KAD)
                .expect("kad hardness runs"),
        );
        reports
    })
}

/// Reports on the group-versus-individual weight-gap fixture (L = 100),
/// covering every implemented algorithm: the known-distribution prober and
/// the greedies run on the fixture as declared, and the stationary-arrival
/// prober runs on its one-round stationary re-encoding (a single-round
/// per-round schedule and a stationary distribution are the same process).
fn weight_gap_reports() -> &'static Vec<RatioReport> {
    static CELL: OnceLock<Vec<RatioReport>> = OnceLock::new();
    CELL.get_or_init(|| {
        let inst = make_hardness_indiv_group_instance(100.0, Side::Offline).expect("fixture");
        let mut configs: Vec<AlgoConfig> = WEIGHT_SWEEP
            .iter()
            .map(|&(a, b, g)| AlgoConfig::tsf_kad(a, b, g, 0).expect("weights"))
            .collect();
        configs.extend([AlgoConfig::GreedyO, AlgoConfig::GreedyR, AlgoConfig::GreedyD]);
        let mut reports =
            run_experiment(&inst, &configs, HARDNESS_TRIALS, SEED_WEIGHT_GAP).expect("gap runs");

        let mut stationary = inst.clone();
        stationary.arrival_model = ArrivalModel::Kiid;
        for ty in &mut stationary.online {
            let p = ty.arrival.prob_at(0);
            ty.arrival = Arrival::Stationary { p };
        }
        let tsf_configs: Vec<AlgoConfig> = WEIGHT_SWEEP
            .iter()
            .map(|&(a, b, g)| AlgoConfig::tsf(a, b, g).expect("weights"))
            .collect();
        reports.extend(
            run_experiment(&stationary, &tsf_configs, HARDNESS_TRIALS, SEED_WEIGHT_GAP)
                .expect("stationary gap runs"),
        );
        reports
    })
}

struct CityArtifacts {
    sweep: Vec<RatioReport>,
    compare: Vec<RatioReport>,
}

/// The synthetic city instance (49 drivers, 172 request types) with the
/// 11-point sweep and the targeted-weight-versus-greedy comparison.
fn city_artifacts() -> &'static CityArtifacts {
    static CELL: OnceLock<CityArtifacts> = OnceLock::new();
    CELL.get_or_init(|| {
        let (inst, summary) =
            synthetic_trip_instance(49, 172, CITY_SEED).expect("city instance");
        assert_eq!((summary.drivers, summary.request_types), (49, 172));
        let sweep = run_experiment(&inst, &alpha_sweep_configs(), CITY_TRIALS, SEED_CITY_SWEEP)
            .expect("city sweep");
        let compare_configs = vec![
            AlgoConfig::GreedyO,
            AlgoConfig::tsf(1.0, 0.0, 0.0).expect("weights"),
            AlgoConfig::GreedyR,
            AlgoConfig::tsf(0.0, 0.0, 1.0).expect("weights"),
            AlgoConfig::GreedyD,
            AlgoConfig::tsf(0.0, 1.0, 0.0).expect("weights"),
        ];
        let compare = run_experiment(&inst, &compare_configs, CITY_TRIALS, SEED_CITY_COMPARE)
            .expect("city compare");
        CityArtifacts { sweep, compare }
    })
}

/// The two-round certain-arrival fixture for the known-distribution
/// guarantee floor: one offline vertex, two online types each arriving
/// with certainty in its own round, certain probes, unit profit on both
/// edges. The benchmark optimum is 1 and the algorithm's match
/// probability is exactly 1/2.
fn two_round_certain_fixture() -> Instance {
    Instance {
        schema_version: 1,
        horizon: 2,
        arrival_model: ArrivalModel::Kad,
        offline: vec![OfflineVertex {
            id: 0,
            group: "all".into(),
            patience: 1,
        }],
        online: vec![
            OnlineType {
                id: 0,
                group: "all".into(),
                patience: 1,
                arrival: Arrival::PerRound { p_t: vec![1.0, 0.0] },
            },
            OnlineType {
                id: 1,
                group: "all".into(),
                patience: 1,
                arrival: Arrival::PerRound { p_t: vec![0.0, 1.0] },
            },
        ],
        edges: vec![
            Edge {
                u: 0,
                v: 0,
                p_e: 1.0,
                w_op: 1.0,
                w_off: 0.0,
                w_on: 0.0,
            },
            Edge {
                u: 0,
                v: 1,
                p_e: 1.0,
                w_op: 1.0,
                w_off: 0.0,
                w_on: 0.0,
            },
        ],
        groups: vec!["all".into()],
        metadata: None,
    }
}

/// (objective, empirical, optimum, stderr) rows from a report list.
fn bound_rows(reports: &[RatioReport]) -> Vec<(String, f64, f64, f64)> {
    reports
        .iter()
        .flat_map(|r| {
            r.objectives.iter().map(move |o| {
                (
                    format!("{}/{}", r.algo, o.objective),
                    o.empirical,
                    o.optimum,
                    o.stderr,
                )
            })
        })
        .collect()
}

fn ratio_and_sigma(report: &RatioReport, objective: &str) -> (f64, f64) {
    let row = report
        .objective(objective)
        .unwrap_or_else(|| panic!("missing objective {objective}"));
    let opt = row.optimum;
    assert!(opt > 0.0, "{objective}: optimum must be positive for a ratio");
    (row.ratio.expect("ratio"), row.stderr / opt)
}

// ---------------------------------------------------------------------
// 01 — dependent rounding: marginals, degree preservation, negative
// correlation, runtime.
// ---------------------------------------------------------------------
#[test]
fn a01_dependent_rounding_marginals_degree_and_correlation() {
    let x = [0.3, 0.3, 0.4];
    let start = Instant::now();
    let mut rng = rng_from(mix(SEED_ROUNDING, 1));
    let mut marginal = [0usize; 3];
    let mut joint = [[0usize; 3]; 3];
    for _ in 0..ROUNDING_DRAWS {
        let rounded = dependent_round(&x, &mut rng);
        let ones: usize = rounded.bits.iter().map(|&b| b as usize).sum();
        assert_eq!(ones, 1, "degree must equal the (integral) input sum on every draw");
        for i in 0..3 {
            if rounded.bits[i] {
                marginal[i] += 1;
                for j in (i + 1)..3 {
                    if rounded.bits[j] {
                        joint[i][j] += 1;
                    }
                }
            }
        }
    }
    let elapsed = start.elapsed();
    let n = ROUNDING_DRAWS;
    let mut max_dev_sigmas: f64 = 0.0;
    let mut pass = true;
    for i in 0..3 {
        let p_hat = marginal[i] as f64 / n as f64;
        let sigma = binomial_stderr(x[i], n);
        let dev = (p_hat - x[i]).abs() / sigma;
        max_dev_sigmas = max_dev_sigmas.max(dev);
        pass &= dev <= N_SIGMA;
    }
    let mut max_joint_excess: f64 = f64::NEG_INFINITY;
    for i in 0..3 {
        for j in (i + 1)..3 {
            let p_hat = joint[i][j] as f64 / n as f64;
            let cap = x[i] * x[j];
            let sigma = binomial_stderr(cap, n);
            max_joint_excess = max_joint_excess.max(p_hat - (cap + N_SIGMA * sigma));
            pass &= p_hat <= cap + N_SIGMA * sigma;
        }
    }
    pass &= elapsed < Duration::from_secs(10);
    verdict(
        1,
        "dependent rounding distribution",
        pass,
        &format!(
            "{n} draws in {elapsed:.2?}; every draw set exactly 1 bit; \
             max marginal deviation {max_dev_sigmas:.2}σ; \
             max pairwise excess over independence cap {max_joint_excess:.2e}"
        ),
    );
}

// ---------------------------------------------------------------------
// 02 — benchmark LPs reproduce the closed-form optima of both fixtures.
// ---------------------------------------------------------------------
#[test]
fn a02_benchmark_optima_match_closed_forms() {
    let ga = group_artifacts();
    let (o, u, v) = (ga.bundle.opt_op, ga.bundle.opt_off, ga.bundle.opt_on);
    let group_ok = (o - 3.0).abs() < LP_TOL && (u - 1.0).abs() < LP_TOL && (v - 1.0).abs() < LP_TOL;

    let gap = make_hardness_indiv_group_instance(100.0, Side::Offline).expect("fixture");
    let gap_group = solve_lp(&build_kad_lp(&gap, LpObjective::OfflineFair).expect("build"))
        .expect("solve")
        .objective_value;
    let gap_indiv = solve_lp(&build_kad_indiv_lp(&gap, Side::Offline).expect("build"))
        .expect("solve")
        .objective_value;
    let gap_ok =
        (gap_group - 100.0).abs() < LP_TOL && (gap_indiv - 100.0 / 101.0).abs() < LP_TOL;

    verdict(
        2,
        "benchmark optima",
        group_ok && gap_ok,
        &format!(
            "group fixture ({o:.8}, {u:.8}, {v:.8}) vs (3, 1, 1); \
             weight-gap fixture group {gap_group:.8} vs 100, individual {gap_indiv:.8} vs {:.8}",
            100.0 / 101.0
        ),
    );
}

// ---------------------------------------------------------------------
// 03 — equal-weight probing meets the per-objective guarantee floor
// (each ratio ≥ (1/3)/(2e) − 3σ) on the group fixture.
// ---------------------------------------------------------------------
#[test]
fn a03_equal_weight_probing_meets_per_objective_floors() {
    let ga = group_artifacts();
    let run = floor_run();
    let floor = (1.0 / 3.0) * FLOOR_PER_WEIGHT;
    let checks = [
        ("profit", &run.est.profit, ga.bundle.opt_op),
        ("offline_group", &run.est.offline_group, ga.bundle.opt_off),
        ("online_group", &run.est.online_group, ga.bundle.opt_on),
    ];
    let mut pass = run.elapsed < Duration::from_secs(120);
    let mut details = Vec::new();
    for (name, est, opt) in checks {
        let ratio = est.value / opt;
        let sigma = est.stderr / opt;
        pass &= ratio >= floor - N_SIGMA * sigma;
        details.push(format!("{name} {ratio:.4} (floor {floor:.4} − 3·{sigma:.5})"));
    }
    verdict(
        3,
        "equal-weight guarantee floors",
        pass,
        &format!(
            "{} trials in {:.2?}; {}",
            run.trials,
            run.elapsed,
            details.join(", ")
        ),
    );
}

// ---------------------------------------------------------------------
// 04 — known-distribution probing with the exact availability table:
// profit ratio ≥ α/2 − 3σ and empirical availability ≥ 1/2 − 3σ
// everywhere; no probe probability ever needs clamping.
// ---------------------------------------------------------------------
#[test]
fn a04_known_distribution_profit_floor_and_availability() {
    let inst = two_round_certain_fixture();
    let bundle = benchmarks(&inst).expect("benchmarks");
    let w = Weights::new(1.0, 0.0, 0.0).expect("weights");
    let rho = exact_rho(&inst, &bundle, &w, 0.5).expect("exact availability table");
    let n = FLOOR_TRIALS;
    let mut profit_sum = 0.0;
    let mut profit_sumsq = 0.0;
    let mut avail_counts = vec![0usize; inst.offline.len() * inst.horizon];
    let mut clamped = 0u64;
    let mut truncated = 0u64;
    for i in 0..n {
        let trial = TrialRng::new(SEED_KAD_FLOOR, i as u64);
        let (trace, stats) =
            run_tsf_kad(&inst, &bundle, &w, &rho, 0.5, &trial).expect("trial");
        profit_sum += trace.realized_op_utility;
        profit_sumsq += trace.realized_op_utility * trace.realized_op_utility;
        clamped += stats.clamped_probabilities;
        truncated += stats.truncated_rounds;
        for (slot, avail) in avail_counts
            .iter_mut()
            .zip(availability_table(&inst, &trace))
        {
            *slot += avail as usize;
        }
    }
    let mean = profit_sum / n as f64;
    let var = (profit_sumsq / n as f64 - mean * mean).max(0.0) / (n - 1) as f64;
    let ratio = mean / bundle.opt_op;
    let sigma = var.sqrt() / bundle.opt_op;
    let floor = w.alpha / 2.0;
    let mut pass = ratio >= floor - N_SIGMA * sigma;
    let mut min_avail = f64::INFINITY;
    for &count in &avail_counts {
        let p_hat = count as f64 / n as f64;
        let s = binomial_stderr(p_hat, n);
        min_avail = min_avail.min(p_hat);
        pass &= p_hat >= 0.5 - N_SIGMA * s;
    }
    pass &= clamped == 0 && truncated == 0;
    verdict(
        4,
        "known-distribution floor",
        pass,
        &format!(
            "profit ratio {ratio:.4} ≥ {floor} − 3·{sigma:.5}; \
             min per-round availability {min_avail:.4} ≥ 0.5 − 3σ; \
             clamped {clamped}, truncated {truncated}"
        ),
    );
}

// ---------------------------------------------------------------------
// 05 — on the group fixture, no algorithm at any weight setting pushes
// the three ratios past a total of 1 (+3σ).
// ---------------------------------------------------------------------
#[test]
fn a05_three_ratio_sum_never_exceeds_one() {
    let reports = hardness_reports();
    let mut pass = true;
    let mut worst = f64::NEG_INFINITY;
    let mut worst_desc = String::new();
    for r in reports {
        let (po, so) = ratio_and_sigma(r, "profit");
        let (pu, su) = ratio_and_sigma(r, "offline_group");
        let (pv, sv) = ratio_and_sigma(r, "online_group");
        let sum = po + pu + pv;
        let sigma = so + su + sv;
        let margin = sum - (1.0 + N_SIGMA * sigma);
        if margin > worst {
            worst = margin;
            worst_desc = format!(
                "{} (α={:?}) sum {:.4} vs 1 + 3·{:.5}",
                r.algo, r.alpha, sum, sigma
            );
        }
        pass &= margin <= 0.0;
    }
    verdict(
        5,
        "three-ratio hardness ceiling",
        pass,
        &format!("{} configurations; tightest: {worst_desc}", reports.len()),
    );
}

// ---------------------------------------------------------------------
// 06 — on the weight-gap fixture (L = 100), group ratio + individual
// ratio never exceeds 1 + 2/L (+3σ) for any algorithm.
// ---------------------------------------------------------------------
#[test]
fn a06_group_plus_individual_ratio_bound() {
    let reports = weight_gap_reports();
    let cap = 1.0 + 2.0 / 100.0;
    let mut pass = true;
    let mut worst = f64::NEG_INFINITY;
    let mut worst_desc = String::new();
    for r in reports {
        let (pg, sg) = ratio_and_sigma(r, "offline_group");
        let (pi, si) = ratio_and_sigma(r, "offline_individual");
        let sum = pg + pi;
        let sigma = sg + si;
        let margin = sum - (cap + N_SIGMA * sigma);
        if margin > worst {
            worst = margin;
            worst_desc = format!(
                "{} (β={:?}) sum {:.4} vs {cap} + 3·{:.5}",
                r.algo, r.beta, sum, sigma
            );
        }
        pass &= margin <= 0.0;
    }
    verdict(
        6,
        "group+individual hardness ceiling",
        pass,
        &format!("{} configurations; tightest: {worst_desc}", reports.len()),
    );
}

// ---------------------------------------------------------------------
// 07 — the individual→group reduction: on random small instances, the
// direct individual-fairness optimum equals the group-fairness optimum
// of the reduced instance, on both sides.
// ---------------------------------------------------------------------
#[test]
fn a07_reduction_matches_direct_individual_optima() {
    let mut rng = rng_from(mix(SEED_REDUCTION, 0));
    let mut max_gap: f64 = 0.0;
    let mut checked = 0;
    while checked < 20 {
        let n_u = rng.gen_range(1..=3);
        let n_v = rng.gen_range(1..=3usize);
        let horizon = rng.gen_range(1..=3);
        let offline: Vec<OfflineVertex> = (0..n_u)
            .map(|id| OfflineVertex {
                id,
                group: "all".into(),
                patience: rng.gen_range(1..=2),
            })
            .collect();
        let online: Vec<OnlineType> = (0..n_v)
            .map(|id| OnlineType {
                id,
                group: "all".into(),
                patience: rng.gen_range(1..=2),
                arrival: Arrival::PerRound {
                    p_t: vec![0.0; horizon],
                },
            })
            .collect();
        let mut inst = Instance {
            schema_version: 1,
            horizon,
            arrival_model: ArrivalModel::Kad,
            offline,
            online,
            edges: Vec::new(),
            groups: vec!["all".into()],
            metadata: None,
        };
        // Random per-round arrival distribution over the types.
        for t in 0..horizon {
            let raw: Vec<f64> = (0..n_v).map(|_| rng.gen_range(0.05..1.0)).collect();
            let total: f64 = raw.iter().sum();
            for (v, r) in raw.iter().enumerate() {
                if let Arrival::PerRound { p_t } = &mut inst.online[v].arrival {
                    p_t[t] = r / total;
                }
            }
        }
        for u in 0..n_u {
            for v in 0..n_v {
                if rng.gen::<f64>() < 0.8 {
                    inst.edges.push(Edge {
                        u,
                        v,
                        p_e: 1.0,
                        w_op: rng.gen_range(0.0..2.0),
                        w_off: rng.gen_range(0.0..2.0),
                        w_on: rng.gen_range(0.0..2.0),
                    });
                }
            }
        }
        if !fairmatch::validate_instance(&inst).is_empty() {
            continue;
        }
        checked += 1;
        let reduced = reduce_individual_to_group(&inst).expect("reduction");
        for side in [Side::Offline, Side::Online] {
            let direct = solve_lp(&build_kad_indiv_lp(&inst, side).expect("direct"))
                .expect("solve")
                .objective_value;
            let objective = match side {
                Side::Offline => LpObjective::OfflineFair,
                Side::Online => LpObjective::OnlineFair,
            };
            let via_groups = solve_lp(&build_kad_lp(&reduced, objective).expect("reduced"))
                .expect("solve")
                .objective_value;
            max_gap = max_gap.max((direct - via_groups).abs());
        }
    }
    verdict(
        7,
        "individual→group reduction",
        max_gap < LP_TOL,
        &format!("20 random instances × both sides; max |direct − reduced| = {max_gap:.2e}"),
    );
}

// ---------------------------------------------------------------------
// 08 — across every fixture and algorithm exercised by this suite, no
// empirical objective exceeds its benchmark optimum by more than 3σ.
// ---------------------------------------------------------------------
#[test]
fn a08_no_objective_exceeds_its_benchmark() {
    let mut rows = Vec::new();
    rows.extend(bound_rows(hardness_reports()));
    rows.extend(bound_rows(weight_gap_reports()));
    let city = city_artifacts();
    rows.extend(bound_rows(&city.sweep));
    rows.extend(bound_rows(&city.compare));
    let ga = group_artifacts();
    let run = floor_run();
    for (name, est, opt) in [
        ("floor-run/profit", &run.est.profit, ga.bundle.opt_op),
        ("floor-run/offline_group", &run.est.offline_group, ga.bundle.opt_off),
        ("floor-run/online_group", &run.est.online_group, ga.bundle.opt_on),
    ] {
        rows.push((name.to_string(), est.value, opt, est.stderr));
    }
    let mut pass = true;
    let mut worst = f64::NEG_INFINITY;
    let mut worst_desc = String::new();
    for (name, empirical, optimum, stderr) in &rows {
        let excess = empirical - (optimum + N_SIGMA * stderr);
        if excess > worst {
            worst = excess;
            worst_desc = format!("{name} empirical {empirical:.4} vs optimum {optimum:.4}");
        }
        pass &= excess <= 1e-9;
    }
    verdict(
        8,
        "benchmarks upper-bound every algorithm",
        pass,
        &format!("{} objective rows; tightest: {worst_desc}", rows.len()),
    );
}

// ---------------------------------------------------------------------
// 09 — city-scale sweep: profit ratio rises with its weight (rank
// correlation significant at 95%), and every ratio stays above its
// weight-scaled guarantee floor.
// ---------------------------------------------------------------------
#[test]
fn a09_city_sweep_trend_and_floors() {
    let city = city_artifacts();
    let alphas: Vec<f64> = city.sweep.iter().map(|r| r.alpha.expect("alpha")).collect();
    let profits: Vec<f64> = city
        .sweep
        .iter()
        .map(|r| ratio_and_sigma(r, "profit").0)
        .collect();
    let trend = spearman(&alphas, &profits);
    let mut pass = trend.rho > 0.0 && trend.t > T_CRIT_DF9;
    let mut worst_floor_margin = f64::INFINITY;
    for r in &city.sweep {
        let (alpha, beta, gamma) = (
            r.alpha.expect("alpha"),
            r.beta.expect("beta"),
            r.gamma.expect("gamma"),
        );
        for (objective, weight) in [
            ("profit", alpha),
            ("offline_group", beta),
            ("online_group", gamma),
        ] {
            let (ratio, sigma) = ratio_and_sigma(r, objective);
            let floor = weight * FLOOR_PER_WEIGHT;
            worst_floor_margin = worst_floor_margin.min(ratio - (floor - N_SIGMA * sigma));
            pass &= ratio >= floor - N_SIGMA * sigma;
        }
    }
    verdict(
        9,
        "city sweep trend & floors",
        pass,
        &format!(
            "Spearman ρ = {:.3} (t = {:.2} > {T_CRIT_DF9} at df = {}), profit ratio \
             {:.3}→{:.3} across α; min floor margin {worst_floor_margin:+.4}",
            trend.rho,
            trend.t,
            trend.n - 2,
            profits.first().expect("sweep"),
            profits.last().expect("sweep"),
        ),
    );
}

// ---------------------------------------------------------------------
// 10 — targeted weights beat the matching greedy on the city instance:
// all-profit weights vs the profit-greedy, all-rider weights vs the
// rider-greedy (effect sizes reported either way; the poorest-group
// comparison is informational).
// ---------------------------------------------------------------------
#[test]
fn a10_targeted_weights_beat_matching_greedies() {
    let city = city_artifacts();
    let by_algo = |name: &str, alpha: Option<f64>| -> &RatioReport {
        city.compare
            .iter()
            .find(|r| r.algo == name && (name != "tsf" || r.alpha == alpha))
            .unwrap_or_else(|| panic!("missing report {name}"))
    };
    let effect = |winner: (f64, f64), loser: (f64, f64)| {
        let diff = winner.0 - loser.0;
        let sigma = (winner.1.powi(2) + loser.1.powi(2)).sqrt();
        (diff, diff / sigma)
    };
    let profit_tsf = ratio_and_sigma(by_algo("tsf", Some(1.0)), "profit");
    let profit_greedy = ratio_and_sigma(by_algo("greedy-o", None), "profit");
    let (profit_diff, profit_sigmas) = effect(profit_tsf, profit_greedy);

    let rider_tsf = ratio_and_sigma(by_algo("tsf", Some(0.0)), "online_group");
    let rider_greedy = ratio_and_sigma(by_algo("greedy-r", None), "online_group");
    let (rider_diff, rider_sigmas) = effect(rider_tsf, rider_greedy);

    // Informational: poorest-group greedy vs all-offline-fairness weights.
    let driver_tsf = ratio_and_sigma(
        city.compare
            .iter()
            .find(|r| r.algo == "tsf" && r.beta == Some(1.0))
            .expect("offline-weighted run"),
        "offline_group",
    );
    let driver_greedy = ratio_and_sigma(by_algo("greedy-d", None), "offline_group");
    let (driver_diff, driver_sigmas) = effect(driver_tsf, driver_greedy);

    let pass = profit_diff > 0.0 && rider_diff > 0.0;
    verdict(
        10,
        "targeted weights vs greedies",
        pass,
        &format!(
            "profit {:.3} vs {:.3} (effect {profit_diff:+.3}, {profit_sigmas:+.1}σ); \
             rider fairness {:.3} vs {:.3} (effect {rider_diff:+.3}, {rider_sigmas:+.1}σ); \
             driver fairness (informational) {:.3} vs {:.3} (effect {driver_diff:+.3}, {driver_sigmas:+.1}σ)",
            profit_tsf.0, profit_greedy.0, rider_tsf.0, rider_greedy.0, driver_tsf.0, driver_greedy.0
        ),
    );
}

// ---------------------------------------------------------------------
// 11 — start-of-round availability under equal-weight probing dominates
// the per-round lower bound (1 − (t−1)/T)(1 − 1/T)^(t−1) − 3σ.
// ---------------------------------------------------------------------
#[test]
fn a11_offline_availability_lower_bound() {
    let ga = group_artifacts();
    let run = floor_run();
    let horizon = ga.inst.horizon;
    let t_f = horizon as f64;
    let n = run.trials;
    let mut pass = true;
    let mut min_margin = f64::INFINITY;
    for u in 0..ga.inst.offline.len() {
        for t in 0..horizon {
            let p_hat = run.avail_counts[u * horizon + t] as f64 / n as f64;
            let bound = (1.0 - t as f64 / t_f) * (1.0 - 1.0 / t_f).powi(t as i32);
            let sigma = binomial_stderr(p_hat, n);
            let margin = p_hat - (bound - N_SIGMA * sigma);
            min_margin = min_margin.min(margin);
            pass &= margin >= -1e-12;
        }
    }
    verdict(
        11,
        "availability lower bound",
        pass,
        &format!(
            "{} offline vertices × {horizon} rounds over {n} trials; min margin {min_margin:+.4}",
            ga.inst.offline.len()
        ),
    );
}
