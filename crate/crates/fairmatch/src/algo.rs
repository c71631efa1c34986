//! The randomized online matching algorithms.
//!
//! * [`ppdr`] — probe an arrival's edges after dependent rounding, in a
//!   uniformly random order, stopping at the first success;
//! * [`run_tsf`] — per round, branch with probability α/β/γ into PPDR on
//!   the operator / offline-fairness / online-fairness LP solution (reject
//!   otherwise); for fragmented kiid instances;
//! * [`estimate_rho`] / [`exact_rho`] — availability probabilities ρ_{e,t}
//!   (the chance the offline endpoint of `e` is still unmatched at the
//!   start of round `t`), estimated by prefix simulation or computed in
//!   closed form;
//! * [`run_tsf_kad`] — the per-round-arrival variant: a single categorical
//!   probe draw with per-edge probability `λ·x̄_{e,t} / (p_{v,t}·ρ_{e,t})`,
//!   clamped (never renormalized) and counted when estimation noise pushes
//!   it past 1;
//! * [`reduce_individual_to_group`] — rewrites an individual-fairness
//!   instance as a group-fairness instance (singleton offline groups, one
//!   online group per round block) with identical LP optima.

use rand::Rng;
use rand_chacha::ChaCha8Rng;

#[cfg(feature = "parallel")]
use rayon::prelude::*;

use crate::lp::BenchmarkBundle;
use crate::model::{
    Arrival, ArrivalModel, Instance, OnlineType, Probe, RoundEvent, RunTrace,
};
use crate::rng::{mix, rng_from, TrialRng};
use crate::rounding::{dependent_round, random_permutation};

/// Slack for the weight-sum invariant α + β + γ ≤ 1.
pub const WEIGHT_SUM_TOLERANCE: f64 = 1e-12;

/// Slack for the PPDR precondition Σ x_v ≤ Δ_v.
pub const PROBE_MASS_TOLERANCE: f64 = 1e-9;

/// The probe-rate dampening factor of the kad algorithm for which the
/// availability guarantee ρ ≥ λ holds.
pub const DEFAULT_LAMBDA: f64 = 0.5;

/// Errors from algorithm execution.
#[derive(Debug, thiserror::Error)]
pub enum AlgoError {
    #[error("invalid weights: {0}")]
    InvalidWeights(String),
    #[error("tsf requires a fragmented kiid instance (run fragment_types first)")]
    NotFragmentedKiid,
    #[error("this algorithm requires a kad instance with unit success probabilities")]
    NotKadUnitSuccess,
    #[error("benchmark bundle does not match the instance: {0}")]
    BundleMismatch(String),
    #[error("probe mass {sum} exceeds the arrival's patience {patience}; the LP vector is infeasible")]
    ProbeMassExceedsPatience { sum: f64, patience: u32 },
    #[error("rho table mismatch: {0}")]
    RhoMismatch(String),
    #[error("rho estimation requires at least 1 simulation per round prefix")]
    TooFewSimulations,
    #[error("individual-to-group reduction requires unit success probabilities")]
    ReductionNeedsUnitSuccess,
}

/// Branch probabilities (α, β, γ) for the three objectives; the residual
/// `1 − α − β − γ` is the per-round rejection probability.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct Weights {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
}

impl Weights {
    pub fn new(alpha: f64, beta: f64, gamma: f64) -> Result<Self, AlgoError> {
        let w = Weights { alpha, beta, gamma };
        w.validate()?;
        Ok(w)
    }

    pub fn validate(&self) -> Result<(), AlgoError> {
        for (name, v) in [
            ("alpha", self.alpha),
            ("beta", self.beta),
            ("gamma", self.gamma),
        ] {
            if !v.is_finite() || !(0.0..=1.0).contains(&v) {
                return Err(AlgoError::InvalidWeights(format!(
                    "{name} = {v} outside [0, 1]"
                )));
            }
        }
        let sum = self.alpha + self.beta + self.gamma;
        if sum > 1.0 + WEIGHT_SUM_TOLERANCE {
            return Err(AlgoError::InvalidWeights(format!(
                "alpha + beta + gamma = {sum} exceeds 1"
            )));
        }
        Ok(())
    }

    /// Per-round probability of rejecting the arrival outright.
    pub fn reject_mass(&self) -> f64 {
        (1.0 - self.alpha - self.beta - self.gamma).max(0.0)
    }
}

/// Which offline vertices can still be probed: matched vertices and
/// vertices whose failed-probe budget is exhausted are unavailable.
#[derive(Debug, Clone)]
pub struct AvailabilityState {
    matched: Vec<bool>,
    failed_probes: Vec<u32>,
    patience: Vec<u32>,
}

impl AvailabilityState {
    pub fn new(inst: &Instance) -> Self {
        AvailabilityState {
            matched: vec![false; inst.offline.len()],
            failed_probes: vec![0; inst.offline.len()],
            patience: inst.offline.iter().map(|u| u.patience).collect(),
        }
    }

    #[inline]
    pub fn is_available(&self, u: usize) -> bool {
        !self.matched[u] && self.failed_probes[u] < self.patience[u]
    }

    pub fn record_match(&mut self, u: usize) {
        debug_assert!(self.is_available(u), "matched an unavailable vertex");
        self.matched[u] = true;
    }

    pub fn record_failure(&mut self, u: usize) {
        debug_assert!(self.is_available(u), "probed an unavailable vertex");
        self.failed_probes[u] += 1;
    }

    /// Current availability of every offline vertex.
    pub fn snapshot(&self) -> Vec<bool> {
        (0..self.matched.len()).map(|u| self.is_available(u)).collect()
    }
}

/// Result of probing one arrival.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PpdrOutcome {
    /// Probes made, in order.
    pub probes: Vec<Probe>,
    /// The edge that matched, if any (always the last probe).
    pub matched_edge: Option<usize>,
}

/// Probe with Permuted Dependent Rounding.
///
/// `edges_of_v` are the arrival's incident edge indices and `xv` the
/// matching fractional probe masses (one per edge, each in [0,1] with
/// `Σ xv ≤ patience_v`). The vector is dependently rounded, the edges are
/// visited in a uniformly random order, and each set bit whose offline
/// endpoint is available is probed (success probability `p_e`) until the
/// first success. Degree preservation caps the probe count at
/// `⌈Σ xv⌉ ≤ patience_v`.
pub fn ppdr(
    inst: &Instance,
    edges_of_v: &[usize],
    xv: &[f64],
    patience_v: u32,
    state: &mut AvailabilityState,
    rng: &mut ChaCha8Rng,
) -> Result<PpdrOutcome, AlgoError> {
    debug_assert_eq!(edges_of_v.len(), xv.len());
    let sum: f64 = xv.iter().sum();
    if sum > patience_v as f64 + PROBE_MASS_TOLERANCE {
        return Err(AlgoError::ProbeMassExceedsPatience {
            sum,
            patience: patience_v,
        });
    }
    let mut outcome = PpdrOutcome {
        probes: Vec::new(),
        matched_edge: None,
    };
    if edges_of_v.is_empty() {
        return Ok(outcome);
    }
    let rounded = dependent_round(xv, rng);
    let perm = random_permutation(edges_of_v.len(), rng);
    for idx in perm {
        if !rounded.bits[idx] {
            continue;
        }
        let e = edges_of_v[idx];
        let u = inst.edges[e].u;
        if !state.is_available(u) {
            continue;
        }
        let success = rng.gen::<f64>() < inst.edges[e].p_e;
        outcome.probes.push(Probe { edge: e, success });
        if success {
            state.record_match(u);
            outcome.matched_edge = Some(e);
            break;
        }
        state.record_failure(u);
    }
    debug_assert!(outcome.probes.len() <= patience_v as usize);
    Ok(outcome)
}

/// Cumulative sums of a probability vector (for inverse-CDF sampling).
pub(crate) fn cumulative(probs: impl Iterator<Item = f64>) -> Vec<f64> {
    let mut acc = 0.0;
    probs
        .map(|p| {
            acc += p;
            acc
        })
        .collect()
}

/// Samples an index from cumulative sums `cum` (total mass `cum.last()`).
pub(crate) fn sample_index(cum: &[f64], rng: &mut impl Rng) -> usize {
    let total = *cum.last().expect("nonempty distribution");
    let r = rng.gen::<f64>() * total;
    cum.partition_point(|&c| c <= r).min(cum.len() - 1)
}

fn kiid_cumulative(online: &[OnlineType]) -> Vec<f64> {
    cumulative(online.iter().map(|v| v.arrival.prob_at(0)))
}

fn check_kiid_bundle(inst: &Instance, bundle: &BenchmarkBundle) -> Result<(), AlgoError> {
    for (name, sol) in [
        ("x_star", &bundle.x_star),
        ("y_star", &bundle.y_star),
        ("z_star", &bundle.z_star),
    ] {
        if sol.values.len() < inst.edges.len() {
            return Err(AlgoError::BundleMismatch(format!(
                "{name} has {} values but the instance has {} edges",
                sol.values.len(),
                inst.edges.len()
            )));
        }
    }
    Ok(())
}

/// Runs the kiid three-objective algorithm for one trial.
///
/// Per round: sample the arrival; with probability α probe via
/// `ppdr(x*_v)`, with β via `ppdr(y*_v)`, with γ via `ppdr(z*_v)`; reject
/// with the residual probability. Every probe is recorded in the trace.
/// Bit-reproducible given the same trial generator.
pub fn run_tsf(
    inst: &Instance,
    bundle: &BenchmarkBundle,
    w: &Weights,
    trial: &TrialRng,
) -> Result<RunTrace, AlgoError> {
    w.validate()?;
    if inst.arrival_model != ArrivalModel::Kiid || !inst.is_fragmented_kiid() {
        return Err(AlgoError::NotFragmentedKiid);
    }
    check_kiid_bundle(inst, bundle)?;
    let adj = inst.online_adjacency();
    // Per-type probe-mass slices of the three LP solutions.
    let slices: [Vec<Vec<f64>>; 3] = [&bundle.x_star, &bundle.y_star, &bundle.z_star].map(|sol| {
        adj.iter()
            .map(|edges| edges.iter().map(|&e| sol.values[e]).collect())
            .collect()
    });
    let cum = kiid_cumulative(&inst.online);
    let mut trace = RunTrace::new(inst.offline.len(), inst.horizon);
    let mut state = AvailabilityState::new(inst);
    for t in 0..inst.horizon {
        let mut rng = trial.round(t);
        let v = sample_index(&cum, &mut rng);
        let branch = rng.gen::<f64>();
        let chosen = if branch < w.alpha {
            Some(0)
        } else if branch < w.alpha + w.beta {
            Some(1)
        } else if branch < w.alpha + w.beta + w.gamma {
            Some(2)
        } else {
            None
        };
        let probes = match chosen {
            Some(which) => {
                let outcome = ppdr(
                    inst,
                    &adj[v],
                    &slices[which][v],
                    inst.online[v].patience,
                    &mut state,
                    &mut rng,
                )?;
                if let Some(e) = outcome.matched_edge {
                    trace.credit_match(inst, t, e);
                }
                outcome.probes
            }
            None => Vec::new(),
        };
        trace.events.push(RoundEvent {
            round: t,
            arrival: v,
            probes,
        });
    }
    Ok(trace)
}

/// Availability of every `(offline vertex, round)` pair implied by a
/// trace: entry `u * horizon + t` is true iff `u` was unmatched and under
/// its patience budget at the **start** of round `t`.
pub fn availability_table(inst: &Instance, trace: &RunTrace) -> Vec<bool> {
    let horizon = inst.horizon;
    let mut out = vec![false; inst.offline.len() * horizon];
    let mut state = AvailabilityState::new(inst);
    for t in 0..horizon {
        for u in 0..inst.offline.len() {
            out[u * horizon + t] = state.is_available(u);
        }
        if let Some(ev) = trace.events.get(t) {
            for p in &ev.probes {
                let u = inst.edges[p.edge].u;
                if p.success {
                    state.record_match(u);
                } else {
                    state.record_failure(u);
                }
            }
        }
    }
    out
}

/// Availability probabilities ρ_{e,t} for the kad algorithm: the chance
/// the offline endpoint of edge `e` is unmatched at the start of round
/// `t`, under a fixed `(bundle, weights, λ)`.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct RhoTable {
    /// Row-major values, index `e * horizon + t`.
    pub rho: Vec<f64>,
    pub n_edges: usize,
    pub horizon: usize,
    /// Simulations per round prefix; 0 means the exact closed form.
    pub simulations_used: usize,
    /// The weights the table was computed for (mismatch is an error).
    pub weights: Weights,
    /// The λ the table was computed for.
    pub lambda: f64,
}

impl RhoTable {
    #[inline]
    pub fn get(&self, e: usize, t: usize) -> f64 {
        self.rho[e * self.horizon + t]
    }
}

fn require_kad(inst: &Instance) -> Result<(), AlgoError> {
    if inst.arrival_model != ArrivalModel::Kad || !inst.is_unit_success() {
        return Err(AlgoError::NotKadUnitSuccess);
    }
    Ok(())
}

/// The combined per-(edge, round) probe mass α·x* + β·y* + γ·z*.
fn combined_mass(
    inst: &Instance,
    bundle: &BenchmarkBundle,
    w: &Weights,
) -> Result<Vec<f64>, AlgoError> {
    let n = inst.edges.len() * inst.horizon;
    for (name, sol) in [
        ("x_star", &bundle.x_star),
        ("y_star", &bundle.y_star),
        ("z_star", &bundle.z_star),
    ] {
        if sol.values.len() < n {
            return Err(AlgoError::BundleMismatch(format!(
                "{name} has {} values but the instance needs {} (edges × rounds)",
                sol.values.len(),
                n
            )));
        }
    }
    let mut xbar = vec![0.0; n];
    for (i, x) in xbar.iter_mut().enumerate() {
        *x = w.alpha * bundle.x_star.values[i]
            + w.beta * bundle.y_star.values[i]
            + w.gamma * bundle.z_star.values[i];
    }
    Ok(xbar)
}

/// Probe/clamp accounting for the kad algorithm. Clamps only occur when
/// an estimated ρ dips below λ (never with the exact table).
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, serde::Serialize)]
pub struct ClampStats {
    /// Per-edge probe probabilities clamped down to 1.
    pub clamped_probabilities: u64,
    /// Rounds whose total probe mass exceeded 1 (later edges truncated).
    pub truncated_rounds: u64,
    /// Rounds in which a categorical probe draw was made.
    pub draws: u64,
}

impl ClampStats {
    pub fn merge(&mut self, other: &ClampStats) {
        self.clamped_probabilities += other.clamped_probabilities;
        self.truncated_rounds += other.truncated_rounds;
        self.draws += other.draws;
    }
}

/// One kad round: sample the arrival, make the single categorical probe
/// draw over available neighbors, apply the match. Returns the event and
/// the matched edge.
fn tsf_kad_round(
    inst: &Instance,
    online_adj: &[Vec<usize>],
    xbar: &[f64],
    rho: &RhoTable,
    lambda: f64,
    state: &mut AvailabilityState,
    t: usize,
    rng: &mut ChaCha8Rng,
    clamps: &mut ClampStats,
) -> (RoundEvent, Option<usize>) {
    let horizon = inst.horizon;
    let cum = cumulative(inst.online.iter().map(|v| v.arrival.prob_at(t)));
    let v = sample_index(&cum, rng);
    let p_vt = inst.arrival_prob(v, t);
    let available: Vec<usize> = online_adj[v]
        .iter()
        .copied()
        .filter(|&e| state.is_available(inst.edges[e].u))
        .collect();
    let mut event = RoundEvent {
        round: t,
        arrival: v,
        probes: Vec::new(),
    };
    if available.is_empty() || p_vt <= 0.0 {
        return (event, None);
    }
    // Single categorical draw over the available edges plus a reject mass:
    // per-edge probe probability λ·x̄ / (p_{v,t}·ρ), clamped to 1 (counted).
    // The draw walks cumulative prefixes against one uniform in [0,1), so
    // if the total mass exceeds 1 the overflowing tail is simply
    // unreachable (counted as a truncated round, never renormalized).
    clamps.draws += 1;
    let mut qs = Vec::with_capacity(available.len());
    let mut total = 0.0;
    for &e in &available {
        let rho_et = rho.get(e, t);
        let raw = if rho_et > 0.0 {
            lambda * xbar[e * horizon + t] / (p_vt * rho_et)
        } else {
            // Estimated ρ of 0 for a vertex that is in fact available:
            // pure estimation noise; treat as a clamped certain probe.
            f64::INFINITY
        };
        let q = if raw > 1.0 {
            clamps.clamped_probabilities += 1;
            1.0
        } else {
            raw
        };
        total += q;
        qs.push(q);
    }
    if total > 1.0 + 1e-12 {
        clamps.truncated_rounds += 1;
    }
    let r = rng.gen::<f64>();
    let mut acc = 0.0;
    let mut chosen = None;
    for (&e, &q) in available.iter().zip(&qs) {
        acc += q;
        if r < acc {
            chosen = Some(e);
            break;
        }
    }
    if let Some(e) = chosen {
        // Unit success probability: the probe always matches.
        event.probes.push(Probe {
            edge: e,
            success: true,
        });
        state.record_match(inst.edges[e].u);
        return (event, Some(e));
    }
    (event, None)
}

/// Exact availability table via the closed-form recursion
/// `ρ_u(t+1) = ρ_u(t) − λ · Σ_{e ∈ E_u} x̄_{e,t}`:
/// with unit success probabilities the per-round probability that `u` gets
/// matched is exactly `λ Σ x̄_{e,t}` — the arrival probability, the
/// availability `ρ`, and the conditional probe probability
/// `λ·x̄/(p·ρ)` multiply out — so availability declines deterministically.
/// The offline LP cap `Σ_t Σ_e x̄ ≤ 1` keeps every entry ≥ 1 − λ, which
/// for λ = 1/2 is the guarantee ρ ≥ λ (no clamping ever occurs).
pub fn exact_rho(
    inst: &Instance,
    bundle: &BenchmarkBundle,
    w: &Weights,
    lambda: f64,
) -> Result<RhoTable, AlgoError> {
    w.validate()?;
    require_kad(inst)?;
    let horizon = inst.horizon;
    let xbar = combined_mass(inst, bundle, w)?;
    let mut avail = vec![1.0f64; inst.offline.len() * (horizon + 1)];
    let offline_adj = inst.offline_adjacency();
    for (u, adj) in offline_adj.iter().enumerate() {
        for t in 0..horizon {
            let drain: f64 = adj.iter().map(|&e| xbar[e * horizon + t]).sum();
            let next = (avail[u * (horizon + 1) + t] - lambda * drain).clamp(0.0, 1.0);
            avail[u * (horizon + 1) + t + 1] = next;
        }
    }
    let mut rho = vec![1.0; inst.edges.len() * horizon];
    for (e, edge) in inst.edges.iter().enumerate() {
        for t in 0..horizon {
            rho[e * horizon + t] = avail[edge.u * (horizon + 1) + t];
        }
    }
    Ok(RhoTable {
        rho,
        n_edges: inst.edges.len(),
        horizon,
        simulations_used: 0,
        weights: *w,
        lambda,
    })
}

/// Estimates the availability table by prefix simulation: with columns
/// `0..t` already filled, the algorithm's first `t` rounds are simulated
/// `s` times and column `t` is set to each offline vertex's empirical
/// availability frequency. Column 0 is identically 1.
///
/// Simulations within a prefix are independent (and run in parallel with
/// the `parallel` feature); results are bit-identical across thread
/// counts because each simulation derives its own generator from `seed`.
pub fn estimate_rho(
    inst: &Instance,
    bundle: &BenchmarkBundle,
    w: &Weights,
    s: usize,
    seed: u64,
) -> Result<RhoTable, AlgoError> {
    w.validate()?;
    require_kad(inst)?;
    if s < 1 {
        return Err(AlgoError::TooFewSimulations);
    }
    let horizon = inst.horizon;
    let xbar = combined_mass(inst, bundle, w)?;
    let online_adj = inst.online_adjacency();
    let mut table = RhoTable {
        rho: vec![1.0; inst.edges.len() * horizon],
        n_edges: inst.edges.len(),
        horizon,
        simulations_used: s,
        weights: *w,
        lambda: DEFAULT_LAMBDA,
    };
    for t_fill in 1..horizon {
        let prefix = |sim: usize| -> Vec<bool> {
            let mut rng = rng_from(mix(mix(seed, t_fill as u64), sim as u64));
            let mut state = AvailabilityState::new(inst);
            let mut clamps = ClampStats::default();
            for t in 0..t_fill {
                tsf_kad_round(
                    inst,
                    &online_adj,
                    &xbar,
                    &table,
                    DEFAULT_LAMBDA,
                    &mut state,
                    t,
                    &mut rng,
                    &mut clamps,
                );
            }
            state.snapshot()
        };
        let add = |mut acc: Vec<u64>, snap: Vec<bool>| {
            for (a, b) in acc.iter_mut().zip(&snap) {
                *a += *b as u64;
            }
            acc
        };
        let zero = || vec![0u64; inst.offline.len()];
        #[cfg(feature = "parallel")]
        let counts: Vec<u64> = (0..s)
            .into_par_iter()
            .map(prefix)
            .fold(zero, add)
            .reduce(zero, |mut a, b| {
                for (x, y) in a.iter_mut().zip(&b) {
                    *x += y;
                }
                a
            });
        #[cfg(not(feature = "parallel"))]
        let counts: Vec<u64> = (0..s).map(prefix).fold(zero(), add);
        for (e, edge) in inst.edges.iter().enumerate() {
            table.rho[e * horizon + t_fill] = counts[edge.u] as f64 / s as f64;
        }
    }
    Ok(table)
}

/// Runs the kad algorithm for one trial with a precomputed ρ table.
///
/// Per round with arrival `v`: if no neighbor is available, reject;
/// otherwise one categorical draw probes edge `e` with probability
/// `λ·(α x* + β y* + γ z*)_{e,t} / (p_{v,t}·ρ_{e,t})` and rejects with the
/// residual mass. Probabilities are clamped to [0,1] with clamp/truncation
/// counters in the returned [`ClampStats`]; nothing is renormalized.
pub fn run_tsf_kad(
    inst: &Instance,
    bundle: &BenchmarkBundle,
    w: &Weights,
    rho: &RhoTable,
    lambda: f64,
    trial: &TrialRng,
) -> Result<(RunTrace, ClampStats), AlgoError> {
    w.validate()?;
    require_kad(inst)?;
    if rho.n_edges != inst.edges.len() || rho.horizon != inst.horizon {
        return Err(AlgoError::RhoMismatch(format!(
            "table is {} edges × {} rounds, instance is {} × {}",
            rho.n_edges,
            rho.horizon,
            inst.edges.len(),
            inst.horizon
        )));
    }
    if rho.weights != *w {
        return Err(AlgoError::RhoMismatch(
            "table was estimated under different weights".into(),
        ));
    }
    if rho.lambda != lambda {
        return Err(AlgoError::RhoMismatch(format!(
            "table was estimated with λ = {}, run requested λ = {lambda}",
            rho.lambda
        )));
    }
    let xbar = combined_mass(inst, bundle, w)?;
    let online_adj = inst.online_adjacency();
    let mut trace = RunTrace::new(inst.offline.len(), inst.horizon);
    let mut state = AvailabilityState::new(inst);
    let mut clamps = ClampStats::default();
    for t in 0..inst.horizon {
        let mut rng = trial.round(t);
        let (event, matched) = tsf_kad_round(
            inst,
            &online_adj,
            &xbar,
            rho,
            lambda,
            &mut state,
            t,
            &mut rng,
            &mut clamps,
        );
        if let Some(e) = matched {
            trace.credit_match(inst, t, e);
        }
        trace.events.push(event);
    }
    Ok((trace, clamps))
}

/// Rewrites an individual-fairness instance as a group-fairness one with
/// identical LP optima:
///
/// * every offline vertex becomes its own group (`indiv_u{i}`), so the
///   offline group max-min ranges over exactly the per-vertex utilities;
/// * the online side is replicated into one block per round: copy
///   `(v, s)` arrives with probability `p_{v,s}` in round `s` and never
///   otherwise, and block `s` forms group `round{s}`, so the online group
///   max-min ranges over exactly the per-round expected utilities.
///
/// Kiid input is first re-expressed per-round. Requires unit success
/// probabilities (the output must be a valid kad instance).
pub fn reduce_individual_to_group(inst: &Instance) -> Result<Instance, AlgoError> {
    if !inst.is_unit_success() {
        return Err(AlgoError::ReductionNeedsUnitSuccess);
    }
    let base = crate::model::to_kad(inst);
    let horizon = base.horizon;
    let n_types = base.online.len();
    let mut groups: Vec<String> = (0..base.offline.len()).map(|i| format!("indiv_u{i}")).collect();
    groups.extend((0..horizon).map(|s| format!("round{s}")));
    let mut offline = base.offline.clone();
    for (i, u) in offline.iter_mut().enumerate() {
        u.group = format!("indiv_u{i}");
    }
    let mut online = Vec::with_capacity(n_types * horizon);
    for s in 0..horizon {
        for (v, ty) in base.online.iter().enumerate() {
            let mut p_t = vec![0.0; horizon];
            p_t[s] = ty.arrival.prob_at(s);
            online.push(OnlineType {
                id: s * n_types + v,
                group: format!("round{s}"),
                patience: ty.patience,
                arrival: Arrival::PerRound { p_t },
            });
        }
    }
    let mut edges = Vec::with_capacity(base.edges.len() * horizon);
    for e in &base.edges {
        for s in 0..horizon {
            let mut copy = e.clone();
            copy.v = s * n_types + e.v;
            edges.push(copy);
        }
    }
    Ok(Instance {
        schema_version: base.schema_version,
        horizon,
        arrival_model: ArrivalModel::Kad,
        offline,
        online,
        edges,
        groups,
        metadata: base.metadata.clone(),
    })
}
