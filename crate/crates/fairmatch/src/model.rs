//! Core domain model: three-sided matching instances, arrival models,
//! simulation traces, and the objective evaluators.
//!
//! An [`Instance`] couples a bipartite graph (offline vertices `U`, online
//! types `V`, edges with per-entity utilities) with an arrival process over
//! `horizon` rounds. Each round samples exactly one online type; the
//! per-round type distribution is stationary (`kiid`) or time-varying
//! (`kad`). A probe of edge `e` succeeds independently with probability
//! `p_e`; failed probes consume patience on both endpoints.
//!
//! Objectives evaluated over simulated [`RunTrace`]s:
//!
//! * operator profit — expected sum of `w_op` over successful probes;
//! * offline/online group fairness — the minimum over declared groups of
//!   the group's expected total utility (`w_off` / `w_on`);
//! * offline individual fairness — the minimum over offline vertices of
//!   expected utility;
//! * online individual fairness — the minimum over round indices of the
//!   expected utility collected by that round's arrival.

use serde::{Deserialize, Serialize};
use std::collections::{HashMap, HashSet};
use std::fmt;

use crate::stats::Estimate;

/// Tolerance for requiring each round's arrival probabilities to sum to 1.
pub const ARRIVAL_MASS_TOLERANCE: f64 = 1e-9;

/// Tolerance under which an expected arrival count is accepted as integral.
pub const INTEGER_ARRIVALS_TOLERANCE: f64 = 1e-9;

/// The instance JSON schema version this crate reads and writes.
pub const SCHEMA_VERSION: u32 = 1;

/// Errors from model-level operations.
#[derive(Debug, thiserror::Error)]
pub enum ModelError {
    #[error("unknown online type id {0}")]
    UnknownOnlineType(usize),
    #[error("unknown group '{0}' referenced by a vertex")]
    UnknownGroup(String),
    #[error("operation requires a kiid instance")]
    NotKiid,
    #[error("operation requires a kad instance")]
    NotKad,
    #[error("type {type_id} has non-integer expected arrivals n_v = {n_v}; fragmentation is only defined for integral n_v")]
    NonIntegerArrivals { type_id: usize, n_v: f64 },
    #[error("evaluate_objectives requires at least one trace")]
    EmptyTraces,
    #[error("trace invariant violated: {0}")]
    TraceInvariant(String),
    #[error("unsupported schema_version {0} (expected {SCHEMA_VERSION})")]
    UnsupportedSchema(u32),
    #[error("instance JSON error: {0}")]
    Json(#[from] serde_json::Error),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

/// Arrival process class.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ArrivalModel {
    /// Known independent identically distributed arrivals: one stationary
    /// type distribution shared by every round.
    Kiid,
    /// Known adversarial distribution: a separate known type distribution
    /// per round.
    Kad,
}

/// Per-type arrival probabilities. Serialized as either a scalar `p`
/// (stationary) or an array `p_t` of length `horizon` (per-round).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Arrival {
    Stationary { p: f64 },
    PerRound { p_t: Vec<f64> },
}

impl Arrival {
    /// Arrival probability of this type in round `t` (0-based).
    pub fn prob_at(&self, t: usize) -> f64 {
        match self {
            Arrival::Stationary { p } => *p,
            Arrival::PerRound { p_t } => p_t.get(t).copied().unwrap_or(0.0),
        }
    }
}

/// A static (offline) vertex: stays across rounds until it is matched or
/// exhausts its patience for failed probes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OfflineVertex {
    /// Dense index; must equal the vertex's position in `Instance::offline`.
    pub id: usize,
    /// Group membership; must be declared in `Instance::groups`.
    pub group: String,
    /// Number of failed probes tolerated over the vertex's lifetime (>= 1).
    pub patience: u32,
}

/// An online vertex type: one arrival is sampled per round.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OnlineType {
    /// Dense index; must equal the type's position in `Instance::online`.
    pub id: usize,
    /// Group membership; must be declared in `Instance::groups`.
    pub group: String,
    /// Number of failed probes an arrival of this type tolerates within its
    /// round (>= 1).
    pub patience: u32,
    /// Arrival probabilities (`p` scalar or `p_t` per-round array).
    #[serde(flatten)]
    pub arrival: Arrival,
}

/// An edge with one utility per entity and a probe success probability.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Edge {
    /// Offline endpoint id.
    pub u: usize,
    /// Online type id.
    pub v: usize,
    /// Probability that a probe of this edge succeeds.
    pub p_e: f64,
    /// Operator utility collected on a successful match.
    pub w_op: f64,
    /// Offline-side utility collected on a successful match.
    pub w_off: f64,
    /// Online-side utility collected on a successful match.
    pub w_on: f64,
}

/// Optional provenance information carried by generated instances.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct InstanceMetadata {
    /// Additive utility shift applied during ingestion to keep utilities
    /// nonnegative. Recorded because it changes ratio denominators.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub utility_shift: Option<f64>,
    /// Free-form source tag (e.g. "ingest").
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub source: Option<String>,
    /// Records dropped during ingestion (outside the bounding box).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dropped_records: Option<usize>,
}

impl InstanceMetadata {
    fn is_empty(&self) -> bool {
        self.utility_shift.is_none() && self.source.is_none() && self.dropped_records.is_none()
    }
}

fn default_schema_version() -> u32 {
    SCHEMA_VERSION
}

fn metadata_is_empty(m: &Option<InstanceMetadata>) -> bool {
    m.as_ref().map_or(true, InstanceMetadata::is_empty)
}

/// A complete three-sided matching instance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Instance {
    /// Schema version of the JSON encoding (currently 1).
    #[serde(default = "default_schema_version")]
    pub schema_version: u32,
    /// Number of arrival rounds `T`.
    pub horizon: usize,
    /// Arrival process class.
    pub arrival_model: ArrivalModel,
    /// Offline vertices, indexed by `id`.
    pub offline: Vec<OfflineVertex>,
    /// Online types, indexed by `id`.
    pub online: Vec<OnlineType>,
    /// Edges; at most one per `(u, v)` pair.
    pub edges: Vec<Edge>,
    /// Declared group ids (each vertex belongs to exactly one).
    pub groups: Vec<String>,
    /// Optional provenance metadata.
    #[serde(default, skip_serializing_if = "metadata_is_empty")]
    pub metadata: Option<InstanceMetadata>,
}

impl Instance {
    /// Parses an instance from JSON, rejecting unknown schema versions.
    pub fn from_json_str(s: &str) -> Result<Self, ModelError> {
        let inst: Instance = serde_json::from_str(s)?;
        if inst.schema_version != SCHEMA_VERSION {
            return Err(ModelError::UnsupportedSchema(inst.schema_version));
        }
        Ok(inst)
    }

    /// Reads an instance from a JSON reader, rejecting unknown schema versions.
    pub fn from_json_reader(r: impl std::io::Read) -> Result<Self, ModelError> {
        let inst: Instance = serde_json::from_reader(r)?;
        if inst.schema_version != SCHEMA_VERSION {
            return Err(ModelError::UnsupportedSchema(inst.schema_version));
        }
        Ok(inst)
    }

    /// Pretty JSON encoding with stable field order (reproducible output).
    pub fn to_json_string_pretty(&self) -> Result<String, ModelError> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    /// Arrival probability of type `v` in round `t` (0-based).
    pub fn arrival_prob(&self, v: usize, t: usize) -> f64 {
        self.online[v].arrival.prob_at(t)
    }

    /// Edge indices incident to each online type, ascending.
    pub fn online_adjacency(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.online.len()];
        for (i, e) in self.edges.iter().enumerate() {
            if e.v < adj.len() {
                adj[e.v].push(i);
            }
        }
        adj
    }

    /// Edge indices incident to each offline vertex, ascending.
    pub fn offline_adjacency(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.offline.len()];
        for (i, e) in self.edges.iter().enumerate() {
            if e.u < adj.len() {
                adj[e.u].push(i);
            }
        }
        adj
    }

    /// Position of each group id in `groups`.
    pub fn group_positions(&self) -> HashMap<&str, usize> {
        self.groups
            .iter()
            .enumerate()
            .map(|(i, g)| (g.as_str(), i))
            .collect()
    }

    /// True if every edge has unit success probability.
    pub fn is_unit_success(&self) -> bool {
        self.edges.iter().all(|e| e.p_e == 1.0)
    }

    /// True if the instance is kiid with every type's expected arrival
    /// count equal to 1 (the precondition of the kiid benchmark LPs).
    pub fn is_fragmented_kiid(&self) -> bool {
        self.arrival_model == ArrivalModel::Kiid
            && self.online.iter().all(|v| {
                (self.horizon as f64 * v.arrival.prob_at(0) - 1.0).abs()
                    <= INTEGER_ARRIVALS_TOLERANCE
            })
    }
}

/// A single violated instance invariant; `field` names the offending datum
/// and `rule` states the rule broken.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub field: String,
    pub rule: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.field, self.rule)
    }
}

fn violation(field: impl Into<String>, rule: impl Into<String>) -> Violation {
    Violation {
        field: field.into(),
        rule: rule.into(),
    }
}

/// Checks every instance invariant and returns the list of violations
/// (empty iff the instance is valid). Violations are data, not failures.
pub fn validate_instance(inst: &Instance) -> Vec<Violation> {
    let mut out = Vec::new();
    if inst.schema_version != SCHEMA_VERSION {
        out.push(violation(
            "schema_version",
            format!("expected {SCHEMA_VERSION}, found {}", inst.schema_version),
        ));
    }
    if inst.horizon == 0 {
        out.push(violation("horizon", "must be at least 1"));
    }
    if inst.offline.is_empty() {
        out.push(violation("offline", "must be nonempty"));
    }
    if inst.online.is_empty() {
        out.push(violation("online", "must be nonempty"));
    }
    let mut seen_groups = HashSet::new();
    for g in &inst.groups {
        if !seen_groups.insert(g.as_str()) {
            out.push(violation("groups", format!("duplicate group id '{g}'")));
        }
    }

    for (i, u) in inst.offline.iter().enumerate() {
        if u.id != i {
            out.push(violation(
                format!("offline[{i}].id"),
                format!("must equal its position {i}, found {}", u.id),
            ));
        }
        if u.patience < 1 {
            out.push(violation(format!("offline[{i}].patience"), "must be >= 1"));
        }
        if !seen_groups.contains(u.group.as_str()) {
            out.push(violation(
                format!("offline[{i}].group"),
                format!("group '{}' is not declared in groups", u.group),
            ));
        }
    }

    for (i, v) in inst.online.iter().enumerate() {
        if v.id != i {
            out.push(violation(
                format!("online[{i}].id"),
                format!("must equal its position {i}, found {}", v.id),
            ));
        }
        if v.patience < 1 {
            out.push(violation(format!("online[{i}].patience"), "must be >= 1"));
        }
        if !seen_groups.contains(v.group.as_str()) {
            out.push(violation(
                format!("online[{i}].group"),
                format!("group '{}' is not declared in groups", v.group),
            ));
        }
        match (&v.arrival, inst.arrival_model) {
            (Arrival::Stationary { p }, ArrivalModel::Kiid) => {
                if !p.is_finite() || *p < 0.0 || *p > 1.0 {
                    out.push(violation(
                        format!("online[{i}].p"),
                        format!("probability {p} outside [0, 1]"),
                    ));
                }
            }
            (Arrival::PerRound { p_t }, ArrivalModel::Kad) => {
                if p_t.len() != inst.horizon {
                    out.push(violation(
                        format!("online[{i}].p_t"),
                        format!("length {} must equal horizon {}", p_t.len(), inst.horizon),
                    ));
                }
                for (t, p) in p_t.iter().enumerate() {
                    if !p.is_finite() || *p < 0.0 || *p > 1.0 {
                        out.push(violation(
                            format!("online[{i}].p_t[{t}]"),
                            format!("probability {p} outside [0, 1]"),
                        ));
                    }
                }
            }
            (Arrival::Stationary { .. }, ArrivalModel::Kad) => {
                out.push(violation(
                    format!("online[{i}]"),
                    "kad instance requires per-round `p_t` arrival probabilities",
                ));
            }
            (Arrival::PerRound { .. }, ArrivalModel::Kiid) => {
                out.push(violation(
                    format!("online[{i}]"),
                    "kiid instance requires a stationary `p` arrival probability",
                ));
            }
        }
    }

    // Arrival mass: each round's type distribution must sum to 1.
    let arrivals_well_formed = inst.online.iter().all(|v| {
        matches!(
            (&v.arrival, inst.arrival_model),
            (Arrival::Stationary { .. }, ArrivalModel::Kiid)
        ) || matches!(
            (&v.arrival, inst.arrival_model),
            (Arrival::PerRound { p_t }, ArrivalModel::Kad) if p_t.len() == inst.horizon
        )
    });
    if arrivals_well_formed && inst.horizon > 0 {
        match inst.arrival_model {
            ArrivalModel::Kiid => {
                let mass: f64 = inst.online.iter().map(|v| v.arrival.prob_at(0)).sum();
                if (mass - 1.0).abs() > ARRIVAL_MASS_TOLERANCE {
                    out.push(violation(
                        "online[*].p",
                        format!("arrival mass {mass} must equal 1 within {ARRIVAL_MASS_TOLERANCE:e}"),
                    ));
                }
            }
            ArrivalModel::Kad => {
                for t in 0..inst.horizon {
                    let mass: f64 = inst.online.iter().map(|v| v.arrival.prob_at(t)).sum();
                    if (mass - 1.0).abs() > ARRIVAL_MASS_TOLERANCE {
                        out.push(violation(
                            format!("online[*].p_t[{t}]"),
                            format!(
                                "arrival mass {mass} must equal 1 within {ARRIVAL_MASS_TOLERANCE:e}"
                            ),
                        ));
                    }
                }
            }
        }
    }

    let mut seen_edges = HashSet::new();
    for (i, e) in inst.edges.iter().enumerate() {
        if e.u >= inst.offline.len() {
            out.push(violation(
                format!("edges[{i}].u"),
                format!("offline id {} does not exist", e.u),
            ));
        }
        if e.v >= inst.online.len() {
            out.push(violation(
                format!("edges[{i}].v"),
                format!("online id {} does not exist", e.v),
            ));
        }
        if !e.p_e.is_finite() || e.p_e < 0.0 || e.p_e > 1.0 {
            out.push(violation(
                format!("edges[{i}].p_e"),
                format!("success probability {} outside [0, 1]", e.p_e),
            ));
        }
        if inst.arrival_model == ArrivalModel::Kad && e.p_e != 1.0 {
            out.push(violation(
                format!("edges[{i}].p_e"),
                "kad instances require unit success probability on every edge",
            ));
        }
        for (name, w) in [("w_op", e.w_op), ("w_off", e.w_off), ("w_on", e.w_on)] {
            if !w.is_finite() || w < 0.0 {
                out.push(violation(
                    format!("edges[{i}].{name}"),
                    format!("utility {w} must be finite and nonnegative"),
                ));
            }
        }
        if !seen_edges.insert((e.u, e.v)) {
            out.push(violation(
                format!("edges[{i}]"),
                format!("duplicate edge ({}, {})", e.u, e.v),
            ));
        }
    }

    out
}

/// Expected number of arrivals of type `v` over the horizon:
/// `sum_t p_{v,t}` (kad) or `T * p_v` (kiid).
pub fn expected_arrivals(inst: &Instance, v: usize) -> Result<f64, ModelError> {
    let ty = inst
        .online
        .get(v)
        .ok_or(ModelError::UnknownOnlineType(v))?;
    Ok(match &ty.arrival {
        Arrival::Stationary { p } => inst.horizon as f64 * p,
        Arrival::PerRound { p_t } => p_t.iter().sum(),
    })
}

/// Splits every kiid type with expected arrivals `n_v = k > 1` into `k`
/// copies with arrival probability `1/T` each, inheriting group, patience,
/// and edges. The result has `n_v = 1` for every type; the three benchmark
/// LP optima are unchanged (group utility totals are invariant under the
/// split). Types with `n_v = 0` are dropped.
///
/// Errors on non-kiid input and on non-integral `n_v` (rounding would
/// silently change the benchmark).
pub fn fragment_types(inst: &Instance) -> Result<Instance, ModelError> {
    if inst.arrival_model != ArrivalModel::Kiid {
        return Err(ModelError::NotKiid);
    }
    let horizon = inst.horizon as f64;
    let mut copies_of: Vec<Vec<usize>> = Vec::with_capacity(inst.online.len());
    let mut online = Vec::new();
    for ty in &inst.online {
        let n_v = horizon * ty.arrival.prob_at(0);
        let k = n_v.round();
        if (n_v - k).abs() > INTEGER_ARRIVALS_TOLERANCE || k < 0.0 {
            return Err(ModelError::NonIntegerArrivals {
                type_id: ty.id,
                n_v,
            });
        }
        let mut ids = Vec::with_capacity(k as usize);
        for _ in 0..k as usize {
            let id = online.len();
            ids.push(id);
            online.push(OnlineType {
                id,
                group: ty.group.clone(),
                patience: ty.patience,
                arrival: Arrival::Stationary { p: 1.0 / horizon },
            });
        }
        copies_of.push(ids);
    }
    let mut edges = Vec::new();
    for e in &inst.edges {
        for &copy in &copies_of[e.v] {
            edges.push(Edge {
                u: e.u,
                v: copy,
                p_e: e.p_e,
                w_op: e.w_op,
                w_off: e.w_off,
                w_on: e.w_on,
            });
        }
    }
    Ok(Instance {
        schema_version: inst.schema_version,
        horizon: inst.horizon,
        arrival_model: ArrivalModel::Kiid,
        offline: inst.offline.clone(),
        online,
        edges,
        groups: inst.groups.clone(),
        metadata: inst.metadata.clone(),
    })
}

/// Re-expresses a kiid instance in kad form (each round carries the same
/// stationary distribution). Kad input is returned unchanged. The kad
/// benchmark LPs and the individual-fairness reduction both consume this
/// form.
pub fn to_kad(inst: &Instance) -> Instance {
    if inst.arrival_model == ArrivalModel::Kad {
        return inst.clone();
    }
    let mut out = inst.clone();
    out.arrival_model = ArrivalModel::Kad;
    for ty in &mut out.online {
        let p = ty.arrival.prob_at(0);
        ty.arrival = Arrival::PerRound {
            p_t: vec![p; inst.horizon],
        };
    }
    out
}

/// One probe attempt within a round.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Probe {
    /// Index into `Instance::edges`.
    pub edge: usize,
    /// Whether the probe succeeded (made the match).
    pub success: bool,
}

/// Everything that happened in one round.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RoundEvent {
    /// Round index, 0-based.
    pub round: usize,
    /// The online type that arrived this round.
    pub arrival: usize,
    /// Probes made for this arrival, in order; empty when the arrival was
    /// rejected without probing.
    pub probes: Vec<Probe>,
}

/// One simulated episode: per-round events plus realized utilities.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunTrace {
    /// One event per round, in round order (length = horizon).
    pub events: Vec<RoundEvent>,
    /// Total operator utility over successful probes.
    pub realized_op_utility: f64,
    /// Offline utility per offline vertex id.
    pub realized_off_utility: Vec<f64>,
    /// Online utility per round index (utility of that round's arrival).
    pub realized_on_utility: Vec<f64>,
}

impl RunTrace {
    /// An empty trace for an instance with `n_offline` vertices and
    /// `horizon` rounds.
    pub fn new(n_offline: usize, horizon: usize) -> Self {
        RunTrace {
            events: Vec::with_capacity(horizon),
            realized_op_utility: 0.0,
            realized_off_utility: vec![0.0; n_offline],
            realized_on_utility: vec![0.0; horizon],
        }
    }

    /// Credits the utilities of a successful probe of `edge` in round `t`.
    pub fn credit_match(&mut self, inst: &Instance, t: usize, edge: usize) {
        let e = &inst.edges[edge];
        self.realized_op_utility += e.w_op;
        self.realized_off_utility[e.u] += e.w_off;
        self.realized_on_utility[t] += e.w_on;
    }
}

/// Verifies every trace invariant against its instance:
///
/// * at most one successful probe per round, none after a success;
/// * per-round probe count bounded by the arrival's patience;
/// * probed edges belong to the arrival's edge set;
/// * no probe of an offline vertex that was already matched or had
///   exhausted its patience;
/// * realized utilities exactly recomputable from the events.
pub fn check_trace(inst: &Instance, trace: &RunTrace) -> Result<(), ModelError> {
    let fail = |msg: String| Err(ModelError::TraceInvariant(msg));
    let mut matched = vec![false; inst.offline.len()];
    let mut failures = vec![0u32; inst.offline.len()];
    let mut op = 0.0;
    let mut off = vec![0.0; inst.offline.len()];
    let mut on = vec![0.0; inst.horizon];
    if trace.events.len() != inst.horizon {
        return fail(format!(
            "expected {} round events, found {}",
            inst.horizon,
            trace.events.len()
        ));
    }
    for (t, ev) in trace.events.iter().enumerate() {
        if ev.round != t {
            return fail(format!("event {t} has round index {}", ev.round));
        }
        let Some(arrival) = inst.online.get(ev.arrival) else {
            return fail(format!("round {t}: unknown arrival type {}", ev.arrival));
        };
        if ev.probes.len() > arrival.patience as usize {
            return fail(format!(
                "round {t}: {} probes exceed arrival patience {}",
                ev.probes.len(),
                arrival.patience
            ));
        }
        let mut matched_this_round = false;
        for p in &ev.probes {
            if matched_this_round {
                return fail(format!("round {t}: probe after a successful match"));
            }
            let Some(e) = inst.edges.get(p.edge) else {
                return fail(format!("round {t}: unknown edge {}", p.edge));
            };
            if e.v != ev.arrival {
                return fail(format!(
                    "round {t}: probed edge {} does not belong to arrival type {}",
                    p.edge, ev.arrival
                ));
            }
            if matched[e.u] {
                return fail(format!(
                    "round {t}: probe of already-matched offline vertex {}",
                    e.u
                ));
            }
            if failures[e.u] >= inst.offline[e.u].patience {
                return fail(format!(
                    "round {t}: probe of offline vertex {} past its patience",
                    e.u
                ));
            }
            if p.success {
                matched_this_round = true;
                matched[e.u] = true;
                op += e.w_op;
                off[e.u] += e.w_off;
                on[t] += e.w_on;
            } else {
                failures[e.u] += 1;
            }
        }
    }
    if op != trace.realized_op_utility {
        return fail(format!(
            "realized_op_utility {} differs from recomputed {}",
            trace.realized_op_utility, op
        ));
    }
    if off != trace.realized_off_utility {
        return fail("realized_off_utility differs from recomputation".into());
    }
    if on != trace.realized_on_utility {
        return fail("realized_on_utility differs from recomputation".into());
    }
    Ok(())
}

/// Monte-Carlo estimates of all five objectives over a set of traces.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ObjectiveEstimate {
    /// Expected operator profit.
    pub profit: Estimate,
    /// Minimum over groups (with offline members) of expected total
    /// offline utility.
    pub offline_group: Estimate,
    /// Minimum over groups (with online members) of expected total online
    /// utility.
    pub online_group: Estimate,
    /// Minimum over offline vertices of expected utility.
    pub offline_individual: Estimate,
    /// Minimum over round indices of the expected utility of that round's
    /// arrival.
    pub online_individual: Estimate,
    /// Group attaining the offline minimum (None if no group qualified).
    pub worst_offline_group: Option<String>,
    /// Group attaining the online minimum.
    pub worst_online_group: Option<String>,
    /// Degenerate-group notices (groups without members on a side are
    /// dropped from that side's minimum).
    pub warnings: Vec<String>,
}

/// Streaming accumulator for a family of per-trace series: keeps the sum
/// and sum of squares per series so means and standard errors come out
/// without storing every sample.
struct SeriesAccumulator {
    n: usize,
    sum: Vec<f64>,
    sumsq: Vec<f64>,
}

impl SeriesAccumulator {
    fn new(series: usize) -> Self {
        SeriesAccumulator {
            n: 0,
            sum: vec![0.0; series],
            sumsq: vec![0.0; series],
        }
    }

    fn push(&mut self, values: &[f64]) {
        debug_assert_eq!(values.len(), self.sum.len());
        self.n += 1;
        for (i, v) in values.iter().enumerate() {
            self.sum[i] += v;
            self.sumsq[i] += v * v;
        }
    }

    fn estimate(&self, i: usize) -> Estimate {
        let n = self.n as f64;
        let m = self.sum[i] / n;
        if self.n < 2 {
            return Estimate {
                value: m,
                stderr: 0.0,
            };
        }
        let var = ((self.sumsq[i] - self.sum[i] * self.sum[i] / n) / (n - 1.0)).max(0.0);
        Estimate {
            value: m,
            stderr: (var / n).sqrt(),
        }
    }

    /// Estimate of the series with the smallest mean among `candidates`.
    fn min_estimate(&self, candidates: &[usize]) -> Option<(usize, Estimate)> {
        candidates
            .iter()
            .map(|&i| (i, self.estimate(i)))
            .min_by(|a, b| {
                a.1.value
                    .partial_cmp(&b.1.value)
                    .expect("objective means must not be NaN")
                    .then(a.0.cmp(&b.0))
            })
    }
}

/// Estimates all five objectives from simulated traces.
///
/// Group fairness takes the minimum over declared groups of the group's
/// expected **total** utility on the relevant side, matching the benchmark
/// LP objectives so that empirical/optimum ratios are directly comparable.
/// Groups without members on a side are dropped from that side's minimum
/// and reported in `warnings`.
pub fn evaluate_objectives(
    inst: &Instance,
    traces: &[RunTrace],
) -> Result<ObjectiveEstimate, ModelError> {
    if traces.is_empty() {
        return Err(ModelError::EmptyTraces);
    }
    let positions = inst.group_positions();
    let n_groups = inst.groups.len();
    let mut offline_gidx = Vec::with_capacity(inst.offline.len());
    for u in &inst.offline {
        offline_gidx.push(
            *positions
                .get(u.group.as_str())
                .ok_or_else(|| ModelError::UnknownGroup(u.group.clone()))?,
        );
    }
    let mut online_gidx = Vec::with_capacity(inst.online.len());
    for v in &inst.online {
        online_gidx.push(
            *positions
                .get(v.group.as_str())
                .ok_or_else(|| ModelError::UnknownGroup(v.group.clone()))?,
        );
    }

    let mut profit = SeriesAccumulator::new(1);
    let mut off_groups = SeriesAccumulator::new(n_groups);
    let mut on_groups = SeriesAccumulator::new(n_groups);
    let mut off_vertices = SeriesAccumulator::new(inst.offline.len());
    let mut on_rounds = SeriesAccumulator::new(inst.horizon);

    let mut off_group_buf = vec![0.0; n_groups];
    let mut on_group_buf = vec![0.0; n_groups];
    for trace in traces {
        if trace.events.len() != inst.horizon
            || trace.realized_off_utility.len() != inst.offline.len()
            || trace.realized_on_utility.len() != inst.horizon
        {
            return Err(ModelError::TraceInvariant(
                "trace dimensions do not match the instance".into(),
            ));
        }
        profit.push(&[trace.realized_op_utility]);
        off_group_buf.iter_mut().for_each(|x| *x = 0.0);
        for (u, util) in trace.realized_off_utility.iter().enumerate() {
            off_group_buf[offline_gidx[u]] += util;
        }
        off_groups.push(&off_group_buf);
        on_group_buf.iter_mut().for_each(|x| *x = 0.0);
        for (t, util) in trace.realized_on_utility.iter().enumerate() {
            on_group_buf[online_gidx[trace.events[t].arrival]] += util;
        }
        on_groups.push(&on_group_buf);
        off_vertices.push(&trace.realized_off_utility);
        on_rounds.push(&trace.realized_on_utility);
    }

    let mut warnings = Vec::new();
    let mut off_candidates = Vec::new();
    let mut on_candidates = Vec::new();
    let mut has_offline = vec![false; n_groups];
    let mut has_online = vec![false; n_groups];
    for &g in &offline_gidx {
        has_offline[g] = true;
    }
    for &g in &online_gidx {
        has_online[g] = true;
    }
    for (g, name) in inst.groups.iter().enumerate() {
        if has_offline[g] {
            off_candidates.push(g);
        } else {
            warnings.push(format!(
                "group '{name}' has no offline members; dropped from offline group fairness"
            ));
        }
        if has_online[g] {
            on_candidates.push(g);
        } else {
            warnings.push(format!(
                "group '{name}' has no online members; dropped from online group fairness"
            ));
        }
    }

    let zero = Estimate {
        value: 0.0,
        stderr: 0.0,
    };
    let (worst_off, offline_group) = match off_groups.min_estimate(&off_candidates) {
        Some((g, e)) => (Some(inst.groups[g].clone()), e),
        None => (None, zero),
    };
    let (worst_on, online_group) = match on_groups.min_estimate(&on_candidates) {
        Some((g, e)) => (Some(inst.groups[g].clone()), e),
        None => (None, zero),
    };
    let all_vertices: Vec<usize> = (0..inst.offline.len()).collect();
    let all_rounds: Vec<usize> = (0..inst.horizon).collect();
    let offline_individual = off_vertices
        .min_estimate(&all_vertices)
        .map(|(_, e)| e)
        .unwrap_or(zero);
    let online_individual = on_rounds
        .min_estimate(&all_rounds)
        .map(|(_, e)| e)
        .unwrap_or(zero);

    Ok(ObjectiveEstimate {
        profit: profit.estimate(0),
        offline_group,
        online_group,
        offline_individual,
        online_individual,
        worst_offline_group: worst_off,
        worst_online_group: worst_on,
        warnings,
    })
}
