//! Benchmark linear programs and the solver wrapper.
//!
//! Three group-level benchmark LPs exist per instance (operator profit,
//! offline group fairness, online group fairness), in two flavors:
//!
//! * **kiid** (stationary arrivals, fragmented so every type has expected
//!   arrival count 1): one variable `x_e ∈ [0,1]` per edge; per-vertex
//!   expected-success caps `Σ x_e p_e ≤ 1` and patience caps `Σ x_e ≤ Δ`;
//! * **kad** (per-round arrivals, unit success probabilities): one
//!   variable `x_{e,t} ∈ [0,1]` per edge and round; per-offline-vertex cap
//!   `Σ_t Σ_e x_{e,t} ≤ 1` and per-(type, round) mass caps
//!   `Σ_e x_{e,t} ≤ p_{v,t}`.
//!
//! Max-min fairness objectives are linearized with an auxiliary variable
//! `η` bounded above by each group's expected **total** utility; the same
//! totals convention is used by the trace evaluator so empirical/optimum
//! ratios compare like with like. Individual fairness has a direct LP
//! ([`build_kad_indiv_lp`]) whose optimum provably matches the
//! group-fairness optimum of the reduced instance produced by
//! `reduce_individual_to_group`.
//!
//! Every optimal solution is re-checked for feasibility independently of
//! the solver before being returned.

use serde::Serialize;

use crate::model::{ArrivalModel, Instance};

/// Constraint rows of an optimal solution must hold within this slack.
pub const FEASIBILITY_TOL: f64 = 1e-6;

/// Variable bounds of an optimal solution must hold within this slack.
pub const BOUND_TOL: f64 = 1e-9;

/// Errors from LP construction and solving.
#[derive(Debug, thiserror::Error)]
pub enum LpError {
    #[error("kiid benchmark LPs require a kiid instance")]
    NotKiid,
    #[error("kad benchmark LPs require a kad instance")]
    NotKad,
    #[error("kiid benchmark LPs require a fragmented instance (every type with expected arrivals 1); call fragment_types first")]
    NotFragmented,
    #[error("kad benchmark LPs require unit success probability on every edge")]
    NotUnitSuccess,
    #[error("no declared group has {0} members; the max-min objective is undefined")]
    NoEligibleGroups(Side),
    #[error("linear program is infeasible")]
    Infeasible,
    #[error("linear program is unbounded")]
    Unbounded,
    #[error("solver returned a solution violating {0}")]
    SolutionOutOfTolerance(String),
    #[error("malformed linear program: {0}")]
    InvalidProgram(String),
}

/// Which side of the bipartite graph an operation refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Offline,
    Online,
}

impl std::fmt::Display for Side {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Side::Offline => "offline",
            Side::Online => "online",
        })
    }
}

/// Benchmark objective selector for the group-level LPs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum LpObjective {
    /// Maximize expected operator profit.
    Operator,
    /// Maximize the minimum over groups of expected total offline utility.
    OfflineFair,
    /// Maximize the minimum over groups of expected total online utility.
    OnlineFair,
}

/// A decision variable with box bounds.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LpVar {
    pub name: String,
    pub lo: f64,
    pub hi: f64,
}

/// Comparison operator of a constraint row.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ConstraintOp {
    Le,
    Eq,
}

/// One sparse constraint row: `Σ coeff · var  (≤ or =)  rhs`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LpConstraint {
    /// Human-readable row label (also used in error messages).
    pub label: String,
    /// Sparse terms as (variable index, coefficient).
    pub terms: Vec<(usize, f64)>,
    pub op: ConstraintOp,
    pub rhs: f64,
}

/// A linear program in sparse form, to be maximized.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LpProgram {
    pub vars: Vec<LpVar>,
    /// Sparse objective as (variable index, coefficient); maximized.
    pub maximize: Vec<(usize, f64)>,
    pub constraints: Vec<LpConstraint>,
    /// Construction notices (e.g. groups dropped from a max-min objective
    /// because they have no members on the relevant side).
    pub warnings: Vec<String>,
}

/// Solver verdict.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum LpStatus {
    Optimal,
}

/// A solved program: primal values (in variable order) and the objective.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LpSolution {
    pub values: Vec<f64>,
    pub objective_value: f64,
    pub status: LpStatus,
}

/// The three benchmark optima and their primal solutions for one instance.
/// These optima upper-bound the expected value any online algorithm can
/// collect, so every competitive ratio is measured against them.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchmarkBundle {
    /// Operator-profit LP solution.
    pub x_star: LpSolution,
    /// Offline-group-fairness LP solution.
    pub y_star: LpSolution,
    /// Online-group-fairness LP solution.
    pub z_star: LpSolution,
    pub opt_op: f64,
    pub opt_off: f64,
    pub opt_on: f64,
}

/// Variable index of edge `e` in a kiid program.
#[inline]
pub fn kiid_var(e: usize) -> usize {
    e
}

/// Variable index of `(edge e, round t)` in a kad program.
#[inline]
pub fn kad_var(e: usize, t: usize, horizon: usize) -> usize {
    e * horizon + t
}

fn edge_var_names(inst: &Instance) -> Vec<LpVar> {
    inst.edges
        .iter()
        .enumerate()
        .map(|(i, e)| LpVar {
            name: format!("x[{},{}]#{i}", e.u, e.v),
            lo: 0.0,
            hi: 1.0,
        })
        .collect()
}

/// Groups with at least one member on `side`, as (group index, member
/// vertex/type indices); `dropped` collects warning strings for the rest.
fn eligible_groups(
    inst: &Instance,
    side: Side,
    warnings: &mut Vec<String>,
) -> Vec<(usize, Vec<usize>)> {
    let mut members: Vec<Vec<usize>> = vec![Vec::new(); inst.groups.len()];
    let positions = inst.group_positions();
    match side {
        Side::Offline => {
            for u in &inst.offline {
                if let Some(&g) = positions.get(u.group.as_str()) {
                    members[g].push(u.id);
                }
            }
        }
        Side::Online => {
            for v in &inst.online {
                if let Some(&g) = positions.get(v.group.as_str()) {
                    members[g].push(v.id);
                }
            }
        }
    }
    let mut out = Vec::new();
    for (g, m) in members.into_iter().enumerate() {
        if m.is_empty() {
            warnings.push(format!(
                "group '{}' has no {side} members; dropped from the max-min objective",
                inst.groups[g]
            ));
        } else {
            out.push((g, m));
        }
    }
    out
}

/// Per-group expected-total-utility terms at the kiid variables:
/// Σ over the group's incident edges of `w · p_e · x_e`.
fn kiid_group_terms(inst: &Instance, side: Side, members: &[usize]) -> Vec<(usize, f64)> {
    let member_set: std::collections::HashSet<usize> = members.iter().copied().collect();
    let mut terms = Vec::new();
    for (i, e) in inst.edges.iter().enumerate() {
        let owner = match side {
            Side::Offline => e.u,
            Side::Online => e.v,
        };
        if member_set.contains(&owner) {
            let w = match side {
                Side::Offline => e.w_off,
                Side::Online => e.w_on,
            };
            terms.push((kiid_var(i), w * e.p_e));
        }
    }
    terms
}

fn kad_group_terms(
    inst: &Instance,
    side: Side,
    members: &[usize],
) -> Vec<(usize, f64)> {
    let member_set: std::collections::HashSet<usize> = members.iter().copied().collect();
    let horizon = inst.horizon;
    let mut terms = Vec::new();
    for (i, e) in inst.edges.iter().enumerate() {
        let owner = match side {
            Side::Offline => e.u,
            Side::Online => e.v,
        };
        if member_set.contains(&owner) {
            let w = match side {
                Side::Offline => e.w_off,
                Side::Online => e.w_on,
            };
            for t in 0..horizon {
                terms.push((kad_var(i, t, horizon), w));
            }
        }
    }
    terms
}

/// Appends `maximize η` with one row `η ≤ group expression` per group.
fn add_maxmin_objective(
    prog: &mut LpProgram,
    label_prefix: &str,
    groups: Vec<(String, Vec<(usize, f64)>)>,
) {
    let eta = prog.vars.len();
    prog.vars.push(LpVar {
        name: "eta".into(),
        lo: 0.0,
        hi: f64::INFINITY,
    });
    prog.maximize = vec![(eta, 1.0)];
    for (name, terms) in groups {
        // η − Σ w x ≤ 0  ⇔  η ≤ group utility.
        let mut row = vec![(eta, 1.0)];
        row.extend(terms.into_iter().map(|(v, c)| (v, -c)));
        prog.constraints.push(LpConstraint {
            label: format!("{label_prefix}[{name}]"),
            terms: row,
            op: ConstraintOp::Le,
            rhs: 0.0,
        });
    }
}

/// Builds a kiid benchmark LP for `objective`.
///
/// Requires a fragmented kiid instance (every type's expected arrival
/// count equal to 1): the per-type caps below are only the right
/// per-arrival budgets under that normalization.
pub fn build_kiid_lp(inst: &Instance, objective: LpObjective) -> Result<LpProgram, LpError> {
    if inst.arrival_model != ArrivalModel::Kiid {
        return Err(LpError::NotKiid);
    }
    if !inst.is_fragmented_kiid() {
        return Err(LpError::NotFragmented);
    }
    let mut prog = LpProgram {
        vars: edge_var_names(inst),
        maximize: Vec::new(),
        constraints: Vec::new(),
        warnings: Vec::new(),
    };
    // Offline caps: expected successes ≤ 1 and expected probes ≤ patience.
    for (u, adj) in inst.offline_adjacency().iter().enumerate() {
        prog.constraints.push(LpConstraint {
            label: format!("offline_success[{u}]"),
            terms: adj.iter().map(|&e| (kiid_var(e), inst.edges[e].p_e)).collect(),
            op: ConstraintOp::Le,
            rhs: 1.0,
        });
        prog.constraints.push(LpConstraint {
            label: format!("offline_patience[{u}]"),
            terms: adj.iter().map(|&e| (kiid_var(e), 1.0)).collect(),
            op: ConstraintOp::Le,
            rhs: inst.offline[u].patience as f64,
        });
    }
    // Online caps per (fragmented) type, one expected arrival each.
    for (v, adj) in inst.online_adjacency().iter().enumerate() {
        prog.constraints.push(LpConstraint {
            label: format!("online_success[{v}]"),
            terms: adj.iter().map(|&e| (kiid_var(e), inst.edges[e].p_e)).collect(),
            op: ConstraintOp::Le,
            rhs: 1.0,
        });
        prog.constraints.push(LpConstraint {
            label: format!("online_patience[{v}]"),
            terms: adj.iter().map(|&e| (kiid_var(e), 1.0)).collect(),
            op: ConstraintOp::Le,
            rhs: inst.online[v].patience as f64,
        });
    }
    match objective {
        LpObjective::Operator => {
            prog.maximize = inst
                .edges
                .iter()
                .enumerate()
                .map(|(i, e)| (kiid_var(i), e.w_op * e.p_e))
                .collect();
        }
        LpObjective::OfflineFair | LpObjective::OnlineFair => {
            let side = if objective == LpObjective::OfflineFair {
                Side::Offline
            } else {
                Side::Online
            };
            let eligible = eligible_groups(inst, side, &mut prog.warnings);
            if eligible.is_empty() {
                return Err(LpError::NoEligibleGroups(side));
            }
            let rows = eligible
                .into_iter()
                .map(|(g, members)| {
                    (
                        inst.groups[g].clone(),
                        kiid_group_terms(inst, side, &members),
                    )
                })
                .collect();
            add_maxmin_objective(&mut prog, &format!("{side}_group"), rows);
        }
    }
    Ok(prog)
}

fn require_kad_unit_success(inst: &Instance) -> Result<(), LpError> {
    if inst.arrival_model != ArrivalModel::Kad {
        return Err(LpError::NotKad);
    }
    if !inst.is_unit_success() {
        return Err(LpError::NotUnitSuccess);
    }
    Ok(())
}

fn kad_base_program(inst: &Instance) -> LpProgram {
    let horizon = inst.horizon;
    let mut vars = Vec::with_capacity(inst.edges.len() * horizon);
    for (i, e) in inst.edges.iter().enumerate() {
        for t in 0..horizon {
            vars.push(LpVar {
                name: format!("x[{},{}]#{i}@{t}", e.u, e.v),
                lo: 0.0,
                hi: 1.0,
            });
        }
    }
    let mut prog = LpProgram {
        vars,
        maximize: Vec::new(),
        constraints: Vec::new(),
        warnings: Vec::new(),
    };
    // Each offline vertex is matched at most once over the whole horizon.
    for (u, adj) in inst.offline_adjacency().iter().enumerate() {
        let mut terms = Vec::with_capacity(adj.len() * horizon);
        for &e in adj {
            for t in 0..horizon {
                terms.push((kad_var(e, t, horizon), 1.0));
            }
        }
        prog.constraints.push(LpConstraint {
            label: format!("offline_match[{u}]"),
            terms,
            op: ConstraintOp::Le,
            rhs: 1.0,
        });
    }
    // Per round, each type's probe mass is capped by its arrival mass.
    let online_adj = inst.online_adjacency();
    for (v, adj) in online_adj.iter().enumerate() {
        for t in 0..horizon {
            prog.constraints.push(LpConstraint {
                label: format!("online_mass[{v},{t}]"),
                terms: adj.iter().map(|&e| (kad_var(e, t, horizon), 1.0)).collect(),
                op: ConstraintOp::Le,
                rhs: inst.arrival_prob(v, t),
            });
        }
    }
    prog
}

/// Builds a kad benchmark LP for `objective`. Requires unit success
/// probabilities (the kad guarantee only exists for that regime).
pub fn build_kad_lp(inst: &Instance, objective: LpObjective) -> Result<LpProgram, LpError> {
    require_kad_unit_success(inst)?;
    let horizon = inst.horizon;
    let mut prog = kad_base_program(inst);
    match objective {
        LpObjective::Operator => {
            let mut obj = Vec::with_capacity(inst.edges.len() * horizon);
            for (i, e) in inst.edges.iter().enumerate() {
                for t in 0..horizon {
                    obj.push((kad_var(i, t, horizon), e.w_op));
                }
            }
            prog.maximize = obj;
        }
        LpObjective::OfflineFair | LpObjective::OnlineFair => {
            let side = if objective == LpObjective::OfflineFair {
                Side::Offline
            } else {
                Side::Online
            };
            let eligible = eligible_groups(inst, side, &mut prog.warnings);
            if eligible.is_empty() {
                return Err(LpError::NoEligibleGroups(side));
            }
            let rows = eligible
                .into_iter()
                .map(|(g, members)| {
                    (
                        inst.groups[g].clone(),
                        kad_group_terms(inst, side, &members),
                    )
                })
                .collect();
            add_maxmin_objective(&mut prog, &format!("{side}_group"), rows);
        }
    }
    Ok(prog)
}

/// Builds the direct individual-fairness benchmark LP on a kad instance.
///
/// * `Side::Offline`: maximize the minimum over offline vertices of the
///   vertex's expected utility `Σ_t Σ_{e ∈ E_u} w_off x_{e,t}`.
/// * `Side::Online`: maximize the minimum over rounds of the round's
///   expected utility `Σ_v Σ_{e ∈ E_v} w_on x_{e,t}` (an arrival's
///   expected utility, averaged over which type arrives).
///
/// Reducing the instance with `reduce_individual_to_group` and solving the
/// group-fairness LP yields the same optimum; this direct form is the
/// cheaper benchmark and doubles as an independent cross-check.
pub fn build_kad_indiv_lp(inst: &Instance, side: Side) -> Result<LpProgram, LpError> {
    require_kad_unit_success(inst)?;
    let horizon = inst.horizon;
    let mut prog = kad_base_program(inst);
    let rows: Vec<(String, Vec<(usize, f64)>)> = match side {
        Side::Offline => inst
            .offline_adjacency()
            .iter()
            .enumerate()
            .map(|(u, adj)| {
                let mut terms = Vec::new();
                for &e in adj {
                    for t in 0..horizon {
                        terms.push((kad_var(e, t, horizon), inst.edges[e].w_off));
                    }
                }
                (format!("u{u}"), terms)
            })
            .collect(),
        Side::Online => (0..horizon)
            .map(|t| {
                let terms = inst
                    .edges
                    .iter()
                    .enumerate()
                    .map(|(i, e)| (kad_var(i, t, horizon), e.w_on))
                    .collect();
                (format!("t{t}"), terms)
            })
            .collect(),
    };
    add_maxmin_objective(&mut prog, &format!("{side}_individual"), rows);
    Ok(prog)
}

fn check_program(prog: &LpProgram) -> Result<(), LpError> {
    let n = prog.vars.len();
    for v in &prog.vars {
        if v.lo.is_nan() || v.hi.is_nan() || v.lo > v.hi {
            return Err(LpError::InvalidProgram(format!(
                "variable '{}' has bounds [{}, {}]",
                v.name, v.lo, v.hi
            )));
        }
    }
    let check_terms = |terms: &[(usize, f64)], what: &str| -> Result<(), LpError> {
        for &(i, c) in terms {
            if i >= n {
                return Err(LpError::InvalidProgram(format!(
                    "{what} references variable {i} (only {n} declared)"
                )));
            }
            if !c.is_finite() {
                return Err(LpError::InvalidProgram(format!(
                    "{what} has non-finite coefficient {c}"
                )));
            }
        }
        Ok(())
    };
    check_terms(&prog.maximize, "objective")?;
    for c in &prog.constraints {
        check_terms(&c.terms, &c.label)?;
        if !c.rhs.is_finite() {
            return Err(LpError::InvalidProgram(format!(
                "{} has non-finite rhs {}",
                c.label, c.rhs
            )));
        }
    }
    Ok(())
}

fn row_value(terms: &[(usize, f64)], values: &[f64]) -> f64 {
    terms.iter().map(|&(i, c)| c * values[i]).sum()
}

/// Solves a program to optimality.
///
/// Returns an error (never a silent default) on infeasible or unbounded
/// programs. An optimal solution is independently re-checked: every
/// constraint must hold within [`FEASIBILITY_TOL`] and every bound within
/// [`BOUND_TOL`] (values are then snapped onto their bounds so downstream
/// probability computations never see `-1e-15`). Deterministic for
/// identical input.
pub fn solve_lp(prog: &LpProgram) -> Result<LpSolution, LpError> {
    check_program(prog)?;
    let mut problem = minilp::Problem::new(minilp::OptimizationDirection::Maximize);
    let mut obj = vec![0.0; prog.vars.len()];
    for &(i, c) in &prog.maximize {
        obj[i] += c;
    }
    let handles: Vec<minilp::Variable> = prog
        .vars
        .iter()
        .zip(&obj)
        .map(|(v, &c)| problem.add_var(c, (v.lo, v.hi)))
        .collect();
    for c in &prog.constraints {
        // Merge duplicate variable references; minilp expects each variable
        // at most once per row.
        let mut merged: std::collections::BTreeMap<usize, f64> = std::collections::BTreeMap::new();
        for &(i, coeff) in &c.terms {
            *merged.entry(i).or_insert(0.0) += coeff;
        }
        let expr: Vec<(minilp::Variable, f64)> =
            merged.into_iter().map(|(i, co)| (handles[i], co)).collect();
        let op = match c.op {
            ConstraintOp::Le => minilp::ComparisonOp::Le,
            ConstraintOp::Eq => minilp::ComparisonOp::Eq,
        };
        problem.add_constraint(expr.as_slice(), op, c.rhs);
    }
    let solution = problem.solve().map_err(|e| match e {
        minilp::Error::Infeasible => LpError::Infeasible,
        minilp::Error::Unbounded => LpError::Unbounded,
    })?;
    let mut values: Vec<f64> = handles.iter().map(|&h| solution[h]).collect();
    for (v, spec) in values.iter_mut().zip(&prog.vars) {
        if *v < spec.lo {
            if spec.lo - *v > BOUND_TOL {
                return Err(LpError::SolutionOutOfTolerance(format!(
                    "lower bound of '{}' ({} < {})",
                    spec.name, *v, spec.lo
                )));
            }
            *v = spec.lo;
        }
        if *v > spec.hi {
            if *v - spec.hi > BOUND_TOL {
                return Err(LpError::SolutionOutOfTolerance(format!(
                    "upper bound of '{}' ({} > {})",
                    spec.name, *v, spec.hi
                )));
            }
            *v = spec.hi;
        }
    }
    for c in &prog.constraints {
        let lhs = row_value(&c.terms, &values);
        let ok = match c.op {
            ConstraintOp::Le => lhs <= c.rhs + FEASIBILITY_TOL,
            ConstraintOp::Eq => (lhs - c.rhs).abs() <= FEASIBILITY_TOL,
        };
        if !ok {
            return Err(LpError::SolutionOutOfTolerance(format!(
                "constraint '{}' (lhs {}, rhs {})",
                c.label, lhs, c.rhs
            )));
        }
    }
    let objective_value = row_value(&prog.maximize, &values);
    Ok(LpSolution {
        values,
        objective_value,
        status: LpStatus::Optimal,
    })
}

fn build_three(
    inst: &Instance,
) -> Result<(LpProgram, LpProgram, LpProgram), LpError> {
    match inst.arrival_model {
        ArrivalModel::Kiid => Ok((
            build_kiid_lp(inst, LpObjective::Operator)?,
            build_kiid_lp(inst, LpObjective::OfflineFair)?,
            build_kiid_lp(inst, LpObjective::OnlineFair)?,
        )),
        ArrivalModel::Kad => Ok((
            build_kad_lp(inst, LpObjective::Operator)?,
            build_kad_lp(inst, LpObjective::OfflineFair)?,
            build_kad_lp(inst, LpObjective::OnlineFair)?,
        )),
    }
}

fn bundle_from(
    x_star: LpSolution,
    y_star: LpSolution,
    z_star: LpSolution,
) -> BenchmarkBundle {
    BenchmarkBundle {
        opt_op: x_star.objective_value,
        opt_off: y_star.objective_value,
        opt_on: z_star.objective_value,
        x_star,
        y_star,
        z_star,
    }
}

/// Solves the three benchmark LPs for an instance (kiid instances must be
/// fragmented first). The resulting optima are the denominators of every
/// competitive ratio. With the `parallel` feature the three solves run
/// concurrently.
pub fn benchmarks(inst: &Instance) -> Result<BenchmarkBundle, LpError> {
    let (po, pf, pn) = build_three(inst)?;
    #[cfg(feature = "parallel")]
    {
        let (x, (y, z)) = rayon::join(
            || solve_lp(&po),
            || rayon::join(|| solve_lp(&pf), || solve_lp(&pn)),
        );
        Ok(bundle_from(x?, y?, z?))
    }
    #[cfg(not(feature = "parallel"))]
    {
        Ok(bundle_from(solve_lp(&po)?, solve_lp(&pf)?, solve_lp(&pn)?))
    }
}

/// Sequential variant of [`benchmarks`], always available (used by the
/// benchmark suite to compare against the parallel path).
pub fn benchmarks_seq(inst: &Instance) -> Result<BenchmarkBundle, LpError> {
    let (po, pf, pn) = build_three(inst)?;
    Ok(bundle_from(solve_lp(&po)?, solve_lp(&pf)?, solve_lp(&pn)?))
}

/// Extracts per-edge values from a kiid solution (ignores a trailing η).
pub fn edge_values_kiid(sol: &LpSolution, n_edges: usize) -> Vec<f64> {
    sol.values[..n_edges].to_vec()
}

/// Extracts per-(edge, round) values from a kad solution, indexed
/// `e * horizon + t` (ignores a trailing η).
pub fn edge_values_kad(sol: &LpSolution, n_edges: usize, horizon: usize) -> Vec<f64> {
    sol.values[..n_edges * horizon].to_vec()
}

/// Expected total utility per group at a kiid edge vector (groups without
/// members on `side` omitted). Used to confirm that a fairness LP's
/// objective equals the smallest group expression at its own solution.
pub fn kiid_group_totals(inst: &Instance, side: Side, x: &[f64]) -> Vec<(String, f64)> {
    let mut warnings = Vec::new();
    eligible_groups(inst, side, &mut warnings)
        .into_iter()
        .map(|(g, members)| {
            let terms = kiid_group_terms(inst, side, &members);
            (inst.groups[g].clone(), row_value(&terms, x))
        })
        .collect()
}

/// Kad counterpart of [`kiid_group_totals`] (`x` indexed `e * horizon + t`).
pub fn kad_group_totals(inst: &Instance, side: Side, x: &[f64]) -> Vec<(String, f64)> {
    let mut warnings = Vec::new();
    eligible_groups(inst, side, &mut warnings)
        .into_iter()
        .map(|(g, members)| {
            let terms = kad_group_terms(inst, side, &members);
            (inst.groups[g].clone(), row_value(&terms, x))
        })
        .collect()
}
