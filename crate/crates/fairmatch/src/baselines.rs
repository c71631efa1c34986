//! Greedy baseline heuristics.
//!
//! All three share the arrival sampling, availability tracking, and
//! patience accounting of the randomized algorithms ([`AvailabilityState`]
//! is the same code path), so comparisons isolate the probe policy:
//!
//! * [`greedy_o`] — probe available neighbors by descending `p_e · w_op`;
//! * [`greedy_r`] — probe available neighbors by descending `p_e · w_on`;
//! * [`greedy_d`] — pick the offline group with the lowest accumulated
//!   average utility, probe its available neighbors by descending `w_off`,
//!   then fall back to the next-worst group, and so on.
//!
//! Ties break toward the lower edge (resp. group) index so runs are
//! reproducible. Given the arrival sequence, the only randomness left is
//! the probe success coin flips.

use rand::Rng;

use crate::algo::AvailabilityState;
use crate::model::{Instance, Probe, RoundEvent, RunTrace};
use crate::rng::TrialRng;

/// Per-round cumulative arrival distribution (kiid reuses round 0).
fn arrival_cumulative(inst: &Instance, t: usize) -> Vec<f64> {
    crate::algo::cumulative(inst.online.iter().map(|v| v.arrival.prob_at(t)))
}

/// Probes `ordered` edges (already sorted by the heuristic's priority) for
/// the round-`t` arrival until a success or the arrival's patience is
/// spent; skips unavailable offline endpoints without consuming patience.
fn probe_in_order(
    inst: &Instance,
    ordered: &[usize],
    patience_v: u32,
    state: &mut AvailabilityState,
    rng: &mut impl Rng,
) -> (Vec<Probe>, Option<usize>) {
    let mut probes = Vec::new();
    for &e in ordered {
        if probes.len() >= patience_v as usize {
            break;
        }
        let u = inst.edges[e].u;
        if !state.is_available(u) {
            continue;
        }
        let success = rng.gen::<f64>() < inst.edges[e].p_e;
        probes.push(Probe { edge: e, success });
        if success {
            state.record_match(u);
            return (probes, Some(e));
        }
        state.record_failure(u);
    }
    (probes, None)
}

/// Shared greedy skeleton: `order(v, t, state)` returns the probe order
/// for the arrival of type `v` in round `t`.
fn run_greedy(
    inst: &Instance,
    trial: &TrialRng,
    mut order: impl FnMut(usize, usize, &RunTrace) -> Vec<usize>,
) -> RunTrace {
    let mut trace = RunTrace::new(inst.offline.len(), inst.horizon);
    let mut state = AvailabilityState::new(inst);
    for t in 0..inst.horizon {
        let mut rng = trial.round(t);
        let cum = arrival_cumulative(inst, t);
        let v = crate::algo::sample_index(&cum, &mut rng);
        let ordered = order(v, t, &trace);
        let (probes, matched) = probe_in_order(
            inst,
            &ordered,
            inst.online[v].patience,
            &mut state,
            &mut rng,
        );
        if let Some(e) = matched {
            trace.credit_match(inst, t, e);
        }
        trace.events.push(RoundEvent {
            round: t,
            arrival: v,
            probes,
        });
    }
    trace
}

/// Sorts edge indices by descending key, ties toward the lower edge index.
fn sort_desc_by_key(mut edges: Vec<usize>, key: impl Fn(usize) -> f64) -> Vec<usize> {
    edges.sort_by(|&a, &b| {
        key(b)
            .partial_cmp(&key(a))
            .expect("edge priorities must not be NaN")
            .then(a.cmp(&b))
    });
    edges
}

/// Profit-greedy: probe by descending expected operator value `p_e · w_op`.
pub fn greedy_o(inst: &Instance, trial: &TrialRng) -> RunTrace {
    let adj = inst.online_adjacency();
    run_greedy(inst, trial, |v, _, _| {
        sort_desc_by_key(adj[v].clone(), |e| inst.edges[e].p_e * inst.edges[e].w_op)
    })
}

/// Rider-greedy: probe by descending expected online value `p_e · w_on`.
pub fn greedy_r(inst: &Instance, trial: &TrialRng) -> RunTrace {
    let adj = inst.online_adjacency();
    run_greedy(inst, trial, |v, _, _| {
        sort_desc_by_key(adj[v].clone(), |e| inst.edges[e].p_e * inst.edges[e].w_on)
    })
}

/// Driver-fairness greedy: for each arrival, rank offline groups by their
/// accumulated average realized utility so far (total utility collected by
/// the group's members divided by the group's size, ascending; ties toward
/// the lower group index). Probe the worst group's available neighbors by
/// descending `w_off`, falling back to later groups in rank order when the
/// arrival has no (available) neighbor there, within the arrival's
/// patience budget.
pub fn greedy_d(inst: &Instance, trial: &TrialRng) -> RunTrace {
    let adj = inst.online_adjacency();
    let positions = inst.group_positions();
    let group_of: Vec<usize> = inst
        .offline
        .iter()
        .map(|u| *positions.get(u.group.as_str()).expect("validated instance"))
        .collect();
    let mut group_size = vec![0usize; inst.groups.len()];
    for &g in &group_of {
        group_size[g] += 1;
    }
    run_greedy(inst, trial, |v, _, trace| {
        // Accumulated per-group offline utility from the trace so far.
        let mut totals = vec![0.0; inst.groups.len()];
        for (u, util) in trace.realized_off_utility.iter().enumerate() {
            totals[group_of[u]] += util;
        }
        let mut ranked: Vec<usize> = (0..inst.groups.len())
            .filter(|&g| group_size[g] > 0)
            .collect();
        ranked.sort_by(|&a, &b| {
            let avg_a = totals[a] / group_size[a] as f64;
            let avg_b = totals[b] / group_size[b] as f64;
            avg_a
                .partial_cmp(&avg_b)
                .expect("utilities must not be NaN")
                .then(a.cmp(&b))
        });
        let mut ordered = Vec::with_capacity(adj[v].len());
        for g in ranked {
            let in_group: Vec<usize> = adj[v]
                .iter()
                .copied()
                .filter(|&e| group_of[inst.edges[e].u] == g)
                .collect();
            ordered.extend(sort_desc_by_key(in_group, |e| inst.edges[e].w_off));
        }
        ordered
    })
}
