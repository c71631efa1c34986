//! Instance generation, hardness fixtures, trial orchestration, and
//! competitive-ratio reporting.
//!
//! * [`ingest_trips`] turns taxi-style trip records into a rideshare
//!   matching instance (drivers offline, request types online, keyed by
//!   binned pickup/dropoff coordinates, with demographic-dependent probe
//!   success probabilities and distance-based utilities);
//! * [`generate_trip_records`] synthesizes a clustered trip data set with
//!   the same schema, for desk-scale experiments;
//! * [`make_hardness_group_instance`] and
//!   [`make_hardness_indiv_group_instance`] build the adversarial fixtures
//!   whose LP optima are known in closed form and whose ratio-sum bounds
//!   every algorithm must respect;
//! * [`run_experiment`] runs algorithm configurations for N independent
//!   trials each and reports per-objective empirical values, LP optima,
//!   competitive ratios, and standard errors;
//! * [`emit_report`] writes reports as CSV or JSON, deterministically.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::Path;

use rand::Rng;
use serde::{Deserialize, Serialize};

#[cfg(feature = "parallel")]
use rayon::prelude::*;

use crate::algo::{
    estimate_rho, exact_rho, reduce_individual_to_group, run_tsf, run_tsf_kad, AlgoError,
    ClampStats, RhoTable, Weights, DEFAULT_LAMBDA,
};
use crate::baselines::{greedy_d, greedy_o, greedy_r};
use crate::lp::{
    benchmarks, build_kad_indiv_lp, solve_lp, BenchmarkBundle, LpError, Side,
};
use crate::model::{
    fragment_types, to_kad, validate_instance, Arrival, ArrivalModel, Edge, Instance,
    InstanceMetadata, ModelError, OfflineVertex, OnlineType, RunTrace, SCHEMA_VERSION,
};
use crate::rng::{mix, rng_from, TrialRng};
use crate::stats::Estimate;

/// Errors from ingestion, fixtures, and experiment orchestration.
#[derive(Debug, thiserror::Error)]
pub enum HarnessError {
    #[error("no trip records inside the bounding box")]
    EmptyRecords,
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("instance failed validation ({0} violation(s); first: {1})")]
    InvalidInstance(usize, String),
    #[error("report list is empty")]
    EmptyReports,
    #[error(transparent)]
    Lp(#[from] LpError),
    #[error(transparent)]
    Algo(#[from] AlgoError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
}

/// One taxi-style trip record (the ingestion input schema).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TripRecord {
    pub driver_id: String,
    pub pickup_lat: f64,
    pub pickup_lon: f64,
    pub drop_lat: f64,
    pub drop_lon: f64,
    pub trip_length: f64,
    pub timestamp: i64,
}

fn default_lat_min() -> f64 {
    40.4
}
fn default_lat_max() -> f64 {
    40.95
}
fn default_lon_min() -> f64 {
    -75.0
}
fn default_lon_max() -> f64 {
    -73.0
}
fn default_grid_step() -> f64 {
    0.005
}
fn default_advantaged_fraction() -> f64 {
    0.7
}
fn default_pe_both_advantaged() -> f64 {
    0.6
}
fn default_pe_both_disadvantaged() -> f64 {
    0.3
}
fn default_pe_mixed() -> f64 {
    0.1
}
fn default_driver_patience() -> u32 {
    3
}
fn default_rider_patience_choices() -> Vec<u32> {
    vec![1, 2]
}

/// Ingestion parameters (all defaulted; JSON-overridable).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct IngestConfig {
    pub lat_min: f64,
    pub lat_max: f64,
    pub lon_min: f64,
    pub lon_max: f64,
    /// Coordinate bin width in degrees.
    pub grid_step: f64,
    /// Probability a driver or request type is in the advantaged group.
    pub advantaged_fraction: f64,
    /// Probe success probability when both endpoints are advantaged.
    pub pe_both_advantaged: f64,
    /// Probe success probability when both endpoints are disadvantaged.
    pub pe_both_disadvantaged: f64,
    /// Probe success probability for mixed pairs.
    pub pe_mixed: f64,
    /// Failed probes tolerated by each driver over its lifetime.
    pub driver_patience: u32,
    /// Per-type rider patience, sampled uniformly from these choices.
    pub rider_patience_choices: Vec<u32>,
    /// Additive shift keeping utilities nonnegative; `None` picks the
    /// maximum driver–pickup distance over all edges.
    pub utility_scale_shift: Option<f64>,
    /// Seed for demographics, patience, and driver-placement sampling.
    pub seed: u64,
}

impl Default for IngestConfig {
    fn default() -> Self {
        IngestConfig {
            lat_min: default_lat_min(),
            lat_max: default_lat_max(),
            lon_min: default_lon_min(),
            lon_max: default_lon_max(),
            grid_step: default_grid_step(),
            advantaged_fraction: default_advantaged_fraction(),
            pe_both_advantaged: default_pe_both_advantaged(),
            pe_both_disadvantaged: default_pe_both_disadvantaged(),
            pe_mixed: default_pe_mixed(),
            driver_patience: default_driver_patience(),
            rider_patience_choices: default_rider_patience_choices(),
            utility_scale_shift: None,
            seed: 0,
        }
    }
}

impl IngestConfig {
    pub fn validate(&self) -> Result<(), HarnessError> {
        let bad = |m: String| Err(HarnessError::InvalidConfig(m));
        if !(self.grid_step > 0.0) {
            return bad(format!("grid_step {} must be > 0", self.grid_step));
        }
        if self.lat_min >= self.lat_max || self.lon_min >= self.lon_max {
            return bad("bounding box is empty".into());
        }
        for (name, p) in [
            ("advantaged_fraction", self.advantaged_fraction),
            ("pe_both_advantaged", self.pe_both_advantaged),
            ("pe_both_disadvantaged", self.pe_both_disadvantaged),
            ("pe_mixed", self.pe_mixed),
        ] {
            if !(0.0..=1.0).contains(&p) {
                return bad(format!("{name} = {p} outside [0, 1]"));
            }
        }
        if self.driver_patience < 1 {
            return bad("driver_patience must be >= 1".into());
        }
        if self.rider_patience_choices.is_empty()
            || self.rider_patience_choices.iter().any(|&c| c < 1)
        {
            return bad("rider_patience_choices must be nonempty with values >= 1".into());
        }
        if let Some(s) = self.utility_scale_shift {
            if !(s >= 0.0) {
                return bad(format!("utility_scale_shift {s} must be >= 0"));
            }
        }
        Ok(())
    }
}

/// What ingestion produced (sizes, drops, and the applied utility shift).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IngestSummary {
    pub drivers: usize,
    pub request_types: usize,
    pub records_used: usize,
    pub records_dropped: usize,
    pub utility_shift: f64,
}

/// Reads trip records from a CSV file with a header row matching the
/// [`TripRecord`] columns. Row-level parse problems are reported as
/// invalid-parameter errors carrying the offending position; I/O
/// failures stay I/O errors.
pub fn read_trip_records(path: &Path) -> Result<Vec<TripRecord>, HarnessError> {
    let mut reader = csv::Reader::from_path(path).map_err(csv_read_error)?;
    let mut records = Vec::new();
    for row in reader.deserialize() {
        records.push(row.map_err(csv_read_error)?);
    }
    Ok(records)
}

fn csv_read_error(e: csv::Error) -> HarnessError {
    let position = e
        .position()
        .map(|p| format!(" at line {}", p.line()))
        .unwrap_or_default();
    let message = format!("trip csv{position}: {e}");
    match e.into_kind() {
        csv::ErrorKind::Io(io) => HarnessError::Io(io),
        _ => HarnessError::InvalidParameter(message),
    }
}

/// Writes trip records as CSV with a header row (the ingestion input
/// schema; inverse of [`read_trip_records`]).
pub fn write_trip_records(
    records: &[TripRecord],
    w: &mut impl Write,
) -> Result<(), HarnessError> {
    let mut csv = csv::Writer::from_writer(w);
    for r in records {
        csv.serialize(r)?;
    }
    csv.flush()?;
    Ok(())
}

const GROUP_ADVANTAGED: &str = "adv";
const GROUP_DISADVANTAGED: &str = "dis";

// Independent sampling phases of the ingestion seed, so adding a phase
// never perturbs the previous ones.
const PHASE_DRIVER_GROUPS: u64 = 1;
const PHASE_TYPE_GROUPS: u64 = 2;
const PHASE_TYPE_PATIENCE: u64 = 3;
const PHASE_DRIVER_PLACEMENT: u64 = 4;

/// Offsets of the 9×9 neighborhood a driver is placed in (in grid steps).
const PLACEMENT_RADIUS: i64 = 4;

/// Builds a rideshare matching instance from trip records.
///
/// Records outside the bounding box are dropped (counted in the summary).
/// Drivers become offline vertices (sorted by id); requests are grouped
/// into online types keyed by the binned pickup and dropoff coordinates
/// (sorted by key), with stationary arrival probability `count / N` over a
/// horizon of `N` rounds. Demographics are sampled per driver and per type
/// (advantaged with the configured probability), fixing each edge's probe
/// success probability. For every driver–type pair the driver's location
/// is sampled uniformly among the 81 grid points within 4 steps of the
/// type's pickup-bin center; with `dist` the degree-space Manhattan
/// distance of that placement and `len` the type's mean trip length, the
/// edge utilities are `w_op = len`, `w_off = len − dist + shift`,
/// `w_on = shift − dist`. The shift (default: the maximum `dist` over all
/// edges) keeps utilities nonnegative and is recorded in the instance
/// metadata because it enters every ratio denominator.
///
/// Deterministic: identical records + config produce an identical
/// instance, byte for byte.
pub fn ingest_trips(
    records: &[TripRecord],
    cfg: &IngestConfig,
) -> Result<(Instance, IngestSummary), HarnessError> {
    cfg.validate()?;
    let in_box = |r: &TripRecord| {
        r.pickup_lat >= cfg.lat_min
            && r.pickup_lat <= cfg.lat_max
            && r.drop_lat >= cfg.lat_min
            && r.drop_lat <= cfg.lat_max
            && r.pickup_lon >= cfg.lon_min
            && r.pickup_lon <= cfg.lon_max
            && r.drop_lon >= cfg.lon_min
            && r.drop_lon <= cfg.lon_max
    };
    let kept: Vec<&TripRecord> = records.iter().filter(|r| in_box(r)).collect();
    let dropped = records.len() - kept.len();
    if kept.is_empty() {
        return Err(HarnessError::EmptyRecords);
    }
    let bin = |x: f64, min: f64| ((x - min) / cfg.grid_step).floor() as i64;

    // Drivers, sorted by id for determinism.
    let mut driver_ids: Vec<&str> = kept.iter().map(|r| r.driver_id.as_str()).collect();
    driver_ids.sort_unstable();
    driver_ids.dedup();

    // Request types keyed by (pickup bin, dropoff bin); BTreeMap fixes the
    // iteration order.
    #[derive(Default)]
    struct TypeAccum {
        count: usize,
        trip_length_sum: f64,
    }
    let mut types: BTreeMap<(i64, i64, i64, i64), TypeAccum> = BTreeMap::new();
    for r in &kept {
        let key = (
            bin(r.pickup_lat, cfg.lat_min),
            bin(r.pickup_lon, cfg.lon_min),
            bin(r.drop_lat, cfg.lat_min),
            bin(r.drop_lon, cfg.lon_min),
        );
        let acc = types.entry(key).or_default();
        acc.count += 1;
        acc.trip_length_sum += r.trip_length;
    }
    let type_keys: Vec<(i64, i64, i64, i64)> = types.keys().copied().collect();
    let n = kept.len();

    // Sampling phases (each on its own stream).
    let mut rng = rng_from(mix(cfg.seed, PHASE_DRIVER_GROUPS));
    let driver_adv: Vec<bool> = driver_ids
        .iter()
        .map(|_| rng.gen::<f64>() < cfg.advantaged_fraction)
        .collect();
    let mut rng = rng_from(mix(cfg.seed, PHASE_TYPE_GROUPS));
    let type_adv: Vec<bool> = type_keys
        .iter()
        .map(|_| rng.gen::<f64>() < cfg.advantaged_fraction)
        .collect();
    let mut rng = rng_from(mix(cfg.seed, PHASE_TYPE_PATIENCE));
    let type_patience: Vec<u32> = type_keys
        .iter()
        .map(|_| {
            let i = rng.gen_range(0..cfg.rider_patience_choices.len());
            cfg.rider_patience_choices[i]
        })
        .collect();

    let group_name = |adv: bool| {
        if adv {
            GROUP_ADVANTAGED.to_string()
        } else {
            GROUP_DISADVANTAGED.to_string()
        }
    };
    let offline: Vec<OfflineVertex> = driver_ids
        .iter()
        .enumerate()
        .map(|(id, _)| OfflineVertex {
            id,
            group: group_name(driver_adv[id]),
            patience: cfg.driver_patience,
        })
        .collect();
    let online: Vec<OnlineType> = type_keys
        .iter()
        .enumerate()
        .map(|(id, key)| OnlineType {
            id,
            group: group_name(type_adv[id]),
            patience: type_patience[id],
            arrival: Arrival::Stationary {
                p: types[key].count as f64 / n as f64,
            },
        })
        .collect();

    // Complete bipartite edges, driver-major; the driver's placement (and
    // hence the Manhattan distance to the pickup-bin center) is sampled
    // per edge on the placement stream.
    let mut rng = rng_from(mix(cfg.seed, PHASE_DRIVER_PLACEMENT));
    let mut dists = Vec::with_capacity(driver_ids.len() * type_keys.len());
    for _u in 0..driver_ids.len() {
        for _v in 0..type_keys.len() {
            let di = rng.gen_range(-PLACEMENT_RADIUS..=PLACEMENT_RADIUS);
            let dj = rng.gen_range(-PLACEMENT_RADIUS..=PLACEMENT_RADIUS);
            dists.push((di.abs() + dj.abs()) as f64 * cfg.grid_step);
        }
    }
    let max_dist = dists.iter().copied().fold(0.0, f64::max);
    let shift = cfg.utility_scale_shift.unwrap_or(max_dist);
    if shift + 1e-12 < max_dist {
        return Err(HarnessError::InvalidConfig(format!(
            "utility_scale_shift {shift} is smaller than the maximum driver distance {max_dist}; online utilities would be negative"
        )));
    }
    let pe_for = |a: bool, b: bool| match (a, b) {
        (true, true) => cfg.pe_both_advantaged,
        (false, false) => cfg.pe_both_disadvantaged,
        _ => cfg.pe_mixed,
    };
    let mut edges = Vec::with_capacity(dists.len());
    for u in 0..driver_ids.len() {
        for (v, key) in type_keys.iter().enumerate() {
            let dist = dists[u * type_keys.len() + v];
            let len = types[key].trip_length_sum / types[key].count as f64;
            edges.push(Edge {
                u,
                v,
                p_e: pe_for(driver_adv[u], type_adv[v]),
                w_op: len,
                w_off: len - dist + shift,
                w_on: shift - dist,
            });
        }
    }

    let inst = Instance {
        schema_version: SCHEMA_VERSION,
        horizon: n,
        arrival_model: ArrivalModel::Kiid,
        offline,
        online,
        edges,
        groups: vec![GROUP_ADVANTAGED.into(), GROUP_DISADVANTAGED.into()],
        metadata: Some(InstanceMetadata {
            utility_shift: Some(shift),
            source: Some("ingest".into()),
            dropped_records: Some(dropped),
        }),
    };
    let summary = IngestSummary {
        drivers: inst.offline.len(),
        request_types: inst.online.len(),
        records_used: n,
        records_dropped: dropped,
        utility_shift: shift,
    };
    Ok((inst, summary))
}

/// Synthesizes clustered taxi-style trip records (the bundled stand-in
/// for a real data set): `n_records` trips between a handful of hotspot
/// neighborhoods inside the default bounding box, assigned round-robin to
/// `n_drivers` drivers. Every record lands in a distinct coordinate bin
/// (colliding pickups are nudged by one grid step), so ingesting the
/// result yields exactly `n_records` request types, each with one expected
/// arrival. Trip lengths are the Manhattan pickup→dropoff distances.
pub fn generate_trip_records(n_drivers: usize, n_records: usize, seed: u64) -> Vec<TripRecord> {
    let cfg = IngestConfig::default();
    let mut rng = rng_from(mix(seed, 0x7472_6970)); // "trip"
    let hotspots: Vec<(f64, f64)> = (0..5)
        .map(|_| {
            (
                rng.gen_range(cfg.lat_min + 0.1..cfg.lat_max - 0.1),
                rng.gen_range(cfg.lon_min + 0.3..cfg.lon_max - 0.3),
            )
        })
        .collect();
    let mut seen_bins = std::collections::HashSet::new();
    let bin4 = |plat: f64, plon: f64, dlat: f64, dlon: f64| {
        (
            ((plat - cfg.lat_min) / cfg.grid_step).floor() as i64,
            ((plon - cfg.lon_min) / cfg.grid_step).floor() as i64,
            ((dlat - cfg.lat_min) / cfg.grid_step).floor() as i64,
            ((dlon - cfg.lon_min) / cfg.grid_step).floor() as i64,
        )
    };
    let mut records = Vec::with_capacity(n_records);
    for i in 0..n_records {
        let (hlat, hlon) = hotspots[rng.gen_range(0..hotspots.len())];
        let mut plat = hlat + rng.gen_range(-0.05..0.05);
        let plon = hlon + rng.gen_range(-0.05..0.05);
        let (dhlat, dhlon) = hotspots[rng.gen_range(0..hotspots.len())];
        let dlat = dhlat + rng.gen_range(-0.05..0.05);
        let dlon = dhlon + rng.gen_range(-0.05..0.05);
        // Force a fresh type key so expected arrivals stay at 1 per type.
        while !seen_bins.insert(bin4(plat, plon, dlat, dlon)) {
            plat += cfg.grid_step;
            if plat > cfg.lat_max - 0.01 {
                plat = cfg.lat_min + 0.01;
            }
        }
        let trip_length = (plat - dlat).abs() + (plon - dlon).abs();
        records.push(TripRecord {
            driver_id: format!("d{:03}", i % n_drivers.max(1)),
            pickup_lat: plat,
            pickup_lon: plon,
            drop_lat: dlat,
            drop_lon: dlon,
            trip_length,
            timestamp: 1_600_000_000 + i as i64 * 60,
        });
    }
    records
}

/// Generates the desk-scale synthetic city instance (default sizes: 49
/// drivers, 172 request types, horizon 172) by running
/// [`generate_trip_records`] through [`ingest_trips`].
pub fn synthetic_trip_instance(
    n_drivers: usize,
    n_records: usize,
    seed: u64,
) -> Result<(Instance, IngestSummary), HarnessError> {
    let records = generate_trip_records(n_drivers, n_records, seed);
    let cfg = IngestConfig {
        seed,
        ..IngestConfig::default()
    };
    ingest_trips(&records, &cfg)
}

/// The 3×3 adversarial group-fairness fixture: three offline vertices and
/// three online types (uniform arrivals, horizon `T`), complete bipartite
/// with unit success probabilities and patience 1 everywhere, every vertex
/// in its own group. The utility matrices (rows = offline, columns =
/// online) place the three objectives in maximal conflict:
///
/// ```text
/// w_op = identity      w_off = rows (0,0,1),(1,0,0),(0,1,0)
///                      w_on  = rows (0,1,0),(0,0,1),(1,0,0)
/// ```
///
/// Benchmarks (after fragmentation): operator 3, offline fairness 1,
/// online fairness 1 — and no algorithm's three ratios can sum above 1.
pub fn make_hardness_group_instance(t_horizon: usize) -> Result<Instance, HarnessError> {
    if t_horizon == 0 || t_horizon % 3 != 0 {
        return Err(HarnessError::InvalidParameter(format!(
            "horizon {t_horizon} must be a positive multiple of 3 (uniform arrivals with integral expected counts)"
        )));
    }
    let w_op = [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]];
    let w_off = [[0.0, 0.0, 1.0], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0]];
    let w_on = [[0.0, 1.0, 0.0], [0.0, 0.0, 1.0], [1.0, 0.0, 0.0]];
    let mut groups = Vec::new();
    let offline = (0..3)
        .map(|id| {
            groups.push(format!("u{id}"));
            OfflineVertex {
                id,
                group: format!("u{id}"),
                patience: 1,
            }
        })
        .collect();
    let online = (0..3)
        .map(|id| {
            groups.push(format!("v{id}"));
            OnlineType {
                id,
                group: format!("v{id}"),
                patience: 1,
                arrival: Arrival::Stationary { p: 1.0 / 3.0 },
            }
        })
        .collect();
    let mut edges = Vec::with_capacity(9);
    for u in 0..3 {
        for v in 0..3 {
            edges.push(Edge {
                u,
                v,
                p_e: 1.0,
                w_op: w_op[u][v],
                w_off: w_off[u][v],
                w_on: w_on[u][v],
            });
        }
    }
    Ok(Instance {
        schema_version: SCHEMA_VERSION,
        horizon: t_horizon,
        arrival_model: ArrivalModel::Kiid,
        offline,
        online,
        edges,
        groups,
        metadata: None,
    })
}

/// Horizon used by the online-side variant of the weight-gap fixture
/// ("T large": any horizon ≥ 2 separates the group and per-round optima).
pub const ONLINE_VARIANT_HORIZON: usize = 4;

/// The group-versus-individual weight-gap fixture.
///
/// * `Side::Offline`: two offline vertices with offline utilities 1 and
///   `L` in one shared group, a single certain arrival, one round (kad).
///   Group optimum `L` (all mass on the heavy vertex); individual optimum
///   `L/(L+1)` (balance the two). Any algorithm's group ratio plus
///   individual ratio is at most `1 + 2/L`.
/// * `Side::Online`: the reversed construction — one offline vertex, two
///   online types with online utilities 1 and `L` (kiid, horizon
///   [`ONLINE_VARIANT_HORIZON`]). Group optimum `L`; per-round individual
///   optimum `L / horizon`.
pub fn make_hardness_indiv_group_instance(
    l: f64,
    side: Side,
) -> Result<Instance, HarnessError> {
    if !(l > 0.0) || !l.is_finite() {
        return Err(HarnessError::InvalidParameter(format!(
            "weight L = {l} must be positive and finite"
        )));
    }
    let inst = match side {
        Side::Offline => Instance {
            schema_version: SCHEMA_VERSION,
            horizon: 1,
            arrival_model: ArrivalModel::Kad,
            offline: (0..2)
                .map(|id| OfflineVertex {
                    id,
                    group: "all".into(),
                    patience: 1,
                })
                .collect(),
            online: vec![OnlineType {
                id: 0,
                group: "all".into(),
                patience: 1,
                arrival: Arrival::PerRound { p_t: vec![1.0] },
            }],
            edges: vec![
                Edge {
                    u: 0,
                    v: 0,
                    p_e: 1.0,
                    w_op: 0.0,
                    w_off: 1.0,
                    w_on: 0.0,
                },
                Edge {
                    u: 1,
                    v: 0,
                    p_e: 1.0,
                    w_op: 0.0,
                    w_off: l,
                    w_on: 0.0,
                },
            ],
            groups: vec!["all".into()],
            metadata: None,
        },
        Side::Online => Instance {
            schema_version: SCHEMA_VERSION,
            horizon: ONLINE_VARIANT_HORIZON,
            arrival_model: ArrivalModel::Kiid,
            offline: vec![OfflineVertex {
                id: 0,
                group: "all".into(),
                patience: 1,
            }],
            online: (0..2)
                .map(|id| OnlineType {
                    id,
                    group: "all".into(),
                    patience: 1,
                    arrival: Arrival::Stationary { p: 0.5 },
                })
                .collect(),
            edges: vec![
                Edge {
                    u: 0,
                    v: 0,
                    p_e: 1.0,
                    w_op: 0.0,
                    w_off: 0.0,
                    w_on: 1.0,
                },
                Edge {
                    u: 0,
                    v: 1,
                    p_e: 1.0,
                    w_op: 0.0,
                    w_off: 0.0,
                    w_on: l,
                },
            ],
            groups: vec!["all".into()],
            metadata: None,
        },
    };
    Ok(inst)
}

/// One algorithm configuration for [`run_experiment`].
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "algo", rename_all = "kebab-case")]
pub enum AlgoConfig {
    /// The kiid three-objective algorithm.
    Tsf { weights: Weights },
    /// The kad variant; `rho_sims = 0` uses the exact availability table.
    TsfKad {
        weights: Weights,
        rho_sims: usize,
        lambda: f64,
    },
    GreedyO,
    GreedyR,
    GreedyD,
}

impl AlgoConfig {
    pub fn tsf(alpha: f64, beta: f64, gamma: f64) -> Result<Self, AlgoError> {
        Ok(AlgoConfig::Tsf {
            weights: Weights::new(alpha, beta, gamma)?,
        })
    }

    pub fn tsf_kad(
        alpha: f64,
        beta: f64,
        gamma: f64,
        rho_sims: usize,
    ) -> Result<Self, AlgoError> {
        Ok(AlgoConfig::TsfKad {
            weights: Weights::new(alpha, beta, gamma)?,
            rho_sims,
            lambda: DEFAULT_LAMBDA,
        })
    }

    pub fn name(&self) -> &'static str {
        match self {
            AlgoConfig::Tsf { .. } => "tsf",
            AlgoConfig::TsfKad { .. } => "tsf-kad",
            AlgoConfig::GreedyO => "greedy-o",
            AlgoConfig::GreedyR => "greedy-r",
            AlgoConfig::GreedyD => "greedy-d",
        }
    }

    pub fn weights(&self) -> Option<Weights> {
        match self {
            AlgoConfig::Tsf { weights } | AlgoConfig::TsfKad { weights, .. } => Some(*weights),
            _ => None,
        }
    }
}

/// The default profit-weight sweep: α ∈ {0, 0.1, …, 1}, β = γ = (1−α)/2.
pub fn alpha_sweep_configs() -> Vec<AlgoConfig> {
    (0..=10)
        .map(|i| {
            let alpha = i as f64 / 10.0;
            let rest = (1.0 - alpha) / 2.0;
            AlgoConfig::tsf(alpha, rest, rest).expect("sweep weights are valid")
        })
        .collect()
}

/// Replaces both fairness utilities with 1 on every edge (the
/// "ignore match quality" ablation), keeping operator utilities.
pub fn with_unit_fairness_weights(inst: &Instance) -> Instance {
    let mut out = inst.clone();
    for e in &mut out.edges {
        e.w_off = 1.0;
        e.w_on = 1.0;
    }
    out
}

/// One objective's aggregated outcome for a configuration.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ObjectiveRow {
    /// One of `profit`, `offline_group`, `online_group`,
    /// `offline_individual`, `online_individual`.
    pub objective: String,
    /// Monte-Carlo mean over trials.
    pub empirical: f64,
    /// LP benchmark optimum.
    pub optimum: f64,
    /// `empirical / optimum`; absent when the optimum is 0.
    pub ratio: Option<f64>,
    /// Standard error of `empirical` (per-trial variance).
    pub stderr: f64,
}

/// Aggregated results of one algorithm configuration.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RatioReport {
    pub algo: String,
    pub alpha: Option<f64>,
    pub beta: Option<f64>,
    pub gamma: Option<f64>,
    pub trials: usize,
    pub seed: u64,
    pub objectives: Vec<ObjectiveRow>,
    /// Probe-probability clamp statistics (kad algorithm only).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub clamps: Option<ClampStats>,
    /// Evaluator notices (degenerate groups and the like).
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub warnings: Vec<String>,
}

impl RatioReport {
    /// The row for a named objective, if present.
    pub fn objective(&self, name: &str) -> Option<&ObjectiveRow> {
        self.objectives.iter().find(|r| r.objective == name)
    }
}

fn map_trials<T: Send>(
    n: usize,
    parallel: bool,
    f: impl Fn(usize) -> Result<T, HarnessError> + Sync + Send,
) -> Result<Vec<T>, HarnessError> {
    #[cfg(feature = "parallel")]
    {
        if parallel {
            return (0..n).into_par_iter().map(f).collect();
        }
    }
    let _ = parallel;
    (0..n).map(f).collect()
}

/// Seed label separating a configuration's ρ-estimation stream from its
/// trial streams.
const RHO_SEED_LABEL: u64 = 0x726870; // "rhp"

fn rho_for(
    inst: &Instance,
    bundle: &BenchmarkBundle,
    weights: &Weights,
    rho_sims: usize,
    lambda: f64,
    config_seed: u64,
) -> Result<RhoTable, HarnessError> {
    let table = if rho_sims == 0 {
        exact_rho(inst, bundle, weights, lambda)?
    } else {
        estimate_rho(inst, bundle, weights, rho_sims, mix(config_seed, RHO_SEED_LABEL))?
    };
    Ok(table)
}

fn objective_rows(
    est: &crate::model::ObjectiveEstimate,
    bundle: &BenchmarkBundle,
    indiv_optima: Option<(f64, f64)>,
) -> Vec<ObjectiveRow> {
    let row = |objective: &str, e: &Estimate, optimum: f64| ObjectiveRow {
        objective: objective.into(),
        empirical: e.value,
        optimum,
        ratio: if optimum > 0.0 {
            Some(e.value / optimum)
        } else {
            None
        },
        stderr: e.stderr,
    };
    let mut objectives = vec![
        row("profit", &est.profit, bundle.opt_op),
        row("offline_group", &est.offline_group, bundle.opt_off),
        row("online_group", &est.online_group, bundle.opt_on),
    ];
    if let Some((off, on)) = indiv_optima {
        objectives.push(row("offline_individual", &est.offline_individual, off));
        objectives.push(row("online_individual", &est.online_individual, on));
    }
    objectives
}

fn run_experiment_inner(
    inst: &Instance,
    configs: &[AlgoConfig],
    trials: usize,
    seed: u64,
    parallel: bool,
) -> Result<Vec<RatioReport>, HarnessError> {
    if trials == 0 {
        return Err(HarnessError::InvalidConfig("trials must be >= 1".into()));
    }
    if configs.is_empty() {
        return Err(HarnessError::InvalidConfig(
            "at least one algorithm configuration is required".into(),
        ));
    }
    let violations = validate_instance(inst);
    if !violations.is_empty() {
        return Err(HarnessError::InvalidInstance(
            violations.len(),
            violations[0].to_string(),
        ));
    }
    // Kiid instances are normalized to one expected arrival per type so the
    // benchmark LPs apply; algorithms and the evaluator run on the same
    // normalized instance, keeping ratios comparable.
    let inst = if inst.arrival_model == ArrivalModel::Kiid && !inst.is_fragmented_kiid() {
        fragment_types(inst)?
    } else {
        inst.clone()
    };
    let bundle = benchmarks(&inst)?;
    // Individual-fairness benchmarks exist exactly when the kad LP family
    // applies (unit success probabilities).
    let indiv_optima = if inst.is_unit_success() {
        let kad = to_kad(&inst);
        let off = solve_lp(&build_kad_indiv_lp(&kad, Side::Offline)?)?.objective_value;
        let on = solve_lp(&build_kad_indiv_lp(&kad, Side::Online)?)?.objective_value;
        Some((off, on))
    } else {
        None
    };

    let mut reports = Vec::with_capacity(configs.len());
    for (c, config) in configs.iter().enumerate() {
        let config_seed = mix(seed, c as u64);
        let rho = match config {
            AlgoConfig::TsfKad {
                weights,
                rho_sims,
                lambda,
            } => Some(rho_for(&inst, &bundle, weights, *rho_sims, *lambda, config_seed)?),
            _ => None,
        };
        let results: Vec<(RunTrace, Option<ClampStats>)> =
            map_trials(trials, parallel, |i| {
                let trial = TrialRng::new(config_seed, i as u64);
                match config {
                    AlgoConfig::Tsf { weights } => run_tsf(&inst, &bundle, weights, &trial)
                        .map(|t| (t, None))
                        .map_err(Into::into),
                    AlgoConfig::TsfKad {
                        weights, lambda, ..
                    } => run_tsf_kad(
                        &inst,
                        &bundle,
                        weights,
                        rho.as_ref().expect("rho computed for tsf-kad"),
                        *lambda,
                        &trial,
                    )
                    .map(|(t, cl)| (t, Some(cl)))
                    .map_err(Into::into),
                    AlgoConfig::GreedyO => Ok((greedy_o(&inst, &trial), None)),
                    AlgoConfig::GreedyR => Ok((greedy_r(&inst, &trial), None)),
                    AlgoConfig::GreedyD => Ok((greedy_d(&inst, &trial), None)),
                }
            })?;
        let mut clamps: Option<ClampStats> = None;
        let mut traces = Vec::with_capacity(results.len());
        for (trace, cl) in results {
            if let Some(cl) = cl {
                clamps.get_or_insert_with(ClampStats::default).merge(&cl);
            }
            traces.push(trace);
        }
        let est = crate::model::evaluate_objectives(&inst, &traces)?;
        let objectives = objective_rows(&est, &bundle, indiv_optima);
        let w = config.weights();
        reports.push(RatioReport {
            algo: config.name().to_string(),
            alpha: w.map(|w| w.alpha),
            beta: w.map(|w| w.beta),
            gamma: w.map(|w| w.gamma),
            trials,
            seed,
            objectives,
            clamps,
            warnings: est.warnings,
        });
    }
    Ok(reports)
}

/// Runs every configuration for `trials` independent trials on `inst`
/// (kiid instances are fragmented automatically) and reports, per
/// objective: the Monte-Carlo mean, the LP optimum, the competitive ratio
/// (absent when the optimum is 0), and the standard error of the mean.
/// Individual-fairness rows are included when the instance admits the kad
/// individual benchmarks (unit success probabilities).
///
/// Trials are bit-reproducible functions of `(seed, config index, trial
/// index)` — results do not depend on thread count. With the `parallel`
/// feature trials fan out across the worker pool.
pub fn run_experiment(
    inst: &Instance,
    configs: &[AlgoConfig],
    trials: usize,
    seed: u64,
) -> Result<Vec<RatioReport>, HarnessError> {
    run_experiment_inner(inst, configs, trials, seed, true)
}

/// Single-threaded variant of [`run_experiment`] (same results; used for
/// benchmarking the parallel speedup).
pub fn run_experiment_seq(
    inst: &Instance,
    configs: &[AlgoConfig],
    trials: usize,
    seed: u64,
) -> Result<Vec<RatioReport>, HarnessError> {
    run_experiment_inner(inst, configs, trials, seed, false)
}

/// The "ignore match quality" ablation: runs the stationary-arrival
/// probing algorithm twice on the same instance with identical per-trial
/// randomness — once guided by the true-utility benchmark LPs, once
/// guided by LPs in which every edge's fairness utilities are replaced by
/// 1 (so the guidance only counts matches). Both arms are evaluated on
/// the true utilities against the true optima, so the reports isolate the
/// value of quality-aware guidance. Returns `(utility_aware, ablated)`;
/// the ablated report is labeled `tsf-unit-lp`.
pub fn run_unit_weight_ablation(
    inst: &Instance,
    weights: &Weights,
    trials: usize,
    seed: u64,
) -> Result<(RatioReport, RatioReport), HarnessError> {
    if trials == 0 {
        return Err(HarnessError::InvalidConfig("trials must be >= 1".into()));
    }
    let violations = validate_instance(inst);
    if !violations.is_empty() {
        return Err(HarnessError::InvalidInstance(
            violations.len(),
            violations[0].to_string(),
        ));
    }
    let inst = if inst.arrival_model == ArrivalModel::Kiid && !inst.is_fragmented_kiid() {
        fragment_types(inst)?
    } else {
        inst.clone()
    };
    let bundle = benchmarks(&inst)?;
    let unit_bundle = benchmarks(&with_unit_fairness_weights(&inst))?;
    let indiv_optima = if inst.is_unit_success() {
        let kad = to_kad(&inst);
        let off = solve_lp(&build_kad_indiv_lp(&kad, Side::Offline)?)?.objective_value;
        let on = solve_lp(&build_kad_indiv_lp(&kad, Side::Online)?)?.objective_value;
        Some((off, on))
    } else {
        None
    };
    let config_seed = mix(seed, 0);
    let arm = |guide: &BenchmarkBundle, label: &str| -> Result<RatioReport, HarnessError> {
        let traces = map_trials(trials, true, |i| {
            let trial = TrialRng::new(config_seed, i as u64);
            run_tsf(&inst, guide, weights, &trial).map_err(HarnessError::from)
        })?;
        let est = crate::model::evaluate_objectives(&inst, &traces)?;
        Ok(RatioReport {
            algo: label.to_string(),
            alpha: Some(weights.alpha),
            beta: Some(weights.beta),
            gamma: Some(weights.gamma),
            trials,
            seed,
            objectives: objective_rows(&est, &bundle, indiv_optima),
            clamps: None,
            warnings: est.warnings,
        })
    };
    let aware = arm(&bundle, "tsf")?;
    let ablated = arm(&unit_bundle, "tsf-unit-lp")?;
    Ok((aware, ablated))
}

/// Convenience: the group-fairness optimum of the instance produced by
/// [`reduce_individual_to_group`] — by construction equal to the direct
/// individual-fairness optimum. Exposed for cross-checking the two
/// computations on concrete instances.
pub fn individual_optimum_via_reduction(
    inst: &Instance,
    side: Side,
) -> Result<f64, HarnessError> {
    let reduced = reduce_individual_to_group(inst)?;
    let objective = match side {
        Side::Offline => crate::lp::LpObjective::OfflineFair,
        Side::Online => crate::lp::LpObjective::OnlineFair,
    };
    Ok(solve_lp(&crate::lp::build_kad_lp(&reduced, objective)?)?.objective_value)
}

/// Report output format.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Json,
    Csv,
}

fn fmt_num(x: f64) -> String {
    format!("{x}")
}

fn fmt_opt(x: Option<f64>) -> String {
    x.map(fmt_num).unwrap_or_else(|| "na".into())
}

/// Writes reports to `w`. CSV columns (one line per objective row):
/// `algo, alpha, beta, gamma, objective, empirical, optimum, ratio,
/// stderr`, with `na` for absent weights and for ratios whose optimum is
/// 0. JSON carries the same reports structurally. Output is deterministic
/// given identical reports.
pub fn write_report(
    reports: &[RatioReport],
    format: ReportFormat,
    w: &mut impl Write,
) -> Result<(), HarnessError> {
    if reports.is_empty() {
        return Err(HarnessError::EmptyReports);
    }
    match format {
        ReportFormat::Json => {
            serde_json::to_writer_pretty(&mut *w, reports)
                .map_err(|e| HarnessError::Io(e.into()))?;
            writeln!(w)?;
        }
        ReportFormat::Csv => {
            let mut csv = csv::Writer::from_writer(w);
            csv.write_record([
                "algo",
                "alpha",
                "beta",
                "gamma",
                "objective",
                "empirical",
                "optimum",
                "ratio",
                "stderr",
            ])?;
            for r in reports {
                for o in &r.objectives {
                    csv.write_record([
                        r.algo.clone(),
                        fmt_opt(r.alpha),
                        fmt_opt(r.beta),
                        fmt_opt(r.gamma),
                        o.objective.clone(),
                        fmt_num(o.empirical),
                        fmt_num(o.optimum),
                        fmt_opt(o.ratio),
                        fmt_num(o.stderr),
                    ])?;
                }
            }
            csv.flush()?;
        }
    }
    Ok(())
}

/// Writes reports to a file; see [`write_report`].
pub fn emit_report(
    reports: &[RatioReport],
    format: ReportFormat,
    path: &Path,
) -> Result<(), HarnessError> {
    let mut file = std::io::BufWriter::new(std::fs::File::create(path)?);
    write_report(reports, format, &mut file)?;
    file.flush()?;
    Ok(())
}
