//! Trajectory recording, structure-stabilization detection, regime
//! classification, and the special-weight analyses.
//!
//! A trajectory holds the direct population states for `t = 0..=horizon`,
//! the augmented vectors for `t = 1..=horizon`, and (for decision weights
//! strictly inside (0, 1)) a structure report per assembled matrix,
//! `t = 1..=horizon-1`.
//!
//! Classification follows the structure once it has stopped changing:
//! a strongly connected tail whose final spread is below tolerance is
//! consensus; a sink-plus-singleton-sources tail is clustering, with the
//! isolated opinion nodes acting as stationary leaders and every other node
//! judged against the interval hull of the leader values. Decision weight 0
//! collapses all actions onto the initial average after one step (norm
//! conformity); decision weight 1 reduces the opinion dynamics to the
//! classical bounded-confidence baseline.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::graph::{classify_structure, digraph_of, Digraph, StructureClass, StructureReport};
use crate::matrix::{assemble_state_matrix, lift, matrix_step, AugmentedState, StateMatrix};
use crate::model::{self, ModelParams, PopulationState};

/// Options for [`simulate`].
#[derive(Debug, Clone, Copy)]
pub struct SimOptions {
    /// Record a structure report per step. Only honored for decision weights
    /// strictly inside (0, 1); outside that interval the structure dichotomy
    /// does not apply and nothing is recorded.
    pub record_structures: bool,
}

impl Default for SimOptions {
    fn default() -> Self {
        Self {
            record_structures: true,
        }
    }
}

/// A fully recorded run.
#[derive(Debug, Clone)]
pub struct Trajectory {
    params: ModelParams,
    states: Vec<PopulationState>,
    augmented: Vec<AugmentedState>,
    structures: Vec<StructureReport>,
}

impl Trajectory {
    pub fn params(&self) -> &ModelParams {
        &self.params
    }

    /// Population states for `t = 0..=horizon`.
    pub fn states(&self) -> &[PopulationState] {
        &self.states
    }

    /// Augmented vectors for `t = 1..=horizon`.
    pub fn augmented(&self) -> &[AugmentedState] {
        &self.augmented
    }

    /// Structure reports for `t = 1..=horizon-1`; empty when not recorded.
    pub fn structures(&self) -> &[StructureReport] {
        &self.structures
    }

    pub fn horizon(&self) -> usize {
        self.states.len() - 1
    }

    /// Final augmented vector `z(horizon)`.
    pub fn final_values(&self) -> &[f64] {
        self.augmented.last().expect("horizon >= 2").values()
    }
}

/// Runs the direct dynamics for `horizon` steps, recording population
/// states, augmented vectors, and structure reports. Deterministic: two
/// calls with identical inputs produce bit-identical trajectories.
pub fn simulate(
    params: &ModelParams,
    initial: &PopulationState,
    horizon: usize,
    options: &SimOptions,
) -> Result<Trajectory> {
    if horizon < 2 {
        return Err(Error::HorizonTooShort { horizon });
    }
    if initial.agent_count() != params.agent_count() {
        return Err(Error::DimensionMismatch {
            expected: params.agent_count(),
            found: initial.agent_count(),
        });
    }
    let phi = params.phi();
    let record = options.record_structures && phi > 0.0 && phi < 1.0;

    let mut states = Vec::with_capacity(horizon + 1);
    let mut augmented = Vec::with_capacity(horizon);
    let mut structures = Vec::with_capacity(if record { horizon - 1 } else { 0 });
    states.push(initial.clone());
    for t in 0..horizon {
        let next = model::step(&states[t], params)?;
        let z = lift(t + 1, next.opinions(), states[t].actions())?;
        if record && t < horizon - 1 {
            let m = assemble_state_matrix(&z, params);
            let g = digraph_of(&m);
            structures.push(classify_structure(&g, &z, params)?);
        }
        augmented.push(z);
        states.push(next);
    }
    Ok(Trajectory {
        params: *params,
        states,
        augmented,
        structures,
    })
}

/// Replays the trajectory through the linear representation and returns the
/// largest elementwise deviation from the recorded direct states. The two
/// routes are algebraically identical; anything beyond accumulated rounding
/// indicates a defect.
pub fn compare_direct_vs_matrix(traj: &Trajectory) -> f64 {
    let mut z = traj.augmented[0].clone();
    let mut max_dev: f64 = 0.0;
    for recorded in traj.augmented.iter().skip(1) {
        z = matrix_step(&z, &traj.params);
        for (a, b) in z.values().iter().zip(recorded.values()) {
            max_dev = max_dev.max((a - b).abs());
        }
    }
    max_dev
}

/// Earliest time `T` such that the canonical SCC partition is identical over
/// every recorded step from `T` to the end, provided that constant tail is
/// at least `window` steps long. Purely empirical detection over the
/// recorded horizon; nothing is proven about later steps.
pub fn detect_stabilization(structures: &[StructureReport], window: usize) -> Option<usize> {
    if structures.is_empty() || window == 0 {
        return None;
    }
    let last = structures.last().unwrap();
    let mut start = structures.len() - 1;
    while start > 0 && structures[start - 1].scc == last.scc {
        start -= 1;
    }
    let run_len = structures.len() - start;
    if run_len >= window {
        Some(structures[start].t)
    } else {
        None
    }
}

/// Desk-scale tolerances standing in for the model's asymptotic statements.
#[derive(Debug, Clone, Copy)]
pub struct Tolerances {
    /// Spread threshold below which a run counts as consensus.
    pub consensus: f64,
    /// Containment residual threshold at the horizon.
    pub containment: f64,
    /// Minimum constant-structure run length for stabilization detection.
    pub window: usize,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            consensus: 1e-9,
            containment: 1e-6,
            window: 10,
        }
    }
}

/// Interval hull of a finite set of scalar states.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Hull {
    pub lo: f64,
    pub hi: f64,
}

impl Hull {
    /// Hull of the given values; empty input is a caller bug.
    pub fn of(values: &[f64]) -> Self {
        assert!(!values.is_empty(), "hull of no values");
        let mut lo = values[0];
        let mut hi = values[0];
        for &v in &values[1..] {
            lo = lo.min(v);
            hi = hi.max(v);
        }
        Self { lo, hi }
    }
}

/// Distance from a point to the hull interval: zero inside, otherwise the
/// gap to the nearer endpoint.
pub fn hull_distance(value: f64, hull: &Hull) -> f64 {
    if value >= hull.lo && value <= hull.hi {
        0.0
    } else {
        (value - hull.lo).abs().min((value - hull.hi).abs())
    }
}

/// Max minus min.
pub fn spread(values: &[f64]) -> f64 {
    if values.is_empty() {
        return 0.0;
    }
    let h = Hull::of(values);
    h.hi - h.lo
}

/// Steady-state regimes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    /// All augmented coordinates collapse to one value.
    Consensus,
    /// Frozen leader opinion nodes, everything else absorbed into their hull.
    Clustering,
    /// Decision weight 0: actions lock onto the initial average.
    NormConformity,
    /// No stable structure detected, or not converged by the horizon.
    NotStabilized,
}

impl Regime {
    pub fn as_str(&self) -> &'static str {
        match self {
            Regime::Consensus => "Consensus",
            Regime::Clustering => "Clustering",
            Regime::NormConformity => "NormConformity",
            Regime::NotStabilized => "NotStabilized",
        }
    }
}

/// Final classification of a run.
#[derive(Debug, Clone)]
pub struct SimulationReport {
    pub stabilization_time: Option<usize>,
    pub regime: Regime,
    /// Mean of the final augmented vector; present only for consensus runs.
    pub consensus_value: Option<f64>,
    /// Leader node indices (within `0..2n`); empty unless clustering.
    pub leaders: Vec<usize>,
    /// Hull of the leader values at the stabilization time.
    pub hull: Option<Hull>,
    /// Largest distance from a non-leader node's final value to the hull.
    pub containment_residual: Option<f64>,
    /// Node index to cluster id over the final augmented vector.
    pub cluster_assignment: Vec<usize>,
    /// The final augmented vector, standing in for the limit.
    pub limit_values: Vec<f64>,
    /// Norm-conformity checks, present only for decision weight 0.
    pub norm_conformity: Option<NormConformityReport>,
}

/// Groups nodes whose final values differ by less than `gap`, leaders always
/// kept apart from followers. Cluster ids are ordered by ascending minimum
/// value, ties broken by smallest node index.
fn assign_clusters(values: &[f64], leaders: &[usize], gap: f64) -> Vec<usize> {
    let mut groups: Vec<Vec<usize>> = Vec::new();
    for is_leader_pass in [true, false] {
        let mut members: Vec<usize> = (0..values.len())
            .filter(|v| leaders.contains(v) == is_leader_pass)
            .collect();
        members.sort_by(|&a, &b| {
            values[a]
                .partial_cmp(&values[b])
                .expect("state values are never NaN")
                .then(a.cmp(&b))
        });
        let mut current: Vec<usize> = Vec::new();
        for &v in &members {
            if let Some(&prev) = current.last() {
                if values[v] - values[prev] < gap {
                    current.push(v);
                    continue;
                }
                groups.push(core::mem::take(&mut current));
            }
            current.push(v);
        }
        if !current.is_empty() {
            groups.push(current);
        }
    }
    groups.sort_by(|a, b| {
        let (va, vb) = (values[a[0]], values[b[0]]);
        va.partial_cmp(&vb)
            .expect("state values are never NaN")
            .then(a[0].cmp(&b[0]))
    });
    let mut assignment = alloc::vec![0usize; values.len()];
    for (cid, group) in groups.iter().enumerate() {
        for &v in group {
            assignment[v] = cid;
        }
    }
    assignment
}

/// Classifies a completed trajectory given the detected stabilization time.
///
/// Decision weight 0 is routed to the norm-conformity checks and weight 1 to
/// a plain convergence test (its structure dichotomy does not apply); for
/// weights strictly inside (0, 1) the structure at the stabilization time
/// decides between consensus and clustering, and a strongly connected tail
/// that has not pulled the spread under tolerance by the horizon is reported
/// as not stabilized.
pub fn classify_regime(
    traj: &Trajectory,
    stabilization: Option<usize>,
    tol: &Tolerances,
) -> SimulationReport {
    let phi = traj.params.phi();
    let limit_values: Vec<f64> = traj.final_values().into();
    let final_spread = spread(&limit_values);
    let cluster_gap = 10.0 * tol.consensus;

    let mut report = SimulationReport {
        stabilization_time: stabilization,
        regime: Regime::NotStabilized,
        consensus_value: None,
        leaders: Vec::new(),
        hull: None,
        containment_residual: None,
        cluster_assignment: Vec::new(),
        limit_values,
        norm_conformity: None,
    };

    if phi == 0.0 {
        report.regime = Regime::NormConformity;
        report.norm_conformity =
            Some(verify_norm_conformity(traj).expect("phi is 0 on this branch"));
    } else if phi == 1.0 {
        if final_spread < tol.consensus {
            report.regime = Regime::Consensus;
            report.consensus_value = Some(model::mean(&report.limit_values));
        }
    } else if let Some(t_stable) = stabilization {
        let structure = &traj.structures()[t_stable - 1];
        match &structure.class {
            StructureClass::StronglyConnected => {
                if final_spread < tol.consensus {
                    report.regime = Regime::Consensus;
                    report.consensus_value = Some(model::mean(&report.limit_values));
                }
            }
            StructureClass::SinkPlusSingletonSources { leaders } => {
                let z_stable = traj.augmented()[t_stable - 1].values();
                let leader_values: Vec<f64> =
                    leaders.iter().map(|&i| z_stable[i]).collect();
                let hull = Hull::of(&leader_values);
                let residual = structure
                    .omega
                    .iter()
                    .map(|&j| hull_distance(report.limit_values[j], &hull))
                    .fold(0.0_f64, f64::max);
                report.regime = Regime::Clustering;
                report.leaders = leaders.clone();
                report.hull = Some(hull);
                report.containment_residual = Some(residual);
            }
            StructureClass::Other => {}
        }
    }

    report.cluster_assignment =
        assign_clusters(&report.limit_values, &report.leaders, cluster_gap);
    report
}

/// The relative-ratio law of the norm-conformity decay is only resolvable in
/// binary64 while the expected gap stays above this floor; below it the
/// check degrades to the absolute bound [`RATIO_SUBFLOOR_ABS_TOL`].
pub const RATIO_GAP_FLOOR: f64 = 1e-3;
/// Relative tolerance on `gap(t+1) = gap(t) / n` above the floor.
pub const RATIO_RELATIVE_TOL: f64 = 1e-12;
/// Absolute tolerance on the same law below the floor.
pub const RATIO_SUBFLOOR_ABS_TOL: f64 = 1e-13;
/// Tolerance on the action consensus `y_i(t) = mean(y(0))` for `t >= 1`.
pub const ACTION_CONSENSUS_TOL: f64 = 1e-12;

/// Outcome of the decision-weight-0 checks.
#[derive(Debug, Clone)]
pub struct NormConformityReport {
    /// The common action from step 1 on: the initial average action.
    pub norm: f64,
    /// Largest observed `|y_i(t) - norm|` over `i` and `t >= 1`.
    pub max_action_deviation: f64,
    /// Agents whose first-step opinion landed outside the threshold around
    /// the norm; their opinions must stay bit-for-bit constant.
    pub frozen: Vec<usize>,
    /// Agents attracted to the norm; their gap must shrink by exactly the
    /// population size each step.
    pub attracted: Vec<usize>,
    pub frozen_exact: bool,
    /// Largest relative deviation from the gap ratio law above the floor.
    pub max_ratio_deviation: f64,
    /// Number of (agent, step) ratio checks performed above the floor.
    pub ratio_steps_checked: usize,
    /// Largest absolute deviation from the law below the floor.
    pub max_subfloor_deviation: f64,
    pub ok: bool,
}

/// Verifies the decision-weight-0 closed form on a recorded trajectory:
/// actions collapse onto the initial average after one step; opinions
/// outside the threshold freeze exactly; opinions inside decay toward the
/// norm geometrically with ratio `1/n`.
pub fn verify_norm_conformity(traj: &Trajectory) -> Result<NormConformityReport> {
    let phi = traj.params.phi();
    if phi != 0.0 {
        return Err(Error::DecisionWeightNotZero { phi });
    }
    let n = traj.params.agent_count();
    let epsilon = traj.params.epsilon();
    let states = traj.states();
    let norm = model::average_action(&states[0]);

    let mut max_action_deviation: f64 = 0.0;
    for state in &states[1..] {
        for &y in state.actions() {
            max_action_deviation = max_action_deviation.max((y - norm).abs());
        }
    }

    let x1 = states[1].opinions();
    let mut frozen = Vec::new();
    let mut attracted = Vec::new();
    for i in 0..n {
        if (x1[i] - norm).abs() > epsilon {
            frozen.push(i);
        } else {
            attracted.push(i);
        }
    }

    let mut frozen_exact = true;
    for state in &states[2..] {
        for &i in &frozen {
            if state.opinions()[i] != x1[i] {
                frozen_exact = false;
            }
        }
    }

    let n_f = n as f64;
    let mut max_ratio_deviation: f64 = 0.0;
    let mut ratio_steps_checked = 0usize;
    let mut max_subfloor_deviation: f64 = 0.0;
    for t in 1..states.len() - 1 {
        for &i in &attracted {
            let gap = (states[t].opinions()[i] - norm).abs();
            let gap_next = (states[t + 1].opinions()[i] - norm).abs();
            let expected = gap / n_f;
            if expected >= RATIO_GAP_FLOOR {
                max_ratio_deviation =
                    max_ratio_deviation.max((gap_next - expected).abs() / expected);
                ratio_steps_checked += 1;
            } else {
                max_subfloor_deviation =
                    max_subfloor_deviation.max((gap_next - expected).abs());
            }
        }
    }

    let ok = max_action_deviation <= ACTION_CONSENSUS_TOL
        && frozen_exact
        && max_ratio_deviation <= RATIO_RELATIVE_TOL
        && max_subfloor_deviation <= RATIO_SUBFLOOR_ABS_TOL;
    Ok(NormConformityReport {
        norm,
        max_action_deviation,
        frozen,
        attracted,
        frozen_exact,
        max_ratio_deviation,
        ratio_steps_checked,
        max_subfloor_deviation,
        ok,
    })
}

/// Finite-horizon stand-in for the limiting digraph: an edge survives iff
/// its entry is positive in *every* matrix of the window. Once the structure
/// has stabilized the positivity pattern is constant, making this exact on
/// stabilized tails.
pub fn limiting_digraph(window: &[StateMatrix]) -> Result<Digraph> {
    let first = window.first().ok_or(Error::EmptyWindow)?;
    let dim = first.dim();
    for m in window {
        assert_eq!(m.dim(), dim, "window mixes matrix dimensions");
    }
    let mut g = Digraph::new(dim);
    for i in 0..dim {
        for j in 0..dim {
            if window.iter().all(|m| m.get(i, j) > 0.0) {
                g.add_edge(j, i);
            }
        }
    }
    Ok(g)
}

/// A classical bounded-confidence run on opinions alone.
#[derive(Debug, Clone)]
pub struct HkRun {
    /// Recorded opinion vectors, `x(0)` up to and including the first
    /// repeated state (or the step cap).
    pub states: Vec<Vec<f64>>,
    /// Smallest `t` with `x(t+1) = x(t)` exactly, if reached within the cap.
    pub converged_at: Option<usize>,
    /// Distinct values of the final state, ascending.
    pub cluster_values: Vec<f64>,
    /// Whether every pair of distinct final values differs by strictly more
    /// than the threshold. At a true fixed point this is the equilibrium
    /// separation property.
    pub clusters_separated: bool,
}

/// Iterates the baseline dynamics until an exact fixed point or `max_steps`.
/// Non-convergence is reported through `converged_at`, never raised.
pub fn hk_simulate(x0: &[f64], epsilon: f64, max_steps: usize) -> HkRun {
    let mut states = Vec::with_capacity(max_steps.min(64) + 2);
    states.push(x0.to_vec());
    let mut converged_at = None;
    for t in 0..max_steps {
        let next = model::hk_step(&states[t], epsilon);
        let fixed = next == states[t];
        states.push(next);
        if fixed {
            converged_at = Some(t);
            break;
        }
    }
    let last = states.last().unwrap();
    let mut cluster_values: Vec<f64> = last.clone();
    cluster_values.sort_by(|a, b| a.partial_cmp(b).expect("opinions are never NaN"));
    cluster_values.dedup();
    let clusters_separated = cluster_values
        .windows(2)
        .all(|w| w[1] - w[0] > epsilon);
    HkRun {
        states,
        converged_at,
        cluster_values,
        clusters_separated,
    }
}
