//! File formats: trajectory CSV, report JSON, DOT snapshots, matrix CSV.
//!
//! Node indexing in all exported artifacts is 1-based: agents are `1..=n`,
//! augmented nodes are `1..=2n` with `1..=n` the opinion nodes (labelled
//! `x1..xn` in DOT) and `n+1..=2n` the action nodes (`y1..yn`). Floats are
//! written with Rust's shortest round-trip formatting, so parsing a value
//! back yields the exact bits that were computed.

use serde::Serialize;

use coevo_core::graph::Digraph;
use coevo_core::matrix::StateMatrix;
use coevo_core::sim::{NormConformityReport, SimulationReport, Trajectory};

use crate::config::RunConfig;

/// CSV with header `t,agent,x,y`, one row per (time step, agent), ordered by
/// time then agent; agents are 1-based.
pub fn trajectory_csv(traj: &Trajectory) -> String {
    let mut out = String::from("t,agent,x,y\n");
    for state in traj.states() {
        for i in 0..state.agent_count() {
            out.push_str(&format!(
                "{},{},{},{}\n",
                state.t(),
                i + 1,
                state.opinions()[i],
                state.actions()[i]
            ));
        }
    }
    out
}

/// Plain-text CSV of a state matrix: one line per row, full precision.
pub fn matrix_csv(m: &StateMatrix) -> String {
    let mut out = String::new();
    for i in 0..m.dim() {
        let row: Vec<String> = m.row(i).iter().map(|v| format!("{v}")).collect();
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

fn node_label(idx: usize, n: usize) -> String {
    if idx < n {
        format!("x{}", idx + 1)
    } else {
        format!("y{}", idx + 1 - n)
    }
}

fn edge_class(from: usize, to: usize, n: usize) -> &'static str {
    match (from < n, to < n) {
        (true, true) => "oo",
        (true, false) => "oa",
        (false, true) => "ao",
        (false, false) => "aa",
    }
}

/// DOT rendering of one interaction-digraph snapshot. Opinion nodes in
/// `theta` (the frozen leaders) carry `leader=true`; every edge carries a
/// `class` attribute naming its block of origin (opinion/action to
/// opinion/action).
pub fn graph_dot(g: &Digraph, theta: &[usize], agent_count: usize) -> String {
    let n = agent_count;
    let mut out = String::from("digraph snapshot {\n");
    for idx in 0..g.node_count() {
        let label = node_label(idx, n);
        if theta.contains(&idx) {
            out.push_str(&format!("  {label} [leader=true];\n"));
        } else {
            out.push_str(&format!("  {label};\n"));
        }
    }
    for (from, to) in g.edges() {
        out.push_str(&format!(
            "  {} -> {} [class=\"{}\"];\n",
            node_label(from, n),
            node_label(to, n),
            edge_class(from, to, n)
        ));
    }
    out.push_str("}\n");
    out
}

/// Resolved configuration echoed into every report.
#[derive(Debug, Clone, Serialize)]
pub struct ConfigEcho {
    pub n: usize,
    pub epsilon: f64,
    pub phi: f64,
    pub seed: u64,
    pub horizon: usize,
    pub tol_consensus: f64,
    pub tol_containment: f64,
    pub window: usize,
    pub init_mode: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub x0: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub y0: Option<Vec<f64>>,
}

impl ConfigEcho {
    pub fn of(cfg: &RunConfig) -> Self {
        Self {
            n: cfg.n,
            epsilon: cfg.epsilon,
            phi: cfg.phi,
            seed: cfg.seed,
            horizon: cfg.horizon,
            tol_consensus: cfg.tol_consensus,
            tol_containment: cfg.tol_containment,
            window: cfg.window,
            init_mode: cfg.init_mode.as_str(),
            x0: cfg.x0.clone(),
            y0: cfg.y0.clone(),
        }
    }
}

#[derive(Serialize)]
struct HullDoc {
    lo: f64,
    hi: f64,
}

#[derive(Serialize)]
struct ConformityDoc {
    norm: f64,
    max_action_deviation: f64,
    frozen: Vec<usize>,
    attracted: Vec<usize>,
    frozen_exact: bool,
    max_ratio_deviation: f64,
    ratio_steps_checked: usize,
    max_subfloor_deviation: f64,
    ok: bool,
}

impl ConformityDoc {
    fn of(r: &NormConformityReport) -> Self {
        Self {
            norm: r.norm,
            max_action_deviation: r.max_action_deviation,
            frozen: r.frozen.iter().map(|&i| i + 1).collect(),
            attracted: r.attracted.iter().map(|&i| i + 1).collect(),
            frozen_exact: r.frozen_exact,
            max_ratio_deviation: r.max_ratio_deviation,
            ratio_steps_checked: r.ratio_steps_checked,
            max_subfloor_deviation: r.max_subfloor_deviation,
            ok: r.ok,
        }
    }
}

/// Key order is fixed by this struct; optional sections are omitted rather
/// than written as null.
#[derive(Serialize)]
struct ReportDoc {
    regime: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    stabilization_time: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    consensus_value: Option<f64>,
    leaders: Vec<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    hull: Option<HullDoc>,
    #[serde(skip_serializing_if = "Option::is_none")]
    containment_residual: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    norm_conformity: Option<ConformityDoc>,
    clusters: Vec<Vec<usize>>,
    limit_values: Vec<f64>,
    config: ConfigEcho,
}

/// Regroups the per-node cluster ids into 1-based node lists, ordered by
/// cluster id (ids are already canonical: ascending minimum value).
fn cluster_lists(assignment: &[usize]) -> Vec<Vec<usize>> {
    let count = assignment.iter().copied().max().map_or(0, |m| m + 1);
    let mut clusters = vec![Vec::new(); count];
    for (node, &cid) in assignment.iter().enumerate() {
        clusters[cid].push(node + 1);
    }
    clusters
}

/// Serializes a report (plus the config echo) as pretty JSON. Serialization
/// is deterministic: identical reports yield byte-identical files.
pub fn report_json(report: &SimulationReport, echo: ConfigEcho) -> String {
    let doc = ReportDoc {
        regime: report.regime.as_str(),
        stabilization_time: report.stabilization_time,
        consensus_value: report.consensus_value,
        leaders: report.leaders.iter().map(|&i| i + 1).collect(),
        hull: report.hull.map(|h| HullDoc { lo: h.lo, hi: h.hi }),
        containment_residual: report.containment_residual,
        norm_conformity: report.norm_conformity.as_ref().map(ConformityDoc::of),
        clusters: cluster_lists(&report.cluster_assignment),
        limit_values: report.limit_values.clone(),
        config: echo,
    };
    let mut text = serde_json::to_string_pretty(&doc).expect("report serialization");
    text.push('\n');
    text
}

/// FNV-1a 64-bit hash of the canonical config echo; names the run directory.
pub fn run_hash(cfg: &RunConfig) -> String {
    let echo = ConfigEcho::of(cfg);
    let canon = serde_json::to_string(&echo).expect("config serialization");
    let mut hash: u64 = 0xcbf2_9ce4_8422_2325;
    for byte in canon.bytes() {
        hash ^= byte as u64;
        hash = hash.wrapping_mul(0x0000_0100_0000_01b3);
    }
    format!("{hash:016x}")
}

#[cfg(test)]
mod tests {
    use super::*;
    use coevo_core::matrix::{assemble_state_matrix, lift};
    use coevo_core::model::{ModelParams, PopulationState};
    use coevo_core::sim::{classify_regime, simulate, SimOptions, Tolerances};

    fn small_run() -> (RunConfig, Trajectory, SimulationReport) {
        let cfg = crate::config::parse_run_config(
            "n = 2\nepsilon = 0.4\nphi = 0.5\nseed = 9\nhorizon = 5\n",
            "test",
        )
        .unwrap();
        let params = ModelParams::new(2, 0.4, 0.5).unwrap();
        let st = PopulationState::new(0, vec![0.5, 0.5], vec![0.5, 0.5]).unwrap();
        let traj = simulate(&params, &st, 5, &SimOptions::default()).unwrap();
        let t = coevo_core::sim::detect_stabilization(traj.structures(), 4);
        let report = classify_regime(&traj, t, &Tolerances::default());
        (cfg, traj, report)
    }

    #[test]
    fn trajectory_csv_shape() {
        let (_, traj, _) = small_run();
        let csv = trajectory_csv(&traj);
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "t,agent,x,y");
        // (horizon + 1) * n data rows
        assert_eq!(lines.len(), 1 + 6 * 2);
        assert_eq!(lines[1], "0,1,0.5,0.5");
        assert!(lines.last().unwrap().starts_with("5,2,"));
    }

    #[test]
    fn single_agent_dot_snapshot() {
        let params = ModelParams::new(1, 0.5, 0.5).unwrap();
        let z = lift(1, &[0.3], &[0.7]).unwrap();
        let m = assemble_state_matrix(&z, &params);
        let g = coevo_core::graph::digraph_of(&m);
        let dot = graph_dot(&g, &[0], 1);
        let expected = "digraph snapshot {\n  x1 [leader=true];\n  y1;\n  \
                        x1 -> x1 [class=\"oo\"];\n  x1 -> y1 [class=\"oa\"];\n  \
                        y1 -> y1 [class=\"aa\"];\n}\n";
        assert_eq!(dot, expected);
    }

    #[test]
    fn matrix_csv_round_trips() {
        let params = ModelParams::new(2, 0.3, 0.5).unwrap();
        let z = lift(1, &[0.4, 0.5], &[0.4, 0.6]).unwrap();
        let m = assemble_state_matrix(&z, &params);
        let csv = matrix_csv(&m);
        for (i, line) in csv.lines().enumerate() {
            for (j, cell) in line.split(',').enumerate() {
                let parsed: f64 = cell.parse().unwrap();
                assert_eq!(parsed, m.get(i, j), "entry ({i},{j})");
            }
        }
    }

    #[test]
    fn report_json_keys_and_determinism() {
        let (cfg, _, report) = small_run();
        let a = report_json(&report, ConfigEcho::of(&cfg));
        let b = report_json(&report, ConfigEcho::of(&cfg));
        assert_eq!(a, b);
        assert!(a.contains("\"regime\": \"Consensus\""));
        assert!(a.contains("\"consensus_value\": 0.5"));
        assert!(!a.contains("\"hull\"")); // absent on consensus runs
        let regime_pos = a.find("\"regime\"").unwrap();
        let config_pos = a.find("\"config\"").unwrap();
        assert!(regime_pos < config_pos);
    }

    #[test]
    fn run_hash_is_stable_and_seed_sensitive() {
        let (cfg, _, _) = small_run();
        let h1 = run_hash(&cfg);
        let h2 = run_hash(&cfg);
        assert_eq!(h1, h2);
        assert_eq!(h1.len(), 16);
        let mut other = cfg.clone();
        other.seed += 1;
        assert_ne!(run_hash(&other), h1);
    }
}
