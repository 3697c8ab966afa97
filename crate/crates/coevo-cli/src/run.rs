//! Single-run execution: seeded initialization, simulation, classification,
//! and file output under `<out>/run-<hash>/`.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::Context;

use coevo_core::matrix::assemble_state_matrix;
use coevo_core::model::{ModelParams, PopulationState};
use coevo_core::sim::{
    classify_regime, detect_stabilization, simulate, SimOptions, SimulationReport, Tolerances,
    Trajectory,
};

use crate::config::{InitMode, RunConfig};
use crate::output::{self, ConfigEcho};
use crate::rng::SplitMix64;

/// Draws the initial population according to the config's init mode. All
/// randomness of the tool lives here; the dynamics are pure.
pub fn initial_state(cfg: &RunConfig) -> PopulationState {
    let (x, y) = match cfg.init_mode {
        InitMode::UniformYEqualsX => {
            let mut rng = SplitMix64::new(cfg.seed);
            let x = rng.unit_vec(cfg.n);
            let y = x.clone();
            (x, y)
        }
        InitMode::UniformIndependent => {
            let mut rng = SplitMix64::new(cfg.seed);
            let x = rng.unit_vec(cfg.n);
            let y = rng.unit_vec(cfg.n);
            (x, y)
        }
        InitMode::Explicit => (
            cfg.x0.clone().expect("validated by the config parser"),
            cfg.y0.clone().expect("validated by the config parser"),
        ),
    };
    PopulationState::new(0, x, y).expect("config validation keeps entries in range")
}

pub fn tolerances(cfg: &RunConfig) -> Tolerances {
    Tolerances {
        consensus: cfg.tol_consensus,
        containment: cfg.tol_containment,
        window: cfg.window,
    }
}

/// Runs the configured simulation and classifies it. Pure apart from the
/// seeding; no files are touched.
pub fn execute(cfg: &RunConfig) -> (Trajectory, SimulationReport) {
    let params = ModelParams::new(cfg.n, cfg.epsilon, cfg.phi)
        .expect("config validation matches the model's domain");
    let initial = initial_state(cfg);
    let traj = simulate(&params, &initial, cfg.horizon, &SimOptions::default())
        .expect("config validation guarantees horizon >= 2");
    let stabilization = detect_stabilization(traj.structures(), cfg.window);
    let report = classify_regime(&traj, stabilization, &tolerances(cfg));
    (traj, report)
}

/// Result of a completed `run` command.
pub struct RunOutcome {
    pub dir: PathBuf,
    pub report: SimulationReport,
}

/// Executes the run and writes the requested artifacts under
/// `<out_root>/run-<hash>/`. Identical configs produce byte-identical files.
pub fn run_command(cfg: &RunConfig, out_root: &Path) -> anyhow::Result<RunOutcome> {
    let (traj, report) = execute(cfg);
    let dir = out_root.join(format!("run-{}", output::run_hash(cfg)));
    fs::create_dir_all(&dir).with_context(|| format!("creating {}", dir.display()))?;

    if cfg.outputs.trajectory_csv {
        let path = dir.join("trajectory.csv");
        fs::write(&path, output::trajectory_csv(&traj))
            .with_context(|| format!("writing {}", path.display()))?;
    }
    if cfg.outputs.report_json {
        let path = dir.join("report.json");
        fs::write(&path, output::report_json(&report, ConfigEcho::of(cfg)))
            .with_context(|| format!("writing {}", path.display()))?;
    }
    if cfg.outputs.graphs_dot {
        let gdir = dir.join("graphs");
        fs::create_dir_all(&gdir)?;
        for structure in traj.structures() {
            let z = &traj.augmented()[structure.t - 1];
            let params = traj.params();
            let m = assemble_state_matrix(z, params);
            let g = coevo_core::graph::digraph_of(&m);
            let dot = output::graph_dot(&g, &structure.theta, cfg.n);
            let path = gdir.join(format!("t{}.dot", structure.t));
            fs::write(&path, dot).with_context(|| format!("writing {}", path.display()))?;
        }
    }
    if cfg.outputs.matrices_csv {
        let mdir = dir.join("matrices");
        fs::create_dir_all(&mdir)?;
        for z in traj.augmented().iter().take(traj.augmented().len() - 1) {
            let m = assemble_state_matrix(z, traj.params());
            let path = mdir.join(format!("t{}.csv", z.t()));
            fs::write(&path, output::matrix_csv(&m))
                .with_context(|| format!("writing {}", path.display()))?;
        }
    }
    Ok(RunOutcome { dir, report })
}
