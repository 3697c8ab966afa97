//! The `sweep` command: the cartesian product of the threshold grid, the
//! weight grid and the seed list, each cell an independent run.
//!
//! Rows are emitted in canonical order (epsilon, then phi, then seed entry,
//! each ascending) regardless of grid order in the config, and each cell's
//! RNG seed is derived from the cell content (see [`crate::rng::cell_seed`]),
//! so a cell's row is reproducible with the single-run command and never
//! changes when the grids grow.

use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Mutex;

use anyhow::Context;

use coevo_core::sim::{spread, Regime};

use crate::config::{RunConfig, SweepConfig};
use crate::rng::cell_seed;
use crate::run;

/// One phase-map row.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub epsilon: f64,
    pub phi: f64,
    pub seed_entry: u64,
    pub cell_seed: u64,
    pub regime: Regime,
    pub stabilization_time: Option<usize>,
    pub cluster_count: usize,
    pub leader_count: usize,
    pub containment_residual: Option<f64>,
    pub consensus_spread: f64,
}

pub const SWEEP_CSV_HEADER: &str = "epsilon,phi,seed,cell_seed,regime,stabilization_time,\
cluster_count,leader_count,containment_residual,consensus_spread";

impl SweepRow {
    pub fn to_csv_line(&self) -> String {
        let opt_usize = |v: Option<usize>| v.map(|x| x.to_string()).unwrap_or_default();
        let opt_f64 = |v: Option<f64>| v.map(|x| format!("{x}")).unwrap_or_default();
        format!(
            "{},{},{},{},{},{},{},{},{},{}",
            self.epsilon,
            self.phi,
            self.seed_entry,
            self.cell_seed,
            self.regime.as_str(),
            opt_usize(self.stabilization_time),
            self.cluster_count,
            self.leader_count,
            opt_f64(self.containment_residual),
            self.consensus_spread
        )
    }
}

/// The per-cell run configuration: base fields with the cell's grid values
/// and derived seed, file outputs disabled (the sweep writes one CSV).
pub fn cell_config(base: &RunConfig, epsilon: f64, phi: f64, seed_entry: u64) -> RunConfig {
    let mut cfg = base.clone();
    cfg.epsilon = epsilon;
    cfg.phi = phi;
    cfg.seed = cell_seed(base.seed, epsilon, phi, seed_entry);
    cfg
}

fn sorted(mut values: Vec<f64>) -> Vec<f64> {
    values.sort_by(|a, b| a.partial_cmp(b).expect("grids are validated finite"));
    values
}

/// All cells in canonical order.
pub fn cells(cfg: &SweepConfig) -> Vec<(f64, f64, u64)> {
    let eps_grid = sorted(cfg.epsilon_grid.clone());
    let phi_grid = sorted(cfg.phi_grid.clone());
    let mut seeds = cfg.seeds.clone();
    seeds.sort_unstable();
    let mut out = Vec::with_capacity(eps_grid.len() * phi_grid.len() * seeds.len());
    for &eps in &eps_grid {
        for &phi in &phi_grid {
            for &seed in &seeds {
                out.push((eps, phi, seed));
            }
        }
    }
    out
}

fn run_cell(base: &RunConfig, epsilon: f64, phi: f64, seed_entry: u64) -> SweepRow {
    let cfg = cell_config(base, epsilon, phi, seed_entry);
    let (_, report) = run::execute(&cfg);
    let cluster_count = report
        .cluster_assignment
        .iter()
        .copied()
        .max()
        .map_or(0, |m| m + 1);
    SweepRow {
        epsilon,
        phi,
        seed_entry,
        cell_seed: cfg.seed,
        regime: report.regime,
        stabilization_time: report.stabilization_time,
        cluster_count,
        leader_count: report.leaders.len(),
        containment_residual: report.containment_residual,
        consensus_spread: spread(&report.limit_values),
    }
}

/// Computes every row, optionally on `jobs` worker threads. Results are
/// assembled by cell index, so the output is identical for any job count.
pub fn sweep_rows(cfg: &SweepConfig, jobs: usize) -> Vec<SweepRow> {
    let cells = cells(cfg);
    let jobs = jobs.max(1).min(cells.len().max(1));
    if jobs == 1 {
        return cells
            .iter()
            .map(|&(e, p, s)| run_cell(&cfg.base, e, p, s))
            .collect();
    }
    let slots: Vec<Mutex<Option<SweepRow>>> =
        cells.iter().map(|_| Mutex::new(None)).collect();
    std::thread::scope(|scope| {
        for worker in 0..jobs {
            let cells = &cells;
            let slots = &slots;
            let base = &cfg.base;
            scope.spawn(move || {
                let mut idx = worker;
                while idx < cells.len() {
                    let (e, p, s) = cells[idx];
                    *slots[idx].lock().unwrap() = Some(run_cell(base, e, p, s));
                    idx += jobs;
                }
            });
        }
    });
    slots
        .into_iter()
        .map(|slot| slot.into_inner().unwrap().expect("every cell computed"))
        .collect()
}

pub fn rows_to_csv(rows: &[SweepRow]) -> String {
    let mut out = String::from(SWEEP_CSV_HEADER);
    out.push('\n');
    for row in rows {
        out.push_str(&row.to_csv_line());
        out.push('\n');
    }
    out
}

/// Runs the sweep and writes `<out_root>/sweep.csv`.
pub fn sweep_command(cfg: &SweepConfig, out_root: &Path, jobs: usize) -> anyhow::Result<PathBuf> {
    let rows = sweep_rows(cfg, jobs);
    fs::create_dir_all(out_root)
        .with_context(|| format!("creating {}", out_root.display()))?;
    let path = out_root.join("sweep.csv");
    fs::write(&path, rows_to_csv(&rows)).with_context(|| format!("writing {}", path.display()))?;
    Ok(path)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::parse_sweep_config;

    fn sweep_cfg() -> SweepConfig {
        parse_sweep_config(
            "n = 5\nseed = 7\nhorizon = 40\nepsilon_grid = 0.3, 0.05\nphi_grid = 0.5\n\
             seeds = 2, 0, 1\n",
            "t",
        )
        .unwrap()
    }

    #[test]
    fn cells_are_canonically_ordered() {
        let cfg = sweep_cfg();
        let cells = cells(&cfg);
        assert_eq!(
            cells,
            vec![
                (0.05, 0.5, 0),
                (0.05, 0.5, 1),
                (0.05, 0.5, 2),
                (0.3, 0.5, 0),
                (0.3, 0.5, 1),
                (0.3, 0.5, 2),
            ]
        );
    }

    #[test]
    fn parallel_and_serial_rows_agree() {
        let cfg = sweep_cfg();
        let serial = sweep_rows(&cfg, 1);
        let parallel = sweep_rows(&cfg, 4);
        assert_eq!(serial, parallel);
        assert_eq!(serial.len(), 6);
    }

    #[test]
    fn rows_match_single_run_execution() {
        let cfg = sweep_cfg();
        for row in sweep_rows(&cfg, 1) {
            let cell = cell_config(&cfg.base, row.epsilon, row.phi, row.seed_entry);
            assert_eq!(cell.seed, row.cell_seed);
            let (_, report) = run::execute(&cell);
            assert_eq!(report.regime, row.regime);
            assert_eq!(report.stabilization_time, row.stabilization_time);
            assert_eq!(report.leaders.len(), row.leader_count);
        }
    }

    #[test]
    fn growing_the_grid_preserves_existing_cell_seeds() {
        let cfg = sweep_cfg();
        let before: Vec<_> = sweep_rows(&cfg, 1)
            .into_iter()
            .map(|r| (r.epsilon, r.phi, r.seed_entry, r.cell_seed))
            .collect();
        let mut grown = cfg.clone();
        grown.epsilon_grid.push(0.9);
        let after = sweep_rows(&grown, 1);
        for (e, p, s, seed) in before {
            let found = after
                .iter()
                .find(|r| r.epsilon == e && r.phi == p && r.seed_entry == s)
                .unwrap();
            assert_eq!(found.cell_seed, seed);
        }
    }
}
