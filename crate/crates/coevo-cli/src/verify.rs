//! The `verify` command: runs the invariant suite on one configured
//! instance and reports a pass/fail line per check.
//!
//! Checks, each over every assembled matrix of the run:
//! row-stochasticity (tolerance 1e-12), the coefficient lower bounds (for
//! decision weights strictly inside (0, 1)), the structure dichotomy
//! including the neighbor biconditional, and the direct-vs-matrix
//! representation equivalence (tolerance 1e-12).

use coevo_core::graph::{classify_structure, digraph_of, omega_theta_partition, StructureClass};
use coevo_core::matrix::{
    assemble_state_matrix, check_row_stochastic, coefficient_bounds, verify_bounds,
};
use coevo_core::model::ModelParams;
use coevo_core::sim::compare_direct_vs_matrix;

use crate::config::RunConfig;
use crate::run;

pub const ROW_SUM_TOL: f64 = 1e-12;
pub const EQUIVALENCE_TOL: f64 = 1e-12;

/// Outcome of the whole suite.
pub struct VerifyOutcome {
    pub passed: bool,
    pub lines: Vec<String>,
}

pub fn verify_command(cfg: &RunConfig) -> VerifyOutcome {
    let (traj, _) = run::execute(cfg);
    let params = ModelParams::new(cfg.n, cfg.epsilon, cfg.phi).expect("validated config");
    let interior = cfg.phi > 0.0 && cfg.phi < 1.0;

    // matrices are recomputed from the recorded augmented states; the last
    // one maps beyond the horizon and is exercised as well
    let matrices: Vec<_> = traj
        .augmented()
        .iter()
        .map(|z| assemble_state_matrix(z, &params))
        .collect();

    let mut lines = Vec::new();
    let mut passed = true;

    let mut worst_row_dev: f64 = 0.0;
    let mut stochastic_ok = true;
    for m in &matrices {
        let chk = check_row_stochastic(m, ROW_SUM_TOL);
        worst_row_dev = worst_row_dev.max(chk.max_row_sum_deviation);
        stochastic_ok &= chk.is_row_stochastic;
    }
    passed &= stochastic_ok;
    lines.push(format!(
        "row-stochastic: {} (max row-sum deviation {:.3e} over {} matrices)",
        if stochastic_ok { "PASS" } else { "FAIL" },
        worst_row_dev,
        matrices.len()
    ));

    if interior {
        let bounds = coefficient_bounds(&params).expect("interior weight");
        let mut bounds_ok = true;
        let mut violation_count = 0usize;
        for m in &matrices {
            let chk = verify_bounds(m, &bounds);
            bounds_ok &= chk.all_bounded;
            violation_count += chk.violations.len();
        }
        passed &= bounds_ok;
        lines.push(format!(
            "coefficient-bounds: {} (alpha {:.6e}, beta {:.6e}, {} violations)",
            if bounds_ok { "PASS" } else { "FAIL" },
            bounds.alpha,
            bounds.beta,
            violation_count
        ));

        let mut dichotomy_ok = true;
        for (m, z) in matrices.iter().zip(traj.augmented()) {
            let g = digraph_of(m);
            let report = classify_structure(&g, z, &params).expect("interior weight");
            let (_, theta) = omega_theta_partition(z, &params).expect("interior weight");
            let consistent = match report.class {
                StructureClass::StronglyConnected => theta.is_empty(),
                StructureClass::SinkPlusSingletonSources { ref leaders } => {
                    !theta.is_empty() && *leaders == theta
                }
                StructureClass::Other => false,
            };
            dichotomy_ok &= consistent;
        }
        passed &= dichotomy_ok;
        lines.push(format!(
            "structure-dichotomy: {} ({} matrices classified)",
            if dichotomy_ok { "PASS" } else { "FAIL" },
            matrices.len()
        ));
    } else {
        lines.push(format!(
            "coefficient-bounds: SKIP (phi = {} outside (0, 1))",
            cfg.phi
        ));
        lines.push(format!(
            "structure-dichotomy: SKIP (phi = {} outside (0, 1))",
            cfg.phi
        ));
    }

    let deviation = compare_direct_vs_matrix(&traj);
    let equiv_ok = deviation <= EQUIVALENCE_TOL;
    passed &= equiv_ok;
    lines.push(format!(
        "direct-vs-matrix: {} (max deviation {:.3e})",
        if equiv_ok { "PASS" } else { "FAIL" },
        deviation
    ));

    VerifyOutcome { passed, lines }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::parse_run_config;

    #[test]
    fn suite_passes_on_both_scenario_settings() {
        for epsilon in ["0.3", "0.05"] {
            let cfg = parse_run_config(
                &format!("n = 10\nepsilon = {epsilon}\nphi = 0.5\nseed = 3\nhorizon = 60\n"),
                "t",
            )
            .unwrap();
            let outcome = verify_command(&cfg);
            assert!(outcome.passed, "{:?}", outcome.lines);
            assert_eq!(outcome.lines.len(), 4);
            assert!(outcome.lines.iter().all(|l| l.contains("PASS")));
        }
    }

    #[test]
    fn degenerate_weights_skip_the_interior_checks() {
        let cfg = parse_run_config(
            "n = 5\nepsilon = 0.3\nphi = 1\nseed = 3\nhorizon = 30\n",
            "t",
        )
        .unwrap();
        let outcome = verify_command(&cfg);
        assert!(outcome.passed);
        assert_eq!(
            outcome.lines.iter().filter(|l| l.contains("SKIP")).count(),
            2
        );
    }
}
