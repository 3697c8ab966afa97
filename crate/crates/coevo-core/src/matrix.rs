//! Augmented state vector and the row-stochastic state matrix driving it.
//!
//! At time `t >= 1` the augmented vector stacks the current opinions on top
//! of the *previous* actions: `z(t) = [x(t); y(t-1)]`. One linear step
//! `z(t+1) = P(t) z(t)` then reproduces the coupled dynamics exactly, with
//! `P(t)` built from four `n x n` blocks:
//!
//! ```text
//!         opinion cols      action cols
//! row i   1/(c_i+1) diag,   (1-phi) c_i / ((c_i+1) n)   (identical entries)
//! (i<n)   phi/(c_i+1) in neighbor columns, 0 elsewhere
//!
//! row n+i phi at column i   (1-phi)/n everywhere
//! ```
//!
//! where `c_i` is agent `i`'s neighbor count. The neighbor sets are
//! evaluated from `z(t)` alone by first reconstructing the current actions
//! `y(t)` from the stored `x(t)` and the mean of `y(t-1)`; this makes `P(t)`
//! a function of the augmented state only. The lower two blocks do not
//! depend on the neighbor sets and are therefore time-invariant.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::model::{self, ModelParams, PopulationState};

/// The stacked vector `[x(t); y(t-1)]`, defined for `t >= 1`.
///
/// Indices `0..n` are opinion coordinates, `n..2n` action coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct AugmentedState {
    t: usize,
    z: Vec<f64>,
}

impl AugmentedState {
    /// Validates `t >= 1`, an even nonzero length, and unit-interval entries.
    pub fn new(t: usize, z: Vec<f64>) -> Result<Self> {
        if t == 0 {
            return Err(Error::TimeIndexZero);
        }
        if z.is_empty() {
            return Err(Error::AgentCountZero);
        }
        if !z.len().is_multiple_of(2) {
            return Err(Error::OddAugmentedLength { found: z.len() });
        }
        model::check_unit_range("z", &z)?;
        Ok(Self { t, z })
    }

    /// Internal constructor for matrix-step outputs, which may graze the
    /// interval bounds by one rounding because the assembled row sums are
    /// themselves rounded.
    pub(crate) fn advanced(t: usize, z: Vec<f64>) -> Self {
        Self { t, z }
    }

    pub fn t(&self) -> usize {
        self.t
    }

    pub fn agent_count(&self) -> usize {
        self.z.len() / 2
    }

    pub fn values(&self) -> &[f64] {
        &self.z
    }

    /// First half: the opinions `x(t)`.
    pub fn opinions(&self) -> &[f64] {
        &self.z[..self.agent_count()]
    }

    /// Second half: the previous actions `y(t-1)`.
    pub fn prior_actions(&self) -> &[f64] {
        &self.z[self.agent_count()..]
    }
}

/// Stacks `x(t)` and `y(t-1)` into the augmented vector for time `t`.
pub fn lift(t: usize, x: &[f64], y_prev: &[f64]) -> Result<AugmentedState> {
    if x.len() != y_prev.len() {
        return Err(Error::DimensionMismatch {
            expected: x.len(),
            found: y_prev.len(),
        });
    }
    let mut z = Vec::with_capacity(2 * x.len());
    z.extend_from_slice(x);
    z.extend_from_slice(y_prev);
    AugmentedState::new(t, z)
}

/// Produces `z(1) = [x(1); y(0)]` by one direct dynamics step from the
/// initial population state. The linear recursion only applies from `t = 1`
/// on, so this is the entry point into the matrix representation.
pub fn bootstrap(initial: &PopulationState, params: &ModelParams) -> Result<AugmentedState> {
    let next = model::step(initial, params)?;
    lift(1, next.opinions(), initial.actions())
}

/// Recovers the current actions `y(t)` from the augmented state: each is
/// `phi * x_i(t) + (1-phi) * mean(y(t-1))`. Mirrors the direct action
/// update operation for operation, so the recovered values are bit-identical
/// to the ones the direct dynamics produced.
pub fn reconstruct_actions(z: &AugmentedState, params: &ModelParams) -> Vec<f64> {
    assert_eq!(
        z.agent_count(),
        params.agent_count(),
        "augmented state and params disagree on population size"
    );
    let phi = params.phi();
    let y_avg_prev = model::mean(z.prior_actions());
    z.opinions()
        .iter()
        .map(|&xi| phi * xi + (1.0 - phi) * y_avg_prev)
        .collect()
}

/// Dense `2n x 2n` state matrix assembled for one time step.
#[derive(Debug, Clone, PartialEq)]
pub struct StateMatrix {
    t: usize,
    n: usize,
    entries: Vec<f64>,
}

impl StateMatrix {
    pub fn t(&self) -> usize {
        self.t
    }

    pub fn agent_count(&self) -> usize {
        self.n
    }

    /// Full dimension `2n`.
    pub fn dim(&self) -> usize {
        2 * self.n
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.entries[row * self.dim() + col]
    }

    pub fn row(&self, row: usize) -> &[f64] {
        let d = self.dim();
        &self.entries[row * d..(row + 1) * d]
    }

    /// Block accessors by index arithmetic into the four `n x n` blocks.
    pub fn p11(&self, i: usize, j: usize) -> f64 {
        self.get(i, j)
    }

    pub fn p12(&self, i: usize, j: usize) -> f64 {
        self.get(i, self.n + j)
    }

    pub fn p21(&self, i: usize, j: usize) -> f64 {
        self.get(self.n + i, j)
    }

    pub fn p22(&self, i: usize, j: usize) -> f64 {
        self.get(self.n + i, self.n + j)
    }
}

/// Builds `P(t)` from the augmented state. Neighbor sets are evaluated on
/// the stored opinions against the reconstructed current actions.
pub fn assemble_state_matrix(z: &AugmentedState, params: &ModelParams) -> StateMatrix {
    let n = params.agent_count();
    assert_eq!(
        z.agent_count(),
        n,
        "augmented state and params disagree on population size"
    );
    let phi = params.phi();
    let x = z.opinions();
    let y = reconstruct_actions(z, params);
    let sets = model::neighbor_indices(x, &y, params.epsilon());

    let dim = 2 * n;
    let mut entries = vec![0.0; dim * dim];
    let p22 = (1.0 - phi) / n as f64;
    for i in 0..n {
        let c = sets[i].len();
        let upper = &mut entries[i * dim..(i + 1) * dim];
        upper[i] = 1.0 / (c + 1) as f64;
        let coef = phi / (c + 1) as f64;
        for &j in &sets[i] {
            upper[j] = coef;
        }
        // identical entries across the whole action half of the row
        let spill = ((1.0 - phi) * c as f64) / (((c + 1) * n) as f64);
        for j in 0..n {
            upper[n + j] = spill;
        }
        let lower = &mut entries[(n + i) * dim..(n + i + 1) * dim];
        lower[i] = phi;
        for j in 0..n {
            lower[n + j] = p22;
        }
    }
    StateMatrix {
        t: z.t(),
        n,
        entries,
    }
}

/// One linear step `z(t+1) = P(t) z(t)`.
pub fn matrix_step(z: &AugmentedState, params: &ModelParams) -> AugmentedState {
    let m = assemble_state_matrix(z, params);
    let dim = m.dim();
    let zv = z.values();
    let mut next = Vec::with_capacity(dim);
    for i in 0..dim {
        let row = m.row(i);
        let mut sum = 0.0;
        for j in 0..dim {
            sum += row[j] * zv[j];
        }
        next.push(sum);
    }
    AugmentedState::advanced(z.t() + 1, next)
}

/// Result of the row-stochasticity check.
#[derive(Debug, Clone, PartialEq)]
pub struct RowStochasticCheck {
    /// True iff every entry is nonnegative and every row sums to 1 within
    /// the tolerance.
    pub is_row_stochastic: bool,
    /// Largest observed `|row sum - 1|`.
    pub max_row_sum_deviation: f64,
}

pub fn check_row_stochastic(m: &StateMatrix, tol: f64) -> RowStochasticCheck {
    let mut nonnegative = true;
    let mut max_dev: f64 = 0.0;
    for i in 0..m.dim() {
        let mut sum = 0.0;
        for &v in m.row(i) {
            if v < 0.0 {
                nonnegative = false;
            }
            sum += v;
        }
        max_dev = max_dev.max((sum - 1.0).abs());
    }
    RowStochasticCheck {
        is_row_stochastic: nonnegative && max_dev <= tol,
        max_row_sum_deviation: max_dev,
    }
}

/// Closed-form uniform lower bounds on the state matrix coefficients, valid
/// for decision weights strictly inside (0, 1).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoefficientBounds {
    /// Lower bound on every strictly positive entry.
    pub alpha: f64,
    /// Lower bound on every diagonal entry.
    pub beta: f64,
}

/// `alpha = min(phi/n, (1-phi)/(2n), phi, (1-phi)/n)` and
/// `beta = min(1/n, (1-phi)/n)`. Both degenerate to zero at the interval
/// endpoints, so those are rejected.
pub fn coefficient_bounds(params: &ModelParams) -> Result<CoefficientBounds> {
    let phi = params.phi();
    if phi <= 0.0 || phi >= 1.0 {
        return Err(Error::DegenerateDecisionWeight { phi });
    }
    let n = params.agent_count() as f64;
    let two_n = (2 * params.agent_count()) as f64;
    let alpha = (phi / n)
        .min((1.0 - phi) / two_n)
        .min(phi)
        .min((1.0 - phi) / n);
    let beta = (1.0 / n).min((1.0 - phi) / n);
    Ok(CoefficientBounds { alpha, beta })
}

/// Slack granted for the few independent roundings separating an assembled
/// entry from the closed-form bound evaluated on its own.
pub const BOUND_ROUNDING_SLACK: f64 = 1e-15;

/// One entry that fell below its bound.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundViolation {
    pub row: usize,
    pub col: usize,
    pub entry: f64,
    pub bound: f64,
}

/// Result of checking the coefficient bounds on an assembled matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundsCheck {
    pub all_bounded: bool,
    pub violations: Vec<BoundViolation>,
}

/// Verifies that every strictly positive entry reaches `alpha` and every
/// diagonal entry reaches `beta`, modulo [`BOUND_ROUNDING_SLACK`].
pub fn verify_bounds(m: &StateMatrix, bounds: &CoefficientBounds) -> BoundsCheck {
    let mut violations = Vec::new();
    for i in 0..m.dim() {
        for j in 0..m.dim() {
            let v = m.get(i, j);
            if v > 0.0 && v < bounds.alpha - BOUND_ROUNDING_SLACK {
                violations.push(BoundViolation {
                    row: i,
                    col: j,
                    entry: v,
                    bound: bounds.alpha,
                });
            }
            if i == j && v < bounds.beta - BOUND_ROUNDING_SLACK {
                violations.push(BoundViolation {
                    row: i,
                    col: j,
                    entry: v,
                    bound: bounds.beta,
                });
            }
        }
    }
    BoundsCheck {
        all_bounded: violations.is_empty(),
        violations,
    }
}
