//! Agent-level dynamics.
//!
//! Each of the `n` agents carries an opinion `x_i` and an action `y_i`, both
//! in `[0, 1]`. Updates are sequential within a step: all opinions first
//! (from the current actions), then all actions (from the new opinions and
//! the current average action).
//!
//! The neighbor rule compares an agent's *opinion* against other agents'
//! *actions*: `j` is a neighbor of `i` when `j != i` and
//! `|x_i - y_j| <= epsilon`. The comparison is inclusive at exactly
//! `epsilon`.

use alloc::vec::Vec;

use crate::error::{Error, Result};

/// Population-level model parameters.
///
/// `epsilon` is the confidence threshold bounding which actions an agent
/// heeds; `phi` is the decision weight an agent places on its own opinion
/// when acting (`1 - phi` goes to the group's average action).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams {
    n: usize,
    epsilon: f64,
    phi: f64,
}

impl ModelParams {
    pub fn new(n: usize, epsilon: f64, phi: f64) -> Result<Self> {
        if n == 0 {
            return Err(Error::AgentCountZero);
        }
        if !(0.0..=1.0).contains(&epsilon) {
            return Err(Error::ParamOutOfRange {
                name: "epsilon",
                value: epsilon,
            });
        }
        if !(0.0..=1.0).contains(&phi) {
            return Err(Error::ParamOutOfRange {
                name: "phi",
                value: phi,
            });
        }
        Ok(Self { n, epsilon, phi })
    }

    pub fn agent_count(&self) -> usize {
        self.n
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn phi(&self) -> f64 {
        self.phi
    }
}

/// Paired opinion and action vectors of a population at one time step.
#[derive(Debug, Clone, PartialEq)]
pub struct PopulationState {
    t: usize,
    x: Vec<f64>,
    y: Vec<f64>,
}

impl PopulationState {
    /// Validates lengths and that every entry lies in `[0, 1]`.
    pub fn new(t: usize, x: Vec<f64>, y: Vec<f64>) -> Result<Self> {
        if x.len() != y.len() {
            return Err(Error::DimensionMismatch {
                expected: x.len(),
                found: y.len(),
            });
        }
        if x.is_empty() {
            return Err(Error::AgentCountZero);
        }
        check_unit_range("x", &x)?;
        check_unit_range("y", &y)?;
        Ok(Self { t, x, y })
    }

    /// State with all opinions and actions equal to `value`.
    pub fn consensus(t: usize, n: usize, value: f64) -> Result<Self> {
        Self::new(t, alloc::vec![value; n], alloc::vec![value; n])
    }

    pub fn t(&self) -> usize {
        self.t
    }

    pub fn agent_count(&self) -> usize {
        self.x.len()
    }

    pub fn opinions(&self) -> &[f64] {
        &self.x
    }

    pub fn actions(&self) -> &[f64] {
        &self.y
    }
}

pub(crate) fn check_unit_range(name: &'static str, values: &[f64]) -> Result<()> {
    for (index, &value) in values.iter().enumerate() {
        // NaN fails both comparisons and is rejected here as well.
        if !(0.0..=1.0).contains(&value) {
            return Err(Error::ValueOutOfRange { name, index, value });
        }
    }
    Ok(())
}

/// The per-agent neighbor index sets at one time step.
///
/// `sets()[i]` never contains `i` itself and is sorted ascending.
#[derive(Debug, Clone, PartialEq)]
pub struct NeighborSets {
    t: usize,
    sets: Vec<Vec<usize>>,
}

impl NeighborSets {
    pub fn t(&self) -> usize {
        self.t
    }

    pub fn sets(&self) -> &[Vec<usize>] {
        &self.sets
    }

    /// Count of the set for agent `i`.
    pub fn count(&self, i: usize) -> usize {
        self.sets[i].len()
    }
}

/// Shared neighbor evaluation over raw slices, used both by the direct
/// dynamics and by the state-matrix assembly (which reconstructs current
/// actions first). Keeping one code path guarantees the two routes agree
/// bit-for-bit on membership.
pub(crate) fn neighbor_indices(x: &[f64], y: &[f64], epsilon: f64) -> Vec<Vec<usize>> {
    let n = x.len();
    let mut sets = Vec::with_capacity(n);
    for i in 0..n {
        let mut set = Vec::new();
        for j in 0..n {
            if j != i && (x[i] - y[j]).abs() <= epsilon {
                set.push(j);
            }
        }
        sets.push(set);
    }
    sets
}

/// Left-to-right sum divided by the length; the one averaging kernel used
/// everywhere so that reconstructed quantities match the direct ones exactly.
pub(crate) fn mean(values: &[f64]) -> f64 {
    let mut sum = 0.0;
    for &v in values {
        sum += v;
    }
    sum / values.len() as f64
}

/// Evaluates every agent's neighbor set from the current state.
pub fn neighbor_sets(state: &PopulationState, params: &ModelParams) -> Result<NeighborSets> {
    if state.agent_count() != params.agent_count() {
        return Err(Error::DimensionMismatch {
            expected: params.agent_count(),
            found: state.agent_count(),
        });
    }
    Ok(NeighborSets {
        t: state.t,
        sets: neighbor_indices(&state.x, &state.y, params.epsilon),
    })
}

/// Next opinions: agent `i` averages its neighbors' actions together with its
/// own current opinion. An agent without neighbors keeps its opinion exactly.
pub fn update_opinions(
    state: &PopulationState,
    nbrs: &NeighborSets,
    params: &ModelParams,
) -> Result<Vec<f64>> {
    let n = params.agent_count();
    if state.agent_count() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: state.agent_count(),
        });
    }
    if nbrs.sets.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: nbrs.sets.len(),
        });
    }
    let mut next = Vec::with_capacity(n);
    for i in 0..n {
        let set = &nbrs.sets[i];
        let mut sum = 0.0;
        for &j in set {
            sum += state.y[j];
        }
        sum += state.x[i];
        next.push(sum / (set.len() + 1) as f64);
    }
    Ok(next)
}

/// Next actions: a convex blend of the agent's new opinion and the current
/// average action.
pub fn update_actions(
    x_next: &[f64],
    state: &PopulationState,
    params: &ModelParams,
) -> Result<Vec<f64>> {
    let n = params.agent_count();
    if x_next.len() != n || state.agent_count() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: if x_next.len() != n {
                x_next.len()
            } else {
                state.agent_count()
            },
        });
    }
    let phi = params.phi;
    let y_avg = mean(&state.y);
    Ok(x_next
        .iter()
        .map(|&xi| phi * xi + (1.0 - phi) * y_avg)
        .collect())
}

/// One full sequential step: opinions first, then actions.
///
/// Every output entry provably stays in `[0, 1]`: both updates are convex
/// combinations, and IEEE-754 rounding is monotone so the floating-point
/// results cannot cross the representable bounds 0 and 1 either.
pub fn step(state: &PopulationState, params: &ModelParams) -> Result<PopulationState> {
    let nbrs = neighbor_sets(state, params)?;
    let x_next = update_opinions(state, &nbrs, params)?;
    let y_next = update_actions(&x_next, state, params)?;
    PopulationState::new(state.t + 1, x_next, y_next)
}

/// One step of the classical bounded-confidence baseline on opinions alone.
///
/// Here the neighbor set compares opinions against opinions and *includes*
/// the agent itself, so the divisor is never zero.
pub fn hk_step(x: &[f64], epsilon: f64) -> Vec<f64> {
    let n = x.len();
    let mut next = Vec::with_capacity(n);
    for i in 0..n {
        let mut sum = 0.0;
        let mut count = 0usize;
        for j in 0..n {
            if (x[i] - x[j]).abs() <= epsilon {
                sum += x[j];
                count += 1;
            }
        }
        next.push(sum / count as f64);
    }
    next
}

/// The group's average action at the state's time step.
pub fn average_action(state: &PopulationState) -> f64 {
    mean(&state.y)
}
