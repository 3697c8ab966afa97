//! Interaction digraph extraction and structure analysis.
//!
//! Adjacency convention: matrix entry `p_ij > 0` corresponds to the directed
//! edge `(j, i)`, i.e. column index influences row index. Assembled matrices
//! have the zero-or-at-least-alpha entry dichotomy, so edge extraction uses
//! exact positivity with no threshold parameter.
//!
//! For decision weights strictly inside (0, 1) the digraph of an assembled
//! state matrix always has one of two shapes: strongly connected, or a
//! condensation with a single sink plus one singleton source per agent whose
//! neighbor set is empty (those opinion nodes are the frozen leaders). The
//! classifier keeps an `Other` arm as a tripwire; it is a report value, not
//! an assumption.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::matrix::{AugmentedState, StateMatrix};
use crate::model::{self, ModelParams};

/// Directed graph over nodes `0..node_count` stored as sorted out-neighbor
/// lists. Self-loops are permitted.
#[derive(Debug, Clone, PartialEq)]
pub struct Digraph {
    node_count: usize,
    out: Vec<Vec<usize>>,
}

impl Digraph {
    pub fn new(node_count: usize) -> Self {
        Self {
            node_count,
            out: vec![Vec::new(); node_count],
        }
    }

    pub fn from_edges(node_count: usize, edges: &[(usize, usize)]) -> Self {
        let mut g = Self::new(node_count);
        for &(from, to) in edges {
            g.add_edge(from, to);
        }
        g
    }

    pub fn add_edge(&mut self, from: usize, to: usize) {
        assert!(from < self.node_count && to < self.node_count, "node out of range");
        let list = &mut self.out[from];
        if let Err(pos) = list.binary_search(&to) {
            list.insert(pos, to);
        }
    }

    pub fn node_count(&self) -> usize {
        self.node_count
    }

    pub fn out_neighbors(&self, v: usize) -> &[usize] {
        &self.out[v]
    }

    pub fn has_edge(&self, from: usize, to: usize) -> bool {
        self.out[from].binary_search(&to).is_ok()
    }

    pub fn edge_count(&self) -> usize {
        self.out.iter().map(Vec::len).sum()
    }

    /// Edges as `(from, to)` pairs in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.out
            .iter()
            .enumerate()
            .flat_map(|(from, tos)| tos.iter().map(move |&to| (from, to)))
    }

    pub fn in_degrees(&self) -> Vec<usize> {
        let mut deg = vec![0; self.node_count];
        for tos in &self.out {
            for &to in tos {
                deg[to] += 1;
            }
        }
        deg
    }
}

/// Extracts the weighted digraph of a state matrix: edge `(j, i)` iff the
/// entry at row `i`, column `j` is strictly positive.
pub fn digraph_of(m: &StateMatrix) -> Digraph {
    let dim = m.dim();
    let mut g = Digraph::new(dim);
    for i in 0..dim {
        let row = m.row(i);
        for (j, &v) in row.iter().enumerate() {
            if v > 0.0 {
                g.out[j].push(i); // rows are scanned in order, lists stay sorted
            }
        }
    }
    g
}

/// Partition of the nodes into maximal strongly connected components,
/// canonically ordered by smallest contained node index, each component
/// sorted ascending.
#[derive(Debug, Clone, PartialEq)]
pub struct SccPartition {
    components: Vec<Vec<usize>>,
    component_of: Vec<usize>,
}

impl SccPartition {
    pub fn components(&self) -> &[Vec<usize>] {
        &self.components
    }

    pub fn component_of(&self, v: usize) -> usize {
        self.component_of[v]
    }

    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }
}

struct TarjanState<'g> {
    g: &'g Digraph,
    index: usize,
    idx: Vec<Option<usize>>,
    low: Vec<usize>,
    stack: Vec<usize>,
    on_stack: Vec<bool>,
    comps: Vec<Vec<usize>>,
}

impl TarjanState<'_> {
    fn strongconnect(&mut self, v: usize) {
        self.idx[v] = Some(self.index);
        self.low[v] = self.index;
        self.index += 1;
        self.stack.push(v);
        self.on_stack[v] = true;

        for &w in self.g.out_neighbors(v) {
            if self.idx[w].is_none() {
                self.strongconnect(w);
                self.low[v] = self.low[v].min(self.low[w]);
            } else if self.on_stack[w] {
                self.low[v] = self.low[v].min(self.idx[w].unwrap());
            }
        }

        if self.low[v] == self.idx[v].unwrap() {
            let mut comp = Vec::new();
            loop {
                let w = self.stack.pop().expect("tarjan stack underflow");
                self.on_stack[w] = false;
                comp.push(w);
                if w == v {
                    break;
                }
            }
            comp.sort_unstable();
            self.comps.push(comp);
        }
    }
}

/// Tarjan's algorithm with canonical output ordering.
pub fn strongly_connected_components(g: &Digraph) -> SccPartition {
    let n = g.node_count();
    let mut st = TarjanState {
        g,
        index: 0,
        idx: vec![None; n],
        low: vec![0; n],
        stack: Vec::new(),
        on_stack: vec![false; n],
        comps: Vec::new(),
    };
    for v in 0..n {
        if st.idx[v].is_none() {
            st.strongconnect(v);
        }
    }
    let mut comps = st.comps;
    comps.sort_unstable_by_key(|c| c[0]);
    let mut component_of = vec![0; n];
    for (cid, comp) in comps.iter().enumerate() {
        for &v in comp {
            component_of[v] = cid;
        }
    }
    SccPartition {
        components: comps,
        component_of,
    }
}

/// Digraph over the components: an edge between distinct components whenever
/// any edge of `g` crosses them. Never contains self-loops.
pub fn condensation(g: &Digraph, scc: &SccPartition) -> Digraph {
    let mut c = Digraph::new(scc.len());
    for (from, to) in g.edges() {
        let (cf, ct) = (scc.component_of(from), scc.component_of(to));
        if cf != ct {
            c.add_edge(cf, ct);
        }
    }
    c
}

/// Nodes with no incoming edges, and nodes with no outgoing edges. Intended
/// for condensations; an isolated node is both.
pub fn sources_and_sinks(g: &Digraph) -> (Vec<usize>, Vec<usize>) {
    let in_deg = g.in_degrees();
    let sources = (0..g.node_count()).filter(|&v| in_deg[v] == 0).collect();
    let sinks = (0..g.node_count())
        .filter(|&v| g.out_neighbors(v).is_empty())
        .collect();
    (sources, sinks)
}

/// Splits the `2n` augmented nodes into the mixing part (all action nodes
/// plus every opinion node whose agent has at least one neighbor) and the
/// isolated part (opinion nodes of neighborless agents). Only defined for
/// decision weights strictly inside (0, 1).
pub fn omega_theta_partition(
    z: &AugmentedState,
    params: &ModelParams,
) -> Result<(Vec<usize>, Vec<usize>)> {
    let phi = params.phi();
    if phi <= 0.0 || phi >= 1.0 {
        return Err(Error::DegenerateDecisionWeight { phi });
    }
    let n = params.agent_count();
    assert_eq!(
        z.agent_count(),
        n,
        "augmented state and params disagree on population size"
    );
    let y = crate::matrix::reconstruct_actions(z, params);
    let sets = model::neighbor_indices(z.opinions(), &y, params.epsilon());
    let mut omega = Vec::new();
    let mut theta = Vec::new();
    for (i, set) in sets.iter().enumerate() {
        if set.is_empty() {
            theta.push(i);
        } else {
            omega.push(i);
        }
    }
    omega.extend(n..2 * n); // every action node mixes
    Ok((omega, theta))
}

/// Shape of the interaction digraph at one time step.
#[derive(Debug, Clone, PartialEq)]
pub enum StructureClass {
    StronglyConnected,
    /// The condensation has exactly one sink; every other component is a
    /// singleton with no incoming edges. `leaders` are those singleton
    /// source nodes (frozen opinion nodes).
    SinkPlusSingletonSources { leaders: Vec<usize> },
    /// Tripwire: must never occur for matrices assembled from valid states.
    Other,
}

/// Full structural snapshot of the digraph at one time step.
#[derive(Debug, Clone, PartialEq)]
pub struct StructureReport {
    pub t: usize,
    pub scc: SccPartition,
    /// Condensation edges over component indices, lexicographic.
    pub condensation_edges: Vec<(usize, usize)>,
    pub class: StructureClass,
    pub omega: Vec<usize>,
    pub theta: Vec<usize>,
}

/// Classifies the digraph of an assembled state matrix against the expected
/// dichotomy. `Other` is reported (never raised) when neither shape matches;
/// downstream consumers treat it as an internal consistency failure.
pub fn classify_structure(
    g: &Digraph,
    z: &AugmentedState,
    params: &ModelParams,
) -> Result<StructureReport> {
    let (omega, theta) = omega_theta_partition(z, params)?;
    let scc = strongly_connected_components(g);
    let cond = condensation(g, &scc);
    let condensation_edges: Vec<(usize, usize)> = cond.edges().collect();

    let class = if scc.len() == 1 {
        StructureClass::StronglyConnected
    } else {
        let (sources, sinks) = sources_and_sinks(&cond);
        let single_sink = sinks.len() == 1;
        let non_sink_are_singleton_sources = (0..cond.node_count())
            .filter(|c| !sinks.contains(c))
            .all(|c| scc.components()[c].len() == 1 && sources.contains(&c));
        // the singleton sources must be exactly the isolated opinion nodes
        let mut source_nodes: Vec<usize> = (0..cond.node_count())
            .filter(|c| !sinks.contains(c))
            .map(|c| scc.components()[c][0])
            .collect();
        source_nodes.sort_unstable();
        if single_sink && non_sink_are_singleton_sources && source_nodes == theta {
            StructureClass::SinkPlusSingletonSources {
                leaders: source_nodes,
            }
        } else {
            StructureClass::Other
        }
    };

    Ok(StructureReport {
        t: z.t(),
        scc,
        condensation_edges,
        class,
        omega,
        theta,
    })
}

/// Hard cap on the exhaustive cut-balance enumeration (2^16 - 2 subsets).
pub const CUT_BALANCE_NODE_LIMIT: usize = 16;

/// Outcome of the exhaustive cut-balance check.
#[derive(Debug, Clone, PartialEq)]
pub struct CutBalanceReport {
    pub balanced: bool,
    /// First subset (by bitmask order) violating the biconditional, if any.
    pub violating_subset: Option<Vec<usize>>,
}

/// Checks, for every nonempty proper node subset `S`, that an edge entering
/// `S` from outside exists iff an edge leaving `S` exists. Exhaustive over
/// all subsets, hence the node cap; beyond it use strong connectivity as the
/// sufficient condition.
pub fn cut_balance_exhaustive(g: &Digraph) -> Result<CutBalanceReport> {
    let n = g.node_count();
    if n > CUT_BALANCE_NODE_LIMIT {
        return Err(Error::GraphTooLarge {
            nodes: n,
            limit: CUT_BALANCE_NODE_LIMIT,
        });
    }
    // out_mask[v] = bitmask of heads of edges leaving v, self-loops dropped
    // (they never cross a cut)
    let mut out_mask = vec![0u32; n];
    for (from, to) in g.edges() {
        if from != to {
            out_mask[from] |= 1 << to;
        }
    }
    let full: u32 = if n == 32 { u32::MAX } else { (1 << n) - 1 };
    for subset in 1..full {
        let complement = full & !subset;
        let mut outgoing = false; // edge from S into complement
        let mut incoming = false; // edge from complement into S
        for v in 0..n {
            if subset & (1 << v) != 0 {
                if out_mask[v] & complement != 0 {
                    outgoing = true;
                }
            } else if out_mask[v] & subset != 0 {
                incoming = true;
            }
            if outgoing && incoming {
                break;
            }
        }
        if outgoing != incoming {
            let members = (0..n).filter(|v| subset & (1 << v) != 0).collect();
            return Ok(CutBalanceReport {
                balanced: false,
                violating_subset: Some(members),
            });
        }
    }
    Ok(CutBalanceReport {
        balanced: true,
        violating_subset: None,
    })
}
