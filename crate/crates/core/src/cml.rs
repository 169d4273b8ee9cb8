//! Cognitive map learners built explicitly from a known graph.
//!
//! Node states come from a codebook, each edge action is the difference of
//! its endpoint states, and planning scores every action with the
//! pseudo-inverse of the action matrix, keeping only actions available at the
//! current node and taking the best one.

use std::collections::HashSet;
use std::sync::Arc;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::phasor::{recover, Codebook, ComplexVector, DenseVector};

/// Relative singular value cutoff used when forming the pseudo-inverse.
pub const PINV_RELATIVE_CUTOFF: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Topology {
    Ring,
    Linear,
    Custom,
}

/// Directed graph over `node_count` nodes.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphSpec {
    pub node_count: usize,
    pub edges: Vec<(usize, usize)>,
    pub topology: Topology,
}

impl GraphSpec {
    /// Bidirectional ring: edges `k → k+1` for every `k`, then `k+1 → k`.
    pub fn ring(m: usize) -> Result<Self> {
        if m < 3 {
            return Err(Error::InvalidGraph(format!("ring needs at least 3 nodes, got {m}")));
        }
        let forward = (0..m).map(|k| (k, (k + 1) % m));
        let backward = (0..m).map(|k| ((k + 1) % m, k));
        Ok(Self { node_count: m, edges: forward.chain(backward).collect(), topology: Topology::Ring })
    }

    /// Bidirectional chain `0 - 1 - ... - (m-1)`.
    pub fn linear(m: usize) -> Result<Self> {
        if m < 2 {
            return Err(Error::InvalidGraph(format!("linear graph needs at least 2 nodes, got {m}")));
        }
        let forward = (0..m - 1).map(|k| (k, k + 1));
        let backward = (0..m - 1).map(|k| (k + 1, k));
        Ok(Self { node_count: m, edges: forward.chain(backward).collect(), topology: Topology::Linear })
    }

    pub fn custom(node_count: usize, edges: Vec<(usize, usize)>) -> Result<Self> {
        let g = Self { node_count, edges, topology: Topology::Custom };
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<()> {
        if self.node_count == 0 || self.edges.is_empty() {
            return Err(Error::InvalidGraph("empty graph".into()));
        }
        let mut seen = HashSet::new();
        for &(from, to) in &self.edges {
            if from >= self.node_count || to >= self.node_count {
                return Err(Error::InvalidGraph(format!("edge ({from}, {to}) out of range")));
            }
            if from == to {
                return Err(Error::InvalidGraph(format!("self-loop at {from}")));
            }
            if !seen.insert((from, to)) {
                return Err(Error::InvalidGraph(format!("duplicate edge ({from}, {to})")));
            }
        }
        Ok(())
    }

    pub fn out_degree(&self, node: usize) -> usize {
        self.edges.iter().filter(|(from, _)| *from == node).count()
    }
}

/// Node states, edge actions, their pseudo-inverse and the availability mask.
#[derive(Debug, Clone)]
pub struct CmlModel {
    states: Arc<Codebook>,
    actions: Vec<DenseVector>,
    actions_pinv: DMatrix<Complex64>,
    gating: Vec<bool>,
    graph: GraphSpec,
}

/// One planning step.
#[derive(Debug, Clone, PartialEq)]
pub struct Step {
    pub action_index: usize,
    pub next_index: usize,
    pub predicted: DenseVector,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PlanResult {
    /// Visited nodes, starting with the start node.
    pub node_path: Vec<usize>,
    pub action_path: Vec<usize>,
    pub converged: bool,
    pub steps_taken: usize,
}

impl PlanResult {
    pub fn len(&self) -> usize {
        self.action_path.len()
    }

    pub fn is_empty(&self) -> bool {
        self.action_path.is_empty()
    }

    pub fn last_node(&self) -> usize {
        *self.node_path.last().expect("node path holds the start node")
    }
}

/// Serialized form: the graph plus the hash of the codebook it was built on.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CmlModelFile {
    pub graph: GraphSpec,
    pub codebook_sha256: String,
}

pub fn build_cml(states: Arc<Codebook>, graph: GraphSpec) -> Result<CmlModel> {
    CmlModel::build(states, graph)
}

impl CmlModel {
    pub fn build(states: Arc<Codebook>, graph: GraphSpec) -> Result<Self> {
        graph.validate()?;
        if states.len() != graph.node_count {
            return Err(Error::InvalidGraph(format!(
                "graph has {} nodes but codebook has {} states",
                graph.node_count,
                states.len()
            )));
        }
        let d = states.dim();
        let e = graph.edges.len();
        let n = graph.node_count;
        let mut actions = Vec::with_capacity(e);
        for &(from, to) in &graph.edges {
            actions.push(states.entry(to)?.to_dense().sub(states.entry(from)?)?);
        }
        let a = DMatrix::from_fn(d, e, |r, c| actions[c].elements()[r]);
        let svd = a.svd(true, true);
        let sigma_max = svd.singular_values.iter().copied().fold(0.0, f64::max);
        let actions_pinv = svd
            .pseudo_inverse(PINV_RELATIVE_CUTOFF * sigma_max)
            .map_err(|msg| Error::InvalidGraph(msg.to_string()))?;
        let mut gating = vec![false; e * n];
        for (idx, &(from, _)) in graph.edges.iter().enumerate() {
            gating[idx * n + from] = true;
        }
        Ok(Self { states, actions, actions_pinv, gating, graph })
    }

    pub fn states(&self) -> &Codebook {
        &self.states
    }

    pub fn shared_states(&self) -> Arc<Codebook> {
        Arc::clone(&self.states)
    }

    pub fn actions(&self) -> &[DenseVector] {
        &self.actions
    }

    /// `e × d` pseudo-inverse of the action matrix.
    pub fn actions_pinv(&self) -> &DMatrix<Complex64> {
        &self.actions_pinv
    }

    pub fn graph(&self) -> &GraphSpec {
        &self.graph
    }

    pub fn node_count(&self) -> usize {
        self.graph.node_count
    }

    pub fn edge_count(&self) -> usize {
        self.graph.edges.len()
    }

    /// Whether edge `edge` may be taken from `node`.
    pub fn gating(&self, edge: usize, node: usize) -> bool {
        self.gating[edge * self.graph.node_count + node]
    }

    pub fn default_max_steps(&self) -> usize {
        4 * self.graph.node_count
    }

    fn check_node(&self, node: usize) -> Result<()> {
        if node >= self.node_count() {
            return Err(Error::IndexOutOfRange { index: node, len: self.node_count() });
        }
        Ok(())
    }

    /// Real parts of `A† (desired - states[current])`.
    pub fn utilities<V: ComplexVector + ?Sized>(&self, current: usize, desired: &V) -> Result<Vec<f64>> {
        self.check_node(current)?;
        let diff = DenseVector::new(desired.elements().to_vec()).sub(self.states.entry(current)?)?;
        let b = diff.elements();
        let pinv = &self.actions_pinv;
        Ok((0..self.edge_count())
            .map(|e| (0..b.len()).map(|k| (pinv[(e, k)] * b[k]).re).sum())
            .collect())
    }

    /// Chooses the legal action with the largest utility; ties go to the
    /// lowest edge index.
    pub fn plan_step<V: ComplexVector + ?Sized>(&self, current: usize, desired: &V) -> Result<Step> {
        let utilities = self.utilities(current, desired)?;
        let mut best: Option<(usize, f64)> = None;
        for (edge, &u) in utilities.iter().enumerate() {
            if self.gating(edge, current) && best.is_none_or(|(_, b)| u > b) {
                best = Some((edge, u));
            }
        }
        let (action_index, _) = best.ok_or(Error::Stuck(current))?;
        let next_index = self.graph.edges[action_index].1;
        let predicted = self.states.entry(current)?.to_dense().add(&self.actions[action_index])?;
        Ok(Step { action_index, next_index, predicted })
    }

    /// Iterates [`plan_step`](Self::plan_step) until the goal node is reached
    /// or `max_steps` steps have been taken.
    pub fn plan(&self, start: usize, goal: usize, max_steps: usize) -> Result<PlanResult> {
        self.check_node(start)?;
        self.check_node(goal)?;
        if max_steps == 0 {
            return Err(Error::InvalidConfig("max_steps must be at least 1".into()));
        }
        let desired = self.states.entry(goal)?;
        let mut current = start;
        let mut node_path = vec![start];
        let mut action_path = Vec::new();
        while current != goal && action_path.len() < max_steps {
            let step = self.plan_step(current, desired)?;
            action_path.push(step.action_index);
            node_path.push(step.next_index);
            current = step.next_index;
        }
        let steps_taken = action_path.len();
        Ok(PlanResult { node_path, action_path, converged: current == goal, steps_taken })
    }

    /// Cleans up a noisy state against the node states.
    pub fn recover_state<V: ComplexVector + ?Sized>(&self, noisy: &V, threshold: f64) -> Result<Option<usize>> {
        Ok(recover(noisy, &self.states, threshold)?.map(|r| r.index))
    }

    pub fn to_file(&self) -> CmlModelFile {
        CmlModelFile { graph: self.graph.clone(), codebook_sha256: self.states.content_hash() }
    }

    /// Rebuilds a model from its serialized graph and the matching codebook.
    pub fn from_file(file: &CmlModelFile, states: Arc<Codebook>) -> Result<Self> {
        let found = states.content_hash();
        if found != file.codebook_sha256 {
            return Err(Error::HashMismatch { expected: file.codebook_sha256.clone(), found });
        }
        Self::build(states, file.graph.clone())
    }
}
