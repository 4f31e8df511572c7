//! DAG task representation: vertices, precedence edges, per-vertex worst-case
//! execution times, and the graph operations every analysis builds on.
//!
//! Vertex ids are dense integers `0..n`. The precedence relation must be
//! acyclic; deadlines are *arbitrary* in the sense that no relation between
//! deadline and period is assumed.

use crate::error::{Error, Result};

/// Dense vertex identifier.
pub type VertexId = usize;

/// A sporadic DAG task: an acyclic precedence graph with integer worst-case
/// execution times, and an optional relative deadline / minimum inter-arrival
/// time. The deadline is optional because freshly generated graphs receive
/// one in a separate step.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DagTask {
    wcet: Vec<u64>,
    edges: Vec<(VertexId, VertexId)>,
    /// Relative deadline in time units, when assigned.
    pub deadline: Option<u64>,
    /// Minimum inter-arrival time in time units, when assigned.
    pub period: Option<u64>,
}

/// A source-to-sink path: consecutive vertices are joined by an edge, the
/// first vertex has no predecessors and the last has no successors.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Path(Vec<VertexId>);

impl Path {
    pub fn new(vertices: Vec<VertexId>) -> Self {
        Path(vertices)
    }

    pub fn vertices(&self) -> &[VertexId] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, v: VertexId) -> bool {
        self.0.contains(&v)
    }

    /// Summed execution time of the path vertices under the given wcet map.
    pub fn volume(&self, wcet: &[u64]) -> u64 {
        self.0.iter().map(|&v| wcet[v]).sum()
    }

    /// True iff the sequence follows edges of `task` and both endpoints are
    /// a source and a sink respectively.
    pub fn is_full_path(&self, task: &DagTask) -> bool {
        if self.0.is_empty() {
            return false;
        }
        let adj = task.adjacency();
        if !adj.preds[self.0[0]].is_empty() {
            return false;
        }
        if !adj.succs[*self.0.last().unwrap()].is_empty() {
            return false;
        }
        self.0
            .windows(2)
            .all(|w| adj.succs[w[0]].contains(&w[1]))
    }
}

/// Predecessor and successor lists, each sorted by ascending vertex id.
#[derive(Debug, Clone)]
pub struct Adjacency {
    pub preds: Vec<Vec<VertexId>>,
    pub succs: Vec<Vec<VertexId>>,
}

impl DagTask {
    /// Builds a task from per-vertex execution times and an edge list.
    /// No validation is performed here; call [`DagTask::validate`].
    pub fn new(wcet: Vec<u64>, edges: Vec<(VertexId, VertexId)>) -> Self {
        DagTask {
            wcet,
            edges,
            deadline: None,
            period: None,
        }
    }

    /// Returns the task with deadline and period set.
    pub fn with_deadline(mut self, deadline: u64, period: u64) -> Self {
        self.deadline = Some(deadline);
        self.period = Some(period);
        self
    }

    pub fn vertex_count(&self) -> usize {
        self.wcet.len()
    }

    pub fn vertices(&self) -> std::ops::Range<VertexId> {
        0..self.wcet.len()
    }

    pub fn wcet(&self, v: VertexId) -> u64 {
        self.wcet[v]
    }

    pub fn wcets(&self) -> &[u64] {
        &self.wcet
    }

    pub fn edges(&self) -> &[(VertexId, VertexId)] {
        &self.edges
    }

    /// Total volume `C`: the summed worst-case execution time of all vertices.
    pub fn total_volume(&self) -> u64 {
        self.wcet.iter().sum()
    }

    /// Volume of an arbitrary vertex subset.
    pub fn volume_of(&self, vertices: impl IntoIterator<Item = VertexId>) -> u64 {
        vertices.into_iter().map(|v| self.wcet[v]).sum()
    }

    /// Sorted predecessor/successor lists for every vertex. Edges referencing
    /// out-of-range vertices are ignored here; `validate` reports them.
    pub fn adjacency(&self) -> Adjacency {
        let n = self.vertex_count();
        let mut preds = vec![Vec::new(); n];
        let mut succs = vec![Vec::new(); n];
        for &(u, v) in &self.edges {
            if u < n && v < n {
                succs[u].push(v);
                preds[v].push(u);
            }
        }
        for list in preds.iter_mut().chain(succs.iter_mut()) {
            list.sort_unstable();
        }
        Adjacency { preds, succs }
    }

    /// Checks every structural invariant, reporting the first violation:
    /// edge endpoints in range, no self-loops, no duplicate edges, acyclic.
    pub fn validate(&self) -> Result<()> {
        let n = self.vertex_count();
        let mut seen = std::collections::BTreeSet::new();
        for &(u, v) in &self.edges {
            if u >= n || v >= n {
                return Err(Error::DanglingEdge(u, v));
            }
            if u == v {
                return Err(Error::SelfLoop(u));
            }
            if !seen.insert((u, v)) {
                return Err(Error::DuplicateEdge(u, v));
            }
        }
        self.topological_order().map(|_| ())
    }

    /// Deterministic topological order: every edge `(u, v)` places `u` before
    /// `v`, and ties are broken by ascending vertex id.
    pub fn topological_order(&self) -> Result<Vec<VertexId>> {
        use std::cmp::Reverse;
        use std::collections::BinaryHeap;

        let n = self.vertex_count();
        let adj = self.adjacency();
        let mut indegree: Vec<usize> = (0..n).map(|v| adj.preds[v].len()).collect();
        let mut ready: BinaryHeap<Reverse<VertexId>> = (0..n)
            .filter(|&v| indegree[v] == 0)
            .map(Reverse)
            .collect();
        let mut order = Vec::with_capacity(n);
        while let Some(Reverse(v)) = ready.pop() {
            order.push(v);
            for &s in &adj.succs[v] {
                indegree[s] -= 1;
                if indegree[s] == 0 {
                    ready.push(Reverse(s));
                }
            }
        }
        if order.len() == n {
            Ok(order)
        } else {
            Err(Error::CyclicGraph)
        }
    }

    /// A maximum-volume source-to-sink path and its volume, computed by
    /// dynamic programming over the topological order. Among paths of equal
    /// volume the lexicographically smallest vertex sequence is returned.
    pub fn longest_path(&self) -> Result<(Path, u64)> {
        self.longest_path_with(&self.wcet)
    }

    /// [`DagTask::longest_path`] under a substitute wcet map (used by the
    /// greedy coverage iteration, which zeroes already-covered vertices).
    pub fn longest_path_with(&self, wcet: &[u64]) -> Result<(Path, u64)> {
        assert_eq!(wcet.len(), self.vertex_count(), "wcet override length");
        let order = self.topological_order()?;
        if order.is_empty() {
            return Ok((Path::new(Vec::new()), 0));
        }
        let adj = self.adjacency();
        // best[v] = max volume of a v-to-sink path; fill in reverse order.
        let mut best = vec![0u64; self.vertex_count()];
        for &v in order.iter().rev() {
            let tail = adj.succs[v].iter().map(|&s| best[s]).max().unwrap_or(0);
            best[v] = wcet[v] + tail;
        }
        // Start at the best source (smallest id on ties), then repeatedly
        // take the smallest-id successor that preserves optimality; this
        // yields the lexicographically smallest maximum-volume sequence.
        let start = self
            .vertices()
            .filter(|&v| adj.preds[v].is_empty())
            .max_by(|&a, &b| best[a].cmp(&best[b]).then(b.cmp(&a)))
            .expect("acyclic non-empty graph has a source");
        let mut seq = vec![start];
        let mut cur = start;
        while let Some(&next) = adj.succs[cur]
            .iter()
            .find(|&&s| wcet[cur] + best[s] == best[cur])
        {
            seq.push(next);
            cur = next;
        }
        let volume = best[start];
        Ok((Path::new(seq), volume))
    }

    /// Counts all source-to-sink paths without materializing them.
    pub fn count_paths(&self) -> Result<u128> {
        let order = self.topological_order()?;
        let adj = self.adjacency();
        let mut count = vec![0u128; self.vertex_count()];
        for &v in order.iter().rev() {
            count[v] = if adj.succs[v].is_empty() {
                1
            } else {
                adj.succs[v]
                    .iter()
                    .map(|&s| count[s])
                    .fold(0u128, |a, b| a.saturating_add(b))
            };
        }
        Ok(self
            .vertices()
            .filter(|&v| adj.preds[v].is_empty())
            .map(|v| count[v])
            .fold(0u128, |a, b| a.saturating_add(b)))
    }

    /// Every source-to-sink path, in lexicographic vertex-sequence order.
    /// Fails with [`Error::PathExplosion`] when more than `limit` paths
    /// exist; intended for small instances and test oracles.
    pub fn enumerate_paths(&self, limit: u64) -> Result<Vec<Path>> {
        if self.count_paths()? > limit as u128 {
            return Err(Error::PathExplosion(limit));
        }
        let adj = self.adjacency();
        let mut paths = Vec::new();
        let mut stack = Vec::new();
        for source in self.vertices().filter(|&v| adj.preds[v].is_empty()) {
            stack.push(source);
            emit_paths(&adj, &mut stack, &mut paths);
            stack.pop();
        }
        Ok(paths)
    }
}

fn emit_paths(adj: &Adjacency, stack: &mut Vec<VertexId>, out: &mut Vec<Path>) {
    let v = *stack.last().unwrap();
    if adj.succs[v].is_empty() {
        out.push(Path::new(stack.clone()));
        return;
    }
    for &s in &adj.succs[v] {
        stack.push(s);
        emit_paths(adj, stack, out);
        stack.pop();
    }
}

/// Default cap for exhaustive path enumeration.
pub const DEFAULT_PATH_LIMIT: u64 = 1_000_000;
