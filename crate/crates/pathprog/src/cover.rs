//! Minimum path cover and DAG width.
//!
//! The width of a DAG is the minimum number of paths needed to cover every
//! vertex, which equals the maximum antichain size of the precedence order
//! (Dilworth). The cover is computed by maximum bipartite matching over the
//! *transitive closure* of the edge relation: matching on the raw edge set
//! only yields a chain decomposition of the closure-free order and would
//! overestimate the width.

use crate::error::{Error, Result};
use crate::task::{Adjacency, DagTask, Path, VertexId};

/// A set of source-to-sink paths that jointly cover every vertex, with
/// `paths.len() == width`. Paths may share vertices: the underlying chains
/// are disjoint, but extending a chain to a full path can reuse vertices of
/// other chains.
#[derive(Debug, Clone)]
pub struct PathCover {
    pub paths: Vec<Path>,
    pub width: usize,
}

/// Reachability bitsets: `reach[u]` has bit `v` set iff a non-empty directed
/// path u -> v exists.
pub(crate) struct Closure {
    bits: Vec<Vec<u64>>,
    words: usize,
}

impl Closure {
    pub(crate) fn compute(task: &DagTask, order: &[VertexId], adj: &Adjacency) -> Closure {
        let n = task.vertex_count();
        let words = n.div_ceil(64);
        let mut bits = vec![vec![0u64; words]; n];
        for &v in order.iter().rev() {
            for &s in &adj.succs[v] {
                let (sv, rest) = split_rows(&mut bits, v, s);
                for w in 0..words {
                    sv[w] |= rest[w];
                }
                bits[v][s / 64] |= 1 << (s % 64);
            }
        }
        Closure { bits, words }
    }

    pub(crate) fn reaches(&self, u: VertexId, v: VertexId) -> bool {
        self.bits[u][v / 64] >> (v % 64) & 1 == 1
    }

    pub(crate) fn comparable(&self, u: VertexId, v: VertexId) -> bool {
        self.reaches(u, v) || self.reaches(v, u)
    }

    fn successors(&self, u: VertexId, n: usize) -> impl Iterator<Item = VertexId> + '_ {
        let words = self.words;
        (0..words)
            .flat_map(move |w| {
                let block = self.bits[u][w];
                (0..64).filter_map(move |b| {
                    if block >> b & 1 == 1 {
                        Some(w * 64 + b)
                    } else {
                        None
                    }
                })
            })
            .filter(move |&v| v < n)
    }
}

/// Borrows row `a` mutably and row `b` immutably from the bit matrix.
fn split_rows<'a>(
    bits: &'a mut [Vec<u64>],
    a: usize,
    b: usize,
) -> (&'a mut Vec<u64>, &'a Vec<u64>) {
    assert_ne!(a, b);
    if a < b {
        let (lo, hi) = bits.split_at_mut(b);
        (&mut lo[a], &hi[0])
    } else {
        let (lo, hi) = bits.split_at_mut(a);
        (&mut hi[0], &lo[b])
    }
}

/// Computes the width of the task's DAG and a covering set of full paths.
///
/// Procedure: transitive closure, maximum bipartite matching on the split
/// graph (augmenting paths, rows and columns tried in ascending id order for
/// determinism), chain read-off (`width = |V| - |matching|`), then chain
/// extension to full source-to-sink paths preferring the smallest-id
/// neighbor at every step.
pub fn path_cover(task: &DagTask) -> Result<PathCover> {
    let n = task.vertex_count();
    let order = task.topological_order()?;
    let adj = task.adjacency();
    let closure = Closure::compute(task, &order, &adj);

    // match_right[v] = u chosen as v's chain predecessor; match_left[u] = v.
    let mut match_right: Vec<Option<VertexId>> = vec![None; n];
    let mut match_left: Vec<Option<VertexId>> = vec![None; n];
    let mut visited = vec![false; n];
    for u in 0..n {
        visited.iter_mut().for_each(|x| *x = false);
        augment(
            u,
            n,
            &closure,
            &mut match_right,
            &mut match_left,
            &mut visited,
        );
    }

    let matched = match_left.iter().filter(|m| m.is_some()).count();
    let width = n - matched;

    // Chain heads are vertices that no chain edge enters.
    let mut paths = Vec::with_capacity(width);
    for head in 0..n {
        if match_right[head].is_some() {
            continue;
        }
        let mut chain = vec![head];
        let mut cur = head;
        while let Some(next) = match_left[cur] {
            chain.push(next);
            cur = next;
        }
        paths.push(chain_to_full_path(&chain, &adj, &closure));
    }
    debug_assert_eq!(paths.len(), width);
    Ok(PathCover { paths, width })
}

fn augment(
    u: VertexId,
    n: usize,
    closure: &Closure,
    match_right: &mut Vec<Option<VertexId>>,
    match_left: &mut Vec<Option<VertexId>>,
    visited: &mut Vec<bool>,
) -> bool {
    for v in closure.successors(u, n) {
        if visited[v] {
            continue;
        }
        visited[v] = true;
        if match_right[v].is_none()
            || augment(
                match_right[v].unwrap(),
                n,
                closure,
                match_right,
                match_left,
                visited,
            )
        {
            match_right[v] = Some(u);
            match_left[u] = Some(v);
            return true;
        }
    }
    false
}

/// Expands a closure chain into a real source-to-sink path: interpolates
/// vertices between non-adjacent chain neighbors, then extends both ends.
/// Every choice takes the smallest vertex id among the valid candidates.
fn chain_to_full_path(chain: &[VertexId], adj: &Adjacency, closure: &Closure) -> Path {
    let mut seq: Vec<VertexId> = vec![chain[0]];
    for &target in &chain[1..] {
        let mut cur = *seq.last().unwrap();
        while cur != target {
            let next = adj.succs[cur]
                .iter()
                .copied()
                .find(|&s| s == target || closure.reaches(s, target))
                .expect("chain neighbors are comparable in the closure");
            seq.push(next);
            cur = next;
        }
    }
    let mut front = seq[0];
    while let Some(&p) = adj.preds[front].first() {
        seq.insert(0, p);
        front = p;
    }
    let mut back = *seq.last().unwrap();
    while let Some(&s) = adj.succs[back].first() {
        seq.push(s);
        back = s;
    }
    Path::new(seq)
}

/// Exhaustive maximum-antichain search, the independent oracle for the
/// matching-based width. Fails with [`Error::PathExplosion`] when the subset
/// space `2^|V|` exceeds `limit`.
pub fn max_antichain_bruteforce(task: &DagTask, limit: u64) -> Result<usize> {
    let n = task.vertex_count();
    if n < 128 && (1u128 << n) > limit as u128 {
        return Err(Error::PathExplosion(limit));
    }
    if n >= 128 {
        return Err(Error::PathExplosion(limit));
    }
    let order = task.topological_order()?;
    let adj = task.adjacency();
    let closure = Closure::compute(task, &order, &adj);
    let mut best = 0;
    let mut chosen: Vec<VertexId> = Vec::new();
    branch(0, n, &closure, &mut chosen, &mut best);
    Ok(best)
}

fn branch(
    next: VertexId,
    n: usize,
    closure: &Closure,
    chosen: &mut Vec<VertexId>,
    best: &mut usize,
) {
    if chosen.len() + (n - next) <= *best {
        return; // cannot beat the incumbent
    }
    if next == n {
        *best = (*best).max(chosen.len());
        return;
    }
    if chosen.iter().all(|&c| !closure.comparable(c, next)) {
        chosen.push(next);
        branch(next + 1, n, closure, chosen, best);
        chosen.pop();
    }
    branch(next + 1, n, closure, chosen, best);
}
