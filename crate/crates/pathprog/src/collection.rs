//! Path collections and their selection.
//!
//! An n-path collection is a set of n source-to-sink paths; its covered
//! vertex set drives the response-time bounds. Selection is done either by
//! the greedy approximation (`npca`) or, for small instances, by exhaustive
//! search over all path subsets (`optimal_collection_bruteforce`), which
//! serves as the oracle for the approximation guarantee.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;

use crate::cover::path_cover;
use crate::error::{Error, Result};
use crate::task::{DagTask, Path, VertexId};
use crate::time::Time;

/// An ordered set of source-to-sink paths together with its covered vertex
/// set. The complement (vertices on no selected path) is what the bounds
/// charge as interference.
#[derive(Debug, Clone)]
pub struct PathCollection {
    paths: Vec<Path>,
    covered: Vec<bool>,
    covered_volume: u64,
}

impl PathCollection {
    pub fn new(task: &DagTask, paths: Vec<Path>) -> Self {
        let mut covered = vec![false; task.vertex_count()];
        for p in &paths {
            for &v in p.vertices() {
                covered[v] = true;
            }
        }
        let covered_volume = covered
            .iter()
            .enumerate()
            .filter(|(_, &c)| c)
            .map(|(v, _)| task.wcet(v))
            .sum();
        PathCollection {
            paths,
            covered,
            covered_volume,
        }
    }

    /// Number of paths `n` in the collection.
    pub fn n(&self) -> usize {
        self.paths.len()
    }

    pub fn paths(&self) -> &[Path] {
        &self.paths
    }

    pub fn is_covered(&self, v: VertexId) -> bool {
        self.covered[v]
    }

    /// Vertices on at least one selected path, ascending.
    pub fn covered(&self) -> impl Iterator<Item = VertexId> + '_ {
        self.covered
            .iter()
            .enumerate()
            .filter(|(_, &c)| c)
            .map(|(v, _)| v)
    }

    /// Vertices on no selected path, ascending.
    pub fn complement(&self) -> impl Iterator<Item = VertexId> + '_ {
        self.covered
            .iter()
            .enumerate()
            .filter(|(_, &c)| !c)
            .map(|(v, _)| v)
    }

    /// Volume of the covered set (each vertex counted once).
    pub fn covered_volume(&self) -> u64 {
        self.covered_volume
    }

    /// Volume of the complement set.
    pub fn complement_volume(&self, task: &DagTask) -> u64 {
        task.total_volume() - self.covered_volume
    }
}

/// Result of the greedy n-path-collection approximation.
#[derive(Debug, Clone)]
pub struct NpcaResult {
    /// The selected collection (the first `n_star` greedy paths, or the
    /// whole path cover when the processor count reaches the width).
    pub collection: PathCollection,
    /// Number of paths in the selected collection.
    pub n_star: usize,
    /// `xi[k]` is the covered volume after the first `k + 1` paths
    /// (1-indexed as xi[n] in the objective below).
    pub xi: Vec<u64>,
    /// Minimized objective `(C - xi[n*]) / (M - n* + 1)`, the complement
    /// interference term of the preemptive bound.
    pub objective: Time,
    /// Width of the DAG, as computed by the path cover.
    pub width: usize,
}

/// Greedy n-path-collection approximation on `m` processors.
///
/// If the width `w` fits within `m`, the path cover itself is the collection
/// and the complement is empty. Otherwise up to `m` greedy rounds each pick
/// the maximum-volume path under a wcet map that zeroes already covered
/// vertices, and the round whose objective `(C - xi[n]) / (m - n + 1)` is
/// the strict minimum wins; ties therefore prefer fewer paths. Rounds stop
/// early once the residual longest path has volume zero.
pub fn npca(task: &DagTask, m: usize) -> Result<NpcaResult> {
    assert!(m >= 1, "processor count must be at least 1");
    let total = task.total_volume();
    let cover = path_cover(task)?;
    if cover.width <= m {
        let n_star = cover.width;
        let collection = PathCollection::new(task, cover.paths);
        let xi = prefix_union_volumes(task, collection.paths());
        let objective = Time::new(
            (total - collection.covered_volume()) as i64,
            (m - n_star + 1) as i64,
        );
        return Ok(NpcaResult {
            collection,
            n_star,
            xi,
            objective,
            width: cover.width,
        });
    }

    let mut residual = task.wcets().to_vec();
    let mut chosen: Vec<Path> = Vec::new();
    let mut xi: Vec<u64> = Vec::new();
    let mut covered_volume = 0u64;
    let mut best: Option<(usize, Time)> = None;
    for n in 1..=m {
        let (path, gain) = task.longest_path_with(&residual)?;
        if gain == 0 {
            break;
        }
        for &v in path.vertices() {
            residual[v] = 0;
        }
        covered_volume += gain;
        xi.push(covered_volume);
        chosen.push(path);
        let objective = Time::new((total - covered_volume) as i64, (m - n + 1) as i64);
        if best.as_ref().map_or(true, |(_, z)| objective < *z) {
            best = Some((n, objective));
        }
    }
    let (n_star, objective) = best.expect("at least one greedy round ran");
    let collection = PathCollection::new(task, chosen[..n_star].to_vec());
    Ok(NpcaResult {
        collection,
        n_star,
        xi,
        objective,
        width: cover.width,
    })
}

/// Covered volume of each prefix of `paths` (vertices counted once).
fn prefix_union_volumes(task: &DagTask, paths: &[Path]) -> Vec<u64> {
    let mut covered = vec![false; task.vertex_count()];
    let mut acc = 0u64;
    let mut out = Vec::with_capacity(paths.len());
    for p in paths {
        for &v in p.vertices() {
            if !covered[v] {
                covered[v] = true;
                acc += task.wcet(v);
            }
        }
        out.push(acc);
    }
    out
}

/// A collection found by exhaustive search, with the preemptive bound it
/// achieves.
#[derive(Debug, Clone)]
pub struct OptimalCollection {
    pub collection: PathCollection,
    pub bound: Time,
}

/// Exhaustively searches all collections of at most `m` paths for the one
/// minimizing the preemptive bound `vol(pi*) + vol(complement)/(m - n + 1)`.
/// Oracle-only: both path enumeration and the subset count are capped by
/// `limit`.
pub fn optimal_collection_bruteforce(
    task: &DagTask,
    m: usize,
    limit: u64,
) -> Result<OptimalCollection> {
    assert!(m >= 1, "processor count must be at least 1");
    let paths = task.enumerate_paths(limit)?;
    let (_, lp_volume) = task.longest_path()?;
    let max_n = m.min(paths.len());

    let mut combos: u128 = 0;
    for n in 1..=max_n {
        combos = combos.saturating_add(binomial(paths.len() as u128, n as u128));
    }
    if combos > limit as u128 {
        return Err(Error::PathExplosion(limit));
    }

    let mut best: Option<(Vec<usize>, Time)> = None;
    let mut indices: Vec<usize> = Vec::new();
    for n in 1..=max_n {
        search_subsets(task, &paths, lp_volume, m, n, 0, &mut indices, &mut best);
    }
    let (idx, bound) = best.expect("n >= 1 subsets exist");
    let collection = PathCollection::new(task, idx.iter().map(|&i| paths[i].clone()).collect());
    Ok(OptimalCollection { collection, bound })
}

#[allow(clippy::too_many_arguments)]
fn search_subsets(
    task: &DagTask,
    paths: &[Path],
    lp_volume: u64,
    m: usize,
    n: usize,
    from: usize,
    indices: &mut Vec<usize>,
    best: &mut Option<(Vec<usize>, Time)>,
) {
    if indices.len() == n {
        let mut covered = vec![false; task.vertex_count()];
        for &i in indices.iter() {
            for &v in paths[i].vertices() {
                covered[v] = true;
            }
        }
        let complement: u64 = (0..task.vertex_count())
            .filter(|&v| !covered[v])
            .map(|v| task.wcet(v))
            .sum();
        let bound = Time::from_integer(lp_volume as i64)
            + Time::new(complement as i64, (m - n + 1) as i64);
        if best.as_ref().map_or(true, |(_, b)| bound < *b) {
            *best = Some((indices.clone(), bound));
        }
        return;
    }
    for i in from..paths.len() {
        indices.push(i);
        search_subsets(task, paths, lp_volume, m, n, i + 1, indices, best);
        indices.pop();
    }
}

fn binomial(n: u128, k: u128) -> u128 {
    if k > n {
        return 0;
    }
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc.saturating_mul(n - i) / (i + 1);
    }
    acc
}

/// Draws a collection of up to `n_max` distinct random source-to-sink paths
/// (random walks from a random source). Used by randomized validation runs;
/// any collection is admissible for the bounds, optimal or not.
pub fn random_collection(
    task: &DagTask,
    n_max: usize,
    rng: &mut impl rand::Rng,
) -> Result<PathCollection> {
    assert!(n_max >= 1);
    let adj = task.adjacency();
    let sources: Vec<VertexId> = task
        .vertices()
        .filter(|&v| adj.preds[v].is_empty())
        .collect();
    if sources.is_empty() {
        return Err(Error::CyclicGraph);
    }
    let mut paths: Vec<Path> = Vec::new();
    let target = rng.gen_range(1..=n_max);
    for _ in 0..(4 * n_max) {
        if paths.len() == target {
            break;
        }
        let mut v = sources[rng.gen_range(0..sources.len())];
        let mut seq = vec![v];
        while !adj.succs[v].is_empty() {
            v = adj.succs[v][rng.gen_range(0..adj.succs[v].len())];
            seq.push(v);
        }
        let path = Path::new(seq);
        if !paths.contains(&path) {
            paths.push(path);
        }
    }
    Ok(PathCollection::new(task, paths))
}

/// Approximation-ratio guarantee of the greedy collection: `1` when the
/// processor count reaches the width, otherwise the best of the per-round
/// guarantees `1 + M/(M - n + 1) * (1 - 1/w)^n` over the rounds
/// `n = 1..n*` that demonstrably ran. The kept solution's objective is the
/// minimum over all probed rounds, so each round's guarantee applies; the
/// round `n = 1` already gives `2 - 1/w`, which the result never exceeds.
pub fn approximation_ratio_bound(width: usize, m: usize, n_star: usize) -> BigRational {
    assert!(width >= 1 && m >= 1);
    if m >= width {
        return BigRational::one();
    }
    assert!((1..=m).contains(&n_star));
    let big = |x: usize| BigRational::from_integer(BigInt::from(x));
    let per_round = |n: usize| {
        let shrink = (big(width - 1) / big(width)).pow(n as i32);
        BigRational::one() + big(m) / big(m - n + 1) * shrink
    };
    let ratio = (1..=n_star).map(per_round).min().expect("n* >= 1");
    let cap = big(2) - BigRational::one() / big(width);
    assert!(ratio <= cap, "greedy ratio must stay below 2 - 1/w");
    ratio
}
