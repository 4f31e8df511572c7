//! Closed-form response-time bounds for a single DAG job on dedicated
//! processors.
//!
//! All bounds are exact rationals. `vol(pi*)` always refers to the true
//! longest path of the whole DAG, not the longest member of the collection:
//! the envelope argument behind the bounds charges the global maximum.

use crate::collection::{NpcaResult, PathCollection};
use crate::error::{Error, Result};
use crate::task::DagTask;
use crate::time::Time;

/// Preemptive List-FP bound for an n-path collection on `m` processors:
/// `vol(pi*) + vol(complement) / (m - n + 1)`. Requires `n <= m`.
pub fn bound_preemptive(task: &DagTask, collection: &PathCollection, m: usize) -> Result<Time> {
    let n = collection.n();
    if n > m {
        return Err(Error::CollectionTooLarge { n, m });
    }
    let (_, lp) = task.longest_path()?;
    let complement = collection.complement_volume(task);
    Ok(Time::from_integer(lp as i64) + Time::new(complement as i64, (m - n + 1) as i64))
}

/// Non-preemptive List-FP bound: `vol(pi*) + vol(complement) / (m - n)`.
/// The collection may use at most `m - 1` paths, because a non-preemptible
/// collection subjob can block a higher-priority one.
pub fn bound_nonpreemptive(task: &DagTask, collection: &PathCollection, m: usize) -> Result<Time> {
    let n = collection.n();
    if n >= m {
        return Err(Error::CollectionTooLarge { n, m });
    }
    let (_, lp) = task.longest_path()?;
    let complement = collection.complement_volume(task);
    Ok(Time::from_integer(lp as i64) + Time::new(complement as i64, (m - n) as i64))
}

/// Federated-scheduling bound, the one-path special case:
/// `vol(pi*) + (C - vol(pi*)) / m`.
pub fn bound_federated(task: &DagTask, m: usize) -> Result<Time> {
    assert!(m >= 1, "processor count must be at least 1");
    let (_, lp) = task.longest_path()?;
    let rest = task.total_volume() - lp;
    Ok(Time::from_integer(lp as i64) + Time::new(rest as i64, m as i64))
}

/// Lower bound on any schedule's makespan: `max(C / m, vol(pi*))`.
pub fn bound_lower(task: &DagTask, m: usize) -> Result<Time> {
    assert!(m >= 1, "processor count must be at least 1");
    let (_, lp) = task.longest_path()?;
    let by_work = Time::new(task.total_volume() as i64, m as i64);
    Ok(by_work.max(Time::from_integer(lp as i64)))
}

/// Bundle of every bound for one task and processor count, computed with
/// the greedy collection.
#[derive(Debug, Clone)]
pub struct Analysis {
    pub npca: NpcaResult,
    pub preemptive: Time,
    /// Present only when the chosen collection leaves a processor to spare.
    pub nonpreemptive: Option<Time>,
    pub federated: Time,
    pub lower: Time,
    pub m: usize,
}

/// Runs the greedy collection selection and evaluates every bound.
pub fn analyze(task: &DagTask, m: usize) -> Result<Analysis> {
    let npca = crate::collection::npca(task, m)?;
    let preemptive = bound_preemptive(task, &npca.collection, m)?;
    let nonpreemptive = if npca.n_star < m {
        Some(bound_nonpreemptive(task, &npca.collection, m)?)
    } else {
        None
    };
    Ok(Analysis {
        preemptive,
        nonpreemptive,
        federated: bound_federated(task, m)?,
        lower: bound_lower(task, m)?,
        npca,
        m,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::task::fixtures::worked_example;
    use crate::task::Path;
    use crate::time::{frac, time};

    fn collection(task: &DagTask, paths: &[&[usize]]) -> PathCollection {
        PathCollection::new(
            task,
            paths.iter().map(|p| Path::new(p.to_vec())).collect(),
        )
    }

    #[test]
    fn preemptive_bound_on_worked_example() {
        let task = worked_example();
        // Three-path collection leaving {v4, v9} uncovered: 10 + 2/1 = 12.
        let psi = collection(&task, &[&[0, 6, 4, 5], &[0, 6, 7], &[0, 1, 2]]);
        assert_eq!(psi.complement_volume(&task), 2);
        assert_eq!(bound_preemptive(&task, &psi, 3).unwrap(), time(12));
    }

    #[test]
    fn preemptive_bound_full_cover_is_longest_path() {
        let task = worked_example();
        let cover = crate::cover::path_cover(&task).unwrap();
        let psi = PathCollection::new(&task, cover.paths);
        assert_eq!(bound_preemptive(&task, &psi, 4).unwrap(), time(10));
    }

    #[test]
    fn single_longest_path_matches_federated() {
        let task = worked_example();
        let psi = collection(&task, &[&[0, 6, 4, 5]]);
        let single = bound_preemptive(&task, &psi, 3).unwrap();
        assert_eq!(single, time(10) + frac(8, 3));
        assert_eq!(single, bound_federated(&task, 3).unwrap());
    }

    #[test]
    fn nonpreemptive_bound_on_worked_example() {
        let task = worked_example();
        // Two paths, complement {v4, v8, v9} of volume 4: 10 + 4/1 = 14.
        let psi = collection(&task, &[&[0, 6, 4, 5], &[0, 1, 2]]);
        assert_eq!(psi.complement_volume(&task), 4);
        assert_eq!(bound_nonpreemptive(&task, &psi, 3).unwrap(), time(14));
        // Full cover with room to spare collapses to the longest path.
        let full = collection(&task, &[&[0, 6, 4, 5], &[0, 1, 2], &[0, 6, 7], &[0, 3, 4, 8]]);
        assert_eq!(full.complement_volume(&task), 0);
        assert_eq!(bound_nonpreemptive(&task, &full, 5).unwrap(), time(10));
        // n = m violates the precondition.
        assert_eq!(
            bound_nonpreemptive(&task, &psi, 2),
            Err(Error::CollectionTooLarge { n: 2, m: 2 })
        );
    }

    #[test]
    fn federated_bound_examples() {
        let task = worked_example();
        assert_eq!(bound_federated(&task, 3).unwrap(), time(10) + frac(8, 3));
        assert_eq!(bound_federated(&task, 1).unwrap(), time(18));
        let chain = DagTask::new(vec![2, 3], vec![(0, 1)]);
        for m in 1..5 {
            assert_eq!(bound_federated(&chain, m).unwrap(), time(5));
        }
    }

    #[test]
    fn lower_bound_examples() {
        let task = worked_example();
        assert_eq!(bound_lower(&task, 3).unwrap(), time(10));
        assert_eq!(bound_lower(&task, 1).unwrap(), time(18));
        let single = DagTask::new(vec![7], vec![]);
        assert_eq!(bound_lower(&single, 8).unwrap(), time(7));
    }

    #[test]
    fn analysis_on_worked_example() {
        let task = worked_example();
        let analysis = analyze(&task, 3).unwrap();
        assert_eq!(analysis.preemptive, time(12));
        assert_eq!(analysis.federated, time(10) + frac(8, 3));
        assert_eq!(analysis.lower, time(10));
        assert!(analysis.preemptive <= analysis.federated);
        let analysis4 = analyze(&task, 4).unwrap();
        assert_eq!(analysis4.preemptive, time(10));
    }

    /// Sustainability at the formula level: lowering a wcet or raising the
    /// processor count never increases the bounds.
    #[test]
    fn bounds_are_monotone() {
        let task = worked_example();
        let psi = collection(&task, &[&[0, 6, 4, 5], &[0, 1, 2]]);
        let base = bound_preemptive(&task, &psi, 3).unwrap();
        assert!(bound_preemptive(&task, &psi, 4).unwrap() <= base);

        let mut smaller = task.wcets().to_vec();
        smaller[8] = 0; // v9 completes early
        let reduced = DagTask::new(smaller, task.edges().to_vec());
        let psi_r = collection(&reduced, &[&[0, 6, 4, 5], &[0, 1, 2]]);
        assert!(bound_preemptive(&reduced, &psi_r, 3).unwrap() <= base);

        // Non-preemptive dominates preemptive for the same inputs.
        assert!(bound_nonpreemptive(&task, &psi, 3).unwrap() >= base);
    }
}
