//! Shared fixtures for the integration suites.

use pathprog::collection::PathCollection;
use pathprog::{DagTask, Path};

/// The nine-vertex worked example: wcets 3,3,1,1,2,3,2,2,1, nine edges,
/// longest path (v0, v6, v4, v5) of volume 10, total volume 18, width 4,
/// exactly six source-to-sink paths.
pub fn worked_example() -> DagTask {
    DagTask::new(
        vec![3, 3, 1, 1, 2, 3, 2, 2, 1],
        vec![
            (0, 1),
            (1, 2),
            (0, 3),
            (3, 4),
            (4, 5),
            (0, 6),
            (6, 7),
            (6, 4),
            (4, 8),
        ],
    )
}

/// The three-path collection used in the worked schedule: the longest path,
/// (v0, v6, v7), and (v0, v1, v2); complement {v3, v8} of volume 2.
pub fn three_path_collection(task: &DagTask) -> PathCollection {
    PathCollection::new(
        task,
        vec![
            Path::new(vec![0, 6, 4, 5]),
            Path::new(vec![0, 6, 7]),
            Path::new(vec![0, 1, 2]),
        ],
    )
}
