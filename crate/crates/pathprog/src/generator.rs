//! Layer-by-layer random DAG generation.
//!
//! The layer count is drawn uniformly from `[min_layers, max_layers]`, each
//! layer holds between 1 and `parallelism` subtasks, and a subtask connects
//! to each subtask of the previous layer with the connection probability
//! (independent draws). A subtask that ends up with no predecessor gets one
//! forced at random, so deep layers keep their depth instead of degenerating
//! into extra sources. Wcets are uniform integers from `wcet_range`.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::task::DagTask;
use crate::time::Time;

/// Name of the PRNG used for generation, recorded in experiment output.
pub const RNG_ALGORITHM: &str = "chacha8";

/// Parameters of the layered generation process.
#[derive(Debug, Clone, PartialEq)]
pub struct GenParams {
    /// Maximum number of subtasks per layer (at least 1).
    pub parallelism: usize,
    pub min_layers: usize,
    pub max_layers: usize,
    /// Probability of an edge from each previous-layer subtask.
    pub connection_probability: f64,
    /// Inclusive wcet range; the customary range is `(1, 100)`.
    pub wcet_range: (u64, u64),
    pub seed: u64,
}

impl GenParams {
    pub fn new(
        parallelism: usize,
        min_layers: usize,
        max_layers: usize,
        connection_probability: f64,
        seed: u64,
    ) -> Self {
        GenParams {
            parallelism,
            min_layers,
            max_layers,
            connection_probability,
            wcet_range: (1, 100),
            seed,
        }
    }

    fn check(&self) {
        assert!(self.parallelism >= 1, "parallelism must be at least 1");
        assert!(self.min_layers >= 1 && self.min_layers <= self.max_layers);
        assert!((0.0..=1.0).contains(&self.connection_probability));
        assert!(self.wcet_range.0 <= self.wcet_range.1);
    }
}

/// Generates a task (without deadline or period). Identical parameters and
/// seed always produce the identical task.
pub fn generate(params: &GenParams) -> DagTask {
    generate_layered(params).0
}

/// As [`generate`], additionally returning the layer index of each vertex.
pub(crate) fn generate_layered(params: &GenParams) -> (DagTask, Vec<usize>) {
    params.check();
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let layer_count = rng.gen_range(params.min_layers..=params.max_layers);

    let mut wcet: Vec<u64> = Vec::new();
    let mut edges: Vec<(usize, usize)> = Vec::new();
    let mut layer_of: Vec<usize> = Vec::new();
    let mut previous: Vec<usize> = Vec::new();
    for layer in 0..layer_count {
        let count = rng.gen_range(1..=params.parallelism);
        let mut current = Vec::with_capacity(count);
        for _ in 0..count {
            let v = wcet.len();
            wcet.push(rng.gen_range(params.wcet_range.0..=params.wcet_range.1));
            layer_of.push(layer);
            if layer > 0 {
                let mut connected = false;
                for &u in &previous {
                    if rng.gen_bool(params.connection_probability) {
                        edges.push((u, v));
                        connected = true;
                    }
                }
                if !connected {
                    let u = previous[rng.gen_range(0..previous.len())];
                    edges.push((u, v));
                }
            }
            current.push(v);
        }
        previous = current;
    }
    (DagTask::new(wcet, edges), layer_of)
}

/// Draws an integer deadline uniformly from the open interval
/// `(vol(pi*), min(rho * vol(pi*), C))` and sets the period equal to it.
pub fn assign_deadline(task: &DagTask, rho: Time, rng: &mut impl Rng) -> Result<DagTask> {
    let (_, lp) = task.longest_path()?;
    let upper = (rho * Time::from_integer(lp as i64))
        .min(Time::from_integer(task.total_volume() as i64));
    let lo = lp + 1;
    // Largest integer strictly below `upper`.
    let hi = if upper.is_integer() {
        upper.to_integer() - 1
    } else {
        upper.floor().to_integer()
    };
    if hi < 0 || (hi as u64) < lo {
        return Err(Error::EmptyDeadlineInterval);
    }
    let deadline = rng.gen_range(lo..=hi as u64);
    Ok(task.clone().with_deadline(deadline, deadline))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cover::path_cover;
    use crate::task::fixtures::worked_example;
    use crate::time::parse_decimal;

    #[test]
    fn forced_chain() {
        let params = GenParams::new(1, 3, 3, 1.0, 7);
        let task = generate(&params);
        assert_eq!(task.vertex_count(), 3);
        assert_eq!(task.edges(), &[(0, 1), (1, 2)]);
    }

    #[test]
    fn single_layer_is_isolated() {
        for seed in 0..20 {
            let params = GenParams::new(5, 1, 1, 0.5, seed);
            let task = generate(&params);
            assert!(task.edges().is_empty());
            assert_eq!(
                path_cover(&task).unwrap().width,
                task.vertex_count(),
                "isolated vertices are mutually incomparable"
            );
        }
    }

    #[test]
    fn generated_tasks_validate_and_stay_layered() {
        for seed in 0..100 {
            let params = GenParams::new(8, 5, 10, 0.2, seed);
            let (task, layer_of) = generate_layered(&params);
            task.validate().unwrap();
            for &(u, v) in task.edges() {
                assert_eq!(layer_of[u] + 1, layer_of[v], "edges join adjacent layers");
            }
            let adj = task.adjacency();
            for v in task.vertices() {
                if layer_of[v] > 0 {
                    assert!(!adj.preds[v].is_empty(), "forced predecessor rule");
                }
            }
            for &w in task.wcets() {
                assert!((1..=100).contains(&w));
            }
        }
    }

    #[test]
    fn same_seed_reproduces() {
        let params = GenParams::new(8, 5, 10, 0.2, 99);
        assert_eq!(generate(&params), generate(&params));
        let other = GenParams { seed: 100, ..params };
        assert_ne!(generate(&params), generate(&other));
    }

    #[test]
    fn deadline_interval_of_worked_example() {
        // vol(pi*) = 10, C = 18, rho = 1.6: D uniform in {11, ..., 15}.
        let task = worked_example();
        let rho = parse_decimal("1.6").unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let mut seen = std::collections::BTreeSet::new();
        for _ in 0..200 {
            let d = assign_deadline(&task, rho, &mut rng).unwrap();
            let deadline = d.deadline.unwrap();
            assert_eq!(d.period, Some(deadline));
            seen.insert(deadline);
        }
        assert_eq!(
            seen.into_iter().collect::<Vec<_>>(),
            vec![11, 12, 13, 14, 15]
        );
    }

    #[test]
    fn empty_deadline_intervals() {
        let task = worked_example();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        // rho so close to 1 that no integer fits below rho * 10 = 10.5.
        let rho = parse_decimal("1.05").unwrap();
        assert_eq!(
            assign_deadline(&task, rho, &mut rng),
            Err(Error::EmptyDeadlineInterval)
        );
        // A chain has C = vol(pi*), so the open interval is always empty.
        let chain = DagTask::new(vec![2, 3], vec![(0, 1)]);
        let rho = parse_decimal("1.8").unwrap();
        assert_eq!(
            assign_deadline(&chain, rho, &mut rng),
            Err(Error::EmptyDeadlineInterval)
        );
    }
}
