//! Randomized invariant validation: simulated makespans against the
//! analytic bounds, width duality, and reservation completion under
//! adversarial supply. Any violation is an implementation or analysis bug.

use std::io::Write;

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::bounds::{bound_nonpreemptive, bound_preemptive};
use crate::collection::{npca, random_collection};
use crate::cover::{max_antichain_bruteforce, path_cover};
use crate::error::Result;
use crate::experiments::derive_seed;
use crate::generator::{assign_deadline, generate, GenParams};
use crate::reservation::{provision_gang, provision_ordinary, Reservation};
use crate::sim::{
    adversarial_supply, simulate_dedicated, simulate_supply, verify_schedule, Mode,
    PriorityAssignment, SupplyPreset,
};
use crate::time::{time, Time};

#[derive(Debug, Clone)]
pub struct ValidateConfig {
    /// Instances per check family.
    pub instances: usize,
    pub seed: u64,
}

impl Default for ValidateConfig {
    fn default() -> Self {
        ValidateConfig {
            instances: 200,
            seed: 1,
        }
    }
}

#[derive(Debug, Clone)]
pub struct ValidateRow {
    pub family: &'static str,
    pub seed: u64,
    pub ok: bool,
    pub detail: String,
}

#[derive(Debug, Clone)]
pub struct ValidateOutcome {
    pub rows: Vec<ValidateRow>,
    pub checks: usize,
}

impl ValidateOutcome {
    pub fn violations(&self) -> Vec<&ValidateRow> {
        self.rows.iter().filter(|r| !r.ok).collect()
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "family,seed,ok,detail")?;
        for r in &self.rows {
            writeln!(w, "{},{},{},{}", r.family, r.seed, r.ok, r.detail)?;
        }
        Ok(())
    }
}

pub fn run_validate(config: &ValidateConfig) -> Result<ValidateOutcome> {
    let mut rows = Vec::new();
    let mut checks = 0usize;
    bound_soundness(config, &mut rows, &mut checks)?;
    width_duality(config, &mut rows, &mut checks)?;
    reservation_completion(config, &mut rows, &mut checks)?;
    Ok(ValidateOutcome { rows, checks })
}

/// Simulated makespan of greedy and random collections against the
/// preemptive / non-preemptive bounds, plus trace-level re-verification.
fn bound_soundness(
    config: &ValidateConfig,
    rows: &mut Vec<ValidateRow>,
    checks: &mut usize,
) -> Result<()> {
    let parallelism = [2usize, 4, 8, 16, 20];
    let probs = [0.2, 0.6, 0.8];
    let procs = [2usize, 4, 8, 16];
    for i in 0..config.instances {
        let seed = derive_seed(config.seed, 0xB0, i as u64);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let params = GenParams::new(
            parallelism[rng.gen_range(0..parallelism.len())],
            2,
            8,
            probs[rng.gen_range(0..probs.len())],
            rng.gen(),
        );
        let task = generate(&params);
        let m = procs[rng.gen_range(0..procs.len())];
        let collection = if rng.gen_bool(0.5) {
            npca(&task, m)?.collection
        } else {
            random_collection(&task, m, &mut rng)?
        };
        let priorities = PriorityAssignment::two_level(&task, &collection);

        let bound = bound_preemptive(&task, &collection, m)?;
        let trace = simulate_dedicated(&task, &priorities, m, Mode::Preemptive, None)?;
        *checks += 1;
        let mut ok = trace.completed && trace.makespan <= bound;
        let mut detail = format!(
            "preemptive makespan {} vs bound {} (m={} n={})",
            trace.makespan,
            bound,
            m,
            collection.n()
        );
        if let Err(e) = verify_schedule(&task, &trace, None, None) {
            ok = false;
            detail = e;
        }
        if collection.n() < m {
            let bound_np = bound_nonpreemptive(&task, &collection, m)?;
            let trace_np =
                simulate_dedicated(&task, &priorities, m, Mode::NonPreemptive, None)?;
            *checks += 1;
            if !(trace_np.completed && trace_np.makespan <= bound_np) {
                ok = false;
                detail = format!(
                    "non-preemptive makespan {} vs bound {}",
                    trace_np.makespan, bound_np
                );
            }
        }
        rows.push(ValidateRow {
            family: "bound-soundness",
            seed,
            ok,
            detail,
        });
    }
    Ok(())
}

/// Matching-based width against the exhaustive antichain oracle on small
/// graphs.
fn width_duality(
    config: &ValidateConfig,
    rows: &mut Vec<ValidateRow>,
    checks: &mut usize,
) -> Result<()> {
    for i in 0..config.instances {
        let seed = derive_seed(config.seed, 0xD1, i as u64);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let params = GenParams::new(
            rng.gen_range(1..=3),
            2,
            5,
            [0.15, 0.4, 0.8][rng.gen_range(0..3)],
            rng.gen(),
        );
        let task = generate(&params);
        if task.vertex_count() > 14 {
            continue;
        }
        let width = path_cover(&task)?.width;
        let oracle = max_antichain_bruteforce(&task, 1 << 20)?;
        *checks += 1;
        rows.push(ValidateRow {
            family: "width-duality",
            seed,
            ok: width == oracle,
            detail: format!("width {} vs antichain {}", width, oracle),
        });
    }
    Ok(())
}

/// Provisioned reservations must finish the job by the deadline under
/// every adversarial supply preset.
fn reservation_completion(
    config: &ValidateConfig,
    rows: &mut Vec<ValidateRow>,
    checks: &mut usize,
) -> Result<()> {
    for i in 0..config.instances {
        let seed = derive_seed(config.seed, 0x5E, i as u64);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let params = GenParams::new(
            [4usize, 8, 16][rng.gen_range(0..3)],
            5,
            10,
            [0.1, 0.2, 0.3][rng.gen_range(0..3)],
            rng.gen(),
        );
        let task = generate(&params);
        let rho = Time::new(rng.gen_range(11..=18), 10);
        let task = match assign_deadline(&task, rho, &mut rng) {
            Ok(task) => task,
            Err(crate::Error::EmptyDeadlineInterval) => continue,
            Err(e) => return Err(e),
        };
        let deadline = task.deadline.unwrap();
        let m_max = task.vertex_count();
        let mut systems: Vec<(Reservation, crate::collection::PathCollection)> = Vec::new();
        if let Some(g) = provision_gang(&task, m_max)? {
            systems.push((Reservation::Gang(g.reservation), g.collection));
        }
        if let Some(o) = provision_ordinary(&task, m_max)? {
            systems.push((Reservation::Ordinary(o.reservation), o.collection));
        }
        for (reservation, collection) in systems {
            let priorities = PriorityAssignment::two_level(&task, &collection);
            for preset in [
                SupplyPreset::Latest,
                SupplyPreset::Fragmented,
                SupplyPreset::Random(rng.gen()),
            ] {
                let supply = adversarial_supply(&reservation, preset);
                let trace = simulate_supply(&task, &priorities, &reservation, &supply)?;
                *checks += 1;
                let ok = trace.completed && trace.makespan <= time(deadline);
                rows.push(ValidateRow {
                    family: "reservation-completion",
                    seed,
                    ok,
                    detail: format!(
                        "{} m={} finish {} deadline {}",
                        reservation.kind(),
                        reservation.m(),
                        trace.makespan,
                        deadline
                    ),
                });
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_validation_run_is_clean() {
        let outcome = run_validate(&ValidateConfig {
            instances: 10,
            seed: 2,
        })
        .unwrap();
        assert!(outcome.checks > 0);
        assert!(
            outcome.violations().is_empty(),
            "violations: {:?}",
            outcome.violations()
        );
    }
}
