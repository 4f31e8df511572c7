//! Single-path baseline comparison: total reserved service and reservation
//! counts of the minimal-service ordinary system versus the same search
//! restricted to one path.

use std::io::Write;

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::experiments::{derive_seed, fmt_prob, Stats};
use crate::generator::{assign_deadline, generate, GenParams};
use crate::reservation::{provision_ordinary, provision_uet_baseline, Reservation};
use crate::sim::{adversarial_supply, simulate_supply, PriorityAssignment, SupplyPreset};
use crate::time::{fmt4, percent_of, time, to_f64, Time};

pub type UetConfig = super::WasteConfig;

#[derive(Debug, Clone)]
pub struct UetRow {
    pub parallelism: usize,
    pub conn_prob: f64,
    pub rho: Time,
    pub sample: usize,
    pub seed: u64,
    pub vertices: usize,
    pub deadline: Option<u64>,
    /// `(m, n, total service)` of the multi-path ordinary system.
    pub ours: Option<(usize, usize, u64)>,
    /// `(m, total service)` of the single-path baseline.
    pub baseline: Option<(usize, u64)>,
    /// `ours / baseline * 100`, when both are feasible.
    pub service_ratio_pct: Option<Time>,
    /// Baseline reservation count minus ours, when both are feasible.
    pub size_difference: Option<i64>,
    pub sim_ok: Option<bool>,
}

#[derive(Debug, Clone)]
pub struct UetOutcome {
    pub rows: Vec<UetRow>,
}

pub fn run_uet(config: &UetConfig) -> Result<UetOutcome> {
    assert!(config.samples >= 1 && !config.parallelism.is_empty());
    let mut rows = Vec::new();
    let mut cell = 0u64;
    for &parallelism in &config.parallelism {
        for &conn_prob in &config.conn_prob {
            for &rho in &config.rho {
                for sample in 0..config.samples {
                    let seed = derive_seed(config.seed, cell, sample as u64);
                    rows.push(run_sample(
                        config,
                        parallelism,
                        conn_prob,
                        rho,
                        sample,
                        seed,
                    )?);
                }
                cell += 1;
            }
        }
    }
    Ok(UetOutcome { rows })
}

fn run_sample(
    config: &UetConfig,
    parallelism: usize,
    conn_prob: f64,
    rho: Time,
    sample: usize,
    seed: u64,
) -> Result<UetRow> {
    let params = GenParams::new(
        parallelism,
        config.min_layers,
        config.max_layers,
        conn_prob,
        seed,
    );
    let task = generate(&params);
    let mut row = UetRow {
        parallelism,
        conn_prob,
        rho,
        sample,
        seed,
        vertices: task.vertex_count(),
        deadline: None,
        ours: None,
        baseline: None,
        service_ratio_pct: None,
        size_difference: None,
        sim_ok: None,
    };
    let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, 0xD, 0));
    let task = match assign_deadline(&task, rho, &mut rng) {
        Ok(task) => task,
        Err(crate::Error::EmptyDeadlineInterval) => return Ok(row),
        Err(e) => return Err(e),
    };
    let deadline = task.deadline.expect("just assigned");
    row.deadline = Some(deadline);

    // The single-path baseline may need far more reservations than the
    // graph has vertices, so "enough processors" means searching up to the
    // closed-form count that makes it feasible. Both searches get the same
    // cap: the multi-path space then contains every baseline candidate,
    // which is what makes `ours <= baseline` a hard invariant.
    let m_max = baseline_cap(&task, deadline).max(task.vertex_count());
    let ours = provision_ordinary(&task, m_max)?;
    let baseline = provision_uet_baseline(&task, m_max)?;
    if let Some(ours) = &ours {
        row.ours = Some((
            ours.reservation.m,
            ours.reservation.n,
            ours.total_service,
        ));
        let reservation = Reservation::Ordinary(ours.reservation.clone());
        let supply = adversarial_supply(&reservation, SupplyPreset::Latest);
        let priorities = PriorityAssignment::two_level(&task, &ours.collection);
        let trace = simulate_supply(&task, &priorities, &reservation, &supply)?;
        row.sim_ok = Some(trace.completed && trace.makespan <= time(deadline));
    }
    if let Some(baseline) = &baseline {
        row.baseline = Some((baseline.reservation.m, baseline.total_service));
    }
    if let (Some(ours), Some(baseline)) = (&ours, &baseline) {
        row.service_ratio_pct = Some(percent_of(
            time(ours.total_service),
            time(baseline.total_service),
        ));
        row.size_difference =
            Some(baseline.reservation.m as i64 - ours.reservation.m as i64);
    }
    Ok(row)
}

/// Smallest reservation count that can make the single-path search
/// feasible: the first `m` with `m * (D - xi[1]) > C - xi[1]`, since the
/// baseline's total service `m * xi[1] + (C - xi[1])` must stay strictly
/// below `m * D`.
fn baseline_cap(task: &crate::DagTask, deadline: u64) -> usize {
    let (_, lp) = task.longest_path().expect("validated task");
    let c = task.total_volume();
    if deadline <= lp || c == lp {
        return 1; // infeasible for every m; let the search report that
    }
    let m_min = (c - lp) / (deadline - lp) + 1;
    (m_min as usize).max(task.vertex_count())
}

impl UetOutcome {
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(
            w,
            "parallelism,conn_prob,rho,sample,seed,vertices,deadline,our_m,our_n,our_service,\
             uet_m,uet_service,service_ratio_pct,size_difference,sim_ok"
        )?;
        let opt = |v: Option<String>| v.unwrap_or_default();
        for r in &self.rows {
            writeln!(
                w,
                "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
                r.parallelism,
                fmt_prob(r.conn_prob),
                fmt4(r.rho),
                r.sample,
                r.seed,
                r.vertices,
                opt(r.deadline.map(|d| d.to_string())),
                opt(r.ours.as_ref().map(|o| o.0.to_string())),
                opt(r.ours.as_ref().map(|o| o.1.to_string())),
                opt(r.ours.as_ref().map(|o| o.2.to_string())),
                opt(r.baseline.as_ref().map(|b| b.0.to_string())),
                opt(r.baseline.as_ref().map(|b| b.1.to_string())),
                opt(r.service_ratio_pct.map(fmt4)),
                opt(r.size_difference.map(|d| d.to_string())),
                opt(r.sim_ok.map(|ok| ok.to_string())),
            )?;
        }
        Ok(())
    }

    /// Per-parallelism service-ratio and size-difference statistics over
    /// samples where both systems are feasible.
    pub fn per_parallelism(&self) -> Vec<(usize, Option<Stats>, Option<Stats>)> {
        let mut levels: Vec<usize> = self.rows.iter().map(|r| r.parallelism).collect();
        levels.sort_unstable();
        levels.dedup();
        levels
            .into_iter()
            .map(|p| {
                let ratios: Vec<f64> = self
                    .rows
                    .iter()
                    .filter(|r| r.parallelism == p)
                    .filter_map(|r| r.service_ratio_pct.map(to_f64))
                    .collect();
                let diffs: Vec<f64> = self
                    .rows
                    .iter()
                    .filter(|r| r.parallelism == p)
                    .filter_map(|r| r.size_difference.map(|d| d as f64))
                    .collect();
                (p, Stats::from_values(&ratios), Stats::from_values(&diffs))
            })
            .collect()
    }

    /// Samples where the baseline found no feasible system but the
    /// multi-path search did.
    pub fn baseline_only_infeasible(&self) -> usize {
        self.rows
            .iter()
            .filter(|r| r.ours.is_some() && r.baseline.is_none())
            .count()
    }

    pub fn violations(&self) -> usize {
        self.rows.iter().filter(|r| r.sim_ok == Some(false)).count()
    }

    pub fn summary_table(&self) -> String {
        let mut out = String::from(
            "parallelism | service ratio %: mean median | size diff: min mean max\n",
        );
        for (p, ratio, diff) in self.per_parallelism() {
            match (ratio, diff) {
                (Some(r), Some(d)) => out.push_str(&format!(
                    "{:>11} | {:>21.2} {:>6.2} | {:>14.0} {:>4.1} {:>3.0}\n",
                    p, r.mean, r.median, d.min, d.mean, d.max
                )),
                _ => out.push_str(&format!("{:>11} | no feasible pairs\n", p)),
            }
        }
        out
    }
}
