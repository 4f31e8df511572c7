//! Reservation over-provisioning experiment: waste ratios of minimal-waste
//! gang and minimal-service ordinary reservation systems over a grid of
//! parallelism, connection probability, and deadline tightness. Processor
//! scarcity is ruled out by searching up to `m = |V|`.

use std::io::Write;

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::experiments::{derive_seed, fmt_prob, Stats};
use crate::generator::{assign_deadline, generate, GenParams};
use crate::reservation::{
    provision_gang, provision_ordinary, waste_ratio, Reservation,
};
use crate::sim::{adversarial_supply, simulate_supply, PriorityAssignment, SupplyPreset};
use crate::time::{fmt4, time, to_f64, Time};

#[derive(Debug, Clone)]
pub struct WasteConfig {
    pub parallelism: Vec<usize>,
    pub conn_prob: Vec<f64>,
    pub rho: Vec<Time>,
    pub min_layers: usize,
    pub max_layers: usize,
    pub samples: usize,
    pub seed: u64,
}

impl Default for WasteConfig {
    /// Parallelism {4,8,16}, connection probability {0.1,0.2,0.3},
    /// deadline tightness rho {1.2,1.4,1.6,1.8}, 5-10 layers, 100 samples
    /// per cell.
    fn default() -> Self {
        WasteConfig {
            parallelism: vec![4, 8, 16],
            conn_prob: vec![0.1, 0.2, 0.3],
            rho: vec![
                Time::new(6, 5),
                Time::new(7, 5),
                Time::new(8, 5),
                Time::new(9, 5),
            ],
            min_layers: 5,
            max_layers: 10,
            samples: 100,
            seed: 1,
        }
    }
}

#[derive(Debug, Clone)]
pub struct WasteRow {
    pub parallelism: usize,
    pub conn_prob: f64,
    pub rho: Time,
    pub sample: usize,
    pub seed: u64,
    pub vertices: usize,
    pub volume: u64,
    pub longest_path: u64,
    /// `None` when the deadline interval was empty (sample excluded).
    pub deadline: Option<u64>,
    /// `(m, n, budget, waste %)` of the feasible gang, when any.
    pub gang: Option<(usize, usize, Time, Time)>,
    /// `(m, n, total service, waste %)` of the feasible ordinary system.
    pub ordinary: Option<(usize, usize, u64, Time)>,
    /// Simulated completion by the deadline under latest-service supply
    /// (`None` when nothing was provisioned).
    pub sim_ok: Option<bool>,
}

#[derive(Debug, Clone)]
pub struct WasteOutcome {
    pub rows: Vec<WasteRow>,
}

pub fn run_waste(config: &WasteConfig) -> Result<WasteOutcome> {
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
    Ok(WasteOutcome { rows })
}

fn run_sample(
    config: &WasteConfig,
    parallelism: usize,
    conn_prob: f64,
    rho: Time,
    sample: usize,
    seed: u64,
) -> Result<WasteRow> {
    let params = GenParams::new(
        parallelism,
        config.min_layers,
        config.max_layers,
        conn_prob,
        seed,
    );
    let task = generate(&params);
    let (_, longest_path) = task.longest_path()?;
    let mut row = WasteRow {
        parallelism,
        conn_prob,
        rho,
        sample,
        seed,
        vertices: task.vertex_count(),
        volume: task.total_volume(),
        longest_path,
        deadline: None,
        gang: None,
        ordinary: None,
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

    // "Enough processors": no pair (m, n) is excluded by scarcity.
    let m_max = task.vertex_count();
    let mut sim_ok = true;
    let mut provisioned = false;
    if let Some(gang) = provision_gang(&task, m_max)? {
        let reservation = Reservation::Gang(gang.reservation.clone());
        let ratio = waste_ratio(&reservation, &task);
        row.gang = Some((gang.reservation.m, gang.reservation.n, gang.reservation.budget, ratio));
        provisioned = true;
        let supply = adversarial_supply(&reservation, SupplyPreset::Latest);
        let priorities = PriorityAssignment::two_level(&task, &gang.collection);
        let trace = simulate_supply(&task, &priorities, &reservation, &supply)?;
        sim_ok &= trace.completed && trace.makespan <= time(deadline);
    }
    if let Some(ord) = provision_ordinary(&task, m_max)? {
        let reservation = Reservation::Ordinary(ord.reservation.clone());
        let ratio = waste_ratio(&reservation, &task);
        row.ordinary = Some((
            ord.reservation.m,
            ord.reservation.n,
            ord.total_service,
            ratio,
        ));
        provisioned = true;
        let supply = adversarial_supply(&reservation, SupplyPreset::Latest);
        let priorities = PriorityAssignment::two_level(&task, &ord.collection);
        let trace = simulate_supply(&task, &priorities, &reservation, &supply)?;
        sim_ok &= trace.completed && trace.makespan <= time(deadline);
    }
    if provisioned {
        row.sim_ok = Some(sim_ok);
    }
    Ok(row)
}

impl WasteOutcome {
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(
            w,
            "parallelism,conn_prob,rho,sample,seed,vertices,volume,longest_path,deadline,\
             gang_m,gang_n,gang_budget,gang_waste_pct,ord_m,ord_n,ord_service,ord_waste_pct,sim_ok"
        )?;
        let opt = |v: Option<String>| v.unwrap_or_default();
        for r in &self.rows {
            writeln!(
                w,
                "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
                r.parallelism,
                fmt_prob(r.conn_prob),
                fmt4(r.rho),
                r.sample,
                r.seed,
                r.vertices,
                r.volume,
                r.longest_path,
                opt(r.deadline.map(|d| d.to_string())),
                opt(r.gang.as_ref().map(|g| g.0.to_string())),
                opt(r.gang.as_ref().map(|g| g.1.to_string())),
                opt(r.gang.as_ref().map(|g| fmt4(g.2))),
                opt(r.gang.as_ref().map(|g| fmt4(g.3))),
                opt(r.ordinary.as_ref().map(|o| o.0.to_string())),
                opt(r.ordinary.as_ref().map(|o| o.1.to_string())),
                opt(r.ordinary.as_ref().map(|o| o.2.to_string())),
                opt(r.ordinary.as_ref().map(|o| fmt4(o.3))),
                opt(r.sim_ok.map(|ok| ok.to_string())),
            )?;
        }
        Ok(())
    }

    /// Waste-ratio statistics `(gang, ordinary)` aggregated per
    /// parallelism level.
    pub fn per_parallelism(&self) -> Vec<(usize, Option<Stats>, Option<Stats>)> {
        let mut levels: Vec<usize> = self.rows.iter().map(|r| r.parallelism).collect();
        levels.sort_unstable();
        levels.dedup();
        levels
            .into_iter()
            .map(|p| {
                let gang: Vec<f64> = self
                    .rows
                    .iter()
                    .filter(|r| r.parallelism == p)
                    .filter_map(|r| r.gang.as_ref().map(|g| to_f64(g.3)))
                    .collect();
                let ord: Vec<f64> = self
                    .rows
                    .iter()
                    .filter(|r| r.parallelism == p)
                    .filter_map(|r| r.ordinary.as_ref().map(|o| to_f64(o.3)))
                    .collect();
                (p, Stats::from_values(&gang), Stats::from_values(&ord))
            })
            .collect()
    }

    pub fn skipped_deadlines(&self) -> usize {
        self.rows.iter().filter(|r| r.deadline.is_none()).count()
    }

    pub fn violations(&self) -> usize {
        self.rows.iter().filter(|r| r.sim_ok == Some(false)).count()
    }

    pub fn summary_table(&self) -> String {
        let mut out =
            String::from("parallelism |  gang mean   min    max   var | ord mean    min    max   var\n");
        for (p, gang, ord) in self.per_parallelism() {
            let cell = |s: Option<Stats>| match s {
                Some(s) => format!(
                    "{:>8.2} {:>5.2} {:>6.2} {:>5.1}",
                    s.mean, s.min, s.max, s.variance
                ),
                None => "      -      -      -     -".to_string(),
            };
            out.push_str(&format!("{:>11} | {} | {}\n", p, cell(gang), cell(ord)));
        }
        out
    }
}
