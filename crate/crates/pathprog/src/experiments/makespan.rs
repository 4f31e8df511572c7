//! Makespan experiment: relative response-time bounds of the greedy
//! collection versus the federated baseline, normalized to the lower bound
//! `max(C/M, vol(pi*))`, with one simulation per sample confirming the
//! bound empirically.

use std::io::Write;

use crate::bounds;
use crate::error::Result;
use crate::experiments::{derive_seed, fmt_prob, Stats};
use crate::generator::{generate, GenParams};
use crate::sim::{simulate_dedicated, Mode, PriorityAssignment};
use crate::time::{fmt4, percent_of, to_f64, Time};

#[derive(Debug, Clone)]
pub struct MakespanConfig {
    pub parallelism: Vec<usize>,
    pub conn_prob: Vec<f64>,
    pub procs: Vec<usize>,
    pub min_layers: usize,
    pub max_layers: usize,
    pub samples: usize,
    pub seed: u64,
}

impl Default for MakespanConfig {
    /// The customary grid: parallelism {2,4,8,16,20}, connection
    /// probability {0.2, 0.6, 0.8}, processors {2,4,8,16}, 5-10 layers,
    /// 100 samples per cell.
    fn default() -> Self {
        MakespanConfig {
            parallelism: vec![2, 4, 8, 16, 20],
            conn_prob: vec![0.2, 0.6, 0.8],
            procs: vec![2, 4, 8, 16],
            min_layers: 5,
            max_layers: 10,
            samples: 100,
            seed: 1,
        }
    }
}

#[derive(Debug, Clone)]
pub struct MakespanRow {
    pub parallelism: usize,
    pub conn_prob: f64,
    pub procs: usize,
    pub sample: usize,
    pub seed: u64,
    pub vertices: usize,
    pub width: usize,
    pub n_star: usize,
    pub volume: u64,
    pub longest_path: u64,
    pub lower: Time,
    pub our: Time,
    pub federated: Time,
    pub rel_our: Time,
    pub rel_federated: Time,
    pub sim_makespan: Time,
    pub sim_ok: bool,
}

#[derive(Debug, Clone)]
pub struct MakespanOutcome {
    pub rows: Vec<MakespanRow>,
}

pub fn run_makespan(config: &MakespanConfig) -> Result<MakespanOutcome> {
    assert!(config.samples >= 1 && !config.parallelism.is_empty());
    let mut rows = Vec::new();
    let mut cell = 0u64;
    for &parallelism in &config.parallelism {
        for &conn_prob in &config.conn_prob {
            for &procs in &config.procs {
                for sample in 0..config.samples {
                    let seed = derive_seed(config.seed, cell, sample as u64);
                    rows.push(run_sample(
                        config,
                        parallelism,
                        conn_prob,
                        procs,
                        sample,
                        seed,
                    )?);
                }
                cell += 1;
            }
        }
    }
    Ok(MakespanOutcome { rows })
}

fn run_sample(
    config: &MakespanConfig,
    parallelism: usize,
    conn_prob: f64,
    procs: usize,
    sample: usize,
    seed: u64,
) -> Result<MakespanRow> {
    let params = GenParams::new(
        parallelism,
        config.min_layers,
        config.max_layers,
        conn_prob,
        seed,
    );
    let task = generate(&params);
    let analysis = bounds::analyze(&task, procs)?;
    let rel_our = percent_of(analysis.preemptive, analysis.lower);
    let rel_federated = percent_of(analysis.federated, analysis.lower);
    let priorities = PriorityAssignment::two_level(&task, &analysis.npca.collection);
    let trace = simulate_dedicated(&task, &priorities, procs, Mode::Preemptive, None)?;
    let sim_ok = trace.completed && trace.makespan <= analysis.preemptive;
    Ok(MakespanRow {
        parallelism,
        conn_prob,
        procs,
        sample,
        seed,
        vertices: task.vertex_count(),
        width: analysis.npca.width,
        n_star: analysis.npca.n_star,
        volume: task.total_volume(),
        longest_path: task.longest_path()?.1,
        lower: analysis.lower,
        our: analysis.preemptive,
        federated: analysis.federated,
        rel_our,
        rel_federated,
        sim_makespan: trace.makespan,
        sim_ok,
    })
}

impl MakespanOutcome {
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(
            w,
            "parallelism,conn_prob,procs,sample,seed,vertices,width,n_star,volume,\
             longest_path,lower,our,fed,rel_our,rel_fed,sim_makespan,sim_ok"
        )?;
        for r in &self.rows {
            writeln!(
                w,
                "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
                r.parallelism,
                fmt_prob(r.conn_prob),
                r.procs,
                r.sample,
                r.seed,
                r.vertices,
                r.width,
                r.n_star,
                r.volume,
                r.longest_path,
                fmt4(r.lower),
                fmt4(r.our),
                fmt4(r.federated),
                fmt4(r.rel_our),
                fmt4(r.rel_federated),
                fmt4(r.sim_makespan),
                r.sim_ok,
            )?;
        }
        Ok(())
    }

    /// Relative-makespan statistics (ours, federated) of one grid cell.
    pub fn cell_stats(
        &self,
        parallelism: usize,
        conn_prob: f64,
        procs: usize,
    ) -> Option<(Stats, Stats)> {
        let ours: Vec<f64> = self
            .rows
            .iter()
            .filter(|r| {
                r.parallelism == parallelism && r.conn_prob == conn_prob && r.procs == procs
            })
            .map(|r| to_f64(r.rel_our))
            .collect();
        let fed: Vec<f64> = self
            .rows
            .iter()
            .filter(|r| {
                r.parallelism == parallelism && r.conn_prob == conn_prob && r.procs == procs
            })
            .map(|r| to_f64(r.rel_federated))
            .collect();
        Some((Stats::from_values(&ours)?, Stats::from_values(&fed)?))
    }

    /// Aligned per-cell summary of relative makespans.
    pub fn summary_table(&self) -> String {
        let mut out = String::from(
            "parallelism conn_prob procs |   our mean  median |   fed mean  median\n",
        );
        let mut seen = Vec::new();
        for r in &self.rows {
            let key = (r.parallelism, r.conn_prob.to_bits(), r.procs);
            if seen.contains(&key) {
                continue;
            }
            seen.push(key);
            if let Some((ours, fed)) = self.cell_stats(r.parallelism, r.conn_prob, r.procs) {
                out.push_str(&format!(
                    "{:>11} {:>9} {:>5} | {:>10.2} {:>7.2} | {:>10.2} {:>7.2}\n",
                    r.parallelism,
                    fmt_prob(r.conn_prob),
                    r.procs,
                    ours.mean,
                    ours.median,
                    fed.mean,
                    fed.median,
                ));
            }
        }
        out
    }

    pub fn violations(&self) -> usize {
        self.rows.iter().filter(|r| !r.sim_ok).count()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tiny_config() -> MakespanConfig {
        MakespanConfig {
            parallelism: vec![4],
            conn_prob: vec![0.5],
            procs: vec![2, 4],
            min_layers: 3,
            max_layers: 5,
            samples: 5,
            seed: 7,
        }
    }

    #[test]
    fn rows_satisfy_invariants() {
        let outcome = run_makespan(&tiny_config()).unwrap();
        assert_eq!(outcome.rows.len(), 10);
        for r in &outcome.rows {
            assert!(r.rel_our >= Time::from_integer(100));
            assert!(r.rel_federated >= Time::from_integer(100));
            assert!(r.our <= r.federated);
            assert!(r.sim_ok);
        }
    }

    #[test]
    fn csv_is_reproducible() {
        let outcome = run_makespan(&tiny_config()).unwrap();
        let again = run_makespan(&tiny_config()).unwrap();
        let mut a = Vec::new();
        let mut b = Vec::new();
        outcome.write_csv(&mut a).unwrap();
        again.write_csv(&mut b).unwrap();
        assert_eq!(a, b);
        assert!(String::from_utf8(a).unwrap().lines().count() == 11);
    }
}
