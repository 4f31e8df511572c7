//! Batch experiment harnesses.
//!
//! Each experiment generates tasks over a parameter grid, evaluates the
//! analyses, and emits one CSV row per sample plus aggregate summaries.
//! Runs are deterministic: per-sample seeds derive from the master seed and
//! the sample's grid position, so the CSV is byte-identical across re-runs
//! regardless of machine or ordering.

mod makespan;
mod stats;
mod uet;
mod validate;
mod waste;

pub use makespan::{run_makespan, MakespanConfig, MakespanOutcome, MakespanRow};
pub use stats::Stats;
pub use uet::{run_uet, UetConfig, UetOutcome, UetRow};
pub use validate::{run_validate, ValidateConfig, ValidateOutcome};
pub use waste::{run_waste, WasteConfig, WasteOutcome, WasteRow};

/// Derives a per-sample seed from the master seed and two grid coordinates
/// (splitmix64 over a mixed input).
pub fn derive_seed(master: u64, cell: u64, sample: u64) -> u64 {
    let mut x = master
        .wrapping_add(cell.wrapping_mul(0x9e37_79b9_7f4a_7c15))
        .wrapping_add(sample.wrapping_mul(0xbf58_476d_1ce4_e5b9));
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    x ^ (x >> 31)
}

/// Formats a probability or ratio grid value with four digits.
pub(crate) fn fmt_prob(p: f64) -> String {
    format!("{:.4}", p)
}
