//! Aggregate statistics for experiment summaries.

/// Five-number summary of a sample set (population variance).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Stats {
    pub count: usize,
    pub min: f64,
    pub max: f64,
    pub mean: f64,
    pub median: f64,
    pub variance: f64,
}

impl Stats {
    pub fn from_values(values: &[f64]) -> Option<Stats> {
        if values.is_empty() {
            return None;
        }
        let mut sorted = values.to_vec();
        sorted.sort_by(|a, b| a.partial_cmp(b).expect("finite values"));
        let count = sorted.len();
        let mean = sorted.iter().sum::<f64>() / count as f64;
        let median = if count % 2 == 1 {
            sorted[count / 2]
        } else {
            (sorted[count / 2 - 1] + sorted[count / 2]) / 2.0
        };
        let variance =
            sorted.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / count as f64;
        Some(Stats {
            count,
            min: sorted[0],
            max: sorted[count - 1],
            mean,
            median,
            variance,
        })
    }
}
