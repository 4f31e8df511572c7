//! Exact rational time arithmetic.
//!
//! Worst-case execution times are integers, but derived quantities (bounds,
//! budgets, supply windows) are ratios of integers. All comparisons in this
//! crate are exact; floating point only appears in aggregate statistics.

use num_rational::Ratio;
use num_traits::Zero;

/// A point in time or a duration, as an exact rational number of time units.
pub type Time = Ratio<i64>;

/// Lifts an integer number of time units into [`Time`].
pub fn time(units: u64) -> Time {
    Time::from_integer(units as i64)
}

/// Builds the exact fraction `numer / denom`.
pub fn frac(numer: i64, denom: i64) -> Time {
    Time::new(numer, denom)
}

/// Renders `t` with exactly four fractional digits, rounding half away from
/// zero. Used for every decimal column in CSV output so that re-runs are
/// byte-identical.
pub fn fmt4(t: Time) -> String {
    let scaled = t * Time::from_integer(10_000);
    let rounded = scaled.round().to_integer();
    let sign = if rounded < 0 { "-" } else { "" };
    let abs = rounded.abs();
    format!("{}{}.{:04}", sign, abs / 10_000, abs % 10_000)
}

/// Parses a decimal literal such as `1.6` or `0.25` into an exact rational.
/// Plain integers and `numer/denom` forms are accepted as well.
pub fn parse_decimal(s: &str) -> Option<Time> {
    let s = s.trim();
    if let Some((int_part, frac_part)) = s.split_once('.') {
        if frac_part.is_empty() || !frac_part.bytes().all(|b| b.is_ascii_digit()) {
            return None;
        }
        let negative = int_part.starts_with('-');
        let int: i64 = if int_part == "-" {
            0
        } else {
            int_part.parse().ok()?
        };
        let denom = 10i64.checked_pow(frac_part.len() as u32)?;
        let numer: i64 = frac_part.parse().ok()?;
        let magnitude = Time::from_integer(int.abs()) + frac(numer, denom);
        Some(if negative || int < 0 {
            -magnitude
        } else {
            magnitude
        })
    } else {
        s.parse::<Time>().ok()
    }
}

/// Lossy conversion for aggregate statistics; exact comparisons always use
/// [`Time`] directly.
pub fn to_f64(t: Time) -> f64 {
    *t.numer() as f64 / *t.denom() as f64
}

/// `value / base * 100`, i.e. `value` expressed as a percentage of `base`.
/// Returns 100% when `base` is zero (both quantities vanish together in the
/// places this is used).
pub fn percent_of(value: Time, base: Time) -> Time {
    if base.is_zero() {
        Time::from_integer(100)
    } else {
        value / base * Time::from_integer(100)
    }
}
