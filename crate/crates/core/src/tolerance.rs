//! Tie tolerance shared by every argmin/argmax in the crate.
//!
//! Losses are built from exponentials and span many orders of magnitude, so
//! two values are tied when they agree to a relative `1e-9`, with an absolute
//! floor of `1e-12` near zero.

use alloc::vec::Vec;

pub const RELATIVE: f64 = 1e-9;
pub const ABSOLUTE: f64 = 1e-12;

/// Slack allowed above `best` for a value to count as tied with it.
pub fn slack(best: f64) -> f64 {
    let rel = RELATIVE * libm::fabs(best);
    if rel > ABSOLUTE {
        rel
    } else {
        ABSOLUTE
    }
}

/// `value` is no worse than `best` up to the tie tolerance.
pub fn attains(value: f64, best: f64) -> bool {
    value.is_finite() && value <= best + slack(best)
}

/// `value` improves on `incumbent` by more than the tie tolerance.
pub fn improves(value: f64, incumbent: f64) -> bool {
    if !value.is_finite() {
        return false;
    }
    if !incumbent.is_finite() {
        return true;
    }
    value < incumbent - slack(incumbent)
}

/// Indices of every finite entry tied with the minimum, in ascending order.
pub fn argmin_set(values: &[f64]) -> Vec<usize> {
    let best = values
        .iter()
        .copied()
        .filter(|v| v.is_finite())
        .fold(f64::INFINITY, f64::min);
    if !best.is_finite() {
        return Vec::new();
    }
    values
        .iter()
        .enumerate()
        .filter(|(_, &v)| attains(v, best))
        .map(|(k, _)| k)
        .collect()
}

/// Index of the minimum with ties broken toward the lowest index.
pub fn argmin_first(values: &[f64]) -> Option<usize> {
    argmin_set(values).first().copied()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ties_are_relative() {
        assert!(attains(1e6 + 1e-4, 1e6));
        assert!(!attains(1e6 + 1.0, 1e6));
        assert!(attains(5e-13, 0.0));
        assert!(!attains(f64::INFINITY, 0.0));
    }

    #[test]
    fn argmin_ignores_infinite() {
        assert_eq!(argmin_set(&[f64::INFINITY, 2.0, 1.0, 1.0]), vec![2, 3]);
        assert!(argmin_set(&[f64::INFINITY]).is_empty());
        assert_eq!(argmin_first(&[3.0, 1.0, 1.0 + 1e-12]), Some(1));
    }
}
