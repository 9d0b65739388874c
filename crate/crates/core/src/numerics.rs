//! Fixed-order reductions.
//!
//! Every sum in the crate goes through [`pairwise_sum_by`], so results depend
//! only on the input order and never on thread count.

const BLOCK: usize = 8;

/// Pairwise (cascade) sum of `term(i)` for `i in 0..n`.
pub fn pairwise_sum_by<F: Fn(usize) -> f64>(n: usize, term: F) -> f64 {
    fn rec<F: Fn(usize) -> f64>(lo: usize, hi: usize, term: &F) -> f64 {
        let len = hi - lo;
        if len <= BLOCK {
            let mut acc = 0.0;
            for i in lo..hi {
                acc += term(i);
            }
            acc
        } else {
            let mid = lo + len / 2;
            rec(lo, mid, term) + rec(mid, hi, term)
        }
    }
    rec(0, n, &term)
}

pub fn pairwise_sum(values: &[f64]) -> f64 {
    pairwise_sum_by(values.len(), |i| values[i])
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    pairwise_sum_by(a.len(), |i| a[i] * b[i])
}

pub fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

pub fn mean(values: &[f64]) -> f64 {
    pairwise_sum(values) / values.len() as f64
}

/// Population standard deviation (divides by `n`).
pub fn std_dev(values: &[f64]) -> f64 {
    let m = mean(values);
    let var = pairwise_sum_by(values.len(), |i| (values[i] - m).powi(2)) / values.len() as f64;
    var.sqrt()
}

/// Sample standard deviation (divides by `n - 1`).
pub fn sample_std_dev(values: &[f64]) -> f64 {
    let m = mean(values);
    let var =
        pairwise_sum_by(values.len(), |i| (values[i] - m).powi(2)) / (values.len() - 1) as f64;
    var.sqrt()
}

/// Linear-interpolation quantile of already sorted data.
pub fn quantile_sorted(sorted: &[f64], q: f64) -> f64 {
    let pos = q * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    let frac = pos - lo as f64;
    sorted[lo] + (sorted[hi] - sorted[lo]) * frac
}

/// Round to `digits` significant digits.
pub fn round_sig(x: f64, digits: usize) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    format!("{:.*e}", digits - 1, x).parse().unwrap_or(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pairwise_matches_exact_integer_sum() {
        let v: Vec<f64> = (1..=1000).map(f64::from).collect();
        assert_eq!(pairwise_sum(&v), 500_500.0);
    }

    #[test]
    fn quantiles_interpolate() {
        let v = [1.0, 2.0, 3.0, 4.0];
        assert_eq!(quantile_sorted(&v, 0.0), 1.0);
        assert_eq!(quantile_sorted(&v, 1.0), 4.0);
        assert!((quantile_sorted(&v, 0.25) - 1.75).abs() < 1e-15);
    }

    #[test]
    fn round_sig_six_digits() {
        assert_eq!(round_sig(1.234_567_89, 6), 1.234_57);
        assert_eq!(round_sig(-0.000_123_456_78, 6), -0.000_123_457);
        assert_eq!(round_sig(0.0, 6), 0.0);
    }
}
