use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::numerics::{self, pairwise_sum_by};

/// Points on the shared grid used to integrate the overlap.
pub const OV_GRID_POINTS: usize = 1024;

/// Grid margin beyond the pooled sample range, in bandwidths.
const GRID_MARGIN: f64 = 3.0;

/// Silverman's rule `0.9 min(sigma, IQR / 1.34) n^(-1/5)`.
///
/// Falls back to `sigma` when the interquartile range is zero.
pub fn silverman_bandwidth(samples: &[f64]) -> Result<f64> {
    check_samples(samples)?;
    let mut sorted = samples.to_vec();
    sorted.sort_by(f64::total_cmp);
    let sigma = numerics::sample_std_dev(samples);
    let iqr = numerics::quantile_sorted(&sorted, 0.75) - numerics::quantile_sorted(&sorted, 0.25);
    let spread = if iqr > 0.0 { sigma.min(iqr / 1.34) } else { sigma };
    Ok(0.9 * spread * (samples.len() as f64).powf(-0.2))
}

fn check_samples(samples: &[f64]) -> Result<()> {
    if let Some(v) = samples.iter().find(|v| !v.is_finite()) {
        return Err(Error::DegenerateSample(format!("non-finite sample {v}")));
    }
    let first = samples.first().copied();
    if samples.iter().all(|v| Some(*v) == first) {
        return Err(Error::DegenerateSample(format!(
            "need at least 2 distinct values, got {} sample(s) with a single value",
            samples.len()
        )));
    }
    Ok(())
}

/// One-dimensional Gaussian kernel density estimate.
#[derive(Clone, Debug)]
pub struct GaussianKde {
    samples: Vec<f64>,
    bandwidth: f64,
}

impl GaussianKde {
    /// Fits with Silverman's bandwidth.
    pub fn new(samples: &[f64]) -> Result<Self> {
        let bandwidth = silverman_bandwidth(samples)?;
        Ok(GaussianKde {
            samples: samples.to_vec(),
            bandwidth,
        })
    }

    pub fn bandwidth(&self) -> f64 {
        self.bandwidth
    }

    pub fn density(&self, x: f64) -> f64 {
        let h = self.bandwidth;
        let norm = 1.0 / (self.samples.len() as f64 * h * (2.0 * PI).sqrt());
        norm * pairwise_sum_by(self.samples.len(), |i| {
            let u = (x - self.samples[i]) / h;
            (-0.5 * u * u).exp()
        })
    }

    fn bounds(&self) -> (f64, f64) {
        self.samples
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(*v), hi.max(*v)))
    }
}

/// Area under the pointwise minimum of the two samples' Gaussian KDEs.
///
/// Both densities are evaluated on one uniform grid spanning the pooled
/// range plus three of the larger bandwidth on either side, and integrated
/// with the trapezoidal rule. Symmetric in its arguments bit for bit.
pub fn kde_overlap(samples_a: &[f64], samples_b: &[f64]) -> Result<f64> {
    let a = GaussianKde::new(samples_a)?;
    let b = GaussianKde::new(samples_b)?;
    let h = a.bandwidth.max(b.bandwidth);
    let (alo, ahi) = a.bounds();
    let (blo, bhi) = b.bounds();
    let lo = alo.min(blo) - GRID_MARGIN * h;
    let hi = ahi.max(bhi) + GRID_MARGIN * h;
    let step = (hi - lo) / (OV_GRID_POINTS - 1) as f64;
    let mins: Vec<f64> = (0..OV_GRID_POINTS)
        .map(|i| {
            let x = lo + step * i as f64;
            a.density(x).min(b.density(x))
        })
        .collect();
    let interior = pairwise_sum_by(OV_GRID_POINTS - 2, |i| mins[i + 1]);
    let area = step * (interior + 0.5 * (mins[0] + mins[OV_GRID_POINTS - 1]));
    Ok(area.clamp(0.0, 1.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn silverman_on_known_sample() {
        // sigma = sqrt(2.5), IQR = 2 on 1..=5
        let h = silverman_bandwidth(&[1.0, 2.0, 3.0, 4.0, 5.0]).unwrap();
        let want = 0.9 * (2.0f64 / 1.34) * 5f64.powf(-0.2);
        assert!((h - want).abs() < 1e-15);
    }

    #[test]
    fn degenerate_samples() {
        assert!(matches!(kde_overlap(&[1.0], &[1.0, 2.0]), Err(Error::DegenerateSample(_))));
        assert!(matches!(kde_overlap(&[1.0, 2.0], &[3.0, 3.0, 3.0]), Err(Error::DegenerateSample(_))));
        assert!(matches!(kde_overlap(&[], &[1.0, 2.0]), Err(Error::DegenerateSample(_))));
    }

    #[test]
    fn zero_iqr_falls_back_to_sigma() {
        let s = [1.0, 1.0, 1.0, 1.0, 1.0, 5.0];
        assert!(silverman_bandwidth(&s).unwrap() > 0.0);
    }

    #[test]
    fn identical_and_disjoint() {
        let a: Vec<f64> = (0..50).map(|i| (i as f64 * 0.37).sin()).collect();
        assert!((kde_overlap(&a, &a).unwrap() - 1.0).abs() < 1e-3);
        let sd = numerics::sample_std_dev(&a);
        let b: Vec<f64> = a.iter().map(|v| v + 1000.0 * sd).collect();
        assert!(kde_overlap(&a, &b).unwrap() <= 0.01);
    }

    #[test]
    fn density_integrates_to_one() {
        let kde = GaussianKde::new(&[0.0, 1.0, 3.0]).unwrap();
        let h = 1e-3;
        let area: f64 = (-20_000..20_000).map(|i| kde.density(i as f64 * h) * h).sum();
        assert!((area - 1.0).abs() < 1e-6);
    }
}
