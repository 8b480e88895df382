//! Entangled resource states shared by sender and receiver.
//!
//! A resource of size `n` (even) is the 2n-mode state
//! Σᵢ c(i) |V⟩^i |H⟩^(n−i) ⊗ |H⟩^i |V⟩^(n−i) with nonnegative real
//! amplitudes c(0..n), Σ c(i)² = 1. All amplitudes equal makes it maximally
//! entangled; the two geometric families below trade entanglement for a
//! shaped outcome distribution.

use crate::error::{Error, Result};

/// Tolerance for the Σ c² = 1 invariant.
pub const AMP_NORM_TOL: f64 = 1e-12;

/// Ratios within this distance of 1 take the exact uniform limit, where the
/// closed-form normalizations are 0/0.
pub const UNIT_RATIO_TOL: f64 = 1e-9;

/// Amplitude vector of an entangled resource state.
#[derive(Debug, Clone, PartialEq)]
pub struct ResourceSpec {
    n: usize,
    amps: Vec<f64>,
}

impl ResourceSpec {
    /// Builds a resource from explicit amplitudes c(0..n).
    ///
    /// Requires even `n >= 2`, exactly `n + 1` nonnegative amplitudes, and
    /// Σ c(i)² = 1 within [`AMP_NORM_TOL`].
    pub fn new(n: usize, amps: Vec<f64>) -> Result<Self> {
        check_size(n)?;
        if amps.len() != n + 1 {
            return Err(Error::InvalidAmplitudes(format!(
                "expected {} amplitudes, got {}",
                n + 1,
                amps.len()
            )));
        }
        if amps.iter().any(|&a| !a.is_finite() || a < 0.0) {
            return Err(Error::InvalidAmplitudes(
                "amplitudes must be finite and nonnegative".into(),
            ));
        }
        let norm_sq: f64 = amps.iter().map(|a| a * a).sum();
        if (norm_sq - 1.0).abs() > AMP_NORM_TOL {
            return Err(Error::InvalidAmplitudes(format!(
                "squared amplitudes sum to {norm_sq}"
            )));
        }
        Ok(Self { n, amps })
    }

    /// Number of photon pairs n.
    pub fn n(&self) -> usize {
        self.n
    }

    /// The amplitudes c(0..n).
    pub fn amps(&self) -> &[f64] {
        &self.amps
    }

    /// c(i) for i in 0..=n. Panics on out-of-range index.
    pub fn amp(&self, i: usize) -> f64 {
        self.amps[i]
    }

    /// c(i) with the boundary convention c(−1) = c(n+1) = 0, so the
    /// single-step outcome law covers m = 0 and m = n+1 uniformly.
    pub fn amp_or_zero(&self, i: isize) -> f64 {
        if i < 0 || i > self.n as isize {
            0.0
        } else {
            self.amps[i as usize]
        }
    }
}

fn check_size(n: usize) -> Result<()> {
    if n < 2 || n % 2 != 0 {
        return Err(Error::InvalidResourceSize(n));
    }
    Ok(())
}

fn check_ratio(q: f64) -> Result<()> {
    if !(q > 0.0) || !q.is_finite() {
        return Err(Error::NonPositiveRatio(q));
    }
    Ok(())
}

/// Normalizes squared-amplitude weights given as exponents e(i) of a common
/// ratio: c(i)² = q^e(i) / Σ q^e(j). Works in log space so extreme ratios
/// neither overflow nor underflow.
fn from_ratio_exponents(n: usize, q: f64, exponent: impl Fn(usize) -> i64) -> ResourceSpec {
    let ln_q = q.ln();
    let log_w: Vec<f64> = (0..=n).map(|i| exponent(i) as f64 * ln_q).collect();
    let shift = log_w.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let w: Vec<f64> = log_w.iter().map(|lw| (lw - shift).exp()).collect();
    let total: f64 = w.iter().sum();
    let amps = w.iter().map(|wi| (wi / total).sqrt()).collect();
    ResourceSpec { n, amps }
}

/// The maximally entangled resource: all amplitudes 1/√(n+1).
pub fn uniform_resource(n: usize) -> Result<ResourceSpec> {
    check_size(n)?;
    let amp = (1.0 / (n + 1) as f64).sqrt();
    Ok(ResourceSpec {
        n,
        amps: vec![amp; n + 1],
    })
}

/// Amplitudes rising geometrically with ratio √q up to i = n/2, then falling
/// symmetrically: c(i)² ∝ q^(n/2 − |i − n/2|). Palindromic for every q.
pub fn geometric_peak_resource(n: usize, q: f64) -> Result<ResourceSpec> {
    check_size(n)?;
    check_ratio(q)?;
    if (q - 1.0).abs() < UNIT_RATIO_TOL {
        return uniform_resource(n);
    }
    let half = (n / 2) as i64;
    Ok(from_ratio_exponents(n, q, |i| half - (i as i64 - half).abs()))
}

/// Monotone geometric amplitudes: c(i)² ∝ q2^i. Increasing for q2 > 1,
/// decreasing for q2 < 1, uniform in the q2 → 1 limit.
pub fn geometric_monotone_resource(n: usize, q2: f64) -> Result<ResourceSpec> {
    check_size(n)?;
    check_ratio(q2)?;
    if (q2 - 1.0).abs() < UNIT_RATIO_TOL {
        return uniform_resource(n);
    }
    Ok(from_ratio_exponents(n, q2, |i| i as i64))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn squared(spec: &ResourceSpec) -> Vec<f64> {
        spec.amps().iter().map(|a| a * a).collect()
    }

    #[test]
    fn uniform_n2() {
        let spec = uniform_resource(2).unwrap();
        let expect = 1.0 / 3.0_f64.sqrt();
        for &a in spec.amps() {
            assert_abs_diff_eq!(a, expect, epsilon = 1e-15);
        }
    }

    #[test]
    fn uniform_n4_squared() {
        let spec = uniform_resource(4).unwrap();
        for p in squared(&spec) {
            assert_abs_diff_eq!(p, 0.2, epsilon = 1e-15);
        }
    }

    #[test]
    fn odd_or_zero_size_rejected() {
        assert_eq!(uniform_resource(3), Err(Error::InvalidResourceSize(3)));
        assert_eq!(uniform_resource(0), Err(Error::InvalidResourceSize(0)));
        assert!(geometric_peak_resource(5, 2.0).is_err());
        assert!(geometric_monotone_resource(1, 0.5).is_err());
    }

    #[test]
    fn peak_unit_ratio_is_uniform() {
        let spec = geometric_peak_resource(2, 1.0).unwrap();
        assert_eq!(spec, uniform_resource(2).unwrap());
    }

    #[test]
    fn peak_n4_q2_squared_amplitudes() {
        let spec = geometric_peak_resource(4, 2.0).unwrap();
        let expect = [0.1, 0.2, 0.4, 0.2, 0.1];
        for (p, e) in squared(&spec).iter().zip(expect) {
            assert_abs_diff_eq!(p, &e, epsilon = 1e-13);
        }
    }

    #[test]
    fn peak_n2_optimal_ratio_squared_amplitudes() {
        // q = 1.29663 gives c² ≈ (0.30334, 0.39332, 0.30334), Σ = 1.
        let spec = geometric_peak_resource(2, 1.29663).unwrap();
        let sq = squared(&spec);
        assert_abs_diff_eq!(sq[0], 0.30334008, epsilon = 1e-7);
        assert_abs_diff_eq!(sq[1], 0.39331984, epsilon = 1e-7);
        assert_abs_diff_eq!(sq[2], 0.30334008, epsilon = 1e-7);
        assert_abs_diff_eq!(sq.iter().sum::<f64>(), 1.0, epsilon = 1e-13);
    }

    #[test]
    fn peak_matches_closed_form_normalization() {
        // c(0)² must equal a1 = (1−q)/(2−q^(n/2)(1+q)) away from q = 1.
        for &(n, q) in &[(2usize, 2.0), (4, 0.7), (6, 1.3), (8, 3.0)] {
            let spec = geometric_peak_resource(n, q).unwrap();
            let a1 = (1.0 - q) / (2.0 - q.powi(n as i32 / 2) * (1.0 + q));
            assert_abs_diff_eq!(spec.amp(0) * spec.amp(0), a1, epsilon = 1e-12);
        }
    }

    #[test]
    fn monotone_unit_ratio_is_uniform() {
        let spec = geometric_monotone_resource(2, 1.0).unwrap();
        assert_eq!(spec, uniform_resource(2).unwrap());
    }

    #[test]
    fn monotone_n2_q2_squared_amplitudes() {
        let spec = geometric_monotone_resource(2, 2.0).unwrap();
        let sq = squared(&spec);
        assert_abs_diff_eq!(sq[0], 1.0 / 7.0, epsilon = 1e-14);
        assert_abs_diff_eq!(sq[1], 2.0 / 7.0, epsilon = 1e-14);
        assert_abs_diff_eq!(sq[2], 4.0 / 7.0, epsilon = 1e-14);
    }

    #[test]
    fn monotone_half_mirrors_double() {
        let inc = geometric_monotone_resource(2, 2.0).unwrap();
        let dec = geometric_monotone_resource(2, 0.5).unwrap();
        let mut rev = dec.amps().to_vec();
        rev.reverse();
        for (a, b) in inc.amps().iter().zip(&rev) {
            assert_abs_diff_eq!(a, b, epsilon = 1e-14);
        }
    }

    #[test]
    fn monotone_matches_closed_form_normalization() {
        // c(0)² must equal a2 = (1−q2)/(1−q2^(n+1)) away from q2 = 1.
        for &(n, q2) in &[(2usize, 2.0), (4, 0.3), (6, 1.7)] {
            let spec = geometric_monotone_resource(n, q2).unwrap();
            let a2 = (1.0 - q2) / (1.0 - q2.powi(n as i32 + 1));
            assert_abs_diff_eq!(spec.amp(0) * spec.amp(0), a2, epsilon = 1e-12);
        }
    }

    #[test]
    fn nonpositive_ratio_rejected() {
        assert!(matches!(
            geometric_peak_resource(2, 0.0),
            Err(Error::NonPositiveRatio(_))
        ));
        assert!(matches!(
            geometric_monotone_resource(2, -1.0),
            Err(Error::NonPositiveRatio(_))
        ));
    }

    #[test]
    fn new_validates_normalization_and_sign() {
        assert!(ResourceSpec::new(2, vec![0.5, 0.5, 0.5]).is_err());
        assert!(ResourceSpec::new(2, vec![-0.5, 0.5, 0.5_f64.sqrt()]).is_err());
        let ok = ResourceSpec::new(2, vec![0.5, 0.5, 0.5_f64.sqrt()]).unwrap();
        assert_eq!(ok.n(), 2);
    }

    #[test]
    fn boundary_amplitudes_are_zero() {
        let spec = uniform_resource(2).unwrap();
        assert_eq!(spec.amp_or_zero(-1), 0.0);
        assert_eq!(spec.amp_or_zero(3), 0.0);
        assert!(spec.amp_or_zero(0) > 0.0);
    }
}
