//! The dual-rail polarization qubit α|H⟩ + β|V⟩.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Tolerance for the normalization invariant |α|² + |β|² = 1.
pub const NORM_TOL: f64 = 1e-12;

/// One of the two logical rails of the polarization encoding.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Rail {
    Horizontal,
    Vertical,
}

/// A normalized single-photon polarization qubit.
///
/// `amp_h` multiplies |H⟩ and `amp_v` multiplies |V⟩. Construction checks
/// |amp_h|² + |amp_v|² = 1 within [`NORM_TOL`]; unnormalized amplitude pairs
/// are handled by the callers that produce them (they carry explicit rail
/// weights instead, see [`crate::filter`]).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QubitState {
    amp_h: Complex64,
    amp_v: Complex64,
}

impl QubitState {
    /// Builds a qubit from its two complex amplitudes.
    pub fn new(amp_h: Complex64, amp_v: Complex64) -> Result<Self> {
        let norm_sq = amp_h.norm_sqr() + amp_v.norm_sqr();
        if (norm_sq - 1.0).abs() > NORM_TOL {
            return Err(Error::NotNormalized(norm_sq));
        }
        Ok(Self { amp_h, amp_v })
    }

    /// Builds a qubit from real amplitudes.
    pub fn from_reals(amp_h: f64, amp_v: f64) -> Result<Self> {
        Self::new(Complex64::new(amp_h, 0.0), Complex64::new(amp_v, 0.0))
    }

    /// Renormalizes an arbitrary nonzero amplitude pair into a qubit.
    pub fn normalized(amp_h: Complex64, amp_v: Complex64) -> Result<Self> {
        let norm = (amp_h.norm_sqr() + amp_v.norm_sqr()).sqrt();
        if norm == 0.0 {
            return Err(Error::DegenerateState);
        }
        Ok(Self {
            amp_h: amp_h / norm,
            amp_v: amp_v / norm,
        })
    }

    /// |H⟩
    pub fn horizontal() -> Self {
        Self {
            amp_h: Complex64::ONE,
            amp_v: Complex64::ZERO,
        }
    }

    /// |V⟩
    pub fn vertical() -> Self {
        Self {
            amp_h: Complex64::ZERO,
            amp_v: Complex64::ONE,
        }
    }

    /// (|H⟩ + |V⟩)/√2
    pub fn plus() -> Self {
        let r = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        Self { amp_h: r, amp_v: r }
    }

    /// The basis state of a single rail.
    pub fn rail(rail: Rail) -> Self {
        match rail {
            Rail::Horizontal => Self::horizontal(),
            Rail::Vertical => Self::vertical(),
        }
    }

    pub fn amp_h(&self) -> Complex64 {
        self.amp_h
    }

    pub fn amp_v(&self) -> Complex64 {
        self.amp_v
    }

    /// Swaps the two rails (the polarization NOT gate). Involution.
    pub fn apply_not(&self) -> Self {
        Self {
            amp_h: self.amp_v,
            amp_v: self.amp_h,
        }
    }

    /// ⟨self|other⟩
    pub fn inner(&self, other: &Self) -> Complex64 {
        self.amp_h.conj() * other.amp_h + self.amp_v.conj() * other.amp_v
    }

    /// |⟨self|other⟩|², insensitive to global phase.
    pub fn fidelity(&self, other: &Self) -> f64 {
        self.inner(other).norm_sqr()
    }
}
