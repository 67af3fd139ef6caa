//! Gaussian TEM00 mode geometry, traveling-wave amplitudes, detunings.

use num_complex::Complex64;

use crate::constants::C;
use crate::error::{require_finite, require_positive, Result};

/// Geometry of a TEM00 Gaussian mode: wavenumber and waist radius.
///
/// The mode carries the free-space cooperativity eta_fs = 6 / (k w)^2,
/// the fraction of a dipole's scattering that an ideal phase-matched
/// Gaussian collection mode of this geometry picks up (per direction,
/// doubled for the bidirectional ratio).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianMode {
    k: f64,
    w: f64,
}

impl GaussianMode {
    pub fn new(k: f64, w: f64) -> Result<Self> {
        let k = require_positive("k", k)?;
        let w = require_positive("w", w)?;
        Ok(GaussianMode { k, w })
    }

    pub fn from_wavelength(lambda: f64, w: f64) -> Result<Self> {
        let lambda = require_positive("lambda", lambda)?;
        Self::new(2.0 * std::f64::consts::PI / lambda, w)
    }

    pub fn k(&self) -> f64 {
        self.k
    }

    pub fn waist(&self) -> f64 {
        self.w
    }

    pub fn wavelength(&self) -> f64 {
        2.0 * std::f64::consts::PI / self.k
    }

    pub fn omega(&self) -> f64 {
        self.k * C
    }

    /// Rayleigh range z_R = k w^2 / 2.
    pub fn rayleigh_range(&self) -> f64 {
        0.5 * self.k * self.w * self.w
    }

    /// Effective area A = pi w^2 / 2 (peak-normalized intensity profile).
    pub fn effective_area(&self) -> f64 {
        0.5 * std::f64::consts::PI * self.w * self.w
    }

    /// Free-space cooperativity at the mode's own wavenumber.
    pub fn eta_fs(&self) -> f64 {
        6.0 / (self.k * self.w).powi(2)
    }

    /// Free-space cooperativity for a drive at wavenumber k (elastic
    /// scattering at a frequency other than the nominal one).
    pub fn eta_fs_at(&self, k: f64) -> f64 {
        6.0 / (k * self.w).powi(2)
    }

    /// Paraxial warning flag: cleared when k w >= 2 pi, i.e. the waist is
    /// at least a wavelength. Below that the Gaussian-beam description of
    /// the mode degrades and eta_fs is no longer a small fraction.
    pub fn is_paraxial(&self) -> bool {
        self.k * self.w >= 2.0 * std::f64::consts::PI
    }
}

/// Traveling-wave mode amplitude normalized so the carried power is
/// |E|^2 / 2 (units sqrt(W)).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeAmplitude(Complex64);

impl ModeAmplitude {
    pub fn new(value: Complex64) -> Result<Self> {
        require_finite("mode amplitude (re)", value.re)?;
        require_finite("mode amplitude (im)", value.im)?;
        Ok(ModeAmplitude(value))
    }

    pub fn real(value: f64) -> Result<Self> {
        Self::new(Complex64::new(value, 0.0))
    }

    pub fn value(&self) -> Complex64 {
        self.0
    }

    /// Power carried by the traveling wave, |E|^2 / 2.
    pub fn power(&self) -> f64 {
        0.5 * self.0.norm_sqr()
    }
}

/// Detuning bookkeeping for driven atom-resonator systems:
/// delta_a = omega - omega_a (drive from atom), delta_c = omega - omega_c
/// (drive from resonator). Angular units, consistent with the gamma and
/// kappa they are compared against.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DetuningPair {
    pub delta_a: f64,
    pub delta_c: f64,
}

impl DetuningPair {
    pub fn new(delta_a: f64, delta_c: f64) -> Result<Self> {
        require_finite("delta_a", delta_a)?;
        require_finite("delta_c", delta_c)?;
        Ok(DetuningPair { delta_a, delta_c })
    }
}
