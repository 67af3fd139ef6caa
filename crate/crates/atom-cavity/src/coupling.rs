//! Dimensionless atom-mode coupling and single-atom observables.
//!
//! A dipole driven by a Gaussian mode scatters a field that, projected back
//! onto the mode, is E_M = i beta E with
//!
//!   beta = (k / (pi w^2)) alpha / eps0
//!
//! evaluated at the drive wavenumber k. Im(beta) is extinction, Re(beta)
//! phase shift. Power balance enforces the optical theorem
//! |beta|^2 = eta_fs Im(beta), which every observable below leans on.

use num_complex::Complex64;

use crate::atom::AtomTransition;
use crate::constants::{C, EPSILON_0};
use crate::error::{require_finite, require_positive, Error, Result};
use crate::lineshape;
use crate::mode::{GaussianMode, ModeAmplitude};

/// Complex coupling of one scatterer to one Gaussian mode.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComplexCoupling {
    beta: Complex64,
}

impl ComplexCoupling {
    pub fn new(beta: Complex64) -> Result<Self> {
        require_finite("beta (re)", beta.re)?;
        require_finite("beta (im)", beta.im)?;
        Ok(ComplexCoupling { beta })
    }

    pub fn beta(&self) -> Complex64 {
        self.beta
    }

    /// |beta|^2 - eta_fs Im(beta). Zero (to rounding) for any coupling
    /// produced from a physical polarizability, at every drive frequency,
    /// provided eta_fs is evaluated at the drive wavenumber.
    pub fn optical_theorem_residual(&self, eta_fs: f64) -> f64 {
        self.beta.norm_sqr() - eta_fs * self.beta.im
    }
}

/// Coupling from the exact polarizability at drive frequency omega.
/// The mode provides the waist; the wavenumber follows the drive (elastic
/// scattering emits at the drive frequency).
pub fn beta_exact(omega: f64, atom: &AtomTransition, mode: &GaussianMode) -> Result<ComplexCoupling> {
    let omega = require_positive("omega", omega)?;
    let alpha = atom.polarizability(omega)?;
    let k = omega / C;
    let w = mode.waist();
    let beta = alpha * (k / (std::f64::consts::PI * w * w * EPSILON_0));
    ComplexCoupling::new(beta)
}

/// Narrow-line (rotating-wave) coupling: beta = eta_fs (L_disp + i L_abs)
/// at detuning delta_a from resonance. Peak value i eta_fs on resonance.
pub fn beta_rwa(delta_a: f64, gamma: f64, eta_fs: f64) -> Result<ComplexCoupling> {
    require_finite("delta_a", delta_a)?;
    let gamma = require_positive("gamma", gamma)?;
    let eta_fs = require_finite("eta_fs", eta_fs)?;
    if eta_fs < 0.0 {
        return Err(Error::invalid(format!("eta_fs must be >= 0, got {eta_fs}")));
    }
    let beta = Complex64::new(
        eta_fs * lineshape::dispersive(delta_a, gamma),
        eta_fs * lineshape::absorptive(delta_a, gamma),
    );
    ComplexCoupling::new(beta)
}

/// Total power scattered into free space by a dipole driven with mode
/// amplitude E: P_fs = Im(beta) |E|^2. Units W when E is in sqrt(W).
pub fn scattered_power_fs(beta: &ComplexCoupling, drive: &ModeAmplitude) -> f64 {
    beta.beta().im * drive.value().norm_sqr()
}

/// Ratio of the power scattered into both directions of the driving mode
/// to the total scattered power, 2 P_M / P_fs = |beta|^2 / Im(beta).
/// By the optical theorem this equals eta_fs at any detuning.
pub fn mode_scatter_ratio(beta: &ComplexCoupling) -> Result<f64> {
    if beta.beta().im <= 0.0 {
        return Err(Error::invalid(
            "mode scatter ratio needs Im(beta) > 0 (absorbing scatterer)".to_string(),
        ));
    }
    Ok(beta.beta().norm_sqr() / beta.beta().im)
}

/// Fraction of the incident beam power removed by a single atom,
/// P_fs / P_in = Im(2 beta) = 2 eta_fs L_abs in the narrow-line limit.
pub fn absorption_fraction(beta: &ComplexCoupling) -> f64 {
    2.0 * beta.beta().im
}

/// Attenuation cross section sigma = Im(2 beta) A. With the narrow-line
/// coupling this reduces to the textbook resonant value 6 pi / k^2 times
/// the absorptive line shape.
pub fn cross_section(beta: &ComplexCoupling, mode: &GaussianMode) -> f64 {
    absorption_fraction(beta) * mode.effective_area()
}

/// Phase shift the atom imprints on the transmitted beam, Re(beta).
pub fn phase_shift(beta: &ComplexCoupling) -> f64 {
    beta.beta().re
}
