//! Two-level scatterer: transition data and the exact classical polarizability.

use num_complex::Complex64;

use crate::constants::{C, EPSILON_0};
use crate::error::{require_positive, Error, Result};

/// A two-level transition characterized by its angular frequency and the
/// free-space radiative linewidth (FWHM in angular units).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AtomTransition {
    omega_a: f64,
    gamma: f64,
}

impl AtomTransition {
    pub fn new(omega_a: f64, gamma: f64) -> Result<Self> {
        let omega_a = require_positive("omega_a", omega_a)?;
        let gamma = require_positive("gamma", gamma)?;
        Ok(AtomTransition { omega_a, gamma })
    }

    /// Builds the transition from its vacuum wavelength in meters.
    pub fn from_wavelength(lambda: f64, gamma: f64) -> Result<Self> {
        let lambda = require_positive("lambda", lambda)?;
        Self::new(2.0 * std::f64::consts::PI * C / lambda, gamma)
    }

    pub fn omega_a(&self) -> f64 {
        self.omega_a
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    /// Resonant wavenumber omega_a / c.
    pub fn k0(&self) -> f64 {
        self.omega_a / C
    }

    pub fn wavelength(&self) -> f64 {
        2.0 * std::f64::consts::PI * C / self.omega_a
    }

    /// Warning flag: the narrow-line bookkeeping used downstream assumes
    /// gamma << omega_a. True when gamma exceeds 1e-3 of the transition
    /// frequency.
    pub fn broad_line(&self) -> bool {
        self.gamma / self.omega_a > 1e-3
    }

    /// Exact classical polarizability of a radiatively damped dipole at
    /// drive frequency omega (rad/s):
    ///
    /// alpha = 6 pi eps0 c^3 (gamma / omega_a^2)
    ///         / (omega_a^2 - omega^2 - i (omega^3 / omega_a^2) gamma)
    ///
    /// Valid at any detuning; satisfies |alpha|^2 = (6 pi eps0 / k^3) Im alpha
    /// with k = omega / c, so absorbed and scattered power balance at every
    /// frequency.
    pub fn polarizability(&self, omega: f64) -> Result<Complex64> {
        let omega = require_positive("omega", omega)?;
        let wa2 = self.omega_a * self.omega_a;
        let numerator = 6.0 * std::f64::consts::PI * EPSILON_0 * C.powi(3) * self.gamma / wa2;
        let denominator = Complex64::new(wa2 - omega * omega, -omega.powi(3) / wa2 * self.gamma);
        let alpha = numerator / denominator;
        if !alpha.re.is_finite() || !alpha.im.is_finite() {
            return Err(Error::Invariant(format!(
                "polarizability not finite at omega = {omega}"
            )));
        }
        Ok(alpha)
    }
}
