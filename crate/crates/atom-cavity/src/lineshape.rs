//! Steady-state Lorentzian line shapes of a damped driven dipole.
//!
//! Near resonance the response factorizes into an absorptive and a
//! dispersive component,
//!
//!   L_abs(delta)  = gamma^2 / (gamma^2 + 4 delta^2)
//!   L_disp(delta) = -2 delta gamma / (gamma^2 + 4 delta^2)
//!
//! related pointwise by L_disp = -(2 delta / gamma) L_abs. Both are
//! dimensionless; delta and gamma must share units. Callers validate
//! gamma > 0 at their boundary.

/// Absorptive Lorentzian, peak value 1 at delta = 0, FWHM gamma.
pub fn absorptive(delta: f64, gamma: f64) -> f64 {
    debug_assert!(gamma > 0.0);
    let g2 = gamma * gamma;
    g2 / (g2 + 4.0 * delta * delta)
}

/// Dispersive Lorentzian, odd in delta, extrema +-1/2 at delta = -+gamma/2.
pub fn dispersive(delta: f64, gamma: f64) -> f64 {
    debug_assert!(gamma > 0.0);
    -2.0 * delta * gamma / (gamma * gamma + 4.0 * delta * delta)
}
