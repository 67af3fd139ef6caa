//! One atom in a symmetric standing-wave resonator: steady-state fields,
//! transmission, emission ratios, line pulling.
//!
//! Both mirrors transmit an intensity fraction q^2 << 1. Solving the
//! round-trip self-consistency with the atom at an antinode gives every
//! observable in terms of a single complex bracket
//!
//!   B = 1 - 2 i delta_c / kappa - 4 i beta / q^2
//!
//! whose squared magnitude is the shared denominator of all spectra. In
//! the narrow-line limit 4 beta / q^2 = eta_c (L_disp + i L_abs), with the
//! resonator cooperativity eta_c = 4 eta_fs / q^2.

use num_complex::Complex64;

use crate::constants::C;
use crate::coupling::ComplexCoupling;
use crate::error::{require_finite, require_non_negative, require_positive, Error, Result};
use crate::lineshape;
use crate::mode::{DetuningPair, GaussianMode, ModeAmplitude};

/// Symmetric two-mirror resonator: per-mirror intensity transmission q^2
/// and mirror spacing.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CavitySpec {
    q_sq: f64,
    length: f64,
}

impl CavitySpec {
    pub fn new(q_sq: f64, length: f64) -> Result<Self> {
        let q_sq = require_positive("q_sq", q_sq)?;
        if q_sq >= 1.0 {
            return Err(Error::invalid(format!(
                "q_sq = {q_sq} is not a small mirror transmission (must be < 1)"
            )));
        }
        let length = require_positive("length", length)?;
        Ok(CavitySpec { q_sq, length })
    }

    /// Equivalent construction from linewidth and finesse.
    pub fn from_kappa_finesse(kappa: f64, finesse: f64) -> Result<Self> {
        let kappa = require_positive("kappa", kappa)?;
        let finesse = require_positive("finesse", finesse)?;
        let q_sq = std::f64::consts::PI / finesse;
        let length = q_sq * C / kappa;
        Self::new(q_sq, length)
    }

    pub fn q_sq(&self) -> f64 {
        self.q_sq
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    /// Energy decay rate kappa = q^2 c / L.
    pub fn kappa(&self) -> f64 {
        self.q_sq * C / self.length
    }

    /// Finesse pi / q^2.
    pub fn finesse(&self) -> f64 {
        std::f64::consts::PI / self.q_sq
    }

    /// Resonator cooperativity for a mode geometry, eta_c = 4 eta_fs / q^2.
    /// Equals 24 F / (pi k^2 w^2): finesse recycles the photon, the standing
    /// wave doubles the field at an antinode.
    pub fn eta_c(&self, mode: &GaussianMode) -> f64 {
        4.0 * mode.eta_fs() / self.q_sq
    }

    /// Warning flag: the linearized mirror model drops O(q^2) corrections,
    /// so q^2 above 0.1 deserves suspicion.
    pub fn high_loss(&self) -> bool {
        self.q_sq > 0.1
    }
}

/// Round-trip bracket shared by every driven configuration.
fn backaction_bracket(
    beta: &ComplexCoupling,
    delta_c: f64,
    cavity: &CavitySpec,
) -> Result<Complex64> {
    require_finite("delta_c", delta_c)?;
    if beta.beta().im < 0.0 {
        return Err(Error::invalid(
            "coupling with Im(beta) < 0 implies gain; the passive resonator model rejects it"
                .to_string(),
        ));
    }
    let kappa = cavity.kappa();
    let b = Complex64::new(1.0, 0.0)
        - Complex64::new(0.0, 2.0 * delta_c / kappa)
        - Complex64::new(0.0, 4.0 / cavity.q_sq()) * beta.beta();
    // Re(B) = 1 + 4 Im(beta)/q^2 >= 1 for passive couplings, so B cannot vanish
    debug_assert!(b.norm_sqr() >= 1.0);
    Ok(b)
}

/// Steady-state intracavity field for a beam of amplitude `drive` incident
/// on one mirror: E_c = (i drive / q) / B. The returned amplitude is that
/// of one running-wave component; the atom at an antinode sees 2 E_c.
pub fn intracavity_field_driven_cavity(
    beta: &ComplexCoupling,
    delta_c: f64,
    cavity: &CavitySpec,
    drive: &ModeAmplitude,
) -> Result<ModeAmplitude> {
    let b = backaction_bracket(beta, delta_c, cavity)?;
    let q = cavity.q_sq().sqrt();
    ModeAmplitude::new(Complex64::new(0.0, 1.0 / q) * drive.value() / b)
}

/// Power transmission of the driven resonator with the exact coupling,
/// P_tr / P_in = q^2 |E_c|^2 / |E_in|^2 = 1 / |B|^2.
pub fn transmission_exact(
    beta: &ComplexCoupling,
    delta_c: f64,
    cavity: &CavitySpec,
) -> Result<f64> {
    let b = backaction_bracket(beta, delta_c, cavity)?;
    Ok(1.0 / b.norm_sqr())
}

/// Free-space scattering of the driven resonator with the exact coupling,
/// P_fs / P_in = (8 Im(beta) / q^2) / |B|^2. The atom is driven by the
/// standing wave 2 E_c.
pub fn fs_emission_exact(
    beta: &ComplexCoupling,
    delta_c: f64,
    cavity: &CavitySpec,
) -> Result<f64> {
    let b = backaction_bracket(beta, delta_c, cavity)?;
    Ok(8.0 * beta.beta().im / cavity.q_sq() / b.norm_sqr())
}

fn validate_rwa_params(eta_c: f64, gamma: f64, kappa: f64) -> Result<()> {
    require_non_negative("eta_c", eta_c)?;
    require_positive("gamma", gamma)?;
    require_positive("kappa", kappa)?;
    Ok(())
}

/// |B|^2 in the narrow-line limit:
/// [1 + eta_c L_abs]^2 + [2 delta_c/kappa + eta_c L_disp]^2.
fn rwa_denominator(det: DetuningPair, eta_c: f64, gamma: f64, kappa: f64) -> f64 {
    let la = lineshape::absorptive(det.delta_a, gamma);
    let ld = lineshape::dispersive(det.delta_a, gamma);
    let re = 1.0 + eta_c * la;
    let im = 2.0 * det.delta_c / kappa + eta_c * ld;
    re * re + im * im
}

/// Resonator transmission, narrow-line limit. On double resonance
/// T = (1 + eta_c)^-2.
pub fn transmission_rwa(det: DetuningPair, eta_c: f64, gamma: f64, kappa: f64) -> Result<f64> {
    validate_rwa_params(eta_c, gamma, kappa)?;
    Ok(1.0 / rwa_denominator(det, eta_c, gamma, kappa))
}

/// Fraction of the incident power scattered into free space by the atom
/// inside the driven resonator: 2 eta_c L_abs / |B|^2.
pub fn fs_emission_driven_cavity_rwa(
    det: DetuningPair,
    eta_c: f64,
    gamma: f64,
    kappa: f64,
) -> Result<f64> {
    validate_rwa_params(eta_c, gamma, kappa)?;
    let la = lineshape::absorptive(det.delta_a, gamma);
    Ok(2.0 * eta_c * la / rwa_denominator(det, eta_c, gamma, kappa))
}

/// Dispersive pull of the resonator resonance by one atom, in units of
/// kappa: delta_ac / kappa = -(eta_c / 2) L_disp(delta_a). Far detuned it
/// tends to eta_c gamma / (4 delta_a).
pub fn cavity_shift_rwa(delta_a: f64, eta_c: f64, gamma: f64) -> Result<f64> {
    require_finite("delta_a", delta_a)?;
    require_non_negative("eta_c", eta_c)?;
    require_positive("gamma", gamma)?;
    Ok(-0.5 * eta_c * lineshape::dispersive(delta_a, gamma))
}

/// Steady-state fields when a free-space sidebeam of amplitude `drive`
/// illuminates the atom at an antinode of an undriven resonator. Returns
/// the intracavity running-wave amplitude (backaction included) and the
/// amplitude the atom radiates into one direction of the mode:
///
///   E_c = (2 i beta drive / q^2) / B
///   E_M = i beta drive (1 - 2 i delta_c / kappa) / B
pub fn driven_atom_fields(
    beta: &ComplexCoupling,
    delta_c: f64,
    cavity: &CavitySpec,
    drive: &ModeAmplitude,
) -> Result<(ModeAmplitude, ModeAmplitude)> {
    let b = backaction_bracket(beta, delta_c, cavity)?;
    let ib = Complex64::new(0.0, 1.0) * beta.beta() * drive.value();
    let e_c = ib * 2.0 / cavity.q_sq() / b;
    let detuning_factor = Complex64::new(1.0, -2.0 * delta_c / cavity.kappa());
    let e_m = ib * detuning_factor / b;
    Ok((ModeAmplitude::new(e_c)?, ModeAmplitude::new(e_m)?))
}

/// Power leaving through both mirrors, P_c = q^2 |E_c|^2.
pub fn cavity_output_power(e_c: &ModeAmplitude, cavity: &CavitySpec) -> f64 {
    cavity.q_sq() * e_c.value().norm_sqr()
}

/// Total free-space scattering reconstructed from the mode-field amplitude,
/// P_fs = |E_M|^2 / eta_fs.
pub fn fs_power_from_mode_field(e_m: &ModeAmplitude, eta_fs: f64) -> Result<f64> {
    let eta_fs = require_positive("eta_fs", eta_fs)?;
    Ok(e_m.value().norm_sqr() / eta_fs)
}

/// Sidebeam-driven atom: power emitted through the resonator mirrors,
/// normalized to the atom's free-space scattering without the resonator:
/// P_c / P0_fs = eta_c / |B|^2.
pub fn cavity_emission_rwa(det: DetuningPair, eta_c: f64, gamma: f64, kappa: f64) -> Result<f64> {
    validate_rwa_params(eta_c, gamma, kappa)?;
    Ok(eta_c / rwa_denominator(det, eta_c, gamma, kappa))
}

/// Sidebeam-driven atom: free-space scattering with the resonator present,
/// normalized to the bare free-space value:
/// P_fs / P0_fs = [1 + (2 delta_c / kappa)^2] / |B|^2.
pub fn fs_emission_driven_atom_rwa(
    det: DetuningPair,
    eta_c: f64,
    gamma: f64,
    kappa: f64,
) -> Result<f64> {
    validate_rwa_params(eta_c, gamma, kappa)?;
    let x = 2.0 * det.delta_c / kappa;
    Ok((1.0 + x * x) / rwa_denominator(det, eta_c, gamma, kappa))
}

/// Ratio of resonator emission to free-space emission for the sidebeam
/// driven atom. The backaction bracket cancels, leaving the bare-resonator
/// Lorentzian eta_c kappa^2 / (kappa^2 + 4 delta_c^2) at any coupling.
pub fn cavity_to_fs_ratio(delta_c: f64, eta_c: f64, kappa: f64) -> Result<f64> {
    require_finite("delta_c", delta_c)?;
    require_non_negative("eta_c", eta_c)?;
    require_positive("kappa", kappa)?;
    let x = 2.0 * delta_c / kappa;
    Ok(eta_c / (1.0 + x * x))
}

/// Transmission of the weak sidebeam itself: the atom removes the power it
/// redistributes into free space and the resonator,
/// T = 1 - depth0 L_abs (P_fs + P_c) / P0_fs, where depth0 = 2 N eta_fs is
/// the resonant absorption depth the same sample would show without the
/// resonator (single atom: depth0 = 2 eta_fs).
pub fn sidebeam_transmission(
    det: DetuningPair,
    eta_c: f64,
    gamma: f64,
    kappa: f64,
    depth0: f64,
) -> Result<f64> {
    validate_rwa_params(eta_c, gamma, kappa)?;
    require_non_negative("depth0", depth0)?;
    if depth0 > 1.0 {
        return Err(Error::invalid(format!(
            "depth0 = {depth0} is not a thin-sample absorption depth (must be <= 1)"
        )));
    }
    let la = lineshape::absorptive(det.delta_a, gamma);
    let x = 2.0 * det.delta_c / kappa;
    let redistribution = (1.0 + x * x + eta_c) / rwa_denominator(det, eta_c, gamma, kappa);
    Ok(1.0 - depth0 * la * redistribution)
}
