//! Ensembles in the resonator: collective coupling and emission factors.
//!
//! N atoms pinned in the standing wave couple through two layout averages:
//!
//!   H = (1/N) sum_j cos^2(k z_j)           (coupling to the standing wave)
//!   G = (1/N) sum_j e^{i k x_j} cos(k z_j) (phased emission into the mode)
//!
//! with the resonator along z and the sidebeam along x. Driven-resonator
//! spectra are the single-atom ones with eta_c -> H N eta_c; sidebeam
//! scattering into the resonator picks up |G|^2 N^2 eta_c and is
//! superradiant for ordered layouts.

use nalgebra::Vector3;
use num_complex::Complex64;

use crate::error::{require_non_negative, require_positive, Error, Result};
use crate::lineshape;
use crate::mode::DetuningPair;

/// Atom positions inside the resonator: standing wave along z with an
/// antinode at z = 0, sidebeam propagating along x, shared wavenumber k.
#[derive(Debug, Clone, PartialEq)]
pub struct CavityEnsembleLayout {
    positions: Vec<Vector3<f64>>,
    k: f64,
}

impl CavityEnsembleLayout {
    pub fn new(positions: Vec<Vector3<f64>>, k: f64) -> Result<Self> {
        let k = require_positive("k", k)?;
        if positions.is_empty() {
            return Err(Error::invalid("layout needs at least one atom"));
        }
        for (i, p) in positions.iter().enumerate() {
            if !(p.x.is_finite() && p.y.is_finite() && p.z.is_finite()) {
                return Err(Error::invalid(format!("position {i} is not finite")));
            }
        }
        Ok(CavityEnsembleLayout { positions, k })
    }

    pub fn n_atoms(&self) -> usize {
        self.positions.len()
    }

    pub fn positions(&self) -> &[Vector3<f64>] {
        &self.positions
    }

    pub fn k(&self) -> f64 {
        self.k
    }

    /// CSV dump of the positions in wavelength units: `index,x,y,z`.
    pub fn to_csv(&self) -> String {
        crate::ensemble::positions_to_csv(&self.positions, 2.0 * std::f64::consts::PI / self.k)
    }
}

/// Standing-wave coupling average H in [0, 1].
pub fn collective_h(layout: &CavityEnsembleLayout) -> f64 {
    let k = layout.k();
    let sum: f64 = layout
        .positions()
        .iter()
        .map(|p| (k * p.z).cos().powi(2))
        .sum();
    sum / layout.n_atoms() as f64
}

/// Phased emission average G, |G|^2 <= H by Cauchy-Schwarz.
pub fn collective_g(layout: &CavityEnsembleLayout) -> Complex64 {
    let k = layout.k();
    let mut sum = Complex64::new(0.0, 0.0);
    for p in layout.positions() {
        let phase = k * p.x;
        sum += Complex64::new(phase.cos(), phase.sin()) * (k * p.z).cos();
    }
    sum / layout.n_atoms() as f64
}

/// Collective factors of one concrete layout, validated together.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CollectiveFactors {
    g: Complex64,
    h: f64,
    n_atoms: usize,
}

/// Slack for inequalities whose equality case (perfectly ordered layouts)
/// sits exactly on the floating-point boundary.
const FACTOR_SLACK: f64 = 1e-12;

impl CollectiveFactors {
    pub fn new(g: Complex64, h: f64, n_atoms: usize) -> Result<Self> {
        if n_atoms == 0 {
            return Err(Error::invalid("collective factors need n_atoms >= 1"));
        }
        if !h.is_finite() || !(-FACTOR_SLACK..=1.0 + FACTOR_SLACK).contains(&h) {
            return Err(Error::invalid(format!("H = {h} outside [0, 1]")));
        }
        if !g.re.is_finite() || !g.im.is_finite() {
            return Err(Error::invalid("G must be finite"));
        }
        if g.norm_sqr() > h + FACTOR_SLACK {
            return Err(Error::invalid(format!(
                "|G|^2 = {} exceeds H = {h}; no layout can produce this pair",
                g.norm_sqr()
            )));
        }
        Ok(CollectiveFactors { g, h, n_atoms })
    }

    pub fn from_layout(layout: &CavityEnsembleLayout) -> Result<Self> {
        Self::new(collective_g(layout), collective_h(layout), layout.n_atoms())
    }

    pub fn g(&self) -> Complex64 {
        self.g
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn n_atoms(&self) -> usize {
        self.n_atoms
    }

    /// Collective cooperativity H N eta_c that replaces eta_c in the
    /// driven-resonator spectra.
    pub fn collective_eta(&self, eta_c: f64) -> f64 {
        self.h * self.n_atoms as f64 * eta_c
    }
}

fn validate_rwa_params(eta_c: f64, gamma: f64, kappa: f64) -> Result<()> {
    require_non_negative("eta_c", eta_c)?;
    require_positive("gamma", gamma)?;
    require_positive("kappa", kappa)?;
    Ok(())
}

/// Shared denominator with the collective coupling H N eta_c.
fn ensemble_denominator(
    det: DetuningPair,
    factors: &CollectiveFactors,
    eta_c: f64,
    gamma: f64,
    kappa: f64,
) -> f64 {
    let eta_n = factors.collective_eta(eta_c);
    let re = 1.0 + eta_n * lineshape::absorptive(det.delta_a, gamma);
    let im = 2.0 * det.delta_c / kappa + eta_n * lineshape::dispersive(det.delta_a, gamma);
    re * re + im * im
}

/// Driven-resonator transmission with N pinned atoms.
pub fn ensemble_transmission_rwa(
    det: DetuningPair,
    factors: &CollectiveFactors,
    eta_c: f64,
    gamma: f64,
    kappa: f64,
) -> Result<f64> {
    validate_rwa_params(eta_c, gamma, kappa)?;
    Ok(1.0 / ensemble_denominator(det, factors, eta_c, gamma, kappa))
}

/// Free-space scattering of the driven resonator with N pinned atoms,
/// P_fs / P_in = 2 H N eta_c L_abs / |B_N|^2.
pub fn ensemble_fs_emission_rwa(
    det: DetuningPair,
    factors: &CollectiveFactors,
    eta_c: f64,
    gamma: f64,
    kappa: f64,
) -> Result<f64> {
    validate_rwa_params(eta_c, gamma, kappa)?;
    let la = lineshape::absorptive(det.delta_a, gamma);
    Ok(2.0 * factors.collective_eta(eta_c) * la
        / ensemble_denominator(det, factors, eta_c, gamma, kappa))
}

/// Collective line pulling in units of kappa: -(H N eta_c / 2) L_disp.
pub fn ensemble_cavity_shift_rwa(
    delta_a: f64,
    factors: &CollectiveFactors,
    eta_c: f64,
    gamma: f64,
) -> Result<f64> {
    require_non_negative("eta_c", eta_c)?;
    require_positive("gamma", gamma)?;
    Ok(-0.5 * factors.collective_eta(eta_c) * lineshape::dispersive(delta_a, gamma))
}

/// Sidebeam-driven ensemble: power emitted through the resonator mirrors,
/// normalized to one atom's bare free-space scattering:
/// P_c / P0_fs = |G|^2 N^2 eta_c / |B_N|^2.
pub fn ensemble_cavity_scattering_rwa(
    det: DetuningPair,
    factors: &CollectiveFactors,
    eta_c: f64,
    gamma: f64,
    kappa: f64,
) -> Result<f64> {
    validate_rwa_params(eta_c, gamma, kappa)?;
    let n = factors.n_atoms() as f64;
    Ok(factors.g().norm_sqr() * n * n * eta_c
        / ensemble_denominator(det, factors, eta_c, gamma, kappa))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cavity::{
        cavity_emission_rwa, cavity_shift_rwa, fs_emission_driven_cavity_rwa, transmission_rwa,
    };
    use approx::assert_relative_eq;

    fn det(delta_a: f64, delta_c: f64) -> DetuningPair {
        DetuningPair::new(delta_a, delta_c).unwrap()
    }

    fn single_atom_factors() -> CollectiveFactors {
        CollectiveFactors::new(Complex64::new(1.0, 0.0), 1.0, 1).unwrap()
    }

    fn antinode_layout(n: usize, lambda: f64) -> CavityEnsembleLayout {
        let k = 2.0 * std::f64::consts::PI / lambda;
        let positions = (0..n)
            .map(|j| Vector3::new(j as f64 * lambda, 0.0, j as f64 * lambda))
            .collect();
        CavityEnsembleLayout::new(positions, k).unwrap()
    }

    fn node_layout(n: usize, lambda: f64) -> CavityEnsembleLayout {
        let k = 2.0 * std::f64::consts::PI / lambda;
        let positions = (0..n)
            .map(|j| Vector3::new(0.0, 0.0, 0.25 * lambda + 0.5 * j as f64 * lambda))
            .collect();
        CavityEnsembleLayout::new(positions, k).unwrap()
    }

    #[test]
    fn ordered_layout_factors() {
        let layout = antinode_layout(16, 780e-9);
        let h = collective_h(&layout);
        let g = collective_g(&layout);
        assert!((h - 1.0).abs() < 1e-12);
        assert!((g - Complex64::new(1.0, 0.0)).norm() < 1e-10);
        // nodes decouple entirely
        let nodes = node_layout(16, 780e-9);
        assert!(collective_h(&nodes) < 1e-12);
        assert!(collective_g(&nodes).norm() < 1e-12);
    }

    #[test]
    fn cauchy_schwarz_bound() {
        // pseudo-irregular but deterministic positions
        let lambda = 1.0;
        let k = 2.0 * std::f64::consts::PI;
        for seed in 1..8 {
            let positions: Vec<_> = (0..40)
                .map(|j| {
                    let t = (j * seed) as f64 * 0.6180339887;
                    Vector3::new(t.fract() * 7.3, 0.0, (t * 1.7).fract() * 9.1)
                })
                .collect();
            let layout = CavityEnsembleLayout::new(positions, k).unwrap();
            let h = collective_h(&layout);
            let g = collective_g(&layout);
            assert!(g.norm_sqr() <= h + 1e-12, "|G|^2 = {} > H = {h}", g.norm_sqr());
            assert!((0.0..=1.0 + 1e-12).contains(&h));
            // and the pair is accepted as consistent
            CollectiveFactors::new(g, h, layout.n_atoms()).unwrap();
        }
        let _ = lambda;
    }

    #[test]
    fn inconsistent_pair_rejected() {
        assert!(CollectiveFactors::new(Complex64::new(1.0, 0.0), 0.5, 10).is_err());
        assert!(CollectiveFactors::new(Complex64::new(0.0, 0.0), 1.5, 10).is_err());
        assert!(CollectiveFactors::new(Complex64::new(0.0, 0.0), 0.5, 0).is_err());
    }

    #[test]
    fn reduces_to_single_atom() {
        let f = single_atom_factors();
        let (eta, gamma, kappa) = (10.0, 1.0, 1.0);
        for d in [-2.0, -0.5, 0.0, 0.3, 1.7] {
            let dp = det(d, d);
            assert_relative_eq!(
                ensemble_transmission_rwa(dp, &f, eta, gamma, kappa).unwrap(),
                transmission_rwa(dp, eta, gamma, kappa).unwrap(),
                max_relative = 1e-12
            );
            assert_relative_eq!(
                ensemble_fs_emission_rwa(dp, &f, eta, gamma, kappa).unwrap(),
                fs_emission_driven_cavity_rwa(dp, eta, gamma, kappa).unwrap(),
                max_relative = 1e-12
            );
            assert_relative_eq!(
                ensemble_cavity_scattering_rwa(dp, &f, eta, gamma, kappa).unwrap(),
                cavity_emission_rwa(dp, eta, gamma, kappa).unwrap(),
                max_relative = 1e-12
            );
            assert_relative_eq!(
                ensemble_cavity_shift_rwa(d, &f, eta, gamma).unwrap(),
                cavity_shift_rwa(d, eta, gamma).unwrap(),
                max_relative = 1e-12
            );
        }
    }

    #[test]
    fn collective_coupling_scales_transmission() {
        // 8 antinode atoms at eta_c = 1 look like a single eta_c = 8 atom
        let layout = antinode_layout(8, 780e-9);
        let f = CollectiveFactors::from_layout(&layout).unwrap();
        let t = ensemble_transmission_rwa(det(0.0, 0.0), &f, 1.0, 1.0, 1.0).unwrap();
        assert_relative_eq!(t, 1.0 / 81.0, max_relative = 1e-9);
    }

    #[test]
    fn node_trapped_ensemble_is_invisible() {
        let layout = node_layout(12, 780e-9);
        let f = CollectiveFactors::from_layout(&layout).unwrap();
        let t = ensemble_transmission_rwa(det(0.0, 0.1), &f, 5.0, 1.0, 1.0).unwrap();
        // bare resonator Lorentzian
        assert_relative_eq!(t, 1.0 / (1.0 + 0.04), max_relative = 1e-9);
        let s = ensemble_cavity_scattering_rwa(det(0.0, 0.0), &f, 5.0, 1.0, 1.0).unwrap();
        assert!(s < 1e-20);
    }

    #[test]
    fn absorption_grows_with_h() {
        let (eta, gamma, kappa) = (0.3, 1.0, 1.0);
        let mut last = -1.0;
        for h in [0.0, 0.25, 0.5, 0.75, 1.0] {
            let f = CollectiveFactors::new(Complex64::new(0.0, 0.0), h, 10).unwrap();
            // absorbed fraction 1 - T - (coherent fs emission) on resonance
            let t = ensemble_transmission_rwa(det(0.0, 0.0), &f, eta, gamma, kappa).unwrap();
            let absorbed = 1.0 - t;
            assert!(absorbed > last, "absorption not increasing at H = {h}");
            last = absorbed;
        }
    }

    #[test]
    fn superradiant_quadrupling_far_detuned() {
        // far detuned the denominator rounds to exactly 1, so doubling N
        // exactly quadruples the emitted power
        let (eta, gamma, kappa) = (1.0, 1.0, 1.0);
        let dp = det(1e10, 0.0);
        let ordered =
            |n: usize| CollectiveFactors::new(Complex64::new(1.0, 0.0), 1.0, n).unwrap();
        for n in [4usize, 8] {
            let p1 = ensemble_cavity_scattering_rwa(dp, &ordered(n), eta, gamma, kappa).unwrap();
            let p2 =
                ensemble_cavity_scattering_rwa(dp, &ordered(2 * n), eta, gamma, kappa).unwrap();
            assert_eq!(p2, 4.0 * p1);
        }
    }

    #[test]
    fn shift_scales_with_collective_coupling() {
        let layout = antinode_layout(10, 780e-9);
        let f = CollectiveFactors::from_layout(&layout).unwrap();
        let s = ensemble_cavity_shift_rwa(10.0, &f, 1.0, 1.0).unwrap();
        let single = cavity_shift_rwa(10.0, 1.0, 1.0).unwrap();
        assert_relative_eq!(s, 10.0 * single, max_relative = 1e-9);
    }
}
