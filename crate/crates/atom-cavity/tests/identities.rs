//! Randomized conservation and bound checks. These hold for every valid
//! input, not just the tuned scenarios, so they get fuzzed.

use atom_cavity::cavity::{fs_emission_driven_cavity_rwa, transmission_rwa};
use atom_cavity::cavity_ensemble::{collective_g, collective_h};
use atom_cavity::coupling::beta_exact;
use atom_cavity::ensemble::collective_f;
use atom_cavity::{
    AtomTransition, CavityEnsembleLayout, DetuningPair, EnsembleLayout, GaussianMode,
};
use nalgebra::Vector3;
use proptest::prelude::*;

const LAMBDA: f64 = 780e-9;
const K: f64 = 2.0 * std::f64::consts::PI / LAMBDA;

fn scaled(points: &[(f64, f64, f64)]) -> Vec<Vector3<f64>> {
    points
        .iter()
        .map(|&(x, y, z)| Vector3::new(x * LAMBDA, y * LAMBDA, z * LAMBDA))
        .collect()
}

proptest! {
    #[test]
    fn optical_theorem_holds_everywhere(
        relative in 0.5f64..1.5,
        kw in 10.0f64..200.0,
    ) {
        let atom = AtomTransition::from_wavelength(LAMBDA, 2.0 * std::f64::consts::PI * 6.07e6)
            .unwrap();
        let mode = GaussianMode::new(atom.k0(), kw / atom.k0()).unwrap();
        let omega = relative * atom.omega_a();
        let coupling = beta_exact(omega, &atom, &mode).unwrap();
        let eta_fs = mode.eta_fs_at(omega / atom_cavity::constants::C);
        let residual = coupling.optical_theorem_residual(eta_fs).abs();
        prop_assert!(residual / coupling.beta().norm_sqr() <= 1e-9);
    }

    #[test]
    fn phase_matched_sum_never_exceeds_one(
        points in prop::collection::vec((0.0f64..10.0, 0.0f64..10.0, 0.0f64..10.0), 1..60),
    ) {
        let layout = EnsembleLayout::new(
            scaled(&points),
            Vector3::new(K, 0.0, 0.0),
            Vector3::new(0.0, 0.0, K),
        )
        .unwrap();
        prop_assert!(collective_f(&layout).norm() <= 1.0 + 1e-12);
    }

    #[test]
    fn emission_factor_bounded_by_coupling_weight(
        points in prop::collection::vec((0.0f64..10.0, 0.0f64..10.0, 0.0f64..10.0), 1..60),
    ) {
        let layout = CavityEnsembleLayout::new(scaled(&points), K).unwrap();
        prop_assert!(collective_g(&layout).norm_sqr() <= collective_h(&layout) + 1e-12);
    }

    #[test]
    fn resonant_power_bookkeeping_closes(
        eta_c in 0.0f64..200.0,
        kappa in 0.01f64..100.0,
    ) {
        let det = DetuningPair::new(0.0, 0.0).unwrap();
        let t = transmission_rwa(det, eta_c, 1.0, kappa).unwrap();
        let fs = fs_emission_driven_cavity_rwa(det, eta_c, 1.0, kappa).unwrap();
        let closed = (1.0 + 2.0 * eta_c) / ((1.0 + eta_c) * (1.0 + eta_c));
        prop_assert!((t + fs - closed).abs() <= 1e-12);
        prop_assert!(t + fs <= 1.0 + 1e-12);
    }
}
