//! Classical linear response of a two-level atom coupled to a Gaussian
//! light mode, in free space and inside a symmetric standing-wave
//! resonator.
//!
//! The atom is an oscillating dipole with a complex polarizability; its
//! coupling to a chosen paraxial mode reduces to one dimensionless
//! complex number β per drive frequency. Everything else in the crate is
//! built from β: free-space scattering and phase shifts, resonator
//! transmission and emission spectra with the atom's backaction included
//! self-consistently, ensemble generalizations weighted by collective
//! interference factors, and seeded Monte-Carlo averages over atomic
//! position distributions.
//!
//! Frequency-domain quantities follow one convention throughout: Δ is the
//! probe detuning from the atomic line (units of Γ where dimensionless),
//! δ_c the detuning from the resonator (units of κ), and the narrow-line
//! forms use the absorptive and dispersive Lorentzians of [`lineshape`].
//! Field amplitudes are scaled so that |E|²/2 is a power; power ratios
//! are therefore independent of that scale.

pub mod atom;
pub mod cavity;
pub mod cavity_ensemble;
pub mod constants;
pub mod coupling;
pub mod ensemble;
pub mod error;
pub mod farfield;
pub mod lineshape;
pub mod mode;
pub mod sampler;
pub mod spectra;

pub use atom::AtomTransition;
pub use cavity::CavitySpec;
pub use cavity_ensemble::{CavityEnsembleLayout, CollectiveFactors};
pub use coupling::ComplexCoupling;
pub use ensemble::{CollectiveFactorEstimate, EnsembleLayout};
pub use error::{Error, Result};
pub use farfield::RadialGrid;
pub use mode::{DetuningPair, GaussianMode, ModeAmplitude};
pub use sampler::{LayoutKind, LayoutSpec, NamedEstimator};
pub use spectra::{
    AbstractScenario, DetuningGrid, PhysicalScenario, Preset, ScanMode, ScanScenario, Scenario,
    SpectrumColumn, SpectrumTable,
};

/// Formats a float with 12 significant digits in scientific notation.
/// All CSV writers in the crate use this, so emitted files are
/// reproducible byte for byte.
pub fn fmt_sig12(x: f64) -> String {
    format!("{x:.11e}")
}

#[cfg(test)]
mod tests {
    use super::fmt_sig12;

    #[test]
    fn csv_float_format_is_fixed_width_significand() {
        assert_eq!(fmt_sig12(1.0 / 121.0), "8.26446280992e-3");
        assert_eq!(fmt_sig12(0.0), "0.00000000000e0");
        assert_eq!(fmt_sig12(-2.5), "-2.50000000000e0");
        let round_trip: f64 = fmt_sig12(0.1).parse().unwrap();
        assert!((round_trip - 0.1).abs() < 1e-12);
    }
}
