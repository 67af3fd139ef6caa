//! Free-space ensembles: attenuation, collective phase, coherent emission.

use nalgebra::Vector3;
use num_complex::Complex64;

use crate::coupling::ComplexCoupling;
use crate::error::{require_non_negative, Error, Result};

/// Atoms at fixed positions in a crossed-beam geometry: a drive beam with
/// wavevector `k_in` and a detected Gaussian mode along `k_mode`. Elastic
/// scattering requires both wavevectors to share a magnitude.
#[derive(Debug, Clone, PartialEq)]
pub struct EnsembleLayout {
    positions: Vec<Vector3<f64>>,
    k_in: Vector3<f64>,
    k_mode: Vector3<f64>,
}

impl EnsembleLayout {
    pub fn new(
        positions: Vec<Vector3<f64>>,
        k_in: Vector3<f64>,
        k_mode: Vector3<f64>,
    ) -> Result<Self> {
        if positions.is_empty() {
            return Err(Error::invalid("layout needs at least one atom"));
        }
        for (i, p) in positions.iter().enumerate() {
            if !(p.x.is_finite() && p.y.is_finite() && p.z.is_finite()) {
                return Err(Error::invalid(format!("position {i} is not finite")));
            }
        }
        let (n_in, n_mode) = (k_in.norm(), k_mode.norm());
        if !(n_in.is_finite() && n_mode.is_finite()) || n_in <= 0.0 || n_mode <= 0.0 {
            return Err(Error::invalid("wavevectors must be finite and nonzero"));
        }
        if (n_in - n_mode).abs() > 1e-9 * n_in {
            return Err(Error::invalid(format!(
                "elastic scattering requires |k_in| = |k_mode|, got {n_in} vs {n_mode}"
            )));
        }
        Ok(EnsembleLayout {
            positions,
            k_in,
            k_mode,
        })
    }

    pub fn n_atoms(&self) -> usize {
        self.positions.len()
    }

    pub fn positions(&self) -> &[Vector3<f64>] {
        &self.positions
    }

    pub fn k_in(&self) -> Vector3<f64> {
        self.k_in
    }

    pub fn k_mode(&self) -> Vector3<f64> {
        self.k_mode
    }

    /// CSV dump of the positions in wavelength units: `index,x,y,z`.
    pub fn to_csv(&self) -> String {
        positions_to_csv(&self.positions, 2.0 * std::f64::consts::PI / self.k_in.norm())
    }
}

/// Shared layout serialization, positions in units of the given wavelength.
pub(crate) fn positions_to_csv(positions: &[Vector3<f64>], lambda: f64) -> String {
    let mut out = String::from("index,x,y,z\n");
    for (i, p) in positions.iter().enumerate() {
        out.push_str(&format!(
            "{},{},{},{}\n",
            i,
            crate::fmt_sig12(p.x / lambda),
            crate::fmt_sig12(p.y / lambda),
            crate::fmt_sig12(p.z / lambda)
        ));
    }
    out
}

/// Phase-matching factor F = (1/N) sum_j exp(i (k_in - k_mode) . r_j).
/// |F| <= 1 with equality on Bragg-ordered layouts; random positions give
/// F near zero with <|F|^2> = 1/N.
pub fn collective_f(layout: &EnsembleLayout) -> Complex64 {
    let dk = layout.k_in - layout.k_mode;
    let n = layout.n_atoms() as f64;
    let mut sum = Complex64::new(0.0, 0.0);
    for p in layout.positions() {
        let phase = dk.dot(p);
        sum += Complex64::new(phase.cos(), phase.sin());
    }
    sum / n
}

/// Resonator-free attenuation of the drive by N atoms,
/// P_out / P_in = exp(-Im(2 N beta)).
///
/// Deliberately position-free: each atom's forward-scattered field picks up
/// exactly the propagation phase of the drive it absorbed, so the
/// contributions stay phase matched no matter where the atoms sit. Only
/// the count enters.
pub fn beer_transmission(n_atoms: usize, beta: &ComplexCoupling) -> Result<f64> {
    if n_atoms == 0 {
        return Err(Error::invalid("beer_transmission needs n_atoms >= 1"));
    }
    if beta.beta().im < 0.0 {
        return Err(Error::invalid("attenuation needs Im(beta) >= 0 (no gain)"));
    }
    Ok((-2.0 * n_atoms as f64 * beta.beta().im).exp())
}

/// Warning predicate: the single-pass linearization behind the ensemble
/// spectra assumes a thin sample, Im(2 N beta) <= 0.2.
pub fn is_optically_thick(n_atoms: usize, beta: &ComplexCoupling) -> bool {
    2.0 * n_atoms as f64 * beta.beta().im > 0.2
}

/// Collective phase shift of the transmitted beam, Re(N beta).
pub fn ensemble_phase(n_atoms: usize, beta: &ComplexCoupling) -> f64 {
    n_atoms as f64 * beta.beta().re
}

/// Power the ensemble coherently scatters into one direction of the
/// detected mode, as a fraction of the incident power:
/// P_M / P_in = (1/2) |F|^2 N^2 eta_fs.
pub fn ensemble_mode_power_ratio(f: Complex64, n_atoms: usize, eta_fs: f64) -> Result<f64> {
    let eta_fs = require_non_negative("eta_fs", eta_fs)?;
    if n_atoms == 0 {
        return Err(Error::invalid("ensemble_mode_power_ratio needs n_atoms >= 1"));
    }
    let n = n_atoms as f64;
    Ok(0.5 * f.norm_sqr() * n * n * eta_fs)
}

/// Monte-Carlo estimate of a collective quantity: mean, raw second moment
/// of the magnitude, and the standard error of the mean.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CollectiveFactorEstimate {
    pub mean: Complex64,
    pub second_moment: f64,
    pub std_error: f64,
    pub n_samples: usize,
}

impl CollectiveFactorEstimate {
    /// Reduces per-sample values in index order (deterministic regardless
    /// of how the samples were produced).
    pub fn from_samples(samples: &[Complex64]) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::invalid("estimate needs at least one sample"));
        }
        let n = samples.len() as f64;
        let mut sum = Complex64::new(0.0, 0.0);
        let mut sum_sq = 0.0;
        for s in samples {
            sum += s;
            sum_sq += s.norm_sqr();
        }
        let mean = sum / n;
        let second_moment = sum_sq / n;
        let variance = if samples.len() > 1 {
            ((second_moment - mean.norm_sqr()) * n / (n - 1.0)).max(0.0)
        } else {
            0.0
        };
        let std_error = (variance / n).sqrt();
        Ok(CollectiveFactorEstimate {
            mean,
            second_moment,
            std_error,
            n_samples: samples.len(),
        })
    }
}
