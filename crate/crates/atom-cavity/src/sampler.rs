//! Deterministic layout generation and seeded Monte-Carlo averaging.
//!
//! Every sample is generated from a counter-based stream keyed by
//! (seed, sample index), so results do not depend on evaluation order or
//! thread count, and sample i of a run is reproducible in isolation.

use nalgebra::Vector3;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use rayon::prelude::*;

use crate::cavity_ensemble::{self, CavityEnsembleLayout};
use crate::ensemble::{self, CollectiveFactorEstimate, EnsembleLayout};
use crate::error::{require_positive, Error, Result};

/// Spatial arrangements the sampler can produce.
///
/// The deterministic lattices realize the ordered limits of the collective
/// factors in the crossed-beam frame (drive along x, detected mode or
/// resonator axis along z):
/// Bragg and antinode lattices phase every atom identically, the node
/// lattice decouples the ensemble from the standing wave, and
/// `Commensurate(n)` places n equally spaced atoms per beat wavelength so
/// the forward sum cancels.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LayoutKind {
    UniformRandom,
    AntinodeLattice,
    NodeLattice,
    BraggLattice,
    Commensurate(u32),
}

impl LayoutKind {
    pub fn name(&self) -> String {
        match self {
            LayoutKind::UniformRandom => "uniform".into(),
            LayoutKind::AntinodeLattice => "antinode".into(),
            LayoutKind::NodeLattice => "node".into(),
            LayoutKind::BraggLattice => "bragg".into(),
            LayoutKind::Commensurate(n) => format!("commensurate:{n}"),
        }
    }
}

impl std::str::FromStr for LayoutKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "uniform" => Ok(LayoutKind::UniformRandom),
            "antinode" => Ok(LayoutKind::AntinodeLattice),
            "node" => Ok(LayoutKind::NodeLattice),
            "bragg" => Ok(LayoutKind::BraggLattice),
            other => match other.strip_prefix("commensurate:") {
                Some(n) => n
                    .parse::<u32>()
                    .map(LayoutKind::Commensurate)
                    .map_err(|_| {
                        Error::invalid(format!(
                            "bad atoms-per-wavelength count in layout kind '{other}'"
                        ))
                    }),
                None => Err(Error::invalid(format!(
                    "unknown layout kind '{other}' (expected uniform, antinode, node, bragg \
                     or commensurate:<n>)"
                ))),
            },
        }
    }
}

/// Recipe for one layout family.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LayoutSpec {
    pub kind: LayoutKind,
    pub n_atoms: usize,
    /// Cube edge for uniform sampling, in wavelengths. Integer values keep
    /// the periodic averages exactly unbiased.
    pub extent_wavelengths: f64,
    pub seed: u64,
}

impl LayoutSpec {
    pub fn uniform(n_atoms: usize, extent_wavelengths: f64, seed: u64) -> Self {
        LayoutSpec {
            kind: LayoutKind::UniformRandom,
            n_atoms,
            extent_wavelengths,
            seed,
        }
    }

    pub fn lattice(kind: LayoutKind, n_atoms: usize) -> Self {
        LayoutSpec {
            kind,
            n_atoms,
            extent_wavelengths: 10.0,
            seed: 0,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.n_atoms == 0 {
            return Err(Error::invalid("layout needs n_atoms >= 1"));
        }
        match self.kind {
            LayoutKind::UniformRandom => {
                require_positive("extent_wavelengths", self.extent_wavelengths)?;
            }
            LayoutKind::Commensurate(n) => {
                if n < 2 {
                    return Err(Error::invalid(
                        "commensurate layouts need at least 2 atoms per wavelength",
                    ));
                }
                if !self.n_atoms.is_multiple_of(n as usize) {
                    return Err(Error::invalid(format!(
                        "commensurate cancellation needs n_atoms divisible by {n}, got {}",
                        self.n_atoms
                    )));
                }
            }
            _ => {}
        }
        Ok(())
    }
}

/// Positions of sample `sample_index` of the family, deterministic in
/// (seed, sample_index). Lattice kinds consume no randomness and are the
/// same for every sample.
pub fn generate_positions(
    spec: &LayoutSpec,
    k: f64,
    sample_index: u64,
) -> Result<Vec<Vector3<f64>>> {
    spec.validate()?;
    let k = require_positive("k", k)?;
    let lambda = 2.0 * std::f64::consts::PI / k;
    let n = spec.n_atoms;
    let positions = match spec.kind {
        LayoutKind::UniformRandom => {
            let mut rng = ChaCha12Rng::seed_from_u64(spec.seed);
            rng.set_stream(sample_index);
            let ext = spec.extent_wavelengths * lambda;
            (0..n)
                .map(|_| {
                    Vector3::new(
                        rng.random_range(0.0..ext),
                        rng.random_range(0.0..ext),
                        rng.random_range(0.0..ext),
                    )
                })
                .collect()
        }
        LayoutKind::AntinodeLattice => (0..n)
            .map(|j| {
                let s = j as f64 * lambda;
                Vector3::new(s, 0.0, s)
            })
            .collect(),
        LayoutKind::NodeLattice => (0..n)
            .map(|j| Vector3::new(0.0, 0.0, 0.25 * lambda + 0.5 * j as f64 * lambda))
            .collect(),
        LayoutKind::BraggLattice => (0..n)
            .map(|j| {
                let s = 0.5 * j as f64 * lambda;
                Vector3::new(s, 0.0, -s)
            })
            .collect(),
        LayoutKind::Commensurate(per) => (0..n)
            .map(|j| {
                let s = 0.5 * j as f64 * lambda / per as f64;
                Vector3::new(s, 0.0, -s)
            })
            .collect(),
    };
    Ok(positions)
}

/// Crossed-beam free-space layout: drive along x, detected mode along z.
pub fn generate_free_space(spec: &LayoutSpec, k: f64) -> Result<EnsembleLayout> {
    let positions = generate_positions(spec, k, 0)?;
    EnsembleLayout::new(
        positions,
        Vector3::new(k, 0.0, 0.0),
        Vector3::new(0.0, 0.0, k),
    )
}

/// In-resonator layout: standing wave along z, sidebeam along x.
pub fn generate_cavity(spec: &LayoutSpec, k: f64) -> Result<CavityEnsembleLayout> {
    CavityEnsembleLayout::new(generate_positions(spec, k, 0)?, k)
}

/// Estimators usable by name (CLI and bindings). Real-valued quantities
/// come back in the real part.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NamedEstimator {
    /// Phase-matching factor F (complex).
    F,
    /// |F|^2.
    FSq,
    /// Standing-wave coupling H.
    H,
    /// Phased emission factor G (complex).
    G,
    /// |G|^2.
    GSq,
}

impl NamedEstimator {
    pub fn evaluate(&self, positions: &[Vector3<f64>], k: f64) -> Result<Complex64> {
        match self {
            NamedEstimator::F | NamedEstimator::FSq => {
                let layout = EnsembleLayout::new(
                    positions.to_vec(),
                    Vector3::new(k, 0.0, 0.0),
                    Vector3::new(0.0, 0.0, k),
                )?;
                let f = ensemble::collective_f(&layout);
                Ok(match self {
                    NamedEstimator::F => f,
                    _ => Complex64::new(f.norm_sqr(), 0.0),
                })
            }
            NamedEstimator::H => {
                let layout = CavityEnsembleLayout::new(positions.to_vec(), k)?;
                Ok(Complex64::new(cavity_ensemble::collective_h(&layout), 0.0))
            }
            NamedEstimator::G | NamedEstimator::GSq => {
                let layout = CavityEnsembleLayout::new(positions.to_vec(), k)?;
                let g = cavity_ensemble::collective_g(&layout);
                Ok(match self {
                    NamedEstimator::G => g,
                    _ => Complex64::new(g.norm_sqr(), 0.0),
                })
            }
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            NamedEstimator::F => "F",
            NamedEstimator::FSq => "F2",
            NamedEstimator::H => "H",
            NamedEstimator::G => "G",
            NamedEstimator::GSq => "G2",
        }
    }
}

impl std::str::FromStr for NamedEstimator {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "F" => Ok(NamedEstimator::F),
            "F2" => Ok(NamedEstimator::FSq),
            "H" => Ok(NamedEstimator::H),
            "G" => Ok(NamedEstimator::G),
            "G2" => Ok(NamedEstimator::GSq),
            other => Err(Error::invalid(format!(
                "unknown estimator '{other}' (expected F, F2, H, G or G2)"
            ))),
        }
    }
}

/// Monte-Carlo average of `estimator` over `n_samples` independent layouts.
/// Samples are evaluated in parallel but reduced in index order, so the
/// result is identical for any thread count.
pub fn monte_carlo<E>(
    spec: &LayoutSpec,
    k: f64,
    n_samples: usize,
    estimator: E,
) -> Result<CollectiveFactorEstimate>
where
    E: Fn(&[Vector3<f64>], f64) -> Result<Complex64> + Sync,
{
    if n_samples < 2 {
        return Err(Error::invalid(
            "monte_carlo needs n_samples >= 2 for an error estimate",
        ));
    }
    spec.validate()?;
    let samples: Vec<Complex64> = (0..n_samples as u64)
        .into_par_iter()
        .map(|i| {
            let positions = generate_positions(spec, k, i)
                .map_err(|e| Error::Sample {
                    index: i,
                    source: Box::new(e),
                })?;
            estimator(&positions, k).map_err(|e| Error::Sample {
                index: i,
                source: Box::new(e),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    CollectiveFactorEstimate::from_samples(&samples)
}

/// Monte Carlo with a named estimator.
pub fn monte_carlo_named(
    spec: &LayoutSpec,
    k: f64,
    n_samples: usize,
    estimator: NamedEstimator,
) -> Result<CollectiveFactorEstimate> {
    monte_carlo(spec, k, n_samples, |positions, k| {
        estimator.evaluate(positions, k)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cavity_ensemble::CollectiveFactors;
    

    const K: f64 = 2.0 * std::f64::consts::PI / 780e-9;

    #[test]
    fn same_seed_same_positions() {
        let spec = LayoutSpec::uniform(25, 10.0, 42);
        let a = generate_positions(&spec, K, 7).unwrap();
        let b = generate_positions(&spec, K, 7).unwrap();
        assert_eq!(a, b);
        // different stream, different layout
        let c = generate_positions(&spec, K, 8).unwrap();
        assert_ne!(a, c);
        // different seed, different layout
        let spec2 = LayoutSpec::uniform(25, 10.0, 43);
        assert_ne!(a, generate_positions(&spec2, K, 7).unwrap());
    }

    #[test]
    fn bragg_lattice_is_fully_phased() {
        let spec = LayoutSpec::lattice(LayoutKind::BraggLattice, 16);
        let fs = generate_free_space(&spec, K).unwrap();
        assert!((ensemble::collective_f(&fs).norm() - 1.0).abs() <= 1e-12);
        // the same arrangement is fully phased for resonator emission
        let cav = generate_cavity(&spec, K).unwrap();
        let factors = CollectiveFactors::from_layout(&cav).unwrap();
        assert!((factors.g() - Complex64::new(1.0, 0.0)).norm() < 1e-10);
        assert!((factors.h() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn commensurate_pairs_cancel() {
        for per in [2u32, 3, 5] {
            let spec = LayoutSpec::lattice(LayoutKind::Commensurate(per), 30);
            let fs = generate_free_space(&spec, K).unwrap();
            assert!(
                ensemble::collective_f(&fs).norm() <= 1e-12,
                "|F| too large for {per} atoms per wavelength"
            );
        }
        // indivisible count rejected
        let bad = LayoutSpec::lattice(LayoutKind::Commensurate(4), 30);
        assert!(generate_free_space(&bad, K).is_err());
        let degenerate = LayoutSpec::lattice(LayoutKind::Commensurate(1), 30);
        assert!(generate_free_space(&degenerate, K).is_err());
    }

    #[test]
    fn node_lattice_decouples() {
        let spec = LayoutSpec::lattice(LayoutKind::NodeLattice, 9);
        let cav = generate_cavity(&spec, K).unwrap();
        assert!(cavity_ensemble::collective_h(&cav) < 1e-12);
    }

    #[test]
    fn random_moments_match_theory() {
        // <|F|^2> = 1/N, <H> = 1/2, <|G|^2> = 1/(2N) for uniform positions
        // over an integer number of wavelengths
        let n_atoms = 50;
        let spec = LayoutSpec::uniform(n_atoms, 10.0, 2024);
        let samples = 2000;

        let f2 = monte_carlo_named(&spec, K, samples, NamedEstimator::FSq).unwrap();
        let expect = 1.0 / n_atoms as f64;
        assert!(
            (f2.mean.re - expect).abs() <= 5.0 * f2.std_error,
            "<|F|^2> = {} vs {expect} (se {})",
            f2.mean.re,
            f2.std_error
        );

        let h = monte_carlo_named(&spec, K, samples, NamedEstimator::H).unwrap();
        assert!((h.mean.re - 0.5).abs() <= 5.0 * h.std_error);

        let g2 = monte_carlo_named(&spec, K, samples, NamedEstimator::GSq).unwrap();
        let expect_g = 0.5 / n_atoms as f64;
        assert!((g2.mean.re - expect_g).abs() <= 5.0 * g2.std_error);

        // complex means vanish
        let f = monte_carlo_named(&spec, K, samples, NamedEstimator::F).unwrap();
        assert!(f.mean.norm() <= 5.0 * f.std_error);
        assert!(f.std_error > 0.0);
    }

    #[test]
    fn thread_count_does_not_change_results() {
        let spec = LayoutSpec::uniform(20, 10.0, 99);
        let wide = monte_carlo_named(&spec, K, 500, NamedEstimator::FSq).unwrap();
        let single = rayon::ThreadPoolBuilder::new()
            .num_threads(1)
            .build()
            .unwrap()
            .install(|| monte_carlo_named(&spec, K, 500, NamedEstimator::FSq).unwrap());
        assert_eq!(wide.mean, single.mean);
        assert_eq!(wide.second_moment, single.second_moment);
        assert_eq!(wide.std_error, single.std_error);
    }

    #[test]
    fn standard_error_shrinks_as_sqrt_samples() {
        let spec = LayoutSpec::uniform(30, 10.0, 7);
        let small = monte_carlo_named(&spec, K, 1000, NamedEstimator::FSq).unwrap();
        let large = monte_carlo_named(&spec, K, 10000, NamedEstimator::FSq).unwrap();
        let ratio = small.std_error / large.std_error;
        let ideal = 10f64.sqrt();
        assert!(
            ratio > ideal / 1.5 && ratio < ideal * 1.5,
            "SE ratio {ratio} too far from sqrt(10)"
        );
    }

    #[test]
    fn estimator_failure_carries_sample_index() {
        let spec = LayoutSpec::uniform(5, 10.0, 1);
        let err = monte_carlo(&spec, K, 10, |_, _| {
            Err(Error::invalid("deliberate failure"))
        })
        .unwrap_err();
        match err {
            Error::Sample { index, .. } => assert!(index < 10),
            other => panic!("expected sample error, got {other}"),
        }
    }

    #[test]
    fn unknown_estimator_name_rejected() {
        assert!("Q".parse::<NamedEstimator>().is_err());
        assert_eq!("F2".parse::<NamedEstimator>().unwrap(), NamedEstimator::FSq);
    }

    #[test]
    fn layout_kind_names_round_trip() {
        for kind in [
            LayoutKind::UniformRandom,
            LayoutKind::AntinodeLattice,
            LayoutKind::NodeLattice,
            LayoutKind::BraggLattice,
            LayoutKind::Commensurate(3),
        ] {
            assert_eq!(kind.name().parse::<LayoutKind>().unwrap(), kind);
        }
        assert!("hexagonal".parse::<LayoutKind>().is_err());
        assert!("commensurate:x".parse::<LayoutKind>().is_err());
    }

    #[test]
    fn uniform_extent_respected() {
        let spec = LayoutSpec::uniform(200, 3.0, 5);
        let lambda = 2.0 * std::f64::consts::PI / K;
        for p in generate_positions(&spec, K, 0).unwrap() {
            for c in [p.x, p.y, p.z] {
                assert!((0.0..3.0 * lambda).contains(&c));
            }
        }
    }

    #[test]
    fn erroneous_specs_rejected() {
        assert!(generate_positions(&LayoutSpec::uniform(0, 10.0, 1), K, 0).is_err());
        assert!(generate_positions(&LayoutSpec::uniform(5, -1.0, 1), K, 0).is_err());
        assert!(generate_positions(&LayoutSpec::uniform(5, 10.0, 1), 0.0, 0).is_err());
        assert!(monte_carlo_named(&LayoutSpec::uniform(5, 10.0, 1), K, 1, NamedEstimator::H).is_err());
    }
}
