//! Detuning sweeps over the coupled atom-resonator response, peak finding
//! and splitting measurement, RWA error reports, and the correspondence
//! between the classical coupling rate and the quantized-field one.
//!
//! Scans work in natural units: detunings in Γ, resonator detuning in κ.
//! A scenario is either abstract (η_c and κ/Γ given directly) or physical
//! (wavelength, waist, length, mirror transmission), the latter carrying
//! enough geometry for the quantized coupling rate.

use rayon::prelude::*;
use serde::Serialize;

use crate::atom::AtomTransition;
use crate::cavity::{self, CavitySpec};
use crate::constants::{EPSILON_0, HBAR};
use crate::coupling;
use crate::error::{require_finite, require_non_negative, require_positive, Error, Result};
use crate::mode::{DetuningPair, GaussianMode};

/// Which port drives the system, and therefore which response columns a
/// scan fills in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ScanMode {
    /// Probe through a resonator mirror: transmission and free-space loss.
    DrivenCavity,
    /// Atom excited from the side: emission into the resonator and into
    /// free space, relative to the bare-atom free-space emission.
    DrivenAtom,
    /// Weak probe crossing the resonator axis through an optically thin
    /// sample: sidebeam transmission.
    Sidebeam,
}

impl std::str::FromStr for ScanMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "driven-cavity" => Ok(ScanMode::DrivenCavity),
            "driven-atom" => Ok(ScanMode::DrivenAtom),
            "sidebeam" => Ok(ScanMode::Sidebeam),
            other => Err(Error::invalid(format!(
                "unknown scan mode '{other}' (expected driven-cavity, driven-atom or sidebeam)"
            ))),
        }
    }
}

/// Dimensionless scenario: resonator cooperativity and linewidth ratio.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AbstractScenario {
    eta_c: f64,
    kappa_over_gamma: f64,
}

impl AbstractScenario {
    pub fn new(eta_c: f64, kappa_over_gamma: f64) -> Result<Self> {
        Ok(AbstractScenario {
            eta_c: require_non_negative("eta_c", eta_c)?,
            kappa_over_gamma: require_positive("kappa_over_gamma", kappa_over_gamma)?,
        })
    }

    pub fn eta_c(&self) -> f64 {
        self.eta_c
    }

    pub fn kappa_over_gamma(&self) -> f64 {
        self.kappa_over_gamma
    }
}

/// Geometric scenario: a transition, a mode it couples to, and the
/// resonator supporting that mode.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalScenario {
    atom: AtomTransition,
    mode: GaussianMode,
    cavity: CavitySpec,
}

impl PhysicalScenario {
    pub fn new(atom: AtomTransition, mode: GaussianMode, cavity: CavitySpec) -> Self {
        PhysicalScenario { atom, mode, cavity }
    }

    pub fn atom(&self) -> &AtomTransition {
        &self.atom
    }

    pub fn mode(&self) -> &GaussianMode {
        &self.mode
    }

    pub fn cavity(&self) -> &CavitySpec {
        &self.cavity
    }

    /// Dimensionless parameters implied by the geometry.
    pub fn abstract_scenario(&self) -> Result<AbstractScenario> {
        AbstractScenario::new(
            self.cavity.eta_c(&self.mode),
            self.cavity.kappa() / self.atom.gamma(),
        )
    }
}

/// Either parameterization; scans accept both, geometry-only quantities
/// require the physical one.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Scenario {
    Abstract(AbstractScenario),
    Physical(PhysicalScenario),
}

impl Scenario {
    pub fn abstract_parameters(&self) -> Result<AbstractScenario> {
        match self {
            Scenario::Abstract(a) => Ok(*a),
            Scenario::Physical(p) => p.abstract_scenario(),
        }
    }

    /// Linewidth used to convert grid units to absolute frequencies.
    /// Abstract scenarios work in units of Γ = 1.
    pub fn gamma(&self) -> f64 {
        match self {
            Scenario::Abstract(_) => 1.0,
            Scenario::Physical(p) => p.atom.gamma(),
        }
    }

    /// Quantized-field coupling rate; needs real geometry.
    pub fn g_quantum(&self) -> Result<f64> {
        match self {
            Scenario::Abstract(_) => Err(Error::Unsupported(
                "the quantized coupling rate needs a physical scenario (wavelength, waist, length)"
                    .into(),
            )),
            Scenario::Physical(p) => g_quantum(&p.atom, &p.mode, p.cavity.length()),
        }
    }
}

/// Uniform detuning grid in units of Γ. Points sit on integer multiples
/// of the step, so a symmetric range contains exactly negated pairs and
/// zero lands on a grid point whenever the range covers it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DetuningGrid {
    min_gamma: f64,
    max_gamma: f64,
    step_gamma: f64,
}

impl DetuningGrid {
    const MAX_POINTS: i64 = 20_000_000;

    pub fn new(min_gamma: f64, max_gamma: f64, step_gamma: f64) -> Result<Self> {
        require_finite("min_gamma", min_gamma)?;
        require_finite("max_gamma", max_gamma)?;
        require_positive("step_gamma", step_gamma)?;
        if min_gamma >= max_gamma {
            return Err(Error::invalid(format!(
                "detuning range needs min < max, got [{min_gamma}, {max_gamma}]"
            )));
        }
        let grid = DetuningGrid {
            min_gamma,
            max_gamma,
            step_gamma,
        };
        let (i0, i1) = grid.index_range();
        if i1 - i0 + 1 < 2 {
            return Err(Error::invalid(
                "detuning grid needs at least 2 points; shrink the step",
            ));
        }
        if i1 - i0 + 1 > Self::MAX_POINTS {
            return Err(Error::invalid(format!(
                "detuning grid would have {} points; enlarge the step",
                i1 - i0 + 1
            )));
        }
        Ok(grid)
    }

    fn index_range(&self) -> (i64, i64) {
        (
            (self.min_gamma / self.step_gamma).round() as i64,
            (self.max_gamma / self.step_gamma).round() as i64,
        )
    }

    pub fn step_gamma(&self) -> f64 {
        self.step_gamma
    }

    pub fn len(&self) -> usize {
        let (i0, i1) = self.index_range();
        (i1 - i0 + 1) as usize
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Grid values in units of Γ, strictly increasing.
    pub fn values(&self) -> Vec<f64> {
        let (i0, i1) = self.index_range();
        (i0..=i1).map(|i| i as f64 * self.step_gamma).collect()
    }
}

impl Default for DetuningGrid {
    fn default() -> Self {
        DetuningGrid {
            min_gamma: -4.0,
            max_gamma: 4.0,
            step_gamma: 0.01,
        }
    }
}

/// Full description of one sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScanScenario {
    pub scan: ScanMode,
    pub scenario: Scenario,
    /// Resonator offset (ω_A − ω_c)/Γ. The probe laser is swept, so the
    /// two detunings stay tied: δ_c = Δ + offset·Γ.
    pub cavity_offset_gamma: f64,
    /// Resonant absorption depth of the bare sample, sidebeam scans only.
    pub depth0: f64,
}

impl ScanScenario {
    pub fn new(scan: ScanMode, scenario: Scenario) -> Self {
        ScanScenario {
            scan,
            scenario,
            cavity_offset_gamma: 0.0,
            depth0: 0.1,
        }
    }
}

/// Canned scenarios with the standard demonstration parameters.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Preset {
    /// Strongly coupled driven resonator, η_c=10, κ=Γ: split resonance.
    Fig3,
    /// Same cooperativity with a fast resonator, η_c=10, κ=10Γ: a sharp
    /// central absorption dip instead of a resolved splitting.
    Fig4,
    /// Side-driven atom in the η_c=10, κ=Γ resonator: emission
    /// redistribution and suppression.
    Fig5,
    /// Thin sample probed across the η_c=1, κ=Γ/10 resonator with a 10%
    /// deep line: narrow induced-transparency window.
    Fig6,
}

impl Preset {
    pub const ALL: [Preset; 4] = [Preset::Fig3, Preset::Fig4, Preset::Fig5, Preset::Fig6];

    pub fn name(&self) -> &'static str {
        match self {
            Preset::Fig3 => "fig3",
            Preset::Fig4 => "fig4",
            Preset::Fig5 => "fig5",
            Preset::Fig6 => "fig6",
        }
    }

    pub fn scan_scenario(&self) -> ScanScenario {
        let (scan, eta_c, kappa_over_gamma, depth0) = match self {
            Preset::Fig3 => (ScanMode::DrivenCavity, 10.0, 1.0, 0.0),
            Preset::Fig4 => (ScanMode::DrivenCavity, 10.0, 10.0, 0.0),
            Preset::Fig5 => (ScanMode::DrivenAtom, 10.0, 1.0, 0.0),
            Preset::Fig6 => (ScanMode::Sidebeam, 1.0, 0.1, 0.1),
        };
        let scenario = Scenario::Abstract(
            AbstractScenario::new(eta_c, kappa_over_gamma).expect("preset parameters are valid"),
        );
        ScanScenario {
            scan,
            scenario,
            cavity_offset_gamma: 0.0,
            depth0,
        }
    }
}

impl std::str::FromStr for Preset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "fig3" => Ok(Preset::Fig3),
            "fig4" => Ok(Preset::Fig4),
            "fig5" => Ok(Preset::Fig5),
            "fig6" => Ok(Preset::Fig6),
            other => Err(Error::invalid(format!(
                "unknown preset '{other}' (expected fig3, fig4, fig5 or fig6)"
            ))),
        }
    }
}

/// One grid point. Columns not produced by the scan mode are None and
/// serialize as null (JSON) or an empty field (CSV).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SpectrumRow {
    pub delta_over_gamma: f64,
    pub delta_c_over_kappa: f64,
    /// Driven resonator: transmitted power over input power.
    pub transmission: Option<f64>,
    /// Driven resonator: power scattered to free space over input power.
    pub fs_emission: Option<f64>,
    /// Driven atom: resonator output power over the bare-atom free-space
    /// emission.
    pub cavity_emission: Option<f64>,
    /// Driven atom: free-space emission over the bare-atom value.
    pub fs_emission_ratio: Option<f64>,
    /// Thin-sample probe transmission across the resonator mode.
    #[serde(rename = "sidebeam_T")]
    pub sidebeam_t: Option<f64>,
}

/// Scenario summary embedded in serialized tables.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScenarioDescriptor {
    pub scan: ScanMode,
    pub eta_c: f64,
    pub kappa_over_gamma: f64,
    pub cavity_offset_gamma: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub depth0: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub geometry: Option<GeometryDescriptor>,
    pub grid: DetuningGrid,
}

/// Geometry summary for physical scenarios (SI units).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GeometryDescriptor {
    pub wavelength: f64,
    pub waist: f64,
    pub length: f64,
    pub q_sq: f64,
    pub gamma: f64,
}

pub const CSV_HEADER: &str = "delta_over_gamma,delta_c_over_kappa,transmission,fs_emission,cavity_emission,fs_emission_ratio,sidebeam_T";

/// Sweep result: the scenario it came from plus one row per grid point.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectrumTable {
    pub scenario: ScenarioDescriptor,
    pub rows: Vec<SpectrumRow>,
}

impl SpectrumTable {
    /// CSV with a `# {...}` scenario comment, a fixed header, and one
    /// line per row. Floats carry 12 significant digits; absent columns
    /// are empty fields. Always `\n` line endings and `.` decimals.
    pub fn to_csv(&self) -> Result<String> {
        let scenario_json = serde_json::to_string(&self.scenario)
            .map_err(|e| Error::invalid(format!("scenario not serializable: {e}")))?;
        let mut out = String::with_capacity(64 * (self.rows.len() + 2));
        out.push_str("# ");
        out.push_str(&scenario_json);
        out.push('\n');
        out.push_str(CSV_HEADER);
        out.push('\n');
        let field = |v: Option<f64>| v.map(crate::fmt_sig12).unwrap_or_default();
        for row in &self.rows {
            out.push_str(&crate::fmt_sig12(row.delta_over_gamma));
            out.push(',');
            out.push_str(&crate::fmt_sig12(row.delta_c_over_kappa));
            out.push(',');
            out.push_str(&field(row.transmission));
            out.push(',');
            out.push_str(&field(row.fs_emission));
            out.push(',');
            out.push_str(&field(row.cavity_emission));
            out.push(',');
            out.push_str(&field(row.fs_emission_ratio));
            out.push(',');
            out.push_str(&field(row.sidebeam_t));
            out.push('\n');
        }
        Ok(out)
    }

    pub fn to_json(&self) -> Result<String> {
        let mut s = serde_json::to_string_pretty(self)
            .map_err(|e| Error::invalid(format!("table not serializable: {e}")))?;
        s.push('\n');
        Ok(s)
    }

    /// Structural checks: strictly increasing grid, power ratios finite
    /// and non-negative, transmissions at most 1 (up to rounding).
    pub fn validate(&self) -> Result<()> {
        if self.rows.len() < 2 {
            return Err(Error::Invariant("spectrum table has fewer than 2 rows".into()));
        }
        for pair in self.rows.windows(2) {
            if pair[1].delta_over_gamma <= pair[0].delta_over_gamma {
                return Err(Error::Invariant(format!(
                    "detuning grid not strictly increasing at {}",
                    pair[1].delta_over_gamma
                )));
            }
        }
        for row in &self.rows {
            let bounded = [row.transmission, row.sidebeam_t];
            let free = [row.fs_emission, row.cavity_emission, row.fs_emission_ratio];
            for v in bounded.iter().chain(free.iter()).flatten() {
                if !v.is_finite() || *v < 0.0 {
                    return Err(Error::Invariant(format!(
                        "power ratio {v} at delta = {} out of range",
                        row.delta_over_gamma
                    )));
                }
            }
            for v in bounded.iter().flatten() {
                if *v > 1.0 + 1e-12 {
                    return Err(Error::Invariant(format!(
                        "transmission {v} at delta = {} exceeds unity",
                        row.delta_over_gamma
                    )));
                }
            }
        }
        Ok(())
    }
}

/// Sweep the probe over `grid`, filling the columns selected by the scan
/// mode. The probe is swept with atom and resonator fixed, so
/// δ_c = Δ + (ω_A − ω_c).
pub fn scan(config: &ScanScenario, grid: &DetuningGrid) -> Result<SpectrumTable> {
    let ab = config.scenario.abstract_parameters()?;
    let gamma = config.scenario.gamma();
    let kappa = ab.kappa_over_gamma() * gamma;
    let eta_c = ab.eta_c();
    require_finite("cavity_offset_gamma", config.cavity_offset_gamma)?;

    // rows are independent; collect keeps grid order, so the table is
    // identical for any thread count
    let rows = grid
        .values()
        .into_par_iter()
        .map(|d| {
            let det = DetuningPair::new(d * gamma, (d + config.cavity_offset_gamma) * gamma)?;
            let (mut transmission, mut fs_emission) = (None, None);
            let (mut cavity_emission, mut fs_emission_ratio) = (None, None);
            let mut sidebeam_t = None;
            match config.scan {
                ScanMode::DrivenCavity => {
                    transmission = Some(cavity::transmission_rwa(det, eta_c, gamma, kappa)?);
                    fs_emission = Some(cavity::fs_emission_driven_cavity_rwa(
                        det, eta_c, gamma, kappa,
                    )?);
                }
                ScanMode::DrivenAtom => {
                    cavity_emission = Some(cavity::cavity_emission_rwa(det, eta_c, gamma, kappa)?);
                    fs_emission_ratio = Some(cavity::fs_emission_driven_atom_rwa(
                        det, eta_c, gamma, kappa,
                    )?);
                }
                ScanMode::Sidebeam => {
                    sidebeam_t = Some(cavity::sidebeam_transmission(
                        det,
                        eta_c,
                        gamma,
                        kappa,
                        config.depth0,
                    )?);
                }
            }
            Ok(SpectrumRow {
                delta_over_gamma: d,
                delta_c_over_kappa: det.delta_c / kappa,
                transmission,
                fs_emission,
                cavity_emission,
                fs_emission_ratio,
                sidebeam_t,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let geometry = match &config.scenario {
        Scenario::Abstract(_) => None,
        Scenario::Physical(p) => Some(GeometryDescriptor {
            wavelength: p.mode.wavelength(),
            waist: p.mode.waist(),
            length: p.cavity.length(),
            q_sq: p.cavity.q_sq(),
            gamma: p.atom.gamma(),
        }),
    };
    let table = SpectrumTable {
        scenario: ScenarioDescriptor {
            scan: config.scan,
            eta_c,
            kappa_over_gamma: ab.kappa_over_gamma(),
            cavity_offset_gamma: config.cavity_offset_gamma,
            depth0: match config.scan {
                ScanMode::Sidebeam => Some(config.depth0),
                _ => None,
            },
            geometry,
            grid: *grid,
        },
        rows,
    };
    table.validate()?;
    Ok(table)
}

/// Table column addressable by the peak finder.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpectrumColumn {
    Transmission,
    FsEmission,
    CavityEmission,
    FsEmissionRatio,
    SidebeamT,
}

impl SpectrumColumn {
    fn extract(&self, row: &SpectrumRow) -> Option<f64> {
        match self {
            SpectrumColumn::Transmission => row.transmission,
            SpectrumColumn::FsEmission => row.fs_emission,
            SpectrumColumn::CavityEmission => row.cavity_emission,
            SpectrumColumn::FsEmissionRatio => row.fs_emission_ratio,
            SpectrumColumn::SidebeamT => row.sidebeam_t,
        }
    }
}

/// Local maxima of one spectrum column.
///
/// `positions` and `heights` list every interior maximum in ascending
/// position order. `splitting` is the distance between the two highest
/// maxima; it is absent when there are fewer than two, or when the grid
/// step exceeds Γ/50 and is too coarse to support a splitting claim.
#[derive(Debug, Clone, PartialEq)]
pub struct PeakReport {
    pub positions: Vec<f64>,
    pub heights: Vec<f64>,
    pub splitting: Option<f64>,
}

/// 3-point local maxima refined by parabolic interpolation.
pub fn find_peaks(table: &SpectrumTable, column: SpectrumColumn) -> Result<PeakReport> {
    let step = table.scenario.grid.step_gamma();
    let series: Vec<(f64, f64)> = table
        .rows
        .iter()
        .filter_map(|r| column.extract(r).map(|y| (r.delta_over_gamma, y)))
        .collect();
    if series.len() != table.rows.len() {
        return Err(Error::invalid(
            "requested column is not populated by this scan mode",
        ));
    }
    if series.len() < 3 {
        return Err(Error::invalid("peak finding needs at least 3 rows"));
    }

    let mut peaks: Vec<(f64, f64)> = Vec::new();
    for j in 1..series.len() - 1 {
        let (x0, y0) = series[j];
        let ym = series[j - 1].1;
        let yp = series[j + 1].1;
        if y0 > ym && y0 > yp {
            // parabola through the three points; the vertex is guaranteed
            // inside (x0 - step, x0 + step) by the strict inequalities
            let a = 0.5 * (ym + yp) - y0;
            let b = 0.5 * (yp - ym);
            let (dx, height) = if a < 0.0 {
                (-b / (2.0 * a), y0 - b * b / (4.0 * a))
            } else {
                (0.0, y0)
            };
            peaks.push((x0 + dx * step, height));
        }
    }

    let splitting = if peaks.len() >= 2 && step <= 1.0 / 50.0 + 1e-12 {
        let mut by_height = peaks.clone();
        by_height.sort_by(|l, r| r.1.total_cmp(&l.1));
        Some((by_height[0].0 - by_height[1].0).abs())
    } else {
        None
    };
    Ok(PeakReport {
        positions: peaks.iter().map(|p| p.0).collect(),
        heights: peaks.iter().map(|p| p.1).collect(),
        splitting,
    })
}

/// Normal-mode splitting 2g of the coupled system, in the same units as
/// κ and Γ.
pub fn vacuum_rabi_classical(eta_c: f64, kappa: f64, gamma: f64) -> Result<f64> {
    let eta_c = require_non_negative("eta_c", eta_c)?;
    let kappa = require_positive("kappa", kappa)?;
    let gamma = require_positive("gamma", gamma)?;
    Ok((eta_c * kappa * gamma).sqrt())
}

/// Single-photon coupling rate of the quantized field, from the dipole
/// matrix element implied by the linewidth and the mode volume πw²L/4.
/// Equals √(η_c κ Γ)/2 for any resonant geometry.
pub fn g_quantum(atom: &AtomTransition, mode: &GaussianMode, cavity_length: f64) -> Result<f64> {
    let length = require_positive("cavity_length", cavity_length)?;
    let k0 = atom.k0();
    let dipole = (3.0 * std::f64::consts::PI * EPSILON_0 * HBAR * atom.gamma() / k0.powi(3)).sqrt();
    let volume = std::f64::consts::PI * mode.waist().powi(2) * length / 4.0;
    Ok(dipole * (atom.omega_a() / (2.0 * EPSILON_0 * HBAR * volume)).sqrt())
}

/// One grid point of the RWA error report.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RwaErrorRow {
    pub delta_over_gamma: f64,
    pub transmission_rel_err: f64,
    pub fs_emission_rel_err: f64,
}

/// Relative difference between the exact-polarizability resonator spectra
/// and their RWA forms, row by row, for a resonator tuned to the atom.
/// The error grows with Γ/ω_A and with |Δ|/ω_A.
pub fn rwa_error_report(
    atom: &AtomTransition,
    mode: &GaussianMode,
    cavity: &CavitySpec,
    grid: &DetuningGrid,
) -> Result<Vec<RwaErrorRow>> {
    let gamma = atom.gamma();
    let kappa = cavity.kappa();
    let eta_c = cavity.eta_c(mode);
    let mut rows = Vec::with_capacity(grid.len());
    for d in grid.values() {
        let delta = d * gamma;
        let omega = atom.omega_a() + delta;
        let beta = coupling::beta_exact(omega, atom, mode)?;
        let t_exact = cavity::transmission_exact(&beta, delta, cavity)?;
        let fs_exact = cavity::fs_emission_exact(&beta, delta, cavity)?;
        let det = DetuningPair::new(delta, delta)?;
        let t_rwa = cavity::transmission_rwa(det, eta_c, gamma, kappa)?;
        let fs_rwa = cavity::fs_emission_driven_cavity_rwa(det, eta_c, gamma, kappa)?;
        rows.push(RwaErrorRow {
            delta_over_gamma: d,
            transmission_rel_err: (t_exact - t_rwa).abs() / t_rwa,
            fs_emission_rel_err: (fs_exact - fs_rwa).abs() / fs_rwa,
        });
    }
    Ok(rows)
}
