//! Command-line front end: spectrum scans, seeded ensemble averages, and
//! the identity suite.
//!
//! Exit codes: 0 success, 1 failed identity or invariant, 2 usage or
//! configuration error, 3 I/O error. Every command is deterministic for a
//! fixed flag set, so archived outputs can be reproduced byte for byte.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::Value;

use atom_cavity::sampler::{self, LayoutSpec};
use atom_cavity::spectra::{
    self, AbstractScenario, DetuningGrid, PhysicalScenario, Preset, ScanMode, ScanScenario,
    Scenario,
};
use atom_cavity::{
    AtomTransition, CavitySpec, Error, GaussianMode, LayoutKind, NamedEstimator,
};

use crate::checks::{self, Perturbation};

#[derive(Parser)]
#[command(
    name = "atom-cavity",
    version,
    about = "Linear response of a driven atom coupled to a standing-wave resonator mode"
)]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sweep the probe detuning and write a spectrum table
    Scan(Box<ScanArgs>),
    /// Average a collective factor over seeded random layouts
    Ensemble(EnsembleArgs),
    /// Run the cross-module identity suite
    Check(CheckArgs),
}

#[derive(Args)]
#[command(allow_negative_numbers = true)]
struct ScanArgs {
    /// Canned scenario: fig3, fig4, fig5 or fig6
    #[arg(long)]
    preset: Option<String>,
    /// Resonator cooperativity (dimensionless scenario)
    #[arg(long)]
    eta: Option<f64>,
    /// Resonator/atom linewidth ratio (dimensionless scenario)
    #[arg(long)]
    kappa_over_gamma: Option<f64>,
    /// Wavelength in m (geometric scenario; needs the other four)
    #[arg(long)]
    lambda: Option<f64>,
    /// Mode waist in m (geometric scenario)
    #[arg(long)]
    waist: Option<f64>,
    /// Resonator length in m (geometric scenario)
    #[arg(long)]
    length: Option<f64>,
    /// Mirror power transmission per mirror (geometric scenario)
    #[arg(long)]
    qsq: Option<f64>,
    /// Atomic linewidth in rad/s (geometric scenario)
    #[arg(long)]
    gamma: Option<f64>,
    /// Driven port: driven-cavity, driven-atom or sidebeam
    #[arg(long)]
    scan_mode: Option<String>,
    /// Bare-line absorption depth for sidebeam scans
    #[arg(long)]
    depth0: Option<f64>,
    /// Resonator offset (omega_A - omega_c)/Gamma
    #[arg(long)]
    cavity_offset: Option<f64>,
    /// Lower edge of the detuning grid, in Gamma
    #[arg(long)]
    dmin: Option<f64>,
    /// Upper edge of the detuning grid, in Gamma
    #[arg(long)]
    dmax: Option<f64>,
    /// Detuning grid step, in Gamma
    #[arg(long)]
    dstep: Option<f64>,
    /// Destination file
    #[arg(short, long)]
    output: Option<PathBuf>,
    /// Output format: csv or json
    #[arg(long)]
    format: Option<String>,
    /// Flat JSON file mirroring these flags; explicit flags win
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Args)]
struct EnsembleArgs {
    /// Layout family: uniform, antinode, node, bragg or commensurate:<n>
    #[arg(long)]
    kind: Option<String>,
    /// Number of atoms
    #[arg(long)]
    n: Option<usize>,
    /// Uniform sampling cube edge, in wavelengths
    #[arg(long)]
    extent: Option<f64>,
    /// Collective quantity: F, F2, H, G or G2
    #[arg(long)]
    estimator: Option<String>,
    /// Number of Monte-Carlo samples
    #[arg(long)]
    samples: Option<usize>,
    /// Random seed; required, so runs are reproducible
    #[arg(long)]
    seed: Option<u64>,
    /// Wavelength in m (sets the length scale of the layouts)
    #[arg(long)]
    lambda: Option<f64>,
    /// Destination file; stdout when omitted
    #[arg(short, long)]
    output: Option<PathBuf>,
    /// Flat JSON file mirroring these flags; explicit flags win
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Args)]
struct CheckArgs {
    /// Fault-injection hook proving the suite detects violations:
    /// --perturb beta 1e-3 scales the coupling inside the optical-theorem
    /// check and must make it fail
    #[arg(long, num_args = 2, value_names = ["QUANTITY", "EPS"])]
    perturb: Option<Vec<String>>,
}

/// Failures carrying their process exit code.
enum Failure {
    Usage(String),
    Check(String),
    Io(String),
}

impl Failure {
    fn report(self) -> ExitCode {
        let (code, message) = match self {
            Failure::Check(m) => (1, m),
            Failure::Usage(m) => (2, m),
            Failure::Io(m) => (3, m),
        };
        eprintln!("error: {message}");
        ExitCode::from(code)
    }
}

fn lib_failure(e: Error) -> Failure {
    fn is_invariant(e: &Error) -> bool {
        match e {
            Error::Invariant(_) => true,
            Error::Sample { source, .. } => is_invariant(source),
            _ => false,
        }
    }
    if is_invariant(&e) {
        Failure::Check(e.to_string())
    } else {
        Failure::Usage(e.to_string())
    }
}

pub fn run() -> ExitCode {
    let result = match Cli::parse().command {
        Command::Scan(args) => cmd_scan(*args),
        Command::Ensemble(args) => cmd_ensemble(args),
        Command::Check(args) => cmd_check(args),
    };
    result.unwrap_or_else(Failure::report)
}

fn load_config(path: &Path) -> Result<serde_json::Map<String, Value>, Failure> {
    let text = fs::read_to_string(path)
        .map_err(|e| Failure::Io(format!("cannot read config {}: {e}", path.display())))?;
    let value: Value = serde_json::from_str(&text)
        .map_err(|e| Failure::Usage(format!("config {} is not valid JSON: {e}", path.display())))?;
    match value {
        Value::Object(map) => Ok(map),
        _ => Err(Failure::Usage(
            "config file must be a flat JSON object of flag names to values".into(),
        )),
    }
}

fn reject_unknown_keys(map: serde_json::Map<String, Value>) -> Result<(), Failure> {
    if let Some(key) = map.keys().next() {
        return Err(Failure::Usage(format!("unknown config key '{key}'")));
    }
    Ok(())
}

fn take_f64(
    map: &mut serde_json::Map<String, Value>,
    key: &str,
    slot: &mut Option<f64>,
) -> Result<(), Failure> {
    if let Some(value) = map.remove(key) {
        let parsed = value
            .as_f64()
            .ok_or_else(|| Failure::Usage(format!("config key '{key}' must be a number")))?;
        slot.get_or_insert(parsed);
    }
    Ok(())
}

fn take_string(
    map: &mut serde_json::Map<String, Value>,
    key: &str,
    slot: &mut Option<String>,
) -> Result<(), Failure> {
    if let Some(value) = map.remove(key) {
        let parsed = value
            .as_str()
            .ok_or_else(|| Failure::Usage(format!("config key '{key}' must be a string")))?;
        slot.get_or_insert(parsed.to_string());
    }
    Ok(())
}

fn take_u64(
    map: &mut serde_json::Map<String, Value>,
    key: &str,
    slot: &mut Option<u64>,
) -> Result<(), Failure> {
    if let Some(value) = map.remove(key) {
        let parsed = value
            .as_u64()
            .ok_or_else(|| Failure::Usage(format!("config key '{key}' must be a non-negative integer")))?;
        slot.get_or_insert(parsed);
    }
    Ok(())
}

fn take_usize(
    map: &mut serde_json::Map<String, Value>,
    key: &str,
    slot: &mut Option<usize>,
) -> Result<(), Failure> {
    let mut raw = slot.map(|v| v as u64);
    take_u64(map, key, &mut raw)?;
    *slot = raw.map(|v| v as usize);
    Ok(())
}

fn take_path(
    map: &mut serde_json::Map<String, Value>,
    key: &str,
    slot: &mut Option<PathBuf>,
) -> Result<(), Failure> {
    let mut raw = slot.take().map(|p| p.to_string_lossy().into_owned());
    take_string(map, key, &mut raw)?;
    *slot = raw.map(PathBuf::from);
    Ok(())
}

fn cmd_scan(mut args: ScanArgs) -> Result<ExitCode, Failure> {
    if let Some(path) = args.config.take() {
        let mut map = load_config(&path)?;
        take_string(&mut map, "preset", &mut args.preset)?;
        take_f64(&mut map, "eta", &mut args.eta)?;
        take_f64(&mut map, "kappa-over-gamma", &mut args.kappa_over_gamma)?;
        take_f64(&mut map, "lambda", &mut args.lambda)?;
        take_f64(&mut map, "waist", &mut args.waist)?;
        take_f64(&mut map, "length", &mut args.length)?;
        take_f64(&mut map, "qsq", &mut args.qsq)?;
        take_f64(&mut map, "gamma", &mut args.gamma)?;
        take_string(&mut map, "scan-mode", &mut args.scan_mode)?;
        take_f64(&mut map, "depth0", &mut args.depth0)?;
        take_f64(&mut map, "cavity-offset", &mut args.cavity_offset)?;
        take_f64(&mut map, "dmin", &mut args.dmin)?;
        take_f64(&mut map, "dmax", &mut args.dmax)?;
        take_f64(&mut map, "dstep", &mut args.dstep)?;
        take_path(&mut map, "output", &mut args.output)?;
        take_string(&mut map, "format", &mut args.format)?;
        reject_unknown_keys(map)?;
    }

    let geometric = [args.lambda, args.waist, args.length, args.qsq, args.gamma];
    let n_geometric = geometric.iter().filter(|f| f.is_some()).count();
    let dimensionless = args.eta.is_some() || args.kappa_over_gamma.is_some();

    let (scan, scenario, preset_depth0) = if let Some(name) = &args.preset {
        if dimensionless || n_geometric > 0 || args.scan_mode.is_some() {
            return Err(Failure::Usage(
                "--preset fixes the scenario; drop --eta, --kappa-over-gamma, --scan-mode \
                 and the geometric flags"
                    .into(),
            ));
        }
        let preset: Preset = name.parse().map_err(lib_failure)?;
        let sc = preset.scan_scenario();
        (sc.scan, sc.scenario, Some(sc.depth0))
    } else {
        let scan = match &args.scan_mode {
            Some(s) => s.parse::<ScanMode>().map_err(lib_failure)?,
            None => ScanMode::DrivenCavity,
        };
        if dimensionless {
            if n_geometric > 0 {
                return Err(Failure::Usage(
                    "choose either --eta/--kappa-over-gamma or the geometric flags, not both"
                        .into(),
                ));
            }
            let (Some(eta), Some(ratio)) = (args.eta, args.kappa_over_gamma) else {
                return Err(Failure::Usage(
                    "dimensionless scans need both --eta and --kappa-over-gamma".into(),
                ));
            };
            let ab = AbstractScenario::new(eta, ratio).map_err(lib_failure)?;
            (scan, Scenario::Abstract(ab), None)
        } else if n_geometric == geometric.len() {
            let atom = AtomTransition::from_wavelength(args.lambda.unwrap(), args.gamma.unwrap())
                .map_err(lib_failure)?;
            let mode = GaussianMode::from_wavelength(args.lambda.unwrap(), args.waist.unwrap())
                .map_err(lib_failure)?;
            let resonator = CavitySpec::new(args.qsq.unwrap(), args.length.unwrap())
                .map_err(lib_failure)?;
            if atom.broad_line() {
                eprintln!(
                    "warning: linewidth is a sizable fraction of the transition frequency; \
                     narrow-line spectra lose accuracy"
                );
            }
            if !mode.is_paraxial() {
                eprintln!("warning: waist close to the wavelength; mode is not paraxial");
            }
            if resonator.high_loss() {
                eprintln!(
                    "warning: mirror transmission above 10%; single-round-trip averaging \
                     is questionable"
                );
            }
            (
                scan,
                Scenario::Physical(PhysicalScenario::new(atom, mode, resonator)),
                None,
            )
        } else if n_geometric > 0 {
            return Err(Failure::Usage(
                "geometric scans need all of --lambda, --waist, --length, --qsq and --gamma"
                    .into(),
            ));
        } else {
            return Err(Failure::Usage(
                "scan needs --preset, or --eta with --kappa-over-gamma, or the geometric flags"
                    .into(),
            ));
        }
    };

    let mut scan_scenario = ScanScenario::new(scan, scenario);
    scan_scenario.cavity_offset_gamma = args.cavity_offset.unwrap_or(0.0);
    if let Some(depth0) = args.depth0.or(preset_depth0) {
        scan_scenario.depth0 = depth0;
    }

    let grid = DetuningGrid::new(
        args.dmin.unwrap_or(-4.0),
        args.dmax.unwrap_or(4.0),
        args.dstep.unwrap_or(0.01),
    )
    .map_err(lib_failure)?;

    let output = args
        .output
        .ok_or_else(|| Failure::Usage("scan needs --output <path>".into()))?;
    let format = args.format.as_deref().unwrap_or("csv");

    let table = spectra::scan(&scan_scenario, &grid).map_err(lib_failure)?;
    let payload = match format {
        "csv" => table.to_csv(),
        "json" => table.to_json(),
        other => {
            return Err(Failure::Usage(format!(
                "unknown format '{other}' (expected csv or json)"
            )))
        }
    }
    .map_err(lib_failure)?;
    fs::write(&output, payload)
        .map_err(|e| Failure::Io(format!("cannot write {}: {e}", output.display())))?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_ensemble(mut args: EnsembleArgs) -> Result<ExitCode, Failure> {
    if let Some(path) = args.config.take() {
        let mut map = load_config(&path)?;
        take_string(&mut map, "kind", &mut args.kind)?;
        take_usize(&mut map, "n", &mut args.n)?;
        take_f64(&mut map, "extent", &mut args.extent)?;
        take_string(&mut map, "estimator", &mut args.estimator)?;
        take_usize(&mut map, "samples", &mut args.samples)?;
        take_u64(&mut map, "seed", &mut args.seed)?;
        take_f64(&mut map, "lambda", &mut args.lambda)?;
        take_path(&mut map, "output", &mut args.output)?;
        reject_unknown_keys(map)?;
    }

    let missing = |flag: &str| Failure::Usage(format!("ensemble needs --{flag}"));
    let kind: LayoutKind = args
        .kind
        .ok_or_else(|| missing("kind"))?
        .parse()
        .map_err(lib_failure)?;
    let n_atoms = args.n.ok_or_else(|| missing("n"))?;
    let estimator: NamedEstimator = args
        .estimator
        .ok_or_else(|| missing("estimator"))?
        .parse()
        .map_err(lib_failure)?;
    let samples = args.samples.ok_or_else(|| missing("samples"))?;
    let seed = args.seed.ok_or_else(|| missing("seed"))?;
    let lambda = args.lambda.unwrap_or(780e-9);
    let extent_wavelengths = args.extent.unwrap_or(10.0);

    let spec = LayoutSpec {
        kind,
        n_atoms,
        extent_wavelengths,
        seed,
    };
    let k = 2.0 * std::f64::consts::PI / lambda;
    let estimate =
        sampler::monte_carlo_named(&spec, k, samples, estimator).map_err(lib_failure)?;

    let doc = serde_json::json!({
        "kind": kind.name(),
        "n_atoms": n_atoms,
        "extent_wavelengths": extent_wavelengths,
        "seed": seed,
        "samples": samples,
        "estimator": estimator.name(),
        "wavelength": lambda,
        "mean": {"re": estimate.mean.re, "im": estimate.mean.im},
        "second_moment": estimate.second_moment,
        "std_dev": estimate.std_error * (samples as f64).sqrt(),
        "std_error": estimate.std_error,
    });
    let mut payload = serde_json::to_string_pretty(&doc)
        .map_err(|e| Failure::Check(format!("estimate not serializable: {e}")))?;
    payload.push('\n');
    match &args.output {
        Some(path) => fs::write(path, payload)
            .map_err(|e| Failure::Io(format!("cannot write {}: {e}", path.display())))?,
        None => print!("{payload}"),
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_check(args: CheckArgs) -> Result<ExitCode, Failure> {
    let perturb = match &args.perturb {
        None => Perturbation::default(),
        Some(raw) => {
            if raw.len() != 2 || raw[0] != "beta" {
                return Err(Failure::Usage(
                    "only '--perturb beta <eps>' is supported".into(),
                ));
            }
            let eps: f64 = raw[1]
                .parse()
                .map_err(|_| Failure::Usage(format!("perturbation size '{}' is not a number", raw[1])))?;
            Perturbation {
                beta_scale: 1.0 + eps,
            }
        }
    };

    let outcomes = checks::run_all(&perturb).map_err(lib_failure)?;
    let mut failed = 0usize;
    for outcome in &outcomes {
        let verdict = if outcome.pass() { "PASS" } else { "FAIL" };
        println!(
            "{:<26} residual {:>10} tol {:>8} {verdict}",
            outcome.name,
            format!("{:.3e}", outcome.residual),
            format!("{:.1e}", outcome.tol),
        );
        if !outcome.pass() {
            failed += 1;
        }
    }
    println!("{} checks, {failed} failed", outcomes.len());
    if failed == 0 {
        Ok(ExitCode::SUCCESS)
    } else {
        Ok(ExitCode::from(1))
    }
}
