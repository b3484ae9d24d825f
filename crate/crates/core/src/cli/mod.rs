//! Command-line front end: `reproduce`, `run` and `scan`.
//!
//! Exit codes: 0 on success, 1 when a reproduction check or a computation
//! fails, 2 when the configuration is rejected.

pub mod config;
pub mod report;

use std::fmt;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};

use crate::collapse::{cycle_ledger, energy_balance, ensemble_density, project, DEFAULT_PROB_FLOOR};
use crate::dynamics::{correlation_report, evolve, grid_points, scan_premeasurement};
use crate::error::Error;
use crate::model::{pauli_decompose, standard, MeasurementScheme, Pauli};
use crate::operator::{principal_log_hamiltonian, unitary_exp, ComplexMatrix};
use crate::units::to_h;

pub use config::{ConfigError, ScenarioConfig};
pub use report::{RunReport, ScanRow};

use report::{ledger_rows, round_sig, write_csv, CheckRecord, CycleRecord, LedgerRecord};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;

// Parameters of the reference premeasurement scan.
const REFERENCE_SCAN: (f64, f64, f64, f64) = (0.0, 4.0, 1e-3, 1e-6);

#[derive(Debug)]
pub enum CliError {
    Config(ConfigError),
    Compute(Error),
    Io(io::Error),
    Csv(csv::Error),
    ReproductionFailed(Vec<String>),
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(e) => write!(f, "{e}"),
            CliError::Compute(e) => write!(f, "computation failed: {e}"),
            CliError::Io(e) => write!(f, "i/o error: {e}"),
            CliError::Csv(e) => write!(f, "csv error: {e}"),
            CliError::ReproductionFailed(names) => {
                write!(f, "reproduction checks failed: {}", names.join(", "))
            }
        }
    }
}

impl std::error::Error for CliError {}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => EXIT_CONFIG,
            _ => EXIT_FAILURE,
        }
    }
}

impl From<ConfigError> for CliError {
    fn from(e: ConfigError) -> Self {
        CliError::Config(e)
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Compute(e)
    }
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        CliError::Io(e)
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Csv(e)
    }
}

#[derive(Parser, Debug)]
#[command(
    name = "vnmeas",
    version,
    about = "Energy bookkeeping for projective measurement models"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Run the reference two-qubit scheme end to end and check every quantity.
    Reproduce {
        /// Also write the report as JSON.
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// Evolve, collapse and account energy for one scenario.
    Run {
        config: PathBuf,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
        /// Output file; standard output when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Sweep the collapse time over the scenario's scan grid and write CSV.
    Scan {
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
}

fn eigenvalues_h(scheme: &MeasurementScheme) -> Vec<f64> {
    scheme
        .propagator()
        .energies()
        .into_iter()
        .map(|e| round_sig(to_h(e)))
        .collect()
}

fn pauli_table_h(h: &ComplexMatrix) -> Result<std::collections::BTreeMap<String, f64>, Error> {
    Ok(pauli_decompose(h)?
        .labeled()
        .map(|(label, c)| (label, round_sig(to_h(c))))
        .collect())
}

fn instants(scheme: &MeasurementScheme, scan: (f64, f64, f64, f64)) -> Result<Vec<f64>, Error> {
    let (t0, t1, step, tol) = scan;
    Ok(scan_premeasurement(scheme, t0, t1, step, tol)?
        .into_iter()
        .map(|(t, _)| round_sig(t))
        .collect())
}

/// Runs the reference scheme and compares every quantity with its closed form.
pub fn cmd_reproduce() -> Result<RunReport, CliError> {
    let scheme = MeasurementScheme::standard();
    let h = scheme.hamiltonian();
    let mut checks = Vec::new();

    let psi1 = evolve(&scheme, 1.0)?;
    let r = std::f64::consts::FRAC_1_SQRT_2;
    let target = [
        num_complex::Complex64::new(r, 0.0),
        0.0.into(),
        0.0.into(),
        num_complex::Complex64::new(0.0, r),
    ];
    let amp_err = psi1
        .amplitudes()
        .iter()
        .zip(target)
        .fold(0.0f64, |acc, (a, b)| acc.max((a - b).norm()));
    checks.push(CheckRecord::error("state at t=1", amp_err, 1e-10));

    let log_h = principal_log_hamiltonian(&standard::unitary())?;
    checks.push(CheckRecord::error(
        "log of U(1) equals H",
        log_h.max_abs_diff(&standard::hamiltonian()),
        1e-10,
    ));
    checks.push(CheckRecord::error(
        "exp(-iH) equals U(1)",
        unitary_exp(&log_h, 1.0)?.max_abs_diff(&standard::unitary()),
        1e-10,
    ));
    checks.push(CheckRecord::error(
        "exp(-3iH) equals U(3)",
        unitary_exp(h, 3.0)?.max_abs_diff(&standard::exchanged_unitary()),
        1e-10,
    ));

    let pauli = pauli_decompose(h)?;
    let expected = standard::pauli();
    let pauli_err = Pauli::ALL
        .into_iter()
        .flat_map(|a| Pauli::ALL.into_iter().map(move |b| (a, b)))
        .map(|(a, b)| (pauli.get(a, b) - expected.get(a, b)).abs())
        .fold(0.0, f64::max);
    checks.push(CheckRecord::error("Pauli coefficients", pauli_err, 1e-12));

    let mut spectrum = scheme.propagator().energies();
    spectrum.sort_by(f64::total_cmp);
    let spec_err = spectrum
        .iter()
        .zip([-0.25, 0.0, 0.25, 0.5])
        .map(|(e, x)| (to_h(*e) - x).abs())
        .fold(0.0, f64::max);
    checks.push(CheckRecord::error("spectrum of H in h", spec_err, 1e-10));

    let mut ledgers = Vec::new();
    for t in [1.0, 3.0] {
        let l = energy_balance(&scheme, t)?;
        // |e_pre| ≤ 1e-10 and a relative 1e-9 on e_post, both in natural units
        checks.push(CheckRecord::new(
            format!("e_pre_h at t={t}"),
            0.0,
            l.e_pre_h(),
            to_h(1e-10),
        ));
        checks.push(CheckRecord::new(
            format!("e_post_h at t={t}"),
            0.125,
            l.e_post_h(),
            1e-9 * 0.125,
        ));
        checks.push(CheckRecord::new(format!("delta_h at t={t}"), 0.125, l.delta_h(), 1e-9));
        ledgers.push(LedgerRecord::from(&l));
    }

    let rho = ensemble_density(&project(&evolve(&scheme, 1.0)?, scheme.pointer(), DEFAULT_PROB_FLOOR)?)?;
    let rho_target = ComplexMatrix::from_diagonal(&[0.5.into(), 0.0.into(), 0.0.into(), 0.5.into()]);
    checks.push(CheckRecord::error(
        "post-collapse density at t=1",
        rho.matrix().max_abs_diff(&rho_target),
        1e-10,
    ));

    let found = instants(&scheme, REFERENCE_SCAN)?;
    let step = REFERENCE_SCAN.2;
    checks.push(CheckRecord::new(
        "premeasurement instant count",
        2.0,
        found.len() as f64,
        0.0,
    ));
    if found.len() == 2 {
        checks.push(CheckRecord::new("first premeasurement instant", 1.0, found[0], step));
        checks.push(CheckRecord::new("second premeasurement instant", 3.0, found[1], step));
    }

    let mut cycles = None;
    for n in [1u64, 10, 100] {
        let c = cycle_ledger(&scheme, 1.0, n)?;
        checks.push(CheckRecord::new(
            format!("cumulative_h after {n} cycles"),
            n as f64 * 0.125,
            c.cumulative_h(),
            n as f64 * 1e-9,
        ));
        cycles = Some(CycleRecord::from(&c));
    }

    Ok(RunReport {
        command: "reproduce".into(),
        config: ScenarioConfig::standard().to_value(),
        ledgers,
        premeasurement_instants: found,
        cycles,
        pauli_h: pauli_table_h(h)?,
        hamiltonian_eigenvalues_h: eigenvalues_h(&scheme),
        checks,
        scan: vec![],
    })
}

/// Evolve → collapse → ledger for one configuration, plus the optional
/// premeasurement scan and cycle ledger.
pub fn cmd_run(config: &ScenarioConfig) -> Result<RunReport, CliError> {
    let scheme = config.build_scheme()?;
    let ledger = energy_balance(&scheme, config.collapse_time)?;
    let premeasurement_instants = match &config.scan {
        Some(s) => instants(&scheme, (s.t_start, s.t_end, s.step, s.tol))?,
        None => vec![],
    };
    let cycles = match config.cycles {
        Some(n) => Some(CycleRecord::from(&cycle_ledger(&scheme, config.collapse_time, n)?)),
        None => None,
    };
    Ok(RunReport {
        command: "run".into(),
        config: config.to_value(),
        ledgers: vec![LedgerRecord::from(&ledger)],
        premeasurement_instants,
        cycles,
        pauli_h: pauli_table_h(scheme.hamiltonian())?,
        hamiltonian_eigenvalues_h: eigenvalues_h(&scheme),
        checks: vec![],
        scan: vec![],
    })
}

/// Energy ledger and correlation score at every point of the scan grid.
pub fn cmd_scan(config: &ScenarioConfig) -> Result<RunReport, CliError> {
    let spec = config
        .scan
        .as_ref()
        .ok_or_else(|| ConfigError::new("scan", "the scan subcommand needs a scan block"))?;
    let scheme = config.build_scheme()?;
    let mut rows = Vec::new();
    for t in grid_points(spec.t_start, spec.t_end, spec.step)? {
        let state = evolve(&scheme, t)?;
        let corr = correlation_report(&state, scheme.system_basis(), scheme.pointer(), spec.tol)?;
        let l = crate::collapse::state_energy_balance(&state, scheme.hamiltonian(), scheme.pointer(), t)?;
        rows.push(ScanRow {
            t: round_sig(t),
            e_pre_h: round_sig(l.e_pre_h()),
            e_post_h: round_sig(l.e_post_h()),
            delta_h: round_sig(l.delta_h()),
            score: round_sig(corr.score),
            is_premeasurement: corr.is_premeasurement,
        });
    }
    let premeasurement_instants = instants(&scheme, (spec.t_start, spec.t_end, spec.step, spec.tol))?;
    Ok(RunReport {
        command: "scan".into(),
        config: config.to_value(),
        ledgers: vec![],
        premeasurement_instants,
        cycles: None,
        pauli_h: pauli_table_h(scheme.hamiltonian())?,
        hamiltonian_eigenvalues_h: eigenvalues_h(&scheme),
        checks: vec![],
        scan: rows,
    })
}

/// Human-readable summary of a reproduction report.
pub fn render_table(report: &RunReport, out: &mut impl Write) -> io::Result<()> {
    writeln!(
        out,
        "{:<36} {:>16} {:>16} {:>10}  result",
        "check", "expected", "actual", "tol"
    )?;
    for c in &report.checks {
        writeln!(
            out,
            "{:<36} {:>16.12} {:>16.6e} {:>10.1e}  {}",
            c.name,
            c.expected,
            c.actual,
            c.tolerance,
            if c.pass { "ok" } else { "FAIL" }
        )?;
    }
    writeln!(out)?;
    writeln!(
        out,
        "{:>6} {:>16} {:>16} {:>16} {:>16}",
        "t", "e_pre [h]", "e_post [h]", "cross [h]", "delta [h]"
    )?;
    for l in &report.ledgers {
        writeln!(
            out,
            "{:>6} {:>16} {:>16} {:>16} {:>16}",
            l.collapse_time, l.e_pre_h, l.e_post_h, l.cross_h, l.delta_h
        )?;
    }
    writeln!(out)?;
    let terms: Vec<String> = report
        .pauli_h
        .iter()
        .filter(|(_, &c)| c != 0.0)
        .map(|(l, c)| format!("{l}:{c:+}"))
        .collect();
    writeln!(out, "Pauli terms [h]: {}", terms.join(" "))?;
    writeln!(out, "spectrum of H [h]: {:?}", report.hamiltonian_eigenvalues_h)?;
    writeln!(out, "premeasurement instants: {:?}", report.premeasurement_instants)?;
    Ok(())
}

fn create(path: &Path) -> io::Result<BufWriter<File>> {
    Ok(BufWriter::new(File::create(path)?))
}

fn execute(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Reproduce { json } => {
            let report = cmd_reproduce()?;
            render_table(&report, &mut io::stdout().lock())?;
            if let Some(path) = json {
                let mut w = create(&path)?;
                w.write_all(report.to_json().as_bytes())?;
                w.flush()?;
            }
            if !report.all_checks_pass() {
                let failed = report
                    .checks
                    .iter()
                    .filter(|c| !c.pass)
                    .map(|c| c.name.clone())
                    .collect();
                return Err(CliError::ReproductionFailed(failed));
            }
        }
        Command::Run { config, format, out } => {
            let cfg = ScenarioConfig::from_path(&config)?;
            let report = cmd_run(&cfg)?;
            let mut sink: Box<dyn Write> = match out {
                Some(path) => Box::new(create(&path)?),
                None => Box::new(io::stdout().lock()),
            };
            match format {
                Format::Json => writeln!(sink, "{}", report.to_json())?,
                Format::Csv => write_csv(&ledger_rows(&report), &mut sink)?,
            }
            sink.flush()?;
        }
        Command::Scan { config, out } => {
            let cfg = ScenarioConfig::from_path(&config)?;
            let report = cmd_scan(&cfg)?;
            write_csv(&report.scan, create(&out)?)?;
        }
    }
    Ok(())
}

/// Parses arguments, runs the subcommand and returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
        }
    };
    match execute(cli) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reproduce_passes_every_check() {
        let report = cmd_reproduce().unwrap();
        for c in &report.checks {
            assert!(c.pass, "{c:?}");
        }
        assert_eq!(report.ledgers.len(), 2);
        for l in &report.ledgers {
            assert_eq!(l.delta_h, 0.125);
            assert_eq!(l.e_pre_h, 0.0);
        }
        assert_eq!(report.hamiltonian_eigenvalues_h.len(), 4);
        let mut eig = report.hamiltonian_eigenvalues_h.clone();
        eig.sort_by(f64::total_cmp);
        assert_eq!(eig, vec![-0.25, 0.0, 0.25, 0.5]);
        assert_eq!(report.pauli_h["XY"], -0.125);
        assert_eq!(report.pauli_h["ZZ"], 0.0);
        assert_eq!(report.cycles.as_ref().unwrap().cumulative_h, 12.5);
    }

    #[test]
    fn run_matches_reproduce_on_the_standard_config() {
        let mut cfg = ScenarioConfig::standard();
        cfg.cycles = Some(10);
        let report = cmd_run(&cfg).unwrap();
        let l = &report.ledgers[0];
        assert_eq!(l.delta_h, 0.125);
        assert_eq!(l.e_post_h, 0.125);
        assert_eq!(report.cycles.unwrap().cumulative_h, 1.25);
    }

    #[test]
    fn sigma_x_pointer_obeys_ledger_identity() {
        let mut cfg = ScenarioConfig::standard();
        cfg.pointer_angles = (std::f64::consts::FRAC_PI_2, 0.0);
        let scheme = cfg.build_scheme().unwrap();
        let l = energy_balance(&scheme, 1.0).unwrap();
        assert!(l.identity_residual() <= 1e-9);
        let report = cmd_run(&cfg).unwrap();
        assert!((report.ledgers[0].delta_h - round_sig(l.delta_h())).abs() < 1e-12);
    }

    #[test]
    fn scan_requires_scan_block() {
        match cmd_scan(&ScenarioConfig::standard()) {
            Err(CliError::Config(e)) => assert_eq!(e.field, "scan"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn exit_codes() {
        assert_eq!(main_with_args(["vnmeas", "bogus"]), EXIT_CONFIG);
        assert_eq!(
            main_with_args(["vnmeas", "run", "/nonexistent/config.json"]),
            EXIT_CONFIG
        );
        assert_eq!(
            CliError::Compute(Error::DegenerateState { floor: 0.0 }).exit_code(),
            EXIT_FAILURE
        );
        assert_eq!(CliError::ReproductionFailed(vec![]).exit_code(), EXIT_FAILURE);
    }
}
