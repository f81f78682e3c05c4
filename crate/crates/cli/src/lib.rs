//! Batch driver behind the `phvqe` binary: single-point energies,
//! dissociation scans and the Trotter replay study, written as CSV plus a
//! replayable manifest.

use std::collections::BTreeSet;
use std::fmt::{self, Write as _};
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use anyhow::{bail, Context};
use rayon::prelude::*;
use sha2::{Digest, Sha256};

use phvqe::heuristic::{EntanglerKind, HeuristicAnsatz};
use phvqe::integrals::read_fcidump;
use phvqe::oracle::{ground_energy_in_sector, uccsd_analytic_energy};
use phvqe::uccsd::{active_window, enumerate_excitations, ExcitationList, UccsdAnsatz};
use phvqe::vqe::{minimize, trotter_replay, Ansatz, HamiltonianForm, MolecularProblem, MuSchedule, VqeConfig};

/// Penalty strength used for the non-conserving CNOT ansatz when `--mu` is not given.
pub const DEFAULT_CNOT_MU: f64 = 10.0;
/// Stopping tolerance of the reoptimized runs in the Trotter study unless set explicitly.
pub const TROTTER_REOPT_TOLERANCE: f64 = 1e-12;

pub const ENERGY_HEADER: &str =
    "R_label,E_HF,E_VQE,E_diag,error,iterations,evaluations,params,one_qubit_gates,two_qubit_gates,D";
pub const TROTTER_HEADER: &str = "n,replay_error,reopt_error";

/// A bad invocation, as opposed to a failed computation.
#[derive(Debug)]
pub struct UsageError(pub String);

impl fmt::Display for UsageError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

fn usage<T>(msg: impl Into<String>) -> anyhow::Result<T> {
    Err(UsageError(msg.into()).into())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Energy,
    Scan,
    Trotter,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Energy => "energy",
            Command::Scan => "scan",
            Command::Trotter => "trotter",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AnsatzChoice {
    Uccsd,
    Heuristic(EntanglerKind),
}

impl fmt::Display for AnsatzChoice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AnsatzChoice::Uccsd => f.write_str("uccsd"),
            AnsatzChoice::Heuristic(k) => write!(f, "{k}"),
        }
    }
}

impl FromStr for AnsatzChoice {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "uccsd" => Ok(AnsatzChoice::Uccsd),
            other => other
                .parse::<EntanglerKind>()
                .map(AnsatzChoice::Heuristic)
                .map_err(|_| format!("unknown ansatz `{other}` (expected uccsd, ex1, ex2 or cnot)")),
        }
    }
}

fn parse_form(s: &str) -> anyhow::Result<HamiltonianForm> {
    match s {
        "ph" => Ok(HamiltonianForm::ParticleHole),
        "sq" => Ok(HamiltonianForm::SecondQuantized),
        other => usage(format!("unknown hamiltonian `{other}` (expected ph or sq)")),
    }
}

fn form_name(form: HamiltonianForm) -> &'static str {
    match form {
        HamiltonianForm::ParticleHole => "ph",
        HamiltonianForm::SecondQuantized => "sq",
    }
}

/// Settings that may come from a config file or from flags. `None` means
/// "not given here".
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Settings {
    pub fixtures: Option<String>,
    pub ansatz: Option<String>,
    pub active_occ: Option<usize>,
    pub active_virt: Option<usize>,
    pub depth: Option<usize>,
    pub trotter: Option<String>,
    pub mu: Option<f64>,
    pub seed: Option<u64>,
    pub hamiltonian: Option<String>,
    pub tolerance: Option<f64>,
    pub gradient_step: Option<f64>,
    pub max_iterations: Option<usize>,
    pub out: Option<PathBuf>,
    /// Expected fixture digests, from a manifest being replayed.
    pub fixture_hashes: Vec<(String, String)>,
}

impl Settings {
    /// Fills every field left unset in `self` from `base`.
    pub fn over(self, base: Settings) -> Settings {
        Settings {
            fixtures: self.fixtures.or(base.fixtures),
            ansatz: self.ansatz.or(base.ansatz),
            active_occ: self.active_occ.or(base.active_occ),
            active_virt: self.active_virt.or(base.active_virt),
            depth: self.depth.or(base.depth),
            trotter: self.trotter.or(base.trotter),
            mu: self.mu.or(base.mu),
            seed: self.seed.or(base.seed),
            hamiltonian: self.hamiltonian.or(base.hamiltonian),
            tolerance: self.tolerance.or(base.tolerance),
            gradient_step: self.gradient_step.or(base.gradient_step),
            max_iterations: self.max_iterations.or(base.max_iterations),
            out: self.out.or(base.out),
            fixture_hashes: if self.fixture_hashes.is_empty() { base.fixture_hashes } else { self.fixture_hashes },
        }
    }
}

/// Parses a `key=value` configuration file. Blank lines and `#` comments are
/// skipped; `command` and `version` (written by manifests) are ignored.
pub fn parse_config(text: &str) -> anyhow::Result<Settings> {
    let mut s = Settings::default();
    let mut fixture_list = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return usage(format!("config line {}: expected key=value", idx + 1));
        };
        let (key, value) = (key.trim(), value.trim().to_string());
        let num = |v: &str| -> anyhow::Result<f64> {
            v.parse().map_err(|_| UsageError(format!("config line {}: bad number for `{key}`", idx + 1)).into())
        };
        let int = |v: &str| -> anyhow::Result<u64> {
            v.parse().map_err(|_| UsageError(format!("config line {}: bad integer for `{key}`", idx + 1)).into())
        };
        match key {
            "fixtures" => s.fixtures = Some(value),
            "fixture" => fixture_list.push(value),
            "fixture_sha256" => match fixture_list.last() {
                Some(path) => s.fixture_hashes.push((path.clone(), value)),
                None => return usage(format!("config line {}: fixture_sha256 before fixture", idx + 1)),
            },
            "ansatz" => s.ansatz = Some(value),
            "active-occ" => s.active_occ = Some(int(&value)? as usize),
            "active-virt" => s.active_virt = Some(int(&value)? as usize),
            "depth" => s.depth = Some(int(&value)? as usize),
            "trotter" => s.trotter = Some(value),
            "mu" => s.mu = Some(num(&value)?),
            "seed" => s.seed = Some(int(&value)?),
            "hamiltonian" => s.hamiltonian = Some(value),
            "tolerance" => s.tolerance = Some(num(&value)?),
            "gradient-step" => s.gradient_step = Some(num(&value)?),
            "max-iterations" => s.max_iterations = Some(int(&value)? as usize),
            "out" => s.out = Some(PathBuf::from(value)),
            "command" | "version" => {}
            other => return usage(format!("config line {}: unknown key `{other}`", idx + 1)),
        }
    }
    if !fixture_list.is_empty() {
        if s.fixtures.is_some() {
            return usage("config gives both `fixtures` and `fixture`");
        }
        s.fixtures = Some(fixture_list.join(","));
    }
    Ok(s)
}

/// A fully resolved run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunSpec {
    pub command: Command,
    pub fixtures: Vec<PathBuf>,
    pub ansatz: AnsatzChoice,
    pub active_occ: Option<usize>,
    pub active_virt: Option<usize>,
    pub depth: usize,
    pub trotter: Vec<usize>,
    pub hamiltonian: HamiltonianForm,
    pub tolerance: f64,
    pub gradient_step: f64,
    pub max_iterations: usize,
    pub mu: f64,
    pub seed: u64,
    pub out: Option<PathBuf>,
}

/// Geometry label: the part of the file stem after the last `_`.
pub fn r_label(path: &Path) -> String {
    let stem = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    match stem.rsplit_once('_') {
        Some((_, r)) if !r.is_empty() => r.to_string(),
        _ => stem,
    }
}

/// Expands each comma-separated entry as a glob; results are ordered by
/// numeric geometry label where possible, then by path.
pub fn resolve_fixtures(pattern: &str) -> anyhow::Result<Vec<PathBuf>> {
    let mut paths = BTreeSet::new();
    for part in pattern.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let mut matched = false;
        for entry in glob::glob(part).map_err(|e| UsageError(format!("bad fixture pattern `{part}`: {e}")))? {
            paths.insert(entry?);
            matched = true;
        }
        if !matched {
            return usage(format!("no fixture matches `{part}`"));
        }
    }
    let mut paths: Vec<PathBuf> = paths.into_iter().collect();
    paths.sort_by(|a, b| {
        let key = |p: &Path| r_label(p).parse::<f64>().unwrap_or(f64::INFINITY);
        key(a).total_cmp(&key(b)).then_with(|| a.cmp(b))
    });
    Ok(paths)
}

fn parse_trotter(text: &str) -> anyhow::Result<Vec<usize>> {
    let values: Vec<usize> = text
        .split(',')
        .map(|v| v.trim().parse::<usize>())
        .collect::<Result<_, _>>()
        .map_err(|_| UsageError(format!("bad trotter list `{text}`")))?;
    if values.is_empty() || values.contains(&0) {
        return usage("trotter steps must be positive");
    }
    Ok(values)
}

impl RunSpec {
    pub fn resolve(command: Command, s: Settings) -> anyhow::Result<RunSpec> {
        let Some(pattern) = s.fixtures.as_deref() else {
            return usage("no fixtures given (use --fixtures)");
        };
        let fixtures = resolve_fixtures(pattern)?;
        match (command, fixtures.len()) {
            (Command::Scan, n) if n < 2 => return usage(format!("scan needs at least two fixtures, got {n}")),
            (Command::Energy | Command::Trotter, n) if n != 1 => {
                return usage(format!("{} takes exactly one fixture, got {n}", command.name()))
            }
            _ => {}
        }
        let ansatz: AnsatzChoice = s.ansatz.as_deref().unwrap_or("uccsd").parse().map_err(UsageError)?;
        if command == Command::Trotter && ansatz != AnsatzChoice::Uccsd {
            return usage("the trotter study needs --ansatz uccsd");
        }
        let mut trotter = parse_trotter(s.trotter.as_deref().unwrap_or("1"))?;
        if command == Command::Trotter && trotter.len() == 1 {
            trotter = (1..=trotter[0]).collect();
        } else if command != Command::Trotter && trotter.len() != 1 {
            return usage("a step list is only accepted by the trotter command");
        }
        let default_tol =
            if command == Command::Trotter { TROTTER_REOPT_TOLERANCE } else { VqeConfig::default().tolerance };
        let default_mu = match ansatz {
            AnsatzChoice::Heuristic(EntanglerKind::CnotBlock) => DEFAULT_CNOT_MU,
            _ => 0.0,
        };
        let spec = RunSpec {
            command,
            fixtures,
            ansatz,
            active_occ: s.active_occ,
            active_virt: s.active_virt,
            depth: s.depth.unwrap_or(8),
            trotter,
            hamiltonian: parse_form(s.hamiltonian.as_deref().unwrap_or("ph"))?,
            tolerance: s.tolerance.unwrap_or(default_tol),
            gradient_step: s.gradient_step.unwrap_or(VqeConfig::default().gradient_step),
            max_iterations: s.max_iterations.unwrap_or(VqeConfig::default().max_iterations),
            mu: s.mu.unwrap_or(default_mu),
            seed: s.seed.unwrap_or(0),
            out: s.out,
        };
        spec.vqe_config()?;
        for (path, expected) in &s.fixture_hashes {
            let actual = sha256_file(Path::new(path))?;
            if &actual != expected {
                bail!("fixture {path} changed since the manifest was written (sha256 {actual}, expected {expected})");
            }
        }
        Ok(spec)
    }

    pub fn vqe_config(&self) -> anyhow::Result<VqeConfig> {
        let mu =
            if self.mu > 0.0 { MuSchedule::ramp(self.max_iterations, self.mu)? } else { MuSchedule::constant(0.0)? };
        let config = VqeConfig {
            tolerance: self.tolerance,
            gradient_step: self.gradient_step,
            max_iterations: self.max_iterations,
            mu,
            seed: self.seed,
        };
        config.validate().map_err(|e| UsageError(e.to_string()))?;
        Ok(config)
    }

    /// Key/value record of every setting plus fixture digests; it parses
    /// back with [`parse_config`] and reproduces the run.
    pub fn manifest(&self) -> anyhow::Result<String> {
        let mut m = String::new();
        writeln!(m, "command={}", self.command.name())?;
        writeln!(m, "version={}", env!("CARGO_PKG_VERSION"))?;
        for f in &self.fixtures {
            writeln!(m, "fixture={}", f.display())?;
            writeln!(m, "fixture_sha256={}", sha256_file(f)?)?;
        }
        writeln!(m, "ansatz={}", self.ansatz)?;
        if let Some(k) = self.active_occ {
            writeln!(m, "active-occ={k}")?;
        }
        if let Some(k) = self.active_virt {
            writeln!(m, "active-virt={k}")?;
        }
        writeln!(m, "depth={}", self.depth)?;
        let steps: Vec<String> = self.trotter.iter().map(|n| n.to_string()).collect();
        writeln!(m, "trotter={}", steps.join(","))?;
        writeln!(m, "hamiltonian={}", form_name(self.hamiltonian))?;
        writeln!(m, "tolerance={:e}", self.tolerance)?;
        writeln!(m, "gradient-step={:e}", self.gradient_step)?;
        writeln!(m, "max-iterations={}", self.max_iterations)?;
        writeln!(m, "mu={:e}", self.mu)?;
        writeln!(m, "seed={}", self.seed)?;
        Ok(m)
    }
}

pub fn sha256_file(path: &Path) -> anyhow::Result<String> {
    let bytes = fs::read(path).with_context(|| format!("reading {}", path.display()))?;
    Ok(hex::encode(Sha256::digest(&bytes)))
}

/// Twelve significant digits.
pub fn fmt_f(x: f64) -> String {
    format!("{x:.11e}")
}

/// One CSV row of the energy table.
#[derive(Debug, Clone, PartialEq)]
pub struct EnergyRow {
    pub r_label: String,
    pub e_hf: f64,
    pub e_vqe: f64,
    pub e_diag: f64,
    pub iterations: usize,
    pub evaluations: usize,
    pub params: usize,
    pub one_qubit_gates: usize,
    pub two_qubit_gates: usize,
    /// Entangler blocks for heuristic circuits, Trotter steps for UCCSD.
    pub depth: usize,
    pub converged: bool,
}

impl EnergyRow {
    pub fn error(&self) -> f64 {
        self.e_vqe - self.e_diag
    }

    pub fn to_csv(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{},{},{}",
            self.r_label,
            fmt_f(self.e_hf),
            fmt_f(self.e_vqe),
            fmt_f(self.e_diag),
            fmt_f(self.error()),
            self.iterations,
            self.evaluations,
            self.params,
            self.one_qubit_gates,
            self.two_qubit_gates,
            self.depth
        )
    }
}

fn load_problem(path: &Path, form: HamiltonianForm) -> anyhow::Result<MolecularProblem> {
    let mi = read_fcidump(path)?;
    MolecularProblem::from_integrals(&mi, form)
        .with_context(|| format!("building the Hamiltonian for {}", path.display()))
}

fn excitation_list(spec: &RunSpec, p: &MolecularProblem) -> anyhow::Result<ExcitationList> {
    let k_occ = spec.active_occ.unwrap_or(p.n_electrons);
    let k_virt = spec.active_virt.unwrap_or(p.n_qubits - p.n_electrons);
    let (ao, av) = active_window(&p.reference, k_occ, k_virt).map_err(|e| UsageError(e.to_string()))?;
    Ok(enumerate_excitations(p.n_qubits, &p.reference.occupied, &ao.into_iter().collect(), &av.into_iter().collect())?)
}

fn build_ansatz(spec: &RunSpec, p: &MolecularProblem, trotter_steps: usize) -> anyhow::Result<Ansatz> {
    Ok(match spec.ansatz {
        AnsatzChoice::Uccsd => Ansatz::Uccsd(UccsdAnsatz::new(p.n_qubits, excitation_list(spec, p)?, trotter_steps)?),
        AnsatzChoice::Heuristic(kind) => Ansatz::Heuristic(HeuristicAnsatz::new(p.n_qubits, kind, spec.depth)?),
    })
}

/// Runs the VQE for one fixture.
pub fn energy_row(spec: &RunSpec, path: &Path) -> anyhow::Result<EnergyRow> {
    let p = load_problem(path, spec.hamiltonian)?;
    let (e_diag, _) = ground_energy_in_sector(&p.hamiltonian, p.n_electrons)?;
    let steps = spec.trotter[0];
    let ansatz = build_ansatz(spec, &p, steps)?;
    let (one_q, two_q) = ansatz.circuit_template()?.gate_counts();
    let result = minimize(&p, &ansatz, &spec.vqe_config()?)?;
    Ok(EnergyRow {
        r_label: r_label(path),
        e_hf: p.e_hf,
        e_vqe: result.energy,
        e_diag,
        iterations: result.iterations,
        evaluations: result.energy_evaluations,
        params: ansatz.n_params(),
        one_qubit_gates: one_q,
        two_qubit_gates: two_q,
        depth: match spec.ansatz {
            AnsatzChoice::Uccsd => steps,
            AnsatzChoice::Heuristic(_) => spec.depth,
        },
        converged: result.converged,
    })
}

/// Summary rows appended to a scan: largest absolute error, mean error and
/// spread (max - min) of the signed errors.
pub fn scan_summary(rows: &[EnergyRow]) -> Vec<String> {
    let errors: Vec<f64> = rows.iter().map(EnergyRow::error).collect();
    let max_abs = errors.iter().fold(0.0f64, |m, e| m.max(e.abs()));
    let mean = errors.iter().sum::<f64>() / errors.len().max(1) as f64;
    let spread =
        errors.iter().cloned().fold(f64::NEG_INFINITY, f64::max) - errors.iter().cloned().fold(f64::INFINITY, f64::min);
    [("max_abs_error", max_abs), ("mean_error", mean), ("error_spread", spread)]
        .iter()
        .map(|(label, v)| format!("{label},,,,{},,,,,,", fmt_f(*v)))
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrotterRow {
    pub n: usize,
    pub replay_error: f64,
    pub reopt_error: f64,
    pub converged: bool,
}

impl TrotterRow {
    pub fn to_csv(&self) -> String {
        format!("{},{},{}", self.n, fmt_f(self.replay_error), fmt_f(self.reopt_error))
    }
}

/// Replayed (angles frozen at the exact-exponential optimum) and
/// reoptimized UCCSD errors for each step count.
pub fn trotter_rows(spec: &RunSpec) -> anyhow::Result<Vec<TrotterRow>> {
    let path = &spec.fixtures[0];
    let p = load_problem(path, spec.hamiltonian)?;
    let (e_diag, _) = ground_energy_in_sector(&p.hamiltonian, p.n_electrons)?;
    let list = excitation_list(spec, &p)?;
    let config = spec.vqe_config()?;
    let (_, theta_opt) = uccsd_analytic_energy(&p, &list, None, &config)?;
    let base = UccsdAnsatz::new(p.n_qubits, list, 1)?;
    spec.trotter
        .iter()
        .map(|&n| {
            let replay = trotter_replay(&p, &base, &theta_opt, n)?;
            let reopt = minimize(&p, &Ansatz::Uccsd(base.with_trotter_steps(n)?), &config)?;
            Ok(TrotterRow {
                n,
                replay_error: (replay - e_diag).abs(),
                reopt_error: (reopt.energy - e_diag).abs(),
                converged: reopt.converged,
            })
        })
        .collect()
}

/// What a run produced: CSV text (already written if `out` was set) and
/// the manifest.
#[derive(Debug, Clone, PartialEq)]
pub struct RunOutput {
    pub csv: String,
    pub manifest: String,
}

fn write_outputs(spec: &RunSpec, csv: &str, manifest: &str) -> anyhow::Result<()> {
    if let Some(dir) = &spec.out {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
        let csv_path = dir.join(format!("{}.csv", spec.command.name()));
        fs::write(&csv_path, csv).with_context(|| format!("writing {}", csv_path.display()))?;
        let manifest_path = dir.join("manifest.txt");
        fs::write(&manifest_path, manifest).with_context(|| format!("writing {}", manifest_path.display()))?;
    }
    Ok(())
}

/// Executes a run. On a failure part-way through a scan, the rows that
/// completed in geometry order are still written before the error returns.
pub fn run(spec: &RunSpec) -> anyhow::Result<RunOutput> {
    let manifest = spec.manifest()?;
    let mut csv = String::new();
    let failure: Option<anyhow::Error> = match spec.command {
        Command::Energy | Command::Scan => {
            writeln!(csv, "{ENERGY_HEADER}")?;
            let results: Vec<anyhow::Result<EnergyRow>> = spec
                .fixtures
                .par_iter()
                .map(|f| energy_row(spec, f).with_context(|| format!("fixture {}", f.display())))
                .collect();
            let mut rows = Vec::new();
            let mut failure = None;
            for r in results {
                match r {
                    Ok(row) => {
                        writeln!(csv, "{}", row.to_csv())?;
                        rows.push(row);
                    }
                    Err(e) => {
                        failure = Some(e);
                        break;
                    }
                }
            }
            if failure.is_none() && spec.command == Command::Scan {
                for line in scan_summary(&rows) {
                    writeln!(csv, "{line}")?;
                }
            }
            failure.or_else(|| {
                let stalled: Vec<&str> = rows.iter().filter(|r| !r.converged).map(|r| r.r_label.as_str()).collect();
                (!stalled.is_empty()).then(|| anyhow::anyhow!("VQE did not converge for R = {}", stalled.join(", ")))
            })
        }
        Command::Trotter => {
            writeln!(csv, "{TROTTER_HEADER}")?;
            let rows = trotter_rows(spec)?;
            for row in &rows {
                writeln!(csv, "{}", row.to_csv())?;
            }
            let stalled: Vec<String> = rows.iter().filter(|r| !r.converged).map(|r| r.n.to_string()).collect();
            (!stalled.is_empty())
                .then(|| anyhow::anyhow!("reoptimization did not converge for n = {}", stalled.join(", ")))
        }
    };
    write_outputs(spec, &csv, &manifest)?;
    match failure {
        Some(e) => Err(e.context(format!("partial output:\n{csv}"))),
        None => Ok(RunOutput { csv, manifest }),
    }
}
