//! Command-line front end.
//!
//! Every verb is backed by a `cmd_*` function returning plain data, so the
//! binary is a thin shell over them. Output files start with the manifest that
//! produced them: JSON files carry it under `"manifest"`, CSV and text files in
//! `# manifest: {...}` comment lines.

use std::fs::File;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::adapt::{
    ansatz_report, quantum_call_report, run_adapt, AdaptConfig, AdaptResult, AnsatzReport,
    QuantumCallReport, StopReason, CHEMICAL_ACCURACY,
};
use crate::error::{Error, Result};
use crate::fci::{lowest_energies, Solver, SpectrumRequest, MAX_ORACLE_QUBITS};
use crate::integrals::MolecularIntegrals;
use crate::optimizer::OptimizerConfig;
use crate::pool::{build_pool, PoolSummary};
use crate::problem::{load_metadata, qubit_hamiltonian, FixtureMetadata, Problem};

/// Evaluations charged per optimizer iteration in the assumed call count.
pub const EVALS_PER_ITERATION: usize = 3;

/// Iteration budget `compare` applies to every run unless told otherwise.
pub const DEFAULT_COMPARE_BUDGET: usize = 1000;

/// Everything needed to reproduce one run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RunManifest {
    pub fcidump: PathBuf,
    pub k: usize,
    pub max_operators: usize,
    pub iters_per_step: usize,
    pub total_iterations: Option<usize>,
    pub gradient_threshold: f64,
    pub optimizer: OptimizerConfig,
    pub output_dir: PathBuf,
    /// Nothing is randomized at present; recorded so manifests stay stable if that changes.
    pub seed: u64,
}

impl Default for RunManifest {
    fn default() -> Self {
        let adapt = AdaptConfig::default();
        RunManifest {
            fcidump: PathBuf::new(),
            k: adapt.k,
            max_operators: adapt.max_operators,
            iters_per_step: adapt.vqe_iterations_per_step,
            total_iterations: adapt.total_iteration_budget,
            gradient_threshold: adapt.gradient_threshold,
            optimizer: adapt.optimizer,
            output_dir: PathBuf::from("kadapt-out"),
            seed: 0,
        }
    }
}

impl RunManifest {
    /// Reads a manifest file, or the manifest embedded in a `result.json`.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut value: serde_json::Value = serde_json::from_str(&text)?;
        if let Some(embedded) = value.get_mut("manifest") {
            value = embedded.take();
        }
        Ok(serde_json::from_value(value)?)
    }

    pub fn adapt_config(&self) -> AdaptConfig {
        AdaptConfig {
            k: self.k,
            max_operators: self.max_operators,
            vqe_iterations_per_step: self.iters_per_step,
            total_iteration_budget: self.total_iterations,
            gradient_threshold: self.gradient_threshold,
            optimizer: self.optimizer.clone(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.fcidump.as_os_str().is_empty() {
            return Err(Error::InvalidConfig("no FCIDUMP file given".into()));
        }
        self.adapt_config().validate()
    }

    fn header(&self) -> Result<String> {
        Ok(format!("# manifest: {}\n", serde_json::to_string(self)?))
    }
}

/// Flags mirroring [`RunManifest`]; anything given overrides the manifest.
#[derive(Args, Clone, Debug, Default)]
pub struct ManifestArgs {
    /// FCIDUMP file (a `<stem>.json` sidecar next to it is picked up if present)
    #[arg(long)]
    pub fcidump: Option<PathBuf>,
    /// Operators appended per step
    #[arg(long)]
    pub k: Option<usize>,
    #[arg(long = "max-ops")]
    pub max_operators: Option<usize>,
    #[arg(long)]
    pub iters_per_step: Option<usize>,
    /// Optimizer iterations summed over all steps
    #[arg(long)]
    pub total_iterations: Option<usize>,
    /// Stop once every pool gradient is below this
    #[arg(long)]
    pub gradient_threshold: Option<f64>,
    /// Final trust-region radius of the optimizer
    #[arg(long)]
    pub f_tolerance: Option<f64>,
    /// Initial trust-region radius of the optimizer, radians
    #[arg(long)]
    pub initial_step: Option<f64>,
    #[arg(long, short = 'o')]
    pub output_dir: Option<PathBuf>,
    #[arg(long)]
    pub seed: Option<u64>,
}

impl ManifestArgs {
    pub fn apply(&self, mut m: RunManifest) -> RunManifest {
        if let Some(v) = &self.fcidump {
            m.fcidump = v.clone();
        }
        if let Some(v) = self.k {
            m.k = v;
        }
        if let Some(v) = self.max_operators {
            m.max_operators = v;
        }
        if let Some(v) = self.iters_per_step {
            m.iters_per_step = v;
        }
        if let Some(v) = self.total_iterations {
            m.total_iterations = Some(v);
        }
        if let Some(v) = self.gradient_threshold {
            m.gradient_threshold = v;
        }
        if let Some(v) = self.f_tolerance {
            m.optimizer.f_tolerance = v;
        }
        if let Some(v) = self.initial_step {
            m.optimizer.initial_step = v;
        }
        if let Some(v) = &self.output_dir {
            m.output_dir = v.clone();
        }
        if let Some(v) = self.seed {
            m.seed = v;
        }
        m
    }
}

#[derive(Parser, Debug)]
#[command(name = "kadapt", version, about = "Chunked adaptive VQE on an exact statevector")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Grow and optimize one ansatz; writes result.json, trace.csv, ansatz.json and ansatz.txt
    Run(RunArgs),
    /// Run the same system under several manifests or k values and tabulate errors and call counts
    Compare(CompareArgs),
    /// Run every geometry matching a glob and write a dissociation curve
    Scan(ScanArgs),
    /// Print the operator pool for a system
    PoolInfo(PoolInfoArgs),
    /// Exact lowest energies of a system
    Fci(FciArgs),
}

#[derive(Args, Debug)]
pub struct RunArgs {
    /// JSON manifest, or a result.json from an earlier run
    #[arg(long)]
    pub manifest: Option<PathBuf>,
    #[command(flatten)]
    pub overrides: ManifestArgs,
}

#[derive(Args, Debug)]
pub struct CompareArgs {
    /// Manifest per run (repeatable)
    #[arg(long = "manifest")]
    pub manifests: Vec<PathBuf>,
    /// Comma-separated k values, each run on --fcidump
    #[arg(long, value_delimiter = ',')]
    pub k_list: Vec<usize>,
    #[command(flatten)]
    pub overrides: ManifestArgs,
}

#[derive(Args, Debug)]
pub struct ScanArgs {
    /// Glob selecting the FCIDUMP files, e.g. 'fixtures/lih_*.fcidump'
    #[arg(long)]
    pub glob: String,
    #[command(flatten)]
    pub overrides: ManifestArgs,
}

#[derive(Args, Debug)]
pub struct PoolInfoArgs {
    #[arg(long)]
    pub fcidump: PathBuf,
    /// Print every operator as JSON
    #[arg(long)]
    pub json: bool,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum SolverArg {
    Auto,
    Dense,
    Lanczos,
}

impl From<SolverArg> for Solver {
    fn from(s: SolverArg) -> Self {
        match s {
            SolverArg::Auto => Solver::Auto,
            SolverArg::Dense => Solver::Dense,
            SolverArg::Lanczos => Solver::Lanczos,
        }
    }
}

#[derive(Args, Debug)]
pub struct FciArgs {
    #[arg(long)]
    pub fcidump: PathBuf,
    #[arg(long, default_value_t = 1)]
    pub n_eigenvalues: usize,
    #[arg(long, value_enum, default_value_t = SolverArg::Auto)]
    pub solver: SolverArg,
    /// Diagonalize the whole Fock space instead of the file's N and Sz sector
    #[arg(long)]
    pub all_sectors: bool,
}

/// Everything `run` records; serialized as `result.json`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RunOutcome {
    pub manifest: RunManifest,
    pub metadata: Option<FixtureMetadata>,
    pub n_qubits: usize,
    pub pool_size: usize,
    pub hf_energy: f64,
    /// Exact energy from the oracle, or from the sidecar above the oracle's size limit.
    pub reference_energy: Option<f64>,
    pub final_energy: f64,
    pub error: Option<f64>,
    pub result: AdaptResult,
    pub quantum_calls: QuantumCallReport,
    pub ansatz: AnsatzReport,
}

impl RunOutcome {
    pub fn chemically_accurate(&self) -> Option<bool> {
        self.error.map(|e| e < CHEMICAL_ACCURACY)
    }
}

fn reference_energy(problem: &Problem) -> Result<Option<f64>> {
    if problem.n_qubits() <= MAX_ORACLE_QUBITS {
        return problem.fci_energy().map(Some);
    }
    Ok(problem.metadata.as_ref().and_then(|m| m.fci_energy))
}

/// Runs a manifest without writing anything.
pub fn execute(manifest: &RunManifest) -> Result<RunOutcome> {
    manifest.validate()?;
    let problem = Problem::load(&manifest.fcidump)?;
    execute_problem(manifest, &problem)
}

fn execute_problem(manifest: &RunManifest, problem: &Problem) -> Result<RunOutcome> {
    let result = run_adapt(
        &problem.hamiltonian,
        &problem.pool,
        &problem.hf_state,
        &manifest.adapt_config(),
    )?;
    let reference = reference_energy(problem)?;
    Ok(RunOutcome {
        manifest: manifest.clone(),
        metadata: problem.metadata.clone(),
        n_qubits: problem.n_qubits(),
        pool_size: problem.pool.len(),
        hf_energy: problem.hf_energy()?,
        reference_energy: reference,
        final_energy: result.final_energy,
        error: reference.map(|e| result.final_energy - e),
        quantum_calls: quantum_call_report(&result, EVALS_PER_ITERATION, reference),
        ansatz: ansatz_report(&result, &problem.pool),
        result,
    })
}

#[derive(Serialize)]
struct TraceRow {
    iteration: usize,
    energy_evaluations: usize,
    screening_evaluations: usize,
    energy: f64,
    error: Option<f64>,
}

fn create(path: &Path) -> Result<File> {
    File::create(path).map_err(|e| Error::io(path, e))
}

fn write_csv<T: Serialize>(path: &Path, header: &str, rows: &[T]) -> Result<()> {
    let mut file = create(path)?;
    file.write_all(header.as_bytes()).map_err(|e| Error::io(path, e))?;
    let mut w = csv::Writer::from_writer(file);
    for row in rows {
        w.serialize(row)?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let text = serde_json::to_string_pretty(value)?;
    std::fs::write(path, text + "\n").map_err(|e| Error::io(path, e))
}

fn create_dir(dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))
}

/// Writes `result.json`, `trace.csv`, `ansatz.json` and `ansatz.txt` into the manifest's output directory.
pub fn write_run_artifacts(outcome: &RunOutcome) -> Result<()> {
    let dir = &outcome.manifest.output_dir;
    create_dir(dir)?;
    let header = outcome.manifest.header()?;
    write_json(&dir.join("result.json"), outcome)?;

    let rows: Vec<TraceRow> = outcome
        .result
        .energy_trace
        .iter()
        .map(|p| TraceRow {
            iteration: p.iteration,
            energy_evaluations: p.energy_evaluations,
            screening_evaluations: p.screening_evaluations,
            energy: p.energy,
            error: outcome.reference_energy.map(|e| p.energy - e),
        })
        .collect();
    write_csv(&dir.join("trace.csv"), &header, &rows)?;

    #[derive(Serialize)]
    struct AnsatzFile<'a> {
        manifest: &'a RunManifest,
        ansatz: &'a AnsatzReport,
    }
    write_json(
        &dir.join("ansatz.json"),
        &AnsatzFile {
            manifest: &outcome.manifest,
            ansatz: &outcome.ansatz,
        },
    )?;
    let text_path = dir.join("ansatz.txt");
    std::fs::write(&text_path, header + &outcome.ansatz.render_text()).map_err(|e| Error::io(&text_path, e))
}

pub fn cmd_run(manifest: &RunManifest) -> Result<RunOutcome> {
    let outcome = execute(manifest)?;
    write_run_artifacts(&outcome)?;
    Ok(outcome)
}

fn stop_reason(r: StopReason) -> &'static str {
    match r {
        StopReason::GradientThreshold => "gradient threshold",
        StopReason::OperatorBudget => "operator budget",
        StopReason::IterationBudget => "iteration budget",
    }
}

fn print_run(o: &RunOutcome) {
    println!("system        {} ({} qubits, pool {})", o.manifest.fcidump.display(), o.n_qubits, o.pool_size);
    println!("HF energy     {:.10}", o.hf_energy);
    match o.reference_energy {
        Some(e) => println!("FCI energy    {e:.10}"),
        None => println!("FCI energy    unavailable"),
    }
    println!("ADAPT energy  {:.10}", o.final_energy);
    if let Some(err) = o.error {
        let mark = if err < CHEMICAL_ACCURACY { "chemically accurate" } else { "above 1 mHa" };
        println!("error         {err:.3e} Ha ({mark})");
    }
    println!(
        "operators     {} in {} steps, stopped on {}",
        o.result.ansatz.len(),
        o.result.steps.len(),
        stop_reason(o.result.converged_by)
    );
    let w = &o.quantum_calls.whole_run;
    println!(
        "calls         {} iterations, {} energy + {} screening evaluations (assumed {} at {}/iteration)",
        w.vqe_iterations, w.energy_evaluations, w.screening_evaluations, w.assumed_total, EVALS_PER_ITERATION
    );
    if let Some(c) = &o.quantum_calls.to_chemical_accuracy {
        println!(
            "to 1 mHa      {} iterations, measured {}, assumed {}",
            c.vqe_iterations, c.measured_total, c.assumed_total
        );
    }
    println!("output        {}", o.manifest.output_dir.display());
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CompareRow {
    pub run: usize,
    pub k: usize,
    pub fcidump: String,
    pub final_energy: f64,
    pub reference_energy: Option<f64>,
    pub error: Option<f64>,
    pub iterations: usize,
    pub energy_evaluations: usize,
    pub screening_evaluations: usize,
    pub assumed_calls: usize,
    pub measured_calls: usize,
    pub iterations_to_accuracy: Option<usize>,
    pub assumed_calls_to_accuracy: Option<usize>,
    pub measured_calls_to_accuracy: Option<usize>,
}

/// `baseline / candidate` for each quantity.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RatioRow {
    pub baseline: usize,
    pub candidate: usize,
    pub baseline_k: usize,
    pub candidate_k: usize,
    pub error_ratio: Option<f64>,
    pub assumed_call_ratio: f64,
    pub measured_call_ratio: f64,
    pub assumed_calls_to_accuracy_ratio: Option<f64>,
}

#[derive(Clone, Debug)]
pub struct Comparison {
    pub rows: Vec<CompareRow>,
    pub ratios: Vec<RatioRow>,
    pub outcomes: Vec<RunOutcome>,
}

fn compare_row(run: usize, o: &RunOutcome) -> CompareRow {
    let w = &o.quantum_calls.whole_run;
    let acc = o.quantum_calls.to_chemical_accuracy.as_ref();
    CompareRow {
        run,
        k: o.manifest.k,
        fcidump: o.manifest.fcidump.display().to_string(),
        final_energy: o.final_energy,
        reference_energy: o.reference_energy,
        error: o.error,
        iterations: w.vqe_iterations,
        energy_evaluations: w.energy_evaluations,
        screening_evaluations: w.screening_evaluations,
        assumed_calls: w.assumed_total,
        measured_calls: w.measured_total,
        iterations_to_accuracy: acc.map(|c| c.vqe_iterations),
        assumed_calls_to_accuracy: acc.map(|c| c.assumed_total),
        measured_calls_to_accuracy: acc.map(|c| c.measured_total),
    }
}

fn ratio(a: usize, b: usize) -> f64 {
    a as f64 / b as f64
}

fn ratio_rows(rows: &[CompareRow]) -> Vec<RatioRow> {
    let mut out = Vec::new();
    for (i, a) in rows.iter().enumerate() {
        for b in &rows[i + 1..] {
            out.push(RatioRow {
                baseline: a.run,
                candidate: b.run,
                baseline_k: a.k,
                candidate_k: b.k,
                error_ratio: a.error.zip(b.error).map(|(x, y)| x / y),
                assumed_call_ratio: ratio(a.assumed_calls, b.assumed_calls),
                measured_call_ratio: ratio(a.measured_calls, b.measured_calls),
                assumed_calls_to_accuracy_ratio: a
                    .assumed_calls_to_accuracy
                    .zip(b.assumed_calls_to_accuracy)
                    .map(|(x, y)| ratio(x, y)),
            });
        }
    }
    out
}

/// Manifests for a k-list comparison on one file.
///
/// Without an explicit per-step budget, each run gets `total · k / max_operators`
/// iterations per step so every run can spend the same total.
pub fn k_list_manifests(base: &RunManifest, ks: &[usize]) -> Vec<RunManifest> {
    let total = base.total_iterations.unwrap_or(DEFAULT_COMPARE_BUDGET);
    ks.iter()
        .map(|&k| RunManifest {
            k,
            total_iterations: Some(total),
            iters_per_step: (total * k / base.max_operators.max(1)).max(1),
            ..base.clone()
        })
        .collect()
}

/// Runs every manifest (all on the same system) and writes `compare.csv`
/// plus, for two or more runs, `compare_ratios.csv` into `output_dir`.
/// Each run's artifacts go to `output_dir/run<i>_k<k>`.
pub fn cmd_compare(manifests: &[RunManifest], output_dir: &Path) -> Result<Comparison> {
    if manifests.is_empty() {
        return Err(Error::InvalidConfig("compare needs at least one run".into()));
    }
    for m in manifests {
        m.validate()?;
    }
    let first = MolecularIntegrals::from_path(&manifests[0].fcidump)?;
    for m in &manifests[1..] {
        if MolecularIntegrals::from_path(&m.fcidump)? != first {
            return Err(Error::MismatchedFixtures(format!(
                "{} and {} describe different systems",
                manifests[0].fcidump.display(),
                m.fcidump.display()
            )));
        }
    }
    let problem = Problem::load(&manifests[0].fcidump)?;
    let manifests: Vec<RunManifest> = manifests
        .iter()
        .enumerate()
        .map(|(i, m)| RunManifest {
            output_dir: output_dir.join(format!("run{i}_k{}", m.k)),
            ..m.clone()
        })
        .collect();

    let mut outcomes = Vec::with_capacity(manifests.len());
    for m in &manifests {
        let o = execute_problem(m, &problem)?;
        write_run_artifacts(&o)?;
        outcomes.push(o);
    }
    let rows: Vec<CompareRow> = outcomes.iter().enumerate().map(|(i, o)| compare_row(i, o)).collect();
    let ratios = ratio_rows(&rows);

    create_dir(output_dir)?;
    let mut header = String::new();
    for (i, m) in manifests.iter().enumerate() {
        header += &format!("# run{i} manifest: {}\n", serde_json::to_string(m)?);
    }
    write_csv(&output_dir.join("compare.csv"), &header, &rows)?;
    if !ratios.is_empty() {
        write_csv(&output_dir.join("compare_ratios.csv"), &header, &ratios)?;
    }
    Ok(Comparison { rows, ratios, outcomes })
}

fn print_comparison(c: &Comparison) {
    println!("{:>4} {:>3} {:>16} {:>11} {:>6} {:>8} {:>8}", "run", "k", "energy", "error", "iters", "assumed", "measured");
    for r in &c.rows {
        let err = r.error.map_or("n/a".to_string(), |e| format!("{e:.3e}"));
        println!(
            "{:>4} {:>3} {:>16.10} {:>11} {:>6} {:>8} {:>8}",
            r.run, r.k, r.final_energy, err, r.iterations, r.assumed_calls, r.measured_calls
        );
    }
    for r in &c.ratios {
        let err = r.error_ratio.map_or("n/a".to_string(), |e| format!("{e:.2}"));
        let acc = r
            .assumed_calls_to_accuracy_ratio
            .map_or("n/a".to_string(), crate::adapt::format_reduction);
        println!(
            "run{} (k={}) / run{} (k={}): error x{err}, assumed calls x{:.2}, measured calls x{:.2}, to 1 mHa {acc}",
            r.baseline, r.baseline_k, r.candidate, r.candidate_k, r.assumed_call_ratio, r.measured_call_ratio
        );
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScanRow {
    pub fcidump: String,
    pub molecule: Option<String>,
    pub bond_length_angstrom: Option<f64>,
    pub hf_energy: f64,
    pub fci_energy: Option<f64>,
    pub adapt_energy: f64,
    pub error: Option<f64>,
    pub chemically_accurate: Option<bool>,
    pub operators: usize,
    pub iterations: usize,
}

/// Expands a glob into a sorted file list.
pub fn expand_glob(pattern: &str) -> Result<Vec<PathBuf>> {
    let paths = glob::glob(pattern).map_err(|e| Error::InvalidConfig(format!("bad glob {pattern}: {e}")))?;
    let mut files = Vec::new();
    for p in paths {
        files.push(p.map_err(|e| Error::io(e.path().to_path_buf(), std::io::Error::other(e.to_string())))?);
    }
    if files.is_empty() {
        return Err(Error::InvalidConfig(format!("no files match {pattern}")));
    }
    files.sort();
    Ok(files)
}

/// Runs `template` on every file and writes `scan.csv` to its output directory,
/// rows ordered by bond length.
pub fn cmd_scan(template: &RunManifest, files: &[PathBuf]) -> Result<Vec<ScanRow>> {
    if files.is_empty() {
        return Err(Error::InvalidConfig("scan needs at least one file".into()));
    }
    template.adapt_config().validate()?;
    let integrals = files
        .iter()
        .map(MolecularIntegrals::from_path)
        .collect::<Result<Vec<_>>>()?;
    let shape = |m: &MolecularIntegrals| (m.n_orbitals(), m.n_electrons(), m.ms2());
    for (f, m) in files.iter().zip(&integrals).skip(1) {
        if shape(m) != shape(&integrals[0]) {
            return Err(Error::MismatchedFixtures(format!(
                "{} has (orbitals, electrons, ms2) = {:?}, {} has {:?}",
                f.display(),
                shape(m),
                files[0].display(),
                shape(&integrals[0])
            )));
        }
    }

    let mut rows = files
        .par_iter()
        .zip(integrals)
        .map(|(f, ints)| {
            let m = RunManifest {
                fcidump: f.clone(),
                ..template.clone()
            };
            let problem = Problem::from_integrals(ints, load_metadata(f)?)?;
            let o = execute_problem(&m, &problem)?;
            Ok(ScanRow {
                fcidump: f.display().to_string(),
                molecule: o.metadata.as_ref().map(|d| d.molecule.clone()),
                bond_length_angstrom: o.metadata.as_ref().map(|d| d.bond_length_angstrom),
                hf_energy: o.hf_energy,
                fci_energy: o.reference_energy,
                adapt_energy: o.final_energy,
                error: o.error,
                chemically_accurate: o.chemically_accurate(),
                operators: o.result.ansatz.len(),
                iterations: o.result.total_iterations(),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    rows.sort_by(|a, b| {
        let key = |r: &ScanRow| r.bond_length_angstrom.unwrap_or(f64::INFINITY);
        key(a).total_cmp(&key(b)).then_with(|| a.fcidump.cmp(&b.fcidump))
    });

    create_dir(&template.output_dir)?;
    write_csv(&template.output_dir.join("scan.csv"), &template.header()?, &rows)?;
    Ok(rows)
}

fn print_scan(rows: &[ScanRow]) {
    println!("{:>8} {:>16} {:>16} {:>16} {:>11}", "bond", "HF", "FCI", "ADAPT", "error");
    for r in rows {
        let fmt = |v: Option<f64>, p: usize| v.map_or("n/a".to_string(), |x| format!("{x:.p$}"));
        println!(
            "{:>8} {:>16.10} {:>16} {:>16.10} {:>11}",
            fmt(r.bond_length_angstrom, 3),
            r.hf_energy,
            fmt(r.fci_energy, 10),
            r.adapt_energy,
            r.error.map_or("n/a".to_string(), |e| format!("{e:.3e}"))
        );
    }
    let accurate = rows.iter().filter(|r| r.chemically_accurate == Some(true)).count();
    println!("chemically accurate at {accurate} of {} geometries", rows.len());
}

pub fn cmd_pool_info(fcidump: &Path) -> Result<PoolSummary> {
    let ints = MolecularIntegrals::from_path(fcidump)?;
    Ok(build_pool(ints.n_electrons(), ints.n_spin_orbitals())?.summary())
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FciReport {
    pub n_qubits: usize,
    pub sector: Option<(usize, i32)>,
    pub energies: Vec<f64>,
    pub sidecar_fci_energy: Option<f64>,
}

pub fn cmd_fci(args: &FciArgs) -> Result<FciReport> {
    let ints = MolecularIntegrals::from_path(&args.fcidump)?;
    let h = qubit_hamiltonian(&ints)?;
    let mut req = SpectrumRequest::new(&h).with_solver(args.solver.into());
    req.n_eigenvalues = args.n_eigenvalues;
    let sector = (!args.all_sectors).then(|| (ints.n_electrons(), ints.ms2()));
    if let Some((n, ms2)) = sector {
        req = req.in_sector(n, ms2);
    }
    Ok(FciReport {
        n_qubits: ints.n_spin_orbitals(),
        sector,
        energies: lowest_energies(&req)?,
        sidecar_fci_energy: load_metadata(&args.fcidump)?.and_then(|m| m.fci_energy),
    })
}

/// Dispatches a parsed command line.
pub fn dispatch(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Run(args) => {
            let base = match &args.manifest {
                Some(p) => RunManifest::load(p)?,
                None => RunManifest::default(),
            };
            let outcome = cmd_run(&args.overrides.apply(base))?;
            print_run(&outcome);
        }
        Command::Compare(args) => {
            let manifests = if !args.manifests.is_empty() {
                if !args.k_list.is_empty() {
                    return Err(Error::InvalidConfig("give either --manifest or --k-list, not both".into()));
                }
                args.manifests
                    .iter()
                    .map(|p| RunManifest::load(p).map(|m| args.overrides.apply(m)))
                    .collect::<Result<Vec<_>>>()?
            } else if !args.k_list.is_empty() {
                let base = args.overrides.apply(RunManifest::default());
                let mut ms = k_list_manifests(&base, &args.k_list);
                if let Some(per_step) = args.overrides.iters_per_step {
                    ms.iter_mut().for_each(|m| m.iters_per_step = per_step);
                }
                ms
            } else {
                return Err(Error::InvalidConfig("compare needs --manifest or --k-list".into()));
            };
            let out = args
                .overrides
                .output_dir
                .clone()
                .unwrap_or_else(|| RunManifest::default().output_dir);
            let comparison = cmd_compare(&manifests, &out)?;
            print_comparison(&comparison);
        }
        Command::Scan(args) => {
            let files = expand_glob(&args.glob)?;
            let template = RunManifest {
                fcidump: PathBuf::from(&args.glob),
                ..args.overrides.apply(RunManifest::default())
            };
            let rows = cmd_scan(&template, &files)?;
            print_scan(&rows);
        }
        Command::PoolInfo(args) => {
            let s = cmd_pool_info(&args.fcidump)?;
            if args.json {
                println!("{}", serde_json::to_string_pretty(&s)?);
            } else {
                println!("qubits      {}", s.n_qubits);
                println!("electrons   {}", s.n_electrons);
                println!("pool size   {}", s.size);
                println!("mixed-spin  {}", s.mixed_spin);
                println!("same-spin   {}", s.same_spin);
            }
        }
        Command::Fci(args) => {
            let r = cmd_fci(&args)?;
            match r.sector {
                Some((n, ms2)) => println!("sector      N={n}, 2Sz={ms2} on {} qubits", r.n_qubits),
                None => println!("sector      full Fock space on {} qubits", r.n_qubits),
            }
            for (i, e) in r.energies.iter().enumerate() {
                println!("E{i:<10} {e:.12}");
            }
            if let (Some(side), Some(e0)) = (r.sidecar_fci_energy, r.energies.first()) {
                println!("sidecar     {side:.12} (difference {:.2e})", e0 - side);
            }
        }
    }
    Ok(())
}

/// Parses `std::env::args`, runs, and returns the process exit status.
pub fn main_entry() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match dispatch(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
