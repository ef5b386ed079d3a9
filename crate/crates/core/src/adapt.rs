//! Chunked adaptive ansatz growth.
//!
//! Each step screens the whole pool by the energy gradient an operator would
//! have if appended at zero angle, appends the `k` steepest operators (largest
//! first, parameters zero) and re-optimizes every parameter from the previous
//! optimum. With `k = 1` this is plain ADAPT-VQE.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::optimizer::{minimize, OptimizerConfig};
use crate::pauli::{GroupedPauliSum, PauliSum};
use crate::pool::{ExcitationOperator, OperatorPool, SpinCategory};
use crate::statevector::Statevector;

/// Energy error below which a result counts as chemically accurate, in Hartree.
pub const CHEMICAL_ACCURACY: f64 = 1e-3;

const NORM_TOL: f64 = 1e-10;
const IMAG_TOL: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AdaptConfig {
    pub k: usize,
    pub max_operators: usize,
    pub vqe_iterations_per_step: usize,
    /// Cap on optimizer iterations summed over all steps.
    pub total_iteration_budget: Option<usize>,
    pub gradient_threshold: f64,
    pub optimizer: OptimizerConfig,
}

impl Default for AdaptConfig {
    fn default() -> Self {
        AdaptConfig {
            k: 5,
            max_operators: 25,
            vqe_iterations_per_step: 200,
            total_iteration_budget: None,
            gradient_threshold: 1e-3,
            optimizer: OptimizerConfig::default(),
        }
    }
}

impl AdaptConfig {
    pub fn validate(&self) -> Result<()> {
        if self.k == 0 {
            return Err(Error::InvalidConfig("k must be at least 1".into()));
        }
        if self.max_operators == 0 {
            return Err(Error::InvalidConfig("max_operators must be at least 1".into()));
        }
        if self.vqe_iterations_per_step == 0 {
            return Err(Error::InvalidConfig("vqe_iterations_per_step must be at least 1".into()));
        }
        if self.total_iteration_budget == Some(0) {
            return Err(Error::InvalidConfig("total iteration budget must be at least 1".into()));
        }
        if !(self.gradient_threshold > 0.0) {
            return Err(Error::InvalidConfig("gradient threshold must be positive".into()));
        }
        self.optimizer.validate()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StopReason {
    GradientThreshold,
    OperatorBudget,
    IterationBudget,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AnsatzEntry {
    pub pool_index: usize,
    pub label: String,
    /// 0-based ADAPT step that appended this operator.
    pub chunk: usize,
    pub parameter: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TracePoint {
    /// Cumulative optimizer iterations.
    pub iteration: usize,
    /// Cumulative energy evaluations.
    pub energy_evaluations: usize,
    /// Cumulative screening evaluations.
    pub screening_evaluations: usize,
    /// Best energy seen so far.
    pub energy: f64,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuantumCallLedger {
    /// One per pool commutator expectation.
    pub screening_evaluations: usize,
    /// One per ansatz energy expectation.
    pub energy_evaluations: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StepRecord {
    pub step: usize,
    pub max_gradient: f64,
    pub selected: Vec<usize>,
    pub selected_gradients: Vec<f64>,
    pub energy_before: f64,
    pub energy_after: f64,
    pub iterations: usize,
    pub evaluations: usize,
    pub optimizer_converged: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AdaptResult {
    pub k: usize,
    pub pool_size: usize,
    pub initial_energy: f64,
    pub ansatz: Vec<AnsatzEntry>,
    pub energy_trace: Vec<TracePoint>,
    pub final_energy: f64,
    pub quantum_calls: QuantumCallLedger,
    pub converged_by: StopReason,
    pub steps: Vec<StepRecord>,
    /// Gradients from the last screening pass.
    pub final_max_gradient: Option<f64>,
}

impl AdaptResult {
    pub fn parameters(&self) -> Vec<f64> {
        self.ansatz.iter().map(|e| e.parameter).collect()
    }

    pub fn operator_indices(&self) -> Vec<usize> {
        self.ansatz.iter().map(|e| e.pool_index).collect()
    }

    pub fn total_iterations(&self) -> usize {
        self.energy_trace.last().map_or(0, |t| t.iteration)
    }
}

/// `|initial⟩` evolved through `exp(θ_n G_n) ⋯ exp(θ_1 G_1)`.
pub fn prepare_state(
    initial: &Statevector,
    pool: &OperatorPool,
    operators: &[usize],
    parameters: &[f64],
) -> Result<Statevector> {
    let mut state = initial.clone();
    for (&idx, &theta) in operators.iter().zip(parameters) {
        let op = pool
            .get(idx)
            .ok_or(Error::IndexOutOfRange { index: idx, limit: pool.len() })?;
        state.apply_excitation(op, theta)?;
    }
    Ok(state)
}

/// `dE/dθ` at `θ = 0` for one operator: `−⟨ψ|[G, H]|ψ⟩`.
///
/// With `G = iP` for Hermitian `P` this is the familiar `−i⟨ψ|[P, H]|ψ⟩`.
pub fn operator_gradient(state: &Statevector, op: &ExcitationOperator) -> Result<f64> {
    let value = state.expectation_grouped(op.grouped_commutator()?)?;
    if value.im.abs() > IMAG_TOL * value.re.abs().max(1.0) {
        return Err(Error::NonHermitian(value.im.abs()));
    }
    Ok(-value.re)
}

/// Gradient of every pool operator; logs one screening evaluation each.
pub fn gradient_screen(
    state: &Statevector,
    pool: &OperatorPool,
    ledger: &mut QuantumCallLedger,
) -> Result<Vec<f64>> {
    if let Some(op) = pool.operators().iter().find(|o| o.commutator_with_h().is_none()) {
        return Err(Error::MissingCommutator(op.label().to_string()));
    }
    let gradients = pool
        .operators()
        .par_iter()
        .map(|op| operator_gradient(state, op))
        .collect::<Result<Vec<_>>>()?;
    ledger.screening_evaluations += pool.len();
    Ok(gradients)
}

/// Indices of the `k` largest `|gradient|`, largest first, ties to the lower index.
///
/// Pool indices follow the canonical `(p, q, r, s)` order, so the tie rule is
/// "lower canonical label first".
pub fn select_top_k(gradients: &[f64], k: usize) -> Vec<usize> {
    let mut order: Vec<usize> = (0..gradients.len()).collect();
    order.sort_by(|&a, &b| {
        gradients[b]
            .abs()
            .total_cmp(&gradients[a].abs())
            .then(a.cmp(&b))
    });
    order.truncate(k);
    order
}

pub fn run_adapt(
    h: &PauliSum,
    pool: &OperatorPool,
    initial: &Statevector,
    cfg: &AdaptConfig,
) -> Result<AdaptResult> {
    cfg.validate()?;
    if pool.is_empty() {
        return Err(Error::EmptyPool);
    }
    for n in [h.n_qubits(), initial.n_qubits()] {
        if n != pool.n_qubits() {
            return Err(Error::QubitMismatch {
                left: pool.n_qubits(),
                right: n,
            });
        }
    }
    if !pool.has_commutators() {
        return Err(Error::MissingCommutator(
            "pool (call precompute_commutators first)".into(),
        ));
    }
    if (initial.norm_sqr() - 1.0).abs() > NORM_TOL {
        return Err(Error::InvalidConfig("initial state is not normalized".into()));
    }

    let hamiltonian: GroupedPauliSum = h.grouped();
    let mut ledger = QuantumCallLedger::default();
    let initial_energy = initial.energy(&hamiltonian)?;
    let mut operators: Vec<usize> = Vec::new();
    let mut chunks: Vec<usize> = Vec::new();
    let mut parameters: Vec<f64> = Vec::new();
    let mut best = initial_energy;
    let mut iterations = 0usize;
    let mut trace = vec![TracePoint {
        iteration: 0,
        energy_evaluations: 0,
        screening_evaluations: 0,
        energy: initial_energy,
    }];
    let mut steps = Vec::new();
    let mut final_max_gradient = None;

    let converged_by = loop {
        if operators.len() >= cfg.max_operators {
            break StopReason::OperatorBudget;
        }
        let remaining = cfg
            .total_iteration_budget
            .map_or(usize::MAX, |total| total.saturating_sub(iterations));
        if remaining == 0 {
            break StopReason::IterationBudget;
        }

        let state = prepare_state(initial, pool, &operators, &parameters)?;
        let gradients = gradient_screen(&state, pool, &mut ledger)?;
        let max_gradient = gradients.iter().fold(0.0f64, |m, g| m.max(g.abs()));
        final_max_gradient = Some(max_gradient);
        if max_gradient < cfg.gradient_threshold {
            break StopReason::GradientThreshold;
        }

        let take = cfg.k.min(cfg.max_operators - operators.len());
        let selected = select_top_k(&gradients, take);
        let step = steps.len();
        for &idx in &selected {
            operators.push(idx);
            chunks.push(step);
            parameters.push(0.0);
        }

        let optimizer = OptimizerConfig {
            max_iterations: cfg.vqe_iterations_per_step.min(remaining),
            ..cfg.optimizer.clone()
        };
        let evaluations_before = ledger.energy_evaluations;
        let mut failure: Option<Error> = None;
        let mut objective = |theta: &[f64]| -> f64 {
            ledger.energy_evaluations += 1;
            match prepare_state(initial, pool, &operators, theta)
                .and_then(|s| s.energy(&hamiltonian))
            {
                Ok(e) => e,
                Err(e) => {
                    failure.get_or_insert(e);
                    f64::NAN
                }
            }
        };
        let outcome = minimize(&mut objective, &parameters, &optimizer);
        if let Some(e) = failure {
            return Err(e);
        }
        let outcome = outcome?;

        let screening = ledger.screening_evaluations;
        // evaluation 0 re-checks the warm start; iteration i is evaluation i
        for (i, &value) in outcome.trace.iter().enumerate() {
            best = best.min(value);
            trace.push(TracePoint {
                iteration: iterations + i + 1,
                energy_evaluations: evaluations_before + i + 2,
                screening_evaluations: screening,
                energy: best,
            });
        }
        let energy_before = steps
            .last()
            .map_or(initial_energy, |s: &StepRecord| s.energy_after);
        iterations += outcome.n_iterations;
        parameters = outcome.best_parameters;
        steps.push(StepRecord {
            step,
            max_gradient,
            selected_gradients: selected.iter().map(|&i| gradients[i]).collect(),
            selected,
            energy_before,
            energy_after: outcome.best_energy,
            iterations: outcome.n_iterations,
            evaluations: outcome.n_evaluations,
            optimizer_converged: outcome.converged,
        });
    };

    let final_energy = steps.last().map_or(initial_energy, |s| s.energy_after);
    let ansatz = operators
        .iter()
        .zip(&chunks)
        .zip(&parameters)
        .map(|((&pool_index, &chunk), &parameter)| AnsatzEntry {
            pool_index,
            label: pool.operators()[pool_index].label().to_string(),
            chunk,
            parameter,
        })
        .collect();
    Ok(AdaptResult {
        k: cfg.k,
        pool_size: pool.len(),
        initial_energy,
        ansatz,
        energy_trace: trace,
        final_energy,
        quantum_calls: ledger,
        converged_by,
        steps,
        final_max_gradient,
    })
}

/// `evals_per_iteration · vqe_iterations + pool_size · screening_steps`.
pub fn assumed_quantum_calls(
    evals_per_iteration: usize,
    vqe_iterations: usize,
    pool_size: usize,
    screening_steps: usize,
) -> usize {
    evals_per_iteration * vqe_iterations + pool_size * screening_steps
}

/// `baseline / improved`, rounded to one decimal for display.
pub fn format_reduction(ratio: f64) -> String {
    format!("~{ratio:.1}")
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CallCount {
    pub vqe_iterations: usize,
    pub screening_steps: usize,
    pub screening_evaluations: usize,
    pub energy_evaluations: usize,
    /// Per-iteration assumption applied to the iteration count.
    pub assumed_total: usize,
    /// Energy evaluations actually made plus screening evaluations.
    pub measured_total: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuantumCallReport {
    pub k: usize,
    pub pool_size: usize,
    pub evals_per_iteration_assumption: usize,
    pub whole_run: CallCount,
    /// Counts up to the first iteration within chemical accuracy of the reference.
    pub to_chemical_accuracy: Option<CallCount>,
    pub reference_energy: Option<f64>,
}

pub fn quantum_call_report(
    r: &AdaptResult,
    evals_per_iteration_assumption: usize,
    reference_energy: Option<f64>,
) -> QuantumCallReport {
    let count = |point: &TracePoint| {
        let screening_steps = point.screening_evaluations / r.pool_size.max(1);
        CallCount {
            vqe_iterations: point.iteration,
            screening_steps,
            screening_evaluations: point.screening_evaluations,
            energy_evaluations: point.energy_evaluations,
            assumed_total: assumed_quantum_calls(
                evals_per_iteration_assumption,
                point.iteration,
                r.pool_size,
                screening_steps,
            ),
            measured_total: point.energy_evaluations + point.screening_evaluations,
        }
    };
    let last = TracePoint {
        iteration: r.total_iterations(),
        energy_evaluations: r.quantum_calls.energy_evaluations,
        screening_evaluations: r.quantum_calls.screening_evaluations,
        energy: r.final_energy,
    };
    let to_chemical_accuracy = reference_energy.and_then(|e_ref| {
        r.energy_trace
            .iter()
            .find(|p| p.energy - e_ref < CHEMICAL_ACCURACY)
            .map(count)
    });
    QuantumCallReport {
        k: r.k,
        pool_size: r.pool_size,
        evals_per_iteration_assumption,
        whole_run: count(&last),
        to_chemical_accuracy,
        reference_energy,
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AnsatzOperatorReport {
    pub label: String,
    pub pool_index: usize,
    pub occ: (usize, usize),
    pub virt: (usize, usize),
    pub support: Vec<usize>,
    pub z_string: Vec<usize>,
    pub parameter: f64,
    pub same_spin: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChunkOverlap {
    pub first: String,
    pub second: String,
    pub shared_qubits: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChunkReport {
    pub chunk: usize,
    pub operators: Vec<AnsatzOperatorReport>,
    pub overlaps: Vec<ChunkOverlap>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct AnsatzReport {
    pub n_qubits: usize,
    pub chunks: Vec<ChunkReport>,
}

impl AnsatzReport {
    pub fn n_operators(&self) -> usize {
        self.chunks.iter().map(|c| c.operators.len()).sum()
    }

    /// One line per operator with a qubit diagram: `#` support, `z` parity string.
    pub fn render_text(&self) -> String {
        let mut out = String::new();
        for chunk in &self.chunks {
            let _ = writeln!(out, "chunk {}", chunk.chunk);
            for op in &chunk.operators {
                let diagram: String = (0..self.n_qubits)
                    .map(|q| {
                        if op.support.contains(&q) {
                            '#'
                        } else if op.z_string.contains(&q) {
                            'z'
                        } else {
                            '.'
                        }
                    })
                    .collect();
                let _ = writeln!(
                    out,
                    "  {:<16} {} theta={:+.6}{}",
                    op.label,
                    diagram,
                    op.parameter,
                    if op.same_spin { " same-spin" } else { "" }
                );
            }
            for o in &chunk.overlaps {
                let _ = writeln!(out, "  overlap {} / {} on {:?}", o.first, o.second, o.shared_qubits);
            }
        }
        out
    }
}

pub fn ansatz_report(r: &AdaptResult, pool: &OperatorPool) -> AnsatzReport {
    let mut chunks: Vec<ChunkReport> = Vec::new();
    for entry in &r.ansatz {
        let op = &pool.operators()[entry.pool_index];
        let item = AnsatzOperatorReport {
            label: op.label().to_string(),
            pool_index: entry.pool_index,
            occ: op.occ(),
            virt: op.virt(),
            support: op.support_qubits(),
            z_string: op.z_string_qubits(),
            parameter: entry.parameter,
            same_spin: op.category() == SpinCategory::SameSpin,
        };
        match chunks.last_mut() {
            Some(c) if c.chunk == entry.chunk => c.operators.push(item),
            _ => chunks.push(ChunkReport {
                chunk: entry.chunk,
                operators: vec![item],
                overlaps: Vec::new(),
            }),
        }
    }
    for chunk in &mut chunks {
        let ops = &chunk.operators;
        for (i, a) in ops.iter().enumerate() {
            let sa: BTreeSet<usize> = a.support.iter().copied().collect();
            for b in &ops[i + 1..] {
                let shared: Vec<usize> = b.support.iter().filter(|q| sa.contains(q)).copied().collect();
                if !shared.is_empty() {
                    chunk.overlaps.push(ChunkOverlap {
                        first: a.label.clone(),
                        second: b.label.clone(),
                        shared_qubits: shared,
                    });
                }
            }
        }
    }
    AnsatzReport {
        n_qubits: pool.n_qubits(),
        chunks,
    }
}
