//! Derivative-free minimization: a linear-model trust-region method on a
//! simplex, after Powell's COBYLA with no constraints.
//!
//! The simplex holds `n + 1` evaluated points. Each iteration either takes a
//! steepest-descent step of length `rho` on the interpolating linear model, or
//! repairs the simplex geometry. `rho` halves whenever a step fails to realise
//! a tenth of its predicted decrease on a well-shaped simplex; the run
//! converges once `rho` drops below the tolerance.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OptimizerConfig {
    /// Cap on objective evaluations after the starting point.
    pub max_iterations: usize,
    /// Final trust-region radius; same units as the parameters.
    pub f_tolerance: f64,
    /// Initial trust-region radius and simplex edge.
    pub initial_step: f64,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        OptimizerConfig {
            max_iterations: 200,
            f_tolerance: 1e-3,
            initial_step: 0.1,
        }
    }
}

impl OptimizerConfig {
    pub fn validate(&self) -> Result<()> {
        if self.max_iterations == 0 {
            return Err(Error::InvalidConfig("max_iterations must be at least 1".into()));
        }
        if !(self.f_tolerance > 0.0) {
            return Err(Error::InvalidConfig("f_tolerance must be positive".into()));
        }
        if !(self.initial_step > 0.0) {
            return Err(Error::InvalidConfig("initial_step must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OptimizationOutcome {
    pub best_parameters: Vec<f64>,
    pub best_energy: f64,
    pub n_evaluations: usize,
    pub n_iterations: usize,
    pub converged: bool,
    /// Best value seen after each iteration.
    pub trace: Vec<f64>,
}

/// Anything that can minimize a deterministic objective from a starting point.
pub trait Minimizer {
    fn minimize(
        &self,
        objective: &mut dyn FnMut(&[f64]) -> f64,
        x0: &[f64],
    ) -> Result<OptimizationOutcome>;
}

#[derive(Clone, Debug, Default)]
pub struct Cobyla {
    pub config: OptimizerConfig,
}

impl Minimizer for Cobyla {
    fn minimize(
        &self,
        objective: &mut dyn FnMut(&[f64]) -> f64,
        x0: &[f64],
    ) -> Result<OptimizationOutcome> {
        minimize(objective, x0, &self.config)
    }
}

const ACCEPT_RATIO: f64 = 0.1;
const MAX_EDGE: f64 = 2.1;
const MIN_HEIGHT: f64 = 0.25;
const GEOMETRY_STEP: f64 = 0.5;

struct Counter<'a> {
    objective: &'a mut dyn FnMut(&[f64]) -> f64,
    evaluations: usize,
    best: f64,
    best_x: Vec<f64>,
    trace: Vec<f64>,
}

impl Counter<'_> {
    fn eval(&mut self, x: &[f64]) -> Result<f64> {
        let f = (self.objective)(x);
        self.evaluations += 1;
        if !f.is_finite() {
            return Err(Error::NonFinite {
                value: f,
                evaluation: self.evaluations,
            });
        }
        if f < self.best || self.evaluations == 1 {
            self.best = f;
            self.best_x = x.to_vec();
        }
        if self.evaluations > 1 {
            self.trace.push(self.best);
        }
        Ok(f)
    }
}

struct Simplex {
    points: Vec<Vec<f64>>,
    values: Vec<f64>,
}

impl Simplex {
    fn best(&self) -> usize {
        // first minimum wins, so ties are resolved by insertion order
        let mut b = 0;
        for (j, &v) in self.values.iter().enumerate() {
            if v < self.values[b] {
                b = j;
            }
        }
        b
    }

    /// Rows are edges `v_j − v_best` for every `j ≠ best`, in vertex order.
    fn edges(&self, best: usize) -> (Vec<usize>, DMatrix<f64>) {
        let n = self.points[0].len();
        let others: Vec<usize> = (0..self.points.len()).filter(|&j| j != best).collect();
        let mut m = DMatrix::zeros(n, n);
        for (row, &j) in others.iter().enumerate() {
            for k in 0..n {
                m[(row, k)] = self.points[j][k] - self.points[best][k];
            }
        }
        (others, m)
    }
}

/// Minimizes `objective` from `x0`; every call is counted.
///
/// Stops when `max_iterations` evaluations beyond `x0` are spent or when the
/// trust-region radius falls below `f_tolerance` (reported as converged).
pub fn minimize(
    objective: &mut dyn FnMut(&[f64]) -> f64,
    x0: &[f64],
    cfg: &OptimizerConfig,
) -> Result<OptimizationOutcome> {
    cfg.validate()?;
    if x0.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidConfig("starting point is not finite".into()));
    }
    let n = x0.len();
    let mut counter = Counter {
        objective,
        evaluations: 0,
        best: f64::INFINITY,
        best_x: x0.to_vec(),
        trace: Vec::new(),
    };
    let budget = cfg.max_iterations + 1;
    let f0 = counter.eval(x0)?;
    let finish = |counter: Counter, converged: bool| OptimizationOutcome {
        best_parameters: counter.best_x,
        best_energy: counter.best,
        n_evaluations: counter.evaluations,
        n_iterations: counter.evaluations - 1,
        converged,
        trace: counter.trace,
    };
    if n == 0 {
        return Ok(finish(counter, true));
    }

    let mut rho = cfg.initial_step;
    let mut simplex = Simplex {
        points: vec![x0.to_vec()],
        values: vec![f0],
    };
    for k in 0..n {
        if counter.evaluations >= budget {
            return Ok(finish(counter, false));
        }
        let mut x = x0.to_vec();
        x[k] += rho;
        let f = counter.eval(&x)?;
        simplex.points.push(x);
        simplex.values.push(f);
    }

    let mut last_step_failed = false;
    while counter.evaluations < budget {
        let b = simplex.best();
        let (others, edges) = simplex.edges(b);
        let Some(inverse) = edges.clone().try_inverse() else {
            // degenerate simplex: rebuild it around the best point
            let base = simplex.points[b].clone();
            let fb = simplex.values[b];
            simplex.points = vec![base.clone()];
            simplex.values = vec![fb];
            for k in 0..n {
                if counter.evaluations >= budget {
                    return Ok(finish(counter, false));
                }
                let mut x = base.clone();
                x[k] += rho;
                let f = counter.eval(&x)?;
                simplex.points.push(x);
                simplex.values.push(f);
            }
            last_step_failed = false;
            continue;
        };
        let df = DVector::from_iterator(
            n,
            others.iter().map(|&j| simplex.values[j] - simplex.values[b]),
        );
        let gradient = &inverse * &df;

        if last_step_failed {
            // edge lengths and distances of each vertex to the opposite face
            let lengths: Vec<f64> = (0..n).map(|row| edges.row(row).norm()).collect();
            let heights: Vec<f64> = (0..n).map(|row| 1.0 / inverse.column(row).norm()).collect();
            let too_long = (0..n)
                .filter(|&r| lengths[r] > MAX_EDGE * rho)
                .max_by(|&a, &c| lengths[a].total_cmp(&lengths[c]));
            let too_flat = (0..n)
                .filter(|&r| heights[r] < MIN_HEIGHT * rho)
                .min_by(|&a, &c| heights[a].total_cmp(&heights[c]));
            if let Some(row) = too_long.or(too_flat) {
                // move that vertex off the face spanned by the others
                let dir = inverse.column(row);
                let scale = GEOMETRY_STEP * rho / dir.norm();
                let mut step: Vec<f64> = dir.iter().map(|v| v * scale).collect();
                if gradient.iter().zip(&step).map(|(g, s)| g * s).sum::<f64>() > 0.0 {
                    step.iter_mut().for_each(|s| *s = -*s);
                }
                let x: Vec<f64> = simplex.points[b].iter().zip(&step).map(|(a, s)| a + s).collect();
                let f = counter.eval(&x)?;
                let j = others[row];
                simplex.points[j] = x;
                simplex.values[j] = f;
                last_step_failed = false;
                continue;
            }
            rho *= 0.5;
            if rho < cfg.f_tolerance {
                return Ok(finish(counter, true));
            }
        }

        let gnorm = gradient.norm();
        if !(gnorm > 0.0) {
            last_step_failed = true;
            continue;
        }
        let step: Vec<f64> = gradient.iter().map(|g| -rho * g / gnorm).collect();
        let predicted = rho * gnorm;
        let x: Vec<f64> = simplex.points[b].iter().zip(&step).map(|(a, s)| a + s).collect();
        let f = counter.eval(&x)?;
        let ratio = (simplex.values[b] - f) / predicted;

        // replace the vertex whose edge coefficient in the step is largest,
        // favouring vertices that have drifted far from the best point
        let step_v = DVector::from_column_slice(&step);
        let coords = inverse.transpose() * step_v;
        let row = (0..n)
            .max_by(|&a, &c| {
                let wa = coords[a].abs() * (edges.row(a).norm() / rho).max(1.0).powi(2);
                let wc = coords[c].abs() * (edges.row(c).norm() / rho).max(1.0).powi(2);
                wa.total_cmp(&wc)
            })
            .expect("n >= 1");
        let j = others[row];
        simplex.points[j] = x;
        simplex.values[j] = f;
        last_step_failed = ratio < ACCEPT_RATIO;
    }
    Ok(finish(counter, false))
}
