//! Sequential quadratic programming with a damped BFGS Hessian and an
//! exact-penalty line search.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::qp::solve_qp;
use super::{Constraint, Objective};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RefineConfig {
    pub fitness_target: f64,
    pub tol_x: f64,
    pub tol_fun: f64,
    pub tol_con: f64,
    pub max_function_evals: usize,
    pub max_iterations: usize,
    /// Reject trial points that violate a constraint by more than `tol_con`.
    pub feasible_iterates: bool,
}

impl Default for RefineConfig {
    fn default() -> Self {
        RefineConfig {
            fitness_target: 1e-18,
            tol_x: 1e-22,
            tol_fun: 1e-22,
            tol_con: 1e-22,
            max_function_evals: 200_000,
            max_iterations: 1000,
            feasible_iterates: false,
        }
    }
}

impl RefineConfig {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("tol_x", self.tol_x), ("tol_fun", self.tol_fun), ("tol_con", self.tol_con)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::Config(format!("{name} must be positive, got {v}")));
            }
        }
        if self.max_function_evals < 1 {
            return Err(Error::Config("max_function_evals must be at least 1".into()));
        }
        if self.fitness_target.is_nan() {
            return Err(Error::Config("fitness_target is NaN".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StopReason {
    FitnessTarget,
    StepTolerance,
    FunctionTolerance,
    /// No progress is possible at double precision.
    Stagnation,
    MaxIterations,
    MaxFunctionEvals,
    /// The linearized constraints became inconsistent and could not be
    /// restored.
    Infeasible,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RefineResult {
    pub x: Vec<f64>,
    pub fitness: f64,
    pub initial_fitness: f64,
    /// Objective of each accepted iterate, starting at `x0`.
    pub trace: Vec<f64>,
    pub iterations: usize,
    pub function_evals: usize,
    pub max_violation: f64,
    /// Infinity norm of the Lagrangian gradient at the returned point.
    pub stationarity: f64,
    pub converged: bool,
    pub stop: StopReason,
}

struct Eval {
    f: f64,
    g: DVector<f64>,
    c: DVector<f64>,
    jac: DMatrix<f64>,
}

struct Problem<'a> {
    obj: &'a dyn Objective,
    cons: &'a [&'a dyn Constraint],
    evals: usize,
}

impl Problem<'_> {
    fn constraints(&self, x: &[f64]) -> DVector<f64> {
        DVector::from_iterator(self.cons.len(), self.cons.iter().map(|c| c.value(x)))
    }

    fn value(&mut self, x: &[f64]) -> (f64, DVector<f64>) {
        self.evals += 1;
        (self.obj.value(x), self.constraints(x))
    }

    fn full(&mut self, x: &[f64]) -> Eval {
        let n = x.len();
        let mut g = vec![0.0; n];
        let f = self.obj.value_and_gradient(x, &mut g);
        self.evals += self.obj.gradient_cost();
        let mut jac = DMatrix::zeros(self.cons.len(), n);
        let mut row = vec![0.0; n];
        for (i, c) in self.cons.iter().enumerate() {
            c.gradient(x, &mut row);
            jac.row_mut(i).copy_from_slice(&row);
        }
        Eval {
            f,
            g: DVector::from_vec(g),
            c: self.constraints(x),
            jac,
        }
    }
}

fn violation(c: &DVector<f64>) -> f64 {
    c.iter().map(|&v| (-v).max(0.0)).sum()
}

fn max_violation(c: &DVector<f64>) -> f64 {
    c.iter().map(|&v| (-v).max(0.0)).fold(0.0, f64::max)
}

/// Minimize `objective` from `x0` subject to `constraints[i](x) >= 0`.
///
/// The returned point is the best iterate seen that satisfies every
/// constraint within `tol_con`, or the least-violating one if none does.
pub fn sqp_refine(
    objective: &dyn Objective,
    x0: &[f64],
    constraints: &[&dyn Constraint],
    cfg: &RefineConfig,
) -> Result<RefineResult> {
    cfg.validate()?;
    let n = objective.dim();
    if x0.len() != n {
        return Err(Error::Shape { expected: n, got: x0.len() });
    }
    if x0.iter().any(|v| !v.is_finite()) {
        return Err(Error::Domain("starting point has non-finite entries".into()));
    }
    let mut prob = Problem { obj: objective, cons: constraints, evals: 0 };
    let mut x = DVector::from_column_slice(x0);
    let mut cur = prob.full(x.as_slice());
    if !cur.f.is_finite() {
        return Err(Error::Domain("objective is not finite at the starting point".into()));
    }
    let initial_fitness = cur.f;
    let mut trace = vec![cur.f];
    let mut hess = DMatrix::<f64>::identity(n, n);
    let mut first_update = true;
    let mut mu = 1.0f64;
    let mut lambda = DVector::<f64>::zeros(constraints.len());

    let feasible = |c: &DVector<f64>| max_violation(c) <= cfg.tol_con;
    let mut best = (x.clone(), cur.f, max_violation(&cur.c));
    let better = |f: f64, v: f64, best: &(DVector<f64>, f64, f64)| {
        let (bf, bv) = (best.1, best.2);
        match (v <= cfg.tol_con, bv <= cfg.tol_con) {
            (true, true) => f < bf,
            (true, false) => true,
            (false, true) => false,
            (false, false) => v < bv,
        }
    };

    let mut iterations = 0;
    let stop = loop {
        if feasible(&cur.c) && cur.f <= cfg.fitness_target {
            break StopReason::FitnessTarget;
        }
        if iterations >= cfg.max_iterations {
            break StopReason::MaxIterations;
        }
        if prob.evals >= cfg.max_function_evals {
            break StopReason::MaxFunctionEvals;
        }
        iterations += 1;

        let (d, new_lambda) = match solve_qp(&hess, &cur.g, &cur.jac, &cur.c) {
            Some(sol) => (sol.step, sol.multipliers),
            None => match restoration_step(&cur) {
                Some(d) => (d, DVector::zeros(constraints.len())),
                None => break StopReason::Infeasible,
            },
        };
        let dnorm = d.amax();
        if dnorm <= cfg.tol_x * (1.0 + x.amax()) {
            break StopReason::StepTolerance;
        }
        if let Some(lmax) = new_lambda.iter().cloned().reduce(f64::max) {
            mu = mu.max(1.5 * lmax);
        }

        let merit = |f: f64, c: &DVector<f64>| f + mu * violation(c);
        let phi0 = merit(cur.f, &cur.c);
        let slope = cur.g.dot(&d) - mu * violation(&cur.c);
        let mut alpha = 1.0;
        let mut accepted = None;
        for _ in 0..60 {
            let trial = &x + &d * alpha;
            let (ft, ct) = prob.value(trial.as_slice());
            let ok_feas = !cfg.feasible_iterates || feasible(&ct) || !feasible(&cur.c);
            if ft.is_finite() && ok_feas && merit(ft, &ct) <= phi0 + 1e-4 * alpha * slope.min(0.0) {
                if !cfg.feasible_iterates || ft <= cur.f || !feasible(&cur.c) {
                    accepted = Some(trial);
                    break;
                }
            }
            alpha *= 0.5;
            if alpha * dnorm <= f64::EPSILON * (1.0 + x.amax()) {
                break;
            }
        }
        let Some(x_new) = accepted else {
            log::debug!("line search made no progress at iteration {iterations}");
            break StopReason::Stagnation;
        };

        let next = prob.full(x_new.as_slice());
        let s = &x_new - &x;
        let grad_lag = |e: &Eval| &e.g - e.jac.transpose() * &new_lambda;
        let mut y = grad_lag(&next) - grad_lag(&cur);
        let bs = &hess * &s;
        let sbs = s.dot(&bs);
        let sy = s.dot(&y);
        if first_update && sy > 0.0 {
            let scale = y.dot(&y) / sy;
            if scale.is_finite() && scale > 0.0 {
                hess = DMatrix::identity(n, n) * scale;
                first_update = false;
            }
        }
        let bs = &hess * &s;
        let sbs_now = s.dot(&bs);
        if sy < 0.2 * sbs_now {
            let theta = 0.8 * sbs_now / (sbs_now - sy);
            y = &y * theta + &bs * (1.0 - theta);
        }
        let sy = s.dot(&y);
        if sy > 0.0 && sbs_now > 0.0 && sbs.is_finite() {
            hess += &y * y.transpose() / sy - &bs * bs.transpose() / sbs_now;
            hess = (&hess + hess.transpose()) * 0.5;
        }

        let df = (cur.f - next.f).abs();
        let step_rel = s.amax() / (1.0 + x.amax());
        x = x_new;
        lambda = new_lambda;
        cur = next;
        trace.push(cur.f);
        let v = max_violation(&cur.c);
        if better(cur.f, v, &best) {
            best = (x.clone(), cur.f, v);
        }
        if feasible(&cur.c) && df <= cfg.tol_fun * (1.0 + cur.f.abs()) && step_rel <= cfg.tol_x {
            break StopReason::FunctionTolerance;
        }
        if df <= 4.0 * f64::EPSILON * cur.f.abs().max(f64::MIN_POSITIVE) && step_rel <= 4.0 * f64::EPSILON {
            log::debug!("stagnated at machine precision after {iterations} iterations");
            break StopReason::Stagnation;
        }
    };

    let (bx, bf, bv) = best;
    let at_best = prob.full(bx.as_slice());
    let stationarity = (&at_best.g - at_best.jac.transpose() * &lambda).amax();
    let converged = bv <= cfg.tol_con
        && matches!(
            stop,
            StopReason::FitnessTarget | StopReason::StepTolerance | StopReason::FunctionTolerance | StopReason::Stagnation
        );
    Ok(RefineResult {
        x: bx.as_slice().to_vec(),
        fitness: bf,
        initial_fitness,
        trace,
        iterations,
        function_evals: prob.evals,
        max_violation: bv,
        stationarity,
        converged,
        stop,
    })
}

/// Minimum-norm Gauss–Newton step towards the violated constraints.
fn restoration_step(e: &Eval) -> Option<DVector<f64>> {
    let rows: Vec<usize> = (0..e.c.len()).filter(|&i| e.c[i] < 0.0).collect();
    if rows.is_empty() {
        return None;
    }
    let j = DMatrix::from_fn(rows.len(), e.jac.ncols(), |i, k| e.jac[(rows[i], k)]);
    let rhs = DVector::from_fn(rows.len(), |i, _| -e.c[rows[i]]);
    let svd = j.clone().svd(true, true);
    let d = svd.solve(&rhs, 1e-12).ok()?;
    (d.amax() > 0.0 && d.iter().all(|v| v.is_finite())).then_some(d)
}
