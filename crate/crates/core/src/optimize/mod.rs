//! Hybrid genetic / sequential-quadratic-programming optimization.
//!
//! [`ga`] performs the global search, [`sqp`] refines its best candidate
//! under smooth inequality constraints. [`surrogate`] applies the pair to
//! fitting small feed-forward networks to kinematic curves, and
//! [`geometry`] to the ring radius / link-scale design problem.

pub mod ga;
pub mod geometry;
pub mod nn;
pub mod qp;
pub mod sqp;
pub mod surrogate;

pub use ga::{ga_optimize, GaConfig, GaResult};
pub use geometry::{compare_frequencies, optimize_geometry, FrequencyComparison, GeometryOutcome, GeometryProblem, MassModel};
pub use nn::{nn_forward, Architecture, Chromosome};
pub use sqp::{sqp_refine, RefineConfig, RefineResult, StopReason};
pub use surrogate::{fit_kinematics_surrogate, CurveDataset, SurrogateConfig, SurrogateFit};

/// A smooth scalar function of a real vector.
pub trait Objective: Sync {
    fn dim(&self) -> usize;

    fn value(&self, x: &[f64]) -> f64;

    /// Gradient; defaults to central differences.
    fn gradient(&self, x: &[f64], grad: &mut [f64]) {
        central_difference(|p| self.value(p), x, grad);
    }

    /// Value and gradient together. Implementations with a shared forward
    /// pass should override this.
    fn value_and_gradient(&self, x: &[f64], grad: &mut [f64]) -> f64 {
        self.gradient(x, grad);
        self.value(x)
    }

    /// Function evaluations spent by one `value_and_gradient` call.
    fn gradient_cost(&self) -> usize {
        2 * self.dim() + 1
    }
}

/// Inequality constraint `c(x) >= 0`.
pub trait Constraint: Sync {
    fn value(&self, x: &[f64]) -> f64;

    fn gradient(&self, x: &[f64], grad: &mut [f64]) {
        central_difference(|p| self.value(p), x, grad);
    }

    fn name(&self) -> String {
        "constraint".into()
    }
}

/// Central-difference gradient with a step scaled to each coordinate.
pub fn central_difference<F: Fn(&[f64]) -> f64>(f: F, x: &[f64], grad: &mut [f64]) {
    let mut p = x.to_vec();
    for i in 0..x.len() {
        let h = f64::EPSILON.cbrt() * x[i].abs().max(1.0);
        p[i] = x[i] + h;
        let up = f(&p);
        p[i] = x[i] - h;
        let down = f(&p);
        p[i] = x[i];
        grad[i] = (up - down) / (2.0 * h);
    }
}

/// Objective backed by a closure, differentiated numerically.
pub struct FnObjective<F> {
    dim: usize,
    f: F,
}

impl<F: Fn(&[f64]) -> f64 + Sync> FnObjective<F> {
    pub fn new(dim: usize, f: F) -> Self {
        FnObjective { dim, f }
    }
}

impl<F: Fn(&[f64]) -> f64 + Sync> Objective for FnObjective<F> {
    fn dim(&self) -> usize {
        self.dim
    }

    fn value(&self, x: &[f64]) -> f64 {
        (self.f)(x)
    }
}

/// Constraint backed by a closure.
pub struct FnConstraint<F> {
    name: String,
    f: F,
}

impl<F: Fn(&[f64]) -> f64 + Sync> FnConstraint<F> {
    pub fn new(name: impl Into<String>, f: F) -> Self {
        FnConstraint { name: name.into(), f }
    }
}

impl<F: Fn(&[f64]) -> f64 + Sync> Constraint for FnConstraint<F> {
    fn value(&self, x: &[f64]) -> f64 {
        (self.f)(x)
    }

    fn name(&self) -> String {
        self.name.clone()
    }
}

/// Lower bound `x[index] >= bound` as a linear constraint.
pub struct LowerBound {
    pub index: usize,
    pub bound: f64,
}

impl Constraint for LowerBound {
    fn value(&self, x: &[f64]) -> f64 {
        x[self.index] - self.bound
    }

    fn gradient(&self, _x: &[f64], grad: &mut [f64]) {
        grad.fill(0.0);
        grad[self.index] = 1.0;
    }

    fn name(&self) -> String {
        format!("x[{}] >= {}", self.index, self.bound)
    }
}

/// Upper bound `x[index] <= bound` as a linear constraint.
pub struct UpperBound {
    pub index: usize,
    pub bound: f64,
}

impl Constraint for UpperBound {
    fn value(&self, x: &[f64]) -> f64 {
        self.bound - x[self.index]
    }

    fn gradient(&self, _x: &[f64], grad: &mut [f64]) {
        grad.fill(0.0);
        grad[self.index] = -1.0;
    }

    fn name(&self) -> String {
        format!("x[{}] <= {}", self.index, self.bound)
    }
}
