//! Dense convex quadratic programs with linear inequality constraints,
//! solved through their bound-constrained dual.

use nalgebra::{DMatrix, DVector};

/// Solution of `min ½dᵀBd + gᵀd  s.t.  A d + b ≥ 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct QpSolution {
    pub step: DVector<f64>,
    pub multipliers: DVector<f64>,
}

/// Multipliers beyond this magnitude mean the linearized constraints have
/// no common solution.
const MULTIPLIER_LIMIT: f64 = 1e12;

/// Solve the QP for a symmetric positive definite `b_mat`. Returns `None`
/// when the constraint set is inconsistent.
pub fn solve_qp(
    b_mat: &DMatrix<f64>,
    g: &DVector<f64>,
    a: &DMatrix<f64>,
    b: &DVector<f64>,
) -> Option<QpSolution> {
    let chol = b_mat.clone().cholesky()?;
    let m = a.nrows();
    if m == 0 {
        return Some(QpSolution {
            step: -chol.solve(g),
            multipliers: DVector::zeros(0),
        });
    }
    let binv_at = chol.solve(&a.transpose());
    let mm = a * &binv_at;
    let r = a * chol.solve(g) - b;
    let lambda = nnls_quadratic(&mm, &r)?;
    if lambda.amax() > MULTIPLIER_LIMIT {
        return None;
    }
    let step = chol.solve(&(a.transpose() * &lambda - g));
    Some(QpSolution { step, multipliers: lambda })
}

/// `min ½λᵀMλ − λᵀr` over `λ ≥ 0` for symmetric positive semidefinite `M`,
/// by the Lawson–Hanson active-set scheme.
fn nnls_quadratic(m: &DMatrix<f64>, r: &DVector<f64>) -> Option<DVector<f64>> {
    let n = r.len();
    let scale = m.diagonal().amax().max(r.amax()).max(1.0);
    let tol = 1e-13 * scale;
    let ridge = 1e-14 * m.diagonal().amax().max(f64::MIN_POSITIVE);
    let mut lambda = DVector::<f64>::zeros(n);
    let mut free = vec![false; n];

    let solve_free = |free: &[bool]| -> Option<DVector<f64>> {
        let idx: Vec<usize> = (0..n).filter(|&i| free[i]).collect();
        let k = idx.len();
        let sub = DMatrix::from_fn(k, k, |i, j| m[(idx[i], idx[j])] + if i == j { ridge } else { 0.0 });
        let rhs = DVector::from_fn(k, |i, _| r[idx[i]]);
        let z = sub.lu().solve(&rhs)?;
        let mut full = DVector::zeros(n);
        for (p, &i) in idx.iter().enumerate() {
            full[i] = z[p];
        }
        Some(full)
    };

    for _ in 0..(3 * n + 10) {
        let w = r - m * &lambda;
        let candidate = (0..n)
            .filter(|&i| !free[i] && w[i] > tol)
            .max_by(|&a, &b| w[a].total_cmp(&w[b]));
        let Some(j) = candidate else {
            return Some(lambda);
        };
        free[j] = true;
        loop {
            let z = solve_free(&free)?;
            if (0..n).filter(|&i| free[i]).all(|i| z[i] > 0.0) {
                lambda = z;
                break;
            }
            let mut alpha = 1.0f64;
            for i in (0..n).filter(|&i| free[i] && z[i] <= 0.0) {
                let denom = lambda[i] - z[i];
                if denom > 0.0 {
                    alpha = alpha.min(lambda[i] / denom);
                }
            }
            lambda += (z - &lambda) * alpha;
            let mut dropped = false;
            for i in 0..n {
                if free[i] && lambda[i] <= tol * 1e-3 {
                    free[i] = false;
                    lambda[i] = 0.0;
                    dropped = true;
                }
            }
            if !dropped || !free.iter().any(|&f| f) {
                break;
            }
        }
    }
    Some(lambda)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unconstrained_newton_step() {
        let b = DMatrix::from_row_slice(2, 2, &[2.0, 0.0, 0.0, 4.0]);
        let g = DVector::from_vec(vec![2.0, -4.0]);
        let s = solve_qp(&b, &g, &DMatrix::zeros(0, 2), &DVector::zeros(0)).unwrap();
        assert!((s.step[0] + 1.0).abs() < 1e-14);
        assert!((s.step[1] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn active_bound() {
        // min (x+d)^2 at x = 5 subject to x + d >= 1
        let b = DMatrix::from_element(1, 1, 2.0);
        let g = DVector::from_element(1, 10.0);
        let a = DMatrix::from_element(1, 1, 1.0);
        let c = DVector::from_element(1, 4.0);
        let s = solve_qp(&b, &g, &a, &c).unwrap();
        assert!((s.step[0] + 4.0).abs() < 1e-12);
        assert!((s.multipliers[0] - 2.0).abs() < 1e-12);
    }

    #[test]
    fn inactive_constraint_has_zero_multiplier() {
        let b = DMatrix::identity(2, 2);
        let g = DVector::from_vec(vec![1.0, 1.0]);
        let a = DMatrix::from_row_slice(1, 2, &[1.0, 0.0]);
        let c = DVector::from_element(1, 10.0);
        let s = solve_qp(&b, &g, &a, &c).unwrap();
        assert_eq!(s.multipliers[0], 0.0);
        assert!((s.step[0] + 1.0).abs() < 1e-14);
    }

    #[test]
    fn two_active_constraints_corner() {
        // min |d - (3, 3)|^2 subject to d0 <= 1, d1 <= 2
        let b = DMatrix::identity(2, 2) * 2.0;
        let g = DVector::from_vec(vec![-6.0, -6.0]);
        let a = DMatrix::from_row_slice(2, 2, &[-1.0, 0.0, 0.0, -1.0]);
        let c = DVector::from_vec(vec![1.0, 2.0]);
        let s = solve_qp(&b, &g, &a, &c).unwrap();
        assert!((s.step[0] - 1.0).abs() < 1e-12);
        assert!((s.step[1] - 2.0).abs() < 1e-12);
        assert!(s.multipliers.iter().all(|&l| l > 0.0));
    }

    #[test]
    fn inconsistent_constraints() {
        // d >= 1 and d <= -1
        let b = DMatrix::identity(1, 1);
        let g = DVector::zeros(1);
        let a = DMatrix::from_row_slice(2, 1, &[1.0, -1.0]);
        let c = DVector::from_vec(vec![-1.0, -1.0]);
        assert!(solve_qp(&b, &g, &a, &c).is_none());
    }
}
