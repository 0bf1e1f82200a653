//! Dense complex linear algebra used by the approximation engines: Hermitian
//! positive-definite solves with a condition estimate, and Vandermonde
//! interpolation with one step of iterative refinement. Backed by nalgebra.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{CoreError, Result};

/// Condition threshold past which solves are reported rather than trusted.
pub const CONDITION_LIMIT: f64 = 1e12;

#[derive(Debug, Clone)]
pub struct HermitianSolution {
    pub solution: Vec<Complex64>,
    pub cond_estimate: f64,
    /// Residual ‖G x − b‖∞ of the returned solution against the
    /// unregularized right-hand side.
    pub residual: f64,
}

/// Solves (G + ridge·I) x = b for Hermitian positive semidefinite G by
/// Cholesky. The condition estimate is for the regularized matrix (power
/// iteration for the largest eigenvalue, inverse iteration for the
/// smallest).
pub fn hermitian_solve(g: &DMatrix<Complex64>, b: &[Complex64], ridge: f64) -> Result<HermitianSolution> {
    let n = g.nrows();
    assert_eq!(g.ncols(), n);
    assert_eq!(b.len(), n);
    let mut reg = g.clone();
    for i in 0..n {
        reg[(i, i)] += Complex64::new(ridge, 0.0);
    }
    let chol = reg.clone().cholesky().ok_or_else(|| CoreError::IllConditioned {
        cond: f64::INFINITY,
        hint: "Cholesky failed; raise the ridge or separate the sample points".into(),
    })?;
    let rhs = DVector::from_column_slice(b);
    let x = chol.solve(&rhs);

    let lambda_max = power_iteration(&reg, 40);
    let lambda_min_inv = inverse_iteration(&chol, n, 40);
    let cond = if lambda_min_inv > 0.0 { lambda_max * lambda_min_inv } else { f64::INFINITY };

    let residual = (g * &x - &rhs).iter().map(|c| c.norm()).fold(0.0, f64::max);
    Ok(HermitianSolution { solution: x.iter().copied().collect(), cond_estimate: cond, residual })
}

fn seed_vector(n: usize) -> DVector<Complex64> {
    // Deterministic start with all frequencies present.
    let v = DVector::from_fn(n, |i, _| {
        Complex64::new(1.0 + (i as f64 * 0.7).sin() * 0.5, (i as f64 * 1.3).cos() * 0.5)
    });
    let norm = v.norm();
    v / Complex64::new(norm, 0.0)
}

fn power_iteration(m: &DMatrix<Complex64>, iters: usize) -> f64 {
    let mut v = seed_vector(m.nrows());
    let mut lambda = 0.0;
    for _ in 0..iters {
        let w = m * &v;
        lambda = w.norm();
        if lambda == 0.0 {
            return 0.0;
        }
        v = w / Complex64::new(lambda, 0.0);
    }
    lambda
}

fn inverse_iteration(chol: &nalgebra::Cholesky<Complex64, nalgebra::Dyn>, n: usize, iters: usize) -> f64 {
    let mut v = seed_vector(n);
    let mut lambda = 0.0;
    for _ in 0..iters {
        let w = chol.solve(&v);
        lambda = w.norm();
        if lambda == 0.0 {
            return 0.0;
        }
        v = w / Complex64::new(lambda, 0.0);
    }
    lambda
}

/// Solves the square Vandermonde interpolation system V c = t with
/// V_{jk} = w_j^k (degree = points − 1), then runs one step of iterative
/// refinement. Errors if the factorization breaks down.
pub fn vandermonde_interpolate(points: &[Complex64], targets: &[Complex64]) -> Result<Vec<Complex64>> {
    let m = points.len();
    assert_eq!(targets.len(), m);
    let v = DMatrix::from_fn(m, m, |j, k| points[j].powu(k as u32));
    let lu = v.clone().lu();
    let t = DVector::from_column_slice(targets);
    let mut x = lu.solve(&t).ok_or_else(|| CoreError::IllConditioned {
        cond: f64::INFINITY,
        hint: "Vandermonde solve failed; points may coincide".into(),
    })?;
    let r = &t - &v * &x;
    if let Some(dx) = lu.solve(&r) {
        x += dx;
    }
    Ok(x.iter().copied().collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hermitian_solve_recovers_solution() {
        let n = 6;
        let a = DMatrix::from_fn(n, n, |i, j| {
            Complex64::new(0.3 * ((i * j) as f64).sin(), 0.2 * (i as f64 - j as f64))
        });
        let g = &a * a.adjoint() + DMatrix::identity(n, n).map(|x: Complex64| x * 2.0);
        let x_true: Vec<Complex64> = (0..n).map(|i| Complex64::new(i as f64, -1.0)).collect();
        let b_vec = &g * DVector::from_column_slice(&x_true);
        let sol = hermitian_solve(&g, b_vec.as_slice(), 0.0).unwrap();
        for (got, want) in sol.solution.iter().zip(x_true.iter()) {
            assert!((got - want).norm() < 1e-10);
        }
        assert!(sol.cond_estimate >= 1.0);
        assert!(sol.residual < 1e-9);
    }

    #[test]
    fn condition_estimate_tracks_diagonal_matrix() {
        let n = 4;
        let mut g = DMatrix::zeros(n, n);
        for i in 0..n {
            g[(i, i)] = Complex64::new(10f64.powi(i as i32), 0.0);
        }
        let b = vec![Complex64::ONE; n];
        let sol = hermitian_solve(&g, &b, 0.0).unwrap();
        assert!(sol.cond_estimate > 1e2 && sol.cond_estimate < 1e4);
    }

    #[test]
    fn vandermonde_roots_of_unity() {
        let points: Vec<Complex64> = (0..5)
            .map(|k| Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * k as f64 / 5.0))
            .collect();
        // Interpolate z^2 exactly.
        let targets: Vec<Complex64> = points.iter().map(|w| w * w).collect();
        let coeffs = vandermonde_interpolate(&points, &targets).unwrap();
        for (k, c) in coeffs.iter().enumerate() {
            let want = if k == 2 { 1.0 } else { 0.0 };
            assert!((c - Complex64::new(want, 0.0)).norm() < 1e-12, "k={k}: {c}");
        }
    }
}
