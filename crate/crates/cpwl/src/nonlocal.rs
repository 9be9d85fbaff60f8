//! One-dimensional nonlocal parametrization of CPWL functions by shifted
//! ReLU atoms: evaluation, the uniform-knot interpolation system, and its
//! conditioning, which degrades at least like K^(3/2) in the number of
//! knots (the local hat-basis interpolation is the identity map and stays
//! perfectly conditioned).

use thiserror::Error;

use crate::linalg::{jacobi_eigen, lu_solve, LinalgError, Matrix, JACOBI_MAX_SWEEPS};

#[derive(Debug, Error)]
pub enum NonlocalError {
    #[error("need at least 2 knots, got {0}")]
    TooFewKnots(usize),
    #[error("knots must be strictly increasing (violated at index {0})")]
    NonIncreasingKnots(usize),
    #[error("theta has {found} entries, expected {expected}")]
    ThetaCountMismatch { expected: usize, found: usize },
    #[error("values vector has {found} entries, expected {expected}")]
    ValueCountMismatch { expected: usize, found: usize },
    #[error("step size must be positive, got {0}")]
    NonPositiveStep(f64),
    #[error("knots are not uniformly spaced: gap {found} at index {index}, expected {expected}")]
    NonUniformKnots {
        index: usize,
        found: f64,
        expected: f64,
    },
    #[error("interpolation matrix is singular")]
    SingularMatrix,
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// Nonlocal model: strictly increasing knots v_1 < ... < v_K and K
/// parameters. The represented function is
/// `theta_1 + theta_2 (x - v_1) + sum_{k=2}^{K-1} theta_{k+1} (x - v_k)_+`.
#[derive(Clone, Debug)]
pub struct NonlocalModel {
    knots: Vec<f64>,
    theta: Vec<f64>,
}

impl NonlocalModel {
    pub fn new(knots: Vec<f64>, theta: Vec<f64>) -> Result<Self, NonlocalError> {
        check_knots(&knots)?;
        if theta.len() != knots.len() {
            return Err(NonlocalError::ThetaCountMismatch {
                expected: knots.len(),
                found: theta.len(),
            });
        }
        Ok(NonlocalModel { knots, theta })
    }

    pub fn knots(&self) -> &[f64] {
        &self.knots
    }

    pub fn theta(&self) -> &[f64] {
        &self.theta
    }

    pub fn eval(&self, x: f64) -> f64 {
        let k = self.knots.len();
        let mut acc = self.theta[0] + self.theta[1] * (x - self.knots[0]);
        for j in 1..k.saturating_sub(1) {
            let hinge = (x - self.knots[j]).max(0.0);
            acc += self.theta[j + 1] * hinge;
        }
        acc
    }

    /// Fit the parameters so the model interpolates `values` at the knots,
    /// via a direct linear solve. Works for any strictly increasing knots.
    pub fn interpolate(knots: Vec<f64>, values: &[f64]) -> Result<Self, NonlocalError> {
        check_knots(&knots)?;
        let k = knots.len();
        if values.len() != k {
            return Err(NonlocalError::ValueCountMismatch {
                expected: k,
                found: values.len(),
            });
        }
        let mut rows = Vec::with_capacity(k);
        for p in 0..k {
            let mut row = vec![0.0; k];
            row[0] = 1.0;
            row[1] = knots[p] - knots[0];
            for j in 1..k - 1 {
                row[j + 1] = (knots[p] - knots[j]).max(0.0);
            }
            rows.push(row);
        }
        let system = Matrix::from_rows(&rows)?;
        let theta = lu_solve(&system, values).map_err(|e| match e {
            LinalgError::Singular => NonlocalError::SingularMatrix,
            other => NonlocalError::Linalg(other),
        })?;
        Ok(NonlocalModel { knots, theta })
    }
}

fn check_knots(knots: &[f64]) -> Result<(), NonlocalError> {
    if knots.len() < 2 {
        return Err(NonlocalError::TooFewKnots(knots.len()));
    }
    for (i, pair) in knots.windows(2).enumerate() {
        if pair[1] <= pair[0] {
            return Err(NonlocalError::NonIncreasingKnots(i + 1));
        }
    }
    Ok(())
}

/// Interpolation matrix M of the uniform-knot problem, defined so that
/// `M theta = y` reproduces the samples: row p is
/// `[1, h(p-1), h(p-2), ..., h, 0, ...]`. The closed form requires a
/// constant step `h`; `knots` are validated against it.
pub fn interpolation_matrix(knots: &[f64], h: f64) -> Result<Matrix, NonlocalError> {
    check_knots(knots)?;
    if h <= 0.0 {
        return Err(NonlocalError::NonPositiveStep(h));
    }
    for (i, pair) in knots.windows(2).enumerate() {
        let gap = pair[1] - pair[0];
        if (gap - h).abs() > 1e-9 * h {
            return Err(NonlocalError::NonUniformKnots {
                index: i,
                found: gap,
                expected: h,
            });
        }
    }
    Ok(uniform_interpolation_matrix(knots.len(), h))
}

/// The uniform-knot matrix without a knot vector: entry (p, q) is 1 when
/// q = 0, `h (p - q + 1)` when 1 <= q <= p, and 0 otherwise (0-based).
pub fn uniform_interpolation_matrix(k: usize, h: f64) -> Matrix {
    let mut m = Matrix::zeros(k, k);
    for p in 0..k {
        m[(p, 0)] = 1.0;
        for q in 1..=p {
            m[(p, q)] = h * (p - q + 1) as f64;
        }
    }
    m
}

/// Solve `M theta = y` for uniform knots by forward substitution: the first
/// row pins theta_1, and subtracting it leaves a lower-triangular system.
pub fn solve_uniform_theta(values: &[f64], h: f64) -> Result<Vec<f64>, NonlocalError> {
    let k = values.len();
    if k < 2 {
        return Err(NonlocalError::TooFewKnots(k));
    }
    if h <= 0.0 {
        return Err(NonlocalError::NonPositiveStep(h));
    }
    let mut theta = vec![0.0; k];
    theta[0] = values[0];
    for p in 1..k {
        // z_p = y_p - theta_1 = h * sum_{q=1}^{p} theta_{q+1} (p - q + 1)
        let z = values[p] - theta[0];
        let mut acc = 0.0;
        for q in 1..p {
            acc += theta[q] * (p - q + 1) as f64;
        }
        theta[p] = z / h - acc;
    }
    Ok(theta)
}

/// Closed-form lower bound on the condition number of the uniform-knot
/// interpolation problem: `sqrt(K (K-1) (2K-1) / 6)`, which grows like
/// `K^(3/2) / sqrt(3)`.
pub fn nonlocal_condition_lower_bound(k: usize) -> Result<f64, NonlocalError> {
    if k < 2 {
        return Err(NonlocalError::TooFewKnots(k));
    }
    let kf = k as f64;
    Ok((kf * (kf - 1.0) * (2.0 * kf - 1.0) / 6.0).sqrt())
}

/// Spectral condition number `sigma_max / sigma_min` of a square matrix,
/// computed from the eigenvalues of `M^T M` (Jacobi on the symmetrized
/// product).
pub fn empirical_condition(m: &Matrix) -> Result<f64, NonlocalError> {
    let mtm = m.transpose().matmul(m)?;
    let eigen = jacobi_eigen(&mtm, JACOBI_MAX_SWEEPS)?;
    let min = *eigen.values.first().expect("nonempty spectrum");
    let max = *eigen.values.last().expect("nonempty spectrum");
    if min <= 1e-14 * max.max(1.0) {
        return Err(NonlocalError::SingularMatrix);
    }
    Ok((max / min).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eval_examples() {
        // constant
        let m = NonlocalModel::new(vec![0.0, 1.0, 2.0], vec![4.0, 0.0, 0.0]).unwrap();
        for x in [-1.0, 0.5, 3.0] {
            assert_eq!(m.eval(x), 4.0);
        }
        // pure slope from the first knot
        let m = NonlocalModel::new(vec![0.0, 1.0, 2.0], vec![0.0, 1.0, 0.0]).unwrap();
        assert!((m.eval(1.5) - 1.5).abs() < 1e-15);
        // hand-evaluated kink: theta = (0, 1, -2) at x = 2
        let m = NonlocalModel::new(vec![0.0, 1.0, 2.0], vec![0.0, 1.0, -2.0]).unwrap();
        assert!((m.eval(2.0) - 0.0).abs() < 1e-15);
    }

    #[test]
    fn knot_validation() {
        assert!(matches!(
            NonlocalModel::new(vec![0.0], vec![1.0]),
            Err(NonlocalError::TooFewKnots(1))
        ));
        assert!(matches!(
            NonlocalModel::new(vec![0.0, 0.0], vec![1.0, 1.0]),
            Err(NonlocalError::NonIncreasingKnots(1))
        ));
    }

    #[test]
    fn matrix_k2_solves_affine() {
        let m = uniform_interpolation_matrix(2, 0.5);
        // theta_1 = y_1, theta_2 = (y_2 - y_1) / h
        let theta = lu_solve(&m, &[3.0, 4.0]).unwrap();
        assert!((theta[0] - 3.0).abs() < 1e-14);
        assert!((theta[1] - 2.0).abs() < 1e-14);
    }

    #[test]
    fn quadratic_samples_roundtrip() {
        // y from f(x) = x^2 at knots 0..3, h = 1
        let knots: Vec<f64> = (0..4).map(|k| k as f64).collect();
        let values: Vec<f64> = knots.iter().map(|v| v * v).collect();
        let m = interpolation_matrix(&knots, 1.0).unwrap();
        let theta = lu_solve(&m, &values).unwrap();
        let model = NonlocalModel::new(knots.clone(), theta).unwrap();
        for (v, y) in knots.iter().zip(&values) {
            assert!((model.eval(*v) - y).abs() < 1e-10);
        }
    }

    #[test]
    fn affine_samples_need_no_kinks() {
        let knots: Vec<f64> = (0..6).map(|k| 0.5 * k as f64).collect();
        let values: Vec<f64> = knots.iter().map(|v| -1.5 * v + 2.0).collect();
        let theta = solve_uniform_theta(&values, 0.5).unwrap();
        for t in theta.iter().skip(2) {
            assert!(t.abs() < 1e-12, "theta = {theta:?}");
        }
    }

    #[test]
    fn forward_substitution_matches_direct_solve() {
        use rand::prelude::*;
        let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(5);
        for k in [2usize, 5, 12, 30] {
            let h = 0.25;
            let values: Vec<f64> = (0..k).map(|_| rng.random::<f64>() * 4.0 - 2.0).collect();
            let fast = solve_uniform_theta(&values, h).unwrap();
            let m = uniform_interpolation_matrix(k, h);
            let direct = lu_solve(&m, &values).unwrap();
            for (a, b) in fast.iter().zip(&direct) {
                assert!((a - b).abs() < 1e-9, "K = {k}");
            }
            // round trip through evaluation
            let knots: Vec<f64> = (0..k).map(|i| h * i as f64).collect();
            let model = NonlocalModel::new(knots, fast).unwrap();
            for (i, y) in values.iter().enumerate() {
                assert!((model.eval(h * i as f64) - y).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn general_knot_interpolation_roundtrip() {
        use rand::prelude::*;
        let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(9);
        let knots = vec![-1.0, -0.3, 0.4, 1.1, 2.5, 4.0];
        let values: Vec<f64> = (0..knots.len())
            .map(|_| rng.random::<f64>() * 2.0 - 1.0)
            .collect();
        let model = NonlocalModel::interpolate(knots.clone(), &values).unwrap();
        for (v, y) in knots.iter().zip(&values) {
            assert!((model.eval(*v) - y).abs() < 1e-9);
        }
    }

    #[test]
    fn nonuniform_knots_rejected_by_closed_form() {
        let knots = vec![0.0, 1.0, 2.5];
        assert!(matches!(
            interpolation_matrix(&knots, 1.0),
            Err(NonlocalError::NonUniformKnots { index: 1, .. })
        ));
    }

    #[test]
    fn lower_bound_values() {
        assert!((nonlocal_condition_lower_bound(2).unwrap() - 1.0).abs() < 1e-14);
        assert!((nonlocal_condition_lower_bound(10).unwrap() - 285.0_f64.sqrt()).abs() < 1e-12);
        // growth constant: bound / K^(3/2) tends to 1/sqrt(3)
        let k = 1_000_000usize;
        let ratio = nonlocal_condition_lower_bound(k).unwrap() / (k as f64).powf(1.5);
        assert!((ratio - (1.0 / 3.0_f64).sqrt()).abs() < 1e-3);
    }

    #[test]
    fn empirical_condition_k2_closed_form() {
        // M = [[1, 0], [1, 1]]: M^T M has eigenvalues (3 +- sqrt(5)) / 2,
        // so cond = (3 + sqrt(5)) / 2
        let m = uniform_interpolation_matrix(2, 1.0);
        let cond = empirical_condition(&m).unwrap();
        let expect = (3.0 + 5.0_f64.sqrt()) / 2.0;
        assert!((cond - expect).abs() < 1e-10);
    }

    #[test]
    fn empirical_condition_dominates_lower_bound() {
        for k in (2..=50).step_by(4) {
            let m = uniform_interpolation_matrix(k, 1.0);
            let cond = empirical_condition(&m).unwrap();
            let bound = nonlocal_condition_lower_bound(k).unwrap();
            assert!(cond >= bound * (1.0 - 1e-9), "K = {k}: {cond} < {bound}");
        }
    }

    #[test]
    fn identity_condition_is_one() {
        // the local hat-basis interpolation map is the identity
        let cond = empirical_condition(&Matrix::identity(12)).unwrap();
        assert!((cond - 1.0).abs() < 1e-12);
    }

    #[test]
    fn stated_vector_identities() {
        // column identities of M pin two singular directions:
        // M^-1 (sum k e_{k+1}) = e_2 / h and M^-1 e_K = e_K / h
        for (k, h) in [(5usize, 1.0), (12, 1.0), (30, 0.5)] {
            let m = uniform_interpolation_matrix(k, h);
            let mut a = vec![0.0; k];
            for j in 1..k {
                a[j] = j as f64;
            }
            let x = lu_solve(&m, &a).unwrap();
            let a_norm = a.iter().map(|v| v * v).sum::<f64>().sqrt();
            let x_norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
            let kf = k as f64;
            let expect = (kf * (kf - 1.0) * (2.0 * kf - 1.0) / 6.0_f64).powf(-0.5) / h;
            assert!(
                ((x_norm / a_norm) - expect).abs() < 1e-9 * expect,
                "K = {k}"
            );

            let mut e_k = vec![0.0; k];
            e_k[k - 1] = 1.0;
            let y = lu_solve(&m, &e_k).unwrap();
            let y_norm = y.iter().map(|v| v * v).sum::<f64>().sqrt();
            assert!((y_norm - 1.0 / h).abs() < 1e-9 / h, "K = {k}");
        }
    }

    #[test]
    fn empirical_condition_rejects_singular() {
        let m = Matrix::from_rows(&[vec![1.0, 1.0], vec![1.0, 1.0]]).unwrap();
        assert!(matches!(
            empirical_condition(&m),
            Err(NonlocalError::SingularMatrix)
        ));
    }
}
