//! Hat-basis machinery for CPWL functions: pointwise evaluation, exact
//! integrals of affine functions over simplices, L_p norms of hat functions,
//! and Gram matrix assembly.
//!
//! The workhorse identities: for an affine `f` on a d-simplex `s` with
//! vertex values `f_s`,
//!
//! ```text
//! integral of f^p over s  =  vol(s) * C(p+d, d)^-1 * sum over |k| = p of
//!                            f(v_1)^k_1 ... f(v_{d+1})^k_{d+1}
//! integral of conj(f) g   =  vol(s) / ((d+1)(d+2)) * f_s^H (1 + I) g_s
//! ```
//!
//! and the Gram matrix assembles per simplex as
//! `M = sum_s vol(s) L_s^T (1 + I) L_s`.

use std::sync::Arc;

use num_complex::Complex64;
use thiserror::Error;

use crate::geometry::{self, GeometryError, Point};
use crate::linalg::Matrix;
use crate::triangulation::{Triangulation, TriangulationError};

/// Weak-composition enumeration is guarded to keep the power-integral cost
/// bounded.
pub const MAX_POWER: u32 = 16;

#[derive(Debug, Error)]
pub enum BasisError {
    #[error("vertex id {0} out of range")]
    BadVertexId(usize),
    #[error("coefficient count {found} does not match vertex count {expected}")]
    CoefficientCountMismatch { expected: usize, found: usize },
    #[error("point lies outside the triangulated domain")]
    OutOfDomain,
    #[error("L_p norms need p >= 1, got {0}")]
    InvalidNormOrder(u32),
    #[error("power {0} exceeds the supported maximum of {MAX_POWER}")]
    PowerTooLarge(u32),
    #[error("expected {expected} vertex values, got {found}")]
    ValueCountMismatch { expected: usize, found: usize },
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Triangulation(#[from] TriangulationError),
}

/// Binomial coefficient as f64; inputs stay desk-scale (p <= 16, d <= ~10).
pub(crate) fn binomial(n: u64, k: u64) -> f64 {
    let k = k.min(n - k);
    let mut num: u128 = 1;
    let mut den: u128 = 1;
    for i in 0..k {
        num *= (n - i) as u128;
        den *= (i + 1) as u128;
    }
    (num / den) as f64
}

/// Evaluate the hat function attached to `vertex_id` at `x`.
///
/// Returns the barycentric coordinate of `x` attached to the vertex on any
/// simplex of its star containing `x`, and 0 outside the star (including
/// outside the domain; use [`Triangulation::locate`] to distinguish).
pub fn eval_hat(t: &Triangulation, vertex_id: usize, x: &Point) -> Result<f64, BasisError> {
    let star = t
        .star(vertex_id)
        .map_err(|_| BasisError::BadVertexId(vertex_id))?;
    match t.locate(x) {
        Some(sid) => {
            if !star.simplex_ids.contains(&sid) {
                return Ok(0.0);
            }
            let lambdas = t.barycentric_in(sid, x.coords())?;
            let local = t.simplices()[sid]
                .vertex_ids()
                .iter()
                .position(|&v| v == vertex_id)
                .expect("star membership guarantees the vertex is in the simplex");
            Ok(lambdas[local].clamp(0.0, 1.0))
        }
        None => Ok(0.0),
    }
}

/// Exact L_p norm of a hat function:
/// `(C(p+d, d)^-1 * vol(St(v)))^(1/p)`.
pub fn lp_norm_hat(t: &Triangulation, vertex_id: usize, p: u32) -> Result<f64, BasisError> {
    if p < 1 {
        return Err(BasisError::InvalidNormOrder(p));
    }
    let star = t
        .star(vertex_id)
        .map_err(|_| BasisError::BadVertexId(vertex_id))?;
    let d = t.dim() as u64;
    let coeff = 1.0 / binomial(p as u64 + d, d);
    Ok((coeff * star.volume).powf(1.0 / p as f64))
}

/// `(sum of values)^2-style` quadratic form against `1 + I`:
/// `f^H (1 + I) g = (sum conj f)(sum g) + sum conj(f_k) g_k`.
fn pairing_form(f: &[Complex64], g: &[Complex64]) -> Complex64 {
    let sf: Complex64 = f.iter().map(Complex64::conj).sum();
    let sg: Complex64 = g.iter().sum();
    let dot: Complex64 = f.iter().zip(g).map(|(a, b)| a.conj() * b).sum();
    sf * sg + dot
}

/// Exact inner product of two affine functions over a simplex, given their
/// vertex values: `vol(s) / ((d+1)(d+2)) * f^H (1 + I) g`.
pub fn simplex_inner_product(
    vertices: &[Point],
    f_values: &[Complex64],
    g_values: &[Complex64],
) -> Result<Complex64, BasisError> {
    let n = vertices.len();
    if f_values.len() != n || g_values.len() != n {
        return Err(BasisError::ValueCountMismatch {
            expected: n,
            found: f_values.len().max(g_values.len()),
        });
    }
    if geometry::is_degenerate(vertices)? {
        return Err(BasisError::Geometry(GeometryError::DegenerateSimplex));
    }
    let vol = geometry::simplex_volume(vertices)?;
    let d = (n - 1) as f64;
    Ok(pairing_form(f_values, g_values) * (vol / ((d + 1.0) * (d + 2.0))))
}

/// Exact integral of the p-th power of an affine function over a simplex:
/// `vol(s) * C(p+d, d)^-1 * sum over weak compositions |k| = p of
/// prod f(v_i)^k_i`.
pub fn simplex_power_integral(
    vertices: &[Point],
    f_values: &[f64],
    p: u32,
) -> Result<f64, BasisError> {
    if p > MAX_POWER {
        return Err(BasisError::PowerTooLarge(p));
    }
    if f_values.len() != vertices.len() {
        return Err(BasisError::ValueCountMismatch {
            expected: vertices.len(),
            found: f_values.len(),
        });
    }
    let vol = geometry::simplex_volume(vertices)?;
    let d = (vertices.len() - 1) as u64;
    if p == 0 {
        return Ok(vol);
    }
    let coeff = 1.0 / binomial(p as u64 + d, d);
    let mut sum = 0.0;
    // iterative weak-composition walk: start from (p, 0, ..., 0) and move
    // the leftmost nonzero block rightward until everything sits at the end
    let n = f_values.len();
    let mut k = vec![0u32; n];
    k[0] = p;
    loop {
        let mut term = 1.0;
        for (ki, fi) in k.iter().zip(f_values) {
            if *ki > 0 {
                term *= fi.powi(*ki as i32);
            }
        }
        sum += term;
        if k[n - 1] == p {
            break;
        }
        let j = k.iter().position(|&ki| ki > 0).expect("|k| = p > 0");
        if j == n - 1 {
            break;
        }
        let v = k[j];
        k[j] = 0;
        k[0] = v - 1;
        k[j + 1] += 1;
    }
    Ok(vol * coeff * sum)
}

/// Scale convention carried by a Gram matrix.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GramScale {
    /// Entries are star-volume sums: diagonal `2 vol(St(v))`, off-diagonal
    /// `vol(St(v_p) ∩ St(v_q))`.
    Raw,
    /// Raw entries divided by `(d+1)(d+2)`, so the quadratic form is the
    /// squared L2 norm directly.
    Normalized,
}

/// Gram matrix of the hat basis.
#[derive(Clone, Debug)]
pub struct GramMatrix {
    matrix: Matrix,
    dim: usize,
    scale: GramScale,
}

impl GramMatrix {
    /// Wrap an explicit symmetric matrix in a Gram-matrix convention.
    pub fn from_matrix(matrix: Matrix, dim: usize, scale: GramScale) -> Result<Self, BasisError> {
        if !matrix.is_square() {
            return Err(BasisError::ValueCountMismatch {
                expected: matrix.rows(),
                found: matrix.cols(),
            });
        }
        Ok(GramMatrix { matrix, dim, scale })
    }

    pub fn matrix(&self) -> &Matrix {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn scale(&self) -> GramScale {
        self.scale
    }

    /// The `(d+1)(d+2)` normalization constant for this dimension.
    pub fn normalization(&self) -> f64 {
        ((self.dim + 1) * (self.dim + 2)) as f64
    }

    /// Convert to the normalized convention (no-op when already normalized).
    pub fn normalized(&self) -> GramMatrix {
        match self.scale {
            GramScale::Normalized => self.clone(),
            GramScale::Raw => {
                let mut m = self.matrix.clone();
                let c = 1.0 / self.normalization();
                for i in 0..m.rows() {
                    for j in 0..m.cols() {
                        m[(i, j)] *= c;
                    }
                }
                GramMatrix {
                    matrix: m,
                    dim: self.dim,
                    scale: GramScale::Normalized,
                }
            }
        }
    }

    /// Quadratic form `c^T M c` in the stored convention.
    pub fn quadratic_form(&self, c: &[f64]) -> Result<f64, BasisError> {
        if c.len() != self.matrix.rows() {
            return Err(BasisError::CoefficientCountMismatch {
                expected: self.matrix.rows(),
                found: c.len(),
            });
        }
        let mc = self.matrix.matvec(c).expect("length checked");
        Ok(c.iter().zip(&mc).map(|(a, b)| a * b).sum())
    }

    /// Synthesis-operator ratio `||sum c_v beta_v||_L2 / ||c||_l2`,
    /// evaluated exactly through the Gram quadratic form.
    pub fn riesz_ratio(&self, c: &[f64]) -> Result<f64, BasisError> {
        let qf = self.quadratic_form(c)?;
        let scaled = match self.scale {
            GramScale::Raw => qf / self.normalization(),
            GramScale::Normalized => qf,
        };
        let c_norm_sq: f64 = c.iter().map(|x| x * x).sum();
        Ok((scaled.max(0.0) / c_norm_sq).sqrt())
    }
}

/// Assemble the raw Gram matrix by summing per-simplex contributions
/// `vol(s) L_s^T (1 + I) L_s`: every ordered vertex pair of a simplex
/// receives `vol(s)`, and the diagonal receives it twice.
pub fn gram_matrix(t: &Triangulation) -> GramMatrix {
    let n = t.n_vertices();
    let mut m = Matrix::zeros(n, n);
    for s in t.simplices() {
        let vol = s.volume();
        for &p in s.vertex_ids() {
            for &q in s.vertex_ids() {
                m[(p, q)] += vol;
            }
            m[(p, p)] += vol;
        }
    }
    GramMatrix {
        matrix: m,
        dim: t.dim(),
        scale: GramScale::Raw,
    }
}

/// A CPWL function: a triangulation plus one coefficient per vertex (the
/// function's value at that vertex).
#[derive(Clone, Debug)]
pub struct CpwlFunction {
    triangulation: Arc<Triangulation>,
    coeffs: Vec<f64>,
}

impl CpwlFunction {
    pub fn new(triangulation: Arc<Triangulation>, coeffs: Vec<f64>) -> Result<Self, BasisError> {
        if coeffs.len() != triangulation.n_vertices() {
            return Err(BasisError::CoefficientCountMismatch {
                expected: triangulation.n_vertices(),
                found: coeffs.len(),
            });
        }
        Ok(CpwlFunction {
            triangulation,
            coeffs,
        })
    }

    pub fn triangulation(&self) -> &Triangulation {
        &self.triangulation
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    /// Evaluate at `x` by locating a containing simplex and interpolating
    /// its vertex values. Points on shared faces give the same value from
    /// every containing simplex, so first-match location is safe.
    pub fn eval(&self, x: &Point) -> Result<f64, BasisError> {
        let sid = self.triangulation.locate(x).ok_or(BasisError::OutOfDomain)?;
        let lambdas = self.triangulation.barycentric_in(sid, x.coords())?;
        Ok(self.triangulation.simplices()[sid]
            .vertex_ids()
            .iter()
            .zip(&lambdas)
            .map(|(&v, l)| self.coeffs[v] * l)
            .sum())
    }

    /// Exact L2 norm via per-simplex quadratic forms:
    /// `sqrt(sum_s vol(s)/((d+1)(d+2)) * ((sum f_s)^2 + sum f_s^2))`.
    pub fn l2_norm(&self) -> f64 {
        let t = &self.triangulation;
        let d = t.dim() as f64;
        let scale = 1.0 / ((d + 1.0) * (d + 2.0));
        let mut acc = 0.0;
        for s in t.simplices() {
            let mut sum = 0.0;
            let mut sum_sq = 0.0;
            for &v in s.vertex_ids() {
                let c = self.coeffs[v];
                sum += c;
                sum_sq += c * c;
            }
            acc += s.volume() * scale * (sum * sum + sum_sq);
        }
        acc.max(0.0).sqrt()
    }
}

/// Hat-function evaluation through the min-of-barycentric-coordinates form,
/// valid when the star of the vertex is convex. Used to cross-check
/// [`eval_hat`] on convex stars.
pub fn eval_hat_min_form(
    t: &Triangulation,
    vertex_id: usize,
    x: &Point,
) -> Result<f64, BasisError> {
    let star = t
        .star(vertex_id)
        .map_err(|_| BasisError::BadVertexId(vertex_id))?;
    let mut min_lambda = f64::INFINITY;
    for &sid in &star.simplex_ids {
        let lambdas = t.barycentric_in(sid, x.coords())?;
        let local = t.simplices()[sid]
            .vertex_ids()
            .iter()
            .position(|&v| v == vertex_id)
            .expect("simplex belongs to the star");
        min_lambda = min_lambda.min(lambdas[local]);
    }
    Ok(min_lambda.max(0.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::triangulation::kuhn_triangulation;

    fn pt(coords: &[f64]) -> Point {
        Point::from_slice(coords).unwrap()
    }

    fn chain_1d() -> Triangulation {
        Triangulation::build(
            vec![pt(&[0.0]), pt(&[1.0]), pt(&[2.0])],
            vec![vec![0, 1], vec![1, 2]],
        )
        .unwrap()
    }

    #[test]
    fn hat_interpolation_property() {
        let t = kuhn_triangulation(2, &[2, 2]).unwrap();
        for v in 0..t.n_vertices() {
            for u in 0..t.n_vertices() {
                let value = eval_hat(&t, v, &t.vertices()[u].clone()).unwrap();
                let expect = if u == v { 1.0 } else { 0.0 };
                assert!(
                    (value - expect).abs() < 1e-12,
                    "hat {v} at vertex {u}: {value}"
                );
            }
        }
    }

    #[test]
    fn hat_triangle_midpoint() {
        let t = chain_1d();
        assert!((eval_hat(&t, 1, &pt(&[0.5])).unwrap() - 0.5).abs() < 1e-12);
        // outside the star of vertex 0
        assert_eq!(eval_hat(&t, 0, &pt(&[1.5])).unwrap(), 0.0);
        // outside the domain
        assert_eq!(eval_hat(&t, 0, &pt(&[5.0])).unwrap(), 0.0);
    }

    #[test]
    fn hat_bad_vertex_errors() {
        let t = chain_1d();
        assert!(matches!(
            eval_hat(&t, 99, &pt(&[0.5])),
            Err(BasisError::BadVertexId(99))
        ));
    }

    #[test]
    fn eval_reproduces_affine() {
        let t = kuhn_triangulation(2, &[3, 2]).unwrap();
        let a = [0.7, -1.3];
        let b = 0.25;
        let coeffs: Vec<f64> = t
            .vertices()
            .iter()
            .map(|v| a[0] * v[0] + a[1] * v[1] + b)
            .collect();
        let f = CpwlFunction::new(Arc::new(t), coeffs).unwrap();
        use rand::prelude::*;
        let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(5);
        for _ in 0..200 {
            let x = pt(&[rng.random::<f64>() * 3.0, rng.random::<f64>() * 2.0]);
            let expect = a[0] * x[0] + a[1] * x[1] + b;
            assert!((f.eval(&x).unwrap() - expect).abs() < 1e-9);
        }
    }

    #[test]
    fn partition_of_unity() {
        let t = kuhn_triangulation(2, &[2, 2]).unwrap();
        use rand::prelude::*;
        let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(17);
        for _ in 0..50 {
            let x = pt(&[rng.random::<f64>() * 2.0, rng.random::<f64>() * 2.0]);
            let total: f64 = (0..t.n_vertices())
                .map(|v| eval_hat(&t, v, &x).unwrap())
                .sum();
            assert!((total - 1.0).abs() < 1e-10, "sum {total} at {:?}", x);
        }
    }

    #[test]
    fn indicator_coefficients_reduce_to_hat() {
        let t = Arc::new(kuhn_triangulation(2, &[2, 2]).unwrap());
        let target = 4; // center vertex of the 3x3 grid
        let mut coeffs = vec![0.0; t.n_vertices()];
        coeffs[target] = 1.0;
        let f = CpwlFunction::new(t.clone(), coeffs).unwrap();
        use rand::prelude::*;
        let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(23);
        for _ in 0..50 {
            let x = pt(&[rng.random::<f64>() * 2.0, rng.random::<f64>() * 2.0]);
            assert!((f.eval(&x).unwrap() - eval_hat(&t, target, &x).unwrap()).abs() < 1e-12);
        }
    }

    #[test]
    fn eval_continuous_across_shared_faces() {
        let t = kuhn_triangulation(2, &[1, 1]).unwrap();
        let coeffs = vec![0.3, -1.2, 2.0, 0.7];
        let f = CpwlFunction::new(Arc::new(t), coeffs.clone()).unwrap();
        // points on the shared diagonal must agree from both triangles
        let tri = f.triangulation().clone();
        for s in 0..tri.n_simplices() {
            for alpha in [0.25, 0.5, 0.75] {
                let shared: Vec<usize> = tri.simplices()[0]
                    .vertex_ids()
                    .iter()
                    .filter(|v| tri.simplices()[1].vertex_ids().contains(v))
                    .cloned()
                    .collect();
                assert_eq!(shared.len(), 2);
                let a = &tri.vertices()[shared[0]];
                let b = &tri.vertices()[shared[1]];
                let x = pt(&[
                    a[0] * alpha + b[0] * (1.0 - alpha),
                    a[1] * alpha + b[1] * (1.0 - alpha),
                ]);
                let lam = tri.barycentric_in(s, x.coords()).unwrap();
                let from_s: f64 = tri.simplices()[s]
                    .vertex_ids()
                    .iter()
                    .zip(&lam)
                    .map(|(&v, l)| coeffs[v] * l)
                    .sum();
                assert!((from_s - f.eval(&x).unwrap()).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn out_of_domain_eval_errors() {
        let t = Arc::new(chain_1d());
        let f = CpwlFunction::new(t, vec![1.0, 2.0, 3.0]).unwrap();
        assert!(matches!(f.eval(&pt(&[9.0])), Err(BasisError::OutOfDomain)));
    }

    #[test]
    fn lp_norm_hat_examples() {
        // d = 1, star volume 2, p = 2: sqrt(2/3), checked by direct integration
        let t = chain_1d();
        let got = lp_norm_hat(&t, 1, 2).unwrap();
        assert!((got - (2.0 / 3.0_f64).sqrt()).abs() < 1e-12);

        // d = 2 interior lattice vertex, p = 1: (1/3) * 3 = 1
        let t2 = kuhn_triangulation(2, &[2, 2]).unwrap();
        let center = t2
            .vertices()
            .iter()
            .position(|p| p[0] == 1.0 && p[1] == 1.0)
            .unwrap();
        assert!((lp_norm_hat(&t2, center, 1).unwrap() - 1.0).abs() < 1e-12);

        // p = 1 equals vol(St)/(d+1) in general
        for v in 0..t2.n_vertices() {
            let star = t2.star(v).unwrap();
            let expect = star.volume / 3.0;
            assert!((lp_norm_hat(&t2, v, 1).unwrap() - expect).abs() < 1e-12);
        }

        assert!(matches!(
            lp_norm_hat(&t, 1, 0),
            Err(BasisError::InvalidNormOrder(0))
        ));
    }

    #[test]
    fn inner_product_examples() {
        let one = Complex64::new(1.0, 0.0);
        let zero = Complex64::new(0.0, 0.0);

        // constants integrate to the volume
        let tri = [pt(&[0.0, 0.0]), pt(&[2.0, 0.0]), pt(&[0.0, 2.0])];
        let ones = vec![one; 3];
        let got = simplex_inner_product(&tri, &ones, &ones).unwrap();
        assert!((got.re - 2.0).abs() < 1e-12 && got.im.abs() < 1e-15);

        // unit segment, values (1, 0): integral of (1-x)^2 = 1/3
        let seg = [pt(&[0.0]), pt(&[1.0])];
        let f = vec![one, zero];
        let got = simplex_inner_product(&seg, &f, &f).unwrap();
        assert!((got.re - 1.0 / 3.0).abs() < 1e-12);

        // cross term picks the off-diagonal 1: vol / ((d+1)(d+2))
        let g = vec![zero, one];
        let got = simplex_inner_product(&seg, &f, &g).unwrap();
        assert!((got.re - 1.0 / 6.0).abs() < 1e-12);
    }

    #[test]
    fn inner_product_degenerate_errors() {
        let bad = [pt(&[0.0, 0.0]), pt(&[1.0, 1.0]), pt(&[2.0, 2.0])];
        let one = Complex64::new(1.0, 0.0);
        assert!(simplex_inner_product(&bad, &[one; 3], &[one; 3]).is_err());
    }

    #[test]
    fn power_integral_examples() {
        // constant: vol * b^p
        let tri = [pt(&[0.0, 0.0]), pt(&[1.0, 0.0]), pt(&[0.0, 1.0])];
        let got = simplex_power_integral(&tri, &[3.0, 3.0, 3.0], 4).unwrap();
        assert!((got - 0.5 * 81.0).abs() < 1e-10);

        // p = 0 integrates to vol
        assert!((simplex_power_integral(&tri, &[5.0, -1.0, 2.0], 0).unwrap() - 0.5).abs() < 1e-15);

        // unit segment, values (1, 0), p = 3: integral of (1-x)^3 = 1/4
        let seg = [pt(&[0.0]), pt(&[1.0])];
        let got = simplex_power_integral(&seg, &[1.0, 0.0], 3).unwrap();
        assert!((got - 0.25).abs() < 1e-14);

        assert!(matches!(
            simplex_power_integral(&seg, &[1.0, 0.0], 17),
            Err(BasisError::PowerTooLarge(17))
        ));
    }

    #[test]
    fn gram_matrix_chain() {
        let t = chain_1d();
        let g = gram_matrix(&t);
        let expect = [[2.0, 1.0, 0.0], [1.0, 4.0, 1.0], [0.0, 1.0, 2.0]];
        for i in 0..3 {
            for j in 0..3 {
                assert!(
                    (g.matrix()[(i, j)] - expect[i][j]).abs() < 1e-13,
                    "entry ({i},{j})"
                );
            }
        }
    }

    #[test]
    fn gram_matrix_single_simplex() {
        let t = Triangulation::build(
            vec![pt(&[0.0, 0.0]), pt(&[2.0, 0.0]), pt(&[0.0, 2.0])],
            vec![vec![0, 1, 2]],
        )
        .unwrap();
        let g = gram_matrix(&t);
        let vol = 2.0;
        for i in 0..3 {
            for j in 0..3 {
                let expect = if i == j { 2.0 * vol } else { vol };
                assert!((g.matrix()[(i, j)] - expect).abs() < 1e-13);
            }
        }
    }

    #[test]
    fn gram_matrix_closed_form_entries() {
        // entries follow the star formulas: diagonal 2 vol(St(v)),
        // off-diagonal vol(St(p) ∩ St(q)), zero for disjoint stars
        let t = kuhn_triangulation(2, &[2, 2]).unwrap();
        let g = gram_matrix(&t);
        for p in 0..t.n_vertices() {
            let star_p = t.star(p).unwrap();
            assert!((g.matrix()[(p, p)] - 2.0 * star_p.volume).abs() < 1e-12);
            for q in 0..t.n_vertices() {
                if p == q {
                    continue;
                }
                let star_q = t.star(q).unwrap();
                let shared: f64 = star_p
                    .simplex_ids
                    .iter()
                    .filter(|s| star_q.simplex_ids.contains(s))
                    .map(|&s| t.simplices()[s].volume())
                    .sum();
                assert!(
                    (g.matrix()[(p, q)] - shared).abs() < 1e-12,
                    "entry ({p},{q})"
                );
            }
        }
        // disjoint stars exist on this patch and give exact zeros
        assert_eq!(g.matrix()[(0, 8)], 0.0);
    }

    #[test]
    fn l2_norm_against_gram_quadratic_form() {
        use rand::prelude::*;
        let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(31);
        let t = Arc::new(kuhn_triangulation(2, &[2, 2]).unwrap());
        let g = gram_matrix(&t);
        for _ in 0..20 {
            let coeffs: Vec<f64> = (0..t.n_vertices())
                .map(|_| rng.random::<f64>() * 2.0 - 1.0)
                .collect();
            let f = CpwlFunction::new(t.clone(), coeffs.clone()).unwrap();
            let direct = f.l2_norm();
            let via_gram = (g.quadratic_form(&coeffs).unwrap() / g.normalization()).sqrt();
            assert!(
                (direct - via_gram).abs() <= 1e-10 * direct.max(1.0),
                "{direct} vs {via_gram}"
            );
        }
    }

    #[test]
    fn l2_norm_of_single_hat_matches_lp_formula() {
        let t = Arc::new(kuhn_triangulation(2, &[2, 2]).unwrap());
        for v in 0..t.n_vertices() {
            let mut coeffs = vec![0.0; t.n_vertices()];
            coeffs[v] = 1.0;
            let f = CpwlFunction::new(t.clone(), coeffs).unwrap();
            assert!((f.l2_norm() - lp_norm_hat(&t, v, 2).unwrap()).abs() < 1e-12);
        }
    }

    #[test]
    fn l2_norm_of_unity_is_sqrt_domain_volume() {
        let t = Arc::new(kuhn_triangulation(2, &[3, 2]).unwrap());
        let f = CpwlFunction::new(t.clone(), vec![1.0; t.n_vertices()]).unwrap();
        assert!((f.l2_norm() - 6.0_f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn coefficient_count_checked() {
        let t = Arc::new(chain_1d());
        assert!(matches!(
            CpwlFunction::new(t, vec![1.0]),
            Err(BasisError::CoefficientCountMismatch { .. })
        ));
    }

    #[test]
    fn min_form_matches_on_convex_stars() {
        use rand::prelude::*;
        let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(41);
        // interior lattice vertex (convex hexagonal star) and 1-D chain
        let t2 = kuhn_triangulation(2, &[2, 2]).unwrap();
        let center = t2
            .vertices()
            .iter()
            .position(|p| p[0] == 1.0 && p[1] == 1.0)
            .unwrap();
        for _ in 0..200 {
            let x = pt(&[rng.random::<f64>() * 2.0, rng.random::<f64>() * 2.0]);
            let direct = eval_hat(&t2, center, &x).unwrap();
            let min_form = eval_hat_min_form(&t2, center, &x).unwrap();
            assert!((direct - min_form).abs() < 1e-10, "at {:?}", x);
        }
        let t1 = chain_1d();
        for _ in 0..100 {
            let x = pt(&[rng.random::<f64>() * 2.0]);
            let direct = eval_hat(&t1, 1, &x).unwrap();
            let min_form = eval_hat_min_form(&t1, 1, &x).unwrap();
            assert!((direct - min_form).abs() < 1e-10);
        }
    }

    #[test]
    fn binomial_values() {
        assert_eq!(binomial(4, 2), 6.0);
        assert_eq!(binomial(10, 0), 1.0);
        assert_eq!(binomial(24, 8), 735471.0);
    }
}
