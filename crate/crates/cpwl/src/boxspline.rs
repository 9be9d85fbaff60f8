//! Linear box splines on lattices.
//!
//! The spline is generated by d independent directions (the columns of an
//! invertible matrix Xi) plus their sum as the (d+1)-th direction. Two
//! independent evaluation routes are provided: the signed hinge-function
//! sum over all 2^(d+1) corner offsets, and hat-function evaluation on the
//! Kuhn triangulation after mapping to lattice coordinates. The sampled
//! autocorrelation table yields the Fourier symbol g_hat whose essential
//! extrema are the squared Riesz bounds: A = sqrt(|det Xi| / (d+2)),
//! B = sqrt(|det Xi|), condition number sqrt(d+2) on every lattice.

use num_complex::Complex64;
use thiserror::Error;

use crate::linalg::{lu_det, lu_inverse, LinalgError, Matrix};
use crate::riesz::{RieszMethod, RieszReport};
use crate::triangulation::kuhn_triangulation;

#[derive(Debug, Error)]
pub enum BoxSplineError {
    #[error("generator matrix must be square, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },
    #[error("generator matrix is singular (|det| = {0:e})")]
    SingularGenerator(f64),
    #[error("omega has {found} components, expected {expected}")]
    OmegaDimensionMismatch { expected: usize, found: usize },
    #[error("grid sweep needs at least 2 points per axis, got {0}")]
    ResolutionTooSmall(usize),
    #[error("g_hat imaginary residual {0:e} exceeds tolerance")]
    ImaginaryResidual(f64),
    #[error("swept extrema escape the analytic bounds: {0}")]
    SweepOutsideBounds(String),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// Generator of a linear box spline: an invertible d x d direction matrix.
/// The implicit (d+1)-th direction is the sum of the columns.
#[derive(Clone, Debug)]
pub struct BoxSplineSpec {
    xi: Matrix,
    xi_inverse: Matrix,
    det_abs: f64,
    dim: usize,
}

impl BoxSplineSpec {
    pub fn new(xi: Matrix) -> Result<Self, BoxSplineError> {
        if !xi.is_square() {
            return Err(BoxSplineError::NotSquare {
                rows: xi.rows(),
                cols: xi.cols(),
            });
        }
        let dim = xi.rows();
        let det = lu_det(&xi)?;
        let scale = xi.max_abs().max(1.0);
        if det.abs() <= 1e-12 * scale.powi(dim as i32) {
            return Err(BoxSplineError::SingularGenerator(det.abs()));
        }
        let xi_inverse = lu_inverse(&xi)?;
        Ok(BoxSplineSpec {
            xi,
            xi_inverse,
            det_abs: det.abs(),
            dim,
        })
    }

    /// The Cartesian (identity-lattice) generator in dimension d.
    pub fn cartesian(d: usize) -> Self {
        BoxSplineSpec::new(Matrix::identity(d)).expect("identity is invertible")
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn det_abs(&self) -> f64 {
        self.det_abs
    }

    pub fn xi(&self) -> &Matrix {
        &self.xi
    }

    pub fn xi_inverse(&self) -> &Matrix {
        &self.xi_inverse
    }

    /// Direction k for k in 0..=d; the last one is the column sum.
    pub fn direction(&self, k: usize) -> Vec<f64> {
        if k < self.dim {
            (0..self.dim).map(|i| self.xi[(i, k)]).collect()
        } else {
            (0..self.dim)
                .map(|i| (0..self.dim).map(|j| self.xi[(i, j)]).sum())
                .collect()
        }
    }

    /// Lattice coordinates of a spatial point: y = Xi^-1 x.
    fn to_lattice(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.dim, "point dimension mismatch");
        self.xi_inverse.matvec(x).expect("dimension checked")
    }
}

/// Evaluate the box spline through its hinge expansion: the signed sum over
/// all corner offsets `eps` in {0,1}^(d+1) of `min(Xi^-1 x - offset)_+`,
/// where the offset is `eps_1 e_1 + ... + eps_d e_d + eps_{d+1} (1,...,1)`
/// in lattice coordinates.
pub fn eval_box_spline_ghh(spec: &BoxSplineSpec, x: &[f64]) -> f64 {
    let d = spec.dim();
    let y = spec.to_lattice(x);
    let mut total = 0.0;
    for eps in 0..(1_u32 << (d + 1)) {
        let popcount = eps.count_ones();
        let sign = if popcount % 2 == 0 { 1.0 } else { -1.0 };
        let last = if eps & (1 << d) != 0 { 1.0 } else { 0.0 };
        let mut min_coord = f64::INFINITY;
        for (i, yi) in y.iter().enumerate() {
            let e_i = if eps & (1 << i) != 0 { 1.0 } else { 0.0 };
            min_coord = min_coord.min(yi - e_i - last);
        }
        if min_coord > 0.0 {
            total += sign * min_coord;
        }
    }
    total
}

/// Evaluate the box spline as the hat function at lattice site (1,...,1) of
/// the Kuhn triangulation, in lattice coordinates. The containing Kuhn
/// simplex is found by sorting fractional parts; the barycentric weight of
/// the all-ones vertex (when present) is the value. Entirely independent of
/// the hinge expansion.
pub fn eval_box_spline_kuhn(spec: &BoxSplineSpec, x: &[f64]) -> f64 {
    let d = spec.dim();
    let y = spec.to_lattice(x);
    let origin: Vec<f64> = y.iter().map(|v| v.floor()).collect();
    let frac: Vec<f64> = y.iter().zip(&origin).map(|(v, o)| v - o).collect();
    // sort axes by descending fractional part: the Kuhn simplex chain
    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&a, &b| frac[b].partial_cmp(&frac[a]).unwrap());
    // vertices: v_0 = origin, v_k = origin + e_{order[0]} + ... + e_{order[k-1]}
    // barycentric: lambda_0 = 1 - frac[order[0]],
    //              lambda_k = frac[order[k-1]] - frac[order[k]],
    //              lambda_d = frac[order[d-1]]
    // find k with v_k = (1,...,1): origin + prefix = all ones
    let ones_deficit: Vec<f64> = origin.iter().map(|o| 1.0 - o).collect();
    // v_k hits all-ones iff deficit is exactly the prefix indicator of order
    let mut needed = 0usize;
    for &def in &ones_deficit {
        if def == 1.0 {
            needed += 1;
        } else if def != 0.0 {
            return 0.0;
        }
    }
    // prefix of length `needed` must cover exactly the axes with deficit 1
    for &axis in order.iter().take(needed) {
        if ones_deficit[axis] != 1.0 {
            return 0.0;
        }
    }
    let k = needed;
    if k == 0 {
        1.0 - frac[order[0]]
    } else if k == d {
        frac[order[d - 1]]
    } else {
        frac[order[k - 1]] - frac[order[k]]
    }
}

/// Sampled autocorrelation of the box spline over its own lattice:
/// entries `<B, B(. - Xi k)>` keyed by the integer offset `k`. Computed
/// exactly from per-simplex inner products on the Kuhn triangulation and
/// scaled by `|det Xi|` (the change of variables to the Cartesian case).
#[derive(Clone, Debug)]
pub struct AutocorrTable {
    dim: usize,
    det_abs: f64,
    entries: Vec<(Vec<i64>, f64)>,
}

impl AutocorrTable {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn det_abs(&self) -> f64 {
        self.det_abs
    }

    pub fn entries(&self) -> &[(Vec<i64>, f64)] {
        &self.entries
    }

    pub fn value(&self, k: &[i64]) -> f64 {
        self.entries
            .iter()
            .find(|(key, _)| key.as_slice() == k)
            .map(|(_, v)| *v)
            .unwrap_or(0.0)
    }

    /// Sum of all entries; equals g_hat(0) = |det Xi| by partition of unity.
    pub fn total(&self) -> f64 {
        self.entries.iter().map(|(_, v)| v).sum()
    }
}

/// Build the exact autocorrelation table. The support of the Cartesian
/// spline is the star of the all-ones vertex inside [0,2]^d, so per-simplex
/// inner products over that patch enumerate every nonzero offset.
pub fn autocorrelation_table(spec: &BoxSplineSpec) -> AutocorrTable {
    let d = spec.dim();
    let t = kuhn_triangulation(d, &vec![2; d]).expect("fixed 2^d patch is valid");
    let center = t
        .vertices()
        .iter()
        .position(|p| p.coords().iter().all(|&c| c == 1.0))
        .expect("patch contains the all-ones vertex");
    let star = t.star(center).expect("valid vertex");
    let norm = ((d + 1) * (d + 2)) as f64;
    let mut entries: Vec<(Vec<i64>, f64)> = Vec::new();
    let mut add = |key: Vec<i64>, w: f64| {
        if let Some(slot) = entries.iter_mut().find(|(k, _)| *k == key) {
            slot.1 += w;
        } else {
            entries.push((key, w));
        }
    };
    for &sid in &star.simplex_ids {
        let s = &t.simplices()[sid];
        let vol = s.volume();
        for &u in s.vertex_ids() {
            // offset of the neighboring hat relative to the center vertex
            let key: Vec<i64> = t.vertices()[u]
                .coords()
                .iter()
                .map(|&c| c as i64 - 1)
                .collect();
            let weight = if u == center { 2.0 } else { 1.0 };
            add(key, spec.det_abs() * vol * weight / norm);
        }
    }
    entries.sort_by(|a, b| a.0.cmp(&b.0));
    AutocorrTable {
        dim: d,
        det_abs: spec.det_abs(),
        entries,
    }
}

/// Fourier symbol of the autocorrelation sequence:
/// `g_hat(omega) = sum_k table(k) exp(-i k . omega)`. The imaginary part
/// (zero by symmetry of the table) is checked against a small tolerance and
/// discarded.
pub fn g_hat(table: &AutocorrTable, omega: &[f64]) -> Result<f64, BoxSplineError> {
    if omega.len() != table.dim {
        return Err(BoxSplineError::OmegaDimensionMismatch {
            expected: table.dim,
            found: omega.len(),
        });
    }
    let mut acc = Complex64::new(0.0, 0.0);
    for (k, v) in &table.entries {
        let phase: f64 = k.iter().zip(omega).map(|(ki, w)| *ki as f64 * w).sum();
        acc += Complex64::from_polar(*v, -phase);
    }
    let mass: f64 = table.entries.iter().map(|(_, v)| v.abs()).sum();
    let tol = 1e-10 * mass.max(1.0);
    if acc.im.abs() > tol {
        return Err(BoxSplineError::ImaginaryResidual(acc.im));
    }
    Ok(acc.re)
}

/// Extrema of g_hat over a uniform grid on [0, 2pi)^d.
#[derive(Clone, Debug)]
pub struct GhatSweep {
    pub resolution: usize,
    pub min: f64,
    pub max: f64,
    pub argmin: Vec<f64>,
    pub argmax: Vec<f64>,
}

/// Sweep g_hat over `resolution` points per axis.
pub fn sweep_ghat(table: &AutocorrTable, resolution: usize) -> Result<GhatSweep, BoxSplineError> {
    if resolution < 2 {
        return Err(BoxSplineError::ResolutionTooSmall(resolution));
    }
    let d = table.dim;
    let step = std::f64::consts::TAU / resolution as f64;
    let mut index = vec![0usize; d];
    let mut omega = vec![0.0; d];
    let mut min = f64::INFINITY;
    let mut max = f64::NEG_INFINITY;
    let mut argmin = vec![0.0; d];
    let mut argmax = vec![0.0; d];
    'grid: loop {
        for (w, &i) in omega.iter_mut().zip(&index) {
            *w = step * i as f64;
        }
        let value = g_hat(table, &omega)?;
        if value < min {
            min = value;
            argmin.copy_from_slice(&omega);
        }
        if value > max {
            max = value;
            argmax.copy_from_slice(&omega);
        }
        for axis in (0..d).rev() {
            index[axis] += 1;
            if index[axis] < resolution {
                continue 'grid;
            }
            index[axis] = 0;
        }
        break;
    }
    Ok(GhatSweep {
        resolution,
        min,
        max,
        argmin,
        argmax,
    })
}

/// Analytic lattice Riesz bounds together with a verifying grid sweep.
#[derive(Clone, Debug)]
pub struct LatticeRieszBounds {
    pub report: RieszReport,
    pub sweep: GhatSweep,
}

/// Exact Riesz bounds of the lattice shifts of a linear box spline:
/// `A = sqrt(|det Xi| / (d+2))`, `B = sqrt(|det Xi|)`, condition number
/// `sqrt(d+2)`. The grid sweep of g_hat must bracket `A^2` and `B^2` from
/// inside; a violation is reported as an error.
pub fn lattice_riesz_bounds(
    spec: &BoxSplineSpec,
    resolution: usize,
) -> Result<LatticeRieszBounds, BoxSplineError> {
    let d = spec.dim() as f64;
    let det = spec.det_abs();
    let lower_sq = det / (d + 2.0);
    let upper_sq = det;
    let table = autocorrelation_table(spec);
    let sweep = sweep_ghat(&table, resolution)?;
    let tol = 1e-9 * det.max(1.0);
    if sweep.min < lower_sq - tol {
        return Err(BoxSplineError::SweepOutsideBounds(format!(
            "swept min {} below analytic A^2 {}",
            sweep.min, lower_sq
        )));
    }
    if sweep.max > upper_sq + tol {
        return Err(BoxSplineError::SweepOutsideBounds(format!(
            "swept max {} above analytic B^2 {}",
            sweep.max, upper_sq
        )));
    }
    let report = RieszReport {
        lower: lower_sq.sqrt(),
        upper: upper_sq.sqrt(),
        condition: (upper_sq / lower_sq).sqrt(),
        method: RieszMethod::LatticeFourier,
        star_volume_min: None,
        star_volume_max: None,
    };
    Ok(LatticeRieszBounds { report, sweep })
}
