//! Riesz bounds and condition numbers of the hat-basis synthesis operator:
//! star-volume bounds valid on any triangulation, exact Gram-eigenvalue
//! bounds for finite triangulations, and the stochastic conditioning
//! estimate for the per-simplex pairing matrix.

use rand::prelude::*;
use rand_chacha::ChaCha12Rng;
use rand_distr::StandardNormal;
use serde::Serialize;
use thiserror::Error;

use crate::basis::{BasisError, GramMatrix, GramScale};
use crate::linalg::{jacobi_eigen, LinalgError, JACOBI_MAX_SWEEPS};
use crate::triangulation::{Triangulation, TriangulationError};

#[derive(Debug, Error)]
pub enum RieszError {
    #[error("Gram matrix is not symmetric: |m[{row},{col}] - m[{col},{row}]| = {delta:e}")]
    NotSymmetric { row: usize, col: usize, delta: f64 },
    #[error("eigensolver failed: {0}")]
    Eigensolver(LinalgError),
    #[error("Gram matrix has a non-positive extreme eigenvalue {0}")]
    NonPositiveEigenvalue(f64),
    #[error("sampling needs at least one trial")]
    NoTrials,
    #[error(transparent)]
    Basis(#[from] BasisError),
    #[error(transparent)]
    Triangulation(#[from] TriangulationError),
}

/// How a Riesz report was produced.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum RieszMethod {
    GramEigen,
    StarVolume,
    LatticeFourier,
}

impl std::fmt::Display for RieszMethod {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let tag = match self {
            RieszMethod::GramEigen => "gram-eigen",
            RieszMethod::StarVolume => "star-volume",
            RieszMethod::LatticeFourier => "lattice-fourier",
        };
        f.write_str(tag)
    }
}

/// Two-sided Riesz bounds with their provenance.
#[derive(Clone, Debug, Serialize)]
pub struct RieszReport {
    /// Lower Riesz bound A.
    pub lower: f64,
    /// Upper Riesz bound B.
    pub upper: f64,
    /// Condition number B / A.
    pub condition: f64,
    pub method: RieszMethod,
    /// Smallest star volume, when the method derives from star volumes.
    pub star_volume_min: Option<f64>,
    /// Largest star volume, when the method derives from star volumes.
    pub star_volume_max: Option<f64>,
}

impl RieszReport {
    fn new(lower: f64, upper: f64, method: RieszMethod) -> Self {
        debug_assert!(lower > 0.0 && lower <= upper * (1.0 + 1e-12));
        RieszReport {
            lower,
            upper,
            condition: upper / lower,
            method,
            star_volume_min: None,
            star_volume_max: None,
        }
    }
}

/// Star-volume bounds from explicit extreme star volumes:
/// `A = sqrt(V_inf / ((d+1)(d+2)))`, `B = sqrt(V_sup / (d+1))`.
///
/// The reported condition number `B/A = sqrt(d+2) * sqrt(V_sup / V_inf)`
/// is an upper bound on the true Riesz condition number.
pub fn star_volume_bounds_from_extremes(v_inf: f64, v_sup: f64, d: usize) -> RieszReport {
    let d = d as f64;
    let lower = (v_inf / ((d + 1.0) * (d + 2.0))).sqrt();
    let upper = (v_sup / (d + 1.0)).sqrt();
    let mut report = RieszReport::new(lower, upper, RieszMethod::StarVolume);
    report.star_volume_min = Some(v_inf);
    report.star_volume_max = Some(v_sup);
    report
}

/// Star-volume bounds of a finite triangulation.
pub fn star_volume_bounds(t: &Triangulation) -> RieszReport {
    let volumes = t.star_volumes();
    let v_inf = volumes.iter().cloned().fold(f64::INFINITY, f64::min);
    let v_sup = volumes.iter().cloned().fold(0.0_f64, f64::max);
    star_volume_bounds_from_extremes(v_inf, v_sup, t.dim())
}

/// Exact Riesz bounds of a finite triangulation from the extreme
/// eigenvalues of its Gram matrix:
/// `A = sqrt(lambda_min(M) / ((d+1)(d+2)))`, `B` likewise with lambda_max.
pub fn gram_eigen_bounds(gram: &GramMatrix) -> Result<RieszReport, RieszError> {
    let m = gram.matrix();
    if let Some((row, col, delta)) = m.symmetry_violation(1e-12 * m.max_abs().max(1.0)) {
        return Err(RieszError::NotSymmetric { row, col, delta });
    }
    let eigen = jacobi_eigen(m, JACOBI_MAX_SWEEPS).map_err(RieszError::Eigensolver)?;
    let lambda_min = *eigen.values.first().expect("nonempty spectrum");
    let lambda_max = *eigen.values.last().expect("nonempty spectrum");
    if lambda_min <= 0.0 {
        return Err(RieszError::NonPositiveEigenvalue(lambda_min));
    }
    let scale = match gram.scale() {
        GramScale::Raw => gram.normalization(),
        GramScale::Normalized => 1.0,
    };
    Ok(RieszReport::new(
        (lambda_min / scale).sqrt(),
        (lambda_max / scale).sqrt(),
        RieszMethod::GramEigen,
    ))
}

/// Outcome of the randomized two-sided bound check.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct SamplingCheck {
    pub min_ratio: f64,
    pub max_ratio: f64,
    /// True when every observed ratio lies in `[A - slack, B + slack]`
    /// with `slack = 1e-8`.
    pub within_bounds: bool,
}

/// Draw `n_trials` Gaussian coefficient vectors and evaluate the synthesis
/// ratio `||sum c_v beta_v||_L2 / ||c||_l2` exactly through the Gram
/// quadratic form. Returns the worst observed ratios and whether all of
/// them respect the report's bounds.
pub fn verify_bounds_by_sampling(
    t: &Triangulation,
    report: &RieszReport,
    n_trials: usize,
    seed: u64,
) -> Result<SamplingCheck, RieszError> {
    if n_trials == 0 {
        return Err(RieszError::NoTrials);
    }
    let gram = crate::basis::gram_matrix(t);
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let n = t.n_vertices();
    let mut min_ratio = f64::INFINITY;
    let mut max_ratio = 0.0_f64;
    let mut c = vec![0.0; n];
    for _ in 0..n_trials {
        loop {
            let mut norm_sq = 0.0;
            for x in c.iter_mut() {
                *x = rng.sample(StandardNormal);
                norm_sq += *x * *x;
            }
            if norm_sq > 1e-12 {
                break;
            }
        }
        let ratio = gram.riesz_ratio(&c)?;
        min_ratio = min_ratio.min(ratio);
        max_ratio = max_ratio.max(ratio);
    }
    let slack = 1e-8;
    Ok(SamplingCheck {
        min_ratio,
        max_ratio,
        within_bounds: min_ratio >= report.lower - slack && max_ratio <= report.upper + slack,
    })
}

/// Empirical moments of the per-simplex pairing quadratic form on random
/// unit vectors of C^(d+1): returns
/// `(mean of C^H (1+I) C, mean of sqrt(C^H (1+I) C))`.
///
/// Unit vectors are drawn uniformly on the complex sphere by normalizing
/// i.i.d. standard complex Gaussians. The first moment converges to 2
/// for every dimension; the second stays below sqrt(2).
pub fn stochastic_conditioning(d: usize, n_samples: usize, seed: u64) -> (f64, f64) {
    let n = d + 1;
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let mut sum_sq = 0.0;
    let mut sum = 0.0;
    for _ in 0..n_samples.max(1) {
        let mut re_total = 0.0;
        let mut im_total = 0.0;
        let mut norm_sq = 0.0;
        for _ in 0..n {
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            norm_sq += re * re + im * im;
            re_total += re;
            im_total += im;
        }
        if norm_sq <= 1e-300 {
            continue;
        }
        // C^H (1+I) C = |sum C_k|^2 + ||C||^2, normalized by ||C||^2
        let ratio_sq = (re_total * re_total + im_total * im_total) / norm_sq + 1.0;
        sum_sq += ratio_sq;
        sum += ratio_sq.sqrt();
    }
    let nf = n_samples.max(1) as f64;
    (sum_sq / nf, sum / nf)
}
