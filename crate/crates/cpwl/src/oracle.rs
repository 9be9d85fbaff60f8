//! Brute-force integration over simplices, used to certify the closed-form
//! integrals elsewhere in the crate: a seeded Monte Carlo estimator and a
//! deterministic midpoint rule on a uniform simplicial refinement.

use rand::prelude::*;
use rand_chacha::ChaCha12Rng;
use thiserror::Error;

use crate::geometry::{simplex_volume, GeometryError, Point};

#[derive(Debug, Error)]
pub enum OracleError {
    #[error("Monte Carlo needs at least 100 samples, got {0}")]
    TooFewSamples(usize),
    #[error("subdivision depth {0} exceeds the supported maximum of 6")]
    DepthTooLarge(usize),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

/// Monte Carlo estimate with its standard error.
#[derive(Clone, Copy, Debug)]
pub struct QuadratureResult {
    pub estimate: f64,
    pub std_error: f64,
    pub n_samples: usize,
}

/// Uniform Monte Carlo integration over a simplex.
///
/// Barycentric weights are drawn by the exponential-spacings construction
/// (normalized i.i.d. Exp(1) variates are Dirichlet(1,...,1), i.e. uniform
/// over the simplex). Fully reproducible for a given seed.
pub fn mc_integrate_simplex<F>(
    vertices: &[Point],
    mut integrand: F,
    n: usize,
    seed: u64,
) -> Result<QuadratureResult, OracleError>
where
    F: FnMut(&[f64]) -> f64,
{
    if n < 100 {
        return Err(OracleError::TooFewSamples(n));
    }
    let vol = simplex_volume(vertices)?;
    let d = vertices[0].dim();
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let mut x = vec![0.0; d];
    let mut weights = vec![0.0; d + 1];
    let mut sum = 0.0;
    let mut sum_sq = 0.0;
    for _ in 0..n {
        let mut total = 0.0;
        for w in weights.iter_mut() {
            // -ln(u) with u in (0, 1]; rng.random::<f64>() is in [0, 1)
            let u = 1.0 - rng.random::<f64>();
            *w = -u.ln();
            total += *w;
        }
        x.iter_mut().for_each(|c| *c = 0.0);
        for (w, v) in weights.iter().zip(vertices) {
            let lam = w / total;
            for (xi, vi) in x.iter_mut().zip(v.coords()) {
                *xi += lam * vi;
            }
        }
        let f = integrand(&x);
        sum += f;
        sum_sq += f * f;
    }
    let nf = n as f64;
    let mean = sum / nf;
    let var = ((sum_sq / nf) - mean * mean).max(0.0);
    Ok(QuadratureResult {
        estimate: vol * mean,
        std_error: vol * (var / nf).sqrt(),
        n_samples: n,
    })
}

/// All permutations of 0..d in lexicographic order.
pub(crate) fn permutations(d: usize) -> Vec<Vec<usize>> {
    fn rec(current: &mut Vec<usize>, remaining: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if remaining.is_empty() {
            out.push(current.clone());
            return;
        }
        // `remaining` stays sorted, so visiting its indices in order is lexicographic
        for i in 0..remaining.len() {
            let x = remaining.remove(i);
            current.push(x);
            rec(current, remaining, out);
            current.pop();
            remaining.insert(i, x);
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::with_capacity(d), &mut (0..d).collect(), &mut out);
    out
}

/// Vertex k of the unit Kuhn simplex for permutation `perm`:
/// the prefix-sum indicator of the first k permuted axes.
fn kuhn_prefix(perm: &[usize], k: usize) -> Vec<f64> {
    let d = perm.len();
    let mut v = vec![0.0; d];
    for &axis in perm.iter().take(k) {
        v[axis] = 1.0;
    }
    v
}

fn inside_reference(y: &[f64], eps: f64) -> bool {
    // reference Kuhn simplex: 1 >= y_1 >= y_2 >= ... >= y_d >= 0
    let d = y.len();
    if y[0] > 1.0 + eps || y[d - 1] < -eps {
        return false;
    }
    y.windows(2).all(|w| w[0] >= w[1] - eps)
}

/// For each permutation, the list of (corner in {0,1}^d, child permutation)
/// pairs describing its 2^d half-scale Kuhn children. The pattern is scale
/// invariant, so it is computed once on the unit cell.
fn refinement_patterns(d: usize, perms: &[Vec<usize>]) -> Vec<Vec<(Vec<f64>, usize)>> {
    let mut patterns = Vec::with_capacity(perms.len());
    for parent in perms {
        // express membership in the parent's own ordering
        let mut pattern = Vec::new();
        for corner_bits in 0..(1_u32 << d) {
            let corner: Vec<f64> = (0..d)
                .map(|axis| {
                    if corner_bits & (1 << axis) != 0 {
                        1.0
                    } else {
                        0.0
                    }
                })
                .collect();
            for (child_id, child) in perms.iter().enumerate() {
                let mut all_inside = true;
                for k in 0..=d {
                    let prefix = kuhn_prefix(child, k);
                    let y: Vec<f64> = (0..d).map(|i| 0.5 * (corner[i] + prefix[i])).collect();
                    // map into the parent's sorted frame
                    let sorted: Vec<f64> = parent.iter().map(|&axis| y[axis]).collect();
                    if !inside_reference(&sorted, 1e-12) {
                        all_inside = false;
                        break;
                    }
                }
                if all_inside {
                    pattern.push((corner.clone(), child_id));
                }
            }
        }
        debug_assert_eq!(pattern.len(), 1 << d);
        patterns.push(pattern);
    }
    patterns
}

/// Deterministic midpoint-rule integration on a uniform refinement of the
/// simplex into `2^(d*depth)` congruent cells (dyadic Kuhn refinement).
/// Exact for affine integrands; O(h^2) convergent otherwise.
pub fn subdivide_integrate<F>(
    vertices: &[Point],
    mut integrand: F,
    depth: usize,
) -> Result<f64, OracleError>
where
    F: FnMut(&[f64]) -> f64,
{
    if depth > 6 {
        return Err(OracleError::DepthTooLarge(depth));
    }
    let vol = simplex_volume(vertices)?;
    let d = vertices[0].dim();
    let perms = permutations(d);
    let patterns = refinement_patterns(d, &perms);
    // centroid (in reference coordinates) of each permutation's unit cell
    let centroids: Vec<Vec<f64>> = perms
        .iter()
        .map(|perm| {
            let mut c = vec![0.0; d];
            for k in 0..=d {
                for (ci, pi) in c.iter_mut().zip(kuhn_prefix(perm, k)) {
                    *ci += pi;
                }
            }
            c.iter_mut().for_each(|ci| *ci /= (d + 1) as f64);
            c
        })
        .collect();
    let cell_volume = vol / 2.0_f64.powi((d * depth) as i32);

    // reference y -> target x through barycentric weights of the identity
    // Kuhn simplex: lambda_0 = 1 - y_1, lambda_k = y_k - y_{k+1}, lambda_d = y_d
    let mut x = vec![0.0; d];
    let mut eval_at = |y: &[f64], integrand: &mut F| -> f64 {
        x.iter_mut().for_each(|c| *c = 0.0);
        let mut add = |lam: f64, v: &Point| {
            for (xi, vi) in x.iter_mut().zip(v.coords()) {
                *xi += lam * vi;
            }
        };
        add(1.0 - y[0], &vertices[0]);
        for k in 1..d {
            add(y[k - 1] - y[k], &vertices[k]);
        }
        add(y[d - 1], &vertices[d]);
        integrand(&x)
    };

    // iterative traversal of the refinement tree
    struct Node {
        origin: Vec<f64>,
        scale: f64,
        perm_id: usize,
        level: usize,
    }
    // lexicographic order puts the identity permutation first
    debug_assert!(perms[0].iter().copied().eq(0..d));
    let mut stack = vec![Node {
        origin: vec![0.0; d],
        scale: 1.0,
        perm_id: 0,
        level: 0,
    }];
    let mut total = 0.0;
    let mut y = vec![0.0; d];
    while let Some(node) = stack.pop() {
        if node.level == depth {
            for i in 0..d {
                y[i] = node.origin[i] + node.scale * centroids[node.perm_id][i];
            }
            total += eval_at(&y, &mut integrand);
            continue;
        }
        for (corner, child_id) in &patterns[node.perm_id] {
            let half = node.scale * 0.5;
            let origin: Vec<f64> = node
                .origin
                .iter()
                .zip(corner)
                .map(|(o, c)| o + half * c)
                .collect();
            stack.push(Node {
                origin,
                scale: half,
                perm_id: *child_id,
                level: node.level + 1,
            });
        }
    }
    Ok(total * cell_volume)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pt(coords: &[f64]) -> Point {
        Point::from_slice(coords).unwrap()
    }

    #[test]
    fn mc_constant_is_exact() {
        let v = [pt(&[0.0, 0.0]), pt(&[2.0, 0.0]), pt(&[0.0, 1.0])];
        let r = mc_integrate_simplex(&v, |_| 1.0, 500, 42).unwrap();
        assert!((r.estimate - 1.0).abs() < 1e-12);
        assert!(r.std_error < 1e-12);
    }

    #[test]
    fn mc_rejects_small_n() {
        let v = [pt(&[0.0]), pt(&[1.0])];
        assert!(matches!(
            mc_integrate_simplex(&v, |_| 1.0, 10, 0),
            Err(OracleError::TooFewSamples(10))
        ));
    }

    #[test]
    fn mc_quadratic_on_unit_segment() {
        // integral of (1-x)^2 over [0,1] is 1/3
        let v = [pt(&[0.0]), pt(&[1.0])];
        let r = mc_integrate_simplex(&v, |x| (1.0 - x[0]).powi(2), 1_000_000, 7).unwrap();
        assert!((r.estimate - 1.0 / 3.0).abs() < 3.0 * r.std_error);
    }

    #[test]
    fn mc_is_reproducible() {
        let v = [pt(&[0.0, 0.0]), pt(&[1.0, 0.0]), pt(&[0.0, 1.0])];
        let a = mc_integrate_simplex(&v, |x| x[0] * x[1], 10_000, 99).unwrap();
        let b = mc_integrate_simplex(&v, |x| x[0] * x[1], 10_000, 99).unwrap();
        assert_eq!(a.estimate, b.estimate);
        assert_eq!(a.std_error, b.std_error);
    }

    #[test]
    fn subdivision_exact_for_affine() {
        let v = [
            pt(&[0.2, -0.1, 0.3]),
            pt(&[1.1, 0.2, 0.1]),
            pt(&[0.0, 1.3, -0.2]),
            pt(&[0.3, 0.4, 1.2]),
        ];
        let vol = simplex_volume(&v).unwrap();
        let f = |x: &[f64]| 2.0 * x[0] - 0.5 * x[1] + 3.0 * x[2] + 1.0;
        let exact = {
            // affine functions integrate to volume times the centroid value
            let c = crate::geometry::centroid(&v);
            vol * f(c.coords())
        };
        for depth in [0, 1, 3] {
            let got = subdivide_integrate(&v, f, depth).unwrap();
            assert!(
                (got - exact).abs() <= 1e-12 * exact.abs().max(1.0),
                "depth {depth}: {got} vs {exact}"
            );
        }
    }

    #[test]
    fn subdivision_second_order_convergence() {
        // Richardson check on a quadratic: halving h divides the error by ~4
        let v = [pt(&[0.0, 0.0]), pt(&[1.0, 0.0]), pt(&[0.0, 1.0])];
        let f = |x: &[f64]| x[0] * x[0] + x[0] * x[1];
        // exact over the unit triangle: x^2 integrates to 1/12, xy to 1/24
        let exact = 1.0 / 12.0 + 1.0 / 24.0;
        let e5 = (subdivide_integrate(&v, f, 5).unwrap() - exact).abs();
        let e6 = (subdivide_integrate(&v, f, 6).unwrap() - exact).abs();
        assert!(e6 > 0.0);
        let ratio = e5 / e6;
        assert!(
            (2.0..8.0).contains(&ratio),
            "expected ~4x error reduction, got {ratio}"
        );
    }

    #[test]
    fn subdivision_rejects_deep_recursion() {
        let v = [pt(&[0.0]), pt(&[1.0])];
        assert!(matches!(
            subdivide_integrate(&v, |_| 1.0, 7),
            Err(OracleError::DepthTooLarge(7))
        ));
    }

    #[test]
    fn oracles_agree_on_random_cases() {
        use rand::prelude::*;
        let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(1234);
        for case in 0..20 {
            let d = 1 + (case % 3);
            let mut verts = Vec::new();
            for k in 0..=d {
                let mut c = vec![0.0; d];
                if k > 0 {
                    c[k - 1] = 1.0;
                }
                for x in c.iter_mut() {
                    *x += 0.3 * (rng.random::<f64>() - 0.5);
                }
                verts.push(Point::new(c).unwrap());
            }
            let a: Vec<f64> = (0..d).map(|_| rng.random::<f64>() * 2.0 - 1.0).collect();
            let f = |x: &[f64]| {
                let s: f64 = a.iter().zip(x).map(|(ai, xi)| ai * xi).sum();
                (s + 2.0) * (s + 2.0)
            };
            let mc = mc_integrate_simplex(&verts, f, 200_000, 1000 + case as u64).unwrap();
            let sub = subdivide_integrate(&verts, f, 5).unwrap();
            let tol = 3.0 * mc.std_error + 5e-3 * sub.abs();
            assert!(
                (mc.estimate - sub).abs() <= tol,
                "case {case}: mc {} vs subdivision {sub} (tol {tol})",
                mc.estimate
            );
        }
    }

    #[test]
    fn permutations_are_lexicographic() {
        let p = permutations(3);
        assert_eq!(p.len(), 6);
        assert_eq!(p[0], vec![0, 1, 2]);
        assert_eq!(p[1], vec![0, 2, 1]);
        assert_eq!(p[5], vec![2, 1, 0]);
    }
}
