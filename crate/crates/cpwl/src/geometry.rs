//! Exact simplex geometry: volumes, barycentric coordinates, and affine
//! interpolation from vertex values.

use thiserror::Error;

use crate::linalg::{lu_det, lu_solve, LinalgError, Matrix};

/// Shared closed-simplex membership slack: points with all barycentric
/// coordinates at least `-INSIDE_TOLERANCE` count as inside.
pub const INSIDE_TOLERANCE: f64 = 1e-9;

/// A simplex is degenerate when its volume falls below
/// `DEGENERACY_SCALE * diameter^d`; the cutoff tracks the simplex scale.
pub const DEGENERACY_SCALE: f64 = 1e-12;

#[derive(Debug, Error)]
pub enum GeometryError {
    #[error("point must have at least one coordinate")]
    EmptyPoint,
    #[error("point coordinate {index} is not finite")]
    NonFiniteCoordinate { index: usize },
    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("a d-simplex needs {expected} vertices, got {found}")]
    WrongVertexCount { expected: usize, found: usize },
    #[error("simplex repeats vertex id {0}")]
    DuplicateVertexId(usize),
    #[error("simplex is degenerate (affinely dependent vertices)")]
    DegenerateSimplex,
    #[error("expected {expected} vertex values, got {found}")]
    ValueCountMismatch { expected: usize, found: usize },
    #[error("invalid simplex volume {0}")]
    InvalidVolume(f64),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// A point of R^d.
#[derive(Clone, Debug, PartialEq)]
pub struct Point {
    coords: Vec<f64>,
}

impl Point {
    pub fn new(coords: Vec<f64>) -> Result<Self, GeometryError> {
        if coords.is_empty() {
            return Err(GeometryError::EmptyPoint);
        }
        for (index, c) in coords.iter().enumerate() {
            if !c.is_finite() {
                return Err(GeometryError::NonFiniteCoordinate { index });
            }
        }
        Ok(Point { coords })
    }

    pub fn from_slice(coords: &[f64]) -> Result<Self, GeometryError> {
        Point::new(coords.to_vec())
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }
}

impl std::ops::Index<usize> for Point {
    type Output = f64;

    fn index(&self, i: usize) -> &f64 {
        &self.coords[i]
    }
}

/// Combinatorial simplex: d+1 distinct vertex ids into some vertex table,
/// with its volume cached at construction time.
#[derive(Clone, Debug, PartialEq)]
pub struct Simplex {
    vertex_ids: Vec<usize>,
    volume: f64,
}

impl Simplex {
    pub fn new(vertex_ids: Vec<usize>, volume: f64) -> Result<Self, GeometryError> {
        for (i, a) in vertex_ids.iter().enumerate() {
            for b in vertex_ids.iter().skip(i + 1) {
                if a == b {
                    return Err(GeometryError::DuplicateVertexId(*a));
                }
            }
        }
        if !volume.is_finite() || volume < 0.0 {
            return Err(GeometryError::InvalidVolume(volume));
        }
        Ok(Simplex { vertex_ids, volume })
    }

    pub fn vertex_ids(&self) -> &[usize] {
        &self.vertex_ids
    }

    pub fn volume(&self) -> f64 {
        self.volume
    }

    /// Number of spatial dimensions (one less than the vertex count).
    pub fn dim(&self) -> usize {
        self.vertex_ids.len() - 1
    }
}

/// Barycentric coordinates of a point with respect to a simplex.
#[derive(Clone, Debug)]
pub struct BarycentricCoords {
    lambdas: Vec<f64>,
}

impl BarycentricCoords {
    pub fn lambdas(&self) -> &[f64] {
        &self.lambdas
    }

    pub fn min_lambda(&self) -> f64 {
        self.lambdas.iter().cloned().fold(f64::INFINITY, f64::min)
    }

    /// Closed-simplex membership: every coordinate at least `-tol`.
    pub fn is_inside(&self, tol: f64) -> bool {
        self.lambdas.iter().all(|&l| l >= -tol)
    }

    /// Open-simplex membership: every coordinate strictly above `tol`.
    pub fn is_strictly_inside(&self, tol: f64) -> bool {
        self.lambdas.iter().all(|&l| l > tol)
    }
}

fn check_common_dimension(vertices: &[Point]) -> Result<usize, GeometryError> {
    let d = vertices
        .first()
        .map(Point::dim)
        .ok_or(GeometryError::EmptyPoint)?;
    for v in vertices {
        if v.dim() != d {
            return Err(GeometryError::DimensionMismatch {
                expected: d,
                found: v.dim(),
            });
        }
    }
    if vertices.len() != d + 1 {
        return Err(GeometryError::WrongVertexCount {
            expected: d + 1,
            found: vertices.len(),
        });
    }
    Ok(d)
}

/// Volume of the simplex spanned by `d+1` points of R^d:
/// `|det(v_2 - v_1, ..., v_{d+1} - v_1)| / d!`. Affinely dependent vertex
/// sets yield exactly 0.
pub fn simplex_volume(vertices: &[Point]) -> Result<f64, GeometryError> {
    let d = check_common_dimension(vertices)?;
    let mut edges = Matrix::zeros(d, d);
    for (col, v) in vertices.iter().skip(1).enumerate() {
        for row in 0..d {
            edges[(row, col)] = v[row] - vertices[0][row];
        }
    }
    let det = lu_det(&edges)?;
    Ok(det.abs() / factorial(d))
}

pub(crate) fn factorial(n: usize) -> f64 {
    (1..=n).fold(1.0, |acc, k| acc * k as f64)
}

/// Largest pairwise vertex distance; the natural length scale of a simplex.
pub fn max_pairwise_distance(vertices: &[Point]) -> f64 {
    let mut best = 0.0_f64;
    for (i, a) in vertices.iter().enumerate() {
        for b in vertices.iter().skip(i + 1) {
            let d2: f64 = a
                .coords()
                .iter()
                .zip(b.coords())
                .map(|(x, y)| (x - y) * (x - y))
                .sum();
            best = best.max(d2.sqrt());
        }
    }
    best
}

/// Scale-aware degeneracy cutoff for a vertex set.
pub fn degeneracy_threshold(vertices: &[Point]) -> f64 {
    let d = vertices.len().saturating_sub(1);
    DEGENERACY_SCALE * max_pairwise_distance(vertices).powi(d as i32)
}

/// True when the simplex volume falls below the scale-aware threshold.
pub fn is_degenerate(vertices: &[Point]) -> Result<bool, GeometryError> {
    let vol = simplex_volume(vertices)?;
    let diam = max_pairwise_distance(vertices);
    Ok(diam == 0.0 || vol < degeneracy_threshold(vertices))
}

/// Solve the (d+1)x(d+1) barycentric system over raw coordinate slices.
pub(crate) fn barycentric_solve(
    vertex_coords: &[&[f64]],
    x: &[f64],
) -> Result<Vec<f64>, GeometryError> {
    let n = vertex_coords.len();
    let d = x.len();
    if n != d + 1 {
        return Err(GeometryError::WrongVertexCount {
            expected: d + 1,
            found: n,
        });
    }
    let mut system = Matrix::zeros(n, n);
    let mut rhs = vec![0.0; n];
    for row in 0..d {
        for (col, vc) in vertex_coords.iter().enumerate() {
            system[(row, col)] = vc[row];
        }
        rhs[row] = x[row];
    }
    for col in 0..n {
        system[(d, col)] = 1.0;
    }
    rhs[d] = 1.0;
    lu_solve(&system, &rhs).map_err(|e| match e {
        LinalgError::Singular => GeometryError::DegenerateSimplex,
        other => GeometryError::Linalg(other),
    })
}

/// Barycentric coordinates of `x` with respect to a nondegenerate simplex.
pub fn barycentric(vertices: &[Point], x: &Point) -> Result<BarycentricCoords, GeometryError> {
    let d = check_common_dimension(vertices)?;
    if x.dim() != d {
        return Err(GeometryError::DimensionMismatch {
            expected: d,
            found: x.dim(),
        });
    }
    if is_degenerate(vertices)? {
        return Err(GeometryError::DegenerateSimplex);
    }
    let coords: Vec<&[f64]> = vertices.iter().map(Point::coords).collect();
    let lambdas = barycentric_solve(&coords, x.coords())?;
    Ok(BarycentricCoords { lambdas })
}

/// Value at `x` of the unique affine function taking `values` on the
/// simplex vertices.
pub fn affine_from_vertex_values(
    vertices: &[Point],
    values: &[f64],
    x: &Point,
) -> Result<f64, GeometryError> {
    if values.len() != vertices.len() {
        return Err(GeometryError::ValueCountMismatch {
            expected: vertices.len(),
            found: values.len(),
        });
    }
    let bary = barycentric(vertices, x)?;
    Ok(bary
        .lambdas()
        .iter()
        .zip(values)
        .map(|(l, v)| l * v)
        .sum())
}

/// Arithmetic mean of the vertices.
pub fn centroid(vertices: &[Point]) -> Point {
    let d = vertices[0].dim();
    let mut coords = vec![0.0; d];
    for v in vertices {
        for (acc, c) in coords.iter_mut().zip(v.coords()) {
            *acc += c;
        }
    }
    let n = vertices.len() as f64;
    for c in coords.iter_mut() {
        *c /= n;
    }
    Point { coords }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pt(coords: &[f64]) -> Point {
        Point::from_slice(coords).unwrap()
    }

    #[test]
    fn unit_triangle_volume() {
        let v = [pt(&[0.0, 0.0]), pt(&[1.0, 0.0]), pt(&[0.0, 1.0])];
        assert!((simplex_volume(&v).unwrap() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn unit_tetrahedron_volume() {
        let v = [
            pt(&[0.0, 0.0, 0.0]),
            pt(&[1.0, 0.0, 0.0]),
            pt(&[0.0, 1.0, 0.0]),
            pt(&[0.0, 0.0, 1.0]),
        ];
        assert!((simplex_volume(&v).unwrap() - 1.0 / 6.0).abs() < 1e-15);
    }

    #[test]
    fn collinear_points_have_zero_volume() {
        let v = [pt(&[0.0, 0.0]), pt(&[1.0, 1.0]), pt(&[2.0, 2.0])];
        assert_eq!(simplex_volume(&v).unwrap(), 0.0);
        assert!(is_degenerate(&v).unwrap());
    }

    #[test]
    fn volume_dimension_mismatch_errors() {
        let v = [pt(&[0.0, 0.0]), pt(&[1.0]), pt(&[0.0, 1.0])];
        assert!(matches!(
            simplex_volume(&v),
            Err(GeometryError::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn barycentric_at_vertex_and_centroid() {
        let v = [pt(&[0.0, 0.0]), pt(&[1.0, 0.0]), pt(&[0.0, 1.0])];
        let at_v1 = barycentric(&v, &v[0]).unwrap();
        assert!((at_v1.lambdas()[0] - 1.0).abs() < 1e-12);
        assert!(at_v1.lambdas()[1].abs() < 1e-12);
        assert!(at_v1.lambdas()[2].abs() < 1e-12);

        let c = centroid(&v);
        let at_c = barycentric(&v, &c).unwrap();
        for l in at_c.lambdas() {
            assert!((l - 1.0 / 3.0).abs() < 1e-12);
        }
    }

    #[test]
    fn barycentric_hand_solved_case() {
        // 3x3 system solved by hand: x = (1/4, 1/4) in the unit triangle.
        let v = [pt(&[0.0, 0.0]), pt(&[1.0, 0.0]), pt(&[0.0, 1.0])];
        let b = barycentric(&v, &pt(&[0.25, 0.25])).unwrap();
        assert!((b.lambdas()[0] - 0.5).abs() < 1e-12);
        assert!((b.lambdas()[1] - 0.25).abs() < 1e-12);
        assert!((b.lambdas()[2] - 0.25).abs() < 1e-12);
    }

    #[test]
    fn barycentric_degenerate_errors() {
        let v = [pt(&[0.0, 0.0]), pt(&[1.0, 1.0]), pt(&[2.0, 2.0])];
        assert!(matches!(
            barycentric(&v, &pt(&[0.5, 0.5])),
            Err(GeometryError::DegenerateSimplex)
        ));
    }

    #[test]
    fn affine_interpolation_cases() {
        // constant reproduction
        let v = [pt(&[0.0, 0.0]), pt(&[2.0, 0.0]), pt(&[0.0, 3.0])];
        let c = affine_from_vertex_values(&v, &[7.5, 7.5, 7.5], &pt(&[0.3, 0.4])).unwrap();
        assert!((c - 7.5).abs() < 1e-12);

        // 1-D linear interpolation: vertices {0, 2}, values {0, 4}, x = 0.5
        let v1 = [pt(&[0.0]), pt(&[2.0])];
        let y = affine_from_vertex_values(&v1, &[0.0, 4.0], &pt(&[0.5])).unwrap();
        assert!((y - 1.0).abs() < 1e-12);
    }

    #[test]
    fn affine_reproduction_random() {
        use rand::prelude::*;
        let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(7);
        for _ in 0..50 {
            let d = 1 + (rng.random::<u32>() % 4) as usize;
            // perturbed standard simplex stays well conditioned
            let mut verts = Vec::new();
            for k in 0..=d {
                let mut c = vec![0.0; d];
                if k > 0 {
                    c[k - 1] = 1.0;
                }
                for x in c.iter_mut() {
                    *x += 0.2 * (rng.random::<f64>() - 0.5);
                }
                verts.push(Point::new(c).unwrap());
            }
            let a: Vec<f64> = (0..d).map(|_| rng.random::<f64>() * 4.0 - 2.0).collect();
            let b = rng.random::<f64>() * 4.0 - 2.0;
            let affine = |p: &Point| -> f64 {
                a.iter().zip(p.coords()).map(|(ai, xi)| ai * xi).sum::<f64>() + b
            };
            let values: Vec<f64> = verts.iter().map(&affine).collect();
            // random point inside via random barycentric weights
            let mut w: Vec<f64> = (0..=d).map(|_| rng.random::<f64>() + 1e-3).collect();
            let s: f64 = w.iter().sum();
            for x in w.iter_mut() {
                *x /= s;
            }
            let mut xc = vec![0.0; d];
            for (wk, vk) in w.iter().zip(&verts) {
                for (xi, vi) in xc.iter_mut().zip(vk.coords()) {
                    *xi += wk * vi;
                }
            }
            let x = Point::new(xc).unwrap();
            let got = affine_from_vertex_values(&verts, &values, &x).unwrap();
            assert!((got - affine(&x)).abs() <= 1e-10);
        }
    }

    #[test]
    fn barycentric_reconstructs_point() {
        use rand::prelude::*;
        let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(11);
        let v = [
            pt(&[0.1, -0.2, 0.0]),
            pt(&[1.3, 0.1, -0.3]),
            pt(&[-0.2, 1.1, 0.2]),
            pt(&[0.3, 0.2, 1.4]),
        ];
        for _ in 0..100 {
            let mut w: Vec<f64> = (0..4).map(|_| rng.random::<f64>()).collect();
            let s: f64 = w.iter().sum();
            for x in w.iter_mut() {
                *x /= s;
            }
            let mut xc = vec![0.0; 3];
            for (wk, vk) in w.iter().zip(&v) {
                for (xi, vi) in xc.iter_mut().zip(vk.coords()) {
                    *xi += wk * vi;
                }
            }
            let x = Point::new(xc.clone()).unwrap();
            let b = barycentric(&v, &x).unwrap();
            assert!(b.is_inside(INSIDE_TOLERANCE));
            let sum: f64 = b.lambdas().iter().sum();
            assert!((sum - 1.0).abs() < 1e-10);
            // reconstruction
            let mut rec = [0.0; 3];
            for (lk, vk) in b.lambdas().iter().zip(&v) {
                for (ri, vi) in rec.iter_mut().zip(vk.coords()) {
                    *ri += lk * vi;
                }
            }
            for (r, xi) in rec.iter().zip(&xc) {
                assert!((r - xi).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn volume_invariances() {
        use rand::prelude::*;
        let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(3);
        let v: Vec<Point> = (0..4)
            .map(|_| {
                Point::new((0..3).map(|_| rng.random::<f64>() * 2.0 - 1.0).collect()).unwrap()
            })
            .collect();
        let vol = simplex_volume(&v).unwrap();

        // translation
        let shift = [0.7, -1.3, 2.1];
        let vt: Vec<Point> = v
            .iter()
            .map(|p| {
                Point::new(
                    p.coords()
                        .iter()
                        .zip(&shift)
                        .map(|(a, b)| a + b)
                        .collect(),
                )
                .unwrap()
            })
            .collect();
        assert!((simplex_volume(&vt).unwrap() - vol).abs() < 1e-12 * vol.max(1.0));

        // permutation
        let vp = vec![v[2].clone(), v[0].clone(), v[3].clone(), v[1].clone()];
        assert!((simplex_volume(&vp).unwrap() - vol).abs() < 1e-12 * vol.max(1.0));

        // scaling by t multiplies volume by t^d
        let t = 1.7;
        let vs: Vec<Point> = v
            .iter()
            .map(|p| Point::new(p.coords().iter().map(|c| c * t).collect()).unwrap())
            .collect();
        let expect = vol * t.powi(3);
        assert!((simplex_volume(&vs).unwrap() - expect).abs() < 1e-12 * expect.max(1.0));
    }

    #[test]
    fn point_validation() {
        assert!(matches!(Point::new(vec![]), Err(GeometryError::EmptyPoint)));
        assert!(matches!(
            Point::new(vec![1.0, f64::NAN]),
            Err(GeometryError::NonFiniteCoordinate { index: 1 })
        ));
    }

    #[test]
    fn simplex_rejects_duplicate_ids() {
        assert!(matches!(
            Simplex::new(vec![0, 1, 1], 0.5),
            Err(GeometryError::DuplicateVertexId(1))
        ));
    }
}
