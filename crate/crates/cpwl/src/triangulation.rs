//! Simplicial triangulations of finite vertex sets: construction from raw
//! data, Kuhn (Freudenthal) triangulations of integer boxes, incremental
//! 2-D Delaunay triangulation, validation, star queries, and JSON file I/O.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::path::Path;

use rand::prelude::*;
use rand_chacha::ChaCha12Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::{
    self, barycentric_solve, GeometryError, Point, Simplex, INSIDE_TOLERANCE,
};
use crate::oracle::permutations;

#[derive(Debug, Error)]
pub enum TriangulationError {
    #[error("triangulation needs at least one simplex")]
    NoSimplices,
    #[error("triangulation needs at least one vertex")]
    NoVertices,
    #[error("simplex {simplex} references vertex {vertex}, but only {count} vertices exist")]
    VertexOutOfRange {
        simplex: usize,
        vertex: usize,
        count: usize,
    },
    #[error("simplex {simplex} has {found} vertices, expected {expected} in dimension {dim}")]
    WrongSimplexSize {
        simplex: usize,
        found: usize,
        expected: usize,
        dim: usize,
    },
    #[error("simplex {0} is degenerate")]
    DegenerateSimplex(usize),
    #[error("vertex {0} does not belong to any simplex")]
    UnusedVertex(usize),
    #[error("vertex {index} has dimension {found}, expected {expected}")]
    VertexDimensionMismatch {
        index: usize,
        found: usize,
        expected: usize,
    },
    #[error("vertex id {0} out of range")]
    BadVertexId(usize),
    #[error("Delaunay triangulation needs at least 3 points, got {0}")]
    NotEnoughPoints(usize),
    #[error("points {0} and {1} are duplicates")]
    DuplicatePoint(usize, usize),
    #[error("all points are collinear")]
    CollinearPoints,
    #[error("Delaunay triangulation is only implemented for dimension 2, got {0}")]
    UnsupportedDimension(usize),
    #[error("Kuhn triangulation needs {dim} extents, got {found}")]
    ExtentMismatch { dim: usize, found: usize },
    #[error("Kuhn extent along axis {0} must be at least 1")]
    EmptyExtent(usize),
    #[error("I/O error on {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("parse error in {path} at line {line}, column {column}: {message}")]
    Parse {
        path: String,
        line: usize,
        column: usize,
        message: String,
    },
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

/// The star of a vertex: the simplices that contain it.
#[derive(Clone, Debug)]
pub struct Star {
    pub vertex_id: usize,
    pub simplex_ids: Vec<usize>,
    pub volume: f64,
    pub cardinality: usize,
}

/// Outcome of the triangulation validity check.
///
/// `intersection_ok` reports the sampled pairwise face-intersection check;
/// `offending_pairs` lists the simplex pairs that failed it. `union_ok`
/// reports the necessary volume condition for the union property (checked
/// in dimension 2 only; trivially true otherwise).
#[derive(Clone, Debug)]
pub struct ValidationReport {
    pub union_ok: bool,
    pub intersection_ok: bool,
    pub offending_pairs: Vec<(usize, usize)>,
}

impl ValidationReport {
    pub fn is_ok(&self) -> bool {
        self.union_ok && self.intersection_ok
    }
}

/// An immutable simplicial triangulation: vertex table, simplex list, and
/// per-vertex star index. All queries are read-only and thread-safe.
#[derive(Clone, Debug)]
pub struct Triangulation {
    dim: usize,
    vertices: Vec<Point>,
    simplices: Vec<Simplex>,
    star_index: Vec<Vec<usize>>,
    bboxes: Vec<(Vec<f64>, Vec<f64>)>,
}

impl Triangulation {
    /// Build and fully validate the combinatorial structure: every index in
    /// range, every simplex nondegenerate with its volume cached, every
    /// vertex used, and the star index populated.
    pub fn build(
        vertices: Vec<Point>,
        simplex_vertex_ids: Vec<Vec<usize>>,
    ) -> Result<Self, TriangulationError> {
        if vertices.is_empty() {
            return Err(TriangulationError::NoVertices);
        }
        if simplex_vertex_ids.is_empty() {
            return Err(TriangulationError::NoSimplices);
        }
        let dim = vertices[0].dim();
        for (index, v) in vertices.iter().enumerate() {
            if v.dim() != dim {
                return Err(TriangulationError::VertexDimensionMismatch {
                    index,
                    found: v.dim(),
                    expected: dim,
                });
            }
        }
        let mut simplices = Vec::with_capacity(simplex_vertex_ids.len());
        let mut bboxes = Vec::with_capacity(simplex_vertex_ids.len());
        let mut star_index = vec![Vec::new(); vertices.len()];
        for (sid, ids) in simplex_vertex_ids.into_iter().enumerate() {
            if ids.len() != dim + 1 {
                return Err(TriangulationError::WrongSimplexSize {
                    simplex: sid,
                    found: ids.len(),
                    expected: dim + 1,
                    dim,
                });
            }
            for &v in &ids {
                if v >= vertices.len() {
                    return Err(TriangulationError::VertexOutOfRange {
                        simplex: sid,
                        vertex: v,
                        count: vertices.len(),
                    });
                }
            }
            let pts: Vec<Point> = ids.iter().map(|&v| vertices[v].clone()).collect();
            if geometry::is_degenerate(&pts)? {
                return Err(TriangulationError::DegenerateSimplex(sid));
            }
            let volume = geometry::simplex_volume(&pts)?;
            let mut lo = vec![f64::INFINITY; dim];
            let mut hi = vec![f64::NEG_INFINITY; dim];
            for p in &pts {
                for (i, c) in p.coords().iter().enumerate() {
                    lo[i] = lo[i].min(*c);
                    hi[i] = hi[i].max(*c);
                }
            }
            for &v in &ids {
                star_index[v].push(sid);
            }
            simplices.push(Simplex::new(ids, volume)?);
            bboxes.push((lo, hi));
        }
        if let Some(unused) = star_index.iter().position(Vec::is_empty) {
            return Err(TriangulationError::UnusedVertex(unused));
        }
        Ok(Triangulation {
            dim,
            vertices,
            simplices,
            star_index,
            bboxes,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    pub fn simplices(&self) -> &[Simplex] {
        &self.simplices
    }

    pub fn n_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn n_simplices(&self) -> usize {
        self.simplices.len()
    }

    /// Vertex points of one simplex, in the simplex's own order.
    pub fn simplex_points(&self, simplex_id: usize) -> Vec<Point> {
        self.simplices[simplex_id]
            .vertex_ids()
            .iter()
            .map(|&v| self.vertices[v].clone())
            .collect()
    }

    pub fn star(&self, vertex_id: usize) -> Result<Star, TriangulationError> {
        let ids = self
            .star_index
            .get(vertex_id)
            .ok_or(TriangulationError::BadVertexId(vertex_id))?;
        let volume = ids.iter().map(|&s| self.simplices[s].volume()).sum();
        Ok(Star {
            vertex_id,
            simplex_ids: ids.clone(),
            volume,
            cardinality: ids.len(),
        })
    }

    /// Star volumes for all vertices at once.
    pub fn star_volumes(&self) -> Vec<f64> {
        self.star_index
            .iter()
            .map(|ids| ids.iter().map(|&s| self.simplices[s].volume()).sum())
            .collect()
    }

    pub fn total_volume(&self) -> f64 {
        self.simplices.iter().map(Simplex::volume).sum()
    }

    /// Barycentric coordinates of `x` with respect to simplex `simplex_id`,
    /// computed without cloning vertex data.
    pub fn barycentric_in(
        &self,
        simplex_id: usize,
        x: &[f64],
    ) -> Result<Vec<f64>, GeometryError> {
        let ids = self.simplices[simplex_id].vertex_ids();
        let coords: Vec<&[f64]> = ids.iter().map(|&v| self.vertices[v].coords()).collect();
        barycentric_solve(&coords, x)
    }

    fn bbox_contains(&self, simplex_id: usize, x: &[f64], slack: f64) -> bool {
        let (lo, hi) = &self.bboxes[simplex_id];
        x.iter()
            .enumerate()
            .all(|(i, &c)| c >= lo[i] - slack && c <= hi[i] + slack)
    }

    /// Locate a simplex containing `x` (closed simplices, first match in
    /// simplex order). Returns `None` when `x` lies outside the domain.
    pub fn locate(&self, x: &Point) -> Option<usize> {
        if x.dim() != self.dim {
            return None;
        }
        let slack = 10.0 * INSIDE_TOLERANCE * self.length_scale();
        for sid in 0..self.simplices.len() {
            if !self.bbox_contains(sid, x.coords(), slack) {
                continue;
            }
            if let Ok(lambdas) = self.barycentric_in(sid, x.coords()) {
                if lambdas.iter().all(|&l| l >= -INSIDE_TOLERANCE) {
                    return Some(sid);
                }
            }
        }
        None
    }

    fn length_scale(&self) -> f64 {
        let mut scale = 0.0_f64;
        for (lo, hi) in &self.bboxes {
            for (a, b) in lo.iter().zip(hi) {
                scale = scale.max((b - a).abs());
            }
        }
        scale.max(1.0)
    }

    /// Sampled check of the triangulation axioms.
    ///
    /// Pairwise (with bounding-box pruning): a vertex of one simplex lying
    /// inside another without being shared, or any sampled interior point of
    /// one lying strictly inside the other, flags the pair. The union
    /// property is checked through its necessary volume condition (total
    /// simplex volume equals convex hull volume) in dimension 2 only.
    pub fn validate(&self) -> ValidationReport {
        let mut offending = Vec::new();
        let n = self.simplices.len();
        let scale = self.length_scale();
        let slack = 1e-9 * scale;
        for i in 0..n {
            for j in (i + 1)..n {
                if !bboxes_overlap(&self.bboxes[i], &self.bboxes[j], slack) {
                    continue;
                }
                if self.pair_violates(i, j) {
                    offending.push((i, j));
                }
            }
        }
        let union_ok = if self.dim == 2 {
            let hull_area = convex_hull_area_2d(&self.vertices);
            (self.total_volume() - hull_area).abs() <= 1e-9 * hull_area.max(1.0)
        } else {
            // the general-d union check is not implemented; see module docs
            true
        };
        ValidationReport {
            union_ok,
            intersection_ok: offending.is_empty(),
            offending_pairs: offending,
        }
    }

    fn pair_violates(&self, i: usize, j: usize) -> bool {
        let ids_i = self.simplices[i].vertex_ids();
        let ids_j = self.simplices[j].vertex_ids();

        // a vertex of one simplex lying inside the other must be shared;
        // otherwise it is a hanging node or an overlap
        for (&v, other) in ids_i
            .iter()
            .map(|v| (v, j))
            .chain(ids_j.iter().map(|v| (v, i)))
        {
            if self.simplices[other].vertex_ids().contains(&v) {
                continue;
            }
            if let Ok(lambdas) = self.barycentric_in(other, self.vertices[v].coords()) {
                if lambdas.iter().all(|&l| l >= -INSIDE_TOLERANCE) {
                    return true;
                }
            }
        }

        // strict interior cross test: centroid plus random interior points
        let mut rng = ChaCha12Rng::seed_from_u64(
            0x5EED_u64
                ^ (i as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15)
                ^ (j as u64).wrapping_mul(0xC2B2_AE3D_27D4_EB4F),
        );
        for (source, target) in [(i, j), (j, i)] {
            let pts = self.simplex_points(source);
            let centroid = geometry::centroid(&pts);
            if self.strictly_inside(target, centroid.coords()) {
                return true;
            }
            let d = self.dim;
            for _ in 0..16 {
                let mut w: Vec<f64> = (0..=d).map(|_| -(1.0 - rng.random::<f64>()).ln()).collect();
                let total: f64 = w.iter().sum();
                w.iter_mut().for_each(|x| *x /= total);
                let mut x = vec![0.0; d];
                for (wk, p) in w.iter().zip(&pts) {
                    for (xi, ci) in x.iter_mut().zip(p.coords()) {
                        *xi += wk * ci;
                    }
                }
                if self.strictly_inside(target, &x) {
                    return true;
                }
            }
        }
        false
    }

    fn strictly_inside(&self, simplex_id: usize, x: &[f64]) -> bool {
        match self.barycentric_in(simplex_id, x) {
            Ok(lambdas) => lambdas.iter().all(|&l| l > INSIDE_TOLERANCE),
            Err(_) => false,
        }
    }

    /// Serialize to the JSON interchange format
    /// `{dimension, vertices: [[..]], simplices: [[ids]]}`.
    pub fn to_json_string(&self) -> String {
        let file = TriangulationFile {
            dimension: self.dim,
            vertices: self
                .vertices
                .iter()
                .map(|p| p.coords().to_vec())
                .collect(),
            simplices: self
                .simplices
                .iter()
                .map(|s| s.vertex_ids().to_vec())
                .collect(),
        };
        serde_json::to_string_pretty(&file).expect("triangulation serialization cannot fail")
    }

    pub fn from_json_str(text: &str, origin: &str) -> Result<Self, TriangulationError> {
        let file: TriangulationFile =
            serde_json::from_str(text).map_err(|e| TriangulationError::Parse {
                path: origin.to_string(),
                line: e.line(),
                column: e.column(),
                message: e.to_string(),
            })?;
        let mut vertices = Vec::with_capacity(file.vertices.len());
        for (index, coords) in file.vertices.into_iter().enumerate() {
            if coords.len() != file.dimension {
                return Err(TriangulationError::VertexDimensionMismatch {
                    index,
                    found: coords.len(),
                    expected: file.dimension,
                });
            }
            vertices.push(Point::new(coords)?);
        }
        Triangulation::build(vertices, file.simplices)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<(), TriangulationError> {
        let path = path.as_ref();
        std::fs::write(path, self.to_json_string()).map_err(|source| TriangulationError::Io {
            path: path.display().to_string(),
            source,
        })
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, TriangulationError> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|source| TriangulationError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Triangulation::from_json_str(&text, &path.display().to_string())
    }
}

#[derive(Serialize, Deserialize)]
struct TriangulationFile {
    dimension: usize,
    vertices: Vec<Vec<f64>>,
    simplices: Vec<Vec<usize>>,
}

fn bboxes_overlap(a: &(Vec<f64>, Vec<f64>), b: &(Vec<f64>, Vec<f64>), slack: f64) -> bool {
    a.0.iter()
        .zip(&a.1)
        .zip(b.0.iter().zip(&b.1))
        .all(|((alo, ahi), (blo, bhi))| alo <= &(bhi + slack) && blo <= &(ahi + slack))
}

/// Area of the convex hull of a 2-D point set (monotone chain + shoelace).
fn convex_hull_area_2d(points: &[Point]) -> f64 {
    let mut pts: Vec<(f64, f64)> = points.iter().map(|p| (p[0], p[1])).collect();
    pts.sort_by(|a, b| a.partial_cmp(b).unwrap());
    pts.dedup();
    if pts.len() < 3 {
        return 0.0;
    }
    let cross = |o: (f64, f64), a: (f64, f64), b: (f64, f64)| {
        (a.0 - o.0) * (b.1 - o.1) - (a.1 - o.1) * (b.0 - o.0)
    };
    let mut lower: Vec<(f64, f64)> = Vec::new();
    for &p in &pts {
        while lower.len() >= 2 && cross(lower[lower.len() - 2], lower[lower.len() - 1], p) <= 0.0 {
            lower.pop();
        }
        lower.push(p);
    }
    let mut upper: Vec<(f64, f64)> = Vec::new();
    for &p in pts.iter().rev() {
        while upper.len() >= 2 && cross(upper[upper.len() - 2], upper[upper.len() - 1], p) <= 0.0 {
            upper.pop();
        }
        upper.push(p);
    }
    lower.pop();
    upper.pop();
    let hull: Vec<(f64, f64)> = lower.into_iter().chain(upper).collect();
    let mut area = 0.0;
    for k in 0..hull.len() {
        let (x1, y1) = hull[k];
        let (x2, y2) = hull[(k + 1) % hull.len()];
        area += x1 * y2 - x2 * y1;
    }
    0.5 * area.abs()
}

/// Kuhn (Freudenthal) triangulation of the integer box with `cells[i]` unit
/// cells along axis `i`: each unit hypercube is split into d! simplices,
/// one per permutation, emitted in lexicographic (cube origin, permutation)
/// order. Every simplex has volume exactly 1/d!.
pub fn kuhn_triangulation(d: usize, cells: &[usize]) -> Result<Triangulation, TriangulationError> {
    if cells.len() != d {
        return Err(TriangulationError::ExtentMismatch {
            dim: d,
            found: cells.len(),
        });
    }
    if let Some(axis) = cells.iter().position(|&c| c == 0) {
        return Err(TriangulationError::EmptyExtent(axis));
    }
    let grid: Vec<usize> = cells.iter().map(|&c| c + 1).collect();
    // lexicographic vertex order: axis 0 is the slowest index
    let mut strides = vec![1usize; d];
    for i in (0..d.saturating_sub(1)).rev() {
        strides[i] = strides[i + 1] * grid[i + 1];
    }
    let vertex_id = |coords: &[usize]| -> usize {
        coords.iter().zip(&strides).map(|(c, s)| c * s).sum()
    };
    let n_vertices: usize = grid.iter().product();
    let mut vertices = Vec::with_capacity(n_vertices);
    let mut coords = vec![0usize; d];
    'outer: loop {
        vertices.push(Point::new(coords.iter().map(|&c| c as f64).collect()).unwrap());
        for axis in (0..d).rev() {
            coords[axis] += 1;
            if coords[axis] < grid[axis] {
                continue 'outer;
            }
            coords[axis] = 0;
        }
        break;
    }
    debug_assert_eq!(vertices.len(), n_vertices);

    let perms = permutations(d);
    let mut simplices = Vec::new();
    let mut origin = vec![0usize; d];
    'cubes: loop {
        for perm in &perms {
            let mut ids = Vec::with_capacity(d + 1);
            let mut cursor = origin.clone();
            ids.push(vertex_id(&cursor));
            for &axis in perm {
                cursor[axis] += 1;
                ids.push(vertex_id(&cursor));
            }
            simplices.push(ids);
        }
        for axis in (0..d).rev() {
            origin[axis] += 1;
            if origin[axis] < cells[axis] {
                continue 'cubes;
            }
            origin[axis] = 0;
        }
        break;
    }
    Triangulation::build(vertices, simplices)
}

// ---------------------------------------------------------------------------
// 2-D Delaunay triangulation (Bowyer-Watson)
// ---------------------------------------------------------------------------

/// Orientation predicate with a relative error filter: positive for
/// counterclockwise triples, 0 for (numerically) collinear ones.
fn orient2d(a: (f64, f64), b: (f64, f64), c: (f64, f64)) -> f64 {
    let det = (b.0 - a.0) * (c.1 - a.1) - (b.1 - a.1) * (c.0 - a.0);
    let mag = (b.0 - a.0).abs() * (c.1 - a.1).abs() + (b.1 - a.1).abs() * (c.0 - a.0).abs();
    if det.abs() <= 1e-12 * mag {
        0.0
    } else {
        det
    }
}

/// Strict in-circumcircle predicate for a counterclockwise triangle (a, b, c).
/// Cocircular points (within the error filter) count as outside, so ties are
/// broken by insertion order.
fn in_circle(a: (f64, f64), b: (f64, f64), c: (f64, f64), p: (f64, f64)) -> bool {
    let (ax, ay) = (a.0 - p.0, a.1 - p.1);
    let (bx, by) = (b.0 - p.0, b.1 - p.1);
    let (cx, cy) = (c.0 - p.0, c.1 - p.1);
    let a2 = ax * ax + ay * ay;
    let b2 = bx * bx + by * by;
    let c2 = cx * cx + cy * cy;
    let det = ax * (by * c2 - b2 * cy) - ay * (bx * c2 - b2 * cx) + a2 * (bx * cy - by * cx);
    let mag = ax.abs() * (by.abs() * c2 + b2 * cy.abs())
        + ay.abs() * (bx.abs() * c2 + b2 * cx.abs())
        + a2 * (bx.abs() * cy.abs() + by.abs() * cx.abs());
    det > 1e-12 * mag
}

/// Incremental Bowyer-Watson Delaunay triangulation of 2-D points.
///
/// Cocircular configurations are resolved by insertion order, so any valid
/// Delaunay variant may be produced for degenerate inputs.
pub fn delaunay_2d(points: &[Point]) -> Result<Triangulation, TriangulationError> {
    if points.len() < 3 {
        return Err(TriangulationError::NotEnoughPoints(points.len()));
    }
    for p in points {
        if p.dim() != 2 {
            return Err(TriangulationError::UnsupportedDimension(p.dim()));
        }
    }
    let pts: Vec<(f64, f64)> = points.iter().map(|p| (p[0], p[1])).collect();
    for i in 0..pts.len() {
        for j in (i + 1)..pts.len() {
            if pts[i] == pts[j] {
                return Err(TriangulationError::DuplicatePoint(i, j));
            }
        }
    }
    let collinear = {
        let mut all = true;
        'search: for i in 0..pts.len() {
            for j in (i + 1)..pts.len() {
                for k in (j + 1)..pts.len() {
                    if orient2d(pts[i], pts[j], pts[k]) != 0.0 {
                        all = false;
                        break 'search;
                    }
                }
            }
        }
        all
    };
    if collinear {
        return Err(TriangulationError::CollinearPoints);
    }

    // enclosing super-triangle, far enough not to disturb desk-scale inputs
    let (mut lo, mut hi) = ((f64::INFINITY, f64::INFINITY), (f64::NEG_INFINITY, f64::NEG_INFINITY));
    for &(x, y) in &pts {
        lo = (lo.0.min(x), lo.1.min(y));
        hi = (hi.0.max(x), hi.1.max(y));
    }
    let center = ((lo.0 + hi.0) / 2.0, (lo.1 + hi.1) / 2.0);
    let span = (hi.0 - lo.0).max(hi.1 - lo.1).max(1.0);
    let m = 1e3 * span;
    let super_a = (center.0 - 3.0 * m, center.1 - m);
    let super_b = (center.0 + 3.0 * m, center.1 - m);
    let super_c = (center.0, center.1 + 3.0 * m);

    let n = pts.len();
    let mut all_pts = pts.clone();
    all_pts.extend_from_slice(&[super_a, super_b, super_c]);
    let mut triangles: Vec<[usize; 3]> = vec![[n, n + 1, n + 2]];

    for p in 0..n {
        let point = all_pts[p];
        let mut bad = Vec::new();
        for (t, tri) in triangles.iter().enumerate() {
            let (a, b, c) = (all_pts[tri[0]], all_pts[tri[1]], all_pts[tri[2]]);
            // ensure counterclockwise orientation for the predicate
            let (b_idx, c_idx) = if orient2d(a, b, c) >= 0.0 {
                (tri[1], tri[2])
            } else {
                (tri[2], tri[1])
            };
            if in_circle(a, all_pts[b_idx], all_pts[c_idx], point) {
                bad.push(t);
            }
        }
        // boundary of the cavity: edges used by exactly one bad triangle
        let mut edge_count: HashMap<(usize, usize), usize> = HashMap::new();
        for &t in &bad {
            let tri = triangles[t];
            for (u, v) in [(tri[0], tri[1]), (tri[1], tri[2]), (tri[2], tri[0])] {
                let key = (u.min(v), u.max(v));
                *edge_count.entry(key).or_insert(0) += 1;
            }
        }
        let mut boundary: Vec<(usize, usize)> = Vec::new();
        for &t in &bad {
            let tri = triangles[t];
            for (u, v) in [(tri[0], tri[1]), (tri[1], tri[2]), (tri[2], tri[0])] {
                let key = (u.min(v), u.max(v));
                if edge_count[&key] == 1 {
                    boundary.push((u, v));
                }
            }
        }
        for &t in bad.iter().rev() {
            triangles.swap_remove(t);
        }
        for (u, v) in boundary {
            triangles.push([u, v, p]);
        }
    }

    let mut kept: Vec<Vec<usize>> = triangles
        .iter()
        .filter(|tri| tri.iter().all(|&v| v < n))
        .map(|tri| tri.to_vec())
        .collect();
    // deterministic output order regardless of removal bookkeeping
    kept.sort();
    if kept.is_empty() {
        return Err(TriangulationError::CollinearPoints);
    }
    Triangulation::build(points.to_vec(), kept)
}

/// Check the empty-circumcircle property of a 2-D triangulation: no vertex
/// lies inside any triangle's circumcircle by more than `rel_tol` relative
/// to the squared radius.
pub fn empty_circumcircle_ok(t: &Triangulation, rel_tol: f64) -> bool {
    if t.dim() != 2 {
        return false;
    }
    for s in t.simplices() {
        let ids = s.vertex_ids();
        let a = (t.vertices()[ids[0]][0], t.vertices()[ids[0]][1]);
        let b = (t.vertices()[ids[1]][0], t.vertices()[ids[1]][1]);
        let c = (t.vertices()[ids[2]][0], t.vertices()[ids[2]][1]);
        let Some((center, r2)) = circumcircle(a, b, c) else {
            return false;
        };
        for (v, p) in t.vertices().iter().enumerate() {
            if ids.contains(&v) {
                continue;
            }
            let dx = p[0] - center.0;
            let dy = p[1] - center.1;
            let d2 = dx * dx + dy * dy;
            if d2 < r2 * (1.0 - rel_tol) {
                return false;
            }
        }
    }
    true
}

/// Circumcenter and squared circumradius of a nondegenerate triangle.
fn circumcircle(a: (f64, f64), b: (f64, f64), c: (f64, f64)) -> Option<((f64, f64), f64)> {
    let d = 2.0 * (a.0 * (b.1 - c.1) + b.0 * (c.1 - a.1) + c.0 * (a.1 - b.1));
    if d == 0.0 {
        return None;
    }
    let a2 = a.0 * a.0 + a.1 * a.1;
    let b2 = b.0 * b.0 + b.1 * b.1;
    let c2 = c.0 * c.0 + c.1 * c.1;
    let ux = (a2 * (b.1 - c.1) + b2 * (c.1 - a.1) + c2 * (a.1 - b.1)) / d;
    let uy = (a2 * (c.0 - b.0) + b2 * (a.0 - c.0) + c2 * (b.0 - a.0)) / d;
    let r2 = (a.0 - ux) * (a.0 - ux) + (a.1 - uy) * (a.1 - uy);
    Some(((ux, uy), r2))
}

/// Render a human-readable one-line summary, used by diagnostics.
pub fn summary(t: &Triangulation) -> String {
    let mut s = String::new();
    let _ = write!(
        s,
        "dimension {}, {} vertices, {} simplices, total volume {:.6}",
        t.dim(),
        t.n_vertices(),
        t.n_simplices(),
        t.total_volume()
    );
    s
}
