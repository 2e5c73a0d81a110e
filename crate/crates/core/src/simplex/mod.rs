//! Finite simplices, faces, affine vertex maps, and barycentric calculus.
//!
//! A [`FiniteSimplex`] is an affinely independent vertex list with one
//! opaque label per vertex. [`barycentric`] solves for the unique convex
//! weights of a point, [`Face`] selects vertex subsets, and
//! [`AffineMapOnSimplex`] represents an affine map by its vertex images.
//! Submodules provide the nearest-point retraction onto a face, the
//! disjointification of overlapping finite sets, and the staged gluing
//! construction with displacement certificates.

pub mod decompose;
pub mod glue;
pub mod retract;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Tolerance for rank and affine-hull residual tests.
pub const RANK_TOL: f64 = 1e-9;

/// Largest face size for which hull projections enumerate vertex subsets.
const MAX_HULL_VERTICES: usize = 16;

#[derive(Debug, Error, PartialEq)]
pub enum SimplexError {
    #[error("vertices are affinely dependent at tolerance 1e-9")]
    DegenerateVertices,
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("point lies off the affine hull (residual {residual:.3e})")]
    OutsideAffineHull { residual: f64 },
    #[error("point lies outside the simplex (coordinate {coordinate:.3e})")]
    OutsideSimplex { coordinate: f64 },
    #[error("vertex {vertex} sits {gap} from the face hull, beyond the bound")]
    NotDense { vertex: usize, gap: f64 },
    #[error("group {group} has image diameter {diameter} at stage {stage}, needs < {bound}")]
    GroupTooCoarse {
        stage: usize,
        group: usize,
        diameter: f64,
        bound: f64,
    },
    #[error("fresh face placement collides with existing points: {0}")]
    PlacementConflict(String),
    #[error("invalid simplex configuration: {0}")]
    Config(String),
}

/// Euclidean distance between coordinate slices of equal length.
pub fn point_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

/// Largest pairwise distance in a point family.
pub fn diameter<P: AsRef<[f64]>>(points: &[P]) -> f64 {
    let mut d = 0.0f64;
    for i in 0..points.len() {
        for j in i + 1..points.len() {
            d = d.max(point_distance(points[i].as_ref(), points[j].as_ref()));
        }
    }
    d
}

/// Affinely independent vertices with one opaque label per vertex.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FiniteSimplex {
    vertices: Vec<Vec<f64>>,
    labels: Vec<String>,
}

impl FiniteSimplex {
    pub fn new(vertices: Vec<Vec<f64>>, labels: Vec<String>) -> Result<Self, SimplexError> {
        if vertices.is_empty() {
            return Err(SimplexError::Config("simplex needs at least one vertex".into()));
        }
        if labels.len() != vertices.len() {
            return Err(SimplexError::Config(format!(
                "{} labels for {} vertices",
                labels.len(),
                vertices.len()
            )));
        }
        let dim = vertices[0].len();
        if dim == 0 {
            return Err(SimplexError::Config("ambient dimension must be positive".into()));
        }
        if vertices.iter().any(|v| v.len() != dim) {
            return Err(SimplexError::DimensionMismatch(
                "vertices have differing ambient dimensions".into(),
            ));
        }
        if vertices.iter().flatten().any(|c| !c.is_finite()) {
            return Err(SimplexError::Config("vertex coordinates must be finite".into()));
        }
        let n = vertices.len();
        if n >= 2 {
            if n - 1 > dim {
                return Err(SimplexError::DegenerateVertices);
            }
            let mut m = DMatrix::zeros(dim, n - 1);
            for (j, v) in vertices.iter().skip(1).enumerate() {
                for i in 0..dim {
                    m[(i, j)] = v[i] - vertices[0][i];
                }
            }
            if m.svd(false, false).rank(RANK_TOL) != n - 1 {
                return Err(SimplexError::DegenerateVertices);
            }
        }
        Ok(FiniteSimplex { vertices, labels })
    }

    /// Unlabeled construction; labels default to the vertex index.
    pub fn unlabeled(vertices: Vec<Vec<f64>>) -> Result<Self, SimplexError> {
        let labels = (0..vertices.len()).map(|i| format!("v{i}")).collect();
        FiniteSimplex::new(vertices, labels)
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn ambient_dim(&self) -> usize {
        self.vertices[0].len()
    }

    /// Simplex dimension, one less than the vertex count.
    pub fn dim(&self) -> usize {
        self.vertices.len() - 1
    }

    pub fn vertex(&self, i: usize) -> &[f64] {
        &self.vertices[i]
    }

    pub fn vertices(&self) -> &[Vec<f64>] {
        &self.vertices
    }

    pub fn label(&self, i: usize) -> &str {
        &self.labels[i]
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn diameter(&self) -> f64 {
        diameter(&self.vertices)
    }

    pub fn centroid(&self) -> Vec<f64> {
        let n = self.vertices.len() as f64;
        let mut c = vec![0.0; self.ambient_dim()];
        for v in &self.vertices {
            for (ci, vi) in c.iter_mut().zip(v) {
                *ci += vi / n;
            }
        }
        c
    }
}

/// Affine-hull coordinates of `p` with respect to the vertices: the
/// least-squares solution of the barycentric system together with its
/// residual. Coordinates may be negative; they sum to 1 when the
/// residual vanishes.
pub(crate) fn hull_coordinates(
    simplex: &FiniteSimplex,
    p: &[f64],
) -> Result<(Vec<f64>, f64), SimplexError> {
    let d = simplex.ambient_dim();
    if p.len() != d {
        return Err(SimplexError::DimensionMismatch(format!(
            "point has dimension {}, simplex ambient is {d}",
            p.len()
        )));
    }
    let n = simplex.vertex_count();
    let mut a = DMatrix::zeros(d + 1, n);
    for (j, v) in simplex.vertices.iter().enumerate() {
        for i in 0..d {
            a[(i, j)] = v[i];
        }
        a[(d, j)] = 1.0;
    }
    let mut rhs = DVector::zeros(d + 1);
    for i in 0..d {
        rhs[i] = p[i];
    }
    rhs[d] = 1.0;
    let svd = a.clone().svd(true, true);
    let coords = svd
        .solve(&rhs, 1e-13)
        .map_err(|e| SimplexError::Config(format!("barycentric solve failed: {e}")))?;
    let residual = (&a * &coords - &rhs).norm();
    Ok((coords.iter().copied().collect(), residual))
}

/// Barycentric coordinates of `p`: nonnegative, summing to 1, and
/// reproducing `p`. Fails when `p` leaves the affine hull (residual
/// above 1e-9) or the simplex (a coordinate below -1e-9).
pub fn barycentric(simplex: &FiniteSimplex, p: &[f64]) -> Result<Vec<f64>, SimplexError> {
    let (mut coords, residual) = hull_coordinates(simplex, p)?;
    if residual > RANK_TOL {
        return Err(SimplexError::OutsideAffineHull { residual });
    }
    if let Some(&worst) = coords
        .iter()
        .filter(|c| **c < -RANK_TOL)
        .min_by(|a, b| a.total_cmp(b))
    {
        return Err(SimplexError::OutsideSimplex { coordinate: worst });
    }
    for c in &mut coords {
        if *c < 0.0 {
            *c = 0.0;
        }
    }
    let sum: f64 = coords.iter().sum();
    for c in &mut coords {
        *c /= sum;
    }
    Ok(coords)
}

/// Nearest point of the convex hull of `points` to `target`, with the
/// distance. Enumerates vertex subsets and keeps affine projections
/// whose hull coordinates are admissible; the projection onto a convex
/// set is unique, so the minimum over subsets is the projection.
pub fn nearest_point_in_hull(
    points: &[Vec<f64>],
    target: &[f64],
) -> Result<(Vec<f64>, f64), SimplexError> {
    if points.is_empty() {
        return Err(SimplexError::Config("hull of no points".into()));
    }
    if points.len() > MAX_HULL_VERTICES {
        return Err(SimplexError::Config(format!(
            "hull projection supports up to {MAX_HULL_VERTICES} vertices, got {}",
            points.len()
        )));
    }
    let d = target.len();
    if points.iter().any(|p| p.len() != d) {
        return Err(SimplexError::DimensionMismatch(
            "hull points and target differ in dimension".into(),
        ));
    }
    let mut best: Option<(Vec<f64>, f64)> = None;
    for mask in 1u32..(1u32 << points.len()) {
        let subset: Vec<&Vec<f64>> = (0..points.len())
            .filter(|i| mask >> i & 1 == 1)
            .map(|i| &points[i])
            .collect();
        let candidate = if subset.len() == 1 {
            Some(subset[0].clone())
        } else {
            affine_projection(&subset, target)
        };
        if let Some(q) = candidate {
            let dist = point_distance(&q, target);
            if best.as_ref().is_none_or(|(_, b)| dist < *b) {
                best = Some((q, dist));
            }
        }
    }
    Ok(best.expect("singleton subsets always produce a candidate"))
}

/// Projects `target` onto the affine hull of `subset` and returns the
/// projection when its hull coordinates are all admissible (down to a
/// -1e-12 slack), i.e. when it lies in the convex hull of the subset.
fn affine_projection(subset: &[&Vec<f64>], target: &[f64]) -> Option<Vec<f64>> {
    let d = target.len();
    let m = subset.len();
    let mut b = DMatrix::zeros(d, m - 1);
    for (j, s) in subset.iter().skip(1).enumerate() {
        for i in 0..d {
            b[(i, j)] = s[i] - subset[0][i];
        }
    }
    let mut rhs = DVector::zeros(d);
    for i in 0..d {
        rhs[i] = target[i] - subset[0][i];
    }
    let y = b.clone().svd(true, true).solve(&rhs, 1e-13).ok()?;
    let head = 1.0 - y.iter().sum::<f64>();
    if head < -1e-12 || y.iter().any(|&c| c < -1e-12) {
        return None;
    }
    let mut q = subset[0].clone();
    for (j, s) in subset.iter().skip(1).enumerate() {
        for i in 0..d {
            q[i] += y[j] * (s[i] - subset[0][i]);
        }
    }
    Some(q)
}

/// Vertex-subset face of a simplex. Indices are kept sorted; the face of
/// a face composes back to a face of the original parent.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Face {
    parent: FiniteSimplex,
    indices: Vec<usize>,
}

impl Face {
    pub fn new(parent: &FiniteSimplex, indices: &[usize]) -> Result<Self, SimplexError> {
        if indices.is_empty() {
            return Err(SimplexError::Config("face needs at least one vertex".into()));
        }
        let mut sorted = indices.to_vec();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted.len() != indices.len() {
            return Err(SimplexError::Config("face indices repeat".into()));
        }
        if *sorted.last().unwrap() >= parent.vertex_count() {
            return Err(SimplexError::Config("face index out of range".into()));
        }
        Ok(Face {
            parent: parent.clone(),
            indices: sorted,
        })
    }

    pub fn parent(&self) -> &FiniteSimplex {
        &self.parent
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn contains(&self, vertex: usize) -> bool {
        self.indices.binary_search(&vertex).is_ok()
    }

    pub fn is_whole(&self) -> bool {
        self.indices.len() == self.parent.vertex_count()
    }

    /// The face as a simplex of its own, labels carried over.
    pub fn simplex(&self) -> FiniteSimplex {
        let vertices = self
            .indices
            .iter()
            .map(|&i| self.parent.vertex(i).to_vec())
            .collect();
        let labels = self
            .indices
            .iter()
            .map(|&i| self.parent.label(i).to_string())
            .collect();
        FiniteSimplex::new(vertices, labels)
            .expect("subsets of affinely independent vertices stay independent")
    }

    /// Composes with a face of this face's simplex, yielding a face of
    /// the original parent.
    pub fn compose(&self, inner: &Face) -> Result<Face, SimplexError> {
        if inner.parent != self.simplex() {
            return Err(SimplexError::Config(
                "inner face does not live on this face's simplex".into(),
            ));
        }
        let indices: Vec<usize> = inner.indices.iter().map(|&j| self.indices[j]).collect();
        Face::new(&self.parent, &indices)
    }
}

/// Affine map recorded by one image point per domain vertex; evaluation
/// extends affinely over the domain's hull.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AffineMapOnSimplex {
    domain: FiniteSimplex,
    images: Vec<Vec<f64>>,
}

impl AffineMapOnSimplex {
    pub fn new(domain: FiniteSimplex, images: Vec<Vec<f64>>) -> Result<Self, SimplexError> {
        if images.len() != domain.vertex_count() {
            return Err(SimplexError::Config(format!(
                "{} images for {} vertices",
                images.len(),
                domain.vertex_count()
            )));
        }
        let dim = images.first().map_or(0, |p| p.len());
        if dim == 0 || images.iter().any(|p| p.len() != dim) {
            return Err(SimplexError::DimensionMismatch(
                "image points have differing dimensions".into(),
            ));
        }
        Ok(AffineMapOnSimplex { domain, images })
    }

    pub fn identity(domain: FiniteSimplex) -> Self {
        let images = domain.vertices().to_vec();
        AffineMapOnSimplex { domain, images }
    }

    pub fn domain(&self) -> &FiniteSimplex {
        &self.domain
    }

    pub fn image(&self, i: usize) -> &[f64] {
        &self.images[i]
    }

    pub fn images(&self) -> &[Vec<f64>] {
        &self.images
    }

    pub fn image_dim(&self) -> usize {
        self.images[0].len()
    }

    /// Evaluates the affine extension at a hull point of the domain.
    pub fn apply(&self, p: &[f64]) -> Result<Vec<f64>, SimplexError> {
        let (coords, residual) = hull_coordinates(&self.domain, p)?;
        if residual > RANK_TOL {
            return Err(SimplexError::OutsideAffineHull { residual });
        }
        let mut q = vec![0.0; self.image_dim()];
        for (c, img) in coords.iter().zip(&self.images) {
            for (qi, xi) in q.iter_mut().zip(img) {
                *qi += c * xi;
            }
        }
        Ok(q)
    }

    /// Injectivity of the affine map, equivalent to affine independence
    /// of the image points.
    pub fn is_injective(&self) -> bool {
        FiniteSimplex::unlabeled(self.images.clone()).is_ok()
    }

    /// Largest vertex-image displacement against another map on the same
    /// domain.
    pub fn sup_vertex_displacement(&self, other: &AffineMapOnSimplex) -> Result<f64, SimplexError> {
        if self.images.len() != other.images.len() || self.image_dim() != other.image_dim() {
            return Err(SimplexError::DimensionMismatch(
                "maps have incompatible shapes".into(),
            ));
        }
        Ok(self
            .images
            .iter()
            .zip(&other.images)
            .map(|(a, b)| point_distance(a, b))
            .fold(0.0, f64::max))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn triangle() -> FiniteSimplex {
        FiniteSimplex::unlabeled(vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap()
    }

    #[test]
    fn centroid_has_equal_coordinates() {
        let k = triangle();
        let coords = barycentric(&k, &k.centroid()).unwrap();
        for c in coords {
            assert!((c - 1.0 / 3.0).abs() < 1e-12);
        }
    }

    #[test]
    fn vertices_get_unit_coordinates() {
        let k = triangle();
        for i in 0..3 {
            let coords = barycentric(&k, k.vertex(i)).unwrap();
            for (j, c) in coords.iter().enumerate() {
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((c - want).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn exterior_point_is_rejected() {
        let k = triangle();
        assert!(matches!(
            barycentric(&k, &[0.8, 0.8]),
            Err(SimplexError::OutsideSimplex { .. })
        ));
    }

    #[test]
    fn off_hull_point_is_rejected() {
        let k = FiniteSimplex::unlabeled(vec![
            vec![0.0, 0.0, 0.0],
            vec![1.0, 0.0, 0.0],
            vec![0.0, 1.0, 0.0],
        ])
        .unwrap();
        assert!(matches!(
            barycentric(&k, &[0.2, 0.2, 0.5]),
            Err(SimplexError::OutsideAffineHull { .. })
        ));
    }

    #[test]
    fn collinear_vertices_are_degenerate() {
        assert_eq!(
            FiniteSimplex::unlabeled(vec![
                vec![0.0, 0.0],
                vec![1.0, 1.0],
                vec![2.0, 2.0],
            ])
            .unwrap_err(),
            SimplexError::DegenerateVertices
        );
    }

    #[test]
    fn too_many_vertices_are_degenerate() {
        assert_eq!(
            FiniteSimplex::unlabeled(vec![
                vec![0.0, 0.0],
                vec![1.0, 0.0],
                vec![0.0, 1.0],
                vec![1.0, 1.0],
            ])
            .unwrap_err(),
            SimplexError::DegenerateVertices
        );
    }

    #[test]
    fn face_of_face_composes() {
        let k = triangle();
        let edge = Face::new(&k, &[0, 2]).unwrap();
        let tip = Face::new(&edge.simplex(), &[1]).unwrap();
        let composed = edge.compose(&tip).unwrap();
        assert_eq!(composed.indices(), &[2]);
        assert_eq!(composed.parent(), &k);
    }

    #[test]
    fn disjoint_faces_have_disjoint_hulls() {
        let k = FiniteSimplex::unlabeled(vec![
            vec![0.0, 0.0, 0.0],
            vec![1.0, 0.0, 0.0],
            vec![0.0, 1.0, 0.0],
            vec![0.0, 0.0, 1.0],
        ])
        .unwrap();
        let f1 = Face::new(&k, &[0, 1]).unwrap();
        let f2 = Face::new(&k, &[2, 3]).unwrap();
        let f2_points: Vec<Vec<f64>> = f2.indices().iter().map(|&i| k.vertex(i).to_vec()).collect();
        for &i in f1.indices() {
            let (_, gap) = nearest_point_in_hull(&f2_points, k.vertex(i)).unwrap();
            assert!(gap > 0.1);
        }
    }

    #[test]
    fn hull_projection_cases() {
        let segment = vec![vec![0.0, 0.0], vec![1.0, 0.0]];
        let (q, d) = nearest_point_in_hull(&segment, &[0.3, 1.0]).unwrap();
        assert!(point_distance(&q, &[0.3, 0.0]) < 1e-12);
        assert!((d - 1.0).abs() < 1e-12);

        let (q, d) = nearest_point_in_hull(&segment, &[2.0, 0.0]).unwrap();
        assert!(point_distance(&q, &[1.0, 0.0]) < 1e-12);
        assert!((d - 1.0).abs() < 1e-12);

        let tri = vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![0.0, 1.0]];
        let (q, d) = nearest_point_in_hull(&tri, &[0.2, 0.2]).unwrap();
        assert!(point_distance(&q, &[0.2, 0.2]) < 1e-12);
        assert!(d < 1e-12);
    }

    #[test]
    fn affine_map_applies_and_measures_displacement() {
        let k = triangle();
        let id = AffineMapOnSimplex::identity(k.clone());
        let shifted = AffineMapOnSimplex::new(
            k.clone(),
            k.vertices()
                .iter()
                .map(|v| vec![v[0] + 1.0, v[1]])
                .collect(),
        )
        .unwrap();
        assert_eq!(id.sup_vertex_displacement(&shifted).unwrap(), 1.0);
        let p = shifted.apply(&[0.25, 0.25]).unwrap();
        assert!(point_distance(&p, &[1.25, 0.25]) < 1e-12);
        assert!(shifted.is_injective());
    }

    #[test]
    fn collapsing_map_is_not_injective() {
        let k = triangle();
        let collapse =
            AffineMapOnSimplex::new(k, vec![vec![0.0, 0.0], vec![0.0, 0.0], vec![0.0, 1.0]])
                .unwrap();
        assert!(!collapse.is_injective());
    }
}
