//! Affine retraction of a simplex onto a nearby face.
//!
//! When every vertex sits within `eps` of the face's hull, the map that
//! fixes the face and sends each remaining vertex to its nearest hull
//! point extends affinely to a retraction moving no point of the simplex
//! further than `eps`: vertex displacements bound all displacements by
//! convexity of the norm.

use super::{
    nearest_point_in_hull, point_distance, AffineMapOnSimplex, Face, FiniteSimplex, SimplexError,
};

/// Builds the retraction onto `face` and certifies the vertex bound.
/// Face vertices are copied bit-exactly; others move to their nearest
/// point in the face's hull, failing with `NotDense` when the gap
/// exceeds `eps`.
pub fn retract(
    simplex: &FiniteSimplex,
    face: &Face,
    eps: f64,
) -> Result<AffineMapOnSimplex, SimplexError> {
    if face.parent() != simplex {
        return Err(SimplexError::Config(
            "face belongs to a different simplex".into(),
        ));
    }
    if !eps.is_finite() || eps <= 0.0 {
        return Err(SimplexError::Config(format!(
            "retraction bound must be positive, got {eps}"
        )));
    }
    let hull: Vec<Vec<f64>> = face
        .indices()
        .iter()
        .map(|&i| simplex.vertex(i).to_vec())
        .collect();
    let mut images = Vec::with_capacity(simplex.vertex_count());
    for v in 0..simplex.vertex_count() {
        if face.contains(v) {
            images.push(simplex.vertex(v).to_vec());
            continue;
        }
        let (q, gap) = nearest_point_in_hull(&hull, simplex.vertex(v))?;
        if gap > eps {
            return Err(SimplexError::NotDense { vertex: v, gap });
        }
        images.push(q);
    }
    AffineMapOnSimplex::new(simplex.clone(), images)
}

/// Largest vertex displacement of a retraction, for certificates.
pub fn retraction_displacement(simplex: &FiniteSimplex, map: &AffineMapOnSimplex) -> f64 {
    simplex
        .vertices()
        .iter()
        .zip(map.images())
        .map(|(v, q)| point_distance(v, q))
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn flat_triangle() -> FiniteSimplex {
        FiniteSimplex::unlabeled(vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![0.5, 0.05]]).unwrap()
    }

    #[test]
    fn apex_projects_to_the_base_edge() {
        let k = flat_triangle();
        let f = Face::new(&k, &[0, 1]).unwrap();
        let theta = retract(&k, &f, 0.1).unwrap();
        assert_eq!(theta.image(0), &[0.0, 0.0]);
        assert_eq!(theta.image(1), &[1.0, 0.0]);
        assert!(point_distance(theta.image(2), &[0.5, 0.0]) < 1e-12);
        let disp = retraction_displacement(&k, &theta);
        assert!((disp - 0.05).abs() < 1e-12);
    }

    #[test]
    fn whole_face_gives_the_identity() {
        let k = flat_triangle();
        let f = Face::new(&k, &[0, 1, 2]).unwrap();
        let theta = retract(&k, &f, 0.1).unwrap();
        for i in 0..3 {
            assert_eq!(theta.image(i), k.vertex(i));
        }
    }

    #[test]
    fn tall_apex_is_not_dense() {
        let k =
            FiniteSimplex::unlabeled(vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![0.5, 0.2]])
                .unwrap();
        let f = Face::new(&k, &[0, 1]).unwrap();
        match retract(&k, &f, 0.1).unwrap_err() {
            SimplexError::NotDense { vertex, gap } => {
                assert_eq!(vertex, 2);
                assert!((gap - 0.2).abs() < 1e-12);
            }
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn retraction_is_affine_on_segments() {
        let k = flat_triangle();
        let f = Face::new(&k, &[0, 1]).unwrap();
        let theta = retract(&k, &f, 0.1).unwrap();
        let pairs = [
            ([0.2, 0.01], [0.7, 0.02]),
            ([0.5, 0.05], [0.1, 0.0]),
            ([0.4, 0.02], [0.6, 0.03]),
        ];
        for (a, b) in pairs {
            for step in 0..=4 {
                let lam = step as f64 / 4.0;
                let mix: Vec<f64> = a
                    .iter()
                    .zip(&b)
                    .map(|(x, y)| lam * x + (1.0 - lam) * y)
                    .collect();
                let lhs = theta.apply(&mix).unwrap();
                let ta = theta.apply(&a).unwrap();
                let tb = theta.apply(&b).unwrap();
                let rhs: Vec<f64> = ta
                    .iter()
                    .zip(&tb)
                    .map(|(x, y)| lam * x + (1.0 - lam) * y)
                    .collect();
                assert!(point_distance(&lhs, &rhs) < 1e-9);
            }
        }
    }

    #[test]
    fn retraction_is_idempotent_on_the_face() {
        let k = flat_triangle();
        let f = Face::new(&k, &[0, 1]).unwrap();
        let theta = retract(&k, &f, 0.1).unwrap();
        for p in [[0.3, 0.01], [0.5, 0.04], [0.9, 0.003]] {
            let once = theta.apply(&p).unwrap();
            let twice = theta.apply(&once).unwrap();
            assert!(point_distance(&once, &twice) < 1e-9);
        }
    }

    #[test]
    fn interior_displacement_stays_under_the_bound() {
        let k = flat_triangle();
        let f = Face::new(&k, &[0, 1]).unwrap();
        let theta = retract(&k, &f, 0.1).unwrap();
        for p in [[0.25, 0.012], [0.5, 0.05], [0.62, 0.02], [0.1, 0.004]] {
            let q = theta.apply(&p).unwrap();
            assert!(point_distance(&p, &q) <= 0.1 + 1e-12);
        }
    }
}
