//! Quadrature estimates of the measure near cover-ball boundaries.
//!
//! For a cover family at parameter `t`, the score of a point is the
//! largest tent value `max(0, 1 - |dist(x, center) - radius| / w)` over
//! all centers, where the tent half-width `w` is `rel_half_width * r1`,
//! a fixed fraction of the family's top radius. Integrating the score
//! against a measure estimates how much mass sits near the ball
//! boundaries; it shrinks to the boundary mass as the relative width
//! tends to zero. Estimates carry an explicit quadrature tolerance.

use serde::{Deserialize, Serialize};

use super::{circle_distance, CoverFamily, EncoderError, MetricSystem, Point};
use crate::par;

/// How quadrature nodes for the continuous part are drawn.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum QuadratureScheme {
    /// Midpoint rule on an equispaced grid; tolerance from the total
    /// variation of the score times the grid discrepancy.
    UniformGrid { nodes: usize },
    /// Birkhoff average along a rotation orbit; tolerance is a
    /// logarithmic equidistribution heuristic suited to rotation numbers
    /// with bounded continued-fraction digits.
    OrbitAverage { steps: usize },
}

/// Estimator configuration. `rel_half_width` is the tent half-width as a
/// fraction of the family's top radius; `budget` caps the number of
/// score evaluations.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundaryEstimatorConfig {
    pub rel_half_width: f64,
    pub scheme: QuadratureScheme,
    pub budget: usize,
}

impl BoundaryEstimatorConfig {
    pub fn grid(rel_half_width: f64, nodes: usize) -> Self {
        BoundaryEstimatorConfig {
            rel_half_width,
            scheme: QuadratureScheme::UniformGrid { nodes },
            budget: usize::MAX,
        }
    }

    pub fn orbit(rel_half_width: f64, steps: usize) -> Self {
        BoundaryEstimatorConfig {
            rel_half_width,
            scheme: QuadratureScheme::OrbitAverage { steps },
            budget: usize::MAX,
        }
    }
}

/// Probability measure on the circle, given as a quadrature recipe.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum CircleMeasure {
    /// Arc length.
    Lebesgue,
    /// Birkhoff sampling along the orbit of `base`; for an irrational
    /// rotation this approximates the unique invariant measure.
    Orbit { base: f64 },
    /// Convex mix of arc length and finitely many point masses at the
    /// given (position, weight) pairs.
    Synthetic {
        lebesgue_weight: f64,
        atoms: Vec<(f64, f64)>,
    },
}

/// Estimate together with its quadrature tolerance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PsiEstimate {
    pub value: f64,
    pub tolerance: f64,
}

/// Tent of height 1 centered at `radius` with half-width `w`, evaluated
/// at distance `s`. Pointwise nondecreasing in `w`, so estimates sharing
/// quadrature nodes are exactly monotone in the width.
pub fn tent(s: f64, radius: f64, w: f64) -> f64 {
    (1.0 - (s - radius).abs() / w).max(0.0)
}

/// Rate at which the estimate can change per unit of `t`, from the tent
/// slope times the radius growth. Used to certify suprema over parameter
/// intervals from finitely many probes.
pub fn lipschitz_in_t(fam: &CoverFamily, cfg: &BoundaryEstimatorConfig) -> f64 {
    (fam.r1 - fam.r0) / (cfg.rel_half_width * fam.r1)
}

struct CircleScore {
    centers: Vec<f64>,
    radius: f64,
    width: f64,
    /// When the centers are the canonical equispaced family and the tent
    /// support stays inside one spacing, only the two nearest centers
    /// can score; this enables O(1) evaluation.
    equispaced: bool,
}

impl CircleScore {
    fn new(fam: &CoverFamily, alpha: f64, t: f64, width: f64) -> Result<Self, EncoderError> {
        let mut centers = Vec::with_capacity(fam.centers.len());
        for c in &fam.centers {
            match c {
                Point::Circle(p) => centers.push(p.value(alpha)),
                Point::Symbolic(_) => {
                    return Err(EncoderError::KindMismatch(
                        "boundary estimation needs circle centers".into(),
                    ))
                }
            }
        }
        let m = centers.len();
        let radius = fam.radius_at(t);
        let equispaced = centers
            .iter()
            .enumerate()
            .all(|(j, &c)| c == j as f64 / m as f64)
            && radius + width < 1.0 / m as f64;
        Ok(CircleScore {
            centers,
            radius,
            width,
            equispaced,
        })
    }

    fn eval(&self, x: f64) -> f64 {
        if self.equispaced {
            let m = self.centers.len() as f64;
            let y = (x * m).fract();
            let left = tent(y / m, self.radius, self.width);
            let right = tent((1.0 - y) / m, self.radius, self.width);
            left.max(right)
        } else {
            self.centers
                .iter()
                .map(|&c| tent(circle_distance(x, c), self.radius, self.width))
                .fold(0.0, f64::max)
        }
    }
}

fn validate_synthetic(lebesgue_weight: f64, atoms: &[(f64, f64)]) -> Result<(), EncoderError> {
    if lebesgue_weight < 0.0 || atoms.iter().any(|&(_, w)| w < 0.0) {
        return Err(EncoderError::Config(
            "measure weights must be nonnegative".into(),
        ));
    }
    let total = lebesgue_weight + atoms.iter().map(|&(_, w)| w).sum::<f64>();
    if (total - 1.0).abs() > 1e-9 {
        return Err(EncoderError::Config(format!(
            "measure weights must sum to 1, got {total}"
        )));
    }
    Ok(())
}

/// Estimates the boundary score of `measure` at parameter `t` for the
/// given cover family. The continuous part is integrated by the
/// configured scheme with a deterministic chunked sum; point masses are
/// evaluated exactly and contribute no tolerance.
pub fn psi_estimate(
    sys: &MetricSystem,
    fam: &CoverFamily,
    measure: &CircleMeasure,
    t: f64,
    cfg: &BoundaryEstimatorConfig,
) -> Result<PsiEstimate, EncoderError> {
    let alpha = match sys {
        MetricSystem::CircleRotation { alpha } => *alpha,
        MetricSystem::Symbolic { .. } => {
            return Err(EncoderError::KindMismatch(
                "boundary estimation runs on circle systems".into(),
            ))
        }
    };
    if !(0.0..=1.0).contains(&t) {
        return Err(EncoderError::Config(format!(
            "cover parameter must lie in [0, 1], got {t}"
        )));
    }
    if !cfg.rel_half_width.is_finite() || cfg.rel_half_width <= 0.0 {
        return Err(EncoderError::Config(
            "tent half-width must be positive".into(),
        ));
    }
    let width = cfg.rel_half_width * fam.r1;
    let score = CircleScore::new(fam, alpha, t, width)?;
    let m = fam.centers.len() as f64;

    let (lebesgue_weight, atoms): (f64, &[(f64, f64)]) = match measure {
        CircleMeasure::Lebesgue => (1.0, &[]),
        CircleMeasure::Orbit { .. } => (1.0, &[]),
        CircleMeasure::Synthetic {
            lebesgue_weight,
            atoms,
        } => {
            validate_synthetic(*lebesgue_weight, atoms)?;
            (*lebesgue_weight, atoms.as_slice())
        }
    };

    let (node_count, node_at, node_tolerance): (usize, Box<dyn Fn(usize) -> f64 + Sync>, f64) =
        match (measure, cfg.scheme) {
            (CircleMeasure::Orbit { base }, QuadratureScheme::OrbitAverage { steps }) => {
                let base = *base;
                let n = steps.max(1);
                // Total variation of the score is at most 4 per center;
                // the log factor reflects orbit discrepancy for rotation
                // numbers with bounded continued-fraction digits.
                let tol = 4.0 * m * ((n as f64).ln() + 2.0) / n as f64;
                (
                    n,
                    Box::new(move |j| (base + j as f64 * alpha).rem_euclid(1.0)),
                    tol,
                )
            }
            (CircleMeasure::Orbit { .. }, QuadratureScheme::UniformGrid { .. }) => {
                return Err(EncoderError::Config(
                    "orbit measures require the orbit-averaging scheme".into(),
                ))
            }
            (_, QuadratureScheme::UniformGrid { nodes }) => {
                let n = nodes.max(1);
                let tol = 2.0 * m / n as f64;
                (
                    n,
                    Box::new(move |j| (j as f64 + 0.5) / n as f64),
                    tol,
                )
            }
            (_, QuadratureScheme::OrbitAverage { steps }) => {
                let n = steps.max(1);
                let tol = 4.0 * m * ((n as f64).ln() + 2.0) / n as f64;
                (
                    n,
                    Box::new(move |j| (j as f64 * alpha).rem_euclid(1.0)),
                    tol,
                )
            }
        };

    let needed = node_count + atoms.len();
    if needed > cfg.budget {
        return Err(EncoderError::QuadratureBudgetExceeded {
            needed,
            budget: cfg.budget,
        });
    }

    let mut value = 0.0;
    let mut tolerance = 0.0;
    if lebesgue_weight > 0.0 {
        let sum = par::sum_indexed(node_count, |j| score.eval(node_at(j)));
        value += lebesgue_weight * sum / node_count as f64;
        tolerance = lebesgue_weight * node_tolerance;
    }
    for &(pos, w) in atoms {
        value += w * score.eval(pos.rem_euclid(1.0));
    }
    Ok(PsiEstimate { value, tolerance })
}
