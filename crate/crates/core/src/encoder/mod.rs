//! Metric systems, ball covers, partition labels, and array names.
//!
//! A [`MetricSystem`] is either an irrational circle rotation or a
//! subshift with the standard exponential metric. [`build_cover_family`]
//! produces a certified one-parameter family of ball covers whose radius
//! grows affinely in `t`; [`label`] codes a point by which balls contain
//! it; [`array_name`] stacks labels of an orbit segment level by level;
//! and [`recoverability_check`] reports the smallest scale at which the
//! names of sample points become pairwise distinct.

pub mod psi;
pub mod selector;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::symbolic::{Subshift, SymbolicError, Word};

/// Grid resolution used to certify that the shrunken balls still cover.
const COVER_GRID: usize = 4096;

/// Search horizon (in cylinder half-depth) when matching a requested
/// center count to a symbolic cylinder depth.
const MAX_CYLINDER_HALF_DEPTH: usize = 10;

/// Agreement horizon for distances between periodic symbolic points.
const SYMBOLIC_HORIZON: i64 = 64;

#[derive(Debug, Error, PartialEq)]
pub enum EncoderError {
    #[error("invalid encoder configuration: {0}")]
    Config(String),
    #[error("cover needs at least 2 balls, got {0}")]
    BadCenterCount(usize),
    #[error("no cylinder depth yields {requested} centers for this system")]
    CenterCountMismatch { requested: usize },
    #[error("cover certification failed: {0}")]
    CoverFailure(String),
    #[error("quadrature needs {needed} evaluations, budget is {budget}")]
    QuadratureBudgetExceeded { needed: usize, budget: usize },
    #[error("no admissible cylinder at stage {stage} for measure {index}")]
    NoSmallPiece { stage: usize, index: usize },
    #[error("incompatible point kinds: {0}")]
    KindMismatch(String),
    #[error(transparent)]
    Symbolic(#[from] SymbolicError),
}

/// Point on the unit circle, stored as a base position plus a step count
/// so that iterating the rotation never accumulates drift: the value is
/// always computed as one fused expression of (base, steps).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CirclePoint {
    pub base: f64,
    pub steps: i64,
}

impl CirclePoint {
    pub fn new(base: f64) -> Self {
        CirclePoint { base, steps: 0 }
    }

    /// Position in [0, 1) under rotation by `alpha`.
    pub fn value(&self, alpha: f64) -> f64 {
        (self.base + self.steps as f64 * alpha).rem_euclid(1.0)
    }
}

/// Periodic bi-infinite symbolic point: cell `i` reads the underlying
/// word at `(i + offset) mod len`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SymbolicPoint {
    word: Vec<u8>,
    offset: i64,
}

impl SymbolicPoint {
    pub fn new(word: Vec<u8>, offset: i64) -> Result<Self, EncoderError> {
        if word.is_empty() {
            return Err(EncoderError::Config("periodic word must be nonempty".into()));
        }
        Ok(SymbolicPoint { word, offset })
    }

    pub fn cell(&self, i: i64) -> u8 {
        let len = self.word.len() as i64;
        self.word[(i + self.offset).rem_euclid(len) as usize]
    }

    fn shifted(&self, j: i64) -> SymbolicPoint {
        SymbolicPoint {
            word: self.word.clone(),
            offset: self.offset + j,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Point {
    Circle(CirclePoint),
    Symbolic(SymbolicPoint),
}

/// Concrete metric system: phase space, invertible map, metric.
#[derive(Debug, Clone)]
pub enum MetricSystem {
    /// Rotation x -> x + alpha on the unit circle with arc metric;
    /// an isometry, aperiodic for irrational alpha.
    CircleRotation { alpha: f64 },
    /// Shift on a subshift with metric 2^(-min{|i| : x_i != y_i}); an
    /// isometry-like homeomorphism (Lipschitz constant 2 both ways).
    Symbolic { subshift: Subshift },
}

/// Arc distance on the unit circle.
pub fn circle_distance(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(1.0);
    d.min(1.0 - d)
}

impl MetricSystem {
    pub fn circle(alpha: f64) -> Result<Self, EncoderError> {
        if !alpha.is_finite() || alpha <= 0.0 || alpha >= 1.0 {
            return Err(EncoderError::Config(format!(
                "rotation parameter must lie in (0, 1), got {alpha}"
            )));
        }
        Ok(MetricSystem::CircleRotation { alpha })
    }

    /// Applies the map `j` times (negative `j` for the inverse).
    pub fn step(&self, p: &Point, j: i64) -> Result<Point, EncoderError> {
        match (self, p) {
            (MetricSystem::CircleRotation { .. }, Point::Circle(c)) => {
                Ok(Point::Circle(CirclePoint {
                    base: c.base,
                    steps: c.steps + j,
                }))
            }
            (MetricSystem::Symbolic { .. }, Point::Symbolic(s)) => {
                Ok(Point::Symbolic(s.shifted(j)))
            }
            _ => Err(EncoderError::KindMismatch(
                "point does not belong to this system".into(),
            )),
        }
    }

    pub fn distance(&self, p: &Point, q: &Point) -> Result<f64, EncoderError> {
        match (self, p, q) {
            (MetricSystem::CircleRotation { alpha }, Point::Circle(a), Point::Circle(b)) => {
                Ok(circle_distance(a.value(*alpha), b.value(*alpha)))
            }
            (MetricSystem::Symbolic { .. }, Point::Symbolic(a), Point::Symbolic(b)) => {
                for r in 0..=SYMBOLIC_HORIZON {
                    if a.cell(r) != b.cell(r) || a.cell(-r) != b.cell(-r) {
                        return Ok(0.5f64.powi(r as i32));
                    }
                }
                Ok(0.5f64.powi(SYMBOLIC_HORIZON as i32 + 1))
            }
            _ => Err(EncoderError::KindMismatch(
                "points do not belong to this system".into(),
            )),
        }
    }
}

/// One-parameter family of ball covers at a fixed level: the radius
/// interpolates from `r0` (already covering, certified) to `r1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoverFamily {
    pub level: usize,
    pub centers: Vec<Point>,
    pub r0: f64,
    pub r1: f64,
}

impl CoverFamily {
    /// Ball radius at parameter `t` in [0, 1].
    pub fn radius_at(&self, t: f64) -> f64 {
        self.r0 + t * (self.r1 - self.r0)
    }

    pub fn center_count(&self) -> usize {
        self.centers.len()
    }
}

/// Binary label of a point: bit `i` is 0 iff the point lies strictly
/// inside ball `i`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct PartitionLabel {
    pub bits: Vec<u8>,
}

/// Builds the level-`level` cover with `m` balls and the given covering
/// slack: `r1 = (1 + slack) * c`, `r0 = (1 + slack/2) * c` where `c` is
/// the covering radius of the canonical centers (equispaced points on the
/// circle, admissible cylinder words for a subshift). Covering at `r0` is
/// certified on a dense verification grid.
pub fn build_cover_family(
    sys: &MetricSystem,
    level: usize,
    m: usize,
    slack: f64,
) -> Result<CoverFamily, EncoderError> {
    if m < 2 {
        return Err(EncoderError::BadCenterCount(m));
    }
    if !(0.0..1.0).contains(&slack) || slack <= 0.0 {
        return Err(EncoderError::Config(format!(
            "covering slack must lie in (0, 1), got {slack}"
        )));
    }
    let (centers, covering_radius, grid) = match sys {
        MetricSystem::CircleRotation { .. } => {
            let centers: Vec<Point> = (0..m)
                .map(|j| Point::Circle(CirclePoint::new(j as f64 / m as f64)))
                .collect();
            let grid: Vec<Point> = (0..COVER_GRID)
                .map(|j| Point::Circle(CirclePoint::new((j as f64 + 0.5) / COVER_GRID as f64)))
                .collect();
            (centers, 1.0 / (2.0 * m as f64), grid)
        }
        MetricSystem::Symbolic { subshift } => {
            let mut found = None;
            for half in 0..=MAX_CYLINDER_HALF_DEPTH {
                let len = 2 * half + 1;
                let lang = subshift.language(len)?;
                if lang.len() == m {
                    found = Some((half, lang));
                    break;
                }
                if lang.len() > m {
                    break;
                }
            }
            let (half, lang) =
                found.ok_or(EncoderError::CenterCountMismatch { requested: m })?;
            let centers: Vec<Point> = lang
                .iter()
                .map(|w: &Word| {
                    Point::Symbolic(SymbolicPoint {
                        word: w.letters().to_vec(),
                        offset: half as i64,
                    })
                })
                .collect();
            let grid_words = subshift.language(2 * half + 3)?;
            let grid: Vec<Point> = grid_words
                .iter()
                .map(|w: &Word| {
                    Point::Symbolic(SymbolicPoint {
                        word: w.letters().to_vec(),
                        offset: (half + 1) as i64,
                    })
                })
                .collect();
            (centers, 0.5f64.powi(half as i32 + 1), grid)
        }
    };
    let r0 = covering_radius * (1.0 + slack / 2.0);
    let r1 = covering_radius * (1.0 + slack);
    for g in &grid {
        let mut covered = false;
        for c in &centers {
            if sys.distance(g, c)? < r0 {
                covered = true;
                break;
            }
        }
        if !covered {
            return Err(EncoderError::CoverFailure(format!(
                "grid point not within {r0} of any center at level {level}"
            )));
        }
    }
    Ok(CoverFamily {
        level,
        centers,
        r0,
        r1,
    })
}

/// Labels a point at parameter `t`: bit `i` is 0 iff the distance to
/// center `i` is strictly below the radius. The all-ones label would mean
/// the balls fail to cover, which a certified family rules out.
pub fn label(
    sys: &MetricSystem,
    fam: &CoverFamily,
    t: f64,
    x: &Point,
) -> Result<PartitionLabel, EncoderError> {
    if !(0.0..=1.0).contains(&t) {
        return Err(EncoderError::Config(format!(
            "cover parameter must lie in [0, 1], got {t}"
        )));
    }
    let r = fam.radius_at(t);
    let mut bits = Vec::with_capacity(fam.centers.len());
    for c in &fam.centers {
        bits.push(if sys.distance(x, c)? < r { 0 } else { 1 });
    }
    if bits.iter().all(|&b| b == 1) {
        return Err(EncoderError::CoverFailure(format!(
            "point outside every ball at level {} radius {r}",
            fam.level
        )));
    }
    Ok(PartitionLabel { bits })
}

/// Stack of labels along an orbit segment: row `k` (1-based) holds the
/// level-`k` labels of `T^j(x)` for `j` in `[-halfwidth, halfwidth]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArrayName {
    pub halfwidth: i64,
    pub rows: Vec<Vec<PartitionLabel>>,
}

impl ArrayName {
    pub fn depth(&self) -> usize {
        self.rows.len()
    }

    /// Label at (1-based row, signed column).
    pub fn cell(&self, row: usize, col: i64) -> &PartitionLabel {
        &self.rows[row - 1][(col + self.halfwidth) as usize]
    }

    /// Whether two names agree when truncated to `depth` rows and columns
    /// `[-halfwidth, halfwidth]`.
    pub fn agrees_with(&self, other: &ArrayName, depth: usize, halfwidth: i64) -> bool {
        (1..=depth).all(|k| {
            (-halfwidth..=halfwidth).all(|j| self.cell(k, j) == other.cell(k, j))
        })
    }
}

/// Computes the array name of `x` at parameter `t` over the first `depth`
/// levels of the schedule and the window `[-halfwidth, halfwidth]`.
pub fn array_name(
    sys: &MetricSystem,
    schedule: &[CoverFamily],
    t: f64,
    x: &Point,
    depth: usize,
    halfwidth: i64,
) -> Result<ArrayName, EncoderError> {
    if depth == 0 || depth > schedule.len() {
        return Err(EncoderError::Config(format!(
            "depth {depth} outside the schedule of {} levels",
            schedule.len()
        )));
    }
    if halfwidth < 0 {
        return Err(EncoderError::Config("halfwidth must be nonnegative".into()));
    }
    let mut rows = Vec::with_capacity(depth);
    for fam in &schedule[..depth] {
        let mut row = Vec::with_capacity(2 * halfwidth as usize + 1);
        for j in -halfwidth..=halfwidth {
            row.push(label(sys, fam, t, &sys.step(x, j)?)?);
        }
        rows.push(row);
    }
    Ok(ArrayName { halfwidth, rows })
}

/// Outcome of a name-separation scan.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RecoveryReport {
    /// Whether all sample points get distinct names at the full scale.
    pub separated: bool,
    /// Smallest (depth, halfwidth) separating all pairs, scanning depths
    /// outermost and halfwidths innermost.
    pub min_scale: Option<(usize, i64)>,
}

/// Checks whether array names separate the sample points, and at which
/// minimal scale within `depth` levels and `halfwidth` columns.
pub fn recoverability_check(
    sys: &MetricSystem,
    schedule: &[CoverFamily],
    t: f64,
    points: &[Point],
    depth: usize,
    halfwidth: i64,
) -> Result<RecoveryReport, EncoderError> {
    let names: Vec<ArrayName> = points
        .iter()
        .map(|p| array_name(sys, schedule, t, p, depth, halfwidth))
        .collect::<Result<_, _>>()?;
    for k in 1..=depth {
        for n in 0..=halfwidth {
            let mut all_distinct = true;
            'pairs: for i in 0..names.len() {
                for j in i + 1..names.len() {
                    if names[i].agrees_with(&names[j], k, n) {
                        all_distinct = false;
                        break 'pairs;
                    }
                }
            }
            if all_distinct {
                return Ok(RecoveryReport {
                    separated: true,
                    min_scale: Some((k, n)),
                });
            }
        }
    }
    Ok(RecoveryReport {
        separated: false,
        min_scale: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symbolic::Alphabet;

    const SILVER: f64 = std::f64::consts::SQRT_2 - 1.0;

    #[test]
    fn equispaced_cover_radii() {
        let sys = MetricSystem::circle(SILVER).unwrap();
        let fam = build_cover_family(&sys, 1, 4, 0.2).unwrap();
        assert_eq!(fam.r0, 0.1375);
        assert_eq!(fam.r1, 0.15);
        assert_eq!(fam.center_count(), 4);
    }

    #[test]
    fn single_ball_is_rejected() {
        let sys = MetricSystem::circle(SILVER).unwrap();
        assert_eq!(
            build_cover_family(&sys, 1, 1, 0.2).unwrap_err(),
            EncoderError::BadCenterCount(1)
        );
    }

    #[test]
    fn full_shift_cylinder_cover() {
        let sys = MetricSystem::Symbolic {
            subshift: Subshift::full_shift(Alphabet::binary()),
        };
        let fam = build_cover_family(&sys, 1, 2, 0.2).unwrap();
        assert_eq!(fam.r0, 0.5 * 1.1);
        assert_eq!(fam.r1, 0.5 * 1.2);
        let zeros = Point::Symbolic(SymbolicPoint::new(vec![0], 0).unwrap());
        let lab = label(&sys, &fam, 0.0, &zeros).unwrap();
        assert_eq!(lab.bits, vec![0, 1]);
    }

    #[test]
    fn label_frozen_distances() {
        let sys = MetricSystem::circle(SILVER).unwrap();
        let fam = build_cover_family(&sys, 1, 4, 0.2).unwrap();
        let x = Point::Circle(CirclePoint::new(0.5));
        // Radius at t = 1 is 0.15; distances to the four centers are
        // 0.5, 0.25, 0, 0.25.
        let lab = label(&sys, &fam, 1.0, &x).unwrap();
        assert_eq!(lab.bits, vec![1, 1, 0, 1]);
    }

    #[test]
    fn center_labels_itself_zero() {
        let sys = MetricSystem::circle(SILVER).unwrap();
        let fam = build_cover_family(&sys, 1, 4, 0.2).unwrap();
        let lab = label(&sys, &fam, 0.0, &fam.centers[1].clone()).unwrap();
        assert_eq!(lab.bits[1], 0);
    }

    #[test]
    fn exact_radius_distance_stays_outside() {
        let sys = MetricSystem::circle(SILVER).unwrap();
        let fam = build_cover_family(&sys, 1, 4, 0.2).unwrap();
        // Distance to center 0 is exactly r0 = 0.1375; strict comparison
        // keeps the bit at 1, while the neighboring ball still covers.
        let x = Point::Circle(CirclePoint::new(0.1375));
        let lab = label(&sys, &fam, 0.0, &x).unwrap();
        assert_eq!(lab.bits[0], 1);
        assert_eq!(lab.bits[1], 0);
    }

    #[test]
    fn uncovered_point_raises_failure() {
        let sys = MetricSystem::circle(SILVER).unwrap();
        let fam = CoverFamily {
            level: 1,
            centers: vec![
                Point::Circle(CirclePoint::new(0.0)),
                Point::Circle(CirclePoint::new(0.5)),
            ],
            r0: 0.01,
            r1: 0.02,
        };
        let x = Point::Circle(CirclePoint::new(0.25));
        assert!(matches!(
            label(&sys, &fam, 0.5, &x),
            Err(EncoderError::CoverFailure(_))
        ));
    }

    fn small_schedule(sys: &MetricSystem) -> Vec<CoverFamily> {
        (1..=3)
            .map(|k| build_cover_family(sys, k, 2usize.pow(k as u32), 0.2).unwrap())
            .collect()
    }

    #[test]
    fn names_shift_exactly_under_the_map() {
        let sys = MetricSystem::circle(SILVER).unwrap();
        let schedule = small_schedule(&sys);
        let x = Point::Circle(CirclePoint::new(0.123));
        let tx = sys.step(&x, 1).unwrap();
        let name_x = array_name(&sys, &schedule, 0.4, &x, 3, 8).unwrap();
        let name_tx = array_name(&sys, &schedule, 0.4, &tx, 3, 8).unwrap();
        for k in 1..=3 {
            for j in -8..8 {
                assert_eq!(name_tx.cell(k, j), name_x.cell(k, j + 1));
            }
        }
    }

    #[test]
    fn name_row_matches_direct_orbit_coding() {
        let sys = MetricSystem::circle(SILVER).unwrap();
        let schedule = small_schedule(&sys);
        let x = Point::Circle(CirclePoint::new(0.0));
        let t = 0.37;
        let name = array_name(&sys, &schedule, t, &x, 3, 6).unwrap();
        for (ki, fam) in schedule.iter().enumerate() {
            let m = fam.center_count() as f64;
            let r = fam.radius_at(t);
            for j in -6i64..=6 {
                let pos = (j as f64 * SILVER).rem_euclid(1.0);
                let expect: Vec<u8> = (0..fam.center_count())
                    .map(|c| {
                        let d = circle_distance(pos, c as f64 / m);
                        if d < r {
                            0
                        } else {
                            1
                        }
                    })
                    .collect();
                assert_eq!(name.cell(ki + 1, j).bits, expect);
            }
        }
    }

    #[test]
    fn distant_points_separate_at_the_first_scale() {
        let sys = MetricSystem::circle(SILVER).unwrap();
        let schedule = small_schedule(&sys);
        // Distance 0.5 > 2 * r1 at level 1 (0.3).
        let pts = vec![
            Point::Circle(CirclePoint::new(0.1)),
            Point::Circle(CirclePoint::new(0.6)),
        ];
        let report = recoverability_check(&sys, &schedule, 0.5, &pts, 3, 4).unwrap();
        assert!(report.separated);
        assert_eq!(report.min_scale, Some((1, 0)));
    }

    #[test]
    fn identical_points_never_separate() {
        let sys = MetricSystem::circle(SILVER).unwrap();
        let schedule = small_schedule(&sys);
        let pts = vec![
            Point::Circle(CirclePoint::new(0.25)),
            Point::Circle(CirclePoint::new(0.25)),
        ];
        let report = recoverability_check(&sys, &schedule, 0.5, &pts, 3, 4).unwrap();
        assert!(!report.separated);
        assert_eq!(report.min_scale, None);
    }

    #[test]
    fn point_and_image_separate_at_finite_scale() {
        let sys = MetricSystem::circle(SILVER).unwrap();
        let schedule = small_schedule(&sys);
        let x = Point::Circle(CirclePoint::new(0.0));
        let tx = sys.step(&x, 1).unwrap();
        let report = recoverability_check(&sys, &schedule, 0.5, &[x, tx], 3, 8).unwrap();
        assert!(report.separated);
    }

    #[test]
    fn depth_one_width_zero_is_a_single_label() {
        let sys = MetricSystem::circle(SILVER).unwrap();
        let schedule = small_schedule(&sys);
        let x = Point::Circle(CirclePoint::new(0.3));
        let name = array_name(&sys, &schedule, 0.2, &x, 1, 0).unwrap();
        assert_eq!(name.depth(), 1);
        assert_eq!(name.rows[0].len(), 1);
        assert_eq!(
            name.rows[0][0],
            label(&sys, &schedule[0], 0.2, &x).unwrap()
        );
    }
}
