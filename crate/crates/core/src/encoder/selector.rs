//! Staged selection of cover parameters with small boundary mass.
//!
//! Given a finite list of measures and a schedule of cover families, the
//! selector refines a tree of (measure set, parameter cylinder) pieces:
//! stage 1 pairs all measures with the full ternary parameter set, and
//! each later stage shrinks both sides so that piece diameters halve and
//! the certified boundary-mass bound halves, for every level up to the
//! stage number. The surviving addresses give, per measure, a parameter
//! whose cover boundaries carry (certifiably) little mass.
//!
//! Parameters live in the middle-thirds set inside [0, 1]: a cylinder is
//! a binary address where bit 0 picks the left third and bit 1 the right
//! third. Searches scan addresses left to right at the shallowest
//! admissible depth, so reported addresses are leftmost.

use serde::{Deserialize, Serialize};

use super::psi::{lipschitz_in_t, psi_estimate, BoundaryEstimatorConfig, CircleMeasure};
use super::{CoverFamily, EncoderError, MetricSystem};

/// Cylinder of the middle-thirds set: bit 0 keeps the left third of the
/// current interval, bit 1 the right third.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CantorCylinder {
    bits: Vec<u8>,
}

impl CantorCylinder {
    pub fn root() -> Self {
        CantorCylinder { bits: Vec::new() }
    }

    pub fn from_bits(bits: Vec<u8>) -> Result<Self, EncoderError> {
        if bits.iter().any(|&b| b > 1) {
            return Err(EncoderError::Config("cylinder bits must be 0 or 1".into()));
        }
        Ok(CantorCylinder { bits })
    }

    pub fn bits(&self) -> &[u8] {
        &self.bits
    }

    pub fn depth(&self) -> usize {
        self.bits.len()
    }

    pub fn child(&self, bit: u8) -> Self {
        let mut bits = self.bits.clone();
        bits.push(bit & 1);
        CantorCylinder { bits }
    }

    /// Enclosing interval [lo, lo + 3^-depth] in [0, 1].
    pub fn interval(&self) -> (f64, f64) {
        let mut lo = 0.0;
        let mut width = 1.0;
        for &b in &self.bits {
            width /= 3.0;
            if b == 1 {
                lo += 2.0 * width;
            }
        }
        (lo, lo + width)
    }

    pub fn leftmost(&self) -> f64 {
        self.interval().0
    }

    pub fn diameter(&self) -> f64 {
        3.0f64.powi(-(self.bits.len() as i32))
    }

    pub fn refines(&self, other: &CantorCylinder) -> bool {
        self.bits.len() >= other.bits.len() && self.bits[..other.bits.len()] == other.bits[..]
    }
}

/// Certified upper bound for the boundary estimate of one cover level
/// over a whole parameter cylinder, from finitely many probes plus the
/// Lipschitz slack of the probe spacing.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PsiCertificate {
    pub level: usize,
    pub sup_bound: f64,
    pub tolerance: f64,
}

/// One (measure set, parameter cylinder) node of the refinement tree.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelectorPiece {
    pub indices: Vec<usize>,
    pub cylinder: CantorCylinder,
    pub parent: Option<usize>,
    pub certificates: Vec<PsiCertificate>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelectorStage {
    pub stage: usize,
    pub pieces: Vec<SelectorPiece>,
}

/// Full refinement tree plus the selected address and parameter value
/// for every measure.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelectorTable {
    pub stages: Vec<SelectorStage>,
    pub addresses: Vec<CantorCylinder>,
    pub t_values: Vec<f64>,
}

impl SelectorTable {
    pub fn address(&self, measure: usize) -> &CantorCylinder {
        &self.addresses[measure]
    }

    pub fn t_value(&self, measure: usize) -> f64 {
        self.t_values[measure]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SelectorConfig {
    pub estimator: BoundaryEstimatorConfig,
    /// Probes per cylinder when certifying a supremum.
    pub probes: usize,
    /// How far past the diameter-required depth to keep subdividing
    /// before giving up on a stage.
    pub max_extra_depth: usize,
}

impl SelectorConfig {
    pub fn new(estimator: BoundaryEstimatorConfig) -> Self {
        SelectorConfig {
            estimator,
            probes: 17,
            max_extra_depth: 6,
        }
    }
}

/// Piece-size target at stage `n`.
fn stage_threshold(n: usize) -> f64 {
    0.5f64.powi(n as i32 - 1)
}

/// Smallest cylinder depth whose diameter is at most the stage target,
/// i.e. the least m with 3^m >= 2^(n-1).
fn required_depth(n: usize) -> usize {
    let target: u128 = 1u128 << (n - 1);
    let mut m = 0;
    let mut p3: u128 = 1;
    while p3 < target {
        p3 *= 3;
        m += 1;
    }
    m
}

/// Bounds the estimate over a cylinder by probing equispaced parameters
/// and adding the Lipschitz slack of half the probe spacing. The bound
/// is clamped at 1, the a-priori maximum of the score.
fn certify_sup(
    sys: &MetricSystem,
    fam: &CoverFamily,
    measure: &CircleMeasure,
    cylinder: &CantorCylinder,
    cfg: &SelectorConfig,
) -> Result<PsiCertificate, EncoderError> {
    let (lo, hi) = cylinder.interval();
    let probes = cfg.probes.max(2);
    let spacing = (hi - lo) / (probes - 1) as f64;
    let mut max_value = 0.0f64;
    let mut tolerance = 0.0f64;
    for j in 0..probes {
        let t = lo + spacing * j as f64;
        let est = psi_estimate(sys, fam, measure, t.min(1.0), &cfg.estimator)?;
        max_value = max_value.max(est.value);
        tolerance = tolerance.max(est.tolerance);
    }
    let slack = lipschitz_in_t(fam, &cfg.estimator) * spacing / 2.0;
    Ok(PsiCertificate {
        level: fam.level,
        sup_bound: (max_value + slack).min(1.0),
        tolerance,
    })
}

fn certify_all_levels(
    sys: &MetricSystem,
    schedule: &[CoverFamily],
    measure: &CircleMeasure,
    cylinder: &CantorCylinder,
    stage: usize,
    cfg: &SelectorConfig,
) -> Result<Option<Vec<PsiCertificate>>, EncoderError> {
    let threshold = stage_threshold(stage);
    let mut certs = Vec::with_capacity(stage);
    for fam in &schedule[..stage] {
        let cert = certify_sup(sys, fam, measure, cylinder, cfg)?;
        if cert.sup_bound > threshold + cert.tolerance {
            return Ok(None);
        }
        certs.push(cert);
    }
    Ok(Some(certs))
}

#[allow(clippy::too_many_arguments)]
fn refine_for_measure(
    sys: &MetricSystem,
    schedule: &[CoverFamily],
    measure: &CircleMeasure,
    index: usize,
    stage: usize,
    parent: &SelectorPiece,
    parent_pos: usize,
    cfg: &SelectorConfig,
) -> Result<SelectorPiece, EncoderError> {
    let base_depth = required_depth(stage).max(parent.cylinder.depth());
    for extra in 0..=cfg.max_extra_depth {
        let delta = base_depth + extra - parent.cylinder.depth();
        if delta >= 24 {
            break;
        }
        for code in 0u64..(1u64 << delta) {
            let mut cylinder = parent.cylinder.clone();
            for b in 0..delta {
                cylinder = cylinder.child(((code >> (delta - 1 - b)) & 1) as u8);
            }
            if let Some(certificates) =
                certify_all_levels(sys, schedule, measure, &cylinder, stage, cfg)?
            {
                return Ok(SelectorPiece {
                    indices: vec![index],
                    cylinder,
                    parent: Some(parent_pos),
                    certificates,
                });
            }
        }
    }
    Err(EncoderError::NoSmallPiece { stage, index })
}

/// Builds the refinement tree down to stage `n_max` and reads off one
/// address per measure. Deterministic: addresses are the leftmost
/// admissible ones at the shallowest admissible depth.
pub fn selector_build(
    sys: &MetricSystem,
    schedule: &[CoverFamily],
    measures: &[CircleMeasure],
    n_max: usize,
    cfg: &SelectorConfig,
) -> Result<SelectorTable, EncoderError> {
    if measures.is_empty() {
        return Err(EncoderError::Config("no measures to select for".into()));
    }
    if n_max == 0 {
        return Err(EncoderError::Config("n_max must be at least 1".into()));
    }
    if schedule.len() < n_max {
        return Err(EncoderError::Config(format!(
            "schedule has {} levels, need {}",
            schedule.len(),
            n_max
        )));
    }

    let root = CantorCylinder::root();
    let mut base_certs: Vec<PsiCertificate> = Vec::new();
    for measure in measures {
        let cert = certify_sup(sys, &schedule[0], measure, &root, cfg)?;
        match base_certs.first_mut() {
            None => base_certs.push(cert),
            Some(merged) => {
                merged.sup_bound = merged.sup_bound.max(cert.sup_bound);
                merged.tolerance = merged.tolerance.max(cert.tolerance);
            }
        }
    }
    let mut stages = vec![SelectorStage {
        stage: 1,
        pieces: vec![SelectorPiece {
            indices: (0..measures.len()).collect(),
            cylinder: root,
            parent: None,
            certificates: base_certs,
        }],
    }];

    for stage in 2..=n_max {
        let prev = &stages[stage - 2];
        let mut pieces = Vec::new();
        for (parent_pos, parent) in prev.pieces.iter().enumerate() {
            for &index in &parent.indices {
                pieces.push(refine_for_measure(
                    sys,
                    schedule,
                    &measures[index],
                    index,
                    stage,
                    parent,
                    parent_pos,
                    cfg,
                )?);
            }
        }
        stages.push(SelectorStage { stage, pieces });
    }

    let mut addresses = vec![CantorCylinder::root(); measures.len()];
    for piece in &stages[n_max - 1].pieces {
        for &index in &piece.indices {
            addresses[index] = piece.cylinder.clone();
        }
    }
    let t_values = addresses.iter().map(|c| c.leftmost()).collect();
    Ok(SelectorTable {
        stages,
        addresses,
        t_values,
    })
}

/// Re-verifies a selector table from its own records: base stage shape,
/// per-stage nesting and partitioning of the measure indices, diameter
/// decay of both the index sets and the parameter cylinders, certified
/// smallness at every level up to each stage, and address consistency.
pub fn check_selector_table(table: &SelectorTable, measure_count: usize) -> Result<(), String> {
    if table.stages.is_empty() {
        return Err("table has no stages".into());
    }
    for (pos, stage) in table.stages.iter().enumerate() {
        if stage.stage != pos + 1 {
            return Err(format!(
                "stage {} recorded at position {}",
                stage.stage,
                pos + 1
            ));
        }
    }

    let base = &table.stages[0];
    if base.pieces.len() != 1 {
        return Err(format!("stage 1 has {} pieces, want 1", base.pieces.len()));
    }
    let all: Vec<usize> = (0..measure_count).collect();
    if base.pieces[0].indices != all {
        return Err("stage 1 must pair every measure with the full set".into());
    }
    if base.pieces[0].cylinder.depth() != 0 {
        return Err("stage 1 cylinder must be the full parameter set".into());
    }

    for window in table.stages.windows(2) {
        let (prev, cur) = (&window[0], &window[1]);
        let n = cur.stage;
        let mut seen: Vec<usize> = Vec::new();
        for piece in &cur.pieces {
            let parent = piece
                .parent
                .and_then(|p| prev.pieces.get(p))
                .ok_or_else(|| format!("stage {n} piece lacks a valid parent"))?;
            if piece.indices.len() != 1 {
                return Err(format!("stage {n} pieces must be single measures"));
            }
            if !parent.indices.contains(&piece.indices[0]) {
                return Err(format!("stage {n} piece escapes its parent's measures"));
            }
            if !piece.cylinder.refines(&parent.cylinder) {
                return Err(format!("stage {n} cylinder escapes its parent"));
            }
            if piece.cylinder.diameter() > stage_threshold(n) + 1e-12 {
                return Err(format!("stage {n} cylinder too wide"));
            }
            if piece.certificates.len() != n {
                return Err(format!(
                    "stage {n} piece certifies {} levels, want {n}",
                    piece.certificates.len()
                ));
            }
            for (k, cert) in piece.certificates.iter().enumerate() {
                if cert.level != k + 1 {
                    return Err(format!("stage {n} certificate out of order"));
                }
                if cert.sup_bound > stage_threshold(n) + cert.tolerance + 1e-12 {
                    return Err(format!(
                        "stage {n} level {} bound {} exceeds {} + {}",
                        cert.level,
                        cert.sup_bound,
                        stage_threshold(n),
                        cert.tolerance
                    ));
                }
            }
            seen.extend(&piece.indices);
        }
        let mut expected: Vec<usize> = prev.pieces.iter().flat_map(|p| p.indices.clone()).collect();
        expected.sort_unstable();
        seen.sort_unstable();
        if seen != expected {
            return Err(format!("stage {n} does not partition the measures"));
        }
    }

    if table.addresses.len() != measure_count || table.t_values.len() != measure_count {
        return Err("address table size mismatch".into());
    }
    let last = table.stages.last().unwrap();
    for piece in &last.pieces {
        for &index in &piece.indices {
            if table.addresses[index] != piece.cylinder {
                return Err(format!("address of measure {index} mismatches its piece"));
            }
        }
    }
    for (cyl, &t) in table.addresses.iter().zip(&table.t_values) {
        if t != cyl.leftmost() {
            return Err("parameter value must be the leftmost point".into());
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::encoder::build_cover_family;

    const SILVER: f64 = std::f64::consts::SQRT_2 - 1.0;

    fn schedule(sys: &MetricSystem, levels: usize) -> Vec<CoverFamily> {
        (1..=levels)
            .map(|k| build_cover_family(sys, k, 1 << k, 0.2).unwrap())
            .collect()
    }

    fn config() -> SelectorConfig {
        SelectorConfig::new(BoundaryEstimatorConfig::grid(0.01, 2048))
    }

    #[test]
    fn cylinder_arithmetic() {
        let root = CantorCylinder::root();
        assert_eq!(root.interval(), (0.0, 1.0));
        let left = root.child(0);
        let right = root.child(1);
        assert_eq!(left.interval(), (0.0, 1.0 / 3.0));
        assert_eq!(right.interval().0, 2.0 / 3.0);
        assert!(left.child(1).refines(&left));
        assert!(!left.refines(&right));
        assert_eq!(left.child(1).diameter(), 1.0 / 9.0);
    }

    #[test]
    fn depth_keeps_diameter_within_target() {
        for n in 1..=12 {
            let m = required_depth(n);
            assert!(3.0f64.powi(-(m as i32)) <= stage_threshold(n) + 1e-12);
            if m > 0 {
                assert!(3.0f64.powi(-(m as i32 - 1)) > stage_threshold(n));
            }
        }
    }

    #[test]
    fn single_stage_table_is_trivial() {
        let sys = MetricSystem::circle(SILVER).unwrap();
        let sched = schedule(&sys, 1);
        let table =
            selector_build(&sys, &sched, &[CircleMeasure::Lebesgue], 1, &config()).unwrap();
        assert_eq!(table.stages.len(), 1);
        assert_eq!(table.addresses[0], CantorCylinder::root());
        assert_eq!(table.t_values[0], 0.0);
        check_selector_table(&table, 1).unwrap();
    }

    #[test]
    fn diffuse_measure_takes_the_leftmost_address() {
        let sys = MetricSystem::circle(SILVER).unwrap();
        let sched = schedule(&sys, 4);
        let table =
            selector_build(&sys, &sched, &[CircleMeasure::Lebesgue], 4, &config()).unwrap();
        check_selector_table(&table, 1).unwrap();
        assert_eq!(table.addresses[0].bits(), &[0, 0]);
        assert_eq!(table.t_values[0], 0.0);
    }

    #[test]
    fn atom_on_a_boundary_forces_the_address_away() {
        let sys = MetricSystem::circle(SILVER).unwrap();
        let sched = schedule(&sys, 4);
        // Distance from the atom to the level-2 center at 0 equals the
        // radius at t = 0.1, so parameters near 0.1 see mass 0.8 on a
        // ball boundary and the whole left third is rejected.
        let bad_t = 0.1;
        let rho = sched[1].radius_at(bad_t);
        let measure = CircleMeasure::Synthetic {
            lebesgue_weight: 0.2,
            atoms: vec![(rho, 0.8)],
        };
        let table = selector_build(&sys, &sched, std::slice::from_ref(&measure), 4, &config()).unwrap();
        check_selector_table(&table, 1).unwrap();
        assert_eq!(table.addresses[0].bits(), &[1, 0]);
        let t = table.t_values[0];
        assert!((t - bad_t).abs() > 0.5);
        let est = psi_estimate(&sys, &sched[1], &measure, t, &config().estimator).unwrap();
        assert!(est.value <= stage_threshold(4));
    }

    #[test]
    fn two_measures_get_independent_addresses() {
        let sys = MetricSystem::circle(SILVER).unwrap();
        let sched = schedule(&sys, 3);
        let rho = sched[1].radius_at(0.1);
        let spiky = CircleMeasure::Synthetic {
            lebesgue_weight: 0.2,
            atoms: vec![(rho, 0.8)],
        };
        let table = selector_build(
            &sys,
            &sched,
            &[CircleMeasure::Lebesgue, spiky],
            3,
            &config(),
        )
        .unwrap();
        check_selector_table(&table, 2).unwrap();
        assert_eq!(table.addresses[0].bits()[0], 0);
        assert_eq!(table.addresses[1].bits()[0], 1);
    }

    #[test]
    fn blanket_atom_leaves_no_small_piece() {
        let sys = MetricSystem::circle(SILVER).unwrap();
        let sched = schedule(&sys, 2);
        let rho = sched[1].radius_at(0.5);
        let measure = CircleMeasure::Synthetic {
            lebesgue_weight: 0.0,
            atoms: vec![(rho, 1.0)],
        };
        // A tent half-width of half the top radius smears the atom's
        // boundary hit across every parameter in [0, 1].
        let mut cfg = config();
        cfg.estimator = BoundaryEstimatorConfig::grid(0.5, 512);
        cfg.max_extra_depth = 2;
        assert_eq!(
            selector_build(&sys, &sched, &[measure], 2, &cfg).unwrap_err(),
            EncoderError::NoSmallPiece { stage: 2, index: 0 }
        );
    }

    #[test]
    fn checker_flags_tampered_tables() {
        let sys = MetricSystem::circle(SILVER).unwrap();
        let sched = schedule(&sys, 3);
        let table =
            selector_build(&sys, &sched, &[CircleMeasure::Lebesgue], 3, &config()).unwrap();
        check_selector_table(&table, 1).unwrap();

        let mut loose = table.clone();
        loose.stages[2].pieces[0].certificates[1].sup_bound = 0.9;
        assert!(check_selector_table(&loose, 1).is_err());

        let mut escaped = table.clone();
        escaped.stages[2].pieces[0].cylinder = CantorCylinder::from_bits(vec![1, 1]).unwrap();
        assert!(check_selector_table(&escaped, 1).is_err());

        let mut dropped = table.clone();
        dropped.stages[2].pieces.clear();
        assert!(check_selector_table(&dropped, 1).is_err());

        let mut shifted = table;
        shifted.t_values[0] += 0.01;
        assert!(check_selector_table(&shifted, 1).is_err());
    }
}
