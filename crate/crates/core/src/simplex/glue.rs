//! Staged gluing of a labeled simplex into reserved coordinate slabs.
//!
//! Each stage blends the current map toward the identity, retracts every
//! image onto the hull of the processed vertices, and relocates the
//! newly processed groups onto fresh faces in a coordinate slab reserved
//! for that stage. Earlier-processed vertices keep their images
//! bit-exactly, each stage moves no vertex image further than four times
//! its tolerance, and the schedule's summability yields a Cauchy
//! certificate for the stage maps.
//!
//! The blend coefficient is the stage tolerance divided by one plus the
//! spread of all current points; any coefficient that small works, and
//! this explicit choice is recorded in the state. How many groups a
//! stage processes is driven by density: the processed hull must come
//! within the stage tolerance of every blended image, which always
//! terminates because processing everything leaves nothing to retract.

use serde::{Deserialize, Serialize};

use super::{
    diameter, nearest_point_in_hull, point_distance, AffineMapOnSimplex, FiniteSimplex,
    SimplexError,
};

/// Guard for strict displacement comparisons.
const STRICT_GUARD: f64 = 1e-12;

/// Stage tolerances.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum EpsSchedule {
    /// eps_k = base^k with 0 < base < 1; tails sum in closed form.
    Geometric { base: f64 },
    /// Finitely many listed tolerances.
    Explicit { values: Vec<f64> },
}

impl EpsSchedule {
    pub fn geometric(base: f64) -> Result<Self, SimplexError> {
        if !(base > 0.0 && base < 1.0) {
            return Err(SimplexError::Config(format!(
                "geometric base must lie in (0, 1), got {base}"
            )));
        }
        Ok(EpsSchedule::Geometric { base })
    }

    pub fn explicit(values: Vec<f64>) -> Result<Self, SimplexError> {
        if values.iter().any(|&e| !e.is_finite() || e <= 0.0) {
            return Err(SimplexError::Config(
                "explicit tolerances must be positive".into(),
            ));
        }
        Ok(EpsSchedule::Explicit { values })
    }

    /// Tolerance of the 1-based stage `k`.
    pub fn value(&self, stage: usize) -> Result<f64, SimplexError> {
        match self {
            EpsSchedule::Geometric { base } => Ok(base.powi(stage as i32)),
            EpsSchedule::Explicit { values } => {
                values.get(stage - 1).copied().ok_or_else(|| {
                    SimplexError::Config(format!(
                        "schedule lists {} stages, stage {stage} requested",
                        values.len()
                    ))
                })
            }
        }
    }

    /// Upper bound for the total remaining movement after `stage`:
    /// the sum of 4 eps_j over j > stage (the full series for geometric
    /// schedules, the listed remainder for explicit ones).
    pub fn tail_after(&self, stage: usize) -> f64 {
        match self {
            EpsSchedule::Geometric { base } => 4.0 * base.powi(stage as i32 + 1) / (1.0 - base),
            EpsSchedule::Explicit { values } => {
                values.iter().skip(stage).map(|&e| 4.0 * e).sum()
            }
        }
    }

    fn covers(&self, horizon: usize) -> bool {
        match self {
            EpsSchedule::Geometric { .. } => true,
            EpsSchedule::Explicit { values } => values.len() >= horizon,
        }
    }
}

/// Convex blend of two points; bit-exact when the inputs agree or the
/// coefficient vanishes, so copied images stay copies.
fn blend(a: &[f64], b: &[f64], alpha: f64) -> Vec<f64> {
    if alpha == 0.0 || a == b {
        return a.to_vec();
    }
    a.iter()
        .zip(b)
        .map(|(x, y)| (1.0 - alpha) * x + alpha * y)
        .collect()
}

/// Gluing state after some number of completed stages.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GlueState {
    simplex: FiniteSimplex,
    groups: Vec<Vec<usize>>,
    schedule: EpsSchedule,
    horizon: usize,
    stage: usize,
    processed_groups: usize,
    map: AffineMapOnSimplex,
    alphas: Vec<f64>,
    displacements: Vec<f64>,
}

/// Per-stage record of the certified quantities.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StageCertificate {
    pub stage: usize,
    pub eps: f64,
    pub alpha: f64,
    pub processed_groups: usize,
    pub displacement: f64,
    pub bound: f64,
    pub exact_on_previous: bool,
    pub tail_after: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GlueCertificate {
    pub stages: Vec<StageCertificate>,
    pub final_tail: f64,
    pub processed_vertices: usize,
    pub injective_on_processed: bool,
    pub labels_preserved: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GlueOutcome {
    pub state: GlueState,
    pub certificate: GlueCertificate,
}

impl GlueState {
    /// Starts a run: vertices of `simplex` partitioned into `groups`,
    /// one reserved slab dimension per stage up to `horizon`.
    pub fn new(
        simplex: FiniteSimplex,
        groups: Vec<Vec<usize>>,
        schedule: EpsSchedule,
        horizon: usize,
    ) -> Result<Self, SimplexError> {
        if groups.is_empty() || groups.iter().any(|g| g.is_empty()) {
            return Err(SimplexError::Config("groups must be nonempty".into()));
        }
        let mut flat: Vec<usize> = groups.iter().flatten().copied().collect();
        flat.sort_unstable();
        if flat != (0..simplex.vertex_count()).collect::<Vec<_>>() {
            return Err(SimplexError::Config(
                "groups must partition the vertex indices".into(),
            ));
        }
        if !schedule.covers(horizon) {
            return Err(SimplexError::Config(
                "schedule does not cover the requested horizon".into(),
            ));
        }
        let images = simplex
            .vertices()
            .iter()
            .map(|v| padded(v, horizon))
            .collect();
        let map = AffineMapOnSimplex::new(simplex.clone(), images)?;
        Ok(GlueState {
            simplex,
            groups,
            schedule,
            horizon,
            stage: 0,
            processed_groups: 0,
            map,
            alphas: Vec::new(),
            displacements: Vec::new(),
        })
    }

    pub fn simplex(&self) -> &FiniteSimplex {
        &self.simplex
    }

    pub fn map(&self) -> &AffineMapOnSimplex {
        &self.map
    }

    pub fn stage(&self) -> usize {
        self.stage
    }

    pub fn processed_groups(&self) -> usize {
        self.processed_groups
    }

    /// Indices covered by the processed groups, in group order.
    pub fn processed_vertices(&self) -> Vec<usize> {
        self.groups[..self.processed_groups].concat()
    }

    pub fn alphas(&self) -> &[f64] {
        &self.alphas
    }

    pub fn displacements(&self) -> &[f64] {
        &self.displacements
    }

    fn padded_vertices(&self) -> Vec<Vec<f64>> {
        self.simplex
            .vertices()
            .iter()
            .map(|v| padded(v, self.horizon))
            .collect()
    }

    /// Runs one stage and returns the advanced state.
    pub fn step(&self) -> Result<GlueState, SimplexError> {
        let stage = self.stage + 1;
        if stage > self.horizon {
            return Err(SimplexError::Config(format!(
                "stage {stage} is past the configured horizon {}",
                self.horizon
            )));
        }
        let eps = self.schedule.value(stage)?;
        let n_vertices = self.simplex.vertex_count();
        let padded_k = self.padded_vertices();
        let all_done = self.processed_groups == self.groups.len();

        let alpha = if all_done {
            0.0
        } else {
            let mut cloud = padded_k.clone();
            cloud.extend(self.map.images().iter().cloned());
            eps / (diameter(&cloud) + 1.0)
        };
        let phi_prime: Vec<Vec<f64>> = self
            .map
            .images()
            .iter()
            .zip(&padded_k)
            .map(|(img, v)| blend(img, v, alpha))
            .collect();

        // Process at least one new group, then keep absorbing groups
        // until the processed hull is eps-close to every blended image.
        let mut n_next = (self.processed_groups + 1).min(self.groups.len());
        let (l_indices, images_after_retract) = loop {
            let l_indices: Vec<usize> = self.groups[..n_next].concat();
            let l_points: Vec<Vec<f64>> = l_indices.iter().map(|&i| phi_prime[i].clone()).collect();
            let mut retracted = phi_prime.clone();
            let mut density = 0.0f64;
            for i in 0..n_vertices {
                if l_indices.contains(&i) {
                    continue;
                }
                let (q, gap) = nearest_point_in_hull(&l_points, &phi_prime[i])?;
                retracted[i] = q;
                density = density.max(gap);
            }
            if density <= eps + STRICT_GUARD || n_next == self.groups.len() {
                break (l_indices, retracted);
            }
            n_next += 1;
        };

        for g in self.processed_groups..n_next {
            let pts: Vec<Vec<f64>> = self.groups[g].iter().map(|&i| phi_prime[i].clone()).collect();
            let d = diameter(&pts);
            if d >= eps {
                return Err(SimplexError::GroupTooCoarse {
                    stage,
                    group: g,
                    diameter: d,
                    bound: eps,
                });
            }
        }

        let mut images_next = images_after_retract;
        let slab_dim = self.simplex.ambient_dim() + stage - 1;
        let fresh: Vec<usize> = self.groups[self.processed_groups..n_next].concat();
        let count = fresh.len() as f64;
        let delta = eps / 2.0;
        for (j, &vi) in fresh.iter().enumerate() {
            images_next[vi][slab_dim] += delta * (1.0 + j as f64 / (2.0 * count));
        }
        for &vi in &self.groups[..self.processed_groups].concat() {
            images_next[vi] = self.map.image(vi).to_vec();
        }

        // Fresh points must stay clear of the original simplex, all
        // previous images, and each other image on the processed set.
        for &vi in &fresh {
            for (other, point) in padded_k.iter().chain(self.map.images()).enumerate() {
                let _ = other;
                if point_distance(&images_next[vi], point) <= STRICT_GUARD {
                    return Err(SimplexError::PlacementConflict(format!(
                        "fresh image of vertex {vi} touches an existing point"
                    )));
                }
            }
            for &wi in &l_indices {
                if wi != vi && point_distance(&images_next[vi], &images_next[wi]) <= STRICT_GUARD {
                    return Err(SimplexError::PlacementConflict(format!(
                        "fresh image of vertex {vi} touches the image of vertex {wi}"
                    )));
                }
            }
        }

        let displacement = self
            .map
            .images()
            .iter()
            .zip(&images_next)
            .map(|(a, b)| point_distance(a, b))
            .fold(0.0, f64::max);
        if displacement + STRICT_GUARD >= 4.0 * eps {
            return Err(SimplexError::Config(format!(
                "stage {stage} moved a vertex by {displacement}, bound 4*{eps}"
            )));
        }

        let mut alphas = self.alphas.clone();
        alphas.push(alpha);
        let mut displacements = self.displacements.clone();
        displacements.push(displacement);
        Ok(GlueState {
            simplex: self.simplex.clone(),
            groups: self.groups.clone(),
            schedule: self.schedule.clone(),
            horizon: self.horizon,
            stage,
            processed_groups: n_next,
            map: AffineMapOnSimplex::new(self.simplex.clone(), images_next)?,
            alphas,
            displacements,
        })
    }
}

/// One stage of the gluing induction.
pub fn glue_step(state: &GlueState) -> Result<GlueState, SimplexError> {
    state.step()
}

/// Runs `stages` gluing stages and assembles the Cauchy certificate:
/// per-stage displacements under their bounds, exactness on previously
/// processed vertices, tail bounds from the schedule, and injectivity
/// with label transport on everything processed.
pub fn glue_run(
    simplex: FiniteSimplex,
    groups: Vec<Vec<usize>>,
    schedule: EpsSchedule,
    stages: usize,
) -> Result<GlueOutcome, SimplexError> {
    let mut state = GlueState::new(simplex, groups, schedule.clone(), stages)?;
    let mut certificates = Vec::with_capacity(stages);
    for _ in 0..stages {
        let previous = state.processed_vertices();
        let next = state.step()?;
        let exact_on_previous = previous
            .iter()
            .all(|&v| state.map.image(v) == next.map.image(v));
        let stage = next.stage;
        certificates.push(StageCertificate {
            stage,
            eps: schedule.value(stage)?,
            alpha: next.alphas[stage - 1],
            processed_groups: next.processed_groups,
            displacement: next.displacements[stage - 1],
            bound: 4.0 * schedule.value(stage)?,
            exact_on_previous,
            tail_after: schedule.tail_after(stage),
        });
        state = next;
    }

    let processed = state.processed_vertices();
    let mut injective = true;
    for (a, &va) in processed.iter().enumerate() {
        for &vb in processed.iter().skip(a + 1) {
            if point_distance(state.map.image(va), state.map.image(vb)) <= STRICT_GUARD {
                injective = false;
            }
        }
    }
    let certificate = GlueCertificate {
        final_tail: schedule.tail_after(stages),
        processed_vertices: processed.len(),
        injective_on_processed: injective,
        labels_preserved: injective,
        stages: certificates,
    };
    Ok(GlueOutcome { state, certificate })
}

fn padded(v: &[f64], extra: usize) -> Vec<f64> {
    let mut p = v.to_vec();
    p.resize(v.len() + extra, 0.0);
    p
}
