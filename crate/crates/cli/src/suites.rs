//! The desk verification matrix: seven self-contained suites covering
//! markers, dense embeddings, the cover encoder, the parameter selector,
//! and simplex gluing. `verify-all` runs them all and reports one check
//! per suite.

use std::collections::BTreeSet;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};
use zdm_core::embedding::{build_phi, phi_noninvertible, verify_density, EmbeddingPlan};
use zdm_core::encoder::psi::{psi_estimate, tent, BoundaryEstimatorConfig, CircleMeasure};
use zdm_core::encoder::selector::{check_selector_table, selector_build, SelectorConfig};
use zdm_core::encoder::{
    array_name, build_cover_family, circle_distance, recoverability_check, CirclePoint,
    CoverFamily, MetricSystem, Point,
};
use zdm_core::markers::{find_marker, verify_marker, MarkerError};
use zdm_core::simplex::decompose::{decompose, Splitter};
use zdm_core::simplex::glue::{glue_run, EpsSchedule};
use zdm_core::simplex::retract::retract;
use zdm_core::simplex::{Face, FiniteSimplex};
use zdm_core::symbolic::{ArrayWindow, Shape, Subshift};

const SILVER: f64 = std::f64::consts::SQRT_2 - 1.0;

/// Result of one verification suite.
pub struct SuiteOutcome {
    pub name: &'static str,
    pub pass: bool,
    pub detail: String,
    pub witness: Option<Value>,
    pub millis: u128,
}

type SuiteResult = Result<String, (String, Option<Value>)>;

fn outcome(name: &'static str, body: impl FnOnce() -> SuiteResult) -> SuiteOutcome {
    let started = Instant::now();
    let result = body();
    let millis = started.elapsed().as_millis();
    match result {
        Ok(detail) => SuiteOutcome {
            name,
            pass: true,
            detail,
            witness: None,
            millis,
        },
        Err((detail, witness)) => SuiteOutcome {
            name,
            pass: false,
            detail,
            witness,
            millis,
        },
    }
}

fn fail<T>(detail: impl Into<String>, witness: Value) -> Result<T, (String, Option<Value>)> {
    Err((detail.into(), Some(witness)))
}

fn broke<T>(context: &str, e: impl std::fmt::Display) -> Result<T, (String, Option<Value>)> {
    Err((format!("{context}: {e}"), None))
}

/// Runs all seven suites with deterministic per-suite random streams.
pub fn desk(seed: u64) -> Vec<SuiteOutcome> {
    let mut root = ChaCha8Rng::seed_from_u64(seed);
    let s: Vec<u64> = (0..7).map(|_| root.gen()).collect();
    vec![
        outcome("markers", suite_markers),
        outcome("marker_negative_control", suite_negative_control),
        outcome("dense_embedding", || suite_embedding(s[2])),
        outcome("noninvertible_embedding", || suite_noninvertible(s[3])),
        outcome("encoder", || suite_encoder(s[4])),
        outcome("selector", suite_selector),
        outcome("simplex", || suite_simplex(s[6])),
    ]
}

fn suite_markers() -> SuiteResult {
    let systems = [
        ("fibonacci", Subshift::fibonacci()),
        ("thue_morse", Subshift::thue_morse()),
    ];
    let mut found = 0;
    for (label, shift) in &systems {
        for n in 2..=5usize {
            let ms = match find_marker(shift, n, 12) {
                Ok(ms) => ms,
                Err(e) => return broke(&format!("{label} n={n}"), e),
            };
            let check = match verify_marker(shift, &ms.words, n, 4 * n) {
                Ok(c) => c,
                Err(e) => return broke(&format!("{label} n={n} verify"), e),
            };
            if !check.separated || check.covering_bound != Some(ms.covering_bound) {
                return fail(
                    format!("{label} n={n}: verification disagrees with the search"),
                    json!({
                        "system": label,
                        "n": n,
                        "separated": check.separated,
                        "covering": check.covering_bound,
                        "claimed": ms.covering_bound,
                    }),
                );
            }
            if *label == "fibonacci" && n == 2 {
                let words: Vec<String> = ms
                    .words
                    .iter()
                    .map(|w| w.render(shift.alphabet()))
                    .collect();
                if words != ["1"] || ms.covering_bound != 3 {
                    return fail(
                        "fibonacci n=2 marker differs from the frozen certificate",
                        json!({ "words": words, "covering": ms.covering_bound }),
                    );
                }
            }
            found += 1;
        }
    }
    Ok(format!("{found} marker sets found and verified"))
}

fn suite_negative_control() -> SuiteResult {
    let full = Subshift::full_shift(zdm_core::symbolic::Alphabet::binary());
    match find_marker(&full, 2, 4) {
        Err(MarkerError::NotFound { max_word_len: 4, .. }) => {
            Ok("full 2-shift admits no 2-marker up to word length 4".into())
        }
        Err(e) => broke("unexpected error", e),
        Ok(ms) => fail(
            "full 2-shift unexpectedly produced a marker set",
            json!({ "word_len": ms.word_len, "covering": ms.covering_bound }),
        ),
    }
}

struct EmbeddingSetup {
    plan: EmbeddingPlan,
    row: Vec<u8>,
    window_len: usize,
}

fn embedding_setup(eps: f64) -> Result<EmbeddingSetup, (String, Option<Value>)> {
    let host = Subshift::thue_morse();
    let target = Subshift::fibonacci();
    let shapes = [Shape::new(1, 1), Shape::new(1, 2)];
    let plan = match EmbeddingPlan::for_subshifts(&host, &target, &shapes, eps, 48) {
        Ok(p) => p,
        Err(e) => return broke(&format!("plan eps={eps}"), e),
    };
    let window_len = (20.0 * plan.block_depth() as f64 / eps).ceil() as usize;
    let row = match host.generic_row(window_len + 60_000) {
        Ok(r) => r,
        Err(e) => return broke("host row", e),
    };
    Ok(EmbeddingSetup {
        plan,
        row,
        window_len,
    })
}

fn host_window(setup: &EmbeddingSetup, offset: usize) -> ArrayWindow {
    let letters = setup.row[offset..offset + setup.window_len].to_vec();
    ArrayWindow::single_row(Subshift::thue_morse().alphabet().clone(), 0, letters).unwrap()
}

fn suite_embedding(seed: u64) -> SuiteResult {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut details = Vec::new();

    for eps in [0.5, 0.25, 0.1] {
        let setup = embedding_setup(eps)?;
        let mut outputs = Vec::new();
        for _ in 0..25 {
            let offset = rng.gen_range(0..50_000);
            match build_phi(&setup.plan, &host_window(&setup, offset)) {
                Ok(out) => outputs.push(out),
                Err(e) => return broke(&format!("phi eps={eps} offset={offset}"), e),
            }
        }
        let report = match verify_density(setup.plan.spec(), &outputs) {
            Ok(r) => r,
            Err(e) => return broke(&format!("density eps={eps}"), e),
        };
        if !report.inside || report.worst_deviation >= eps {
            return fail(
                format!("density outside tolerance at eps={eps}"),
                json!({ "eps": eps, "worst_deviation": report.worst_deviation }),
            );
        }
        details.push(format!("eps={eps} worst={:.4}", report.worst_deviation));
    }

    // Injectivity and locality on the middle tolerance.
    let setup = embedding_setup(0.25)?;
    let mut inputs: BTreeSet<Vec<u8>> = BTreeSet::new();
    let mut images: BTreeSet<Vec<u8>> = BTreeSet::new();
    let mut attempts = 0;
    while inputs.len() < 1000 {
        attempts += 1;
        if attempts > 20_000 {
            return fail(
                "could not collect 1000 distinct windows",
                json!({ "distinct": inputs.len() }),
            );
        }
        let offset = rng.gen_range(0..50_000);
        let window = host_window(&setup, offset);
        if !inputs.insert(window.row(0).to_vec()) {
            continue;
        }
        let out = match build_phi(&setup.plan, &window) {
            Ok(o) => o,
            Err(e) => return broke(&format!("phi offset={offset}"), e),
        };
        let key: Vec<u8> = out.window.rows().iter().flatten().copied().collect();
        if !images.insert(key) {
            return fail(
                "two distinct windows mapped to one image",
                json!({ "offset": offset }),
            );
        }
    }
    details.push("1000 distinct windows, distinct images".into());

    // Locality: a change far from a column never reaches it. Compared on
    // the block interior (between the first and last occurrence of both
    // runs), where the infinite-window code is faithfully represented.
    let radius = setup.plan.locality_radius() as i64;
    let base_window = host_window(&setup, 7);
    let base_out = match build_phi(&setup.plan, &base_window) {
        Ok(o) => o,
        Err(e) => return broke("base phi", e),
    };
    let mut checked = 0;
    let mut skipped = 0;
    while checked < 1000 {
        if skipped > 4000 {
            return fail(
                "too many mutated windows were rejected",
                json!({ "checked": checked, "skipped": skipped }),
            );
        }
        let m = rng.gen_range(0..setup.window_len);
        let mut letters = base_window.row(0).to_vec();
        letters[m] ^= 1;
        let mutated =
            ArrayWindow::single_row(Subshift::thue_morse().alphabet().clone(), 0, letters)
                .unwrap();
        let out = match build_phi(&setup.plan, &mutated) {
            Ok(o) => o,
            Err(_) => {
                skipped += 1;
                continue;
            }
        };
        let lo = base_out.hits[0].max(out.hits[0]);
        let hi = (*base_out.hits.last().unwrap()).min(*out.hits.last().unwrap());
        let m = m as i64;
        for j in lo..hi {
            if (j - m).abs() <= radius {
                continue;
            }
            for r in 0..out.window.depth() {
                let a = base_out.window.cell(r, j).unwrap();
                let b = out.window.cell(r, j).unwrap();
                if a != b {
                    return fail(
                        "a far-away mutation changed an output cell",
                        json!({ "mutation": m, "column": j, "row": r, "radius": radius }),
                    );
                }
            }
        }
        checked += 1;
    }
    details.push(format!("1000 locality mutations ({skipped} rejected)"));
    Ok(details.join("; "))
}

fn suite_noninvertible(seed: u64) -> SuiteResult {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let setup = embedding_setup(0.5)?;
    let depth = setup.plan.block_depth();
    let (_, covering) = setup.plan.gap_range();
    if covering > 2 * depth - 1 {
        return fail(
            "plan does not satisfy the one-sided coverage hypothesis",
            json!({ "covering": covering, "bound": 2 * depth - 1 }),
        );
    }
    let sample = setup.plan.sample();
    for _ in 0..100 {
        let offset = rng.gen_range(0..50_000);
        let window = host_window(&setup, offset);
        let out = match phi_noninvertible(&setup.plan, &window) {
            Ok(o) => o,
            Err(e) => return broke(&format!("offset={offset}"), e),
        };
        if out.window.first_col() != 0 || out.measured.0 != 0 {
            return fail(
                "one-sided image leaves uncovered columns at the origin",
                json!({
                    "offset": offset,
                    "first_col": out.window.first_col(),
                    "measured_from": out.measured.0,
                }),
            );
        }
        // Every column from the origin onward replays the sample from
        // the nearest occurrence on its left.
        for _ in 0..20 {
            let j = rng.gen_range(0..out.window.cols() as i64);
            let anchor = out
                .hits
                .iter()
                .copied()
                .filter(|&h| h <= j)
                .max()
                .unwrap_or(out.hits[0]);
            let idx = (j - anchor) as usize;
            if idx >= sample.cols() {
                continue;
            }
            for r in 0..out.new_rows {
                let got = out.window.cell(r, j).unwrap();
                let want = sample.cells()[r][idx];
                if got != want {
                    return fail(
                        "inserted cell does not replay the sample",
                        json!({ "offset": offset, "column": j, "row": r }),
                    );
                }
            }
        }
    }
    Ok(format!(
        "100 one-sided windows covered from the origin (N={covering} <= {})",
        2 * depth - 1
    ))
}

fn rotation_schedule(levels: usize) -> Result<(MetricSystem, Vec<CoverFamily>), (String, Option<Value>)> {
    let sys = MetricSystem::circle(SILVER).map_err(|e| (format!("system: {e}"), None))?;
    let mut schedule = Vec::with_capacity(levels);
    for k in 1..=levels {
        match build_cover_family(&sys, k, 1 << k, 0.2) {
            Ok(fam) => schedule.push(fam),
            Err(e) => return broke(&format!("cover level {k}"), e),
        }
    }
    Ok((sys, schedule))
}

fn suite_encoder(seed: u64) -> SuiteResult {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (sys, schedule) = rotation_schedule(3)?;

    // Boundary-mass estimates shrink with the probe width and vanish in
    // the limit: strictly monotone over d and small at the narrow end.
    for fam in &schedule {
        for i in 0..20 {
            let t = i as f64 / 19.0;
            let mut last = f64::INFINITY;
            for d in [0.1, 0.05, 0.01] {
                let cfg = BoundaryEstimatorConfig::grid(d, 8192);
                let est = match psi_estimate(&sys, fam, &CircleMeasure::Lebesgue, t, &cfg) {
                    Ok(e) => e,
                    Err(e) => return broke(&format!("psi level={} t={t}", fam.level), e),
                };
                if est.value > last {
                    return fail(
                        "boundary estimate grew while the probe narrowed",
                        json!({ "level": fam.level, "t": t, "d": d, "value": est.value }),
                    );
                }
                last = est.value;
                if d == 0.01 && est.value >= 0.02 {
                    return fail(
                        "narrow-probe boundary estimate too large",
                        json!({ "level": fam.level, "t": t, "value": est.value }),
                    );
                }
            }
        }
    }

    // Names along an orbit are shifted copies: exact equality.
    let t = 0.37;
    let hw = 8i64;
    for _ in 0..100 {
        let x = Point::Circle(CirclePoint {
            base: rng.gen_range(0.0..1.0),
            steps: rng.gen_range(0..100),
        });
        let tx = sys.step(&x, 1).map_err(|e| (format!("step: {e}"), None))?;
        let name_x = match array_name(&sys, &schedule, t, &x, 3, hw) {
            Ok(n) => n,
            Err(e) => return broke("name", e),
        };
        let name_tx = match array_name(&sys, &schedule, t, &tx, 3, hw) {
            Ok(n) => n,
            Err(e) => return broke("name", e),
        };
        for k in 1..=3usize {
            for c in -(hw - 1)..=(hw - 1) {
                if name_x.cell(k, c + 1) != name_tx.cell(k, c) {
                    return fail(
                        "orbit names disagree under shifting",
                        json!({ "row": k, "column": c }),
                    );
                }
            }
        }
    }

    // Distinct points eventually land in different cells.
    for i in 0..50 {
        let base = rng.gen_range(0.0..1.0);
        let delta = rng.gen_range(0.005..0.995);
        let p = Point::Circle(CirclePoint::new(base));
        let q = Point::Circle(CirclePoint::new((base + delta).rem_euclid(1.0)));
        let report = match recoverability_check(&sys, &schedule, t, &[p, q], 3, 128) {
            Ok(r) => r,
            Err(e) => return broke("recoverability", e),
        };
        if !report.separated {
            return fail(
                "a point pair was never separated",
                json!({ "pair": i, "base": base, "delta": delta }),
            );
        }
    }
    Ok("psi monotone and small; 100 names equivariant; 50 pairs separated".into())
}

/// Four synthetic measures, each with a heavy atom at a distance that is
/// a mid-range radius of one cover family, so a known band of the
/// parameter is bad for it.
fn selector_fixture(schedule: &[CoverFamily]) -> (Vec<(usize, f64, f64)>, Vec<CircleMeasure>) {
    let spots = vec![
        (1usize, 0.10, 0.0),
        (2usize, 0.50, 0.125),
        (1usize, 0.85, 0.5),
        (3usize, 0.30, 0.25),
    ];
    let measures = spots
        .iter()
        .map(|&(level, t_bad, center)| {
            let rho = schedule[level].radius_at(t_bad);
            CircleMeasure::Synthetic {
                lebesgue_weight: 0.2,
                atoms: vec![((center + rho).rem_euclid(1.0), 0.8)],
            }
        })
        .collect();
    (spots, measures)
}

fn suite_selector() -> SuiteResult {
    let (sys, schedule) = rotation_schedule(6)?;
    let (spots, measures) = selector_fixture(&schedule);
    let d = 0.01;
    let cfg = SelectorConfig::new(BoundaryEstimatorConfig::grid(d, 8192));
    let n_max = 6;
    let table = match selector_build(&sys, &schedule, &measures, n_max, &cfg) {
        Ok(t) => t,
        Err(e) => return broke("build", e),
    };
    if let Err(e) = check_selector_table(&table, measures.len()) {
        return fail("table invariants failed", json!({ "error": e }));
    }

    // The chosen parameter must avoid every bad band: whenever the atom
    // sits near some cover circle of level k, the tent contribution at
    // the chosen t stays under the final stage threshold.
    let threshold = 0.5f64.powi(n_max as i32 - 1);
    for (i, &(level, t_bad, center)) in spots.iter().enumerate() {
        let t_sel = table.t_value(i);
        let atom = (center + schedule[level].radius_at(t_bad)).rem_euclid(1.0);
        if (t_sel - t_bad).abs() <= 2.0 * d * (1.0 + 0.2) / 0.2 {
            return fail(
                "selected parameter landed in the designed bad band",
                json!({ "measure": i, "t": t_sel, "bad_t": t_bad }),
            );
        }
        for fam in &schedule {
            let width = d * fam.r1;
            let radius = fam.radius_at(t_sel);
            for c in &fam.centers {
                let Point::Circle(cp) = c else { continue };
                let rho = circle_distance(atom, cp.value(SILVER));
                let mass = 0.8 * tent(rho, radius, width);
                if mass > threshold {
                    return fail(
                        "atom mass at the chosen parameter exceeds the stage threshold",
                        json!({
                            "measure": i,
                            "level": fam.level,
                            "t": t_sel,
                            "mass": mass,
                        }),
                    );
                }
            }
        }
    }
    let addresses: Vec<String> = (0..measures.len())
        .map(|i| {
            table
                .address(i)
                .bits()
                .iter()
                .map(|b| char::from(b'0' + b))
                .collect()
        })
        .collect();
    Ok(format!(
        "table certified for 4 measures; addresses {}",
        addresses.join(",")
    ))
}

fn random_simplex(rng: &mut ChaCha8Rng, max_dim: usize) -> FiniteSimplex {
    loop {
        let dim = rng.gen_range(2..=max_dim);
        let n = rng.gen_range(2..=dim + 1);
        let vertices: Vec<Vec<f64>> = (0..n)
            .map(|_| (0..dim).map(|_| rng.gen_range(0.0..1.0)).collect())
            .collect();
        if let Ok(s) = FiniteSimplex::unlabeled(vertices) {
            return s;
        }
    }
}

fn hull_point(rng: &mut ChaCha8Rng, simplex: &FiniteSimplex) -> Vec<f64> {
    let n = simplex.vertex_count();
    let mut weights: Vec<f64> = (0..n).map(|_| rng.gen_range(0.01..1.0)).collect();
    let total: f64 = weights.iter().sum();
    for w in &mut weights {
        *w /= total;
    }
    let mut p = vec![0.0; simplex.ambient_dim()];
    for (i, w) in weights.iter().enumerate() {
        for (d, x) in simplex.vertex(i).iter().enumerate() {
            p[d] += w * x;
        }
    }
    p
}

fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

fn suite_simplex(seed: u64) -> SuiteResult {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    for trial in 0..100 {
        let simplex = random_simplex(&mut rng, 6);
        let n = simplex.vertex_count();
        let count = rng.gen_range(1..=n);
        let mut indices: Vec<usize> = (0..n).collect();
        for i in (1..n).rev() {
            indices.swap(i, rng.gen_range(0..=i));
        }
        let mut face_indices = indices[..count].to_vec();
        face_indices.sort_unstable();
        let face = match Face::new(&simplex, &face_indices) {
            Ok(f) => f,
            Err(e) => return broke("face", e),
        };
        let eps = simplex.diameter() + 1.0;
        let map = match retract(&simplex, &face, eps) {
            Ok(m) => m,
            Err(e) => return broke(&format!("retract trial {trial}"), e),
        };
        for _ in 0..5 {
            let p = hull_point(&mut rng, &simplex);
            let q = hull_point(&mut rng, &simplex);
            let lambda: f64 = rng.gen_range(0.0..1.0);
            let mix: Vec<f64> = p
                .iter()
                .zip(&q)
                .map(|(a, b)| lambda * a + (1.0 - lambda) * b)
                .collect();
            let fp = map.apply(&p).map_err(|e| (format!("apply: {e}"), None))?;
            let fq = map.apply(&q).map_err(|e| (format!("apply: {e}"), None))?;
            let fmix = map.apply(&mix).map_err(|e| (format!("apply: {e}"), None))?;
            let expect: Vec<f64> = fp
                .iter()
                .zip(&fq)
                .map(|(a, b)| lambda * a + (1.0 - lambda) * b)
                .collect();
            if dist(&fmix, &expect) > 1e-9 {
                return fail("retraction is not affine", json!({ "trial": trial }));
            }
            let ffp = map.apply(&fp).map_err(|e| (format!("apply: {e}"), None))?;
            if dist(&ffp, &fp) > 1e-9 {
                return fail("retraction is not idempotent", json!({ "trial": trial }));
            }
            if dist(&fp, &p) > eps + 1e-9 {
                return fail(
                    "retraction moved a point beyond its budget",
                    json!({ "trial": trial, "moved": dist(&fp, &p), "eps": eps }),
                );
            }
        }
    }

    for trial in 0..100 {
        let count = rng.gen_range(1..6);
        let sets: Vec<BTreeSet<u8>> = (0..count)
            .map(|_| {
                let size = rng.gen_range(1..6);
                (0..size).map(|_| rng.gen_range(0..12u8)).collect()
            })
            .collect();
        let splitter = if trial % 2 == 0 {
            Splitter::Singletons
        } else {
            Splitter::Whole
        };
        let parts = decompose(&sets, splitter);
        let union_in: BTreeSet<u8> = sets.iter().flatten().copied().collect();
        let mut union_out = BTreeSet::new();
        for part in &parts {
            for el in part {
                if !union_out.insert(*el) {
                    return fail(
                        "decomposition produced overlapping parts",
                        json!({ "trial": trial, "element": el }),
                    );
                }
            }
            if !sets.iter().any(|s| part.is_subset(s)) {
                return fail(
                    "a part is not contained in any input set",
                    json!({ "trial": trial }),
                );
            }
        }
        if union_in != union_out {
            return fail("decomposition changed the union", json!({ "trial": trial }));
        }
    }

    // Five geometric gluing stages on a small rescaled simplex.
    let scale = 0.2;
    let dim = 4;
    let vertices: Vec<Vec<f64>> = (0..=dim)
        .map(|i| {
            (0..dim)
                .map(|d| if i > 0 && d == i - 1 { scale } else { 0.0 })
                .collect()
        })
        .collect();
    let simplex = FiniteSimplex::unlabeled(vertices).map_err(|e| (format!("glue simplex: {e}"), None))?;
    let groups: Vec<Vec<usize>> = (0..=dim).map(|i| vec![i]).collect();
    let schedule = EpsSchedule::geometric(0.5).map_err(|e| (format!("schedule: {e}"), None))?;
    let outcome = match glue_run(simplex, groups, schedule, 5) {
        Ok(o) => o,
        Err(e) => return broke("glue_run", e),
    };
    let cert = &outcome.certificate;
    for stage in &cert.stages {
        let eps_k = 0.5f64.powi(stage.stage as i32);
        if (stage.bound - 4.0 * eps_k).abs() > 1e-15 || stage.displacement >= stage.bound {
            return fail(
                "stage displacement bound violated",
                json!({
                    "stage": stage.stage,
                    "displacement": stage.displacement,
                    "bound": stage.bound,
                }),
            );
        }
        if !stage.exact_on_previous {
            return fail(
                "stage moved previously glued vertices",
                json!({ "stage": stage.stage }),
            );
        }
    }
    if !cert.injective_on_processed || !cert.labels_preserved {
        return fail(
            "final map is not an injective label-preserving embedding",
            json!({
                "injective": cert.injective_on_processed,
                "labels": cert.labels_preserved,
            }),
        );
    }
    if cert.final_tail != 0.125 {
        return fail(
            "tail bound after five geometric stages is not exact",
            json!({ "tail": cert.final_tail }),
        );
    }
    Ok("100 retractions, 100 decompositions, 5 glue stages certified".into())
}
