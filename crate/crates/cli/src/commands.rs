//! One function per subcommand. Commands return a [`Report`]; inputs
//! that fail to parse or validate surface as [`ConfigError`] instead
//! (exit status 2), while failed certificates appear as failing checks
//! in the report (exit status 1).

use std::path::PathBuf;
use std::time::Instant;

use clap::Args;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};
use zdm_core::embedding::{build_phi, verify_density, EmbeddingError, EmbeddingPlan, NeighborhoodSpec};
use zdm_core::encoder::psi::{psi_estimate, BoundaryEstimatorConfig, CircleMeasure};
use zdm_core::encoder::selector::{check_selector_table, selector_build, SelectorConfig};
use zdm_core::encoder::{array_name, build_cover_family, CirclePoint, CoverFamily, EncoderError, MetricSystem, Point};
use zdm_core::markers::{find_marker, verify_marker, MarkerError};
use zdm_core::simplex::glue::glue_run;
use zdm_core::simplex::retract::{retract, retraction_displacement};
use zdm_core::simplex::{Face, SimplexError};
use zdm_core::symbolic::{Alphabet, ArrayWindow, Shape};

use crate::config::{
    err, load_groups, load_measures, load_simplex, load_system, parse_floats,
    parse_indices, parse_schedule, parse_shapes, resolve_seed, ConfigError, Result,
};
use crate::report::{emit_report, emit_series, Check, Report, Series};
use crate::suites;

#[derive(Args, Debug)]
pub struct OutputOpts {
    /// Write the JSON report to this file instead of stdout
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Emit CSV series data into this directory
    #[arg(long)]
    pub plot_dir: Option<PathBuf>,
}

fn finish(
    mut report: Report,
    started: Instant,
    output: &OutputOpts,
    series: Vec<Series>,
) -> Result<Report> {
    report = report.finish(started);
    emit_series(output.plot_dir.as_deref(), &series)?;
    emit_report(&report, output.out.as_deref())?;
    Ok(report)
}

fn render_cells(cells: &[u8], shape: Shape, alphabet: &Alphabet) -> String {
    cells
        .chunks(shape.cols)
        .map(|row| {
            row.iter()
                .map(|&c| alphabet.symbol(c).to_string())
                .collect::<String>()
        })
        .collect::<Vec<_>>()
        .join("|")
}

#[derive(Args, Debug)]
pub struct MarkerArgs {
    /// Subshift description (JSON)
    #[arg(long)]
    pub system: PathBuf,
    /// Required separation between occurrences
    #[arg(long)]
    pub n: usize,
    /// Largest word length the search may scan
    #[arg(long, default_value_t = 12)]
    pub max_word_len: usize,
    #[command(flatten)]
    pub output: OutputOpts,
}

pub fn marker(args: &MarkerArgs) -> Result<Report> {
    let started = Instant::now();
    if args.n == 0 {
        return err("--n must be at least 1");
    }
    let (system, digest) = load_system(&args.system)?;
    let shift = system.into_shift(&args.system)?;
    let mut report = Report::new(
        "marker",
        json!({ "n": args.n, "max_word_len": args.max_word_len }),
        vec![digest],
        None,
    );
    match find_marker(&shift, args.n, args.max_word_len) {
        Ok(ms) => {
            let check = verify_marker(&shift, &ms.words, args.n, 4 * args.n)
                .map_err(|e| ConfigError(format!("verification failed: {e}")))?;
            report.push(Check::pass("marker_found"));
            report.push(Check::from_bool(
                "separation",
                check.separated,
                json!({ "violating_word": check.witness.map(|w| w.render(shift.alphabet())) }),
            ));
            report.push(Check::from_bool(
                "covering",
                check.covering_bound == Some(ms.covering_bound),
                json!({ "verified": check.covering_bound, "claimed": ms.covering_bound }),
            ));
            let words: Vec<String> = ms.words.iter().map(|w| w.render(shift.alphabet())).collect();
            report.certificates = json!({
                "marker": {
                    "n": ms.n,
                    "word_len": ms.word_len,
                    "words": words,
                    "covering_bound": ms.covering_bound,
                    "scanned_lengths": {
                        "separation": ms.certificate_lengths.separation,
                        "covering": ms.certificate_lengths.covering,
                    },
                }
            });
        }
        Err(MarkerError::NotFound {
            max_word_len,
            covering_cap,
        }) => {
            report.push(Check::fail(
                "marker_found",
                json!({ "max_word_len": max_word_len, "covering_cap": covering_cap }),
            ));
        }
        Err(e) => return err(format!("marker search failed: {e}")),
    }
    finish(report, started, &args.output, Vec::new())
}

#[derive(Args, Debug)]
pub struct EmbedArgs {
    /// Host subshift description (JSON)
    #[arg(long)]
    pub host: PathBuf,
    /// Target subshift whose pattern statistics are matched (JSON)
    #[arg(long)]
    pub target: PathBuf,
    /// Tracked pattern shapes, e.g. 1x1,1x2
    #[arg(long, default_value = "1x1,1x2")]
    pub shapes: String,
    /// Statistical tolerance driving the block depth
    #[arg(long)]
    pub eps: f64,
    /// Density tolerance for verification; defaults to --eps
    #[arg(long)]
    pub check_eps: Option<f64>,
    /// Largest marker word length to scan
    #[arg(long, default_value_t = 48)]
    pub max_word_len: usize,
    /// Number of sampled host windows
    #[arg(long, default_value_t = 24)]
    pub windows: usize,
    /// Window length; defaults to ceil(20 * block_depth / eps)
    #[arg(long)]
    pub window_cols: Option<usize>,
    /// Random seed for window sampling
    #[arg(long)]
    pub seed: Option<u64>,
    #[command(flatten)]
    pub output: OutputOpts,
}

pub fn embed_dense(args: &EmbedArgs) -> Result<Report> {
    let started = Instant::now();
    let (host_sys, host_digest) = load_system(&args.host)?;
    let host = host_sys.into_shift(&args.host)?;
    let (target_sys, target_digest) = load_system(&args.target)?;
    let target = target_sys.into_shift(&args.target)?;
    let shapes = parse_shapes(&args.shapes)?;
    let seed = resolve_seed(args.seed)?;
    if args.windows == 0 {
        return err("--windows must be positive");
    }
    let mut report = Report::new(
        "embed-dense",
        json!({
            "shapes": args.shapes,
            "eps": args.eps,
            "check_eps": args.check_eps,
            "max_word_len": args.max_word_len,
            "windows": args.windows,
            "window_cols": args.window_cols,
        }),
        vec![host_digest, target_digest],
        Some(seed),
    );

    let plan = match EmbeddingPlan::for_subshifts(&host, &target, &shapes, args.eps, args.max_word_len) {
        Ok(plan) => plan,
        Err(EmbeddingError::Marker(MarkerError::NotFound {
            max_word_len,
            covering_cap,
        })) => {
            report.push(Check::fail(
                "marker_found",
                json!({ "max_word_len": max_word_len, "covering_cap": covering_cap }),
            ));
            return finish(report, started, &args.output, Vec::new());
        }
        Err(EmbeddingError::NotGenericEnough { error, bound }) => {
            report.push(Check::fail(
                "sample_generic",
                json!({ "error": error, "bound": bound }),
            ));
            return finish(report, started, &args.output, Vec::new());
        }
        Err(e) => return err(format!("cannot build the insertion plan: {e}")),
    };
    report.push(Check::pass("marker_found"));
    report.push(Check::pass("sample_generic"));

    let window_cols = args
        .window_cols
        .unwrap_or(((20.0 * plan.block_depth() as f64 / args.eps).ceil()) as usize);
    if window_cols == 0 {
        return err("--window-cols must be positive");
    }
    let row = host
        .generic_row(window_cols + 50_000)
        .map_err(|e| ConfigError(format!("host row: {e}")))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut outputs = Vec::with_capacity(args.windows);
    let mut embed_failure = None;
    for _ in 0..args.windows {
        let offset = rng.gen_range(0..=row.len() - window_cols);
        let window = ArrayWindow::single_row(
            host.alphabet().clone(),
            0,
            row[offset..offset + window_cols].to_vec(),
        )
        .map_err(|e| ConfigError(format!("window: {e}")))?;
        match build_phi(&plan, &window) {
            Ok(out) => outputs.push(out),
            Err(e) => {
                embed_failure = Some(json!({ "offset": offset, "error": e.to_string() }));
                break;
            }
        }
    }
    if let Some(witness) = embed_failure {
        report.push(Check::fail("windows_embedded", witness));
        return finish(report, started, &args.output, Vec::new());
    }
    report.push(Check::pass("windows_embedded"));

    let check_eps = args.check_eps.unwrap_or(args.eps);
    let spec = if check_eps == args.eps {
        plan.spec().clone()
    } else {
        NeighborhoodSpec::new(plan.spec().target().clone(), check_eps)
            .map_err(|e| ConfigError(format!("check tolerance: {e}")))?
    };
    let density = verify_density(&spec, &outputs)
        .map_err(|e| ConfigError(format!("density measurement: {e}")))?;
    report.push(Check::from_bool(
        "density_inside",
        density.inside,
        json!({ "worst_deviation": density.worst_deviation, "eps": density.eps }),
    ));

    let alphabet = target.alphabet();
    let mut deviations = Series::new("deviations.csv", "shape_k,shape_n,pattern,deviation");
    for dev in &density.per_pattern {
        deviations.push(format!(
            "{},{},{},{}",
            dev.shape.rows,
            dev.shape.cols,
            render_cells(&dev.cells, dev.shape, alphabet),
            dev.deviation
        ));
    }
    report.certificates = json!({
        "plan": {
            "block_depth": plan.block_depth(),
            "marker_words": plan.marker().words.iter().map(|w| w.render(host.alphabet())).collect::<Vec<_>>(),
            "covering_bound": plan.marker().covering_bound,
            "sample_cols": plan.sample().cols(),
            "sample_certified_error": plan.sample().certified_error(),
            "locality_radius": plan.locality_radius(),
        },
        "density": {
            "inside": density.inside,
            "eps": density.eps,
            "worst_deviation": density.worst_deviation,
            "window_cols": window_cols,
            "windows": outputs.len(),
        },
    });
    finish(report, started, &args.output, vec![deviations])
}

#[derive(Args, Debug)]
pub struct EncodeArgs {
    /// System description (JSON): circle rotation or subshift
    #[arg(long)]
    pub system: PathBuf,
    /// Number of cover families in the schedule
    #[arg(long, default_value_t = 3)]
    pub levels: usize,
    /// Center counts per level, e.g. 2,4,8; defaults to powers of two
    #[arg(long)]
    pub centers: Option<String>,
    /// Relative spread between the inner and outer radius of each family
    #[arg(long, default_value_t = 0.2)]
    pub slack: f64,
    /// Cover parameter in [0, 1]
    #[arg(long, default_value_t = 0.37)]
    pub t: f64,
    /// Half-width of computed itineraries
    #[arg(long, default_value_t = 16)]
    pub halfwidth: i64,
    /// Sampled points for name and separation checks
    #[arg(long, default_value_t = 50)]
    pub points: usize,
    /// Probe widths for boundary-mass estimates, widest first
    #[arg(long, default_value = "0.1,0.05,0.01")]
    pub d_list: String,
    /// Quadrature nodes per estimate
    #[arg(long, default_value_t = 4096)]
    pub nodes: usize,
    /// Random seed for point sampling
    #[arg(long)]
    pub seed: Option<u64>,
    #[command(flatten)]
    pub output: OutputOpts,
}

pub fn encode(args: &EncodeArgs) -> Result<Report> {
    let started = Instant::now();
    let (loaded, digest) = load_system(&args.system)?;
    let sys = loaded.metric_system();
    if args.levels == 0 {
        return err("--levels must be positive");
    }
    let d_list = parse_floats(&args.d_list)?;
    if d_list.is_empty() || d_list.windows(2).any(|w| w[0] <= w[1]) {
        return err("--d-list must be strictly decreasing");
    }
    let center_counts: Vec<usize> = match &args.centers {
        Some(text) => {
            let counts = parse_indices(text)?;
            if counts.len() != args.levels {
                return err(format!(
                    "--centers lists {} counts but --levels is {}",
                    counts.len(),
                    args.levels
                ));
            }
            counts
        }
        None => (1..=args.levels).map(|k| 1usize << k).collect(),
    };
    let seed = resolve_seed(args.seed)?;
    let mut report = Report::new(
        "encode",
        json!({
            "levels": args.levels,
            "centers": center_counts,
            "slack": args.slack,
            "t": args.t,
            "halfwidth": args.halfwidth,
            "points": args.points,
            "d_list": d_list,
            "nodes": args.nodes,
        }),
        vec![digest],
        Some(seed),
    );

    let mut schedule: Vec<CoverFamily> = Vec::with_capacity(args.levels);
    for (k, &m) in center_counts.iter().enumerate() {
        match build_cover_family(&sys, k + 1, m, args.slack) {
            Ok(fam) => {
                report.push(Check::pass(format!("cover_level_{}", k + 1)));
                schedule.push(fam);
            }
            Err(EncoderError::CoverFailure(msg)) => {
                report.push(Check::fail(
                    format!("cover_level_{}", k + 1),
                    json!({ "error": msg }),
                ));
                return finish(report, started, &args.output, Vec::new());
            }
            Err(EncoderError::CenterCountMismatch { requested }) => {
                return err(format!(
                    "no cell count matches {requested} centers at level {}; \
                     pass an explicit --centers list",
                    k + 1
                ));
            }
            Err(e) => return err(format!("cover level {}: {e}", k + 1)),
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let depth = schedule.len();
    let mut series = Vec::new();
    let mut certificates = json!({
        "levels": schedule
            .iter()
            .map(|f| json!({
                "level": f.level,
                "centers": f.center_count(),
                "r0": f.r0,
                "r1": f.r1,
            }))
            .collect::<Vec<_>>(),
    });

    match &sys {
        MetricSystem::CircleRotation { alpha } => {
            let points: Vec<Point> = (0..args.points.max(2))
                .map(|_| {
                    Point::Circle(CirclePoint {
                        base: rng.gen_range(0.0..1.0),
                        steps: rng.gen_range(0..100),
                    })
                })
                .collect();
            let mut equivariant = true;
            let mut names_built = true;
            for x in &points {
                let tx = sys
                    .step(x, 1)
                    .map_err(|e| ConfigError(format!("orbit step: {e}")))?;
                let a = array_name(&sys, &schedule, args.t, x, depth, args.halfwidth);
                let b = array_name(&sys, &schedule, args.t, &tx, depth, args.halfwidth);
                match (a, b) {
                    (Ok(a), Ok(b)) => {
                        for k in 1..=depth {
                            for c in -(args.halfwidth - 1)..args.halfwidth {
                                if a.cell(k, c + 1) != b.cell(k, c) {
                                    equivariant = false;
                                }
                            }
                        }
                    }
                    _ => names_built = false,
                }
            }
            report.push(Check::from_bool("names_built", names_built, Value::Null));
            report.push(Check::from_bool("equivariance", equivariant, Value::Null));

            let mut separated = true;
            let mut witness = Value::Null;
            for pair in points.chunks(2) {
                if let [p, q] = pair {
                    let dist = sys
                        .distance(p, q)
                        .map_err(|e| ConfigError(format!("distance: {e}")))?;
                    if dist < 1e-6 {
                        continue;
                    }
                    let rep = recover(&sys, &schedule, args.t, p, q, depth, args.halfwidth * 8)?;
                    if !rep {
                        separated = false;
                        witness = json!({ "distance": dist });
                    }
                }
            }
            report.push(Check::from_bool("recoverability", separated, witness));

            let mut psi_rows = Series::new("psi.csv", "level,d,t,value,tolerance");
            let mut monotone = true;
            let mut fails = Value::Null;
            let mut psi_cert = Vec::new();
            for fam in &schedule {
                let mut last = f64::INFINITY;
                for &d in &d_list {
                    let cfg = BoundaryEstimatorConfig::grid(d, args.nodes);
                    let est = psi_estimate(&sys, fam, &CircleMeasure::Lebesgue, args.t, &cfg)
                        .map_err(|e| ConfigError(format!("boundary estimate: {e}")))?;
                    if est.value > last {
                        monotone = false;
                        fails = json!({ "level": fam.level, "d": d, "value": est.value });
                    }
                    last = est.value;
                    psi_cert.push(json!({
                        "level": fam.level,
                        "d": d,
                        "value": est.value,
                        "tolerance": est.tolerance,
                    }));
                }
                let d_fine = *d_list.last().unwrap();
                for i in 0..=40 {
                    let t = i as f64 / 40.0;
                    let cfg = BoundaryEstimatorConfig::grid(d_fine, args.nodes);
                    let est = psi_estimate(&sys, fam, &CircleMeasure::Lebesgue, t, &cfg)
                        .map_err(|e| ConfigError(format!("boundary estimate: {e}")))?;
                    psi_rows.push(format!(
                        "{},{},{},{},{}",
                        fam.level, d_fine, t, est.value, est.tolerance
                    ));
                }
            }
            report.push(Check::from_bool("psi_monotone", monotone, fails));
            certificates["psi"] = Value::Array(psi_cert);
            certificates["alpha"] = json!(alpha);
            series.push(psi_rows);
        }
        MetricSystem::Symbolic { .. } => {
            let finest = schedule.last().unwrap();
            let sample: Vec<&Point> = finest.centers.iter().take(args.points).collect();
            let mut names_built = true;
            for x in &sample {
                if array_name(&sys, &schedule, args.t, x, depth, args.halfwidth).is_err() {
                    names_built = false;
                }
            }
            report.push(Check::from_bool("names_built", names_built, Value::Null));
        }
    }

    report.certificates = certificates;
    finish(report, started, &args.output, series)
}

fn recover(
    sys: &MetricSystem,
    schedule: &[CoverFamily],
    t: f64,
    p: &Point,
    q: &Point,
    depth: usize,
    halfwidth: i64,
) -> Result<bool> {
    let rep = zdm_core::encoder::recoverability_check(
        sys,
        schedule,
        t,
        &[p.clone(), q.clone()],
        depth,
        halfwidth,
    )
    .map_err(|e| ConfigError(format!("separation scan: {e}")))?;
    Ok(rep.separated)
}

#[derive(Args, Debug)]
pub struct SelectorArgs {
    /// Circle rotation description (JSON)
    #[arg(long)]
    pub system: PathBuf,
    /// Measures to select parameters for (JSON array)
    #[arg(long)]
    pub measures: PathBuf,
    /// Number of refinement stages
    #[arg(long, default_value_t = 6)]
    pub n_max: usize,
    /// Cover families in the schedule; defaults to --n-max
    #[arg(long)]
    pub levels: Option<usize>,
    /// Relative spread between inner and outer radii
    #[arg(long, default_value_t = 0.2)]
    pub slack: f64,
    /// Probe width for boundary-mass estimates
    #[arg(long, default_value_t = 0.01)]
    pub d: f64,
    /// Quadrature nodes per estimate
    #[arg(long, default_value_t = 8192)]
    pub nodes: usize,
    /// Probes per cylinder when certifying a supremum
    #[arg(long, default_value_t = 17)]
    pub probes: usize,
    #[command(flatten)]
    pub output: OutputOpts,
}

pub fn selector(args: &SelectorArgs) -> Result<Report> {
    let started = Instant::now();
    let (loaded, sys_digest) = load_system(&args.system)?;
    let sys = loaded.into_rotation(&args.system)?;
    let (measures, measures_digest) = load_measures(&args.measures)?;
    if args.n_max == 0 {
        return err("--n-max must be positive");
    }
    let levels = args.levels.unwrap_or(args.n_max);
    let mut report = Report::new(
        "selector",
        json!({
            "n_max": args.n_max,
            "levels": levels,
            "slack": args.slack,
            "d": args.d,
            "nodes": args.nodes,
            "probes": args.probes,
            "measures": measures.len(),
        }),
        vec![sys_digest, measures_digest],
        None,
    );
    let mut schedule = Vec::with_capacity(levels);
    for k in 1..=levels {
        schedule.push(
            build_cover_family(&sys, k, 1 << k, args.slack)
                .map_err(|e| ConfigError(format!("cover level {k}: {e}")))?,
        );
    }
    let mut cfg = SelectorConfig::new(BoundaryEstimatorConfig::grid(args.d, args.nodes));
    cfg.probes = args.probes;
    let table = match selector_build(&sys, &schedule, &measures, args.n_max, &cfg) {
        Ok(t) => t,
        Err(EncoderError::NoSmallPiece { stage, index }) => {
            report.push(Check::fail(
                "selector_built",
                json!({ "stage": stage, "measure": index }),
            ));
            return finish(report, started, &args.output, Vec::new());
        }
        Err(e) => return err(format!("selector construction: {e}")),
    };
    report.push(Check::pass("selector_built"));
    match check_selector_table(&table, measures.len()) {
        Ok(()) => report.push(Check::pass("table_invariants")),
        Err(e) => report.push(Check::fail("table_invariants", json!({ "error": e }))),
    }

    let mut rows = Series::new("selection.csv", "measure,address,t");
    let mut cert_rows = Vec::new();
    for i in 0..measures.len() {
        let address: String = table
            .address(i)
            .bits()
            .iter()
            .map(|b| char::from(b'0' + b))
            .collect();
        let t = table.t_value(i);
        rows.push(format!("{i},{address},{t}"));
        cert_rows.push(json!({ "measure": i, "address": address, "t": t }));
    }
    report.certificates = json!({
        "stages": table.stages.len(),
        "selection": cert_rows,
    });
    finish(report, started, &args.output, vec![rows])
}

#[derive(Args, Debug)]
pub struct RetractArgs {
    /// Simplex description (JSON with vertices and optional labels)
    #[arg(long)]
    pub simplex: PathBuf,
    /// Vertex indices spanning the face, e.g. 0,1
    #[arg(long)]
    pub face: String,
    /// Density bound: every vertex must be this close to the face
    #[arg(long)]
    pub eps: f64,
    #[command(flatten)]
    pub output: OutputOpts,
}

pub fn simplex_retract(args: &RetractArgs) -> Result<Report> {
    let started = Instant::now();
    let (simplex, digest) = load_simplex(&args.simplex)?;
    let indices = parse_indices(&args.face)?;
    let face = Face::new(&simplex, &indices)
        .map_err(|e| ConfigError(format!("--face: {e}")))?;
    let mut report = Report::new(
        "simplex-retract",
        json!({ "face": indices, "eps": args.eps }),
        vec![digest],
        None,
    );
    let map = match retract(&simplex, &face, args.eps) {
        Ok(m) => m,
        Err(SimplexError::NotDense { vertex, gap }) => {
            report.push(Check::fail(
                "dense_enough",
                json!({ "vertex": vertex, "gap": gap, "eps": args.eps }),
            ));
            return finish(report, started, &args.output, Vec::new());
        }
        Err(e) => return err(format!("retraction: {e}")),
    };
    report.push(Check::pass("dense_enough"));

    let fixed = indices
        .iter()
        .all(|&i| map.image(i) == simplex.vertex(i));
    report.push(Check::from_bool("face_fixed", fixed, Value::Null));
    let sup = retraction_displacement(&simplex, &map);
    report.push(Check::from_bool(
        "displacement_bound",
        sup <= args.eps + 1e-12,
        json!({ "sup": sup, "eps": args.eps }),
    ));

    // Affinity and idempotence on the centroid and all edge midpoints.
    let mut affine = true;
    let mut idempotent = true;
    let centroid = simplex.centroid();
    let mut probes = vec![centroid];
    for i in 0..simplex.vertex_count() {
        for j in (i + 1)..simplex.vertex_count() {
            let mid: Vec<f64> = simplex.vertex(i)
                .iter()
                .zip(simplex.vertex(j))
                .map(|(a, b)| 0.5 * (a + b))
                .collect();
            probes.push(mid);
        }
    }
    for p in &probes {
        let fp = map
            .apply(p)
            .map_err(|e| ConfigError(format!("evaluation: {e}")))?;
        let ffp = map
            .apply(&fp)
            .map_err(|e| ConfigError(format!("evaluation: {e}")))?;
        if fp
            .iter()
            .zip(&ffp)
            .any(|(a, b)| (a - b).abs() > 1e-9)
        {
            idempotent = false;
        }
    }
    for i in 0..simplex.vertex_count() {
        for j in (i + 1)..simplex.vertex_count() {
            let mid: Vec<f64> = simplex.vertex(i)
                .iter()
                .zip(simplex.vertex(j))
                .map(|(a, b)| 0.5 * (a + b))
                .collect();
            let fmid = map
                .apply(&mid)
                .map_err(|e| ConfigError(format!("evaluation: {e}")))?;
            let blend: Vec<f64> = map
                .image(i)
                .iter()
                .zip(map.image(j))
                .map(|(a, b)| 0.5 * (a + b))
                .collect();
            if fmid
                .iter()
                .zip(&blend)
                .any(|(a, b)| (a - b).abs() > 1e-9)
            {
                affine = false;
            }
        }
    }
    report.push(Check::from_bool("affine", affine, Value::Null));
    report.push(Check::from_bool("idempotent", idempotent, Value::Null));

    let mut rows = Series::new("displacements.csv", "vertex,label,displacement");
    for i in 0..simplex.vertex_count() {
        let moved: f64 = map
            .image(i)
            .iter()
            .zip(simplex.vertex(i))
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt();
        rows.push(format!("{i},{},{moved}", simplex.label(i)));
    }
    report.certificates = json!({
        "images": map.images(),
        "sup_displacement": sup,
    });
    finish(report, started, &args.output, vec![rows])
}

#[derive(Args, Debug)]
pub struct GlueArgs {
    /// Simplex description (JSON with vertices and optional labels)
    #[arg(long)]
    pub simplex: PathBuf,
    /// Vertex-index groups (JSON array of arrays)
    #[arg(long)]
    pub groups: PathBuf,
    /// Tolerance schedule: geometric:BASE or explicit:V1,V2,...
    #[arg(long)]
    pub eps_schedule: String,
    /// Number of gluing stages to run
    #[arg(long)]
    pub stages: usize,
    #[command(flatten)]
    pub output: OutputOpts,
}

pub fn glue(args: &GlueArgs) -> Result<Report> {
    let started = Instant::now();
    let (simplex, simplex_digest) = load_simplex(&args.simplex)?;
    let (groups, groups_digest) = load_groups(&args.groups)?;
    let schedule = parse_schedule(&args.eps_schedule)?;
    let mut report = Report::new(
        "glue",
        json!({ "eps_schedule": args.eps_schedule, "stages": args.stages }),
        vec![simplex_digest, groups_digest],
        None,
    );
    let outcome = match glue_run(simplex, groups, schedule, args.stages) {
        Ok(o) => o,
        Err(SimplexError::GroupTooCoarse {
            stage,
            group,
            diameter,
            bound,
        }) => {
            report.push(Check::fail(
                "groups_fine_enough",
                json!({ "stage": stage, "group": group, "diameter": diameter, "bound": bound }),
            ));
            return finish(report, started, &args.output, Vec::new());
        }
        Err(SimplexError::PlacementConflict(msg)) => {
            report.push(Check::fail(
                "fresh_faces_disjoint",
                json!({ "error": msg }),
            ));
            return finish(report, started, &args.output, Vec::new());
        }
        Err(e) => return err(format!("gluing: {e}")),
    };
    report.push(Check::pass("groups_fine_enough"));
    report.push(Check::pass("fresh_faces_disjoint"));
    let cert = &outcome.certificate;
    let bounds_ok = cert
        .stages
        .iter()
        .all(|s| s.displacement < s.bound);
    let exact_ok = cert.stages.iter().all(|s| s.exact_on_previous);
    report.push(Check::from_bool(
        "displacement_bounds",
        bounds_ok,
        json!(cert
            .stages
            .iter()
            .map(|s| json!({ "stage": s.stage, "displacement": s.displacement, "bound": s.bound }))
            .collect::<Vec<_>>()),
    ));
    report.push(Check::from_bool("exact_on_previous", exact_ok, Value::Null));
    report.push(Check::from_bool(
        "final_injective",
        cert.injective_on_processed,
        Value::Null,
    ));
    report.push(Check::from_bool(
        "labels_preserved",
        cert.labels_preserved,
        Value::Null,
    ));

    let mut rows = Series::new("stages.csv", "stage,eps,alpha,displacement,bound,tail_after");
    for s in &cert.stages {
        rows.push(format!(
            "{},{},{},{},{},{}",
            s.stage, s.eps, s.alpha, s.displacement, s.bound, s.tail_after
        ));
    }
    report.certificates = serde_json::to_value(cert)
        .map_err(|e| ConfigError(format!("cannot serialize certificate: {e}")))?;
    finish(report, started, &args.output, vec![rows])
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    /// Which verification suite to run (only "desk" exists)
    #[arg(long, default_value = "desk")]
    pub suite: String,
    /// Random seed shared by all suites
    #[arg(long)]
    pub seed: Option<u64>,
    #[command(flatten)]
    pub output: OutputOpts,
}

pub fn verify_all(args: &VerifyArgs) -> Result<Report> {
    let started = Instant::now();
    if args.suite != "desk" {
        return err(format!("unknown suite {:?}; available: desk", args.suite));
    }
    let seed = resolve_seed(args.seed)?;
    let mut report = Report::new(
        "verify-all",
        json!({ "suite": args.suite }),
        Vec::new(),
        Some(seed),
    );
    let outcomes = suites::desk(seed);
    let mut summary = Vec::new();
    for outcome in outcomes {
        eprintln!(
            "suite {}: {} ({} ms)",
            outcome.name,
            if outcome.pass { "pass" } else { "FAIL" },
            outcome.millis
        );
        summary.push(json!({
            "suite": outcome.name,
            "detail": outcome.detail,
            "millis": outcome.millis,
        }));
        report.push(Check {
            name: outcome.name.to_string(),
            pass: outcome.pass,
            witness: outcome.witness,
        });
    }
    report.certificates = json!({ "suites": summary });
    finish(report, started, &args.output, Vec::new())
}
