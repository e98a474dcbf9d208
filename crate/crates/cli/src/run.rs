//! Mode execution: builds instances from a config, computes reports and writes
//! CSV, point-set text or SVG files.

use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use wql_core::domain::{
    build_field, gen_point_set, make_grid_measure, Anchor, Cube, FieldFamily, GridGeometry, GridMeasure, PointSet,
    ScalarField,
};
use wql_core::inequalities::{
    ball_example, cone_example, lemma1_verify, lemma4_verify, proof_chain_audit_with_plan, InequalityReport,
};
use wql_core::transport::{density_bound_check, solve_w1, solve_winf, TransportPlan};

use crate::config::{ConfigError, ExperimentConfig, FamilyKind, Mode, Scenario};
use crate::svg::loglog_chart;

#[derive(Debug, thiserror::Error)]
pub enum RunError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Core(#[from] wql_core::Error),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}

impl RunError {
    /// 1 for invalid configuration or arguments, 2 for numerical failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Core(e) if e.is_numerical() => 2,
            _ => 1,
        }
    }
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> RunError + '_ {
    move |source| RunError::Io {
        path: path.to_path_buf(),
        source,
    }
}

/// Shortest round-trip decimal; empty for a missing value.
fn num(x: f64) -> String {
    format!("{x}")
}

fn opt(x: Option<f64>) -> String {
    x.map(num).unwrap_or_default()
}

/// The CSV columns written by `eval` and `sweep`, in order.
pub const REPORT_COLUMNS: [&str; 19] = [
    "d", "m", "N", "kind", "seed", "family", "eps_or_delta", "E", "w1", "winf", "l1", "linf", "lorentz_d1", "rhs_kr",
    "rhs_theorem", "rhs_prop", "ratio_kr", "ratio_theorem", "ratio_prop",
];

/// One point set with its transport solutions.
struct Instance {
    kind: String,
    seed: u64,
    pts: PointSet,
    w1: f64,
    winf_plan: TransportPlan,
}

struct FieldCase {
    family: &'static str,
    param: Option<f64>,
    field: ScalarField,
}

fn thread_pool() -> Result<rayon::ThreadPool, RunError> {
    let mut b = rayon::ThreadPoolBuilder::new();
    if let Ok(v) = std::env::var("WQL_THREADS") {
        let n: usize = v
            .trim()
            .parse()
            .ok()
            .filter(|&n| n > 0)
            .ok_or_else(|| ConfigError::new("WQL_THREADS", format!("expected a positive integer, got `{v}`")))?;
        b = b.num_threads(n);
    }
    Ok(b.build().expect("thread pool"))
}

fn unit_grid(cfg: &ExperimentConfig) -> Result<GridMeasure, RunError> {
    Ok(make_grid_measure(cfg.dim()?, cfg.m, Cube::UNIT)?)
}

fn sorted_seeds(cfg: &ExperimentConfig) -> Vec<u64> {
    let mut s = cfg.seeds.clone();
    s.sort_unstable();
    s.dedup();
    s
}

/// `(kind, seed, points)` for every requested point set, sorted by N then seed.
fn point_sets(cfg: &ExperimentConfig, sizes: &[usize]) -> Result<Vec<(String, u64, PointSet)>, RunError> {
    let d = cfg.dim()?;
    if let Some(path) = &cfg.points {
        let text = fs::read_to_string(path).map_err(io_err(path))?;
        let pts = PointSet::from_text(&text, path.display().to_string())?;
        if pts.dim() != d {
            return Err(ConfigError::new("points", format!("file has dimension {}, config says {d}", pts.dim())).into());
        }
        return Ok(vec![("file".into(), 0, pts)]);
    }
    let mut sizes = sizes.to_vec();
    sizes.sort_unstable();
    sizes.dedup();
    let mut out = Vec::new();
    for n in sizes {
        for seed in sorted_seeds(cfg) {
            let pts = gen_point_set(cfg.pointset, d, n, seed)?;
            out.push((cfg.pointset.name().to_string(), seed, pts));
        }
    }
    Ok(out)
}

fn solve_all(pool: &rayon::ThreadPool, g: &GridMeasure, sets: Vec<(String, u64, PointSet)>) -> Result<Vec<Instance>, RunError> {
    pool.install(|| {
        sets.into_par_iter()
            .map(|(kind, seed, pts)| {
                let w1 = solve_w1(&pts, g)?.value;
                let winf_plan = solve_winf(&pts, g)?.plan;
                Ok(Instance {
                    kind,
                    seed,
                    pts,
                    w1,
                    winf_plan,
                })
            })
            .collect()
    })
}

fn family_cases(
    cfg: &ExperimentConfig,
    geo: &GridGeometry,
    pts: Option<&PointSet>,
    w_inf: f64,
    default_cap: Option<f64>,
) -> Result<Vec<FieldCase>, RunError> {
    let d = geo.dim;
    let family = cfg.family.ok_or_else(|| ConfigError::new("family", "required"))?;
    let families: Vec<FieldFamily> = match family {
        FamilyKind::ExtremalEps => {
            let eps: Vec<f64> = if cfg.eps_rel.is_empty() {
                cfg.eps.clone()
            } else {
                cfg.eps_rel.iter().map(|r| r * w_inf).collect()
            };
            eps.into_iter().map(|eps| FieldFamily::ExtremalEps { eps }).collect()
        }
        FamilyKind::DistanceCap => {
            let caps = if cfg.cap.is_empty() { default_cap.into_iter().collect() } else { cfg.cap.clone() };
            caps.into_iter().map(|cap| FieldFamily::DistanceCap { cap }).collect()
        }
        FamilyKind::Linear => vec![FieldFamily::Linear {
            coeffs: cfg.coeffs.clone().unwrap_or_default(),
            offset: cfg.offset,
        }],
        FamilyKind::ProductSine => vec![FieldFamily::ProductSine {
            freqs: cfg.coeffs.clone().unwrap_or_default(),
        }],
    };
    let default_anchor: Vec<f64> = vec![geo.cube.origin + 0.5 * geo.cube.side; d];
    let anchor_point = cfg.anchor.clone().unwrap_or(default_anchor);
    families
        .into_iter()
        .map(|fam| {
            let anchor = match (&fam, pts) {
                (FieldFamily::ExtremalEps { .. }, Some(p)) => Anchor::Points(p),
                (FieldFamily::DistanceCap { .. }, _) => Anchor::Point(&anchor_point),
                _ => Anchor::None,
            };
            let field = build_field(&fam, anchor, geo)?;
            Ok(FieldCase {
                family: fam.name(),
                param: fam.scalar_param(),
                field,
            })
        })
        .collect()
}

fn out_path(out_dir: &Path, cfg: &ExperimentConfig, default: &str) -> PathBuf {
    out_dir.join(cfg.output.as_deref().unwrap_or(default))
}

fn write_csv(path: &Path, header: &[&str], rows: &[Vec<String>]) -> Result<(), RunError> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(header)?;
    for r in rows {
        w.write_record(r)?;
    }
    w.flush().map_err(io_err(path))?;
    Ok(())
}

/// `eval` and `sweep`: one report row per (point set, field) pair plus the δ table.
fn run_reports(cfg: &ExperimentConfig, mode: Mode, out_dir: &Path) -> Result<Vec<PathBuf>, RunError> {
    let d = cfg.dim()?;
    let g = unit_grid(cfg)?;
    let deltas = cfg.deltas()?;
    let sizes: Vec<usize> = match mode {
        Mode::Sweep => cfg.sweep_n.clone(),
        _ => cfg.n.into_iter().collect(),
    };
    let pool = thread_pool()?;
    let instances = solve_all(&pool, &g, point_sets(cfg, &sizes)?)?;

    let per_instance: Vec<Vec<(FieldCase, InequalityReport)>> = pool.install(|| {
        instances
            .par_iter()
            .map(|inst| {
                family_cases(cfg, g.geometry(), Some(&inst.pts), inst.winf_plan.value, None)?
                    .into_iter()
                    .map(|case| {
                        let r = InequalityReport::from_parts(&case.field, &inst.pts, inst.w1, inst.winf_plan.value, &deltas)?;
                        Ok((case, r))
                    })
                    .collect::<Result<Vec<_>, RunError>>()
            })
            .collect::<Result<Vec<_>, RunError>>()
    })?;

    let mut rows = Vec::new();
    let mut delta_rows = Vec::new();
    for (inst, cases) in instances.iter().zip(&per_instance) {
        for (case, r) in cases {
            let head = vec![
                d.to_string(),
                cfg.m.to_string(),
                inst.pts.len().to_string(),
                inst.kind.clone(),
                inst.seed.to_string(),
                case.family.to_string(),
                opt(case.param),
            ];
            let mut row = head.clone();
            row.extend(
                [
                    r.e,
                    r.w1,
                    r.w_inf,
                    r.norms.l1,
                    r.norms.linf,
                    r.norms.lorentz_d1,
                    r.rhs_kr,
                    r.rhs_theorem,
                    r.rhs_proposition,
                    r.ratio_kr,
                    r.ratio_theorem,
                    r.ratio_proposition,
                ]
                .map(num),
            );
            rows.push(row);
            for dr in &r.deltas {
                let mut row = head.clone();
                row.extend([dr.delta, dr.rhs, dr.ratio].map(num));
                delta_rows.push(row);
            }
        }
    }
    let main = out_path(out_dir, cfg, &format!("{}.csv", mode.name()));
    write_csv(&main, &REPORT_COLUMNS, &rows)?;
    let delta_path = out_dir.join(format!("{}_delta.csv", mode.name()));
    write_csv(
        &delta_path,
        &["d", "m", "N", "kind", "seed", "family", "eps_or_delta", "delta", "rhs_delta", "ratio_delta"],
        &delta_rows,
    )?;
    Ok(vec![main, delta_path])
}

fn run_audit(cfg: &ExperimentConfig, out_dir: &Path) -> Result<Vec<PathBuf>, RunError> {
    let d = cfg.dim()?;
    let g = unit_grid(cfg)?;
    let pool = thread_pool()?;
    let instances = solve_all(&pool, &g, point_sets(cfg, &cfg.n.into_iter().collect::<Vec<_>>())?)?;
    let mut rows = Vec::new();
    let mut region_rows = Vec::new();
    for inst in &instances {
        let w = inst.winf_plan.value;
        let density = density_bound_check(&inst.pts, w, cfg.probes, inst.seed)?;
        for case in family_cases(cfg, g.geometry(), Some(&inst.pts), w, None)? {
            let a = proof_chain_audit_with_plan(&case.field, &inst.pts, &inst.winf_plan)?;
            let mut sorted = a.region_ratios.clone();
            sorted.sort_by(f64::total_cmp);
            let head = vec![
                d.to_string(),
                cfg.m.to_string(),
                inst.pts.len().to_string(),
                inst.kind.clone(),
                inst.seed.to_string(),
                case.family.to_string(),
                opt(case.param),
            ];
            let mut row = head.clone();
            row.extend(
                [
                    a.e,
                    a.w_inf,
                    a.sum_terms(),
                    a.triangle_slack,
                    a.overlap_ratio,
                    a.overlap_bound,
                    sorted[0],
                    sorted[sorted.len() / 2],
                    sorted[sorted.len() - 1],
                ]
                .map(num),
            );
            row.push(density.max_count.to_string());
            row.push(num(density.bound));
            row.push(num(density.max_ratio));
            rows.push(row);
            for (k, (t, ratio)) in a.terms.iter().zip(&a.region_ratios).enumerate() {
                let mut row = head.clone();
                row.extend([k.to_string(), num(*t), num(*ratio)]);
                region_rows.push(row);
            }
        }
    }
    let main = out_path(out_dir, cfg, "audit.csv");
    write_csv(
        &main,
        &[
            "d", "m", "N", "kind", "seed", "family", "eps_or_delta", "E", "winf", "sum_terms", "triangle_slack",
            "overlap_ratio", "overlap_bound", "region_ratio_min", "region_ratio_median", "region_ratio_max",
            "density_max_count", "density_bound", "density_ratio",
        ],
        &rows,
    )?;
    let regions = out_dir.join("audit_regions.csv");
    write_csv(
        &regions,
        &["d", "m", "N", "kind", "seed", "family", "eps_or_delta", "k", "t_k", "region_ratio"],
        &region_rows,
    )?;
    Ok(vec![main, regions])
}

fn run_lemma1(cfg: &ExperimentConfig, out_dir: &Path) -> Result<Vec<PathBuf>, RunError> {
    let d = cfg.dim()?;
    let radius = cfg.radius[0];
    let mut rows = Vec::new();
    for &delta in &cfg.cap {
        let (mu, f) = match cfg.scenario {
            Scenario::Ball => ball_example(d, cfg.m, radius, delta)?,
            Scenario::Cone => cone_example(d, cfg.m, radius, cfg.half_width.unwrap_or(radius), delta)?,
        };
        let r = lemma1_verify(&mu, &f, radius)?;
        let mut row = vec![
            match cfg.scenario {
                Scenario::Ball => "ball".to_string(),
                Scenario::Cone => "cone".to_string(),
            },
            d.to_string(),
            cfg.m.to_string(),
            num(radius),
            opt(cfg.half_width.filter(|_| cfg.scenario == Scenario::Cone)),
        ];
        row.extend(
            [delta, r.lhs, r.mass, r.lorentz, r.rhs, r.ratio, r.hull_lorentz, r.hull_rhs, r.hull_ratio].map(num),
        );
        rows.push(row);
    }
    let path = out_path(out_dir, cfg, "lemma1.csv");
    write_csv(
        &path,
        &[
            "scenario", "d", "m", "radius", "half_width", "delta", "lhs", "mass", "lorentz", "rhs", "ratio",
            "hull_lorentz", "hull_rhs", "hull_ratio",
        ],
        &rows,
    )?;
    Ok(vec![path])
}

fn run_lemma4(cfg: &ExperimentConfig, out_dir: &Path) -> Result<Vec<PathBuf>, RunError> {
    let d = cfg.dim()?;
    let mut rows = Vec::new();
    for &r in &cfg.radius {
        let g = make_grid_measure(d, cfg.m, Cube::centered(r))?;
        let mut cfg_r = cfg.clone();
        cfg_r.anchor = Some(cfg.anchor.clone().unwrap_or_else(|| vec![0.0; d]));
        for case in family_cases(&cfg_r, g.geometry(), None, 0.0, Some(r))? {
            let rep = lemma4_verify(&case.field, r)?;
            let mut row = vec![d.to_string(), cfg.m.to_string(), num(r), case.family.to_string(), opt(case.param)];
            row.extend([rep.lhs, rep.l1, rep.linf, rep.ratio].map(num));
            rows.push(row);
        }
    }
    let path = out_path(out_dir, cfg, "lemma4.csv");
    write_csv(&path, &["d", "m", "radius", "family", "param", "lhs", "l1", "linf", "ratio"], &rows)?;
    Ok(vec![path])
}

fn run_gen_points(cfg: &ExperimentConfig, out_dir: &Path) -> Result<Vec<PathBuf>, RunError> {
    let sets = point_sets(cfg, &cfg.n.into_iter().collect::<Vec<_>>())?;
    let name = cfg.output.clone().unwrap_or_else(|| "points.txt".into());
    let many = sets.len() > 1;
    let mut written = Vec::new();
    for (_, seed, pts) in sets {
        let file = if many {
            match name.rsplit_once('.') {
                Some((stem, ext)) => format!("{stem}_{seed}.{ext}"),
                None => format!("{name}_{seed}"),
            }
        } else {
            name.clone()
        };
        let path = out_dir.join(file);
        fs::write(&path, pts.to_text()).map_err(io_err(&path))?;
        written.push(path);
    }
    Ok(written)
}

/// Reads the `(x, y)` columns of a CSV, keeping rows where both are positive.
pub fn read_columns(path: &Path, x: &str, y: &str) -> Result<Vec<(f64, f64)>, RunError> {
    let mut rdr = csv::Reader::from_path(path)?;
    let headers = rdr.headers()?.clone();
    let col = |key: &str, name: &str| {
        headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| ConfigError::new(key.to_string(), format!("no column `{name}` in {}", path.display())))
    };
    let (ix, iy) = (col("x", x)?, col("y", y)?);
    let mut out = Vec::new();
    for rec in rdr.records() {
        let rec = rec?;
        let parse = |i: usize, key: &str| -> Result<f64, ConfigError> {
            let s = rec.get(i).unwrap_or("");
            s.parse()
                .map_err(|_| ConfigError::new(key.to_string(), format!("non-numeric value `{s}`")))
        };
        let (vx, vy) = (parse(ix, "x")?, parse(iy, "y")?);
        if vx > 0.0 && vy > 0.0 && vx.is_finite() && vy.is_finite() {
            out.push((vx, vy));
        }
    }
    Ok(out)
}

fn run_plot(cfg: &ExperimentConfig, out_dir: &Path) -> Result<Vec<PathBuf>, RunError> {
    let input = cfg.input.as_ref().expect("validated");
    let (x, y) = (cfg.x.as_deref().expect("validated"), cfg.y.as_deref().expect("validated"));
    let pts = read_columns(input, x, y)?;
    if pts.len() < 2 {
        return Err(ConfigError::new("input", "need at least two positive (x, y) rows for a log-log plot").into());
    }
    let path = out_path(out_dir, cfg, "plot.svg");
    fs::write(&path, loglog_chart(&pts, x, y)).map_err(io_err(&path))?;
    Ok(vec![path])
}

/// Runs one mode, returning the files written.
pub fn run(mode: Mode, cfg: &ExperimentConfig, out_dir: &Path) -> Result<Vec<PathBuf>, RunError> {
    cfg.validate(mode)?;
    fs::create_dir_all(out_dir).map_err(io_err(out_dir))?;
    match mode {
        Mode::Eval | Mode::Sweep => run_reports(cfg, mode, out_dir),
        Mode::Audit => run_audit(cfg, out_dir),
        Mode::Lemma1 => run_lemma1(cfg, out_dir),
        Mode::Lemma4 => run_lemma4(cfg, out_dir),
        Mode::GenPoints => run_gen_points(cfg, out_dir),
        Mode::Plot => run_plot(cfg, out_dir),
    }
}
