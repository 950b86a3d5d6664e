use std::f64::consts::PI;
use std::fs;
use std::path::{Path, PathBuf};

use drawstring_core::curvature::{self, TubeBase};
use drawstring_core::inversion::{self, InversionCurve};
use drawstring_core::math;
use drawstring_core::models::ModelMetric;
use drawstring_core::profile::{BoundaryFunction, DrawstringProfile, GeometryConstants};
use drawstring_core::pulled::{self, Lattice, PullExponent, StudyTable};
use drawstring_core::verifier::{self, VerificationReport, AF_BREAKPOINTS};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::config::{Command, PresetName, RunConfig};
use crate::error::{CliError, Result};
use crate::formats::{self, num, ProfileDoc, ReportDoc};
use crate::presets;

/// Result of a run: whether every requested check passed, a short
/// human-readable summary, and the files written.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub passed: bool,
    pub summary: Vec<String>,
    pub files: Vec<PathBuf>,
}

impl Outcome {
    fn new() -> Self {
        Outcome {
            passed: true,
            summary: Vec::new(),
            files: Vec::new(),
        }
    }

    fn check(&mut self, ok: bool, line: String) {
        self.passed &= ok;
        self.summary.push(format!("{} {line}", if ok { "PASS" } else { "FAIL" }));
    }

    fn note(&mut self, line: String) {
        self.summary.push(line);
    }

    fn reports(&mut self, reports: &[VerificationReport]) {
        for r in reports {
            self.check(
                r.passed,
                format!("{} worst_margin={} violations={}", r.check_id, num(r.worst_margin), r.violation_count),
            );
        }
    }
}

/// Runs one command, writing its files under `cfg.output_dir`.
pub fn run(cfg: &RunConfig) -> Result<Outcome> {
    cfg.validate()?;
    fs::create_dir_all(&cfg.output_dir).map_err(|e| CliError::io(&cfg.output_dir, e))?;
    match cfg.command {
        Command::BuildProfile => build_profile(cfg),
        Command::Verify => verify(cfg),
        Command::ScanCurvature => scan_curvature(cfg),
        Command::Pulled => pulled_study(cfg),
        Command::Inversion => inversion_curve(cfg),
        Command::Jacobi => jacobi(cfg),
    }
}

fn out_path(cfg: &RunConfig, name: &str, out: &mut Outcome) -> PathBuf {
    let p = cfg.output_dir.join(name);
    out.files.push(p.clone());
    p
}

fn require_drawstring(cfg: &RunConfig) -> Result<()> {
    if cfg.preset().is_drawstring() {
        Ok(())
    } else {
        Err(CliError::Config(format!(
            "{:?} needs a drawstring preset, got {:?}",
            cfg.command, cfg.preset()
        )))
    }
}

fn build_profile(cfg: &RunConfig) -> Result<Outcome> {
    require_drawstring(cfg)?;
    let profile = presets::profile(cfg)?;
    let doc = ProfileDoc::from_profile(&profile);
    let mut out = Outcome::new();
    formats::write_json(&out_path(cfg, "profile.json", &mut out), &doc)?;
    out.note(format!(
        "r1={} r2_loglog={} c1={} c2={}",
        num(doc.r1),
        num(doc.r2_loglog),
        num(doc.c1),
        num(doc.c2)
    ));
    Ok(out)
}

fn write_reports(cfg: &RunConfig, reports: &[VerificationReport], out: &mut Outcome) -> Result<()> {
    let docs: Vec<ReportDoc> = reports.iter().map(ReportDoc::from).collect();
    formats::write_json(&out_path(cfg, "reports.json", out), &docs)?;
    out.reports(reports);
    Ok(())
}

/// Round-sphere members checked by `verify` on the `round-s3` preset.
pub const LLARULL_INDICES: [usize; 4] = [1, 2, 5, 10];

/// Full check list for a drawstring model.
pub fn drawstring_reports(model: &ModelMetric, points: usize) -> Result<Vec<VerificationReport>> {
    let profile = model
        .profile()
        .ok_or_else(|| CliError::Config("model has no drawstring profile".into()))?;
    let r1 = profile.outer_radius();
    let mut reports = verifier::check_condition(profile).reports;
    let grid = verifier::radial_grid(profile, points, profile.consts().tube_radius.max(r1));
    reports.push(verifier::verify_scal_bound(model, profile.eps(), &grid)?);
    if TubeBase::of(model) == Some(TubeBase::Flat) {
        reports.push(verifier::verify_scal_floor(model, 0.0, &grid.below(r1 / 4.0), "scal_bound.inner")?);
    }
    reports.push(verifier::verify_scal_floor(model, 0.0, &grid.above(r1), "scal_bound.outer")?);
    reports.extend(verifier::verify_distance(profile));
    reports.push(verifier::verify_volume(model)?);
    reports.push(verifier::verify_mean_convexity(model, &grid)?);
    Ok(reports)
}

fn verify(cfg: &RunConfig) -> Result<Outcome> {
    let mut out = Outcome::new();
    let reports = match cfg.preset() {
        p if p.is_drawstring() => {
            let model = presets::model(cfg)?;
            let points = cfg.points.unwrap_or(10_000);
            let mut reports = drawstring_reports(&model, points)?;
            if p == PresetName::RoundS3 {
                let seq = LLARULL_INDICES
                    .iter()
                    .map(|&i| Ok((i, verifier::llarull_profile(i)?)))
                    .collect::<Result<Vec<_>>>()?;
                reports.extend(verifier::verify_llarull(&seq, points)?);
            }
            write_scalar_points(cfg, &model, points, &mut out)?;
            reports
        }
        PresetName::Af => verifier::verify_af(cfg.mass, cfg.points.unwrap_or(300))?.to_vec(),
        PresetName::ConformalInversion => {
            if !(cfg.delta > 0.0) {
                return Err(CliError::Config("verify on conformal-inversion needs delta > 0".into()));
            }
            let grid = math::lin_space(0.01, PI - 0.01, cfg.points.unwrap_or(1000));
            inversion::supersolution_check(cfg.delta, &grid)?.to_vec()
        }
        other => {
            return Err(CliError::Config(format!("verify has no suite for preset {other:?}")));
        }
    };
    write_reports(cfg, &reports, &mut out)?;
    Ok(out)
}

/// Per-point closed-form scalar curvature of a drawstring model.
fn write_scalar_points(cfg: &RunConfig, model: &ModelMetric, points: usize, out: &mut Outcome) -> Result<()> {
    let profile = model.profile().expect("drawstring model");
    let base = TubeBase::of(model).expect("drawstring model");
    let grid = verifier::radial_grid(
        profile,
        points,
        profile.consts().tube_radius.max(profile.outer_radius()),
    );
    let floor = base.scalar() - profile.eps();
    let mut rows = Vec::with_capacity(grid.len());
    for pt in &grid.points {
        let jet = profile.jet_at(*pt)?;
        let scal = verifier::scalar_at(model, *pt)?;
        rows.push(vec![
            num(jet.radius),
            num(jet.loglog),
            num(scal),
            num(base.scalar()),
            num(scal - floor),
        ]);
    }
    formats::write_csv(
        &out_path(cfg, "scal_points.csv", out),
        &["radius", "loglog", "scal", "scal_base", "margin"],
        rows,
    )
}

/// Radii near which a model's third derivatives may jump.
pub fn breakpoints(model: &ModelMetric) -> Vec<f64> {
    match model {
        ModelMetric::FlatTorusDrawstring { profile, .. } | ModelMetric::RoundS3Drawstring { profile } => {
            profile.breakpoints()
        }
        ModelMetric::AfSchwarzschildCap { .. } => AF_BREAKPOINTS.to_vec(),
        _ => Vec::new(),
    }
}

/// Relative agreement required between closed form and oracle.
pub const SCAN_TOLERANCE: f64 = 1e-3;
/// Absolute floor of the relative comparison, for values near zero.
pub const SCAN_FLOOR: f64 = 1e-2;

fn scan_curvature(cfg: &RunConfig) -> Result<Outcome> {
    let model = presets::model(cfg)?;
    let (lo, hi) = presets::scan_range(&model);
    let (a_lo, a_hi) = presets::angle_range(&model);
    let breaks = breakpoints(&model);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut out = Outcome::new();
    let mut rows = Vec::new();
    let mut worst: f64 = 0.0;
    let mut compared = 0usize;
    for r in math::log_space(lo, hi, cfg.points.unwrap_or(200)) {
        let angle = rng.gen_range(a_lo..a_hi);
        let t = rng.gen_range(0.0..model.t_period());
        let step = curvature::default_step(r);
        let near = breaks.iter().any(|b| (r - b).abs() <= 4.0 * step);
        let s = curvature::sample_curvature(&model, [r, angle, t], step)?;
        let gap = s.relative_gap(SCAN_FLOOR);
        if let (Some(g), false) = (gap, near) {
            worst = worst.max(if g.is_nan() { f64::INFINITY } else { g });
            compared += 1;
        }
        rows.push(vec![
            num(r),
            num(angle),
            num(t),
            num(s.scal_closed.unwrap_or(f64::NAN)),
            num(s.scal_oracle),
            num(gap.unwrap_or(f64::NAN)),
            num(s.mean_curv.unwrap_or(f64::NAN)),
            near.to_string(),
        ]);
    }
    formats::write_csv(
        &out_path(cfg, "scan.csv", &mut out),
        &["r", "angle", "t", "scal_closed", "scal_oracle", "rel_gap", "mean_curv", "near_breakpoint"],
        rows,
    )?;
    out.check(
        worst <= SCAN_TOLERANCE,
        format!("scan.cross_oracle compared={compared} worst_rel_gap={}", num(worst)),
    );
    Ok(out)
}

/// Outer radius of member `i` of the desk-scale pulled sequence.
pub fn desk_sequence_radius(i: usize) -> f64 {
    0.32 / i as f64
}

/// Number of members in the pulled-metric sequences.
pub const SEQUENCE_LEN: usize = 8;

/// Boundary value of member `i` converging to the pull exponent `c`:
/// `v0 ≡ −c` for finite `c`, `v0 ≡ −i` for `c = ∞`.
pub fn sequence_v0(c: PullExponent, i: usize) -> f64 {
    match c {
        PullExponent::Finite(c) => -c,
        PullExponent::Infinite => -(i as f64),
    }
}

pub fn pull_exponent(c: f64) -> PullExponent {
    if c.is_infinite() {
        PullExponent::Infinite
    } else {
        PullExponent::Finite(c)
    }
}

/// Member `i ≥ 1` of a drawstring sequence with `ε_i = 1/i`.
pub fn sequence_member(preset: PresetName, c: PullExponent, i: usize, t_period: f64) -> Result<ModelMetric> {
    let eps = 1.0 / i as f64;
    let v0 = sequence_v0(c, i);
    let consts = match preset {
        PresetName::RoundS3 | PresetName::RoundS3Desk => GeometryConstants::round_s3(),
        _ => GeometryConstants::flat_torus(t_period),
    };
    let profile = match preset {
        PresetName::FlatTorus | PresetName::RoundS3 => {
            DrawstringProfile::build(consts, BoundaryFunction::constant(v0)?, eps)?
        }
        PresetName::FlatTorusDesk | PresetName::RoundS3Desk => {
            presets::desk_profile(consts, v0, eps, desk_sequence_radius(i))?
        }
        other => return Err(CliError::Config(format!("pulled needs a drawstring preset, got {other:?}"))),
    };
    presets::drawstring_model(preset, profile, t_period)
}

/// Sample pairs: points across the axis plus `extra` seeded random pairs.
pub fn study_pairs(lattice: &Lattice, seed: u64, extra: usize) -> Vec<(usize, usize)> {
    let mut pairs = pulled::opposite_pairs(lattice, 0.6 * lattice.half_width);
    let n = lattice.side() * lattice.side() * lattice.t_layers;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..extra {
        pairs.push((rng.gen_range(0..n), rng.gen_range(0..n)));
    }
    pairs
}

/// Convergence study of `d_{g_i}` towards `d_c` along a sequence.
pub fn run_study(
    preset: PresetName,
    c: PullExponent,
    resolution: usize,
    t_period: f64,
    seed: u64,
) -> Result<(Vec<ModelMetric>, StudyTable)> {
    let models = (1..=SEQUENCE_LEN)
        .map(|i| sequence_member(preset, c, i, t_period))
        .collect::<Result<Vec<_>>>()?;
    let lattice = Lattice::for_model(&models[0], resolution);
    let pairs = study_pairs(&lattice, seed, 8);
    let table = pulled::convergence_study(&models, &lattice, c, &pairs)?;
    Ok((models, table))
}

fn pulled_study(cfg: &RunConfig) -> Result<Outcome> {
    require_drawstring(cfg)?;
    let c = pull_exponent(cfg.c_pull);
    let (models, table) = run_study(cfg.preset(), c, cfg.resolution, cfg.t_period, cfg.seed)?;
    let mut out = Outcome::new();
    let rows = table.rows.iter().map(|row| {
        let p = models[row.index].profile().expect("drawstring model");
        vec![
            (row.index + 1).to_string(),
            num(p.eps()),
            num(p.outer_radius()),
            num(p.v0().min_value()),
            num(row.sup_deviation),
        ]
    });
    formats::write_csv(
        &out_path(cfg, "pulled.csv", &mut out),
        &["index", "eps", "r1", "v0", "sup_deviation"],
        rows,
    )?;
    if cfg.export_space {
        let base = models[0].baseline().expect("drawstring model");
        let lattice = Lattice::for_model(&models[0], cfg.resolution);
        let space = pulled::discretize_on(&base, &lattice)?;
        let nodes = out_path(cfg, "nodes.csv", &mut out);
        let edges = out_path(cfg, "edges.csv", &mut out);
        formats::write_space(&space, &nodes, &edges)?;
    }
    let slack = 2.0 * table.mesh;
    out.check(
        table.nonincreasing_within(slack),
        format!(
            "pulled.convergence mesh={} pairs={} first={} last={}",
            num(table.mesh),
            table.n_pairs,
            num(table.rows.first().map_or(f64::NAN, |r| r.sup_deviation)),
            num(table.rows.last().map_or(f64::NAN, |r| r.sup_deviation)),
        ),
    );
    Ok(out)
}

/// Smallest radius of the tabulated inversion curve; gives `r̃ < 1e-7`.
pub const INVERSION_R_MIN: f64 = 1e-9;

fn inversion_curve(cfg: &RunConfig) -> Result<Outcome> {
    let curve = inversion::build_inversion_curve(cfg.delta, INVERSION_R_MIN, cfg.points.unwrap_or(4000))?;
    let mut out = Outcome::new();
    write_inversion_csv(&curve, &out_path(cfg, "inversion.csv", &mut out))?;
    if cfg.delta == 0.0 {
        let report = inversion::asymptotics_check(&curve)?;
        for row in &report.levels {
            out.note(format!(
                "r_tilde={} A={} B={}",
                num(row.r_tilde),
                num(row.u_deviation),
                num(row.f_deviation)
            ));
        }
        out.check(report.finest_u_ok, "inversion.u_limit |A| < 0.05 at r_tilde = 1e-6".into());
        out.check(report.finest_f_ok, "inversion.f_limit |B + 1| < 0.05 at r_tilde = 1e-6".into());
        out.check(report.u_trend_ok, "inversion.u_trend |A| decreasing".into());
        out.check(report.f_trend_ok, "inversion.f_trend |B + 1| decreasing".into());
    } else {
        let grid = math::lin_space(0.01, PI - 0.01, 1000);
        let reports = inversion::supersolution_check(cfg.delta, &grid)?;
        write_reports(cfg, &reports, &mut out)?;
    }
    Ok(out)
}

fn write_inversion_csv(curve: &InversionCurve, path: &Path) -> Result<()> {
    let rows = curve.rows()?.into_iter().map(|row| {
        vec![
            num(row.r),
            num(row.r_tilde),
            num(row.f),
            num(row.u),
            num(row.u_deviation),
            num(row.f_deviation),
        ]
    });
    formats::write_csv(path, &["r", "r_tilde", "f", "u", "A", "B"], rows)
}

/// Exact solution of `h'' = −κ h`, `h(0) = 0`, `h'(0) = 1`.
pub fn jacobi_reference(kappa: f64, r: f64) -> f64 {
    if kappa > 0.0 {
        let k = kappa.sqrt();
        (k * r).sin() / k
    } else if kappa < 0.0 {
        let k = (-kappa).sqrt();
        (k * r).sinh() / k
    } else {
        r
    }
}

/// Window of the `(h² − r²)/r⁴` fit.
pub const QUARTIC_WINDOW: (f64, f64) = (0.01, 0.1);

fn jacobi(cfg: &RunConfig) -> Result<Outcome> {
    let kappa = cfg.kappa;
    let sol = curvature::jacobi_solve(&|_| kappa, 1.0, cfg.steps.unwrap_or(1024))?;
    let ratio = sol.h_over_r();
    let mut out = Outcome::new();
    let mut worst: f64 = 0.0;
    let mut rows = Vec::with_capacity(sol.grid.len());
    for (i, &r) in sol.grid.iter().enumerate() {
        let reference = jacobi_reference(kappa, r);
        worst = worst.max((sol.h_values[i] - reference).abs());
        rows.push(vec![
            num(r),
            num(sol.h_values[i]),
            num(sol.hr_values[i]),
            num(ratio[i]),
            num(reference),
        ]);
    }
    formats::write_csv(
        &out_path(cfg, "jacobi.csv", &mut out),
        &["r", "h", "h_r", "h_over_r", "reference"],
        rows,
    )?;
    out.check(worst <= 1e-8, format!("jacobi.reference max_abs_error={}", num(worst)));
    let a = sol.quartic_coefficient(QUARTIC_WINDOW.0, QUARTIC_WINDOW.1)?;
    let target = -kappa / 3.0;
    let ok = if kappa == 0.0 {
        a.abs() <= 1e-6
    } else {
        (a - target).abs() <= 0.05 * target.abs()
    };
    out.check(ok, format!("jacobi.quartic fit={} expected={}", num(a), num(target)));
    Ok(out)
}
