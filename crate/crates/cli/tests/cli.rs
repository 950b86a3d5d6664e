use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use clap::ValueEnum;

use drawstring::config::{Command as Cmd, PresetName, RunConfig};
use drawstring::formats::{self, ProfileDoc};
use drawstring::presets;
use drawstring_core::models::ModelMetric;
use drawstring_core::pulled::{self, PullExponent};

fn drawstring(args: &[&str], out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_drawstring"))
        .args(args)
        .arg("--out")
        .arg(out)
        .output()
        .expect("binary runs")
}

fn csv_rows(path: &Path) -> Vec<Vec<String>> {
    let text = fs::read_to_string(path).unwrap();
    assert!(!text.contains('\r'), "CSV must use LF line endings");
    text.lines().skip(1).map(|l| l.split(',').map(String::from).collect()).collect()
}

#[test]
fn verify_flat_torus_passes() {
    let dir = tempfile::tempdir().unwrap();
    let out = drawstring(&["verify", "--preset", "flat-torus", "--eps", "0.01", "--v0", "-1"], dir.path());
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
    let reports: serde_json::Value = serde_json::from_str(&fs::read_to_string(dir.path().join("reports.json")).unwrap()).unwrap();
    let reports = reports.as_array().unwrap();
    assert!(reports.len() > 20);
    for r in reports {
        for key in ["check_id", "params", "n_points", "worst_margin", "violations", "passed"] {
            assert!(r.get(key).is_some(), "missing {key}");
        }
        assert_eq!(r["passed"], true, "{}", r["check_id"]);
    }
}

#[test]
fn scan_of_round_sphere_reads_six() {
    let dir = tempfile::tempdir().unwrap();
    let out = drawstring(&["scan-curvature", "--preset", "round-s3-baseline"], dir.path());
    assert_eq!(out.status.code(), Some(0));
    let rows = csv_rows(&dir.path().join("scan.csv"));
    assert_eq!(rows.len(), 200);
    for row in rows {
        let closed: f64 = row[3].parse().unwrap();
        let oracle: f64 = row[4].parse().unwrap();
        assert!((closed - 6.0).abs() <= 1e-4, "{closed}");
        assert!((oracle - 6.0).abs() <= 6.0 * drawstring::commands::SCAN_TOLERANCE, "{oracle}");
        let mantissa = row[3].split('e').next().unwrap();
        assert_eq!(mantissa.chars().filter(char::is_ascii_digit).count(), 17);
    }
}

#[test]
fn coarse_pulled_grid_is_a_resolution_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = drawstring(&["pulled", "--c", "inf", "--resolution", "8"], dir.path());
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("resolution"));
}

#[test]
fn bad_flags_and_failed_checks_have_distinct_codes() {
    let dir = tempfile::tempdir().unwrap();
    let usage = drawstring(&["verify", "--no-such-flag"], dir.path());
    assert_eq!(usage.status.code(), Some(2));
    let invalid = drawstring(&["verify", "--v0", "0.5"], dir.path());
    assert_eq!(invalid.status.code(), Some(2));
    let failed = drawstring(&["inversion"], dir.path());
    assert_eq!(failed.status.code(), Some(1));
    assert!(dir.path().join("inversion.csv").exists());
}

#[test]
fn profile_json_round_trips_exactly() {
    let dir = tempfile::tempdir().unwrap();
    for preset in ["flat-torus", "round-s3", "flat-torus-desk"] {
        let out = drawstring(&["build-profile", "--preset", preset], dir.path());
        assert_eq!(out.status.code(), Some(0));
        let doc = ProfileDoc::read(&dir.path().join("profile.json")).unwrap();
        let cfg = RunConfig {
            command: Cmd::BuildProfile,
            preset: Some(PresetName::from_str(preset, false).unwrap()),
            ..RunConfig::default()
        };
        let original = presets::profile(&cfg).unwrap();
        let rebuilt = doc.to_profile().unwrap();
        assert_eq!(rebuilt, original);
        assert_eq!(ProfileDoc::from_profile(&rebuilt), doc);
    }
}

#[test]
fn config_file_is_used_and_flags_win() {
    let dir = tempfile::tempdir().unwrap();
    let cfg_path = dir.path().join("run.toml");
    let cfg = RunConfig {
        command: Cmd::Jacobi,
        kappa: 0.5,
        steps: Some(512),
        ..RunConfig::default()
    };
    fs::write(&cfg_path, cfg.to_toml_string().unwrap()).unwrap();
    let out = drawstring(&["jacobi", "--config", cfg_path.to_str().unwrap(), "--kappa", "-1"], dir.path());
    assert_eq!(out.status.code(), Some(0));
    let rows = csv_rows(&dir.path().join("jacobi.csv"));
    assert_eq!(rows.len(), 513);
    let last = &rows[512];
    let reference: f64 = last[4].parse().unwrap();
    assert!((reference - 1f64.sinh()).abs() < 1e-15);
}

#[test]
fn identical_runs_write_identical_files() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    for out in [&a, &b] {
        let o = drawstring(&["scan-curvature", "--preset", "af", "--seed", "11"], out);
        assert_eq!(o.status.code(), Some(0));
    }
    assert_eq!(fs::read(a.join("scan.csv")).unwrap(), fs::read(b.join("scan.csv")).unwrap());
    let c = dir.path().join("c");
    drawstring(&["scan-curvature", "--preset", "af", "--seed", "12"], &c);
    assert_ne!(fs::read(a.join("scan.csv")).unwrap(), fs::read(c.join("scan.csv")).unwrap());
}

#[test]
fn space_csv_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let space = pulled::discretize(&ModelMetric::flat_baseline(), 8).unwrap();
    let nodes = dir.path().join("nodes.csv");
    let edges = dir.path().join("edges.csv");
    formats::write_space(&space, &nodes, &edges).unwrap();
    let back = formats::read_space(&nodes, &edges).unwrap();
    assert_eq!(back.coords(), space.coords());
    assert_eq!(back.edges(), space.edges());
    assert_eq!(back.pulled_nodes(), space.pulled_nodes());
    let a = space.pulled_distance(0, 40, PullExponent::Finite(0.5)).unwrap();
    assert_eq!(back.pulled_distance(0, 40, PullExponent::Finite(0.5)).unwrap(), a);
}

#[test]
fn inversion_csv_has_the_plot_columns() {
    let dir = tempfile::tempdir().unwrap();
    let out = drawstring(&["inversion", "--delta", "0.1", "--points", "50"], dir.path());
    assert_eq!(out.status.code(), Some(0));
    let text = fs::read_to_string(dir.path().join("inversion.csv")).unwrap();
    assert!(text.starts_with("r,r_tilde,f,u,A,B\n"));
    assert_eq!(text.lines().count(), 51);
}
