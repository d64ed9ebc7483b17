use std::path::Path;

use serde_json::{json, Value};
use slewing_core::analysis::*;
use slewing_core::contact::{contact_force, hertz_stiffness, series_stiffness};
use slewing_core::geometry::{BearingGeometry, ErrorMap, Ring};
use slewing_core::ring::export_matrix;

fn table3(b: usize) -> BearingGeometry<f64> {
    BearingGeometry::uniform(541.0, 25.0, 13.25, std::f64::consts::FRAC_PI_4, b)
}

fn config_json(dir: &Path) -> Value {
    json!({
        "version": 1,
        "bearing": serde_json::to_value(table3(32)).unwrap(),
        "preload": 0.02,
        "errors": { "generator": {
            "centers": [ { "contact": 1, "component": "radial", "harmonics": [ { "order": 2, "amplitude": 0.01 } ] } ],
            "seed": 3 } },
        "load_cases": [ { "name": "axial", "axial_force": 30000.0 } ],
        "stiffness_curve": { "axial_displacements": [0.0, 0.01, 0.02] },
        "output_dir": dir.join("out").to_str().unwrap(),
    })
}

fn write_config(dir: &Path, v: &Value) -> std::path::PathBuf {
    let p = dir.join("run.json");
    std::fs::write(&p, serde_json::to_string_pretty(v).unwrap()).unwrap();
    p
}

fn config_error(dir: &Path, v: &Value) -> String {
    let p = write_config(dir, v);
    match Analysis::load(&p) {
        Ok(_) => panic!("accepted invalid configuration {v}"),
        Err(e) => e.to_string(),
    }
}

#[test]
fn schema_is_json_and_matches_the_config_fields() {
    let schema: Value = serde_json::from_str(RUN_CONFIG_SCHEMA).unwrap();
    let props = schema["properties"].as_object().unwrap();
    let cfg = serde_json::to_value(RunConfig::new(table3(32))).unwrap();
    let mut fields: Vec<&String> = cfg.as_object().unwrap().keys().collect();
    let mut documented: Vec<&String> = props.keys().collect();
    fields.sort();
    documented.sort();
    assert_eq!(fields, documented);
    let bearing = schema["$defs"]["bearing"]["properties"].as_object().unwrap();
    let mut b: Vec<&String> = bearing.keys().collect();
    b.sort();
    let g = serde_json::to_value(table3(32)).unwrap();
    let mut gk: Vec<&String> = g.as_object().unwrap().keys().collect();
    gk.sort();
    assert_eq!(b, gk);
}

#[test]
fn invalid_configurations_are_rejected_with_reasons() {
    let dir = tempfile::tempdir().unwrap();
    let base = config_json(dir.path());

    let mut v = base.clone();
    v["version"] = json!(2);
    assert!(config_error(dir.path(), &v).contains("version"));

    let mut v = base.clone();
    v["unexpected"] = json!(1);
    assert!(config_error(dir.path(), &v).contains("unexpected"));

    let mut v = base.clone();
    v["errors"] = json!({ "file": { "centers": "missing.csv", "balls": "missing_balls.csv" } });
    assert!(config_error(dir.path(), &v).contains("not found"));

    let mut v = base.clone();
    v["errors"] = json!({ "generator": { "centers": [] } });
    assert!(config_error(dir.path(), &v).contains("seed"));

    let mut v = base.clone();
    v["sweep"] = json!({ "preloads": [0.0], "samples": 2 });
    assert!(config_error(dir.path(), &v).contains("seed"));

    let mut v = base.clone();
    v["stiffness_curve"] = json!({ "axial_displacements": [0.0, 0.02, 0.01] });
    assert!(config_error(dir.path(), &v).contains("strictly increasing"));

    let mut v = base.clone();
    v["load_cases"] = json!([ { "name": "a" }, { "name": "a" } ]);
    assert!(config_error(dir.path(), &v).contains("duplicate"));

    let mut v = base;
    v["errors"]["generator"]["centers"][0]["harmonics"][0]["amplitude"] = json!(-0.01);
    assert!(config_error(dir.path(), &v).contains("non-negative"));
}

#[test]
fn relative_paths_resolve_against_the_config_directory() {
    let dir = tempfile::tempdir().unwrap();
    let geom = table3(32);
    let spec = ErrorGeneratorSpec::radial_harmonic(3, 0.004, 0);
    let generated = generate_errors(&spec, &geom);
    let data = dir.path().join("data");
    std::fs::create_dir(&data).unwrap();
    generated.write_csv(data.join("centers.csv"), data.join("balls.csv")).unwrap();

    let mut v = config_json(dir.path());
    v["errors"] = json!({ "file": { "centers": "data/centers.csv", "balls": "data/balls.csv" } });
    v["output_dir"] = json!("results");
    let a = Analysis::load(write_config(dir.path(), &v)).unwrap();
    assert_eq!(a.output_dir(), dir.path().join("results"));
    let read = a.errors().unwrap();
    assert_eq!(read.preload, 0.02);
    for b in 0..32 {
        for c in 0..4 {
            assert!((read.center_radial[b][c] - generated.center_radial[b][c]).abs() < 1e-15);
        }
    }
}

#[test]
fn ring_matrix_files_reproduce_the_condensed_rings() {
    let dir = tempfile::tempdir().unwrap();
    let a = Analysis::new(RunConfig::new(table3(32))).unwrap();
    let (outer, inner) = a.ring_matrices().unwrap();
    export_matrix(&outer, dir.path().join("outer.kmat")).unwrap();
    export_matrix(&inner, dir.path().join("inner.kmat")).unwrap();

    let mut v = config_json(dir.path());
    v["errors"] = Value::Null;
    v["rings"] = json!({ "outer": { "matrix": "outer.kmat" }, "inner": { "matrix": "inner.kmat" } });
    let b = Analysis::load(write_config(dir.path(), &v)).unwrap();
    let (o2, i2) = b.ring_matrices().unwrap();
    for (x, y) in [(&outer, &o2), (&inner, &i2)] {
        let (dx, dy) = (x.to_dense(), y.to_dense());
        let scale = dx.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        assert!(dx.iter().zip(&dy).all(|(p, q)| (p - q).abs() <= 1e-12 * scale));
    }

    // a matrix of the wrong ring is refused
    v["rings"] = json!({ "outer": { "matrix": "inner.kmat" } });
    let c = Analysis::load(write_config(dir.path(), &v)).unwrap();
    assert!(c.ring_matrix(Ring::Outer).is_err());
}

#[test]
fn run_outputs_are_complete_and_byte_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let v = config_json(dir.path());
    let a = Analysis::load(write_config(dir.path(), &v)).unwrap();
    let out = a.output_dir().to_path_buf();
    let files = [
        "rigid/idle/solution.json",
        "rigid/idle/balls.csv",
        "rigid/axial/solution.json",
        "rigid/axial/balls.csv",
        "rigid/curve.csv",
        "summary.json",
    ];
    let mut first = Vec::new();
    for round in 0..2 {
        let mut summary = RunSummary::new();
        a.run_solve(RingMode::Rigid, SolveKind::Load, false, &mut summary).unwrap();
        a.run_curve(RingMode::Rigid, &mut summary).unwrap();
        summary.write(out.join("summary.json")).unwrap();
        assert!(summary.ok);
        let contents: Vec<Vec<u8>> = files.iter().map(|f| std::fs::read(out.join(f)).unwrap()).collect();
        if round == 0 {
            first = contents;
        } else {
            assert_eq!(first, contents);
        }
    }

    let balls = std::fs::read_to_string(out.join("rigid/axial/balls.csv")).unwrap();
    let mut lines = balls.lines();
    assert_eq!(lines.next().unwrap(), BALLS_HEADER.join(","));
    assert_eq!(lines.count(), 64);

    let summary: Value = serde_json::from_slice(&std::fs::read(out.join("summary.json")).unwrap()).unwrap();
    let eq = &summary["solves"][1]["equilibrium"];
    assert_eq!(eq["satisfied"], json!(true));
    assert!(eq["residuals"][0].as_f64().unwrap().abs() <= 1e-4 * 30000.0);

    let sol: Value = serde_json::from_slice(&std::fs::read(out.join("rigid/axial/solution.json")).unwrap()).unwrap();
    assert_eq!(sol["balls"].as_array().unwrap().len(), 32);
    assert_eq!(sol["converged"], json!(true));
}

#[test]
fn flexible_rings_lower_and_smooth_the_interferences() {
    let mut cfg = RunConfig::new(table3(32));
    cfg.preload = 0.02;
    let a = Analysis::new(cfg).unwrap();
    let stats = |mode| {
        let sols = a.solve(mode, SolveKind::Idle, false).unwrap();
        let d: Vec<f64> = sols[0].1.interferences().collect();
        let mean = d.iter().sum::<f64>() / d.len() as f64;
        mean
    };
    let (rigid, flexible) = (stats(RingMode::Rigid), stats(RingMode::Flexible));
    assert!((rigid - 0.02).abs() < 1e-9);
    assert!(flexible < rigid, "flexible {flexible} rigid {rigid}");
}

fn sweep_analysis(generator: Option<ErrorGeneratorSpec>, samples: usize) -> Analysis {
    let mut cfg = RunConfig::new(table3(16));
    cfg.sweep = Some(SweepSpec {
        preloads: vec![0.005, 0.01, 0.02],
        samples,
        seed: 9,
        generator,
        stiffness_step: 1e-3,
    });
    Analysis::new(cfg).unwrap()
}

#[test]
fn zero_variance_sweep_has_zero_band_width_and_matches_a_single_run() {
    let zero = ErrorGeneratorSpec {
        centers: vec![],
        ball_diameter: Some(BallDiameterSpec {
            mean: 0.0,
            std: 0.0,
            lower: -0.001,
            upper: 0.001,
        }),
        seed: 0,
    };
    let a = sweep_analysis(Some(zero), 4);
    let (bands, failed) = a.sweep(RingMode::Rigid).unwrap();
    assert_eq!(failed, 0);
    for b in &bands {
        assert_eq!(b.max - b.min, 0.0, "{b:?}");
        assert_eq!(b.samples, 4);
    }
    // degenerate sampler: the band mean is the deterministic zero-error run
    for &p in &[0.005, 0.01, 0.02] {
        let mut cfg = a.config.clone();
        cfg.preload = p;
        let single = Analysis::new(cfg).unwrap().solve(RingMode::Rigid, SolveKind::Idle, false).unwrap();
        let sol = &single[0].1;
        let band = bands.iter().find(|b| b.preload == p && b.metric == Metric::MaxForce).unwrap();
        assert!((band.mean - sol.max_force()).abs() <= 1e-9 * sol.max_force());
    }
}

#[test]
fn mean_max_force_grows_with_preload_like_the_single_ball_law() {
    let a = sweep_analysis(None, 1);
    let (bands, _) = a.sweep(RingMode::Rigid).unwrap();
    let forces: Vec<f64> = bands
        .iter()
        .filter(|b| b.metric == Metric::MaxForce)
        .map(|b| b.mean)
        .collect();
    assert!(forces.windows(2).all(|w| w[1] > w[0]));
    for (f, p) in forces.iter().zip([0.005, 0.01, 0.02]) {
        // zero errors, rigid rings: every diagonal carries the preload, on a
        // ball enlarged by it
        let dw = 25.0 + p;
        let k = hertz_stiffness(dw, dw / (2.0 * 13.25), 1.0).unwrap();
        let q = contact_force(series_stiffness(k, k), p);
        assert!((f - q).abs() <= 1e-6 * q, "{f} vs {q}");
    }
}

#[test]
fn sampled_sweeps_are_reproducible_and_respect_the_seed() {
    let spec = ErrorGeneratorSpec {
        centers: vec![],
        ball_diameter: Some(BallDiameterSpec {
            mean: 0.0,
            std: 0.002,
            lower: -0.004,
            upper: 0.004,
        }),
        seed: 0,
    };
    let a = sweep_analysis(Some(spec), 6);
    let (b1, _) = a.sweep(RingMode::Rigid).unwrap();
    let (b2, _) = a.sweep(RingMode::Rigid).unwrap();
    assert_eq!(b1, b2);
    assert!(b1.iter().any(|b| b.max > b.min));
    let mut other = a.config.clone();
    other.sweep.as_mut().unwrap().seed = 10;
    let (b3, _) = Analysis::new(other).unwrap().sweep(RingMode::Rigid).unwrap();
    assert_ne!(b1, b3);
}

#[test]
fn generated_errors_feed_the_model() {
    let mut cfg = RunConfig::new(table3(32));
    // moving all four centers radially together would leave both diagonals
    // unchanged, so perturb the outer raceway of contact 1 only
    let mut spec = ErrorGeneratorSpec::radial_harmonic(2, 0.01, 1);
    spec.centers.truncate(1);
    cfg.errors = Some(ErrorSource::Generator(spec));
    let a = Analysis::new(cfg).unwrap();
    let e = a.errors().unwrap();
    assert_ne!(e, ErrorMap::zero(32));
    let sols = a.solve(RingMode::Rigid, SolveKind::Idle, false).unwrap();
    let d: Vec<f64> = sols[0].1.interferences().collect();
    let spread = d.iter().fold(f64::NEG_INFINITY, |m, &v| m.max(v)) - d.iter().fold(f64::INFINITY, |m, &v| m.min(v));
    assert!(spread > 1e-3);
}
