//! Sweep pipeline: report contents, file formats, determinism, CLI exit codes.

use std::process::Command;

use resolab::harness::{execute, from_json, run, to_csv, to_json, Mode, SweepConfig, CSV_HEADER};
use resolab::Error;

fn small(mode: Mode, hs: &[f64]) -> SweepConfig {
    let mut c = SweepConfig {
        mode,
        count: false,
        ..SweepConfig::default()
    };
    c.h_grid.values = Some(hs.to_vec());
    c
}

#[test]
fn identities_only_solves_nothing() {
    let (r, _) = execute(&small(Mode::IdentitiesOnly, &[0.08])).unwrap();
    assert!(r.records.is_empty() && r.checks.is_empty());
    assert!(r.identity_checks.iter().all(|c| c.passed || !c.acceptance));
    assert!(r.pass);
}

#[test]
fn decoupled_spectrum_is_real() {
    let (r, _) = execute(&small(Mode::DecoupledOracle, &[0.08])).unwrap();
    assert!(!r.records.is_empty());
    for rec in &r.records {
        let e = rec.e_num.unwrap();
        assert!(e.im.abs() < 1e-12 * rec.h.powf(2.0 / 3.0), "{e}");
    }
    assert!(r.pass);
}

#[test]
fn files_round_trip_and_repeat() {
    let dir = tempfile::tempdir().unwrap();
    let mut c = small(Mode::Thm2Check, &[0.08, 0.057]);
    c.out = Some(dir.path().to_path_buf());
    let report = run(&c).unwrap();

    let csv = std::fs::read_to_string(dir.path().join("resonances.csv")).unwrap();
    assert!(!csv.contains('\r'));
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some(CSV_HEADER));
    let expected: i64 = report.sweep.iter().map(|s| s.k_hi - s.k_lo + 1).sum();
    assert_eq!(lines.clone().count() as i64, expected);
    for line in lines {
        let cols: Vec<&str> = line.split(',').collect();
        assert_eq!(cols.len(), 13);
        // 17 significant digits in scientific notation
        let mant = cols[2].split('e').next().unwrap();
        assert_eq!(mant.trim_start_matches('-').replace('.', "").len(), 17, "{}", cols[2]);
    }

    let json = std::fs::read_to_string(dir.path().join("report.json")).unwrap();
    let value: serde_json::Value = serde_json::from_str(&json).unwrap();
    for key in ["config", "records", "slopes", "identity_checks", "timings", "pass"] {
        assert!(value.get(key).is_some(), "missing {key}");
    }
    assert_eq!(from_json(&json).unwrap(), report);

    for name in ["width_ratio.svg", "errors.svg"] {
        let svg = std::fs::read_to_string(dir.path().join(name)).unwrap();
        let doc = roxmltree::Document::parse(&svg).unwrap();
        let lines = doc.descendants().filter(|n| n.has_tag_name("polyline")).count();
        assert!(lines >= 1, "{name}");
    }
    let ratio = std::fs::read_to_string(dir.path().join("width_ratio.svg")).unwrap();
    assert_eq!(ratio.matches("<polyline").count(), 3);

    let (again, _) = execute(&c).unwrap();
    assert_eq!(to_csv(&again), csv);
    assert_eq!(to_json(&again).unwrap(), json);
}

#[test]
fn serial_and_parallel_agree() {
    let c = small(Mode::Thm2Check, &[0.08, 0.057]);
    let one = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
    let three = rayon::ThreadPoolBuilder::new().num_threads(3).build().unwrap();
    let (a, _) = one.install(|| execute(&c)).unwrap();
    let (b, _) = three.install(|| execute(&c)).unwrap();
    assert_eq!(to_json(&a).unwrap(), to_json(&b).unwrap());
}

#[test]
fn invalid_configs_are_rejected() {
    let mut c = small(Mode::Thm2Check, &[0.04, 0.08]);
    assert!(matches!(execute(&c), Err(Error::Config(_))));
    c.h_grid.values = Some(vec![0.08]);
    c.tolerances.ode_rtol = 0.0;
    assert!(matches!(execute(&c), Err(Error::Config(_))));
}

fn resolab(args: &[&str]) -> i32 {
    Command::new(env!("CARGO_BIN_EXE_resolab"))
        .args(args)
        .output()
        .unwrap()
        .status
        .code()
        .unwrap()
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let out = out.to_str().unwrap();
    let write = |name: &str, text: &str| {
        let p = dir.path().join(name);
        std::fs::write(&p, text).unwrap();
        p.to_str().unwrap().to_string()
    };
    let ok = write("ok.toml", "mode = \"identities-only\"\n");
    assert_eq!(resolab(&["run", &ok, "--out", out]), 0);
    let bad = write("bad.toml", "mode = \"thm2-check\"\nunknown_key = 1\n");
    assert_eq!(resolab(&["run", &bad, "--out", out]), 3);
    let strict = write(
        "strict.toml",
        "mode = \"thm2-check\"\ncount = false\n[h_grid]\nvalues = [0.08]\n[tolerances]\nratio_band = 1e-9\n",
    );
    assert_eq!(resolab(&["run", &strict, "--out", out, "--jobs", "1"]), 2);
    assert!(dir.path().join("out/report.json").exists());
}
