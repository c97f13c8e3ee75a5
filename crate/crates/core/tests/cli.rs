// Copyright 2026 The memorymodes Authors
// SPDX-License-Identifier: Apache-2.0

mod common;

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use memorymodes::config::validate_config;
use memorymodes::model::{ReservoirModel, Validation};

use common::*;

const PERFECT_GAP: &str = "model = bandgap
omega0 = 0
omega_c = 0
w1 = 2
w2 = 1
gamma1 = 4
gamma2 = 2
omega_coupling = 1
t_end = 20
n_steps = 2000
";

const SMALL_LORENTZIAN: &str = "model = lorentzian
omega0 = 0
omega_c = 2.4
gamma = 0.6
omega_coupling = 0.3872983346207417
t_end = 10
n_steps = 1000
";

fn preset() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../presets/fig2.conf")
}

fn write_config(dir: &Path, text: &str) -> PathBuf {
    let path = dir.join("run.conf");
    std::fs::write(&path, text).unwrap();
    path
}

fn memorymodes(args: &[&str], config: &Path, out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_memorymodes"))
        .args(args)
        .arg("--config")
        .arg(config)
        .arg("--out")
        .arg(out)
        .output()
        .unwrap()
}

fn manifest(dir: &Path) -> BTreeMap<String, String> {
    std::fs::read_to_string(dir.join("manifest.txt"))
        .unwrap()
        .lines()
        .filter_map(|l| l.split_once(" = "))
        .map(|(k, v)| (k.to_string(), v.to_string()))
        .collect()
}

#[test]
fn preset_matches_caption() {
    let cfg = validate_config(&preset(), Validation::Strict).unwrap();
    let ReservoirModel::Lorentzian(m) = cfg.model else { panic!("wrong model") };
    assert_eq!(m.gamma, FIG2_GAMMA);
    assert_eq!(m.coupling, fig2_coupling());
    assert_eq!(m.omega_c - m.omega0, FIG2_DETUNING);
    assert_eq!((cfg.grid.t_start(), cfg.grid.t_end(), cfg.grid.n_steps()), (0.0, 10.0, 4000));
}

#[test]
fn missing_key_exits_with_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let text = SMALL_LORENTZIAN.replace("omega_coupling = 0.3872983346207417\n", "");
    let out = memorymodes(&["rates"], &write_config(dir.path(), &text), &dir.path().join("out"));
    assert_eq!(out.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("omega_coupling"), "{stderr}");
    assert!(!dir.path().join("out/manifest.txt").exists());
}

#[test]
fn nonphysical_band_gap_exits_with_physics_error() {
    let dir = tempfile::tempdir().unwrap();
    let text = PERFECT_GAP.replace("w1 = 2", "w1 = 1.5");
    let cfg = write_config(dir.path(), &text);
    let out = memorymodes(&["identity"], &cfg, &dir.path().join("out"));
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("Gamma'1"));
    let out = memorymodes(&["amplitudes", "--allow-nonphysical"], &cfg, &dir.path().join("out"));
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn perfect_gap_identity_records_zero_leak() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().join("out");
    let out = memorymodes(&["identity"], &write_config(dir.path(), PERFECT_GAP), &out_dir);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let m = manifest(&out_dir);
    assert_eq!(m["gamma_p1"].parse::<f64>().unwrap(), 0.0);
    assert_eq!(m["perfect_gap"], "true");
    assert!(out_dir.join("intermode_identity.csv").exists());
}

#[test]
fn manifest_lists_every_output() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), SMALL_LORENTZIAN);
    for exp in ["amplitudes", "rates", "identity", "evolve", "nmqj", "mcwf", "compare", "info", "fig2"] {
        let out_dir = dir.path().join(exp);
        let out = memorymodes(&[exp, "--n", "200"], &cfg, &out_dir);
        assert!(out.status.success(), "{exp}: {}", String::from_utf8_lossy(&out.stderr));
        let m = manifest(&out_dir);
        assert_eq!(m["experiment"], exp);
        let listed: Vec<&str> = m["artifacts"].split(',').collect();
        let mut present: Vec<String> = std::fs::read_dir(&out_dir)
            .unwrap()
            .map(|e| e.unwrap().file_name().into_string().unwrap())
            .filter(|f| f != "manifest.txt")
            .collect();
        present.sort();
        let mut listed_sorted: Vec<String> = listed.iter().map(|s| s.to_string()).collect();
        listed_sorted.sort();
        assert_eq!(present, listed_sorted, "{exp}");
        assert!(present.iter().all(|f| !f.ends_with(".partial")));
        if matches!(exp, "nmqj" | "mcwf" | "compare") {
            assert_eq!((m["seed"].as_str(), m["n"].as_str()), ("0", "200"), "{exp}");
        }
    }
}

#[test]
fn compare_is_byte_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), SMALL_LORENTZIAN);
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    for d in [&a, &b] {
        let out = memorymodes(&["compare", "--n", "10000", "--seed", "42"], &cfg, d);
        assert!(out.status.success());
    }
    let read = |d: &Path| std::fs::read(d.join("compare.csv")).unwrap();
    assert_eq!(read(&a), read(&b));
}

#[test]
fn fig2_preset_emits_compensated_rate() {
    let dir = tempfile::tempdir().unwrap();
    let out = memorymodes(&["fig2"], &preset(), dir.path());
    assert!(out.status.success());
    let text = std::fs::read_to_string(dir.path().join("rates.csv")).unwrap();
    let rows: Vec<Vec<f64>> = text.lines().skip(1).map(|l| l.split(',').map(|x| x.parse().unwrap()).collect()).collect();
    assert_eq!(rows.len(), 4001);
    // compensated rate equals γ|c1|², so its sign tracks γ wherever c1 is not tiny
    for r in rows.iter().skip(1) {
        assert!((r[4] - r[5]).abs() < 1e-6 * r[5].abs().max(1e-3));
    }
}
