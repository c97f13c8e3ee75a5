// Copyright 2026 The memorymodes Authors
// SPDX-License-Identifier: Apache-2.0

//! Experiment orchestration and artifact writing.
//!
//! Every CSV is first written as `<name>.partial` and renamed once the
//! whole experiment has succeeded; `manifest.txt` is written last, so its
//! presence marks a completed run.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Instant;

use num_complex::Complex64 as C64;

use crate::amplitude::{propagate_double_with, propagate_single, AmplitudeState1, AmplitudeState2, AmplitudeTrajectory};
use crate::config::ModelConfig;
use crate::density::{
    evolve_atom_timelocal, evolve_lindblad_double_with, evolve_lindblad_single, Basis, DensityMatrix, DensitySeries,
};
use crate::error::{Error, Result};
use crate::export;
use crate::info::{align_extrema, info_series};
use crate::model::{derive_two_pseudomode_constants, ReservoirModel, TwoPseudomodeConstants, Validation};
use crate::rates::{
    intermode_memory_identity, memory_identity_double, memory_identity_single, rates_from_amplitudes, RateTrajectory,
};
use crate::trajectory::{compare_unravelings, run_mcwf_pseudomode, run_nmqj, McwfEnsemble, NmqjEnsemble, PseudomodeModel};

pub const DEFAULT_N: u64 = 10_000;
pub const DEFAULT_SEED: u64 = 0;
pub const MANIFEST: &str = "manifest.txt";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Experiment {
    Amplitudes,
    Rates,
    Identity,
    Evolve,
    Nmqj,
    Mcwf,
    Compare,
    Info,
    Fig2,
}

impl Experiment {
    pub const ALL: [Experiment; 9] = [
        Experiment::Amplitudes,
        Experiment::Rates,
        Experiment::Identity,
        Experiment::Evolve,
        Experiment::Nmqj,
        Experiment::Mcwf,
        Experiment::Compare,
        Experiment::Info,
        Experiment::Fig2,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Experiment::Amplitudes => "amplitudes",
            Experiment::Rates => "rates",
            Experiment::Identity => "identity",
            Experiment::Evolve => "evolve",
            Experiment::Nmqj => "nmqj",
            Experiment::Mcwf => "mcwf",
            Experiment::Compare => "compare",
            Experiment::Info => "info",
            Experiment::Fig2 => "fig2",
        }
    }

    pub fn is_stochastic(&self) -> bool {
        matches!(self, Experiment::Nmqj | Experiment::Mcwf | Experiment::Compare)
    }
}

impl FromStr for Experiment {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|e| e.name() == s)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown experiment `{s}`")))
    }
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub experiment: Experiment,
    pub model: ModelConfig,
    pub validation: Validation,
    pub n: u64,
    pub seed: u64,
    pub out_dir: PathBuf,
}

impl RunConfig {
    /// Ensemble size and seed come from the overrides, then the config file,
    /// then the defaults.
    pub fn new(
        experiment: Experiment,
        model: ModelConfig,
        validation: Validation,
        out_dir: PathBuf,
        seed: Option<u64>,
        n: Option<u64>,
    ) -> Result<Self> {
        let n = n.or(model.n).unwrap_or(DEFAULT_N);
        if n == 0 {
            return Err(Error::InvalidParameter("ensemble size must be at least 1".into()));
        }
        let seed = seed.or(model.seed).unwrap_or(DEFAULT_SEED);
        Ok(Self { experiment, model, validation, n, seed, out_dir })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunManifest {
    /// Key-value lines in output order.
    pub entries: Vec<(String, String)>,
    pub artifacts: Vec<String>,
}

impl RunManifest {
    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        for (k, v) in &self.entries {
            let _ = writeln!(out, "{k} = {v}");
        }
        out
    }
}

struct Outputs {
    dir: PathBuf,
    written: Vec<String>,
    extra: Vec<(String, String)>,
}

impl Outputs {
    fn io(path: &Path) -> impl FnOnce(std::io::Error) -> Error + '_ {
        move |source| Error::Io { path: path.to_path_buf(), source }
    }

    fn csv(&mut self, name: &str, body: String) -> Result<()> {
        let path = self.dir.join(format!("{name}.partial"));
        std::fs::write(&path, body).map_err(Self::io(&path))?;
        self.written.push(name.to_string());
        Ok(())
    }

    fn note(&mut self, key: &str, value: impl ToString) {
        self.extra.push((key.to_string(), value.to_string()));
    }

    fn commit(&self) -> Result<()> {
        for name in &self.written {
            let from = self.dir.join(format!("{name}.partial"));
            let to = self.dir.join(name);
            std::fs::rename(&from, &to).map_err(Self::io(&from))?;
        }
        Ok(())
    }
}

fn excited_amplitudes(cfg: &RunConfig) -> Result<AmplitudeTrajectory> {
    let grid = &cfg.model.grid;
    match &cfg.model.model {
        ReservoirModel::Lorentzian(m) => propagate_single(m, AmplitudeState1::excited(), grid),
        ReservoirModel::BandGap(m) => propagate_double_with(m, &constants(cfg)?, AmplitudeState2::excited(), grid),
    }
}

fn constants(cfg: &RunConfig) -> Result<TwoPseudomodeConstants> {
    match &cfg.model.model {
        ReservoirModel::BandGap(m) => match cfg.validation {
            Validation::Strict => derive_two_pseudomode_constants(m),
            Validation::AllowNonphysical => Ok(TwoPseudomodeConstants::derive_unchecked(m)),
        },
        ReservoirModel::Lorentzian(_) => Err(Error::InvalidParameter("no two-pseudomode constants for a Lorentzian".into())),
    }
}

fn joint_excited(cfg: &RunConfig) -> Result<DensitySeries> {
    let grid = &cfg.model.grid;
    match &cfg.model.model {
        ReservoirModel::Lorentzian(m) => {
            evolve_lindblad_single(m, &DensityMatrix::basis_state(Basis::AtomPseudomode, 2), grid)
        }
        ReservoirModel::BandGap(m) => {
            let rho0 = DensityMatrix::basis_state(Basis::AtomTwoPseudomodes, 3);
            evolve_lindblad_double_with(m, &constants(cfg)?, &rho0, grid)
        }
    }
}

fn pseudomode_model(cfg: &RunConfig) -> PseudomodeModel {
    match cfg.model.model {
        ReservoirModel::Lorentzian(m) => PseudomodeModel::Single(m),
        ReservoirModel::BandGap(m) => PseudomodeModel::Double(m),
    }
}

fn excited_extended(basis: Basis) -> Vec<C64> {
    let mut v = vec![C64::default(); basis.dim()];
    v[basis.dim() - 1] = C64::new(1.0, 0.0);
    v
}

const EXCITED_ATOM: [C64; 2] = [C64 { re: 0.0, im: 0.0 }, C64 { re: 1.0, im: 0.0 }];

fn nmqj(cfg: &RunConfig, rates: &RateTrajectory) -> Result<NmqjEnsemble> {
    run_nmqj(rates, EXCITED_ATOM, cfg.n, cfg.seed, &cfg.model.grid)
}

fn mcwf(cfg: &RunConfig) -> Result<McwfEnsemble> {
    let pm = pseudomode_model(cfg);
    run_mcwf_pseudomode(&pm, &excited_extended(pm.basis()), cfg.n, cfg.seed, &cfg.model.grid)
}

fn identity(cfg: &RunConfig, out: &mut Outputs, traj: &AmplitudeTrajectory, rates: &RateTrajectory) -> Result<()> {
    let report = match &cfg.model.model {
        ReservoirModel::Lorentzian(m) => memory_identity_single(traj, m.gamma, rates)?,
        ReservoirModel::BandGap(_) => {
            let c = constants(cfg)?;
            out.note("gamma_p1", export::num(c.gamma_p1));
            out.note("gamma_p2", export::num(c.gamma_p2));
            out.note("v", export::num(c.v));
            let inter = intermode_memory_identity(traj, &c)?;
            out.note("intermode_max_relative_residual", export::num(inter.max_relative_residual));
            out.csv("intermode_identity.csv", export::identity_csv(&inter))?;
            memory_identity_double(traj, &c, rates)?
        }
    };
    out.note("max_relative_residual", export::num(report.max_relative_residual));
    out.csv("identity.csv", export::identity_csv(&report))
}

fn execute(cfg: &RunConfig, out: &mut Outputs) -> Result<()> {
    let grid = &cfg.model.grid;
    match cfg.experiment {
        Experiment::Amplitudes => {
            let traj = excited_amplitudes(cfg)?;
            out.csv("amplitudes.csv", export::amplitudes_csv(&traj))?;
        }
        Experiment::Rates => {
            let rates = rates_from_amplitudes(&excited_amplitudes(cfg)?)?;
            out.note("min_gamma", export::num(rates.gamma.iter().copied().filter(|g| g.is_finite()).fold(f64::INFINITY, f64::min)));
            out.csv("rates.csv", export::rates_csv(&rates, None))?;
        }
        Experiment::Identity => {
            let traj = excited_amplitudes(cfg)?;
            let rates = rates_from_amplitudes(&traj)?;
            identity(cfg, out, &traj, &rates)?;
        }
        Experiment::Evolve => {
            let traj = excited_amplitudes(cfg)?;
            let rates = rates_from_amplitudes(&traj)?;
            let atom = evolve_atom_timelocal(&rates, &DensityMatrix::basis_state(Basis::Atom, 1), grid)?;
            let joint = joint_excited(cfg)?;
            let traced = joint.traced();
            let diff = atom
                .states
                .iter()
                .zip(&traced.states)
                .map(|(a, b)| a.max_abs_diff(b))
                .fold(0.0, f64::max);
            out.note("route_max_abs_diff", export::num(diff));
            out.note("invariants_ok", atom.invariants.ok() && joint.invariants.ok());
            out.note("min_eigenvalue", export::num(atom.invariants.min_eigenvalue.min(joint.invariants.min_eigenvalue)));
            out.csv("atom_timelocal.csv", export::density_csv(&atom))?;
            out.csv("lindblad.csv", export::density_csv(&joint))?;
            out.csv("lindblad_traced.csv", export::density_csv(&traced))?;
        }
        Experiment::Nmqj => {
            let rates = rates_from_amplitudes(&excited_amplitudes(cfg)?)?;
            out.csv("nmqj.csv", export::nmqj_csv(&nmqj(cfg, &rates)?))?;
        }
        Experiment::Mcwf => {
            out.csv("mcwf.csv", export::mcwf_csv(&mcwf(cfg)?))?;
        }
        Experiment::Compare => {
            let rates = rates_from_amplitudes(&excited_amplitudes(cfg)?)?;
            let a = nmqj(cfg, &rates)?;
            let b = mcwf(cfg)?;
            let exact = joint_excited(cfg)?;
            let report = compare_unravelings(&a, &b, &exact.states)?;
            out.note("max_z_score", export::num(report.max_z_score));
            out.csv("compare.csv", export::comparison_csv(&report))?;
        }
        Experiment::Info => {
            let joint = joint_excited(cfg)?;
            let info = info_series(&joint)?;
            let pseudo: Vec<f64> = joint.states.iter().map(|r| r.get(r.dim() - 2, r.dim() - 2).re).collect();
            let align = align_extrema(&info.mutual_information, &pseudo);
            out.note("extrema_pairs", align.pairs.len());
            out.note("extrema_max_offset_steps", align.max_offset);
            out.csv("info.csv", export::info_csv(&info))?;
        }
        Experiment::Fig2 => {
            let ReservoirModel::Lorentzian(m) = &cfg.model.model else {
                return Err(Error::InvalidParameter("fig2 needs a lorentzian model".into()));
            };
            let traj = excited_amplitudes(cfg)?;
            let rates = rates_from_amplitudes(&traj)?;
            let id = memory_identity_single(&traj, m.gamma, &rates)?;
            let negative = rates.gamma.iter().zip(&rates.valid).filter(|(g, v)| **v && **g < 0.0).count();
            out.note("negative_gamma_points", negative);
            out.note("max_relative_residual", export::num(id.max_relative_residual));
            out.csv("amplitudes.csv", export::amplitudes_csv(&traj))?;
            out.csv("rates.csv", export::rates_csv(&rates, Some(&id)))?;
            out.csv("identity.csv", export::identity_csv(&id))?;
        }
    }
    Ok(())
}

/// Runs one experiment and writes its artifacts and manifest.
pub fn run(cfg: &RunConfig) -> Result<RunManifest> {
    let start = Instant::now();
    std::fs::create_dir_all(&cfg.out_dir).map_err(Outputs::io(&cfg.out_dir))?;
    let manifest_path = cfg.out_dir.join(MANIFEST);
    match std::fs::remove_file(&manifest_path) {
        Ok(()) => {}
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => {}
        Err(source) => return Err(Error::Io { path: manifest_path, source }),
    }
    let mut out = Outputs { dir: cfg.out_dir.clone(), written: Vec::new(), extra: Vec::new() };
    execute(cfg, &mut out)?;
    out.commit()?;

    let mut entries: Vec<(String, String)> = vec![
        ("experiment".into(), cfg.experiment.name().into()),
        ("version".into(), env!("CARGO_PKG_VERSION").into()),
    ];
    for (k, v) in &cfg.model.entries {
        entries.push((format!("config.{k}"), v.clone()));
    }
    entries.push(("validation".into(), match cfg.validation {
        Validation::Strict => "strict".into(),
        Validation::AllowNonphysical => "allow-nonphysical".into(),
    }));
    if cfg.experiment.is_stochastic() {
        entries.push(("seed".into(), cfg.seed.to_string()));
        entries.push(("n".into(), cfg.n.to_string()));
    }
    if let ReservoirModel::BandGap(m) = &cfg.model.model {
        if !out.extra.iter().any(|(k, _)| k == "gamma_p1") {
            let c = TwoPseudomodeConstants::derive_unchecked(m);
            entries.push(("gamma_p1".into(), export::num(c.gamma_p1)));
            entries.push(("gamma_p2".into(), export::num(c.gamma_p2)));
        }
        entries.push(("perfect_gap".into(), m.is_perfect_gap().to_string()));
    }
    entries.extend(out.extra.iter().cloned());
    for (i, w) in cfg.model.warnings.iter().enumerate() {
        entries.push((format!("warning.{i}"), w.clone()));
    }
    entries.push(("artifacts".into(), out.written.join(",")));
    entries.push(("duration_s".into(), format!("{:.3}", start.elapsed().as_secs_f64())));
    let manifest = RunManifest { entries, artifacts: out.written.clone() };
    std::fs::write(&manifest_path, manifest.render()).map_err(Outputs::io(&manifest_path))?;
    Ok(manifest)
}
