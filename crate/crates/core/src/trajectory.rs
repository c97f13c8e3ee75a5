// Copyright 2026 The memorymodes Authors
// SPDX-License-Identifier: Apache-2.0

//! Stochastic unravelings.
//!
//! Both engines exploit the same structure: every member that has not
//! jumped shares one deterministic state, and every jumped member sits in
//! the ground state. An ensemble is therefore a pair of counts plus one
//! shared state per step. Each eligible member still consumes its own
//! uniform, addressed by `(member, step)`, so results do not depend on the
//! number of worker threads.
//!
//! Jump probabilities are the exact no-jump complements over a step (and,
//! for reverse jumps, the exact count balance), which reduce to the usual
//! first-order expressions for small steps.

use num_complex::Complex64 as C64;
use rayon::prelude::*;

use crate::density::{
    annihilation, hamiltonian_double, hamiltonian_single, partial_trace_pseudomodes, Basis, DensityMatrix,
    RateInterpolant,
};
use crate::error::{Error, Result};
use crate::linalg::{expm, CMatrix, CVector};
use crate::model::{derive_two_pseudomode_constants, BandGapModel, LorentzianModel, TimeGrid};
use crate::rates::RateTrajectory;
use crate::rng::CounterRng;

/// Largest allowed per-step jump probability.
pub const MAX_JUMP_PROBABILITY: f64 = 0.1;

/// Below this standard error a deviation counts as deterministic.
pub const DETERMINISTIC_TOL: f64 = 1e-8;

const NMQJ_STREAM: u32 = 1;
const MCWF_STREAM: u32 = 2;

/// Counts how many of `n` members fall in each of the cumulative bins
/// `[0, edges[0])`, `[edges[0], edges[1])`, ...
fn count_jumps(rng: &CounterRng, step: u32, n: u64, edges: &[f64]) -> Vec<u64> {
    let total = *edges.last().unwrap_or(&0.0);
    if n == 0 || total <= 0.0 {
        return vec![0; edges.len()];
    }
    (0..n)
        .into_par_iter()
        .fold(
            || vec![0u64; edges.len()],
            |mut acc, i| {
                let u = rng.uniform(i, step);
                if u < total {
                    let bin = edges.iter().position(|&e| u < e).unwrap_or(edges.len() - 1);
                    acc[bin] += 1;
                }
                acc
            },
        )
        .reduce(|| vec![0u64; edges.len()], |a, b| a.iter().zip(&b).map(|(x, y)| x + y).collect())
}

fn step_index(k: usize) -> Result<u32> {
    u32::try_from(k).map_err(|_| Error::InvalidParameter("too many time steps".into()))
}

fn check_probability(step: usize, p: f64) -> Result<()> {
    if p > MAX_JUMP_PROBABILITY || !p.is_finite() {
        return Err(Error::StepTooLarge { step, probability: p });
    }
    Ok(())
}

fn check_pure(psi: &[C64]) -> Result<()> {
    let n: f64 = psi.iter().map(|z| z.norm_sqr()).sum();
    if !((n - 1.0).abs() <= 1e-12) {
        return Err(Error::InvalidParameter(format!("initial state has norm² {n}, expected 1")));
    }
    Ok(())
}

/// One NMQJ step record. `psi0` is the shared non-jumped atomic state
/// `(C_g, C_e)` in the rotating frame.
#[derive(Debug, Clone, PartialEq)]
pub struct NmqjRecord {
    pub t: f64,
    pub n0: u64,
    pub n1: u64,
    pub psi0: [C64; 2],
    /// Forward and reverse jumps during the step ending here.
    pub forward: u64,
    pub reverse: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct NmqjEnsemble {
    pub n: u64,
    pub seed: u64,
    pub grid: TimeGrid,
    pub omega0: f64,
    pub records: Vec<NmqjRecord>,
}

impl NmqjEnsemble {
    /// `(N₀/N)|ψ₀⟩⟨ψ₀| + (N₁/N)|g⟩⟨g|` in the rotating frame.
    pub fn density(&self, k: usize) -> DensityMatrix {
        let r = &self.records[k];
        let f0 = r.n0 as f64 / self.n as f64;
        let f1 = r.n1 as f64 / self.n as f64;
        let mut m = CMatrix::from_fn(2, 2, |i, j| r.psi0[i] * r.psi0[j].conj() * f0);
        m[(0, 0)] += C64::new(f1, 0.0);
        DensityMatrix::from_matrix_unchecked(Basis::Atom, m).expect("2x2")
    }

    pub fn ground_population(&self, k: usize) -> f64 {
        let r = &self.records[k];
        (r.n1 as f64 + r.n0 as f64 * r.psi0[0].norm_sqr()) / self.n as f64
    }
}

/// Non-Markovian quantum jumps on the atom driven by a rate series.
pub fn run_nmqj(rates: &RateTrajectory, initial: [C64; 2], n: u64, seed: u64, grid: &TimeGrid) -> Result<NmqjEnsemble> {
    if n == 0 {
        return Err(Error::InvalidParameter("ensemble size must be at least 1".into()));
    }
    if rates.grid != *grid {
        return Err(Error::GridMismatch);
    }
    check_pure(&initial)?;
    let interp = RateInterpolant::new(rates).map_err(|e| match e {
        Error::RateGapTooWide { start, .. } => Error::InvalidRates(start),
        other => other,
    })?;
    let rng = CounterRng::new(seed, NMQJ_STREAM);
    let mut records = Vec::with_capacity(grid.len());
    let (mut n0, mut n1) = (n, 0u64);
    let mut psi = initial;
    records.push(NmqjRecord { t: grid.time(0), n0, n1, psi0: psi, forward: 0, reverse: 0 });
    for k in 1..grid.len() {
        let (ta, tb) = (grid.time(k - 1), grid.time(k));
        let (phase, a) = interp.integrate(ta, tb);
        let pe = psi[1].norm_sqr();
        let (mut forward, mut reverse) = (0, 0);
        if a >= 0.0 {
            let p = pe * -(-a).exp_m1();
            check_probability(k, p)?;
            forward = count_jumps(&rng, step_index(k)?, n0, &[p])[0];
        } else if n1 > 0 {
            let p = (n0 as f64 / n1 as f64) * pe * (-a).exp_m1();
            check_probability(k, p)?;
            reverse = count_jumps(&rng, step_index(k)?, n1, &[p])[0];
        }
        n0 = n0 - forward + reverse;
        n1 = n1 + forward - reverse;
        let ce = psi[1] * (C64::new(-0.5 * a, -0.5 * phase)).exp();
        let norm = (psi[0].norm_sqr() + ce.norm_sqr()).sqrt();
        psi = [psi[0] / norm, ce / norm];
        records.push(NmqjRecord { t: tb, n0, n1, psi0: psi, forward, reverse });
    }
    Ok(NmqjEnsemble { n, seed, grid: *grid, omega0: rates.omega0, records })
}

/// Reservoir model for the pseudomode unraveling.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PseudomodeModel {
    Single(LorentzianModel),
    Double(BandGapModel),
}

impl PseudomodeModel {
    pub fn basis(&self) -> Basis {
        match self {
            PseudomodeModel::Single(_) => Basis::AtomPseudomode,
            PseudomodeModel::Double(_) => Basis::AtomTwoPseudomodes,
        }
    }

    pub fn omega0(&self) -> f64 {
        match self {
            PseudomodeModel::Single(m) => m.omega0,
            PseudomodeModel::Double(m) => m.omega0,
        }
    }

    /// Rotating-frame Hamiltonian and `(rate, mode)` leak channels.
    fn generator(&self) -> Result<(CMatrix, Vec<(f64, usize)>)> {
        match self {
            PseudomodeModel::Single(m) => Ok((hamiltonian_single(m, m.omega0).matrix, vec![(m.gamma, 1)])),
            PseudomodeModel::Double(m) => {
                let c = derive_two_pseudomode_constants(m)?;
                Ok((hamiltonian_double(m, &c, m.omega0).matrix, vec![(c.gamma_p1, 1), (c.gamma_p2, 2)]))
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct McwfRecord {
    pub t: f64,
    pub n0: u64,
    pub n1: u64,
    /// Shared non-jumped state in the extended basis, rotating frame.
    pub psi0: CVector,
    /// Jumps per leak channel during the step ending here.
    pub jumps: Vec<u64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct McwfEnsemble {
    pub n: u64,
    pub seed: u64,
    pub grid: TimeGrid,
    pub omega0: f64,
    pub basis: Basis,
    /// Leak rate of each channel.
    pub channel_rates: Vec<f64>,
    pub records: Vec<McwfRecord>,
}

impl McwfEnsemble {
    /// `(N₀/N)|ψ₀⟩⟨ψ₀| + (N₁/N)|g,0…⟩⟨g,0…|` in the rotating frame.
    pub fn density(&self, k: usize) -> DensityMatrix {
        let r = &self.records[k];
        let d = self.basis.dim();
        let f0 = r.n0 as f64 / self.n as f64;
        let f1 = r.n1 as f64 / self.n as f64;
        let mut m = CMatrix::from_fn(d, d, |i, j| r.psi0[i] * r.psi0[j].conj() * f0);
        m[(0, 0)] += C64::new(f1, 0.0);
        DensityMatrix::from_matrix_unchecked(self.basis, m).expect("square")
    }

    pub fn ground_population(&self, k: usize) -> f64 {
        let r = &self.records[k];
        let g: f64 = r.psi0.iter().take(self.basis.dim() - 1).map(|z| z.norm_sqr()).sum();
        (r.n1 as f64 + r.n0 as f64 * g) / self.n as f64
    }
}

/// Markovian jumps on the atom + pseudomode space.
pub fn run_mcwf_pseudomode(model: &PseudomodeModel, initial: &[C64], n: u64, seed: u64, grid: &TimeGrid) -> Result<McwfEnsemble> {
    if n == 0 {
        return Err(Error::InvalidParameter("ensemble size must be at least 1".into()));
    }
    let basis = model.basis();
    if initial.len() != basis.dim() {
        return Err(Error::DimensionMismatch { expected: basis.dim(), found: initial.len() });
    }
    check_pure(initial)?;
    let (h, channels) = model.generator()?;
    let mut h_eff = h;
    for &(rate, mode) in &channels {
        let a = annihilation(basis, mode);
        h_eff -= (a.adjoint() * a) * C64::new(0.0, 0.5 * rate);
    }
    let half = expm(&(h_eff * C64::new(0.0, -0.5 * grid.dt())));
    let rng = CounterRng::new(seed, MCWF_STREAM);
    let mode_weight = |psi: &CVector, mode: usize| psi[mode].norm_sqr();

    let mut psi = CVector::from_column_slice(initial);
    let (mut n0, mut n1) = (n, 0u64);
    let mut records = Vec::with_capacity(grid.len());
    records.push(McwfRecord { t: grid.time(0), n0, n1, psi0: psi.clone(), jumps: vec![0; channels.len()] });
    for k in 1..grid.len() {
        let mid = &half * &psi;
        let end = &half * &mid;
        let p = (1.0 - end.norm_squared()).max(0.0);
        check_probability(k, p)?;
        // split p across channels in proportion to Simpson estimates of
        // each channel's integrated leak
        let shares: Vec<f64> = channels
            .iter()
            .map(|&(rate, mode)| rate * (mode_weight(&psi, mode) + 4.0 * mode_weight(&mid, mode) + mode_weight(&end, mode)))
            .collect();
        let share_sum: f64 = shares.iter().sum();
        let mut edges = Vec::with_capacity(channels.len());
        let mut acc = 0.0;
        for s in &shares {
            acc += if share_sum > 0.0 { p * s / share_sum } else { 0.0 };
            edges.push(acc);
        }
        if let Some(last) = edges.last_mut() {
            *last = if share_sum > 0.0 { p } else { 0.0 };
        }
        let jumps = count_jumps(&rng, step_index(k)?, n0, &edges);
        let total: u64 = jumps.iter().sum();
        n0 -= total;
        n1 += total;
        let norm = end.norm();
        psi = if norm > 0.0 { end / C64::new(norm, 0.0) } else { end };
        records.push(McwfRecord { t: grid.time(k), n0, n1, psi0: psi.clone(), jumps });
    }
    Ok(McwfEnsemble {
        n,
        seed,
        grid: *grid,
        omega0: model.omega0(),
        basis,
        channel_rates: channels.iter().map(|c| c.0).collect(),
        records,
    })
}

/// Atomic states of a pseudomode ensemble after tracing out the modes.
pub fn traced_ensemble_atom_state(ens: &McwfEnsemble) -> Vec<DensityMatrix> {
    (0..ens.records.len()).map(|k| partial_trace_pseudomodes(&ens.density(k))).collect()
}

/// Binomial standard error of a fraction with exact probability `p`.
pub fn binomial_sigma(p: f64, n: u64) -> f64 {
    let p = p.clamp(0.0, 1.0);
    (p * (1.0 - p) / n as f64).sqrt()
}

/// Continuity-corrected `dev/σ`. Ensemble estimates move in steps of
/// `lattice` (one member's weight), so half a step comes off the deviation
/// before dividing. A remaining excess within round-off scores zero; any
/// larger excess against a vanishing `σ` scores infinite.
pub fn z_score(dev: f64, sigma: f64, lattice: f64) -> f64 {
    let excess = (dev.abs() - 0.5 * lattice).max(0.0);
    if excess <= DETERMINISTIC_TOL {
        0.0
    } else if sigma > 0.0 {
        (excess / sigma).copysign(dev)
    } else {
        f64::INFINITY.copysign(dev)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonReport {
    pub grid: TimeGrid,
    pub pg_nmqj: Vec<f64>,
    pub pg_mcwf: Vec<f64>,
    pub pg_exact: Vec<f64>,
    pub sigma_nmqj: Vec<f64>,
    pub sigma_mcwf: Vec<f64>,
    /// Combined standard error of the difference of the two estimates.
    pub sigma: Vec<f64>,
    pub z_nmqj: Vec<f64>,
    pub z_mcwf: Vec<f64>,
    /// z-score of `pg_nmqj − pg_mcwf`.
    pub z: Vec<f64>,
    /// Largest |z| over all three families.
    pub max_z_score: f64,
}

/// Compares both unravelings' ground populations with an exact series of
/// atomic or joint states.
pub fn compare_unravelings(a: &NmqjEnsemble, b: &McwfEnsemble, exact: &[DensityMatrix]) -> Result<ComparisonReport> {
    if a.grid != b.grid || exact.len() != a.grid.len() || a.records.len() != exact.len() || b.records.len() != exact.len() {
        return Err(Error::GridMismatch);
    }
    let n = exact.len();
    let mut r = ComparisonReport {
        grid: a.grid,
        pg_nmqj: Vec::with_capacity(n),
        pg_mcwf: Vec::with_capacity(n),
        pg_exact: Vec::with_capacity(n),
        sigma_nmqj: Vec::with_capacity(n),
        sigma_mcwf: Vec::with_capacity(n),
        sigma: Vec::with_capacity(n),
        z_nmqj: Vec::with_capacity(n),
        z_mcwf: Vec::with_capacity(n),
        z: Vec::with_capacity(n),
        max_z_score: 0.0,
    };
    for (k, rho) in exact.iter().enumerate() {
        let p = partial_trace_pseudomodes(rho).get(0, 0).re;
        let (x, y) = (a.ground_population(k), b.ground_population(k));
        let (sa, sb) = (binomial_sigma(p, a.n), binomial_sigma(p, b.n));
        let s = sa.hypot(sb);
        // a jump moves the ground population by the jumper's excited weight
        let la = a.records[k].psi0[1].norm_sqr() / a.n as f64;
        let lb = b.records[k].psi0[b.basis.dim() - 1].norm_sqr() / b.n as f64;
        let (za, zb, zd) = (z_score(x - p, sa, la), z_score(y - p, sb, lb), z_score(x - y, s, la + lb));
        r.max_z_score = r.max_z_score.max(za.abs()).max(zb.abs()).max(zd.abs());
        r.pg_nmqj.push(x);
        r.pg_mcwf.push(y);
        r.pg_exact.push(p);
        r.sigma_nmqj.push(sa);
        r.sigma_mcwf.push(sb);
        r.sigma.push(s);
        r.z_nmqj.push(za);
        r.z_mcwf.push(zb);
        r.z.push(zd);
    }
    Ok(r)
}

/// Largest entrywise z-score of a pseudomode ensemble against an exact
/// Lindblad series. The ensemble entry is `ρ_ground + (N₀/N)(X − ρ_ground)`
/// with `X` the shared projector, so its error is binomial in the
/// non-jumped fraction `π`, recovered from the exact ground population.
pub fn mcwf_entrywise_max_z(ens: &McwfEnsemble, exact: &[DensityMatrix]) -> Result<f64> {
    if exact.len() != ens.records.len() {
        return Err(Error::GridMismatch);
    }
    let d = ens.basis.dim();
    let mut worst: f64 = 0.0;
    for (k, rho) in exact.iter().enumerate() {
        if rho.dim() != d {
            return Err(Error::DimensionMismatch { expected: d, found: rho.dim() });
        }
        let psi = &ens.records[k].psi0;
        let x00 = psi[0].norm_sqr();
        let pi = if x00 < 1.0 { ((1.0 - rho.get(0, 0).re) / (1.0 - x00)).clamp(0.0, 1.0) } else { 1.0 };
        let s = binomial_sigma(pi, ens.n);
        let est = ens.density(k);
        for i in 0..d {
            for j in 0..d {
                let mut x = psi[i] * psi[j].conj();
                if i == 0 && j == 0 {
                    x -= C64::new(1.0, 0.0);
                }
                let dev = (est.get(i, j) - rho.get(i, j)).norm();
                worst = worst.max(z_score(dev, s * x.norm(), x.norm() / ens.n as f64).abs());
            }
        }
    }
    Ok(worst)
}
