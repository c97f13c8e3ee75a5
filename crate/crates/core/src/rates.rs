// Copyright 2026 The memorymodes Authors
// SPDX-License-Identifier: Apache-2.0

//! Time-local master-equation coefficients and the pseudomode memory
//! identities.
//!
//! Every time derivative here comes from the amplitude generator evaluated
//! on stored states, so the identities hold to rounding error rather than to
//! a finite-difference truncation error.

use crate::amplitude::{AmplitudeTrajectory, Layout};
use crate::error::{Error, Result};
use crate::model::{TimeGrid, TwoPseudomodeConstants};

/// Points with `|c1|²` below this are flagged invalid.
pub const VALIDITY_CUTOFF: f64 = 1e-12;

/// `S(t)` and `γ(t)` on a grid. Invalid points carry `NaN`.
#[derive(Debug, Clone)]
pub struct RateTrajectory {
    pub grid: TimeGrid,
    /// Atomic frequency; `s` is the lab-frame shift and includes `2ω₀`.
    pub omega0: f64,
    pub s: Vec<f64>,
    pub gamma: Vec<f64>,
    pub valid: Vec<bool>,
}

impl RateTrajectory {
    /// Constant rates, mostly useful for tests and the Markovian limit.
    pub fn constant(grid: TimeGrid, omega0: f64, s: f64, gamma: f64) -> Self {
        let n = grid.len();
        Self { grid, omega0, s: vec![s; n], gamma: vec![gamma; n], valid: vec![true; n] }
    }

    pub fn len(&self) -> usize {
        self.gamma.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gamma.is_empty()
    }

    /// `S(t) − 2ω₀`, the shift seen in the frame rotating at ω₀.
    pub fn rotating_shift(&self, k: usize) -> f64 {
        self.s[k] - 2.0 * self.omega0
    }
}

fn finish(grid: TimeGrid, omega0: f64, s: Vec<f64>, gamma: Vec<f64>, valid: Vec<bool>) -> Result<RateTrajectory> {
    if !valid.iter().any(|&v| v) {
        return Err(Error::AllPointsInvalid);
    }
    Ok(RateTrajectory { grid, omega0, s, gamma, valid })
}

/// `S = −2·Im{ċ1/c1}`, `γ = −2·Re{ċ1/c1}`, with `ċ1` from the generator.
pub fn rates_from_amplitudes(traj: &AmplitudeTrajectory) -> Result<RateTrajectory> {
    let n = traj.len();
    let (mut s, mut gamma, mut valid) = (Vec::with_capacity(n), Vec::with_capacity(n), Vec::with_capacity(n));
    let offset = 2.0 * traj.frame.offset();
    for k in 0..n {
        let c1 = traj.c1(k);
        if c1.norm_sqr() < VALIDITY_CUTOFF {
            s.push(f64::NAN);
            gamma.push(f64::NAN);
            valid.push(false);
            continue;
        }
        let ratio = traj.derivative(k)[0] / c1;
        s.push(-2.0 * ratio.im + offset);
        gamma.push(-2.0 * ratio.re);
        valid.push(true);
    }
    finish(traj.grid, traj.frame.omega0(), s, gamma, valid)
}

/// `A = 2[ω₀ + Ω₀·Re{c1·m*}/|c1|²]`, `B = 2Ω₀·Im{c1·m*}/|c1|²` where `m` is
/// the mode the atom couples to (`b1`, or `a2` for the band gap).
pub fn rates_pseudomode_form(traj: &AmplitudeTrajectory, coupling: f64) -> Result<RateTrajectory> {
    let n = traj.len();
    let omega0 = traj.frame.omega0();
    let (mut s, mut gamma, mut valid) = (Vec::with_capacity(n), Vec::with_capacity(n), Vec::with_capacity(n));
    for k in 0..n {
        let c1 = traj.c1(k);
        let p = c1.norm_sqr();
        if p < VALIDITY_CUTOFF {
            s.push(f64::NAN);
            gamma.push(f64::NAN);
            valid.push(false);
            continue;
        }
        let corr = c1 * traj.coupled_mode(k).conj();
        s.push(2.0 * (omega0 + coupling * corr.re / p));
        gamma.push(2.0 * coupling * corr.im / p);
        valid.push(true);
    }
    finish(traj.grid, omega0, s, gamma, valid)
}

/// Both sides of a memory identity along a trajectory.
#[derive(Debug, Clone)]
pub struct MemoryIdentityReport {
    pub grid: TimeGrid,
    pub lhs: Vec<f64>,
    pub rhs: Vec<f64>,
    pub residual: Vec<f64>,
    /// Points entering `max_relative_residual`.
    pub valid: Vec<bool>,
    /// Largest residual over valid points divided by `max |rhs|` (or by 1
    /// when the right-hand side vanishes identically).
    pub max_relative_residual: f64,
}

impl MemoryIdentityReport {
    fn build(grid: TimeGrid, lhs: Vec<f64>, rhs: Vec<f64>, valid: Vec<bool>) -> Self {
        let residual: Vec<f64> = lhs.iter().zip(&rhs).map(|(a, b)| (a - b).abs()).collect();
        let mut max_res: f64 = 0.0;
        let mut max_rhs: f64 = 0.0;
        for k in 0..residual.len() {
            if valid[k] {
                max_res = max_res.max(residual[k]);
                max_rhs = max_rhs.max(rhs[k].abs());
            }
        }
        let norm = if max_rhs > 0.0 { max_rhs } else { 1.0 };
        Self { grid, lhs, rhs, residual, valid, max_relative_residual: max_res / norm }
    }
}

/// `d|m|²/dt + rate·|m|²` for mode index `idx`.
fn compensated(traj: &AmplitudeTrajectory, k: usize, idx: usize, rate: f64) -> f64 {
    let x = &traj.states[k];
    let dx = traj.derivative(k);
    2.0 * (x[idx].conj() * dx[idx]).re + rate * x[idx].norm_sqr()
}

fn gamma_times_population(traj: &AmplitudeTrajectory, rates: &RateTrajectory) -> Result<(Vec<f64>, Vec<bool>)> {
    if rates.len() != traj.len() || rates.grid != traj.grid {
        return Err(Error::GridMismatch);
    }
    let rhs = (0..traj.len())
        .map(|k| if rates.valid[k] { rates.gamma[k] * traj.c1(k).norm_sqr() } else { f64::NAN })
        .collect();
    Ok((rhs, rates.valid.clone()))
}

/// `d|b1|²/dt + Γ|b1|²` against `γ(t)|c1(t)|²`.
pub fn memory_identity_single(traj: &AmplitudeTrajectory, gamma: f64, rates: &RateTrajectory) -> Result<MemoryIdentityReport> {
    if traj.layout != Layout::Single {
        return Err(Error::DimensionMismatch { expected: 2, found: traj.layout.len() });
    }
    let (rhs, valid) = gamma_times_population(traj, rates)?;
    let lhs = (0..traj.len()).map(|k| compensated(traj, k, 1, gamma)).collect();
    Ok(MemoryIdentityReport::build(traj.grid, lhs, rhs, valid))
}

/// Compensated rates of both pseudomodes against `γ(t)|c1(t)|²`.
pub fn memory_identity_double(
    traj: &AmplitudeTrajectory,
    constants: &TwoPseudomodeConstants,
    rates: &RateTrajectory,
) -> Result<MemoryIdentityReport> {
    if traj.layout != Layout::Double {
        return Err(Error::DimensionMismatch { expected: 3, found: traj.layout.len() });
    }
    let (rhs, valid) = gamma_times_population(traj, rates)?;
    let lhs = (0..traj.len())
        .map(|k| compensated(traj, k, 1, constants.gamma_p1) + compensated(traj, k, 2, constants.gamma_p2))
        .collect();
    Ok(MemoryIdentityReport::build(traj.grid, lhs, rhs, valid))
}

/// `d|a1|²/dt + Γ′₁|a1|²` against `2V·Im{a2·a1*}`.
pub fn intermode_memory_identity(
    traj: &AmplitudeTrajectory,
    constants: &TwoPseudomodeConstants,
) -> Result<MemoryIdentityReport> {
    if traj.layout != Layout::Double {
        return Err(Error::DimensionMismatch { expected: 3, found: traj.layout.len() });
    }
    let n = traj.len();
    let lhs = (0..n).map(|k| compensated(traj, k, 1, constants.gamma_p1)).collect();
    let rhs = (0..n)
        .map(|k| {
            let x = &traj.states[k];
            2.0 * constants.v * (x[2] * x[1].conj()).im
        })
        .collect();
    Ok(MemoryIdentityReport::build(traj.grid, lhs, rhs, vec![true; n]))
}
