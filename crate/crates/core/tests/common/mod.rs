// Copyright 2026 The memorymodes Authors
// SPDX-License-Identifier: Apache-2.0

// Shared fixtures and independent reference calculations. Nothing here
// calls into the library's solvers.

#![allow(dead_code)]

use memorymodes::model::{BandGapModel, LorentzianModel, TimeGrid, Validation};
use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const FIG2_GAMMA: f64 = 0.6;
pub const FIG2_DETUNING: f64 = 4.0 * FIG2_GAMMA;

pub fn fig2_coupling() -> f64 {
    0.15f64.sqrt()
}

pub fn fig2_model() -> LorentzianModel {
    LorentzianModel::new(0.0, FIG2_DETUNING, FIG2_GAMMA, fig2_coupling()).unwrap()
}

pub fn fig2_grid() -> TimeGrid {
    TimeGrid::new(0.0, 10.0, 4000).unwrap()
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_lorentzian(r: &mut ChaCha8Rng) -> LorentzianModel {
    let omega0 = r.random_range(-2.0..2.0);
    let detuning = r.random_range(-4.0..4.0);
    let gamma = r.random_range(0.2..4.0);
    let coupling = r.random_range(0.05..1.0);
    LorentzianModel::new(omega0, omega0 + detuning, gamma, coupling).unwrap()
}

/// A physically valid band-gap set; `perfect` puts it exactly on the
/// `W1/Γ1 = W2/Γ2` line.
pub fn random_bandgap(r: &mut ChaCha8Rng, perfect: bool) -> BandGapModel {
    let omega0 = r.random_range(-1.0..1.0);
    let omega_c = omega0 + r.random_range(-2.0..2.0);
    let gamma2 = r.random_range(0.2..2.0);
    let gamma1 = gamma2 * (1.0 + r.random_range(0.2..3.0));
    let w2 = r.random_range(if perfect { 0.05 } else { 0.0 }..1.0);
    let floor = w2 * gamma1 / gamma2;
    let w1 = if perfect { floor } else { floor + r.random_range(0.01..1.0) };
    let coupling = r.random_range(0.1..1.0);
    BandGapModel::new(omega0, omega_c, w1, w2, gamma1, gamma2, coupling, Validation::Strict).unwrap()
}

/// `exp(M t)·x` for a 2x2 complex matrix by Sylvester's formula, falling
/// back to the confluent form for a repeated eigenvalue.
pub fn expm2_apply(m: [[C64; 2]; 2], x: [C64; 2], t: f64) -> [C64; 2] {
    let tr = m[0][0] + m[1][1];
    let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
    let disc = (tr * tr - det * 4.0).sqrt();
    let (l1, l2) = ((tr + disc) * 0.5, (tr - disc) * 0.5);
    let id = |i: usize, j: usize| if i == j { C64::new(1.0, 0.0) } else { C64::new(0.0, 0.0) };
    let mut e = [[C64::new(0.0, 0.0); 2]; 2];
    if (l1 - l2).norm() > 1e-7 * (1.0 + l1.norm()) {
        let (e1, e2) = ((l1 * t).exp(), (l2 * t).exp());
        for i in 0..2 {
            for j in 0..2 {
                e[i][j] = (e1 * (m[i][j] - l2 * id(i, j)) - e2 * (m[i][j] - l1 * id(i, j))) / (l1 - l2);
            }
        }
    } else {
        let l = tr * 0.5;
        let el = (l * t).exp();
        for i in 0..2 {
            for j in 0..2 {
                e[i][j] = el * (id(i, j) + (m[i][j] - l * id(i, j)) * t);
            }
        }
    }
    [e[0][0] * x[0] + e[0][1] * x[1], e[1][0] * x[0] + e[1][1] * x[1]]
}

/// Closed-form `(c1, b1)` of the single-pseudomode model in the frame
/// rotating at ω₀, starting from the excited atom.
pub fn single_amplitudes(m: &LorentzianModel, t: f64) -> [C64; 2] {
    let i = C64::new(0.0, 1.0);
    let k = [
        [C64::new(0.0, 0.0), C64::new(m.coupling, 0.0)],
        [C64::new(m.coupling, 0.0), C64::new(m.omega_c - m.omega0, -0.5 * m.gamma)],
    ];
    let g = [[-i * k[0][0], -i * k[0][1]], [-i * k[1][0], -i * k[1][1]]];
    expm2_apply(g, [C64::new(1.0, 0.0), C64::new(0.0, 0.0)], t)
}

/// Excited-population plateau of the lossless dressed state on the gap:
/// the dark state `(V, −Ω₀, 0)/√(V²+Ω₀²)` in `(c1, a1, a2)` carries that
/// weight of the initial excitation.
pub fn perfect_gap_plateau(v: f64, coupling: f64) -> f64 {
    let w = v * v / (v * v + coupling * coupling);
    w * w
}
