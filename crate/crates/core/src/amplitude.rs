// Copyright 2026 The memorymodes Authors
// SPDX-License-Identifier: Apache-2.0

//! One-excitation amplitude dynamics of the atom coupled to one or two
//! damped pseudomodes.
//!
//! The amplitudes obey a constant-coefficient linear system `ẋ = G·x`, with
//! `x = (c1, b1)` for a Lorentzian reservoir and `x = (c1, a1, a2)` for the
//! band-gap reservoir. Trajectories are stored in a frame rotating at ω₀
//! unless requested otherwise; the generator kept with the trajectory is the
//! one of the stored frame, so `ẋ` is always available exactly.

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::integrate::{solve_dense, Tolerance};
use crate::linalg::{eigen_decompose, expm, CMatrix, CVector};
use crate::model::{
    derive_two_pseudomode_constants, BandGapModel, LorentzianModel, TimeGrid, TwoPseudomodeConstants,
};

const I: C64 = C64 { re: 0.0, im: 1.0 };

/// Amplitude frame of a stored trajectory.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Frame {
    /// Rotating at the atomic frequency; lab amplitudes are `x·e^{−iω₀t}`.
    Rotating { omega0: f64 },
    Lab { omega0: f64 },
}

impl Frame {
    pub fn omega0(&self) -> f64 {
        match *self {
            Frame::Rotating { omega0 } | Frame::Lab { omega0 } => omega0,
        }
    }

    /// Frequency removed from the lab-frame amplitudes.
    pub fn offset(&self) -> f64 {
        match *self {
            Frame::Rotating { omega0 } => omega0,
            Frame::Lab { .. } => 0.0,
        }
    }

    /// Phase taking stored amplitudes at time `t` to the lab frame.
    pub fn lab_phase(&self, t: f64) -> C64 {
        (-I * (self.offset() * t)).exp()
    }
}

/// Which pseudomode network a trajectory describes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Layout {
    /// `(c1, b1)`.
    Single,
    /// `(c1, a1, a2)`.
    Double,
}

impl Layout {
    pub fn len(&self) -> usize {
        match self {
            Layout::Single => 2,
            Layout::Double => 3,
        }
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Index of the mode the atom couples to directly.
    pub fn coupled_mode(&self) -> usize {
        match self {
            Layout::Single => 1,
            Layout::Double => 2,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AmplitudeState1 {
    pub c1: C64,
    pub b1: C64,
}

impl AmplitudeState1 {
    pub fn excited() -> Self {
        Self { c1: C64::new(1.0, 0.0), b1: C64::default() }
    }

    pub fn norm_sqr(&self) -> f64 {
        self.c1.norm_sqr() + self.b1.norm_sqr()
    }

    fn to_vector(self) -> CVector {
        CVector::from_vec(vec![self.c1, self.b1])
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AmplitudeState2 {
    pub c1: C64,
    pub a1: C64,
    pub a2: C64,
}

impl AmplitudeState2 {
    pub fn excited() -> Self {
        Self { c1: C64::new(1.0, 0.0), a1: C64::default(), a2: C64::default() }
    }

    pub fn norm_sqr(&self) -> f64 {
        self.c1.norm_sqr() + self.a1.norm_sqr() + self.a2.norm_sqr()
    }

    fn to_vector(self) -> CVector {
        CVector::from_vec(vec![self.c1, self.a1, self.a2])
    }
}

/// Amplitudes sampled on a time grid.
#[derive(Debug, Clone)]
pub struct AmplitudeTrajectory {
    pub grid: TimeGrid,
    pub frame: Frame,
    pub layout: Layout,
    /// `G` with `ẋ = G·x` in `frame`.
    pub generator: CMatrix,
    pub states: Vec<CVector>,
}

impl AmplitudeTrajectory {
    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn c1(&self, k: usize) -> C64 {
        self.states[k][0]
    }

    /// `b1` for the single-pseudomode layout, `a2` for the double one.
    pub fn coupled_mode(&self, k: usize) -> C64 {
        self.states[k][self.layout.coupled_mode()]
    }

    /// `ẋ` at grid point `k`, from the generator.
    pub fn derivative(&self, k: usize) -> CVector {
        &self.generator * &self.states[k]
    }

    pub fn state1(&self, k: usize) -> Option<AmplitudeState1> {
        (self.layout == Layout::Single).then(|| AmplitudeState1 { c1: self.states[k][0], b1: self.states[k][1] })
    }

    pub fn state2(&self, k: usize) -> Option<AmplitudeState2> {
        (self.layout == Layout::Double).then(|| AmplitudeState2 {
            c1: self.states[k][0],
            a1: self.states[k][1],
            a2: self.states[k][2],
        })
    }

    pub fn norm_sqr(&self, k: usize) -> f64 {
        self.states[k].norm_squared()
    }

    /// Lab-frame amplitudes at grid point `k`.
    pub fn lab_state(&self, k: usize) -> CVector {
        &self.states[k] * self.frame.lab_phase(self.grid.time(k))
    }
}

/// `G` for `(c1, b1)` in the frame rotating at `frame_offset`.
pub fn single_generator(model: &LorentzianModel, frame_offset: f64) -> CMatrix {
    let w = model.coupling;
    let k = CMatrix::from_row_slice(
        2,
        2,
        &[
            C64::new(model.omega0 - frame_offset, 0.0),
            C64::new(w, 0.0),
            C64::new(w, 0.0),
            model.pole() - frame_offset,
        ],
    );
    k * (-I)
}

/// `G` for `(c1, a1, a2)` in the frame rotating at `frame_offset`.
pub fn double_generator(model: &BandGapModel, constants: &TwoPseudomodeConstants, frame_offset: f64) -> CMatrix {
    let w = C64::new(model.coupling, 0.0);
    let v = C64::new(constants.v, 0.0);
    let zero = C64::default();
    let k = CMatrix::from_row_slice(
        3,
        3,
        &[
            C64::new(model.omega0 - frame_offset, 0.0),
            zero,
            w,
            zero,
            constants.z1p - frame_offset,
            v,
            w,
            v,
            constants.z2p - frame_offset,
        ],
    );
    k * (-I)
}

fn check_norm(norm_sqr: f64) -> Result<()> {
    if !norm_sqr.is_finite() || norm_sqr > 1.0 + 1e-12 {
        return Err(Error::InvalidParameter(format!(
            "initial one-excitation norm {norm_sqr} exceeds 1"
        )));
    }
    Ok(())
}

fn integrate_linear(generator: &CMatrix, x0: &CVector, grid: &TimeGrid) -> Result<Vec<CVector>> {
    let g = generator.clone();
    let sol = solve_dense(
        move |_, y, dy| {
            for (i, d) in dy.iter_mut().enumerate() {
                let mut acc = C64::default();
                for (j, yj) in y.iter().enumerate() {
                    acc += g[(i, j)] * yj;
                }
                *d = acc;
            }
        },
        x0.as_slice(),
        &grid.times(),
        &Tolerance::default(),
    )?;
    Ok(sol.into_iter().map(CVector::from_vec).collect())
}

pub fn propagate_single(model: &LorentzianModel, initial: AmplitudeState1, grid: &TimeGrid) -> Result<AmplitudeTrajectory> {
    propagate_single_in(model, initial, grid, Frame::Rotating { omega0: model.omega0 })
}

/// As [`propagate_single`], integrating directly in the given frame.
pub fn propagate_single_in(
    model: &LorentzianModel,
    initial: AmplitudeState1,
    grid: &TimeGrid,
    frame: Frame,
) -> Result<AmplitudeTrajectory> {
    check_norm(initial.norm_sqr())?;
    let generator = single_generator(model, frame.offset());
    let states = integrate_linear(&generator, &initial.to_vector(), grid)?;
    Ok(AmplitudeTrajectory { grid: *grid, frame, layout: Layout::Single, generator, states })
}

pub fn propagate_double(model: &BandGapModel, initial: AmplitudeState2, grid: &TimeGrid) -> Result<AmplitudeTrajectory> {
    let constants = derive_two_pseudomode_constants(model)?;
    propagate_double_with(model, &constants, initial, grid)
}

/// As [`propagate_double`] with explicitly supplied constants (used when
/// the validity checks are waived).
pub fn propagate_double_with(
    model: &BandGapModel,
    constants: &TwoPseudomodeConstants,
    initial: AmplitudeState2,
    grid: &TimeGrid,
) -> Result<AmplitudeTrajectory> {
    check_norm(initial.norm_sqr())?;
    let frame = Frame::Rotating { omega0: model.omega0 };
    let generator = double_generator(model, constants, frame.offset());
    let states = integrate_linear(&generator, &initial.to_vector(), grid)?;
    Ok(AmplitudeTrajectory { grid: *grid, frame, layout: Layout::Double, generator, states })
}

/// `V·exp(Λt)·V⁻¹·x₀` from an eigen-decomposition of the generator.
///
/// Fails with [`Error::IllConditioned`] near exceptional points, where
/// [`matrix_exponential_oracle`] should be used instead.
pub fn closed_form_oracle(generator: &CMatrix, initial: &CVector, t: f64) -> Result<CVector> {
    if initial.len() != generator.nrows() {
        return Err(Error::DimensionMismatch { expected: generator.nrows(), found: initial.len() });
    }
    Ok(eigen_decompose(generator)?.propagate(initial, t))
}

/// `exp(G·t)·x₀` by scaling and squaring.
pub fn matrix_exponential_oracle(generator: &CMatrix, initial: &CVector, t: f64) -> CVector {
    expm(&(generator * C64::new(t, 0.0))) * initial
}

/// Eigen-oracle with the scaling-and-squaring fallback for defective
/// generators.
pub fn oracle_with_fallback(generator: &CMatrix, initial: &CVector, t: f64) -> CVector {
    match closed_form_oracle(generator, initial, t) {
        Ok(x) => x,
        Err(_) => matrix_exponential_oracle(generator, initial, t),
    }
}

/// Long-time excited-state population carried by the undamped eigenmodes
/// of the generator (time-averaged when several undamped modes beat).
pub fn trapped_population(generator: &CMatrix, initial: &CVector) -> Result<f64> {
    let e = eigen_decompose(generator)?;
    let weights = &e.inverse * initial;
    let scale = e.values.iter().map(|z| z.norm()).fold(0.0, f64::max).max(1.0);
    Ok((0..e.values.len())
        .filter(|&k| e.values[k].re.abs() <= 1e-10 * scale)
        .map(|k| (e.vectors[(0, k)] * weights[k]).norm_sqr())
        .sum())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Validation;

    fn fig2() -> LorentzianModel {
        LorentzianModel::new(0.0, 2.4, 0.6, 0.15f64.sqrt()).unwrap()
    }

    #[test]
    fn decoupled_atom_is_constant() {
        let m = LorentzianModel::new(1.3, 0.2, 0.8, 0.0).unwrap();
        let grid = TimeGrid::new(0.0, 5.0, 100).unwrap();
        let traj = propagate_single(&m, AmplitudeState1::excited(), &grid).unwrap();
        for k in 0..traj.len() {
            assert!((traj.c1(k) - C64::new(1.0, 0.0)).norm() < 1e-14);
            assert_eq!(traj.coupled_mode(k), C64::default());
        }
    }

    #[test]
    fn lossless_resonant_rabi() {
        let w = 0.7;
        let m = LorentzianModel { omega0: 0.4, omega_c: 0.4, gamma: 0.0, coupling: w };
        let grid = TimeGrid::new(0.0, 10.0, 500).unwrap();
        let traj = propagate_single(&m, AmplitudeState1::excited(), &grid).unwrap();
        for k in 0..traj.len() {
            let t = grid.time(k);
            assert!((traj.c1(k).norm_sqr() - (w * t).cos().powi(2)).abs() < 1e-9);
        }
        // closed form agrees as well
        let x0 = AmplitudeState1::excited().to_vector();
        let y = closed_form_oracle(&traj.generator, &x0, 3.0).unwrap();
        assert!((y[0].norm_sqr() - (w * 3.0).cos().powi(2)).abs() < 1e-12);
    }

    #[test]
    fn fig2_step_integrator_matches_oracle_at_t5() {
        let grid = TimeGrid::new(0.0, 5.0, 50).unwrap();
        let traj = propagate_single(&fig2(), AmplitudeState1::excited(), &grid).unwrap();
        let x0 = AmplitudeState1::excited().to_vector();
        let y = closed_form_oracle(&traj.generator, &x0, 5.0).unwrap();
        assert!((&y - traj.states.last().unwrap()).camax() < 1e-8);
    }

    #[test]
    fn exceptional_point_uses_fallback() {
        // δ = 0 and Γ = 4Ω₀ make the 2×2 generator defective
        let m = LorentzianModel::new(0.0, 0.0, 2.0, 0.5).unwrap();
        let g = single_generator(&m, 0.0);
        let x0 = AmplitudeState1::excited().to_vector();
        assert!(matches!(closed_form_oracle(&g, &x0, 1.0), Err(Error::IllConditioned(_))));
        let grid = TimeGrid::new(0.0, 4.0, 40).unwrap();
        let traj = propagate_single(&m, AmplitudeState1::excited(), &grid).unwrap();
        let y = oracle_with_fallback(&g, &x0, 4.0);
        assert!((&y - traj.states.last().unwrap()).camax() < 1e-8);
        // critically damped: c1 = (1 + Γt/4)·e^{−Γt/4}
        let t = 4.0f64;
        assert!((y[0].re - (1.0 + 0.5 * t) * (-0.5 * t).exp()).abs() < 1e-10);
    }

    #[test]
    fn frame_invariance() {
        let m = LorentzianModel::new(3.0, 3.7, 0.5, 0.4).unwrap();
        let grid = TimeGrid::new(0.0, 4.0, 80).unwrap();
        let init = AmplitudeState1 { c1: C64::new(0.8, 0.0), b1: C64::new(0.0, 0.6) };
        let rot = propagate_single(&m, init, &grid).unwrap();
        let lab = propagate_single_in(&m, init, &grid, Frame::Lab { omega0: m.omega0 }).unwrap();
        for k in 0..rot.len() {
            let (a, b) = (&rot.states[k], &lab.states[k]);
            assert!((a[0].norm_sqr() - b[0].norm_sqr()).abs() < 1e-9);
            assert!((a[1].norm_sqr() - b[1].norm_sqr()).abs() < 1e-9);
            assert!(((a[0] * a[1].conj()) - (b[0] * b[1].conj())).norm() < 1e-9);
            assert!((rot.lab_state(k) - b).camax() < 1e-8);
        }
    }

    #[test]
    fn double_with_atom_decoupled() {
        let m = BandGapModel::new(0.0, 0.5, 2.0, 0.5, 4.0, 1.0, 0.0, Validation::Strict).unwrap();
        let grid = TimeGrid::new(0.0, 3.0, 60).unwrap();
        let init = AmplitudeState2 { c1: C64::new(0.6, 0.0), a1: C64::new(0.0, 0.0), a2: C64::new(0.8, 0.0) };
        let traj = propagate_double(&m, init, &grid).unwrap();
        for k in 0..traj.len() {
            assert!((traj.c1(k) - C64::new(0.6, 0.0)).norm() < 1e-13);
        }
        assert!(traj.norm_sqr(traj.len() - 1) < traj.norm_sqr(0));
    }

    #[test]
    fn double_without_intermode_coupling_reduces_to_single() {
        let bg = BandGapModel::new(0.2, 1.1, 0.3, 0.0, 2.0, 0.5, 0.45, Validation::Strict).unwrap();
        let c = derive_two_pseudomode_constants(&bg).unwrap();
        assert_eq!(c.v, 0.0);
        let lor = LorentzianModel::new(0.2, 1.1, c.gamma_p2, 0.45).unwrap();
        let grid = TimeGrid::new(0.0, 6.0, 120).unwrap();
        let init2 = AmplitudeState2 { c1: C64::new(0.8, 0.0), a1: C64::new(0.36, 0.0), a2: C64::new(0.0, 0.48) };
        let d = propagate_double(&bg, init2, &grid).unwrap();
        let s = propagate_single(&lor, AmplitudeState1 { c1: init2.c1, b1: init2.a2 }, &grid).unwrap();
        for k in 0..d.len() {
            assert!((d.c1(k) - s.c1(k)).norm() < 1e-9);
            assert!((d.coupled_mode(k) - s.coupled_mode(k)).norm() < 1e-9);
            let t = grid.time(k);
            let a1 = init2.a1 * (-I * (c.z1p - bg.omega0) * t).exp();
            assert!((d.states[k][1] - a1).norm() < 1e-9);
        }
    }

    #[test]
    fn perfect_gap_traps_population() {
        let m = BandGapModel::new(0.0, 0.0, 2.0, 1.0, 4.0, 2.0, 1.0, Validation::Strict).unwrap();
        let c = derive_two_pseudomode_constants(&m).unwrap();
        let g = double_generator(&m, &c, 0.0);
        let x0 = AmplitudeState2::excited().to_vector();
        let plateau = trapped_population(&g, &x0).unwrap();
        // dark state (V, −Ω₀, 0)/√(V² + Ω₀²)
        let v2 = c.v * c.v;
        let expect = (v2 / (v2 + 1.0)).powi(2);
        assert!((plateau - expect).abs() < 1e-12, "{plateau} vs {expect}");
        let grid = TimeGrid::new(0.0, 40.0, 400).unwrap();
        let traj = propagate_double(&m, AmplitudeState2::excited(), &grid).unwrap();
        assert!((traj.c1(traj.len() - 1).norm_sqr() - expect).abs() < 1e-6);
    }

    #[test]
    fn rejects_overnormalized_initial_state() {
        let grid = TimeGrid::new(0.0, 1.0, 10).unwrap();
        let init = AmplitudeState1 { c1: C64::new(1.0, 0.0), b1: C64::new(0.1, 0.0) };
        assert!(propagate_single(&fig2(), init, &grid).is_err());
    }
}
