// Copyright 2026 The memorymodes Authors
// SPDX-License-Identifier: Apache-2.0

//! Density matrices in the frozen one-excitation bases and the three exact
//! master equations: the time-local atomic equation and the one- and
//! two-pseudomode Lindblad equations.
//!
//! Basis orders:
//!
//! ```text
//! atom                        |g⟩, |e⟩
//! atom + pseudomode           |g,0⟩, |g,1⟩, |e,0⟩
//! atom + two pseudomodes      |g,0,0⟩, |g,1,0⟩, |g,0,1⟩, |e,0,0⟩
//! ```
//!
//! Evolutions run in the frame rotating at ω₀ (which commutes with every
//! generator here); [`DensityMatrix::to_lab_frame`] restores lab phases.

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::integrate::{solve_dense, Tolerance};
use crate::linalg::{hermitian_eigenvalues, CMatrix};
use crate::model::{
    derive_two_pseudomode_constants, BandGapModel, LorentzianModel, TimeGrid, TwoPseudomodeConstants,
};
use crate::rates::RateTrajectory;

pub const HERMITICITY_TOL: f64 = 1e-12;
pub const TRACE_TOL: f64 = 1e-9;
pub const POSITIVITY_TOL: f64 = 1e-9;

const I: C64 = C64 { re: 0.0, im: 1.0 };

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Basis {
    Atom,
    AtomPseudomode,
    AtomTwoPseudomodes,
}

impl Basis {
    pub fn dim(&self) -> usize {
        match self {
            Basis::Atom => 2,
            Basis::AtomPseudomode => 3,
            Basis::AtomTwoPseudomodes => 4,
        }
    }

    pub fn from_dim(dim: usize) -> Result<Self> {
        match dim {
            2 => Ok(Basis::Atom),
            3 => Ok(Basis::AtomPseudomode),
            4 => Ok(Basis::AtomTwoPseudomodes),
            other => Err(Error::DimensionMismatch { expected: 4, found: other }),
        }
    }

    pub fn labels(&self) -> &'static [&'static str] {
        match self {
            Basis::Atom => &["g", "e"],
            Basis::AtomPseudomode => &["g0", "g1", "e0"],
            Basis::AtomTwoPseudomodes => &["g00", "g10", "g01", "e00"],
        }
    }

    /// Atomic index (0 = g, 1 = e) of basis state `i`.
    fn atom(&self, i: usize) -> usize {
        usize::from(i + 1 == self.dim())
    }

    /// Index of the pseudomode configuration of basis state `i`; the
    /// vacuum is 0 and single excitations follow in mode order.
    fn modes(&self, i: usize) -> usize {
        match self {
            Basis::Atom => 0,
            _ if i + 1 == self.dim() => 0,
            _ => i,
        }
    }

    /// Number of pseudomode configurations in the sector.
    fn mode_dim(&self) -> usize {
        self.dim() - 1
    }

    /// Total excitation number of basis state `i`.
    pub fn excitations(&self, i: usize) -> usize {
        usize::from(i != 0)
    }
}

/// Result of the Hermiticity, trace and positivity checks.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InvariantCheck {
    pub hermiticity_error: f64,
    pub trace_error: f64,
    pub min_eigenvalue: f64,
}

impl InvariantCheck {
    pub fn ok(&self) -> bool {
        self.hermiticity_error <= HERMITICITY_TOL
            && self.trace_error <= TRACE_TOL
            && self.min_eigenvalue >= -POSITIVITY_TOL
    }

    /// Worst of two checks.
    pub fn worst(self, other: Self) -> Self {
        Self {
            hermiticity_error: self.hermiticity_error.max(other.hermiticity_error),
            trace_error: self.trace_error.max(other.trace_error),
            min_eigenvalue: self.min_eigenvalue.min(other.min_eigenvalue),
        }
    }
}

/// A density operator in one of the frozen bases.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    basis: Basis,
    matrix: CMatrix,
}

impl DensityMatrix {
    /// Validates the invariants.
    pub fn new(basis: Basis, matrix: CMatrix) -> Result<Self> {
        let rho = Self::from_matrix_unchecked(basis, matrix)?;
        let check = rho.check();
        if !check.ok() {
            return Err(Error::InvalidParameter(format!(
                "not a density matrix: hermiticity error {:e}, trace error {:e}, min eigenvalue {:e}",
                check.hermiticity_error, check.trace_error, check.min_eigenvalue
            )));
        }
        Ok(rho)
    }

    /// Only the shape is checked.
    pub fn from_matrix_unchecked(basis: Basis, matrix: CMatrix) -> Result<Self> {
        if matrix.nrows() != basis.dim() || matrix.ncols() != basis.dim() {
            return Err(Error::DimensionMismatch { expected: basis.dim(), found: matrix.nrows() });
        }
        Ok(Self { basis, matrix })
    }

    /// `|ψ⟩⟨ψ|` for a normalized amplitude vector.
    pub fn pure(basis: Basis, psi: &[C64]) -> Result<Self> {
        if psi.len() != basis.dim() {
            return Err(Error::DimensionMismatch { expected: basis.dim(), found: psi.len() });
        }
        let n = psi.len();
        let m = CMatrix::from_fn(n, n, |i, j| psi[i] * psi[j].conj());
        Self::new(basis, m)
    }

    /// Projector on basis state `i`.
    pub fn basis_state(basis: Basis, i: usize) -> Self {
        let n = basis.dim();
        let mut m = CMatrix::zeros(n, n);
        m[(i, i)] = C64::new(1.0, 0.0);
        Self { basis, matrix: m }
    }

    pub fn basis(&self) -> Basis {
        self.basis
    }

    pub fn dim(&self) -> usize {
        self.basis.dim()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix {
        self.matrix
    }

    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.matrix[(i, j)]
    }

    pub fn trace(&self) -> C64 {
        self.matrix.trace()
    }

    pub fn check(&self) -> InvariantCheck {
        let herm = (&self.matrix - self.matrix.adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max);
        let tr = self.trace();
        let trace_error = ((tr.re - 1.0).powi(2) + tr.im.powi(2)).sqrt();
        let min_eigenvalue = hermitian_eigenvalues(&self.matrix)[0];
        InvariantCheck { hermiticity_error: herm, trace_error, min_eigenvalue }
    }

    /// Largest entrywise modulus difference.
    pub fn max_abs_diff(&self, other: &DensityMatrix) -> f64 {
        (&self.matrix - &other.matrix).iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Applies the phases `e^{−iω₀(nᵢ−nⱼ)t}` taking a rotating-frame matrix
    /// to the lab frame.
    pub fn to_lab_frame(&self, omega0: f64, t: f64) -> Self {
        self.rephase(-omega0 * t)
    }

    pub fn to_rotating_frame(&self, omega0: f64, t: f64) -> Self {
        self.rephase(omega0 * t)
    }

    fn rephase(&self, angle: f64) -> Self {
        let b = self.basis;
        let m = CMatrix::from_fn(b.dim(), b.dim(), |i, j| {
            let dn = b.excitations(i) as f64 - b.excitations(j) as f64;
            self.matrix[(i, j)] * (I * (angle * dn)).exp()
        });
        Self { basis: b, matrix: m }
    }
}

/// Hermitian generator of the coherent part.
#[derive(Debug, Clone, PartialEq)]
pub struct HamiltonianSpec {
    pub basis: Basis,
    pub matrix: CMatrix,
}

/// Atom + pseudomode Hamiltonian with energies measured from `frame_offset`
/// per excitation.
pub fn hamiltonian_single(model: &LorentzianModel, frame_offset: f64) -> HamiltonianSpec {
    let mut h = CMatrix::zeros(3, 3);
    h[(1, 1)] = C64::new(model.omega_c - frame_offset, 0.0);
    h[(2, 2)] = C64::new(model.omega0 - frame_offset, 0.0);
    h[(1, 2)] = C64::new(model.coupling, 0.0);
    h[(2, 1)] = C64::new(model.coupling, 0.0);
    HamiltonianSpec { basis: Basis::AtomPseudomode, matrix: h }
}

/// Atom + two pseudomodes, the atom coupled to the second one.
pub fn hamiltonian_double(model: &BandGapModel, constants: &TwoPseudomodeConstants, frame_offset: f64) -> HamiltonianSpec {
    let mut h = CMatrix::zeros(4, 4);
    h[(1, 1)] = C64::new(model.omega_c - frame_offset, 0.0);
    h[(2, 2)] = C64::new(model.omega_c - frame_offset, 0.0);
    h[(3, 3)] = C64::new(model.omega0 - frame_offset, 0.0);
    h[(1, 2)] = C64::new(constants.v, 0.0);
    h[(2, 1)] = C64::new(constants.v, 0.0);
    h[(2, 3)] = C64::new(model.coupling, 0.0);
    h[(3, 2)] = C64::new(model.coupling, 0.0);
    HamiltonianSpec { basis: Basis::AtomTwoPseudomodes, matrix: h }
}

/// Annihilation operator of pseudomode `mode` (1-based) in `basis`.
pub fn annihilation(basis: Basis, mode: usize) -> CMatrix {
    let mut a = CMatrix::zeros(basis.dim(), basis.dim());
    a[(0, mode)] = C64::new(1.0, 0.0);
    a
}

/// Atomic lowering operator σ₋ in `basis`.
pub fn lowering(basis: Basis) -> CMatrix {
    let mut s = CMatrix::zeros(basis.dim(), basis.dim());
    s[(0, basis.dim() - 1)] = C64::new(1.0, 0.0);
    s
}

/// Lindblad generator `−i[H,ρ] + Σ κ(LρL† − ½{L†L,ρ})`, written through the
/// effective Hamiltonian `H − (i/2)ΣκL†L`.
struct Lindbladian {
    h_eff: CMatrix,
    jumps: Vec<(f64, CMatrix)>,
}

impl Lindbladian {
    fn new(h: &CMatrix, jumps: Vec<(f64, CMatrix)>) -> Self {
        let mut h_eff = h.clone();
        for (rate, l) in &jumps {
            h_eff -= (l.adjoint() * l) * C64::new(0.0, 0.5 * rate);
        }
        Self { h_eff, jumps }
    }

    fn apply(&self, rho: &CMatrix) -> CMatrix {
        let a = &self.h_eff * rho;
        let mut out = (&a - a.adjoint()) * (-I);
        for (rate, l) in &self.jumps {
            if *rate != 0.0 {
                out += (l * rho * l.adjoint()) * C64::new(*rate, 0.0);
            }
        }
        out
    }
}

/// Density matrices on a grid, stored in the rotating frame.
#[derive(Debug, Clone)]
pub struct DensitySeries {
    pub grid: TimeGrid,
    pub omega0: f64,
    pub states: Vec<DensityMatrix>,
    /// Worst invariant check over all output points.
    pub invariants: InvariantCheck,
}

impl DensitySeries {
    fn from_states(grid: TimeGrid, omega0: f64, states: Vec<DensityMatrix>) -> Self {
        let invariants = states
            .iter()
            .map(|s| s.check())
            .reduce(InvariantCheck::worst)
            .unwrap_or(InvariantCheck { hermiticity_error: 0.0, trace_error: 0.0, min_eigenvalue: 0.0 });
        Self { grid, omega0, states, invariants }
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn lab_state(&self, k: usize) -> DensityMatrix {
        self.states[k].to_lab_frame(self.omega0, self.grid.time(k))
    }

    /// Partial trace of every point.
    pub fn traced(&self) -> DensitySeries {
        let states = self.states.iter().map(partial_trace_pseudomodes).collect();
        Self::from_states(self.grid, self.omega0, states)
    }
}

fn evolve<F>(basis: Basis, rho0: &DensityMatrix, grid: &TimeGrid, mut rhs: F, tol: &Tolerance) -> Result<Vec<DensityMatrix>>
where
    F: FnMut(f64, &CMatrix) -> CMatrix,
{
    if rho0.basis() != basis {
        return Err(Error::DimensionMismatch { expected: basis.dim(), found: rho0.dim() });
    }
    let n = basis.dim();
    let y0: Vec<C64> = rho0.matrix().iter().copied().collect();
    let sol = solve_dense(
        |t, y, dy| {
            let rho = CMatrix::from_column_slice(n, n, y);
            let d = rhs(t, &rho);
            dy.copy_from_slice(d.as_slice());
        },
        &y0,
        &grid.times(),
        tol,
    )?;
    sol.into_iter()
        .map(|v| DensityMatrix::from_matrix_unchecked(basis, CMatrix::from_column_slice(n, n, &v)))
        .collect()
}

/// Rate series bridged over short invalid gaps and interpolated with local
/// cubic Lagrange polynomials on the uniform grid.
#[derive(Debug, Clone)]
pub struct RateInterpolant {
    t0: f64,
    dt: f64,
    shift: Vec<f64>,
    gamma: Vec<f64>,
}

/// Longest run of invalid rate points that may be bridged.
pub const MAX_BRIDGED_GAP: usize = 2;

impl RateInterpolant {
    pub fn new(rates: &RateTrajectory) -> Result<Self> {
        let n = rates.len();
        let mut shift: Vec<f64> = (0..n).map(|k| rates.rotating_shift(k)).collect();
        let mut gamma = rates.gamma.clone();
        let mut k = 0;
        while k < n {
            if rates.valid[k] {
                k += 1;
                continue;
            }
            let start = k;
            while k < n && !rates.valid[k] {
                k += 1;
            }
            let len = k - start;
            if start == 0 || k == n || len > MAX_BRIDGED_GAP {
                return Err(Error::RateGapTooWide { start, len });
            }
            let (lo, hi) = (start - 1, k);
            for j in start..k {
                let w = (j - lo) as f64 / (hi - lo) as f64;
                shift[j] = shift[lo] * (1.0 - w) + shift[hi] * w;
                gamma[j] = gamma[lo] * (1.0 - w) + gamma[hi] * w;
            }
        }
        Ok(Self { t0: rates.grid.t_start(), dt: rates.grid.dt(), shift, gamma })
    }

    fn lagrange(values: &[f64], base: usize, x: f64) -> f64 {
        // nodes base..base+3 at positions 0..3
        let mut acc = 0.0;
        for i in 0..4 {
            let mut w = 1.0;
            for j in 0..4 {
                if i != j {
                    w *= (x - j as f64) / (i as f64 - j as f64);
                }
            }
            acc += w * values[base + i];
        }
        acc
    }

    /// `(S(t) − 2ω₀, γ(t))`.
    pub fn eval(&self, t: f64) -> (f64, f64) {
        let n = self.gamma.len();
        let u = ((t - self.t0) / self.dt).clamp(0.0, (n - 1) as f64);
        if n < 4 {
            let k = (u.floor() as usize).min(n - 2);
            let w = u - k as f64;
            return (
                self.shift[k] * (1.0 - w) + self.shift[k + 1] * w,
                self.gamma[k] * (1.0 - w) + self.gamma[k + 1] * w,
            );
        }
        let k = (u.floor() as usize).min(n - 2);
        let base = k.saturating_sub(1).min(n - 4);
        let x = u - base as f64;
        (Self::lagrange(&self.shift, base, x), Self::lagrange(&self.gamma, base, x))
    }

    /// Simpson estimates of `∫(S − 2ω₀)dt` and `∫γ dt` over `[a, b]`.
    pub fn integrate(&self, a: f64, b: f64) -> (f64, f64) {
        let (sa, ga) = self.eval(a);
        let (sm, gm) = self.eval(0.5 * (a + b));
        let (sb, gb) = self.eval(b);
        let h = (b - a) / 6.0;
        (h * (sa + 4.0 * sm + sb), h * (ga + 4.0 * gm + gb))
    }
}

/// Time-local atomic master equation driven by `S(t)` and `γ(t)`.
pub fn evolve_atom_timelocal(rates: &RateTrajectory, rho0: &DensityMatrix, grid: &TimeGrid) -> Result<DensitySeries> {
    if rates.grid != *grid {
        return Err(Error::GridMismatch);
    }
    let interp = RateInterpolant::new(rates)?;
    let n_op = lowering(Basis::Atom).adjoint() * lowering(Basis::Atom);
    let sm = lowering(Basis::Atom);
    let sp = sm.adjoint();
    let tol = Tolerance { max_step: Some(grid.dt()), ..Tolerance::default() };
    let states = evolve(
        Basis::Atom,
        rho0,
        grid,
        |t, rho| {
            let (shift, gamma) = interp.eval(t);
            let comm = &n_op * rho - rho * &n_op;
            let anti = &n_op * rho + rho * &n_op;
            comm * C64::new(0.0, -0.5 * shift)
                + (&sm * rho * &sp - anti * C64::new(0.5, 0.0)) * C64::new(gamma, 0.0)
        },
        &tol,
    )?;
    Ok(DensitySeries::from_states(*grid, rates.omega0, states))
}

pub fn evolve_lindblad_single(model: &LorentzianModel, rho0: &DensityMatrix, grid: &TimeGrid) -> Result<DensitySeries> {
    let basis = Basis::AtomPseudomode;
    let h = hamiltonian_single(model, model.omega0);
    let l = Lindbladian::new(&h.matrix, vec![(model.gamma, annihilation(basis, 1))]);
    let states = evolve(basis, rho0, grid, |_, rho| l.apply(rho), &Tolerance::default())?;
    Ok(DensitySeries::from_states(*grid, model.omega0, states))
}

pub fn evolve_lindblad_double(model: &BandGapModel, rho0: &DensityMatrix, grid: &TimeGrid) -> Result<DensitySeries> {
    let constants = derive_two_pseudomode_constants(model)?;
    evolve_lindblad_double_with(model, &constants, rho0, grid)
}

pub fn evolve_lindblad_double_with(
    model: &BandGapModel,
    constants: &TwoPseudomodeConstants,
    rho0: &DensityMatrix,
    grid: &TimeGrid,
) -> Result<DensitySeries> {
    let basis = Basis::AtomTwoPseudomodes;
    let h = hamiltonian_double(model, constants, model.omega0);
    let l = Lindbladian::new(
        &h.matrix,
        vec![(constants.gamma_p1, annihilation(basis, 1)), (constants.gamma_p2, annihilation(basis, 2))],
    );
    let states = evolve(basis, rho0, grid, |_, rho| l.apply(rho), &Tolerance::default())?;
    Ok(DensitySeries::from_states(*grid, model.omega0, states))
}

type Index = fn(&Basis, usize) -> usize;

fn partial_trace(rho: &DensityMatrix, keep_atom: bool) -> CMatrix {
    let b = rho.basis();
    let (dim, key, other): (usize, Index, Index) = if keep_atom {
        (2, Basis::atom, Basis::modes)
    } else {
        (b.mode_dim(), Basis::modes, Basis::atom)
    };
    let mut out = CMatrix::zeros(dim, dim);
    for i in 0..b.dim() {
        for j in 0..b.dim() {
            if other(&b, i) == other(&b, j) {
                out[(key(&b, i), key(&b, j))] += rho.get(i, j);
            }
        }
    }
    out
}

/// Reduces a joint state to the atom.
pub fn partial_trace_pseudomodes(rho: &DensityMatrix) -> DensityMatrix {
    if rho.basis() == Basis::Atom {
        return rho.clone();
    }
    DensityMatrix { basis: Basis::Atom, matrix: partial_trace(rho, true) }
}

/// Reduces a joint state to the pseudomodes, treated as one subsystem. The
/// result is expressed in the vacuum/single-excitation configurations
/// (dimension 2 or 3).
pub fn partial_trace_atom(rho: &DensityMatrix) -> CMatrix {
    partial_trace(rho, false)
}

/// Restricts a state given on the product basis `atom ⊗ Fock{0,1}^modes`
/// (atom index most significant, `g` before `e`, Fock 0 before 1, first
/// mode before second) to the one-excitation sector.
pub fn restrict_to_sector(product: &CMatrix, modes: usize) -> Result<DensityMatrix> {
    let (basis, map): (Basis, &[usize]) = match modes {
        1 => (Basis::AtomPseudomode, &[0, 1, 2]),
        2 => (Basis::AtomTwoPseudomodes, &[0, 2, 1, 4]),
        other => return Err(Error::DimensionMismatch { expected: 2, found: other }),
    };
    let full = 2usize << modes;
    if product.nrows() != full || product.ncols() != full {
        return Err(Error::DimensionMismatch { expected: full, found: product.nrows() });
    }
    let weight: f64 = (0..full).filter(|i| !map.contains(i)).map(|i| product[(i, i)].re.abs()).sum();
    if weight > 1e-12 {
        return Err(Error::SectorLeak { weight });
    }
    let n = basis.dim();
    DensityMatrix::new(basis, CMatrix::from_fn(n, n, |i, j| product[(map[i], map[j])]))
}
