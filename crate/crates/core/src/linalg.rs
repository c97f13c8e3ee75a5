// Copyright 2026 The memorymodes Authors
// SPDX-License-Identifier: Apache-2.0

//! Small dense complex linear algebra on top of nalgebra.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};

pub type CMatrix = DMatrix<C64>;
pub type CVector = DVector<C64>;

/// Above this condition number the eigenvector basis is rejected.
pub const MAX_CONDITION: f64 = 1e12;

/// Eigen-decomposition `M = V·diag(λ)·V⁻¹` of a general complex matrix.
#[derive(Debug, Clone)]
pub struct EigenDecomposition {
    pub values: CVector,
    pub vectors: CMatrix,
    pub inverse: CMatrix,
    /// 2-norm condition number of `vectors`.
    pub condition: f64,
}

/// Eigen-decomposition through the complex Schur form `M = Q·T·Q†`, with
/// eigenvectors of the triangular factor found by back substitution.
pub fn eigen_decompose(m: &CMatrix) -> Result<EigenDecomposition> {
    let n = m.nrows();
    if m.ncols() != n {
        return Err(Error::DimensionMismatch { expected: n, found: m.ncols() });
    }
    let (q, t) = m.clone().schur().unpack();
    let scale = t.iter().map(|z| z.norm()).fold(0.0, f64::max).max(f64::MIN_POSITIVE);
    let mut y = CMatrix::zeros(n, n);
    for k in 0..n {
        let lambda = t[(k, k)];
        y[(k, k)] = C64::new(1.0, 0.0);
        for j in (0..k).rev() {
            let mut acc = C64::default();
            for l in (j + 1)..=k {
                acc += t[(j, l)] * y[(l, k)];
            }
            let denom = t[(j, j)] - lambda;
            if denom.norm() <= 1e-14 * scale {
                if acc.norm() <= 1e-14 * scale {
                    continue;
                }
                // coincident eigenvalues with a nonzero coupling: defective
                return Err(Error::IllConditioned(f64::INFINITY));
            }
            y[(j, k)] = -acc / denom;
        }
    }
    let mut vectors = q * y;
    for mut col in vectors.column_iter_mut() {
        let nrm = col.norm();
        col /= C64::new(nrm, 0.0);
    }
    let sv = vectors.clone().singular_values();
    let smax = sv.max();
    let smin = sv.min();
    let condition = if smin > 0.0 { smax / smin } else { f64::INFINITY };
    if !(condition <= MAX_CONDITION) {
        return Err(Error::IllConditioned(condition));
    }
    let inverse = vectors.clone().try_inverse().ok_or(Error::IllConditioned(condition))?;
    let values = CVector::from_iterator(n, (0..n).map(|k| t[(k, k)]));
    Ok(EigenDecomposition { values, vectors, inverse, condition })
}

impl EigenDecomposition {
    /// `V·exp(Λt)·V⁻¹·x`.
    pub fn propagate(&self, x: &CVector, t: f64) -> CVector {
        let mut w = &self.inverse * x;
        for (wi, li) in w.iter_mut().zip(self.values.iter()) {
            *wi *= (li * t).exp();
        }
        &self.vectors * w
    }
}

/// Matrix exponential by scaling and squaring with a Padé approximant.
pub fn expm(m: &CMatrix) -> CMatrix {
    m.clone().exp()
}

/// Eigenvalues of the Hermitian part `(ρ + ρ†)/2`, ascending.
pub fn hermitian_eigenvalues(m: &CMatrix) -> Vec<f64> {
    let h = (m + m.adjoint()) * C64::new(0.5, 0.0);
    let mut vals: Vec<f64> = h.symmetric_eigenvalues().iter().copied().collect();
    vals.sort_by(|a, b| a.total_cmp(b));
    vals
}

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}
