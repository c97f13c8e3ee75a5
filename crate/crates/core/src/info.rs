// Copyright 2026 The memorymodes Authors
// SPDX-License-Identifier: Apache-2.0

//! Entropies and atom–memory mutual information, in nats.

use crate::density::{partial_trace_atom, partial_trace_pseudomodes, Basis, DensityMatrix, DensitySeries};
use crate::error::{Error, Result};
use crate::linalg::{hermitian_eigenvalues, CMatrix};
use crate::model::TimeGrid;

/// Eigenvalues below this are treated as zero.
pub const EIGENVALUE_FLOOR: f64 = 1e-12;

fn entropy_of(m: &CMatrix) -> f64 {
    let s: f64 = hermitian_eigenvalues(m)
        .into_iter()
        .filter(|&l| l > EIGENVALUE_FLOOR)
        .map(|l| -l * l.ln())
        .sum();
    s.max(0.0)
}

pub fn von_neumann_entropy(rho: &DensityMatrix) -> f64 {
    entropy_of(rho.matrix())
}

/// Entropy of the pseudomode marginal (both modes as one subsystem).
pub fn pseudomode_entropy(rho: &DensityMatrix) -> f64 {
    entropy_of(&partial_trace_atom(rho))
}

/// `S(atom) + S(pseudomodes) − S(joint)`.
pub fn mutual_information(rho: &DensityMatrix) -> Result<f64> {
    if rho.basis() == Basis::Atom {
        return Err(Error::DimensionMismatch { expected: 3, found: 2 });
    }
    let sa = von_neumann_entropy(&partial_trace_pseudomodes(rho));
    Ok(sa + pseudomode_entropy(rho) - von_neumann_entropy(rho))
}

#[derive(Debug, Clone, PartialEq)]
pub struct InfoSeries {
    pub grid: TimeGrid,
    pub entropy_atom: Vec<f64>,
    pub entropy_pseudomode: Vec<f64>,
    pub entropy_joint: Vec<f64>,
    pub mutual_information: Vec<f64>,
}

/// Entropy bookkeeping along a joint atom + pseudomode evolution.
pub fn info_series(series: &DensitySeries) -> Result<InfoSeries> {
    let basis = series.states.first().map(|s| s.basis()).unwrap_or(Basis::Atom);
    if basis == Basis::Atom {
        return Err(Error::DimensionMismatch { expected: 3, found: 2 });
    }
    let n = series.len();
    let mut out = InfoSeries {
        grid: series.grid,
        entropy_atom: Vec::with_capacity(n),
        entropy_pseudomode: Vec::with_capacity(n),
        entropy_joint: Vec::with_capacity(n),
        mutual_information: Vec::with_capacity(n),
    };
    for rho in &series.states {
        let sa = von_neumann_entropy(&partial_trace_pseudomodes(rho));
        let sp = pseudomode_entropy(rho);
        let sj = von_neumann_entropy(rho);
        out.entropy_atom.push(sa);
        out.entropy_pseudomode.push(sp);
        out.entropy_joint.push(sj);
        out.mutual_information.push(sa + sp - sj);
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExtremumKind {
    Max,
    Min,
}

/// Interior local extrema of a sampled series as `(index, kind)`. Flat
/// stretches count once, at their first index.
pub fn local_extrema(x: &[f64]) -> Vec<(usize, ExtremumKind)> {
    let mut out = Vec::new();
    let mut last_dir = 0i8;
    let mut last_change = 0usize;
    for k in 1..x.len() {
        let d = x[k] - x[k - 1];
        let dir = if d > 0.0 {
            1
        } else if d < 0.0 {
            -1
        } else {
            continue;
        };
        if last_dir != 0 && dir != last_dir {
            let kind = if last_dir > 0 { ExtremumKind::Max } else { ExtremumKind::Min };
            out.push((last_change, kind));
        }
        last_dir = dir;
        last_change = k;
    }
    out
}

/// One-to-one pairing of same-kind extrema of two series.
#[derive(Debug, Clone, PartialEq)]
pub struct ExtremumAlignment {
    pub pairs: Vec<(usize, usize)>,
    pub unmatched_a: usize,
    pub unmatched_b: usize,
    /// Largest index offset within a pair.
    pub max_offset: usize,
    /// Mean distance between consecutive extrema of `a`.
    pub mean_spacing: f64,
}

/// Pairs extrema in order. Consecutive extrema of a smooth series alternate
/// kind, so matching proceeds along both lists, skipping an entry whenever
/// the kinds disagree.
pub fn align_extrema(a: &[f64], b: &[f64]) -> ExtremumAlignment {
    let ea = local_extrema(a);
    let eb = local_extrema(b);
    let mut pairs = Vec::new();
    let (mut i, mut j) = (0, 0);
    while i < ea.len() && j < eb.len() {
        if ea[i].1 == eb[j].1 {
            pairs.push((ea[i].0, eb[j].0));
            i += 1;
            j += 1;
        } else if ea[i].0 < eb[j].0 {
            i += 1;
        } else {
            j += 1;
        }
    }
    let max_offset = pairs.iter().map(|&(x, y)| x.abs_diff(y)).max().unwrap_or(0);
    let mean_spacing = if ea.len() > 1 {
        (ea[ea.len() - 1].0 - ea[0].0) as f64 / (ea.len() - 1) as f64
    } else {
        f64::INFINITY
    };
    ExtremumAlignment {
        unmatched_a: ea.len() - pairs.len(),
        unmatched_b: eb.len() - pairs.len(),
        pairs,
        max_offset,
        mean_spacing,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64 as C64;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn pure_and_mixed_qubits() {
        let pure = DensityMatrix::pure(Basis::Atom, &[c(0.6, 0.0), c(0.0, 0.8)]).unwrap();
        assert!(von_neumann_entropy(&pure).abs() < 1e-12);
        let mut m = CMatrix::identity(2, 2);
        m *= c(0.5, 0.0);
        let mixed = DensityMatrix::new(Basis::Atom, m).unwrap();
        assert!((von_neumann_entropy(&mixed) - 2f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn mutual_information_limits() {
        let product = DensityMatrix::basis_state(Basis::AtomPseudomode, 2);
        assert!(mutual_information(&product).unwrap().abs() < 1e-15);
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let bell = DensityMatrix::pure(Basis::AtomPseudomode, &[c(0.0, 0.0), c(h, 0.0), c(h, 0.0)]).unwrap();
        assert!((mutual_information(&bell).unwrap() - 2.0 * 2f64.ln()).abs() < 1e-12);
        let w = DensityMatrix::pure(Basis::AtomTwoPseudomodes, &[c(0.0, 0.0), c(h, 0.0), c(0.0, 0.0), c(0.0, h)]).unwrap();
        assert!((mutual_information(&w).unwrap() - 2.0 * 2f64.ln()).abs() < 1e-12);
        assert!(mutual_information(&DensityMatrix::basis_state(Basis::Atom, 0)).is_err());
    }

    #[test]
    fn extrema_of_sine() {
        let x: Vec<f64> = (0..1000).map(|k| (k as f64 * 0.01).sin()).collect();
        let e = local_extrema(&x);
        assert_eq!(e.len(), 3);
        assert_eq!(e[0].1, ExtremumKind::Max);
        assert!(e[0].0.abs_diff(157) <= 1);
        let y: Vec<f64> = (0..1000).map(|k| (k as f64 * 0.01 - 0.02).sin()).collect();
        let a = align_extrema(&x, &y);
        assert_eq!(a.pairs.len(), 3);
        assert_eq!((a.unmatched_a, a.unmatched_b), (0, 0));
        assert!(a.max_offset <= 2);
    }

    fn arb_pure(dim: usize) -> impl Strategy<Value = Vec<C64>> {
        prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), dim).prop_filter_map("nonzero", |v| {
            let z: Vec<C64> = v.into_iter().map(|(a, b)| c(a, b)).collect();
            let n = z.iter().map(|w| w.norm_sqr()).sum::<f64>().sqrt();
            (n > 1e-3).then(|| z.into_iter().map(|w| w / n).collect())
        })
    }

    proptest! {
        #[test]
        fn schmidt_symmetry_and_bounds(psi in arb_pure(4), phase in 0.0f64..6.3) {
            let rho = DensityMatrix::pure(Basis::AtomTwoPseudomodes, &psi).unwrap();
            let sa = von_neumann_entropy(&partial_trace_pseudomodes(&rho));
            let sp = pseudomode_entropy(&rho);
            prop_assert!((sa - sp).abs() < 1e-9);
            prop_assert!(sa >= 0.0 && sa <= 2f64.ln() + 1e-12);
            let i = mutual_information(&rho).unwrap();
            prop_assert!((i - 2.0 * sa).abs() < 1e-9);
            let rotated = rho.to_lab_frame(1.0, phase);
            prop_assert!((mutual_information(&rotated).unwrap() - i).abs() < 1e-9);
        }

        #[test]
        fn subadditivity_for_mixtures(psi in arb_pure(3), w in 0.0f64..1.0) {
            let pure = DensityMatrix::pure(Basis::AtomPseudomode, &psi).unwrap();
            let g = DensityMatrix::basis_state(Basis::AtomPseudomode, 0);
            let m = pure.matrix() * c(w, 0.0) + g.matrix() * c(1.0 - w, 0.0);
            let rho = DensityMatrix::new(Basis::AtomPseudomode, m).unwrap();
            prop_assert!(mutual_information(&rho).unwrap() >= -1e-9);
        }
    }
}
