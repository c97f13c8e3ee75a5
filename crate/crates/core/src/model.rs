// Copyright 2026 The memorymodes Authors
// SPDX-License-Identifier: Apache-2.0

//! Reservoir models and the pseudomode constants derived from them.
//!
//! All frequencies and rates are expressed in units of the Markovian decay
//! rate `γ₀ = 4Ω₀²/Γ`, and times in units of `1/γ₀`.

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};

/// How strictly the Lindblad-validity inequalities are enforced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Validation {
    #[default]
    Strict,
    /// Skip the sign checks on the derived pseudomode decay rates.
    AllowNonphysical,
}

/// Lorentzian spectral density `W·Γ / ((ω − ω_c)² + (Γ/2)²)`.
pub fn lorentzian_density(weight: f64, width: f64, center: f64, omega: f64) -> f64 {
    let x = omega - center;
    weight * width / (x * x + 0.25 * width * width)
}

fn require_finite(name: &str, value: f64) -> Result<()> {
    if value.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("{name} must be finite, got {value}")))
    }
}

/// A single Lorentzian reservoir, equivalent to one damped pseudomode.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LorentzianModel {
    /// Atomic transition frequency ω₀.
    pub omega0: f64,
    /// Center of the Lorentzian ω_c (pseudomode frequency).
    pub omega_c: f64,
    /// Pseudomode decay rate Γ.
    pub gamma: f64,
    /// Atom–pseudomode coupling Ω₀.
    pub coupling: f64,
}

impl LorentzianModel {
    pub fn new(omega0: f64, omega_c: f64, gamma: f64, coupling: f64) -> Result<Self> {
        for (name, v) in [
            ("omega0", omega0),
            ("omega_c", omega_c),
            ("gamma", gamma),
            ("omega_coupling", coupling),
        ] {
            require_finite(name, v)?;
        }
        if gamma <= 0.0 {
            return Err(Error::NonPhysical(format!("Gamma > 0 violated (Gamma = {gamma})")));
        }
        if coupling < 0.0 {
            return Err(Error::InvalidParameter(format!(
                "Omega0 >= 0 violated (Omega0 = {coupling})"
            )));
        }
        Ok(Self { omega0, omega_c, gamma, coupling })
    }

    /// ω_c − ω₀.
    pub fn detuning(&self) -> f64 {
        self.omega_c - self.omega0
    }

    /// Pole of the spectral density in the lower half plane, `ω_c − iΓ/2`.
    pub fn pole(&self) -> C64 {
        C64::new(self.omega_c, -0.5 * self.gamma)
    }

    /// Golden-rule decay rate `4Ω₀²/Γ`.
    pub fn markovian_rate(&self) -> f64 {
        4.0 * self.coupling * self.coupling / self.gamma
    }
}

/// Inverted-Lorentzian band-gap reservoir: a broad Lorentzian minus a
/// narrow one with a common center.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BandGapModel {
    pub omega0: f64,
    pub omega_c: f64,
    pub w1: f64,
    pub w2: f64,
    pub gamma1: f64,
    pub gamma2: f64,
    /// Coupling Ω₀ between the atom and the second pseudomode.
    pub coupling: f64,
}

impl BandGapModel {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        omega0: f64,
        omega_c: f64,
        w1: f64,
        w2: f64,
        gamma1: f64,
        gamma2: f64,
        coupling: f64,
        validation: Validation,
    ) -> Result<Self> {
        let model = Self { omega0, omega_c, w1, w2, gamma1, gamma2, coupling };
        let violations = model.violations(validation);
        if let Some(first) = violations.into_iter().next() {
            return Err(first);
        }
        Ok(model)
    }

    /// Every violated invariant, not only the first.
    pub fn violations(&self, validation: Validation) -> Vec<Error> {
        let mut out = Vec::new();
        for (name, v) in [
            ("omega0", self.omega0),
            ("omega_c", self.omega_c),
            ("w1", self.w1),
            ("w2", self.w2),
            ("gamma1", self.gamma1),
            ("gamma2", self.gamma2),
            ("omega_coupling", self.coupling),
        ] {
            if let Err(e) = require_finite(name, v) {
                out.push(e);
            }
        }
        if !out.is_empty() {
            return out;
        }
        if !(self.gamma2 > 0.0) {
            out.push(Error::NonPhysical(format!("Gamma2 > 0 violated (Gamma2 = {})", self.gamma2)));
        }
        if !(self.gamma1 > self.gamma2) {
            out.push(Error::NonPhysical(format!(
                "Gamma1 > Gamma2 violated (Gamma1 = {}, Gamma2 = {})",
                self.gamma1, self.gamma2
            )));
        }
        if self.w2 < 0.0 {
            out.push(Error::NonPhysical(format!("W2 >= 0 violated (W2 = {})", self.w2)));
        }
        if !(self.w1 > self.w2) {
            out.push(Error::NonPhysical(format!(
                "W1 > W2 violated (W1 = {}, W2 = {})",
                self.w1, self.w2
            )));
        }
        if self.coupling < 0.0 {
            out.push(Error::InvalidParameter(format!(
                "Omega0 >= 0 violated (Omega0 = {})",
                self.coupling
            )));
        }
        if validation == Validation::Strict && out.is_empty() {
            let (g1, g2) = self.leak_rates();
            if g1 < 0.0 {
                out.push(Error::NonPhysical(format!(
                    "Gamma'1 = W1*Gamma2 - W2*Gamma1 = {g1} < 0 (no Lindblad form)"
                )));
            }
            if !(g2 > 0.0) {
                out.push(Error::NonPhysical(format!(
                    "Gamma'2 = W1*Gamma1 - W2*Gamma2 = {g2} <= 0 (no Lindblad form)"
                )));
            }
        }
        out
    }

    /// Spectral density: the difference of the two Lorentzians.
    pub fn density(&self, omega: f64) -> f64 {
        lorentzian_density(self.w1, self.gamma1, self.omega_c, omega)
            - lorentzian_density(self.w2, self.gamma2, self.omega_c, omega)
    }

    pub fn detuning(&self) -> f64 {
        self.omega_c - self.omega0
    }

    /// `W1/Γ1 = W2/Γ2`, checked through the cross products.
    pub fn is_perfect_gap(&self) -> bool {
        self.leak_rates().0 == 0.0
    }

    /// `(Γ′₁, Γ′₂)`. A `Γ′₁` within a few ulps of zero is returned as exactly
    /// zero so that perfect-gap inputs given as rounded decimals still reach
    /// the lossless first-pseudomode case.
    fn leak_rates(&self) -> (f64, f64) {
        let p = self.w1 * self.gamma2;
        let q = self.w2 * self.gamma1;
        let mut g1 = p - q;
        if g1.abs() <= 4.0 * f64::EPSILON * p.abs().max(q.abs()) {
            g1 = 0.0;
        }
        let g2 = self.w1 * self.gamma1 - self.w2 * self.gamma2;
        (g1, g2)
    }

    /// Relative mismatch between Ω₀² and the integrated weight `W1 − W2`,
    /// when it exceeds 1%.
    pub fn normalization_warning(&self) -> Option<String> {
        let weight = self.w1 - self.w2;
        let c2 = self.coupling * self.coupling;
        let rel = (c2 - weight).abs() / weight.abs().max(f64::MIN_POSITIVE);
        (rel > 0.01).then(|| {
            format!(
                "Omega0^2 = {c2} differs from the integrated spectral weight W1 - W2 = {weight} by {:.1}%; continuing with the given Omega0",
                100.0 * rel
            )
        })
    }
}

/// Decay rates, intermode coupling and poles of the two-pseudomode network.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoPseudomodeConstants {
    /// Γ′₁, decay rate of the first (storage) pseudomode.
    pub gamma_p1: f64,
    /// Γ′₂, decay rate of the second pseudomode, the one the atom couples to.
    pub gamma_p2: f64,
    /// Intermode coupling V.
    pub v: f64,
    pub z1p: C64,
    pub z2p: C64,
}

impl TwoPseudomodeConstants {
    /// Derives the constants without checking the signs of Γ′₁ and Γ′₂.
    pub fn derive_unchecked(model: &BandGapModel) -> Self {
        let (gamma_p1, gamma_p2) = model.leak_rates();
        let v = (model.w1 * model.w2).sqrt() * (model.gamma1 - model.gamma2) / 2.0;
        Self {
            gamma_p1,
            gamma_p2,
            v,
            z1p: C64::new(model.omega_c, -0.5 * gamma_p1),
            z2p: C64::new(model.omega_c, -0.5 * gamma_p2),
        }
    }
}

pub fn derive_two_pseudomode_constants(model: &BandGapModel) -> Result<TwoPseudomodeConstants> {
    let c = TwoPseudomodeConstants::derive_unchecked(model);
    if c.gamma_p1 < 0.0 {
        return Err(Error::NonPhysical(format!(
            "Gamma'1 = W1*Gamma2 - W2*Gamma1 = {} < 0 (no Lindblad form)",
            c.gamma_p1
        )));
    }
    if !(c.gamma_p2 > 0.0) {
        return Err(Error::NonPhysical(format!(
            "Gamma'2 = W1*Gamma1 - W2*Gamma2 = {} <= 0 (no Lindblad form)",
            c.gamma_p2
        )));
    }
    Ok(c)
}

/// Either reservoir model.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ReservoirModel {
    Lorentzian(LorentzianModel),
    BandGap(BandGapModel),
}

impl ReservoirModel {
    pub fn omega0(&self) -> f64 {
        match self {
            ReservoirModel::Lorentzian(m) => m.omega0,
            ReservoirModel::BandGap(m) => m.omega0,
        }
    }

    pub fn coupling(&self) -> f64 {
        match self {
            ReservoirModel::Lorentzian(m) => m.coupling,
            ReservoirModel::BandGap(m) => m.coupling,
        }
    }
}

/// Uniform time grid with `n_steps` intervals (`n_steps + 1` points).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeGrid {
    t_start: f64,
    t_end: f64,
    n_steps: usize,
}

impl TimeGrid {
    pub fn new(t_start: f64, t_end: f64, n_steps: usize) -> Result<Self> {
        require_finite("t_start", t_start)?;
        require_finite("t_end", t_end)?;
        if !(t_end > t_start) {
            return Err(Error::InvalidParameter(format!(
                "t_end > t_start violated ({t_end} <= {t_start})"
            )));
        }
        if n_steps < 2 {
            return Err(Error::InvalidParameter(format!("n_steps >= 2 violated ({n_steps})")));
        }
        Ok(Self { t_start, t_end, n_steps })
    }

    pub fn t_start(&self) -> f64 {
        self.t_start
    }

    pub fn t_end(&self) -> f64 {
        self.t_end
    }

    pub fn n_steps(&self) -> usize {
        self.n_steps
    }

    /// Number of grid points.
    pub fn len(&self) -> usize {
        self.n_steps + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn dt(&self) -> f64 {
        (self.t_end - self.t_start) / self.n_steps as f64
    }

    pub fn time(&self, k: usize) -> f64 {
        if k == self.n_steps {
            self.t_end
        } else {
            self.t_start + (self.t_end - self.t_start) * (k as f64 / self.n_steps as f64)
        }
    }

    pub fn times(&self) -> Vec<f64> {
        (0..self.len()).map(|k| self.time(k)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn gap(w1: f64, w2: f64, g1: f64, g2: f64) -> BandGapModel {
        BandGapModel::new(0.0, 0.0, w1, w2, g1, g2, 1.0, Validation::Strict).unwrap()
    }

    #[test]
    fn lorentzian_values() {
        assert_eq!(lorentzian_density(1.0, 2.0, 0.0, 0.0), 2.0);
        assert_eq!(lorentzian_density(0.5, 1.0, 3.0, 3.5), 1.0);
        assert!(lorentzian_density(1.0, 2.0, 0.0, 1e12) < 1e-20);
        assert!(lorentzian_density(1.0, 2.0, 0.0, -1e12) < 1e-20);
        // peak at the center
        let peak = lorentzian_density(1.0, 2.0, 0.3, 0.3);
        for w in [-1.0, 0.0, 0.29, 0.31, 2.0] {
            assert!(lorentzian_density(1.0, 2.0, 0.3, w) < peak);
        }
    }

    #[test]
    fn band_gap_density_values() {
        let m = gap(2.0, 1.0, 4.0, 2.0);
        assert_eq!(m.density(0.0), 0.0);
        let single = BandGapModel::new(0.0, 1.0, 1.5, 0.0, 2.0, 1.0, 1.0, Validation::Strict).unwrap();
        for w in [-3.0, 0.0, 1.0, 2.5] {
            assert_eq!(single.density(w), lorentzian_density(1.5, 2.0, 1.0, w));
        }
    }

    #[test]
    fn constants_plug_in() {
        let c = derive_two_pseudomode_constants(&gap(2.0, 1.0, 4.0, 2.0)).unwrap();
        assert_eq!(c.gamma_p1, 0.0);
        assert_eq!(c.gamma_p2, 6.0);
        assert!((c.v - 2f64.sqrt()).abs() < 1e-15);
        assert_eq!(c.z1p, C64::new(0.0, 0.0));
        assert_eq!(c.z2p, C64::new(0.0, -3.0));

        let c = derive_two_pseudomode_constants(&gap(1.5, 0.0, 3.0, 1.0)).unwrap();
        assert_eq!(c.gamma_p1, 1.5);
        assert_eq!(c.gamma_p2, 4.5);
        assert_eq!(c.v, 0.0);
    }

    #[test]
    fn perfect_gap_from_rounded_decimals() {
        // W2 = W1·Γ2/Γ1 computed in floating point
        let (w1, g1, g2) = (0.7, 3.3, 1.1);
        let m = gap(w1, w1 * g2 / g1, g1, g2);
        assert!(m.is_perfect_gap());
        assert_eq!(derive_two_pseudomode_constants(&m).unwrap().gamma_p1, 0.0);
        assert!(m.density(m.omega_c).abs() < 1e-15);
    }

    #[test]
    fn rejects_negative_leak_rate() {
        let err = BandGapModel::new(0.0, 0.0, 2.0, 1.5, 4.0, 2.0, 1.0, Validation::Strict).unwrap_err();
        assert!(matches!(err, Error::NonPhysical(ref s) if s.contains("Gamma'1")), "{err}");
        let m = BandGapModel::new(0.0, 0.0, 2.0, 1.5, 4.0, 2.0, 1.0, Validation::AllowNonphysical)
            .unwrap();
        assert!(derive_two_pseudomode_constants(&m).is_err());
        assert!(TwoPseudomodeConstants::derive_unchecked(&m).gamma_p1 < 0.0);
        // the density dips below zero in exactly this regime
        assert!(m.density(m.omega_c) < 0.0);
    }

    #[test]
    fn rejects_bad_orderings() {
        assert!(BandGapModel::new(0.0, 0.0, 2.0, 1.0, 2.0, 4.0, 1.0, Validation::Strict).is_err());
        assert!(BandGapModel::new(0.0, 0.0, 1.0, 2.0, 4.0, 2.0, 1.0, Validation::Strict).is_err());
        assert!(LorentzianModel::new(0.0, 0.0, 0.0, 1.0).is_err());
        assert!(LorentzianModel::new(0.0, 0.0, 1.0, -1.0).is_err());
        assert!(LorentzianModel::new(f64::NAN, 0.0, 1.0, 1.0).is_err());
    }

    #[test]
    fn normalization_warning_threshold() {
        let m = BandGapModel::new(0.0, 0.0, 2.0, 1.0, 4.0, 2.0, 1.0, Validation::Strict).unwrap();
        assert!(m.normalization_warning().is_none());
        let m = BandGapModel { coupling: 1.1, ..m };
        assert!(m.normalization_warning().is_some());
    }

    #[test]
    fn grid_layout() {
        let g = TimeGrid::new(0.0, 10.0, 4000).unwrap();
        assert_eq!(g.len(), 4001);
        assert_eq!(g.time(0), 0.0);
        assert_eq!(g.time(4000), 10.0);
        assert!((g.dt() - 0.0025).abs() < 1e-16);
        assert!(TimeGrid::new(0.0, 1.0, 1).is_err());
        assert!(TimeGrid::new(1.0, 1.0, 10).is_err());
    }

    fn band_gap_params() -> impl Strategy<Value = (f64, f64, f64, f64)> {
        (0.1f64..5.0, 0.0f64..1.0, 0.1f64..5.0, 0.05f64..0.95).prop_map(|(w1, wf, g2, gf)| {
            let g1 = g2 / gf;
            // W2 below the perfect-gap bound W1·Γ2/Γ1
            let w2 = wf * w1 * g2 / g1;
            (w1, w2, g1, g2)
        })
    }

    proptest! {
        #[test]
        fn leak_rates_sum((w1, w2, g1, g2) in band_gap_params()) {
            let m = gap(w1, w2, g1, g2);
            let c = derive_two_pseudomode_constants(&m).unwrap();
            let expect = (w1 - w2) * (g1 + g2);
            prop_assert!((c.gamma_p1 + c.gamma_p2 - expect).abs() <= 1e-12 * expect.abs().max(1.0));
        }

        #[test]
        fn additivity_and_non_negativity((w1, w2, g1, g2) in band_gap_params(), w in -20.0f64..20.0) {
            let m = gap(w1, w2, g1, g2);
            let d = m.density(w);
            prop_assert_eq!(d, lorentzian_density(w1, g1, 0.0, w) - lorentzian_density(w2, g2, 0.0, w));
            prop_assert!(d >= -1e-12);
        }

        #[test]
        fn derivation_is_pure((w1, w2, g1, g2) in band_gap_params()) {
            let m = gap(w1, w2, g1, g2);
            let a = derive_two_pseudomode_constants(&m).unwrap();
            let b = derive_two_pseudomode_constants(&m).unwrap();
            prop_assert_eq!(a.gamma_p1.to_bits(), b.gamma_p1.to_bits());
            prop_assert_eq!(a.gamma_p2.to_bits(), b.gamma_p2.to_bits());
            prop_assert_eq!(a.v.to_bits(), b.v.to_bits());
        }

        #[test]
        fn perfect_gap_equivalence(k in 1u32..64, a in 1u32..64, b in 1u32..64) {
            // dyadic values keep every product exact
            let (g1, g2) = if a > b { (a as f64 / 8.0, b as f64 / 8.0) } else if b > a { (b as f64 / 8.0, a as f64 / 8.0) } else { return Ok(()); };
            let scale = k as f64 / 16.0;
            let m = gap(scale * g1, scale * g2, g1, g2);
            prop_assert!(m.is_perfect_gap());
            prop_assert_eq!(derive_two_pseudomode_constants(&m).unwrap().gamma_p1, 0.0);
            prop_assert_eq!(m.density(m.omega_c), 0.0);
        }
    }
}
