// Copyright 2026 The memorymodes Authors
// SPDX-License-Identifier: Apache-2.0

//! Dormand–Prince 5(4) integrator for complex-valued systems with
//! continuous (dense) output onto a set of requested times.

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};

/// Step-size control settings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerance {
    pub rtol: f64,
    pub atol: f64,
    pub max_steps: usize,
    /// Upper bound on the step size, `None` for unbounded.
    pub max_step: Option<f64>,
}

impl Default for Tolerance {
    fn default() -> Self {
        Self { rtol: 1e-10, atol: 1e-12, max_steps: 5_000_000, max_step: None }
    }
}

const C: [f64; 7] = [0.0, 0.2, 0.3, 0.8, 8.0 / 9.0, 1.0, 1.0];

const A: [[f64; 6]; 7] = [
    [0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [0.2, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];

const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

const D: [f64; 7] = [
    -12715105075.0 / 11282082432.0,
    0.0,
    87487479700.0 / 32700410799.0,
    -10690763975.0 / 1880347072.0,
    701980252875.0 / 199316789632.0,
    -1453857185.0 / 822651844.0,
    69997945.0 / 29380423.0,
];

fn scaled_norm(err: &[C64], y0: &[C64], y1: &[C64], tol: &Tolerance) -> f64 {
    let n = err.len().max(1) as f64;
    let sum: f64 = err
        .iter()
        .zip(y0.iter().zip(y1))
        .map(|(e, (a, b))| {
            let sc = tol.atol + tol.rtol * a.norm().max(b.norm());
            (e.norm() / sc).powi(2)
        })
        .sum();
    (sum / n).sqrt()
}

/// Integrates `dy/dt = rhs(t, y)` from `times[0]` and returns the solution
/// at every entry of `times` (which must be non-decreasing).
pub fn solve_dense<F>(mut rhs: F, y0: &[C64], times: &[f64], tol: &Tolerance) -> Result<Vec<Vec<C64>>>
where
    F: FnMut(f64, &[C64], &mut [C64]),
{
    let n = y0.len();
    let mut out = Vec::with_capacity(times.len());
    let Some(&t0) = times.first() else {
        return Ok(out);
    };
    let t_end = *times.last().unwrap();
    if times.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::InvalidParameter("output times must be non-decreasing".into()));
    }

    let mut t = t0;
    let mut y = y0.to_vec();
    let mut k: Vec<Vec<C64>> = vec![vec![C64::default(); n]; 7];
    let mut stage = vec![C64::default(); n];
    let mut y_new = vec![C64::default(); n];
    let mut err = vec![C64::default(); n];
    let mut rcont = vec![vec![C64::default(); n]; 5];

    rhs(t, &y, &mut k[0]);
    let mut next_out = 0;
    while next_out < times.len() && times[next_out] <= t {
        out.push(y.clone());
        next_out += 1;
    }
    if next_out == times.len() {
        return Ok(out);
    }

    let span = t_end - t0;
    let mut h = initial_step(&mut rhs, t, &y, &k[0], tol, span);
    if let Some(hmax) = tol.max_step {
        h = h.min(hmax);
    }
    let mut steps = 0usize;
    let mut rejected_last = false;

    while next_out < times.len() {
        steps += 1;
        if steps > tol.max_steps {
            return Err(Error::ToleranceNotMet { t, reason: format!("exceeded {} steps", tol.max_steps) });
        }
        if t + h > t_end {
            h = t_end - t;
        }
        if h <= 1e-14 * t.abs().max(span) {
            return Err(Error::ToleranceNotMet { t, reason: format!("step size underflow (h = {h:e})") });
        }

        for s in 1..7 {
            for i in 0..n {
                let mut acc = y[i];
                for (j, kj) in k.iter().enumerate().take(s) {
                    let a = A[s][j];
                    if a != 0.0 {
                        acc += kj[i] * (h * a);
                    }
                }
                stage[i] = acc;
            }
            if s == 6 {
                y_new.copy_from_slice(&stage);
            }
            rhs(t + C[s] * h, &stage, &mut k[s]);
        }
        for i in 0..n {
            let mut e = C64::default();
            for (s, ks) in k.iter().enumerate() {
                if E[s] != 0.0 {
                    e += ks[i] * E[s];
                }
            }
            err[i] = e * h;
        }
        let en = scaled_norm(&err, &y, &y_new, tol);
        if !en.is_finite() {
            return Err(Error::ToleranceNotMet { t, reason: "non-finite error estimate".into() });
        }

        if en <= 1.0 {
            let t_new = if (t + h - t_end).abs() <= 1e-15 * span.max(1.0) { t_end } else { t + h };
            // dense output coefficients for the accepted step
            for i in 0..n {
                let ydiff = y_new[i] - y[i];
                let bspl = k[0][i] * h - ydiff;
                rcont[0][i] = y[i];
                rcont[1][i] = ydiff;
                rcont[2][i] = bspl;
                rcont[3][i] = ydiff - k[6][i] * h - bspl;
                let mut d = C64::default();
                for (s, ks) in k.iter().enumerate() {
                    if D[s] != 0.0 {
                        d += ks[i] * D[s];
                    }
                }
                rcont[4][i] = d * h;
            }
            while next_out < times.len() && times[next_out] <= t_new {
                let theta = (times[next_out] - t) / h;
                let theta1 = 1.0 - theta;
                let v: Vec<C64> = (0..n)
                    .map(|i| {
                        rcont[0][i]
                            + (rcont[1][i]
                                + (rcont[2][i] + (rcont[3][i] + rcont[4][i] * theta1) * theta) * theta1)
                                * theta
                    })
                    .collect();
                out.push(if times[next_out] == t_new { y_new.clone() } else { v });
                next_out += 1;
            }
            t = t_new;
            std::mem::swap(&mut y, &mut y_new);
            let last = std::mem::take(&mut k[6]);
            k[0] = last;
            k[6] = vec![C64::default(); n];

            let mut fac = (0.9 * en.max(1e-10).powf(-0.2)).clamp(0.2, 10.0);
            if rejected_last {
                fac = fac.min(1.0);
            }
            rejected_last = false;
            h *= fac;
        } else {
            rejected_last = true;
            h *= (0.9 * en.powf(-0.2)).clamp(0.2, 1.0);
        }
        if let Some(hmax) = tol.max_step {
            h = h.min(hmax);
        }
    }
    Ok(out)
}

fn initial_step<F>(rhs: &mut F, t: f64, y: &[C64], f0: &[C64], tol: &Tolerance, span: f64) -> f64
where
    F: FnMut(f64, &[C64], &mut [C64]),
{
    let zero = vec![C64::default(); y.len()];
    let d0 = scaled_norm(y, y, &zero, tol);
    let d1 = scaled_norm(f0, y, &zero, tol);
    let mut h0 = if d0 < 1e-5 || d1 < 1e-5 { 1e-6 } else { 0.01 * d0 / d1 };
    h0 = h0.min(span);
    let y1: Vec<C64> = y.iter().zip(f0).map(|(a, b)| a + b * h0).collect();
    let mut f1 = vec![C64::default(); y.len()];
    rhs(t + h0, &y1, &mut f1);
    let diff: Vec<C64> = f1.iter().zip(f0).map(|(a, b)| a - b).collect();
    let d2 = scaled_norm(&diff, y, &zero, tol) / h0;
    let h1 = if d1.max(d2) <= 1e-15 {
        (h0 * 1e-3).max(1e-6)
    } else {
        (0.01 / d1.max(d2)).powf(0.2)
    };
    (100.0 * h0).min(h1).min(span)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exponential_decay_and_rotation() {
        let lambda = C64::new(-0.3, 2.0);
        let times: Vec<f64> = (0..=200).map(|k| k as f64 * 0.05).collect();
        let sol = solve_dense(
            |_, y, dy| dy[0] = lambda * y[0],
            &[C64::new(1.0, 0.0)],
            &times,
            &Tolerance::default(),
        )
        .unwrap();
        for (t, y) in times.iter().zip(&sol) {
            let exact = (lambda * t).exp();
            assert!((y[0] - exact).norm() < 1e-9, "t = {t}: {} vs {}", y[0], exact);
        }
    }

    #[test]
    fn time_dependent_rhs() {
        // y' = cos(t) y, y = exp(sin t)
        let times: Vec<f64> = (0..=100).map(|k| k as f64 * 0.1).collect();
        let sol = solve_dense(
            |t, y, dy| dy[0] = y[0] * t.cos(),
            &[C64::new(1.0, 0.0)],
            &times,
            &Tolerance::default(),
        )
        .unwrap();
        for (t, y) in times.iter().zip(&sol) {
            assert!((y[0].re - t.sin().exp()).abs() < 1e-9);
        }
    }

    #[test]
    fn reports_step_budget() {
        let tol = Tolerance { max_steps: 3, ..Tolerance::default() };
        let err = solve_dense(
            |_, y, dy| dy[0] = y[0] * C64::new(0.0, 50.0),
            &[C64::new(1.0, 0.0)],
            &[0.0, 100.0],
            &tol,
        )
        .unwrap_err();
        assert!(matches!(err, Error::ToleranceNotMet { .. }));
    }
}
