// Copyright 2026 The memorymodes Authors
// SPDX-License-Identifier: Apache-2.0

//! CSV rendering. Numbers use 17 significant digits; complex quantities
//! are written in the lab frame.

use std::fmt::Write as _;

use num_complex::Complex64 as C64;

use crate::amplitude::{AmplitudeTrajectory, Layout};
use crate::density::DensitySeries;
use crate::info::InfoSeries;
use crate::rates::{MemoryIdentityReport, RateTrajectory};
use crate::trajectory::{ComparisonReport, McwfEnsemble, NmqjEnsemble};

/// 17 significant digits; negative zero prints as zero.
pub fn num(x: f64) -> String {
    format!("{:.16e}", x + 0.0)
}

fn push_complex(row: &mut String, z: C64) {
    let _ = write!(row, ",{},{}", num(z.re), num(z.im));
}

fn lab_phase(omega0: f64, t: f64) -> C64 {
    C64::new(0.0, -omega0 * t).exp()
}

pub fn amplitudes_csv(traj: &AmplitudeTrajectory) -> String {
    let mut out = String::from(match traj.layout {
        Layout::Single => "t,re_c1,im_c1,re_b1,im_b1\n",
        Layout::Double => "t,re_c1,im_c1,re_a1,im_a1,re_a2,im_a2\n",
    });
    for k in 0..traj.len() {
        out.push_str(&num(traj.grid.time(k)));
        for z in traj.lab_state(k).iter() {
            push_complex(&mut out, *z);
        }
        out.push('\n');
    }
    out
}

/// Rates, optionally followed by the compensated pseudomode rate of change
/// and `γ|c1|²` from a memory-identity report on the same grid.
pub fn rates_csv(rates: &RateTrajectory, identity: Option<&MemoryIdentityReport>) -> String {
    let mut out = String::from("t,S,gamma,valid");
    if identity.is_some() {
        out.push_str(",compensated,gamma_pop");
    }
    out.push('\n');
    for k in 0..rates.len() {
        let _ = write!(
            out,
            "{},{},{},{}",
            num(rates.grid.time(k)),
            num(rates.s[k]),
            num(rates.gamma[k]),
            u8::from(rates.valid[k])
        );
        if let Some(id) = identity {
            let _ = write!(out, ",{},{}", num(id.lhs[k]), num(id.rhs[k]));
        }
        out.push('\n');
    }
    out
}

pub fn identity_csv(report: &MemoryIdentityReport) -> String {
    let mut out = String::from("t,lhs,rhs,residual\n");
    for k in 0..report.lhs.len() {
        let _ = writeln!(
            out,
            "{},{},{},{}",
            num(report.grid.time(k)),
            num(report.lhs[k]),
            num(report.rhs[k]),
            num(report.residual[k])
        );
    }
    out
}

/// Upper triangle of each lab-frame density matrix, row-major.
pub fn density_csv(series: &DensitySeries) -> String {
    let basis = series.states.first().map(|s| s.basis()).unwrap_or(crate::density::Basis::Atom);
    let d = basis.dim();
    let mut out = format!("# dim={d}, basis={}\nt", basis.labels().join("|"));
    for i in 0..d {
        for j in i..d {
            let _ = write!(out, ",re_{i}{j},im_{i}{j}");
        }
    }
    out.push('\n');
    for k in 0..series.len() {
        let rho = series.lab_state(k);
        out.push_str(&num(series.grid.time(k)));
        for i in 0..d {
            for j in i..d {
                push_complex(&mut out, rho.get(i, j));
            }
        }
        out.push('\n');
    }
    out
}

pub fn nmqj_csv(ens: &NmqjEnsemble) -> String {
    let mut out = String::from("t,n0,n1,re_cg,im_cg,re_ce,im_ce\n");
    for r in &ens.records {
        let _ = write!(out, "{},{},{}", num(r.t), r.n0, r.n1);
        push_complex(&mut out, r.psi0[0]);
        push_complex(&mut out, r.psi0[1] * lab_phase(ens.omega0, r.t));
        out.push('\n');
    }
    out
}

pub fn mcwf_csv(ens: &McwfEnsemble) -> String {
    let labels = ens.basis.labels();
    let mut out = String::from("t,n0,n1");
    for l in labels {
        let _ = write!(out, ",re_{l},im_{l}");
    }
    for c in 1..=ens.channel_rates.len() {
        let _ = write!(out, ",jumps{c}");
    }
    out.push('\n');
    for r in &ens.records {
        let _ = write!(out, "{},{},{}", num(r.t), r.n0, r.n1);
        let carrier = lab_phase(ens.omega0, r.t);
        for (i, z) in r.psi0.iter().enumerate() {
            push_complex(&mut out, if i == 0 { *z } else { *z * carrier });
        }
        for j in &r.jumps {
            let _ = write!(out, ",{j}");
        }
        out.push('\n');
    }
    out
}

/// `sigma` and `z` refer to the difference of the two ensemble estimates.
pub fn comparison_csv(report: &ComparisonReport) -> String {
    let mut out = String::from("t,pg_nmqj,pg_mcwf,pg_exact,sigma,z\n");
    for k in 0..report.pg_exact.len() {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{}",
            num(report.grid.time(k)),
            num(report.pg_nmqj[k]),
            num(report.pg_mcwf[k]),
            num(report.pg_exact[k]),
            num(report.sigma[k]),
            num(report.z[k])
        );
    }
    out
}

pub fn info_csv(series: &InfoSeries) -> String {
    let mut out = String::from("t,s_atom,s_pseudo,s_joint,mutual_info\n");
    for k in 0..series.entropy_atom.len() {
        let _ = writeln!(
            out,
            "{},{},{},{},{}",
            num(series.grid.time(k)),
            num(series.entropy_atom[k]),
            num(series.entropy_pseudomode[k]),
            num(series.entropy_joint[k]),
            num(series.mutual_information[k])
        );
    }
    out
}
