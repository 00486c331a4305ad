//! Finite-dimensional stand-in for a pair of non-commuting projections that
//! share a common `+1` eigenvector.
//!
//! In `C⁴` with `ψ = |0>`, `u = |1>` and `v = ½|1> + (√3/2)|2>`, the rank-two
//! projections `E = |ψ><ψ| + |u><u|` and `F = |ψ><ψ| + |v><v|` do not commute,
//! yet `T = |ψ><ψ|` detects both of them in the state `ρ = T`.

use super::{Claim, Scenario};
use crate::error::Result;
use crate::numerics::{CMatrix, Tolerance, C64};
use crate::observables::{DensityOperator, Projection};

/// `<u|v>` for the two directions completing `ψ` to the ranges of `E` and `F`.
pub const RT_OVERLAP: f64 = 0.5;

pub fn build_rt_analogue() -> Result<Scenario> {
    let tol = Tolerance::default();
    let z = C64::new(0.0, 0.0);
    let re = |x: f64| C64::new(x, 0.0);
    let psi = vec![re(1.0), z, z, z];
    let u = vec![z, re(1.0), z, z];
    let v = vec![z, re(RT_OVERLAP), re((1.0 - RT_OVERLAP * RT_OVERLAP).sqrt()), z];

    let t = CMatrix::outer(&psi)?;
    let e = t.add(&CMatrix::outer(&u)?)?;
    let f = t.add(&CMatrix::outer(&v)?)?;

    let rho = DensityOperator::pure("psi", &psi, &tol)?;
    let mut scn = Scenario::new("rt-analogue", rho).with_state_vector(psi);
    scn.add(Projection::new("E", e, &tol)?)?;
    scn.add(Projection::new("F", f, &tol)?)?;
    scn.add(Projection::new("T", t, &tol)?)?;
    scn.claims = vec![
        Claim::Detect {
            t: "T".into(),
            e: "E".into(),
        },
        Claim::Detect {
            t: "T".into(),
            e: "F".into(),
        },
    ];
    Ok(scn)
}
