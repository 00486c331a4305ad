//! Two-dimensional counterexample in which the consistency condition
//! `Tr(ρF) = p(E&F) + p(E'&F)` fails for two pure states but holds for their
//! equal-weight mixture.
//!
//! With orthonormal `ψ₁ = |0>`, `ψ₂ = |1>`: `E = ½|ψ₁+ψ₂><ψ₁+ψ₂|`,
//! `F(θ) = |cosθ ψ₁ + i sinθ ψ₂><…|`, `ρ₁ = |ψ₁><ψ₁|`, `ρ₂ = |ψ₂><ψ₂|`.
//! Both assignment probabilities equal ¼ in each pure state while
//! `Tr(ρ₁F) = cos²θ` and `Tr(ρ₂F) = sin²θ`; in the mixture the cross terms
//! `Tr(ρE'FE)` vanish and the condition holds for every `F`.

use std::f64::consts::FRAC_PI_4;

use serde::Serialize;

use super::Scenario;
use crate::assignment::assignment_probs;
use crate::error::Result;
use crate::numerics::{CMatrix, Tolerance, C64};
use crate::observables::{complement, DensityOperator, Projection};

#[derive(Clone, Debug)]
pub struct MixtureCounterexample {
    pub theta: f64,
    pub e: Projection,
    pub f: Projection,
    pub rho1: DensityOperator,
    pub rho2: DensityOperator,
    pub mixture: DensityOperator,
}

impl MixtureCounterexample {
    /// Scenario view with the mixture as its state.
    pub fn scenario(&self) -> Result<Scenario> {
        let mut s = Scenario::new(
            format!("mixture-counterexample(theta={})", self.theta),
            self.mixture.clone(),
        );
        s.add(self.e.clone())?;
        s.add(self.f.clone())?;
        Ok(s)
    }
}

/// Values outside `(0, π/4)` are accepted with a warning.
pub fn build_mixture_counterexample(theta: f64) -> Result<MixtureCounterexample> {
    if !(theta > 0.0 && theta < FRAC_PI_4) {
        log::warn!("theta = {theta} is outside (0, pi/4)");
    }
    let tol = Tolerance::default();
    let h = C64::new(0.5, 0.0);
    let e = Projection::new("E", CMatrix::from_rows(&[vec![h, h], vec![h, h]])?, &tol)?;
    let phi = [C64::new(theta.cos(), 0.0), C64::new(0.0, theta.sin())];
    let f = Projection::new("F", CMatrix::outer(&phi)?, &tol)?;
    let rho1 = DensityOperator::new("rho1", CMatrix::diag(&[1.0, 0.0])?, &tol)?;
    let rho2 = DensityOperator::new("rho2", CMatrix::diag(&[0.0, 1.0])?, &tol)?;
    let mixture = DensityOperator::mixture("rho", 0.5, &rho1, &rho2, &tol)?;
    Ok(MixtureCounterexample {
        theta,
        e,
        f,
        rho1,
        rho2,
        mixture,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct C3Outcome {
    pub state: String,
    pub tr_rho_f: f64,
    pub p_e_and_f: f64,
    pub p_eprime_and_f: f64,
    pub residual: f64,
    /// Closed-form residual: `|cos²θ - ½|`, `|sin²θ - ½|` or `0`.
    pub expected_residual: f64,
    pub holds: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct MixtureReport {
    pub theta: f64,
    pub rho1: C3Outcome,
    pub rho2: C3Outcome,
    pub mixture: C3Outcome,
    /// `|Tr(ρE'FE)|` in the mixture.
    pub cross_term: f64,
    pub bound: f64,
    /// The condition fails for both components and holds for the mixture.
    pub pattern_matched: bool,
}

pub fn verify_mixture_counterexample(theta: f64, tol: &Tolerance) -> Result<MixtureReport> {
    let ex = build_mixture_counterexample(theta)?;
    let bound = tol.scaled(2);
    let (c2, s2) = (theta.cos().powi(2), theta.sin().powi(2));
    let outcome = |rho: &DensityOperator, expected: f64| -> Result<C3Outcome> {
        let ap = assignment_probs(&ex.e, &ex.f, rho, tol)?;
        Ok(C3Outcome {
            state: rho.name().into(),
            tr_rho_f: ap.tr_rho_f,
            p_e_and_f: ap.p_e_and_f,
            p_eprime_and_f: ap.p_eprime_and_f,
            residual: ap.c3_residual,
            expected_residual: expected,
            holds: ap.c3_residual <= bound,
        })
    };
    let rho1 = outcome(&ex.rho1, (c2 - 0.5).abs())?;
    let rho2 = outcome(&ex.rho2, (s2 - 0.5).abs())?;
    let mixture = outcome(&ex.mixture, 0.0)?;
    let ec = complement(&ex.e);
    let cross = ex
        .mixture
        .expectation(&ec.matrix().mul(ex.f.matrix())?.mul(ex.e.matrix())?)?;
    Ok(MixtureReport {
        theta,
        pattern_matched: !rho1.holds && !rho2.holds && mixture.holds,
        rho1,
        rho2,
        mixture,
        cross_term: cross.norm(),
        bound,
    })
}
