//! The detection relation: `T` detects `E` in state `ρ` when the two
//! elementary observables commute and `Eρ = Tρ`, equivalently when both
//! discordant joint outcomes `(1,0)` and `(0,1)` have probability zero.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::numerics::{CMatrix, Tolerance};
use crate::observables::{commutation_defect, complement, require_commuting, DensityOperator, Projection};

/// Outcome of checking `T ⟷ρ E`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DetectionCheck {
    pub commutes: bool,
    /// `dist(TE, ET)`.
    pub commutation_defect: f64,
    /// `dist(Eρ, Tρ)`.
    pub state_equal_defect: f64,
    /// `Tr(ρ T (1 - E))`.
    pub discord_10: f64,
    /// `Tr(ρ (1 - T) E)`.
    pub discord_01: f64,
    /// `Tr(ρ T)`.
    pub trace_rho_t: f64,
    /// `atol·dim` used for every comparison above.
    pub bound: f64,
    pub holds: bool,
}

impl DetectionCheck {
    /// Largest of the two defects that decide the relation.
    pub fn residual(&self) -> f64 {
        self.commutation_defect.max(self.state_equal_defect)
    }

    /// True when one of the outcomes of `T` has probability zero, so the
    /// perfect-correlation reading is only informative on the other side.
    pub fn is_vacuous(&self) -> bool {
        self.trace_rho_t <= self.bound || self.trace_rho_t >= 1.0 - self.bound
    }

    pub fn note(&self) -> Option<String> {
        if !self.is_vacuous() {
            return None;
        }
        Some(if self.trace_rho_t <= self.bound {
            "Tr(rho T) = 0: outcome 1 of T never occurs; correlation is vacuous on that side".into()
        } else {
            "Tr(rho T) = 1: outcome 0 of T never occurs; correlation is vacuous on that side".into()
        })
    }
}

/// Real part of `Tr(ρ A)` for an `A` whose trace against `ρ` must be real;
/// the imaginary residue is checked against the tolerance.
fn real_trace(rho: &DensityOperator, a: &CMatrix, bound: f64, check_imag: bool) -> Result<f64> {
    let z = rho.expectation(a)?;
    if check_imag && z.im.abs() > bound {
        return Err(Error::Precondition(format!(
            "trace expected to be real has imaginary part {:.3e}",
            z.im
        )));
    }
    Ok(z.re)
}

fn check_dims(t: &Projection, e: &Projection, rho: &DensityOperator) -> Result<()> {
    for d in [e.dim(), rho.dim()] {
        if d != t.dim() {
            return Err(Error::DimensionMismatch {
                left: t.dim(),
                right: d,
            });
        }
    }
    Ok(())
}

/// Checks whether `t` detects `e` in `rho`.
pub fn detects(t: &Projection, e: &Projection, rho: &DensityOperator, tol: &Tolerance) -> Result<DetectionCheck> {
    check_dims(t, e, rho)?;
    let dim = t.dim();
    let bound = tol.scaled(dim);
    let (tm, em, rm) = (t.matrix(), e.matrix(), rho.matrix());
    let commutation_defect = commutation_defect(tm, em)?;
    let commutes = commutation_defect <= bound;
    let state_equal_defect = em.mul(rm)?.dist(&tm.mul(rm)?)?;
    let id = CMatrix::identity(dim);
    let discord_10 = real_trace(rho, &tm.mul(&id.sub(em)?)?, bound, commutes)?;
    let discord_01 = real_trace(rho, &id.sub(tm)?.mul(em)?, bound, commutes)?;
    let trace_rho_t = real_trace(rho, tm, bound, true)?;
    Ok(DetectionCheck {
        commutes,
        commutation_defect,
        state_equal_defect,
        discord_10,
        discord_01,
        trace_rho_t,
        bound,
        holds: commutes && state_equal_defect <= bound,
    })
}

/// The zero-discordance form of the relation. Requires `t` and `e` to commute:
/// only then is their joint outcome distribution defined.
pub fn detects_via_probability(t: &Projection, e: &Projection, rho: &DensityOperator, tol: &Tolerance) -> Result<bool> {
    check_dims(t, e, rho)?;
    require_commuting(t, e, tol)?;
    let check = detects(t, e, rho, tol)?;
    Ok(check.discord_10 <= check.bound && check.discord_01 <= check.bound)
}

/// `T` detects `E` iff `T'` detects `E'`. Returns the shared value, or
/// [`Error::LemmaViolation`] if the two sides disagree.
pub fn complement_lemma_check(t: &Projection, e: &Projection, rho: &DensityOperator, tol: &Tolerance) -> Result<bool> {
    let direct = detects(t, e, rho, tol)?.holds;
    let complement = detects(&complement(t), &complement(e), rho, tol)?.holds;
    if direct != complement {
        return Err(Error::LemmaViolation { direct, complement });
    }
    Ok(direct)
}

/// Given that `t` detects `e` in `λ₁ρ₁ + (1-λ₁)ρ₂`, reports whether it also
/// detects `e` in the component `ρ₁`. Detection is inherited by every
/// component with positive weight, so this returns `true` whenever the
/// precondition holds.
pub fn refinement_check(
    t: &Projection,
    e: &Projection,
    rho1: &DensityOperator,
    rho2: &DensityOperator,
    lambda1: f64,
    tol: &Tolerance,
) -> Result<bool> {
    if !(lambda1 > 0.0 && lambda1 <= 1.0) {
        return Err(Error::Precondition(format!("mixture weight {lambda1} not in (0, 1]")));
    }
    let mixture = DensityOperator::mixture("mixture", lambda1, rho1, rho2, tol)?;
    if !detects(t, e, &mixture, tol)?.holds {
        return Err(Error::Precondition(format!(
            "{} does not detect {} in the mixture",
            t.name(),
            e.name()
        )));
    }
    Ok(detects(t, e, rho1, tol)?.holds)
}

/// A rank-one detector `|ψ><ψ|` built from a common `+1` eigenvector of two
/// projections, together with the two certifying checks at `ρ = |ψ><ψ|`.
#[derive(Clone, Debug)]
pub struct RankOneDetector {
    pub projection: Projection,
    pub state: DensityOperator,
    pub vector: Vec<crate::numerics::C64>,
    pub detects_e: DetectionCheck,
    pub detects_f: DetectionCheck,
}

/// Looks for a unit vector with `Eψ = ψ` and `Fψ = ψ` in the top eigenspace of
/// `E + F` (eigenvalue `2` up to `eig_cut`). Returns `None` if there is none.
pub fn rank_one_detector(e: &Projection, f: &Projection, tol: &Tolerance) -> Result<Option<RankOneDetector>> {
    if e.dim() != f.dim() {
        return Err(Error::DimensionMismatch {
            left: e.dim(),
            right: f.dim(),
        });
    }
    let sum = e.matrix().add(f.matrix())?;
    let dec = sum.eigh(tol)?;
    let top = dec.values.len() - 1;
    if dec.values[top] < 2.0 - tol.eig_cut() {
        return Ok(None);
    }
    let vector = dec.column(top);
    let tmat = CMatrix::outer(&vector)?;
    let projection = Projection::new(format!("T({}^{})", e.name(), f.name()), tmat.clone(), tol)?;
    let state = DensityOperator::new("|psi><psi|", tmat, tol)?;
    let detects_e = detects(&projection, e, &state, tol)?;
    let detects_f = detects(&projection, f, &state, tol)?;
    Ok(Some(RankOneDetector {
        projection,
        state,
        vector,
        detects_e,
        detects_f,
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::C64;
    use crate::random;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn tol() -> Tolerance {
        Tolerance::default()
    }

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn proj(name: &str, m: CMatrix) -> Projection {
        Projection::new(name, m, &tol()).unwrap()
    }

    fn plus() -> Projection {
        proj(
            "P+",
            CMatrix::from_rows(&[vec![c(0.5, 0.0), c(0.5, 0.0)], vec![c(0.5, 0.0), c(0.5, 0.0)]]).unwrap(),
        )
    }

    fn plus_i() -> Projection {
        proj(
            "Pi",
            CMatrix::from_rows(&[vec![c(0.5, 0.0), c(0.0, -0.5)], vec![c(0.0, 0.5), c(0.5, 0.0)]]).unwrap(),
        )
    }

    fn mixed(dim: usize) -> DensityOperator {
        DensityOperator::new("mixed", CMatrix::identity(dim).scale_real(1.0 / dim as f64), &tol()).unwrap()
    }

    #[test]
    fn detection_is_reflexive() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let e = proj("E", random::projection(&mut rng, 5, 2));
        let rho = DensityOperator::new("r", random::density(&mut rng, 5, 3), &tol()).unwrap();
        let check = detects(&e, &e, &rho, &tol()).unwrap();
        assert!(check.holds);
        assert_eq!(check.state_equal_defect, 0.0);
        assert!(detects_via_probability(&e, &e, &rho, &tol()).unwrap());
    }

    #[test]
    fn non_commuting_pair_does_not_detect() {
        let check = detects(&plus(), &plus_i(), &mixed(2), &tol()).unwrap();
        assert!(!check.commutes && !check.holds);
        assert!(matches!(
            detects_via_probability(&plus(), &plus_i(), &mixed(2), &tol()),
            Err(Error::NotCommuting { .. })
        ));
    }

    #[test]
    fn dimension_mismatch_is_reported() {
        assert!(matches!(
            detects(&plus(), &Projection::identity(3), &mixed(2), &tol()),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn vacuous_detection_is_noted() {
        // T = E = |0><0| in state |1><1|: detection holds, outcome 1 never occurs.
        let e = proj("E", CMatrix::diag(&[1.0, 0.0]).unwrap());
        let rho = DensityOperator::new("r", CMatrix::diag(&[0.0, 1.0]).unwrap(), &tol()).unwrap();
        let check = detects(&e, &e, &rho, &tol()).unwrap();
        assert!(check.holds && check.is_vacuous());
        assert!(check.note().unwrap().contains("outcome 1"));
    }

    #[test]
    fn complement_lemma_trivial_case() {
        assert!(complement_lemma_check(&plus(), &plus(), &mixed(2), &tol()).unwrap());
    }

    #[test]
    fn refinement_trivial_cases() {
        let e = plus();
        let rho = mixed(2);
        assert!(refinement_check(&e, &e, &rho, &rho, 0.5, &tol()).unwrap());
        assert!(refinement_check(&e, &e, &rho, &rho, 1.0, &tol()).unwrap());
        assert!(matches!(
            refinement_check(&e, &e, &rho, &rho, 0.0, &tol()),
            Err(Error::Precondition(_))
        ));
        // T = diag(1,0), E = diag(1,1)... not detecting in the maximally mixed state.
        let t = proj("T", CMatrix::diag(&[1.0, 0.0]).unwrap());
        let e2 = Projection::identity(2);
        assert!(matches!(
            refinement_check(&t, &e2, &rho, &rho, 0.5, &tol()),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn rank_one_detector_on_identical_projections() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let e = proj("E", random::projection(&mut rng, 6, 3));
        let r = rank_one_detector(&e, &e, &tol())
            .unwrap()
            .expect("E has a +1 eigenvector");
        assert_eq!(r.projection.rank(), 1);
        assert!(r.detects_e.holds && r.detects_f.holds);
        let in_range = e.matrix().apply(&r.vector).unwrap();
        let err = in_range
            .iter()
            .zip(&r.vector)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max);
        assert!(err < 1e-12);
    }

    #[test]
    fn rank_one_detector_absent_without_common_eigenvector() {
        assert!(rank_one_detector(&plus(), &plus_i(), &tol()).unwrap().is_none());
    }

    /// Detecting triple: commuting T, E from a shared basis, ρ supported where
    /// their eigenvalues agree.
    fn detecting_triple(rng: &mut ChaCha8Rng, dim: usize) -> Option<(Projection, Projection, DensityOperator)> {
        let u = random::unitary(rng, dim);
        let tm = random::mask(rng, dim);
        let em = random::mask(rng, dim);
        let agree: Vec<f64> = tm
            .iter()
            .zip(&em)
            .map(|(a, b)| if a == b { 1.0 } else { 0.0 })
            .collect();
        let support = random::with_spectrum(&u, &agree);
        let rho = random::density_in(rng, &support)?;
        Some((
            proj("T", random::with_spectrum(&u, &tm)),
            proj("E", random::with_spectrum(&u, &em)),
            DensityOperator::new("rho", rho, &tol()).unwrap(),
        ))
    }

    #[test]
    fn detection_is_symmetric_and_closed_under_complement() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut detecting = 0;
        for _ in 0..300 {
            let dim = rng.random_range(2..=12);
            let (t, e, rho) = if rng.random_bool(0.5) {
                match detecting_triple(&mut rng, dim) {
                    Some(x) => x,
                    None => continue,
                }
            } else {
                let u = random::unitary(&mut rng, dim);
                (
                    proj("T", random::with_spectrum(&u, &random::mask(&mut rng, dim))),
                    proj("E", random::with_spectrum(&u, &random::mask(&mut rng, dim))),
                    DensityOperator::new("rho", random::density(&mut rng, dim, dim), &tol()).unwrap(),
                )
            };
            let fwd = detects(&t, &e, &rho, &tol()).unwrap().holds;
            let bwd = detects(&e, &t, &rho, &tol()).unwrap().holds;
            assert_eq!(fwd, bwd);
            assert_eq!(complement_lemma_check(&t, &e, &rho, &tol()).unwrap(), fwd);
            detecting += usize::from(fwd);
        }
        assert!(detecting > 50);
    }
}
