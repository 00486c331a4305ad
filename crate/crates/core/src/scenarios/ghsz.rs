//! Four-qubit no-go construction.
//!
//! Seven elementary observables act on single qubits of `C²⊗C²⊗C²⊗C²`:
//! `Eα, Eβ` on qubit 1, `F` on qubit 2, `Gα, Gβ` on qubit 3, `Lα, Lβ` on
//! qubit 4, where the `α` projector is `½[[1,1],[1,1]]` and the `β` projector
//! is `½[[1,-i],[i,1]]`. The state is `ψ₀ = (|0011> - |1100>)/√2`.
//!
//! With `A = 2E - 1` etc., the derived projections
//! `M = (1 - Aα B Dα)/2`, `N = (1 - B Cβ Dα)/2`, `R = (1 - Aβ B Cα)/2` and
//! `S = (1 + Aα B Cβ)/2` detect `Gα`, `Eβ`, `Lβ` and `Lβ` in `ψ₀`. If
//! detection outcomes could be identified with measured outcomes, the seven
//! ±1 values would have to satisfy [`ConstraintSet::no_go`], which has no
//! solution.

use serde::Serialize;

use super::{enumerate_constraints, Claim, ConstraintSet, Scenario};
use crate::detection::{detects, DetectionCheck};
use crate::error::Result;
use crate::numerics::{kron_all, CMatrix, Tolerance, C64};
use crate::observables::{commutation_defect, derived_projection, DensityOperator, Projection, Sign};

fn alpha_block() -> CMatrix {
    let h = C64::new(0.5, 0.0);
    CMatrix::from_rows(&[vec![h, h], vec![h, h]]).expect("2x2")
}

fn beta_block() -> CMatrix {
    let h = C64::new(0.5, 0.0);
    CMatrix::from_rows(&[vec![h, C64::new(0.0, -0.5)], vec![C64::new(0.0, 0.5), h]]).expect("2x2")
}

/// `block` on qubit `factor` (0-based), identity elsewhere.
fn on_qubit(block: &CMatrix, factor: usize) -> Result<CMatrix> {
    let id = CMatrix::identity(2);
    let parts: Vec<&CMatrix> = (0..4).map(|k| if k == factor { block } else { &id }).collect();
    kron_all(&parts)
}

/// `(|0011> - |1100>)/√2` with qubit 1 the most significant bit.
fn psi0() -> Vec<C64> {
    let amp = std::f64::consts::FRAC_1_SQRT_2;
    let mut psi = vec![C64::new(0.0, 0.0); 16];
    psi[0b0011] = C64::new(amp, 0.0);
    psi[0b1100] = C64::new(-amp, 0.0);
    psi
}

pub fn build_ghsz() -> Result<Scenario> {
    let tol = Tolerance::default();
    let (a, b) = (alpha_block(), beta_block());
    let p = |name: &str, block: &CMatrix, q: usize| -> Result<Projection> {
        Projection::new(name, on_qubit(block, q)?, &tol)
    };
    let ea = p("Ea", &a, 0)?;
    let eb = p("Eb", &b, 0)?;
    let f = p("F", &a, 1)?;
    let ga = p("Ga", &a, 2)?;
    let gb = p("Gb", &b, 2)?;
    let la = p("La", &a, 3)?;
    let lb = p("Lb", &b, 3)?;

    let (a_a, a_b, bb) = (ea.pm("Aα"), eb.pm("Aβ"), f.pm("B"));
    let (c_a, c_b) = (ga.pm("Cα"), gb.pm("Cβ"));
    let d_a = la.pm("Dα");
    let m = derived_projection(Sign::Minus, &[&a_a, &bb, &d_a], &tol)?.renamed("M");
    let n = derived_projection(Sign::Minus, &[&bb, &c_b, &d_a], &tol)?.renamed("N");
    let r = derived_projection(Sign::Minus, &[&a_b, &bb, &c_a], &tol)?.renamed("R");
    let s = derived_projection(Sign::Plus, &[&a_a, &bb, &c_b], &tol)?.renamed("S");

    let psi = psi0();
    let rho0 = DensityOperator::pure("rho0", &psi, &tol)?;
    let mut scn = Scenario::new("ghsz", rho0).with_state_vector(psi);
    for obs in [ea, eb, f, ga, gb, la, lb, m, n, r, s] {
        scn.add(obs)?;
    }

    let joint = ["Ea", "F", "Gb", "La"];
    for (i, x) in joint.iter().enumerate() {
        for y in &joint[i + 1..] {
            scn.claims.push(Claim::Commute {
                a: x.to_string(),
                b: y.to_string(),
            });
        }
    }
    let detections = [("M", "Ga"), ("N", "Eb"), ("R", "Lb"), ("S", "Lb")];
    for (t, e) in detections {
        scn.claims.push(Claim::Commute {
            a: t.into(),
            b: e.into(),
        });
    }
    for (t, e) in detections {
        scn.claims.push(Claim::Detect {
            t: t.into(),
            e: e.into(),
        });
    }
    scn.claims.push(Claim::Constraints {
        equations: ConstraintSet::no_go().equations,
    });
    Ok(scn)
}

#[derive(Clone, Debug, Serialize)]
pub struct ClaimOutcome {
    pub label: String,
    pub kind: &'static str,
    pub pass: bool,
    pub residual: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detection: Option<DetectionCheck>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub satisfying: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub total: Option<usize>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ClaimsReport {
    pub scenario: String,
    pub outcomes: Vec<ClaimOutcome>,
    /// Largest commutation or detection residual.
    pub max_residual: f64,
    /// Every commutation and detection claim holds.
    pub operator_claims_hold: bool,
    /// Every constraint set in the claims has no ±1 solution.
    pub constraints_unsatisfiable: bool,
    /// Operator claims hold and the outcome constraints they force are
    /// contradictory, so detection outcomes cannot be identified with
    /// measurement outcomes.
    pub identification_inconsistent: bool,
}

/// Evaluates every declared claim of a scenario at its state.
pub fn verify_ghsz(scn: &Scenario, tol: &Tolerance) -> Result<ClaimsReport> {
    let bound = tol.scaled(scn.dim());
    let mut outcomes = Vec::with_capacity(scn.claims.len());
    for claim in &scn.claims {
        outcomes.push(match claim {
            Claim::Commute { a, b } => {
                let defect = commutation_defect(scn.observable(a)?.matrix(), scn.observable(b)?.matrix())?;
                ClaimOutcome {
                    label: format!("[{a},{b}] = 0"),
                    kind: "commute",
                    pass: defect <= bound,
                    residual: defect,
                    detection: None,
                    satisfying: None,
                    total: None,
                }
            }
            Claim::Detect { t, e } => {
                let check = detects(scn.observable(t)?, scn.observable(e)?, scn.state(), tol)?;
                ClaimOutcome {
                    label: format!("{t} detects {e}"),
                    kind: "detect",
                    pass: check.holds,
                    residual: check.residual(),
                    detection: Some(check),
                    satisfying: None,
                    total: None,
                }
            }
            Claim::Constraints { equations } => {
                let e = enumerate_constraints(&ConstraintSet {
                    equations: equations.clone(),
                });
                ClaimOutcome {
                    label: format!(
                        "no ±1 solution of {{{}}}",
                        equations.iter().map(|q| q.to_string()).collect::<Vec<_>>().join(", ")
                    ),
                    kind: "constraints",
                    pass: e.satisfying.is_empty(),
                    residual: e.satisfying.len() as f64,
                    detection: None,
                    satisfying: Some(e.satisfying.len()),
                    total: Some(e.total),
                }
            }
        });
    }
    let operator: Vec<&ClaimOutcome> = outcomes.iter().filter(|o| o.kind != "constraints").collect();
    let max_residual = operator.iter().map(|o| o.residual).fold(0.0, f64::max);
    let operator_claims_hold = operator.iter().all(|o| o.pass);
    let constraint_claims: Vec<&ClaimOutcome> = outcomes.iter().filter(|o| o.kind == "constraints").collect();
    let constraints_unsatisfiable = !constraint_claims.is_empty() && constraint_claims.iter().all(|o| o.pass);
    Ok(ClaimsReport {
        scenario: scn.name.clone(),
        max_residual,
        operator_claims_hold,
        constraints_unsatisfiable,
        identification_inconsistent: operator_claims_hold && constraints_unsatisfiable,
        outcomes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::assignment::{cond_prob, joint_distribution};
    use crate::detection::detects_via_probability;
    use crate::observables::commutes;

    fn tol() -> Tolerance {
        Tolerance::default()
    }

    #[test]
    fn state_and_single_qubit_projectors() {
        let s = build_ghsz().unwrap();
        assert_eq!(s.dim(), 16);
        assert!((s.state().matrix().trace().re - 1.0).abs() < 1e-15);
        let ea = s.observable("Ea").unwrap();
        assert!((s.state().expectation(ea.matrix()).unwrap().re - 0.5).abs() < 1e-15);
        for name in ["Ea", "Eb", "F", "Ga", "Gb", "La", "Lb"] {
            assert_eq!(s.observable(name).unwrap().rank(), 8, "{name}");
        }
    }

    #[test]
    fn build_is_bit_stable() {
        assert_eq!(build_ghsz().unwrap(), build_ghsz().unwrap());
    }

    #[test]
    fn all_claims_hold_and_identification_fails() {
        let s = build_ghsz().unwrap();
        let r = verify_ghsz(&s, &tol()).unwrap();
        assert_eq!(r.outcomes.len(), 15);
        assert!(r.outcomes.iter().all(|o| o.pass), "{r:#?}");
        assert!(r.max_residual <= 1e-12);
        assert!(r.identification_inconsistent);
    }

    #[test]
    fn derived_projections_commute_with_their_targets() {
        let s = build_ghsz().unwrap();
        let g = |n: &str| s.observable(n).unwrap().matrix().clone();
        assert!(commutes(&g("M"), &g("Ga"), &tol()).unwrap());
        assert!(commutes(&g("Ea"), &g("F"), &tol()).unwrap());
        assert!(!commutes(&g("Ea"), &g("Eb"), &tol()).unwrap());
    }

    #[test]
    fn detection_characterizations_on_the_scenario() {
        let s = build_ghsz().unwrap();
        let o = |n: &str| s.observable(n).unwrap();
        let rho = s.state();
        assert!(detects(o("M"), o("Ga"), rho, &tol()).unwrap().holds);
        assert!(detects_via_probability(o("N"), o("Eb"), rho, &tol()).unwrap());
        let ab = detects(o("Ea"), o("Eb"), rho, &tol()).unwrap();
        assert!(!ab.holds && !ab.commutes);
        // Tr(ρ₀ F (1 - Gα)) = 1/4.
        let fg = detects(o("F"), o("Ga"), rho, &tol()).unwrap();
        assert!((fg.discord_10 - 0.25).abs() < 1e-15);
        assert!(!detects_via_probability(o("F"), o("Ga"), rho, &tol()).unwrap());
    }

    #[test]
    fn conditional_and_joint_values_from_state_expansion() {
        let s = build_ghsz().unwrap();
        let o = |n: &str| s.observable(n).unwrap();
        let rho = s.state();
        assert!((cond_prob(o("Ea"), o("F"), rho, &tol()).unwrap() - 0.5).abs() < 1e-15);
        let d = joint_distribution(&[o("Ea"), o("F")], rho, &tol()).unwrap();
        for p in d.atoms() {
            assert!((p - 0.25).abs() < 1e-15);
        }
        let d = joint_distribution(&[o("M"), o("Ga")], rho, &tol()).unwrap();
        assert_eq!(d.atom(&[true, false]), 0.0);
        assert_eq!(d.atom(&[false, true]), 0.0);
    }

    #[test]
    fn product_state_breaks_detection_claims() {
        let mut s = build_ghsz().unwrap();
        let mut zero = vec![C64::new(0.0, 0.0); 16];
        zero[0] = C64::new(1.0, 0.0);
        s.set_state(DensityOperator::pure("0000", &zero, &tol()).unwrap())
            .unwrap();
        let r = verify_ghsz(&s, &tol()).unwrap();
        let detect: Vec<_> = r.outcomes.iter().filter(|o| o.kind == "detect").collect();
        assert!(detect.iter().all(|o| !o.pass));
        assert!(r.outcomes.iter().filter(|o| o.kind == "commute").all(|o| o.pass));
        assert!(!r.identification_inconsistent);
    }

    #[test]
    fn swapped_target_breaks_only_that_detection() {
        let mut s = build_ghsz().unwrap();
        for c in s.claims.iter_mut() {
            match c {
                Claim::Commute { a, b } if a == "M" && b == "Ga" => *b = "Gb".into(),
                Claim::Detect { t, e } if t == "M" && e == "Ga" => *e = "Gb".into(),
                _ => {}
            }
        }
        let r = verify_ghsz(&s, &tol()).unwrap();
        let by_label = |l: &str| r.outcomes.iter().find(|o| o.label == l).unwrap();
        assert!(by_label("[M,Gb] = 0").pass);
        assert!(!by_label("M detects Gb").pass);
        assert!(by_label("N detects Eb").pass);
    }
}
