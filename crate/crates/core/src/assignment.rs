//! Conditional probabilities and the consistent value-assignment functionals
//! `p(E & F) = Tr(ρ E F E)` and `p(E' & F) = Tr(ρ E' F E')`, the consistency
//! conditions they are measured against, and an exhaustive joint-outcome
//! distribution for commuting families used as an independent oracle.

use serde::Serialize;

use crate::detection::detects;
use crate::error::{Error, Result};
use crate::numerics::{CMatrix, Tolerance};
use crate::observables::{
    commutation_defect, complement, orthogonal_sum, require_commuting, DensityOperator, Projection,
};

/// Largest commuting family accepted by [`joint_distribution`].
pub const MAX_JOINT_OBSERVABLES: usize = 12;

fn expectation(rho: &DensityOperator, a: &CMatrix) -> Result<f64> {
    Ok(rho.expectation(a)?.re)
}

/// `Tr(ρ A B A)`.
fn sandwich(rho: &DensityOperator, outer: &CMatrix, inner: &CMatrix) -> Result<f64> {
    expectation(rho, &outer.mul(inner)?.mul(outer)?)
}

fn checked_probability(what: &str, value: f64, bound: f64) -> Result<f64> {
    if !(value >= -bound && value <= 1.0 + bound) {
        return Err(Error::ProbabilityRange {
            what: what.to_string(),
            value,
        });
    }
    Ok(value.clamp(0.0, 1.0))
}

/// `P(F | G) = Tr(ρ F G) / Tr(ρ G)` for commuting `F`, `G`.
pub fn cond_prob(f: &Projection, g: &Projection, rho: &DensityOperator, tol: &Tolerance) -> Result<f64> {
    require_commuting(f, g, tol)?;
    let bound = tol.scaled(f.dim());
    let given = expectation(rho, g.matrix())?;
    if given <= bound {
        return Err(Error::UndefinedConditional {
            given: g.name().into(),
            probability: given,
        });
    }
    let joint = expectation(rho, &f.matrix().mul(g.matrix())?)?;
    checked_probability(&format!("P({}|{})", f.name(), g.name()), joint / given, bound)
}

fn cond_prob_opt(f: &Projection, g: &Projection, rho: &DensityOperator, tol: &Tolerance) -> Result<Option<f64>> {
    match cond_prob(f, g, rho, tol) {
        Ok(p) => Ok(Some(p)),
        Err(Error::UndefinedConditional { .. }) => Ok(None),
        Err(e) => Err(e),
    }
}

/// Comparison of `P(F|T)` with `P(F|E)` and of `P(F|T')` with `P(F|E')`.
/// A side is `None` when one of its conditionals is undefined.
#[derive(Clone, Debug, Serialize)]
pub struct SimulationEquality {
    pub observable: String,
    pub outcome_one_residual: Option<f64>,
    pub outcome_zero_residual: Option<f64>,
    pub holds: bool,
}

/// For a detecting pair, the conditional statistics of every `F` commuting with
/// both `T` and `E` are the same whether conditioned on `T` or on `E`.
pub fn simulation_equalities(
    t: &Projection,
    e: &Projection,
    rho: &DensityOperator,
    fs: &[&Projection],
    tol: &Tolerance,
) -> Result<Vec<SimulationEquality>> {
    if !detects(t, e, rho, tol)?.holds {
        return Err(Error::Precondition(format!(
            "{} does not detect {}",
            t.name(),
            e.name()
        )));
    }
    let bound = tol.scaled(t.dim());
    let (tc, ec) = (complement(t), complement(e));
    fs.iter()
        .map(|f| {
            require_commuting(f, t, tol)?;
            require_commuting(f, e, tol)?;
            let side = |a: &Projection, b: &Projection| -> Result<Option<f64>> {
                Ok(match (cond_prob_opt(f, a, rho, tol)?, cond_prob_opt(f, b, rho, tol)?) {
                    (Some(x), Some(y)) => Some((x - y).abs()),
                    _ => None,
                })
            };
            let one = side(t, e)?;
            let zero = side(&tc, &ec)?;
            Ok(SimulationEquality {
                observable: f.name().into(),
                outcome_one_residual: one,
                outcome_zero_residual: zero,
                holds: one.is_none_or(|r| r <= bound) && zero.is_none_or(|r| r <= bound),
            })
        })
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct AssignmentProbabilities {
    /// `Tr(ρ E F E)`.
    pub p_e_and_f: f64,
    /// `Tr(ρ E' F E')`.
    pub p_eprime_and_f: f64,
    pub tr_rho_f: f64,
    /// `|Tr(ρF) - p(E&F) - p(E'&F)|`, computed before clamping.
    pub c3_residual: f64,
}

/// The unique value-assignment probabilities for `E` jointly with a measured
/// `F`. `F` need not commute with `E`.
pub fn assignment_probs(
    e: &Projection,
    f: &Projection,
    rho: &DensityOperator,
    tol: &Tolerance,
) -> Result<AssignmentProbabilities> {
    if e.dim() != f.dim() || e.dim() != rho.dim() {
        return Err(Error::DimensionMismatch {
            left: e.dim(),
            right: f.dim().max(rho.dim()),
        });
    }
    let bound = tol.scaled(e.dim());
    let ec = complement(e);
    let raw_e = sandwich(rho, e.matrix(), f.matrix())?;
    let raw_ec = sandwich(rho, ec.matrix(), f.matrix())?;
    let raw_f = expectation(rho, f.matrix())?;
    let c3_residual = (raw_f - raw_e - raw_ec).abs();
    Ok(AssignmentProbabilities {
        p_e_and_f: checked_probability(&format!("p({}&{})", e.name(), f.name()), raw_e, bound)?,
        p_eprime_and_f: checked_probability(&format!("p({}&{})", ec.name(), f.name()), raw_ec, bound)?,
        tr_rho_f: checked_probability(&format!("Tr(rho {})", f.name()), raw_f, bound)?,
        c3_residual,
    })
}

/// Pass/fail of one consistency condition with its residual.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ConditionCheck {
    pub pass: bool,
    pub residual: f64,
    pub bound: f64,
}

impl ConditionCheck {
    fn new(residual: f64, bound: f64) -> Self {
        Self {
            pass: residual <= bound,
            residual,
            bound,
        }
    }
}

/// When `E` and `F` commute, the assignment probabilities must reduce to the
/// ordinary joint probabilities `Tr(ρEF)` and `Tr(ρE'F)`.
pub fn check_c1(e: &Projection, f: &Projection, rho: &DensityOperator, tol: &Tolerance) -> Result<ConditionCheck> {
    require_commuting(e, f, tol)?;
    let ap = assignment_probs(e, f, rho, tol)?;
    let ec = complement(e);
    let joint = expectation(rho, &e.matrix().mul(f.matrix())?)?;
    let joint_c = expectation(rho, &ec.matrix().mul(f.matrix())?)?;
    let residual = (ap.p_e_and_f - joint).abs().max((ap.p_eprime_and_f - joint_c).abs());
    Ok(ConditionCheck::new(residual, tol.scaled(e.dim())))
}

/// Additivity over a family of mutually exclusive `F_j` whose sum is a
/// projection, for both `p(E & ·)` and `p(E' & ·)`.
pub fn check_c2(
    e: &Projection,
    family: &[&Projection],
    rho: &DensityOperator,
    tol: &Tolerance,
) -> Result<ConditionCheck> {
    let dim = e.dim();
    let total = family
        .iter()
        .try_fold(Projection::zero(dim), |acc, f| orthogonal_sum(&acc, f, tol))?;
    let whole = assignment_probs(e, &total, rho, tol)?;
    let (mut sum_e, mut sum_ec) = (0.0, 0.0);
    for f in family {
        let ap = assignment_probs(e, f, rho, tol)?;
        sum_e += ap.p_e_and_f;
        sum_ec += ap.p_eprime_and_f;
    }
    let residual = (whole.p_e_and_f - sum_e)
        .abs()
        .max((whole.p_eprime_and_f - sum_ec).abs());
    Ok(ConditionCheck::new(
        residual,
        tol.scaled(dim) * family.len().max(1) as f64,
    ))
}

/// `Tr(ρF) = p(E&F) + p(E'&F)`.
pub fn check_c3(e: &Projection, f: &Projection, rho: &DensityOperator, tol: &Tolerance) -> Result<ConditionCheck> {
    let ap = assignment_probs(e, f, rho, tol)?;
    Ok(ConditionCheck::new(ap.c3_residual, tol.scaled(e.dim())))
}

/// For `T` detecting `E` and `F` commuting with `T`: `Tr(ρEFE) = Tr(ρFT)`.
pub fn detection_form_equality(
    t: &Projection,
    e: &Projection,
    f: &Projection,
    rho: &DensityOperator,
    tol: &Tolerance,
) -> Result<ConditionCheck> {
    if !detects(t, e, rho, tol)?.holds {
        return Err(Error::Precondition(format!(
            "{} does not detect {}",
            t.name(),
            e.name()
        )));
    }
    require_commuting(t, f, tol)?;
    let lhs = sandwich(rho, e.matrix(), f.matrix())?;
    let rhs = expectation(rho, &f.matrix().mul(t.matrix())?)?;
    Ok(ConditionCheck::new((lhs - rhs).abs(), tol.scaled(t.dim())))
}

/// Residuals of the conditional functional `P(F|E) = Tr(ρEFE)/Tr(ρE)` against
/// normalization, additivity and the ratio rule for `F ≤ E`.
#[derive(Clone, Debug, Serialize)]
pub struct CzCheck {
    pub normalization_residual: f64,
    /// Worst additivity residual over mutually exclusive pairs in the sample.
    pub additivity_residual: f64,
    pub additive_pairs: usize,
    /// Worst `|P(F|E) - Tr(ρF)/Tr(ρE)|` over sampled `F ≤ E`.
    pub ratio_residual: f64,
    pub ratio_members: usize,
    pub bound: f64,
    pub pass: bool,
}

pub fn cz_property_check(
    t: &Projection,
    e: &Projection,
    rho: &DensityOperator,
    sample_f: &[&Projection],
    tol: &Tolerance,
) -> Result<CzCheck> {
    let dim = e.dim();
    let bound = tol.scaled(dim);
    let tr_e = expectation(rho, e.matrix())?;
    if tr_e <= bound {
        return Err(Error::UndefinedConditional {
            given: e.name().into(),
            probability: tr_e,
        });
    }
    for f in sample_f {
        require_commuting(f, t, tol)?;
    }
    let conditional = |f: &CMatrix| -> Result<f64> { Ok(sandwich(rho, e.matrix(), f)? / tr_e) };
    let normalization_residual = (conditional(&CMatrix::identity(dim))? - 1.0).abs();

    let mut additivity_residual = 0.0f64;
    let mut additive_pairs = 0;
    for (i, a) in sample_f.iter().enumerate() {
        for b in &sample_f[i + 1..] {
            if let Ok(sum) = orthogonal_sum(a, b, tol) {
                let r = conditional(sum.matrix())? - conditional(a.matrix())? - conditional(b.matrix())?;
                additivity_residual = additivity_residual.max(r.abs());
                additive_pairs += 1;
            }
        }
    }

    let mut ratio_residual = 0.0f64;
    let mut ratio_members = 0;
    for f in sample_f {
        if e.matrix().mul(f.matrix())?.dist(f.matrix())? <= bound {
            let r = conditional(f.matrix())? - expectation(rho, f.matrix())? / tr_e;
            ratio_residual = ratio_residual.max(r.abs());
            ratio_members += 1;
        }
    }
    // Conditionals divide by Tr(ρE), so their error scales with 1/Tr(ρE).
    let cond_bound = bound / tr_e;
    Ok(CzCheck {
        normalization_residual,
        additivity_residual,
        additive_pairs,
        ratio_residual,
        ratio_members,
        bound: cond_bound,
        pass: normalization_residual <= cond_bound && additivity_residual <= cond_bound && ratio_residual <= cond_bound,
    })
}

/// Probabilities of every joint outcome `ω ∈ {0,1}ⁿ` of a commuting family.
///
/// Atoms are indexed with the first observable as the most significant bit.
/// Atoms within `eig_cut` of zero are set to exactly zero and the rest
/// renormalized, so outcomes of probability zero are never sampled.
#[derive(Clone, Debug, Serialize)]
pub struct JointDistribution {
    names: Vec<String>,
    atoms: Vec<f64>,
    renormalization: f64,
}

impl JointDistribution {
    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn atoms(&self) -> &[f64] {
        &self.atoms
    }

    /// Factor the clamped atoms were divided by.
    pub fn renormalization(&self) -> f64 {
        self.renormalization
    }

    pub fn index_of(&self, outcome: &[bool]) -> usize {
        outcome.iter().fold(0, |acc, &bit| (acc << 1) | usize::from(bit))
    }

    pub fn outcome_of(&self, index: usize) -> Vec<bool> {
        let n = self.len();
        (0..n).map(|i| (index >> (n - 1 - i)) & 1 == 1).collect()
    }

    pub fn atom(&self, outcome: &[bool]) -> f64 {
        self.atoms[self.index_of(outcome)]
    }

    pub fn position(&self, name: &str) -> Result<usize> {
        self.names
            .iter()
            .position(|n| n == name)
            .ok_or_else(|| Error::UnknownObservable(name.into()))
    }

    /// Total mass of atoms whose outcomes match every `(position, value)` pair.
    pub fn mass(&self, fixed: &[(usize, bool)]) -> f64 {
        self.atoms
            .iter()
            .enumerate()
            .filter(|(idx, _)| {
                let outcome = self.outcome_of(*idx);
                fixed.iter().all(|&(pos, v)| outcome[pos] == v)
            })
            .map(|(_, p)| p)
            .sum()
    }
}

/// Exhaustive joint distribution `Tr(ρ Πᵢ Eᵢ^{ωᵢ})` with `E¹ = E`, `E⁰ = 1 - E`.
pub fn joint_distribution(
    observables: &[&Projection],
    rho: &DensityOperator,
    tol: &Tolerance,
) -> Result<JointDistribution> {
    let n = observables.len();
    if n == 0 {
        return Err(Error::Precondition("empty observable family".into()));
    }
    if n > MAX_JOINT_OBSERVABLES {
        return Err(Error::TooManyObservables {
            count: n,
            max: MAX_JOINT_OBSERVABLES,
        });
    }
    let dim = rho.dim();
    for (i, a) in observables.iter().enumerate() {
        if a.dim() != dim {
            return Err(Error::DimensionMismatch {
                left: dim,
                right: a.dim(),
            });
        }
        for b in &observables[i + 1..] {
            require_commuting(a, b, tol)?;
        }
    }
    // Products ordered so that appending outcome bits keeps the first
    // observable most significant.
    let mut products = vec![CMatrix::identity(dim)];
    for obs in observables {
        let comp = complement(obs);
        let mut next = Vec::with_capacity(products.len() * 2);
        for p in &products {
            next.push(p.mul(comp.matrix())?);
            next.push(p.mul(obs.matrix())?);
        }
        products = next;
    }
    let bound = tol.scaled(dim);
    let mut atoms = Vec::with_capacity(products.len());
    for (idx, p) in products.iter().enumerate() {
        let v = expectation(rho, p)?;
        if v < -bound {
            return Err(Error::ProbabilityRange {
                what: format!("joint atom {idx:0n$b}"),
                value: v,
            });
        }
        atoms.push(if v.abs() <= tol.eig_cut() { 0.0 } else { v.max(0.0) });
    }
    let total: f64 = atoms.iter().sum();
    if (total - 1.0).abs() > bound * atoms.len() as f64 {
        return Err(Error::Precondition(format!("joint distribution sums to {total}")));
    }
    atoms.iter_mut().for_each(|p| *p /= total);
    log::debug!("joint distribution over {n} observables renormalized by {total:.17}");
    Ok(JointDistribution {
        names: observables.iter().map(|o| o.name().to_string()).collect(),
        atoms,
        renormalization: total,
    })
}

/// `dist(EF, FE) ≤ atol·dim` for every pair, as a helper for callers that
/// filter candidate observables rather than failing.
pub fn commutes_with_all(f: &Projection, others: &[&Projection], tol: &Tolerance) -> Result<bool> {
    for o in others {
        if commutation_defect(f.matrix(), o.matrix())? > tol.scaled(f.dim()) {
            return Ok(false);
        }
    }
    Ok(true)
}
