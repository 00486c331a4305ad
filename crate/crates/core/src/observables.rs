//! Elementary observables (projections), ±1 observables and quantum states.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{kernel_projector, CMatrix, Tolerance, C64};

/// Relative sign `+1` or `-1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "i8", into = "i8")]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn value(self) -> i8 {
        match self {
            Sign::Plus => 1,
            Sign::Minus => -1,
        }
    }

    pub fn as_f64(self) -> f64 {
        f64::from(self.value())
    }
}

impl std::ops::Mul for Sign {
    type Output = Sign;
    fn mul(self, rhs: Sign) -> Sign {
        if self == rhs {
            Sign::Plus
        } else {
            Sign::Minus
        }
    }
}

impl TryFrom<i8> for Sign {
    type Error = String;
    fn try_from(v: i8) -> std::result::Result<Self, String> {
        match v {
            1 => Ok(Sign::Plus),
            -1 => Ok(Sign::Minus),
            other => Err(format!("sign must be +1 or -1, got {other}")),
        }
    }
}

impl From<Sign> for i8 {
    fn from(s: Sign) -> i8 {
        s.value()
    }
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Sign::Plus => "+",
            Sign::Minus => "-",
        })
    }
}

/// Hermitian idempotent operator representing a two-outcome observable.
#[derive(Clone, Debug, PartialEq)]
pub struct Projection {
    name: String,
    mat: CMatrix,
}

impl Projection {
    /// Validates Hermiticity and idempotency within `atol·dim`; on failure both
    /// defects are reported.
    pub fn new(name: impl Into<String>, mat: CMatrix, tol: &Tolerance) -> Result<Self> {
        let name = name.into();
        let bound = tol.scaled(mat.dim());
        let hermiticity = mat.hermiticity_defect();
        let idempotency = mat.mul(&mat)?.dist(&mat)?;
        if hermiticity > bound || idempotency > bound {
            return Err(Error::InvalidProjection {
                name,
                hermiticity,
                idempotency,
                bound,
            });
        }
        Ok(Self { name, mat })
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            name: "1".into(),
            mat: CMatrix::identity(dim),
        }
    }

    pub fn zero(dim: usize) -> Self {
        Self {
            name: "0".into(),
            mat: CMatrix::zeros(dim),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.mat
    }

    pub fn dim(&self) -> usize {
        self.mat.dim()
    }

    pub fn renamed(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    /// Rank, read off the trace.
    pub fn rank(&self) -> usize {
        self.mat.trace().re.round().max(0.0) as usize
    }

    /// The ±1 observable `2P - 1`.
    pub fn pm(&self, name: impl Into<String>) -> PMObservable {
        PMObservable {
            name: name.into(),
            proj: self.clone(),
        }
    }
}

/// Hermitian, positive semidefinite, unit-trace operator.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityOperator {
    name: String,
    mat: CMatrix,
}

impl DensityOperator {
    pub fn new(name: impl Into<String>, mat: CMatrix, tol: &Tolerance) -> Result<Self> {
        let name = name.into();
        let bound = tol.scaled(mat.dim());
        let hermiticity = mat.hermiticity_defect();
        let trace = (mat.trace() - C64::new(1.0, 0.0)).norm();
        let min_eigenvalue = if hermiticity <= bound {
            mat.eigh(tol)?.values[0]
        } else {
            f64::NAN
        };
        if hermiticity > bound || trace > bound || min_eigenvalue.is_nan() || min_eigenvalue < -bound {
            return Err(Error::InvalidDensity {
                name,
                hermiticity,
                trace,
                min_eigenvalue,
                bound,
            });
        }
        Ok(Self { name, mat })
    }

    /// `|ψ><ψ|`; the vector is used as given, so it must already be normalized.
    pub fn pure(name: impl Into<String>, psi: &[C64], tol: &Tolerance) -> Result<Self> {
        Self::new(name, CMatrix::outer(psi)?, tol)
    }

    /// `λ ρ₁ + (1 - λ) ρ₂`.
    pub fn mixture(
        name: impl Into<String>,
        lambda: f64,
        first: &DensityOperator,
        second: &DensityOperator,
        tol: &Tolerance,
    ) -> Result<Self> {
        if !(0.0..=1.0).contains(&lambda) {
            return Err(Error::Precondition(format!("mixture weight {lambda} not in [0, 1]")));
        }
        let mat = first.mat.scale_real(lambda).add(&second.mat.scale_real(1.0 - lambda))?;
        Self::new(name, mat, tol)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.mat
    }

    pub fn dim(&self) -> usize {
        self.mat.dim()
    }

    pub fn renamed(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    /// `Tr(ρ A)` as a complex number.
    pub fn expectation(&self, a: &CMatrix) -> Result<C64> {
        self.mat.trace_product(a)
    }
}

/// Two-valued observable with outcomes `+1`/`-1`, represented by `2P - 1`.
#[derive(Clone, Debug, PartialEq)]
pub struct PMObservable {
    name: String,
    proj: Projection,
}

impl PMObservable {
    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn projection(&self) -> &Projection {
        &self.proj
    }

    pub fn operator(&self) -> CMatrix {
        let dim = self.proj.dim();
        self.proj
            .matrix()
            .scale_real(2.0)
            .sub(&CMatrix::identity(dim))
            .expect("same dimension")
    }
}

/// `1 - E`, named with a prime suffix.
pub fn complement(e: &Projection) -> Projection {
    let mat = CMatrix::identity(e.dim()).sub(e.matrix()).expect("same dimension");
    let name = match e.name.strip_suffix('\'') {
        Some(base) => base.to_string(),
        None => format!("{}'", e.name),
    };
    Projection { name, mat }
}

/// `ab - ba`.
pub fn commutator(a: &CMatrix, b: &CMatrix) -> Result<CMatrix> {
    a.mul(b)?.sub(&b.mul(a)?)
}

/// `dist(ab, ba)`.
pub fn commutation_defect(a: &CMatrix, b: &CMatrix) -> Result<f64> {
    a.mul(b)?.dist(&b.mul(a)?)
}

pub fn commutes(a: &CMatrix, b: &CMatrix, tol: &Tolerance) -> Result<bool> {
    Ok(commutation_defect(a, b)? <= tol.scaled(a.dim()))
}

/// Co-measurability guard: fails with [`Error::NotCommuting`] unless `a` and
/// `b` commute.
pub fn require_commuting(a: &Projection, b: &Projection, tol: &Tolerance) -> Result<()> {
    let defect = commutation_defect(a.matrix(), b.matrix())?;
    if defect > tol.scaled(a.dim()) {
        return Err(Error::NotCommuting {
            a: a.name().into(),
            b: b.name().into(),
            defect,
        });
    }
    Ok(())
}

/// Projector onto the kernel of `[E, F]`, the span of common eigenvectors.
///
/// Computed from the Hermitian matrix `i[E, F]`, which has the same kernel.
pub fn commutation_projection(e: &Projection, f: &Projection, tol: &Tolerance) -> Result<Projection> {
    let c = commutator(e.matrix(), f.matrix())?.scale(C64::new(0.0, 1.0));
    let k = kernel_projector(&c, tol)?;
    Projection::new(format!("C({},{})", e.name(), f.name()), k, tol)
}

/// `F + G` for mutually exclusive `F`, `G` (`FG = 0`).
pub fn orthogonal_sum(f: &Projection, g: &Projection, tol: &Tolerance) -> Result<Projection> {
    let defect = f.matrix().mul(g.matrix())?.max_abs();
    if defect > tol.scaled(f.dim()) {
        return Err(Error::NotOrthogonal {
            a: f.name().into(),
            b: g.name().into(),
            defect,
        });
    }
    Projection::new(format!("{}+{}", f.name(), g.name()), f.matrix().add(g.matrix())?, tol)
}

/// `(1 + sign · Π pm) / 2` for pairwise commuting ±1 observables.
pub fn derived_projection(sign: Sign, pms: &[&PMObservable], tol: &Tolerance) -> Result<Projection> {
    let first = pms
        .first()
        .ok_or_else(|| Error::Precondition("empty observable list".into()))?;
    let dim = first.projection().dim();
    for (i, a) in pms.iter().enumerate() {
        for b in &pms[i + 1..] {
            require_commuting(a.projection(), b.projection(), tol)?;
        }
    }
    let product = pms
        .iter()
        .try_fold(CMatrix::identity(dim), |acc, pm| acc.mul(&pm.operator()))?;
    let mat = CMatrix::identity(dim)
        .add(&product.scale_real(sign.as_f64()))?
        .scale_real(0.5);
    let label = pms.iter().map(|pm| pm.name()).collect::<Vec<_>>().join("·");
    Projection::new(format!("(1{sign}{label})/2"), mat, tol)
}
