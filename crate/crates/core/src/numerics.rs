//! Dense complex linear algebra and the tolerance policy.
//!
//! Every operator in the crate is carried by a [`CMatrix`], a square matrix
//! of `Complex64` entries. All numerical comparisons go through a single
//! [`Tolerance`]: an absolute tolerance scaled by the matrix dimension, plus a
//! separate eigenvalue cut used to decide kernel membership.
//!
//! Tensor products follow the row-major block convention: in `a.kron(&b)` the
//! left factor indexes the most significant block, so a computational basis
//! label `|q1 q2 ... qn>` maps to index `q1 q2 ... qn` read as a binary number.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;

/// Largest matrix dimension a Kronecker product may produce.
pub const DEFAULT_MAX_DIM: usize = 4096;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Tolerance {
    atol: f64,
    eig_cut: f64,
}

impl Tolerance {
    pub const DEFAULT_ATOL: f64 = 1e-10;
    pub const DEFAULT_EIG_CUT: f64 = 1e-8;

    pub fn new(atol: f64, eig_cut: f64) -> Result<Self> {
        if !(atol.is_finite() && atol > 0.0) {
            return Err(Error::InvalidTolerance(format!("atol must be positive, got {atol}")));
        }
        if !(eig_cut.is_finite() && eig_cut > 0.0) {
            return Err(Error::InvalidTolerance(format!(
                "eig_cut must be positive, got {eig_cut}"
            )));
        }
        Ok(Self { atol, eig_cut })
    }

    pub fn atol(&self) -> f64 {
        self.atol
    }

    pub fn eig_cut(&self) -> f64 {
        self.eig_cut
    }

    /// Absolute bound for entrywise comparisons at dimension `dim`.
    pub fn scaled(&self, dim: usize) -> f64 {
        self.atol * dim as f64
    }
}

impl Default for Tolerance {
    fn default() -> Self {
        Self {
            atol: Self::DEFAULT_ATOL,
            eig_cut: Self::DEFAULT_EIG_CUT,
        }
    }
}

/// Square complex matrix with finite entries.
#[derive(Clone, Debug, PartialEq)]
pub struct CMatrix(DMatrix<C64>);

impl CMatrix {
    pub fn zeros(dim: usize) -> Self {
        Self(DMatrix::zeros(dim, dim))
    }

    pub fn identity(dim: usize) -> Self {
        Self(DMatrix::identity(dim, dim))
    }

    pub fn from_fn(dim: usize, f: impl FnMut(usize, usize) -> C64) -> Result<Self> {
        let m = DMatrix::from_fn(dim, dim, f);
        Self::from_inner(m)
    }

    /// Builds a matrix from row vectors; every row must have `rows.len()` entries.
    pub fn from_rows(rows: &[Vec<C64>]) -> Result<Self> {
        let dim = rows.len();
        if dim == 0 {
            return Err(Error::Shape("empty matrix".into()));
        }
        if let Some((i, r)) = rows.iter().enumerate().find(|(_, r)| r.len() != dim) {
            return Err(Error::Shape(format!("row {i} has {} entries, expected {dim}", r.len())));
        }
        Self::from_fn(dim, |i, j| rows[i][j])
    }

    /// Real diagonal matrix.
    pub fn diag(values: &[f64]) -> Result<Self> {
        let dim = values.len();
        Self::from_fn(dim, |i, j| {
            if i == j {
                C64::new(values[i], 0.0)
            } else {
                C64::new(0.0, 0.0)
            }
        })
    }

    /// The rank-one operator `|v><v|`, without normalizing `v`.
    pub fn outer(v: &[C64]) -> Result<Self> {
        Self::from_fn(v.len(), |i, j| v[i] * v[j].conj())
    }

    pub fn from_inner(m: DMatrix<C64>) -> Result<Self> {
        if m.nrows() != m.ncols() {
            return Err(Error::Shape(format!("{}x{}", m.nrows(), m.ncols())));
        }
        if m.nrows() == 0 {
            return Err(Error::Shape("empty matrix".into()));
        }
        for j in 0..m.ncols() {
            for i in 0..m.nrows() {
                let z = m[(i, j)];
                if !(z.re.is_finite() && z.im.is_finite()) {
                    return Err(Error::NonFinite { row: i, col: j });
                }
            }
        }
        Ok(Self(m))
    }

    pub fn as_inner(&self) -> &DMatrix<C64> {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn get(&self, row: usize, col: usize) -> C64 {
        self.0[(row, col)]
    }

    pub fn rows(&self) -> Vec<Vec<C64>> {
        (0..self.dim())
            .map(|i| (0..self.dim()).map(|j| self.0[(i, j)]).collect())
            .collect()
    }

    fn check_dims(&self, other: &CMatrix) -> Result<()> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                left: self.dim(),
                right: other.dim(),
            });
        }
        Ok(())
    }

    pub fn mul(&self, other: &CMatrix) -> Result<CMatrix> {
        self.check_dims(other)?;
        Ok(Self(&self.0 * &other.0))
    }

    pub fn add(&self, other: &CMatrix) -> Result<CMatrix> {
        self.check_dims(other)?;
        Ok(Self(&self.0 + &other.0))
    }

    pub fn sub(&self, other: &CMatrix) -> Result<CMatrix> {
        self.check_dims(other)?;
        Ok(Self(&self.0 - &other.0))
    }

    pub fn scale(&self, factor: C64) -> CMatrix {
        Self(&self.0 * factor)
    }

    pub fn scale_real(&self, factor: f64) -> CMatrix {
        self.scale(C64::new(factor, 0.0))
    }

    pub fn adjoint(&self) -> CMatrix {
        Self(self.0.adjoint())
    }

    pub fn trace(&self) -> C64 {
        self.0.trace()
    }

    /// `Tr(self * other)` without forming the product.
    pub fn trace_product(&self, other: &CMatrix) -> Result<C64> {
        self.check_dims(other)?;
        let n = self.dim();
        let mut acc = C64::new(0.0, 0.0);
        for i in 0..n {
            for k in 0..n {
                acc += self.0[(i, k)] * other.0[(k, i)];
            }
        }
        Ok(acc)
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> f64 {
        self.0.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Max-abs entrywise distance.
    pub fn dist(&self, other: &CMatrix) -> Result<f64> {
        self.check_dims(other)?;
        Ok(self
            .0
            .iter()
            .zip(other.0.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max))
    }

    pub fn hermiticity_defect(&self) -> f64 {
        let n = self.dim();
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in i..n {
                worst = worst.max((self.0[(i, j)] - self.0[(j, i)].conj()).norm());
            }
        }
        worst
    }

    pub fn apply(&self, v: &[C64]) -> Result<Vec<C64>> {
        if v.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                left: self.dim(),
                right: v.len(),
            });
        }
        Ok((0..self.dim())
            .map(|i| (0..self.dim()).map(|j| self.0[(i, j)] * v[j]).sum())
            .collect())
    }

    pub fn kron(&self, other: &CMatrix) -> Result<CMatrix> {
        self.kron_bounded(other, DEFAULT_MAX_DIM)
    }

    pub fn kron_bounded(&self, other: &CMatrix, max_dim: usize) -> Result<CMatrix> {
        let dim = self.dim().checked_mul(other.dim()).ok_or(Error::DimensionLimit {
            dim: usize::MAX,
            max: max_dim,
        })?;
        if dim > max_dim {
            return Err(Error::DimensionLimit { dim, max: max_dim });
        }
        Ok(Self(self.0.kronecker(&other.0)))
    }

    pub fn eigh(&self, tol: &Tolerance) -> Result<Eigh> {
        eigh(self, tol)
    }
}

/// Kronecker product of a list of factors, leftmost most significant.
pub fn kron_all(factors: &[&CMatrix]) -> Result<CMatrix> {
    let (first, rest) = factors
        .split_first()
        .ok_or_else(|| Error::Shape("empty Kronecker product".into()))?;
    rest.iter().try_fold((*first).clone(), |acc, f| acc.kron(f))
}

/// Eigendecomposition of a Hermitian matrix: ascending eigenvalues and
/// orthonormal eigenvector columns.
#[derive(Clone, Debug)]
pub struct Eigh {
    pub values: Vec<f64>,
    pub vectors: CMatrix,
}

impl Eigh {
    pub fn column(&self, k: usize) -> Vec<C64> {
        let n = self.vectors.dim();
        (0..n).map(|i| self.vectors.get(i, k)).collect()
    }

    /// Orthogonal projector onto the span of the selected eigenvector columns.
    pub fn projector_onto(&self, mut select: impl FnMut(f64) -> bool) -> CMatrix {
        let n = self.vectors.dim();
        let v = self.vectors.as_inner();
        let mut p = DMatrix::<C64>::zeros(n, n);
        for (k, &lambda) in self.values.iter().enumerate() {
            if select(lambda) {
                let col = v.column(k);
                p += col * col.adjoint();
            }
        }
        CMatrix(p)
    }

    pub fn reconstruct(&self) -> CMatrix {
        let v = self.vectors.as_inner();
        let d = DMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
            self.values.len(),
            self.values.iter().map(|&x| C64::new(x, 0.0)),
        ));
        CMatrix(v * d * v.adjoint())
    }
}

pub fn eigh(a: &CMatrix, tol: &Tolerance) -> Result<Eigh> {
    let bound = tol.scaled(a.dim());
    let defect = a.hermiticity_defect();
    if defect > bound {
        return Err(Error::NotHermitian { defect, bound });
    }
    let sym = (&a.0 + a.0.adjoint()) * C64::new(0.5, 0.0);
    let n = sym.nrows();
    let dec = SymmetricEigen::try_new(sym, f64::EPSILON, 0)
        .ok_or_else(|| Error::Eigen("iteration did not converge".into()))?;
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| dec.eigenvalues[i].total_cmp(&dec.eigenvalues[j]));
    let values = order.iter().map(|&k| dec.eigenvalues[k]).collect();
    let vectors = DMatrix::from_fn(n, n, |i, k| dec.eigenvectors[(i, order[k])]);
    Ok(Eigh {
        values,
        vectors: CMatrix(vectors),
    })
}

/// Orthogonal projector onto the eigenvectors of `a` whose eigenvalue has
/// modulus at most `eig_cut`.
pub fn kernel_projector(a: &CMatrix, tol: &Tolerance) -> Result<CMatrix> {
    let dec = eigh(a, tol)?;
    Ok(dec.projector_onto(|lambda| lambda.abs() <= tol.eig_cut()))
}

/// Spectral projectors of a Hermitian matrix, one per eigenvalue cluster.
/// Eigenvalues closer than `eig_cut` to their predecessor join its cluster;
/// each cluster is reported with its mean eigenvalue.
pub fn spectral_projectors(a: &CMatrix, tol: &Tolerance) -> Result<Vec<(f64, CMatrix)>> {
    let dec = eigh(a, tol)?;
    let mut clusters: Vec<Vec<usize>> = Vec::new();
    for (k, &lambda) in dec.values.iter().enumerate() {
        match clusters.last_mut() {
            Some(c) if lambda - dec.values[*c.last().unwrap()] <= tol.eig_cut() => c.push(k),
            _ => clusters.push(vec![k]),
        }
    }
    Ok(clusters
        .into_iter()
        .map(|members| {
            let mean = members.iter().map(|&k| dec.values[k]).sum::<f64>() / members.len() as f64;
            let mut idx = 0usize;
            let proj = dec.projector_onto(|_| {
                let hit = members.contains(&idx);
                idx += 1;
                hit
            });
            (mean, proj)
        })
        .collect())
}
