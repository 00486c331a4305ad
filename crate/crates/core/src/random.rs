//! Random operator generators for randomized audits and property sweeps.
//!
//! Everything here is driven by a caller-supplied RNG so audits are
//! reproducible from a seed.

use nalgebra::DMatrix;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::numerics::{CMatrix, C64};

fn gaussian_matrix<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> DMatrix<C64> {
    DMatrix::from_fn(dim, dim, |_, _| {
        C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
    })
}

/// Unitary from the QR factor of a complex Gaussian matrix.
pub fn unitary<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> CMatrix {
    let q = gaussian_matrix(rng, dim).qr().q();
    CMatrix::from_inner(q).expect("QR of a finite matrix is finite")
}

/// Hermitian matrix with entries of order one.
pub fn hermitian<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> CMatrix {
    let g = gaussian_matrix(rng, dim);
    let h = (&g + g.adjoint()) * C64::new(0.5, 0.0);
    CMatrix::from_inner(h).expect("finite")
}

/// `U diag(values) U†`.
pub fn with_spectrum(u: &CMatrix, values: &[f64]) -> CMatrix {
    let d = CMatrix::diag(values).expect("finite spectrum");
    u.mul(&d).and_then(|m| m.mul(&u.adjoint())).expect("conformable")
}

/// Projector onto the span of the given (not necessarily orthonormal) vectors.
pub fn span_projector(vectors: &[Vec<C64>], dim: usize) -> CMatrix {
    if vectors.is_empty() {
        return CMatrix::zeros(dim);
    }
    let m = DMatrix::from_fn(dim, vectors.len(), |i, k| vectors[k][i]);
    let q = m.qr().q();
    let p = &q * q.adjoint();
    CMatrix::from_inner(p).expect("finite")
}

/// Projection of the given rank in a Haar-like random basis.
pub fn projection<R: Rng + ?Sized>(rng: &mut R, dim: usize, rank: usize) -> CMatrix {
    let u = unitary(rng, dim);
    let mask: Vec<f64> = (0..dim).map(|i| if i < rank { 1.0 } else { 0.0 }).collect();
    with_spectrum(&u, &mask)
}

/// Random 0/1 mask of length `dim`.
pub fn mask<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> Vec<f64> {
    (0..dim).map(|_| if rng.random_bool(0.5) { 1.0 } else { 0.0 }).collect()
}

/// Density operator `G G† / Tr(G G†)` with `G` a `dim × rank` Gaussian block.
pub fn density<R: Rng + ?Sized>(rng: &mut R, dim: usize, rank: usize) -> CMatrix {
    let rank = rank.clamp(1, dim);
    let g = DMatrix::from_fn(dim, rank, |_, _| {
        C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
    });
    let mut rho = &g * g.adjoint();
    let tr = rho.trace().re;
    rho /= C64::new(tr, 0.0);
    CMatrix::from_inner(rho).expect("finite")
}

/// Density operator supported inside `range(support)`: `P σ P / Tr(P σ P)` for
/// a random full-rank `σ`. Returns `None` if `support` is (numerically) zero.
pub fn density_in<R: Rng + ?Sized>(rng: &mut R, support: &CMatrix) -> Option<CMatrix> {
    let dim = support.dim();
    let sigma = density(rng, dim, dim);
    let rho = support.mul(&sigma).and_then(|m| m.mul(support)).ok()?;
    let tr = rho.trace().re;
    if tr < 1e-12 {
        return None;
    }
    // Symmetrize to remove rounding asymmetry.
    let rho = rho.add(&rho.adjoint()).ok()?.scale_real(0.5 / tr);
    Some(rho)
}

/// Unit vector in `C^dim`.
pub fn unit_vector<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> Vec<C64> {
    let v: Vec<C64> = (0..dim)
        .map(|_| C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
        .collect();
    let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    v.into_iter().map(|z| z / norm).collect()
}

/// Several projections diagonal in one random basis `u`, one 0/1 mask each.
#[derive(Clone, Debug)]
pub struct CommonBasis {
    pub u: CMatrix,
    pub masks: Vec<Vec<f64>>,
}

impl CommonBasis {
    pub fn projection(&self, k: usize) -> CMatrix {
        with_spectrum(&self.u, &self.masks[k])
    }

    /// Projector onto the basis vectors on which masks `a` and `b` agree.
    pub fn agreement(&self, a: usize, b: usize) -> CMatrix {
        let agree: Vec<f64> = self.masks[a]
            .iter()
            .zip(&self.masks[b])
            .map(|(x, y)| if x == y { 1.0 } else { 0.0 })
            .collect();
        with_spectrum(&self.u, &agree)
    }
}

pub fn common_basis<R: Rng + ?Sized>(rng: &mut R, dim: usize, count: usize) -> CommonBasis {
    CommonBasis {
        u: unitary(rng, dim),
        masks: (0..count).map(|_| mask(rng, dim)).collect(),
    }
}

/// Random convex split `ρ = λ ρ₁ + (1-λ) ρ₂` with `ρ₁ = √ρ X √ρ / λ` for a
/// random `0 ≤ X ≤ 1`. Returns `None` if either weight is below `1e-3`.
pub fn convex_split<R: Rng + ?Sized>(rng: &mut R, rho: &CMatrix) -> Option<(f64, CMatrix, CMatrix)> {
    let dim = rho.dim();
    let h = rho.as_inner();
    let sym = (h + h.adjoint()) * C64::new(0.5, 0.0);
    let eig = nalgebra::SymmetricEigen::new(sym);
    // Rounding-level eigenvalues would leak weight outside the support of ρ.
    let sqrt_vals: Vec<f64> = eig
        .eigenvalues
        .iter()
        .map(|&l| if l > 1e-12 { l.sqrt() } else { 0.0 })
        .collect();
    let root = with_spectrum(&CMatrix::from_inner(eig.eigenvectors).ok()?, &sqrt_vals);
    let x_vals: Vec<f64> = (0..dim).map(|_| rng.random_range(0.0..=1.0)).collect();
    let x = with_spectrum(&unitary(rng, dim), &x_vals);
    let part = |m: &CMatrix| -> Option<(f64, CMatrix)> {
        let a = root.mul(m).and_then(|p| p.mul(&root)).ok()?;
        let a = a.add(&a.adjoint()).ok()?.scale_real(0.5);
        let w = a.trace().re;
        (w > 1e-3).then(|| (w, a.scale_real(1.0 / w)))
    };
    let (lambda, rho1) = part(&x)?;
    let (_, rho2) = part(&CMatrix::identity(dim).sub(&x).ok()?)?;
    Some((lambda, rho1, rho2))
}
