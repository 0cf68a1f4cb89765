//! The metric, its inverse, its derivative, and the Christoffel form.
//!
//! Every operation here works in the eigenframe of the base point: with
//! `D = Q Λ Qᵀ` and `X̂ = Qᵀ X Q`, the metric is the weighted entrywise sum
//!
//! ```text
//! G_D(X, Y) = Σ_{i,j} m_ij X̂_ij Ŷ_ij,
//! ```
//!
//! the inverse metric divides entrywise by the same weights, and the
//! derivative of the metric in direction `Z` is the symmetric matrix with
//! frame entries
//!
//! ```text
//! (dG(Z)(X))_ik = −Σ_j m_ijk (Ẑ_ij X̂_jk + X̂_ij Ẑ_jk).
//! ```
//!
//! The associated trilinear form `dG(Z)(X, Y) = ⟨dG(Z)(X), Y⟩` is fully
//! symmetric in `(Z, X, Y)`. The Christoffel form of this crate is
//!
//! ```text
//! Γ(X, Y) = −½ G⁻¹(dG(X)(Y)),
//! ```
//!
//! entering the covariant derivative as `∇_ξ η = dη·ξ − Γ(ξ, η)` (see the
//! crate docs for the sign convention). Two consequences worth knowing:
//! `Γ(X, D) = ½X` for every tangent `X`, and metric compatibility reads
//! `dG(Z)(X, Y) + G(Γ(Z, X), Y) + G(X, Γ(Z, Y)) = 0`.

use crate::logmeans::MeanTable;
use crate::matcore::{PosDefMatrix, Spectrum, SymMatrix};
use crate::{Error, Result};

/// Tolerance for classifying a tangent vector as traceless at construction.
const TRACELESS_TOL: f64 = 1e-12;

/// A tangent vector: a symmetric matrix tagged with whether it is traceless
/// (i.e. tangent to the trace-one submanifold).
#[derive(Clone, Debug)]
pub struct TangentVector {
    matrix: SymMatrix,
    traceless: bool,
}

impl TangentVector {
    /// Wraps a symmetric matrix, classifying tracelessness against
    /// `1e-12 · max(1, ‖X‖_F)`.
    pub fn new(matrix: SymMatrix) -> Self {
        let traceless = matrix.trace().abs() <= TRACELESS_TOL * matrix.frob_norm().max(1.0);
        TangentVector { matrix, traceless }
    }

    /// The underlying symmetric matrix.
    pub fn matrix(&self) -> &SymMatrix {
        &self.matrix
    }

    /// Whether the vector was classified traceless at construction.
    pub fn is_traceless(&self) -> bool {
        self.traceless
    }

    /// Errors unless the vector is traceless.
    ///
    /// # Errors
    ///
    /// [`Error::NotTraceless`] with the offending trace.
    pub fn require_traceless(&self) -> Result<()> {
        if self.traceless {
            Ok(())
        } else {
            Err(Error::NotTraceless {
                trace: self.matrix.trace(),
            })
        }
    }
}

impl From<SymMatrix> for TangentVector {
    fn from(matrix: SymMatrix) -> Self {
        TangentVector::new(matrix)
    }
}

/// A base point together with its precomputed mean coefficients.
#[derive(Clone, Debug)]
pub struct MetricContext {
    point: PosDefMatrix,
    means: MeanTable,
}

impl MetricContext {
    /// Builds the context for a positive definite point.
    pub fn new(point: PosDefMatrix) -> Self {
        let means = MeanTable::new(point.spectrum());
        MetricContext { point, means }
    }

    /// Context at the diagonal matrix with the given spectrum.
    pub fn from_spectrum(spectrum: &Spectrum) -> Self {
        MetricContext::new(PosDefMatrix::from_spectrum(spectrum))
    }

    /// The base point.
    pub fn point(&self) -> &PosDefMatrix {
        &self.point
    }

    /// The mean-coefficient tables at this point.
    pub fn means(&self) -> &MeanTable {
        &self.means
    }

    /// Matrix side length.
    pub fn n(&self) -> usize {
        self.point.n()
    }

    fn check_dim(&self, x: &TangentVector) -> Result<()> {
        if x.matrix().n() != self.n() {
            return Err(Error::DimensionMismatch {
                expected: self.n(),
                got: x.matrix().n(),
            });
        }
        Ok(())
    }
}

/// The metric `G_D(X, Y)`.
///
/// # Errors
///
/// [`Error::DimensionMismatch`] on size disagreement.
pub fn g(ctx: &MetricContext, x: &TangentVector, y: &TangentVector) -> Result<f64> {
    ctx.check_dim(x)?;
    ctx.check_dim(y)?;
    let n = ctx.n();
    let xh = ctx.point.to_frame(x.matrix());
    let yh = ctx.point.to_frame(y.matrix());
    let mut acc = 0.0;
    for i in 0..n {
        for j in 0..n {
            acc += ctx.means.m2(i, j) * xh.get(i, j) * yh.get(i, j);
        }
    }
    Ok(acc)
}

/// The metric as an operator: the symmetric matrix `G_D(X)` with
/// `G_D(X, Y) = ⟨G_D(X), Y⟩` for all `Y` (equivalently, the Fréchet
/// derivative of `log` at `D` applied to `X`).
///
/// # Errors
///
/// [`Error::DimensionMismatch`] on size disagreement.
pub fn g_op(ctx: &MetricContext, x: &TangentVector) -> Result<TangentVector> {
    ctx.check_dim(x)?;
    let xh = ctx.point.to_frame(x.matrix());
    let scaled = SymMatrix::from_fn(ctx.n(), |i, j| ctx.means.m2(i, j) * xh.get(i, j));
    Ok(TangentVector::new(ctx.point.from_frame(&scaled)))
}

/// The inverse metric operator: `g_inv(g_op(X)) = X`, and
/// `G_D(g_inv(X), Y) = ⟨X, Y⟩`.
///
/// # Errors
///
/// [`Error::DimensionMismatch`] on size disagreement.
pub fn g_inv(ctx: &MetricContext, x: &TangentVector) -> Result<TangentVector> {
    ctx.check_dim(x)?;
    let xh = ctx.point.to_frame(x.matrix());
    let scaled = SymMatrix::from_fn(ctx.n(), |i, j| xh.get(i, j) / ctx.means.m2(i, j));
    Ok(TangentVector::new(ctx.point.from_frame(&scaled)))
}

/// Frame-side kernel for the metric derivative: entries of `dG(Z)(X)` in the
/// eigenframe, given frame coordinates of `Z` and `X`.
fn dg_hat(means: &MeanTable, zh: &SymMatrix, xh: &SymMatrix) -> SymMatrix {
    let n = means.n();
    SymMatrix::from_fn(n, |i, k| {
        let mut acc = 0.0;
        for j in 0..n {
            acc -= means.m3(i, j, k) * (zh.get(i, j) * xh.get(j, k) + xh.get(i, j) * zh.get(j, k));
        }
        acc
    })
}

/// Derivative of the metric in direction `z`, applied to `x`, as a matrix:
/// `dG(Z)(X)` with `dG(Z)(X, Y) = ⟨dG(Z)(X), Y⟩`.
///
/// # Errors
///
/// [`Error::DimensionMismatch`] on size disagreement.
pub fn dg(ctx: &MetricContext, z: &TangentVector, x: &TangentVector) -> Result<TangentVector> {
    ctx.check_dim(z)?;
    ctx.check_dim(x)?;
    let zh = ctx.point.to_frame(z.matrix());
    let xh = ctx.point.to_frame(x.matrix());
    Ok(TangentVector::new(
        ctx.point.from_frame(&dg_hat(&ctx.means, &zh, &xh)),
    ))
}

/// The trilinear form `dG(Z)(X, Y)`, fully symmetric in its three slots.
///
/// # Errors
///
/// [`Error::DimensionMismatch`] on size disagreement.
pub fn dg_scalar(
    ctx: &MetricContext,
    z: &TangentVector,
    x: &TangentVector,
    y: &TangentVector,
) -> Result<f64> {
    ctx.check_dim(z)?;
    ctx.check_dim(x)?;
    ctx.check_dim(y)?;
    let zh = ctx.point.to_frame(z.matrix());
    let xh = ctx.point.to_frame(x.matrix());
    let yh = ctx.point.to_frame(y.matrix());
    Ok(dg_hat(&ctx.means, &zh, &xh).hs_inner(&yh))
}

/// The Christoffel form `Γ(X, Y) = −½ G⁻¹(dG(X)(Y))`.
///
/// Symmetric in `X, Y`; in frame entries,
/// `Γ̂_ik = Σ_j m_ijk (X̂_ij Ŷ_jk + Ŷ_ij X̂_jk) / (2 m_ik)`.
///
/// # Errors
///
/// [`Error::DimensionMismatch`] on size disagreement.
pub fn christoffel(
    ctx: &MetricContext,
    x: &TangentVector,
    y: &TangentVector,
) -> Result<TangentVector> {
    ctx.check_dim(x)?;
    ctx.check_dim(y)?;
    let xh = ctx.point.to_frame(x.matrix());
    let yh = ctx.point.to_frame(y.matrix());
    let gamma_hat = christoffel_hat(&ctx.means, &xh, &yh);
    Ok(TangentVector::new(ctx.point.from_frame(&gamma_hat)))
}

/// Frame-side Christoffel kernel, shared with the curvature assembly.
pub(crate) fn christoffel_hat(means: &MeanTable, xh: &SymMatrix, yh: &SymMatrix) -> SymMatrix {
    let n = means.n();
    SymMatrix::from_fn(n, |i, k| {
        let mut acc = 0.0;
        for j in 0..n {
            acc += means.m3(i, j, k) * (xh.get(i, j) * yh.get(j, k) + yh.get(i, j) * xh.get(j, k));
        }
        acc / (2.0 * means.m2(i, k))
    })
}
