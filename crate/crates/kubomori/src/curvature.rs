//! Curvature of the cone of positive matrices and of its trace-one slice.
//!
//! The ambient curvature tensor is assembled from the Christoffel form of
//! [`crate::metric`]:
//!
//! ```text
//! R(X, Y)Z = −Γ(X, Γ(Y, Z)) + Γ(Y, Γ(X, Z)),
//! ```
//!
//! which is the two-term operator composition
//! `−¼ G⁻¹ dG(X) G⁻¹ dG(Y)(Z) + ¼ G⁻¹ dG(Y) G⁻¹ dG(X)(Z)`. Everything is
//! evaluated in the eigenframe of the base point, so degenerate eigenvalues
//! need no special casing — the mean tables are continuous across them.
//!
//! Two orthonormality conventions coexist and are deliberately kept apart by
//! a tag on [`OrthonormalBasis`]:
//!
//! * **Hilbert–Schmidt**: `⟨A_s, A_t⟩ = tr(A_s A_t) = δ_st`. The ambient
//!   scalar curvature sum [`scal_ambient`] is written for this convention
//!   and inserts one inverse-metric factor to compensate.
//! * **Metric** (`G_D`): `G_D(A_s, A_t) = δ_st`. The trace-one submanifold
//!   sum [`scal_submanifold`] runs over such a basis of the traceless
//!   tangent plane.
//!
//! The trace-one slice has unit normal `D` itself ([`normal_field`]; its
//! `G_D`-pairing against any tangent is the plain trace), tangent projection
//! `X ↦ X − tr(X)·D` ([`project`]), Weingarten map `X − Γ(X, D) = ½X`
//! ([`weingarten`]), and scalar second fundamental form
//! `S(X, Y) = tr Γ(X, Y) = ½ G_D(X, Y)` ([`second_fundamental`]).
//!
//! [`gauss_curvature`] returns the curvature of the slice as a tensor:
//! `G(R(X,Y)Z, U) − S(X,Z)S(Y,U) + S(Y,Z)S(X,U)`, antisymmetric in `(X, Y)`
//! and pair-symmetric. [`scal_submanifold`] assembles the scalar sum
//! `Σ_{t,s} [G(R(A_t,A_s)A_t, A_s) − S(A_t,A_t)S(A_s,A_s) − S(A_s,A_t)S(A_t,A_s)]`
//! with *both* form products subtracted, the `t = s` diagonal included.
//! Because `S(Â, Â) = ½` on every unit tangent, that sum differs from the
//! naive contraction `Σ_{t,s} gauss_curvature(A_t, A_s, A_t, A_s)` by
//! exactly half the basis size: the contraction's correction cancels at
//! `t = s` while the assembled sum keeps `−2·S(Â,Â)² = −½` there. The
//! assembled sum is the quantity the closed-form and finite-difference
//! evaluators of this crate agree on (`−1` at `I/2`, `−75/16` at `I/3`).

use crate::logmeans::MeanTable;
use crate::matcore::random::{random_orthogonal, rng_from_seed};
use crate::matcore::{f_unit, hs_basis, PosDefMatrix, SymMatrix};
use crate::metric::{christoffel_hat, MetricContext, TangentVector};
use crate::{Error, Result};

/// Orthonormality slack for basis validation.
const ORTHO_TOL: f64 = 1e-10;

/// Slack for "this point lies on the trace-one slice".
const TRACE_ONE_TOL: f64 = 1e-8;

/// Relative threshold below which a Gram-Schmidt remainder is dropped as
/// linearly dependent (squared norm against the seed's squared norm).
const GS_DROP_TOL: f64 = 1e-14;

/// How a curvature number was produced.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CurvatureMethod {
    /// Eigenframe mean-table assembly of the two-term curvature.
    ClosedForm,
    /// Finite-difference / quadrature pipeline (see [`crate::oracle`]).
    OracleFiniteDifference,
    /// Closed-form curvature combined with second-fundamental-form products
    /// over a metric-orthonormal traceless basis.
    GaussAssembly,
}

impl CurvatureMethod {
    /// Short stable label, used in reports and scan output.
    pub fn as_str(self) -> &'static str {
        match self {
            CurvatureMethod::ClosedForm => "closed",
            CurvatureMethod::OracleFiniteDifference => "oracle",
            CurvatureMethod::GaussAssembly => "gauss-assembly",
        }
    }
}

impl std::fmt::Display for CurvatureMethod {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A curvature number tagged with the route that produced it.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CurvatureValue {
    pub value: f64,
    pub method: CurvatureMethod,
}

/// Which inner product a basis is orthonormal for.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BasisConvention {
    /// `tr(A_s A_t) = δ_st`.
    HilbertSchmidt,
    /// `G_D(A_s, A_t) = δ_st`.
    KuboMori,
}

/// Which tangent space a basis spans.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BasisManifold {
    /// All symmetric matrices: dimension `n(n+1)/2`.
    Ambient,
    /// Traceless symmetric matrices (tangent to the trace-one slice):
    /// dimension `n(n+1)/2 − 1`.
    TraceOne,
}

/// An orthonormal tangent basis at a fixed base point.
///
/// The convention and manifold tags prevent cross-use: the ambient scalar
/// curvature sum insists on a Hilbert-Schmidt basis, the submanifold sum on
/// a metric-orthonormal traceless one. `split` records how many elements
/// are diagonal respectively offdiagonal in the eigenframe of the point;
/// it is `None` for randomly mixed bases, whose elements are neither.
#[derive(Clone, Debug)]
pub struct OrthonormalBasis {
    point: PosDefMatrix,
    elements: Vec<TangentVector>,
    convention: BasisConvention,
    manifold: BasisManifold,
    split: Option<(usize, usize)>,
}

impl OrthonormalBasis {
    /// The Hilbert-Schmidt-orthonormal basis of all symmetric matrices:
    /// diagonal units first, then symmetrized offdiagonal units `/√2`.
    pub fn ambient_hs(ctx: &MetricContext) -> OrthonormalBasis {
        let n = ctx.n();
        let elements = hs_basis(n).into_iter().map(TangentVector::new).collect();
        OrthonormalBasis {
            point: ctx.point().clone(),
            elements,
            convention: BasisConvention::HilbertSchmidt,
            manifold: BasisManifold::Ambient,
            split: Some((n, n * (n - 1) / 2)),
        }
    }

    /// A seeded random Hilbert-Schmidt-orthonormal basis: the structured
    /// basis rotated by a random orthogonal coefficient matrix.
    pub fn ambient_hs_mixed(ctx: &MetricContext, seed: u64) -> OrthonormalBasis {
        OrthonormalBasis::ambient_hs(ctx).mixed(seed)
    }

    /// The metric-orthonormal basis of all symmetric matrices at the
    /// context's point: scaled diagonal eigenframe units `√λ_i · E_ii`,
    /// then scaled symmetrized units `F_ij/√(2 m_ij)`.
    pub fn ambient_km(ctx: &MetricContext) -> OrthonormalBasis {
        let n = ctx.n();
        let means = ctx.means();
        let lambda = ctx.point().spectrum().values();
        let mut elements = Vec::with_capacity(n * (n + 1) / 2);
        for (i, &l) in lambda.iter().enumerate() {
            let mut hat = SymMatrix::zeros(n);
            hat.set_sym(i, i, l.sqrt());
            elements.push(TangentVector::new(ctx.point().from_frame(&hat)));
        }
        for i in 0..n {
            for j in (i + 1)..n {
                let hat = f_unit(n, i, j).scaled(1.0 / (2.0 * means.m2(i, j)).sqrt());
                elements.push(TangentVector::new(ctx.point().from_frame(&hat)));
            }
        }
        OrthonormalBasis {
            point: ctx.point().clone(),
            elements,
            convention: BasisConvention::KuboMori,
            manifold: BasisManifold::Ambient,
            split: Some((n, n * (n - 1) / 2)),
        }
    }

    /// The metric-orthonormal basis of the traceless tangent plane at a
    /// trace-one point.
    ///
    /// In the eigenframe, the offdiagonal part is `F_ij/√(2 m_ij)` for
    /// `i < j`; the diagonal part comes from Gram-Schmidt (ascending index)
    /// of the trace-projected diagonal units under the weighted inner
    /// product `Σ_i a_i b_i / λ_i`. The diagonal elements come first, so
    /// `split = (n − 1, n(n−1)/2)`.
    ///
    /// # Errors
    ///
    /// [`Error::TraceNotOne`] off the slice; [`Error::BadBasis`] if the
    /// diagonal Gram-Schmidt does not produce exactly `n − 1` directions.
    pub fn trace_one_km(ctx: &MetricContext) -> Result<OrthonormalBasis> {
        let trace = ctx.point().matrix().trace();
        if (trace - 1.0).abs() > TRACE_ONE_TOL {
            return Err(Error::TraceNotOne { trace });
        }
        let n = ctx.n();
        let means = ctx.means();
        let lambda = ctx.point().spectrum().values();
        let mut elements = Vec::with_capacity(n * (n + 1) / 2 - 1);
        for coeff in diagonal_coefficient_basis(lambda)? {
            let hat = SymMatrix::diagonal(&coeff);
            elements.push(TangentVector::new(ctx.point().from_frame(&hat)));
        }
        for i in 0..n {
            for j in (i + 1)..n {
                let hat = f_unit(n, i, j).scaled(1.0 / (2.0 * means.m2(i, j)).sqrt());
                elements.push(TangentVector::new(ctx.point().from_frame(&hat)));
            }
        }
        Ok(OrthonormalBasis {
            point: ctx.point().clone(),
            elements,
            convention: BasisConvention::KuboMori,
            manifold: BasisManifold::TraceOne,
            split: Some((n - 1, n * (n - 1) / 2)),
        })
    }

    /// A seeded random metric-orthonormal basis of the traceless plane.
    ///
    /// # Errors
    ///
    /// As [`OrthonormalBasis::trace_one_km`].
    pub fn trace_one_km_mixed(ctx: &MetricContext, seed: u64) -> Result<OrthonormalBasis> {
        Ok(OrthonormalBasis::trace_one_km(ctx)?.mixed(seed))
    }

    /// Rotates the element list by a seeded random orthogonal coefficient
    /// matrix. Orthonormality (in either convention) and tracelessness are
    /// preserved; the diagonal/offdiagonal split is not.
    fn mixed(self, seed: u64) -> OrthonormalBasis {
        let len = self.elements.len();
        let n = self.point.n();
        let q = random_orthogonal(&mut rng_from_seed(seed), len);
        let elements = (0..len)
            .map(|a| {
                let mut acc = SymMatrix::zeros(n);
                for (b, element) in self.elements.iter().enumerate() {
                    acc.add_scaled(q[(b, a)], element.matrix());
                }
                TangentVector::new(acc)
            })
            .collect();
        OrthonormalBasis {
            point: self.point,
            elements,
            convention: self.convention,
            manifold: self.manifold,
            split: None,
        }
    }

    /// The base point the basis was built at.
    pub fn point(&self) -> &PosDefMatrix {
        &self.point
    }

    /// The basis elements.
    pub fn elements(&self) -> &[TangentVector] {
        &self.elements
    }

    /// The orthonormality convention.
    pub fn convention(&self) -> BasisConvention {
        self.convention
    }

    /// Which tangent space the basis spans.
    pub fn manifold(&self) -> BasisManifold {
        self.manifold
    }

    /// `(diagonal, offdiagonal)` element counts for structured bases,
    /// `None` after random mixing.
    pub fn split(&self) -> Option<(usize, usize)> {
        self.split
    }

    /// Number of elements.
    pub fn len(&self) -> usize {
        self.elements.len()
    }

    /// Whether the basis has no elements (only for `n = 1` traceless).
    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    /// Checks every invariant against the supplied context: expected size,
    /// orthonormality under the tagged inner product to `1e-10`,
    /// tracelessness for the trace-one variant, and split consistency.
    ///
    /// A basis built at a different point fails the metric orthonormality
    /// check naturally, since the pairing is evaluated at `ctx`.
    ///
    /// # Errors
    ///
    /// [`Error::DimensionMismatch`] on size disagreement with the context,
    /// [`Error::BadBasis`] on any invariant violation.
    pub fn validate(&self, ctx: &MetricContext) -> Result<()> {
        let n = ctx.n();
        if self.point.n() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: self.point.n(),
            });
        }
        let expected = match self.manifold {
            BasisManifold::Ambient => n * (n + 1) / 2,
            BasisManifold::TraceOne => n * (n + 1) / 2 - 1,
        };
        if self.elements.len() != expected {
            return Err(Error::BadBasis(format!(
                "expected {expected} basis elements, found {}",
                self.elements.len()
            )));
        }
        if let Some((diag, offdiag)) = self.split {
            if diag + offdiag != self.elements.len() {
                return Err(Error::BadBasis(format!(
                    "split {diag}+{offdiag} does not cover {} elements",
                    self.elements.len()
                )));
            }
        }
        if self.manifold == BasisManifold::TraceOne {
            if self.convention != BasisConvention::KuboMori {
                return Err(Error::BadBasis(
                    "trace-one bases must be metric-orthonormal".into(),
                ));
            }
            for (s, element) in self.elements.iter().enumerate() {
                let trace = element.matrix().trace();
                if trace.abs() > ORTHO_TOL * element.matrix().frob_norm().max(1.0) {
                    return Err(Error::BadBasis(format!(
                        "trace-one basis element {s} has trace {trace:e}"
                    )));
                }
            }
        }
        for x in &self.elements {
            if x.matrix().n() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    got: x.matrix().n(),
                });
            }
        }
        let frames: Vec<SymMatrix> = self
            .elements
            .iter()
            .map(|e| ctx.point().to_frame(e.matrix()))
            .collect();
        for s in 0..frames.len() {
            for t in s..frames.len() {
                let pairing = match self.convention {
                    BasisConvention::HilbertSchmidt => frames[s].hs_inner(&frames[t]),
                    BasisConvention::KuboMori => g_hat(ctx.means(), &frames[s], &frames[t]),
                };
                let want = if s == t { 1.0 } else { 0.0 };
                if (pairing - want).abs() > ORTHO_TOL {
                    return Err(Error::BadBasis(format!(
                        "pairing of elements {s},{t} is {pairing:.3e}, expected {want}"
                    )));
                }
            }
        }
        Ok(())
    }
}

/// Orthonormal coefficient vectors for the traceless diagonal directions:
/// Gram-Schmidt (ascending seed index, two passes) of the trace-projected
/// diagonal units under `⟨a, b⟩ = Σ_i a_i b_i / λ_i`, each vector summing
/// to zero. Returns exactly `n − 1` vectors.
///
/// # Errors
///
/// [`Error::BadBasis`] when the process does not yield `n − 1` directions
/// (it always should for a positive spectrum; this guards degenerate input).
pub fn diagonal_coefficient_basis(lambda: &[f64]) -> Result<Vec<Vec<f64>>> {
    let n = lambda.len();
    let inner = |a: &[f64], b: &[f64]| -> f64 {
        a.iter()
            .zip(b)
            .zip(lambda)
            .map(|((&ai, &bi), &li)| ai * bi / li)
            .sum()
    };
    let mut kept: Vec<Vec<f64>> = Vec::with_capacity(n.saturating_sub(1));
    for k in 0..n {
        // Trace-projected diagonal unit: 2 E_kk − 2 tr(E_kk) D, re-centered
        // to an exactly zero sum so the slice constraint survives roundoff.
        let mut a: Vec<f64> = lambda
            .iter()
            .enumerate()
            .map(|(i, &li)| if i == k { 2.0 - 2.0 * li } else { -2.0 * li })
            .collect();
        let mean = a.iter().sum::<f64>() / n as f64;
        for ai in &mut a {
            *ai -= mean;
        }
        let orig = inner(&a, &a);
        for _ in 0..2 {
            for basis_vec in &kept {
                let c = inner(&a, basis_vec);
                for (ai, bi) in a.iter_mut().zip(basis_vec) {
                    *ai -= c * bi;
                }
            }
        }
        let norm2 = inner(&a, &a);
        if norm2 <= GS_DROP_TOL * orig {
            continue;
        }
        let scale = 1.0 / norm2.sqrt();
        for ai in &mut a {
            *ai *= scale;
        }
        kept.push(a);
    }
    if kept.len() != n.saturating_sub(1) {
        return Err(Error::BadBasis(format!(
            "diagonal reduction produced {} directions, expected {}",
            kept.len(),
            n.saturating_sub(1)
        )));
    }
    Ok(kept)
}

fn check_dim(ctx: &MetricContext, x: &TangentVector) -> Result<()> {
    if x.matrix().n() != ctx.n() {
        return Err(Error::DimensionMismatch {
            expected: ctx.n(),
            got: x.matrix().n(),
        });
    }
    Ok(())
}

fn check_trace_one(ctx: &MetricContext) -> Result<()> {
    let trace = ctx.point().matrix().trace();
    if (trace - 1.0).abs() > TRACE_ONE_TOL {
        return Err(Error::TraceNotOne { trace });
    }
    Ok(())
}

/// Frame-side metric pairing (same weighted entrywise sum as
/// [`crate::metric::g`], for coordinates already in the eigenframe).
fn g_hat(means: &MeanTable, ah: &SymMatrix, bh: &SymMatrix) -> f64 {
    let n = means.n();
    let mut acc = 0.0;
    for i in 0..n {
        for j in 0..n {
            acc += means.m2(i, j) * ah.get(i, j) * bh.get(i, j);
        }
    }
    acc
}

/// Frame-side curvature kernel: `R̂ = −Γ̂(X, Γ̂(Y, Z)) + Γ̂(Y, Γ̂(X, Z))`.
pub(crate) fn riemann_hat(
    means: &MeanTable,
    xh: &SymMatrix,
    yh: &SymMatrix,
    zh: &SymMatrix,
) -> SymMatrix {
    let yz = christoffel_hat(means, yh, zh);
    let xz = christoffel_hat(means, xh, zh);
    christoffel_hat(means, yh, &xz).sub(&christoffel_hat(means, xh, &yz))
}

/// The curvature tensor `R(X, Y)Z` of the cone, antisymmetric in `(X, Y)`.
///
/// The result always has zero trace: `tr R(X,Y)Z = G(R(X,Y)Z, D)` vanishes
/// by pair symmetry because `R(·, D)· = 0` (the base direction is flat).
///
/// # Errors
///
/// [`Error::DimensionMismatch`] on size disagreement.
pub fn riemann(
    ctx: &MetricContext,
    x: &TangentVector,
    y: &TangentVector,
    z: &TangentVector,
) -> Result<TangentVector> {
    check_dim(ctx, x)?;
    check_dim(ctx, y)?;
    check_dim(ctx, z)?;
    let xh = ctx.point().to_frame(x.matrix());
    let yh = ctx.point().to_frame(y.matrix());
    let zh = ctx.point().to_frame(z.matrix());
    let r_hat = riemann_hat(ctx.means(), &xh, &yh, &zh);
    Ok(TangentVector::new(ctx.point().from_frame(&r_hat)))
}

/// The Ricci form: the trace of `Y ↦ R(x, Y)z` over the supplied basis,
/// `Σ_s ⟨R(x, A_s)z, A_s⟩` with the pairing the basis is orthonormal for.
///
/// For an ambient basis the value is the trace of the full operator and is
/// independent of both the basis choice and its convention. For a trace-one
/// basis it is the same operator traced over the traceless plane only (no
/// second-fundamental-form correction — that belongs to
/// [`gauss_curvature`]).
///
/// # Errors
///
/// [`Error::DimensionMismatch`] on size disagreement; [`Error::BadBasis`]
/// when the basis fails validation against this context.
pub fn ricci(
    ctx: &MetricContext,
    x: &TangentVector,
    z: &TangentVector,
    basis: &OrthonormalBasis,
) -> Result<f64> {
    check_dim(ctx, x)?;
    check_dim(ctx, z)?;
    basis.validate(ctx)?;
    let xh = ctx.point().to_frame(x.matrix());
    let zh = ctx.point().to_frame(z.matrix());
    let mut acc = 0.0;
    for element in basis.elements() {
        let ah = ctx.point().to_frame(element.matrix());
        let r_hat = riemann_hat(ctx.means(), &xh, &ah, &zh);
        acc += match basis.convention() {
            BasisConvention::HilbertSchmidt => r_hat.hs_inner(&ah),
            BasisConvention::KuboMori => g_hat(ctx.means(), &r_hat, &ah),
        };
    }
    Ok(acc)
}

/// Scalar curvature of the cone:
/// `Σ_{t,s} ⟨R(A_t, A_s) G⁻¹A_t, A_s⟩` over a Hilbert-Schmidt-orthonormal
/// basis. The inverse-metric factor is what makes this expression
/// basis-independent in the Hilbert-Schmidt convention.
///
/// At `D = cI` the value is `n(n−1)(n+2)/(32c)`.
///
/// # Errors
///
/// [`Error::BadBasis`] for a non-ambient or non-Hilbert-Schmidt basis, or
/// when validation against this context fails.
pub fn scal_ambient(ctx: &MetricContext, basis: &OrthonormalBasis) -> Result<CurvatureValue> {
    if basis.manifold() != BasisManifold::Ambient
        || basis.convention() != BasisConvention::HilbertSchmidt
    {
        return Err(Error::BadBasis(
            "ambient scalar curvature needs a Hilbert-Schmidt-orthonormal ambient basis".into(),
        ));
    }
    basis.validate(ctx)?;
    let means = ctx.means();
    let frames: Vec<SymMatrix> = basis
        .elements()
        .iter()
        .map(|e| ctx.point().to_frame(e.matrix()))
        .collect();
    let n = ctx.n();
    let mut value = 0.0;
    for th in &frames {
        // G⁻¹ acts entrywise in the frame.
        let wh = SymMatrix::from_fn(n, |i, j| th.get(i, j) / means.m2(i, j));
        for sh in &frames {
            value += riemann_hat(means, th, sh, &wh).hs_inner(sh);
        }
    }
    Ok(CurvatureValue {
        value,
        method: CurvatureMethod::ClosedForm,
    })
}

/// The unit normal of the trace-one slice: the point itself. Its metric
/// pairing against any tangent is the plain trace, so it has unit norm and
/// is orthogonal to every traceless direction.
///
/// # Errors
///
/// [`Error::TraceNotOne`] off the slice.
pub fn normal_field(d: &PosDefMatrix) -> Result<TangentVector> {
    let trace = d.matrix().trace();
    if (trace - 1.0).abs() > TRACE_ONE_TOL {
        return Err(Error::TraceNotOne { trace });
    }
    Ok(TangentVector::new(d.matrix().clone()))
}

/// Projection onto the traceless tangent plane: `X − tr(X)·D` at a
/// trace-one point (the trace ratio keeps the result exactly traceless for
/// any positive point). Fixed points are exactly the traceless vectors, and
/// `X = project(X) + tr(X)·D` is the metric-orthogonal decomposition.
pub fn project(d: &PosDefMatrix, x: &TangentVector) -> TangentVector {
    let ratio = x.matrix().trace() / d.matrix().trace();
    let mut out = x.matrix().clone();
    out.add_scaled(-ratio, d.matrix());
    TangentVector::new(out)
}

/// The Weingarten (shape) map of the trace-one slice: `X − Γ(X, D)`, which
/// collapses to `½X` because `Γ(X, D) = ½X`. Kept as the literal difference
/// so the identity stays a test, not an assumption.
///
/// # Errors
///
/// [`Error::TraceNotOne`] off the slice; [`Error::NotTraceless`] for a
/// non-tangent argument; [`Error::DimensionMismatch`] on size disagreement.
pub fn weingarten(ctx: &MetricContext, x: &TangentVector) -> Result<TangentVector> {
    check_dim(ctx, x)?;
    check_trace_one(ctx)?;
    x.require_traceless()?;
    let xh = ctx.point().to_frame(x.matrix());
    let dh = SymMatrix::diagonal(ctx.point().spectrum().values());
    let gamma_hat = christoffel_hat(ctx.means(), &xh, &dh);
    Ok(TangentVector::new(
        ctx.point().from_frame(&xh.sub(&gamma_hat)),
    ))
}

/// The scalar second fundamental form of the trace-one slice:
/// `S(X, Y) = tr Γ(X, Y)`, equal to `½ G_D(X, Y)` identically (the other
/// evaluation routes live in [`crate::oracle`]).
///
/// # Errors
///
/// [`Error::TraceNotOne`] off the slice; [`Error::NotTraceless`] for
/// non-tangent arguments; [`Error::DimensionMismatch`] on size disagreement.
pub fn second_fundamental(
    ctx: &MetricContext,
    x: &TangentVector,
    y: &TangentVector,
) -> Result<f64> {
    check_dim(ctx, x)?;
    check_dim(ctx, y)?;
    check_trace_one(ctx)?;
    x.require_traceless()?;
    y.require_traceless()?;
    let xh = ctx.point().to_frame(x.matrix());
    let yh = ctx.point().to_frame(y.matrix());
    Ok(christoffel_hat(ctx.means(), &xh, &yh).trace())
}

/// Curvature tensor of the trace-one slice via the Gauss relation:
/// `G(R(x,y)z, u) − S(x,z)S(y,u) + S(y,z)S(x,u)`. Antisymmetric in
/// `(x, y)` and `(z, u)`, pair-symmetric.
///
/// # Errors
///
/// [`Error::TraceNotOne`] off the slice; [`Error::NotTraceless`] for
/// non-tangent arguments; [`Error::DimensionMismatch`] on size disagreement.
pub fn gauss_curvature(
    ctx: &MetricContext,
    x: &TangentVector,
    y: &TangentVector,
    z: &TangentVector,
    u: &TangentVector,
) -> Result<f64> {
    for v in [x, y, z, u] {
        check_dim(ctx, v)?;
        v.require_traceless()?;
    }
    check_trace_one(ctx)?;
    let means = ctx.means();
    let xh = ctx.point().to_frame(x.matrix());
    let yh = ctx.point().to_frame(y.matrix());
    let zh = ctx.point().to_frame(z.matrix());
    let uh = ctx.point().to_frame(u.matrix());
    let curv = g_hat(means, &riemann_hat(means, &xh, &yh, &zh), &uh);
    let s = |a: &SymMatrix, b: &SymMatrix| christoffel_hat(means, a, b).trace();
    Ok(curv - s(&xh, &zh) * s(&yh, &uh) + s(&yh, &zh) * s(&xh, &uh))
}

/// Scalar curvature of the trace-one slice, assembled over a
/// metric-orthonormal traceless basis:
///
/// ```text
/// Σ_{t,s} [ G(R(A_t, A_s)A_t, A_s)
///           − S(A_t, A_t)·S(A_s, A_s) − S(A_s, A_t)·S(A_t, A_s) ]
/// ```
///
/// with both form products subtracted and the `t = s` terms included (see
/// the module docs for how this relates to contracting
/// [`gauss_curvature`]). The value is basis-independent and invariant under
/// orthogonal conjugation of the point. Summation order is fixed, so a
/// given point always produces the identical floating-point value.
///
/// # Errors
///
/// [`Error::TraceNotOne`] off the slice; [`Error::BadBasis`] for an ambient
/// basis or one failing validation against this context.
pub fn scal_submanifold(ctx: &MetricContext, basis: &OrthonormalBasis) -> Result<CurvatureValue> {
    if basis.manifold() != BasisManifold::TraceOne {
        return Err(Error::BadBasis(
            "submanifold scalar curvature needs a traceless metric-orthonormal basis".into(),
        ));
    }
    check_trace_one(ctx)?;
    basis.validate(ctx)?;
    let means = ctx.means();
    let frames: Vec<SymMatrix> = basis
        .elements()
        .iter()
        .map(|e| ctx.point().to_frame(e.matrix()))
        .collect();
    let nb = frames.len();
    let mut form = vec![0.0; nb * nb];
    for t in 0..nb {
        for s in t..nb {
            let value = christoffel_hat(means, &frames[t], &frames[s]).trace();
            form[t * nb + s] = value;
            form[s * nb + t] = value;
        }
    }
    let mut value = 0.0;
    for t in 0..nb {
        for s in 0..nb {
            let curv = g_hat(
                means,
                &riemann_hat(means, &frames[t], &frames[s], &frames[t]),
                &frames[s],
            );
            value +=
                curv - form[t * nb + t] * form[s * nb + s] - form[s * nb + t] * form[t * nb + s];
        }
    }
    Ok(CurvatureValue {
        value,
        method: CurvatureMethod::GaussAssembly,
    })
}
