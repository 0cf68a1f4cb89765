//! Riemannian geometry of the Kubo-Mori metric on positive definite
//! real symmetric matrices.
//!
//! The space of positive definite symmetric `n x n` matrices carries the
//! Riemannian metric
//!
//! ```text
//! G_D(X, Y) = ∫₀^∞ tr((D + t)⁻¹ X (D + t)⁻¹ Y) dt,
//! ```
//!
//! and the affine slice of trace-one matrices is a submanifold whose induced
//! geometry (second fundamental form, Gauss equation, scalar curvature) this
//! crate computes three independent ways: closed-form eigenvalue expressions,
//! assembly from the curvature tensor over explicit orthonormal bases, and a
//! definition-level oracle that works purely from quadrature and finite
//! differences. The oracle shares nothing with the closed forms beyond the
//! primitives in [`matcore`], which is what makes cross-validation between the
//! routes meaningful.
//!
//! # Conventions
//!
//! * Everything is real and symmetric. Points are [`PosDefMatrix`]; tangent
//!   vectors are symmetric matrices wrapped in [`TangentVector`].
//! * In the eigenbasis of `D` with eigenvalues `λ_i`, the metric is diagonal
//!   on the symmetrized matrix units `F_kl = E_kl + E_lk` (`k ≤ l`), with
//!   weights built from the reciprocal logarithmic means
//!   `m_kl = (log λ_l − log λ_k)/(λ_l − λ_k)` (see [`logmeans`]).
//! * The Christoffel form `Γ` enters the covariant derivative with a minus
//!   sign: `∇_ξ η = dη·ξ − Γ(ξ, η)`. Equivalently `Γ(X, Y) =
//!   −½ G⁻¹(dG(X)(Y))`, where `dG(Z)(X, Y)` is the (fully symmetric)
//!   derivative of the metric in direction `Z`. All curvature displays in
//!   [`curvature`] are written for this convention; the assembled tensor
//!   `R(X, Y)Z = −Γ(X, Γ(Y, Z)) + Γ(Y, Γ(X, Z))` is the curvature of `∇`.
//! * Scalar-curvature-style sums over the trace-one submanifold are the
//!   literal basis expansions `Σ_{t,s} [G(R(A_t, A_s)A_t, A_s) −
//!   S(A_t, A_t)S(A_s, A_s) − S(A_t, A_s)²]` over a `G_D`-orthonormal
//!   traceless basis. Under this slot ordering the uniform spectrum
//!   `(1/n, …, 1/n)` is the *minimizer* of the quantity; callers comparing
//!   against texts that expand `G(R(A_t, A_s)A_s, A_t)` instead should flip
//!   the sign of the curvature part.
//!
//! # Module map
//!
//! * [`matcore`] — dense symmetric linear algebra and quadrature primitives.
//! * [`logmeans`] — the scalar mean coefficients `m_kl`, `m_ijk` and their
//!   stratified, cancellation-free evaluation.
//! * [`metric`] — metric, inverse metric, metric derivative, Christoffel form.
//! * [`curvature`] — curvature tensor, Ricci/scalar traces, submanifold
//!   geometry (second fundamental form, Gauss equation, orthonormal bases).
//! * [`closedform`] — eigenvalue-only formulas for the trace-one scalar
//!   quantity, term by term, with characterized reference variants.
//! * [`oracle`] — definition-level quadrature/finite-difference evaluators
//!   used to adjudicate every closed form.
//! * [`conjlab`] — random-spectrum scans for the majorization monotonicity
//!   experiment, with deterministic CSV/JSON output.
//! * [`input`] — parsers for spectrum and matrix inputs.

pub mod closedform;
pub mod conjlab;
pub mod curvature;
pub mod input;
pub mod logmeans;
pub mod matcore;
pub mod metric;
pub mod oracle;

pub use closedform::CurvatureReport;
pub use conjlab::{ScanMethod, ScanOptions, ScanReport};
pub use curvature::{
    BasisConvention, BasisManifold, CurvatureMethod, CurvatureValue, OrthonormalBasis,
};
pub use input::{parse_matrix_json, parse_spectrum};
pub use logmeans::{m_pair, m_triple, MeanTable};
pub use matcore::{Mat, PosDefMatrix, Spectrum, SymMatrix};
pub use metric::{MetricContext, TangentVector};
pub use oracle::OracleConfig;

/// Error type shared across the crate.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// A matrix input was not square.
    #[error("matrix is {rows}x{cols}, expected square")]
    NotSquare { rows: usize, cols: usize },
    /// A matrix input was too far from symmetric to accept.
    #[error("matrix asymmetry {max_asymmetry:.3e} exceeds tolerance")]
    NotSymmetric { max_asymmetry: f64 },
    /// Two operands had incompatible dimensions.
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    /// A matrix or spectrum required to be positive definite was not.
    #[error("not positive definite (smallest eigenvalue {min_eigenvalue:.6e})")]
    NotPositiveDefinite { min_eigenvalue: f64 },
    /// The Jacobi eigensolver failed to reduce the off-diagonal norm.
    #[error("eigendecomposition did not converge after {sweeps} sweeps (off-diagonal norm {off_norm:.3e})")]
    EighDidNotConverge { sweeps: usize, off_norm: f64 },
    /// Adaptive quadrature exhausted its panel budget.
    #[error(
        "quadrature did not converge: estimate {estimate:.6e}, requested tolerance {tolerance:.3e}"
    )]
    QuadratureDidNotConverge { estimate: f64, tolerance: f64 },
    /// A point on the trace-one submanifold was required.
    #[error("trace is {trace:.17e}, expected exactly 1 (pass a normalized input or enable normalization)")]
    TraceNotOne { trace: f64 },
    /// A traceless tangent vector was required.
    #[error("tangent vector has trace {trace:.3e}, expected traceless")]
    NotTraceless { trace: f64 },
    /// An orthonormal basis failed validation.
    #[error("invalid basis: {0}")]
    BadBasis(String),
    /// A configuration value was out of its documented range.
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    /// A mathematical precondition failed.
    #[error("domain error: {0}")]
    Domain(String),
    /// Text or JSON input could not be parsed.
    #[error("parse error: {0}")]
    Parse(String),
    /// Writing scan output failed.
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

/// Formats a float with 17 significant digits, enough to round-trip `f64`.
///
/// All numeric output (CSV, JSON) goes through this so that identical inputs
/// produce byte-identical files.
pub fn float17(x: f64) -> String {
    format!("{x:.16e}")
}

#[cfg(test)]
mod tests {
    use super::float17;

    #[test]
    fn float17_round_trips_f64() {
        for &x in &[
            0.1,
            -1.0 / 3.0,
            std::f64::consts::PI,
            1e-300,
            -3.5e280,
            1.0,
            0.0,
        ] {
            let s = float17(x);
            let back: f64 = s.parse().unwrap();
            assert_eq!(back.to_bits(), x.to_bits(), "{s} did not round-trip");
        }
    }
}
