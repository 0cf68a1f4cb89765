//! Definition-level evaluators for every geometric quantity in the crate.
//!
//! Each function here recomputes its target straight from a defining
//! integral or difference quotient, using only the primitives in
//! [`crate::matcore`] — never the mean-coefficient tables or the closed
//! forms built on them. Agreement between these evaluators and the fast
//! implementations is therefore evidence, not circularity, and the test
//! suites lean on them as the adjudicating reference:
//!
//! * [`g_oracle`] integrates `tr((D+t)⁻¹X(D+t)⁻¹Y)` adaptively over
//!   `[0, ∞)`.
//! * [`ginv_oracle`] integrates `D^u X D^{1−u}` over `[0, 1]`.
//! * [`dg_fd`] differentiates `g_oracle` by Richardson-extrapolated central
//!   differences; [`dg_quadrature`] integrates the differentiated resolvent
//!   expression directly. The two agree to ~1e-6 and either serves as the
//!   reference for the closed-form metric derivative.
//! * [`christoffel_fd`] solves the compatibility identity
//!   `G(Γ(X,Y), Z) = ½dG(Z)(X,Y) − ½dG(X)(Z,Y) − ½dG(Y)(X,Z)`
//!   over an orthonormal matrix basis, with every right-hand side a
//!   quadrature.
//! * [`riemann_fd`] assembles the curvature tensor from difference
//!   quotients of `christoffel_fd` plus its quadratic terms.
//! * [`sff_integral`] and [`sff_double_integral`] evaluate two integral
//!   expressions for the scalar second fundamental form of the trace-one
//!   submanifold.
//! * [`scal1_oracle`] assembles the submanifold scalar curvature from the
//!   pieces above over a metric-orthonormal traceless basis, never touching
//!   a closed-form coefficient.
//!
//! All evaluators take an [`OracleConfig`]; the default is accurate enough
//! for every adjudication tolerance in the test suite.

use rayon::prelude::*;

use crate::matcore::{hs_basis, quad_semi_infinite_vec, quad_unit, PosDefMatrix, SymMatrix};
use crate::{Error, Result};

/// Tuning knobs for the definition-level evaluators.
#[derive(Clone, Debug)]
pub struct OracleConfig {
    /// Finite-difference step, relative to the largest eigenvalue of the
    /// base point (further capped so perturbations stay positive definite).
    pub fd_step_rel: f64,
    /// Richardson extrapolation depth for difference quotients; level 1 is
    /// a plain central difference, each further level halves the step and
    /// cancels the next error order.
    pub richardson_levels: usize,
    /// Error target handed to the adaptive quadrature.
    pub quad_tol: f64,
}

impl Default for OracleConfig {
    fn default() -> Self {
        OracleConfig {
            fd_step_rel: 1e-5,
            richardson_levels: 2,
            quad_tol: 1e-10,
        }
    }
}

impl OracleConfig {
    /// Rejects steps and depths outside the usable range.
    ///
    /// # Errors
    ///
    /// [`Error::InvalidConfig`] describing the offending field.
    pub fn validate(&self) -> Result<()> {
        if !(self.fd_step_rel > 1e-9 && self.fd_step_rel < 1e-2) {
            return Err(Error::InvalidConfig(format!(
                "fd_step_rel {} outside (1e-9, 1e-2)",
                self.fd_step_rel
            )));
        }
        if !(1..=4).contains(&self.richardson_levels) {
            return Err(Error::InvalidConfig(format!(
                "richardson_levels {} outside 1..=4",
                self.richardson_levels
            )));
        }
        if !(self.quad_tol > 0.0 && self.quad_tol < 1e-2) {
            return Err(Error::InvalidConfig(format!(
                "quad_tol {} outside (0, 1e-2)",
                self.quad_tol
            )));
        }
        Ok(())
    }
}

fn check_dim(d: &PosDefMatrix, x: &SymMatrix) -> Result<()> {
    if x.n() != d.n() {
        return Err(Error::DimensionMismatch {
            expected: d.n(),
            got: x.n(),
        });
    }
    Ok(())
}

fn check_traceless(x: &SymMatrix) -> Result<()> {
    if x.trace().abs() > 1e-12 * x.frob_norm().max(1.0) {
        return Err(Error::NotTraceless { trace: x.trace() });
    }
    Ok(())
}

/// Substitution scale for resolvent integrands.
fn resolvent_scale(d: &PosDefMatrix) -> f64 {
    (d.spectrum().min() * d.spectrum().max()).sqrt()
}

/// Fills `a[i] = 1/(λ_i + t)`.
fn resolvent_diag(lambda: &[f64], t: f64, a: &mut [f64]) {
    for (ai, li) in a.iter_mut().zip(lambda) {
        *ai = 1.0 / (li + t);
    }
}

/// `tr(A P A Q)` for diagonal `A`: `Σ_{ij} a_i P_ij a_j Q_ij`.
fn pair_trace(a: &[f64], p: &SymMatrix, q: &SymMatrix) -> f64 {
    let n = a.len();
    let mut acc = 0.0;
    for i in 0..n {
        for j in 0..n {
            acc += a[i] * p.get(i, j) * a[j] * q.get(i, j);
        }
    }
    acc
}

/// `tr(A P A Q A R)` for diagonal `A`: `Σ_{ijk} a_i P_ij a_j Q_jk a_k R_ki`.
fn triple_trace(a: &[f64], p: &SymMatrix, q: &SymMatrix, r: &SymMatrix) -> f64 {
    let n = a.len();
    let mut acc = 0.0;
    for i in 0..n {
        for j in 0..n {
            let pij = a[i] * p.get(i, j) * a[j];
            if pij == 0.0 {
                continue;
            }
            for (k, &ak) in a.iter().enumerate() {
                acc += pij * q.get(j, k) * ak * r.get(k, i);
            }
        }
    }
    acc
}

/// The metric by its defining integral,
/// `G_D(X, Y) = ∫₀^∞ tr((D+t)⁻¹X(D+t)⁻¹Y) dt`.
///
/// # Errors
///
/// Dimension mismatches, invalid configuration, or quadrature failure.
pub fn g_oracle(d: &PosDefMatrix, x: &SymMatrix, y: &SymMatrix, cfg: &OracleConfig) -> Result<f64> {
    cfg.validate()?;
    check_dim(d, x)?;
    check_dim(d, y)?;
    let xh = d.to_frame(x);
    let yh = d.to_frame(y);
    let lambda = d.spectrum().values().to_vec();
    let mut a = vec![0.0; d.n()];
    let out = quad_semi_infinite_vec(
        move |t, slot| {
            resolvent_diag(&lambda, t, &mut a);
            slot[0] = pair_trace(&a, &xh, &yh);
        },
        1,
        resolvent_scale(d),
        cfg.quad_tol,
    )?;
    Ok(out[0])
}

/// Entrywise frame kernel of the inverse metric, `∫₀¹ λ_i^u λ_j^{1−u} du`,
/// by a fixed 32-point Gauss–Legendre rule (the integrand is entire, so the
/// rule is exact to machine precision at any eigenvalue ratio of practical
/// interest).
fn ginv_kernel(lambda: &[f64]) -> SymMatrix {
    SymMatrix::from_fn(lambda.len(), |i, j| {
        let (li, lj) = (lambda[i], lambda[j]);
        quad_unit(|u| li.powf(u) * lj.powf(1.0 - u))
    })
}

/// The inverse metric by its defining integral,
/// `G_D⁻¹(X) = ∫₀¹ D^u X D^{1−u} du`.
///
/// # Errors
///
/// Dimension mismatch or invalid configuration.
pub fn ginv_oracle(d: &PosDefMatrix, x: &SymMatrix, cfg: &OracleConfig) -> Result<SymMatrix> {
    cfg.validate()?;
    check_dim(d, x)?;
    let kernel = ginv_kernel(d.spectrum().values());
    let xh = d.to_frame(x);
    let scaled = SymMatrix::from_fn(d.n(), |i, j| kernel.get(i, j) * xh.get(i, j));
    Ok(d.from_frame(&scaled))
}

/// Finite-difference step along `z`: `fd_step_rel` of the spectral radius,
/// capped so `D ± h·Z` keeps a comfortable positive-definiteness margin.
fn fd_step(d: &PosDefMatrix, z: &SymMatrix, cfg: &OracleConfig) -> f64 {
    fd_step_for_norm(d, z.frob_norm(), cfg)
}

/// [`fd_step`] for a precomputed direction norm (used when one step must
/// serve a whole family of directions).
fn fd_step_for_norm(d: &PosDefMatrix, norm: f64, cfg: &OracleConfig) -> f64 {
    let base = cfg.fd_step_rel * d.spectrum().max();
    if norm == 0.0 {
        base
    } else {
        base.min(0.25 * d.spectrum().min() / norm)
    }
}

/// Richardson-extrapolated derivative estimate. `eval(s)` must return the
/// central difference quotient at step `s` (as a vector of components);
/// level `k` uses step `h/2^k`, and the triangular extrapolation cancels
/// the `h²`-power error terms level by level.
fn richardson(levels: usize, h: f64, eval: impl Fn(f64) -> Result<Vec<f64>>) -> Result<Vec<f64>> {
    let mut rows: Vec<Vec<f64>> = (0..levels)
        .map(|k| eval(h / f64::powi(2.0, k as i32)))
        .collect::<Result<_>>()?;
    for j in 1..levels {
        let factor = f64::powi(4.0, j as i32);
        for k in 0..levels - j {
            let next: Vec<f64> = rows[k]
                .iter()
                .zip(rows[k + 1].iter())
                .map(|(coarse, fine)| (factor * fine - coarse) / (factor - 1.0))
                .collect();
            rows[k] = next;
        }
    }
    Ok(rows.swap_remove(0))
}

/// Derivative of the metric by central differences of [`g_oracle`] along
/// the curve `D + s·Z`.
///
/// # Errors
///
/// Dimension mismatches, invalid configuration, or quadrature failure.
pub fn dg_fd(
    d: &PosDefMatrix,
    z: &SymMatrix,
    x: &SymMatrix,
    y: &SymMatrix,
    cfg: &OracleConfig,
) -> Result<f64> {
    cfg.validate()?;
    check_dim(d, z)?;
    let h = fd_step(d, z, cfg);
    let out = richardson(cfg.richardson_levels, h, |s| {
        let plus = g_oracle(&d.perturbed(s, z)?, x, y, cfg)?;
        let minus = g_oracle(&d.perturbed(-s, z)?, x, y, cfg)?;
        Ok(vec![(plus - minus) / (2.0 * s)])
    })?;
    Ok(out[0])
}

/// Derivative of the metric by differentiating under the integral sign:
///
/// ```text
/// dG(Z)(X, Y) = −∫₀^∞ tr(A Z A X A Y + A X A Z A Y) dt,   A = (D+t)⁻¹.
/// ```
///
/// # Errors
///
/// Dimension mismatches, invalid configuration, or quadrature failure.
pub fn dg_quadrature(
    d: &PosDefMatrix,
    z: &SymMatrix,
    x: &SymMatrix,
    y: &SymMatrix,
    cfg: &OracleConfig,
) -> Result<f64> {
    cfg.validate()?;
    check_dim(d, z)?;
    check_dim(d, x)?;
    check_dim(d, y)?;
    let zh = d.to_frame(z);
    let xh = d.to_frame(x);
    let yh = d.to_frame(y);
    let lambda = d.spectrum().values().to_vec();
    let mut a = vec![0.0; d.n()];
    let out = quad_semi_infinite_vec(
        move |t, slot| {
            resolvent_diag(&lambda, t, &mut a);
            slot[0] = -(triple_trace(&a, &zh, &xh, &yh) + triple_trace(&a, &xh, &zh, &yh));
        },
        1,
        resolvent_scale(d),
        cfg.quad_tol,
    )?;
    Ok(out[0])
}

/// The Christoffel form recovered from the metric alone: the right-hand
/// sides `½dG(Z_c)(X,Y) − ½dG(X)(Z_c,Y) − ½dG(Y)(X,Z_c)` are integrated
/// for every element `Z_c` of an orthonormal matrix basis in a single
/// adaptive pass, assembled into the covector of `Γ(X,Y)`, and mapped back
/// through [`ginv_oracle`].
///
/// # Errors
///
/// Dimension mismatches, invalid configuration, or quadrature failure.
pub fn christoffel_fd(
    d: &PosDefMatrix,
    x: &SymMatrix,
    y: &SymMatrix,
    cfg: &OracleConfig,
) -> Result<SymMatrix> {
    cfg.validate()?;
    check_dim(d, x)?;
    check_dim(d, y)?;
    let n = d.n();
    let basis = hs_basis(n);
    let basis_hat: Vec<SymMatrix> = basis.iter().map(|b| d.to_frame(b)).collect();
    let xh = d.to_frame(x);
    let yh = d.to_frame(y);
    let lambda = d.spectrum().values().to_vec();
    let mut a = vec![0.0; n];
    // dG(P)(Q, R) has integrand −tr(A P A Q A R + A Q A P A R).
    let rhs = quad_semi_infinite_vec(
        move |t, slot| {
            resolvent_diag(&lambda, t, &mut a);
            for (c, zc) in basis_hat.iter().enumerate() {
                let d_z_xy = -(triple_trace(&a, zc, &xh, &yh) + triple_trace(&a, &xh, zc, &yh));
                let d_x_zy = -(triple_trace(&a, &xh, zc, &yh) + triple_trace(&a, zc, &xh, &yh));
                let d_y_xz = -(triple_trace(&a, &yh, &xh, zc) + triple_trace(&a, &xh, &yh, zc));
                slot[c] = 0.5 * d_z_xy - 0.5 * d_x_zy - 0.5 * d_y_xz;
            }
        },
        basis.len(),
        resolvent_scale(d),
        cfg.quad_tol,
    )?;
    let mut covector = SymMatrix::zeros(n);
    for (coef, b) in rhs.iter().zip(&basis) {
        covector.add_scaled(*coef, b);
    }
    ginv_oracle(d, &covector, cfg)
}

/// Flattens the upper triangle (row-major, `i ≤ j`) for vector-valued
/// difference quotients.
fn sym_to_vec(m: &SymMatrix) -> Vec<f64> {
    let n = m.n();
    let mut out = Vec::with_capacity(n * (n + 1) / 2);
    for i in 0..n {
        for j in i..n {
            out.push(m.get(i, j));
        }
    }
    out
}

fn vec_to_sym(n: usize, v: &[f64]) -> SymMatrix {
    let mut m = SymMatrix::zeros(n);
    let mut idx = 0;
    for i in 0..n {
        for j in i..n {
            m.set_sym(i, j, v[idx]);
            idx += 1;
        }
    }
    m
}

/// Directional derivative of the Christoffel form,
/// `dΓ(W)(U, V) = d/ds Γ_{D+sW}(U, V) |_{s=0}`, by Richardson-extrapolated
/// central differences of [`christoffel_fd`].
fn christoffel_derivative(
    d: &PosDefMatrix,
    w: &SymMatrix,
    u: &SymMatrix,
    v: &SymMatrix,
    cfg: &OracleConfig,
) -> Result<SymMatrix> {
    let h = fd_step(d, w, cfg);
    let flat = richardson(cfg.richardson_levels, h, |s| {
        let plus = christoffel_fd(&d.perturbed(s, w)?, u, v, cfg)?;
        let minus = christoffel_fd(&d.perturbed(-s, w)?, u, v, cfg)?;
        Ok(sym_to_vec(&plus.sub(&minus).scaled(1.0 / (2.0 * s))))
    })?;
    Ok(vec_to_sym(d.n(), &flat))
}

/// The curvature tensor from its four-term expansion,
///
/// ```text
/// R(X,Y)Z = −dΓ(X)(Y,Z) + dΓ(Y)(X,Z) + Γ(X, Γ(Y,Z)) − Γ(Y, Γ(X,Z)),
/// ```
///
/// with every `Γ` an independent [`christoffel_fd`] solve and every `dΓ` a
/// difference quotient of one.
///
/// # Errors
///
/// Dimension mismatches, invalid configuration, or quadrature failure.
pub fn riemann_fd(
    d: &PosDefMatrix,
    x: &SymMatrix,
    y: &SymMatrix,
    z: &SymMatrix,
    cfg: &OracleConfig,
) -> Result<SymMatrix> {
    cfg.validate()?;
    check_dim(d, x)?;
    check_dim(d, y)?;
    check_dim(d, z)?;
    let gamma_yz = christoffel_fd(d, y, z, cfg)?;
    let gamma_xz = christoffel_fd(d, x, z, cfg)?;
    let nested_x = christoffel_fd(d, x, &gamma_yz, cfg)?;
    let nested_y = christoffel_fd(d, y, &gamma_xz, cfg)?;
    let dgamma_x = christoffel_derivative(d, x, y, z, cfg)?;
    let dgamma_y = christoffel_derivative(d, y, x, z, cfg)?;
    let mut r = SymMatrix::zeros(d.n());
    r.add_scaled(-1.0, &dgamma_x);
    r.add_scaled(1.0, &dgamma_y);
    r.add_scaled(1.0, &nested_x);
    r.add_scaled(-1.0, &nested_y);
    Ok(r)
}

/// Scalar second fundamental form of the trace-one submanifold by the
/// single-integral expression
///
/// ```text
/// S(X,Y) = ∫₀^∞ tr(AXAY − ½ D A² X A Y − ½ D A² Y A X) dt,   A = (D+t)⁻¹,
/// ```
///
/// for traceless tangents `X, Y`.
///
/// # Errors
///
/// [`Error::NotTraceless`] for non-traceless arguments, plus the usual
/// dimension/configuration/quadrature failures.
pub fn sff_integral(
    d: &PosDefMatrix,
    x: &SymMatrix,
    y: &SymMatrix,
    cfg: &OracleConfig,
) -> Result<f64> {
    cfg.validate()?;
    check_dim(d, x)?;
    check_dim(d, y)?;
    check_traceless(x)?;
    check_traceless(y)?;
    let xh = d.to_frame(x);
    let yh = d.to_frame(y);
    let lambda = d.spectrum().values().to_vec();
    let n = d.n();
    let mut a = vec![0.0; n];
    let out = quad_semi_infinite_vec(
        move |t, slot| {
            resolvent_diag(&lambda, t, &mut a);
            let mut acc = 0.0;
            for i in 0..n {
                for j in 0..n {
                    let weight =
                        a[i] * a[j] * (1.0 - 0.5 * lambda[i] * a[i] - 0.5 * lambda[j] * a[j]);
                    acc += xh.get(i, j) * yh.get(i, j) * weight;
                }
            }
            slot[0] = acc;
        },
        1,
        resolvent_scale(d),
        cfg.quad_tol,
    )?;
    Ok(out[0])
}

/// Scalar second fundamental form by the double-integral expression
///
/// ```text
/// S(X,Y) = ½ ∫₀¹ ∫₀^∞ tr(D^u A X A Y A D^{1−u} + D^u A Y A X A D^{1−u}) dt du,
/// ```
///
/// with the `u`-integral done by the fixed unit-interval rule and the
/// `t`-integral adaptively.
///
/// # Errors
///
/// Same as [`sff_integral`].
pub fn sff_double_integral(
    d: &PosDefMatrix,
    x: &SymMatrix,
    y: &SymMatrix,
    cfg: &OracleConfig,
) -> Result<f64> {
    cfg.validate()?;
    check_dim(d, x)?;
    check_dim(d, y)?;
    check_traceless(x)?;
    check_traceless(y)?;
    let xh = d.to_frame(x);
    let yh = d.to_frame(y);
    let lambda = d.spectrum().values().to_vec();
    let n = d.n();
    // Powers λ_i^u and λ_i^{1−u} at the unit-interval nodes, precomputed.
    let (nodes, weights) = crate::matcore::gauss_legendre(32);
    let mut pow_u = Vec::with_capacity(nodes.len());
    let mut pow_1mu = Vec::with_capacity(nodes.len());
    let mut w_u = Vec::with_capacity(nodes.len());
    for (x01, w) in nodes.iter().zip(weights) {
        let u = 0.5 * (x01 + 1.0);
        pow_u.push(lambda.iter().map(|l| l.powf(u)).collect::<Vec<f64>>());
        pow_1mu.push(lambda.iter().map(|l| l.powf(1.0 - u)).collect::<Vec<f64>>());
        w_u.push(0.5 * w);
    }
    let mut a = vec![0.0; n];
    let out = quad_semi_infinite_vec(
        move |t, slot| {
            resolvent_diag(&lambda, t, &mut a);
            let mut acc = 0.0;
            for ((du, d1mu), w) in pow_u.iter().zip(&pow_1mu).zip(&w_u) {
                // tr(D^u A X A Y A D^{1−u}) with every factor diagonal
                // except X, Y.
                let mut inner = 0.0;
                for i in 0..n {
                    let outer = du[i] * a[i] * a[i] * d1mu[i];
                    for (j, &aj) in a.iter().enumerate() {
                        inner += outer
                            * aj
                            * (xh.get(i, j) * yh.get(j, i) + yh.get(i, j) * xh.get(j, i));
                    }
                }
                acc += w * 0.5 * inner;
            }
            slot[0] = acc;
        },
        1,
        resolvent_scale(d),
        cfg.quad_tol,
    )?;
    Ok(out[0])
}

/// Per-point table for the submanifold assembly: the point itself plus the
/// operators `dG(A_a)(A_b)` for every basis pair, in ambient coordinates.
struct PointTable {
    point: PosDefMatrix,
    /// `dg_op[pair_index(a,b)]` = the matrix `dG(A_a)(A_b)`.
    dg_op: Vec<SymMatrix>,
}

fn pair_index(a: usize, b: usize) -> usize {
    let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
    hi * (hi + 1) / 2 + lo
}

/// Builds the `dG(A_a)(A_b)` operator table at `point` for the fixed
/// ambient basis `basis`, in one adaptive vector quadrature.
fn dg_table(point: PosDefMatrix, basis: &[SymMatrix], quad_tol: f64) -> Result<PointTable> {
    let n = point.n();
    let nb = basis.len();
    let npair = n * (n + 1) / 2;
    let pairs = nb * (nb + 1) / 2;
    let basis_hat: Vec<SymMatrix> = basis.iter().map(|b| point.to_frame(b)).collect();
    let lambda = point.spectrum().values().to_vec();
    let mut a = vec![0.0; n];
    let flat = quad_semi_infinite_vec(
        |t, slot| {
            resolvent_diag(&lambda, t, &mut a);
            let mut idx = 0;
            for hi in 0..nb {
                for lo in 0..=hi {
                    let (p, q) = (&basis_hat[lo], &basis_hat[hi]);
                    // Frame entries of dG(P)(Q):
                    //   −Σ_j a_i a_j a_k (P_ij Q_jk + Q_ij P_jk).
                    for i in 0..n {
                        for k in i..n {
                            let mut acc = 0.0;
                            for j in 0..n {
                                acc -= a[i]
                                    * a[j]
                                    * a[k]
                                    * (p.get(i, j) * q.get(j, k) + q.get(i, j) * p.get(j, k));
                            }
                            slot[idx] = acc;
                            idx += 1;
                        }
                    }
                }
            }
            debug_assert_eq!(idx, pairs * npair);
        },
        pairs * npair,
        resolvent_scale(&point),
        quad_tol,
    )?;
    let mut dg_op = Vec::with_capacity(pairs);
    for pair in 0..pairs {
        let hat = vec_to_sym(n, &flat[pair * npair..(pair + 1) * npair]);
        dg_op.push(point.from_frame(&hat));
    }
    Ok(PointTable { point, dg_op })
}

/// Metric-orthonormal basis of the traceless symmetric matrices at `d`,
/// built by projecting an orthonormal ambient basis along the base point
/// and Gram–Schmidt-orthonormalizing under the quadrature metric. Exactly
/// one projected vector collapses (the direction along `D` itself) and is
/// dropped.
fn traceless_on_basis(d: &PosDefMatrix, cfg: &OracleConfig) -> Result<Vec<SymMatrix>> {
    let n = d.n();
    let ambient = hs_basis(n);
    let trace_d = d.matrix().trace();
    let projected: Vec<SymMatrix> = ambient
        .iter()
        .map(|b| {
            let mut p = b.clone();
            p.add_scaled(-b.trace() / trace_d, d.matrix());
            p
        })
        .collect();
    let nb = projected.len();
    // Gram matrix of the projected set under the quadrature metric.
    let proj_hat: Vec<SymMatrix> = projected.iter().map(|p| d.to_frame(p)).collect();
    let lambda = d.spectrum().values().to_vec();
    let mut a = vec![0.0; n];
    let gram_flat = quad_semi_infinite_vec(
        |t, slot| {
            resolvent_diag(&lambda, t, &mut a);
            let mut idx = 0;
            for hi in 0..nb {
                for lo in 0..=hi {
                    slot[idx] = pair_trace(&a, &proj_hat[lo], &proj_hat[hi]);
                    idx += 1;
                }
            }
        },
        nb * (nb + 1) / 2,
        resolvent_scale(d),
        cfg.quad_tol,
    )?;
    let gram = |i: usize, j: usize| gram_flat[pair_index(i, j)];
    let inner = |u: &[f64], v: &[f64]| {
        let mut acc = 0.0;
        for (i, ui) in u.iter().enumerate() {
            if *ui == 0.0 {
                continue;
            }
            for (j, vj) in v.iter().enumerate() {
                acc += ui * vj * gram(i, j);
            }
        }
        acc
    };
    // Gram–Schmidt in coefficient space, two orthogonalization passes for
    // numerical orthogonality, dropping the collapsed direction.
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for c in 0..nb {
        let mut coef = vec![0.0; nb];
        coef[c] = 1.0;
        let original = inner(&coef, &coef);
        for _ in 0..2 {
            for row in &rows {
                let overlap = inner(&coef, row);
                for (ci, ri) in coef.iter_mut().zip(row) {
                    *ci -= overlap * ri;
                }
            }
        }
        let norm2 = inner(&coef, &coef);
        if norm2 <= 1e-14 * original {
            continue;
        }
        let scale = norm2.sqrt().recip();
        for ci in coef.iter_mut() {
            *ci *= scale;
        }
        rows.push(coef);
    }
    if rows.len() != nb - 1 {
        return Err(Error::BadBasis(format!(
            "expected {} orthonormal traceless directions, built {}",
            nb - 1,
            rows.len()
        )));
    }
    Ok(rows
        .iter()
        .map(|row| {
            let mut m = SymMatrix::zeros(n);
            for (coef, p) in row.iter().zip(&projected) {
                if *coef != 0.0 {
                    m.add_scaled(*coef, p);
                }
            }
            m
        })
        .collect())
}

/// Applies the base-point inverse metric through a precomputed frame
/// kernel.
fn apply_ginv(d: &PosDefMatrix, kernel: &SymMatrix, x: &SymMatrix) -> SymMatrix {
    let xh = d.to_frame(x);
    let scaled = SymMatrix::from_fn(d.n(), |i, j| kernel.get(i, j) * xh.get(i, j));
    d.from_frame(&scaled)
}

/// Scalar curvature of the trace-one submanifold, assembled entirely from
/// definition-level pieces:
///
/// ```text
/// Scal¹(D) = Σ_{t,s} [ G(R(A_t,A_s)A_t, A_s)
///                      − S(A_t,A_t)S(A_s,A_s) − S(A_t,A_s)² ]
/// ```
///
/// over a metric-orthonormal traceless basis `{A_u}`. The curvature uses
/// the four-term expansion with `Γ` solved from quadrature tables and `dΓ`
/// by Richardson central differences of those tables; `S` uses the
/// single-integral second-fundamental-form expression. Table construction
/// is parallelized; the final contraction runs in a fixed index order, so
/// the result is deterministic.
///
/// # Errors
///
/// [`Error::TraceNotOne`] unless `tr D = 1` to within `1e-8`, plus the
/// usual configuration/quadrature failures.
pub fn scal1_oracle(d: &PosDefMatrix, cfg: &OracleConfig) -> Result<f64> {
    cfg.validate()?;
    let trace = d.matrix().trace();
    if (trace - 1.0).abs() > 1e-8 {
        return Err(Error::TraceNotOne { trace });
    }
    let n = d.n();
    if n == 1 {
        return Ok(0.0);
    }
    let basis = traceless_on_basis(d, cfg)?;
    let nb = basis.len();
    let kernel = ginv_kernel(d.spectrum().values());

    // Base tables: dG operators, the metric operator G(A_u), and the
    // second fundamental form S(A_a, A_b), all in one adaptive pass each.
    let base = dg_table(d.clone(), &basis, cfg.quad_tol)?;
    let basis_hat: Vec<SymMatrix> = basis.iter().map(|b| d.to_frame(b)).collect();
    let lambda = d.spectrum().values().to_vec();
    let pairs = nb * (nb + 1) / 2;
    let mut a = vec![0.0; n];
    let npair_frame = n * (n + 1) / 2;
    let sg_flat = quad_semi_infinite_vec(
        |t, slot| {
            resolvent_diag(&lambda, t, &mut a);
            let mut idx = 0;
            // S(A_a, A_b) for a ≤ b.
            for hi in 0..nb {
                for lo in 0..=hi {
                    let (p, q) = (&basis_hat[lo], &basis_hat[hi]);
                    let mut acc = 0.0;
                    for i in 0..n {
                        for j in 0..n {
                            let weight = a[i]
                                * a[j]
                                * (1.0 - 0.5 * lambda[i] * a[i] - 0.5 * lambda[j] * a[j]);
                            acc += p.get(i, j) * q.get(i, j) * weight;
                        }
                    }
                    slot[idx] = acc;
                    idx += 1;
                }
            }
            // Frame entries of G(A_u) = ∫ A·A_u·A dt.
            for u in basis_hat.iter() {
                for i in 0..n {
                    for k in i..n {
                        slot[idx] = a[i] * u.get(i, k) * a[k];
                        idx += 1;
                    }
                }
            }
        },
        pairs + nb * npair_frame,
        resolvent_scale(d),
        cfg.quad_tol,
    )?;
    let sff = |a_idx: usize, b_idx: usize| sg_flat[pair_index(a_idx, b_idx)];
    let g_op: Vec<SymMatrix> = (0..nb)
        .map(|u| {
            let start = pairs + u * npair_frame;
            d.from_frame(&vec_to_sym(n, &sg_flat[start..start + npair_frame]))
        })
        .collect();

    // Christoffel forms at the base point for every basis pair.
    let gamma_base: Vec<SymMatrix> = base
        .dg_op
        .iter()
        .map(|m| apply_ginv(d, &kernel, m).scaled(-0.5))
        .collect();

    // Γ(A_x, W) for an arbitrary symmetric W, through the linearity of
    // dG(A_x)(·): decompose W into its traceless part (expanded over the
    // orthonormal basis) plus its component along D, where
    // dG(A_x)(D) = −G(A_x) exactly.
    let gamma_general = |x_idx: usize, w: &SymMatrix| -> SymMatrix {
        let gamma_w = w.trace() / trace;
        let mut w0 = w.clone();
        w0.add_scaled(-gamma_w, d.matrix());
        let mut dg_xw = SymMatrix::zeros(n);
        for (b, g_op_b) in g_op.iter().enumerate() {
            let coef = w0.hs_inner(g_op_b);
            if coef != 0.0 {
                dg_xw.add_scaled(coef, &base.dg_op[pair_index(x_idx, b)]);
            }
        }
        dg_xw.add_scaled(-gamma_w, &g_op[x_idx]);
        apply_ginv(d, &kernel, &dg_xw).scaled(-0.5)
    };

    // Perturbed tables for the Christoffel difference quotients: one table
    // per (direction, sign, Richardson level), built in parallel.
    let h = {
        let max_norm = basis.iter().map(SymMatrix::frob_norm).fold(0.0, f64::max);
        fd_step_for_norm(d, max_norm, cfg)
    };
    let levels = cfg.richardson_levels;
    let mut jobs = Vec::new();
    for u in 0..nb {
        for level in 0..levels {
            for sign in [1.0, -1.0] {
                jobs.push((u, level, sign));
            }
        }
    }
    let tables: Vec<((usize, usize, bool), Vec<SymMatrix>)> = jobs
        .par_iter()
        .map(|&(u, level, sign)| {
            let step = sign * h / f64::powi(2.0, level as i32);
            let point = d.perturbed(step, &basis[u])?;
            let kernel_p = ginv_kernel(point.spectrum().values());
            let table = dg_table(point, &basis, cfg.quad_tol)?;
            let gammas: Vec<SymMatrix> = table
                .dg_op
                .iter()
                .map(|m| apply_ginv(&table.point, &kernel_p, m).scaled(-0.5))
                .collect();
            Ok(((u, level, sign > 0.0), gammas))
        })
        .collect::<Result<_>>()?;
    let find = |u: usize, level: usize, positive: bool| {
        &tables
            .iter()
            .find(|(key, _)| *key == (u, level, positive))
            .expect("every perturbation job ran")
            .1
    };

    // dΓ(A_u)(A_a, A_b) by Richardson extrapolation over the table stack.
    let mut dgamma = vec![vec![SymMatrix::zeros(n); pairs]; nb];
    for (u, per_dir) in dgamma.iter_mut().enumerate() {
        for (pair, out) in per_dir.iter_mut().enumerate() {
            let flat = richardson(levels, h, |s| {
                // The table stack holds the exact steps h/2^k, so map the
                // requested step back to its level.
                let level = (h / s).round().log2().round() as usize;
                let plus = &find(u, level, true)[pair];
                let minus = &find(u, level, false)[pair];
                let step = h / f64::powi(2.0, level as i32);
                Ok(sym_to_vec(&plus.sub(minus).scaled(1.0 / (2.0 * step))))
            })?;
            *out = vec_to_sym(n, &flat);
        }
    }

    // Assemble Σ_{t,s} [G(R(A_t,A_s)A_t, A_s) − S_tt S_ss − S_ts²] in a
    // fixed index order.
    let mut total = 0.0;
    for t in 0..nb {
        for s in 0..nb {
            if t != s {
                // R(A_t, A_s)A_t by the four-term expansion.
                let mut r = SymMatrix::zeros(n);
                r.add_scaled(-1.0, &dgamma[t][pair_index(s, t)]);
                r.add_scaled(1.0, &dgamma[s][pair_index(t, t)]);
                r.add_scaled(1.0, &gamma_general(t, &gamma_base[pair_index(s, t)]));
                r.add_scaled(-1.0, &gamma_general(s, &gamma_base[pair_index(t, t)]));
                total += r.hs_inner(&g_op[s]);
            }
            total -= sff(t, t) * sff(s, s) + sff(t, s) * sff(t, s);
        }
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matcore::random::{random_symmetric, random_traceless, rng_from_seed};
    use crate::matcore::{f_unit, Mat, Spectrum};
    use crate::metric::{self, MetricContext, TangentVector};

    fn diag_point(values: &[f64]) -> PosDefMatrix {
        PosDefMatrix::from_spectrum(&Spectrum::new(values.to_vec()).unwrap())
    }

    #[test]
    fn config_validation_rejects_bad_inputs() {
        let mut cfg = OracleConfig::default();
        assert!(cfg.validate().is_ok());
        cfg.fd_step_rel = 1e-10;
        assert!(matches!(cfg.validate(), Err(Error::InvalidConfig(_))));
        cfg = OracleConfig::default();
        cfg.richardson_levels = 5;
        assert!(matches!(cfg.validate(), Err(Error::InvalidConfig(_))));
        cfg = OracleConfig::default();
        cfg.quad_tol = 0.0;
        assert!(matches!(cfg.validate(), Err(Error::InvalidConfig(_))));
    }

    #[test]
    fn g_oracle_at_identity_is_hilbert_schmidt() {
        let cfg = OracleConfig::default();
        let d = diag_point(&[1.0, 1.0, 1.0]);
        let mut rng = rng_from_seed(11);
        let x = random_symmetric(&mut rng, 3, 1.0);
        let y = random_symmetric(&mut rng, 3, 1.0);
        let got = g_oracle(&d, &x, &y, &cfg).unwrap();
        let want = x.hs_inner(&y);
        assert!((got - want).abs() < 1e-9 * want.abs().max(1.0));
    }

    #[test]
    fn g_oracle_reproduces_logarithmic_mean_weights() {
        let cfg = OracleConfig::default();
        let d = diag_point(&[2.0, 1.0]);
        let f = f_unit(2, 0, 1);
        // G(F_01, F_01) = 2·(ln 2 − ln 1)/(2 − 1).
        let got = g_oracle(&d, &f, &f, &cfg).unwrap();
        assert!((got - 2.0 * std::f64::consts::LN_2).abs() < 1e-10);
        // Diagonal direction: G(F_00, F_00) = 4/λ_0.
        let f0 = f_unit(2, 0, 0);
        let got = g_oracle(&d, &f0, &f0, &cfg).unwrap();
        assert!((got - 2.0).abs() < 1e-10);
    }

    #[test]
    fn ginv_oracle_inverts_the_metric() {
        let cfg = OracleConfig::default();
        let mut rng = rng_from_seed(12);
        let d = PosDefMatrix::new(random_spd(&mut rng, 3)).unwrap();
        let x = random_symmetric(&mut rng, 3, 1.0);
        let y = random_symmetric(&mut rng, 3, 1.0);
        let got = g_oracle(&d, &ginv_oracle(&d, &x, &cfg).unwrap(), &y, &cfg).unwrap();
        let want = x.hs_inner(&y);
        assert!((got - want).abs() < 1e-9 * want.abs().max(1.0));
    }

    fn random_spd(rng: &mut impl rand::Rng, n: usize) -> SymMatrix {
        let m = random_symmetric(rng, n, 0.5);
        let mut spd = SymMatrix::symmetric_part(&m.mul(&m));
        for i in 0..n {
            let v = spd.get(i, i) + 0.3;
            spd.set_sym(i, i, v);
        }
        spd
    }

    #[test]
    fn dg_routes_agree() {
        let cfg = OracleConfig::default();
        let mut rng = rng_from_seed(13);
        let d = PosDefMatrix::new(random_spd(&mut rng, 3)).unwrap();
        let z = random_symmetric(&mut rng, 3, 1.0);
        let x = random_symmetric(&mut rng, 3, 1.0);
        let y = random_symmetric(&mut rng, 3, 1.0);
        let fd = dg_fd(&d, &z, &x, &y, &cfg).unwrap();
        let quad = dg_quadrature(&d, &z, &x, &y, &cfg).unwrap();
        assert!(
            (fd - quad).abs() < 1e-6 * quad.abs().max(1.0),
            "fd {fd} vs quadrature {quad}"
        );
    }

    #[test]
    fn dg_quadrature_is_fully_symmetric() {
        let cfg = OracleConfig::default();
        let mut rng = rng_from_seed(14);
        let d = PosDefMatrix::new(random_spd(&mut rng, 3)).unwrap();
        let z = random_symmetric(&mut rng, 3, 1.0);
        let x = random_symmetric(&mut rng, 3, 1.0);
        let y = random_symmetric(&mut rng, 3, 1.0);
        let base = dg_quadrature(&d, &z, &x, &y, &cfg).unwrap();
        let swapped = dg_quadrature(&d, &x, &z, &y, &cfg).unwrap();
        let rotated = dg_quadrature(&d, &y, &x, &z, &cfg).unwrap();
        let scale = base.abs().max(1.0);
        assert!((base - swapped).abs() < 1e-9 * scale);
        assert!((base - rotated).abs() < 1e-9 * scale);
    }

    #[test]
    fn christoffel_fd_halves_the_base_direction() {
        let cfg = OracleConfig::default();
        let mut rng = rng_from_seed(15);
        let d = PosDefMatrix::new(random_spd(&mut rng, 3)).unwrap();
        let x = random_symmetric(&mut rng, 3, 1.0);
        let gamma = christoffel_fd(&d, &x, d.matrix(), &cfg).unwrap();
        assert!(gamma.sub(&x.scaled(0.5)).frob_norm() < 1e-8 * x.frob_norm());
    }

    #[test]
    fn christoffel_fd_matches_closed_form() {
        let cfg = OracleConfig::default();
        let mut rng = rng_from_seed(16);
        let d = PosDefMatrix::new(random_spd(&mut rng, 3)).unwrap();
        let ctx = MetricContext::new(d.clone());
        let x = random_symmetric(&mut rng, 3, 1.0);
        let y = random_symmetric(&mut rng, 3, 1.0);
        let oracle = christoffel_fd(&d, &x, &y, &cfg).unwrap();
        let closed =
            metric::christoffel(&ctx, &TangentVector::new(x), &TangentVector::new(y)).unwrap();
        assert!(
            oracle.sub(closed.matrix()).frob_norm() < 1e-8 * closed.matrix().frob_norm().max(1.0)
        );
    }

    #[test]
    fn riemann_fd_at_scaled_identity() {
        // At D = cI the curvature reduces to −[[X,Y],Z]/(16c²).
        let cfg = OracleConfig::default();
        let c = 0.7;
        let d = diag_point(&[c, c, c]);
        let mut rng = rng_from_seed(17);
        let x = random_symmetric(&mut rng, 3, 1.0);
        let y = random_symmetric(&mut rng, 3, 1.0);
        let z = random_symmetric(&mut rng, 3, 1.0);
        let got = riemann_fd(&d, &x, &y, &z, &cfg).unwrap();
        let (xm, ym, zm) = (x.to_mat(), y.to_mat(), z.to_mat());
        let comm = |p: &Mat, q: &Mat| {
            let pq = p.mul(q);
            let qp = q.mul(p);
            let mut out = Mat::zeros(3);
            for i in 0..3 {
                for j in 0..3 {
                    out[(i, j)] = pq[(i, j)] - qp[(i, j)];
                }
            }
            out
        };
        let want =
            SymMatrix::symmetric_part(&comm(&comm(&xm, &ym), &zm)).scaled(-1.0 / (16.0 * c * c));
        let scale = want.frob_norm().max(1.0);
        assert!(
            got.sub(&want).frob_norm() < 1e-5 * scale,
            "off by {}",
            got.sub(&want).frob_norm() / scale
        );
    }

    #[test]
    fn sff_routes_agree_and_match_half_metric() {
        let cfg = OracleConfig::default();
        let mut rng = rng_from_seed(18);
        let d = PosDefMatrix::new(random_spd(&mut rng, 3)).unwrap();
        let x = random_traceless(&mut rng, 3, 1.0);
        let y = random_traceless(&mut rng, 3, 1.0);
        let single = sff_integral(&d, &x, &y, &cfg).unwrap();
        let double = sff_double_integral(&d, &x, &y, &cfg).unwrap();
        let half_g = 0.5 * g_oracle(&d, &x, &y, &cfg).unwrap();
        let scale = half_g.abs().max(1.0);
        assert!((single - half_g).abs() < 1e-8 * scale);
        assert!((double - single).abs() < 1e-8 * scale);
    }

    #[test]
    fn sff_rejects_tangents_with_trace() {
        let cfg = OracleConfig::default();
        let d = diag_point(&[0.5, 0.3, 0.2]);
        let x = SymMatrix::identity(3);
        assert!(matches!(
            sff_integral(&d, &x, &x, &cfg),
            Err(Error::NotTraceless { .. })
        ));
    }

    #[test]
    fn scal1_oracle_rejects_wrong_trace() {
        let cfg = OracleConfig::default();
        let d = diag_point(&[1.0, 1.0]);
        assert!(matches!(
            scal1_oracle(&d, &cfg),
            Err(Error::TraceNotOne { .. })
        ));
    }

    #[test]
    fn scal1_oracle_uniform_two_level_value() {
        let cfg = OracleConfig::default();
        let d = diag_point(&[0.5, 0.5]);
        let got = scal1_oracle(&d, &cfg).unwrap();
        assert!((got + 1.0).abs() < 1e-6, "got {got}");
    }

    #[test]
    fn scal1_oracle_uniform_three_level_value() {
        let cfg = OracleConfig::default();
        let d = diag_point(&[1.0 / 3.0; 3]);
        let got = scal1_oracle(&d, &cfg).unwrap();
        let want = -75.0 / 16.0;
        assert!((got - want).abs() < 1e-5 * want.abs(), "got {got}");
    }
}
