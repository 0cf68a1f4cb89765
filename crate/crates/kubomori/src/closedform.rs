//! Eigenvalue-only closed forms for the scalar curvature of the trace-one
//! submanifold.
//!
//! Over the structured orthonormal basis of the trace-one tangent space
//! (traceless diagonal directions first, then pair directions; see
//! [`OrthonormalBasis::trace_one_km`]) the scalar-curvature double sum
//! splits into blocks according to which kinds of basis element meet:
//!
//! * both pair directions — [`offdiag_offdiag_term`];
//! * one diagonal and one pair direction, in either order — together twice
//!   [`q_term`];
//! * both diagonal directions — exactly zero, because commuting directions
//!   through a diagonal point are flat;
//! * the two second-fundamental-form products — spectrum-independent
//!   constants returned by [`validated_term_constants`].
//!
//! Each block reduces to finite sums of the pair and triple mean
//! coefficients of a [`MeanTable`], so the full curvature costs `O(n³)`
//! once the spectrum is known. [`scal1_closed`] assembles the blocks into
//! a [`CurvatureReport`] whose `total_assembled` matches both the basis
//! double sum of [`scal_submanifold`] and the finite-difference evaluator
//! of [`crate::oracle`]; that agreement is what makes the assembled total
//! authoritative.
//!
//! # Reference variants
//!
//! Two historically circulated reductions of these blocks are kept
//! alongside the validated ones because existing fixtures pin them and
//! because their deviation is itself a regression-worthy fact:
//!
//! * [`second_third_terms`] halves the cross part of the form-product
//!   block; it differs from [`validated_term_constants`] by exactly
//!   `n(n−1)²/8`.
//! * [`offdiag_offdiag_term_reference`] flips the sign of the triple-mean
//!   part and adds two spurious pair sums; only [`offdiag_offdiag_term`]
//!   reproduces the curvature double sum.
//! * [`final_formula_total`] evaluates a single merged eigenvalue formula
//!   whose inverse-eigenvalue coefficient and tail constant are
//!   inconsistent with the blocks; [`final_formula_gap`] returns its
//!   deviation from the assembled total in closed form, exact to roundoff.
//!
//! None of the reference variants feed [`scal1_closed`]'s assembled total.
//!
//! [`OrthonormalBasis::trace_one_km`]: crate::curvature::OrthonormalBasis::trace_one_km
//! [`scal_submanifold`]: crate::curvature::scal_submanifold

use crate::logmeans::MeanTable;
use crate::matcore::Spectrum;
use crate::{Error, Result};

/// Largest `|tr − 1|` accepted by [`scal1_closed`].
const TRACE_ONE_TOL: f64 = 1e-12;

/// Term-by-term closed-form evaluation of the trace-one scalar curvature
/// at one spectrum, produced by [`scal1_closed`].
///
/// `total_assembled` is always the exact sum of the five term fields, and
/// `term_diag_diag` is zero by construction. `total_final_formula` is the
/// merged single-formula variant; it deviates from `total_assembled` by
/// [`final_formula_gap`].
#[derive(Clone, Debug)]
pub struct CurvatureReport {
    /// The spectrum the report was evaluated at (descending order).
    pub spectrum: Spectrum,
    /// Curvature block over pairs of off-diagonal basis directions.
    pub term_offdiag_offdiag: f64,
    /// Curvature block over mixed diagonal/off-diagonal pairs: `2 · q_term`.
    pub term_q_twice: f64,
    /// Curvature block over pairs of diagonal directions; identically zero.
    pub term_diag_diag: f64,
    /// Form-product block `−Σ_{t,s} S_tt S_ss`; spectrum-independent.
    pub term_second: f64,
    /// Form-product block `−Σ_{t,s} S_ts S_st`; spectrum-independent.
    pub term_third: f64,
    /// Sum of the five term fields; the authoritative total.
    pub total_assembled: f64,
    /// The merged single-formula evaluation of the same quantity.
    pub total_final_formula: f64,
}

/// Sums over strictly increasing index triples `u < v < w` of the two
/// triple-mean kernels: `T = Σ m_uvw² / (m_uv m_vw m_uw)` and the cyclic
/// kernel `M` built from repeated-index triple means.
fn triple_sums(mt: &MeanTable) -> (f64, f64) {
    let n = mt.n();
    let mut t_sum = 0.0;
    let mut m_sum = 0.0;
    for u in 0..n {
        for v in (u + 1)..n {
            for w in (v + 1)..n {
                let muv = mt.m2(u, v);
                let mvw = mt.m2(v, w);
                let muw = mt.m2(u, w);
                let muvw = mt.m3(u, v, w);
                t_sum += muvw * muvw / (muv * mvw * muw);
                m_sum += mt.m3(u, u, v) * mt.m3(u, u, w) / (mt.m2(u, u) * muv * muw)
                    + mt.m3(v, v, u) * mt.m3(v, v, w) / (mt.m2(v, v) * muv * mvw)
                    + mt.m3(w, w, u) * mt.m3(w, w, v) / (mt.m2(w, w) * muw * mvw);
            }
        }
    }
    (t_sum, m_sum)
}

/// Sums over index pairs `i < j` of the two repeated-index pair kernels:
/// `P_a = Σ m_iij² / (m_ij² m_ii)` and `P_b = Σ m_ijj² / (m_ij² m_jj)`.
fn pair_sums(mt: &MeanTable) -> (f64, f64) {
    let n = mt.n();
    let mut p_a = 0.0;
    let mut p_b = 0.0;
    for i in 0..n {
        for j in (i + 1)..n {
            let mij2 = mt.m2(i, j) * mt.m2(i, j);
            let miij = mt.m3(i, i, j);
            let mijj = mt.m3(i, j, j);
            p_a += miij * miij / (mij2 * mt.m2(i, i));
            p_b += mijj * mijj / (mij2 * mt.m2(j, j));
        }
    }
    (p_a, p_b)
}

/// The mixed diagonal/off-diagonal curvature block, counted once.
///
/// Literal evaluation of
///
/// ```text
/// Q = − Σ_{k,l} m_kkl² λ_k / (4 m_kl²)
///     − (1/16) Σ_i 1/λ_i
///     + Σ_{k,l} (m_kkl + m_kll) / (8 m_kl)
/// ```
///
/// with both double sums running over **all** ordered pairs `(k, l)`,
/// including `k = l`. The diagonal pairs are what make the formula smooth
/// through eigenvalue collisions: at the uniform spectrum `(1/n, …, 1/n)`
/// the value is `n²(n−1)/16`, and for a single eigenvalue the three parts
/// cancel to exactly zero.
///
/// [`q_term_basis`] evaluates the same block from explicit diagonal
/// coefficient vectors; the two agree for any orthonormal choice.
pub fn q_term(s: &Spectrum, mt: &MeanTable) -> f64 {
    let n = s.n();
    debug_assert_eq!(mt.n(), n, "mean table built for a different spectrum");
    let lambda = s.values();
    let mut quad = 0.0;
    let mut lin = 0.0;
    for (k, &lk) in lambda.iter().enumerate() {
        for l in 0..n {
            let mkl = mt.m2(k, l);
            let mkkl = mt.m3(k, k, l);
            let mkll = mt.m3(k, l, l);
            quad += mkkl * mkkl * lk / (4.0 * mkl * mkl);
            lin += (mkkl + mkll) / (8.0 * mkl);
        }
    }
    let inv: f64 = lambda.iter().map(|&l| 1.0 / l).sum();
    -quad - inv / 16.0 + lin
}

/// The mixed block of [`q_term`] evaluated from explicit coefficient
/// vectors for the traceless diagonal directions.
///
/// Each `a` in `basis` lists the diagonal entries of one direction, and the
/// sum
///
/// ```text
/// Σ_a Σ_{k<l} [ −(m_kkl a_k + m_kll a_l)² / (4 m_kl²)
///              + (m_kkl a_k²/λ_k + m_kll a_l²/λ_l) / (4 m_kl) ]
/// ```
///
/// is basis-independent: any orthonormal set spanning the traceless
/// diagonal slice (for example [`diagonal_coefficient_basis`], or any
/// orthogonal recombination of it) produces the value of [`q_term`].
///
/// [`diagonal_coefficient_basis`]: crate::curvature::diagonal_coefficient_basis
pub fn q_term_basis(s: &Spectrum, mt: &MeanTable, basis: &[Vec<f64>]) -> f64 {
    let n = s.n();
    debug_assert_eq!(mt.n(), n, "mean table built for a different spectrum");
    let lambda = s.values();
    let mut acc = 0.0;
    for a in basis {
        debug_assert_eq!(a.len(), n, "coefficient vector has wrong length");
        for k in 0..n {
            for l in (k + 1)..n {
                let mkl = mt.m2(k, l);
                let mkkl = mt.m3(k, k, l);
                let mkll = mt.m3(k, l, l);
                let lin = mkkl * a[k] + mkll * a[l];
                acc -= lin * lin / (4.0 * mkl * mkl);
                acc +=
                    (mkkl * a[k] * a[k] / lambda[k] + mkll * a[l] * a[l] / lambda[l]) / (4.0 * mkl);
            }
        }
    }
    acc
}

/// The curvature block over pairs of off-diagonal basis directions:
/// `−(3/4) T + (1/2) M` with `T`, `M` the triple sums of [`triple_sums`].
///
/// This is the variant that reproduces the basis double sum
/// `Σ_{t,s} g(R(A_t, A_s) A_t, A_s)` restricted to off-diagonal `t, s`
/// (both orders counted). It vanishes identically for `n ≤ 2`, where no
/// index triple exists, and equals `9/16` at the uniform spectrum for
/// `n = 3`.
pub fn offdiag_offdiag_term(s: &Spectrum, mt: &MeanTable) -> f64 {
    debug_assert_eq!(mt.n(), s.n(), "mean table built for a different spectrum");
    let (t_sum, m_sum) = triple_sums(mt);
    -0.75 * t_sum + 0.5 * m_sum
}

/// Reference variant of [`offdiag_offdiag_term`]:
/// `(3/4) T + (1/2) M + (3/8)(P_a + P_b)`.
///
/// Kept visible because fixtures pin it (it evaluates to `3/8` at the
/// spectrum `(1/2, 1/2)`), but it does **not** reproduce the curvature
/// double sum: relative to the validated block it flips the sign of the
/// `T` part and adds the two pair sums. Never used by [`scal1_closed`].
pub fn offdiag_offdiag_term_reference(s: &Spectrum, mt: &MeanTable) -> f64 {
    debug_assert_eq!(mt.n(), s.n(), "mean table built for a different spectrum");
    let (t_sum, m_sum) = triple_sums(mt);
    let (p_a, p_b) = pair_sums(mt);
    0.75 * t_sum + 0.5 * m_sum + 0.375 * (p_a + p_b)
}

/// Reference constants for the two form-product blocks:
///
/// ```text
/// second = − n²(n−1)²/16 − 2·n(n−1)²/16 − (n−1)²/4
/// third  = − (n−1)/4 − n(n−1)/8
/// ```
///
/// `third` agrees with the validated value. `second` halves the cross part
/// of the block and therefore exceeds the validated value by exactly
/// `n(n−1)²/8`; see [`validated_term_constants`] for the pair consistent
/// with the tensor contraction. Examples: `(0, 0)` for `n = 1`,
/// `(−3/4, −1/2)` for `n = 2`, `(−19/4, −5/4)` for `n = 3`.
pub fn second_third_terms(n: usize) -> (f64, f64) {
    let nf = n as f64;
    let second = -nf * nf * (nf - 1.0) * (nf - 1.0) / 16.0
        - 2.0 * nf * (nf - 1.0) * (nf - 1.0) / 16.0
        - (nf - 1.0) * (nf - 1.0) / 4.0;
    let third = -(nf - 1.0) / 4.0 - nf * (nf - 1.0) / 8.0;
    (second, third)
}

/// The two form-product blocks as the tensor contraction produces them.
///
/// On any orthonormal basis of the trace-one tangent space the second
/// fundamental form is `S(A_t, A_s) = δ_ts / 2`, so with
/// `N = n − 1 + n(n−1)/2` directions:
///
/// ```text
/// second = − Σ_{t,s} S_tt S_ss = − N²/4 = − (n−1)²(n+2)²/16
/// third  = − Σ_{t,s} S_ts S_st = − N/4  = − (n−1)/4 − n(n−1)/8
/// ```
///
/// These are the constants [`scal1_closed`] assembles with; they make the
/// assembled total agree with the basis double sum and the
/// finite-difference evaluator.
pub fn validated_term_constants(n: usize) -> (f64, f64) {
    let nf = n as f64;
    let second = -(nf - 1.0) * (nf - 1.0) * (nf + 2.0) * (nf + 2.0) / 16.0;
    let third = -(nf - 1.0) / 4.0 - nf * (nf - 1.0) / 8.0;
    (second, third)
}

/// The merged single-formula evaluation of the trace-one scalar curvature:
///
/// ```text
/// F = (3/4) T + (1/2) M
///     − (1/16) Σ_{k,l} (m_kkl² λ_k + m_kll² λ_l) / m_kl²
///     − (13/2) Σ_i 1/λ_i
///     + Σ_{k,l} (m_kkl + m_kll) / (4 m_kl)
///     + n(n−1)(n² − n + 1)/4
/// ```
///
/// with the double sums over all ordered pairs including `k = l`. The
/// formula is evaluated literally; its `−13/2` coefficient and tail
/// constant are inconsistent with the assembled blocks, so `F` deviates
/// from [`scal1_closed`]'s `total_assembled` by [`final_formula_gap`].
pub fn final_formula_total(s: &Spectrum, mt: &MeanTable) -> f64 {
    let n = s.n();
    debug_assert_eq!(mt.n(), n, "mean table built for a different spectrum");
    let lambda = s.values();
    let (t_sum, m_sum) = triple_sums(mt);
    let mut quad = 0.0;
    let mut lin = 0.0;
    for k in 0..n {
        for l in 0..n {
            let mkl = mt.m2(k, l);
            let mkkl = mt.m3(k, k, l);
            let mkll = mt.m3(k, l, l);
            quad += (mkkl * mkkl * lambda[k] + mkll * mkll * lambda[l]) / (mkl * mkl);
            lin += (mkkl + mkll) / (4.0 * mkl);
        }
    }
    let inv: f64 = lambda.iter().map(|&l| 1.0 / l).sum();
    let nf = n as f64;
    0.75 * t_sum + 0.5 * m_sum - quad / 16.0 - 6.5 * inv
        + lin
        + nf * (nf - 1.0) * (nf * nf - nf + 1.0) / 4.0
}

/// Closed form of the deviation `final_formula_total − total_assembled`:
///
/// ```text
/// Δ = (3/2) T
///     + (3/16) Σ_{k,l} (m_kkl² λ_k + m_kll² λ_l) / m_kl²
///     − (51/8) Σ_i 1/λ_i
///     + n(n−1)(5n² − n + 6)/16
/// ```
///
/// Derived by subtracting the assembled blocks from the merged formula
/// term by term; tests hold the identity `F − A = Δ` to roundoff. At the
/// uniform spectrum this is `−87/4` for `n = 2` and `−1143/32` for
/// `n = 3`.
pub fn final_formula_gap(s: &Spectrum, mt: &MeanTable) -> f64 {
    let n = s.n();
    debug_assert_eq!(mt.n(), n, "mean table built for a different spectrum");
    let lambda = s.values();
    let (t_sum, _) = triple_sums(mt);
    let mut quad = 0.0;
    for k in 0..n {
        for l in 0..n {
            let mkl = mt.m2(k, l);
            let mkkl = mt.m3(k, k, l);
            let mkll = mt.m3(k, l, l);
            quad += (mkkl * mkkl * lambda[k] + mkll * mkll * lambda[l]) / (mkl * mkl);
        }
    }
    let inv: f64 = lambda.iter().map(|&l| 1.0 / l).sum();
    let nf = n as f64;
    1.5 * t_sum + 3.0 * quad / 16.0 - 51.0 * inv / 8.0
        + nf * (nf - 1.0) * (5.0 * nf * nf - nf + 6.0) / 16.0
}

/// Evaluates every closed-form block at a trace-one spectrum and returns
/// the full [`CurvatureReport`].
///
/// The assembled total uses [`offdiag_offdiag_term`], twice [`q_term`],
/// the zero diagonal block, and [`validated_term_constants`]; the report
/// also carries [`final_formula_total`] so both totals stay comparable.
/// The fields depend only on the sorted eigenvalues, so permutations of
/// the same spectrum produce identical reports.
///
/// # Errors
///
/// [`Error::TraceNotOne`] when the spectrum does not sum to `1` within
/// `1e-12`.
pub fn scal1_closed(s: &Spectrum) -> Result<CurvatureReport> {
    let trace = s.trace();
    if (trace - 1.0).abs() > TRACE_ONE_TOL {
        return Err(Error::TraceNotOne { trace });
    }
    let mt = MeanTable::new(s);
    let term_offdiag_offdiag = offdiag_offdiag_term(s, &mt);
    let term_q_twice = 2.0 * q_term(s, &mt);
    let term_diag_diag = 0.0;
    let (term_second, term_third) = validated_term_constants(s.n());
    let total_assembled =
        term_offdiag_offdiag + term_q_twice + term_diag_diag + term_second + term_third;
    let total_final_formula = final_formula_total(s, &mt);
    Ok(CurvatureReport {
        spectrum: s.clone(),
        term_offdiag_offdiag,
        term_q_twice,
        term_diag_diag,
        term_second,
        term_third,
        total_assembled,
        total_final_formula,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curvature::{
        self, diagonal_coefficient_basis, riemann, scal_submanifold, second_fundamental,
        OrthonormalBasis,
    };
    use crate::matcore::random::{random_orthogonal, random_simplex_spectrum, rng_from_seed};
    use crate::metric::{g, MetricContext, TangentVector};

    fn assert_close(got: f64, want: f64, tol: f64) {
        assert!(
            (got - want).abs() <= tol * want.abs().max(1.0),
            "got {got}, want {want}"
        );
    }

    fn uniform(n: usize) -> Spectrum {
        Spectrum::new(vec![1.0 / n as f64; n]).unwrap()
    }

    #[test]
    fn q_term_hits_its_uniform_closed_form() {
        for n in 1..=6 {
            let s = uniform(n);
            let mt = MeanTable::new(&s);
            let nf = n as f64;
            assert_close(q_term(&s, &mt), nf * nf * (nf - 1.0) / 16.0, 1e-12);
        }
    }

    #[test]
    fn q_term_matches_the_two_eigenvalue_example() {
        let s = Spectrum::new(vec![0.5, 0.5]).unwrap();
        let mt = MeanTable::new(&s);
        assert_close(q_term(&s, &mt), 0.25, 1e-14);
    }

    #[test]
    fn q_term_equals_its_basis_form_for_any_orthonormal_respelling() {
        let mut rng = rng_from_seed(71);
        for n in 2..=5 {
            let s = random_simplex_spectrum(&mut rng, n, 1e-3);
            let mt = MeanTable::new(&s);
            let want = q_term(&s, &mt);
            let basis = diagonal_coefficient_basis(s.values()).unwrap();
            assert_close(q_term_basis(&s, &mt, &basis), want, 1e-10);
            // Any orthogonal recombination of the coefficient vectors spans
            // the same slice and must leave the block sum unchanged.
            let m = basis.len();
            for _ in 0..10 {
                let o = random_orthogonal(&mut rng, m);
                let mixed: Vec<Vec<f64>> = (0..m)
                    .map(|t| {
                        (0..n)
                            .map(|i| (0..m).map(|u| o[(t, u)] * basis[u][i]).sum())
                            .collect()
                    })
                    .collect();
                assert_close(q_term_basis(&s, &mt, &mixed), want, 1e-10);
            }
        }
    }

    #[test]
    fn diagonal_coefficient_vectors_satisfy_the_completeness_relation() {
        // For a trace-one spectrum the orthonormal traceless diagonal
        // directions satisfy Σ_t a_k a_l = λ_k δ_kl − λ_k λ_l.
        let mut rng = rng_from_seed(72);
        for n in 2..=5 {
            let s = random_simplex_spectrum(&mut rng, n, 1e-3);
            let lambda = s.values();
            let basis = diagonal_coefficient_basis(lambda).unwrap();
            for k in 0..n {
                for l in 0..n {
                    let got: f64 = basis.iter().map(|a| a[k] * a[l]).sum();
                    let want = if k == l { lambda[k] } else { 0.0 } - lambda[k] * lambda[l];
                    assert!((got - want).abs() < 1e-10, "({k},{l}): {got} vs {want}");
                }
            }
        }
    }

    #[test]
    fn q_term_summation_identities_hold() {
        // The two eigenvalue-only identities the quadratic and linear parts
        // of the mixed block rest on, checked against explicit coefficient
        // vectors via the completeness relation.
        let mut rng = rng_from_seed(73);
        for n in 2..=5 {
            let s = random_simplex_spectrum(&mut rng, n, 1e-3);
            let lambda = s.values();
            let mt = MeanTable::new(&s);
            let basis = diagonal_coefficient_basis(lambda).unwrap();
            let inv: f64 = lambda.iter().map(|&l| 1.0 / l).sum();
            let nf2 = (n * n) as f64;

            let mut quad_basis = 0.0;
            let mut lin_basis = 0.0;
            for a in &basis {
                for k in 0..n {
                    for l in 0..n {
                        let mkl = mt.m2(k, l);
                        let one = mt.m3(k, k, l) * a[k] + mt.m3(k, l, l) * a[l];
                        quad_basis += one * one / (mkl * mkl);
                        lin_basis += (mt.m3(k, k, l) * a[k] * a[k] / lambda[k]
                            + mt.m3(k, l, l) * a[l] * a[l] / lambda[l])
                            / mkl;
                    }
                }
            }

            let mut quad_closed = 0.0;
            let mut lin_closed = 0.0;
            for (k, &lk) in lambda.iter().enumerate() {
                for l in 0..n {
                    let mkl = mt.m2(k, l);
                    quad_closed += mt.m3(k, k, l) * mt.m3(k, k, l) * lk / (mkl * mkl);
                    lin_closed += (mt.m3(k, k, l) + mt.m3(k, l, l)) / mkl;
                }
            }

            assert_close(quad_basis, 2.0 * quad_closed + 0.5 * inv - nf2, 1e-9);
            assert_close(lin_basis, lin_closed - nf2, 1e-9);
        }
    }

    #[test]
    fn form_product_constants_match_their_pins() {
        assert_eq!(second_third_terms(1), (0.0, 0.0));
        assert_eq!(second_third_terms(2), (-0.75, -0.5));
        assert_eq!(second_third_terms(3), (-4.75, -1.25));
        assert_eq!(validated_term_constants(1), (0.0, 0.0));
        assert_eq!(validated_term_constants(2), (-1.0, -0.5));
        assert_eq!(validated_term_constants(3), (-6.25, -1.25));
        for n in 1..=8 {
            let nf = n as f64;
            let (ref_second, ref_third) = second_third_terms(n);
            let (val_second, val_third) = validated_term_constants(n);
            // The reference second constant halves the cross part.
            assert_close(
                ref_second - val_second,
                nf * (nf - 1.0) * (nf - 1.0) / 8.0,
                1e-12,
            );
            assert_eq!(ref_third, val_third);
        }
    }

    #[test]
    fn form_product_constants_match_the_second_fundamental_form() {
        // Rebuild both blocks from S-values over an explicit basis.
        let mut rng = rng_from_seed(74);
        for n in 2..=4 {
            let s = random_simplex_spectrum(&mut rng, n, 1e-3);
            let ctx = MetricContext::from_spectrum(&s);
            let basis = OrthonormalBasis::trace_one_km(&ctx).unwrap();
            let elems = basis.elements();
            let count = elems.len();
            let mut table = vec![0.0; count * count];
            for t in 0..count {
                for u in t..count {
                    let v = second_fundamental(&ctx, &elems[t], &elems[u]).unwrap();
                    table[t * count + u] = v;
                    table[u * count + t] = v;
                }
            }
            let mut second = 0.0;
            let mut third = 0.0;
            for t in 0..count {
                for u in 0..count {
                    second -= table[t * count + t] * table[u * count + u];
                    third -= table[t * count + u] * table[u * count + t];
                }
            }
            let (val_second, val_third) = validated_term_constants(n);
            assert_close(second, val_second, 1e-10);
            assert_close(third, val_third, 1e-10);
        }
    }

    #[test]
    fn offdiag_term_hits_its_pins() {
        let mut rng = rng_from_seed(75);
        let s2 = random_simplex_spectrum(&mut rng, 2, 1e-3);
        let mt2 = MeanTable::new(&s2);
        assert_eq!(offdiag_offdiag_term(&s2, &mt2), 0.0);

        let s3 = uniform(3);
        let mt3 = MeanTable::new(&s3);
        assert_close(offdiag_offdiag_term(&s3, &mt3), 9.0 / 16.0, 1e-12);

        let half = Spectrum::new(vec![0.5, 0.5]).unwrap();
        let mth = MeanTable::new(&half);
        assert_close(offdiag_offdiag_term_reference(&half, &mth), 0.375, 1e-14);
    }

    #[test]
    fn curvature_blocks_match_the_basis_double_sums() {
        // Restrict Σ_{t,s} g(R(A_t, A_s) A_t, A_s) to each block of the
        // structured basis and compare with the closed forms.
        let mut rng = rng_from_seed(76);
        for n in 2..=4 {
            let s = random_simplex_spectrum(&mut rng, n, 1e-3);
            let mt = MeanTable::new(&s);
            let ctx = MetricContext::from_spectrum(&s);
            let basis = OrthonormalBasis::trace_one_km(&ctx).unwrap();
            let (diag_count, _) = basis.split().unwrap();
            let elems = basis.elements();

            let pair_sum = |ts: &[&TangentVector], ss: &[&TangentVector]| -> f64 {
                let mut acc = 0.0;
                for t in ts {
                    for u in ss {
                        let r = riemann(&ctx, t, u, t).unwrap();
                        acc += g(&ctx, &r, u).unwrap();
                    }
                }
                acc
            };
            let diag: Vec<&TangentVector> = elems[..diag_count].iter().collect();
            let offd: Vec<&TangentVector> = elems[diag_count..].iter().collect();

            let oo = pair_sum(&offd, &offd);
            assert_close(oo, offdiag_offdiag_term(&s, &mt), 1e-9);

            let mixed = pair_sum(&diag, &offd) + pair_sum(&offd, &diag);
            assert_close(mixed, 2.0 * q_term(&s, &mt), 1e-9);

            let dd = pair_sum(&diag, &diag);
            assert!(dd.abs() < 1e-10, "diagonal block should vanish, got {dd}");
        }
    }

    #[test]
    fn report_assembles_to_the_basis_double_sum() {
        let mut rng = rng_from_seed(77);
        for n in 2..=4 {
            for _ in 0..2 {
                let s = random_simplex_spectrum(&mut rng, n, 1e-3);
                let report = scal1_closed(&s).unwrap();
                assert_eq!(
                    report.total_assembled,
                    report.term_offdiag_offdiag
                        + report.term_q_twice
                        + report.term_diag_diag
                        + report.term_second
                        + report.term_third
                );
                assert_eq!(report.term_diag_diag, 0.0);

                let ctx = MetricContext::from_spectrum(&s);
                let basis = OrthonormalBasis::trace_one_km(&ctx).unwrap();
                let direct = scal_submanifold(&ctx, &basis).unwrap();
                assert_close(report.total_assembled, direct.value, 1e-10);
            }
        }
    }

    #[test]
    fn report_hits_the_uniform_rational_pins() {
        let r2 = scal1_closed(&uniform(2)).unwrap();
        assert_close(r2.term_offdiag_offdiag, 0.0, 1e-14);
        assert_close(r2.term_q_twice, 0.5, 1e-13);
        assert_eq!(r2.term_diag_diag, 0.0);
        assert_eq!(r2.term_second, -1.0);
        assert_eq!(r2.term_third, -0.5);
        assert_close(r2.total_assembled, -1.0, 1e-12);
        assert_close(r2.total_final_formula, -22.75, 1e-12);

        let r3 = scal1_closed(&uniform(3)).unwrap();
        assert_close(r3.term_offdiag_offdiag, 9.0 / 16.0, 1e-12);
        assert_close(r3.term_q_twice, 9.0 / 4.0, 1e-12);
        assert_eq!(r3.term_second, -6.25);
        assert_eq!(r3.term_third, -1.25);
        assert_close(r3.total_assembled, -75.0 / 16.0, 1e-12);
        assert_close(r3.total_final_formula, -1293.0 / 32.0, 1e-12);
    }

    #[test]
    fn merged_formula_gap_is_exact() {
        let mut rng = rng_from_seed(78);
        for n in 1..=5 {
            for _ in 0..3 {
                let s = random_simplex_spectrum(&mut rng, n, 1e-3);
                let mt = MeanTable::new(&s);
                let report = scal1_closed(&s).unwrap();
                let gap = final_formula_gap(&s, &mt);
                let scale = report
                    .total_final_formula
                    .abs()
                    .max(report.total_assembled.abs())
                    .max(1.0);
                assert!(
                    (report.total_final_formula - report.total_assembled - gap).abs()
                        <= 1e-9 * scale,
                    "n = {n}: gap identity violated"
                );
            }
        }
        let mt2 = MeanTable::new(&uniform(2));
        assert_close(final_formula_gap(&uniform(2), &mt2), -21.75, 1e-12);
        let mt3 = MeanTable::new(&uniform(3));
        assert_close(final_formula_gap(&uniform(3), &mt3), -1143.0 / 32.0, 1e-12);
    }

    #[test]
    fn report_is_permutation_invariant() {
        let a = Spectrum::new(vec![0.5, 0.3, 0.2]).unwrap();
        let b = Spectrum::new(vec![0.2, 0.5, 0.3]).unwrap();
        let ra = scal1_closed(&a).unwrap();
        let rb = scal1_closed(&b).unwrap();
        assert_eq!(ra.spectrum.values(), rb.spectrum.values());
        assert_eq!(ra.term_offdiag_offdiag, rb.term_offdiag_offdiag);
        assert_eq!(ra.term_q_twice, rb.term_q_twice);
        assert_eq!(ra.total_assembled, rb.total_assembled);
        assert_eq!(ra.total_final_formula, rb.total_final_formula);
    }

    #[test]
    fn report_rejects_spectra_off_the_trace_one_slice() {
        let off = Spectrum::new(vec![1.0, 0.5]).unwrap();
        assert!(matches!(scal1_closed(&off), Err(Error::TraceNotOne { .. })));
        let near = Spectrum::new(vec![0.5, 0.5 + 1e-9]).unwrap();
        assert!(matches!(
            scal1_closed(&near),
            Err(Error::TraceNotOne { .. })
        ));
        let within = Spectrum::new(vec![0.5, 0.5 + 5e-13]).unwrap();
        assert!(scal1_closed(&within).is_ok());
    }

    #[test]
    fn totals_vary_continuously_through_eigenvalue_collision() {
        // Along (1/2 + ε, 1/2 − ε) the assembled total behaves like
        // −1 + (16/9) ε² near the collision; there must be no jump where
        // the mean coefficients switch to their series branches.
        let total = |eps: f64| {
            let s = Spectrum::new(vec![0.5 + eps, 0.5 - eps]).unwrap();
            scal1_closed(&s).unwrap()
        };
        let quadratic = |eps: f64| -1.0 + 16.0 / 9.0 * eps * eps;
        for &eps in &[1e-3, 1e-5, 1e-7] {
            let r = total(eps);
            assert!(
                (r.total_assembled - quadratic(eps)).abs() < 1e-8,
                "eps = {eps}: {} vs {}",
                r.total_assembled,
                quadratic(eps)
            );
        }
        let at_zero = total(0.0);
        let near_zero = total(1e-7);
        assert!(
            (near_zero.total_final_formula - at_zero.total_final_formula).abs() < 1e-6,
            "merged formula jumps at the collision"
        );
    }

    #[test]
    fn single_eigenvalue_reports_are_flat() {
        let r = scal1_closed(&Spectrum::new(vec![1.0]).unwrap()).unwrap();
        assert_eq!(r.term_offdiag_offdiag, 0.0);
        assert!(r.term_q_twice.abs() < 1e-15);
        assert_eq!(r.term_second, 0.0);
        assert_eq!(r.term_third, 0.0);
        assert!(r.total_assembled.abs() < 1e-15);
        // The merged formula still has its inconsistent tail; the gap
        // accounts for all of it.
        let mt = MeanTable::new(&r.spectrum);
        assert_close(
            r.total_final_formula,
            final_formula_gap(&r.spectrum, &mt),
            1e-12,
        );
    }

    #[test]
    fn offdiag_blocks_use_all_distinct_triples() {
        // A spectrum with two coincident eigenvalues still has triples in
        // the sums; make sure coincidences stay finite and match the basis
        // double sum through the series branches of the triple means.
        let s = Spectrum::new(vec![0.4, 0.3, 0.3]).unwrap();
        let mt = MeanTable::new(&s);
        let oo = offdiag_offdiag_term(&s, &mt);
        assert!(oo.is_finite());
        let ctx = MetricContext::from_spectrum(&s);
        let basis = OrthonormalBasis::trace_one_km(&ctx).unwrap();
        let direct = curvature::scal_submanifold(&ctx, &basis).unwrap();
        let report = scal1_closed(&s).unwrap();
        assert_close(report.total_assembled, direct.value, 1e-10);
    }
}
