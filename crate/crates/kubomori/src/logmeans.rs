//! Scalar mean coefficients of the metric in the eigenbasis.
//!
//! For eigenvalues `λ_k, λ_l > 0` the pair coefficient is
//!
//! ```text
//! m_kl = ∫₀^∞ (λ_k + t)⁻¹ (λ_l + t)⁻¹ dt = (log λ_l − log λ_k)/(λ_l − λ_k),
//! ```
//!
//! the reciprocal of the logarithmic mean, with `m_kk = 1/λ_k`. The triple
//! coefficient
//!
//! ```text
//! m_ijk = ∫₀^∞ (λ_i + t)⁻¹ (λ_j + t)⁻¹ (λ_k + t)⁻¹ dt
//!       = (m_jk − m_ij)/(λ_i − λ_k)
//! ```
//!
//! is fully symmetric in its three arguments, with the confluent values
//! `m_iii = 1/(2λ_i²)`.
//!
//! Everything downstream (metric weights, Christoffel coefficients, the
//! closed-form curvature terms) consumes these numbers, and the identity
//! `m_kkl·λ_k + m_kll·λ_l = m_kl` has to survive to nearly machine
//! precision at arbitrary eigenvalue gaps. The evaluation is therefore
//! stratified:
//!
//! * `m_pair` orders its arguments and uses `ln_1p(gap/lo)/gap` with
//!   `gap = hi − lo ≥ 0`, which has no cancellation at any gap (computing
//!   the `ln_1p` argument from the larger value instead would send it
//!   toward −1, where `1 + x` itself cancels). It switches to an even
//!   series in `r = gap/(hi + lo)` once `r ≤ 1e-8`, purely to avoid the
//!   0/0 at coincidence.
//! * `m_triple` sorts its arguments and uses the difference quotient when
//!   the extreme relative gap exceeds `3e-3`, otherwise a centered series
//!   in the deviations from the mean. The crossover balances the two error
//!   curves (quotient cancellation grows like `ε/gap`, series truncation
//!   like `gap⁵`); the worst case, at the threshold itself, is a relative
//!   error around `3e-13`.

use crate::matcore::Spectrum;

/// Relative half-gap below which `m_pair` switches to its series branch.
const PAIR_SERIES_THRESHOLD: f64 = 1e-8;

/// Relative spread below which `m_triple` switches to its centered series.
const TRIPLE_SERIES_THRESHOLD: f64 = 3e-3;

/// Reciprocal logarithmic mean `m_kl` of two positive numbers.
///
/// Symmetric in its arguments; `m_pair(λ, λ) = 1/λ` exactly.
pub fn m_pair(a: f64, b: f64) -> f64 {
    debug_assert!(a > 0.0 && b > 0.0, "means need positive eigenvalues");
    let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
    let gap = hi - lo;
    let r = gap / (hi + lo);
    if r <= PAIR_SERIES_THRESHOLD {
        // 1/m is the logarithmic mean; expanded around the midpoint the
        // reciprocal is (1 + r²/3 + r⁴/5 + r⁶/7 + …)/μ, and at r ≤ 1e-8
        // the dropped r⁸ term is far below machine precision.
        let mu = 0.5 * (lo + hi);
        let r2 = r * r;
        (1.0 + r2 * (1.0 / 3.0 + r2 * (0.2 + r2 / 7.0))) / mu
    } else {
        f64::ln_1p(gap / lo) / gap
    }
}

/// Fully symmetric triple coefficient `m_ijk`.
///
/// `m_triple(λ, λ, λ) = 1/(2λ²)`; two-way coincidences are handled by the
/// same two branches with no special casing.
pub fn m_triple(a: f64, b: f64, c: f64) -> f64 {
    debug_assert!(
        a > 0.0 && b > 0.0 && c > 0.0,
        "means need positive eigenvalues"
    );
    // Sort descending: l1 ≥ l2 ≥ l3.
    let (mut l1, mut l2, mut l3) = (a, b, c);
    if l1 < l2 {
        std::mem::swap(&mut l1, &mut l2);
    }
    if l2 < l3 {
        std::mem::swap(&mut l2, &mut l3);
    }
    if l1 < l2 {
        std::mem::swap(&mut l1, &mut l2);
    }
    if l1 == l3 {
        // All three coincide; skip the series so the confluent value is
        // exact rather than carrying the rounding of (3λ)/3.
        return 0.5 / (l1 * l1);
    }
    if l1 - l3 <= TRIPLE_SERIES_THRESHOLD * l1 {
        // Centered series: with μ the mean, d_i = λ_i − μ (so Σd_i = 0),
        // e2 = Σ_{i<j} d_i d_j = −Σd_i²/2 and e3 = d1·d2·d3,
        //   m = 1/(2μ²) − e2/(4μ⁴) − e3/(5μ⁵) + e2²/(6μ⁶) + O((spread/μ)⁵).
        // At the 3e-3 threshold the truncation is ≈ 1e-14 relative.
        let mu = (l1 + l2 + l3) / 3.0;
        let d1 = l1 - mu;
        let d2 = l2 - mu;
        let d3 = l3 - mu;
        let e2 = -0.5 * (d1 * d1 + d2 * d2 + d3 * d3);
        let e3 = d1 * d2 * d3;
        let mu2 = mu * mu;
        let mu4 = mu2 * mu2;
        0.5 / mu2 - e2 / (4.0 * mu4) - e3 / (5.0 * mu4 * mu) + e2 * e2 / (6.0 * mu4 * mu2)
    } else {
        (m_pair(l2, l3) - m_pair(l1, l2)) / (l1 - l3)
    }
}

/// All pair and triple coefficients of a spectrum, precomputed.
///
/// `m2` is the full symmetric `n×n` table of `m_pair` values and `m3` the
/// full symmetric `n×n×n` table of `m_triple` values; each independent
/// entry is computed once and mirrored, so the tables are symmetric by
/// construction, not merely to rounding.
#[derive(Clone, Debug)]
pub struct MeanTable {
    n: usize,
    m2: Vec<f64>,
    m3: Vec<f64>,
}

impl MeanTable {
    /// Builds the tables for a spectrum.
    pub fn new(spectrum: &Spectrum) -> Self {
        let n = spectrum.n();
        let l = spectrum.values();
        let mut m2 = vec![0.0; n * n];
        for k in 0..n {
            for j in k..n {
                let v = m_pair(l[k], l[j]);
                m2[k * n + j] = v;
                m2[j * n + k] = v;
            }
        }
        let mut m3 = vec![0.0; n * n * n];
        for i in 0..n {
            for j in i..n {
                for k in j..n {
                    let v = m_triple(l[i], l[j], l[k]);
                    for (p, q, r) in [
                        (i, j, k),
                        (i, k, j),
                        (j, i, k),
                        (j, k, i),
                        (k, i, j),
                        (k, j, i),
                    ] {
                        m3[(p * n + q) * n + r] = v;
                    }
                }
            }
        }
        MeanTable { n, m2, m3 }
    }

    /// Matrix side length.
    pub fn n(&self) -> usize {
        self.n
    }

    /// Pair coefficient `m_kl`.
    pub fn m2(&self, k: usize, l: usize) -> f64 {
        self.m2[k * self.n + l]
    }

    /// Triple coefficient `m_ijk`.
    pub fn m3(&self, i: usize, j: usize, k: usize) -> f64 {
        self.m3[(i * self.n + j) * self.n + k]
    }
}
