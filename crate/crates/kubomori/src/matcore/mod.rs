//! Dense symmetric linear algebra and quadrature primitives.
//!
//! Everything in this crate works on small dense matrices (the interesting
//! dimensions are `2 ≤ n ≤ 8` or so), so the representations are plain
//! row-major `Vec<f64>` buffers and the algorithms are the classical
//! small-matrix ones: cyclic Jacobi for eigendecompositions, Cholesky for
//! inverses of positive definite matrices, Gauss-Legendre panels for
//! quadrature. No external linear-algebra backend is involved; determinism
//! down to the last bit matters more here than throughput.

mod jacobi;
mod quad;
pub mod random;

pub use jacobi::eigh;
pub use quad::{
    gauss_legendre, quad_semi_infinite, quad_semi_infinite_tol, quad_semi_infinite_vec, quad_unit,
};

use crate::{Error, Result};

/// Dense square matrix, row-major.
///
/// `Mat` is the workhorse for products of symmetric matrices (which are not
/// symmetric themselves) and for orthogonal frames.
#[derive(Clone, Debug, PartialEq)]
pub struct Mat {
    n: usize,
    data: Vec<f64>,
}

impl Mat {
    /// Zero matrix of side `n`.
    pub fn zeros(n: usize) -> Self {
        Mat {
            n,
            data: vec![0.0; n * n],
        }
    }

    /// Identity matrix of side `n`.
    pub fn identity(n: usize) -> Self {
        let mut m = Mat::zeros(n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    /// Side length.
    pub fn n(&self) -> usize {
        self.n
    }

    /// Matrix product `self · rhs`.
    pub fn mul(&self, rhs: &Mat) -> Mat {
        assert_eq!(self.n, rhs.n, "matrix product dimension mismatch");
        let n = self.n;
        let mut out = Mat::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.data[i * n + k];
                if a == 0.0 {
                    continue;
                }
                for j in 0..n {
                    out.data[i * n + j] += a * rhs.data[k * n + j];
                }
            }
        }
        out
    }

    /// Transposed copy.
    pub fn transpose(&self) -> Mat {
        let n = self.n;
        let mut out = Mat::zeros(n);
        for i in 0..n {
            for j in 0..n {
                out.data[j * n + i] = self.data[i * n + j];
            }
        }
        out
    }

    /// Sum of the diagonal.
    pub fn trace(&self) -> f64 {
        (0..self.n).map(|i| self.data[i * self.n + i]).sum()
    }

    /// `tr(self · rhs)` without materializing the product.
    pub fn trace_mul(&self, rhs: &Mat) -> f64 {
        assert_eq!(self.n, rhs.n, "trace product dimension mismatch");
        let n = self.n;
        let mut acc = 0.0;
        for i in 0..n {
            for j in 0..n {
                acc += self.data[i * n + j] * rhs.data[j * n + i];
            }
        }
        acc
    }

    /// Frobenius norm.
    pub fn frob_norm(&self) -> f64 {
        self.data.iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    /// Largest absolute difference between `self[(i,j)]` and `self[(j,i)]`.
    pub fn max_asymmetry(&self) -> f64 {
        let n = self.n;
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in (i + 1)..n {
                worst = worst.max((self.data[i * n + j] - self.data[j * n + i]).abs());
            }
        }
        worst
    }
}

impl std::ops::Index<(usize, usize)> for Mat {
    type Output = f64;
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[i * self.n + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for Mat {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.data[i * self.n + j]
    }
}

/// Real symmetric matrix; every constructor and mutator preserves symmetry.
#[derive(Clone, Debug, PartialEq)]
pub struct SymMatrix {
    n: usize,
    data: Vec<f64>,
}

impl SymMatrix {
    /// Zero matrix of side `n`.
    pub fn zeros(n: usize) -> Self {
        SymMatrix {
            n,
            data: vec![0.0; n * n],
        }
    }

    /// Identity matrix of side `n`.
    pub fn identity(n: usize) -> Self {
        let mut m = SymMatrix::zeros(n);
        for i in 0..n {
            m.data[i * n + i] = 1.0;
        }
        m
    }

    /// Diagonal matrix from the given entries.
    pub fn diagonal(entries: &[f64]) -> Self {
        let n = entries.len();
        let mut m = SymMatrix::zeros(n);
        for (i, &v) in entries.iter().enumerate() {
            m.data[i * n + i] = v;
        }
        m
    }

    /// Builds from a generator evaluated on `i ≤ j` and mirrored.
    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut m = SymMatrix::zeros(n);
        for i in 0..n {
            for j in i..n {
                let v = f(i, j);
                m.data[i * n + j] = v;
                m.data[j * n + i] = v;
            }
        }
        m
    }

    /// Accepts a square matrix as symmetric if its asymmetry is within `tol`,
    /// storing the symmetric part `(A + Aᵀ)/2`.
    ///
    /// # Errors
    ///
    /// [`Error::NotSymmetric`] when some `|A_ij − A_ji|` exceeds `tol`.
    pub fn from_mat_checked(a: &Mat, tol: f64) -> Result<Self> {
        let worst = a.max_asymmetry();
        if worst > tol {
            return Err(Error::NotSymmetric {
                max_asymmetry: worst,
            });
        }
        Ok(SymMatrix::symmetric_part(a))
    }

    /// The symmetric part `(A + Aᵀ)/2` of a square matrix.
    pub fn symmetric_part(a: &Mat) -> Self {
        let n = a.n();
        SymMatrix::from_fn(n, |i, j| 0.5 * (a[(i, j)] + a[(j, i)]))
    }

    /// Side length.
    pub fn n(&self) -> usize {
        self.n
    }

    /// Entry at `(i, j)`.
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    /// Sets both `(i, j)` and `(j, i)` to `v`.
    pub fn set_sym(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.n + j] = v;
        self.data[j * self.n + i] = v;
    }

    /// Sum of the diagonal.
    pub fn trace(&self) -> f64 {
        (0..self.n).map(|i| self.data[i * self.n + i]).sum()
    }

    /// Frobenius norm.
    pub fn frob_norm(&self) -> f64 {
        self.data.iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    /// Hilbert-Schmidt inner product `tr(self · other)`.
    pub fn hs_inner(&self, other: &SymMatrix) -> f64 {
        assert_eq!(self.n, other.n, "inner product dimension mismatch");
        self.data
            .iter()
            .zip(other.data.iter())
            .map(|(a, b)| a * b)
            .sum()
    }

    /// Entrywise sum.
    pub fn add(&self, other: &SymMatrix) -> SymMatrix {
        assert_eq!(self.n, other.n, "sum dimension mismatch");
        let mut out = self.clone();
        for (o, b) in out.data.iter_mut().zip(other.data.iter()) {
            *o += b;
        }
        out
    }

    /// Entrywise difference.
    pub fn sub(&self, other: &SymMatrix) -> SymMatrix {
        assert_eq!(self.n, other.n, "difference dimension mismatch");
        let mut out = self.clone();
        for (o, b) in out.data.iter_mut().zip(other.data.iter()) {
            *o -= b;
        }
        out
    }

    /// Scalar multiple.
    pub fn scaled(&self, c: f64) -> SymMatrix {
        let mut out = self.clone();
        for o in out.data.iter_mut() {
            *o *= c;
        }
        out
    }

    /// In-place `self += c · other`.
    pub fn add_scaled(&mut self, c: f64, other: &SymMatrix) {
        assert_eq!(self.n, other.n, "sum dimension mismatch");
        for (o, b) in self.data.iter_mut().zip(other.data.iter()) {
            *o += c * b;
        }
    }

    /// Copy as a general matrix.
    pub fn to_mat(&self) -> Mat {
        Mat {
            n: self.n,
            data: self.data.clone(),
        }
    }

    /// Product with another symmetric matrix (generally not symmetric).
    pub fn mul(&self, other: &SymMatrix) -> Mat {
        self.to_mat().mul(&other.to_mat())
    }
}

impl std::ops::Index<(usize, usize)> for SymMatrix {
    type Output = f64;
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[i * self.n + j]
    }
}

/// Strictly positive eigenvalues, sorted in descending order.
#[derive(Clone, Debug, PartialEq)]
pub struct Spectrum {
    values: Vec<f64>,
}

impl Spectrum {
    /// Sorts the values descending and validates strict positivity.
    ///
    /// # Errors
    ///
    /// [`Error::NotPositiveDefinite`] when any value is non-finite or `≤ 0`;
    /// [`Error::Domain`] when the list is empty.
    pub fn new(mut values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::Domain("spectrum must be non-empty".into()));
        }
        let min = values.iter().copied().fold(f64::INFINITY, f64::min);
        if !min.is_finite() || min <= 0.0 {
            return Err(Error::NotPositiveDefinite {
                min_eigenvalue: min,
            });
        }
        values.sort_by(|a, b| b.partial_cmp(a).expect("finite eigenvalues"));
        Ok(Spectrum { values })
    }

    /// The uniform trace-one spectrum `(1/n, …, 1/n)`.
    pub fn uniform(n: usize) -> Self {
        Spectrum {
            values: vec![1.0 / n as f64; n],
        }
    }

    /// Number of eigenvalues.
    pub fn n(&self) -> usize {
        self.values.len()
    }

    /// The eigenvalues, descending.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Sum of the eigenvalues.
    pub fn trace(&self) -> f64 {
        self.values.iter().sum()
    }

    /// Largest eigenvalue.
    pub fn max(&self) -> f64 {
        self.values[0]
    }

    /// Smallest eigenvalue.
    pub fn min(&self) -> f64 {
        *self.values.last().expect("non-empty spectrum")
    }
}

/// Positive definite symmetric matrix carrying its eigendecomposition.
///
/// The decomposition `D = Q Λ Qᵀ` (eigenvalues descending, `Q` orthogonal
/// with eigenvectors as columns) is computed once at construction; all
/// eigenbasis operations reuse it.
#[derive(Clone, Debug)]
pub struct PosDefMatrix {
    matrix: SymMatrix,
    spectrum: Spectrum,
    frame: Mat,
}

impl PosDefMatrix {
    /// Eigendecomposes `matrix` and validates positive definiteness.
    ///
    /// # Errors
    ///
    /// [`Error::NotPositiveDefinite`] when the smallest eigenvalue is `≤ 0`,
    /// [`Error::EighDidNotConverge`] if the eigensolver fails.
    pub fn new(matrix: SymMatrix) -> Result<Self> {
        let (values, frame) = eigh(&matrix)?;
        let min = *values.last().expect("non-empty eigenvalue list");
        if min <= 0.0 {
            return Err(Error::NotPositiveDefinite {
                min_eigenvalue: min,
            });
        }
        let spectrum = Spectrum::new(values)?;
        Ok(PosDefMatrix {
            matrix,
            spectrum,
            frame,
        })
    }

    /// Diagonal matrix with the given spectrum in the standard frame.
    pub fn from_spectrum(spectrum: &Spectrum) -> Self {
        PosDefMatrix {
            matrix: SymMatrix::diagonal(spectrum.values()),
            spectrum: spectrum.clone(),
            frame: Mat::identity(spectrum.n()),
        }
    }

    /// Side length.
    pub fn n(&self) -> usize {
        self.spectrum.n()
    }

    /// The matrix itself.
    pub fn matrix(&self) -> &SymMatrix {
        &self.matrix
    }

    /// The eigenvalues, descending.
    pub fn spectrum(&self) -> &Spectrum {
        &self.spectrum
    }

    /// The orthogonal eigenframe `Q` (eigenvectors as columns, ordered like
    /// the spectrum).
    pub fn frame(&self) -> &Mat {
        &self.frame
    }

    /// Matrix power `D^u = Q Λ^u Qᵀ` for arbitrary real `u`.
    pub fn mat_power(&self, u: f64) -> SymMatrix {
        let n = self.n();
        let powers: Vec<f64> = self.spectrum.values().iter().map(|l| l.powf(u)).collect();
        let mut scaled = self.frame.clone();
        // Q Λ^u: scale column j by λ_j^u, then multiply by Qᵀ.
        for i in 0..n {
            for j in 0..n {
                scaled[(i, j)] *= powers[j];
            }
        }
        SymMatrix::symmetric_part(&scaled.mul(&self.frame.transpose()))
    }

    /// Coordinates of `x` in the eigenframe: `Qᵀ x Q`.
    pub fn to_frame(&self, x: &SymMatrix) -> SymMatrix {
        let qt = self.frame.transpose();
        SymMatrix::symmetric_part(&qt.mul(&x.to_mat()).mul(&self.frame))
    }

    /// Takes eigenframe coordinates back to the ambient frame: `Q x̂ Qᵀ`.
    pub fn from_frame(&self, x_hat: &SymMatrix) -> SymMatrix {
        let qt = self.frame.transpose();
        SymMatrix::symmetric_part(&self.frame.mul(&x_hat.to_mat()).mul(&qt))
    }

    /// The perturbed point `D + h·Z`, re-decomposed.
    ///
    /// # Errors
    ///
    /// [`Error::NotPositiveDefinite`] when the step leaves the cone.
    pub fn perturbed(&self, h: f64, z: &SymMatrix) -> Result<PosDefMatrix> {
        let mut m = self.matrix.clone();
        m.add_scaled(h, z);
        PosDefMatrix::new(m)
    }
}

/// Inverse of a positive definite symmetric matrix via Cholesky.
///
/// # Errors
///
/// [`Error::NotPositiveDefinite`] when a pivot is non-positive, with the
/// failing pivot reported as the offending eigenvalue bound.
pub fn spd_inverse(a: &SymMatrix) -> Result<SymMatrix> {
    let n = a.n();
    // Lower-triangular Cholesky factor, row-major.
    let mut l = vec![0.0f64; n * n];
    for i in 0..n {
        for j in 0..=i {
            let mut s = a.get(i, j);
            for k in 0..j {
                s -= l[i * n + k] * l[j * n + k];
            }
            if i == j {
                if s <= 0.0 {
                    return Err(Error::NotPositiveDefinite { min_eigenvalue: s });
                }
                l[i * n + i] = s.sqrt();
            } else {
                l[i * n + j] = s / l[j * n + j];
            }
        }
    }
    // Invert L in place by forward substitution: L · M = I, M lower-triangular.
    let mut m = vec![0.0f64; n * n];
    for j in 0..n {
        m[j * n + j] = 1.0 / l[j * n + j];
        for i in (j + 1)..n {
            let mut s = 0.0;
            for k in j..i {
                s -= l[i * n + k] * m[k * n + j];
            }
            m[i * n + j] = s / l[i * n + i];
        }
    }
    // A⁻¹ = Mᵀ M (only i ≤ j needed, mirrored).
    Ok(SymMatrix::from_fn(n, |i, j| {
        let mut s = 0.0;
        for k in j..n {
            s += m[k * n + i] * m[k * n + j];
        }
        s
    }))
}

/// Hilbert-Schmidt orthonormal basis of the symmetric matrices.
///
/// Ordering: the diagonal units `E_00, …, E_(n-1)(n-1)` first, then the
/// normalized symmetric units `(E_ij + E_ji)/√2` for `i < j` in
/// lexicographic order. All elements have unit Frobenius norm and mutual
/// Hilbert-Schmidt inner product zero.
pub fn hs_basis(n: usize) -> Vec<SymMatrix> {
    let mut basis = Vec::with_capacity(n * (n + 1) / 2);
    for i in 0..n {
        let mut e = SymMatrix::zeros(n);
        e.set_sym(i, i, 1.0);
        basis.push(e);
    }
    let inv_sqrt2 = 0.5f64.sqrt();
    for i in 0..n {
        for j in (i + 1)..n {
            let mut e = SymMatrix::zeros(n);
            e.set_sym(i, j, inv_sqrt2);
            basis.push(e);
        }
    }
    basis
}

/// Symmetrized matrix unit `F_kl = E_kl + E_lk`.
///
/// For `k = l` this is `2·E_kk`, so that the family `{F_kl : k ≤ l}` is the
/// metric's eigenbasis with `G_D(F_kl, F_kl) = 2 m_kl` off the diagonal and
/// `4 m_kk` on it.
pub fn f_unit(n: usize, k: usize, l: usize) -> SymMatrix {
    let mut e = SymMatrix::zeros(n);
    if k == l {
        e.set_sym(k, k, 2.0);
    } else {
        e.set_sym(k, l, 1.0);
    }
    e
}
