//! Deterministic random generators for tests, verification, and scans.
//!
//! Everything is seeded ChaCha12: the stream cipher generator is stable
//! across platforms and Rust versions, which is what makes scan output
//! byte-identical for a fixed seed. (The standard library's default RNG
//! makes no such promise.)

use super::{Mat, Spectrum, SymMatrix};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;

/// The crate-standard seeded generator.
pub fn rng_from_seed(seed: u64) -> ChaCha12Rng {
    ChaCha12Rng::seed_from_u64(seed)
}

/// One standard normal draw (Box-Muller).
pub fn standard_normal(rng: &mut impl Rng) -> f64 {
    let u1: f64 = rng.gen::<f64>().max(f64::MIN_POSITIVE);
    let u2: f64 = rng.gen();
    (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
}

/// Symmetric matrix with independent normal entries of the given standard
/// deviation (upper triangle drawn, mirrored).
pub fn random_symmetric(rng: &mut impl Rng, n: usize, scale: f64) -> SymMatrix {
    let mut m = SymMatrix::zeros(n);
    for i in 0..n {
        for j in i..n {
            m.set_sym(i, j, scale * standard_normal(rng));
        }
    }
    m
}

/// Random symmetric matrix projected onto the traceless subspace.
pub fn random_traceless(rng: &mut impl Rng, n: usize, scale: f64) -> SymMatrix {
    let mut m = random_symmetric(rng, n, scale);
    let shift = m.trace() / n as f64;
    for i in 0..n {
        let v = m.get(i, i) - shift;
        m.set_sym(i, i, v);
    }
    m
}

/// Random orthogonal matrix: Gaussian entries, then two rounds of modified
/// Gram-Schmidt on the columns.
pub fn random_orthogonal(rng: &mut impl Rng, n: usize) -> Mat {
    let mut q = Mat::zeros(n);
    for i in 0..n {
        for j in 0..n {
            q[(i, j)] = standard_normal(rng);
        }
    }
    for _ in 0..2 {
        for j in 0..n {
            for k in 0..j {
                let mut dot = 0.0;
                for i in 0..n {
                    dot += q[(i, k)] * q[(i, j)];
                }
                for i in 0..n {
                    q[(i, j)] -= dot * q[(i, k)];
                }
            }
            let mut norm = 0.0;
            for i in 0..n {
                norm += q[(i, j)] * q[(i, j)];
            }
            let norm = norm.sqrt();
            assert!(norm > 0.0, "degenerate Gaussian frame draw");
            for i in 0..n {
                q[(i, j)] /= norm;
            }
        }
    }
    q
}

/// Spectrum with entries drawn uniformly from `[lo, hi]`.
pub fn random_spectrum_in(rng: &mut impl Rng, n: usize, lo: f64, hi: f64) -> Spectrum {
    assert!(0.0 < lo && lo <= hi, "spectrum range must be positive");
    let values: Vec<f64> = (0..n).map(|_| rng.gen_range(lo..=hi)).collect();
    Spectrum::new(values).expect("positive draws form a spectrum")
}

/// Uniform sample from the open trace-one simplex (normalized standard
/// exponentials, equivalently a flat Dirichlet), rejecting draws with any
/// component below `floor`.
pub fn random_simplex_spectrum(rng: &mut impl Rng, n: usize, floor: f64) -> Spectrum {
    assert!(
        n >= 1 && floor * (n as f64) < 1.0,
        "floor excludes the whole simplex"
    );
    loop {
        let draws: Vec<f64> = (0..n).map(|_| -f64::ln(1.0 - rng.gen::<f64>())).collect();
        let sum: f64 = draws.iter().sum();
        if sum <= 0.0 {
            continue;
        }
        let values: Vec<f64> = draws.iter().map(|e| e / sum).collect();
        if values.iter().all(|&v| v >= floor) {
            return Spectrum::new(values).expect("normalized positive draws");
        }
    }
}
