//! Property-based checks of the library's algebraic contracts: the
//! invariants that must hold for *every* admissible input, exercised over
//! randomized spectra, frames, and tangent directions with shrinking.

use proptest::prelude::*;

use kubomori::closedform::scal1_closed;
use kubomori::conjlab::majorizes;
use kubomori::curvature::riemann;
use kubomori::matcore::random::{random_orthogonal, rng_from_seed};
use kubomori::metric::{christoffel, g, g_inv, g_op};
use kubomori::{
    m_pair, m_triple, parse_matrix_json, parse_spectrum, MetricContext, PosDefMatrix, Spectrum,
    SymMatrix, TangentVector,
};

/// Symmetric matrix from packed upper-triangle entries.
fn sym_from(n: usize, packed: &[f64]) -> SymMatrix {
    SymMatrix::from_fn(n, |i, j| {
        let (a, b) = if i <= j { (i, j) } else { (j, i) };
        packed[b * (b + 1) / 2 + a]
    })
}

fn conjugated(seed: u64, spectrum: &Spectrum) -> PosDefMatrix {
    let n = spectrum.n();
    let q = random_orthogonal(&mut rng_from_seed(seed), n);
    let m = SymMatrix::from_fn(n, |i, j| {
        (0..n)
            .map(|k| q[(i, k)] * spectrum.values()[k] * q[(j, k)])
            .sum()
    });
    PosDefMatrix::new(m).expect("conjugation preserves positive definiteness")
}

/// Dimension, well-conditioned spectrum, frame seed, and two packed
/// tangents: the common fixture for metric-level properties.
fn point_and_tangents() -> impl Strategy<Value = (usize, Vec<f64>, u64, Vec<f64>, Vec<f64>)> {
    (2..=5usize).prop_flat_map(|n| {
        let packed = n * (n + 1) / 2;
        (
            Just(n),
            prop::collection::vec(0.05f64..5.0, n),
            any::<u64>(),
            prop::collection::vec(-1.0f64..1.0, packed),
            prop::collection::vec(-1.0f64..1.0, packed),
        )
    })
}

fn context_for(values: &[f64], seed: u64) -> MetricContext {
    let spectrum = Spectrum::new(values.to_vec()).unwrap();
    MetricContext::new(conjugated(seed, &spectrum))
}

proptest! {
    #![proptest_config(ProptestConfig {
        cases: 64,
        failure_persistence: None,
        ..ProptestConfig::default()
    })]

    /// The metric is symmetric, bilinear, and bounded below by the
    /// Hilbert–Schmidt norm over the largest eigenvalue.
    #[test]
    fn metric_is_symmetric_bilinear_and_positive(
        (n, values, seed, xe, ye) in point_and_tangents(),
        a in -3.0f64..3.0,
    ) {
        let ctx = context_for(&values, seed);
        let x = TangentVector::new(sym_from(n, &xe));
        let y = TangentVector::new(sym_from(n, &ye));

        let gxy = g(&ctx, &x, &y).unwrap();
        let gyx = g(&ctx, &y, &x).unwrap();
        prop_assert!((gxy - gyx).abs() <= 1e-12 * gxy.abs().max(1.0));

        let combined = TangentVector::new(x.matrix().scaled(a).add(y.matrix()));
        let lhs = g(&ctx, &combined, &y).unwrap();
        let rhs = a * gxy + g(&ctx, &y, &y).unwrap();
        prop_assert!((lhs - rhs).abs() <= 1e-10 * rhs.abs().max(1.0));

        let norm_sq = x.matrix().hs_inner(x.matrix());
        let lower = norm_sq / ctx.point().spectrum().max();
        prop_assert!(
            g(&ctx, &x, &x).unwrap() >= lower * (1.0 - 1e-12) - 1e-300,
            "metric quadratic form fell below its eigenvalue bound"
        );
    }

    /// Raising then lowering an index (and the reverse) is the identity.
    #[test]
    fn metric_operator_and_inverse_are_mutual_inverses(
        (n, values, seed, xe, _ye) in point_and_tangents(),
    ) {
        let ctx = context_for(&values, seed);
        let x = TangentVector::new(sym_from(n, &xe));
        let scale = x.matrix().frob_norm().max(1.0);

        let down_up = g_inv(&ctx, &g_op(&ctx, &x).unwrap()).unwrap();
        prop_assert!(down_up.matrix().sub(x.matrix()).frob_norm() <= 1e-10 * scale);

        let up_down = g_op(&ctx, &g_inv(&ctx, &x).unwrap()).unwrap();
        prop_assert!(up_down.matrix().sub(x.matrix()).frob_norm() <= 1e-10 * scale);
    }

    /// The connection is torsion-free (symmetric in its arguments) and
    /// satisfies the radial identity `Gamma(X, D) = X / 2`.
    #[test]
    fn christoffel_is_symmetric_with_radial_halving(
        (n, values, seed, xe, ye) in point_and_tangents(),
    ) {
        let ctx = context_for(&values, seed);
        let x = TangentVector::new(sym_from(n, &xe));
        let y = TangentVector::new(sym_from(n, &ye));

        let gamma_xy = christoffel(&ctx, &x, &y).unwrap();
        let gamma_yx = christoffel(&ctx, &y, &x).unwrap();
        let scale = gamma_xy.matrix().frob_norm().max(1.0);
        prop_assert!(
            gamma_xy.matrix().sub(gamma_yx.matrix()).frob_norm() <= 1e-12 * scale
        );

        let d = TangentVector::new(ctx.point().matrix().clone());
        let radial = christoffel(&ctx, &x, &d).unwrap();
        prop_assert!(
            radial.matrix().sub(&x.matrix().scaled(0.5)).frob_norm()
                <= 1e-12 * x.matrix().frob_norm().max(1.0)
        );
    }

    /// The curvature tensor vanishes when the first two slots coincide.
    #[test]
    fn curvature_vanishes_on_repeated_directions(
        (n, values, seed, xe, ze) in point_and_tangents(),
    ) {
        let ctx = context_for(&values, seed);
        let x = TangentVector::new(sym_from(n, &xe));
        let z = TangentVector::new(sym_from(n, &ze));
        let r = riemann(&ctx, &x, &x, &z).unwrap();
        let scale = x.matrix().frob_norm().powi(2).max(1.0)
            * z.matrix().frob_norm().max(1.0);
        prop_assert!(r.matrix().frob_norm() <= 1e-12 * scale);
    }

    /// Eigendecomposition contract: descending spectrum, frame-transport
    /// round trip, and reconstruction of the point from its frame.
    #[test]
    fn eigenframe_round_trips(
        (n, values, seed, xe, _ye) in point_and_tangents(),
    ) {
        let point = conjugated(seed, &Spectrum::new(values).unwrap());
        let spectrum = point.spectrum();
        for w in spectrum.values().windows(2) {
            prop_assert!(w[0] >= w[1], "spectrum must be sorted descending");
        }
        let x = sym_from(n, &xe);
        let round = point.from_frame(&point.to_frame(&x));
        prop_assert!(round.sub(&x).frob_norm() <= 1e-12 * x.frob_norm().max(1.0));
        let rebuilt = point.from_frame(&SymMatrix::diagonal(spectrum.values()));
        prop_assert!(
            rebuilt.sub(point.matrix()).frob_norm()
                <= 1e-12 * point.matrix().frob_norm().max(1.0)
        );
    }
}

proptest! {
    #![proptest_config(ProptestConfig {
        failure_persistence: None,
        ..ProptestConfig::default()
    })]

    /// Pair means: symmetric, within the eigenvalue-reciprocal envelope,
    /// and exactly `1/a` on the diagonal.
    #[test]
    fn pair_mean_envelope(
        ea in -8.0f64..8.0,
        eb in -8.0f64..8.0,
    ) {
        let (a, b) = (10f64.powf(ea), 10f64.powf(eb));
        let m = m_pair(a, b);
        prop_assert!((m - m_pair(b, a)).abs() <= 1e-15 * m);
        let (lo, hi) = (1.0 / a.max(b), 1.0 / a.min(b));
        prop_assert!(m >= lo * (1.0 - 1e-12) && m <= hi * (1.0 + 1e-12));
        prop_assert!((m_pair(a, a) - 1.0 / a).abs() <= 1e-15 / a);
    }

    /// Triple means are invariant under all six argument orderings.
    #[test]
    fn triple_mean_is_fully_symmetric(
        ea in -6.0f64..6.0,
        eb in -6.0f64..6.0,
        ec in -6.0f64..6.0,
    ) {
        let (a, b, c) = (10f64.powf(ea), 10f64.powf(eb), 10f64.powf(ec));
        let base = m_triple(a, b, c);
        for (p, q, r) in [(a, c, b), (b, a, c), (b, c, a), (c, a, b), (c, b, a)] {
            prop_assert!((m_triple(p, q, r) - base).abs() <= 1e-12 * base.abs());
        }
    }

    /// A spectrum majorizes itself, and every trace-one spectrum majorizes
    /// the uniform one.
    #[test]
    fn majorization_order_has_uniform_at_the_bottom(
        raw in prop::collection::vec(1e-3f64..1.0, 2..=6),
    ) {
        let total: f64 = raw.iter().sum();
        let normalized: Vec<f64> = raw.iter().map(|v| v / total).collect();
        let n = normalized.len();
        let s = Spectrum::new(normalized).unwrap();
        let uniform = Spectrum::new(vec![1.0 / n as f64; n]).unwrap();
        prop_assert!(majorizes(&s, &s).unwrap());
        prop_assert!(majorizes(&s, &uniform).unwrap());
        prop_assert!(majorizes(&uniform, &uniform).unwrap());
    }

    /// The scalar-curvature report is permutation-invariant in its input,
    /// its diagonal/diagonal block is identically zero, and the assembled
    /// total is the sum of its parts.
    #[test]
    fn curvature_report_is_consistent(
        raw in prop::collection::vec(1e-2f64..1.0, 2..=5),
        swap in any::<prop::sample::Index>(),
    ) {
        let total: f64 = raw.iter().sum();
        let values: Vec<f64> = raw.iter().map(|v| v / total).collect();
        let report = scal1_closed(&Spectrum::new(values.clone()).unwrap()).unwrap();

        let mut shuffled = values;
        let k = swap.index(shuffled.len());
        shuffled.swap(0, k);
        let permuted = scal1_closed(&Spectrum::new(shuffled).unwrap()).unwrap();
        prop_assert_eq!(report.total_assembled, permuted.total_assembled);

        prop_assert_eq!(report.term_diag_diag, 0.0);
        let sum = report.term_offdiag_offdiag
            + report.term_q_twice
            + report.term_diag_diag
            + report.term_second
            + report.term_third;
        prop_assert!(
            (report.total_assembled - sum).abs()
                <= 1e-14 * sum.abs().max(1.0)
        );
    }

    /// Spectrum text round trip: formatting with shortest-exact floats and
    /// reparsing reproduces the sorted spectrum bit for bit.
    #[test]
    fn spectrum_text_round_trips(
        raw in prop::collection::vec(1e-6f64..1e6, 1..=8),
    ) {
        let text = raw
            .iter()
            .map(|v| format!("{v:?}"))
            .collect::<Vec<_>>()
            .join(",");
        let parsed = parse_spectrum(&text).unwrap();
        let mut sorted = raw;
        sorted.sort_by(|a, b| b.partial_cmp(a).unwrap());
        prop_assert_eq!(parsed.values(), &sorted[..]);
    }

    /// Matrix JSON round trip through the serializer used by the report
    /// writers.
    #[test]
    fn matrix_json_round_trips(
        (n, entries) in (1..=6usize).prop_flat_map(|n| {
            (Just(n), prop::collection::vec(-1e3f64..1e3, n * n))
        }),
    ) {
        let rows: Vec<Vec<f64>> = (0..n)
            .map(|i| entries[i * n..(i + 1) * n].to_vec())
            .collect();
        let text = serde_json::to_string(&rows).unwrap();
        let parsed = parse_matrix_json(&text).unwrap();
        for i in 0..n {
            for j in 0..n {
                prop_assert_eq!(parsed[(i, j)], rows[i][j]);
            }
        }
    }
}
