//! Oracle-vs-closed-form cross-check suite behind `kubomori verify`.
//!
//! Each trial draws a random positive definite point (random spectrum in
//! `[0.25, 2.5]` conjugated by a random orthogonal frame) and random
//! symmetric tangents, evaluates every closed-form quantity next to its
//! definition-level oracle, and keeps the worst relative error seen per
//! quantity. The scalar-curvature check draws its own trace-one spectrum
//! (floored at `1e-3` so the oracle's finite differences stay clean) and
//! evaluates the oracle at a conjugated, non-diagonal representative of
//! it, so frame invariance is exercised for free.
//!
//! The whole run is deterministic in its arguments: one seeded stream,
//! consumed in a fixed order.

use kubomori::closedform::scal1_closed;
use kubomori::curvature::riemann;
use kubomori::matcore::random::{
    random_orthogonal, random_simplex_spectrum, random_spectrum_in, random_symmetric, rng_from_seed,
};
use kubomori::metric::{christoffel, g, g_inv};
use kubomori::oracle::{christoffel_fd, g_oracle, ginv_oracle, riemann_fd, scal1_oracle};
use kubomori::{
    float17, Error, Mat, MetricContext, OracleConfig, PosDefMatrix, Result, Spectrum, SymMatrix,
    TangentVector,
};

/// Relative-error budgets, one per checked quantity.
pub struct Budgets {
    pub metric: f64,
    pub ginv: f64,
    pub christoffel: f64,
    pub curvature: f64,
    pub scal: f64,
}

/// Worst relative error observed for one quantity, against its budget.
pub struct CheckResult {
    pub quantity: &'static str,
    pub max_rel_error: f64,
    pub budget: f64,
    pub pass: bool,
}

/// Outcome of a verification run.
pub struct VerifySummary {
    pub n: usize,
    pub trials: usize,
    pub seed: u64,
    pub checks: Vec<CheckResult>,
    pub pass: bool,
    /// Quantity with the largest error-to-budget ratio — the worst
    /// offender on failure, the closest call on success.
    pub worst: &'static str,
}

fn rel_scalar(got: f64, want: f64) -> f64 {
    (got - want).abs() / want.abs().max(1.0)
}

fn rel_matrix(got: &SymMatrix, want: &SymMatrix) -> f64 {
    got.sub(want).frob_norm() / want.frob_norm().max(1.0)
}

/// A positive definite matrix with the given spectrum in a random frame.
fn conjugated(q: &Mat, spectrum: &Spectrum) -> Result<PosDefMatrix> {
    let n = spectrum.n();
    let m = SymMatrix::from_fn(n, |i, j| {
        (0..n)
            .map(|k| q[(i, k)] * spectrum.values()[k] * q[(j, k)])
            .sum()
    });
    PosDefMatrix::new(m)
}

/// Runs the suite and reports per-quantity worst errors.
///
/// # Errors
///
/// [`Error::InvalidConfig`] for a dimension outside `[2, 6]` or zero
/// trials; any evaluator error propagates (a failed evaluation means the
/// comparison itself is broken, which is worth more than a partial
/// summary).
pub fn run(
    n: usize,
    trials: usize,
    seed: u64,
    budgets: &Budgets,
    cfg: &OracleConfig,
) -> Result<VerifySummary> {
    if !(2..=6).contains(&n) {
        return Err(Error::InvalidConfig(format!(
            "verify dimension {n} outside [2, 6]"
        )));
    }
    if trials == 0 {
        return Err(Error::InvalidConfig("verify needs at least 1 trial".into()));
    }
    let mut rng = rng_from_seed(seed);
    let mut worst_errors = [0.0f64; 5];
    for _ in 0..trials {
        let q = random_orthogonal(&mut rng, n);
        let point_spectrum = random_spectrum_in(&mut rng, n, 0.25, 2.5);
        let ctx = MetricContext::new(conjugated(&q, &point_spectrum)?);
        let x = random_symmetric(&mut rng, n, 1.0);
        let y = random_symmetric(&mut rng, n, 1.0);
        let z = random_symmetric(&mut rng, n, 1.0);
        let tx = TangentVector::new(x.clone());
        let ty = TangentVector::new(y.clone());
        let tz = TangentVector::new(z.clone());

        let errors = [
            rel_scalar(g(&ctx, &tx, &ty)?, g_oracle(ctx.point(), &x, &y, cfg)?),
            rel_matrix(
                g_inv(&ctx, &tx)?.matrix(),
                &ginv_oracle(ctx.point(), &x, cfg)?,
            ),
            rel_matrix(
                christoffel(&ctx, &tx, &ty)?.matrix(),
                &christoffel_fd(ctx.point(), &x, &y, cfg)?,
            ),
            rel_matrix(
                riemann(&ctx, &tx, &ty, &tz)?.matrix(),
                &riemann_fd(ctx.point(), &x, &y, &z, cfg)?,
            ),
            {
                let s = random_simplex_spectrum(&mut rng, n, 1e-3);
                let qs = random_orthogonal(&mut rng, n);
                rel_scalar(
                    scal1_closed(&s)?.total_assembled,
                    scal1_oracle(&conjugated(&qs, &s)?, cfg)?,
                )
            },
        ];
        for (worst, error) in worst_errors.iter_mut().zip(errors) {
            *worst = worst.max(error);
        }
    }

    let budget_values = [
        budgets.metric,
        budgets.ginv,
        budgets.christoffel,
        budgets.curvature,
        budgets.scal,
    ];
    let names = ["metric", "ginv", "christoffel", "curvature", "scal"];
    let checks: Vec<CheckResult> = names
        .iter()
        .zip(worst_errors)
        .zip(budget_values)
        .map(|((&quantity, max_rel_error), budget)| CheckResult {
            quantity,
            max_rel_error,
            budget,
            pass: max_rel_error <= budget,
        })
        .collect();
    let pass = checks.iter().all(|c| c.pass);
    let worst = checks
        .iter()
        .max_by(|a, b| {
            (a.max_rel_error / a.budget)
                .partial_cmp(&(b.max_rel_error / b.budget))
                .expect("relative errors are finite")
        })
        .expect("five checks")
        .quantity;
    Ok(VerifySummary {
        n,
        trials,
        seed,
        checks,
        pass,
        worst,
    })
}

/// The machine summary: JSON with 17-significant-digit numbers,
/// byte-identical across reruns with equal arguments.
pub fn render_json(summary: &VerifySummary) -> String {
    let checks: Vec<String> = summary
        .checks
        .iter()
        .map(|c| {
            format!(
                "    {{\"quantity\": \"{}\", \"max_rel_error\": {}, \"budget\": {}, \"pass\": {}}}",
                c.quantity,
                float17(c.max_rel_error),
                float17(c.budget),
                c.pass
            )
        })
        .collect();
    format!(
        "{{\n  \"n\": {},\n  \"trials\": {},\n  \"seed\": {},\n  \"checks\": [\n{}\n  ],\n  \
         \"pass\": {},\n  \"worst\": \"{}\"\n}}\n",
        summary.n,
        summary.trials,
        summary.seed,
        checks.join(",\n"),
        summary.pass,
        summary.worst
    )
}

/// The human rendering for stderr.
pub fn render_human(summary: &VerifySummary) -> String {
    let mut out = format!(
        "verify: n={} trials={} seed={}\n",
        summary.n, summary.trials, summary.seed
    );
    for c in &summary.checks {
        out.push_str(&format!(
            "  {:<12} max rel error {:>9.3e}  budget {:>7.1e}  {}\n",
            c.quantity,
            c.max_rel_error,
            c.budget,
            if c.pass { "PASS" } else { "FAIL" }
        ));
    }
    if summary.pass {
        out.push_str(&format!(
            "verification passed (closest call: {})\n",
            summary.worst
        ));
    } else {
        let offender = summary
            .checks
            .iter()
            .find(|c| c.quantity == summary.worst)
            .expect("worst names a check");
        out.push_str(&format!(
            "verification FAILED: {} max rel error {:.3e} exceeds budget {:.1e}\n",
            offender.quantity, offender.max_rel_error, offender.budget
        ));
    }
    out
}
