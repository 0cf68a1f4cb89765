//! Randomized majorization scans of the trace-one scalar curvature.
//!
//! The extremality conjecture this laboratory gathers evidence for says
//! that the scalar curvature of the trace-one submanifold is extremal at
//! the uniform spectrum and monotone along the majorization order. In this
//! crate's sign convention the uniform spectrum is the conjectured
//! **minimum** (`−1` for two eigenvalues, `−75/16` for three), so the
//! checked direction is: if `a` majorizes `b` — `a` is less mixed — then
//! `scal1(a) ≥ scal1(b)`. Every report states this direction in its header
//! so the orientation travels with the data.
//!
//! A scan draws spectra uniformly from the simplex interior, evaluates the
//! curvature for each (closed form or definition-level oracle), compares
//! comparable pairs, and records — never asserts away — anything that
//! breaks the expected direction beyond tolerance. A genuine violation
//! would be the most valuable possible output, so violations are report
//! content, and the scan keeps going past per-sample evaluation failures.
//!
//! Pair comparison is kept near `O(samples log samples)`: most random
//! pairs are incomparable, so the scan checks neighbors after sorting by
//! largest eigenvalue, a deterministic batch of random pairs, and every
//! sample against the uniform spectrum (which everything majorizes); the
//! full quadratic sweep hides behind [`ScanOptions::exhaustive_pairs`].
//!
//! Determinism is a hard contract: identical options produce byte-identical
//! [`write_csv`]/[`write_json`] output. All randomness flows from one
//! seeded ChaCha12 stream consumed sequentially before evaluation begins;
//! evaluation then parallelizes over sample indices and reduces in index
//! order. Near-boundary spectra (any component below `1e-6`) are rejected
//! at sampling time because the `Σ 1/λ` part of the curvature diverges
//! there and drowns the statistics; [`ray_scan`] covers the boundary
//! approach separately along the segment from the uniform spectrum to a
//! near-pure one.

use std::collections::HashSet;
use std::fmt;

use rand::Rng;
use rayon::prelude::*;

use crate::closedform::scal1_closed;
use crate::curvature::CurvatureMethod;
use crate::matcore::random::{random_simplex_spectrum, rng_from_seed};
use crate::matcore::{PosDefMatrix, Spectrum, SymMatrix};
use crate::oracle::{scal1_oracle, OracleConfig};
use crate::{float17, Error, Result};

/// Smallest component admitted by [`sample_spectrum`] (rejection below it).
pub const SPECTRUM_FLOOR: f64 = 1e-6;
/// Slack on the partial-sum comparisons in [`majorizes`].
const MAJORIZATION_SLACK: f64 = 1e-12;
/// Relative tolerance beyond which a monotonicity failure is a violation.
const VIOLATION_REL_TOL: f64 = 1e-9;
/// Relative agreement required of a method cross-check.
pub const CROSSCHECK_REL_TOL: f64 = 1e-4;
/// Name of the generator behind every scan, carried in the report header;
/// reruns are reproducible across implementations only up to this choice.
pub const RNG_ALGORITHM: &str = "chacha12";
/// One-sentence statement of the checked inequality direction.
pub const DIRECTION_STATEMENT: &str = "if a majorizes b then scal1(a) >= scal1(b): \
the uniform spectrum, majorized by every spectrum, is the conjectured minimum \
in this crate's sign convention";

/// Which evaluator a scan runs.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ScanMethod {
    /// Eigenvalue-only closed forms ([`scal1_closed`]'s assembled total).
    ClosedForm,
    /// Definition-level quadrature/finite-difference oracle.
    Oracle,
}

impl ScanMethod {
    /// Stable identifier used in CSV/JSON output and CLI flags.
    pub fn as_str(self) -> &'static str {
        match self {
            ScanMethod::ClosedForm => "closed",
            ScanMethod::Oracle => "oracle",
        }
    }

    /// The per-record evaluation tag this method stamps.
    fn curvature_method(self) -> CurvatureMethod {
        match self {
            ScanMethod::ClosedForm => CurvatureMethod::ClosedForm,
            ScanMethod::Oracle => CurvatureMethod::OracleFiniteDifference,
        }
    }
}

impl fmt::Display for ScanMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// One evaluated spectrum inside a scan.
#[derive(Clone, Debug)]
pub struct ScanRecord {
    /// Sample index; the uniform spectrum sits at index `samples`.
    pub index: usize,
    /// The evaluated spectrum (trace one, sorted descending).
    pub spectrum: Spectrum,
    /// Scalar curvature of the trace-one submanifold at this spectrum.
    pub scal1: f64,
    /// Which evaluator produced `scal1`.
    pub method: CurvatureMethod,
    /// Index of the first comparison partner this spectrum was found to
    /// majorize (sampled partners are tried before the uniform one).
    pub majorizes_partner: Option<usize>,
    /// Seed of the scan that produced this record.
    pub seed: u64,
}

/// A comparable pair that broke the checked direction: the majorizing
/// spectrum scored *lower* than the majorized one by more than the
/// tolerance.
#[derive(Clone, Copy, Debug)]
pub struct Violation {
    /// Record index of the majorizing (less mixed) spectrum.
    pub majorizing: usize,
    /// Record index of the majorized (more mixed) spectrum.
    pub majorized: usize,
    /// How far below the majorized value the majorizing one fell
    /// (`scal1_majorized − scal1_majorizing`, always positive here).
    pub gap: f64,
}

/// A per-sample evaluation error; the scan records it and continues.
#[derive(Clone, Debug)]
pub struct ScanFailure {
    /// Sample index that failed to evaluate.
    pub index: usize,
    /// Human-readable error description.
    pub message: String,
}

/// One method-consistency probe: the sampled record's value re-evaluated
/// with the other method.
#[derive(Clone, Copy, Debug)]
pub struct CrossCheck {
    /// Record index that was re-evaluated.
    pub index: usize,
    /// Value from the scan's own method.
    pub value: f64,
    /// Value from the other method.
    pub reference: f64,
    /// `|value − reference| / max(1, |reference|)`.
    pub rel_gap: f64,
}

/// Everything a scan needs; [`ScanOptions::new`] fills in the defaults
/// (no exhaustive sweep, 1% cross-checks, default oracle tuning).
#[derive(Clone, Debug)]
pub struct ScanOptions {
    /// Matrix side length (spectrum dimension), at least 2.
    pub n: usize,
    /// Number of random spectra to draw, at least 1.
    pub samples: usize,
    /// Seed for the ChaCha12 stream.
    pub seed: u64,
    /// Evaluator for every sample.
    pub method: ScanMethod,
    /// Also compare every sampled pair (quadratic; off by default).
    pub exhaustive_pairs: bool,
    /// Fraction of samples re-evaluated with the other method
    /// (rounded up when positive; `0` disables cross-checking).
    pub crosscheck_fraction: f64,
    /// Tuning for the oracle evaluator (also used by cross-checks).
    pub oracle: OracleConfig,
}

impl ScanOptions {
    /// Options with the documented defaults for everything optional.
    pub fn new(n: usize, samples: usize, seed: u64, method: ScanMethod) -> Self {
        ScanOptions {
            n,
            samples,
            seed,
            method,
            exhaustive_pairs: false,
            crosscheck_fraction: 0.01,
            oracle: OracleConfig::default(),
        }
    }

    fn validate(&self) -> Result<()> {
        if self.n < 2 {
            return Err(Error::InvalidConfig(format!(
                "scan dimension {} below 2",
                self.n
            )));
        }
        if self.samples == 0 {
            return Err(Error::InvalidConfig("scan needs at least 1 sample".into()));
        }
        if !(0.0..=1.0).contains(&self.crosscheck_fraction) {
            return Err(Error::InvalidConfig(format!(
                "crosscheck_fraction {} outside [0, 1]",
                self.crosscheck_fraction
            )));
        }
        self.oracle.validate()
    }
}

/// Full result of one scan. `records` holds every successful evaluation in
/// index order with the uniform spectrum last (index `samples`); samples
/// that failed to evaluate appear in `failures` instead.
#[derive(Clone, Debug)]
pub struct ScanReport {
    /// Spectrum dimension.
    pub n: usize,
    /// Number of random samples requested.
    pub samples: usize,
    /// Seed the scan ran with.
    pub seed: u64,
    /// Evaluator used for every record.
    pub method: ScanMethod,
    /// Name of the random generator (see [`RNG_ALGORITHM`]).
    pub rng_algorithm: &'static str,
    /// The checked inequality direction (see [`DIRECTION_STATEMENT`]).
    pub direction: &'static str,
    /// Curvature at the uniform spectrum (NaN if its evaluation failed).
    pub scal1_at_mixed: f64,
    /// Largest sampled curvature (NaN when no sample succeeded).
    pub max_observed: f64,
    /// Smallest sampled curvature (NaN when no sample succeeded).
    pub min_observed: f64,
    /// Observation, not assertion: every sample scored at least the
    /// uniform value minus tolerance.
    pub uniform_is_minimum: bool,
    /// Number of distinct ordered comparable pairs checked.
    pub comparisons: usize,
    /// All successful evaluations, uniform spectrum last.
    pub records: Vec<ScanRecord>,
    /// Comparable pairs that broke the direction, sorted by indices.
    pub violations: Vec<Violation>,
    /// Per-sample evaluation errors.
    pub failures: Vec<ScanFailure>,
    /// Method-consistency probes on a deterministic subsample.
    pub crosschecks: Vec<CrossCheck>,
    /// Whether every cross-check agreed to [`CROSSCHECK_REL_TOL`]
    /// (vacuously true when cross-checking is disabled).
    pub crosschecks_pass: bool,
}

/// Draws one spectrum uniformly from the trace-one simplex interior
/// (normalized standard exponentials), rejecting draws with any component
/// below [`SPECTRUM_FLOOR`]. Sorted descending, sums to 1 to roundoff.
///
/// # Panics
///
/// For `n < 2`; scans are meaningless on a point.
pub fn sample_spectrum(n: usize, rng: &mut impl Rng) -> Spectrum {
    assert!(n >= 2, "scans need at least a two-point spectrum");
    random_simplex_spectrum(rng, n, SPECTRUM_FLOOR)
}

/// Whether `a` majorizes `b`: every leading partial sum of `a` (sorted
/// descending, which [`Spectrum`] guarantees) is at least the matching
/// partial sum of `b`, with `1e-12` slack; the full sums agree by the
/// trace-one precondition.
///
/// # Errors
///
/// [`Error::DimensionMismatch`] when the spectra have different lengths.
pub fn majorizes(a: &Spectrum, b: &Spectrum) -> Result<bool> {
    if a.n() != b.n() {
        return Err(Error::DimensionMismatch {
            expected: a.n(),
            got: b.n(),
        });
    }
    let mut sum_a = 0.0;
    let mut sum_b = 0.0;
    for k in 0..a.n().saturating_sub(1) {
        sum_a += a.values()[k];
        sum_b += b.values()[k];
        if sum_a < sum_b - MAJORIZATION_SLACK {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Evaluates the trace-one scalar curvature of a spectrum with the chosen
/// method (closed form: assembled total; oracle: definition-level).
fn evaluate_scal1(method: ScanMethod, s: &Spectrum, oracle: &OracleConfig) -> Result<f64> {
    match method {
        ScanMethod::ClosedForm => Ok(scal1_closed(s)?.total_assembled),
        ScanMethod::Oracle => {
            let d = PosDefMatrix::new(SymMatrix::diagonal(s.values()))?;
            scal1_oracle(&d, oracle)
        }
    }
}

/// `Some(gap)` when the majorizing value fell below the majorized one by
/// more than the relative tolerance.
fn violation_gap(scal1_majorizing: f64, scal1_majorized: f64) -> Option<f64> {
    let tol = VIOLATION_REL_TOL * scal1_majorizing.abs().max(scal1_majorized.abs()).max(1.0);
    let gap = scal1_majorized - scal1_majorizing;
    (gap > tol).then_some(gap)
}

fn uniform_spectrum(n: usize) -> Spectrum {
    Spectrum::new(vec![1.0 / n as f64; n]).expect("uniform spectrum is positive")
}

/// Runs a full scan: draw, evaluate, compare, cross-check, report.
///
/// All sampling and pair selection happens sequentially up front on one
/// seeded stream; evaluation parallelizes over sample indices and reduces
/// in index order, so identical options give byte-identical serialized
/// reports. Violations and evaluation failures are report content, never
/// errors.
///
/// # Errors
///
/// [`Error::InvalidConfig`] for dimension below 2, zero samples, a
/// cross-check fraction outside `[0, 1]`, or unusable oracle tuning.
pub fn scan(options: &ScanOptions) -> Result<ScanReport> {
    options.validate()?;
    let samples = options.samples;
    let uniform_index = samples;
    let mut rng = rng_from_seed(options.seed);

    // Phase 1: one sequential pass over the stream fixes every random
    // choice (spectra, cross-check subsample, comparison pairs) before any
    // parallel work, which is what makes the whole scan deterministic.
    let mut spectra: Vec<Spectrum> = (0..samples)
        .map(|_| sample_spectrum(options.n, &mut rng))
        .collect();
    spectra.push(uniform_spectrum(options.n));

    let crosscheck_count = if options.crosscheck_fraction > 0.0 {
        ((options.crosscheck_fraction * samples as f64).ceil() as usize).min(samples)
    } else {
        0
    };
    let mut deck: Vec<usize> = (0..samples).collect();
    for i in 0..crosscheck_count {
        let j = rng.gen_range(i..samples);
        deck.swap(i, j);
    }
    let mut crosscheck_indices: Vec<usize> = deck[..crosscheck_count].to_vec();
    crosscheck_indices.sort_unstable();

    let random_pairs: Vec<(usize, usize)> = if samples >= 2 {
        (0..samples)
            .map(|_| {
                let i = rng.gen_range(0..samples);
                let mut j = rng.gen_range(0..samples - 1);
                if j >= i {
                    j += 1;
                }
                (i, j)
            })
            .collect()
    } else {
        Vec::new()
    };

    // Phase 2: evaluate every spectrum (samples plus uniform) in parallel.
    let evaluations: Vec<(usize, Result<f64>)> = (0..=samples)
        .into_par_iter()
        .map(|idx| {
            (
                idx,
                evaluate_scal1(options.method, &spectra[idx], &options.oracle),
            )
        })
        .collect();

    let mut scal1_by_index: Vec<Option<f64>> = vec![None; samples + 1];
    let mut failures = Vec::new();
    for (idx, outcome) in evaluations {
        match outcome {
            Ok(value) => scal1_by_index[idx] = Some(value),
            Err(err) => failures.push(ScanFailure {
                index: idx,
                message: err.to_string(),
            }),
        }
    }

    // Phase 3: pair comparisons. A seen-set keeps every ordered pair
    // checked at most once, so the comparison count and the violation list
    // do not depend on how the passes overlap.
    let mut seen: HashSet<(usize, usize)> = HashSet::new();
    let mut partner: Vec<Option<usize>> = vec![None; samples + 1];
    let mut violations = Vec::new();
    let mut comparisons = 0usize;
    let check_pair = |i: usize,
                      j: usize,
                      seen: &mut HashSet<(usize, usize)>,
                      partner: &mut Vec<Option<usize>>,
                      violations: &mut Vec<Violation>,
                      comparisons: &mut usize| {
        if i == j || !seen.insert((i, j)) {
            return;
        }
        let (Some(si), Some(sj)) = (scal1_by_index[i], scal1_by_index[j]) else {
            return;
        };
        match majorizes(&spectra[i], &spectra[j]) {
            Ok(true) => {
                *comparisons += 1;
                if partner[i].is_none() {
                    partner[i] = Some(j);
                }
                if let Some(gap) = violation_gap(si, sj) {
                    violations.push(Violation {
                        majorizing: i,
                        majorized: j,
                        gap,
                    });
                }
            }
            Ok(false) => {}
            Err(_) => unreachable!("scan spectra share one dimension"),
        }
    };

    // Neighbors after sorting by largest eigenvalue: comparable pairs
    // cluster there because the first partial sum is the binding one.
    let mut by_top: Vec<usize> = (0..samples).collect();
    by_top.sort_by(|&i, &j| {
        spectra[j].values()[0]
            .partial_cmp(&spectra[i].values()[0])
            .expect("spectra are finite")
            .then(i.cmp(&j))
    });
    for w in by_top.windows(2) {
        check_pair(
            w[0],
            w[1],
            &mut seen,
            &mut partner,
            &mut violations,
            &mut comparisons,
        );
        check_pair(
            w[1],
            w[0],
            &mut seen,
            &mut partner,
            &mut violations,
            &mut comparisons,
        );
    }
    for &(i, j) in &random_pairs {
        check_pair(
            i,
            j,
            &mut seen,
            &mut partner,
            &mut violations,
            &mut comparisons,
        );
        check_pair(
            j,
            i,
            &mut seen,
            &mut partner,
            &mut violations,
            &mut comparisons,
        );
    }
    if options.exhaustive_pairs {
        for i in 0..samples {
            for j in (i + 1)..samples {
                check_pair(
                    i,
                    j,
                    &mut seen,
                    &mut partner,
                    &mut violations,
                    &mut comparisons,
                );
                check_pair(
                    j,
                    i,
                    &mut seen,
                    &mut partner,
                    &mut violations,
                    &mut comparisons,
                );
            }
        }
    }
    for i in 0..samples {
        check_pair(
            i,
            uniform_index,
            &mut seen,
            &mut partner,
            &mut violations,
            &mut comparisons,
        );
        check_pair(
            uniform_index,
            i,
            &mut seen,
            &mut partner,
            &mut violations,
            &mut comparisons,
        );
    }
    violations.sort_by_key(|v| (v.majorizing, v.majorized));

    // Phase 4: method-consistency cross-checks on the chosen subsample.
    let other = match options.method {
        ScanMethod::ClosedForm => ScanMethod::Oracle,
        ScanMethod::Oracle => ScanMethod::ClosedForm,
    };
    let crosscheck_outcomes: Vec<(usize, Result<f64>)> = crosscheck_indices
        .into_par_iter()
        .map(|idx| (idx, evaluate_scal1(other, &spectra[idx], &options.oracle)))
        .collect();
    let mut crosschecks = Vec::new();
    for (idx, outcome) in crosscheck_outcomes {
        let Some(value) = scal1_by_index[idx] else {
            continue;
        };
        match outcome {
            Ok(reference) => crosschecks.push(CrossCheck {
                index: idx,
                value,
                reference,
                rel_gap: (value - reference).abs() / reference.abs().max(1.0),
            }),
            Err(err) => failures.push(ScanFailure {
                index: idx,
                message: format!("cross-check: {err}"),
            }),
        }
    }
    failures.sort_by_key(|f| f.index);
    let crosschecks_pass = crosschecks.iter().all(|c| c.rel_gap <= CROSSCHECK_REL_TOL);

    // Phase 5: assemble in index order.
    let records: Vec<ScanRecord> = (0..=samples)
        .filter_map(|idx| {
            scal1_by_index[idx].map(|scal1| ScanRecord {
                index: idx,
                spectrum: spectra[idx].clone(),
                scal1,
                method: options.method.curvature_method(),
                majorizes_partner: partner[idx],
                seed: options.seed,
            })
        })
        .collect();
    let scal1_at_mixed = scal1_by_index[uniform_index].unwrap_or(f64::NAN);
    let sampled: Vec<f64> = scal1_by_index[..samples]
        .iter()
        .flatten()
        .copied()
        .collect();
    let max_observed = sampled.iter().copied().fold(f64::NAN, f64::max);
    let min_observed = sampled.iter().copied().fold(f64::NAN, f64::min);
    let uniform_is_minimum = scal1_at_mixed.is_finite()
        && !sampled.is_empty()
        && min_observed >= scal1_at_mixed - VIOLATION_REL_TOL * scal1_at_mixed.abs().max(1.0);

    Ok(ScanReport {
        n: options.n,
        samples,
        seed: options.seed,
        method: options.method,
        rng_algorithm: RNG_ALGORITHM,
        direction: DIRECTION_STATEMENT,
        scal1_at_mixed,
        max_observed,
        min_observed,
        uniform_is_minimum,
        comparisons,
        records,
        violations,
        failures,
        crosschecks,
        crosschecks_pass,
    })
}

/// One point of a boundary-approach ray.
#[derive(Clone, Debug)]
pub struct RayPoint {
    /// Ray parameter in `[0, 1]`: `0` is the uniform spectrum, `1` the
    /// near-pure endpoint with smallest component [`SPECTRUM_FLOOR`].
    pub s: f64,
    /// The spectrum at this parameter.
    pub spectrum: Spectrum,
    /// Scalar curvature of the trace-one submanifold there.
    pub scal1: f64,
}

/// Evaluates the curvature along the segment from the uniform spectrum to
/// the near-pure spectrum `(1 − (n−1)·1e-6, 1e-6, …)`, at `steps + 1`
/// evenly spaced parameters. This is the dedicated boundary-approach mode:
/// random scans reject such spectra to keep their statistics clean.
///
/// # Errors
///
/// [`Error::InvalidConfig`] for `n < 2` or `steps < 1`, oracle
/// configuration errors when the oracle method is chosen, and any
/// evaluation failure (a ray is small enough that partial results are not
/// worth keeping).
pub fn ray_scan(
    n: usize,
    steps: usize,
    method: ScanMethod,
    oracle: &OracleConfig,
) -> Result<Vec<RayPoint>> {
    if n < 2 {
        return Err(Error::InvalidConfig(format!("ray dimension {n} below 2")));
    }
    if steps < 1 {
        return Err(Error::InvalidConfig("ray needs at least 1 step".into()));
    }
    if method == ScanMethod::Oracle {
        oracle.validate()?;
    }
    let top = 1.0 - (n as f64 - 1.0) * SPECTRUM_FLOOR;
    let mut points = Vec::with_capacity(steps + 1);
    for k in 0..=steps {
        let s = k as f64 / steps as f64;
        let values: Vec<f64> = (0..n)
            .map(|i| {
                let target = if i == 0 { top } else { SPECTRUM_FLOOR };
                (1.0 - s) / n as f64 + s * target
            })
            .collect();
        let spectrum = Spectrum::new(values)?;
        let scal1 = evaluate_scal1(method, &spectrum, oracle)?;
        points.push(RayPoint { s, spectrum, scal1 });
    }
    Ok(points)
}

/// Renders a report as CSV: a header line, then one row per record —
/// `index, lambda_1..lambda_n, scal1, method` — with floats at 17
/// significant digits. The uniform spectrum is the last row (index
/// `samples`). Byte-identical for identical reports.
pub fn write_csv(report: &ScanReport) -> String {
    let mut out = String::from("index");
    for i in 1..=report.n {
        out.push_str(&format!(",lambda_{i}"));
    }
    out.push_str(",scal1,method\n");
    for record in &report.records {
        out.push_str(&record.index.to_string());
        for &v in record.spectrum.values() {
            out.push(',');
            out.push_str(&float17(v));
        }
        out.push(',');
        out.push_str(&float17(record.scal1));
        out.push(',');
        out.push_str(record.method.as_str());
        out.push('\n');
    }
    out
}

/// Renders a ray as CSV: `index, s, lambda_1..lambda_n, scal1` with floats
/// at 17 significant digits.
pub fn write_ray_csv(n: usize, points: &[RayPoint]) -> String {
    let mut out = String::from("index,s");
    for i in 1..=n {
        out.push_str(&format!(",lambda_{i}"));
    }
    out.push_str(",scal1\n");
    for (idx, point) in points.iter().enumerate() {
        out.push_str(&idx.to_string());
        out.push(',');
        out.push_str(&float17(point.s));
        for &v in point.spectrum.values() {
            out.push(',');
            out.push_str(&float17(v));
        }
        out.push(',');
        out.push_str(&float17(point.scal1));
        out.push('\n');
    }
    out
}

/// A float as a JSON value: 17-digit scientific for finite values, `null`
/// otherwise (JSON has no NaN).
fn json_f64(x: f64) -> String {
    if x.is_finite() {
        float17(x)
    } else {
        "null".to_string()
    }
}

fn json_record(record: &ScanRecord) -> String {
    let spectrum: Vec<String> = record
        .spectrum
        .values()
        .iter()
        .map(|&v| json_f64(v))
        .collect();
    let partner = match record.majorizes_partner {
        Some(p) => p.to_string(),
        None => "null".to_string(),
    };
    format!(
        "{{\"index\":{},\"spectrum\":[{}],\"scal1\":{},\"method\":\"{}\",\"majorizes_partner\":{}}}",
        record.index,
        spectrum.join(","),
        json_f64(record.scal1),
        record.method.as_str(),
        partner
    )
}

/// Renders the report summary as JSON: header fields (dimension, counts,
/// seed, generator name, direction sentence), the observed extremes, the
/// violation pairs with both records inlined, per-sample failures, and the
/// cross-checks. Records at large are CSV content, not JSON content.
/// Byte-identical for identical reports.
pub fn write_json(report: &ScanReport) -> String {
    let find = |idx: usize| report.records.iter().find(|r| r.index == idx);
    let violations: Vec<String> = report
        .violations
        .iter()
        .map(|v| {
            let majorizing = find(v.majorizing).map(json_record);
            let majorized = find(v.majorized).map(json_record);
            format!(
                "{{\"majorizing\":{},\"majorized\":{},\"gap\":{}}}",
                majorizing.unwrap_or_else(|| "null".to_string()),
                majorized.unwrap_or_else(|| "null".to_string()),
                json_f64(v.gap)
            )
        })
        .collect();
    let failures: Vec<String> = report
        .failures
        .iter()
        .map(|f| {
            format!(
                "{{\"index\":{},\"message\":{}}}",
                f.index,
                serde_json::to_string(&f.message).expect("strings serialize")
            )
        })
        .collect();
    let crosschecks: Vec<String> = report
        .crosschecks
        .iter()
        .map(|c| {
            format!(
                "{{\"index\":{},\"value\":{},\"reference\":{},\"rel_gap\":{}}}",
                c.index,
                json_f64(c.value),
                json_f64(c.reference),
                json_f64(c.rel_gap)
            )
        })
        .collect();
    format!(
        "{{\n  \"n\": {},\n  \"samples\": {},\n  \"seed\": {},\n  \"method\": \"{}\",\n  \
         \"rng_algorithm\": {},\n  \"direction\": {},\n  \"scal1_at_mixed\": {},\n  \
         \"max_observed\": {},\n  \"min_observed\": {},\n  \"uniform_is_minimum\": {},\n  \
         \"comparisons\": {},\n  \"violations\": [{}],\n  \"failures\": [{}],\n  \
         \"crosschecks\": [{}],\n  \"crosschecks_pass\": {}\n}}\n",
        report.n,
        report.samples,
        report.seed,
        report.method.as_str(),
        serde_json::to_string(report.rng_algorithm).expect("strings serialize"),
        serde_json::to_string(report.direction).expect("strings serialize"),
        json_f64(report.scal1_at_mixed),
        json_f64(report.max_observed),
        json_f64(report.min_observed),
        report.uniform_is_minimum,
        report.comparisons,
        violations.join(","),
        failures.join(","),
        crosschecks.join(","),
        report.crosschecks_pass
    )
}
