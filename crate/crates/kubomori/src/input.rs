//! Parsers for the two text input formats: comma-separated spectra and
//! JSON matrices.
//!
//! These are the only functions in the crate that consume untrusted
//! bytes, so they are written defensively: every rejection is a typed
//! error, never a panic, and accepted inputs are capped at [`MAX_SIDE`]
//! so hostile input cannot request unbounded work downstream. Format
//! problems (malformed numbers, ragged or non-square arrays, oversized
//! inputs, non-finite entries) surface as [`Error::Parse`]; inputs that
//! parse cleanly but describe an invalid object (a non-positive spectrum
//! entry, say) surface as the same domain errors the constructors raise
//! everywhere else, so callers can tell the two failure classes apart.
//!
//! Both parsers have dedicated fuzz targets under `fuzz/`.

use crate::matcore::{Mat, Spectrum};
use crate::{Error, Result};

/// Largest accepted side length (matrix side or spectrum length).
///
/// Everything downstream is dense with up-to-`O(n⁶)` curvature sweeps, so
/// desk-scale inputs are the design point and the cap costs nothing real;
/// it exists to bound the work an untrusted input can demand.
pub const MAX_SIDE: usize = 64;

/// Parses a comma-separated list of positive reals into a [`Spectrum`]
/// (which sorts descending and enforces positivity).
///
/// Whitespace around entries is ignored. Entries must be finite — `inf`
/// and `nan` spellings parse as numbers but are rejected here.
///
/// # Errors
///
/// [`Error::Parse`] for an empty list, a malformed or non-finite entry,
/// or more than [`MAX_SIDE`] entries; [`Error::NotPositiveDefinite`] for
/// entries that parse but are not strictly positive.
pub fn parse_spectrum(text: &str) -> Result<Spectrum> {
    let trimmed = text.trim();
    if trimmed.is_empty() {
        return Err(Error::Parse("spectrum input is empty".into()));
    }
    let mut values = Vec::new();
    for (i, token) in trimmed.split(',').enumerate() {
        if i >= MAX_SIDE {
            return Err(Error::Parse(format!(
                "spectrum has more than {MAX_SIDE} entries"
            )));
        }
        let token = token.trim();
        let value: f64 = token
            .parse()
            .map_err(|_| Error::Parse(format!("spectrum entry {:?} is not a number", token)))?;
        if !value.is_finite() {
            return Err(Error::Parse(format!(
                "spectrum entry {token:?} is not finite"
            )));
        }
        values.push(value);
    }
    Spectrum::new(values)
}

/// Parses a JSON 2-D array of numbers into a square [`Mat`].
///
/// The matrix is returned exactly as written — symmetrization and
/// positive-definiteness checks are the caller's explicit next steps, so
/// a caller can decide (and report) how asymmetric the input was.
///
/// # Errors
///
/// [`Error::Parse`] for invalid JSON, non-number entries, a ragged or
/// non-square or empty array, a side length above [`MAX_SIDE`], or
/// non-finite entries (out-of-range literals included).
pub fn parse_matrix_json(text: &str) -> Result<Mat> {
    let rows: Vec<Vec<f64>> = serde_json::from_str(text)
        .map_err(|e| Error::Parse(format!("matrix is not a JSON 2-D array of numbers: {e}")))?;
    let n = rows.len();
    if n == 0 {
        return Err(Error::Parse("matrix input is empty".into()));
    }
    if n > MAX_SIDE {
        return Err(Error::Parse(format!(
            "matrix side length {n} exceeds the cap of {MAX_SIDE}"
        )));
    }
    let mut mat = Mat::zeros(n);
    for (i, row) in rows.iter().enumerate() {
        if row.len() != n {
            return Err(Error::Parse(format!(
                "matrix is ragged or not square: {n} rows but row {i} has {} entries",
                row.len()
            )));
        }
        for (j, &value) in row.iter().enumerate() {
            if !value.is_finite() {
                return Err(Error::Parse(format!(
                    "matrix entry ({i}, {j}) is not finite"
                )));
            }
            mat[(i, j)] = value;
        }
    }
    Ok(mat)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matcore::{PosDefMatrix, SymMatrix};

    #[test]
    fn spectrum_parses_and_sorts() {
        let s = parse_spectrum(" 0.2 , 0.5,0.3 ").unwrap();
        assert_eq!(s.values(), &[0.5, 0.3, 0.2]);
        assert!((s.trace() - 1.0).abs() < 1e-15);
        assert_eq!(parse_spectrum("2.5").unwrap().values(), &[2.5]);
        assert_eq!(parse_spectrum("1e-3,1").unwrap().values(), &[1.0, 1e-3]);
    }

    #[test]
    fn spectrum_rejects_malformed_text_as_parse_errors() {
        for bad in ["", "   ", "0.5,abc", "0.5,inf", "nan", "1,,2", "0.5;0.5"] {
            assert!(
                matches!(parse_spectrum(bad), Err(Error::Parse(_))),
                "{bad:?} should be a parse error"
            );
        }
    }

    #[test]
    fn spectrum_length_cap_is_exact() {
        let ok = vec!["0.1"; MAX_SIDE].join(",");
        assert_eq!(parse_spectrum(&ok).unwrap().n(), MAX_SIDE);
        let too_long = vec!["0.1"; MAX_SIDE + 1].join(",");
        assert!(matches!(parse_spectrum(&too_long), Err(Error::Parse(_))));
    }

    #[test]
    fn spectrum_positivity_is_a_domain_error_not_a_parse_error() {
        assert!(matches!(
            parse_spectrum("0.5,-0.5"),
            Err(Error::NotPositiveDefinite { .. })
        ));
        assert!(matches!(
            parse_spectrum("0,1"),
            Err(Error::NotPositiveDefinite { .. })
        ));
    }

    #[test]
    fn matrix_parses_numbers_and_integers() {
        let m = parse_matrix_json("[[2, 0.5], [0.5, 1]]").unwrap();
        assert_eq!(m.n(), 2);
        assert_eq!(m[(0, 1)], 0.5);
        assert_eq!(m[(1, 1)], 1.0);
    }

    #[test]
    fn matrix_is_returned_unsymmetrized() {
        let m = parse_matrix_json("[[1, 2], [0, 1]]").unwrap();
        assert_eq!(m.max_asymmetry(), 2.0);
        let sym = SymMatrix::symmetric_part(&m);
        assert_eq!(sym.get(0, 1), 1.0);
        assert_eq!(sym.get(1, 0), 1.0);
    }

    #[test]
    fn matrix_rejects_bad_shapes_and_values() {
        for bad in [
            "not json",
            "[[1, 2], [3]]",
            "[[1, 2]]",
            "[]",
            "[[]]",
            "[[\"a\"]]",
            "[[1, 0], [0, 1]] trailing",
            "[[1e999, 0], [0, 1]]",
            "{\"rows\": 2}",
        ] {
            assert!(
                matches!(parse_matrix_json(bad), Err(Error::Parse(_))),
                "{bad:?} should be a parse error"
            );
        }
    }

    #[test]
    fn matrix_side_cap_is_exact() {
        let identity = |n: usize| {
            let rows: Vec<String> = (0..n)
                .map(|i| {
                    let row: Vec<&str> = (0..n).map(|j| if i == j { "1" } else { "0" }).collect();
                    format!("[{}]", row.join(","))
                })
                .collect();
            format!("[{}]", rows.join(","))
        };
        assert_eq!(
            parse_matrix_json(&identity(MAX_SIDE)).unwrap().n(),
            MAX_SIDE
        );
        assert!(matches!(
            parse_matrix_json(&identity(MAX_SIDE + 1)),
            Err(Error::Parse(_))
        ));
    }

    #[test]
    fn parsed_matrix_feeds_the_positive_definite_constructor() {
        let m = parse_matrix_json("[[0.6, 0.1], [0.1, 0.4]]").unwrap();
        let d = PosDefMatrix::new(SymMatrix::symmetric_part(&m)).unwrap();
        assert!((d.spectrum().trace() - 1.0).abs() < 1e-12);
    }
}
