//! Comma-separated numeric files: one matrix row per line, no header.
//! Vectors are stored one entry per line.

use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::linalg::{Matrix, Vector};

/// Shortest representation that parses back to the same `f64`.
pub fn format_f64(v: f64) -> String {
    format!("{v:?}")
}

fn parse_error(source_name: &str, message: impl Into<String>) -> Error {
    Error::Parse {
        source_name: source_name.to_string(),
        message: message.into(),
    }
}

/// Parses comma-separated rows; blank lines are ignored.
pub fn parse_rows(text: &str, source_name: &str) -> Result<Vec<Vec<f64>>> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let mut rows = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let record = record.map_err(|e| parse_error(source_name, e.to_string()))?;
        if record.iter().all(str::is_empty) {
            continue;
        }
        let row = record
            .iter()
            .enumerate()
            .map(|(j, field)| {
                let v: f64 = field.parse().map_err(|_| {
                    parse_error(
                        source_name,
                        format!("line {}, field {}: {field:?} is not a number", i + 1, j + 1),
                    )
                })?;
                if v.is_finite() {
                    Ok(v)
                } else {
                    Err(parse_error(
                        source_name,
                        format!("line {}, field {}: non-finite value", i + 1, j + 1),
                    ))
                }
            })
            .collect::<Result<Vec<f64>>>()?;
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(parse_error(source_name, "no data"));
    }
    Ok(rows)
}

pub fn parse_matrix(text: &str, source_name: &str) -> Result<Matrix> {
    let rows = parse_rows(text, source_name)?;
    let width = rows[0].len();
    if let Some(r) = rows.iter().position(|r| r.len() != width) {
        return Err(parse_error(
            source_name,
            format!("line {} has {} fields, expected {width}", r + 1, rows[r].len()),
        ));
    }
    Matrix::from_rows(&rows)
}

/// Accepts a single column (the written form) or a single row.
pub fn parse_vector(text: &str, source_name: &str) -> Result<Vector> {
    let rows = parse_rows(text, source_name)?;
    let entries = if rows.iter().all(|r| r.len() == 1) {
        rows.into_iter().map(|r| r[0]).collect()
    } else if rows.len() == 1 {
        rows.into_iter().next().unwrap_or_default()
    } else {
        return Err(parse_error(source_name, "expected one value per line or a single row"));
    };
    Vector::new(entries)
}

pub fn read_matrix(path: &Path) -> Result<Matrix> {
    parse_matrix(&fs::read_to_string(path)?, &path.display().to_string())
}

pub fn read_vector(path: &Path) -> Result<Vector> {
    parse_vector(&fs::read_to_string(path)?, &path.display().to_string())
}

pub fn matrix_to_csv(m: &Matrix) -> String {
    let mut out = String::new();
    for r in 0..m.rows() {
        let fields: Vec<String> = m.row(r).iter().map(|&v| format_f64(v)).collect();
        out.push_str(&fields.join(","));
        out.push('\n');
    }
    out
}

pub fn vector_to_csv<T: Copy + Into<f64>>(v: &[T]) -> String {
    v.iter().map(|&x| format_f64(x.into()) + "\n").collect()
}

/// Binary vectors are written as bare `0`/`1`.
pub fn bits_to_csv(x: &[u8]) -> String {
    x.iter().map(|b| format!("{b}\n")).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn parses_matrix_and_vector_shapes() {
        let m = parse_matrix("1, 2\n3,4\n\n", "m").unwrap();
        assert_eq!((m.rows(), m.cols()), (2, 2));
        assert_eq!(m.get(1, 0), 3.0);

        assert_eq!(parse_vector("1\n2\n3\n", "v").unwrap().as_slice(), &[1.0, 2.0, 3.0]);
        assert_eq!(parse_vector("1,2,3", "v").unwrap().as_slice(), &[1.0, 2.0, 3.0]);
        assert_eq!(bits_to_csv(&[1, 0]), "1\n0\n");
    }

    #[test]
    fn rejects_malformed_input() {
        for (text, needle) in [
            ("1,2\n3\n", "fields"),
            ("1,x\n", "not a number"),
            ("", "no data"),
            ("1,NaN\n", "non-finite"),
        ] {
            let err = parse_matrix(text, "m").unwrap_err();
            assert!(matches!(err, Error::Parse { .. }));
            assert!(err.to_string().contains(needle), "{err}");
        }
        assert!(parse_vector("1,2\n3,4\n", "v").is_err());
    }

    proptest! {
        #[test]
        fn matrix_text_round_trips_bit_exact(
            (rows, cols, data) in (1usize..6, 1usize..6).prop_flat_map(|(r, c)| {
                (Just(r), Just(c), prop::collection::vec(prop::num::f64::NORMAL | prop::num::f64::SUBNORMAL | prop::num::f64::ZERO, r * c))
            })
        ) {
            let m = Matrix::new(rows, cols, data).unwrap();
            let back = parse_matrix(&matrix_to_csv(&m), "m").unwrap();
            prop_assert_eq!(
                m.as_slice().iter().map(|v| v.to_bits()).collect::<Vec<_>>(),
                back.as_slice().iter().map(|v| v.to_bits()).collect::<Vec<_>>()
            );
        }
    }
}
