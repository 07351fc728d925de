//! Plain-text curve and response files.
//!
//! Curves arrive as comma-separated text: the header row holds the grid
//! points, each following row holds one curve sampled at those points.
//! Responses arrive as a separate file with one number per line. Parse
//! errors carry the 1-based row and column that failed; row 0 marks
//! file-level problems. Values are written with the shortest decimal form
//! that parses back to the same float, so emit → ingest round-trips exactly.

use std::path::Path;

use crate::error::{Error, Result};
use crate::hilbert::{FunctionalSample, Grid};

fn data_error(source_name: &str, row: usize, column: usize, reason: impl Into<String>) -> Error {
    Error::Data {
        source_name: source_name.to_string(),
        row,
        column,
        reason: reason.into(),
    }
}

fn parse_cell(source_name: &str, row: usize, column: usize, cell: &str) -> Result<f64> {
    let value: f64 = cell
        .trim()
        .parse()
        .map_err(|_| data_error(source_name, row, column, format!("cannot parse {cell:?} as a number")))?;
    if !value.is_finite() {
        return Err(data_error(source_name, row, column, "value is not finite"));
    }
    Ok(value)
}

/// Non-empty lines with their 1-based line numbers; blank lines are skipped
/// but keep their place in the numbering.
fn numbered_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, line)| (i + 1, line.trim_end_matches('\r')))
        .filter(|(_, line)| !line.trim().is_empty())
}

/// Parse a curve table: header of grid points, then one curve per row.
pub fn parse_curves(text: &str, source_name: &str) -> Result<(Grid, Vec<Vec<f64>>)> {
    let mut lines = numbered_lines(text);
    let (header_row, header) = lines
        .next()
        .ok_or_else(|| data_error(source_name, 0, 0, "file is empty"))?;

    let mut points = Vec::new();
    for (idx, cell) in header.split(',').enumerate() {
        let value = parse_cell(source_name, header_row, idx + 1, cell)?;
        if let Some(&last) = points.last() {
            if value <= last {
                return Err(data_error(
                    source_name,
                    header_row,
                    idx + 1,
                    format!("grid points must be strictly increasing, {value} follows {last}"),
                ));
            }
        }
        points.push(value);
    }
    if points.len() < 2 {
        return Err(data_error(
            source_name,
            header_row,
            points.len(),
            "the grid needs at least 2 points",
        ));
    }
    let p = points.len();
    let grid = Grid::trapezoid(points)?;

    let mut rows = Vec::new();
    for (row_no, line) in lines {
        let cells: Vec<&str> = line.split(',').collect();
        if cells.len() != p {
            return Err(data_error(
                source_name,
                row_no,
                cells.len().min(p) + usize::from(cells.len() > p),
                format!("expected {p} values per row, found {}", cells.len()),
            ));
        }
        let mut row = Vec::with_capacity(p);
        for (idx, cell) in cells.iter().enumerate() {
            row.push(parse_cell(source_name, row_no, idx + 1, cell)?);
        }
        rows.push(row);
    }
    if rows.len() < 2 {
        return Err(data_error(
            source_name,
            0,
            0,
            format!("need at least 2 curves, found {}", rows.len()),
        ));
    }
    Ok((grid, rows))
}

/// Parse a response file: one number per line.
pub fn parse_responses(text: &str, source_name: &str) -> Result<Vec<f64>> {
    let mut responses = Vec::new();
    for (row_no, line) in numbered_lines(text) {
        responses.push(parse_cell(source_name, row_no, 1, line)?);
    }
    if responses.is_empty() {
        return Err(data_error(source_name, 0, 0, "file is empty"));
    }
    Ok(responses)
}

pub(crate) fn read_to_string(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })
}

fn source_name(path: &Path) -> String {
    path.display().to_string()
}

/// Read and parse a curve file and a response file into one sample with
/// trapezoid quadrature weights on the header grid.
pub fn ingest(curves_path: &Path, responses_path: &Path) -> Result<FunctionalSample> {
    let curves_text = read_to_string(curves_path)?;
    let responses_text = read_to_string(responses_path)?;
    ingest_strings(
        &curves_text,
        &source_name(curves_path),
        &responses_text,
        &source_name(responses_path),
    )
}

/// [`ingest`] on already-loaded text; useful for tests and round-trips.
pub fn ingest_strings(
    curves_text: &str,
    curves_name: &str,
    responses_text: &str,
    responses_name: &str,
) -> Result<FunctionalSample> {
    let (grid, rows) = parse_curves(curves_text, curves_name)?;
    let responses = parse_responses(responses_text, responses_name)?;
    if responses.len() != rows.len() {
        return Err(data_error(
            responses_name,
            0,
            0,
            format!(
                "length mismatch: {} curves but {} responses",
                rows.len(),
                responses.len()
            ),
        ));
    }
    FunctionalSample::from_rows(grid, rows, responses)
}

fn join_numbers(values: &[f64]) -> String {
    values
        .iter()
        .map(|v| v.to_string())
        .collect::<Vec<_>>()
        .join(",")
}

/// Render the curve table: grid header plus one row per curve.
pub fn emit_curves(sample: &FunctionalSample) -> String {
    let mut out = String::new();
    out.push_str(&join_numbers(sample.grid().points()));
    out.push('\n');
    for i in 0..sample.n() {
        out.push_str(&join_numbers(sample.curve(i)));
        out.push('\n');
    }
    out
}

/// Render the response file: one value per line.
pub fn emit_responses(sample: &FunctionalSample) -> String {
    let mut out = String::new();
    for y in sample.responses() {
        out.push_str(&y.to_string());
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn well_formed_table_parses() {
        let curves = "0,0.5,1,2\n1,2,3,4\n4,3,2,1\n0,0,0,0\n";
        let responses = "1.5\n-2\n0\n";
        let sample = ingest_strings(curves, "c", responses, "r").unwrap();
        assert_eq!(sample.n(), 3);
        assert_eq!(sample.p(), 4);
        assert_eq!(sample.curve(1), &[4.0, 3.0, 2.0, 1.0]);
        assert_eq!(sample.responses(), &[1.5, -2.0, 0.0]);
        assert_eq!(sample.grid().domain_length(), 2.0);
    }

    #[test]
    fn non_monotone_header_names_the_column() {
        let err = parse_curves("0,1,0.5\n1,2,3\n4,5,6\n", "c").unwrap_err();
        match err {
            Error::Data { row, column, .. } => {
                assert_eq!(row, 1);
                assert_eq!(column, 3);
            }
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn ragged_row_is_located() {
        let err = parse_curves("0,1,2\n1,2,3\n4,5\n", "c").unwrap_err();
        match err {
            Error::Data { row, reason, .. } => {
                assert_eq!(row, 3);
                assert!(reason.contains("expected 3"));
            }
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn bad_cells_are_located() {
        let err = parse_curves("0,1,2\n1,x,3\n4,5,6\n", "c").unwrap_err();
        match err {
            Error::Data { row, column, .. } => {
                assert_eq!((row, column), (2, 2));
            }
            other => panic!("unexpected error {other:?}"),
        }
        let err = parse_curves("0,1,2\n1,inf,3\n4,5,6\n", "c").unwrap_err();
        match err {
            Error::Data { row, column, .. } => assert_eq!((row, column), (2, 2)),
            other => panic!("unexpected error {other:?}"),
        }
        let err = parse_responses("1\nnan\n", "r").unwrap_err();
        match err {
            Error::Data { row, .. } => assert_eq!(row, 2),
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn response_count_mismatch_is_reported() {
        let curves = "0,1\n1,2\n3,4\n5,6\n";
        let err = ingest_strings(curves, "c", "1\n2\n", "r").unwrap_err();
        match err {
            Error::Data { reason, .. } => assert!(reason.contains("length mismatch")),
            other => panic!("unexpected error {other:?}"),
        }
        assert_eq!(
            ingest_strings(curves, "c", "1\n2\n", "r").unwrap_err().exit_code(),
            3
        );
    }

    #[test]
    fn single_curve_is_rejected() {
        let err = parse_curves("0,1\n1,2\n", "c").unwrap_err();
        assert_eq!(err.exit_code(), 3);
    }

    #[test]
    fn blank_lines_are_skipped_but_keep_numbering() {
        let curves = "0,1,2\n\n1,2,3\n\n4,5,6\n";
        let (_, rows) = parse_curves(curves, "c").unwrap();
        assert_eq!(rows.len(), 2);
        let err = parse_curves("0,1,2\n\n1,2,3\n\n4,bad,6\n", "c").unwrap_err();
        match err {
            Error::Data { row, .. } => assert_eq!(row, 5),
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn emit_then_ingest_round_trips_exactly() {
        let grid = Grid::uniform(0.0, 1.0, 7).unwrap();
        let rows: Vec<Vec<f64>> = (0..4)
            .map(|i| {
                (0..7)
                    .map(|k| ((i * 7 + k) as f64 / 3.0).sin() * 1e-3 + 1.0 / 3.0)
                    .collect()
            })
            .collect();
        let responses = vec![1.0 / 3.0, -2.5e-17, 4.0, 0.1 + 0.2];
        let sample = FunctionalSample::from_rows(grid, rows, responses).unwrap();
        let back = ingest_strings(
            &emit_curves(&sample),
            "c",
            &emit_responses(&sample),
            "r",
        )
        .unwrap();
        assert_eq!(back.grid().points(), sample.grid().points());
        assert_eq!(back.responses(), sample.responses());
        for i in 0..sample.n() {
            assert_eq!(back.curve(i), sample.curve(i));
        }
    }
}
