//! CSV input and output for point sets.
//!
//! Rows are observations, every field numeric; with `has_labels` the last
//! column is kept as a string label instead. Parsing is strict: ragged rows,
//! non-numeric cells and non-finite values are all reported with their
//! position rather than patched over.

use std::io::Write;
use std::path::Path;

use ndarray::Array2;

use crate::error::{Error, Result};
use crate::model::DataSet;

/// Parse CSV text into a data set.
pub fn parse_csv(text: &str, has_labels: bool) -> Result<DataSet> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .flexible(false)
        .from_reader(text.as_bytes());

    let mut values: Vec<f64> = Vec::new();
    let mut labels: Vec<String> = Vec::new();
    let mut width: Option<usize> = None;
    let mut rows = 0usize;

    for (idx, record) in reader.records().enumerate() {
        let record = record.map_err(|e| csv_error(idx, e))?;
        let total = record.len();
        let numeric = if has_labels { total.saturating_sub(1) } else { total };
        if numeric == 0 {
            return Err(Error::Parse {
                context: format!("row {}", idx + 1),
                message: "no feature columns".into(),
            });
        }
        match width {
            None => width = Some(numeric),
            Some(w) if w != numeric => {
                return Err(Error::Parse {
                    context: format!("row {}", idx + 1),
                    message: format!("expected {w} feature columns, found {numeric}"),
                });
            }
            _ => {}
        }
        for col in 0..numeric {
            let field = &record[col];
            let v: f64 = field.parse().map_err(|_| Error::Parse {
                context: format!("row {}, column {}", idx + 1, col + 1),
                message: format!("cannot parse '{field}' as a number"),
            })?;
            if !v.is_finite() {
                return Err(Error::Parse {
                    context: format!("row {}, column {}", idx + 1, col + 1),
                    message: format!("non-finite value '{field}'"),
                });
            }
            values.push(v);
        }
        if has_labels {
            labels.push(record[total - 1].to_string());
        }
        rows += 1;
    }

    let width = width.ok_or_else(|| Error::Parse {
        context: "input".into(),
        message: "no rows".into(),
    })?;
    let points = Array2::from_shape_vec((rows, width), values)
        .expect("row width is enforced above");
    DataSet::new(points, has_labels.then_some(labels))
}

/// Read a CSV file into a data set.
pub fn read_csv(path: impl AsRef<Path>, has_labels: bool) -> Result<DataSet> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_csv(&text, has_labels)
}

/// Write points (and labels, when given) as CSV. Floats use the shortest
/// representation that parses back to the same bits.
pub fn write_csv_to<W: Write>(
    writer: W,
    points: &Array2<f64>,
    labels: Option<&[String]>,
) -> std::io::Result<()> {
    let mut w = csv::WriterBuilder::new()
        .has_headers(false)
        .from_writer(writer);
    for (i, row) in points.outer_iter().enumerate() {
        let mut fields: Vec<String> = row.iter().map(|v| format!("{v}")).collect();
        if let Some(ls) = labels {
            fields.push(ls[i].clone());
        }
        w.write_record(&fields)?;
    }
    w.flush()
}

/// [`write_csv_to`] aimed at a file path.
pub fn write_csv(
    path: impl AsRef<Path>,
    points: &Array2<f64>,
    labels: Option<&[String]>,
) -> Result<()> {
    let path = path.as_ref();
    let file = std::fs::File::create(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    write_csv_to(file, points, labels).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn csv_error(row: usize, e: csv::Error) -> Error {
    Error::Parse {
        context: format!("row {}", row + 1),
        message: e.to_string(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    #[test]
    fn numeric_rows_parse() {
        let data = parse_csv("1.5,2\n-3,4e-1\n", false).unwrap();
        assert_eq!(data.n(), 2);
        assert_eq!(data.dim(), 2);
        assert_eq!(data.points()[(1, 1)], 0.4);
        assert!(data.labels().is_none());
    }

    #[test]
    fn labels_come_from_the_last_column() {
        let data = parse_csv("1,2,cat\n3,4,\"dog,ish\"\n", true).unwrap();
        assert_eq!(data.dim(), 2);
        assert_eq!(data.labels().unwrap(), &["cat".to_string(), "dog,ish".to_string()]);
    }

    #[test]
    fn ragged_rows_report_their_position() {
        let err = parse_csv("1,2\n3\n", false).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("row 2"), "{msg}");
    }

    #[test]
    fn bad_cells_report_row_and_column() {
        let err = parse_csv("1,2\n3,oops\n", false).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("row 2, column 2"), "{msg}");
        assert!(msg.contains("oops"), "{msg}");
    }

    #[test]
    fn non_finite_values_are_rejected() {
        for bad in ["NaN", "inf", "-inf"] {
            let err = parse_csv(&format!("1,{bad}\n"), false).unwrap_err();
            assert!(err.to_string().contains("non-finite"), "{bad}");
        }
    }

    #[test]
    fn empty_input_is_an_error() {
        assert!(parse_csv("", false).is_err());
        assert!(parse_csv("\n", false).is_err());
    }

    #[test]
    fn label_only_rows_are_an_error() {
        let err = parse_csv("cat\ndog\n", true).unwrap_err();
        assert!(err.to_string().contains("no feature columns"));
    }

    #[test]
    fn write_then_parse_preserves_bits() {
        let pts = array![[0.1, 2.0 / 3.0], [1e-300, -5.5]];
        let mut buf = Vec::new();
        write_csv_to(&mut buf, &pts, None).unwrap();
        let back = parse_csv(std::str::from_utf8(&buf).unwrap(), false).unwrap();
        for (a, b) in pts.iter().zip(back.points().iter()) {
            assert_eq!(a.to_bits(), b.to_bits());
        }
    }

    #[test]
    fn labels_round_trip_with_quoting() {
        let pts = array![[1.0], [2.0]];
        let labels = vec!["plain".to_string(), "with,comma".to_string()];
        let mut buf = Vec::new();
        write_csv_to(&mut buf, &pts, Some(&labels)).unwrap();
        let back = parse_csv(std::str::from_utf8(&buf).unwrap(), true).unwrap();
        assert_eq!(back.labels().unwrap(), labels.as_slice());
    }
}
