//! Delimited numeric tables with an optional class-label column.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::ewkm::Dataset;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LabelColumn {
    None,
    Last,
    Index(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DelimitedOptions {
    pub delimiter: u8,
    pub has_header: bool,
    pub label_column: LabelColumn,
}

impl Default for DelimitedOptions {
    fn default() -> Self {
        Self {
            delimiter: b',',
            has_header: false,
            label_column: LabelColumn::None,
        }
    }
}

/// Parses a rectangular table. Rows/columns in errors are 1-based line and
/// column numbers of the input. Labels that are all non-negative integers are
/// kept as-is; otherwise distinct strings are numbered in order of first
/// appearance.
pub fn read_delimited(bytes: &[u8], opts: &DelimitedOptions) -> Result<Dataset> {
    let mut reader = csv::ReaderBuilder::new()
        .delimiter(opts.delimiter)
        .has_headers(opts.has_header)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(bytes);

    let mut width = None;
    let mut points = Vec::new();
    let mut raw_labels = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| Error::Io(e.to_string()))?;
        let line = record.position().map_or(0, |p| p.line() as usize);
        let expected = *width.get_or_insert(record.len());
        if record.len() != expected {
            return Err(Error::RaggedRows {
                row: line,
                expected,
                found: record.len(),
            });
        }
        let label_idx = match opts.label_column {
            LabelColumn::None => None,
            LabelColumn::Last => Some(expected.saturating_sub(1)),
            LabelColumn::Index(i) if i < expected => Some(i),
            LabelColumn::Index(i) => {
                return Err(Error::InvalidConfig(format!(
                    "label column {} outside a {expected}-column table",
                    i + 1
                )))
            }
        };
        let mut row = Vec::with_capacity(expected);
        for (col, cell) in record.iter().enumerate() {
            if Some(col) == label_idx {
                raw_labels.push(cell.to_string());
                continue;
            }
            let v = cell
                .parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| Error::NonNumericCell {
                    row: line,
                    column: col + 1,
                    cell: cell.to_string(),
                })?;
            row.push(v);
        }
        points.push(row);
    }
    let labels = (opts.label_column != LabelColumn::None).then(|| encode_labels(&raw_labels));
    Dataset::new(points, labels)
}

fn encode_labels(raw: &[String]) -> Vec<usize> {
    if let Some(ints) = raw.iter().map(|s| s.parse::<usize>().ok()).collect::<Option<Vec<_>>>() {
        return ints;
    }
    let mut ids = HashMap::new();
    raw.iter()
        .map(|s| {
            let next = ids.len();
            *ids.entry(s.as_str()).or_insert(next)
        })
        .collect()
}

/// Writes points (shortest round-trip float text) with labels as a trailing
/// column when present.
pub fn write_delimited(data: &Dataset, delimiter: u8) -> Result<Vec<u8>> {
    let mut writer = csv::WriterBuilder::new()
        .delimiter(delimiter)
        .from_writer(Vec::new());
    for (i, x) in data.points().iter().enumerate() {
        let mut fields: Vec<String> = x.iter().map(|v| v.to_string()).collect();
        if let Some(labels) = data.labels() {
            fields.push(labels[i].to_string());
        }
        writer.write_record(&fields).map_err(|e| Error::Io(e.to_string()))?;
    }
    writer.into_inner().map_err(|e| Error::Io(e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn labelled() -> DelimitedOptions {
        DelimitedOptions {
            label_column: LabelColumn::Last,
            ..Default::default()
        }
    }

    #[test]
    fn trailing_labels() {
        let d = read_delimited(b"1,2,0\n3,4,1\n5,6,1\n", &labelled()).unwrap();
        assert_eq!(d.len(), 3);
        assert_eq!(d.features(), 2);
        assert_eq!(d.labels().unwrap(), &[0, 1, 1]);
        assert_eq!(d.points()[2], vec![5.0, 6.0]);
    }

    #[test]
    fn header_is_skipped() {
        let plain = read_delimited(b"1,2,0\n3,4,1\n", &labelled()).unwrap();
        let opts = DelimitedOptions {
            has_header: true,
            ..labelled()
        };
        assert_eq!(read_delimited(b"a,b,class\n1,2,0\n3,4,1\n", &opts).unwrap(), plain);
    }

    #[test]
    fn string_labels_and_other_delimiters() {
        let opts = DelimitedOptions {
            delimiter: b';',
            label_column: LabelColumn::Index(0),
            ..Default::default()
        };
        let d = read_delimited(b"b;1.5\na;2\nb;3\n", &opts).unwrap();
        assert_eq!(d.labels().unwrap(), &[0, 1, 0]);
        assert_eq!(d.points(), &[vec![1.5], vec![2.0], vec![3.0]]);
    }

    #[test]
    fn diagnostics() {
        let opts = DelimitedOptions::default();
        assert_eq!(
            read_delimited(b"1,2\n3\n", &opts),
            Err(Error::RaggedRows { row: 2, expected: 2, found: 1 })
        );
        assert_eq!(
            read_delimited(b"1,2\n3,x\n", &opts),
            Err(Error::NonNumericCell { row: 2, column: 2, cell: "x".into() })
        );
        assert!(matches!(read_delimited(b"1,\n", &opts), Err(Error::NonNumericCell { .. })));
        assert!(matches!(read_delimited(b"1,nan\n", &opts), Err(Error::NonNumericCell { .. })));
        assert_eq!(read_delimited(b"", &opts), Err(Error::Empty));
    }

    #[test]
    fn round_trip_full_precision() {
        let d = Dataset::new(
            vec![vec![0.1, 1.0 / 3.0], vec![-2.5e-300, 123456789.123456789]],
            Some(vec![4, 7]),
        )
        .unwrap();
        let bytes = write_delimited(&d, b',').unwrap();
        assert_eq!(read_delimited(&bytes, &labelled()).unwrap(), d);
    }
}
