use std::io::{Read, Write};
use std::path::Path;

use super::{Dataset, DatasetError, Domain, TestCase};

/// Which columns hold the expected outputs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Target {
    /// The last `n` columns.
    Last(usize),
    /// Zero-based column indices.
    Columns(Vec<usize>),
    /// Header names; needs `has_header`.
    Named(Vec<String>),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CsvOptions {
    pub has_header: bool,
    pub target: Target,
    pub domain: Domain,
}

impl Default for CsvOptions {
    fn default() -> Self {
        CsvOptions {
            has_header: true,
            target: Target::Last(1),
            domain: Domain::RealSr,
        }
    }
}

fn target_columns(
    target: &Target,
    header: Option<&csv::StringRecord>,
    width: usize,
) -> Result<Vec<usize>, DatasetError> {
    let cols = match target {
        Target::Last(n) => {
            if *n == 0 || *n >= width {
                return Err(DatasetError::MissingTarget(format!("last {n} of {width}")));
            }
            (width - n..width).collect()
        }
        Target::Columns(cols) => {
            if let Some(bad) = cols.iter().find(|&&c| c >= width) {
                return Err(DatasetError::MissingTarget(bad.to_string()));
            }
            cols.clone()
        }
        Target::Named(names) => {
            let header = header.ok_or_else(|| DatasetError::MissingTarget(names.join(",")))?;
            names
                .iter()
                .map(|n| {
                    header
                        .iter()
                        .position(|h| h.trim() == n)
                        .ok_or_else(|| DatasetError::MissingTarget(n.clone()))
                })
                .collect::<Result<_, _>>()?
        }
    };
    Ok(cols)
}

/// Read a dataset from CSV text. Blank lines are skipped; every row must
/// have the width of the first.
pub fn read_csv<R: Read>(
    reader: R,
    name: &str,
    options: &CsvOptions,
) -> Result<Dataset, DatasetError> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(options.has_header)
        .trim(csv::Trim::All)
        .flexible(true)
        .from_reader(reader);
    let header = if options.has_header {
        Some(rdr.headers().map_err(csv_err)?.clone())
    } else {
        None
    };
    let mut columns: Option<Vec<usize>> = None;
    let mut width = 0;
    let mut cases = Vec::new();
    for (row, record) in rdr.records().enumerate() {
        let record = record.map_err(csv_err)?;
        if record.iter().all(|f| f.is_empty()) {
            continue;
        }
        let targets = match &columns {
            Some(c) => c,
            None => {
                width = record.len();
                columns.insert(target_columns(&options.target, header.as_ref(), width)?)
            }
        };
        if record.len() != width {
            return Err(DatasetError::ArityMismatch {
                row,
                expected: width,
                found: record.len(),
            });
        }
        let mut inputs = Vec::with_capacity(width - targets.len());
        let mut outputs = vec![0.0; targets.len()];
        for (column, cell) in record.iter().enumerate() {
            let value: f64 = cell.parse().map_err(|_| DatasetError::NonNumericCell {
                row,
                column,
                value: cell.to_string(),
            })?;
            match targets.iter().position(|&t| t == column) {
                Some(k) => outputs[k] = value,
                None => inputs.push(value),
            }
        }
        cases.push(TestCase {
            id: cases.len(),
            inputs,
            outputs,
        });
    }
    Dataset::new(name, options.domain, cases)
}

pub fn load_csv(path: &Path, options: &CsvOptions) -> Result<Dataset, DatasetError> {
    let name = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "dataset".to_string());
    read_csv(std::fs::File::open(path)?, &name, options)
}

fn csv_err(e: csv::Error) -> DatasetError {
    let row = e.position().map(|p| p.line() as usize).unwrap_or(0);
    DatasetError::Parse {
        row,
        message: e.to_string(),
    }
}

/// Write inputs then outputs with an `x0.. y0..` header. Values use the
/// shortest representation that parses back to the same `f64`.
pub fn write_csv<W: Write>(dataset: &Dataset, writer: W) -> Result<(), DatasetError> {
    let mut w = csv::Writer::from_writer(writer);
    let header: Vec<String> = (0..dataset.feature_count())
        .map(|i| format!("x{i}"))
        .chain((0..dataset.output_count()).map(|i| format!("y{i}")))
        .collect();
    w.write_record(&header).map_err(csv_err)?;
    for case in dataset.cases() {
        let row: Vec<String> = case
            .inputs
            .iter()
            .chain(&case.outputs)
            .map(|v| v.to_string())
            .collect();
        w.write_record(&row).map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        let d = crate::datasets::gen_synthetic_sr(crate::datasets::SrBenchmark::Nguyen10, 2);
        let mut buf = Vec::new();
        write_csv(&d, &mut buf).unwrap();
        let back = read_csv(buf.as_slice(), "nguyen-10", &CsvOptions::default()).unwrap();
        assert_eq!(back, d);
    }

    #[test]
    fn named_and_indexed_targets() {
        let text = "a,y,b\n1,10,2\n3,30,4\n";
        let opts = CsvOptions {
            target: Target::Named(vec!["y".into()]),
            ..CsvOptions::default()
        };
        let d = read_csv(text.as_bytes(), "t", &opts).unwrap();
        assert_eq!(d.cases()[1].inputs, [3.0, 4.0]);
        assert_eq!(d.cases()[1].outputs, [30.0]);
        let opts = CsvOptions {
            has_header: false,
            target: Target::Columns(vec![0]),
            ..CsvOptions::default()
        };
        let d = read_csv("5,6\n7,8\n".as_bytes(), "t", &opts).unwrap();
        assert_eq!(d.cases()[0].outputs, [5.0]);
    }

    #[test]
    fn bad_cells_are_reported() {
        let err = read_csv("x,y\n1,2\n1,abc\n".as_bytes(), "t", &CsvOptions::default());
        assert!(matches!(
            err,
            Err(DatasetError::NonNumericCell {
                row: 1,
                column: 1,
                ..
            })
        ));
        let err = read_csv("x,y\n1,2\n1\n".as_bytes(), "t", &CsvOptions::default());
        assert!(matches!(
            err,
            Err(DatasetError::ArityMismatch { row: 1, .. })
        ));
        let err = read_csv("x,y\n".as_bytes(), "t", &CsvOptions::default());
        assert!(matches!(err, Err(DatasetError::Empty)));
    }
}
