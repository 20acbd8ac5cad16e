//! CSV in and out: metric curves (`iteration,precision,recall,f1`) and
//! input series (`iteration,value`).

use std::io::{Read, Write};

use super::plateau::SeriesPoint;
use super::MetricPoint;
use crate::error::{Error, Result};

pub fn write_metrics_csv<W: Write>(out: W, points: &[MetricPoint]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["iteration", "precision", "recall", "f1"])?;
    for p in points {
        w.write_record([
            p.iteration.to_string(),
            p.precision.to_string(),
            p.recall.to_string(),
            p.f1.to_string(),
        ])?;
    }
    w.flush().map_err(|e| Error::io("<csv>", e))?;
    Ok(())
}

/// Read an `iteration,value` series. A header row is required.
pub fn read_series_csv<R: Read>(input: R) -> Result<Vec<SeriesPoint>> {
    let mut r = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(input);
    let headers = r.headers()?.clone();
    let col = |name: &str| {
        headers
            .iter()
            .position(|h| h.eq_ignore_ascii_case(name))
            .ok_or_else(|| Error::InvalidArgument(format!("series CSV lacks a {name:?} column")))
    };
    let (it_col, val_col) = (col("iteration")?, col("value")?);
    let mut out = Vec::new();
    for (row, rec) in r.records().enumerate() {
        let rec = rec?;
        let field = |c: usize| rec.get(c).unwrap_or("");
        let iteration = field(it_col)
            .parse()
            .map_err(|_| Error::InvalidArgument(format!("row {}: bad iteration {:?}", row + 1, field(it_col))))?;
        let value = field(val_col)
            .parse()
            .map_err(|_| Error::InvalidArgument(format!("row {}: bad value {:?}", row + 1, field(val_col))))?;
        out.push(SeriesPoint { iteration, value });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn metrics_header() {
        let mut buf = Vec::new();
        write_metrics_csv(
            &mut buf,
            &[MetricPoint {
                iteration: 600,
                precision: 0.5,
                recall: 1.0,
                f1: 2.0 / 3.0,
            }],
        )
        .unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("iteration,precision,recall,f1"));
        assert!(lines.next().unwrap().starts_with("600,0.5,1,0.666"));
    }

    #[test]
    fn series_parse() {
        let s = read_series_csv("iteration, value\n100, 0.9\n200,0.7\n".as_bytes()).unwrap();
        assert_eq!(
            s,
            vec![
                SeriesPoint {
                    iteration: 100,
                    value: 0.9
                },
                SeriesPoint {
                    iteration: 200,
                    value: 0.7
                }
            ]
        );
        assert!(read_series_csv("step,value\n1,2\n".as_bytes()).is_err());
        assert!(read_series_csv("iteration,value\nx,2\n".as_bytes()).is_err());
    }
}
