use std::io::Write;

use crate::error::{Error, Result};
use crate::solver::SweepEntry;

pub const SWEEP_COLUMNS: [&str; 8] = [
    "lambda_log10",
    "vnorm",
    "supnorm",
    "c_lambda",
    "residual",
    "vnorm_pow_bound",
    "margin",
    "status",
];

/// RFC 4180 table with a header row, also for an empty sweep.
pub fn write_sweep_csv<W: Write>(out: W, table: &[SweepEntry]) -> Result<()> {
    let mut w = csv::WriterBuilder::new()
        .has_headers(false)
        .from_writer(out);
    let csv_err = |e: csv::Error| Error::Io(std::io::Error::other(e));
    w.write_record(SWEEP_COLUMNS).map_err(csv_err)?;
    for e in table {
        w.serialize(e).map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_sweep_csv(text: &str) -> Result<Vec<SweepEntry>> {
    let mut r = csv::Reader::from_reader(text.as_bytes());
    let headers = r
        .headers()
        .map_err(|e| Error::Parse(e.to_string()))?
        .clone();
    if headers.iter().ne(SWEEP_COLUMNS) {
        return Err(Error::Parse(format!("unexpected sweep header {headers:?}")));
    }
    r.deserialize()
        .collect::<std::result::Result<Vec<SweepEntry>, _>>()
        .map_err(|e| Error::Parse(e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_table_is_header_only() {
        let mut buf = Vec::new();
        write_sweep_csv(&mut buf, &[]).unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap(),
            SWEEP_COLUMNS.join(",") + "\n"
        );
    }

    #[test]
    fn rows_round_trip_and_quote_status() {
        let rows = vec![
            SweepEntry {
                lambda_log10: 55.0,
                vnorm: 1.5e-8,
                supnorm: 3e-9,
                c_lambda: 1e-24,
                residual: 1e-11,
                vnorm_pow_bound: 2e-10,
                margin: 0.99,
                status: "ok".into(),
            },
            SweepEntry {
                lambda_log10: 0.0,
                vnorm: f64::NAN,
                supnorm: f64::NAN,
                c_lambda: f64::NAN,
                residual: f64::NAN,
                vnorm_pow_bound: 1e3,
                margin: f64::NAN,
                status: "mountain-pass geometry not verified: endpoint, positive".into(),
            },
        ];
        let mut buf = Vec::new();
        write_sweep_csv(&mut buf, &rows).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().count(), 3);
        assert!(text.contains("\"mountain-pass geometry not verified: endpoint, positive\""));
        let back = read_sweep_csv(&text).unwrap();
        assert_eq!(back[0], rows[0]);
        assert!(back[1].vnorm.is_nan() && back[1].status == rows[1].status);
    }
}
