//! CSV sinks with fixed headers. Every row is flushed as it is written so
//! an interrupted run leaves a parseable prefix.

use std::fs::File;
use std::io::Write;
use std::path::Path;

use anyhow::{Context, Result};

pub const RUNS_HEADER: &[&str] = &[
    "n",
    "p_cut",
    "d_sigma",
    "run_index",
    "seed",
    "sigma_max_single",
    "p_at_break",
];
pub const SUMMARY_HEADER: &[&str] = &["n", "p_cut", "d_sigma", "mean_sigma_max", "stderr", "runs"];
pub const EXTRAPOLATION_HEADER: &[&str] = &[
    "n", "p_cut", "zeta", "zeta_err", "xi", "xi_err", "alpha", "alpha_err",
];
pub const FITS_HEADER: &[&str] = &[
    "model",
    "slice_key",
    "param1",
    "param1_err",
    "param2",
    "param2_err",
    "param3",
    "param3_err",
];
pub const TABLE1_HEADER: &[&str] = &["n", "N", "p_cut", "sigma_max", "sigma_err"];
pub const FIG1_HEADER: &[&str] = &["log10_N", "log10_sigma_max"];
pub const CURVE_HEADER: &[&str] = &["m", "A", "B", "P", "is_m_max"];

/// Shortest round-trip decimal; non-finite values become an empty field.
pub fn real(v: f64) -> String {
    if v.is_finite() {
        format!("{v}")
    } else {
        String::new()
    }
}

pub fn opt_real(v: Option<f64>) -> String {
    v.map(real).unwrap_or_default()
}

pub struct CsvSink<W: Write> {
    writer: csv::Writer<W>,
    width: usize,
}

impl CsvSink<File> {
    pub fn create(path: &Path, header: &[&str]) -> Result<Self> {
        let file = File::create(path).with_context(|| format!("creating {}", path.display()))?;
        Self::new(file, header)
    }
}

impl<W: Write> CsvSink<W> {
    pub fn new(inner: W, header: &[&str]) -> Result<Self> {
        let mut writer = csv::Writer::from_writer(inner);
        writer.write_record(header)?;
        writer.flush()?;
        Ok(Self {
            writer,
            width: header.len(),
        })
    }

    pub fn row<I, S>(&mut self, fields: I) -> Result<()>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<[u8]>,
    {
        let record: Vec<Vec<u8>> = fields.into_iter().map(|f| f.as_ref().to_vec()).collect();
        debug_assert_eq!(record.len(), self.width);
        self.writer.write_record(&record)?;
        self.writer.flush()?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn formatting_round_trips() {
        for v in [0.1, 1e-8, 0.00104, 1.0 / 3.0, 123456789.125, -0.704] {
            assert_eq!(real(v).parse::<f64>().unwrap(), v);
        }
        assert_eq!(real(f64::NAN), "");
        assert_eq!(opt_real(None), "");
        assert_eq!(real(0.5), "0.5");
    }

    #[test]
    fn sink_writes_header_then_rows() {
        let mut buf = Vec::new();
        {
            let mut sink = CsvSink::new(&mut buf, SUMMARY_HEADER).unwrap();
            sink.row(["10", "0.7", "0.0001", "0.0033", "", "1"]).unwrap();
        }
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(
            text,
            "n,p_cut,d_sigma,mean_sigma_max,stderr,runs\n10,0.7,0.0001,0.0033,,1\n"
        );
    }
}
