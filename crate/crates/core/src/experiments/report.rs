use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use crate::error::Result;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ReportFormat {
    Csv,
    Json,
    Text,
}

/// Something that can be written as a table, a JSON document or plain text.
pub trait Reportable {
    fn csv_header(&self) -> Vec<String>;

    fn csv_rows(&self) -> Vec<Vec<String>>;

    fn json(&self) -> serde_json::Value;

    fn text(&self) -> String {
        serde_json::to_string_pretty(&self.json()).unwrap_or_default()
    }
}

/// Shortest round-trip decimal; `NaN` and infinities spelled out.
pub fn fmt_f64(x: f64) -> String {
    if x.is_finite() {
        format!("{x}")
    } else if x.is_nan() {
        "NaN".into()
    } else if x > 0.0 {
        "inf".into()
    } else {
        "-inf".into()
    }
}

pub fn write_csv<W: Write>(out: W, header: &[String], rows: &[Vec<String>]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(header)?;
    for r in rows {
        w.write_record(r)?;
    }
    w.flush()?;
    Ok(())
}

/// Writes `results` to `path`. Output depends only on the results, so
/// re-emitting gives identical bytes.
pub fn emit_report(results: &dyn Reportable, format: ReportFormat, path: &Path) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir)?;
    }
    let mut file = BufWriter::new(File::create(path)?);
    match format {
        ReportFormat::Csv => write_csv(&mut file, &results.csv_header(), &results.csv_rows())?,
        ReportFormat::Json => {
            serde_json::to_writer_pretty(&mut file, &results.json())?;
            file.write_all(b"\n")?;
        }
        ReportFormat::Text => file.write_all(results.text().as_bytes())?,
    }
    file.flush()?;
    Ok(())
}
