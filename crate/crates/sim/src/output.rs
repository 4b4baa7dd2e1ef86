//! CSV emission. Values are written with Rust's shortest round-trip float
//! formatting, so identical results serialize to identical bytes.

use std::io::Write;

use crate::SimError;

/// Writes a header row plus data rows as RFC-4180 CSV.
pub fn write_csv<W: Write>(
    w: W,
    header: &[&str],
    rows: impl IntoIterator<Item = Vec<String>>,
) -> Result<(), SimError> {
    let mut writer = csv::Writer::from_writer(w);
    writer.write_record(header)?;
    for row in rows {
        writer.write_record(&row)?;
    }
    writer.flush()?;
    Ok(())
}

/// Renders a table to an in-memory CSV byte buffer.
pub fn csv_bytes(
    header: &[&str],
    rows: impl IntoIterator<Item = Vec<String>>,
) -> Result<Vec<u8>, SimError> {
    let mut buf = Vec::new();
    write_csv(&mut buf, header, rows)?;
    Ok(buf)
}
