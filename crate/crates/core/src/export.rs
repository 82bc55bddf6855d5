//! Text formatting shared by the CSV and JSON writers.

/// Formats a float with 17 significant digits, enough to round-trip `f64`.
pub fn fmt17(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else if x.is_nan() {
        "nan".to_string()
    } else if x > 0.0 {
        "inf".to_string()
    } else {
        "-inf".to_string()
    }
}

/// Writes a header and rows of floats as CSV.
pub fn write_float_csv<W: std::io::Write>(
    writer: W,
    header: &[&str],
    rows: impl IntoIterator<Item = Vec<f64>>,
) -> crate::Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(header)?;
    for row in rows {
        w.write_record(row.iter().map(|&v| fmt17(v)))?;
    }
    w.flush()?;
    Ok(())
}
