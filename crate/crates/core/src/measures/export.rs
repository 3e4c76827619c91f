use std::io::Write;

use super::SampleSet;
use crate::error::Result;

/// Writes one point per row, comma separated, 17 significant digits. With
/// `header` the first line names the columns `x0..x{dim-1}`.
pub fn write_csv<W: Write>(set: &SampleSet, mut out: W, header: bool) -> Result<()> {
    if header {
        let names: Vec<String> = (0..set.dim()).map(|i| format!("x{i}")).collect();
        writeln!(out, "{}", names.join(","))?;
    }
    for row in set.rows() {
        let mut first = true;
        for v in row {
            if !first {
                out.write_all(b",")?;
            }
            first = false;
            write!(out, "{v:.16e}")?;
        }
        out.write_all(b"\n")?;
    }
    out.flush()?;
    Ok(())
}
