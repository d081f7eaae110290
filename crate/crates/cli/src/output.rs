//! CSV and JSON writers. Numbers are printed with 17 significant digits so
//! files are exact and identical across runs.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::Serialize;

use netflux::analysis::ErrorReport;
use netflux::schemes::{Snapshot, StepDiagnostics};
use netflux::Network;

use crate::error::{CliError, Result};

pub fn fmt(x: f64) -> String {
    format!("{x:.16e}")
}

fn fmt_opt(x: Option<f64>) -> String {
    x.map(fmt).unwrap_or_default()
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|source| write_error(path, source))
}

fn write_error(path: &Path, source: std::io::Error) -> CliError {
    CliError::Write {
        path: path.to_path_buf(),
        source,
    }
}

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|e| write_error(path, e))
}

pub fn write_json(path: &Path, value: &impl Serialize) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value).expect("JSON serialization of plain data");
    text.push('\n');
    write_text(path, &text)
}

/// `time,edge,x,u` rows sorted by time, edge (1-based) and cell center.
pub fn write_snapshots(path: &Path, network: &Network, snapshots: &[Snapshot]) -> Result<()> {
    let mut w = create(path)?;
    let io = |e| write_error(path, e);
    writeln!(w, "time,edge,x,u").map_err(io)?;
    let centers: Vec<Vec<f64>> = (0..network.len()).map(|k| network.centers(k)).collect();
    for s in snapshots {
        for (k, xs) in centers.iter().enumerate() {
            for (x, u) in xs.iter().zip(s.field.interior(k)) {
                writeln!(w, "{},{},{},{}", fmt(s.time), k + 1, fmt(*x), fmt(*u)).map_err(io)?;
            }
        }
    }
    w.flush().map_err(io)
}

/// Streams `step,time,total_mass,node_residual,tv,flux_1,..` rows; the
/// trailing columns are the junction-face fluxes per edge.
pub struct DiagnosticsWriter {
    path: PathBuf,
    out: BufWriter<File>,
}

impl DiagnosticsWriter {
    pub fn create(path: &Path, n_edges: usize) -> Result<Self> {
        let mut out = create(path)?;
        let mut header = String::from("step,time,total_mass,node_residual,tv");
        for k in 1..=n_edges {
            header.push_str(&format!(",flux_{k}"));
        }
        writeln!(out, "{header}").map_err(|e| write_error(path, e))?;
        Ok(Self {
            path: path.to_path_buf(),
            out,
        })
    }

    pub fn write(&mut self, d: &StepDiagnostics) -> Result<()> {
        let mut line = format!(
            "{},{},{},{},{}",
            d.step,
            fmt(d.time),
            fmt(d.total_mass),
            fmt(d.node_residual),
            fmt(d.total_variation)
        );
        for f in &d.node_fluxes {
            line.push(',');
            line.push_str(&fmt(*f));
        }
        writeln!(self.out, "{line}").map_err(|e| write_error(&self.path, e))
    }

    pub fn finish(mut self) -> Result<()> {
        self.out.flush().map_err(|e| write_error(&self.path, e))
    }
}

/// `inv_dx,scheme,l1,eoc_l1,linf,eoc_linf`; orders are empty where undefined.
pub fn write_table(path: &Path, reports: &[ErrorReport]) -> Result<()> {
    let mut w = create(path)?;
    let io = |e| write_error(path, e);
    writeln!(w, "inv_dx,scheme,l1,eoc_l1,linf,eoc_linf").map_err(io)?;
    for r in reports {
        for row in &r.rows {
            writeln!(
                w,
                "{},{},{},{},{},{}",
                row.inv_dx,
                r.scheme,
                fmt(row.l1),
                fmt_opt(row.eoc_l1),
                fmt(row.linf),
                fmt_opt(row.eoc_linf)
            )
            .map_err(io)?;
        }
    }
    w.flush().map_err(io)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seventeen_significant_digits() {
        assert_eq!(fmt(0.1), "1.0000000000000001e-1");
        assert_eq!(fmt(0.1).parse::<f64>().unwrap(), 0.1);
        assert_eq!(fmt(-2.0), "-2.0000000000000000e0");
        assert_eq!(fmt_opt(None), "");
    }
}
