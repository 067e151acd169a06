//! Report files.
//!
//! * `report.json`: the full report, always written.
//! * `profiles.csv`: `row, solve, x, u, V, Gamma` for every ground-state solve.
//! * `bands.csv`: `row, lambda, discriminant, kappa` for Bloch runs.

use std::fs;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};

use super::run::Report;

pub fn emit_report(r: &Report, out_dir: &Path) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(out_dir)?;
    let mut written = Vec::new();

    let json = out_dir.join("report.json");
    let text = serde_json::to_string_pretty(r).map_err(|e| Error::Io(e.to_string()))?;
    fs::write(&json, text + "\n")?;
    written.push(json);

    if r.rows.iter().any(|row| row.solves.iter().any(|s| !s.profile.is_empty())) {
        let path = out_dir.join("profiles.csv");
        let mut w = csv::Writer::from_path(&path)?;
        w.write_record(["row", "solve", "x", "u", "V", "Gamma"])?;
        for row in &r.rows {
            for s in &row.solves {
                for p in &s.profile {
                    w.write_record([
                        row.index.to_string(),
                        s.label.clone(),
                        p.x.to_string(),
                        p.u.to_string(),
                        p.v.to_string(),
                        p.gamma.to_string(),
                    ])?;
                }
            }
        }
        w.flush()?;
        written.push(path);
    }

    if r.rows.iter().any(|row| !row.bands.is_empty()) {
        let path = out_dir.join("bands.csv");
        let mut w = csv::Writer::from_path(&path)?;
        w.write_record(["row", "lambda", "discriminant", "kappa"])?;
        for row in &r.rows {
            for b in &row.bands {
                w.write_record([
                    row.index.to_string(),
                    b.lambda.to_string(),
                    b.discriminant.to_string(),
                    b.kappa.map(|k| k.to_string()).unwrap_or_default(),
                ])?;
            }
        }
        w.flush()?;
        written.push(path);
    }
    Ok(written)
}
