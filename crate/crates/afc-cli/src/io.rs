//! CSV readers/writers for shapes, maps, and simulated fields.

use std::fs;
use std::io::Write;
use std::path::Path;

use afc_core::efficiency::EfficiencyMap;
use num_complex::Complex64;

use crate::CliError;

pub const SHAPE_HEADER: &str = "omega_rad_per_s,absorption_per_m";
pub const MAP_HEADER: &str = "p,od,value";
pub const FIELD_HEADER: &str = "t_s,re,im";

/// Load tabulated shape knots from a `omega_rad_per_s,absorption_per_m` CSV.
pub fn read_shape_csv(path: &Path) -> Result<Vec<(f64, f64)>, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
    let mut lines = text.lines();
    match lines.next() {
        Some(h) if h.trim() == SHAPE_HEADER => {}
        _ => {
            return Err(CliError::Config(format!(
                "{}: expected header `{SHAPE_HEADER}`",
                path.display()
            )))
        }
    }
    let mut knots = Vec::new();
    for (i, line) in lines.enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let mut cols = line.split(',');
        let parse = |field: Option<&str>| -> Result<f64, CliError> {
            field
                .ok_or_else(|| {
                    CliError::Config(format!("{}: short row {}", path.display(), i + 2))
                })?
                .trim()
                .parse::<f64>()
                .map_err(|e| CliError::Config(format!("{}: row {}: {e}", path.display(), i + 2)))
        };
        let omega = parse(cols.next())?;
        let alpha = parse(cols.next())?;
        knots.push((omega, alpha));
    }
    if knots.len() < 2 {
        return Err(CliError::Config(format!(
            "{}: need at least two knots",
            path.display()
        )));
    }
    Ok(knots)
}

pub fn write_shape_csv(path: &Path, knots: &[(f64, f64)]) -> Result<(), CliError> {
    let mut out = String::from(SHAPE_HEADER);
    out.push('\n');
    for (omega, alpha) in knots {
        out.push_str(&format!("{omega:e},{alpha:e}\n"));
    }
    write_file(path, out.as_bytes())
}

/// Row-major (OD outer, p inner) map export with header `p,od,value`.
pub fn write_map_csv(path: &Path, map: &EfficiencyMap) -> Result<(), CliError> {
    let mut out = String::with_capacity(map.values.len() * 24);
    out.push_str(MAP_HEADER);
    out.push('\n');
    for (i, &od) in map.od_axis.iter().enumerate() {
        for (j, &p) in map.p_axis.iter().enumerate() {
            out.push_str(&format!("{p:e},{od:e},{:e}\n", map.get(i, j)));
        }
    }
    write_file(path, out.as_bytes())
}

pub fn write_field_csv(path: &Path, times: &[f64], field: &[Complex64]) -> Result<(), CliError> {
    let mut out = String::with_capacity(times.len() * 32);
    out.push_str(FIELD_HEADER);
    out.push('\n');
    for (t, v) in times.iter().zip(field) {
        out.push_str(&format!("{t:e},{:e},{:e}\n", v.re, v.im));
    }
    write_file(path, out.as_bytes())
}

pub fn write_file(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    if let Some(dir) = path.parent() {
        if !dir.as_os_str().is_empty() {
            fs::create_dir_all(dir)
                .map_err(|e| CliError::Config(format!("cannot create {}: {e}", dir.display())))?;
        }
    }
    let mut f = fs::File::create(path)
        .map_err(|e| CliError::Config(format!("cannot write {}: {e}", path.display())))?;
    f.write_all(bytes)
        .map_err(|e| CliError::Config(format!("cannot write {}: {e}", path.display())))
}
