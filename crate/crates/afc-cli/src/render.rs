//! PNG heatmap export for efficiency and difference maps.

use std::path::Path;

use afc_core::efficiency::EfficiencyMap;
use image::{Rgb, RgbImage};

use crate::CliError;

/// Color-bar ceiling for efficiency maps: the forward-retrieval bound,
/// rounded up as in the reference figures.
pub const ETA_COLOR_MAX: f64 = 0.54;

/// Five-anchor viridis-like gradient.
const ANCHORS: [[f64; 3]; 5] = [
    [0.267, 0.005, 0.329],
    [0.229, 0.322, 0.546],
    [0.128, 0.567, 0.551],
    [0.369, 0.789, 0.383],
    [0.993, 0.906, 0.144],
];

fn colorize(t: f64) -> Rgb<u8> {
    let t = t.clamp(0.0, 1.0) * (ANCHORS.len() - 1) as f64;
    let i = (t.floor() as usize).min(ANCHORS.len() - 2);
    let frac = t - i as f64;
    let mut rgb = [0u8; 3];
    for (k, v) in rgb.iter_mut().enumerate() {
        let c = ANCHORS[i][k] + frac * (ANCHORS[i + 1][k] - ANCHORS[i][k]);
        *v = (c * 255.0).round() as u8;
    }
    Rgb(rgb)
}

/// Render `map` to `path`. Efficiency maps are scaled to `[0, 0.54]`;
/// difference maps to their own data range. With `figure_norm`, negatives
/// are clamped to zero at render time only (stored CSV data stay raw).
pub fn write_map_png(path: &Path, map: &EfficiencyMap, figure_norm: bool) -> Result<(), CliError> {
    let n_p = map.p_axis.len() as u32;
    let n_od = map.od_axis.len() as u32;
    let (lo, hi) = if map.kind.is_eta() {
        (0.0, ETA_COLOR_MAX)
    } else {
        let lo = map.values.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = map.values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        if figure_norm {
            (0.0, hi.max(1e-12))
        } else {
            (lo, hi.max(lo + 1e-12))
        }
    };
    let mut img = RgbImage::new(n_p, n_od);
    for (i_od, row) in (0..n_od).enumerate() {
        for (i_p, col) in (0..n_p).enumerate() {
            let mut v = map.get(i_od, i_p);
            if figure_norm && v < 0.0 {
                v = 0.0;
            }
            let t = (v - lo) / (hi - lo);
            // OD increases upward, as in the figures.
            img.put_pixel(col, n_od - 1 - row, colorize(t));
        }
    }
    if let Some(dir) = path.parent() {
        if !dir.as_os_str().is_empty() {
            std::fs::create_dir_all(dir)
                .map_err(|e| CliError::Config(format!("cannot create {}: {e}", dir.display())))?;
        }
    }
    img.save(path)
        .map_err(|e| CliError::Config(format!("cannot write {}: {e}", path.display())))
}
