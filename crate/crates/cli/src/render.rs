//! Heatmap PNGs scaled to each image's own value range.

use std::path::Path;

use anyhow::{Context, Result};
use image::{ImageBuffer, Rgb};

use crate::args::ColormapArg;

// viridis sampled at nine evenly spaced points
const VIRIDIS: [[f64; 3]; 9] = [
    [68.0, 1.0, 84.0],
    [71.0, 44.0, 122.0],
    [59.0, 81.0, 139.0],
    [44.0, 113.0, 142.0],
    [33.0, 144.0, 141.0],
    [39.0, 173.0, 129.0],
    [92.0, 200.0, 99.0],
    [170.0, 220.0, 50.0],
    [253.0, 231.0, 37.0],
];

pub fn color(map: ColormapArg, t: f64) -> [u8; 3] {
    let t = if t.is_finite() { t.clamp(0.0, 1.0) } else { 0.0 };
    match map {
        ColormapArg::Gray => {
            let v = (t * 255.0).round() as u8;
            [v, v, v]
        }
        ColormapArg::Viridis => {
            let x = t * (VIRIDIS.len() - 1) as f64;
            let i = (x.floor() as usize).min(VIRIDIS.len() - 2);
            let f = x - i as f64;
            let (a, b) = (VIRIDIS[i], VIRIDIS[i + 1]);
            [0, 1, 2].map(|k| (a[k] + (b[k] - a[k]) * f).round() as u8)
        }
    }
}

/// Value range of a field; a constant field maps everything to the low end.
pub fn range(values: &[f32]) -> (f32, f32) {
    let lo = values.iter().copied().fold(f32::INFINITY, f32::min);
    let hi = values.iter().copied().fold(f32::NEG_INFINITY, f32::max);
    (lo, hi)
}

/// Writes `<stem>.png` and `<stem>.range.txt` into `dir`.
pub fn write_heatmap(
    dir: &Path,
    stem: &str,
    values: &[f32],
    m: usize,
    map: ColormapArg,
    scale: u32,
) -> Result<()> {
    let scale = scale.max(1);
    let (lo, hi) = range(values);
    let span = (hi - lo) as f64;
    let side = m as u32 * scale;
    let img = ImageBuffer::from_fn(side, side, |x, y| {
        let v = values[(y / scale) as usize * m + (x / scale) as usize];
        let t = if span > 0.0 { (v - lo) as f64 / span } else { 0.0 };
        Rgb(color(map, t))
    });
    let png = dir.join(format!("{stem}.png"));
    img.save(&png)
        .with_context(|| format!("writing {}", png.display()))?;
    let txt = dir.join(format!("{stem}.range.txt"));
    std::fs::write(&txt, format!("min {lo}\nmax {hi}\n"))
        .with_context(|| format!("writing {}", txt.display()))?;
    Ok(())
}
