//! The 256-entry jet colormap and false-colour PNG rendering.

use std::io::Cursor;

use image::{ImageFormat, Rgb, RgbImage};

use crate::error::{Error, Result};
use crate::map::SaliencyMap;

pub const JET_LEN: usize = 256;

/// The jet table as floating-point RGB in `[0, 1]`, blue end first.
///
/// Each channel is a trapezoid of height 1 built from a 191-sample ramp
/// (64 up, 63 flat, 64 down) placed at offsets 32 (green), 96 (red) and
/// -32 (blue) and clipped to the table.
pub fn jet_table() -> [[f64; 3]; JET_LEN] {
    let n = JET_LEN / 4;
    let ramp: Vec<f64> = (1..=n)
        .map(|k| k as f64 / n as f64)
        .chain(std::iter::repeat(1.0).take(n - 1))
        .chain((1..=n).rev().map(|k| k as f64 / n as f64))
        .collect();
    let mut table = [[0.0; 3]; JET_LEN];
    let green_offset = n / 2;
    for (k, &u) in ramp.iter().enumerate() {
        let g = (green_offset + k) as i64;
        for (channel, pos) in [(0, g + n as i64), (1, g), (2, g - n as i64)] {
            if (0..JET_LEN as i64).contains(&pos) {
                table[pos as usize][channel] = u;
            }
        }
    }
    table
}

/// The jet table quantized to 8 bits with `round(v * 255)`.
pub fn jet_table_u8() -> [[u8; 3]; JET_LEN] {
    let t = jet_table();
    let mut out = [[0u8; 3]; JET_LEN];
    for (o, e) in out.iter_mut().zip(t.iter()) {
        for c in 0..3 {
            o[c] = (e[c] * 255.0).round() as u8;
        }
    }
    out
}

/// Colour for a value in `[0, 1]`; values outside are clamped.
pub fn jet_color(value: f64) -> [u8; 3] {
    jet_table_u8()[jet_index(value)]
}

fn jet_index(value: f64) -> usize {
    (value.clamp(0.0, 1.0) * (JET_LEN - 1) as f64).round() as usize
}

/// Renders a map with values in `[0, 1]` through the jet table.
pub fn render_colormapped(map: &SaliencyMap) -> RgbImage {
    let table = jet_table_u8();
    RgbImage::from_fn(map.width() as u32, map.height() as u32, |x, y| {
        Rgb(table[jet_index(map.get(x as usize, y as usize))])
    })
}

pub fn encode_png(img: &RgbImage) -> Result<Vec<u8>> {
    let mut buf = Cursor::new(Vec::new());
    img.write_to(&mut buf, ImageFormat::Png)
        .map_err(|e| Error::InvalidParameter(format!("png encoding failed: {e}")))?;
    Ok(buf.into_inner())
}

/// Peak-normalizes the map and returns the jet-coloured PNG bytes.
pub fn render_png(map: &SaliencyMap) -> Result<Vec<u8>> {
    encode_png(&render_colormapped(&map.peak_normalized()?))
}
