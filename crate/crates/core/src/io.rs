//! Reading and writing saliency maps and fixation lists.
//!
//! Two map formats are supported:
//!
//! * grayscale PNG, 8 or 16 bits per sample. Values are divided by the
//!   format maximum (255 or 65535), so maps load into `[0, 1]`.
//! * a plain-text float grid: a `width height` header line followed by
//!   `height` lines of `width` whitespace-separated decimal reals. Values are
//!   read verbatim and written with shortest round-trip formatting.
//!
//! Fixations are CSV files with one `x,y` integer pair per line and no header.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use image::{DynamicImage, ImageBuffer, Luma};

use crate::error::{Error, Result};
use crate::fixation::{FixationPoint, FixationSet};
use crate::map::SaliencyMap;

const PNG_MAGIC: &[u8] = b"\x89PNG\r\n\x1a\n";

/// On-disk encodings for saliency maps.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MapFormat {
    FloatGrid,
    Png8,
    Png16,
}

impl MapFormat {
    pub fn extension(self) -> &'static str {
        match self {
            MapFormat::FloatGrid => "txt",
            MapFormat::Png8 | MapFormat::Png16 => "png",
        }
    }
}

/// Loads a map, detecting PNG by its signature and treating anything else as
/// a float grid.
pub fn load_saliency_map(path: impl AsRef<Path>) -> Result<SaliencyMap> {
    let path = path.as_ref();
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    if bytes.starts_with(PNG_MAGIC) {
        decode_png(path, &bytes)
    } else {
        let text = std::str::from_utf8(&bytes)
            .map_err(|_| Error::malformed(path, "float grid is not valid UTF-8"))?;
        parse_float_grid(path, text)
    }
}

fn decode_png(path: &Path, bytes: &[u8]) -> Result<SaliencyMap> {
    let img = image::load_from_memory_with_format(bytes, image::ImageFormat::Png)
        .map_err(|e| Error::malformed(path, e.to_string()))?;
    let (w, h) = (img.width() as usize, img.height() as usize);
    let values: Vec<f64> = match img {
        DynamicImage::ImageLuma8(buf) => buf
            .into_raw()
            .into_iter()
            .map(|v| v as f64 / u8::MAX as f64)
            .collect(),
        DynamicImage::ImageLuma16(buf) => buf
            .into_raw()
            .into_iter()
            .map(|v| v as f64 / u16::MAX as f64)
            .collect(),
        other => {
            return Err(Error::malformed(
                path,
                format!("expected 8/16-bit grayscale PNG, got {:?}", other.color()),
            ))
        }
    };
    SaliencyMap::new(w, h, values).map_err(|e| Error::malformed(path, e.to_string()))
}

/// Parses the float-grid text format.
pub fn parse_float_grid(path: &Path, text: &str) -> Result<SaliencyMap> {
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let header = lines
        .next()
        .ok_or_else(|| Error::malformed(path, "missing header"))?;
    let dims: Vec<usize> = header
        .split_whitespace()
        .map(|t| t.parse::<usize>())
        .collect::<Result<_, _>>()
        .map_err(|_| Error::malformed(path, format!("bad header {header:?}")))?;
    let [width, height] = dims[..] else {
        return Err(Error::malformed(path, format!("bad header {header:?}")));
    };
    if width == 0 || height == 0 {
        return Err(Error::malformed(path, "zero-sized grid"));
    }
    let mut values = Vec::with_capacity(width * height);
    for y in 0..height {
        let line = lines
            .next()
            .ok_or_else(|| Error::malformed(path, format!("expected {height} rows, got {y}")))?;
        let before = values.len();
        for (x, tok) in line.split_whitespace().enumerate() {
            let v: f64 = tok
                .parse()
                .map_err(|_| Error::malformed(path, format!("bad value {tok:?} in row {y}")))?;
            if !v.is_finite() {
                return Err(Error::malformed(path, format!("non-finite value in row {y}")));
            }
            if v < 0.0 {
                return Err(Error::NegativeValue { x, y, value: v });
            }
            values.push(v);
        }
        if values.len() - before != width {
            return Err(Error::malformed(
                path,
                format!("row {y} has {} values, expected {width}", values.len() - before),
            ));
        }
    }
    if lines.next().is_some() {
        return Err(Error::malformed(path, format!("more than {height} rows")));
    }
    SaliencyMap::new(width, height, values)
}

pub fn format_float_grid(map: &SaliencyMap) -> String {
    let mut out = String::with_capacity(map.len() * 8 + 16);
    let _ = writeln!(out, "{} {}", map.width(), map.height());
    for row in map.values().chunks(map.width()) {
        let mut first = true;
        for v in row {
            if !first {
                out.push(' ');
            }
            first = false;
            let _ = write!(out, "{v}");
        }
        out.push('\n');
    }
    out
}

/// Writes a map. PNG formats clamp to `[0, 1]` and round to the nearest level.
pub fn save_saliency_map(map: &SaliencyMap, path: impl AsRef<Path>, format: MapFormat) -> Result<()> {
    let path = path.as_ref();
    let (w, h) = (map.width() as u32, map.height() as u32);
    match format {
        MapFormat::FloatGrid => {
            fs::write(path, format_float_grid(map)).map_err(|e| Error::io(path, e))
        }
        MapFormat::Png8 => {
            let raw = map
                .values()
                .iter()
                .map(|&v| (v.clamp(0.0, 1.0) * u8::MAX as f64).round() as u8)
                .collect();
            let buf: ImageBuffer<Luma<u8>, Vec<u8>> =
                ImageBuffer::from_raw(w, h, raw).expect("buffer matches geometry");
            buf.save_with_format(path, image::ImageFormat::Png)
                .map_err(|e| Error::io(path, std::io::Error::other(e)))
        }
        MapFormat::Png16 => {
            let raw = map
                .values()
                .iter()
                .map(|&v| (v.clamp(0.0, 1.0) * u16::MAX as f64).round() as u16)
                .collect();
            let buf: ImageBuffer<Luma<u16>, Vec<u16>> =
                ImageBuffer::from_raw(w, h, raw).expect("buffer matches geometry");
            buf.save_with_format(path, image::ImageFormat::Png)
                .map_err(|e| Error::io(path, std::io::Error::other(e)))
        }
    }
}

/// Reads an `x,y` CSV into a [`FixationSet`], preserving order and duplicates.
pub fn load_fixations(
    path: impl AsRef<Path>,
    image_id: &str,
    width: usize,
    height: usize,
    pixels_per_degree: f64,
) -> Result<FixationSet> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let points = parse_fixations(path, &text, width, height)?;
    if points.is_empty() {
        return Err(Error::EmptyFile(path.to_path_buf()));
    }
    FixationSet::new(image_id, width, height, pixels_per_degree, points)
}

fn parse_fixations(
    path: &Path,
    text: &str,
    width: usize,
    height: usize,
) -> Result<Vec<FixationPoint>> {
    let mut points = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let (xs, ys) = line.split_once(',').ok_or_else(|| {
            Error::malformed(path, format!("line {}: expected \"x,y\"", lineno + 1))
        })?;
        let parse = |s: &str| {
            s.trim().parse::<i64>().map_err(|_| {
                Error::malformed(path, format!("line {}: bad integer {s:?}", lineno + 1))
            })
        };
        let (x, y) = (parse(xs)?, parse(ys)?);
        if x < 0 || y < 0 || x >= width as i64 || y >= height as i64 {
            return Err(Error::OutOfBounds {
                x,
                y,
                width,
                height,
            });
        }
        points.push(FixationPoint::new(x as u32, y as u32));
    }
    Ok(points)
}

pub fn save_fixations(set: &FixationSet, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let mut out = String::new();
    for p in set.points() {
        let _ = writeln!(out, "{},{}", p.x, p.y);
    }
    fs::write(path, out).map_err(|e| Error::io(path, e))
}
