//! Binary PGM (P5) reading and writing, 8- and 16-bit, plus the pattern
//! loader and the dose writer built on them.
//!
//! Orientation: file row 0 is the top of the image and maps to the largest y
//! on the mesh; both the loader and the writer use this convention, so a
//! save/load round trip is geometrically stable.

use std::fs;
use std::io::Write;
use std::path::Path;

use ndarray::Array2;

use crate::analysis::sample_bilinear;
use crate::error::{Error, Result};
use crate::grid::GridSpec;
use crate::phase_optics::PatternImage;

#[derive(Debug, Clone)]
pub struct PgmImage {
    pub width: usize,
    pub height: usize,
    pub maxval: u16,
    /// Row-major, top row first.
    pub data: Vec<u16>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PgmDepth {
    Eight,
    Sixteen,
}

impl PgmDepth {
    pub fn maxval(self) -> u16 {
        match self {
            PgmDepth::Eight => 255,
            PgmDepth::Sixteen => 65535,
        }
    }
}

fn next_token(bytes: &[u8], pos: &mut usize) -> Result<String> {
    // skip whitespace and '#' comments
    loop {
        while *pos < bytes.len() && bytes[*pos].is_ascii_whitespace() {
            *pos += 1;
        }
        if *pos < bytes.len() && bytes[*pos] == b'#' {
            while *pos < bytes.len() && bytes[*pos] != b'\n' {
                *pos += 1;
            }
            continue;
        }
        break;
    }
    let start = *pos;
    while *pos < bytes.len() && !bytes[*pos].is_ascii_whitespace() {
        *pos += 1;
    }
    if start == *pos {
        return Err(Error::Format("unexpected end of PGM header".into()));
    }
    Ok(String::from_utf8_lossy(&bytes[start..*pos]).into_owned())
}

pub fn read_pgm(path: &Path) -> Result<PgmImage> {
    let bytes = fs::read(path)?;
    let mut pos = 0;
    let magic = next_token(&bytes, &mut pos)?;
    if magic != "P5" {
        return Err(Error::Format(format!("not a binary PGM (P5) file, magic '{magic}'")));
    }
    let width: usize = next_token(&bytes, &mut pos)?
        .parse()
        .map_err(|_| Error::Format("bad PGM width".into()))?;
    let height: usize = next_token(&bytes, &mut pos)?
        .parse()
        .map_err(|_| Error::Format("bad PGM height".into()))?;
    let maxval: u32 = next_token(&bytes, &mut pos)?
        .parse()
        .map_err(|_| Error::Format("bad PGM maxval".into()))?;
    if maxval == 0 || maxval > 65535 {
        return Err(Error::Format(format!("unsupported PGM maxval {maxval}")));
    }
    // exactly one whitespace byte separates the header from the raster
    pos += 1;
    let wide = maxval > 255;
    let needed = width * height * if wide { 2 } else { 1 };
    if bytes.len() < pos + needed {
        return Err(Error::Format("PGM raster truncated".into()));
    }
    let raster = &bytes[pos..pos + needed];
    let data: Vec<u16> = if wide {
        raster.chunks_exact(2).map(|c| u16::from_be_bytes([c[0], c[1]])).collect()
    } else {
        raster.iter().map(|&b| b as u16).collect()
    };
    Ok(PgmImage { width, height, maxval: maxval as u16, data })
}

pub fn write_pgm(path: &Path, img: &PgmImage) -> Result<()> {
    if img.data.len() != img.width * img.height {
        return Err(Error::Format("PGM data length mismatch".into()));
    }
    let mut out = Vec::with_capacity(img.data.len() * 2 + 64);
    write!(&mut out, "P5\n{} {}\n{}\n", img.width, img.height, img.maxval)?;
    if img.maxval > 255 {
        for &v in &img.data {
            out.extend_from_slice(&v.to_be_bytes());
        }
    } else {
        for &v in &img.data {
            out.push(v as u8);
        }
    }
    fs::write(path, out)?;
    Ok(())
}

/// Load a grayscale pattern: pixel values map linearly to [0, 1] (full depth
/// -> 1.0) and the image is resampled onto the grid, centered, aspect
/// preserved, covering a square of side `extent` with zero-padded margins.
pub fn load_pattern(path: &Path, grid: GridSpec, extent: f64) -> Result<PatternImage> {
    if !(extent > 0.0) {
        return Err(Error::Pattern(format!("pattern extent must be positive, got {extent}")));
    }
    let img = read_pgm(path)?;
    if img.data.iter().all(|&v| v == 0) {
        return Err(Error::Pattern("pattern image is entirely black".into()));
    }
    let longest = img.width.max(img.height) as f64;
    let px = extent / longest; // physical size of one pattern pixel
    let span_x = img.width as f64 * px;
    let span_y = img.height as f64 * px;
    let inv = 1.0 / img.maxval as f64;
    let raw = Array2::from_shape_fn((grid.ny(), grid.nx()), |(j, i)| {
        let x = grid.x(i);
        let y = grid.y(j);
        // pixel-center coordinates; row 0 at the top (largest y)
        let fc = x / px + img.width as f64 / 2.0 - 0.5;
        let fr = -y / px + img.height as f64 / 2.0 - 0.5;
        if fc < 0.0 || fr < 0.0 || fc > (img.width - 1) as f64 || fr > (img.height - 1) as f64 {
            return 0.0;
        }
        if x.abs() > span_x / 2.0 || y.abs() > span_y / 2.0 {
            return 0.0;
        }
        let c0 = (fc.floor() as usize).min(img.width - 2);
        let r0 = (fr.floor() as usize).min(img.height - 2);
        let wx = fc - c0 as f64;
        let wy = fr - r0 as f64;
        let at = |r: usize, c: usize| img.data[r * img.width + c] as f64 * inv;
        at(r0, c0) * (1.0 - wx) * (1.0 - wy)
            + at(r0, c0 + 1) * wx * (1.0 - wy)
            + at(r0 + 1, c0) * (1.0 - wx) * wy
            + at(r0 + 1, c0 + 1) * wx * wy
    });
    PatternImage::from_array(grid, raw)
}

/// Write a nonnegative mesh as a PGM dose image with linear min-max scaling,
/// recording the scaling constants in a `<path>.scale.txt` sidecar. A
/// constant nonzero mesh renders mid-gray; an all-zero mesh renders black.
pub fn save_dose(path: &Path, dose: &Array2<f64>, depth: PgmDepth) -> Result<()> {
    if dose.iter().any(|v| *v < 0.0 || !v.is_finite()) {
        return Err(Error::Format("dose must be finite and nonnegative".into()));
    }
    let (ny, nx) = dose.dim();
    let maxval = depth.maxval();
    let lo = dose.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = dose.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let flat = hi == lo;
    let scale = if flat { 0.0 } else { maxval as f64 / (hi - lo) };
    let mut data = Vec::with_capacity(nx * ny);
    for j_img in 0..ny {
        let j = ny - 1 - j_img; // top row first
        for i in 0..nx {
            let v = dose[[j, i]];
            let level = if flat {
                if hi == 0.0 {
                    0
                } else {
                    maxval / 2
                }
            } else {
                ((v - lo) * scale).round().clamp(0.0, maxval as f64) as u16
            };
            data.push(level);
        }
    }
    write_pgm(path, &PgmImage { width: nx, height: ny, maxval, data })?;
    let sidecar = format!(
        "min = {lo:e}\nmax = {hi:e}\nmaxval = {maxval}\nmapping = level/maxval*(max-min)+min\n"
    );
    fs::write(path.with_extension("pgm.scale.txt"), sidecar)?;
    Ok(())
}

/// Render |field| magnitudes as an 8-bit PGM snapshot.
pub fn save_magnitude_snapshot(path: &Path, field: &crate::field::ComplexField) -> Result<()> {
    let mags = field.data().mapv(|v| v.norm());
    save_dose(path, &mags, PgmDepth::Eight)
}

/// Resample a pattern already on some grid to another grid (used by tests and
/// the registration analysis).
pub fn resample_pattern(
    pattern: &PatternImage,
    grid: GridSpec,
) -> Result<PatternImage> {
    let src = pattern.grid();
    let raw = Array2::from_shape_fn((grid.ny(), grid.nx()), |(j, i)| {
        sample_bilinear(src, pattern.values(), grid.x(i), grid.y(j), 0.0)
    });
    PatternImage::from_array(grid, raw)
}
