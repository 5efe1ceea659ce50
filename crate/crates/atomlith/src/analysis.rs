//! Image- and fringe-analysis helpers: masked Pearson correlation, bilinear
//! resampling on the physical mesh, scale registration, grating-period and
//! fringe-visibility fits.

use ndarray::Array2;

use crate::error::{Error, Result};
use crate::grid::GridSpec;

/// Pearson correlation of two samples (same length, masked upstream).
pub fn pearson(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.len() != b.len() || a.len() < 3 {
        return Err(Error::Fit("pearson needs two equal samples of length >= 3".into()));
    }
    let n = a.len() as f64;
    let ma = a.iter().sum::<f64>() / n;
    let mb = b.iter().sum::<f64>() / n;
    let mut cov = 0.0;
    let mut va = 0.0;
    let mut vb = 0.0;
    for (x, y) in a.iter().zip(b) {
        cov += (x - ma) * (y - mb);
        va += (x - ma).powi(2);
        vb += (y - mb).powi(2);
    }
    if va == 0.0 || vb == 0.0 {
        return Err(Error::Fit("pearson: zero variance".into()));
    }
    Ok(cov / (va * vb).sqrt())
}

/// Sample `img` (laid out on `grid`) at physical (x, y) by bilinear
/// interpolation; outside the mesh returns `fill`.
pub fn sample_bilinear(grid: &GridSpec, img: &Array2<f64>, x: f64, y: f64, fill: f64) -> f64 {
    let fi = x / grid.dx() + (grid.nx() / 2) as f64;
    let fj = y / grid.dy() + (grid.ny() / 2) as f64;
    if fi < 0.0 || fj < 0.0 || fi > (grid.nx() - 1) as f64 || fj > (grid.ny() - 1) as f64 {
        return fill;
    }
    let i0 = (fi.floor() as usize).min(grid.nx() - 2);
    let j0 = (fj.floor() as usize).min(grid.ny() - 2);
    let wx = fi - i0 as f64;
    let wy = fj - j0 as f64;
    img[[j0, i0]] * (1.0 - wx) * (1.0 - wy)
        + img[[j0, i0 + 1]] * wx * (1.0 - wy)
        + img[[j0 + 1, i0]] * (1.0 - wx) * wy
        + img[[j0 + 1, i0 + 1]] * wx * wy
}

/// Resample `img` at coordinates scaled by `s` (value at r comes from s*r),
/// optionally parity-flipped (value at r from -s*r).
pub fn resample_scaled(
    grid: &GridSpec,
    img: &Array2<f64>,
    s: f64,
    flip: bool,
    fill: f64,
) -> Array2<f64> {
    let sign = if flip { -s } else { s };
    Array2::from_shape_fn((grid.ny(), grid.nx()), |(j, i)| {
        sample_bilinear(grid, img, sign * grid.x(i), sign * grid.y(j), fill)
    })
}

/// Weighted Pearson correlation.
pub fn weighted_pearson(a: &[f64], b: &[f64], w: &[f64]) -> Result<f64> {
    if a.len() != b.len() || a.len() != w.len() || a.len() < 3 {
        return Err(Error::Fit("weighted pearson needs three equal samples".into()));
    }
    let wsum: f64 = w.iter().sum();
    if !(wsum > 0.0) {
        return Err(Error::Fit("weighted pearson: zero total weight".into()));
    }
    let ma = a.iter().zip(w).map(|(x, w)| x * w).sum::<f64>() / wsum;
    let mb = b.iter().zip(w).map(|(x, w)| x * w).sum::<f64>() / wsum;
    let mut cov = 0.0;
    let mut va = 0.0;
    let mut vb = 0.0;
    for ((x, y), w) in a.iter().zip(b).zip(w) {
        cov += w * (x - ma) * (y - mb);
        va += w * (x - ma).powi(2);
        vb += w * (y - mb).powi(2);
    }
    if va == 0.0 || vb == 0.0 {
        return Err(Error::Fit("weighted pearson: zero variance".into()));
    }
    Ok(cov / (va * vb).sqrt())
}

#[derive(Debug, Clone, Copy)]
pub struct ScaleRegistration {
    pub scale: f64,
    pub correlation: f64,
}

/// Register the spatial scale of `target` against `reference` (both
/// envelope-normalized dose ratios): for each candidate s, correlate
/// target(r) with reference(s r) over pixels where both doses clear
/// `rel_threshold` of their peaks, weighting by the target dose.
pub fn register_scale(
    grid: &GridSpec,
    target: &Array2<f64>,
    target_dose: &Array2<f64>,
    reference: &Array2<f64>,
    reference_dose: &Array2<f64>,
    rel_threshold: f64,
    scales: &[f64],
) -> Result<ScaleRegistration> {
    if scales.is_empty() {
        return Err(Error::Fit("no scale candidates".into()));
    }
    let t_peak = target_dose.iter().cloned().fold(0.0_f64, f64::max);
    let r_peak = reference_dose.iter().cloned().fold(0.0_f64, f64::max);
    let mut best: Option<ScaleRegistration> = None;
    for &s in scales {
        let mut a = Vec::new();
        let mut b = Vec::new();
        let mut w = Vec::new();
        for ((j, i), &dt) in target_dose.indexed_iter() {
            if dt <= rel_threshold * t_peak {
                continue;
            }
            let (sx, sy) = (s * grid.x(i), s * grid.y(j));
            if sample_bilinear(grid, reference_dose, sx, sy, 0.0) <= rel_threshold * r_peak {
                continue;
            }
            a.push(target[[j, i]]);
            b.push(sample_bilinear(grid, reference, sx, sy, 0.0));
            w.push(dt);
        }
        let c = weighted_pearson(&a, &b, &w)?;
        if best.map(|p| c > p.correlation).unwrap_or(true) {
            best = Some(ScaleRegistration { scale: s, correlation: c });
        }
    }
    best.ok_or_else(|| Error::Fit("no usable scale candidate".into()))
}

/// Weighted least-squares fit of v ~ a + b cos(2 pi y / per) + c sin(...)
/// over candidate periods; returns (best_period, weighted_r2).
pub fn fit_period_along_y(
    ys: &[f64],
    values: &[f64],
    weights: &[f64],
    candidates: &[f64],
) -> Result<(f64, f64)> {
    if ys.len() != values.len() || ys.len() != weights.len() || ys.len() < 8 {
        return Err(Error::Fit("period fit needs >= 8 weighted samples".into()));
    }
    let wsum: f64 = weights.iter().sum();
    if !(wsum > 0.0) {
        return Err(Error::Fit("period fit: zero total weight".into()));
    }
    let mean = values.iter().zip(weights).map(|(v, w)| v * w).sum::<f64>() / wsum;
    let centered: Vec<f64> = values.iter().map(|v| v - mean).collect();
    let total: f64 = centered.iter().zip(weights).map(|(v, w)| v * v * w).sum();
    if total == 0.0 {
        return Err(Error::Fit("period fit: flat data".into()));
    }
    let mut best = (0.0, f64::NEG_INFINITY);
    for &per in candidates {
        if !(per > 0.0) {
            continue;
        }
        // normal equations for the weighted basis {1, cos, sin}
        let mut m = [[0.0_f64; 3]; 3];
        let mut rhs = [0.0_f64; 3];
        for ((&y, v), &w) in ys.iter().zip(&centered).zip(weights) {
            let ph = 2.0 * std::f64::consts::PI * y / per;
            let row = [1.0, ph.cos(), ph.sin()];
            for r in 0..3 {
                for c in 0..3 {
                    m[r][c] += w * row[r] * row[c];
                }
                rhs[r] += w * row[r] * v;
            }
        }
        let coef = match solve3(m, rhs) {
            Some(c) => c,
            None => continue,
        };
        let mut ss = 0.0;
        for ((&y, v), &w) in ys.iter().zip(&centered).zip(weights) {
            let ph = 2.0 * std::f64::consts::PI * y / per;
            let pred = coef[0] + coef[1] * ph.cos() + coef[2] * ph.sin();
            ss += w * (v - pred).powi(2);
        }
        let r2 = 1.0 - ss / total;
        if r2 > best.1 {
            best = (per, r2);
        }
    }
    if best.1 == f64::NEG_INFINITY {
        return Err(Error::Fit("period fit: no usable candidate".into()));
    }
    Ok(best)
}

/// Fit P(c) = a0 + a1 cos c + a2 sin c over swept phase values and return the
/// visibility V of the model (1 + V cos(c + psi)) / 2, i.e. 2 sqrt(a1^2+a2^2).
pub fn fit_visibility(phases: &[f64], populations: &[f64]) -> Result<f64> {
    if phases.len() != populations.len() || phases.len() < 5 {
        return Err(Error::Fit("visibility fit needs >= 5 phase points".into()));
    }
    let mut m = [[0.0_f64; 3]; 3];
    let mut rhs = [0.0_f64; 3];
    for (&c, &p) in phases.iter().zip(populations) {
        let row = [1.0, c.cos(), c.sin()];
        for r in 0..3 {
            for q in 0..3 {
                m[r][q] += row[r] * row[q];
            }
            rhs[r] += row[r] * p;
        }
    }
    let coef = solve3(m, rhs).ok_or_else(|| Error::Fit("degenerate phase design".into()))?;
    Ok(2.0 * (coef[1] * coef[1] + coef[2] * coef[2]).sqrt())
}

/// Direct 3x3 solve with partial pivoting; None when singular.
fn solve3(mut m: [[f64; 3]; 3], mut b: [f64; 3]) -> Option<[f64; 3]> {
    let scale = m
        .iter()
        .flatten()
        .fold(0.0_f64, |a, v| a.max(v.abs()))
        .max(f64::MIN_POSITIVE);
    for col in 0..3 {
        let piv = (col..3).max_by(|&r, &s| m[r][col].abs().total_cmp(&m[s][col].abs()))?;
        if m[piv][col].abs() < 1e-12 * scale {
            return None;
        }
        m.swap(col, piv);
        b.swap(col, piv);
        for r in 0..3 {
            if r == col {
                continue;
            }
            let f = m[r][col] / m[col][col];
            for c in col..3 {
                m[r][c] -= f * m[col][c];
            }
            b[r] -= f * b[col];
        }
    }
    Some([b[0] / m[0][0], b[1] / m[1][1], b[2] / m[2][2]])
}
