//! ac-Stark phase maps: pattern imprinting, quadratic lenses, the composite
//! lenses alpha and beta, the three-stage Fourier-transform lens system, and
//! the chirp-sampling guard.
//!
//! Sign conventions, fixed once: a `PhaseMap` holds the lens phase exactly as
//! the lens formulas state it ("gives the wavefunction a phase phi"), and a
//! lens is applied as multiplication by e^{+i phi}. The short-pulse potential
//! imprint of a raw map is e^{-i phi}; that is `imprint_phase`, used for the
//! pattern phase. Applying a lens therefore equals imprinting its negated map,
//! and only this pairing composes the quadratic lenses and a free flight into
//! a scaled Fourier transform.

use ndarray::Array2;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::field::ComplexField;
use crate::grid::{Domain, GridSpec, UnitSystem};
use crate::propagation::propagate_field_spectral;

/// Verdict of the chirp-sampling guard for a quadratic phase c|r|^2: the
/// phase increment between adjacent samples at the grid edge must stay
/// below pi on both axes.
#[derive(Debug, Clone, Copy)]
pub struct ChirpVerdict {
    pub curvature: f64,
    /// Worst-axis phase increment at the grid edge, radians per sample.
    pub edge_increment: f64,
    /// Largest curvature this grid admits (strict bound).
    pub max_curvature: f64,
    pub pass: bool,
}

impl ChirpVerdict {
    /// Margin to the bound; positive when passing.
    pub fn margin(&self) -> f64 {
        std::f64::consts::PI - self.edge_increment
    }

    pub fn ok(self) -> Result<()> {
        if self.pass {
            Ok(())
        } else {
            Err(Error::ChirpGuard { curvature: self.curvature, max: self.max_curvature })
        }
    }
}

/// Evaluate the sampling guard for curvature c (phase = c |r|^2):
/// 2 c (L/2) d < pi per axis, strict.
pub fn chirp_guard(grid: &GridSpec, curvature: f64) -> ChirpVerdict {
    let c = curvature.abs();
    let inc_x = 2.0 * c * (grid.lx() / 2.0) * grid.dx();
    let inc_y = 2.0 * c * (grid.ly() / 2.0) * grid.dy();
    let edge_increment = inc_x.max(inc_y);
    let per_curvature = (grid.lx() * grid.dx()).max(grid.ly() * grid.dy());
    ChirpVerdict {
        curvature,
        edge_increment,
        max_curvature: std::f64::consts::PI / per_curvature,
        pass: edge_increment < std::f64::consts::PI,
    }
}

/// A real phase mesh (radians) tied to a grid.
#[derive(Debug, Clone)]
pub struct PhaseMap {
    grid: GridSpec,
    phi: Array2<f64>,
}

impl PhaseMap {
    pub fn new(grid: GridSpec, phi: Array2<f64>) -> Result<Self> {
        if phi.dim() != (grid.ny(), grid.nx()) {
            return Err(Error::GridMismatch("phase map shape".into()));
        }
        if !phi.iter().all(|v| v.is_finite()) {
            return Err(Error::Pattern("phase map has non-finite entries".into()));
        }
        Ok(Self { grid, phi })
    }

    pub fn from_fn(grid: GridSpec, mut f: impl FnMut(f64, f64) -> f64) -> Self {
        let phi = Array2::from_shape_fn((grid.ny(), grid.nx()), |(j, i)| f(grid.x(i), grid.y(j)));
        Self { grid, phi }
    }

    pub fn uniform(grid: GridSpec, value: f64) -> Self {
        Self { grid, phi: Array2::from_elem((grid.ny(), grid.nx()), value) }
    }

    pub fn zero(grid: GridSpec) -> Self {
        Self::uniform(grid, 0.0)
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }
    pub fn phi(&self) -> &Array2<f64> {
        &self.phi
    }

    pub fn negated(&self) -> PhaseMap {
        PhaseMap { grid: self.grid, phi: self.phi.mapv(|v| -v) }
    }

    /// Pointwise sum; grids must match.
    pub fn plus(&self, other: &PhaseMap) -> Result<PhaseMap> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch("phase map addition".into()));
        }
        Ok(PhaseMap { grid: self.grid, phi: &self.phi + &other.phi })
    }
}

/// An arbitrary pattern P(x, y) in [0, 1] on the grid. Construction clamps out
///-of-range input and counts the clamp events.
#[derive(Debug, Clone)]
pub struct PatternImage {
    grid: GridSpec,
    values: Array2<f64>,
    clamp_count: usize,
}

impl PatternImage {
    pub fn from_array(grid: GridSpec, raw: Array2<f64>) -> Result<Self> {
        if raw.dim() != (grid.ny(), grid.nx()) {
            return Err(Error::GridMismatch("pattern shape".into()));
        }
        if !raw.iter().all(|v| v.is_finite()) {
            return Err(Error::Pattern("pattern has non-finite entries".into()));
        }
        let mut clamp_count = 0;
        let values = raw.mapv(|v| {
            if !(0.0..=1.0).contains(&v) {
                clamp_count += 1;
                v.clamp(0.0, 1.0)
            } else {
                v
            }
        });
        if values.iter().all(|&v| v <= 0.0) {
            return Err(Error::Pattern("pattern is identically zero".into()));
        }
        Ok(Self { grid, values, clamp_count })
    }

    pub fn from_fn(grid: GridSpec, mut f: impl FnMut(f64, f64) -> f64) -> Result<Self> {
        let raw = Array2::from_shape_fn((grid.ny(), grid.nx()), |(j, i)| f(grid.x(i), grid.y(j)));
        Self::from_array(grid, raw)
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }
    pub fn values(&self) -> &Array2<f64> {
        &self.values
    }
    /// Number of input pixels that had to be clamped into [0, 1].
    pub fn clamp_count(&self) -> usize {
        self.clamp_count
    }
}

/// phi_p = arccos(P), in [0, pi/2] for P in [0, 1].
pub fn pattern_phase(pattern: &PatternImage) -> PhaseMap {
    PhaseMap { grid: pattern.grid, phi: pattern.values.mapv(f64::acos) }
}

/// The squared Rabi-frequency map g^2(r) = (4 delta / tau) phi(r) a light
/// pulse of duration tau and detuning delta needs to imprint the map.
pub fn intensity_for_phase(map: &PhaseMap, delta: f64, tau: f64) -> Result<Array2<f64>> {
    if !(delta > 0.0) || !(tau > 0.0) {
        return Err(Error::Pattern(format!("delta and tau must be positive, got {delta}, {tau}")));
    }
    if let Some(&bad) = map.phi.iter().find(|v| **v < 0.0) {
        return Err(Error::NegativePhase { value: bad });
    }
    Ok(map.phi.mapv(|p| 4.0 * delta / tau * p))
}

/// out = in * e^{-i phi(r)}: the short-pulse ac-Stark imprint of a raw map.
pub fn imprint_phase(field: &ComplexField, map: &PhaseMap) -> Result<ComplexField> {
    field.expect_domain(Domain::Position)?;
    field.expect_same_grid(&map.grid)?;
    Ok(field.mapped(|j, i, v| v * Complex64::from_polar(1.0, -map.phi[[j, i]])))
}

/// out = in * e^{+i phi(r)}: "gives the wavefunction a phase phi", the lens
/// application convention. Equals imprinting the negated map.
pub fn apply_lens_phase(field: &ComplexField, map: &PhaseMap) -> Result<ComplexField> {
    imprint_phase(field, &map.negated())
}

/// Entry lens of a Fourier-transform stage of time parameter T:
/// phi(r) = -(m / 2 hbar T) |r|^2 + extra_phase. The exit lens of the same
/// stage is the same map with extra_phase += pi/2.
pub fn quadratic_lens(
    grid: GridSpec,
    units: UnitSystem,
    t: f64,
    extra_phase: f64,
) -> Result<PhaseMap> {
    if !(t > 0.0) {
        return Err(Error::Pulse(format!("lens time parameter must be positive, got {t}")));
    }
    let c = units.mass / (2.0 * units.hbar * t);
    chirp_guard(&grid, c).ok()?;
    Ok(PhaseMap::from_fn(grid, |x, y| -c * (x * x + y * y) + extra_phase))
}

/// Stage durations and pattern phase of the composite lens system.
#[derive(Debug, Clone)]
pub struct LensSystemConfig {
    pub t_a: f64,
    pub t_b: f64,
    pub pattern_phase: PhaseMap,
    pub units: UnitSystem,
}

impl LensSystemConfig {
    pub fn new(t_a: f64, t_b: f64, pattern_phase: PhaseMap, units: UnitSystem) -> Result<Self> {
        if !(t_a > 0.0) || !(t_b > 0.0) {
            return Err(Error::Pulse(format!("lens stage durations must be positive: {t_a}, {t_b}")));
        }
        Ok(Self { t_a, t_b, pattern_phase, units })
    }

    /// Pattern features shrink by this factor at the substrate.
    pub fn scale_factor(&self) -> f64 {
        self.t_a / self.t_b
    }

    pub fn grid(&self) -> &GridSpec {
        self.pattern_phase.grid()
    }
}

/// Composite lens alpha: phi_alpha(r) = -(3m / 2 hbar T_A) |r|^2 + pi - phi_p(r),
/// the sum of the 1b, 2a, 3b' stage lenses and the pattern contribution.
pub fn lens_alpha(cfg: &LensSystemConfig) -> Result<PhaseMap> {
    let grid = *cfg.grid();
    let c = 3.0 * cfg.units.mass / (2.0 * cfg.units.hbar * cfg.t_a);
    chirp_guard(&grid, c).ok()?;
    let base = PhaseMap::from_fn(grid, |x, y| -c * (x * x + y * y) + std::f64::consts::PI);
    base.plus(&cfg.pattern_phase.negated())
}

/// Composite lens beta: phi_beta(r) = -(m/2 hbar)(1/T_A + 1/T_B) |r|^2 + pi/2,
/// the sum of the 2b and 3a stage lenses.
pub fn lens_beta(cfg: &LensSystemConfig) -> Result<PhaseMap> {
    let c = cfg.units.mass / (2.0 * cfg.units.hbar) * (1.0 / cfg.t_a + 1.0 / cfg.t_b);
    chirp_guard(cfg.grid(), c).ok()?;
    Ok(PhaseMap::from_fn(*cfg.grid(), |x, y| {
        -c * (x * x + y * y) + std::f64::consts::FRAC_PI_2
    }))
}

/// One Fourier-transform lens stage: entry lens, free flight T, exit lens
/// (+pi/2 offset). Output samples equal (m/hbar T) Phi_in((m/hbar T) r) on the
/// input mesh. The guard is strict on the lens constructions; the
/// representability of the chirped intermediate during the internal flight is
/// the caller's lookout (query `chirp_guard` with m/(2 hbar T) to check).
pub fn ft_lens_apply(field: &ComplexField, units: UnitSystem, t: f64) -> Result<ComplexField> {
    let grid = *field.grid();
    let entry = quadratic_lens(grid, units, t, 0.0)?;
    let exit = quadratic_lens(grid, units, t, std::f64::consts::FRAC_PI_2)?;
    let mid = propagate_field_spectral(&apply_lens_phase(field, &entry)?, units, t)?;
    apply_lens_phase(&mid, &exit)
}

/// The expanded three-stage system: FT stage (T_A), pattern imprint, FT stage
/// (T_A), FT stage (T_B). Ends at the substrate plane.
pub fn lens_system_expanded(field: &ComplexField, cfg: &LensSystemConfig) -> Result<ComplexField> {
    let f = ft_lens_apply(field, cfg.units, cfg.t_a)?;
    let f = imprint_phase(&f, &cfg.pattern_phase)?;
    let f = ft_lens_apply(&f, cfg.units, cfg.t_a)?;
    ft_lens_apply(&f, cfg.units, cfg.t_b)
}

/// The rearranged system actually used in the interferometer arm: lens 1a,
/// flight T_A, composite alpha, flight T_A, composite beta, flight T_B.
pub fn lens_system_composite(field: &ComplexField, cfg: &LensSystemConfig) -> Result<ComplexField> {
    let lens_1a = quadratic_lens(*cfg.grid(), cfg.units, cfg.t_a, 0.0)?;
    let alpha = lens_alpha(cfg)?;
    let beta = lens_beta(cfg)?;
    let f = apply_lens_phase(field, &lens_1a)?;
    let f = propagate_field_spectral(&f, cfg.units, cfg.t_a)?;
    let f = apply_lens_phase(&f, &alpha)?;
    let f = propagate_field_spectral(&f, cfg.units, cfg.t_a)?;
    let f = apply_lens_phase(&f, &beta)?;
    propagate_field_spectral(&f, cfg.units, cfg.t_b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{gaussian_packet, GaussianSpec};
    use approx::assert_relative_eq;
    use std::f64::consts::{FRAC_PI_2, PI};

    fn grid() -> GridSpec {
        GridSpec::square(256, 1.0).unwrap()
    }
    fn units() -> UnitSystem {
        UnitSystem::naturalized()
    }

    #[test]
    fn guard_trivial_and_strict_cases() {
        let g = grid();
        assert!(chirp_guard(&g, 0.0).pass);
        let max = chirp_guard(&g, 1.0).max_curvature;
        assert!(!chirp_guard(&g, max).pass, "bound is strict");
        assert!(chirp_guard(&g, 0.999 * max).pass);
    }

    #[test]
    fn guard_scales_with_resolution() {
        let g1 = GridSpec::square(256, 1.0).unwrap();
        let g2 = GridSpec::square(512, 1.0).unwrap();
        assert_relative_eq!(
            chirp_guard(&g2, 1.0).max_curvature,
            2.0 * chirp_guard(&g1, 1.0).max_curvature,
            max_relative = 1e-12
        );
    }

    #[test]
    fn imprint_is_pure_phase() {
        let f = gaussian_packet(grid(), &GaussianSpec::new(0.05)).unwrap();
        let map = PhaseMap::from_fn(grid(), |x, y| 3.0 * x + y * y);
        let out = imprint_phase(&f, &map).unwrap();
        let worst = f
            .data()
            .iter()
            .zip(out.data().iter())
            .map(|(a, b)| (a.norm() - b.norm()).abs() / (1.0 + a.norm()))
            .fold(0.0_f64, f64::max);
        assert!(worst < 1e-15, "worst relative magnitude change {worst:.3e}");
        assert!((out.norm_sq() - f.norm_sq()).abs() < 1e-12);
    }

    #[test]
    fn imprint_zero_is_identity_and_half_pi_is_minus_i() {
        let f = gaussian_packet(grid(), &GaussianSpec::new(0.05)).unwrap();
        let id = imprint_phase(&f, &PhaseMap::zero(grid())).unwrap();
        assert!(f
            .data()
            .iter()
            .zip(id.data().iter())
            .all(|(a, b)| (a - b).norm() < 1e-15));
        let rot = imprint_phase(&f, &PhaseMap::uniform(grid(), FRAC_PI_2)).unwrap();
        let mi = Complex64::new(0.0, -1.0);
        assert!(f
            .data()
            .iter()
            .zip(rot.data().iter())
            .all(|(a, b)| (b - a * mi).norm() < 1e-15));
    }

    #[test]
    fn pattern_phase_endpoints_and_identity() {
        let g = grid();
        let p = PatternImage::from_fn(g, |x, y| {
            0.5 + 0.5 * (40.0 * (x + y)).sin()
        })
        .unwrap();
        let map = pattern_phase(&p);
        for (phi, val) in map.phi().iter().zip(p.values().iter()) {
            assert!((0.0..=FRAC_PI_2 + 1e-12).contains(phi));
            // 1 + cos(arccos P) = 1 + P
            assert!((1.0 + phi.cos() - (1.0 + val)).abs() < 1e-12);
        }
        // endpoints
        assert_relative_eq!((1.0_f64).acos(), 0.0);
        assert_relative_eq!((0.0_f64).acos(), FRAC_PI_2);
    }

    #[test]
    fn pattern_clamps_and_counts() {
        let g = grid();
        let mut raw = Array2::from_elem((g.ny(), g.nx()), 0.5);
        raw[[0, 0]] = 1.7;
        raw[[0, 1]] = -0.3;
        let p = PatternImage::from_array(g, raw).unwrap();
        assert_eq!(p.clamp_count(), 2);
        assert_relative_eq!(p.values()[[0, 0]], 1.0);
        assert_relative_eq!(p.values()[[0, 1]], 0.0);
    }

    #[test]
    fn all_zero_pattern_rejected() {
        let g = grid();
        let raw = Array2::zeros((g.ny(), g.nx()));
        assert!(PatternImage::from_array(g, raw).is_err());
    }

    #[test]
    fn intensity_map_values() {
        let g = grid();
        // with the light-shift duration tau = 8 pi delta / g0^2, a 2pi phase
        // needs exactly g^2 = g0^2
        let delta = 6.8e8;
        let g0 = 6.8e7;
        let tau = 8.0 * PI * delta / (g0 * g0);
        let map = PhaseMap::uniform(g, 2.0 * PI);
        let i = intensity_for_phase(&map, delta, tau).unwrap();
        assert_relative_eq!(i[[0, 0]], g0 * g0, max_relative = 1e-12);
        let half = intensity_for_phase(&map, delta, 2.0 * tau).unwrap();
        assert_relative_eq!(half[[0, 0]], 0.5 * g0 * g0, max_relative = 1e-12);
        assert!(intensity_for_phase(&PhaseMap::uniform(g, -0.1), delta, tau).is_err());
        assert_relative_eq!(
            intensity_for_phase(&PhaseMap::zero(g), delta, tau).unwrap()[[5, 5]],
            0.0
        );
    }

    #[test]
    fn quadratic_lens_values() {
        let g = grid();
        let t = 2e-3;
        let map = quadratic_lens(g, units(), t, 0.7).unwrap();
        // value at r = 0 is the extra phase
        assert_relative_eq!(map.phi()[[g.ny() / 2, g.nx() / 2]], 0.7, epsilon = 1e-12);
        // at |r|^2 = 2 hbar T / m the quadratic part is -1 rad
        let r2 = 2.0 * t;
        let x = r2.sqrt();
        let i = (x / g.dx()).round() as usize + g.nx() / 2;
        let expect = -(1.0 / (2.0 * t)) * g.x(i).powi(2) + 0.7;
        assert_relative_eq!(map.phi()[[g.ny() / 2, i]], expect, epsilon = 1e-12);
        // doubling T halves the curvature
        let map2 = quadratic_lens(g, units(), 2.0 * t, 0.0).unwrap();
        let v1 = quadratic_lens(g, units(), t, 0.0).unwrap().phi()[[0, 0]];
        assert_relative_eq!(map2.phi()[[0, 0]], 0.5 * v1, max_relative = 1e-12);
    }

    #[test]
    fn lens_alpha_matches_stage_sum() {
        let g = grid();
        let t_a = 2e-3;
        let pat = PatternImage::from_fn(g, |x, y| (0.3 + 0.5 * ((x * 30.0).cos() * (y * 20.0).sin()).abs()).min(1.0)).unwrap();
        let phi_p = pattern_phase(&pat);
        let cfg = LensSystemConfig::new(t_a, t_a, phi_p.clone(), units()).unwrap();
        let alpha = lens_alpha(&cfg).unwrap();
        // alpha = 1b + 2a + 3b' - phi_p, with 3b' the T_A-parameter exit lens
        let lens_1b = quadratic_lens(g, units(), t_a, FRAC_PI_2).unwrap();
        let lens_2a = quadratic_lens(g, units(), t_a, 0.0).unwrap();
        let lens_3bp = quadratic_lens(g, units(), t_a, FRAC_PI_2).unwrap();
        let sum = lens_1b
            .plus(&lens_2a)
            .unwrap()
            .plus(&lens_3bp)
            .unwrap()
            .plus(&phi_p.negated())
            .unwrap();
        let worst = alpha
            .phi()
            .iter()
            .zip(sum.phi().iter())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0_f64, f64::max);
        assert!(worst < 1e-12, "worst {worst:.3e}");
        // at r = 0 with phi_p identically 0 (P = 1): alpha = pi
        let pat0 = PatternImage::from_fn(g, |_, _| 1.0).unwrap();
        let cfg0 = LensSystemConfig::new(t_a, t_a, pattern_phase(&pat0), units()).unwrap();
        let a0 = lens_alpha(&cfg0).unwrap();
        assert_relative_eq!(a0.phi()[[g.ny() / 2, g.nx() / 2]], PI, epsilon = 1e-12);
        // curvature is exactly 3x lens 1a's
        let a_flat = lens_alpha(&cfg0).unwrap();
        let l1a = quadratic_lens(g, units(), t_a, 0.0).unwrap();
        let quad_alpha = a_flat.phi()[[g.ny() / 2, 0]] - a_flat.phi()[[g.ny() / 2, g.nx() / 2]];
        let quad_1a = l1a.phi()[[g.ny() / 2, 0]] - l1a.phi()[[g.ny() / 2, g.nx() / 2]];
        assert_relative_eq!(quad_alpha, 3.0 * quad_1a, max_relative = 1e-12);
    }

    #[test]
    fn lens_beta_matches_stage_sum() {
        let g = grid();
        let (t_a, t_b) = (2e-3, 1.1e-3);
        let cfg = LensSystemConfig::new(t_a, t_b, PhaseMap::zero(g), units()).unwrap();
        let beta = lens_beta(&cfg).unwrap();
        assert_relative_eq!(beta.phi()[[g.ny() / 2, g.nx() / 2]], FRAC_PI_2, epsilon = 1e-12);
        let sum = quadratic_lens(g, units(), t_a, FRAC_PI_2)
            .unwrap()
            .plus(&quadratic_lens(g, units(), t_b, 0.0).unwrap())
            .unwrap();
        let worst = beta
            .phi()
            .iter()
            .zip(sum.phi().iter())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0_f64, f64::max);
        assert!(worst < 1e-12);
        // T_A = T_B = T: curvature coefficient m/(hbar T)
        let cfg_eq = LensSystemConfig::new(t_a, t_a, PhaseMap::zero(g), units()).unwrap();
        let b_eq = lens_beta(&cfg_eq).unwrap();
        let x = g.x(0);
        assert_relative_eq!(
            b_eq.phi()[[g.ny() / 2, 0]] - FRAC_PI_2,
            -(1.0 / t_a) * x * x,
            max_relative = 1e-12
        );
    }

    #[test]
    fn ft_lens_gaussian_width_and_norm() {
        let g = grid();
        let sigma = 0.08;
        let t = 0.5 * sigma * sigma;
        let f = gaussian_packet(g, &GaussianSpec::new(sigma)).unwrap();
        let out = ft_lens_apply(&f, units(), t).unwrap();
        let w = out.effective_width(crate::field::Axis::X).unwrap();
        assert_relative_eq!(w, t / sigma, max_relative = 1e-6);
        assert!((out.norm_sq() - 1.0).abs() < 1e-8);
    }

    #[test]
    fn ft_lens_matches_brute_force_scaled_transform() {
        // 64^2 brute-force oracle: G(r) = s * (1/2pi) sum psi e^{-i s r.r'} dA
        let g = GridSpec::square(64, 1.0).unwrap();
        let sigma = 0.08;
        let t = 0.5 * sigma * sigma;
        let s = 1.0 / t;
        let f = gaussian_packet(
            g,
            &GaussianSpec::new(sigma).with_center(0.01, -0.02).with_carrier(15.0, 6.0),
        )
        .unwrap();
        let out = ft_lens_apply(&f, units(), t).unwrap();
        let da = g.dx() * g.dy();
        let mut num = 0.0;
        let mut den = 0.0;
        for jo in 0..g.ny() {
            for io in 0..g.nx() {
                let (rx, ry) = (g.x(io), g.y(jo));
                let mut acc = Complex64::default();
                for ji in 0..g.ny() {
                    for ii in 0..g.nx() {
                        let ph = -s * (rx * g.x(ii) + ry * g.y(ji));
                        acc += f.data()[[ji, ii]] * Complex64::from_polar(1.0, ph);
                    }
                }
                let oracle = acc * s * da / (2.0 * PI);
                num += (out.data()[[jo, io]] - oracle).norm_sqr();
                den += oracle.norm_sqr();
            }
        }
        let rel = (num / den).sqrt();
        assert!(rel < 1e-6, "relative L2 {rel:.3e}");
    }

    #[test]
    fn double_ft_lens_is_parity() {
        let g = grid();
        let sigma = 0.08;
        let t = 0.5 * sigma * sigma;
        let f = gaussian_packet(g, &GaussianSpec::new(sigma).with_center(0.07, -0.04)).unwrap();
        let out = ft_lens_apply(&ft_lens_apply(&f, units(), t).unwrap(), units(), t).unwrap();
        // parity on the centered even mesh: index i -> (N - i) % N
        let mut dot = Complex64::default();
        let mut na = 0.0;
        let mut nb = 0.0;
        for ((j, i), v) in out.data().indexed_iter() {
            let flip = f.data()[[(g.ny() - j) % g.ny(), (g.nx() - i) % g.nx()]];
            dot += v.conj() * flip;
            na += v.norm_sqr();
            nb += flip.norm_sqr();
        }
        let corr = dot.norm() / (na * nb).sqrt();
        assert!(corr > 0.999, "parity correlation {corr}");
    }
}
