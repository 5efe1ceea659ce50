//! Complex 2D fields on the transverse mesh, the three-component spinor that
//! carries the internal state, Gaussian packets, and moment diagnostics.
//!
//! Data layout: `Array2<Complex64>` of shape `(ny, nx)`, element `[j, i]` at
//! physical `(x_i, y_j)`. All types are immutable after construction and all
//! operations are pure functions returning new values, so everything here is
//! safe to share across threads.

use ndarray::Array2;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fft;
use crate::grid::{Domain, GridSpec};

/// One complex amplitude mesh tagged with the domain its samples live in.
#[derive(Debug, Clone)]
pub struct ComplexField {
    grid: GridSpec,
    domain: Domain,
    data: Array2<Complex64>,
}

/// Width, center, and carrier momentum of the initial packet.
#[derive(Debug, Clone, Copy)]
pub struct GaussianSpec {
    pub sigma: f64,
    pub center: (f64, f64),
    pub carrier: (f64, f64),
}

impl GaussianSpec {
    pub fn new(sigma: f64) -> Self {
        Self { sigma, center: (0.0, 0.0), carrier: (0.0, 0.0) }
    }

    pub fn with_center(mut self, x0: f64, y0: f64) -> Self {
        self.center = (x0, y0);
        self
    }

    pub fn with_carrier(mut self, k0x: f64, k0y: f64) -> Self {
        self.carrier = (k0x, k0y);
        self
    }

    /// Anti-aliasing and anti-truncation bounds: 4*dx <= sigma <= L/8 on both
    /// axes.
    pub fn validate(&self, grid: &GridSpec) -> Result<()> {
        let s = self.sigma;
        if !(s > 0.0) || !s.is_finite() {
            return Err(Error::UnrepresentableSigma { sigma: s, bound: "sigma > 0".into() });
        }
        let lo = 4.0 * grid.dx().max(grid.dy());
        let hi = (grid.lx() / 8.0).min(grid.ly() / 8.0);
        if s < lo {
            return Err(Error::UnrepresentableSigma {
                sigma: s,
                bound: format!("sigma >= 4*dx = {lo:.6e}"),
            });
        }
        if s > hi {
            return Err(Error::UnrepresentableSigma {
                sigma: s,
                bound: format!("sigma <= L/8 = {hi:.6e}"),
            });
        }
        Ok(())
    }
}

impl ComplexField {
    pub fn zeros(grid: GridSpec, domain: Domain) -> Self {
        let data = Array2::zeros((grid.ny(), grid.nx()));
        Self { grid, domain, data }
    }

    /// Build a position-domain field by sampling f(x, y).
    pub fn from_position_fn(grid: GridSpec, mut f: impl FnMut(f64, f64) -> Complex64) -> Self {
        let data =
            Array2::from_shape_fn((grid.ny(), grid.nx()), |(j, i)| f(grid.x(i), grid.y(j)));
        Self { grid, domain: Domain::Position, data }
    }

    /// Build a momentum-domain field by sampling f(kx, ky).
    pub fn from_momentum_fn(grid: GridSpec, mut f: impl FnMut(f64, f64) -> Complex64) -> Self {
        let data =
            Array2::from_shape_fn((grid.ny(), grid.nx()), |(j, i)| f(grid.kx(i), grid.ky(j)));
        Self { grid, domain: Domain::Momentum, data }
    }

    pub(crate) fn from_parts(grid: GridSpec, domain: Domain, data: Array2<Complex64>) -> Self {
        debug_assert_eq!(data.dim(), (grid.ny(), grid.nx()));
        Self { grid, domain, data }
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }
    pub fn domain(&self) -> Domain {
        self.domain
    }
    pub fn data(&self) -> &Array2<Complex64> {
        &self.data
    }

    pub(crate) fn expect_domain(&self, expected: Domain) -> Result<()> {
        if self.domain != expected {
            return Err(Error::Domain { expected, found: self.domain });
        }
        Ok(())
    }

    pub(crate) fn expect_same_grid(&self, other: &GridSpec) -> Result<()> {
        if self.grid != *other {
            return Err(Error::GridMismatch(format!("{:?} vs {:?}", self.grid, other)));
        }
        Ok(())
    }

    /// <psi|psi> in the physical measure of the current domain.
    pub fn norm_sq(&self) -> f64 {
        let m = self.grid.measure(self.domain);
        self.data.iter().map(|v| v.norm_sqr()).sum::<f64>() * m
    }

    /// Unitary transform to the momentum mesh. Errors if already there.
    pub fn to_momentum(&self) -> Result<ComplexField> {
        self.expect_domain(Domain::Position)?;
        Ok(ComplexField {
            grid: self.grid,
            domain: Domain::Momentum,
            data: fft::forward(&self.grid, &self.data),
        })
    }

    /// Unitary transform back to the position mesh. Errors if already there.
    pub fn to_position(&self) -> Result<ComplexField> {
        self.expect_domain(Domain::Momentum)?;
        Ok(ComplexField {
            grid: self.grid,
            domain: Domain::Position,
            data: fft::inverse(&self.grid, &self.data),
        })
    }

    /// The field in the requested domain, transforming only if needed.
    pub fn in_domain(&self, domain: Domain) -> Result<ComplexField> {
        if self.domain == domain {
            Ok(self.clone())
        } else {
            match domain {
                Domain::Momentum => self.to_momentum(),
                Domain::Position => self.to_position(),
            }
        }
    }

    /// Pointwise multiply by a precomputed factor mesh (same domain shape).
    pub(crate) fn mapped(&self, f: impl Fn(usize, usize, Complex64) -> Complex64) -> ComplexField {
        let data = Array2::from_shape_fn((self.grid.ny(), self.grid.nx()), |(j, i)| {
            f(j, i, self.data[[j, i]])
        });
        ComplexField { grid: self.grid, domain: self.domain, data }
    }

    /// First moments of |psi|^2 over the current domain's axes.
    pub fn centroid(&self) -> Result<(f64, f64)> {
        let mut w_sum = 0.0;
        let mut cx = 0.0;
        let mut cy = 0.0;
        for ((j, i), v) in self.data.indexed_iter() {
            let w = v.norm_sqr();
            let (ax, ay) = match self.domain {
                Domain::Position => (self.grid.x(i), self.grid.y(j)),
                Domain::Momentum => (self.grid.kx(i), self.grid.ky(j)),
            };
            w_sum += w;
            cx += w * ax;
            cy += w * ay;
        }
        if w_sum <= 0.0 {
            return Err(Error::ZeroField);
        }
        Ok((cx / w_sum, cy / w_sum))
    }

    /// Effective width along an axis: sqrt(2) times the standard deviation of
    /// |psi|^2, calibrated so the initial Gaussian packet returns exactly its
    /// sigma.
    pub fn effective_width(&self, axis: Axis) -> Result<f64> {
        let (cx, cy) = self.centroid()?;
        let mut w_sum = 0.0;
        let mut var = 0.0;
        for ((j, i), v) in self.data.indexed_iter() {
            let w = v.norm_sqr();
            let a = match (self.domain, axis) {
                (Domain::Position, Axis::X) => self.grid.x(i) - cx,
                (Domain::Position, Axis::Y) => self.grid.y(j) - cy,
                (Domain::Momentum, Axis::X) => self.grid.kx(i) - cx,
                (Domain::Momentum, Axis::Y) => self.grid.ky(j) - cy,
            };
            w_sum += w;
            var += w * a * a;
        }
        if w_sum <= 0.0 {
            return Err(Error::ZeroField);
        }
        Ok((2.0 * var / w_sum).sqrt())
    }

    /// Translate by (ax, ay) via the momentum-space phase e^{-i k.a}.
    pub fn shifted(&self, ax: f64, ay: f64) -> Result<ComplexField> {
        let phi = self.in_domain(Domain::Momentum)?;
        let shifted = phi.mapped(|j, i, v| {
            let ph = -(phi.grid.kx(i) * ax + phi.grid.ky(j) * ay);
            v * Complex64::from_polar(1.0, ph)
        });
        shifted.in_domain(self.domain)
    }

    /// Multiply by e^{+i k_kick y} in position space (momentum boost along y).
    pub(crate) fn boosted_y(&self, k_kick: f64) -> Result<ComplexField> {
        let pos = self.in_domain(Domain::Position)?;
        let boosted =
            pos.mapped(|j, _i, v| v * Complex64::from_polar(1.0, k_kick * pos.grid.y(j)));
        boosted.in_domain(self.domain)
    }

    /// |psi|^2 mesh.
    pub fn density(&self) -> Array2<f64> {
        self.data.mapv(|v| v.norm_sqr())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    X,
    Y,
}

/// The initial external wavepacket: a normalized Gaussian with optional center
/// offset and carrier momentum. The sampled mesh is renormalized to unit norm;
/// inside the representable band the correction is below 2e-8.
pub fn gaussian_packet(grid: GridSpec, spec: &GaussianSpec) -> Result<ComplexField> {
    spec.validate(&grid)?;
    let s = spec.sigma;
    let amp = 1.0 / (s * std::f64::consts::PI.sqrt());
    let (x0, y0) = spec.center;
    let (k0x, k0y) = spec.carrier;
    let field = ComplexField::from_position_fn(grid, |x, y| {
        let r2 = (x - x0).powi(2) + (y - y0).powi(2);
        Complex64::from_polar(amp * (-r2 / (2.0 * s * s)).exp(), k0x * x + k0y * y)
    });
    let n = field.norm_sq().sqrt();
    Ok(field.mapped(|_, _, v| v / n))
}

/// Three complex fields sharing one grid and one domain tag, the external
/// amplitudes of internal states |1>, |2>, |3>.
#[derive(Debug, Clone)]
pub struct SpinorField {
    pub c1: ComplexField,
    pub c2: ComplexField,
    pub c3: ComplexField,
}

impl SpinorField {
    pub fn new(c1: ComplexField, c2: ComplexField, c3: ComplexField) -> Result<Self> {
        c2.expect_same_grid(c1.grid())?;
        c3.expect_same_grid(c1.grid())?;
        if c2.domain() != c1.domain() || c3.domain() != c1.domain() {
            return Err(Error::Domain { expected: c1.domain(), found: c2.domain() });
        }
        Ok(Self { c1, c2, c3 })
    }

    /// All population in |1> with the given external packet.
    pub fn pure_ground(c1: ComplexField) -> Self {
        let grid = *c1.grid();
        let domain = c1.domain();
        Self {
            c2: ComplexField::zeros(grid, domain),
            c3: ComplexField::zeros(grid, domain),
            c1,
        }
    }

    pub fn grid(&self) -> &GridSpec {
        self.c1.grid()
    }
    pub fn domain(&self) -> Domain {
        self.c1.domain()
    }

    /// Total <Psi|Psi> = sum of component norms.
    pub fn norm_sq(&self) -> f64 {
        self.c1.norm_sq() + self.c2.norm_sq() + self.c3.norm_sq()
    }

    pub fn populations(&self) -> (f64, f64, f64) {
        (self.c1.norm_sq(), self.c2.norm_sq(), self.c3.norm_sq())
    }

    pub fn in_domain(&self, domain: Domain) -> Result<SpinorField> {
        Ok(SpinorField {
            c1: self.c1.in_domain(domain)?,
            c2: self.c2.in_domain(domain)?,
            c3: self.c3.in_domain(domain)?,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn grid() -> GridSpec {
        GridSpec::square(256, 1.0).unwrap()
    }

    #[test]
    fn gaussian_unit_norm() {
        let f = gaussian_packet(grid(), &GaussianSpec::new(0.05)).unwrap();
        assert_relative_eq!(f.norm_sq(), 1.0, epsilon = 1e-9);
    }

    #[test]
    fn gaussian_momentum_profile_matches_transform_of_eq1() {
        // 2D-consistent prefactor sigma/sqrt(pi); the printed 1D-style
        // sqrt(sigma/sqrt(pi)) would break unitarity.
        let s = 0.05;
        let f = gaussian_packet(grid(), &GaussianSpec::new(s)).unwrap();
        let phi = f.to_momentum().unwrap();
        let g = *phi.grid();
        let mut worst = 0.0_f64;
        for ((j, i), v) in phi.data().indexed_iter() {
            let k2 = g.kx(i).powi(2) + g.ky(j).powi(2);
            let expect = s / std::f64::consts::PI.sqrt() * (-k2 * s * s / 2.0).exp();
            worst = worst.max((v - Complex64::new(expect, 0.0)).norm());
        }
        assert!(worst < 1e-8, "worst pointwise deviation {worst:.3e}");
    }

    #[test]
    fn gaussian_width_recovers_sigma() {
        for s in [4.0 / 256.0, 0.05, 0.125] {
            let f = gaussian_packet(grid(), &GaussianSpec::new(s)).unwrap();
            let w = f.effective_width(Axis::X).unwrap();
            assert!((w - s).abs() / s < 1e-6, "sigma {s}: width {w}");
        }
    }

    #[test]
    fn momentum_width_is_inverse_sigma() {
        let s = 0.05;
        let f = gaussian_packet(grid(), &GaussianSpec::new(s)).unwrap();
        let phi = f.to_momentum().unwrap();
        let w = phi.effective_width(Axis::Y).unwrap();
        assert_relative_eq!(w, 1.0 / s, max_relative = 1e-9);
    }

    #[test]
    fn unrepresentable_sigma_names_bound() {
        let err = gaussian_packet(grid(), &GaussianSpec::new(0.5)).unwrap_err();
        assert!(err.to_string().contains("L/8"));
        let err = gaussian_packet(grid(), &GaussianSpec::new(1e-4)).unwrap_err();
        assert!(err.to_string().contains("4*dx"));
    }

    #[test]
    fn round_trip_identity() {
        let f = gaussian_packet(grid(), &GaussianSpec::new(0.05).with_carrier(12.0, -7.0)).unwrap();
        let back = f.to_momentum().unwrap().to_position().unwrap();
        let worst = f
            .data()
            .iter()
            .zip(back.data().iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0_f64, f64::max);
        assert!(worst < 1e-12);
    }

    #[test]
    fn transform_is_unitary() {
        let f = gaussian_packet(grid(), &GaussianSpec::new(0.07).with_center(0.1, -0.05)).unwrap();
        let phi = f.to_momentum().unwrap();
        assert!((phi.norm_sq() - f.norm_sq()).abs() < 1e-12);
    }

    #[test]
    fn impulse_has_flat_spectrum() {
        let g = grid();
        let mut f = ComplexField::zeros(g, Domain::Position);
        f.data[[128, 128]] = Complex64::new(1.0, 0.0);
        let phi = f.to_momentum().unwrap();
        let mags: Vec<f64> = phi.data().iter().map(|v| v.norm()).collect();
        let (mn, mx) = mags
            .iter()
            .fold((f64::INFINITY, 0.0_f64), |(a, b), &m| (a.min(m), b.max(m)));
        assert!((mx - mn) / mx < 1e-12);
    }

    #[test]
    fn shift_convention_is_exp_minus_ika() {
        // A position shift by a multiplies the spectrum by e^{-i k a}.
        let s = 0.05;
        let a = 0.1;
        let f = gaussian_packet(grid(), &GaussianSpec::new(s)).unwrap();
        let fs = f.shifted(a, 0.0).unwrap();
        let phi = f.to_momentum().unwrap();
        let phi_s = fs.to_momentum().unwrap();
        let g = *phi.grid();
        let mut worst = 0.0_f64;
        for ((j, i), v) in phi.data().indexed_iter() {
            let expect = v * Complex64::from_polar(1.0, -g.kx(i) * a);
            worst = worst.max((phi_s.data()[[j, i]] - expect).norm());
        }
        assert!(worst < 1e-12, "worst {worst:.3e}");
    }

    #[test]
    fn shifted_centroid_translates() {
        let f = gaussian_packet(grid(), &GaussianSpec::new(0.05).with_center(0.1, 0.0)).unwrap();
        let (cx, cy) = f.centroid().unwrap();
        assert!((cx - 0.1).abs() < 1.0 / 256.0);
        assert!(cy.abs() < 1.0 / 256.0);
    }

    #[test]
    fn zero_field_errors() {
        let f = ComplexField::zeros(grid(), Domain::Position);
        assert!(matches!(f.centroid(), Err(Error::ZeroField)));
        assert!(matches!(f.effective_width(Axis::X), Err(Error::ZeroField)));
    }

    #[test]
    fn wrong_domain_is_usage_error() {
        let f = gaussian_packet(grid(), &GaussianSpec::new(0.05)).unwrap();
        let phi = f.to_momentum().unwrap();
        assert!(phi.to_momentum().is_err());
        assert!(f.to_position().is_err());
    }

    #[test]
    fn spinor_parseval() {
        let f = gaussian_packet(grid(), &GaussianSpec::new(0.05)).unwrap();
        let sp = SpinorField::pure_ground(f);
        let k = sp.in_domain(Domain::Momentum).unwrap();
        assert!((sp.norm_sq() - k.norm_sq()).abs() < 1e-12);
    }
}
