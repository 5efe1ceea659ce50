//! Transverse mesh geometry, its conjugate momentum mesh, and unit bookkeeping.
//!
//! Grids are centered: `x_i = (i - n/2) dx` and `k_i = (i - n/2) dk` with
//! `dk = 2pi/L`, so `dx * dk * n = 2pi` holds exactly.

use crate::error::{Error, Result};

/// Which conjugate space the samples of a field live in.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Domain {
    Position,
    Momentum,
}

/// hbar and the atomic mass; everything that evolves a phase reads them here.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UnitSystem {
    pub hbar: f64,
    pub mass: f64,
}

impl UnitSystem {
    /// Naturalized units hbar = m = 1 (the default working system).
    pub fn naturalized() -> Self {
        Self { hbar: 1.0, mass: 1.0 }
    }

    pub fn si(hbar: f64, mass: f64) -> Self {
        Self { hbar, mass }
    }

    /// SI values for ⁸⁷Rb.
    pub fn si_rb87() -> Self {
        Self {
            hbar: crate::rb87::HBAR,
            mass: crate::rb87::RB87_MASS,
        }
    }
}

impl Default for UnitSystem {
    fn default() -> Self {
        Self::naturalized()
    }
}

/// Sample counts and physical extents of the transverse mesh.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    nx: usize,
    ny: usize,
    lx: f64,
    ly: f64,
}

fn power_of_two_at_least_16(n: usize) -> bool {
    n >= 16 && n.is_power_of_two()
}

impl GridSpec {
    /// A centered nx x ny mesh over extents lx x ly. Sample counts must be
    /// powers of two >= 16; extents must be positive.
    pub fn new(nx: usize, ny: usize, lx: f64, ly: f64) -> Result<Self> {
        if !power_of_two_at_least_16(nx) || !power_of_two_at_least_16(ny) {
            return Err(Error::Grid(format!(
                "sample counts must be powers of two >= 16, got {nx} x {ny}"
            )));
        }
        if !(lx > 0.0) || !(ly > 0.0) || !lx.is_finite() || !ly.is_finite() {
            return Err(Error::Grid(format!("extents must be positive, got {lx} x {ly}")));
        }
        Ok(Self { nx, ny, lx, ly })
    }

    /// Square grid helper.
    pub fn square(n: usize, l: f64) -> Result<Self> {
        Self::new(n, n, l, l)
    }

    pub fn nx(&self) -> usize {
        self.nx
    }
    pub fn ny(&self) -> usize {
        self.ny
    }
    pub fn lx(&self) -> f64 {
        self.lx
    }
    pub fn ly(&self) -> f64 {
        self.ly
    }
    pub fn dx(&self) -> f64 {
        self.lx / self.nx as f64
    }
    pub fn dy(&self) -> f64 {
        self.ly / self.ny as f64
    }
    pub fn dkx(&self) -> f64 {
        2.0 * std::f64::consts::PI / self.lx
    }
    pub fn dky(&self) -> f64 {
        2.0 * std::f64::consts::PI / self.ly
    }

    /// Physical x at column index i.
    pub fn x(&self, i: usize) -> f64 {
        (i as f64 - (self.nx / 2) as f64) * self.dx()
    }
    /// Physical y at row index j.
    pub fn y(&self, j: usize) -> f64 {
        (j as f64 - (self.ny / 2) as f64) * self.dy()
    }
    /// Physical kx at column index i (momentum grid is centered).
    pub fn kx(&self, i: usize) -> f64 {
        (i as f64 - (self.nx / 2) as f64) * self.dkx()
    }
    /// Physical ky at row index j.
    pub fn ky(&self, j: usize) -> f64 {
        (j as f64 - (self.ny / 2) as f64) * self.dky()
    }

    /// Largest representable |ky| (Nyquist along y).
    pub fn ky_nyquist(&self) -> f64 {
        (self.ny / 2) as f64 * self.dky()
    }

    /// Cell measure in the given domain, dx*dy or dkx*dky.
    pub fn measure(&self, domain: Domain) -> f64 {
        match domain {
            Domain::Position => self.dx() * self.dy(),
            Domain::Momentum => self.dkx() * self.dky(),
        }
    }
}
