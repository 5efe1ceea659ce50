//! Simulator of two-dimensional atom-interferometric nanolithography.
//!
//! A three-component (lambda-system) wavepacket is evolved through a
//! pi/2 - pi - pi/2 interferometer with an ac-Stark Fourier-transform lens
//! system on one arm; the |1>-port probability density at the substrate plane
//! is the deposited dose image, proportional to 1 + P(x, y) for a pattern P
//! imprinted as the phase arccos(P). A parameter calculator for the ⁸⁷Rb D1
//! implementation validates the practical constraints.
//!
//! The crate is organized around pure functions over immutable meshes:
//!
//! - [`grid`], [`field`]: centered position/momentum meshes, Gaussian
//!   packets, moments, unitary transforms between the domains
//! - [`propagation`]: spectral and Fresnel-type free flight, cross-checkable
//! - [`raman`]: pi and pi/2 Raman pulses, closed-form and per-momentum-group
//! - [`phase_optics`]: phase imprints, quadratic lenses, composite lenses
//!   alpha/beta, the chirp-sampling guard
//! - [`interferometer`]: the full sequence, dose images, fringe scans
//! - [`rb87`]: D1 parameter calculators and the restriction table
//! - [`aif`], [`pgm`], [`config`]: field dumps, images, run configs
//!
//! Start with `examples/` for one runnable program per capability.

pub mod aif;
pub mod analysis;
pub mod config;
pub mod error;
pub mod field;
mod fft;
pub mod grid;
pub mod interferometer;
pub mod pgm;
pub mod phase_optics;
pub mod propagation;
pub mod raman;
pub mod rb87;

pub use error::{Error, Result};
pub use field::{gaussian_packet, Axis, ComplexField, GaussianSpec, SpinorField};
pub use grid::{Domain, GridSpec, UnitSystem};
pub use interferometer::{
    dose_image, fringe_scan, populations, run, FinalState, InterferometerConfig, PulseParams,
};
pub use phase_optics::{
    apply_lens_phase, chirp_guard, ft_lens_apply, imprint_phase, intensity_for_phase, lens_alpha,
    lens_beta, lens_system_composite, lens_system_expanded, pattern_phase, quadratic_lens,
    ChirpVerdict, LensSystemConfig, PatternImage, PhaseMap,
};
pub use propagation::{
    propagate_field_spectral, propagate_fresnel, propagate_inverse, propagate_spectral,
    transfer_function, PropagationStep,
};
pub use raman::{
    analytic_two_level, apply_pulse, apply_pulse_ideal, apply_pulse_physical, group_solution,
    momentum_kick_shift, raman_rabi, PulseMode, RamanPulseSpec,
};
