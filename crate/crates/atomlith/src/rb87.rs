//! Physical-parameter calculators and constraint validators for the ⁸⁷Rb D1
//! implementation, plus the Feshbach scattering-length formula.
//!
//! All calculators take and return SI; frequencies are angular (s⁻¹)
//! throughout. The literature quotes "MHz" figures whose arithmetic only
//! closes when read as angular s⁻¹ (924 ns = pi/Omega with Omega = 3.4e6 s⁻¹),
//! so that reading is adopted and documented here.

use crate::error::{Error, Result};

pub const HBAR: f64 = 1.054571817e-34;
/// ⁸⁷Rb atomic mass, kg.
pub const RB87_MASS: f64 = 1.44316060e-25;
/// ⁸⁷Rb D1 wavelength, m.
pub const RB87_D1_WAVELENGTH: f64 = 794.98e-9;

/// "Much less / much greater than" with an order-of-magnitude flavor: a `~`
/// bound passes with this multiplicative half-decade slack.
pub const TILDE_SLACK: f64 = 3.1622776601683795;

/// Hard `<<` verdicts use a factor-of-ten threshold.
pub const MUCH_LESS_THRESHOLD: f64 = 0.1;

/// D1 drive parameters for the lambda system.
#[derive(Debug, Clone, Copy)]
pub struct Rb87Params {
    /// Excited-state decay rate, s⁻¹.
    pub gamma: f64,
    /// Saturation intensity, W/m².
    pub i_sat: f64,
    /// Available laser intensity, W/m².
    pub i_max: f64,
    /// One-photon detuning, angular s⁻¹.
    pub delta: f64,
    /// Chosen single-photon Rabi frequency, angular s⁻¹.
    pub g0: f64,
    /// Atomic mass, kg.
    pub mass: f64,
    /// Laser wavenumber, 1/m.
    pub k: f64,
}

impl Rb87Params {
    /// The working point of the ⁸⁷Rb D1 scheme: Gamma = 3.33e7 s⁻¹,
    /// I_sat = 3 mW/cm², I_max = 2 W/mm², delta = 680 MHz (angular),
    /// g0 = 68 MHz (angular).
    pub fn preset() -> Self {
        Self {
            gamma: 3.33e7,
            i_sat: 30.0,
            i_max: 2.0e6,
            delta: 6.8e8,
            g0: 6.8e7,
            mass: RB87_MASS,
            k: 2.0 * std::f64::consts::PI / RB87_D1_WAVELENGTH,
        }
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("gamma", self.gamma),
            ("i_sat", self.i_sat),
            ("i_max", self.i_max),
            ("delta", self.delta),
            ("g0", self.g0),
            ("mass", self.mass),
            ("k", self.k),
        ] {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::Pulse(format!("{name} must be positive, got {v}")));
            }
        }
        let cap = g0_max(self.i_max, self.i_sat, self.gamma);
        if self.g0 > cap {
            return Err(Error::Pulse(format!(
                "g0 = {:.3e} exceeds g0_max = {cap:.3e} at the available intensity",
                self.g0
            )));
        }
        Ok(())
    }
}

/// Largest attainable Rabi frequency: g0_max = sqrt(I_max / I_sat) * Gamma.
pub fn g0_max(i_max: f64, i_sat: f64, gamma: f64) -> f64 {
    (i_max / i_sat).sqrt() * gamma
}

/// Pi and pi/2 pulse durations from Omega = g0^2 / (2 delta).
pub fn pulse_durations(g0: f64, delta: f64) -> Result<(f64, f64)> {
    if delta == 0.0 {
        return Err(Error::Pulse("one-photon detuning is zero".into()));
    }
    let omega = g0 * g0 / (2.0 * delta);
    let t_pi = std::f64::consts::PI / omega.abs();
    Ok((t_pi, 0.5 * t_pi))
}

/// Light-shift interaction time solving (g0^2 / 4 delta) tau = 2 pi.
pub fn light_shift_duration(g0: f64, delta: f64) -> Result<f64> {
    if !(g0 > 0.0) || !(delta > 0.0) {
        return Err(Error::Pulse("g0 and delta must be positive".into()));
    }
    Ok(8.0 * std::f64::consts::PI * delta / (g0 * g0))
}

/// Spontaneous-emission budget of one pulse.
#[derive(Debug, Clone, Copy)]
pub struct SpontaneousEmissionCheck {
    /// (g0/delta)^2 * Gamma * tau, the single-transition scattering estimate.
    pub single_photon: f64,
    /// 2 (Omega/delta) * Gamma * tau = Omega tau / (delta / 2 Gamma), the
    /// Raman-pulse form of the same budget.
    pub raman: f64,
    pub threshold: f64,
    pub single_photon_pass: bool,
    pub raman_pass: bool,
}

pub fn spontaneous_emission_check(
    g0: f64,
    delta: f64,
    gamma: f64,
    tau: f64,
) -> Result<SpontaneousEmissionCheck> {
    if !(g0 > 0.0) || !(delta > 0.0) || !(gamma > 0.0) || tau < 0.0 {
        return Err(Error::Pulse("inputs must be positive (tau >= 0)".into()));
    }
    let single_photon = (g0 / delta).powi(2) * gamma * tau;
    let omega = g0 * g0 / (2.0 * delta);
    let raman = 2.0 * (omega / delta) * gamma * tau;
    Ok(SpontaneousEmissionCheck {
        single_photon,
        raman,
        threshold: MUCH_LESS_THRESHOLD,
        single_photon_pass: single_photon < MUCH_LESS_THRESHOLD,
        raman_pass: raman < MUCH_LESS_THRESHOLD,
    })
}

/// One row of the restriction table.
#[derive(Debug, Clone)]
pub struct Restriction {
    pub name: &'static str,
    pub lhs: f64,
    pub rhs: f64,
    /// true when the row reads lhs <= ~rhs, false for lhs >= ~rhs.
    pub upper_bound: bool,
    pub pass: bool,
    /// Multiplicative headroom including the slack; > 1 means passing.
    pub margin: f64,
    pub note: Option<&'static str>,
}

#[derive(Debug, Clone)]
pub struct RestrictionReport {
    pub entries: Vec<Restriction>,
    pub sigma_in: f64,
    pub t_a: f64,
    pub t_b: f64,
    pub k: f64,
}

impl RestrictionReport {
    pub fn overall_pass(&self) -> bool {
        self.entries.iter().all(|e| e.pass)
    }
}

fn upper(name: &'static str, lhs: f64, rhs: f64, note: Option<&'static str>) -> Restriction {
    let margin = rhs * TILDE_SLACK / lhs;
    Restriction { name, lhs, rhs, upper_bound: true, pass: lhs <= rhs * TILDE_SLACK, margin, note }
}

fn lower(name: &'static str, lhs: f64, rhs: f64, note: Option<&'static str>) -> Restriction {
    let margin = lhs * TILDE_SLACK / rhs;
    Restriction { name, lhs, rhs, upper_bound: false, pass: lhs >= rhs / TILDE_SLACK, margin, note }
}

/// Evaluate the practical restriction table (SI units: seconds, meters).
/// `~` bounds carry a half-decade slack; raw values are always reported so
/// callers can apply their own judgment.
pub fn validate_restrictions(
    sigma_in: f64,
    t_a: f64,
    t_b: f64,
    k: f64,
    units: crate::grid::UnitSystem,
) -> Result<RestrictionReport> {
    if !(sigma_in > 0.0) || !(t_a > 0.0) || !(t_b > 0.0) || !(k > 0.0) {
        return Err(Error::Pulse("restriction inputs must be positive".into()));
    }
    let hbar = units.hbar;
    let m = units.mass;
    let tau = m * sigma_in * sigma_in / hbar;
    let recoil_drift = 2.0 * hbar * k / m * t_b;
    let width_printed = sigma_in * (1.0 + hbar * t_b / (m * sigma_in)).sqrt();
    let width_corrected = sigma_in * (1.0 + (t_b / tau).powi(2)).sqrt();
    let entries = vec![
        upper("T_A <= ~1e1 s (time in chamber)", t_a, 1e1, None),
        upper("T_B <= ~1e-2 T_A (shrink factor)", t_b, 1e-2 * t_a, None),
        lower(
            "hbar T_A / (m sigma_in) >= ~1e-3 m (pattern aperture)",
            hbar * t_a / (m * sigma_in),
            1e-3,
            None,
        ),
        lower(
            "2 hbar k T_B / m >= ~sigma_in sqrt(1 + hbar T_B/(m sigma_in)) (state separation, as printed)",
            recoil_drift,
            width_printed,
            Some("printed form is dimensionally inconsistent; kept verbatim for reference"),
        ),
        lower(
            "2 hbar k T_B / m >= ~sigma_in sqrt(1 + (T_B/tau)^2) (state separation, corrected width)",
            recoil_drift,
            width_corrected,
            Some("tau = m sigma^2 / hbar"),
        ),
        upper("sigma_in <= ~1e-5 m (derived band)", sigma_in, 1e-5, None),
        lower("T_A >= ~1e6 sigma_in (derived band)", t_a, 1e6 * sigma_in, None),
    ];
    Ok(RestrictionReport { entries, sigma_in, t_a, t_b, k })
}

/// Feshbach resonance parameters for tuning the scattering length.
#[derive(Debug, Clone, Copy)]
pub struct FeshbachParams {
    /// Background scattering length, m.
    pub a_bg: f64,
    /// Resonance position, T.
    pub b_peak: f64,
    /// Zero crossing, T.
    pub b_zero: f64,
}

impl FeshbachParams {
    pub fn delta(&self) -> f64 {
        self.b_zero - self.b_peak
    }
}

/// a(B) = a_bg (1 - Delta / (B - B_peak)); pole guarded.
pub fn feshbach_a(b: f64, params: &FeshbachParams) -> Result<f64> {
    if b == params.b_peak {
        return Err(Error::Pulse("B at the resonance pole B_peak".into()));
    }
    Ok(params.a_bg * (1.0 - params.delta() / (b - params.b_peak)))
}
