//! The full pi/2 - pi - pi/2 sequence: split, mirror, lens system on the
//! |1>-labeled arm, mix, separate; population, dose-image, and fringe-scan
//! extraction.
//!
//! Arm separation is tracked by the internal-state label. Both arms share one
//! mesh; the physical recoil drift that separates them in space is checked
//! analytically by the restriction validator, not resolved on the mesh.

use ndarray::Array2;

use crate::analysis::fit_visibility;
use crate::error::{Error, Result};
use crate::field::{gaussian_packet, GaussianSpec, SpinorField};
use crate::grid::{Domain, GridSpec, UnitSystem};
use crate::phase_optics::{
    apply_lens_phase, imprint_phase, lens_alpha, lens_beta, quadratic_lens, LensSystemConfig,
    PhaseMap,
};
use crate::propagation::{propagate_spectral, PropagationStep};
use crate::raman::{apply_pulse, raman_rabi, PulseMode, RamanPulseSpec};

/// Laser-pair parameters shared by the three pulse zones; each zone has its
/// own phase pair.
#[derive(Debug, Clone, Copy)]
pub struct PulseParams {
    pub g0: f64,
    pub delta: f64,
    pub mode: PulseMode,
    pub k_a: f64,
    pub k_b: f64,
    pub omega_a: f64,
    pub omega_b: f64,
    /// (phi_A1, phi_B1, phi_A2, phi_B2, phi_A3, phi_B3)
    pub phases: [f64; 6],
}

impl PulseParams {
    pub fn ideal(g0: f64, delta: f64) -> Self {
        Self {
            g0,
            delta,
            mode: PulseMode::Ideal,
            k_a: 0.0,
            k_b: 0.0,
            omega_a: 0.0,
            omega_b: 0.0,
            phases: [0.0; 6],
        }
    }

    pub fn physical(g0: f64, delta: f64) -> Self {
        Self { mode: PulseMode::Physical, ..Self::ideal(g0, delta) }
    }
}

#[derive(Debug, Clone)]
pub struct InterferometerConfig {
    pub grid: GridSpec,
    pub units: UnitSystem,
    pub packet: GaussianSpec,
    /// Free flight between pulses when no lens system is present.
    pub t0: f64,
    /// Mixer-to-substrate separation time.
    pub t1: f64,
    /// Lens system on the |1>-labeled arm (stage times and pattern phase).
    pub lens: Option<LensSystemConfig>,
    /// Override for the split-to-mirror flight of a lens run. Default keeps
    /// the mirror-symmetric timing T0 = 2 T_A + T_B - T_1.
    pub t0_split: Option<f64>,
    /// ac-Stark leakage of the lens pulses onto the other arm (0 = the
    /// arms are fully separated; ~0.1 models overlapping arms).
    pub cross_talk: f64,
    /// Extra phase imprinted on the |1> arm just before the mixing pulse;
    /// `fringe_scan` sweeps a uniform map here.
    pub arm_phase: Option<PhaseMap>,
    pub pulse: PulseParams,
    /// Internal level frequencies applied during free flights.
    pub level_frequencies: [f64; 3],
}

impl InterferometerConfig {
    pub fn new(grid: GridSpec, units: UnitSystem, packet: GaussianSpec, pulse: PulseParams) -> Self {
        Self {
            grid,
            units,
            packet,
            t0: 0.0,
            t1: 0.0,
            lens: None,
            t0_split: None,
            cross_talk: 0.0,
            arm_phase: None,
            pulse,
            level_frequencies: [0.0; 3],
        }
    }

    /// The Raman Rabi frequency of the pulse zones.
    pub fn rabi(&self) -> Result<f64> {
        raman_rabi(&self.zone_spec(0, 0.0)?)
    }

    /// phi_0 of the three-zone phase bookkeeping: population(|1> port) is
    /// (1 + cos phi_0)/2 for the bare interferometer.
    pub fn phi0(&self) -> Result<f64> {
        let omega = self.rabi()?;
        let [a1, b1, a2, b2, a3, b3] = self.pulse.phases;
        Ok(std::f64::consts::PI / omega * (self.pulse.omega_a - self.pulse.omega_b) - a1 + b1
            + 2.0 * a2
            - 2.0 * b2
            - a3
            + b3)
    }

    /// Realize a requested phi_0 with phi_B3 as the free knob.
    pub fn with_phi0(mut self, target: f64) -> Result<Self> {
        self.pulse.phases[5] = 0.0;
        let base = self.phi0()?;
        self.pulse.phases[5] = target - base;
        Ok(self)
    }

    /// Split-to-mirror flight duration actually used.
    pub fn first_flight(&self) -> f64 {
        match (&self.lens, self.t0_split) {
            (Some(_), Some(t)) => t,
            (Some(l), None) => 2.0 * l.t_a + l.t_b - self.t1,
            (None, _) => self.t0,
        }
    }

    /// Total split-to-substrate duration.
    pub fn total_time(&self) -> f64 {
        match &self.lens {
            Some(l) => self.first_flight() + 2.0 * l.t_a + l.t_b,
            None => self.first_flight() + self.t0 + self.t1,
        }
    }

    /// The bright-fringe trim for lens runs: the free arm accumulates the
    /// Gouy phase -arctan(t_tot / tau) that the Fourier-imaged arm skips, so
    /// centering the fringe on a lens run means phi_0 = -arctan(t_tot/tau).
    pub fn bright_fringe_phi0(&self) -> f64 {
        let tau = self.units.mass * self.packet.sigma * self.packet.sigma / self.units.hbar;
        -(self.total_time() / tau).atan()
    }

    fn zone_spec(&self, zone: usize, duration: f64) -> Result<RamanPulseSpec> {
        let p = &self.pulse;
        let mut spec = RamanPulseSpec::new(p.g0, p.delta, duration, p.mode)
            .with_recoil(p.k_a, p.k_b)
            .with_laser_frequencies(p.omega_a, p.omega_b)
            .with_phases(p.phases[2 * zone], p.phases[2 * zone + 1])
            .with_units(self.units);
        spec.reference_k = self.packet.carrier;
        spec.level_frequencies = self.level_frequencies;
        Ok(spec)
    }

    /// Structural checks; returns non-fatal warnings.
    pub fn validate(&self) -> Result<Vec<String>> {
        let mut warnings = Vec::new();
        self.packet.validate(&self.grid)?;
        if self.t1 < 0.0 {
            return Err(Error::Interferometer(format!("T1 must be >= 0, got {}", self.t1)));
        }
        if !(0.0..=1.0).contains(&self.cross_talk) {
            return Err(Error::Interferometer(format!(
                "cross-talk factor must lie in [0, 1], got {}",
                self.cross_talk
            )));
        }
        if let Some(l) = &self.lens {
            l.pattern_phase.grid().eq(&self.grid).then_some(()).ok_or_else(|| {
                Error::GridMismatch("lens pattern phase is not on the run grid".into())
            })?;
            if self.t1 > l.t_b {
                return Err(Error::Interferometer(format!(
                    "T1 = {} exceeds T_B = {}; the mixing pulse must sit between lens beta and \
                     the substrate",
                    self.t1, l.t_b
                )));
            }
            let derived = 2.0 * l.t_a + l.t_b - self.t1;
            if derived < 0.0 {
                return Err(Error::Interferometer(
                    "lens window 2 T_A + T_B - T_1 is negative".into(),
                ));
            }
            if self.t0 != 0.0 && (self.t0 - derived).abs() > 1e-12 * derived.max(1.0) {
                warnings.push(format!(
                    "times.T0 = {} is ignored on a lens run; the mirror-symmetric flight is \
                     2 T_A + T_B - T_1 = {derived}",
                    self.t0
                ));
            }
            if let Some(t) = self.t0_split {
                if t < 0.0 {
                    return Err(Error::Interferometer("t0_split must be >= 0".into()));
                }
                if (t - derived).abs() > 1e-12 * derived.max(1.0) {
                    warnings.push(format!(
                        "asymmetric timing: split-to-mirror flight {t} differs from the \
                         mirror-symmetric {derived}"
                    ));
                }
            }
        } else if self.t0 < 0.0 {
            return Err(Error::Interferometer(format!("T0 must be >= 0, got {}", self.t0)));
        }
        if let Some(m) = &self.arm_phase {
            if m.grid() != &self.grid {
                return Err(Error::GridMismatch("arm phase map is not on the run grid".into()));
            }
        }
        warnings.extend(self.zone_spec(0, 0.0)?.warnings());
        Ok(warnings)
    }
}

/// Norm bookkeeping across the pipeline, one entry per completed stage.
#[derive(Debug, Clone)]
pub struct StageNorm {
    pub stage: &'static str,
    pub norm_sq: f64,
}

/// Output ports at the substrate plane.
#[derive(Debug, Clone)]
pub struct FinalState {
    pub psi1: crate::field::ComplexField,
    pub psi3: crate::field::ComplexField,
    /// Residual |2> population left behind by the pulses.
    pub residual_c2: f64,
    pub phi0: f64,
    pub stage_norms: Vec<StageNorm>,
}

impl FinalState {
    /// (P1, P3): squared norms of the two ports.
    pub fn populations(&self) -> (f64, f64) {
        (self.psi1.norm_sq(), self.psi3.norm_sq())
    }

    /// |psi1(r)|^2: the local deposition-rate map on the substrate.
    pub fn dose_image(&self) -> Array2<f64> {
        self.psi1.density()
    }

    /// |P1 + P3 + residual - 1|.
    pub fn norm_accounting_error(&self) -> f64 {
        let (p1, p3) = self.populations();
        (p1 + p3 + self.residual_c2 - 1.0).abs()
    }
}

/// Convenience wrapper for `FinalState::populations`.
pub fn populations(state: &FinalState) -> (f64, f64) {
    state.populations()
}

/// Convenience wrapper for `FinalState::dose_image`.
pub fn dose_image(state: &FinalState) -> Array2<f64> {
    state.dose_image()
}

fn flight(
    sp: &SpinorField,
    cfg: &InterferometerConfig,
    t: f64,
    norms: &mut Vec<StageNorm>,
    label: &'static str,
) -> Result<SpinorField> {
    let step = PropagationStep::new(t, cfg.units).with_level_frequencies(cfg.level_frequencies);
    let out = propagate_spectral(sp, &step)?;
    norms.push(StageNorm { stage: label, norm_sq: out.norm_sq() });
    Ok(out)
}

/// Apply one lens pulse to the |1> arm, with optional ac-Stark cross-talk
/// onto the |3> arm.
fn lens_stage(
    sp: &SpinorField,
    map: &PhaseMap,
    cross_talk: f64,
    norms: &mut Vec<StageNorm>,
    label: &'static str,
) -> Result<SpinorField> {
    let pos = sp.in_domain(Domain::Position)?;
    let c1 = apply_lens_phase(&pos.c1, map)?;
    let c3 = if cross_talk != 0.0 {
        let leaked = PhaseMap::new(*map.grid(), map.phi().mapv(|v| cross_talk * v))?;
        apply_lens_phase(&pos.c3, &leaked)?
    } else {
        pos.c3.clone()
    };
    let out = SpinorField { c1, c2: pos.c2.clone(), c3 };
    norms.push(StageNorm { stage: label, norm_sq: out.norm_sq() });
    Ok(out)
}

/// Execute the full sequence and return both ports at the substrate plane.
pub fn run(cfg: &InterferometerConfig) -> Result<FinalState> {
    cfg.validate()?;
    let omega = cfg.rabi()?;
    let t_half = 0.5 * std::f64::consts::PI / omega.abs();
    let t_pi = 2.0 * t_half;

    let mut norms = Vec::new();
    let mut sp = SpinorField::pure_ground(gaussian_packet(cfg.grid, &cfg.packet)?);
    norms.push(StageNorm { stage: "initial", norm_sq: sp.norm_sq() });

    sp = apply_pulse(&sp, &cfg.zone_spec(0, t_half)?)?;
    norms.push(StageNorm { stage: "splitter", norm_sq: sp.norm_sq() });

    sp = flight(&sp, cfg, cfg.first_flight(), &mut norms, "flight-1")?;

    sp = apply_pulse(&sp, &cfg.zone_spec(1, t_pi)?)?;
    norms.push(StageNorm { stage: "mirror", norm_sq: sp.norm_sq() });

    if let Some(lens) = &cfg.lens {
        let lens_1a = quadratic_lens(cfg.grid, cfg.units, lens.t_a, 0.0)?;
        let alpha = lens_alpha(lens)?;
        let beta = lens_beta(lens)?;
        sp = lens_stage(&sp, &lens_1a, cfg.cross_talk, &mut norms, "lens-1a")?;
        sp = flight(&sp, cfg, lens.t_a, &mut norms, "flight-A1")?;
        sp = lens_stage(&sp, &alpha, cfg.cross_talk, &mut norms, "lens-alpha")?;
        sp = flight(&sp, cfg, lens.t_a, &mut norms, "flight-A2")?;
        sp = lens_stage(&sp, &beta, cfg.cross_talk, &mut norms, "lens-beta")?;
        sp = flight(&sp, cfg, lens.t_b - cfg.t1, &mut norms, "flight-B")?;
    } else {
        sp = flight(&sp, cfg, cfg.t0, &mut norms, "flight-2")?;
    }

    if let Some(extra) = &cfg.arm_phase {
        let pos = sp.in_domain(Domain::Position)?;
        sp = SpinorField {
            c1: imprint_phase(&pos.c1, extra)?,
            c2: pos.c2.clone(),
            c3: pos.c3.clone(),
        };
        norms.push(StageNorm { stage: "arm-phase", norm_sq: sp.norm_sq() });
    }

    sp = apply_pulse(&sp, &cfg.zone_spec(2, t_half)?)?;
    norms.push(StageNorm { stage: "mixer", norm_sq: sp.norm_sq() });

    sp = flight(&sp, cfg, cfg.t1, &mut norms, "flight-3")?;

    let pos = sp.in_domain(Domain::Position)?;
    Ok(FinalState {
        residual_c2: pos.c2.norm_sq(),
        psi1: pos.c1,
        psi3: pos.c3,
        phi0: cfg.phi0()?,
        stage_norms: norms,
    })
}

/// Sweep a uniform arm-phase offset, fit (1 + V cos(phase + psi))/2 to the
/// |1>-port population, and return the visibility V.
pub fn fringe_scan(cfg: &InterferometerConfig, phase_values: &[f64]) -> Result<f64> {
    if phase_values.len() < 5 {
        return Err(Error::Fit("fringe scan needs at least 5 phase values".into()));
    }
    let mut pops = Vec::with_capacity(phase_values.len());
    for &c in phase_values {
        let mut swept = cfg.clone();
        swept.arm_phase = Some(match &cfg.arm_phase {
            Some(base) => base.plus(&PhaseMap::uniform(cfg.grid, c))?,
            None => PhaseMap::uniform(cfg.grid, c),
        });
        let out = run(&swept)?;
        pops.push(out.populations().0);
    }
    fit_visibility(phase_values, &pops)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    fn base() -> InterferometerConfig {
        let grid = GridSpec::square(64, 1.0).unwrap();
        let mut cfg = InterferometerConfig::new(
            grid,
            UnitSystem::naturalized(),
            GaussianSpec::new(0.1),
            PulseParams::ideal(10.0, 100.0),
        );
        cfg.t0 = 1e-3;
        cfg.t1 = 5e-4;
        cfg
    }

    #[test]
    fn phi0_read_offs() {
        let mut cfg = base();
        assert_relative_eq!(cfg.phi0().unwrap(), 0.0);
        cfg.pulse.phases = [0.0, 0.0, 0.0, 0.0, 0.0, PI];
        assert_relative_eq!(cfg.phi0().unwrap(), PI);
        cfg.pulse.phases = [0.0, 0.0, PI / 2.0, 0.0, 0.0, 0.0];
        assert_relative_eq!(cfg.phi0().unwrap(), PI, epsilon = 1e-12);
    }

    #[test]
    fn with_phi0_sets_the_free_knob() {
        let cfg = base().with_phi0(1.234).unwrap();
        assert_relative_eq!(cfg.phi0().unwrap(), 1.234, epsilon = 1e-12);
        let mut pre = base();
        pre.pulse.phases = [0.3, -0.7, 0.2, 0.9, -0.4, 0.0];
        let cfg = pre.with_phi0(2.0).unwrap();
        assert_relative_eq!(cfg.phi0().unwrap(), 2.0, epsilon = 1e-12);
    }

    #[test]
    fn bright_fringe_at_phi0_zero() {
        let cfg = base().with_phi0(0.0).unwrap();
        let out = run(&cfg).unwrap();
        let (p1, p3) = out.populations();
        assert!((p1 - 1.0).abs() < 1e-3, "P1 = {p1}");
        assert!(p3 < 1e-3);
        assert!(out.norm_accounting_error() < 1e-8);
    }

    #[test]
    fn dark_fringe_at_phi0_pi() {
        let cfg = base().with_phi0(PI).unwrap();
        let out = run(&cfg).unwrap();
        let (p1, p3) = out.populations();
        assert!(p1 < 1e-3, "P1 = {p1}");
        assert!((p3 - 1.0).abs() < 1e-3);
    }

    #[test]
    fn population_depends_on_phases_only_through_phi0() {
        // different phase sextuples at equal phi_0 give identical populations
        let mut a = base();
        a.pulse.phases = [0.0, 0.0, 0.0, 0.0, 0.0, 0.7];
        let mut b = base();
        b.pulse.phases = [0.5, -0.3, 0.25, 0.1, 0.45, 0.0];
        let b = b.with_phi0(0.7).unwrap();
        assert_relative_eq!(a.phi0().unwrap(), b.phi0().unwrap(), epsilon = 1e-12);
        let pa = run(&a).unwrap().populations().0;
        let pb = run(&b).unwrap().populations().0;
        assert!((pa - pb).abs() < 1e-6, "{pa} vs {pb}");
    }

    #[test]
    fn uniform_arm_phase_populations() {
        for c in [0.0, 0.7, PI / 2.0, 2.4] {
            let mut cfg = base().with_phi0(0.0).unwrap();
            cfg.arm_phase = Some(PhaseMap::uniform(cfg.grid, c));
            let (p1, p3) = run(&cfg).unwrap().populations();
            assert!((p1 - 0.5 * (1.0 + c.cos())).abs() < 1e-3, "c = {c}: P1 = {p1}");
            assert!((p3 - 0.5 * (1.0 - c.cos())).abs() < 1e-3);
        }
    }

    #[test]
    fn visibility_of_the_bare_interferometer_is_one() {
        let cfg = base().with_phi0(0.0).unwrap();
        let phases: Vec<f64> = (0..9).map(|i| i as f64 * 0.8).collect();
        let v = fringe_scan(&cfg, &phases).unwrap();
        assert!((v - 1.0).abs() < 1e-3, "V = {v}");
    }

    #[test]
    fn zero_amplitude_arm_kills_visibility() {
        // emptying one arm (zero-area splitter leaves everything in |1>)
        // removes the interference partner: the swept phase rides on the
        // only occupied path and the port population goes flat, V = 0
        let cfg = base().with_phi0(0.0).unwrap();
        let t_half = 0.5 * PI / cfg.rabi().unwrap();
        let sp = SpinorField::pure_ground(gaussian_packet(cfg.grid, &cfg.packet).unwrap());
        let sp = apply_pulse(&sp, &cfg.zone_spec(0, 0.0).unwrap()).unwrap();
        let step = PropagationStep::new(cfg.t0, cfg.units);
        let sp = propagate_spectral(&sp, &step).unwrap();
        let mut pops = Vec::new();
        let phases: Vec<f64> = (0..8).map(|i| i as f64 * 0.9).collect();
        for &c in &phases {
            let pos = sp.in_domain(Domain::Position).unwrap();
            let offset = SpinorField {
                c1: imprint_phase(&pos.c1, &PhaseMap::uniform(cfg.grid, c)).unwrap(),
                c2: pos.c2.clone(),
                c3: pos.c3.clone(),
            };
            let out = apply_pulse(&offset, &cfg.zone_spec(2, t_half).unwrap()).unwrap();
            pops.push(out.c1.norm_sq());
        }
        let v = fit_visibility(&phases, &pops).unwrap();
        assert!(v < 1e-3, "V = {v}");
    }

    #[test]
    fn lens_timing_validation() {
        let mut cfg = base();
        let zero = PhaseMap::zero(cfg.grid);
        cfg.lens =
            Some(LensSystemConfig::new(1e-3, 5e-4, zero, cfg.units).unwrap());
        cfg.t1 = 1e-3; // T1 > T_B
        assert!(cfg.validate().is_err());
        cfg.t1 = 5e-4;
        cfg.t0 = 0.0;
        assert!(cfg.validate().is_ok());
        assert_relative_eq!(cfg.first_flight(), 2e-3); // 2 T_A + T_B - T_1
    }

    #[test]
    fn lens_arm_selectivity() {
        // with zero cross-talk a lens stage is bitwise transparent to the
        // |3>-labeled arm and touches only |1>
        let grid = GridSpec::square(64, 1.0).unwrap();
        let p1 = gaussian_packet(grid, &GaussianSpec::new(0.07)).unwrap();
        let p3 = gaussian_packet(grid, &GaussianSpec::new(0.09).with_center(0.02, 0.0)).unwrap();
        let sp = SpinorField {
            c2: crate::field::ComplexField::zeros(grid, Domain::Position),
            c1: p1,
            c3: p3,
        };
        let wild = PhaseMap::from_fn(grid, |x, y| 2.0 * (40.0 * x).sin() * (30.0 * y).cos());
        let mut norms = Vec::new();
        let out = lens_stage(&sp, &wild, 0.0, &mut norms, "probe").unwrap();
        assert!(
            sp.c3.data().iter().zip(out.c3.data().iter()).all(|(a, b)| a == b),
            "|3> arm must be untouched bit for bit"
        );
        let moved = sp
            .c1
            .data()
            .iter()
            .zip(out.c1.data().iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0_f64, f64::max);
        assert!(moved > 1e-3, "|1> arm must carry the imprint");
    }

    #[test]
    fn cross_talk_touches_other_arm() {
        let grid = GridSpec::square(64, 1.0).unwrap();
        let units = UnitSystem::naturalized();
        let sigma = 0.08_f64;
        let t = 9e-3; // inside the 64-cell chirp guard for lens alpha
        let pat = PhaseMap::from_fn(grid, |x, y| (30.0 * (x + y)).cos());
        let mut cfg = InterferometerConfig::new(
            grid,
            units,
            GaussianSpec::new(sigma),
            PulseParams::ideal(10.0, 100.0),
        );
        cfg.t1 = t;
        cfg.t0_split = Some(0.0);
        cfg.lens = Some(LensSystemConfig::new(t, t, pat, units).unwrap());
        let clean = run(&cfg).unwrap();
        cfg.cross_talk = 0.1;
        let leaky = run(&cfg).unwrap();
        let diff = clean
            .psi3
            .data()
            .iter()
            .zip(leaky.psi3.data().iter())
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>();
        assert!(diff > 1e-12, "cross-talk must perturb the |3> port");
        assert!(leaky.norm_accounting_error() < 1e-8);
    }
}
