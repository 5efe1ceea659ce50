//! Plain-text run configuration: `section.key = value` lines, `#` comments.
//! Unknown keys are rejected; parsing is complete before any simulation
//! starts; `dump` emits a canonical form whose re-parse is a fixed point.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::PathBuf;

use crate::error::{Error, Result};
use crate::field::GaussianSpec;
use crate::grid::{GridSpec, UnitSystem};
use crate::interferometer::{InterferometerConfig, PulseParams};
use crate::phase_optics::{pattern_phase, LensSystemConfig, PatternImage, PhaseMap};
use crate::raman::PulseMode;

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub grid_nx: usize,
    pub grid_ny: usize,
    pub grid_l: f64,
    pub sigma: f64,
    pub packet_center: (f64, f64),
    pub packet_carrier: (f64, f64),
    pub t0: f64,
    pub t1: f64,
    pub t_a: Option<f64>,
    pub t_b: Option<f64>,
    pub t0_split: Option<f64>,
    pub g0: f64,
    pub delta: f64,
    pub phases: [f64; 6],
    pub k_a: f64,
    pub k_b: f64,
    pub omega_a: f64,
    pub omega_b: f64,
    pub mode: PulseMode,
    pub lens_enabled: bool,
    pub cross_talk: f64,
    pub pattern_file: Option<PathBuf>,
    pub pattern_extent: Option<f64>,
    pub si_units: bool,
}

const KNOWN_KEYS: &[&str] = &[
    "grid.nx",
    "grid.ny",
    "grid.L",
    "packet.sigma",
    "packet.x0",
    "packet.y0",
    "packet.k0x",
    "packet.k0y",
    "times.T0",
    "times.T1",
    "times.TA",
    "times.TB",
    "times.T0split",
    "pulses.g0",
    "pulses.delta",
    "pulses.phiA1",
    "pulses.phiB1",
    "pulses.phiA2",
    "pulses.phiB2",
    "pulses.phiA3",
    "pulses.phiB3",
    "pulses.kA",
    "pulses.kB",
    "pulses.omegaA",
    "pulses.omegaB",
    "mode",
    "lens.enabled",
    "lens.crosstalk",
    "pattern.file",
    "pattern.extent",
    "units",
];

struct Raw {
    map: BTreeMap<String, (usize, String)>,
}

impl Raw {
    fn take(&mut self, key: &str) -> Option<(usize, String)> {
        self.map.remove(key)
    }

    fn f64_req(&mut self, key: &str) -> Result<f64> {
        let (line, v) = self
            .take(key)
            .ok_or_else(|| Error::Config { line: 0, msg: format!("missing required key {key}") })?;
        v.parse()
            .map_err(|_| Error::Config { line, msg: format!("{key}: unparsable number '{v}'") })
    }

    fn f64_opt(&mut self, key: &str) -> Result<Option<f64>> {
        match self.take(key) {
            None => Ok(None),
            Some((line, v)) => v
                .parse()
                .map(Some)
                .map_err(|_| Error::Config { line, msg: format!("{key}: unparsable number '{v}'") }),
        }
    }

    fn f64_def(&mut self, key: &str, default: f64) -> Result<f64> {
        Ok(self.f64_opt(key)?.unwrap_or(default))
    }
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let mut map: BTreeMap<String, (usize, String)> = BTreeMap::new();
        for (idx, raw_line) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw_line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| Error::Config {
                line: line_no,
                msg: format!("expected 'key = value', got '{line}'"),
            })?;
            let key = key.trim().to_string();
            let value = value.trim().to_string();
            if !KNOWN_KEYS.contains(&key.as_str()) {
                return Err(Error::Config { line: line_no, msg: format!("unknown key '{key}'") });
            }
            if map.insert(key.clone(), (line_no, value)).is_some() {
                return Err(Error::Config { line: line_no, msg: format!("duplicate key '{key}'") });
            }
        }
        let mut raw = Raw { map };

        let grid_nx = raw.f64_req("grid.nx")? as usize;
        let grid_ny = raw.f64_opt("grid.ny")?.map(|v| v as usize).unwrap_or(grid_nx);
        let grid_l = raw.f64_req("grid.L")?;
        let sigma = raw.f64_req("packet.sigma")?;
        let packet_center = (raw.f64_def("packet.x0", 0.0)?, raw.f64_def("packet.y0", 0.0)?);
        let packet_carrier = (raw.f64_def("packet.k0x", 0.0)?, raw.f64_def("packet.k0y", 0.0)?);
        let t0 = raw.f64_req("times.T0")?;
        let t1 = raw.f64_req("times.T1")?;
        let t_a = raw.f64_opt("times.TA")?;
        let t_b = raw.f64_opt("times.TB")?;
        let t0_split = raw.f64_opt("times.T0split")?;
        let g0 = raw.f64_req("pulses.g0")?;
        let delta = raw.f64_req("pulses.delta")?;
        let phases = [
            raw.f64_def("pulses.phiA1", 0.0)?,
            raw.f64_def("pulses.phiB1", 0.0)?,
            raw.f64_def("pulses.phiA2", 0.0)?,
            raw.f64_def("pulses.phiB2", 0.0)?,
            raw.f64_def("pulses.phiA3", 0.0)?,
            raw.f64_def("pulses.phiB3", 0.0)?,
        ];
        let k_a = raw.f64_def("pulses.kA", 0.0)?;
        let k_b = raw.f64_def("pulses.kB", 0.0)?;
        let omega_a = raw.f64_def("pulses.omegaA", 0.0)?;
        let omega_b = raw.f64_def("pulses.omegaB", 0.0)?;
        let mode = match raw.take("mode") {
            Some((_, v)) if v == "ideal" => PulseMode::Ideal,
            Some((_, v)) if v == "physical" => PulseMode::Physical,
            Some((line, v)) => {
                return Err(Error::Config {
                    line,
                    msg: format!("mode must be 'ideal' or 'physical', got '{v}'"),
                })
            }
            None => return Err(Error::Config { line: 0, msg: "missing required key mode".into() }),
        };
        let lens_enabled = match raw.take("lens.enabled") {
            None => false,
            Some((_, v)) if v == "true" => true,
            Some((_, v)) if v == "false" => false,
            Some((line, v)) => {
                return Err(Error::Config {
                    line,
                    msg: format!("lens.enabled must be true or false, got '{v}'"),
                })
            }
        };
        let cross_talk = raw.f64_def("lens.crosstalk", 0.0)?;
        let pattern_file = raw.take("pattern.file").map(|(_, v)| PathBuf::from(v));
        let pattern_extent = raw.f64_opt("pattern.extent")?;
        let si_units = match raw.take("units") {
            None => false,
            Some((_, v)) if v == "naturalized" => false,
            Some((_, v)) if v == "si" => true,
            Some((line, v)) => {
                return Err(Error::Config {
                    line,
                    msg: format!("units must be 'naturalized' or 'si', got '{v}'"),
                })
            }
        };

        let cfg = Self {
            grid_nx,
            grid_ny,
            grid_l,
            sigma,
            packet_center,
            packet_carrier,
            t0,
            t1,
            t_a,
            t_b,
            t0_split,
            g0,
            delta,
            phases,
            k_a,
            k_b,
            omega_a,
            omega_b,
            mode,
            lens_enabled,
            cross_talk,
            pattern_file,
            pattern_extent,
            si_units,
        };
        cfg.check()?;
        Ok(cfg)
    }

    fn check(&self) -> Result<()> {
        let named = |key: &str, cond: bool, msg: &str| {
            if cond {
                Ok(())
            } else {
                Err(Error::Config { line: 0, msg: format!("{key}: {msg}") })
            }
        };
        named("grid.L", self.grid_l > 0.0, "must be positive")?;
        named("packet.sigma", self.sigma > 0.0, "must be positive")?;
        named("times.T0", self.t0 >= 0.0, "must be >= 0")?;
        named("times.T1", self.t1 >= 0.0, "must be >= 0")?;
        if let Some(t) = self.t_a {
            named("times.TA", t > 0.0, "must be positive")?;
        }
        if let Some(t) = self.t_b {
            named("times.TB", t > 0.0, "must be positive")?;
        }
        if let Some(t) = self.t0_split {
            named("times.T0split", t >= 0.0, "must be >= 0")?;
        }
        named("pulses.g0", self.g0 > 0.0, "must be positive")?;
        named("pulses.delta", self.delta != 0.0, "must be nonzero")?;
        if self.lens_enabled {
            named("times.TA", self.t_a.is_some(), "required when lens.enabled = true")?;
            named("times.TB", self.t_b.is_some(), "required when lens.enabled = true")?;
        }
        if self.pattern_file.is_some() {
            named(
                "pattern.extent",
                self.pattern_extent.map(|e| e > 0.0).unwrap_or(false),
                "required and positive when pattern.file is set",
            )?;
        }
        Ok(())
    }

    /// Canonical text form; `parse(dump(parse(x)))` equals `parse(x)`.
    pub fn dump(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "grid.nx = {}", self.grid_nx);
        let _ = writeln!(s, "grid.ny = {}", self.grid_ny);
        let _ = writeln!(s, "grid.L = {}", self.grid_l);
        let _ = writeln!(s, "packet.sigma = {}", self.sigma);
        let _ = writeln!(s, "packet.x0 = {}", self.packet_center.0);
        let _ = writeln!(s, "packet.y0 = {}", self.packet_center.1);
        let _ = writeln!(s, "packet.k0x = {}", self.packet_carrier.0);
        let _ = writeln!(s, "packet.k0y = {}", self.packet_carrier.1);
        let _ = writeln!(s, "times.T0 = {}", self.t0);
        let _ = writeln!(s, "times.T1 = {}", self.t1);
        if let Some(t) = self.t_a {
            let _ = writeln!(s, "times.TA = {t}");
        }
        if let Some(t) = self.t_b {
            let _ = writeln!(s, "times.TB = {t}");
        }
        if let Some(t) = self.t0_split {
            let _ = writeln!(s, "times.T0split = {t}");
        }
        let _ = writeln!(s, "pulses.g0 = {}", self.g0);
        let _ = writeln!(s, "pulses.delta = {}", self.delta);
        let labels = ["phiA1", "phiB1", "phiA2", "phiB2", "phiA3", "phiB3"];
        for (l, v) in labels.iter().zip(self.phases.iter()) {
            let _ = writeln!(s, "pulses.{l} = {v}");
        }
        let _ = writeln!(s, "pulses.kA = {}", self.k_a);
        let _ = writeln!(s, "pulses.kB = {}", self.k_b);
        let _ = writeln!(s, "pulses.omegaA = {}", self.omega_a);
        let _ = writeln!(s, "pulses.omegaB = {}", self.omega_b);
        let _ = writeln!(
            s,
            "mode = {}",
            match self.mode {
                PulseMode::Ideal => "ideal",
                PulseMode::Physical => "physical",
            }
        );
        let _ = writeln!(s, "lens.enabled = {}", self.lens_enabled);
        let _ = writeln!(s, "lens.crosstalk = {}", self.cross_talk);
        if let Some(p) = &self.pattern_file {
            let _ = writeln!(s, "pattern.file = {}", p.display());
        }
        if let Some(e) = self.pattern_extent {
            let _ = writeln!(s, "pattern.extent = {e}");
        }
        let _ = writeln!(s, "units = {}", if self.si_units { "si" } else { "naturalized" });
        s
    }

    pub fn grid(&self) -> Result<GridSpec> {
        GridSpec::new(self.grid_nx, self.grid_ny, self.grid_l, self.grid_l)
    }

    pub fn units(&self) -> UnitSystem {
        if self.si_units {
            UnitSystem::si_rb87()
        } else {
            UnitSystem::naturalized()
        }
    }

    /// Assemble the interferometer run; `pattern` must be pre-loaded when
    /// `pattern_file` is set (the CLI owns file access).
    pub fn build(&self, pattern: Option<&PatternImage>) -> Result<InterferometerConfig> {
        let grid = self.grid()?;
        let units = self.units();
        let packet = GaussianSpec {
            sigma: self.sigma,
            center: self.packet_center,
            carrier: self.packet_carrier,
        };
        let pulse = PulseParams {
            g0: self.g0,
            delta: self.delta,
            mode: self.mode,
            k_a: self.k_a,
            k_b: self.k_b,
            omega_a: self.omega_a,
            omega_b: self.omega_b,
            phases: self.phases,
        };
        let mut cfg = InterferometerConfig::new(grid, units, packet, pulse);
        cfg.t0 = self.t0;
        cfg.t1 = self.t1;
        cfg.t0_split = self.t0_split;
        cfg.cross_talk = self.cross_talk;
        let phi_p = pattern.map(pattern_phase);
        if self.lens_enabled {
            let (t_a, t_b) = (self.t_a.unwrap(), self.t_b.unwrap());
            let map = phi_p.unwrap_or_else(|| PhaseMap::zero(grid));
            cfg.lens = Some(LensSystemConfig::new(t_a, t_b, map, units)?);
        } else if let Some(map) = phi_p {
            cfg.arm_phase = Some(map);
        }
        Ok(cfg)
    }
}
