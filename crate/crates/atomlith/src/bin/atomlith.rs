//! Thin command-line front end over the library: batch runs and reports,
//! all numeric output as key=value lines on stdout.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use atomlith::error::Error;
use atomlith::{
    aif, analytic_two_level, apply_pulse_ideal, apply_pulse_physical, config::RunConfig,
    gaussian_packet, lens_system_composite, pattern_phase, pgm, propagate_field_spectral,
    propagate_fresnel, raman_rabi, rb87, GaussianSpec, GridSpec, LensSystemConfig,
    PhaseMap, PulseMode, RamanPulseSpec, SpinorField, UnitSystem,
};
use num_complex::Complex64;

#[derive(Parser)]
#[command(name = "atomlith", version, about = "atom-interferometric nanolithography simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Method {
    Spectral,
    Fresnel,
}

#[derive(Clone, Copy, ValueEnum)]
enum Area {
    Pi,
    Pi2,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Ideal,
    Physical,
}

#[derive(Subcommand)]
enum Command {
    /// Run the full interferometer from a config file and write the dose image.
    Simulate {
        #[arg(long)]
        config: PathBuf,
        /// Pattern PGM; overrides pattern.file from the config.
        #[arg(long)]
        pattern: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
        /// Directory for AIF dumps of the output ports.
        #[arg(long)]
        dump_fields: Option<PathBuf>,
    },
    /// Free-space propagation of a dumped field.
    Propagate {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        t: f64,
        #[arg(long, value_enum, default_value = "spectral")]
        method: Method,
        #[arg(long)]
        out: PathBuf,
        /// Physical extents of the dumped mesh (the AIF format carries none).
        #[arg(long, default_value_t = 1.0)]
        lx: f64,
        #[arg(long, default_value_t = 1.0)]
        ly: f64,
    },
    /// Single-pulse population/phase report.
    PulseTest {
        #[arg(long, value_enum)]
        area: Area,
        #[arg(long, value_enum)]
        mode: Mode,
        #[arg(long)]
        g0: f64,
        #[arg(long)]
        delta: f64,
    },
    /// Run the composite lens chain on a Gaussian packet.
    LensDemo {
        #[arg(long)]
        sigma: f64,
        #[arg(long)]
        ta: f64,
        #[arg(long)]
        tb: f64,
        #[arg(long)]
        pattern: Option<PathBuf>,
        /// Physical side of the pattern square on the mesh.
        #[arg(long)]
        extent: Option<f64>,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 256)]
        n: usize,
        #[arg(long, default_value_t = 1.0)]
        l: f64,
    },
    /// ⁸⁷Rb parameter report and restriction table.
    Params {
        #[arg(long, default_value = "rb87")]
        preset: String,
        #[arg(long)]
        g0: Option<f64>,
        #[arg(long)]
        delta: Option<f64>,
        #[arg(long)]
        imax: Option<f64>,
        /// Inputs to the restriction table (SI).
        #[arg(long, default_value_t = 1e-5)]
        sigma_in: f64,
        #[arg(long, default_value_t = 10.0)]
        ta: f64,
        #[arg(long, default_value_t = 0.1)]
        tb: f64,
    },
    /// Parse a config and print its canonical form.
    DumpConfig {
        #[arg(long)]
        config: PathBuf,
    },
}

fn exit_code_for(err: &Error) -> u8 {
    match err {
        Error::Io(_) | Error::Format(_) => 2,
        _ => 1,
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // usage problems exit 1; --help/--version exit 0
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match dispatch(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code_for(&e))
        }
    }
}

fn dispatch(cmd: Command) -> atomlith::Result<()> {
    match cmd {
        Command::Simulate { config, pattern, out, dump_fields } => {
            simulate(config, pattern, out, dump_fields)
        }
        Command::Propagate { input, t, method, out, lx, ly } => {
            let field = aif::read_field(&input, lx, ly)?;
            let units = UnitSystem::naturalized();
            let result = match method {
                Method::Spectral => propagate_field_spectral(&field, units, t)?,
                Method::Fresnel => propagate_fresnel(&field, units, t)?,
            };
            aif::write_field(&out, &result)?;
            println!("in = {}", input.display());
            println!("out = {}", out.display());
            println!("T = {t}");
            println!("norm_in = {:.15e}", field.norm_sq());
            println!("norm_out = {:.15e}", result.norm_sq());
            println!("out_lx = {:.15e}", result.grid().lx());
            println!("out_ly = {:.15e}", result.grid().ly());
            Ok(())
        }
        Command::PulseTest { area, mode, g0, delta } => pulse_test(area, mode, g0, delta),
        Command::LensDemo { sigma, ta, tb, pattern, extent, out, n, l } => {
            let grid = GridSpec::square(n, l)?;
            let units = UnitSystem::naturalized();
            let phi_p = match pattern {
                Some(path) => {
                    let extent = extent.ok_or_else(|| {
                        Error::Pattern("--extent is required with --pattern".into())
                    })?;
                    pattern_phase(&pgm::load_pattern(&path, grid, extent)?)
                }
                None => PhaseMap::zero(grid),
            };
            let cfg = LensSystemConfig::new(ta, tb, phi_p, units)?;
            let packet = gaussian_packet(grid, &GaussianSpec::new(sigma))?;
            let field = lens_system_composite(&packet, &cfg)?;
            aif::write_field(&out, &field)?;
            let snap = out.with_extension("pgm");
            pgm::save_magnitude_snapshot(&snap, &field)?;
            println!("out = {}", out.display());
            println!("snapshot = {}", snap.display());
            println!("scale_factor = {}", cfg.scale_factor());
            println!("norm_out = {:.15e}", field.norm_sq());
            println!(
                "width_out = {:.15e}",
                field.effective_width(atomlith::Axis::X)?
            );
            Ok(())
        }
        Command::Params { preset, g0, delta, imax, sigma_in, ta, tb } => {
            if preset != "rb87" {
                return Err(Error::Pulse(format!("unknown preset '{preset}'")));
            }
            let mut p = rb87::Rb87Params::preset();
            if let Some(v) = g0 {
                p.g0 = v;
            }
            if let Some(v) = delta {
                p.delta = v;
            }
            if let Some(v) = imax {
                p.i_max = v;
            }
            p.validate()?;
            params_report(&p, sigma_in, ta, tb)
        }
        Command::DumpConfig { config } => {
            let text = std::fs::read_to_string(&config)?;
            let cfg = RunConfig::parse(&text)?;
            print!("{}", cfg.dump());
            Ok(())
        }
    }
}

fn simulate(
    config: PathBuf,
    pattern_cli: Option<PathBuf>,
    out: PathBuf,
    dump_fields: Option<PathBuf>,
) -> atomlith::Result<()> {
    let text = std::fs::read_to_string(&config)?;
    let cfg = RunConfig::parse(&text)?;
    let grid = cfg.grid()?;
    let pattern_path = pattern_cli.or_else(|| cfg.pattern_file.clone());
    let pattern = match &pattern_path {
        Some(path) => {
            let extent = cfg
                .pattern_extent
                .ok_or_else(|| Error::Pattern("pattern.extent is required with a pattern".into()))?;
            Some(pgm::load_pattern(path, grid, extent)?)
        }
        None => None,
    };
    let run_cfg = cfg.build(pattern.as_ref())?;
    for w in run_cfg.validate()? {
        eprintln!("warning: {w}");
    }
    let state = atomlith::run(&run_cfg)?;
    let dose = state.dose_image();
    pgm::save_dose(&out, &dose, pgm::PgmDepth::Sixteen)?;
    if let Some(dir) = dump_fields {
        std::fs::create_dir_all(&dir)?;
        aif::write_field(&dir.join("psi1.aif"), &state.psi1)?;
        aif::write_field(&dir.join("psi3.aif"), &state.psi3)?;
    }
    let (p1, p3) = state.populations();
    println!("config = {}", config.display());
    println!("dose = {}", out.display());
    println!("phi0 = {:.15e}", state.phi0);
    println!("population_1 = {:.15e}", p1);
    println!("population_3 = {:.15e}", p3);
    println!("residual_c2 = {:.15e}", state.residual_c2);
    println!("norm_accounting_error = {:.3e}", state.norm_accounting_error());
    if let Some(pat) = &pattern {
        println!("pattern_clamped_pixels = {}", pat.clamp_count());
    }
    Ok(())
}

fn pulse_test(area: Area, mode: Mode, g0: f64, delta: f64) -> atomlith::Result<()> {
    let grid = GridSpec::square(64, 1.0)?;
    let mode = match mode {
        Mode::Ideal => PulseMode::Ideal,
        Mode::Physical => PulseMode::Physical,
    };
    let mut spec = RamanPulseSpec::new(g0, delta, 0.0, mode);
    let omega = raman_rabi(&spec)?;
    spec.duration = match area {
        Area::Pi => spec.pi_duration()?,
        Area::Pi2 => spec.pi_half_duration()?,
    };
    for w in spec.warnings() {
        eprintln!("warning: {w}");
    }
    let packet = SpinorField::pure_ground(gaussian_packet(grid, &GaussianSpec::new(0.1))?);
    let out = match mode {
        PulseMode::Ideal => apply_pulse_ideal(&packet, &spec)?,
        PulseMode::Physical => apply_pulse_physical(&packet, &spec)?,
    };
    let (p1, p2, p3) = out.populations();
    println!("omega_raman = {:.15e}", omega);
    println!("duration = {:.15e}", spec.duration);
    println!("population_1 = {:.15e}", p1);
    println!("population_2 = {:.15e}", p2);
    println!("population_3 = {:.15e}", p3);
    println!("norm_error = {:.3e}", (p1 + p2 + p3 - 1.0).abs());
    let jc = grid.ny() / 2;
    let ic = grid.nx() / 2;
    let c3 = out.c3.data()[[jc, ic]];
    let c1_in = packet.c1.data()[[jc, ic]];
    println!("c3_center_phase = {:.15e}", (c3 / c1_in).arg());
    let (a1, a3) = analytic_two_level(&spec, spec.duration, Complex64::new(1.0, 0.0), Complex64::default())?;
    println!("closed_form_population_1 = {:.15e}", a1.norm_sqr());
    println!("closed_form_population_3 = {:.15e}", a3.norm_sqr());
    println!("population_1_deviation = {:.3e}", (p1 - a1.norm_sqr()).abs());
    println!("population_3_deviation = {:.3e}", (p3 - a3.norm_sqr()).abs());
    Ok(())
}

fn params_report(p: &rb87::Rb87Params, sigma_in: f64, ta: f64, tb: f64) -> atomlith::Result<()> {
    println!("gamma = {:.6e}", p.gamma);
    println!("i_sat = {:.6e}", p.i_sat);
    println!("i_max = {:.6e}", p.i_max);
    println!("delta = {:.6e}", p.delta);
    println!("g0 = {:.6e}", p.g0);
    println!("mass = {:.6e}", p.mass);
    println!("k = {:.6e}", p.k);
    println!("g0_max = {:.6e}", rb87::g0_max(p.i_max, p.i_sat, p.gamma));
    let (t_pi, t_pi2) = rb87::pulse_durations(p.g0, p.delta)?;
    println!("omega_raman = {:.6e}", p.g0 * p.g0 / (2.0 * p.delta));
    println!("t_pi = {:.6e}", t_pi);
    println!("t_pi2 = {:.6e}", t_pi2);
    let tau_ls = rb87::light_shift_duration(p.g0, p.delta)?;
    println!("light_shift_tau = {:.6e}", tau_ls);
    let se_pulse = rb87::spontaneous_emission_check(p.g0, p.delta, p.gamma, t_pi)?;
    println!("se_raman_ratio = {:.6e}", se_pulse.raman);
    println!("se_raman_pass = {}", se_pulse.raman_pass);
    let se_ls = rb87::spontaneous_emission_check(p.g0, p.delta, p.gamma, tau_ls)?;
    println!("se_light_shift_ratio = {:.6e}", se_ls.single_photon);
    println!("se_light_shift_pass = {}", se_ls.single_photon_pass);
    let report =
        rb87::validate_restrictions(sigma_in, ta, tb, p.k, UnitSystem::si_rb87())?;
    println!("restrictions_sigma_in = {sigma_in:.6e}");
    println!("restrictions_ta = {ta:.6e}");
    println!("restrictions_tb = {tb:.6e}");
    for (i, e) in report.entries.iter().enumerate() {
        println!("restriction_{i}_name = {}", e.name);
        println!("restriction_{i}_lhs = {:.6e}", e.lhs);
        println!("restriction_{i}_rhs = {:.6e}", e.rhs);
        println!("restriction_{i}_margin = {:.6e}", e.margin);
        println!("restriction_{i}_pass = {}", e.pass);
    }
    println!("restrictions_overall_pass = {}", report.overall_pass());
    Ok(())
}
