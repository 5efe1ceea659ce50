//! Binary field dumps: magic "AIF1", then little-endian u32 {nx, ny,
//! n_components, domain_tag}, then float64 little-endian interleaved (re, im)
//! in row-major order per component. The format carries no physical extents;
//! readers supply them.

use std::fs;
use std::path::Path;

use ndarray::Array2;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::field::{ComplexField, SpinorField};
use crate::grid::{Domain, GridSpec};

const MAGIC: &[u8; 4] = b"AIF1";

fn domain_tag(domain: Domain) -> u32 {
    match domain {
        Domain::Position => 0,
        Domain::Momentum => 1,
    }
}

fn tag_domain(tag: u32) -> Result<Domain> {
    match tag {
        0 => Ok(Domain::Position),
        1 => Ok(Domain::Momentum),
        other => Err(Error::Format(format!("unknown domain tag {other}"))),
    }
}

fn write_components(path: &Path, components: &[&ComplexField]) -> Result<()> {
    let first = components.first().ok_or_else(|| Error::Format("no components".into()))?;
    let grid = first.grid();
    let domain = first.domain();
    for c in components {
        c.expect_same_grid(grid)?;
        if c.domain() != domain {
            return Err(Error::Domain { expected: domain, found: c.domain() });
        }
    }
    let mut out =
        Vec::with_capacity(20 + components.len() * grid.nx() * grid.ny() * 16);
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&(grid.nx() as u32).to_le_bytes());
    out.extend_from_slice(&(grid.ny() as u32).to_le_bytes());
    out.extend_from_slice(&(components.len() as u32).to_le_bytes());
    out.extend_from_slice(&domain_tag(domain).to_le_bytes());
    for c in components {
        for v in c.data().iter() {
            out.extend_from_slice(&v.re.to_le_bytes());
            out.extend_from_slice(&v.im.to_le_bytes());
        }
    }
    fs::write(path, out)?;
    Ok(())
}

pub fn write_field(path: &Path, field: &ComplexField) -> Result<()> {
    write_components(path, &[field])
}

pub fn write_spinor(path: &Path, spinor: &SpinorField) -> Result<()> {
    write_components(path, &[&spinor.c1, &spinor.c2, &spinor.c3])
}

/// Raw contents of a dump: mesh size, domain, and the component meshes.
pub struct FieldDump {
    pub nx: usize,
    pub ny: usize,
    pub domain: Domain,
    pub components: Vec<Array2<Complex64>>,
}

pub fn read_dump(path: &Path) -> Result<FieldDump> {
    let bytes = fs::read(path)?;
    if bytes.len() < 20 || &bytes[0..4] != MAGIC {
        return Err(Error::Format("not an AIF1 field dump".into()));
    }
    let u32_at = |o: usize| u32::from_le_bytes(bytes[o..o + 4].try_into().unwrap()) as usize;
    let nx = u32_at(4);
    let ny = u32_at(8);
    let n_comp = u32_at(12);
    let domain = tag_domain(u32_at(16) as u32)?;
    let expected = 20 + n_comp * nx * ny * 16;
    if bytes.len() != expected {
        return Err(Error::Format(format!(
            "AIF1 payload is {} bytes, expected {expected}",
            bytes.len()
        )));
    }
    let mut components = Vec::with_capacity(n_comp);
    let mut off = 20;
    for _ in 0..n_comp {
        let mut data = Array2::<Complex64>::zeros((ny, nx));
        for v in data.iter_mut() {
            let re = f64::from_le_bytes(bytes[off..off + 8].try_into().unwrap());
            let im = f64::from_le_bytes(bytes[off + 8..off + 16].try_into().unwrap());
            *v = Complex64::new(re, im);
            off += 16;
        }
        components.push(data);
    }
    Ok(FieldDump { nx, ny, domain, components })
}

/// Read a single-component dump onto a grid with the supplied extents.
pub fn read_field(path: &Path, lx: f64, ly: f64) -> Result<ComplexField> {
    let dump = read_dump(path)?;
    if dump.components.len() != 1 {
        return Err(Error::Format(format!(
            "expected a single component, found {}",
            dump.components.len()
        )));
    }
    let grid = GridSpec::new(dump.nx, dump.ny, lx, ly)?;
    Ok(ComplexField::from_parts(
        grid,
        dump.domain,
        dump.components.into_iter().next().unwrap(),
    ))
}
