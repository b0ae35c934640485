//! Binary snapshots of spectral fields.
//!
//! Layout (little-endian): magic `NSBF`, `u32` version, `u8` ndim, `u8`
//! ncomp, `u64` N, `f64` L, then for each component the full coefficient
//! array in FFT order as interleaved `f64` real/imaginary pairs.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::field::{Components, SpectralField, VectorField};
use crate::grid::Grid;

pub const MAGIC: &[u8; 4] = b"NSBF";
pub const VERSION: u32 = 1;

pub fn write_snapshot<W: Write>(field: &(impl Components + ?Sized), mut w: W) -> Result<()> {
    let comps = field.components();
    let grid = comps[0].grid();
    w.write_all(MAGIC)?;
    w.write_all(&VERSION.to_le_bytes())?;
    w.write_all(&[grid.dim() as u8, comps.len() as u8])?;
    w.write_all(&(grid.points() as u64).to_le_bytes())?;
    w.write_all(&grid.length().to_le_bytes())?;
    for c in comps {
        for z in c.coeffs() {
            w.write_all(&z.re.to_le_bytes())?;
            w.write_all(&z.im.to_le_bytes())?;
        }
    }
    w.flush()?;
    Ok(())
}

pub fn save_snapshot(field: &(impl Components + ?Sized), path: impl AsRef<Path>) -> Result<()> {
    write_snapshot(field, BufWriter::new(File::create(path)?))
}

fn read_exact<R: Read>(r: &mut R, buf: &mut [u8]) -> Result<()> {
    r.read_exact(buf).map_err(|e| match e.kind() {
        std::io::ErrorKind::UnexpectedEof => Error::ShortRead,
        _ => Error::Io(e),
    })
}

/// Reads all components. A field is flagged real when its coefficients are
/// Hermitian to within `1e-12`.
pub fn read_snapshot<R: Read>(mut r: R) -> Result<Vec<SpectralField>> {
    let mut magic = [0u8; 4];
    r.read_exact(&mut magic).map_err(|e| match e.kind() {
        std::io::ErrorKind::UnexpectedEof => Error::BadMagic,
        _ => Error::Io(e),
    })?;
    if &magic != MAGIC {
        return Err(Error::BadMagic);
    }
    let mut b4 = [0u8; 4];
    read_exact(&mut r, &mut b4)?;
    let version = u32::from_le_bytes(b4);
    if version != VERSION {
        return Err(Error::VersionMismatch(version));
    }
    let mut b2 = [0u8; 2];
    read_exact(&mut r, &mut b2)?;
    let (ndim, ncomp) = (b2[0] as usize, b2[1] as usize);
    let mut b8 = [0u8; 8];
    read_exact(&mut r, &mut b8)?;
    let points = u64::from_le_bytes(b8) as usize;
    read_exact(&mut r, &mut b8)?;
    let length = f64::from_le_bytes(b8);
    if ncomp == 0 {
        return Err(Error::CorruptSnapshot("zero components".into()));
    }
    let grid = Grid::new(ndim, points, length)?;
    let mut out = Vec::with_capacity(ncomp);
    let mut buf = vec![0u8; 16 * grid.len()];
    for _ in 0..ncomp {
        read_exact(&mut r, &mut buf)?;
        let coeffs: Vec<Complex64> = buf
            .chunks_exact(16)
            .map(|c| {
                Complex64::new(
                    f64::from_le_bytes(c[..8].try_into().unwrap()),
                    f64::from_le_bytes(c[8..].try_into().unwrap()),
                )
            })
            .collect();
        if coeffs[0] != Complex64::new(0.0, 0.0) {
            return Err(Error::CorruptSnapshot("nonzero mean mode".into()));
        }
        let mut f = SpectralField::from_coeffs(&grid, coeffs, false)?;
        let real = f.hermitian_defect() <= 1e-12;
        f.set_real(real);
        out.push(f);
    }
    let mut extra = [0u8; 1];
    if r.read(&mut extra)? != 0 {
        return Err(Error::CorruptSnapshot("trailing bytes".into()));
    }
    Ok(out)
}

pub fn load_snapshot(path: impl AsRef<Path>) -> Result<Vec<SpectralField>> {
    read_snapshot(BufReader::new(File::open(path)?))
}

/// Loads a snapshot that must hold one component per axis.
pub fn load_vector_field(path: impl AsRef<Path>) -> Result<VectorField> {
    VectorField::new(load_snapshot(path)?)
}
