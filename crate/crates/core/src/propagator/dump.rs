//! Binary dump of `|ξ|²` for inspection outside the library.
//!
//! Layout, all little-endian:
//!
//! | bytes | content |
//! |-------|---------|
//! | 4     | magic `PGXI` |
//! | 4     | format version, `u32` = 1 |
//! | 12    | `nx, ny, nz` as `u32` |
//! | 24    | box lengths along `x, y, s` as `f64`, units of `σ` |
//! | 24    | box centre as `f64` |
//! | 8     | elapsed `τ = vt/σ` as `f64` |
//! | 8·nx·ny·nz | `|ξ|²` as `f64`, row-major `[s][x][y]` (`y` fastest) |
//!
//! Cell `(i, j, k)` sits at `centre + (index + ½ - n/2)·extent/n` per axis.

use std::io::{Read, Write};

use super::{Grid, GridSpec, PropagatorError, RelativeWavefunction};

const MAGIC: &[u8; 4] = b"PGXI";
const VERSION: u32 = 1;

/// A decoded dump.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityDump {
    pub grid: Grid,
    pub time: f64,
    pub density: Vec<f64>,
}

pub fn write_density<W: Write>(mut w: W, xi: &RelativeWavefunction) -> Result<(), PropagatorError> {
    let spec = xi.grid.spec;
    w.write_all(MAGIC)?;
    w.write_all(&VERSION.to_le_bytes())?;
    for n in spec.n {
        let n = u32::try_from(n).map_err(|_| PropagatorError::Format(format!("axis length {n} too large")))?;
        w.write_all(&n.to_le_bytes())?;
    }
    for x in spec.extent.iter().chain(&xi.grid.center).chain([&xi.time]) {
        w.write_all(&x.to_le_bytes())?;
    }
    for v in &xi.values {
        w.write_all(&v.norm_sqr().to_le_bytes())?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_density<R: Read>(mut r: R) -> Result<DensityDump, PropagatorError> {
    let mut magic = [0u8; 4];
    r.read_exact(&mut magic)?;
    if &magic != MAGIC {
        return Err(PropagatorError::Format("not a density dump".into()));
    }
    let version = read_u32(&mut r)?;
    if version != VERSION {
        return Err(PropagatorError::Format(format!("unsupported version {version}")));
    }
    let mut n = [0usize; 3];
    for v in &mut n {
        *v = read_u32(&mut r)? as usize;
    }
    let mut f = [0.0; 7];
    for v in &mut f {
        *v = read_f64(&mut r)?;
    }
    let spec = GridSpec::new(n, [f[0], f[1], f[2]]).map_err(|e| PropagatorError::Format(e.to_string()))?;
    let len = spec.len();
    let mut bytes = vec![0u8; 8 * len];
    r.read_exact(&mut bytes)?;
    let density = bytes
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().expect("chunk of 8")))
        .collect();
    Ok(DensityDump {
        grid: Grid {
            spec,
            center: [f[3], f[4], f[5]],
        },
        time: f[6],
        density,
    })
}

fn read_u32<R: Read>(r: &mut R) -> std::io::Result<u32> {
    let mut b = [0u8; 4];
    r.read_exact(&mut b)?;
    Ok(u32::from_le_bytes(b))
}

fn read_f64<R: Read>(r: &mut R) -> std::io::Result<f64> {
    let mut b = [0u8; 8];
    r.read_exact(&mut b)?;
    Ok(f64::from_le_bytes(b))
}
