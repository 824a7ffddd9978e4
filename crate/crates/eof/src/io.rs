//! The `EOFBASIS1` on-disk format: a text header (magic, grid, the
//! truncation rank `r`, cell count `K`, training count `N`) followed by
//! little-endian 64-bit float blocks for the singular values, the right
//! vectors (`r*K`), and the training coefficients (`N*r`).

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

use plume_core::GridSpec;

use crate::{basis_io_parts, EofBasis, EofError};

pub const MAGIC: &str = "EOFBASIS1";

pub fn write_basis<W: Write>(mut w: W, basis: &EofBasis) -> Result<(), EofError> {
    let g = basis.grid();
    writeln!(w, "{MAGIC}")?;
    writeln!(w, "grid {} {} {} {} {} {}", g.n_lon, g.n_lat, g.lon_min, g.lat_min, g.d_lon, g.d_lat)?;
    writeln!(w, "dims {} {} {}", basis.r(), basis.cells(), basis.n_train())?;
    for v in basis.singular_values() {
        w.write_all(&v.to_le_bytes())?;
    }
    for gamma in 0..basis.r() {
        for v in basis.right_vector(gamma) {
            w.write_all(&v.to_le_bytes())?;
        }
    }
    for i in 0..basis.n_train() {
        for v in basis.train_coeff(i) {
            w.write_all(&v.to_le_bytes())?;
        }
    }
    Ok(())
}

pub fn read_basis<R: Read>(r: R) -> Result<EofBasis, EofError> {
    let mut rd = BufReader::new(r);
    let mut line = String::new();

    let magic = next_line(&mut rd, &mut line)?;
    if magic != MAGIC {
        return Err(EofError::Format(format!("bad magic {magic:?}, expected {MAGIC:?}")));
    }

    let grid_line = next_line(&mut rd, &mut line)?;
    let grid = parse_grid(&grid_line)?;

    let dims_line = next_line(&mut rd, &mut line)?;
    let dims: Vec<usize> = dims_line
        .strip_prefix("dims ")
        .ok_or_else(|| EofError::Format("missing dims line".into()))?
        .split_whitespace()
        .map(|t| t.parse().map_err(|_| EofError::Format(format!("bad dims field {t:?}"))))
        .collect::<Result<_, _>>()?;
    let [rank, k, n] = dims[..] else {
        return Err(EofError::Format("dims line needs 3 fields".into()));
    };
    if k != grid.cells() {
        return Err(EofError::Format(format!("K {k} does not match grid cell count {}", grid.cells())));
    }

    let singular_values = read_f64s(&mut rd, rank)?;
    let right_vectors = read_f64s(&mut rd, rank * k)?;
    let train_coeffs = read_f64s(&mut rd, n * rank)?;
    basis_io_parts(rank, grid, singular_values, right_vectors, train_coeffs, n)
}

pub fn write_basis_file(path: &Path, basis: &EofBasis) -> Result<(), EofError> {
    write_basis(BufWriter::new(File::create(path)?), basis)
}

pub fn read_basis_file(path: &Path) -> Result<EofBasis, EofError> {
    read_basis(File::open(path)?)
}

fn next_line<R: BufRead>(r: &mut R, line: &mut String) -> Result<String, EofError> {
    line.clear();
    if r.read_line(line)? == 0 {
        return Err(EofError::Format("unexpected end of header".into()));
    }
    Ok(line.trim_end_matches(['\r', '\n']).to_string())
}

fn parse_grid(s: &str) -> Result<GridSpec, EofError> {
    let body = s.strip_prefix("grid ").ok_or_else(|| EofError::Format("missing grid line".into()))?;
    let parts: Vec<&str> = body.split_whitespace().collect();
    if parts.len() != 6 {
        return Err(EofError::Format("grid line needs 6 fields".into()));
    }
    let int = |i: usize| -> Result<usize, EofError> {
        parts[i].parse().map_err(|_| EofError::Format(format!("bad grid field {:?}", parts[i])))
    };
    let float = |i: usize| -> Result<f64, EofError> {
        parts[i].parse().map_err(|_| EofError::Format(format!("bad grid field {:?}", parts[i])))
    };
    Ok(GridSpec::new(int(0)?, int(1)?, float(2)?, float(3)?, float(4)?, float(5)?)?)
}

fn read_f64s<R: Read>(r: &mut R, count: usize) -> Result<Vec<f64>, EofError> {
    let mut buf = vec![0u8; count * 8];
    r.read_exact(&mut buf)?;
    Ok(buf.chunks_exact(8).map(|c| f64::from_le_bytes(c.try_into().unwrap())).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fit_eof;
    use plume_core::{Plume, PlumeSet, SensitivityUnits};

    #[test]
    fn round_trip_preserves_the_basis() {
        let grid = GridSpec::new(3, 2, 0.0, 0.0, 0.5, 0.5).unwrap();
        let mut set = PlumeSet::new(grid);
        for i in 0..4 {
            let values: Vec<f64> = (0..6).map(|j| ((i * 6 + j) as f64 * 0.37).sin()).collect();
            set.push(
                Plume::new(grid, values, SensitivityUnits::NsPerG, (0.0, 0.0), 0, None).unwrap(),
            )
            .unwrap();
        }
        let basis = fit_eof(&set, 3).unwrap();
        let mut bytes = Vec::new();
        write_basis(&mut bytes, &basis).unwrap();
        let back = read_basis(bytes.as_slice()).unwrap();
        assert_eq!(back, basis);
    }

    #[test]
    fn rejects_bad_magic() {
        assert!(matches!(read_basis("NOPE\n".as_bytes()), Err(EofError::Format(_))));
    }
}
