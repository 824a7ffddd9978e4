//! The `PLUMESET1` dataset format.
//!
//! A text header followed by raw binary value blocks:
//!
//! ```text
//! PLUMESET1
//! grid <n_lon> <n_lat> <lon_min> <lat_min> <d_lon> <d_lat>
//! units <s_m3_per_kg | ns_per_g>
//! count <N>
//! <origin_lon>,<origin_lat>,<time_seconds>,<departure_angle or empty>   (N lines)
//! <N blocks of K little-endian 64-bit floats>
//! ```
//!
//! Header floats are written in Rust's shortest round-trip notation, so a
//! write/read cycle is bit-exact.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

use crate::{GridSpec, Plume, PlumeError, PlumeSet, SensitivityUnits};

pub const MAGIC: &str = "PLUMESET1";

pub fn write_plumeset<W: Write>(mut w: W, set: &PlumeSet) -> Result<(), PlumeError> {
    let g = set.grid();
    writeln!(w, "{MAGIC}")?;
    writeln!(w, "grid {} {} {} {} {} {}", g.n_lon, g.n_lat, g.lon_min, g.lat_min, g.d_lon, g.d_lat)?;
    let units = set.iter().next().map_or(SensitivityUnits::NsPerG, |p| p.units);
    writeln!(w, "units {}", units.tag())?;
    writeln!(w, "count {}", set.len())?;
    for p in set.iter() {
        match p.departure_angle {
            Some(a) => writeln!(w, "{},{},{},{}", p.origin.0, p.origin.1, p.time, a)?,
            None => writeln!(w, "{},{},{},", p.origin.0, p.origin.1, p.time)?,
        }
    }
    for p in set.iter() {
        for v in p.values() {
            w.write_all(&v.to_le_bytes())?;
        }
    }
    Ok(())
}

pub fn read_plumeset<R: Read>(r: R) -> Result<PlumeSet, PlumeError> {
    let mut r = BufReader::new(r);
    let mut line = String::new();

    let magic = read_trimmed_line(&mut r, &mut line)?;
    if magic != MAGIC {
        return Err(PlumeError::Format(format!("bad magic {magic:?}, expected {MAGIC:?}")));
    }

    let grid_line = read_trimmed_line(&mut r, &mut line)?;
    let grid = parse_grid_line(&grid_line)?;

    let units_line = read_trimmed_line(&mut r, &mut line)?;
    let units_tag = units_line
        .strip_prefix("units ")
        .ok_or_else(|| PlumeError::Format("missing units line".into()))?;
    let units = SensitivityUnits::from_tag(units_tag)?;

    let count_line = read_trimmed_line(&mut r, &mut line)?;
    let count: usize = count_line
        .strip_prefix("count ")
        .and_then(|s| s.parse().ok())
        .ok_or_else(|| PlumeError::Format("missing or malformed count line".into()))?;

    let mut meta = Vec::with_capacity(count);
    for i in 0..count {
        let meta_line = read_trimmed_line(&mut r, &mut line)?;
        meta.push(parse_meta_line(&meta_line, i)?);
    }

    let k = grid.cells();
    let mut set = PlumeSet::new(grid);
    let mut buf = vec![0u8; k * 8];
    for (origin, time, angle) in meta {
        r.read_exact(&mut buf)?;
        let values: Vec<f64> = buf
            .chunks_exact(8)
            .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
            .collect();
        set.push(Plume::new(grid, values, units, origin, time, angle)?)?;
    }
    Ok(set)
}

pub fn write_plumeset_file(path: &Path, set: &PlumeSet) -> Result<(), PlumeError> {
    let f = BufWriter::new(File::create(path)?);
    write_plumeset(f, set)
}

pub fn read_plumeset_file(path: &Path) -> Result<PlumeSet, PlumeError> {
    read_plumeset(File::open(path)?)
}

fn read_trimmed_line<R: BufRead>(r: &mut R, line: &mut String) -> Result<String, PlumeError> {
    line.clear();
    let n = r.read_line(line)?;
    if n == 0 {
        return Err(PlumeError::Format("unexpected end of header".into()));
    }
    Ok(line.trim_end_matches(['\r', '\n']).to_string())
}

fn parse_grid_line(s: &str) -> Result<GridSpec, PlumeError> {
    let body = s
        .strip_prefix("grid ")
        .ok_or_else(|| PlumeError::Format("missing grid line".into()))?;
    let parts: Vec<&str> = body.split_whitespace().collect();
    if parts.len() != 6 {
        return Err(PlumeError::Format(format!("grid line needs 6 fields, got {}", parts.len())));
    }
    let field = |i: usize| -> Result<f64, PlumeError> {
        parts[i]
            .parse()
            .map_err(|_| PlumeError::Format(format!("bad grid field {:?}", parts[i])))
    };
    GridSpec::new(
        parts[0]
            .parse()
            .map_err(|_| PlumeError::Format(format!("bad n_lon {:?}", parts[0])))?,
        parts[1]
            .parse()
            .map_err(|_| PlumeError::Format(format!("bad n_lat {:?}", parts[1])))?,
        field(2)?,
        field(3)?,
        field(4)?,
        field(5)?,
    )
}

type PlumeMeta = ((f64, f64), i64, Option<f64>);

fn parse_meta_line(s: &str, index: usize) -> Result<PlumeMeta, PlumeError> {
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() != 4 {
        return Err(PlumeError::Format(format!(
            "plume {index}: meta line needs 4 comma-separated fields, got {}",
            parts.len()
        )));
    }
    let err = |what: &str| PlumeError::Format(format!("plume {index}: bad {what} field"));
    let lon: f64 = parts[0].parse().map_err(|_| err("origin_lon"))?;
    let lat: f64 = parts[1].parse().map_err(|_| err("origin_lat"))?;
    let time: i64 = parts[2].parse().map_err(|_| err("time"))?;
    let angle = if parts[3].is_empty() {
        None
    } else {
        Some(parts[3].parse().map_err(|_| err("departure_angle"))?)
    };
    Ok(((lon, lat), time, angle))
}
