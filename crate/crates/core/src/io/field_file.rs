use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;
use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectral::{Field, Grid, GridSpec, Space};

pub const MAGIC: [u8; 8] = *b"NL4SFLD\0";
pub const VERSION: u32 = 1;
pub const HEADER_LEN: usize = 64;

fn space_code(s: Space) -> u32 {
    match s {
        Space::Physical => 0,
        Space::Fourier => 1,
    }
}

/// Header: magic, version, dim, N per axis (u64 x 2), extent per axis
/// (f64 x 2), space flag, zero padding; all little-endian. The body is
/// interleaved `re, im` as f64.
pub fn write_field_binary(path: &Path, f: &Field) -> Result<()> {
    let g = f.grid().spec();
    let mut header = Vec::with_capacity(HEADER_LEN);
    header.extend_from_slice(&MAGIC);
    header.extend_from_slice(&VERSION.to_le_bytes());
    header.extend_from_slice(&(g.dim as u32).to_le_bytes());
    for a in 0..2 {
        header.extend_from_slice(&(g.points.get(a).copied().unwrap_or(1) as u64).to_le_bytes());
    }
    for a in 0..2 {
        header.extend_from_slice(&g.extent.get(a).copied().unwrap_or(0.0).to_le_bytes());
    }
    header.extend_from_slice(&space_code(f.space()).to_le_bytes());
    header.resize(HEADER_LEN, 0);

    let mut w = BufWriter::new(File::create(path)?);
    w.write_all(&header)?;
    for v in f.values() {
        w.write_all(&v.re.to_le_bytes())?;
        w.write_all(&v.im.to_le_bytes())?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_field_binary(path: &Path) -> Result<Field> {
    let mut r = BufReader::new(File::open(path)?);
    let mut h = [0u8; HEADER_LEN];
    r.read_exact(&mut h)
        .map_err(|_| Error::Format(format!("{}: shorter than the {HEADER_LEN}-byte header", path.display())))?;
    if h[..8] != MAGIC {
        return Err(Error::Format(format!("{}: bad magic", path.display())));
    }
    let u32_at = |o: usize| u32::from_le_bytes(h[o..o + 4].try_into().unwrap());
    let u64_at = |o: usize| u64::from_le_bytes(h[o..o + 8].try_into().unwrap());
    let f64_at = |o: usize| f64::from_le_bytes(h[o..o + 8].try_into().unwrap());
    let version = u32_at(8);
    if version != VERSION {
        return Err(Error::Format(format!("{}: unsupported version {version}", path.display())));
    }
    let dim = u32_at(12) as usize;
    if !(1..=2).contains(&dim) {
        return Err(Error::Format(format!("{}: bad dimension {dim}", path.display())));
    }
    let points: Vec<usize> = (0..dim).map(|a| u64_at(16 + 8 * a) as usize).collect();
    let extent: Vec<f64> = (0..dim).map(|a| f64_at(32 + 8 * a)).collect();
    let space = match u32_at(48) {
        0 => Space::Physical,
        1 => Space::Fourier,
        s => return Err(Error::Format(format!("{}: bad space flag {s}", path.display()))),
    };
    let grid = Arc::new(Grid::from_spec(GridSpec { dim, extent, points })?);
    let mut body = Vec::new();
    r.read_to_end(&mut body)?;
    if body.len() != 16 * grid.len() {
        return Err(Error::Format(format!(
            "{}: body holds {} bytes, expected {}",
            path.display(),
            body.len(),
            16 * grid.len()
        )));
    }
    let values = body
        .chunks_exact(16)
        .map(|c| {
            Complex64::new(
                f64::from_le_bytes(c[..8].try_into().unwrap()),
                f64::from_le_bytes(c[8..].try_into().unwrap()),
            )
        })
        .collect();
    Field::new(grid, values, space)
}

/// Self-describing JSON form of a field.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FieldJson {
    pub grid: GridSpec,
    pub space: Space,
    pub re: Vec<f64>,
    pub im: Vec<f64>,
}

impl FieldJson {
    pub fn from_field(f: &Field) -> Self {
        Self {
            grid: f.grid().spec().clone(),
            space: f.space(),
            re: f.values().iter().map(|v| v.re).collect(),
            im: f.values().iter().map(|v| v.im).collect(),
        }
    }

    pub fn into_field(self) -> Result<Field> {
        if self.re.len() != self.im.len() {
            return Err(Error::Format("re and im arrays differ in length".into()));
        }
        let grid = Arc::new(Grid::from_spec(self.grid)?);
        let values = self.re.into_iter().zip(self.im).map(|(a, b)| Complex64::new(a, b)).collect();
        Field::new(grid, values, self.space)
    }
}

pub fn write_field_json(path: &Path, f: &Field) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    serde_json::to_writer(&mut w, &FieldJson::from_field(f))?;
    w.flush()?;
    Ok(())
}

pub fn read_field_json(path: &Path) -> Result<Field> {
    let text = std::fs::read_to_string(path)?;
    serde_json::from_str::<FieldJson>(&text)?.into_field()
}

/// Reads a `.json` field or a binary field file by extension.
pub fn read_field(path: &Path) -> Result<Field> {
    match path.extension().and_then(|e| e.to_str()) {
        Some("json") => read_field_json(path),
        _ => read_field_binary(path),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample(dim: usize) -> Field {
        let g = Arc::new(Grid::new(dim, 4.0, 16).unwrap());
        Field::from_fn(g, |x| Complex64::new((-x[0] * x[0]).exp(), x[1] * 0.5))
    }

    #[test]
    fn binary_round_trip_is_exact() {
        let dir = tempfile::tempdir().unwrap();
        for dim in [1, 2] {
            let f = sample(dim);
            let p = dir.path().join(format!("f{dim}.bin"));
            write_field_binary(&p, &f).unwrap();
            assert_eq!(std::fs::metadata(&p).unwrap().len() as usize, HEADER_LEN + 16 * f.grid().len());
            assert_eq!(read_field(&p).unwrap(), f);
            let hat = f.to_fourier().unwrap();
            write_field_binary(&p, &hat).unwrap();
            assert_eq!(read_field_binary(&p).unwrap(), hat);
        }
    }

    #[test]
    fn json_round_trip_is_exact() {
        let dir = tempfile::tempdir().unwrap();
        let f = sample(2);
        let p = dir.path().join("f.json");
        write_field_json(&p, &f).unwrap();
        assert_eq!(read_field(&p).unwrap(), f);
    }

    #[test]
    fn corrupt_files_are_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("bad.bin");
        std::fs::write(&p, b"short").unwrap();
        assert!(matches!(read_field_binary(&p), Err(Error::Format(_))));
        let f = sample(1);
        write_field_binary(&p, &f).unwrap();
        let mut bytes = std::fs::read(&p).unwrap();
        bytes.truncate(bytes.len() - 8);
        std::fs::write(&p, &bytes).unwrap();
        assert!(matches!(read_field_binary(&p), Err(Error::Format(_))));
        bytes[0] = b'X';
        std::fs::write(&p, &bytes).unwrap();
        assert!(matches!(read_field_binary(&p), Err(Error::Format(_))));
    }
}
