//! Binary files for fields and sinograms.
//!
//! Both formats are a magic word, a one-line JSON header and raw
//! little-endian `f64` samples:
//!
//! * `TFLD1 {"n":..,"m":..,"half_width":..,"samples":..}\n`, then the field
//!   node-major with compressed coefficients innermost;
//! * `SINO1 {"degree":..,"n":..,"directions":..,"us":..,"weights":..,"offsets":..}\n`,
//!   then values ordered `(ω, u, p)`.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{Grid, TensorField};
use crate::radon::{Degree, DirectionGrid, OffsetGrid, Sinogram};

const FIELD_MAGIC: &str = "TFLD1";
const SINO_MAGIC: &str = "SINO1";

#[derive(Serialize, Deserialize)]
struct FieldHeader {
    n: usize,
    m: usize,
    half_width: f64,
    samples: usize,
}

#[derive(Serialize, Deserialize)]
struct SinoHeader {
    degree: Degree,
    n: usize,
    directions: Vec<Vec<f64>>,
    us: Vec<Vec<Vec<f64>>>,
    weights: Vec<f64>,
    offsets: OffsetGrid,
}

fn write_payload(w: &mut impl Write, magic: &str, header: &impl Serialize, values: &[f64]) -> Result<()> {
    let json = serde_json::to_string(header).map_err(|e| Error::Format(e.to_string()))?;
    write!(w, "{magic} {json}\n")?;
    for v in values {
        w.write_all(&v.to_le_bytes())?;
    }
    w.flush()?;
    Ok(())
}

fn read_payload<H: for<'de> Deserialize<'de>>(r: &mut impl BufRead, magic: &str) -> Result<(H, Vec<f64>)> {
    let mut line = String::new();
    r.read_line(&mut line)?;
    let rest = line
        .strip_prefix(magic)
        .and_then(|s| s.strip_prefix(' '))
        .ok_or_else(|| Error::Format(format!("missing {magic} magic")))?;
    let header: H = serde_json::from_str(rest.trim_end()).map_err(|e| Error::Format(e.to_string()))?;
    let mut bytes = Vec::new();
    r.read_to_end(&mut bytes)?;
    if bytes.len() % 8 != 0 {
        return Err(Error::Format("payload is not a whole number of f64".into()));
    }
    let values = bytes
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().expect("chunk of eight bytes")))
        .collect();
    Ok((header, values))
}

pub fn write_field_to(w: &mut impl Write, f: &TensorField) -> Result<()> {
    let g = f.grid();
    let header = FieldHeader {
        n: g.n(),
        m: f.order(),
        half_width: g.half_width(),
        samples: g.samples(),
    };
    write_payload(w, FIELD_MAGIC, &header, f.data())
}

pub fn read_field_from(r: &mut impl BufRead) -> Result<TensorField> {
    let (h, values): (FieldHeader, _) = read_payload(r, FIELD_MAGIC)?;
    let grid = Grid::new(h.n, h.half_width, h.samples)?;
    TensorField::from_data(grid, h.m, values).map_err(|e| Error::Format(e.to_string()))
}

pub fn write_sinogram_to(w: &mut impl Write, s: &Sinogram) -> Result<()> {
    let dg = &s.grid;
    let us = if dg.u_count() == 0 {
        Vec::new()
    } else {
        (0..dg.len()).map(|k| dg.us(k).to_vec()).collect()
    };
    let header = SinoHeader {
        degree: s.degree.clone(),
        n: dg.n(),
        directions: dg.directions().to_vec(),
        us,
        weights: (0..dg.len()).map(|k| dg.weight(k)).collect(),
        offsets: *dg.offsets(),
    };
    write_payload(w, SINO_MAGIC, &header, &s.values)
}

pub fn read_sinogram_from(r: &mut impl BufRead) -> Result<Sinogram> {
    let (h, values): (SinoHeader, _) = read_payload(r, SINO_MAGIC)?;
    let dg = DirectionGrid::from_parts(h.n, h.directions, h.us, Some(h.weights), h.offsets)?;
    Sinogram::from_values(h.degree, Arc::new(dg), values).map_err(|e| Error::Format(e.to_string()))
}

pub fn write_field(path: impl AsRef<Path>, f: &TensorField) -> Result<()> {
    write_field_to(&mut BufWriter::new(File::create(path)?), f)
}

pub fn read_field(path: impl AsRef<Path>) -> Result<TensorField> {
    read_field_from(&mut BufReader::new(File::open(path)?))
}

pub fn write_sinogram(path: impl AsRef<Path>, s: &Sinogram) -> Result<()> {
    write_sinogram_to(&mut BufWriter::new(File::create(path)?), s)
}

pub fn read_sinogram(path: impl AsRef<Path>) -> Result<Sinogram> {
    read_sinogram_from(&mut BufReader::new(File::open(path)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symtensor::DegreeSignature;

    #[test]
    fn field_round_trip() {
        let g = Grid::new(2, 1.5, 8).unwrap();
        let f = TensorField::from_fn(g, 2, |x| vec![x[0], x[1] * x[0], -x[1]]).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("f.tfld");
        write_field(&path, &f).unwrap();
        assert_eq!(read_field(&path).unwrap(), f);
    }

    #[test]
    fn sinogram_round_trip() {
        let g = Grid::new(2, 1.5, 8).unwrap();
        let dg = Arc::new(DirectionGrid::circle(6, OffsetGrid::for_grid(&g), true).unwrap());
        for deg in [
            Degree::Frame(DegreeSignature::new(vec![1, 1])),
            Degree::Pair { normal: 0, tangent: 2 },
        ] {
            let mut s = Sinogram::zeros(deg, dg.clone()).unwrap();
            for (k, v) in s.values.iter_mut().enumerate() {
                *v = (k as f64).sin();
            }
            let mut buf = Vec::new();
            write_sinogram_to(&mut buf, &s).unwrap();
            let back = read_sinogram_from(&mut buf.as_slice()).unwrap();
            assert_eq!(back.degree, s.degree);
            assert_eq!(back.values, s.values);
            assert_eq!(back.grid.directions(), s.grid.directions());
        }
    }

    #[test]
    fn bad_magic_is_a_format_error() {
        let mut data = b"NOPE {}\n".as_slice();
        assert!(matches!(read_field_from(&mut data), Err(Error::Format(_))));
    }
}
