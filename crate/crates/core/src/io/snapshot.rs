//! Binary field snapshots: one ASCII header line, then little-endian `f64`
//! payload `density_like` followed by each velocity component.
//!
//! ```text
//! EALSNAP v1 dim=1 n=256 L=6.2831853071795862e0 time=0e0 formulation=symmetrized
//! ```

use std::path::Path;

use crate::dynamics::{Formulation, SimState};
use crate::error::{Error, Result};
use crate::grid::{Grid, ScalarField, VectorField};

const MAGIC: &str = "EALSNAP";
const VERSION: &str = "v1";

pub fn encode_snapshot(s: &SimState) -> Vec<u8> {
    let g = s.grid();
    let header = format!(
        "{MAGIC} {VERSION} dim={} n={} L={:.16e} time={:.16e} formulation={}\n",
        g.dim(),
        g.points(),
        g.length(),
        s.time,
        s.form.name()
    );
    let mut out = header.into_bytes();
    let mut push = |f: &ScalarField| {
        for v in f.values() {
            out.extend_from_slice(&v.to_le_bytes());
        }
    };
    push(&s.density_like);
    for c in s.velocity.components() {
        push(c);
    }
    out
}

fn bad(msg: impl Into<String>) -> Error {
    Error::Snapshot(msg.into())
}

pub fn decode_snapshot(bytes: &[u8]) -> Result<SimState> {
    let end = bytes
        .iter()
        .position(|&b| b == b'\n')
        .ok_or_else(|| bad("missing header line"))?;
    let header = std::str::from_utf8(&bytes[..end]).map_err(|_| bad("header is not UTF-8"))?;
    let mut words = header.split_whitespace();
    if words.next() != Some(MAGIC) {
        return Err(bad("not a snapshot file"));
    }
    match words.next() {
        Some(VERSION) => {}
        Some(v) => return Err(bad(format!("unsupported version '{v}'"))),
        None => return Err(bad("missing version")),
    }
    let (mut dim, mut n, mut length, mut time, mut form) = (None, None, None, None, None);
    for w in words {
        let (k, v) = w.split_once('=').ok_or_else(|| bad(format!("bad header field '{w}'")))?;
        match k {
            "dim" => dim = v.parse::<usize>().ok(),
            "n" => n = v.parse::<usize>().ok(),
            "L" => length = v.parse::<f64>().ok(),
            "time" => time = v.parse::<f64>().ok(),
            "formulation" => form = Formulation::parse(v),
            _ => return Err(bad(format!("unknown header field '{k}'"))),
        }
    }
    let (Some(dim), Some(n), Some(length), Some(time), Some(form)) = (dim, n, length, time, form)
    else {
        return Err(bad("header lacks dim, n, L, time or formulation"));
    };
    let grid = Grid::new(dim, length, n)?;
    let count = grid.len();
    let payload = &bytes[end + 1..];
    let expected = 8 * count * (1 + dim);
    if payload.len() != expected {
        return Err(bad(format!(
            "payload has {} bytes, header implies {expected}",
            payload.len()
        )));
    }
    let mut fields = payload.chunks_exact(8 * count).map(|chunk| {
        chunk
            .chunks_exact(8)
            .map(|b| f64::from_le_bytes(b.try_into().expect("8 bytes")))
            .collect::<Vec<f64>>()
    });
    let density = ScalarField::new(grid, fields.next().expect("density block"))?;
    let velocity = VectorField::new(grid, fields.collect())?;
    SimState::new(form, density, velocity, time)
}

pub fn write_snapshot(path: &Path, s: &SimState) -> Result<()> {
    std::fs::write(path, encode_snapshot(s)).map_err(|e| Error::io(path, e))
}

pub fn read_snapshot(path: &Path) -> Result<SimState> {
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    decode_snapshot(&bytes)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample(dim: usize) -> SimState {
        let g = Grid::new(dim, 3.0, 8).unwrap();
        let rho = ScalarField::from_fn(g, |x| 1.0 + 0.1 * x[0].sin() + x[1] / 7.0);
        let u = VectorField::from_fn(g, |x| [x[0].cos() / 3.0, -x[1]]);
        SimState::new(Formulation::Primitive, rho, u, 0.125 / 3.0).unwrap()
    }

    #[test]
    fn round_trip_is_bit_exact() {
        for dim in [1, 2] {
            let s = sample(dim);
            assert_eq!(decode_snapshot(&encode_snapshot(&s)).unwrap(), s);
        }
    }

    #[test]
    fn truncated_or_foreign_files_fail() {
        let bytes = encode_snapshot(&sample(1));
        assert!(decode_snapshot(&bytes[..bytes.len() - 1]).is_err());
        assert!(decode_snapshot(b"hello\n").is_err());
        let mut v2 = bytes.clone();
        v2[9] = b'2';
        assert!(decode_snapshot(&v2).is_err());
    }
}
