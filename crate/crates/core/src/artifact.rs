//! Binary artifacts for weight sets and traces.
//!
//! Layout (little endian): 4-byte magic, `u32` version, then the payload.
//! Decoders validate every length against the remaining input before
//! allocating, so arbitrary bytes produce an error rather than a panic.

use nalgebra::DMatrix;

use crate::cq::{gamma_coefficients, CqWeightSet, Trace};
use crate::error::{Error, Result};
use crate::linalg::C64;
use crate::tableau::{tableau, Family};

pub const WEIGHTS_MAGIC: &[u8; 4] = b"GCQW";
pub const TRACE_MAGIC: &[u8; 4] = b"GCQT";
pub const VERSION: u32 = 1;

/// Bounds-checked little-endian cursor shared by the artifact decoders.
pub struct Reader<'a> {
    data: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    pub fn new(data: &'a [u8]) -> Self {
        Self { data, pos: 0 }
    }

    pub fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        let end = self
            .pos
            .checked_add(n)
            .filter(|&e| e <= self.data.len())
            .ok_or_else(|| Error::Decode("unexpected end of input".into()))?;
        let out = &self.data[self.pos..end];
        self.pos = end;
        Ok(out)
    }

    pub fn remaining(&self) -> usize {
        self.data.len() - self.pos
    }

    pub fn u8(&mut self) -> Result<u8> {
        Ok(self.take(1)?[0])
    }

    pub fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }

    pub fn u64(&mut self) -> Result<u64> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }

    pub fn f64(&mut self) -> Result<f64> {
        Ok(f64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }

    pub fn header(&mut self, magic: &[u8; 4]) -> Result<()> {
        if self.take(4)? != magic {
            return Err(Error::Decode("bad magic".into()));
        }
        let v = self.u32()?;
        if v != VERSION {
            return Err(Error::Decode(format!("unsupported version {v}")));
        }
        Ok(())
    }

    /// Number of `elem`-byte items, checked against the remaining input.
    pub fn count(&mut self, items: u64, elem: usize) -> Result<usize> {
        let bytes = items
            .checked_mul(elem as u64)
            .filter(|&b| b <= self.remaining() as u64)
            .ok_or_else(|| Error::Decode("length exceeds input".into()))?;
        Ok((bytes / elem as u64) as usize)
    }

    pub fn finish(&self) -> Result<()> {
        if self.remaining() != 0 {
            return Err(Error::Decode(format!(
                "{} trailing bytes",
                self.remaining()
            )));
        }
        Ok(())
    }
}

fn family_code(f: Family) -> u8 {
    match f {
        Family::Gauss => 0,
        Family::RadauIIA => 1,
    }
}

fn family_from_code(c: u8) -> Result<Family> {
    match c {
        0 => Ok(Family::Gauss),
        1 => Ok(Family::RadauIIA),
        _ => Err(Error::Decode(format!("unknown family code {c}"))),
    }
}

pub fn encode_weights(ws: &CqWeightSet) -> Vec<u8> {
    let size = ws.m * ws.dim;
    let mut out = Vec::with_capacity(48 + ws.w.len() * size * size * 16);
    out.extend_from_slice(WEIGHTS_MAGIC);
    out.extend_from_slice(&VERSION.to_le_bytes());
    out.push(family_code(ws.family));
    out.extend_from_slice(&(ws.m as u32).to_le_bytes());
    out.extend_from_slice(&(ws.dim as u32).to_le_bytes());
    out.extend_from_slice(&(ws.steps as u64).to_le_bytes());
    out.extend_from_slice(&ws.h.to_le_bytes());
    out.extend_from_slice(&ws.max_condition.to_le_bytes());
    for block in &ws.w {
        // Row-major.
        for i in 0..size {
            for j in 0..size {
                out.extend_from_slice(&block[(i, j)].re.to_le_bytes());
                out.extend_from_slice(&block[(i, j)].im.to_le_bytes());
            }
        }
    }
    out
}

/// Decodes a weight set; `gamma` and `R(inf)` are rebuilt from the tableau.
pub fn decode_weights(data: &[u8]) -> Result<CqWeightSet> {
    let mut r = Reader::new(data);
    r.header(WEIGHTS_MAGIC)?;
    let family = family_from_code(r.u8()?)?;
    let m = r.u32()? as usize;
    let dim = r.u32()? as usize;
    let steps = r.u64()?;
    let h = r.f64()?;
    let max_condition = r.f64()?;
    if m == 0 || m > family.max_stages() || dim == 0 {
        return Err(Error::Decode("invalid stage count or dimension".into()));
    }
    if !(h > 0.0 && h.is_finite()) || steps == 0 {
        return Err(Error::Decode("invalid step data".into()));
    }
    let size = m
        .checked_mul(dim)
        .ok_or_else(|| Error::Decode("size overflow".into()))?;
    let per_block = (size as u64)
        .checked_mul(size as u64)
        .ok_or_else(|| Error::Decode("size overflow".into()))?;
    let total = per_block
        .checked_mul(
            steps
                .checked_add(1)
                .ok_or_else(|| Error::Decode("size overflow".into()))?,
        )
        .ok_or_else(|| Error::Decode("size overflow".into()))?;
    r.count(total, 16)?;
    let steps = steps as usize;
    let mut w = Vec::with_capacity(steps + 1);
    for _ in 0..=steps {
        let mut vals = Vec::with_capacity(size * size);
        for _ in 0..size * size {
            let re = r.f64()?;
            let im = r.f64()?;
            vals.push(C64::new(re, im));
        }
        w.push(DMatrix::from_row_slice(size, size, &vals));
    }
    r.finish()?;
    let t = tableau(family, m).map_err(|e| Error::Decode(e.to_string()))?;
    Ok(CqWeightSet {
        h,
        steps,
        family,
        m,
        dim,
        w,
        gamma: gamma_coefficients(&t, steps),
        r_infinity: t.r_infinity(),
        max_condition,
    })
}

pub fn encode_trace(trace: &Trace) -> Vec<u8> {
    let dim = trace.values.first().map_or(0, |v| v.len());
    let mut out = Vec::with_capacity(40 + trace.values.len() * dim * 8);
    out.extend_from_slice(TRACE_MAGIC);
    out.extend_from_slice(&VERSION.to_le_bytes());
    out.extend_from_slice(&(trace.values.len() as u64).to_le_bytes());
    out.extend_from_slice(&(dim as u64).to_le_bytes());
    out.extend_from_slice(&trace.h.to_le_bytes());
    out.extend_from_slice(&trace.max_imag.to_le_bytes());
    for v in &trace.values {
        for x in v {
            out.extend_from_slice(&x.to_le_bytes());
        }
    }
    out
}

pub fn decode_trace(data: &[u8]) -> Result<Trace> {
    let mut r = Reader::new(data);
    r.header(TRACE_MAGIC)?;
    let rows = r.u64()?;
    let dim = r.u64()?;
    let h = r.f64()?;
    let max_imag = r.f64()?;
    if !(h > 0.0 && h.is_finite()) {
        return Err(Error::Decode("invalid step".into()));
    }
    let total = rows
        .checked_mul(dim)
        .ok_or_else(|| Error::Decode("size overflow".into()))?;
    r.count(total, 8)?;
    if rows > 0 && dim == 0 {
        return Err(Error::Decode("empty rows".into()));
    }
    let (rows, dim) = (rows as usize, dim as usize);
    let mut values = Vec::with_capacity(rows);
    for _ in 0..rows {
        values.push((0..dim).map(|_| r.f64()).collect::<Result<Vec<_>>>()?);
    }
    r.finish()?;
    Ok(Trace {
        h,
        values,
        max_imag,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cq::compute_weights;
    use crate::kernels::ScalarKernel;
    use crate::tableau::gauss_tableau;

    #[test]
    fn weights_round_trip() {
        let t = gauss_tableau(2).unwrap();
        let ws = compute_weights(&ScalarKernel::Power { mu: 0.5 }, &t, 0.1, 8).unwrap();
        let back = decode_weights(&encode_weights(&ws)).unwrap();
        assert_eq!(back, ws);
    }

    #[test]
    fn trace_round_trip() {
        let tr = Trace {
            h: 0.25,
            values: vec![vec![0.0, 1.0], vec![2.5, -3.0]],
            max_imag: 1e-17,
        };
        assert_eq!(decode_trace(&encode_trace(&tr)).unwrap(), tr);
    }

    #[test]
    fn truncated_and_corrupt_inputs_fail() {
        let t = gauss_tableau(1).unwrap();
        let ws = compute_weights(&ScalarKernel::Power { mu: 1.0 }, &t, 0.5, 2).unwrap();
        let bytes = encode_weights(&ws);
        for cut in [0, 3, 8, 20, bytes.len() - 1] {
            assert!(decode_weights(&bytes[..cut]).is_err());
        }
        let mut bad = bytes.clone();
        bad[0] = b'X';
        assert!(decode_weights(&bad).is_err());
        let mut huge = bytes.clone();
        huge[17..25].copy_from_slice(&u64::MAX.to_le_bytes());
        assert!(decode_weights(&huge).is_err());
        let mut extra = bytes;
        extra.push(0);
        assert!(decode_weights(&extra).is_err());
    }
}
