//! On-disk cache of assembled matrices.
//!
//! Artifact layout (little endian): magic `GBEM`, `u32` version, `u64` panel
//! count `n`, the frequency as two `f64`, `n` panel lengths, then `V` and `K`
//! as row-major complex blocks.

use std::fs;
use std::path::{Path, PathBuf};

use gausscq_core::artifact::{Reader, VERSION};
use gausscq_core::{CMatrix, Error, Result, C64};

use crate::assembly::HelmholtzMatrices;
use crate::mesh::BoundaryMesh;

pub const MATRIX_MAGIC: &[u8; 4] = b"GBEM";

pub fn encode_matrices(m: &HelmholtzMatrices) -> Vec<u8> {
    let n = m.mass.len();
    let mut out = Vec::with_capacity(32 + 8 * n + 32 * n * n);
    out.extend_from_slice(MATRIX_MAGIC);
    out.extend_from_slice(&VERSION.to_le_bytes());
    out.extend_from_slice(&(n as u64).to_le_bytes());
    out.extend_from_slice(&m.s.re.to_le_bytes());
    out.extend_from_slice(&m.s.im.to_le_bytes());
    for l in &m.mass {
        out.extend_from_slice(&l.to_le_bytes());
    }
    for a in [&m.v, &m.kd] {
        for i in 0..n {
            for j in 0..n {
                out.extend_from_slice(&a[(i, j)].re.to_le_bytes());
                out.extend_from_slice(&a[(i, j)].im.to_le_bytes());
            }
        }
    }
    out
}

pub fn decode_matrices(data: &[u8]) -> Result<HelmholtzMatrices> {
    let mut r = Reader::new(data);
    r.header(MATRIX_MAGIC)?;
    let n = r.u64()?;
    let s = C64::new(r.f64()?, r.f64()?);
    if n == 0 {
        return Err(Error::Decode("empty matrix".into()));
    }
    let entries = n
        .checked_mul(n)
        .and_then(|e| e.checked_mul(4))
        .and_then(|e| e.checked_add(n))
        .ok_or_else(|| Error::Decode("size overflow".into()))?;
    r.count(entries, 8)?;
    let n = n as usize;
    let mut mass = Vec::with_capacity(n);
    for _ in 0..n {
        mass.push(r.f64()?);
    }
    let mut read_block = || -> Result<CMatrix> {
        let mut vals = Vec::with_capacity(n * n);
        for _ in 0..n * n {
            vals.push(C64::new(r.f64()?, r.f64()?));
        }
        Ok(CMatrix::from_row_slice(n, n, &vals))
    };
    let v = read_block()?;
    let kd = read_block()?;
    r.finish()?;
    Ok(HelmholtzMatrices { s, v, kd, mass })
}

/// 64-bit FNV-1a hash.
pub fn fingerprint(bytes: &[u8]) -> u64 {
    bytes.iter().fold(0xcbf2_9ce4_8422_2325, |h, &b| {
        (h ^ b as u64).wrapping_mul(0x0000_0100_0000_01b3)
    })
}

/// Fingerprint of the mesh geometry.
pub fn mesh_fingerprint(mesh: &BoundaryMesh) -> u64 {
    let mut bytes = Vec::with_capacity(32 * mesh.len());
    for p in mesh.panels() {
        for x in [p.a[0], p.a[1], p.b[0], p.b[1]] {
            bytes.extend_from_slice(&x.to_bits().to_le_bytes());
        }
    }
    fingerprint(&bytes)
}

/// Frequency rounded to 12 significant digits, as used in cache keys.
pub fn frequency_key(s: C64) -> String {
    format!("{:.11e}_{:.11e}", s.re, s.im)
}

/// Directory of matrix artifacts for one mesh.
#[derive(Debug, Clone)]
pub struct MatrixCache {
    dir: PathBuf,
    prefix: String,
}

impl MatrixCache {
    pub fn new(dir: impl Into<PathBuf>, label: &str, mesh: &BoundaryMesh) -> Result<Self> {
        let dir = dir.into();
        fs::create_dir_all(&dir)?;
        let prefix = format!("{label}-n{}-{:016x}", mesh.len(), mesh_fingerprint(mesh));
        Ok(Self { dir, prefix })
    }

    pub fn path(&self, s: C64) -> PathBuf {
        self.dir
            .join(format!("{}-{}.gbem", self.prefix, frequency_key(s)))
    }

    /// Cached matrices for `s`, if present and readable.
    pub fn load(&self, s: C64) -> Option<HelmholtzMatrices> {
        let bytes = fs::read(self.path(s)).ok()?;
        decode_matrices(&bytes)
            .ok()
            .filter(|m| frequency_key(m.s) == frequency_key(s))
    }

    /// Writes through a temporary file so readers never see a partial artifact.
    pub fn store(&self, m: &HelmholtzMatrices) -> Result<()> {
        let path = self.path(m.s);
        let tmp = path.with_extension(format!("tmp{}", std::process::id()));
        fs::write(&tmp, encode_matrices(m))?;
        fs::rename(&tmp, &path)?;
        Ok(())
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }
}
