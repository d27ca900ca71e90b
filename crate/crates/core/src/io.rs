//! Interchange formats. Floats are written in shortest round-trip form, so
//! identical values always produce identical bytes.

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::Path;

use faer::Mat;
use serde::{Deserialize, Serialize};

use crate::birkhoff::BirkhoffState;
use crate::error::{Error, Result};
use crate::flow::Trajectory;
use crate::lax::LaxSpectrum;
use crate::spectral::RealField;
use crate::C64;

fn pair(c: &C64) -> [f64; 2] {
    [c.re, c.im]
}

fn complex(p: &[f64; 2]) -> C64 {
    C64::new(p[0], p[1])
}

/// `{"N": order, "coeffs": [[re, im], ...]}` for `n = 0..N`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FieldJson {
    #[serde(rename = "N")]
    pub order: usize,
    pub coeffs: Vec<[f64; 2]>,
}

impl From<&RealField> for FieldJson {
    fn from(f: &RealField) -> Self {
        Self { order: f.order(), coeffs: f.nonnegative().iter().map(pair).collect() }
    }
}

impl TryFrom<FieldJson> for RealField {
    type Error = Error;
    fn try_from(j: FieldJson) -> Result<Self> {
        if j.coeffs.len() != j.order + 1 {
            return Err(Error::Format(format!("field with N = {} lists {} coefficients", j.order, j.coeffs.len())));
        }
        RealField::from_nonnegative(j.coeffs.iter().map(complex).collect())
    }
}

/// `n,re,im` rows for `n = 0..N`.
pub fn field_csv(f: &RealField) -> String {
    let mut out = String::from("n,re,im\n");
    for (n, c) in f.nonnegative().iter().enumerate() {
        let _ = writeln!(out, "{n},{},{}", c.re, c.im);
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumJson {
    pub lambda: Vec<f64>,
    pub gamma: Vec<f64>,
    #[serde(rename = "N_trust")]
    pub n_trust: usize,
}

impl SpectrumJson {
    pub fn from_spectrum(spec: &LaxSpectrum) -> Result<Self> {
        Ok(Self { lambda: spec.lambda().to_vec(), gamma: spec.gap_sequence()?, n_trust: spec.n_trust() })
    }
}

/// Header of a binary eigenvector dump.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatrixHeader {
    pub shape: [usize; 2],
    pub layout: String,
    pub dtype: String,
}

const LAYOUT: &str = "column-major";
const DTYPE: &str = "complex128-le";

/// Column-major little-endian `(re, im)` pairs and their header.
pub fn encode_matrix(m: &Mat<C64>) -> (MatrixHeader, Vec<u8>) {
    let mut bytes = Vec::with_capacity(16 * m.nrows() * m.ncols());
    for j in 0..m.ncols() {
        for i in 0..m.nrows() {
            let z = m[(i, j)];
            bytes.extend_from_slice(&z.re.to_le_bytes());
            bytes.extend_from_slice(&z.im.to_le_bytes());
        }
    }
    (MatrixHeader { shape: [m.nrows(), m.ncols()], layout: LAYOUT.into(), dtype: DTYPE.into() }, bytes)
}

pub fn decode_matrix(header: &MatrixHeader, bytes: &[u8]) -> Result<Mat<C64>> {
    let [rows, cols] = header.shape;
    if header.layout != LAYOUT || header.dtype != DTYPE {
        return Err(Error::Format(format!("unsupported matrix encoding {}/{}", header.layout, header.dtype)));
    }
    if bytes.len() != 16 * rows * cols {
        return Err(Error::Format(format!("expected {} bytes for a {rows}x{cols} matrix, got {}", 16 * rows * cols, bytes.len())));
    }
    let read = |k: usize| f64::from_le_bytes(bytes[8 * k..8 * k + 8].try_into().expect("8-byte slice"));
    Ok(Mat::from_fn(rows, cols, |i, j| {
        let k = 2 * (j * rows + i);
        C64::new(read(k), read(k + 1))
    }))
}

/// `{"c", "zeta", "kappa", "mu_ratio", "lambda"}`; only `c` and `zeta` are
/// needed to rebuild a state, the rest is derived data kept for readers.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BirkhoffJson {
    pub c: f64,
    pub zeta: Vec<[f64; 2]>,
    pub kappa: Vec<f64>,
    pub mu_ratio: Vec<f64>,
    pub lambda: Vec<f64>,
}

impl From<&BirkhoffState> for BirkhoffJson {
    fn from(s: &BirkhoffState) -> Self {
        Self {
            c: s.mean_c(),
            zeta: s.zeta().iter().map(pair).collect(),
            kappa: s.kappa().to_vec(),
            mu_ratio: s.mu_ratio().to_vec(),
            lambda: s.lambda().to_vec(),
        }
    }
}

impl TryFrom<BirkhoffJson> for BirkhoffState {
    type Error = Error;
    fn try_from(j: BirkhoffJson) -> Result<Self> {
        BirkhoffState::from_zeta(j.zeta.iter().map(complex).collect(), j.c)
    }
}

/// A gaps file: `[[γ_1, φ_1], [γ_2, φ_2], ...]`.
pub fn state_from_gaps(pairs: &[(f64, f64)], c: f64) -> Result<BirkhoffState> {
    let gamma: Vec<f64> = pairs.iter().map(|p| p.0).collect();
    let phi: Vec<f64> = pairs.iter().map(|p| p.1).collect();
    BirkhoffState::from_actions_angles(&gamma, &phi, c)
}

/// `t,mean,L2,H^s...,gamma_1..gamma_P`.
pub fn trajectory_csv(traj: &Trajectory) -> String {
    let mut out = String::from("t,mean,L2");
    let first = traj.diagnostics.first();
    if let Some(d) = first {
        for (s, _) in &d.sobolev {
            let _ = write!(out, ",H{s}");
        }
        for n in 1..=d.gaps.len() {
            let _ = write!(out, ",gamma_{n}");
        }
    }
    out.push('\n');
    for d in &traj.diagnostics {
        let _ = write!(out, "{},{},{}", d.t, d.mean, d.l2);
        for (_, v) in &d.sobolev {
            let _ = write!(out, ",{v}");
        }
        for g in &d.gaps {
            let _ = write!(out, ",{g}");
        }
        out.push('\n');
    }
    out
}

/// Write through a temporary file in the same directory and rename it into
/// place, so readers never observe a partial file.
pub fn atomic_write(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    std::fs::create_dir_all(dir)?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(bytes)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| Error::Io(e.to_string()))?;
    Ok(())
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    atomic_write(path, text.as_bytes())
}

pub fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    Ok(serde_json::from_str(&text)?)
}

pub fn read_field(path: &Path) -> Result<RealField> {
    read_json::<FieldJson>(path)?.try_into()
}

pub fn read_state(path: &Path) -> Result<BirkhoffState> {
    read_json::<BirkhoffJson>(path)?.try_into()
}

pub fn read_gaps(path: &Path, c: f64) -> Result<BirkhoffState> {
    let pairs: Vec<(f64, f64)> = read_json(path)?;
    state_from_gaps(&pairs, c)
}

/// Eigenvectors as `<stem>.bin` plus `<stem>.json`.
pub fn write_eigenvectors(dir: &Path, stem: &str, spec: &LaxSpectrum) -> Result<()> {
    let (header, bytes) = encode_matrix(spec.vectors());
    atomic_write(&dir.join(format!("{stem}.bin")), &bytes)?;
    write_json(&dir.join(format!("{stem}.json")), &header)
}

pub fn read_eigenvectors(dir: &Path, stem: &str) -> Result<Mat<C64>> {
    let header: MatrixHeader = read_json(&dir.join(format!("{stem}.json")))?;
    let bytes = std::fs::read(dir.join(format!("{stem}.bin")))?;
    decode_matrix(&header, &bytes)
}
