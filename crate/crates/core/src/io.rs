//! Field dumps, run summaries and VTK export.
//!
//! A dump is a pair of files: `<stem>.bin` with the physical values as
//! little-endian `f64` (axis 0 fastest) and `<stem>.json` describing the grid
//! and model.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{forward, PhysicalField, SpectralField};
use crate::grid::Grid;
use crate::model::ModelParams;

/// Sidecar of a field dump.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DumpHeader {
    #[serde(rename = "M")]
    pub m: usize,
    pub d: usize,
    /// Bravais matrix, row-major.
    #[serde(rename = "A")]
    pub a: Vec<f64>,
    /// Reciprocal matrix, row-major.
    #[serde(rename = "B")]
    pub b: Vec<f64>,
    pub tau: f64,
    pub gamma: f64,
    pub energy: Option<f64>,
}

fn row_major(m: &nalgebra::DMatrix<f64>) -> Vec<f64> {
    let mut out = Vec::with_capacity(m.len());
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            out.push(m[(i, j)]);
        }
    }
    out
}

fn with_ext(stem: &Path, ext: &str) -> PathBuf {
    let mut s = stem.as_os_str().to_owned();
    s.push(".");
    s.push(ext);
    PathBuf::from(s)
}

/// Writes `<stem>.bin` and `<stem>.json`.
pub fn write_dump(stem: &Path, psi: &PhysicalField, p: &ModelParams, energy: Option<f64>) -> Result<()> {
    if let Some(dir) = stem.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir)?;
    }
    let grid = psi.grid();
    let mut bin = BufWriter::new(File::create(with_ext(stem, "bin"))?);
    for v in psi.values() {
        bin.write_all(&v.to_le_bytes())?;
    }
    bin.flush()?;
    let header = DumpHeader {
        m: grid.m(),
        d: grid.dim(),
        a: row_major(grid.bravais()),
        b: row_major(grid.reciprocal()),
        tau: p.tau,
        gamma: p.gamma,
        energy,
    };
    let json = BufWriter::new(File::create(with_ext(stem, "json"))?);
    serde_json::to_writer_pretty(json, &header)?;
    Ok(())
}

/// Writes the physical form of a spectral field.
pub fn write_spectral_dump(stem: &Path, u: &SpectralField, p: &ModelParams, energy: Option<f64>) -> Result<()> {
    write_dump(stem, &u.to_physical()?, p, energy)
}

/// Reads a dump written by [`write_dump`]. `stem` may carry either extension.
pub fn read_dump(stem: &Path) -> Result<(PhysicalField, DumpHeader)> {
    let stem = match stem.extension().and_then(|e| e.to_str()) {
        Some("bin") | Some("json") => stem.with_extension(""),
        _ => stem.to_path_buf(),
    };
    let text = std::fs::read_to_string(with_ext(&stem, "json"))?;
    let header: DumpHeader = serde_json::from_str(&text)?;
    let grid = Grid::new(header.m, header.d, &header.b)?.shared();
    let bytes = std::fs::read(with_ext(&stem, "bin"))?;
    if bytes.len() != 8 * grid.len() {
        return Err(Error::LengthMismatch { expected: grid.len(), got: bytes.len() / 8 });
    }
    let values = bytes.chunks_exact(8).map(|c| f64::from_le_bytes(c.try_into().expect("8-byte chunk"))).collect();
    Ok((PhysicalField::new(grid, values)?, header))
}

/// Loads a dump as a mean-pinned spectral field on `grid` (or its own grid).
pub fn read_spectral_dump(stem: &Path, grid: Option<&Arc<Grid>>) -> Result<(SpectralField, DumpHeader)> {
    let (psi, header) = read_dump(stem)?;
    let psi = match grid {
        Some(g) if !g.same_as(psi.grid()) => {
            if g.m() != header.m || g.dim() != header.d {
                return Err(Error::GridMismatch);
            }
            PhysicalField::new(g.clone(), psi.into_values())?
        }
        _ => psi,
    };
    Ok((forward(&psi).project_mean_zero(), header))
}

/// Legacy VTK structured-points file of a field on an orthogonal cell.
pub fn write_vtk(path: &Path, psi: &PhysicalField) -> Result<()> {
    let grid = psi.grid();
    let a = grid.bravais();
    let d = grid.dim();
    let off_diag = (0..d).flat_map(|i| (0..d).map(move |j| (i, j))).any(|(i, j)| i != j && a[(i, j)].abs() > 1e-12);
    if off_diag {
        return Err(Error::Config("VTK export needs an orthogonal cell".into()));
    }
    let m = grid.m();
    let mut dims = [1usize; 3];
    let mut spacing = [1.0f64; 3];
    for i in 0..d {
        dims[i] = m;
        spacing[i] = a[(i, i)] / m as f64;
    }
    let mut out = BufWriter::new(File::create(path)?);
    writeln!(out, "# vtk DataFile Version 3.0")?;
    writeln!(out, "order parameter")?;
    writeln!(out, "ASCII")?;
    writeln!(out, "DATASET STRUCTURED_POINTS")?;
    writeln!(out, "DIMENSIONS {} {} {}", dims[0], dims[1], dims[2])?;
    writeln!(out, "ORIGIN 0 0 0")?;
    writeln!(out, "SPACING {} {} {}", spacing[0], spacing[1], spacing[2])?;
    writeln!(out, "POINT_DATA {}", grid.len())?;
    writeln!(out, "SCALARS psi double 1")?;
    writeln!(out, "LOOKUP_TABLE default")?;
    for v in psi.values() {
        writeln!(out, "{v:.10e}")?;
    }
    out.flush()?;
    Ok(())
}

/// Machine-readable outcome of a run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub method: String,
    pub tau: f64,
    pub gamma: f64,
    pub energy: f64,
    pub grad_inf: f64,
    pub converged: bool,
    pub iterations: usize,
    pub classification: String,
    pub eigenvalues: Vec<f64>,
    pub eig_residuals: Vec<f64>,
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir)?;
    }
    let out = BufWriter::new(File::create(path)?);
    serde_json::to_writer_pretty(out, value)?;
    Ok(())
}

/// Creates `path` and hands a buffered writer to `body`.
pub fn write_with<F>(path: &Path, body: F) -> Result<()>
where
    F: FnOnce(&mut BufWriter<File>) -> std::io::Result<()>,
{
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir)?;
    }
    let mut out = BufWriter::new(File::create(path)?);
    body(&mut out)?;
    out.flush()?;
    Ok(())
}
