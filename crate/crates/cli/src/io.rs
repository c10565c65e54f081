//! On-disk artifacts: iteration histories, raw field dumps with a sidecar
//! description, and the run metadata record.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use nehari_core::{Field, Grid, IterationRecord};
use serde::{Deserialize, Serialize};

pub const HISTORY_FILE: &str = "history.csv";
pub const FIELD_META_FILE: &str = "field_meta.toml";
pub const RUN_META_FILE: &str = "run_meta.toml";

const HISTORY_COLUMNS: [&str; 10] = [
    "n",
    "energy",
    "residual",
    "step_kind",
    "alpha_used",
    "backtracks",
    "reference",
    "momentum",
    "armijo_alpha",
    "grad_norm",
];

fn float(x: f64) -> String {
    format!("{x:.16e}")
}

fn opt_float(x: Option<f64>) -> String {
    x.map(float).unwrap_or_default()
}

/// Writes the history as CSV behind a `#`-commented preamble describing the
/// columns. Floats carry 17 significant digits; absent values are empty.
pub fn write_history(path: &Path, history: &[IterationRecord]) -> Result<()> {
    let mut out = String::new();
    out.push_str("# iteration history, one row per iterate u_n (row 0 is the starting point)\n");
    out.push_str("# energy: E(u_n); residual: max_i sup-norm of the equation residual at u_n\n");
    out.push_str("# step_kind: initial | rsd | rag_extrapolated | armijo_fallback\n");
    out.push_str("# alpha_used: step length that produced u_n; backtracks: Armijo reductions j\n");
    out.push_str("# reference: nonmonotone reference C_{n-1}; momentum: t_{n-1}\n");
    out.push_str("# armijo_alpha: Armijo step found at u_{n-1}; grad_norm: H-norm of the driving Riemannian gradient\n");
    out.push_str(&HISTORY_COLUMNS.join(","));
    out.push('\n');
    for r in history {
        let row = [
            r.n.to_string(),
            float(r.energy),
            float(r.residual),
            r.step_kind.name().to_owned(),
            float(r.alpha_used),
            r.backtracks.to_string(),
            opt_float(r.reference),
            opt_float(r.momentum),
            opt_float(r.armijo_alpha),
            opt_float(r.grad_norm),
        ];
        out.push_str(&row.join(","));
        out.push('\n');
    }
    fs::write(path, out).with_context(|| format!("writing {}", path.display()))
}

pub fn read_history(path: &Path) -> Result<Vec<IterationRecord>> {
    let mut reader = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .from_path(path)
        .with_context(|| format!("opening {}", path.display()))?;
    let mut rows = Vec::new();
    for (i, row) in reader.deserialize().enumerate() {
        let row: IterationRecord =
            row.with_context(|| format!("{}: data row {}", path.display(), i + 1))?;
        if row.n != i {
            bail!("{}: expected n = {i}, found n = {}", path.display(), row.n);
        }
        rows.push(row);
    }
    Ok(rows)
}

/// Sidecar for the raw component dumps.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FieldMeta {
    pub components: usize,
    /// Rows and columns of each dump: the `M - 1` interior nodes per axis.
    pub shape: [usize; 2],
    pub half_width: f64,
    pub subdivisions: usize,
    pub dtype: String,
    pub order: String,
    pub files: Vec<String>,
}

pub fn field_file_name(component: usize) -> String {
    format!("field_{component}.bin")
}

/// Writes each component as little-endian `f64` in row-major order (first
/// index along `x`), plus the sidecar.
pub fn write_field(dir: &Path, field: &Field) -> Result<FieldMeta> {
    let grid = field.grid();
    let (rows, cols) = grid.shape();
    let mut files = Vec::new();
    for i in 0..field.components() {
        let name = field_file_name(i);
        let mut bytes = Vec::with_capacity(rows * cols * 8);
        for v in field.values(i).iter() {
            bytes.write_all(&v.to_le_bytes())?;
        }
        let path = dir.join(&name);
        fs::write(&path, bytes).with_context(|| format!("writing {}", path.display()))?;
        files.push(name);
    }
    let meta = FieldMeta {
        components: field.components(),
        shape: [rows, cols],
        half_width: grid.half_width(),
        subdivisions: grid.subdivisions(),
        dtype: "f64 little-endian".to_owned(),
        order: "row-major; row k, column l hold the node (x_k, y_l) = (-L + k h, -L + l h), k, l = 1..M-1".to_owned(),
        files,
    };
    let path = dir.join(FIELD_META_FILE);
    fs::write(&path, toml::to_string(&meta)?).with_context(|| format!("writing {}", path.display()))?;
    Ok(meta)
}

pub fn read_field(dir: &Path) -> Result<Field> {
    let meta_path = dir.join(FIELD_META_FILE);
    let meta: FieldMeta = toml::from_str(
        &fs::read_to_string(&meta_path).with_context(|| format!("reading {}", meta_path.display()))?,
    )
    .with_context(|| format!("parsing {}", meta_path.display()))?;
    let grid = Grid::new(meta.half_width, meta.subdivisions)?;
    if grid.shape() != (meta.shape[0], meta.shape[1]) {
        bail!("{}: shape does not match the grid", meta_path.display());
    }
    let mut values = Vec::new();
    for name in &meta.files {
        let path: PathBuf = dir.join(name);
        let bytes = fs::read(&path).with_context(|| format!("reading {}", path.display()))?;
        if bytes.len() != meta.shape[0] * meta.shape[1] * 8 {
            bail!("{}: expected {} values", path.display(), meta.shape[0] * meta.shape[1]);
        }
        let data: Vec<f64> = bytes
            .chunks_exact(8)
            .map(|c| f64::from_le_bytes(c.try_into().expect("chunk of 8")))
            .collect();
        values.push(ndarray::Array2::from_shape_vec(grid.shape(), data)?);
    }
    Ok(Field::from_values(&grid, values)?)
}
