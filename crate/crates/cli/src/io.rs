//! CSV tables and JSON manifests.
//!
//! Every float is written with 17 significant digits so that files read back
//! bit-identically.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use shockdual::shock::{DetectedFront, FrontKind};
use shockdual::{Boundary, Grid, Polytrope, Primitive, Snapshot, SpacetimeField};

use crate::error::{CliError, CliResult};

pub const SCHEMA: &str = "1";

pub const SNAPSHOT_HEADER: [&str; 6] = ["x", "rho", "u", "p", "chi", "S_rel"];

pub fn fmt(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn create_dir(dir: &Path) -> CliResult<()> {
    fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))
}

/// Writes a CSV table with a fixed header; cells are preformatted strings.
pub fn write_table(path: &Path, header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> CliResult<()> {
    let mut w = csv::Writer::from_path(path).map_err(|e| CliError::format(path, e.to_string()))?;
    w.write_record(header).map_err(|e| CliError::format(path, e.to_string()))?;
    for row in rows {
        w.write_record(&row).map_err(|e| CliError::format(path, e.to_string()))?;
    }
    w.flush().map_err(|e| CliError::io(path, e))
}

pub fn state_row(x: f64, s: &Primitive, eos: &Polytrope) -> Vec<String> {
    let e = eos.entropy(s);
    vec![fmt(x), fmt(s.rho), fmt(s.u1()), fmt(s.p), fmt(e.chi), fmt(e.s_rel)]
}

pub fn write_snapshot(path: &Path, grid: &Grid, snap: &Snapshot, eos: &Polytrope) -> CliResult<()> {
    let rows = grid.centers().zip(&snap.states).map(|(x, s)| state_row(x, s, eos));
    write_table(path, &SNAPSHOT_HEADER, rows)
}

/// Reads `(x, state)` rows of a snapshot table; `chi` and `S_rel` are ignored.
pub fn read_snapshot(path: &Path) -> CliResult<Vec<(f64, Primitive)>> {
    let mut r = csv::Reader::from_path(path).map_err(|e| CliError::format(path, e.to_string()))?;
    let header = r.headers().map_err(|e| CliError::format(path, e.to_string()))?.clone();
    if header.iter().collect::<Vec<_>>() != SNAPSHOT_HEADER {
        return Err(CliError::format(path, format!("expected header {}", SNAPSHOT_HEADER.join(","))));
    }
    let mut out = Vec::new();
    for (k, rec) in r.records().enumerate() {
        let rec = rec.map_err(|e| CliError::format(path, e.to_string()))?;
        let val = |j: usize| -> CliResult<f64> {
            rec[j].parse().map_err(|_| CliError::format(path, format!("row {}: bad number '{}'", k + 2, &rec[j])))
        };
        out.push((val(0)?, Primitive::planar(val(1)?, val(2)?, val(3)?)));
    }
    Ok(out)
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> CliResult<()> {
    let text = serde_json::to_string_pretty(value).map_err(|e| CliError::format(path, e.to_string()))?;
    fs::write(path, text + "\n").map_err(|e| CliError::io(path, e))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EosInfo {
    pub gamma0: f64,
    pub n: usize,
    pub r_gas: f64,
}

impl EosInfo {
    pub fn of(eos: &Polytrope) -> Self {
        Self { gamma0: eos.gamma0(), n: eos.dim(), r_gas: eos.gas_constant() }
    }

    pub fn polytrope(&self) -> shockdual::Result<Polytrope> {
        Polytrope::new(self.gamma0, self.n)?.with_gas_constant(self.r_gas)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SnapshotEntry {
    pub t: f64,
    pub file: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrontEntry {
    pub t: f64,
    pub xs: f64,
    pub s: f64,
    pub kind: String,
    pub zone: [usize; 2],
    pub s_tracked: Option<f64>,
    pub s_mass: Option<f64>,
}

impl FrontEntry {
    pub fn of(f: &DetectedFront) -> Self {
        Self {
            t: f.front.t,
            xs: f.front.xs,
            s: f.front.s,
            kind: front_kind(f.kind).into(),
            zone: [f.zone.first, f.zone.last],
            s_tracked: f.s_tracked,
            s_mass: f.s_mass,
        }
    }
}

pub fn front_kind(k: FrontKind) -> &'static str {
    match k {
        FrontKind::Shock => "shock",
        FrontKind::Contact => "contact",
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunInfo {
    pub t_start: f64,
    pub t_end: f64,
    pub cfl: f64,
    pub reconstruction: String,
    pub steps: usize,
    pub clamps: usize,
    pub max_signal_speed: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransformInfo {
    pub source: String,
    /// `(alpha, beta, gamma, delta)` as configured.
    pub sigma: [f64; 4],
    /// The orientation-normalised element actually applied.
    pub sigma_applied: [f64; 4],
    pub reflect: bool,
    pub boost: f64,
    pub shift: f64,
    pub interpolation: String,
    pub singular_time: Option<f64>,
    pub source_window: [f64; 2],
    pub target_window: [f64; 2],
    /// Target samples taken from the nearest cell inside a discontinuity zone.
    pub zone_samples: usize,
    pub exponent_checked: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub schema: String,
    pub kind: String,
    pub name: String,
    pub eos: EosInfo,
    pub grid: Grid,
    pub boundary: [Boundary; 2],
    pub snapshots: Vec<SnapshotEntry>,
    /// Fronts detected in every snapshot (speeds tracked from the previous one).
    pub fronts: Vec<FrontEntry>,
    /// `(t, xs)` of the leading shock (largest `xs`) per snapshot.
    pub trajectory: Vec<[f64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub run: Option<RunInfo>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub transform: Option<TransformInfo>,
    #[serde(default)]
    pub warnings: Vec<String>,
}

pub fn snapshot_file(k: usize) -> String {
    format!("snapshot_{k:04}.csv")
}

/// Writes the snapshot tables of `field` into `dir` and returns their entries.
pub fn write_field(dir: &Path, field: &SpacetimeField) -> CliResult<Vec<SnapshotEntry>> {
    create_dir(dir)?;
    let mut entries = Vec::with_capacity(field.snapshots.len());
    for (k, snap) in field.snapshots.iter().enumerate() {
        let file = snapshot_file(k);
        write_snapshot(&dir.join(&file), &field.grid, snap, &field.eos)?;
        entries.push(SnapshotEntry { t: snap.t, file });
    }
    Ok(entries)
}

pub fn manifest_path(dir: &Path) -> PathBuf {
    dir.join("manifest.json")
}

pub fn read_manifest(path: &Path) -> CliResult<Manifest> {
    let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    let m: Manifest = serde_json::from_str(&text).map_err(|e| CliError::format(path, e.to_string()))?;
    if m.schema != SCHEMA {
        return Err(CliError::format(path, format!("unsupported schema '{}' (expected '{SCHEMA}')", m.schema)));
    }
    Ok(m)
}

/// Loads the manifest and its snapshot tables as a field.
pub fn load_field(path: &Path) -> CliResult<(Manifest, SpacetimeField)> {
    let m = read_manifest(path)?;
    let dir = path.parent().unwrap_or(Path::new("."));
    let grid = Grid::new(m.grid.x_left, m.grid.x_right, m.grid.cells, m.grid.geometry)?;
    let eos = m.eos.polytrope()?;
    let mut snaps = Vec::with_capacity(m.snapshots.len());
    for entry in &m.snapshots {
        let file = dir.join(&entry.file);
        let rows = read_snapshot(&file)?;
        if rows.len() != grid.cells {
            return Err(CliError::format(&file, format!("{} rows for a grid of {} cells", rows.len(), grid.cells)));
        }
        for (i, (x, _)) in rows.iter().enumerate() {
            if (x - grid.center(i)).abs() > 1e-9 * grid.dx() {
                return Err(CliError::format(&file, format!("row {} is at x = {x}, expected the cell centre {}", i + 2, grid.center(i))));
            }
        }
        snaps.push(Snapshot::new(entry.t, rows.into_iter().map(|(_, s)| s).collect()));
    }
    let field = SpacetimeField::new(grid, eos, m.boundary, snaps)?;
    Ok((m, field))
}
