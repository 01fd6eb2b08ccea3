//! Gridded fluid data: grids, snapshots, spacetime fields and
//! discontinuity-zone flagging.

use serde::{Deserialize, Serialize};

use crate::eos::{Polytrope, Primitive};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Geometry {
    Planar,
    /// Spherical symmetry; the coordinate is the radius.
    Spherical,
}

impl Geometry {
    pub fn as_str(&self) -> &'static str {
        match self {
            Geometry::Planar => "planar",
            Geometry::Spherical => "spherical",
        }
    }
}

impl std::str::FromStr for Geometry {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "planar" => Ok(Geometry::Planar),
            "spherical" => Ok(Geometry::Spherical),
            other => Err(Error::InvalidInput(format!("unknown geometry '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Boundary {
    Transmissive,
    Reflective,
}

impl Boundary {
    pub fn as_str(&self) -> &'static str {
        match self {
            Boundary::Transmissive => "transmissive",
            Boundary::Reflective => "reflective",
        }
    }

    /// Ghost state mirrored across a boundary face.
    pub fn ghost(&self, inner: &Primitive) -> Primitive {
        match self {
            Boundary::Transmissive => *inner,
            Boundary::Reflective => {
                let mut g = *inner;
                g.u[0] = -g.u[0];
                g
            }
        }
    }
}

impl std::str::FromStr for Boundary {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "transmissive" => Ok(Boundary::Transmissive),
            "reflective" => Ok(Boundary::Reflective),
            other => Err(Error::InvalidInput(format!("unknown boundary condition '{other}'"))),
        }
    }
}

/// Uniform cell-centred grid on `[x_left, x_right]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    pub x_left: f64,
    pub x_right: f64,
    pub cells: usize,
    pub geometry: Geometry,
}

impl Grid {
    pub fn new(x_left: f64, x_right: f64, cells: usize, geometry: Geometry) -> Result<Self> {
        if !(x_left.is_finite() && x_right.is_finite() && x_right > x_left) {
            return Err(Error::InvalidInput(format!("grid bounds [{x_left}, {x_right}] are not increasing")));
        }
        if cells < 2 {
            return Err(Error::InvalidInput("a grid needs at least two cells".into()));
        }
        if geometry == Geometry::Spherical && x_left < 0.0 {
            return Err(Error::InvalidInput("spherical grids need a non-negative inner radius".into()));
        }
        Ok(Self { x_left, x_right, cells, geometry })
    }

    pub fn dx(&self) -> f64 {
        (self.x_right - self.x_left) / self.cells as f64
    }

    pub fn center(&self, i: usize) -> f64 {
        self.x_left + (i as f64 + 0.5) * self.dx()
    }

    pub fn face(&self, i: usize) -> f64 {
        self.x_left + i as f64 * self.dx()
    }

    pub fn centers(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.cells).map(|i| self.center(i))
    }

    /// Face measure without the common solid-angle factor (`1` or `r^2`).
    pub fn face_area(&self, i: usize) -> f64 {
        match self.geometry {
            Geometry::Planar => 1.0,
            Geometry::Spherical => self.face(i).powi(2),
        }
    }

    /// Cell measure consistent with [`Grid::face_area`] (`dx` or `(r_+^3 - r_-^3)/3`).
    pub fn cell_volume(&self, i: usize) -> f64 {
        match self.geometry {
            Geometry::Planar => self.dx(),
            Geometry::Spherical => (self.face(i + 1).powi(3) - self.face(i).powi(3)) / 3.0,
        }
    }

    /// Full quadrature weight of a cell: `dx` (planar) or `∫ 4 pi r^2 dr` (spherical).
    pub fn quadrature_weight(&self, i: usize) -> f64 {
        self.cell_volume(i) * self.solid_angle()
    }

    /// Full measure of face `i`: `1` (planar) or `4 pi r^2` (spherical).
    pub fn face_measure(&self, i: usize) -> f64 {
        self.face_area(i) * self.solid_angle()
    }

    fn solid_angle(&self) -> f64 {
        match self.geometry {
            Geometry::Planar => 1.0,
            Geometry::Spherical => 4.0 * std::f64::consts::PI,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    pub t: f64,
    pub states: Vec<Primitive>,
}

impl Snapshot {
    pub fn new(t: f64, states: Vec<Primitive>) -> Self {
        Self { t, states }
    }

    pub fn uniform(t: f64, grid: &Grid, state: Primitive) -> Self {
        Self { t, states: vec![state; grid.cells] }
    }

    /// Samples `f(x)` at every cell centre.
    pub fn from_fn(t: f64, grid: &Grid, f: impl Fn(f64) -> Primitive) -> Self {
        Self { t, states: grid.centers().map(f).collect() }
    }
}

/// Ordered sequence of snapshots on a common grid.
#[derive(Debug, Clone, PartialEq)]
pub struct SpacetimeField {
    pub grid: Grid,
    pub eos: Polytrope,
    pub boundary: [Boundary; 2],
    pub snapshots: Vec<Snapshot>,
}

impl SpacetimeField {
    pub fn new(grid: Grid, eos: Polytrope, boundary: [Boundary; 2], snapshots: Vec<Snapshot>) -> Result<Self> {
        let field = Self { grid, eos, boundary, snapshots };
        field.validate()?;
        Ok(field)
    }

    pub fn validate(&self) -> Result<()> {
        for w in self.snapshots.windows(2) {
            if !(w[1].t > w[0].t) {
                return Err(Error::InvalidInput(format!(
                    "snapshot times must increase strictly ({} follows {})",
                    w[1].t, w[0].t
                )));
            }
        }
        for snap in &self.snapshots {
            if snap.states.len() != self.grid.cells {
                return Err(Error::InvalidInput(format!(
                    "snapshot at t = {} has {} cells, grid has {}",
                    snap.t,
                    snap.states.len(),
                    self.grid.cells
                )));
            }
            for (i, s) in snap.states.iter().enumerate() {
                s.validate().map_err(|e| Error::InvalidInput(format!("t = {}, cell {i}: {e}", snap.t)))?;
            }
        }
        Ok(())
    }

    pub fn times(&self) -> Vec<f64> {
        self.snapshots.iter().map(|s| s.t).collect()
    }

    /// Index of the snapshot at time `t` (relative tolerance `1e-12`).
    pub fn snapshot_index(&self, t: f64) -> Option<usize> {
        let tol = 1e-12 * t.abs().max(1.0);
        self.snapshots.iter().position(|s| (s.t - t).abs() <= tol)
    }
}

/// Contiguous run of cells `[first, last]` flagged as a discontinuity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Zone {
    pub first: usize,
    pub last: usize,
}

impl Zone {
    pub fn contains(&self, i: usize) -> bool {
        (self.first..=self.last).contains(&i)
    }

    pub fn with_halo(&self, halo: usize, cells: usize) -> Zone {
        Zone { first: self.first.saturating_sub(halo), last: (self.last + halo).min(cells - 1) }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ZoneConfig {
    /// Relative neighbour density jump `|Δρ|/ρ` that flags an interface.
    pub threshold: f64,
    /// Cells added on each side of a flagged run.
    pub halo: usize,
}

impl Default for ZoneConfig {
    fn default() -> Self {
        Self { threshold: 0.05, halo: 3 }
    }
}

/// Flags steep-gradient zones. Returned zones exclude the halo and are sorted;
/// runs whose haloes overlap are merged.
pub fn discontinuity_zones(states: &[Primitive], cfg: &ZoneConfig) -> (Vec<Zone>, usize) {
    let mut raw: Vec<Zone> = Vec::new();
    for i in 0..states.len().saturating_sub(1) {
        let (a, b) = (states[i].rho, states[i + 1].rho);
        if (b - a).abs() / a.min(b) > cfg.threshold {
            match raw.last_mut() {
                Some(z) if z.last >= i => z.last = i + 1,
                _ => raw.push(Zone { first: i, last: i + 1 }),
            }
        }
    }
    let mut merged: Vec<Zone> = Vec::with_capacity(raw.len());
    let mut merges = 0;
    for z in raw {
        match merged.last_mut() {
            Some(prev) if z.first <= prev.last + 2 * cfg.halo => {
                prev.last = z.last;
                merges += 1;
            }
            _ => merged.push(z),
        }
    }
    (merged, merges)
}

/// Per-cell map of haloed zones: `Some(zone index)` inside a zone.
pub fn zone_map(states: &[Primitive], cfg: &ZoneConfig) -> Vec<Option<usize>> {
    let (zones, _) = discontinuity_zones(states, cfg);
    let mut map = vec![None; states.len()];
    for (k, z) in zones.iter().enumerate() {
        let h = z.with_halo(cfg.halo, states.len());
        for m in &mut map[h.first..=h.last] {
            *m = Some(k);
        }
    }
    map
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spherical_weights_integrate_volume() {
        let g = Grid::new(0.0, 1.0, 10, Geometry::Spherical).unwrap();
        let total: f64 = (0..10).map(|i| g.quadrature_weight(i)).sum();
        assert!((total - 4.0 / 3.0 * std::f64::consts::PI).abs() < 1e-14);
        assert_eq!(g.face_area(0), 0.0);
    }

    #[test]
    fn zones_of_a_step() {
        let mut states = vec![Primitive::planar(1.0, 0.0, 1.0); 40];
        for s in &mut states[20..] {
            s.rho = 0.5;
        }
        let (zones, merges) = discontinuity_zones(&states, &ZoneConfig::default());
        assert_eq!(zones, vec![Zone { first: 19, last: 20 }]);
        assert_eq!(merges, 0);
        let map = zone_map(&states, &ZoneConfig::default());
        assert_eq!(map.iter().filter(|m| m.is_some()).count(), 8);
        assert_eq!(map[16], Some(0));
        assert_eq!(map[15], None);
    }

    #[test]
    fn close_zones_merge() {
        let mut states = vec![Primitive::planar(1.0, 0.0, 1.0); 40];
        for s in &mut states[10..14] {
            s.rho = 2.0;
        }
        let (zones, merges) = discontinuity_zones(&states, &ZoneConfig::default());
        assert_eq!(zones.len(), 1);
        assert_eq!(merges, 1);
    }

    #[test]
    fn field_rejects_unordered_times() {
        let g = Grid::new(0.0, 1.0, 4, Geometry::Planar).unwrap();
        let eos = Polytrope::new(1.4, 1).unwrap();
        let s = Primitive::planar(1.0, 0.0, 1.0);
        let snaps = vec![Snapshot::uniform(1.0, &g, s), Snapshot::uniform(0.5, &g, s)];
        assert!(SpacetimeField::new(g, eos, [Boundary::Transmissive; 2], snaps).is_err());
    }
}
