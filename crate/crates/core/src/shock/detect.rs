//! Locating fronts in gridded data.

use serde::Serialize;

use crate::eos::Primitive;
use crate::field::{discontinuity_zones, Grid, Snapshot, Zone, ZoneConfig};

use super::ShockFront;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DetectConfig {
    pub zones: ZoneConfig,
    /// Limiting states are read this many cells outside a haloed zone.
    pub offset: usize,
    /// Relative pressure jump below which a front is taken as a contact.
    pub contact_pressure_jump: f64,
    /// A front in the previous snapshot matches if it lies within this many
    /// cells of the predicted position.
    pub match_cells: f64,
}

impl Default for DetectConfig {
    fn default() -> Self {
        Self { zones: ZoneConfig::default(), offset: 3, contact_pressure_jump: 0.05, match_cells: 5.0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum FrontKind {
    Shock,
    Contact,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DetectedFront {
    /// Front with the tracked speed when available, the mass-RH speed otherwise.
    pub front: ShockFront,
    pub zone: Zone,
    pub kind: FrontKind,
    pub s_tracked: Option<f64>,
    /// `Δ(rho u) / Δrho` from the limiting states.
    pub s_mass: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Detection {
    pub fronts: Vec<DetectedFront>,
    /// Number of zone merges (overlapping haloes).
    pub merges: usize,
}

struct Located {
    zone: Zone,
    xs: f64,
    left: Primitive,
    right: Primitive,
    s_mass: Option<f64>,
}

fn locate(grid: &Grid, states: &[Primitive], cfg: &DetectConfig) -> (Vec<Located>, usize) {
    let n = states.len();
    let (zones, merges) = discontinuity_zones(states, &cfg.zones);
    let located = zones
        .into_iter()
        .map(|zone| {
            let zone = zone.with_halo(cfg.zones.halo, n);
            let il = zone.first.saturating_sub(cfg.offset);
            let ir = (zone.last + cfg.offset).min(n - 1);
            let (left, right) = (states[il], states[ir]);
            // Equal-area position of the density step between the two limiting states.
            let drho = left.rho - right.rho;
            let mut xs = grid.face(il + 1);
            if drho != 0.0 {
                for s in &states[il + 1..ir] {
                    xs += (s.rho - right.rho) / drho * grid.dx();
                }
            }
            let xs = xs.clamp(grid.face(il + 1), grid.face(ir));
            let dm = right.rho * right.u1() - left.rho * left.u1();
            let jump = right.rho - left.rho;
            let s_mass = (jump.abs() > 1e-14 * left.rho.max(right.rho)).then(|| dm / jump);
            Located { zone, xs, left, right, s_mass }
        })
        .collect();
    (located, merges)
}

/// Finds steep-gradient zones of `snapshot` and turns each into a front. With
/// `previous`, speeds come from tracking the front positions between the two
/// snapshots; the mass-RH speed is kept as a diagnostic.
pub fn detect_fronts(grid: &Grid, snapshot: &Snapshot, previous: Option<&Snapshot>, cfg: &DetectConfig) -> Detection {
    let (now, merges) = locate(grid, &snapshot.states, cfg);
    let before = previous.map(|p| (p.t, locate(grid, &p.states, cfg).0));
    let fronts = now
        .into_iter()
        .map(|f| {
            let s_tracked = before.as_ref().and_then(|(t0, prev)| {
                let dt = snapshot.t - t0;
                if !(dt > 0.0) {
                    return None;
                }
                let predicted = f.xs - f.s_mass.unwrap_or(0.0) * dt;
                prev.iter()
                    .map(|p| (p, (p.xs - predicted).abs()))
                    .filter(|(_, d)| *d <= cfg.match_cells * grid.dx())
                    .min_by(|a, b| a.1.total_cmp(&b.1))
                    .map(|(p, _)| (f.xs - p.xs) / dt)
            });
            let s = s_tracked.or(f.s_mass).unwrap_or(0.0);
            let jump = (f.right.p - f.left.p).abs() / f.left.p.min(f.right.p);
            let kind = if jump < cfg.contact_pressure_jump { FrontKind::Contact } else { FrontKind::Shock };
            DetectedFront {
                front: ShockFront { t: snapshot.t, xs: f.xs, s, left: f.left, right: f.right },
                zone: f.zone,
                kind,
                s_tracked,
                s_mass: f.s_mass,
            }
        })
        .collect();
    Detection { fronts, merges }
}
