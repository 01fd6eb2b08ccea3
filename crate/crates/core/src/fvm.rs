//! Conservative finite-volume evolution in planar and spherically symmetric
//! geometry with exact-Riemann interface fluxes.
//!
//! Spherical cells use shell volumes and face areas `r^2`; the pressure part of
//! the momentum flux is balanced by the source `p_i (A_+ - A_-)`, so a uniform
//! state at rest stays at rest to rounding.

use serde::{Deserialize, Serialize};

use crate::eos::{Polytrope, Primitive};
use crate::error::{Error, Result};
use crate::field::{Boundary, Geometry, Grid, Snapshot, SpacetimeField};
use crate::riemann;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Reconstruction {
    /// First-order Godunov.
    #[default]
    Godunov,
    /// MUSCL-Hancock with minmod-limited slopes.
    Muscl,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    pub cfl: f64,
    pub reconstruction: Reconstruction,
    pub boundary: [Boundary; 2],
    /// Densities and pressures in `(0, floor)` are raised to `floor` and counted;
    /// non-positive values abort the run.
    pub floor: f64,
    pub max_steps: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            cfl: 0.5,
            reconstruction: Reconstruction::Godunov,
            boundary: [Boundary::Transmissive; 2],
            floor: 1e-12,
            max_steps: 10_000_000,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.cfl > 0.0 && self.cfl < 1.0) {
            return Err(Error::InvalidInput(format!("cfl must lie in (0, 1), got {}", self.cfl)));
        }
        if !(self.floor > 0.0 && self.floor.is_finite()) {
            return Err(Error::InvalidInput(format!("floor must be positive, got {}", self.floor)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct RunStats {
    pub steps: usize,
    /// Number of floor clamps applied.
    pub clamps: usize,
    pub max_signal_speed: f64,
}

type State = [f64; 3];

fn cons(s: &Primitive, eos: &Polytrope) -> State {
    let c = eos.prim_to_cons(s);
    [c.rho, c.mom[0], c.energy]
}

fn flux(s: &Primitive, eos: &Polytrope) -> State {
    let u = s.u1();
    let e = 0.5 * s.rho * u * u + s.p / (eos.gamma0() - 1.0);
    [s.rho * u, s.rho * u * u + s.p, (e + s.p) * u]
}

/// Primitive from `(rho, m, E)`, without validation.
fn prim(q: &State, eos: &Polytrope) -> Primitive {
    let u = q[1] / q[0];
    Primitive::planar(q[0], u, (eos.gamma0() - 1.0) * (q[2] - 0.5 * q[0] * u * u))
}

fn face_flux(l: &Primitive, r: &Primitive, eos: &Polytrope, t: f64, face: usize) -> Result<(State, f64)> {
    if l == r {
        return Ok((flux(l, eos), l.p));
    }
    let sol = riemann::solve(l, r, eos).map_err(|e| Error::NumericalAbort {
        t,
        cell: face,
        detail: format!("interface Riemann problem failed: {e}"),
    })?;
    let s = sol.sample_xi(0.0);
    Ok((flux(&s, eos), s.p))
}

/// Largest `|u| + c` over the snapshot.
pub fn max_signal_speed(states: &[Primitive], eos: &Polytrope) -> f64 {
    states.iter().map(|s| s.u1().abs() + eos.sound_speed(s)).fold(0.0, f64::max)
}

/// Stable time step `cfl dx / max(|u| + c)`.
pub fn stable_dt(grid: &Grid, states: &[Primitive], eos: &Polytrope, cfl: f64) -> f64 {
    cfl * grid.dx() / max_signal_speed(states, eos)
}

fn minmod(a: f64, b: f64) -> f64 {
    if a * b <= 0.0 {
        0.0
    } else if a.abs() < b.abs() {
        a
    } else {
        b
    }
}

/// Interface states `(left of face i, right of face i)` for faces `0..=cells`.
fn interface_states(
    grid: &Grid,
    states: &[Primitive],
    eos: &Polytrope,
    cfg: &SolverConfig,
    dt: f64,
) -> Vec<(Primitive, Primitive)> {
    let n = states.len();
    let boundary = match grid.geometry {
        // The centre of a sphere is a wall.
        Geometry::Spherical if grid.x_left == 0.0 => [Boundary::Reflective, cfg.boundary[1]],
        _ => cfg.boundary,
    };
    // Ghost layers mirror the interior, so a reflective wall sees an exactly
    // symmetric interface problem at any reconstruction order.
    let at = |i: isize| -> Primitive {
        if i < 0 {
            boundary[0].ghost(&states[((-i - 1) as usize).min(n - 1)])
        } else if i as usize >= n {
            boundary[1].ghost(&states[(2 * n - 1 - i as usize).min(n - 1)])
        } else {
            states[i as usize]
        }
    };
    match cfg.reconstruction {
        Reconstruction::Godunov => (0..=n as isize).map(|f| (at(f - 1), at(f))).collect(),
        Reconstruction::Muscl => {
            // Edge values of cells -1..=n, evolved by half a step.
            let ratio = 0.5 * dt / grid.dx();
            let edges: Vec<(Primitive, Primitive)> = (-1..=n as isize)
                .map(|i| {
                    let (a, b, c) = (cons(&at(i - 1), eos), cons(&at(i), eos), cons(&at(i + 1), eos));
                    let one = |s: &State| [s[0], s[1], s[2]];
                    let mut lo = one(&b);
                    let mut hi = one(&b);
                    for k in 0..3 {
                        let d = minmod(b[k] - a[k], c[k] - b[k]);
                        lo[k] -= 0.5 * d;
                        hi[k] += 0.5 * d;
                    }
                    let (pl, ph) = (prim(&lo, eos), prim(&hi, eos));
                    if pl.validate().is_err() || ph.validate().is_err() {
                        return (at(i), at(i));
                    }
                    let (fl, fh) = (flux(&pl, eos), flux(&ph, eos));
                    for k in 0..3 {
                        let d = ratio * (fl[k] - fh[k]);
                        lo[k] += d;
                        hi[k] += d;
                    }
                    let (pl, ph) = (prim(&lo, eos), prim(&hi, eos));
                    if pl.validate().is_err() || ph.validate().is_err() {
                        (at(i), at(i))
                    } else {
                        (pl, ph)
                    }
                })
                .collect();
            // edges[j] belongs to cell j - 1; face f sits between cells f - 1 and f.
            (0..=n).map(|f| (edges[f].1, edges[f + 1].0)).collect()
        }
    }
}

/// Advances `snapshot` by `dt`. Returns the new snapshot and the number of floor clamps.
pub fn step_dt(grid: &Grid, snapshot: &Snapshot, eos: &Polytrope, cfg: &SolverConfig, dt: f64) -> Result<(Snapshot, usize)> {
    let states = &snapshot.states;
    let n = states.len();
    let faces = interface_states(grid, states, eos, cfg, dt);
    let mut fluxes = Vec::with_capacity(n + 1);
    for (f, (l, r)) in faces.iter().enumerate() {
        fluxes.push(face_flux(l, r, eos, snapshot.t, f)?);
    }
    let t_new = snapshot.t + dt;
    let mut out = Vec::with_capacity(n);
    let mut clamps = 0;
    for i in 0..n {
        let mut q = cons(&states[i], eos);
        let ((fl, _), (fr, _)) = (&fluxes[i], &fluxes[i + 1]);
        match grid.geometry {
            Geometry::Planar => {
                let r = dt / grid.dx();
                for k in 0..3 {
                    q[k] -= r * (fr[k] - fl[k]);
                }
            }
            Geometry::Spherical => {
                let (al, ar) = (grid.face_area(i), grid.face_area(i + 1));
                let r = dt / grid.cell_volume(i);
                for k in 0..3 {
                    q[k] -= r * (ar * fr[k] - al * fl[k]);
                }
                q[1] += r * states[i].p * (ar - al);
            }
        }
        let mut s = prim(&q, eos);
        if !(s.rho > 0.0 && s.p > 0.0 && s.u1().is_finite()) {
            return Err(Error::NumericalAbort {
                t: t_new,
                cell: i,
                detail: format!(
                    "non-physical state rho = {}, u = {}, p = {} at x = {}",
                    s.rho,
                    s.u1(),
                    s.p,
                    grid.center(i)
                ),
            });
        }
        if s.rho < cfg.floor {
            s.rho = cfg.floor;
            clamps += 1;
        }
        if s.p < cfg.floor {
            s.p = cfg.floor;
            clamps += 1;
        }
        out.push(s);
    }
    Ok((Snapshot::new(t_new, out), clamps))
}

/// One CFL-limited step.
pub fn step(grid: &Grid, snapshot: &Snapshot, eos: &Polytrope, cfg: &SolverConfig) -> Result<Snapshot> {
    cfg.validate()?;
    let dt = stable_dt(grid, &snapshot.states, eos, cfg.cfl);
    Ok(step_dt(grid, snapshot, eos, cfg, dt)?.0)
}

/// Evolves `initial` to `t_end`, storing snapshots exactly at `output_times`.
pub fn run(
    grid: &Grid,
    initial: &Snapshot,
    eos: &Polytrope,
    cfg: &SolverConfig,
    t_end: f64,
    output_times: &[f64],
) -> Result<(SpacetimeField, RunStats)> {
    cfg.validate()?;
    if initial.states.len() != grid.cells {
        return Err(Error::InvalidInput("initial snapshot does not match the grid".into()));
    }
    for s in &initial.states {
        s.validate()?;
    }
    let t0 = initial.t;
    if !(t_end >= t0) {
        return Err(Error::InvalidInput(format!("t_end = {t_end} precedes the initial time {t0}")));
    }
    let mut outputs = output_times.to_vec();
    outputs.sort_by(f64::total_cmp);
    outputs.dedup();
    if outputs.iter().any(|&t| t < t0 || t > t_end) {
        return Err(Error::InvalidInput(format!("output times must lie in [{t0}, {t_end}]")));
    }

    let mut stats = RunStats::default();
    let mut snaps = Vec::with_capacity(outputs.len());
    let mut next = outputs.iter().peekable();
    while next.peek().is_some_and(|&&t| t == t0) {
        snaps.push(initial.clone());
        next.next();
    }
    let mut cur = initial.clone();
    while cur.t < t_end {
        if stats.steps >= cfg.max_steps {
            return Err(Error::NumericalAbort { t: cur.t, cell: 0, detail: format!("step limit {} reached", cfg.max_steps) });
        }
        let speed = max_signal_speed(&cur.states, eos);
        stats.max_signal_speed = stats.max_signal_speed.max(speed);
        let target = next.peek().map_or(t_end, |&&t| t);
        let mut dt = cfg.cfl * grid.dx() / speed;
        let hit = cur.t + dt >= target;
        if hit {
            dt = target - cur.t;
        }
        let (mut new, clamps) = step_dt(grid, &cur, eos, cfg, dt)?;
        stats.steps += 1;
        stats.clamps += clamps;
        if hit {
            new.t = target;
            while next.peek().is_some_and(|&&t| t == target) {
                snaps.push(new.clone());
                next.next();
            }
        }
        cur = new;
    }
    let field = SpacetimeField::new(*grid, *eos, cfg.boundary, snaps)?;
    Ok((field, stats))
}

/// Domain totals of `(mass, momentum, energy)` with the grid's quadrature weights.
pub fn totals(grid: &Grid, snapshot: &Snapshot, eos: &Polytrope) -> [f64; 3] {
    let mut sum = [0.0; 3];
    for (i, s) in snapshot.states.iter().enumerate() {
        let q = cons(s, eos);
        let w = grid.quadrature_weight(i);
        for k in 0..3 {
            sum[k] += q[k] * w;
        }
    }
    sum
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sod_initial(grid: &Grid) -> Snapshot {
        Snapshot::from_fn(0.0, grid, |x| {
            if x < 0.5 {
                Primitive::planar(1.0, 0.0, 1.0)
            } else {
                Primitive::planar(0.125, 0.0, 0.1)
            }
        })
    }

    #[test]
    fn uniform_state_is_unchanged() {
        for geometry in [Geometry::Planar, Geometry::Spherical] {
            let g = Grid::new(0.0, 1.0, 32, geometry).unwrap();
            let eos = Polytrope::symmetric(if geometry == Geometry::Planar { 1 } else { 3 }).unwrap();
            let s = Primitive::planar(1.3, 0.0, 0.7);
            for cfg in [SolverConfig::default(), SolverConfig { reconstruction: Reconstruction::Muscl, ..Default::default() }] {
                let out = step(&g, &Snapshot::uniform(0.0, &g, s), &eos, &cfg).unwrap();
                for st in &out.states {
                    assert!((st.rho - 1.3).abs() < 1e-14 && st.u1().abs() < 1e-14 && (st.p - 0.7).abs() < 1e-14);
                }
            }
        }
    }

    #[test]
    fn wall_impact_conserves_mass() {
        let g = Grid::new(0.0, 1.0, 100, Geometry::Planar).unwrap();
        let eos = Polytrope::new(1.4, 1).unwrap();
        let cfg = SolverConfig { boundary: [Boundary::Reflective; 2], ..Default::default() };
        let init = Snapshot::uniform(0.0, &g, Primitive::planar(1.0, 1.0, 1.0));
        let (field, stats) = run(&g, &init, &eos, &cfg, 0.3, &[0.0, 0.3]).unwrap();
        let m0 = totals(&g, &field.snapshots[0], &eos)[0];
        let m1 = totals(&g, &field.snapshots[1], &eos)[0];
        assert!((m1 - m0).abs() < 1e-13, "{m0} vs {m1}");
        assert!(stats.steps > 10);
        assert_eq!(stats.clamps, 0);
    }

    #[test]
    fn zero_duration_run() {
        let g = Grid::new(0.0, 1.0, 20, Geometry::Planar).unwrap();
        let eos = Polytrope::new(1.4, 1).unwrap();
        let init = sod_initial(&g);
        let (field, stats) = run(&g, &init, &eos, &SolverConfig::default(), 0.0, &[0.0]).unwrap();
        assert_eq!(field.snapshots, vec![init]);
        assert_eq!(stats.steps, 0);
    }

    #[test]
    fn outputs_are_hit_exactly_and_deterministic() {
        let g = Grid::new(0.0, 1.0, 64, Geometry::Planar).unwrap();
        let eos = Polytrope::new(1.4, 1).unwrap();
        let init = sod_initial(&g);
        let times = [0.05, 0.1, 0.2];
        let (a, _) = run(&g, &init, &eos, &SolverConfig::default(), 0.2, &times).unwrap();
        let (b, _) = run(&g, &init, &eos, &SolverConfig::default(), 0.2, &times).unwrap();
        assert_eq!(a.times(), times.to_vec());
        assert_eq!(a, b);
    }

    #[test]
    fn rejects_bad_config() {
        let g = Grid::new(0.0, 1.0, 20, Geometry::Planar).unwrap();
        let eos = Polytrope::new(1.4, 1).unwrap();
        let cfg = SolverConfig { cfl: 1.2, ..Default::default() };
        assert!(step(&g, &sod_initial(&g), &eos, &cfg).is_err());
        assert!(run(&g, &sod_initial(&g), &eos, &SolverConfig::default(), 0.1, &[0.2]).is_err());
    }
}
