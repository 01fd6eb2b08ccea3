//! Noether currents of the kinematical group, charges, and their balance.
//!
//! Every current is a spacetime vector `(J^0, J^j)` with `∂_t J^0 + ∂_j J^j = 0`
//! on smooth solutions. `Dilatation` and `Expansion` are conserved only for the
//! symmetric exponent `gamma0 = 1 + 2/n`.
//!
//! Angular momentum follows the convention `L = P × x` (the negative of the
//! more common `x × P`); its flux is built the same way from the momentum flux.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::eos::{Polytrope, Primitive, Vec3};
use crate::error::{Error, Result};
use crate::field::{zone_map, Boundary, Geometry, Grid, Snapshot, SpacetimeField, ZoneConfig};
use crate::riemann;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CurrentFamily {
    Mass,
    Momentum(usize),
    /// Component `i` of the axial vector `L`; for `n = 2` only the single
    /// in-plane component exists and is addressed with index 0.
    AngularMomentum(usize),
    Boost(usize),
    Energy,
    Dilatation,
    Expansion,
}

impl CurrentFamily {
    /// All families valid in `n` dimensions, in stack order.
    pub fn all(n: usize) -> Vec<CurrentFamily> {
        let mut out = vec![CurrentFamily::Mass];
        out.extend((0..n).map(CurrentFamily::Momentum));
        match n {
            2 => out.push(CurrentFamily::AngularMomentum(0)),
            3 => out.extend((0..3).map(CurrentFamily::AngularMomentum)),
            _ => {}
        }
        out.extend((0..n).map(CurrentFamily::Boost));
        out.extend([CurrentFamily::Energy, CurrentFamily::Dilatation, CurrentFamily::Expansion]);
        out
    }

    /// Families of a planar or radial reduction (flow along component 0).
    pub fn reduced() -> [CurrentFamily; 6] {
        [
            CurrentFamily::Mass,
            CurrentFamily::Momentum(0),
            CurrentFamily::Boost(0),
            CurrentFamily::Energy,
            CurrentFamily::Dilatation,
            CurrentFamily::Expansion,
        ]
    }

    pub fn validate(&self, n: usize) -> Result<()> {
        let ok = match *self {
            CurrentFamily::Momentum(i) | CurrentFamily::Boost(i) => i < n,
            CurrentFamily::AngularMomentum(i) => (n == 2 && i == 0) || (n == 3 && i < 3),
            _ => true,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::UnsupportedFamily { family: self.to_string(), n })
        }
    }

    /// True for families whose charge is a vector component (zero under
    /// spherical symmetry).
    pub fn is_vector(&self) -> bool {
        matches!(self, CurrentFamily::Momentum(_) | CurrentFamily::AngularMomentum(_) | CurrentFamily::Boost(_))
    }
}

impl fmt::Display for CurrentFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CurrentFamily::Mass => write!(f, "mass"),
            CurrentFamily::Momentum(i) => write!(f, "momentum_{i}"),
            CurrentFamily::AngularMomentum(i) => write!(f, "angular_momentum_{i}"),
            CurrentFamily::Boost(i) => write!(f, "boost_{i}"),
            CurrentFamily::Energy => write!(f, "energy"),
            CurrentFamily::Dilatation => write!(f, "dilatation"),
            CurrentFamily::Expansion => write!(f, "expansion"),
        }
    }
}

impl FromStr for CurrentFamily {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let indexed = |prefix: &str| -> Option<usize> {
            let rest = s.strip_prefix(prefix)?;
            if rest.is_empty() {
                return Some(0);
            }
            rest.strip_prefix('_')?.parse().ok()
        };
        let fam = match s {
            "mass" => CurrentFamily::Mass,
            "energy" => CurrentFamily::Energy,
            "dilatation" => CurrentFamily::Dilatation,
            "expansion" => CurrentFamily::Expansion,
            _ => {
                if let Some(i) = indexed("angular_momentum") {
                    CurrentFamily::AngularMomentum(i)
                } else if let Some(i) = indexed("momentum") {
                    CurrentFamily::Momentum(i)
                } else if let Some(i) = indexed("boost") {
                    CurrentFamily::Boost(i)
                } else {
                    return Err(Error::InvalidInput(format!("unknown current family '{s}'")));
                }
            }
        };
        Ok(fam)
    }
}

impl Serialize for CurrentFamily {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for CurrentFamily {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CurrentSample {
    pub family: CurrentFamily,
    pub j0: f64,
    pub jx: Vec3,
    pub x: Vec3,
    pub t: f64,
}

impl CurrentSample {
    /// `n_mu J^mu` for the covector `(-s, 1)` along axis 0.
    pub fn normal_flux(&self, s: f64) -> f64 {
        self.jx[0] - s * self.j0
    }
}

/// The component currents every family is built from.
struct Basic {
    rho: (f64, Vec3),
    /// `mom[i] = (P_i, J^j_{P_i})`.
    mom: [(f64, Vec3); 3],
    energy: (f64, Vec3),
}

fn basic(s: &Primitive, eos: &Polytrope) -> Basic {
    let n = eos.dim();
    let mut u = s.u;
    for k in n..3 {
        u[k] = 0.0;
    }
    let eps = s.p / (eos.gamma0() - 1.0);
    let h = 0.5 * s.rho * u.norm_squared() + eps;
    let mut mom = [(0.0, Vec3::zeros()); 3];
    for (i, m) in mom.iter_mut().enumerate().take(n) {
        let mut flux = u * (s.rho * u[i]);
        flux[i] += s.p;
        *m = (s.rho * u[i], flux);
    }
    Basic { rho: (s.rho, u * s.rho), mom, energy: (h, u * (h + s.p)) }
}

/// Evaluates the current of `family` for the state `s` at `(x, t)`.
pub fn current(s: &Primitive, x: &Vec3, t: f64, family: CurrentFamily, eos: &Polytrope) -> Result<CurrentSample> {
    let n = eos.dim();
    family.validate(n)?;
    let mut x = *x;
    for k in n..3 {
        x[k] = 0.0;
    }
    let b = basic(s, eos);
    let x2 = x.norm_squared();
    let x_dot = |parts: &[(f64, Vec3); 3]| -> (f64, Vec3) {
        (0..n).fold((0.0, Vec3::zeros()), |(d, f), i| (d + x[i] * parts[i].0, f + parts[i].1 * x[i]))
    };
    let (j0, jx) = match family {
        CurrentFamily::Mass => b.rho,
        CurrentFamily::Momentum(i) => b.mom[i],
        CurrentFamily::Energy => b.energy,
        CurrentFamily::Boost(i) => (t * b.mom[i].0 - x[i] * b.rho.0, b.mom[i].1 * t - b.rho.1 * x[i]),
        CurrentFamily::Dilatation => {
            let (xp, xjp) = x_dot(&b.mom);
            (xp - 2.0 * t * b.energy.0, xjp - b.energy.1 * (2.0 * t))
        }
        CurrentFamily::Expansion => {
            let (xp, xjp) = x_dot(&b.mom);
            (
                t * t * b.energy.0 - t * xp + 0.5 * x2 * b.rho.0,
                b.rho.1 * (0.5 * x2) - xjp * t + b.energy.1 * (t * t),
            )
        }
        CurrentFamily::AngularMomentum(i) => {
            // (P × x)_c with c the axial component; n = 2 uses c = z.
            let c = if n == 2 { 2 } else { i };
            let (a, bb) = ((c + 1) % 3, (c + 2) % 3);
            (
                b.mom[a].0 * x[bb] - b.mom[bb].0 * x[a],
                b.mom[a].1 * x[bb] - b.mom[bb].1 * x[a],
            )
        }
    };
    Ok(CurrentSample { family, j0, jx, x, t })
}

/// The planar stack `(rho, K, P, A, D, H)` for flow along axis 0.
pub fn planar_stack(s: &Primitive, x: f64, t: f64, eos: &Polytrope) -> Result<[CurrentSample; 6]> {
    let p = Vec3::new(x, 0.0, 0.0);
    let f = |fam| current(s, &p, t, fam, eos);
    Ok([
        f(CurrentFamily::Mass)?,
        f(CurrentFamily::Boost(0))?,
        f(CurrentFamily::Momentum(0))?,
        f(CurrentFamily::Expansion)?,
        f(CurrentFamily::Dilatation)?,
        f(CurrentFamily::Energy)?,
    ])
}

/// Position of a cell centre or face as a point on axis 0.
fn on_axis(x: f64) -> Vec3 {
    Vec3::new(x, 0.0, 0.0)
}

/// Midpoint quadrature of `J^0` over the grid (shell volumes for spherical grids).
/// Vector charges vanish identically under spherical symmetry.
pub fn charge(grid: &Grid, snapshot: &Snapshot, family: CurrentFamily, eos: &Polytrope) -> Result<f64> {
    family.validate(eos.dim())?;
    if grid.geometry == Geometry::Spherical && family.is_vector() {
        return Ok(0.0);
    }
    let mut q = 0.0;
    for (i, s) in snapshot.states.iter().enumerate() {
        q += current(s, &on_axis(grid.center(i)), snapshot.t, family, eos)?.j0 * grid.quadrature_weight(i);
    }
    Ok(q)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ChargeBalance {
    pub family: CurrentFamily,
    pub t1: f64,
    pub t2: f64,
    pub q1: f64,
    pub q2: f64,
    /// `∫ J^x(x_R) dt` and `∫ J^x(x_L) dt` (face measures included).
    pub outflow_right: f64,
    pub outflow_left: f64,
    /// `Q(t2) - Q(t1) + ∫ (J^x(x_R) - J^x(x_L)) dt`.
    pub residual: f64,
    /// Residual divided by the largest term of the balance.
    pub relative: f64,
}

/// State on a boundary face: the Riemann solution between the boundary cell and its ghost.
fn face_state(inner: &Primitive, ghost: &Primitive, left_face: bool, eos: &Polytrope) -> Primitive {
    if inner == ghost {
        return *inner;
    }
    let (l, r) = if left_face { (ghost, inner) } else { (inner, ghost) };
    match riemann::solve(l, r, eos) {
        Ok(sol) => sol.sample_xi(0.0),
        Err(_) => *inner,
    }
}

fn boundary_fluxes(field: &SpacetimeField, snap: &Snapshot, family: CurrentFamily) -> Result<(f64, f64)> {
    let (g, eos) = (&field.grid, &field.eos);
    let n = g.cells;
    let first = &snap.states[0];
    let last = &snap.states[n - 1];
    let fl = face_state(first, &field.boundary[0].ghost(first), true, eos);
    let fr = face_state(last, &field.boundary[1].ghost(last), false, eos);
    let jl = current(&fl, &on_axis(g.face(0)), snap.t, family, eos)?.jx[0] * g.face_measure(0);
    let jr = current(&fr, &on_axis(g.face(n)), snap.t, family, eos)?.jx[0] * g.face_measure(n);
    Ok((jl, jr))
}

/// Balance of `family` between the snapshots at `t1` and `t2` (both must be
/// snapshot times). Boundary fluxes are integrated with the trapezoidal rule
/// over the intermediate snapshots.
pub fn charge_balance(field: &SpacetimeField, family: CurrentFamily, t1: f64, t2: f64) -> Result<ChargeBalance> {
    let eos = &field.eos;
    family.validate(eos.dim())?;
    if !(t1 < t2) {
        return Err(Error::InvalidInput(format!("charge balance needs t1 < t2, got [{t1}, {t2}]")));
    }
    let k1 = field.snapshot_index(t1).ok_or_else(|| Error::InvalidInput(format!("no snapshot at t = {t1}")))?;
    let k2 = field.snapshot_index(t2).ok_or_else(|| Error::InvalidInput(format!("no snapshot at t = {t2}")))?;
    let (mut q1, mut q2, mut right, mut left) = (0.0, 0.0, 0.0, 0.0);
    if !(field.grid.geometry == Geometry::Spherical && family.is_vector()) {
        q1 = charge(&field.grid, &field.snapshots[k1], family, eos)?;
        q2 = charge(&field.grid, &field.snapshots[k2], family, eos)?;
        let mut prev = boundary_fluxes(field, &field.snapshots[k1], family)?;
        for k in k1 + 1..=k2 {
            let cur = boundary_fluxes(field, &field.snapshots[k], family)?;
            let dt = field.snapshots[k].t - field.snapshots[k - 1].t;
            left += 0.5 * dt * (prev.0 + cur.0);
            right += 0.5 * dt * (prev.1 + cur.1);
            prev = cur;
        }
    }
    let residual = q2 - q1 + right - left;
    let scale = q1.abs().max(q2.abs()).max(right.abs() + left.abs());
    let relative = if scale > 0.0 { residual.abs() / scale } else { 0.0 };
    Ok(ChargeBalance { family, t1, t2, q1, q2, outflow_right: right, outflow_left: left, residual, relative })
}

/// Central-difference residuals of the mass, momentum and energy equations at
/// `(cell, step)`. Points within a (haloed) discontinuity zone of any of the
/// three snapshots involved are rejected.
pub fn euler_residual(field: &SpacetimeField, cell: usize, step: usize, zones: &ZoneConfig) -> Result<[f64; 3]> {
    let (g, eos) = (&field.grid, &field.eos);
    let k = field.snapshots.len();
    if step == 0 || step + 1 >= k || cell == 0 || cell + 1 >= g.cells {
        return Err(Error::InvalidInput(format!(
            "euler residual needs interior indices (cell {cell} of {}, step {step} of {k})",
            g.cells
        )));
    }
    for snap in &field.snapshots[step - 1..=step + 1] {
        if let Some(zone) = zone_map(&snap.states, zones)[cell] {
            return Err(Error::InsideDiscontinuity { cell, step, zone });
        }
    }
    let conserved = |s: &Primitive| {
        let c = eos.prim_to_cons(s);
        [c.rho, c.mom[0], c.energy]
    };
    let fluxes = |s: &Primitive| {
        let c = eos.prim_to_cons(s);
        let u = s.u1();
        [c.rho * u, c.mom[0] * u + s.p, (c.energy + s.p) * u]
    };
    // Three-point derivative on a possibly nonuniform time grid.
    let (ta, tb, tc) = (field.snapshots[step - 1].t, field.snapshots[step].t, field.snapshots[step + 1].t);
    let (h1, h2) = (tb - ta, tc - tb);
    let wa = -h2 / (h1 * (h1 + h2));
    let wb = (h2 - h1) / (h1 * h2);
    let wc = h1 / (h2 * (h1 + h2));
    let ua = conserved(&field.snapshots[step - 1].states[cell]);
    let ub = conserved(&field.snapshots[step].states[cell]);
    let uc = conserved(&field.snapshots[step + 1].states[cell]);

    let here = &field.snapshots[step].states;
    let dx = g.dx();
    let (xm, x0, xp) = (g.center(cell - 1), g.center(cell), g.center(cell + 1));
    let (fm, fp) = (fluxes(&here[cell - 1]), fluxes(&here[cell + 1]));
    let mut out = [0.0; 3];
    for q in 0..3 {
        let dt = wa * ua[q] + wb * ub[q] + wc * uc[q];
        let div = match g.geometry {
            Geometry::Planar => (fp[q] - fm[q]) / (2.0 * dx),
            Geometry::Spherical => {
                // (1/r^2) ∂_r (r^2 F); the momentum pressure gradient is not divergence form.
                let (gm, gp) = if q == 1 {
                    let (pm, pp) = (here[cell - 1].p, here[cell + 1].p);
                    (fm[1] - pm, fp[1] - pp)
                } else {
                    (fm[q], fp[q])
                };
                let curved = (xp * xp * gp - xm * xm * gm) / (2.0 * dx * x0 * x0);
                if q == 1 {
                    curved + (here[cell + 1].p - here[cell - 1].p) / (2.0 * dx)
                } else {
                    curved
                }
            }
        };
        out[q] = dt + div;
    }
    Ok(out)
}

/// Reflective and transmissive boundary fluxes both enter [`charge_balance`]
/// through the face Riemann state; this helper exposes it for reports.
pub fn boundary_face_state(boundary: Boundary, inner: &Primitive, left_face: bool, eos: &Polytrope) -> Primitive {
    face_state(inner, &boundary.ghost(inner), left_face, eos)
}
