//! Pullback of whole gridded fields through a group element.

use crate::eos::{Primitive, Vec3};
use crate::error::{Error, Result};
use crate::field::{discontinuity_zones, Geometry, Grid, Snapshot, SpacetimeField, Zone, ZoneConfig};

use super::{GalileiElement, GroupElement};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Interpolation {
    /// Piecewise linear; creates no new extrema.
    #[default]
    Linear,
    /// Four-point Lagrange, for smooth-flow convergence studies.
    Cubic,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PullbackOptions {
    pub interpolation: Interpolation,
    /// Grid of the transformed field. Defaults to the largest interval covered
    /// at every target time, with the source cell count.
    pub target_grid: Option<Grid>,
    pub zones: ZoneConfig,
    /// When false the field law is applied even for a non-symmetric exponent.
    pub check_exponent: bool,
}

impl Default for PullbackOptions {
    fn default() -> Self {
        Self { interpolation: Interpolation::Linear, target_grid: None, zones: ZoneConfig::default(), check_exponent: true }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Pullback {
    pub field: SpacetimeField,
    /// The element actually applied, normalised to `gamma t + delta > 0`.
    pub element: GroupElement,
    /// `in_zone[k][j]`: the preimage of target cell `j` at step `k` fell inside a
    /// flagged discontinuity zone and took the state on its side of the jump.
    pub in_zone: Vec<Vec<bool>>,
    pub singular_time: Option<f64>,
    pub source_window: (f64, f64),
    pub target_window: (f64, f64),
}

/// Images of the source snapshot times.
pub fn mapped_times(g: &GroupElement, field: &SpacetimeField) -> Result<Vec<f64>> {
    field.snapshots.iter().map(|s| g.sl2.map_time(s.t)).collect()
}

/// Reduced 1D form of the element: `x -> (r x + v t + a) / tau`.
struct Reduced {
    r: f64,
    v: f64,
    a: f64,
}

fn reduce(g: &GroupElement, geometry: Geometry) -> Result<(GroupElement, Reduced)> {
    let gal = &g.gal;
    match geometry {
        Geometry::Spherical => {
            if gal.boost_velocity().norm() != 0.0 || gal.shift().norm() != 0.0 {
                return Err(Error::InvalidInput(
                    "boosts and translations break spherical symmetry; only rotations are allowed".into(),
                ));
            }
            // Rotations act trivially on radial profiles.
            Ok((GroupElement::from_sl2(g.sl2), Reduced { r: 1.0, v: 0.0, a: 0.0 }))
        }
        Geometry::Planar => {
            let rot = gal.rotation();
            let r = rot[(0, 0)];
            let off_axis = rot[(0, 1)].abs() + rot[(0, 2)].abs() + rot[(1, 0)].abs() + rot[(2, 0)].abs();
            if (r.abs() - 1.0).abs() > 1e-12 || off_axis > 1e-12 {
                return Err(Error::InvalidInput("the rotation must preserve the flow axis of a planar field".into()));
            }
            if gal.boost_velocity().fixed_rows::<2>(1).norm() != 0.0 || gal.shift().fixed_rows::<2>(1).norm() != 0.0 {
                return Err(Error::InvalidInput("boosts and translations of a planar field must be along the flow axis".into()));
            }
            let reduced = Reduced { r, v: gal.boost_velocity()[0], a: gal.shift()[0] };
            Ok((*g, reduced))
        }
    }
}

/// Transforms `field` by `g`, producing snapshots at `target_times` (in the
/// target frame). Each target cell centre is pulled back to the source, the
/// source is interpolated in space and linearly in time, and the field law is
/// applied.
pub fn transform_snapshot(
    g: &GroupElement,
    field: &SpacetimeField,
    target_times: &[f64],
    opts: &PullbackOptions,
) -> Result<Pullback> {
    let (first, last) = match (field.snapshots.first(), field.snapshots.last()) {
        (Some(a), Some(b)) => (a.t, b.t),
        _ => return Err(Error::InvalidInput("cannot transform an empty field".into())),
    };
    if opts.check_exponent && !g.sl2.is_time_translation() {
        field.eos.require_symmetric()?;
    }
    for w in target_times.windows(2) {
        if !(w[1] > w[0]) {
            return Err(Error::InvalidInput("target times must increase strictly".into()));
        }
    }
    let oriented = g.oriented_on(first, last)?;
    let (element, red) = reduce(&oriented, field.grid.geometry)?;
    let src = &field.grid;

    let tol_t = 1e-12 * first.abs().max(last.abs()).max(1.0);
    let mut preimages = Vec::with_capacity(target_times.len());
    for &tp in target_times {
        let t = element.sl2.preimage_time(tp)?;
        if !(t >= first - tol_t && t <= last + tol_t) {
            let (t_min, t_max) = preimage_window(&element, target_times)?;
            return Err(Error::Coverage { x_min: src.x_left, x_max: src.x_right, t_min, t_max });
        }
        preimages.push(t.clamp(first, last));
    }

    let grid = match opts.target_grid {
        Some(grid) => grid,
        None => default_grid(&element, &red, src, &preimages)?,
    };

    // Pull every target centre back and check coverage before sampling.
    let tol_x = 1e-9 * src.dx();
    let mut source_x = Vec::with_capacity(preimages.len());
    let (mut x_min, mut x_max) = (f64::INFINITY, f64::NEG_INFINITY);
    for &t in &preimages {
        let tau = element.sl2.positive_denominator(t)?;
        let xs: Vec<f64> = grid.centers().map(|xp| red.r * (xp * tau - red.v * t - red.a)).collect();
        for &x in &xs {
            x_min = x_min.min(x);
            x_max = x_max.max(x);
        }
        // half width of a target cell seen from the source
        source_x.push((0.5 * tau * grid.dx(), xs));
    }
    if x_min < src.x_left - tol_x || x_max > src.x_right + tol_x {
        let (t_min, t_max) = preimage_window(&element, target_times)?;
        return Err(Error::Coverage { x_min, x_max, t_min, t_max });
    }

    let zones: Vec<Jumps> = field.snapshots.iter().map(|s| Jumps::new(src, &s.states, &opts.zones)).collect();
    let mut snapshots = Vec::with_capacity(preimages.len());
    let mut in_zone = Vec::with_capacity(preimages.len());
    for ((&tp, &t), (half, xs)) in target_times.iter().zip(&preimages).zip(&source_x) {
        let (k, theta) = bracket(field, t);
        let mut states = Vec::with_capacity(xs.len());
        let mut flags = Vec::with_capacity(xs.len());
        for &x in xs {
            let (mut s, mut flagged) = sample_space(src, &field.snapshots[k].states, &zones[k], x, *half, opts.interpolation);
            if theta > 0.0 {
                let (b, fb) = sample_space(src, &field.snapshots[k + 1].states, &zones[k + 1], x, *half, opts.interpolation);
                s = lerp(&s, &b, theta);
                flagged |= fb;
            }
            let point = Vec3::new(x, 0.0, 0.0);
            let mapped = if opts.check_exponent {
                element.act_state(&s, &point, t, &field.eos)?
            } else {
                element.act_state_unchecked(&s, &point, t, &field.eos)?
            };
            states.push(mapped);
            flags.push(flagged);
        }
        snapshots.push(Snapshot::new(tp, states));
        in_zone.push(flags);
    }

    let boundary = if red.r < 0.0 { [field.boundary[1], field.boundary[0]] } else { field.boundary };
    let out = SpacetimeField::new(grid, field.eos, boundary, snapshots)?;
    let target_window = match (target_times.first(), target_times.last()) {
        (Some(&a), Some(&b)) => (a, b),
        _ => (f64::NAN, f64::NAN),
    };
    Ok(Pullback {
        field: out,
        element,
        in_zone,
        singular_time: g.sl2.singular_time(),
        source_window: (first, last),
        target_window,
    })
}

fn preimage_window(g: &GroupElement, target_times: &[f64]) -> Result<(f64, f64)> {
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for &tp in target_times {
        let t = g.sl2.preimage_time(tp)?;
        lo = lo.min(t);
        hi = hi.max(t);
    }
    Ok((lo, hi))
}

fn default_grid(g: &GroupElement, red: &Reduced, src: &Grid, preimages: &[f64]) -> Result<Grid> {
    let (mut lo, mut hi) = (f64::NEG_INFINITY, f64::INFINITY);
    for &t in preimages {
        let tau = g.sl2.positive_denominator(t)?;
        let a = (red.r * src.x_left + red.v * t + red.a) / tau;
        let b = (red.r * src.x_right + red.v * t + red.a) / tau;
        lo = lo.max(a.min(b));
        hi = hi.min(a.max(b));
    }
    if preimages.is_empty() {
        return Ok(*src);
    }
    if !(hi > lo) {
        return Err(Error::InvalidInput(
            "the images of the source domain at the requested times do not overlap; pass an explicit target grid".into(),
        ));
    }
    Grid::new(lo, hi, src.cells, src.geometry)
}

/// Snapshot index `k` and weight `theta` with `t = (1 - theta) t_k + theta t_{k+1}`.
fn bracket(field: &SpacetimeField, t: f64) -> (usize, f64) {
    if let Some(k) = field.snapshot_index(t) {
        return (k, 0.0);
    }
    let k = field.snapshots.partition_point(|s| s.t <= t).saturating_sub(1);
    let k = k.min(field.snapshots.len().saturating_sub(2));
    let (a, b) = (field.snapshots[k].t, field.snapshots[k + 1].t);
    (k, ((t - a) / (b - a)).clamp(0.0, 1.0))
}

fn lerp(a: &Primitive, b: &Primitive, w: f64) -> Primitive {
    Primitive::new(a.rho + w * (b.rho - a.rho), a.u + (b.u - a.u) * w, a.p + w * (b.p - a.p))
}

/// Haloed discontinuity zones of one snapshot, each collapsed to a sharp jump
/// between its end states.
pub(crate) struct Jumps {
    map: Vec<Option<usize>>,
    sides: Vec<(Primitive, Primitive, f64)>,
}

impl Jumps {
    pub(crate) fn new(grid: &Grid, states: &[Primitive], cfg: &ZoneConfig) -> Self {
        let n = states.len();
        let mut map = vec![None; n];
        let mut sides = Vec::new();
        for (k, z) in discontinuity_zones(states, cfg).0.iter().enumerate() {
            // widened once more, like the limiting states of front detection
            let Zone { first, last } = z.with_halo(2 * cfg.halo, n);
            map[first..=last].iter_mut().for_each(|m| *m = Some(k));
            let (l, r) = (states[first], states[last]);
            // equal-area position of the density step
            let drho = l.rho - r.rho;
            let xs = if drho == 0.0 {
                0.5 * (grid.center(first) + grid.center(last))
            } else {
                let area: f64 = states[first + 1..last].iter().map(|s| (s.rho - r.rho) / drho).sum();
                (grid.face(first + 1) + area * grid.dx()).clamp(grid.face(first + 1), grid.face(last))
            };
            sides.push((l, r, xs));
        }
        Self { map, sides }
    }
}

/// Samples cell-centred data at `x`, returning whether a discontinuity zone was
/// hit. Inside a zone the sample is the average of the sharp jump over
/// `[x - half, x + half]`, so only a cell straddling the jump mixes the sides.
pub(crate) fn sample_space(grid: &Grid, states: &[Primitive], zones: &Jumps, x: f64, half: f64, interp: Interpolation) -> (Primitive, bool) {
    let n = states.len();
    let s = ((x - grid.x_left) / grid.dx() - 0.5).clamp(0.0, (n - 1) as f64);
    let i = (s.floor() as usize).min(n - 2);
    let w = s - i as f64;
    if let Some(k) = zones.map[i].or(zones.map[i + 1]) {
        let (l, r, xs) = zones.sides[k];
        let right = if half > 0.0 { ((x + half - xs) / (2.0 * half)).clamp(0.0, 1.0) } else { f64::from(x >= xs) };
        return (lerp(&l, &r, right), true);
    }
    let linear = lerp(&states[i], &states[i + 1], w);
    if interp == Interpolation::Cubic && i >= 1 && i + 2 < n {
        let c = [
            -w * (w - 1.0) * (w - 2.0) / 6.0,
            (w + 1.0) * (w - 1.0) * (w - 2.0) / 2.0,
            -(w + 1.0) * w * (w - 2.0) / 2.0,
            (w + 1.0) * w * (w - 1.0) / 6.0,
        ];
        let pts = &states[i - 1..i + 3];
        let rho: f64 = (0..4).map(|k| c[k] * pts[k].rho).sum();
        let p: f64 = (0..4).map(|k| c[k] * pts[k].p).sum();
        let u = (0..4).fold(Vec3::zeros(), |acc, k| acc + pts[k].u * c[k]);
        let cubic = Primitive::new(rho, u, p);
        if cubic.validate().is_ok() {
            return (cubic, false);
        }
    }
    (linear, false)
}

/// Planar Galilei element along the flow axis.
pub fn planar_galilei(reflect: bool, v: f64, a: f64) -> GalileiElement {
    let mut rot = nalgebra::Matrix3::identity();
    if reflect {
        rot[(0, 0)] = -1.0;
    }
    GalileiElement::new(rot, Vec3::new(v, 0.0, 0.0), Vec3::new(a, 0.0, 0.0)).expect("axis reflection is orthogonal")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eos::Polytrope;
    use crate::field::Boundary;
    use crate::group::Sl2Element;

    fn smooth_field(cells: usize, eos: Polytrope) -> SpacetimeField {
        let grid = Grid::new(0.0, 2.0, cells, Geometry::Planar).unwrap();
        let f = |t: f64| {
            Snapshot::from_fn(t, &grid, |x| Primitive::planar(1.0 + 0.2 * (x + t).sin(), 0.1 * x, 1.0 + 0.1 * (x - t).cos()))
        };
        SpacetimeField::new(grid, eos, [Boundary::Transmissive; 2], vec![f(1.0), f(1.5), f(2.0)]).unwrap()
    }

    #[test]
    fn identity_reproduces_the_field() {
        let field = smooth_field(50, Polytrope::symmetric(1).unwrap());
        let out = transform_snapshot(&GroupElement::identity(), &field, &field.times(), &PullbackOptions::default()).unwrap();
        assert_eq!(out.field.grid, field.grid);
        for (a, b) in out.field.snapshots.iter().zip(&field.snapshots) {
            for (x, y) in a.states.iter().zip(&b.states) {
                assert!((x.rho - y.rho).abs() < 1e-12 && (x.p - y.p).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn uniform_state_under_time_translation() {
        let eos = Polytrope::new(1.4, 1).unwrap();
        let grid = Grid::new(0.0, 1.0, 20, Geometry::Planar).unwrap();
        let s = Primitive::planar(0.7, 0.0, 0.4);
        let field = SpacetimeField::new(
            grid,
            eos,
            [Boundary::Transmissive; 2],
            vec![Snapshot::uniform(0.0, &grid, s), Snapshot::uniform(1.0, &grid, s)],
        )
        .unwrap();
        let g = GroupElement::from_sl2(Sl2Element::time_translation(0.5));
        let out = transform_snapshot(&g, &field, &[0.5, 1.0, 1.5], &PullbackOptions::default()).unwrap();
        for snap in &out.field.snapshots {
            for st in &snap.states {
                assert!((st.rho - 0.7).abs() < 1e-15 && st.u1() == 0.0 && (st.p - 0.4).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn drury_mendonca_window_and_grid() {
        let field = smooth_field(40, Polytrope::symmetric(1).unwrap());
        let g = GroupElement::from_sl2(Sl2Element::drury_mendonca());
        let times = mapped_times(&g, &field).unwrap();
        assert_eq!(times, vec![-1.0, -1.0 / 1.5, -0.5]);
        let out = transform_snapshot(&g, &field, &times, &PullbackOptions::default()).unwrap();
        assert_eq!(out.target_window, (-1.0, -0.5));
        assert_eq!(out.singular_time, Some(0.0));
        // covered at every time: [0, 2/2] at t = 2 is the binding image
        assert_eq!((out.field.grid.x_left, out.field.grid.x_right), (0.0, 1.0));
    }

    #[test]
    fn coverage_and_exponent_errors() {
        let field = smooth_field(40, Polytrope::symmetric(1).unwrap());
        let g = GroupElement::from_sl2(Sl2Element::drury_mendonca());
        assert!(matches!(
            transform_snapshot(&g, &field, &[-0.25], &PullbackOptions::default()),
            Err(Error::Coverage { .. })
        ));
        let big = Grid::new(0.0, 5.0, 10, Geometry::Planar).unwrap();
        let opts = PullbackOptions { target_grid: Some(big), ..Default::default() };
        assert!(matches!(transform_snapshot(&g, &field, &[-1.0], &opts), Err(Error::Coverage { .. })));

        let nonsym = smooth_field(40, Polytrope::new(1.4, 1).unwrap());
        assert!(matches!(
            transform_snapshot(&g, &nonsym, &[-1.0], &PullbackOptions::default()),
            Err(Error::NonSymmetricExponent { .. })
        ));
        let opts = PullbackOptions { check_exponent: false, ..Default::default() };
        assert!(transform_snapshot(&g, &nonsym, &[-1.0], &opts).is_ok());
    }

    #[test]
    fn window_through_the_singular_time_is_rejected() {
        let field = smooth_field(40, Polytrope::symmetric(1).unwrap());
        // tau = 1 - 2t/3 vanishes at t = 1.5
        let g = GroupElement::from_sl2(Sl2Element::expansion(-2.0 / 3.0));
        assert!(transform_snapshot(&g, &field, &[0.0], &PullbackOptions::default()).is_err());
    }

    #[test]
    fn zones_take_the_state_of_their_side() {
        let grid = Grid::new(0.0, 1.0, 20, Geometry::Planar).unwrap();
        let mut states = vec![Primitive::planar(1.0, 0.0, 1.0); 20];
        for s in &mut states[10..] {
            s.rho = 0.25;
        }
        // a smeared cell puts the equal-area jump at x = 0.5 + 0.6 * 0.05
        states[10].rho = 0.25 + 0.6 * 0.75;
        let zones = Jumps::new(&grid, &states, &ZoneConfig::default());
        let (s, hit) = sample_space(&grid, &states, &zones, 0.52, 0.0, Interpolation::Linear);
        assert!(hit);
        assert_eq!(s.rho, 1.0);
        let (s, _) = sample_space(&grid, &states, &zones, 0.54, 0.0, Interpolation::Linear);
        assert_eq!(s.rho, 0.25);
        let (s, _) = sample_space(&grid, &states, &zones, 0.53, 0.01, Interpolation::Linear);
        assert!((s.rho - 0.625).abs() < 1e-12);
        let (s, hit) = sample_space(&grid, &states, &zones, 0.1, 0.0, Interpolation::Cubic);
        assert!(!hit);
        assert_eq!(s.rho, 1.0);
    }
}
