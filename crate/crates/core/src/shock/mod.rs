//! Jump conditions across planar fronts.
//!
//! A front moving with speed `s` has the unnormalised normal covector
//! `n = (-s, 1)`; the jump condition of a current is `n_mu ΔJ^mu = Δ(J^x - s J^0) = 0`
//! with `Δ = right - left`. The standard conditions use mass, momentum and
//! energy; the extended ones (boost, dilatation, expansion, angular momentum)
//! are linear combinations of those with coefficients built from `(xs, t)`.
//! The dual conditions are the images of the standard ones under `SL(2,R)`.

mod detect;

pub use detect::{detect_fronts, DetectConfig, DetectedFront, Detection, FrontKind};

use serde::{Deserialize, Serialize};

use crate::eos::{Polytrope, Primitive, Vec3};
use crate::error::{Error, Result};
use crate::group::{representation_matrix, GroupElement, Sl2Element, STACK_ORDER};
use crate::noether::{current, planar_stack, CurrentFamily};
use crate::riemann::Side;

/// Floor added to the normalisation of residuals.
pub const NORMALISATION_FLOOR: f64 = 1e-300;
/// Mass-flux floor, relative to `rho_ref * c_ref`, below which a front is a contact.
pub const MASS_FLUX_FLOOR: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ShockFront {
    pub t: f64,
    pub xs: f64,
    pub s: f64,
    pub left: Primitive,
    pub right: Primitive,
}

impl ShockFront {
    pub fn new(t: f64, xs: f64, s: f64, left: Primitive, right: Primitive) -> Self {
        Self { t, xs, s, left, right }
    }

    /// `(n_t, n_x) = (-s, 1)`.
    pub fn normal(&self) -> [f64; 2] {
        [-self.s, 1.0]
    }

    pub fn position(&self) -> Vec3 {
        Vec3::new(self.xs, 0.0, 0.0)
    }

    /// `m = rho (u - s)` on the requested side.
    pub fn mass_flux(&self, side: Side) -> f64 {
        let st = match side {
            Side::Left => &self.left,
            Side::Right => &self.right,
        };
        st.rho * (st.u1() - self.s)
    }

    /// Left and right exchanged, keeping position and speed.
    pub fn mirrored(&self) -> ShockFront {
        ShockFront { left: self.right, right: self.left, ..*self }
    }
}

/// Residual of one family with its scale-invariant form.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Residual {
    pub value: f64,
    /// `value / scale`, in `[-1, 1]`.
    pub normalized: f64,
    pub scale: f64,
}

impl Residual {
    fn new(value: f64, scale: f64) -> Self {
        let scale = scale + NORMALISATION_FLOOR;
        Self { value, normalized: value / scale, scale }
    }
}

fn normal_fluxes(front: &ShockFront, family: CurrentFamily, eos: &Polytrope) -> Result<(f64, f64)> {
    let x = front.position();
    let l = current(&front.left, &x, front.t, family, eos)?.normal_flux(front.s);
    let r = current(&front.right, &x, front.t, family, eos)?.normal_flux(front.s);
    Ok((l, r))
}

/// `n_mu ΔJ^mu` for `family` at the front.
pub fn rh_residual(front: &ShockFront, family: CurrentFamily, eos: &Polytrope) -> Result<f64> {
    let (l, r) = normal_fluxes(front, family, eos)?;
    Ok(r - l)
}

/// [`rh_residual`] together with its normalisation `|n J_L| + |n J_R|`.
pub fn rh_residual_normalized(front: &ShockFront, family: CurrentFamily, eos: &Polytrope) -> Result<Residual> {
    let (l, r) = normal_fluxes(front, family, eos)?;
    Ok(Residual::new(r - l, l.abs() + r.abs()))
}

/// Residuals of the planar stack `(rho, K, P, A, D, H)` and their scales.
pub fn stack_residuals(front: &ShockFront, eos: &Polytrope) -> Result<([f64; 6], [f64; 6])> {
    let l = planar_stack(&front.left, front.xs, front.t, eos)?;
    let r = planar_stack(&front.right, front.xs, front.t, eos)?;
    let mut res = [0.0; 6];
    let mut scale = [0.0; 6];
    for k in 0..6 {
        let (a, b) = (l[k].normal_flux(front.s), r[k].normal_flux(front.s));
        res[k] = b - a;
        scale[k] = a.abs() + b.abs();
    }
    Ok((res, scale))
}

/// Extended residuals predicted from the standard ones.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ExtendedFromStandard {
    pub boost: f64,
    pub dilatation: f64,
    pub expansion: f64,
    /// `(P × x)` components built from the momentum residual vector.
    pub angular: Vec3,
}

/// `r_K = t r_P - xs r_rho`, `r_D = xs r_P - 2 t r_H`,
/// `r_A = xs^2 r_rho / 2 - t xs r_P + t^2 r_H`, `r_L = r_P × x`.
pub fn extended_from_standard(front: &ShockFront, eos: &Polytrope) -> Result<ExtendedFromStandard> {
    let n = eos.dim();
    let r_rho = rh_residual(front, CurrentFamily::Mass, eos)?;
    let r_h = rh_residual(front, CurrentFamily::Energy, eos)?;
    let mut r_p = Vec3::zeros();
    for i in 0..n {
        r_p[i] = rh_residual(front, CurrentFamily::Momentum(i), eos)?;
    }
    let (t, x) = (front.t, front.xs);
    Ok(ExtendedFromStandard {
        boost: t * r_p[0] - x * r_rho,
        dilatation: x * r_p[0] - 2.0 * t * r_h,
        expansion: 0.5 * x * x * r_rho - t * x * r_p[0] + t * t * r_h,
        angular: r_p.cross(&front.position()),
    })
}

/// Rows `(rho, P, H)` of `M(sigma)` by stack index.
const DUAL_ROWS: [usize; 3] = [0, 2, 5];

/// Dual jump conditions: the jumps of the combined currents
/// `J_rho`, `gamma J_K + delta J_P` and `delta^2 J_H - gamma delta J_D + gamma^2 J_A`
/// at the front. Each residual is normalised by the coefficient-weighted sum of
/// the magnitudes of the member currents.
pub fn dual_rh_residual(front: &ShockFront, sl2: &Sl2Element, eos: &Polytrope) -> Result<[Residual; 3]> {
    let sl2 = sl2.oriented_on(front.t, front.t)?;
    let m = representation_matrix(&sl2).0;
    let l = planar_stack(&front.left, front.xs, front.t, eos)?;
    let r = planar_stack(&front.right, front.xs, front.t, eos)?;
    let mut out = [Residual::new(0.0, 0.0); 3];
    for (o, &row) in out.iter_mut().zip(&DUAL_ROWS) {
        let (mut jl, mut jr, mut scale) = (0.0, 0.0, 0.0);
        for k in 0..6 {
            let c = m[(row, k)];
            if c == 0.0 {
                continue;
            }
            let (a, b) = (l[k].normal_flux(front.s), r[k].normal_flux(front.s));
            jl += c * a;
            jr += c * b;
            scale += c.abs() * (a.abs() + b.abs());
        }
        *o = Residual::new(jr - jl, scale);
    }
    Ok(out)
}

/// `M(sigma)` applied to the stack residual vector, projected on the dual rows.
pub fn recombined_residuals(front: &ShockFront, sl2: &Sl2Element, eos: &Polytrope) -> Result<[f64; 3]> {
    let sl2 = sl2.oriented_on(front.t, front.t)?;
    let (res, _) = stack_residuals(front, eos)?;
    let full = representation_matrix(&sl2).apply(&res);
    Ok(DUAL_ROWS.map(|r| full[r]))
}

/// Names of the dual rows.
pub const DUAL_ROW_NAMES: [&str; 3] = [STACK_ORDER[0], STACK_ORDER[2], STACK_ORDER[5]];

fn axis_reflection(g: &GroupElement) -> Result<f64> {
    let rot = g.gal.rotation();
    let r = rot[(0, 0)];
    let off = rot[(0, 1)].abs() + rot[(0, 2)].abs() + rot[(1, 0)].abs() + rot[(2, 0)].abs();
    if (r.abs() - 1.0).abs() > 1e-12 || off > 1e-12 {
        return Err(Error::InvalidInput("the rotation must preserve the front normal".into()));
    }
    Ok(r)
}

/// Image of a front: position and time via the coordinate map, speed via the
/// chain rule `s' = tau (R s + v) - gamma (R xs + v t + a)`, states via the
/// field law. An axis reflection exchanges the two sides.
pub fn transform_front(g: &GroupElement, front: &ShockFront, eos: &Polytrope) -> Result<ShockFront> {
    transform_front_with(g, front, eos, true)
}

/// [`transform_front`] with the symmetric-exponent check optional.
pub fn transform_front_with(g: &GroupElement, front: &ShockFront, eos: &Polytrope, check_exponent: bool) -> Result<ShockFront> {
    let r = axis_reflection(g)?;
    let x = front.position();
    let (xp, tp) = g.act_coords(&x, front.t)?;
    let tau = g.sl2.positive_denominator(front.t)?;
    let moved = g.gal.apply(&x, front.t)[0];
    let s = tau * (r * front.s + g.gal.boost_velocity()[0]) - g.sl2.gamma() * moved;
    let act = |st: &Primitive| {
        if check_exponent {
            g.act_state(st, &x, front.t, eos)
        } else {
            g.act_state_unchecked(st, &x, front.t, eos)
        }
    };
    let (left, right) = (act(&front.left)?, act(&front.right)?);
    let (left, right) = if r < 0.0 { (right, left) } else { (left, right) };
    Ok(ShockFront { t: tp, xs: xp[0], s, left, right })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    ShockAdmissible,
    ShockInadmissible,
    Contact,
}

impl Verdict {
    pub fn as_str(&self) -> &'static str {
        match self {
            Verdict::ShockAdmissible => "shock_admissible",
            Verdict::ShockInadmissible => "shock_inadmissible",
            Verdict::Contact => "contact",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Admissibility {
    pub verdict: Verdict,
    /// Mass flux `rho (u - s)` averaged over both sides.
    pub mass_flux: f64,
    /// `S_downstream - S_upstream` (sides oriented by the mass flux); zero for contacts.
    pub delta_s: f64,
    pub entropy_ok: bool,
    pub lax_ok: bool,
    /// `|u - s| / c` upstream and downstream.
    pub mach_upstream: f64,
    pub mach_downstream: f64,
}

/// Entropy and Lax admissibility with the default mass-flux floor.
pub fn admissibility(front: &ShockFront, eos: &Polytrope) -> Admissibility {
    admissibility_with(front, eos, MASS_FLUX_FLOOR)
}

/// A shock is admissible iff entropy increases from upstream to downstream and
/// the flow is supersonic relative to the front upstream, subsonic downstream.
pub fn admissibility_with(front: &ShockFront, eos: &Polytrope, mass_flux_floor: f64) -> Admissibility {
    let m = 0.5 * (front.mass_flux(Side::Left) + front.mass_flux(Side::Right));
    let (cl, cr) = (eos.sound_speed(&front.left), eos.sound_speed(&front.right));
    let reference = front.left.rho.max(front.right.rho) * cl.max(cr);
    if m.abs() <= mass_flux_floor * reference {
        return Admissibility {
            verdict: Verdict::Contact,
            mass_flux: m,
            delta_s: 0.0,
            entropy_ok: true,
            lax_ok: true,
            mach_upstream: 0.0,
            mach_downstream: 0.0,
        };
    }
    let ((up, c_up), (down, c_down)) =
        if m > 0.0 { ((&front.left, cl), (&front.right, cr)) } else { ((&front.right, cr), (&front.left, cl)) };
    let delta_s = eos.entropy(down).s_rel - eos.entropy(up).s_rel;
    let mach_upstream = (up.u1() - front.s).abs() / c_up;
    let mach_downstream = (down.u1() - front.s).abs() / c_down;
    let entropy_ok = delta_s > 0.0;
    let lax_ok = mach_upstream > 1.0 && mach_downstream < 1.0;
    let verdict = if entropy_ok && lax_ok { Verdict::ShockAdmissible } else { Verdict::ShockInadmissible };
    Admissibility { verdict, mass_flux: m, delta_s, entropy_ok, lax_ok, mach_upstream, mach_downstream }
}

/// Front travelling into `upstream` with shock Mach number `mach`, built from
/// the normal-shock relations. `Side::Right` means the shock moves to the right
/// (upstream state on the right).
pub fn normal_shock(upstream: &Primitive, mach: f64, eos: &Polytrope, facing: Side, xs: f64, t: f64) -> Result<ShockFront> {
    if !(mach.is_finite() && mach > 1.0) {
        return Err(Error::Domain(format!("shock Mach number must exceed 1, got {mach}")));
    }
    upstream.validate()?;
    let g = eos.gamma0();
    let c = eos.sound_speed(upstream);
    let m2 = mach * mach;
    let rho = upstream.rho * (g + 1.0) * m2 / ((g - 1.0) * m2 + 2.0);
    let p = upstream.p * (2.0 * g * m2 - (g - 1.0)) / (g + 1.0);
    let sign = match facing {
        Side::Right => 1.0,
        Side::Left => -1.0,
    };
    let s = upstream.u1() + sign * mach * c;
    let u = s + (upstream.u1() - s) * upstream.rho / rho;
    let mut down = *upstream;
    down.rho = rho;
    down.p = p;
    down.u[0] = u;
    let (left, right) = match facing {
        Side::Right => (down, *upstream),
        Side::Left => (*upstream, down),
    };
    Ok(ShockFront { t, xs, s, left, right })
}

/// Per-family record of a [`JumpReport`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct JumpRecord {
    pub t: f64,
    pub xs: f64,
    pub s: f64,
    pub family: String,
    pub residual: f64,
    pub normalized: f64,
    pub verdict: Verdict,
    pub delta_s: f64,
    pub mass_flux: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct JumpReport {
    pub front: ShockFront,
    pub families: Vec<(CurrentFamily, Residual)>,
    pub admissibility: Admissibility,
}

impl JumpReport {
    /// Residuals of every family valid for the dimension of `eos`.
    pub fn new(front: &ShockFront, eos: &Polytrope) -> Result<Self> {
        let families = CurrentFamily::all(eos.dim())
            .into_iter()
            .map(|f| Ok((f, rh_residual_normalized(front, f, eos)?)))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { front: *front, families, admissibility: admissibility(front, eos) })
    }

    pub fn max_standard(&self) -> f64 {
        self.families
            .iter()
            .filter(|(f, _)| matches!(f, CurrentFamily::Mass | CurrentFamily::Momentum(_) | CurrentFamily::Energy))
            .map(|(_, r)| r.normalized.abs())
            .fold(0.0, f64::max)
    }

    /// One flat record per family.
    pub fn records(&self) -> Vec<JumpRecord> {
        self.families
            .iter()
            .map(|(f, r)| JumpRecord {
                t: self.front.t,
                xs: self.front.xs,
                s: self.front.s,
                family: f.to_string(),
                residual: r.value,
                normalized: r.normalized,
                verdict: self.admissibility.verdict,
                delta_s: self.admissibility.delta_s,
                mass_flux: self.admissibility.mass_flux,
            })
            .collect()
    }
}
