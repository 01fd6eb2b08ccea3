//! Exact solver for the planar Riemann problem of a polytropic gas.
//!
//! The star pressure solves `f_L(p) + f_R(p) + (u_R - u_L) = 0` with the usual
//! shock and rarefaction branch functions. Newton iteration is safeguarded by a
//! bisection bracket on the monotone pressure function. The problem is centred
//! at `x = 0, t = 0`; only velocity component 0 takes part in the waves and the
//! other components are advected with the contact.

use serde::{Deserialize, Serialize};

use crate::eos::{Polytrope, Primitive};
use crate::error::{Error, Result};
use crate::shock::ShockFront;

const MAX_ITERATIONS: usize = 100;
const PRESSURE_TOL: f64 = 1e-14;
/// Relative star/outer pressure difference below which a wave is degenerate.
const DEGENERATE_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum WaveKind {
    Shock,
    Rarefaction,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Wave {
    pub kind: WaveKind,
    /// Speed of the edge facing the outer state (equals `tail` for shocks).
    pub head: f64,
    /// Speed of the edge facing the star region.
    pub tail: f64,
    /// True when the star pressure equals the outer pressure to `1e-12`.
    pub degenerate: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RiemannSolution {
    pub left: Primitive,
    pub right: Primitive,
    pub eos: Polytrope,
    pub p_star: f64,
    pub u_star: f64,
    pub rho_star_left: f64,
    pub rho_star_right: f64,
    pub left_wave: Wave,
    pub right_wave: Wave,
    pub iterations: usize,
}

struct Branch {
    rho: f64,
    p: f64,
    c: f64,
    a: f64,
    b: f64,
}

impl Branch {
    fn new(s: &Primitive, eos: &Polytrope) -> Self {
        let g = eos.gamma0();
        Branch {
            rho: s.rho,
            p: s.p,
            c: eos.sound_speed(s),
            a: 2.0 / ((g + 1.0) * s.rho),
            b: (g - 1.0) / (g + 1.0) * s.p,
        }
    }

    /// Branch function and its derivative.
    fn eval(&self, p: f64, g: f64) -> (f64, f64) {
        if p > self.p {
            let q = (self.a / (p + self.b)).sqrt();
            ((p - self.p) * q, q * (1.0 - 0.5 * (p - self.p) / (p + self.b)))
        } else {
            let z = (g - 1.0) / (2.0 * g);
            let ratio = p / self.p;
            (
                2.0 * self.c / (g - 1.0) * (ratio.powf(z) - 1.0),
                ratio.powf(-(g + 1.0) / (2.0 * g)) / (self.rho * self.c),
            )
        }
    }

    fn star_density(&self, p_star: f64, g: f64) -> f64 {
        let ratio = p_star / self.p;
        if p_star > self.p {
            let k = (g - 1.0) / (g + 1.0);
            self.rho * (ratio + k) / (k * ratio + 1.0)
        } else {
            self.rho * ratio.powf(1.0 / g)
        }
    }
}

pub fn solve(left: &Primitive, right: &Primitive, eos: &Polytrope) -> Result<RiemannSolution> {
    left.validate()?;
    right.validate()?;
    let g = eos.gamma0();
    let (bl, br) = (Branch::new(left, eos), Branch::new(right, eos));
    let du = right.u1() - left.u1();
    if 2.0 * (bl.c + br.c) / (g - 1.0) <= du {
        return Err(Error::Vacuum);
    }
    let f = |p: f64| {
        let (fl, dl) = bl.eval(p, g);
        let (fr, dr) = br.eval(p, g);
        (fl + fr + du, dl + dr)
    };

    let z = (g - 1.0) / (2.0 * g);
    let mut p = ((bl.c + br.c - 0.5 * (g - 1.0) * du) / (bl.c / bl.p.powf(z) + br.c / br.p.powf(z))).powf(1.0 / z);
    if !(p.is_finite() && p > 0.0) {
        p = 0.5 * (bl.p + br.p);
    }
    let mut lo = 0.0;
    let mut hi = p.max(bl.p).max(br.p);
    while f(hi).0 < 0.0 {
        lo = hi;
        hi *= 2.0;
    }

    let mut iterations = 0;
    // Pure contact: the outer pressure is the exact root.
    let contact_only = du == 0.0 && bl.p == br.p;
    if contact_only {
        p = bl.p;
    }
    while !contact_only && iterations < MAX_ITERATIONS {
        iterations += 1;
        let (fp, dfp) = f(p);
        if fp == 0.0 {
            break;
        }
        if fp < 0.0 {
            lo = lo.max(p);
        } else {
            hi = hi.min(p);
        }
        let mut next = p - fp / dfp;
        if !(next > lo && next < hi) {
            next = 0.5 * (lo + hi);
        }
        let change = 2.0 * (next - p).abs() / (next + p);
        p = next;
        if change < PRESSURE_TOL {
            break;
        }
    }

    let p_star = p;
    let u_star = 0.5 * (left.u1() + right.u1()) + 0.5 * (br.eval(p_star, g).0 - bl.eval(p_star, g).0);
    let rho_star_left = if is_degenerate(p_star, bl.p) { left.rho } else { bl.star_density(p_star, g) };
    let rho_star_right = if is_degenerate(p_star, br.p) { right.rho } else { br.star_density(p_star, g) };

    let left_wave = if p_star > bl.p {
        let s = shock_speed(left.rho, left.u1(), rho_star_left, u_star, bl.c, p_star / bl.p, g, -1.0);
        Wave { kind: WaveKind::Shock, head: s, tail: s, degenerate: is_degenerate(p_star, bl.p) }
    } else {
        let c_star = bl.c * (p_star / bl.p).powf(z);
        Wave {
            kind: WaveKind::Rarefaction,
            head: left.u1() - bl.c,
            tail: u_star - c_star,
            degenerate: is_degenerate(p_star, bl.p),
        }
    };
    let right_wave = if p_star > br.p {
        let s = shock_speed(right.rho, right.u1(), rho_star_right, u_star, br.c, p_star / br.p, g, 1.0);
        Wave { kind: WaveKind::Shock, head: s, tail: s, degenerate: is_degenerate(p_star, br.p) }
    } else {
        let c_star = br.c * (p_star / br.p).powf(z);
        Wave {
            kind: WaveKind::Rarefaction,
            head: right.u1() + br.c,
            tail: u_star + c_star,
            degenerate: is_degenerate(p_star, br.p),
        }
    };

    Ok(RiemannSolution {
        left: *left,
        right: *right,
        eos: *eos,
        p_star,
        u_star,
        rho_star_left,
        rho_star_right,
        left_wave,
        right_wave,
        iterations,
    })
}

fn is_degenerate(p_star: f64, p: f64) -> bool {
    (p_star - p).abs() <= DEGENERATE_TOL * p
}

/// Shock speed from the mass jump relation; for vanishing density jumps the
/// characteristic limit `u ∓ c sqrt(...)` is used instead.
#[allow(clippy::too_many_arguments)]
fn shock_speed(rho: f64, u: f64, rho_star: f64, u_star: f64, c: f64, ratio: f64, g: f64, sign: f64) -> f64 {
    if (rho_star - rho).abs() > 1e-8 * rho {
        (rho_star * u_star - rho * u) / (rho_star - rho)
    } else {
        u + sign * c * ((g + 1.0) / (2.0 * g) * ratio + (g - 1.0) / (2.0 * g)).sqrt()
    }
}

impl RiemannSolution {
    /// State at similarity coordinate `xi = x / t`.
    pub fn sample_xi(&self, xi: f64) -> Primitive {
        let g = self.eos.gamma0();
        let (l, r) = (&self.left, &self.right);
        if xi <= self.u_star {
            let star = Primitive::new(self.rho_star_left, with_normal(l, self.u_star).u, self.p_star);
            match self.left_wave.kind {
                WaveKind::Shock => {
                    if xi <= self.left_wave.head {
                        *l
                    } else {
                        star
                    }
                }
                WaveKind::Rarefaction => {
                    if xi <= self.left_wave.head {
                        *l
                    } else if xi >= self.left_wave.tail {
                        star
                    } else {
                        let cl = self.eos.sound_speed(l);
                        let u = 2.0 / (g + 1.0) * (cl + 0.5 * (g - 1.0) * l.u1() + xi);
                        let c = 2.0 / (g + 1.0) * (cl + 0.5 * (g - 1.0) * (l.u1() - xi));
                        fan_state(l, cl, u, c, g)
                    }
                }
            }
        } else {
            let star = Primitive::new(self.rho_star_right, with_normal(r, self.u_star).u, self.p_star);
            match self.right_wave.kind {
                WaveKind::Shock => {
                    if xi >= self.right_wave.head {
                        *r
                    } else {
                        star
                    }
                }
                WaveKind::Rarefaction => {
                    if xi >= self.right_wave.head {
                        *r
                    } else if xi <= self.right_wave.tail {
                        star
                    } else {
                        let cr = self.eos.sound_speed(r);
                        let u = 2.0 / (g + 1.0) * (-cr + 0.5 * (g - 1.0) * r.u1() + xi);
                        let c = 2.0 / (g + 1.0) * (cr - 0.5 * (g - 1.0) * (r.u1() - xi));
                        fan_state(r, cr, u, c, g)
                    }
                }
            }
        }
    }

    /// State at `(x, t)`. For `t <= 0` the initial data is returned.
    pub fn sample(&self, x: f64, t: f64) -> Primitive {
        if t <= 0.0 {
            return if x < 0.0 { self.left } else { self.right };
        }
        self.sample_xi(x / t)
    }

    pub fn contact_speed(&self) -> f64 {
        self.u_star
    }

    pub fn wave(&self, side: Side) -> &Wave {
        match side {
            Side::Left => &self.left_wave,
            Side::Right => &self.right_wave,
        }
    }

    /// The shock of the given family at time `t > 0` as a front, if that wave
    /// is a non-degenerate shock. `x0` shifts the centre of the problem.
    pub fn shock_front(&self, side: Side, x0: f64, t: f64) -> Option<ShockFront> {
        let wave = self.wave(side);
        if wave.kind != WaveKind::Shock || wave.degenerate {
            return None;
        }
        let s = wave.head;
        let (left, right) = match side {
            Side::Left => (self.left, Primitive::new(self.rho_star_left, with_normal(&self.left, self.u_star).u, self.p_star)),
            Side::Right => (Primitive::new(self.rho_star_right, with_normal(&self.right, self.u_star).u, self.p_star), self.right),
        };
        Some(ShockFront { t, xs: x0 + s * t, s, left, right })
    }
}

fn with_normal(s: &Primitive, u: f64) -> Primitive {
    let mut out = *s;
    out.u[0] = u;
    out
}

fn fan_state(outer: &Primitive, c_outer: f64, u: f64, c: f64, g: f64) -> Primitive {
    let ratio = c / c_outer;
    let rho = outer.rho * ratio.powf(2.0 / (g - 1.0));
    let p = outer.p * ratio.powf(2.0 * g / (g - 1.0));
    Primitive::new(rho, with_normal(outer, u).u, p)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sod() -> (Primitive, Primitive, Polytrope) {
        (Primitive::planar(1.0, 0.0, 1.0), Primitive::planar(0.125, 0.0, 0.1), Polytrope::new(1.4, 1).unwrap())
    }

    /// Bisection on the pressure function, written independently of the solver.
    fn bisection_star(l: &Primitive, r: &Primitive, g: f64) -> (f64, f64) {
        let branch = |p: f64, s: &Primitive| -> f64 {
            let c = (g * s.p / s.rho).sqrt();
            if p > s.p {
                (p - s.p) * (2.0 / ((g + 1.0) * s.rho) / (p + (g - 1.0) / (g + 1.0) * s.p)).sqrt()
            } else {
                2.0 * c / (g - 1.0) * ((p / s.p).powf((g - 1.0) / (2.0 * g)) - 1.0)
            }
        };
        let f = |p: f64| branch(p, l) + branch(p, r) + r.u[0] - l.u[0];
        let (mut lo, mut hi) = (1e-14, 100.0);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if f(mid) < 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let p = 0.5 * (lo + hi);
        (p, 0.5 * (l.u[0] + r.u[0]) + 0.5 * (branch(p, r) - branch(p, l)))
    }

    #[test]
    fn sod_star_state() {
        let (l, r, eos) = sod();
        let sol = solve(&l, &r, &eos).unwrap();
        let (p, u) = bisection_star(&l, &r, 1.4);
        assert!((sol.p_star - p).abs() < 1e-12, "{} vs {}", sol.p_star, p);
        assert!((sol.u_star - u).abs() < 1e-12);
        // Oracle values: p* = 0.30313017805064682, u* = 0.92745262004894995.
        assert!((sol.p_star - 0.303_130_178_050_646).abs() < 1e-12);
        assert!((sol.u_star - 0.927_452_620_048_950).abs() < 1e-12);
        assert_eq!(sol.left_wave.kind, WaveKind::Rarefaction);
        assert_eq!(sol.right_wave.kind, WaveKind::Shock);
    }

    #[test]
    fn symmetric_exponent_tube() {
        let eos = Polytrope::new(3.0, 1).unwrap();
        let (l, r) = (Primitive::planar(1.0, 0.0, 1.0), Primitive::planar(0.2, 0.0, 0.05));
        let sol = solve(&l, &r, &eos).unwrap();
        let (p, u) = bisection_star(&l, &r, 3.0);
        assert!((sol.p_star - p).abs() < 1e-12);
        assert!((sol.u_star - u).abs() < 1e-12);
        // Oracle values: p* = 0.26140225910346363, u* = 0.62458479670767354.
        assert!((sol.p_star - 0.261_402_259_103_464).abs() < 1e-12);
        assert!((sol.u_star - 0.624_584_796_707_674).abs() < 1e-12);
        assert_eq!(sol.right_wave.kind, WaveKind::Shock);
        assert!(!sol.right_wave.degenerate);
    }

    #[test]
    fn equal_states_are_degenerate() {
        let eos = Polytrope::new(1.4, 1).unwrap();
        let s = Primitive::planar(0.7, 0.3, 2.0);
        let sol = solve(&s, &s, &eos).unwrap();
        assert!((sol.p_star - 2.0).abs() < 1e-14);
        assert!((sol.u_star - 0.3).abs() < 1e-14);
        assert!(sol.left_wave.degenerate && sol.right_wave.degenerate);
        assert_eq!(sol.sample(0.1, 1.0), s);
    }

    #[test]
    fn vacuum_is_an_error() {
        let eos = Polytrope::new(1.4, 1).unwrap();
        let l = Primitive::planar(1.0, -10.0, 0.4);
        let r = Primitive::planar(1.0, 10.0, 0.4);
        assert_eq!(solve(&l, &r, &eos), Err(Error::Vacuum));
    }

    #[test]
    fn sampling_outer_and_contact() {
        let (l, r, eos) = sod();
        let sol = solve(&l, &r, &eos).unwrap();
        assert_eq!(sol.sample(-10.0, 1.0), l);
        assert_eq!(sol.sample(10.0, 1.0), r);
        let below = sol.sample_xi(sol.u_star - 1e-9);
        let above = sol.sample_xi(sol.u_star + 1e-9);
        assert_eq!(below.p, above.p);
        assert_eq!(below.u, above.u);
        assert!(below.rho > above.rho);
    }

    #[test]
    fn fan_is_isentropic_and_continuous() {
        let (l, r, eos) = sod();
        let sol = solve(&l, &r, &eos).unwrap();
        let chi_l = eos.chi(&l);
        let (head, tail) = (sol.left_wave.head, sol.left_wave.tail);
        for k in 0..=20 {
            let xi = head + (tail - head) * k as f64 / 20.0;
            assert!((eos.chi(&sol.sample_xi(xi)) - chi_l).abs() < 1e-14);
        }
        let star = sol.sample_xi(tail + 1e-12);
        let edge = sol.sample_xi(tail - 1e-12);
        assert!((star.rho - edge.rho).abs() < 1e-9);
    }

    #[test]
    fn self_similarity_is_exact_for_binary_scalings() {
        let (l, r, eos) = sod();
        let sol = solve(&l, &r, &eos).unwrap();
        for k in 0..50 {
            let x = -0.5 + 0.021 * k as f64;
            for lam in [0.25, 0.5, 2.0, 8.0] {
                assert_eq!(sol.sample(x, 0.3), sol.sample(lam * x, lam * 0.3));
            }
        }
    }

    #[test]
    fn galilei_covariance() {
        let (l, r, eos) = sod();
        let v = 0.8;
        let boost = |s: &Primitive| Primitive::planar(s.rho, s.u1() + v, s.p);
        let a = solve(&l, &r, &eos).unwrap();
        let b = solve(&boost(&l), &boost(&r), &eos).unwrap();
        assert!((b.u_star - a.u_star - v).abs() < 1e-13);
        assert!((b.p_star - a.p_star).abs() < 1e-13);
    }
}
