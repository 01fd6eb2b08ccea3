//! Polytropic equation of state, fluid-state representations and the
//! entropy-like scalar `chi = eps / rho^gamma0`.

use nalgebra::Vector3;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Spatial vector. Components beyond the spatial dimension are kept at zero.
pub type Vec3 = Vector3<f64>;

/// Tolerance used to decide whether `gamma0 == 1 + 2/n`.
pub const SYMMETRIC_EXPONENT_TOL: f64 = 1e-14;

/// Polytropic gas `p = (gamma0 - 1) eps` in `n` spatial dimensions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Polytrope {
    gamma0: f64,
    n: usize,
    r_gas: f64,
}

impl Polytrope {
    pub fn new(gamma0: f64, n: usize) -> Result<Self> {
        if !(gamma0.is_finite() && gamma0 > 1.0) {
            return Err(Error::Domain(format!("polytropic exponent must exceed 1, got {gamma0}")));
        }
        if !(1..=3).contains(&n) {
            return Err(Error::Domain(format!("spatial dimension must be 1, 2 or 3, got {n}")));
        }
        Ok(Self { gamma0, n, r_gas: 1.0 })
    }

    /// The exponent `1 + 2/n` for which the full `SL(2,R)` part is a symmetry.
    pub fn symmetric(n: usize) -> Result<Self> {
        Self::new(1.0 + 2.0 / n as f64, n)
    }

    pub fn with_gas_constant(mut self, r_gas: f64) -> Result<Self> {
        if !(r_gas.is_finite() && r_gas > 0.0) {
            return Err(Error::Domain(format!("gas constant must be positive, got {r_gas}")));
        }
        self.r_gas = r_gas;
        Ok(self)
    }

    pub fn gamma0(&self) -> f64 {
        self.gamma0
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn gas_constant(&self) -> f64 {
        self.r_gas
    }

    /// Heat capacity `C_v = R / (gamma0 - 1)`.
    pub fn cv(&self) -> f64 {
        self.r_gas / (self.gamma0 - 1.0)
    }

    pub fn symmetric_exponent(&self) -> f64 {
        1.0 + 2.0 / self.n as f64
    }

    pub fn is_symmetric(&self) -> bool {
        (self.gamma0 - self.symmetric_exponent()).abs() <= SYMMETRIC_EXPONENT_TOL
    }

    pub fn require_symmetric(&self) -> Result<()> {
        if self.is_symmetric() {
            Ok(())
        } else {
            Err(Error::NonSymmetricExponent {
                gamma0: self.gamma0,
                n: self.n,
                expected: self.symmetric_exponent(),
            })
        }
    }

    pub fn eps_from_p(&self, p: f64) -> Result<f64> {
        if !(p > 0.0) {
            return Err(Error::Domain(format!("pressure must be positive, got {p}")));
        }
        Ok(p / (self.gamma0 - 1.0))
    }

    pub fn p_from_eps(&self, eps: f64) -> f64 {
        (self.gamma0 - 1.0) * eps
    }

    pub fn prim_to_cons(&self, s: &Primitive) -> Conserved {
        let mom = s.u * s.rho;
        let energy = 0.5 * s.rho * s.u.norm_squared() + s.p / (self.gamma0 - 1.0);
        Conserved { rho: s.rho, mom, energy }
    }

    pub fn cons_to_prim(&self, c: &Conserved) -> Result<Primitive> {
        if !(c.rho > 0.0) {
            return Err(Error::Domain(format!("density must be positive, got {}", c.rho)));
        }
        let eps = c.internal_energy();
        if !(eps > 0.0) {
            return Err(Error::Domain(format!("internal energy must be positive, got {eps}")));
        }
        Ok(Primitive { rho: c.rho, u: c.mom / c.rho, p: self.p_from_eps(eps) })
    }

    /// `chi = eps / rho^gamma0`; a scalar under the whole group.
    pub fn chi(&self, s: &Primitive) -> f64 {
        s.p / ((self.gamma0 - 1.0) * s.rho.powf(self.gamma0))
    }

    /// Pressure of the state with density `rho` and entropy scalar `chi`.
    pub fn pressure_from_chi(&self, rho: f64, chi: f64) -> f64 {
        (self.gamma0 - 1.0) * chi * rho.powf(self.gamma0)
    }

    pub fn sound_speed(&self, s: &Primitive) -> f64 {
        (self.gamma0 * s.p / s.rho).sqrt()
    }

    pub fn entropy(&self, s: &Primitive) -> EntropyState {
        EntropyState::new(self.chi(s), self)
    }
}

/// Primitive state `(rho, u, p)` at a point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Primitive {
    pub rho: f64,
    pub u: Vec3,
    pub p: f64,
}

impl Primitive {
    pub fn new(rho: f64, u: Vec3, p: f64) -> Self {
        Self { rho, u, p }
    }

    /// State of a planar (or radial) flow with velocity along component 0.
    pub fn planar(rho: f64, u: f64, p: f64) -> Self {
        Self { rho, u: Vec3::new(u, 0.0, 0.0), p }
    }

    /// Velocity component 0 (the flow direction of reduced problems).
    pub fn u1(&self) -> f64 {
        self.u[0]
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.rho.is_finite() && self.rho > 0.0) {
            return Err(Error::Domain(format!("density must be positive, got {}", self.rho)));
        }
        if !(self.p.is_finite() && self.p > 0.0) {
            return Err(Error::Domain(format!("pressure must be positive, got {}", self.p)));
        }
        if !self.u.iter().all(|c| c.is_finite()) {
            return Err(Error::Domain("velocity must be finite".into()));
        }
        Ok(())
    }
}

/// Conserved state `(rho, rho u, E)` with `E = rho |u|^2 / 2 + eps`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Conserved {
    pub rho: f64,
    pub mom: Vec3,
    pub energy: f64,
}

impl Conserved {
    pub fn internal_energy(&self) -> f64 {
        self.energy - 0.5 * self.mom.norm_squared() / self.rho
    }
}

/// Entropy bookkeeping for a state.
///
/// Only differences of `s_rel = C_v ln chi` carry meaning: the additive constant
/// and the fluid-particle mass factor are absorbed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EntropyState {
    pub chi: f64,
    pub s_rel: f64,
    pub cv: f64,
}

impl EntropyState {
    pub fn new(chi: f64, eos: &Polytrope) -> Self {
        let cv = eos.cv();
        Self { chi, s_rel: cv * chi.ln(), cv }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
    }

    #[test]
    fn eps_examples() {
        let g3 = Polytrope::new(3.0, 1).unwrap();
        assert_eq!(g3.eps_from_p(1.0).unwrap(), 0.5);
        let g53 = Polytrope::new(5.0 / 3.0, 3).unwrap();
        assert!(rel(g53.eps_from_p(0.1).unwrap(), 0.15) < 1e-15);
        assert!(g3.eps_from_p(0.0).is_err());
        assert!(g3.eps_from_p(-1.0).is_err());
    }

    #[test]
    fn conversion_examples() {
        let g3 = Polytrope::new(3.0, 1).unwrap();
        let c = g3.prim_to_cons(&Primitive::planar(1.0, 0.0, 1.0));
        assert_eq!((c.rho, c.mom[0], c.energy), (1.0, 0.0, 0.5));

        let g53 = Polytrope::new(5.0 / 3.0, 1).unwrap();
        let c = g53.prim_to_cons(&Primitive::planar(2.0, 3.0, 4.0));
        assert_eq!(c.rho, 2.0);
        assert_eq!(c.mom[0], 6.0);
        assert!(rel(c.energy, 15.0) < 1e-15);
    }

    #[test]
    fn negative_internal_energy_rejected() {
        let eos = Polytrope::new(1.4, 1).unwrap();
        let c = Conserved { rho: 1.0, mom: Vec3::new(2.0, 0.0, 0.0), energy: 1.0 };
        assert!(matches!(eos.cons_to_prim(&c), Err(Error::Domain(_))));
    }

    #[test]
    fn chi_examples() {
        let g3 = Polytrope::new(3.0, 1).unwrap();
        assert_eq!(g3.chi(&Primitive::planar(1.0, 0.0, 1.0)), 0.5);
        // 6 / 2^(5/3) evaluated to 30 digits: 1.88988157484230974715081591...
        let g53 = Polytrope::new(5.0 / 3.0, 3).unwrap();
        let chi = g53.chi(&Primitive::planar(2.0, 0.0, 4.0));
        assert!(rel(chi, 1.889_881_574_842_309_7) < 1e-14, "chi = {chi}");
    }

    #[test]
    fn sound_speed_examples() {
        let eos = Polytrope::new(1.4, 1).unwrap();
        // sqrt(1.4) = 1.18321595661992320851...
        let c = eos.sound_speed(&Primitive::planar(1.0, 0.0, 1.0));
        assert!(rel(c, 1.183_215_956_619_923_2) < 1e-15);
        let c = eos.sound_speed(&Primitive::planar(1.4, 0.0, 1.0));
        assert!(rel(c, 1.0) < 1e-15);
    }

    #[test]
    fn symmetric_flag() {
        assert!(Polytrope::new(3.0, 1).unwrap().is_symmetric());
        assert!(Polytrope::new(2.0, 2).unwrap().is_symmetric());
        assert!(Polytrope::new(5.0 / 3.0, 3).unwrap().is_symmetric());
        assert!(!Polytrope::new(1.4, 1).unwrap().is_symmetric());
        assert!(!Polytrope::new(5.0 / 3.0, 1).unwrap().is_symmetric());
        assert!(Polytrope::new(1.0, 1).is_err());
        assert!(Polytrope::new(1.4, 4).is_err());
    }

    #[test]
    fn roundtrip_ten_thousand_states() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..10_000 {
            let eos = Polytrope::new(rng.gen_range(1.1..3.0), 3).unwrap();
            let rho = 10f64.powf(rng.gen_range(-3.0..3.0));
            let p = 10f64.powf(rng.gen_range(-3.0..3.0));
            let c = eos.sound_speed(&Primitive::planar(rho, 0.0, p));
            let dir = Vec3::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            let dir = dir / dir.norm().max(1e-12);
            let s = Primitive::new(rho, dir * (rng.gen_range(0.0..2.0) * c), p);
            let back = eos.cons_to_prim(&eos.prim_to_cons(&s)).unwrap();
            assert!(rel(back.rho, s.rho) <= 1e-14);
            assert!(rel(back.p, s.p) <= 1e-14, "{s:?} -> {back:?}");
            assert!((back.u - s.u).norm() <= 1e-14 * s.u.norm().max(1e-300));
        }
    }

    fn state() -> impl Strategy<Value = Primitive> {
        (1e-3f64..1e3, -50.0f64..50.0, -50.0f64..50.0, -50.0f64..50.0, 1e-3f64..1e3)
            .prop_map(|(rho, a, b, c, p)| Primitive::new(rho, Vec3::new(a, b, c), p))
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(2000))]

        #[test]
        fn prim_cons_roundtrip(s in state(), gamma0 in 1.05f64..3.0) {
            let eos = Polytrope::new(gamma0, 3).unwrap();
            let back = eos.cons_to_prim(&eos.prim_to_cons(&s)).unwrap();
            prop_assert!(rel(back.rho, s.rho) <= 1e-14);
            prop_assert!((back.u - s.u).norm() <= 1e-14 * s.u.norm().max(1e-300));
            // p is recovered from E - |m|^2/2rho: cancellation scales with the kinetic/internal ratio.
            let ratio = 1.0 + s.rho * s.u.norm_squared() * (gamma0 - 1.0) / s.p;
            prop_assert!(rel(back.p, s.p) <= 4e-16 * ratio + 1e-15);
        }

        #[test]
        fn eps_roundtrip(p in 1e-8f64..1e8) {
            let eos = Polytrope::new(1.4, 1).unwrap();
            prop_assert!(rel(eos.p_from_eps(eos.eps_from_p(p).unwrap()), p) <= 2e-16);
        }

        #[test]
        fn chi_positive_and_homogeneous(s in state(), lam in 0.1f64..10.0, mu in 0.1f64..10.0) {
            let eos = Polytrope::new(5.0 / 3.0, 3).unwrap();
            let chi = eos.chi(&s);
            prop_assert!(chi > 0.0);
            let scaled = Primitive::new(lam * s.rho, s.u, mu * s.p);
            let expected = mu / lam.powf(eos.gamma0()) * chi;
            prop_assert!(rel(eos.chi(&scaled), expected) < 1e-13);
        }

        #[test]
        fn entropy_monotone_in_chi(a in 1e-6f64..1e6, b in 1e-6f64..1e6) {
            let eos = Polytrope::new(1.4, 1).unwrap();
            let (sa, sb) = (EntropyState::new(a, &eos), EntropyState::new(b, &eos));
            prop_assert_eq!(a < b, sa.s_rel < sb.s_rel);
        }

        #[test]
        fn sound_speed_scale_invariant(s in state(), lam in 0.01f64..100.0) {
            let eos = Polytrope::new(1.4, 1).unwrap();
            let scaled = Primitive::new(lam * s.rho, s.u, lam * s.p);
            prop_assert!(rel(eos.sound_speed(&scaled), eos.sound_speed(&s)) < 1e-15);
        }
    }
}
