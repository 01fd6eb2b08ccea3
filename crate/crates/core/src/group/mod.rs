//! The kinematical group `SL(2,R) ∧ Galilei` of polytropic fluid dynamics.
//!
//! A [`GroupElement`] acts as the static Galilei map `x -> R x + v t + a`
//! followed by the `SL(2,R)` map
//!
//! ```text
//! t' = (alpha t + beta) / (gamma t + delta),   x' = x / (gamma t + delta).
//! ```
//!
//! Fields transform as `rho' = tau^n rho`, `u' = tau (R u + v) - gamma (R x + v t + a)`
//! with `tau = gamma t + delta`, while `chi` is a scalar. The field map is a
//! symmetry of the Euler equations only for `gamma0 = 1 + 2/n` (pure
//! Galilei elements and time translations excepted).

mod pullback;

pub use pullback::{mapped_times, planar_galilei, transform_snapshot, Interpolation, Pullback, PullbackOptions};

use nalgebra::{DMatrix, Matrix3, Matrix6};
use serde::{Deserialize, Serialize};

use crate::eos::{Polytrope, Primitive, Vec3};
use crate::error::{Error, Result};

const DET_TOL: f64 = 1e-12;
const ORTHOGONALITY_TOL: f64 = 1e-12;

/// Unimodular 2x2 matrix `[[alpha, beta], [gamma, delta]]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Sl2Element {
    alpha: f64,
    beta: f64,
    gamma: f64,
    delta: f64,
}

impl Sl2Element {
    pub const IDENTITY: Sl2Element = Sl2Element { alpha: 1.0, beta: 0.0, gamma: 0.0, delta: 1.0 };

    /// Builds the element, dividing all entries by `sqrt(alpha delta - beta gamma)`.
    pub fn new(alpha: f64, beta: f64, gamma: f64, delta: f64) -> Result<Self> {
        let det = alpha * delta - beta * gamma;
        if !(det.is_finite() && det > 0.0) {
            return Err(Error::InvalidElement(format!(
                "alpha*delta - beta*gamma = {det} must be positive to normalise onto SL(2,R)"
            )));
        }
        let s = det.sqrt();
        let el = Sl2Element { alpha: alpha / s, beta: beta / s, gamma: gamma / s, delta: delta / s };
        debug_assert!((el.det() - 1.0).abs() <= DET_TOL);
        Ok(el)
    }

    /// `t -> -1/t, x -> x/t`, the explosion/implosion map.
    pub fn drury_mendonca() -> Self {
        Sl2Element { alpha: 0.0, beta: -1.0, gamma: 1.0, delta: 0.0 }
    }

    pub fn time_translation(b: f64) -> Self {
        Sl2Element { alpha: 1.0, beta: b, gamma: 0.0, delta: 1.0 }
    }

    /// `(lambda, 0, 0, 1/lambda)`: `x -> lambda x`, `t -> lambda^2 t`.
    pub fn scaling(lambda: f64) -> Result<Self> {
        if !(lambda.is_finite() && lambda > 0.0) {
            return Err(Error::InvalidElement(format!("scaling factor must be positive, got {lambda}")));
        }
        Ok(Sl2Element { alpha: lambda, beta: 0.0, gamma: 0.0, delta: 1.0 / lambda })
    }

    /// `(1, 0, c, 1)`: the one-parameter expansions.
    pub fn expansion(c: f64) -> Self {
        Sl2Element { alpha: 1.0, beta: 0.0, gamma: c, delta: 1.0 }
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }
    pub fn beta(&self) -> f64 {
        self.beta
    }
    pub fn gamma(&self) -> f64 {
        self.gamma
    }
    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn entries(&self) -> [f64; 4] {
        [self.alpha, self.beta, self.gamma, self.delta]
    }

    pub fn det(&self) -> f64 {
        self.alpha * self.delta - self.beta * self.gamma
    }

    /// Matrix product `self * rhs`: the map that applies `rhs` first.
    pub fn compose(&self, rhs: &Sl2Element) -> Sl2Element {
        Sl2Element {
            alpha: self.alpha * rhs.alpha + self.beta * rhs.gamma,
            beta: self.alpha * rhs.beta + self.beta * rhs.delta,
            gamma: self.gamma * rhs.alpha + self.delta * rhs.gamma,
            delta: self.gamma * rhs.beta + self.delta * rhs.delta,
        }
    }

    pub fn inverse(&self) -> Sl2Element {
        Sl2Element { alpha: self.delta, beta: -self.beta, gamma: -self.gamma, delta: self.alpha }
    }

    pub fn negated(&self) -> Sl2Element {
        Sl2Element { alpha: -self.alpha, beta: -self.beta, gamma: -self.gamma, delta: -self.delta }
    }

    pub fn is_identity(&self) -> bool {
        *self == Self::IDENTITY
    }

    /// True for elements with `gamma = 0, delta = 1` (time translations), which are
    /// symmetries for every exponent.
    pub fn is_time_translation(&self) -> bool {
        self.gamma == 0.0 && self.delta == 1.0
    }

    /// `tau = gamma t + delta`.
    pub fn denominator(&self, t: f64) -> f64 {
        self.gamma * t + self.delta
    }

    /// The excluded instant `t = -delta/gamma`, if any.
    pub fn singular_time(&self) -> Option<f64> {
        (self.gamma != 0.0).then(|| -self.delta / self.gamma)
    }

    pub fn map_time(&self, t: f64) -> Result<f64> {
        let tau = self.nonsingular(t)?;
        Ok((self.alpha * t + self.beta) / tau)
    }

    /// Preimage of a target time.
    pub fn preimage_time(&self, t_prime: f64) -> Result<f64> {
        self.inverse().map_time(t_prime)
    }

    fn nonsingular(&self, t: f64) -> Result<f64> {
        let tau = self.denominator(t);
        if tau == 0.0 || !tau.is_finite() {
            return Err(Error::SingularTime { t: self.singular_time().unwrap_or(t) });
        }
        Ok(tau)
    }

    /// `tau` at `t`, required to be positive.
    pub fn positive_denominator(&self, t: f64) -> Result<f64> {
        let tau = self.nonsingular(t)?;
        if tau < 0.0 {
            return Err(Error::Orientation { t, denominator: tau });
        }
        Ok(tau)
    }

    /// The element or its negative, whichever has `tau > 0` on `[t0, t1]`.
    pub fn oriented_on(&self, t0: f64, t1: f64) -> Result<Sl2Element> {
        let (a, b) = (self.nonsingular(t0)?, self.nonsingular(t1)?);
        if a.signum() != b.signum() {
            return Err(Error::SingularTime { t: self.singular_time().unwrap_or(t0) });
        }
        Ok(if a > 0.0 { *self } else { self.negated() })
    }
}

/// Static Galilei element `x -> R x + v t + a`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GalileiElement {
    rotation: Matrix3<f64>,
    boost: Vec3,
    shift: Vec3,
}

impl GalileiElement {
    pub fn new(rotation: Matrix3<f64>, boost: Vec3, shift: Vec3) -> Result<Self> {
        let defect = (rotation.transpose() * rotation - Matrix3::identity()).abs().max();
        if !(defect <= ORTHOGONALITY_TOL) {
            return Err(Error::InvalidElement(format!("rotation matrix is not orthogonal (|R^T R - I| = {defect:e})")));
        }
        if !(boost.iter().chain(shift.iter()).all(|c| c.is_finite())) {
            return Err(Error::InvalidElement("boost and shift must be finite".into()));
        }
        Ok(Self { rotation, boost, shift })
    }

    pub fn identity() -> Self {
        Self { rotation: Matrix3::identity(), boost: Vec3::zeros(), shift: Vec3::zeros() }
    }

    pub fn boost(v: Vec3) -> Self {
        Self { boost: v, ..Self::identity() }
    }

    pub fn translation(a: Vec3) -> Self {
        Self { shift: a, ..Self::identity() }
    }

    pub fn rotation(&self) -> &Matrix3<f64> {
        &self.rotation
    }
    pub fn boost_velocity(&self) -> &Vec3 {
        &self.boost
    }
    pub fn shift(&self) -> &Vec3 {
        &self.shift
    }

    pub fn is_identity(&self) -> bool {
        *self == Self::identity()
    }

    pub fn apply(&self, x: &Vec3, t: f64) -> Vec3 {
        self.rotation * x + self.boost * t + self.shift
    }

    /// `self ∘ rhs` (rhs first).
    pub fn compose(&self, rhs: &GalileiElement) -> GalileiElement {
        GalileiElement {
            rotation: self.rotation * rhs.rotation,
            boost: self.rotation * rhs.boost + self.boost,
            shift: self.rotation * rhs.shift + self.shift,
        }
    }

    /// `(-R, -v, -a)`: composition with the spatial inversion.
    pub fn inverted(&self) -> GalileiElement {
        GalileiElement { rotation: -self.rotation, boost: -self.boost, shift: -self.shift }
    }
}

/// Element of `SL(2,R) ∧ Galilei`, applied Galilei first.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GroupElement {
    pub sl2: Sl2Element,
    pub gal: GalileiElement,
}

impl GroupElement {
    pub fn new(sl2: Sl2Element, gal: GalileiElement) -> Self {
        Self { sl2, gal }
    }

    pub fn identity() -> Self {
        Self::new(Sl2Element::IDENTITY, GalileiElement::identity())
    }

    pub fn from_sl2(sl2: Sl2Element) -> Self {
        Self::new(sl2, GalileiElement::identity())
    }

    pub fn from_galilei(gal: GalileiElement) -> Self {
        Self::new(Sl2Element::IDENTITY, gal)
    }

    pub fn act_coords(&self, x: &Vec3, t: f64) -> Result<(Vec3, f64)> {
        let tau = self.sl2.nonsingular(t)?;
        let moved = self.gal.apply(x, t);
        Ok((moved / tau, (self.sl2.alpha * t + self.sl2.beta) / tau))
    }

    /// Inverse coordinate map.
    pub fn preimage_coords(&self, x_prime: &Vec3, t_prime: f64) -> Result<(Vec3, f64)> {
        let t = self.sl2.preimage_time(t_prime)?;
        let tau = self.sl2.nonsingular(t)?;
        let moved = x_prime * tau - self.gal.boost * t - self.gal.shift;
        Ok((self.gal.rotation.transpose() * moved, t))
    }

    /// Field action at the source point `(x, t)`; the result lives at
    /// `act_coords(x, t)`. Requires `tau > 0` and, unless the `SL(2,R)` part is a
    /// time translation, the symmetric exponent.
    pub fn act_state(&self, s: &Primitive, x: &Vec3, t: f64, eos: &Polytrope) -> Result<Primitive> {
        if !self.sl2.is_time_translation() {
            eos.require_symmetric()?;
        }
        self.act_state_unchecked(s, x, t, eos)
    }

    /// Field action without the exponent check; used for negative controls.
    pub fn act_state_unchecked(&self, s: &Primitive, x: &Vec3, t: f64, eos: &Polytrope) -> Result<Primitive> {
        let tau = self.sl2.positive_denominator(t)?;
        let rho = tau.powi(eos.dim() as i32) * s.rho;
        let u = (self.gal.rotation * s.u + self.gal.boost) * tau - self.gal.apply(x, t) * self.sl2.gamma;
        let p = eos.pressure_from_chi(rho, eos.chi(s));
        Ok(Primitive { rho, u, p })
    }

    /// Viscosity fields transform like the density.
    pub fn act_viscosity(&self, eta: f64, zeta: f64, t: f64, dim: usize) -> Result<(f64, f64)> {
        let factor = self.sl2.positive_denominator(t)?.powi(dim as i32);
        Ok((factor * eta, factor * zeta))
    }

    /// `self ∘ rhs`: the element that applies `rhs` first.
    pub fn compose(&self, rhs: &GroupElement) -> GroupElement {
        // Moving self.gal past rhs.sl2 turns (R, v, a) into (R, alpha v + gamma a, beta v + delta a).
        let s = &rhs.sl2;
        let moved = GalileiElement {
            rotation: self.gal.rotation,
            boost: self.gal.boost * s.alpha + self.gal.shift * s.gamma,
            shift: self.gal.boost * s.beta + self.gal.shift * s.delta,
        };
        GroupElement { sl2: self.sl2.compose(&rhs.sl2), gal: moved.compose(&rhs.gal) }
    }

    /// The same coordinate map written with `tau > 0` on `[t0, t1]`: if needed
    /// `(sigma, g)` is replaced by `(-sigma, g inverted)`, which leaves
    /// coordinates and velocities unchanged and makes the density factor positive.
    pub fn oriented_on(&self, t0: f64, t1: f64) -> Result<GroupElement> {
        let sl2 = self.sl2.oriented_on(t0, t1)?;
        Ok(if sl2 == self.sl2 { *self } else { GroupElement { sl2, gal: self.gal.inverted() } })
    }
}

/// Which printing of the triplet block to use.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TripletVariant {
    /// `alpha^2` in the leading entry of the A row.
    Corrected,
    /// `alpha` in the leading entry of the A row (not a representation).
    AsPrinted,
}

/// Order of the current stack acted on by [`RepresentationMatrix`].
pub const STACK_ORDER: [&str; 6] = ["rho", "K", "P", "A", "D", "H"];

/// 6x6 action of `SL(2,R)` on the stack `(J_rho, J_K, J_P, J_A, J_D, J_H)`:
/// singlet ⊕ doublet ⊕ triplet.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RepresentationMatrix(pub Matrix6<f64>);

impl RepresentationMatrix {
    pub fn det(&self) -> f64 {
        self.0.determinant()
    }

    pub fn apply(&self, stack: &[f64; 6]) -> [f64; 6] {
        let mut out = [0.0; 6];
        for (r, o) in out.iter_mut().enumerate() {
            *o = (0..6).map(|s| self.0[(r, s)] * stack[s]).sum();
        }
        out
    }

    pub fn compose(&self, rhs: &RepresentationMatrix) -> RepresentationMatrix {
        RepresentationMatrix(self.0 * rhs.0)
    }
}

pub fn representation_matrix(sl2: &Sl2Element) -> RepresentationMatrix {
    representation_matrix_variant(sl2, TripletVariant::Corrected)
}

pub fn representation_matrix_variant(sl2: &Sl2Element, variant: TripletVariant) -> RepresentationMatrix {
    let [a, b, c, d] = sl2.entries();
    let a_row_lead = match variant {
        TripletVariant::Corrected => a * a,
        TripletVariant::AsPrinted => a,
    };
    #[rustfmt::skip]
    let m = Matrix6::new(
        1.0, 0.0, 0.0, 0.0,          0.0,             0.0,
        0.0, a,   b,   0.0,          0.0,             0.0,
        0.0, c,   d,   0.0,          0.0,             0.0,
        0.0, 0.0, 0.0, a_row_lead,   -a * b,          b * b,
        0.0, 0.0, 0.0, -2.0 * a * c, b * c + a * d,   -2.0 * b * d,
        0.0, 0.0, 0.0, c * c,        -c * d,          d * d,
    );
    RepresentationMatrix(m)
}

/// Derivatives of the `SL(2,R)` coordinate map at a point. Index 0 is time.
#[derive(Debug, Clone, PartialEq)]
pub struct JacobianFactors {
    /// `det(∂x/∂x') = tau^(n+2)`.
    pub det_inverse: f64,
    /// `forward[(mu, nu)] = ∂x'^mu / ∂x^nu`.
    pub forward: DMatrix<f64>,
    /// `covector[(nu, mu)] = ∂x^nu / ∂x'^mu`; a covector maps as `n' = covector^T n`.
    pub covector: DMatrix<f64>,
}

impl JacobianFactors {
    pub fn pull_covector(&self, n: &[f64]) -> Vec<f64> {
        let v = DMatrix::from_column_slice(n.len(), 1, n);
        (self.covector.transpose() * v).iter().copied().collect()
    }
}

pub fn jacobian_factors(sl2: &Sl2Element, x: &Vec3, t: f64, dim: usize) -> Result<JacobianFactors> {
    let tau = sl2.positive_denominator(t)?;
    let g = sl2.gamma();
    let mut forward = DMatrix::zeros(dim + 1, dim + 1);
    let mut covector = DMatrix::zeros(dim + 1, dim + 1);
    forward[(0, 0)] = 1.0 / (tau * tau);
    covector[(0, 0)] = tau * tau;
    for i in 0..dim {
        forward[(i + 1, 0)] = -g * x[i] / (tau * tau);
        forward[(i + 1, i + 1)] = 1.0 / tau;
        covector[(i + 1, 0)] = g * x[i] * tau;
        covector[(i + 1, i + 1)] = tau;
    }
    Ok(JacobianFactors { det_inverse: tau.powi(dim as i32 + 2), forward, covector })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constructor_normalises_determinant() {
        let s = Sl2Element::new(2.0, 1.0, 1.0, 3.0).unwrap();
        assert!((s.det() - 1.0).abs() < 1e-15);
        assert!((s.alpha() - 2.0 / 5f64.sqrt()).abs() < 1e-15);
        assert!(Sl2Element::new(1.0, 2.0, 3.0, 4.0).is_err());
        assert!(Sl2Element::new(0.0, 0.0, 0.0, 0.0).is_err());
    }

    #[test]
    fn identity_acts_trivially() {
        let g = GroupElement::identity();
        let x = Vec3::new(0.3, -1.2, 2.0);
        assert_eq!(g.act_coords(&x, 0.7).unwrap(), (x, 0.7));
        let eos = Polytrope::symmetric(3).unwrap();
        let s = Primitive::new(1.3, Vec3::new(0.1, 0.2, 0.3), 0.9);
        let out = g.act_state(&s, &x, 0.7, &eos).unwrap();
        assert_eq!(out.rho, s.rho);
        assert_eq!(out.u, s.u);
        assert!((out.p - s.p).abs() < 1e-15);
        assert_eq!(g.act_viscosity(0.4, 0.2, 3.0, 3).unwrap(), (0.4, 0.2));
    }

    #[test]
    fn drury_mendonca_coordinates() {
        let g = GroupElement::from_sl2(Sl2Element::drury_mendonca());
        let (x, t) = g.act_coords(&Vec3::new(3.0, 0.0, 0.0), 2.0).unwrap();
        assert_eq!(x[0], 1.5);
        assert_eq!(t, -0.5);
        assert_eq!(g.act_coords(&Vec3::zeros(), 0.0), Err(Error::SingularTime { t: 0.0 }));
    }

    #[test]
    fn galilei_boost_of_state() {
        let eos = Polytrope::new(1.4, 1).unwrap();
        let g = GroupElement::from_galilei(GalileiElement::boost(Vec3::new(0.5, 0.0, 0.0)));
        let s = Primitive::planar(1.2, 0.3, 0.8);
        let out = g.act_state(&s, &Vec3::new(0.2, 0.0, 0.0), 0.4, &eos).unwrap();
        assert_eq!(out.rho, 1.2);
        assert_eq!(out.u[0], 0.8);
    }

    #[test]
    fn pure_scaling_of_state() {
        let eos = Polytrope::symmetric(1).unwrap();
        let lam = 2.5;
        let g = GroupElement::from_sl2(Sl2Element::scaling(lam).unwrap());
        let s = Primitive::planar(1.2, 0.3, 0.8);
        let out = g.act_state(&s, &Vec3::new(0.2, 0.0, 0.0), 0.4, &eos).unwrap();
        assert!((out.rho - s.rho / lam).abs() < 1e-15);
        assert!((out.u[0] - s.u[0] / lam).abs() < 1e-15);
    }

    #[test]
    fn nonsymmetric_exponent_needs_unchecked_path() {
        let eos = Polytrope::new(1.4, 1).unwrap();
        let g = GroupElement::from_sl2(Sl2Element::drury_mendonca());
        let s = Primitive::planar(1.0, 0.0, 1.0);
        let x = Vec3::new(0.5, 0.0, 0.0);
        assert!(matches!(g.act_state(&s, &x, 1.0, &eos), Err(Error::NonSymmetricExponent { .. })));
        assert!(g.act_state_unchecked(&s, &x, 1.0, &eos).is_ok());
        // time translations are symmetries for every exponent
        let tt = GroupElement::from_sl2(Sl2Element::time_translation(0.3));
        assert!(tt.act_state(&s, &x, 1.0, &eos).is_ok());
    }

    #[test]
    fn negative_branch_rejected() {
        let eos = Polytrope::symmetric(1).unwrap();
        let g = GroupElement::from_sl2(Sl2Element::drury_mendonca());
        let s = Primitive::planar(1.0, 0.0, 1.0);
        assert!(matches!(g.act_state(&s, &Vec3::zeros(), -1.0, &eos), Err(Error::Orientation { .. })));
        assert!(matches!(g.act_viscosity(1.0, 1.0, -1.0, 1), Err(Error::Orientation { .. })));
    }

    #[test]
    fn viscosity_example() {
        // tau = gamma t + delta = 2 at t = 1 for (1, 0, 1, 1)
        let g = GroupElement::from_sl2(Sl2Element::expansion(1.0));
        let (eta, zeta) = g.act_viscosity(1.0, 0.5, 1.0, 3).unwrap();
        assert_eq!((eta, zeta), (8.0, 4.0));
    }

    #[test]
    fn matrix_of_identity_and_drury_mendonca() {
        assert_eq!(representation_matrix(&Sl2Element::IDENTITY).0, Matrix6::identity());
        let m = representation_matrix(&Sl2Element::drury_mendonca()).0;
        #[rustfmt::skip]
        let expected = Matrix6::new(
            1.0, 0.0, 0.0, 0.0, 0.0, 0.0,
            0.0, 0.0, -1.0, 0.0, 0.0, 0.0,
            0.0, 1.0, 0.0, 0.0, 0.0, 0.0,
            0.0, 0.0, 0.0, 0.0, 0.0, 1.0,
            0.0, 0.0, 0.0, 0.0, -1.0, 0.0,
            0.0, 0.0, 0.0, 1.0, 0.0, 0.0,
        );
        assert_eq!(m.map(|v| v + 0.0), expected);
    }

    #[test]
    fn printed_variant_is_not_unimodular() {
        let s = Sl2Element::new(1.7, 0.4, -0.3, 0.9).unwrap();
        let printed = representation_matrix_variant(&s, TripletVariant::AsPrinted).det();
        let corrected = representation_matrix(&s).det();
        assert!((corrected - 1.0).abs() < 1e-12);
        assert!((printed - 1.0).abs() > 1e-3, "printed det = {printed}");
    }

    #[test]
    fn jacobian_of_identity() {
        let j = jacobian_factors(&Sl2Element::IDENTITY, &Vec3::new(0.3, 0.2, 0.1), 1.0, 3).unwrap();
        assert_eq!(j.det_inverse, 1.0);
        assert_eq!(j.forward, DMatrix::identity(4, 4));
        assert_eq!(j.covector, DMatrix::identity(4, 4));
    }

    #[test]
    fn orientation_normalisation_keeps_the_coordinate_map() {
        let g = GroupElement::new(
            Sl2Element::drury_mendonca(),
            GalileiElement::translation(Vec3::new(0.2, 0.0, 0.0)),
        );
        let flipped = g.oriented_on(-2.0, -1.0).unwrap();
        assert_eq!(flipped.sl2, Sl2Element::drury_mendonca().negated());
        let x = Vec3::new(0.7, 0.0, 0.0);
        let (a, ta) = g.act_coords(&x, -1.5).unwrap();
        let (b, tb) = flipped.act_coords(&x, -1.5).unwrap();
        assert!((a - b).norm() < 1e-15 && (ta - tb).abs() < 1e-15);
        assert!(g.oriented_on(-1.0, 1.0).is_err());
    }
}
