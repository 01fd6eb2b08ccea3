use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use shockdual::group::{GroupElement, Sl2Element};
use shockdual::noether::CurrentFamily;
use shockdual::riemann::Side;
use shockdual::shock::{
    admissibility, dual_rh_residual, extended_from_standard, normal_shock, recombined_residuals, rh_residual,
    rh_residual_normalized, transform_front, ShockFront, Verdict,
};
use shockdual::{Polytrope, Primitive, Vec3};

const MACHS: [f64; 3] = [1.2, 2.0, 5.0];

fn gases() -> Vec<Polytrope> {
    vec![Polytrope::new(3.0, 1).unwrap(), Polytrope::new(5.0 / 3.0, 3).unwrap()]
}

/// Shock-frame Hugoniot solved by bisection on the compression ratio. Mass and
/// momentum give the downstream speed and pressure for a trial ratio; the
/// root is where the total enthalpy balances.
fn hugoniot(rho1: f64, p1: f64, mach: f64, g: f64) -> (f64, f64, f64) {
    let w1 = mach * (g * p1 / rho1).sqrt();
    let enthalpy = |rho: f64, p: f64| g / (g - 1.0) * p / rho;
    let balance = |r: f64| {
        let w2 = w1 / r;
        let p2 = p1 + rho1 * w1 * (w1 - w2);
        enthalpy(rho1, p1) + 0.5 * w1 * w1 - enthalpy(rho1 * r, p2) - 0.5 * w2 * w2
    };
    // the trivial root r = 1 is excluded by starting just above it
    let (mut lo, mut hi) = (1.0 + 1e-9, (g + 1.0) / (g - 1.0) - 1e-12);
    assert!(balance(lo) * balance(hi) < 0.0);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if balance(lo) * balance(mid) <= 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let r = 0.5 * (lo + hi);
    (rho1 * r, p1 + rho1 * w1 * w1 * (1.0 - 1.0 / r), w1 / r)
}

/// Oracle front moving right into `upstream` at rest-frame speed `u1 + M c1`.
fn oracle_front(upstream: Primitive, mach: f64, eos: &Polytrope, xs: f64, t: f64) -> ShockFront {
    let g = eos.gamma0();
    let (rho2, p2, w2) = hugoniot(upstream.rho, upstream.p, mach, g);
    let s = upstream.u1() + mach * (g * upstream.p / upstream.rho).sqrt();
    let mut down = upstream;
    down.rho = rho2;
    down.p = p2;
    down.u[0] = s - w2;
    ShockFront::new(t, xs, s, down, upstream)
}

fn upstream(eos: &Polytrope) -> Primitive {
    let mut u = Vec3::zeros();
    u[0] = 0.3;
    if eos.dim() == 3 {
        u[1] = -0.2;
        u[2] = 0.1;
    }
    Primitive::new(1.0, u, 1.0)
}

fn standard(n: usize) -> Vec<CurrentFamily> {
    let mut f = vec![CurrentFamily::Mass, CurrentFamily::Energy];
    f.extend((0..n).map(CurrentFamily::Momentum));
    f
}

fn random_sl2(rng: &mut impl Rng, t: f64) -> Sl2Element {
    loop {
        let e: [f64; 4] = std::array::from_fn(|_| rng.gen_range(-2.0..2.0));
        if e[0] * e[3] - e[1] * e[2] > 0.05 {
            let sl2 = Sl2Element::new(e[0], e[1], e[2], e[3]).unwrap();
            if sl2.denominator(t).abs() > 0.2 {
                return sl2;
            }
        }
    }
}

#[test]
fn oracle_fronts_satisfy_the_standard_conditions() {
    for eos in gases() {
        for mach in MACHS {
            let front = oracle_front(upstream(&eos), mach, &eos, 0.4, 1.3);
            for fam in standard(eos.dim()) {
                let r = rh_residual_normalized(&front, fam, &eos).unwrap();
                assert!(r.normalized.abs() < 1e-12, "{fam} M={mach}: {r:?}");
            }
            let closed = normal_shock(&upstream(&eos), mach, &eos, Side::Right, 0.4, 1.3).unwrap();
            for (a, b) in [(closed.left.rho, front.left.rho), (closed.left.p, front.left.p), (closed.s, front.s)] {
                assert!((a - b).abs() < 1e-10 * b.abs(), "{a} vs {b}");
            }
        }
    }
}

#[test]
fn extended_residuals_follow_from_the_standard_ones() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for eos in gases() {
        let n = eos.dim();
        for _ in 0..200 {
            let mut front = oracle_front(upstream(&eos), rng.gen_range(1.1..6.0), &eos, rng.gen_range(-2.0..2.0), rng.gen_range(0.2..3.0));
            // off the Hugoniot so that the residuals are not all zero
            front.left.p *= rng.gen_range(0.8..1.2);
            front.left.u[0] += rng.gen_range(-0.1..0.1);
            if n == 3 {
                front.xs = rng.gen_range(-2.0..2.0);
            }
            let pred = extended_from_standard(&front, &eos).unwrap();
            let pairs = [
                (pred.boost, CurrentFamily::Boost(0)),
                (pred.dilatation, CurrentFamily::Dilatation),
                (pred.expansion, CurrentFamily::Expansion),
            ];
            for (p, fam) in pairs {
                let direct = rh_residual_normalized(&front, fam, &eos).unwrap();
                assert!((direct.value - p).abs() < 1e-13 * direct.scale.max(1.0), "{fam}: {} vs {p}", direct.value);
            }
            if n == 3 {
                for i in 0..3 {
                    let direct = rh_residual_normalized(&front, CurrentFamily::AngularMomentum(i), &eos).unwrap();
                    assert!((direct.value - pred.angular[i]).abs() < 1e-13 * direct.scale.max(1.0));
                }
            }
        }
    }
}

#[test]
fn dual_conditions_hold_on_hugoniot_fronts() {
    let mut rng = ChaCha8Rng::seed_from_u64(22);
    for eos in gases() {
        for mach in MACHS {
            let front = oracle_front(upstream(&eos), mach, &eos, 0.7, 1.5);
            let dm = dual_rh_residual(&front, &Sl2Element::drury_mendonca(), &eos).unwrap();
            assert!(dm.iter().all(|r| r.normalized.abs() < 1e-12), "{dm:?}");
            for _ in 0..100 {
                let sl2 = random_sl2(&mut rng, front.t);
                for r in dual_rh_residual(&front, &sl2, &eos).unwrap() {
                    assert!(r.normalized.abs() < 1e-10, "{r:?}");
                }
            }
        }
    }
}

#[test]
fn recombined_residuals_match_the_transformed_front() {
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    for eos in gases() {
        let n = eos.dim() as i32;
        for _ in 0..200 {
            let mut front = oracle_front(upstream(&eos), rng.gen_range(1.1..6.0), &eos, rng.gen_range(-1.0..1.0), rng.gen_range(0.2..2.0));
            front.right.rho *= rng.gen_range(0.8..1.2);
            front.right.p *= rng.gen_range(0.8..1.2);
            let sl2 = random_sl2(&mut rng, front.t).oriented_on(front.t, front.t).unwrap();
            let tau = sl2.denominator(front.t);
            let image = transform_front(&GroupElement::from_sl2(sl2), &front, &eos).unwrap();
            let rec = recombined_residuals(&front, &sl2, &eos).unwrap();
            let direct = [
                rh_residual_normalized(&image, CurrentFamily::Mass, &eos).unwrap(),
                rh_residual_normalized(&image, CurrentFamily::Momentum(0), &eos).unwrap(),
                rh_residual_normalized(&image, CurrentFamily::Energy, &eos).unwrap(),
            ];
            for (d, r) in direct.iter().zip(rec) {
                let predicted = tau.powi(n + 1) * r;
                assert!((d.value - predicted).abs() < 1e-11 * d.scale.max(1.0), "{} vs {predicted}", d.value);
            }
        }
    }
}

#[test]
fn images_of_hugoniot_fronts_are_hugoniot_fronts() {
    let mut rng = ChaCha8Rng::seed_from_u64(24);
    for eos in gases() {
        for mach in MACHS {
            let front = oracle_front(upstream(&eos), mach, &eos, 0.2, 1.1);
            for _ in 0..100 {
                let sl2 = random_sl2(&mut rng, front.t).oriented_on(front.t, front.t).unwrap();
                let image = transform_front(&GroupElement::from_sl2(sl2), &front, &eos).unwrap();
                for fam in standard(eos.dim()) {
                    let r = rh_residual_normalized(&image, fam, &eos).unwrap();
                    assert!(r.normalized.abs() < 1e-10, "{fam}: {r:?}");
                }
            }
        }
    }
}

#[test]
fn admissibility_and_entropy_jump_are_invariant() {
    let mut rng = ChaCha8Rng::seed_from_u64(25);
    for eos in gases() {
        let n = eos.dim() as i32;
        for mach in MACHS {
            let front = oracle_front(upstream(&eos), mach, &eos, -0.3, 0.9);
            let before = admissibility(&front, &eos);
            assert_eq!(before.verdict, Verdict::ShockAdmissible);
            for _ in 0..100 {
                let sl2 = random_sl2(&mut rng, front.t).oriented_on(front.t, front.t).unwrap();
                let tau = sl2.denominator(front.t);
                let image = transform_front(&GroupElement::from_sl2(sl2), &front, &eos).unwrap();
                let after = admissibility(&image, &eos);
                assert_eq!(after.verdict, before.verdict);
                assert!((after.delta_s - before.delta_s).abs() < 1e-12 * before.delta_s.abs().max(1.0));
                for (a, b) in [(&front.left, &image.left), (&front.right, &image.right)] {
                    assert!((eos.chi(a) - eos.chi(b)).abs() < 1e-13 * eos.chi(a));
                }
                for side in [Side::Left, Side::Right] {
                    let expected = tau.powi(n + 1) * front.mass_flux(side);
                    assert!((image.mass_flux(side) - expected).abs() < 1e-12 * expected.abs());
                }
            }
        }
    }
}

#[test]
fn mirrored_fronts_are_inadmissible() {
    for eos in gases() {
        for mach in MACHS {
            let front = oracle_front(upstream(&eos), mach, &eos, 0.0, 1.0);
            let mirror = front.mirrored();
            // the conditions are symmetric in the sides, the entropy jump is not
            for fam in standard(eos.dim()) {
                assert!(rh_residual_normalized(&mirror, fam, &eos).unwrap().normalized.abs() < 1e-12);
            }
            let a = admissibility(&mirror, &eos);
            assert_eq!(a.verdict, Verdict::ShockInadmissible);
            assert!(!a.entropy_ok && a.delta_s < 0.0);
        }
    }
}

#[test]
fn galilean_images_keep_the_conditions() {
    let eos = Polytrope::new(3.0, 1).unwrap();
    let front = oracle_front(upstream(&eos), 2.0, &eos, 0.5, 1.0);
    let g = GroupElement::from_galilei(shockdual::GalileiElement::boost(Vec3::new(1.7, 0.0, 0.0)));
    let image = transform_front(&g, &front, &eos).unwrap();
    assert!((image.s - front.s - 1.7).abs() < 1e-14);
    for fam in standard(1) {
        assert!(rh_residual(&image, fam, &eos).unwrap().abs() < 1e-12);
    }
}
