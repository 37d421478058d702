//! Closed forms and test-local quadratures checked against the library.

use std::f64::consts::{PI, TAU};

use knot_energy::energies::energy_report;
use knot_energy::mobius::{circle_fit, invert_closed, SphereInversion};
use knot_energy::polygon::discrete_energy;
use knot_energy::sobolev::{gagliardo_seminorm, PeriodicFunction};
use knot_energy::{CurveFamily, Polygon64, QuadratureSpec};

/// `Si(pi)` to 50 digits.
const SI_PI: f64 = 1.851_937_051_982_466_170_361_053_370_157_991_363_345_809_728_981_154_9;
/// `8 (pi Si(pi) - 2)`.
const CIRCLE_GAGLIARDO_SQ: f64 = 30.544_254_699_350_838_055_6;

fn simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64) -> f64 {
    fn rec<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, fa: f64, fm: f64, fb: f64, whole: f64, tol: f64, depth: u32) -> f64 {
        let m = 0.5 * (a + b);
        let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
        let (flm, frm) = (f(lm), f(rm));
        let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
        let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
        if depth == 0 || (left + right - whole).abs() <= 15.0 * tol {
            return left + right + (left + right - whole) / 15.0;
        }
        rec(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1) + rec(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1)
    }
    let (fa, fb, fm) = (f(a), f(b), f(0.5 * (a + b)));
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    rec(f, a, b, fa, fm, fb, whole, tol, 40)
}

#[test]
fn constants_agree() {
    let series: f64 = (0..30)
        .map(|k| {
            let n = (2 * k + 1) as f64;
            let fact: f64 = (1..=2 * k + 1).map(|i| i as f64).product();
            (-1f64).powi(k) * PI.powf(n) / (n * fact)
        })
        .sum();
    assert!((series - SI_PI).abs() < 1e-14);
    assert!((8.0 * (PI * SI_PI - 2.0) - CIRCLE_GAGLIARDO_SQ).abs() < 1e-12);
    // 8 int_0^{1/2} sin^2(pi w) / w^2 dw, the velocity of the unit circle
    let integral = 8.0 * simpson(&|w: f64| if w == 0.0 { PI * PI } else { (PI * w).sin().powi(2) / (w * w) }, 0.0, 0.5, 1e-13);
    assert!((integral - CIRCLE_GAGLIARDO_SQ).abs() < 1e-10);
}

#[test]
fn circle_gagliardo_converges_to_closed_form() {
    let mut prev = f64::INFINITY;
    for n in [128, 256, 512, 1024] {
        let v = PeriodicFunction::velocity_of(&CurveFamily::unit_circle().sample::<f64>(n).unwrap());
        let g = gagliardo_seminorm(&v, 0.5, 2.0, n).unwrap();
        let err = (g.power() - CIRCLE_GAGLIARDO_SQ).abs();
        assert!(err < prev);
        // the excluded band can only add mass
        assert!(g.power() <= CIRCLE_GAGLIARDO_SQ);
        assert!((g.value + g.remainder_estimate).powi(2) >= CIRCLE_GAGLIARDO_SQ);
        prev = err;
    }
    assert!(prev / CIRCLE_GAGLIARDO_SQ < 2e-3);
}

struct Ellipse {
    a: f64,
    b: f64,
}

impl Ellipse {
    fn point(&self, t: f64) -> [f64; 2] {
        [self.a * (TAU * t).cos(), self.b * (TAU * t).sin()]
    }

    fn velocity(&self, t: f64) -> [f64; 2] {
        [-TAU * self.a * (TAU * t).sin(), TAU * self.b * (TAU * t).cos()]
    }

    fn speed(&self, t: f64) -> f64 {
        let v = self.velocity(t);
        v[0].hypot(v[1])
    }

    /// `kappa^2 |gamma'|^2`.
    fn k(&self, t: f64) -> f64 {
        let v = self.velocity(t);
        let acc = [-TAU * TAU * self.a * (TAU * t).cos(), -TAU * TAU * self.b * (TAU * t).sin()];
        let cross = v[0] * acc[1] - v[1] * acc[0];
        let s2 = v[0] * v[0] + v[1] * v[1];
        cross * cross / (s2 * s2)
    }
}

/// Tensor trapezoid of `(E_mob, E1, E2)` with analytic derivatives and arc
/// lengths from adaptive Simpson.
fn ellipse_energies(e: &Ellipse, n: usize) -> (f64, f64, f64) {
    let h = 1.0 / n as f64;
    let mut arc = vec![0.0; n + 1];
    for j in 0..n {
        arc[j + 1] = arc[j] + simpson(&|t| e.speed(t), j as f64 * h, (j + 1) as f64 * h, 1e-14);
    }
    let length = arc[n];
    let mut sums = (0.0, 0.0, 0.0);
    for i in 0..n {
        for j in 0..n {
            let (x, y) = (i as f64 * h, j as f64 * h);
            if i == j {
                let k = e.k(x);
                sums.0 += k / 12.0;
                sums.1 += k / 2.0;
                sums.2 -= k / 2.0;
                continue;
            }
            let (p, q) = (e.point(x), e.point(y));
            let c = [q[0] - p[0], q[1] - p[1]];
            let c2 = c[0] * c[0] + c[1] * c[1];
            let (sx, sy) = (e.speed(x), e.speed(y));
            let (vx, vy) = (e.velocity(x), e.velocity(y));
            let tx = [vx[0] / sx, vx[1] / sx];
            let ty = [vy[0] / sy, vy[1] / sy];
            let da = (arc[i] - arc[j]).abs();
            let d = da.min(length - da);
            sums.0 += (1.0 / c2 - 1.0 / (d * d)) * sx * sy;
            sums.1 += ((tx[0] - ty[0]).powi(2) + (tx[1] - ty[1]).powi(2)) / (2.0 * c2) * sx * sy;
            // in the plane the part of t orthogonal to the chord is its 2d cross product
            let cn = c2.sqrt();
            let px = (tx[0] * c[1] - tx[1] * c[0]) / cn;
            let py = (ty[0] * c[1] - ty[1] * c[0]) / cn;
            sums.2 += 2.0 * px * py / c2 * sx * sy;
        }
    }
    (sums.0 * h * h, sums.1 * h * h, sums.2 * h * h)
}

#[test]
fn ellipse_energies_match_independent_quadrature() {
    let e = Ellipse { a: 2.0, b: 1.0 };
    let (mob, e1, e2) = ellipse_energies(&e, 256);
    let curve = CurveFamily::Ellipse { a: 2.0, b: 1.0 }.sample::<f64>(512).unwrap();
    let r = energy_report(&curve, &QuadratureSpec::square(512).unwrap()).unwrap();
    // E1 and E2 are smooth periodic integrals: both rules are spectrally accurate
    assert!((r.e1 - e1).abs() < 1e-8, "{} vs {e1}", r.e1);
    assert!((r.e2 - e2).abs() < 1e-8, "{} vs {e2}", r.e2);
    // the arc distance has a kink at the antipode
    assert!((r.e_mobius - mob).abs() < 1e-4, "{} vs {mob}", r.e_mobius);
    assert!((mob - e1 - e2 - 4.0).abs() < 1e-3);
}

#[test]
fn circle_energies_closed_form() {
    let curve = CurveFamily::Circle { radius: 3.0 }.sample::<f64>(256).unwrap();
    let r = energy_report(&curve, &QuadratureSpec::square(256).unwrap()).unwrap();
    assert!((r.e1 - 2.0 * PI * PI).abs() < 1e-10);
    assert!((r.e2 + 2.0 * PI * PI).abs() < 1e-10);
    assert!((r.e_mobius - 4.0).abs() < 1e-4);
}

#[test]
fn hand_evaluated_polygons() {
    // unit-perimeter square: only the 4 ordered opposite pairs count, each
    // (1/c^2 - 1/d^2) / 16 = (8 - 4) / 16
    let e4 = discrete_energy(&Polygon64::regular(4).unwrap()).unwrap();
    assert!((e4 - 1.0).abs() < 1e-12);
    let e3 = discrete_energy(&Polygon64::regular(3).unwrap()).unwrap();
    assert!(e3.abs() < 1e-12);
}

#[test]
fn inverted_circle_is_the_predicted_circle() {
    let (rho, origin) = (0.7, [0.3, -0.2]);
    let curve = CurveFamily::Circle { radius: rho }
        .sample::<f64>(128)
        .unwrap()
        .transformed(1.0, None, Some(&origin))
        .unwrap();
    let (center, r) = ([2.0, 1.0], 1.5);
    let image = invert_closed(&curve, &SphereInversion::new(center.to_vec(), r).unwrap()).unwrap();
    let (fit_center, fit_radius, residual) = circle_fit(image.samples()).unwrap();
    let delta = [origin[0] - center[0], origin[1] - center[1]];
    let d2 = delta[0] * delta[0] + delta[1] * delta[1];
    let k = r * r / (d2 - rho * rho);
    assert!(residual < 1e-10);
    assert!((fit_radius - k.abs() * rho).abs() < 1e-10);
    assert!((fit_center[0] - (center[0] + k * delta[0])).abs() < 1e-10);
    assert!((fit_center[1] - (center[1] + k * delta[1])).abs() < 1e-10);
}
