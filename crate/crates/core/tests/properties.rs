use proptest::prelude::*;

use knot_energy::energies::{alignment_bound, alignment_defect, energy_report};
use knot_energy::inscribe::gromov_distortion;
use knot_energy::mobius::SphereInversion;
use knot_energy::polygon::{discrete_energy, polygon_arc_distance};
use knot_energy::{ClosedCurve32, CurveFamily, Polygon64, QuadratureSpec};

fn rotation(theta: f64) -> [f64; 4] {
    [theta.cos(), -theta.sin(), theta.sin(), theta.cos()]
}

/// Regular `m`-gon with every vertex pushed radially by up to 10%.
fn wobbly_polygon(bumps: &[f64]) -> Polygon64 {
    let m = bumps.len();
    let mut v = Vec::with_capacity(2 * m);
    let mut params = Vec::with_capacity(m);
    for (i, b) in bumps.iter().enumerate() {
        let a = std::f64::consts::TAU * i as f64 / m as f64;
        v.extend_from_slice(&[(1.0 + b) * a.cos(), (1.0 + b) * a.sin()]);
        params.push(i as f64 / m as f64);
    }
    Polygon64::new(v, params, 2).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn alignment_defect_is_bounded(
        a in prop::collection::vec(-3.0..3.0f64, 3),
        b in prop::collection::vec(-3.0..3.0f64, 3),
    ) {
        let na: f64 = a.iter().map(|x| x * x).sum::<f64>().sqrt();
        prop_assume!(na > 1e-3);
        let d = alignment_defect(&a, &b);
        prop_assert!(d >= -1e-12);
        prop_assert!(d <= alignment_bound(&a, &b) + 1e-12);
    }

    #[test]
    fn arc_distance_is_a_metric(x in 0.0..1.0f64, y in 0.0..1.0f64, z in 0.0..1.0f64, b in 0.3..1.0f64) {
        let c = CurveFamily::Ellipse { a: 1.0, b }.sample::<f64>(128).unwrap();
        let (xy, yz, xz) = (c.arc_distance(x, y), c.arc_distance(y, z), c.arc_distance(x, z));
        prop_assert!(xz <= xy + yz + 1e-12);
        prop_assert!((xy - c.arc_distance(y, x)).abs() < 1e-12);
        prop_assert!(xy <= c.length() / 2.0 + 1e-12);
    }

    #[test]
    fn energies_ignore_similarities(
        b in 0.4..1.0f64,
        theta in 0.0..6.3f64,
        scale in 0.2..5.0f64,
        sx in -3.0..3.0f64,
        sy in -3.0..3.0f64,
    ) {
        let spec = QuadratureSpec::square(64).unwrap();
        let c = CurveFamily::Ellipse { a: 1.0, b }.sample::<f64>(64).unwrap();
        let moved = c.transformed(scale, Some(&rotation(theta)), Some(&[sx, sy])).unwrap();
        let (r0, r1) = (energy_report(&c, &spec).unwrap(), energy_report(&moved, &spec).unwrap());
        prop_assert!((r0.e_mobius - r1.e_mobius).abs() < 1e-9);
        prop_assert!((r0.e1 - r1.e1).abs() < 1e-9);
        prop_assert!((r0.e2 - r1.e2).abs() < 1e-9);
    }

    #[test]
    fn discrete_energy_symmetries(
        bumps in prop::collection::vec(-0.1..0.1f64, 5..12),
        theta in 0.0..6.3f64,
        scale in 0.2..5.0f64,
    ) {
        let p = wobbly_polygon(&bumps);
        let e = discrete_energy(&p).unwrap();
        prop_assert!(e >= -1e-12);
        let moved = p.transformed(scale, Some(&rotation(theta)), Some(&[1.0, -2.0])).unwrap();
        prop_assert!((discrete_energy(&moved).unwrap() - e).abs() < 1e-9 * e.max(1.0));
        // relabeling from the next vertex gives the same polygon
        let mut shifted = bumps.clone();
        shifted.rotate_left(1);
        let q = wobbly_polygon(&shifted).transformed(1.0, Some(&rotation(std::f64::consts::TAU / bumps.len() as f64)), None).unwrap();
        prop_assert!((discrete_energy(&q).unwrap() - e).abs() < 1e-9 * e.max(1.0));
        for i in 0..p.len() {
            for j in 0..p.len() {
                let d = polygon_arc_distance(&p, i, j);
                prop_assert!((d - polygon_arc_distance(&p, j, i)).abs() < 1e-12);
            }
        }
        prop_assert!(gromov_distortion(&p).unwrap() >= 1.0 - 1e-12);
    }

    #[test]
    fn inversion_is_an_involution(
        x in prop::collection::vec(-5.0..5.0f64, 3),
        c in prop::collection::vec(-5.0..5.0f64, 3),
        r in 0.1..4.0f64,
    ) {
        let d: f64 = x.iter().zip(&c).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt();
        prop_assume!(d > 1e-2);
        let inv = SphereInversion::new(c, r).unwrap();
        let back = inv.apply(&inv.apply(&x).unwrap()).unwrap();
        for (a, b) in x.iter().zip(&back) {
            prop_assert!((a - b).abs() < 1e-9 * (1.0 + a.abs()));
        }
    }
}

#[test]
fn single_precision_smoke() {
    let c: ClosedCurve32 = CurveFamily::unit_circle().sample(128).unwrap();
    let r = energy_report(&c, &QuadratureSpec::square(128).unwrap()).unwrap();
    assert!((r.e_mobius - 4.0).abs() < 1e-2, "{}", r.e_mobius);
    assert!((r.e1 - 19.739_21).abs() < 1e-2);
    assert!(r.residual.abs() < 1e-2);
}

#[test]
fn near_minimal_e1_means_near_circle() {
    use knot_energy::mobius::circle_fit;
    let spec = QuadratureSpec::square(128).unwrap();
    let two_pi2 = 2.0 * std::f64::consts::PI.powi(2);
    let mut prev = (f64::INFINITY, f64::INFINITY);
    for b in [0.5, 0.8, 0.95, 0.99, 0.999] {
        let c = CurveFamily::Ellipse { a: 1.0, b }.sample::<f64>(128).unwrap();
        let excess = energy_report(&c, &spec).unwrap().e1 - two_pi2;
        let (_, _, residual) = circle_fit(c.samples()).unwrap();
        assert!(excess > 0.0 && excess < prev.0 && residual < prev.1);
        if excess <= 1e-2 {
            assert!(residual <= 1e-2, "b {b}: excess {excess} residual {residual}");
        }
        prev = (excess, residual);
    }
    assert!(prev.0 <= 1e-2);
}
