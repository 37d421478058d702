//! Sphere inversions and image curves.

use crate::curve::{ClosedCurve, CurveSource, OpenCurve, ParamPoint, NEAR_DEGENERATE_TOL};
use crate::error::{Error, Result};
use crate::quad::integrate;
use crate::scalar::{vec, Real};

/// Points closer than this to the center are rejected by [`SphereInversion::apply`].
pub const CENTER_HIT_TOL: f64 = 1e-12;
/// Closed inversions need the center at least this many sample spacings away.
pub const CLOSED_CLEARANCE: f64 = 10.0;
/// Parameter cells around the center that an open image may not use.
pub const EXCLUDED_CELLS: f64 = 2.0;

/// `x -> c + r^2 (x - c) / |x - c|^2`.
#[derive(Clone, Debug, PartialEq)]
pub struct SphereInversion<T> {
    center: Vec<T>,
    radius: T,
}

impl<T: Real> SphereInversion<T> {
    pub fn new(center: Vec<T>, radius: T) -> Result<Self> {
        if !(radius > T::zero()) || !radius.is_finite() {
            return Err(Error::InvalidArgument(format!("inversion radius {radius} must be positive")));
        }
        if center.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidArgument("non-finite inversion center".into()));
        }
        Ok(Self { center, radius })
    }

    pub fn center(&self) -> &[T] {
        &self.center
    }

    pub fn radius(&self) -> T {
        self.radius
    }

    pub fn apply(&self, x: &[T]) -> Result<Vec<T>> {
        let mut out = vec![T::zero(); x.len()];
        self.apply_into(x, &mut out)?;
        Ok(out)
    }

    pub fn apply_into(&self, x: &[T], out: &mut [T]) -> Result<()> {
        if x.len() != self.center.len() {
            return Err(Error::DimensionMismatch {
                left: x.len(),
                right: self.center.len(),
            });
        }
        let q = vec::dist_sq(x, &self.center);
        if q.sqrt() < T::lit(CENTER_HIT_TOL) {
            return Err(Error::CenterHit);
        }
        let f = self.radius * self.radius / q;
        for k in 0..x.len() {
            out[k] = self.center[k] + f * (x[k] - self.center[k]);
        }
        Ok(())
    }
}

/// Image of a closed curve under an inversion whose center stays clear of it.
pub fn invert_closed<T: Real>(curve: &ClosedCurve<T>, inv: &SphereInversion<T>) -> Result<ClosedCurve<T>> {
    let dim = curve.dim();
    if inv.center.len() != dim {
        return Err(Error::DimensionMismatch {
            left: dim,
            right: inv.center.len(),
        });
    }
    let n = curve.len();
    let required = T::lit(CLOSED_CLEARANCE) * curve.length() / T::from_count(n);
    let distance = (0..n)
        .map(|j| vec::dist(curve.node(j), &inv.center))
        .fold(T::infinity(), T::min);
    if distance < required {
        return Err(Error::CenterTooClose {
            distance: distance.as_f64(),
            required: required.as_f64(),
        });
    }
    let mut samples = vec![T::zero(); n * dim];
    for j in 0..n {
        inv.apply_into(curve.node(j), &mut samples[j * dim..(j + 1) * dim])?;
    }
    let image = ClosedCurve::from_samples(samples, dim, CurveSource::Derived("inverted".into()))?;
    image.check_regular()?;
    let report = image.chord_arc_report(n.min(512))?;
    if report.bilipschitz_constant <= T::lit(NEAR_DEGENERATE_TOL) {
        return Err(Error::NonEmbedded {
            bilipschitz: report.bilipschitz_constant.as_f64(),
            threshold: NEAR_DEGENERATE_TOL,
        });
    }
    Ok(image)
}

struct Local<T> {
    p: Vec<T>,
    v: Vec<T>,
    a: Vec<T>,
}

fn local<T: Real>(curve: &ClosedCurve<T>, t: T) -> Local<T> {
    let d = curve.dim();
    let mut l = Local {
        p: vec![T::zero(); d],
        v: vec![T::zero(); d],
        a: vec![T::zero(); d],
    };
    curve.eval_into(t, &mut l.p);
    curve.derivative_into(t, 1, &mut l.v);
    curve.derivative_into(t, 2, &mut l.a);
    l
}

/// Image of `curve` under the inversion centered at `gamma(t0)` with radius
/// `radius`, reparametrized by arc length on `[-half_width, half_width]` with
/// the image of `gamma(t0 + 1/2)` at 0. `samples` is rounded up to odd.
pub fn invert_centered_on_curve<T: Real>(
    curve: &ClosedCurve<T>,
    t0: ParamPoint<T>,
    radius: T,
    half_width: T,
    samples: usize,
) -> Result<OpenCurve<T>> {
    curve.check_regular()?;
    if !(half_width > T::zero()) {
        return Err(Error::InvalidArgument(format!("half-width {half_width} must be positive")));
    }
    if samples < 3 {
        return Err(Error::InvalidArgument(format!("need at least 3 samples, got {samples}")));
    }
    let m = samples | 1;
    let dim = curve.dim();
    let t0 = t0.get();
    let center = curve.evaluate(ParamPoint::new(t0));
    let inv = SphereInversion::new(center.clone(), radius)?;
    let r2 = radius * radius;

    let speed = |t: T| -> T {
        let mut p = vec![T::zero(); dim];
        let mut v = vec![T::zero(); dim];
        curve.eval_into(t, &mut p);
        curve.derivative_into(t, 1, &mut v);
        r2 * vec::norm(&v) / vec::dist_sq(&p, &center)
    };
    let tol = T::lit(1e-13) * (T::one() + half_width);
    let arc = |a: T, b: T| integrate(&speed, a, b, tol, 4);

    let ta = t0 + T::lit(0.5);
    let excluded = T::lit(EXCLUDED_CELLS) / T::from_count(curve.len());
    let hi_end = t0 + T::one() - excluded;
    let lo_end = t0 + excluded;
    let reach_hi = arc(ta, hi_end);
    let reach_lo = arc(lo_end, ta);
    if reach_hi < half_width || reach_lo < half_width {
        // distance from t0 at which the window would close, for the report
        let needed = {
            let (mut near, mut far) = (T::lit(1e-14), excluded);
            let coarse = T::lit(1e-3) * half_width;
            let reach = |delta: T| {
                let hi = reach_hi + integrate(&speed, hi_end, t0 + T::one() - delta, coarse, 4);
                let lo = reach_lo + integrate(&speed, t0 + delta, lo_end, coarse, 4);
                hi.min(lo)
            };
            while far / near > T::lit(1.01) {
                let mid = (near * far).sqrt();
                if reach(mid) >= half_width {
                    near = mid;
                } else {
                    far = mid;
                }
            }
            near
        };
        return Err(Error::DomainTooLarge {
            half_width: half_width.as_f64(),
            needed: needed.as_f64(),
            excluded: excluded.as_f64(),
        });
    }

    let mid = (m - 1) / 2;
    let h = T::lit(2.0) * half_width / T::from_count(m - 1);
    let mut params = vec![ta; m];
    // forward half; the backward half is the same solve with `direction = -1`
    for direction in [1i32, -1] {
        let sign = T::from_i32(direction).unwrap();
        let (mut t, mut s) = (ta, T::zero());
        let far_end = if direction > 0 { hi_end } else { lo_end };
        for step in 1..=mid {
            let target = h * T::from_count(step);
            let (mut lo, mut hi) = (t, far_end);
            for _ in 0..100 {
                let f = s - target;
                if f.abs() <= tol * T::lit(10.0) {
                    break;
                }
                if f < T::zero() {
                    lo = t;
                } else {
                    hi = t;
                }
                let mut next = t - sign * f / speed(t);
                let inside = if direction > 0 { next > lo && next < hi } else { next < lo && next > hi };
                if !inside {
                    next = T::lit(0.5) * (lo + hi);
                }
                let ds = if direction > 0 { arc(t, next) } else { arc(next, t) };
                s = s + ds;
                t = next;
            }
            let idx = if direction > 0 { mid + step } else { mid - step };
            params[idx] = t;
        }
    }

    let mut positions = vec![T::zero(); m * dim];
    let mut tangents = vec![T::zero(); m * dim];
    let mut curvature_sq = vec![T::zero(); m];
    let mut d1 = vec![T::zero(); dim];
    let mut d2 = vec![T::zero(); dim];
    for (i, &t) in params.iter().enumerate() {
        let l = local(curve, t);
        inv.apply_into(&l.p, &mut positions[i * dim..(i + 1) * dim])?;
        image_derivatives(&l, &center, r2, &mut d1, &mut d2);
        let sp = vec::norm(&d1);
        for k in 0..dim {
            tangents[i * dim + k] = d1[k] / sp;
        }
        curvature_sq[i] = vec::wedge_sq(&d1, &d2) / (sp * sp * sp * sp * sp * sp);
    }
    OpenCurve::new(dim, half_width, positions, tangents, curvature_sq)
}

/// First and second parameter derivatives of `c + r^2 (gamma - c) / |gamma - c|^2`.
fn image_derivatives<T: Real>(l: &Local<T>, center: &[T], r2: T, d1: &mut [T], d2: &mut [T]) {
    let dim = center.len();
    let d: Vec<T> = (0..dim).map(|k| l.p[k] - center[k]).collect();
    let q = vec::norm_sq(&d);
    let dv = vec::dot(&d, &l.v);
    let vv = vec::norm_sq(&l.v);
    let da = vec::dot(&d, &l.a);
    let two = T::lit(2.0);
    for k in 0..dim {
        d1[k] = r2 * (l.v[k] / q - two * d[k] * dv / (q * q));
        d2[k] = r2
            * (l.a[k] / q - T::lit(4.0) * l.v[k] * dv / (q * q) - two * d[k] * (vv + da) / (q * q)
                + T::lit(8.0) * d[k] * dv * dv / (q * q * q));
    }
}

/// Largest distance of the points from the line through the two extreme
/// ones, relative to their separation.
pub fn collinearity_residual<T: Real>(points: &[T], dim: usize) -> T {
    let m = points.len() / dim;
    if m < 3 {
        return T::zero();
    }
    let a = &points[..dim];
    let b = &points[(m - 1) * dim..];
    let span = vec::dist(a, b);
    let u: Vec<T> = (0..dim).map(|k| (b[k] - a[k]) / span).collect();
    let mut worst = T::zero();
    for p in points.chunks_exact(dim) {
        let w: Vec<T> = (0..dim).map(|k| p[k] - a[k]).collect();
        let along = vec::dot(&w, &u);
        let off = (0..dim).map(|k| (w[k] - along * u[k]).powi(2)).fold(T::zero(), |s, x| s + x);
        worst = worst.max(off.sqrt());
    }
    worst / span
}

/// Algebraic (Kasa) circle fit of planar points. Returns the center, the
/// radius and the largest `| |p - center| - radius | / radius`.
pub fn circle_fit<T: Real>(points: &[T]) -> Result<([T; 2], T, T)> {
    if points.len() % 2 != 0 {
        return Err(Error::DimensionMismatch {
            left: points.len() % 2,
            right: 0,
        });
    }
    let m = points.len() / 2;
    if m < 3 {
        return Err(Error::InvalidArgument("circle fit needs 3 points".into()));
    }
    // centered coordinates keep the normal equations well conditioned
    let (mut mx, mut my) = (T::zero(), T::zero());
    for p in points.chunks_exact(2) {
        mx = mx + p[0];
        my = my + p[1];
    }
    mx = mx / T::from_count(m);
    my = my / T::from_count(m);
    // minimize sum (x^2 + y^2 + D x + E y + F)^2
    let mut a = [[T::zero(); 3]; 3];
    let mut rhs = [T::zero(); 3];
    for p in points.chunks_exact(2) {
        let (x, y) = (p[0] - mx, p[1] - my);
        let row = [x, y, T::one()];
        let z = -(x * x + y * y);
        for i in 0..3 {
            for j in 0..3 {
                a[i][j] = a[i][j] + row[i] * row[j];
            }
            rhs[i] = rhs[i] + row[i] * z;
        }
    }
    let det3 = |m: &[[T; 3]; 3]| {
        m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
    };
    let det = det3(&a);
    if det.abs() <= T::min_positive_value() {
        return Err(Error::InvalidArgument("degenerate circle fit".into()));
    }
    let mut sol = [T::zero(); 3];
    for c in 0..3 {
        let mut mc = a;
        for r in 0..3 {
            mc[r][c] = rhs[r];
        }
        sol[c] = det3(&mc) / det;
    }
    let (cx, cy) = (-sol[0] / T::lit(2.0), -sol[1] / T::lit(2.0));
    let radius = (cx * cx + cy * cy - sol[2]).sqrt();
    let mut worst = T::zero();
    for p in points.chunks_exact(2) {
        let dist = ((p[0] - mx - cx).powi(2) + (p[1] - my - cy).powi(2)).sqrt();
        worst = worst.max((dist - radius).abs() / radius);
    }
    Ok(([cx + mx, cy + my], radius, worst))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curve::CurveFamily;

    #[test]
    fn apply_closed_forms() {
        let inv = SphereInversion::new(vec![0.0f64, 0.0], 1.0).unwrap();
        assert_eq!(inv.apply(&[2.0, 0.0]).unwrap(), vec![0.5, 0.0]);
        let on = [0.6, 0.8];
        let img = inv.apply(&on).unwrap();
        assert!(vec::dist(&img, &on) < 1e-15);
        assert!(matches!(inv.apply(&[0.0, 0.0]), Err(Error::CenterHit)));
        assert!(SphereInversion::new(vec![0.0f64], 0.0).is_err());
    }

    #[test]
    fn off_center_circle_stays_circle() {
        let c = CurveFamily::unit_circle().sample::<f64>(256).unwrap();
        let inv = SphereInversion::new(vec![0.5, 0.1], 0.4).unwrap();
        let img = invert_closed(&c, &inv).unwrap();
        let (_, _, res) = circle_fit(img.samples()).unwrap();
        assert!(res < 1e-8, "{res}");
    }

    #[test]
    fn center_near_curve_is_rejected() {
        let c = CurveFamily::unit_circle().sample::<f64>(64).unwrap();
        let r = 1.0 / std::f64::consts::TAU;
        let inv = SphereInversion::new(vec![r * 1.01, 0.0], 0.4).unwrap();
        assert!(matches!(invert_closed(&c, &inv), Err(Error::CenterTooClose { .. })));
    }

    #[test]
    fn circle_through_center_becomes_line() {
        let c = CurveFamily::unit_circle().sample::<f64>(256).unwrap();
        let open = invert_centered_on_curve(&c, ParamPoint::new(0.0), 0.2, 2.0, 201).unwrap();
        let pts: Vec<f64> = (0..open.len()).flat_map(|i| open.point(i).to_vec()).collect();
        assert!(collinearity_residual(&pts, 2) < 1e-8);
        assert!(open.arclength_defect() < 1e-9, "{}", open.arclength_defect());
        assert!((0..open.len()).all(|i| open.curvature_sq(i) < 1e-12));
        // the antipode lands at parameter 0
        let ap = inv_point(&c, 0.2);
        assert!(vec::dist(open.point(100), &ap) < 1e-12);
    }

    fn inv_point(c: &ClosedCurve<f64>, r: f64) -> Vec<f64> {
        let inv = SphereInversion::new(c.evaluate(ParamPoint::new(0.0)), r).unwrap();
        inv.apply(&c.evaluate(ParamPoint::new(0.5))).unwrap()
    }

    #[test]
    fn window_past_the_excluded_zone_fails() {
        let c = CurveFamily::unit_circle().sample::<f64>(64).unwrap();
        let err = invert_centered_on_curve(&c, ParamPoint::new(0.0), 0.2, 1e6, 101).unwrap_err();
        assert!(matches!(err, Error::DomainTooLarge { .. }));
    }
}
