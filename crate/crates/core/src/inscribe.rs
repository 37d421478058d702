//! Inscribed equilateral polygons by greedy chord marching and shooting on
//! the side length.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::curve::{ClosedCurve, ParamPoint};
use crate::error::{Error, Result};
use crate::polygon::{polygon_arc_distance, Polygon};
use crate::scalar::{vec, Real};

/// Side lengths probed when bracketing the closing gap.
pub const SCAN_POINTS: usize = 256;
/// Largest scan step as a fraction of `side / max_speed`.
const MIN_STEP_FRACTION: f64 = 1.0 / 64.0;

#[derive(Clone, Debug, PartialEq)]
pub struct March<T> {
    /// Lifted parameters `x0 <= t_0 < t_1 < ... < x0 + 1`.
    pub params: Vec<T>,
    pub points: Vec<T>,
    /// `|gamma(t_{n-1}) - gamma(x0)| - side`.
    pub closing_gap: T,
}

fn chord_from<T: Real>(curve: &ClosedCurve<T>, from: &[T], t: T, buf: &mut [T]) -> T {
    curve.eval_into(t, buf);
    vec::dist(from, buf)
}

/// Walks `n - 1` chords of length `side` forward from `gamma(x0)`, each time
/// taking the first parameter at which the chord reaches `side`.
pub fn march<T: Real>(curve: &ClosedCurve<T>, x0: ParamPoint<T>, side: T, n: usize) -> Result<March<T>> {
    if n < 2 {
        return Err(Error::InvalidArgument(format!("need n >= 2, got {n}")));
    }
    if !(side > T::zero()) {
        return Err(Error::InvalidArgument(format!("side {side} must be positive")));
    }
    let dim = curve.dim();
    let vmax = curve.max_speed();
    let min_step = side / vmax * T::lit(MIN_STEP_FRACTION);
    let start = x0.get();
    let end = start + T::one();
    let mut buf = vec![T::zero(); dim];
    let mut params = vec![start];
    let mut points = curve.evaluate(x0);
    let mut t = start;
    for step in 1..n {
        let from = points[(step - 1) * dim..step * dim].to_vec();
        // advance by a step that cannot jump over the first crossing
        let mut lo = t;
        let mut c = T::zero();
        let hi = loop {
            let next = lo + ((side - c) / vmax).max(min_step);
            if next >= end {
                return Err(Error::NoForwardIntersection {
                    side: side.as_f64(),
                    step,
                });
            }
            let cn = chord_from(curve, &from, next, &mut buf);
            if cn >= side {
                break next;
            }
            lo = next;
            c = cn;
        };
        let (mut a, mut b) = (lo, hi);
        while b - a > T::epsilon() * T::lit(4.0) * b.abs().max(T::one()) {
            let mid = T::lit(0.5) * (a + b);
            if mid <= a || mid >= b {
                break;
            }
            if chord_from(curve, &from, mid, &mut buf) >= side {
                b = mid;
            } else {
                a = mid;
            }
        }
        // the endpoint whose chord is closer to `side`
        let ca = chord_from(curve, &from, a, &mut buf);
        let cb = chord_from(curve, &from, b, &mut buf);
        t = if (ca - side).abs() < (cb - side).abs() { a } else { b };
        params.push(t);
        curve.eval_into(t, &mut buf);
        points.extend_from_slice(&buf);
    }
    let last = &points[(n - 1) * dim..];
    let closing_gap = vec::dist(last, &points[..dim]) - side;
    Ok(March {
        params,
        points,
        closing_gap,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct InscribedResult<T> {
    pub polygon: Polygon<T>,
    pub side: T,
    /// `|closing chord - side|`.
    pub closing_residual: T,
    /// Bisection steps on the side length.
    pub iterations: usize,
    /// Every side-length interval on which the closing gap changed sign.
    pub brackets: Vec<(T, T)>,
}

impl<T: Real> InscribedResult<T> {
    /// `(max - min) / mean` over all `n` chords including the closing one.
    pub fn chord_spread(&self) -> T {
        let p = &self.polygon;
        let (lo, hi, sum) = p
            .edges()
            .iter()
            .fold((T::infinity(), T::zero(), T::zero()), |(lo, hi, s), &e| (lo.min(e), hi.max(e), s + e));
        (hi - lo) / (sum / T::from_count(p.len()))
    }
}

/// Maximal chord of the curve over its nodes.
pub fn diameter<T: Real>(curve: &ClosedCurve<T>) -> T {
    let n = curve.len();
    let mut best = T::zero();
    for i in 0..n {
        for j in i + 1..n {
            best = best.max(vec::dist(curve.node(i), curve.node(j)));
        }
    }
    best
}

fn polygon_from_march<T: Real>(curve: &ClosedCurve<T>, m: &March<T>) -> Result<Polygon<T>> {
    // canonical parameters in [0, 1), rotated so they increase
    let n = m.params.len();
    let dim = curve.dim();
    let canon: Vec<T> = m.params.iter().map(|&t| t - t.floor()).collect();
    let first = (0..n).min_by(|&a, &b| canon[a].partial_cmp(&canon[b]).unwrap()).unwrap_or(0);
    let order: Vec<usize> = (0..n).map(|k| (first + k) % n).collect();
    let params = order.iter().map(|&k| canon[k]).collect();
    let vertices = order
        .iter()
        .flat_map(|&k| m.points[k * dim..(k + 1) * dim].iter().copied())
        .collect();
    Polygon::new(vertices, params, dim)
}

fn digon<T: Real>(curve: &ClosedCurve<T>, x0: ParamPoint<T>) -> Result<InscribedResult<T>> {
    let dim = curve.dim();
    let p0 = curve.evaluate(x0);
    let start = x0.get();
    let mut buf = vec![T::zero(); dim];
    let mut chord = |t: T| chord_from(curve, &p0, t, &mut buf);
    let n = curve.len().max(64);
    let (mut best_t, mut best) = (start, T::zero());
    for k in 1..n {
        let t = start + T::from_count(k) / T::from_count(n);
        let c = chord(t);
        if c > best {
            best = c;
            best_t = t;
        }
    }
    // golden-section refinement of the farthest point
    let g = T::lit(0.5 * (5f64.sqrt() - 1.0));
    let h = T::one() / T::from_count(n);
    let (mut a, mut b) = (best_t - h, best_t + h);
    let mut iterations = 0;
    while b - a > T::epsilon() * T::lit(8.0) {
        let x1 = b - g * (b - a);
        let x2 = a + g * (b - a);
        if chord(x1) > chord(x2) {
            b = x2;
        } else {
            a = x1;
        }
        iterations += 1;
    }
    let t = T::lit(0.5) * (a + b);
    let side = chord(t);
    let m = March {
        params: vec![start, t],
        points: [p0.clone(), curve.evaluate(ParamPoint::new(t))].concat(),
        closing_gap: T::zero(),
    };
    Ok(InscribedResult {
        polygon: polygon_from_march(curve, &m)?,
        side,
        closing_residual: T::zero(),
        iterations,
        brackets: vec![(side, side)],
    })
}

/// Equilateral `n`-gon inscribed in `curve` with first vertex `gamma(x0)`.
///
/// Side lengths are scanned on a log grid from `L / (4n)` to the diameter and
/// every sign change of the closing gap is bisected; the converged root with
/// the smallest residual is returned, all brackets are listed.
pub fn inscribed_ngon<T: Real>(curve: &ClosedCurve<T>, x0: ParamPoint<T>, n: usize) -> Result<InscribedResult<T>> {
    curve.check_regular()?;
    if n < 2 {
        return Err(Error::InvalidArgument(format!("need n >= 2, got {n}")));
    }
    if n == 2 {
        return digon(curve, x0);
    }
    let length = curve.length();
    let s_lo = length / T::from_count(4 * n);
    let s_hi = diameter(curve);
    let ratio = (s_hi / s_lo).ln();
    let scan: Vec<(T, Option<T>)> = (0..SCAN_POINTS)
        .map(|k| {
            let s = s_lo * (ratio * T::from_count(k) / T::from_count(SCAN_POINTS - 1)).exp();
            (s, march(curve, x0, s, n).ok().map(|m| m.closing_gap))
        })
        .collect();
    let mut brackets = Vec::new();
    for w in scan.windows(2) {
        if let ((a, Some(ga)), (b, Some(gb))) = (w[0], w[1]) {
            if ga == T::zero() || ga.signum() != gb.signum() {
                brackets.push((a, b, ga));
            }
        }
    }
    if brackets.is_empty() {
        return Err(Error::BracketNotFound { scanned: SCAN_POINTS });
    }
    let target = T::lit(1e-12) * length;
    let mut best: Option<(T, March<T>)> = None;
    let mut iterations = 0;
    for &(a0, b0, ga0) in &brackets {
        let (mut a, mut b, mut ga) = (a0, b0, ga0);
        let mut m = march(curve, x0, a, n)?;
        for _ in 0..200 {
            if m.closing_gap.abs() <= target || b - a <= T::epsilon() * b {
                break;
            }
            let mid = T::lit(0.5) * (a + b);
            m = march(curve, x0, mid, n)?;
            iterations += 1;
            if m.closing_gap.signum() == ga.signum() {
                a = mid;
                ga = m.closing_gap;
            } else {
                b = mid;
            }
        }
        if best.as_ref().is_none_or(|(g, _)| m.closing_gap.abs() < *g) {
            best = Some((m.closing_gap.abs(), m));
        }
    }
    let (mut residual, mut m) = best.expect("at least one bracket");
    if residual > target {
        // the bracket straddles a jump of the first-crossing rule; solve the
        // closed chord system directly, from the march and from an even start
        let starts = [
            (m.params.clone(), vec::dist(&m.points[..curve.dim()], &m.points[curve.dim()..2 * curve.dim()])),
            even_start(curve, x0, n)?,
        ];
        for (params, side) in starts {
            if let Some((polished, steps)) = polish(curve, &params, side) {
                iterations += steps;
                if polished.closing_gap.abs() < residual {
                    residual = polished.closing_gap.abs();
                    m = polished;
                }
            }
        }
    }
    let side = vec::dist(&m.points[..curve.dim()], &m.points[curve.dim()..2 * curve.dim()]);
    Ok(InscribedResult {
        polygon: polygon_from_march(curve, &m)?,
        side,
        closing_residual: residual,
        iterations,
        brackets: brackets.into_iter().map(|(a, b, _)| (a, b)).collect(),
    })
}

/// Parameters at equal arc length from `x0` and their mean chord.
fn even_start<T: Real>(curve: &ClosedCurve<T>, x0: ParamPoint<T>, n: usize) -> Result<(Vec<T>, T)> {
    let map = curve.arc_length_param()?;
    let start = x0.get();
    let s0 = map.eval(start);
    let targets: Vec<T> = (0..n)
        .map(|k| s0 + map.length() * T::from_count(k) / T::from_count(n))
        .collect();
    let params: Vec<T> = map.inverse_many(&targets);
    let mut lifted = vec![start];
    for &t in &params[1..] {
        let mut t = t;
        while t <= *lifted.last().unwrap() {
            t = t + T::one();
        }
        lifted.push(t);
    }
    let dim = curve.dim();
    let mut a = vec![T::zero(); dim];
    let mut b = vec![T::zero(); dim];
    let mut total = T::zero();
    for k in 0..n {
        curve.eval_into(lifted[k], &mut a);
        curve.eval_into(lifted[(k + 1) % n], &mut b);
        total = total + vec::dist(&a, &b);
    }
    Ok((lifted, total / T::from_count(n)))
}

/// Newton on `|gamma(t_k) - gamma(t_{k-1})| = s`, `k = 1..n`, with `t_0`
/// held fixed and `t_n = t_0 + 1`. Unknowns `t_1..t_{n-1}, s`.
fn polish<T: Real>(curve: &ClosedCurve<T>, params: &[T], side: T) -> Option<(March<T>, usize)> {
    let n = params.len();
    let dim = curve.dim();
    let t0 = params[0];
    let mut u: Vec<f64> = params[1..].iter().map(|t| t.as_f64()).collect();
    u.push(side.as_f64());
    let tol = 1e-14 * curve.length().as_f64();
    let eval = |t: f64, order: u32| -> Vec<f64> {
        let mut out = vec![T::zero(); dim];
        if order == 0 {
            curve.eval_into(T::lit(t), &mut out);
        } else {
            curve.derivative_into(T::lit(t), order, &mut out);
        }
        out.iter().map(|v| v.as_f64()).collect()
    };
    let t_of = |u: &[f64], k: usize| -> f64 {
        match k {
            0 => t0.as_f64(),
            k if k == n => t0.as_f64() + 1.0,
            k => u[k - 1],
        }
    };
    for step in 0..60 {
        let mut f = DVector::<f64>::zeros(n);
        let mut jac = DMatrix::<f64>::zeros(n, n);
        let s = u[n - 1];
        for k in 1..=n {
            let (ta, tb) = (t_of(&u, k - 1), t_of(&u, k));
            let (pa, pb) = (eval(ta, 0), eval(tb, 0));
            let c: Vec<f64> = (0..dim).map(|r| pb[r] - pa[r]).collect();
            let len = vec::norm(&c);
            f[k - 1] = len - s;
            let chat: Vec<f64> = c.iter().map(|v| v / len).collect();
            if k < n {
                jac[(k - 1, k - 1)] = vec::dot(&chat, &eval(tb, 1));
            }
            if k > 1 {
                jac[(k - 1, k - 2)] = -vec::dot(&chat, &eval(ta, 1));
            }
            jac[(k - 1, n - 1)] = -1.0;
        }
        if f.amax() <= tol {
            let ordered = (1..=n).all(|k| t_of(&u, k - 1) < t_of(&u, k));
            if !ordered || !(s > 0.0) {
                return None;
            }
            let lifted: Vec<T> = (0..n).map(|k| if k == 0 { t0 } else { T::lit(u[k - 1]) }).collect();
            let mut points = Vec::with_capacity(n * dim);
            let mut buf = vec![T::zero(); dim];
            for &t in &lifted {
                curve.eval_into(t, &mut buf);
                points.extend_from_slice(&buf);
            }
            let side = vec::dist(&points[..dim], &points[dim..2 * dim]);
            let closing_gap = vec::dist(&points[(n - 1) * dim..], &points[..dim]) - side;
            return Some((
                March {
                    params: lifted,
                    points,
                    closing_gap,
                },
                step,
            ));
        }
        let delta = jac.lu().solve(&f)?;
        for (x, d) in u.iter_mut().zip(delta.iter()) {
            *x -= d;
        }
    }
    None
}

/// `max_{i != j} d_p(i, j) / |p_i - p_j|`.
pub fn gromov_distortion<T: Real>(p: &Polygon<T>) -> Result<T> {
    let m = p.len();
    let mut worst = T::one();
    for i in 0..m {
        for j in i + 1..m {
            let c = vec::dist(p.vertex(i), p.vertex(j));
            if !(c > T::zero()) {
                return Err(Error::CoincidentVertices { i, j });
            }
            worst = worst.max(polygon_arc_distance(p, i, j) / c);
        }
    }
    Ok(worst)
}

#[derive(Clone, Debug, PartialEq)]
pub struct DistortionEstimate {
    pub n: usize,
    /// Smallest distortion met; an upper bound for the infimum `c_n`.
    pub min_distortion: f64,
    pub regular_distortion: f64,
    pub trials: usize,
    pub seed: u64,
}

/// Estimates the least Gromov distortion of equilateral `n`-gons in space by
/// randomized crankshaft moves (which keep every edge length) from the
/// regular `n`-gon, keeping moves that do not increase the distortion.
pub fn estimate_min_distortion(n: usize, trials: usize, seed: u64) -> Result<DistortionEstimate> {
    if n < 3 {
        return Err(Error::InvalidArgument(format!("need n >= 3, got {n}")));
    }
    let flat = Polygon::<f64>::regular(n)?;
    let params: Vec<f64> = flat.params().to_vec();
    let mut v: Vec<f64> = flat.vertices().chunks_exact(2).flat_map(|p| [p[0], p[1], 0.0]).collect();
    let regular = gromov_distortion(&flat)?;
    let mut best = regular;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut trial = v.clone();
    for _ in 0..trials {
        trial.copy_from_slice(&v);
        let i = rng.gen_range(0..n);
        let span = rng.gen_range(2..n.max(3));
        let j = (i + span.min(n - 1)) % n;
        crankshaft(&mut trial, i, j, rng.gen_range(-0.5..0.5));
        let Ok(p) = Polygon::new(trial.clone(), params.clone(), 3) else { continue };
        let Ok(d) = gromov_distortion(&p) else { continue };
        if d <= best {
            best = d;
            v.copy_from_slice(&trial);
        }
    }
    Ok(DistortionEstimate {
        n,
        min_distortion: best,
        regular_distortion: regular,
        trials,
        seed,
    })
}

/// Rotates the vertices strictly between `i` and `j` (cyclically) about the
/// axis through `v_i` and `v_j`.
fn crankshaft(v: &mut [f64], i: usize, j: usize, angle: f64) {
    let n = v.len() / 3;
    let a = [v[3 * i], v[3 * i + 1], v[3 * i + 2]];
    let b = [v[3 * j], v[3 * j + 1], v[3 * j + 2]];
    let axis = [b[0] - a[0], b[1] - a[1], b[2] - a[2]];
    let len = vec::norm(&axis);
    if len == 0.0 {
        return;
    }
    let k = axis.map(|x| x / len);
    let (s, c) = angle.sin_cos();
    let mut idx = (i + 1) % n;
    while idx != j {
        let p = [v[3 * idx] - a[0], v[3 * idx + 1] - a[1], v[3 * idx + 2] - a[2]];
        let kxp = [k[1] * p[2] - k[2] * p[1], k[2] * p[0] - k[0] * p[2], k[0] * p[1] - k[1] * p[0]];
        let kp = vec::dot(&k, &p);
        for r in 0..3 {
            // Rodrigues
            v[3 * idx + r] = a[r] + p[r] * c + kxp[r] * s + k[r] * kp * (1.0 - c);
        }
        idx = (idx + 1) % n;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curve::CurveFamily;
    use std::f64::consts::PI;

    fn circle() -> ClosedCurve<f64> {
        CurveFamily::unit_circle().sample::<f64>(128).unwrap()
    }

    #[test]
    fn march_on_circle() {
        let c = circle();
        let r = 1.0 / (2.0 * PI);
        let s = 2.0 * r * (PI / 5.0).sin();
        let m = march(&c, ParamPoint::new(0.0), s, 5).unwrap();
        assert!(m.closing_gap.abs() < 1e-10);
        assert!(march(&c, ParamPoint::new(0.0), s * 0.99, 5).unwrap().closing_gap > 0.0);
        assert!(march(&c, ParamPoint::new(0.0), s * 1.01, 5).unwrap().closing_gap < 0.0);
        let too_long = march(&c, ParamPoint::new(0.0), 2.0 * r * 1.0001, 3);
        assert!(matches!(too_long, Err(Error::NoForwardIntersection { .. })));
    }

    #[test]
    fn square_in_circle() {
        let res = inscribed_ngon(&circle(), ParamPoint::new(0.0), 4).unwrap();
        let side = 2f64.sqrt() / (2.0 * PI);
        assert!((res.side - side).abs() < 1e-9);
        assert!(res.closing_residual < 1e-9 * circle().length());
        assert_eq!(res.polygon.vertex(0), &[1.0 / (2.0 * PI), 0.0][..]);
    }

    #[test]
    fn digon_is_diameter() {
        let c = CurveFamily::Ellipse { a: 2.0, b: 1.0 }.sample::<f64>(128).unwrap();
        let res = inscribed_ngon(&c, ParamPoint::new(0.0), 2).unwrap();
        assert!((res.side - 4.0).abs() < 1e-9);
        let e = res.polygon.edges();
        assert!((e[0] - e[1]).abs() < 1e-15);
    }

    #[test]
    fn distortion_hand_values() {
        let sq = Polygon::<f64>::regular(4).unwrap();
        assert!((gromov_distortion(&sq).unwrap() - 2f64.sqrt()).abs() < 1e-12);
        let tri = Polygon::<f64>::regular(3).unwrap();
        assert!((gromov_distortion(&tri).unwrap() - 1.0).abs() < 1e-12);
        let mut last = 1.0;
        for n in [4usize, 8, 16, 64] {
            let d = gromov_distortion(&Polygon::<f64>::regular(n).unwrap()).unwrap();
            assert!(d > last && d < PI / 2.0);
            last = d;
        }
    }

    #[test]
    fn triangle_in_ellipse() {
        let c = CurveFamily::Ellipse { a: 2.0, b: 1.0 }.sample::<f64>(256).unwrap();
        for x0 in [0.0, 0.1, 0.55] {
            let res = inscribed_ngon(&c, ParamPoint::new(x0), 3).unwrap();
            assert!(res.chord_spread() <= 1e-8, "{}", res.chord_spread());
            assert!(res.closing_residual <= 1e-9 * c.length());
            let p0 = c.evaluate(ParamPoint::new(x0));
            assert!(res.polygon.vertices().chunks_exact(2).any(|v| v == &p0[..]));
        }
        // symmetric triangle through the end of the major axis
        let res = inscribed_ngon(&c, ParamPoint::new(0.0), 3).unwrap();
        let theta = 2.0 * (3f64.sqrt() / 2.0).atan();
        assert!((res.side - 2.0 * theta.sin()).abs() < 1e-9);
        let err = inscribed_ngon(&c, ParamPoint::new(0.35), 3).unwrap_err();
        assert!(matches!(err, Error::BracketNotFound { scanned: SCAN_POINTS }));
    }

    #[test]
    fn crankshaft_keeps_edges() {
        let p = Polygon::<f64>::regular(7).unwrap();
        let mut v: Vec<f64> = p.vertices().chunks_exact(2).flat_map(|q| [q[0], q[1], 0.0]).collect();
        crankshaft(&mut v, 1, 4, 0.7);
        let moved = Polygon::new(v, p.params().to_vec(), 3).unwrap();
        for (a, b) in moved.edges().iter().zip(p.edges()) {
            assert!((a - b).abs() < 1e-14);
        }

        let est = estimate_min_distortion(6, 200, 7).unwrap();
        assert!(est.min_distortion <= est.regular_distortion);
        assert!(est.min_distortion >= 1.0);
        let again = estimate_min_distortion(6, 200, 7).unwrap();
        assert_eq!(est, again);
    }
}
