//! Arc-length geometry: length, arc-length maps and reparametrization, and
//! chord/arc diagnostics.

use rayon::prelude::*;

use super::pchip::Pchip;
use super::{ClosedCurve, CurveSource};
use crate::error::{Error, Result};
use crate::scalar::{vec, Real};

/// Chord/arc constants at or below this value mark a nearly self-touching curve.
pub const NEAR_DEGENERATE_TOL: f64 = 1e-3;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum GeometryWarning {
    NearDegenerate { constant: f64 },
}

/// Chord/arc statistics over all pairs of a parameter grid.
#[derive(Clone, Debug, PartialEq)]
pub struct CurveGeometryReport<T> {
    pub length: T,
    /// `min |gamma(x) - gamma(y)| / d_gamma(x, y)` over distinct grid pairs.
    pub bilipschitz_constant: T,
    /// `1 / bilipschitz_constant`.
    pub max_distortion: T,
    /// `max |gamma(x) - gamma(y)| / d_gamma(x, y)`; never above 1 up to round-off.
    pub max_ratio: T,
    pub grid: usize,
    pub warning: Option<GeometryWarning>,
}

/// The cumulative arc length `s(t) = int_0^t |gamma'|` of a curve.
#[derive(Clone, Debug)]
pub struct ArcLengthMap<'a, T> {
    curve: &'a ClosedCurve<T>,
}

impl<'a, T: Real> ArcLengthMap<'a, T> {
    /// `s(t)` for `t` in `[0, 1]`; `s(0) = 0`, `s(1) = L`.
    pub fn eval(&self, t: T) -> T {
        if t >= T::one() {
            return self.curve.length() * t;
        }
        self.curve.arc_length_at(t)
    }

    pub fn length(&self) -> T {
        self.curve.length()
    }

    /// Node values `s(j / n)`, `j = 0..=n`.
    pub fn node_values(&self) -> Vec<T> {
        let n = self.curve.len();
        let mut v: Vec<T> = (0..n).map(|j| self.curve.node_arc(j)).collect();
        v.push(self.curve.length());
        v
    }

    /// Solves `s(t) = target` for each target in `[0, L]`: monotone cubic
    /// inverse of the node table, polished by Newton steps on the spectral `s`.
    pub fn inverse_many(&self, targets: &[T]) -> Vec<T> {
        let n = self.curve.len();
        let ts: Vec<T> = (0..=n).map(|j| T::from_count(j) / T::from_count(n)).collect();
        let seed = Pchip::new(self.node_values(), ts);
        let dim = self.curve.dim();
        let tol = T::epsilon() * T::lit(4.0);
        targets
            .par_iter()
            .map(|&target| {
                let mut t = seed.eval(target);
                let mut vel = vec![T::zero(); dim];
                for _ in 0..12 {
                    let s = self.curve.arc_length_at(t);
                    self.curve.derivative_into(t, 1, &mut vel);
                    let step = (s - target) / vec::norm(&vel);
                    t = t - step;
                    if step.abs() <= tol {
                        break;
                    }
                }
                t
            })
            .collect()
    }
}

impl<T: Real> ClosedCurve<T> {
    /// Cumulative arc-length map; fails for non-regular curves.
    pub fn arc_length_param(&self) -> Result<ArcLengthMap<'_, T>> {
        self.check_regular()?;
        let map = ArcLengthMap { curve: self };
        let nodes = map.node_values();
        if nodes.windows(2).any(|w| w[1] <= w[0]) {
            let s = self.speeds();
            return Err(Error::NonRegular {
                min_speed: self.min_speed().as_f64(),
                max_speed: s.iter().copied().fold(T::zero(), T::max).as_f64(),
            });
        }
        Ok(map)
    }

    /// Unit-length, unit-speed reparametrization `t -> gamma(s^{-1}(L t)) / L`,
    /// so the first sample is `gamma(0) / L`.
    pub fn reparametrize_by_arclength(&self) -> Result<Self> {
        let map = self.arc_length_param()?;
        let n = self.len();
        let dim = self.dim();
        let length = self.length();
        let targets: Vec<T> = (0..n)
            .map(|j| length * T::from_count(j) / T::from_count(n))
            .collect();
        let params = map.inverse_many(&targets);
        let mut samples = vec![T::zero(); n * dim];
        samples
            .par_chunks_exact_mut(dim)
            .zip(params.par_iter())
            .for_each(|(row, &t)| {
                self.eval_into(t, row);
                for v in row.iter_mut() {
                    *v = *v / length;
                }
            });
        let out = Self::from_samples(samples, dim, CurveSource::Derived("arc-length".into()))?;
        let dev = out.node_speed_deviation().max(T::epsilon());
        out.declare_unit_speed(dev)
    }

    /// Chord/arc ratios over all pairs of `grid` uniformly spaced parameters.
    pub fn chord_arc_report(&self, grid: usize) -> Result<CurveGeometryReport<T>> {
        if grid < 4 {
            return Err(Error::GridTooSmall { grid, min: 4 });
        }
        let dim = self.dim();
        let mut pts = vec![T::zero(); grid * dim];
        let mut arc = vec![T::zero(); grid];
        for i in 0..grid {
            let t = T::from_count(i) / T::from_count(grid);
            self.eval_into(t, &mut pts[i * dim..(i + 1) * dim]);
            arc[i] = self.arc_length_at(t);
        }
        let length = self.length();
        let (lo, hi) = (0..grid)
            .into_par_iter()
            .map(|i| {
                let mut lo = T::infinity();
                let mut hi = T::zero();
                let p = &pts[i * dim..(i + 1) * dim];
                for j in i + 1..grid {
                    let d = (arc[j] - arc[i]).abs();
                    let d = d.min(length - d);
                    if d <= T::zero() {
                        lo = T::zero();
                        continue;
                    }
                    let ratio = vec::dist(p, &pts[j * dim..(j + 1) * dim]) / d;
                    lo = lo.min(ratio);
                    hi = hi.max(ratio);
                }
                (lo, hi)
            })
            .reduce(|| (T::infinity(), T::zero()), |a, b| (a.0.min(b.0), a.1.max(b.1)));
        let warning = (lo <= T::lit(NEAR_DEGENERATE_TOL)).then(|| GeometryWarning::NearDegenerate {
            constant: lo.as_f64(),
        });
        Ok(CurveGeometryReport {
            length,
            bilipschitz_constant: lo,
            max_distortion: T::one() / lo,
            max_ratio: hi,
            grid,
            warning,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curve::{CurveFamily, ParamPoint};
    use std::f64::consts::{PI, TAU};

    #[test]
    fn circle_arc_map_is_identity() {
        let c = CurveFamily::unit_circle().sample::<f64>(64).unwrap();
        let m = c.arc_length_param().unwrap();
        for k in 0..=20 {
            let t = k as f64 / 20.0;
            assert!((m.eval(t) - t).abs() < 1e-10);
        }
    }

    #[test]
    fn constant_speed_doubled_circle() {
        // radius 1/pi traversed once has speed 2 and length 2
        let c = CurveFamily::Circle { radius: 1.0 / PI }.sample::<f64>(64).unwrap();
        let m = c.arc_length_param().unwrap();
        assert!((m.length() - 2.0).abs() < 1e-12);
        for k in 0..=10 {
            let t = k as f64 / 10.0;
            assert!((m.eval(t) - 2.0 * t).abs() < 1e-10);
        }
    }

    #[test]
    fn degenerate_curve_is_rejected() {
        // astroid: four cusps with zero speed
        let c = ClosedCurve::<f64>::from_fn(64, 2, CurveSource::Samples, |t, p| {
            p[0] = (TAU * t).cos().powi(3);
            p[1] = (TAU * t).sin().powi(3);
        })
        .unwrap();
        assert!(matches!(c.arc_length_param(), Err(Error::NonRegular { .. })));
        assert!(matches!(c.reparametrize_by_arclength(), Err(Error::NonRegular { .. })));
    }

    #[test]
    fn reparametrized_circle_is_identity() {
        let c = CurveFamily::unit_circle().sample::<f64>(128).unwrap();
        let r = c.reparametrize_by_arclength().unwrap();
        for j in 0..128 {
            assert!(vec::dist(c.node(j), r.node(j)) < 1e-9);
        }
    }

    #[test]
    fn reparametrization_fixes_start_point_scaled() {
        let e = CurveFamily::Ellipse { a: 2.0, b: 1.0 }.sample::<f64>(256).unwrap();
        let r = e.reparametrize_by_arclength().unwrap();
        let l = e.length();
        assert!((r.node(0)[0] - 2.0 / l).abs() < 1e-14);
        assert!(r.node(0)[1].abs() < 1e-14);
        let _ = ParamPoint::new(0.0);
    }

    #[test]
    fn circle_chord_arc_constant() {
        let c = CurveFamily::unit_circle().sample::<f64>(64).unwrap();
        let rep = c.chord_arc_report(128).unwrap();
        assert!((rep.bilipschitz_constant - 2.0 / PI).abs() < 1e-6);
        assert!(rep.max_distortion >= 1.0);
        assert!(rep.max_ratio <= 1.0 + 1e-12);
        assert!(rep.warning.is_none());
    }

    #[test]
    fn flat_ellipse_warns() {
        let c = CurveFamily::Ellipse { a: 1.0, b: 1e-5 }.sample::<f64>(256).unwrap();
        let rep = c.chord_arc_report(256).unwrap();
        assert!(matches!(rep.warning, Some(GeometryWarning::NearDegenerate { .. })));
    }
}
