//! Closed curves sampled on a uniform grid of the circle `R/Z`, evaluated by
//! trigonometric interpolation.

mod families;
mod geometry;
mod open;
mod pchip;

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::fourier::Spectrum;
use crate::scalar::{vec, Real};

pub use families::CurveFamily;
pub use geometry::{ArcLengthMap, CurveGeometryReport, GeometryWarning, NEAR_DEGENERATE_TOL};
pub use open::OpenCurve;

/// Largest supported ambient dimension.
pub const MAX_DIM: usize = 8;
/// Smallest supported sample count.
pub const MIN_SAMPLES: usize = 16;
/// A curve is regular when `min speed > REGULARITY_RATIO * max speed`.
pub const REGULARITY_RATIO: f64 = 1e-8;

/// A point of `R/Z`, stored by its representative in `[0, 1)`.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd)]
pub struct ParamPoint<T>(T);

impl<T: Real> ParamPoint<T> {
    pub fn new(t: T) -> Self {
        let mut r = t - t.floor();
        if r >= T::one() {
            r = T::zero();
        }
        Self(r)
    }

    #[inline]
    pub fn get(self) -> T {
        self.0
    }
}

impl<T: Real> From<T> for ParamPoint<T> {
    fn from(t: T) -> Self {
        Self::new(t)
    }
}

/// Where a curve's samples came from.
#[derive(Clone, Debug, PartialEq)]
pub enum CurveSource {
    Family(CurveFamily),
    Samples,
    Derived(String),
}

/// Closed curve `R/Z -> R^d` given by `n` samples at `t_j = j / n`.
#[derive(Clone, Debug)]
pub struct ClosedCurve<T> {
    dim: usize,
    n: usize,
    samples: Vec<T>,
    source: CurveSource,
    unit_speed_tol: Option<T>,
    spectrum: Spectrum<T>,
    d1_spec: Spectrum<T>,
    d2_spec: Spectrum<T>,
    d1: Vec<T>,
    d2: Vec<T>,
    speed: Vec<T>,
    // arc-length function s(t) = L t + P(t) - P(0)
    speed_spec: Spectrum<T>,
    arc_nodes: Vec<T>,
    length: T,
}

impl<T: Real> ClosedCurve<T> {
    /// Builds a curve from row-major samples (`n` rows of `dim` coordinates).
    pub fn from_samples(samples: Vec<T>, dim: usize, source: CurveSource) -> Result<Self> {
        if !(2..=MAX_DIM).contains(&dim) {
            return Err(Error::InvalidCurve(format!(
                "dimension {dim} outside 2..={MAX_DIM}"
            )));
        }
        if samples.len() % dim != 0 {
            return Err(Error::InvalidCurve(format!(
                "{} values is not a multiple of dimension {dim}",
                samples.len()
            )));
        }
        let n = samples.len() / dim;
        if n < MIN_SAMPLES || !n.is_power_of_two() {
            return Err(Error::InvalidCurve(format!(
                "sample count {n} must be a power of two >= {MIN_SAMPLES}"
            )));
        }
        if samples.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidCurve("non-finite sample".into()));
        }
        let spectrum = Spectrum::from_samples(&samples, n, dim);
        let d1_spec = spectrum.derivative(1);
        let d2_spec = spectrum.derivative(2);
        let d1 = d1_spec.to_samples();
        let d2 = d2_spec.to_samples();
        let speed: Vec<T> = d1.chunks_exact(dim).map(vec::norm).collect();
        let speed_spec = Spectrum::from_samples(&speed, n, 1);
        let length = speed_spec.coeff(0, 0).re;
        let tau = T::TAU();
        let periodic = speed_spec
            .apply_multiplier(|k| {
                if k == 0 || k == (n / 2) as i64 {
                    Complex::new(T::zero(), T::zero())
                } else {
                    Complex::new(T::zero(), -T::one() / (tau * T::from_i64(k).unwrap()))
                }
            })
            .to_samples();
        let arc_nodes = (0..n)
            .map(|j| length * T::from_count(j) / T::from_count(n) + periodic[j] - periodic[0])
            .collect();
        Ok(Self {
            dim,
            n,
            samples,
            source,
            unit_speed_tol: None,
            spectrum,
            d1_spec,
            d2_spec,
            d1,
            d2,
            speed,
            speed_spec,
            arc_nodes,
            length,
        })
    }

    /// Samples `f` at the `n` nodes.
    pub fn from_fn<F: FnMut(T, &mut [T])>(n: usize, dim: usize, source: CurveSource, mut f: F) -> Result<Self> {
        let mut samples = vec![T::zero(); n * dim];
        for (j, row) in samples.chunks_exact_mut(dim).enumerate() {
            f(T::from_count(j) / T::from_count(n), row);
        }
        Self::from_samples(samples, dim, source)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Number of samples `n`.
    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn source(&self) -> &CurveSource {
        &self.source
    }

    pub fn samples(&self) -> &[T] {
        &self.samples
    }

    #[inline]
    pub fn node(&self, j: usize) -> &[T] {
        &self.samples[j * self.dim..(j + 1) * self.dim]
    }

    /// First derivative at node `j`.
    #[inline]
    pub fn node_velocity(&self, j: usize) -> &[T] {
        &self.d1[j * self.dim..(j + 1) * self.dim]
    }

    #[inline]
    pub fn node_acceleration(&self, j: usize) -> &[T] {
        &self.d2[j * self.dim..(j + 1) * self.dim]
    }

    #[inline]
    pub fn node_speed(&self, j: usize) -> T {
        self.speed[j]
    }

    pub fn speeds(&self) -> &[T] {
        &self.speed
    }

    /// Cumulative arc length `s(t_j)` at node `j`.
    #[inline]
    pub fn node_arc(&self, j: usize) -> T {
        self.arc_nodes[j]
    }

    pub fn min_speed(&self) -> T {
        self.speed.iter().copied().fold(T::infinity(), T::min)
    }

    pub fn max_speed(&self) -> T {
        self.speed.iter().copied().fold(T::zero(), T::max)
    }

    /// Fails with `NonRegular` unless `min speed > 1e-8 * max speed`.
    pub fn check_regular(&self) -> Result<()> {
        let (lo, hi) = (self.min_speed(), self.max_speed());
        if lo > T::lit(REGULARITY_RATIO) * hi && lo > T::zero() {
            Ok(())
        } else {
            Err(Error::NonRegular {
                min_speed: lo.as_f64(),
                max_speed: hi.as_f64(),
            })
        }
    }

    /// Declared unit-speed tolerance, if any.
    pub fn unit_speed_tolerance(&self) -> Option<T> {
        self.unit_speed_tol
    }

    /// Maximum of `| |gamma'(t_j)| - 1 |` over the nodes.
    pub fn node_speed_deviation(&self) -> T {
        self.speed
            .iter()
            .fold(T::zero(), |m, &s| m.max((s - T::one()).abs()))
    }

    /// Flagged unit speed, or node speeds within round-off of 1.
    pub fn is_unit_speed(&self) -> bool {
        let tol = T::lit(1e-10).max(T::epsilon() * T::lit(100.0));
        self.unit_speed_tol.is_some() || self.node_speed_deviation() <= tol
    }

    /// Flags the curve as unit speed, checking the nodes against `tol`.
    pub fn declare_unit_speed(mut self, tol: T) -> Result<Self> {
        let dev = self.node_speed_deviation();
        if dev > tol {
            return Err(Error::InvalidCurve(format!(
                "speed deviation {dev:e} exceeds declared tolerance {tol:e}"
            )));
        }
        self.unit_speed_tol = Some(tol);
        Ok(self)
    }

    pub fn evaluate(&self, t: ParamPoint<T>) -> Vec<T> {
        let mut out = vec![T::zero(); self.dim];
        self.eval_into(t.get(), &mut out);
        out
    }

    pub fn eval_into(&self, t: T, out: &mut [T]) {
        // exact at the nodes, independent of interpolation round-off
        let scaled = t * T::from_count(self.n);
        if scaled == scaled.floor() {
            let j = scaled.to_i64().unwrap().rem_euclid(self.n as i64) as usize;
            out.copy_from_slice(self.node(j));
            return;
        }
        self.spectrum.eval_into(t, 0, out);
    }

    /// Derivative of order 1 or 2 of the interpolant.
    pub fn derivative(&self, t: ParamPoint<T>, order: u32) -> Vec<T> {
        let mut out = vec![T::zero(); self.dim];
        self.derivative_into(t.get(), order, &mut out);
        out
    }

    pub fn derivative_into(&self, t: T, order: u32, out: &mut [T]) {
        match order {
            0 => self.eval_into(t, out),
            1 => self.d1_spec.eval_into(t, 0, out),
            2 => self.d2_spec.eval_into(t, 0, out),
            k => self.spectrum.eval_into(t, k, out),
        }
    }

    /// Length `int_0^1 |gamma'(t)| dt` by the trapezoidal rule on the nodes.
    pub fn length(&self) -> T {
        self.length
    }

    /// Cumulative arc length from parameter 0 to `t` (lifted, `t` in `R`).
    pub fn arc_length_at(&self, t: T) -> T {
        let whole = t.floor();
        let frac = t - whole;
        let n = self.n;
        let tau = T::TAU();
        let periodic = |x: T| -> T {
            let mut acc = T::zero();
            for k in 1..self.speed_spec.bandwidth().min(n / 2) {
                let c = self.speed_spec.coeff(0, k);
                let w = tau * T::from_count(k);
                let (s, co) = (w * x).sin_cos();
                // 2 Re(c e^{iwx} / (i w))
                acc = acc + (c.re * s + c.im * co) * T::lit(2.0) / w;
            }
            let nyq = self.speed_spec.coeff(0, n / 2).re;
            let w = T::PI() * T::from_count(n);
            acc + nyq * (w * x).sin() / w
        };
        self.length * (whole + frac) + periodic(frac) - periodic(T::zero())
    }

    /// Intrinsic distance: the shorter of the two arcs between `x` and `y`.
    pub fn arc_distance(&self, x: T, y: T) -> T {
        let d = (self.arc_length_at(y) - self.arc_length_at(x)).abs() % self.length;
        d.min(self.length - d)
    }

    /// Intrinsic distance between two nodes.
    #[inline]
    pub fn node_arc_distance(&self, i: usize, j: usize) -> T {
        let d = (self.arc_nodes[j] - self.arc_nodes[i]).abs();
        d.min(self.length - d)
    }

    /// The same interpolant sampled on `m` nodes. Exact for `m >= n`.
    pub fn resample(&self, m: usize) -> Result<Self> {
        if m == self.n {
            return Ok(self.clone());
        }
        let samples = if m > self.n && m % 2 == 0 {
            self.spectrum.upsample(m).to_samples()
        } else {
            let mut s = vec![T::zero(); m * self.dim];
            for (j, row) in s.chunks_exact_mut(self.dim).enumerate() {
                self.spectrum
                    .eval_into(T::from_count(j) / T::from_count(m), 0, row);
            }
            s
        };
        let mut c = Self::from_samples(samples, self.dim, self.source.clone())?;
        c.unit_speed_tol = self.unit_speed_tol;
        Ok(c)
    }

    /// Applies `x -> scale * R x + shift` to every sample. `rotation` is a
    /// row-major `dim x dim` matrix.
    pub fn transformed(&self, scale: T, rotation: Option<&[T]>, shift: Option<&[T]>) -> Result<Self> {
        let d = self.dim;
        let mut out = vec![T::zero(); self.samples.len()];
        for (src, dst) in self.samples.chunks_exact(d).zip(out.chunks_exact_mut(d)) {
            for r in 0..d {
                let mut v = match rotation {
                    Some(m) => (0..d).fold(T::zero(), |a, c| a + m[r * d + c] * src[c]),
                    None => src[r],
                };
                v = v * scale;
                if let Some(b) = shift {
                    v = v + b[r];
                }
                dst[r] = v;
            }
        }
        Self::from_samples(out, d, CurveSource::Derived("rigid motion".into()))
    }

    pub fn scaled(&self, scale: T) -> Result<Self> {
        self.transformed(scale, None, None)
    }

    /// Same interpolant with the samples replaced through a spectral multiplier.
    pub(crate) fn with_multiplier<F: Fn(i64) -> Complex<T>>(&self, m: F, source: CurveSource) -> Result<Self> {
        let samples = self.spectrum.apply_multiplier(m).to_samples();
        Self::from_samples(samples, self.dim, source)
    }

    /// Curvature-like quantity `|gamma' ^ gamma''|^2 / |gamma'|^4 = kappa^2 |gamma'|^2`.
    #[inline]
    pub fn node_kappa_sq_speed_sq(&self, j: usize) -> T {
        let v = self.node_velocity(j);
        let a = self.node_acceleration(j);
        let s2 = vec::norm_sq(v);
        vec::wedge_sq(v, a) / (s2 * s2)
    }
}
