//! Trigonometric interpolation of uniformly sampled periodic vector data.
//!
//! Samples are stored row-major (`n` rows of `dim` coordinates). The
//! spectrum keeps one column of `n` normalized coefficients per coordinate,
//! so that `f(t) = sum_k c_k exp(2 pi i k t)` with the Nyquist mode folded
//! into a real cosine, which keeps the interpolant real and exact at nodes.

use num_complex::Complex;
use rustfft::FftPlanner;

use crate::scalar::Real;

#[derive(Clone, Debug)]
pub struct Spectrum<T> {
    n: usize,
    dim: usize,
    coeffs: Vec<Complex<T>>,
    // modes above this carry nothing above round-off; skipped by `eval_into`
    band: usize,
}

/// Coefficients below this many ulps of the largest one are FFT round-off
/// and are left out of pointwise evaluation.
const NEGLIGIBLE_ULPS: f64 = 4.0;

/// Signed frequency of FFT bin `k` in a length `n` transform. The Nyquist bin
/// reports `+n/2`.
#[inline]
pub fn signed_freq(k: usize, n: usize) -> i64 {
    if k <= n / 2 {
        k as i64
    } else {
        k as i64 - n as i64
    }
}

impl<T: Real> Spectrum<T> {
    pub fn from_samples(samples: &[T], n: usize, dim: usize) -> Self {
        assert_eq!(samples.len(), n * dim, "sample buffer size");
        let mut planner = FftPlanner::<T>::new();
        let fft = planner.plan_fft_forward(n);
        let scale = T::one() / T::from_count(n);
        let mut coeffs = Vec::with_capacity(n * dim);
        for c in 0..dim {
            let mut col: Vec<Complex<T>> = (0..n)
                .map(|j| Complex::new(samples[j * dim + c], T::zero()))
                .collect();
            fft.process(&mut col);
            coeffs.extend(col.into_iter().map(|z| z * scale));
        }
        Self::with_coeffs(n, dim, coeffs)
    }

    fn with_coeffs(n: usize, dim: usize, coeffs: Vec<Complex<T>>) -> Self {
        let half = n / 2;
        let biggest = coeffs.iter().map(|z| z.norm()).fold(T::zero(), T::max);
        let cut = biggest * T::epsilon() * T::lit(NEGLIGIBLE_ULPS);
        let band = (1..half)
            .rev()
            .find(|&k| (0..dim).any(|c| coeffs[c * n + k].norm() > cut))
            .map_or(1, |k| k + 1);
        Self { n, dim, coeffs, band }
    }

    /// One past the highest non-negligible positive mode below Nyquist.
    pub fn bandwidth(&self) -> usize {
        self.band
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn coeff(&self, coord: usize, k: usize) -> Complex<T> {
        self.coeffs[coord * self.n + k]
    }

    /// Values of the interpolant at the nodes `j / n`.
    pub fn to_samples(&self) -> Vec<T> {
        let n = self.n;
        let mut planner = FftPlanner::<T>::new();
        let ifft = planner.plan_fft_inverse(n);
        let mut out = vec![T::zero(); n * self.dim];
        for c in 0..self.dim {
            let mut col = self.coeffs[c * n..(c + 1) * n].to_vec();
            ifft.process(&mut col);
            for (j, z) in col.into_iter().enumerate() {
                out[j * self.dim + c] = z.re;
            }
        }
        out
    }

    /// Multiplies every mode by `m(k)` where `k` is the signed frequency.
    pub fn apply_multiplier<F: Fn(i64) -> Complex<T>>(&self, m: F) -> Self {
        let n = self.n;
        let mut coeffs = self.coeffs.clone();
        for c in 0..self.dim {
            for k in 0..n {
                coeffs[c * n + k] = coeffs[c * n + k] * m(signed_freq(k, n));
            }
        }
        Self::with_coeffs(n, self.dim, coeffs)
    }

    /// Spectrum of the `order`-th derivative of the interpolant.
    ///
    /// Odd derivatives of the Nyquist cosine vanish at the nodes, so that bin
    /// is zeroed for odd orders; even orders keep it.
    pub fn derivative(&self, order: u32) -> Self {
        let n = self.n;
        let two_pi = T::TAU();
        let mut out = self.apply_multiplier(|k| {
            if order % 2 == 1 && n % 2 == 0 && k == (n / 2) as i64 {
                return Complex::new(T::zero(), T::zero());
            }
            let ik = Complex::new(T::zero(), two_pi * T::from_i64(k).unwrap());
            ik.powu(order)
        });
        // differentiation amplifies round-off, not content
        out.band = out.band.min(self.band);
        out
    }

    /// Evaluates the interpolant (or one of its derivatives) at `t`.
    pub fn eval_into(&self, t: T, order: u32, out: &mut [T]) {
        debug_assert_eq!(out.len(), self.dim);
        let n = self.n;
        let t = t - t.floor();
        let two_pi = T::TAU();
        let half = n / 2;
        let step = Complex::from_polar(T::one(), two_pi * t);
        // (i 2 pi)^order splits into a real power and a quarter turn
        let quarter = match order % 4 {
            0 => Complex::new(T::one(), T::zero()),
            1 => Complex::new(T::zero(), T::one()),
            2 => Complex::new(-T::one(), T::zero()),
            _ => Complex::new(T::zero(), -T::one()),
        };
        let top = self.band.min(half.max(1));
        for (c, o) in out.iter_mut().enumerate() {
            let col = &self.coeffs[c * n..(c + 1) * n];
            let mut acc = if order == 0 { col[0].re } else { T::zero() };
            let mut phase = step;
            for k in 1..top {
                if k % 64 == 0 {
                    phase = Complex::from_polar(T::one(), two_pi * T::from_count(k) * t);
                }
                let scale = (two_pi * T::from_count(k)).powi(order as i32);
                let term = col[k] * phase * quarter;
                acc = acc + T::lit(2.0) * scale * term.re;
                phase = phase * step;
            }
            if n % 2 == 0 && n >= 2 {
                // Nyquist: c cos(pi n t), real coefficient for real data.
                let w = T::PI() * T::from_count(n);
                let arg = w * t;
                let c_nyq = col[half].re;
                let d = match order % 4 {
                    0 => arg.cos(),
                    1 => -arg.sin(),
                    2 => -arg.cos(),
                    _ => arg.sin(),
                };
                acc = acc + c_nyq * w.powi(order as i32) * d;
            } else if n % 2 == 1 {
                unreachable!("odd sample counts are not supported");
            }
            *o = acc;
        }
    }

    /// Exact resampling of the interpolant onto `m >= n` nodes (zero padding,
    /// Nyquist mode split evenly between `+n/2` and `-n/2`).
    pub fn upsample(&self, m: usize) -> Self {
        assert!(m >= self.n && m % 2 == 0);
        let n = self.n;
        let half = n / 2;
        let mut coeffs = vec![Complex::new(T::zero(), T::zero()); m * self.dim];
        for c in 0..self.dim {
            let src = &self.coeffs[c * n..(c + 1) * n];
            let dst = &mut coeffs[c * m..(c + 1) * m];
            if m == n {
                dst.copy_from_slice(src);
                continue;
            }
            for k in 0..half {
                dst[k] = src[k];
            }
            for k in half + 1..n {
                dst[m - (n - k)] = src[k];
            }
            let nyq = src[half] * T::lit(0.5);
            dst[half] = nyq;
            dst[m - half] = nyq;
        }
        Self::with_coeffs(m, self.dim, coeffs)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample(n: usize, f: impl Fn(f64) -> f64) -> Vec<f64> {
        (0..n).map(|j| f(j as f64 / n as f64)).collect()
    }

    #[test]
    fn interpolant_is_exact_at_nodes_and_between_for_bandlimited() {
        let f = |t: f64| (2.0 * std::f64::consts::PI * 3.0 * t).sin() + 0.5;
        let s = Spectrum::from_samples(&sample(16, f), 16, 1);
        let mut out = [0.0];
        for j in 0..16 {
            s.eval_into(j as f64 / 16.0, 0, &mut out);
            assert!((out[0] - f(j as f64 / 16.0)).abs() < 1e-14);
        }
        s.eval_into(0.123, 0, &mut out);
        assert!((out[0] - f(0.123)).abs() < 1e-13);
    }

    #[test]
    fn nyquist_mode_keeps_node_exactness_and_upsamples() {
        // alternating samples are pure Nyquist content
        let samples: Vec<f64> = (0..16).map(|j| if j % 2 == 0 { 1.0 } else { -1.0 }).collect();
        let s = Spectrum::from_samples(&samples, 16, 1);
        let mut out = [0.0];
        for j in 0..16 {
            s.eval_into(j as f64 / 16.0, 0, &mut out);
            assert!((out[0] - samples[j]).abs() < 1e-14);
        }
        let up = s.upsample(64).to_samples();
        for (i, v) in up.iter().enumerate() {
            let t = i as f64 / 64.0;
            assert!((v - (std::f64::consts::PI * 16.0 * t).cos()).abs() < 1e-13);
        }
    }

    #[test]
    fn spectral_derivative_matches_analytic() {
        let tau = std::f64::consts::TAU;
        let f = |t: f64| (tau * 2.0 * t).cos();
        let s = Spectrum::from_samples(&sample(32, f), 32, 1);
        let d = s.derivative(1).to_samples();
        let d2 = s.derivative(2).to_samples();
        for j in 0..32 {
            let t = j as f64 / 32.0;
            assert!((d[j] + 2.0 * tau * (tau * 2.0 * t).sin()).abs() < 1e-11);
            assert!((d2[j] + 4.0 * tau * tau * f(t)).abs() < 1e-9);
        }
        let mut out = [0.0];
        s.eval_into(0.3, 1, &mut out);
        assert!((out[0] + 2.0 * tau * (tau * 0.6).sin()).abs() < 1e-11);
    }
}
