//! Monotone piecewise-cubic Hermite interpolation (Fritsch-Carlson).

use crate::scalar::Real;

pub(crate) struct Pchip<T> {
    x: Vec<T>,
    y: Vec<T>,
    slopes: Vec<T>,
}

impl<T: Real> Pchip<T> {
    /// `x` strictly increasing, `y` monotone.
    pub fn new(x: Vec<T>, y: Vec<T>) -> Self {
        let n = x.len();
        assert!(n >= 2 && y.len() == n);
        let h: Vec<T> = x.windows(2).map(|w| w[1] - w[0]).collect();
        let delta: Vec<T> = (0..n - 1).map(|i| (y[i + 1] - y[i]) / h[i]).collect();
        let mut slopes = vec![T::zero(); n];
        let two = T::lit(2.0);
        let three = T::lit(3.0);
        for i in 1..n - 1 {
            let (a, b) = (delta[i - 1], delta[i]);
            if a * b > T::zero() {
                let w1 = two * h[i] + h[i - 1];
                let w2 = h[i] + two * h[i - 1];
                slopes[i] = (w1 + w2) / (w1 / a + w2 / b);
            }
        }
        let end = |h0: T, h1: T, d0: T, d1: T| -> T {
            let s = ((two * h0 + h1) * d0 - h0 * d1) / (h0 + h1);
            if s * d0 <= T::zero() {
                T::zero()
            } else if d0 * d1 <= T::zero() && s.abs() > (three * d0).abs() {
                three * d0
            } else {
                s
            }
        };
        if n == 2 {
            slopes[0] = delta[0];
            slopes[1] = delta[0];
        } else {
            slopes[0] = end(h[0], h[1], delta[0], delta[1]);
            slopes[n - 1] = end(h[n - 2], h[n - 3], delta[n - 2], delta[n - 3]);
        }
        Self { x, y, slopes }
    }

    pub fn eval(&self, t: T) -> T {
        let n = self.x.len();
        let i = match self.x.binary_search_by(|v| v.partial_cmp(&t).unwrap()) {
            Ok(i) => return self.y[i],
            Err(0) => 0,
            Err(i) if i >= n => n - 2,
            Err(i) => i - 1,
        };
        let h = self.x[i + 1] - self.x[i];
        let s = (t - self.x[i]) / h;
        let s2 = s * s;
        let s3 = s2 * s;
        let two = T::lit(2.0);
        let three = T::lit(3.0);
        let h00 = two * s3 - three * s2 + T::one();
        let h10 = s3 - two * s2 + s;
        let h01 = -two * s3 + three * s2;
        let h11 = s3 - s2;
        h00 * self.y[i] + h10 * h * self.slopes[i] + h01 * self.y[i + 1] + h11 * h * self.slopes[i + 1]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reproduces_data_and_stays_monotone() {
        let x: Vec<f64> = vec![0.0, 0.1, 0.5, 0.6, 1.0];
        let y: Vec<f64> = vec![0.0, 0.0, 0.9, 1.0, 1.0];
        let p = Pchip::new(x.clone(), y.clone());
        for (a, b) in x.iter().zip(&y) {
            assert_eq!(p.eval(*a), *b);
        }
        let mut prev = -1.0;
        for k in 0..=1000 {
            let v = p.eval(k as f64 / 1000.0);
            assert!(v >= prev - 1e-15 && (0.0..=1.0).contains(&v));
            prev = v;
        }
    }

    #[test]
    fn exact_for_lines() {
        let x: Vec<f64> = (0..10).map(|i| (i * i) as f64).collect();
        let y: Vec<f64> = x.iter().map(|v| 3.0 * v + 1.0).collect();
        let p = Pchip::new(x, y);
        assert!((p.eval(7.3) - 22.9).abs() < 1e-12);
    }
}
