use crate::error::{Error, Result};
use crate::scalar::{vec, Real};

/// Arc-length parametrized curve on `[-R, R]`, sampled at `m` equispaced
/// parameters `x_i = -R + i h`, `h = 2R / (m - 1)`.
///
/// Alongside positions the unit tangents and squared curvatures are kept,
/// because the open-curve energies need them without a periodic interpolant.
#[derive(Clone, Debug)]
pub struct OpenCurve<T> {
    dim: usize,
    half_width: T,
    positions: Vec<T>,
    tangents: Vec<T>,
    curvature_sq: Vec<T>,
}

impl<T: Real> OpenCurve<T> {
    pub fn new(
        dim: usize,
        half_width: T,
        positions: Vec<T>,
        tangents: Vec<T>,
        curvature_sq: Vec<T>,
    ) -> Result<Self> {
        if !(half_width > T::zero()) {
            return Err(Error::InvalidArgument(format!(
                "half-width {half_width} must be positive"
            )));
        }
        if dim < 2 || positions.len() % dim != 0 {
            return Err(Error::InvalidCurve("bad open-curve buffer".into()));
        }
        let m = positions.len() / dim;
        if m < 3 || tangents.len() != positions.len() || curvature_sq.len() != m {
            return Err(Error::InvalidCurve(format!(
                "open curve needs >= 3 samples with matching tangents, got {m}"
            )));
        }
        if positions.iter().chain(&tangents).chain(&curvature_sq).any(|v| !v.is_finite()) {
            return Err(Error::InvalidCurve("non-finite open-curve data".into()));
        }
        Ok(Self {
            dim,
            half_width,
            positions,
            tangents,
            curvature_sq,
        })
    }

    /// Straight line through `origin` in direction `direction`, unit speed.
    pub fn straight_line(origin: &[T], direction: &[T], half_width: T, m: usize) -> Result<Self> {
        let dim = origin.len();
        let norm = vec::norm(direction);
        let u: Vec<T> = direction.iter().map(|&v| v / norm).collect();
        let h = T::lit(2.0) * half_width / T::from_count(m - 1);
        let mut positions = Vec::with_capacity(m * dim);
        let mut tangents = Vec::with_capacity(m * dim);
        for i in 0..m {
            let x = -half_width + h * T::from_count(i);
            for c in 0..dim {
                positions.push(origin[c] + x * u[c]);
                tangents.push(u[c]);
            }
        }
        Self::new(dim, half_width, positions, tangents, vec![T::zero(); m])
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.curvature_sq.len()
    }

    pub fn is_empty(&self) -> bool {
        self.curvature_sq.is_empty()
    }

    pub fn half_width(&self) -> T {
        self.half_width
    }

    pub fn spacing(&self) -> T {
        T::lit(2.0) * self.half_width / T::from_count(self.len() - 1)
    }

    /// Arc-length parameter of sample `i`.
    pub fn param(&self, i: usize) -> T {
        -self.half_width + self.spacing() * T::from_count(i)
    }

    #[inline]
    pub fn point(&self, i: usize) -> &[T] {
        &self.positions[i * self.dim..(i + 1) * self.dim]
    }

    #[inline]
    pub fn tangent(&self, i: usize) -> &[T] {
        &self.tangents[i * self.dim..(i + 1) * self.dim]
    }

    #[inline]
    pub fn curvature_sq(&self, i: usize) -> T {
        self.curvature_sq[i]
    }

    /// Largest relative defect `1 - |p_{i+1} - p_i| / h` between consecutive samples.
    pub fn arclength_defect(&self) -> T {
        let h = self.spacing();
        (0..self.len() - 1)
            .map(|i| (T::one() - vec::dist(self.point(i), self.point(i + 1)) / h).abs())
            .fold(T::zero(), T::max)
    }

    /// Checks that consecutive chords match the parameter spacing within `tol`.
    pub fn check_arclength(&self, tol: T) -> Result<()> {
        let defect = self.arclength_defect();
        if defect > tol {
            return Err(Error::NonRegular {
                min_speed: (T::one() - defect).as_f64(),
                max_speed: 1.0,
            });
        }
        Ok(())
    }

    /// The samples with `|x| <= radius`, as an open curve on `[-radius', radius']`.
    pub fn restrict(&self, radius: T) -> Result<Self> {
        let h = self.spacing();
        let mid = (self.len() - 1) / 2;
        let k = (radius / h).floor().to_usize().unwrap_or(0).min(mid);
        if k < 1 {
            return Err(Error::InvalidArgument(format!("radius {radius} below one sample")));
        }
        let (lo, hi) = (mid - k, mid + k);
        let d = self.dim;
        Self::new(
            d,
            h * T::from_count(k),
            self.positions[lo * d..(hi + 1) * d].to_vec(),
            self.tangents[lo * d..(hi + 1) * d].to_vec(),
            self.curvature_sq[lo..=hi].to_vec(),
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn line_has_exact_arclength() {
        let l = OpenCurve::straight_line(&[0.0, 1.0, 0.0], &[1.0, 1.0, 0.0], 10.0f64, 101).unwrap();
        assert!(l.arclength_defect() < 1e-12);
        assert!((l.param(50)).abs() < 1e-14);
        let r = l.restrict(5.0).unwrap();
        assert_eq!(r.len(), 51);
        assert!((r.half_width() - 5.0).abs() < 1e-12);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(OpenCurve::<f64>::new(2, 1.0, vec![0.0; 4], vec![0.0; 4], vec![0.0; 2]).is_err());
        assert!(OpenCurve::<f64>::new(2, -1.0, vec![0.0; 6], vec![0.0; 6], vec![0.0; 3]).is_err());
    }
}
