use serde::{Deserialize, Serialize};

use super::{ClosedCurve, CurveSource};
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Named analytic curve families.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CurveFamily {
    /// `r (cos 2 pi t, sin 2 pi t)`; `r = 1 / (2 pi)` is the unit-speed circle.
    Circle { radius: f64 },
    /// `(a cos 2 pi t, b sin 2 pi t)`.
    Ellipse { a: f64, b: f64 },
    /// `((R + r cos 2 pi q t) cos 2 pi p t, (R + r cos 2 pi q t) sin 2 pi p t, r sin 2 pi q t)`.
    TorusKnot { p: u32, q: u32, major: f64, minor: f64 },
    /// Unit-speed circle lifted by the lacunary height
    /// `sum_{j=1..terms} decay^j sin(2 pi 2^j t)`, all divided by `2 pi`.
    Lacunary { terms: u32, decay: f64 },
}

fn gcd(a: u32, b: u32) -> u32 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

impl CurveFamily {
    /// The unit-length circle `c_1(t) = (1 / 2 pi)(cos 2 pi t, sin 2 pi t)`.
    pub fn unit_circle() -> Self {
        CurveFamily::Circle {
            radius: 1.0 / std::f64::consts::TAU,
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            CurveFamily::Circle { .. } | CurveFamily::Ellipse { .. } => 2,
            CurveFamily::TorusKnot { .. } | CurveFamily::Lacunary { .. } => 3,
        }
    }

    pub fn validate(&self, n: usize) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidCurve(m));
        match *self {
            CurveFamily::Circle { radius } if !(radius > 0.0 && radius.is_finite()) => {
                bad(format!("circle radius {radius} must be positive"))
            }
            CurveFamily::Ellipse { a, b } if !(a > 0.0 && b > 0.0 && a.is_finite() && b.is_finite()) => {
                bad(format!("ellipse axes ({a}, {b}) must be positive"))
            }
            CurveFamily::TorusKnot { p, q, major, minor } => {
                if p == 0 || q == 0 || gcd(p, q) != 1 {
                    return bad(format!("torus knot ({p}, {q}) needs coprime positive p, q"));
                }
                if !(minor > 0.0 && major > minor) {
                    return bad(format!("torus radii need major > minor > 0, got ({major}, {minor})"));
                }
                if 2 * (p.max(q) as usize + 1) > n / 2 {
                    return bad(format!("{n} samples cannot resolve the ({p}, {q}) torus knot"));
                }
                Ok(())
            }
            CurveFamily::Lacunary { terms, decay } => {
                if !(decay > 0.0 && decay.is_finite()) {
                    return bad(format!("lacunary decay {decay} must be positive"));
                }
                if terms >= 30 || (1usize << terms) >= n / 2 {
                    return bad(format!("{n} samples cannot resolve lacunary frequency 2^{terms}"));
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }

    pub fn point(&self, t: f64, out: &mut [f64]) {
        use std::f64::consts::TAU;
        match *self {
            CurveFamily::Circle { radius } => {
                out[0] = radius * (TAU * t).cos();
                out[1] = radius * (TAU * t).sin();
            }
            CurveFamily::Ellipse { a, b } => {
                out[0] = a * (TAU * t).cos();
                out[1] = b * (TAU * t).sin();
            }
            CurveFamily::TorusKnot { p, q, major, minor } => {
                let (u, v) = (TAU * p as f64 * t, TAU * q as f64 * t);
                let r = major + minor * v.cos();
                out[0] = r * u.cos();
                out[1] = r * u.sin();
                out[2] = minor * v.sin();
            }
            CurveFamily::Lacunary { terms, decay } => {
                out[0] = (TAU * t).cos() / TAU;
                out[1] = (TAU * t).sin() / TAU;
                let mut z = 0.0;
                for j in 1..=terms {
                    z += decay.powi(j as i32) * (TAU * (1u64 << j) as f64 * t).sin();
                }
                out[2] = z / TAU;
            }
        }
    }

    /// Samples the family on `n` nodes.
    pub fn sample<T: Real>(&self, n: usize) -> Result<ClosedCurve<T>> {
        self.validate(n)?;
        let dim = self.dim();
        let mut buf = vec![0.0; dim];
        ClosedCurve::from_fn(n, dim, CurveSource::Family(self.clone()), |t: T, row: &mut [T]| {
            self.point(t.as_f64(), &mut buf);
            for (o, v) in row.iter_mut().zip(&buf) {
                *o = T::lit(*v);
            }
        })
    }
}
