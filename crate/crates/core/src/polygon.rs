//! Closed polygons inscribed in curves and their discrete Moebius energy
//!
//! `E_m(p) = sum_{i != j} (1 / |p_i - p_j|^2 - 1 / d_p(i, j)^2) e_i e_j`
//!
//! with `e_i` the length of edge `p_i p_{i+1}` and `d_p` the shorter
//! polygonal arc.

use rayon::prelude::*;

use crate::curve::ClosedCurve;
use crate::energies::{mobius_energy, QuadratureSpec};
use crate::error::{Error, Result};
use crate::mollify::mollify;
use crate::scalar::{vec, CompensatedSum, Real};

#[derive(Clone, Debug, PartialEq)]
pub struct Polygon<T> {
    dim: usize,
    vertices: Vec<T>,
    params: Vec<T>,
    edges: Vec<T>,
    // cumulative[i] = e_0 + ... + e_{i-1}
    cumulative: Vec<T>,
    perimeter: T,
}

impl<T: Real> Polygon<T> {
    /// Vertices row-major with their curve parameters, strictly increasing in
    /// `[0, 1)`. Two vertices are allowed so that inscribed digons fit.
    pub fn new(vertices: Vec<T>, params: Vec<T>, dim: usize) -> Result<Self> {
        if dim < 2 || vertices.len() % dim != 0 {
            return Err(Error::InvalidCurve("bad polygon buffer".into()));
        }
        let m = vertices.len() / dim;
        if m < 2 || params.len() != m {
            return Err(Error::InvalidCurve(format!("polygon needs >= 2 vertices with parameters, got {m}")));
        }
        if vertices.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidCurve("non-finite vertex".into()));
        }
        let ordered = params.windows(2).all(|w| w[0] < w[1]);
        if !ordered || params[0] < T::zero() || params[m - 1] >= T::one() {
            return Err(Error::InvalidCurve("parameters must increase inside [0, 1)".into()));
        }
        let mut edges = Vec::with_capacity(m);
        for i in 0..m {
            let j = (i + 1) % m;
            let e = vec::dist(&vertices[i * dim..(i + 1) * dim], &vertices[j * dim..(j + 1) * dim]);
            if !(e > T::zero()) {
                return Err(Error::CoincidentVertices { i, j });
            }
            edges.push(e);
        }
        let mut cumulative = Vec::with_capacity(m + 1);
        let mut acc = CompensatedSum::new();
        cumulative.push(T::zero());
        for &e in &edges {
            acc.add(e);
            cumulative.push(acc.value());
        }
        let perimeter = cumulative[m];
        Ok(Self {
            dim,
            vertices,
            params,
            edges,
            cumulative,
            perimeter,
        })
    }

    /// Regular `m`-gon with unit perimeter in the plane, parameters `i / m`.
    pub fn regular(m: usize) -> Result<Self> {
        let m_t = T::from_count(m);
        let radius = T::one() / (T::lit(2.0) * m_t * (T::PI() / m_t).sin());
        let mut v = Vec::with_capacity(2 * m);
        let mut params = Vec::with_capacity(m);
        for i in 0..m {
            let a = T::TAU() * T::from_count(i) / m_t;
            v.push(radius * a.cos());
            v.push(radius * a.sin());
            params.push(T::from_count(i) / m_t);
        }
        Self::new(v, params, 2)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.params.len()
    }

    pub fn is_empty(&self) -> bool {
        self.params.is_empty()
    }

    pub fn vertex(&self, i: usize) -> &[T] {
        &self.vertices[i * self.dim..(i + 1) * self.dim]
    }

    pub fn vertices(&self) -> &[T] {
        &self.vertices
    }

    pub fn params(&self) -> &[T] {
        &self.params
    }

    /// Length of the edge from vertex `i` to vertex `i + 1`.
    pub fn edge(&self, i: usize) -> T {
        self.edges[i]
    }

    pub fn edges(&self) -> &[T] {
        &self.edges
    }

    pub fn perimeter(&self) -> T {
        self.perimeter
    }

    /// Same polygon with every vertex mapped through `x -> scale R x + shift`,
    /// `rotation` row-major `dim x dim`.
    pub fn transformed(&self, scale: T, rotation: Option<&[T]>, shift: Option<&[T]>) -> Result<Self> {
        let d = self.dim;
        let mut out = vec![T::zero(); self.vertices.len()];
        for (src, dst) in self.vertices.chunks_exact(d).zip(out.chunks_exact_mut(d)) {
            for r in 0..d {
                let rotated = match rotation {
                    Some(rot) => (0..d).fold(T::zero(), |s, c| s + rot[r * d + c] * src[c]),
                    None => src[r],
                };
                dst[r] = scale * rotated + shift.map_or(T::zero(), |s| s[r]);
            }
        }
        Self::new(out, self.params.clone(), d)
    }
}

/// Shorter polygonal arc between vertices `i` and `j`.
pub fn polygon_arc_distance<T: Real>(p: &Polygon<T>, i: usize, j: usize) -> T {
    let (lo, hi) = if i <= j { (i, j) } else { (j, i) };
    let forward = p.cumulative[hi] - p.cumulative[lo];
    forward.min(p.perimeter - forward)
}

fn check_distinct<T: Real>(p: &Polygon<T>) -> Result<()> {
    let m = p.len();
    for i in 0..m {
        for j in i + 1..m {
            if vec::dist_sq(p.vertex(i), p.vertex(j)) <= T::zero() {
                return Err(Error::CoincidentVertices { i, j });
            }
        }
    }
    Ok(())
}

/// Discrete Moebius energy over ordered pairs `i != j`.
pub fn discrete_energy<T: Real>(p: &Polygon<T>) -> Result<T> {
    check_distinct(p)?;
    let m = p.len();
    let rows: Vec<T> = (0..m)
        .into_par_iter()
        .map(|i| {
            let mut acc = CompensatedSum::new();
            for j in 0..m {
                if i == j {
                    continue;
                }
                let c2 = vec::dist_sq(p.vertex(i), p.vertex(j));
                let d = polygon_arc_distance(p, i, j);
                acc.add((T::one() / c2 - T::one() / (d * d)) * p.edges[i] * p.edges[j]);
            }
            acc.value()
        })
        .collect();
    Ok(rows.into_iter().collect::<CompensatedSum<T>>().value())
}

/// Vertices at equal arc-length spacing starting from parameter 0. On a curve
/// flagged unit-speed these are `gamma(i / m)`.
pub fn inscribe_uniform<T: Real>(curve: &ClosedCurve<T>, m: usize) -> Result<Polygon<T>> {
    if m < 3 {
        return Err(Error::InvalidArgument(format!("need at least 3 vertices, got {m}")));
    }
    curve.check_regular()?;
    let m_t = T::from_count(m);
    let params: Vec<T> = if curve.is_unit_speed() {
        (0..m).map(|i| T::from_count(i) / m_t).collect()
    } else {
        let map = curve.arc_length_param()?;
        let targets: Vec<T> = (0..m).map(|i| map.length() * T::from_count(i) / m_t).collect();
        map.inverse_many(&targets)
    };
    let dim = curve.dim();
    let mut v = vec![T::zero(); m * dim];
    for (i, &t) in params.iter().enumerate() {
        curve.eval_into(t, &mut v[i * dim..(i + 1) * dim]);
    }
    Polygon::new(v, params, dim)
}

#[derive(Clone, Debug, PartialEq)]
pub struct GammaSweepRow {
    pub m: usize,
    pub e_m: f64,
    pub e_mobius: f64,
    /// `|e_m - e_mobius|`.
    pub gap: f64,
}

/// Discrete energies of inscribed polygons against the continuum energy. With
/// `mollify_first` each polygon is inscribed in `gamma_{1/m}` instead of
/// `gamma`.
pub fn gamma_sweep<T: Real>(
    curve: &ClosedCurve<T>,
    m_list: &[usize],
    mollify_first: bool,
    spec: &QuadratureSpec,
) -> Result<Vec<GammaSweepRow>> {
    let e_mobius = mobius_energy(curve, spec)?.as_f64();
    m_list
        .iter()
        .map(|&m| {
            let p = if mollify_first {
                let smooth = mollify(curve, 1.0 / m as f64)?;
                inscribe_uniform(&smooth, m)?
            } else {
                inscribe_uniform(curve, m)?
            };
            let e_m = discrete_energy(&p)?.as_f64();
            Ok(GammaSweepRow {
                m,
                e_m,
                e_mobius,
                gap: (e_m - e_mobius).abs(),
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curve::CurveFamily;

    fn square() -> Polygon<f64> {
        Polygon::new(
            vec![0.0, 0.0, 0.25, 0.0, 0.25, 0.25, 0.0, 0.25],
            vec![0.0, 0.25, 0.5, 0.75],
            2,
        )
        .unwrap()
    }

    #[test]
    fn arc_distances_of_square() {
        let s = square();
        assert!((polygon_arc_distance(&s, 0, 1) - 0.25).abs() < 1e-15);
        assert!((polygon_arc_distance(&s, 0, 2) - 0.5).abs() < 1e-15);
        assert!((polygon_arc_distance(&s, 3, 0) - 0.25).abs() < 1e-15);
        assert_eq!(polygon_arc_distance(&s, 2, 2), 0.0);
    }

    #[test]
    fn hand_values() {
        assert!((discrete_energy(&square()).unwrap() - 1.0).abs() < 1e-12);
        let tri = Polygon::<f64>::regular(3).unwrap();
        assert!(discrete_energy(&tri).unwrap().abs() < 1e-12);
    }

    #[test]
    fn rejects_bad_polygons() {
        let dup = Polygon::new(vec![0.0, 0.0, 0.0, 0.0, 1.0, 0.0], vec![0.0, 0.3, 0.6], 2);
        assert!(matches!(dup, Err(Error::CoincidentVertices { .. })));
        let back = Polygon::new(vec![0.0, 0.0, 1.0, 0.0, 1.0, 1.0], vec![0.0, 0.6, 0.3], 2);
        assert!(back.is_err());
        // non-adjacent coincidence
        let pinched = Polygon::new(
            vec![0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 1.0],
            vec![0.0, 0.25, 0.5, 0.75],
            2,
        )
        .unwrap();
        assert!(matches!(discrete_energy(&pinched), Err(Error::CoincidentVertices { i: 0, j: 2 })));
    }

    #[test]
    fn inscribed_circle_perimeter() {
        let c = CurveFamily::unit_circle().sample::<f64>(256).unwrap();
        for m in [4usize, 16, 128] {
            let p = inscribe_uniform(&c, m).unwrap();
            let exact = m as f64 / std::f64::consts::PI * (std::f64::consts::PI / m as f64).sin();
            assert!((p.perimeter() - exact).abs() < 1e-12);
            assert!(p.perimeter() < c.length());
        }
        let sq = inscribe_uniform(&c, 4).unwrap();
        let side = 2f64.sqrt() / (2.0 * std::f64::consts::PI);
        assert!(sq.edges().iter().all(|e| (e - side).abs() < 1e-14));
    }

    #[test]
    fn non_unit_speed_inscription_is_equilateral_on_circle() {
        let c = CurveFamily::unit_circle().sample::<f64>(128).unwrap();
        let warped = ClosedCurve::from_fn(128, 2, crate::curve::CurveSource::Samples, |t: f64, row: &mut [f64]| {
            let s = t + 0.05 * (std::f64::consts::TAU * t).sin();
            c.eval_into(s, row);
        })
        .unwrap();
        let p = inscribe_uniform(&warped, 8).unwrap();
        let e0 = p.edge(0);
        assert!(p.edges().iter().all(|e| (e - e0).abs() < 1e-8), "{:?}", p.edges());
    }
}
