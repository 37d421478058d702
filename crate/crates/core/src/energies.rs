//! Moebius energy and its decomposition `E_mob = E1 + E2 + 4`, for closed
//! curves on the `(x, w)` torus grid and for arc-length open curves.
//!
//! Closed-curve integrands, with `c = gamma(y) - gamma(x)` and `tau` the unit
//! tangent, all multiplied by `|gamma'(x)| |gamma'(y)|`:
//!
//! * `E_mob`: `1 / |c|^2 - 1 / d(x, y)^2` with `d` the shorter arc length
//! * `E1`: `|tau(x) - tau(y)|^2 / (2 |c|^2)`
//! * `E2`: `2 / |c|^4 * det [[tau(x).tau(y), c.tau(x)], [c.tau(y), |c|^2]]`
//!
//! On the diagonal they extend continuously to `kappa^2 / 12`, `kappa^2 / 2`
//! and `-kappa^2 / 2` (times `|gamma'|^2`).

use rayon::prelude::*;

use crate::curve::{ClosedCurve, OpenCurve, NEAR_DEGENERATE_TOL};
use crate::error::{Error, Result};
use crate::quad::GAUSS8_UNIT;
use crate::scalar::{vec, CompensatedSum, Real};

/// How the `w = 0` line of the quadrature grid is treated.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DiagonalPolicy {
    /// Drop the nodes with `|w| < cells / n_w` and add the analytic local limit
    /// over the same band.
    ExcludeBand { cells: usize },
    /// Use the analytic limit as the integrand value at `w = 0`.
    AnalyticLimit,
}

impl DiagonalPolicy {
    fn band(&self) -> usize {
        match *self {
            DiagonalPolicy::ExcludeBand { cells } => cells,
            DiagonalPolicy::AnalyticLimit => 1,
        }
    }
}

impl std::fmt::Display for DiagonalPolicy {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            DiagonalPolicy::ExcludeBand { cells } => write!(f, "exclude-band({cells})"),
            DiagonalPolicy::AnalyticLimit => write!(f, "analytic-limit"),
        }
    }
}

/// Grid and diagonal handling for the double integrals.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuadratureSpec {
    pub n_x: usize,
    pub n_w: usize,
    pub policy: DiagonalPolicy,
    pub tolerance: f64,
}

pub const MIN_QUADRATURE_GRID: usize = 64;

impl QuadratureSpec {
    pub fn new(n_x: usize, n_w: usize, policy: DiagonalPolicy, tolerance: f64) -> Result<Self> {
        for n in [n_x, n_w] {
            if n < MIN_QUADRATURE_GRID {
                return Err(Error::GridTooSmall {
                    grid: n,
                    min: MIN_QUADRATURE_GRID,
                });
            }
            if !n.is_power_of_two() {
                return Err(Error::InvalidArgument(format!("grid {n} must be a power of two")));
            }
        }
        if let DiagonalPolicy::ExcludeBand { cells } = policy {
            if cells == 0 || 2 * cells >= n_w {
                return Err(Error::InvalidArgument(format!("band width {cells} out of range")));
            }
        }
        if !(tolerance > 0.0) {
            return Err(Error::InvalidArgument("tolerance must be positive".into()));
        }
        Ok(Self {
            n_x,
            n_w,
            policy,
            tolerance,
        })
    }

    /// `n x n` grid, one-cell band exclusion, tolerance `1e-2`.
    pub fn square(n: usize) -> Result<Self> {
        Self::new(n, n, DiagonalPolicy::ExcludeBand { cells: 1 }, 1e-2)
    }
}

/// All three energies of a closed curve plus quadrature metadata.
#[derive(Clone, Debug, PartialEq)]
pub struct EnergyReport<T> {
    pub e_mobius: T,
    pub e1: T,
    pub e2: T,
    /// `e_mobius - e1 - e2 - 4`.
    pub residual: T,
    /// Band remainder estimates for `(E_mob, E1, E2)`.
    pub remainders: [T; 3],
    /// Smallest chord/arc ratio met on the grid.
    pub min_chord_arc: T,
    pub spec: QuadratureSpec,
}

impl<T: Real> EnergyReport<T> {
    pub fn remainder_estimate(&self) -> T {
        self.remainders[0] + self.remainders[1] + self.remainders[2]
    }

    /// `|residual| <= max(1e-2, 3 * remainder)`.
    pub fn decomposition_holds(&self) -> bool {
        self.residual.abs() <= T::lit(1e-2).max(T::lit(3.0) * self.remainder_estimate())
    }
}

#[derive(Clone, Copy)]
struct PairTerms<T> {
    mobius: T,
    e1: T,
    e2: T,
}

/// Integrands at a pair of points given position, unit tangent and speed,
/// with intrinsic distance `d`.
#[inline]
fn pair_terms<T: Real>(px: &[T], tx: &[T], sx: T, py: &[T], ty: &[T], sy: T, d: T, buf: &mut [T]) -> (PairTerms<T>, T) {
    let dim = px.len();
    for k in 0..dim {
        buf[k] = py[k] - px[k];
    }
    let c2 = vec::norm_sq(&buf[..dim]);
    let c = c2.sqrt();
    let speeds = sx * sy;
    let mobius = (T::one() / c2 - T::one() / (d * d)) * speeds;
    let dt2 = vec::dist_sq(tx, ty);
    let e1 = dt2 / (T::lit(2.0) * c2) * speeds;
    // projections of the tangents orthogonal to the chord
    let ax = vec::dot(&buf[..dim], tx) / c;
    let ay = vec::dot(&buf[..dim], ty) / c;
    let mut proj = T::zero();
    for k in 0..dim {
        let u = buf[k] / c;
        proj = proj + (tx[k] - ax * u) * (ty[k] - ay * u);
    }
    let e2 = T::lit(2.0) * proj / c2 * speeds;
    (PairTerms { mobius, e1, e2 }, c / d)
}

/// Energies of a closed curve on the grid `spec`. Fails when the curve is
/// not regular or a chord/arc ratio on the grid drops below the embedding
/// threshold.
pub fn energy_report<T: Real>(curve: &ClosedCurve<T>, spec: &QuadratureSpec) -> Result<EnergyReport<T>> {
    curve.check_regular()?;
    let m = spec.n_x.max(spec.n_w);
    let c = curve.resample(m)?;
    let dim = c.dim();
    let x_stride = m / spec.n_x;
    let w_stride = m / spec.n_w;
    let band = spec.policy.band();
    let half = spec.n_w / 2;
    let tangents: Vec<T> = (0..m)
        .flat_map(|j| {
            let s = c.node_speed(j);
            c.node_velocity(j).iter().map(move |&v| v / s).collect::<Vec<_>>()
        })
        .collect();
    let tan = |j: usize| &tangents[j * dim..(j + 1) * dim];
    let band_weight = T::from_count(2 * band - 1);

    struct Row<T> {
        sums: [T; 3],
        rem: [T; 3],
        min_ratio: T,
    }

    let rows: Vec<Row<T>> = (0..spec.n_x)
        .into_par_iter()
        .map(|ix| {
            let i = ix * x_stride;
            let mut buf = vec![T::zero(); dim];
            let mut acc = [CompensatedSum::new(), CompensatedSum::new(), CompensatedSum::new()];
            let mut min_ratio = T::infinity();
            let (pi, ti, si) = (c.node(i), tan(i), c.node_speed(i));
            let k2 = c.node_kappa_sq_speed_sq(i);
            let limits = [k2 / T::lit(12.0), k2 / T::lit(2.0), -k2 / T::lit(2.0)];
            let mut edge = [T::zero(); 3];
            for kw in band..=half {
                let reps = if kw == half { 1 } else { 2 };
                for side in 0..reps {
                    let off = kw * w_stride;
                    let j = if side == 0 { (i + off) % m } else { (i + m - off) % m };
                    let d = c.node_arc_distance(i, j);
                    let (t, ratio) = pair_terms(pi, ti, si, c.node(j), tan(j), c.node_speed(j), d, &mut buf);
                    min_ratio = min_ratio.min(ratio);
                    acc[0].add(t.mobius);
                    acc[1].add(t.e1);
                    acc[2].add(t.e2);
                    if kw == band {
                        edge[0] = edge[0].max((t.mobius - limits[0]).abs());
                        edge[1] = edge[1].max((t.e1 - limits[1]).abs());
                        edge[2] = edge[2].max((t.e2 - limits[2]).abs());
                    }
                }
            }
            let mut sums = [T::zero(); 3];
            let mut rem = [T::zero(); 3];
            for e in 0..3 {
                acc[e].add(limits[e] * band_weight);
                sums[e] = acc[e].value();
                rem[e] = edge[e] * band_weight;
            }
            Row { sums, rem, min_ratio }
        })
        .collect();

    let scale = T::one() / (T::from_count(spec.n_x) * T::from_count(spec.n_w));
    let mut totals = [CompensatedSum::new(), CompensatedSum::new(), CompensatedSum::new()];
    let mut rems = [CompensatedSum::new(), CompensatedSum::new(), CompensatedSum::new()];
    let mut min_ratio = T::infinity();
    for row in &rows {
        for e in 0..3 {
            totals[e].add(row.sums[e]);
            rems[e].add(row.rem[e]);
        }
        min_ratio = min_ratio.min(row.min_ratio);
    }
    if min_ratio <= T::lit(NEAR_DEGENERATE_TOL) {
        return Err(Error::NonEmbedded {
            bilipschitz: min_ratio.as_f64(),
            threshold: NEAR_DEGENERATE_TOL,
        });
    }
    let [e_mobius, e1, e2] = [0, 1, 2].map(|e| totals[e].value() * scale);
    Ok(EnergyReport {
        e_mobius,
        e1,
        e2,
        residual: e_mobius - e1 - e2 - T::lit(4.0),
        remainders: [0, 1, 2].map(|e| rems[e].value() * scale),
        min_chord_arc: min_ratio,
        spec: *spec,
    })
}

/// O'Hara's Moebius energy.
pub fn mobius_energy<T: Real>(curve: &ClosedCurve<T>, spec: &QuadratureSpec) -> Result<T> {
    Ok(energy_report(curve, spec)?.e_mobius)
}

/// `E1 = int int |tau(x) - tau(y)|^2 / (2 |gamma(x) - gamma(y)|^2) |gamma'(x)| |gamma'(y)|`.
pub fn e1<T: Real>(curve: &ClosedCurve<T>, spec: &QuadratureSpec) -> Result<T> {
    Ok(energy_report(curve, spec)?.e1)
}

/// The determinant part `E2`.
pub fn e2<T: Real>(curve: &ClosedCurve<T>, spec: &QuadratureSpec) -> Result<T> {
    Ok(energy_report(curve, spec)?.e2)
}

struct PointData<T> {
    p: Vec<T>,
    tangent: Vec<T>,
    speed: T,
}

fn point_data<T: Real>(curve: &ClosedCurve<T>, t: T) -> PointData<T> {
    let dim = curve.dim();
    let mut p = vec![T::zero(); dim];
    let mut v = vec![T::zero(); dim];
    curve.eval_into(t, &mut p);
    curve.derivative_into(t, 1, &mut v);
    let speed = vec::norm(&v);
    let tangent = v.iter().map(|&x| x / speed).collect();
    PointData { p, tangent, speed }
}

/// Pointwise Moebius integrand `I(x, w)`; `w != 0`.
pub fn integrand_i<T: Real>(curve: &ClosedCurve<T>, x: T, w: T) -> T {
    let a = point_data(curve, x);
    let b = point_data(curve, x + w);
    let d = curve.arc_distance(x, x + w);
    let mut buf = vec![T::zero(); curve.dim()];
    pair_terms(&a.p, &a.tangent, a.speed, &b.p, &b.tangent, b.speed, d, &mut buf).0.mobius
}

/// Pointwise `(I_mob, I_1, I_2)` at `(x, w)`; `w != 0`.
pub fn integrands<T: Real>(curve: &ClosedCurve<T>, x: T, w: T) -> (T, T, T) {
    let a = point_data(curve, x);
    let b = point_data(curve, x + w);
    let d = curve.arc_distance(x, x + w);
    let mut buf = vec![T::zero(); curve.dim()];
    let t = pair_terms(&a.p, &a.tangent, a.speed, &b.p, &b.tangent, b.speed, d, &mut buf).0;
    (t.mobius, t.e1, t.e2)
}

/// Double-average majorant
/// `int_0^1 int_0^1 |gamma'(x + s1 w) - gamma'(x + s2 w)|^2 ds1 ds2 / w^2`
/// by the 8 x 8 Gauss-Legendre product rule.
pub fn integrand_majorant<T: Real>(curve: &ClosedCurve<T>, x: T, w: T) -> T {
    let (nodes, weights) = GAUSS8_UNIT;
    let dim = curve.dim();
    let vel: Vec<Vec<T>> = nodes
        .iter()
        .map(|&s| {
            let mut v = vec![T::zero(); dim];
            curve.derivative_into(x + T::lit(s) * w, 1, &mut v);
            v
        })
        .collect();
    let mut acc = CompensatedSum::new();
    for a in 0..8 {
        for b in 0..8 {
            acc.add(T::lit(weights[a] * weights[b]) * vec::dist_sq(&vel[a], &vel[b]));
        }
    }
    acc.value() / (w * w)
}

/// `|a||b| - <a, b>`.
pub fn alignment_defect<T: Real>(a: &[T], b: &[T]) -> T {
    vec::norm(a) * vec::norm(b) - vec::dot(a, b)
}

/// Upper bound `2 (|b| / |a|) |a - b|^2` for [`alignment_defect`].
pub fn alignment_bound<T: Real>(a: &[T], b: &[T]) -> T {
    T::lit(2.0) * vec::norm(b) / vec::norm(a) * vec::dist_sq(a, b)
}

/// Energies of an arc-length open curve on `[-R, R]`, reference distance
/// `|x - y|`, with the truncation tail estimate.
#[derive(Clone, Debug, PartialEq)]
pub struct OpenEnergyReport<T> {
    pub e_mobius: T,
    pub e1: T,
    pub e2: T,
    /// `int int |tau(x) - tau(y)|^2 / |x - y|^2` over the pairs with
    /// `max(|x|, |y|) >= R / 2`: the energy carried by the outer half of the
    /// window, used as the estimate of what lies beyond it.
    pub tail_estimate: T,
    pub half_width: T,
    pub samples: usize,
}

/// Defect allowed between chord and parameter spacing of consecutive samples.
pub const OPEN_ARCLENGTH_TOL: f64 = 1e-2;

pub fn open_energy_report<T: Real>(curve: &OpenCurve<T>, spec: &QuadratureSpec) -> Result<OpenEnergyReport<T>> {
    curve.check_arclength(T::lit(OPEN_ARCLENGTH_TOL))?;
    let m = curve.len();
    let h = curve.spacing();
    let dim = curve.dim();
    let band = spec.policy.band();
    let half_r = curve.half_width() * T::lit(0.5);
    let weight = |i: usize| if i == 0 || i + 1 == m { h * T::lit(0.5) } else { h };
    let rows: Vec<[T; 4]> = (0..m)
        .into_par_iter()
        .map(|i| {
            let mut buf = vec![T::zero(); dim];
            let mut acc = [
                CompensatedSum::new(),
                CompensatedSum::new(),
                CompensatedSum::new(),
                CompensatedSum::new(),
            ];
            let (pi, ti, xi) = (curve.point(i), curve.tangent(i), curve.param(i));
            let outer_i = xi.abs() >= half_r;
            for j in 0..m {
                let gap = i.abs_diff(j);
                if gap < band {
                    continue;
                }
                let d = h * T::from_count(gap);
                let (t, _) = pair_terms(pi, ti, T::one(), curve.point(j), curve.tangent(j), T::one(), d, &mut buf);
                let wj = weight(j);
                acc[0].add(t.mobius * wj);
                acc[1].add(t.e1 * wj);
                acc[2].add(t.e2 * wj);
                if outer_i || curve.param(j).abs() >= half_r {
                    acc[3].add(vec::dist_sq(ti, curve.tangent(j)) / (d * d) * wj);
                }
            }
            let k2 = curve.curvature_sq(i);
            let bw = h * T::from_count(2 * band - 1);
            acc[0].add(k2 / T::lit(12.0) * bw);
            acc[1].add(k2 / T::lit(2.0) * bw);
            acc[2].add(-k2 / T::lit(2.0) * bw);
            let wi = weight(i);
            [0, 1, 2, 3].map(|e| acc[e].value() * wi)
        })
        .collect();
    let mut totals = [CompensatedSum::new(), CompensatedSum::new(), CompensatedSum::new(), CompensatedSum::new()];
    for r in &rows {
        for e in 0..4 {
            totals[e].add(r[e]);
        }
    }
    Ok(OpenEnergyReport {
        e_mobius: totals[0].value(),
        e1: totals[1].value(),
        e2: totals[2].value(),
        tail_estimate: totals[3].value(),
        half_width: curve.half_width(),
        samples: m,
    })
}

pub fn mobius_energy_open<T: Real>(curve: &OpenCurve<T>, spec: &QuadratureSpec) -> Result<T> {
    Ok(open_energy_report(curve, spec)?.e_mobius)
}

pub fn e1_open<T: Real>(curve: &OpenCurve<T>, spec: &QuadratureSpec) -> Result<T> {
    Ok(open_energy_report(curve, spec)?.e1)
}

pub fn e2_open<T: Real>(curve: &OpenCurve<T>, spec: &QuadratureSpec) -> Result<T> {
    Ok(open_energy_report(curve, spec)?.e2)
}

/// `E_{B_R}`: the open-curve Moebius energy restricted to `[-radius, radius]^2`.
pub fn restricted_mobius_energy<T: Real>(curve: &OpenCurve<T>, radius: T, spec: &QuadratureSpec) -> Result<T> {
    mobius_energy_open(&curve.restrict(radius)?, spec)
}
