//! Periodic mollification `gamma_eps = gamma * eta_eps` by a smooth bump, and
//! the speed diagnostics that go with it.

use std::collections::HashMap;
use std::sync::{Arc, OnceLock, RwLock};

use num_complex::Complex;

use crate::curve::{ClosedCurve, CurveSource};
use crate::error::{Error, Result};
use crate::quad;
use crate::scalar::{vec, Real};

/// Minimum speed a mollified curve must keep to count as regular.
pub const REGULAR_SPEED_CUT: f64 = 0.5;

#[inline]
fn raw_bump(x: f64) -> f64 {
    if x.abs() >= 1.0 {
        0.0
    } else {
        (-1.0 / (1.0 - x * x)).exp()
    }
}

/// `Z = int_{-1}^{1} exp(-1 / (1 - u^2)) du`, computed once.
pub fn bump_normalization() -> f64 {
    static Z: OnceLock<f64> = OnceLock::new();
    *Z.get_or_init(|| 2.0 * quad::integrate(raw_bump, 0.0, 1.0, 1e-16, 16))
}

/// Unit-mass bump `Z^{-1} exp(-1 / (1 - x^2))` supported in `(-1, 1)`.
pub fn bump_profile<T: Real>(x: T) -> T {
    T::lit(raw_bump(x.as_f64()) / bump_normalization())
}

/// Second moment `int u^2 eta(u) du` of the unscaled profile.
pub fn bump_second_moment() -> f64 {
    static M2: OnceLock<f64> = OnceLock::new();
    *M2.get_or_init(|| {
        2.0 * quad::integrate(|u: f64| u * u * raw_bump(u), 0.0, 1.0, 1e-16, 16)
            / bump_normalization()
    })
}

type Cache = RwLock<HashMap<u64, Arc<Vec<f64>>>>;

fn cache() -> &'static Cache {
    static CACHE: OnceLock<Cache> = OnceLock::new();
    CACHE.get_or_init(Default::default)
}

/// The scaled kernel `eta_eps(x) = eta(x / eps) / eps`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MollifierKernel {
    epsilon: f64,
}

impl MollifierKernel {
    pub fn new(epsilon: f64) -> Result<Self> {
        if !(epsilon > 0.0 && epsilon < 0.5) {
            return Err(Error::EpsOutOfRange(epsilon));
        }
        Ok(Self { epsilon })
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn second_moment(&self) -> f64 {
        bump_second_moment()
    }

    pub fn eval(&self, x: f64) -> f64 {
        raw_bump(x / self.epsilon) / (bump_normalization() * self.epsilon)
    }

    fn compute_multiplier(&self, k: usize) -> f64 {
        if k == 0 {
            return 1.0;
        }
        let w = std::f64::consts::TAU * k as f64 * self.epsilon;
        let panels = 16 + (w / 2.0).ceil() as usize;
        2.0 * quad::integrate(|u: f64| raw_bump(u) * (w * u).cos(), 0.0, 1.0, 1e-16, panels)
            / bump_normalization()
    }

    /// Fourier multipliers `eta_eps^(k) = int eta_eps(y) e^{-2 pi i k y} dy` for
    /// `k = 0..=k_max`. Cached per `eps`.
    pub fn multipliers(&self, k_max: usize) -> Arc<Vec<f64>> {
        let key = self.epsilon.to_bits();
        if let Some(v) = cache().read().unwrap().get(&key) {
            if v.len() > k_max {
                return Arc::clone(v);
            }
        }
        let mut guard = cache().write().unwrap();
        let existing = guard.get(&key).cloned();
        if let Some(v) = &existing {
            if v.len() > k_max {
                return Arc::clone(v);
            }
        }
        let mut values = existing.map(|v| v.to_vec()).unwrap_or_default();
        for k in values.len()..=k_max {
            values.push(self.compute_multiplier(k));
        }
        let values = Arc::new(values);
        guard.insert(key, Arc::clone(&values));
        values
    }

    pub fn multiplier(&self, k: i64) -> f64 {
        let k = k.unsigned_abs() as usize;
        self.multipliers(k)[k]
    }
}

/// Periodic convolution with `eta_eps`, applied as a Fourier multiplier.
pub fn mollify<T: Real>(curve: &ClosedCurve<T>, eps: f64) -> Result<ClosedCurve<T>> {
    let kernel = MollifierKernel::new(eps)?;
    let table = kernel.multipliers(curve.len() / 2);
    curve.with_multiplier(
        |k| Complex::new(T::lit(table[k.unsigned_abs() as usize]), T::zero()),
        CurveSource::Derived(format!("mollified eps={eps}")),
    )
}

/// Oversampling factor used for "dense grid" speed statistics.
pub const DENSE_FACTOR: usize = 4;

/// Minimum and maximum of `|gamma'|` over a grid `DENSE_FACTOR` times finer than the samples.
pub fn speed_range<T: Real>(curve: &ClosedCurve<T>) -> (T, T) {
    let dense = curve
        .resample(curve.len() * DENSE_FACTOR)
        .expect("upsampling a valid curve");
    (dense.min_speed(), dense.max_speed())
}

/// `sup_t | |gamma'(t)| - 1 |` over the dense grid.
pub fn speed_deviation<T: Real>(curve: &ClosedCurve<T>) -> T {
    let dense = curve
        .resample(curve.len() * DENSE_FACTOR)
        .expect("upsampling a valid curve");
    dense.node_speed_deviation()
}

/// Outcome of scanning a decreasing list of widths for regularity.
#[derive(Clone, Debug, PartialEq)]
pub struct RegularityScan {
    /// Largest grid width whose mollification, and that of every smaller grid
    /// width, keeps min speed above `REGULAR_SPEED_CUT`; `0.0` when none does.
    pub threshold: f64,
    /// `(eps, min speed)` for every grid entry, in grid order.
    pub min_speeds: Vec<(f64, f64)>,
}

impl RegularityScan {
    /// Whether min speed is non-decreasing as eps decreases along the grid.
    pub fn is_monotone(&self) -> bool {
        self.min_speeds.windows(2).all(|w| w[1].1 >= w[0].1)
    }
}

/// Largest eps on a decreasing grid past which every mollification is regular.
pub fn regularity_threshold<T: Real>(curve: &ClosedCurve<T>, eps_grid: &[f64]) -> Result<RegularityScan> {
    if eps_grid.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::InvalidArgument("eps grid must be strictly decreasing".into()));
    }
    let mut min_speeds = Vec::with_capacity(eps_grid.len());
    for &eps in eps_grid {
        let (lo, _) = speed_range(&mollify(curve, eps)?);
        min_speeds.push((eps, lo.as_f64()));
    }
    let mut threshold = 0.0;
    for &(eps, lo) in min_speeds.iter().rev() {
        if lo > REGULAR_SPEED_CUT {
            threshold = eps;
        } else {
            break;
        }
    }
    Ok(RegularityScan {
        threshold,
        min_speeds,
    })
}

/// One row of a mollification sweep.
#[derive(Clone, Debug, PartialEq)]
pub struct MollifySweepRow {
    pub epsilon: f64,
    pub speed_min: f64,
    pub speed_max: f64,
    pub speed_deviation: f64,
    /// `(E_mob, E1, E2)` of the mollified curve, when requested.
    pub energies: Option<(f64, f64, f64)>,
}

/// Speed statistics of `mollify(curve, eps)` for each eps.
pub fn mollify_sweep<T: Real>(curve: &ClosedCurve<T>, eps_list: &[f64]) -> Result<Vec<MollifySweepRow>> {
    eps_list
        .iter()
        .map(|&eps| {
            let m = mollify(curve, eps)?;
            let dense = m.resample(m.len() * DENSE_FACTOR)?;
            Ok(MollifySweepRow {
                epsilon: eps,
                speed_min: dense.min_speed().as_f64(),
                speed_max: dense.max_speed().as_f64(),
                speed_deviation: dense.node_speed_deviation().as_f64(),
                energies: None,
            })
        })
        .collect()
}

/// Sup-norm distance between two curves sampled on the same grid.
pub fn sup_distance<T: Real>(a: &ClosedCurve<T>, b: &ClosedCurve<T>) -> Result<T> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch {
            left: a.dim(),
            right: b.dim(),
        });
    }
    let m = a.len().max(b.len()) * DENSE_FACTOR;
    let (a, b) = (a.resample(m)?, b.resample(m)?);
    Ok((0..m)
        .map(|j| vec::dist(a.node(j), b.node(j)))
        .fold(T::zero(), T::max))
}
