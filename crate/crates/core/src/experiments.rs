//! Sweeps that tie mollification, reparametrization and the energies together.

use serde::Serialize;

use crate::curve::ClosedCurve;
use crate::energies::{energy_report, EnergyReport, QuadratureSpec};
use crate::error::{Error, Result};
use crate::mollify::{mollify, mollify_sweep, sup_distance, MollifySweepRow};
use crate::scalar::Real;
use crate::sobolev::{w12_seminorm, PeriodicFunction};

/// Differences below this are treated as converged when judging trends.
pub const NOISE_FLOOR: f64 = 1e-9;

/// Each value is at most its predecessor or already below `floor`.
pub fn decreasing(values: &[f64], floor: f64) -> bool {
    values.windows(2).all(|w| w[1] <= w[0] || w[1] <= floor)
}

/// Least-squares slope of `log y` against `log x`.
pub fn fitted_order(x: &[f64], y: &[f64]) -> Option<f64> {
    let pts: Vec<(f64, f64)> = x
        .iter()
        .zip(y)
        .filter(|(a, b)| **a > 0.0 && **b > 0.0)
        .map(|(a, b)| (a.ln(), b.ln()))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

/// Unit length, unit speed version of `curve`.
pub fn normalize<T: Real>(curve: &ClosedCurve<T>) -> Result<ClosedCurve<T>> {
    curve.reparametrize_by_arclength()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ReparamRow {
    pub epsilon: f64,
    pub sup_distance: f64,
    pub w12_distance: f64,
    pub w12_remainder: f64,
}

/// For each eps: mollify, rescale to unit length, reparametrize by arc length
/// from parameter 0, and measure the distance to `curve` in sup norm and the
/// `W^{1/2,2}` distance of the derivatives on `grid` points.
pub fn reparam_converge<T: Real>(curve: &ClosedCurve<T>, eps_list: &[f64], grid: usize) -> Result<Vec<ReparamRow>> {
    if !curve.is_unit_speed() {
        return Err(Error::InvalidArgument("reparam-converge needs a unit-speed curve".into()));
    }
    let base = PeriodicFunction::velocity_of(curve);
    eps_list
        .iter()
        .map(|&eps| {
            let smooth = mollify(curve, eps)?.reparametrize_by_arclength()?;
            let w = w12_seminorm(&PeriodicFunction::velocity_of(&smooth), &base, grid)?;
            Ok(ReparamRow {
                epsilon: eps,
                sup_distance: sup_distance(&smooth, curve)?.as_f64(),
                w12_distance: w.value.as_f64(),
                w12_remainder: w.remainder_estimate.as_f64(),
            })
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EnergyConvergenceRow {
    pub epsilon: f64,
    pub e_mobius: f64,
    pub e1: f64,
    pub e2: f64,
    pub d_mobius: f64,
    pub d_e1: f64,
    pub d_e2: f64,
    pub remainder: f64,
}

/// Energies of `gamma_eps` against those of `gamma`.
pub fn energy_convergence<T: Real>(
    curve: &ClosedCurve<T>,
    eps_list: &[f64],
    spec: &QuadratureSpec,
) -> Result<(EnergyReport<T>, Vec<EnergyConvergenceRow>)> {
    let base = energy_report(curve, spec)?;
    let rows = eps_list
        .iter()
        .map(|&eps| {
            let r = energy_report(&mollify(curve, eps)?, spec)?;
            Ok(EnergyConvergenceRow {
                epsilon: eps,
                e_mobius: r.e_mobius.as_f64(),
                e1: r.e1.as_f64(),
                e2: r.e2.as_f64(),
                d_mobius: (r.e_mobius - base.e_mobius).abs().as_f64(),
                d_e1: (r.e1 - base.e1).abs().as_f64(),
                d_e2: (r.e2 - base.e2).abs().as_f64(),
                remainder: r.remainder_estimate().as_f64(),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok((base, rows))
}

/// Speed statistics of the mollified curves together with their energies.
pub fn mollify_energy_sweep<T: Real>(
    curve: &ClosedCurve<T>,
    eps_list: &[f64],
    spec: &QuadratureSpec,
) -> Result<Vec<MollifySweepRow>> {
    let mut rows = mollify_sweep(curve, eps_list)?;
    for row in &mut rows {
        let r = energy_report(&mollify(curve, row.epsilon)?, spec)?;
        row.energies = Some((r.e_mobius.as_f64(), r.e1.as_f64(), r.e2.as_f64()));
    }
    Ok(rows)
}
