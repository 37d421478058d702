//! Experiment configuration files (TOML).

use std::path::{Path, PathBuf};

use knot_energy::io::CurveSpec;
use knot_energy::{DiagonalPolicy, QuadratureSpec};
use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub curve: CurveSpec,
    pub experiment: Experiment,
    /// Output directory, overridden by `--out`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Policy {
    ExcludeBand,
    AnalyticLimit,
}

/// Grid for the double integrals. `tolerance` is what the experiment asserts.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Quadrature {
    pub n_x: usize,
    pub n_w: usize,
    pub policy: Policy,
    /// Excluded band half-width in w-cells (exclude-band only).
    pub band: usize,
    pub tolerance: f64,
}

impl Quadrature {
    pub fn spec(&self) -> Result<QuadratureSpec, knot_energy::Error> {
        let policy = match self.policy {
            Policy::ExcludeBand => DiagonalPolicy::ExcludeBand { cells: self.band },
            Policy::AnalyticLimit => DiagonalPolicy::AnalyticLimit,
        };
        QuadratureSpec::new(self.n_x, self.n_w, policy, self.tolerance)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Center {
    /// Curve parameter of the center.
    OnCurve(f64),
    Point(Vec<f64>),
}

impl std::str::FromStr for Center {
    type Err = String;

    /// `on-curve:T` or `point:X,Y[,Z..]`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (kind, rest) = s.split_once(':').ok_or("expected on-curve:T or point:X,Y,..")?;
        match kind {
            "on-curve" => rest.trim().parse().map(Center::OnCurve).map_err(|e| format!("{e}")),
            "point" => rest
                .split(',')
                .map(|v| v.trim().parse::<f64>())
                .collect::<Result<Vec<_>, _>>()
                .map(Center::Point)
                .map_err(|e| format!("{e}")),
            other => Err(format!("unknown center kind '{other}'")),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum Experiment {
    Energy {
        quadrature: Quadrature,
    },
    Decompose {
        quadrature: Quadrature,
    },
    MollifySweep {
        eps: Vec<f64>,
        /// Energies of each mollified curve are added when present.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        quadrature: Option<Quadrature>,
    },
    ReparamConverge {
        eps: Vec<f64>,
        grid: usize,
    },
    GammaSweep {
        m: Vec<usize>,
        mollify_first: bool,
        quadrature: Quadrature,
    },
    Invert {
        center: Center,
        radius: f64,
        /// Half-width of the arc-length window of an open image.
        rdom: f64,
        samples: usize,
        /// Allowed relative change of the checked identities.
        tolerance: f64,
        quadrature: Quadrature,
    },
    Inscribe {
        n: usize,
        x0: f64,
        /// Allowed closing residual relative to the curve length.
        tolerance: f64,
    },
    Sobolev {
        s: f64,
        p: f64,
        grid: usize,
        radii: Vec<f64>,
    },
}

impl Experiment {
    pub fn kind(&self) -> &'static str {
        match self {
            Experiment::Energy { .. } => "energy",
            Experiment::Decompose { .. } => "decompose",
            Experiment::MollifySweep { .. } => "mollify-sweep",
            Experiment::ReparamConverge { .. } => "reparam-converge",
            Experiment::GammaSweep { .. } => "gamma-sweep",
            Experiment::Invert { .. } => "invert",
            Experiment::Inscribe { .. } => "inscribe",
            Experiment::Sobolev { .. } => "sobolev",
        }
    }
}

fn invalid(field: &str, msg: impl std::fmt::Display) -> CliError {
    CliError::Validation(format!("{field}: {msg}"))
}

fn check_eps(eps: &[f64]) -> Result<(), CliError> {
    if eps.is_empty() {
        return Err(invalid("experiment.eps", "empty list"));
    }
    for (i, &e) in eps.iter().enumerate() {
        if !(e > 0.0 && e < 0.5) {
            return Err(invalid(&format!("experiment.eps[{i}]"), format!("{e} outside (0, 1/2)")));
        }
    }
    Ok(())
}

fn check_quad(q: &Quadrature, field: &str) -> Result<(), CliError> {
    q.spec().map(|_| ()).map_err(|e| invalid(field, e))
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self, CliError> {
        let cfg: Self = toml::from_str(text).map_err(|e| CliError::Validation(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Validation(format!("{}: {e}", path.display())))?;
        Self::from_toml(&text).map_err(|e| match e {
            CliError::Validation(m) => CliError::Validation(format!("{}: {m}", path.display())),
            other => other,
        })
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<(), CliError> {
        self.curve.validate().map_err(|e| invalid("curve", e))?;
        match &self.experiment {
            Experiment::Energy { quadrature } | Experiment::Decompose { quadrature } => {
                check_quad(quadrature, "experiment.quadrature")
            }
            Experiment::MollifySweep { eps, quadrature } => {
                check_eps(eps)?;
                quadrature.as_ref().map_or(Ok(()), |q| check_quad(q, "experiment.quadrature"))
            }
            Experiment::ReparamConverge { eps, grid } => {
                check_eps(eps)?;
                if *grid < 64 || grid % 2 != 0 {
                    return Err(invalid("experiment.grid", "need an even grid >= 64"));
                }
                Ok(())
            }
            Experiment::GammaSweep { m, quadrature, .. } => {
                if m.is_empty() {
                    return Err(invalid("experiment.m", "empty list"));
                }
                if let Some((i, v)) = m.iter().enumerate().find(|(_, &v)| v < 3) {
                    return Err(invalid(&format!("experiment.m[{i}]"), format!("{v} < 3")));
                }
                check_quad(quadrature, "experiment.quadrature")
            }
            Experiment::Invert {
                center,
                radius,
                rdom,
                samples,
                tolerance,
                quadrature,
            } => {
                if let Center::OnCurve(t) = center {
                    if !t.is_finite() {
                        return Err(invalid("experiment.center.on_curve", "not finite"));
                    }
                }
                if !(*radius > 0.0) {
                    return Err(invalid("experiment.radius", "must be positive"));
                }
                if !(*rdom > 0.0) {
                    return Err(invalid("experiment.rdom", "must be positive"));
                }
                if *samples < 3 {
                    return Err(invalid("experiment.samples", "need at least 3"));
                }
                if !(*tolerance > 0.0) {
                    return Err(invalid("experiment.tolerance", "must be positive"));
                }
                check_quad(quadrature, "experiment.quadrature")
            }
            Experiment::Inscribe { n, x0, tolerance } => {
                if *n < 2 {
                    return Err(invalid("experiment.n", "need n >= 2"));
                }
                if !x0.is_finite() {
                    return Err(invalid("experiment.x0", "not finite"));
                }
                if !(*tolerance > 0.0) {
                    return Err(invalid("experiment.tolerance", "must be positive"));
                }
                Ok(())
            }
            Experiment::Sobolev { s, p, grid, radii } => {
                if !(*s > 0.0 && *s < 1.0 && *p >= 1.0) {
                    return Err(invalid("experiment.s/p", "need 0 < s < 1 and p >= 1"));
                }
                if *grid < 64 || grid % 2 != 0 {
                    return Err(invalid("experiment.grid", "need an even grid >= 64"));
                }
                if let Some((i, r)) = radii.iter().enumerate().find(|(_, &r)| !(r > 0.0 && r <= 0.25)) {
                    return Err(invalid(&format!("experiment.radii[{i}]"), format!("{r} outside (0, 1/4]")));
                }
                Ok(())
            }
        }
    }
}
