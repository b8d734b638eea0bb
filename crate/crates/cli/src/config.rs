//! Run configuration: defaults, then an optional TOML file, then flags.

use std::path::{Path, PathBuf};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use szeta::zeta::MAX_ORDER;
use szeta::{Circle, GroupConfig, Mode};

use crate::CliError;

pub const DEFAULT_ORDER: usize = 13;
pub const DEFAULT_NUM_CIRCLES: usize = 3;

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub group: GroupSpec,
    #[serde(default)]
    pub zeta: ZetaSettings,
    #[serde(default)]
    pub tolerances: Tolerances,
    /// Where results go and how they are computed; never affects values,
    /// so it is left out of serialized headers.
    #[serde(default, skip_serializing)]
    pub io: IoSettings,
}

/// Either a symmetric configuration or explicit circles `[re, im, radius]`.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GroupSpec {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub angle_degrees: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub num_circles: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub circles: Option<Vec<[f64; 3]>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ZetaSettings {
    #[serde(rename = "M")]
    pub order: usize,
    pub mode: Mode,
}

impl Default for ZetaSettings {
    fn default() -> Self {
        ZetaSettings { order: DEFAULT_ORDER, mode: Mode::Conformal }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Tolerances {
    pub newton_tol: f64,
    pub quad_tol: f64,
    pub power_tol: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            newton_tol: 1e-12,
            quad_tol: szeta::ContourOptions::default().quad_tol,
            power_tol: szeta::PowerOptions::default().tol,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IoSettings {
    pub cache: Option<PathBuf>,
    pub output: Option<PathBuf>,
    pub threads: Option<usize>,
}

impl RunConfig {
    pub fn from_file(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
        Self::from_toml(&text).map_err(|e| CliError::Usage(format!("config {}: {e}", path.display())))
    }

    pub fn from_toml(text: &str) -> Result<Self, toml::de::Error> {
        toml::from_str(text)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("run config always serializes")
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let order = self.zeta.order;
        if !(1..=MAX_ORDER).contains(&order) {
            return Err(CliError::Usage(format!("M must lie in 1..={MAX_ORDER}, got {order}")));
        }
        let t = &self.tolerances;
        for (name, value) in [("newton_tol", t.newton_tol), ("quad_tol", t.quad_tol), ("power_tol", t.power_tol)] {
            if !(value > 0.0 && value.is_finite()) {
                return Err(CliError::Usage(format!("{name} must be positive, got {value}")));
            }
        }
        if self.io.threads == Some(0) {
            return Err(CliError::Usage("threads must be at least 1".into()));
        }
        let g = &self.group;
        match (g.angle_degrees, &g.circles) {
            (Some(_), Some(_)) => Err(CliError::Usage("give either angle_degrees or circles, not both".into())),
            (None, None) => Err(CliError::Usage("no group given: use --theta or a [group] section".into())),
            (None, Some(_)) if g.num_circles.is_some() => {
                Err(CliError::Usage("num_circles only applies to symmetric configurations".into()))
            }
            _ => Ok(()),
        }
    }

    /// Builds the validated group; geometric failures are domain errors.
    pub fn group(&self) -> Result<GroupConfig, CliError> {
        let g = &self.group;
        let config = match (&g.circles, g.angle_degrees) {
            (Some(circles), _) => GroupConfig::from_circles(
                circles.iter().map(|&[re, im, r]| Circle::new(Complex64::new(re, im), r)).collect(),
            )?,
            (None, Some(theta)) => GroupConfig::symmetric(theta, g.num_circles.unwrap_or(DEFAULT_NUM_CIRCLES))?,
            (None, None) => return Err(CliError::Usage("no group given".into())),
        };
        Ok(config)
    }

    pub fn power_options(&self) -> szeta::PowerOptions {
        szeta::PowerOptions { tol: self.tolerances.power_tol, ..Default::default() }
    }

    pub fn contour_options(&self) -> szeta::ContourOptions {
        szeta::ContourOptions { quad_tol: self.tolerances.quad_tol, ..Default::default() }
    }
}
