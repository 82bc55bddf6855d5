//! Parameter paths selectable from the command line.

use std::path::PathBuf;
use std::sync::Arc;

use anyhow::{Context, Result};
use clap::{Args, ValueEnum};
use levelcross::path::{make_beta_path, BetaFamilyParams, ParameterPath, SampledPath};
use levelcross::schedule::ScheduleOptions;
use levelcross::stirap::{default_gamma_start, StirapParams, StirapReducedPath};
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    /// `θ = θ₀ + Γ^β`, `B = Γ/τ`
    Beta,
    /// Late leg of the Gaussian STIRAP sequence
    Stirap,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct PathFlags {
    /// Built-in path family.
    #[arg(long, value_enum)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub family: Option<Family>,
    /// CSV table with columns gamma,b,theta,phi; replaces the family.
    #[arg(long, value_name = "CSV")]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub path: Option<PathBuf>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub beta: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub theta0: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tau: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub phi0: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gamma_max: Option<f64>,
    /// Laser detuning Δ of the STIRAP family.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detuning: Option<f64>,
    /// Pulse peak Ω₀ of the STIRAP family.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub omega0: Option<f64>,
    /// Allowed adiabaticity violation δ.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub delta: Option<f64>,
    /// Starting Γ; defaults to the far end of the path from the crossing.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gamma_start: Option<f64>,
    /// Local relative tolerance of the schedule quadrature.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rtol: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_log_step: Option<f64>,
    /// Stop once |Γ − Γc| falls to this fraction of its start value.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub stop_fraction: Option<f64>,
    /// Margin around exponent 1 separating finite from infinite approach times.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fit_margin: Option<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct PathConfig {
    pub family: Family,
    pub path: Option<PathBuf>,
    pub beta: f64,
    pub theta0: f64,
    pub tau: f64,
    pub phi0: f64,
    pub gamma_max: f64,
    pub detuning: f64,
    pub omega0: f64,
    pub delta: f64,
    pub gamma_start: Option<f64>,
    pub rtol: f64,
    pub max_log_step: f64,
    pub stop_fraction: f64,
    pub fit_margin: f64,
}

impl Default for PathConfig {
    fn default() -> Self {
        let opts = ScheduleOptions::default();
        Self {
            family: Family::Beta,
            path: None,
            beta: 2.0,
            theta0: 0.3,
            tau: 1.0,
            phi0: 0.0,
            gamma_max: 2.0,
            detuning: 1.0,
            omega0: 1.0,
            delta: 0.01,
            gamma_start: None,
            rtol: opts.rtol,
            max_log_step: opts.max_log_step,
            stop_fraction: opts.stop_fraction,
            fit_margin: opts.fit_margin,
        }
    }
}

impl PathConfig {
    pub fn options(&self) -> ScheduleOptions {
        ScheduleOptions {
            rtol: self.rtol,
            max_log_step: self.max_log_step,
            stop_fraction: self.stop_fraction,
            fit_margin: self.fit_margin,
            ..ScheduleOptions::default()
        }
    }

    /// Builds the path and fills in a missing `gamma_start`.
    pub fn build(&mut self) -> Result<Arc<dyn ParameterPath>> {
        let path: Arc<dyn ParameterPath> = if let Some(csv) = &self.path {
            Arc::new(
                SampledPath::from_csv(csv)
                    .with_context(|| format!("loading path table {}", csv.display()))?,
            )
        } else {
            match self.family {
                Family::Beta => Arc::new(make_beta_path(
                    BetaFamilyParams::new(self.beta, self.theta0, self.tau, self.phi0)?,
                    self.gamma_max,
                )?),
                Family::Stirap => {
                    let p = StirapParams::pulses(self.detuning, self.omega0)?;
                    if self.gamma_start.is_none() {
                        self.gamma_start = Some(default_gamma_start(&p, self.delta)?);
                    }
                    Arc::new(StirapReducedPath::new(&p, self.delta)?)
                }
            }
        };
        if self.gamma_start.is_none() {
            let (lo, hi) = path.gamma_range();
            let c = path.crossing_gamma().unwrap_or(lo);
            let far = if (hi - c).abs() >= (c - lo).abs() {
                hi
            } else {
                lo
            };
            // built-in families start no farther out than Γ = 1
            self.gamma_start = Some(if self.path.is_none() {
                far.min(1.0)
            } else {
                far
            });
        }
        Ok(path)
    }
}
