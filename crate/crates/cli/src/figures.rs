//! `fig` command: data behind the rotating-field, path-family and STIRAP
//! Γ-dynamics figures.

use std::collections::BTreeMap;

use anyhow::Result;
use clap::{Args, Subcommand};
use levelcross::adiabaticity::{spectral_condition, SpectralReport, DEFAULT_SPECTRAL_THRESHOLD};
use levelcross::export::write_float_csv;
use levelcross::path::{make_beta_path, BetaFamilyParams, ParameterPath};
use levelcross::propagator::{
    adiabatic_deviation, fig1_program_with, propagate_with_stride, Fig1Case, Fig1Config, Trajectory,
};
use levelcross::schedule::classify_feasibility;
use levelcross::stirap::{Fig5Data, StirapParams, StirapReducedPath};
use levelcross::{eigensystem, StateVector};
use serde::{Deserialize, Serialize};

use crate::config::{prepare_output, resolve, write_json, Common, CommonFlags};
use crate::{Status, EXIT_OK};

#[derive(Subcommand, Debug)]
pub enum FigureCommand {
    /// Spin-1/2 in a field whose polar angle oscillates at b/2, b and 2b.
    Fig1(Fig1Args),
    /// Field coordinates along the power-law path family.
    Fig2(Fig2Args),
    /// Γ(t) of the uniform-violation schedule on the late STIRAP leg.
    Fig5(Fig5Args),
}

pub fn run(cmd: &FigureCommand) -> Result<Status> {
    match cmd {
        FigureCommand::Fig1(a) => fig1(a),
        FigureCommand::Fig2(a) => fig2(a),
        FigureCommand::Fig5(a) => fig5(a),
    }
}

#[derive(Args, Debug, Serialize)]
pub struct Fig1Args {
    #[command(flatten)]
    #[serde(skip)]
    pub common: CommonFlags,
    /// Field strength.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub b: Option<f64>,
    /// Azimuthal rotation rate.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub phi_rate: Option<f64>,
    /// Peak polar-angle rate.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub amplitude: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub theta0: Option<f64>,
    /// Run length in Larmor periods 2π/b.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub periods: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub steps: Option<usize>,
    /// Record every n-th step.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub stride: Option<usize>,
    /// Samples of the drive for the spectral check.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub spectral_samples: Option<usize>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Fig1RunConfig {
    #[serde(flatten)]
    pub common: Common,
    pub b: f64,
    pub phi_rate: f64,
    pub amplitude: f64,
    pub theta0: f64,
    pub periods: f64,
    pub steps: usize,
    pub stride: usize,
    pub spectral_samples: usize,
}

impl Default for Fig1RunConfig {
    fn default() -> Self {
        let d = Fig1Config::new(Fig1Case::Half, 1.0);
        Self {
            common: Common::default(),
            b: d.b,
            phi_rate: d.phi_rate,
            amplitude: d.amplitude,
            theta0: d.theta0,
            periods: 400.0,
            steps: 25_600,
            stride: 16,
            spectral_samples: 1 << 14,
        }
    }
}

#[derive(Serialize)]
struct Fig1Summary {
    adiabatic_deviation: f64,
    spectral: SpectralReport,
}

/// Writes `fig1_<case>.csv` trajectories and `fig1_summary.json`.
fn fig1(args: &Fig1Args) -> Result<Status> {
    let cfg: Fig1RunConfig = resolve(&args.common, args)?;
    let dir = cfg.common.output_dir.clone();
    let configs: Vec<Fig1Config> = Fig1Case::ALL
        .iter()
        .map(|&case| Fig1Config {
            case,
            b: cfg.b,
            phi_rate: cfg.phi_rate,
            amplitude: cfg.amplitude,
            theta0: cfg.theta0,
            duration: cfg.periods * std::f64::consts::TAU / cfg.b,
        })
        .collect();
    let programs = configs
        .iter()
        .map(fig1_program_with)
        .collect::<levelcross::Result<Vec<_>>>()?;
    prepare_output(&dir, &cfg)?;
    let runs: Vec<levelcross::Result<(Trajectory, SpectralReport)>> = std::thread::scope(|scope| {
        let handles: Vec<_> = configs
            .iter()
            .zip(&programs)
            .map(|(c, prog)| {
                scope.spawn(move || {
                    let ground =
                        StateVector::new(eigensystem(&prog.hamiltonian_at(0.0)).vector(0))?;
                    let traj = propagate_with_stride(prog, &ground, cfg.steps, cfg.stride)?;
                    let (t, d, g) = c.drive_samples(cfg.spectral_samples);
                    let report = spectral_condition(&t, &d, &g, DEFAULT_SPECTRAL_THRESHOLD)?;
                    Ok((traj, report))
                })
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("worker panicked"))
            .collect()
    });
    let mut summary = BTreeMap::new();
    for (c, run) in configs.iter().zip(runs) {
        let (traj, spectral) = run?;
        let file = std::fs::File::create(dir.join(format!("fig1_{}.csv", c.case.name())))?;
        traj.write_csv(std::io::BufWriter::new(file))?;
        summary.insert(
            c.case.name(),
            Fig1Summary {
                adiabatic_deviation: adiabatic_deviation(&traj),
                spectral,
            },
        );
    }
    write_json(&dir.join("fig1_summary.json"), &summary)?;
    crate::emit(&serde_json::to_string_pretty(&summary)?);
    Ok(EXIT_OK)
}

#[derive(Args, Debug, Serialize)]
pub struct Fig2Args {
    #[command(flatten)]
    #[serde(skip)]
    pub common: CommonFlags,
    /// Exponents to tabulate.
    #[arg(long, value_delimiter = ',')]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub betas: Option<Vec<f64>>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub theta0: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tau: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gamma_max: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub samples: Option<usize>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Fig2RunConfig {
    #[serde(flatten)]
    pub common: Common,
    pub betas: Vec<f64>,
    pub theta0: f64,
    pub tau: f64,
    pub gamma_max: f64,
    pub samples: usize,
}

impl Default for Fig2RunConfig {
    fn default() -> Self {
        Self {
            common: Common::default(),
            betas: vec![0.5, 1.0, 2.0, 4.0],
            theta0: 0.0,
            tau: 1.0,
            gamma_max: 1.0,
            samples: 201,
        }
    }
}

/// Writes `fig2_paths.csv` with columns `beta,gamma,b,theta,phi,x,y,z`,
/// where `(x, y, z)` is the field vector.
fn fig2(args: &Fig2Args) -> Result<Status> {
    let cfg: Fig2RunConfig = resolve(&args.common, args)?;
    if cfg.samples < 2 {
        anyhow::bail!("samples must be at least 2");
    }
    let paths = cfg
        .betas
        .iter()
        .map(|&beta| {
            Ok((
                beta,
                make_beta_path(
                    BetaFamilyParams::new(beta, cfg.theta0, cfg.tau, 0.0)?,
                    cfg.gamma_max,
                )?,
            ))
        })
        .collect::<levelcross::Result<Vec<_>>>()?;
    let dir = cfg.common.output_dir.clone();
    prepare_output(&dir, &cfg)?;
    let mut rows = Vec::new();
    for (beta, path) in &paths {
        for k in 0..cfg.samples {
            let g = cfg.gamma_max * k as f64 / (cfg.samples - 1) as f64;
            let p = path.point_at(g);
            let [x, y, z] = p.direction().map(|c| c * p.b);
            rows.push(vec![*beta, g, p.b, p.theta, p.phi, x, y, z]);
        }
    }
    let file = std::fs::File::create(dir.join("fig2_paths.csv"))?;
    write_float_csv(
        std::io::BufWriter::new(file),
        &["beta", "gamma", "b", "theta", "phi", "x", "y", "z"],
        rows,
    )?;
    crate::emit(&format!(
        "wrote {} samples for {} exponents",
        cfg.samples * paths.len(),
        paths.len()
    ));
    Ok(EXIT_OK)
}

#[derive(Args, Debug, Serialize)]
pub struct Fig5Args {
    #[command(flatten)]
    #[serde(skip)]
    pub common: CommonFlags,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detuning: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub omega0: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub delta: Option<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Fig5RunConfig {
    #[serde(flatten)]
    pub common: Common,
    pub detuning: f64,
    pub omega0: f64,
    pub delta: f64,
}

impl Default for Fig5RunConfig {
    fn default() -> Self {
        Self {
            common: Common::default(),
            detuning: 1.0,
            omega0: 1.0,
            delta: 0.01,
        }
    }
}

/// Writes `gdot_vs_g.csv`, `gamma_vs_t.csv`, `lngamma_vs_t.csv` and
/// `fig5_summary.json`.
fn fig5(args: &Fig5Args) -> Result<Status> {
    let cfg: Fig5RunConfig = resolve(&args.common, args)?;
    let p = StirapParams::pulses(cfg.detuning, cfg.omega0)?;
    let data = Fig5Data::compute(&p, cfg.delta)?;
    let dir = cfg.common.output_dir.clone();
    prepare_output(&dir, &cfg)?;
    data.write(&dir)?;
    let s = &data.schedule;
    let verdict = classify_feasibility(
        &StirapReducedPath::new(&p, cfg.delta)?,
        cfg.delta,
        s.gammas[0],
    )?;
    let summary = serde_json::json!({
        "gamma_start": s.gammas[0],
        "gamma_end": s.gammas.last(),
        "duration": s.duration(),
        "samples": s.len(),
        "verdict": verdict,
    });
    write_json(&dir.join("fig5_summary.json"), &summary)?;
    crate::emit(&serde_json::to_string_pretty(&summary)?);
    Ok(EXIT_OK)
}
