//! `stirap` and `holonomy` commands.

use anyhow::{bail, Result};
use clap::{Args, ValueEnum};
use levelcross::holonomy::{berry_phase, spin_cone_frames, transport_segment};
use levelcross::schedule::classify_feasibility;
use levelcross::stirap::{
    arc_gap, dark_state_loop, default_gamma_start, stirap_transfer_experiment, StirapParams,
    StirapReducedPath, TransferSource, ARC_STEP, RAMP_STEPS,
};
use serde::{Deserialize, Serialize};

use crate::config::{prepare_output, resolve, write_json, Common, CommonFlags};
use crate::{Status, EXIT_OK};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    /// Arc on the circle Ω12² + Ω23² = Ω₀² with switching ramps.
    Alternative,
    /// Gaussian pulse pair on the uniform-violation schedule.
    Gaussian,
    /// No couplings at all.
    Zero,
}

#[derive(Args, Debug, Serialize)]
pub struct StirapArgs {
    #[command(flatten)]
    #[serde(skip)]
    pub common: CommonFlags,
    #[arg(long, value_enum)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mode: Option<Mode>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detuning: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub omega0: Option<f64>,
    /// Arc duration; defaults to 500/B₀.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tau_arc: Option<f64>,
    /// Duration of each switching ramp around the arc.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ramp_time: Option<f64>,
    /// Allowed adiabaticity violation of the Gaussian schedule.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub delta: Option<f64>,
    /// Where the Gaussian sequence is cut, as a fraction of the gap at α = 1.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub truncation: Option<f64>,
    /// Run length of the zero-coupling mode.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub duration: Option<f64>,
    /// Propagation step.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dt: Option<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StirapConfig {
    #[serde(flatten)]
    pub common: Common,
    pub mode: Mode,
    pub detuning: f64,
    pub omega0: f64,
    pub tau_arc: Option<f64>,
    pub ramp_time: f64,
    pub delta: f64,
    pub truncation: f64,
    pub duration: f64,
    pub dt: f64,
}

impl Default for StirapConfig {
    fn default() -> Self {
        Self {
            common: Common::default(),
            mode: Mode::Alternative,
            detuning: 1.0,
            omega0: 1.0,
            tau_arc: None,
            ramp_time: RAMP_STEPS as f64 * ARC_STEP,
            delta: 0.01,
            truncation: 1e-3,
            duration: 100.0,
            dt: ARC_STEP,
        }
    }
}

/// Writes `trajectory.csv` (amplitudes on |1⟩, |2⟩, |3⟩ and eigenstate
/// populations) and `report.json`.
pub fn stirap(args: &StirapArgs) -> Result<Status> {
    let mut cfg: StirapConfig = resolve(&args.common, args)?;
    let p = StirapParams::pulses(cfg.detuning, cfg.omega0)?;
    if cfg.tau_arc.is_none() {
        cfg.tau_arc = Some(500.0 / arc_gap(&p));
    }
    let source = match cfg.mode {
        Mode::Alternative => TransferSource::Alternative {
            tau_arc: cfg.tau_arc.expect("filled in above"),
            ramp_time: cfg.ramp_time,
        },
        Mode::Gaussian => TransferSource::Gaussian {
            delta: cfg.delta,
            truncation: cfg.truncation,
        },
        Mode::Zero => TransferSource::ZeroPulse {
            duration: cfg.duration,
        },
    };
    let dir = cfg.common.output_dir.clone();
    let report = stirap_transfer_experiment(&p, &source, cfg.dt)?;
    prepare_output(&dir, &cfg)?;
    let file = std::fs::File::create(dir.join("trajectory.csv"))?;
    report.trajectory.write_csv(std::io::BufWriter::new(file))?;

    // the late leg of the Gaussian sequence decides whether it can end at the crossing
    let late_leg = if cfg.mode == Mode::Gaussian {
        let path = StirapReducedPath::new(&p, cfg.delta)?;
        Some(classify_feasibility(
            &path,
            cfg.delta,
            default_gamma_start(&p, cfg.delta)?,
        )?)
    } else {
        None
    };
    let summary = serde_json::json!({
        "mode": cfg.mode,
        "final_p3": report.final_p3,
        "final_populations_bare": report.trajectory.final_state().populations(),
        "dark_deviation": report.dark_deviation,
        "duration": report.trajectory.times.last(),
        "spectral": report.spectral,
        "schedule_samples": report.schedule.as_ref().map(|s| s.len()),
        "late_leg_feasibility": late_leg,
    });
    write_json(&dir.join("report.json"), &summary)?;
    crate::emit(&serde_json::to_string_pretty(&summary)?);
    Ok(EXIT_OK)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum LoopKind {
    /// One turn of a spin field around the cone θ = θ₀.
    SpinCone,
    /// The STIRAP dark state around the Gaussian pulse loop through the origin.
    StirapDark,
}

#[derive(Args, Debug, Serialize)]
pub struct HolonomyArgs {
    #[command(flatten)]
    #[serde(skip)]
    pub common: CommonFlags,
    #[arg(long = "loop", value_enum)]
    #[serde(rename = "loop", skip_serializing_if = "Option::is_none")]
    pub kind: Option<LoopKind>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub theta0: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub b: Option<f64>,
    /// Spin level, 0 for the ground state.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub level: Option<usize>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detuning: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub omega0: Option<f64>,
    /// Pulse parameter where the Gaussian loop is closed through the origin.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha_end: Option<f64>,
    /// Frames per loop (per segment for the dark state).
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub samples: Option<usize>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct HolonomyConfig {
    #[serde(flatten)]
    pub common: Common,
    #[serde(rename = "loop")]
    pub kind: LoopKind,
    pub theta0: f64,
    pub b: f64,
    pub level: usize,
    pub detuning: f64,
    pub omega0: f64,
    pub alpha_end: f64,
    pub samples: usize,
}

impl Default for HolonomyConfig {
    fn default() -> Self {
        Self {
            common: Common::default(),
            kind: LoopKind::SpinCone,
            theta0: std::f64::consts::FRAC_PI_2,
            b: 1.0,
            level: 0,
            detuning: 1.0,
            omega0: 1.0,
            alpha_end: 3.0,
            samples: 2001,
        }
    }
}

/// Writes `holonomy.json`.
pub fn holonomy(args: &HolonomyArgs) -> Result<Status> {
    let cfg: HolonomyConfig = resolve(&args.common, args)?;
    let (result, berry) = match cfg.kind {
        LoopKind::SpinCone => {
            if cfg.samples < 3 {
                bail!("samples must be at least 3");
            }
            let frames = spin_cone_frames(cfg.theta0, cfg.b, cfg.level, cfg.samples)?;
            let times: Vec<f64> = (0..frames.len())
                .map(|k| k as f64 / (frames.len() - 1) as f64)
                .collect();
            (
                transport_segment(&frames, &times)?,
                Some(berry_phase(&frames)?),
            )
        }
        LoopKind::StirapDark => {
            let p = StirapParams::pulses(cfg.detuning, cfg.omega0)?;
            (dark_state_loop(&p, cfg.alpha_end, cfg.samples)?, None)
        }
    };
    let dir = cfg.common.output_dir.clone();
    prepare_output(&dir, &cfg)?;
    let mut json = result.to_json();
    json["berry_phase"] = serde_json::json!(berry);
    write_json(&dir.join("holonomy.json"), &json)?;
    match berry {
        Some(g) => crate::emit(&format!("Berry phase {g}")),
        None => crate::emit(&serde_json::to_string_pretty(&json["lab_operator"])?),
    }
    Ok(EXIT_OK)
}
