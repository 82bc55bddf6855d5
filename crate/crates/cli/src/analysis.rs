//! `feasibility` and `schedule` commands.

use anyhow::Result;
use clap::{Args, ValueEnum};
use levelcross::schedule::{
    classify_feasibility_with, synthesize_schedule_with, Direction, FeasibilityKind,
};
use serde::{Deserialize, Serialize};

use crate::config::{prepare_output, resolve, write_json, Common, CommonFlags};
use crate::path_source::{PathConfig, PathFlags};
use crate::{Status, EXIT_INFEASIBLE, EXIT_OK};

#[derive(Args, Debug)]
pub struct FeasibilityArgs {
    #[command(flatten)]
    pub common: CommonFlags,
    #[command(flatten)]
    pub path: PathFlags,
}

#[derive(Debug, Clone, Serialize, Deserialize, Default)]
pub struct FeasibilityConfig {
    #[serde(flatten)]
    pub common: Common,
    #[serde(flatten)]
    pub path: PathConfig,
}

/// Writes `verdict.json`; exit 3 when the crossing cannot be reached in finite time.
pub fn feasibility(args: &FeasibilityArgs) -> Result<Status> {
    let mut cfg: FeasibilityConfig = resolve(&args.common, &args.path)?;
    let path = cfg.path.build()?;
    let dir = cfg.common.output_dir.clone();
    prepare_output(&dir, &cfg)?;
    let start = cfg.path.gamma_start.expect("filled in by build");
    let verdict =
        classify_feasibility_with(path.as_ref(), cfg.path.delta, start, &cfg.path.options())?;
    write_json(&dir.join("verdict.json"), &verdict)?;
    crate::emit(&serde_json::to_string_pretty(&verdict)?);
    Ok(match verdict.kind {
        FeasibilityKind::InfeasibleInfiniteTime => EXIT_INFEASIBLE,
        _ => EXIT_OK,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Heading {
    /// Toward the crossing, or toward the larger Γ if there is none.
    Auto,
    Increasing,
    Decreasing,
}

#[derive(Args, Debug, Serialize)]
pub struct ScheduleArgs {
    #[command(flatten)]
    #[serde(skip)]
    pub common: CommonFlags,
    #[command(flatten)]
    #[serde(flatten)]
    pub path: PathFlags,
    #[arg(long, value_enum)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub direction: Option<Heading>,
    /// Time horizon; unbounded when omitted.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t_max: Option<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ScheduleConfig {
    #[serde(flatten)]
    pub common: Common,
    #[serde(flatten)]
    pub path: PathConfig,
    pub direction: Heading,
    pub t_max: Option<f64>,
}

impl Default for ScheduleConfig {
    fn default() -> Self {
        Self {
            common: Common::default(),
            path: PathConfig::default(),
            direction: Heading::Auto,
            t_max: None,
        }
    }
}

#[derive(Serialize)]
struct ScheduleSummary<'a> {
    samples: usize,
    duration: f64,
    reached_crossing: bool,
    crossing_time: Option<f64>,
    crossing_gamma: Option<f64>,
    stop: &'a levelcross::schedule::StopReason,
    tail_exponent: Option<f64>,
}

/// Writes `schedule.csv` (`t,gamma,b,theta,phi`) and `schedule.json`.
pub fn schedule(args: &ScheduleArgs) -> Result<Status> {
    let mut cfg: ScheduleConfig = resolve(&args.common, args)?;
    let path = cfg.path.build()?;
    let dir = cfg.common.output_dir.clone();
    prepare_output(&dir, &cfg)?;
    let start = cfg.path.gamma_start.expect("filled in by build");
    let direction = match cfg.direction {
        Heading::Increasing => Direction::Increasing,
        Heading::Decreasing => Direction::Decreasing,
        Heading::Auto => match path.crossing_gamma() {
            Some(c) if c < start => Direction::Decreasing,
            Some(_) => Direction::Increasing,
            None => Direction::Increasing,
        },
    };
    let t_max = cfg.t_max.unwrap_or(f64::INFINITY);
    let s = synthesize_schedule_with(
        path.as_ref(),
        cfg.path.delta,
        start,
        direction,
        t_max,
        &cfg.path.options(),
    )?;
    let file = std::fs::File::create(dir.join("schedule.csv"))?;
    s.write_csv(path.as_ref(), std::io::BufWriter::new(file))?;
    let summary = ScheduleSummary {
        samples: s.len(),
        duration: s.duration(),
        reached_crossing: s.reached_crossing,
        crossing_time: s.crossing_time,
        crossing_gamma: s.crossing_gamma,
        stop: &s.stop,
        tail_exponent: s.tail_exponent,
    };
    write_json(&dir.join("schedule.json"), &summary)?;
    crate::emit(&serde_json::to_string_pretty(&summary)?);
    Ok(EXIT_OK)
}
