//! Runtime tables and closed-loop convergence campaigns.

use std::fmt::Write as _;

use aiden_core::sim::{initial_pose_in_view, run_scenario, Scenario, SimError};
use aiden_core::stats::{mean, sample_sd};
use aiden_core::{DetectorNoise, FunctionKind, GuidanceConfig};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::client::{Client, ClientError};
use crate::protocol::{ClassRef, Outcome, RequestBody};
use crate::scene::World;

/// Timings of one call, seconds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Trial {
    pub server_s: f64,
    pub queue_s: f64,
    pub e2e_s: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RuntimeStats {
    pub kind: FunctionKind,
    pub n: usize,
    pub server_mean_s: f64,
    pub server_std_s: f64,
    pub e2e_mean_s: f64,
    pub e2e_std_s: f64,
    /// Reciprocal of the end-to-end mean; object finding only.
    pub fps: Option<f64>,
    /// False when the run was cut short.
    pub valid: bool,
    pub trials: Vec<Trial>,
}

impl RuntimeStats {
    /// Summarizes at least one trial; standard deviations use n - 1 and are 0 for one trial.
    pub fn from_trials(kind: FunctionKind, trials: Vec<Trial>, valid: bool) -> Option<Self> {
        let server: Vec<f64> = trials.iter().map(|t| t.server_s).collect();
        let e2e: Vec<f64> = trials.iter().map(|t| t.e2e_s).collect();
        let server_mean_s = mean(&server).ok()?;
        let e2e_mean_s = mean(&e2e).ok()?;
        let fps = (kind == FunctionKind::FindObject && e2e_mean_s > 0.0).then(|| 1.0 / e2e_mean_s);
        Some(Self {
            kind,
            n: trials.len(),
            server_mean_s,
            server_std_s: sample_sd(&server).ok()?,
            e2e_mean_s,
            e2e_std_s: sample_sd(&e2e).ok()?,
            fps,
            valid,
            trials,
        })
    }

    /// Standard error of the server mean.
    pub fn server_se_s(&self) -> f64 {
        self.server_std_s / (self.n as f64).sqrt()
    }
}

#[derive(Debug, Error)]
pub enum BenchError {
    #[error("trial {trial} failed: {reason}")]
    Aborted {
        trial: usize,
        reason: String,
        /// Statistics over the trials that did complete, flagged invalid.
        partial: Option<RuntimeStats>,
    },
    #[error("trial count must be at least 1")]
    NoTrials,
}

/// Request used for every trial of one functionality.
pub fn trial_request(kind: FunctionKind, fixture: &str, target: ClassRef) -> RequestBody {
    match kind {
        FunctionKind::SceneDescribe => RequestBody::SceneDescribe {
            fixture: fixture.to_owned(),
            question: None,
        },
        FunctionKind::Ocr => RequestBody::Ocr {
            fixture: fixture.to_owned(),
        },
        FunctionKind::FindObject => RequestBody::FindObject {
            target_class: target,
            pose: None,
        },
    }
}

/// Issues `n` sequential calls and summarizes server and end-to-end times.
pub fn run_runtime_eval(
    client: &mut Client,
    kind: FunctionKind,
    body: &RequestBody,
    n: usize,
) -> Result<RuntimeStats, BenchError> {
    if n == 0 {
        return Err(BenchError::NoTrials);
    }
    let mut trials = Vec::with_capacity(n);
    for i in 0..n {
        let failure = match client.call(body.clone()) {
            Ok(reply) => match &reply.response.outcome {
                Outcome::Ok { .. } => {
                    trials.push(Trial {
                        server_s: reply.response.server_ms / 1000.0,
                        queue_s: reply.response.queue_ms / 1000.0,
                        e2e_s: reply.e2e_ms / 1000.0,
                    });
                    continue;
                }
                Outcome::Error { code, message } => format!("server error {code:?}: {message}"),
            },
            Err(e @ ClientError::Timeout(_)) => e.to_string(),
            Err(e) => e.to_string(),
        };
        return Err(BenchError::Aborted {
            trial: i + 1,
            reason: failure,
            partial: RuntimeStats::from_trials(kind, trials, false),
        });
    }
    Ok(RuntimeStats::from_trials(kind, trials, true).expect("n >= 1"))
}

const RUNTIME_HEADER: [&str; 5] = ["Functionality", "Server (s)", "End-to-end (s)", "n", "FPS"];

/// Text table with one row per functionality, mean ± sample std.
pub fn render_runtime_table(rows: &[RuntimeStats]) -> String {
    let mut cells = vec![RUNTIME_HEADER.map(String::from).to_vec()];
    for r in rows {
        cells.push(vec![
            format!("{}{}", r.kind.label(), if r.valid { "" } else { " (incomplete)" }),
            format!("{:.4} ± {:.4}", r.server_mean_s, r.server_std_s),
            format!("{:.4} ± {:.4}", r.e2e_mean_s, r.e2e_std_s),
            r.n.to_string(),
            r.fps.map_or_else(|| "-".into(), |f| format!("{f:.2}")),
        ]);
    }
    table(&cells)
}

pub fn runtime_to_json(rows: &[RuntimeStats]) -> String {
    serde_json::to_string_pretty(rows).expect("stats serialize")
}

pub fn runtime_from_json(raw: &str) -> serde_json::Result<Vec<RuntimeStats>> {
    serde_json::from_str(raw)
}

/// Left-aligned first column, right-aligned others, two spaces between.
pub(crate) fn table(rows: &[Vec<String>]) -> String {
    let cols = rows.iter().map(Vec::len).max().unwrap_or(0);
    let widths: Vec<usize> = (0..cols)
        .map(|c| rows.iter().filter_map(|r| r.get(c)).map(|s| s.chars().count()).max().unwrap_or(0))
        .collect();
    let mut out = String::new();
    for (i, row) in rows.iter().enumerate() {
        let mut line = String::new();
        for (c, cell) in row.iter().enumerate() {
            let pad = widths[c] - cell.chars().count();
            if c == 0 {
                line.push_str(cell);
                line.extend(std::iter::repeat_n(' ', pad));
            } else {
                line.push_str("  ");
                line.extend(std::iter::repeat_n(' ', pad));
                line.push_str(cell);
            }
        }
        out.push_str(line.trim_end());
        out.push('\n');
        if i == 0 {
            let total = widths.iter().sum::<usize>() + 2 * cols.saturating_sub(1);
            out.push_str(&"-".repeat(total));
            out.push('\n');
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceSpec {
    pub world: World,
    pub target: u8,
    pub guidance: GuidanceConfig,
    pub gain_deg: f64,
    pub seeds: Vec<u64>,
    pub tick_budget: u32,
    pub tick_ms: u64,
    /// Noise model; its seed is replaced by each scenario's seed.
    pub noise: DetectorNoise,
}

impl ConvergenceSpec {
    pub fn new(world: World, target: u8, gain_deg: f64, seeds: Vec<u64>) -> Self {
        let noise = world.noise;
        Self {
            world,
            target,
            guidance: GuidanceConfig::default(),
            gain_deg,
            seeds,
            tick_budget: 200,
            tick_ms: 100,
            noise,
        }
    }

    pub fn scenario(&self, seed: u64) -> Result<Scenario, SimError> {
        let target = self
            .world
            .object_of_class(self.target)
            .ok_or(SimError::TargetMissing(self.target))?;
        Ok(Scenario {
            scene: self.world.objects.clone(),
            target_class: self.target,
            camera: initial_pose_in_view(target, &self.world.camera, seed),
            frame: self.world.frame,
            noise: DetectorNoise { seed, ..self.noise },
            guidance: self.guidance,
            gain_deg: self.gain_deg,
            tick_budget: self.tick_budget,
            tick_ms: self.tick_ms,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceReport {
    pub scenarios: usize,
    pub successes: usize,
    pub gain_deg: f64,
    pub tick_budget: u32,
    pub seeds: Vec<u64>,
    /// Tick of confirmed lock per scenario, `None` where the budget ran out.
    pub ticks_to_lock: Vec<Option<u32>>,
}

impl ConvergenceReport {
    pub fn success_rate(&self) -> f64 {
        if self.scenarios == 0 {
            0.0
        } else {
            self.successes as f64 / self.scenarios as f64
        }
    }

    pub fn mean_ticks(&self) -> Option<f64> {
        let locked: Vec<f64> = self.ticks_to_lock.iter().flatten().map(|t| f64::from(*t)).collect();
        mean(&locked).ok()
    }
}

pub fn run_convergence(spec: &ConvergenceSpec) -> Result<ConvergenceReport, SimError> {
    let mut ticks_to_lock = Vec::with_capacity(spec.seeds.len());
    for &seed in &spec.seeds {
        let out = run_scenario(&spec.scenario(seed)?, false)?;
        ticks_to_lock.push(out.locked.then_some(out.ticks));
    }
    Ok(ConvergenceReport {
        scenarios: spec.seeds.len(),
        successes: ticks_to_lock.iter().flatten().count(),
        gain_deg: spec.gain_deg,
        tick_budget: spec.tick_budget,
        seeds: spec.seeds.clone(),
        ticks_to_lock,
    })
}

pub fn render_convergence(report: &ConvergenceReport) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "scenarios {}  locked {}  rate {:.1}%  gain {} deg  budget {} ticks",
        report.scenarios,
        report.successes,
        100.0 * report.success_rate(),
        report.gain_deg,
        report.tick_budget
    );
    if let Some(m) = report.mean_ticks() {
        let max = report.ticks_to_lock.iter().flatten().max().copied().unwrap_or(0);
        let _ = writeln!(out, "ticks to lock: mean {m:.1}  max {max}");
    }
    let failed: Vec<String> = report
        .seeds
        .iter()
        .zip(&report.ticks_to_lock)
        .filter(|(_, t)| t.is_none())
        .map(|(s, _)| s.to_string())
        .collect();
    if !failed.is_empty() {
        let _ = writeln!(out, "unlocked seeds: {}", failed.join(" "));
    }
    out
}
