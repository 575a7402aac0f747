//! Closed-loop runs: detector -> guidance -> simulated user -> camera.

use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{detect, step_camera, CameraPose, DetectorNoise, SceneObject, SimError};
use crate::geometry::{Detection, FrameGeometry};
use crate::guidance::{
    guidance_tick, normalized_offsets, select_target, Direction, FeedbackEvent, GuidanceConfig,
    GuidancePhase, GuidanceState,
};

/// Stream id reserved for drawing the initial pose; detector ticks use `0..`.
const INITIAL_POSE_STREAM: u64 = u64::MAX;

/// Simulated user reacting to the guidance output.
///
/// In the coarse phase it follows the commanded direction. In the
/// approaching phase, where no words are spoken, it nudges the camera along
/// whichever axis a step of `gain_deg` still brings closer to center,
/// standing in for a person homing in on a rising pulse rate. It holds still
/// while searching or locked.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Operator {
    pub gain_deg: f64,
}

impl Operator {
    pub fn next_move(
        &self,
        phase: GuidancePhase,
        target: Option<&Detection>,
        frame: &FrameGeometry,
        pose: &CameraPose,
    ) -> Option<Direction> {
        match phase {
            GuidancePhase::Searching | GuidancePhase::Locked => None,
            GuidancePhase::Coarse(dir) => Some(dir),
            GuidancePhase::Approaching => {
                let (dx, dy) = normalized_offsets(target?, frame);
                // estimated angular offsets of the target from the optical axis
                let ax = dx * pose.hfov_deg / 2.0;
                let ay = dy * pose.vfov_deg / 2.0;
                let horizontal = (ax, if ax < 0.0 { Direction::Left } else { Direction::Right });
                let vertical = (ay, if ay < 0.0 { Direction::Up } else { Direction::Down });
                let axes = if libm::fabs(dx) >= libm::fabs(dy) {
                    [horizontal, vertical]
                } else {
                    [vertical, horizontal]
                };
                axes.into_iter()
                    .find(|(offset, _)| self.gain_deg < 2.0 * libm::fabs(*offset))
                    .map(|(_, dir)| dir)
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub scene: Vec<SceneObject>,
    pub target_class: u8,
    /// Starting orientation and field of view.
    pub camera: CameraPose,
    pub frame: FrameGeometry,
    pub noise: DetectorNoise,
    pub guidance: GuidanceConfig,
    pub gain_deg: f64,
    pub tick_budget: u32,
    /// Wall-clock spacing of detector frames fed to the guidance clock.
    pub tick_ms: u64,
}

impl Scenario {
    pub fn validate(&self) -> Result<(), SimError> {
        self.camera.validate()?;
        self.noise.validate()?;
        self.guidance.validate()?;
        for obj in &self.scene {
            obj.validate()?;
        }
        if !self.scene.iter().any(|o| o.class_id == self.target_class) {
            return Err(SimError::TargetMissing(self.target_class));
        }
        if !(self.gain_deg > 0.0 && self.gain_deg.is_finite()) {
            return Err(SimError::NonPositiveGain(self.gain_deg));
        }
        Ok(())
    }

    pub fn target(&self) -> Option<&SceneObject> {
        self.scene.iter().find(|o| o.class_id == self.target_class)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TickRecord {
    pub tick: u32,
    /// Pose the frame was captured from.
    pub pose: CameraPose,
    pub detections: Vec<Detection>,
    pub phase: GuidancePhase,
    pub events: Vec<FeedbackEvent>,
    pub moved: Option<Direction>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioOutcome {
    pub locked: bool,
    /// 1-based tick on which the lock was confirmed, or the budget when it never was.
    pub ticks: u32,
    pub final_pose: CameraPose,
    pub final_state: GuidanceState,
    pub trace: Vec<TickRecord>,
}

/// Random orientation that keeps the center of `target` inside the field of view.
pub fn initial_pose_in_view(target: &SceneObject, fov: &CameraPose, seed: u64) -> CameraPose {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(INITIAL_POSE_STREAM);
    let half_h = fov.hfov_deg / 2.0;
    let half_v = fov.vfov_deg / 2.0;
    let d_pan = rng.random_range(-half_h..half_h);
    let d_tilt = rng.random_range(-half_v..half_v);
    fov.looking_at(
        super::wrap_deg(target.pan_deg - d_pan),
        super::wrap_deg(target.tilt_deg - d_tilt),
    )
}

/// Runs detect -> tick -> move until the lock is confirmed or the budget runs out.
pub fn run_scenario(scenario: &Scenario, record_trace: bool) -> Result<ScenarioOutcome, SimError> {
    scenario.validate()?;
    let operator = Operator {
        gain_deg: scenario.gain_deg,
    };
    let mut pose = scenario.camera;
    let mut state = GuidanceState::default();
    let mut trace = Vec::new();

    for t in 0..scenario.tick_budget {
        let detections = detect(
            &scenario.scene,
            &pose,
            &scenario.frame,
            &scenario.noise,
            u64::from(t),
        );
        let (next, events) = guidance_tick(
            &detections,
            scenario.target_class,
            &scenario.frame,
            &state,
            &scenario.guidance,
            u64::from(t) * scenario.tick_ms,
        );
        state = next;
        let target = select_target(&detections, scenario.target_class);
        let moved = operator.next_move(state.phase, target, &scenario.frame, &pose);
        if record_trace {
            trace.push(TickRecord {
                tick: t + 1,
                pose,
                detections: detections.clone(),
                phase: state.phase,
                events,
                moved,
            });
        }
        if state.phase == GuidancePhase::Locked {
            return Ok(ScenarioOutcome {
                locked: true,
                ticks: t + 1,
                final_pose: pose,
                final_state: state,
                trace,
            });
        }
        if let Some(dir) = moved {
            pose = step_camera(&pose, dir, scenario.gain_deg)?;
        }
    }
    Ok(ScenarioOutcome {
        locked: false,
        ticks: scenario.tick_budget,
        final_pose: pose,
        final_state: state,
        trace,
    })
}
