//! Two-stage object-centering guidance.
//!
//! While the target sits outside the central region the user gets a spoken
//! direction ("Move camera to the left", ...). Inside it, the normalized
//! distance between the bounding-box center and the frame center selects a
//! pulse tier: slow pulses at the periphery, rapid pulses when approaching,
//! steady vibration plus a confirmation tone once locked.
//!
//! The machine is clock-driven and pure: [`guidance_tick`] maps
//! `(detections, state, config, now)` to `(state', events)`.

use alloc::vec::Vec;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::{Detection, FrameGeometry};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GuidanceError {
    #[error("normalized distance {0} is outside [0, 1]")]
    DistanceOutOfRange(f64),
    #[error("invalid guidance config: {0}")]
    InvalidConfig(&'static str),
    #[error("invalid pulse pattern: {0}")]
    InvalidPattern(&'static str),
}

/// A single direction for the user to move the camera.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    Left,
    Right,
    Up,
    Down,
}

impl Direction {
    pub const ALL: [Direction; 4] = [
        Direction::Left,
        Direction::Right,
        Direction::Up,
        Direction::Down,
    ];

    /// Canonical spoken instruction, byte-exact.
    pub fn speech(self) -> &'static str {
        match self {
            Direction::Left => "Move camera to the left",
            Direction::Right => "Move camera to the right",
            Direction::Up => "Tilt up",
            Direction::Down => "Tilt down",
        }
    }

    pub fn is_horizontal(self) -> bool {
        matches!(self, Direction::Left | Direction::Right)
    }
}

/// Vibration cadence. Steady vibration has `continuous = true` and zero timings.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawPattern")]
pub struct PulsePattern {
    on_ms: u32,
    off_ms: u32,
    continuous: bool,
}

#[derive(Deserialize)]
struct RawPattern {
    on_ms: u32,
    off_ms: u32,
    continuous: bool,
}

impl TryFrom<RawPattern> for PulsePattern {
    type Error = GuidanceError;

    fn try_from(raw: RawPattern) -> Result<Self, Self::Error> {
        if raw.continuous {
            if raw.off_ms != 0 {
                return Err(GuidanceError::InvalidPattern("continuous pattern with off time"));
            }
            Ok(Self {
                on_ms: raw.on_ms,
                off_ms: 0,
                continuous: true,
            })
        } else {
            PulsePattern::intermittent(raw.on_ms, raw.off_ms)
        }
    }
}

impl PulsePattern {
    /// Slow pulses while the target is peripheral: 200 ms on, 300 ms off.
    pub const PERIPHERAL: PulsePattern = PulsePattern {
        on_ms: 200,
        off_ms: 300,
        continuous: false,
    };
    /// Rapid pulses while approaching the center: 200 ms on, 100 ms off.
    pub const APPROACHING: PulsePattern = PulsePattern {
        on_ms: 200,
        off_ms: 100,
        continuous: false,
    };
    pub const CONTINUOUS: PulsePattern = PulsePattern {
        on_ms: 0,
        off_ms: 0,
        continuous: true,
    };

    pub fn intermittent(on_ms: u32, off_ms: u32) -> Result<Self, GuidanceError> {
        if on_ms == 0 || off_ms == 0 {
            return Err(GuidanceError::InvalidPattern(
                "intermittent pulses need non-zero on and off times",
            ));
        }
        Ok(Self {
            on_ms,
            off_ms,
            continuous: false,
        })
    }

    pub fn on_ms(&self) -> u32 {
        self.on_ms
    }

    pub fn off_ms(&self) -> u32 {
        self.off_ms
    }

    pub fn is_continuous(&self) -> bool {
        self.continuous
    }

    /// One on/off cycle in milliseconds; zero for steady vibration.
    pub fn period_ms(&self) -> u32 {
        if self.continuous {
            0
        } else {
            self.on_ms + self.off_ms
        }
    }

    /// Pulses per second, `None` for steady vibration.
    pub fn frequency_hz(&self) -> Option<f64> {
        (!self.continuous).then(|| 1000.0 / f64::from(self.period_ms()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HapticTier {
    Peripheral,
    Approaching,
    Locked,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(tag = "phase", content = "direction", rename_all = "snake_case")]
pub enum GuidancePhase {
    #[default]
    Searching,
    Coarse(Direction),
    Approaching,
    Locked,
}

/// Output of one guidance tick.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum FeedbackEvent {
    Speech {
        text: alloc::string::String,
        direction: Direction,
    },
    Haptic(PulsePattern),
    LockedTone,
}

impl FeedbackEvent {
    pub fn speech(direction: Direction) -> Self {
        FeedbackEvent::Speech {
            text: direction.speech().into(),
            direction,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GuidanceConfig {
    /// Normalized distance at and above which the target counts as peripheral.
    pub t_outer: f64,
    /// Normalized distance below which the target counts as centered.
    pub t_inner: f64,
    /// Consecutive centered ticks before the lock is confirmed.
    pub lock_ticks: u32,
    pub speech_debounce_ms: u64,
    /// Consecutive empty ticks tolerated while locked before reverting to searching.
    pub loss_grace_ticks: u32,
    pub peripheral_pattern: PulsePattern,
    pub approaching_pattern: PulsePattern,
}

impl Default for GuidanceConfig {
    fn default() -> Self {
        Self {
            t_outer: 0.35,
            t_inner: 0.10,
            lock_ticks: 3,
            speech_debounce_ms: 1500,
            loss_grace_ticks: 5,
            peripheral_pattern: PulsePattern::PERIPHERAL,
            approaching_pattern: PulsePattern::APPROACHING,
        }
    }
}

impl GuidanceConfig {
    pub fn validate(&self) -> Result<(), GuidanceError> {
        if !(self.t_inner > 0.0 && self.t_inner < self.t_outer && self.t_outer <= 1.0) {
            return Err(GuidanceError::InvalidConfig(
                "thresholds must satisfy 0 < t_inner < t_outer <= 1",
            ));
        }
        if self.lock_ticks == 0 {
            return Err(GuidanceError::InvalidConfig("lock_ticks must be at least 1"));
        }
        if self.loss_grace_ticks == 0 {
            return Err(GuidanceError::InvalidConfig("loss_grace_ticks must be at least 1"));
        }
        if self.peripheral_pattern.is_continuous() || self.approaching_pattern.is_continuous() {
            return Err(GuidanceError::InvalidConfig(
                "peripheral and approaching patterns must be intermittent",
            ));
        }
        Ok(())
    }
}

/// Picks the highest-confidence detection of `target_class`.
///
/// Ties go to the larger box, then to the smaller `x_min`.
pub fn select_target(detections: &[Detection], target_class: u8) -> Option<&Detection> {
    detections
        .iter()
        .filter(|d| d.class_id == target_class)
        .max_by(|a, b| {
            a.confidence
                .total_cmp(&b.confidence)
                .then_with(|| a.bbox.area().total_cmp(&b.bbox.area()))
                .then_with(|| b.bbox.x_min.total_cmp(&a.bbox.x_min))
        })
}

/// Euclidean distance from the box center to the frame center, divided by
/// the frame half-diagonal: 0 is centered, 1 is a corner.
pub fn normalized_center_distance(det: &Detection, frame: &FrameGeometry) -> f64 {
    let (x, y) = det.center();
    let (cx, cy) = frame.center();
    (libm::hypot(x - cx, y - cy) / frame.half_diagonal()).min(1.0)
}

/// Per-axis offsets of the box center, each normalized by the half frame extent.
pub fn normalized_offsets(det: &Detection, frame: &FrameGeometry) -> (f64, f64) {
    let (x, y) = det.center();
    let (cx, cy) = frame.center();
    ((x - cx) / cx, (y - cy) / cy)
}

/// Direction along the axis with the larger normalized offset. Horizontal
/// wins exact ties. `None` only when the box is exactly centered.
pub fn dominant_direction(det: &Detection, frame: &FrameGeometry) -> Option<Direction> {
    let (dx, dy) = normalized_offsets(det, frame);
    if dx == 0.0 && dy == 0.0 {
        return None;
    }
    Some(if libm::fabs(dx) >= libm::fabs(dy) {
        if dx < 0.0 {
            Direction::Left
        } else {
            Direction::Right
        }
    } else if dy < 0.0 {
        Direction::Up
    } else {
        Direction::Down
    })
}

/// Spoken-command direction, or `None` inside the central region where the
/// pulse feedback takes over.
pub fn directional_command(
    det: &Detection,
    frame: &FrameGeometry,
    cfg: &GuidanceConfig,
) -> Option<Direction> {
    if normalized_center_distance(det, frame) < cfg.t_outer {
        return None;
    }
    dominant_direction(det, frame)
}

/// Maps a normalized distance onto its pulse tier.
pub fn haptic_tier(
    d: f64,
    cfg: &GuidanceConfig,
) -> Result<(HapticTier, PulsePattern), GuidanceError> {
    if !(0.0..=1.0).contains(&d) {
        return Err(GuidanceError::DistanceOutOfRange(d));
    }
    Ok(if d >= cfg.t_outer {
        (HapticTier::Peripheral, cfg.peripheral_pattern)
    } else if d >= cfg.t_inner {
        (HapticTier::Approaching, cfg.approaching_pattern)
    } else {
        (HapticTier::Locked, PulsePattern::CONTINUOUS)
    })
}

/// Mutable part of the guidance loop, carried between ticks.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct GuidanceState {
    pub phase: GuidancePhase,
    /// Consecutive ticks with the target inside the inner region.
    pub centered_streak: u32,
    /// Consecutive ticks without a target detection.
    pub empty_streak: u32,
    pub last_speech_ms: Option<u64>,
    /// Normalized distance seen on the last tick with a target.
    pub last_distance: Option<f64>,
    /// Detections dropped because they broke an invariant.
    pub malformed_skipped: u64,
}

/// Advances the guidance machine by one detector frame.
pub fn guidance_tick(
    detections: &[Detection],
    target_class: u8,
    frame: &FrameGeometry,
    state: &GuidanceState,
    cfg: &GuidanceConfig,
    now_ms: u64,
) -> (GuidanceState, Vec<FeedbackEvent>) {
    let mut next = state.clone();
    let mut events = Vec::new();

    let valid: Vec<Detection> = detections
        .iter()
        .filter(|d| {
            let ok = d.is_valid_in(frame);
            if !ok {
                next.malformed_skipped += 1;
            }
            ok
        })
        .copied()
        .collect();

    let Some(target) = select_target(&valid, target_class) else {
        next.empty_streak = next.empty_streak.saturating_add(1);
        next.centered_streak = 0;
        if state.phase == GuidancePhase::Locked && next.empty_streak < cfg.loss_grace_ticks {
            events.push(FeedbackEvent::Haptic(PulsePattern::CONTINUOUS));
        } else {
            next.phase = GuidancePhase::Searching;
        }
        return (next, events);
    };

    next.empty_streak = 0;
    let d = normalized_center_distance(target, frame);
    next.last_distance = Some(d);

    if d < cfg.t_inner {
        next.centered_streak = next.centered_streak.saturating_add(1);
        if state.phase == GuidancePhase::Locked {
            events.push(FeedbackEvent::Haptic(PulsePattern::CONTINUOUS));
        } else if next.centered_streak >= cfg.lock_ticks {
            next.phase = GuidancePhase::Locked;
            events.push(FeedbackEvent::Haptic(PulsePattern::CONTINUOUS));
            events.push(FeedbackEvent::LockedTone);
        } else {
            // inside the inner region but the lock is not confirmed yet
            next.phase = GuidancePhase::Approaching;
            events.push(FeedbackEvent::Haptic(cfg.approaching_pattern));
        }
        return (next, events);
    }

    next.centered_streak = 0;
    match directional_command(target, frame, cfg) {
        Some(dir) => {
            next.phase = GuidancePhase::Coarse(dir);
            events.push(FeedbackEvent::Haptic(cfg.peripheral_pattern));
            let due = state
                .last_speech_ms
                .is_none_or(|last| now_ms.saturating_sub(last) >= cfg.speech_debounce_ms);
            if due {
                next.last_speech_ms = Some(now_ms);
                events.push(FeedbackEvent::speech(dir));
            }
        }
        None => {
            next.phase = GuidancePhase::Approaching;
            events.push(FeedbackEvent::Haptic(cfg.approaching_pattern));
        }
    }
    (next, events)
}
