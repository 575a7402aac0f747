//! Computational core of the AIDEN object-centering assistant.
//!
//! Everything in this crate is pure and allocation-only (`no_std` + `alloc`):
//!
//! - [`geometry`]: frames, bounding boxes, detections and the class table.
//! - [`guidance`]: the two-stage guidance state machine (spoken direction
//!   commands while the target is peripheral, Geiger-counter style pulse
//!   tiers once it nears the frame center).
//! - [`sim`]: a pan/tilt virtual camera over angular scene objects that
//!   stands in for the object detector, plus a closed-loop scenario runner.
//! - [`latency`]: per-functionality backend latency profiles.
//! - [`stats`]: Likert survey analysis (descriptives, bootstrap CIs,
//!   Cronbach's alpha, Wilcoxon signed-rank, Spearman).
//!
//! IO, sockets, file formats and the CLI live in the `aiden` crate.

#![cfg_attr(not(test), no_std)]
#![forbid(unsafe_code)]

extern crate alloc;

pub mod geometry;
pub mod guidance;
pub mod latency;
pub mod sim;
pub mod stats;

pub use geometry::{class_id, class_name, BBox, Detection, FrameGeometry, GeometryError, CLASS_COUNT};
pub use guidance::{
    directional_command, guidance_tick, haptic_tier, normalized_center_distance, select_target,
    Direction, FeedbackEvent, GuidanceConfig, GuidanceError, GuidancePhase, GuidanceState,
    HapticTier, PulsePattern,
};
pub use latency::{BackendProfile, FunctionKind, LatencyModel};
pub use sim::{detect, project, step_camera, CameraPose, DetectorNoise, SceneObject, SimError};
