//! Virtual pan/tilt camera over a scene of angularly placed objects.
//!
//! Stands in for the object detector: objects are projected linearly from
//! angular offsets to pixel boxes, then optionally dropped, jittered and
//! re-scored with a per-tick seeded RNG.

use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::{BBox, Detection, FrameGeometry, CLASS_COUNT};
use crate::guidance::Direction;

pub mod scenario;

pub use scenario::{
    initial_pose_in_view, run_scenario, Operator, Scenario, ScenarioOutcome, TickRecord,
};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SimError {
    #[error("camera gain must be positive, got {0}")]
    NonPositiveGain(f64),
    #[error("field of view must be in (0, 180) degrees, got {0}")]
    FieldOfView(f64),
    #[error("class id {0} is outside 0..=80")]
    UnknownClass(u8),
    #[error("object angular size must be positive, got {0}")]
    ObjectSize(f64),
    #[error("noise parameter {0} out of range")]
    Noise(&'static str),
    #[error("target class {0} is not in the scene")]
    TargetMissing(u8),
    #[error(transparent)]
    Guidance(#[from] crate::guidance::GuidanceError),
}

/// Wraps an angle in degrees into `(-180, 180]`.
pub fn wrap_deg(angle: f64) -> f64 {
    let mut a = libm::fmod(angle, 360.0);
    if a <= -180.0 {
        a += 360.0;
    } else if a > 180.0 {
        a -= 360.0;
    }
    a
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SceneObject {
    pub class_id: u8,
    pub pan_deg: f64,
    pub tilt_deg: f64,
    /// Apparent width and height, degrees.
    pub angular_size_deg: f64,
}

impl SceneObject {
    pub fn new(class_id: u8, pan_deg: f64, tilt_deg: f64, angular_size_deg: f64) -> Result<Self, SimError> {
        let obj = Self {
            class_id,
            pan_deg,
            tilt_deg,
            angular_size_deg,
        };
        obj.validate()?;
        Ok(obj)
    }

    pub fn validate(&self) -> Result<(), SimError> {
        if self.class_id >= CLASS_COUNT {
            return Err(SimError::UnknownClass(self.class_id));
        }
        if !(self.angular_size_deg > 0.0 && self.angular_size_deg.is_finite()) {
            return Err(SimError::ObjectSize(self.angular_size_deg));
        }
        Ok(())
    }
}

/// Camera orientation and field of view. Positive tilt looks down.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CameraPose {
    pub pan_deg: f64,
    pub tilt_deg: f64,
    pub hfov_deg: f64,
    pub vfov_deg: f64,
}

impl Default for CameraPose {
    fn default() -> Self {
        Self {
            pan_deg: 0.0,
            tilt_deg: 0.0,
            hfov_deg: 60.0,
            vfov_deg: 45.0,
        }
    }
}

impl CameraPose {
    pub fn new(pan_deg: f64, tilt_deg: f64, hfov_deg: f64, vfov_deg: f64) -> Result<Self, SimError> {
        let pose = Self {
            pan_deg,
            tilt_deg,
            hfov_deg,
            vfov_deg,
        };
        pose.validate()?;
        Ok(pose)
    }

    pub fn validate(&self) -> Result<(), SimError> {
        for fov in [self.hfov_deg, self.vfov_deg] {
            if !(fov > 0.0 && fov < 180.0) {
                return Err(SimError::FieldOfView(fov));
            }
        }
        Ok(())
    }

    pub fn looking_at(mut self, pan_deg: f64, tilt_deg: f64) -> Self {
        self.pan_deg = pan_deg;
        self.tilt_deg = tilt_deg;
        self
    }

    /// Wrapped `(Δpan, Δtilt)` from the optical axis to `obj`.
    pub fn offset_to(&self, obj: &SceneObject) -> (f64, f64) {
        (
            wrap_deg(obj.pan_deg - self.pan_deg),
            wrap_deg(obj.tilt_deg - self.tilt_deg),
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct DetectorNoise {
    pub seed: u64,
    /// Standard deviation of the jitter on each box corner, pixels.
    pub pixel_sigma: f64,
    pub dropout_prob: f64,
    pub confidence_base: f64,
    pub confidence_sigma: f64,
}

impl Default for DetectorNoise {
    fn default() -> Self {
        Self::noiseless(0)
    }
}

impl DetectorNoise {
    pub fn noiseless(seed: u64) -> Self {
        Self {
            seed,
            pixel_sigma: 0.0,
            dropout_prob: 0.0,
            confidence_base: 0.9,
            confidence_sigma: 0.0,
        }
    }

    pub fn validate(&self) -> Result<(), SimError> {
        if !(self.pixel_sigma >= 0.0 && self.pixel_sigma.is_finite()) {
            return Err(SimError::Noise("pixel_sigma"));
        }
        // dropout 1.0 is accepted so that "detector never fires" is expressible
        if !(0.0..=1.0).contains(&self.dropout_prob) {
            return Err(SimError::Noise("dropout_prob"));
        }
        if !(self.confidence_base > 0.0 && self.confidence_base <= 1.0) {
            return Err(SimError::Noise("confidence_base"));
        }
        if !(self.confidence_sigma >= 0.0 && self.confidence_sigma.is_finite()) {
            return Err(SimError::Noise("confidence_sigma"));
        }
        Ok(())
    }
}

/// Noise-free projection of one object, `None` when it is out of view.
pub fn project(
    obj: &SceneObject,
    pose: &CameraPose,
    frame: &FrameGeometry,
    confidence: f64,
) -> Option<Detection> {
    let (d_pan, d_tilt) = pose.offset_to(obj);
    let half = obj.angular_size_deg / 2.0;
    if libm::fabs(d_pan) > pose.hfov_deg / 2.0 + half
        || libm::fabs(d_tilt) > pose.vfov_deg / 2.0 + half
    {
        return None;
    }
    let (w, h) = (frame.width(), frame.height());
    let bbox = BBox::centered(
        w * (0.5 + d_pan / pose.hfov_deg),
        h * (0.5 + d_tilt / pose.vfov_deg),
        w * (obj.angular_size_deg / pose.hfov_deg),
        h * (obj.angular_size_deg / pose.vfov_deg),
    );
    let bbox = frame.clip(bbox)?;
    Some(Detection {
        class_id: obj.class_id,
        confidence,
        bbox,
    })
}

/// RNG for one detector frame; streams are independent per tick.
pub fn tick_rng(seed: u64, tick_index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(tick_index);
    rng
}

/// Simulated detector output for one frame.
///
/// Every object consumes the same number of draws whether or not it is
/// visible, so adding or moving one object does not reshuffle the others.
pub fn detect(
    scene: &[SceneObject],
    pose: &CameraPose,
    frame: &FrameGeometry,
    noise: &DetectorNoise,
    tick_index: u64,
) -> Vec<Detection> {
    let mut rng = tick_rng(noise.seed, tick_index);
    let mut out = Vec::with_capacity(scene.len());
    for obj in scene {
        let drop_draw: f64 = rng.random();
        let jitter: [f64; 4] = core::array::from_fn(|_| rng.sample::<f64, _>(StandardNormal));
        let conf_jitter: f64 = rng.sample(StandardNormal);

        if drop_draw < noise.dropout_prob {
            continue;
        }
        let Some(clean) = project(obj, pose, frame, noise.confidence_base) else {
            continue;
        };
        let s = noise.pixel_sigma;
        let noisy = BBox {
            x_min: clean.bbox.x_min + s * jitter[0],
            y_min: clean.bbox.y_min + s * jitter[1],
            x_max: clean.bbox.x_max + s * jitter[2],
            y_max: clean.bbox.y_max + s * jitter[3],
        };
        let Some(bbox) = frame.clip(noisy) else {
            continue;
        };
        let confidence =
            (noise.confidence_base + noise.confidence_sigma * conf_jitter).clamp(0.0, 1.0);
        out.push(Detection {
            class_id: obj.class_id,
            confidence,
            bbox,
        });
    }
    out
}

/// Moves the camera as a user following `dir` would.
pub fn step_camera(pose: &CameraPose, dir: Direction, gain_deg: f64) -> Result<CameraPose, SimError> {
    if !(gain_deg > 0.0 && gain_deg.is_finite()) {
        return Err(SimError::NonPositiveGain(gain_deg));
    }
    let mut next = *pose;
    match dir {
        Direction::Left => next.pan_deg -= gain_deg,
        Direction::Right => next.pan_deg += gain_deg,
        Direction::Up => next.tilt_deg -= gain_deg,
        Direction::Down => next.tilt_deg += gain_deg,
    }
    next.pan_deg = wrap_deg(next.pan_deg);
    next.tilt_deg = wrap_deg(next.tilt_deg);
    Ok(next)
}
