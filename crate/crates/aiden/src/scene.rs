//! Scene files: the virtual world the mock detector looks at.
//!
//! ```json
//! { "objects": [{"class": "cup", "pan_deg": 30, "tilt_deg": -5, "size_deg": 6}],
//!   "camera": {"hfov_deg": 60, "vfov_deg": 45},
//!   "noise": {"pixel_sigma": 2, "dropout_prob": 0.1},
//!   "frame": {"width_px": 640, "height_px": 480},
//!   "target": "cup" }
//! ```

use std::path::Path;

use aiden_core::{class_name, CameraPose, DetectorNoise, FrameGeometry, SceneObject};
use anyhow::{anyhow, Context};
use serde::{Deserialize, Serialize};

use crate::protocol::ClassRef;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ObjectSpec {
    class: ClassRef,
    pan_deg: f64,
    tilt_deg: f64,
    size_deg: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CameraSpec {
    hfov_deg: f64,
    vfov_deg: f64,
    #[serde(default)]
    pan_deg: f64,
    #[serde(default)]
    tilt_deg: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SceneSpec {
    objects: Vec<ObjectSpec>,
    #[serde(default)]
    camera: Option<CameraSpec>,
    #[serde(default)]
    noise: DetectorNoise,
    #[serde(default)]
    frame: Option<FrameGeometry>,
    #[serde(default)]
    target: Option<ClassRef>,
}

/// A validated scene.
#[derive(Debug, Clone, PartialEq)]
pub struct World {
    pub objects: Vec<SceneObject>,
    /// Starting orientation and field of view.
    pub camera: CameraPose,
    pub noise: DetectorNoise,
    pub frame: FrameGeometry,
    pub target: Option<u8>,
}

pub fn default_frame() -> FrameGeometry {
    FrameGeometry::new(640, 480).expect("non-empty frame")
}

impl World {
    pub fn new(objects: Vec<SceneObject>) -> Self {
        Self {
            objects,
            camera: CameraPose::default(),
            noise: DetectorNoise::default(),
            frame: default_frame(),
            target: None,
        }
    }

    /// A cup, a bottle, a backpack and a door spread around the room.
    pub fn demo() -> Self {
        let obj = |class, pan, tilt, size| SceneObject::new(class, pan, tilt, size).expect("valid demo object");
        let mut w = Self::new(vec![
            obj(41, 35.0, 8.0, 6.0),
            obj(39, -50.0, 4.0, 7.0),
            obj(24, 120.0, 15.0, 12.0),
            obj(80, -150.0, -5.0, 30.0),
        ]);
        w.target = Some(41);
        w
    }

    pub fn load(path: &Path) -> anyhow::Result<Self> {
        let raw = std::fs::read_to_string(path)
            .with_context(|| format!("reading scene {}", path.display()))?;
        Self::from_json(&raw).with_context(|| format!("parsing scene {}", path.display()))
    }

    pub fn from_json(raw: &str) -> anyhow::Result<Self> {
        let spec: SceneSpec = serde_json::from_str(raw)?;
        let resolve = |c: &ClassRef| c.resolve().ok_or_else(|| anyhow!("unknown class {c}"));
        let mut objects = Vec::with_capacity(spec.objects.len());
        for o in &spec.objects {
            objects.push(SceneObject::new(resolve(&o.class)?, o.pan_deg, o.tilt_deg, o.size_deg)?);
        }
        let camera = match spec.camera {
            Some(c) => CameraPose::new(c.pan_deg, c.tilt_deg, c.hfov_deg, c.vfov_deg)?,
            None => CameraPose::default(),
        };
        spec.noise.validate()?;
        let target = spec.target.as_ref().map(resolve).transpose()?;
        Ok(Self {
            objects,
            camera,
            noise: spec.noise,
            frame: spec.frame.unwrap_or_else(default_frame),
            target,
        })
    }

    pub fn to_json(&self) -> String {
        let spec = SceneSpec {
            objects: self
                .objects
                .iter()
                .map(|o| ObjectSpec {
                    class: class_name(o.class_id).map_or(ClassRef::from(o.class_id), ClassRef::from),
                    pan_deg: o.pan_deg,
                    tilt_deg: o.tilt_deg,
                    size_deg: o.angular_size_deg,
                })
                .collect(),
            camera: Some(CameraSpec {
                hfov_deg: self.camera.hfov_deg,
                vfov_deg: self.camera.vfov_deg,
                pan_deg: self.camera.pan_deg,
                tilt_deg: self.camera.tilt_deg,
            }),
            noise: self.noise,
            frame: Some(self.frame),
            target: self.target.map(ClassRef::from),
        };
        serde_json::to_string_pretty(&spec).expect("scene serializes")
    }

    pub fn object_of_class(&self, class: u8) -> Option<&SceneObject> {
        self.objects.iter().find(|o| o.class_id == class)
    }
}
