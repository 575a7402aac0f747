//! Camera frames, bounding boxes and detections.

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Number of detector classes: the 80 COCO categories plus `door` at index 80.
pub const CLASS_COUNT: u8 = 81;

const CLASS_TABLE: &str = include_str!("../data/classes.v1.txt");

/// Version of the shipped class table.
pub const CLASS_TABLE_VERSION: u32 = 1;

fn class_lines() -> impl Iterator<Item = &'static str> {
    CLASS_TABLE
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
}

/// Name for a class id, `None` when the id is outside `0..=80`.
pub fn class_name(id: u8) -> Option<&'static str> {
    class_lines().nth(usize::from(id))
}

/// Class id for a name (case-insensitive, surrounding whitespace ignored).
pub fn class_id(name: &str) -> Option<u8> {
    let name = name.trim();
    class_lines()
        .position(|n| n.eq_ignore_ascii_case(name))
        .and_then(|i| u8::try_from(i).ok())
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeometryError {
    #[error("frame dimensions must be positive, got {width}x{height}")]
    EmptyFrame { width: u32, height: u32 },
    #[error("class id {0} is outside 0..=80")]
    UnknownClass(i64),
    #[error("confidence {0} is outside [0, 1]")]
    Confidence(f64),
    #[error("bounding box is empty, inverted or not finite")]
    DegenerateBox,
}

/// Pixel dimensions of a camera frame.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawFrame")]
pub struct FrameGeometry {
    width_px: u32,
    height_px: u32,
}

#[derive(Deserialize)]
struct RawFrame {
    width_px: u32,
    height_px: u32,
}

impl TryFrom<RawFrame> for FrameGeometry {
    type Error = GeometryError;

    fn try_from(raw: RawFrame) -> Result<Self, Self::Error> {
        FrameGeometry::new(raw.width_px, raw.height_px)
    }
}

impl FrameGeometry {
    pub fn new(width_px: u32, height_px: u32) -> Result<Self, GeometryError> {
        if width_px == 0 || height_px == 0 {
            return Err(GeometryError::EmptyFrame {
                width: width_px,
                height: height_px,
            });
        }
        Ok(Self {
            width_px,
            height_px,
        })
    }

    pub fn width(&self) -> f64 {
        f64::from(self.width_px)
    }

    pub fn height(&self) -> f64 {
        f64::from(self.height_px)
    }

    pub fn width_px(&self) -> u32 {
        self.width_px
    }

    pub fn height_px(&self) -> u32 {
        self.height_px
    }

    /// Frame center `(c_x, c_y)`.
    pub fn center(&self) -> (f64, f64) {
        (self.width() / 2.0, self.height() / 2.0)
    }

    /// Distance from the center to a corner; the normalizer for center distances.
    pub fn half_diagonal(&self) -> f64 {
        let (cx, cy) = self.center();
        libm::hypot(cx, cy)
    }

    /// Clips a box to the frame. `None` if nothing of it remains inside.
    pub fn clip(&self, bbox: BBox) -> Option<BBox> {
        let clipped = BBox {
            x_min: bbox.x_min.clamp(0.0, self.width()),
            y_min: bbox.y_min.clamp(0.0, self.height()),
            x_max: bbox.x_max.clamp(0.0, self.width()),
            y_max: bbox.y_max.clamp(0.0, self.height()),
        };
        clipped.is_proper().then_some(clipped)
    }

    pub fn contains(&self, bbox: &BBox) -> bool {
        bbox.is_proper()
            && bbox.x_min >= 0.0
            && bbox.y_min >= 0.0
            && bbox.x_max <= self.width()
            && bbox.y_max <= self.height()
    }
}

/// Axis-aligned box in pixel coordinates, y pointing down.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(from = "[f64; 4]", into = "[f64; 4]")]
pub struct BBox {
    pub x_min: f64,
    pub y_min: f64,
    pub x_max: f64,
    pub y_max: f64,
}

impl From<[f64; 4]> for BBox {
    fn from([x_min, y_min, x_max, y_max]: [f64; 4]) -> Self {
        Self {
            x_min,
            y_min,
            x_max,
            y_max,
        }
    }
}

impl From<BBox> for [f64; 4] {
    fn from(b: BBox) -> Self {
        [b.x_min, b.y_min, b.x_max, b.y_max]
    }
}

impl BBox {
    pub fn new(x_min: f64, y_min: f64, x_max: f64, y_max: f64) -> Result<Self, GeometryError> {
        let b = Self {
            x_min,
            y_min,
            x_max,
            y_max,
        };
        if b.is_proper() {
            Ok(b)
        } else {
            Err(GeometryError::DegenerateBox)
        }
    }

    /// Box of the given size centered on `(cx, cy)`.
    pub fn centered(cx: f64, cy: f64, width: f64, height: f64) -> Self {
        Self {
            x_min: cx - width / 2.0,
            y_min: cy - height / 2.0,
            x_max: cx + width / 2.0,
            y_max: cy + height / 2.0,
        }
    }

    /// Finite with strictly positive extent on both axes.
    pub fn is_proper(&self) -> bool {
        [self.x_min, self.y_min, self.x_max, self.y_max]
            .iter()
            .all(|v| v.is_finite())
            && self.x_min < self.x_max
            && self.y_min < self.y_max
    }

    pub fn center(&self) -> (f64, f64) {
        (
            (self.x_min + self.x_max) / 2.0,
            (self.y_min + self.y_max) / 2.0,
        )
    }

    pub fn width(&self) -> f64 {
        self.x_max - self.x_min
    }

    pub fn height(&self) -> f64 {
        self.y_max - self.y_min
    }

    pub fn area(&self) -> f64 {
        self.width() * self.height()
    }
}

/// One detector output.
///
/// Fields are public so detections can arrive over the wire; use
/// [`Detection::new`] or [`Detection::is_valid_in`] to enforce the invariants.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Detection {
    pub class_id: u8,
    pub confidence: f64,
    pub bbox: BBox,
}

impl Detection {
    pub fn new(class_id: u8, confidence: f64, bbox: BBox) -> Result<Self, GeometryError> {
        if class_id >= CLASS_COUNT {
            return Err(GeometryError::UnknownClass(i64::from(class_id)));
        }
        if !(0.0..=1.0).contains(&confidence) {
            return Err(GeometryError::Confidence(confidence));
        }
        if !bbox.is_proper() {
            return Err(GeometryError::DegenerateBox);
        }
        Ok(Self {
            class_id,
            confidence,
            bbox,
        })
    }

    /// Bounding-box center `(x_obj, y_obj)`.
    pub fn center(&self) -> (f64, f64) {
        self.bbox.center()
    }

    /// True when every invariant holds and the box lies inside `frame`.
    pub fn is_valid_in(&self, frame: &FrameGeometry) -> bool {
        self.class_id < CLASS_COUNT
            && (0.0..=1.0).contains(&self.confidence)
            && frame.contains(&self.bbox)
    }
}
