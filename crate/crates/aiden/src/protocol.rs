//! Newline-delimited JSON frames exchanged with the offload server.
//!
//! One request or response per line, UTF-8, at most [`MAX_FRAME_BYTES`]
//! bytes before the newline.

use std::fmt;
use std::io::{self, BufRead};

use aiden_core::{class_id, Detection, Direction, FeedbackEvent, GuidancePhase, CLASS_COUNT};
use serde::{Deserialize, Serialize};

pub const MAX_FRAME_BYTES: usize = 64 * 1024;

/// Target class given either by id or by name.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ClassRef {
    Id(i64),
    Name(String),
}

impl ClassRef {
    pub fn resolve(&self) -> Option<u8> {
        match self {
            ClassRef::Id(id) => u8::try_from(*id).ok().filter(|id| *id < CLASS_COUNT),
            ClassRef::Name(name) => class_id(name),
        }
    }
}

impl From<u8> for ClassRef {
    fn from(id: u8) -> Self {
        ClassRef::Id(i64::from(id))
    }
}

impl From<&str> for ClassRef {
    fn from(name: &str) -> Self {
        ClassRef::Name(name.to_owned())
    }
}

impl fmt::Display for ClassRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ClassRef::Id(id) => write!(f, "{id}"),
            ClassRef::Name(name) => write!(f, "{name:?}"),
        }
    }
}

/// Camera orientation carried on the wire; the field of view comes from the scene.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Pose {
    pub pan_deg: f64,
    pub tilt_deg: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum RequestBody {
    FindObject {
        target_class: ClassRef,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        pose: Option<Pose>,
    },
    SceneDescribe {
        fixture: String,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        question: Option<String>,
    },
    Ocr {
        fixture: String,
    },
    /// One step of a guidance session held by the server for this connection.
    Guide {
        target_class: ClassRef,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        direction: Option<Direction>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        pose: Option<Pose>,
    },
}

impl RequestBody {
    pub fn kind_name(&self) -> &'static str {
        match self {
            RequestBody::FindObject { .. } => "find_object",
            RequestBody::SceneDescribe { .. } => "scene_describe",
            RequestBody::Ocr { .. } => "ocr",
            RequestBody::Guide { .. } => "guide",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Request {
    pub id: String,
    #[serde(flatten)]
    pub body: RequestBody,
    /// Client monotonic timestamp, milliseconds.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sent_at: Option<u64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ErrorCode {
    /// Not UTF-8, not JSON, or not a JSON object.
    MalformedFrame,
    FrameTooLong,
    /// Well-formed JSON that does not describe a request.
    BadRequest,
    UnknownClass,
    UnknownFixture,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GuidanceResult {
    pub phase: GuidancePhase,
    /// Normalized center distance of the target, absent when it was not seen.
    pub distance: Option<f64>,
    pub events: Vec<FeedbackEvent>,
    pub pose: Pose,
    pub detections: Vec<Detection>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ResultBody {
    FindObject { detections: Vec<Detection> },
    SceneDescribe { text: String, prompt: String },
    Ocr { text: String, prompt: String },
    Guide(GuidanceResult),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum Outcome {
    Ok { result: ResultBody },
    Error { code: ErrorCode, message: String },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Response {
    /// Echo of the request id; null when the frame could not be read.
    pub id: Option<String>,
    /// Position of the request in the server's arrival order.
    pub seq: u64,
    #[serde(flatten)]
    pub outcome: Outcome,
    /// Time spent waiting in the queue.
    pub queue_ms: f64,
    /// Wall time of the handler, including the simulated backend latency.
    pub server_ms: f64,
    /// Backend latency drawn for this request from the seeded profile.
    pub scheduled_ms: f64,
}

impl Response {
    pub fn is_ok(&self) -> bool {
        matches!(self.outcome, Outcome::Ok { .. })
    }

    pub fn error_code(&self) -> Option<ErrorCode> {
        match &self.outcome {
            Outcome::Error { code, .. } => Some(*code),
            Outcome::Ok { .. } => None,
        }
    }

    pub fn result(&self) -> Option<&ResultBody> {
        match &self.outcome {
            Outcome::Ok { result } => Some(result),
            Outcome::Error { .. } => None,
        }
    }
}

/// A rejected frame: the code, a message and whatever id could be recovered.
#[derive(Debug, Clone, PartialEq)]
pub struct FrameError {
    pub id: Option<String>,
    pub code: ErrorCode,
    pub message: String,
}

/// Serializes one message as a single line without the trailing newline.
pub fn encode<T: Serialize>(msg: &T) -> String {
    serde_json::to_string(msg).expect("protocol types always serialize")
}

pub fn decode_request(line: &str) -> Result<Request, FrameError> {
    let value: serde_json::Value = serde_json::from_str(line).map_err(|e| FrameError {
        id: None,
        code: ErrorCode::MalformedFrame,
        message: e.to_string(),
    })?;
    let Some(obj) = value.as_object() else {
        return Err(FrameError {
            id: None,
            code: ErrorCode::MalformedFrame,
            message: "frame is not a JSON object".into(),
        });
    };
    let id = obj.get("id").and_then(|v| v.as_str()).map(str::to_owned);
    serde_json::from_value(value).map_err(|e| FrameError {
        id,
        code: ErrorCode::BadRequest,
        message: e.to_string(),
    })
}

pub fn decode_response(line: &str) -> Result<Response, serde_json::Error> {
    serde_json::from_str(line)
}

/// One line read off a stream.
#[derive(Debug, Clone, PartialEq)]
pub enum Frame {
    Line(String),
    TooLong,
    NotUtf8,
}

/// Reads the next newline-terminated frame, skipping blank lines.
///
/// Lines longer than `max` bytes are consumed up to their newline and
/// reported as [`Frame::TooLong`]. Returns `None` at end of stream; a final
/// line without a newline still counts.
pub fn read_frame<R: BufRead>(reader: &mut R, max: usize) -> io::Result<Option<Frame>> {
    loop {
        let mut buf = Vec::new();
        let mut overflow = false;
        let mut saw_any = false;
        loop {
            let chunk = reader.fill_buf()?;
            if chunk.is_empty() {
                break;
            }
            saw_any = true;
            let (take, done) = match chunk.iter().position(|b| *b == b'\n') {
                Some(i) => (i + 1, true),
                None => (chunk.len(), false),
            };
            let body = if done { &chunk[..take - 1] } else { &chunk[..take] };
            if !overflow {
                if buf.len() + body.len() > max {
                    overflow = true;
                    buf.clear();
                } else {
                    buf.extend_from_slice(body);
                }
            }
            reader.consume(take);
            if done {
                break;
            }
        }
        if !saw_any {
            return Ok(None);
        }
        if overflow {
            return Ok(Some(Frame::TooLong));
        }
        if buf.last() == Some(&b'\r') {
            buf.pop();
        }
        match String::from_utf8(buf) {
            Ok(s) if s.trim().is_empty() => continue,
            Ok(s) => return Ok(Some(Frame::Line(s))),
            Err(_) => return Ok(Some(Frame::NotUtf8)),
        }
    }
}
