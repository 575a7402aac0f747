//! Offload server, client, benchmark harness and survey IO built on `aiden-core`.
//!
//! The server speaks newline-delimited JSON over TCP (and the same frames
//! over a WebSocket upgrade), queues every request from every connection in
//! arrival order and answers them one at a time from a simulated backend.

pub mod bench;
pub mod client;
pub mod fixtures;
pub mod protocol;
pub mod scene;
pub mod server;
pub mod survey;
mod ws;

use std::path::Path;

use aiden_core::BackendProfile;
use anyhow::Context;

pub use client::{Client, ClientError, Reply};
pub use fixtures::FixtureStore;
pub use protocol::{ClassRef, ErrorCode, Pose, Request, RequestBody, Response, ResultBody};
pub use scene::World;
pub use server::{serve, ServerConfig, ServerHandle};

/// Reads a backend profile from JSON shaped like [`BackendProfile`].
pub fn load_profile(path: &Path) -> anyhow::Result<BackendProfile> {
    let raw = std::fs::read_to_string(path).with_context(|| format!("reading profile {}", path.display()))?;
    let profile: BackendProfile =
        serde_json::from_str(&raw).with_context(|| format!("parsing profile {}", path.display()))?;
    profile.validate()?;
    Ok(profile)
}
