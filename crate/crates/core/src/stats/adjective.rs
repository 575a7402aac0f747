use core::fmt;

use serde::{Deserialize, Serialize};

use super::StatsError;

/// Qualitative label for a mean score on the 1..5 scale.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Adjective {
    #[serde(rename = "Very Poor")]
    VeryPoor,
    Poor,
    Acceptable,
    Good,
    Excellent,
    Best,
}

impl Adjective {
    pub fn as_str(self) -> &'static str {
        match self {
            Adjective::VeryPoor => "Very Poor",
            Adjective::Poor => "Poor",
            Adjective::Acceptable => "Acceptable",
            Adjective::Good => "Good",
            Adjective::Excellent => "Excellent",
            Adjective::Best => "Best",
        }
    }
}

impl fmt::Display for Adjective {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

const EDGES: [f64; 7] = [1.0, 1.25, 2.5, 3.5, 4.0, 4.5, 5.0];

/// Means computed from averaged averages land a few ulps off a band edge.
const EDGE_TOLERANCE: f64 = 1e-9;

/// Maps a mean in `[1, 5]` to its label. Bands are `[lo, hi)` except the
/// top band, which includes 5. Means within 1e-9 of an edge count as on it.
pub fn adjective_rating(mean: f64) -> Result<Adjective, StatsError> {
    let snapped = EDGES
        .into_iter()
        .find(|e| libm::fabs(mean - e) <= EDGE_TOLERANCE)
        .unwrap_or(mean);
    if !(1.0..=5.0).contains(&snapped) {
        return Err(StatsError::OutOfRange(mean));
    }
    Ok(match snapped {
        m if m < 1.25 => Adjective::VeryPoor,
        m if m < 2.5 => Adjective::Poor,
        m if m < 3.5 => Adjective::Acceptable,
        m if m < 4.0 => Adjective::Good,
        m if m < 4.5 => Adjective::Excellent,
        _ => Adjective::Best,
    })
}
