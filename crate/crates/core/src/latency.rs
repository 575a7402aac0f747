//! Backend latency profiles for the simulated inference server.
//!
//! Each functionality has a target mean and standard deviation of its
//! processing time. Samples are drawn from a normal distribution clamped at
//! zero; the underlying normal is chosen so that the *clamped* distribution
//! has exactly the configured moments.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LatencyError {
    #[error("latency mean and std must be finite and non-negative (mean {mean_s}, std {std_s})")]
    Negative { mean_s: f64, std_s: f64 },
    #[error("a zero-mean latency cannot have a positive spread")]
    ZeroMeanSpread,
    #[error("scale factor must be finite and non-negative, got {0}")]
    Scale(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FunctionKind {
    SceneDescribe,
    Ocr,
    FindObject,
}

impl FunctionKind {
    pub const ALL: [FunctionKind; 3] = [
        FunctionKind::SceneDescribe,
        FunctionKind::Ocr,
        FunctionKind::FindObject,
    ];

    pub fn label(self) -> &'static str {
        match self {
            FunctionKind::SceneDescribe => "Scene Description & QA",
            FunctionKind::Ocr => "Optical Character Recognition",
            FunctionKind::FindObject => "Find an Object (1 req.)",
        }
    }
}

/// Mean and standard deviation of a processing time, seconds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LatencyModel {
    pub mean_s: f64,
    pub std_s: f64,
}

impl LatencyModel {
    pub const ZERO: LatencyModel = LatencyModel {
        mean_s: 0.0,
        std_s: 0.0,
    };

    pub fn new(mean_s: f64, std_s: f64) -> Result<Self, LatencyError> {
        let m = Self { mean_s, std_s };
        m.validate()?;
        Ok(m)
    }

    pub fn validate(&self) -> Result<(), LatencyError> {
        let ok = |v: f64| v.is_finite() && v >= 0.0;
        if !ok(self.mean_s) || !ok(self.std_s) {
            return Err(LatencyError::Negative {
                mean_s: self.mean_s,
                std_s: self.std_s,
            });
        }
        if self.mean_s == 0.0 && self.std_s > 0.0 {
            return Err(LatencyError::ZeroMeanSpread);
        }
        Ok(())
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            mean_s: self.mean_s * factor,
            std_s: self.std_s * factor,
        }
    }

    /// Parameters `(mu, sigma)` of the normal whose zero-clamp has this model's moments.
    pub fn underlying_normal(&self) -> (f64, f64) {
        let (m, s) = (self.mean_s, self.std_s);
        if s == 0.0 || m == 0.0 {
            return (m, 0.0);
        }
        // beyond 8 sigma the clamp changes the moments by far less than an ulp
        if m / s > 8.0 {
            return (m, s);
        }
        let target_cv = s / m;
        let (mut lo, mut hi) = (-5.0_f64, 8.0_f64);
        if clamped_cv(lo) <= target_cv {
            hi = lo;
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if clamped_cv(mid) > target_cv {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let a = 0.5 * (lo + hi);
        let sigma = m / first_moment(a);
        (a * sigma, sigma)
    }

    /// One processing time in seconds, never negative.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let (mu, sigma) = self.underlying_normal();
        let z: f64 = rng.sample(StandardNormal);
        (mu + sigma * z).max(0.0)
    }
}

fn std_normal_pdf(x: f64) -> f64 {
    libm::exp(-0.5 * x * x) / libm::sqrt(2.0 * core::f64::consts::PI)
}

fn std_normal_cdf(x: f64) -> f64 {
    0.5 * libm::erfc(-x / core::f64::consts::SQRT_2)
}

/// `E[max(0, X)] / sigma` for `X ~ N(a sigma, sigma^2)`.
fn first_moment(a: f64) -> f64 {
    a * std_normal_cdf(a) + std_normal_pdf(a)
}

/// `E[max(0, X)^2] / sigma^2` for `X ~ N(a sigma, sigma^2)`.
fn second_moment(a: f64) -> f64 {
    (a * a + 1.0) * std_normal_cdf(a) + a * std_normal_pdf(a)
}

/// Coefficient of variation of the zero-clamped normal, decreasing in `a`.
fn clamped_cv(a: f64) -> f64 {
    let m1 = first_moment(a);
    libm::sqrt((second_moment(a) / (m1 * m1) - 1.0).max(0.0))
}

/// Per-functionality latency models plus a fixed transport overhead added
/// after the server-side measurement.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BackendProfile {
    pub scene_describe: LatencyModel,
    pub ocr: LatencyModel,
    pub find_object: LatencyModel,
    #[serde(default = "zero_model")]
    pub network_overhead: LatencyModel,
}

fn zero_model() -> LatencyModel {
    LatencyModel::ZERO
}

impl Default for BackendProfile {
    fn default() -> Self {
        Self::measured()
    }
}

impl BackendProfile {
    /// Server-side runtimes measured over 20 trials per functionality.
    pub fn measured() -> Self {
        Self {
            scene_describe: LatencyModel {
                mean_s: 7.34,
                std_s: 1.10,
            },
            ocr: LatencyModel {
                mean_s: 7.09,
                std_s: 2.57,
            },
            find_object: LatencyModel {
                mean_s: 0.23,
                std_s: 0.18,
            },
            network_overhead: LatencyModel::ZERO,
        }
    }

    pub fn zero() -> Self {
        Self {
            scene_describe: LatencyModel::ZERO,
            ocr: LatencyModel::ZERO,
            find_object: LatencyModel::ZERO,
            network_overhead: LatencyModel::ZERO,
        }
    }

    pub fn model(&self, kind: FunctionKind) -> &LatencyModel {
        match kind {
            FunctionKind::SceneDescribe => &self.scene_describe,
            FunctionKind::Ocr => &self.ocr,
            FunctionKind::FindObject => &self.find_object,
        }
    }

    /// Shrinks every mean and std by `factor` (desk-scale runs use 0.01).
    pub fn scaled(&self, factor: f64) -> Result<Self, LatencyError> {
        if !(factor.is_finite() && factor >= 0.0) {
            return Err(LatencyError::Scale(factor));
        }
        Ok(Self {
            scene_describe: self.scene_describe.scaled(factor),
            ocr: self.ocr.scaled(factor),
            find_object: self.find_object.scaled(factor),
            network_overhead: self.network_overhead.scaled(factor),
        })
    }

    /// Processing time for the request that arrived `seq`-th under `seed`.
    pub fn scheduled(&self, kind: FunctionKind, seed: u64, seq: u64) -> f64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(seq);
        self.model(kind).sample(&mut rng)
    }

    /// Transport overhead for the `seq`-th response, drawn after the processing time.
    pub fn scheduled_overhead(&self, seed: u64, seq: u64) -> f64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(seq);
        let _: f64 = rng.sample(StandardNormal);
        self.network_overhead.sample(&mut rng)
    }

    pub fn validate(&self) -> Result<(), LatencyError> {
        self.scene_describe.validate()?;
        self.ocr.validate()?;
        self.find_object.validate()?;
        self.network_overhead.validate()
    }
}
