//! Serializable report records shared by the estimators and the CLI.

use serde::{Deserialize, Serialize};

/// Morrey norm report: the discrete supremum together with the ball that
/// attains it, so failures stay diagnosable.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MorreyReport {
    pub p: f64,
    pub lambda: f64,
    pub value: f64,
    pub argmax_center: [f64; 2],
    pub argmax_radius: f64,
    pub grid_h: f64,
}

/// Stummel–Kato modulus at one radius.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StummelReport {
    pub p: f64,
    pub r: f64,
    pub value: f64,
    pub argmax_center: [f64; 2],
    pub grid_h: f64,
}

/// Embedding check between two Morrey spaces.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EmbeddingReport {
    pub from_p: f64,
    pub from_lambda: f64,
    pub to_p: f64,
    pub to_lambda: f64,
    pub norm_from: f64,
    pub norm_to: f64,
    /// `norm_to / norm_from`; bounded by a grid-independent constant when the
    /// embedding hypothesis holds.
    pub ratio: f64,
}

/// Exponent measurement summary written by the analysis pipeline.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExponentSummary {
    pub alpha_hat: Option<f64>,
    pub window: (f64, f64),
    pub rms_residual: Option<f64>,
    pub predicted_alpha: Option<f64>,
    pub pass: bool,
    /// Set when the excess vanishes identically (smooth field).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}
