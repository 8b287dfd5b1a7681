//! Analysis and synthesis settings.

use serde::{Deserialize, Serialize};

use crate::curve::MIN_SAMPLES;
use crate::error::{Error, Result};
use crate::frenet::{FrameTolerances, DEFAULT_CURVATURE_FLOOR, DEFAULT_FRAME_TOL};
use crate::metric::DEFAULT_NULL_TOL;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Config {
    /// Relative variation below which a sampled scalar counts as constant.
    pub const_tol: f64,
    pub h_top_floor: f64,
    pub sum_floor: f64,
    pub residual_tol: f64,
    pub null_tol: f64,
    pub curvature_floor: f64,
    pub frame_tol: f64,
    pub unit_speed_tol: f64,
    /// Largest re-orthonormalization correction tolerated per RK4 step.
    pub drift_limit: f64,
    /// Step of the central difference that cross-checks jet derivatives.
    pub fd_step: f64,
    /// Target spacing between analysis points on synthesized curves.
    pub sampled_spacing: f64,
    /// `g(X, V_n)` used to scale the axis.
    pub coupling: f64,
    pub samples: Option<usize>,
    pub jet_order: Option<usize>,
    pub step: Option<f64>,
    pub seed: Option<u64>,
}

impl Default for Config {
    fn default() -> Self {
        Config {
            const_tol: 1e-6,
            h_top_floor: 1e-7,
            sum_floor: 1e-9,
            residual_tol: 1e-8,
            null_tol: DEFAULT_NULL_TOL,
            curvature_floor: DEFAULT_CURVATURE_FLOOR,
            frame_tol: DEFAULT_FRAME_TOL,
            unit_speed_tol: 1e-8,
            drift_limit: 1e-6,
            fd_step: 1e-4,
            sampled_spacing: 1e-2,
            coupling: 1.0,
            samples: None,
            jet_order: None,
            step: None,
            seed: None,
        }
    }
}

impl Config {
    pub const TOLERANCE_KEYS: [&'static str; 12] = [
        "const_tol",
        "h_top_floor",
        "sum_floor",
        "residual_tol",
        "null_tol",
        "curvature_floor",
        "frame_tol",
        "unit_speed_tol",
        "drift_limit",
        "fd_step",
        "sampled_spacing",
        "coupling",
    ];

    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: Config = serde_json::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    fn slot(&mut self, key: &str) -> Option<&mut f64> {
        Some(match key {
            "const_tol" => &mut self.const_tol,
            "h_top_floor" => &mut self.h_top_floor,
            "sum_floor" => &mut self.sum_floor,
            "residual_tol" => &mut self.residual_tol,
            "null_tol" => &mut self.null_tol,
            "curvature_floor" => &mut self.curvature_floor,
            "frame_tol" => &mut self.frame_tol,
            "unit_speed_tol" => &mut self.unit_speed_tol,
            "drift_limit" => &mut self.drift_limit,
            "fd_step" => &mut self.fd_step,
            "sampled_spacing" => &mut self.sampled_spacing,
            "coupling" => &mut self.coupling,
            _ => return None,
        })
    }

    /// Applies a `KEY=VAL` override.
    pub fn set_tolerance(&mut self, assignment: &str) -> Result<()> {
        let (key, value) = assignment
            .split_once('=')
            .ok_or_else(|| Error::InvalidSpec(format!("expected KEY=VAL, got {assignment:?}")))?;
        let key = key.trim();
        let value: f64 = value
            .trim()
            .parse()
            .map_err(|_| Error::InvalidSpec(format!("{key}: {value:?} is not a number")))?;
        let slot = self.slot(key).ok_or_else(|| {
            Error::InvalidSpec(format!(
                "unknown tolerance {key:?}; known: {}",
                Self::TOLERANCE_KEYS.join(", ")
            ))
        })?;
        *slot = value;
        self.validate()
    }

    pub fn validate(&self) -> Result<()> {
        let mut probe = self.clone();
        for key in Self::TOLERANCE_KEYS {
            let v = *probe.slot(key).expect("listed key");
            let ok = if key == "coupling" {
                v.is_finite() && v != 0.0
            } else {
                v.is_finite() && v > 0.0
            };
            if !ok {
                return Err(Error::InvalidSpec(format!(
                    "{key} must be positive and finite, got {v}"
                )));
            }
        }
        if let Some(samples) = self.samples {
            if samples < MIN_SAMPLES {
                return Err(Error::InvalidSpec(format!(
                    "need at least {MIN_SAMPLES} samples, got {samples}"
                )));
            }
        }
        if let Some(step) = self.step {
            if !(step.is_finite() && step > 0.0) {
                return Err(Error::InvalidSpec(format!("step must be positive, got {step}")));
            }
        }
        Ok(())
    }

    /// Jet order for an n-dimensional analysis; at least `n + 2`.
    pub fn jet_order_for(&self, n: usize) -> Result<usize> {
        let order = self.jet_order.unwrap_or(2 * n + 2);
        if order < n + 2 {
            return Err(Error::InvalidSpec(format!(
                "jet order {order} is below n + 2 = {}",
                n + 2
            )));
        }
        Ok(order)
    }

    pub fn frame_tolerances(&self) -> FrameTolerances {
        FrameTolerances {
            null_tol: self.null_tol,
            curvature_floor: self.curvature_floor,
            residual_tol: self.residual_tol,
            frame_tol: self.frame_tol,
        }
    }
}
