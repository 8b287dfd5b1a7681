//! Curves given by coordinate expressions in the arclength parameter.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::expr::{parse_expr, ExprAst};
use crate::jet::JetVector;
use crate::metric::{classify, CausalCharacter, MetricSignature};

pub const MIN_SAMPLES: usize = 16;

/// On-disk form of a [`CurveSpec`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CurveSpecFile {
    pub dimension: usize,
    pub metric: Vec<f64>,
    pub coordinates: Vec<String>,
    pub domain: [f64; 2],
    pub samples: usize,
}

/// A unit-speed curve `s -> (x_1(s), ..., x_n(s))` on `[s_min, s_max]`.
#[derive(Debug, Clone, PartialEq)]
pub struct CurveSpec {
    metric: MetricSignature,
    coordinates: Vec<ExprAst>,
    sources: Vec<String>,
    domain: (f64, f64),
    samples: usize,
}

impl CurveSpec {
    pub fn new(metric: MetricSignature, coordinates: &[&str], domain: (f64, f64), samples: usize) -> Result<Self> {
        Self::from_file(CurveSpecFile {
            dimension: metric.dim(),
            metric: metric.eta().iter().map(|e| e.value()).collect(),
            coordinates: coordinates.iter().map(|c| c.to_string()).collect(),
            domain: [domain.0, domain.1],
            samples,
        })
    }

    pub fn from_file(file: CurveSpecFile) -> Result<Self> {
        let metric = MetricSignature::from_values(&file.metric)?;
        if file.dimension != metric.dim() {
            return Err(Error::InvalidSpec(format!(
                "dimension {} does not match metric length {}",
                file.dimension,
                metric.dim()
            )));
        }
        if file.coordinates.len() != file.dimension {
            return Err(Error::InvalidSpec(format!(
                "expected {} coordinate expressions, got {}",
                file.dimension,
                file.coordinates.len()
            )));
        }
        let [a, b] = file.domain;
        if !(a.is_finite() && b.is_finite() && a < b) {
            return Err(Error::InvalidSpec(format!("domain [{a}, {b}] is empty")));
        }
        if file.samples < MIN_SAMPLES {
            return Err(Error::InvalidSpec(format!(
                "need at least {MIN_SAMPLES} samples, got {}",
                file.samples
            )));
        }
        let coordinates = file
            .coordinates
            .iter()
            .map(|c| parse_expr(c))
            .collect::<std::result::Result<Vec<_>, _>>()?;
        Ok(CurveSpec {
            metric,
            coordinates,
            sources: file.coordinates,
            domain: (a, b),
            samples: file.samples,
        })
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Self::from_file(serde_json::from_str(text)?)
    }

    pub fn to_file(&self) -> CurveSpecFile {
        CurveSpecFile {
            dimension: self.dim(),
            metric: self.metric.eta().iter().map(|e| e.value()).collect(),
            coordinates: self.sources.clone(),
            domain: [self.domain.0, self.domain.1],
            samples: self.samples,
        }
    }

    pub fn dim(&self) -> usize {
        self.metric.dim()
    }

    pub fn metric(&self) -> &MetricSignature {
        &self.metric
    }

    pub fn coordinates(&self) -> &[ExprAst] {
        &self.coordinates
    }

    pub fn domain(&self) -> (f64, f64) {
        self.domain
    }

    pub fn samples(&self) -> usize {
        self.samples
    }

    pub fn with_samples(mut self, samples: usize) -> Result<Self> {
        if samples < MIN_SAMPLES {
            return Err(Error::InvalidSpec(format!(
                "need at least {MIN_SAMPLES} samples, got {samples}"
            )));
        }
        self.samples = samples;
        Ok(self)
    }

    /// Uniform grid including both endpoints.
    pub fn grid(&self) -> Vec<f64> {
        uniform_grid(self.domain.0, self.domain.1, self.samples)
    }

    /// Position jet: component k holds the derivatives of coordinate k at `s0`.
    pub fn curve_jets(&self, s0: f64, order: usize) -> Result<JetVector> {
        let comps = self
            .coordinates
            .iter()
            .map(|c| c.eval_jet(s0, order))
            .collect::<std::result::Result<Vec<_>, _>>()?;
        Ok(JetVector::new(comps))
    }

    /// Max over `grid` of `||g(a',a')| - 1|`.
    pub fn unit_speed_check(&self, grid: &[f64], null_tol: f64) -> Result<f64> {
        let mut worst: f64 = 0.0;
        for &s in grid {
            let jet = self.curve_jets(s, 1)?;
            let tangent = jet.deriv(1).expect("order-1 jet");
            let q = self.metric.dot(&tangent, &tangent);
            let e2: f64 = tangent.iter().map(|x| x * x).sum();
            if classify(q, e2, null_tol) == CausalCharacter::Null {
                return Err(Error::NullTangent { s });
            }
            worst = worst.max((q.abs() - 1.0).abs());
        }
        Ok(worst)
    }
}

pub fn uniform_grid(a: f64, b: f64, samples: usize) -> Vec<f64> {
    if samples == 1 {
        return vec![a];
    }
    let h = (b - a) / (samples - 1) as f64;
    (0..samples)
        .map(|i| if i + 1 == samples { b } else { a + i as f64 * h })
        .collect()
}
