//! Analysis of integrated curves from their stored frames.
//!
//! Curvatures are measured as `k_i = eps_i g(V_i', V_{i+1})` with `V_i'`
//! from a 7-point central difference of the stored frames, then expanded
//! into jets by finite differences of the measured curvatures. From there
//! the harmonic recursion and the detectors are shared with the jet path.
//!
//! Stencils are spaced `stride` samples apart, where `stride * step` is
//! close to `Config::sampled_spacing`; a spacing much finer than that would
//! amplify the integration error in every difference.

use rayon::prelude::*;

use crate::config::Config;
use crate::error::{Error, Result};
use crate::fd::CentralStencil;
use crate::frenet::{frenet_equation_residual, orthonormality_defect};
use crate::harmonic::{harmonic_at, HarmonicProfile};
use crate::helix::{report_from_series, Analysis, AnalysisPath, AnalysisSeries};
use crate::jet::Jet;
use crate::metric::{Sign, Vector};
use crate::synthesis::{CurvatureSpec, SampledCurve};

const HALF_WIDTH: usize = 3;

struct Measured<'a> {
    curve: &'a SampledCurve,
    stride: usize,
    stencil: CentralStencil,
    /// `k[j][i]` = `k_{i+1}` at sample `j`; empty where no stencil fits.
    k: Vec<Vec<f64>>,
    jet_order: usize,
}

impl Measured<'_> {
    fn spacing(&self) -> f64 {
        self.stride as f64 * self.curve.step
    }

    /// `V'` for every frame vector at sample `j`.
    fn frame_derivs(&self, j: usize) -> Vec<Vector> {
        frame_derivs(self.curve, &self.stencil, self.stride, j)
    }

    fn curvature_jets(&self, j: usize) -> Vec<Jet> {
        let n = self.curve.dim();
        let h = self.spacing();
        let half = self.stencil.half() as isize;
        (0..n - 1)
            .map(|i| {
                let values: Vec<f64> = (-half..=half)
                    .map(|m| self.k[(j as isize + m * self.stride as isize) as usize][i])
                    .collect();
                let derivs = (0..=self.jet_order)
                    .map(|d| self.stencil.apply(d, &values, h))
                    .collect();
                Jet::new(self.curve.s[j], derivs)
            })
            .collect()
    }

    fn profile(&self, j: usize) -> Result<HarmonicProfile> {
        harmonic_at(&self.curvature_jets(j), &self.curve.signs)
    }
}

fn frame_derivs(curve: &SampledCurve, stencil: &CentralStencil, stride: usize, j: usize) -> Vec<Vector> {
    let n = curve.dim();
    let h = stride as f64 * curve.step;
    let half = stencil.half() as isize;
    (0..n)
        .map(|v| {
            (0..n)
                .map(|c| {
                    let values: Vec<f64> = (-half..=half)
                        .map(|m| curve.frames[(j as isize + m * stride as isize) as usize][v][c])
                        .collect();
                    stencil.apply(1, &values, h)
                })
                .collect()
        })
        .collect()
}

/// Analysis stride for a curve integrated with step `step`.
pub fn analysis_stride(step: f64, cfg: &Config) -> usize {
    ((cfg.sampled_spacing / step).round() as usize).max(1)
}

/// Analyzes a synthesized curve through its stored frames.
pub fn analyze_sampled(curve: &SampledCurve, cfg: &Config) -> Result<Analysis> {
    cfg.validate()?;
    let n = curve.dim();
    if n < 3 {
        return Err(Error::UnsupportedDimension(n));
    }
    let jet_order = n - 2;
    let half = HALF_WIDTH.max(jet_order / 2 + 1);
    let stencil = CentralStencil::new(half, jet_order.max(1));
    let stride = analysis_stride(curve.step, cfg);
    let last = curve.len() - 1;
    let margin = 2 * half * stride;
    if last < 2 * margin + (crate::curve::MIN_SAMPLES - 1) * stride {
        return Err(Error::InvalidSpec(format!(
            "{} samples are too few for analysis at stride {stride}",
            curve.len()
        )));
    }

    // curvatures wherever a frame stencil fits
    let inner = half * stride;
    let g = &curve.metric;
    let k: Vec<Result<Vec<f64>>> = (0..=last)
        .into_par_iter()
        .map(|j| {
            if j < inner || j > last - inner {
                return Ok(Vec::new());
            }
            let d = frame_derivs(curve, &stencil, stride, j);
            (0..n - 1)
                .map(|i| {
                    let v = curve.signs[i + 1].value() * g.dot(&d[i], &curve.frames[j][i + 1]);
                    if v > cfg.curvature_floor {
                        Ok(v)
                    } else {
                        Err(Error::DegenerateCurvature {
                            index: i + 1,
                            value: v,
                            s: curve.s[j],
                        })
                    }
                })
                .collect()
        })
        .collect();
    let k = k.into_iter().collect::<Result<Vec<_>>>()?;
    let measured = Measured {
        curve,
        stride,
        stencil,
        k,
        jet_order,
    };

    let indices: Vec<usize> = (margin..=last - margin).step_by(stride).collect();
    check_signs(curve, &indices, cfg)?;
    let profiles = indices
        .par_iter()
        .map(|&j| measured.profile(j))
        .collect::<Vec<_>>()
        .into_iter()
        .collect::<Result<Vec<_>>>()?;

    let frenet_residual = indices
        .par_iter()
        .zip(&profiles)
        .map(|(&j, p)| {
            let kv: Vec<f64> = p.curvatures.iter().map(Jet::value).collect();
            frenet_equation_residual(&curve.frames[j], &measured.frame_derivs(j), &kv, &curve.signs, n)
        })
        .reduce(|| 0.0, f64::max);
    let mut frame_defect: f64 = 0.0;
    for &j in &indices {
        let defect = orthonormality_defect(g, &curve.frames[j], &curve.signs);
        if defect.is_nan() || defect > cfg.frame_tol {
            return Err(Error::FrameDefect { defect, s: curve.s[j] });
        }
        frame_defect = frame_defect.max(defect);
    }

    // jet H' against a central difference over neighbouring integration samples
    let h = curve.step;
    let jet_fd_residual = (1..indices.len() - 1)
        .into_par_iter()
        .map(|t| -> Result<f64> {
            let j = indices[t];
            let hi = measured.profile(j + 1)?.values();
            let lo = measured.profile(j - 1)?.values();
            Ok(profiles[t]
                .h
                .iter()
                .zip(hi.iter().zip(&lo))
                .map(|(jet, (u, l))| (jet.deriv(1).expect("order >= 1") - (u - l) / (2.0 * h)).abs())
                .fold(0.0, f64::max))
        })
        .collect::<Vec<_>>()
        .into_iter()
        .try_fold(0.0f64, |acc, r| r.map(|v| acc.max(v)))?;

    let series = AnalysisSeries {
        path: AnalysisPath::Sampled,
        metric: g.clone(),
        signs: curve.signs.clone(),
        grid: indices.iter().map(|&j| curve.s[j]).collect(),
        spacing: measured.spacing(),
        frames: indices.iter().map(|&j| curve.frames[j].clone()).collect(),
        profiles,
        unit_speed_deviation: curve.speed_deviation(),
        frame_defect,
        frenet_residual,
        jet_fd_residual,
        fd_step: h,
    };
    Ok(Analysis {
        report: report_from_series(&series, cfg)?,
        series,
    })
}

fn check_signs(curve: &SampledCurve, indices: &[usize], cfg: &Config) -> Result<()> {
    let g = &curve.metric;
    for &j in indices {
        for (i, v) in curve.frames[j].iter().enumerate() {
            let q = g.dot(v, v);
            if Sign::of(q) != curve.signs[i] || q.abs() <= cfg.null_tol {
                return Err(Error::SignFlip { s: curve.s[j] });
            }
        }
    }
    Ok(())
}

/// Max relative error between measured curvatures and the prescribed ones
/// over the analysis grid.
pub fn curvature_round_trip_error(spec: &CurvatureSpec, series: &AnalysisSeries) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for (s, p) in series.grid.iter().zip(&series.profiles) {
        let want = spec.curvatures_at(*s)?;
        for (k, w) in p.curvatures.iter().zip(want) {
            worst = worst.max((k.value() - w).abs() / w.abs());
        }
    }
    Ok(worst)
}
