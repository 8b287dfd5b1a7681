//! Slant-helix detection, axis reconstruction and the identities the axis
//! must satisfy.
//!
//! Two detectors decide the same property:
//!
//! * the lemma-sum test: `sum eps_{n-(i+2)} H_i^2` is a nonzero constant and
//!   `H_{n-2}` stays away from zero;
//! * the relation test: `H_{n-2}' = k_1 H_{n-3}` and `H_{n-2}` stays away
//!   from zero.
//!
//! They are mathematically equivalent, so any disagreement is reported.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::Config;
use crate::curve::{CurveSpec, MIN_SAMPLES};
use crate::error::{Error, Result};
use crate::frenet::{frenet_at, frenet_series, FrenetSeries};
use crate::harmonic::{harmonic_at, harmonic_series, HarmonicProfile};
use crate::metric::{MetricSignature, Sign, Vector};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConstancyStats {
    pub mean: f64,
    pub min: f64,
    pub max: f64,
    /// `(max - min) / max(1, |mean|)`
    pub relative_variation: f64,
}

impl ConstancyStats {
    pub fn of(values: &[f64]) -> ConstancyStats {
        assert!(!values.is_empty(), "stats of an empty sequence");
        let min = values.iter().copied().fold(f64::INFINITY, f64::min);
        let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let mean = (values.iter().sum::<f64>() / values.len() as f64).clamp(min, max);
        ConstancyStats {
            mean,
            min,
            max,
            relative_variation: (max - min) / mean.abs().max(1.0),
        }
    }
}

/// Outcome of one threshold comparison, with a margin of a factor 10 on
/// either side treated as too close to call.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Pass,
    Fail,
    Inconclusive,
}

impl Verdict {
    fn below(q: f64, t: f64) -> Verdict {
        if q < t / 10.0 {
            Verdict::Pass
        } else if q >= t * 10.0 || q.is_nan() {
            Verdict::Fail
        } else {
            Verdict::Inconclusive
        }
    }

    fn above(q: f64, t: f64) -> Verdict {
        if q > t * 10.0 {
            Verdict::Pass
        } else if q <= t / 10.0 || q.is_nan() {
            Verdict::Fail
        } else {
            Verdict::Inconclusive
        }
    }

    fn and(self, other: Verdict) -> Verdict {
        use Verdict::*;
        match (self, other) {
            (Fail, _) | (_, Fail) => Fail,
            (Inconclusive, _) | (_, Inconclusive) => Inconclusive,
            _ => Pass,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Confidence {
    Confident,
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TheoremOutcome {
    pub holds: bool,
    pub verdict: Verdict,
    pub stats: ConstancyStats,
    pub min_abs_h_top: f64,
    pub reasons: Vec<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CorollaryOutcome {
    pub holds: bool,
    pub verdict: Verdict,
    pub max_residual: f64,
    /// `max(1, max |k_1 H_{n-3}|)`
    pub scale: f64,
    pub min_abs_h_top: f64,
    pub reasons: Vec<String>,
}

fn min_abs_top(profiles: &[HarmonicProfile]) -> f64 {
    profiles
        .iter()
        .map(|p| p.top().value().abs())
        .fold(f64::INFINITY, f64::min)
}

fn top_reason(min_top: f64, floor: f64) -> String {
    format!("H*_{{n-2}} below floor: min |H*_{{n-2}}| = {min_top:e} <= {floor:e}")
}

/// Lemma-sum test: nonzero constant sum and `H_{n-2}` bounded away from 0.
pub fn detect_theorem(profiles: &[HarmonicProfile], cfg: &Config) -> TheoremOutcome {
    let sums: Vec<f64> = profiles.iter().map(HarmonicProfile::lemma_sum).collect();
    let stats = ConstancyStats::of(&sums);
    let min_top = min_abs_top(profiles);

    let constant = stats.relative_variation < cfg.const_tol;
    let nonzero = stats.mean.abs() > cfg.sum_floor;
    let top_ok = min_top > cfg.h_top_floor;
    let verdict = Verdict::below(stats.relative_variation, cfg.const_tol)
        .and(Verdict::above(stats.mean.abs(), cfg.sum_floor))
        .and(Verdict::above(min_top, cfg.h_top_floor));

    let mut reasons = Vec::new();
    if !constant {
        reasons.push(format!(
            "lemma sum not constant: relative variation {:e} >= const_tol {:e}",
            stats.relative_variation, cfg.const_tol
        ));
    }
    if !nonzero {
        reasons.push(format!(
            "lemma sum vanishes: |mean| = {:e} <= sum_floor {:e}",
            stats.mean.abs(),
            cfg.sum_floor
        ));
    }
    if !top_ok {
        reasons.push(top_reason(min_top, cfg.h_top_floor));
    }
    TheoremOutcome {
        holds: constant && nonzero && top_ok,
        verdict,
        stats,
        min_abs_h_top: min_top,
        reasons,
    }
}

/// Relation test: `H_{n-2}' = k_1 H_{n-3}` within `const_tol` relative to
/// `max(1, max |k_1 H_{n-3}|)`, and `H_{n-2}` bounded away from 0.
pub fn detect_corollary(profiles: &[HarmonicProfile], cfg: &Config) -> CorollaryOutcome {
    let max_residual = profiles.iter().map(|p| p.relation_residual().abs()).fold(0.0, f64::max);
    let scale = profiles.iter().map(HarmonicProfile::relation_scale).fold(1.0, f64::max);
    let min_top = min_abs_top(profiles);
    let bound = cfg.const_tol * scale;

    let relation_ok = max_residual < bound;
    let top_ok = min_top > cfg.h_top_floor;
    let verdict = Verdict::below(max_residual, bound).and(Verdict::above(min_top, cfg.h_top_floor));

    let mut reasons = Vec::new();
    if !relation_ok {
        reasons.push(format!(
            "relation residual {max_residual:e} >= {bound:e} (const_tol x scale {scale:e})"
        ));
    }
    if !top_ok {
        reasons.push(top_reason(min_top, cfg.h_top_floor));
    }
    CorollaryOutcome {
        holds: relation_ok && top_ok,
        verdict,
        max_residual,
        scale,
        min_abs_h_top: min_top,
        reasons,
    }
}

/// `X = coupling * (sum_{i=1}^{n-2} H_i eps_{n-(i+2)} V_{n-(i+1)} + eps_{n-1} V_n)`
pub fn axis_from_frame(frames: &[Vector], profile: &HarmonicProfile, coupling: f64) -> Vector {
    let n = frames.len();
    let eps = |j: usize| profile.signs[j].value();
    let mut x = Vector::zeros(frames[0].len());
    for i in 1..=n - 2 {
        x.axpy(profile.value(i) * eps(n - (i + 2)), &frames[n - (i + 2)]);
    }
    x.axpy(eps(n - 1), &frames[n - 1]);
    x.iter().map(|c| coupling * c).collect()
}

/// Max over interior samples of the Euclidean norm of the central
/// difference of `X`. Returns 0 for fewer than three samples.
pub fn verify_axis_parallel(axis: &[Vector], spacing: f64) -> f64 {
    axis.windows(3)
        .map(|w| (&w[2] - &w[0]).euclidean_norm() / (2.0 * spacing))
        .fold(0.0, f64::max)
}

#[derive(Debug, Clone, PartialEq)]
pub struct AxisInnerResiduals {
    /// Row `i` (0-based, `i = 0..=n-2`): max `|g(V_{n-(i+1)}, X) - H_i g(V_n, X)|`.
    pub rows: Vec<f64>,
    /// max `|g(V_{n-1}, X)|`
    pub vn1: f64,
    /// Statistics of `g(V_n, X)`.
    pub inner_stats: ConstancyStats,
}

/// Inner products of the axis with the frame: `g(V_{n-(i+1)}, X)` must equal
/// `H_i g(V_n, X)`, and `g(V_n, X)` must stay constant.
pub fn verify_prop31(
    frames: &[Vec<Vector>],
    profiles: &[HarmonicProfile],
    axis: &[Vector],
    g: &MetricSignature,
) -> AxisInnerResiduals {
    let n = g.dim();
    let mut rows = vec![0.0f64; n - 1];
    let mut vn1: f64 = 0.0;
    let mut inner = Vec::with_capacity(axis.len());
    for ((fr, p), x) in frames.iter().zip(profiles).zip(axis) {
        let gn = g.dot(&fr[n - 1], x);
        inner.push(gn);
        for (i, row) in rows.iter_mut().enumerate() {
            let r = (g.dot(&fr[n - (i + 2)], x) - p.value(i) * gn).abs();
            *row = row.max(r);
        }
        vn1 = vn1.max(g.dot(&fr[n - 2], x).abs());
    }
    AxisInnerResiduals {
        rows,
        vn1,
        inner_stats: ConstancyStats::of(&inner),
    }
}

/// max `|g(X,X) - coupling^2 (lemma_sum + eps_{n-1})|`
pub fn axis_norm_check(profiles: &[HarmonicProfile], axis: &[Vector], g: &MetricSignature, coupling: f64) -> f64 {
    profiles
        .iter()
        .zip(axis)
        .map(|(p, x)| {
            let want = coupling * coupling * (p.lemma_sum() + p.signs[p.dim() - 1].value());
            (g.dot(x, x) - want).abs()
        })
        .fold(0.0, f64::max)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AnalysisPath {
    /// Derivatives from Taylor jets of closed-form coordinates.
    Jets,
    /// Derivatives from finite differences of stored frames.
    Sampled,
}

/// Per-sample data shared by both analysis paths.
#[derive(Debug, Clone)]
pub struct AnalysisSeries {
    pub path: AnalysisPath,
    pub metric: MetricSignature,
    pub signs: Vec<Sign>,
    /// Uniform analysis grid.
    pub grid: Vec<f64>,
    pub spacing: f64,
    /// Frame values `V_1..V_n` at each grid point.
    pub frames: Vec<Vec<Vector>>,
    pub profiles: Vec<HarmonicProfile>,
    pub unit_speed_deviation: f64,
    pub frame_defect: f64,
    pub frenet_residual: f64,
    /// Max gap between jet `H_i'` and a central difference of `H_i`.
    pub jet_fd_residual: f64,
    /// Step used for that central difference.
    pub fd_step: f64,
}

impl AnalysisSeries {
    pub fn dim(&self) -> usize {
        self.metric.dim()
    }

    pub fn recursion_residual(&self) -> f64 {
        self.profiles
            .iter()
            .map(HarmonicProfile::recursion_residual)
            .fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics {
    pub unit_speed_deviation: f64,
    pub frame_defect: f64,
    pub frenet_residual: f64,
    pub recursion_residual: f64,
    pub jet_fd_residual: f64,
    pub fd_step: f64,
    pub grid_spacing: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HelixReport {
    pub schema_version: u32,
    pub path: AnalysisPath,
    pub dimension: usize,
    pub metric: MetricSignature,
    pub signs: Vec<Sign>,
    /// First and last analyzed parameter values.
    pub domain: [f64; 2],
    pub samples: usize,
    pub verdict_theorem: bool,
    pub verdict_corollary: bool,
    pub confidence: Confidence,
    pub detectors_agree: bool,
    pub reasons: Vec<String>,
    pub lemma_sum_stats: ConstancyStats,
    #[serde(rename = "min_abs_H_top")]
    pub min_abs_h_top: f64,
    pub max_relation_residual: f64,
    pub relation_scale: f64,
    pub coupling: f64,
    pub axis: Vec<Vector>,
    pub axis_parallel_residual: f64,
    pub axis_inner_stats: ConstancyStats,
    /// Statistics of `g(X, X)`; the axis is not normalized.
    pub axis_norm_stats: ConstancyStats,
    pub prop31_residuals: Vec<f64>,
    pub vn1_residual: f64,
    pub axis_norm_residual: f64,
    pub curvature_stats: Vec<ConstancyStats>,
    pub harmonic_stats: Vec<ConstancyStats>,
    pub diagnostics: Diagnostics,
}

/// Report and the per-sample data behind it.
#[derive(Debug, Clone)]
pub struct Analysis {
    pub report: HelixReport,
    pub series: AnalysisSeries,
}

pub fn report_from_series(series: &AnalysisSeries, cfg: &Config) -> Result<HelixReport> {
    let n = series.dim();
    if series.profiles.len() < MIN_SAMPLES {
        return Err(Error::InvalidSpec(format!(
            "need at least {MIN_SAMPLES} analysis samples, got {}",
            series.profiles.len()
        )));
    }
    let g = &series.metric;
    let theorem = detect_theorem(&series.profiles, cfg);
    let corollary = detect_corollary(&series.profiles, cfg);

    let axis: Vec<Vector> = series
        .frames
        .iter()
        .zip(&series.profiles)
        .map(|(fr, p)| axis_from_frame(fr, p, cfg.coupling))
        .collect();
    let residuals = verify_prop31(&series.frames, &series.profiles, &axis, g);
    let norms: Vec<f64> = axis.iter().map(|x| g.dot(x, x)).collect();

    let confidence = if theorem.verdict == Verdict::Inconclusive || corollary.verdict == Verdict::Inconclusive {
        Confidence::Inconclusive
    } else {
        Confidence::Confident
    };
    let mut reasons = theorem.reasons.clone();
    for r in &corollary.reasons {
        if !reasons.contains(r) {
            reasons.push(r.clone());
        }
    }
    if theorem.holds != corollary.holds {
        reasons.push("detectors disagree".to_string());
    }

    let column = |f: &dyn Fn(&HarmonicProfile) -> f64| -> ConstancyStats {
        ConstancyStats::of(&series.profiles.iter().map(f).collect::<Vec<_>>())
    };
    let curvature_stats = (0..n - 1).map(|i| column(&|p| p.curvatures[i].value())).collect();
    let harmonic_stats = (1..=n - 2).map(|i| column(&|p| p.value(i))).collect();

    Ok(HelixReport {
        schema_version: SCHEMA_VERSION,
        path: series.path,
        dimension: n,
        metric: g.clone(),
        signs: series.signs.clone(),
        domain: [series.grid[0], *series.grid.last().expect("non-empty grid")],
        samples: series.grid.len(),
        verdict_theorem: theorem.holds,
        verdict_corollary: corollary.holds,
        confidence,
        detectors_agree: theorem.holds == corollary.holds,
        reasons,
        lemma_sum_stats: theorem.stats,
        min_abs_h_top: theorem.min_abs_h_top,
        max_relation_residual: corollary.max_residual,
        relation_scale: corollary.scale,
        coupling: cfg.coupling,
        axis_parallel_residual: verify_axis_parallel(&axis, series.spacing),
        axis_inner_stats: residuals.inner_stats,
        axis_norm_stats: ConstancyStats::of(&norms),
        prop31_residuals: residuals.rows,
        vn1_residual: residuals.vn1,
        axis_norm_residual: axis_norm_check(&series.profiles, &axis, g, cfg.coupling),
        axis,
        curvature_stats,
        harmonic_stats,
        diagnostics: Diagnostics {
            unit_speed_deviation: series.unit_speed_deviation,
            frame_defect: series.frame_defect,
            frenet_residual: series.frenet_residual,
            recursion_residual: series.recursion_residual(),
            jet_fd_residual: series.jet_fd_residual,
            fd_step: series.fd_step,
            grid_spacing: series.spacing,
        },
    })
}

/// Jet-path analysis of a closed-form curve.
pub fn analyze(spec: &CurveSpec, cfg: &Config) -> Result<Analysis> {
    cfg.validate()?;
    let spec = match cfg.samples {
        Some(samples) => spec.clone().with_samples(samples)?,
        None => spec.clone(),
    };
    let n = spec.dim();
    if n < 3 {
        return Err(Error::UnsupportedDimension(n));
    }
    let order = cfg.jet_order_for(n)?;
    let grid = spec.grid();
    let unit_speed_deviation = spec.unit_speed_check(&grid, cfg.null_tol)?;
    if unit_speed_deviation > cfg.unit_speed_tol {
        return Err(Error::UnitSpeed {
            deviation: unit_speed_deviation,
            tol: cfg.unit_speed_tol,
        });
    }
    let series = frenet_series(&spec, &grid, order, &cfg.frame_tolerances())?;
    let profiles = harmonic_series(&series)?;
    let jet_fd_residual = jet_fd_check(&spec, &series, &profiles, order, cfg)?;

    let g = spec.metric();
    let frame_defect = series
        .points
        .iter()
        .map(|p| p.orthonormality_defect(g))
        .fold(0.0, f64::max);
    let frenet_residual = series.points.iter().map(|p| p.frenet_residual()).fold(0.0, f64::max);
    let (a, b) = spec.domain();
    let series = AnalysisSeries {
        path: AnalysisPath::Jets,
        metric: g.clone(),
        signs: series.signs.clone(),
        spacing: (b - a) / (grid.len() - 1) as f64,
        frames: series.points.iter().map(|p| p.frame_values()).collect(),
        grid,
        profiles,
        unit_speed_deviation,
        frame_defect,
        frenet_residual,
        jet_fd_residual,
        fd_step: cfg.fd_step,
    };
    log::debug!("analyzed {} samples on the jet path", series.grid.len());
    Ok(Analysis {
        report: report_from_series(&series, cfg)?,
        series,
    })
}

/// Max over interior grid points of `|H_i'(s) - (H_i(s+h) - H_i(s-h)) / 2h|`.
fn jet_fd_check(
    spec: &CurveSpec,
    series: &FrenetSeries,
    profiles: &[HarmonicProfile],
    order: usize,
    cfg: &Config,
) -> Result<f64> {
    let h = cfg.fd_step;
    let g = spec.metric();
    let tol = cfg.frame_tolerances();
    let values_at = |s: f64| -> Result<Vec<f64>> {
        let f = frenet_at(&spec.curve_jets(s, order)?, g, &tol)?;
        Ok(harmonic_at(&f.curvatures, &f.signs)?.values())
    };
    let n = profiles.len();
    let gaps: Vec<Result<f64>> = (1..n.saturating_sub(1))
        .into_par_iter()
        .map(|j| {
            let s = series.points[j].s;
            let hi = values_at(s + h)?;
            let lo = values_at(s - h)?;
            let p = &profiles[j];
            Ok(p.h
                .iter()
                .zip(hi.iter().zip(&lo))
                .map(|(jet, (u, l))| (jet.deriv(1).expect("order >= 1") - (u - l) / (2.0 * h)).abs())
                .fold(0.0, f64::max))
        })
        .collect();
    let mut worst: f64 = 0.0;
    for gap in gaps {
        worst = worst.max(gap?);
    }
    Ok(worst)
}
