//! Built-in test curves and the invariant checks run against them.
//!
//! None of these curves come from a published table. Positive instances are
//! constructed so that the lemma sum is a nonzero constant (closed-form
//! helices, the five-dimensional W-curve, and curvature specs built to
//! satisfy `H_{n-2}' = k_1 H_{n-3}`); negative instances violate it.

use serde::{Deserialize, Serialize};

use crate::config::Config;
use crate::curve::CurveSpec;
use crate::error::Result;
use crate::helix::{analyze, Analysis, Confidence};
use crate::metric::{MetricSignature, Sign};
use crate::sampled::{analyze_sampled, curvature_round_trip_error};
use crate::synthesis::{integrate_frenet, negative_family, slant_family, CurvatureSpec, NegativeKind, SlantParams};

/// Coarse steps for the RK4 order check, where integration error still
/// dominates roundoff.
pub const ORDER_CHECK_STEPS: (f64, f64) = (0.05, 0.025);

#[derive(Debug, Clone)]
pub enum CorpusSource {
    Curve(CurveSpec),
    Synthesized(CurvatureSpec),
}

#[derive(Debug, Clone)]
pub struct CorpusEntry {
    pub name: &'static str,
    pub description: &'static str,
    pub expect_helix: bool,
    pub source: CorpusSource,
}

fn curve(metric: MetricSignature, coords: &[&str], domain: (f64, f64)) -> CorpusSource {
    CorpusSource::Curve(CurveSpec::new(metric, coords, domain, 400).expect("valid corpus curve"))
}

fn synth(spec: Result<CurvatureSpec>) -> CorpusSource {
    CorpusSource::Synthesized(spec.expect("valid corpus spec"))
}

fn lorentz_sine(signs: [Sign; 4]) -> Result<CurvatureSpec> {
    let g = MetricSignature::from_values(&[-1.0, 1.0, 1.0, 1.0])?;
    CurvatureSpec::new(
        g,
        &["1", "1", "0.8*sin(s)"],
        &signs,
        (0.2, std::f64::consts::PI - 0.2),
        1e-3,
    )
}

pub fn builtin_corpus() -> Vec<CorpusEntry> {
    use std::f64::consts::PI;
    let e3 = MetricSignature::euclidean(3).expect("n >= 2");
    let m3 = MetricSignature::minkowski(3).expect("n >= 2");
    let (p, m) = (Sign::Plus, Sign::Minus);
    vec![
        CorpusEntry {
            name: "euclid3_circular_helix",
            description: "circular helix radius 2, pitch 1 in E^3",
            expect_helix: true,
            source: curve(
                e3.clone(),
                &["2*cos(s/sqrt(5))", "2*sin(s/sqrt(5))", "s/sqrt(5)"],
                (0.0, 4.0 * PI),
            ),
        },
        CorpusEntry {
            name: "euclid3_helix_a3_b4",
            description: "circular helix radius 3, pitch 4 in E^3",
            expect_helix: true,
            source: curve(e3.clone(), &["3*cos(s/5)", "3*sin(s/5)", "4*s/5"], (0.0, 10.0 * PI)),
        },
        CorpusEntry {
            name: "minkowski3_timelike_helix",
            description: "timelike constant-curvature helix in diag(-1,1,1)",
            expect_helix: true,
            source: curve(
                m3.clone(),
                &["2*sinh(s/sqrt(3))", "2*cosh(s/sqrt(3))", "s/sqrt(3)"],
                (0.0, 6.0),
            ),
        },
        CorpusEntry {
            name: "minkowski3_spacelike_helix",
            description: "spacelike constant-curvature helix with timelike binormal in diag(-1,1,1)",
            expect_helix: true,
            source: curve(
                m3.clone(),
                &["s/sqrt(3)", "2*cos(s/sqrt(3))", "2*sin(s/sqrt(3))"],
                (0.0, 10.0),
            ),
        },
        CorpusEntry {
            name: "euclid5_w_curve",
            description: "constant-curvature curve in E^5 (H_1 = H_3 != 0 pattern, constant lemma sum)",
            expect_helix: true,
            source: curve(
                MetricSignature::euclidean(5).expect("n >= 2"),
                &[
                    "cos(0.6*s)",
                    "sin(0.6*s)",
                    "2*cos(0.3*s)",
                    "2*sin(0.3*s)",
                    "sqrt(7/25)*s",
                ],
                (0.0, 10.0),
            ),
        },
        CorpusEntry {
            name: "synth_helix3",
            description: "integrated constant curvatures (0.4, 0.2) in E^3",
            expect_helix: true,
            source: synth(slant_family(
                3,
                &SlantParams {
                    c1: 0.4,
                    c2: 0.2,
                    ..SlantParams::default()
                },
            )),
        },
        CorpusEntry {
            name: "synth_sine4",
            description: "k = (1, 1, 0.8 sin s) on (0.2, pi - 0.2) in E^4",
            expect_helix: true,
            source: synth(slant_family(4, &SlantParams::default())),
        },
        CorpusEntry {
            name: "synth_sine4_slow",
            description: "k = (0.5, 2, 2.4 sin(s/2)) on (0.2, 2 pi - 0.2) in E^4",
            expect_helix: true,
            source: synth(slant_family(
                4,
                &SlantParams {
                    c1: 0.5,
                    c2: 2.0,
                    amplitude: 1.2,
                    delta: 0.2,
                    ..SlantParams::default()
                },
            )),
        },
        CorpusEntry {
            name: "synth_minkowski3_timelike",
            description:
                "integrated constant curvatures (2/3, 1/3) with timelike tangent in diag(-1,1,1), seeded frame",
            expect_helix: true,
            source: synth(
                CurvatureSpec::new(m3.clone(), &["2/3", "1/3"], &[m, p, p], (0.0, 3.0), 1e-3)
                    .map(|s| s.with_seed(Some(11))),
            ),
        },
        CorpusEntry {
            name: "synth_lorentz4_sine",
            description: "k = (1, 1, 0.8 sin s) in diag(-1,1,1,1) with timelike V_4",
            expect_helix: true,
            source: synth(lorentz_sine([p, p, p, m])),
        },
        CorpusEntry {
            name: "synth_ratio_linear",
            description: "k = (1, s) in E^3: lemma sum s^2",
            expect_helix: false,
            source: synth(negative_family(3, NegativeKind::RatioLinear)),
        },
        CorpusEntry {
            name: "synth_w_curve4",
            description: "k = (1, 0.5, 0.3) in E^4: H_2 = 0",
            expect_helix: false,
            source: synth(negative_family(4, NegativeKind::WCurve)),
        },
        CorpusEntry {
            name: "euclid4_w_curve",
            description: "constant-curvature curve in E^4: H_2 = 0",
            expect_helix: false,
            source: curve(
                MetricSignature::euclidean(4).expect("n >= 2"),
                &["cos(0.6*s)", "sin(0.6*s)", "2*cos(0.4*s)", "2*sin(0.4*s)"],
                (0.0, 10.0),
            ),
        },
        CorpusEntry {
            name: "euclid3_tangent_spiral",
            description: "E^3 curve with tangent (sin s cos s, sin^2 s, cos s): torsion/curvature not constant",
            expect_helix: false,
            source: curve(e3, &["-cos(2*s)/4", "s/2 - sin(2*s)/4", "sin(s)"], (0.2, 1.3)),
        },
        CorpusEntry {
            name: "synth_lorentz4_sine_timelike_tangent",
            description: "k = (1, 1, 0.8 sin s) in diag(-1,1,1,1) with timelike V_1: lemma sum 0.64 (sin^2 - cos^2)",
            expect_helix: false,
            source: synth(lorentz_sine([m, p, p, p])),
        },
    ]
}

/// Synthesis diagnostics for curvature-spec entries.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SynthesisStats {
    pub step: f64,
    pub round_trip_error: f64,
    pub speed_deviation: f64,
    pub max_drift: f64,
    pub max_correction: f64,
    /// Round-trip errors at the two coarse order-check steps.
    pub order_check_errors: [f64; 2],
}

#[derive(Debug, Clone)]
pub struct CorpusRun {
    pub analysis: Analysis,
    pub synthesis: Option<SynthesisStats>,
}

/// Applies config overrides (samples, step, seed) to a curvature spec.
pub fn configured_spec(spec: &CurvatureSpec, cfg: &Config) -> Result<CurvatureSpec> {
    let mut spec = spec.clone();
    if let Some(step) = cfg.step {
        spec = spec.with_step(step)?;
    }
    if cfg.seed.is_some() {
        spec = spec.with_seed(cfg.seed);
    }
    Ok(spec)
}

fn synthesize_and_analyze(
    spec: &CurvatureSpec,
    cfg: &Config,
) -> Result<(Analysis, f64, crate::synthesis::SampledCurve)> {
    let curve = integrate_frenet(spec, &spec.initial_frame()?, cfg)?;
    let analysis = analyze_sampled(&curve, cfg)?;
    let err = curvature_round_trip_error(spec, &analysis.series)?;
    Ok((analysis, err, curve))
}

impl CorpusEntry {
    pub fn dimension(&self) -> usize {
        match &self.source {
            CorpusSource::Curve(c) => c.dim(),
            CorpusSource::Synthesized(s) => s.dim(),
        }
    }

    pub fn metric(&self) -> &MetricSignature {
        match &self.source {
            CorpusSource::Curve(c) => c.metric(),
            CorpusSource::Synthesized(s) => s.metric(),
        }
    }

    pub fn run(&self, cfg: &Config) -> Result<CorpusRun> {
        match &self.source {
            CorpusSource::Curve(c) => Ok(CorpusRun {
                analysis: analyze(c, cfg)?,
                synthesis: None,
            }),
            CorpusSource::Synthesized(spec) => {
                let spec = configured_spec(spec, cfg)?;
                let (analysis, round_trip_error, curve) = synthesize_and_analyze(&spec, cfg)?;
                let coarse = |h: f64| -> Result<f64> {
                    let spec = spec.clone().with_step(h)?;
                    Ok(synthesize_and_analyze(&spec, cfg)?.1)
                };
                let order_check_errors = [coarse(ORDER_CHECK_STEPS.0)?, coarse(ORDER_CHECK_STEPS.1)?];
                Ok(CorpusRun {
                    synthesis: Some(SynthesisStats {
                        step: curve.step,
                        round_trip_error,
                        speed_deviation: curve.speed_deviation(),
                        max_drift: curve.max_drift,
                        max_correction: curve.max_correction,
                        order_check_errors,
                    }),
                    analysis,
                })
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Comparison {
    Below,
    Above,
    Equal,
}

/// One row of the verification table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub comparison: Comparison,
    pub threshold: f64,
    pub passed: bool,
}

impl Check {
    fn below(name: &str, value: f64, threshold: f64) -> Check {
        Check {
            name: name.to_string(),
            value,
            comparison: Comparison::Below,
            threshold,
            passed: value < threshold,
        }
    }

    fn above(name: &str, value: f64, threshold: f64) -> Check {
        Check {
            name: name.to_string(),
            value,
            comparison: Comparison::Above,
            threshold,
            passed: value > threshold,
        }
    }

    fn flag(name: &str, value: bool, want: bool) -> Check {
        let as_num = |b: bool| if b { 1.0 } else { 0.0 };
        Check {
            name: name.to_string(),
            value: as_num(value),
            comparison: Comparison::Equal,
            threshold: as_num(want),
            passed: value == want,
        }
    }
}

pub const FRAME_LIMIT: f64 = 1e-9;
pub const RESIDUAL_LIMIT: f64 = 1e-8;
pub const JET_FD_LIMIT: f64 = 1e-6;
pub const AXIS_LIMIT: f64 = 1e-6;
/// Negative instances must miss the axis limit by two orders of magnitude.
pub const NON_AXIS_FLOOR: f64 = AXIS_LIMIT * 100.0;
pub const ROUND_TRIP_LIMIT: f64 = 1e-5;
pub const ORDER_RATIO_MIN: f64 = 8.0;
pub const LEMMA_EQUIVALENCE_TOL: f64 = 1e-6;

/// Every invariant the corpus entry must satisfy.
pub fn check_entry(entry: &CorpusEntry, run: &CorpusRun, cfg: &Config) -> Vec<Check> {
    let r = &run.analysis.report;
    let d = &r.diagnostics;
    let mut checks = vec![
        Check::flag("verdict_theorem", r.verdict_theorem, entry.expect_helix),
        Check::flag("verdict_corollary", r.verdict_corollary, entry.expect_helix),
        Check::flag("confident", r.confidence == Confidence::Confident, true),
        Check::below("frame_defect", d.frame_defect, FRAME_LIMIT),
        Check::below("frenet_residual", d.frenet_residual, RESIDUAL_LIMIT),
        Check::below("recursion_residual", d.recursion_residual, RESIDUAL_LIMIT),
        Check::below("jet_fd_residual", d.jet_fd_residual, JET_FD_LIMIT),
        Check::below("axis_norm_residual", r.axis_norm_residual, RESIDUAL_LIMIT),
    ];
    if entry.expect_helix {
        let inner = r.prop31_residuals.iter().copied().fold(r.vn1_residual, f64::max);
        checks.push(Check::below(
            "axis_parallel_residual",
            r.axis_parallel_residual,
            AXIS_LIMIT,
        ));
        checks.push(Check::below(
            "axis_inner_variation",
            r.axis_inner_stats.relative_variation,
            AXIS_LIMIT,
        ));
        checks.push(Check::below("axis_inner_residual", inner, AXIS_LIMIT));
    } else {
        checks.push(Check::above(
            "axis_parallel_residual",
            r.axis_parallel_residual,
            NON_AXIS_FLOOR,
        ));
    }
    if r.min_abs_h_top > cfg.h_top_floor {
        // with H_{n-2} away from zero, a constant lemma sum and a vanishing
        // relation residual must come together
        let constant = r.lemma_sum_stats.relative_variation < LEMMA_EQUIVALENCE_TOL;
        let related = r.max_relation_residual < LEMMA_EQUIVALENCE_TOL * r.relation_scale;
        checks.push(Check::flag("lemma_equivalence", constant == related, true));
    }
    if let Some(s) = &run.synthesis {
        checks.push(Check::below("round_trip_error", s.round_trip_error, ROUND_TRIP_LIMIT));
        checks.push(Check::below("speed_deviation", s.speed_deviation, RESIDUAL_LIMIT));
        checks.push(Check::below("pre_correction_drift", s.max_drift, RESIDUAL_LIMIT));
        let ratio = s.order_check_errors[0] / s.order_check_errors[1];
        checks.push(Check::above("rk4_order_ratio", ratio, ORDER_RATIO_MIN));
    }
    checks
}
