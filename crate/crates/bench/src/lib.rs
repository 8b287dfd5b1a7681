//! Fixtures shared by the benchmarks.

use helixlab_core::synthesis::{slant_family, SlantParams};
use helixlab_core::{CurvatureSpec, CurveSpec, MetricSignature, SampledCurve};

/// Circular helix of radius 2 and pitch 1 in E^3 on `[0, 4 pi]`.
pub fn helix(samples: usize) -> CurveSpec {
    CurveSpec::new(
        MetricSignature::euclidean(3).expect("n >= 2"),
        &["2*cos(s/sqrt(5))", "2*sin(s/sqrt(5))", "s/sqrt(5)"],
        (0.0, 4.0 * std::f64::consts::PI),
        samples,
    )
    .expect("valid helix")
}

/// `k = (1, 1, 0.8 sin s)` in E^4.
pub fn sine4() -> CurvatureSpec {
    slant_family(4, &SlantParams::default()).expect("n = 4 is supported")
}

pub fn integrate(spec: &CurvatureSpec) -> SampledCurve {
    let cfg = helixlab_core::Config::default();
    helixlab_core::integrate_frenet(spec, &spec.initial_frame().expect("frame"), &cfg).expect("integrates")
}
