//! Frenet frames, harmonic curvatures and V_n-slant helix detection for
//! curves in flat pseudo-Euclidean space.

pub mod config;
pub mod corpus;
pub mod curve;
pub mod error;
pub mod expr;
pub mod fd;
pub mod frenet;
pub mod harmonic;
pub mod helix;
pub mod jet;
pub mod metric;
pub mod sampled;
pub mod synthesis;

pub use config::Config;
pub use curve::CurveSpec;
pub use error::{Error, ErrorClass, Result};
pub use expr::{parse_expr, ExprAst};
pub use helix::{analyze, Analysis, HelixReport};
pub use jet::{Jet, JetVector};
pub use metric::{CausalCharacter, MetricSignature, Sign, Vector};
pub use sampled::analyze_sampled;
pub use synthesis::{integrate_frenet, CurvatureSpec, SampledCurve};
