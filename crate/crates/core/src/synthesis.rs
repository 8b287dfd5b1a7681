//! Curves with prescribed curvatures, obtained by integrating the Frenet
//! system with RK4 and re-orthonormalizing the frame after every step.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::config::Config;
use crate::error::{Error, Result};
use crate::expr::{parse_expr, ExprAst};
use crate::frenet::{orthonormality_defect, DEFAULT_CURVATURE_FLOOR};
use crate::metric::{classify, CausalCharacter, MetricSignature, Sign, Vector};

pub const MAX_FRAME_RETRIES: usize = 100;
pub const DEFAULT_STEP: f64 = 1e-3;

/// Points at which curvature positivity is checked when a spec is built.
const POSITIVITY_PROBES: usize = 1001;

/// On-disk form of a [`CurvatureSpec`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CurvatureSpecFile {
    pub dimension: usize,
    pub metric: Vec<f64>,
    pub curvatures: Vec<String>,
    pub signs: Vec<f64>,
    pub domain: [f64; 2],
    pub step: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

/// Curvatures `k_1..k_{n-1}` as expressions in `s`, target frame signs
/// `eps_0..eps_{n-1}`, domain and RK4 step.
#[derive(Debug, Clone, PartialEq)]
pub struct CurvatureSpec {
    metric: MetricSignature,
    curvatures: Vec<ExprAst>,
    sources: Vec<String>,
    signs: Vec<Sign>,
    domain: (f64, f64),
    step: f64,
    seed: Option<u64>,
}

fn signs_from_values(values: &[f64]) -> Result<Vec<Sign>> {
    values
        .iter()
        .map(|&v| match v {
            1.0 => Ok(Sign::Plus),
            -1.0 => Ok(Sign::Minus),
            _ => Err(Error::InvalidSpec(format!("frame signs must be +1 or -1, got {v}"))),
        })
        .collect()
}

impl CurvatureSpec {
    pub fn new(
        metric: MetricSignature,
        curvatures: &[&str],
        signs: &[Sign],
        domain: (f64, f64),
        step: f64,
    ) -> Result<Self> {
        Self::from_file(CurvatureSpecFile {
            dimension: metric.dim(),
            metric: metric.eta().iter().map(|e| e.value()).collect(),
            curvatures: curvatures.iter().map(|c| c.to_string()).collect(),
            signs: signs.iter().map(|e| e.value()).collect(),
            domain: [domain.0, domain.1],
            step,
            seed: None,
        })
    }

    pub fn from_file(file: CurvatureSpecFile) -> Result<Self> {
        let metric = MetricSignature::from_values(&file.metric)?;
        let n = metric.dim();
        if file.dimension != n {
            return Err(Error::InvalidSpec(format!(
                "dimension {} does not match metric length {n}",
                file.dimension
            )));
        }
        if file.curvatures.len() != n - 1 {
            return Err(Error::InvalidSpec(format!(
                "expected {} curvature expressions, got {}",
                n - 1,
                file.curvatures.len()
            )));
        }
        let signs = signs_from_values(&file.signs)?;
        if signs.len() != n {
            return Err(Error::InvalidSpec(format!(
                "expected {n} frame signs, got {}",
                signs.len()
            )));
        }
        check_sign_pattern(&metric, &signs)?;
        let [a, b] = file.domain;
        if !(a.is_finite() && b.is_finite() && a < b) {
            return Err(Error::InvalidSpec(format!("domain [{a}, {b}] is empty")));
        }
        if !(file.step.is_finite() && file.step > 0.0 && file.step <= b - a) {
            return Err(Error::InvalidSpec(format!(
                "step {} must lie in (0, {}]",
                file.step,
                b - a
            )));
        }
        let curvatures = file
            .curvatures
            .iter()
            .map(|c| parse_expr(c))
            .collect::<std::result::Result<Vec<_>, _>>()?;
        let spec = CurvatureSpec {
            metric,
            curvatures,
            sources: file.curvatures,
            signs,
            domain: (a, b),
            step: file.step,
            seed: file.seed,
        };
        spec.check_positive(DEFAULT_CURVATURE_FLOOR)?;
        Ok(spec)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Self::from_file(serde_json::from_str(text)?)
    }

    pub fn to_file(&self) -> CurvatureSpecFile {
        CurvatureSpecFile {
            dimension: self.dim(),
            metric: self.metric.eta().iter().map(|e| e.value()).collect(),
            curvatures: self.sources.clone(),
            signs: self.signs.iter().map(|e| e.value()).collect(),
            domain: [self.domain.0, self.domain.1],
            step: self.step,
            seed: self.seed,
        }
    }

    fn check_positive(&self, floor: f64) -> Result<()> {
        let (a, b) = self.domain;
        for s in crate::curve::uniform_grid(a, b, POSITIVITY_PROBES) {
            for (i, k) in self.curvatures.iter().enumerate() {
                let v = k.eval(s)?;
                if v.is_nan() || v <= floor {
                    return Err(Error::InvalidSpec(format!(
                        "k_{} = {v:e} at s = {s} is not above {floor:e}",
                        i + 1
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.metric.dim()
    }

    pub fn metric(&self) -> &MetricSignature {
        &self.metric
    }

    pub fn signs(&self) -> &[Sign] {
        &self.signs
    }

    pub fn curvatures(&self) -> &[ExprAst] {
        &self.curvatures
    }

    pub fn domain(&self) -> (f64, f64) {
        self.domain
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    pub fn seed(&self) -> Option<u64> {
        self.seed
    }

    pub fn with_step(mut self, step: f64) -> Result<Self> {
        let (a, b) = self.domain;
        if !(step.is_finite() && step > 0.0 && step <= b - a) {
            return Err(Error::InvalidSpec(format!("step {step} must lie in (0, {}]", b - a)));
        }
        self.step = step;
        Ok(self)
    }

    pub fn with_seed(mut self, seed: Option<u64>) -> Self {
        self.seed = seed;
        self
    }

    /// `k_1..k_{n-1}` at `s`.
    pub fn curvatures_at(&self, s: f64) -> Result<Vec<f64>> {
        self.curvatures.iter().map(|k| Ok(k.eval(s)?)).collect()
    }

    /// Frame used when no seed is given: standard basis vectors assigned to
    /// slots with matching signs. Otherwise a seeded random frame.
    pub fn initial_frame(&self) -> Result<InitialFrame> {
        match self.seed {
            Some(seed) => random_initial_frame(&self.metric, &self.signs, seed),
            None => standard_frame(&self.metric, &self.signs),
        }
    }
}

fn check_sign_pattern(g: &MetricSignature, signs: &[Sign]) -> Result<()> {
    let negative = signs.iter().filter(|e| **e == Sign::Minus).count();
    if signs.len() != g.dim() || negative != g.negative_count() {
        return Err(Error::InvalidSpec(format!(
            "frame signs have {negative} timelike entries but the metric has {}",
            g.negative_count()
        )));
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq)]
pub struct InitialFrame {
    pub point: Vector,
    pub frame: Vec<Vector>,
    pub signs: Vec<Sign>,
}

/// Indefinite modified Gram-Schmidt. Each output vector has
/// `g(u_j, u_j) = signs[j]`; on failure returns the 0-based index of the
/// vector that came out null or with the wrong sign.
pub(crate) fn pseudo_orthonormalize(
    g: &MetricSignature,
    vectors: &[Vector],
    signs: &[Sign],
    null_tol: f64,
) -> std::result::Result<Vec<Vector>, usize> {
    let mut out: Vec<Vector> = Vec::with_capacity(vectors.len());
    for (j, v) in vectors.iter().enumerate() {
        let mut w = v.clone();
        for (u, e) in out.iter().zip(signs) {
            let c = e.value() * g.dot(&w, u);
            w.axpy(-c, u);
        }
        let q = g.dot(&w, &w);
        let e2: f64 = w.iter().map(|x| x * x).sum();
        if classify(q, e2, null_tol) == CausalCharacter::Null || Sign::of(q) != signs[j] {
            return Err(j);
        }
        let scale = 1.0 / q.abs().sqrt();
        out.push(w.iter().map(|x| x * scale).collect());
    }
    Ok(out)
}

/// Seeded random pseudo-orthonormal frame with the requested signs.
/// Candidates landing null or on the wrong side of the light cone are redrawn.
pub fn random_initial_frame(g: &MetricSignature, signs: &[Sign], seed: u64) -> Result<InitialFrame> {
    check_sign_pattern(g, signs)?;
    let n = g.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut frame: Vec<Vector> = Vec::with_capacity(n);
    let mut retries = 0;
    while frame.len() < n {
        let candidate: Vector = (0..n).map(|_| rng.random_range(-1.0..=1.0)).collect();
        let mut trial = frame.clone();
        trial.push(candidate);
        match pseudo_orthonormalize(g, &trial, &signs[..trial.len()], 1e-6) {
            Ok(done) => frame = done,
            Err(_) => {
                retries += 1;
                if retries >= MAX_FRAME_RETRIES {
                    return Err(Error::ExhaustedRetries(retries));
                }
            }
        }
    }
    Ok(InitialFrame {
        point: Vector::zeros(n),
        frame,
        signs: signs.to_vec(),
    })
}

/// Standard basis vectors assigned in order to the slots of matching sign.
pub fn standard_frame(g: &MetricSignature, signs: &[Sign]) -> Result<InitialFrame> {
    check_sign_pattern(g, signs)?;
    let n = g.dim();
    let mut used = vec![false; n];
    let frame = signs
        .iter()
        .map(|&target| {
            let k = (0..n)
                .find(|&k| !used[k] && g.eta()[k] == target)
                .expect("sign pattern checked");
            used[k] = true;
            let mut e = Vector::zeros(n);
            e.0[k] = 1.0;
            e
        })
        .collect();
    Ok(InitialFrame {
        point: Vector::zeros(n),
        frame,
        signs: signs.to_vec(),
    })
}

/// Integrated curve: positions and frames at `s_j = a + j h`.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledCurve {
    pub metric: MetricSignature,
    pub signs: Vec<Sign>,
    pub step: f64,
    pub s: Vec<f64>,
    pub points: Vec<Vector>,
    /// `V_1..V_n` per sample.
    pub frames: Vec<Vec<Vector>>,
    /// Largest Euclidean change made by re-orthonormalization in one step.
    pub max_correction: f64,
    /// Largest pseudo-orthonormality defect before correction.
    pub max_drift: f64,
}

impl SampledCurve {
    pub fn dim(&self) -> usize {
        self.metric.dim()
    }

    pub fn len(&self) -> usize {
        self.s.len()
    }

    pub fn is_empty(&self) -> bool {
        self.s.is_empty()
    }

    /// max `||g(V_1, V_1)| - 1|` over the samples.
    pub fn speed_deviation(&self) -> f64 {
        self.frames
            .iter()
            .map(|f| (self.metric.dot(&f[0], &f[0]).abs() - 1.0).abs())
            .fold(0.0, f64::max)
    }
}

/// Derivative of the flattened state `(a, V_1, ..., V_n)`.
fn frenet_rhs(k: &[f64], signs: &[Sign], n: usize, state: &[f64], out: &mut [f64]) {
    let v = |j: usize| &state[j * n..(j + 1) * n];
    out[..n].copy_from_slice(v(1));
    for i in 1..=n {
        let dst = &mut out[i * n..(i + 1) * n];
        dst.iter_mut().for_each(|x| *x = 0.0);
        if i > 1 {
            let c = -(signs[i - 2] * signs[i - 1]).value() * k[i - 2];
            for (d, x) in dst.iter_mut().zip(v(i - 1)) {
                *d += c * x;
            }
        }
        if i < n {
            let c = k[i - 1];
            for (d, x) in dst.iter_mut().zip(v(i + 1)) {
                *d += c * x;
            }
        }
    }
}

/// Classical RK4 on `(a, V_1..V_n)` followed by indefinite Gram-Schmidt on
/// the frame after each step.
pub fn integrate_frenet(spec: &CurvatureSpec, init: &InitialFrame, cfg: &Config) -> Result<SampledCurve> {
    let g = spec.metric();
    let n = g.dim();
    if init.frame.len() != n || init.point.len() != n || init.signs != spec.signs {
        return Err(Error::InvalidSpec(
            "initial frame does not match the curvature spec".into(),
        ));
    }
    let init_defect = orthonormality_defect(g, &init.frame, &init.signs);
    if init_defect > 1e-12 {
        return Err(Error::InvalidSpec(format!(
            "initial frame is not pseudo-orthonormal (defect {init_defect:e})"
        )));
    }
    let (a, b) = spec.domain();
    let steps = ((b - a) / spec.step() - 1e-9).ceil().max(1.0) as usize;
    let h = (b - a) / steps as f64;
    let s_at = |j: usize| if j == steps { b } else { a + j as f64 * h };

    let k_at = |s: f64| -> Result<Vec<f64>> {
        let k = spec.curvatures_at(s)?;
        for (i, &v) in k.iter().enumerate() {
            if v.is_nan() || v <= cfg.curvature_floor {
                return Err(Error::DegenerateCurvature {
                    index: i + 1,
                    value: v,
                    s,
                });
            }
        }
        Ok(k)
    };

    let dim = (n + 1) * n;
    let mut state = Vec::with_capacity(dim);
    state.extend_from_slice(&init.point);
    for v in &init.frame {
        state.extend_from_slice(v);
    }
    let mut s_out = Vec::with_capacity(steps + 1);
    let mut points = Vec::with_capacity(steps + 1);
    let mut frames = Vec::with_capacity(steps + 1);
    let unpack = |state: &[f64]| -> (Vector, Vec<Vector>) {
        let p = Vector(state[..n].to_vec());
        let f = (1..=n).map(|j| Vector(state[j * n..(j + 1) * n].to_vec())).collect();
        (p, f)
    };
    let (p0, f0) = unpack(&state);
    s_out.push(a);
    points.push(p0);
    frames.push(f0);

    let signs = spec.signs();
    let (mut k1, mut k2, mut k3, mut k4) = (vec![0.0; dim], vec![0.0; dim], vec![0.0; dim], vec![0.0; dim]);
    let mut tmp = vec![0.0; dim];
    let mut max_correction: f64 = 0.0;
    let mut max_drift: f64 = 0.0;
    let mut k_start = k_at(a)?;
    for j in 0..steps {
        let (s0, s1) = (s_at(j), s_at(j + 1));
        let sm = s0 + 0.5 * (s1 - s0);
        let hj = s1 - s0;
        let k_mid = k_at(sm)?;
        let k_end = k_at(s1)?;

        frenet_rhs(&k_start, signs, n, &state, &mut k1);
        for i in 0..dim {
            tmp[i] = state[i] + 0.5 * hj * k1[i];
        }
        frenet_rhs(&k_mid, signs, n, &tmp, &mut k2);
        for i in 0..dim {
            tmp[i] = state[i] + 0.5 * hj * k2[i];
        }
        frenet_rhs(&k_mid, signs, n, &tmp, &mut k3);
        for i in 0..dim {
            tmp[i] = state[i] + hj * k3[i];
        }
        frenet_rhs(&k_end, signs, n, &tmp, &mut k4);
        for i in 0..dim {
            state[i] += hj / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }

        let (p, raw) = unpack(&state);
        max_drift = max_drift.max(orthonormality_defect(g, &raw, signs));
        let fixed = pseudo_orthonormalize(g, &raw, signs, cfg.null_tol)
            .map_err(|idx| Error::NullFrameVector { index: idx + 1, s: s1 })?;
        let correction = raw
            .iter()
            .zip(&fixed)
            .map(|(u, w)| u.max_abs_diff(w))
            .fold(0.0, f64::max);
        if correction > cfg.drift_limit {
            return Err(Error::Drift { correction, s: s1 });
        }
        max_correction = max_correction.max(correction);
        for (jj, v) in fixed.iter().enumerate() {
            state[(jj + 1) * n..(jj + 2) * n].copy_from_slice(v);
        }
        s_out.push(s1);
        points.push(p);
        frames.push(fixed);
        k_start = k_end;
    }
    log::debug!("integrated {steps} steps of {h:e}: max correction {max_correction:e}, max drift {max_drift:e}");
    Ok(SampledCurve {
        metric: g.clone(),
        signs: signs.to_vec(),
        step: h,
        s: s_out,
        points,
        frames,
        max_correction,
        max_drift,
    })
}

/// Parameters of the constructed positive families.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SlantParams {
    pub c1: f64,
    pub c2: f64,
    /// Amplitude of `H_1 = A sin(c_1 s)` (n = 4).
    pub amplitude: f64,
    /// Gap kept from the zeros of `sin(c_1 s)` (n = 4).
    pub delta: f64,
    /// Domain length (n = 3).
    pub length: f64,
    pub step: f64,
}

impl Default for SlantParams {
    fn default() -> Self {
        SlantParams {
            c1: 1.0,
            c2: 1.0,
            amplitude: 0.8,
            delta: 0.2,
            length: 4.0 * std::f64::consts::PI,
            step: DEFAULT_STEP,
        }
    }
}

/// Euclidean curvature specs that are slant helices by construction.
///
/// * n = 3: constant `(c_1, c_2)` on `[0, length]`.
/// * n = 4: `k = (c_1, c_2, c_2 A sin(c_1 s))` on `[delta, pi/c_1 - delta]`,
///   for which `H_1 = A sin(c_1 s)`, `H_2 = -A cos(c_1 s)` and the lemma sum
///   is `A^2`.
pub fn slant_family(n: usize, p: &SlantParams) -> Result<CurvatureSpec> {
    let g = MetricSignature::euclidean(n)?;
    let signs = vec![Sign::Plus; n];
    match n {
        3 => CurvatureSpec::new(
            g,
            &[&format!("{:?}", p.c1), &format!("{:?}", p.c2)],
            &signs,
            (0.0, p.length),
            p.step,
        ),
        4 => {
            let k3 = format!("{:?}*{:?}*sin({:?}*s)", p.c2, p.amplitude, p.c1);
            let domain = (p.delta, std::f64::consts::PI / p.c1 - p.delta);
            CurvatureSpec::new(
                g,
                &[&format!("{:?}", p.c1), &format!("{:?}", p.c2), &k3],
                &signs,
                domain,
                p.step,
            )
        }
        _ => Err(Error::UnsupportedDimension(n)),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NegativeKind {
    /// n = 3, `k_1 = 1`, `k_2 = s`: the lemma sum is `s^2`.
    RatioLinear,
    /// n = 4, constant curvatures: `H_2` vanishes identically.
    WCurve,
}

impl NegativeKind {
    pub fn dimension(self) -> usize {
        match self {
            NegativeKind::RatioLinear => 3,
            NegativeKind::WCurve => 4,
        }
    }
}

/// Euclidean curvature specs that are not slant helices.
pub fn negative_family(n: usize, kind: NegativeKind) -> Result<CurvatureSpec> {
    if n != kind.dimension() {
        return Err(Error::UnsupportedDimension(n));
    }
    let g = MetricSignature::euclidean(n)?;
    let signs = vec![Sign::Plus; n];
    match kind {
        NegativeKind::RatioLinear => CurvatureSpec::new(g, &["1", "s"], &signs, (0.5, 3.0), DEFAULT_STEP),
        NegativeKind::WCurve => CurvatureSpec::new(g, &["1", "0.5", "0.3"], &signs, (0.0, 6.0), DEFAULT_STEP),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn circle(step: f64) -> CurvatureSpec {
        CurvatureSpec::new(
            MetricSignature::euclidean(2).unwrap(),
            &["1"],
            &[Sign::Plus, Sign::Plus],
            (0.0, 2.0 * PI),
            step,
        )
        .unwrap()
    }

    #[test]
    fn unit_circle_closes() {
        let spec = circle(1e-3);
        let c = integrate_frenet(&spec, &spec.initial_frame().unwrap(), &Config::default()).unwrap();
        let first = &c.points[0];
        let last = c.points.last().unwrap();
        assert!(first.max_abs_diff(last) < 1e-6);
        assert_eq!(*c.s.last().unwrap(), 2.0 * PI);
        assert!(c.speed_deviation() < 1e-12);
    }

    #[test]
    fn helix_from_constant_curvatures() {
        let spec = slant_family(
            3,
            &SlantParams {
                c1: 0.4,
                c2: 0.2,
                ..SlantParams::default()
            },
        )
        .unwrap();
        let c = integrate_frenet(&spec, &spec.initial_frame().unwrap(), &Config::default()).unwrap();
        // the standard frame starts the helix at the origin with V_1 = e_1;
        // height gained along the axis is (b / sqrt(a^2 + b^2)) s with b / c = 0.2 / sqrt(0.2)
        let axis = Vector(vec![0.2, 0.0, 0.4]);
        let scale = 1.0 / axis.euclidean_norm();
        let last = c.points.last().unwrap();
        let along: f64 = last.iter().zip(axis.iter()).map(|(x, y)| x * y * scale).sum();
        let s_end = *c.s.last().unwrap();
        assert!((along - s_end * 0.2 / 0.2f64.sqrt()).abs() < 1e-6, "{along}");
        assert!(c.max_drift < 1e-8);
    }

    #[test]
    fn oversized_step_drifts() {
        let spec = CurvatureSpec::new(
            MetricSignature::euclidean(3).unwrap(),
            &["2 + sin(20*s)", "3 + cos(15*s)"],
            &[Sign::Plus; 3],
            (0.0, 5.0),
            0.5,
        )
        .unwrap();
        let err = integrate_frenet(&spec, &spec.initial_frame().unwrap(), &Config::default()).unwrap_err();
        assert!(matches!(err, Error::Drift { .. }), "{err:?}");
    }

    #[test]
    fn random_frames() {
        let e3 = MetricSignature::euclidean(3).unwrap();
        let f = random_initial_frame(&e3, &[Sign::Plus; 3], 42).unwrap();
        assert!(orthonormality_defect(&e3, &f.frame, &f.signs) < 1e-12);
        assert_eq!(f, random_initial_frame(&e3, &[Sign::Plus; 3], 42).unwrap());
        assert_ne!(f, random_initial_frame(&e3, &[Sign::Plus; 3], 43).unwrap());

        let m = MetricSignature::minkowski(3).unwrap();
        let signs = [Sign::Plus, Sign::Plus, Sign::Minus];
        for seed in 0..50 {
            let f = random_initial_frame(&m, &signs, seed).unwrap();
            assert!(orthonormality_defect(&m, &f.frame, &signs) < 1e-12);
            assert!((m.dot(&f.frame[2], &f.frame[2]) + 1.0).abs() < 1e-12);
        }
        assert!(random_initial_frame(&m, &[Sign::Plus; 3], 1).is_err());
    }

    #[test]
    fn standard_frame_permutes_basis() {
        let m = MetricSignature::minkowski(3).unwrap();
        let f = standard_frame(&m, &[Sign::Plus, Sign::Plus, Sign::Minus]).unwrap();
        assert_eq!(f.frame[0].0, vec![0.0, 1.0, 0.0]);
        assert_eq!(f.frame[1].0, vec![0.0, 0.0, 1.0]);
        assert_eq!(f.frame[2].0, vec![1.0, 0.0, 0.0]);
    }

    #[test]
    fn deterministic_output() {
        let spec = slant_family(4, &SlantParams::default()).unwrap().with_seed(Some(7));
        let cfg = Config::default();
        let a = integrate_frenet(&spec, &spec.initial_frame().unwrap(), &cfg).unwrap();
        let b = integrate_frenet(&spec, &spec.initial_frame().unwrap(), &cfg).unwrap();
        assert_eq!(a, b);
        assert!(a.speed_deviation() < 1e-8);
        assert!(a.max_drift < 1e-8);
    }

    #[test]
    fn family_errors() {
        assert!(matches!(
            slant_family(5, &SlantParams::default()),
            Err(Error::UnsupportedDimension(5))
        ));
        assert!(matches!(
            negative_family(4, NegativeKind::RatioLinear),
            Err(Error::UnsupportedDimension(4))
        ));
        // delta too small leaves k_3 at zero on the boundary
        assert!(slant_family(
            4,
            &SlantParams {
                delta: 0.0,
                ..SlantParams::default()
            }
        )
        .is_err());
    }

    #[test]
    fn json_validation() {
        let ok = r#"{"dimension": 3, "metric": [-1, 1, 1], "curvatures": ["0.6667", "0.3333"],
                     "signs": [-1, 1, 1], "domain": [0, 2], "step": 0.001, "seed": 5}"#;
        let spec = CurvatureSpec::from_json(ok).unwrap();
        assert_eq!(spec.seed(), Some(5));
        let back = CurvatureSpec::from_file(spec.to_file()).unwrap();
        assert_eq!(back, spec);
        for bad in [
            // sign pattern inconsistent with the metric
            r#"{"dimension": 3, "metric": [-1, 1, 1], "curvatures": ["1", "1"], "signs": [1, 1, 1], "domain": [0, 2], "step": 0.001}"#,
            // wrong number of curvatures
            r#"{"dimension": 3, "metric": [1, 1, 1], "curvatures": ["1"], "signs": [1, 1, 1], "domain": [0, 2], "step": 0.001}"#,
            // curvature not positive
            r#"{"dimension": 3, "metric": [1, 1, 1], "curvatures": ["1", "s - 1"], "signs": [1, 1, 1], "domain": [0, 2], "step": 0.001}"#,
            // step larger than domain
            r#"{"dimension": 3, "metric": [1, 1, 1], "curvatures": ["1", "1"], "signs": [1, 1, 1], "domain": [0, 2], "step": 3}"#,
            r#"{"dimension": 3, "metric": [1, 1, 1], "curvatures": ["1", "1"], "signs": [1, 0.5, 1], "domain": [0, 2], "step": 0.1}"#,
        ] {
            assert!(CurvatureSpec::from_json(bad).is_err(), "{bad}");
        }
    }
}
