//! Frenet frames of proper curves of order n.
//!
//! The frame is built by the recursion
//!
//! ```text
//! V_1     = a'
//! W_i     = V_i' + eps_{i-2} eps_{i-1} k_{i-1} V_{i-1}     (W_1 = V_1')
//! k_i     = sqrt(|g(W_i, W_i)|),   V_{i+1} = W_i / k_i,   eps_i = sign g(W_i, W_i)
//! ```
//!
//! with every quantity carried as a jet, so derivatives of curvatures and
//! frame vectors are exact to rounding. `V_n` comes out of the recursion
//! rather than an orthogonal complement, which makes the last Frenet
//! equation a genuine check (the closure residual).

use rayon::prelude::*;

use crate::curve::CurveSpec;
use crate::error::{Error, Result};
use crate::jet::{Jet, JetVector};
use crate::metric::{classify, CausalCharacter, MetricSignature, Sign, Vector};

pub const DEFAULT_CURVATURE_FLOOR: f64 = 1e-10;
pub const DEFAULT_FRAME_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrameTolerances {
    pub null_tol: f64,
    pub curvature_floor: f64,
    /// Bound on the closure residual `|V_n' + eps eps k_{n-1} V_{n-1}|`.
    pub residual_tol: f64,
    /// Bound on `|g(V_i, V_j) - eps_{j-1} delta_ij|`.
    pub frame_tol: f64,
}

impl Default for FrameTolerances {
    fn default() -> Self {
        FrameTolerances {
            null_tol: crate::metric::DEFAULT_NULL_TOL,
            curvature_floor: DEFAULT_CURVATURE_FLOOR,
            residual_tol: 1e-8,
            frame_tol: DEFAULT_FRAME_TOL,
        }
    }
}

/// Frame, curvatures and signs at one parameter value.
#[derive(Debug, Clone)]
pub struct FrenetData {
    pub s: f64,
    /// `V_1..V_n`
    pub frames: Vec<JetVector>,
    /// `k_1..k_{n-1}`
    pub curvatures: Vec<Jet>,
    /// `eps_0..eps_{n-1}`, `eps_{j-1} = g(V_j, V_j)`
    pub signs: Vec<Sign>,
    pub closure_residual: f64,
}

impl FrenetData {
    pub fn dim(&self) -> usize {
        self.frames.len()
    }

    /// `V_j`, 1-based.
    pub fn v(&self, j: usize) -> &JetVector {
        &self.frames[j - 1]
    }

    /// `k_i`, 1-based.
    pub fn k(&self, i: usize) -> &Jet {
        &self.curvatures[i - 1]
    }

    /// `eps_j`, 0-based.
    pub fn eps(&self, j: usize) -> Sign {
        self.signs[j]
    }

    pub fn frame_values(&self) -> Vec<Vector> {
        self.frames.iter().map(JetVector::value).collect()
    }

    /// `max_{i,j} |g(V_i, V_j) - eps_{i-1} delta_ij|`
    pub fn orthonormality_defect(&self, g: &MetricSignature) -> f64 {
        orthonormality_defect(g, &self.frame_values(), &self.signs)
    }

    /// Largest Euclidean residual of the Frenet equations, read from the
    /// first-derivative entries of the frame jets. Includes the closure row.
    pub fn frenet_residual(&self) -> f64 {
        let n = self.dim();
        let values = self.frame_values();
        let k: Vec<f64> = self.curvatures.iter().map(Jet::value).collect();
        let derivs: Vec<Vector> = self
            .frames
            .iter()
            .map(|v| v.deriv(1).expect("frame jets keep order >= 1"))
            .collect();
        frenet_equation_residual(&values, &derivs, &k, &self.signs, n)
    }
}

/// Residual of the Frenet system given frame values, frame derivatives and
/// curvature values.
pub(crate) fn frenet_equation_residual(
    values: &[Vector],
    derivs: &[Vector],
    k: &[f64],
    signs: &[Sign],
    n: usize,
) -> f64 {
    let mut worst: f64 = 0.0;
    for i in 1..=n {
        let mut predicted = Vector::zeros(values[0].len());
        if i > 1 {
            let c = (signs[i - 2] * signs[i - 1]).value();
            predicted.axpy(-c * k[i - 2], &values[i - 2]);
        }
        if i < n {
            predicted.axpy(k[i - 1], &values[i]);
        }
        worst = worst.max((&derivs[i - 1] - &predicted).euclidean_norm());
    }
    worst
}

pub(crate) fn orthonormality_defect(g: &MetricSignature, frames: &[Vector], signs: &[Sign]) -> f64 {
    let mut worst: f64 = 0.0;
    for (i, vi) in frames.iter().enumerate() {
        for (j, vj) in frames.iter().enumerate().skip(i) {
            let want = if i == j { signs[i].value() } else { 0.0 };
            worst = worst.max((g.dot(vi, vj) - want).abs());
        }
    }
    worst
}

fn degeneracy(w: &JetVector, g: &MetricSignature, index: usize, tol: &FrameTolerances) -> Result<(Jet, Sign)> {
    let s = w.base();
    let q = w.inner(g, w);
    let value = w.value();
    let e2: f64 = value.iter().map(|x| x * x).sum();
    if classify(q.value(), e2, tol.null_tol) == CausalCharacter::Null {
        if e2.sqrt() < tol.curvature_floor {
            return Err(Error::DegenerateCurvature {
                index,
                value: q.value().abs().sqrt(),
                s,
            });
        }
        return Err(Error::NullFrameVector { index: index + 1, s });
    }
    let k = q.abs().sqrt()?;
    if k.value() < tol.curvature_floor {
        return Err(Error::DegenerateCurvature {
            index,
            value: k.value(),
            s,
        });
    }
    Ok((k, Sign::of(q.value())))
}

/// Builds the Frenet frame from the position jet of a unit-speed curve.
///
/// The position jet must have order at least `n + 1`; `n + 2` or more
/// leaves derivatives for the harmonic curvatures.
pub fn frenet_at(position: &JetVector, g: &MetricSignature, tol: &FrameTolerances) -> Result<FrenetData> {
    let n = g.dim();
    if position.dim() != n {
        return Err(Error::Dimension {
            expected: n,
            got: position.dim(),
        });
    }
    if position.order() < n + 1 {
        return Err(Error::InsufficientJetOrder {
            needed: n + 1,
            available: position.order(),
        });
    }
    let s = position.base();
    let v1 = position.derivative().expect("order checked");
    let q1 = v1.value();
    let e2: f64 = q1.iter().map(|x| x * x).sum();
    if classify(g.dot(&q1, &q1), e2, tol.null_tol) == CausalCharacter::Null {
        return Err(Error::NullFrameVector { index: 1, s });
    }
    let mut signs = vec![Sign::of(g.dot(&q1, &q1))];
    let mut frames = vec![v1];
    let mut curvatures: Vec<Jet> = Vec::with_capacity(n - 1);

    for i in 1..n {
        let vi = &frames[i - 1];
        let mut w = vi.derivative().ok_or(Error::InsufficientJetOrder {
            needed: n + 1,
            available: position.order(),
        })?;
        if i > 1 {
            let c = (signs[i - 2] * signs[i - 1]).value();
            w = w.add(&frames[i - 2].scale_by(&curvatures[i - 2].scale(c)));
        }
        let (k, sign) = degeneracy(&w, g, i, tol)?;
        let next = w.try_div(&k)?;
        curvatures.push(k);
        frames.push(next);
        signs.push(sign);
    }

    let vn = &frames[n - 1];
    let c = (signs[n - 2] * signs[n - 1]).value();
    let closure = vn
        .derivative()
        .ok_or(Error::InsufficientJetOrder {
            needed: n + 1,
            available: position.order(),
        })?
        .add(&frames[n - 2].scale_by(&curvatures[n - 2].scale(c)));
    let closure_residual = closure.value().euclidean_norm();
    if closure_residual.is_nan() || closure_residual > tol.residual_tol {
        return Err(Error::FrenetClosure {
            residual: closure_residual,
            s,
        });
    }

    let values: Vec<Vector> = frames.iter().map(JetVector::value).collect();
    let defect = orthonormality_defect(g, &values, &signs);
    if defect.is_nan() || defect > tol.frame_tol {
        return Err(Error::FrameDefect { defect, s });
    }

    Ok(FrenetData {
        s,
        frames,
        curvatures,
        signs,
        closure_residual,
    })
}

/// Frenet data along a grid, in grid order.
#[derive(Debug, Clone)]
pub struct FrenetSeries {
    pub metric: MetricSignature,
    pub signs: Vec<Sign>,
    pub points: Vec<FrenetData>,
}

impl FrenetSeries {
    pub fn grid(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.s).collect()
    }
}

pub fn frenet_series(spec: &CurveSpec, grid: &[f64], jet_order: usize, tol: &FrameTolerances) -> Result<FrenetSeries> {
    let g = spec.metric();
    let results: Vec<Result<FrenetData>> = grid
        .par_iter()
        .map(|&s| frenet_at(&spec.curve_jets(s, jet_order)?, g, tol))
        .collect();
    let mut points = Vec::with_capacity(grid.len());
    for r in results {
        points.push(r?);
    }
    check_sign_constancy(&points)?;
    let signs = points.first().map(|p| p.signs.clone()).unwrap_or_default();
    Ok(FrenetSeries {
        metric: g.clone(),
        signs,
        points,
    })
}

fn check_sign_constancy(points: &[FrenetData]) -> Result<()> {
    for pair in points.windows(2) {
        if pair[0].signs != pair[1].signs {
            return Err(Error::SignFlip { s: pair[1].s });
        }
    }
    Ok(())
}
