//! Indefinite inner-product algebra on R^n with a constant diagonal metric.
//!
//! The metric is `g = diag(eta_1, ..., eta_n)` with every `eta_j` equal to
//! +1 or -1. Because the metric is constant, the Levi-Civita connection
//! along a curve is the componentwise derivative, so everything downstream
//! works with plain coordinate derivatives.

use std::fmt;
use std::ops::{Add, Index, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default relative tolerance below which `|g(u,u)|` counts as null.
pub const DEFAULT_NULL_TOL: f64 = 1e-9;

/// A sign of the metric or of a frame vector, stored as +1 / -1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "i8", into = "i8")]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn of(x: f64) -> Sign {
        if x < 0.0 {
            Sign::Minus
        } else {
            Sign::Plus
        }
    }

    pub fn value(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }
}

impl Mul for Sign {
    type Output = Sign;

    fn mul(self, rhs: Sign) -> Sign {
        if self == rhs {
            Sign::Plus
        } else {
            Sign::Minus
        }
    }
}

impl TryFrom<i8> for Sign {
    type Error = String;

    fn try_from(v: i8) -> std::result::Result<Self, Self::Error> {
        match v {
            1 => Ok(Sign::Plus),
            -1 => Ok(Sign::Minus),
            other => Err(format!("sign must be +1 or -1, got {other}")),
        }
    }
}

impl From<Sign> for i8 {
    fn from(s: Sign) -> i8 {
        match s {
            Sign::Plus => 1,
            Sign::Minus => -1,
        }
    }
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Sign::Plus => "+1",
            Sign::Minus => "-1",
        })
    }
}

/// Diagonal signature `diag(eta_1..eta_n)` of a flat pseudo-Euclidean space.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Sign>", into = "Vec<Sign>")]
pub struct MetricSignature {
    eta: Vec<Sign>,
}

impl MetricSignature {
    pub fn new(eta: Vec<Sign>) -> Result<Self> {
        if eta.len() < 2 {
            return Err(Error::InvalidSpec(format!(
                "metric dimension must be at least 2, got {}",
                eta.len()
            )));
        }
        Ok(MetricSignature { eta })
    }

    pub fn euclidean(n: usize) -> Result<Self> {
        Self::new(vec![Sign::Plus; n])
    }

    /// `diag(-1, 1, ..., 1)`.
    pub fn minkowski(n: usize) -> Result<Self> {
        let mut eta = vec![Sign::Plus; n];
        if let Some(first) = eta.first_mut() {
            *first = Sign::Minus;
        }
        Self::new(eta)
    }

    /// Builds a signature from raw numbers, rejecting anything but +1 / -1.
    pub fn from_values(values: &[f64]) -> Result<Self> {
        let eta = values
            .iter()
            .map(|&v| match v {
                1.0 => Ok(Sign::Plus),
                -1.0 => Ok(Sign::Minus),
                v => Err(Error::InvalidSpec(format!("metric entries must be +1 or -1, got {v}"))),
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(eta)
    }

    pub fn dim(&self) -> usize {
        self.eta.len()
    }

    pub fn eta(&self) -> &[Sign] {
        &self.eta
    }

    pub fn negative_count(&self) -> usize {
        self.eta.iter().filter(|&&e| e == Sign::Minus).count()
    }

    fn check(&self, u: &[f64]) -> Result<()> {
        if u.len() != self.dim() {
            return Err(Error::Dimension {
                expected: self.dim(),
                got: u.len(),
            });
        }
        Ok(())
    }

    /// `g(u, v) = sum_j eta_j u_j v_j`, summed left to right.
    pub fn inner(&self, u: &[f64], v: &[f64]) -> Result<f64> {
        self.check(u)?;
        self.check(v)?;
        Ok(self.dot(u, v))
    }

    /// Unchecked variant of [`inner`](Self::inner) for internal loops.
    pub(crate) fn dot(&self, u: &[f64], v: &[f64]) -> f64 {
        debug_assert_eq!(u.len(), self.dim());
        debug_assert_eq!(v.len(), self.dim());
        let mut acc = 0.0;
        for ((e, a), b) in self.eta.iter().zip(u).zip(v) {
            acc += e.value() * a * b;
        }
        acc
    }

    /// `||u|| = sqrt(|g(u,u)|)`.
    pub fn norm(&self, u: &[f64]) -> Result<f64> {
        Ok(self.inner(u, u)?.abs().sqrt())
    }

    pub fn causal_character(&self, u: &[f64], null_tol: f64) -> Result<CausalCharacter> {
        let q = self.inner(u, u)?;
        Ok(classify(q, euclidean_sq(u), null_tol))
    }

    /// Scales a non-null vector to `|g(w,w)| = 1` and returns `g(w,w)` as a sign.
    pub fn normalize(&self, u: &[f64], null_tol: f64) -> Result<(Vector, Sign)> {
        let q = self.inner(u, u)?;
        if classify(q, euclidean_sq(u), null_tol) == CausalCharacter::Null {
            return Err(Error::NullVector { value: q });
        }
        let scale = 1.0 / q.abs().sqrt();
        Ok((u.iter().map(|x| x * scale).collect(), Sign::of(q)))
    }
}

impl TryFrom<Vec<Sign>> for MetricSignature {
    type Error = String;

    fn try_from(eta: Vec<Sign>) -> std::result::Result<Self, Self::Error> {
        MetricSignature::new(eta).map_err(|e| e.to_string())
    }
}

impl From<MetricSignature> for Vec<Sign> {
    fn from(g: MetricSignature) -> Vec<Sign> {
        g.eta
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CausalCharacter {
    Spacelike,
    Timelike,
    Null,
}

fn euclidean_sq(u: &[f64]) -> f64 {
    u.iter().map(|x| x * x).sum()
}

/// Null when `|q| <= tol * |u|_E^2`, so rescaling never changes the verdict.
pub(crate) fn classify(q: f64, euclid_sq: f64, null_tol: f64) -> CausalCharacter {
    if q.abs() <= null_tol * euclid_sq || euclid_sq == 0.0 {
        CausalCharacter::Null
    } else if q > 0.0 {
        CausalCharacter::Spacelike
    } else {
        CausalCharacter::Timelike
    }
}

/// A coordinate vector in R^n.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Vector(pub Vec<f64>);

impl Vector {
    pub fn zeros(n: usize) -> Self {
        Vector(vec![0.0; n])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn iter(&self) -> std::slice::Iter<'_, f64> {
        self.0.iter()
    }

    pub fn euclidean_norm(&self) -> f64 {
        euclidean_sq(&self.0).sqrt()
    }

    /// `self += a * other`
    pub fn axpy(&mut self, a: f64, other: &[f64]) {
        for (x, y) in self.0.iter_mut().zip(other) {
            *x += a * y;
        }
    }

    pub fn max_abs_diff(&self, other: &Vector) -> f64 {
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

impl From<Vec<f64>> for Vector {
    fn from(v: Vec<f64>) -> Self {
        Vector(v)
    }
}

impl FromIterator<f64> for Vector {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        Vector(iter.into_iter().collect())
    }
}

impl AsRef<[f64]> for Vector {
    fn as_ref(&self) -> &[f64] {
        &self.0
    }
}

impl std::ops::Deref for Vector {
    type Target = [f64];

    fn deref(&self) -> &[f64] {
        &self.0
    }
}

impl Index<usize> for Vector {
    type Output = f64;

    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

impl Add for &Vector {
    type Output = Vector;

    fn add(self, rhs: &Vector) -> Vector {
        self.0.iter().zip(&rhs.0).map(|(a, b)| a + b).collect()
    }
}

impl Sub for &Vector {
    type Output = Vector;

    fn sub(self, rhs: &Vector) -> Vector {
        self.0.iter().zip(&rhs.0).map(|(a, b)| a - b).collect()
    }
}

impl Mul<f64> for &Vector {
    type Output = Vector;

    fn mul(self, rhs: f64) -> Vector {
        self.0.iter().map(|a| a * rhs).collect()
    }
}

impl Neg for &Vector {
    type Output = Vector;

    fn neg(self) -> Vector {
        self.0.iter().map(|a| -a).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn g(values: &[f64]) -> MetricSignature {
        MetricSignature::from_values(values).unwrap()
    }

    #[test]
    fn inner_examples() {
        assert_eq!(g(&[-1., 1., 1.]).inner(&[1., 0., 0.], &[1., 0., 0.]).unwrap(), -1.0);
        assert_eq!(g(&[1., 1., 1.]).inner(&[1., 2., 3.], &[4., 5., 6.]).unwrap(), 32.0);
        assert_eq!(g(&[-1., 1., 1.]).inner(&[1., 1., 0.], &[1., 1., 0.]).unwrap(), 0.0);
    }

    #[test]
    fn inner_rejects_dimension_mismatch() {
        let err = g(&[1., 1., 1.]).inner(&[1., 2.], &[1., 2., 3.]).unwrap_err();
        assert!(matches!(err, Error::Dimension { expected: 3, got: 2 }));
    }

    #[test]
    fn norm_examples() {
        assert_eq!(g(&[1., 1., 1.]).norm(&[3., 4., 0.]).unwrap(), 5.0);
        assert_eq!(g(&[-1., 1., 1.]).norm(&[2., 0., 0.]).unwrap(), 2.0);
        assert_eq!(g(&[-1., 1., 1.]).norm(&[1., 1., 0.]).unwrap(), 0.0);
    }

    #[test]
    fn causal_character_examples() {
        let m = g(&[-1., 1., 1.]);
        let tol = DEFAULT_NULL_TOL;
        assert_eq!(
            m.causal_character(&[0., 1., 0.], tol).unwrap(),
            CausalCharacter::Spacelike
        );
        assert_eq!(
            m.causal_character(&[1., 0., 0.], tol).unwrap(),
            CausalCharacter::Timelike
        );
        assert_eq!(m.causal_character(&[1., 1., 0.], tol).unwrap(), CausalCharacter::Null);
        assert_eq!(m.causal_character(&[0., 0., 0.], tol).unwrap(), CausalCharacter::Null);
    }

    #[test]
    fn normalize_examples() {
        let tol = DEFAULT_NULL_TOL;
        let (w, s) = g(&[1., 1., 1.]).normalize(&[3., 0., 0.], tol).unwrap();
        assert_eq!((w, s), (Vector(vec![1., 0., 0.]), Sign::Plus));
        let (w, s) = g(&[-1., 1., 1.]).normalize(&[2., 0., 0.], tol).unwrap();
        assert_eq!((w, s), (Vector(vec![1., 0., 0.]), Sign::Minus));
        let err = g(&[-1., 1., 1.]).normalize(&[1., 1., 0.], tol).unwrap_err();
        assert!(matches!(err, Error::NullVector { .. }));
    }

    #[test]
    fn rejects_bad_signatures() {
        assert!(MetricSignature::from_values(&[1.0, 0.0, 1.0]).is_err());
        assert!(MetricSignature::from_values(&[1.0]).is_err());
        assert!(serde_json::from_str::<MetricSignature>("[1, 2]").is_err());
        let m: MetricSignature = serde_json::from_str("[-1, 1, 1]").unwrap();
        assert_eq!(m, MetricSignature::minkowski(3).unwrap());
        assert_eq!(serde_json::to_string(&m).unwrap(), "[-1,1,1]");
    }

    fn signature() -> impl Strategy<Value = MetricSignature> {
        prop::collection::vec(prop::bool::ANY, 2..7).prop_map(|bits| {
            MetricSignature::new(
                bits.into_iter()
                    .map(|b| if b { Sign::Plus } else { Sign::Minus })
                    .collect(),
            )
            .unwrap()
        })
    }

    fn with_vectors(count: usize) -> impl Strategy<Value = (MetricSignature, Vec<Vec<f64>>)> {
        signature().prop_flat_map(move |m| {
            let n = m.dim();
            (
                Just(m),
                prop::collection::vec(prop::collection::vec(-10.0f64..10.0, n), count),
            )
        })
    }

    proptest! {
        #[test]
        fn inner_is_symmetric((m, vs) in with_vectors(2)) {
            prop_assert_eq!(m.inner(&vs[0], &vs[1]).unwrap(), m.inner(&vs[1], &vs[0]).unwrap());
        }

        #[test]
        fn inner_is_bilinear((m, vs) in with_vectors(3), a in -5.0f64..5.0, b in -5.0f64..5.0) {
            let (u, w, v) = (&vs[0], &vs[1], &vs[2]);
            let comb: Vec<f64> = u.iter().zip(w).map(|(x, y)| a * x + b * y).collect();
            let lhs = m.inner(&comb, v).unwrap();
            let rhs = a * m.inner(u, v).unwrap() + b * m.inner(w, v).unwrap();
            let scale = 1.0 + lhs.abs().max(rhs.abs())
                + (a.abs() + b.abs()) * 100.0 * m.dim() as f64;
            prop_assert!((lhs - rhs).abs() <= 1e-12 * scale);
        }

        #[test]
        fn normalize_gives_unit_and_is_idempotent((m, vs) in with_vectors(1)) {
            let u = &vs[0];
            prop_assume!(m.causal_character(u, 1e-6).unwrap() != CausalCharacter::Null);
            let (w, s) = m.normalize(u, DEFAULT_NULL_TOL).unwrap();
            let q = m.inner(&w, &w).unwrap();
            // cancellation in g(w,w) grows with |w|_E^2 for nearly null vectors
            let e2 = w.euclidean_norm().powi(2);
            prop_assert!((q - s.value()).abs() < 1e-14 * e2.max(1.0));
            let (w2, s2) = m.normalize(&w, DEFAULT_NULL_TOL).unwrap();
            prop_assert_eq!(s, s2);
            prop_assert!(w.max_abs_diff(&w2) <= 1e-14 * w.euclidean_norm() * e2.max(1.0));
        }

        #[test]
        fn null_classification_is_scale_free((m, vs) in with_vectors(1), k in 1e-6f64..1e6) {
            let u = &vs[0];
            let scaled: Vec<f64> = u.iter().map(|x| x * k).collect();
            prop_assert_eq!(
                m.causal_character(u, DEFAULT_NULL_TOL).unwrap(),
                m.causal_character(&scaled, DEFAULT_NULL_TOL).unwrap()
            );
        }
    }
}
