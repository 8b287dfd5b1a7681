//! Truncated Taylor jets carrying derivative values.
//!
//! A [`Jet`] of order `m` at `s0` stores `f(s0), f'(s0), ..., f^(m)(s0)`.
//! Binary operations truncate to the smaller order of their operands, and
//! [`Jet::derivative`] drops one order, so every jet records how many
//! derivatives are still trustworthy.

use std::ops::{Add, Mul, Neg, Sub};

use crate::expr::EvalError;
use crate::metric::{MetricSignature, Vector};

/// Denominators smaller than this in magnitude are treated as zero.
pub const DIVISION_FLOOR: f64 = 1e-300;

#[derive(Debug, Clone, PartialEq)]
pub struct Jet {
    base: f64,
    derivs: Vec<f64>,
}

impl Jet {
    pub fn new(base: f64, derivs: Vec<f64>) -> Self {
        assert!(!derivs.is_empty(), "a jet needs at least its value");
        Jet { base, derivs }
    }

    pub fn constant(base: f64, value: f64, order: usize) -> Self {
        let mut derivs = vec![0.0; order + 1];
        derivs[0] = value;
        Jet { base, derivs }
    }

    /// The identity function `s` expanded at `base`.
    pub fn variable(base: f64, order: usize) -> Self {
        let mut jet = Jet::constant(base, base, order);
        if order >= 1 {
            jet.derivs[1] = 1.0;
        }
        jet
    }

    pub fn base(&self) -> f64 {
        self.base
    }

    pub fn order(&self) -> usize {
        self.derivs.len() - 1
    }

    pub fn value(&self) -> f64 {
        self.derivs[0]
    }

    pub fn derivs(&self) -> &[f64] {
        &self.derivs
    }

    /// k-th derivative, if the jet carries it.
    pub fn deriv(&self, k: usize) -> Option<f64> {
        self.derivs.get(k).copied()
    }

    /// The jet of `f'`, one order shorter. An order-0 jet has no derivative.
    pub fn derivative(&self) -> Option<Jet> {
        (self.order() >= 1).then(|| Jet {
            base: self.base,
            derivs: self.derivs[1..].to_vec(),
        })
    }

    pub fn truncate(&self, order: usize) -> Jet {
        Jet {
            base: self.base,
            derivs: self.derivs[..=order.min(self.order())].to_vec(),
        }
    }

    pub fn scale(&self, a: f64) -> Jet {
        Jet {
            base: self.base,
            derivs: self.derivs.iter().map(|d| a * d).collect(),
        }
    }

    fn paired_order(&self, other: &Jet) -> usize {
        debug_assert!(
            self.base == other.base,
            "jets expanded at different points: {} vs {}",
            self.base,
            other.base
        );
        self.order().min(other.order())
    }

    pub fn try_div(&self, rhs: &Jet) -> Result<Jet, EvalError> {
        let m = self.paired_order(rhs);
        let g0 = rhs.derivs[0];
        if g0.abs() < DIVISION_FLOOR {
            return Err(EvalError::DivisionByZero { s: self.base });
        }
        // f = h g  =>  h^(k) = (f^(k) - sum_{j<k} C(k,j) h^(j) g^(k-j)) / g
        let mut h = Vec::with_capacity(m + 1);
        for k in 0..=m {
            let mut acc = self.derivs[k];
            let mut c = 1.0;
            for (j, hj) in h.iter().enumerate() {
                acc -= c * hj * rhs.derivs[k - j];
                c = c * (k - j) as f64 / (j + 1) as f64;
            }
            h.push(acc / g0);
        }
        Ok(Jet {
            base: self.base,
            derivs: h,
        })
    }

    pub fn recip(&self) -> Result<Jet, EvalError> {
        Jet::constant(self.base, 1.0, self.order()).try_div(self)
    }

    pub fn sqrt(&self) -> Result<Jet, EvalError> {
        let f0 = self.derivs[0];
        if f0 < 0.0 {
            return Err(EvalError::NegativeSqrt { s: self.base });
        }
        let h0 = f0.sqrt();
        if self.order() > 0 && h0 < DIVISION_FLOOR {
            return Err(EvalError::DivisionByZero { s: self.base });
        }
        // h^2 = f  =>  2 h h^(k) = f^(k) - sum_{0<j<k} C(k,j) h^(j) h^(k-j)
        let mut h = Vec::with_capacity(self.derivs.len());
        h.push(h0);
        for k in 1..=self.order() {
            let mut acc = self.derivs[k];
            let mut c = k as f64;
            for j in 1..k {
                acc -= c * h[j] * h[k - j];
                c = c * (k - j) as f64 / (j + 1) as f64;
            }
            h.push(acc / (2.0 * h0));
        }
        Ok(Jet {
            base: self.base,
            derivs: h,
        })
    }

    /// `|f|`, valid away from zeros of `f` (the sign of the value decides).
    pub fn abs(&self) -> Jet {
        if self.derivs[0] < 0.0 {
            -self
        } else {
            self.clone()
        }
    }

    pub fn exp(&self) -> Jet {
        // h' = h f'
        let mut h = Vec::with_capacity(self.derivs.len());
        h.push(self.derivs[0].exp());
        for k in 1..=self.order() {
            h.push(chain_sum(&h, &self.derivs, k));
        }
        Jet {
            base: self.base,
            derivs: h,
        }
    }

    /// Returns `(sin f, cos f)`.
    pub fn sin_cos(&self) -> (Jet, Jet) {
        self.coupled(self.derivs[0].sin(), self.derivs[0].cos(), -1.0)
    }

    /// Returns `(sinh f, cosh f)`.
    pub fn sinh_cosh(&self) -> (Jet, Jet) {
        self.coupled(self.derivs[0].sinh(), self.derivs[0].cosh(), 1.0)
    }

    // a' = b f', b' = sign * a f'
    fn coupled(&self, a0: f64, b0: f64, sign: f64) -> (Jet, Jet) {
        let mut a = Vec::with_capacity(self.derivs.len());
        let mut b = Vec::with_capacity(self.derivs.len());
        a.push(a0);
        b.push(b0);
        for k in 1..=self.order() {
            let ak = chain_sum(&b, &self.derivs, k);
            let bk = sign * chain_sum(&a, &self.derivs, k);
            a.push(ak);
            b.push(bk);
        }
        (
            Jet {
                base: self.base,
                derivs: a,
            },
            Jet {
                base: self.base,
                derivs: b,
            },
        )
    }

    pub fn powi(&self, n: i32) -> Result<Jet, EvalError> {
        let mut result = Jet::constant(self.base, 1.0, self.order());
        let mut square = self.clone();
        let mut e = n.unsigned_abs();
        while e > 0 {
            if e & 1 == 1 {
                result = &result * &square;
            }
            e >>= 1;
            if e > 0 {
                square = &square * &square;
            }
        }
        if n < 0 {
            result.recip()
        } else {
            Ok(result)
        }
    }
}

/// `sum_{j=0}^{k-1} C(k-1, j) a^(j) f^(k-j)`, the k-th derivative of `a_prev * f'`
/// when `a` is the jet whose derivative is `a_prev * f'`.
fn chain_sum(a: &[f64], f: &[f64], k: usize) -> f64 {
    let mut acc = 0.0;
    let mut c = 1.0;
    for j in 0..k {
        acc += c * a[j] * f[k - j];
        c = c * (k - 1 - j) as f64 / (j + 1) as f64;
    }
    acc
}

impl Add for &Jet {
    type Output = Jet;

    fn add(self, rhs: &Jet) -> Jet {
        let m = self.paired_order(rhs);
        Jet {
            base: self.base,
            derivs: (0..=m).map(|k| self.derivs[k] + rhs.derivs[k]).collect(),
        }
    }
}

impl Sub for &Jet {
    type Output = Jet;

    fn sub(self, rhs: &Jet) -> Jet {
        let m = self.paired_order(rhs);
        Jet {
            base: self.base,
            derivs: (0..=m).map(|k| self.derivs[k] - rhs.derivs[k]).collect(),
        }
    }
}

impl Mul for &Jet {
    type Output = Jet;

    /// Leibniz rule.
    fn mul(self, rhs: &Jet) -> Jet {
        let m = self.paired_order(rhs);
        let derivs = (0..=m)
            .map(|k| {
                let mut acc = -0.0; // keeps the sign of a zero product
                let mut c = 1.0;
                for j in 0..=k {
                    acc += c * self.derivs[j] * rhs.derivs[k - j];
                    c = c * (k - j) as f64 / (j + 1) as f64;
                }
                acc
            })
            .collect();
        Jet {
            base: self.base,
            derivs,
        }
    }
}

impl Neg for &Jet {
    type Output = Jet;

    fn neg(self) -> Jet {
        self.scale(-1.0)
    }
}

/// One jet per coordinate, all expanded at the same point to the same order.
#[derive(Debug, Clone, PartialEq)]
pub struct JetVector {
    comps: Vec<Jet>,
}

impl JetVector {
    pub fn new(comps: Vec<Jet>) -> Self {
        assert!(!comps.is_empty());
        let order = comps.iter().map(Jet::order).min().unwrap_or(0);
        let comps = comps.into_iter().map(|c| c.truncate(order)).collect();
        JetVector { comps }
    }

    pub fn dim(&self) -> usize {
        self.comps.len()
    }

    pub fn order(&self) -> usize {
        self.comps[0].order()
    }

    pub fn base(&self) -> f64 {
        self.comps[0].base()
    }

    pub fn components(&self) -> &[Jet] {
        &self.comps
    }

    pub fn value(&self) -> Vector {
        self.comps.iter().map(Jet::value).collect()
    }

    /// Vector of k-th derivatives, if available.
    pub fn deriv(&self, k: usize) -> Option<Vector> {
        self.comps
            .iter()
            .map(|c| c.deriv(k))
            .collect::<Option<Vec<_>>>()
            .map(Vector)
    }

    pub fn derivative(&self) -> Option<JetVector> {
        self.comps
            .iter()
            .map(Jet::derivative)
            .collect::<Option<Vec<_>>>()
            .map(|comps| JetVector { comps })
    }

    /// `g(self, other)` as a jet.
    pub fn inner(&self, g: &MetricSignature, other: &JetVector) -> Jet {
        debug_assert_eq!(self.dim(), g.dim());
        let mut acc = Jet::constant(self.base(), 0.0, self.order().min(other.order()));
        for ((a, b), eta) in self.comps.iter().zip(&other.comps).zip(g.eta()) {
            acc = &acc + &(a * b).scale(eta.value());
        }
        acc
    }

    pub fn scale_by(&self, s: &Jet) -> JetVector {
        JetVector::new(self.comps.iter().map(|c| c * s).collect())
    }

    pub fn try_div(&self, s: &Jet) -> Result<JetVector, EvalError> {
        Ok(JetVector::new(
            self.comps.iter().map(|c| c.try_div(s)).collect::<Result<Vec<_>, _>>()?,
        ))
    }

    pub fn add(&self, other: &JetVector) -> JetVector {
        JetVector::new(self.comps.iter().zip(&other.comps).map(|(a, b)| a + b).collect())
    }
}
