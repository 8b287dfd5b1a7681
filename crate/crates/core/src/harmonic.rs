//! Harmonic curvatures `H*_0..H*_{n-2}` built from the curvature jets.
//!
//! ```text
//! H_0 = 0
//! H_1 = eps_{n-3} eps_{n-2} k_{n-1} / k_{n-2}
//! H_i = (k_{n-i} H_{i-2} - H_{i-1}') eps_{n-(i+2)} eps_{n-(i+1)} / k_{n-(i+1)},  2 <= i <= n-2
//! ```
//!
//! Each step differentiates once, so `H_i` carries `i - 1` fewer derivatives
//! than the curvatures it was built from.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::frenet::FrenetSeries;
use crate::jet::Jet;
use crate::metric::Sign;

#[derive(Debug, Clone)]
pub struct HarmonicProfile {
    pub s: f64,
    /// `H_1..H_{n-2}`
    pub h: Vec<Jet>,
    /// `k_1..k_{n-1}`
    pub curvatures: Vec<Jet>,
    /// `eps_0..eps_{n-1}`
    pub signs: Vec<Sign>,
}

impl HarmonicProfile {
    pub fn dim(&self) -> usize {
        self.signs.len()
    }

    /// `H_i` value for `0 <= i <= n-2`.
    pub fn value(&self, i: usize) -> f64 {
        if i == 0 {
            0.0
        } else {
            self.h[i - 1].value()
        }
    }

    pub fn values(&self) -> Vec<f64> {
        self.h.iter().map(Jet::value).collect()
    }

    /// `H_{n-2}`
    pub fn top(&self) -> &Jet {
        self.h.last().expect("n >= 3")
    }

    /// `sum_{i=1}^{n-2} eps_{n-(i+2)} H_i^2`
    pub fn lemma_sum(&self) -> f64 {
        let n = self.dim();
        self.h
            .iter()
            .enumerate()
            .map(|(idx, hi)| self.signs[n - (idx + 3)].value() * hi.value() * hi.value())
            .sum()
    }

    /// The same sum carried as a jet.
    pub fn lemma_sum_jet(&self) -> Jet {
        let n = self.dim();
        let order = self.top().order();
        let mut acc = Jet::constant(self.s, 0.0, order);
        for (idx, hi) in self.h.iter().enumerate() {
            let hi = hi.truncate(order);
            acc = &acc + &(&hi * &hi).scale(self.signs[n - (idx + 3)].value());
        }
        acc
    }

    /// `H_{n-2}' - k_1 H_{n-3}`
    pub fn relation_residual(&self) -> f64 {
        let n = self.dim();
        let top_deriv = self.top().deriv(1).expect("profile keeps H_{n-2}'");
        top_deriv - self.curvatures[0].value() * self.value(n - 3)
    }

    /// `k_1 H_{n-3}`, the scale the relation residual is judged against.
    pub fn relation_scale(&self) -> f64 {
        (self.curvatures[0].value() * self.value(self.dim() - 3)).abs()
    }

    /// Largest residual of the derivative identities
    /// `eps_a eps_b H_i' = eps_a eps_b k_{n-(i+1)} H_{i-1} - k_{n-(i+2)} H_{i+1}`
    /// with `a = n-(i+3)`, `b = n-(i+2)`, over `1 <= i <= n-3`.
    pub fn recursion_residual(&self) -> f64 {
        let n = self.dim();
        let k = |j: usize| self.curvatures[j - 1].value();
        let mut worst: f64 = 0.0;
        for i in 1..=n.saturating_sub(3) {
            let e = (self.signs[n - (i + 3)] * self.signs[n - (i + 2)]).value();
            let d = self.h[i - 1].deriv(1).expect("lower harmonics keep a derivative");
            let rhs = e * k(n - (i + 1)) * self.value(i - 1) - k(n - (i + 2)) * self.value(i + 1);
            worst = worst.max((e * d - rhs).abs());
        }
        worst
    }
}

/// Harmonic curvatures from curvature jets `k_1..k_{n-1}` and signs
/// `eps_0..eps_{n-1}` at one point.
pub fn harmonic_at(curvatures: &[Jet], signs: &[Sign]) -> Result<HarmonicProfile> {
    let n = signs.len();
    if n < 3 {
        return Err(Error::UnsupportedDimension(n));
    }
    if curvatures.len() != n - 1 {
        return Err(Error::Dimension {
            expected: n - 1,
            got: curvatures.len(),
        });
    }
    let s = curvatures[0].base();
    let k = |j: usize| &curvatures[j - 1];
    let eps = |j: usize| signs[j].value();

    let mut h: Vec<Jet> = Vec::with_capacity(n - 2);
    h.push(k(n - 1).try_div(k(n - 2))?.scale(eps(n - 3) * eps(n - 2)));
    for i in 2..=n - 2 {
        let prev = &h[i - 2];
        let d = prev.derivative().ok_or_else(|| short(curvatures, n))?;
        let before = if i == 2 {
            Jet::constant(s, 0.0, d.order())
        } else {
            h[i - 3].clone()
        };
        let numer = &(k(n - i) * &before) - &d;
        h.push(
            numer
                .try_div(k(n - (i + 1)))?
                .scale(eps(n - (i + 2)) * eps(n - (i + 1))),
        );
    }
    if h[n - 3].order() == 0 {
        return Err(short(curvatures, n));
    }
    Ok(HarmonicProfile {
        s,
        h,
        curvatures: curvatures.to_vec(),
        signs: signs.to_vec(),
    })
}

fn short(curvatures: &[Jet], n: usize) -> Error {
    let available = curvatures.iter().map(Jet::order).min().unwrap_or(0);
    Error::InsufficientJetOrder {
        needed: n - 2,
        available,
    }
}

pub fn harmonic_series(series: &FrenetSeries) -> Result<Vec<HarmonicProfile>> {
    let results: Vec<Result<HarmonicProfile>> = series
        .points
        .par_iter()
        .map(|p| harmonic_at(&p.curvatures, &p.signs))
        .collect();
    results.into_iter().collect()
}
