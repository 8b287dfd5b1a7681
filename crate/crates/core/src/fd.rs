//! Finite-difference weights on arbitrary stencils (Fornberg's recursion).

/// Weights `c[k][j]` such that `f^(k)(z) ~ sum_j c[k][j] f(x[j])` for
/// `k = 0..=max_order`.
pub fn weights(z: f64, x: &[f64], max_order: usize) -> Vec<Vec<f64>> {
    let n = x.len();
    assert!(n > max_order, "need more nodes than the derivative order");
    let mut c = vec![vec![0.0; n]; max_order + 1];
    c[0][0] = 1.0;
    let mut c1 = 1.0;
    let mut c4 = x[0] - z;
    for i in 1..n {
        let mn = i.min(max_order);
        let mut c2 = 1.0;
        let c5 = c4;
        c4 = x[i] - z;
        for j in 0..i {
            let c3 = x[i] - x[j];
            c2 *= c3;
            if j == i - 1 {
                for k in (1..=mn).rev() {
                    c[k][i] = c1 * (k as f64 * c[k - 1][i - 1] - c5 * c[k][i - 1]) / c2;
                }
                c[0][i] = -c1 * c5 * c[0][i - 1] / c2;
            }
            for k in (1..=mn).rev() {
                c[k][j] = (c4 * c[k][j] - k as f64 * c[k - 1][j]) / c3;
            }
            c[0][j] = c4 * c[0][j] / c3;
        }
        c1 = c2;
    }
    c
}

/// Central stencil with offsets `-half..=half` and unit spacing.
#[derive(Debug, Clone)]
pub struct CentralStencil {
    half: usize,
    weights: Vec<Vec<f64>>,
}

impl CentralStencil {
    pub fn new(half: usize, max_order: usize) -> Self {
        let nodes: Vec<f64> = (-(half as isize)..=half as isize).map(|i| i as f64).collect();
        CentralStencil {
            half,
            weights: weights(0.0, &nodes, max_order),
        }
    }

    pub fn half(&self) -> usize {
        self.half
    }

    pub fn max_order(&self) -> usize {
        self.weights.len() - 1
    }

    /// Derivative `k` from values at offsets `-half..=half` times `spacing`.
    pub fn apply(&self, k: usize, values: &[f64], spacing: f64) -> f64 {
        debug_assert_eq!(values.len(), 2 * self.half + 1);
        let sum: f64 = self.weights[k].iter().zip(values).map(|(w, v)| w * v).sum();
        sum / spacing.powi(k as i32)
    }
}
