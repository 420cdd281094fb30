//! Gauss–Legendre quadrature and Richardson extrapolation.

use super::ExtReal;

/// Nodes and weights on [−1, 1].
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    pub nodes: Vec<ExtReal>,
    pub weights: Vec<ExtReal>,
}

/// n-point rule at the given precision (Newton iteration on P_n).
pub fn gauss_legendre(n: usize, prec: u32) -> GaussLegendre {
    let wp = prec + 32;
    let pi = ExtReal::pi(wp);
    let mut nodes = Vec::with_capacity(n);
    let mut weights = Vec::with_capacity(n);
    for i in 0..n {
        // Tricomi's initial guess
        let mut x = (&pi * ((i as f64) + 0.75) / ((n as f64) + 0.5)).cos();
        let mut dp = ExtReal::zero(wp);
        for _ in 0..100 {
            let (p, d) = legendre(n, &x);
            dp = d;
            let dx = p / &dp;
            x -= &dx;
            if dx.log2_abs() < -(wp as f64) + 4.0 {
                break;
            }
        }
        let (_, d) = legendre(n, &x);
        dp = if d.is_zero() { dp } else { d };
        let w = ExtReal::from_i64(2, wp) / ((1.0 - x.sqr()) * dp.sqr());
        nodes.push(x.with_prec(prec));
        weights.push(w.with_prec(prec));
    }
    GaussLegendre { nodes, weights }
}

/// (P_n(x), P_n'(x)).
fn legendre(n: usize, x: &ExtReal) -> (ExtReal, ExtReal) {
    let p = x.prec();
    let mut p0 = ExtReal::one(p);
    let mut p1 = x.clone();
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * &p1 - (k - 1.0) * &p0) / k;
        p0 = p1;
        p1 = p2;
    }
    let d = (n as f64) * (x * &p1 - &p0) / (x.sqr() - 1.0);
    (p1, d)
}

impl GaussLegendre {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }
    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }
    /// ∫_a^b f.
    pub fn integrate<F: FnMut(&ExtReal) -> ExtReal>(&self, a: &ExtReal, b: &ExtReal, mut f: F) -> ExtReal {
        let half = (b - a) / 2.0;
        let mid = (b + a) / 2.0;
        let mut acc = ExtReal::zero(a.prec());
        for (x, w) in self.nodes.iter().zip(&self.weights) {
            acc += w * f(&(&mid + &half * x));
        }
        acc * half
    }
}

/// One Richardson step for a scheme of order `order` with step ratio 2:
/// (2^order·A(h/2) − A(h)) / (2^order − 1).
pub fn richardson(coarse: &ExtReal, fine: &ExtReal, order: u32) -> ExtReal {
    let f = 2f64.powi(order as i32);
    (fine * f - coarse) / (f - 1.0)
}
