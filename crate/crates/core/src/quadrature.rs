//! Product quadrature on `S^{d-1}` in polar coordinates, normalized so the
//! weights sum to one (integration against `dσ / Vol(S^{d-1})`).
//!
//! `θ_1` uses the uniform trapezoid rule. For `j ≥ 2` the substitution
//! `x = cos θ_j` turns the measure `sin^{j-1}θ_j dθ_j` into
//! `(1-x²)^{(j-2)/2} dx`: for even `j` the weight is a polynomial and is
//! folded into Gauss–Legendre, for odd `j` the polynomial part
//! `(1-x²)^{(j-3)/2}` is folded into Gauss–Chebyshev of the second kind.
//! All axes are exact for the polynomial integrands that products of two
//! harmonics of degree `≤ K` produce, given the node counts below.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::harmonics::{tau_iter, MultiIndex, PointFactors, PolarPoint};
use crate::special_fn::jacobi_value;

/// Gauss–Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        for _ in 0..100 {
            let p = jacobi_value(n, 0.0, 0.0, x);
            let pm = jacobi_value(n - 1, 0.0, 0.0, x);
            let dp = n as f64 * (x * p - pm) / (x * x - 1.0);
            let dx = p / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let pm = jacobi_value(n - 1, 0.0, 0.0, x);
        let dp = n as f64 * (x * jacobi_value(n, 0.0, 0.0, x) - pm) / (x * x - 1.0);
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = x;
        weights[i] = w;
        nodes[n - 1 - i] = -x;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

/// Gauss–Chebyshev nodes and weights for the weight `√(1-x²)`.
pub fn gauss_chebyshev_second(n: usize) -> (Vec<f64>, Vec<f64>) {
    let h = PI / (n as f64 + 1.0);
    (1..=n)
        .map(|i| {
            let t = i as f64 * h;
            (t.cos(), h * t.sin().powi(2))
        })
        .unzip()
}

/// Nodes `θ_j` and normalized weights for one polar axis `j ≥ 2`.
fn polar_axis(j: usize, n: usize) -> Vec<(f64, f64)> {
    let (xs, ws, extra) = if j % 2 == 0 {
        let (x, w) = gauss_legendre(n);
        (x, w, (j as i32 - 2) / 2)
    } else {
        let (x, w) = gauss_chebyshev_second(n);
        (x, w, (j as i32 - 3) / 2)
    };
    let raw: Vec<(f64, f64)> = xs.iter().zip(&ws).map(|(&x, &w)| (x.acos(), w * (1.0 - x * x).powi(extra))).collect();
    let total: f64 = raw.iter().map(|(_, w)| w).sum();
    raw.into_iter().map(|(t, w)| (t, w / total)).collect()
}

/// A tensor-product rule over all polar angles.
#[derive(Debug, Clone)]
pub struct ProductQuadrature {
    d: usize,
    axes: Vec<Vec<(f64, f64)>>,
}

impl ProductQuadrature {
    /// Rule exact for products of two harmonics of degree at most
    /// `max_degree`: `2K + 2` trapezoid nodes in `θ_1` and `max(2K + 2, K + j)`
    /// nodes on axis `j`.
    pub fn for_degree(d: usize, max_degree: usize) -> Self {
        assert!(d >= 3);
        let k = max_degree;
        let m = 2 * k + 2;
        let mut axes = vec![(0..m).map(|i| (2.0 * PI * i as f64 / m as f64, 1.0 / m as f64)).collect()];
        for j in 2..d {
            axes.push(polar_axis(j, (2 * k + 2).max(k + j)));
        }
        Self { d, axes }
    }

    pub fn len(&self) -> usize {
        self.axes.iter().map(Vec::len).product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Iterates `(point, weight)` over the full tensor grid.
    pub fn nodes(&self) -> impl Iterator<Item = (PolarPoint, f64)> + '_ {
        let sizes: Vec<usize> = self.axes.iter().map(Vec::len).collect();
        (0..self.len()).map(move |mut flat| {
            let mut theta = Vec::with_capacity(self.d - 1);
            let mut w = 1.0;
            for (axis, &n) in self.axes.iter().zip(&sizes) {
                let (t, wi) = axis[flat % n];
                flat /= n;
                theta.push(t);
                w *= wi;
            }
            (PolarPoint::new(theta).expect("quadrature nodes are in range"), w)
        })
    }

    /// `Σ w f(node)`, approximating `(1/Vol) ∫ f dσ`.
    pub fn integrate<F: FnMut(&PolarPoint) -> Complex64>(&self, mut f: F) -> Complex64 {
        self.nodes().map(|(p, w)| w * f(&p)).sum()
    }
}

/// Gram matrix `(1/Vol) ∫ Y_α conj(Y_β) dσ` over all `α` of degree
/// `≤ max_degree`, by product quadrature. Rows follow degree, then
/// lexicographic index order.
pub fn harmonic_gram(d: usize, max_degree: usize) -> (Vec<MultiIndex>, DMatrix<Complex64>) {
    let indices: Vec<MultiIndex> = (0..=max_degree).flat_map(|k| tau_iter(d, k)).collect();
    let rule = ProductQuadrature::for_degree(d, max_degree);
    let n = indices.len();
    let mut re_acc = DMatrix::<f64>::zeros(n, n);
    let mut im_acc = DMatrix::<f64>::zeros(n, n);
    let chunk = 2048;
    let nodes: Vec<(PolarPoint, f64)> = rule.nodes().collect();
    for block in nodes.chunks(chunk) {
        let mut re = DMatrix::<f64>::zeros(n, block.len());
        let mut im = DMatrix::<f64>::zeros(n, block.len());
        for (c, (p, w)) in block.iter().enumerate() {
            let f = PointFactors::new(p, max_degree);
            let sw = w.sqrt();
            for (r, a) in indices.iter().enumerate() {
                let y = f.value(a) * sw;
                re[(r, c)] = y.re;
                im[(r, c)] = y.im;
            }
        }
        // (A + iB)(A - iB)^T = AAᵀ + BBᵀ + i(BAᵀ - ABᵀ)
        re_acc += &re * re.transpose() + &im * im.transpose();
        im_acc += &im * re.transpose() - &re * im.transpose();
    }
    let gram = DMatrix::from_fn(n, n, |i, j| Complex64::new(re_acc[(i, j)], im_acc[(i, j)]));
    (indices, gram)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn gauss_legendre_integrates_polynomials() {
        let (x, w) = gauss_legendre(7);
        for deg in 0..14 {
            let got: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(deg)).sum();
            let want = if deg % 2 == 0 { 2.0 / (deg as f64 + 1.0) } else { 0.0 };
            assert!((got - want).abs() < 1e-14, "deg={deg}");
        }
    }

    #[test]
    fn chebyshev_second_kind_rule() {
        // ∫ √(1-x²) x² dx = π/8
        let (x, w) = gauss_chebyshev_second(5);
        let got: f64 = x.iter().zip(&w).map(|(x, w)| w * x * x).sum();
        assert_relative_eq!(got, PI / 8.0, max_relative = 1e-14);
    }

    #[test]
    fn normalized_weights_sum_to_one() {
        for d in 3..7 {
            let q = ProductQuadrature::for_degree(d, 3);
            let total = q.integrate(|_| Complex64::new(1.0, 0.0));
            assert_relative_eq!(total.re, 1.0, max_relative = 1e-13);
        }
    }

    #[test]
    fn second_moment_of_a_coordinate() {
        // (1/Vol) ∫ ξ_1² dσ = 1/d
        for d in 3..7 {
            let q = ProductQuadrature::for_degree(d, 2);
            let m = q.integrate(|p| Complex64::new(p.to_cartesian()[0].powi(2), 0.0));
            assert_relative_eq!(m.re, 1.0 / d as f64, max_relative = 1e-13);
        }
    }
}
