//! Fixed composite Gauss–Legendre rules.
//!
//! The half-line rule uses geometrically graded panels near the origin and
//! uniform panels further out. Node positions do not depend on the integrand,
//! so integrals that vary smoothly in a parameter stay smooth under finite
//! differencing.

use crate::Real;

/// Gauss–Legendre nodes and weights on `[-1, 1]`.
#[derive(Debug, Clone)]
pub struct GaussLegendre<T> {
    nodes: Vec<T>,
    weights: Vec<T>,
}

impl<T: Real> GaussLegendre<T> {
    pub fn new(order: usize) -> Self {
        assert!(order >= 1, "quadrature order must be positive");
        let n = order;
        let mut nodes = vec![0.0f64; n];
        let mut weights = vec![0.0f64; n];
        for i in 0..n.div_ceil(2) {
            // Tricomi initial guess, then Newton on P_n.
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre_with_derivative(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre_with_derivative(n, x);
            if d != 0.0 {
                dp = d;
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        Self {
            nodes: nodes.into_iter().map(T::lit).collect(),
            weights: weights.into_iter().map(T::lit).collect(),
        }
    }

    pub fn order(&self) -> usize {
        self.nodes.len()
    }

    pub fn integrate(&self, a: T, b: T, mut f: impl FnMut(T) -> T) -> T {
        let half = (b - a) / T::lit(2.0);
        let mid = (a + b) / T::lit(2.0);
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(mid + half * x))
            .sum::<T>()
            * half
    }
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    if n == 0 {
        return (1.0, 0.0);
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Composite rule over `[0, upper]` with flattened absolute nodes.
#[derive(Debug, Clone)]
pub struct HalfLineRule<T> {
    nodes: Vec<T>,
    weights: Vec<T>,
}

/// Smallest graded panel edge, `2^-50`.
const FIRST_EDGE_LOG2: i32 = -50;
/// Graded panels double up to this edge.
const GRADED_TOP: f64 = 4.0;
const UNIFORM_WIDTH: f64 = 4.0;
/// Integrands here carry an `e^{-x}` factor; beyond this they are below 1e-60.
const HALF_LINE_CUTOFF: f64 = 200.0;

impl<T: Real> HalfLineRule<T> {
    pub fn new(order: usize) -> Self {
        let gl = GaussLegendre::<f64>::new(order);
        let mut edges = vec![0.0f64];
        let mut e = 2f64.powi(FIRST_EDGE_LOG2);
        while e < GRADED_TOP {
            edges.push(e);
            e *= 2.0;
        }
        let mut e = GRADED_TOP;
        while e <= HALF_LINE_CUTOFF {
            edges.push(e);
            e += UNIFORM_WIDTH;
        }
        let mut nodes = Vec::with_capacity(order * edges.len());
        let mut weights = Vec::with_capacity(order * edges.len());
        for w in edges.windows(2) {
            let (a, b) = (w[0], w[1]);
            let half = 0.5 * (b - a);
            let mid = 0.5 * (a + b);
            for (x, wt) in gl.nodes.iter().zip(&gl.weights) {
                nodes.push(T::lit(mid + half * x));
                weights.push(T::lit(half * wt));
            }
        }
        Self { nodes, weights }
    }

    pub fn nodes(&self) -> &[T] {
        &self.nodes
    }

    pub fn weights(&self) -> &[T] {
        &self.weights
    }

    pub fn integrate(&self, mut f: impl FnMut(T) -> T) -> T {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(x))
            .sum()
    }
}

/// Composite Gauss–Legendre over `[a, b]` with `panels` equal panels.
pub fn integrate_interval<T: Real>(a: T, b: T, panels: usize, f: impl Fn(T) -> T) -> T {
    let gl = GaussLegendre::<T>::new(20);
    let width = (b - a) / T::from_usize_lossy(panels);
    (0..panels)
        .map(|p| {
            let lo = a + width * T::from_usize_lossy(p);
            gl.integrate(lo, lo + width, &f)
        })
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_legendre_is_exact_for_polynomials() {
        let gl = GaussLegendre::<f64>::new(10);
        // degree 19 is integrated exactly
        let v = gl.integrate(-1.0, 1.0, |x| x.powi(18) + x.powi(19));
        assert!((v - 2.0 / 19.0).abs() < 1e-14);
        let w: f64 = gl.weights.iter().sum();
        assert!((w - 2.0).abs() < 1e-14);
    }

    #[test]
    fn half_line_moments_of_exponential() {
        let rule = HalfLineRule::<f64>::new(20);
        for n in 0..8 {
            let v = rule.integrate(|x| x.powi(n) * (-x).exp());
            let fact: f64 = (1..=n).map(f64::from).product();
            assert!((v - fact).abs() < 1e-13 * fact, "n = {n}: {v}");
        }
    }

    #[test]
    fn half_line_handles_log_kink_near_origin() {
        // ∫ ln(1+ρx) e^{-x} dx = e^{1/ρ} E1(1/ρ); at ρ = 1e6 this is ≈ 13.2383.
        let rule = HalfLineRule::<f64>::new(20);
        let coarse = HalfLineRule::<f64>::new(14);
        let rho = 1e6;
        let a = rule.integrate(|x| (rho * x).ln_1p() * (-x).exp());
        let b = coarse.integrate(|x| (rho * x).ln_1p() * (-x).exp());
        assert!((a - b).abs() < 1e-13 * a);
    }

    #[test]
    fn interval_rule_sine() {
        let v = integrate_interval(0.0f64, std::f64::consts::PI, 4, |x| x.sin());
        assert!((v - 2.0).abs() < 1e-14);
    }
}
