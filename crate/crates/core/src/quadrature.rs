//! Gauss-Legendre and trapezoid rules on a finite interval.

use std::f64::consts::PI;

/// Nodes and weights of an `n`-point rule, already mapped onto `[a, b]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Rule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl Rule {
    pub fn integrate<F: FnMut(f64) -> f64>(&self, mut f: F) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(x))
            .sum()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QuadratureKind {
    GaussLegendre,
    Trapezoid,
}

/// Gauss-Legendre nodes on `[-1, 1]`, ascending.
///
/// Newton iteration on the three-term recurrence from the Tricomi initial
/// guess; converges in a handful of steps for any practical `n`.
pub fn gauss_legendre_unit(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1, "need at least one node");
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    let nf = n as f64;
    for i in 0..n.div_ceil(2) {
        let theta = PI * (i as f64 + 0.75) / (nf + 0.5);
        let mut z = (1.0 - (nf - 1.0) / (8.0 * nf * nf * nf)) * theta.cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, z);
            dp = d;
            let dz = p / d;
            z -= dz;
            if dz.abs() <= 1e-16 * z.abs().max(1.0) {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, z);
        if d != 0.0 {
            dp = d;
        }
        let wi = 2.0 / ((1.0 - z * z) * dp * dp);
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = wi;
        w[n - 1 - i] = wi;
    }
    if n % 2 == 1 {
        x[n / 2] = 0.0;
    }
    (x, w)
}

fn legendre_with_derivative(n: usize, z: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = z;
    for j in 2..=n {
        let jf = j as f64;
        let p2 = ((2.0 * jf - 1.0) * z * p1 - (jf - 1.0) * p0) / jf;
        p0 = p1;
        p1 = p2;
    }
    if n == 0 {
        return (1.0, 0.0);
    }
    let d = n as f64 * (z * p1 - p0) / (z * z - 1.0);
    (p1, d)
}

pub fn gauss_legendre(n: usize, a: f64, b: f64) -> Rule {
    let (x, w) = gauss_legendre_unit(n);
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    Rule {
        nodes: x.iter().map(|&t| mid + half * t).collect(),
        weights: w.iter().map(|&v| half * v).collect(),
    }
}

/// Composite trapezoid rule with `n ≥ 2` equally spaced nodes.
pub fn trapezoid(n: usize, a: f64, b: f64) -> Rule {
    assert!(n >= 2, "trapezoid needs two nodes");
    let h = (b - a) / (n - 1) as f64;
    let nodes = (0..n).map(|i| a + h * i as f64).collect();
    let weights = (0..n)
        .map(|i| if i == 0 || i == n - 1 { 0.5 * h } else { h })
        .collect();
    Rule { nodes, weights }
}

pub fn rule(kind: QuadratureKind, n: usize, a: f64, b: f64) -> Rule {
    match kind {
        QuadratureKind::GaussLegendre => gauss_legendre(n, a, b),
        QuadratureKind::Trapezoid => trapezoid(n, a, b),
    }
}

/// `panels` equal sub-intervals, each with an `order`-point Gauss rule.
pub fn composite_gauss(order: usize, panels: usize, a: f64, b: f64) -> Rule {
    let (x, w) = gauss_legendre_unit(order);
    let h = (b - a) / panels as f64;
    let mut nodes = Vec::with_capacity(order * panels);
    let mut weights = Vec::with_capacity(order * panels);
    for p in 0..panels {
        let lo = a + h * p as f64;
        for (t, v) in x.iter().zip(&w) {
            nodes.push(lo + 0.5 * h * (t + 1.0));
            weights.push(0.5 * h * v);
        }
    }
    Rule { nodes, weights }
}
