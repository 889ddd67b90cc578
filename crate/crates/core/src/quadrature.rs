//! Gauss–Legendre rules and a globally adaptive composite integrator.
//!
//! Each panel carries the estimate `|Q(panel) - Q(left) - Q(right)|`; the
//! panel with the largest estimate is bisected until the sum of estimates
//! drops below the absolute tolerance or the panel budget is spent.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::f64::consts::PI;

/// Nodes and weights of the n-point Gauss–Legendre rule on [-1, 1].
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussLegendre {
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "Gauss-Legendre rule needs at least one node");
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let nf = n as f64;
        for i in 0..n.div_ceil(2) {
            // Tricomi's initial guess, then Newton on P_n.
            let mut z = (PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre_with_derivative(n, z);
                dp = d;
                let dz = p / d;
                z -= dz;
                if dz.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre_with_derivative(n, z);
            if d != 0.0 {
                dp = d;
            }
            let w = 2.0 / ((1.0 - z * z) * dp * dp);
            nodes[i] = -z;
            nodes[n - 1 - i] = z;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        if n % 2 == 1 {
            nodes[n / 2] = 0.0;
        }
        Self { nodes, weights }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Applies the rule to `f` on `[a, b]`.
    pub fn integrate<F: Fn(f64) -> f64>(&self, f: &F, a: f64, b: f64) -> f64 {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        let mut acc = 0.0;
        for (x, w) in self.nodes.iter().zip(&self.weights) {
            acc += w * f(mid + half * x);
        }
        acc * half
    }
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
    let (pn, pn1) = if n == 1 { (z, 1.0) } else { (p1, p0) };
    let d = n as f64 * (z * pn - pn1) / (z * z - 1.0);
    (pn, d)
}

#[derive(Debug, Clone, Copy)]
pub struct AdaptiveSettings {
    pub nodes: usize,
    pub tolerance: f64,
    pub max_panels: usize,
}

impl Default for AdaptiveSettings {
    fn default() -> Self {
        Self {
            nodes: 20,
            tolerance: 1e-10,
            max_panels: 20_000,
        }
    }
}

/// Result of an adaptive integration that did not converge.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Unconverged {
    pub estimate: f64,
    pub residual: f64,
    pub panels: usize,
}

#[derive(Debug, Clone, Copy)]
struct Panel {
    a: f64,
    b: f64,
    left: f64,
    right: f64,
    err: f64,
}

impl Panel {
    fn build<F: Fn(f64) -> f64>(rule: &GaussLegendre, f: &F, a: f64, b: f64, whole: f64) -> Self {
        let m = 0.5 * (a + b);
        let left = rule.integrate(f, a, m);
        let right = rule.integrate(f, m, b);
        Self {
            a,
            b,
            left,
            right,
            err: (whole - left - right).abs(),
        }
    }

    fn value(&self) -> f64 {
        self.left + self.right
    }
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.err
            .total_cmp(&other.err)
            .then_with(|| other.a.total_cmp(&self.a))
    }
}

/// Integrates `f` over `[a, b]`, starting from panels split at `breakpoints`
/// (points outside the open interval are ignored).
pub fn integrate_adaptive<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    breakpoints: &[f64],
    rule: &GaussLegendre,
    settings: &AdaptiveSettings,
) -> Result<f64, Unconverged> {
    let mut cuts: Vec<f64> = breakpoints
        .iter()
        .copied()
        .filter(|&p| p > a && p < b)
        .collect();
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();

    let mut edges = Vec::with_capacity(cuts.len() + 2);
    edges.push(a);
    edges.extend(cuts);
    edges.push(b);

    let mut heap = BinaryHeap::with_capacity(64);
    for w in edges.windows(2) {
        let whole = rule.integrate(f, w[0], w[1]);
        heap.push(Panel::build(rule, f, w[0], w[1], whole));
    }

    let mut total_err: f64 = heap.iter().map(|p| p.err).sum();
    while total_err > settings.tolerance {
        let worst = *heap.peek().expect("at least one panel");
        let m = 0.5 * (worst.a + worst.b);
        if heap.len() >= settings.max_panels || m <= worst.a || m >= worst.b {
            return Err(Unconverged {
                estimate: sum_panels(heap),
                residual: total_err,
                panels: settings.max_panels,
            });
        }
        heap.pop();
        heap.push(Panel::build(rule, f, worst.a, m, worst.left));
        heap.push(Panel::build(rule, f, m, worst.b, worst.right));
        total_err = heap.iter().map(|p| p.err).sum();
    }
    Ok(sum_panels(heap))
}

fn sum_panels(heap: BinaryHeap<Panel>) -> f64 {
    let mut panels = heap.into_vec();
    panels.sort_by(|p, q| p.a.total_cmp(&q.a));
    panels.iter().map(Panel::value).sum()
}
