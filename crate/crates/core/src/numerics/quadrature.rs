//! Gauss–Legendre rules, composite panels and a simple adaptive driver.

use std::f64::consts::PI;
use std::sync::OnceLock;

/// Panel order used by the composite rules.
pub const PANEL_ORDER: usize = 10;

/// An `n`-point Gauss–Legendre rule on `[-1, 1]`.
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussLegendre {
    /// Nodes by Newton iteration on the Legendre three-term recurrence.
    pub fn new(order: usize) -> Self {
        assert!(order >= 1, "Gauss–Legendre order must be positive");
        let n = order;
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let nf = n as f64;
        for i in 0..n.div_ceil(2) {
            let mut x = (PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
            let mut dp = 1.0;
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
        if n % 2 == 1 {
            nodes[n / 2] = 0.0;
        }
        Self { nodes, weights }
    }

    pub fn order(&self) -> usize {
        self.nodes.len()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn integrate<F: Fn(f64) -> f64>(&self, f: F, a: f64, b: f64) -> f64 {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(mid + half * x))
            .sum::<f64>()
            * half
    }

    /// Appends the nodes and weights of `panels` equal panels covering `[a, b]`,
    /// each weight multiplied by `scale`.
    pub fn push_composite(
        &self,
        a: f64,
        b: f64,
        panels: usize,
        scale: f64,
        points: &mut Vec<f64>,
        weights: &mut Vec<f64>,
    ) {
        if b <= a || panels == 0 {
            return;
        }
        let width = (b - a) / panels as f64;
        let half = 0.5 * width;
        for p in 0..panels {
            let mid = a + (p as f64 + 0.5) * width;
            for (&x, &w) in self.nodes.iter().zip(&self.weights) {
                points.push(mid + half * x);
                weights.push(w * half * scale);
            }
        }
    }
}

/// Shared panel rule.
pub fn panel_rule() -> &'static GaussLegendre {
    static RULE: OnceLock<GaussLegendre> = OnceLock::new();
    RULE.get_or_init(|| GaussLegendre::new(PANEL_ORDER))
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let p = if n == 0 { 1.0 } else { p1 };
    let d = n as f64 * (x * p - p0) / (x * x - 1.0);
    (p, d)
}

/// Adaptive bisection with a 10-point panel against its two halves.
///
/// Returns the estimate and whether every accepted panel met the tolerance.
pub fn integrate_adaptive<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, abs_tol: f64) -> (f64, bool) {
    let rule = panel_rule();
    let whole = rule.integrate(f, a, b);
    adaptive_step(rule, f, a, b, whole, abs_tol, 0)
}

fn adaptive_step<F: Fn(f64) -> f64>(
    rule: &GaussLegendre,
    f: &F,
    a: f64,
    b: f64,
    whole: f64,
    tol: f64,
    depth: usize,
) -> (f64, bool) {
    let m = 0.5 * (a + b);
    let left = rule.integrate(f, a, m);
    let right = rule.integrate(f, m, b);
    let refined = left + right;
    if (refined - whole).abs() <= tol || depth >= 40 {
        return (refined, (refined - whole).abs() <= tol);
    }
    let (l, lok) = adaptive_step(rule, f, a, m, left, 0.5 * tol, depth + 1);
    let (r, rok) = adaptive_step(rule, f, m, b, right, 0.5 * tol, depth + 1);
    (l + r, lok && rok)
}
