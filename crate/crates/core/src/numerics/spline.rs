//! Not-a-knot cubic splines on uniform grids.

use crate::error::{Error, Result};

/// Cubic interpolant through `(x0 + i h, y_i)` with not-a-knot end conditions.
#[derive(Debug, Clone)]
pub struct CubicSpline {
    x0: f64,
    h: f64,
    y: Vec<f64>,
    /// Second derivatives at the knots.
    m: Vec<f64>,
}

impl CubicSpline {
    pub fn uniform(x0: f64, x1: f64, y: Vec<f64>) -> Result<Self> {
        let n = y.len();
        if n < 4 {
            return Err(Error::InvalidArgument(format!(
                "cubic spline needs at least 4 knots, got {n}"
            )));
        }
        if !(x1 > x0) {
            return Err(Error::InvalidArgument(format!(
                "spline interval [{x0}, {x1}] is empty"
            )));
        }
        let h = (x1 - x0) / (n - 1) as f64;
        let m = second_derivatives(&y, h);
        Ok(Self { x0, h, y, m })
    }

    pub fn x_min(&self) -> f64 {
        self.x0
    }

    pub fn x_max(&self) -> f64 {
        self.x0 + self.h * (self.y.len() - 1) as f64
    }

    pub fn knots(&self) -> usize {
        self.y.len()
    }

    fn locate(&self, x: f64) -> (usize, f64) {
        let last = self.y.len() - 2;
        let s = (x - self.x0) / self.h;
        let i = if s <= 0.0 {
            0
        } else {
            (s.floor() as usize).min(last)
        };
        (i, x - (self.x0 + i as f64 * self.h))
    }

    pub fn eval(&self, x: f64) -> f64 {
        let (i, t) = self.locate(x);
        let h = self.h;
        let (y0, y1, m0, m1) = (self.y[i], self.y[i + 1], self.m[i], self.m[i + 1]);
        let b = (y1 - y0) / h - h * (2.0 * m0 + m1) / 6.0;
        y0 + t * (b + t * (0.5 * m0 + t * (m1 - m0) / (6.0 * h)))
    }

    pub fn derivative(&self, x: f64) -> f64 {
        let (i, t) = self.locate(x);
        let h = self.h;
        let (y0, y1, m0, m1) = (self.y[i], self.y[i + 1], self.m[i], self.m[i + 1]);
        let b = (y1 - y0) / h - h * (2.0 * m0 + m1) / 6.0;
        b + t * (m0 + 0.5 * t * (m1 - m0) / h)
    }

    /// Antiderivative measured from the first knot.
    fn primitive(&self, x: f64) -> f64 {
        let (i, t) = self.locate(x);
        let h = self.h;
        let mut acc = 0.0;
        for j in 0..i {
            acc += 0.5 * h * (self.y[j] + self.y[j + 1]) - h.powi(3) * (self.m[j] + self.m[j + 1]) / 24.0;
        }
        let (y0, y1, m0, m1) = (self.y[i], self.y[i + 1], self.m[i], self.m[i + 1]);
        let b = (y1 - y0) / h - h * (2.0 * m0 + m1) / 6.0;
        acc + t * (y0 + t * (0.5 * b + t * (m0 / 6.0 + t * (m1 - m0) / (24.0 * h))))
    }

    /// Exact integral of the interpolant over `[a, b]`.
    pub fn integral(&self, a: f64, b: f64) -> f64 {
        self.primitive(b) - self.primitive(a)
    }
}

fn second_derivatives(y: &[f64], h: f64) -> Vec<f64> {
    let n = y.len();
    let rhs: Vec<f64> = (1..n - 1)
        .map(|i| 6.0 * (y[i - 1] - 2.0 * y[i] + y[i + 1]) / (h * h))
        .collect();
    let k = n - 2;
    let mut m = vec![0.0; n];
    if k == 2 {
        // Four knots: the interpolant is the single cubic through all points.
        m[1] = rhs[0] / 6.0;
        m[2] = rhs[1] / 6.0;
    } else {
        // Interior unknowns m[1..n-1]; the end conditions m0 = 2 m1 - m2 and
        // m_{n-1} = 2 m_{n-2} - m_{n-3} fold into the first and last rows.
        let mut diag = vec![4.0; k];
        let mut upper = vec![1.0; k];
        let lower = vec![1.0; k];
        diag[0] = 6.0;
        upper[0] = 0.0;
        diag[k - 1] = 6.0;
        let mut lower = lower;
        lower[k - 1] = 0.0;
        let mut d = rhs.clone();
        for i in 1..k {
            let w = lower[i] / diag[i - 1];
            diag[i] -= w * upper[i - 1];
            d[i] -= w * d[i - 1];
        }
        let mut x = vec![0.0; k];
        x[k - 1] = d[k - 1] / diag[k - 1];
        for i in (0..k - 1).rev() {
            x[i] = (d[i] - upper[i] * x[i + 1]) / diag[i];
        }
        m[1..n - 1].copy_from_slice(&x);
    }
    m[0] = 2.0 * m[1] - m[2];
    m[n - 1] = 2.0 * m[n - 2] - m[n - 3];
    m
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, n: usize) -> CubicSpline {
        let h = (b - a) / (n - 1) as f64;
        let y = (0..n).map(|i| f(a + i as f64 * h)).collect();
        CubicSpline::uniform(a, b, y).unwrap()
    }

    #[test]
    fn reproduces_cubics_exactly() {
        let f = |x: f64| 2.0 - x + 0.5 * x * x - 0.25 * x.powi(3);
        let s = sample(f, -1.0, 2.0, 9);
        for i in 0..=50 {
            let x = -1.0 + 3.0 * i as f64 / 50.0;
            assert!((s.eval(x) - f(x)).abs() < 1e-12);
            let df = -1.0 + x - 0.75 * x * x;
            assert!((s.derivative(x) - df).abs() < 1e-11);
        }
        let exact = |x: f64| 2.0 * x - 0.5 * x * x + x.powi(3) / 6.0 - x.powi(4) / 16.0;
        assert!((s.integral(-0.3, 1.7) - (exact(1.7) - exact(-0.3))).abs() < 1e-12);
    }

    #[test]
    fn fourth_order_convergence_including_ends() {
        let err = |n: usize| {
            let s = sample(f64::sin, 0.0, 2.0, n);
            (0..=400)
                .map(|i| {
                    let x = 2.0 * i as f64 / 400.0;
                    (s.eval(x) - x.sin()).abs()
                })
                .fold(0.0, f64::max)
        };
        let e1 = err(21);
        let e2 = err(41);
        assert!(e1 / e2 > 12.0, "ratio {}", e1 / e2);
    }

    #[test]
    fn rejects_short_tables() {
        assert!(CubicSpline::uniform(0.0, 1.0, vec![0.0, 1.0, 2.0]).is_err());
    }
}
