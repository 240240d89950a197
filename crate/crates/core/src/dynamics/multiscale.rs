//! Multiple-scales closed form of the field for a slowly moving slab.
//!
//! With `phi = t_N(tau) - Theta` and `t_N = ∫ w_N(q) dtau`, the field is
//!
//! ```text
//! 2 a_N b [(cos phi + eps sin phi) G_N
//!          + q' sin phi sum_{m != N} 2 Gamma_mN w_N / (w_m^2 - w_N^2) G_m]
//! ```
//!
//! with `eps = q' w_N' / (4 w_N^2)` and the slow amplitude
//! `a_N = sqrt(w_N(q(0)) / w_N(q)) exp(-∫ Gamma_NN dq)`.

use serde::Serialize;

use super::coupling::CoefficientTables;
use super::galerkin::{instantaneous_modes, InitialData};
use super::trajectory::MembraneTrajectory;
use crate::cavity::CavityConfig;
use crate::error::{Error, Result};
use crate::numerics::quadrature::integrate_adaptive;

/// Relative accuracy of the phase integral.
pub const PHASE_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MultipleScalesParams {
    pub n: usize,
    pub tau: f64,
    pub t1n: f64,
    pub alpha_n: f64,
    pub b_n0: f64,
    pub theta_n0: f64,
}

pub struct MultipleScales<'a> {
    cfg: CavityConfig,
    traj: MembraneTrajectory,
    tables: &'a CoefficientTables,
    init: InitialData,
    b0: f64,
    theta0: f64,
}

impl<'a> MultipleScales<'a> {
    pub fn new(
        cfg: &CavityConfig,
        traj: &MembraneTrajectory,
        tables: &'a CoefficientTables,
        init: InitialData,
    ) -> Result<Self> {
        if init.n == 0 || init.n > tables.size() {
            return Err(Error::InvalidArgument(format!(
                "excited mode {} outside the tables 1..={}",
                init.n,
                tables.size()
            )));
        }
        let w0 = tables.omega(init.n, traj.q(0.0));
        let (re, im) = (0.5 * init.g0, 0.5 * init.g1 / w0);
        Ok(Self {
            cfg: *cfg,
            traj: *traj,
            tables,
            init,
            b0: re.hypot(im),
            theta0: im.atan2(re),
        })
    }

    pub fn b_n0(&self) -> f64 {
        self.b0
    }

    pub fn theta_n0(&self) -> f64 {
        self.theta0
    }

    /// `t_N(tau) = ∫_0^tau w_N(q(rho)) drho` to relative accuracy `rel_tol`.
    pub fn phase_with_tol(&self, tau: f64, rel_tol: f64) -> Result<f64> {
        if tau < 0.0 {
            return Err(Error::InvalidArgument(format!("tau = {tau} must be non-negative")));
        }
        let n = self.init.n;
        if self.traj.is_static() {
            return Ok(self.tables.omega(n, self.traj.q(0.0)) * tau);
        }
        let f = |t: f64| self.tables.omega(n, self.traj.q(t));
        let scale = self.tables.omega(n, self.traj.q(0.0)) * tau;
        let (value, ok) = integrate_adaptive(&f, 0.0, tau, rel_tol * scale.max(1.0));
        if !ok {
            return Err(Error::QuadratureNotConverged {
                a: 0.0,
                b: tau,
                nodes: 0,
                tol: rel_tol,
            });
        }
        Ok(value)
    }

    pub fn phase(&self, tau: f64) -> Result<f64> {
        self.phase_with_tol(tau, PHASE_TOL)
    }

    /// Slow amplitude factor `a_N(q(tau))`.
    pub fn amplitude(&self, tau: f64) -> f64 {
        let n = self.init.n;
        let (q0, q) = (self.traj.q(0.0), self.traj.q(tau));
        let ratio = self.tables.omega(n, q0) / self.tables.omega(n, q);
        ratio.sqrt() * (-self.tables.gamma_diagonal_integral(n, q0, q)).exp()
    }

    pub fn params(&self, tau: f64) -> Result<MultipleScalesParams> {
        Ok(MultipleScalesParams {
            n: self.init.n,
            tau,
            t1n: self.phase(tau)?,
            alpha_n: self.amplitude(tau),
            b_n0: self.b0,
            theta_n0: self.theta0,
        })
    }

    /// Coefficients of the closed form in the instantaneous mode basis,
    /// modes `1..=m`. With `cross_terms` false only mode `N` is populated.
    pub fn coefficients(&self, tau: f64, m: usize, cross_terms: bool) -> Result<Vec<f64>> {
        let n = self.init.n;
        if m < n || m > self.tables.size() {
            return Err(Error::InvalidArgument(format!(
                "basis size {m} must lie in {n}..={}",
                self.tables.size()
            )));
        }
        let q = self.traj.q(tau);
        let v = self.traj.dq(tau);
        let w = self.tables.omega(n, q);
        let phi = self.phase(tau)? - self.theta0;
        let (s, c) = phi.sin_cos();
        let amp = 2.0 * self.amplitude(tau) * self.b0;
        let eps = v * self.tables.omega_dq(n, q) / (4.0 * w * w);
        let mut out = vec![0.0; m];
        out[n - 1] = amp * (c + eps * s);
        if cross_terms && v != 0.0 {
            for (k, slot) in out.iter_mut().enumerate() {
                let idx = k + 1;
                if idx == n {
                    continue;
                }
                let wm = self.tables.omega(idx, q);
                let mix = 2.0 * self.tables.gamma(idx, n, q) * w / (wm * wm - w * w);
                *slot = amp * v * mix * s;
            }
        }
        Ok(out)
    }

    fn profile(&self, xis: &[f64], tau: f64, coeffs: &[f64]) -> Result<Vec<f64>> {
        let basis = instantaneous_modes(&self.cfg, self.traj.q(tau), coeffs.len())?;
        Ok(xis
            .iter()
            .map(|&x| basis.iter().zip(coeffs).map(|(g, c)| c * g.value(x)).sum())
            .collect())
    }

    /// Leading term only, on the points `xis`.
    pub fn potential_leading(&self, xis: &[f64], tau: f64) -> Result<Vec<f64>> {
        let coeffs = self.coefficients(tau, self.init.n, false)?;
        self.profile(xis, tau, &coeffs)
    }

    /// Leading term plus the cross-mode sum over modes `1..=m`.
    pub fn potential_full(&self, xis: &[f64], tau: f64, m: usize) -> Result<Vec<f64>> {
        let coeffs = self.coefficients(tau, m, true)?;
        self.profile(xis, tau, &coeffs)
    }

    pub fn init(&self) -> InitialData {
        self.init
    }

    pub fn trajectory(&self) -> &MembraneTrajectory {
        &self.traj
    }
}
