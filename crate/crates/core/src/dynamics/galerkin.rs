//! Galerkin coefficient equations for a moving slab:
//!
//! ```text
//! c_m'' + w_m(q)^2 c_m = -sum_n Gamma_mn(q) (2 q' c_n' + q'' c_n)
//! ```
//!
//! in the instantaneous orthonormal mode basis.

use serde::{Deserialize, Serialize};

use super::coupling::CoefficientTables;
use super::trajectory::MembraneTrajectory;
use crate::cavity::{CavityConfig, MembranePosition};
use crate::error::{Error, Result};
use crate::modes::{modes, ModeSolution};
use crate::numerics::ode::IntegrationStats;
use crate::numerics::{Dopri5, OdeSystem};

/// Only mode `n` is excited at `tau = 0`: `c_n(0) = g0`, `c_n'(0) = g1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InitialData {
    pub n: usize,
    pub g0: f64,
    pub g1: f64,
}

impl InitialData {
    /// Unit amplitude in the lowest mode, at rest.
    pub fn ground_state() -> Self {
        Self { n: 1, g0: 1.0, g1: 0.0 }
    }
}

/// Coefficients of the tracked modes at one time.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FieldState {
    pub tau: f64,
    pub q: f64,
    pub c: Vec<f64>,
    pub cdot: Vec<f64>,
}

impl FieldState {
    /// Weighted norm of the field, `(sum c_n^2)^(1/2)` by orthonormality.
    pub fn norm(&self) -> f64 {
        self.c.iter().map(|c| c * c).sum::<f64>().sqrt()
    }
}

#[derive(Debug, Clone)]
pub struct FieldSeries {
    pub states: Vec<FieldState>,
    /// Coefficients of every mode in the series, not only the tracked ones.
    pub series: Vec<Vec<f64>>,
    pub stats: IntegrationStats,
}

struct CoefficientSystem<'a> {
    traj: &'a MembraneTrajectory,
    tables: &'a CoefficientTables,
    m: usize,
}

impl OdeSystem for CoefficientSystem<'_> {
    fn dim(&self) -> usize {
        2 * self.m
    }

    fn rhs(&self, t: f64, y: &[f64], dydt: &mut [f64]) {
        let m = self.m;
        let (c, cd) = y.split_at(m);
        let q = self.traj.q(t);
        let (v, a) = (self.traj.dq(t), self.traj.ddq(t));
        dydt[..m].copy_from_slice(cd);
        for i in 0..m {
            let w = self.tables.omega(i + 1, q);
            let mut acc = -w * w * c[i];
            if v != 0.0 || a != 0.0 {
                for j in 0..m {
                    acc -= self.tables.gamma(i + 1, j + 1, q) * (2.0 * v * cd[j] + a * c[j]);
                }
            }
            dydt[m + i] = acc;
        }
    }
}

/// Integrates every mode held in `tables` and reports the first `m_track`
/// coefficients at each of `times` (sorted, starting at or after 0).
pub fn integrate_modes(
    cfg: &CavityConfig,
    traj: &MembraneTrajectory,
    tables: &CoefficientTables,
    init: InitialData,
    m_track: usize,
    times: &[f64],
    solver: &Dopri5,
) -> Result<FieldSeries> {
    let m = tables.size();
    if m_track == 0 || m_track > m {
        return Err(Error::InvalidArgument(format!(
            "tracked modes ({m_track}) must lie in 1..={m}"
        )));
    }
    if init.n == 0 || init.n > m {
        return Err(Error::InvalidArgument(format!(
            "excited mode {} outside the series 1..={m}",
            init.n
        )));
    }
    traj.check(cfg)?;
    let mut y0 = vec![0.0; 2 * m];
    y0[init.n - 1] = init.g0;
    y0[m + init.n - 1] = init.g1;
    let sys = CoefficientSystem { traj, tables, m };
    let (ys, stats) = solver.solve(&sys, 0.0, &y0, times)?;
    let states = times
        .iter()
        .zip(&ys)
        .map(|(&tau, y)| FieldState {
            tau,
            q: traj.q(tau),
            c: y[..m_track].to_vec(),
            cdot: y[m..m + m_track].to_vec(),
        })
        .collect();
    Ok(FieldSeries {
        states,
        series: ys.into_iter().map(|y| y[..m].to_vec()).collect(),
        stats,
    })
}

/// Instantaneous modes at the slab position of one state.
pub fn instantaneous_modes(cfg: &CavityConfig, q: f64, count: usize) -> Result<Vec<ModeSolution>> {
    let pos = MembranePosition::from_q0(cfg, q)?;
    modes(cfg, &pos, count)
}

/// `sum_n c_n G_n(xi, q(tau))` at each of `xis`.
pub fn reconstruct_profile(cfg: &CavityConfig, state: &FieldState, xis: &[f64]) -> Result<Vec<f64>> {
    let basis = instantaneous_modes(cfg, state.q, state.c.len())?;
    Ok(xis
        .iter()
        .map(|&x| basis.iter().zip(&state.c).map(|(g, c)| c * g.value(x)).sum())
        .collect())
}

pub fn reconstruct_potential(cfg: &CavityConfig, state: &FieldState, xi: f64) -> Result<f64> {
    Ok(reconstruct_profile(cfg, state, &[xi])?[0])
}
