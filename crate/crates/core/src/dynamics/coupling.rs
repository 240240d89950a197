//! Mode-coupling matrices and their interpolation tables along a trajectory.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::trajectory::MembraneTrajectory;
use crate::cavity::{CavityConfig, MembranePosition};
use crate::error::{Error, Result};
use crate::modes::{
    default_q_step, integrate_converged, mode_derivative_q_from, ModeSolution, QuadratureSpec,
};
use crate::numerics::CubicSpline;
use crate::spectrum::{
    approx_frequency, approx_frequency_derivative_q, frequency_derivative_q, solve_spectrum,
    DEFAULT_TOL,
};

/// Coupling integrals at one slab position.
///
/// `omega_q[m][n] = (G_m, dG_n/dq)`, `theta[m][n] = ∫ 4 pi chi G_m dG_n/dxi`
/// and `gamma = omega_q + theta`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CouplingMatrices {
    pub m: usize,
    pub pos: MembranePosition,
    pub omega: Vec<f64>,
    pub omega_q: Vec<Vec<f64>>,
    pub theta: Vec<Vec<f64>>,
    pub gamma: Vec<Vec<f64>>,
}

impl CouplingMatrices {
    /// `max |Gamma + Gamma^T|`.
    pub fn antisymmetry_defect(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..self.m {
            for j in 0..self.m {
                worst = worst.max((self.gamma[i][j] + self.gamma[j][i]).abs());
            }
        }
        worst
    }
}

pub fn coupling_matrices(cfg: &CavityConfig, pos: &MembranePosition, m: usize) -> Result<CouplingMatrices> {
    coupling_matrices_with(cfg, pos, m, default_q_step(cfg), &QuadratureSpec::default())
}

pub fn coupling_matrices_with(
    cfg: &CavityConfig,
    pos: &MembranePosition,
    m: usize,
    h: f64,
    spec: &QuadratureSpec,
) -> Result<CouplingMatrices> {
    if m == 0 {
        return Err(Error::InvalidArgument("truncation size must be positive".into()));
    }
    let spectrum = solve_spectrum(cfg, pos, m, DEFAULT_TOL)?;
    let modes = spectrum
        .omegas
        .iter()
        .enumerate()
        .map(|(i, &w)| ModeSolution::from_omega(cfg, pos, i + 1, w, spec))
        .collect::<Result<Vec<_>>>()?;
    let dq = modes
        .iter()
        .map(|md| mode_derivative_q_from(cfg, pos, md.n, md.omega, h, spec))
        .collect::<Result<Vec<_>>>()?;

    let contrast = cfg.alpha().powi(2) - 1.0;
    let eps_in = cfg.alpha().powi(2);
    let wavenumber = spectrum.omegas[m - 1];
    let values = integrate_converged(cfg, pos, wavenumber, spec, |grid| {
        let mut omega_q = vec![0.0; m * m];
        let mut theta = vec![0.0; m * m];
        let mut g_norm = vec![0.0; m];
        let mut dxi_norm = vec![0.0; m];
        let mut g = vec![0.0; m];
        let mut gq = vec![0.0; m];
        let mut gx = vec![0.0; m];
        for (&x, &w) in grid.points().iter().zip(grid.weights()) {
            for k in 0..m {
                g[k] = modes[k].value(x);
                gq[k] = dq[k].value(x);
                gx[k] = modes[k].derivative(x);
                g_norm[k] += w * g[k] * g[k];
                dxi_norm[k] += w * gx[k] * gx[k];
            }
            // Weights carry eps; inside the slab 4 pi chi = eps - 1.
            let w_chi = if cfg.susceptibility(pos, x) > 0.0 {
                w * contrast / eps_in
            } else {
                0.0
            };
            for i in 0..m {
                for j in 0..m {
                    omega_q[i * m + j] += w * g[i] * gq[j];
                    if w_chi != 0.0 {
                        theta[i * m + j] += w_chi * g[i] * gx[j];
                    }
                }
            }
        }
        let scale = g_norm.iter().fold(0.0, |a: f64, &b| a.max(b)).sqrt()
            * dxi_norm.iter().fold(0.0, |a: f64, &b| a.max(b)).sqrt();
        omega_q.extend(theta);
        (omega_q, scale)
    })?;
    let unpack = |offset: usize| -> Vec<Vec<f64>> {
        (0..m)
            .map(|i| values[offset + i * m..offset + (i + 1) * m].to_vec())
            .collect()
    };
    let omega_q = unpack(0);
    let theta = unpack(m * m);
    let gamma = omega_q
        .iter()
        .zip(&theta)
        .map(|(a, b)| a.iter().zip(b).map(|(x, y)| x + y).collect())
        .collect();
    Ok(CouplingMatrices {
        m,
        pos: *pos,
        omega: spectrum.omegas,
        omega_q,
        theta,
        gamma,
    })
}

/// Which frequencies drive the coefficient equations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FrequencyModel {
    /// Roots of the exact frequency equation.
    #[default]
    Exact,
    /// First-order thin-slab frequencies `n pi / xi_L + d_n`.
    FirstOrderThin,
}

impl FrequencyModel {
    pub fn omega(&self, cfg: &CavityConfig, pos: &MembranePosition, exact: f64, n: usize) -> f64 {
        match self {
            Self::Exact => exact,
            Self::FirstOrderThin => approx_frequency(cfg, pos.beta(), n as u32).omega_na,
        }
    }

    pub fn omega_dq(&self, cfg: &CavityConfig, pos: &MembranePosition, exact: f64, n: usize) -> f64 {
        match self {
            Self::Exact => frequency_derivative_q(cfg, pos.beta(), exact),
            Self::FirstOrderThin => approx_frequency_derivative_q(cfg, pos.beta(), n as u32),
        }
    }
}

/// Knots per coefficient table.
pub const TABLE_KNOTS: usize = 201;
/// Interpolation error allowed against a table with twice the knots.
pub const TABLE_TOLERANCE: f64 = 1e-8;
/// Knot count beyond which a table that still fails validation is rejected.
pub const MAX_TABLE_KNOTS: usize = 3201;

#[derive(Debug, Clone)]
enum Table {
    Constant { value: f64, slope: f64 },
    Spline(CubicSpline),
}

impl Table {
    fn eval(&self, q: f64) -> f64 {
        match self {
            Self::Constant { value, .. } => *value,
            Self::Spline(s) => s.eval(q),
        }
    }

    fn derivative(&self, q: f64) -> f64 {
        match self {
            Self::Constant { slope, .. } => *slope,
            Self::Spline(s) => s.derivative(q),
        }
    }

    fn integral(&self, a: f64, b: f64) -> f64 {
        match self {
            Self::Constant { value, .. } => value * (b - a),
            Self::Spline(s) => s.integral(a, b),
        }
    }
}

/// Frequencies and couplings of the lowest modes, interpolated in `q`
/// across the range a trajectory sweeps.
///
/// Tables start with [`TABLE_KNOTS`] knots and are doubled until splines
/// through them match a grid of twice the resolution to [`TABLE_TOLERANCE`].
#[derive(Debug, Clone)]
pub struct CoefficientTables {
    m: usize,
    model: FrequencyModel,
    range: (f64, f64),
    knots: usize,
    omega: Vec<Table>,
    gamma: Vec<Table>,
    /// Largest interpolation error seen against the doubled grid.
    pub validation_error: f64,
}

struct Sample {
    omega: Vec<f64>,
    omega_dq: Vec<f64>,
    gamma: Vec<f64>,
}

fn sample(cfg: &CavityConfig, q: f64, m: usize, model: FrequencyModel) -> Result<Sample> {
    let pos = MembranePosition::from_q0(cfg, q)?;
    let c = coupling_matrices(cfg, &pos, m)?;
    Ok(Sample {
        omega: (0..m).map(|i| model.omega(cfg, &pos, c.omega[i], i + 1)).collect(),
        omega_dq: (0..m).map(|i| model.omega_dq(cfg, &pos, c.omega[i], i + 1)).collect(),
        gamma: c.gamma.into_iter().flatten().collect(),
    })
}

impl CoefficientTables {
    /// Builds tables for the lowest `m` modes over the trajectory's range and
    /// validates them against a grid with twice the resolution.
    pub fn build(
        cfg: &CavityConfig,
        traj: &MembraneTrajectory,
        m: usize,
        model: FrequencyModel,
    ) -> Result<Self> {
        if m == 0 {
            return Err(Error::InvalidArgument("table size must be positive".into()));
        }
        traj.check(cfg)?;
        let range = traj.range();
        if traj.is_static() || range.1 <= range.0 {
            let s = sample(cfg, range.0, m, model)?;
            return Ok(Self {
                m,
                model,
                range,
                omega: s
                    .omega
                    .iter()
                    .zip(&s.omega_dq)
                    .map(|(&value, &slope)| Table::Constant { value, slope })
                    .collect(),
                gamma: s
                    .gamma
                    .iter()
                    .map(|&value| Table::Constant { value, slope: 0.0 })
                    .collect(),
                knots: 1,
                validation_error: 0.0,
            });
        }

        let point = |i: usize, count: usize| {
            if i == count - 1 {
                range.1
            } else {
                range.0 + i as f64 * (range.1 - range.0) / (count - 1) as f64
            }
        };
        let mut knots = TABLE_KNOTS;
        let mut samples = (0..2 * knots - 1)
            .into_par_iter()
            .map(|i| sample(cfg, point(i, 2 * knots - 1), m, model))
            .collect::<Result<Vec<_>>>()?;
        loop {
            let fine = samples.len();
            let build = |get: &dyn Fn(&Sample) -> f64| -> Result<(Table, f64)> {
                let coarse: Vec<f64> = samples.iter().step_by(2).map(get).collect();
                let spline = CubicSpline::uniform(range.0, range.1, coarse)?;
                let mut worst: f64 = 0.0;
                for i in (1..fine).step_by(2) {
                    let v = get(&samples[i]);
                    let err = (spline.eval(point(i, fine)) - v).abs() / v.abs().max(1.0);
                    worst = worst.max(err);
                }
                Ok((Table::Spline(spline), worst))
            };

            let mut validation_error: f64 = 0.0;
            let mut worst = String::new();
            let mut omega = Vec::with_capacity(m);
            for k in 0..m {
                let (t, e) = build(&|s: &Sample| s.omega[k])?;
                if e > validation_error {
                    validation_error = e;
                    worst = format!("omega_{}", k + 1);
                }
                omega.push(t);
            }
            let mut gamma = Vec::with_capacity(m * m);
            for k in 0..m * m {
                let (t, e) = build(&|s: &Sample| s.gamma[k])?;
                if e > validation_error {
                    validation_error = e;
                    worst = format!("Gamma_{},{}", k / m + 1, k % m + 1);
                }
                gamma.push(t);
            }
            if validation_error <= TABLE_TOLERANCE {
                return Ok(Self {
                    m,
                    model,
                    range,
                    knots,
                    omega,
                    gamma,
                    validation_error,
                });
            }
            if fine > MAX_TABLE_KNOTS {
                return Err(Error::TableValidation(format!(
                    "{worst} interpolation on {knots} knots differs from the doubled grid by {validation_error:.3e}"
                )));
            }
            // Refine: the validation grid becomes the table grid.
            knots = fine;
            let next = 2 * fine - 1;
            let odd = (0..fine - 1)
                .into_par_iter()
                .map(|i| sample(cfg, point(2 * i + 1, next), m, model))
                .collect::<Result<Vec<_>>>()?;
            let mut merged = Vec::with_capacity(next);
            for (even, extra) in samples.into_iter().zip(odd.into_iter().map(Some).chain([None])) {
                merged.push(even);
                merged.extend(extra);
            }
            samples = merged;
        }
    }

    pub fn size(&self) -> usize {
        self.m
    }

    /// Knots per table; 1 for a slab at rest.
    pub fn knots(&self) -> usize {
        self.knots
    }

    pub fn model(&self) -> FrequencyModel {
        self.model
    }

    pub fn range(&self) -> (f64, f64) {
        self.range
    }

    /// `omega_n(q)`, 1-based.
    pub fn omega(&self, n: usize, q: f64) -> f64 {
        self.omega[n - 1].eval(q)
    }

    pub fn omega_dq(&self, n: usize, q: f64) -> f64 {
        self.omega[n - 1].derivative(q)
    }

    /// `Gamma_mn(q)`, 1-based.
    pub fn gamma(&self, m: usize, n: usize, q: f64) -> f64 {
        self.gamma[(m - 1) * self.m + (n - 1)].eval(q)
    }

    /// `∫_a^b Gamma_nn(y) dy`.
    pub fn gamma_diagonal_integral(&self, n: usize, a: f64, b: f64) -> f64 {
        self.gamma[(n - 1) * self.m + (n - 1)].integral(a, b)
    }
}
