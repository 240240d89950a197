//! First-order thin-slab approximations.

use std::f64::consts::PI;

use serde::Serialize;

use super::solver::{solve_spectrum, DEFAULT_TOL};
use crate::cavity::{CavityConfig, MembranePosition};
use crate::error::{Error, Result};

/// Frequency equation linearised in the slab width.
pub fn thin_residual(cfg: &CavityConfig, beta: f64, omega: f64) -> f64 {
    let xl = cfg.xi_l();
    let contrast = cfg.alpha().powi(2) - 1.0;
    (xl * omega).sin()
        + omega * cfg.delta0() * contrast * (xl * omega * (beta - 1.0)).sin() * (xl * omega * beta).sin()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ThinApprox {
    pub omega_na: f64,
    /// Shift from the empty-cavity frequency `n pi / xi_L`.
    pub d_n: f64,
}

pub fn approx_frequency(cfg: &CavityConfig, beta: f64, n: u32) -> ThinApprox {
    let xl = cfg.xi_l();
    let nf = n as f64;
    let contrast = cfg.alpha().powi(2) - 1.0;
    let d_n = -(nf * PI / (2.0 * xl * xl)) * cfg.delta0() * contrast * (1.0 - (2.0 * nf * PI * beta).cos());
    ThinApprox {
        omega_na: nf * PI / xl + d_n,
        d_n,
    }
}

/// `d omega_na / d q0`.
pub fn approx_frequency_derivative_q(cfg: &CavityConfig, beta: f64, n: u32) -> f64 {
    let xl = cfg.xi_l();
    let nf = n as f64;
    let contrast = cfg.alpha().powi(2) - 1.0;
    -(nf * PI / (2.0 * xl * xl)) * cfg.delta0() * contrast * 2.0 * nf * PI * (2.0 * nf * PI * beta).sin() / xl
}

/// Upper bound on the error of the linearised frequency equation,
/// `2 alpha (alpha^2 - 1) (omega delta0)^2`.
pub fn error_bound(cfg: &CavityConfig, omega: f64) -> f64 {
    let a = cfg.alpha();
    2.0 * a * (a * a - 1.0) * (omega * cfg.delta0()).powi(2)
}

/// Exact roots `(n pi / xi_L, 1 - k/n)` of the linearised equation.
pub fn explicit_thin_solutions(cfg: &CavityConfig, n: u32, k: u32) -> Result<(f64, f64)> {
    if n == 0 || k == 0 {
        return Err(Error::InvalidArgument("n and k must be positive".into()));
    }
    let ratio = k as f64 / n as f64;
    if !(ratio > cfg.delta0() / cfg.xi_l() && ratio < 1.0) {
        return Err(Error::InvalidArgument(format!(
            "k/n = {ratio} must lie in ({}, 1)",
            cfg.delta0() / cfg.xi_l()
        )));
    }
    Ok((n as f64 * PI / cfg.xi_l(), 1.0 - ratio))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ComparisonRow {
    pub n: u32,
    pub omega: f64,
    pub omega_approx: f64,
    pub error_bound: f64,
    /// `100 (omega - omega_approx) / omega`.
    pub percent: f64,
}

/// Exact against first-order frequencies for the lowest `count` modes.
pub fn comparison_table(cfg: &CavityConfig, beta: f64, count: usize) -> Result<Vec<ComparisonRow>> {
    let pos = MembranePosition::from_beta(cfg, beta)?;
    let spectrum = solve_spectrum(cfg, &pos, count, DEFAULT_TOL)?;
    Ok(spectrum
        .omegas
        .iter()
        .enumerate()
        .map(|(i, &omega)| {
            let n = i as u32 + 1;
            let approx = approx_frequency(cfg, beta, n).omega_na;
            ComparisonRow {
                n,
                omega,
                omega_approx: approx,
                error_bound: error_bound(cfg, omega),
                percent: 100.0 * (omega - approx) / omega,
            }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn table1() -> CavityConfig {
        CavityConfig::with_alpha(2.0, 0.01, 2.0).unwrap()
    }

    #[test]
    fn thin_residual_vanishes_on_explicit_solutions() {
        let vac = CavityConfig::with_alpha(2.0, 0.01, 1.0).unwrap();
        assert!(thin_residual(&vac, 0.3, 3.0 * PI / 2.0).abs() < 1e-14);

        let cfg = table1();
        let (w, b) = explicit_thin_solutions(&cfg, 5, 2).unwrap();
        assert!((w - 2.5 * PI).abs() < 1e-15);
        assert!((b - 0.6).abs() < 1e-15);
        assert!(thin_residual(&cfg, b, w).abs() < 1e-13);

        let (w, b) = explicit_thin_solutions(&cfg, 2, 1).unwrap();
        assert!((w - PI).abs() < 1e-15 && (b - 0.5).abs() < 1e-15);
        assert!(explicit_thin_solutions(&cfg, 3, 3).is_err());
    }

    #[test]
    fn table1_thin_residual_near_root() {
        // omega_na linearises the root once more, so it misses the root of the
        // linearised equation (1.5625897) by about 7e-5.
        let cfg = table1();
        assert!(thin_residual(&cfg, 0.2, 1.56266).abs() < 2e-4);
        let (lo, hi) = (1.5625, 1.5627);
        assert!(thin_residual(&cfg, 0.2, lo) * thin_residual(&cfg, 0.2, hi) < 0.0);
    }

    #[test]
    fn approximate_frequency_table1_first_row() {
        let a = approx_frequency(&table1(), 0.2, 1);
        assert!((a.omega_na - 1.56266).abs() < 5e-6);
        let at_node = approx_frequency(&table1(), 0.5, 2);
        assert_eq!(at_node.d_n, 0.0);
        assert_eq!(at_node.omega_na, PI);
        let vac = CavityConfig::with_alpha(2.0, 0.01, 1.0).unwrap();
        assert_eq!(approx_frequency(&vac, 0.37, 7).d_n, 0.0);
    }

    #[test]
    fn approx_derivative_matches_difference() {
        let cfg = table1();
        let h = 1e-6;
        for n in 1..6 {
            let b = 0.3;
            let fd = (approx_frequency(&cfg, b + h / cfg.xi_l(), n).omega_na
                - approx_frequency(&cfg, b - h / cfg.xi_l(), n).omega_na)
                / (2.0 * h);
            assert!((approx_frequency_derivative_q(&cfg, b, n) - fd).abs() < 1e-8);
        }
    }

    #[test]
    fn error_bound_values() {
        let cfg = table1();
        assert!((error_bound(&cfg, 1.56241) - 0.00293).abs() < 5e-6);
        assert!((error_bound(&cfg, 31.3999) - 1.18314).abs() < 5e-5);
        let vac = CavityConfig::with_alpha(2.0, 0.01, 1.0).unwrap();
        assert_eq!(error_bound(&vac, 10.0), 0.0);
    }

    #[test]
    fn vacuum_comparison_has_zero_percent() {
        let vac = CavityConfig::with_alpha(2.0, 0.01, 1.0).unwrap();
        let rows = comparison_table(&vac, 0.2, 10).unwrap();
        assert!(rows.iter().all(|r| r.percent.abs() < 1e-10));
    }
}
