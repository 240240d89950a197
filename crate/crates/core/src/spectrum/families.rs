//! Closed-form frequency families: position-independent (structural)
//! frequencies, the centred-slab family and the min-max bounds.

use std::f64::consts::PI;

use serde::Serialize;

use super::solver::{eigenvalue_count, solve_frequency, Spectrum, DEFAULT_TOL};
use super::residual;
use crate::cavity::{CavityConfig, MembranePosition};
use crate::error::{Error, Result};

/// A frequency that is a cavity frequency for every slab position, provided
/// the slab has width `delta_required`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StructuralFrequency {
    pub n: u32,
    pub k: u32,
    /// `(n alpha + k) pi / (xi_L alpha)`.
    pub omega: f64,
    /// `xi_L k / (n alpha + k)`.
    pub delta_required: f64,
}

pub fn structural_frequency(cfg: &CavityConfig, n: u32, k: u32) -> Result<StructuralFrequency> {
    if n == 0 || k == 0 {
        return Err(Error::InvalidArgument(format!(
            "structural indices must be positive, got (n, k) = ({n}, {k})"
        )));
    }
    let (xl, al) = (cfg.xi_l(), cfg.alpha());
    let (nf, kf) = (n as f64, k as f64);
    Ok(StructuralFrequency {
        n,
        k,
        omega: (nf * al + kf) * PI / (xl * al),
        delta_required: xl * kf / (nf * al + kf),
    })
}

/// All structural frequencies with `n <= n_max`, `k <= k_max`, sorted by frequency.
pub fn structural_set(cfg: &CavityConfig, n_max: u32, k_max: u32) -> Result<Vec<StructuralFrequency>> {
    if n_max == 0 || k_max == 0 {
        return Err(Error::InvalidArgument("n_max and k_max must be at least 1".into()));
    }
    let mut out = Vec::with_capacity((n_max * k_max) as usize);
    for n in 1..=n_max {
        for k in 1..=k_max {
            let sf = structural_frequency(cfg, n, k)?;
            if sf.delta_required < cfg.xi_l() {
                out.push(sf);
            }
        }
    }
    out.sort_by(|a, b| {
        a.omega
            .total_cmp(&b.omega)
            .then(a.n.cmp(&b.n))
            .then(a.k.cmp(&b.k))
    });
    Ok(out)
}

/// `count` slab positions spread uniformly over the open interval of
/// admissible left-edge fractions.
pub fn default_beta_grid(cfg: &CavityConfig, count: usize) -> Vec<f64> {
    let (_, hi) = cfg.beta_range();
    (0..count)
        .map(|i| hi * (i + 1) as f64 / (count + 1) as f64)
        .collect()
}

#[derive(Debug, Clone, Serialize)]
pub struct StructuralReport {
    pub n: u32,
    pub k: u32,
    pub omega: f64,
    pub delta0: f64,
    pub grid_points: usize,
    pub max_residual: f64,
    pub tol: f64,
    /// Positions at which `omega` matched a solved frequency.
    pub members: usize,
    /// Largest distance between `omega` and the closest solved frequency.
    pub max_member_distance: f64,
    pub pass: bool,
}

/// Checks that `sf.omega` is a root at every grid position and that the
/// solver actually returns it there.
pub fn verify_structural(
    cfg: &CavityConfig,
    sf: &StructuralFrequency,
    beta_grid: &[f64],
    tol: f64,
) -> Result<StructuralReport> {
    if (cfg.delta0() - sf.delta_required).abs() > 1e-12 * cfg.xi_l() {
        return Err(Error::WidthMismatch {
            delta0: cfg.delta0(),
            required: sf.delta_required,
            n: sf.n,
            k: sf.k,
        });
    }
    let member_tol = 1e-9 * sf.omega.max(1.0);
    let mut max_residual: f64 = 0.0;
    let mut members = 0;
    let mut max_distance: f64 = 0.0;
    for &beta in beta_grid {
        let pos = MembranePosition::from_beta(cfg, beta)?;
        max_residual = max_residual.max(residual(cfg, beta, sf.omega).abs());
        let index = eigenvalue_count(cfg, beta, sf.omega + member_tol);
        let distance = if index == 0 {
            f64::INFINITY
        } else {
            let w = solve_frequency(cfg, &pos, index, DEFAULT_TOL, Some(sf.omega))?;
            (w - sf.omega).abs()
        };
        max_distance = max_distance.max(distance);
        if distance <= member_tol {
            members += 1;
        }
    }
    Ok(StructuralReport {
        n: sf.n,
        k: sf.k,
        omega: sf.omega,
        delta0: cfg.delta0(),
        grid_points: beta_grid.len(),
        max_residual,
        tol,
        members,
        max_member_distance: max_distance,
        pass: max_residual < tol && members == beta_grid.len(),
    })
}

/// Explicit root for a centred slab of the matching width.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MidpointSolution {
    pub n: u32,
    /// `arccos[(alpha^2 - 1)/(alpha^2 + 1)]`.
    pub gamma: f64,
    /// Slab width for which `omega_n` is a frequency of the centred slab.
    pub delta_n: f64,
    pub omega_n: f64,
}

pub fn midpoint_family(xi_l: f64, alpha: f64, n_max: u32) -> Result<Vec<MidpointSolution>> {
    if !(xi_l > 0.0) || !(alpha >= 1.0) {
        return Err(Error::InvalidArgument(format!(
            "need xi_L > 0 and alpha >= 1, got {xi_l}, {alpha}"
        )));
    }
    let a2 = alpha * alpha;
    let gamma = ((a2 - 1.0) / (a2 + 1.0)).acos();
    Ok((0..=n_max)
        .map(|n| {
            let odd = (2 * n + 1) as f64 * PI;
            MidpointSolution {
                n,
                gamma,
                delta_n: xi_l * odd / (odd + 2.0 * alpha * gamma),
                omega_n: (gamma + odd / (2.0 * alpha)) / xi_l,
            }
        })
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StructuralMargin {
    pub n: u32,
    pub k: u32,
    /// `omega_nk - omega_1 - pi/(xi_L alpha)`, non-negative when the bound holds.
    pub margin: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct BoundsReport {
    pub omega1: f64,
    /// `pi/xi_L - omega_1`, non-negative when the bound holds.
    pub fundamental_margin: f64,
    pub structural: Vec<StructuralMargin>,
    pub violations: usize,
    pub pass: bool,
}

/// Min-max bounds: `omega_1 <= pi/xi_L` and every structural frequency lies
/// at least `pi/(xi_L alpha)` above `omega_1`.
pub fn spectral_bounds_check(
    cfg: &CavityConfig,
    spectrum: &Spectrum,
    structural: &[StructuralFrequency],
) -> Result<BoundsReport> {
    if spectrum.is_empty() {
        return Err(Error::InvalidArgument("spectrum is empty".into()));
    }
    let omega1 = spectrum.omega(1);
    let slack = 1e-12 * omega1.max(1.0);
    let fundamental_margin = PI / cfg.xi_l() - omega1;
    let gap = PI / (cfg.xi_l() * cfg.alpha());
    let structural: Vec<_> = structural
        .iter()
        .map(|sf| StructuralMargin {
            n: sf.n,
            k: sf.k,
            margin: sf.omega - omega1 - gap,
        })
        .collect();
    let violations = usize::from(fundamental_margin < -slack)
        + structural.iter().filter(|m| m.margin < -slack).count();
    Ok(BoundsReport {
        omega1,
        fundamental_margin,
        structural,
        violations,
        pass: violations == 0,
    })
}
