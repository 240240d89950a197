//! Norms comparing the Galerkin field with the multiple-scales closed form.

use serde::Serialize;

use super::galerkin::{instantaneous_modes, FieldState};
use super::multiscale::MultipleScales;
use crate::cavity::{CavityConfig, MembranePosition};
use crate::error::Result;
use crate::modes::{integrate_converged, QuadratureSpec};

/// `a`: norm of the Galerkin field, `b`: norm of the leading closed-form
/// term, `d`: their difference as a percentage of `a`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Diagnostics {
    pub tau: f64,
    pub a: f64,
    pub b: f64,
    pub d: f64,
}

/// Norms evaluated in the instantaneous mode basis.
pub fn diagnostics(ms: &MultipleScales, state: &FieldState) -> Result<Diagnostics> {
    let m = state.c.len().max(ms.init().n);
    let closed = ms.coefficients(state.tau, m, false)?;
    let a = state.norm();
    let b = closed.iter().map(|c| c * c).sum::<f64>().sqrt();
    let diff = (0..m)
        .map(|i| state.c.get(i).copied().unwrap_or(0.0) - closed[i])
        .map(|x| x * x)
        .sum::<f64>()
        .sqrt();
    Ok(Diagnostics {
        tau: state.tau,
        a,
        b,
        d: 100.0 * diff / a,
    })
}

/// The same norms by quadrature of the reconstructed profiles.
pub fn diagnostics_quadrature(
    cfg: &CavityConfig,
    ms: &MultipleScales,
    state: &FieldState,
) -> Result<Diagnostics> {
    let m = state.c.len().max(ms.init().n);
    let closed = ms.coefficients(state.tau, m, false)?;
    let basis = instantaneous_modes(cfg, state.q, m)?;
    let pos = MembranePosition::from_q0(cfg, state.q)?;
    let wavenumber = basis[m - 1].omega;
    let values = integrate_converged(cfg, &pos, wavenumber, &QuadratureSpec::default(), |grid| {
        let (mut aa, mut bb, mut dd) = (0.0, 0.0, 0.0);
        for (&x, &w) in grid.points().iter().zip(grid.weights()) {
            let g: Vec<f64> = basis.iter().map(|md| md.value(x)).collect();
            let u: f64 = state.c.iter().zip(&g).map(|(c, g)| c * g).sum();
            let v: f64 = closed.iter().zip(&g).map(|(c, g)| c * g).sum();
            aa += w * u * u;
            bb += w * v * v;
            dd += w * (u - v) * (u - v);
        }
        (vec![aa, bb, dd], aa.max(bb))
    })?;
    let a = values[0].sqrt();
    Ok(Diagnostics {
        tau: state.tau,
        a,
        b: values[1].sqrt(),
        d: 100.0 * values[2].max(0.0).sqrt() / a,
    })
}
