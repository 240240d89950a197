//! Field dynamics for a prescribed slab trajectory: coupling matrices, the
//! Galerkin coefficient equations, the multiple-scales closed form and the
//! norms comparing them.

mod coupling;
mod diagnostics;
mod galerkin;
mod multiscale;
mod trajectory;

pub use coupling::{
    coupling_matrices, coupling_matrices_with, CoefficientTables, CouplingMatrices,
    FrequencyModel, MAX_TABLE_KNOTS, TABLE_KNOTS, TABLE_TOLERANCE,
};
pub use diagnostics::{diagnostics, diagnostics_quadrature, Diagnostics};
pub use galerkin::{
    instantaneous_modes, integrate_modes, reconstruct_potential, reconstruct_profile,
    FieldSeries, FieldState, InitialData,
};
pub use multiscale::{MultipleScales, MultipleScalesParams, PHASE_TOL};
pub use trajectory::{
    default_trajectory, MembraneTrajectory, TrajectoryLaw, ADMISSIBLE_RATE,
};

use serde::{Deserialize, Serialize};

use crate::cavity::CavityConfig;
use crate::error::Result;
use crate::numerics::Dopri5;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimulationSettings {
    /// Modes kept in the reported field.
    pub m_track: usize,
    /// Modes integrated and coupled in the coefficient equations.
    pub m_series: usize,
    pub model: FrequencyModel,
    pub init: InitialData,
    pub rtol: f64,
    pub atol: f64,
}

impl Default for SimulationSettings {
    fn default() -> Self {
        Self {
            m_track: 4,
            m_series: 10,
            model: FrequencyModel::Exact,
            init: InitialData::ground_state(),
            rtol: 1e-9,
            atol: 1e-12,
        }
    }
}

/// Precomputed tables for one cavity, trajectory and settings.
pub struct Simulation {
    pub cfg: CavityConfig,
    pub traj: MembraneTrajectory,
    pub settings: SimulationSettings,
    pub tables: CoefficientTables,
    /// Admissibility warnings for the trajectory.
    pub warnings: Vec<String>,
}

pub struct SimulationRun {
    pub series: FieldSeries,
    pub diagnostics: Vec<Diagnostics>,
}

impl Simulation {
    pub fn new(cfg: &CavityConfig, traj: &MembraneTrajectory, settings: SimulationSettings) -> Result<Self> {
        let warnings = traj.check(cfg)?;
        let size = settings.m_series.max(settings.m_track);
        let tables = CoefficientTables::build(cfg, traj, size, settings.model)?;
        Ok(Self {
            cfg: *cfg,
            traj: *traj,
            settings,
            tables,
            warnings,
        })
    }

    pub fn multiple_scales(&self) -> Result<MultipleScales<'_>> {
        MultipleScales::new(&self.cfg, &self.traj, &self.tables, self.settings.init)
    }

    /// Integrates to the largest of `times` and reports states and norms there.
    pub fn run(&self, times: &[f64]) -> Result<SimulationRun> {
        let solver = Dopri5::with_tolerances(self.settings.rtol, self.settings.atol);
        let series = integrate_modes(
            &self.cfg,
            &self.traj,
            &self.tables,
            self.settings.init,
            self.settings.m_track,
            times,
            &solver,
        )?;
        let ms = self.multiple_scales()?;
        let diagnostics = series
            .states
            .iter()
            .map(|s| diagnostics(&ms, s))
            .collect::<Result<Vec<_>>>()?;
        Ok(SimulationRun { series, diagnostics })
    }
}
