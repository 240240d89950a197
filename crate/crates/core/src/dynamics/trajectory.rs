//! Prescribed slab trajectories `q(tau)`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::cavity::CavityConfig;
use crate::error::{Error, Result};

/// Velocity and acceleration above which the first-order field equation is
/// no longer trustworthy.
pub const ADMISSIBLE_RATE: f64 = 0.01;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TrajectoryLaw {
    /// Slab at rest at `q0`.
    Static { q0: f64 },
    /// `q(tau) = center - amplitude cos(frequency tau)`, at rest at `tau = 0`.
    Cosine {
        center: f64,
        amplitude: f64,
        frequency: f64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MembraneTrajectory {
    pub law: TrajectoryLaw,
    /// Ratio of the slab's oscillation frequency to the reference field
    /// frequency; descriptive only.
    pub eps_pert: f64,
}

impl MembraneTrajectory {
    pub fn stationary(q0: f64) -> Self {
        Self {
            law: TrajectoryLaw::Static { q0 },
            eps_pert: 0.0,
        }
    }

    pub fn cosine(center: f64, amplitude: f64, frequency: f64) -> Self {
        Self {
            law: TrajectoryLaw::Cosine {
                center,
                amplitude,
                frequency,
            },
            eps_pert: frequency.abs() / (2.0 * PI),
        }
    }

    pub fn q(&self, tau: f64) -> f64 {
        match self.law {
            TrajectoryLaw::Static { q0 } => q0,
            TrajectoryLaw::Cosine {
                center,
                amplitude,
                frequency,
            } => center - amplitude * (frequency * tau).cos(),
        }
    }

    pub fn dq(&self, tau: f64) -> f64 {
        match self.law {
            TrajectoryLaw::Static { .. } => 0.0,
            TrajectoryLaw::Cosine {
                amplitude,
                frequency,
                ..
            } => amplitude * frequency * (frequency * tau).sin(),
        }
    }

    pub fn ddq(&self, tau: f64) -> f64 {
        match self.law {
            TrajectoryLaw::Static { .. } => 0.0,
            TrajectoryLaw::Cosine {
                amplitude,
                frequency,
                ..
            } => amplitude * frequency * frequency * (frequency * tau).cos(),
        }
    }

    pub fn is_static(&self) -> bool {
        match self.law {
            TrajectoryLaw::Static { .. } => true,
            TrajectoryLaw::Cosine {
                amplitude,
                frequency,
                ..
            } => amplitude == 0.0 || frequency == 0.0,
        }
    }

    /// `[q_min, q_max]` swept over all `tau`.
    pub fn range(&self) -> (f64, f64) {
        match self.law {
            TrajectoryLaw::Static { q0 } => (q0, q0),
            TrajectoryLaw::Cosine {
                center, amplitude, ..
            } => {
                let a = if self.is_static() { 0.0 } else { amplitude.abs() };
                (center - a, center + a)
            }
        }
    }

    pub fn period(&self) -> Option<f64> {
        match self.law {
            TrajectoryLaw::Cosine { frequency, .. } if !self.is_static() => {
                Some(2.0 * PI / frequency.abs())
            }
            _ => None,
        }
    }

    pub fn sup_velocity(&self) -> f64 {
        match self.law {
            TrajectoryLaw::Static { .. } => 0.0,
            TrajectoryLaw::Cosine {
                amplitude,
                frequency,
                ..
            } => (amplitude * frequency).abs(),
        }
    }

    pub fn sup_acceleration(&self) -> f64 {
        match self.law {
            TrajectoryLaw::Static { .. } => 0.0,
            TrajectoryLaw::Cosine {
                amplitude,
                frequency,
                ..
            } => (amplitude * frequency * frequency).abs(),
        }
    }

    /// Fails if the slab would leave the cavity; otherwise returns warnings
    /// for motion too fast for the first-order field equation.
    pub fn check(&self, cfg: &CavityConfig) -> Result<Vec<String>> {
        let (lo, hi) = cfg.q0_range();
        let (q_min, q_max) = self.range();
        let slack = 1e-13 * cfg.xi_l();
        if !(q_min.is_finite() && q_max.is_finite()) || q_min < lo - slack || q_max > hi + slack {
            let q = if q_min < lo - slack { q_min } else { q_max };
            let tau = match self.law {
                TrajectoryLaw::Cosine { frequency, .. } if q == q_max && !self.is_static() => {
                    PI / frequency.abs()
                }
                _ => 0.0,
            };
            return Err(Error::InadmissibleTrajectory { tau, q });
        }
        let mut warnings = Vec::new();
        if self.sup_velocity() > ADMISSIBLE_RATE {
            warnings.push(format!(
                "slab speed reaches {:.3e}, above {ADMISSIBLE_RATE}",
                self.sup_velocity()
            ));
        }
        if self.sup_acceleration() > ADMISSIBLE_RATE {
            warnings.push(format!(
                "slab acceleration reaches {:.3e}, above {ADMISSIBLE_RATE}",
                self.sup_acceleration()
            ));
        }
        Ok(warnings)
    }
}

/// `q(tau) = 1.2179272 - 0.1 cos(0.01 tau)`.
pub fn default_trajectory() -> MembraneTrajectory {
    MembraneTrajectory::cosine(1.2179272, 0.1, 0.01)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_trajectory_properties() {
        let t = default_trajectory();
        assert!((t.q(0.0) - 1.1179272).abs() < 1e-15);
        assert_eq!(t.dq(0.0), 0.0);
        assert!((t.sup_velocity() - 1e-3).abs() < 1e-18);
        assert!((t.sup_acceleration() - 1e-5).abs() < 1e-20);
        let p = t.period().unwrap();
        assert!((p - 200.0 * PI).abs() < 1e-12);
        for tau in [0.0, 13.0, 250.0] {
            assert!((t.q(tau + p) - t.q(tau)).abs() < 1e-13);
        }
    }

    #[test]
    fn derivatives_match_differences() {
        let t = MembraneTrajectory::cosine(1.0, 0.2, 0.3);
        let h = 1e-5;
        for tau in [0.4, 3.0, 11.0] {
            let d1 = (t.q(tau + h) - t.q(tau - h)) / (2.0 * h);
            let d2 = (t.dq(tau + h) - t.dq(tau - h)) / (2.0 * h);
            assert!((d1 - t.dq(tau)).abs() < 1e-9);
            assert!((d2 - t.ddq(tau)).abs() < 1e-9);
        }
    }

    #[test]
    fn admissibility() {
        let cfg = CavityConfig::with_alpha(2.0, 0.01, 2.0).unwrap();
        assert!(default_trajectory().check(&cfg).unwrap().is_empty());
        assert!(MembraneTrajectory::cosine(1.95, 0.1, 0.01).check(&cfg).is_err());
        let fast = MembraneTrajectory::cosine(1.0, 0.5, 0.5);
        assert_eq!(fast.check(&cfg).unwrap().len(), 2);
        let s = MembraneTrajectory::stationary(0.7);
        assert_eq!(s.range(), (0.7, 0.7));
        assert!(s.is_static() && s.period().is_none());
    }
}
