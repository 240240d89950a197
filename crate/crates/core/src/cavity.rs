//! Static cavity geometry and the step dielectric profile of the slab.
//!
//! All quantities are nondimensional: lengths are measured in units of a
//! characteristic wavelength and times in units of its inverse frequency.

use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{Error, Result};

/// Relative slack allowed when checking closed admissible intervals.
const RANGE_SLACK: f64 = 1e-13;

/// Cavity of length `xi_l` holding a slab of width `delta0` and constant
/// susceptibility `chi0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CavityConfig {
    xi_l: f64,
    delta0: f64,
    chi0: f64,
    alpha: f64,
}

impl CavityConfig {
    pub fn new(xi_l: f64, delta0: f64, chi0: f64) -> Result<Self> {
        if !(xi_l.is_finite() && delta0.is_finite() && chi0.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "non-finite parameter (xi_L = {xi_l}, delta0 = {delta0}, chi0 = {chi0})"
            )));
        }
        if xi_l <= 0.0 {
            return Err(Error::InvalidConfig(format!("cavity length {xi_l} must be positive")));
        }
        if delta0 <= 0.0 || delta0 >= xi_l {
            return Err(Error::InvalidConfig(format!(
                "slab width {delta0} must lie in (0, {xi_l})"
            )));
        }
        if chi0 < 0.0 {
            return Err(Error::InvalidConfig(format!(
                "susceptibility {chi0} must be non-negative"
            )));
        }
        Ok(Self {
            xi_l,
            delta0,
            chi0,
            alpha: (1.0 + 4.0 * PI * chi0).sqrt(),
        })
    }

    /// Builds the configuration from the refractive factor `alpha >= 1`.
    ///
    /// `alpha` is stored as given, so `alpha = 2` stays exactly 2.
    pub fn with_alpha(xi_l: f64, delta0: f64, alpha: f64) -> Result<Self> {
        if !alpha.is_finite() || alpha < 1.0 {
            return Err(Error::InvalidConfig(format!("alpha {alpha} must be >= 1")));
        }
        let chi0 = (alpha * alpha - 1.0) / (4.0 * PI);
        let mut cfg = Self::new(xi_l, delta0, chi0)?;
        cfg.alpha = alpha;
        Ok(cfg)
    }

    pub fn xi_l(&self) -> f64 {
        self.xi_l
    }

    pub fn delta0(&self) -> f64 {
        self.delta0
    }

    pub fn chi0(&self) -> f64 {
        self.chi0
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// Same cavity and material with a different slab width.
    pub fn with_delta0(&self, delta0: f64) -> Result<Self> {
        Self::with_alpha(self.xi_l, delta0, self.alpha)
    }

    /// Optical length of the cavity, `xi_L + delta0 (alpha - 1)`.
    pub fn optical_length(&self) -> f64 {
        self.xi_l + self.delta0 * (self.alpha - 1.0)
    }

    /// Admissible midpoint interval `[delta0/2, xi_L - delta0/2]`.
    pub fn q0_range(&self) -> (f64, f64) {
        (0.5 * self.delta0, self.xi_l - 0.5 * self.delta0)
    }

    /// Admissible left-edge fraction interval `[0, 1 - delta0/xi_L]`.
    pub fn beta_range(&self) -> (f64, f64) {
        (0.0, 1.0 - self.delta0 / self.xi_l)
    }

    pub fn beta_of(&self, q0: f64) -> Result<f64> {
        let (lo, hi) = self.q0_range();
        check_range("q0", q0, lo, hi, self.xi_l)?;
        Ok(((q0 - 0.5 * self.delta0) / self.xi_l).clamp(0.0, 1.0))
    }

    pub fn q0_of(&self, beta: f64) -> Result<f64> {
        let (lo, hi) = self.beta_range();
        check_range("beta", beta, lo, hi, 1.0)?;
        Ok(beta * self.xi_l + 0.5 * self.delta0)
    }

    /// Susceptibility at `xi` for a slab centred at `pos`; zero on the slab faces.
    pub fn susceptibility(&self, pos: &MembranePosition, xi: f64) -> f64 {
        if (xi - pos.q0).abs() < 0.5 * self.delta0 {
            self.chi0
        } else {
            0.0
        }
    }

    /// Dielectric function `1 + 4 pi chi`.
    pub fn dielectric(&self, pos: &MembranePosition, xi: f64) -> f64 {
        if (xi - pos.q0).abs() < 0.5 * self.delta0 {
            self.alpha * self.alpha
        } else {
            1.0
        }
    }
}

fn check_range(what: &'static str, value: f64, lo: f64, hi: f64, scale: f64) -> Result<()> {
    let slack = RANGE_SLACK * scale;
    if !value.is_finite() || value < lo - slack || value > hi + slack {
        return Err(Error::OutOfRange { what, value, lo, hi });
    }
    Ok(())
}

/// Slab midpoint `q0` together with the left-edge fraction `beta`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MembranePosition {
    q0: f64,
    beta: f64,
}

impl MembranePosition {
    pub fn from_q0(cfg: &CavityConfig, q0: f64) -> Result<Self> {
        let beta = cfg.beta_of(q0)?;
        Ok(Self { q0, beta })
    }

    pub fn from_beta(cfg: &CavityConfig, beta: f64) -> Result<Self> {
        let q0 = cfg.q0_of(beta)?;
        Ok(Self { q0, beta })
    }

    /// Slab centred in the cavity.
    pub fn centered(cfg: &CavityConfig) -> Self {
        Self {
            q0: 0.5 * cfg.xi_l,
            beta: (cfg.xi_l - cfg.delta0) / (2.0 * cfg.xi_l),
        }
    }

    pub fn q0(&self) -> f64 {
        self.q0
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn left_edge(&self, cfg: &CavityConfig) -> f64 {
        self.q0 - 0.5 * cfg.delta0
    }

    pub fn right_edge(&self, cfg: &CavityConfig) -> f64 {
        self.q0 + 0.5 * cfg.delta0
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn fig2_parameters_give_alpha_two() {
        let cfg = CavityConfig::new(2.0, 1.0 / 3.0, 3.0 / (4.0 * PI)).unwrap();
        assert!((cfg.alpha() - 2.0).abs() < 1e-15);
    }

    #[test]
    fn vacuum_slab_has_unit_alpha() {
        let cfg = CavityConfig::new(2.0, 0.01, 0.0).unwrap();
        assert_eq!(cfg.alpha(), 1.0);
    }

    #[test]
    fn rejects_invalid_parameters() {
        assert!(CavityConfig::new(1.0, 2.0, 0.1).is_err());
        assert!(CavityConfig::new(0.0, 0.1, 0.1).is_err());
        assert!(CavityConfig::new(1.0, 0.0, 0.1).is_err());
        assert!(CavityConfig::new(1.0, 0.1, -0.1).is_err());
        assert!(CavityConfig::new(f64::NAN, 0.1, 0.1).is_err());
        assert!(CavityConfig::with_alpha(1.0, 0.1, 0.5).is_err());
    }

    #[test]
    fn alpha_and_chi_are_consistent() {
        let cfg = CavityConfig::with_alpha(2.0, 0.01, 2.0).unwrap();
        assert!((cfg.alpha().powi(2) - 1.0 - 4.0 * PI * cfg.chi0()).abs() < 1e-15);
    }

    #[test]
    fn susceptibility_and_dielectric_profile() {
        let cfg = CavityConfig::with_alpha(2.0, 1.0 / 3.0, 2.0).unwrap();
        let pos = MembranePosition::from_q0(&cfg, 1.0).unwrap();
        assert_eq!(cfg.susceptibility(&pos, 1.0), cfg.chi0());
        assert_eq!(cfg.susceptibility(&pos, 1.0 + 1.0 / 6.0), 0.0);
        assert_eq!(cfg.dielectric(&pos, 1.0), 4.0);
        assert_eq!(cfg.dielectric(&pos, 1.1), 4.0);
        assert_eq!(cfg.dielectric(&pos, 0.0), 1.0);

        let vac = CavityConfig::new(2.0, 0.5, 0.0).unwrap();
        let p = MembranePosition::from_q0(&vac, 1.0).unwrap();
        assert_eq!(vac.susceptibility(&p, 1.0), 0.0);
    }

    #[test]
    fn beta_q0_conversions() {
        let cfg = CavityConfig::with_alpha(2.0, 0.01, 2.0).unwrap();
        assert_eq!(cfg.beta_of(0.005).unwrap(), 0.0);
        assert!((cfg.q0_of(0.2).unwrap() - 0.405).abs() < 1e-15);
        assert!(cfg.q0_of(-0.1).is_err());
        assert!(cfg.q0_of(0.999).is_err());
        assert!(cfg.beta_of(0.001).is_err());
        let centred = MembranePosition::centered(&cfg);
        assert!((centred.beta() - cfg.beta_of(1.0).unwrap()).abs() < 1e-15);
    }

    proptest! {
        #[test]
        fn q0_beta_round_trip(frac in 0.0f64..=1.0, delta in 0.001f64..1.9) {
            let cfg = CavityConfig::with_alpha(2.0, delta, 1.5).unwrap();
            let (lo, hi) = cfg.q0_range();
            let q0 = lo + frac * (hi - lo);
            let back = cfg.q0_of(cfg.beta_of(q0).unwrap()).unwrap();
            prop_assert!((back - q0).abs() <= 2.0 * f64::EPSILON * q0.abs().max(1.0));
        }

        #[test]
        fn dielectric_takes_two_values(xi in 0.0f64..2.0, frac in 0.0f64..=1.0, alpha in 1.0f64..4.0) {
            let cfg = CavityConfig::with_alpha(2.0, 0.3, alpha).unwrap();
            let (lo, hi) = cfg.q0_range();
            let pos = MembranePosition::from_q0(&cfg, lo + frac * (hi - lo)).unwrap();
            let eps = cfg.dielectric(&pos, xi);
            prop_assert!((eps - (1.0 + 4.0 * PI * cfg.susceptibility(&pos, xi))).abs() < 1e-12);
            prop_assert!(eps == 1.0 || eps == alpha * alpha);
        }
    }
}
