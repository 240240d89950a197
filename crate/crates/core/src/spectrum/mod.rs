//! Cavity angular frequencies.
//!
//! The frequencies are the positive roots of
//!
//! ```text
//! F(w) = -(a-1)^2 sin(w [L - d (a+1)])
//!        - 2 (a^2-1) cos(w [L - d - 2 L b]) sin(w d a)
//!        + (a+1)^2 sin(w [L + d (a-1)])
//! ```
//!
//! with `L` the cavity length, `d` the slab width, `a` the refractive factor
//! and `b` the left-edge fraction. `F(w)` is `4a` times the value at the far
//! mirror of the solution launched from the near mirror, so its roots are
//! exactly the eigenfrequencies. The roots are counted with a Prüfer phase,
//! which makes the bracketing immune to closely spaced roots.

mod families;
mod solver;
mod thin;

pub use families::{
    default_beta_grid, midpoint_family, spectral_bounds_check, structural_frequency,
    structural_set, verify_structural, BoundsReport, MidpointSolution, StructuralFrequency,
    StructuralMargin, StructuralReport,
};
pub use solver::{
    eigenvalue_count, prufer_phase, solve_frequency, solve_spectrum, Spectrum, DEFAULT_TOL,
};
pub use thin::{
    approx_frequency, approx_frequency_derivative_q, comparison_table, error_bound,
    explicit_thin_solutions, thin_residual, ComparisonRow, ThinApprox,
};

use crate::cavity::CavityConfig;

/// Left side of the implicit frequency equation.
pub fn residual(cfg: &CavityConfig, beta: f64, omega: f64) -> f64 {
    let t = Terms::new(cfg, beta);
    -t.c_minus * (omega * t.a).sin() - t.c_mid * (omega * t.b).cos() * (omega * t.c).sin()
        + t.c_plus * (omega * t.d).sin()
}

/// Partial derivatives `(dF/dw, dF/dbeta)` of [`residual`].
pub fn residual_derivatives(cfg: &CavityConfig, beta: f64, omega: f64) -> (f64, f64) {
    let t = Terms::new(cfg, beta);
    let ca = (omega * t.a).cos();
    let (sb, cb) = (omega * t.b).sin_cos();
    let (sc, cc) = (omega * t.c).sin_cos();
    let cd = (omega * t.d).cos();
    let d_omega = -t.c_minus * t.a * ca - t.c_mid * (-t.b * sb * sc + t.c * cb * cc)
        + t.c_plus * t.d * cd;
    // b depends on beta through -2 L beta.
    let d_beta = -t.c_mid * (-sb) * (-2.0 * cfg.xi_l() * omega) * sc;
    (d_omega, d_beta)
}

/// `dw/dq0` along a root of the frequency equation, by implicit differentiation.
pub fn frequency_derivative_q(cfg: &CavityConfig, beta: f64, omega: f64) -> f64 {
    let (fw, fb) = residual_derivatives(cfg, beta, omega);
    -(fb / cfg.xi_l()) / fw
}

/// Magnitude of the largest coefficient in the frequency equation, `(alpha+1)^2`.
pub fn residual_scale(cfg: &CavityConfig) -> f64 {
    (cfg.alpha() + 1.0).powi(2)
}

struct Terms {
    a: f64,
    b: f64,
    c: f64,
    d: f64,
    c_minus: f64,
    c_mid: f64,
    c_plus: f64,
}

impl Terms {
    fn new(cfg: &CavityConfig, beta: f64) -> Self {
        let (xl, d, al) = (cfg.xi_l(), cfg.delta0(), cfg.alpha());
        Self {
            a: xl - d * (al + 1.0),
            b: xl - d - 2.0 * xl * beta,
            c: d * al,
            d: xl + d * (al - 1.0),
            c_minus: (al - 1.0).powi(2),
            c_mid: 2.0 * (al * al - 1.0),
            c_plus: (al + 1.0).powi(2),
        }
    }
}
