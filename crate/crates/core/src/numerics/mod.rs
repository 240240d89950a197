//! Generic numerical building blocks: Gauss–Legendre quadrature, uniform-grid
//! cubic splines and an embedded Runge–Kutta integrator.

pub mod ode;
pub mod quadrature;
pub mod spline;

pub use ode::{Dopri5, OdeSystem};
pub use quadrature::GaussLegendre;
pub use spline::CubicSpline;
