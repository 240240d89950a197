//! Exact spectrum, modes and field dynamics of a one-dimensional cavity with
//! two perfect mirrors and a movable dielectric slab.
//!
//! Everything is nondimensional: lengths are in units of a reference
//! wavelength and times in units of the inverse reference frequency.
//!
//! * [`cavity`]: geometry and the step dielectric profile.
//! * [`spectrum`]: the implicit frequency equation, its roots and the
//!   closed-form families (structural, centred-slab, thin-slab).
//! * [`modes`]: piecewise eigenmodes, norming and the weighted inner product.
//! * [`dynamics`]: coupling matrices, the Galerkin coefficient equations for
//!   a moving slab and the multiple-scales closed form.

// `!(x > 0.0)` style checks are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cavity;
pub mod dynamics;
pub mod error;
pub mod modes;
pub mod numerics;
pub mod spectrum;

pub use cavity::{CavityConfig, MembranePosition};
pub use error::{Error, Result};
