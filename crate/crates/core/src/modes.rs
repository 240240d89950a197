//! Piecewise eigenmodes of the slab cavity, their norming and the
//! dielectric-weighted inner product `(f, g) = ∫ eps(xi) f g dxi`.
//!
//! The unnormalised mode is `sin(w xi)` left of the slab, a refracted
//! cosine/sine pair inside it, and a phase-shifted sine to its right, so the
//! leading coefficient is always positive and mode signs are deterministic.

use std::f64::consts::PI;

use serde::Serialize;

use crate::cavity::{CavityConfig, MembranePosition};
use crate::error::{Error, Result};
use crate::numerics::quadrature::panel_rule;
use crate::numerics::quadrature::PANEL_ORDER;
use crate::spectrum::{error_bound, solve_frequency, solve_spectrum, DEFAULT_TOL};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Region {
    Left,
    Slab,
    Right,
}

/// Unnormalised mode for a given frequency and slab position.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ModeShape {
    omega: f64,
    alpha: f64,
    xi_l: f64,
    left: f64,
    right: f64,
    /// Value and slope / omega at the right face.
    right_value: f64,
    right_slope: f64,
}

impl ModeShape {
    pub fn new(cfg: &CavityConfig, pos: &MembranePosition, omega: f64) -> Self {
        let alpha = cfg.alpha();
        let left = cfg.xi_l() * pos.beta();
        let right = left + cfg.delta0();
        let (sl, cl) = (omega * left).sin_cos();
        let (ss, cs) = (omega * alpha * cfg.delta0()).sin_cos();
        Self {
            omega,
            alpha,
            xi_l: cfg.xi_l(),
            left,
            right,
            right_value: cs * sl + ss * cl / alpha,
            right_slope: -alpha * ss * sl + cs * cl,
        }
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }

    pub fn edges(&self) -> (f64, f64) {
        (self.left, self.right)
    }

    pub fn region(&self, xi: f64) -> Region {
        if xi <= self.left {
            Region::Left
        } else if xi >= self.right {
            Region::Right
        } else {
            Region::Slab
        }
    }

    /// Local wavenumber in a region.
    pub fn wavenumber(&self, region: Region) -> f64 {
        match region {
            Region::Slab => self.omega * self.alpha,
            _ => self.omega,
        }
    }

    /// Value of one branch's formula, whether or not `xi` lies in its region.
    pub fn branch_value(&self, region: Region, xi: f64) -> f64 {
        let w = self.omega;
        match region {
            Region::Left => (w * xi).sin(),
            Region::Slab => {
                let (s, c) = (w * self.alpha * (xi - self.left)).sin_cos();
                let (sl, cl) = (w * self.left).sin_cos();
                c * sl + s * cl / self.alpha
            }
            Region::Right => {
                let (s, c) = (w * (xi - self.right)).sin_cos();
                self.right_value * c + self.right_slope * s
            }
        }
    }

    /// `d/dxi` of one branch's formula.
    pub fn branch_derivative(&self, region: Region, xi: f64) -> f64 {
        let w = self.omega;
        match region {
            Region::Left => w * (w * xi).cos(),
            Region::Slab => {
                let k = w * self.alpha;
                let (s, c) = (k * (xi - self.left)).sin_cos();
                let (sl, cl) = (w * self.left).sin_cos();
                k * (-s * sl + c * cl / self.alpha)
            }
            Region::Right => {
                let (s, c) = (w * (xi - self.right)).sin_cos();
                w * (-self.right_value * s + self.right_slope * c)
            }
        }
    }

    pub fn value(&self, xi: f64) -> f64 {
        self.branch_value(self.region(xi), xi)
    }

    pub fn derivative(&self, xi: f64) -> f64 {
        self.branch_derivative(self.region(xi), xi)
    }

    /// Second derivative, `-k^2 G` with the local wavenumber `k`.
    pub fn second_derivative(&self, xi: f64) -> f64 {
        let region = self.region(xi);
        -self.wavenumber(region).powi(2) * self.branch_value(region, xi)
    }

    /// Value at the far mirror; vanishes when `omega` is a frequency.
    pub fn end_value(&self) -> f64 {
        self.branch_value(Region::Right, self.xi_l)
    }
}

/// Refinement policy for the weighted quadrature.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QuadratureSpec {
    /// Successive doublings must agree to this fraction of the integral's scale.
    pub rel_tol: f64,
    /// Largest node count tried before giving up.
    pub max_nodes: usize,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self {
            rel_tol: 1e-12,
            max_nodes: 1 << 14,
        }
    }
}

/// Composite Gauss–Legendre nodes on `[0, xi_L]`, split at the slab faces,
/// with the dielectric weight folded into the weights.
#[derive(Debug, Clone)]
pub struct WeightedGrid {
    points: Vec<f64>,
    weights: Vec<f64>,
}

impl WeightedGrid {
    /// Each region gets `max(20, 10 ceil(k len / pi))` nodes for local
    /// wavenumber `k`, doubled `refinement` times.
    pub fn new(cfg: &CavityConfig, pos: &MembranePosition, wavenumber: f64, refinement: u32) -> Self {
        let rule = panel_rule();
        let a = pos.left_edge(cfg).max(0.0);
        let b = pos.right_edge(cfg).min(cfg.xi_l());
        let eps_in = cfg.alpha() * cfg.alpha();
        let regions = [
            (0.0, a, wavenumber, 1.0),
            (a, b, wavenumber * cfg.alpha(), eps_in),
            (b, cfg.xi_l(), wavenumber, 1.0),
        ];
        let mut points = Vec::new();
        let mut weights = Vec::new();
        for (lo, hi, k, eps) in regions {
            if hi <= lo {
                continue;
            }
            let nodes = region_nodes(k, hi - lo) << refinement;
            rule.push_composite(lo, hi, nodes / PANEL_ORDER, eps, &mut points, &mut weights);
        }
        Self { points, weights }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn integrate<F: Fn(f64) -> f64>(&self, f: F) -> f64 {
        self.points.iter().zip(&self.weights).map(|(&x, &w)| w * f(x)).sum()
    }
}

fn region_nodes(k: f64, len: f64) -> usize {
    let per_wave = PANEL_ORDER * (k.abs() * len / PI).ceil() as usize;
    per_wave.max(2 * PANEL_ORDER)
}

/// Evaluates `eval` on successively doubled grids until every component
/// changes by less than `rel_tol` times the scale it reports.
pub fn integrate_converged<F>(
    cfg: &CavityConfig,
    pos: &MembranePosition,
    wavenumber: f64,
    spec: &QuadratureSpec,
    mut eval: F,
) -> Result<Vec<f64>>
where
    F: FnMut(&WeightedGrid) -> (Vec<f64>, f64),
{
    let mut grid = WeightedGrid::new(cfg, pos, wavenumber, 0);
    let (mut prev, _) = eval(&grid);
    for level in 1.. {
        let next = WeightedGrid::new(cfg, pos, wavenumber, level);
        if next.len() > spec.max_nodes {
            return Err(Error::QuadratureNotConverged {
                a: 0.0,
                b: cfg.xi_l(),
                nodes: grid.len(),
                tol: spec.rel_tol,
            });
        }
        let (values, scale) = eval(&next);
        let change = values
            .iter()
            .zip(&prev)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        if change <= spec.rel_tol * scale.max(f64::MIN_POSITIVE) {
            return Ok(values);
        }
        prev = values;
        grid = next;
    }
    unreachable!()
}

/// Weighted inner product of two functions whose oscillation is bounded by
/// the vacuum wavenumber `wavenumber`.
pub fn inner_product<F, G>(
    cfg: &CavityConfig,
    pos: &MembranePosition,
    f: F,
    g: G,
    wavenumber: f64,
    spec: &QuadratureSpec,
) -> Result<f64>
where
    F: Fn(f64) -> f64,
    G: Fn(f64) -> f64,
{
    let values = integrate_converged(cfg, pos, wavenumber, spec, |grid| {
        let (mut fg, mut ff, mut gg) = (0.0, 0.0, 0.0);
        for (&x, &w) in grid.points().iter().zip(grid.weights()) {
            let (a, b) = (f(x), g(x));
            fg += w * a * b;
            ff += w * a * a;
            gg += w * b * b;
        }
        // Cauchy–Schwarz gives a scale that survives an exactly zero product.
        let scale = fg.abs().max((ff * gg).sqrt());
        (vec![fg], scale)
    })?;
    Ok(values[0])
}

/// Unnormalised mode value at `xi`.
pub fn unnormalized_mode_value(cfg: &CavityConfig, pos: &MembranePosition, omega: f64, xi: f64) -> f64 {
    ModeShape::new(cfg, pos, omega).value(xi)
}

/// `N = ∫ eps |G|^2` of the unnormalised mode.
pub fn norming_coefficient(
    cfg: &CavityConfig,
    pos: &MembranePosition,
    omega: f64,
    spec: &QuadratureSpec,
) -> Result<f64> {
    let shape = ModeShape::new(cfg, pos, omega);
    let values = integrate_converged(cfg, pos, omega, spec, |grid| {
        let n = grid.integrate(|x| shape.value(x).powi(2));
        (vec![n], n.abs())
    })?;
    Ok(values[0])
}

/// One normalised eigenpair.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ModeSolution {
    pub n: usize,
    pub omega: f64,
    pub pos: MembranePosition,
    pub shape: ModeShape,
    pub norming: f64,
}

impl ModeSolution {
    /// Builds the mode for an already solved frequency.
    pub fn from_omega(
        cfg: &CavityConfig,
        pos: &MembranePosition,
        n: usize,
        omega: f64,
        spec: &QuadratureSpec,
    ) -> Result<Self> {
        Ok(Self {
            n,
            omega,
            pos: *pos,
            shape: ModeShape::new(cfg, pos, omega),
            norming: norming_coefficient(cfg, pos, omega, spec)?,
        })
    }

    fn scale(&self) -> f64 {
        self.norming.sqrt().recip()
    }

    pub fn value(&self, xi: f64) -> f64 {
        self.shape.value(xi) * self.scale()
    }

    pub fn derivative(&self, xi: f64) -> f64 {
        self.shape.derivative(xi) * self.scale()
    }

    pub fn second_derivative(&self, xi: f64) -> f64 {
        self.shape.second_derivative(xi) * self.scale()
    }

    pub fn branch_value(&self, region: Region, xi: f64) -> f64 {
        self.shape.branch_value(region, xi) * self.scale()
    }

    pub fn branch_derivative(&self, region: Region, xi: f64) -> f64 {
        self.shape.branch_derivative(region, xi) * self.scale()
    }
}

/// The `n`-th normalised mode (1-based).
pub fn mode(cfg: &CavityConfig, pos: &MembranePosition, n: usize) -> Result<ModeSolution> {
    mode_with_hint(cfg, pos, n, None)
}

/// As [`mode`], bracketing the frequency around `hint`.
pub fn mode_with_hint(
    cfg: &CavityConfig,
    pos: &MembranePosition,
    n: usize,
    hint: Option<f64>,
) -> Result<ModeSolution> {
    let omega = solve_frequency(cfg, pos, n, DEFAULT_TOL, hint)?;
    ModeSolution::from_omega(cfg, pos, n, omega, &QuadratureSpec::default())
}

/// The lowest `count` normalised modes.
pub fn modes(cfg: &CavityConfig, pos: &MembranePosition, count: usize) -> Result<Vec<ModeSolution>> {
    let spectrum = solve_spectrum(cfg, pos, count, DEFAULT_TOL)?;
    let spec = QuadratureSpec::default();
    spectrum
        .omegas
        .iter()
        .enumerate()
        .map(|(i, &w)| ModeSolution::from_omega(cfg, pos, i + 1, w, &spec))
        .collect()
}

/// Default step for differentiating modes with respect to the slab position.
pub fn default_q_step(cfg: &CavityConfig) -> f64 {
    1e-5 * cfg.xi_l()
}

/// `dG_n/dq0` at fixed `xi` by central differences, with the frequency
/// re-solved at each shifted position. Evaluation combines the steps `h`
/// and `h/2` by Richardson extrapolation.
///
/// Each shifted mode is evaluated with the branch formula of the region `xi`
/// occupies at the unshifted position, so the result is the derivative of
/// that branch and stays smooth up to the slab faces.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ModeDerivativeQ {
    pub h: f64,
    /// Mode at the unshifted position; fixes which branch is differenced.
    base: ModeShape,
    /// Modes at `q0 - h, q0 - h/2, q0 + h/2, q0 + h`.
    shifted: [ModeSolution; 4],
}

impl ModeDerivativeQ {
    /// Central difference with step `h`.
    pub fn central(&self, xi: f64) -> f64 {
        let r = self.base.region(xi);
        (self.shifted[3].branch_value(r, xi) - self.shifted[0].branch_value(r, xi)) / (2.0 * self.h)
    }

    /// Central difference with step `h/2`.
    pub fn central_half(&self, xi: f64) -> f64 {
        let r = self.base.region(xi);
        (self.shifted[2].branch_value(r, xi) - self.shifted[1].branch_value(r, xi)) / self.h
    }

    /// Richardson-extrapolated derivative.
    pub fn value(&self, xi: f64) -> f64 {
        (4.0 * self.central_half(xi) - self.central(xi)) / 3.0
    }

    /// Frequency derivative from the same shifted solves.
    pub fn omega_derivative(&self) -> f64 {
        let d1 = (self.shifted[3].omega - self.shifted[0].omega) / (2.0 * self.h);
        let d2 = (self.shifted[2].omega - self.shifted[1].omega) / self.h;
        (4.0 * d2 - d1) / 3.0
    }
}

pub fn mode_derivative_q(
    cfg: &CavityConfig,
    pos: &MembranePosition,
    n: usize,
    h: f64,
) -> Result<ModeDerivativeQ> {
    let omega = solve_frequency(cfg, pos, n, DEFAULT_TOL, None)?;
    mode_derivative_q_from(cfg, pos, n, omega, h, &QuadratureSpec::default())
}

/// As [`mode_derivative_q`], warm-starting every shifted solve from `omega`.
pub fn mode_derivative_q_from(
    cfg: &CavityConfig,
    pos: &MembranePosition,
    n: usize,
    omega: f64,
    h: f64,
    spec: &QuadratureSpec,
) -> Result<ModeDerivativeQ> {
    if !(h > 0.0) {
        return Err(Error::InvalidArgument(format!("step {h} must be positive")));
    }
    let q0 = pos.q0();
    let build = |dq: f64| -> Result<ModeSolution> {
        let p = MembranePosition::from_q0(cfg, q0 + dq)?;
        let w = solve_frequency(cfg, &p, n, DEFAULT_TOL, Some(omega))?;
        ModeSolution::from_omega(cfg, &p, n, w, spec)
    };
    Ok(ModeDerivativeQ {
        h,
        base: ModeShape::new(cfg, pos, omega),
        shifted: [build(-h)?, build(-0.5 * h)?, build(0.5 * h)?, build(h)?],
    })
}

/// First-order thin-slab mode: exact left of and inside the slab, linearised
/// in the slab width to its right, normed in closed form.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ThinModeSolution {
    pub n: usize,
    pub omega: f64,
    pub pos: MembranePosition,
    pub shape: ModeShape,
    pub norming: f64,
    /// Taylor bound on the right-branch error, `alpha (alpha^2-1) (w delta0)^2 / 2`.
    pub branch_error_bound: f64,
    /// Set when `2 alpha (alpha^2-1) (w delta0)^2 >= 1`, outside the thin regime.
    pub outside_thin_regime: bool,
    delta0: f64,
    contrast: f64,
}

impl ThinModeSolution {
    pub fn unnormalized_value(&self, xi: f64) -> f64 {
        match self.shape.region(xi) {
            Region::Right => {
                let w = self.omega;
                let left = self.shape.left;
                (w * xi).sin()
                    + 0.5 * self.delta0 * self.contrast * w * ((w * xi).cos() - (w * (xi - 2.0 * left)).cos())
            }
            region => self.shape.branch_value(region, xi),
        }
    }

    pub fn value(&self, xi: f64) -> f64 {
        self.unnormalized_value(xi) / self.norming.sqrt()
    }

    /// Norming of the linearised mode by quadrature rather than closed form.
    pub fn norming_quadrature(&self, cfg: &CavityConfig, spec: &QuadratureSpec) -> Result<f64> {
        let values = integrate_converged(cfg, &self.pos, self.omega, spec, |grid| {
            let n = grid.integrate(|x| self.unnormalized_value(x).powi(2));
            (vec![n], n.abs())
        })?;
        Ok(values[0])
    }
}

/// Closed-form first-order norming of the thin-slab mode.
pub fn thin_norming(cfg: &CavityConfig, beta: f64, omega: f64) -> f64 {
    let xl = cfg.xi_l();
    let contrast = cfg.alpha().powi(2) - 1.0;
    let t = 2.0 * xl * omega;
    0.25 * (2.0 * xl - t.sin() / omega
        + cfg.delta0()
            * contrast
            * (1.0 - t.cos() + (t * (beta - 1.0)).cos() - (t * beta).cos()
                + t * (beta - 1.0) * (t * beta).sin()))
}

pub fn thin_mode(cfg: &CavityConfig, pos: &MembranePosition, n: usize) -> Result<ThinModeSolution> {
    let omega = solve_frequency(cfg, pos, n, DEFAULT_TOL, None)?;
    let alpha = cfg.alpha();
    let contrast = alpha * alpha - 1.0;
    Ok(ThinModeSolution {
        n,
        omega,
        pos: *pos,
        shape: ModeShape::new(cfg, pos, omega),
        norming: thin_norming(cfg, pos.beta(), omega),
        branch_error_bound: 0.5 * alpha * contrast * (omega * cfg.delta0()).powi(2),
        outside_thin_regime: error_bound(cfg, omega) >= 1.0,
        delta0: cfg.delta0(),
        contrast,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn table1() -> (CavityConfig, MembranePosition) {
        let cfg = CavityConfig::with_alpha(2.0, 0.01, 2.0).unwrap();
        let pos = MembranePosition::from_beta(&cfg, 0.2).unwrap();
        (cfg, pos)
    }

    /// Right-branch formula written out as a four-sine combination.
    fn four_sine(cfg: &CavityConfig, beta: f64, w: f64, xi: f64) -> f64 {
        let (a, d, l) = (cfg.alpha(), cfg.delta0(), cfg.xi_l() * beta);
        ((1.0 + a).powi(2) * (w * (xi + d * (a - 1.0))).sin()
            - (a - 1.0).powi(2) * (w * (xi - d * (a + 1.0))).sin()
            - (a * a - 1.0) * (w * (xi + d * (a - 1.0) - 2.0 * l)).sin()
            + (a * a - 1.0) * (w * (xi - d * (a + 1.0) - 2.0 * l)).sin())
            / (4.0 * a)
    }

    #[test]
    fn right_branch_matches_four_sine_form() {
        let (cfg, pos) = table1();
        for w in [1.3, 1.56241, 7.9] {
            let shape = ModeShape::new(&cfg, &pos, w);
            for i in 0..20 {
                let xi = 0.41 + 1.59 * i as f64 / 19.0;
                let a = shape.branch_value(Region::Right, xi);
                assert!((a - four_sine(&cfg, pos.beta(), w, xi)).abs() < 1e-13);
            }
        }
    }

    #[test]
    fn end_value_is_scaled_residual() {
        let (cfg, pos) = table1();
        for w in [0.7, 2.2, 9.1] {
            let shape = ModeShape::new(&cfg, &pos, w);
            let f = crate::spectrum::residual(&cfg, pos.beta(), w);
            assert!((4.0 * cfg.alpha() * shape.end_value() - f).abs() < 1e-12);
        }
    }

    #[test]
    fn vacuum_branches_collapse_to_sine() {
        let cfg = CavityConfig::with_alpha(2.0, 0.3, 1.0).unwrap();
        let pos = MembranePosition::from_beta(&cfg, 0.4).unwrap();
        let shape = ModeShape::new(&cfg, &pos, 2.3);
        for region in [Region::Left, Region::Slab, Region::Right] {
            for xi in [0.0, 0.5, 0.9, 1.5, 2.0] {
                assert!((shape.branch_value(region, xi) - (2.3 * xi).sin()).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn interfaces_are_continuous() {
        let (cfg, pos) = table1();
        let m = mode(&cfg, &pos, 1).unwrap();
        let (l, r) = m.shape.edges();
        assert_eq!(m.value(0.0), 0.0);
        assert!((m.branch_value(Region::Left, l) - m.branch_value(Region::Slab, l)).abs() < 1e-12);
        assert!((m.branch_value(Region::Slab, r) - m.branch_value(Region::Right, r)).abs() < 1e-12);
        assert!((m.branch_derivative(Region::Left, l) - m.branch_derivative(Region::Slab, l)).abs() < 1e-12);
        assert!((m.branch_derivative(Region::Slab, r) - m.branch_derivative(Region::Right, r)).abs() < 1e-12);
    }

    #[test]
    fn vacuum_norming() {
        let cfg = CavityConfig::with_alpha(2.0, 0.01, 1.0).unwrap();
        let pos = MembranePosition::from_beta(&cfg, 0.3).unwrap();
        let spec = QuadratureSpec::default();
        for n in 1..5 {
            let w = n as f64 * PI / 2.0;
            assert!((norming_coefficient(&cfg, &pos, w, &spec).unwrap() - 1.0).abs() < 1e-13);
        }
        let long = CavityConfig::with_alpha(3.7, 0.01, 1.0).unwrap();
        let p = MembranePosition::centered(&long);
        let n = norming_coefficient(&long, &p, 3.0 * PI / 3.7, &spec).unwrap();
        assert!((n - 1.85).abs() < 1e-13);
    }

    #[test]
    fn norming_is_self_converged() {
        let (cfg, pos) = table1();
        let w = solve_frequency(&cfg, &pos, 1, DEFAULT_TOL, None).unwrap();
        let shape = ModeShape::new(&cfg, &pos, w);
        let n0 = norming_coefficient(&cfg, &pos, w, &QuadratureSpec::default()).unwrap();
        let fine = WeightedGrid::new(&cfg, &pos, w, 4).integrate(|x| shape.value(x).powi(2));
        assert!(((fine - n0) / n0).abs() < 1e-12);
    }

    #[test]
    fn vacuum_inner_product_is_plain() {
        let cfg = CavityConfig::with_alpha(2.0, 0.2, 1.0).unwrap();
        let pos = MembranePosition::centered(&cfg);
        let spec = QuadratureSpec::default();
        let s = |x: f64| (PI * x / 2.0).sin();
        assert!((inner_product(&cfg, &pos, s, s, PI, &spec).unwrap() - 1.0).abs() < 1e-13);
        let t = |x: f64| (PI * x).sin();
        assert!(inner_product(&cfg, &pos, s, t, PI, &spec).unwrap().abs() < 1e-14);
    }

    #[test]
    fn table1_modes_are_orthonormal() {
        let (cfg, pos) = table1();
        let ms = modes(&cfg, &pos, 3).unwrap();
        let spec = QuadratureSpec::default();
        for a in &ms {
            for b in &ms {
                let ip = inner_product(&cfg, &pos, |x| a.value(x), |x| b.value(x), b.omega.max(a.omega), &spec)
                    .unwrap();
                let expect = if a.n == b.n { 1.0 } else { 0.0 };
                assert!((ip - expect).abs() < 1e-10, "({}, {}) -> {ip}", a.n, b.n);
            }
        }
    }

    #[test]
    fn vacuum_mode_is_unit_sine() {
        let cfg = CavityConfig::with_alpha(2.0, 0.05, 1.0).unwrap();
        let pos = MembranePosition::from_beta(&cfg, 0.6).unwrap();
        let m = mode(&cfg, &pos, 3).unwrap();
        assert!((m.norming - 1.0).abs() < 1e-12);
        for xi in [0.1, 0.7, 1.21, 1.9] {
            assert!((m.value(xi) - (1.5 * PI * xi).sin()).abs() < 1e-12);
        }
    }

    #[test]
    fn eigen_equation_holds_piecewise() {
        let (cfg, pos) = table1();
        let m = mode(&cfg, &pos, 4).unwrap();
        let h = 1e-4;
        for xi in [0.1, 0.402, 0.408, 1.3] {
            let fd = (m.value(xi + h) - 2.0 * m.value(xi) + m.value(xi - h)) / (h * h);
            assert!((fd - m.second_derivative(xi)).abs() < 1e-5 * m.omega.powi(2));
            let eps = cfg.dielectric(&pos, xi);
            assert!((m.second_derivative(xi) + m.omega.powi(2) * eps * m.value(xi)).abs() < 1e-12);
        }
    }

    #[test]
    fn vacuum_q_derivative_vanishes() {
        let cfg = CavityConfig::with_alpha(2.0, 0.05, 1.0).unwrap();
        let pos = MembranePosition::from_beta(&cfg, 0.3).unwrap();
        let d = mode_derivative_q(&cfg, &pos, 2, default_q_step(&cfg)).unwrap();
        for xi in [0.2, 0.6, 1.4] {
            assert!(d.value(xi).abs() < 1e-9);
        }
        assert!(d.omega_derivative().abs() < 1e-9);
    }

    #[test]
    fn omega_derivative_matches_implicit_differentiation() {
        let (cfg, pos) = table1();
        let m = mode(&cfg, &pos, 2).unwrap();
        let d = mode_derivative_q(&cfg, &pos, 2, default_q_step(&cfg)).unwrap();
        let implicit = crate::spectrum::frequency_derivative_q(&cfg, pos.beta(), m.omega);
        assert!((d.omega_derivative() - implicit).abs() < 1e-7 * implicit.abs().max(1.0));
    }

    #[test]
    fn thin_mode_tracks_exact_mode() {
        let (cfg, pos) = table1();
        let spec = QuadratureSpec::default();
        for n in 1..=5 {
            let thin = thin_mode(&cfg, &pos, n).unwrap();
            let quad = thin.norming_quadrature(&cfg, &spec).unwrap();
            let bound = error_bound(&cfg, thin.omega) * cfg.xi_l();
            assert!((quad - thin.norming).abs() < bound, "n = {n}");
            assert!(!thin.outside_thin_regime);
        }
        let vac = CavityConfig::with_alpha(2.0, 0.01, 1.0).unwrap();
        let p = MembranePosition::from_beta(&vac, 0.2).unwrap();
        let (t, e) = (thin_mode(&vac, &p, 2).unwrap(), mode(&vac, &p, 2).unwrap());
        for xi in [0.3, 0.9, 1.7] {
            assert!((t.value(xi) - e.value(xi)).abs() < 1e-12);
        }
    }
}
