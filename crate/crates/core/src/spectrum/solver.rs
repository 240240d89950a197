use std::f64::consts::PI;

use serde::Serialize;

use super::residual;
use crate::cavity::{CavityConfig, MembranePosition};
use crate::error::{Error, Result};

/// Default absolute tolerance on a frequency.
pub const DEFAULT_TOL: f64 = 1e-12;

const BISECTION_CAP: usize = 200;
const ISOLATION_DEPTH: usize = 60;

/// The lowest cavity frequencies for one slab position.
#[derive(Debug, Clone, Serialize)]
pub struct Spectrum {
    pub config: CavityConfig,
    pub pos: MembranePosition,
    /// Strictly increasing positive frequencies.
    pub omegas: Vec<f64>,
    /// `|F(w_n)|` at each reported root.
    pub residuals: Vec<f64>,
}

impl Spectrum {
    pub fn len(&self) -> usize {
        self.omegas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.omegas.is_empty()
    }

    /// Frequency with 1-based index `n`.
    pub fn omega(&self, n: usize) -> f64 {
        self.omegas[n - 1]
    }
}

/// Prüfer phase accumulated across the cavity by the solution with
/// `G(0) = 0, G'(0) > 0`. It increases strictly with `omega`, and
/// `omega` is the n-th frequency exactly when the phase equals `n pi`.
pub fn prufer_phase(cfg: &CavityConfig, beta: f64, omega: f64) -> f64 {
    let alpha = cfg.alpha();
    let left = cfg.xi_l() * beta;
    let right = (cfg.xi_l() - left - cfg.delta0()).max(0.0);
    let mut theta = omega * left;
    theta = refract(theta, |s, c| (alpha * s, c));
    theta += omega * alpha * cfg.delta0();
    theta = refract(theta, |s, c| (s, alpha * c));
    theta + omega * right
}

/// Carries the phase across an interface where the local wavenumber jumps;
/// `map` rescales `(sin, cos)` so that value and slope stay continuous.
fn refract(theta: f64, map: impl Fn(f64, f64) -> (f64, f64)) -> f64 {
    let turns = (theta / PI).floor();
    let phi = (theta - turns * PI).max(0.0);
    let (s, c) = map(phi.sin(), phi.cos());
    turns * PI + s.atan2(c)
}

/// Number of frequencies strictly below `omega`.
pub fn eigenvalue_count(cfg: &CavityConfig, beta: f64, omega: f64) -> usize {
    if omega <= 0.0 {
        return 0;
    }
    (prufer_phase(cfg, beta, omega) / PI).floor() as usize
}

fn scan_step(cfg: &CavityConfig) -> f64 {
    PI / (8.0 * cfg.optical_length() * cfg.alpha().max(1.0))
}

/// The `count` smallest frequencies at `pos`.
///
/// The axis is scanned with a step of an eighth of the smallest half-wave
/// spacing. Any scan interval holding more than one frequency, according to
/// the phase count, is split until every root sits alone in its bracket.
pub fn solve_spectrum(
    cfg: &CavityConfig,
    pos: &MembranePosition,
    count: usize,
    tol: f64,
) -> Result<Spectrum> {
    if count == 0 {
        return Err(Error::InvalidArgument("count must be at least 1".into()));
    }
    if !(tol > 0.0) {
        return Err(Error::InvalidArgument(format!("tolerance {tol} must be positive")));
    }
    let beta = pos.beta();
    let step = scan_step(cfg);
    let mut brackets = Vec::with_capacity(count);
    let (mut a, mut ca) = (0.0, 0usize);
    while brackets.len() < count {
        let b = a + step;
        let cb = eigenvalue_count(cfg, beta, b);
        if cb > ca {
            isolate(cfg, beta, (a, ca), (b, cb), &mut brackets, 0)?;
        }
        a = b;
        ca = cb;
    }
    brackets.truncate(count);

    let mut omegas = Vec::with_capacity(count);
    let mut residuals = Vec::with_capacity(count);
    for (i, &(lo, hi)) in brackets.iter().enumerate() {
        let w = refine(cfg, beta, i + 1, lo, hi, tol)?;
        omegas.push(w);
        residuals.push(residual(cfg, beta, w).abs());
    }
    Ok(Spectrum {
        config: *cfg,
        pos: *pos,
        omegas,
        residuals,
    })
}

fn isolate(
    cfg: &CavityConfig,
    beta: f64,
    (a, ca): (f64, usize),
    (b, cb): (f64, usize),
    out: &mut Vec<(f64, f64)>,
    depth: usize,
) -> Result<()> {
    if cb == ca {
        return Ok(());
    }
    if cb == ca + 1 {
        out.push((a, b));
        return Ok(());
    }
    if depth >= ISOLATION_DEPTH {
        return Err(Error::RootNotConverged {
            index: ca + 1,
            iterations: depth,
            lo: a,
            hi: b,
        });
    }
    let m = 0.5 * (a + b);
    let cm = eigenvalue_count(cfg, beta, m);
    isolate(cfg, beta, (a, ca), (m, cm), out, depth + 1)?;
    isolate(cfg, beta, (m, cm), (b, cb), out, depth + 1)
}

/// The `n`-th frequency (1-based), bracketed around `hint` when one is given.
pub fn solve_frequency(
    cfg: &CavityConfig,
    pos: &MembranePosition,
    n: usize,
    tol: f64,
    hint: Option<f64>,
) -> Result<f64> {
    if n == 0 {
        return Err(Error::InvalidArgument("mode index starts at 1".into()));
    }
    let beta = pos.beta();
    let step = scan_step(cfg);
    let nf = n as f64;
    // Min-max bounds: n pi / (alpha L) <= w_n <= n pi / L.
    let (mut a, mut b) = match hint {
        Some(w) if w > 0.0 => ((w - step).max(0.0), w + step),
        _ => (
            nf * PI / (cfg.alpha() * cfg.xi_l()) * (1.0 - 1e-9),
            nf * PI / cfg.xi_l() * (1.0 + 1e-9),
        ),
    };
    let mut ca = eigenvalue_count(cfg, beta, a);
    while ca >= n {
        a = (a - step).max(0.0);
        ca = eigenvalue_count(cfg, beta, a);
    }
    let mut cb = eigenvalue_count(cfg, beta, b);
    while cb < n {
        b += step;
        cb = eigenvalue_count(cfg, beta, b);
    }
    let mut iterations = 0;
    while ca + 1 < n || cb > n {
        let m = 0.5 * (a + b);
        let cm = eigenvalue_count(cfg, beta, m);
        if cm >= n {
            b = m;
            cb = cm;
        } else {
            a = m;
            ca = cm;
        }
        iterations += 1;
        if iterations > BISECTION_CAP {
            return Err(Error::RootNotConverged {
                index: n,
                iterations,
                lo: a,
                hi: b,
            });
        }
    }
    refine(cfg, beta, n, a, b, tol)
}

/// Bisection on the residual to the requested width, then one secant step.
fn refine(cfg: &CavityConfig, beta: f64, n: usize, lo: f64, hi: f64, tol: f64) -> Result<f64> {
    let f = |w: f64| residual(cfg, beta, w);
    let width = tol.min(1e-13);
    let (mut a, mut b) = (lo, hi);
    let (mut fa, mut fb) = (f(a), f(b));
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if fa.signum() == fb.signum() {
        // The phase count places exactly one root here; a missing sign change
        // means it sits within rounding of an endpoint.
        return refine_phase(cfg, beta, n, a, b, width);
    }
    let mut iterations = 0;
    while b - a > width {
        let m = 0.5 * (a + b);
        if m <= a || m >= b {
            break;
        }
        let fm = f(m);
        if fm == 0.0 {
            return Ok(m);
        }
        if fm.signum() == fa.signum() {
            a = m;
            fa = fm;
        } else {
            b = m;
            fb = fm;
        }
        iterations += 1;
        if iterations > BISECTION_CAP {
            return Err(Error::RootNotConverged {
                index: n,
                iterations,
                lo: a,
                hi: b,
            });
        }
    }
    let mut best = if fa.abs() < fb.abs() { (a, fa) } else { (b, fb) };
    if fb != fa {
        let s = b - fb * (b - a) / (fb - fa);
        if s >= a && s <= b {
            let fs = f(s);
            if fs.abs() <= best.1.abs() {
                best = (s, fs);
            }
        }
    }
    Ok(best.0)
}

fn refine_phase(cfg: &CavityConfig, beta: f64, n: usize, lo: f64, hi: f64, width: f64) -> Result<f64> {
    let target = n as f64 * PI;
    let g = |w: f64| prufer_phase(cfg, beta, w) - target;
    let (mut a, mut b) = (lo, hi);
    let mut iterations = 0;
    while b - a > width {
        let m = 0.5 * (a + b);
        if m <= a || m >= b {
            break;
        }
        if g(m) < 0.0 {
            a = m;
        } else {
            b = m;
        }
        iterations += 1;
        if iterations > BISECTION_CAP {
            return Err(Error::RootNotConverged {
                index: n,
                iterations,
                lo: a,
                hi: b,
            });
        }
    }
    Ok(0.5 * (a + b))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pos(cfg: &CavityConfig, beta: f64) -> MembranePosition {
        MembranePosition::from_beta(cfg, beta).unwrap()
    }

    #[test]
    fn vacuum_spectrum_is_harmonic() {
        let cfg = CavityConfig::with_alpha(2.0, 0.25, 1.0).unwrap();
        let s = solve_spectrum(&cfg, &pos(&cfg, 0.3), 5, DEFAULT_TOL).unwrap();
        for (i, w) in s.omegas.iter().enumerate() {
            assert!((w - (i + 1) as f64 * PI / 2.0).abs() < 1e-12);
        }
    }

    #[test]
    fn phase_count_matches_vacuum_counting() {
        let cfg = CavityConfig::with_alpha(3.0, 0.5, 1.0).unwrap();
        assert_eq!(eigenvalue_count(&cfg, 0.1, 0.5), 0);
        assert_eq!(eigenvalue_count(&cfg, 0.1, 1.1), 1);
        assert_eq!(eigenvalue_count(&cfg, 0.1, 10.0), 9);
    }

    #[test]
    fn phase_is_monotone_in_omega() {
        let cfg = CavityConfig::with_alpha(2.0, 0.3, 3.0).unwrap();
        let mut prev = -1.0;
        for i in 0..2000 {
            let th = prufer_phase(&cfg, 0.37, 0.01 * i as f64);
            assert!(th >= prev);
            prev = th;
        }
    }

    #[test]
    fn phase_sign_agrees_with_residual() {
        let cfg = CavityConfig::with_alpha(2.0, 0.2, 2.5).unwrap();
        for i in 1..500 {
            let w = 0.037 * i as f64;
            let th = prufer_phase(&cfg, 0.3, w);
            let f = residual(&cfg, 0.3, w);
            if f.abs() > 1e-9 {
                assert_eq!(th.sin().signum(), f.signum(), "w = {w}");
            }
        }
    }

    #[test]
    fn hinted_and_unhinted_solves_agree() {
        let cfg = CavityConfig::with_alpha(2.0, 0.01, 2.0).unwrap();
        let p = pos(&cfg, 0.2);
        let s = solve_spectrum(&cfg, &p, 12, DEFAULT_TOL).unwrap();
        for n in 1..=12 {
            let cold = solve_frequency(&cfg, &p, n, DEFAULT_TOL, None).unwrap();
            let warm = solve_frequency(&cfg, &p, n, DEFAULT_TOL, Some(s.omega(n) + 0.05)).unwrap();
            assert!((cold - s.omega(n)).abs() < 1e-12);
            assert!((warm - s.omega(n)).abs() < 1e-12);
        }
    }

    #[test]
    fn rejects_bad_arguments() {
        let cfg = CavityConfig::with_alpha(2.0, 0.01, 2.0).unwrap();
        let p = pos(&cfg, 0.2);
        assert!(solve_spectrum(&cfg, &p, 0, 1e-12).is_err());
        assert!(solve_spectrum(&cfg, &p, 3, 0.0).is_err());
        assert!(solve_frequency(&cfg, &p, 0, 1e-12, None).is_err());
    }
}
