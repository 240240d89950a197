//! One function per subcommand, each turning resolved options into a report.

use std::f64::consts::PI;
use std::io::Write;

use rayon::prelude::*;
use serde_json::Value;

use mim_core::dynamics::{
    diagnostics_quadrature, reconstruct_profile, FrequencyModel, InitialData, MembraneTrajectory,
    Simulation, SimulationSettings,
};
use mim_core::modes::{default_q_step, modes, thin_mode, QuadratureSpec};
use mim_core::spectrum::{
    comparison_table, default_beta_grid, midpoint_family, residual, solve_spectrum,
    structural_frequency, structural_set, verify_structural, DEFAULT_TOL,
};
use mim_core::{dynamics, CavityConfig, MembranePosition};

use crate::args::*;
use crate::error::CliError;
use crate::output::{Cell, Report, Table};

type Result<T> = std::result::Result<T, CliError>;

pub const TABLE2_TIMES: [f64; 8] = [100.0, 200.0, 300.0, 400.0, 500.0, 600.0, 200.0 * PI, 700.0];
pub const PROFILE_TIMES: [f64; 3] = [0.0, 100.0, 190.0];

fn require<T>(value: Option<T>, flag: &str) -> Result<T> {
    value.ok_or_else(|| CliError::Usage(format!("missing --{flag}")))
}

fn alpha(c: &CavityArgs) -> Result<f64> {
    match (c.alpha, c.chi0) {
        (Some(a), None) => Ok(a),
        (None, Some(chi)) if chi >= 0.0 => Ok((1.0 + 4.0 * PI * chi).sqrt()),
        (None, Some(chi)) => Err(CliError::Usage(format!("--chi0 {chi} must be non-negative"))),
        _ => Err(CliError::Usage("give exactly one of --alpha and --chi0".into())),
    }
}

fn cavity(c: &CavityArgs) -> Result<CavityConfig> {
    let xi_l = require(c.xi_l, "xi-l")?;
    let delta = require(c.delta, "delta")?;
    Ok(match (c.alpha, c.chi0) {
        (None, Some(chi)) => CavityConfig::new(xi_l, delta, chi)?,
        _ => CavityConfig::with_alpha(xi_l, delta, alpha(c)?)?,
    })
}

/// Cavity for commands where the slab width follows from other options.
fn cavity_without_width(c: &CavityArgs) -> Result<CavityConfig> {
    let xi_l = require(c.xi_l, "xi-l")?;
    if !(xi_l > 0.0) {
        return Err(CliError::Usage(format!("--xi-l {xi_l} must be positive")));
    }
    Ok(CavityConfig::with_alpha(xi_l, c.delta.unwrap_or(0.5 * xi_l), alpha(c)?)?)
}

fn position(cfg: &CavityConfig, p: &PositionArgs) -> Result<MembranePosition> {
    match (p.beta, p.q0) {
        (Some(beta), None) => Ok(MembranePosition::from_beta(cfg, beta)?),
        (None, Some(q0)) => Ok(MembranePosition::from_q0(cfg, q0)?),
        _ => Err(CliError::Usage("give exactly one of --beta and --q0".into())),
    }
}

fn to_json<T: serde::Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("serialisable report metadata")
}

fn positive(value: usize, flag: &str) -> Result<usize> {
    if value == 0 {
        return Err(CliError::Usage(format!("--{flag} must be positive")));
    }
    Ok(value)
}

pub fn spectrum(a: &SpectrumArgs) -> Result<Report> {
    let cfg = cavity(&a.cavity)?;
    let pos = position(&cfg, &a.position)?;
    let count = positive(a.count.unwrap_or(20), "count")?;
    let mut t = Table::new("rows", &["n", "omega", "omega_approx", "error_bound", "percent"]);
    for r in comparison_table(&cfg, pos.beta(), count)? {
        t.push(vec![r.n.into(), r.omega.into(), r.omega_approx.into(), r.error_bound.into(), r.percent.into()]);
    }
    let mut report = Report::default();
    report.meta.insert("config".into(), to_json(&cfg));
    report.meta.insert("position".into(), to_json(&pos));
    report.tables.push(t);
    Ok(report)
}

pub fn structural(a: &StructuralArgs) -> Result<Report> {
    let base = cavity_without_width(&a.cavity)?;
    let set = match (a.n, a.k) {
        (Some(n), Some(k)) => {
            let sf = structural_frequency(&base, n, k)?;
            if let Some(delta) = a.cavity.delta {
                if (delta - sf.delta_required).abs() > 1e-12 * base.xi_l() {
                    return Err(CliError::Usage(format!(
                        "--delta {delta} differs from the structural width {} for (n, k) = ({n}, {k})",
                        sf.delta_required
                    )));
                }
            }
            vec![sf]
        }
        (None, None) => structural_set(&base, a.n_max.unwrap_or(5), a.k_max.unwrap_or(5))?,
        _ => return Err(CliError::Usage("give both --n and --k, or neither".into())),
    };
    let mut headers = vec!["n", "k", "omega", "omega_over_pi", "delta_required"];
    if a.verify {
        headers.extend(["max_residual", "members", "grid_points", "result"]);
    }
    let mut t = Table::new("rows", &headers);
    let grid = a.grid.unwrap_or(100);
    let tol = a.tol.unwrap_or(1e-10);
    let reports = if a.verify {
        set.par_iter()
            .map(|sf| {
                let cfg = base.with_delta0(sf.delta_required)?;
                verify_structural(&cfg, sf, &default_beta_grid(&cfg, grid), tol).map(Some)
            })
            .collect::<std::result::Result<Vec<_>, _>>()?
    } else {
        vec![None; set.len()]
    };
    let mut failed = 0;
    for (sf, rep) in set.iter().zip(&reports) {
        let mut row = vec![
            sf.n.into(),
            sf.k.into(),
            sf.omega.into(),
            (sf.omega / PI).into(),
            sf.delta_required.into(),
        ];
        if let Some(r) = rep {
            row.extend([r.max_residual.into(), r.members.into(), r.grid_points.into(), r.pass.into()]);
            failed += usize::from(!r.pass);
        }
        t.push(row);
    }
    let mut report = Report::default();
    report.meta.insert("xi_l".into(), base.xi_l().into());
    report.meta.insert("alpha".into(), base.alpha().into());
    report.tables.push(t);
    if failed > 0 {
        report.failure = Some(format!("{failed} structural frequencies failed verification"));
    }
    Ok(report)
}

pub fn midpoint(a: &MidpointArgs) -> Result<Report> {
    if a.cavity.delta.is_some() {
        return Err(CliError::Usage("the slab width is fixed by the family; drop --delta".into()));
    }
    let xi_l = require(a.cavity.xi_l, "xi-l")?;
    let al = alpha(&a.cavity)?;
    let mut t = Table::new("rows", &["n", "gamma", "delta", "omega", "residual"]);
    for sol in midpoint_family(xi_l, al, a.n_max.unwrap_or(3))? {
        let cfg = CavityConfig::with_alpha(xi_l, sol.delta_n, al)?;
        let beta = MembranePosition::centered(&cfg).beta();
        let res = residual(&cfg, beta, sol.omega_n);
        t.push(vec![sol.n.into(), sol.gamma.into(), sol.delta_n.into(), sol.omega_n.into(), res.into()]);
    }
    let mut report = Report::default();
    report.meta.insert("xi_l".into(), xi_l.into());
    report.meta.insert("alpha".into(), al.into());
    report.tables.push(t);
    Ok(report)
}

pub fn sweep(a: &SweepArgs) -> Result<Report> {
    let cfg = cavity(&a.cavity)?;
    let points = positive(a.points.unwrap_or(100), "points")?;
    let count = positive(a.count.unwrap_or(29), "count")?;
    let spectra = default_beta_grid(&cfg, points)
        .par_iter()
        .map(|&beta| {
            let pos = MembranePosition::from_beta(&cfg, beta)?;
            solve_spectrum(&cfg, &pos, count, DEFAULT_TOL)
        })
        .collect::<std::result::Result<Vec<_>, _>>()?;
    let mut t = Table::new("rows", &["beta", "n", "omega"]);
    for s in &spectra {
        for (i, &w) in s.omegas.iter().enumerate() {
            t.push(vec![s.pos.beta().into(), (i + 1).into(), w.into()]);
        }
    }
    let mut report = Report::default();
    report.meta.insert("config".into(), to_json(&cfg));
    report.tables.push(t);
    Ok(report)
}

fn xi_grid(xi_l: f64, points: usize) -> Result<Vec<f64>> {
    if points < 2 {
        return Err(CliError::Usage("--points must be at least 2".into()));
    }
    Ok((0..points).map(|i| xi_l * i as f64 / (points - 1) as f64).collect())
}

pub fn mode_profiles(a: &ModesArgs) -> Result<Report> {
    let cfg = cavity(&a.cavity)?;
    let pos = position(&cfg, &a.position)?;
    let count = positive(a.count.unwrap_or(4), "count")?;
    let xis = xi_grid(cfg.xi_l(), a.points.unwrap_or(201))?;
    let ms = modes(&cfg, &pos, count)?;
    let thin = if a.thin {
        (1..=count).map(|n| thin_mode(&cfg, &pos, n)).collect::<std::result::Result<Vec<_>, _>>()?
    } else {
        Vec::new()
    };
    let mut headers = vec!["n", "xi", "value", "derivative"];
    if a.thin {
        headers.push("thin_value");
    }
    let mut t = Table::new("rows", &headers);
    for (i, m) in ms.iter().enumerate() {
        for &x in &xis {
            let mut row: Vec<Cell> = vec![m.n.into(), x.into(), m.value(x).into(), m.derivative(x).into()];
            if let Some(tm) = thin.get(i) {
                row.push(tm.value(x).into());
            }
            t.push(row);
        }
    }
    let mut report = Report::default();
    report.meta.insert("config".into(), to_json(&cfg));
    report.meta.insert("position".into(), to_json(&pos));
    report.meta.insert("omega".into(), to_json(&ms.iter().map(|m| m.omega).collect::<Vec<_>>()));
    report.meta.insert("norming".into(), to_json(&ms.iter().map(|m| m.norming).collect::<Vec<_>>()));
    report.tables.push(t);
    Ok(report)
}

pub fn couplings(a: &CouplingsArgs) -> Result<Report> {
    let cfg = cavity(&a.cavity)?;
    let pos = position(&cfg, &a.position)?;
    let m = positive(a.count.unwrap_or(4), "count")?;
    let h = a.step.unwrap_or_else(|| default_q_step(&cfg));
    let cm = dynamics::coupling_matrices_with(&cfg, &pos, m, h, &QuadratureSpec::default())?;
    let mut t = Table::new("rows", &["m", "n", "omega_q", "theta", "gamma"]);
    for i in 0..m {
        for j in 0..m {
            t.push(vec![
                (i + 1).into(),
                (j + 1).into(),
                cm.omega_q[i][j].into(),
                cm.theta[i][j].into(),
                cm.gamma[i][j].into(),
            ]);
        }
    }
    let mut report = Report::default();
    report.meta.insert("config".into(), to_json(&cfg));
    report.meta.insert("position".into(), to_json(&pos));
    report.meta.insert("omega".into(), to_json(&cm.omega));
    report.meta.insert("antisymmetry_defect".into(), cm.antisymmetry_defect().into());
    report.meta.insert("step".into(), h.into());
    report.tables.push(t);
    Ok(report)
}

fn sorted_times(times: &[f64], flag: &str) -> Result<Vec<f64>> {
    if let Some(t) = times.iter().find(|t| !(t.is_finite() && **t >= 0.0)) {
        return Err(CliError::Usage(format!("--{flag} value {t} must be finite and non-negative")));
    }
    let mut out = times.to_vec();
    out.sort_by(f64::total_cmp);
    out.dedup();
    Ok(out)
}

pub fn simulate(a: &SimulateArgs, err: &mut dyn Write) -> Result<Report> {
    let cfg = cavity(&a.cavity)?;
    let center = a.center.unwrap_or(1.2179272);
    let amplitude = a.amplitude.unwrap_or(0.1);
    let traj = if amplitude == 0.0 {
        MembraneTrajectory::stationary(center)
    } else {
        MembraneTrajectory::cosine(center, amplitude, a.frequency.unwrap_or(0.01))
    };
    let defaults = SimulationSettings::default();
    let settings = SimulationSettings {
        m_track: positive(a.m_track.unwrap_or(defaults.m_track), "m-track")?,
        m_series: positive(a.m_series.unwrap_or(defaults.m_series), "m-series")?,
        model: match a.model {
            Some(Model::Thin) => FrequencyModel::FirstOrderThin,
            Some(Model::Exact) | None => FrequencyModel::Exact,
        },
        init: InitialData {
            n: positive(a.mode.unwrap_or(1), "mode")?,
            g0: a.g0.unwrap_or(1.0),
            g1: a.g1.unwrap_or(0.0),
        },
        rtol: a.rtol.unwrap_or(defaults.rtol),
        atol: a.atol.unwrap_or(defaults.atol),
    };
    if settings.init.n > settings.m_track.max(settings.m_series) {
        return Err(CliError::Usage("--mode must not exceed the number of modes".into()));
    }
    let diag_times = sorted_times(a.times.as_deref().unwrap_or(&TABLE2_TIMES), "times")?;
    let profile_times = sorted_times(a.profile_times.as_deref().unwrap_or(&PROFILE_TIMES), "profile-times")?;
    let xis = xi_grid(cfg.xi_l(), a.points.unwrap_or(201))?;

    let sim = Simulation::new(&cfg, &traj, settings)?;
    for w in &sim.warnings {
        let _ = writeln!(err, "warning: {w}");
    }
    let all = sorted_times(&[diag_times.clone(), profile_times.clone()].concat(), "times")?;
    let run = sim.run(&all)?;
    let ms = sim.multiple_scales()?;
    let index_of = |tau: f64| all.iter().position(|t| *t == tau).expect("time was integrated");

    let mut diag = Table::new(
        "diagnostics",
        &["tau", "q", "phase", "a", "b", "d", "a_quadrature", "b_quadrature", "d_quadrature"],
    );
    for &tau in &diag_times {
        let i = index_of(tau);
        let (state, d) = (&run.series.states[i], &run.diagnostics[i]);
        let quad = diagnostics_quadrature(&cfg, &ms, state)?;
        diag.push(vec![
            tau.into(),
            state.q.into(),
            ms.phase(tau)?.into(),
            d.a.into(),
            d.b.into(),
            d.d.into(),
            quad.a.into(),
            quad.b.into(),
            quad.d.into(),
        ]);
    }

    let mut profiles = Table::new("profiles", &["tau", "xi", "reconstructed", "multiple_scales", "difference"]);
    let mut norms = Table::new("profile_norms", &["tau", "a", "difference_norm", "percent"]);
    for &tau in &profile_times {
        let state = &run.series.states[index_of(tau)];
        let recon = reconstruct_profile(&cfg, state, &xis)?;
        let lead = ms.potential_leading(&xis, tau)?;
        for ((x, u), v) in xis.iter().zip(&recon).zip(&lead) {
            profiles.push(vec![tau.into(), (*x).into(), (*u).into(), (*v).into(), (u - v).into()]);
        }
        let quad = diagnostics_quadrature(&cfg, &ms, state)?;
        norms.push(vec![tau.into(), quad.a.into(), (quad.d * quad.a / 100.0).into(), quad.d.into()]);
    }

    let mut report = Report::default();
    report.meta.insert("config".into(), to_json(&cfg));
    report.meta.insert("trajectory".into(), to_json(&traj));
    report.meta.insert("settings".into(), to_json(&settings));
    report.meta.insert("table_knots".into(), sim.tables.knots().into());
    report.meta.insert("integration".into(), to_json(&run.series.stats));
    report.meta.insert("warnings".into(), to_json(&sim.warnings));
    report.tables = vec![diag, profiles, norms];
    if let Some(path) = &a.profiles {
        report.side_files.push((1, path.clone()));
    }
    Ok(report)
}
