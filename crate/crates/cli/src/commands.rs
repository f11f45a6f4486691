//! Subcommand bodies. Each returns the files it would write, so callers
//! decide where (or whether) to put them.

use num_complex::Complex64;

use resqfi_core::analysis::{
    self, du_dtheta_photonic, du_dtheta_volterra, fit_power_law_tail, local_minima, measurement_scan,
    qfi_time_scan, qfi_time_scan_photonic, squeezing_advantage, ScanMethod,
};
use resqfi_core::gaussian::{evolve_derivative, evolve_state, qfi_gaussian, wigner, InitialStateSpec, PhaseGrid};
use resqfi_core::propagator::{
    self, find_bound_state, max_volterra_step, PhotonicPropagator, PropagatorTrajectory, SpectralPropagator,
};

use crate::config::{DynamicsMethod, QfiMode, ReservoirKind, RunConfig};
use crate::output::{heatmap_svg, line_svg, Table};
use crate::CliError;

/// One output file.
#[derive(Debug, Clone, PartialEq)]
pub struct Artifact {
    pub name: String,
    pub contents: String,
}

fn csv(name: &str, command: &str, cfg: &RunConfig, table: &Table) -> Artifact {
    Artifact {
        name: name.to_string(),
        contents: table.to_csv(command, &cfg.entries),
    }
}

fn svg(name: &str, contents: String) -> Artifact {
    Artifact {
        name: name.to_string(),
        contents,
    }
}

fn propagate(cfg: &RunConfig) -> Result<Vec<Complex64>, CliError> {
    let grid = &cfg.grid;
    let times = grid.times();
    Ok(match cfg.dynamics_method {
        DynamicsMethod::Volterra => {
            let sd = cfg.ohmic()?;
            analysis::volterra_on_grid(sd, cfg.omega0, grid, max_volterra_step(sd, cfg.omega0))?
        }
        DynamicsMethod::Spectral => {
            let sd = cfg.ohmic()?;
            let bound = find_bound_state(sd, cfg.omega0)?;
            SpectralPropagator::new(sd, cfg.omega0, bound, grid.t_max())?.u_grid(grid.dt, grid.steps + 1)
        }
        DynamicsMethod::Markovian => {
            let sd = cfg.ohmic()?;
            times
                .iter()
                .map(|&t| propagator::u_markovian(sd, cfg.omega0, t, true))
                .collect::<Result<_, _>>()?
        }
        DynamicsMethod::Photonic => {
            let p = PhotonicPropagator::new(cfg.photonic()?, cfg.omega0)?;
            times.iter().map(|&t| p.u(t)).collect()
        }
    })
}

fn wigner_table(cfg: &RunConfig, u: Complex64) -> Result<Table, CliError> {
    let state = evolve_state(&cfg.state, u)?;
    let grid = PhaseGrid::default_for(&cfg.state);
    let field = wigner(&state, &grid)?;
    let mut columns = vec!["im_z\\re_z".to_string()];
    columns.extend(field.xs.iter().map(|x| format!("{x}")));
    let mut table = Table {
        columns,
        rows: Vec::new(),
        notes: Vec::new(),
    };
    for (j, row) in field.values.iter().enumerate() {
        let mut r = vec![Some(field.ys[j])];
        r.extend(row.iter().map(|&w| Some(w)));
        table.push(r);
    }
    let eig = field.covariance.symmetric_eigenvalues();
    table.note("t", cfg.grid.t_max());
    table.note("quadrature_variances", format!("{} {}", eig.min(), eig.max()));
    table.note("grid_integral", field.integral());
    Ok(table)
}

const RATE_STEP: f64 = 0.005;

/// t, Re u, Im u, |u|², Γ, Ω, plus the Wigner function at t_max.
pub fn dynamics(cfg: &RunConfig, with_svg: bool) -> Result<Vec<Artifact>, CliError> {
    let u = propagate(cfg)?;
    let times = cfg.grid.times();
    // Rates come from a refined trajectory: Γ(t) moves on the reservoir
    // time scale, which the output grid need not resolve.
    let k = (cfg.grid.dt / RATE_STEP).ceil().max(1.0) as usize;
    let mut fine_cfg = cfg.clone();
    fine_cfg.grid = analysis::TimeGrid::new(cfg.grid.t_max(), cfg.grid.steps * k)?;
    let traj = PropagatorTrajectory {
        dt: fine_cfg.grid.dt,
        times: fine_cfg.grid.times(),
        u: if k == 1 { u.clone() } else { propagate(&fine_cfg)? },
    };
    let rates = propagator::rates(&traj).ok();
    let mut table = Table::new(&["t", "re_u", "im_u", "abs_u2", "gamma", "omega"]);
    for (i, (&t, z)) in times.iter().zip(&u).enumerate() {
        let (g, o) = match &rates {
            Some(r) if i * k < r.gamma.len() => (Some(r.gamma[i * k]), Some(r.omega[i * k])),
            _ => (None, None),
        };
        table.push(vec![Some(t), Some(z.re), Some(z.im), Some(z.norm_sqr()), g, o]);
    }
    table.note("method", cfg.dynamics_method.name());
    if let Some(sd) = &cfg.ohmic {
        match find_bound_state(sd, cfg.omega0)? {
            Some(b) => table.note("bound_state", format!("E_b={} Z={}", b.energy, b.residue)),
            None => table.note("bound_state", "absent"),
        }
    }
    if let Some(pc) = &cfg.photonic {
        table.note("bound_state", if pc.has_bound_state(cfg.omega0) { "present" } else { "absent" });
    }
    let last = *u.last().expect("grid has at least two points");
    let wig = wigner_table(cfg, last)?;
    let mut out = vec![csv("dynamics.csv", "dynamics", cfg, &table), csv("wigner.csv", "dynamics", cfg, &wig)];
    if with_svg {
        out.push(svg(
            "dynamics.svg",
            line_svg("|u(t)|^2", &times, &[("|u|^2", table.column("abs_u2").unwrap_or_default())]),
        ));
        let xs: Vec<f64> = wig.columns[1..].iter().map(|c| c.parse().unwrap_or(0.0)).collect();
        let ys: Vec<f64> = wig.rows.iter().map(|r| r[0].unwrap_or(0.0)).collect();
        let vals: Vec<Vec<f64>> = wig.rows.iter().map(|r| r[1..].iter().map(|v| v.unwrap_or(0.0)).collect()).collect();
        out.push(svg("wigner.svg", heatmap_svg("W(z) at t_max", &xs, &ys, &vals)));
    }
    Ok(out)
}

/// E_b and residue over a one-parameter sweep.
pub fn spectrum(cfg: &RunConfig, with_svg: bool) -> Result<Vec<Artifact>, CliError> {
    let sd = cfg.ohmic()?;
    let name = cfg.sweep_param.name();
    let mut table = Table::new(&[name, "bound", "e_b", "z", "band_edge", "threshold_frequency"]);
    let mut prev: Option<f64> = None;
    let mut monotone = true;
    for &v in &cfg.sweep_axis {
        let s = sd.with_param(cfg.sweep_param, v)?;
        let b = find_bound_state(&s, cfg.omega0)?;
        if let Some(b) = b {
            if let Some(p) = prev {
                monotone &= b.energy <= p;
            }
            prev = Some(b.energy);
        }
        table.push(vec![
            Some(v),
            Some(if b.is_some() { 1.0 } else { 0.0 }),
            b.map(|b| b.energy),
            b.map(|b| b.residue),
            Some(0.0),
            Some(s.threshold_frequency()),
        ]);
    }
    table.note("e_b", "empty where no bound state exists (bound = 0)");
    if cfg.sweep_param == resqfi_core::reservoir::Parameter::Eta {
        table.note("e_b_monotone_decreasing", monotone);
    }
    let mut out = vec![csv("spectrum.csv", "spectrum", cfg, &table)];
    if with_svg {
        out.push(svg(
            "spectrum.svg",
            line_svg("E_b", &cfg.sweep_axis, &[("E_b", table.column("e_b").unwrap_or_default())]),
        ));
    }
    Ok(out)
}

pub fn qfi(cfg: &RunConfig, with_svg: bool) -> Result<Vec<Artifact>, CliError> {
    match cfg.qfi_mode {
        QfiMode::Time => qfi_time(cfg, with_svg),
        QfiMode::Surface => qfi_surface(cfg, with_svg),
        QfiMode::Nbar => qfi_nbar(cfg, with_svg),
    }
}

fn qfi_time(cfg: &RunConfig, with_svg: bool) -> Result<Vec<Artifact>, CliError> {
    let times = cfg.grid.times();
    let (scan, asym) = match cfg.kind {
        ReservoirKind::Ohmic => {
            let sd = cfg.ohmic()?;
            let scan = qfi_time_scan(&cfg.state, sd, cfg.omega0, &cfg.target, &cfg.grid, cfg.qfi_method)?;
            let asym = match find_bound_state(sd, cfg.omega0)? {
                Some(b) if b.energy < 0.0 => Some(qfi_time_scan(
                    &cfg.state,
                    sd,
                    cfg.omega0,
                    &cfg.target,
                    &cfg.grid,
                    ScanMethod::Asymptotic,
                )?),
                _ => None,
            };
            (scan, asym)
        }
        ReservoirKind::Photonic => {
            if cfg.qfi_method != ScanMethod::Exact {
                return Err(CliError::Config(
                    "the photonic-crystal reservoir supports qfi.method = exact only".into(),
                ));
            }
            (
                qfi_time_scan_photonic(&cfg.state, cfg.photonic()?, cfg.omega0, &cfg.target, &cfg.grid)?,
                None,
            )
        }
    };
    let mut table = Table::new(&["t", "f", "f_asymptotic"]);
    for (i, &t) in times.iter().enumerate() {
        let a = asym.as_ref().and_then(|a| a.values[i]);
        table.push(vec![Some(t), scan.values[i], a]);
    }
    table.note("method", scan.method.name());
    table.note("theta", scan.parameter.name());
    for (i, msg) in &scan.gaps {
        table.note("gap", format!("t={} {msg}", times[*i]));
    }
    if let Ok((p, _)) = fit_power_law_tail(&scan) {
        table.note("power_law_exponent_final_quarter", p);
    }
    let mut out = vec![csv("qfi_time.csv", "qfi", cfg, &table)];
    if with_svg {
        out.push(svg(
            "qfi_time.svg",
            line_svg(
                "F_theta(t)",
                &times,
                &[("F", scan.values.clone()), ("asymptotic", table.column("f_asymptotic").unwrap_or_default())],
            ),
        ));
    }
    Ok(out)
}

fn qfi_surface(cfg: &RunConfig, with_svg: bool) -> Result<Vec<Artifact>, CliError> {
    let sd = cfg.ohmic()?;
    let t = cfg.grid.t_max();
    let adv = squeezing_advantage(
        cfg.nbar(),
        cfg.phi,
        &cfg.beta_axis,
        &cfg.theta_axis,
        sd,
        cfg.omega0,
        &cfg.target,
        t,
    )?;
    let mut columns = vec![format!("{}\\beta", cfg.target.which.name())];
    columns.extend(adv.betas.iter().map(|b| format!("{b}")));
    let mut table = Table {
        columns,
        rows: Vec::new(),
        notes: Vec::new(),
    };
    for (j, row) in adv.delta_f.iter().enumerate() {
        let mut r = vec![Some(adv.thetas[j])];
        r.extend(row.iter().map(|&v| Some(v)));
        table.push(r);
    }
    table.note("t", t);
    table.note("nbar", cfg.nbar());
    let mut thr = Table::new(&[cfg.target.which.name(), "beta_threshold", "z"]);
    for (j, &th) in adv.thetas.iter().enumerate() {
        thr.push(vec![Some(th), adv.threshold[j], Some(adv.residues[j])]);
    }
    thr.note("beta_threshold", "root of Theta(beta, nbar) = nbar away from beta = 0; empty if none");
    let mut out = vec![
        csv("delta_f.csv", "qfi", cfg, &table),
        csv("threshold.csv", "qfi", cfg, &thr),
    ];
    if with_svg {
        out.push(svg(
            "delta_f.svg",
            heatmap_svg("delta F over (beta, theta)", &adv.betas, &adv.thetas, &adv.delta_f),
        ));
    }
    Ok(out)
}

fn qfi_nbar(cfg: &RunConfig, with_svg: bool) -> Result<Vec<Artifact>, CliError> {
    let t = cfg.grid.t_max();
    let steps = match cfg.kind {
        ReservoirKind::Ohmic => ((t / max_volterra_step(cfg.ohmic()?, cfg.omega0)).ceil() as usize).max(1),
        ReservoirKind::Photonic => 1,
    };
    let grid = analysis::TimeGrid::new(t, steps)?;
    let d = match cfg.kind {
        ReservoirKind::Ohmic => du_dtheta_volterra(cfg.ohmic()?, cfg.omega0, &cfg.target, &grid)?,
        ReservoirKind::Photonic => du_dtheta_photonic(cfg.photonic()?, cfg.omega0, &cfg.target, &grid)?,
    };
    let (u, du) = (*d.u.last().expect("grid"), *d.du.last().expect("grid"));
    let mut columns = vec!["nbar".to_string()];
    columns.extend(cfg.beta_axis.iter().map(|b| format!("beta={b}")));
    let mut table = Table {
        columns,
        rows: Vec::new(),
        notes: Vec::new(),
    };
    for &n in &cfg.nbar_axis {
        let mut row = vec![Some(n)];
        for &b in &cfg.beta_axis {
            let spec = InitialStateSpec::from_nbar_beta(n, b, cfg.phi)?;
            let f = qfi_gaussian(&evolve_state(&spec, u)?, &evolve_derivative(&spec, u, du))?;
            row.push(Some(f));
        }
        table.push(row);
    }
    table.note("t", t);
    let mut out = vec![csv("qfi_nbar.csv", "qfi", cfg, &table)];
    if with_svg {
        let series: Vec<(String, Vec<Option<f64>>)> = table.columns[1..]
            .iter()
            .map(|c| (c.clone(), table.column(c).unwrap_or_default()))
            .collect();
        let refs: Vec<(&str, Vec<Option<f64>>)> = series.iter().map(|(n, v)| (n.as_str(), v.clone())).collect();
        out.push(svg("qfi_nbar.svg", line_svg("F vs nbar", &cfg.nbar_axis, &refs)));
    }
    Ok(out)
}

/// δθ(t) for O = a + a† and the closed-form minima at E_b t = nπ.
pub fn measure(cfg: &RunConfig, with_svg: bool) -> Result<Vec<Artifact>, CliError> {
    let sd = cfg.ohmic()?;
    if cfg.state.alpha().norm() == 0.0 {
        return Err(CliError::Config(
            "measure needs a displaced state: with alpha = 0 the signal <a + a^dagger> is identically zero".into(),
        ));
    }
    let m = measurement_scan(&cfg.state, sd, cfg.omega0, &cfg.target, &cfg.grid)?;
    let mut table = Table::new(&["t", "delta_theta"]);
    for (&t, d) in m.times.iter().zip(&m.delta) {
        table.push(vec![Some(t), *d]);
    }
    let numeric = local_minima(&m.times, &m.delta);
    let mut minima = Table::new(&["n", "t_analytic", "min_analytic", "t_numeric", "min_numeric", "rel_dev"]);
    let mut worst: f64 = 0.0;
    for (k, &(ta, da)) in m.analytic_minima.iter().enumerate() {
        let near = numeric
            .iter()
            .min_by(|a, b| (a.0 - ta).abs().total_cmp(&(b.0 - ta).abs()))
            .copied();
        let rel = near.map(|(_, dn)| (dn - da).abs() / da);
        if let Some(r) = rel {
            worst = worst.max(r);
        }
        minima.push(vec![
            Some((k + 1) as f64),
            Some(ta),
            Some(da),
            near.map(|p| p.0),
            near.map(|p| p.1),
            rel,
        ]);
    }
    if let Some(b) = m.bound {
        minima.note("bound_state", format!("E_b={} Z={}", b.energy, b.residue));
    } else {
        minima.note("bound_state", "absent; no analytic minima");
    }
    if let Some(d) = m.deb {
        minima.note("d_theta_e_b", d);
    }
    minima.note("max_rel_dev", worst);
    let mut out = vec![
        csv("measure.csv", "measure", cfg, &table),
        csv("measure_minima.csv", "measure", cfg, &minima),
    ];
    if with_svg {
        out.push(svg(
            "measure.svg",
            line_svg("delta theta(t)", &m.times, &[("delta theta", m.delta.clone())]),
        ));
    }
    Ok(out)
}

/// Photonic-crystal propagator with the ω_u QFI when the state is displaced
/// or squeezed.
pub fn photonic(cfg: &RunConfig, with_svg: bool) -> Result<Vec<Artifact>, CliError> {
    let pc = cfg.photonic()?;
    let p = PhotonicPropagator::new(pc, cfg.omega0)?;
    let d = du_dtheta_photonic(pc, cfg.omega0, &cfg.target, &cfg.grid)?;
    let f = analysis::qfi_along(&cfg.state, &d);
    let times = cfg.grid.times();
    let mut table = Table::new(&["t", "re_u", "im_u", "abs_u2", "f_omega_u"]);
    for (i, &t) in times.iter().enumerate() {
        let u = p.u(t);
        table.push(vec![Some(t), Some(u.re), Some(u.im), Some(u.norm_sqr()), f[i].as_ref().ok().copied()]);
    }
    table.note("delta", pc.delta(cfg.omega0));
    table.note("epsilon", pc.epsilon(cfg.omega0)?);
    table.note("bound_state", if pc.has_bound_state(cfg.omega0) { "present" } else { "absent" });
    let mut out = vec![csv("photonic.csv", "photonic", cfg, &table)];
    if with_svg {
        out.push(svg(
            "photonic.svg",
            line_svg("|u(t)|^2", &times, &[("|u|^2", table.column("abs_u2").unwrap_or_default())]),
        ));
    }
    Ok(out)
}
