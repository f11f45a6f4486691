//! Oracle-equivalence and analytic-limit checks.
//!
//! The fourteen numbered checks are the acceptance criteria of the project;
//! `verify full` runs all of them plus a few extra consistency checks, and
//! `verify quick` skips the expensive exact-diagonalization and Fock-space
//! ones.

use std::f64::consts::{FRAC_PI_2, PI};
use std::time::Instant;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use resqfi_core::analysis::{
    deb_deta_closed, deb_domega_c_closed, deb_dtheta, du_dtheta_volterra, find_rayleigh_curse, fit_power_law,
    local_minima, markovian_optimum, measurement_scan, qfi_asymptotic, qfi_time_scan, theta_factor,
    volterra_on_grid, EstimationTarget, ScanMethod, TimeGrid,
};
use resqfi_core::gaussian::{
    evolve_derivative, evolve_state, qfi_gaussian, qfi_markovian_leading, qfi_markovian_nb,
    quadrature_moments, wigner, InitialStateSpec, PhaseGrid,
};
use resqfi_core::propagator::{
    find_bound_state, max_volterra_step, solve_volterra_extrapolated, PhotonicPropagator, SpectralPropagator,
};
use resqfi_core::quad::{integrate_semi_infinite, QuadConfig};
use resqfi_core::reservoir::{DiscreteReservoir, OhmicSpectralDensity, Parameter, PhotonicCrystalReservoir};
use resqfi_core::specfun::gamma;
use resqfi_oracle::{build_fock_state_auto, oracle_step, qfi_fock_oracle, DiscretePropagator};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Level {
    Quick,
    Full,
}

impl Level {
    pub fn name(self) -> &'static str {
        match self {
            Level::Quick => "quick",
            Level::Full => "full",
        }
    }
}

/// What one check measured.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Measurement {
    pub measured: f64,
    pub tolerance: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckOutcome {
    pub id: String,
    pub title: String,
    pub passed: bool,
    pub measured: Option<f64>,
    pub tolerance: Option<String>,
    pub detail: String,
    pub seconds: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub format_version: String,
    pub level: String,
    pub passed: bool,
    pub checks: Vec<CheckOutcome>,
}

type CheckFn = fn() -> Result<Measurement, String>;

pub struct Check {
    pub id: &'static str,
    pub title: &'static str,
    /// Acceptance-criterion number, if this check is one.
    pub criterion: Option<u32>,
    pub quick: bool,
    pub run: CheckFn,
}

impl Check {
    pub fn execute(&self) -> CheckOutcome {
        let start = Instant::now();
        let res = (self.run)();
        let seconds = start.elapsed().as_secs_f64();
        match res {
            Ok(m) => CheckOutcome {
                id: self.id.to_string(),
                title: self.title.to_string(),
                passed: m.passed,
                measured: Some(m.measured),
                tolerance: Some(m.tolerance),
                detail: m.detail,
                seconds,
            },
            Err(e) => CheckOutcome {
                id: self.id.to_string(),
                title: self.title.to_string(),
                passed: false,
                measured: None,
                tolerance: None,
                detail: format!("error: {e}"),
                seconds,
            },
        }
    }
}

pub fn checks() -> Vec<Check> {
    vec![
        Check { id: "c01_threshold", title: "bound-state threshold eta* at wc=4.5, s=0.5", criterion: Some(1), quick: true, run: c01_threshold },
        Check { id: "c02_cross_method", title: "Volterra vs spectral vs discrete (N=2000) propagator", criterion: Some(2), quick: false, run: c02_cross_method },
        Check { id: "c03_markov_optimum", title: "Markovian QFI optimum t*kappa and prefactor", criterion: Some(3), quick: true, run: c03_markov_optimum },
        Check { id: "c04_coherent_reduction", title: "beta=0 QFI equals 4 nbar |du|^2", criterion: Some(4), quick: true, run: c04_coherent_reduction },
        Check { id: "c05_power_law", title: "t^2 growth of F on t in [20, 40] with a bound state", criterion: Some(5), quick: true, run: c05_power_law },
        Check { id: "c06_decay", title: "F decays without a bound state", criterion: Some(6), quick: true, run: c06_decay },
        Check { id: "c07_asymptotic", title: "asymptotic QFI vs exact at t=40", criterion: Some(7), quick: true, run: c07_asymptotic },
        Check { id: "c08_theta_limits", title: "Theta(beta, nbar) limits", criterion: Some(8), quick: true, run: c08_theta_limits },
        Check { id: "c09_rayleigh_curse", title: "zero of dE_b/ds at wc=10", criterion: Some(9), quick: true, run: c09_rayleigh_curse },
        Check { id: "c10_deb_dual", title: "closed-form vs implicit dE_b for eta and omega_c", criterion: Some(10), quick: true, run: c10_deb_dual },
        Check { id: "c11_fock_oracle", title: "Gaussian QFI vs truncated-Fock SLD oracle", criterion: Some(11), quick: false, run: c11_fock_oracle },
        Check { id: "c12_measurement", title: "error-propagation minima vs closed form", criterion: Some(12), quick: true, run: c12_measurement },
        Check { id: "c13_photonic", title: "photonic-crystal plateau and decay", criterion: Some(13), quick: true, run: c13_photonic },
        Check { id: "c14_wigner", title: "Wigner normalization and squeezing survival", criterion: Some(14), quick: true, run: c14_wigner },
        Check { id: "x_rabi", title: "single-mode exact diagonalization vs Rabi formula", criterion: None, quick: true, run: x_rabi },
        Check { id: "x_sum_rule", title: "spectral sum rule Z + band weight = 1", criterion: None, quick: true, run: x_sum_rule },
        Check { id: "x_fock_moments", title: "Fock-space moments reproduce d and sigma", criterion: None, quick: true, run: x_fock_moments },
    ]
}

pub fn run(level: Level) -> Report {
    let outcomes: Vec<CheckOutcome> = checks()
        .iter()
        .filter(|c| level == Level::Full || c.quick)
        .map(Check::execute)
        .collect();
    Report {
        format_version: crate::output::FORMAT_VERSION.to_string(),
        level: level.name().to_string(),
        passed: outcomes.iter().all(|o| o.passed),
        checks: outcomes,
    }
}

fn e<E: std::fmt::Display>(x: E) -> String {
    x.to_string()
}

fn within(measured: f64, tol: f64, tolerance: String, detail: String) -> Result<Measurement, String> {
    Ok(Measurement {
        measured,
        passed: measured <= tol,
        tolerance,
        detail,
    })
}

fn golden_max<F: Fn(f64) -> f64>(f: F, mut a: f64, mut b: f64) -> (f64, f64) {
    let r = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = b - r * (b - a);
    let mut d = a + r * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    while b - a > 1e-10 {
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - r * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + r * (b - a);
            fd = f(d);
        }
    }
    let x = 0.5 * (a + b);
    (x, f(x))
}

fn c01_threshold() -> Result<Measurement, String> {
    let (wc, s, w0) = (4.5, 0.5, 1.0);
    // y(0) = ω0 − ∫ J(ω)/ω dω by quadrature, with ω = x² to absorb the
    // ω^{s−1} endpoint singularity.
    let y0 = |eta: f64| -> Result<f64, String> {
        let sd = OhmicSpectralDensity::new(eta, wc, s).map_err(e)?;
        let cfg = QuadConfig::default();
        let r = integrate_semi_infinite(
            |x| {
                if x == 0.0 {
                    return 0.0;
                }
                2.0 * sd.evaluate_j(x * x).unwrap_or(0.0) / x
            },
            0.0,
            wc.sqrt(),
            &cfg,
        )
        .map_err(e)?;
        Ok(w0 - r.value)
    };
    let (mut lo, mut hi) = (0.01, 1.0);
    if !(y0(lo)? > 0.0 && y0(hi)? < 0.0) {
        return Err("threshold not bracketed by eta in [0.01, 1]".into());
    }
    while hi - lo > 1e-12 {
        let m = 0.5 * (lo + hi);
        if y0(m)? > 0.0 {
            lo = m;
        } else {
            hi = m;
        }
    }
    let eta_star = 0.5 * (lo + hi);
    let formula = w0 / (wc * gamma(s).map_err(e)?);
    // The existence criterion used by the solvers must flip at the same point.
    let below = OhmicSpectralDensity::new(eta_star - 1e-6, wc, s).map_err(e)?;
    let above = OhmicSpectralDensity::new(eta_star + 1e-6, wc, s).map_err(e)?;
    let consistent = find_bound_state(&below, w0).map_err(e)?.is_none() && find_bound_state(&above, w0).map_err(e)?.is_some();
    let dev = (eta_star - formula).abs();
    Ok(Measurement {
        measured: dev,
        tolerance: "|eta*_bisect - w0/(wc Gamma(s))| <= 1e-6".into(),
        passed: dev <= 1e-6 && consistent,
        detail: format!(
            "eta*_bisect = {eta_star:.9}, w0/(wc Gamma(s)) = {formula:.9}; find_bound_state flips at eta*: {consistent}; quoted 0.12539 differs from the formula by {:.2e}",
            (formula - 0.12539).abs()
        ),
    })
}

fn c02_cross_method() -> Result<Measurement, String> {
    let sd = OhmicSpectralDensity::new(0.4, 10.0, 1.0).map_err(e)?;
    let dt = 0.01;
    let traj = solve_volterra_extrapolated(&sd, 1.0, 40.0, dt).map_err(e)?;
    let bound = find_bound_state(&sd, 1.0).map_err(e)?;
    let sp = SpectralPropagator::new(&sd, 1.0, bound, 40.0).map_err(e)?;
    let us = sp.u_grid(dt, traj.len());
    let spectral = traj.u.iter().zip(&us).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
    let disc = sd.discretize(2000, 200.0).map_err(e)?;
    let dp = DiscretePropagator::new(&disc, 1.0).map_err(e)?;
    let discrete = traj
        .times
        .iter()
        .zip(&traj.u)
        .map(|(&t, u)| (dp.u(t) - u).norm())
        .fold(0.0, f64::max);
    within(
        spectral.max(discrete),
        5e-3,
        "max_t |u_volterra - u_other| <= 5e-3".into(),
        format!("spectral {spectral:.3e}, discrete N=2000 {discrete:.3e}"),
    )
}

fn c03_markov_optimum() -> Result<Measurement, String> {
    // κ = 1, ∂κ = 1, n̄ = 1: F/(∂ ln κ)²n̄ as a function of κt.
    let leading = |x: f64| qfi_markovian_leading(1.0, 0.0, 1.0, 1.0, x).unwrap_or(f64::NAN);
    let (x, f) = golden_max(leading, 0.05, 5.0);
    let (xa, fa) = markovian_optimum(1.0, 1.0).map_err(e)?;
    // The full expression approaches the leading term when n̄β → ∞ and β → 0.
    let (nbar, beta) = (1e10, 1e-4);
    let full = |x: f64| qfi_markovian_nb(nbar, beta, 1.0, 1.0, x).unwrap_or(f64::NAN) / nbar;
    let (xf, ff) = golden_max(full, 0.05, 5.0);
    let dev = (x - 0.80).abs().max((f - 0.65).abs());
    let analytic_ok = (x - xa).abs() <= 5e-3 * xa && (f - fa).abs() <= 5e-3 * fa;
    let full_ok = (xf - xa).abs() <= 5e-3 * xa && (ff - fa).abs() <= 5e-3 * fa;
    Ok(Measurement {
        measured: dev,
        tolerance: "|t*k - 0.80| <= 0.005 and |F*/(dlnk^2 nbar) - 0.65| <= 0.005".into(),
        passed: dev <= 0.005 && analytic_ok && full_ok,
        detail: format!(
            "numeric t*k = {x:.5}, prefactor = {f:.5}; Lambert-W {xa:.5}, {fa:.5}; full expression at nbar=1e10, beta=1e-4: {xf:.5}, {ff:.5}"
        ),
    })
}

fn random_target(rng: &mut ChaCha8Rng) -> Parameter {
    [Parameter::Eta, Parameter::OmegaC, Parameter::S][rng.gen_range(0..3)]
}

fn c04_coherent_reduction() -> Result<Measurement, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let sd = OhmicSpectralDensity::new(rng.gen_range(0.05..1.0), rng.gen_range(1.0..10.0), rng.gen_range(0.5..2.0))
            .map_err(e)?;
        let spec = InitialStateSpec::from_nbar_beta(rng.gen_range(0.5..100.0), 0.0, rng.gen_range(0.0..2.0 * PI))
            .map_err(e)?;
        let target = EstimationTarget::new(random_target(&mut rng));
        let t = rng.gen_range(1.0..10.0);
        let grid = TimeGrid::new(t, 20).map_err(e)?;
        let d = du_dtheta_volterra(&sd, 1.0, &target, &grid).map_err(e)?;
        for (&u, &du) in d.u.iter().zip(&d.du).skip(1) {
            let f = qfi_gaussian(&evolve_state(&spec, u).map_err(e)?, &evolve_derivative(&spec, u, du)).map_err(e)?;
            let want = 4.0 * spec.nbar() * du.norm_sqr();
            if want > 0.0 {
                worst = worst.max((f - want).abs() / want);
            }
        }
    }
    within(worst, 1e-6, "relative deviation <= 1e-6".into(), "100 random draws of (eta, wc, s, nbar, phi, theta, t)".into())
}

fn fig1_scan(eta: f64, which: Parameter) -> Result<(Vec<f64>, Vec<f64>), String> {
    let sd = OhmicSpectralDensity::new(eta, 4.5, 0.5).map_err(e)?;
    let spec = InitialStateSpec::from_nbar_beta(100.0, 0.5, 0.0).map_err(e)?;
    let grid = TimeGrid::new(40.0, 400).map_err(e)?;
    let scan = qfi_time_scan(&spec, &sd, 1.0, &EstimationTarget::new(which), &grid, ScanMethod::Exact).map_err(e)?;
    if !scan.gaps.is_empty() {
        return Err(format!("scan has {} gaps: {}", scan.gaps.len(), scan.gaps[0].1));
    }
    Ok(scan.points().into_iter().unzip())
}

const THETAS: [Parameter; 3] = [Parameter::Eta, Parameter::OmegaC, Parameter::S];

fn c05_power_law() -> Result<Measurement, String> {
    let mut worst: f64 = 0.0;
    let mut detail = Vec::new();
    for which in THETAS {
        let (t, f) = fig1_scan(0.4, which)?;
        let (tw, fw): (Vec<f64>, Vec<f64>) = t.iter().zip(&f).filter(|(t, _)| **t >= 20.0).map(|(a, b)| (*a, *b)).unzip();
        let (p, _) = fit_power_law(&tw, &fw).map_err(e)?;
        worst = worst.max((p - 2.0).abs());
        detail.push(format!("{} {p:.4}", which.name()));
    }
    within(worst, 0.05, "|exponent - 2| <= 0.05".into(), format!("exponents: {}", detail.join(", ")))
}

fn c06_decay() -> Result<Measurement, String> {
    let mut worst: f64 = 0.0;
    let mut detail = Vec::new();
    for which in THETAS {
        let (_, f) = fig1_scan(0.05, which)?;
        let max = f.iter().copied().fold(0.0, f64::max);
        let ratio = f.last().copied().unwrap_or(f64::NAN) / max;
        worst = worst.max(ratio);
        detail.push(format!("{} {ratio:.3e}", which.name()));
    }
    within(worst, 0.1, "F(40)/max F < 0.1".into(), format!("ratios: {}", detail.join(", ")))
}

fn c07_asymptotic() -> Result<Measurement, String> {
    let spec = InitialStateSpec::from_nbar_beta(100.0, 0.5, 0.0).map_err(e)?;
    let mut worst: f64 = 0.0;
    let mut detail = Vec::new();
    for &eta in &[0.34, 0.4, 0.55] {
        let sd = OhmicSpectralDensity::new(eta, 4.5, 0.5).map_err(e)?;
        let bound = find_bound_state(&sd, 1.0).map_err(e)?;
        let b = bound.ok_or("no bound state")?;
        for which in THETAS {
            let (_, f) = fig1_scan(eta, which)?;
            let exact = *f.last().ok_or("empty scan")?;
            let target = EstimationTarget::new(which);
            let deb = deb_dtheta(&sd, 1.0, bound, &target).map_err(e)?;
            let asym = qfi_asymptotic(&spec, &b, deb, 40.0);
            let rel = (asym - exact).abs() / exact;
            worst = worst.max(rel);
            detail.push(format!("eta={eta} {}: {rel:.2e}", which.name()));
        }
    }
    within(worst, 0.1, "|F_asym/F_exact - 1| <= 0.1 at t = 40".into(), detail.join("; "))
}

fn c08_theta_limits() -> Result<Measurement, String> {
    let mut exact_zero = true;
    for &n in &[0.5, 1.0, 37.0, 100.0, 1e4] {
        for &z in &[0.1, 0.5, 0.9] {
            exact_zero &= theta_factor(0.0, n, z) == n;
        }
    }
    let mut worst: f64 = 0.0;
    let mut detail = Vec::new();
    for &(eta, wc, s) in &[(0.4, 4.5, 0.5), (0.4, 10.0, 1.0), (2.0, 10.0, 1.0)] {
        let sd = OhmicSpectralDensity::new(eta, wc, s).map_err(e)?;
        let z = find_bound_state(&sd, 1.0).map_err(e)?.ok_or("no bound state")?.residue;
        for &beta in &[0.25, 0.5, 1.0] {
            let nbar = 1e4 / beta;
            let ratio = theta_factor(beta, nbar, z) * (1.0 - z * z) / (beta * nbar);
            worst = worst.max((ratio - 1.0).abs());
            detail.push(format!("Z={z:.3} beta={beta}: {ratio:.5}"));
        }
    }
    Ok(Measurement {
        measured: worst,
        tolerance: "Theta(0, nbar) == nbar; |Theta (1-Z^2)/(beta nbar) - 1| <= 0.01 at beta nbar = 1e4".into(),
        passed: exact_zero && worst <= 0.01,
        detail: format!("Theta(0, nbar) exact: {exact_zero}; {}", detail.join(", ")),
    })
}

fn c09_rayleigh_curse() -> Result<Measurement, String> {
    let s = find_rayleigh_curse(0.4, 10.0, 1.0, 0.5, 3.0).map_err(e)?;
    let ds = |s: f64| -> Result<f64, String> {
        let sd = OhmicSpectralDensity::new(0.4, 10.0, s).map_err(e)?;
        deb_dtheta(&sd, 1.0, find_bound_state(&sd, 1.0).map_err(e)?, &EstimationTarget::new(Parameter::S)).map_err(e)
    };
    let (a, b) = (ds(0.5)?, ds(3.0)?);
    Ok(Measurement {
        measured: (s - 1.2).abs(),
        tolerance: "|s* - 1.2| <= 0.1".into(),
        passed: (s - 1.2).abs() <= 0.1 && a * b < 0.0,
        detail: format!("s* = {s:.6}; dE_b/ds(0.5) = {a:.4e}, dE_b/ds(3) = {b:.4e}"),
    })
}

fn c10_deb_dual() -> Result<Measurement, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let mut worst: f64 = 0.0;
    let mut n = 0;
    while n < 20 {
        let sd = OhmicSpectralDensity::new(rng.gen_range(0.2..2.0), rng.gen_range(1.0..20.0), rng.gen_range(0.3..3.0))
            .map_err(e)?;
        let bound = find_bound_state(&sd, 1.0).map_err(e)?;
        match bound {
            Some(b) if b.energy < -1e-3 => {}
            _ => continue,
        }
        let eta_imp = deb_dtheta(&sd, 1.0, bound, &EstimationTarget::new(Parameter::Eta)).map_err(e)?;
        let eta_cf = deb_deta_closed(&sd, bound).map_err(e)?;
        let wc_imp = deb_dtheta(&sd, 1.0, bound, &EstimationTarget::new(Parameter::OmegaC)).map_err(e)?;
        let wc_cf = deb_domega_c_closed(&sd, bound).map_err(e)?;
        worst = worst
            .max((eta_imp - eta_cf).abs() / eta_cf.abs())
            .max((wc_imp - wc_cf).abs() / wc_cf.abs());
        n += 1;
    }
    within(worst, 1e-6, "relative deviation <= 1e-6".into(), "20 random bound-state points".into())
}

fn c11_fock_oracle() -> Result<Measurement, String> {
    let points: [(f64, f64, f64, f64, f64, Parameter); 10] = [
        (0.4, 10.0, 1.0, 4.0, 0.5, Parameter::Eta),
        (0.4, 10.0, 1.0, 4.0, 0.5, Parameter::OmegaC),
        (0.4, 10.0, 1.0, 4.0, 0.5, Parameter::S),
        (0.2, 3.0, 2.0, 2.0, 0.3, Parameter::Eta),
        (0.05, 5.0, 1.0, 3.0, 0.8, Parameter::S),
        (1.0, 2.0, 0.8, 4.0, 1.0, Parameter::Eta),
        (0.3, 4.5, 0.5, 1.0, 0.2, Parameter::OmegaC),
        (0.6, 8.0, 1.5, 2.5, 0.6, Parameter::S),
        (0.1, 1.0, 1.0, 4.0, 0.25, Parameter::Eta),
        (0.8, 6.0, 0.7, 3.5, 0.9, Parameter::OmegaC),
    ];
    let times = [10.0, 10.0, 10.0, 3.0, 5.0, 2.0, 6.0, 4.0, 8.0, 3.5];
    let mut worst: f64 = 0.0;
    let mut detail = Vec::new();
    for (k, &(eta, wc, s, nbar, beta, which)) in points.iter().enumerate() {
        let t = times[k];
        let sd = OhmicSpectralDensity::new(eta, wc, s).map_err(e)?;
        let spec = InitialStateSpec::from_nbar_beta(nbar, beta, 0.3 * k as f64).map_err(e)?;
        let grid = TimeGrid::new(t, 10).map_err(e)?;
        let d = du_dtheta_volterra(&sd, 1.0, &EstimationTarget::new(which), &grid).map_err(e)?;
        let (u, du) = (*d.u.last().ok_or("empty")?, *d.du.last().ok_or("empty")?);
        let state = evolve_state(&spec, u).map_err(e)?;
        if state.det_sigma() <= 1.0 + 1e-6 {
            return Err(format!("point {k} is not a mixed state"));
        }
        let fg = qfi_gaussian(&state, &evolve_derivative(&spec, u, du)).map_err(e)?;
        let theta = sd.param(which).map_err(e)?;
        let eps = oracle_step(theta);
        let plus = sd.with_param(which, theta + eps).map_err(e)?;
        let minus = sd.with_param(which, theta - eps).map_err(e)?;
        let limit = max_volterra_step(&plus, 1.0).min(max_volterra_step(&minus, 1.0));
        let fock = |sd: &OhmicSpectralDensity| -> Result<resqfi_oracle::FockStateMatrix, String> {
            let u = *volterra_on_grid(sd, 1.0, &grid, limit).map_err(e)?.last().ok_or("empty")?;
            build_fock_state_auto(&evolve_state(&spec, u).map_err(e)?).map_err(e)
        };
        let fo = qfi_fock_oracle(&fock(&minus)?, &fock(&plus)?, eps).map_err(e)?;
        let rel = (fo.value - fg).abs() / fg;
        worst = worst.max(rel);
        detail.push(format!("{rel:.1e}"));
    }
    within(worst, 0.01, "relative deviation <= 1%".into(), format!("per point: {}", detail.join(" ")))
}

fn c12_measurement() -> Result<Measurement, String> {
    let sd = OhmicSpectralDensity::new(2.0, 10.0, 1.0).map_err(e)?;
    let spec = InitialStateSpec::from_alpha(2.5, FRAC_PI_2, 2.5).map_err(e)?;
    let grid = TimeGrid::new(10.0, 1000).map_err(e)?;
    let m = measurement_scan(&spec, &sd, 1.0, &EstimationTarget::new(Parameter::OmegaC), &grid).map_err(e)?;
    let numeric = local_minima(&m.times, &m.delta);
    if m.analytic_minima.len() < 3 {
        return Err("fewer than three analytic minima in the window".into());
    }
    let mut worst: f64 = 0.0;
    let mut products = Vec::new();
    for &(ta, da) in &m.analytic_minima {
        let near = numeric
            .iter()
            .min_by(|a, b| (a.0 - ta).abs().total_cmp(&(b.0 - ta).abs()))
            .ok_or("no numeric minima")?;
        worst = worst.max((near.1 - da).abs() / da);
        products.push(near.0 * near.1);
    }
    let mean = products.iter().sum::<f64>() / products.len() as f64;
    let spread = products.iter().map(|p| (p - mean).abs() / mean).fold(0.0, f64::max);
    Ok(Measurement {
        measured: worst,
        tolerance: "numeric vs analytic minima <= 5%; t * min spread <= 5%".into(),
        passed: worst <= 0.05 && spread <= 0.05,
        detail: format!(
            "{} minima, worst deviation {worst:.2e}, spread of t*min {spread:.2e}",
            m.analytic_minima.len()
        ),
    })
}

fn c13_photonic() -> Result<Measurement, String> {
    let pc = PhotonicCrystalReservoir::new(160.0, 1.0).map_err(e)?;
    let inside = PhotonicPropagator::new(&pc, 159.0).map_err(e)?;
    let outside = PhotonicPropagator::new(&pc, 600.0).map_err(e)?;
    let u0 = (inside.u(0.0) - 1.0).norm().max((outside.u(0.0) - 1.0).norm());
    let tail: Vec<f64> = (0..=200).map(|k| inside.u(20.0 + 0.1 * k as f64).norm_sqr()).collect();
    let (lo, hi) = tail.iter().fold((f64::INFINITY, 0.0f64), |(a, b), &x| (a.min(x), b.max(x)));
    let plateau = lo > 0.05 && (hi - lo) <= 0.05 * hi;
    let decayed = outside.u(10.0).norm_sqr();
    Ok(Measurement {
        measured: decayed,
        tolerance: "|u(10)|^2 < 1e-2 off the gap; plateau > 0 in the gap; |u(0) - 1| <= 1e-6".into(),
        passed: u0 <= 1e-6 && plateau && decayed < 1e-2,
        detail: format!(
            "w0=159: |u|^2 in [{lo:.4}, {hi:.4}] on t in [20, 40]; w0=600: |u(10)|^2 = {decayed:.3e}; |u(0)-1| = {u0:.1e}"
        ),
    })
}

fn c14_wigner() -> Result<Measurement, String> {
    let spec = InitialStateSpec::from_alpha(0.0, 0.0, 1.0).map_err(e)?;
    let mut out = Vec::new();
    for &wc in &[20.0, 1.0] {
        let sd = OhmicSpectralDensity::new(0.1, wc, 0.5).map_err(e)?;
        let traj = solve_volterra_extrapolated(&sd, 1.0, 40.0, max_volterra_step(&sd, 1.0)).map_err(e)?;
        let u = *traj.u.last().ok_or("empty")?;
        let st = evolve_state(&spec, u).map_err(e)?;
        let field = wigner(&st, &PhaseGrid::default_for(&spec)).map_err(e)?;
        let (c, _) = quadrature_moments(&st);
        let eig = c.symmetric_eigenvalues();
        let bound = find_bound_state(&sd, 1.0).map_err(e)?.is_some();
        out.push((bound, field.integral(), eig.min(), eig.max()));
    }
    let (b1, i1, min1, _) = out[0];
    let (b2, i2, min2, _) = out[1];
    let norm_dev = (i1 - 1.0).abs().max((i2 - 1.0).abs());
    Ok(Measurement {
        measured: norm_dev,
        tolerance: "|int W - 1| <= 1e-3; minor variance < 1/2 with bound; >= 0.99/2 without".into(),
        passed: norm_dev <= 1e-3 && b1 && !b2 && min1 < 0.5 && min2 >= 0.99 * 0.5,
        detail: format!(
            "wc=20 (bound {b1}): minor variance {min1:.5}; wc=1 (bound {b2}): minor variance {min2:.5}"
        ),
    })
}

fn x_rabi() -> Result<Measurement, String> {
    let (w0, w1, g) = (1.0, 1.3, 0.25);
    let disc = DiscreteReservoir::from_modes(vec![w1], vec![g]).map_err(e)?;
    let p = DiscretePropagator::new(&disc, w0).map_err(e)?;
    let om = ((w0 - w1) * (w0 - w1) + 4.0 * g * g).sqrt();
    let mut worst: f64 = 0.0;
    for k in 0..=100 {
        let t = 0.3 * k as f64;
        let want = Complex64::from_polar(1.0, -(w0 + w1) * t / 2.0)
            * Complex64::new((om * t / 2.0).cos(), (w1 - w0) / om * (om * t / 2.0).sin());
        worst = worst.max((p.u(t) - want).norm());
    }
    within(worst, 1e-12, "max |u - u_Rabi| <= 1e-12".into(), String::new())
}

fn x_sum_rule() -> Result<Measurement, String> {
    let sd = OhmicSpectralDensity::new(0.4, 10.0, 1.0).map_err(e)?;
    let bound = find_bound_state(&sd, 1.0).map_err(e)?;
    let sp = SpectralPropagator::new(&sd, 1.0, bound, 10.0).map_err(e)?;
    let z = bound.map_or(0.0, |b| b.residue);
    let dev = (z + sp.band_weight() - 1.0).abs();
    within(dev, 1e-6, "|Z + band weight - 1| <= 1e-6".into(), format!("Z = {z:.8}, band = {:.8}", sp.band_weight()))
}

fn x_fock_moments() -> Result<Measurement, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut worst: f64 = 0.0;
    for _ in 0..5 {
        let spec = InitialStateSpec::from_alpha(rng.gen_range(0.0..1.5), rng.gen_range(0.0..6.0), rng.gen_range(0.0..1.0))
            .map_err(e)?;
        let u = Complex64::from_polar(rng.gen_range(0.3..1.0), rng.gen_range(0.0..6.0));
        let st = evolve_state(&spec, u).map_err(e)?;
        let f = build_fock_state_auto(&st).map_err(e)?;
        let n_want = 0.5 * (st.sigma[(0, 0)].re - 1.0) + st.d[0].norm_sqr();
        let a2_want = 0.5 * st.sigma[(0, 1)] + st.d[0] * st.d[0];
        worst = worst
            .max((f.mean_number() - n_want).abs())
            .max((f.mean_a() - st.d[0]).norm())
            .max((f.mean_a2() - a2_want).norm())
            .max((f.trace() - 1.0).abs());
    }
    within(worst, 1e-6, "moment deviation <= 1e-6".into(), "5 random states".into())
}
