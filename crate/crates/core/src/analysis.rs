//! Parameter-estimation analytics: derivatives of u and E_b with respect to
//! the reservoir parameters, the exact, Markovian and asymptotic QFI, and the
//! scan drivers built on them.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::gaussian::{
    self, error_propagation, evolve_derivative, evolve_state, qfi_gaussian, InitialStateSpec,
};
use crate::propagator::{self, find_bound_state, max_volterra_step, BoundState};
use crate::reservoir::{OhmicSpectralDensity, Parameter, PhotonicCrystalReservoir};
use crate::specfun::{gamma, gen_exp_integral_scaled, lambert_w0};

/// Which parameter is estimated, and the base finite-difference step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EstimationTarget {
    pub which: Parameter,
    /// Step at |θ| ≤ 1; the step used is `epsilon · max(1, |θ|)`.
    pub epsilon: f64,
}

impl EstimationTarget {
    pub fn new(which: Parameter) -> Self {
        EstimationTarget { which, epsilon: 1e-7 }
    }

    pub fn with_epsilon(which: Parameter, epsilon: f64) -> Result<Self> {
        if !epsilon.is_finite() || epsilon <= 0.0 || epsilon > 1e-3 {
            return Err(Error::domain("epsilon", epsilon, "0 < epsilon <= 1e-3"));
        }
        Ok(EstimationTarget { which, epsilon })
    }

    pub fn step(&self, theta: f64) -> f64 {
        self.epsilon * theta.abs().max(1.0)
    }

    /// Rejects stencils that would leave the parameter domain.
    pub fn check(&self, theta: f64) -> Result<f64> {
        let eps = self.step(theta);
        let positive = matches!(self.which, Parameter::Eta | Parameter::OmegaC | Parameter::S);
        if positive && !(theta - 2.0 * eps > 0.0) {
            return Err(Error::domain(
                "theta",
                theta,
                "theta - 2 eps > 0 for the central stencil",
            ));
        }
        Ok(eps)
    }
}

/// ∂θu on a fixed time grid from the fourth-order central stencil.
#[derive(Debug, Clone, PartialEq)]
pub struct UDerivative {
    pub u: Vec<Complex64>,
    pub du: Vec<Complex64>,
    /// sup|∂u(ε) − ∂u(ε/2)| / sup|∂u(ε)|.
    pub richardson: f64,
    /// Points where the stencil numerator was below 1e3·ε_mach·|u|.
    pub cancelled: Vec<bool>,
}

const STENCIL: [(f64, f64); 4] = [(2.0, -1.0), (1.0, 8.0), (-1.0, -8.0), (-2.0, 1.0)];

/// [−u(θ+2ε) + 8u(θ+ε) − 8u(θ−ε) + u(θ−2ε)]/(12ε), cross-checked against the
/// same stencil at ε/2.
///
/// `solve(θ)` must return u on the same grid for every θ. The nine solves run
/// in parallel and are combined in a fixed order.
pub fn du_dtheta<F>(solve: F, theta: f64, target: &EstimationTarget) -> Result<UDerivative>
where
    F: Fn(f64) -> Result<Vec<Complex64>> + Sync,
{
    let eps = target.check(theta)?;
    let mut offsets = vec![0.0];
    for scale in [1.0, 0.5] {
        for &(k, _) in STENCIL.iter() {
            offsets.push(k * scale * eps);
        }
    }
    let solved: Vec<Result<Vec<Complex64>>> = offsets.par_iter().map(|&d| solve(theta + d)).collect();
    let mut runs = Vec::with_capacity(solved.len());
    for r in solved {
        runs.push(r?);
    }
    let n = runs[0].len();
    if runs.iter().any(|r| r.len() != n) {
        return Err(Error::InvalidParameter(
            "perturbed solves returned grids of different length".into(),
        ));
    }
    let stencil = |base: usize, h: f64, i: usize| -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for (j, &(_, w)) in STENCIL.iter().enumerate() {
            acc += w * runs[base + j][i];
        }
        acc / (12.0 * h)
    };
    let mut du = Vec::with_capacity(n);
    let mut cancelled = Vec::with_capacity(n);
    let mut diff_max: f64 = 0.0;
    let mut du_max: f64 = 0.0;
    for i in 0..n {
        let d1 = stencil(1, eps, i);
        let d2 = stencil(5, 0.5 * eps, i);
        let numerator = d1.norm() * 12.0 * eps;
        let tiny = numerator < 1e3 * f64::EPSILON * runs[0][i].norm();
        cancelled.push(tiny);
        if !tiny {
            diff_max = diff_max.max((d1 - d2).norm());
            du_max = du_max.max(d1.norm());
        }
        du.push(d1);
    }
    let richardson = if du_max > 0.0 { diff_max / du_max } else { 0.0 };
    if richardson > 1e-4 {
        return Err(Error::RichardsonMismatch { relative: richardson });
    }
    Ok(UDerivative {
        u: runs.swap_remove(0),
        du,
        richardson,
        cancelled,
    })
}

/// Output grid t_k = k·dt, k = 0..=steps.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeGrid {
    pub dt: f64,
    pub steps: usize,
}

impl TimeGrid {
    pub fn new(t_max: f64, steps: usize) -> Result<Self> {
        if !t_max.is_finite() || t_max <= 0.0 || steps == 0 {
            return Err(Error::InvalidParameter(
                "time grid needs t_max > 0 and at least one step".into(),
            ));
        }
        Ok(TimeGrid {
            dt: t_max / steps as f64,
            steps,
        })
    }

    pub fn t_max(&self) -> f64 {
        self.dt * self.steps as f64
    }

    pub fn times(&self) -> Vec<f64> {
        (0..=self.steps).map(|k| k as f64 * self.dt).collect()
    }
}

/// Extrapolated Volterra solution sampled on `grid`. The internal step is
/// the output step divided by the smallest integer that respects
/// `dt_limit`, so every perturbed solve shares the same nodes.
pub fn volterra_on_grid(
    sd: &OhmicSpectralDensity,
    omega0: f64,
    grid: &TimeGrid,
    dt_limit: f64,
) -> Result<Vec<Complex64>> {
    let sub = (grid.dt / dt_limit).ceil().max(1.0) as usize;
    let h = grid.dt / sub as f64;
    let traj = propagator::solve_volterra_extrapolated(sd, omega0, grid.t_max(), h)?;
    Ok((0..=grid.steps).map(|k| traj.u[k * sub]).collect())
}

fn perturbed_dt_limit(sd: &OhmicSpectralDensity, omega0: f64, target: &EstimationTarget) -> Result<f64> {
    let mut limit = max_volterra_step(sd, omega0);
    if target.which == Parameter::OmegaC {
        let wc = sd.omega_c();
        limit = limit.min(0.1 / (wc + 2.0 * target.step(wc)));
    }
    Ok(limit)
}

/// ∂θu for the Ohmic family from the extrapolated Volterra solver.
pub fn du_dtheta_volterra(
    sd: &OhmicSpectralDensity,
    omega0: f64,
    target: &EstimationTarget,
    grid: &TimeGrid,
) -> Result<UDerivative> {
    let theta = sd.param(target.which)?;
    let limit = perturbed_dt_limit(sd, omega0, target)?;
    du_dtheta(
        |th| volterra_on_grid(&sd.with_param(target.which, th)?, omega0, grid, limit),
        theta,
        target,
    )
}

/// ∂u/∂ω_u for the photonic-crystal closed form.
pub fn du_dtheta_photonic(
    pc: &PhotonicCrystalReservoir,
    omega0: f64,
    target: &EstimationTarget,
    grid: &TimeGrid,
) -> Result<UDerivative> {
    if target.which != Parameter::OmegaU {
        return Err(Error::InvalidParameter(
            "the photonic-crystal reservoir is parameterized by omega_u only".into(),
        ));
    }
    let times = grid.times();
    du_dtheta(
        |th| {
            let p = propagator::PhotonicPropagator::new(&pc.with_omega_u(th)?, omega0)?;
            Ok(times.iter().map(|&t| p.u(t)).collect())
        },
        pc.omega_u(),
        target,
    )
}

fn require_bound(bound: Option<BoundState>) -> Result<BoundState> {
    bound.ok_or(Error::NoBoundState)
}

/// ∂θE_b by implicit differentiation of ω0 − E_b − I(E_b; θ) = 0:
/// ∂θE_b = −∂θI / (1 + ∂_E I), both by quadrature.
pub fn deb_dtheta(
    sd: &OhmicSpectralDensity,
    omega0: f64,
    bound: Option<BoundState>,
    target: &EstimationTarget,
) -> Result<f64> {
    let b = require_bound(bound)?;
    if !(b.energy < 0.0) {
        return Err(Error::InvalidParameter(
            "derivative of a bound state on the band edge is not defined".into(),
        ));
    }
    let residual = omega0 - b.energy - sd.self_energy(b.energy)?;
    if residual.abs() > 1e-8 * b.energy.abs().max(1.0) {
        return Err(Error::InvalidParameter(format!(
            "bound state E_b = {} does not solve the eigenvalue equation (residual {residual:e})",
            b.energy
        )));
    }
    let di = sd.self_energy_param_derivative(target.which, b.energy)?;
    let slope = sd.self_energy_slope_quad(b.energy)?;
    Ok(-di / (1.0 + slope))
}

/// Closed-form ∂ηE_b in terms of exponential integrals.
pub fn deb_deta_closed(sd: &OhmicSpectralDensity, bound: Option<BoundState>) -> Result<f64> {
    let b = require_bound(bound)?;
    let (eta, wc, s) = (sd.eta(), sd.omega_c(), sd.s());
    let a = -b.energy / wc;
    let g1 = gamma(s + 1.0)?;
    let f1 = gen_exp_integral_scaled(s + 1.0, a)?;
    let f0 = gen_exp_integral_scaled(s, a)?;
    // Numerator and denominator carry a common factor e^{−E_b/ωc}.
    Ok(wc * f1 * g1 / (eta * f1 * g1 - eta * f0 * g1 - 1.0))
}

/// Closed-form ∂_{ωc}E_b in terms of exponential integrals.
pub fn deb_domega_c_closed(sd: &OhmicSpectralDensity, bound: Option<BoundState>) -> Result<f64> {
    let b = require_bound(bound)?;
    let (eta, wc, s) = (sd.eta(), sd.omega_c(), sd.s());
    let e = b.energy;
    let gs = gamma(s)?;
    let f0 = gen_exp_integral_scaled(s, -e / wc)?;
    let num = eta * gs * (wc * (wc + e) + e * (wc + e - s * wc) * f0);
    let den = eta * wc * (e - s * wc) * gs * f0 + wc * wc * (eta * gs - 1.0);
    Ok(num / den)
}

/// Θ(β, n̄) for the long-time QFI of a displaced squeezed state.
pub fn theta_factor(beta: f64, nbar: f64, z: f64) -> f64 {
    let nb = nbar * beta;
    let z2 = z * z;
    let mix = z2 * (1.0 - z2);
    2.0 * z2 * nb * (1.0 + nb) / (1.0 + 2.0 * nb * mix)
        + nbar * (1.0 - beta) * (1.0 - 2.0 * z2 * ((nb * (1.0 + nb)).sqrt() - nb)) / (1.0 + 4.0 * nb * mix)
}

/// F ≈ 4Z²Θ(β, n̄)(∂θE_b)²t².
pub fn qfi_asymptotic(spec: &InitialStateSpec, bound: &BoundState, deb: f64, t: f64) -> f64 {
    let z = bound.residue;
    4.0 * z * z * theta_factor(spec.beta(), spec.nbar(), z) * deb * deb * t * t
}

/// Maximum over t of the large-n̄ Markovian QFI:
/// t*κ = 1 + W₀(−2/e²)/2 and F* = [−2W₀ − W₀²](∂θ ln κ)² n̄.
pub fn markovian_optimum(dlnkappa: f64, nbar: f64) -> Result<(f64, f64)> {
    if !(nbar > 0.0) {
        return Err(Error::domain("nbar", nbar, "nbar > 0"));
    }
    let w = lambert_w0(-2.0 * (-2.0f64).exp())?;
    Ok((1.0 + 0.5 * w, (-2.0 * w - w * w) * dlnkappa * dlnkappa * nbar))
}

/// κ = πJ(ω0) and ∂θκ = π∂θJ(ω0).
pub fn markovian_rate_derivative(sd: &OhmicSpectralDensity, omega0: f64, which: Parameter) -> Result<(f64, f64)> {
    let kappa = propagator::markovian_rate(sd, omega0)?;
    if which == Parameter::OmegaU {
        return Err(Error::InvalidParameter(
            "omega_u is not a parameter of the Ohmic family".into(),
        ));
    }
    Ok((kappa, std::f64::consts::PI * sd.dj_dparam(which, omega0)))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScanMethod {
    Exact,
    Markovian,
    Asymptotic,
}

impl ScanMethod {
    pub fn name(self) -> &'static str {
        match self {
            ScanMethod::Exact => "exact",
            ScanMethod::Markovian => "markovian",
            ScanMethod::Asymptotic => "asymptotic",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct QfiScanResult {
    pub parameter: Parameter,
    pub method: ScanMethod,
    pub axis: Vec<f64>,
    /// `None` where the point could not be evaluated; see `gaps`.
    pub values: Vec<Option<f64>>,
    pub gaps: Vec<(usize, String)>,
}

impl QfiScanResult {
    fn from_points(parameter: Parameter, method: ScanMethod, axis: Vec<f64>, pts: Vec<Result<f64>>) -> Self {
        let mut values = Vec::with_capacity(pts.len());
        let mut gaps = Vec::new();
        for (i, p) in pts.into_iter().enumerate() {
            match p {
                Ok(v) => values.push(Some(v)),
                Err(e) => {
                    gaps.push((i, e.to_string()));
                    values.push(None);
                }
            }
        }
        QfiScanResult {
            parameter,
            method,
            axis,
            values,
            gaps,
        }
    }

    /// (t, F) pairs with the gaps removed.
    pub fn points(&self) -> Vec<(f64, f64)> {
        self.axis
            .iter()
            .zip(&self.values)
            .filter_map(|(&t, v)| v.map(|v| (t, v)))
            .collect()
    }

    pub fn max(&self) -> Option<(f64, f64)> {
        self.points().into_iter().fold(None, |acc, p| match acc {
            Some(a) if a.1 >= p.1 => Some(a),
            _ => Some(p),
        })
    }
}

/// Exact Gaussian QFI along a trajectory with precomputed (u, ∂θu).
pub fn qfi_along(spec: &InitialStateSpec, deriv: &UDerivative) -> Vec<Result<f64>> {
    deriv
        .u
        .par_iter()
        .zip(deriv.du.par_iter())
        .map(|(&u, &du)| {
            let st = evolve_state(spec, u)?;
            qfi_gaussian(&st, &evolve_derivative(spec, u, du))
        })
        .collect()
}

/// F_θ(t) on `grid` by the chosen method.
pub fn qfi_time_scan(
    spec: &InitialStateSpec,
    sd: &OhmicSpectralDensity,
    omega0: f64,
    target: &EstimationTarget,
    grid: &TimeGrid,
    method: ScanMethod,
) -> Result<QfiScanResult> {
    let times = grid.times();
    let pts: Vec<Result<f64>> = match method {
        ScanMethod::Exact => {
            let d = du_dtheta_volterra(sd, omega0, target, grid)?;
            qfi_along(spec, &d)
        }
        ScanMethod::Markovian => {
            let (kappa, dk) = markovian_rate_derivative(sd, omega0, target.which)?;
            times
                .iter()
                .map(|&t| gaussian::qfi_markovian(spec, kappa, dk, t))
                .collect()
        }
        ScanMethod::Asymptotic => {
            let bound = find_bound_state(sd, omega0)?;
            let b = require_bound(bound)?;
            let deb = deb_dtheta(sd, omega0, bound, target)?;
            times.iter().map(|&t| Ok(qfi_asymptotic(spec, &b, deb, t))).collect()
        }
    };
    Ok(QfiScanResult::from_points(target.which, method, times, pts))
}

/// Exact QFI for the photonic crystal with respect to ω_u.
pub fn qfi_time_scan_photonic(
    spec: &InitialStateSpec,
    pc: &PhotonicCrystalReservoir,
    omega0: f64,
    target: &EstimationTarget,
    grid: &TimeGrid,
) -> Result<QfiScanResult> {
    let d = du_dtheta_photonic(pc, omega0, target, grid)?;
    Ok(QfiScanResult::from_points(
        target.which,
        ScanMethod::Exact,
        grid.times(),
        qfi_along(spec, &d),
    ))
}

/// δF(β, θ) = F − F|_{β=0} at fixed n̄ and t, with the asymptotic threshold.
#[derive(Debug, Clone, PartialEq)]
pub struct SqueezingAdvantage {
    pub betas: Vec<f64>,
    pub thetas: Vec<f64>,
    /// delta_f[j][i] = δF(betas[i], thetas[j]).
    pub delta_f: Vec<Vec<f64>>,
    /// β solving Θ(β, n̄) = n̄ away from β = 0, per θ.
    pub threshold: Vec<Option<f64>>,
    pub residues: Vec<f64>,
}

/// Scans δF over a β × θ grid at time t. For each θ the propagator and its
/// derivative are computed once; the β dependence enters only through the
/// initial state.
#[allow(clippy::too_many_arguments)]
pub fn squeezing_advantage(
    nbar: f64,
    phi: f64,
    betas: &[f64],
    thetas: &[f64],
    sd: &OhmicSpectralDensity,
    omega0: f64,
    target: &EstimationTarget,
    t: f64,
) -> Result<SqueezingAdvantage> {
    let steps = ((t / max_volterra_step(sd, omega0)).ceil() as usize).max(1);
    let grid = TimeGrid::new(t, steps)?;
    let base = InitialStateSpec::from_nbar_beta(nbar, 0.0, phi)?;
    let rows: Vec<Result<(Vec<f64>, Option<f64>, f64)>> = thetas
        .par_iter()
        .map(|&th| {
            let sd_t = sd.with_param(target.which, th)?;
            let d = du_dtheta_volterra(&sd_t, omega0, target, &grid)?;
            let u = *d.u.last().expect("nonempty grid");
            let du = *d.du.last().expect("nonempty grid");
            let f_at = |spec: &InitialStateSpec| -> Result<f64> {
                qfi_gaussian(&evolve_state(spec, u)?, &evolve_derivative(spec, u, du))
            };
            let f0 = f_at(&base)?;
            let mut row = Vec::with_capacity(betas.len());
            for &b in betas {
                row.push(f_at(&InitialStateSpec::from_nbar_beta(nbar, b, phi)?)? - f0);
            }
            let z = find_bound_state(&sd_t, omega0)?.map_or(0.0, |b| b.residue);
            let thr = if z > 0.0 { theta_threshold(nbar, z) } else { None };
            Ok((row, thr, z))
        })
        .collect();
    let mut delta_f = Vec::with_capacity(thetas.len());
    let mut threshold = Vec::with_capacity(thetas.len());
    let mut residues = Vec::with_capacity(thetas.len());
    for r in rows {
        let (row, thr, z) = r?;
        delta_f.push(row);
        threshold.push(thr);
        residues.push(z);
    }
    Ok(SqueezingAdvantage {
        betas: betas.to_vec(),
        thetas: thetas.to_vec(),
        delta_f,
        threshold,
        residues,
    })
}

/// Root of Θ(β, n̄) − n̄ in (0, 1], found by bisection to 1e-6 after locating
/// the first sign change on a grid that starts just above the trivial root
/// at β = 0.
pub fn theta_threshold(nbar: f64, z: f64) -> Option<f64> {
    let g = |b: f64| theta_factor(b, nbar, z) - nbar;
    let n = 2000;
    let mut lo = 1e-9;
    let mut glo = g(lo);
    for k in 1..=n {
        let hi = k as f64 / n as f64;
        let ghi = g(hi);
        if glo == 0.0 {
            return Some(lo);
        }
        if glo.signum() != ghi.signum() {
            let (mut a, mut b) = (lo, hi);
            while b - a > 1e-7 {
                let m = 0.5 * (a + b);
                if g(m).signum() == glo.signum() {
                    a = m;
                } else {
                    b = m;
                }
            }
            return Some(0.5 * (a + b));
        }
        lo = hi;
        glo = ghi;
    }
    None
}

/// s* in [s_lo, s_hi] where ∂sE_b vanishes, by bisection to |∂sE_b| ≤ 1e-8.
pub fn find_rayleigh_curse(eta: f64, omega_c: f64, omega0: f64, s_lo: f64, s_hi: f64) -> Result<f64> {
    let target = EstimationTarget::new(Parameter::S);
    let f = |s: f64| -> Result<f64> {
        let sd = OhmicSpectralDensity::new(eta, omega_c, s)?;
        deb_dtheta(&sd, omega0, find_bound_state(&sd, omega0)?, &target)
    };
    let (mut a, mut b) = (s_lo, s_hi);
    let (mut fa, fb) = (f(a)?, f(b)?);
    if fa.signum() == fb.signum() {
        return Err(Error::NoSignChange {
            what: "d E_b / d s",
            lo: s_lo,
            hi: s_hi,
        });
    }
    let mut m = 0.5 * (a + b);
    for _ in 0..200 {
        m = 0.5 * (a + b);
        let fm = f(m)?;
        if fm.abs() <= 1e-8 || b - a < 1e-14 {
            break;
        }
        if fm.signum() == fa.signum() {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
    }
    Ok(m)
}

/// Least-squares fit of ln F = ln c + p ln t; returns (p, c).
pub fn fit_power_law(t: &[f64], f: &[f64]) -> Result<(f64, f64)> {
    let pts: Vec<(f64, f64)> = t
        .iter()
        .zip(f)
        .filter(|(&t, &f)| t > 0.0 && f > 0.0)
        .map(|(&t, &f)| (t.ln(), f.ln()))
        .collect();
    if pts.len() < 2 {
        return Err(Error::InvalidParameter(
            "power-law fit needs at least two points with t > 0 and F > 0".into(),
        ));
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    if sxx == 0.0 {
        return Err(Error::InvalidParameter("power-law fit needs distinct times".into()));
    }
    let p = sxy / sxx;
    Ok((p, (my - p * mx).exp()))
}

/// [`fit_power_law`] over the final quarter of a scan.
pub fn fit_power_law_tail(scan: &QfiScanResult) -> Result<(f64, f64)> {
    let pts = scan.points();
    let t_end = pts.last().map_or(0.0, |p| p.0);
    let (t, f): (Vec<f64>, Vec<f64>) = pts.into_iter().filter(|p| p.0 >= 0.75 * t_end).unzip();
    fit_power_law(&t, &f)
}

/// Error-propagation precision δθ(t) for O = a + a† with analytic minima.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasurementScan {
    pub times: Vec<f64>,
    /// `None` where the signal derivative vanishes.
    pub delta: Vec<Option<f64>>,
    pub bound: Option<BoundState>,
    pub deb: Option<f64>,
    /// (t_n, min δθ) at E_b t_n = nπ inside the scanned window.
    pub analytic_minima: Vec<(f64, f64)>,
}

pub fn measurement_scan(
    spec: &InitialStateSpec,
    sd: &OhmicSpectralDensity,
    omega0: f64,
    target: &EstimationTarget,
    grid: &TimeGrid,
) -> Result<MeasurementScan> {
    let d = du_dtheta_volterra(sd, omega0, target, grid)?;
    let times = grid.times();
    let delta = d
        .u
        .iter()
        .zip(&d.du)
        .map(|(&u, &du)| error_propagation(spec, u, du).ok())
        .collect();
    let bound = find_bound_state(sd, omega0)?;
    let (deb, analytic_minima) = match bound {
        Some(b) if b.energy < 0.0 && spec.alpha().norm() > 0.0 => {
            let deb = deb_dtheta(sd, omega0, bound, target)?;
            let period = std::f64::consts::PI / b.energy.abs();
            let mut minima = Vec::new();
            let mut k = 1usize;
            while k as f64 * period <= grid.t_max() {
                let t = k as f64 * period;
                minima.push((t, gaussian::min_measurement_error(spec, &b, deb, t)?));
                k += 1;
            }
            (Some(deb), minima)
        }
        _ => (None, Vec::new()),
    };
    Ok(MeasurementScan {
        times,
        delta,
        bound,
        deb,
        analytic_minima,
    })
}

/// Interior local minima (t_i, v_i) with v_i below both neighbours, refined
/// by a parabola through the three samples.
pub fn local_minima(t: &[f64], v: &[Option<f64>]) -> Vec<(f64, f64)> {
    let mut out = Vec::new();
    for i in 1..v.len().saturating_sub(1) {
        if let (Some(a), Some(b), Some(c)) = (v[i - 1], v[i], v[i + 1]) {
            if b < a && b <= c {
                let h = t[i] - t[i - 1];
                let denom = a - 2.0 * b + c;
                let (x, y) = if denom > 0.0 {
                    let off = 0.5 * (a - c) / denom;
                    (t[i] + off * h, b - 0.25 * (a - c) * off)
                } else {
                    (t[i], b)
                };
                out.push((x, y));
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::propagator::u_markovian;

    #[test]
    fn stencil_on_markovian_propagator() {
        let sd = OhmicSpectralDensity::new(0.05, 10.0, 1.0).unwrap();
        let target = EstimationTarget::new(Parameter::Eta);
        let times: Vec<f64> = (0..=20).map(|k| k as f64 * 0.5).collect();
        let d = du_dtheta(
            |eta| {
                let s = sd.with_param(Parameter::Eta, eta)?;
                times.iter().map(|&t| u_markovian(&s, 1.0, t, false)).collect()
            },
            0.05,
            &target,
        )
        .unwrap();
        let (_, dk) = markovian_rate_derivative(&sd, 1.0, Parameter::Eta).unwrap();
        for (i, &t) in times.iter().enumerate().skip(1) {
            let want = -dk * t * d.u[i];
            assert!((d.du[i] - want).norm() <= 1e-6 * want.norm(), "t={t}");
        }
        assert!(d.cancelled[0]);
    }

    #[test]
    fn eta_guard() {
        let target = EstimationTarget::new(Parameter::Eta);
        assert!(target.check(1e-7).is_err());
        assert!(target.check(0.0).is_err());
        assert!(target.check(0.1).is_ok());
        assert!((EstimationTarget::new(Parameter::OmegaC).step(10.0) - 1e-6).abs() < 1e-20);
    }

    #[test]
    fn closed_forms_match_implicit() {
        for &(eta, wc, s) in &[(0.4, 10.0, 1.0), (0.3, 4.5, 0.5), (2.0, 10.0, 1.0), (0.8, 3.0, 2.3)] {
            let sd = OhmicSpectralDensity::new(eta, wc, s).unwrap();
            let b = find_bound_state(&sd, 1.0).unwrap();
            let imp = deb_dtheta(&sd, 1.0, b, &EstimationTarget::new(Parameter::Eta)).unwrap();
            let cf = deb_deta_closed(&sd, b).unwrap();
            assert!((imp - cf).abs() <= 1e-8 * cf.abs(), "eta {imp} {cf}");
            let imp = deb_dtheta(&sd, 1.0, b, &EstimationTarget::new(Parameter::OmegaC)).unwrap();
            let cf = deb_domega_c_closed(&sd, b).unwrap();
            assert!((imp - cf).abs() <= 1e-8 * cf.abs(), "wc {imp} {cf}");
        }
    }

    #[test]
    fn ds_matches_finite_difference() {
        let sd = OhmicSpectralDensity::new(0.4, 10.0, 1.0).unwrap();
        let imp = deb_dtheta(&sd, 1.0, find_bound_state(&sd, 1.0).unwrap(), &EstimationTarget::new(Parameter::S)).unwrap();
        let h = 1e-5;
        let e = |s: f64| {
            find_bound_state(&sd.with_param(Parameter::S, s).unwrap(), 1.0)
                .unwrap()
                .unwrap()
                .energy
        };
        let fd = (e(1.0 + h) - e(1.0 - h)) / (2.0 * h);
        assert!((imp - fd).abs() <= 1e-4 * imp.abs(), "{imp} {fd}");
    }

    #[test]
    fn deb_requires_bound_state() {
        let sd = OhmicSpectralDensity::new(0.05, 4.5, 0.5).unwrap();
        assert_eq!(
            deb_dtheta(&sd, 1.0, None, &EstimationTarget::new(Parameter::Eta)),
            Err(Error::NoBoundState)
        );
    }

    #[test]
    fn theta_limits() {
        for &z in &[0.2, 0.6, 0.95] {
            assert_eq!(theta_factor(0.0, 37.0, z), 37.0);
            let (n, b) = (2e4, 0.5);
            let ratio = theta_factor(b, n, z) * (1.0 - z * z) / (b * n);
            assert!((ratio - 1.0).abs() < 0.01, "z={z} ratio={ratio}");
        }
    }

    #[test]
    fn threshold_solves_theta_equation() {
        let z = 0.75;
        let b = theta_threshold(100.0, z).expect("threshold");
        assert!(b > 0.0 && b < 1.0);
        assert!((theta_factor(b, 100.0, z) - 100.0).abs() < 1e-3);
    }

    #[test]
    fn markovian_optimum_values() {
        let (tk, f) = markovian_optimum(1.0, 1.0).unwrap();
        assert!((tk - 0.7968).abs() < 1e-4);
        assert!((f - 0.6476).abs() < 1e-4);
        assert!(markovian_optimum(1.0, 0.0).is_err());
    }

    #[test]
    fn power_law_fit_recovers_exponent() {
        let t: Vec<f64> = (1..50).map(|k| k as f64).collect();
        let f: Vec<f64> = t.iter().map(|t| 3.0 * t.powf(2.0)).collect();
        let (p, c) = fit_power_law(&t, &f).unwrap();
        assert!((p - 2.0).abs() < 1e-12 && (c - 3.0).abs() < 1e-10);
    }

    #[test]
    fn parabolic_minimum() {
        let t: Vec<f64> = (0..11).map(|k| k as f64 * 0.1).collect();
        let v: Vec<Option<f64>> = t.iter().map(|t| Some((t - 0.43f64).powi(2) + 1.0)).collect();
        let m = local_minima(&t, &v);
        assert_eq!(m.len(), 1);
        assert!((m[0].0 - 0.43).abs() < 1e-12 && (m[0].1 - 1.0).abs() < 1e-12);
    }

    #[test]
    fn rayleigh_curse_location() {
        let s = find_rayleigh_curse(0.4, 10.0, 1.0, 0.5, 3.0).unwrap();
        assert!((s - 1.2).abs() < 0.1, "s* = {s}");
    }
}
