//! The sensor propagator u(t) by three routes: a time-domain Volterra solve,
//! spectral reconstruction from the bound state plus band, and the
//! Markovian limit. Also the closed form for the photonic-crystal reservoir.

use nalgebra::Matrix3;
use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::quad::{self, QuadConfig};
use crate::reservoir::{OhmicSpectralDensity, PhotonicCrystalReservoir};
use crate::specfun::faddeeva;

/// Samples of u(t) on the uniform grid t_n = n·dt.
#[derive(Debug, Clone, PartialEq)]
pub struct PropagatorTrajectory {
    pub dt: f64,
    pub times: Vec<f64>,
    pub u: Vec<Complex64>,
}

/// Master-equation coefficients Γ(t), Ω(t) extracted from a trajectory.
#[derive(Debug, Clone, PartialEq)]
pub struct Rates {
    pub gamma: Vec<f64>,
    pub omega: Vec<f64>,
    /// Index of the first sample with |u| < 1e-12, where the rates stop.
    pub underflow_at: Option<usize>,
}

impl PropagatorTrajectory {
    pub fn len(&self) -> usize {
        self.u.len()
    }

    pub fn is_empty(&self) -> bool {
        self.u.is_empty()
    }

    pub fn rates(&self) -> Result<Rates> {
        rates(self)
    }
}

fn check_omega0(omega0: f64) -> Result<()> {
    if !omega0.is_finite() || omega0 <= 0.0 {
        return Err(Error::domain("omega0", omega0, "finite omega0 > 0"));
    }
    Ok(())
}

/// Largest admissible Volterra time step, min(0.1/ω0, 0.1/ωc).
pub fn max_volterra_step(sd: &OhmicSpectralDensity, omega0: f64) -> f64 {
    (0.1 / omega0).min(0.1 / sd.omega_c())
}

/// Solves u̇ + iω0 u + ∫₀ᵗ ν(t−τ) u(τ) dτ = 0 with u(0) = 1.
///
/// The equation is integrated in the frame rotating at ω0, where the kernel
/// becomes ν̃(x) = ν(x)e^{iω0x}. The memory integral treats the rotated
/// amplitude as piecewise linear between grid points and integrates the
/// kernel against those hat functions exactly (product trapezoidal rule), so
/// the fast ωc-scale structure of ν costs no accuracy. Time stepping is the
/// implicit trapezoidal rule; the update is linear in the new sample and is
/// solved in closed form. Second order in dt, O(N²) work.
pub fn solve_volterra(sd: &OhmicSpectralDensity, omega0: f64, t_max: f64, dt: f64) -> Result<PropagatorTrajectory> {
    check_omega0(omega0)?;
    if !t_max.is_finite() || t_max <= 0.0 {
        return Err(Error::domain("t_max", t_max, "finite t_max > 0"));
    }
    let limit = max_volterra_step(sd, omega0);
    if !dt.is_finite() || dt <= 0.0 || dt > limit * (1.0 + 1e-12) {
        return Err(Error::StepSize { dt, limit });
    }
    let n = (t_max / dt - 1e-9).ceil() as usize;
    let (p, q) = hat_moments(sd, omega0, dt, n);
    // Weight of v_i in the history at lag k = m − i (0 < i < m).
    let w: Vec<Complex64> = (0..=n)
        .map(|k| if k == 0 || k == n { Complex64::new(0.0, 0.0) } else { p[k] + q[k + 1] })
        .collect();
    let q1 = q[1];
    let denom = Complex64::new(1.0, 0.0) + 0.5 * dt * q1;

    let mut v = Vec::with_capacity(n + 1);
    v.push(Complex64::new(1.0, 0.0));
    let mut c_prev = Complex64::new(0.0, 0.0);
    for m in 1..=n {
        let mut h = p[m] * v[0];
        for i in 1..m {
            h += w[m - i] * v[i];
        }
        let next = (v[m - 1] - 0.5 * dt * (c_prev + h)) / denom;
        let mag = next.norm();
        if !mag.is_finite() || mag > 1.0 + 1e-3 {
            return Err(Error::Divergence {
                t: m as f64 * dt,
                magnitude: mag,
            });
        }
        c_prev = h + q1 * next;
        v.push(next);
    }

    let times: Vec<f64> = (0..=n).map(|m| m as f64 * dt).collect();
    let u = v
        .iter()
        .zip(&times)
        .map(|(vm, &t)| vm * Complex64::from_polar(1.0, -omega0 * t))
        .collect();
    Ok(PropagatorTrajectory { dt, times, u })
}

/// Moments of the rotated kernel against the two hat halves on each cell,
/// P_k = ∫ ν̃(x)(x − (k−1)dt)/dt dx and Q_k = ∫ ν̃(x)(k dt − x)/dt dx over
/// x ∈ [(k−1)dt, k dt], by 10-point Gauss–Legendre per cell.
fn hat_moments(sd: &OhmicSpectralDensity, omega0: f64, dt: f64, n: usize) -> (Vec<Complex64>, Vec<Complex64>) {
    let rule = quad::gauss10_rule(0.0, 1.0);
    let mut p = vec![Complex64::new(0.0, 0.0); n + 2];
    let mut q = vec![Complex64::new(0.0, 0.0); n + 2];
    for k in 1..=n + 1 {
        let a = (k - 1) as f64 * dt;
        let mut pk = Complex64::new(0.0, 0.0);
        let mut qk = Complex64::new(0.0, 0.0);
        for &(y, wy) in rule.iter() {
            let x = a + y * dt;
            let kern = sd.memory_kernel(x) * Complex64::from_polar(1.0, omega0 * x);
            pk += wy * y * kern;
            qk += wy * (1.0 - y) * kern;
        }
        p[k] = pk * dt;
        q[k] = qk * dt;
    }
    (p, q)
}

/// Richardson combination (4u_{dt/2} − u_dt)/3 on the dt grid, which removes
/// the leading dt² error term of [`solve_volterra`].
pub fn solve_volterra_extrapolated(
    sd: &OhmicSpectralDensity,
    omega0: f64,
    t_max: f64,
    dt: f64,
) -> Result<PropagatorTrajectory> {
    if !t_max.is_finite() || t_max <= 0.0 || !dt.is_finite() || dt <= 0.0 {
        return Err(Error::domain("t_max / dt", t_max / dt, "finite positive t_max and dt"));
    }
    // Snap the end point to the coarse grid so both solves see n and 2n steps.
    let t_end = (t_max / dt - 1e-9).ceil() * dt;
    let (coarse, fine) = rayon::join(
        || solve_volterra(sd, omega0, t_end, dt),
        || solve_volterra(sd, omega0, t_end, 0.5 * dt),
    );
    let coarse = coarse?;
    let fine = fine?;
    let u = coarse
        .u
        .iter()
        .enumerate()
        .map(|(i, c)| (4.0 * fine.u[2 * i] - c) / 3.0)
        .collect();
    Ok(PropagatorTrajectory {
        dt,
        times: coarse.times,
        u,
    })
}

/// Γ(t) = −Re[u̇/u] and Ω(t) = −Im[u̇/u].
///
/// Differences are taken on ln u, i.e. on ln|u| and on the phase increment
/// between neighbouring samples, which is exact for exponential trajectories.
/// The output stops before the first sample with |u| < 1e-12.
pub fn rates(traj: &PropagatorTrajectory) -> Result<Rates> {
    let underflow_at = traj.u.iter().position(|z| z.norm() < 1e-12);
    let len = underflow_at.unwrap_or(traj.u.len());
    if len < 3 {
        return Err(Error::InvalidParameter(
            "rates need at least three samples with |u| >= 1e-12".into(),
        ));
    }
    let u = &traj.u[..len];
    let dt = traj.dt;
    // ln(u_b / u_a) with the phase on the principal branch.
    let dlog = |a: usize, b: usize| -> Complex64 {
        let q = u[b] / u[a];
        Complex64::new(q.norm().ln(), q.arg())
    };
    let mut gamma = Vec::with_capacity(len);
    let mut omega = Vec::with_capacity(len);
    for i in 0..len {
        let d = if i == 0 {
            (4.0 * dlog(0, 1) - dlog(0, 2)) / (2.0 * dt)
        } else if i == len - 1 {
            -(4.0 * dlog(i, i - 1) - dlog(i, i - 2)) / (2.0 * dt)
        } else {
            dlog(i - 1, i + 1) / (2.0 * dt)
        };
        gamma.push(-d.re);
        omega.push(-d.im);
    }
    Ok(Rates {
        gamma,
        omega,
        underflow_at,
    })
}

/// Isolated eigenenergy below the band and its residue.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundState {
    pub energy: f64,
    pub residue: f64,
}

/// Locates E_b < 0 solving ω0 − E − I(E) = 0, or returns `None` when
/// ω0 > η ωc Γ(s) and no bound state exists.
pub fn find_bound_state(sd: &OhmicSpectralDensity, omega0: f64) -> Result<Option<BoundState>> {
    check_omega0(omega0)?;
    let g0 = omega0 - sd.threshold_frequency();
    if g0 > 0.0 {
        return Ok(None);
    }
    if g0 == 0.0 {
        // The pole sits on the band edge; the residue is finite only for s > 1.
        let residue = if sd.s() > 1.0 {
            let slope = sd.eta() * crate::specfun::gamma(sd.s() - 1.0)?;
            1.0 / (1.0 + slope)
        } else {
            0.0
        };
        return Ok(Some(BoundState { energy: 0.0, residue }));
    }
    let g = |e: f64| -> Result<f64> { Ok(omega0 - e - sd.self_energy(e)?) };

    let mut lo = -omega0.max(1.0);
    while g(lo)? <= 0.0 {
        lo *= 2.0;
        if lo < -1e300 {
            return Err(Error::NoSignChange {
                what: "bound-state equation",
                lo,
                hi: 0.0,
            });
        }
    }
    let mut hi = 0.0;
    let mut e = 0.5 * lo;
    for _ in 0..400 {
        let ge = g(e)?;
        if ge.abs() <= 1e-12 {
            break;
        }
        if ge > 0.0 {
            lo = e;
        } else {
            hi = e;
        }
        // g is decreasing with g' = −1 − I'(E); take the Newton step if it
        // stays inside the bracket.
        let slope = -1.0 - sd.self_energy_slope(e)?;
        let newton = e - ge / slope;
        e = if newton > lo && newton < hi { newton } else { 0.5 * (lo + hi) };
        if hi - lo < 4.0 * f64::EPSILON * lo.abs() {
            break;
        }
    }
    let residue = 1.0 / (1.0 + sd.self_energy_slope_quad(e)?);
    Ok(Some(BoundState { energy: e, residue }))
}

/// Band-plus-bound-state reconstruction
/// u(t) = Z e^{−iE_b t} + ∫₀^∞ ρ(E) e^{−iEt} dE,
/// ρ(E) = J(E) / {[E − ω0 − Δ(E)]² + [πJ(E)]²}.
///
/// The band density is sampled once on Kronrod panels no wider than a
/// quarter of the shortest oscillation period π/(4 t_max) and refined where
/// the panel error of ∫ρ is large; u(t) for any t ≤ t_max is then a weighted
/// sum over the stored samples.
#[derive(Debug, Clone)]
pub struct SpectralPropagator {
    bound: Option<BoundState>,
    nodes: Vec<f64>,
    weights: Vec<f64>,
    t_max: f64,
    cutoff: f64,
    tail_bound: f64,
    error_estimate: f64,
}

const BAND_TOL: f64 = 1e-6;

impl SpectralPropagator {
    pub fn new(sd: &OhmicSpectralDensity, omega0: f64, bound: Option<BoundState>, t_max: f64) -> Result<Self> {
        check_omega0(omega0)?;
        if !t_max.is_finite() || t_max < 0.0 {
            return Err(Error::domain("t_max", t_max, "finite t_max >= 0"));
        }
        if sd.eta() == 0.0 {
            // Decoupled sensor: the band weight collapses onto E = ω0.
            return Ok(SpectralPropagator {
                bound: None,
                nodes: vec![omega0],
                weights: vec![1.0],
                t_max,
                cutoff: omega0,
                tail_bound: 0.0,
                error_estimate: 0.0,
            });
        }
        let wc = sd.omega_c();
        let tail_cfg = QuadConfig {
            abs_tol: 1e-16,
            rel_tol: 1e-8,
            max_intervals: 2000,
        };
        // Past the cutoff the denominator exceeds (X − ω0 − Δ(X))², which bounds the tail.
        let mut cutoff = (10.0 * wc).max(4.0 * omega0);
        let tail_bound = loop {
            let shift = sd.level_shift(cutoff)?;
            let gap = cutoff - omega0 - shift;
            if gap > 0.5 * cutoff {
                let weight = quad::integrate_semi_infinite(|w| sd.evaluate_j(w).unwrap_or(0.0), cutoff, wc, &tail_cfg)?.value;
                let bound = weight / (gap * gap);
                if bound <= 0.1 * BAND_TOL {
                    break bound;
                }
            }
            cutoff *= 1.25;
            if cutoff > 1e4 * wc.max(omega0) {
                return Err(Error::QuadratureBudget {
                    value: f64::NAN,
                    error: f64::INFINITY,
                    intervals: 0,
                });
            }
        };

        let max_width = if t_max > 0.0 {
            (std::f64::consts::PI / (4.0 * t_max)).min(cutoff / 256.0)
        } else {
            cutoff / 256.0
        };
        let n_panels = (cutoff / max_width).ceil() as usize;
        let width = cutoff / n_panels as f64;
        let density = |e: f64| -> f64 {
            let j = sd.evaluate_j(e).unwrap_or(f64::NAN);
            match sd.level_shift_with(e, 1e-9) {
                Ok(shift) => {
                    let re = e - omega0 - shift;
                    let im = std::f64::consts::PI * j;
                    j / (re * re + im * im)
                }
                Err(_) => f64::NAN,
            }
        };
        let per_length = 0.5 * BAND_TOL / cutoff;
        let min_width = 1e-12 * cutoff;

        let panels: Vec<PanelSamples> = (0..n_panels)
            .into_par_iter()
            .map(|k| {
                let a = k as f64 * width;
                let b = if k + 1 == n_panels { cutoff } else { (k + 1) as f64 * width };
                let mut out = PanelSamples::default();
                refine(&density, a, b, per_length, min_width, 0, &mut out);
                out
            })
            .collect();

        let mut nodes = Vec::new();
        let mut weights = Vec::new();
        let mut error_estimate = tail_bound;
        for p in panels {
            if p.failed {
                return Err(Error::QuadratureBudget {
                    value: f64::NAN,
                    error: f64::INFINITY,
                    intervals: nodes.len() / 21,
                });
            }
            nodes.extend(p.nodes);
            weights.extend(p.weights);
            error_estimate += p.error;
        }
        if error_estimate > 1e-4 {
            return Err(Error::QuadratureBudget {
                value: weights.iter().sum(),
                error: error_estimate,
                intervals: nodes.len() / 21,
            });
        }
        Ok(SpectralPropagator {
            bound,
            nodes,
            weights,
            t_max,
            cutoff,
            tail_bound,
            error_estimate,
        })
    }

    pub fn bound(&self) -> Option<BoundState> {
        self.bound
    }

    /// ∫₀^∞ ρ(E) dE, which with Z should sum to one.
    pub fn band_weight(&self) -> f64 {
        self.weights.iter().sum()
    }

    pub fn cutoff(&self) -> f64 {
        self.cutoff
    }

    pub fn tail_bound(&self) -> f64 {
        self.tail_bound
    }

    /// Sum of panel error estimates plus the tail bound.
    pub fn error_estimate(&self) -> f64 {
        self.error_estimate
    }

    pub fn sample_count(&self) -> usize {
        self.nodes.len()
    }

    fn bound_part(&self, t: f64) -> Complex64 {
        match self.bound {
            Some(b) => b.residue * Complex64::from_polar(1.0, -b.energy * t),
            None => Complex64::new(0.0, 0.0),
        }
    }

    /// u(t); accuracy is guaranteed only for t ≤ t_max.
    pub fn u(&self, t: f64) -> Complex64 {
        let mut acc = self.bound_part(t);
        for (&e, &w) in self.nodes.iter().zip(&self.weights) {
            acc += w * Complex64::from_polar(1.0, -e * t);
        }
        acc
    }

    /// u(n·dt) for n = 0..count, using phase rotation per sample.
    pub fn u_grid(&self, dt: f64, count: usize) -> Vec<Complex64> {
        const CHUNK: usize = 4096;
        let partial: Vec<Vec<Complex64>> = self
            .nodes
            .par_chunks(CHUNK)
            .zip(self.weights.par_chunks(CHUNK))
            .map(|(es, ws)| {
                let mut out = vec![Complex64::new(0.0, 0.0); count];
                for (&e, &w) in es.iter().zip(ws) {
                    let step = Complex64::from_polar(1.0, -e * dt);
                    let mut phase = Complex64::new(w, 0.0);
                    for (n, slot) in out.iter_mut().enumerate() {
                        *slot += phase;
                        phase *= step;
                        // Re-anchor periodically so rounding in the recurrence stays bounded.
                        if n % 512 == 511 {
                            phase = w * Complex64::from_polar(1.0, -e * dt * (n + 1) as f64);
                        }
                    }
                }
                out
            })
            .collect();
        let mut total: Vec<Complex64> = (0..count).map(|n| self.bound_part(n as f64 * dt)).collect();
        for chunk in partial {
            for (t, c) in total.iter_mut().zip(chunk) {
                *t += c;
            }
        }
        total
    }

    pub fn t_max(&self) -> f64 {
        self.t_max
    }
}

#[derive(Default)]
struct PanelSamples {
    nodes: Vec<f64>,
    weights: Vec<f64>,
    error: f64,
    failed: bool,
}

fn refine<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, per_length: f64, min_width: f64, depth: usize, out: &mut PanelSamples) {
    let panel = quad::kronrod_panel(f, a, b);
    if panel.samples.iter().any(|v| !v.is_finite()) {
        out.failed = true;
        return;
    }
    let allowed = per_length * (b - a);
    if panel.error <= allowed || depth >= 48 || (b - a) <= min_width {
        out.error += panel.error;
        for i in 0..21 {
            out.nodes.push(panel.nodes[i]);
            out.weights.push(panel.weights[i] * panel.samples[i]);
        }
        return;
    }
    let mid = 0.5 * (a + b);
    refine(f, a, mid, per_length, min_width, depth + 1, out);
    refine(f, mid, b, per_length, min_width, depth + 1, out);
}

/// u(t) from a freshly built spectral propagator; prefer [`SpectralPropagator`]
/// when evaluating many times.
pub fn u_spectral(sd: &OhmicSpectralDensity, omega0: f64, bound: Option<BoundState>, t: f64) -> Result<Complex64> {
    if !t.is_finite() || t < 0.0 {
        return Err(Error::domain("t", t, "finite t >= 0"));
    }
    Ok(SpectralPropagator::new(sd, omega0, bound, t)?.u(t))
}

/// κ = πJ(ω0).
pub fn markovian_rate(sd: &OhmicSpectralDensity, omega0: f64) -> Result<f64> {
    check_omega0(omega0)?;
    Ok(std::f64::consts::PI * sd.evaluate_j(omega0)?)
}

/// u_MA(t) = exp{−[κ + i(ω0 + Δ(ω0))]t}, with the shift optional.
pub fn u_markovian(sd: &OhmicSpectralDensity, omega0: f64, t: f64, include_shift: bool) -> Result<Complex64> {
    if !t.is_finite() || t < 0.0 {
        return Err(Error::domain("t", t, "finite t >= 0"));
    }
    let kappa = markovian_rate(sd, omega0)?;
    let shift = if include_shift { sd.level_shift(omega0)? } else { 0.0 };
    Ok(Complex64::new(-kappa * t, -(omega0 + shift) * t).exp())
}

/// Roots of ε^{3/2}x³ + iδ√ε x − (iε)^{3/2} = 0.
///
/// Eigenvalues of the companion matrix of the monic cubic
/// x³ + (iδ/ε)x − e^{3πi/4}, polished by Newton steps.
pub fn pc_characteristic_roots(epsilon: f64, delta: f64) -> Result<[Complex64; 3]> {
    if !epsilon.is_finite() || epsilon <= 0.0 {
        return Err(Error::domain("epsilon", epsilon, "finite epsilon > 0"));
    }
    if !delta.is_finite() {
        return Err(Error::domain("delta", delta, "finite delta"));
    }
    let zero = Complex64::new(0.0, 0.0);
    let one = Complex64::new(1.0, 0.0);
    let c1 = Complex64::new(0.0, delta / epsilon);
    let c0 = -Complex64::from_polar(1.0, 0.75 * std::f64::consts::PI);
    let companion = Matrix3::new(zero, zero, -c0, one, zero, -c1, zero, one, zero);
    let eig = companion
        .eigenvalues()
        .ok_or_else(|| Error::Linalg("companion eigenvalues did not converge".into()))?;
    let p = |x: Complex64| x * x * x + c1 * x + c0;
    let dp = |x: Complex64| 3.0 * x * x + c1;
    let mut roots = [eig[0], eig[1], eig[2]];
    for x in roots.iter_mut() {
        for _ in 0..4 {
            let d = dp(*x);
            if d.norm() == 0.0 {
                break;
            }
            let step = p(*x) / d;
            *x -= step;
            if step.norm() <= 1e-16 * x.norm() {
                break;
            }
        }
        let scale = 1.0 + x.norm().powi(3) + c1.norm() * x.norm();
        if p(*x).norm() > 1e-10 * scale {
            return Err(Error::Linalg(format!(
                "cubic root residual {} too large",
                p(*x).norm()
            )));
        }
    }
    let mut separation = f64::INFINITY;
    for i in 0..3 {
        for j in i + 1..3 {
            separation = separation.min((roots[i] - roots[j]).norm());
        }
    }
    if separation < 1e-8 {
        return Err(Error::DegenerateRoots { separation });
    }
    roots.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    Ok(roots)
}

/// Closed-form propagator of a sensor at the edge of a photonic band gap,
/// u(t) = e^{−iω0 t} Σ_ℓ p_ℓ e^{(iδ + εx_ℓ²)t} [x_ℓ + √(x_ℓ²) erf(√(εx_ℓ² t))].
///
/// Since erf is odd, the bracket equals x_ℓ erfc(−√(εt) x_ℓ) on either
/// square-root sheet, so each term is evaluated as p_ℓ x_ℓ w(−i x_ℓ √(εt))
/// with the Faddeeva function w, which stays finite where e^{εx²t} and the
/// erf factor would separately overflow.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhotonicPropagator {
    pub omega_u: f64,
    pub omega0: f64,
    pub epsilon: f64,
    pub delta: f64,
    pub roots: [Complex64; 3],
    pub weights: [Complex64; 3],
}

impl PhotonicPropagator {
    pub fn new(pc: &PhotonicCrystalReservoir, omega0: f64) -> Result<Self> {
        check_omega0(omega0)?;
        let epsilon = pc.epsilon(omega0)?;
        let delta = pc.delta(omega0);
        let roots = pc_characteristic_roots(epsilon, delta)?;
        let mut weights = [Complex64::new(0.0, 0.0); 3];
        for l in 0..3 {
            let mut den = Complex64::new(1.0, 0.0);
            for m in 0..3 {
                if m != l {
                    den *= roots[l] - roots[m];
                }
            }
            weights[l] = roots[l] / den;
        }
        let norm: Complex64 = (0..3).map(|l| weights[l] * roots[l]).sum();
        if (norm - 1.0).norm() > 1e-6 {
            return Err(Error::DegenerateRoots {
                separation: (norm - 1.0).norm(),
            });
        }
        Ok(PhotonicPropagator {
            omega_u: pc.omega_u(),
            omega0,
            epsilon,
            delta,
            roots,
            weights,
        })
    }

    pub fn u(&self, t: f64) -> Complex64 {
        let c = (self.epsilon * t.max(0.0)).sqrt();
        let mut acc = Complex64::new(0.0, 0.0);
        for l in 0..3 {
            let x = self.roots[l];
            let z = Complex64::new(0.0, -c) * x;
            acc += self.weights[l] * x * faddeeva(z);
        }
        acc * Complex64::from_polar(1.0, -self.omega_u * t)
    }
}

pub fn u_photonic_crystal(pc: &PhotonicCrystalReservoir, omega0: f64, t: f64) -> Result<Complex64> {
    if !t.is_finite() || t < 0.0 {
        return Err(Error::domain("t", t, "finite t >= 0"));
    }
    Ok(PhotonicPropagator::new(pc, omega0)?.u(t))
}
