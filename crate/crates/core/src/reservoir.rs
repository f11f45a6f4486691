//! Reservoir models: the Ohmic family, the photonic-crystal band edge, and a
//! finite-mode discretization used by the brute-force oracle.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::quad::{self, QuadConfig, QuadResult};
use crate::specfun::{gamma, gen_exp_integral_scaled};

/// Reservoir parameter with respect to which a derivative is taken.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Parameter {
    Eta,
    OmegaC,
    S,
    /// Band-edge frequency of the photonic-crystal reservoir.
    OmegaU,
}

impl Parameter {
    pub fn name(self) -> &'static str {
        match self {
            Parameter::Eta => "eta",
            Parameter::OmegaC => "omega_c",
            Parameter::S => "s",
            Parameter::OmegaU => "omega_u",
        }
    }

    pub fn parse(name: &str) -> Option<Parameter> {
        match name {
            "eta" => Some(Parameter::Eta),
            "omega_c" | "omegac" | "wc" => Some(Parameter::OmegaC),
            "s" => Some(Parameter::S),
            "omega_u" | "omegau" | "wu" => Some(Parameter::OmegaU),
            _ => None,
        }
    }
}

/// J(ω) = η ω (ω/ωc)^{s−1} e^{−ω/ωc}.
///
/// `eta = 0` is accepted and describes a decoupled sensor; every other field
/// must be strictly positive.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OhmicSpectralDensity {
    eta: f64,
    omega_c: f64,
    s: f64,
    gamma_s: f64,
    gamma_s1: f64,
}

fn tight() -> QuadConfig {
    QuadConfig {
        abs_tol: 0.0,
        rel_tol: 1e-12,
        max_intervals: 4000,
    }
}

impl OhmicSpectralDensity {
    pub fn new(eta: f64, omega_c: f64, s: f64) -> Result<Self> {
        if !eta.is_finite() || eta < 0.0 {
            return Err(Error::domain("eta", eta, "finite eta >= 0"));
        }
        if !omega_c.is_finite() || omega_c <= 0.0 {
            return Err(Error::domain("omega_c", omega_c, "finite omega_c > 0"));
        }
        if !s.is_finite() || s <= 0.0 {
            return Err(Error::domain("s", s, "finite s > 0"));
        }
        Ok(OhmicSpectralDensity {
            eta,
            omega_c,
            s,
            gamma_s: gamma(s)?,
            gamma_s1: gamma(s + 1.0)?,
        })
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }

    pub fn omega_c(&self) -> f64 {
        self.omega_c
    }

    pub fn s(&self) -> f64 {
        self.s
    }

    pub fn param(&self, which: Parameter) -> Result<f64> {
        match which {
            Parameter::Eta => Ok(self.eta),
            Parameter::OmegaC => Ok(self.omega_c),
            Parameter::S => Ok(self.s),
            Parameter::OmegaU => Err(Error::InvalidParameter(
                "omega_u is not a parameter of the Ohmic family".into(),
            )),
        }
    }

    /// Copy with one parameter replaced.
    pub fn with_param(&self, which: Parameter, value: f64) -> Result<Self> {
        match which {
            Parameter::Eta => Self::new(value, self.omega_c, self.s),
            Parameter::OmegaC => Self::new(self.eta, value, self.s),
            Parameter::S => Self::new(self.eta, self.omega_c, value),
            Parameter::OmegaU => Err(Error::InvalidParameter(
                "omega_u is not a parameter of the Ohmic family".into(),
            )),
        }
    }

    /// J(ω), with the limit J(0) = 0 for every s > 0.
    pub fn evaluate_j(&self, omega: f64) -> Result<f64> {
        if !(omega >= 0.0) {
            return Err(Error::domain("evaluate_j", omega, "omega >= 0"));
        }
        Ok(self.j(omega))
    }

    /// Unchecked J(ω) for ω ≥ 0.
    #[inline]
    pub(crate) fn j(&self, omega: f64) -> f64 {
        if omega <= 0.0 || self.eta == 0.0 {
            return 0.0;
        }
        let x = omega / self.omega_c;
        self.eta * self.omega_c * x.powf(self.s) * (-x).exp()
    }

    /// ∂J/∂θ at fixed ω.
    pub(crate) fn dj_dparam(&self, which: Parameter, omega: f64) -> f64 {
        if omega <= 0.0 {
            return 0.0;
        }
        match which {
            Parameter::Eta => {
                let x = omega / self.omega_c;
                self.omega_c * x.powf(self.s) * (-x).exp()
            }
            Parameter::OmegaC => {
                let x = omega / self.omega_c;
                self.j(omega) * ((1.0 - self.s) + x) / self.omega_c
            }
            Parameter::S => self.j(omega) * (omega / self.omega_c).ln(),
            Parameter::OmegaU => 0.0,
        }
    }

    /// ∫₀^∞ J(ω) dω = η Γ(s+1) ωc².
    pub fn total_weight(&self) -> f64 {
        self.eta * self.gamma_s1 * self.omega_c * self.omega_c
    }

    /// ∫₀^∞ J(ω)/ω dω = η ωc Γ(s), the bound-state threshold frequency.
    pub fn threshold_frequency(&self) -> f64 {
        self.eta * self.omega_c * self.gamma_s
    }

    /// ν(t) = ∫₀^∞ J(ω) e^{−iωt} dω = η Γ(s+1) ωc² (1 + iωc t)^{−(s+1)}.
    pub fn memory_kernel(&self, t: f64) -> Complex64 {
        let base = Complex64::new(1.0, self.omega_c * t);
        self.total_weight() * base.powf(-(self.s + 1.0))
    }

    /// I(E) = ∫₀^∞ J(ω)/(ω − E) dω for E < 0, in closed form.
    pub fn self_energy(&self, e: f64) -> Result<f64> {
        if !(e < 0.0) || !e.is_finite() {
            return Err(Error::domain("self_energy", e, "finite E < 0"));
        }
        let a = -e / self.omega_c;
        Ok(self.eta * self.omega_c * self.gamma_s1 * gen_exp_integral_scaled(self.s + 1.0, a)?)
    }

    /// dI/dE = ∫₀^∞ J(ω)/(ω − E)² dω for E < 0, in closed form.
    pub fn self_energy_slope(&self, e: f64) -> Result<f64> {
        if !(e < 0.0) || !e.is_finite() {
            return Err(Error::domain("self_energy_slope", e, "finite E < 0"));
        }
        let a = -e / self.omega_c;
        let hi = gen_exp_integral_scaled(self.s + 1.0, a)?;
        let lo = gen_exp_integral_scaled(self.s, a)?;
        Ok(self.eta * self.gamma_s1 * (lo - hi))
    }

    /// ∫₀^∞ f(ω) dω for integrands concentrated on the scale of ωc but
    /// possibly sharply peaked within `peak` of the origin.
    pub(crate) fn integrate_axis<F: FnMut(f64) -> f64>(&self, mut f: F, peak: f64) -> Result<QuadResult> {
        let cfg = tight();
        let edge = 40.0 * self.omega_c;
        let mut knots = vec![0.0];
        let mut p = peak.max(1e-12 * self.omega_c);
        while p < edge {
            knots.push(p);
            p *= 8.0;
        }
        knots.push(edge);
        let body = quad::integrate_with_breakpoints(&mut f, &knots, &cfg)?;
        let tail = quad::integrate_semi_infinite(&mut f, edge, self.omega_c, &cfg)?;
        Ok(QuadResult {
            value: body.value + tail.value,
            error: body.error + tail.error,
            intervals: body.intervals + tail.intervals,
        })
    }

    /// I(E) by direct quadrature (independent of the exponential-integral form).
    pub fn self_energy_quad(&self, e: f64) -> Result<f64> {
        if !(e < 0.0) {
            return Err(Error::domain("self_energy_quad", e, "E < 0"));
        }
        Ok(self.integrate_axis(|w| self.j(w) / (w - e), -e)?.value)
    }

    /// ∫ J(ω)/(ω − E)² dω by direct quadrature.
    pub fn self_energy_slope_quad(&self, e: f64) -> Result<f64> {
        if !(e < 0.0) {
            return Err(Error::domain("self_energy_slope_quad", e, "E < 0"));
        }
        Ok(self.integrate_axis(|w| self.j(w) / ((w - e) * (w - e)), -e)?.value)
    }

    /// ∂I(E)/∂θ at fixed E < 0, by quadrature of ∂θJ/(ω − E).
    pub fn self_energy_param_derivative(&self, which: Parameter, e: f64) -> Result<f64> {
        if !(e < 0.0) {
            return Err(Error::domain("self_energy_param_derivative", e, "E < 0"));
        }
        if which == Parameter::OmegaU {
            return Err(Error::InvalidParameter(
                "omega_u is not a parameter of the Ohmic family".into(),
            ));
        }
        Ok(self
            .integrate_axis(|w| self.dj_dparam(which, w) / (w - e), -e)?
            .value)
    }

    /// Δ(E) = PV ∫₀^∞ J(ω)/(E − ω) dω for E ≥ 0.
    ///
    /// The pole is removed by subtracting J(E) on [0, Λ], Λ = max(20ωc, 5E);
    /// the subtracted piece integrates to J(E) ln(E/(Λ − E)).
    pub fn level_shift(&self, e: f64) -> Result<f64> {
        self.level_shift_with(e, 1e-10)
    }

    pub(crate) fn level_shift_with(&self, e: f64, rel_tol: f64) -> Result<f64> {
        if !(e >= 0.0) || !e.is_finite() {
            return Err(Error::domain("level_shift", e, "finite E >= 0"));
        }
        if self.eta == 0.0 {
            return Ok(0.0);
        }
        if e == 0.0 {
            return Ok(-self.threshold_frequency());
        }
        let cfg = QuadConfig {
            abs_tol: 1e-13 * self.total_weight() / self.omega_c,
            rel_tol,
            max_intervals: 4000,
        };
        let lambda = (20.0 * self.omega_c).max(5.0 * e);
        let je = self.j(e);
        let mut knots = vec![0.0];
        for k in [0.25, 0.5, 0.9, 1.0, 1.1, 1.5, 2.0] {
            let p = k * e;
            if p < lambda && p > *knots.last().unwrap() {
                knots.push(p);
            }
        }
        let mut p = self.omega_c;
        while p < lambda {
            if p > *knots.last().unwrap() * 1.01 {
                knots.push(p);
            }
            p *= 2.0;
        }
        knots.push(lambda);
        let body = quad::integrate_with_breakpoints(
            |w| {
                let d = e - w;
                if d == 0.0 {
                    0.0
                } else {
                    (self.j(w) - je) / d
                }
            },
            &knots,
            &cfg,
        )?;
        let log_part = je * (e / (lambda - e)).ln();
        let tail = quad::integrate_semi_infinite(|w| self.j(w) / (e - w), lambda, self.omega_c, &cfg)?;
        Ok(body.value + log_part + tail.value)
    }

    /// True iff ω0 ≤ η ωc Γ(s), i.e. the sensor supports a bound state.
    pub fn bound_state_criterion(&self, omega0: f64) -> bool {
        omega0 <= self.threshold_frequency()
    }

    /// Midpoint discretization on [0, ω_max] with g_k² = J(ω_k) Δω.
    pub fn discretize(&self, n_modes: usize, omega_max: f64) -> Result<DiscreteReservoir> {
        if n_modes < 2 {
            return Err(Error::InvalidParameter(format!(
                "discretization needs at least 2 modes, got {n_modes}"
            )));
        }
        if !omega_max.is_finite() || omega_max <= 0.0 {
            return Err(Error::domain("omega_max", omega_max, "finite omega_max > 0"));
        }
        let dw = omega_max / n_modes as f64;
        let frequencies: Vec<f64> = (0..n_modes).map(|k| (k as f64 + 0.5) * dw).collect();
        let couplings = frequencies.iter().map(|&w| (self.j(w) * dw).sqrt()).collect();
        let truncated_weight = if self.eta == 0.0 {
            0.0
        } else {
            quad::integrate_semi_infinite(|w| self.j(w), omega_max, self.omega_c, &tight())?.value
        };
        Ok(DiscreteReservoir {
            frequencies,
            couplings,
            truncated_weight,
        })
    }
}

/// Band-edge reservoir with dispersion ω_k = ωu + A(k − k0)².
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhotonicCrystalReservoir {
    omega_u: f64,
    gamma0: f64,
}

impl PhotonicCrystalReservoir {
    pub fn new(omega_u: f64, gamma0: f64) -> Result<Self> {
        if !omega_u.is_finite() || omega_u <= 0.0 {
            return Err(Error::domain("omega_u", omega_u, "finite omega_u > 0"));
        }
        if !gamma0.is_finite() || gamma0 <= 0.0 {
            return Err(Error::domain("gamma0", gamma0, "finite gamma0 > 0"));
        }
        Ok(PhotonicCrystalReservoir { omega_u, gamma0 })
    }

    pub fn omega_u(&self) -> f64 {
        self.omega_u
    }

    pub fn gamma0(&self) -> f64 {
        self.gamma0
    }

    pub fn with_omega_u(&self, omega_u: f64) -> Result<Self> {
        Self::new(omega_u, self.gamma0)
    }

    /// δ = ω0 − ωu.
    pub fn delta(&self, omega0: f64) -> f64 {
        omega0 - self.omega_u
    }

    /// ε = ωu (π γ0 / 2ω0)^{2/3}.
    pub fn epsilon(&self, omega0: f64) -> Result<f64> {
        if !omega0.is_finite() || omega0 <= 0.0 {
            return Err(Error::domain("omega0", omega0, "finite omega0 > 0"));
        }
        Ok(self.omega_u * (std::f64::consts::PI * self.gamma0 / (2.0 * omega0)).powf(2.0 / 3.0))
    }

    /// A bound state below the band edge exists iff δ < 0.
    pub fn has_bound_state(&self, omega0: f64) -> bool {
        self.delta(omega0) < 0.0
    }
}

/// Finite set of reservoir modes standing in for the continuum.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteReservoir {
    /// Mode frequencies ω_k, ascending.
    pub frequencies: Vec<f64>,
    /// Couplings g_k ≥ 0.
    pub couplings: Vec<f64>,
    /// ∫ J(ω) dω above the discretization cutoff, which the modes omit.
    pub truncated_weight: f64,
}

impl DiscreteReservoir {
    /// Reservoir built from explicit modes.
    pub fn from_modes(frequencies: Vec<f64>, couplings: Vec<f64>) -> Result<Self> {
        if frequencies.len() != couplings.len() || frequencies.is_empty() {
            return Err(Error::InvalidParameter(
                "mode frequencies and couplings must be non-empty and of equal length".into(),
            ));
        }
        if frequencies.iter().any(|w| !(w.is_finite() && *w >= 0.0)) || couplings.iter().any(|g| !(g.is_finite() && *g >= 0.0)) {
            return Err(Error::InvalidParameter(
                "mode frequencies and couplings must be finite and non-negative".into(),
            ));
        }
        if frequencies.windows(2).any(|w| w[1] < w[0]) {
            return Err(Error::InvalidParameter("mode frequencies must be ascending".into()));
        }
        Ok(DiscreteReservoir {
            frequencies,
            couplings,
            truncated_weight: 0.0,
        })
    }

    pub fn len(&self) -> usize {
        self.frequencies.len()
    }

    pub fn is_empty(&self) -> bool {
        self.frequencies.is_empty()
    }

    /// Σ_k g_k².
    pub fn total_weight(&self) -> f64 {
        self.couplings.iter().map(|g| g * g).sum()
    }
}
