//! Gaussian states of the sensor mode: evolution under the propagator,
//! quantum Fisher information, Wigner function and the homodyne-type
//! error-propagation scheme for O = a + a†.
//!
//! Convention: d = (⟨a⟩, ⟨a†⟩) and σ_ij = Tr[ρ{ΔA_i, ΔA_j†}] with A = (a, a†),
//! so the vacuum has σ = I.

use nalgebra::{Matrix2, Matrix4, Vector2, Vector4};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::propagator::BoundState;

/// Initial displaced squeezed state: coherent amplitude α and squeezing r.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InitialStateSpec {
    alpha: Complex64,
    r: f64,
}

impl InitialStateSpec {
    pub fn new(alpha: Complex64, r: f64) -> Result<Self> {
        if !alpha.re.is_finite() || !alpha.im.is_finite() {
            return Err(Error::InvalidParameter("alpha must be finite".into()));
        }
        if !r.is_finite() || r < 0.0 {
            return Err(Error::domain("r", r, "finite r >= 0"));
        }
        Ok(InitialStateSpec { alpha, r })
    }

    /// α = |α| e^{iφ}.
    pub fn from_alpha(abs_alpha: f64, phi: f64, r: f64) -> Result<Self> {
        if !abs_alpha.is_finite() || abs_alpha < 0.0 {
            return Err(Error::domain("|alpha|", abs_alpha, "finite |alpha| >= 0"));
        }
        if !phi.is_finite() {
            return Err(Error::domain("phi", phi, "finite phase"));
        }
        Self::new(Complex64::from_polar(abs_alpha, phi), r)
    }

    /// Splits n̄ into sinh²r = βn̄ and |α|² = (1 − β)n̄.
    pub fn from_nbar_beta(nbar: f64, beta: f64, phi: f64) -> Result<Self> {
        if !nbar.is_finite() || nbar < 0.0 {
            return Err(Error::domain("nbar", nbar, "finite nbar >= 0"));
        }
        if !(0.0..=1.0).contains(&beta) {
            return Err(Error::domain("beta", beta, "0 <= beta <= 1"));
        }
        let r = (beta * nbar).sqrt().asinh();
        Self::from_alpha(((1.0 - beta) * nbar).sqrt(), phi, r)
    }

    pub fn alpha(&self) -> Complex64 {
        self.alpha
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    /// n̄ = |α|² + sinh²r.
    pub fn nbar(&self) -> f64 {
        self.alpha.norm_sqr() + self.r.sinh().powi(2)
    }

    /// β = sinh²r / n̄, zero for the vacuum.
    pub fn beta(&self) -> f64 {
        let n = self.nbar();
        if n == 0.0 {
            0.0
        } else {
            self.r.sinh().powi(2) / n
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianState {
    pub d: [Complex64; 2],
    pub sigma: Matrix2<Complex64>,
}

/// ∂θd and ∂θσ for one parameter θ.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianDerivative {
    pub dd: [Complex64; 2],
    pub dsigma: Matrix2<Complex64>,
}

impl GaussianState {
    pub fn det_sigma(&self) -> f64 {
        (self.sigma[(0, 0)] * self.sigma[(1, 1)] - self.sigma[(0, 1)] * self.sigma[(1, 0)]).re
    }
}

/// State at time t given u(t): d = (αu, α*u*), σ₁₁ = σ₂₂ = 1 + 2|u|²sinh²r,
/// σ₁₂ = −u² sinh 2r.
pub fn evolve_state(spec: &InitialStateSpec, u: Complex64) -> Result<GaussianState> {
    if !(u.norm() <= 1.0 + 1e-6) {
        return Err(Error::domain("|u|", u.norm(), "|u| <= 1 + 1e-6"));
    }
    let a = spec.alpha * u;
    let sh = spec.r.sinh();
    let diag = Complex64::new(1.0 + 2.0 * u.norm_sqr() * sh * sh, 0.0);
    let off = -u * u * (2.0 * spec.r).sinh();
    Ok(GaussianState {
        d: [a, a.conj()],
        sigma: Matrix2::new(diag, off, off.conj(), diag),
    })
}

/// Chain rule through [`evolve_state`] for a derivative ∂θu.
pub fn evolve_derivative(spec: &InitialStateSpec, u: Complex64, du: Complex64) -> GaussianDerivative {
    let dd = spec.alpha * du;
    let sh = spec.r.sinh();
    let ddiag = Complex64::new(4.0 * sh * sh * (u.conj() * du).re, 0.0);
    let doff = -2.0 * u * du * (2.0 * spec.r).sinh();
    GaussianDerivative {
        dd: [dd, dd.conj()],
        dsigma: Matrix2::new(ddiag, doff, doff.conj(), ddiag),
    }
}

/// F = ½ vec(∂σ)† M⁺ vec(∂σ) + 2 ∂d† σ⁻¹ ∂d with M = σ*⊗σ − K⊗K,
/// K = diag(1, −1) and vec stacking columns.
///
/// M is singular for pure states; its pseudo-inverse drops singular values
/// below 1e-10‖M‖. If the dropped directions carry more than 1e-6 of
/// |vec ∂σ|², the limit is not safe to take and an error is returned.
pub fn qfi_gaussian(state: &GaussianState, dstate: &GaussianDerivative) -> Result<f64> {
    let sigma = state.sigma;
    let k = Matrix2::new(
        Complex64::new(1.0, 0.0),
        Complex64::new(0.0, 0.0),
        Complex64::new(0.0, 0.0),
        Complex64::new(-1.0, 0.0),
    );
    let m: Matrix4<Complex64> = sigma.conjugate().kronecker(&sigma) - k.kronecker(&k);
    let x = Vector4::from_column_slice(dstate.dsigma.as_slice());

    let mut f_cov = 0.0;
    let x_norm2 = x.norm_squared();
    if x_norm2 > 0.0 {
        let svd = m.svd(true, true);
        let uu = svd.u.ok_or_else(|| Error::Linalg("SVD did not return U".into()))?;
        let vt = svd.v_t.ok_or_else(|| Error::Linalg("SVD did not return V".into()))?;
        let smax = svd.singular_values.max();
        let cutoff = 1e-10 * smax;
        let mut discarded = 0.0;
        let mut acc = Complex64::new(0.0, 0.0);
        for i in 0..4 {
            let s = svd.singular_values[i];
            // x† M⁺ x = Σ (x† v_i)(u_i† x)/s_i
            let v_i = vt.row(i).adjoint();
            let xv = v_i.dotc(&x).conj();
            if s > cutoff {
                let ux = uu.column(i).dotc(&x);
                acc += xv * ux / s;
            } else {
                discarded += xv.norm_sqr();
            }
        }
        if discarded > 1e-6 * x_norm2 {
            return Err(Error::IllConditioned {
                weight: discarded / x_norm2,
            });
        }
        f_cov = 0.5 * acc.re;
    }

    let det = sigma[(0, 0)] * sigma[(1, 1)] - sigma[(0, 1)] * sigma[(1, 0)];
    if det.norm() == 0.0 {
        return Err(Error::Linalg("covariance matrix is singular".into()));
    }
    let inv = Matrix2::new(sigma[(1, 1)], -sigma[(0, 1)], -sigma[(1, 0)], sigma[(0, 0)]) / det;
    let dd = Vector2::new(dstate.dd[0], dstate.dd[1]);
    let f_disp = 2.0 * dd.dotc(&(inv * dd)).re;
    Ok(f_cov + f_disp)
}

/// Closed-form QFI of the Markovian dynamics u = e^{−(κ+iω0)t}:
///
/// F = 2n̄(∂κ)²t² { β[coth κt − 1] − 4β(n̄β+1)/(e^{4κt} + 2n̄β(e^{2κt}−1))
///     + 2(1−β)[2n̄β + e^{2κt} + 2√(n̄β(n̄β+1))]/(e^{4κt} + 4n̄β(e^{2κt}−1)) }
///
/// evaluated with every exponential written as a power of e^{−2κt}, so the
/// long-time limit underflows to zero instead of overflowing.
pub fn qfi_markovian(spec: &InitialStateSpec, kappa: f64, dkappa: f64, t: f64) -> Result<f64> {
    qfi_markovian_nb(spec.nbar(), spec.beta(), kappa, dkappa, t)
}

/// [`qfi_markovian`] parameterized directly by (n̄, β).
pub fn qfi_markovian_nb(nbar: f64, beta: f64, kappa: f64, dkappa: f64, t: f64) -> Result<f64> {
    if !kappa.is_finite() || kappa <= 0.0 {
        return Err(Error::domain("kappa", kappa, "finite kappa > 0"));
    }
    if !t.is_finite() || t < 0.0 {
        return Err(Error::domain("t", t, "finite t >= 0"));
    }
    if t == 0.0 {
        return Ok(0.0);
    }
    let x = kappa * t;
    let e2 = (-2.0 * x).exp();
    let e4 = e2 * e2;
    let nb = nbar * beta;
    let coth_minus_one = 2.0 / (2.0 * x).exp_m1();
    let mix = e2 - e4;
    let bracket = beta * coth_minus_one - 4.0 * beta * (nb + 1.0) * e4 / (1.0 + 2.0 * nb * mix)
        + 2.0 * (1.0 - beta) * (2.0 * nb * e4 + e2 + 2.0 * (nb * (nb + 1.0)).sqrt() * e4) / (1.0 + 4.0 * nb * mix);
    Ok(2.0 * nbar * dkappa * dkappa * t * t * bracket)
}

/// Large-n̄ leading term 2(1−β)(∂κ)²[coth κt − 1] n̄ t².
pub fn qfi_markovian_leading(nbar: f64, beta: f64, kappa: f64, dkappa: f64, t: f64) -> Result<f64> {
    if !kappa.is_finite() || kappa <= 0.0 {
        return Err(Error::domain("kappa", kappa, "finite kappa > 0"));
    }
    if !t.is_finite() || t < 0.0 {
        return Err(Error::domain("t", t, "finite t >= 0"));
    }
    if t == 0.0 {
        return Ok(0.0);
    }
    let coth_minus_one = 2.0 / (2.0 * kappa * t).exp_m1();
    Ok(2.0 * (1.0 - beta) * dkappa * dkappa * coth_minus_one * nbar * t * t)
}

/// Rectangular grid in the complex z-plane (x = Re z, y = Im z).
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseGrid {
    pub xs: Vec<f64>,
    pub ys: Vec<f64>,
}

impl PhaseGrid {
    pub fn uniform(half_width: f64, points: usize) -> Result<Self> {
        if !half_width.is_finite() || half_width <= 0.0 || points < 2 {
            return Err(Error::InvalidParameter(
                "phase grid needs a positive half width and at least two points".into(),
            ));
        }
        let step = 2.0 * half_width / (points - 1) as f64;
        let axis: Vec<f64> = (0..points).map(|i| -half_width + i as f64 * step).collect();
        Ok(PhaseGrid {
            xs: axis.clone(),
            ys: axis,
        })
    }

    /// 161 × 161 points spanning ±(|α| + 4)·max(1, e^r).
    pub fn default_for(spec: &InitialStateSpec) -> Self {
        let half = (spec.alpha.norm() + 4.0) * spec.r.exp().max(1.0);
        Self::uniform(half, 161).expect("positive half width")
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct WignerField {
    pub xs: Vec<f64>,
    pub ys: Vec<f64>,
    /// values[j][i] = W(xs[i] + i·ys[j]).
    pub values: Vec<Vec<f64>>,
    pub covariance: Matrix2<f64>,
    pub mean: Vector2<f64>,
}

impl WignerField {
    /// Trapezoidal ∫ W dx dy over the grid.
    pub fn integral(&self) -> f64 {
        let wx = trapezoid_weights(&self.xs);
        let wy = trapezoid_weights(&self.ys);
        let mut acc = 0.0;
        for (j, row) in self.values.iter().enumerate() {
            for (i, v) in row.iter().enumerate() {
                acc += wx[i] * wy[j] * v;
            }
        }
        acc
    }
}

fn trapezoid_weights(axis: &[f64]) -> Vec<f64> {
    let n = axis.len();
    let mut w = vec![0.0; n];
    for i in 0..n - 1 {
        let h = axis[i + 1] - axis[i];
        w[i] += 0.5 * h;
        w[i + 1] += 0.5 * h;
    }
    w
}

/// Covariance C and mean X̄ of the quadratures X = (√2 Re z, √2 Im z):
/// C₁₁ = ½(σ₁₁ + Re σ₁₂), C₂₂ = ½(σ₁₁ − Re σ₁₂), C₁₂ = ½ Im σ₁₂,
/// X̄ = √2 (Re d₁, Im d₁). The vacuum has C = I/2.
pub fn quadrature_moments(state: &GaussianState) -> (Matrix2<f64>, Vector2<f64>) {
    let s11 = state.sigma[(0, 0)].re;
    let s12 = state.sigma[(0, 1)];
    let c = Matrix2::new(
        0.5 * (s11 + s12.re),
        0.5 * s12.im,
        0.5 * s12.im,
        0.5 * (s11 - s12.re),
    );
    let sq2 = std::f64::consts::SQRT_2;
    (c, Vector2::new(sq2 * state.d[0].re, sq2 * state.d[0].im))
}

/// W(z) = exp[−½ ΔXᵀ C⁻¹ ΔX] / (π √det C), normalized over dRe z dIm z.
pub fn wigner(state: &GaussianState, grid: &PhaseGrid) -> Result<WignerField> {
    let (c, mean) = quadrature_moments(state);
    let det = c.determinant();
    if !(det > 0.0) {
        return Err(Error::Linalg(format!("quadrature covariance not positive (det = {det})")));
    }
    let inv = c.try_inverse().ok_or_else(|| Error::Linalg("singular quadrature covariance".into()))?;
    let norm = 1.0 / (std::f64::consts::PI * det.sqrt());
    let sq2 = std::f64::consts::SQRT_2;
    let values = grid
        .ys
        .iter()
        .map(|&y| {
            grid.xs
                .iter()
                .map(|&x| {
                    let dx = Vector2::new(sq2 * x - mean[0], sq2 * y - mean[1]);
                    norm * (-0.5 * dx.dot(&(inv * dx))).exp()
                })
                .collect()
        })
        .collect();
    Ok(WignerField {
        xs: grid.xs.clone(),
        ys: grid.ys.clone(),
        values,
        covariance: c,
        mean,
    })
}

/// δθ = √(2|u|²sinh²r + 1 − sinh 2r Re u²) / |α ∂θu + α* ∂θu*| for O = a + a†.
pub fn error_propagation(spec: &InitialStateSpec, u: Complex64, du: Complex64) -> Result<f64> {
    let r = spec.r;
    let var = 2.0 * u.norm_sqr() * r.sinh().powi(2) + 1.0 - (2.0 * r).sinh() * (u * u).re;
    let denom = (spec.alpha * du + spec.alpha.conj() * du.conj()).norm();
    if !(denom >= 1e-12) {
        return Err(Error::DivergentPrecision { denominator: denom });
    }
    Ok(var.max(0.0).sqrt() / denom)
}

/// Envelope of the error-propagation precision with a bound state, reached
/// for φ = π/2 at E_b t = nπ:
/// √(1 + 2Z²sinh²r − Z² sinh 2r) / (2Z|α ∂θE_b| t).
pub fn min_measurement_error(spec: &InitialStateSpec, bound: &BoundState, deb: f64, t: f64) -> Result<f64> {
    let a = spec.alpha.norm();
    if a == 0.0 {
        return Err(Error::InvalidParameter(
            "measurement of a + a† needs a nonzero displacement (|alpha| > 0)".into(),
        ));
    }
    if !t.is_finite() || t <= 0.0 {
        return Err(Error::domain("t", t, "finite t > 0"));
    }
    let z = bound.residue;
    let r = spec.r;
    let num = (1.0 + 2.0 * z * z * r.sinh().powi(2) - z * z * (2.0 * r).sinh()).max(0.0).sqrt();
    let denom = 2.0 * z * (a * deb).abs() * t;
    if !(denom >= 1e-300) {
        return Err(Error::DivergentPrecision { denominator: denom });
    }
    Ok(num / denom)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn spec_derived_quantities() {
        let s = InitialStateSpec::from_nbar_beta(100.0, 0.5, 0.3).unwrap();
        assert!((s.nbar() - 100.0).abs() < 1e-10);
        assert!((s.beta() - 0.5).abs() < 1e-12);
        let v = InitialStateSpec::from_alpha(0.0, 0.0, 0.0).unwrap();
        assert_eq!(v.beta(), 0.0);
        assert!(InitialStateSpec::from_nbar_beta(1.0, 1.5, 0.0).is_err());
        assert!(InitialStateSpec::from_alpha(1.0, 0.0, -0.1).is_err());
    }

    #[test]
    fn coherent_and_vacuum_limits() {
        let s = InitialStateSpec::from_alpha(1.5, 0.2, 0.0).unwrap();
        let st = evolve_state(&s, c(1.0, 0.0)).unwrap();
        assert_eq!(st.d[0], s.alpha());
        assert_eq!(st.sigma, Matrix2::identity());
        let sq = InitialStateSpec::from_alpha(1.5, 0.2, 1.3).unwrap();
        let st = evolve_state(&sq, c(1.0, 0.0)).unwrap();
        assert!((st.det_sigma() - 1.0).abs() < 1e-10);
        let st = evolve_state(&sq, c(0.0, 0.0)).unwrap();
        assert_eq!(st.d, [c(0.0, 0.0); 2]);
        assert_eq!(st.sigma, Matrix2::identity());
        assert!(evolve_state(&sq, c(1.1, 0.0)).is_err());
    }

    #[test]
    fn zero_derivative_gives_zero_qfi() {
        let s = InitialStateSpec::from_alpha(1.0, 0.0, 0.7).unwrap();
        let st = evolve_state(&s, c(0.5, 0.2)).unwrap();
        let d = evolve_derivative(&s, c(0.5, 0.2), c(0.0, 0.0));
        assert_eq!(qfi_gaussian(&st, &d).unwrap(), 0.0);
    }

    #[test]
    fn coherent_reduction() {
        let s = InitialStateSpec::from_alpha(2.0, 0.4, 0.0).unwrap();
        let u = c(0.3, -0.5);
        let du = c(1.2, 0.7);
        let f = qfi_gaussian(&evolve_state(&s, u).unwrap(), &evolve_derivative(&s, u, du)).unwrap();
        assert!((f - 4.0 * s.nbar() * du.norm_sqr()).abs() < 1e-12 * f);
    }

    #[test]
    fn pure_squeezed_family_is_regular() {
        // |u| = 1 with a phase derivative keeps ∂σ out of the kernel of M.
        let s = InitialStateSpec::from_alpha(1.0, 0.0, 0.8).unwrap();
        let u = Complex64::from_polar(1.0, 0.4);
        let du = c(0.0, -2.0) * u;
        let f = qfi_gaussian(&evolve_state(&s, u).unwrap(), &evolve_derivative(&s, u, du)).unwrap();
        assert!(f.is_finite() && f > 0.0);
        // Phase rotation of a pure state: F = 4 Var(n) (∂φ)², ∂φ = −2.
        let sh = 0.8f64.sinh();
        let ch = 0.8f64.cosh();
        let var_n = (ch * ch - 2.0 * ch * sh + sh * sh) * 1.0 + 2.0 * sh * sh * ch * ch;
        assert!((f - 4.0 * var_n * 4.0).abs() < 1e-8 * f, "{f} vs {}", 16.0 * var_n);
    }

    #[test]
    fn markovian_limits_and_reductions() {
        let s = InitialStateSpec::from_nbar_beta(50.0, 0.3, 0.0).unwrap();
        assert_eq!(qfi_markovian(&s, 0.2, 0.1, 0.0).unwrap(), 0.0);
        assert!(qfi_markovian(&s, 0.2, 0.1, 1e4).unwrap().abs() < 1e-300);
        assert!(qfi_markovian(&s, 0.2, 0.1, 1e6).unwrap() == 0.0);
        // β = 0 collapses to 4n̄|∂u|² with ∂u = −t ∂κ u.
        for &t in &[0.1, 1.0, 3.0, 17.0] {
            let f = qfi_markovian_nb(7.0, 0.0, 0.2, 0.1, t).unwrap();
            let want = 4.0 * 7.0 * (0.1 * t).powi(2) * (-0.4 * t).exp();
            assert!((f - want).abs() < 1e-12 * want);
        }
    }

    #[test]
    fn markovian_matches_exact_gaussian_qfi() {
        // Real α: the closed form is the Gaussian QFI of u_MA with ∂u = −t ∂κ u.
        let (kappa, dk) = (0.3, 0.05);
        for &(n, b) in &[(10.0, 0.2), (3.0, 0.9), (40.0, 0.5)] {
            let s = InitialStateSpec::from_nbar_beta(n, b, 0.0).unwrap();
            for &t in &[0.2, 1.5, 4.0] {
                let u = Complex64::new(-kappa * t, -t).exp();
                let du = -t * dk * u;
                let exact = qfi_gaussian(&evolve_state(&s, u).unwrap(), &evolve_derivative(&s, u, du)).unwrap();
                let closed = qfi_markovian(&s, kappa, dk, t).unwrap();
                assert!((exact - closed).abs() < 1e-9 * closed, "n={n} b={b} t={t}: {exact} vs {closed}");
            }
        }
    }

    #[test]
    fn vacuum_wigner_normalized() {
        let s = InitialStateSpec::from_alpha(0.0, 0.0, 0.0).unwrap();
        let st = evolve_state(&s, c(0.0, 0.0)).unwrap();
        let field = wigner(&st, &PhaseGrid::default_for(&s)).unwrap();
        assert!((field.integral() - 1.0).abs() < 1e-3);
        assert!((field.covariance - Matrix2::identity() * 0.5).norm() < 1e-15);
        let centre = field.values[80][80];
        assert!((centre - 2.0 / std::f64::consts::PI).abs() < 1e-12);
    }

    #[test]
    fn squeezed_wigner_axes() {
        let s = InitialStateSpec::from_alpha(1.0, 0.0, 1.0).unwrap();
        let st = evolve_state(&s, Complex64::from_polar(1.0, 0.7)).unwrap();
        let (cov, _) = quadrature_moments(&st);
        let eig = cov.symmetric_eigenvalues();
        let (lo, hi) = (eig.min(), eig.max());
        assert!((lo - (-2.0f64).exp() / 2.0).abs() < 1e-12);
        assert!((hi - 2.0f64.exp() / 2.0).abs() < 1e-12);
        let field = wigner(&st, &PhaseGrid::default_for(&s)).unwrap();
        assert!((field.integral() - 1.0).abs() < 1e-3);
        assert!(field.values.iter().flatten().all(|&w| w >= 0.0));
    }

    #[test]
    fn error_propagation_coherent() {
        let s = InitialStateSpec::from_alpha(2.0, 0.0, 0.0).unwrap();
        let d = error_propagation(&s, c(0.6, 0.0), c(0.25, 0.0)).unwrap();
        assert!((d - 1.0 / (2.0 * 2.0 * 0.25)).abs() < 1e-15);
        let z = InitialStateSpec::from_alpha(0.0, 0.0, 1.0).unwrap();
        assert!(matches!(
            error_propagation(&z, c(0.6, 0.0), c(0.25, 0.0)),
            Err(Error::DivergentPrecision { .. })
        ));
    }

    #[test]
    fn min_error_scaling() {
        let b = BoundState { energy: -3.0, residue: 0.6 };
        let s = InitialStateSpec::from_alpha(2.5, std::f64::consts::FRAC_PI_2, 0.5).unwrap();
        let a = min_measurement_error(&s, &b, 0.2, 10.0).unwrap();
        let b2 = min_measurement_error(&s, &b, 0.2, 20.0).unwrap();
        assert!((a / b2 - 2.0).abs() < 1e-14);
        let zero = InitialStateSpec::from_alpha(0.0, 0.0, 0.5).unwrap();
        assert!(min_measurement_error(&zero, &b, 0.2, 10.0).is_err());
    }
}
