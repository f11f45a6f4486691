//! Brute-force ground truth for verification: the single-excitation
//! propagator of a finite set of reservoir modes by exact diagonalization,
//! and the QFI of a Gaussian state rebuilt as a truncated Fock-space density
//! matrix via its symmetric logarithmic derivative.
//!
//! Nothing in the main pipeline calls into this crate.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;
use thiserror::Error;

use resqfi_core::gaussian::GaussianState;
use resqfi_core::reservoir::DiscreteReservoir;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OracleError {
    #[error("Fock truncation D = {dim} leaks {leakage:e} of the population (limit 1e-8)")]
    Truncation { dim: usize, leakage: f64 },

    #[error("density matrices have different dimensions ({0} vs {1})")]
    DimensionMismatch(usize, usize),

    #[error("invalid oracle input: {0}")]
    InvalidInput(String),

    #[error(transparent)]
    Core(#[from] resqfi_core::Error),
}

pub type Result<T> = std::result::Result<T, OracleError>;

/// u(t) = Σ_m |⟨sensor|m⟩|² e^{−iE_m t} for the (N+1)-dimensional
/// single-excitation Hamiltonian with diagonal (ω0, ω_1, …, ω_N) and the
/// couplings g_k in the first row and column.
#[derive(Debug, Clone)]
pub struct DiscretePropagator {
    energies: Vec<f64>,
    weights: Vec<f64>,
}

impl DiscretePropagator {
    pub fn new(disc: &DiscreteReservoir, omega0: f64) -> Result<Self> {
        if !omega0.is_finite() || omega0 <= 0.0 {
            return Err(OracleError::InvalidInput(format!("omega0 must be positive, got {omega0}")));
        }
        let n = disc.len() + 1;
        let mut h = DMatrix::<f64>::zeros(n, n);
        h[(0, 0)] = omega0;
        for (k, (&w, &g)) in disc.frequencies.iter().zip(&disc.couplings).enumerate() {
            h[(k + 1, k + 1)] = w;
            h[(0, k + 1)] = g;
            h[(k + 1, 0)] = g;
        }
        let eig = SymmetricEigen::new(h);
        let energies = eig.eigenvalues.iter().copied().collect();
        let weights = (0..n).map(|m| eig.eigenvectors[(0, m)].powi(2)).collect();
        Ok(DiscretePropagator { energies, weights })
    }

    pub fn energies(&self) -> &[f64] {
        &self.energies
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn u(&self, t: f64) -> Complex64 {
        if t == 0.0 {
            return Complex64::new(1.0, 0.0);
        }
        self.energies
            .iter()
            .zip(&self.weights)
            .map(|(&e, &w)| w * Complex64::from_polar(1.0, -e * t))
            .sum()
    }
}

pub fn u_discrete(disc: &DiscreteReservoir, omega0: f64, t: f64) -> Result<Complex64> {
    Ok(DiscretePropagator::new(disc, omega0)?.u(t))
}

/// Sensor density matrix in the number basis |0⟩, …, |D−1⟩.
#[derive(Debug, Clone, PartialEq)]
pub struct FockStateMatrix {
    pub rho: DMatrix<Complex64>,
    /// Population lost by cropping from the padded construction space.
    pub leakage: f64,
}

impl FockStateMatrix {
    pub fn dim(&self) -> usize {
        self.rho.nrows()
    }

    pub fn trace(&self) -> f64 {
        self.rho.diagonal().iter().map(|z| z.re).sum()
    }

    /// Tr[ρ a†a].
    pub fn mean_number(&self) -> f64 {
        (0..self.dim()).map(|n| n as f64 * self.rho[(n, n)].re).sum()
    }

    /// Tr[ρ a²].
    pub fn mean_a2(&self) -> Complex64 {
        // ⟨m|a²|n⟩ = √(n(n−1)) δ_{m,n−2}
        (2..self.dim())
            .map(|n| self.rho[(n, n - 2)] * ((n * (n - 1)) as f64).sqrt())
            .sum()
    }

    /// Tr[ρ a].
    pub fn mean_a(&self) -> Complex64 {
        (1..self.dim())
            .map(|n| self.rho[(n, n - 1)] * (n as f64).sqrt())
            .sum()
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        SymmetricEigen::new(self.rho.clone()).eigenvalues.iter().copied().collect()
    }
}

fn annihilation(dim: usize) -> DMatrix<Complex64> {
    let mut a = DMatrix::<Complex64>::zeros(dim, dim);
    for n in 1..dim {
        a[(n - 1, n)] = Complex64::new((n as f64).sqrt(), 0.0);
    }
    a
}

/// exp(G) for anti-Hermitian G, via the Hermitian eigenproblem of iG.
fn unitary_exp(g: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    let h = g * Complex64::i();
    let h = (&h + h.adjoint()) * Complex64::new(0.5, 0.0);
    let eig = SymmetricEigen::new(h);
    let v = &eig.eigenvectors;
    let phases = DVector::from_iterator(
        eig.eigenvalues.len(),
        eig.eigenvalues.iter().map(|&l| Complex64::from_polar(1.0, -l)),
    );
    let mut scaled = v.clone();
    for (j, mut col) in scaled.column_iter_mut().enumerate() {
        col *= phases[j];
    }
    scaled * v.adjoint()
}

/// ρ = D(d₁) S(ξ) ρ_th S†(ξ) D†(d₁) with S(ξ) = exp[(ξ*a² − ξa†²)/2].
///
/// The thermal occupation follows from ν̃ = √det σ, the squeezing from
/// cosh 2|ξ| = σ₁₁/ν̃ and arg ξ = arg(−σ₁₂). Operators are exponentiated
/// in dimension 2D and the result cropped to D.
pub fn build_fock_state(state: &GaussianState, dim: usize) -> Result<FockStateMatrix> {
    if dim < 2 {
        return Err(OracleError::InvalidInput("Fock dimension must be at least 2".into()));
    }
    let det = state.det_sigma();
    if !(det >= 1.0 - 1e-9) {
        return Err(OracleError::InvalidInput(format!(
            "covariance violates det σ >= 1 (det = {det})"
        )));
    }
    let nu = det.max(1.0).sqrt();
    let n_th = 0.5 * (nu - 1.0);
    let s11 = state.sigma[(0, 0)].re;
    let s12 = state.sigma[(0, 1)];
    let r = 0.5 * (s11 / nu).max(1.0).acosh();
    let xi = if s12.norm() > 0.0 {
        -s12 / s12.norm() * r
    } else {
        Complex64::new(0.0, 0.0)
    };
    let alpha = state.d[0];

    let big = 2 * dim;
    let a = annihilation(big);
    let ad = a.adjoint();
    let a2 = &a * &a;
    let ad2 = &ad * &ad;
    let squeeze = unitary_exp(&((&a2 * xi.conj() - &ad2 * xi) * Complex64::new(0.5, 0.0)));
    let displace = unitary_exp(&(&ad * alpha - &a * alpha.conj()));

    let mut thermal = DMatrix::<Complex64>::zeros(big, big);
    let ratio = n_th / (n_th + 1.0);
    let mut p = 1.0 / (n_th + 1.0);
    for n in 0..big {
        thermal[(n, n)] = Complex64::new(p, 0.0);
        p *= ratio;
    }
    let u = displace * squeeze;
    let full = &u * thermal * u.adjoint();
    let rho = full.view((0, 0), (dim, dim)).into_owned();
    let rho = (&rho + rho.adjoint()) * Complex64::new(0.5, 0.0);
    let kept: f64 = rho.diagonal().iter().map(|z| z.re).sum();
    let leakage = (1.0 - kept).abs();
    if leakage > 1e-8 {
        return Err(OracleError::Truncation { dim, leakage });
    }
    Ok(FockStateMatrix { rho, leakage })
}

/// [`build_fock_state`] starting at D = max(40, 8n̄) and doubling until the
/// leakage check passes, up to D = 1024.
pub fn build_fock_state_auto(state: &GaussianState) -> Result<FockStateMatrix> {
    let nbar = 0.5 * (state.sigma[(0, 0)].re - 1.0) + state.d[0].norm_sqr();
    let mut dim = ((8.0 * nbar).ceil() as usize).max(40);
    loop {
        match build_fock_state(state, dim) {
            Err(OracleError::Truncation { .. }) if dim < 1024 => dim *= 2,
            other => return other,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FockQfi {
    pub value: f64,
    /// Pairs with |p_i − p_j| < 1e-12 outside the kernel, where the SLD
    /// denominators are least trustworthy.
    pub degenerate_pairs: usize,
}

/// F = Σ_{p_i+p_j>1e-10} 2|⟨i|∂θρ|j⟩|²/(p_i+p_j) with ρ = (ρ₊ + ρ₋)/2 and
/// ∂θρ = (ρ₊ − ρ₋)/(2ε).
pub fn qfi_fock_oracle(minus: &FockStateMatrix, plus: &FockStateMatrix, eps: f64) -> Result<FockQfi> {
    if minus.dim() != plus.dim() {
        return Err(OracleError::DimensionMismatch(minus.dim(), plus.dim()));
    }
    if !eps.is_finite() || eps == 0.0 {
        return Err(OracleError::InvalidInput(format!("step must be finite and nonzero, got {eps}")));
    }
    let half = Complex64::new(0.5, 0.0);
    let rho = (&plus.rho + &minus.rho) * half;
    let drho = (&plus.rho - &minus.rho) * Complex64::new(0.5 / eps, 0.0);
    let eig = SymmetricEigen::new(rho);
    let v = &eig.eigenvectors;
    let p = &eig.eigenvalues;
    let m = v.adjoint() * drho * v;
    let n = p.len();
    let mut value = 0.0;
    let mut degenerate_pairs = 0;
    for i in 0..n {
        for j in 0..n {
            let s = p[i] + p[j];
            if s > 1e-10 {
                value += 2.0 * m[(i, j)].norm_sqr() / s;
                if i < j && (p[i] - p[j]).abs() < 1e-12 {
                    degenerate_pairs += 1;
                }
            }
        }
    }
    Ok(FockQfi {
        value,
        degenerate_pairs,
    })
}

/// Default oracle step ε = 1e-4·max(1, |θ|).
pub fn oracle_step(theta: f64) -> f64 {
    1e-4 * theta.abs().max(1.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::Matrix2;
    use resqfi_core::gaussian::{evolve_state, InitialStateSpec};

    #[test]
    fn vacuum_is_ground_state() {
        let st = GaussianState {
            d: [Complex64::new(0.0, 0.0); 2],
            sigma: Matrix2::identity(),
        };
        let f = build_fock_state(&st, 10).unwrap();
        assert!((f.rho[(0, 0)].re - 1.0).abs() < 1e-14);
        assert!(f.rho.iter().skip(1).all(|z| z.norm() < 1e-14));
    }

    #[test]
    fn squeezed_vacuum_second_moment() {
        let spec = InitialStateSpec::from_alpha(0.0, 0.0, 1.0).unwrap();
        let st = evolve_state(&spec, Complex64::new(1.0, 0.0)).unwrap();
        let f = build_fock_state(&st, 80).unwrap();
        let want = -(1.0f64.sinh() * 1.0f64.cosh());
        assert!((f.mean_a2() - want).norm() < 1e-8, "{:?}", f.mean_a2());
        assert!((f.mean_number() - 1.0f64.sinh().powi(2)).abs() < 1e-8);
    }

    #[test]
    fn leakage_detected() {
        let spec = InitialStateSpec::from_alpha(4.0, 0.0, 0.0).unwrap();
        let st = evolve_state(&spec, Complex64::new(1.0, 0.0)).unwrap();
        assert!(matches!(build_fock_state(&st, 10), Err(OracleError::Truncation { .. })));
        assert!(build_fock_state_auto(&st).is_ok());
    }

    #[test]
    fn single_mode_rabi() {
        let (w0, w1, g) = (1.0, 1.7, 0.3);
        let disc = DiscreteReservoir::from_modes(vec![w1], vec![g]).unwrap();
        let p = DiscretePropagator::new(&disc, w0).unwrap();
        let om = ((w0 - w1) * (w0 - w1) + 4.0 * g * g).sqrt();
        for &t in &[0.0, 0.3, 2.0, 11.0] {
            let want = Complex64::from_polar(1.0, -(w0 + w1) * t / 2.0)
                * Complex64::new((om * t / 2.0).cos(), (w1 - w0) / om * (om * t / 2.0).sin());
            assert!((p.u(t) - want).norm() < 1e-12, "t={t}");
        }
    }

    #[test]
    fn coherent_family_qfi() {
        // ρ(θ) = |θα₀⟩⟨θα₀| at θ = 1: F = 4|α₀|².
        let a0 = Complex64::new(0.8, -0.6);
        let st = |theta: f64| GaussianState {
            d: [a0 * theta, (a0 * theta).conj()],
            sigma: Matrix2::identity(),
        };
        let eps = oracle_step(1.0);
        let m = build_fock_state(&st(1.0 - eps), 40).unwrap();
        let p = build_fock_state(&st(1.0 + eps), 40).unwrap();
        let f = qfi_fock_oracle(&m, &p, eps).unwrap().value;
        assert!((f - 4.0 * a0.norm_sqr()).abs() < 1e-6, "{f}");
        let same = qfi_fock_oracle(&m, &m, eps).unwrap().value;
        assert_eq!(same, 0.0);
    }
}
