use num_complex::Complex64;

use resqfi_core::analysis::{du_dtheta_volterra, volterra_on_grid, EstimationTarget, TimeGrid};
use resqfi_core::gaussian::{evolve_derivative, evolve_state, qfi_gaussian, InitialStateSpec};
use resqfi_core::propagator::{max_volterra_step, solve_volterra_extrapolated};
use resqfi_core::reservoir::{OhmicSpectralDensity, Parameter};
use resqfi_oracle::{build_fock_state_auto, oracle_step, qfi_fock_oracle, DiscretePropagator, FockStateMatrix};

#[test]
fn discrete_modes_converge_in_n() {
    // Restricted to t ≤ 3 so that even N = 250 (spacing 0.8, recurrence
    // time ≈ 7.9) is inside its recurrence-free window.
    let sd = OhmicSpectralDensity::new(0.4, 10.0, 1.0).unwrap();
    let traj = solve_volterra_extrapolated(&sd, 1.0, 3.0, 0.005).unwrap();
    let errors: Vec<f64> = [250, 500, 1000, 2000]
        .iter()
        .map(|&n| {
            let disc = sd.discretize(n, 200.0).unwrap();
            let p = DiscretePropagator::new(&disc, 1.0).unwrap();
            traj.times.iter().zip(&traj.u).map(|(&t, u)| (p.u(t) - u).norm()).fold(0.0, f64::max)
        })
        .collect();
    for w in errors.windows(2) {
        assert!(w[1] < w[0] * 1.05, "{errors:?}");
    }
    assert!(errors[3] < 5e-3, "{errors:?}");
}

fn mixed_state(u: Complex64) -> FockStateMatrix {
    let spec = InitialStateSpec::from_nbar_beta(3.0, 0.6, 0.4).unwrap();
    build_fock_state_auto(&evolve_state(&spec, u).unwrap()).unwrap()
}

#[test]
fn fock_state_is_a_density_matrix() {
    for &u in &[Complex64::new(0.7, 0.2), Complex64::new(-0.1, 0.5), Complex64::new(0.95, 0.0)] {
        let f = mixed_state(u);
        let eig = f.eigenvalues();
        assert!((eig.iter().sum::<f64>() - 1.0).abs() <= 1e-8);
        assert!(eig.iter().all(|&p| p >= -1e-10), "{:?}", eig.iter().cloned().fold(f64::INFINITY, f64::min));
        let herm = (&f.rho - f.rho.adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max);
        assert!(herm <= 1e-12);
        assert!(f.leakage <= 1e-8);
    }
}

#[test]
fn oracle_symmetric_under_step_relabelling() {
    let (a, b) = (mixed_state(Complex64::new(0.60, 0.20)), mixed_state(Complex64::new(0.6001, 0.2002)));
    let fwd = qfi_fock_oracle(&a, &b, 1e-4).unwrap().value;
    let rev = qfi_fock_oracle(&b, &a, -1e-4).unwrap().value;
    assert!((fwd - rev).abs() <= 1e-10 * fwd);
}

#[test]
fn gaussian_qfi_matches_fock_oracle() {
    let sd = OhmicSpectralDensity::new(0.4, 10.0, 1.0).unwrap();
    let spec = InitialStateSpec::from_nbar_beta(4.0, 0.5, 0.3).unwrap();
    let grid = TimeGrid::new(10.0, 10).unwrap();
    let which = Parameter::Eta;
    let d = du_dtheta_volterra(&sd, 1.0, &EstimationTarget::new(which), &grid).unwrap();
    let (u, du) = (*d.u.last().unwrap(), *d.du.last().unwrap());
    let fg = qfi_gaussian(&evolve_state(&spec, u).unwrap(), &evolve_derivative(&spec, u, du)).unwrap();

    let eps = oracle_step(0.4);
    let plus = sd.with_param(which, 0.4 + eps).unwrap();
    let minus = sd.with_param(which, 0.4 - eps).unwrap();
    let limit = max_volterra_step(&plus, 1.0).min(max_volterra_step(&minus, 1.0));
    let rho = |sd: &OhmicSpectralDensity| {
        let u = *volterra_on_grid(sd, 1.0, &grid, limit).unwrap().last().unwrap();
        build_fock_state_auto(&evolve_state(&spec, u).unwrap()).unwrap()
    };
    let fo = qfi_fock_oracle(&rho(&minus), &rho(&plus), eps).unwrap().value;
    assert!((fo - fg).abs() <= 0.01 * fg, "oracle {fo}, gaussian {fg}");
}
