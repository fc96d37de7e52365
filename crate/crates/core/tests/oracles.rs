//! Independent numerical oracles for the closed forms in the library.
//!
//! Everything here is built from scratch against the raw Schrödinger
//! equation: a classical RK4 integrator for propagators (a different
//! method and error structure than the library's midpoint-exponential
//! integrator) and Simpson quadrature over explicitly-written invariant
//! eigenvectors for the phase integrals. No library pipeline is reused
//! beyond the Hamiltonian definitions themselves.

use std::f64::consts::PI;

use num_complex::Complex64;

use geomgate::gatesynth::{
    elimination_constraint_single, elimination_constraint_two,
};
use geomgate::invariant::{hamiltonian_two, SingleQubitDrive, TwoQubitDrive};
use geomgate::propagate::{analytic_unitary_single, analytic_unitary_two};
use geomgate::qops::ComplexMatrix;

/// Classical fixed-step RK4 on i dU/dt = H(t) U, column by column. Not
/// unitarity preserving, which is the point: agreement with the exact
/// forms cannot come from a shared structural bias.
fn rk4_propagator<H>(hamiltonian: H, t_end: f64, steps: usize) -> ComplexMatrix
where
    H: Fn(f64) -> ComplexMatrix,
{
    let dim = hamiltonian(0.0).dim();
    let h = t_end / steps as f64;
    let rhs = |t: f64, u: &ComplexMatrix| {
        hamiltonian(t).mul(u).scale(Complex64::new(0.0, -1.0))
    };
    let mut u = ComplexMatrix::identity(dim);
    for k in 0..steps {
        let t = t_end * (k as f64 / steps as f64);
        let k1 = rhs(t, &u);
        let k2 = rhs(t + 0.5 * h, &add_scaled(&u, &k1, 0.5 * h));
        let k3 = rhs(t + 0.5 * h, &add_scaled(&u, &k2, 0.5 * h));
        let k4 = rhs(t + h, &add_scaled(&u, &k3, h));
        let mut increment = k1;
        increment = increment.add(&k2.scale(Complex64::new(2.0, 0.0)));
        increment = increment.add(&k3.scale(Complex64::new(2.0, 0.0)));
        increment = increment.add(&k4);
        u = add_scaled(&u, &increment, h / 6.0);
    }
    u
}

fn add_scaled(base: &ComplexMatrix, delta: &ComplexMatrix, factor: f64) -> ComplexMatrix {
    base.add(&delta.scale(Complex64::new(factor, 0.0)))
}

fn max_entry_distance(a: &ComplexMatrix, b: &ComplexMatrix) -> f64 {
    a.sub(b).max_abs_entry()
}

/// Composite Simpson rule, written out independently of the library.
fn simpson_oracle(values: &[f64], h: f64) -> f64 {
    let n = values.len() - 1;
    assert!(n >= 2 && n % 2 == 0, "Simpson needs an even interval count");
    let mut acc = values[0] + values[n];
    for (k, v) in values.iter().enumerate().skip(1).take(n - 1) {
        acc += if k % 2 == 1 { 4.0 * v } else { 2.0 * v };
    }
    acc * h / 3.0
}

/// The invariant eigenvectors of a rotating block, written directly from
/// the mixing-angle parametrization: |+> = (cos(chi/2), e^{i w t} sin(chi/2)),
/// |-> = (-e^{-i w t} sin(chi/2), cos(chi/2)).
fn closed_form_eigenvector(
    omega: f64,
    z: f64,
    xy: f64,
    t: f64,
    level: usize,
) -> [Complex64; 2] {
    let lambda = (xy * xy + (z - omega) * (z - omega)).sqrt();
    let chi = 2.0 * ((lambda + omega - z) / xy).atan();
    let (c, s) = ((0.5 * chi).cos(), (0.5 * chi).sin());
    let turn = Complex64::from_polar(1.0, omega * t);
    match level {
        0 => [Complex64::new(c, 0.0), turn * s],
        _ => [-turn.conj() * s, Complex64::new(c, 0.0)],
    }
}

/// <n,t| H(t) |n,t> for a rotating block, via the explicit vectors.
fn block_energy_expectation(omega: f64, z: f64, xy: f64, t: f64, level: usize) -> f64 {
    let v = closed_form_eigenvector(omega, z, xy, t, level);
    let h00 = 0.5 * z;
    let h01 = Complex64::from_polar(0.5 * xy, -omega * t);
    let mut acc = Complex64::new(0.0, 0.0);
    acc += v[0].conj() * (h00 * v[0] + h01 * v[1]);
    acc += v[1].conj() * (h01.conj() * v[0] - h00 * v[1]);
    acc.re
}

/// Dynamic phase over one period by Simpson quadrature of the energy
/// expectation, -integral <n|H|n> dt.
fn quadrature_dynamic_phase(omega: f64, z: f64, xy: f64, level: usize, points: usize) -> f64 {
    let tau = 2.0 * PI / omega;
    let h = tau / points as f64;
    let samples: Vec<f64> = (0..=points)
        .map(|k| block_energy_expectation(omega, z, xy, h * k as f64, level))
        .collect();
    -simpson_oracle(&samples, h)
}

#[test]
fn rk4_confirms_single_qubit_closed_form() {
    for (omega1, omega2) in [(0.5, 0.5), (1.0, 0.5), (0.0, 1.0), (1.7, 1.3)] {
        let drive = SingleQubitDrive::new(1.0, omega1, omega2).unwrap();
        let tau = drive.period();
        let block = drive.block();
        let oracle = rk4_propagator(|t| block.hamiltonian(t), tau, 20_000);
        let exact = analytic_unitary_single(&drive, tau);
        assert!(
            max_entry_distance(&oracle, &exact) <= 1e-9,
            "closed form disagrees with RK4 at omega1={omega1}, omega2={omega2}"
        );
    }
}

#[test]
fn rk4_confirms_two_qubit_closed_form() {
    let drive = TwoQubitDrive::new(1.0, 16.0 / 27.0, 4.0 * 11.0f64.sqrt() / 27.0).unwrap();
    let tau = drive.period();
    let oracle = rk4_propagator(|t| hamiltonian_two(&drive, t), tau, 20_000);
    let exact = analytic_unitary_two(&drive, tau);
    assert!(max_entry_distance(&oracle, &exact) <= 1e-9);
}

#[test]
fn rk4_confirms_hermitian_exponential() {
    let h = ComplexMatrix::from_real_2x2([[-0.25, 0.25], [0.25, 0.25]]);
    let t_end = 2.0 * PI;
    let oracle = rk4_propagator(|_| h.clone(), t_end, 100_000);
    let direct = geomgate::qops::expm_i_hermitian(&h, t_end).unwrap();
    assert!(max_entry_distance(&oracle, &direct) <= 1e-8);
}

#[test]
fn quadrature_confirms_single_constraint_values() {
    // The constraint LHS times 2 pi / omega must equal minus the
    // quadrature dynamic phase of the upper level.
    for (omega1, omega2) in [(1.0, 0.5), (0.3, 0.8), (0.5, 0.5), (1.7, 1.1)] {
        let drive = SingleQubitDrive::new(1.0, omega1, omega2).unwrap();
        let lhs = elimination_constraint_single(&drive);
        let quad = quadrature_dynamic_phase(1.0, omega1, omega2, 0, 2048);
        assert!(
            (lhs * 2.0 * PI + quad).abs() <= 1e-8,
            "constraint vs quadrature mismatch at omega1={omega1}, omega2={omega2}"
        );
    }
}

#[test]
fn quadrature_pins_longitudinal_free_constraint_value() {
    // omega1 = 0, omega2 = omega: the displayed constraint reduces to
    // (sqrt(2)+1) / (4+2 sqrt(2)) = 1/(2 sqrt(2)) ~ 0.353553, and the
    // quadrature dynamic phase independently confirms that value.
    let drive = SingleQubitDrive::new(1.0, 0.0, 1.0).unwrap();
    let lhs = elimination_constraint_single(&drive);
    let closed = 1.0 / (2.0 * 2.0f64.sqrt());
    assert!((lhs - closed).abs() <= 1e-14);

    let quad = quadrature_dynamic_phase(1.0, 0.0, 1.0, 0, 4096);
    assert!((quad + 2.0 * PI * closed).abs() <= 1e-10);
}

#[test]
fn quadrature_confirms_two_qubit_constraint() {
    // The pair constraint acts on the qubit-2-down block (z = +J).
    let (omega, coupling, omega0) = (1.0, 0.5, 0.5);
    let drive = TwoQubitDrive::new(omega, coupling, omega0).unwrap();
    let lhs = elimination_constraint_two(&drive);
    let quad = quadrature_dynamic_phase(omega, coupling, omega0, 0, 2048);
    assert!((lhs * 2.0 * PI + quad).abs() <= 1e-8);
}

#[test]
fn quadrature_shows_zero_dynamic_phase_on_circle() {
    for omega1 in [0.2f64, 0.5, 0.8] {
        let omega2 = (omega1 - omega1 * omega1).sqrt();
        for level in 0..2 {
            let quad = quadrature_dynamic_phase(1.0, omega1, omega2, level, 2048);
            assert!(
                quad.abs() <= 1e-10,
                "dynamic phase should vanish on the circle at omega1={omega1}, level={level}"
            );
        }
    }
}

#[test]
fn worked_example_surds_are_frozen() {
    let drive = TwoQubitDrive::new(1.0, 16.0 / 27.0, 4.0 * 11.0f64.sqrt() / 27.0).unwrap();
    assert!((drive.lambda1() - 5.0 / 3.0).abs() <= 1e-15);
    assert!((drive.lambda2() - 33.0f64.sqrt() / 9.0).abs() <= 1e-15);
    // (4 sqrt(11)/27)^2 + (16/27)^2 - 16/27 = (176 + 256 - 432)/729 = 0.
    let q = drive.omega0().powi(2) + drive.coupling().powi(2) - drive.coupling();
    assert!(q.abs() <= 1e-16);
}
