//! End-to-end acceptance suite. Each test covers one numbered criterion
//! and prints a single PASS line with its headline metric; a failure
//! panics with the offending drive, so the harness line doubles as the
//! per-criterion verdict.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use geomgate::gatesynth::{
    build_controlled_u, elimination_constraint_two, find_cycles, synthesize_single_qubit_phase,
};
use geomgate::invariant::{
    adiabatic_gap, circle_distance, hamiltonian_single, hamiltonian_two, invariant_single,
    invariant_two, mod_two_pi, phase_decomposition, single_qubit_frame, single_qubit_phases,
    two_qubit_frame, DriveParams, SingleQubitDrive, TwoQubitDrive,
};
use geomgate::propagate::{
    analytic_propagator_single, analytic_propagator_two, analytic_unitary_single,
    analytic_unitary_two, cyclic_gate_single, cyclic_gate_two, numeric_propagator,
};
use geomgate::qops::BlockEmbedding;

fn random_single_drive(rng: &mut ChaCha8Rng) -> SingleQubitDrive {
    loop {
        let omega1 = rng.gen_range(0.0..2.0);
        let omega2 = rng.gen_range(0.1..2.0);
        let drive = SingleQubitDrive::new(1.0, omega1, omega2).unwrap();
        if drive.lambda() >= 0.1 {
            return drive;
        }
    }
}

fn random_two_drive(rng: &mut ChaCha8Rng) -> TwoQubitDrive {
    loop {
        let coupling = rng.gen_range(0.1..2.0);
        let omega0 = rng.gen_range(0.1..2.0);
        let drive = TwoQubitDrive::new(1.0, coupling, omega0).unwrap();
        let (l1, l2) = (drive.lambda1(), drive.lambda2());
        if l2 >= 0.1 && (l1 - l2).abs() >= 0.05 {
            return drive;
        }
    }
}

#[test]
fn criterion_1_worked_example() {
    let omega0 = 4.0 * 11.0f64.sqrt() / 27.0;
    let drive = TwoQubitDrive::new(1.0, 16.0 / 27.0, omega0).unwrap();

    let ratio_error = (drive.lambda1() - 5.0 / 3.0).abs();
    assert!(ratio_error <= 1e-12, "lambda1/omega off by {ratio_error:.3e}");

    let lhs = elimination_constraint_two(&drive);
    assert!(lhs.abs() <= 1e-12, "constraint LHS {lhs:.3e}");

    let cycles = find_cycles(drive.lambda1(), 64, 1e-9).unwrap();
    assert_eq!((cycles.cycles, cycles.turns), (3, 4));

    let spec = build_controlled_u(1.0, 16.0 / 27.0, omega0, 64).unwrap();
    assert!(spec.upper_block_identity_fidelity >= 1.0 - 1e-8);

    let swing = (11.0f64 / 3.0).sqrt();
    let expected = [mod_two_pi(PI * (1.0 - swing)), mod_two_pi(PI * (1.0 + swing))];
    let mut worst: f64 = 0.0;
    for level in 0..2 {
        worst = worst.max(circle_distance(spec.achieved_geometric[level], expected[level]));
    }
    assert!(worst <= 1e-6, "lower-block geometric phases off by {worst:.3e}");

    println!(
        "acceptance criterion 1 — worked example: PASS \
         (m=3, N=4, identity fidelity {:.2e} below 1, phase error {worst:.2e})",
        1.0 - spec.upper_block_identity_fidelity
    );
}

#[test]
fn criterion_2_closed_form_phases() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut worst: f64 = 0.0;
    for _ in 0..200 {
        let drive = random_single_drive(&mut rng);
        let report = single_qubit_phases(&drive, 1024).unwrap();
        let closed = drive.cycle_phases().unwrap();
        for (level, phases) in report.levels.iter().enumerate() {
            let errors = [
                circle_distance(phases.total, closed.total[level]),
                circle_distance(phases.dynamic, closed.dynamic[level]),
                circle_distance(phases.geometric, closed.geometric[level]),
            ];
            for e in errors {
                worst = worst.max(e);
                assert!(
                    e <= 1e-6,
                    "phase mismatch {e:.3e} at omega1={}, omega2={}, level {level}",
                    drive.omega1(),
                    drive.omega2()
                );
            }
        }
    }

    // On the zero-dynamic-phase circle the split collapses: the dynamic
    // part vanishes and the geometric part is pi (1 +- cos chi).
    let mut worst_circle: f64 = 0.0;
    for _ in 0..50 {
        let omega1: f64 = rng.gen_range(0.05..0.95);
        let omega2 = (omega1 - omega1 * omega1).sqrt();
        let drive = SingleQubitDrive::new(1.0, omega1, omega2).unwrap();
        let chi = drive.mixing_angles().unwrap().chi;
        let report = single_qubit_phases(&drive, 1024).unwrap();
        for (level, sign) in [(0usize, 1.0f64), (1, -1.0)] {
            let geometric = PI * (1.0 + sign * chi.cos());
            let e_dyn = circle_distance(report.levels[level].dynamic, 0.0);
            let e_geo = circle_distance(report.levels[level].geometric, geometric);
            worst_circle = worst_circle.max(e_dyn).max(e_geo);
            assert!(e_dyn <= 1e-6, "dynamic phase {e_dyn:.3e} on circle at omega1={omega1}");
            assert!(e_geo <= 1e-6, "geometric phase off {e_geo:.3e} at omega1={omega1}");
        }
    }

    println!(
        "acceptance criterion 2 — closed-form phases: PASS \
         (200 drives, worst error {worst:.2e}; 50 circle drives, worst {worst_circle:.2e})"
    );
}

#[test]
fn criterion_3_invariance_law() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut worst: f64 = 0.0;

    for _ in 0..500 {
        let drive = random_single_drive(&mut rng);
        let tau = drive.period();
        let t = rng.gen_range(0.0..tau);
        let h = 1e-5 * tau;
        let residual = geomgate::invariant::invariance_residual(
            |t| hamiltonian_single(&drive, t),
            |t| invariant_single(&drive, t).unwrap(),
            t,
            h,
        );
        let scaled = residual / drive.lambda();
        worst = worst.max(scaled);
        assert!(scaled <= 1e-7, "single-qubit residual {scaled:.3e} at t={t}");
    }

    for _ in 0..500 {
        let drive = random_two_drive(&mut rng);
        let tau = drive.period();
        let t = rng.gen_range(0.0..tau);
        let h = 1e-5 * tau;
        let residual = geomgate::invariant::invariance_residual(
            |t| hamiltonian_two(&drive, t),
            |t| invariant_two(&drive, t).unwrap(),
            t,
            h,
        );
        let scaled = residual / drive.lambda1().max(drive.lambda2());
        worst = worst.max(scaled);
        assert!(scaled <= 1e-7, "pair residual {scaled:.3e} at t={t}");
    }

    println!(
        "acceptance criterion 3 — invariance law: PASS \
         (1000 samples, worst scaled residual {worst:.2e})"
    );
}

#[test]
fn criterion_4_propagator_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let steps = 100_000;
    let mut worst: f64 = 0.0;

    for _ in 0..50 {
        let drive = random_single_drive(&mut rng);
        let tau = drive.period();
        let numeric = numeric_propagator(|t| hamiltonian_single(&drive, t), tau, steps).unwrap();
        for k in 0..=64usize {
            let idx = (k * steps + 32) / 64;
            let idx = idx.min(steps);
            let exact = analytic_unitary_single(&drive, numeric.times()[idx]);
            let delta = numeric.unitary(idx).sub(&exact).max_abs_entry();
            worst = worst.max(delta);
            assert!(
                delta <= 1e-8,
                "single propagator off by {delta:.3e} at omega1={}, omega2={}",
                drive.omega1(),
                drive.omega2()
            );
        }
    }

    for _ in 0..50 {
        let drive = random_two_drive(&mut rng);
        let tau = drive.period();
        let numeric = numeric_propagator(|t| hamiltonian_two(&drive, t), tau, steps).unwrap();
        for k in 0..=64usize {
            let idx = ((k * steps + 32) / 64).min(steps);
            let exact = analytic_unitary_two(&drive, numeric.times()[idx]);
            let delta = numeric.unitary(idx).sub(&exact).max_abs_entry();
            worst = worst.max(delta);
            assert!(
                delta <= 1e-8,
                "pair propagator off by {delta:.3e} at J={}, omega0={}",
                drive.coupling(),
                drive.omega0()
            );
        }
    }

    // Measured convergence order of the integrator, per family.
    let order_of = |error_coarse: f64, error_fine: f64| (error_coarse / error_fine).log2();
    let single = random_single_drive(&mut rng);
    let tau = single.period();
    let exact = analytic_unitary_single(&single, tau);
    let err = |steps: usize| {
        numeric_propagator(|t| hamiltonian_single(&single, t), tau, steps)
            .unwrap()
            .last_unitary()
            .sub(&exact)
            .max_abs_entry()
    };
    let order_single = order_of(err(1024), err(2048));
    assert!(order_single >= 1.9, "single-family order {order_single:.3}");

    let pair = random_two_drive(&mut rng);
    let tau = pair.period();
    let exact = analytic_unitary_two(&pair, tau);
    let err = |steps: usize| {
        numeric_propagator(|t| hamiltonian_two(&pair, t), tau, steps)
            .unwrap()
            .last_unitary()
            .sub(&exact)
            .max_abs_entry()
    };
    let order_pair = order_of(err(1024), err(2048));
    assert!(order_pair >= 1.9, "pair-family order {order_pair:.3}");

    println!(
        "acceptance criterion 4 — propagator oracle: PASS \
         (100 drives x 65 sample times, worst delta {worst:.2e}; \
         orders {order_single:.2} and {order_pair:.2})"
    );
}

#[test]
fn criterion_5_structural_properties() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let embedding = BlockEmbedding::by_second_qubit();
    let mut worst_offdiag: f64 = 0.0;
    let mut worst_block: f64 = 0.0;
    let mut worst_defect: f64 = 0.0;

    for _ in 0..20 {
        let drive = random_single_drive(&mut rng);
        let frame = single_qubit_frame(&drive, 512).unwrap();
        let propagator = analytic_propagator_single(&drive, 512).unwrap();
        worst_defect = worst_defect.max(propagator.max_unitarity_defect());
        let gate = cyclic_gate_single(&drive, &frame, 1).unwrap();
        worst_offdiag = worst_offdiag.max(gate.offdiagonal_leakage);
        worst_defect = worst_defect.max(gate.unitarity_defect);
        assert!(gate.offdiagonal_leakage <= 1e-8);
    }

    for _ in 0..20 {
        let drive = random_two_drive(&mut rng);
        let frame = two_qubit_frame(&drive, 512).unwrap();
        let propagator = analytic_propagator_two(&drive, 512).unwrap();
        worst_defect = worst_defect.max(propagator.max_unitarity_defect());
        let leakage = propagator.cross_block_leakage(embedding);
        worst_block = worst_block.max(leakage);
        assert!(leakage <= 1e-8, "cross-block leakage {leakage:.3e} in exact propagator");

        let gate = cyclic_gate_two(&drive, &frame, 1).unwrap();
        worst_offdiag = worst_offdiag.max(gate.offdiagonal_leakage);
        worst_block = worst_block.max(gate.block_leakage.unwrap());
        worst_defect = worst_defect.max(gate.unitarity_defect);
        assert!(gate.offdiagonal_leakage <= 1e-8);
    }

    // The numeric route must conserve the blocks as well.
    let drive = random_two_drive(&mut rng);
    let numeric =
        numeric_propagator(|t| hamiltonian_two(&drive, t), drive.period(), 2000).unwrap();
    let leakage = numeric.cross_block_leakage(embedding);
    worst_block = worst_block.max(leakage);
    worst_defect = worst_defect.max(numeric.max_unitarity_defect());
    assert!(leakage <= 1e-8);

    assert!(worst_defect <= 1e-10, "unitarity defect {worst_defect:.3e}");
    println!(
        "acceptance criterion 5 — structural properties: PASS \
         (off-diagonal {worst_offdiag:.2e}, cross-block {worst_block:.2e}, \
         unitarity defect {worst_defect:.2e})"
    );
}

#[test]
fn criterion_6_gauge_invariance() {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut worst: f64 = 0.0;

    for trial in 0..100 {
        let two_levels: bool = trial % 5 < 3;
        let (base_report, wound_report) = if two_levels {
            let drive = random_single_drive(&mut rng);
            let frame = single_qubit_frame(&drive, 512).unwrap();
            let propagator = analytic_propagator_single(&drive, 512).unwrap();
            let block = drive.block();
            let hamiltonian = move |t: f64| block.hamiltonian(t);
            let base = phase_decomposition(hamiltonian, &frame, &propagator).unwrap();
            let params = random_gauge(&mut rng, 2);
            let wound = frame.rephased(|n, t| params.eval(n, t, drive.period())).unwrap();
            let rewound = phase_decomposition(hamiltonian, &wound, &propagator).unwrap();
            (base, rewound)
        } else {
            let drive = random_two_drive(&mut rng);
            let frame = two_qubit_frame(&drive, 512).unwrap();
            let propagator = analytic_propagator_two(&drive, 512).unwrap();
            let hamiltonian = move |t: f64| hamiltonian_two(&drive, t);
            let base = phase_decomposition(hamiltonian, &frame, &propagator).unwrap();
            let params = random_gauge(&mut rng, 4);
            let wound = frame.rephased(|n, t| params.eval(n, t, drive.period())).unwrap();
            let rewound = phase_decomposition(hamiltonian, &wound, &propagator).unwrap();
            (base, rewound)
        };

        for (base, wound) in base_report.levels.iter().zip(&wound_report.levels) {
            let shift = (base.geometric - wound.geometric).abs();
            worst = worst.max(shift);
            assert!(shift <= 1e-8, "geometric phase moved by {shift:.3e} under gauge change");
        }
    }

    println!(
        "acceptance criterion 6 — gauge invariance: PASS \
         (100 trials, worst geometric shift {worst:.2e})"
    );
}

/// Smooth periodic per-level gauge functions a_n sin(2 pi t / tau + b_n) + c_n.
struct GaugeParams {
    amplitude: Vec<f64>,
    phase: Vec<f64>,
    offset: Vec<f64>,
}

impl GaugeParams {
    fn eval(&self, level: usize, t: f64, tau: f64) -> f64 {
        self.amplitude[level] * (2.0 * PI * t / tau + self.phase[level]).sin()
            + self.offset[level]
    }
}

fn random_gauge(rng: &mut ChaCha8Rng, levels: usize) -> GaugeParams {
    GaugeParams {
        amplitude: (0..levels).map(|_| rng.gen_range(-1.0..1.0)).collect(),
        phase: (0..levels).map(|_| rng.gen_range(0.0..2.0 * PI)).collect(),
        offset: (0..levels).map(|_| rng.gen_range(-PI..PI)).collect(),
    }
}

#[test]
fn criterion_7_adiabatic_limit() {
    // omega1 = omega2 = 1, so the adiabaticity ratio is omega / sqrt(2).
    let bare = 2.0f64.sqrt();
    let mut previous = f64::INFINITY;
    let mut gaps = Vec::new();
    for ratio in [1e-1, 1e-2, 1e-3] {
        let drive = SingleQubitDrive::new(ratio * bare, 1.0, 1.0).unwrap();
        let gap = adiabatic_gap(&drive).unwrap();
        assert!(gap <= 2.0 * ratio, "gap {gap:.3e} exceeds bound {:.3e}", 2.0 * ratio);
        assert!(gap < previous, "gap must shrink with the drive frequency");
        previous = gap;
        gaps.push(gap);
    }
    println!(
        "acceptance criterion 7 — adiabatic limit: PASS \
         (gaps {:.2e}, {:.2e}, {:.2e} under bounds 2e-1, 2e-2, 2e-3)",
        gaps[0], gaps[1], gaps[2]
    );
}

#[test]
fn criterion_8_synthesis_round_trip() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut worst_target: f64 = 0.0;
    let mut worst_dynamic: f64 = 0.0;

    for _ in 0..50 {
        let target = rng.gen_range(0.1..PI - 0.1);
        let solution = synthesize_single_qubit_phase(1.0, target).unwrap();
        let DriveParams::Single(drive) = solution.drive else {
            panic!("synthesis must return a single-qubit drive")
        };
        let report = single_qubit_phases(&drive, 1024).unwrap();
        let geometric_error = circle_distance(report.levels[0].geometric, target);
        let dynamic_error = circle_distance(report.levels[0].dynamic, 0.0);
        worst_target = worst_target.max(geometric_error);
        worst_dynamic = worst_dynamic.max(dynamic_error);
        assert!(
            geometric_error <= 1e-6,
            "target {target:.6} missed by {geometric_error:.3e}"
        );
        assert!(dynamic_error <= 1e-6, "dynamic phase {dynamic_error:.3e} at {target:.6}");
    }

    println!(
        "acceptance criterion 8 — synthesis round trip: PASS \
         (50 targets, worst geometric error {worst_target:.2e}, \
         worst dynamic residue {worst_dynamic:.2e})"
    );
}
