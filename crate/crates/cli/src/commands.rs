//! Implementations of the CLI subcommands on top of the library
//! pipelines. Each function returns a typed report body; rendering and
//! exit-code policy live in the crate root.

use std::f64::consts::PI;

use geomgate::gatesynth::{
    elimination_constraint_single, solve_elimination_single, synthesize_single_qubit_phase,
    EliminationSolution,
};
use geomgate::invariant::{
    circle_distance, hamiltonian_single, hamiltonian_two, invariance_residual, invariant_single,
    invariant_two, mod_two_pi, single_qubit_frame, single_qubit_phases, two_qubit_frame,
    two_qubit_phases, CyclePhases, DriveParams, PhaseReport, SingleQubitDrive,
};
use geomgate::propagate::{
    analytic_propagator_single, analytic_propagator_two, analytic_unitary_single,
    analytic_unitary_two, cyclic_gate_single, cyclic_gate_two, gate_formula_from_angles,
    numeric_propagator, Propagator,
};
use geomgate::qops::{gate_fidelity, BlockEmbedding, ComplexMatrix};

use crate::report::{
    matrix_entries, ControlledUResult, GateBody, LevelReport, PhasesResult, SolveResult,
    VerifyResult,
};
use crate::{CliError, ControlledUArgs, Family, SolveArgs, SweepArgs};

/// Numeric-vs-exact propagator agreement required by `verify`.
const PROPAGATOR_AGREEMENT_TOL: f64 = 1e-8;
/// Scaled invariance-law residual required by `verify`.
const SCALED_RESIDUAL_TOL: f64 = 1e-7;
/// Quadrature-vs-closed-form phase agreement required by `verify`.
const PHASE_AGREEMENT_TOL: f64 = 1e-6;
/// Unitarity defect allowed at every grid time.
const UNITARITY_TOL: f64 = 1e-10;
/// Cross-block mixing allowed for the coupled pair.
const CROSS_BLOCK_TOL: f64 = 1e-8;
/// Interior times at which the invariance law is sampled.
const RESIDUAL_SAMPLES: usize = 64;
/// Intervals between propagator comparison times (so 65 samples).
const PROPAGATOR_SAMPLES: usize = 64;
/// Central-difference step for the invariance law, as a fraction of the
/// period.
const RESIDUAL_STEP_FACTOR: f64 = 1e-5;

fn max_entry_delta(a: &ComplexMatrix, b: &ComplexMatrix) -> f64 {
    let mut worst = 0.0f64;
    for i in 0..a.dim() {
        for j in 0..a.dim() {
            worst = worst.max((a.get(i, j) - b.get(i, j)).norm());
        }
    }
    worst
}

/// Largest mod-2pi distance between the quadrature phase split and the
/// per-level closed forms.
fn phase_agreement(report: &PhaseReport, closed_per_level: &[(f64, f64, f64)]) -> f64 {
    let mut worst = 0.0f64;
    for (level, measured) in report.levels.iter().enumerate() {
        let (total, dynamic, geometric) = closed_per_level[level];
        for (got, want) in [
            (measured.total_mod_two_pi(), total),
            (measured.dynamic_mod_two_pi(), dynamic),
            (measured.geometric_mod_two_pi(), geometric),
        ] {
            worst = worst.max(circle_distance(got, mod_two_pi(want)));
        }
    }
    worst
}

fn closed_levels_single(closed: &CyclePhases) -> Vec<(f64, f64, f64)> {
    (0..2)
        .map(|i| (closed.total[i], closed.dynamic[i], closed.geometric[i]))
        .collect()
}

fn closed_levels_pair(blocks: &[CyclePhases; 2]) -> Vec<(f64, f64, f64)> {
    (0..4)
        .map(|level| {
            let c = &blocks[level / 2];
            let i = level % 2;
            (c.total[i], c.dynamic[i], c.geometric[i])
        })
        .collect()
}

/// Evenly spaced integrator-grid indices covering [0, steps].
fn sample_indices(steps: usize) -> impl Iterator<Item = usize> {
    (0..=PROPAGATOR_SAMPLES).map(move |k| k * steps / PROPAGATOR_SAMPLES)
}

/// Worst numeric-vs-exact propagator entry difference over the samples.
fn propagator_delta<F>(numeric: &Propagator, exact: F, steps: usize) -> f64
where
    F: Fn(f64) -> ComplexMatrix,
{
    let mut worst = 0.0f64;
    for idx in sample_indices(steps) {
        let t = numeric.times()[idx];
        worst = worst.max(max_entry_delta(numeric.unitary(idx), &exact(t)));
    }
    worst
}

/// Worst invariance-law residual over interior sample times, scaled by
/// the invariant's gap so the figure is dimensionless.
fn residual_sweep<H, I>(hamiltonian: H, invariant: I, period: f64, scale: f64) -> f64
where
    H: Fn(f64) -> ComplexMatrix,
    I: Fn(f64) -> ComplexMatrix,
{
    let h = RESIDUAL_STEP_FACTOR * period;
    let mut worst = 0.0f64;
    for j in 0..RESIDUAL_SAMPLES {
        let t = period * (j as f64 + 0.5) / RESIDUAL_SAMPLES as f64;
        worst = worst.max(invariance_residual(&hamiltonian, &invariant, t, h) / scale);
    }
    worst
}

/// Deterministic self-check: exact propagator against the midpoint
/// integrator, the invariance law, the quadrature phase split against
/// the closed forms, unitarity, and (for the pair) block conservation.
pub fn verify(family: &Family, grid_points: usize, steps: usize) -> Result<VerifyResult, CliError> {
    match family {
        Family::Single(drive) => {
            let drive = *drive;
            drive.mixing_angles()?; // reject degenerate invariants up front
            let tau = drive.period();
            let numeric = numeric_propagator(|t| hamiltonian_single(&drive, t), tau, steps)?;
            let max_delta =
                propagator_delta(&numeric, |t| analytic_unitary_single(&drive, t), steps);
            let analytic = analytic_propagator_single(&drive, grid_points)?;
            let max_defect = numeric.max_unitarity_defect().max(analytic.max_unitarity_defect());
            let max_residual = residual_sweep(
                |t| hamiltonian_single(&drive, t),
                |t| invariant_single(&drive, t).expect("invariant validated above"),
                tau,
                drive.lambda(),
            );
            let report = single_qubit_phases(&drive, grid_points)?;
            let closed = drive.cycle_phases()?;
            let max_phase = phase_agreement(&report, &closed_levels_single(&closed));
            let pass = max_delta <= PROPAGATOR_AGREEMENT_TOL
                && max_residual <= SCALED_RESIDUAL_TOL
                && max_phase <= PHASE_AGREEMENT_TOL
                && max_defect <= UNITARITY_TOL;
            Ok(VerifyResult {
                family: "single-qubit".into(),
                integrator_steps: steps,
                sample_times: PROPAGATOR_SAMPLES + 1,
                max_propagator_delta: max_delta,
                max_scaled_invariance_residual: max_residual,
                max_phase_error: max_phase,
                max_unitarity_defect: max_defect,
                cross_block_leakage: None,
                pass,
            })
        }
        Family::Pair(drive) => {
            let drive = *drive;
            drive.check_nondegenerate()?;
            let tau = drive.period();
            let numeric = numeric_propagator(|t| hamiltonian_two(&drive, t), tau, steps)?;
            let max_delta = propagator_delta(&numeric, |t| analytic_unitary_two(&drive, t), steps);
            let analytic = analytic_propagator_two(&drive, grid_points)?;
            let max_defect = numeric.max_unitarity_defect().max(analytic.max_unitarity_defect());
            let embedding = BlockEmbedding::by_second_qubit();
            let cross = numeric
                .cross_block_leakage(embedding)
                .max(analytic.cross_block_leakage(embedding));
            let max_residual = residual_sweep(
                |t| hamiltonian_two(&drive, t),
                |t| invariant_two(&drive, t).expect("invariant validated above"),
                tau,
                drive.lambda1().max(drive.lambda2()),
            );
            let report = two_qubit_phases(&drive, grid_points)?;
            let blocks = drive.blocks();
            let closed = [blocks[0].cycle_phases()?, blocks[1].cycle_phases()?];
            let max_phase = phase_agreement(&report, &closed_levels_pair(&closed));
            let pass = max_delta <= PROPAGATOR_AGREEMENT_TOL
                && max_residual <= SCALED_RESIDUAL_TOL
                && max_phase <= PHASE_AGREEMENT_TOL
                && max_defect <= UNITARITY_TOL
                && cross <= CROSS_BLOCK_TOL;
            Ok(VerifyResult {
                family: "coupled-pair".into(),
                integrator_steps: steps,
                sample_times: PROPAGATOR_SAMPLES + 1,
                max_propagator_delta: max_delta,
                max_scaled_invariance_residual: max_residual,
                max_phase_error: max_phase,
                max_unitarity_defect: max_defect,
                cross_block_leakage: Some(cross),
                pass,
            })
        }
    }
}

fn level_reports(report: &PhaseReport, closed: &[(f64, f64, f64)]) -> Vec<LevelReport> {
    report
        .levels
        .iter()
        .zip(closed)
        .map(|(lp, &(total, dynamic, geometric))| LevelReport {
            eigenvalue: lp.eigenvalue,
            total: lp.total,
            total_mod_two_pi: lp.total_mod_two_pi(),
            dynamic: lp.dynamic,
            dynamic_mod_two_pi: lp.dynamic_mod_two_pi(),
            geometric: lp.geometric,
            geometric_mod_two_pi: lp.geometric_mod_two_pi(),
            closed_form_total_mod_two_pi: mod_two_pi(total),
            closed_form_dynamic_mod_two_pi: mod_two_pi(dynamic),
            closed_form_geometric_mod_two_pi: mod_two_pi(geometric),
        })
        .collect()
}

/// Quadrature phase split over one period, with the closed forms beside
/// each level for comparison.
pub fn phases(family: &Family, grid_points: usize) -> Result<PhasesResult, CliError> {
    match family {
        Family::Single(drive) => {
            let report = single_qubit_phases(drive, grid_points)?;
            let closed = drive.cycle_phases()?;
            let angles = drive.mixing_angles()?;
            Ok(PhasesResult {
                family: "single-qubit".into(),
                period: drive.period(),
                lambda: Some(drive.lambda()),
                lambda1: None,
                lambda2: None,
                chi: Some(angles.chi),
                chi1: None,
                chi2: None,
                theta: Some(angles.theta),
                transition_leakage: report.transition_leakage,
                levels: level_reports(&report, &closed_levels_single(&closed)),
            })
        }
        Family::Pair(drive) => {
            let report = two_qubit_phases(drive, grid_points)?;
            let blocks = drive.blocks();
            let closed = [blocks[0].cycle_phases()?, blocks[1].cycle_phases()?];
            let angles = drive.mixing_angles()?;
            Ok(PhasesResult {
                family: "coupled-pair".into(),
                period: drive.period(),
                lambda: None,
                lambda1: Some(drive.lambda1()),
                lambda2: Some(drive.lambda2()),
                chi: None,
                chi1: Some(angles.chi1),
                chi2: Some(angles.chi2),
                theta: None,
                transition_leakage: report.transition_leakage,
                levels: level_reports(&report, &closed_levels_pair(&closed)),
            })
        }
    }
}

/// Cyclic gate after `cycles` periods, in both bases; the single-qubit
/// gate is also scored against its closed two-level formula.
pub fn gate(family: &Family, grid_points: usize, cycles: u32) -> Result<GateBody, CliError> {
    match family {
        Family::Single(drive) => {
            let frame = single_qubit_frame(drive, grid_points)?;
            let result = cyclic_gate_single(drive, &frame, cycles)?;
            let angles = drive.mixing_angles()?;
            let gamma = cycles as f64 * PI * (1.0 - drive.lambda() / drive.omega());
            let formula = gate_formula_from_angles(angles.chi, gamma);
            let fidelity = gate_fidelity(&result.computational_basis, &formula)?;
            Ok(GateBody {
                family: "single-qubit".into(),
                cycles,
                eigenphases_mod_two_pi: result.eigenphases(),
                unitarity_defect: result.unitarity_defect,
                offdiagonal_leakage: result.offdiagonal_leakage,
                block_leakage: None,
                formula_fidelity: Some(fidelity),
                computational_basis: matrix_entries(&result.computational_basis),
                invariant_basis: matrix_entries(&result.invariant_basis),
            })
        }
        Family::Pair(drive) => {
            let frame = two_qubit_frame(drive, grid_points)?;
            let result = cyclic_gate_two(drive, &frame, cycles)?;
            Ok(GateBody {
                family: "coupled-pair".into(),
                cycles,
                eigenphases_mod_two_pi: result.eigenphases(),
                unitarity_defect: result.unitarity_defect,
                offdiagonal_leakage: result.offdiagonal_leakage,
                block_leakage: result.block_leakage,
                formula_fidelity: None,
                computational_basis: matrix_entries(&result.computational_basis),
                invariant_basis: matrix_entries(&result.invariant_basis),
            })
        }
    }
}

fn solve_body(
    solution: &EliminationSolution,
    mode: &str,
    gamma_target: Option<f64>,
) -> Result<SolveResult, CliError> {
    let DriveParams::Single(drive) = solution.drive else {
        return Err(CliError::Config(
            "solve produced a coupled-pair drive; use controlled-u for that family".into(),
        ));
    };
    let closed = drive.cycle_phases()?;
    Ok(SolveResult {
        mode: mode.into(),
        omega: drive.omega(),
        omega1: drive.omega1(),
        omega2: drive.omega2(),
        k: solution.k,
        residual: solution.residual,
        gamma_target,
        lambda: drive.lambda(),
        cycle_total: closed.total,
        cycle_total_mod_two_pi: [mod_two_pi(closed.total[0]), mod_two_pi(closed.total[1])],
        cycle_dynamic: closed.dynamic,
        cycle_dynamic_mod_two_pi: [mod_two_pi(closed.dynamic[0]), mod_two_pi(closed.dynamic[1])],
        cycle_geometric: closed.geometric,
        cycle_geometric_mod_two_pi: [
            mod_two_pi(closed.geometric[0]),
            mod_two_pi(closed.geometric[1]),
        ],
    })
}

/// Drive synthesis: either solve the elimination constraint at a given
/// quantization integer, or hit a target geometric phase on the
/// zero-dynamic-phase circle.
pub fn solve(args: &SolveArgs) -> Result<SolveResult, CliError> {
    if let Some(gamma) = args.gamma {
        if args.k != 0 {
            return Err(CliError::Config(
                "phase synthesis works on the K = 0 circle; drop --K".into(),
            ));
        }
        if args.omega1.is_some() {
            return Err(CliError::Config(
                "phase synthesis solves for omega1; drop --omega1".into(),
            ));
        }
        let solution = synthesize_single_qubit_phase(args.omega, gamma)?;
        solve_body(&solution, "synthesis", Some(gamma))
    } else {
        let Some(omega1) = args.omega1 else {
            return Err(CliError::Config(
                "constraint mode needs --omega1 (the longitudinal field, \
                 or the bisection seed when K != 0); or pass --gamma to synthesize"
                    .into(),
            ));
        };
        let solution = solve_elimination_single(args.omega, args.k, omega1)?;
        solve_body(&solution, "constraint", None)
    }
}

/// Builds the verified two-qubit controlled gate.
pub fn controlled_u(args: &ControlledUArgs) -> Result<ControlledUResult, CliError> {
    let spec = geomgate::gatesynth::build_controlled_u(
        args.omega,
        args.coupling,
        args.omega0,
        args.max_cycles,
    )?;
    Ok(ControlledUResult {
        omega: spec.drive.omega(),
        coupling: spec.drive.coupling(),
        omega0: spec.drive.omega0(),
        lambda1: spec.drive.lambda1(),
        lambda2: spec.drive.lambda2(),
        cycles: spec.cycles,
        turns: spec.turns,
        k: spec.k,
        constraint_residual: spec.constraint_residual,
        target_geometric_mod_two_pi: spec.target_geometric,
        achieved_geometric_mod_two_pi: spec.achieved_geometric,
        achieved_geometric_unwrapped: spec.achieved_geometric_unwrapped,
        upper_block_identity_fidelity: spec.upper_block_identity_fidelity,
        lower_block_formula_fidelity: spec.lower_block_formula_fidelity,
        unitarity_defect: spec.gate.unitarity_defect,
        offdiagonal_leakage: spec.gate.offdiagonal_leakage,
        block_leakage: spec.gate.block_leakage.unwrap_or(0.0),
        computational_basis: matrix_entries(&spec.gate.computational_basis),
        invariant_basis: matrix_entries(&spec.gate.invariant_basis),
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Axis {
    Omega,
    Omega1,
    Omega2,
}

impl Axis {
    fn parse(text: &str) -> Result<Axis, CliError> {
        match text {
            "omega" => Ok(Axis::Omega),
            "omega1" => Ok(Axis::Omega1),
            "omega2" => Ok(Axis::Omega2),
            other => Err(CliError::Config(format!(
                "unknown sweep axis {other:?}; expected omega, omega1, or omega2"
            ))),
        }
    }
}

pub const SWEEP_HEADER: &str = "index,omega,omega1,omega2,lambda,chi,theta,\
dynamic_upper,dynamic_lower,geometric_upper,geometric_lower,\
nearest_k,constraint_residual,error";

struct SweepRow {
    lambda: f64,
    chi: f64,
    theta: f64,
    dynamic: [f64; 2],
    geometric: [f64; 2],
    nearest_k: i64,
    residual: f64,
}

fn sweep_row(omega: f64, omega1: f64, omega2: f64) -> Result<SweepRow, geomgate::Error> {
    let drive = SingleQubitDrive::new(omega, omega1, omega2)?;
    let angles = drive.mixing_angles()?;
    let closed = drive.cycle_phases()?;
    let lhs = elimination_constraint_single(&drive);
    let nearest_k = (2.0 * lhs / omega).round();
    let residual = lhs - nearest_k * omega / 2.0;
    Ok(SweepRow {
        lambda: drive.lambda(),
        chi: angles.chi,
        theta: angles.theta,
        dynamic: closed.dynamic,
        geometric: closed.geometric,
        nearest_k: nearest_k as i64,
        residual,
    })
}

/// Derives the transverse amplitude on the zero-dynamic-phase circle.
fn circle_omega2(omega: f64, omega1: f64) -> Result<f64, geomgate::Error> {
    let discriminant = omega * omega1 - omega1 * omega1;
    if discriminant <= 0.0 {
        return Err(geomgate::Error::OutOfDomain {
            detail: format!(
                "omega1 = {omega1} lies outside (0, omega = {omega}): \
                 the zero-dynamic-phase circle has no real transverse amplitude"
            ),
        });
    }
    Ok(discriminant.sqrt())
}

/// Closed-form sweep along one parameter axis, rendered as CSV. Rows
/// that fail keep their input columns and carry the error code in the
/// final column; they never abort the rest of the table.
pub fn sweep(args: &SweepArgs) -> Result<String, CliError> {
    let axis = Axis::parse(&args.axis)?;
    let values = crate::expr::parse_number_list(&args.values).map_err(CliError::Config)?;

    if args.circle && axis == Axis::Omega2 {
        return Err(CliError::Config(
            "--circle derives omega2 from omega and omega1; choose another axis".into(),
        ));
    }
    if axis != Axis::Omega1 && args.omega1.is_none() {
        return Err(CliError::Config(
            "sweep needs --omega1 when it is not the axis".into(),
        ));
    }
    if !args.circle && axis != Axis::Omega2 && args.omega2.is_none() {
        return Err(CliError::Config(
            "sweep needs --omega2, --circle, or axis omega2".into(),
        ));
    }

    let fmt = crate::report::csv_float;
    let mut out = String::from(SWEEP_HEADER);
    out.push('\n');
    for (index, &value) in values.iter().enumerate() {
        let omega = if axis == Axis::Omega { value } else { args.omega };
        let omega1 = if axis == Axis::Omega1 { value } else { args.omega1.unwrap_or(f64::NAN) };
        let omega2 = if args.circle {
            circle_omega2(omega, omega1)
        } else if axis == Axis::Omega2 {
            Ok(value)
        } else {
            Ok(args.omega2.unwrap_or(f64::NAN))
        };

        let outcome = omega2.and_then(|omega2| sweep_row(omega, omega1, omega2).map(|row| (omega2, row)));
        match outcome {
            Ok((omega2, row)) => {
                out.push_str(&format!(
                    "{index},{},{},{},{},{},{},{},{},{},{},{},{},\n",
                    fmt(omega),
                    fmt(omega1),
                    fmt(omega2),
                    fmt(row.lambda),
                    fmt(row.chi),
                    fmt(row.theta),
                    fmt(row.dynamic[0]),
                    fmt(row.dynamic[1]),
                    fmt(row.geometric[0]),
                    fmt(row.geometric[1]),
                    row.nearest_k,
                    fmt(row.residual),
                ));
            }
            Err(e) => {
                let omega2_cell = match (args.circle, axis) {
                    // A failed circle derivation leaves omega2 undefined.
                    (true, _) => String::new(),
                    (false, Axis::Omega2) => fmt(value),
                    (false, _) => args.omega2.map(fmt).unwrap_or_default(),
                };
                out.push_str(&format!(
                    "{index},{},{},{omega2_cell},,,,,,,,,,{}\n",
                    fmt(omega),
                    fmt(omega1),
                    e.code(),
                ));
            }
        }
    }
    Ok(out)
}
