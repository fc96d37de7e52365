//! Parameter solvers that make a driven cycle purely geometric.
//!
//! A cyclic gate is geometric when the dynamic parts of the cycle phases
//! sit at integer multiples of pi, which pins the drive parameters to a
//! one-dimensional constraint surface. This module solves that
//! constraint (closed form on the K = 0 circle, bracketed bisection
//! elsewhere), finds the cycle count that closes the fast block of a
//! coupled pair, and assembles the resulting controlled gate.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::invariant::{
    circle_distance, mod_two_pi, two_qubit_frame, two_qubit_phases, DriveParams,
    SingleQubitDrive, TwoQubitDrive,
};
use crate::propagate::{cyclic_gate_two, gate_formula_from_angles, GateResult};
use crate::qops::{self, BlockEmbedding, ComplexMatrix};

/// Accepted constraint residual, as a fraction of the drive frequency.
pub const CONSTRAINT_RESIDUAL_FACTOR: f64 = 1e-10;

/// Default tolerance on the cycle-commensuration defect |m(1 + r) - 2N|.
pub const DEFAULT_COMMENSURATION_TOL: f64 = 1e-9;

/// Default cap on the cycle count searched by [`find_cycles`].
pub const DEFAULT_MAX_CYCLES: u32 = 64;

/// Grid resolution used internally when a solver simulates a drive.
const SOLVER_GRID_POINTS: usize = 2048;

const BISECTION_MAX_ITERS: usize = 200;
const BISECTION_RESIDUAL_FACTOR: f64 = 1e-12;

/// Shared constraint kernel for one rotating two-level block with
/// longitudinal field `z` and transverse amplitude `xy`:
/// (lambda + omega - z)(z^2 - omega z + xy^2) / (xy^2 + (lambda + omega - z)^2).
fn constraint_lhs(omega: f64, z: f64, xy: f64) -> f64 {
    let detuned = z - omega;
    let lambda = (xy * xy + detuned * detuned).sqrt();
    let shift = lambda + omega - z;
    let quadratic = z * z - omega * z + xy * xy;
    shift * quadratic / (xy * xy + shift * shift)
}

/// Left-hand side of the single-qubit elimination constraint. Equals
/// K omega / 2 exactly when the per-cycle dynamic phases are -+ K pi
/// (it is -gamma_+^d / (2 pi) times omega, an identity checked in tests).
/// Vanishes on the circle omega1^2 + omega2^2 = omega omega1.
pub fn elimination_constraint_single(drive: &SingleQubitDrive) -> f64 {
    constraint_lhs(drive.omega(), drive.omega1(), drive.omega2())
}

/// Elimination constraint of the coupled pair, which acts on the
/// qubit-2-down block: the single-qubit kernel with z = J, xy = omega0.
/// The cycle count enters only the comparison value K omega / (2m), so
/// the left-hand side itself takes no cycle argument; see
/// [`elimination_residual_two`].
pub fn elimination_constraint_two(drive: &TwoQubitDrive) -> f64 {
    constraint_lhs(drive.omega(), drive.coupling(), drive.omega0())
}

/// Residual of the coupled-pair constraint against the quantized value
/// K omega / (2m).
pub fn elimination_residual_two(drive: &TwoQubitDrive, cycles: u32, k: i64) -> f64 {
    elimination_constraint_two(drive) - k as f64 * drive.omega() / (2.0 * cycles as f64)
}

/// A drive satisfying the dynamic-phase-elimination constraint.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EliminationSolution {
    pub drive: DriveParams,
    /// Quantization integer: the per-cycle dynamic phases are -+ k pi.
    pub k: i64,
    /// Cycle count, present only for coupled-pair solutions.
    pub cycles: Option<u32>,
    /// Constraint left-hand side minus its quantized value.
    pub residual: f64,
}

/// Solves the single-qubit constraint for the transverse amplitude.
///
/// K = 0 is closed form: omega2 = sqrt(omega omega1 - omega1^2) with
/// omega1 = `seed_omega1`, the circle where the dynamic phases vanish.
/// For other K the seed fixes omega1 and the transverse amplitude is
/// bracketed and bisected until the residual drops below 1e-12 omega.
pub fn solve_elimination_single(
    omega: f64,
    k: i64,
    seed_omega1: f64,
) -> Result<EliminationSolution> {
    if !(omega.is_finite() && omega > 0.0) {
        return Err(Error::InvalidParameter {
            detail: format!("omega must be positive and finite, got {omega}"),
        });
    }
    if !(seed_omega1.is_finite() && seed_omega1 > 0.0) {
        return Err(Error::InvalidParameter {
            detail: format!("seed omega1 must be positive and finite, got {seed_omega1}"),
        });
    }

    let omega2 = if k == 0 {
        let discriminant = omega * seed_omega1 - seed_omega1 * seed_omega1;
        if discriminant <= 0.0 {
            return Err(Error::OutOfDomain {
                detail: format!(
                    "omega1 = {seed_omega1} lies outside (0, omega): \
                     omega*omega1 - omega1^2 = {discriminant} has no real transverse amplitude"
                ),
            });
        }
        discriminant.sqrt()
    } else {
        solve_transverse_for_k(omega, seed_omega1, k)?
    };

    let drive = SingleQubitDrive::new(omega, seed_omega1, omega2)?;
    let residual = elimination_constraint_single(&drive) - k as f64 * omega / 2.0;
    require_residual(residual, omega)?;
    Ok(EliminationSolution { drive: DriveParams::Single(drive), k, cycles: None, residual })
}

/// Bracket scan plus bisection on omega2 for the K != 0 branch. The
/// left-hand side grows like omega2 / 2 at large amplitude and is
/// bounded below by -omega1 / 2, so any attainable K shows a sign change
/// on a fine enough scan.
fn solve_transverse_for_k(omega: f64, omega1: f64, k: i64) -> Result<f64> {
    let target = k as f64 * omega / 2.0;
    let objective = |xy: f64| constraint_lhs(omega, omega1, xy) - target;

    let cap = 4.0 * omega * (k.unsigned_abs() as f64 + 2.0);
    let scan_points = 8192;
    let mut lo = cap / scan_points as f64;
    let mut f_lo = objective(lo);
    let mut bracket = None;
    for i in 2..=scan_points {
        let hi = cap * i as f64 / scan_points as f64;
        let f_hi = objective(hi);
        if f_lo == 0.0 || f_lo.signum() != f_hi.signum() {
            bracket = Some((lo, f_lo, hi, f_hi));
            break;
        }
        lo = hi;
        f_lo = f_hi;
    }
    let (mut lo, mut f_lo, mut hi, _) = bracket.ok_or(Error::NoRootInBracket {
        lo: cap / scan_points as f64,
        hi: cap,
    })?;

    let tol = BISECTION_RESIDUAL_FACTOR * omega;
    for _ in 0..BISECTION_MAX_ITERS {
        let mid = 0.5 * (lo + hi);
        let f_mid = objective(mid);
        if f_mid.abs() <= tol {
            return Ok(mid);
        }
        if f_mid.signum() == f_lo.signum() {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

fn require_residual(residual: f64, omega: f64) -> Result<()> {
    let tolerance = CONSTRAINT_RESIDUAL_FACTOR * omega;
    if residual.abs() > tolerance {
        return Err(Error::ConstraintViolated { residual, tolerance });
    }
    Ok(())
}

/// A cycle count closing the fast invariant block.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CycleSolution {
    /// Number of drive periods m.
    pub cycles: u32,
    /// Accumulated half-turns N, with m (1 + lambda1/omega) = 2 N.
    pub turns: u32,
    /// Numerator of the rational approximation (2N - m) / m to lambda1/omega.
    pub ratio_numerator: u32,
    /// Denominator of that approximation (the cycle count).
    pub ratio_denominator: u32,
    /// Commensuration defect |m (1 + lambda1/omega) - 2N| as found.
    pub approximation_error: f64,
}

impl CycleSolution {
    /// The rational approximation to lambda1/omega implied by (m, N).
    pub fn ratio_approximation(&self) -> f64 {
        self.ratio_numerator as f64 / self.ratio_denominator as f64
    }
}

/// Smallest cycle count m <= `max_cycles` with m (1 + ratio) within
/// `tol` of an even integer 2N. The fast block then accumulates total
/// phases that are multiples of 2 pi and closes to the identity.
pub fn find_cycles(
    lambda1_over_omega: f64,
    max_cycles: u32,
    tol: f64,
) -> Result<CycleSolution> {
    if !(lambda1_over_omega.is_finite() && lambda1_over_omega > 0.0) {
        return Err(Error::InvalidParameter {
            detail: format!("lambda1/omega must be positive and finite, got {lambda1_over_omega}"),
        });
    }
    if max_cycles < 1 {
        return Err(Error::InvalidParameter { detail: "max_cycles must be at least 1".into() });
    }
    if !(tol.is_finite() && tol >= 0.0) {
        return Err(Error::InvalidParameter {
            detail: format!("tolerance must be non-negative, got {tol}"),
        });
    }

    for m in 1..=max_cycles {
        let accumulated = m as f64 * (1.0 + lambda1_over_omega);
        let turns = (accumulated / 2.0).round();
        let error = (accumulated - 2.0 * turns).abs();
        if error <= tol && turns >= 1.0 {
            let turns = turns as u32;
            return Ok(CycleSolution {
                cycles: m,
                turns,
                ratio_numerator: 2 * turns - m,
                ratio_denominator: m,
                approximation_error: error,
            });
        }
    }
    Err(Error::NoCommensurateCycle { max_cycles, tol })
}

/// Exact commensuration for a rational gap ratio lambda1/omega = p/q:
/// the smallest solution is m = 2q / gcd(p + q, 2q), N = (p + q) / gcd.
pub fn find_cycles_rational(
    numerator: u32,
    denominator: u32,
    max_cycles: u32,
) -> Result<CycleSolution> {
    if numerator == 0 || denominator == 0 {
        return Err(Error::InvalidParameter {
            detail: format!("ratio must be positive, got {numerator}/{denominator}"),
        });
    }
    let reduce = gcd(numerator, denominator);
    let (p, q) = (numerator / reduce, denominator / reduce);
    let g = gcd(p + q, 2 * q);
    let m = 2 * q / g;
    if m > max_cycles {
        return Err(Error::NoCommensurateCycle { max_cycles, tol: 0.0 });
    }
    Ok(CycleSolution {
        cycles: m,
        turns: (p + q) / g,
        ratio_numerator: p,
        ratio_denominator: q,
        approximation_error: 0.0,
    })
}

fn gcd(mut a: u32, mut b: u32) -> u32 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// A verified controlled gate: identity on the qubit-2-up block, a
/// purely geometric two-level unitary on the qubit-2-down block.
#[derive(Debug, Clone)]
pub struct ControlledGateSpec {
    pub drive: TwoQubitDrive,
    /// Drive periods simulated.
    pub cycles: u32,
    /// Half-turns of the fast block, m (1 + lambda1/omega) = 2 turns.
    pub turns: u32,
    /// Dynamic-phase quantization integer of the slow block.
    pub k: i64,
    /// Constraint left-hand side minus k omega / (2m).
    pub constraint_residual: f64,
    /// Slow-block geometric phases m pi (1 -+ lambda2/omega) mod 2 pi,
    /// ordered [upper level, lower level].
    pub target_geometric: [f64; 2],
    /// Geometric phases extracted from the simulated cycle, mod 2 pi.
    pub achieved_geometric: [f64; 2],
    /// The same phases without mod-2 pi reduction (m times the
    /// per-cycle values).
    pub achieved_geometric_unwrapped: [f64; 2],
    /// Fidelity of the qubit-2-up block of the gate to the identity.
    pub upper_block_identity_fidelity: f64,
    /// Fidelity of the qubit-2-down block to the closed-form two-level
    /// gate at (chi2, m pi (1 - lambda2/omega)).
    pub lower_block_formula_fidelity: f64,
    pub gate: GateResult,
}

/// Builds and verifies the controlled gate for a coupled pair.
///
/// The cycle count comes from closing the qubit-2-up block
/// ([`find_cycles`] on lambda1/omega), the quantization integer from
/// rounding the constraint to the nearest k omega / (2m). The drive is
/// then simulated for the full m cycles and the result checked: upper
/// block at the identity, no block mixing, slow-block phases on their
/// closed forms.
pub fn build_controlled_u(
    omega: f64,
    coupling: f64,
    omega0: f64,
    max_cycles: u32,
) -> Result<ControlledGateSpec> {
    let drive = TwoQubitDrive::new(omega, coupling, omega0)?;
    drive.check_nondegenerate()?;

    let commensuration = find_cycles(
        drive.lambda1() / omega,
        max_cycles,
        DEFAULT_COMMENSURATION_TOL,
    )?;
    let m = commensuration.cycles;

    let lhs = elimination_constraint_two(&drive);
    let k = (2.0 * m as f64 * lhs / omega).round() as i64;
    let residual = lhs - k as f64 * omega / (2.0 * m as f64);
    require_residual(residual, omega)?;

    let frame = two_qubit_frame(&drive, SOLVER_GRID_POINTS)?;
    let gate = cyclic_gate_two(&drive, &frame, m)?;

    let embedding = BlockEmbedding::by_second_qubit();
    let upper = qops::extract_block(&gate.computational_basis, embedding.first);
    let upper_fidelity = qops::gate_fidelity(&upper, &ComplexMatrix::identity(2))?;
    let fidelity_tol = 1e-8;
    if upper_fidelity < 1.0 - fidelity_tol {
        return Err(Error::ConstraintViolated {
            residual: 1.0 - upper_fidelity,
            tolerance: fidelity_tol,
        });
    }

    // Slow-block targets and the eigenphases actually accumulated.
    let ratio2 = drive.lambda2() / omega;
    let target_geometric = [
        mod_two_pi(m as f64 * PI * (1.0 - ratio2)),
        mod_two_pi(m as f64 * PI * (1.0 + ratio2)),
    ];
    let eigenphases = gate.eigenphases();
    let phase_tol = 1e-6;
    for level in 0..2 {
        let distance = circle_distance(eigenphases[2 + level], target_geometric[level]);
        if distance > phase_tol {
            return Err(Error::ConstraintViolated { residual: distance, tolerance: phase_tol });
        }
    }

    // Independent phase split over one cycle; m cycles scale it linearly.
    let report = two_qubit_phases(&drive, SOLVER_GRID_POINTS)?;
    let achieved_geometric_unwrapped = [
        m as f64 * report.levels[2].geometric,
        m as f64 * report.levels[3].geometric,
    ];
    let achieved_geometric = [
        mod_two_pi(achieved_geometric_unwrapped[0]),
        mod_two_pi(achieved_geometric_unwrapped[1]),
    ];

    let chi2 = drive.mixing_angles()?.chi2;
    let lower = qops::extract_block(&gate.computational_basis, embedding.second);
    let formula = gate_formula_from_angles(chi2, m as f64 * PI * (1.0 - ratio2));
    let lower_block_formula_fidelity = qops::gate_fidelity(&lower, &formula)?;

    Ok(ControlledGateSpec {
        drive,
        cycles: m,
        turns: commensuration.turns,
        k,
        constraint_residual: residual,
        target_geometric,
        achieved_geometric,
        achieved_geometric_unwrapped,
        upper_block_identity_fidelity: upper_fidelity,
        lower_block_formula_fidelity,
        gate,
    })
}

/// Finds a K = 0 drive whose upper-level geometric phase per cycle is
/// `gamma_target`.
///
/// On the K = 0 circle the dynamic phases vanish and the geometric
/// phase is the whole cycle phase, pi (1 - lambda/omega), so the target
/// fixes lambda/omega = |1 - gamma/pi|. The longitudinal field is found
/// by bisecting the monotone on-circle map omega1 -> lambda =
/// sqrt(omega^2 - omega omega1). Targets are attained on the upper
/// level for gamma < pi; a target above pi lands on the lower level,
/// whose phase is 2 pi minus the upper one.
pub fn synthesize_single_qubit_phase(
    omega: f64,
    gamma_target: f64,
) -> Result<EliminationSolution> {
    if !(omega.is_finite() && omega > 0.0) {
        return Err(Error::InvalidParameter {
            detail: format!("omega must be positive and finite, got {omega}"),
        });
    }
    if !gamma_target.is_finite() {
        return Err(Error::InvalidParameter {
            detail: format!("target phase must be finite, got {gamma_target}"),
        });
    }

    let ratio = (1.0 - gamma_target / PI).abs();
    if ratio <= 1e-9 {
        return Err(Error::UnreachablePhase {
            detail: format!(
                "target {gamma_target} rad needs lambda/omega = {ratio:.3e}: \
                 the invariant gap collapses at pi"
            ),
        });
    }
    if ratio >= 1.0 - 1e-9 {
        return Err(Error::UnreachablePhase {
            detail: format!(
                "target {gamma_target} rad needs lambda/omega = {ratio:.6}, but on the \
                 zero-dynamic-phase circle the gap ratio stays below 1"
            ),
        });
    }

    // lambda(omega1)/omega = sqrt(1 - omega1/omega) falls monotonically
    // from 1 to 0 across omega1 in (0, omega): bisect on omega1.
    let objective = |omega1: f64| (1.0 - omega1 / omega).sqrt() - ratio;
    let (mut lo, mut hi) = (0.0, omega);
    let tol = BISECTION_RESIDUAL_FACTOR;
    let mut omega1 = 0.5 * omega;
    for _ in 0..BISECTION_MAX_ITERS {
        omega1 = 0.5 * (lo + hi);
        let f = objective(omega1);
        if f.abs() <= tol {
            break;
        }
        if f > 0.0 {
            lo = omega1;
        } else {
            hi = omega1;
        }
    }

    solve_elimination_single(omega, 0, omega1)
}
