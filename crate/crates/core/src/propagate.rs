//! Time-evolution operators: exact closed forms for the two drive
//! families and an independent numeric integrator to check them.
//!
//! The closed form factors the evolution into a frame rotation and a
//! constant drift, U(t) = exp(-i w t Sz) exp(-i H0 t) per block. The
//! numeric route never sees that structure: it steps the full
//! Hamiltonian with midpoint exponentials,
//! U_{k+1} = exp(-i H(t_k + h/2) h) U_k, which is second order in the
//! step and unitary by construction.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::invariant::{uniform_grid, InvariantFrame, SingleQubitDrive, TwoQubitDrive};
use crate::qops::{self, BlockEmbedding, ComplexMatrix};

/// Hard ceiling on the unitarity defect of any stored propagator snapshot.
pub const PROPAGATOR_DEFECT_TOL: f64 = 1e-10;

/// Largest entry modulus allowed outside the diagonal (or the diagonal
/// blocks) of a cyclic gate.
pub const GATE_LEAKAGE_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PropagationMethod {
    Analytic,
    Numeric,
}

/// Unitaries U(t_k, 0) stored on a uniform time grid; U(0) is the
/// identity exactly.
#[derive(Debug, Clone)]
pub struct Propagator {
    times: Vec<f64>,
    unitaries: Vec<ComplexMatrix>,
    method: PropagationMethod,
    max_defect: f64,
}

impl Propagator {
    fn assemble(
        times: Vec<f64>,
        unitaries: Vec<ComplexMatrix>,
        method: PropagationMethod,
    ) -> Result<Propagator> {
        let max_defect = unitaries
            .iter()
            .map(qops::unitarity_defect)
            .fold(0.0, f64::max);
        if max_defect > PROPAGATOR_DEFECT_TOL {
            return Err(Error::NonUnitaryPropagator {
                defect: max_defect,
                tolerance: PROPAGATOR_DEFECT_TOL,
            });
        }
        Ok(Propagator { times, unitaries, method, max_defect })
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn unitary(&self, index: usize) -> &ComplexMatrix {
        &self.unitaries[index]
    }

    pub fn last_unitary(&self) -> &ComplexMatrix {
        self.unitaries.last().expect("grid is non-empty")
    }

    pub fn dim(&self) -> usize {
        self.unitaries[0].dim()
    }

    pub fn method(&self) -> PropagationMethod {
        self.method
    }

    /// Worst unitarity defect across all stored snapshots.
    pub fn max_unitarity_defect(&self) -> f64 {
        self.max_defect
    }

    pub fn require_unitary(&self, tolerance: f64) -> Result<()> {
        if self.max_defect > tolerance {
            return Err(Error::NonUnitaryPropagator { defect: self.max_defect, tolerance });
        }
        Ok(())
    }

    /// Largest cross-block entry modulus over all snapshots; zero when
    /// the evolution conserves the two blocks.
    pub fn cross_block_leakage(&self, embedding: BlockEmbedding) -> f64 {
        self.unitaries
            .iter()
            .map(|u| qops::cross_block_leakage(u, embedding))
            .fold(0.0, f64::max)
    }
}

/// Exact single-qubit propagator at one instant.
pub fn analytic_unitary_single(drive: &SingleQubitDrive, t: f64) -> ComplexMatrix {
    drive.block().propagator(t)
}

/// Exact coupled-pair propagator at one instant, assembled per block.
pub fn analytic_unitary_two(drive: &TwoQubitDrive, t: f64) -> ComplexMatrix {
    let [b1, b2] = drive.blocks();
    qops::direct_sum(
        &b1.propagator(t),
        &b2.propagator(t),
        BlockEmbedding::by_second_qubit(),
    )
}

/// Exact propagator sampled on a uniform grid over one period.
pub fn analytic_propagator_single(
    drive: &SingleQubitDrive,
    grid_points: usize,
) -> Result<Propagator> {
    check_grid_points(grid_points)?;
    let times = uniform_grid(drive.period(), grid_points);
    let unitaries = times
        .iter()
        .map(|&t| {
            if t == 0.0 {
                ComplexMatrix::identity(2)
            } else {
                analytic_unitary_single(drive, t)
            }
        })
        .collect();
    Propagator::assemble(times, unitaries, PropagationMethod::Analytic)
}

/// Exact coupled-pair propagator sampled on a uniform grid over one period.
pub fn analytic_propagator_two(drive: &TwoQubitDrive, grid_points: usize) -> Result<Propagator> {
    check_grid_points(grid_points)?;
    let times = uniform_grid(drive.period(), grid_points);
    let unitaries = times
        .iter()
        .map(|&t| {
            if t == 0.0 {
                ComplexMatrix::identity(4)
            } else {
                analytic_unitary_two(drive, t)
            }
        })
        .collect();
    Propagator::assemble(times, unitaries, PropagationMethod::Analytic)
}

fn check_grid_points(grid_points: usize) -> Result<()> {
    if grid_points < 64 || grid_points % 2 != 0 {
        return Err(Error::InvalidParameter {
            detail: format!("grid_points must be even and at least 64, got {grid_points}"),
        });
    }
    Ok(())
}

/// Integrates i dU/dt = H(t) U from the identity over [0, duration] with
/// `steps` midpoint-exponential steps, storing every step. Each factor
/// is a Hermitian exponential, so every snapshot is unitary regardless
/// of the step size; accuracy is second order in the step.
pub fn numeric_propagator<H>(hamiltonian: H, duration: f64, steps: usize) -> Result<Propagator>
where
    H: Fn(f64) -> ComplexMatrix,
{
    if steps < 1000 {
        return Err(Error::InvalidParameter {
            detail: format!("numeric propagation needs at least 1000 steps, got {steps}"),
        });
    }
    let h = duration / steps as f64;
    let times = uniform_grid(duration, steps);
    let dim = hamiltonian(0.0).dim();

    let mut unitaries = Vec::with_capacity(steps + 1);
    unitaries.push(ComplexMatrix::identity(dim));
    let mut current = ComplexMatrix::identity(dim);
    for k in 0..steps {
        let midpoint = duration * ((k as f64 + 0.5) / steps as f64);
        let step = qops::expm_i_hermitian(&hamiltonian(midpoint), h)?;
        current = step.mul(&current);
        // Each factor is unitary, but rounding in ~1e5 products drifts
        // the running product off the group at the machine-epsilon rate;
        // periodic re-orthonormalization keeps every snapshot within the
        // stored-defect invariant without touching the O(h^2) accuracy.
        if (k + 1) % REORTHONORMALIZE_INTERVAL == 0 {
            orthonormalize_columns(&mut current);
        }
        unitaries.push(current.clone());
    }
    Propagator::assemble(times, unitaries, PropagationMethod::Numeric)
}

const REORTHONORMALIZE_INTERVAL: usize = 512;

/// Modified Gram-Schmidt on the columns. For a matrix within 1e-10 of
/// unitary this moves entries by at most the same order.
fn orthonormalize_columns(m: &mut ComplexMatrix) {
    let dim = m.dim();
    for j in 0..dim {
        for prior in 0..j {
            let mut overlap = Complex64::new(0.0, 0.0);
            for r in 0..dim {
                overlap += m.get(r, prior).conj() * m.get(r, j);
            }
            for r in 0..dim {
                let projected = m.get(r, j) - overlap * m.get(r, prior);
                m.set(r, j, projected);
            }
        }
        let mut norm_sq = 0.0;
        for r in 0..dim {
            norm_sq += m.get(r, j).norm_sqr();
        }
        let inverse_norm = 1.0 / norm_sq.sqrt();
        for r in 0..dim {
            m.set(r, j, m.get(r, j) * inverse_norm);
        }
    }
}

/// One cycle's gate, expressed in both bases, with structure diagnostics.
#[derive(Debug, Clone)]
pub struct GateResult {
    pub cycles: u32,
    /// U(m tau) in the computational basis.
    pub computational_basis: ComplexMatrix,
    /// V^dagger U(m tau) V with V the t = 0 invariant eigenvectors;
    /// diagonal up to leakage.
    pub invariant_basis: ComplexMatrix,
    pub unitarity_defect: f64,
    /// Largest off-diagonal modulus of `invariant_basis`.
    pub offdiagonal_leakage: f64,
    /// Largest cross-block modulus of `computational_basis` (4x4 only).
    pub block_leakage: Option<f64>,
}

impl GateResult {
    /// Phases of the invariant-basis diagonal, in [0, 2 pi).
    pub fn eigenphases(&self) -> Vec<f64> {
        (0..self.invariant_basis.dim())
            .map(|n| crate::invariant::mod_two_pi(self.invariant_basis.get(n, n).arg()))
            .collect()
    }
}

fn project_gate(
    gate: ComplexMatrix,
    frame: &InvariantFrame,
    cycles: u32,
    block_embedding: Option<BlockEmbedding>,
) -> Result<GateResult> {
    let basis = frame.start_basis_matrix();
    let invariant_basis = basis.adjoint().mul(&gate).mul(&basis);

    let dim = gate.dim();
    let mut offdiag = 0.0f64;
    for i in 0..dim {
        for j in 0..dim {
            if i != j {
                offdiag = offdiag.max(invariant_basis.get(i, j).norm());
            }
        }
    }
    if offdiag > GATE_LEAKAGE_TOL {
        return Err(Error::BlockLeakage { leakage: offdiag, tolerance: GATE_LEAKAGE_TOL });
    }

    let block_leakage = match block_embedding {
        Some(embedding) => {
            let leak = qops::cross_block_leakage(&gate, embedding);
            if leak > GATE_LEAKAGE_TOL {
                return Err(Error::BlockLeakage { leakage: leak, tolerance: GATE_LEAKAGE_TOL });
            }
            Some(leak)
        }
        None => None,
    };

    Ok(GateResult {
        cycles,
        unitarity_defect: qops::unitarity_defect(&gate),
        computational_basis: gate,
        invariant_basis,
        offdiagonal_leakage: offdiag,
        block_leakage,
    })
}

/// Gate after `cycles` periods of a single-qubit drive: the single-cycle
/// unitary raised to the cycle count, projected onto the invariant frame.
pub fn cyclic_gate_single(
    drive: &SingleQubitDrive,
    frame: &InvariantFrame,
    cycles: u32,
) -> Result<GateResult> {
    require_cycles(cycles)?;
    require_frame(frame, 2, drive.period())?;
    let single = analytic_unitary_single(drive, drive.period());
    project_gate(single.pow(cycles), frame, cycles, None)
}

/// Gate after `cycles` periods of a coupled-pair drive.
pub fn cyclic_gate_two(
    drive: &TwoQubitDrive,
    frame: &InvariantFrame,
    cycles: u32,
) -> Result<GateResult> {
    require_cycles(cycles)?;
    require_frame(frame, 4, drive.period())?;
    let single = analytic_unitary_two(drive, drive.period());
    project_gate(
        single.pow(cycles),
        frame,
        cycles,
        Some(BlockEmbedding::by_second_qubit()),
    )
}

fn require_cycles(cycles: u32) -> Result<()> {
    if cycles == 0 {
        return Err(Error::InvalidParameter { detail: "cycle count must be at least 1".into() });
    }
    Ok(())
}

fn require_frame(frame: &InvariantFrame, dim: usize, period: f64) -> Result<()> {
    if frame.level_count() != dim {
        return Err(Error::DimensionMismatch { left: frame.level_count(), right: dim });
    }
    if (frame.period() - period).abs() > 1e-9 * period {
        return Err(Error::GridMismatch {
            detail: format!("frame period {} vs drive period {period}", frame.period()),
        });
    }
    Ok(())
}

/// Two-level cyclic gate as an explicit function of the mixing angle and
/// the per-gate phase gamma:
/// [[e^{i g} c^2 + e^{-i g} s^2, i sin(chi) sin(g)],
///  [i sin(chi) sin(g), e^{i g} s^2 + e^{-i g} c^2]]
/// with c = cos(chi/2), s = sin(chi/2).
pub fn gate_formula_from_angles(chi: f64, gamma: f64) -> ComplexMatrix {
    let c2 = (0.5 * chi).cos().powi(2);
    let s2 = (0.5 * chi).sin().powi(2);
    let plus = Complex64::from_polar(1.0, gamma);
    let minus = Complex64::from_polar(1.0, -gamma);
    let off = Complex64::new(0.0, chi.sin() * gamma.sin());
    ComplexMatrix::from_flat(
        2,
        &[plus * c2 + minus * s2, off, off, plus * s2 + minus * c2],
    )
}

/// Closed-form single-cycle gate of a single-qubit drive in the
/// computational basis, with gamma = pi (1 - lambda / omega).
pub fn computational_gate_formula(drive: &SingleQubitDrive) -> Result<ComplexMatrix> {
    let angles = drive.mixing_angles()?;
    let gamma = std::f64::consts::PI * (1.0 - drive.lambda() / drive.omega());
    Ok(gate_formula_from_angles(angles.chi, gamma))
}
