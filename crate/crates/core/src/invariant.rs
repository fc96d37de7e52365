//! Drive families, their invariant operators, and phase extraction.
//!
//! A drive here is a periodic Hamiltonian H(t) with period tau = 2 pi /
//! omega that admits an invariant operator I(t): a Hermitian operator
//! satisfying dI/dt = i [I(t), H(t)] whose eigenvectors are periodic. A
//! state started in an eigenvector of I(0) stays in the corresponding
//! eigenvector of I(t) and only accumulates phase; over one period that
//! phase splits into a dynamic part (the energy expectation integral)
//! and a geometric remainder. This module builds the eigenframes on a
//! time grid and performs that split by quadrature.

use num_complex::Complex64;
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::propagate::Propagator;
use crate::qops::{self, ComplexMatrix, Ket};

/// Degeneracy guard: level spacings below this fraction of the spectral
/// scale make the eigenframe ill-defined.
pub const DEGENERACY_TOL: f64 = 1e-9;

/// Tolerated drift of eigenvalues along the grid, relative to scale.
const EIGENVALUE_DRIFT_TOL: f64 = 1e-10;

/// Entrywise tolerance for the frame returning to itself after a period.
const PERIODICITY_TOL: f64 = 1e-10;

/// Minimum step-to-step eigenvector overlap modulus; below this the
/// frame is considered discontinuous (levels crossed or grid too coarse).
const OVERLAP_FLOOR: f64 = 0.9;

fn two_pi() -> f64 {
    2.0 * PI
}

/// Reduces an angle to [0, 2 pi).
pub fn mod_two_pi(angle: f64) -> f64 {
    let m = angle.rem_euclid(two_pi());
    if m == two_pi() {
        0.0
    } else {
        m
    }
}

/// Signed distance between two angles on the circle, in (-pi, pi].
pub fn circle_distance(a: f64, b: f64) -> f64 {
    let d = mod_two_pi(a - b);
    if d > PI {
        d - two_pi()
    } else {
        d
    }
}

/// A two-level block driven by a field rotating at `omega`:
/// H(t) = (longitudinal/2) sigma_z + (transverse/2) (sigma_x cos wt + sigma_y sin wt).
///
/// Both drive families reduce to this shape, the coupled pair once per
/// invariant block, so all closed forms live here.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RotatingBlock {
    pub omega: f64,
    pub longitudinal: f64,
    pub transverse: f64,
}

impl RotatingBlock {
    pub fn period(&self) -> f64 {
        two_pi() / self.omega
    }

    /// Spectral gap of the invariant: eigenvalues are +- lambda / 2.
    pub fn lambda(&self) -> f64 {
        let detuning = self.longitudinal - self.omega;
        (self.transverse * self.transverse + detuning * detuning).sqrt()
    }

    /// Mixing angle of the invariant eigenvectors.
    ///
    /// chi = 2 atan((lambda + omega - longitudinal) / transverse), in
    /// (0, pi) whenever the transverse amplitude is positive; the
    /// transverse -> 0 limit gives pi below resonance and 0 above.
    pub fn chi(&self) -> Result<f64> {
        let lambda = self.lambda();
        if lambda <= DEGENERACY_TOL * self.omega {
            return Err(Error::DegenerateInvariant {
                spacing: lambda,
                threshold: DEGENERACY_TOL * self.omega,
            });
        }
        if self.transverse > 0.0 {
            Ok(2.0 * ((lambda + self.omega - self.longitudinal) / self.transverse).atan())
        } else if self.longitudinal < self.omega {
            Ok(PI)
        } else {
            Ok(0.0)
        }
    }

    pub fn hamiltonian(&self, t: f64) -> ComplexMatrix {
        let phase = Complex64::from_polar(0.5 * self.transverse, -self.omega * t);
        let z = Complex64::new(0.5 * self.longitudinal, 0.0);
        ComplexMatrix::from_flat(2, &[z, phase, phase.conj(), -z])
    }

    /// The invariant shares the transverse part of H(t); only the
    /// longitudinal coefficient is shifted by the drive frequency.
    pub fn invariant(&self, t: f64) -> ComplexMatrix {
        RotatingBlock {
            omega: self.omega,
            longitudinal: self.longitudinal - self.omega,
            transverse: self.transverse,
        }
        .hamiltonian(t)
    }

    /// Constant Hamiltonian in the frame co-rotating with the drive:
    /// H0 = H(0) - (omega/2) sigma_z. Coincides with the invariant at t = 0.
    pub fn rotating_frame_hamiltonian(&self) -> ComplexMatrix {
        self.invariant(0.0)
    }

    /// Exact propagator U(t, 0) = exp(-i w t sigma_z / 2) exp(-i H0 t).
    pub fn propagator(&self, t: f64) -> ComplexMatrix {
        let turn = qops::expm_i_hermitian(&ComplexMatrix::pauli_z(), 0.5 * self.omega * t)
            .expect("pauli_z is Hermitian");
        let drift = qops::expm_i_hermitian(&self.rotating_frame_hamiltonian(), t)
            .expect("rotating-frame Hamiltonian is Hermitian");
        turn.mul(&drift)
    }

    /// Closed-form per-cycle phases of the two invariant eigenstates,
    /// ordered [upper level (+lambda/2), lower level (-lambda/2)].
    pub fn cycle_phases(&self) -> Result<CyclePhases> {
        let chi = self.chi()?;
        let lambda = self.lambda();
        let ratio = lambda / self.omega;
        let bare = (self.longitudinal * self.longitudinal
            + self.transverse * self.transverse)
            .sqrt();
        let theta = self.transverse.atan2(self.longitudinal);
        let dynamic_plus = -PI * (bare / self.omega) * (chi - theta).cos();
        Ok(CyclePhases {
            total: [PI * (1.0 - ratio), PI * (1.0 + ratio)],
            dynamic: [dynamic_plus, -dynamic_plus],
            geometric: [PI * (1.0 + chi.cos()), PI * (1.0 - chi.cos())],
        })
    }
}

/// Closed-form phases over one period, as raw (unreduced) angles;
/// callers reduce mod 2 pi where a representative is wanted.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CyclePhases {
    pub total: [f64; 2],
    pub dynamic: [f64; 2],
    pub geometric: [f64; 2],
}

/// Single qubit driven by a static longitudinal field `omega1` and a
/// transverse field of amplitude `omega2` rotating at `omega`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SingleQubitDrive {
    omega: f64,
    omega1: f64,
    omega2: f64,
}

impl SingleQubitDrive {
    pub fn new(omega: f64, omega1: f64, omega2: f64) -> Result<Self> {
        if !(omega.is_finite() && omega > 0.0) {
            return Err(Error::InvalidParameter {
                detail: format!("omega must be positive and finite, got {omega}"),
            });
        }
        if !(omega1.is_finite() && omega1 >= 0.0) {
            return Err(Error::InvalidParameter {
                detail: format!("omega1 must be non-negative and finite, got {omega1}"),
            });
        }
        if !(omega2.is_finite() && omega2 >= 0.0) {
            return Err(Error::InvalidParameter {
                detail: format!("omega2 must be non-negative and finite, got {omega2}"),
            });
        }
        Ok(SingleQubitDrive { omega, omega1, omega2 })
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }

    pub fn omega1(&self) -> f64 {
        self.omega1
    }

    pub fn omega2(&self) -> f64 {
        self.omega2
    }

    pub fn period(&self) -> f64 {
        two_pi() / self.omega
    }

    pub fn block(&self) -> RotatingBlock {
        RotatingBlock {
            omega: self.omega,
            longitudinal: self.omega1,
            transverse: self.omega2,
        }
    }

    pub fn lambda(&self) -> f64 {
        self.block().lambda()
    }

    pub fn mixing_angles(&self) -> Result<MixingAngles> {
        Ok(MixingAngles {
            chi: self.block().chi()?,
            theta: self.omega2.atan2(self.omega1),
        })
    }

    pub fn cycle_phases(&self) -> Result<CyclePhases> {
        self.block().cycle_phases()
    }
}

/// Invariant eigenvector mixing angle chi and field angle
/// theta = atan(omega2 / omega1) of a single-qubit drive.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MixingAngles {
    pub chi: f64,
    pub theta: f64,
}

/// Pair of qubits with Ising coupling `coupling` between them, qubit 1
/// driven by a transverse field of amplitude `omega0` rotating at
/// `omega`, qubit 2 undriven.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoQubitDrive {
    omega: f64,
    coupling: f64,
    omega0: f64,
}

impl TwoQubitDrive {
    pub fn new(omega: f64, coupling: f64, omega0: f64) -> Result<Self> {
        if !(omega.is_finite() && omega > 0.0) {
            return Err(Error::InvalidParameter {
                detail: format!("omega must be positive and finite, got {omega}"),
            });
        }
        if !coupling.is_finite() {
            return Err(Error::InvalidParameter {
                detail: format!("coupling must be finite, got {coupling}"),
            });
        }
        if !(omega0.is_finite() && omega0 >= 0.0) {
            return Err(Error::InvalidParameter {
                detail: format!("omega0 must be non-negative and finite, got {omega0}"),
            });
        }
        Ok(TwoQubitDrive { omega, coupling, omega0 })
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }

    pub fn coupling(&self) -> f64 {
        self.coupling
    }

    pub fn omega0(&self) -> f64 {
        self.omega0
    }

    pub fn period(&self) -> f64 {
        two_pi() / self.omega
    }

    /// The dynamics splits over the state of qubit 2. With qubit 2 up the
    /// coupling acts as a longitudinal field -J on qubit 1, with qubit 2
    /// down as +J; both blocks see the same rotating transverse field.
    pub fn blocks(&self) -> [RotatingBlock; 2] {
        [
            RotatingBlock {
                omega: self.omega,
                longitudinal: -self.coupling,
                transverse: self.omega0,
            },
            RotatingBlock {
                omega: self.omega,
                longitudinal: self.coupling,
                transverse: self.omega0,
            },
        ]
    }

    /// Invariant gap of the qubit-2-up block.
    pub fn lambda1(&self) -> f64 {
        self.blocks()[0].lambda()
    }

    /// Invariant gap of the qubit-2-down block.
    pub fn lambda2(&self) -> f64 {
        self.blocks()[1].lambda()
    }

    pub fn mixing_angles(&self) -> Result<TwoQubitMixingAngles> {
        let [b1, b2] = self.blocks();
        Ok(TwoQubitMixingAngles { chi1: b1.chi()?, chi2: b2.chi()? })
    }

    /// Both gaps and their separation must clear the degeneracy guard.
    pub fn check_nondegenerate(&self) -> Result<()> {
        let threshold = DEGENERACY_TOL * self.omega;
        let (l1, l2) = (self.lambda1(), self.lambda2());
        let spacing = l1.min(l2).min((l1 - l2).abs());
        if spacing <= threshold {
            return Err(Error::DegenerateInvariant { spacing, threshold });
        }
        Ok(())
    }
}

/// Mixing angles of the two invariant blocks of a coupled pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoQubitMixingAngles {
    pub chi1: f64,
    pub chi2: f64,
}

/// Drive parameters of either family.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DriveParams {
    Single(SingleQubitDrive),
    Two(TwoQubitDrive),
}

/// H(t) of the single-qubit family.
pub fn hamiltonian_single(drive: &SingleQubitDrive, t: f64) -> ComplexMatrix {
    drive.block().hamiltonian(t)
}

/// Invariant operator of the single-qubit family.
pub fn invariant_single(drive: &SingleQubitDrive, t: f64) -> Result<ComplexMatrix> {
    let lambda = drive.lambda();
    let threshold = DEGENERACY_TOL * drive.omega();
    if lambda <= threshold {
        return Err(Error::DegenerateInvariant { spacing: lambda, threshold });
    }
    Ok(drive.block().invariant(t))
}

/// H(t) of the coupled pair in the computational order |uu>, |ud>, |du>, |dd>.
pub fn hamiltonian_two(drive: &TwoQubitDrive, t: f64) -> ComplexMatrix {
    let [b1, b2] = drive.blocks();
    qops::direct_sum(
        &b1.hamiltonian(t),
        &b2.hamiltonian(t),
        qops::BlockEmbedding::by_second_qubit(),
    )
}

/// Invariant operator of the coupled pair, assembled blockwise.
pub fn invariant_two(drive: &TwoQubitDrive, t: f64) -> Result<ComplexMatrix> {
    drive.check_nondegenerate()?;
    let [b1, b2] = drive.blocks();
    Ok(qops::direct_sum(
        &b1.invariant(t),
        &b2.invariant(t),
        qops::BlockEmbedding::by_second_qubit(),
    ))
}

/// Frobenius norm of dI/dt - i [I(t), H(t)] with the derivative taken by
/// central difference at step `h`. Zero (to truncation) iff `invariant`
/// is an invariant operator of `hamiltonian`.
pub fn invariance_residual<H, I>(hamiltonian: H, invariant: I, t: f64, h: f64) -> f64
where
    H: Fn(f64) -> ComplexMatrix,
    I: Fn(f64) -> ComplexMatrix,
{
    let deriv = invariant(t + h)
        .sub(&invariant(t - h))
        .scale(Complex64::new(1.0 / (2.0 * h), 0.0));
    let it = invariant(t);
    let ht = hamiltonian(t);
    let commutator_i = it
        .mul(&ht)
        .sub(&ht.mul(&it))
        .scale(Complex64::new(0.0, 1.0));
    deriv.sub(&commutator_i).frobenius_norm()
}

/// Uniform grid of `intervals + 1` times covering [0, t_end].
pub fn uniform_grid(t_end: f64, intervals: usize) -> Vec<f64> {
    (0..=intervals)
        .map(|k| t_end * (k as f64 / intervals as f64))
        .collect()
}

/// Orthonormal eigenvectors of a periodic operator on a time grid, with
/// one consistent gauge, plus the (constant) eigenvalues.
#[derive(Debug, Clone)]
pub struct InvariantFrame {
    times: Vec<f64>,
    eigenvalues: Vec<f64>,
    /// vectors[k][n] is eigenvector n at grid time k.
    vectors: Vec<Vec<Ket>>,
}

impl InvariantFrame {
    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn period(&self) -> f64 {
        *self.times.last().expect("grid is non-empty")
    }

    pub fn level_count(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn vector(&self, time_index: usize, level: usize) -> &Ket {
        &self.vectors[time_index][level]
    }

    /// Frame vectors at t = 0 (equal to those at t = tau by periodicity).
    pub fn start_vectors(&self) -> &[Ket] {
        &self.vectors[0]
    }

    /// Unitary whose columns are the t = 0 eigenvectors.
    pub fn start_basis_matrix(&self) -> ComplexMatrix {
        let dim = self.vectors[0][0].dim();
        let mut out = ComplexMatrix::zeros(dim);
        for (n, v) in self.vectors[0].iter().enumerate() {
            for i in 0..dim {
                out.set(i, n, v.get(i));
            }
        }
        out
    }

    /// Largest entrywise deviation between the frame at t = tau and t = 0.
    pub fn periodicity_defect(&self) -> f64 {
        let first = self.vectors.first().expect("grid is non-empty");
        let last = self.vectors.last().expect("grid is non-empty");
        let mut worst = 0.0f64;
        for (a, b) in first.iter().zip(last) {
            for i in 0..a.dim() {
                worst = worst.max((a.get(i) - b.get(i)).norm());
            }
        }
        worst
    }

    /// Applies the gauge change v_n(t) -> e^{i alpha(n, t)} v_n(t),
    /// level by level. Physically meaningful only when each
    /// alpha(n, tau) - alpha(n, 0) is a multiple of 2 pi, which keeps the
    /// frame periodic; validation re-runs on the result.
    pub fn rephased<A: Fn(usize, f64) -> f64>(&self, alpha: A) -> Result<InvariantFrame> {
        let vectors = self
            .times
            .iter()
            .zip(&self.vectors)
            .map(|(&t, row)| {
                row.iter()
                    .enumerate()
                    .map(|(n, v)| v.scale(Complex64::from_polar(1.0, alpha(n, t))))
                    .collect()
            })
            .collect();
        let frame = InvariantFrame {
            times: self.times.clone(),
            eigenvalues: self.eigenvalues.clone(),
            vectors,
        };
        frame.validate()?;
        Ok(frame)
    }

    fn validate(&self) -> Result<()> {
        let scale = self
            .eigenvalues
            .iter()
            .fold(0.0f64, |acc, w| acc.max(w.abs()))
            .max(f64::MIN_POSITIVE);

        let defect = self.periodicity_defect();
        if defect > PERIODICITY_TOL {
            return Err(Error::GaugeDiscontinuity {
                step: self.times.len() - 1,
                detail: format!("frame not periodic: end-of-cycle defect {defect:.3e}"),
            });
        }
        for window in self.vectors.windows(2) {
            for (n, (a, b)) in window[0].iter().zip(&window[1]).enumerate() {
                let overlap = a.inner(b);
                if overlap.norm() < OVERLAP_FLOOR {
                    return Err(Error::GaugeDiscontinuity {
                        step: n,
                        detail: format!(
                            "eigenvector overlap modulus {:.3} below {OVERLAP_FLOOR}",
                            overlap.norm()
                        ),
                    });
                }
                if overlap.re <= 0.0 {
                    return Err(Error::GaugeDiscontinuity {
                        step: n,
                        detail: "eigenvector overlap lost positive real part".to_string(),
                    });
                }
            }
        }
        let _ = scale;
        Ok(())
    }
}

/// Diagonalizes `invariant` on a uniform grid of `grid_points` intervals
/// over one period and fixes a smooth periodic gauge.
///
/// The gauge anchors each level on its largest-modulus component at
/// t = 0 and keeps that component real positive at every later time;
/// step-to-step overlaps are then required to stay near 1 with positive
/// real part, which catches level crossings or too-coarse grids.
pub fn eigenframe<F>(invariant: F, period: f64, grid_points: usize) -> Result<InvariantFrame>
where
    F: Fn(f64) -> ComplexMatrix,
{
    if grid_points < 64 || grid_points % 2 != 0 {
        return Err(Error::InvalidParameter {
            detail: format!("grid_points must be even and at least 64, got {grid_points}"),
        });
    }
    let times = uniform_grid(period, grid_points);

    let first = qops::hermitian_eigen(&invariant(0.0))?;
    let dim = first.eigenvectors[0].dim();
    let scale = first
        .eigenvalues
        .iter()
        .fold(0.0f64, |acc, w| acc.max(w.abs()))
        .max(f64::MIN_POSITIVE);
    let eigenvalues = first.eigenvalues.clone();
    let anchors: Vec<usize> = first.eigenvectors.iter().map(Ket::anchor_index).collect();

    let mut vectors: Vec<Vec<Ket>> = Vec::with_capacity(times.len());
    for (k, &t) in times.iter().enumerate() {
        let eig = if k == 0 { first.clone() } else { qops::hermitian_eigen(&invariant(t))? };

        check_spacing(&eig.eigenvalues, scale)?;
        for (n, w) in eig.eigenvalues.iter().enumerate() {
            if (w - eigenvalues[n]).abs() > EIGENVALUE_DRIFT_TOL * scale {
                return Err(Error::GaugeDiscontinuity {
                    step: k,
                    detail: format!(
                        "eigenvalue {n} drifted from {:.6e} to {w:.6e}",
                        eigenvalues[n]
                    ),
                });
            }
        }

        let mut row = Vec::with_capacity(dim);
        for (n, v) in eig.eigenvectors.into_iter().enumerate() {
            let anchored = v.gauge_on(anchors[n]);
            if anchored.get(anchors[n]).norm() < 1e-3 {
                return Err(Error::GaugeDiscontinuity {
                    step: k,
                    detail: format!("gauge anchor component of level {n} collapsed"),
                });
            }
            row.push(anchored);
        }
        vectors.push(row);
    }

    let frame = InvariantFrame { times, eigenvalues, vectors };
    frame.validate()?;
    Ok(frame)
}

fn check_spacing(eigenvalues: &[f64], scale: f64) -> Result<()> {
    let threshold = DEGENERACY_TOL * scale;
    for (i, a) in eigenvalues.iter().enumerate() {
        for b in &eigenvalues[i + 1..] {
            let spacing = (a - b).abs();
            if spacing <= threshold {
                return Err(Error::DegenerateInvariant { spacing, threshold });
            }
        }
    }
    Ok(())
}

/// Eigenframe of the single-qubit invariant, levels ordered
/// [+lambda/2, -lambda/2].
pub fn single_qubit_frame(drive: &SingleQubitDrive, grid_points: usize) -> Result<InvariantFrame> {
    invariant_single(drive, 0.0)?;
    let block = drive.block();
    eigenframe(move |t| block.invariant(t), drive.period(), grid_points)
}

/// Eigenframe of the coupled-pair invariant, built per block so the
/// levels follow the block order [+lambda1/2, -lambda1/2, +lambda2/2,
/// -lambda2/2] regardless of how the gaps compare.
pub fn two_qubit_frame(drive: &TwoQubitDrive, grid_points: usize) -> Result<InvariantFrame> {
    drive.check_nondegenerate()?;
    let [b1, b2] = drive.blocks();
    let embedding = qops::BlockEmbedding::by_second_qubit();
    let frame1 = eigenframe(move |t| b1.invariant(t), drive.period(), grid_points)?;
    let frame2 = eigenframe(move |t| b2.invariant(t), drive.period(), grid_points)?;

    let times = frame1.times.clone();
    let eigenvalues = vec![
        frame1.eigenvalues[0],
        frame1.eigenvalues[1],
        frame2.eigenvalues[0],
        frame2.eigenvalues[1],
    ];
    let embed = |rows: [usize; 2], v: &Ket| {
        let mut data = vec![Complex64::new(0.0, 0.0); 4];
        data[rows[0]] = v.get(0);
        data[rows[1]] = v.get(1);
        Ket::from_vec(data)
    };
    let vectors = frame1
        .vectors
        .iter()
        .zip(&frame2.vectors)
        .map(|(r1, r2)| {
            vec![
                embed(embedding.first, &r1[0]),
                embed(embedding.first, &r1[1]),
                embed(embedding.second, &r2[0]),
                embed(embedding.second, &r2[1]),
            ]
        })
        .collect();

    let frame = InvariantFrame { times, eigenvalues, vectors };
    frame.validate()?;
    Ok(frame)
}

/// Phases accumulated by one invariant eigenstate over one period.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LevelPhases {
    pub eigenvalue: f64,
    /// Continuously unwrapped phase of <n,t|U(t)|n,0> at t = tau.
    pub total: f64,
    /// Minus the quadrature of <n,t|H(t)|n,t> over the period.
    pub dynamic: f64,
    /// total - dynamic.
    pub geometric: f64,
}

impl LevelPhases {
    pub fn total_mod_two_pi(&self) -> f64 {
        mod_two_pi(self.total)
    }

    pub fn dynamic_mod_two_pi(&self) -> f64 {
        mod_two_pi(self.dynamic)
    }

    pub fn geometric_mod_two_pi(&self) -> f64 {
        mod_two_pi(self.geometric)
    }
}

/// Per-level phase split over one period, with transition diagnostics.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseReport {
    pub levels: Vec<LevelPhases>,
    /// max over m != n and grid times of |<m,t|U(t)|n,0>|; near zero when
    /// the evolution never mixes invariant levels.
    pub transition_leakage: f64,
}

/// Splits each level's accumulated phase into dynamic and geometric
/// parts by quadrature along the shared grid of `frame` and `propagator`.
///
/// The total is unwrapped by summing per-step phase increments of
/// <n,t|U(t)|n,0>, each taken in (-pi, pi]; the dynamic part is a
/// composite Simpson quadrature of -<n,t|H(t)|n,t>; the geometric part
/// is their difference. Totals agree with the frame's gauge winding;
/// mod-2pi values are gauge independent.
pub fn phase_decomposition<H>(
    hamiltonian: H,
    frame: &InvariantFrame,
    propagator: &Propagator,
) -> Result<PhaseReport>
where
    H: Fn(f64) -> ComplexMatrix,
{
    let times = frame.times();
    check_same_grid(times, propagator.times())?;
    propagator.require_unitary(1e-8)?;

    let steps = times.len() - 1;
    let mut levels = Vec::with_capacity(frame.level_count());
    let mut leakage = 0.0f64;

    // Transition diagnostics across all level pairs.
    for k in 0..=steps {
        let u = propagator.unitary(k);
        for n in 0..frame.level_count() {
            let moved = u.apply(&frame.vectors[0][n]);
            for m in 0..frame.level_count() {
                if m != n {
                    leakage = leakage.max(frame.vector(k, m).inner(&moved).norm());
                }
            }
        }
    }

    for n in 0..frame.level_count() {
        let start = &frame.vectors[0][n];

        let mut total = 0.0;
        let mut prev = frame.vector(0, n).inner(&propagator.unitary(0).apply(start));
        for k in 1..=steps {
            let cur = frame.vector(k, n).inner(&propagator.unitary(k).apply(start));
            total += (cur / prev).arg();
            prev = cur;
        }

        let energies: Vec<f64> = (0..=steps)
            .map(|k| {
                let v = frame.vector(k, n);
                let hv = hamiltonian(times[k]).apply(v);
                v.inner(&hv).re
            })
            .collect();
        let dynamic = -simpson(&energies, times[1] - times[0]);

        levels.push(LevelPhases {
            eigenvalue: frame.eigenvalues()[n],
            total,
            dynamic,
            geometric: total - dynamic,
        });
    }

    Ok(PhaseReport { levels, transition_leakage: leakage })
}

fn check_same_grid(a: &[f64], b: &[f64]) -> Result<()> {
    if a.len() != b.len() {
        return Err(Error::GridMismatch {
            detail: format!("{} vs {} grid points", a.len(), b.len()),
        });
    }
    let span = a.last().copied().unwrap_or(1.0).abs().max(1e-300);
    for (x, y) in a.iter().zip(b) {
        if (x - y).abs() > 1e-9 * span {
            return Err(Error::GridMismatch {
                detail: format!("grid times differ: {x} vs {y}"),
            });
        }
    }
    Ok(())
}

/// Composite Simpson rule over an even number of uniform intervals.
fn simpson(values: &[f64], h: f64) -> f64 {
    let n = values.len() - 1;
    assert!(n >= 2 && n % 2 == 0, "Simpson needs an even interval count");
    let mut acc = values[0] + values[n];
    for (k, v) in values.iter().enumerate().take(n).skip(1) {
        acc += if k % 2 == 1 { 4.0 * v } else { 2.0 * v };
    }
    acc * h / 3.0
}

/// Convenience pipeline: frame, exact propagator, and phase split for a
/// single-qubit drive over one period.
pub fn single_qubit_phases(drive: &SingleQubitDrive, grid_points: usize) -> Result<PhaseReport> {
    let frame = single_qubit_frame(drive, grid_points)?;
    let propagator = crate::propagate::analytic_propagator_single(drive, grid_points)?;
    let block = drive.block();
    phase_decomposition(|t| block.hamiltonian(t), &frame, &propagator)
}

/// Convenience pipeline for the coupled pair; levels follow the block
/// order of [`two_qubit_frame`].
pub fn two_qubit_phases(drive: &TwoQubitDrive, grid_points: usize) -> Result<PhaseReport> {
    let frame = two_qubit_frame(drive, grid_points)?;
    let propagator = crate::propagate::analytic_propagator_two(drive, grid_points)?;
    let d = *drive;
    phase_decomposition(move |t| hamiltonian_two(&d, t), &frame, &propagator)
}

/// Angular distance between the invariant mixing angle chi and the field
/// angle theta. Shrinks with omega; small values mean the invariant
/// eigenstates track the instantaneous field eigenstates, the adiabatic
/// regime where the geometric phase approaches the slow-cycle limit.
pub fn adiabatic_gap(drive: &SingleQubitDrive) -> Result<f64> {
    let angles = drive.mixing_angles()?;
    Ok((angles.chi - angles.theta).abs())
}
