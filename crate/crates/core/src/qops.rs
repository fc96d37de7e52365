//! Dense complex linear algebra for two- and four-level systems.
//!
//! Matrices are small and fixed-size (dim 2 or 4), so everything is either
//! closed form or classical iteration: 2x2 exponentials use the Pauli
//! decomposition, 4x4 Hermitian eigensolves use cyclic Jacobi rotations.
//! Exponentials of Hermitian inputs are assembled from eigenpairs and are
//! therefore unitary by construction; there is no scaling-and-squaring.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Relative Frobenius tolerance for treating a matrix as Hermitian.
pub const HERMITICITY_TOL: f64 = 1e-12;

/// Off-diagonal convergence threshold for the Jacobi eigensolver,
/// relative to the Frobenius norm of the input.
const JACOBI_OFF_TOL: f64 = 1e-14;
const JACOBI_MAX_SWEEPS: usize = 50;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Dense row-major complex matrix of dimension 2 or 4.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    dim: usize,
    data: Vec<Complex64>,
}

impl ComplexMatrix {
    pub fn zeros(dim: usize) -> Self {
        assert!(dim == 2 || dim == 4, "supported dimensions are 2 and 4");
        ComplexMatrix { dim, data: vec![ZERO; dim * dim] }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m.set(i, i, ONE);
        }
        m
    }

    /// Builds a matrix from a flat row-major slice of `dim * dim` entries.
    pub fn from_flat(dim: usize, entries: &[Complex64]) -> Self {
        assert!(dim == 2 || dim == 4, "supported dimensions are 2 and 4");
        assert_eq!(entries.len(), dim * dim, "entry count must be dim^2");
        ComplexMatrix { dim, data: entries.to_vec() }
    }

    /// Builds a 2x2 matrix from real entries.
    pub fn from_real_2x2(rows: [[f64; 2]; 2]) -> Self {
        let entries: Vec<Complex64> = rows
            .iter()
            .flatten()
            .map(|&x| Complex64::new(x, 0.0))
            .collect();
        Self::from_flat(2, &entries)
    }

    pub fn pauli_x() -> Self {
        Self::from_flat(2, &[ZERO, ONE, ONE, ZERO])
    }

    pub fn pauli_y() -> Self {
        Self::from_flat(
            2,
            &[ZERO, Complex64::new(0.0, -1.0), Complex64::new(0.0, 1.0), ZERO],
        )
    }

    pub fn pauli_z() -> Self {
        Self::from_flat(2, &[ONE, ZERO, ZERO, -ONE])
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.data[row * self.dim + col]
    }

    pub fn set(&mut self, row: usize, col: usize, value: Complex64) {
        self.data[row * self.dim + col] = value;
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.data
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim, "dimension mismatch");
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a + b)
            .collect();
        ComplexMatrix { dim: self.dim, data }
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim, "dimension mismatch");
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a - b)
            .collect();
        ComplexMatrix { dim: self.dim, data }
    }

    pub fn scale(&self, factor: Complex64) -> Self {
        let data = self.data.iter().map(|a| a * factor).collect();
        ComplexMatrix { dim: self.dim, data }
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim, "dimension mismatch");
        let n = self.dim;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let aik = self.get(i, k);
                if aik == ZERO {
                    continue;
                }
                for j in 0..n {
                    let v = out.get(i, j) + aik * other.get(k, j);
                    out.set(i, j, v);
                }
            }
        }
        out
    }

    /// Matrix power by repeated multiplication; exponents stay small here.
    pub fn pow(&self, exponent: u32) -> Self {
        let mut out = Self::identity(self.dim);
        for _ in 0..exponent {
            out = out.mul(self);
        }
        out
    }

    pub fn adjoint(&self) -> Self {
        let n = self.dim;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                out.set(i, j, self.get(j, i).conj());
            }
        }
        out
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim).map(|i| self.get(i, i)).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs_entry(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Frobenius norm of `M - M^dagger`.
    pub fn hermiticity_defect(&self) -> f64 {
        let n = self.dim;
        let mut sum = 0.0;
        for i in 0..n {
            for j in 0..n {
                let d = self.get(i, j) - self.get(j, i).conj();
                sum += d.norm_sqr();
            }
        }
        sum.sqrt()
    }

    pub fn apply(&self, ket: &Ket) -> Ket {
        assert_eq!(self.dim, ket.dim(), "dimension mismatch");
        let mut out = vec![ZERO; self.dim];
        for (i, slot) in out.iter_mut().enumerate() {
            for j in 0..self.dim {
                *slot += self.get(i, j) * ket.get(j);
            }
        }
        Ket::from_vec(out)
    }

    /// Checks Hermiticity at the crate tolerance and returns the
    /// symmetrized matrix `(M + M^dagger) / 2`.
    fn require_hermitian(&self) -> Result<ComplexMatrix> {
        let defect = self.hermiticity_defect();
        let tolerance = HERMITICITY_TOL * self.frobenius_norm();
        if defect > tolerance {
            return Err(Error::NonHermitianInput { defect, tolerance });
        }
        let mut sym = self.clone();
        for i in 0..self.dim {
            for j in 0..self.dim {
                let v = (self.get(i, j) + self.get(j, i).conj()) * 0.5;
                sym.set(i, j, v);
            }
        }
        Ok(sym)
    }
}

/// Column vector of dimension 2 or 4.
#[derive(Debug, Clone, PartialEq)]
pub struct Ket {
    data: Vec<Complex64>,
}

impl Ket {
    pub fn from_vec(data: Vec<Complex64>) -> Self {
        assert!(data.len() == 2 || data.len() == 4, "supported dimensions are 2 and 4");
        Ket { data }
    }

    pub fn basis_state(dim: usize, index: usize) -> Self {
        let mut data = vec![ZERO; dim];
        data[index] = ONE;
        Ket::from_vec(data)
    }

    pub fn dim(&self) -> usize {
        self.data.len()
    }

    pub fn get(&self, index: usize) -> Complex64 {
        self.data[index]
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.data
    }

    /// Inner product, conjugate-linear in `self`.
    pub fn inner(&self, other: &Ket) -> Complex64 {
        assert_eq!(self.dim(), other.dim(), "dimension mismatch");
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    pub fn norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn scale(&self, factor: Complex64) -> Ket {
        Ket { data: self.data.iter().map(|z| z * factor).collect() }
    }

    pub fn normalized(&self) -> Ket {
        self.scale(Complex64::new(1.0 / self.norm(), 0.0))
    }

    /// Rotates the global phase so the largest-modulus component is real
    /// and positive. Ties pick the lowest index, so the choice is stable.
    pub fn canonical_gauge(&self) -> Ket {
        let anchor = self.anchor_index();
        self.gauge_on(anchor)
    }

    /// Index of the largest-modulus component (lowest index wins ties).
    pub fn anchor_index(&self) -> usize {
        let mut best = 0;
        let mut best_norm = self.data[0].norm_sqr();
        for (i, z) in self.data.iter().enumerate().skip(1) {
            let n = z.norm_sqr();
            if n > best_norm {
                best = i;
                best_norm = n;
            }
        }
        best
    }

    /// Rotates the global phase so component `anchor` is real positive.
    pub fn gauge_on(&self, anchor: usize) -> Ket {
        let z = self.data[anchor];
        let r = z.norm();
        if r == 0.0 {
            return self.clone();
        }
        self.scale(z.conj() / r)
    }
}

/// Eigenpairs of a Hermitian matrix; eigenvalues sorted descending and
/// eigenvectors orthonormal, in matching order.
#[derive(Debug, Clone)]
pub struct EigenDecomposition {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: Vec<Ket>,
}

impl EigenDecomposition {
    /// Rebuilds `V diag(w) V^dagger`; used by residual checks.
    pub fn reconstruct(&self) -> ComplexMatrix {
        let dim = self.eigenvectors[0].dim();
        let mut out = ComplexMatrix::zeros(dim);
        for (w, v) in self.eigenvalues.iter().zip(&self.eigenvectors) {
            for i in 0..dim {
                for j in 0..dim {
                    let add = v.get(i) * v.get(j).conj() * *w;
                    out.set(i, j, out.get(i, j) + add);
                }
            }
        }
        out
    }
}

/// Eigendecomposition of a Hermitian matrix: closed form for 2x2,
/// cyclic Jacobi for 4x4.
pub fn hermitian_eigen(matrix: &ComplexMatrix) -> Result<EigenDecomposition> {
    let m = matrix.require_hermitian()?;
    let decomp = if m.dim() == 2 { eigen_2x2(&m) } else { jacobi_eigen(&m) };
    Ok(decomp)
}

fn eigen_2x2(m: &ComplexMatrix) -> EigenDecomposition {
    let a = m.get(0, 0).re;
    let d = m.get(1, 1).re;
    let b = m.get(0, 1);
    let mean = 0.5 * (a + d);
    let delta = 0.5 * (a - d);
    let r = (delta * delta + b.norm_sqr()).sqrt();

    if r == 0.0 {
        return EigenDecomposition {
            eigenvalues: vec![mean, mean],
            eigenvectors: vec![Ket::basis_state(2, 0), Ket::basis_state(2, 1)],
        };
    }

    let hi = mean + r;
    // Two algebraically equivalent eigenvector forms; pick the better
    // conditioned one (larger norm).
    let cand_a = [b, Complex64::new(hi - a, 0.0)];
    let cand_b = [Complex64::new(hi - d, 0.0), b.conj()];
    let norm_a = cand_a[0].norm_sqr() + cand_a[1].norm_sqr();
    let norm_b = cand_b[0].norm_sqr() + cand_b[1].norm_sqr();
    let raw = if norm_a >= norm_b { cand_a } else { cand_b };
    let v_hi = Ket::from_vec(raw.to_vec()).normalized();
    // Orthogonal complement of (x, y) is (-y*, x*).
    let v_lo = Ket::from_vec(vec![-v_hi.get(1).conj(), v_hi.get(0).conj()]);

    EigenDecomposition {
        eigenvalues: vec![hi, mean - r],
        eigenvectors: vec![v_hi.canonical_gauge(), v_lo.canonical_gauge()],
    }
}

fn off_diagonal_norm(m: &ComplexMatrix) -> f64 {
    let n = m.dim();
    let mut sum = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                sum += m.get(i, j).norm_sqr();
            }
        }
    }
    sum.sqrt()
}

fn jacobi_eigen(input: &ComplexMatrix) -> EigenDecomposition {
    let n = input.dim();
    let mut a = input.clone();
    let mut v = ComplexMatrix::identity(n);
    let scale = input.frobenius_norm().max(f64::MIN_POSITIVE);
    let threshold = JACOBI_OFF_TOL * scale;

    for _ in 0..JACOBI_MAX_SWEEPS {
        if off_diagonal_norm(&a) <= threshold {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a.get(p, q);
                let mag = apq.norm();
                if mag <= threshold / (n as f64) {
                    continue;
                }
                let alpha = a.get(p, p).re;
                let beta = a.get(q, q).re;
                let phase = apq / mag; // e^{i phi}
                let tau = (alpha - beta) / (2.0 * mag);
                let t = if tau >= 0.0 {
                    1.0 / (tau + (1.0 + tau * tau).sqrt())
                } else {
                    -1.0 / (-tau + (1.0 + tau * tau).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                // Unitary pivot: U[p][p]=c, U[p][q]=-conj(sigma), U[q][p]=sigma, U[q][q]=c,
                // with sigma = s e^{-i phi}; this zeroes A[p][q].
                let sigma = phase.conj() * s;

                // A <- U^dagger A U. Columns first (A U), then rows.
                for k in 0..n {
                    let akp = a.get(k, p);
                    let akq = a.get(k, q);
                    a.set(k, p, akp * c + akq * sigma);
                    a.set(k, q, -akp * sigma.conj() + akq * c);
                }
                for k in 0..n {
                    let apk = a.get(p, k);
                    let aqk = a.get(q, k);
                    a.set(p, k, apk * c + aqk * sigma.conj());
                    a.set(q, k, -apk * sigma + aqk * c);
                }
                // V <- V U accumulates eigenvectors as columns.
                for k in 0..n {
                    let vkp = v.get(k, p);
                    let vkq = v.get(k, q);
                    v.set(k, p, vkp * c + vkq * sigma);
                    v.set(k, q, -vkp * sigma.conj() + vkq * c);
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| {
        a.get(j, j).re.partial_cmp(&a.get(i, i).re).expect("finite eigenvalues")
    });

    let eigenvalues: Vec<f64> = order.iter().map(|&i| a.get(i, i).re).collect();
    let eigenvectors: Vec<Ket> = order
        .iter()
        .map(|&col| {
            let data: Vec<Complex64> = (0..n).map(|row| v.get(row, col)).collect();
            Ket::from_vec(data).canonical_gauge()
        })
        .collect();

    EigenDecomposition { eigenvalues, eigenvectors }
}

/// `exp(-i H t)` for Hermitian `H`: Pauli closed form for 2x2,
/// eigendecomposition for 4x4. The result is unitary by construction.
pub fn expm_i_hermitian(hamiltonian: &ComplexMatrix, t: f64) -> Result<ComplexMatrix> {
    let h = hamiltonian.require_hermitian()?;
    if h.dim() == 2 {
        return Ok(expm_2x2(&h, t));
    }
    let eig = hermitian_eigen(&h)?;
    let dim = h.dim();
    let mut out = ComplexMatrix::zeros(dim);
    for (w, vec) in eig.eigenvalues.iter().zip(&eig.eigenvectors) {
        let phase = Complex64::from_polar(1.0, -w * t);
        for i in 0..dim {
            for j in 0..dim {
                let add = vec.get(i) * vec.get(j).conj() * phase;
                out.set(i, j, out.get(i, j) + add);
            }
        }
    }
    Ok(out)
}

fn expm_2x2(h: &ComplexMatrix, t: f64) -> ComplexMatrix {
    // H = c0 I + A with traceless Hermitian A; exp(-iHt) =
    // e^{-i c0 t} (cos(rt) I - i sin(rt) A / r), r = ||A||.
    let c0 = 0.5 * (h.get(0, 0).re + h.get(1, 1).re);
    let az = 0.5 * (h.get(0, 0).re - h.get(1, 1).re);
    let b = h.get(0, 1);
    let r = (az * az + b.norm_sqr()).sqrt();
    let global = Complex64::from_polar(1.0, -c0 * t);

    let mut out = ComplexMatrix::zeros(2);
    let (cos_rt, sinc) = if r > 0.0 {
        ((r * t).cos(), (r * t).sin() / r)
    } else {
        (1.0, 0.0)
    };
    let mi = Complex64::new(0.0, -1.0) * sinc;
    out.set(0, 0, global * (Complex64::new(cos_rt, 0.0) + mi * az));
    out.set(0, 1, global * mi * b);
    out.set(1, 0, global * mi * b.conj());
    out.set(1, 1, global * (Complex64::new(cos_rt, 0.0) - mi * az));
    out
}

/// Assignment of two 2x2 blocks to rows of a 4-dimensional space.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BlockEmbedding {
    pub first: [usize; 2],
    pub second: [usize; 2],
}

impl BlockEmbedding {
    pub fn new(first: [usize; 2], second: [usize; 2]) -> Result<Self> {
        let rows = [first[0], first[1], second[0], second[1]];
        let mut seen = [false; 4];
        for &r in &rows {
            if r >= 4 || seen[r] {
                return Err(Error::BadEmbedding { rows });
            }
            seen[r] = true;
        }
        Ok(BlockEmbedding { first, second })
    }

    /// Blocks labelled by the state of the second qubit in the
    /// computational order |uu>, |ud>, |du>, |dd>: rows {0, 2} keep
    /// qubit 2 up, rows {1, 3} keep it down.
    pub fn by_second_qubit() -> Self {
        BlockEmbedding { first: [0, 2], second: [1, 3] }
    }
}

/// Embeds two 2x2 blocks into a 4x4 matrix; entries outside the blocks
/// are zero.
pub fn direct_sum(a: &ComplexMatrix, b: &ComplexMatrix, embedding: BlockEmbedding) -> ComplexMatrix {
    assert_eq!(a.dim(), 2, "direct_sum expects 2x2 blocks");
    assert_eq!(b.dim(), 2, "direct_sum expects 2x2 blocks");
    let mut out = ComplexMatrix::zeros(4);
    for i in 0..2 {
        for j in 0..2 {
            out.set(embedding.first[i], embedding.first[j], a.get(i, j));
            out.set(embedding.second[i], embedding.second[j], b.get(i, j));
        }
    }
    out
}

/// Extracts the 2x2 sub-matrix on the given row/column pair.
pub fn extract_block(m: &ComplexMatrix, rows: [usize; 2]) -> ComplexMatrix {
    assert_eq!(m.dim(), 4, "extract_block expects a 4x4 matrix");
    let mut out = ComplexMatrix::zeros(2);
    for i in 0..2 {
        for j in 0..2 {
            out.set(i, j, m.get(rows[i], rows[j]));
        }
    }
    out
}

/// Largest entry modulus outside the two diagonal blocks of `embedding`.
pub fn cross_block_leakage(m: &ComplexMatrix, embedding: BlockEmbedding) -> f64 {
    assert_eq!(m.dim(), 4, "cross_block_leakage expects a 4x4 matrix");
    let mut membership = [0u8; 4];
    for &r in &embedding.second {
        membership[r] = 1;
    }
    let mut worst = 0.0f64;
    for i in 0..4 {
        for j in 0..4 {
            if membership[i] != membership[j] {
                worst = worst.max(m.get(i, j).norm());
            }
        }
    }
    worst
}

/// Reindexes rows and columns: entry (i, j) of the result is entry
/// (perm[i], perm[j]) of the input.
pub fn permute_basis(m: &ComplexMatrix, perm: [usize; 4]) -> ComplexMatrix {
    assert_eq!(m.dim(), 4, "permute_basis expects a 4x4 matrix");
    let mut seen = [false; 4];
    for &p in &perm {
        assert!(p < 4 && !seen[p], "perm must be a permutation of 0..4");
        seen[p] = true;
    }
    let mut out = ComplexMatrix::zeros(4);
    for i in 0..4 {
        for j in 0..4 {
            out.set(i, j, m.get(perm[i], perm[j]));
        }
    }
    out
}

/// Reordering that makes the two `by_second_qubit` blocks contiguous:
/// |uu>, |du>, |ud>, |dd>. Used at reporting boundaries.
pub const CONTIGUOUS_BLOCK_ORDER: [usize; 4] = [0, 2, 1, 3];

/// Kronecker product of two 2x2 matrices; the first factor acts on
/// qubit 1 (major index).
pub fn tensor_product(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    assert_eq!(a.dim(), 2, "tensor_product expects 2x2 factors");
    assert_eq!(b.dim(), 2, "tensor_product expects 2x2 factors");
    let mut out = ComplexMatrix::zeros(4);
    for i in 0..2 {
        for j in 0..2 {
            for k in 0..2 {
                for l in 0..2 {
                    out.set(2 * i + k, 2 * j + l, a.get(i, j) * b.get(k, l));
                }
            }
        }
    }
    out
}

/// Frobenius norm of `U^dagger U - I`; zero iff `U` is unitary.
pub fn unitarity_defect(u: &ComplexMatrix) -> f64 {
    let n = u.dim();
    let mut sum = 0.0;
    for i in 0..n {
        for j in 0..n {
            // (U^dagger U)[i][j] = sum_k conj(U[k][i]) U[k][j]
            let mut acc = ZERO;
            for k in 0..n {
                acc += u.get(k, i).conj() * u.get(k, j);
            }
            if i == j {
                acc -= ONE;
            }
            sum += acc.norm_sqr();
        }
    }
    sum.sqrt()
}

/// Global-phase-insensitive overlap |tr(U^dagger V)| / dim of two
/// unitaries of equal dimension. Callers are expected to pass matrices
/// that are unitary to reporting accuracy.
pub fn gate_fidelity(u: &ComplexMatrix, v: &ComplexMatrix) -> Result<f64> {
    if u.dim() != v.dim() {
        return Err(Error::DimensionMismatch { left: u.dim(), right: v.dim() });
    }
    let n = u.dim();
    let mut tr = ZERO;
    for i in 0..n {
        for k in 0..n {
            tr += u.get(k, i).conj() * v.get(k, i);
        }
    }
    Ok((tr.norm() / n as f64).min(1.0))
}
