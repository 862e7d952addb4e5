//! Small dense density-matrix and superoperator helpers.
//!
//! Two-qubit operators use the ordering `|a b⟩ ↦ 2a + b`. A superoperator acts
//! on the row-major vectorisation `vec(ρ)[i·dim + j] = ρ[i][j]`, so `ρ ↦ AρB`
//! is represented by `A ⊗ Bᵀ`.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;

use crate::pauli::{Pauli, Pauli2};

pub type CMatrix = DMatrix<Complex64>;

pub const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub const ONE: Complex64 = Complex64::new(1.0, 0.0);
pub const I: Complex64 = Complex64::new(0.0, 1.0);

pub fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

pub fn pauli_matrix(p: Pauli) -> CMatrix {
    let m = match p {
        Pauli::I => [ONE, ZERO, ZERO, ONE],
        Pauli::X => [ZERO, ONE, ONE, ZERO],
        Pauli::Y => [ZERO, -I, I, ZERO],
        Pauli::Z => [ONE, ZERO, ZERO, -ONE],
    };
    CMatrix::from_row_slice(2, 2, &m)
}

pub fn pauli2_matrix(p: Pauli2) -> CMatrix {
    pauli_matrix(p.a).kronecker(&pauli_matrix(p.b))
}

pub fn diag(entries: &[Complex64]) -> CMatrix {
    CMatrix::from_diagonal(&nalgebra::DVector::from_column_slice(entries))
}

/// Phase gate `S = diag(1, i)`.
pub fn s_gate() -> CMatrix {
    diag(&[ONE, I])
}

pub fn cz() -> CMatrix {
    diag(&[ONE, ONE, ONE, -ONE])
}

pub fn hadamard() -> CMatrix {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    CMatrix::from_row_slice(2, 2, &[c(h), c(h), c(h), c(-h)])
}

pub fn identity(dim: usize) -> CMatrix {
    CMatrix::identity(dim, dim)
}

pub fn ket_to_dm(psi: &[Complex64]) -> CMatrix {
    let v = nalgebra::DVector::from_column_slice(psi);
    &v * v.adjoint()
}

/// Random pure-state mixture: a density matrix of full rank drawn from a
/// Ginibre ensemble.
pub fn random_density_matrix<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> CMatrix {
    let g = CMatrix::from_fn(dim, dim, |_, _| {
        Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)
    });
    let rho = &g * g.adjoint();
    let tr = rho.trace();
    rho / tr
}

pub fn max_abs_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    assert_eq!(a.shape(), b.shape());
    a.iter().zip(b.iter()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

/// Linear map on `dim × dim` operators.
#[derive(Debug, Clone, PartialEq)]
pub struct Superop {
    dim: usize,
    matrix: CMatrix,
}

impl Superop {
    pub fn identity(dim: usize) -> Self {
        Self { dim, matrix: identity(dim * dim) }
    }

    pub fn zero(dim: usize) -> Self {
        Self { dim, matrix: CMatrix::zeros(dim * dim, dim * dim) }
    }

    pub fn from_matrix(dim: usize, matrix: CMatrix) -> Self {
        assert_eq!(matrix.shape(), (dim * dim, dim * dim));
        Self { dim, matrix }
    }

    /// `ρ ↦ U ρ U†`.
    pub fn unitary(u: &CMatrix) -> Self {
        let dim = u.nrows();
        Self { dim, matrix: u.kronecker(&u.map(|z| z.conj())) }
    }

    pub fn kraus(ops: &[CMatrix]) -> Self {
        let dim = ops[0].nrows();
        let mut m = CMatrix::zeros(dim * dim, dim * dim);
        for k in ops {
            m += k.kronecker(&k.map(|z| z.conj()));
        }
        Self { dim, matrix: m }
    }

    /// Elementwise (Schur) multiplier `ρ ↦ K ∘ ρ`.
    pub fn schur(k: &CMatrix) -> Self {
        let dim = k.nrows();
        let mut m = CMatrix::zeros(dim * dim, dim * dim);
        for i in 0..dim {
            for j in 0..dim {
                m[(i * dim + j, i * dim + j)] = k[(i, j)];
            }
        }
        Self { dim, matrix: m }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn apply(&self, rho: &CMatrix) -> CMatrix {
        let d = self.dim;
        let v = nalgebra::DVector::from_iterator(d * d, (0..d * d).map(|k| rho[(k / d, k % d)]));
        let out = &self.matrix * v;
        CMatrix::from_fn(d, d, |i, j| out[i * d + j])
    }

    /// `self` first, then `next`.
    pub fn then(&self, next: &Superop) -> Superop {
        assert_eq!(self.dim, next.dim);
        Superop { dim: self.dim, matrix: &next.matrix * &self.matrix }
    }

    pub fn scale(&self, s: f64) -> Superop {
        Superop { dim: self.dim, matrix: &self.matrix * c(s) }
    }

    pub fn add(&self, other: &Superop) -> Superop {
        Superop { dim: self.dim, matrix: &self.matrix + &other.matrix }
    }

    /// Choi matrix `Σ |i⟩⟨j| ⊗ E(|i⟩⟨j|)`.
    pub fn choi(&self) -> CMatrix {
        let d = self.dim;
        let mut out = CMatrix::zeros(d * d, d * d);
        for i in 0..d {
            for j in 0..d {
                let mut e = CMatrix::zeros(d, d);
                e[(i, j)] = ONE;
                let img = self.apply(&e);
                for k in 0..d {
                    for l in 0..d {
                        out[(i * d + k, j * d + l)] = img[(k, l)];
                    }
                }
            }
        }
        out
    }

    /// Smallest eigenvalue of the (Hermitian part of the) Choi matrix.
    pub fn min_choi_eigenvalue(&self) -> f64 {
        let ch = self.choi();
        let herm = (&ch + ch.adjoint()) * c(0.5);
        herm.symmetric_eigenvalues().iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// Largest deviation of `Tr E(|i⟩⟨j|)` from `δ_ij`.
    pub fn trace_preservation_error(&self) -> f64 {
        let d = self.dim;
        let mut worst: f64 = 0.0;
        for i in 0..d {
            for j in 0..d {
                let mut e = CMatrix::zeros(d, d);
                e[(i, j)] = ONE;
                let tr = self.apply(&e).trace();
                let want = if i == j { ONE } else { ZERO };
                worst = worst.max((tr - want).norm());
            }
        }
        worst
    }

    pub fn max_abs_diff(&self, other: &Superop) -> f64 {
        max_abs_diff(&self.matrix, &other.matrix)
    }
}
