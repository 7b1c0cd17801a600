//! Dense unitary matrices over mixed-dimension subsystems.

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;

use crate::state::StateError;

/// Entrywise tolerance for the `U·U† = I` check.
pub const UNITARITY_TOL: f64 = 1e-12;

/// A unitary acting on an ordered list of subsystems.
///
/// `arity` lists the target dimensions in order; the matrix is indexed
/// big-endian over those targets (first target is the most significant digit).
#[derive(Clone, Debug, PartialEq)]
pub struct Unitary {
    arity: Vec<usize>,
    matrix: DMatrix<C64>,
}

impl Unitary {
    /// Checked constructor: square, sized `∏ arity`, unitary within
    /// [`UNITARITY_TOL`].
    pub fn new(arity: Vec<usize>, matrix: DMatrix<C64>) -> Result<Self, StateError> {
        let u = Self::from_parts(arity, matrix)?;
        let dev = u.unitarity_deviation();
        if dev > UNITARITY_TOL {
            return Err(StateError::NotUnitary(dev));
        }
        Ok(u)
    }

    /// Shape-checked constructor that skips the unitarity test. Used for
    /// products of already-checked unitaries, where rounding accumulates.
    pub(crate) fn from_parts(arity: Vec<usize>, matrix: DMatrix<C64>) -> Result<Self, StateError> {
        if let Some(&d) = arity.iter().find(|&&d| d < 2) {
            return Err(StateError::InvalidDim(d));
        }
        let dim: usize = arity.iter().product();
        if matrix.nrows() != dim || matrix.ncols() != dim {
            return Err(StateError::DimensionMismatch(format!(
                "matrix is {}x{} but arity {:?} needs {dim}x{dim}",
                matrix.nrows(),
                matrix.ncols(),
                arity
            )));
        }
        Ok(Unitary { arity, matrix })
    }

    pub fn identity(arity: Vec<usize>) -> Self {
        let dim = arity.iter().product();
        Unitary { arity, matrix: DMatrix::identity(dim, dim) }
    }

    /// Diagonal unitary from its diagonal entries.
    pub fn diagonal(arity: Vec<usize>, diag: &[C64]) -> Result<Self, StateError> {
        let m = DMatrix::from_diagonal(&nalgebra::DVector::from_column_slice(diag));
        Self::new(arity, m)
    }

    /// Permutation unitary sending basis state `j` to `f(j)`.
    pub fn permutation(arity: Vec<usize>, f: impl Fn(usize) -> usize) -> Result<Self, StateError> {
        let dim: usize = arity.iter().product();
        let mut m = DMatrix::zeros(dim, dim);
        for j in 0..dim {
            m[(f(j), j)] = C64::new(1.0, 0.0);
        }
        Self::new(arity, m)
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn arity(&self) -> &[usize] {
        &self.arity
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.matrix
    }

    pub fn adjoint(&self) -> Unitary {
        Unitary { arity: self.arity.clone(), matrix: self.matrix.adjoint() }
    }

    /// Matrix product `self · rhs` (apply `rhs` first).
    pub fn compose(&self, rhs: &Unitary) -> Result<Unitary, StateError> {
        if self.arity != rhs.arity {
            return Err(StateError::DimensionMismatch(format!(
                "cannot compose arity {:?} with {:?}",
                self.arity, rhs.arity
            )));
        }
        Ok(Unitary { arity: self.arity.clone(), matrix: &self.matrix * &rhs.matrix })
    }

    /// Kronecker product; `self` acts on the leading subsystems.
    pub fn kron(&self, rhs: &Unitary) -> Unitary {
        let mut arity = self.arity.clone();
        arity.extend_from_slice(&rhs.arity);
        Unitary { arity, matrix: self.matrix.kronecker(&rhs.matrix) }
    }

    pub fn pow(&self, k: u32) -> Unitary {
        let mut out = Unitary::identity(self.arity.clone());
        for _ in 0..k {
            out.matrix = &self.matrix * &out.matrix;
        }
        out
    }

    pub fn scaled(&self, phase: C64) -> Unitary {
        Unitary { arity: self.arity.clone(), matrix: &self.matrix * phase }
    }

    /// Largest entry of `|U·U† − I|`.
    pub fn unitarity_deviation(&self) -> f64 {
        let prod = &self.matrix * self.matrix.adjoint();
        let id = DMatrix::<C64>::identity(self.dim(), self.dim());
        max_abs(&(prod - id))
    }

    /// Largest entrywise difference to `other`. Shapes must agree.
    pub fn max_deviation(&self, other: &Unitary) -> f64 {
        assert_eq!(self.dim(), other.dim(), "max_deviation needs equal shapes");
        max_abs(&(&self.matrix - &other.matrix))
    }

    /// Largest entrywise difference after removing the best global phase.
    pub fn max_deviation_up_to_phase(&self, other: &Unitary) -> f64 {
        assert_eq!(self.dim(), other.dim(), "max_deviation needs equal shapes");
        let overlap: C64 = other
            .matrix
            .iter()
            .zip(self.matrix.iter())
            .map(|(b, a)| b.conj() * a)
            .sum();
        let phase = if overlap.norm() > 0.0 { overlap / overlap.norm() } else { C64::new(1.0, 0.0) };
        max_abs(&(&self.matrix - &other.matrix * phase))
    }

    /// Spectral norm of the commutator `[self, other]`.
    pub fn commutator_norm(&self, other: &Unitary) -> f64 {
        let c = &self.matrix * &other.matrix - &other.matrix * &self.matrix;
        c.singular_values().iter().cloned().fold(0.0, f64::max)
    }

    pub fn is_diagonal(&self, tol: f64) -> bool {
        let n = self.dim();
        (0..n).all(|r| (0..n).all(|c| r == c || self.matrix[(r, c)].norm() <= tol))
    }
}

pub(crate) fn max_abs(m: &DMatrix<C64>) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}
