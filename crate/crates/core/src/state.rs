//! Dense statevectors over subsystems of heterogeneous dimension.
//!
//! Amplitudes are stored big-endian in label order: the first label is the
//! most significant digit, so `|q1 q2⟩|q3 q4⟩` reads left to right.
//! Measurement removes the measured subsystem from the register.

use num_complex::Complex64 as C64;
use thiserror::Error;

use crate::unitary::Unitary;

/// Allowed deviation of `‖amps‖₂` from 1.
pub const NORM_TOL: f64 = 1e-12;
/// Branches whose probability falls below this are treated as impossible.
pub const PRUNE_TOL: f64 = 1e-14;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum StateError {
    #[error("unknown subsystem label `{0}`")]
    UnknownLabel(String),
    #[error("target `{0}` listed more than once")]
    DuplicateTarget(String),
    #[error("label `{0}` already present in register")]
    LabelCollision(String),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("subsystem dimension {0} is below 2")]
    InvalidDim(usize),
    #[error("state is not normalized (norm {0})")]
    NotNormalized(f64),
    #[error("matrix is not unitary (max deviation {0:e})")]
    NotUnitary(f64),
}

/// Named subsystems with dimensions and a normalized amplitude vector.
#[derive(Clone, Debug, PartialEq)]
pub struct MixedRegister {
    labels: Vec<String>,
    dims: Vec<usize>,
    amps: Vec<C64>,
}

/// One measurement branch: the outcome record, its probability, and the
/// normalized post-measurement state.
///
/// `represented` counts how many raw branches this record stands for when
/// equivalent branches were merged during simulation; it is 1 otherwise.
#[derive(Clone, Debug, PartialEq)]
pub struct BranchResult {
    pub outcomes: Vec<(String, usize)>,
    pub probability: f64,
    pub state: MixedRegister,
    pub represented: u64,
}

impl MixedRegister {
    pub fn new<S: Into<String>>(
        labels: impl IntoIterator<Item = S>,
        dims: Vec<usize>,
        amps: Vec<C64>,
    ) -> Result<Self, StateError> {
        let reg = Self::unchecked(labels, dims, amps)?;
        let norm = reg.norm();
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(StateError::NotNormalized(norm));
        }
        Ok(reg)
    }

    /// Like [`MixedRegister::new`] but rescales `amps` to unit norm.
    pub fn normalized<S: Into<String>>(
        labels: impl IntoIterator<Item = S>,
        dims: Vec<usize>,
        mut amps: Vec<C64>,
    ) -> Result<Self, StateError> {
        let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 || !norm.is_finite() {
            return Err(StateError::NotNormalized(norm));
        }
        amps.iter_mut().for_each(|a| *a /= norm);
        Self::new(labels, dims, amps)
    }

    fn unchecked<S: Into<String>>(
        labels: impl IntoIterator<Item = S>,
        dims: Vec<usize>,
        amps: Vec<C64>,
    ) -> Result<Self, StateError> {
        let labels: Vec<String> = labels.into_iter().map(Into::into).collect();
        if labels.len() != dims.len() {
            return Err(StateError::DimensionMismatch(format!(
                "{} labels for {} dimensions",
                labels.len(),
                dims.len()
            )));
        }
        if let Some(&d) = dims.iter().find(|&&d| d < 2) {
            return Err(StateError::InvalidDim(d));
        }
        for (i, l) in labels.iter().enumerate() {
            if labels[..i].contains(l) {
                return Err(StateError::LabelCollision(l.clone()));
            }
        }
        let total: usize = dims.iter().product();
        if amps.len() != total {
            return Err(StateError::DimensionMismatch(format!(
                "{} amplitudes for total dimension {total}",
                amps.len()
            )));
        }
        Ok(MixedRegister { labels, dims, amps })
    }

    /// The register with no subsystems (the scalar 1).
    pub fn empty() -> Self {
        MixedRegister { labels: vec![], dims: vec![], amps: vec![C64::new(1.0, 0.0)] }
    }

    /// Computational basis state; `digits[i]` is the level of subsystem `i`.
    pub fn basis<S: Into<String>>(
        labels: impl IntoIterator<Item = S>,
        dims: Vec<usize>,
        digits: &[usize],
    ) -> Result<Self, StateError> {
        if digits.len() != dims.len() {
            return Err(StateError::DimensionMismatch(format!(
                "{} digits for {} subsystems",
                digits.len(),
                dims.len()
            )));
        }
        let mut index = 0;
        for (&d, &k) in dims.iter().zip(digits) {
            if k >= d {
                return Err(StateError::DimensionMismatch(format!("level {k} out of range for dimension {d}")));
            }
            index = index * d + k;
        }
        let total: usize = dims.iter().product();
        let mut amps = vec![C64::new(0.0, 0.0); total];
        amps[index] = C64::new(1.0, 0.0);
        Self::new(labels, dims, amps)
    }

    /// Qubit register from a bit string such as `"0110"`.
    pub fn qubits_from_bits<S: Into<String>>(
        labels: impl IntoIterator<Item = S>,
        bits: &str,
    ) -> Result<Self, StateError> {
        let digits: Vec<usize> = bits
            .chars()
            .map(|c| c.to_digit(10).map(|d| d as usize))
            .collect::<Option<_>>()
            .ok_or_else(|| StateError::DimensionMismatch(format!("bad bit string `{bits}`")))?;
        Self::basis(labels, vec![2; digits.len()], &digits)
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn amps(&self) -> &[C64] {
        &self.amps
    }

    pub fn total_dim(&self) -> usize {
        self.amps.len()
    }

    pub fn position(&self, label: &str) -> Result<usize, StateError> {
        self.labels
            .iter()
            .position(|l| l == label)
            .ok_or_else(|| StateError::UnknownLabel(label.to_string()))
    }

    pub fn contains(&self, label: &str) -> bool {
        self.labels.iter().any(|l| l == label)
    }

    pub fn dim_of(&self, label: &str) -> Result<usize, StateError> {
        Ok(self.dims[self.position(label)?])
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    /// `⟨self|other⟩`. Dimensions must agree positionally.
    pub fn inner(&self, other: &MixedRegister) -> Result<C64, StateError> {
        if self.dims != other.dims {
            return Err(StateError::DimensionMismatch(format!(
                "dims {:?} vs {:?}",
                self.dims, other.dims
            )));
        }
        Ok(self.amps.iter().zip(&other.amps).map(|(a, b)| a.conj() * b).sum())
    }

    /// Big-endian strides per subsystem.
    fn strides(&self) -> Vec<usize> {
        let mut strides = vec![1; self.dims.len()];
        for i in (0..self.dims.len().saturating_sub(1)).rev() {
            strides[i] = strides[i + 1] * self.dims[i + 1];
        }
        strides
    }

    fn target_positions<S: AsRef<str>>(&self, targets: &[S]) -> Result<Vec<usize>, StateError> {
        let mut positions = Vec::with_capacity(targets.len());
        for t in targets {
            let p = self.position(t.as_ref())?;
            if positions.contains(&p) {
                return Err(StateError::DuplicateTarget(t.as_ref().to_string()));
            }
            positions.push(p);
        }
        Ok(positions)
    }

    /// Applies `gate` to `targets` in place.
    pub fn apply<S: AsRef<str>>(&mut self, gate: &Unitary, targets: &[S]) -> Result<(), StateError> {
        let positions = self.target_positions(targets)?;
        let target_dims: Vec<usize> = positions.iter().map(|&p| self.dims[p]).collect();
        if target_dims != gate.arity() {
            return Err(StateError::DimensionMismatch(format!(
                "gate arity {:?} applied to targets of dimension {:?}",
                gate.arity(),
                target_dims
            )));
        }
        let strides = self.strides();
        let gdim = gate.dim();
        let offsets: Vec<usize> = (0..gdim)
            .map(|g| {
                let mut rem = g;
                let mut off = 0;
                for &p in positions.iter().rev() {
                    off += (rem % self.dims[p]) * strides[p];
                    rem /= self.dims[p];
                }
                off
            })
            .collect();

        let m = gate.matrix();
        let mut buf = vec![C64::new(0.0, 0.0); gdim];
        for base in 0..self.amps.len() {
            if positions.iter().any(|&p| !(base / strides[p]).is_multiple_of(self.dims[p])) {
                continue;
            }
            for (b, &off) in buf.iter_mut().zip(&offsets) {
                *b = self.amps[base + off];
            }
            for (r, &off) in offsets.iter().enumerate() {
                let mut acc = C64::new(0.0, 0.0);
                for (c, b) in buf.iter().enumerate() {
                    let e = m[(r, c)];
                    if e.re != 0.0 || e.im != 0.0 {
                        acc += e * b;
                    }
                }
                self.amps[base + off] = acc;
            }
        }
        Ok(())
    }

    /// Kronecker product; `other`'s subsystems are appended after `self`'s.
    pub fn tensor(&self, other: &MixedRegister) -> Result<MixedRegister, StateError> {
        if let Some(l) = other.labels.iter().find(|l| self.labels.contains(l)) {
            return Err(StateError::LabelCollision(l.clone()));
        }
        let mut amps = Vec::with_capacity(self.amps.len() * other.amps.len());
        for a in &self.amps {
            amps.extend(other.amps.iter().map(|b| a * b));
        }
        let mut labels = self.labels.clone();
        labels.extend(other.labels.iter().cloned());
        let mut dims = self.dims.clone();
        dims.extend_from_slice(&other.dims);
        Ok(MixedRegister { labels, dims, amps })
    }

    /// Projective measurement of `target` in the computational basis.
    ///
    /// Returns one branch per outcome with probability at least
    /// [`PRUNE_TOL`], ordered by outcome. The measured subsystem is removed.
    pub fn measure_enumerate(&self, target: &str) -> Result<Vec<BranchResult>, StateError> {
        let p = self.position(target)?;
        let d = self.dims[p];
        let stride = self.strides()[p];
        let rest = self.amps.len() / d;

        let mut buckets = vec![vec![C64::new(0.0, 0.0); rest]; d];
        for (idx, &a) in self.amps.iter().enumerate() {
            let digit = (idx / stride) % d;
            let high = idx / (stride * d);
            let low = idx % stride;
            buckets[digit][high * stride + low] = a;
        }

        let mut labels = self.labels.clone();
        labels.remove(p);
        let mut dims = self.dims.clone();
        dims.remove(p);

        let mut out = Vec::new();
        for (k, mut amps) in buckets.into_iter().enumerate() {
            let prob: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
            if prob < PRUNE_TOL {
                continue;
            }
            let scale = prob.sqrt();
            amps.iter_mut().for_each(|a| *a /= scale);
            out.push(BranchResult {
                outcomes: vec![(target.to_string(), k)],
                probability: prob,
                state: MixedRegister { labels: labels.clone(), dims: dims.clone(), amps },
                represented: 1,
            });
        }
        Ok(out)
    }

    /// The same state with subsystems reordered to `order`, which must be a
    /// permutation of the current labels.
    pub fn permuted<S: AsRef<str>>(&self, order: &[S]) -> Result<MixedRegister, StateError> {
        if order.len() != self.labels.len() {
            return Err(StateError::DimensionMismatch(format!(
                "reorder to {} labels, register has {}",
                order.len(),
                self.labels.len()
            )));
        }
        let src = self.target_positions(order)?;
        if src.iter().enumerate().all(|(i, &p)| i == p) {
            return Ok(self.clone());
        }
        let new_dims: Vec<usize> = src.iter().map(|&p| self.dims[p]).collect();
        let old_strides = self.strides();
        let n = new_dims.len();
        let mut amps = vec![C64::new(0.0, 0.0); self.amps.len()];
        let mut digits = vec![0usize; n];
        for slot in amps.iter_mut() {
            let old: usize = digits.iter().zip(&src).map(|(&k, &p)| k * old_strides[p]).sum();
            *slot = self.amps[old];
            // increment big-endian counter over new_dims
            for i in (0..n).rev() {
                digits[i] += 1;
                if digits[i] < new_dims[i] {
                    break;
                }
                digits[i] = 0;
            }
        }
        Ok(MixedRegister {
            labels: src.iter().map(|&p| self.labels[p].clone()).collect(),
            dims: new_dims,
            amps,
        })
    }

    /// Replaces labels and dimensions while keeping the amplitude vector.
    /// The total dimension must be unchanged.
    pub fn relabeled<S: Into<String>>(
        &self,
        labels: impl IntoIterator<Item = S>,
        dims: Vec<usize>,
    ) -> Result<MixedRegister, StateError> {
        Self::unchecked(labels, dims, self.amps.clone())
    }

    /// Applies `f` to every amplitude, indexed by its basis digits.
    pub fn map_basis(&self, mut f: impl FnMut(&[usize], C64) -> C64) -> MixedRegister {
        let n = self.dims.len();
        let mut digits = vec![0usize; n];
        let mut out = self.clone();
        for a in out.amps.iter_mut() {
            *a = f(&digits, *a);
            for i in (0..n).rev() {
                digits[i] += 1;
                if digits[i] < self.dims[i] {
                    break;
                }
                digits[i] = 0;
            }
        }
        out
    }
}

/// Returns `state` with `gate` applied to `targets`.
pub fn apply_unitary<S: AsRef<str>>(
    state: &MixedRegister,
    gate: &Unitary,
    targets: &[S],
) -> Result<MixedRegister, StateError> {
    let mut out = state.clone();
    out.apply(gate, targets)?;
    Ok(out)
}

/// `|⟨a|b⟩|²`, which is 1 exactly when the states agree up to a global phase.
pub fn fidelity_up_to_phase(a: &MixedRegister, b: &MixedRegister) -> Result<f64, StateError> {
    Ok(a.inner(b)?.norm_sqr())
}
