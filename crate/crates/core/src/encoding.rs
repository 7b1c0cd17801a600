//! Packing qubit pairs into ququarts via `|q_a q_b⟩ → |2q_a + q_b⟩`.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::state::{MixedRegister, StateError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EncodingError {
    #[error("qubit `{0}` is not covered by the encoding")]
    Unpaired(String),
    #[error("label `{0}` appears more than once in the encoding")]
    Duplicate(String),
    #[error("an odd number of qubits ({0}) cannot be paired")]
    OddQubitCount(usize),
    #[error(transparent)]
    State(#[from] StateError),
}

/// One qubit pair and the ququart that stores it. `high` is the most
/// significant bit of the level.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuditPair {
    pub high: String,
    pub low: String,
    pub qudit: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct QuditEncoding {
    pub pairs: Vec<QuditPair>,
}

impl QuditEncoding {
    pub fn new(pairs: Vec<QuditPair>) -> Result<Self, EncodingError> {
        let mut seen: Vec<&str> = Vec::new();
        for p in &pairs {
            for l in [&p.high, &p.low, &p.qudit] {
                if seen.contains(&l.as_str()) {
                    return Err(EncodingError::Duplicate(l.clone()));
                }
                seen.push(l);
            }
        }
        Ok(QuditEncoding { pairs })
    }

    /// Pairs consecutive labels: `(l0, l1) → names[0]`, `(l2, l3) → names[1]`, …
    pub fn consecutive<S: AsRef<str>>(qubits: &[S], qudit_names: &[S]) -> Result<Self, EncodingError> {
        if !qubits.len().is_multiple_of(2) {
            return Err(EncodingError::OddQubitCount(qubits.len()));
        }
        assert_eq!(qudit_names.len() * 2, qubits.len(), "one qudit name per pair");
        let pairs = qubits
            .chunks(2)
            .zip(qudit_names)
            .map(|(c, q)| QuditPair {
                high: c[0].as_ref().to_string(),
                low: c[1].as_ref().to_string(),
                qudit: q.as_ref().to_string(),
            })
            .collect();
        Self::new(pairs)
    }

    pub fn qudits(&self) -> Vec<String> {
        self.pairs.iter().map(|p| p.qudit.clone()).collect()
    }

    /// Qubit labels in decoded order `[high₀, low₀, high₁, low₁, …]`.
    pub fn qubits(&self) -> Vec<String> {
        self.pairs.iter().flat_map(|p| [p.high.clone(), p.low.clone()]).collect()
    }

    /// Re-expresses a qubit register over the encoding's qudits, ordered as
    /// the pairs are listed. Every subsystem must be a paired qubit.
    pub fn encode(&self, state: &MixedRegister) -> Result<MixedRegister, EncodingError> {
        if !state.labels().len().is_multiple_of(2) {
            return Err(EncodingError::OddQubitCount(state.labels().len()));
        }
        for l in state.labels() {
            if !self.pairs.iter().any(|p| &p.high == l || &p.low == l) {
                return Err(EncodingError::Unpaired(l.clone()));
            }
            if state.dim_of(l)? != 2 {
                return Err(StateError::DimensionMismatch(format!("`{l}` is not a qubit")).into());
            }
        }
        let order = self.qubits();
        if let Some(missing) = order.iter().find(|l| !state.contains(l)) {
            return Err(StateError::UnknownLabel(missing.clone()).into());
        }
        // Big-endian pairs of bits read as one base-4 digit: only the labels change.
        let grouped = state.permuted(&order)?;
        Ok(grouped.relabeled(self.qudits(), vec![4; self.pairs.len()])?)
    }

    /// Inverse of [`QuditEncoding::encode`].
    pub fn decode(&self, state: &MixedRegister) -> Result<MixedRegister, EncodingError> {
        for l in state.labels() {
            if !self.pairs.iter().any(|p| &p.qudit == l) {
                return Err(EncodingError::Unpaired(l.clone()));
            }
            if state.dim_of(l)? != 4 {
                return Err(StateError::DimensionMismatch(format!("`{l}` is not a ququart")).into());
            }
        }
        let grouped = state.permuted(&self.qudits())?;
        Ok(grouped.relabeled(self.qubits(), vec![2; 2 * self.pairs.len()])?)
    }
}
