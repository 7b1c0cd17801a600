//! Distributed circuit data model.
//!
//! A [`DistCircuit`] is a flat instruction list over subsystems placed on
//! named nodes. Cross-node interaction happens only through entanglement
//! resources, local gates, measurements and classical messages.

mod json;
mod tally;
mod validate;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::encoding::QuditEncoding;
use crate::gates::Gate;

pub use json::CircuitParseError;
pub use tally::{tally, tally_with, ResourceTally};
pub use validate::{validate, Rule, Violation};

/// Nodes, where each subsystem lives, and how many communication
/// subsystems each node can hold at once.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NodeLayout {
    pub nodes: Vec<String>,
    pub placement: BTreeMap<String, String>,
    pub comm_slots: BTreeMap<String, u32>,
}

impl NodeLayout {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_node(&mut self, name: impl Into<String>, comm_slots: u32) -> &mut Self {
        let name = name.into();
        if !self.nodes.contains(&name) {
            self.nodes.push(name.clone());
        }
        self.comm_slots.insert(name, comm_slots);
        self
    }

    pub fn place(&mut self, label: impl Into<String>, node: impl Into<String>) -> &mut Self {
        self.placement.insert(label.into(), node.into());
        self
    }

    pub fn node_of(&self, label: &str) -> Option<&str> {
        self.placement.get(label).map(String::as_str)
    }

    pub fn comm_slots(&self, node: &str) -> u32 {
        self.comm_slots.get(node).copied().unwrap_or(0)
    }

    /// `nodes` nodes named `n1…nD`, labels assigned `per_node` at a time in
    /// the given order.
    pub fn uniform<S: AsRef<str>>(labels: &[S], nodes: usize, per_node: usize, comm_slots: u32) -> Self {
        assert!(per_node > 0 && labels.len() <= nodes * per_node, "not enough room for labels");
        let mut layout = NodeLayout::new();
        for d in 1..=nodes {
            layout.add_node(format!("n{d}"), comm_slots);
        }
        for (i, l) in labels.iter().enumerate() {
            layout.place(l.as_ref(), format!("n{}", i / per_node + 1));
        }
        layout
    }

    /// Labels placed on `node`, in `order`.
    pub fn labels_on<'a, S: AsRef<str>>(&self, node: &str, order: &'a [S]) -> Vec<&'a str> {
        order.iter().map(AsRef::as_ref).filter(|l| self.node_of(l) == Some(node)).collect()
    }
}

/// Classical condition on measurement outcomes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Condition {
    /// Parity of qubit outcome bits.
    Xor(Vec<String>),
    /// Sum of qudit outcomes reduced mod `modulus`.
    SumMod { modulus: usize, terms: Vec<String> },
}

impl Condition {
    pub fn xor<S: Into<String>>(symbols: impl IntoIterator<Item = S>) -> Self {
        Condition::Xor(symbols.into_iter().map(Into::into).collect())
    }

    pub fn sum_mod<S: Into<String>>(modulus: usize, symbols: impl IntoIterator<Item = S>) -> Self {
        Condition::SumMod { modulus, terms: symbols.into_iter().map(Into::into).collect() }
    }

    pub fn symbols(&self) -> &[String] {
        match self {
            Condition::Xor(s) => s,
            Condition::SumMod { terms, .. } => terms,
        }
    }

    /// How many times the conditioned gate is applied. `None` if a symbol
    /// has no value.
    pub fn exponent(&self, value: impl Fn(&str) -> Option<usize>) -> Option<usize> {
        match self {
            Condition::Xor(s) => s.iter().try_fold(0, |acc, m| Some(acc ^ (value(m)? & 1))),
            Condition::SumMod { modulus, terms } => {
                terms.iter().try_fold(0, |acc, m| Some((acc + value(m)?) % modulus))
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum InstructionKind {
    LocalGate,
    CreateBell,
    #[serde(rename = "CreateGHZ")]
    CreateGhz,
    CreateQuditPair,
    #[serde(rename = "CreateQuditGHZ")]
    CreateQuditGhz,
    Measure,
    ClassicalSend,
    CondGate,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Op {
    LocalGate { gate: Gate, targets: Vec<String> },
    /// `(|00⟩ + |11⟩)/√2` on `targets`, one per party.
    CreateBell { targets: Vec<String>, parties: Vec<String> },
    /// `(|0…0⟩ + |1…1⟩)/√2` over three or more parties.
    CreateGhz { targets: Vec<String>, parties: Vec<String> },
    /// `Σₖ |kk⟩/√d`.
    CreateQuditPair { targets: Vec<String>, parties: Vec<String>, dim: usize },
    /// `Σₖ |k…k⟩/√d` over three or more parties.
    CreateQuditGhz { targets: Vec<String>, parties: Vec<String>, dim: usize },
    Measure { target: String, symbol: String },
    ClassicalSend { symbol: String, from: String, to: Vec<String>, bits: u32 },
    CondGate { gate: Gate, targets: Vec<String>, condition: Condition },
}

impl Op {
    pub fn kind(&self) -> InstructionKind {
        match self {
            Op::LocalGate { .. } => InstructionKind::LocalGate,
            Op::CreateBell { .. } => InstructionKind::CreateBell,
            Op::CreateGhz { .. } => InstructionKind::CreateGhz,
            Op::CreateQuditPair { .. } => InstructionKind::CreateQuditPair,
            Op::CreateQuditGhz { .. } => InstructionKind::CreateQuditGhz,
            Op::Measure { .. } => InstructionKind::Measure,
            Op::ClassicalSend { .. } => InstructionKind::ClassicalSend,
            Op::CondGate { .. } => InstructionKind::CondGate,
        }
    }

    /// Subsystem labels touched by the instruction.
    pub fn targets(&self) -> &[String] {
        match self {
            Op::LocalGate { targets, .. }
            | Op::CreateBell { targets, .. }
            | Op::CreateGhz { targets, .. }
            | Op::CreateQuditPair { targets, .. }
            | Op::CreateQuditGhz { targets, .. }
            | Op::CondGate { targets, .. } => targets,
            Op::Measure { target, .. } => std::slice::from_ref(target),
            Op::ClassicalSend { .. } => &[],
        }
    }

    /// For resource creations: `(targets, parties, subsystem dimension)`.
    pub fn resource(&self) -> Option<(&[String], &[String], usize)> {
        match self {
            Op::CreateBell { targets, parties } | Op::CreateGhz { targets, parties } => {
                Some((targets, parties, 2))
            }
            Op::CreateQuditPair { targets, parties, dim } | Op::CreateQuditGhz { targets, parties, dim } => {
                Some((targets, parties, *dim))
            }
            _ => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Instruction {
    pub op: Op,
    /// Concurrency group for the layered time model. Instructions in the
    /// same layer may run concurrently; simulation is always sequential.
    pub layer: Option<u32>,
}

impl From<Op> for Instruction {
    fn from(op: Op) -> Self {
        Instruction { op, layer: None }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct DistCircuit {
    pub layout: NodeLayout,
    pub instructions: Vec<Instruction>,
    /// Computation subsystems expected in the input register.
    pub inputs: Vec<String>,
    /// Dimension of each input subsystem.
    pub input_dims: Vec<usize>,
    /// Computation subsystems live at the end, in result order.
    pub outputs: Vec<String>,
    /// Present when the circuit runs on ququarts that stand for qubit pairs.
    pub encoding: Option<QuditEncoding>,
}

impl DistCircuit {
    /// A circuit with no instructions over qubit `labels`.
    pub fn empty(layout: NodeLayout, labels: Vec<String>) -> Self {
        let n = labels.len();
        DistCircuit {
            layout,
            instructions: vec![],
            inputs: labels.clone(),
            input_dims: vec![2; n],
            outputs: labels,
            encoding: None,
        }
    }

    pub fn resource_count(&self) -> usize {
        self.instructions.iter().filter(|i| i.op.resource().is_some()).count()
    }
}
