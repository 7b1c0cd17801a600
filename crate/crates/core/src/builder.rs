use std::collections::BTreeMap;

use crate::encoding::QuditEncoding;
use crate::gates::Gate;
use crate::ir::{validate, Condition, DistCircuit, Instruction, NodeLayout, Op, Rule};
use crate::qubit::BuildError;

/// Accumulates instructions, hands out fresh communication labels and
/// outcome symbols, and validates the result.
pub(crate) struct CircuitBuilder {
    layout: NodeLayout,
    ops: Vec<Instruction>,
    next_comm: BTreeMap<String, usize>,
    next_symbol: usize,
    pub layer: Option<u32>,
}

impl CircuitBuilder {
    pub fn new(layout: &NodeLayout) -> Self {
        CircuitBuilder { layout: layout.clone(), ops: vec![], next_comm: BTreeMap::new(), next_symbol: 0, layer: None }
    }

    pub fn layout(&self) -> &NodeLayout {
        &self.layout
    }

    pub fn node_of(&self, label: &str) -> Result<String, BuildError> {
        self.layout.node_of(label).map(str::to_string).ok_or_else(|| BuildError::Unplaced(label.to_string()))
    }

    /// A label not yet used anywhere in the layout, placed on `node`.
    pub fn comm(&mut self, node: &str, prefix: &str) -> String {
        loop {
            let k = self.next_comm.entry(node.to_string()).or_insert(0);
            *k += 1;
            let label = format!("{node}.{prefix}{k}");
            if self.layout.node_of(&label).is_none() {
                self.layout.place(label.clone(), node);
                return label;
            }
        }
    }

    pub fn push(&mut self, op: Op) {
        self.ops.push(Instruction { op, layer: self.layer });
    }

    pub fn gate(&mut self, gate: Gate, targets: &[&str]) {
        self.push(Op::LocalGate { gate, targets: targets.iter().map(|t| t.to_string()).collect() });
    }

    pub fn cond(&mut self, gate: Gate, targets: &[&str], condition: Condition) {
        self.push(Op::CondGate { gate, targets: targets.iter().map(|t| t.to_string()).collect(), condition });
    }

    pub fn measure(&mut self, target: &str) -> String {
        self.next_symbol += 1;
        let symbol = format!("m{}", self.next_symbol);
        self.push(Op::Measure { target: target.to_string(), symbol: symbol.clone() });
        symbol
    }

    pub fn send(&mut self, symbol: &str, from: &str, to: &[&str], bits: u32) {
        self.push(Op::ClassicalSend {
            symbol: symbol.to_string(),
            from: from.to_string(),
            to: to.iter().map(|t| t.to_string()).collect(),
            bits,
        });
    }

    /// Measures `target` and sends the outcome to `to`.
    pub fn measure_and_send(&mut self, target: &str, to: &[&str], bits: u32) -> Result<String, BuildError> {
        let from = self.node_of(target)?;
        let m = self.measure(target);
        if !to.is_empty() {
            self.send(&m, &from, to, bits);
        }
        Ok(m)
    }

    /// A qubit entangled resource over `nodes`: a Bell pair for two nodes,
    /// a GHZ state for more. Returns one fresh label per node.
    pub fn entangle(&mut self, nodes: &[&str]) -> Vec<String> {
        let targets: Vec<String> = nodes.iter().map(|n| self.comm(n, "a")).collect();
        let parties: Vec<String> = nodes.iter().map(|n| n.to_string()).collect();
        if nodes.len() == 2 {
            self.push(Op::CreateBell { targets: targets.clone(), parties });
        } else {
            self.push(Op::CreateGhz { targets: targets.clone(), parties });
        }
        targets
    }

    /// Bell pair whose halves get the given labels.
    pub fn bell_onto(&mut self, labels: [&str; 2]) -> Result<(), BuildError> {
        let parties = vec![self.node_of(labels[0])?, self.node_of(labels[1])?];
        self.push(Op::CreateBell { targets: labels.iter().map(|l| l.to_string()).collect(), parties });
        Ok(())
    }

    /// Qudit pair or qudit GHZ state of dimension `dim` over `nodes`.
    pub fn entangle_qudits(&mut self, nodes: &[&str], dim: usize) -> Vec<String> {
        let targets: Vec<String> = nodes.iter().map(|n| self.comm(n, "E")).collect();
        let parties: Vec<String> = nodes.iter().map(|n| n.to_string()).collect();
        if nodes.len() == 2 {
            self.push(Op::CreateQuditPair { targets: targets.clone(), parties, dim });
        } else {
            self.push(Op::CreateQuditGhz { targets: targets.clone(), parties, dim });
        }
        targets
    }

    pub fn finish(
        self,
        inputs: Vec<String>,
        input_dims: Vec<usize>,
        encoding: Option<QuditEncoding>,
    ) -> Result<DistCircuit, BuildError> {
        let circuit = DistCircuit {
            layout: self.layout,
            instructions: self.ops,
            outputs: inputs.clone(),
            inputs,
            input_dims,
            encoding,
        };
        let violations = validate(&circuit);
        if let Some(v) = violations.iter().find(|v| v.rule == Rule::CommSlotOverflow) {
            return Err(BuildError::InsufficientCommSlots(v.detail.clone()));
        }
        if !violations.is_empty() {
            return Err(BuildError::Invalid(violations.iter().map(ToString::to_string).collect()));
        }
        Ok(circuit)
    }
}
