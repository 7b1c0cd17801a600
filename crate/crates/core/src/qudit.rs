//! Ququart protocols: distributed CSUM₄ and (CZ₄)ᵖ, the single-control
//! multitarget form, and GCZ over qubit pairs packed into ququarts.

use crate::builder::CircuitBuilder;
use crate::encoding::QuditEncoding;
use crate::gates::{Gate, PlacedGate};
use crate::ir::{Condition, DistCircuit, NodeLayout};
use crate::qubit::{BuildError, Partition};

const D: usize = 4;

/// What each receiving node does with its communication qudit `E`, which
/// holds the control value after the shift correction.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ReceiverOp {
    /// `CSUM₄` from `E` to the target.
    Csum,
    /// `(CZ₄)ᵖ` between `E` and the target, as `H₄`-conjugated `CSUM₄ᵖ`.
    Cz4Pow(u32),
}

/// `(P₃⊗P₃)(X₂₃⊗X₂₃)(CZ₄)²(X₂₃⊗X₂₃)` on positions 0, 1, first gate first.
/// On two ququarts encoding four qubits it applies the four-qubit GCZ phase.
pub fn qudit_gcz_local_pair() -> Vec<PlacedGate> {
    vec![
        (Gate::X23, vec![0]),
        (Gate::X23, vec![1]),
        (Gate::Cz4, vec![0, 1]),
        (Gate::Cz4, vec![0, 1]),
        (Gate::X23, vec![0]),
        (Gate::X23, vec![1]),
        (Gate::P3, vec![0]),
        (Gate::P3, vec![1]),
    ]
}

fn receive(b: &mut CircuitBuilder, e: &str, target: &str, op: ReceiverOp) {
    match op {
        ReceiverOp::Csum => b.gate(Gate::Csum4, &[e, target]),
        ReceiverOp::Cz4Pow(p) => {
            b.gate(Gate::H4Dag, &[target]);
            for _ in 0..p {
                b.gate(Gate::Csum4, &[e, target]);
            }
            b.gate(Gate::H4, &[target]);
        }
    }
}

/// Appends the single-control protocol from `control` to `targets`, each on
/// its own node. One target uses a qudit pair, more use a qudit GHZ state.
fn qudit_fanout_into(b: &mut CircuitBuilder, control: &str, targets: &[&str], op: ReceiverOp) -> Result<(), BuildError> {
    if targets.is_empty() {
        return Err(BuildError::EmptyTargets);
    }
    if let ReceiverOp::Cz4Pow(p) = op {
        if !(1..=2).contains(&p) {
            return Err(BuildError::InvalidPower(p));
        }
    }
    let home = b.node_of(control)?;
    let mut nodes = vec![home.clone()];
    for t in targets {
        let n = b.node_of(t)?;
        if let Some(i) = nodes.iter().position(|x| *x == n) {
            let other = if i == 0 { control.to_string() } else { targets[i - 1].to_string() };
            return Err(BuildError::CoLocated(other, t.to_string()));
        }
        nodes.push(n);
    }
    let node_refs: Vec<&str> = nodes.iter().map(String::as_str).collect();
    let comm = b.entangle_qudits(&node_refs, D);

    b.gate(Gate::Csum4Dag, &[control, &comm[0]]);
    b.gate(Gate::K4, &[&comm[0]]);
    let m0 = b.measure_and_send(&comm[0], &node_refs[1..], 2)?;
    let mut returned = Vec::new();
    for (t, e) in targets.iter().zip(&comm[1..]) {
        b.cond(Gate::X4, &[e], Condition::sum_mod(D, [m0.as_str()]));
        receive(b, e, t, op);
        b.gate(Gate::H4, &[e]);
        returned.push(b.measure_and_send(e, &[home.as_str()], 2)?);
    }
    b.cond(Gate::Z4Dag, &[control], Condition::sum_mod(D, returned));
    Ok(())
}

fn two_qudit(q1: &str, q2: &str, layout: &NodeLayout, op: ReceiverOp) -> Result<DistCircuit, BuildError> {
    let mut b = CircuitBuilder::new(layout);
    if b.node_of(q1)? == b.node_of(q2)? {
        return Err(BuildError::CoLocated(q1.into(), q2.into()));
    }
    qudit_fanout_into(&mut b, q1, &[q2], op)?;
    b.finish(vec![q1.into(), q2.into()], vec![D; 2], None)
}

/// `CSUM₄` from `q1` to `q2` with one qudit pair.
pub fn build_dcsum4(q1: &str, q2: &str, layout: &NodeLayout) -> Result<DistCircuit, BuildError> {
    two_qudit(q1, q2, layout, ReceiverOp::Csum)
}

/// `CZ₄` (power 1) or `(CZ₄)²` (power 2) between `q1` and `q2` with one
/// qudit pair.
pub fn build_dcz4_pow(q1: &str, q2: &str, power: u32, layout: &NodeLayout) -> Result<DistCircuit, BuildError> {
    if !(1..=2).contains(&power) {
        return Err(BuildError::InvalidPower(power));
    }
    two_qudit(q1, q2, layout, ReceiverOp::Cz4Pow(power))
}

/// Single control, several targets on distinct nodes, one qudit GHZ state.
pub fn build_dcsum4_multitarget(
    control: &str,
    targets: &[&str],
    layout: &NodeLayout,
    receiver: ReceiverOp,
) -> Result<DistCircuit, BuildError> {
    let mut b = CircuitBuilder::new(layout);
    qudit_fanout_into(&mut b, control, targets, receiver)?;
    let mut labels = vec![control.to_string()];
    labels.extend(targets.iter().map(|t| t.to_string()));
    let n = labels.len();
    b.finish(labels, vec![D; n], None)
}

/// GCZ over `n_qubits` qubits packed pairwise into ququarts, one ququart
/// per node, nodes ordered as the encoding lists its pairs.
///
/// Each ququart gets `P₃` for its internal pair. Then for each ququart `i`
/// in order, the ququarts `i..` are conjugated by `X₂₃` around a `(CZ₄)²`
/// fan-out from ququart `i` to all later ones. A single later ququart uses
/// a qudit pair, more use a qudit GHZ state.
pub fn build_qudit_gcz(n_qubits: usize, partition: &Partition, enc: &QuditEncoding) -> Result<DistCircuit, BuildError> {
    if !n_qubits.is_multiple_of(2) {
        return Err(BuildError::OddQubitCount(n_qubits));
    }
    if n_qubits != 2 * enc.pairs.len() {
        return Err(BuildError::UnsupportedPartition(format!(
            "encoding covers {} qubits, expected {n_qubits}",
            2 * enc.pairs.len()
        )));
    }
    if n_qubits < 4 {
        return Err(BuildError::UnsupportedPartition("at least two ququarts are needed".into()));
    }
    let mut layout = partition.layout.clone();
    let mut used: Vec<String> = Vec::new();
    for p in &enc.pairs {
        let node_of = |l: &str| layout.node_of(l).map(str::to_string).ok_or_else(|| BuildError::Unplaced(l.to_string()));
        let (a, b) = (node_of(&p.high)?, node_of(&p.low)?);
        if a != b {
            return Err(BuildError::UnsupportedPartition(format!("`{}` and `{}` are on different nodes", p.high, p.low)));
        }
        if used.contains(&a) {
            return Err(BuildError::UnsupportedPartition(format!("more than one ququart on {a}")));
        }
        if let Some(existing) = layout.node_of(&p.qudit) {
            if existing != a {
                return Err(BuildError::UnsupportedPartition(format!("`{}` is placed on {existing}", p.qudit)));
            }
        }
        layout.place(p.qudit.clone(), a.clone());
        used.push(a);
    }

    let qudits = enc.qudits();
    let qs: Vec<&str> = qudits.iter().map(String::as_str).collect();
    let mut b = CircuitBuilder::new(&layout);
    for q in &qs {
        b.gate(Gate::P3, &[q]);
    }
    for i in 0..qs.len() - 1 {
        b.layer = Some(i as u32);
        for q in &qs[i..] {
            b.gate(Gate::X23, &[q]);
        }
        qudit_fanout_into(&mut b, qs[i], &qs[i + 1..], ReceiverOp::Cz4Pow(2))?;
        for q in &qs[i..] {
            b.gate(Gate::X23, &[q]);
        }
    }
    let n = qudits.len();
    b.finish(qudits, vec![D; n], Some(enc.clone()))
}
