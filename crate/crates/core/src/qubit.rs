//! Qubit-level distributed protocols: teleported controlled gates, GHZ
//! fan-out, and distributed GMS and GCZ gates.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::angle::Angle;
use crate::builder::CircuitBuilder;
use crate::gates::{Gate, PlacedGate};
use crate::ir::{Condition, DistCircuit, NodeLayout};
use crate::unitary::Unitary;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BuildError {
    #[error("`{0}` and `{1}` are on the same node; use a local gate")]
    CoLocated(String, String),
    #[error("the target list is empty")]
    EmptyTargets,
    #[error("at least 2 qubits are required, got {0}")]
    TooFewQubits(usize),
    #[error("`{0}` is not placed on any node")]
    Unplaced(String),
    #[error("`{0}` appears more than once")]
    DuplicateLabel(String),
    #[error("insufficient communication slots: {0}")]
    InsufficientCommSlots(String),
    #[error("fan-out targets must be single-qubit gates, got {0}")]
    NotSingleQubit(String),
    #[error("the fan-out GMS strategy needs one qubit per node; {0} holds {1}")]
    MultiQubitNode(String, usize),
    #[error("teleport_all needs exactly 2 nodes, got {0}")]
    TeleportNeedsTwoNodes(usize),
    #[error("power must be 1 or 2, got {0}")]
    InvalidPower(u32),
    #[error("an even number of qubits is required, got {0}")]
    OddQubitCount(usize),
    #[error("unsupported partition: {0}")]
    UnsupportedPartition(String),
    #[error("builder produced an invalid circuit: {0:?}")]
    Invalid(Vec<String>),
}

/// A GMS gate over `labels` with angle `theta`.
#[derive(Clone, Debug, PartialEq)]
pub struct GmsSpec {
    pub labels: Vec<String>,
    pub theta: Angle,
}

impl GmsSpec {
    pub fn new<S: Into<String>>(labels: impl IntoIterator<Item = S>, theta: Angle) -> Result<Self, BuildError> {
        let labels: Vec<String> = labels.into_iter().map(Into::into).collect();
        check_labels(&labels)?;
        Ok(GmsSpec { labels, theta })
    }
}

fn check_labels(labels: &[String]) -> Result<(), BuildError> {
    if labels.len() < 2 {
        return Err(BuildError::TooFewQubits(labels.len()));
    }
    for (i, l) in labels.iter().enumerate() {
        if labels[..i].contains(l) {
            return Err(BuildError::DuplicateLabel(l.clone()));
        }
    }
    Ok(())
}

/// Placement of computation qubits on nodes.
#[derive(Clone, Debug, PartialEq)]
pub struct Partition {
    pub layout: NodeLayout,
}

impl Partition {
    pub fn new(layout: NodeLayout) -> Self {
        Partition { layout }
    }

    /// `nodes` nodes `n1…nD` with `per_node` consecutive labels each.
    pub fn uniform<S: AsRef<str>>(labels: &[S], nodes: usize, per_node: usize, comm_slots: u32) -> Self {
        Partition { layout: NodeLayout::uniform(labels, nodes, per_node, comm_slots) }
    }

    /// Number of placed labels per node, for every declared node.
    pub fn qubits_per_node(&self) -> BTreeMap<String, usize> {
        let mut m: BTreeMap<String, usize> = self.layout.nodes.iter().map(|n| (n.clone(), 0)).collect();
        for node in self.layout.placement.values() {
            *m.entry(node.clone()).or_default() += 1;
        }
        m
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GmsStrategy {
    Pairwise,
    PairwiseConditional,
    Fanout,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GczStrategy {
    Pairwise,
    Fanout,
    TeleportAll,
}

impl FromStr for GmsStrategy {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "pairwise" => Ok(GmsStrategy::Pairwise),
            "pairwise_conditional" | "conditional" => Ok(GmsStrategy::PairwiseConditional),
            "fanout" => Ok(GmsStrategy::Fanout),
            _ => Err(format!("unknown GMS strategy `{s}` (pairwise, pairwise_conditional, fanout)")),
        }
    }
}

impl FromStr for GczStrategy {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "pairwise" => Ok(GczStrategy::Pairwise),
            "fanout" => Ok(GczStrategy::Fanout),
            "teleport_all" => Ok(GczStrategy::TeleportAll),
            _ => Err(format!("unknown GCZ strategy `{s}` (pairwise, fanout, teleport_all)")),
        }
    }
}

impl fmt::Display for GmsStrategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            GmsStrategy::Pairwise => "pairwise",
            GmsStrategy::PairwiseConditional => "pairwise_conditional",
            GmsStrategy::Fanout => "fanout",
        })
    }
}

impl fmt::Display for GczStrategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            GczStrategy::Pairwise => "pairwise",
            GczStrategy::Fanout => "fanout",
            GczStrategy::TeleportAll => "teleport_all",
        })
    }
}

/// The two-qubit gate "control, then `u` on the target".
pub fn controlled_form(u: &Gate) -> Result<Gate, BuildError> {
    if u.arity() != [2] {
        return Err(BuildError::NotSingleQubit(u.name()));
    }
    Ok(match u {
        Gate::X => Gate::Cnot,
        Gate::Z => Gate::Cz,
        g => Gate::controlled(g.clone()),
    })
}

/// Appends a fan-out of controlled single-qubit gates from `control`.
///
/// Targets on the control's node are driven directly. Remote nodes share
/// one resource with the control's node: a Bell pair for one remote node, a
/// GHZ state otherwise. Each remote node uses a single communication qubit
/// for all of its targets.
pub(crate) fn fanout_into(b: &mut CircuitBuilder, control: &str, targets: &[(String, Gate)]) -> Result<(), BuildError> {
    if targets.is_empty() {
        return Err(BuildError::EmptyTargets);
    }
    let home = b.node_of(control)?;
    let mut remote: Vec<(String, Vec<(&str, Gate)>)> = Vec::new();
    let mut local = Vec::new();
    for (t, g) in targets {
        let cg = controlled_form(g)?;
        let node = b.node_of(t)?;
        if node == home {
            local.push((t.as_str(), cg));
        } else if let Some(entry) = remote.iter_mut().find(|(n, _)| *n == node) {
            entry.1.push((t, cg));
        } else {
            remote.push((node, vec![(t, cg)]));
        }
    }

    for (t, cg) in local {
        b.gate(cg, &[control, t]);
    }
    if remote.is_empty() {
        return Ok(());
    }

    let nodes: Vec<&str> = std::iter::once(home.as_str()).chain(remote.iter().map(|(n, _)| n.as_str())).collect();
    let comm = b.entangle(&nodes);
    b.gate(Gate::Cnot, &[control, &comm[0]]);
    let m0 = b.measure_and_send(&comm[0], &nodes[1..], 1)?;
    let mut returned = Vec::new();
    for ((_, group), e) in remote.iter().zip(&comm[1..]) {
        b.cond(Gate::X, &[e], Condition::xor([m0.as_str()]));
        for (t, cg) in group {
            b.gate(cg.clone(), &[e, t]);
        }
        b.gate(Gate::H, &[e]);
        returned.push(b.measure_and_send(e, &[home.as_str()], 1)?);
    }
    b.cond(Gate::Z, &[control], Condition::xor(returned));
    Ok(())
}

/// Controlled-`u` from `control` to `target` on another node using one
/// Bell pair.
pub fn build_dcontrol_u(control: &str, target: &str, u: &Gate, layout: &NodeLayout) -> Result<DistCircuit, BuildError> {
    let mut b = CircuitBuilder::new(layout);
    if b.node_of(control)? == b.node_of(target)? {
        return Err(BuildError::CoLocated(control.into(), target.into()));
    }
    fanout_into(&mut b, control, &[(target.to_string(), u.clone())])?;
    b.finish(vec![control.into(), target.into()], vec![2, 2], None)
}

/// Single control driving one single-qubit gate per target.
pub fn build_fanout(control: &str, targets: &[(String, Gate)], layout: &NodeLayout) -> Result<DistCircuit, BuildError> {
    let mut b = CircuitBuilder::new(layout);
    let mut labels = vec![control.to_string()];
    labels.extend(targets.iter().map(|(t, _)| t.clone()));
    for (i, l) in labels.iter().enumerate() {
        if labels[..i].contains(l) {
            return Err(BuildError::DuplicateLabel(l.clone()));
        }
    }
    fanout_into(&mut b, control, targets)?;
    let n = labels.len();
    b.finish(labels, vec![2; n], None)
}

/// `exp(−i(θ/2) X⊗X) = cos(θ/2) I − i sin(θ/2) X⊗X`.
pub fn lms_matrix(theta: f64) -> Unitary {
    let c = C64::new((theta / 2.0).cos(), 0.0);
    let s = C64::new(0.0, -(theta / 2.0).sin());
    let mut m = nalgebra::DMatrix::<C64>::zeros(4, 4);
    for i in 0..4 {
        m[(i, i)] = c;
        m[(i, 3 - i)] = s;
    }
    Unitary::new(vec![2, 2], m).expect("lms is unitary")
}

/// `(H⊗H)·CNOT·(I⊗R_Z(θ))·CNOT·(H⊗H)` on positions 0, 1.
pub fn lms_cnot_form(theta: Angle) -> Vec<PlacedGate> {
    vec![
        (Gate::H, vec![0]),
        (Gate::H, vec![1]),
        (Gate::Cnot, vec![0, 1]),
        (Gate::Rz(theta), vec![1]),
        (Gate::Cnot, vec![0, 1]),
        (Gate::H, vec![0]),
        (Gate::H, vec![1]),
    ]
}

/// `(H⊗H)·CR_Z(−2θ)·(I⊗R_Z(θ))·(H⊗H)` on positions 0, 1.
pub fn lms_conditional_form(theta: Angle) -> Vec<PlacedGate> {
    vec![
        (Gate::H, vec![0]),
        (Gate::H, vec![1]),
        (Gate::Rz(theta), vec![1]),
        (Gate::controlled(Gate::Rz(theta.scale(-2))), vec![0, 1]),
        (Gate::H, vec![0]),
        (Gate::H, vec![1]),
    ]
}

fn same_node(b: &CircuitBuilder, x: &str, y: &str) -> Result<bool, BuildError> {
    Ok(b.node_of(x)? == b.node_of(y)?)
}

/// Controlled gate between two qubits, teleported if they sit on different
/// nodes.
fn pair_controlled(b: &mut CircuitBuilder, c: &str, t: &str, u: Gate) -> Result<(), BuildError> {
    if same_node(b, c, t)? {
        b.gate(controlled_form(&u)?, &[c, t]);
        Ok(())
    } else {
        fanout_into(b, c, &[(t.to_string(), u)])
    }
}

/// Distributed GMS gate.
///
/// * `Pairwise`: every LMS factor in CNOT form, each CNOT teleported.
/// * `PairwiseConditional`: every LMS factor in conditional form with one
///   teleported controlled `R_Z(−2θ)`.
/// * `Fanout`: for each qubit `i` in order, one fan-out of controlled
///   `R_Z(−2θ)` to all later qubits, bracketed by Hadamards, with the
///   `R_Z(θ)` pre-rotations applied locally on the targets. The last pair
///   uses a Bell pair. Fan-out `i` is recorded in layer `i`.
pub fn build_dgms(spec: &GmsSpec, layout: &NodeLayout, strategy: GmsStrategy) -> Result<DistCircuit, BuildError> {
    check_labels(&spec.labels)?;
    let mut b = CircuitBuilder::new(layout);
    let labels: Vec<&str> = spec.labels.iter().map(String::as_str).collect();
    for l in &labels {
        b.node_of(l)?;
    }
    let theta = spec.theta;
    let crz = Gate::Rz(theta.scale(-2));

    match strategy {
        GmsStrategy::Pairwise | GmsStrategy::PairwiseConditional => {
            for (i, &qi) in labels.iter().enumerate() {
                for &qj in &labels[i + 1..] {
                    b.gate(Gate::H, &[qi]);
                    b.gate(Gate::H, &[qj]);
                    if strategy == GmsStrategy::Pairwise {
                        pair_controlled(&mut b, qi, qj, Gate::X)?;
                        b.gate(Gate::Rz(theta), &[qj]);
                        pair_controlled(&mut b, qi, qj, Gate::X)?;
                    } else {
                        b.gate(Gate::Rz(theta), &[qj]);
                        pair_controlled(&mut b, qi, qj, crz.clone())?;
                    }
                    b.gate(Gate::H, &[qi]);
                    b.gate(Gate::H, &[qj]);
                }
            }
        }
        GmsStrategy::Fanout => {
            for l in &labels {
                let node = b.node_of(l)?;
                let count = labels.iter().filter(|x| b.layout().node_of(x) == Some(node.as_str())).count();
                if count > 1 {
                    return Err(BuildError::MultiQubitNode(node, count));
                }
            }
            for (i, &qi) in labels.iter().enumerate().take(labels.len() - 1) {
                b.layer = Some(i as u32);
                let later = &labels[i + 1..];
                b.gate(Gate::H, &[qi]);
                for &qj in later {
                    b.gate(Gate::H, &[qj]);
                    b.gate(Gate::Rz(theta), &[qj]);
                }
                let targets: Vec<(String, Gate)> = later.iter().map(|q| (q.to_string(), crz.clone())).collect();
                fanout_into(&mut b, qi, &targets)?;
                for &qj in later {
                    b.gate(Gate::H, &[qj]);
                }
                b.gate(Gate::H, &[qi]);
            }
        }
    }
    let n = labels.len();
    b.finish(spec.labels.clone(), vec![2; n], None)
}

/// Teleports `data` into a fresh communication qubit on `to`; returns it.
fn teleport_out(b: &mut CircuitBuilder, data: &str, to: &str) -> Result<String, BuildError> {
    let from = b.node_of(data)?;
    let pair = b.entangle(&[from.as_str(), to]);
    b.gate(Gate::Cnot, &[data, &pair[0]]);
    b.gate(Gate::H, &[data]);
    let mz = b.measure_and_send(data, &[to], 1)?;
    let mx = b.measure_and_send(&pair[0], &[to], 1)?;
    b.cond(Gate::X, &[&pair[1]], Condition::xor([mx]));
    b.cond(Gate::Z, &[&pair[1]], Condition::xor([mz]));
    Ok(pair[1].clone())
}

/// Teleports `holder` back into the original label `home`.
fn teleport_back(b: &mut CircuitBuilder, holder: &str, home: &str) -> Result<(), BuildError> {
    let from = b.node_of(holder)?;
    let to = b.node_of(home)?;
    let fresh = b.comm(&from, "a");
    b.bell_onto([&fresh, home])?;
    b.gate(Gate::Cnot, &[holder, &fresh]);
    b.gate(Gate::H, &[holder]);
    let mz = b.measure_and_send(holder, &[to.as_str()], 1)?;
    let mx = b.measure_and_send(&fresh, &[to.as_str()], 1)?;
    b.cond(Gate::X, &[home], Condition::xor([mx]));
    b.cond(Gate::Z, &[home], Condition::xor([mz]));
    Ok(())
}

/// Distributed GCZ (CZ on every pair of `labels`).
///
/// * `Pairwise`: one teleported CZ (Hadamard-conjugated dCNOT) per
///   cross-node pair, local CZ otherwise.
/// * `Fanout`: for each qubit in order, a CZ fan-out to all later qubits.
///   Fan-outs are layered by the driving qubit's position on its node.
/// * `TeleportAll`: two nodes only. The second node's qubits are
///   teleported to the first, the gate is applied locally, and they are
///   teleported back.
pub fn build_dgcz(labels: &[String], partition: &Partition, strategy: GczStrategy) -> Result<DistCircuit, BuildError> {
    check_labels(labels)?;
    let layout = &partition.layout;
    let mut b = CircuitBuilder::new(layout);
    let ls: Vec<&str> = labels.iter().map(String::as_str).collect();
    for l in &ls {
        b.node_of(l)?;
    }

    match strategy {
        GczStrategy::Pairwise => {
            for (i, &qi) in ls.iter().enumerate() {
                for &qj in &ls[i + 1..] {
                    if same_node(&b, qi, qj)? {
                        b.gate(Gate::Cz, &[qi, qj]);
                    } else {
                        b.gate(Gate::H, &[qj]);
                        fanout_into(&mut b, qi, &[(qj.to_string(), Gate::X)])?;
                        b.gate(Gate::H, &[qj]);
                    }
                }
            }
        }
        GczStrategy::Fanout => {
            for (i, &qi) in ls.iter().enumerate().take(ls.len() - 1) {
                let node = b.node_of(qi)?;
                let rank = ls[..i].iter().filter(|x| layout.node_of(x) == Some(node.as_str())).count();
                b.layer = Some(rank as u32);
                let targets: Vec<(String, Gate)> = ls[i + 1..].iter().map(|q| (q.to_string(), Gate::Z)).collect();
                fanout_into(&mut b, qi, &targets)?;
            }
        }
        GczStrategy::TeleportAll => {
            let mut used: Vec<String> = Vec::new();
            for l in &ls {
                let n = b.node_of(l)?;
                if !used.contains(&n) {
                    used.push(n);
                }
            }
            if used.len() != 2 {
                return Err(BuildError::TeleportNeedsTwoNodes(used.len()));
            }
            let (home, away) = (&used[0], &used[1]);
            let mut current: Vec<String> = Vec::new();
            let mut moved: Vec<(String, String)> = Vec::new();
            for &l in &ls {
                if b.node_of(l)? == *away {
                    let holder = teleport_out(&mut b, l, home)?;
                    moved.push((holder.clone(), l.to_string()));
                    current.push(holder);
                } else {
                    current.push(l.to_string());
                }
            }
            for i in 0..current.len() {
                for j in i + 1..current.len() {
                    b.gate(Gate::Cz, &[&current[i], &current[j]]);
                }
            }
            for (holder, l) in &moved {
                teleport_back(&mut b, holder, l)?;
            }
        }
    }
    let n = labels.len();
    b.finish(labels.to_vec(), vec![2; n], None)
}
