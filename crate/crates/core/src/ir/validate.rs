use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::Serialize;

use super::{DistCircuit, Op};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Rule {
    CrossNodeLocalGate,
    UnknownOutcomeSymbol,
    OutcomeNotDelivered,
    DuplicateSymbol,
    MessageSource,
    PartyCount,
    ResourcePlacement,
    UndeclaredNode,
    UnplacedLabel,
    DeadSubsystem,
    LabelReuse,
    DuplicateTarget,
    ArityMismatch,
    CommSlotOverflow,
    UnmeasuredResource,
    OutputNotLive,
    InputDims,
}

impl Rule {
    pub fn as_str(self) -> &'static str {
        match self {
            Rule::CrossNodeLocalGate => "cross-node local gate",
            Rule::UnknownOutcomeSymbol => "unknown outcome symbol",
            Rule::OutcomeNotDelivered => "outcome not delivered",
            Rule::DuplicateSymbol => "duplicate outcome symbol",
            Rule::MessageSource => "message from a node that lacks the outcome",
            Rule::PartyCount => "party count",
            Rule::ResourcePlacement => "resource placement",
            Rule::UndeclaredNode => "undeclared node",
            Rule::UnplacedLabel => "unplaced label",
            Rule::DeadSubsystem => "subsystem not live",
            Rule::LabelReuse => "label reused while live",
            Rule::DuplicateTarget => "duplicate target",
            Rule::ArityMismatch => "gate arity mismatch",
            Rule::CommSlotOverflow => "communication slots exceeded",
            Rule::UnmeasuredResource => "resource subsystem never measured",
            Rule::OutputNotLive => "declared output not live",
            Rule::InputDims => "input dimensions",
        }
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A broken invariant. `index` is the offending instruction, or `None` for
/// layout-level and end-of-circuit checks.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub index: Option<usize>,
    pub rule: Rule,
    pub detail: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.index {
            Some(i) => write!(f, "instruction {i}: {}: {}", self.rule, self.detail),
            None => write!(f, "{}: {}", self.rule, self.detail),
        }
    }
}

struct Checker<'a> {
    c: &'a DistCircuit,
    out: Vec<Violation>,
    /// Live subsystem → dimension.
    live: BTreeMap<&'a str, usize>,
    /// Live subsystems that came from a resource creation.
    comm: BTreeSet<&'a str>,
    /// Outcome symbol → nodes that know its value.
    known: BTreeMap<&'a str, BTreeSet<&'a str>>,
}

impl<'a> Checker<'a> {
    fn flag(&mut self, index: Option<usize>, rule: Rule, detail: String) {
        self.out.push(Violation { index, rule, detail });
    }

    fn node(&mut self, i: usize, label: &str) -> Option<&'a str> {
        let n = self.c.layout.node_of(label);
        if n.is_none() {
            self.flag(Some(i), Rule::UnplacedLabel, format!("`{label}` has no node"));
        }
        n
    }

    fn distinct(&mut self, i: usize, targets: &[String]) {
        let mut seen = BTreeSet::new();
        for t in targets {
            if !seen.insert(t) {
                self.flag(Some(i), Rule::DuplicateTarget, format!("`{t}` listed twice"));
            }
        }
    }

    fn gate(&mut self, i: usize, arity: Vec<usize>, targets: &'a [String]) {
        self.distinct(i, targets);
        if arity.len() != targets.len() {
            self.flag(
                Some(i),
                Rule::ArityMismatch,
                format!("gate acts on {} subsystems, {} given", arity.len(), targets.len()),
            );
        }
        for (t, want) in targets.iter().zip(&arity) {
            match self.live.get(t.as_str()) {
                None => self.flag(Some(i), Rule::DeadSubsystem, format!("`{t}`")),
                Some(d) if d != want => {
                    let d = *d;
                    self.flag(Some(i), Rule::ArityMismatch, format!("`{t}` has dimension {d}, gate expects {want}"))
                }
                _ => {}
            }
        }
        let nodes: BTreeSet<&str> = targets.iter().filter_map(|t| self.node(i, t)).collect();
        if nodes.len() > 1 {
            let list: Vec<&str> = nodes.into_iter().collect();
            self.flag(Some(i), Rule::CrossNodeLocalGate, format!("targets span {}", list.join(", ")));
        }
    }

    fn resource(&mut self, i: usize, op: &'a Op, targets: &'a [String], parties: &'a [String], dim: usize) {
        let pairwise = matches!(op, Op::CreateBell { .. } | Op::CreateQuditPair { .. });
        if (pairwise && parties.len() != 2) || (!pairwise && parties.len() < 3) {
            self.flag(
                Some(i),
                Rule::PartyCount,
                format!("{:?} with {} parties", op.kind(), parties.len()),
            );
        }
        if targets.len() != parties.len() {
            self.flag(Some(i), Rule::PartyCount, format!("{} targets for {} parties", targets.len(), parties.len()));
        }
        if dim < 2 {
            self.flag(Some(i), Rule::ArityMismatch, format!("resource dimension {dim}"));
        }
        let distinct_parties: BTreeSet<&String> = parties.iter().collect();
        if distinct_parties.len() != parties.len() {
            self.flag(Some(i), Rule::ResourcePlacement, "a node appears twice among the parties".into());
        }
        self.distinct(i, targets);
        for p in parties {
            if !self.c.layout.nodes.contains(p) {
                self.flag(Some(i), Rule::UndeclaredNode, format!("party `{p}`"));
            }
        }
        for (t, p) in targets.iter().zip(parties) {
            if let Some(n) = self.node(i, t) {
                if n != p {
                    self.flag(Some(i), Rule::ResourcePlacement, format!("`{t}` lives on {n}, party is {p}"));
                }
            }
            if self.live.contains_key(t.as_str()) {
                self.flag(Some(i), Rule::LabelReuse, format!("`{t}`"));
            }
            self.live.insert(t, dim);
            self.comm.insert(t);
        }
        for p in parties {
            let data = |l: &&str| self.c.inputs.iter().chain(&self.c.outputs).any(|d| d == l);
            let used = self
                .comm
                .iter()
                .filter(|l| !data(l) && self.c.layout.node_of(l) == Some(p.as_str()))
                .count();
            let slots = self.c.layout.comm_slots(p) as usize;
            if used > slots {
                self.flag(Some(i), Rule::CommSlotOverflow, format!("{p} holds {used}, has {slots} slots"));
            }
        }
    }

    fn run(mut self) -> Vec<Violation> {
        let c = self.c;
        for (label, node) in &c.layout.placement {
            if !c.layout.nodes.contains(node) {
                self.flag(None, Rule::UndeclaredNode, format!("`{label}` placed on `{node}`"));
            }
        }
        for node in c.layout.comm_slots.keys() {
            if !c.layout.nodes.contains(node) {
                self.flag(None, Rule::UndeclaredNode, format!("comm slots for `{node}`"));
            }
        }
        if c.input_dims.len() != c.inputs.len() {
            self.flag(None, Rule::InputDims, format!("{} dims for {} inputs", c.input_dims.len(), c.inputs.len()));
        }
        for (l, d) in c.inputs.iter().zip(&c.input_dims) {
            if c.layout.node_of(l).is_none() {
                self.flag(None, Rule::UnplacedLabel, format!("input `{l}`"));
            }
            if self.live.insert(l, *d).is_some() {
                self.flag(None, Rule::DuplicateTarget, format!("input `{l}` listed twice"));
            }
        }

        for (i, ins) in c.instructions.iter().enumerate() {
            match &ins.op {
                Op::LocalGate { gate, targets } => self.gate(i, gate.arity(), targets),
                Op::CondGate { gate, targets, condition } => {
                    self.gate(i, gate.arity(), targets);
                    let here = targets.first().and_then(|t| c.layout.node_of(t));
                    for s in condition.symbols() {
                        match self.known.get(s.as_str()) {
                            None => self.flag(Some(i), Rule::UnknownOutcomeSymbol, format!("`{s}`")),
                            Some(nodes) => {
                                if let Some(h) = here {
                                    if !nodes.contains(h) {
                                        self.flag(Some(i), Rule::OutcomeNotDelivered, format!("`{s}` never sent to {h}"));
                                    }
                                }
                            }
                        }
                    }
                }
                op @ (Op::CreateBell { .. }
                | Op::CreateGhz { .. }
                | Op::CreateQuditPair { .. }
                | Op::CreateQuditGhz { .. }) => {
                    let (targets, parties, dim) = op.resource().expect("resource op");
                    self.resource(i, op, targets, parties, dim);
                }
                Op::Measure { target, symbol } => {
                    if self.live.remove(target.as_str()).is_none() {
                        self.flag(Some(i), Rule::DeadSubsystem, format!("`{target}`"));
                    }
                    self.comm.remove(target.as_str());
                    let node = self.node(i, target);
                    if self.known.contains_key(symbol.as_str()) {
                        self.flag(Some(i), Rule::DuplicateSymbol, format!("`{symbol}`"));
                    }
                    self.known.insert(symbol, node.into_iter().collect());
                }
                Op::ClassicalSend { symbol, from, to, .. } => {
                    for n in std::iter::once(from).chain(to) {
                        if !c.layout.nodes.contains(n) {
                            self.flag(Some(i), Rule::UndeclaredNode, format!("`{n}`"));
                        }
                    }
                    match self.known.get_mut(symbol.as_str()) {
                        None => self.flag(Some(i), Rule::UnknownOutcomeSymbol, format!("`{symbol}`")),
                        Some(nodes) if !nodes.contains(from.as_str()) => {
                            self.flag(Some(i), Rule::MessageSource, format!("{from} does not hold `{symbol}`"))
                        }
                        Some(nodes) => nodes.extend(to.iter().map(String::as_str)),
                    }
                }
            }
        }

        let outputs: BTreeSet<&str> = c.outputs.iter().map(String::as_str).collect();
        for o in &c.outputs {
            if !self.live.contains_key(o.as_str()) {
                self.flag(None, Rule::OutputNotLive, format!("`{o}`"));
            }
        }
        let leftover: Vec<&str> = self.comm.iter().copied().filter(|l| !outputs.contains(l)).collect();
        for l in leftover {
            self.flag(None, Rule::UnmeasuredResource, format!("`{l}`"));
        }
        self.out
    }
}

/// Checks structural invariants. An empty list means the circuit is
/// well-formed.
pub fn validate(circuit: &DistCircuit) -> Vec<Violation> {
    Checker {
        c: circuit,
        out: vec![],
        live: BTreeMap::new(),
        comm: BTreeSet::new(),
        known: BTreeMap::new(),
    }
    .run()
}
