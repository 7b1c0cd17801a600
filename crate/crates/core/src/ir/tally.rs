use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::{DistCircuit, Op};
use crate::resources::TimeModel;

/// Entanglement resources and classical traffic consumed by a circuit.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ResourceTally {
    /// Bell pairs.
    pub ep: u64,
    /// Qubit GHZ states by arity.
    pub ghz: BTreeMap<usize, u64>,
    /// Qudit pairs by dimension.
    pub ep_d: BTreeMap<usize, u64>,
    /// Qudit GHZ states by `(arity, dimension)`.
    #[serde(with = "ghz_d_list")]
    pub ghz_d: BTreeMap<(usize, usize), u64>,
    /// Point-to-point messages (a broadcast to r nodes counts r).
    pub messages: u64,
    pub message_bits: u64,
    /// Estimated time in Bell-pair generation units.
    pub time_units: f64,
}

mod ghz_d_list {
    use super::*;
    use serde::{Deserializer, Serializer};

    #[derive(Serialize, Deserialize)]
    struct Entry {
        arity: usize,
        dim: usize,
        count: u64,
    }

    pub fn serialize<S: Serializer>(map: &BTreeMap<(usize, usize), u64>, s: S) -> Result<S::Ok, S::Error> {
        let list: Vec<Entry> =
            map.iter().map(|(&(arity, dim), &count)| Entry { arity, dim, count }).collect();
        list.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BTreeMap<(usize, usize), u64>, D::Error> {
        let list = Vec::<Entry>::deserialize(d)?;
        Ok(list.into_iter().map(|e| ((e.arity, e.dim), e.count)).collect())
    }
}

impl ResourceTally {
    pub fn ghz_total(&self) -> u64 {
        self.ghz.values().sum()
    }

    pub fn ep_d_total(&self) -> u64 {
        self.ep_d.values().sum()
    }

    pub fn ghz_d_total(&self) -> u64 {
        self.ghz_d.values().sum()
    }

    /// Entanglement resources of every kind.
    pub fn resource_total(&self) -> u64 {
        self.ep + self.ghz_total() + self.ep_d_total() + self.ghz_d_total()
    }

    /// Equality of the resource counts, ignoring messages and time.
    pub fn same_resources(&self, other: &ResourceTally) -> bool {
        self.ep == other.ep && self.ghz == other.ghz && self.ep_d == other.ep_d && self.ghz_d == other.ghz_d
    }
}

/// Summary such as `2 ghz(3), 2 ep` or `1 ghz_d(3,4), 1 ep_d(4)`. Larger
/// resources are listed first.
impl fmt::Display for ResourceTally {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        for (a, c) in self.ghz.iter().rev() {
            parts.push(format!("{c} ghz({a})"));
        }
        if self.ep > 0 {
            parts.push(format!("{} ep", self.ep));
        }
        for ((a, d), c) in self.ghz_d.iter().rev() {
            parts.push(format!("{c} ghz_d({a},{d})"));
        }
        for (d, c) in self.ep_d.iter().rev() {
            parts.push(format!("{c} ep_d({d})"));
        }
        if parts.is_empty() {
            f.write_str("none")
        } else {
            f.write_str(&parts.join(", "))
        }
    }
}

/// [`tally_with`] under the default serial time model with ε = 1.
pub fn tally(circuit: &DistCircuit) -> ResourceTally {
    tally_with(circuit, &TimeModel::default())
}

pub fn tally_with(circuit: &DistCircuit, model: &TimeModel) -> ResourceTally {
    let mut t = ResourceTally::default();
    for ins in &circuit.instructions {
        match &ins.op {
            Op::CreateBell { .. } => t.ep += 1,
            Op::CreateGhz { targets, .. } => *t.ghz.entry(targets.len()).or_default() += 1,
            Op::CreateQuditPair { dim, .. } => *t.ep_d.entry(*dim).or_default() += 1,
            Op::CreateQuditGhz { targets, dim, .. } => {
                *t.ghz_d.entry((targets.len(), *dim)).or_default() += 1
            }
            Op::ClassicalSend { to, bits, .. } => {
                t.messages += to.len() as u64;
                t.message_bits += to.len() as u64 * u64::from(*bits);
            }
            _ => {}
        }
    }
    t.time_units = model.circuit_time(circuit);
    t
}
