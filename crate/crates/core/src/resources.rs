//! Closed-form entanglement costs and the ε time model.
//!
//! Times are in units of one Bell-pair generation. A GHZ state of any
//! arity costs ε (optionally per arity), a Bell pair costs 1.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ir::{DistCircuit, Op, ResourceTally};
use crate::qubit::GmsStrategy;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ResourceError {
    #[error("{0}")]
    NotDivisible(String),
    #[error("{0}")]
    TooSmall(String),
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Schedule {
    /// Every resource generation happens one after another.
    #[default]
    Serial,
    /// Resources sharing a layer index are generated concurrently; the
    /// layer costs its slowest resource. Unlayered resources stay serial.
    Layered,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TimeModel {
    pub epsilon: f64,
    /// Overrides ε for particular GHZ arities.
    pub per_arity: BTreeMap<usize, f64>,
    pub schedule: Schedule,
}

impl Default for TimeModel {
    fn default() -> Self {
        TimeModel { epsilon: 1.0, per_arity: BTreeMap::new(), schedule: Schedule::Serial }
    }
}

impl TimeModel {
    pub fn with_epsilon(epsilon: f64) -> Self {
        TimeModel { epsilon, ..Self::default() }
    }

    pub fn layered(mut self) -> Self {
        self.schedule = Schedule::Layered;
        self
    }

    pub fn ghz_time(&self, arity: usize) -> f64 {
        self.per_arity.get(&arity).copied().unwrap_or(self.epsilon)
    }

    /// Generation time of one resource instruction, `None` for other kinds.
    pub fn op_time(&self, op: &Op) -> Option<f64> {
        match op {
            Op::CreateBell { .. } | Op::CreateQuditPair { .. } => Some(1.0),
            Op::CreateGhz { targets, .. } | Op::CreateQuditGhz { targets, .. } => Some(self.ghz_time(targets.len())),
            _ => None,
        }
    }

    pub fn circuit_time(&self, circuit: &DistCircuit) -> f64 {
        let mut serial = 0.0;
        let mut layers: BTreeMap<u32, f64> = BTreeMap::new();
        for ins in &circuit.instructions {
            let Some(t) = self.op_time(&ins.op) else { continue };
            match (self.schedule, ins.layer) {
                (Schedule::Layered, Some(l)) => {
                    let slot = layers.entry(l).or_insert(0.0);
                    *slot = slot.max(t);
                }
                _ => serial += t,
            }
        }
        serial + layers.values().sum::<f64>()
    }

    /// Serial time of a tally's resources.
    pub fn tally_time(&self, t: &ResourceTally) -> f64 {
        let ghz: f64 = t.ghz.iter().map(|(&a, &c)| c as f64 * self.ghz_time(a)).sum();
        let ghz_d: f64 = t.ghz_d.iter().map(|(&(a, _), &c)| c as f64 * self.ghz_time(a)).sum();
        t.ep as f64 + t.ep_d_total() as f64 + ghz + ghz_d
    }
}

/// An `n`-qubit GCZ over `nodes` nodes holding `per_node` qubits each, with
/// `per_qudit` qubits packed into each qudit for the compressed strategy.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GczConfig {
    pub n: usize,
    pub nodes: usize,
    pub per_node: usize,
    pub per_qudit: usize,
    pub epsilon: f64,
}

impl GczConfig {
    /// One qudit per node (`per_qudit = per_node`), ε = 1.
    pub fn uniform(nodes: usize, per_node: usize) -> Self {
        GczConfig { n: nodes * per_node, nodes, per_node, per_qudit: per_node, epsilon: 1.0 }
    }

    pub fn check(&self) -> Result<(), ResourceError> {
        if self.nodes == 0 || self.per_node == 0 || self.per_qudit == 0 {
            return Err(ResourceError::TooSmall("node count, qubits per node and qubits per qudit must be positive".into()));
        }
        if self.n != self.nodes * self.per_node {
            return Err(ResourceError::NotDivisible(format!(
                "n = {} is not {} nodes × {} qubits",
                self.n, self.nodes, self.per_node
            )));
        }
        if !self.per_node.is_multiple_of(self.per_qudit) {
            return Err(ResourceError::NotDivisible(format!(
                "{} qubits per qudit does not divide {} qubits per node",
                self.per_qudit, self.per_node
            )));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CostReport {
    pub pairwise_ep: u64,
    pub fanout_ghz: u64,
    /// GHZ states of the fan-out strategy by arity.
    pub fanout_ghz_arities: BTreeMap<usize, u64>,
    pub fanout_ep: u64,
    pub qudit_ghz: u64,
    pub qudit_ghz_arities: BTreeMap<usize, u64>,
    pub qudit_ep: u64,
    /// Qudit dimension `2^per_qudit`.
    pub qudit_dim: usize,
    pub time_pairwise: f64,
    pub time_fanout: f64,
    pub time_qudit: f64,
}

/// Per-strategy resource counts for a distributed GCZ.
///
/// In the fan-out strategy every qubit on node `i` drives one fan-out to
/// nodes `i+1..D`: a GHZ state of arity `D−i+1` while at least two remote
/// nodes remain, a Bell pair for the last remote node. The qudit strategy
/// is the same construction over qudits.
pub fn gcz_costs(cfg: &GczConfig) -> Result<CostReport, ResourceError> {
    cfg.check()?;
    let (n, d, k, m) = (cfg.n as u64, cfg.nodes, cfg.per_node as u64, cfg.per_qudit);
    let model = TimeModel::with_epsilon(cfg.epsilon);

    let layers = |copies: u64| -> (BTreeMap<usize, u64>, u64) {
        let arities: BTreeMap<usize, u64> = (3..=d).map(|a| (a, copies)).collect();
        let ep = if d >= 2 { copies } else { 0 };
        (arities, ep)
    };
    let (fanout_ghz_arities, fanout_ep) = layers(k);
    let qudits_per_node = k / m as u64;
    let (qudit_ghz_arities, qudit_ep) = layers(qudits_per_node);

    let time = |arities: &BTreeMap<usize, u64>, ep: u64| -> f64 {
        arities.iter().map(|(&a, &c)| c as f64 * model.ghz_time(a)).sum::<f64>() + ep as f64
    };
    let pairwise_ep = n * (n - k) / 2;
    Ok(CostReport {
        pairwise_ep,
        fanout_ghz: fanout_ghz_arities.values().sum(),
        fanout_ep,
        qudit_ghz: qudit_ghz_arities.values().sum(),
        qudit_ep,
        qudit_dim: 1 << m,
        time_pairwise: pairwise_ep as f64,
        time_fanout: time(&fanout_ghz_arities, fanout_ep),
        time_qudit: time(&qudit_ghz_arities, qudit_ep),
        fanout_ghz_arities,
        qudit_ghz_arities,
    })
}

/// Predicted resources of a distributed GMS over `n` single-qubit nodes.
/// `time_units` uses the serial model with the given ε.
pub fn gms_costs(n: usize, strategy: GmsStrategy, epsilon: f64) -> Result<ResourceTally, ResourceError> {
    if n < 2 {
        return Err(ResourceError::TooSmall(format!("a GMS gate needs at least 2 qubits, got {n}")));
    }
    let n64 = n as u64;
    let mut t = ResourceTally::default();
    match strategy {
        GmsStrategy::Pairwise => t.ep = n64 * (n64 - 1),
        GmsStrategy::PairwiseConditional => t.ep = n64 * (n64 - 1) / 2,
        GmsStrategy::Fanout => {
            t.ghz = (3..=n).map(|a| (a, 1)).collect();
            t.ep = 1;
        }
    }
    t.time_units = TimeModel::with_epsilon(epsilon).tally_time(&t);
    Ok(t)
}

/// Time saved by one `(n+1)`-party GHZ fan-out over `n` Bell pairs.
pub fn fanout_gain(n: usize, epsilon: f64) -> f64 {
    n as f64 - epsilon
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn six_qubits_on_three_nodes() {
        let r = gcz_costs(&GczConfig::uniform(3, 2)).unwrap();
        assert_eq!(r.pairwise_ep, 12);
        assert_eq!((r.fanout_ghz, r.fanout_ep), (2, 2));
        assert_eq!(r.fanout_ghz_arities, BTreeMap::from([(3, 2)]));
        assert_eq!((r.qudit_ghz, r.qudit_ep, r.qudit_dim), (1, 1, 4));
        assert_eq!(r.time_fanout, 4.0);
    }

    #[test]
    fn four_single_qubit_nodes() {
        let r = gcz_costs(&GczConfig::uniform(4, 1)).unwrap();
        assert_eq!(r.pairwise_ep, 6);
        assert_eq!(r.fanout_ghz_arities, BTreeMap::from([(3, 1), (4, 1)]));
        assert_eq!(r.fanout_ep, 1);
    }

    #[test]
    fn single_pair_and_single_node() {
        let r = gcz_costs(&GczConfig::uniform(2, 1)).unwrap();
        assert_eq!((r.pairwise_ep, r.fanout_ghz, r.fanout_ep), (1, 0, 1));
        let r = gcz_costs(&GczConfig::uniform(1, 5)).unwrap();
        assert_eq!((r.pairwise_ep, r.fanout_ghz, r.fanout_ep, r.qudit_ghz, r.qudit_ep), (0, 0, 0, 0, 0));
    }

    #[test]
    fn multiple_qudits_per_node() {
        let cfg = GczConfig { n: 16, nodes: 4, per_node: 4, per_qudit: 2, epsilon: 1.0 };
        let r = gcz_costs(&cfg).unwrap();
        assert_eq!((r.qudit_ghz, r.qudit_ep), (16 / 2 - 2 * 4 / 2, 4 / 2));
    }

    #[test]
    fn config_errors() {
        assert!(gcz_costs(&GczConfig { n: 7, nodes: 3, per_node: 2, per_qudit: 2, epsilon: 1.0 }).is_err());
        assert!(gcz_costs(&GczConfig { n: 9, nodes: 3, per_node: 3, per_qudit: 2, epsilon: 1.0 }).is_err());
        assert!(gcz_costs(&GczConfig { n: 0, nodes: 0, per_node: 2, per_qudit: 2, epsilon: 1.0 }).is_err());
    }

    #[test]
    fn gms_predictions() {
        assert_eq!(gms_costs(4, GmsStrategy::Pairwise, 1.0).unwrap().ep, 12);
        assert_eq!(gms_costs(4, GmsStrategy::PairwiseConditional, 1.0).unwrap().ep, 6);
        let f = gms_costs(4, GmsStrategy::Fanout, 1.0).unwrap();
        assert_eq!(f.to_string(), "1 ghz(4), 1 ghz(3), 1 ep");
        assert_eq!(f.time_units, 3.0);
        assert!(f.time_units < 12.0);
        let f3 = gms_costs(3, GmsStrategy::Fanout, 1.0).unwrap();
        assert_eq!(f3.ghz, BTreeMap::from([(3, 1)]));
        assert!(gms_costs(1, GmsStrategy::Fanout, 1.0).is_err());
    }

    #[test]
    fn gain() {
        assert_eq!(fanout_gain(3, 1.0), 2.0);
        assert_eq!(fanout_gain(1, 1.0), 0.0);
        assert_eq!(fanout_gain(5, 1.5), 3.5);
    }

    #[test]
    fn per_arity_override() {
        let mut m = TimeModel::with_epsilon(1.0);
        m.per_arity.insert(4, 2.5);
        let t = gms_costs(4, GmsStrategy::Fanout, 1.0).unwrap();
        assert_eq!(m.tally_time(&t), 2.5 + 1.0 + 1.0);
    }
}
