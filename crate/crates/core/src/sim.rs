//! Branch-exhaustive execution of a [`DistCircuit`].
//!
//! Every measurement splits each branch into one child per outcome. Gates
//! and resource creations act on all branches alike; conditioned gates use
//! each branch's own outcome values.
//!
//! With `merge_equivalent` set, branches are merged just before each
//! measurement when they agree on every outcome still referenced by a later
//! condition and their states are equal up to a global phase. Such branches
//! evolve identically from then on, so merging changes no final state; it
//! only keeps circuits with many teleported gates tractable. Merged records
//! keep the first outcome list and add up probabilities and
//! [`BranchResult::represented`].

use std::collections::{BTreeMap, BTreeSet};

use num_complex::Complex64 as C64;
use rayon::prelude::*;
use thiserror::Error;

use crate::ir::{DistCircuit, Op};
use crate::state::{BranchResult, MixedRegister, StateError};
use crate::unitary::Unitary;

/// Default cap on the dimension of a branch's register.
pub const DEFAULT_MAX_DIM: usize = 1 << 14;

/// Entrywise tolerance for treating two branch states as the same ray.
const MERGE_TOL: f64 = 1e-11;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SimError {
    #[error(transparent)]
    State(#[from] StateError),
    #[error("instruction {index}: register dimension {needed} exceeds the cap of {cap}")]
    DimensionCap { index: usize, needed: usize, cap: usize },
    #[error("instruction {index}: outcome `{symbol}` has no value")]
    MissingOutcome { index: usize, symbol: String },
    #[error("input register does not match the circuit inputs: {0}")]
    Input(String),
    #[error("subsystems left live at the end besides the outputs: {0:?}")]
    Leftover(Vec<String>),
}

#[derive(Clone, Debug, PartialEq)]
pub struct SimConfig {
    pub max_dim: usize,
    pub merge_equivalent: bool,
}

impl Default for SimConfig {
    fn default() -> Self {
        SimConfig { max_dim: DEFAULT_MAX_DIM, merge_equivalent: true }
    }
}

#[derive(Clone)]
struct Branch {
    outcomes: Vec<(String, usize)>,
    values: BTreeMap<String, usize>,
    probability: f64,
    state: MixedRegister,
    represented: u64,
}

fn resource_state(targets: &[String], dim: usize) -> MixedRegister {
    let n = targets.len();
    let total = dim.pow(n as u32);
    let mut amps = vec![C64::new(0.0, 0.0); total];
    // |k…k⟩ has index k·(d^{n−1} + … + 1).
    let step: usize = (0..n).map(|i| dim.pow(i as u32)).sum();
    let a = C64::new(1.0 / (dim as f64).sqrt(), 0.0);
    for k in 0..dim {
        amps[k * step] = a;
    }
    MixedRegister::new(targets.iter().cloned(), vec![dim; n], amps).expect("resource state is normalized")
}

/// True if `b = e^{iφ} a` entrywise within [`MERGE_TOL`].
fn same_ray(a: &MixedRegister, b: &MixedRegister) -> bool {
    if a.labels() != b.labels() {
        return false;
    }
    let (aa, bb) = (a.amps(), b.amps());
    let Some((i, _)) = aa
        .iter()
        .enumerate()
        .max_by(|x, y| x.1.norm_sqr().total_cmp(&y.1.norm_sqr()))
    else {
        return true;
    };
    if bb[i].norm() < 1e-9 {
        return false;
    }
    let phase = bb[i] / aa[i];
    let phase = phase / phase.norm();
    aa.iter().zip(bb).all(|(x, y)| (x * phase - y).norm() < MERGE_TOL)
}

fn merge(frontier: Vec<Branch>, live: &BTreeSet<&str>) -> Vec<Branch> {
    let mut groups: BTreeMap<Vec<(String, usize)>, Vec<Branch>> = BTreeMap::new();
    let mut order: Vec<Vec<(String, usize)>> = Vec::new();
    for b in frontier {
        let key: Vec<(String, usize)> = b
            .values
            .iter()
            .filter(|(k, _)| live.contains(k.as_str()))
            .map(|(k, v)| (k.clone(), *v))
            .collect();
        let reps = groups.entry(key.clone()).or_insert_with(|| {
            order.push(key);
            Vec::new()
        });
        match reps.iter_mut().find(|r| same_ray(&r.state, &b.state)) {
            Some(r) => {
                r.probability += b.probability;
                r.represented += b.represented;
            }
            None => reps.push(b),
        }
    }
    let mut out: Vec<Branch> = order.into_iter().flat_map(|k| groups.remove(&k).unwrap_or_default()).collect();
    out.sort_by(|a, b| a.outcomes.cmp(&b.outcomes));
    out
}

/// Symbols read by conditions at or after instruction `from`.
fn live_symbols(circuit: &DistCircuit, from: usize) -> BTreeSet<&str> {
    circuit.instructions[from..]
        .iter()
        .filter_map(|i| match &i.op {
            Op::CondGate { condition, .. } => Some(condition.symbols()),
            _ => None,
        })
        .flatten()
        .map(String::as_str)
        .collect()
}

fn check_input(circuit: &DistCircuit, input: &MixedRegister) -> Result<(), SimError> {
    let want: BTreeMap<&str, usize> =
        circuit.inputs.iter().map(String::as_str).zip(circuit.input_dims.iter().copied()).collect();
    let got: BTreeMap<&str, usize> = input.labels().iter().map(String::as_str).zip(input.dims().iter().copied()).collect();
    if want != got {
        return Err(SimError::Input(format!("expected {want:?}, got {got:?}")));
    }
    Ok(())
}

/// Runs the first `upto` instructions and returns every branch with its
/// full register, live subsystems in creation order.
pub fn run_prefix(
    circuit: &DistCircuit,
    input: &MixedRegister,
    upto: usize,
    cfg: &SimConfig,
) -> Result<Vec<BranchResult>, SimError> {
    check_input(circuit, input)?;
    if input.total_dim() > cfg.max_dim {
        return Err(SimError::DimensionCap { index: 0, needed: input.total_dim(), cap: cfg.max_dim });
    }
    let mut frontier = vec![Branch {
        outcomes: vec![],
        values: BTreeMap::new(),
        probability: 1.0,
        state: input.clone(),
        represented: 1,
    }];

    for (index, ins) in circuit.instructions[..upto].iter().enumerate() {
        match &ins.op {
            Op::LocalGate { gate, targets } => {
                let u = gate.unitary();
                frontier.par_iter_mut().try_for_each(|b| b.state.apply(&u, targets))?;
            }
            Op::CondGate { gate, targets, condition } => {
                let u = gate.unitary();
                let mut powers: BTreeMap<usize, Unitary> = BTreeMap::new();
                for b in &frontier {
                    let e = condition
                        .exponent(|s| b.values.get(s).copied())
                        .ok_or_else(|| SimError::MissingOutcome {
                            index,
                            symbol: condition.symbols().iter().find(|s| !b.values.contains_key(*s)).cloned().unwrap_or_default(),
                        })?;
                    powers.entry(e).or_insert_with(|| u.pow(e as u32));
                }
                frontier.par_iter_mut().try_for_each(|b| {
                    let e = condition.exponent(|s| b.values.get(s).copied()).expect("checked above");
                    if e == 0 {
                        Ok(())
                    } else {
                        b.state.apply(&powers[&e], targets)
                    }
                })?;
            }
            op @ (Op::CreateBell { .. } | Op::CreateGhz { .. } | Op::CreateQuditPair { .. } | Op::CreateQuditGhz { .. }) => {
                let (targets, _, dim) = op.resource().expect("resource op");
                let extra = resource_state(targets, dim);
                let needed = frontier[0].state.total_dim().saturating_mul(extra.total_dim());
                if needed > cfg.max_dim {
                    return Err(SimError::DimensionCap { index, needed, cap: cfg.max_dim });
                }
                frontier.par_iter_mut().try_for_each(|b| -> Result<(), StateError> {
                    b.state = b.state.tensor(&extra)?;
                    Ok(())
                })?;
            }
            Op::Measure { target, symbol } => {
                if cfg.merge_equivalent {
                    frontier = merge(frontier, &live_symbols(circuit, index));
                }
                let children: Vec<Vec<Branch>> = frontier
                    .par_iter()
                    .map(|b| -> Result<Vec<Branch>, StateError> {
                        Ok(b.state
                            .measure_enumerate(target)?
                            .into_iter()
                            .filter_map(|r| {
                                let k = r.outcomes[0].1;
                                let p = b.probability * r.probability;
                                if p < crate::state::PRUNE_TOL {
                                    return None;
                                }
                                let mut outcomes = b.outcomes.clone();
                                outcomes.push((symbol.clone(), k));
                                let mut values = b.values.clone();
                                values.insert(symbol.clone(), k);
                                Some(Branch { outcomes, values, probability: p, state: r.state, represented: b.represented })
                            })
                            .collect())
                    })
                    .collect::<Result<_, _>>()?;
                frontier = children.into_iter().flatten().collect();
            }
            Op::ClassicalSend { .. } => {}
        }
    }
    if cfg.merge_equivalent {
        frontier = merge(frontier, &live_symbols(circuit, upto));
    }
    Ok(frontier
        .into_iter()
        .map(|b| BranchResult { outcomes: b.outcomes, probability: b.probability, state: b.state, represented: b.represented })
        .collect())
}

/// Runs the whole circuit. Each branch state holds exactly the declared
/// outputs, in declared order.
pub fn simulate(circuit: &DistCircuit, input: &MixedRegister, cfg: &SimConfig) -> Result<Vec<BranchResult>, SimError> {
    let branches = run_prefix(circuit, input, circuit.instructions.len(), cfg)?;
    branches
        .into_iter()
        .map(|mut b| {
            let extra: Vec<String> =
                b.state.labels().iter().filter(|l| !circuit.outputs.contains(l)).cloned().collect();
            if !extra.is_empty() {
                return Err(SimError::Leftover(extra));
            }
            b.state = b.state.permuted(&circuit.outputs)?;
            Ok(b)
        })
        .collect()
}
