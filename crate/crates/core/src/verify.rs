//! Oracles and branch-exhaustive equivalence checking.

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::angle::Angle;
use crate::encoding::EncodingError;
use crate::gates::{qubit, qudit, Gate};
use crate::ir::{tally, DistCircuit, ResourceTally};
use crate::qubit::{controlled_form, lms_matrix};
use crate::sim::{simulate, SimConfig, SimError};
use crate::state::{fidelity_up_to_phase, MixedRegister, StateError};
use crate::unitary::Unitary;

pub const DEFAULT_THRESHOLD: f64 = 1.0 - 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum VerifyError {
    #[error(transparent)]
    Sim(#[from] SimError),
    #[error(transparent)]
    State(#[from] StateError),
    #[error(transparent)]
    Encoding(#[from] EncodingError),
    #[error("oracle: {0}")]
    Oracle(String),
}

#[derive(Clone, Debug, PartialEq)]
pub enum OracleKind {
    Gms(Angle),
    Gcz,
    /// `CSUM₄` from the first label to each of the others.
    Csum4,
    /// Same action as [`OracleKind::Csum4`]; kept as a separate name for
    /// the multitarget protocol.
    Csum4Multi,
    /// `(CZ₄)ᵖ` between the first label and each of the others.
    Cz4Pow(u32),
    /// Controlled single-qubit gate from the first label to each other one.
    FanOut(Gate),
    /// An arbitrary unitary on all labels, in order.
    Custom(Unitary),
}

#[derive(Clone, Debug, PartialEq)]
pub struct OracleSpec {
    pub kind: OracleKind,
    pub labels: Vec<String>,
}

impl OracleSpec {
    pub fn new<S: Into<String>>(kind: OracleKind, labels: impl IntoIterator<Item = S>) -> Result<Self, VerifyError> {
        let labels: Vec<String> = labels.into_iter().map(Into::into).collect();
        for (i, l) in labels.iter().enumerate() {
            if labels[..i].contains(l) {
                return Err(VerifyError::Oracle(format!("label `{l}` repeated")));
            }
        }
        let min = match kind {
            OracleKind::Custom(_) => 1,
            _ => 2,
        };
        if labels.len() < min {
            return Err(VerifyError::Oracle(format!("{} label(s) given, at least {min} needed", labels.len())));
        }
        if let OracleKind::Custom(u) = &kind {
            if u.arity().len() != labels.len() {
                return Err(VerifyError::Oracle("custom unitary arity does not match labels".into()));
            }
        }
        Ok(OracleSpec { kind, labels })
    }

    /// The oracle as a product of commuting or ordered local factors, first
    /// factor applied first.
    pub fn factors(&self) -> Vec<(Unitary, Vec<String>)> {
        let l = &self.labels;
        let pairs = || (0..l.len()).flat_map(move |i| (i + 1..l.len()).map(move |j| vec![l[i].clone(), l[j].clone()]));
        let star = |u: Unitary| -> Vec<(Unitary, Vec<String>)> {
            l[1..].iter().map(|t| (u.clone(), vec![l[0].clone(), t.clone()])).collect()
        };
        match &self.kind {
            OracleKind::Gms(theta) => {
                let u = lms_matrix(theta.radians());
                pairs().map(|p| (u.clone(), p)).collect()
            }
            OracleKind::Gcz => pairs().map(|p| (Gate::Cz.unitary(), p)).collect(),
            OracleKind::Csum4 | OracleKind::Csum4Multi => star(qudit::csum(4)),
            OracleKind::Cz4Pow(p) => star(qudit::cz(4).pow(*p)),
            OracleKind::FanOut(g) => {
                let cg = controlled_form(g).map(|g| g.unitary()).unwrap_or_else(|_| crate::gates::controlled(&g.unitary()));
                star(cg)
            }
            OracleKind::Custom(u) => vec![(u.clone(), l.clone())],
        }
    }

    /// Subsystem dimension per label.
    pub fn dims(&self) -> Vec<usize> {
        match &self.kind {
            OracleKind::Csum4 | OracleKind::Csum4Multi | OracleKind::Cz4Pow(_) => vec![4; self.labels.len()],
            OracleKind::Custom(u) => u.arity().to_vec(),
            _ => vec![2; self.labels.len()],
        }
    }

    pub fn apply(&self, state: &MixedRegister) -> Result<MixedRegister, StateError> {
        let mut s = state.clone();
        for (u, targets) in self.factors() {
            s.apply(&u, &targets)?;
        }
        Ok(s)
    }

    /// Full matrix over `labels` in order.
    pub fn unitary(&self) -> Unitary {
        let dims = self.dims();
        let index: std::collections::BTreeMap<&str, usize> =
            self.labels.iter().enumerate().map(|(i, l)| (l.as_str(), i)).collect();
        let ops: Vec<(Unitary, Vec<usize>)> = self
            .factors()
            .into_iter()
            .map(|(u, ts)| (u, ts.iter().map(|t| index[t.as_str()]).collect()))
            .collect();
        placed_unitary(&ops, &dims)
    }
}

/// Matrix of a sequence of unitaries placed on subsystem positions.
pub fn placed_unitary(ops: &[(Unitary, Vec<usize>)], dims: &[usize]) -> Unitary {
    let labels: Vec<String> = (0..dims.len()).map(|i| format!("s{i}")).collect();
    let total: usize = dims.iter().product();
    let mut m = DMatrix::<C64>::zeros(total, total);
    for col in 0..total {
        let mut digits = vec![0; dims.len()];
        let mut rem = col;
        for i in (0..dims.len()).rev() {
            digits[i] = rem % dims[i];
            rem /= dims[i];
        }
        let mut s = MixedRegister::basis(labels.clone(), dims.to_vec(), &digits).expect("basis");
        for (u, pos) in ops {
            let t: Vec<&str> = pos.iter().map(|&p| labels[p].as_str()).collect();
            s.apply(u, &t).expect("placement");
        }
        for (row, a) in s.amps().iter().enumerate() {
            m[(row, col)] = *a;
        }
    }
    Unitary::new(dims.to_vec(), m).expect("product of unitaries")
}

/// `∏_{i<j} exp(−i(θ/2) X_i X_j)` on `labels.len()` qubits.
pub fn oracle_gms<S: AsRef<str>>(labels: &[S], theta: Angle) -> Unitary {
    OracleSpec { kind: OracleKind::Gms(theta), labels: labels.iter().map(|s| s.as_ref().to_string()).collect() }.unitary()
}

/// `exp(−i(θ/2) Σ_{i<j} X_i X_j)` computed in the Hadamard eigenbasis:
/// `H^{⊗n} · diag(e^{−i(θ/2) Σ z_i z_j}) · H^{⊗n}` with `z = ±1`.
pub fn gms_by_diagonalization(n: usize, theta: f64) -> Unitary {
    let dim = 1 << n;
    let phases: Vec<C64> = (0..dim)
        .map(|idx| {
            let z: Vec<f64> = (0..n).map(|q| if (idx >> (n - 1 - q)) & 1 == 1 { -1.0 } else { 1.0 }).collect();
            let mut s = 0.0;
            for i in 0..n {
                for j in i + 1..n {
                    s += z[i] * z[j];
                }
            }
            C64::from_polar(1.0, -theta / 2.0 * s)
        })
        .collect();
    let diag = Unitary::diagonal(vec![2; n], &phases).expect("diagonal phases");
    let h = (1..n).fold(qubit::h(), |acc, _| acc.kron(&qubit::h()));
    h.compose(&diag).and_then(|x| x.compose(&h)).expect("same shape")
}

/// Diagonal `(−1)^{Σ_{i<j} q_i q_j}`.
pub fn oracle_gcz(n: usize) -> Unitary {
    let diag: Vec<C64> = (0..1usize << n)
        .map(|idx| {
            let ones = idx.count_ones() as usize;
            // Σ_{i<j} q_i q_j counts pairs of ones.
            if (ones * ones.saturating_sub(1) / 2) % 2 == 1 {
                C64::new(-1.0, 0.0)
            } else {
                C64::new(1.0, 0.0)
            }
        })
        .collect();
    Unitary::diagonal(vec![2; n], &diag).expect("signs")
}

/// Every computational basis state over `labels`.
pub fn basis_inputs<S: AsRef<str>>(labels: &[S], dims: &[usize]) -> Vec<MixedRegister> {
    let total: usize = dims.iter().product();
    let names: Vec<String> = labels.iter().map(|s| s.as_ref().to_string()).collect();
    (0..total)
        .map(|mut idx| {
            let mut digits = vec![0; dims.len()];
            for i in (0..dims.len()).rev() {
                digits[i] = idx % dims[i];
                idx /= dims[i];
            }
            MixedRegister::basis(names.clone(), dims.to_vec(), &digits).expect("basis input")
        })
        .collect()
}

/// Normalized complex Gaussian vectors from a ChaCha generator.
pub fn random_inputs<S: AsRef<str>>(labels: &[S], dims: &[usize], count: usize, seed: u64) -> Vec<MixedRegister> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let total: usize = dims.iter().product();
    let names: Vec<String> = labels.iter().map(|s| s.as_ref().to_string()).collect();
    (0..count)
        .map(|_| {
            let amps: Vec<C64> = (0..total)
                .map(|_| {
                    let re: f64 = StandardNormal.sample(&mut rng);
                    let im: f64 = StandardNormal.sample(&mut rng);
                    C64::new(re, im)
                })
                .collect();
            MixedRegister::normalized(names.clone(), dims.to_vec(), amps).expect("nonzero gaussian vector")
        })
        .collect()
}

#[derive(Clone, Debug)]
pub struct VerifyOptions {
    pub threshold: f64,
    pub sim: SimConfig,
    /// Recorded in the report when the inputs came from [`random_inputs`].
    pub seed: Option<u64>,
    pub parallel: bool,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions { threshold: DEFAULT_THRESHOLD, sim: SimConfig::default(), seed: None, parallel: true }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Failure {
    pub input: usize,
    pub outcomes: Vec<(String, usize)>,
    pub fidelity: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VerificationReport {
    pub inputs: usize,
    /// Measurement branches covered, counting merged ones individually.
    pub branches: u64,
    /// Distinct branch records actually compared.
    pub branch_records: usize,
    pub min_fidelity: f64,
    /// Smallest fidelity between two branches of the same input.
    pub min_branch_agreement: f64,
    /// Largest deviation of an input's total branch probability from 1.
    pub max_probability_defect: f64,
    pub threshold: f64,
    pub passed: bool,
    pub seed: Option<u64>,
    pub failures: Vec<Failure>,
    pub resource_tally: ResourceTally,
}

impl VerificationReport {
    pub fn to_json(&self) -> String {
        let v = serde_json::to_value(self).expect("report serializes");
        serde_json::to_string_pretty(&v).expect("value prints")
    }
}

struct InputResult {
    branches: u64,
    records: usize,
    min_fidelity: f64,
    agreement: f64,
    defect: f64,
    failures: Vec<Failure>,
}

fn check_input(
    circuit: &DistCircuit,
    oracle: &OracleSpec,
    index: usize,
    input: &MixedRegister,
    opts: &VerifyOptions,
) -> Result<InputResult, VerifyError> {
    let expected = oracle.apply(input)?;
    let run_input = match &circuit.encoding {
        Some(enc) => enc.encode(input)?,
        None => input.clone(),
    };
    let branches = simulate(circuit, &run_input, &opts.sim)?;
    let mut out = InputResult {
        branches: 0,
        records: branches.len(),
        min_fidelity: 1.0,
        agreement: 1.0,
        defect: 0.0,
        failures: vec![],
    };
    let mut first: Option<MixedRegister> = None;
    let mut total_p = 0.0;
    for b in branches {
        let state = match &circuit.encoding {
            Some(enc) => enc.decode(&b.state)?,
            None => b.state,
        };
        let state = state.permuted(expected.labels())?;
        let f = fidelity_up_to_phase(&state, &expected)?.min(1.0);
        out.min_fidelity = out.min_fidelity.min(f);
        if f < opts.threshold {
            out.failures.push(Failure { input: index, outcomes: b.outcomes, fidelity: f });
        }
        match &first {
            None => first = Some(state),
            Some(s0) => out.agreement = out.agreement.min(fidelity_up_to_phase(s0, &state)?.min(1.0)),
        }
        out.branches += b.represented;
        total_p += b.probability;
    }
    out.defect = (total_p - 1.0).abs();
    Ok(out)
}

/// Runs every input through the circuit, compares every branch's final
/// state with the oracle applied to that input, and summarizes.
///
/// For circuits with a qudit encoding the inputs are over the encoded
/// qubits; they are encoded before and decoded after simulation.
pub fn verify(
    circuit: &DistCircuit,
    oracle: &OracleSpec,
    inputs: &[MixedRegister],
    opts: &VerifyOptions,
) -> Result<VerificationReport, VerifyError> {
    let run = |(i, s): (usize, &MixedRegister)| check_input(circuit, oracle, i, s, opts);
    let results: Vec<InputResult> = if opts.parallel {
        inputs.par_iter().enumerate().map(run).collect::<Result<_, _>>()?
    } else {
        inputs.iter().enumerate().map(run).collect::<Result<_, _>>()?
    };
    let mut report = VerificationReport {
        inputs: inputs.len(),
        branches: 0,
        branch_records: 0,
        min_fidelity: 1.0,
        min_branch_agreement: 1.0,
        max_probability_defect: 0.0,
        threshold: opts.threshold,
        passed: false,
        seed: opts.seed,
        failures: vec![],
        resource_tally: tally(circuit),
    };
    for r in results {
        report.branches += r.branches;
        report.branch_records += r.records;
        report.min_fidelity = report.min_fidelity.min(r.min_fidelity);
        report.min_branch_agreement = report.min_branch_agreement.min(r.agreement);
        report.max_probability_defect = report.max_probability_defect.max(r.defect);
        report.failures.extend(r.failures);
    }
    report.failures.sort_by(|a, b| (a.input, &a.outcomes).cmp(&(b.input, &b.outcomes)));
    report.passed = inputs.is_empty() || report.min_fidelity >= opts.threshold;
    Ok(report)
}

/// Logical input labels and dimensions of a circuit: the encoded qubits
/// for qudit-encoded circuits, the declared inputs otherwise.
pub fn logical_inputs(circuit: &DistCircuit) -> (Vec<String>, Vec<usize>) {
    match &circuit.encoding {
        Some(enc) => {
            let q = enc.qubits();
            let n = q.len();
            (q, vec![2; n])
        }
        None => (circuit.inputs.clone(), circuit.input_dims.clone()),
    }
}

/// All basis inputs plus `random` seeded random inputs over the circuit's
/// logical inputs.
pub fn standard_inputs(circuit: &DistCircuit, random: usize, seed: u64) -> Vec<MixedRegister> {
    let (labels, dims) = logical_inputs(circuit);
    let mut v = basis_inputs(&labels, &dims);
    v.extend(random_inputs(&labels, &dims, random, seed));
    v
}
