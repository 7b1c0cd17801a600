//! JSON wire format for [`DistCircuit`].
//!
//! Output is pretty-printed with object keys sorted, so serializing a parsed
//! circuit reproduces the original bytes.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::{Condition, DistCircuit, Instruction, InstructionKind, NodeLayout, Op};
use crate::angle::Angle;
use crate::encoding::QuditEncoding;
use crate::gates::{Gate, GateError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CircuitParseError {
    #[error("parse error at line {line}, column {column}: {message}")]
    Syntax { line: usize, column: usize, message: String },
    #[error("instruction {index}: {source}")]
    Gate { index: usize, source: GateError },
    #[error("instruction {index}: condition references undefined outcome `{symbol}`")]
    UndefinedOutcome { index: usize, symbol: String },
    #[error("instruction {index}: {message}")]
    Malformed { index: usize, message: String },
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawCircuit {
    layout: NodeLayout,
    instructions: Vec<RawInstruction>,
    inputs: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    input_dims: Option<Vec<usize>>,
    outputs: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    encoding: Option<QuditEncoding>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawInstruction {
    kind: InstructionKind,
    #[serde(default)]
    targets: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    gate: Option<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    params: Vec<RawParam>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    condition: Option<RawCondition>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    parties: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    dim: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    symbol: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    from: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    to: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    bits: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    layer: Option<u32>,
}

/// Angles: exact π-multiples as strings (`"-2*pi/3"`), others as numbers.
#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum RawParam {
    Text(String),
    Number(f64),
}

#[derive(Serialize, Deserialize)]
#[serde(untagged, deny_unknown_fields)]
enum RawCondition {
    Xor { xor: Vec<String> },
    SumMod { sum_mod: usize, terms: Vec<String> },
}

impl RawInstruction {
    fn bare(kind: InstructionKind, targets: Vec<String>, layer: Option<u32>) -> Self {
        RawInstruction {
            kind,
            targets,
            gate: None,
            params: vec![],
            condition: None,
            parties: None,
            dim: None,
            symbol: None,
            from: None,
            to: None,
            bits: None,
            layer,
        }
    }
}

fn gate_fields(raw: &mut RawInstruction, gate: &Gate) {
    raw.gate = Some(gate.name());
    raw.params = gate
        .params()
        .into_iter()
        .map(|a| match a {
            Angle::PiMultiple(_) => RawParam::Text(a.to_string()),
            Angle::Radians(x) => RawParam::Number(x),
        })
        .collect();
}

impl From<&Instruction> for RawInstruction {
    fn from(ins: &Instruction) -> Self {
        let mut raw = RawInstruction::bare(ins.op.kind(), ins.op.targets().to_vec(), ins.layer);
        match &ins.op {
            Op::LocalGate { gate, .. } => gate_fields(&mut raw, gate),
            Op::CondGate { gate, condition, .. } => {
                gate_fields(&mut raw, gate);
                raw.condition = Some(match condition {
                    Condition::Xor(s) => RawCondition::Xor { xor: s.clone() },
                    Condition::SumMod { modulus, terms } => {
                        RawCondition::SumMod { sum_mod: *modulus, terms: terms.clone() }
                    }
                });
            }
            Op::CreateBell { parties, .. } | Op::CreateGhz { parties, .. } => {
                raw.parties = Some(parties.clone());
            }
            Op::CreateQuditPair { parties, dim, .. } | Op::CreateQuditGhz { parties, dim, .. } => {
                raw.parties = Some(parties.clone());
                raw.dim = Some(*dim);
            }
            Op::Measure { symbol, .. } => raw.symbol = Some(symbol.clone()),
            Op::ClassicalSend { symbol, from, to, bits } => {
                raw.symbol = Some(symbol.clone());
                raw.from = Some(from.clone());
                raw.to = Some(to.clone());
                raw.bits = Some(*bits);
            }
        }
        raw
    }
}

fn need<T>(field: Option<T>, name: &str, index: usize) -> Result<T, CircuitParseError> {
    field.ok_or_else(|| CircuitParseError::Malformed { index, message: format!("missing `{name}`") })
}

fn convert(index: usize, raw: RawInstruction) -> Result<Instruction, CircuitParseError> {
    let malformed = |message: String| CircuitParseError::Malformed { index, message };

    let gate = |raw: &RawInstruction| -> Result<Gate, CircuitParseError> {
        let name = raw.gate.as_deref().ok_or_else(|| malformed("missing `gate`".into()))?;
        let params = raw
            .params
            .iter()
            .map(|p| match p {
                RawParam::Text(s) => s.parse::<Angle>().map_err(|e| malformed(e.to_string())),
                RawParam::Number(x) => Ok(Angle::Radians(*x)),
            })
            .collect::<Result<Vec<_>, _>>()?;
        Gate::from_name(name, &params).map_err(|source| CircuitParseError::Gate { index, source })
    };

    let op = match raw.kind {
        InstructionKind::LocalGate => Op::LocalGate { gate: gate(&raw)?, targets: raw.targets },
        InstructionKind::CondGate => {
            let g = gate(&raw)?;
            let condition = match need(raw.condition, "condition", index)? {
                RawCondition::Xor { xor } => Condition::Xor(xor),
                RawCondition::SumMod { sum_mod, terms } => {
                    if sum_mod < 2 {
                        return Err(malformed(format!("sum_mod must be at least 2, got {sum_mod}")));
                    }
                    Condition::SumMod { modulus: sum_mod, terms }
                }
            };
            Op::CondGate { gate: g, targets: raw.targets, condition }
        }
        InstructionKind::CreateBell => Op::CreateBell { targets: raw.targets, parties: need(raw.parties, "parties", index)? },
        InstructionKind::CreateGhz => Op::CreateGhz { targets: raw.targets, parties: need(raw.parties, "parties", index)? },
        InstructionKind::CreateQuditPair => Op::CreateQuditPair {
            targets: raw.targets,
            parties: need(raw.parties, "parties", index)?,
            dim: need(raw.dim, "dim", index)?,
        },
        InstructionKind::CreateQuditGhz => Op::CreateQuditGhz {
            targets: raw.targets,
            parties: need(raw.parties, "parties", index)?,
            dim: need(raw.dim, "dim", index)?,
        },
        InstructionKind::Measure => {
            let [target]: [String; 1] = raw
                .targets
                .try_into()
                .map_err(|t: Vec<String>| malformed(format!("Measure takes one target, got {}", t.len())))?;
            Op::Measure { target, symbol: need(raw.symbol, "symbol", index)? }
        }
        InstructionKind::ClassicalSend => Op::ClassicalSend {
            symbol: need(raw.symbol, "symbol", index)?,
            from: need(raw.from, "from", index)?,
            to: need(raw.to, "to", index)?,
            bits: need(raw.bits, "bits", index)?,
        },
    };
    Ok(Instruction { op, layer: raw.layer })
}

impl DistCircuit {
    /// Pretty JSON with sorted keys.
    pub fn to_json(&self) -> String {
        let raw = RawCircuit {
            layout: self.layout.clone(),
            instructions: self.instructions.iter().map(RawInstruction::from).collect(),
            inputs: self.inputs.clone(),
            input_dims: Some(self.input_dims.clone()),
            outputs: self.outputs.clone(),
            encoding: self.encoding.clone(),
        };
        let value = serde_json::to_value(&raw).expect("circuit serializes");
        serde_json::to_string_pretty(&value).expect("value prints")
    }

    pub fn from_json(text: &str) -> Result<DistCircuit, CircuitParseError> {
        let raw: RawCircuit = serde_json::from_str(text).map_err(|e| CircuitParseError::Syntax {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })?;
        let instructions = raw
            .instructions
            .into_iter()
            .enumerate()
            .map(|(i, r)| convert(i, r))
            .collect::<Result<Vec<_>, _>>()?;

        let mut measured: Vec<&str> = Vec::new();
        for (index, ins) in instructions.iter().enumerate() {
            let refs: &[String] = match &ins.op {
                Op::CondGate { condition, .. } => condition.symbols(),
                Op::ClassicalSend { symbol, .. } => std::slice::from_ref(symbol),
                _ => &[],
            };
            if let Some(s) = refs.iter().find(|s| !measured.contains(&s.as_str())) {
                return Err(CircuitParseError::UndefinedOutcome { index, symbol: s.clone() });
            }
            if let Op::Measure { symbol, .. } = &ins.op {
                measured.push(symbol);
            }
        }

        let input_dims = raw.input_dims.unwrap_or_else(|| vec![2; raw.inputs.len()]);
        if input_dims.len() != raw.inputs.len() {
            return Err(CircuitParseError::Syntax {
                line: 0,
                column: 0,
                message: format!("{} input_dims for {} inputs", input_dims.len(), raw.inputs.len()),
            });
        }
        Ok(DistCircuit {
            layout: raw.layout,
            instructions,
            inputs: raw.inputs,
            input_dims,
            outputs: raw.outputs,
            encoding: raw.encoding,
        })
    }
}
