//! Named gates used by the protocol builders, and their matrices.

use std::f64::consts::{FRAC_1_SQRT_2, PI};
use std::fmt;

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use thiserror::Error;

use crate::angle::Angle;
use crate::state::MixedRegister;
use crate::unitary::Unitary;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GateError {
    #[error("unknown gate name `{0}`")]
    UnknownGate(String),
    #[error("gate `{name}` expects {expected} parameter(s), got {got}")]
    ParamCount { name: String, expected: usize, got: usize },
}

/// A gate from the compiler's fixed gate set.
///
/// Two-subsystem gates take `[control, target]` in that order. `Controlled`
/// wraps any gate with an extra leading qubit control.
#[derive(Clone, Debug, PartialEq)]
pub enum Gate {
    H,
    X,
    Z,
    SDag,
    Rz(Angle),
    Cz,
    Cnot,
    /// Phase −1 on level `|3⟩` of a ququart.
    P3,
    /// Swap of levels `|2⟩` and `|3⟩`.
    X23,
    /// Shift `|j⟩ → |j+1 mod 4⟩`.
    X4,
    /// `|j⟩ → ω^{−j}|j⟩`, `ω = i`.
    Z4Dag,
    /// Complement `|j⟩ → |−j mod 4⟩`.
    K4,
    /// Quantum Fourier transform over four levels.
    H4,
    H4Dag,
    /// `|i⟩|j⟩ → |i⟩|i+j mod 4⟩`.
    Csum4,
    /// `|i⟩|j⟩ → |i⟩|j−i mod 4⟩`.
    Csum4Dag,
    /// `|j⟩|k⟩ → ω^{jk}|j⟩|k⟩`.
    Cz4,
    Controlled(Box<Gate>),
}

impl Gate {
    pub fn controlled(inner: Gate) -> Gate {
        Gate::Controlled(Box::new(inner))
    }

    pub fn name(&self) -> String {
        match self {
            Gate::H => "H".into(),
            Gate::X => "X".into(),
            Gate::Z => "Z".into(),
            Gate::SDag => "S_dag".into(),
            Gate::Rz(_) => "RZ".into(),
            Gate::Cz => "CZ".into(),
            Gate::Cnot => "CNOT".into(),
            Gate::P3 => "P3".into(),
            Gate::X23 => "X23".into(),
            Gate::X4 => "X4".into(),
            Gate::Z4Dag => "Z4_dag".into(),
            Gate::K4 => "K4".into(),
            Gate::H4 => "H4".into(),
            Gate::H4Dag => "H4_dag".into(),
            Gate::Csum4 => "CSUM4".into(),
            Gate::Csum4Dag => "CSUM4_dag".into(),
            Gate::Cz4 => "CZ4".into(),
            Gate::Controlled(g) => format!("C_{}", g.name()),
        }
    }

    pub fn params(&self) -> Vec<Angle> {
        match self {
            Gate::Rz(a) => vec![*a],
            Gate::Controlled(g) => g.params(),
            _ => vec![],
        }
    }

    /// Inverse of [`Gate::name`] / [`Gate::params`].
    pub fn from_name(name: &str, params: &[Angle]) -> Result<Gate, GateError> {
        if let Some(inner) = name.strip_prefix("C_") {
            return Ok(Gate::controlled(Gate::from_name(inner, params)?));
        }
        let expect = |n: usize| {
            if params.len() == n {
                Ok(())
            } else {
                Err(GateError::ParamCount { name: name.to_string(), expected: n, got: params.len() })
            }
        };
        let g = match name {
            "RZ" => {
                expect(1)?;
                return Ok(Gate::Rz(params[0]));
            }
            "H" => Gate::H,
            "X" => Gate::X,
            "Z" => Gate::Z,
            "S_dag" => Gate::SDag,
            "CZ" => Gate::Cz,
            "CNOT" => Gate::Cnot,
            "P3" => Gate::P3,
            "X23" => Gate::X23,
            "X4" => Gate::X4,
            "Z4_dag" => Gate::Z4Dag,
            "K4" => Gate::K4,
            "H4" => Gate::H4,
            "H4_dag" => Gate::H4Dag,
            "CSUM4" => Gate::Csum4,
            "CSUM4_dag" => Gate::Csum4Dag,
            "CZ4" => Gate::Cz4,
            other => return Err(GateError::UnknownGate(other.to_string())),
        };
        expect(0)?;
        Ok(g)
    }

    /// Dimensions of the subsystems the gate acts on, in target order.
    pub fn arity(&self) -> Vec<usize> {
        match self {
            Gate::H | Gate::X | Gate::Z | Gate::SDag | Gate::Rz(_) => vec![2],
            Gate::Cz | Gate::Cnot => vec![2, 2],
            Gate::P3 | Gate::X23 | Gate::X4 | Gate::Z4Dag | Gate::K4 | Gate::H4 | Gate::H4Dag => vec![4],
            Gate::Csum4 | Gate::Csum4Dag | Gate::Cz4 => vec![4, 4],
            Gate::Controlled(g) => {
                let mut a = vec![2];
                a.extend(g.arity());
                a
            }
        }
    }

    pub fn unitary(&self) -> Unitary {
        match self {
            Gate::H => qubit::h(),
            Gate::X => qubit::x(),
            Gate::Z => qubit::z(),
            Gate::SDag => qubit::s_dag(),
            Gate::Rz(a) => qubit::rz(a.radians()),
            Gate::Cz => controlled(&qubit::z()),
            Gate::Cnot => controlled(&qubit::x()),
            Gate::P3 => qudit::level_phase(4, 3, C64::new(-1.0, 0.0)),
            Gate::X23 => qudit::level_swap(4, 2, 3),
            Gate::X4 => qudit::shift(4),
            Gate::Z4Dag => qudit::clock(4).adjoint(),
            Gate::K4 => qudit::complement(4),
            Gate::H4 => qudit::fourier(4),
            Gate::H4Dag => qudit::fourier(4).adjoint(),
            Gate::Csum4 => qudit::csum(4),
            Gate::Csum4Dag => qudit::csum(4).adjoint(),
            Gate::Cz4 => qudit::cz(4),
            Gate::Controlled(g) => controlled(&g.unitary()),
        }
    }
}

impl fmt::Display for Gate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let params = self.params();
        if params.is_empty() {
            write!(f, "{}", self.name())
        } else {
            let p: Vec<String> = params.iter().map(|a| a.to_string()).collect();
            write!(f, "{}({})", self.name(), p.join(", "))
        }
    }
}

/// `|0⟩⟨0| ⊗ I + |1⟩⟨1| ⊗ U` with a qubit control in front.
pub fn controlled(u: &Unitary) -> Unitary {
    let d = u.dim();
    let mut m = DMatrix::<C64>::identity(2 * d, 2 * d);
    m.view_mut((d, d), (d, d)).copy_from(u.matrix());
    let mut arity = vec![2];
    arity.extend_from_slice(u.arity());
    Unitary::from_parts(arity, m).expect("controlled shape")
}

/// The conditional operation `|0⟩⟨0| ⊗ U₀ + |1⟩⟨1| ⊗ U₁`.
pub fn conditional(u0: &Unitary, u1: &Unitary) -> Unitary {
    assert_eq!(u0.arity(), u1.arity());
    let d = u0.dim();
    let mut m = DMatrix::<C64>::zeros(2 * d, 2 * d);
    m.view_mut((0, 0), (d, d)).copy_from(u0.matrix());
    m.view_mut((d, d), (d, d)).copy_from(u1.matrix());
    let mut arity = vec![2];
    arity.extend_from_slice(u0.arity());
    Unitary::from_parts(arity, m).expect("conditional shape")
}

pub mod qubit {
    use super::*;

    fn m2(e: [C64; 4]) -> Unitary {
        Unitary::new(vec![2], DMatrix::from_row_slice(2, 2, &e)).expect("qubit gate is unitary")
    }

    const O: C64 = C64::new(0.0, 0.0);
    const I1: C64 = C64::new(1.0, 0.0);

    pub fn h() -> Unitary {
        let s = C64::new(FRAC_1_SQRT_2, 0.0);
        m2([s, s, s, -s])
    }

    pub fn x() -> Unitary {
        m2([O, I1, I1, O])
    }

    pub fn z() -> Unitary {
        m2([I1, O, O, -I1])
    }

    pub fn s_dag() -> Unitary {
        m2([I1, O, O, C64::new(0.0, -1.0)])
    }

    /// `diag(e^{−iθ/2}, e^{iθ/2})`.
    pub fn rz(theta: f64) -> Unitary {
        m2([C64::from_polar(1.0, -theta / 2.0), O, O, C64::from_polar(1.0, theta / 2.0)])
    }
}

/// Qudit gates for arbitrary dimension `d`.
pub mod qudit {
    use super::*;

    /// Primitive `d`-th root of unity `e^{2πi/d}`.
    pub fn omega(d: usize) -> C64 {
        C64::from_polar(1.0, 2.0 * PI / d as f64)
    }

    /// `ω^k` with the exponent reduced mod `d` first, so that exact powers
    /// such as `i² = −1` carry no accumulated rounding.
    pub fn omega_pow(d: usize, k: usize) -> C64 {
        let k = k % d;
        match (4 * k) % d {
            0 => match (4 * k) / d {
                0 => C64::new(1.0, 0.0),
                1 => C64::new(0.0, 1.0),
                2 => C64::new(-1.0, 0.0),
                _ => C64::new(0.0, -1.0),
            },
            _ => C64::from_polar(1.0, 2.0 * PI * k as f64 / d as f64),
        }
    }

    pub fn shift(d: usize) -> Unitary {
        Unitary::permutation(vec![d], |j| (j + 1) % d).expect("shift")
    }

    /// `Z|j⟩ = ω^j|j⟩`.
    pub fn clock(d: usize) -> Unitary {
        let diag: Vec<C64> = (0..d).map(|j| omega_pow(d, j)).collect();
        Unitary::diagonal(vec![d], &diag).expect("clock")
    }

    pub fn complement(d: usize) -> Unitary {
        Unitary::permutation(vec![d], |j| (d - j) % d).expect("complement")
    }

    pub fn level_swap(d: usize, a: usize, b: usize) -> Unitary {
        Unitary::permutation(vec![d], |j| if j == a { b } else if j == b { a } else { j }).expect("level swap")
    }

    pub fn level_phase(d: usize, level: usize, phase: C64) -> Unitary {
        let diag: Vec<C64> = (0..d).map(|j| if j == level { phase } else { C64::new(1.0, 0.0) }).collect();
        Unitary::diagonal(vec![d], &diag).expect("level phase")
    }

    /// `F|j⟩ = d^{−1/2} Σₖ ω^{jk}|k⟩`.
    pub fn fourier(d: usize) -> Unitary {
        let s = 1.0 / (d as f64).sqrt();
        let m = DMatrix::from_fn(d, d, |k, j| omega_pow(d, j * k) * s);
        Unitary::new(vec![d], m).expect("fourier")
    }

    /// `|i⟩|j⟩ → |i⟩|i+j mod d⟩`.
    pub fn csum(d: usize) -> Unitary {
        Unitary::permutation(vec![d, d], |idx| {
            let (i, j) = (idx / d, idx % d);
            i * d + (i + j) % d
        })
        .expect("csum")
    }

    /// `|j⟩|k⟩ → ω^{jk}|j⟩|k⟩`.
    pub fn cz(d: usize) -> Unitary {
        let diag: Vec<C64> = (0..d * d).map(|idx| omega_pow(d, (idx / d) * (idx % d))).collect();
        Unitary::diagonal(vec![d, d], &diag).expect("cz")
    }
}

/// A gate placed on subsystems by position in a local register.
pub type PlacedGate = (Gate, Vec<usize>);

/// Multiplies out a gate sequence (first element applied first) by pushing
/// each basis vector through the statevector simulator.
pub fn sequence_unitary(ops: &[PlacedGate], dims: &[usize]) -> Unitary {
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
        for (gate, pos) in ops {
            let targets: Vec<&str> = pos.iter().map(|&p| labels[p].as_str()).collect();
            s.apply(&gate.unitary(), &targets).expect("sequence gate placement");
        }
        for (row, a) in s.amps().iter().enumerate() {
            m[(row, col)] = *a;
        }
    }
    Unitary::from_parts(dims.to_vec(), m).expect("sequence shape")
}
