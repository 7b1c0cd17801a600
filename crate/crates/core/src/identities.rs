//! Gate-algebra identities the protocols rely on, checked numerically.

use std::f64::consts::PI;

use num_complex::Complex64 as C64;
use serde::Serialize;

use crate::angle::Angle;
use crate::gates::{conditional, qubit, qudit, sequence_unitary, Gate, PlacedGate};
use crate::qubit::{lms_conditional_form, lms_cnot_form, lms_matrix};
use crate::qudit::qudit_gcz_local_pair;
use crate::unitary::Unitary;
use crate::verify::{gms_by_diagonalization, oracle_gcz, oracle_gms};

pub const IDENTITY_TOL: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IdentityCheck {
    pub name: String,
    pub max_deviation: f64,
    pub tolerance: f64,
    pub passed: bool,
}

fn check(name: &str, max_deviation: f64, tolerance: f64) -> IdentityCheck {
    IdentityCheck { name: name.into(), max_deviation, tolerance, passed: max_deviation < tolerance }
}

const THETAS: [f64; 6] = [0.0, PI / 2.0, PI / 3.0, -PI / 5.0, 1.234, 2.0 * PI - 0.1];

fn c(re: f64) -> C64 {
    C64::new(re, 0.0)
}

fn over_thetas(f: impl Fn(f64) -> f64) -> f64 {
    THETAS.iter().map(|&t| f(t)).fold(0.0, f64::max)
}

fn id(arity: &[usize]) -> Unitary {
    Unitary::identity(arity.to_vec())
}

fn hh() -> Unitary {
    qubit::h().kron(&qubit::h())
}

fn mul(us: &[&Unitary]) -> Unitary {
    us[1..].iter().fold(us[0].clone(), |acc, u| acc.compose(u).expect("matching shapes"))
}

/// Phase polynomial of the GCZ over `q` (one bit per entry).
fn p_direct(q: &[usize]) -> usize {
    let mut p = 0;
    for i in 0..q.len() {
        for j in i + 1..q.len() {
            p ^= q[i] & q[j];
        }
    }
    p
}

/// Same polynomial grouped by consecutive pairs `(q₁q₂)(q₃q₄)…`:
/// intra-pair products plus products of pair parities.
fn p_rewritten(q: &[usize]) -> usize {
    let pairs: Vec<(usize, usize)> = q.chunks(2).map(|c| (c[0], c[1])).collect();
    let mut p = 0;
    for (i, &(a, b)) in pairs.iter().enumerate() {
        p ^= a & b;
        for &(c, d) in &pairs[i + 1..] {
            p ^= (a ^ b) & (c ^ d);
        }
    }
    p
}

fn rewrite_mismatches(n: usize) -> f64 {
    (0..1usize << n)
        .filter(|idx| {
            let q: Vec<usize> = (0..n).map(|i| (idx >> (n - 1 - i)) & 1).collect();
            p_direct(&q) != p_rewritten(&q)
        })
        .count() as f64
}

/// All checks, in a fixed order.
pub fn run_all() -> Vec<IdentityCheck> {
    let tol = IDENTITY_TOL;
    let mut out = Vec::new();

    out.push(check(
        "LMS = CNOT-RZ-CNOT form",
        over_thetas(|t| sequence_unitary(&lms_cnot_form(Angle::Radians(t)), &[2, 2]).max_deviation(&lms_matrix(t))),
        tol,
    ));
    out.push(check(
        "LMS conditional form",
        over_thetas(|t| {
            let direct = mul(&[&hh(), &conditional(&qubit::rz(t), &qubit::rz(-t)), &hh()]);
            let seq = sequence_unitary(&lms_conditional_form(Angle::Radians(t)), &[2, 2]);
            direct.max_deviation(&lms_matrix(t)).max(seq.max_deviation(&lms_matrix(t)))
        }),
        tol,
    ));
    out.push(check(
        "LMS(theta)·LMS(-theta) = I",
        over_thetas(|t| lms_matrix(t).compose(&lms_matrix(-t)).unwrap().max_deviation(&id(&[2, 2]))),
        tol,
    ));
    let sdsd = qubit::s_dag().kron(&qubit::s_dag());
    let cz_from_lms =
        mul(&[&sdsd, &hh(), &lms_matrix(PI / 2.0), &hh()]).scaled(C64::from_polar(1.0, PI / 4.0));
    out.push(check("CZ = Clifford-conjugated LMS(pi/2)", cz_from_lms.max_deviation(&Gate::Cz.unitary()), tol));

    let h4 = qudit::fourier(4);
    out.push(check("H4·H4_dag = I", h4.compose(&h4.adjoint()).unwrap().max_deviation(&id(&[4])), tol));
    out.push(check("X4^4 = I", qudit::shift(4).pow(4).max_deviation(&id(&[4])), tol));
    out.push(check("K4^2 = I", qudit::complement(4).pow(2).max_deviation(&id(&[4])), tol));
    let csum = qudit::csum(4);
    out.push(check("CSUM4·CSUM4_dag = I", csum.compose(&csum.adjoint()).unwrap().max_deviation(&id(&[4, 4])), tol));
    out.push(check("CZ4^4 = I", qudit::cz(4).pow(4).max_deviation(&id(&[4, 4])), tol));
    let i4 = id(&[4]);
    let conj = mul(&[&i4.kron(&h4), &csum, &i4.kron(&h4.adjoint())]);
    out.push(check("CZ4 = H4-conj CSUM4", conj.max_deviation(&qudit::cz(4)), tol));
    out.push(check(
        "H4·X4·H4_dag = Z4",
        mul(&[&h4, &qudit::shift(4), &h4.adjoint()]).max_deviation(&qudit::clock(4)),
        tol,
    ));

    let cz_sq = qudit::cz(4).pow(2);
    let mut sign_dev: f64 = 0.0;
    for j in 0..4 {
        for k in 0..4 {
            let want = if (j * k) % 2 == 1 { -1.0 } else { 1.0 };
            sign_dev = sign_dev.max((cz_sq.matrix()[(4 * j + k, 4 * j + k)] - c(want)).norm());
        }
    }
    sign_dev = sign_dev.max(if cz_sq.is_diagonal(tol) { 0.0 } else { 1.0 });
    out.push(check("(CZ4)^2 diagonal = (-1)^(jk)", sign_dev, tol));

    let x23 = Gate::X23.unitary();
    let mut parity_dev: f64 = 0.0;
    for (qa, qb) in [(0, 0), (0, 1), (1, 0), (1, 1)] {
        let col = 2 * qa + qb;
        let row = (0..4).find(|&r| x23.matrix()[(r, col)].norm() > 0.5).expect("permutation");
        parity_dev = parity_dev.max(if row % 2 == qa ^ qb { 0.0 } else { 1.0 });
    }
    out.push(check("X23 low digit = parity", parity_dev, tol));

    out.push(check("phase polynomial rewrite, 4 qubits", rewrite_mismatches(4), 0.5));
    out.push(check("phase polynomial rewrite, 6 qubits", rewrite_mismatches(6), 0.5));
    out.push(check(
        "encoded pair sequence = GCZ on 4 qubits",
        sequence_unitary(&qudit_gcz_local_pair(), &[4, 4]).max_deviation(&Unitary::new(vec![4, 4], oracle_gcz(4).matrix().clone()).unwrap()),
        tol,
    ));

    let gms_dev = [PI / 5.0, PI / 2.0, PI / 3.0]
        .iter()
        .map(|&t| oracle_gms(&["a", "b", "c", "d"], Angle::Radians(t)).max_deviation(&gms_by_diagonalization(4, t)))
        .fold(0.0, f64::max);
    out.push(check("GMS product form = diagonalized exponential, 4 qubits", gms_dev, 1e-10));

    let mut gcz_dev: f64 = 0.0;
    for n in [2usize, 4] {
        let labels: Vec<String> = (0..n).map(|i| format!("q{i}")).collect();
        let mut ops: Vec<PlacedGate> = Vec::new();
        for q in 0..n {
            ops.push((Gate::H, vec![q]));
        }
        let hn = sequence_unitary(&ops, &vec![2; n]);
        let sd = (0..n - 1).fold(Unitary::identity(vec![2]), |acc, _| acc.compose(&qubit::s_dag()).unwrap());
        let sdn = (1..n).fold(sd.clone(), |acc, _| acc.kron(&sd));
        let rhs = mul(&[&sdn, &hn, &oracle_gms(&labels, Angle::pi_frac(1, 2)), &hn]);
        gcz_dev = gcz_dev.max(oracle_gcz(n).max_deviation_up_to_phase(&rhs));
    }
    out.push(check("GCZ = Clifford-conjugated GMS(pi/2), 2 and 4 qubits", gcz_dev, tol));

    out
}
