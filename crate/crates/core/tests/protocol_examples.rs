//! Behaviour of the protocol builders on specific inputs, checked branch by
//! branch with merging turned off.

mod common;

use common::{grouped, labels, SEED};
use dqc_core::encoding::QuditEncoding;
use dqc_core::gates::{sequence_unitary, Gate};
use dqc_core::ir::{Op, ResourceTally};
use dqc_core::qubit::{build_dcontrol_u, build_fanout, Partition};
use dqc_core::qudit::{build_dcsum4, build_dcsum4_multitarget, build_dcz4_pow, build_qudit_gcz, ReceiverOp};
use dqc_core::sim::{run_prefix, simulate, SimConfig};
use dqc_core::state::fidelity_up_to_phase;
use dqc_core::verify::{random_inputs, verify, OracleKind, OracleSpec, VerifyOptions, DEFAULT_THRESHOLD};
use dqc_core::{tally, BranchResult, DistCircuit, MixedRegister, NodeLayout};
use num_complex::Complex64 as C64;
use std::f64::consts::FRAC_1_SQRT_2;

fn unmerged() -> SimConfig {
    SimConfig { merge_equivalent: false, ..SimConfig::default() }
}

fn all_branches(c: &DistCircuit, input: &MixedRegister) -> Vec<BranchResult> {
    let b = simulate(c, input, &unmerged()).unwrap();
    let total: f64 = b.iter().map(|x| x.probability).sum();
    assert!((total - 1.0).abs() < 1e-12, "branch probabilities sum to {total}");
    b
}

fn assert_every_branch(branches: &[BranchResult], expected: &MixedRegister) {
    for b in branches {
        let f = fidelity_up_to_phase(&b.state, expected).unwrap();
        assert!(f > 1.0 - 1e-12, "branch {:?} has fidelity {f}", b.outcomes);
    }
}

/// Every branch equals `phase · expected` exactly, not just up to phase.
fn assert_every_branch_exact(branches: &[BranchResult], expected: &MixedRegister, phase: C64) {
    for b in branches {
        let overlap = expected.inner(&b.state).unwrap();
        assert!((overlap - phase).norm() < 1e-10, "branch {:?}: overlap {overlap}", b.outcomes);
    }
}

fn qubits(names: &[&str], bits: &str) -> MixedRegister {
    MixedRegister::qubits_from_bits(names.iter().copied(), bits).unwrap()
}

fn ququarts(names: &[&str], digits: &[usize]) -> MixedRegister {
    MixedRegister::basis(names.iter().copied(), vec![4; names.len()], digits).unwrap()
}

fn superpose(a: &MixedRegister, b: &MixedRegister) -> MixedRegister {
    let amps: Vec<C64> = a.amps().iter().zip(b.amps()).map(|(x, y)| (x + y) * FRAC_1_SQRT_2).collect();
    MixedRegister::new(a.labels().to_vec(), a.dims().to_vec(), amps).unwrap()
}

fn two_nodes() -> NodeLayout {
    NodeLayout::uniform(&labels(2), 2, 1, 2)
}

fn qudit_nodes(n: usize) -> NodeLayout {
    let q: Vec<String> = (1..=n).map(|i| format!("Q{i}")).collect();
    NodeLayout::uniform(&q, n, 1, 2)
}

#[test]
fn dcnot_on_one_zero_gives_one_one_everywhere() {
    let c = build_dcontrol_u("q1", "q2", &Gate::X, &two_nodes()).unwrap();
    let b = all_branches(&c, &qubits(&["q1", "q2"], "10"));
    assert_eq!(b.len(), 4);
    assert_every_branch_exact(&b, &qubits(&["q1", "q2"], "11"), C64::new(1.0, 0.0));
}

#[test]
fn dcnot_on_plus_zero_makes_a_bell_state() {
    let c = build_dcontrol_u("q1", "q2", &Gate::X, &two_nodes()).unwrap();
    let input = superpose(&qubits(&["q1", "q2"], "00"), &qubits(&["q1", "q2"], "10"));
    let bell = superpose(&qubits(&["q1", "q2"], "00"), &qubits(&["q1", "q2"], "11"));
    let b = all_branches(&c, &input);
    assert_eq!(b.len(), 4);
    assert_every_branch(&b, &bell);
}

#[test]
fn dcnot_report_with_ten_random_inputs() {
    let ls = labels(2);
    let c = build_dcontrol_u("q1", "q2", &Gate::X, &two_nodes()).unwrap();
    let mut inputs = dqc_core::verify::basis_inputs(&ls, &[2, 2]);
    inputs.extend(random_inputs(&ls, &[2, 2], 10, SEED));
    let oracle = OracleSpec::new(OracleKind::FanOut(Gate::X), ls.clone()).unwrap();
    let opts = VerifyOptions { sim: unmerged(), seed: Some(SEED), ..VerifyOptions::default() };
    let r = verify(&c, &oracle, &inputs, &opts).unwrap();
    assert!(r.passed);
    assert!(r.min_fidelity >= DEFAULT_THRESHOLD);
    assert_eq!(r.branches, 14 * 4);
    assert_eq!(r.branch_records, 14 * 4);
    assert_eq!(r.resource_tally, tally(&c));
}

#[test]
fn dropping_the_control_phase_correction_is_caught() {
    let ls = labels(2);
    let c = build_dcontrol_u("q1", "q2", &Gate::X, &two_nodes()).unwrap();
    let z_fix = c
        .instructions
        .iter()
        .rposition(|i| matches!(&i.op, Op::CondGate { gate: Gate::Z, targets, .. } if targets == &["q1"]))
        .expect("Z correction on the control");
    let mut bad = c.clone();
    bad.instructions.remove(z_fix);
    let oracle = OracleSpec::new(OracleKind::FanOut(Gate::X), ls.clone()).unwrap();
    let inputs = dqc_core::verify::standard_inputs(&bad, 10, SEED);
    let r = verify(&bad, &oracle, &inputs, &VerifyOptions::default()).unwrap();
    assert!(!r.passed);
    assert!(r.min_fidelity < 1.0 - 1e-3);
    let f = &r.failures[0];
    assert!(f.outcomes.iter().any(|(s, v)| *v == 1 && s.starts_with('m')), "{f:?}");
}

#[test]
fn fanout_to_three_remote_nodes_builds_ghz() {
    let ls = labels(4);
    let layout = NodeLayout::uniform(&ls, 4, 1, 2);
    let ts: Vec<(String, Gate)> = ls[1..].iter().map(|t| (t.clone(), Gate::X)).collect();
    let c = build_fanout("q1", &ts, &layout).unwrap();
    let t = tally(&c);
    assert_eq!(t.ghz.get(&4), Some(&1));
    assert_eq!(t.ep, 0);
    assert_eq!(t.resource_total(), 1);

    let names = ["q1", "q2", "q3", "q4"];
    let input = superpose(&qubits(&names, "0000"), &qubits(&names, "1000"));
    let ghz = superpose(&qubits(&names, "0000"), &qubits(&names, "1111"));
    let b = all_branches(&c, &input);
    assert_eq!(b.len(), 16);
    assert_every_branch(&b, &ghz);
}

#[test]
fn fanout_with_one_remote_target_uses_one_pair() {
    let c = build_fanout("q1", &[("q2".into(), Gate::X)], &two_nodes()).unwrap();
    let t = tally(&c);
    let expected = ResourceTally { ep: 1, ..ResourceTally::default() };
    assert!(t.same_resources(&expected), "{t}");
    assert_eq!(c.instructions, build_dcontrol_u("q1", "q2", &Gate::X, &two_nodes()).unwrap().instructions);
}

#[test]
fn fanout_with_mixed_targets_only_entangles_remote_nodes() {
    let layout = grouped(&[&["q1", "q2"], &["q3"], &["q4"]], 2);
    let ts: Vec<(String, Gate)> = ["q2", "q3", "q4"].iter().map(|t| (t.to_string(), Gate::X)).collect();
    let t = tally(&build_fanout("q1", &ts, &layout).unwrap());
    assert_eq!(t.ghz.get(&3), Some(&1));
    assert_eq!(t.resource_total(), 1);
}

#[test]
fn dcsum4_examples() {
    let c = build_dcsum4("Q1", "Q2", &qudit_nodes(2)).unwrap();
    let b = all_branches(&c, &ququarts(&["Q1", "Q2"], &[2, 3]));
    assert_eq!(b.len(), 16);
    assert_every_branch_exact(&b, &ququarts(&["Q1", "Q2"], &[2, 1]), C64::new(1.0, 0.0));

    for k in 0..4 {
        let input = ququarts(&["Q1", "Q2"], &[0, k]);
        assert_every_branch_exact(&all_branches(&c, &input), &input, C64::new(1.0, 0.0));
    }

    let input = superpose(&ququarts(&["Q1", "Q2"], &[0, 0]), &ququarts(&["Q1", "Q2"], &[1, 0]));
    let expected = superpose(&ququarts(&["Q1", "Q2"], &[0, 0]), &ququarts(&["Q1", "Q2"], &[1, 1]));
    let b = all_branches(&c, &input);
    assert_eq!(b.len(), 16);
    assert_every_branch(&b, &expected);
}

#[test]
fn dcsum4_all_sixteen_basis_inputs() {
    let c = build_dcsum4("Q1", "Q2", &qudit_nodes(2)).unwrap();
    for i in 0..4 {
        for j in 0..4 {
            let b = all_branches(&c, &ququarts(&["Q1", "Q2"], &[i, j]));
            assert_eq!(b.len(), 16);
            assert_every_branch_exact(&b, &ququarts(&["Q1", "Q2"], &[i, (i + j) % 4]), C64::new(1.0, 0.0));
        }
    }
}

/// After the sender's CSUM4_dag and K4, measuring its half of the pair in
/// branch `m` leaves the receiver's half in `|(Q1 − m) mod 4⟩`.
#[test]
fn dcsum4_sender_half_teleports_the_control_value() {
    let c = build_dcsum4("Q1", "Q2", &qudit_nodes(2)).unwrap();
    let measure_at = c.instructions.iter().position(|i| matches!(i.op, Op::Measure { .. })).unwrap();
    let Op::Measure { target: e1, .. } = &c.instructions[measure_at].op else { unreachable!() };
    let pair = c
        .instructions
        .iter()
        .find_map(|i| match &i.op {
            Op::CreateQuditPair { targets, dim: 4, .. } => Some(targets.clone()),
            _ => None,
        })
        .unwrap();
    assert_eq!(&pair[0], e1);
    let e2 = &pair[1];
    assert!(matches!(&c.instructions[measure_at - 1].op, Op::LocalGate { gate: Gate::K4, .. }));

    for q1 in 0..4 {
        for q2 in [0, 3] {
            let input = ququarts(&["Q1", "Q2"], &[q1, q2]);
            let before = run_prefix(&c, &input, measure_at, &unmerged()).unwrap();
            assert_eq!(before.len(), 1);
            let branches = before[0].state.measure_enumerate(e1).unwrap();
            assert_eq!(branches.len(), 4);
            for b in &branches {
                assert!((b.probability - 0.25).abs() < 1e-12);
                let m = b.outcomes[0].1;
                let e2_level = (q1 + 4 - m) % 4;
                let expected = MixedRegister::basis(
                    ["Q1", e2.as_str(), "Q2"],
                    vec![4, 4, 4],
                    &[q1, e2_level, q2],
                )
                .unwrap();
                let state = b.state.permuted(&["Q1", e2.as_str(), "Q2"]).unwrap();
                assert!((expected.inner(&state).unwrap().norm() - 1.0).abs() < 1e-12);
            }
        }
    }
}

#[test]
fn dcz4_power_examples() {
    let layout = qudit_nodes(2);
    let sq = build_dcz4_pow("Q1", "Q2", 2, &layout).unwrap();
    let b = all_branches(&sq, &ququarts(&["Q1", "Q2"], &[3, 3]));
    assert_every_branch_exact(&b, &ququarts(&["Q1", "Q2"], &[3, 3]), C64::new(-1.0, 0.0));
    for k in 0..4 {
        let input = ququarts(&["Q1", "Q2"], &[0, k]);
        assert_every_branch_exact(&all_branches(&sq, &input), &input, C64::new(1.0, 0.0));
    }

    let one = build_dcz4_pow("Q1", "Q2", 1, &layout).unwrap();
    let b = all_branches(&one, &ququarts(&["Q1", "Q2"], &[1, 1]));
    assert_every_branch_exact(&b, &ququarts(&["Q1", "Q2"], &[1, 1]), C64::new(0.0, 1.0));
}

#[test]
fn multitarget_csum_examples() {
    let c = build_dcsum4_multitarget("Q1", &["Q2", "Q3"], &qudit_nodes(3), ReceiverOp::Csum).unwrap();
    let names = ["Q1", "Q2", "Q3"];
    let b = all_branches(&c, &ququarts(&names, &[1, 0, 2]));
    assert_every_branch_exact(&b, &ququarts(&names, &[1, 1, 3]), C64::new(1.0, 0.0));
    for (j, k) in [(0, 0), (1, 2), (3, 3)] {
        let input = ququarts(&names, &[0, j, k]);
        assert_every_branch_exact(&all_branches(&c, &input), &input, C64::new(1.0, 0.0));
    }
}

#[test]
fn multitarget_cz4_squared_on_a_random_state() {
    let names = ["Q1", "Q2", "Q3"];
    let c = build_dcsum4_multitarget("Q1", &["Q2", "Q3"], &qudit_nodes(3), ReceiverOp::Cz4Pow(2)).unwrap();
    let input = random_inputs(&names, &[4, 4, 4], 1, SEED).remove(0);
    let b = all_branches(&c, &input);
    assert_eq!(b.len(), 64);
    let cz4 = Gate::Cz4;
    let oracle = sequence_unitary(
        &[(cz4.clone(), vec![0, 1]), (cz4.clone(), vec![0, 1]), (cz4.clone(), vec![0, 2]), (cz4, vec![0, 2])],
        &[4, 4, 4],
    );
    let mut expected = input.clone();
    expected.apply(&oracle, &names).unwrap();
    assert_every_branch(&b, &expected);
}

#[test]
fn qudit_gcz_six_qubit_basis_phases() {
    let ls = labels(6);
    let names: Vec<String> = (1..=3).map(|i| format!("Q{i}")).collect();
    let enc = QuditEncoding::consecutive(&ls, &names).unwrap();
    let c = build_qudit_gcz(6, &Partition::uniform(&ls, 3, 2, 2), &enc).unwrap();
    let names6: Vec<&str> = ls.iter().map(String::as_str).collect();
    for bits in ["110000", "000000", "111111", "101010"] {
        let input = qubits(&names6, bits);
        let ones: Vec<usize> = bits.char_indices().filter(|(_, c)| *c == '1').map(|(i, _)| i).collect();
        let pairs = ones.len() * ones.len().saturating_sub(1) / 2;
        let sign = if pairs.is_multiple_of(2) { 1.0 } else { -1.0 };
        for b in simulate(&c, &enc.encode(&input).unwrap(), &unmerged()).unwrap() {
            let out = enc.decode(&b.state).unwrap().permuted(&names6).unwrap();
            assert!((input.inner(&out).unwrap() - C64::new(sign, 0.0)).norm() < 1e-10, "{bits} {:?}", b.outcomes);
        }
    }
}

/// The n=6 qudit GCZ applies its inter-qudit blocks in a fixed order. Each
/// block is diagonal, so any order gives the same gate.
#[test]
fn qudit_inter_blocks_are_diagonal_and_commute() {
    let dims = [4, 4, 4];
    let x23 = |q: usize| (Gate::X23, vec![q]);
    let cz2 = |a: usize, b: usize| [(Gate::Cz4, vec![a, b]), (Gate::Cz4, vec![a, b])];
    let mut first = vec![x23(0), x23(1), x23(2)];
    first.extend(cz2(0, 1));
    first.extend(cz2(0, 2));
    first.extend([x23(0), x23(1), x23(2)]);
    let mut second = vec![x23(1), x23(2)];
    second.extend(cz2(1, 2));
    second.extend([x23(1), x23(2)]);
    let a = sequence_unitary(&first, &dims);
    let b = sequence_unitary(&second, &dims);
    for u in [&a, &b] {
        let m = u.matrix();
        for i in 0..64 {
            for j in 0..64 {
                if i != j {
                    assert!(m[(i, j)].norm() < 1e-14);
                }
            }
        }
    }
    assert!(a.commutator_norm(&b) < 1e-12);
    let ab = a.compose(&b).unwrap();
    let ba = b.compose(&a).unwrap();
    assert!(ab.max_deviation(&ba) < 1e-12);
}
