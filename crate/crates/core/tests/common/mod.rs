#![allow(dead_code)]

use dqc_core::encoding::QuditEncoding;
use dqc_core::qubit::{build_dcontrol_u, build_dgcz, build_dgms, build_fanout, GczStrategy, GmsSpec, GmsStrategy, Partition};
use dqc_core::qudit::{build_dcsum4, build_dcsum4_multitarget, build_dcz4_pow, build_qudit_gcz, ReceiverOp};
use dqc_core::verify::{OracleKind, OracleSpec};
use dqc_core::{Angle, DistCircuit, Gate, NodeLayout};

pub const SEED: u64 = 20_240_917;
pub const RANDOM_INPUTS: usize = 20;

pub struct Case {
    pub name: String,
    pub circuit: DistCircuit,
    pub oracle: OracleSpec,
}

pub fn labels(n: usize) -> Vec<String> {
    (1..=n).map(|i| format!("q{i}")).collect()
}

fn case(name: impl Into<String>, circuit: DistCircuit, kind: OracleKind, labels: &[String]) -> Case {
    Case { name: name.into(), circuit, oracle: OracleSpec::new(kind, labels.iter().cloned()).unwrap() }
}

/// Layout with the given label groups, one node per group.
pub fn grouped(groups: &[&[&str]], slots: u32) -> NodeLayout {
    let mut l = NodeLayout::new();
    for (i, g) in groups.iter().enumerate() {
        let node = format!("n{}", i + 1);
        l.add_node(node.clone(), slots);
        for q in g.iter() {
            l.place(*q, node.clone());
        }
    }
    l
}

pub fn qubit_cases() -> Vec<Case> {
    let mut v = Vec::new();
    let two = labels(2);
    let l2 = NodeLayout::uniform(&two, 2, 1, 2);
    v.push(case("dCNOT", build_dcontrol_u("q1", "q2", &Gate::X, &l2).unwrap(), OracleKind::FanOut(Gate::X), &two));
    let rz = Gate::Rz(Angle::pi_frac(1, 3));
    v.push(case(
        "dControl-RZ(pi/3)",
        build_dcontrol_u("q1", "q2", &rz, &l2).unwrap(),
        OracleKind::FanOut(rz.clone()),
        &two,
    ));

    // Control shares its node with one target; 2 or 3 remote nodes.
    for remote in [2usize, 3] {
        let ls = labels(remote + 2);
        let mut groups: Vec<Vec<&str>> = vec![vec![&ls[0], &ls[1]]];
        for q in &ls[2..] {
            groups.push(vec![q]);
        }
        let g: Vec<&[&str]> = groups.iter().map(|x| x.as_slice()).collect();
        let layout = grouped(&g, 2);
        for gate in [Gate::X, Gate::Rz(Angle::pi_frac(2, 5))] {
            let ts: Vec<(String, Gate)> = ls[1..].iter().map(|t| (t.clone(), gate.clone())).collect();
            v.push(case(
                format!("fan-out with local target, {remote} remote nodes, {}", gate.name()),
                build_fanout("q1", &ts, &layout).unwrap(),
                OracleKind::FanOut(gate.clone()),
                &ls,
            ));
        }
    }
    // All targets remote, one per node.
    for remote in [2usize, 3] {
        let ls = labels(remote + 1);
        let layout = NodeLayout::uniform(&ls, ls.len(), 1, 2);
        let ts: Vec<(String, Gate)> = ls[1..].iter().map(|t| (t.clone(), Gate::X)).collect();
        v.push(case(
            format!("fan-out, {remote} remote nodes"),
            build_fanout("q1", &ts, &layout).unwrap(),
            OracleKind::FanOut(Gate::X),
            &ls,
        ));
    }
    // Two remote nodes holding two targets each.
    {
        let ls = labels(5);
        let layout = grouped(&[&["q1"], &["q2", "q3"], &["q4", "q5"]], 2);
        let ts: Vec<(String, Gate)> = ls[1..].iter().map(|t| (t.clone(), Gate::Z)).collect();
        v.push(case(
            "fan-out, two targets per remote node",
            build_fanout("q1", &ts, &layout).unwrap(),
            OracleKind::FanOut(Gate::Z),
            &ls,
        ));
    }

    for theta in [Angle::pi_frac(1, 2), Angle::pi_frac(1, 3)] {
        for s in [GmsStrategy::Pairwise, GmsStrategy::PairwiseConditional] {
            let spec = GmsSpec::new(two.clone(), theta).unwrap();
            v.push(case(format!("dLMS {s} theta={theta}"), build_dgms(&spec, &l2, s).unwrap(), OracleKind::Gms(theta), &two));
        }
        for n in [3usize, 4] {
            let ls = labels(n);
            let layout = NodeLayout::uniform(&ls, n, 1, 2);
            let spec = GmsSpec::new(ls.clone(), theta).unwrap();
            for s in [GmsStrategy::Pairwise, GmsStrategy::PairwiseConditional, GmsStrategy::Fanout] {
                v.push(case(
                    format!("dGMS n={n} {s} theta={theta}"),
                    build_dgms(&spec, &layout, s).unwrap(),
                    OracleKind::Gms(theta),
                    &ls,
                ));
            }
        }
    }

    let l4 = labels(4);
    let p4 = Partition::uniform(&l4, 4, 1, 2);
    for s in [GczStrategy::Pairwise, GczStrategy::Fanout] {
        v.push(case(format!("dGCZ n=4 4 nodes {s}"), build_dgcz(&l4, &p4, s).unwrap(), OracleKind::Gcz, &l4));
    }
    let l6 = labels(6);
    for (nodes, per) in [(2usize, 3usize), (3, 2)] {
        let p = Partition::uniform(&l6, nodes, per, 4);
        let mut strategies = vec![GczStrategy::Pairwise, GczStrategy::Fanout];
        if nodes == 2 {
            strategies.push(GczStrategy::TeleportAll);
        }
        for s in strategies {
            v.push(case(format!("dGCZ n=6 {nodes} nodes {s}"), build_dgcz(&l6, &p, s).unwrap(), OracleKind::Gcz, &l6));
        }
    }
    v
}

pub fn qudit_cases() -> Vec<Case> {
    let mut v = Vec::new();
    let q = vec!["Q1".to_string(), "Q2".to_string(), "Q3".to_string()];
    let layout = NodeLayout::uniform(&q, 3, 1, 2);
    v.push(case("dCSUM4", build_dcsum4("Q1", "Q2", &layout).unwrap(), OracleKind::Csum4, &q[..2]));
    for p in [1u32, 2] {
        v.push(case(format!("d(CZ4)^{p}"), build_dcz4_pow("Q1", "Q2", p, &layout).unwrap(), OracleKind::Cz4Pow(p), &q[..2]));
    }
    v.push(case(
        "dCSUM4'' two targets",
        build_dcsum4_multitarget("Q1", &["Q2", "Q3"], &layout, ReceiverOp::Csum).unwrap(),
        OracleKind::Csum4Multi,
        &q,
    ));
    v.push(case(
        "multitarget d(CZ4)^2 two targets",
        build_dcsum4_multitarget("Q1", &["Q2", "Q3"], &layout, ReceiverOp::Cz4Pow(2)).unwrap(),
        OracleKind::Cz4Pow(2),
        &q,
    ));
    for n in [4usize, 6] {
        let ls = labels(n);
        let names: Vec<String> = (1..=n / 2).map(|i| format!("Q{i}")).collect();
        let enc = QuditEncoding::consecutive(&ls, &names).unwrap();
        let part = Partition::uniform(&ls, n / 2, 2, 2);
        v.push(case(format!("qudit GCZ n={n}"), build_qudit_gcz(n, &part, &enc).unwrap(), OracleKind::Gcz, &ls));
    }
    v
}

pub fn all_cases() -> Vec<Case> {
    let mut v = qubit_cases();
    v.extend(qudit_cases());
    v
}
