mod common;

use common::labels;
use dqc_core::encoding::QuditEncoding;
use dqc_core::gates::Gate;
use dqc_core::qubit::{build_dgcz, build_dgms, GczStrategy, GmsSpec, GmsStrategy, Partition};
use dqc_core::resources::{gcz_costs, GczConfig};
use dqc_core::sim::{simulate, SimConfig};
use dqc_core::state::fidelity_up_to_phase;
use dqc_core::{tally, Angle, DistCircuit, MixedRegister, NodeLayout};
use num_complex::Complex64 as C64;
use proptest::prelude::*;

fn amplitudes(len: usize) -> impl Strategy<Value = Vec<C64>> {
    prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), len)
        .prop_filter("nonzero", |v| v.iter().any(|(a, b)| a.abs() + b.abs() > 1e-3))
        .prop_map(|v| v.into_iter().map(|(re, im)| C64::new(re, im)).collect())
}

/// A normalized register with subsystem dimensions drawn from {2, 4}.
fn register() -> impl Strategy<Value = MixedRegister> {
    prop::collection::vec(prop_oneof![Just(2usize), Just(4usize)], 1..=4).prop_flat_map(|dims| {
        let total = dims.iter().product();
        amplitudes(total).prop_map(move |amps| {
            let names: Vec<String> = (0..dims.len()).map(|i| format!("s{i}")).collect();
            MixedRegister::normalized(names, dims.clone(), amps).unwrap()
        })
    })
}

fn qubit_gate() -> impl Strategy<Value = Gate> {
    prop_oneof![
        Just(Gate::H),
        Just(Gate::X),
        Just(Gate::Z),
        Just(Gate::SDag),
        (-6.3f64..6.3).prop_map(|t| Gate::Rz(Angle::Radians(t))),
    ]
}

fn ququart_gate() -> impl Strategy<Value = Gate> {
    prop_oneof![Just(Gate::H4), Just(Gate::H4Dag), Just(Gate::X4), Just(Gate::Z4Dag), Just(Gate::K4), Just(Gate::X23)]
}

fn one_site_gate(dim: usize) -> BoxedStrategy<Gate> {
    if dim == 2 {
        qubit_gate().boxed()
    } else {
        ququart_gate().boxed()
    }
}

/// A register together with a list of single-subsystem gates that fit it.
fn register_and_gates() -> impl Strategy<Value = (MixedRegister, Vec<(Gate, usize)>)> {
    register().prop_flat_map(|r| {
        let dims = r.dims().to_vec();
        let n = dims.len();
        let ops = prop::collection::vec(
            (0..n).prop_flat_map(move |i| one_site_gate(dims[i]).prop_map(move |g| (g, i))),
            0..12,
        );
        (Just(r), ops)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn gates_preserve_norm((state, ops) in register_and_gates()) {
        let mut s = state;
        for (g, i) in &ops {
            let label = s.labels()[*i].clone();
            s.apply(&g.unitary(), &[label]).unwrap();
        }
        prop_assert!((s.norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn gates_on_disjoint_subsystems_commute((state, ops) in register_and_gates()) {
        prop_assume!(state.dims().len() >= 2);
        let l0 = state.labels()[0].clone();
        let l1 = state.labels()[1].clone();
        let g0 = ops.iter().find(|(_, i)| *i == 0).map(|(g, _)| g.clone());
        let g1 = ops.iter().find(|(_, i)| *i == 1).map(|(g, _)| g.clone());
        prop_assume!(g0.is_some() && g1.is_some());
        let (g0, g1) = (g0.unwrap(), g1.unwrap());
        let mut a = state.clone();
        a.apply(&g0.unitary(), std::slice::from_ref(&l0)).unwrap();
        a.apply(&g1.unitary(), std::slice::from_ref(&l1)).unwrap();
        let mut b = state;
        b.apply(&g1.unitary(), &[l1]).unwrap();
        b.apply(&g0.unitary(), &[l0]).unwrap();
        let dev = a.amps().iter().zip(b.amps()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max);
        prop_assert!(dev < 1e-12);
    }

    #[test]
    fn measurement_branches_sum_to_one(state in register(), pick in 0usize..4) {
        let label = state.labels()[pick % state.labels().len()].clone();
        let branches = state.measure_enumerate(&label).unwrap();
        let total: f64 = branches.iter().map(|b| b.probability).sum();
        prop_assert!((total - 1.0).abs() < 1e-12);
        for b in &branches {
            prop_assert!(!b.state.contains(&label));
            prop_assert!((b.state.norm() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn encoding_round_trips(pairs in 1usize..=3, seed_amps in amplitudes(64), shuffle in any::<u64>()) {
        let n = 2 * pairs;
        let ls = labels(n);
        let names: Vec<String> = (1..=pairs).map(|i| format!("Q{i}")).collect();
        let enc = QuditEncoding::consecutive(&ls, &names).unwrap();
        let amps: Vec<C64> = seed_amps.into_iter().take(1 << n).collect();
        prop_assume!(amps.iter().any(|z| z.norm() > 1e-3));
        let state = MixedRegister::normalized(ls.clone(), vec![2; n], amps).unwrap();
        // Present the qubits in a scrambled order; encoding must not care.
        let mut order = ls.clone();
        let k = (shuffle % n as u64) as usize;
        order.rotate_left(k);
        if shuffle & 1 == 1 {
            order.reverse();
        }
        let scrambled = state.permuted(&order).unwrap();
        let encoded = enc.encode(&scrambled).unwrap();
        prop_assert!(encoded.dims().iter().all(|d| *d == 4));
        let back = enc.decode(&encoded).unwrap().permuted(&ls).unwrap();
        let dev = back.amps().iter().zip(state.amps()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max);
        prop_assert!(dev < 1e-14);
    }
}

fn built_circuits() -> impl Strategy<Value = DistCircuit> {
    let gms = (3usize..=4, 0usize..3, 1i64..6).prop_map(|(n, s, den)| {
        let ls = labels(n);
        let strategy = [GmsStrategy::Pairwise, GmsStrategy::PairwiseConditional, GmsStrategy::Fanout][s];
        let layout = NodeLayout::uniform(&ls, n, 1, 2);
        build_dgms(&GmsSpec::new(ls, Angle::pi_frac(1, den)).unwrap(), &layout, strategy).unwrap()
    });
    let gcz = (2usize..=3, 1usize..=3, 0usize..3).prop_map(|(d, k, s)| {
        let ls = labels(d * k);
        let strategy = [GczStrategy::Pairwise, GczStrategy::Fanout, GczStrategy::TeleportAll][s];
        let strategy = if d != 2 && strategy == GczStrategy::TeleportAll { GczStrategy::Fanout } else { strategy };
        build_dgcz(&ls, &Partition::uniform(&ls, d, k, k as u32 + 1), strategy).unwrap()
    });
    prop_oneof![gms, gcz]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn tally_ignores_instruction_order(c in built_circuits(), seed in any::<u64>()) {
        let mut shuffled = c.clone();
        let len = shuffled.instructions.len();
        let mut x = seed | 1;
        for i in (1..len).rev() {
            x ^= x << 13;
            x ^= x >> 7;
            x ^= x << 17;
            shuffled.instructions.swap(i, (x % (i as u64 + 1)) as usize);
        }
        let (a, b) = (tally(&c), tally(&shuffled));
        prop_assert!(a.same_resources(&b));
        prop_assert_eq!(a.messages, b.messages);
        prop_assert_eq!(a.message_bits, b.message_bits);
        prop_assert!((a.time_units - b.time_units).abs() < 1e-12);
    }

    #[test]
    fn builder_output_round_trips(c in built_circuits()) {
        let text = c.to_json();
        let back = DistCircuit::from_json(&text).unwrap();
        prop_assert_eq!(&back, &c);
        prop_assert_eq!(back.to_json(), text);
        prop_assert!(dqc_core::validate(&back).is_empty());
    }

    #[test]
    fn closed_form_matches_built_gcz(d in 2usize..=4, k in 1usize..=3) {
        let ls = labels(d * k);
        let part = Partition::uniform(&ls, d, k, k as u32 + 1);
        let r = gcz_costs(&GczConfig::uniform(d, k)).unwrap();
        let pw = tally(&build_dgcz(&ls, &part, GczStrategy::Pairwise).unwrap());
        let fan = tally(&build_dgcz(&ls, &part, GczStrategy::Fanout).unwrap());
        prop_assert_eq!(pw.ep, r.pairwise_ep);
        prop_assert_eq!(fan.ep, r.fanout_ep);
        prop_assert_eq!(fan.ghz_total(), r.fanout_ghz);
        prop_assert_eq!(&fan.ghz, &r.fanout_ghz_arities);
    }
}

#[test]
fn merging_never_changes_the_outcome_distribution() {
    let ls = labels(4);
    let layout = NodeLayout::uniform(&ls, 4, 1, 2);
    let c = build_dgms(&GmsSpec::new(ls.clone(), Angle::pi_frac(1, 3)).unwrap(), &layout, GmsStrategy::Fanout).unwrap();
    for input in dqc_core::verify::random_inputs(&ls, &[2; 4], 3, 11) {
        let merged = simulate(&c, &input, &SimConfig::default()).unwrap();
        let full = simulate(&c, &input, &SimConfig { merge_equivalent: false, ..SimConfig::default() }).unwrap();
        let represented: u64 = merged.iter().map(|b| b.represented).sum();
        assert_eq!(represented as usize, full.len());
        assert!(merged.len() <= full.len());
        for m in &merged {
            for f in &full {
                assert!(fidelity_up_to_phase(&m.state, &f.state).unwrap() > 1.0 - 1e-12);
            }
        }
    }
}
