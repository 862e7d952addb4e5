use bitvec::prelude::*;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use spoqc::circuit::{build_memory_experiment, Basis, NoiseParams};
use spoqc::code::CheckKind;
use spoqc::decoder::{build_base_graph, derive_error_model, match_nodes, DecodeWorkspace, Decoder, MatchingGraph};

fn circuit() -> spoqc::circuit::SyndromeCircuit {
    let noise = NoiseParams { p_fail: 0.1, distinguishability: 0.02, t_rus_over_t2: 0.01, t_rus_over_t1: 0.0 };
    build_memory_experiment(3, Basis::Z, 3, &noise).unwrap()
}

fn graph_and_circuit() -> (MatchingGraph, usize) {
    let c = circuit();
    (build_base_graph(&c, &derive_error_model(&c), CheckKind::Z).unwrap(), c.herald_count())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn fired_heralds_never_raise_the_matching_weight(
        seed in any::<u64>(),
        fired in proptest::collection::vec(any::<bool>(), 72),
    ) {
        let (g, heralds) = graph_and_circuit();
        prop_assert_eq!(heralds, 72);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let flagged: Vec<usize> = (0..g.node_count()).filter(|_| rng.random_bool(0.2)).collect();
        let bits: BitVec<u64, Lsb0> = fired.iter().copied().collect();
        let mut ws = DecodeWorkspace::new();
        let base = match_nodes(&g, &g.shot_weights(None), &flagged, &mut ws).unwrap().1;
        let with = match_nodes(&g, &g.shot_weights(Some(&bits)), &flagged, &mut ws).unwrap().1;
        prop_assert!(with <= base);
    }
}

#[test]
fn parallel_mechanisms_merge_into_one_edge() {
    let (g, _) = graph_and_circuit();
    let mut keys: Vec<_> = g.edges.iter().map(|e| (e.u, e.v, e.observable)).collect();
    let n = keys.len();
    keys.sort();
    keys.dedup();
    assert_eq!(keys.len(), n);
    assert!(g.edges.iter().any(|e| e.mechanisms.len() > 1));
    let dem = derive_error_model(&circuit());
    for e in &g.edges {
        let mut p = 0.0;
        for &m in &e.mechanisms {
            if dem[m].herald.is_none() {
                p = p * (1.0 - dem[m].probability) + dem[m].probability * (1.0 - p);
            }
        }
        assert!((p - e.probability).abs() < 1e-12);
    }
}

#[test]
fn herald_aware_graph_differs_from_blind_only_in_failures() {
    let noise = NoiseParams { p_fail: 0.08, ..NoiseParams::noiseless() };
    let c = build_memory_experiment(3, Basis::Z, 3, &noise).unwrap();
    let aware = Decoder::new(&c).unwrap();
    let blind = Decoder::blind(&c).unwrap();
    assert!(aware.is_herald_aware() && !blind.is_herald_aware());
    // With only heralded noise the aware graph has no unheralded weight at all.
    assert!(aware.graph().edges.iter().all(|e| e.probability == 0.0));
    assert!(blind.graph().edges.iter().all(|e| e.probability > 0.0));
}
