use proptest::prelude::*;
use rand::seq::SliceRandom;
use tenseq::bench::{aggregate, parse_csv, records_csv, BenchRecord, Status};
use tenseq::contraction::{evaluate_sequence, optimal_cc, sequence_to_eo, td_to_sequence, ContractionSequence};
use tenseq::decomposition::{
    eo_to_td, heuristic_order, lower_bound, ordering_width, td_to_eo, treewidth_exact, validate_td,
    EliminationOrdering, ExactOptions, Heuristic, LowerBound,
};
use tenseq::executor::{contract_all, ExecutionTrace};
use tenseq::generators::{canonical_form, qaoa_maxcut_network, qaoa_numeric_network, QaoaOptions};
use tenseq::graph::{line_graph, random_regular, read_gr, to_simple, write_gr, Role};
use tenseq::{Graph, TensorNetwork};

fn graph_strategy(max_n: usize) -> impl Strategy<Value = Graph> {
    (1..=max_n)
        .prop_flat_map(|n| {
            (
                Just(n),
                proptest::collection::vec(0u8..100, n * (n.saturating_sub(1)) / 2),
                10u8..90,
            )
        })
        .prop_map(|(n, coins, density)| {
            let mut g = Graph::new(n);
            let mut k = 0;
            for u in 0..n {
                for v in u + 1..n {
                    if coins[k] < density {
                        g.add_edge(u, v).unwrap();
                    }
                    k += 1;
                }
            }
            g
        })
}

/// Multigraph networks without loops, at least one wire, some open legs.
fn network_strategy(max_vertices: usize, max_wires: usize) -> impl Strategy<Value = TensorNetwork> {
    (2..=max_vertices)
        .prop_flat_map(move |n| {
            (
                Just(n),
                proptest::collection::vec((0..n, 1..n), 1..=max_wires),
                proptest::collection::vec(0..n, 0..3),
            )
        })
        .prop_map(|(n, wires, legs)| {
            let mut net = TensorNetwork::new();
            for _ in 0..n {
                net.add_vertex(None);
            }
            for (u, shift) in wires {
                net.add_wire(u, (u + shift) % n).unwrap();
            }
            for v in legs {
                net.add_open_leg(v, 2).unwrap();
            }
            net
        })
}

fn connected_network(max_vertices: usize, max_wires: usize) -> impl Strategy<Value = TensorNetwork> {
    network_strategy(max_vertices, max_wires).prop_filter("connected", |n| {
        let touched = n.incidence().iter().filter(|i| !i.is_empty()).count();
        touched == n.n_vertices() && n.is_connected()
    })
}

fn shuffled(n: usize, seed: u64) -> Vec<usize> {
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut tenseq::rng::seeded(seed));
    order
}

fn exact_width(g: &Graph) -> usize {
    let out = treewidth_exact(g, &ExactOptions::default()).unwrap();
    assert!(out.is_optimal());
    out.into_solution().width
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn line_graph_degree_law(net in network_strategy(8, 14)) {
        let map = line_graph(&net).unwrap();
        let incident = |x: usize| net.wires().iter().filter(|w| w.u == x || w.v == x).count();
        let parallel = !to_simple(&net).multiplicity.values().all(|&m| m == 1);
        for (i, w) in net.wires().iter().enumerate() {
            // a parallel sibling shares both endpoints but is one neighbor
            let siblings = net.wires().iter().filter(|x| (x.u, x.v) == (w.u, w.v) || (x.v, x.u) == (w.u, w.v)).count() - 1;
            let law = incident(w.u) - 1 + incident(w.v) - 1;
            prop_assert_eq!(map.line_graph.degree(i), law - siblings);
            if !parallel {
                prop_assert_eq!(map.line_graph.degree(i), law);
            }
        }
    }

    #[test]
    fn line_graph_edge_count(g in graph_strategy(30)) {
        prop_assume!(g.m() > 0);
        let l = line_graph(&TensorNetwork::from_graph(&g)).unwrap().line_graph;
        let expected: usize = (0..g.n()).map(|v| g.degree(v) * g.degree(v).saturating_sub(1) / 2).sum();
        prop_assert_eq!(l.m(), expected);
    }

    #[test]
    fn gr_round_trip(g in graph_strategy(30)) {
        let back = read_gr(&write_gr(&g)).unwrap();
        prop_assert_eq!(back.n(), g.n());
        prop_assert_eq!(back.edges().collect::<Vec<_>>(), g.edges().collect::<Vec<_>>());
    }

    #[test]
    fn random_regular_is_regular_and_connected(r in 2usize..6, extra in 0usize..20, seed in any::<u64>()) {
        let n = 2 * (r + 1 + extra);
        let g = random_regular(r, n, seed).unwrap();
        prop_assert!(g.is_regular(r));
        prop_assert!(g.is_connected());
        prop_assert_eq!(g.m(), r * n / 2);
        prop_assert_eq!(random_regular(r, n, seed).unwrap(), g);
    }

    #[test]
    fn treewidth_sandwich(g in graph_strategy(12), seed in any::<u64>()) {
        let tw = exact_width(&g);
        prop_assert!(lower_bound(&g, LowerBound::MinorMinWidth) <= tw);
        prop_assert!(lower_bound(&g, LowerBound::Degeneracy) <= tw);
        for h in [Heuristic::MinFill, Heuristic::MinDegree] {
            let eo = heuristic_order(&g, h, seed);
            prop_assert!(tw <= ordering_width(&g, &eo).unwrap());
        }
    }

    #[test]
    fn ordering_conversions(g in graph_strategy(14), seed in any::<u64>()) {
        let eo = EliminationOrdering::new(shuffled(g.n(), seed)).unwrap();
        let w = ordering_width(&g, &eo).unwrap();
        let td = eo_to_td(&g, &eo).unwrap();
        prop_assert!(validate_td(&g, &td).is_valid());
        prop_assert_eq!(td.width(), w);
        let back = td_to_eo(&g, &td).unwrap();
        prop_assert!(ordering_width(&g, &back).unwrap() <= w);
    }

    #[test]
    fn deleting_an_edge_never_raises_treewidth(g in graph_strategy(11), pick in any::<prop::sample::Index>()) {
        prop_assume!(g.m() > 0);
        let edges: Vec<_> = g.edges().collect();
        let (u, v) = edges[pick.index(edges.len())];
        let mut h = g.clone();
        h.remove_edge(u, v);
        prop_assert!(exact_width(&h) <= exact_width(&g));
    }

    #[test]
    fn optimal_sequence_certifies_its_complexity(net in connected_network(7, 12)) {
        let cc = optimal_cc(&net, &ExactOptions::default()).unwrap();
        prop_assert!(cc.is_optimal());
        let eval = evaluate_sequence(&net, &cc.sequence).unwrap();
        prop_assert!(eval.complete);
        prop_assert_eq!(eval.complexity, cc.sequence.complexity);
        prop_assert_eq!(cc.sequence.complexity, cc.treewidth.width);
    }

    #[test]
    fn sequence_conversions_never_expand(net in network_strategy(8, 14), seed in any::<u64>()) {
        let map = line_graph(&net).unwrap();
        let eo = EliminationOrdering::new(shuffled(net.n_wires(), seed)).unwrap();
        let td = eo_to_td(&map.line_graph, &eo).unwrap();
        let seq = td_to_sequence(&net, &td, &map).unwrap();
        prop_assert!(seq.complexity <= td.width());
        let back = sequence_to_eo(&net, &seq, &map).unwrap();
        prop_assert!(ordering_width(&map.line_graph, &back).unwrap() <= seq.complexity);
        let again = td_to_sequence(&net, &eo_to_td(&map.line_graph, &back).unwrap(), &map).unwrap();
        prop_assert!(again.complexity <= seq.complexity);
    }

    #[test]
    fn canonical_form_ignores_labels(net in connected_network(9, 14), seed in any::<u64>(), roles in proptest::collection::vec(0u8..3, 9)) {
        let mut colored = TensorNetwork::new();
        for v in 0..net.n_vertices() {
            let role = [Role::Unitary, Role::Isometry, Role::Operator][roles[v] as usize];
            colored.add_vertex(Some(role));
        }
        for w in net.wires() {
            colored.add_wire(w.u, w.v).unwrap();
        }
        let perm = shuffled(net.n_vertices(), seed);
        let mut relabeled = TensorNetwork::new();
        let mut inverse = vec![0; perm.len()];
        for (v, &p) in perm.iter().enumerate() {
            inverse[p] = v;
        }
        for &v in &inverse {
            relabeled.add_vertex(colored.vertex(v).role);
        }
        for w in colored.wires() {
            relabeled.add_wire(perm[w.u], perm[w.v]).unwrap();
        }
        prop_assert_eq!(canonical_form(&colored), canonical_form(&relabeled));
    }

    #[test]
    fn canonical_form_separates_degree_sequences(a in graph_strategy(9), b in graph_strategy(9)) {
        let degrees = |g: &Graph| {
            let mut d: Vec<usize> = (0..g.n()).map(|v| g.degree(v)).collect();
            d.sort_unstable();
            d
        };
        prop_assume!(degrees(&a) != degrees(&b));
        prop_assert_ne!(
            canonical_form(&TensorNetwork::from_graph(&a)),
            canonical_form(&TensorNetwork::from_graph(&b))
        );
    }

    #[test]
    fn qaoa_round_one_degree_at_most_four(half in 2usize..15, seed in any::<u64>()) {
        let g = random_regular(3, 2 * half, seed).unwrap();
        let net = qaoa_maxcut_network(&g, 1).unwrap();
        prop_assert!(to_simple(&net).graph.max_degree() <= 4);
        for v in 0..net.n_vertices() {
            prop_assert!(net.leg_count(v) <= 4);
        }
    }
}

fn executor_cases() -> impl Strategy<Value = (Graph, u64, u64, Vec<u8>)> {
    (
        3usize..7,
        any::<u64>(),
        any::<u64>(),
        proptest::collection::vec(0u8..2, 7),
    )
        .prop_filter_map("cubic graph", |(n, gseed, oseed, bits)| {
            let n = 2 * n / 2;
            random_regular(3, n.max(4), gseed).ok().map(|g| (g, gseed, oseed, bits))
        })
}

fn check_trace(net: &TensorNetwork, seq: &ContractionSequence, trace: &ExecutionTrace) -> Result<(), TestCaseError> {
    let eval = evaluate_sequence(net, seq).unwrap();
    prop_assert_eq!(trace.max_degree, eval.complexity);
    prop_assert!(trace.max_rank <= trace.max_degree.max(1));
    let law: u64 = trace.steps.iter().map(|s| 1u64 << (s.degree + 1)).sum();
    prop_assert_eq!(trace.total_madds, law);
    Ok(())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(60))]

    #[test]
    fn contraction_order_does_not_change_the_amplitude((g, _, seed, bits) in executor_cases()) {
        let opts = QaoaOptions { terminal: bits[..g.n()].to_vec(), gammas: vec![0.7], betas: vec![-0.2], ..Default::default() };
        let num = qaoa_numeric_network(&g, &opts).unwrap();
        let net = num.network();
        let ids: Vec<_> = net.wires().iter().map(|w| w.id).collect();
        let order = |s: u64| -> Vec<_> { shuffled(ids.len(), s).into_iter().map(|i| ids[i]).collect() };
        let a = ContractionSequence::from_wire_order(net, &order(seed)).unwrap();
        let b = ContractionSequence::from_wire_order(net, &order(seed ^ 0x9e37_79b9)).unwrap();
        let c = optimal_cc(net, &ExactOptions::default()).unwrap().sequence;
        let (va, ta) = contract_all(&num, &a).unwrap();
        let (vb, tb) = contract_all(&num, &b).unwrap();
        let (vc, tc) = contract_all(&num, &c).unwrap();
        prop_assert!((va - vb).norm() <= 1e-9, "{} vs {}", va, vb);
        prop_assert!((va - vc).norm() <= 1e-9, "{} vs {}", va, vc);
        check_trace(net, &a, &ta)?;
        check_trace(net, &b, &tb)?;
        check_trace(net, &c, &tc)?;
    }

    #[test]
    fn aggregate_matches_recomputation(widths in proptest::collection::vec((1usize..20, 0u8..4), 1..40)) {
        let records: Vec<BenchRecord> = widths
            .iter()
            .enumerate()
            .map(|(i, &(w, s))| BenchRecord {
                instance: format!("i{i}"),
                provenance: serde_json::Value::Null,
                algorithm: if i % 3 == 0 { "min-fill".into() } else { "exact".into() },
                seed: 0,
                timeout_ms: None,
                status: [Status::Optimal, Status::Heuristic, Status::TimeoutWithBound, Status::Error][s as usize],
                width: (s != 3).then_some(w),
                lower_bound: None,
                time_ms: i as f64,
                message: None,
                artifacts: Vec::new(),
            })
            .collect();
        let agg = aggregate(&parse_csv(&records_csv(&records)).unwrap());
        for row in agg {
            let mine: Vec<&BenchRecord> = records.iter().filter(|r| r.algorithm == row.algorithm).collect();
            let mut kept: Vec<f64> = mine
                .iter()
                .filter(|r| matches!(r.status, Status::Optimal | Status::Heuristic))
                .map(|r| r.width.unwrap() as f64)
                .collect();
            kept.sort_by(f64::total_cmp);
            prop_assert_eq!(row.samples, kept.len());
            prop_assert_eq!(row.timeouts, mine.iter().filter(|r| r.status == Status::TimeoutWithBound).count());
            prop_assert_eq!(row.errors, mine.iter().filter(|r| r.status == Status::Error).count());
            if kept.is_empty() {
                continue;
            }
            let n = kept.len() as f64;
            let mean = kept.iter().sum::<f64>() / n;
            prop_assert!((row.mean - mean).abs() < 1e-9);
            if kept.len() > 1 {
                let var = kept.iter().map(|w| (w - mean) * (w - mean)).sum::<f64>() / (n - 1.0);
                prop_assert!((row.sd - var.sqrt()).abs() < 1e-9);
            }
            let mid = kept.len() / 2;
            let median = if kept.len() % 2 == 1 { kept[mid] } else { (kept[mid - 1] + kept[mid]) / 2.0 };
            prop_assert_eq!(row.median, median);
            prop_assert_eq!(row.min as f64, kept[0]);
            prop_assert_eq!(row.max as f64, kept[kept.len() - 1]);
        }
    }
}

#[test]
fn mera_corpus_size_law_and_closure() {
    for (d, levels) in [(1, 1), (1, 2), (1, 3), (1, 4), (1, 5), (2, 1), (2, 2)] {
        let k: usize = 1 << d;
        for ops in [1, 2] {
            let (corpus, summary) = tenseq::generators::mera_corpus(d, k, ops, levels).unwrap();
            let expected = k.pow(levels as u32) - usize::from(ops == 2);
            assert_eq!(corpus.len(), expected, "d={d} l={levels} ops={ops}");
            assert_eq!(summary.total, expected);
            assert_eq!(summary.cells.iter().map(|c| c.total).sum::<usize>(), summary.total);
            assert_eq!(summary.cells.iter().map(|c| c.unique).sum::<usize>(), summary.unique);
            assert!(summary.unique <= summary.total);
            for inst in &corpus {
                assert!(inst.network.is_connected());
                assert!(inst.network.open_legs().is_empty());
                inst.network.validate().unwrap();
            }
        }
    }
}
