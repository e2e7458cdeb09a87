use proptest::prelude::*;

use capnet::net::file::{parse, serialize, NetworkFile, WeightRepr};
use capnet::net::OrientedGraph;

/// Random multigraph description: vertex count, edge endpoints, weight
/// representations, optional terminals and labels.
fn network_strategy() -> impl Strategy<Value = NetworkFile> {
    (1usize..8).prop_flat_map(|n| {
        let edge = (0..n, 0..n);
        let weight = prop_oneof![
            (0.0f64..1e6).prop_map(WeightRepr::Plain),
            (-2e3f64..2e3).prop_map(WeightRepr::Log),
        ];
        let label = prop_oneof![
            Just(None),
            "[a-z][a-z0-9_-]{0,8}".prop_map(Some),
        ];
        (
            proptest::collection::vec((edge, weight, label), 0..12),
            proptest::option::of((0..n, 0..n)),
            // single internal spaces only: the parser normalizes runs of
            // whitespace inside labels
            proptest::collection::vec(("[a-z]([a-z0-9]| [a-z0-9]){0,6}", 0..n), 0..3),
        )
            .prop_map(move |(edges, terminals, vlabels)| {
                let mut graph = OrientedGraph::new(n);
                let mut weights = Vec::new();
                for ((tail, head), weight, label) in edges {
                    // self-loops must carry zero weight
                    let weight = if tail == head {
                        WeightRepr::Plain(0.0)
                    } else {
                        weight
                    };
                    let e = graph.add_edge(tail, head).unwrap();
                    if let Some(l) = label {
                        graph.set_edge_label(e, l);
                    }
                    weights.push(weight);
                }
                for (l, v) in vlabels {
                    graph.set_vertex_label(v, l);
                }
                NetworkFile {
                    graph,
                    weights,
                    terminals,
                }
            })
    })
}

proptest! {
    #[test]
    fn serialize_parse_round_trip(file in network_strategy()) {
        let text = serialize(&file);
        let back = parse(&text).unwrap();
        prop_assert_eq!(back.graph.vertex_count(), file.graph.vertex_count());
        prop_assert_eq!(back.graph.edge_count(), file.graph.edge_count());
        prop_assert_eq!(back.terminals, file.terminals);
        for e in 0..file.graph.edge_count() {
            prop_assert_eq!(back.graph.edge(e).tail, file.graph.edge(e).tail);
            prop_assert_eq!(back.graph.edge(e).head, file.graph.edge(e).head);
            prop_assert_eq!(back.weights[e], file.weights[e]);
            prop_assert_eq!(back.graph.edge_label(e), file.graph.edge_label(e));
        }
        for v in 0..file.graph.vertex_count() {
            prop_assert_eq!(back.graph.vertex_label(v), file.graph.vertex_label(v));
        }
        // a second pass is byte-identical
        prop_assert_eq!(serialize(&back), text);
    }
}
