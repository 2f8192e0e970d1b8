use std::collections::{BTreeSet, HashSet};
use std::io::Write;

use nbloc_harness::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Independent recount: distinct unordered non-loop pairs and the ids they touch.
fn recount(text: &str) -> (usize, usize) {
    let mut pairs = BTreeSet::new();
    let mut nodes = HashSet::new();
    for line in text.lines() {
        if line.trim_start().starts_with('#') || line.trim().is_empty() {
            continue;
        }
        let f: Vec<&str> = line.split_whitespace().collect();
        if f[0] != f[1] {
            pairs.insert(if f[0] < f[1] {
                (f[0], f[1])
            } else {
                (f[1], f[0])
            });
            nodes.insert(f[0]);
            nodes.insert(f[1]);
        }
    }
    (nodes.len(), pairs.len())
}

#[test]
fn snap_style_file_matches_line_scan() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut text = String::from(
        "# Directed graph: example.txt\n# Nodes: 300 Edges: 1200\n# FromNodeId\tToNodeId\n",
    );
    for _ in 0..1200 {
        let (a, b) = (
            rng.random_range(0..300) * 7 + 1000,
            rng.random_range(0..300) * 7 + 1000,
        );
        text.push_str(&format!("{a}\t{b}\n"));
    }
    let mut file = tempfile::NamedTempFile::new().unwrap();
    file.write_all(text.as_bytes()).unwrap();

    let el = ingest_edge_list(
        file.path(),
        &IngestOptions {
            giant_component: false,
        },
    )
    .unwrap();
    let (nodes, edges) = recount(&text);
    // self-loop-only ids survive as isolated nodes
    let isolated = (0..el.graph.node_count())
        .filter(|&v| el.graph.degree(v) == 0)
        .count();
    assert_eq!(el.graph.node_count() - isolated, nodes);
    assert_eq!(el.graph.edge_count(), edges);
    for (a, b) in el.graph.edges() {
        assert!(
            text.contains(&format!("{}\t{}", el.ids[a], el.ids[b]))
                || text.contains(&format!("{}\t{}", el.ids[b], el.ids[a]))
        );
    }

    let giant = ingest_edge_list(file.path(), &IngestOptions::default()).unwrap();
    assert!(giant.graph.is_connected());
    assert_eq!(giant.ids.len(), giant.graph.node_count());
}

#[test]
fn round_trip_through_written_edge_list() {
    let text = "x y\ny z\nz x\nz w\n";
    let el = parse_edge_list(text.as_bytes(), &IngestOptions::default()).unwrap();
    let mut buf = Vec::new();
    write_edge_list(&el.graph, Some(&el.ids), &mut buf).unwrap();
    let again = parse_edge_list(buf.as_slice(), &IngestOptions::default()).unwrap();
    assert_eq!(again.graph.edge_count(), 4);
    assert_eq!(again.graph.triangle_count(), 1);
}

#[test]
fn missing_file_names_the_path() {
    let err = ingest_edge_list("/nonexistent/edges.txt", &IngestOptions::default()).unwrap_err();
    assert!(err.to_string().contains("/nonexistent/edges.txt"));
}
