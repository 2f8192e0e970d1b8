use std::collections::BTreeSet;

use nbloc::generators::*;
use nbloc::{Error, Graph, MotifRole};

fn edge_set(g: &Graph, relabel: impl Fn(usize) -> usize) -> BTreeSet<(usize, usize)> {
    g.edges()
        .into_iter()
        .map(|(a, b)| {
            let (x, y) = (relabel(a), relabel(b));
            (x.min(y), x.max(y))
        })
        .collect()
}

fn block_counts(g: &Graph) -> (usize, usize) {
    let mut within = 0;
    let mut cross = 0;
    for (a, b) in g.edges() {
        if g.label(a) == g.label(b) {
            within += 1;
        } else {
            cross += 1;
        }
    }
    (within, cross)
}

#[test]
fn sbm_mean_degree_over_twenty_samples() {
    let params = SbmParams::new(1000, 4.5, 1.5).unwrap();
    let mean: f64 = (0..20)
        .map(|s| {
            let g = sbm_sample(&params, RngSeed(s)).unwrap();
            2.0 * g.edge_count() as f64 / 1000.0
        })
        .sum::<f64>()
        / 20.0;
    assert!((mean - 3.0).abs() <= 0.3, "mean degree {mean}");
}

#[test]
fn sbm_block_counts_are_binomial() {
    // 4 sigma on the totals over 100 samples
    let params = SbmParams::new(200, 5.0, 1.0).unwrap();
    let samples = 100;
    let (mut within, mut cross) = (0usize, 0usize);
    for s in 0..samples {
        let (w, c) = block_counts(&sbm_sample(&params, RngSeed(1000 + s)).unwrap());
        within += w;
        cross += c;
    }
    let half = 100.0f64;
    let pairs_within = samples as f64 * 2.0 * half * (half - 1.0) / 2.0;
    let pairs_cross = samples as f64 * half * half;
    for (count, pairs, p) in [
        (within, pairs_within, params.p_in()),
        (cross, pairs_cross, params.p_out()),
    ] {
        let mean = pairs * p;
        let sigma = (pairs * p * (1.0 - p)).sqrt();
        assert!(
            (count as f64 - mean).abs() <= 4.0 * sigma,
            "count {count}, expected {mean} +- {sigma}"
        );
    }
}

#[test]
fn sbm_is_deterministic_per_seed() {
    let params = SbmParams::from_mean_degree(300, 3.0, 2.0).unwrap();
    assert_eq!(
        sbm_sample(&params, RngSeed(5)).unwrap(),
        sbm_sample(&params, RngSeed(5)).unwrap()
    );
    assert_ne!(
        sbm_sample(&params, RngSeed(5)).unwrap(),
        sbm_sample(&params, RngSeed(6)).unwrap()
    );
}

#[test]
fn regular_graph_sweep() {
    for s in 0..200 {
        let g = regular_graph(20, 3, RngSeed(s)).unwrap();
        g.check_invariants().unwrap();
        assert!(g.degree_sequence().iter().all(|&d| d == 3));
    }
    assert_eq!(
        regular_graph(50, 4, RngSeed(3)).unwrap(),
        regular_graph(50, 4, RngSeed(3)).unwrap()
    );
}

#[test]
fn regular_sbm_cross_edges_match_expectation() {
    // c_in - c_out = 2 c0 - 1 with c0 = 3
    let (n, c0) = (10_000, 3);
    let (c_in, c_out) = (5.5, 0.5);
    let g = regular_sbm(n, c0, c_in, c_out, RngSeed(17)).unwrap();
    assert!(g.degree_sequence().iter().all(|&d| d == c0));
    let (_, cross) = block_counts(&g);
    let expect = n as f64 / 8.0;
    assert!(
        (cross as f64 - expect).abs() <= 0.05 * expect,
        "cross edges {cross}, expected about {expect}"
    );
}

#[test]
fn regular_sbm_sweep() {
    for s in 0..20 {
        let g = regular_sbm(500, 4, 6.0, 2.0, RngSeed(s)).unwrap();
        g.check_invariants().unwrap();
        assert!(g.degree_sequence().iter().all(|&d| d == 4));
        assert!(g.labels().iter().all(|l| l.is_some()));
    }
}

#[test]
fn regular_motif_nodes_get_degree_c() {
    let base = regular_sbm(400, 3, 5.5, 0.5, RngSeed(2)).unwrap();
    let (base, _) = base.largest_component();
    for c in [6, 7, 8] {
        let spec = MotifSpec::Regular {
            size: 50,
            inner_degree: c - 1,
        };
        let g = attach_motif_pair(&base, spec, RngSeed(c as u64)).unwrap();
        let m = &g.motifs()[0];
        for (&a, &b) in m.omega.iter().zip(&m.omega_tilde) {
            assert_eq!(g.degree(a), c);
            assert_eq!(g.degree(b), c);
        }
    }
}

#[test]
fn motif_pair_counts_and_mirror_symmetry() {
    let base = regular_graph(60, 3, RngSeed(8)).unwrap();
    for spec in [
        MotifSpec::Clique { n: 5 },
        MotifSpec::Regular {
            size: 10,
            inner_degree: 3,
        },
    ] {
        let g = attach_motif_pair(&base, spec, RngSeed(9)).unwrap();
        let s = spec.size();
        let inner_edges = s * spec.inner_degree() / 2;
        assert_eq!(g.node_count(), base.node_count() + 2 * s);
        assert_eq!(g.edge_count(), base.edge_count() + 2 * inner_edges + 2 * s);
        // swapping each motif node with its copy maps the graph onto itself
        let m = g.motifs()[0].clone();
        let swap = |v: usize| {
            if let Some(a) = m.omega.iter().position(|&x| x == v) {
                m.omega_tilde[a]
            } else if let Some(a) = m.omega_tilde.iter().position(|&x| x == v) {
                m.omega[a]
            } else {
                v
            }
        };
        assert_eq!(edge_set(&g, swap), edge_set(&g, |v| v));
    }
}

#[test]
fn two_motif_pairs_pass_role_checks() {
    let base = regular_graph(80, 3, RngSeed(4)).unwrap();
    let once = attach_motif_pair(&base, MotifSpec::Clique { n: 4 }, RngSeed(1)).unwrap();
    let twice = attach_motif_pair(&once, MotifSpec::Clique { n: 6 }, RngSeed(2)).unwrap();
    twice.check_invariants().unwrap();
    let motifs = twice.motifs();
    assert_eq!(motifs.len(), 2);
    let first: BTreeSet<_> = motifs[0].boundary.iter().collect();
    assert!(motifs[1].boundary.iter().all(|b| !first.contains(b)));
    for m in motifs {
        for (&a, &b) in m.omega.iter().zip(&m.boundary) {
            let boundary_links: Vec<_> = twice
                .neighbors(a)
                .iter()
                .filter(|&&j| twice.role(j) == MotifRole::Boundary)
                .collect();
            assert_eq!(boundary_links, vec![&b]);
        }
    }
}

#[test]
fn motif_attachment_is_deterministic() {
    let base = regular_graph(40, 3, RngSeed(1)).unwrap();
    let spec = MotifSpec::Regular {
        size: 8,
        inner_degree: 3,
    };
    assert_eq!(
        attach_motif_pair(&base, spec, RngSeed(3)).unwrap(),
        attach_motif_pair(&base, spec, RngSeed(3)).unwrap()
    );
}

fn degree_histogram(g: &Graph) -> Vec<usize> {
    let seq = g.degree_sequence();
    let mut h = vec![0; seq.iter().max().map_or(0, |m| m + 1)];
    for d in seq {
        h[d] += 1;
    }
    h
}

#[test]
fn rewiring_keeps_degrees_and_connectivity() {
    let params = SbmParams::from_mean_degree(1000, 5.0, 2.0).unwrap();
    let (base, _) = sbm_sample(&params, RngSeed(12))
        .unwrap()
        .largest_component();
    let before = base.triangle_count();
    for target in [0, 250, 1000] {
        let out = rewire_increase_triangles(&base, target, RngSeed(target as u64), None).unwrap();
        assert_eq!(degree_histogram(&out.graph), degree_histogram(&base));
        assert_eq!(out.graph.degree_sequence(), base.degree_sequence());
        assert!(out.graph.is_connected());
        assert_eq!(out.graph.triangle_count() - before, out.achieved);
        assert!(out.achieved >= target);
    }
    let again = rewire_increase_triangles(&base, 250, RngSeed(250), None).unwrap();
    let first = rewire_increase_triangles(&base, 250, RngSeed(250), None).unwrap();
    assert_eq!(again, first);
}

#[test]
fn rewiring_rejects_degenerate_input() {
    let single = Graph::from_edges(&[(0, 1)], 2).unwrap();
    assert!(matches!(
        rewire_increase_triangles(&single, 1, RngSeed(0), None),
        Err(Error::Precondition(_))
    ));
}
