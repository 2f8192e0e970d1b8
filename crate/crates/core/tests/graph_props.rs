use nbloc::generators::{sbm_sample, RngSeed, SbmParams};
use nbloc::graph::simplify;
use nbloc::Graph;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_edges(n: usize, m: usize, seed: u64) -> Vec<(usize, usize)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..m)
        .map(|_| (rng.random_range(0..n), rng.random_range(0..n)))
        .collect()
}

fn brute_force_triangles(g: &Graph) -> usize {
    let n = g.node_count();
    let mut count = 0;
    for a in 0..n {
        for b in a + 1..n {
            for c in b + 1..n {
                if g.has_edge(a, b) && g.has_edge(b, c) && g.has_edge(a, c) {
                    count += 1;
                }
            }
        }
    }
    count
}

fn trace_a_cubed(g: &Graph) -> f64 {
    let n = g.node_count();
    let mut a = vec![vec![0.0f64; n]; n];
    for (i, j) in g.edges() {
        a[i][j] = 1.0;
        a[j][i] = 1.0;
    }
    let mut a2 = vec![vec![0.0f64; n]; n];
    for i in 0..n {
        for k in 0..n {
            if a[i][k] != 0.0 {
                for j in 0..n {
                    a2[i][j] += a[k][j];
                }
            }
        }
    }
    (0..n)
        .map(|i| (0..n).map(|k| a2[i][k] * a[k][i]).sum::<f64>())
        .sum()
}

/// Components by union-find, as sorted node sets.
fn union_find_components(g: &Graph) -> Vec<Vec<usize>> {
    let n = g.node_count();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], mut x: usize) -> usize {
        while p[x] != x {
            p[x] = p[p[x]];
            x = p[x];
        }
        x
    }
    for (a, b) in g.edges() {
        let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
        parent[ra] = rb;
    }
    let mut groups = std::collections::BTreeMap::<usize, Vec<usize>>::new();
    for v in 0..n {
        let r = find(&mut parent, v);
        groups.entry(r).or_default().push(v);
    }
    groups.into_values().collect()
}

#[test]
fn degree_sequence_examples() {
    let tri = simplify(&[(0, 1), (1, 2), (2, 0)], 3).unwrap();
    assert_eq!(tri.degree_sequence(), vec![2, 2, 2]);
    assert_eq!(Graph::empty(1).degree_sequence(), vec![0]);
}

#[test]
fn triangles_match_triple_scan_on_random_graph() {
    let params = SbmParams::new(30, 8.0, 8.0).unwrap();
    for seed in 0..5 {
        let g = sbm_sample(&params, RngSeed(seed)).unwrap();
        assert_eq!(g.triangle_count(), brute_force_triangles(&g));
    }
}

#[test]
fn connectivity_matches_union_find_on_sparse_sbm() {
    let params = SbmParams::from_mean_degree(400, 3.0, 1.0).unwrap();
    for seed in 0..10 {
        let g = sbm_sample(&params, RngSeed(seed)).unwrap();
        let comps = union_find_components(&g);
        assert_eq!(g.is_connected(), comps.len() == 1);
        let (_, count) = g.connected_components();
        assert_eq!(count, comps.len());

        let (giant, map) = g.largest_component();
        let biggest = comps.iter().map(|c| c.len()).max().unwrap();
        assert_eq!(giant.node_count(), biggest);
        assert!(giant.is_connected());
        let mut sorted = map.clone();
        sorted.sort_unstable();
        assert!(comps.contains(&sorted));
        for (new, &old) in map.iter().enumerate() {
            assert_eq!(giant.label(new), g.label(old));
            assert_eq!(giant.degree(new), g.degree(old));
        }
    }
}

#[test]
fn largest_component_examples() {
    let tri_plus = simplify(&[(0, 1), (1, 2), (2, 0)], 4).unwrap();
    let (g, map) = tri_plus.largest_component();
    assert_eq!(g.node_count(), 3);
    assert_eq!(g.triangle_count(), 1);
    assert_eq!(map, vec![0, 1, 2]);

    let path = simplify(&[(0, 1), (1, 2)], 3).unwrap();
    assert!(path.is_connected());
    let (same, map) = path.largest_component();
    assert_eq!(same, path);
    assert_eq!(map, vec![0, 1, 2]);
    assert!(!simplify(&[(0, 1), (2, 3)], 4).unwrap().is_connected());
}

#[test]
fn simplify_cleans_a_thousand_random_pairs() {
    let g = simplify(&random_edges(100, 1000, 1), 100).unwrap();
    g.check_invariants().unwrap();
    assert!(g.edge_count() <= 1000);
}

proptest! {
    #[test]
    fn simplify_is_idempotent(n in 1usize..40, m in 0usize..200, seed in any::<u64>()) {
        let g = simplify(&random_edges(n, m, seed), n).unwrap();
        let again = simplify(&g.edges(), n).unwrap();
        prop_assert_eq!(again, g);
    }

    #[test]
    fn degree_sum_is_twice_edge_count(n in 1usize..60, m in 0usize..300, seed in any::<u64>()) {
        let g = simplify(&random_edges(n, m, seed), n).unwrap();
        prop_assert_eq!(g.degree_sequence().iter().sum::<usize>(), 2 * g.edge_count());
        g.check_invariants().unwrap();
    }

    #[test]
    fn triangles_match_trace_of_a_cubed(n in 3usize..100, density in 0.0f64..0.3, seed in any::<u64>()) {
        let m = ((n * n) as f64 * density / 2.0) as usize;
        let g = simplify(&random_edges(n, m, seed), n).unwrap();
        prop_assert_eq!(g.triangle_count() as f64, trace_a_cubed(&g) / 6.0);
    }

    #[test]
    fn largest_component_is_connected(n in 1usize..80, m in 0usize..120, seed in any::<u64>()) {
        let g = simplify(&random_edges(n, m, seed), n).unwrap();
        let (giant, _) = g.largest_component();
        prop_assert!(giant.is_connected());
    }
}
