use nbloc::generators::*;
use nbloc::graph::simplify;
use nbloc::spectra::*;
use nbloc::{Graph, C64};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Dense matrices assembled directly from the edge list.
fn dense_oracle(g: &Graph, kind: MatrixKind) -> Vec<Vec<f64>> {
    let n = g.node_count();
    let k: Vec<f64> = (0..n).map(|i| g.degree(i) as f64).collect();
    let total: f64 = k.iter().sum();
    let mut a = vec![vec![0.0; n]; n];
    for (i, j) in g.edges() {
        a[i][j] = 1.0;
        a[j][i] = 1.0;
    }
    match kind {
        MatrixKind::Adjacency => a,
        MatrixKind::Laplacian => (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| if i == j { k[i] } else { -a[i][j] })
                    .collect()
            })
            .collect(),
        MatrixKind::NormLaplacian => (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| (if i == j { 1.0 } else { 0.0 }) - a[i][j] / (k[i] * k[j]).sqrt())
                    .collect()
            })
            .collect(),
        MatrixKind::Modularity => (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| (a[i][j] - k[i] * k[j] / total) / total)
                    .collect()
            })
            .collect(),
        MatrixKind::NonBacktracking => {
            let mut b = vec![vec![0.0; 2 * n]; 2 * n];
            for i in 0..n {
                b[i][n + i] = k[i] - 1.0;
                b[n + i][i] = -1.0;
                for j in 0..n {
                    b[n + i][n + j] = a[i][j];
                }
            }
            b
        }
    }
}

fn random_connected(n: usize, extra: usize, seed: u64) -> Graph {
    // random spanning tree plus extra links
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges: Vec<(usize, usize)> = (1..n).map(|v| (v, rng.random_range(0..v))).collect();
    edges.extend((0..extra).map(|_| (rng.random_range(0..n), rng.random_range(0..n))));
    simplify(&edges, n).unwrap()
}

fn apply(op: &dyn MatrixOperator<f64>, x: &[f64]) -> Vec<f64> {
    let mut y = vec![0.0; op.dim()];
    op.apply(x, &mut y);
    y
}

fn matvec(m: &[Vec<f64>], x: &[f64]) -> Vec<f64> {
    m.iter()
        .map(|row| row.iter().zip(x).map(|(a, b)| a * b).sum())
        .collect()
}

fn close(a: C64, b: C64, tol: f64) -> bool {
    (a - b).norm() <= tol * b.norm().max(1.0)
}

/// Every expected value is matched by a distinct computed one.
fn multiset_match(got: &[C64], expected: &[C64], tol: f64) -> bool {
    let mut used = vec![false; got.len()];
    expected.iter().all(|e| {
        let hit = (0..got.len()).find(|&i| !used[i] && close(got[i], *e, tol));
        hit.map(|i| used[i] = true).is_some()
    })
}

#[test]
fn operators_match_dense_assembly() {
    let g = random_connected(50, 60, 3);
    for kind in MatrixKind::ALL {
        let op = build_operator::<f64>(&g, kind).unwrap();
        let dense = op.to_dense();
        let oracle = dense_oracle(&g, kind);
        for (r, row) in oracle.iter().enumerate() {
            for (c, &v) in row.iter().enumerate() {
                let tol = if kind == MatrixKind::Laplacian || kind == MatrixKind::Adjacency {
                    0.0
                } else {
                    1e-15
                };
                assert!((dense[(r, c)] - v).abs() <= tol, "{kind} entry ({r},{c})");
            }
        }
    }
}

#[test]
fn modularity_matrix_free_action_matches_dense() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for n in [30, 120, 200] {
        let g = random_connected(n, n, n as u64);
        let op = Modularity::<f64>::new(&g).unwrap();
        let oracle = dense_oracle(&g, MatrixKind::Modularity);
        let k: Vec<f64> = (0..n).map(|i| g.degree(i) as f64).collect();
        let x: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
        for v in [k, x] {
            let fast = apply(&op, &v);
            let slow = matvec(&oracle, &v);
            let scale = slow.iter().fold(0.0f64, |m, y| m.max(y.abs()));
            for (a, b) in fast.iter().zip(&slow) {
                assert!((a - b).abs() <= 1e-12 * scale);
            }
        }
    }
}

#[test]
fn small_operator_examples() {
    let tri = simplify(&[(0, 1), (1, 2), (2, 0)], 3).unwrap();
    assert_eq!(apply(&Laplacian::<f64>::new(&tri), &[1.0; 3]), vec![0.0; 3]);

    let k2 = simplify(&[(0, 1)], 2).unwrap();
    let pairs = dense_eig(&NormLaplacian::<f64>::new(&k2).unwrap()).unwrap();
    assert!(pairs[0].value.re.abs() < 1e-15 && (pairs[1].value.re - 2.0).abs() < 1e-15);

    let reg = regular_graph(30, 4, RngSeed(1)).unwrap();
    let m = apply(&Modularity::<f64>::new(&reg).unwrap(), &[1.0; 30]);
    assert!(m.iter().all(|v| v.abs() < 1e-15));
}

#[test]
fn triangle_nonbacktracking_spectrum() {
    let g = simplify(&[(0, 1), (1, 2), (2, 0)], 3).unwrap();
    // each adjacency eigenvalue lambda of the 3-cycle gives the roots of
    // mu^2 - lambda mu + 1 = 0
    let mut expected = Vec::new();
    for lambda in [2.0f64, -1.0, -1.0] {
        let disc = C64::new(lambda * lambda - 4.0, 0.0).sqrt();
        expected.push((C64::new(lambda, 0.0) + disc) / 2.0);
        expected.push((C64::new(lambda, 0.0) - disc) / 2.0);
    }
    let got: Vec<C64> = dense_eig(&NonBacktracking::<f64>::new(&g).unwrap())
        .unwrap()
        .iter()
        .map(|p| p.value)
        .collect();
    assert!(multiset_match(&got, &expected, 1e-10), "{got:?}");
}

#[test]
fn path_nonbacktracking_spectrum() {
    let g = simplify(&[(0, 1), (1, 2)], 3).unwrap();
    // characteristic polynomial mu^4 (mu^2 - 1)
    let expected: Vec<C64> = [0.0, 0.0, 0.0, 0.0, 1.0, -1.0]
        .iter()
        .map(|&x| C64::new(x, 0.0))
        .collect();
    let got: Vec<C64> = dense_eig(&NonBacktracking::<f64>::new(&g).unwrap())
        .unwrap()
        .iter()
        .map(|p| p.value)
        .collect();
    assert!(multiset_match(&got, &expected, 1e-10), "{got:?}");
}

#[test]
fn dense_results_meet_their_contracts() {
    let g = random_connected(40, 30, 5);
    for kind in MatrixKind::ALL {
        let op = build_operator::<f64>(&g, kind).unwrap();
        let pairs = dense_eig(op.as_ref()).unwrap();
        assert_eq!(pairs.len(), op.dim());
        let bound = op.norm_bound();
        for p in &pairs {
            assert!(p.residual <= 1e-8 * bound, "{kind} residual {}", p.residual);
            if op.is_symmetric() {
                assert!(p.value.im.abs() <= 1e-10);
            }
        }
        if kind == MatrixKind::NonBacktracking {
            // closed under conjugation
            let values: Vec<C64> = pairs.iter().map(|p| p.value).collect();
            let conj: Vec<C64> = values.iter().map(|v| v.conj()).collect();
            assert!(multiset_match(&values, &conj, 1e-7));
        }
    }
    assert!(dense_eig(&Laplacian::<f64>::new(&Graph::empty(5)))
        .unwrap()
        .iter()
        .all(|p| p.value.norm() == 0.0));
}

#[test]
fn krylov_matches_dense_on_small_graphs() {
    for seed in 0..6 {
        let g = random_connected(80, 90, 100 + seed);
        for (kind, which) in [
            (MatrixKind::Laplacian, Which::Smallest),
            (MatrixKind::NormLaplacian, Which::Smallest),
            (MatrixKind::Modularity, Which::LargestReal),
            (MatrixKind::Adjacency, Which::LargestMagnitude),
            (MatrixKind::NonBacktracking, Which::LargestReal),
            (MatrixKind::NonBacktracking, Which::LargestMagnitude),
        ] {
            let op = build_operator::<f64>(&g, kind).unwrap();
            let opts = KrylovOptions::default().with_seed(seed);
            let pairs = topk_eigs(op.as_ref(), 4, which, &opts).unwrap();
            let tol = opts.tolerance_for(op.is_symmetric());
            let dense: Vec<C64> = dense_eig(op.as_ref())
                .unwrap()
                .iter()
                .map(|p| p.value)
                .collect();
            for p in &pairs {
                assert!(p.residual <= tol, "{kind} residual {}", p.residual);
                assert!(
                    dense.iter().any(|d| close(p.value, *d, 1e-8)),
                    "{kind} {which:?} value {} not in dense spectrum",
                    p.value
                );
            }
            if op.is_symmetric() {
                for (i, p) in pairs.iter().enumerate() {
                    assert!(p.value.im.abs() <= 1e-10);
                    for q in &pairs[..i] {
                        let dot: C64 = p
                            .vector
                            .iter()
                            .zip(&q.vector)
                            .map(|(a, b)| a.conj() * b)
                            .sum();
                        assert!(dot.norm() <= 1e-8);
                    }
                }
            }
        }
    }
}

#[test]
fn path_laplacian_smallest_two() {
    let g = simplify(&[(0, 1), (1, 2)], 3).unwrap();
    let pairs = topk_eigs(
        &Laplacian::<f64>::new(&g),
        2,
        Which::Smallest,
        &KrylovOptions::default(),
    )
    .unwrap();
    assert!(pairs[0].value.re.abs() < 1e-10);
    assert!((pairs[1].value.re - 1.0).abs() < 1e-10);
}

#[test]
fn modularity_top_two_on_sbm() {
    let params = SbmParams::new(100, 8.0, 2.0).unwrap();
    let g = sbm_sample(&params, RngSeed(3)).unwrap();
    let op = Modularity::<f64>::new(&g).unwrap();
    let pairs = topk_eigs(&op, 2, Which::LargestReal, &KrylovOptions::default()).unwrap();
    let dense = dense_eig(&op).unwrap();
    let top: Vec<f64> = dense.iter().rev().take(2).map(|p| p.value.re).collect();
    for (p, d) in pairs.iter().zip(top) {
        assert!((p.value.re - d).abs() <= 1e-8 * d.abs());
    }
}

#[test]
fn real_eigenvalues_match_dense_on_tree_like_graph() {
    for seed in 0..4 {
        let g = random_connected(70, 12, seed);
        let op = NonBacktracking::<f64>::new(&g).unwrap();
        let k = 3;
        let found = largest_real_eigs(
            &op,
            k,
            1e-8,
            RealSearch::RealPart,
            &KrylovOptions::default(),
        )
        .unwrap();
        let dense = dense_eig(&op).unwrap();
        // real values among the k + 2 rightmost dense eigenvalues
        let cut = dense[k + 1].value.re;
        let expected: Vec<f64> = real_filter(dense, 1e-8)
            .into_iter()
            .map(|p| p.value.re)
            .filter(|&v| v >= cut - 1e-9)
            .take(k)
            .collect();
        let got: Vec<f64> = found.real.iter().map(|p| p.value.re).collect();
        assert_eq!(got.len(), expected.len(), "{got:?} vs {expected:?}");
        for (a, b) in got.iter().zip(&expected) {
            assert!((a - b).abs() <= 1e-8 * b.abs().max(1.0));
        }
        for p in &found.real {
            let v = nb_node_part(p).unwrap();
            assert!(ihara_residual(&g, p.value, &v) <= 10.0 * 1e-8);
        }
    }
}

#[test]
fn magnitude_search_agrees_with_real_part_search() {
    // Perron value and the motif value both lie outside the bulk
    let params = SbmParams::from_mean_degree(200, 3.0, 2.0).unwrap();
    let (base, _) = sbm_sample(&params, RngSeed(2)).unwrap().largest_component();
    let g = attach_motif_pair(&base, MotifSpec::Clique { n: 6 }, RngSeed(3)).unwrap();
    let op = NonBacktracking::<f64>::new(&g).unwrap();
    let opts = KrylovOptions::default();
    let a = largest_real_eigs(&op, 2, 1e-8, RealSearch::RealPart, &opts).unwrap();
    let b = largest_real_eigs(&op, 2, 1e-8, RealSearch::Magnitude, &opts).unwrap();
    assert_eq!(a.real.len(), 2);
    for (p, q) in a.real.iter().zip(&b.real) {
        assert!((p.value.re - q.value.re).abs() < 1e-9);
    }
}

#[test]
fn leading_value_of_sparse_sbm_is_near_mean_degree() {
    let params = SbmParams::from_mean_degree(1000, 3.0, 1.0).unwrap();
    let mut mean = 0.0;
    for s in 0..5 {
        let (g, _) = sbm_sample(&params, RngSeed(s)).unwrap().largest_component();
        let op = NonBacktracking::<f64>::new(&g).unwrap();
        let top = largest_real_eigs(
            &op,
            1,
            1e-8,
            RealSearch::RealPart,
            &KrylovOptions::default(),
        )
        .unwrap();
        mean += top.real[0].value.re / 5.0;
    }
    assert!((mean - 3.0).abs() <= 0.15, "mean Perron value {mean}");

    // dense cross-check at N = 100
    let params = SbmParams::from_mean_degree(100, 3.0, 1.0).unwrap();
    let (g, _) = sbm_sample(&params, RngSeed(1)).unwrap().largest_component();
    let op = NonBacktracking::<f64>::new(&g).unwrap();
    let top = largest_real_eigs(
        &op,
        1,
        1e-8,
        RealSearch::RealPart,
        &KrylovOptions::default(),
    )
    .unwrap();
    let dense = real_filter(dense_eig(&op).unwrap(), 1e-8);
    assert!((top.real[0].value.re - dense[0].value.re).abs() < 1e-8);
}

#[test]
fn motif_eigenvalue_is_among_top_real_values() {
    let params = SbmParams::from_mean_degree(200, 3.0, 4.0).unwrap();
    let (base, _) = sbm_sample(&params, RngSeed(7)).unwrap().largest_component();
    let g = attach_motif_pair(&base, MotifSpec::Clique { n: 6 }, RngSeed(8)).unwrap();
    let op = NonBacktracking::<f64>::new(&g).unwrap();
    let pairs = topk_eigs(&op, 3, Which::LargestReal, &KrylovOptions::default()).unwrap();
    let mu = (5.0 + 5.0f64.sqrt()) / 2.0;
    assert!(pairs
        .iter()
        .any(|p| (p.value.re - mu).abs() < 1e-8 && p.value.im.abs() < 1e-8));
}

#[test]
fn single_precision_solvers() {
    let g = random_connected(60, 40, 2);
    let op = Laplacian::<f32>::new(&g);
    let opts = KrylovOptions::<f32>::default().with_tol(1e-4);
    let pairs = topk_eigs(&op, 2, Which::Smallest, &opts).unwrap();
    let reference = dense_eig(&Laplacian::<f64>::new(&g)).unwrap();
    assert!(pairs[0].value.re.abs() < 1e-4);
    assert!((pairs[1].value.re as f64 - reference[1].value.re).abs() < 1e-4);
}

#[test]
fn krylov_parameter_errors() {
    let g = random_connected(10, 0, 1);
    let op = Laplacian::<f64>::new(&g);
    assert!(topk_eigs(&op, 0, Which::Smallest, &KrylovOptions::default()).is_err());
    assert!(topk_eigs(&op, 10, Which::Smallest, &KrylovOptions::default()).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn operators_are_linear(n in 3usize..40, extra in 0usize..40, seed in any::<u64>(),
                            alpha in -3.0f64..3.0, beta in -3.0f64..3.0) {
        let g = random_connected(n, extra, seed);
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 1);
        for kind in MatrixKind::ALL {
            let op = build_operator::<f64>(&g, kind).unwrap();
            let d = op.dim();
            let x: Vec<f64> = (0..d).map(|_| rng.random_range(-1.0..1.0)).collect();
            let y: Vec<f64> = (0..d).map(|_| rng.random_range(-1.0..1.0)).collect();
            let combo: Vec<f64> = x.iter().zip(&y).map(|(a, b)| alpha * a + beta * b).collect();
            let lhs = apply(op.as_ref(), &combo);
            let (ax, ay) = (apply(op.as_ref(), &x), apply(op.as_ref(), &y));
            let scale = lhs.iter().fold(1e-300f64, |m, v| m.max(v.abs()));
            for i in 0..d {
                prop_assert!((lhs[i] - (alpha * ax[i] + beta * ay[i])).abs() <= 1e-12 * scale.max(1.0));
            }
        }
    }
}

/// A 2x2 Jordan block at `lambda` followed by a diagonal of smaller values.
struct JordanBlock {
    lambda: f64,
    rest: Vec<f64>,
}

impl MatrixOperator<f64> for JordanBlock {
    fn dim(&self) -> usize {
        2 + self.rest.len()
    }

    fn is_symmetric(&self) -> bool {
        false
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        y[0] = self.lambda * x[0] + x[1];
        y[1] = self.lambda * x[1];
        for (i, d) in self.rest.iter().enumerate() {
            y[i + 2] = d * x[i + 2];
        }
    }

    fn name(&self) -> &'static str {
        "jordan"
    }

    fn norm_bound(&self) -> f64 {
        self.lambda.abs() + 1.0
    }
}

#[test]
fn krylov_resolves_defective_eigenvalue() {
    let op = JordanBlock {
        lambda: 2.0,
        rest: (0..60).map(|i| 1.5 * (i as f64 / 60.0) - 0.5).collect(),
    };
    let pairs = topk_eigs(&op, 3, Which::LargestReal, &KrylovOptions::default()).unwrap();
    // without merging, the pair splits by about sqrt(tol)
    for p in &pairs[..2] {
        assert!((p.value - C64::new(2.0, 0.0)).norm() < 1e-12, "{}", p.value);
        assert!(p.residual < 1e-10);
        assert!(p.vector[0].norm() > 1.0 - 1e-10);
    }
    assert!((pairs[2].value.re - 0.975).abs() < 1e-8);
}
