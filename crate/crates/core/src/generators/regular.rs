//! Random regular graphs by stub pairing.
//!
//! Stubs are paired one random pair at a time; a pair that would create a
//! self-loop or a repeated edge is redrawn, and when no admissible pair is
//! left the whole pairing restarts from scratch.

use rand::Rng;
use rand_distr::{Binomial, Distribution};

use super::RngSeed;
use crate::error::{Error, Result};
use crate::graph::Graph;

const MAX_RESTARTS: usize = 1000;
/// Random redraws before falling back to an exhaustive scan for admissible pairs.
const REDRAWS: usize = 64;

/// Random `d`-regular simple graph on `n` nodes.
pub fn regular_graph(n: usize, d: usize, seed: RngSeed) -> Result<Graph> {
    let mut rng = seed.rng();
    let edges = regular_edges(n, d, &mut rng)?;
    let mut g = Graph::empty(n);
    for (a, b) in edges {
        g.insert_edge(a, b);
    }
    Ok(g)
}

pub(crate) fn regular_edges<R: Rng>(
    n: usize,
    d: usize,
    rng: &mut R,
) -> Result<Vec<(usize, usize)>> {
    if !(n * d).is_multiple_of(2) {
        return Err(Error::Parameter(format!("n*d = {n}*{d} is odd")));
    }
    if d >= n && !(n == 0 && d == 0) {
        return Err(Error::Parameter(format!(
            "degree {d} must be below node count {n}"
        )));
    }
    for _ in 0..MAX_RESTARTS {
        let mut g = Graph::empty(n);
        let stubs: Vec<usize> = (0..n).flat_map(|v| std::iter::repeat_n(v, d)).collect();
        if pair_within(&mut g, stubs, rng) {
            return Ok(g.edges());
        }
    }
    Err(Error::Resource(format!(
        "no simple {d}-regular pairing on {n} nodes after {MAX_RESTARTS} restarts"
    )))
}

/// Pairs `stubs` among themselves into `g`. Returns false when stuck.
fn pair_within<R: Rng>(g: &mut Graph, mut stubs: Vec<usize>, rng: &mut R) -> bool {
    while stubs.len() >= 2 {
        let pick = (0..REDRAWS)
            .map(|_| {
                let i = rng.random_range(0..stubs.len());
                let mut j = rng.random_range(0..stubs.len() - 1);
                if j >= i {
                    j += 1;
                }
                (i, j)
            })
            .find(|&(i, j)| stubs[i] != stubs[j] && !g.has_edge(stubs[i], stubs[j]))
            .or_else(|| {
                let admissible: Vec<(usize, usize)> = (0..stubs.len())
                    .flat_map(|i| (i + 1..stubs.len()).map(move |j| (i, j)))
                    .filter(|&(i, j)| stubs[i] != stubs[j] && !g.has_edge(stubs[i], stubs[j]))
                    .collect();
                (!admissible.is_empty()).then(|| admissible[rng.random_range(0..admissible.len())])
            });
        let Some((i, j)) = pick else {
            return false;
        };
        g.insert_edge(stubs[i], stubs[j]);
        let (hi, lo) = if i > j { (i, j) } else { (j, i) };
        stubs.swap_remove(hi);
        stubs.swap_remove(lo);
    }
    stubs.is_empty()
}

/// Pairs each stub of `left` with one stub of `right` (equal lengths).
fn pair_across<R: Rng>(
    g: &mut Graph,
    mut left: Vec<usize>,
    mut right: Vec<usize>,
    rng: &mut R,
) -> bool {
    debug_assert_eq!(left.len(), right.len());
    while !left.is_empty() {
        let pick = (0..REDRAWS)
            .map(|_| {
                (
                    rng.random_range(0..left.len()),
                    rng.random_range(0..right.len()),
                )
            })
            .find(|&(i, j)| !g.has_edge(left[i], right[j]))
            .or_else(|| {
                let admissible: Vec<(usize, usize)> = (0..left.len())
                    .flat_map(|i| (0..right.len()).map(move |j| (i, j)))
                    .filter(|&(i, j)| !g.has_edge(left[i], right[j]))
                    .collect();
                (!admissible.is_empty()).then(|| admissible[rng.random_range(0..admissible.len())])
            });
        let Some((i, j)) = pick else {
            return false;
        };
        g.insert_edge(left[i], right[j]);
        left.swap_remove(i);
        right.swap_remove(j);
    }
    true
}

/// `c0`-regular graph with two planted blocks of `n/2` nodes.
///
/// The number of cross-block edges is drawn from `Binomial(n^2/4, c_out/n)`
/// (lowered by one if needed so each block keeps an even number of internal
/// stubs); cross stubs are chosen uniformly among each block's stubs and paired
/// across, the remaining stubs are paired inside their block. Requires
/// `c_in + c_out = 2 c0`.
pub fn regular_sbm(n: usize, c0: usize, c_in: f64, c_out: f64, seed: RngSeed) -> Result<Graph> {
    if !n.is_multiple_of(2) || n == 0 {
        return Err(Error::Parameter(format!(
            "node count {n} must be even and positive"
        )));
    }
    if !(c_in >= 0.0 && c_out >= 0.0) || (c_in + c_out - 2.0 * c0 as f64).abs() > 1e-9 {
        return Err(Error::Parameter(format!(
            "need c_in + c_out = 2*c0 with non-negative rates (c_in={c_in}, c_out={c_out}, c0={c0})"
        )));
    }
    let half = n / 2;
    if c0 >= half {
        return Err(Error::Parameter(format!(
            "c0 = {c0} too large for blocks of {half}"
        )));
    }
    let stubs_per_block = half * c0;
    let mut rng = seed.rng();
    let p_out = c_out / n as f64;
    if p_out > 1.0 {
        return Err(Error::Parameter(format!("c_out = {c_out} exceeds N")));
    }
    let pairs = (half * half) as u64;
    let mut cross = Binomial::new(pairs, p_out)
        .map_err(|e| Error::Parameter(e.to_string()))?
        .sample(&mut rng) as usize;
    cross = cross.min(stubs_per_block);
    if !(stubs_per_block - cross).is_multiple_of(2) {
        if cross > 0 {
            cross -= 1;
        } else {
            cross += 1;
        }
    }
    if cross > stubs_per_block {
        return Err(Error::Parameter(format!(
            "stub counts infeasible: {stubs_per_block} stubs per block, {cross} cross"
        )));
    }

    for _ in 0..MAX_RESTARTS {
        let mut g = Graph::empty(n);
        let mut block_stubs = |offset: usize| -> Vec<usize> {
            let mut s: Vec<usize> = (offset..offset + half)
                .flat_map(|v| std::iter::repeat_n(v, c0))
                .collect();
            // partial Fisher-Yates: the first `cross` entries become cross stubs
            for i in 0..cross.min(s.len()) {
                let j = rng.random_range(i..s.len());
                s.swap(i, j);
            }
            s
        };
        let mut one = block_stubs(0);
        let mut two = block_stubs(half);
        let inner_one = one.split_off(cross);
        let inner_two = two.split_off(cross);
        if pair_across(&mut g, one, two, &mut rng)
            && pair_within(&mut g, inner_one, &mut rng)
            && pair_within(&mut g, inner_two, &mut rng)
        {
            let labels = (0..n).map(|i| Some(if i < half { 1 } else { 2 })).collect();
            return g.with_labels(labels);
        }
    }
    Err(Error::Resource(format!(
        "no simple block-regular pairing after {MAX_RESTARTS} restarts"
    )))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn three_regular_on_four_nodes_is_k4() {
        let g = regular_graph(4, 3, RngSeed(3)).unwrap();
        assert_eq!(g.edge_count(), 6);
        assert_eq!(g.triangle_count(), 4);
    }

    #[test]
    fn degrees_exact() {
        let g = regular_graph(50, 5, RngSeed(11)).unwrap();
        assert!(g.degree_sequence().iter().all(|&d| d == 5));
        g.check_invariants().unwrap();
    }

    #[test]
    fn dense_regular_motif_sizes_are_feasible() {
        // inner degree 7 on 50 nodes is what the c = 8 motif needs
        let g = regular_graph(50, 7, RngSeed(2)).unwrap();
        assert!(g.degree_sequence().iter().all(|&d| d == 7));
    }

    #[test]
    fn infeasible_parameters() {
        assert!(matches!(
            regular_graph(5, 3, RngSeed(0)),
            Err(Error::Parameter(_))
        ));
        assert!(matches!(
            regular_graph(4, 4, RngSeed(0)),
            Err(Error::Parameter(_))
        ));
        assert!(matches!(
            regular_sbm(100, 3, 5.0, 2.0, RngSeed(0)),
            Err(Error::Parameter(_))
        ));
        assert!(matches!(
            regular_sbm(101, 3, 5.0, 1.0, RngSeed(0)),
            Err(Error::Parameter(_))
        ));
    }

    #[test]
    fn no_cross_rate_gives_two_disjoint_blocks() {
        let g = regular_sbm(40, 3, 6.0, 0.0, RngSeed(5)).unwrap();
        assert!(g.degree_sequence().iter().all(|&d| d == 3));
        for (a, b) in g.edges() {
            assert_eq!(g.label(a), g.label(b));
        }
        assert!(!g.is_connected());
    }
}
