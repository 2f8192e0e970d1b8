//! Eigenpair selection shared by the experiment drivers.

use nbloc::analysis::{ipr, overlap, sign_partition};
use nbloc::spectra::{
    build_operator, largest_real_eigs, nb_node_part, topk_eigs, EigenPair, MatrixKind, RealSearch,
    Which,
};
use nbloc::{Graph, KrylovOptions64, C64};

/// Solver settings for one sample.
#[derive(Debug, Clone, Copy)]
pub struct SolveParams {
    pub opts: KrylovOptions64,
    pub imag_tol: f64,
    pub search: RealSearch,
}

/// An eigenpair as the experiments use it.
#[derive(Debug, Clone, PartialEq)]
pub struct Selected {
    pub rank: usize,
    pub value: C64,
    /// Unit node-space vector: the eigenvector itself, or the node part for B.
    pub node_vector: Vec<C64>,
    /// IPR of the whole `2N` vector (B only).
    pub full_ipr: Option<f64>,
    pub residual: f64,
    /// Taken from the ranked list because no real value was available.
    pub complex_fallback: bool,
}

impl Selected {
    fn from_pair(rank: usize, kind: MatrixKind, pair: &EigenPair<f64>) -> nbloc::Result<Self> {
        let (node_vector, full_ipr) = if kind == MatrixKind::NonBacktracking {
            (nb_node_part(pair)?, Some(ipr(&pair.vector)?))
        } else {
            (pair.vector.clone(), None)
        };
        Ok(Selected {
            rank,
            value: pair.value,
            node_vector,
            full_ipr,
            residual: pair.residual,
            complex_fallback: false,
        })
    }

    pub fn ipr_node(&self) -> nbloc::Result<f64> {
        ipr(&self.node_vector)
    }

    /// Overlap of the sign split of the vector's real part with the planted
    /// labels, or `None` for unlabelled graphs.
    pub fn overlap(&self, g: &Graph) -> Option<f64> {
        let re: Vec<f64> = self.node_vector.iter().map(|z| z.re).collect();
        overlap(&sign_partition(&re), g).ok()
    }
}

/// Which end of the spectrum the pipelines read for `kind`.
pub fn which_for(kind: MatrixKind) -> Which {
    match kind {
        MatrixKind::Laplacian | MatrixKind::NormLaplacian => Which::Smallest,
        MatrixKind::Adjacency | MatrixKind::Modularity | MatrixKind::NonBacktracking => {
            Which::LargestReal
        }
    }
}

/// The `k` smallest (L, NL) or largest (A, M) eigenpairs, or up to `k`
/// largest real ones (B). `k` is clipped to `dim - 1`.
pub fn leading_pairs(
    g: &Graph,
    kind: MatrixKind,
    k: usize,
    p: &SolveParams,
) -> nbloc::Result<Vec<Selected>> {
    let op = build_operator::<f64>(g, kind)?;
    let k = k.min(op.dim().saturating_sub(1));
    let pairs = if kind == MatrixKind::NonBacktracking {
        largest_real_eigs(op.as_ref(), k, p.imag_tol, p.search, &p.opts)?.real
    } else {
        let mut pairs = topk_eigs(op.as_ref(), k, which_for(kind), &p.opts)?;
        if which_for(kind) == Which::Smallest {
            pairs.sort_by(|a, b| a.value.re.total_cmp(&b.value.re));
        } else {
            pairs.sort_by(|a, b| b.value.re.total_cmp(&a.value.re));
        }
        pairs
    };
    pairs
        .iter()
        .enumerate()
        .map(|(i, pair)| Selected::from_pair(i + 1, kind, pair))
        .collect()
}

/// The two largest real eigenpairs of B. When only one real value is found
/// the pair second by real part stands in for rank 2, flagged as a fallback.
pub fn nb_top_two(g: &Graph, p: &SolveParams) -> nbloc::Result<Vec<Selected>> {
    let op = build_operator::<f64>(g, MatrixKind::NonBacktracking)?;
    let found = largest_real_eigs(op.as_ref(), 2, p.imag_tol, p.search, &p.opts)?;
    let mut out = found
        .real
        .iter()
        .enumerate()
        .map(|(i, pair)| Selected::from_pair(i + 1, MatrixKind::NonBacktracking, pair))
        .collect::<nbloc::Result<Vec<_>>>()?;
    if out.len() < 2 {
        let taken: Vec<C64> = out.iter().map(|s| s.value).collect();
        if let Some(pair) = found.ranked.iter().find(|q| !taken.contains(&q.value)) {
            let mut s = Selected::from_pair(out.len() + 1, MatrixKind::NonBacktracking, pair)?;
            s.complex_fallback = !pair.is_real(p.imag_tol);
            out.push(s);
        }
    }
    Ok(out)
}
