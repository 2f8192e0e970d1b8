use rand::seq::index::sample;

use super::regular::regular_edges;
use super::RngSeed;
use crate::error::{Error, Result};
use crate::graph::{Graph, MotifPair, MotifRole};

/// Shape of the planted subgraph.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MotifSpec {
    /// Complete graph on `n` nodes.
    Clique { n: usize },
    /// Random `inner_degree`-regular graph on `size` nodes.
    Regular { size: usize, inner_degree: usize },
}

impl MotifSpec {
    pub fn validate(&self) -> Result<()> {
        match *self {
            MotifSpec::Clique { n } if n < 3 => Err(Error::Parameter(format!(
                "clique motif needs n >= 3, got {n}"
            ))),
            MotifSpec::Regular { size, inner_degree } => {
                if size < 3 || inner_degree < 2 {
                    Err(Error::Parameter(format!(
                        "regular motif needs size >= 3 and inner degree >= 2 (got {size}, {inner_degree})"
                    )))
                } else if inner_degree >= size || (size * inner_degree) % 2 != 0 {
                    Err(Error::Parameter(format!(
                        "no {inner_degree}-regular graph on {size} nodes"
                    )))
                } else {
                    Ok(())
                }
            }
            _ => Ok(()),
        }
    }

    /// `|Omega|`.
    pub fn size(&self) -> usize {
        match *self {
            MotifSpec::Clique { n } => n,
            MotifSpec::Regular { size, .. } => size,
        }
    }

    /// Degree inside the motif, `c - 1`.
    pub fn inner_degree(&self) -> usize {
        match *self {
            MotifSpec::Clique { n } => n - 1,
            MotifSpec::Regular { inner_degree, .. } => inner_degree,
        }
    }

    /// Degree of a motif node once its boundary link is added, `c`.
    pub fn attached_degree(&self) -> usize {
        self.inner_degree() + 1
    }

    fn edges(&self, seed: RngSeed) -> Result<Vec<(usize, usize)>> {
        match *self {
            MotifSpec::Clique { n } => Ok((0..n)
                .flat_map(|a| (a + 1..n).map(move |b| (a, b)))
                .collect()),
            MotifSpec::Regular { size, inner_degree } => {
                regular_edges(size, inner_degree, &mut seed.rng())
            }
        }
    }
}

/// Plants a motif `Omega` and its copy `Omega~` on a connected graph.
///
/// `|Omega|` distinct base nodes are drawn uniformly as the boundary; node
/// `a` of the motif and node `a` of the copy both link to boundary node `a`.
/// Nodes already tagged by an earlier motif are never reused as boundary.
pub fn attach_motif_pair(g: &Graph, spec: MotifSpec, seed: RngSeed) -> Result<Graph> {
    spec.validate()?;
    if !g.is_connected() {
        return Err(Error::Precondition(
            "motif pairs attach to connected graphs".into(),
        ));
    }
    let s = spec.size();
    let candidates: Vec<usize> = (0..g.node_count())
        .filter(|&i| g.role(i) == MotifRole::Base)
        .collect();
    if candidates.len() < s {
        return Err(Error::Parameter(format!(
            "{} base nodes available, motif needs {s} boundary nodes",
            candidates.len()
        )));
    }
    let motif_edges = spec.edges(seed.child(0))?;
    let mut rng = seed.child(1).rng();
    let boundary: Vec<usize> = sample(&mut rng, candidates.len(), s)
        .into_iter()
        .map(|i| candidates[i])
        .collect();

    let mut out = g.clone();
    let first = out.push_nodes(s, MotifRole::Omega);
    let first_tilde = out.push_nodes(s, MotifRole::OmegaTilde);
    for &(a, b) in &motif_edges {
        out.insert_edge(first + a, first + b);
        out.insert_edge(first_tilde + a, first_tilde + b);
    }
    for (a, &node) in boundary.iter().enumerate() {
        out.insert_edge(first + a, node);
        out.insert_edge(first_tilde + a, node);
        out.set_role(node, MotifRole::Boundary);
    }
    out.push_motif(MotifPair {
        omega: (first..first + s).collect(),
        omega_tilde: (first_tilde..first_tilde + s).collect(),
        boundary,
    });
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::regular_graph;

    #[test]
    fn clique_of_three_adds_six_nodes_twelve_edges() {
        let base = regular_graph(20, 3, RngSeed(1)).unwrap();
        assert!(base.is_connected());
        let g = attach_motif_pair(&base, MotifSpec::Clique { n: 3 }, RngSeed(2)).unwrap();
        assert_eq!(g.node_count(), base.node_count() + 6);
        assert_eq!(g.edge_count(), base.edge_count() + 12);
        g.check_invariants().unwrap();
        let m = &g.motifs()[0];
        for a in 0..3 {
            assert_eq!(g.degree(m.omega[a]), 3);
            assert_eq!(g.degree(m.omega_tilde[a]), 3);
        }
    }

    #[test]
    fn spec_validation() {
        assert!(MotifSpec::Clique { n: 2 }.validate().is_err());
        assert!(MotifSpec::Regular {
            size: 5,
            inner_degree: 3
        }
        .validate()
        .is_err());
        assert!(MotifSpec::Regular {
            size: 4,
            inner_degree: 4
        }
        .validate()
        .is_err());
        assert!(MotifSpec::Regular {
            size: 50,
            inner_degree: 5
        }
        .validate()
        .is_ok());
        assert_eq!(MotifSpec::Clique { n: 6 }.attached_degree(), 6);
    }

    #[test]
    fn too_few_base_nodes() {
        let base = regular_graph(4, 3, RngSeed(1)).unwrap();
        let err = attach_motif_pair(&base, MotifSpec::Clique { n: 5 }, RngSeed(0)).unwrap_err();
        assert!(matches!(err, Error::Parameter(_)));
    }

    #[test]
    fn disconnected_base_rejected() {
        let base = Graph::empty(10);
        let err = attach_motif_pair(&base, MotifSpec::Clique { n: 3 }, RngSeed(0)).unwrap_err();
        assert!(matches!(err, Error::Precondition(_)));
    }
}
