//! Simple undirected graphs with planted-block labels and motif roles.
//!
//! Nodes are `0..n`. Adjacency lists are kept sorted and duplicate free, so
//! edge lookup is a binary search and two graphs built from the same edge set
//! compare equal.

use std::collections::VecDeque;

use crate::error::{Error, Result};

/// Role of a node with respect to planted motif pairs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum MotifRole {
    /// Node of the base graph that is not attached to a motif.
    #[default]
    Base,
    /// Base node that a motif node and its copy both link to.
    Boundary,
    /// Node of the original motif.
    Omega,
    /// Node of the copied motif.
    OmegaTilde,
}

/// One planted motif pair. Index `a` pairs `omega[a]` with its copy
/// `omega_tilde[a]`; both link to `boundary[a]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MotifPair {
    pub omega: Vec<usize>,
    pub omega_tilde: Vec<usize>,
    pub boundary: Vec<usize>,
}

impl MotifPair {
    pub fn size(&self) -> usize {
        self.omega.len()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Graph {
    adjacency: Vec<Vec<usize>>,
    labels: Vec<Option<u8>>,
    roles: Vec<MotifRole>,
    motifs: Vec<MotifPair>,
}

/// Builds a simple graph from an arbitrary list of node pairs.
///
/// Direction is ignored, self-loops are dropped and repeated links collapse to
/// a single edge.
pub fn simplify(edges: &[(usize, usize)], n: usize) -> Result<Graph> {
    let mut adjacency = vec![Vec::new(); n];
    for (idx, &(a, b)) in edges.iter().enumerate() {
        if a >= n || b >= n {
            return Err(Error::Input(format!(
                "edge #{idx} ({a}, {b}) has an endpoint outside 0..{n}"
            )));
        }
        if a != b {
            adjacency[a].push(b);
            adjacency[b].push(a);
        }
    }
    for list in &mut adjacency {
        list.sort_unstable();
        list.dedup();
    }
    Ok(Graph {
        adjacency,
        labels: vec![None; n],
        roles: vec![MotifRole::Base; n],
        motifs: Vec::new(),
    })
}

impl Graph {
    /// Graph on `n` nodes without edges.
    pub fn empty(n: usize) -> Self {
        Graph {
            adjacency: vec![Vec::new(); n],
            labels: vec![None; n],
            roles: vec![MotifRole::Base; n],
            motifs: Vec::new(),
        }
    }

    pub fn from_edges(edges: &[(usize, usize)], n: usize) -> Result<Self> {
        simplify(edges, n)
    }

    /// Attaches planted block labels (1 or 2; `None` for unlabeled nodes).
    pub fn with_labels(mut self, labels: Vec<Option<u8>>) -> Result<Self> {
        if labels.len() != self.node_count() {
            return Err(Error::Input(format!(
                "{} labels for {} nodes",
                labels.len(),
                self.node_count()
            )));
        }
        if let Some(bad) = labels.iter().flatten().find(|&&l| l != 1 && l != 2) {
            return Err(Error::Input(format!("block label {bad} is not 1 or 2")));
        }
        self.labels = labels;
        Ok(self)
    }

    pub fn node_count(&self) -> usize {
        self.adjacency.len()
    }

    pub fn edge_count(&self) -> usize {
        self.adjacency.iter().map(Vec::len).sum::<usize>() / 2
    }

    pub fn neighbors(&self, node: usize) -> &[usize] {
        &self.adjacency[node]
    }

    pub fn degree(&self, node: usize) -> usize {
        self.adjacency[node].len()
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        self.adjacency[a].binary_search(&b).is_ok()
    }

    /// Every edge once, as `(a, b)` with `a < b`, in lexicographic order.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::with_capacity(self.edge_count());
        for (a, list) in self.adjacency.iter().enumerate() {
            out.extend(list.iter().filter(|&&b| b > a).map(|&b| (a, b)));
        }
        out
    }

    pub fn labels(&self) -> &[Option<u8>] {
        &self.labels
    }

    pub fn label(&self, node: usize) -> Option<u8> {
        self.labels[node]
    }

    pub fn roles(&self) -> &[MotifRole] {
        &self.roles
    }

    pub fn role(&self, node: usize) -> MotifRole {
        self.roles[node]
    }

    pub fn motifs(&self) -> &[MotifPair] {
        &self.motifs
    }

    pub fn degree_sequence(&self) -> Vec<usize> {
        self.adjacency.iter().map(Vec::len).collect()
    }

    pub fn min_degree(&self) -> Option<usize> {
        self.adjacency.iter().map(Vec::len).min()
    }

    /// Number of unordered node triples that are pairwise adjacent.
    pub fn triangle_count(&self) -> usize {
        let mut total = 0;
        for (u, nu) in self.adjacency.iter().enumerate() {
            for &v in nu.iter().filter(|&&v| v > u) {
                // common neighbours w > v, so each triangle u < v < w counts once
                total += count_common_from(nu, &self.adjacency[v], v + 1);
            }
        }
        total
    }

    /// Number of common neighbours of `a` and `b`.
    pub fn common_neighbors(&self, a: usize, b: usize) -> usize {
        count_common_from(&self.adjacency[a], &self.adjacency[b], 0)
    }

    /// Component id per node; ids are assigned in order of the smallest node.
    pub fn connected_components(&self) -> (Vec<usize>, usize) {
        let n = self.node_count();
        let mut comp = vec![usize::MAX; n];
        let mut queue = VecDeque::new();
        let mut count = 0;
        for start in 0..n {
            if comp[start] != usize::MAX {
                continue;
            }
            comp[start] = count;
            queue.push_back(start);
            while let Some(u) = queue.pop_front() {
                for &v in &self.adjacency[u] {
                    if comp[v] == usize::MAX {
                        comp[v] = count;
                        queue.push_back(v);
                    }
                }
            }
            count += 1;
        }
        (comp, count)
    }

    /// True iff a traversal from node 0 reaches every node. The empty graph is
    /// reported as connected.
    pub fn is_connected(&self) -> bool {
        self.node_count() == 0 || self.connected_components().1 == 1
    }

    /// Induced subgraph on the largest connected component, reindexed
    /// contiguously in increasing order of the original ids.
    ///
    /// Returns the subgraph and `map` with `map[new] = old`. Ties between
    /// equally large components go to the one containing the smallest node.
    /// Motif pairs that are not wholly inside the component are dropped.
    pub fn largest_component(&self) -> (Graph, Vec<usize>) {
        let (comp, count) = self.connected_components();
        if count <= 1 {
            return (self.clone(), (0..self.node_count()).collect());
        }
        let mut sizes = vec![0usize; count];
        for &c in &comp {
            sizes[c] += 1;
        }
        let best = (0..count)
            .max_by(|&a, &b| sizes[a].cmp(&sizes[b]).then(b.cmp(&a)))
            .unwrap_or(0);
        let keep: Vec<usize> = (0..self.node_count())
            .filter(|&i| comp[i] == best)
            .collect();
        (self.induced_subgraph(&keep), keep)
    }

    /// Induced subgraph on `nodes` (which must be strictly increasing);
    /// node `nodes[i]` becomes node `i`.
    pub fn induced_subgraph(&self, nodes: &[usize]) -> Graph {
        let mut new_index = vec![usize::MAX; self.node_count()];
        for (new, &old) in nodes.iter().enumerate() {
            new_index[old] = new;
        }
        let adjacency = nodes
            .iter()
            .map(|&old| {
                self.adjacency[old]
                    .iter()
                    .filter_map(|&nb| (new_index[nb] != usize::MAX).then_some(new_index[nb]))
                    .collect::<Vec<_>>()
            })
            .map(|mut l| {
                l.sort_unstable();
                l
            })
            .collect();
        let remap = |list: &[usize]| -> Option<Vec<usize>> {
            list.iter()
                .map(|&o| (new_index[o] != usize::MAX).then_some(new_index[o]))
                .collect()
        };
        let motifs = self
            .motifs
            .iter()
            .filter_map(|m| {
                Some(MotifPair {
                    omega: remap(&m.omega)?,
                    omega_tilde: remap(&m.omega_tilde)?,
                    boundary: remap(&m.boundary)?,
                })
            })
            .collect::<Vec<_>>();
        let mut roles: Vec<MotifRole> = nodes.iter().map(|&o| self.roles[o]).collect();
        // roles of dropped motifs fall back to Base
        let mut in_kept_motif = vec![false; nodes.len()];
        for m in &motifs {
            for &i in m.omega.iter().chain(&m.omega_tilde).chain(&m.boundary) {
                in_kept_motif[i] = true;
            }
        }
        for (i, role) in roles.iter_mut().enumerate() {
            if !in_kept_motif[i] {
                *role = MotifRole::Base;
            }
        }
        Graph {
            adjacency,
            labels: nodes.iter().map(|&o| self.labels[o]).collect(),
            roles,
            motifs,
        }
    }

    /// Checks every structural invariant: no self-loops, sorted duplicate-free
    /// symmetric adjacency, labels in {1, 2}, and consistent motif roles
    /// (each motif node has exactly one boundary neighbour, namely its own).
    pub fn check_invariants(&self) -> Result<()> {
        let n = self.node_count();
        if self.labels.len() != n || self.roles.len() != n {
            return Err(Error::Input("annotation length mismatch".into()));
        }
        for (a, list) in self.adjacency.iter().enumerate() {
            if list.windows(2).any(|w| w[0] >= w[1]) {
                return Err(Error::Input(format!("adjacency of {a} not sorted/unique")));
            }
            for &b in list {
                if b >= n {
                    return Err(Error::Input(format!("neighbour {b} of {a} out of range")));
                }
                if b == a {
                    return Err(Error::Input(format!("self-loop at {a}")));
                }
                if !self.has_edge(b, a) {
                    return Err(Error::Input(format!("edge ({a}, {b}) not symmetric")));
                }
            }
        }
        if let Some(l) = self.labels.iter().flatten().find(|&&l| l != 1 && l != 2) {
            return Err(Error::Input(format!("bad block label {l}")));
        }
        for (idx, m) in self.motifs.iter().enumerate() {
            let s = m.size();
            if m.omega_tilde.len() != s || m.boundary.len() != s {
                return Err(Error::Input(format!("motif {idx}: ragged pair")));
            }
            for a in 0..s {
                let (i, ti, g) = (m.omega[a], m.omega_tilde[a], m.boundary[a]);
                if self.roles[i] != MotifRole::Omega
                    || self.roles[ti] != MotifRole::OmegaTilde
                    || self.roles[g] != MotifRole::Boundary
                {
                    return Err(Error::Input(format!("motif {idx}: role tags inconsistent")));
                }
                for &node in &[i, ti] {
                    let boundary_nbrs: Vec<usize> = self.adjacency[node]
                        .iter()
                        .copied()
                        .filter(|&x| self.roles[x] == MotifRole::Boundary)
                        .collect();
                    if boundary_nbrs != [g] {
                        return Err(Error::Input(format!(
                            "motif {idx}: node {node} must have exactly one boundary neighbour ({g}), found {boundary_nbrs:?}"
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    // --- construction helpers used by the generators ---

    pub(crate) fn insert_edge(&mut self, a: usize, b: usize) -> bool {
        if a == b {
            return false;
        }
        match self.adjacency[a].binary_search(&b) {
            Ok(_) => false,
            Err(pos) => {
                self.adjacency[a].insert(pos, b);
                let pos_b = self.adjacency[b].binary_search(&a).unwrap_err();
                self.adjacency[b].insert(pos_b, a);
                true
            }
        }
    }

    pub(crate) fn remove_edge(&mut self, a: usize, b: usize) -> bool {
        match self.adjacency[a].binary_search(&b) {
            Ok(pos) => {
                self.adjacency[a].remove(pos);
                let pos_b = self.adjacency[b]
                    .binary_search(&a)
                    .expect("adjacency symmetric");
                self.adjacency[b].remove(pos_b);
                true
            }
            Err(_) => false,
        }
    }

    /// Appends `count` isolated nodes with the given role; returns the first new id.
    pub(crate) fn push_nodes(&mut self, count: usize, role: MotifRole) -> usize {
        let first = self.node_count();
        self.adjacency.resize(first + count, Vec::new());
        self.labels.resize(first + count, None);
        self.roles.resize(first + count, role);
        first
    }

    pub(crate) fn set_role(&mut self, node: usize, role: MotifRole) {
        self.roles[node] = role;
    }

    pub(crate) fn push_motif(&mut self, motif: MotifPair) {
        self.motifs.push(motif);
    }

    /// Sum of the degrees, `K = 2 |E|`.
    pub fn total_degree(&self) -> usize {
        self.adjacency.iter().map(Vec::len).sum()
    }
}

/// Size of the intersection of two sorted lists restricted to values `>= from`.
fn count_common_from(a: &[usize], b: &[usize], from: usize) -> usize {
    let start_a = a.partition_point(|&x| x < from);
    let start_b = b.partition_point(|&x| x < from);
    let (mut i, mut j, mut count) = (start_a, start_b, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                count += 1;
                i += 1;
                j += 1;
            }
        }
    }
    count
}
