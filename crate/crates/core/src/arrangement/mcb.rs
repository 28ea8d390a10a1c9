//! Minimum cycle basis of a simple undirected graph.
//!
//! Candidates come from Horton's construction: for every vertex `v` and edge
//! `(x, y)`, the cycle made of the shortest-path-tree paths `v -> x`,
//! `v -> y` and the edge itself. Candidates are sorted by length and added
//! greedily whenever they are independent over GF(2) of the cycles already
//! kept.

use std::collections::{HashSet, VecDeque};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GraphError {
    #[error("graph is disconnected ({components} components)")]
    Disconnected { components: usize },
    #[error("edge {edge} is a self-loop or references a missing vertex")]
    BadEdge { edge: usize },
}

/// Edge-index bitset.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct EdgeSet(Vec<u64>);

impl EdgeSet {
    pub fn empty(num_edges: usize) -> Self {
        Self(vec![0; num_edges.div_ceil(64)])
    }

    pub fn toggle(&mut self, e: usize) {
        self.0[e / 64] ^= 1 << (e % 64);
    }

    pub fn contains(&self, e: usize) -> bool {
        self.0[e / 64] >> (e % 64) & 1 == 1
    }

    pub fn xor_with(&mut self, other: &EdgeSet) {
        for (a, b) in self.0.iter_mut().zip(&other.0) {
            *a ^= b;
        }
    }

    pub fn is_empty(&self) -> bool {
        self.0.iter().all(|&w| w == 0)
    }

    pub fn len(&self) -> usize {
        self.0.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn lowest(&self) -> Option<usize> {
        self.0
            .iter()
            .enumerate()
            .find(|(_, &w)| w != 0)
            .map(|(i, w)| i * 64 + w.trailing_zeros() as usize)
    }

    pub fn indices(&self) -> Vec<usize> {
        let mut out = Vec::new();
        for (i, &w) in self.0.iter().enumerate() {
            let mut w = w;
            while w != 0 {
                let b = w.trailing_zeros() as usize;
                out.push(i * 64 + b);
                w &= w - 1;
            }
        }
        out
    }
}

/// A cycle as a sorted list of edge indices.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Cycle {
    pub edges: Vec<usize>,
}

impl Cycle {
    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    /// Distinct vertices touched by the cycle, sorted.
    pub fn vertices(&self, edges: &[(usize, usize)]) -> Vec<usize> {
        let mut v: Vec<usize> = self
            .edges
            .iter()
            .flat_map(|&e| [edges[e].0, edges[e].1])
            .collect();
        v.sort_unstable();
        v.dedup();
        v
    }
}

/// GF(2) sum of the given cycles.
pub fn symmetric_sum(cycles: &[Cycle], num_edges: usize) -> Cycle {
    let mut acc = EdgeSet::empty(num_edges);
    for c in cycles {
        for &e in &c.edges {
            acc.toggle(e);
        }
    }
    Cycle { edges: acc.indices() }
}

struct Adjacency {
    /// (neighbor, edge index), sorted by neighbor
    lists: Vec<Vec<(usize, usize)>>,
}

impl Adjacency {
    fn build(num_vertices: usize, edges: &[(usize, usize)]) -> Result<Self, GraphError> {
        let mut lists = vec![Vec::new(); num_vertices];
        for (e, &(a, b)) in edges.iter().enumerate() {
            if a == b || a >= num_vertices || b >= num_vertices {
                return Err(GraphError::BadEdge { edge: e });
            }
            lists[a].push((b, e));
            lists[b].push((a, e));
        }
        for l in &mut lists {
            l.sort_unstable();
        }
        Ok(Self { lists })
    }

    fn components(&self) -> usize {
        let n = self.lists.len();
        let mut seen = vec![false; n];
        let mut count = 0;
        for s in 0..n {
            if seen[s] {
                continue;
            }
            count += 1;
            seen[s] = true;
            let mut stack = vec![s];
            while let Some(v) = stack.pop() {
                for &(w, _) in &self.lists[v] {
                    if !seen[w] {
                        seen[w] = true;
                        stack.push(w);
                    }
                }
            }
        }
        count
    }

    /// BFS tree from `root`: (parent edge, depth) per vertex.
    fn bfs(&self, root: usize) -> Vec<Option<(usize, usize, usize)>> {
        // (parent vertex, parent edge, depth)
        let mut tree = vec![None; self.lists.len()];
        tree[root] = Some((root, usize::MAX, 0));
        let mut queue = VecDeque::from([root]);
        while let Some(v) = queue.pop_front() {
            let depth = tree[v].unwrap().2;
            for &(w, e) in &self.lists[v] {
                if tree[w].is_none() {
                    tree[w] = Some((v, e, depth + 1));
                    queue.push_back(w);
                }
            }
        }
        tree
    }
}

/// Minimum cycle basis with ties broken by lexicographic edge order.
pub fn minimum_cycle_basis(
    num_vertices: usize,
    edges: &[(usize, usize)],
) -> Result<Vec<Cycle>, GraphError> {
    minimum_cycle_basis_by(num_vertices, edges, |_| ())
}

/// Minimum cycle basis; among cycles of equal length, smaller `priority`
/// wins, then lexicographic edge order. The result is a minimum basis for
/// any priority.
pub fn minimum_cycle_basis_by<K: Ord>(
    num_vertices: usize,
    edges: &[(usize, usize)],
    priority: impl Fn(&Cycle) -> K,
) -> Result<Vec<Cycle>, GraphError> {
    let adj = Adjacency::build(num_vertices, edges)?;
    if num_vertices == 0 {
        return Ok(Vec::new());
    }
    let components = adj.components();
    if components != 1 {
        return Err(GraphError::Disconnected { components });
    }
    let dimension = edges.len() + 1 - num_vertices;
    if dimension == 0 {
        return Ok(Vec::new());
    }

    let mut seen: HashSet<EdgeSet> = HashSet::new();
    let mut candidates: Vec<Cycle> = Vec::new();
    for root in 0..num_vertices {
        let tree = adj.bfs(root);
        // root-to-vertex paths as edge sets, built in BFS order
        let mut order: Vec<usize> = (0..num_vertices).collect();
        order.sort_by_key(|&v| tree[v].unwrap().2);
        let mut paths: Vec<EdgeSet> = vec![EdgeSet::empty(edges.len()); num_vertices];
        for &v in &order {
            if v == root {
                continue;
            }
            let (p, e, _) = tree[v].unwrap();
            let mut path = paths[p].clone();
            path.toggle(e);
            paths[v] = path;
        }
        for (e, &(x, y)) in edges.iter().enumerate() {
            if paths[x].contains(e) || paths[y].contains(e) {
                continue;
            }
            let (dx, dy) = (tree[x].unwrap().2, tree[y].unwrap().2);
            let mut set = paths[x].clone();
            set.xor_with(&paths[y]);
            // the two paths must only share the root
            if set.len() != dx + dy {
                continue;
            }
            set.toggle(e);
            if seen.insert(set.clone()) {
                candidates.push(Cycle { edges: set.indices() });
            }
        }
    }

    let mut keyed: Vec<(usize, K, Cycle)> = candidates
        .into_iter()
        .map(|c| (c.len(), priority(&c), c))
        .collect();
    keyed.sort_by(|a, b| (a.0, &a.1, &a.2.edges).cmp(&(b.0, &b.1, &b.2.edges)));

    // reduced rows indexed by pivot (lowest set edge)
    let mut reduced: Vec<(usize, EdgeSet)> = Vec::new();
    let mut basis = Vec::with_capacity(dimension);
    for (_, _, cycle) in keyed {
        let mut v = EdgeSet::empty(edges.len());
        for &e in &cycle.edges {
            v.toggle(e);
        }
        for (pivot, row) in &reduced {
            if v.contains(*pivot) {
                v.xor_with(row);
            }
        }
        let Some(pivot) = v.lowest() else {
            continue;
        };
        // keep existing rows free of the new pivot
        for (_, row) in reduced.iter_mut() {
            if row.contains(pivot) {
                row.xor_with(&v);
            }
        }
        reduced.push((pivot, v));
        basis.push(cycle);
        if basis.len() == dimension {
            break;
        }
    }
    Ok(basis)
}
