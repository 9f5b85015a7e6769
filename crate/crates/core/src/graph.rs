//! Bipartite graph of a pattern: rows on one side, columns on the other.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use num_traits::{One, Zero};

use crate::model::{PartialMatrix, Position};
use crate::numeric::Rational;

/// Vertex numbering: rows are `0..m`, columns are `m..m+n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BipartiteGraph {
    nrows: usize,
    ncols: usize,
    edges: BTreeMap<Position, Option<Rational>>,
    adjacency: Vec<Vec<usize>>,
}

/// A closed alternating walk `(r1,c1),(r1,c2),(r2,c2),...,(rk,c1)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cycle {
    pub edges: Vec<Position>,
}

impl Cycle {
    /// Products over even-indexed and odd-indexed edges.
    pub fn products(&self, m: &PartialMatrix) -> (Rational, Rational) {
        let mut lhs = Rational::one();
        let mut rhs = Rational::one();
        for (k, &(i, j)) in self.edges.iter().enumerate() {
            let w = m.get(i, j).cloned().unwrap_or_else(Rational::zero);
            if k % 2 == 0 {
                lhs *= w;
            } else {
                rhs *= w;
            }
        }
        (lhs, rhs)
    }

    pub fn is_valid(&self) -> bool {
        let k = self.edges.len();
        if k < 4 || k % 2 == 1 {
            return false;
        }
        (0..k).all(|t| {
            let a = self.edges[t];
            let b = self.edges[(t + 1) % k];
            // even -> odd steps share the row, odd -> even share the column
            if t % 2 == 0 {
                a.0 == b.0 && a.1 != b.1
            } else {
                a.1 == b.1 && a.0 != b.0
            }
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EdgeComponent {
    pub rows: Vec<usize>,
    pub cols: Vec<usize>,
    pub edges: Vec<Position>,
    pub block_sum: Rational,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ComponentSummary {
    pub edge_components: Vec<EdgeComponent>,
    pub isolated_rows: BTreeSet<usize>,
    pub isolated_cols: BTreeSet<usize>,
    pub s_edges: usize,
}

impl ComponentSummary {
    pub fn isolated_count(&self) -> usize {
        self.isolated_rows.len() + self.isolated_cols.len()
    }

    pub fn block_sums(&self) -> Vec<Rational> {
        self.edge_components
            .iter()
            .map(|c| c.block_sum.clone())
            .collect()
    }
}

impl BipartiteGraph {
    pub fn from_partial_matrix(m: &PartialMatrix) -> Self {
        Self::build(
            m.nrows(),
            m.ncols(),
            m.entries()
                .iter()
                .map(|(&p, v)| (p, Some(v.clone())))
                .collect(),
        )
    }

    pub fn from_pattern(
        nrows: usize,
        ncols: usize,
        pattern: impl IntoIterator<Item = Position>,
    ) -> Self {
        Self::build(
            nrows,
            ncols,
            pattern.into_iter().map(|p| (p, None)).collect(),
        )
    }

    fn build(nrows: usize, ncols: usize, edges: BTreeMap<Position, Option<Rational>>) -> Self {
        let mut adjacency = vec![Vec::new(); nrows + ncols];
        for &(i, j) in edges.keys() {
            adjacency[i].push(nrows + j);
            adjacency[nrows + j].push(i);
        }
        for list in &mut adjacency {
            list.sort_unstable();
        }
        Self {
            nrows,
            ncols,
            edges,
            adjacency,
        }
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> impl Iterator<Item = Position> + '_ {
        self.edges.keys().copied()
    }

    pub fn weight(&self, p: Position) -> Option<&Rational> {
        self.edges.get(&p).and_then(Option::as_ref)
    }

    fn edge_of(&self, a: usize, b: usize) -> Position {
        if a < self.nrows {
            (a, b - self.nrows)
        } else {
            (b, a - self.nrows)
        }
    }

    /// Breadth-first spanning forest in vertex order. Returns parent pointers,
    /// depths, and the component label of every vertex.
    fn forest(&self) -> (Vec<Option<usize>>, Vec<usize>, Vec<usize>) {
        let nv = self.nrows + self.ncols;
        let mut parent = vec![None; nv];
        let mut depth = vec![0; nv];
        let mut label = vec![usize::MAX; nv];
        let mut next = 0;
        for root in 0..nv {
            if label[root] != usize::MAX {
                continue;
            }
            label[root] = next;
            let mut queue = VecDeque::from([root]);
            while let Some(x) = queue.pop_front() {
                for &y in &self.adjacency[x] {
                    if label[y] == usize::MAX {
                        label[y] = next;
                        parent[y] = Some(x);
                        depth[y] = depth[x] + 1;
                        queue.push_back(y);
                    }
                }
            }
            next += 1;
        }
        (parent, depth, label)
    }

    pub fn components(&self) -> ComponentSummary {
        let (_, _, label) = self.forest();
        let mut groups: BTreeMap<usize, EdgeComponent> = BTreeMap::new();
        let mut isolated_rows = BTreeSet::new();
        let mut isolated_cols = BTreeSet::new();
        for v in 0..self.nrows + self.ncols {
            if self.adjacency[v].is_empty() {
                if v < self.nrows {
                    isolated_rows.insert(v);
                } else {
                    isolated_cols.insert(v - self.nrows);
                }
                continue;
            }
            let comp = groups.entry(label[v]).or_insert_with(|| EdgeComponent {
                rows: Vec::new(),
                cols: Vec::new(),
                edges: Vec::new(),
                block_sum: Rational::zero(),
            });
            if v < self.nrows {
                comp.rows.push(v);
            } else {
                comp.cols.push(v - self.nrows);
            }
        }
        for (&(i, j), w) in &self.edges {
            let comp = groups
                .get_mut(&label[i])
                .expect("edge endpoint has a component");
            comp.edges.push((i, j));
            if let Some(w) = w {
                comp.block_sum += w;
            }
        }
        let edge_components: Vec<_> = groups.into_values().collect();
        ComponentSummary {
            s_edges: edge_components.len(),
            edge_components,
            isolated_rows,
            isolated_cols,
        }
    }

    /// One cycle per edge outside the breadth-first spanning forest.
    pub fn fundamental_cycles(&self) -> Vec<Cycle> {
        let (parent, depth, _) = self.forest();
        let is_tree_edge = |a: usize, b: usize| parent[a] == Some(b) || parent[b] == Some(a);
        let mut cycles = Vec::new();
        for &(i, j) in self.edges.keys() {
            let r = i;
            let c = self.nrows + j;
            if is_tree_edge(r, c) {
                continue;
            }
            // Tree path r -> lca <- c.
            let mut up_r = vec![r];
            let mut up_c = vec![c];
            let (mut a, mut b) = (r, c);
            while depth[a] > depth[b] {
                a = parent[a].expect("non-root has a parent");
                up_r.push(a);
            }
            while depth[b] > depth[a] {
                b = parent[b].expect("non-root has a parent");
                up_c.push(b);
            }
            while a != b {
                a = parent[a].expect("non-root has a parent");
                b = parent[b].expect("non-root has a parent");
                up_r.push(a);
                up_c.push(b);
            }
            up_c.pop();
            // Tree path r -> ... -> c, then rotate so the walk starts at c.
            let mut path = up_r;
            path.extend(up_c.into_iter().rev());
            path.pop();
            let mut walk = vec![c];
            walk.extend(path);
            let k = walk.len();
            let edges = (0..k)
                .map(|t| self.edge_of(walk[t], walk[(t + 1) % k]))
                .collect();
            cycles.push(Cycle { edges });
        }
        cycles
    }

    /// Every position sharing a connected component with some edge.
    pub fn transitive_closure(&self) -> BTreeSet<Position> {
        let summary = self.components();
        let mut out = BTreeSet::new();
        for comp in &summary.edge_components {
            for &i in &comp.rows {
                for &j in &comp.cols {
                    out.insert((i, j));
                }
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::make_partial_matrix;
    use crate::numeric::rat;

    fn full(m: usize, n: usize) -> BipartiteGraph {
        BipartiteGraph::from_pattern(m, n, (0..m).flat_map(|i| (0..n).map(move |j| (i, j))))
    }

    #[test]
    fn example_components() {
        let m = make_partial_matrix(
            3,
            3,
            [
                (0, 0, rat(1, 10)),
                (0, 1, rat(1, 10)),
                (1, 1, rat(1, 10)),
                (2, 2, rat(1, 10)),
            ],
        )
        .unwrap();
        let g = BipartiteGraph::from_partial_matrix(&m);
        assert_eq!(g.edge_count(), 4);
        let s = g.components();
        assert_eq!(s.s_edges, 2);
        assert_eq!(s.edge_components[0].rows, vec![0, 1]);
        assert_eq!(s.edge_components[0].cols, vec![0, 1]);
        assert_eq!(s.edge_components[0].block_sum, rat(3, 10));
        assert_eq!(s.edge_components[1].rows, vec![2]);
        assert!(s.isolated_rows.is_empty() && s.isolated_cols.is_empty());
    }

    #[test]
    fn empty_and_single_edge() {
        let g = BipartiteGraph::from_pattern(2, 3, []);
        let s = g.components();
        assert_eq!(s.s_edges, 0);
        assert_eq!(s.isolated_count(), 5);
        let g = BipartiteGraph::from_pattern(2, 2, [(0, 0)]);
        let s = g.components();
        assert_eq!(s.s_edges, 1);
        assert_eq!(s.isolated_rows, BTreeSet::from([1]));
        assert_eq!(s.isolated_cols, BTreeSet::from([1]));
    }

    #[test]
    fn cycle_counts() {
        let c = full(2, 2).fundamental_cycles();
        assert_eq!(c.len(), 1);
        assert_eq!(c[0].edges.len(), 4);
        assert!(c[0].is_valid());
        let c = full(3, 3).fundamental_cycles();
        assert_eq!(c.len(), 4);
        assert!(c.iter().all(Cycle::is_valid));
        let diag = BipartiteGraph::from_pattern(4, 4, (0..4).map(|i| (i, i)));
        assert!(diag.fundamental_cycles().is_empty());
    }

    #[test]
    fn closure_examples() {
        let g = BipartiteGraph::from_pattern(2, 2, [(0, 0), (0, 1), (1, 0)]);
        assert_eq!(g.transitive_closure().len(), 4);
        let g = BipartiteGraph::from_pattern(3, 3, [(0, 0), (0, 1), (1, 0), (2, 2)]);
        let closure = g.transitive_closure();
        assert_eq!(
            closure,
            BTreeSet::from([(0, 0), (0, 1), (1, 0), (1, 1), (2, 2)])
        );
        let diag: BTreeSet<_> = (0..3).map(|i| (i, i)).collect();
        let g = BipartiteGraph::from_pattern(3, 3, diag.clone());
        assert_eq!(g.transitive_closure(), diag);
    }
}
