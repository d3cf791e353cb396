//! Undirected simple graphs in compressed sorted adjacency form.

use std::collections::VecDeque;

use crate::error::{Error, Result};
use crate::linalg::CsrMatrix;

/// Undirected simple graph on nodes `0..n`.
///
/// Adjacency is stored CSR-style: the neighbours of `j` are
/// `targets[offsets[j]..offsets[j + 1]]`, sorted ascending without duplicates
/// or self-loops.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    offsets: Vec<usize>,
    targets: Vec<usize>,
}

impl Graph {
    /// Builds a graph from an arbitrary edge list. Duplicates and reversed
    /// pairs collapse; self-loops are dropped.
    pub fn from_edge_list(n: usize, edges: &[(usize, usize)]) -> Result<Graph> {
        Self::from_edge_list_counted(n, edges).map(|(g, _)| g)
    }

    /// Like [`Graph::from_edge_list`], also returning the number of dropped
    /// self-loops.
    pub fn from_edge_list_counted(n: usize, edges: &[(usize, usize)]) -> Result<(Graph, usize)> {
        let mut lists: Vec<Vec<usize>> = vec![Vec::new(); n];
        let mut self_loops = 0;
        for &(a, b) in edges {
            if a >= n || b >= n {
                return Err(Error::Input(format!(
                    "edge ({a}, {b}) references a node outside 0..{n}"
                )));
            }
            if a == b {
                self_loops += 1;
                continue;
            }
            lists[a].push(b);
            lists[b].push(a);
        }
        Ok((Self::from_lists(lists), self_loops))
    }

    /// Assumes entries are in range and free of self-loops; sorts and dedups.
    fn from_lists(mut lists: Vec<Vec<usize>>) -> Graph {
        let mut offsets = Vec::with_capacity(lists.len() + 1);
        offsets.push(0);
        let mut targets = Vec::new();
        for list in &mut lists {
            list.sort_unstable();
            list.dedup();
            targets.extend_from_slice(list);
            offsets.push(targets.len());
        }
        Graph { offsets, targets }
    }

    pub fn empty(n: usize) -> Graph {
        Graph {
            offsets: vec![0; n + 1],
            targets: Vec::new(),
        }
    }

    pub fn complete(n: usize) -> Graph {
        let lists = (0..n).map(|j| (0..n).filter(|&i| i != j).collect()).collect();
        Self::from_lists(lists)
    }

    pub fn node_count(&self) -> usize {
        self.offsets.len() - 1
    }

    pub fn edge_count(&self) -> usize {
        self.targets.len() / 2
    }

    #[inline]
    pub fn neighbors(&self, j: usize) -> &[usize] {
        &self.targets[self.offsets[j]..self.offsets[j + 1]]
    }

    #[inline]
    pub fn degree(&self, j: usize) -> usize {
        self.offsets[j + 1] - self.offsets[j]
    }

    #[inline]
    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        self.neighbors(a).binary_search(&b).is_ok()
    }

    /// Edges as `(a, b)` with `a < b`, in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.node_count()).flat_map(move |a| {
            self.neighbors(a)
                .iter()
                .copied()
                .filter(move |&b| b > a)
                .map(move |b| (a, b))
        })
    }

    /// Relabels node `j` as `perm[j]`. `perm` must be a permutation of `0..n`.
    pub fn permute(&self, perm: &[usize]) -> Graph {
        let n = self.node_count();
        assert_eq!(perm.len(), n, "permutation length must equal node count");
        let mut lists = vec![Vec::new(); n];
        for j in 0..n {
            lists[perm[j]] = self.neighbors(j).iter().map(|&i| perm[i]).collect();
        }
        Self::from_lists(lists)
    }

    /// Maximal connected sets, each sorted ascending, ordered by smallest node.
    pub fn connected_components(&self) -> Vec<Vec<usize>> {
        let n = self.node_count();
        let mut seen = vec![false; n];
        let mut out = Vec::new();
        let mut queue = VecDeque::new();
        for start in 0..n {
            if seen[start] {
                continue;
            }
            seen[start] = true;
            queue.push_back(start);
            let mut comp = Vec::new();
            while let Some(v) = queue.pop_front() {
                comp.push(v);
                for &w in self.neighbors(v) {
                    if !seen[w] {
                        seen[w] = true;
                        queue.push_back(w);
                    }
                }
            }
            comp.sort_unstable();
            out.push(comp);
        }
        out
    }

    /// Component index of every node, consistent with
    /// [`Graph::connected_components`].
    pub fn component_ids(&self) -> Vec<usize> {
        let mut ids = vec![0; self.node_count()];
        for (c, comp) in self.connected_components().iter().enumerate() {
            for &v in comp {
                ids[v] = c;
            }
        }
        ids
    }

    /// Graph Laplacian `L = D - A`.
    pub fn laplacian(&self) -> CsrMatrix {
        let n = self.node_count();
        let mut row_ptr = Vec::with_capacity(n + 1);
        let mut cols = Vec::with_capacity(self.targets.len() + n);
        let mut vals = Vec::with_capacity(self.targets.len() + n);
        row_ptr.push(0);
        for j in 0..n {
            let nb = self.neighbors(j);
            let split = nb.partition_point(|&i| i < j);
            for &i in &nb[..split] {
                cols.push(i);
                vals.push(-1.0);
            }
            cols.push(j);
            vals.push(nb.len() as f64);
            for &i in &nb[split..] {
                cols.push(i);
                vals.push(-1.0);
            }
            row_ptr.push(cols.len());
        }
        CsrMatrix::new(n, row_ptr, cols, vals)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn path(n: usize) -> Graph {
        let e: Vec<_> = (1..n).map(|i| (i - 1, i)).collect();
        Graph::from_edge_list(n, &e).unwrap()
    }

    #[test]
    fn dedup_and_symmetry() {
        let g = Graph::from_edge_list(3, &[(0, 1), (1, 0), (1, 2)]).unwrap();
        assert_eq!(g.edge_count(), 2);
        assert_eq!(g.neighbors(1), &[0, 2]);
        assert_eq!(g.neighbors(0), &[1]);
    }

    #[test]
    fn self_loop_dropped_and_counted() {
        let (g, loops) = Graph::from_edge_list_counted(2, &[(0, 0), (0, 1)]).unwrap();
        assert_eq!(g.edge_count(), 1);
        assert_eq!(loops, 1);
    }

    #[test]
    fn out_of_range_names_pair() {
        let err = Graph::from_edge_list(3, &[(0, 1), (2, 3)]).unwrap_err();
        assert!(err.to_string().contains("(2, 3)"), "{err}");
    }

    #[test]
    fn four_node_example() {
        let g = Graph::from_edge_list(4, &[(0, 1), (0, 2), (1, 2), (2, 3)]).unwrap();
        assert_eq!(g.node_count(), 4);
        assert_eq!(g.edge_count(), 4);
        assert_eq!(g.connected_components(), vec![vec![0, 1, 2, 3]]);
    }

    #[test]
    fn components() {
        assert_eq!(path(3).connected_components(), vec![vec![0, 1, 2]]);
        let g = Graph::from_edge_list(4, &[(0, 1)]).unwrap();
        assert_eq!(g.connected_components(), vec![vec![0, 1], vec![2], vec![3]]);
        assert_eq!(g.component_ids(), vec![0, 0, 1, 2]);
    }

    #[test]
    fn laplacian_small_cases() {
        let l = Graph::from_edge_list(2, &[(0, 1)]).unwrap().laplacian().to_dense();
        assert_eq!(l, vec![vec![1.0, -1.0], vec![-1.0, 1.0]]);

        let l = Graph::complete(3).laplacian().to_dense();
        for i in 0..3 {
            for j in 0..3 {
                assert_eq!(l[i][j], if i == j { 2.0 } else { -1.0 });
            }
        }

        let l = path(3).laplacian();
        let d = l.to_dense();
        assert_eq!((d[0][0], d[1][1], d[2][2]), (1.0, 2.0, 1.0));
        assert_eq!(d[0][2], 0.0);
        assert!(l.mul_vec(&[1.0; 3]).iter().all(|&x| x == 0.0));
    }

    #[test]
    fn permute_preserves_structure() {
        let g = path(4);
        let p = g.permute(&[3, 2, 1, 0]);
        assert!(p.has_edge(3, 2) && p.has_edge(1, 0) && !p.has_edge(3, 0));
        assert_eq!(p.edge_count(), 3);
    }
}
