//! Clique complex enumeration up to a fixed order, and clique censuses.

use std::collections::BTreeMap;

use crate::graph::Graph;
use crate::par;

/// Default cap on clique size.
pub const DEFAULT_MAX_ORDER: usize = 5;

/// All k-cliques of a graph for `k = 2..=max_order`.
///
/// Each order is stored flat: clique `c` of order `k` occupies
/// `nodes[c * k..(c + 1) * k]`, strictly increasing, and cliques are in
/// lexicographic order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CliqueComplex {
    node_count: usize,
    max_order: usize,
    /// `levels[k - 2]` holds the flattened k-cliques.
    levels: Vec<Vec<usize>>,
}

impl CliqueComplex {
    /// Builds a complex from explicit clique lists (`lists[k - 2]` holds the
    /// k-cliques as tuples). Tuples are sorted and the lists canonicalised;
    /// the caller is responsible for them actually being cliques.
    pub fn from_lists(node_count: usize, max_order: usize, lists: Vec<Vec<Vec<usize>>>) -> Self {
        assert!(max_order >= 2);
        assert_eq!(lists.len(), max_order - 1);
        let levels = lists
            .into_iter()
            .enumerate()
            .map(|(i, mut list)| {
                let k = i + 2;
                for t in &mut list {
                    assert_eq!(t.len(), k);
                    t.sort_unstable();
                }
                list.sort();
                list.dedup();
                list.concat()
            })
            .collect();
        CliqueComplex {
            node_count,
            max_order,
            levels,
        }
    }

    pub fn node_count(&self) -> usize {
        self.node_count
    }

    pub fn max_order(&self) -> usize {
        self.max_order
    }

    /// Number of k-cliques (0 outside `2..=max_order`).
    pub fn count(&self, k: usize) -> usize {
        if k < 2 || k > self.max_order {
            0
        } else {
            self.levels[k - 2].len() / k
        }
    }

    /// Flat node array for order `k`.
    pub fn flat(&self, k: usize) -> &[usize] {
        &self.levels[k - 2]
    }

    pub fn cliques(&self, k: usize) -> impl ExactSizeIterator<Item = &[usize]> + '_ {
        let flat: &[usize] = if k >= 2 && k <= self.max_order {
            &self.levels[k - 2]
        } else {
            &[]
        };
        flat.chunks_exact(k.max(1))
    }

    /// Orders present, `2..=max_order`.
    pub fn orders(&self) -> std::ops::RangeInclusive<usize> {
        2..=self.max_order
    }

    /// Largest k ≤ max_order with at least one k-clique (0 if edgeless).
    pub fn clique_number_lower_bound(&self) -> usize {
        self.orders().rev().find(|&k| self.count(k) > 0).unwrap_or(0)
    }

    /// True when the top order is populated, so larger cliques may exist.
    pub fn possibly_truncated(&self) -> bool {
        self.count(self.max_order) > 0
    }

    /// Same complex with every clique list shuffled into a given order.
    /// Used to test order-invariance of downstream sums.
    pub fn with_clique_order(&self, k: usize, order: &[usize]) -> CliqueComplex {
        let mut out = self.clone();
        let src = &self.levels[k - 2];
        assert_eq!(order.len(), src.len() / k);
        out.levels[k - 2] = order
            .iter()
            .flat_map(|&c| src[c * k..(c + 1) * k].iter().copied())
            .collect();
        out
    }
}

/// Extends `prefix` by every candidate in turn, emitting each clique found
/// into `out[k - 2]`. `candidates` are the common neighbours of `prefix`
/// greater than its last node, sorted ascending.
fn extend(g: &Graph, prefix: &mut Vec<usize>, candidates: &[usize], max_order: usize, out: &mut [Vec<usize>]) {
    for (idx, &w) in candidates.iter().enumerate() {
        prefix.push(w);
        out[prefix.len() - 2].extend_from_slice(prefix);
        if prefix.len() < max_order {
            let next = intersect_sorted(&candidates[idx + 1..], g.neighbors(w));
            if !next.is_empty() {
                extend(g, prefix, &next, max_order, out);
            }
        }
        prefix.pop();
    }
}

fn intersect_sorted(a: &[usize], b: &[usize]) -> Vec<usize> {
    let mut out = Vec::with_capacity(a.len().min(b.len()));
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                out.push(a[i]);
                i += 1;
                j += 1;
            }
        }
    }
    out
}

/// Lists every k-clique for `k = 2..=max_order` (all cliques, not only maximal
/// ones) by ordered extension: a (k+1)-clique is a k-clique `v1 < … < vk` plus
/// a common neighbour `v > vk`.
///
/// Start vertices are processed in parallel; per-vertex outputs are
/// concatenated in vertex order, so the result is independent of scheduling.
pub fn enumerate_cliques(g: &Graph, max_order: usize) -> CliqueComplex {
    assert!(max_order >= 2, "max_order must be at least 2");
    let per_vertex = par::map_range(g.node_count(), |v| {
        let mut out = vec![Vec::new(); max_order - 1];
        let nb = g.neighbors(v);
        let start = nb.partition_point(|&w| w <= v);
        let mut prefix = vec![v];
        extend(g, &mut prefix, &nb[start..], max_order, &mut out);
        out
    });
    let mut levels = vec![Vec::new(); max_order - 1];
    for lists in per_vertex {
        for (level, list) in levels.iter_mut().zip(lists) {
            level.extend_from_slice(&list);
        }
    }
    CliqueComplex {
        node_count: g.node_count(),
        max_order,
        levels,
    }
}

/// Clique counts for one order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CensusRow {
    pub k: usize,
    pub total: usize,
    /// Cliques whose nodes all share a label (only with labels).
    pub intra: Option<usize>,
    pub inter: Option<usize>,
    /// Label-count vector `(e_0, …, e_{l-1})` ↦ number of cliques.
    pub compositions: BTreeMap<Vec<usize>, usize>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CliqueCensus {
    pub rows: Vec<CensusRow>,
    /// The top order is non-empty, so the cap may hide larger cliques.
    pub truncated: bool,
}

impl CliqueCensus {
    pub fn row(&self, k: usize) -> Option<&CensusRow> {
        self.rows.iter().find(|r| r.k == k)
    }
}

/// Per-order clique totals, optionally split by label composition.
pub fn clique_census(complex: &CliqueComplex, labels: Option<&[usize]>) -> CliqueCensus {
    let label_count = labels.and_then(|ls| ls.iter().max()).map_or(0, |&m| m + 1);
    let rows = complex
        .orders()
        .map(|k| {
            let total = complex.count(k);
            let mut row = CensusRow {
                k,
                total,
                intra: None,
                inter: None,
                compositions: BTreeMap::new(),
            };
            if let Some(labels) = labels {
                let mut intra = 0;
                for c in complex.cliques(k) {
                    let mut e = vec![0; label_count];
                    for &v in c {
                        e[labels[v]] += 1;
                    }
                    if e.contains(&k) {
                        intra += 1;
                    }
                    *row.compositions.entry(e).or_insert(0) += 1;
                }
                row.intra = Some(intra);
                row.inter = Some(total - intra);
            }
            row
        })
        .collect();
    CliqueCensus {
        rows,
        truncated: complex.possibly_truncated(),
    }
}
