//! Stochastic block tensor model (SBTM).
//!
//! For every order `k` and every label composition `e = (e_1, …, e_l)` with
//! `Σ e_i = k`, each of the `S_e = Π C(N_i, e_i)` node subsets with that
//! composition independently becomes a k-clique with probability
//! `q_e = Π_{a<b} (B_k)_{θ_a θ_b}`. Sampling draws the number of cliques per
//! composition from `Binomial(S_e, q_e)` and then picks that many distinct
//! subsets uniformly, which is equivalent in distribution to per-subset
//! Bernoulli trials but costs time proportional to the cliques produced.
//! The final graph is the unweighted union of all sampled cliques.

use rand::seq::index;
use rand::Rng;
use rand_distr::{Binomial, Distribution};

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::par;
use crate::seeding::{self, tag};

/// Label sizes plus one symmetric `l × l` probability matrix per order.
#[derive(Debug, Clone, PartialEq)]
pub struct SbtmSpec {
    label_sizes: Vec<usize>,
    max_order: usize,
    /// `prob_matrices[k - 2]` is `B_k`.
    prob_matrices: Vec<Vec<Vec<f64>>>,
}

impl SbtmSpec {
    /// `prob_matrices[k - 2]` is the matrix for order `k`; orders run
    /// `2..=prob_matrices.len() + 1`.
    pub fn new(label_sizes: Vec<usize>, prob_matrices: Vec<Vec<Vec<f64>>>) -> Result<Self> {
        let l = label_sizes.len();
        if l < 2 {
            return Err(Error::Config("at least two labels are required".into()));
        }
        if let Some(i) = label_sizes.iter().position(|&s| s == 0) {
            return Err(Error::Config(format!("label {i} has no nodes")));
        }
        if prob_matrices.is_empty() {
            return Err(Error::Config("need a probability matrix for k = 2".into()));
        }
        for (idx, b) in prob_matrices.iter().enumerate() {
            let k = idx + 2;
            if b.len() != l || b.iter().any(|r| r.len() != l) {
                return Err(Error::Config(format!("B{k} must be {l}×{l}")));
            }
            for (i, row) in b.iter().enumerate() {
                for (j, &v) in row.iter().enumerate() {
                    if !(0.0..=1.0).contains(&v) {
                        return Err(Error::Config(format!("B{k}[{i}][{j}] = {v} is outside [0, 1]")));
                    }
                    if v != b[j][i] {
                        return Err(Error::Config(format!("B{k} is not symmetric at ({i}, {j})")));
                    }
                }
            }
        }
        Ok(SbtmSpec {
            label_sizes,
            max_order: prob_matrices.len() + 1,
            prob_matrices,
        })
    }

    /// Matrices with per-label diagonal `diag[k-2]` and a constant
    /// off-diagonal `off[k-2]`.
    pub fn from_diagonals(label_sizes: Vec<usize>, diag: &[Vec<f64>], off: &[f64]) -> Result<Self> {
        assert_eq!(diag.len(), off.len());
        let l = label_sizes.len();
        let mats = diag
            .iter()
            .zip(off)
            .map(|(d, &o)| {
                (0..l)
                    .map(|i| (0..l).map(|j| if i == j { d[i] } else { o }).collect())
                    .collect()
            })
            .collect();
        Self::new(label_sizes, mats)
    }

    pub fn label_sizes(&self) -> &[usize] {
        &self.label_sizes
    }

    pub fn label_count(&self) -> usize {
        self.label_sizes.len()
    }

    pub fn node_count(&self) -> usize {
        self.label_sizes.iter().sum()
    }

    pub fn max_order(&self) -> usize {
        self.max_order
    }

    pub fn matrix(&self, k: usize) -> &[Vec<f64>] {
        &self.prob_matrices[k - 2]
    }

    pub fn matrices(&self) -> &[Vec<Vec<f64>>] {
        &self.prob_matrices
    }

    pub fn matrix_mut(&mut self, k: usize) -> &mut Vec<Vec<f64>> {
        &mut self.prob_matrices[k - 2]
    }

    /// Contiguous block labelling: first `N_1` nodes get label 0, and so on.
    pub fn block_labels(&self) -> Vec<usize> {
        self.label_sizes
            .iter()
            .enumerate()
            .flat_map(|(i, &s)| std::iter::repeat_n(i, s))
            .collect()
    }

    fn block_starts(&self) -> Vec<usize> {
        let mut acc = 0;
        self.label_sizes
            .iter()
            .map(|&s| {
                let start = acc;
                acc += s;
                start
            })
            .collect()
    }

    /// Per-subset clique probability for a composition:
    /// `Π_{a<b} (B_k)_{θ_a θ_b}` over any ordering θ of the multiset.
    pub fn subset_probability(&self, composition: &[usize]) -> f64 {
        let theta = composition_to_tuple(composition);
        let b = self.matrix(theta.len());
        let mut q = 1.0;
        for a in 0..theta.len() {
            for c in a + 1..theta.len() {
                q *= b[theta[a]][theta[c]];
            }
        }
        q
    }

    /// `Π C(N_i, e_i)` as a float.
    pub fn subset_count(&self, composition: &[usize]) -> f64 {
        self.label_sizes
            .iter()
            .zip(composition)
            .map(|(&n, &e)| binomial_f64(n, e))
            .product()
    }

    /// Tensor entry `(T_k)_θ = Π_i C(N_i, e_i) · Π_{a<b} (B_k)_{θ_a θ_b}`:
    /// the expected number of sampled k-cliques with θ's composition.
    pub fn tensor_entry(&self, theta: &[usize]) -> f64 {
        let k = theta.len();
        assert!(
            k >= 2 && k <= self.max_order,
            "order {k} outside 2..={}",
            self.max_order
        );
        let comp = tuple_to_composition(theta, self.label_count());
        let b = self.matrix(k);
        let mut q = 1.0;
        for a in 0..k {
            for c in a + 1..k {
                q *= b[theta[a]][theta[c]];
            }
        }
        self.subset_count(&comp) * q
    }
}

/// Label-count vector of a tuple.
pub fn tuple_to_composition(theta: &[usize], l: usize) -> Vec<usize> {
    let mut e = vec![0; l];
    for &t in theta {
        e[t] += 1;
    }
    e
}

/// Sorted tuple realising a composition.
pub fn composition_to_tuple(e: &[usize]) -> Vec<usize> {
    e.iter()
        .enumerate()
        .flat_map(|(i, &c)| std::iter::repeat_n(i, c))
        .collect()
}

/// All compositions of `k` into `l` non-negative parts, lexicographically
/// descending in the first part (so `(k, 0, …)` comes first).
pub fn compositions(k: usize, l: usize) -> Vec<Vec<usize>> {
    fn rec(rem: usize, slots: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if slots == 1 {
            cur.push(rem);
            out.push(cur.clone());
            cur.pop();
            return;
        }
        for first in (0..=rem).rev() {
            cur.push(first);
            rec(rem - first, slots - 1, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if l > 0 {
        rec(k, l, &mut Vec::with_capacity(l), &mut out);
    }
    out
}

fn binomial_f64(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Exact binomial coefficient, `None` on overflow.
pub fn binomial_u128(n: usize, k: usize) -> Option<u128> {
    if k > n {
        return Some(0);
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        // acc * (n - i) is divisible by (i + 1) at every step.
        acc = acc.checked_mul((n - i) as u128)? / (i as u128 + 1);
    }
    Some(acc)
}

/// Combination of rank `rank` (colexicographic) among the `t`-subsets of
/// `0..n`, returned ascending.
fn unrank_combination(mut rank: u128, n: usize, t: usize) -> Vec<usize> {
    let mut out = Vec::with_capacity(t);
    let mut hi = n;
    for size in (1..=t).rev() {
        // Largest c < hi with C(c, size) <= rank.
        let (mut lo, mut up) = (size - 1, hi - 1);
        while lo < up {
            let mid = (lo + up).div_ceil(2);
            if binomial_u128(mid, size).unwrap_or(u128::MAX) <= rank {
                lo = mid;
            } else {
                up = mid - 1;
            }
        }
        rank -= binomial_u128(lo, size).unwrap();
        out.push(lo);
        hi = lo;
    }
    out.reverse();
    out
}

/// Sampled-clique count for one `(k, composition)` cell.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CellCount {
    pub k: usize,
    pub composition: Vec<usize>,
    pub sampled: u64,
}

/// A sampled graph with its ground-truth labels.
#[derive(Debug, Clone, PartialEq)]
pub struct GeneratedGraph {
    pub graph: Graph,
    pub truth: Vec<usize>,
    /// One entry per `(k, composition)` cell, in generation order.
    pub provenance: Vec<CellCount>,
}

struct Cell {
    k: usize,
    index: usize,
    composition: Vec<usize>,
}

fn cells(spec: &SbtmSpec) -> Vec<Cell> {
    let l = spec.label_count();
    let mut out = Vec::new();
    for k in 2..=spec.max_order() {
        for (index, composition) in compositions(k, l).into_iter().enumerate() {
            out.push(Cell { k, index, composition });
        }
    }
    out
}

/// Samples a graph. Each cell uses its own random stream derived from
/// `(seed, k, composition index)`, so output is bit-identical for a given seed
/// regardless of thread count.
pub fn generate(spec: &SbtmSpec, seed: u64) -> Result<GeneratedGraph> {
    let cells = cells(spec);
    let starts = spec.block_starts();
    let sampled = par::map_slice(&cells, |cell| -> Result<(u64, Vec<usize>)> {
        let q = spec.subset_probability(&cell.composition);
        let radices: Vec<u128> = spec
            .label_sizes()
            .iter()
            .zip(&cell.composition)
            .map(|(&n, &e)| binomial_u128(n, e))
            .collect::<Option<_>>()
            .ok_or_else(|| Error::Resource(format!("subset count overflows for k = {}", cell.k)))?;
        let total = radices
            .iter()
            .try_fold(1u128, |acc, &r| acc.checked_mul(r))
            .filter(|&t| t <= usize::MAX as u128 && t <= u64::MAX as u128)
            .ok_or_else(|| {
                Error::Resource(format!(
                    "too many candidate subsets for k = {} composition {:?}",
                    cell.k, cell.composition
                ))
            })?;
        if q == 0.0 || total == 0 {
            return Ok((0, Vec::new()));
        }
        let mut rng = seeding::stream(seed, &[tag::SBTM, cell.k as u64, cell.index as u64]);
        let count = if q >= 1.0 {
            total as u64
        } else {
            Binomial::new(total as u64, q)
                .map_err(|e| Error::Config(format!("binomial parameters: {e}")))?
                .sample(&mut rng)
        };
        let mut picks: Vec<usize> = index::sample(&mut rng, total as usize, count as usize).into_vec();
        picks.sort_unstable();
        let mut nodes = Vec::with_capacity(picks.len() * cell.k);
        for pick in picks {
            let mut rank = pick as u128;
            // Last block varies fastest.
            let mut block_ranks = vec![0u128; radices.len()];
            for i in (0..radices.len()).rev() {
                if radices[i] > 0 {
                    block_ranks[i] = rank % radices[i];
                    rank /= radices[i];
                }
            }
            for (i, &e) in cell.composition.iter().enumerate() {
                if e > 0 {
                    let comb = unrank_combination(block_ranks[i], spec.label_sizes()[i], e);
                    nodes.extend(comb.into_iter().map(|v| starts[i] + v));
                }
            }
        }
        Ok((count, nodes))
    });

    let mut edges = Vec::new();
    let mut provenance = Vec::with_capacity(cells.len());
    for (cell, res) in cells.iter().zip(sampled) {
        let (count, nodes) = res?;
        for clique in nodes.chunks_exact(cell.k) {
            for a in 0..cell.k {
                for b in a + 1..cell.k {
                    edges.push((clique[a], clique[b]));
                }
            }
        }
        provenance.push(CellCount {
            k: cell.k,
            composition: cell.composition.clone(),
            sampled: count,
        });
    }
    let graph = Graph::from_edge_list(spec.node_count(), &edges)?;
    Ok(GeneratedGraph {
        graph,
        truth: spec.block_labels(),
        provenance,
    })
}

/// Analytic expectation of sampled cliques per cell.
#[derive(Debug, Clone, PartialEq)]
pub struct CellExpectation {
    pub k: usize,
    pub composition: Vec<usize>,
    pub subsets: f64,
    pub probability: f64,
    pub expected: f64,
}

impl CellExpectation {
    /// Standard deviation of the binomial count.
    pub fn std_dev(&self) -> f64 {
        (self.subsets * self.probability * (1.0 - self.probability)).sqrt()
    }
}

/// Expected number of sampled cliques per `(k, composition)`, in the same cell
/// order as [`GeneratedGraph::provenance`]. Cliques formed incidentally by
/// overlapping samples are not counted.
pub fn expected_clique_counts(spec: &SbtmSpec) -> Vec<CellExpectation> {
    cells(spec)
        .into_iter()
        .map(|cell| {
            let subsets = spec.subset_count(&cell.composition);
            let probability = spec.subset_probability(&cell.composition);
            CellExpectation {
                k: cell.k,
                composition: cell.composition,
                subsets,
                probability,
                expected: subsets * probability,
            }
        })
        .collect()
}

/// Upper bound `2^(k-1) n^k p^(k(k-1)/2)` on the expected k-clique count of an
/// SBM with within-block probability `p`.
pub fn sbm_clique_bound(n: usize, p: f64, k: usize) -> f64 {
    let k_i = k as i32;
    2f64.powi(k_i - 1) * (n as f64).powi(k_i) * p.powi(k_i * (k_i - 1) / 2)
}

/// Uniformly random permutation of `0..n` from a derived stream.
pub fn random_permutation<R: Rng>(n: usize, rng: &mut R) -> Vec<usize> {
    use rand::seq::SliceRandom;
    let mut p: Vec<usize> = (0..n).collect();
    p.shuffle(rng);
    p
}
