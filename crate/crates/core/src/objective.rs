//! The simplicial objective
//!
//! ```text
//! J_m = Σ_{k=2..m} α^(k-1) Σ_{(j_1..j_k) ∈ K_k} Σ_{θ ∈ I^k} C_θ p^{j_1}_{θ_1} ⋯ p^{j_k}_{θ_k}
//! ```
//!
//! where `C_θ = k! / Π_i e_i!` counts the orderings of θ's label multiset, so
//! cliques with more diverse labels are penalised harder.
//!
//! Per clique the θ-sum is evaluated by a depth-first walk over label
//! prefixes. The walk returns the suffix sum at every node, which yields the
//! value and the full `k × l` gradient in `O(l^k)` operations.

use crate::cliques::CliqueComplex;
use crate::distribution::LabelDistribution;
use crate::error::{Error, Result};
use crate::par;

/// Default cap on `l^k` entries per coefficient table.
pub const DEFAULT_TABLE_BUDGET: usize = 10_000_000;

/// Cliques per reduction chunk. Sums are formed per chunk and then combined in
/// chunk order, so the value is the same at every thread count.
pub const CHUNK: usize = 256;

/// `k! / Π_i e_i!` for the label multiset of `theta`.
pub fn multinomial_coeff(theta: &[usize]) -> u64 {
    assert!(!theta.is_empty(), "tuple must be non-empty");
    let l = theta.iter().max().unwrap() + 1;
    let mut counts = vec![0u64; l];
    for &t in theta {
        counts[t] += 1;
    }
    // Product of binomials C(e_1, e_1) C(e_1 + e_2, e_2) ⋯ stays integral.
    let mut total = 0u64;
    let mut acc = 1u64;
    for e in counts {
        for i in 1..=e {
            total += 1;
            acc = acc * total / i;
        }
    }
    acc
}

/// All `l^k` label tuples of order `k` in lexicographic order with their
/// multinomial coefficients. Entry `idx` is the tuple whose base-`l` digits
/// spell `idx`.
#[derive(Debug, Clone, PartialEq)]
pub struct CoeffTable {
    k: usize,
    l: usize,
    coeffs: Vec<u64>,
    weights: Vec<f64>,
}

impl CoeffTable {
    pub fn order(&self) -> usize {
        self.k
    }

    pub fn label_count(&self) -> usize {
        self.l
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn coeffs(&self) -> &[u64] {
        &self.coeffs
    }

    /// Tuple at lexicographic index `idx`.
    pub fn theta(&self, mut idx: usize) -> Vec<usize> {
        let mut t = vec![0; self.k];
        for slot in t.iter_mut().rev() {
            *slot = idx % self.l;
            idx /= self.l;
        }
        t
    }

    pub fn entries(&self) -> impl Iterator<Item = (Vec<usize>, u64)> + '_ {
        self.coeffs.iter().enumerate().map(|(i, &c)| (self.theta(i), c))
    }

    /// Suffix-sum walk. Returns Σ over completions of the prefix at `pos`;
    /// when `grad` is given, adds `prefix · T(child)` into `grad[pos][i]`.
    fn walk(&self, rows: &[&[f64]], pos: usize, idx: usize, prefix: f64, grad: &mut Option<&mut [f64]>) -> f64 {
        if pos == self.k {
            return self.weights[idx];
        }
        let row = rows[pos];
        let mut total = 0.0;
        for (i, &p) in row.iter().enumerate() {
            let child = self.walk(rows, pos + 1, idx * self.l + i, prefix * p, grad);
            if let Some(g) = grad.as_deref_mut() {
                g[pos * self.l + i] += prefix * child;
            }
            total += p * child;
        }
        total
    }

    /// Value of the θ-sum for one clique.
    pub fn penalty(&self, rows: &[&[f64]]) -> f64 {
        debug_assert_eq!(rows.len(), self.k);
        self.walk(rows, 0, 0, 1.0, &mut None)
    }

    /// Value and `∂/∂rows[a][i]` (row-major `k × l`, overwritten).
    pub fn penalty_with_grad(&self, rows: &[&[f64]], grad: &mut [f64]) -> f64 {
        debug_assert_eq!(grad.len(), self.k * self.l);
        grad.fill(0.0);
        self.walk(rows, 0, 0, 1.0, &mut Some(grad))
    }
}

pub fn coeff_table(k: usize, l: usize) -> Result<CoeffTable> {
    coeff_table_with_budget(k, l, DEFAULT_TABLE_BUDGET)
}

pub fn coeff_table_with_budget(k: usize, l: usize, budget: usize) -> Result<CoeffTable> {
    assert!(k >= 1 && l >= 1);
    let size = (l as u128).checked_pow(k as u32).unwrap_or(u128::MAX);
    if size > budget as u128 {
        return Err(Error::Resource(format!(
            "coefficient table for k = {k}, l = {l} has {size} entries (budget {budget}); lower the maximum order or the label count"
        )));
    }
    let size = size as usize;
    let mut coeffs = Vec::with_capacity(size);
    let mut digits = vec![0usize; k];
    let mut counts = vec![0usize; l];
    counts[0] = k;
    let fact: Vec<u64> = (0..=k as u64)
        .scan(1u64, |acc, i| {
            if i > 0 {
                *acc *= i;
            }
            Some(*acc)
        })
        .collect();
    for _ in 0..size {
        let denom: u64 = counts.iter().map(|&e| fact[e]).product();
        coeffs.push(fact[k] / denom);
        // Odometer increment, tracking label counts.
        for pos in (0..k).rev() {
            counts[digits[pos]] -= 1;
            digits[pos] = (digits[pos] + 1) % l;
            counts[digits[pos]] += 1;
            if digits[pos] != 0 {
                break;
            }
        }
    }
    let weights = coeffs.iter().map(|&c| c as f64).collect();
    Ok(CoeffTable { k, l, coeffs, weights })
}

/// `Σ_θ C_θ Π_a rows[a][θ_a]` for one clique.
pub fn clique_penalty(rows: &[&[f64]], table: &CoeffTable) -> f64 {
    table.penalty(rows)
}

/// Precomputed tables for evaluating `J_m` on a fixed complex.
#[derive(Debug, Clone)]
pub struct Objective<'a> {
    complex: &'a CliqueComplex,
    order: usize,
    alpha: f64,
    tables: Vec<CoeffTable>,
}

impl<'a> Objective<'a> {
    /// `order` is the truncation `m`; `alpha` the weight base (`w_k = α^(k-1)`).
    pub fn new(complex: &'a CliqueComplex, labels: usize, order: usize, alpha: f64) -> Result<Self> {
        if order < 2 || order > complex.max_order() {
            return Err(Error::Config(format!(
                "objective order {order} outside 2..={}",
                complex.max_order()
            )));
        }
        if alpha.is_nan() || alpha <= 0.0 {
            return Err(Error::Config(format!("weight base must be positive, got {alpha}")));
        }
        let tables = (2..=order)
            .map(|k| coeff_table(k, labels))
            .collect::<Result<Vec<_>>>()?;
        Ok(Objective {
            complex,
            order,
            alpha,
            tables,
        })
    }

    pub fn weight(&self, k: usize) -> f64 {
        self.alpha.powi(k as i32 - 1)
    }

    pub fn order(&self) -> usize {
        self.order
    }

    fn table(&self, k: usize) -> &CoeffTable {
        &self.tables[k - 2]
    }

    /// Unweighted `Σ_{K_k}` penalty.
    pub fn order_sum(&self, dist: &LabelDistribution, k: usize) -> f64 {
        let table = self.table(k);
        let flat = self.complex.flat(k);
        let partial = par::map_chunks(flat, CHUNK * k, |chunk| {
            let mut rows: Vec<&[f64]> = Vec::with_capacity(k);
            let mut s = 0.0;
            for clique in chunk.chunks_exact(k) {
                rows.clear();
                rows.extend(clique.iter().map(|&v| dist.row(v)));
                s += table.penalty(&rows);
            }
            s
        });
        partial.iter().sum()
    }

    pub fn value(&self, dist: &LabelDistribution) -> f64 {
        (2..=self.order).map(|k| self.weight(k) * self.order_sum(dist, k)).sum()
    }

    /// `J` and `∂J/∂p` (row-major `n × l`).
    pub fn value_and_prob_grad(&self, dist: &LabelDistribution) -> (f64, Vec<f64>) {
        let l = dist.label_count();
        let mut grad = vec![0.0; dist.node_count() * l];
        let mut value = 0.0;
        for k in 2..=self.order {
            let table = self.table(k);
            let w = self.weight(k);
            let flat = self.complex.flat(k);
            // Per-clique gradients computed in parallel, scattered in clique
            // order below.
            let parts = par::map_chunks(flat, CHUNK * k, |chunk| {
                let mut rows: Vec<&[f64]> = Vec::with_capacity(k);
                let mut local = vec![0.0; chunk.len() * l];
                let mut s = 0.0;
                for (c, clique) in chunk.chunks_exact(k).enumerate() {
                    rows.clear();
                    rows.extend(clique.iter().map(|&v| dist.row(v)));
                    s += table.penalty_with_grad(&rows, &mut local[c * k * l..(c + 1) * k * l]);
                }
                (s, local)
            });
            let mut order_sum = 0.0;
            for ((s, local), chunk) in parts.iter().zip(flat.chunks(CHUNK * k)) {
                order_sum += s;
                for (a, &v) in chunk.iter().enumerate() {
                    let src = &local[a * l..(a + 1) * l];
                    let dst = &mut grad[v * l..(v + 1) * l];
                    for (d, g) in dst.iter_mut().zip(src) {
                        *d += w * g;
                    }
                }
            }
            value += w * order_sum;
        }
        (value, grad)
    }
}

/// `J_m` for a distribution (labelled-node terms included).
pub fn objective_value(complex: &CliqueComplex, dist: &LabelDistribution, order: usize, alpha: f64) -> Result<f64> {
    Ok(Objective::new(complex, dist.label_count(), order, alpha)?.value(dist))
}

/// Gradient of `J_m` with respect to the free logits; labelled rows get zero.
pub fn objective_gradient(
    complex: &CliqueComplex,
    logits: &crate::train::NodeLogits,
    order: usize,
    alpha: f64,
) -> Result<Vec<f64>> {
    let obj = Objective::new(complex, logits.label_count(), order, alpha)?;
    let dist = logits.distribution();
    let (_, pgrad) = obj.value_and_prob_grad(&dist);
    Ok(logits.chain_softmax(&dist, &pgrad))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cliques::enumerate_cliques;
    use crate::graph::Graph;

    #[test]
    fn multinomial_values() {
        assert_eq!(multinomial_coeff(&[0, 0, 1]), 3);
        assert_eq!(multinomial_coeff(&[0, 0, 0]), 1);
        assert_eq!(multinomial_coeff(&[0, 1, 2, 3]), 24);
        assert_eq!(multinomial_coeff(&[2, 2, 0, 0, 1]), 30);
    }

    #[test]
    fn example_tables() {
        let t = coeff_table(3, 2).unwrap();
        assert_eq!(t.coeffs(), &[1, 3, 3, 3, 3, 3, 3, 1]);
        assert_eq!(t.coeffs().iter().sum::<u64>(), 20);
        assert_eq!(t.theta(3), vec![0, 1, 1]);
        let t = coeff_table(2, 2).unwrap();
        assert_eq!(t.coeffs(), &[1, 2, 2, 1]);
        for (theta, c) in coeff_table(4, 3).unwrap().entries() {
            assert_eq!(c, multinomial_coeff(&theta));
        }
    }

    #[test]
    fn table_budget() {
        let err = coeff_table_with_budget(5, 7, 1000).unwrap_err();
        assert!(matches!(err, Error::Resource(_)));
    }

    #[test]
    fn penalty_cases() {
        let t3 = coeff_table(3, 2).unwrap();
        let a = [1.0, 0.0];
        assert_eq!(clique_penalty(&[&a, &a, &a], &t3), 1.0);
        let u = [0.5, 0.5];
        assert_eq!(clique_penalty(&[&u, &u, &u], &t3), 2.5);
        let t2 = coeff_table(2, 2).unwrap();
        let b = [0.0, 1.0];
        assert_eq!(clique_penalty(&[&a, &b], &t2), 2.0);
    }

    #[test]
    fn penalty_gradient_matches_rows_substitution() {
        let t = coeff_table(3, 3).unwrap();
        let r = [[0.2, 0.5, 0.3], [0.6, 0.1, 0.3], [0.25, 0.25, 0.5]];
        let rows: Vec<&[f64]> = r.iter().map(|x| &x[..]).collect();
        let mut g = vec![0.0; 9];
        let v = t.penalty_with_grad(&rows, &mut g);
        assert!((v - t.penalty(&rows)).abs() < 1e-15);
        // Multilinear: the partial derivative is the penalty with row a
        // replaced by a unit vector.
        for a in 0..3 {
            for i in 0..3 {
                let mut e = [0.0; 3];
                e[i] = 1.0;
                let mut sub = rows.clone();
                sub[a] = &e;
                assert!((g[a * 3 + i] - t.penalty(&sub)).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn example_graph_value() {
        let g = Graph::from_edge_list(4, &[(0, 1), (0, 2), (1, 2), (2, 3)]).unwrap();
        let c = enumerate_cliques(&g, 3);
        let d = LabelDistribution::one_hot(&[0; 4], 2);
        assert_eq!(objective_value(&c, &d, 3, 1.0).unwrap(), 5.0);
        assert_eq!(objective_value(&c, &d, 2, 1.0).unwrap(), 4.0);
        assert_eq!(objective_value(&c, &d, 3, 2.0).unwrap(), 4.0 * 2.0 + 4.0);
        let empty = enumerate_cliques(&Graph::empty(4), 3);
        assert_eq!(objective_value(&empty, &d, 3, 1.0).unwrap(), 0.0);
        assert!(objective_value(&c, &d, 4, 1.0).is_err());
    }
}
