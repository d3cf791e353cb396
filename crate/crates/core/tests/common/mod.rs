//! Independent reference implementations used by the integration tests.
//! Nothing here calls the library's algorithms; only plain data goes in.
#![allow(dead_code, clippy::needless_range_loop)]

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Erdős–Rényi edge list with `a < b`.
pub fn random_edges<R: Rng>(n: usize, p: f64, rng: &mut R) -> Vec<(usize, usize)> {
    let mut e = Vec::new();
    for a in 0..n {
        for b in a + 1..n {
            if rng.random::<f64>() < p {
                e.push((a, b));
            }
        }
    }
    e
}

/// Random spanning tree plus extra random edges, so the graph is connected.
pub fn connected_edges<R: Rng>(n: usize, p: f64, rng: &mut R) -> Vec<(usize, usize)> {
    let mut e = random_edges(n, p, rng);
    for v in 1..n {
        let u = rng.random_range(0..v);
        e.push((u, v));
    }
    e
}

pub fn adjacency(n: usize, edges: &[(usize, usize)]) -> Vec<Vec<bool>> {
    let mut a = vec![vec![false; n]; n];
    for &(x, y) in edges {
        if x != y {
            a[x][y] = true;
            a[y][x] = true;
        }
    }
    a
}

pub fn neighbour_lists(n: usize, edges: &[(usize, usize)]) -> Vec<Vec<usize>> {
    let a = adjacency(n, edges);
    (0..n).map(|i| (0..n).filter(|&j| a[i][j]).collect()).collect()
}

fn subsets(n: usize, k: usize, start: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
    if cur.len() == k {
        out.push(cur.clone());
        return;
    }
    for v in start..n {
        if n - v < k - cur.len() {
            break;
        }
        cur.push(v);
        subsets(n, k, v + 1, cur, out);
        cur.pop();
    }
}

/// All k-subsets of `0..n`, lexicographic.
pub fn k_subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    subsets(n, k, 0, &mut Vec::new(), &mut out);
    out
}

/// `result[k]` lists every k-clique (ascending tuples, lexicographic) for
/// `k = 2..=max_order`, found by testing every subset.
pub fn brute_cliques(n: usize, edges: &[(usize, usize)], max_order: usize) -> Vec<Vec<Vec<usize>>> {
    let a = adjacency(n, edges);
    let mut res = vec![Vec::new(); max_order + 1];
    for (k, slot) in res.iter_mut().enumerate().skip(2) {
        *slot = k_subsets(n, k)
            .into_iter()
            .filter(|s| s.iter().enumerate().all(|(i, &x)| s[i + 1..].iter().all(|&y| a[x][y])))
            .collect();
    }
    res
}

pub fn factorial(k: usize) -> f64 {
    (1..=k).map(|i| i as f64).product()
}

/// Objective evaluated from its definition: every clique, every label tuple
/// `θ ∈ [l]^k`, `C_θ = k!/Π e_i!` from factorials.
pub fn brute_objective(
    n: usize,
    edges: &[(usize, usize)],
    rows: &[Vec<f64>],
    l: usize,
    order: usize,
    alpha: f64,
) -> f64 {
    let cliques = brute_cliques(n, edges, order);
    let mut total = 0.0;
    for (k, level) in cliques.iter().enumerate().skip(2) {
        let mut sum_k = 0.0;
        for clique in level {
            let tuples = (l as u64).pow(k as u32);
            for code in 0..tuples {
                let mut theta = Vec::with_capacity(k);
                let mut c = code;
                for _ in 0..k {
                    theta.push((c % l as u64) as usize);
                    c /= l as u64;
                }
                let mut counts = vec![0usize; l];
                for &t in &theta {
                    counts[t] += 1;
                }
                let coeff = factorial(k) / counts.iter().map(|&e| factorial(e)).product::<f64>();
                let prod: f64 = clique.iter().zip(&theta).map(|(&j, &t)| rows[j][t]).product();
                sum_k += coeff * prod;
            }
        }
        total += alpha.powi(k as i32 - 1) * sum_k;
    }
    total
}

/// Random rows on the probability simplex.
pub fn random_rows<R: Rng>(n: usize, l: usize, rng: &mut R) -> Vec<Vec<f64>> {
    (0..n)
        .map(|_| {
            let r: Vec<f64> = (0..l).map(|_| -rng.random::<f64>().max(1e-300).ln()).collect();
            let s: f64 = r.iter().sum();
            r.iter().map(|x| x / s).collect()
        })
        .collect()
}

/// Dirichlet solution by dense Gaussian elimination with partial pivoting on
/// the interior equations `deg(i) u_i - Σ_{j~i} u_j = 0`.
pub fn dense_dirichlet(n: usize, edges: &[(usize, usize)], ones: &[usize], zeros: &[usize]) -> Vec<f64> {
    let nb = neighbour_lists(n, edges);
    let mut fixed = vec![None; n];
    for &v in ones {
        fixed[v] = Some(1.0);
    }
    for &v in zeros {
        fixed[v] = Some(0.0);
    }
    let interior: Vec<usize> = (0..n).filter(|&v| fixed[v].is_none()).collect();
    let pos: std::collections::HashMap<usize, usize> = interior.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let m = interior.len();
    let mut a = vec![vec![0.0; m + 1]; m];
    for (r, &v) in interior.iter().enumerate() {
        a[r][r] = nb[v].len() as f64;
        for &w in &nb[v] {
            match fixed[w] {
                Some(x) => a[r][m] += x,
                None => a[r][pos[&w]] -= 1.0,
            }
        }
    }
    for c in 0..m {
        let p = (c..m).max_by(|&x, &y| a[x][c].abs().total_cmp(&a[y][c].abs())).unwrap();
        a.swap(c, p);
        for r in 0..m {
            if r != c {
                let f = a[r][c] / a[c][c];
                if f != 0.0 {
                    for k in c..=m {
                        a[r][k] -= f * a[c][k];
                    }
                }
            }
        }
    }
    let mut u: Vec<f64> = fixed.iter().map(|f| f.unwrap_or(0.0)).collect();
    for (r, &v) in interior.iter().enumerate() {
        u[v] = a[r][m] / a[r][r];
    }
    u
}

/// Fraction of simple random walks from `start` that reach a node of `ones`
/// before a node of `zeros`.
pub fn monte_carlo_hit<R: Rng>(
    nb: &[Vec<usize>],
    boundary: &[Option<bool>],
    start: usize,
    walks: usize,
    rng: &mut R,
) -> f64 {
    let mut hits = 0usize;
    for _ in 0..walks {
        let mut v = start;
        loop {
            if let Some(b) = boundary[v] {
                hits += usize::from(b);
                break;
            }
            v = nb[v][rng.random_range(0..nb[v].len())];
        }
    }
    hits as f64 / walks as f64
}

/// Spearman rank correlation (no ties expected).
pub fn spearman(x: &[f64], y: &[f64]) -> f64 {
    fn ranks(v: &[f64]) -> Vec<f64> {
        let mut idx: Vec<usize> = (0..v.len()).collect();
        idx.sort_by(|&a, &b| v[a].total_cmp(&v[b]));
        let mut r = vec![0.0; v.len()];
        let mut i = 0;
        while i < idx.len() {
            let mut j = i;
            while j + 1 < idx.len() && v[idx[j + 1]] == v[idx[i]] {
                j += 1;
            }
            let avg = (i + j) as f64 / 2.0 + 1.0;
            for t in i..=j {
                r[idx[t]] = avg;
            }
            i = j + 1;
        }
        r
    }
    let (rx, ry) = (ranks(x), ranks(y));
    let n = x.len() as f64;
    let mx = rx.iter().sum::<f64>() / n;
    let my = ry.iter().sum::<f64>() / n;
    let cov: f64 = rx.iter().zip(&ry).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sx: f64 = rx.iter().map(|a| (a - mx).powi(2)).sum::<f64>().sqrt();
    let sy: f64 = ry.iter().map(|b| (b - my).powi(2)).sum::<f64>().sqrt();
    cov / (sx * sy)
}
