//! Softmax-parameterised minimisation of the simplicial objective with Adam.

use rand::Rng;

use crate::cliques::CliqueComplex;
use crate::distribution::LabelDistribution;
use crate::error::{Error, Result};
use crate::objective::Objective;
use crate::seeding::{self, tag};

/// Offset inside the log when turning an initial distribution into logits.
pub const LOG_EPS: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq)]
pub struct TrainConfig {
    /// Weight base: order `k` is weighted by `alpha^(k-1)`.
    pub alpha: f64,
    /// Truncation order `m` of the objective.
    pub order: usize,
    pub learning_rate: f64,
    pub epochs: usize,
    /// Only used for Glorot initialisation.
    pub seed: u64,
    pub beta1: f64,
    pub beta2: f64,
    pub adam_eps: f64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            alpha: 1.0,
            order: 5,
            learning_rate: 0.4,
            epochs: 10,
            seed: 0,
            beta1: 0.9,
            beta2: 0.999,
            adam_eps: 1e-8,
        }
    }
}

/// Free logits for unlabelled nodes; labelled rows are clamped one-hots.
#[derive(Debug, Clone, PartialEq)]
pub struct NodeLogits {
    n: usize,
    l: usize,
    z: Vec<f64>,
    fixed: Vec<Option<usize>>,
}

impl NodeLogits {
    pub fn new(l: usize, z: Vec<f64>, fixed: Vec<Option<usize>>) -> Result<Self> {
        let n = fixed.len();
        if z.len() != n * l {
            return Err(Error::Input(format!(
                "logits have {} values, expected {n}×{l}",
                z.len()
            )));
        }
        if let Some(c) = fixed.iter().flatten().find(|&&c| c >= l) {
            return Err(Error::Input(format!("fixed label {c} outside 0..{l}")));
        }
        Ok(NodeLogits { n, l, z, fixed })
    }

    /// `z = log(p + ε)` row by row.
    pub fn from_distribution(init: &LabelDistribution, fixed: Vec<Option<usize>>) -> Result<Self> {
        let z = init.values().iter().map(|p| (p + LOG_EPS).ln()).collect();
        Self::new(init.label_count(), z, fixed)
    }

    /// Glorot-uniform logits with limit `sqrt(6 / (n + l))`.
    pub fn glorot(n: usize, l: usize, fixed: Vec<Option<usize>>, seed: u64) -> Result<Self> {
        let limit = (6.0 / (n + l) as f64).sqrt();
        let mut rng = seeding::stream(seed, &[tag::GLOROT]);
        let z = (0..n * l).map(|_| rng.random_range(-limit..=limit)).collect();
        Self::new(l, z, fixed)
    }

    pub fn node_count(&self) -> usize {
        self.n
    }

    pub fn label_count(&self) -> usize {
        self.l
    }

    pub fn values(&self) -> &[f64] {
        &self.z
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.z
    }

    pub fn fixed(&self) -> &[Option<usize>] {
        &self.fixed
    }

    /// Row-wise softmax, with labelled rows replaced by one-hots.
    pub fn distribution(&self) -> LabelDistribution {
        let l = self.l;
        let mut p = vec![0.0; self.n * l];
        for j in 0..self.n {
            let out = &mut p[j * l..(j + 1) * l];
            match self.fixed[j] {
                Some(c) => out[c] = 1.0,
                None => softmax_into(&self.z[j * l..(j + 1) * l], out),
            }
        }
        LabelDistribution::from_raw(self.n, l, p).expect("shape checked at construction")
    }

    /// Pulls `∂J/∂p` back through the softmax:
    /// `∂J/∂z_i = p_i (g_i - Σ_m p_m g_m)`. Labelled rows get zero.
    pub fn chain_softmax(&self, dist: &LabelDistribution, prob_grad: &[f64]) -> Vec<f64> {
        let l = self.l;
        let mut out = vec![0.0; self.n * l];
        for j in 0..self.n {
            if self.fixed[j].is_some() {
                continue;
            }
            let p = dist.row(j);
            let g = &prob_grad[j * l..(j + 1) * l];
            let mean: f64 = p.iter().zip(g).map(|(a, b)| a * b).sum();
            for i in 0..l {
                out[j * l + i] = p[i] * (g[i] - mean);
            }
        }
        out
    }
}

fn softmax_into(z: &[f64], out: &mut [f64]) {
    let max = z.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut s = 0.0;
    for (o, &v) in out.iter_mut().zip(z) {
        *o = (v - max).exp();
        s += *o;
    }
    out.iter_mut().for_each(|o| *o /= s);
}

/// Starting point for training.
#[derive(Debug, Clone, Copy)]
pub enum Init<'a> {
    /// Logits `log(p + ε)` of a given distribution (RW or external).
    Distribution(&'a LabelDistribution),
    Glorot,
}

/// Training result.
#[derive(Debug, Clone)]
pub struct TrainOutcome {
    pub distribution: LabelDistribution,
    /// `J_m` before the first step and after every epoch.
    pub trajectory: Vec<f64>,
}

struct Adam {
    lr: f64,
    beta1: f64,
    beta2: f64,
    eps: f64,
    t: i32,
    m: Vec<f64>,
    v: Vec<f64>,
}

impl Adam {
    fn new(cfg: &TrainConfig, len: usize) -> Self {
        Adam {
            lr: cfg.learning_rate,
            beta1: cfg.beta1,
            beta2: cfg.beta2,
            eps: cfg.adam_eps,
            t: 0,
            m: vec![0.0; len],
            v: vec![0.0; len],
        }
    }

    fn step(&mut self, params: &mut [f64], grad: &[f64], frozen: impl Fn(usize) -> bool) {
        self.t += 1;
        let c1 = 1.0 - self.beta1.powi(self.t);
        let c2 = 1.0 - self.beta2.powi(self.t);
        for (idx, (x, &g)) in params.iter_mut().zip(grad).enumerate() {
            if frozen(idx) {
                continue;
            }
            self.m[idx] = self.beta1 * self.m[idx] + (1.0 - self.beta1) * g;
            self.v[idx] = self.beta2 * self.v[idx] + (1.0 - self.beta2) * g * g;
            let m_hat = self.m[idx] / c1;
            let v_hat = self.v[idx] / c2;
            *x -= self.lr * m_hat / (v_hat.sqrt() + self.eps);
        }
    }
}

/// Minimises `J_m` over the product of simplices with full-batch Adam on
/// softmax logits. `known[j] = Some(c)` clamps node `j` to label `c`.
pub fn train(
    complex: &CliqueComplex,
    init: Init<'_>,
    known: &[Option<usize>],
    l: usize,
    cfg: &TrainConfig,
) -> Result<TrainOutcome> {
    let n = complex.node_count();
    if known.len() != n {
        return Err(Error::Input(format!(
            "label map covers {} nodes, complex has {n}",
            known.len()
        )));
    }
    let objective = Objective::new(complex, l, cfg.order, cfg.alpha)?;
    let mut logits = match init {
        Init::Distribution(d) => {
            if d.node_count() != n || d.label_count() != l {
                return Err(Error::Input(format!(
                    "initial distribution is {}×{}, expected {n}×{l}",
                    d.node_count(),
                    d.label_count()
                )));
            }
            if cfg.epochs == 0 {
                // No steps: the initializer is the answer, with clamps applied.
                let mut out = d.clone();
                for (j, c) in known.iter().enumerate() {
                    if let Some(c) = *c {
                        out.set_one_hot(j, c);
                    }
                }
                let j = objective.value(&out);
                return Ok(TrainOutcome {
                    distribution: out,
                    trajectory: vec![j],
                });
            }
            NodeLogits::from_distribution(d, known.to_vec())?
        }
        Init::Glorot => NodeLogits::glorot(n, l, known.to_vec(), cfg.seed)?,
    };

    let mut adam = Adam::new(cfg, n * l);
    let mut trajectory = Vec::with_capacity(cfg.epochs + 1);
    let mut dist = logits.distribution();
    for _ in 0..cfg.epochs {
        let (value, pgrad) = objective.value_and_prob_grad(&dist);
        trajectory.push(value);
        let grad = logits.chain_softmax(&dist, &pgrad);
        adam.step(logits.values_mut(), &grad, |idx| known[idx / l].is_some());
        dist = logits.distribution();
    }
    trajectory.push(objective.value(&dist));
    Ok(TrainOutcome {
        distribution: dist,
        trajectory,
    })
}

/// Row argmax, ties to the lowest label.
pub fn classify(dist: &LabelDistribution) -> Vec<usize> {
    dist.argmax()
}
