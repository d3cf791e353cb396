use crate::error::{Error, Result};

/// Row-stochastic tolerance for a valid distribution.
pub const ROW_SUM_TOL: f64 = 1e-9;

/// `n × l` matrix whose row `j` is node `j`'s probability over the `l` labels.
#[derive(Debug, Clone, PartialEq)]
pub struct LabelDistribution {
    n: usize,
    l: usize,
    values: Vec<f64>,
}

impl LabelDistribution {
    /// Wraps row-major `values`, checking shape, finiteness, non-negativity and
    /// row sums within [`ROW_SUM_TOL`].
    pub fn new(n: usize, l: usize, values: Vec<f64>) -> Result<Self> {
        let d = Self::from_raw(n, l, values)?;
        d.validate(ROW_SUM_TOL)?;
        Ok(d)
    }

    /// Shape check only.
    pub(crate) fn from_raw(n: usize, l: usize, values: Vec<f64>) -> Result<Self> {
        if values.len() != n * l {
            return Err(Error::Input(format!(
                "distribution has {} values, expected {n}×{l}",
                values.len()
            )));
        }
        Ok(LabelDistribution { n, l, values })
    }

    pub fn uniform(n: usize, l: usize) -> Self {
        LabelDistribution {
            n,
            l,
            values: vec![1.0 / l as f64; n * l],
        }
    }

    /// One-hot rows for a complete labelling.
    pub fn one_hot(labels: &[usize], l: usize) -> Self {
        let mut d = LabelDistribution {
            n: labels.len(),
            l,
            values: vec![0.0; labels.len() * l],
        };
        for (j, &c) in labels.iter().enumerate() {
            d.values[j * l + c] = 1.0;
        }
        d
    }

    pub fn validate(&self, tol: f64) -> Result<()> {
        for j in 0..self.n {
            let row = self.row(j);
            if row.iter().any(|v| !v.is_finite() || *v < 0.0) {
                return Err(Error::Input(format!("row {j} has a negative or non-finite entry")));
            }
            let s: f64 = row.iter().sum();
            if (s - 1.0).abs() > tol {
                return Err(Error::Input(format!("row {j} sums to {s}, not 1")));
            }
        }
        Ok(())
    }

    pub fn node_count(&self) -> usize {
        self.n
    }

    pub fn label_count(&self) -> usize {
        self.l
    }

    #[inline]
    pub fn row(&self, j: usize) -> &[f64] {
        &self.values[j * self.l..(j + 1) * self.l]
    }

    #[inline]
    pub fn row_mut(&mut self, j: usize) -> &mut [f64] {
        &mut self.values[j * self.l..(j + 1) * self.l]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn set_one_hot(&mut self, j: usize, label: usize) {
        let row = self.row_mut(j);
        row.fill(0.0);
        row[label] = 1.0;
    }

    pub fn normalize_row(&mut self, j: usize) {
        let row = self.row_mut(j);
        let s: f64 = row.iter().sum();
        row.iter_mut().for_each(|v| *v /= s);
    }

    /// Row argmax with ties going to the lowest label index.
    pub fn argmax(&self) -> Vec<usize> {
        (0..self.n).map(|j| argmax_row(self.row(j))).collect()
    }

    /// Same distribution with label columns permuted: new column `perm[i]`
    /// holds old column `i`.
    pub fn permute_labels(&self, perm: &[usize]) -> Self {
        let mut out = self.clone();
        for j in 0..self.n {
            for (i, &p) in perm.iter().enumerate() {
                out.values[j * self.l + p] = self.values[j * self.l + i];
            }
        }
        out
    }
}

pub fn argmax_row(row: &[f64]) -> usize {
    let mut best = 0;
    for (i, &v) in row.iter().enumerate().skip(1) {
        if v > row[best] {
            best = i;
        }
    }
    best
}
