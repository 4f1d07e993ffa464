use crate::error::{Error, Result};

use super::Label;

/// Symmetric matrix `(q_{i,j})` with entries in `[-1, 1]`, indexed by labels.
#[derive(Debug, Clone, PartialEq)]
pub struct QMatrix {
    labels: Vec<Label>,
    entries: Vec<f64>,
}

impl QMatrix {
    /// `entries` is row-major, `labels.len()²` long.
    pub fn new(labels: Vec<Label>, entries: Vec<f64>) -> Result<Self> {
        let n = labels.len();
        if entries.len() != n * n {
            return Err(Error::Domain(format!(
                "q-matrix needs {} entries, got {}",
                n * n,
                entries.len()
            )));
        }
        for (k, l) in labels.iter().enumerate() {
            if labels[..k].contains(l) {
                return Err(Error::Domain(format!("duplicate label {l}")));
            }
        }
        let q = Self { labels, entries };
        for i in 0..n {
            for j in 0..n {
                let v = q.entries[i * n + j];
                if !(-1.0..=1.0).contains(&v) {
                    return Err(Error::Domain(format!("q entry {v} outside [-1, 1]")));
                }
                if v != q.entries[j * n + i] {
                    return Err(Error::Domain("q-matrix is not symmetric".into()));
                }
            }
        }
        Ok(q)
    }

    /// Every entry (diagonal included) equal to `q`.
    pub fn uniform(labels: Vec<Label>, q: f64) -> Result<Self> {
        let n = labels.len();
        Self::new(labels, vec![q; n * n])
    }

    pub fn labels(&self) -> &[Label] {
        &self.labels
    }

    pub fn index_of(&self, label: Label) -> Result<usize> {
        self.labels
            .iter()
            .position(|&l| l == label)
            .ok_or(Error::UnknownLabel(label))
    }

    pub fn get(&self, i: Label, j: Label) -> Result<f64> {
        Ok(self.at(self.index_of(i)?, self.index_of(j)?))
    }

    /// Entry by position in [`labels`](Self::labels).
    pub fn at(&self, i: usize, j: usize) -> f64 {
        self.entries[i * self.labels.len() + j]
    }

    /// Sets `q_{i,j} = q_{j,i} = v`.
    pub fn set(&mut self, i: Label, j: Label, v: f64) -> Result<()> {
        if !(-1.0..=1.0).contains(&v) {
            return Err(Error::Domain(format!("q entry {v} outside [-1, 1]")));
        }
        let (a, b) = (self.index_of(i)?, self.index_of(j)?);
        let n = self.labels.len();
        self.entries[a * n + b] = v;
        self.entries[b * n + a] = v;
        Ok(())
    }

    /// Maps each letter to its position in the label list.
    pub(crate) fn positions(&self, letters: &[Label]) -> Result<Vec<usize>> {
        letters.iter().map(|&l| self.index_of(l)).collect()
    }
}
