//! Uncentered moment and correlation matrices over signature components.

use crate::error::{Result, SigLabError};
use crate::sig::WordIndexing;
use nalgebra::DMatrix;

/// Whether entries are raw uncentered second moments `E[S_w S_v]` or their
/// correlation normalization `E[S_w S_v] / sqrt(E[S_w^2] E[S_v^2])`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MomentKind {
    Covariance,
    Correlation,
}

/// Symmetric matrix of uncentered second moments (or correlations) over the
/// signature components of `indexing`, together with the first moments.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentMatrix {
    pub indexing: WordIndexing,
    pub kind: MomentKind,
    values: DMatrix<f64>,
    pub first_moments: Vec<f64>,
}

impl MomentMatrix {
    pub fn new(
        indexing: WordIndexing,
        kind: MomentKind,
        values: DMatrix<f64>,
        first_moments: Vec<f64>,
    ) -> Result<Self> {
        let p = indexing.len();
        if values.nrows() != p || values.ncols() != p || first_moments.len() != p {
            return Err(SigLabError::InvalidArgument(
                "moment matrix shape does not match the word indexing".into(),
            ));
        }
        Ok(Self {
            indexing,
            kind,
            values,
            first_moments,
        })
    }

    pub fn dim(&self) -> usize {
        self.values.nrows()
    }

    pub fn value(&self, i: usize, j: usize) -> f64 {
        self.values[(i, j)]
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.values
    }

    /// Correlation normalization. Zero-variance components are rejected.
    pub fn correlation(&self) -> Result<MomentMatrix> {
        if self.kind == MomentKind::Correlation {
            return Ok(self.clone());
        }
        let p = self.dim();
        let mut scale = vec![0.0; p];
        for i in 0..p {
            let v = self.values[(i, i)];
            if !(v > 0.0) {
                return Err(SigLabError::DegenerateColumn {
                    word: self.indexing.word(i).label(),
                    reason: format!("second moment {} is not positive", v),
                });
            }
            scale[i] = v.sqrt();
        }
        let values = DMatrix::from_fn(p, p, |i, j| {
            if i == j {
                // Exactly 1 by definition; avoids sqrt round-off.
                1.0
            } else {
                self.values[(i, j)] / (scale[i] * scale[j])
            }
        });
        MomentMatrix::new(
            self.indexing.clone(),
            MomentKind::Correlation,
            values,
            self.first_moments.clone(),
        )
    }

    /// Square CSV with word labels on both axes.
    pub fn to_csv(&self) -> String {
        let labels = self.indexing.labels();
        let mut out = String::from("word");
        for l in &labels {
            out.push_str(&format!(",\"{}\"", l));
        }
        out.push('\n');
        for (i, l) in labels.iter().enumerate() {
            out.push_str(&format!("\"{}\"", l));
            for j in 0..self.dim() {
                out.push_str(&format!(",{:e}", self.values[(i, j)]));
            }
            out.push('\n');
            let _ = l;
        }
        out
    }

    /// Long format `(row_word, col_word, value)` for heatmap plotting.
    pub fn to_long_csv(&self) -> String {
        let labels = self.indexing.labels();
        let mut out = String::from("row_word,col_word,value\n");
        for i in 0..self.dim() {
            for j in 0..self.dim() {
                out.push_str(&format!(
                    "\"{}\",\"{}\",{:e}\n",
                    labels[i],
                    labels[j],
                    self.values[(i, j)]
                ));
            }
        }
        out
    }

    /// Maximum absolute entry difference against another matrix of the same
    /// shape.
    pub fn max_abs_diff(&self, other: &MomentMatrix) -> f64 {
        let mut m: f64 = 0.0;
        for i in 0..self.dim() {
            for j in 0..self.dim() {
                m = m.max((self.values[(i, j)] - other.values[(i, j)]).abs());
            }
        }
        m
    }
}
