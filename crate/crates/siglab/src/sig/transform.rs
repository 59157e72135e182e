//! Truncated signature transforms of discrete paths.
//!
//! Three discretizations of the iterated integrals are supported:
//!
//! * `Ito` — left-point sums, `S_{t_{j+1}}^w = S_{t_j}^w + S_{t_j}^{w-} dX`;
//! * `Stratonovich` — trapezoidal sums with the parent component averaged
//!   over the step endpoints;
//! * `Linear` — the exact signature of the piecewise-linear interpolant,
//!   built segment by segment (a single segment with increment `dx` has
//!   component `prod_j dx^(w_j) / k!` for a word of length `k`) and
//!   composed across segments with Chen's identity on the truncated tensor
//!   algebra.
//!
//! The iterated-sum recursions need components at every grid time for the
//! parent order; a full component vector is carried along the grid and only
//! the terminal slice is returned.

use super::path::Path;
use super::words::{enumerate_words, WordIndexing};
use crate::error::Result;
use serde::{Deserialize, Serialize};

/// Integration convention used to discretize the iterated integrals.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Convention {
    Ito,
    Stratonovich,
    Linear,
}

impl Convention {
    pub fn label(&self) -> &'static str {
        match self {
            Convention::Ito => "ito",
            Convention::Stratonovich => "stratonovich",
            Convention::Linear => "linear",
        }
    }
}

impl std::str::FromStr for Convention {
    type Err = crate::error::SigLabError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "ito" => Ok(Convention::Ito),
            "stratonovich" | "strat" => Ok(Convention::Stratonovich),
            "linear" => Ok(Convention::Linear),
            other => Err(crate::error::SigLabError::InvalidArgument(format!(
                "unknown convention '{}'; expected ito|stratonovich|linear",
                other
            ))),
        }
    }
}

/// All components of a truncated signature, flat-indexed by the recursive
/// order of `indexing`. The empty-word component is always exactly 1.
#[derive(Debug, Clone, PartialEq)]
pub struct SignatureVector {
    pub indexing: WordIndexing,
    pub values: Vec<f64>,
    pub convention: Convention,
}

impl SignatureVector {
    pub fn value_of(&self, word: &super::words::SignatureWord) -> Result<f64> {
        Ok(self.values[self.indexing.flat_index(word)?])
    }

    /// Flat serialization: header line `d,K,convention` then one value per
    /// word in recursive order.
    pub fn to_flat(&self) -> (u32, usize, Convention, &[f64]) {
        (
            self.indexing.d(),
            self.indexing.max_order(),
            self.convention,
            &self.values,
        )
    }
}

fn iterated_sum_signature(path: &Path, max_order: usize, trapezoid: bool) -> Result<SignatureVector> {
    let d = path.dim() as u32;
    let indexing = enumerate_words(d, max_order)?;
    let p = indexing.len();
    let mut cur = vec![0.0f64; p];
    cur[0] = 1.0;
    let mut prev = vec![0.0f64; p];
    let mut dx = vec![0.0f64; path.dim()];
    for j in 0..path.steps() {
        prev.copy_from_slice(&cur);
        let x0 = path.row(j);
        let x1 = path.row(j + 1);
        for i in 0..path.dim() {
            dx[i] = x1[i] - x0[i];
        }
        // Ascending orders: the parent block (order k-1) is already at the
        // new time when order k is processed, which the trapezoid needs.
        for k in 1..=max_order {
            for flat in indexing.order_range(k) {
                let (parent, last) = indexing.parent_and_last(flat, k);
                let weight = if trapezoid {
                    0.5 * (prev[parent] + cur[parent])
                } else {
                    prev[parent]
                };
                cur[flat] = prev[flat] + weight * dx[last];
            }
        }
    }
    Ok(SignatureVector {
        indexing,
        values: cur,
        convention: if trapezoid {
            Convention::Stratonovich
        } else {
            Convention::Ito
        },
    })
}

/// Left-point (Ito) signature of a discrete path, truncated at `max_order`.
pub fn ito_signature(path: &Path, max_order: usize) -> Result<SignatureVector> {
    iterated_sum_signature(path, max_order, false)
}

/// Trapezoidal (Stratonovich) signature of a discrete path.
pub fn stratonovich_signature(path: &Path, max_order: usize) -> Result<SignatureVector> {
    iterated_sum_signature(path, max_order, true)
}

/// Exact signature of the piecewise-linear interpolant through the sample
/// points, via per-segment closed forms and Chen concatenation.
pub fn linear_signature(path: &Path, max_order: usize) -> Result<SignatureVector> {
    let d = path.dim() as u32;
    let indexing = enumerate_words(d, max_order)?;
    let p = indexing.len();
    let mut cur = vec![0.0f64; p];
    cur[0] = 1.0;
    let mut seg = vec![0.0f64; p];
    let mut next = vec![0.0f64; p];
    let mut dx = vec![0.0f64; path.dim()];
    for j in 0..path.steps() {
        let x0 = path.row(j);
        let x1 = path.row(j + 1);
        for i in 0..path.dim() {
            dx[i] = x1[i] - x0[i];
        }
        // Segment signature: seg[w] = prod_m dx^(w_m) / k!.
        seg[0] = 1.0;
        for k in 1..=max_order {
            for flat in indexing.order_range(k) {
                let (parent, last) = indexing.parent_and_last(flat, k);
                seg[flat] = seg[parent] * dx[last] / k as f64;
            }
        }
        // Chen: (cur * seg)[w] = sum over splits of w.
        next[0] = 1.0;
        for k in 1..=max_order {
            for flat in indexing.order_range(k) {
                let mut acc = 0.0;
                for i in 0..=k {
                    let (pre, suf) = indexing.split(flat, k, i);
                    acc += cur[pre] * seg[suf];
                }
                next[flat] = acc;
            }
        }
        std::mem::swap(&mut cur, &mut next);
    }
    Ok(SignatureVector {
        indexing,
        values: cur,
        convention: Convention::Linear,
    })
}

/// Signature under the requested convention.
pub fn signature(path: &Path, max_order: usize, convention: Convention) -> Result<SignatureVector> {
    match convention {
        Convention::Ito => ito_signature(path, max_order),
        Convention::Stratonovich => stratonovich_signature(path, max_order),
        Convention::Linear => linear_signature(path, max_order),
    }
}
