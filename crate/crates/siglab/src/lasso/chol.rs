//! Incrementally updated Cholesky factor of a growing/shrinking Gram block.
//!
//! The homotopy solver adds and removes one active predictor at a time;
//! refactoring the active Gram from scratch at every breakpoint would cost
//! `O(a^3)` each, while appending a column is `O(a^2)` and removing one is
//! a Givens sweep.

/// Upper-triangular factor `R` with `R^T R = G_AA`, stored column by
/// column (`col[j]` holds rows `0..=j`).
#[derive(Debug, Clone, Default)]
pub struct CholFactor {
    cols: Vec<Vec<f64>>,
}

impl CholFactor {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn size(&self) -> usize {
        self.cols.len()
    }

    /// Appends a predictor whose Gram column against the current active set
    /// is `g_cross` and whose self inner product is `g_self`. Returns false
    /// (leaving the factor unchanged) when the extended block is numerically
    /// singular.
    pub fn insert(&mut self, g_cross: &[f64], g_self: f64) -> bool {
        debug_assert_eq!(g_cross.len(), self.size());
        let u = self.solve_lower(g_cross);
        let d2 = g_self - u.iter().map(|v| v * v).sum::<f64>();
        if d2 <= 1e-12 * g_self.max(1e-300) {
            return false;
        }
        let mut col = u;
        col.push(d2.sqrt());
        self.cols.push(col);
        true
    }

    /// Removes the active predictor at position `k`.
    pub fn remove(&mut self, k: usize) {
        let a = self.size();
        debug_assert!(k < a);
        self.cols.remove(k);
        // Columns k.. now carry one entry below their new diagonal; sweep
        // Givens rotations over row pairs to retriangularize.
        for m in k..self.cols.len() {
            let col = &self.cols[m];
            let (x, y) = (col[m], col[m + 1]);
            let r = x.hypot(y);
            let (c, s) = if r > 0.0 { (x / r, y / r) } else { (1.0, 0.0) };
            for col in self.cols[m..].iter_mut() {
                let xi = col[m];
                let yi = col[m + 1];
                col[m] = c * xi + s * yi;
                col[m + 1] = -s * xi + c * yi;
            }
            self.cols[m].truncate(m + 1);
        }
    }

    /// Solves `R^T z = b` (forward substitution).
    pub fn solve_lower(&self, b: &[f64]) -> Vec<f64> {
        let a = self.size();
        debug_assert_eq!(b.len(), a);
        let mut z = vec![0.0; a];
        for i in 0..a {
            let mut acc = b[i];
            for (k, zk) in z.iter().enumerate().take(i) {
                acc -= self.cols[i][k] * zk;
            }
            z[i] = acc / self.cols[i][i];
        }
        z
    }

    /// Solves `R w = z` (back substitution).
    pub fn solve_upper(&self, z: &[f64]) -> Vec<f64> {
        let a = self.size();
        debug_assert_eq!(z.len(), a);
        let mut w = vec![0.0; a];
        for i in (0..a).rev() {
            let mut acc = z[i];
            for k in (i + 1)..a {
                acc -= self.cols[k][i] * w[k];
            }
            w[i] = acc / self.cols[i][i];
        }
        w
    }

    /// Solves `G_AA w = b`.
    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        self.solve_upper(&self.solve_lower(b))
    }
}
