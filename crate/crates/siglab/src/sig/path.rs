//! Discrete multidimensional paths on a strictly increasing time grid.

use crate::error::{Result, SigLabError};

/// A `d`-dimensional discrete time series: values `x_{t_j}` on a strictly
/// increasing grid `t_0 < t_1 < ... < t_n`. Stored row-major, one row per
/// grid time.
#[derive(Debug, Clone, PartialEq)]
pub struct Path {
    times: Vec<f64>,
    values: Vec<f64>,
    dim: usize,
}

impl Path {
    pub fn new(times: Vec<f64>, values: Vec<f64>, dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(SigLabError::InvalidPath("dimension must be positive".into()));
        }
        if times.len() < 2 {
            return Err(SigLabError::InvalidPath(
                "a path needs at least 2 grid points".into(),
            ));
        }
        if values.len() != times.len() * dim {
            return Err(SigLabError::InvalidPath(format!(
                "value count {} does not match {} grid points x {} dims",
                values.len(),
                times.len(),
                dim
            )));
        }
        if !times.windows(2).all(|w| w[0] < w[1]) {
            return Err(SigLabError::InvalidPath(
                "time grid must be strictly increasing".into(),
            ));
        }
        if times.iter().chain(values.iter()).any(|v| !v.is_finite()) {
            return Err(SigLabError::InvalidPath("non-finite entry".into()));
        }
        Ok(Self { times, values, dim })
    }

    /// Uniform grid on `[0, t_end]` with `steps` increments.
    pub fn from_rows(t_end: f64, rows: Vec<Vec<f64>>) -> Result<Self> {
        let n = rows.len();
        if n < 2 {
            return Err(SigLabError::InvalidPath(
                "a path needs at least 2 grid points".into(),
            ));
        }
        let dim = rows[0].len();
        let times = (0..n)
            .map(|j| t_end * j as f64 / (n - 1) as f64)
            .collect();
        let mut values = Vec::with_capacity(n * dim);
        for row in rows {
            if row.len() != dim {
                return Err(SigLabError::InvalidPath("ragged rows".into()));
            }
            values.extend(row);
        }
        Path::new(times, values, dim)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Number of grid points (steps + 1).
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn steps(&self) -> usize {
        self.times.len() - 1
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn value(&self, j: usize, dim: usize) -> f64 {
        self.values[j * self.dim + dim]
    }

    pub fn row(&self, j: usize) -> &[f64] {
        &self.values[j * self.dim..(j + 1) * self.dim]
    }

    pub fn terminal(&self) -> &[f64] {
        self.row(self.len() - 1)
    }

    /// Coordinate `dim` as a contiguous vector.
    pub fn coordinate(&self, dim: usize) -> Vec<f64> {
        (0..self.len()).map(|j| self.value(j, dim)).collect()
    }

    /// Prepends the time grid as a new first coordinate, returning a
    /// `(d+1)`-dimensional path `(t, x_1, ..., x_d)`.
    pub fn time_augment(&self) -> Path {
        let n = self.len();
        let dim = self.dim + 1;
        let mut values = Vec::with_capacity(n * dim);
        for j in 0..n {
            values.push(self.times[j]);
            values.extend_from_slice(self.row(j));
        }
        Path {
            times: self.times.clone(),
            values,
            dim,
        }
    }

    /// CSV with header `t,x1,...,xd` (RFC 4180, '.' decimal).
    pub fn to_csv(&self) -> String {
        let mut out = String::from("t");
        for i in 1..=self.dim {
            out.push_str(&format!(",x{}", i));
        }
        out.push('\n');
        for j in 0..self.len() {
            out.push_str(&format!("{:e}", self.times[j]));
            for i in 0..self.dim {
                out.push_str(&format!(",{:e}", self.value(j, i)));
            }
            out.push('\n');
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_short_and_ragged() {
        assert!(Path::new(vec![0.0], vec![0.0], 1).is_err());
        assert!(Path::new(vec![0.0, 1.0], vec![0.0], 2).is_err());
        assert!(Path::new(vec![0.0, 0.0], vec![0.0, 1.0], 1).is_err());
    }

    #[test]
    fn time_augment_prepends_grid() {
        let p = Path::new(vec![0.0, 0.5, 1.0], vec![1.0, 2.0, 3.0, 4.0, 5.0, 6.0], 2).unwrap();
        let a = p.time_augment();
        assert_eq!(a.dim(), 3);
        assert_eq!(a.row(1), &[0.5, 3.0, 4.0]);
        let aa = a.time_augment();
        assert_eq!(aa.row(2), &[1.0, 1.0, 5.0, 6.0]);
    }
}
