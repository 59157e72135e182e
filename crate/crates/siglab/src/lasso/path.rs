//! Homotopy (LARS-lasso) solution path of the penalized least squares
//! objective `||y - X b||^2 + lambda ||b||_1`.
//!
//! Stationarity at a solution reads `2 x_j'(y - X b) = lambda sign(b_j)` on
//! the active set and `|2 x_j'(y - X b)| <= lambda` off it, so the active
//! coefficients are affine in `lambda` between set changes and the whole
//! path is piecewise linear with breakpoints where a predictor joins
//! (its correlation hits the boundary) or leaves (its coefficient crosses
//! zero). Ties on entry are broken toward the lowest column index;
//! predictors whose addition would make the active Gram singular are
//! skipped, so exactly collinear copies never co-activate.

use super::chol::CholFactor;
use super::design::DesignMatrix;
use crate::error::{Result, SigLabError};
use nalgebra::DMatrix;

/// One breakpoint of the solution path.
#[derive(Debug, Clone)]
pub struct PathPoint {
    pub lambda: f64,
    pub beta: Vec<f64>,
}

/// Piecewise-linear Lasso path, `lambda` strictly decreasing. The implicit
/// head of the path is `beta = 0` for every `lambda >= lambda_max`.
#[derive(Debug, Clone)]
pub struct LassoPath {
    pub points: Vec<PathPoint>,
}

impl LassoPath {
    pub fn lambda_max(&self) -> f64 {
        self.points.first().map(|p| p.lambda).unwrap_or(0.0)
    }

    /// Exact solution at any `lambda` by linear interpolation between
    /// breakpoints (the path is piecewise linear in `lambda`).
    pub fn coefficients_at(&self, lambda: f64) -> Vec<f64> {
        let p = self.points[0].beta.len();
        if self.points.is_empty() || lambda >= self.lambda_max() {
            return vec![0.0; p];
        }
        let last = self.points.last().unwrap();
        if lambda <= last.lambda {
            return last.beta.clone();
        }
        let k = self
            .points
            .windows(2)
            .position(|w| lambda <= w[0].lambda && lambda >= w[1].lambda)
            .expect("lambda bracketed by breakpoints");
        let (hi, lo) = (&self.points[k], &self.points[k + 1]);
        let t = if hi.lambda > lo.lambda {
            (hi.lambda - lambda) / (hi.lambda - lo.lambda)
        } else {
            0.0
        };
        hi.beta
            .iter()
            .zip(&lo.beta)
            .map(|(a, b)| a + t * (b - a))
            .collect()
    }

    /// Sign patterns visited by the path: at every breakpoint and on every
    /// open segment (where the pattern is constant), plus the all-zero
    /// pattern at and above `lambda_max`.
    pub fn sign_patterns(&self) -> Vec<Vec<i8>> {
        let p = self.points[0].beta.len();
        let mut out = vec![vec![0i8; p]];
        for point in &self.points {
            out.push(point.beta.iter().map(|&b| sign_of(b)).collect());
        }
        for w in self.points.windows(2) {
            let mid: Vec<f64> = w[0]
                .beta
                .iter()
                .zip(&w[1].beta)
                .map(|(a, b)| 0.5 * (a + b))
                .collect();
            out.push(mid.iter().map(|&b| sign_of(b)).collect());
        }
        out.dedup();
        out
    }

    /// CSV `lambda, b_1, ..., b_p` for coefficient-path plots.
    pub fn to_csv(&self, labels: Option<&[String]>) -> String {
        let p = self.points.first().map(|pt| pt.beta.len()).unwrap_or(0);
        let mut out = String::from("lambda");
        for j in 0..p {
            match labels {
                Some(l) => out.push_str(&format!(",\"{}\"", l[j])),
                None => out.push_str(&format!(",b{}", j + 1)),
            }
        }
        out.push('\n');
        for pt in &self.points {
            out.push_str(&format!("{:e}", pt.lambda));
            for b in &pt.beta {
                out.push_str(&format!(",{:e}", b));
            }
            out.push('\n');
        }
        out
    }
}

pub fn sign_of(x: f64) -> i8 {
    if x > 0.0 {
        1
    } else if x < 0.0 {
        -1
    } else {
        0
    }
}

/// Full piecewise-linear solution path of
/// `||y - X b||^2 + lambda ||b||_1` on a standardized design.
pub fn lasso_path(design: &DesignMatrix, y: &[f64]) -> Result<LassoPath> {
    let x = design.matrix();
    let (n, p) = x.shape();
    if y.len() != n {
        return Err(SigLabError::InvalidArgument(format!(
            "response length {} does not match {} rows",
            y.len(),
            n
        )));
    }
    if y.iter().any(|v| !v.is_finite()) {
        return Err(SigLabError::NonFinite("response vector".into()));
    }

    let gram = x.transpose() * x;
    let xty: Vec<f64> = (0..p)
        .map(|j| x.column(j).iter().zip(y).map(|(a, b)| a * b).sum::<f64>())
        .collect();

    // lambda_max = 2 max |x_j' y|; below it the first predictor activates.
    let lambda_max = xty.iter().fold(0.0f64, |m, v| m.max(2.0 * v.abs()));
    let mut points = vec![PathPoint {
        lambda: lambda_max,
        beta: vec![0.0; p],
    }];
    if lambda_max <= 0.0 {
        return Ok(LassoPath { points });
    }

    let mut active: Vec<usize> = Vec::new();
    let mut signs: Vec<f64> = Vec::new();
    let mut in_active = vec![false; p];
    let mut skip = vec![false; p];
    let mut chol = CholFactor::new();

    let join0 = (0..p)
        .find(|&j| 2.0 * xty[j].abs() >= lambda_max * (1.0 - 1e-12))
        .expect("argmax exists");
    push_active(
        &mut active,
        &mut signs,
        &mut in_active,
        &mut chol,
        &gram,
        join0,
        if xty[join0] >= 0.0 { 1.0 } else { -1.0 },
    );

    let mut lambda = lambda_max;
    let max_steps = 50 * p.max(4) + 100;
    for _ in 0..max_steps {
        // Segment direction: beta_A(lambda) = ols_A - (lambda/2) w.
        let xty_a: Vec<f64> = active.iter().map(|&j| xty[j]).collect();
        let ols = chol.solve(&xty_a);
        let w = chol.solve(&signs);

        // Inactive correlations are affine: c_j(lambda) = a_j + lambda b_j.
        let mut next_lambda = 0.0f64;
        #[derive(Clone, Copy, PartialEq)]
        enum Event {
            ToZero,
            Join(usize, f64),
            Drop(usize),
        }
        let mut event = Event::ToZero;
        let guard = lambda * (1.0 - 1e-10);

        for j in 0..p {
            if in_active[j] || skip[j] {
                continue;
            }
            let g_cross_ols: f64 = active
                .iter()
                .zip(&ols)
                .map(|(&aj, o)| gram[(j, aj)] * o)
                .sum();
            let b_j: f64 = active
                .iter()
                .zip(&w)
                .map(|(&aj, wv)| gram[(j, aj)] * wv)
                .sum();
            let a_j = 2.0 * (xty[j] - g_cross_ols);
            // c_j = a_j + lambda b_j meets +lambda or -lambda.
            let hit_pos = a_j / (1.0 - b_j);
            let hit_neg = -a_j / (1.0 + b_j);
            for (hit, sign) in [(hit_pos, 1.0), (hit_neg, -1.0)] {
                if hit.is_finite() && hit > next_lambda && hit <= guard {
                    next_lambda = hit;
                    event = Event::Join(j, sign);
                }
            }
        }
        for (k, (&j, o)) in active.iter().zip(&ols).enumerate() {
            let wk = w[k];
            if wk.abs() > 1e-300 {
                let hit = 2.0 * o / wk;
                if hit.is_finite() && hit > next_lambda && hit <= guard {
                    next_lambda = hit;
                    event = Event::Drop(j);
                }
            }
        }

        // Advance to the event (or to lambda = 0, finishing at OLS).
        let lam = next_lambda.max(0.0);
        let mut beta = vec![0.0; p];
        for (k, &j) in active.iter().enumerate() {
            beta[j] = ols[k] - 0.5 * lam * w[k];
        }
        match event {
            Event::Drop(j) => {
                beta[j] = 0.0;
            }
            Event::ToZero => {}
            Event::Join(..) => {}
        }
        points.push(PathPoint { lambda: lam, beta });
        lambda = lam;

        match event {
            Event::ToZero => break,
            Event::Join(j, sign) => {
                if !push_active(
                    &mut active,
                    &mut signs,
                    &mut in_active,
                    &mut chol,
                    &gram,
                    j,
                    sign,
                ) {
                    // Exactly collinear with the active set: never joins.
                    skip[j] = true;
                    points.pop();
                    continue;
                }
                skip.iter_mut().for_each(|s| *s = false);
            }
            Event::Drop(j) => {
                let k = active.iter().position(|&a| a == j).expect("active");
                active.remove(k);
                signs.remove(k);
                in_active[j] = false;
                chol.remove(k);
                skip.iter_mut().for_each(|s| *s = false);
                if active.is_empty() {
                    break;
                }
            }
        }
        if lambda <= 0.0 {
            break;
        }
    }

    Ok(LassoPath { points })
}

#[allow(clippy::too_many_arguments)]
fn push_active(
    active: &mut Vec<usize>,
    signs: &mut Vec<f64>,
    in_active: &mut [bool],
    chol: &mut CholFactor,
    gram: &DMatrix<f64>,
    j: usize,
    sign: f64,
) -> bool {
    let cross: Vec<f64> = active.iter().map(|&a| gram[(a, j)]).collect();
    if !chol.insert(&cross, gram[(j, j)]) {
        return false;
    }
    active.push(j);
    signs.push(sign);
    in_active[j] = true;
    true
}

/// Maximum KKT violation of `beta` for the objective at penalty `lambda`:
/// active coordinates must satisfy `2 x_j' r = lambda sign(b_j)` and
/// inactive ones `|2 x_j' r| <= lambda`.
pub fn kkt_violation(design: &DesignMatrix, y: &[f64], lambda: f64, beta: &[f64]) -> f64 {
    let x = design.matrix();
    let (n, p) = x.shape();
    let mut r = y.to_vec();
    for j in 0..p {
        let b = beta[j];
        if b != 0.0 {
            for i in 0..n {
                r[i] -= x[(i, j)] * b;
            }
        }
    }
    let mut worst = 0.0f64;
    for j in 0..p {
        let c = 2.0 * x.column(j).iter().zip(&r).map(|(a, b)| a * b).sum::<f64>();
        let v = if beta[j] != 0.0 {
            (c - lambda * sign_of(beta[j]) as f64).abs()
        } else {
            (c.abs() - lambda).max(0.0)
        };
        worst = worst.max(v);
    }
    worst
}
