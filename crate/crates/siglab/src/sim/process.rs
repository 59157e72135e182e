//! Euler--Maruyama style simulation of the model processes.
//!
//! All processes run on a uniform grid `t_j = j T / n`. Each dimension is
//! simulated from an independent driver and the rows are then mixed by the
//! correlation spec's matrix, except for GBM and Vasicek where the mixing
//! applies to the Gaussian innovations (states are nonlinear in the noise).
//!
//! Schemes per step `dt`, innovation `e ~ N(0,1)` unless noted:
//!
//! * Brownian:     `W += sqrt(dt) e` (the `kappa = 0` OU special case);
//! * OU:           `Y += -kappa Y dt + sqrt(dt) e`;
//! * random walk:  `Z += e`, `e = +-1` with probability 1/2 each;
//! * AR(1):        `Z = phi Z + e` (unit-variance innovations per step);
//! * ARIMA(p,I,q): ARMA recursion on unit innovations, then `I`-fold
//!   cumulative summation;
//! * GBM:          exact log-normal stepping;
//! * Vasicek:      `r += gamma (r_bar - r) dt + sigma sqrt(dt) e`.

use super::correlation::CorrelationSpec;
use super::stream::SeededStream;
use crate::error::{Result, SigLabError};
use crate::sig::Path;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

/// Uniform grid `[0, t_end]` with `steps` increments.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub t_end: f64,
    pub steps: usize,
}

impl Default for GridSpec {
    fn default() -> Self {
        Self {
            t_end: 1.0,
            steps: 100,
        }
    }
}

impl GridSpec {
    pub fn new(t_end: f64, steps: usize) -> Self {
        Self { t_end, steps }
    }

    pub fn times(&self) -> Vec<f64> {
        (0..=self.steps)
            .map(|j| self.t_end * j as f64 / self.steps as f64)
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ProcessKind {
    Brownian,
    Ou {
        kappas: Vec<f64>,
    },
    RandomWalk,
    Ar1 {
        phis: Vec<f64>,
    },
    Arima {
        i_order: usize,
        ar: Vec<f64>,
        ma: Vec<f64>,
    },
    Gbm {
        drift: f64,
        vol: f64,
        x0: f64,
    },
    Vasicek {
        gamma: f64,
        r_bar: f64,
        sigma: f64,
        r0: f64,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProcessSpec {
    pub kind: ProcessKind,
    pub correlation: CorrelationSpec,
    pub grid: GridSpec,
}

impl ProcessSpec {
    pub fn new(kind: ProcessKind, correlation: CorrelationSpec, grid: GridSpec) -> Self {
        Self {
            kind,
            correlation,
            grid,
        }
    }

    pub fn d(&self) -> usize {
        self.correlation.d()
    }

    fn validate(&self) -> Result<()> {
        if self.grid.steps == 0 {
            return Err(SigLabError::InvalidArgument("steps must be >= 1".into()));
        }
        if !(self.grid.t_end > 0.0) {
            return Err(SigLabError::InvalidArgument("t_end must be > 0".into()));
        }
        match &self.kind {
            ProcessKind::Ou { kappas } => {
                if kappas.len() != self.d() && kappas.len() != 1 {
                    return Err(SigLabError::InvalidArgument(
                        "kappa count must be 1 or match the dimension".into(),
                    ));
                }
                if kappas.iter().any(|&k| k < 0.0) {
                    return Err(SigLabError::InvalidArgument(
                        "mean-reversion speed kappa must be >= 0".into(),
                    ));
                }
            }
            ProcessKind::Ar1 { phis } => {
                if phis.len() != self.d() && phis.len() != 1 {
                    return Err(SigLabError::InvalidArgument(
                        "phi count must be 1 or match the dimension".into(),
                    ));
                }
            }
            ProcessKind::Gbm { vol, x0, .. } => {
                if !(*vol >= 0.0) || !(*x0 > 0.0) {
                    return Err(SigLabError::InvalidArgument(
                        "gbm needs vol >= 0 and x0 > 0".into(),
                    ));
                }
            }
            ProcessKind::Vasicek { gamma, sigma, .. } => {
                if *gamma < 0.0 || !(*sigma >= 0.0) {
                    return Err(SigLabError::InvalidArgument(
                        "vasicek needs gamma >= 0 and sigma >= 0".into(),
                    ));
                }
            }
            _ => {}
        }
        Ok(())
    }

    fn per_dim(&self, params: &[f64], dim: usize) -> f64 {
        if params.len() == 1 {
            params[0]
        } else {
            params[dim]
        }
    }
}

/// Simulates one path of the process; a pure function of `(spec, stream)`.
pub fn simulate(spec: &ProcessSpec, stream: SeededStream) -> Result<Path> {
    spec.validate()?;
    let d = spec.d();
    let n = spec.grid.steps;
    let dt = spec.grid.t_end / n as f64;
    let sqrt_dt = dt.sqrt();
    let mut rng = stream.rng();

    // Driver states, one column per dimension, simulated dimension by
    // dimension, then rows mixed through the correlation spec.
    let mut drivers = vec![0.0f64; (n + 1) * d];
    match &spec.kind {
        ProcessKind::Brownian | ProcessKind::Ou { .. } => {
            let zero = vec![0.0];
            let kappas = match &spec.kind {
                ProcessKind::Ou { kappas } => kappas.as_slice(),
                _ => zero.as_slice(),
            };
            for i in 0..d {
                let kappa = spec.per_dim(kappas, i);
                let mut y = 0.0f64;
                for k in 0..n {
                    let e: f64 = StandardNormal.sample(&mut rng);
                    y = y - kappa * y * dt + sqrt_dt * e;
                    drivers[(k + 1) * d + i] = y;
                }
            }
        }
        ProcessKind::RandomWalk => {
            for i in 0..d {
                let mut z = 0.0f64;
                for k in 0..n {
                    let e = if rng.gen::<bool>() { 1.0 } else { -1.0 };
                    z += e;
                    drivers[(k + 1) * d + i] = z;
                }
            }
        }
        ProcessKind::Ar1 { phis } => {
            for i in 0..d {
                let phi = spec.per_dim(phis, i);
                let mut z = 0.0f64;
                for k in 0..n {
                    let e: f64 = StandardNormal.sample(&mut rng);
                    z = phi * z + e;
                    drivers[(k + 1) * d + i] = z;
                }
            }
        }
        ProcessKind::Arima { i_order, ar, ma } => {
            let p = ar.len();
            let q = ma.len();
            for i in 0..d {
                let mut u = vec![0.0f64; n + 1];
                let mut eps = vec![0.0f64; n + 1];
                for k in 1..=n {
                    let e: f64 = StandardNormal.sample(&mut rng);
                    eps[k] = e;
                    let mut v = e;
                    for (lag, &phi) in ar.iter().enumerate() {
                        if k > lag + 1 || k == lag + 1 {
                            let idx = k - (lag + 1);
                            v += phi * u[idx];
                        }
                    }
                    for (lag, &theta) in ma.iter().enumerate() {
                        if k >= lag + 2 {
                            v += theta * eps[k - (lag + 1)];
                        }
                    }
                    u[k] = v;
                }
                let _ = (p, q);
                for _ in 0..*i_order {
                    for k in 1..=n {
                        u[k] += u[k - 1];
                    }
                }
                for k in 0..=n {
                    drivers[k * d + i] = u[k];
                }
            }
        }
        ProcessKind::Gbm { drift, vol, x0 } => {
            // Innovations mixed per step; exact log-normal stepping.
            let mut z = vec![0.0f64; d];
            let mut delta = vec![0.0f64; d];
            let mut state = vec![*x0; d];
            for i in 0..d {
                drivers[i] = *x0;
            }
            let step_drift = (drift - 0.5 * vol * vol) * dt;
            for k in 0..n {
                for zi in z.iter_mut() {
                    *zi = StandardNormal.sample(&mut rng);
                }
                spec.correlation.mix_into(&z, &mut delta);
                for i in 0..d {
                    state[i] *= (step_drift + vol * sqrt_dt * delta[i]).exp();
                    drivers[(k + 1) * d + i] = state[i];
                }
            }
            let times = spec.grid.times();
            return Path::new(times, drivers, d);
        }
        ProcessKind::Vasicek {
            gamma,
            r_bar,
            sigma,
            r0,
        } => {
            let mut z = vec![0.0f64; d];
            let mut delta = vec![0.0f64; d];
            let mut state = vec![*r0; d];
            for i in 0..d {
                drivers[i] = *r0;
            }
            for k in 0..n {
                for zi in z.iter_mut() {
                    *zi = StandardNormal.sample(&mut rng);
                }
                spec.correlation.mix_into(&z, &mut delta);
                for i in 0..d {
                    state[i] += gamma * (r_bar - state[i]) * dt + sigma * sqrt_dt * delta[i];
                    drivers[(k + 1) * d + i] = state[i];
                }
            }
            let times = spec.grid.times();
            return Path::new(times, drivers, d);
        }
    }

    let times = spec.grid.times();
    if spec.correlation.is_identity() {
        return Path::new(times, drivers, d);
    }
    let mut values = vec![0.0f64; (n + 1) * d];
    let mut row = vec![0.0f64; d];
    for k in 0..=n {
        spec.correlation
            .mix_into(&drivers[k * d..(k + 1) * d], &mut row);
        values[k * d..(k + 1) * d].copy_from_slice(&row);
    }
    Path::new(times, values, d)
}

/// Two unit-initial-value GBM paths on `[0, 1]` whose per-step log
/// increments are `N(0, vol_per_step^2)` with correlation `rho`.
pub fn gbm_pair(
    rho: f64,
    vol_per_step: f64,
    steps: usize,
    stream: SeededStream,
) -> Result<Path> {
    if !(-1.0..=1.0).contains(&rho) {
        return Err(SigLabError::InvalidArgument(format!(
            "correlation {} outside [-1, 1]",
            rho
        )));
    }
    if steps == 0 {
        return Err(SigLabError::InvalidArgument("steps must be >= 1".into()));
    }
    let corr = CorrelationSpec::pair(rho)?;
    let mut rng = stream.rng();
    let mut values = vec![0.0f64; (steps + 1) * 2];
    values[0] = 1.0;
    values[1] = 1.0;
    let mut z = [0.0f64; 2];
    let mut delta = [0.0f64; 2];
    let mut state = [1.0f64, 1.0];
    for k in 0..steps {
        z[0] = StandardNormal.sample(&mut rng);
        z[1] = StandardNormal.sample(&mut rng);
        corr.mix_into(&z, &mut delta);
        for i in 0..2 {
            state[i] *= (vol_per_step * delta[i]).exp();
            values[(k + 1) * 2 + i] = state[i];
        }
    }
    let times = GridSpec::new(1.0, steps).times();
    Path::new(times, values, 2)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(kind: ProcessKind, corr: CorrelationSpec) -> ProcessSpec {
        ProcessSpec::new(kind, corr, GridSpec::default())
    }

    #[test]
    fn brownian_terminal_variance() {
        let s = spec(ProcessKind::Brownian, CorrelationSpec::identity(1));
        let trials = 100_000;
        let mut sum = 0.0;
        let mut sumsq = 0.0;
        for t in 0..trials {
            let p = simulate(&s, SeededStream::new(0, t)).unwrap();
            let x = p.terminal()[0];
            sum += x;
            sumsq += x * x;
        }
        let var = sumsq / trials as f64 - (sum / trials as f64).powi(2);
        assert!((var - 1.0).abs() < 0.02, "var = {}", var);
    }

    #[test]
    fn ou_terminal_variance_matches_closed_form() {
        let s = spec(
            ProcessKind::Ou { kappas: vec![1.0] },
            CorrelationSpec::identity(1),
        );
        let trials = 100_000;
        let mut sumsq = 0.0;
        for t in 0..trials {
            let p = simulate(&s, SeededStream::new(1, t)).unwrap();
            sumsq += p.terminal()[0].powi(2);
        }
        let var = sumsq / trials as f64;
        let expect = (1.0 - (-2.0f64).exp()) / 2.0;
        // Euler discretization bias at dt = 0.01 is within the MC slack.
        assert!((var - expect).abs() < 0.02, "var = {} vs {}", var, expect);
    }

    #[test]
    fn correlated_brownian_terminal_correlation() {
        let s = spec(ProcessKind::Brownian, CorrelationSpec::pair(0.6).unwrap());
        let trials = 100_000;
        let (mut sxx, mut syy, mut sxy) = (0.0, 0.0, 0.0);
        for t in 0..trials {
            let p = simulate(&s, SeededStream::new(2, t)).unwrap();
            let r = p.terminal();
            sxx += r[0] * r[0];
            syy += r[1] * r[1];
            sxy += r[0] * r[1];
        }
        let corr = sxy / (sxx * syy).sqrt();
        assert!((corr - 0.6).abs() < 0.02, "corr = {}", corr);
    }

    #[test]
    fn ou_kappa_zero_is_brownian_bit_for_bit() {
        let bm = spec(ProcessKind::Brownian, CorrelationSpec::pair(0.3).unwrap());
        let ou = spec(
            ProcessKind::Ou { kappas: vec![0.0] },
            CorrelationSpec::pair(0.3).unwrap(),
        );
        for t in 0..5 {
            let a = simulate(&bm, SeededStream::new(9, t)).unwrap();
            let b = simulate(&ou, SeededStream::new(9, t)).unwrap();
            assert_eq!(a, b);
        }
    }

    #[test]
    fn ar1_phi_one_is_gaussian_random_walk() {
        let ar = spec(
            ProcessKind::Ar1 { phis: vec![1.0] },
            CorrelationSpec::identity(1),
        );
        let rw = spec(
            ProcessKind::Arima {
                i_order: 1,
                ar: vec![],
                ma: vec![],
            },
            CorrelationSpec::identity(1),
        );
        for t in 0..5 {
            let a = simulate(&ar, SeededStream::new(4, t)).unwrap();
            let b = simulate(&rw, SeededStream::new(4, t)).unwrap();
            for (x, y) in a.row(50).iter().zip(b.row(50).iter()) {
                assert_eq!(x, y);
            }
        }
    }

    #[test]
    fn simulate_is_deterministic() {
        let s = spec(
            ProcessKind::Ou { kappas: vec![2.0] },
            CorrelationSpec::pair(-0.4).unwrap(),
        );
        let a = simulate(&s, SeededStream::new(6, 3)).unwrap();
        let b = simulate(&s, SeededStream::new(6, 3)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn rejects_negative_kappa() {
        let s = spec(
            ProcessKind::Ou {
                kappas: vec![-0.1],
            },
            CorrelationSpec::identity(1),
        );
        assert!(simulate(&s, SeededStream::new(0, 0)).is_err());
    }

    #[test]
    fn random_walk_steps_are_unit() {
        let s = spec(ProcessKind::RandomWalk, CorrelationSpec::identity(1));
        let p = simulate(&s, SeededStream::new(5, 0)).unwrap();
        for j in 0..p.steps() {
            let d = p.value(j + 1, 0) - p.value(j, 0);
            assert!((d.abs() - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn quadratic_covariation_tracks_target() {
        let s = spec(ProcessKind::Brownian, CorrelationSpec::pair(0.5).unwrap());
        let trials = 20_000;
        let mut acc = 0.0;
        for t in 0..trials {
            let p = simulate(&s, SeededStream::new(7, t)).unwrap();
            let mut qv = 0.0;
            for j in 0..p.steps() {
                qv += (p.value(j + 1, 0) - p.value(j, 0)) * (p.value(j + 1, 1) - p.value(j, 1));
            }
            acc += qv;
        }
        assert!((acc / trials as f64 - 0.5).abs() < 0.02);
    }

    #[test]
    fn gbm_pair_starts_at_one_and_honors_rho() {
        let p = gbm_pair(0.6, 0.01, 1000, SeededStream::new(3, 0)).unwrap();
        assert_eq!(p.row(0), &[1.0, 1.0]);
        let q = gbm_pair(1.0, 0.01, 100, SeededStream::new(3, 1)).unwrap();
        for j in 0..=q.steps() {
            assert!((q.value(j, 0) - q.value(j, 1)).abs() < 1e-12);
        }
    }

    #[test]
    fn gbm_pair_log_terminal_std() {
        let trials = 100_000;
        let mut sumsq = 0.0;
        for t in 0..trials {
            let p = gbm_pair(0.6, 0.01, 1000, SeededStream::new(8, t)).unwrap();
            sumsq += p.terminal()[0].ln().powi(2);
        }
        let sd = (sumsq / trials as f64).sqrt();
        let expect = 0.01 * 1000f64.sqrt();
        assert!((sd - expect).abs() < 0.01, "sd = {} vs {}", sd, expect);
    }
}
