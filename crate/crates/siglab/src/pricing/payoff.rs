//! Option payoff functionals on discrete price paths.

use crate::error::{Result, SigLabError};
use crate::sig::Path;
use serde::{Deserialize, Serialize};

/// The eight payoff families of the payoff-learning study; `Call`, `Put`,
/// `Rainbow1` and `Rainbow2` read only terminal values, the others the
/// whole grid (means and maxima over grid points).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Payoff {
    Call { strike: f64 },
    Put { strike: f64 },
    Asian { strike: f64 },
    Lookback { strike: f64 },
    Rainbow1,
    Rainbow2 { strike: f64 },
    Rainbow3,
    Rainbow4 { strike: f64 },
}

impl Payoff {
    /// Path dimension the payoff reads.
    pub fn dim(&self) -> usize {
        match self {
            Payoff::Call { .. } | Payoff::Put { .. } | Payoff::Asian { .. } | Payoff::Lookback { .. } => 1,
            _ => 2,
        }
    }

    pub fn label(&self) -> String {
        match self {
            Payoff::Call { strike } => format!("call(K={})", strike),
            Payoff::Put { strike } => format!("put(K={})", strike),
            Payoff::Asian { strike } => format!("asian(K={})", strike),
            Payoff::Lookback { strike } => format!("lookback(K={})", strike),
            Payoff::Rainbow1 => "rainbow1".into(),
            Payoff::Rainbow2 { strike } => format!("rainbow2(K={})", strike),
            Payoff::Rainbow3 => "rainbow3".into(),
            Payoff::Rainbow4 { strike } => format!("rainbow4(K={})", strike),
        }
    }

    /// Evaluates the payoff on a path whose dimension is at least `dim()`;
    /// extra coordinates are ignored so one simulated pair serves both
    /// single- and two-asset payoffs.
    pub fn evaluate(&self, path: &Path) -> Result<f64> {
        if path.dim() < self.dim() {
            return Err(SigLabError::InvalidArgument(format!(
                "{} needs a {}-dimensional path, got {}",
                self.label(),
                self.dim(),
                path.dim()
            )));
        }
        let n = path.len();
        let terminal = |d: usize| path.value(n - 1, d);
        let mean = |d: usize| (0..n).map(|j| path.value(j, d)).sum::<f64>() / n as f64;
        let max = |d: usize| {
            (0..n)
                .map(|j| path.value(j, d))
                .fold(f64::NEG_INFINITY, f64::max)
        };
        let v = match self {
            Payoff::Call { strike } => terminal(0) - strike,
            Payoff::Put { strike } => strike - terminal(0),
            Payoff::Asian { strike } => mean(0) - strike,
            Payoff::Lookback { strike } => max(0) - strike,
            Payoff::Rainbow1 => terminal(0) - terminal(1),
            Payoff::Rainbow2 { strike } => terminal(0).max(terminal(1)) - strike,
            Payoff::Rainbow3 => max(0) - max(1),
            Payoff::Rainbow4 { strike } => mean(0) + mean(1) - strike,
        };
        Ok(v.max(0.0))
    }
}

/// The eight standard payoff instances of the learning study.
pub fn standard_payoffs() -> Vec<Payoff> {
    vec![
        Payoff::Call { strike: 1.2 },
        Payoff::Put { strike: 0.8 },
        Payoff::Asian { strike: 1.2 },
        Payoff::Lookback { strike: 1.2 },
        Payoff::Rainbow1,
        Payoff::Rainbow2 { strike: 1.2 },
        Payoff::Rainbow3,
        Payoff::Rainbow4 { strike: 2.4 },
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pair_path(rows: Vec<[f64; 2]>) -> Path {
        Path::from_rows(1.0, rows.into_iter().map(|r| r.to_vec()).collect()).unwrap()
    }

    #[test]
    fn call_at_terminal() {
        let p = pair_path(vec![[1.0, 1.0], [1.3, 0.9]]);
        assert!((Payoff::Call { strike: 1.2 }.evaluate(&p).unwrap() - 0.1).abs() < 1e-15);
        assert_eq!(Payoff::Put { strike: 0.8 }.evaluate(&p).unwrap(), 0.0);
    }

    #[test]
    fn rainbow1_on_identical_paths_is_zero() {
        let p = pair_path(vec![[1.0, 1.0], [1.4, 1.4]]);
        assert_eq!(Payoff::Rainbow1.evaluate(&p).unwrap(), 0.0);
        assert_eq!(Payoff::Rainbow3.evaluate(&p).unwrap(), 0.0);
    }

    #[test]
    fn asian_on_constant_path() {
        let p = pair_path(vec![[1.0, 1.0], [1.0, 1.0], [1.0, 1.0]]);
        assert_eq!(Payoff::Asian { strike: 1.2 }.evaluate(&p).unwrap(), 0.0);
        assert!((Payoff::Rainbow4 { strike: 1.5 }.evaluate(&p).unwrap() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn payoffs_are_nonnegative_and_scale_consistent() {
        let p = pair_path(vec![[1.0, 0.9], [0.7, 1.3], [1.1, 0.8]]);
        for payoff in standard_payoffs() {
            assert!(payoff.evaluate(&p).unwrap() >= 0.0);
        }
        // call(c X, c K) = c call(X, K).
        let c = 3.7;
        let scaled = pair_path(vec![[c * 1.0, c * 0.9], [c * 0.7, c * 1.3], [c * 1.1, c * 0.8]]);
        let a = Payoff::Call { strike: 0.9 }.evaluate(&p).unwrap();
        let b = Payoff::Call { strike: c * 0.9 }.evaluate(&scaled).unwrap();
        assert!((b - c * a).abs() < 1e-12);
    }

    #[test]
    fn dimension_mismatch_is_rejected() {
        let p = Path::from_rows(1.0, vec![vec![1.0], vec![1.1]]).unwrap();
        assert!(Payoff::Rainbow1.evaluate(&p).is_err());
    }
}
