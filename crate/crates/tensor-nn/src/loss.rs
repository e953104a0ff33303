//! The curve loss: mean absolute deviation between predicted and true
//! curves, with a mean-squared variant selectable by configuration.

use crate::{NnError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LossKind {
    /// Mean over positions of `|pv_i - tv_i|` (the default).
    L1,
    /// Mean over positions of `(pv_i - tv_i)^2`.
    L2,
}

impl LossKind {
    pub fn label(&self) -> &'static str {
        match self {
            LossKind::L1 => "l1",
            LossKind::L2 => "l2",
        }
    }
}

impl std::fmt::Display for LossKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.label())
    }
}

impl std::str::FromStr for LossKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "l1" => Ok(LossKind::L1),
            "l2" => Ok(LossKind::L2),
            other => Err(format!("unknown loss `{other}` (expected l1|l2)")),
        }
    }
}

/// Loss between a predicted and a true curve of equal length.
pub fn curve_loss(kind: LossKind, predicted: &[f64], truth: &[f64]) -> Result<f64> {
    if predicted.len() != truth.len() || predicted.is_empty() {
        return Err(NnError::ShapeMismatch(format!(
            "curve lengths disagree or are empty: {} vs {}",
            predicted.len(),
            truth.len()
        )));
    }
    let m = predicted.len() as f64;
    let sum: f64 = predicted
        .iter()
        .zip(truth)
        .map(|(&p, &t)| match kind {
            LossKind::L1 => (p - t).abs(),
            LossKind::L2 => (p - t) * (p - t),
        })
        .sum();
    Ok(sum / m)
}

/// Loss plus its gradient with respect to the prediction.
///
/// The L1 subgradient at a zero residual is 0.
pub fn curve_loss_grad(
    kind: LossKind,
    predicted: &[f64],
    truth: &[f64],
) -> Result<(f64, Vec<f64>)> {
    let loss = curve_loss(kind, predicted, truth)?;
    let m = predicted.len() as f64;
    let grad = predicted
        .iter()
        .zip(truth)
        .map(|(&p, &t)| match kind {
            LossKind::L1 => {
                if p > t {
                    1.0 / m
                } else if p < t {
                    -1.0 / m
                } else {
                    0.0
                }
            }
            LossKind::L2 => 2.0 * (p - t) / m,
        })
        .collect();
    Ok((loss, grad))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_at_equality() {
        let v = [0.3, 0.7, 1.0];
        assert_eq!(curve_loss(LossKind::L1, &v, &v).unwrap(), 0.0);
        assert_eq!(curve_loss(LossKind::L2, &v, &v).unwrap(), 0.0);
    }

    #[test]
    fn constant_offset_gives_its_magnitude() {
        let pv = [0.5, 0.6, 0.7];
        let tv = [0.3, 0.4, 0.5];
        assert!((curve_loss(LossKind::L1, &pv, &tv).unwrap() - 0.2).abs() < 1e-15);
    }

    #[test]
    fn hand_computed_case() {
        let loss = curve_loss(LossKind::L1, &[0.2, 0.4], &[0.1, 0.8]).unwrap();
        assert!((loss - 0.25).abs() < 1e-15);
    }

    #[test]
    fn length_mismatch_is_an_error() {
        assert!(curve_loss(LossKind::L1, &[0.0], &[0.0, 1.0]).is_err());
        assert!(curve_loss(LossKind::L1, &[], &[]).is_err());
    }

    #[test]
    fn gradients_point_at_the_truth() {
        let (_, g) = curve_loss_grad(LossKind::L1, &[0.5, 0.1, 0.3], &[0.3, 0.3, 0.3]).unwrap();
        assert_eq!(g, vec![1.0 / 3.0, -1.0 / 3.0, 0.0]);
        let (_, g) = curve_loss_grad(LossKind::L2, &[0.5], &[0.3]).unwrap();
        assert!((g[0] - 0.4).abs() < 1e-15);
    }
}
