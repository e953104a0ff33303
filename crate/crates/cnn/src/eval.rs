//! Test-split evaluation: per-position mean prediction error against the
//! per-position standard deviation of the true curves, overall and per
//! `(topology, <k>)` cell.

use std::fmt::Write as _;

use ctrlrob_core::dataset::{DatasetReader, Sample, Split};
use ctrlrob_core::netgen::Topology;
use rayon::prelude::*;

use crate::model::{predict, ModelState};
use crate::{CnnError, Result};

/// Error and spread curves for one group of test samples.
#[derive(Debug, Clone, PartialEq)]
pub struct EvalCell {
    pub topology: Option<Topology>,
    pub avg_degree: Option<f64>,
    pub sample_count: usize,
    /// Per-position mean `|pv_i - tv_i|`.
    pub er: Vec<f64>,
    /// Per-position sample standard deviation of the true values.
    pub st: Vec<f64>,
    /// `er` averaged over all positions.
    pub mean_er: f64,
    /// `st` averaged over all positions.
    pub mean_st: f64,
}

impl EvalCell {
    pub fn scope(&self) -> String {
        match (self.topology, self.avg_degree) {
            (Some(t), Some(k)) => format!("{t}:k={k}"),
            _ => "all".to_string(),
        }
    }
}

/// Full evaluation report: the pooled cell plus one per configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct EvalReport {
    pub overall: EvalCell,
    pub cells: Vec<EvalCell>,
    pub positions: usize,
}

fn cell_stats(
    topology: Option<Topology>,
    avg_degree: Option<f64>,
    predictions: &[&Vec<f64>],
    truths: &[&Vec<f64>],
    positions: usize,
) -> EvalCell {
    let count = predictions.len();
    let mut er = vec![0.0; positions];
    let mut st = vec![0.0; positions];
    for i in 0..positions {
        let mut abs_sum = 0.0;
        let mut mean = 0.0;
        for (pv, tv) in predictions.iter().zip(truths) {
            abs_sum += (pv[i] - tv[i]).abs();
            mean += tv[i];
        }
        mean /= count as f64;
        er[i] = abs_sum / count as f64;
        if count > 1 {
            let mut var = 0.0;
            for tv in truths {
                var += (tv[i] - mean) * (tv[i] - mean);
            }
            st[i] = (var / (count - 1) as f64).sqrt();
        }
    }
    let mean_er = er.iter().sum::<f64>() / positions as f64;
    let mean_st = st.iter().sum::<f64>() / positions as f64;
    EvalCell {
        topology,
        avg_degree,
        sample_count: count,
        er,
        st,
        mean_er,
        mean_st,
    }
}

/// Build the report from already-computed predictions. Exposed so a
/// report can be recomputed exactly from saved prediction files.
pub fn report_from_curves(
    predictions: &[Vec<f64>],
    truths: &[Vec<f64>],
    metas: &[(Topology, f64)],
) -> Result<EvalReport> {
    if predictions.is_empty() {
        return Err(CnnError::EmptySplit { split: "test" });
    }
    if predictions.len() != truths.len() || predictions.len() != metas.len() {
        return Err(CnnError::InvalidConfig(format!(
            "mismatched evaluation inputs: {} predictions, {} truths, {} metas",
            predictions.len(),
            truths.len(),
            metas.len()
        )));
    }
    let positions = predictions[0].len();
    for (pv, tv) in predictions.iter().zip(truths) {
        if pv.len() != positions || tv.len() != positions {
            return Err(CnnError::InvalidConfig(
                "curves of differing lengths in one evaluation".into(),
            ));
        }
    }

    let all_p: Vec<&Vec<f64>> = predictions.iter().collect();
    let all_t: Vec<&Vec<f64>> = truths.iter().collect();
    let overall = cell_stats(None, None, &all_p, &all_t, positions);

    // cells in first-appearance order, which follows the manifest order
    let mut keys: Vec<(Topology, f64)> = Vec::new();
    for &meta in metas {
        if !keys.contains(&meta) {
            keys.push(meta);
        }
    }
    let cells = keys
        .into_iter()
        .map(|(topology, k)| {
            let idx: Vec<usize> = metas
                .iter()
                .enumerate()
                .filter(|(_, &m)| m == (topology, k))
                .map(|(i, _)| i)
                .collect();
            let p: Vec<&Vec<f64>> = idx.iter().map(|&i| &predictions[i]).collect();
            let t: Vec<&Vec<f64>> = idx.iter().map(|&i| &truths[i]).collect();
            cell_stats(Some(topology), Some(k), &p, &t, positions)
        })
        .collect();

    Ok(EvalReport {
        overall,
        cells,
        positions,
    })
}

/// Evaluate the model on the dataset's test split.
pub fn evaluate(model: &ModelState, dataset: &DatasetReader) -> Result<EvalReport> {
    if dataset.manifest.n != model.config.n {
        return Err(CnnError::SizeMismatch {
            model_n: model.config.n,
            data_n: dataset.manifest.n,
        });
    }
    let samples: Vec<Sample> = dataset.load_split(Split::Test)?;
    if samples.is_empty() {
        return Err(CnnError::EmptySplit { split: "test" });
    }
    let predictions: Vec<Vec<f64>> = samples
        .par_iter()
        .map(|s| predict(model, &s.image))
        .collect::<Result<_>>()?;
    let truths: Vec<Vec<f64>> = samples.iter().map(|s| s.curve.clone()).collect();
    let metas: Vec<(Topology, f64)> = samples
        .iter()
        .map(|s| (s.meta.topology, s.meta.avg_degree))
        .collect();
    report_from_curves(&predictions, &truths, &metas)
}

impl EvalReport {
    /// CSV rows `scope,position,er,st`, pooled scope first.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("scope,position,er,st\n");
        let mut write_cell = |cell: &EvalCell| {
            let scope = cell.scope();
            for i in 0..self.positions {
                let _ = writeln!(out, "{scope},{},{},{}", i + 1, cell.er[i], cell.st[i]);
            }
        };
        write_cell(&self.overall);
        for cell in &self.cells {
            write_cell(cell);
        }
        out
    }

    /// Human-readable summary, one line per scope.
    pub fn summary(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "evaluation over {} test samples, {} curve positions",
            self.overall.sample_count, self.positions
        );
        let _ = writeln!(
            out,
            "overall: mean_er = {:.6} mean_st = {:.6}",
            self.overall.mean_er, self.overall.mean_st
        );
        for cell in &self.cells {
            let _ = writeln!(
                out,
                "{} ({} samples): mean_er = {:.6} mean_st = {:.6}",
                cell.scope(),
                cell.sample_count,
                cell.mean_er,
                cell.mean_st
            );
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn curves(values: &[&[f64]]) -> Vec<Vec<f64>> {
        values.iter().map(|v| v.to_vec()).collect()
    }

    #[test]
    fn perfect_predictions_have_zero_error() {
        let truths = curves(&[&[0.2, 0.5, 1.0], &[0.3, 0.6, 1.0]]);
        let metas = vec![(Topology::Er, 2.0); 2];
        let report = report_from_curves(&truths.clone(), &truths, &metas).unwrap();
        assert_eq!(report.overall.mean_er, 0.0);
        assert!(report.overall.mean_st > 0.0);
    }

    #[test]
    fn constant_predictor_error_tracks_the_spread() {
        // truths spread widely; a constant predictor cannot be much
        // better than the spread itself
        let truths = curves(&[&[0.1, 0.2], &[0.9, 1.0], &[0.5, 0.6]]);
        let constant = curves(&[&[0.5, 0.6], &[0.5, 0.6], &[0.5, 0.6]]);
        let metas = vec![(Topology::Er, 2.0); 3];
        let report = report_from_curves(&constant, &truths, &metas).unwrap();
        assert!(report.overall.mean_er > 0.5 * report.overall.mean_st);
    }

    #[test]
    fn cells_split_by_topology_and_degree() {
        let truths = curves(&[&[0.2, 1.0], &[0.4, 1.0], &[0.6, 1.0], &[0.8, 1.0]]);
        let preds = truths.clone();
        let metas = vec![
            (Topology::Er, 2.0),
            (Topology::Er, 5.0),
            (Topology::Sw, 2.0),
            (Topology::Er, 2.0),
        ];
        let report = report_from_curves(&preds, &truths, &metas).unwrap();
        assert_eq!(report.cells.len(), 3);
        assert_eq!(report.cells[0].sample_count, 2);
        assert_eq!(report.cells[0].scope(), "er:k=2");
    }

    #[test]
    fn csv_reload_reproduces_the_bars_exactly() {
        let truths = curves(&[&[0.25, 0.75, 1.0], &[0.5, 0.9, 1.0]]);
        let preds = curves(&[&[0.3, 0.7, 1.0], &[0.45, 0.95, 1.0]]);
        let metas = vec![(Topology::Qsn, 3.0); 2];
        let report = report_from_curves(&preds, &truths, &metas).unwrap();
        let csv = report.to_csv();

        // parse the pooled er curve back and recompute its mean
        let mut er = Vec::new();
        for line in csv.lines().skip(1) {
            let fields: Vec<&str> = line.split(',').collect();
            if fields[0] == "all" {
                er.push(fields[2].parse::<f64>().unwrap());
            }
        }
        let mean: f64 = er.iter().sum::<f64>() / er.len() as f64;
        assert_eq!(mean, report.overall.mean_er);
    }

    #[test]
    fn empty_test_split_is_an_error() {
        assert!(matches!(
            report_from_curves(&[], &[], &[]).unwrap_err(),
            CnnError::EmptySplit { .. }
        ));
    }
}
