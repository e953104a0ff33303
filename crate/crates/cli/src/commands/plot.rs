use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use crate::args::PlotArgs;
use crate::config::{resolve_out_dir, Resolver};
use crate::errors::CliError;
use crate::svg::{line_chart, Series};

pub fn run(args: PlotArgs, file: &BTreeMap<String, String>) -> Result<(), CliError> {
    let mut resolver = Resolver::new("plot", file);
    let curves_path: PathBuf = resolver
        .require::<String>("curves", super::train::path_str(args.curves))?
        .into();
    let predictions = args.predictions;
    let report = args.report;
    let linear_y = resolver.flag("linear-y", args.linear_y)?;
    let title = resolver.get("title", args.title, "controllability curves".into())?;
    if let Some(p) = &predictions {
        resolver.note("predictions", p.display());
    }
    if let Some(p) = &report {
        resolver.note("report", p.display());
    }
    let out_dir = resolve_out_dir(&mut resolver, args.out_dir)?;
    resolver.write_snapshot(&out_dir)?;

    let truth = mean_curve(&read_curve_rows(&curves_path)?)
        .ok_or_else(|| CliError::validation("curve file holds no samples"))?;

    let mut series = vec![Series {
        label: "tv".into(),
        color: "#000000",
        dashed: true,
        values: truth,
    }];
    if let Some(path) = predictions {
        if let Some(pv) = mean_curve(&read_curve_rows(&path)?) {
            series.push(Series {
                label: "pv".into(),
                color: "#d62728",
                dashed: false,
                values: pv,
            });
        }
    }
    if let Some(path) = report {
        let (er, st) = read_report_curves(&path)?;
        series.push(Series {
            label: "er".into(),
            color: "#444444",
            dashed: false,
            values: er,
        });
        series.push(Series {
            label: "st".into(),
            color: "#2ca02c",
            dashed: true,
            values: st,
        });
    }

    let svg = line_chart(&title, "nodes removed", "n_D", &series, !linear_y);
    let out = out_dir.join("plot.svg");
    std::fs::write(&out, svg)?;
    println!("plot -> {}", out.display());
    Ok(())
}

/// Curve CSV rows: `sample_id, v1, ..., vk`; comment lines ignored.
fn read_curve_rows(path: &Path) -> Result<Vec<Vec<f64>>, CliError> {
    let text = std::fs::read_to_string(path)?;
    let mut rows = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut fields = line.split(',');
        let _id = fields.next();
        let values: Result<Vec<f64>, _> = fields.map(|f| f.trim().parse::<f64>()).collect();
        rows.push(values.map_err(|e| {
            CliError::validation(format!("{}:{}: bad value: {e}", path.display(), idx + 1))
        })?);
    }
    Ok(rows)
}

fn mean_curve(rows: &[Vec<f64>]) -> Option<Vec<f64>> {
    let len = rows.first()?.len();
    let mut mean = vec![0.0; len];
    for row in rows {
        for (m, &v) in mean.iter_mut().zip(row) {
            *m += v;
        }
    }
    for m in &mut mean {
        *m /= rows.len() as f64;
    }
    Some(mean)
}

/// Pooled `er` and `st` curves from an evaluation report CSV.
fn read_report_curves(path: &Path) -> Result<(Vec<f64>, Vec<f64>), CliError> {
    let text = std::fs::read_to_string(path)?;
    let mut er = Vec::new();
    let mut st = Vec::new();
    for line in text.lines().skip(1) {
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() == 4 && fields[0] == "all" {
            er.push(fields[2].parse::<f64>().map_err(|e| {
                CliError::validation(format!("{}: bad er value: {e}", path.display()))
            })?);
            st.push(fields[3].parse::<f64>().map_err(|e| {
                CliError::validation(format!("{}: bad st value: {e}", path.display()))
            })?);
        }
    }
    if er.is_empty() {
        return Err(CliError::validation(format!(
            "{}: no pooled rows found",
            path.display()
        )));
    }
    Ok((er, st))
}
