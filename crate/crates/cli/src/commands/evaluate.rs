use std::collections::BTreeMap;
use std::path::PathBuf;

use ctrlrob_cnn::{evaluate, load_model};
use ctrlrob_core::dataset::load_dataset;

use crate::args::EvaluateArgs;
use crate::config::{resolve_out_dir, Resolver};
use crate::errors::CliError;

pub fn run(args: EvaluateArgs, file: &BTreeMap<String, String>) -> Result<(), CliError> {
    let mut resolver = Resolver::new("evaluate", file);
    let model_path: PathBuf = resolver
        .require::<String>("model", super::train::path_str(args.model))?
        .into();
    let manifest: PathBuf = resolver
        .require::<String>("manifest", super::train::path_str(args.manifest))?
        .into();
    let out_dir = resolve_out_dir(&mut resolver, args.out_dir)?;
    resolver.write_snapshot(&out_dir)?;

    let model = load_model(&model_path)?;
    let dataset = load_dataset(&manifest)?;
    let report = evaluate(&model, &dataset)?;

    std::fs::write(out_dir.join("report.csv"), report.to_csv())?;
    let summary = report.summary();
    std::fs::write(out_dir.join("summary.txt"), &summary)?;
    print!("{summary}");
    Ok(())
}
