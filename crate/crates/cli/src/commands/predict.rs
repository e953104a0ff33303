use std::collections::BTreeMap;
use std::path::PathBuf;

use ctrlrob_cnn::{load_model, predict};
use ctrlrob_core::attack::curves_to_csv;
use ctrlrob_core::dataset::to_image;
use ctrlrob_core::graph::DirectedGraph;

use crate::args::PredictArgs;
use crate::config::{resolve_out_dir, Resolver};
use crate::errors::CliError;

pub fn run(args: PredictArgs, file: &BTreeMap<String, String>) -> Result<(), CliError> {
    let mut resolver = Resolver::new("predict", file);
    let model_path: PathBuf = resolver
        .require::<String>("model", super::train::path_str(args.model))?
        .into();
    let out_dir = resolve_out_dir(&mut resolver, args.out_dir)?;
    resolver.note(
        "graph",
        args.graph
            .iter()
            .map(|p| p.display().to_string())
            .collect::<Vec<_>>()
            .join(","),
    );
    resolver.write_snapshot(&out_dir)?;

    let model = load_model(&model_path)?;
    let mut rows = Vec::new();
    for (index, path) in args.graph.iter().enumerate() {
        let graph = DirectedGraph::read_edge_list_file(path)?;
        let curve = predict(&model, &to_image(&graph))?;
        rows.push((index, curve));
    }
    let csv = curves_to_csv(rows.iter().map(|(id, v)| (*id, v.as_slice())));
    std::fs::write(out_dir.join("predictions.csv"), csv)?;
    println!(
        "predicted {} curve(s) -> {}",
        rows.len(),
        out_dir.join("predictions.csv").display()
    );
    Ok(())
}
