use std::collections::BTreeMap;
use std::fmt::Write as _;

use ctrlrob_core::attack::{curves_to_csv, simulate_curve};
use ctrlrob_core::control::{self, DEFAULT_RANK_TOL};
use ctrlrob_core::graph::DirectedGraph;
use ctrlrob_core::rng;

use crate::args::SimulateArgs;
use crate::config::{resolve_out_dir, Resolver};
use crate::errors::CliError;

pub fn run(args: SimulateArgs, file: &BTreeMap<String, String>) -> Result<(), CliError> {
    let mut resolver = Resolver::new("simulate", file);
    let strategy = super::parse_strategy(&resolver.get("strategy", args.strategy, "ra".into())?)?;
    let tol = resolver.get("tol", args.tol, DEFAULT_RANK_TOL)?;
    let kind = super::parse_kind(&resolver.get("kind", args.kind, "structural".into())?, tol)?;
    let seed = resolver.get("seed", args.seed, 0)?;
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

    let mut header = String::new();
    let mut rows: Vec<(usize, Vec<f64>)> = Vec::new();
    for (index, path) in args.graph.iter().enumerate() {
        let graph = DirectedGraph::read_edge_list_file(path)?;
        // the pre-attack measure is the first thing anyone checks
        let source = control::driver_count(&graph, kind)?;
        let line = format!(
            "# graph {} n={} source n_D = {}",
            path.display(),
            graph.node_count(),
            source.density
        );
        println!("{line}");
        let _ = writeln!(header, "{line}");

        let mut stream = rng::from_seed(rng::derive_seed(seed, index as u64));
        let curve = simulate_curve(&graph, strategy, kind, &mut stream)?;
        rows.push((index, curve.values));
    }

    let csv = curves_to_csv(rows.iter().map(|(id, v)| (*id, v.as_slice())));
    std::fs::write(out_dir.join("curves.csv"), format!("{header}{csv}"))?;
    Ok(())
}
