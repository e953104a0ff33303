use std::collections::BTreeMap;

use ctrlrob_core::control::DEFAULT_RANK_TOL;
use ctrlrob_core::dataset::{build_dataset, DatasetSpec};
use ctrlrob_core::netgen;

use crate::args::DatasetArgs;
use crate::config::{resolve_out_dir, Resolver};
use crate::errors::CliError;

pub fn run(args: DatasetArgs, file: &BTreeMap<String, String>) -> Result<(), CliError> {
    let mut resolver = Resolver::new("dataset", file);
    let n = resolver.require("n", args.n)?;
    let topologies =
        super::parse_topology_list(&resolver.get("topologies", args.topologies, "er,sf,qsn,sw".into())?)?;
    let degrees = super::parse_degree_list(&resolver.require::<String>("degrees", args.degrees)?)?;
    let weighted = resolver.flag("weighted", args.weighted)?;
    let instances = resolver.get("instances", args.instances, 10)?;
    let strategy = super::parse_strategy(&resolver.get("strategy", args.strategy, "ra".into())?)?;
    let tol = resolver.get("tol", args.tol, DEFAULT_RANK_TOL)?;
    let kind = super::parse_kind(&resolver.get("kind", args.kind, "structural".into())?, tol)?;
    let seed = resolver.get("seed", args.seed, 0)?;
    let sigma = resolver.get("sigma", args.sigma, netgen::DEFAULT_SF_SIGMA)?;
    let theta = resolver.get("theta", args.theta, netgen::DEFAULT_SF_THETA)?;
    let rq = resolver.get("rq", args.rq, netgen::DEFAULT_QSN_RQ)?;
    let sw_k = resolver.get("sw-k", args.sw_k, netgen::DEFAULT_SW_K)?;
    let workers = resolver.workers(args.workers)?;
    let out_dir = resolve_out_dir(&mut resolver, args.out_dir)?;
    resolver.write_snapshot(&out_dir)?;

    let spec = DatasetSpec {
        sf_sigma: sigma,
        sf_theta: theta,
        qsn_rq: rq,
        sw_k,
        ..DatasetSpec::new(n, topologies, degrees, weighted, instances, strategy, kind, seed)
    };
    let report = build_dataset(&spec, &out_dir, workers)?;
    // the ground-truth curves next to the manifest, ready for plotting
    let reader = ctrlrob_core::dataset::load_dataset(&out_dir.join("manifest.txt"))?;
    std::fs::write(
        out_dir.join("curves.csv"),
        ctrlrob_core::dataset::export_curves_csv(&reader)?,
    )?;
    println!(
        "dataset: {} samples -> {}",
        report.manifest.entries.len(),
        out_dir.join("manifest.txt").display()
    );
    for failure in &report.failures {
        eprintln!("sample {} failed: {}", failure.id, failure.error);
    }
    Ok(())
}
