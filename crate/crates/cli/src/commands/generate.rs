use std::collections::BTreeMap;

use ctrlrob_core::netgen::{self, GenSpec};
use ctrlrob_core::{dataset, rng};

use crate::args::GenerateArgs;
use crate::config::{resolve_out_dir, Resolver};
use crate::errors::CliError;

pub fn run(args: GenerateArgs, file: &BTreeMap<String, String>) -> Result<(), CliError> {
    let mut resolver = Resolver::new("generate", file);
    let topology = parse_args_topology(&mut resolver, args.topology)?;
    let n = resolver.require("n", args.n)?;
    let k = resolver.require("k", args.k)?;
    let weighted = resolver.flag("weighted", args.weighted)?;
    let seed = resolver.get("seed", args.seed, 0)?;
    let sigma = resolver.get("sigma", args.sigma, netgen::DEFAULT_SF_SIGMA)?;
    let theta = resolver.get("theta", args.theta, netgen::DEFAULT_SF_THETA)?;
    let rq = resolver.get("rq", args.rq, netgen::DEFAULT_QSN_RQ)?;
    let sw_k = resolver.get("sw-k", args.sw_k, netgen::DEFAULT_SW_K)?;
    let count = resolver.get("count", args.count, 1)?;
    let png = resolver.flag("png", args.png)?;
    let out_dir = resolve_out_dir(&mut resolver, args.out_dir)?;

    if count == 0 {
        return Err(CliError::usage("count must be at least 1"));
    }
    resolver.write_snapshot(&out_dir)?;

    for index in 0..count {
        // a single graph uses the seed verbatim; batches derive per-index
        let graph_seed = if count == 1 {
            seed
        } else {
            rng::derive_seed(seed, index as u64)
        };
        let spec = GenSpec {
            sf_sigma: sigma,
            sf_theta: theta,
            qsn_rq: rq,
            sw_k,
            ..GenSpec::new(topology, n, k, weighted, graph_seed)
        };
        let graph = netgen::generate(&spec)?;
        let stem = format!("graph_{index:03}");
        graph.write_edge_list_file(&out_dir.join(format!("{stem}.txt")))?;
        if png {
            dataset::export_png(&dataset::to_image(&graph), &out_dir.join(format!("{stem}.png")))?;
        }
        println!(
            "{stem}: {topology} n={n} edges={} seed={graph_seed}",
            graph.edge_count()
        );
    }
    Ok(())
}

fn parse_args_topology(
    resolver: &mut Resolver<'_>,
    flag: Option<String>,
) -> Result<ctrlrob_core::netgen::Topology, CliError> {
    let raw: String = resolver.require("topology", flag)?;
    super::parse_topology(&raw)
}
