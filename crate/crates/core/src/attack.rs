//! Node-removal attack strategies and the curve-simulation oracle.
//!
//! A simulation removes one node per step until a single node remains,
//! recording the driver-node density of the remainder after every
//! removal. Targeted strategies recompute their centrality on the current
//! graph at every step; ties are broken uniformly at random.

use std::collections::VecDeque;
use std::fmt::Write as _;

use rand::Rng;
use rayon::prelude::*;

use crate::control::{self, ControllabilityKind};
use crate::graph::DirectedGraph;
use crate::netgen::{self, GenSpec};
use crate::{rng, CoreError, Result};

/// How the next victim node is chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum AttackStrategy {
    /// Random attack: uniform over the remaining nodes.
    Random,
    /// Targeted betweenness-based attack: a node of maximum betweenness.
    Betweenness,
    /// Targeted degree-based attack: a node of maximum total degree.
    Degree,
}

impl AttackStrategy {
    pub const ALL: [AttackStrategy; 3] = [
        AttackStrategy::Random,
        AttackStrategy::Betweenness,
        AttackStrategy::Degree,
    ];

    pub fn label(&self) -> &'static str {
        match self {
            AttackStrategy::Random => "ra",
            AttackStrategy::Betweenness => "tba",
            AttackStrategy::Degree => "tda",
        }
    }
}

impl std::fmt::Display for AttackStrategy {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.label())
    }
}

impl std::str::FromStr for AttackStrategy {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "ra" => Ok(AttackStrategy::Random),
            "tba" => Ok(AttackStrategy::Betweenness),
            "tda" => Ok(AttackStrategy::Degree),
            other => Err(format!("unknown strategy `{other}` (expected ra|tba|tda)")),
        }
    }
}

/// Driver-node density of the remaining network after each of the `N-1`
/// removals. The final entry is always exactly `1.0`: a single surviving
/// node needs one input.
#[derive(Debug, Clone, PartialEq)]
pub struct ControllabilityCurve {
    pub values: Vec<f64>,
    pub kind: ControllabilityKind,
    pub strategy: AttackStrategy,
}

/// Directed node betweenness over unweighted shortest paths (Brandes
/// accumulation). Path endpoints do not score for their own pairs.
///
/// Weights are ignored even on weighted graphs.
pub fn betweenness(g: &DirectedGraph) -> Vec<f64> {
    let n = g.node_count();
    let (offsets, targets) = g.csr_out();

    let mut centrality = vec![0.0f64; n];
    let mut dist = vec![i32::MAX; n];
    let mut sigma = vec![0.0f64; n];
    let mut delta = vec![0.0f64; n];
    let mut order: Vec<u32> = Vec::with_capacity(n);
    let mut preds: Vec<Vec<u32>> = vec![Vec::new(); n];
    let mut queue = VecDeque::new();

    for s in 0..n {
        dist.fill(i32::MAX);
        sigma.fill(0.0);
        delta.fill(0.0);
        order.clear();
        for p in preds.iter_mut() {
            p.clear();
        }
        dist[s] = 0;
        sigma[s] = 1.0;
        queue.push_back(s as u32);
        while let Some(u) = queue.pop_front() {
            order.push(u);
            let u = u as usize;
            for &w in &targets[offsets[u] as usize..offsets[u + 1] as usize] {
                let wi = w as usize;
                if dist[wi] == i32::MAX {
                    dist[wi] = dist[u] + 1;
                    queue.push_back(w);
                }
                if dist[wi] == dist[u] + 1 {
                    sigma[wi] += sigma[u];
                    preds[wi].push(u as u32);
                }
            }
        }
        for &w in order.iter().rev() {
            let w = w as usize;
            let coeff = (1.0 + delta[w]) / sigma[w];
            for &v in &preds[w] {
                delta[v as usize] += sigma[v as usize] * coeff;
            }
            if w != s {
                centrality[w] += delta[w];
            }
        }
    }
    centrality
}

/// Choose the next node to remove under `strategy`. Targeted strategies
/// pick uniformly among the nodes attaining the maximum score.
pub fn select_target(g: &DirectedGraph, strategy: AttackStrategy, rng: &mut impl Rng) -> usize {
    let n = g.node_count();
    match strategy {
        AttackStrategy::Random => rng.random_range(0..n),
        AttackStrategy::Degree => {
            let scores: Vec<usize> = g.degrees().iter().map(|d| d.total()).collect();
            pick_argmax(&scores, rng)
        }
        AttackStrategy::Betweenness => pick_argmax(&betweenness(g), rng),
    }
}

fn pick_argmax<T: PartialOrd + Copy>(scores: &[T], rng: &mut impl Rng) -> usize {
    let mut best = scores[0];
    let mut ties: Vec<usize> = vec![0];
    for (v, &s) in scores.iter().enumerate().skip(1) {
        if s > best {
            best = s;
            ties.clear();
            ties.push(v);
        } else if s == best {
            ties.push(v);
        }
    }
    ties[rng.random_range(0..ties.len())]
}

/// Simulate a full attack: remove `N-1` nodes one at a time, recording
/// the driver-node density of the remainder after every removal (the
/// density denominator is the current, shrunken size).
pub fn simulate_curve(
    g: &DirectedGraph,
    strategy: AttackStrategy,
    kind: ControllabilityKind,
    rng: &mut impl Rng,
) -> Result<ControllabilityCurve> {
    let n = g.node_count();
    let mut current = g.clone();
    let mut values = Vec::with_capacity(n.saturating_sub(1));
    for _ in 1..n {
        let victim = select_target(&current, strategy, rng);
        current = current.remove_node(victim)?;
        values.push(control::driver_count(&current, kind)?.density);
    }
    Ok(ControllabilityCurve {
        values,
        kind,
        strategy,
    })
}

/// Generate and attack one graph per spec, farming the samples out to a
/// bounded worker pool. Results are ordered like the input and identical
/// for every worker count; per-sample failures are reported without
/// aborting the batch.
///
/// `attack_seeds[i]` seeds sample `i`'s attack stream and must be
/// distinct across samples (the graph itself is seeded by its spec).
pub fn batch_simulate(
    specs: &[GenSpec],
    strategy: AttackStrategy,
    kind: ControllabilityKind,
    attack_seeds: &[u64],
    workers: usize,
) -> Result<Vec<Result<(DirectedGraph, ControllabilityCurve)>>> {
    if specs.len() != attack_seeds.len() {
        return Err(CoreError::BatchLengthMismatch {
            specs: specs.len(),
            seeds: attack_seeds.len(),
        });
    }
    let mut sorted: Vec<(u64, usize)> = attack_seeds
        .iter()
        .copied()
        .enumerate()
        .map(|(i, s)| (s, i))
        .collect();
    sorted.sort_unstable();
    for pair in sorted.windows(2) {
        if pair[0].0 == pair[1].0 {
            return Err(CoreError::SeedCollision {
                first: pair[0].1.min(pair[1].1),
                second: pair[0].1.max(pair[1].1),
            });
        }
    }

    let run = |(spec, &seed): (&GenSpec, &u64)| -> Result<(DirectedGraph, ControllabilityCurve)> {
        let graph = netgen::generate(spec)?;
        let mut rng = rng::from_seed(seed);
        let curve = simulate_curve(&graph, strategy, kind, &mut rng)?;
        Ok((graph, curve))
    };

    let jobs = specs.iter().zip(attack_seeds.iter());
    let results = if workers <= 1 {
        jobs.map(run).collect()
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(workers)
            .build()
            .map_err(|e| CoreError::InvalidGenParam {
                name: "workers",
                detail: e.to_string(),
            })?;
        pool.install(|| {
            specs
                .par_iter()
                .zip(attack_seeds.par_iter())
                .map(run)
                .collect()
        })
    };
    Ok(results)
}

/// Render curves as CSV, one row per sample: `sample_id, v1, ..., v_{N-1}`.
pub fn curves_to_csv<'a>(rows: impl IntoIterator<Item = (usize, &'a [f64])>) -> String {
    let mut out = String::new();
    for (id, values) in rows {
        let _ = write!(out, "{id}");
        for v in values {
            let _ = write!(out, ",{v}");
        }
        out.push('\n');
    }
    out
}
