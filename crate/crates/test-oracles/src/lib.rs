//! Reference implementations used only from test code.
//!
//! Everything here trades speed for obviousness and stays independent of
//! the production algorithms it is used to verify: the matching oracle is
//! a bitmask dynamic program (vs. Hopcroft-Karp in production), the rank
//! oracle is fraction-free integer elimination (vs. floating-point
//! complete pivoting), and betweenness is literal all-pairs path counting
//! (vs. Brandes accumulation).

use std::collections::VecDeque;

/// Maximum matching of a directed graph by exhaustive search.
///
/// Left side = start roles, right side = end roles. `f(u, used)` is the
/// best matching among left nodes `u..n` with `used` the bitmask of
/// taken right nodes. Only sensible for `n <= ~16`.
pub fn brute_force_max_matching(n: usize, arcs: &[(usize, usize)]) -> usize {
    assert!(n <= 16, "oracle is exponential in n");
    let mut adj = vec![0u32; n];
    for &(s, d) in arcs {
        adj[s] |= 1 << d;
    }
    let mut memo = vec![u8::MAX; n << n];
    fn go(u: usize, used: u32, n: usize, adj: &[u32], memo: &mut [u8]) -> u8 {
        if u == n {
            return 0;
        }
        let key = (u << n) | used as usize;
        if memo[key] != u8::MAX {
            return memo[key];
        }
        let mut best = go(u + 1, used, n, adj, memo); // leave u unmatched
        let mut options = adj[u] & !used;
        while options != 0 {
            let v = options.trailing_zeros();
            options &= options - 1;
            best = best.max(1 + go(u + 1, used | (1 << v), n, adj, memo));
        }
        memo[key] = best;
        best
    }
    go(0, 0, n, &adj, &mut memo) as usize
}

/// Exact rank of an integer matrix via fraction-free (Bareiss) Gaussian
/// elimination. Intermediate values are exact minors, so `i128` is ample
/// for the small matrices tests use (entries up to ~15, n up to ~8).
pub fn exact_integer_rank(n: usize, values: &[i128]) -> usize {
    assert_eq!(values.len(), n * n);
    let mut a = values.to_vec();
    let mut rank = 0;
    let mut prev = 1i128;
    for k in 0..n.min(n) {
        // find any nonzero pivot in the remaining submatrix
        let mut pivot = None;
        'search: for i in rank..n {
            for j in rank..n {
                if a[i * n + j] != 0 {
                    pivot = Some((i, j));
                    break 'search;
                }
            }
        }
        let Some((pi, pj)) = pivot else { break };
        if pi != rank {
            for j in 0..n {
                a.swap(pi * n + j, rank * n + j);
            }
        }
        if pj != rank {
            for i in 0..n {
                a.swap(i * n + pj, i * n + rank);
            }
        }
        let p = a[rank * n + rank];
        for i in rank + 1..n {
            for j in rank + 1..n {
                let num = a[i * n + j] * p - a[i * n + rank] * a[rank * n + j];
                debug_assert_eq!(num % prev, 0, "Bareiss divisibility violated");
                a[i * n + j] = num / prev;
            }
            a[i * n + rank] = 0;
        }
        prev = p;
        rank += 1;
        let _ = k;
    }
    rank
}

/// Directed node betweenness by literal path counting.
///
/// For every ordered pair `(s, t)` and every interior node `v`, adds
/// `sigma_st(v) / sigma_st`, where path counts come from plain BFS layer
/// DP run from every node. Endpoints score nothing for their own pairs.
pub fn naive_betweenness(n: usize, arcs: &[(usize, usize)]) -> Vec<f64> {
    let mut adj = vec![Vec::new(); n];
    for &(s, d) in arcs {
        adj[s].push(d);
    }
    // dist[s][v], sigma[s][v] for all sources s
    let mut dist = vec![vec![usize::MAX; n]; n];
    let mut sigma = vec![vec![0f64; n]; n];
    for s in 0..n {
        dist[s][s] = 0;
        sigma[s][s] = 1.0;
        let mut queue = VecDeque::from([s]);
        while let Some(u) = queue.pop_front() {
            for &w in &adj[u] {
                if dist[s][w] == usize::MAX {
                    dist[s][w] = dist[s][u] + 1;
                    queue.push_back(w);
                }
                if dist[s][w] == dist[s][u] + 1 {
                    sigma[s][w] += sigma[s][u];
                }
            }
        }
    }
    let mut score = vec![0.0; n];
    for s in 0..n {
        for t in 0..n {
            if s == t || dist[s][t] == usize::MAX {
                continue;
            }
            for v in 0..n {
                if v == s || v == t {
                    continue;
                }
                if dist[s][v] != usize::MAX
                    && dist[v][t] != usize::MAX
                    && dist[s][v] + dist[v][t] == dist[s][t]
                {
                    score[v] += sigma[s][v] * sigma[v][t] / sigma[s][t];
                }
            }
        }
    }
    score
}

/// Central finite-difference gradient of a scalar function at `x`,
/// one coordinate at a time.
pub fn finite_difference_gradient<F>(mut f: F, x: &[f64], h: f64) -> Vec<f64>
where
    F: FnMut(&[f64]) -> f64,
{
    let mut grad = Vec::with_capacity(x.len());
    let mut probe = x.to_vec();
    for i in 0..x.len() {
        probe[i] = x[i] + h;
        let up = f(&probe);
        probe[i] = x[i] - h;
        let down = f(&probe);
        probe[i] = x[i];
        grad.push((up - down) / (2.0 * h));
    }
    grad
}

/// Relative error between an analytic and a reference value, guarded for
/// near-zero pairs.
pub fn relative_error(analytic: f64, reference: f64) -> f64 {
    let scale = analytic.abs().max(reference.abs());
    if scale < 1e-12 {
        0.0
    } else {
        (analytic - reference).abs() / scale
    }
}

/// Continuous maximum-likelihood fit of the tail exponent `gamma` of a
/// degree sample: `1 + m / sum(ln(k_i / (k_min - 1/2)))` over all
/// degrees `k_i >= k_min`.
pub fn powerlaw_mle(degrees: &[usize], k_min: usize) -> Option<f64> {
    let shift = k_min as f64 - 0.5;
    let tail: Vec<f64> = degrees
        .iter()
        .filter(|&&k| k >= k_min)
        .map(|&k| (k as f64 / shift).ln())
        .collect();
    if tail.len() < 10 {
        return None;
    }
    Some(1.0 + tail.len() as f64 / tail.iter().sum::<f64>())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matching_oracle_on_known_graphs() {
        // chain of 4: all 3 edges form a matching
        assert_eq!(brute_force_max_matching(4, &[(0, 1), (1, 2), (2, 3)]), 3);
        // out-star shares the start node: max 1
        assert_eq!(brute_force_max_matching(4, &[(0, 1), (0, 2), (0, 3)]), 1);
        // in-star shares the end node: max 1
        assert_eq!(brute_force_max_matching(4, &[(1, 0), (2, 0), (3, 0)]), 1);
        assert_eq!(brute_force_max_matching(3, &[]), 0);
        // 2-cycle: both edges share no roles
        assert_eq!(brute_force_max_matching(2, &[(0, 1), (1, 0)]), 2);
    }

    #[test]
    fn rank_oracle_on_known_matrices() {
        assert_eq!(exact_integer_rank(2, &[0, 0, 0, 0]), 0);
        assert_eq!(exact_integer_rank(2, &[1, 0, 0, 1]), 2);
        // second row = 2 * first
        assert_eq!(exact_integer_rank(2, &[1, 2, 2, 4]), 1);
        assert_eq!(
            exact_integer_rank(3, &[1, 2, 3, 4, 5, 6, 7, 8, 9]),
            2
        );
    }

    #[test]
    fn betweenness_oracle_on_chain() {
        // 0 -> 1 -> 2: only pair (0,2) has an interior node
        let b = naive_betweenness(3, &[(0, 1), (1, 2)]);
        assert_eq!(b, vec![0.0, 1.0, 0.0]);
    }

    #[test]
    fn finite_difference_on_quadratic() {
        let f = |x: &[f64]| x[0] * x[0] + 3.0 * x[1];
        let g = finite_difference_gradient(f, &[2.0, 5.0], 1e-4);
        assert!((g[0] - 4.0).abs() < 1e-6);
        assert!((g[1] - 3.0).abs() < 1e-6);
    }

    #[test]
    fn mle_recovers_exponent_of_synthetic_powerlaw() {
        // inverse-CDF sample of a continuous power law with gamma = 2.5
        let gamma = 2.5f64;
        let k_min = 5.0f64;
        let mut degrees = Vec::new();
        let mut u: f64 = 0.0005;
        while u < 1.0 {
            let x = k_min * (1.0 - u).powf(-1.0 / (gamma - 1.0));
            degrees.push(x.round() as usize);
            u += 0.001;
        }
        // integer rounding of the sample biases the continuous estimator
        // slightly low; the check only guards against gross formula errors
        let fit = powerlaw_mle(&degrees, 5).unwrap();
        assert!((fit - gamma).abs() < 0.3, "fit {fit} too far from {gamma}");
    }
}
