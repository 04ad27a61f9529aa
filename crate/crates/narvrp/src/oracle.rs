//! Reference solvers: exact optima at small sizes and a 2-opt proxy beyond.

use thiserror::Error;

use crate::problem::{dist, tour_length, validate_tour, Kind, Tour, VrpInstance};

/// Held-Karp table size limit; about `2^16 * 16` doubles.
pub const HELD_KARP_MAX_N: usize = 16;
/// Permutation enumeration limit for the exact CVRP solver.
pub const BRUTE_FORCE_CVRP_MAX_N: usize = 8;

const TWO_OPT_MAX_PASSES: usize = 1000;
// Improvement threshold that keeps 2-opt monotone under float noise.
const TWO_OPT_EPS: f64 = 1e-12;

#[derive(Debug, Error)]
pub enum OracleError {
    #[error("instance kind {got} not supported, expected {want}")]
    WrongKind { want: Kind, got: Kind },
    #[error("instance size {n} exceeds the {solver} limit of {max}")]
    SizeLimit { solver: &'static str, n: usize, max: usize },
}

/// A reference solution; `exact` marks a certified optimum.
#[derive(Debug, Clone)]
pub struct OracleResult {
    pub length: f64,
    pub tour: Tour,
    pub exact: bool,
}

/// Exact TSP optimum by bitmask dynamic programming, `2 <= n <= 16`.
pub fn held_karp_tsp(instance: &VrpInstance) -> Result<OracleResult, OracleError> {
    if instance.kind != Kind::Tsp {
        return Err(OracleError::WrongKind { want: Kind::Tsp, got: instance.kind });
    }
    let n = instance.n();
    if n > HELD_KARP_MAX_N {
        return Err(OracleError::SizeLimit { solver: "held-karp", n, max: HELD_KARP_MAX_N });
    }

    let d: Vec<Vec<f64>> = (1..=n)
        .map(|i| (1..=n).map(|j| dist(instance.point(i), instance.point(j))).collect())
        .collect();

    // Node 1 is the fixed start; masks range over nodes 2..=n (bit i-2 for
    // node i). dp[mask][j] = shortest path 1 -> (set mask) ending at node j+2.
    let m = n - 1;
    let full = 1usize << m;
    let mut dp = vec![vec![f64::INFINITY; m]; full];
    let mut parent = vec![vec![usize::MAX; m]; full];
    for j in 0..m {
        dp[1 << j][j] = d[0][j + 1];
    }
    for mask in 1..full {
        for j in 0..m {
            if mask & (1 << j) == 0 || !dp[mask][j].is_finite() {
                continue;
            }
            let base = dp[mask][j];
            for k in 0..m {
                if mask & (1 << k) != 0 {
                    continue;
                }
                let next = mask | (1 << k);
                let cand = base + d[j + 1][k + 1];
                if cand < dp[next][k] {
                    dp[next][k] = cand;
                    parent[next][k] = j;
                }
            }
        }
    }

    let last_mask = full - 1;
    let (mut best_len, mut best_j) = (f64::INFINITY, 0);
    for j in 0..m {
        let cand = dp[last_mask][j] + d[j + 1][0];
        if cand < best_len {
            best_len = cand;
            best_j = j;
        }
    }

    let mut order = Vec::with_capacity(n);
    let mut mask = last_mask;
    let mut j = best_j;
    while mask != 0 {
        order.push(j + 2);
        let p = parent[mask][j];
        mask &= !(1 << j);
        if p == usize::MAX {
            break;
        }
        j = p;
    }
    order.push(1);
    order.reverse();

    let tour = Tour::new(Kind::Tsp, order);
    debug_assert!(validate_tour(instance, &tour).is_ok());
    Ok(OracleResult { length: best_len, tour, exact: true })
}

/// Exact CVRP optimum for `n <= 8`: enumerate customer orders and split each
/// order into capacity-feasible sub-tours with an optimal partition DP.
pub fn brute_force_cvrp(instance: &VrpInstance) -> Result<OracleResult, OracleError> {
    if instance.kind != Kind::Cvrp {
        return Err(OracleError::WrongKind { want: Kind::Cvrp, got: instance.kind });
    }
    let n = instance.n();
    if n > BRUTE_FORCE_CVRP_MAX_N {
        return Err(OracleError::SizeLimit { solver: "brute-force-cvrp", n, max: BRUTE_FORCE_CVRP_MAX_N });
    }

    let mut order: Vec<usize> = (1..=n).collect();
    let mut best: Option<(f64, Vec<usize>)> = None;
    permute(&mut order, 0, &mut |perm| {
        if let Some((len, actions)) = split_optimally(instance, perm) {
            if best.as_ref().is_none_or(|(b, _)| len < *b) {
                best = Some((len, actions));
            }
        }
    });
    let (length, actions) = best.expect("every instance admits singleton sub-tours");
    let tour = Tour::new(Kind::Cvrp, actions);
    debug_assert!(validate_tour(instance, &tour).is_ok());
    Ok(OracleResult { length, tour, exact: true })
}

fn permute(items: &mut Vec<usize>, k: usize, visit: &mut impl FnMut(&[usize])) {
    if k == items.len() {
        visit(items);
        return;
    }
    for i in k..items.len() {
        items.swap(k, i);
        permute(items, k + 1, visit);
        items.swap(k, i);
    }
}

/// Optimal split of a fixed customer order into depot round trips.
fn split_optimally(instance: &VrpInstance, order: &[usize]) -> Option<(f64, Vec<usize>)> {
    let n = order.len();
    let depot = instance.point(0);
    let q = instance.cap();
    // best[i] = cheapest cost serving order[..i]; cut[i] = start of its last
    // sub-tour.
    let mut best = vec![f64::INFINITY; n + 1];
    let mut cut = vec![0usize; n + 1];
    best[0] = 0.0;
    for end in 1..=n {
        let mut load = 0.0;
        let mut inner = 0.0;
        // Grow the final sub-tour backwards from `end`.
        for start in (0..end).rev() {
            load += instance.demand(order[start]);
            if load > q {
                break;
            }
            if start + 1 < end {
                inner += dist(instance.point(order[start]), instance.point(order[start + 1]));
            }
            let leg = dist(depot, instance.point(order[start]))
                + inner
                + dist(instance.point(order[end - 1]), depot);
            let cand = best[start] + leg;
            if cand < best[end] {
                best[end] = cand;
                cut[end] = start;
            }
        }
    }
    if !best[n].is_finite() {
        return None;
    }

    let mut bounds = Vec::new();
    let mut end = n;
    while end > 0 {
        bounds.push((cut[end], end));
        end = cut[end];
    }
    bounds.reverse();
    let mut actions = Vec::with_capacity(n + bounds.len());
    for (i, &(s, e)) in bounds.iter().enumerate() {
        if i > 0 {
            actions.push(0);
        }
        actions.extend_from_slice(&order[s..e]);
    }
    Some((best[n], actions))
}

/// Nearest-neighbour construction from node 1 (TSP).
pub fn nearest_neighbor(instance: &VrpInstance) -> Tour {
    assert_eq!(instance.kind, Kind::Tsp);
    let n = instance.n();
    let mut visited = vec![false; n + 1];
    let mut actions = vec![1usize];
    visited[1] = true;
    for _ in 1..n {
        let here = instance.point(*actions.last().unwrap());
        let mut best = (f64::INFINITY, 0usize);
        for node in 1..=n {
            if !visited[node] {
                let c = dist(here, instance.point(node));
                if c < best.0 {
                    best = (c, node);
                }
            }
        }
        visited[best.1] = true;
        actions.push(best.1);
    }
    Tour::new(Kind::Tsp, actions)
}

/// First-improvement 2-opt local search for TSP tours.
pub fn two_opt(instance: &VrpInstance, start: &Tour) -> Tour {
    assert_eq!(instance.kind, Kind::Tsp);
    assert!(validate_tour(instance, start).is_ok(), "two_opt requires a valid start tour");
    let n = start.actions.len();
    let mut tour = start.actions.clone();
    if n < 4 {
        return Tour::new(Kind::Tsp, tour);
    }
    let p = |node: usize| instance.point(node);
    for _ in 0..TWO_OPT_MAX_PASSES {
        let mut improved = false;
        for i in 0..n - 1 {
            for j in i + 1..n {
                // Candidate move reverses tour[i+1..=j], replacing edges
                // (i, i+1) and (j, j+1) by (i, j) and (i+1, j+1).
                let a = tour[i];
                let b = tour[(i + 1) % n];
                let c = tour[j];
                let e = tour[(j + 1) % n];
                if a == c || b == e {
                    continue;
                }
                let delta = dist(p(a), p(c)) + dist(p(b), p(e)) - dist(p(a), p(b)) - dist(p(c), p(e));
                if delta < -TWO_OPT_EPS {
                    tour[i + 1..=j].reverse();
                    improved = true;
                }
            }
        }
        if !improved {
            break;
        }
    }
    Tour::new(Kind::Tsp, tour)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problem::{generate_cvrp, generate_tsp, VrpInstance};
    use approx::assert_abs_diff_eq;

    /// Exhaustive permutation search, independent of the DP route.
    fn exhaustive_tsp(instance: &VrpInstance) -> f64 {
        let n = instance.n();
        let mut rest: Vec<usize> = (2..=n).collect();
        let mut best = f64::INFINITY;
        permute(&mut rest, 0, &mut |perm| {
            let mut actions = vec![1];
            actions.extend_from_slice(perm);
            let len = tour_length(instance, &Tour::new(Kind::Tsp, actions)).unwrap();
            if len < best {
                best = len;
            }
        });
        best
    }

    /// Independent recursive CVRP enumerator: builds sub-tours directly.
    fn exhaustive_cvrp(instance: &VrpInstance) -> f64 {
        fn go(
            instance: &VrpInstance,
            remaining: &mut Vec<usize>,
            last: Option<usize>,
            load: f64,
            acc: f64,
            best: &mut f64,
        ) {
            let depot = instance.point(0);
            if remaining.is_empty() {
                let close = last.map_or(0.0, |l| dist(instance.point(l), depot));
                *best = (*best).min(acc + close);
                return;
            }
            if acc >= *best {
                return;
            }
            for i in 0..remaining.len() {
                let node = remaining.remove(i);
                let demand = instance.demand(node);
                let here = instance.point(node);
                // Continue the current sub-tour.
                if load + demand <= instance.cap() {
                    let from = last.map_or(depot, |l| instance.point(l));
                    go(instance, remaining, Some(node), load + demand, acc + dist(from, here), best);
                }
                // Or return to the depot first.
                if let Some(l) = last {
                    let detour = dist(instance.point(l), depot) + dist(depot, here);
                    go(instance, remaining, Some(node), demand, acc + detour, best);
                }
                remaining.insert(i, node);
            }
        }
        let mut remaining: Vec<usize> = (1..=instance.n()).collect();
        let mut best = f64::INFINITY;
        go(instance, &mut remaining, None, 0.0, 0.0, &mut best);
        best
    }

    #[test]
    fn held_karp_square_perimeter() {
        let inst = VrpInstance {
            kind: Kind::Tsp,
            coords: vec![[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]],
            demands: None,
            capacity: None,
            id: "square".into(),
            normalized: false,
            raw_coords: None,
        };
        let res = held_karp_tsp(&inst).unwrap();
        assert!(res.exact);
        assert_abs_diff_eq!(res.length, 4.0, epsilon = 1e-12);
    }

    #[test]
    fn held_karp_three_nodes_any_order() {
        let inst = generate_tsp(3, 5).unwrap();
        let res = held_karp_tsp(&inst).unwrap();
        // All 3-node tours traverse the same triangle.
        let any = tour_length(&inst, &Tour::new(Kind::Tsp, vec![1, 2, 3])).unwrap();
        assert_abs_diff_eq!(res.length, any, epsilon = 1e-12);
    }

    #[test]
    fn held_karp_matches_exhaustive_search() {
        for seed in 0..10 {
            let inst = generate_tsp(8, seed).unwrap();
            let res = held_karp_tsp(&inst).unwrap();
            assert_abs_diff_eq!(res.length, exhaustive_tsp(&inst), epsilon = 1e-9);
            assert_abs_diff_eq!(
                tour_length(&inst, &res.tour).unwrap(),
                res.length,
                epsilon = 1e-9
            );
        }
    }

    #[test]
    fn held_karp_rejects_large_instances() {
        let inst = generate_tsp(17, 0).unwrap();
        assert!(matches!(held_karp_tsp(&inst), Err(OracleError::SizeLimit { .. })));
    }

    #[test]
    fn cvrp_single_customer_out_and_back() {
        let inst = VrpInstance {
            kind: Kind::Cvrp,
            coords: vec![[0.0, 0.0], [0.3, 0.4]],
            demands: Some(vec![0.5]),
            capacity: Some(1.0),
            id: "one".into(),
            normalized: false,
            raw_coords: None,
        };
        let res = brute_force_cvrp(&inst).unwrap();
        assert_abs_diff_eq!(res.length, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn cvrp_heavy_demands_force_singletons() {
        let mut inst = generate_cvrp(4, 11).unwrap();
        inst.demands = Some(vec![0.6, 0.7, 0.8, 0.9]);
        let res = brute_force_cvrp(&inst).unwrap();
        let expected: f64 =
            (1..=4).map(|i| 2.0 * dist(inst.point(0), inst.point(i))).sum();
        assert_abs_diff_eq!(res.length, expected, epsilon = 1e-12);
    }

    #[test]
    fn cvrp_matches_independent_enumerator() {
        for seed in 0..8 {
            let inst = generate_cvrp(6, seed).unwrap();
            let res = brute_force_cvrp(&inst).unwrap();
            assert_abs_diff_eq!(res.length, exhaustive_cvrp(&inst), epsilon = 1e-9);
            assert_abs_diff_eq!(
                tour_length(&inst, &res.tour).unwrap(),
                res.length,
                epsilon = 1e-9
            );
        }
    }

    #[test]
    fn two_opt_uncrosses_square() {
        let inst = VrpInstance {
            kind: Kind::Tsp,
            coords: vec![[0.0, 0.0], [1.0, 1.0], [1.0, 0.0], [0.0, 1.0]],
            demands: None,
            capacity: None,
            id: "crossed".into(),
            normalized: false,
            raw_coords: None,
        };
        let crossed = Tour::new(Kind::Tsp, vec![1, 2, 3, 4]);
        let fixed = two_opt(&inst, &crossed);
        assert_abs_diff_eq!(tour_length(&inst, &fixed).unwrap(), 4.0, epsilon = 1e-12);
    }

    #[test]
    fn two_opt_is_monotone_and_idempotent() {
        for seed in 0..20 {
            let inst = generate_tsp(10, seed).unwrap();
            let start = nearest_neighbor(&inst);
            let start_len = tour_length(&inst, &start).unwrap();
            let improved = two_opt(&inst, &start);
            let improved_len = tour_length(&inst, &improved).unwrap();
            assert!(improved_len <= start_len + 1e-12);
            let again = two_opt(&inst, &improved);
            assert_eq!(again.actions, improved.actions);
        }
    }

    #[test]
    fn two_opt_not_worse_than_optimum_bound() {
        for seed in 100..110 {
            let inst = generate_tsp(8, seed).unwrap();
            let opt = held_karp_tsp(&inst).unwrap().length;
            let improved = two_opt(&inst, &nearest_neighbor(&inst));
            assert!(tour_length(&inst, &improved).unwrap() >= opt - 1e-9);
        }
    }
}
