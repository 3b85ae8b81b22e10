//! Minimum-cost transport of signed mass on a finite metric space.
//!
//! Costs satisfy the triangle inequality, so some optimal flow ships only on
//! direct arcs from excess points to deficit points: relaying through an
//! intermediate point never beats the direct arc. The problem is therefore
//! solved in bipartite transportation form with a primal transportation
//! simplex (spanning-tree basis, northwest-corner start, most-negative
//! entering arc with an iteration cap).

use crate::metric::PointedMetricSpace;

/// Mass below this fraction of the total is treated as settled rounding
/// noise rather than demand.
const MASS_REL_TOL: f64 = 1e-14;

/// Computes the minimum of `sum flow[i][j] * d(source_i, sink_j)` over
/// nonnegative flows routing every positive `supply` entry to the negative
/// ones. The supply vector must be balanced up to rounding.
pub(crate) fn transport_cost(space: &PointedMetricSpace, supply: &[f64]) -> f64 {
    debug_assert_eq!(supply.len(), space.n());
    let scale: f64 = supply.iter().map(|s| s.abs()).sum();
    if scale == 0.0 {
        return 0.0;
    }
    let atol = MASS_REL_TOL * scale;
    let mut sources = Vec::new();
    let mut supplies = Vec::new();
    let mut sinks = Vec::new();
    let mut demands = Vec::new();
    for (x, &s) in supply.iter().enumerate() {
        if s > atol {
            sources.push(x);
            supplies.push(s);
        } else if s < -atol {
            sinks.push(x);
            demands.push(-s);
        }
    }
    if sources.is_empty() || sinks.is_empty() {
        return 0.0;
    }
    let cost = |i: usize, j: usize| space.dist(sources[i], sinks[j]);
    TransportationSimplex::solve(&supplies, &demands, &cost)
}

/// Primal simplex over the transportation polytope. Basic cells form a
/// spanning tree of the bipartite source/sink graph.
struct TransportationSimplex<'a> {
    k: usize,
    m: usize,
    cost: &'a dyn Fn(usize, usize) -> f64,
    /// Flow on basic cells, indexed like `basic`.
    flow: Vec<f64>,
    /// Basic cells as (source, sink); always k + m - 1 of them.
    basic: Vec<(usize, usize)>,
}

impl<'a> TransportationSimplex<'a> {
    fn solve(supplies: &[f64], demands: &[f64], cost: &'a dyn Fn(usize, usize) -> f64) -> f64 {
        let mut s = Self::northwest_corner(supplies, demands, cost);
        let mut max_cost = 0.0f64;
        for i in 0..s.k {
            for j in 0..s.m {
                max_cost = max_cost.max(cost(i, j));
            }
        }
        let eps = 1e-12 * (1.0 + max_cost);
        let pivot_cap = 400 * (s.k + s.m) + 400;
        for _ in 0..pivot_cap {
            let (u, v) = s.duals();
            let Some(entering) = s.entering_cell(&u, &v, eps) else {
                break;
            };
            s.pivot(entering);
        }
        s.basic
            .iter()
            .zip(&s.flow)
            .map(|(&(i, j), &x)| x * cost(i, j))
            .sum()
    }

    /// Initial basic feasible solution with exactly k + m - 1 cells; ties
    /// produce degenerate zero-flow cells.
    fn northwest_corner(
        supplies: &[f64],
        demands: &[f64],
        cost: &'a dyn Fn(usize, usize) -> f64,
    ) -> Self {
        let k = supplies.len();
        let m = demands.len();
        let mut rem_a = supplies.to_vec();
        let mut rem_b = demands.to_vec();
        let mut basic = Vec::with_capacity(k + m - 1);
        let mut flow = Vec::with_capacity(k + m - 1);
        let (mut i, mut j) = (0, 0);
        loop {
            let x = rem_a[i].min(rem_b[j]).max(0.0);
            basic.push((i, j));
            flow.push(x);
            rem_a[i] -= x;
            rem_b[j] -= x;
            if i == k - 1 && j == m - 1 {
                // Any residual imbalance here is rounding noise.
                break;
            }
            if (rem_a[i] <= rem_b[j] && i < k - 1) || j == m - 1 {
                i += 1;
            } else {
                j += 1;
            }
        }
        debug_assert_eq!(basic.len(), k + m - 1);
        Self {
            k,
            m,
            cost,
            flow,
            basic,
        }
    }

    /// Dual potentials with u[0] = 0, solving u_i + v_j = c_ij on the tree.
    fn duals(&self) -> (Vec<f64>, Vec<f64>) {
        let mut u = vec![f64::NAN; self.k];
        let mut v = vec![f64::NAN; self.m];
        // Adjacency over tree nodes: sources 0..k, sinks k..k+m.
        let mut adj: Vec<Vec<usize>> = vec![Vec::new(); self.k + self.m];
        for (cell, &(i, j)) in self.basic.iter().enumerate() {
            adj[i].push(cell);
            adj[self.k + j].push(cell);
        }
        u[0] = 0.0;
        let mut stack = vec![0usize];
        while let Some(node) = stack.pop() {
            for &cell in &adj[node] {
                let (i, j) = self.basic[cell];
                let c = (self.cost)(i, j);
                if node < self.k {
                    if v[j].is_nan() {
                        v[j] = c - u[i];
                        stack.push(self.k + j);
                    }
                } else if u[i].is_nan() {
                    u[i] = c - v[j];
                    stack.push(i);
                }
            }
        }
        (u, v)
    }

    /// Most negative reduced-cost nonbasic cell, if any is below -eps.
    fn entering_cell(&self, u: &[f64], v: &[f64], eps: f64) -> Option<(usize, usize)> {
        let mut best = None;
        let mut best_rc = -eps;
        for i in 0..self.k {
            for j in 0..self.m {
                let rc = (self.cost)(i, j) - u[i] - v[j];
                if rc < best_rc && !self.basic.contains(&(i, j)) {
                    best_rc = rc;
                    best = Some((i, j));
                }
            }
        }
        best
    }

    /// Brings `entering` into the basis along the unique tree cycle.
    fn pivot(&mut self, entering: (usize, usize)) {
        // Tree path from the entering source to the entering sink.
        let mut adj: Vec<Vec<(usize, usize)>> = vec![Vec::new(); self.k + self.m];
        for (cell, &(i, j)) in self.basic.iter().enumerate() {
            adj[i].push((self.k + j, cell));
            adj[self.k + j].push((i, cell));
        }
        let start = entering.0;
        let goal = self.k + entering.1;
        let mut parent: Vec<Option<(usize, usize)>> = vec![None; self.k + self.m];
        let mut seen = vec![false; self.k + self.m];
        seen[start] = true;
        let mut queue = std::collections::VecDeque::from([start]);
        while let Some(node) = queue.pop_front() {
            if node == goal {
                break;
            }
            for &(next, cell) in &adj[node] {
                if !seen[next] {
                    seen[next] = true;
                    parent[next] = Some((node, cell));
                    queue.push_back(next);
                }
            }
        }
        // Walk back from the sink: cells alternate -theta, +theta, ...
        // starting with -theta (the entering arc itself carries +theta).
        let mut minus_cells = Vec::new();
        let mut plus_cells = Vec::new();
        let mut node = goal;
        let mut sign_minus = true;
        while let Some((prev, cell)) = parent[node] {
            if sign_minus {
                minus_cells.push(cell);
            } else {
                plus_cells.push(cell);
            }
            sign_minus = !sign_minus;
            node = prev;
        }
        let (leave_pos, theta) = minus_cells
            .iter()
            .map(|&c| (c, self.flow[c]))
            .min_by(|a, b| a.1.partial_cmp(&b.1).expect("finite flows"))
            .expect("cycle has a leaving cell");
        for &c in &minus_cells {
            self.flow[c] -= theta;
        }
        for &c in &plus_cells {
            self.flow[c] += theta;
        }
        self.flow[leave_pos] = 0.0;
        self.basic[leave_pos] = entering;
        self.flow[leave_pos] = theta;
    }
}
