//! Balanced transportation problem solved with the transportation simplex
//! (MODI potentials on a spanning-tree basis).

use std::collections::VecDeque;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct TransportPlan {
    pub cost: f64,
    /// Non-zero flows as `(supply index, demand index, amount)`.
    pub flows: Vec<(usize, usize, f64)>,
    pub iterations: usize,
}

#[derive(Debug, Clone, Copy)]
struct Basic {
    row: usize,
    col: usize,
    flow: f64,
}

struct Tree {
    m: usize,
    cells: Vec<Basic>,
    /// Basis cell indices touching each node; rows are `0..m`, columns `m..`.
    adj: Vec<Vec<usize>>,
}

impl Tree {
    fn other_end(&self, cell: usize, node: usize) -> usize {
        let c = self.cells[cell];
        if node == c.row {
            self.m + c.col
        } else {
            c.row
        }
    }

    fn potentials(&self, cost: &[f64], n: usize) -> (Vec<f64>, Vec<f64>) {
        let m = self.m;
        let mut pot = vec![f64::NAN; m + n];
        let mut seen = vec![false; m + n];
        let mut queue = VecDeque::from([0usize]);
        pot[0] = 0.0;
        seen[0] = true;
        while let Some(node) = queue.pop_front() {
            for &cell in &self.adj[node] {
                let next = self.other_end(cell, node);
                if seen[next] {
                    continue;
                }
                let c = self.cells[cell];
                let cij = cost[c.row * n + c.col];
                // u_row + v_col = c
                pot[next] = cij - pot[node];
                seen[next] = true;
                queue.push_back(next);
            }
        }
        let v = pot.split_off(m);
        (pot, v)
    }

    /// Basis cells on the tree path from node `from` to node `to`, in order.
    fn path(&self, from: usize, to: usize) -> Vec<usize> {
        let mut parent: Vec<Option<(usize, usize)>> = vec![None; self.adj.len()];
        let mut seen = vec![false; self.adj.len()];
        let mut queue = VecDeque::from([from]);
        seen[from] = true;
        while let Some(node) = queue.pop_front() {
            if node == to {
                break;
            }
            for &cell in &self.adj[node] {
                let next = self.other_end(cell, node);
                if !seen[next] {
                    seen[next] = true;
                    parent[next] = Some((node, cell));
                    queue.push_back(next);
                }
            }
        }
        let mut out = Vec::new();
        let mut node = to;
        while node != from {
            let (prev, cell) = parent[node].expect("basis is a spanning tree");
            out.push(cell);
            node = prev;
        }
        out.reverse();
        out
    }

    fn detach(&mut self, cell: usize) {
        let c = self.cells[cell];
        for node in [c.row, self.m + c.col] {
            let list = &mut self.adj[node];
            let pos = list.iter().position(|&k| k == cell).unwrap();
            list.swap_remove(pos);
        }
    }

    fn attach(&mut self, cell: usize) {
        let c = self.cells[cell];
        self.adj[c.row].push(cell);
        self.adj[self.m + c.col].push(cell);
    }
}

/// Minimum-cost flow from `supply` to `demand` under the row-major `m x n`
/// cost matrix. Totals must agree to within `1e-9`; the demand side is
/// rescaled to the supply total.
pub fn solve_transport(
    supply: &[f64],
    demand: &[f64],
    cost: &[f64],
    max_iterations: usize,
) -> Result<TransportPlan> {
    let (m, n) = (supply.len(), demand.len());
    if cost.len() != m * n {
        return Err(Error::InvalidParameter("cost matrix has wrong size".into()));
    }
    if supply.iter().chain(demand).any(|&v| !(v >= 0.0) || !v.is_finite()) {
        return Err(Error::InvalidParameter("masses must be finite and non-negative".into()));
    }
    let (ts, td): (f64, f64) = (supply.iter().sum(), demand.iter().sum());
    if (ts - td).abs() > 1e-9 * ts.max(td).max(1.0) {
        return Err(Error::InvalidParameter(format!(
            "unbalanced problem: supply {ts} vs demand {td}"
        )));
    }
    if m == 0 || n == 0 || ts == 0.0 {
        return Ok(TransportPlan {
            cost: 0.0,
            flows: Vec::new(),
            iterations: 0,
        });
    }
    let mut a = supply.to_vec();
    let mut b: Vec<f64> = demand.iter().map(|&v| v * ts / td).collect();

    // northwest corner start: exactly m + n - 1 cells
    let mut tree = Tree {
        m,
        cells: Vec::with_capacity(m + n - 1),
        adj: vec![Vec::new(); m + n],
    };
    let (mut i, mut j) = (0, 0);
    loop {
        let x = a[i].min(b[j]);
        a[i] -= x;
        b[j] -= x;
        tree.cells.push(Basic {
            row: i,
            col: j,
            flow: x,
        });
        tree.attach(tree.cells.len() - 1);
        if i == m - 1 && j == n - 1 {
            break;
        }
        if i == m - 1 {
            j += 1;
        } else if j == n - 1 || a[i] <= b[j] {
            i += 1;
        } else {
            j += 1;
        }
    }

    let max_cost = cost.iter().fold(0.0f64, |acc, &c| acc.max(c.abs()));
    let tol = 1e-12 * max_cost.max(1.0);
    let block = (m * n / 8).max(n).max(1);
    let mut start_row = 0;
    let mut iterations = 0;
    loop {
        let (u, v) = tree.potentials(cost, n);
        let mut best: Option<(f64, usize, usize)> = None;
        let mut scanned = 0;
        for step in 0..m {
            let r = (start_row + step) % m;
            for c in 0..n {
                let red = cost[r * n + c] - u[r] - v[c];
                if red < -tol && best.map_or(true, |(bv, _, _)| red < bv) {
                    best = Some((red, r, c));
                }
            }
            scanned += n;
            if best.is_some() && scanned >= block {
                start_row = (r + 1) % m;
                break;
            }
        }
        let Some((_, er, ec)) = best else { break };
        if iterations >= max_iterations {
            return Err(Error::SolverFailure(format!(
                "no optimum after {max_iterations} pivots"
            )));
        }
        iterations += 1;

        // cycle: entering cell (+), then path cells alternate -, +, ...
        let path = tree.path(er, m + ec);
        let mut leave = path[0];
        for &cell in path.iter().step_by(2) {
            if tree.cells[cell].flow < tree.cells[leave].flow {
                leave = cell;
            }
        }
        let theta = tree.cells[leave].flow;
        for (k, &cell) in path.iter().enumerate() {
            if k % 2 == 0 {
                tree.cells[cell].flow -= theta;
            } else {
                tree.cells[cell].flow += theta;
            }
        }
        tree.detach(leave);
        tree.cells[leave] = Basic {
            row: er,
            col: ec,
            flow: theta,
        };
        tree.attach(leave);
    }

    let flows: Vec<(usize, usize, f64)> = tree
        .cells
        .iter()
        .filter(|c| c.flow > 0.0)
        .map(|c| (c.row, c.col, c.flow))
        .collect();
    let total = flows.iter().map(|&(r, c, f)| f * cost[r * n + c]).sum();
    Ok(TransportPlan {
        cost: total,
        flows,
        iterations,
    })
}
