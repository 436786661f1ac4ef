//! Exact solver for small balanced transportation problems.
//!
//! Primal transportation simplex on a spanning-tree basis: northwest-corner
//! start, node potentials from the basis tree, Bland's rule for both the
//! entering and the leaving cell. The returned plan is always a basic
//! solution, so its support is acyclic.

use std::collections::VecDeque;

use crate::error::{Error, Result};

/// Allowed mismatch between total supply and total demand.
const BALANCE_TOLERANCE: f64 = 1e-9;
const PIVOT_LIMIT: usize = 100_000;

/// Minimizes `sum cost[i * n + j] * x[i * n + j]` over non-negative `m x n`
/// plans with row sums `supply` and column sums `demand`.
pub fn solve(cost: &[f64], supply: &[f64], demand: &[f64]) -> Result<Vec<f64>> {
    let (m, n) = (supply.len(), demand.len());
    if cost.len() != m * n {
        return Err(Error::InfeasibleConstraints(format!(
            "cost has {} entries for a {m}x{n} problem",
            cost.len()
        )));
    }
    if let Some(c) = cost.iter().find(|c| !c.is_finite()) {
        return Err(Error::InfeasibleConstraints(format!("non-finite cost {c}")));
    }
    if supply.iter().chain(demand).any(|&v| v.is_nan() || v < 0.0) {
        return Err(Error::InfeasibleConstraints(
            "negative supply or demand".into(),
        ));
    }
    let total_s: f64 = supply.iter().sum();
    let total_d: f64 = demand.iter().sum();
    if (total_s - total_d).abs() > BALANCE_TOLERANCE {
        return Err(Error::InfeasibleConstraints(format!(
            "supply {total_s} != demand {total_d}"
        )));
    }

    let rows: Vec<usize> = (0..m).filter(|&i| supply[i] > 0.0).collect();
    let cols: Vec<usize> = (0..n).filter(|&j| demand[j] > 0.0).collect();
    let mut plan = vec![0.0; m * n];
    if rows.is_empty() || cols.is_empty() {
        return Ok(plan);
    }

    let sub_cost: Vec<f64> = rows
        .iter()
        .flat_map(|&i| cols.iter().map(move |&j| cost[i * n + j]))
        .collect();
    let sub_supply: Vec<f64> = rows.iter().map(|&i| supply[i]).collect();
    let sub_demand: Vec<f64> = cols.iter().map(|&j| demand[j]).collect();
    let sub = Simplex::new(sub_cost, sub_supply, sub_demand).run()?;

    for (a, &i) in rows.iter().enumerate() {
        for (b, &j) in cols.iter().enumerate() {
            plan[i * n + j] = sub[a * cols.len() + b];
        }
    }
    Ok(plan)
}

struct Simplex {
    m: usize,
    n: usize,
    cost: Vec<f64>,
    value: Vec<f64>,
    basic: Vec<bool>,
}

impl Simplex {
    fn new(cost: Vec<f64>, supply: Vec<f64>, demand: Vec<f64>) -> Self {
        let (m, n) = (supply.len(), demand.len());
        let mut value = vec![0.0; m * n];
        let mut basic = vec![false; m * n];
        // Northwest corner; exactly m + n - 1 basic cells.
        let (mut s, mut d) = (supply, demand);
        let (mut i, mut j) = (0, 0);
        loop {
            let q = s[i].min(d[j]);
            value[i * n + j] = q;
            basic[i * n + j] = true;
            s[i] -= q;
            d[j] -= q;
            if i == m - 1 && j == n - 1 {
                // Absorb rounding imbalance in the last cell.
                value[i * n + j] += s[i].max(d[j]).max(0.0);
                break;
            }
            if j == n - 1 || (i < m - 1 && s[i] <= d[j]) {
                i += 1;
            } else {
                j += 1;
            }
        }
        Self {
            m,
            n,
            cost,
            value,
            basic,
        }
    }

    fn run(mut self) -> Result<Vec<f64>> {
        let scale = self.cost.iter().fold(1.0f64, |a, c| a.max(c.abs()));
        let eps = 1e-12 * scale;
        for _ in 0..PIVOT_LIMIT {
            let (u, v) = self.potentials();
            // Bland: first improving cell in lexicographic order.
            let entering = (0..self.m * self.n)
                .find(|&k| !self.basic[k] && self.cost[k] - u[k / self.n] - v[k % self.n] < -eps);
            let Some(entering) = entering else {
                for x in &mut self.value {
                    *x = x.max(0.0);
                }
                return Ok(self.value);
            };
            self.pivot(entering);
        }
        Err(Error::InfeasibleConstraints(
            "transportation simplex did not terminate".into(),
        ))
    }

    /// Row and column potentials with `u[0] = 0`.
    fn potentials(&self) -> (Vec<f64>, Vec<f64>) {
        let (m, n) = (self.m, self.n);
        let mut u = vec![f64::NAN; m];
        let mut v = vec![f64::NAN; n];
        u[0] = 0.0;
        let mut queue = VecDeque::from([0usize]);
        while let Some(node) = queue.pop_front() {
            if node < m {
                for (j, vj) in v.iter_mut().enumerate() {
                    if self.basic[node * n + j] && vj.is_nan() {
                        *vj = self.cost[node * n + j] - u[node];
                        queue.push_back(m + j);
                    }
                }
            } else {
                let j = node - m;
                for (i, ui) in u.iter_mut().enumerate() {
                    if self.basic[i * n + j] && ui.is_nan() {
                        *ui = self.cost[i * n + j] - v[j];
                        queue.push_back(i);
                    }
                }
            }
        }
        (u, v)
    }

    /// Basis cells on the tree path from row `i` to column `j`.
    fn tree_path(&self, i: usize, j: usize) -> Vec<usize> {
        let (m, n) = (self.m, self.n);
        let mut parent: Vec<Option<(usize, usize)>> = vec![None; m + n];
        let mut seen = vec![false; m + n];
        seen[i] = true;
        let mut queue = VecDeque::from([i]);
        while let Some(node) = queue.pop_front() {
            if node == m + j {
                break;
            }
            let neighbours: Vec<(usize, usize)> = if node < m {
                (0..n)
                    .filter(|&c| self.basic[node * n + c])
                    .map(|c| (m + c, node * n + c))
                    .collect()
            } else {
                let c = node - m;
                (0..m)
                    .filter(|&r| self.basic[r * n + c])
                    .map(|r| (r, r * n + c))
                    .collect()
            };
            for (next, cell) in neighbours {
                if !seen[next] {
                    seen[next] = true;
                    parent[next] = Some((node, cell));
                    queue.push_back(next);
                }
            }
        }
        let mut path = Vec::new();
        let mut node = m + j;
        while node != i {
            let (prev, cell) = parent[node].expect("basis is a spanning tree");
            path.push(cell);
            node = prev;
        }
        path.reverse();
        path
    }

    fn pivot(&mut self, entering: usize) {
        let (i, j) = (entering / self.n, entering % self.n);
        let path = self.tree_path(i, j);
        // Path cells alternate -, +, -, ... starting next to row i.
        let minus: Vec<usize> = path.iter().step_by(2).copied().collect();
        let theta = minus
            .iter()
            .map(|&k| self.value[k])
            .fold(f64::INFINITY, f64::min);
        let leaving = *minus
            .iter()
            .filter(|&&k| self.value[k] == theta)
            .min()
            .expect("cycle has a minus cell");
        for (pos, &k) in path.iter().enumerate() {
            if pos % 2 == 0 {
                self.value[k] -= theta;
            } else {
                self.value[k] += theta;
            }
        }
        self.value[entering] = theta;
        self.value[leaving] = 0.0;
        self.basic[leaving] = false;
        self.basic[entering] = true;
    }
}
