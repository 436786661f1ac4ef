//! Numerical core of the conditional mutual information minimization.
//!
//! On the polytope the objective `f(Q) = MI_Q(X : Y | Z)` equals
//! `H(X | Z) + sum_{y,z} phi(Q(., y, z))` with the column term
//! `phi(v) = sum_x v_x log2(v_x / sum v)`. Each `phi` is convex and
//! positively homogeneous, so `f` is smooth in the interior but typically
//! attains its minimum on a face where whole columns vanish.
//!
//! The minimizer is approached along the central path: for a decreasing
//! sequence of weights `mu`, Newton's method minimizes
//! `f - mu * sum_k ln Q[k]` (in nats) over the admissible cells. The
//! objective at the exact minimizers is non-increasing in `mu`, and each
//! accepted iterate is checked against its predecessor.
//!
//! Certificate: if a weight vector `t` satisfies `sum_x 2^t[x,y,z] <= 1` on
//! every column, then `phi(v) >= <t, v>` for all `v >= 0`, hence
//! `min f >= H(X | Z) + min_V <t, V>` over the polytope vertices. The choice
//! `t = log2 Q(x | y, z)` turns this bound into the Frank-Wolfe gap
//! `<grad f(Q), Q - V>`, which is at most `n mu / ln 2` on the central path.

use std::f64::consts::LN_2;

use nalgebra::{DMatrix, DVector};

use crate::error::Result;
use crate::feasible::{lmo_flat, Dims, MarginalConstraints};

/// Probabilities are clamped below at this value before taking logs.
pub const LOG_CLAMP: f64 = 1e-12;
/// Largest objective increase attributed to rounding in an accepted iterate.
pub(crate) const VALUE_SLACK: f64 = 1e-15;
const MU_START: f64 = 1e-2;
const MU_FACTOR: f64 = 10.0;
const MU_FLOOR: f64 = 1e-18;
const CENTERING_LIMIT: usize = 100;
/// Newton decrement, in nats, below which a point counts as centered.
const CENTERING_TOL: f64 = 1e-28;
/// Newton decrement, relative to `mu`, below which full steps are taken.
const QUADRATIC_REGION: f64 = 1e-2;
/// Relative Newton decrement below which a stalled centering is accepted.
const NOISE_REGION: f64 = 1e-6;
/// Steps stop at this fraction of the distance to the boundary.
const INTERIOR_FRACTION: f64 = 0.99;
const ARMIJO: f64 = 1e-4;
const BACKTRACK_LIMIT: usize = 60;

/// One linear equality `sum_{k in cells} q[k] = target`.
struct Row {
    cells: Vec<usize>,
    target: f64,
}

pub(crate) struct Kernel {
    d: Dims,
    /// Cells allowed to carry mass: `P(x, y) > 0` and `P(x, z) > 0`.
    free: Vec<bool>,
    /// The marginal equalities with one redundant equation per slice removed.
    rows: Vec<Row>,
    /// `H(X | Z)`, constant on the polytope.
    offset: f64,
}

/// A strictly positive feasible table, its objective, and the barrier
/// weight for the next centering.
pub(crate) struct Iterate {
    pub x: Vec<f64>,
    pub value: f64,
    mu: f64,
}

impl Kernel {
    pub(crate) fn new(d: Dims) -> Self {
        Self {
            d,
            free: vec![true; d.len()],
            rows: Vec::new(),
            offset: 0.0,
        }
    }

    pub(crate) fn for_constraints(c: &MarginalConstraints) -> Self {
        let d = c.dims();
        let pxy = c.xy().probabilities();
        let pxz = c.xz().probabilities();
        let mut free = vec![false; d.len()];
        let mut rows = Vec::new();
        for x in 0..d.nx {
            let ys: Vec<usize> = (0..d.ny).filter(|&y| pxy[x * d.ny + y] > 0.0).collect();
            let zs: Vec<usize> = (0..d.nz).filter(|&z| pxz[x * d.nz + z] > 0.0).collect();
            for &y in &ys {
                for &z in &zs {
                    free[d.at(x, y, z)] = true;
                }
                rows.push(Row {
                    cells: zs.iter().map(|&z| d.at(x, y, z)).collect(),
                    target: pxy[x * d.ny + y],
                });
            }
            for &z in zs.iter().skip(1) {
                rows.push(Row {
                    cells: ys.iter().map(|&y| d.at(x, y, z)).collect(),
                    target: pxz[x * d.nz + z],
                });
            }
        }
        let offset = (0..d.nz)
            .map(|z| {
                let pz: f64 = (0..d.nx).map(|x| pxz[x * d.nz + z]).sum();
                (0..d.nx)
                    .map(|x| pxz[x * d.nz + z])
                    .filter(|&p| p > 0.0)
                    .map(|p| p * (pz / p).log2())
                    .sum::<f64>()
            })
            .sum();
        Self {
            d,
            free,
            rows,
            offset,
        }
    }

    /// `x` must be positive on every free cell.
    pub(crate) fn start(&self, x: Vec<f64>) -> Iterate {
        Iterate {
            value: self.value(&x),
            x,
            mu: MU_START,
        }
    }

    fn sums(&self, q: &[f64]) -> (Vec<f64>, Vec<f64>, Vec<f64>) {
        let d = self.d;
        let mut qz = vec![0.0; d.nz];
        let mut qxz = vec![0.0; d.nx * d.nz];
        let mut qyz = vec![0.0; d.ny * d.nz];
        for x in 0..d.nx {
            for y in 0..d.ny {
                for z in 0..d.nz {
                    let p = q[d.at(x, y, z)];
                    qz[z] += p;
                    qxz[x * d.nz + z] += p;
                    qyz[y * d.nz + z] += p;
                }
            }
        }
        (qz, qxz, qyz)
    }

    /// Free cells of column `col = y * nz + z`.
    fn column(&self, col: usize) -> Vec<usize> {
        let d = self.d;
        let (y, z) = (col / d.nz, col % d.nz);
        (0..d.nx)
            .map(|x| d.at(x, y, z))
            .filter(|&k| self.free[k])
            .collect()
    }

    pub(crate) fn value(&self, q: &[f64]) -> f64 {
        let d = self.d;
        let (qz, qxz, qyz) = self.sums(q);
        let mut f = 0.0;
        for x in 0..d.nx {
            for y in 0..d.ny {
                for z in 0..d.nz {
                    let p = q[d.at(x, y, z)];
                    if p > 0.0 {
                        f += p * ((p / qyz[y * d.nz + z]) * (qz[z] / qxz[x * d.nz + z])).log2();
                    }
                }
            }
        }
        f
    }

    /// The gradient with every probability clamped below at `LOG_CLAMP`.
    pub(crate) fn clamped_gradient(&self, q: &[f64], g: &mut [f64]) {
        let d = self.d;
        let (qz, qxz, qyz) = self.sums(q);
        let c = |v: f64| v.max(LOG_CLAMP);
        for x in 0..d.nx {
            for y in 0..d.ny {
                for z in 0..d.nz {
                    let k = d.at(x, y, z);
                    g[k] =
                        (c(q[k]) * c(qz[z]) / (c(qxz[x * d.nz + z]) * c(qyz[y * d.nz + z]))).log2();
                }
            }
        }
    }

    /// Certified bound on `value - min f`.
    pub(crate) fn gap(&self, it: &Iterate, c: &MarginalConstraints) -> Result<f64> {
        let mut t = vec![0.0; self.d.len()];
        for col in 0..self.d.ny * self.d.nz {
            let cells = self.column(col);
            let mass: f64 = cells.iter().map(|&k| it.x[k]).sum();
            if mass > 0.0 {
                let logs: Vec<f64> = cells
                    .iter()
                    .map(|&k| (it.x[k] / mass).max(f64::MIN_POSITIVE).log2())
                    .collect();
                normalize_column(&mut t, &cells, &logs);
            }
        }
        let v = lmo_flat(&t, c)?;
        Ok((it.value - self.offset - dot(&t, &v)).max(0.0))
    }

    /// Centers at the current barrier weight, lowering the weight until the
    /// centered point does not increase the objective. Returns `false` once
    /// the weight is exhausted.
    pub(crate) fn advance(&self, it: &mut Iterate) -> bool {
        let mut q = it.x.clone();
        while it.mu >= MU_FLOOR {
            self.center(&mut q, it.mu);
            it.mu /= MU_FACTOR;
            let value = self.value(&q);
            if value <= it.value + VALUE_SLACK {
                it.x = q;
                it.value = value;
                return true;
            }
        }
        false
    }

    /// Damped Newton iteration on `f ln 2 - mu sum ln q`. Once the Newton
    /// decrement is small compared to `mu`, full steps are taken without a
    /// line search.
    fn center(&self, q: &mut Vec<f64>, mu: f64) {
        let mut g = vec![0.0; q.len()];
        let mut last = f64::INFINITY;
        for _ in 0..CENTERING_LIMIT {
            self.barrier_gradient(q, mu, &mut g);
            let Some(dir) = self.newton_direction(q, &g, mu) else {
                return;
            };
            let decrement = self.curvature(q, &dir, mu);
            let stalled = decrement > 0.5 * last && decrement < NOISE_REGION * mu;
            if decrement <= CENTERING_TOL || stalled {
                return;
            }
            last = decrement;
            let mut step = 1.0f64;
            for (qk, dk) in q.iter().zip(&dir) {
                if *dk < 0.0 {
                    step = step.min(INTERIOR_FRACTION * qk / -dk);
                }
            }
            if decrement < QUADRATIC_REGION * mu && step == 1.0 {
                q.iter_mut().zip(&dir).for_each(|(qk, dk)| *qk += dk);
                continue;
            }
            let current = self.barrier_value(q, mu);
            let mut accepted = false;
            for _ in 0..BACKTRACK_LIMIT {
                let trial: Vec<f64> = q.iter().zip(&dir).map(|(qk, dk)| qk + step * dk).collect();
                if self.barrier_value(&trial, mu) <= current - ARMIJO * step * decrement.max(0.0) {
                    *q = trial;
                    accepted = true;
                    break;
                }
                step *= 0.5;
            }
            if !accepted {
                return;
            }
        }
    }

    /// `dir^T H dir` for the barrier Hessian `H` at `q`; equals the Newton
    /// decrement when `dir` is the Newton direction of a feasible point.
    fn curvature(&self, q: &[f64], dir: &[f64], mu: f64) -> f64 {
        let diagonal: f64 = (0..q.len())
            .filter(|&k| self.free[k])
            .map(|k| dir[k] * dir[k] * (1.0 + mu / q[k]) / q[k])
            .sum();
        let coupling: f64 = (0..self.d.ny * self.d.nz)
            .map(|col| {
                let cells = self.column(col);
                let mass: f64 = cells.iter().map(|&k| q[k]).sum();
                let flow: f64 = cells.iter().map(|&k| dir[k]).sum();
                if mass > 0.0 {
                    flow * flow / mass
                } else {
                    0.0
                }
            })
            .sum();
        diagonal - coupling
    }

    fn barrier_value(&self, q: &[f64], mu: f64) -> f64 {
        let log_sum: f64 = q
            .iter()
            .zip(&self.free)
            .filter(|(_, &f)| f)
            .map(|(qk, _)| {
                if *qk > 0.0 {
                    qk.ln()
                } else {
                    f64::NEG_INFINITY
                }
            })
            .sum();
        self.value(q) * LN_2 - mu * log_sum
    }

    /// Gradient of the barrier objective on free cells; zero elsewhere.
    fn barrier_gradient(&self, q: &[f64], mu: f64, g: &mut [f64]) {
        let d = self.d;
        let (qz, qxz, qyz) = self.sums(q);
        for x in 0..d.nx {
            for y in 0..d.ny {
                for z in 0..d.nz {
                    let k = d.at(x, y, z);
                    g[k] = if self.free[k] {
                        ((q[k] / qyz[y * d.nz + z]) * (qz[z] / qxz[x * d.nz + z])).ln() - mu / q[k]
                    } else {
                        0.0
                    };
                }
            }
        }
    }

    /// Newton direction for the barrier objective, including a correction
    /// for any marginal residual. The KKT system is solved in the scaled
    /// variables `u = dq / sqrt(q)`, where each column's Hessian block is
    /// `I - s s^T / Q + mu diag(1 / q)` with `s = sqrt(q)`.
    fn newton_direction(&self, q: &[f64], g: &[f64], mu: f64) -> Option<Vec<f64>> {
        let cells: Vec<usize> = (0..q.len()).filter(|&k| self.free[k]).collect();
        let mut pos = vec![usize::MAX; q.len()];
        for (i, &k) in cells.iter().enumerate() {
            pos[k] = i;
        }
        let (n, m) = (cells.len(), self.rows.len());
        let root: Vec<f64> = cells.iter().map(|&k| q[k].sqrt()).collect();

        let mut kkt = DMatrix::zeros(n + m, n + m);
        let mut rhs = DVector::zeros(n + m);
        for col in 0..self.d.ny * self.d.nz {
            let members: Vec<usize> = self.column(col).into_iter().map(|k| pos[k]).collect();
            let mass: f64 = members.iter().map(|&i| q[cells[i]]).sum();
            for &i in &members {
                kkt[(i, i)] += 1.0 + mu / q[cells[i]];
                for &j in &members {
                    kkt[(i, j)] -= root[i] * root[j] / mass;
                }
            }
        }
        for (r, row) in self.rows.iter().enumerate() {
            for &k in &row.cells {
                let i = pos[k];
                kkt[(n + r, i)] = root[i];
                kkt[(i, n + r)] = root[i];
            }
            rhs[n + r] = row.target - row.cells.iter().map(|&k| q[k]).sum::<f64>();
        }
        for (i, &k) in cells.iter().enumerate() {
            rhs[i] = -root[i] * g[k];
        }
        let sol = solve_symmetric(kkt, &rhs)?;
        let mut dir = vec![0.0; q.len()];
        for (i, &k) in cells.iter().enumerate() {
            dir[k] = root[i] * sol[i];
        }
        dir.iter().all(|v| v.is_finite()).then_some(dir)
    }
}

/// Writes `logs` into `t[cells]` shifted so that `sum 2^t = 1`.
fn normalize_column(t: &mut [f64], cells: &[usize], logs: &[f64]) {
    let top = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let total: f64 = logs.iter().map(|l| (l - top).exp2()).sum();
    let shift = top + total.log2();
    for (&k, l) in cells.iter().zip(logs) {
        t[k] = l - shift;
    }
}

/// Solves a symmetric system, falling back to a pseudo-inverse when the
/// matrix is singular.
fn solve_symmetric(a: DMatrix<f64>, b: &DVector<f64>) -> Option<DVector<f64>> {
    let scale = b.amax().max(f64::MIN_POSITIVE);
    if let Some(sol) = a.clone().lu().solve(b) {
        let residual = (&a * &sol - b).amax();
        if sol.iter().all(|v| v.is_finite()) && residual <= 1e-10 * scale {
            return Some(sol);
        }
    }
    a.svd(true, true).solve(b, 1e-13).ok()
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}
