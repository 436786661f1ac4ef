//! Unique, shared and complementary information by convex minimization of
//! conditional mutual information over the marginal polytope.
//!
//! `minimize_cmi` starts from the independent coupling and follows the
//! central path of a log-barrier formulation, one barrier weight per
//! iteration. Every iterate is certified by the Frank-Wolfe gap
//! `<grad f(Q), Q - V>`, which bounds `f(Q) - min f` by convexity, and the
//! solver stops once that gap is below the requested tolerance.
//! [`Method::FrankWolfe`] runs the plain conditional-gradient iteration
//! under the same certificate.

use crate::error::{Error, Result};
use crate::feasible::{
    independent_coupling, lmo_flat, trivariate, Dims, FeasiblePoint, MarginalConstraints,
};
use crate::kernel::Kernel;
use crate::par::{self, Execution};
use crate::table::JointTable;

pub use crate::kernel::LOG_CLAMP;
pub const DEFAULT_TOL: f64 = 1e-9;
pub const DEFAULT_MAX_ITER: usize = 100_000;

/// Iteration scheme for `minimize_cmi_with`. Both report the Frank-Wolfe
/// gap as their certificate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Method {
    /// Newton centering along a log-barrier central path.
    #[default]
    CentralPath,
    /// Plain Frank-Wolfe with a golden-section line search. Slow to certify
    /// optima where whole `(y, z)` columns vanish.
    FrankWolfe,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverOptions {
    /// Target Frank-Wolfe gap, in bits.
    pub tol: f64,
    pub max_iter: usize,
    pub method: Method,
    /// Keep the objective value of every iterate in `SolveResult::history`.
    pub record_history: bool,
    /// Schedules the two solves inside `decompose`.
    pub execution: Execution,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            tol: DEFAULT_TOL,
            max_iter: DEFAULT_MAX_ITER,
            method: Method::default(),
            record_history: false,
            execution: Execution::Sequential,
        }
    }
}

impl SolverOptions {
    pub fn with_tol(tol: f64) -> Self {
        Self {
            tol,
            ..Self::default()
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveResult {
    pub optimizer: FeasiblePoint,
    /// Objective at `optimizer`, in bits.
    pub value: f64,
    /// Certified bound on `value - optimum`.
    pub gap: f64,
    pub iterations: usize,
    pub converged: bool,
    /// Objective per iteration when requested.
    pub history: Vec<f64>,
}

/// `MI_q(target : src | cond)` on a feasible point.
pub fn objective(q: &FeasiblePoint, target: &str, src: &str, cond: &str) -> Result<f64> {
    q.table()
        .conditional_mutual_information(&[target], &[src], &[cond])
}

/// Gradient of `MI_Q(X : Y | Z)` with respect to `Q(x, y, z)`, in bits:
/// `log2(Q(x,y,z) Q(z) / (Q(x,z) Q(y,z)))` with every probability clamped
/// below at `1e-12`.
pub fn gradient(q: &FeasiblePoint) -> Vec<f64> {
    let d = q.constraints().dims();
    let mut g = vec![0.0; d.len()];
    Kernel::new(d).clamped_gradient(q.probabilities(), &mut g);
    g
}

/// Minimizes `MI_Q(X : Y | Z)` over the polytope with default options.
pub fn minimize_cmi(c: &MarginalConstraints, tol: f64) -> Result<SolveResult> {
    minimize_cmi_with(c, &SolverOptions::with_tol(tol))
}

pub fn minimize_cmi_with(c: &MarginalConstraints, opts: &SolverOptions) -> Result<SolveResult> {
    assert!(opts.tol > 0.0, "solver tolerance must be positive");
    let kernel = Kernel::for_constraints(c);
    let start = independent_coupling(c).probabilities().to_vec();
    let run = match opts.method {
        Method::CentralPath => central_path(&kernel, start, c, opts)?,
        Method::FrankWolfe => frank_wolfe(&kernel, start, c, opts)?,
    };
    let converged = run.gap <= opts.tol;
    let result = SolveResult {
        optimizer: FeasiblePoint::from_flat(run.x, c)?,
        value: run.value.max(0.0),
        gap: run.gap,
        iterations: run.iterations,
        converged,
        history: run.history,
    };
    if converged {
        Ok(result)
    } else {
        Err(Error::IterationLimitExceeded(Box::new(result)))
    }
}

struct Run {
    x: Vec<f64>,
    value: f64,
    gap: f64,
    iterations: usize,
    history: Vec<f64>,
}

fn central_path(
    kernel: &Kernel,
    start: Vec<f64>,
    c: &MarginalConstraints,
    opts: &SolverOptions,
) -> Result<Run> {
    let mut it = kernel.start(start);
    let mut history = Vec::new();
    let mut iterations = 0;
    loop {
        if opts.record_history {
            history.push(it.value);
        }
        let gap = kernel.gap(&it, c)?;
        if gap <= opts.tol || iterations == opts.max_iter || !kernel.advance(&mut it) {
            return Ok(Run {
                x: it.x,
                value: it.value,
                gap,
                iterations,
                history,
            });
        }
        iterations += 1;
    }
}

const GOLDEN_TOL: f64 = 1e-10;

fn frank_wolfe(
    kernel: &Kernel,
    mut x: Vec<f64>,
    c: &MarginalConstraints,
    opts: &SolverOptions,
) -> Result<Run> {
    let mut value = kernel.value(&x);
    let mut history = Vec::new();
    let mut iterations = 0;
    let mut g = vec![0.0; x.len()];
    let mut trial = vec![0.0; x.len()];
    loop {
        if opts.record_history {
            history.push(value);
        }
        kernel.clamped_gradient(&x, &mut g);
        let v = lmo_flat(&g, c)?;
        let gap: f64 = g
            .iter()
            .zip(x.iter().zip(&v))
            .map(|(gk, (xk, vk))| gk * (xk - vk))
            .sum();
        let gap = gap.max(0.0);
        if gap <= opts.tol || iterations == opts.max_iter {
            return Ok(Run {
                x,
                value,
                gap,
                iterations,
                history,
            });
        }
        let mut along = |gamma: f64| {
            for ((t, xk), vk) in trial.iter_mut().zip(&x).zip(&v) {
                *t = xk + gamma * (vk - xk);
            }
            kernel.value(&trial)
        };
        let gamma = golden_section(&mut along, GOLDEN_TOL);
        let candidate = along(gamma);
        if candidate.is_nan() || candidate >= value {
            return Ok(Run {
                x,
                value,
                gap,
                iterations,
                history,
            });
        }
        x.iter_mut()
            .zip(&v)
            .for_each(|(xk, vk)| *xk += gamma * (vk - *xk));
        value = candidate;
        iterations += 1;
    }
}

/// Minimizer of a unimodal function on `[0, 1]`, to within `tol`.
fn golden_section(f: &mut impl FnMut(f64) -> f64, tol: f64) -> f64 {
    let ratio = (5f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = (0.0, 1.0);
    let mut c = b - ratio * (b - a);
    let mut d = a + ratio * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    while b - a > tol {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - ratio * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + ratio * (b - a);
            fd = f(d);
        }
    }
    0.5 * (a + b)
}

/// The bivariate decomposition of `MI(X : (Y, Z))`, in bits. Fields hold the
/// raw computed values; see [`Decomposition::clamped`] for reporting.
#[derive(Debug, Clone, PartialEq)]
pub struct Decomposition {
    pub mi_total: f64,
    pub mi_xy: f64,
    pub mi_xz: f64,
    pub si: f64,
    pub ui_y: f64,
    pub ui_z: f64,
    pub ci: f64,
    /// Optimizer of the `MI(X : Y | Z)` problem.
    pub optimizer: FeasiblePoint,
    /// `|si - (mi_xz - ui_z)|`.
    pub consistency_residual: f64,
    pub gap_y: f64,
    pub gap_z: f64,
    pub iterations_y: usize,
    pub iterations_z: usize,
}

/// Values within this of zero from below are reported as zero.
pub const REPORT_CLAMP: f64 = 1e-6;

impl Decomposition {
    /// `(si, ui_y, ui_z, ci)` with negatives in `[-1e-6, 0)` set to zero.
    pub fn clamped(&self) -> [f64; 4] {
        [self.si, self.ui_y, self.ui_z, self.ci].map(|v| {
            if (-REPORT_CLAMP..0.0).contains(&v) {
                0.0
            } else {
                v
            }
        })
    }

    fn assemble(
        p3: &JointTable,
        optimizer: FeasiblePoint,
        ui: [(f64, f64, usize); 2],
    ) -> Result<Self> {
        let n = p3.names();
        let (x, y, z) = (n[0], n[1], n[2]);
        let mi_xy = p3.mutual_information(&[x], &[y])?;
        let mi_xz = p3.mutual_information(&[x], &[z])?;
        let mi_total = p3.mutual_information(&[x], &[y, z])?;
        let [(ui_y, gap_y, iterations_y), (ui_z, gap_z, iterations_z)] = ui;
        let si = mi_xy - ui_y;
        let ci = mi_total - si - ui_y - ui_z;
        let consistency_residual = (si - (mi_xz - ui_z)).abs();
        Ok(Self {
            mi_total,
            mi_xy,
            mi_xz,
            si,
            ui_y,
            ui_z,
            ci,
            optimizer,
            consistency_residual,
            gap_y,
            gap_z,
            iterations_y,
            iterations_z,
        })
    }
}

/// Decomposes the information that `(src1, src2)` carry about `target`.
pub fn decompose(
    p: &JointTable,
    target: &[&str],
    src1: &[&str],
    src2: &[&str],
    tol: f64,
) -> Result<Decomposition> {
    decompose_with(p, target, src1, src2, &SolverOptions::with_tol(tol))
}

pub fn decompose_with(
    p: &JointTable,
    target: &[&str],
    src1: &[&str],
    src2: &[&str],
    opts: &SolverOptions,
) -> Result<Decomposition> {
    let p3 = trivariate(p, target, src1, src2)?;
    decompose_trivariate(&p3, opts)
}

/// Decomposition for a table already laid out as `(X, Y, Z)`.
pub fn decompose_trivariate(p3: &JointTable, opts: &SolverOptions) -> Result<Decomposition> {
    let c = MarginalConstraints::from_trivariate(p3)?;
    let swapped = MarginalConstraints::new(c.xz().clone(), c.xy().clone())?;
    let (ry, rz) = par::join(
        opts.execution,
        || minimize_cmi_with(&c, opts),
        || minimize_cmi_with(&swapped, opts),
    );
    let (ry, rz) = (ry?, rz?);
    Decomposition::assemble(
        p3,
        ry.optimizer,
        [
            (ry.value, ry.gap, ry.iterations),
            (rz.value, rz.gap, rz.iterations),
        ],
    )
}

/// Largest total number of free grid coordinates the oracle accepts.
pub const ORACLE_MAX_DIMS: usize = 4;

/// Grid-search oracle: enumerates the polytope on a grid of spacing
/// `resolution` along its free coordinates and keeps the minimizers of both
/// conditional mutual informations.
pub fn brute_force_decompose(
    p: &JointTable,
    target: &[&str],
    src1: &[&str],
    src2: &[&str],
    resolution: f64,
) -> Result<Decomposition> {
    let p3 = trivariate(p, target, src1, src2)?;
    brute_force_trivariate(&p3, resolution)
}

pub fn brute_force_trivariate(p3: &JointTable, resolution: f64) -> Result<Decomposition> {
    assert!(resolution > 0.0, "grid resolution must be positive");
    let c = MarginalConstraints::from_trivariate(p3)?;
    let dims: usize = c.slice_dimensions().iter().sum();
    if dims > ORACLE_MAX_DIMS {
        return Err(Error::DimensionTooLarge {
            dims,
            max: ORACLE_MAX_DIMS,
        });
    }
    let d = c.dims();
    let grid = Grid::new(&c, resolution);
    let fwd = Kernel::new(d);
    let swapped_dims = Dims {
        nx: d.nx,
        ny: d.nz,
        nz: d.ny,
    };
    let bwd = Kernel::new(swapped_dims);
    let mut best_y = (f64::INFINITY, Vec::new());
    let mut best_z = f64::INFINITY;
    let mut t = vec![0.0; d.len()];
    grid.for_each(|q| {
        let fy = fwd.value(q);
        if fy < best_y.0 {
            best_y = (fy, q.to_vec());
        }
        transpose_yz(q, d, &mut t);
        let fz = bwd.value(&t);
        if fz < best_z {
            best_z = fz;
        }
    });
    let optimizer = FeasiblePoint::from_flat(best_y.1, &c)?;
    Decomposition::assemble(
        p3,
        optimizer,
        [(best_y.0.max(0.0), 0.0, 0), (best_z.max(0.0), 0.0, 0)],
    )
}

fn transpose_yz(q: &[f64], d: Dims, out: &mut [f64]) {
    for x in 0..d.nx {
        for y in 0..d.ny {
            for z in 0..d.nz {
                out[(x * d.nz + z) * d.ny + y] = q[d.at(x, y, z)];
            }
        }
    }
}

/// Sequential parametrization of each transportation slice: free cells are
/// the leading `(rows - 1) x (cols - 1)` block of positive-mass rows and
/// columns; the last column and last row are completed from the marginals.
struct Grid {
    d: Dims,
    resolution: f64,
    slices: Vec<SliceSpec>,
    base: Vec<f64>,
}

struct SliceSpec {
    x: usize,
    rows: Vec<usize>,
    cols: Vec<usize>,
    supply: Vec<f64>,
    demand: Vec<f64>,
}

impl Grid {
    fn new(c: &MarginalConstraints, resolution: f64) -> Self {
        let d = c.dims();
        let pxy = c.xy().probabilities();
        let pxz = c.xz().probabilities();
        let mut base = vec![0.0; d.len()];
        let mut slices = Vec::new();
        for x in 0..d.nx {
            let rows: Vec<usize> = (0..d.ny).filter(|&y| pxy[x * d.ny + y] > 0.0).collect();
            let cols: Vec<usize> = (0..d.nz).filter(|&z| pxz[x * d.nz + z] > 0.0).collect();
            if rows.is_empty() || cols.is_empty() {
                continue;
            }
            if rows.len() == 1 {
                for &z in &cols {
                    base[d.at(x, rows[0], z)] = pxz[x * d.nz + z];
                }
            } else if cols.len() == 1 {
                for &y in &rows {
                    base[d.at(x, y, cols[0])] = pxy[x * d.ny + y];
                }
            } else {
                slices.push(SliceSpec {
                    x,
                    supply: rows.iter().map(|&y| pxy[x * d.ny + y]).collect(),
                    demand: cols.iter().map(|&z| pxz[x * d.nz + z]).collect(),
                    rows,
                    cols,
                });
            }
        }
        Self {
            d,
            resolution,
            slices,
            base,
        }
    }

    fn for_each(&self, mut visit: impl FnMut(&[f64])) {
        let mut q = self.base.clone();
        self.recurse_slice(0, &mut q, &mut visit);
    }

    fn recurse_slice(&self, s: usize, q: &mut Vec<f64>, visit: &mut impl FnMut(&[f64])) {
        let Some(spec) = self.slices.get(s) else {
            visit(q);
            return;
        };
        let mut row_rem = spec.supply.clone();
        let mut col_rem = spec.demand.clone();
        self.recurse_cell(s, spec, 0, 0, &mut row_rem, &mut col_rem, q, visit);
    }

    #[allow(clippy::too_many_arguments)]
    fn recurse_cell(
        &self,
        s: usize,
        spec: &SliceSpec,
        r: usize,
        c: usize,
        row_rem: &mut Vec<f64>,
        col_rem: &mut Vec<f64>,
        q: &mut Vec<f64>,
        visit: &mut impl FnMut(&[f64]),
    ) {
        let (nr, nc) = (spec.rows.len(), spec.cols.len());
        let d = self.d;
        if r == nr - 1 {
            // Last row takes the remaining column demands.
            for (cc, &z) in spec.cols.iter().enumerate() {
                q[d.at(spec.x, spec.rows[r], z)] = col_rem[cc].max(0.0);
            }
            self.recurse_slice(s + 1, q, visit);
            return;
        }
        if c == nc - 1 {
            // Last column of a non-final row takes what is left of the row.
            let rest = row_rem[r];
            let last = col_rem[c];
            if rest > last + 1e-12 {
                return;
            }
            q[d.at(spec.x, spec.rows[r], spec.cols[c])] = rest.max(0.0);
            col_rem[c] = last - rest;
            row_rem[r] = 0.0;
            self.recurse_cell(s, spec, r + 1, 0, row_rem, col_rem, q, visit);
            col_rem[c] = last;
            row_rem[r] = rest;
            return;
        }
        let later: f64 = col_rem[c + 1..].iter().sum();
        let lo = (row_rem[r] - later).max(0.0);
        let hi = row_rem[r].min(col_rem[c]);
        if hi < lo - 1e-12 {
            return;
        }
        let hi = hi.max(lo);
        let steps = ((hi - lo) / self.resolution).floor() as usize;
        let mut values: Vec<f64> = (0..=steps)
            .map(|k| lo + k as f64 * self.resolution)
            .collect();
        if hi - values[values.len() - 1] > 1e-15 {
            values.push(hi);
        }
        let cell = d.at(spec.x, spec.rows[r], spec.cols[c]);
        for t in values {
            q[cell] = t;
            row_rem[r] -= t;
            col_rem[c] -= t;
            self.recurse_cell(s, spec, r, c + 1, row_rem, col_rem, q, visit);
            row_rem[r] += t;
            col_rem[c] += t;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::feasible::build_constraints;
    use crate::table::Variable;

    fn bits3(f: impl Fn(usize, usize, usize) -> f64) -> JointTable {
        JointTable::from_fn(
            ["X", "Y", "Z"]
                .iter()
                .map(|n| Variable::new(*n, 2).unwrap())
                .collect(),
            |s| f(s[0], s[1], s[2]),
        )
        .unwrap()
    }

    fn and_table() -> JointTable {
        bits3(|x, y, z| if z == (x & y) { 0.25 } else { 0.0 })
    }

    fn xor_table() -> JointTable {
        bits3(|x, y, z| if x == (y ^ z) { 0.25 } else { 0.0 })
    }

    #[test]
    fn objective_examples() {
        let xor = xor_table();
        let c = build_constraints(&xor, &["X"], &["Y"], &["Z"]).unwrap();
        let q = FeasiblePoint::new(xor.clone(), &c).unwrap();
        assert!((objective(&q, "X", "Y", "Z").unwrap() - 1.0).abs() < 1e-15);
        let coupling = independent_coupling(&c);
        assert!(objective(&coupling, "X", "Y", "Z").unwrap().abs() < 1e-15);

        let and = and_table();
        let c = build_constraints(&and, &["Z"], &["X"], &["Y"]).unwrap();
        let p3 = and.project(&["Z", "X", "Y"]).unwrap();
        let q = FeasiblePoint::new(p3, &c).unwrap();
        assert!((objective(&q, "Z", "X", "Y").unwrap() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn gradient_vanishes_under_conditional_independence() {
        let c = build_constraints(&xor_table(), &["X"], &["Y"], &["Z"]).unwrap();
        let g = gradient(&independent_coupling(&c));
        assert!(g.iter().all(|v| v.abs() < 1e-15));
    }

    #[test]
    fn xor_has_no_unique_information() {
        let c = build_constraints(&xor_table(), &["X"], &["Y"], &["Z"]).unwrap();
        let r = minimize_cmi(&c, 1e-9).unwrap();
        assert!(r.value.abs() < 1e-9 && r.gap <= 1e-9);
    }

    #[test]
    fn and_has_no_unique_information() {
        let c = build_constraints(&and_table(), &["Z"], &["X"], &["Y"]).unwrap();
        let r = minimize_cmi(&c, 1e-9).unwrap();
        assert!(r.value < 1e-8, "value {}", r.value);
    }

    #[test]
    fn singleton_polytope() {
        // Y = X and Z = X: every slice is a single cell.
        let p = bits3(|x, y, z| if x == y && y == z { 0.5 } else { 0.0 });
        let c = build_constraints(&p, &["X"], &["Y"], &["Z"]).unwrap();
        let r = minimize_cmi(&c, 1e-9).unwrap();
        assert_eq!(r.gap, 0.0);
        assert_eq!(r.value, 0.0);
        assert_eq!(r.optimizer.probabilities(), p.probabilities());
    }

    #[test]
    fn and_decomposition() {
        let d = decompose(&and_table(), &["Z"], &["X"], &["Y"], 1e-9).unwrap();
        assert!((d.si - 0.311).abs() < 1e-3, "si = {}", d.si);
        assert!(d.ui_y.abs() < 1e-6 && d.ui_z.abs() < 1e-6);
        assert!(d.consistency_residual < 1e-6);
    }

    #[test]
    fn xor_decomposition() {
        let d = decompose(&xor_table(), &["X"], &["Y"], &["Z"], 1e-9).unwrap();
        assert!((d.ci - 1.0).abs() < 1e-9);
        assert!(d.si.abs() < 1e-9 && d.ui_y.abs() < 1e-9 && d.ui_z.abs() < 1e-9);
    }

    #[test]
    fn identity_configuration() {
        let p = JointTable::with_shape(&[("Y", 2), ("Z", 2)], vec![0.4, 0.1, 0.2, 0.3]).unwrap();
        let d = decompose(&p, &["Y", "Z"], &["Y"], &["Z"], 1e-9).unwrap();
        let mi = p.mutual_information(&["Y"], &["Z"]).unwrap();
        assert!((d.si - mi).abs() < 1e-9);
        assert!(d.ci.abs() < 1e-9);
    }

    #[test]
    fn oracle_examples() {
        let and = brute_force_decompose(&and_table(), &["Z"], &["X"], &["Y"], 1e-3).unwrap();
        assert!((and.si - 0.311).abs() < 1e-3, "si = {}", and.si);
        let xor = brute_force_decompose(&xor_table(), &["X"], &["Y"], &["Z"], 1e-2).unwrap();
        assert!((xor.ci - 1.0).abs() < 1e-2);

        let p = bits3(|x, y, z| if x == y && y == z { 0.5 } else { 0.0 });
        let a = brute_force_decompose(&p, &["X"], &["Y"], &["Z"], 1e-2).unwrap();
        let b = decompose(&p, &["X"], &["Y"], &["Z"], 1e-9).unwrap();
        assert_eq!(a.optimizer, b.optimizer);
        assert_eq!(a.clamped(), b.clamped());
    }

    #[test]
    fn oracle_dimension_cap() {
        let p = JointTable::from_fn(
            vec![
                Variable::new("X", 3).unwrap(),
                Variable::new("Y", 4).unwrap(),
                Variable::new("Z", 4).unwrap(),
            ],
            |_| 1.0 / 48.0,
        )
        .unwrap();
        assert!(matches!(
            brute_force_decompose(&p, &["X"], &["Y"], &["Z"], 0.1),
            Err(Error::DimensionTooLarge { dims: 27, .. })
        ));
    }

    #[test]
    fn iteration_limit_reports_iterate() {
        let p = bits3(|x, y, z| [0.2, 0.05, 0.1, 0.15, 0.05, 0.25, 0.12, 0.08][x * 4 + y * 2 + z]);
        let c = build_constraints(&p, &["X"], &["Y"], &["Z"]).unwrap();
        let opts = SolverOptions {
            tol: 1e-300,
            max_iter: 3,
            ..SolverOptions::default()
        };
        match minimize_cmi_with(&c, &opts) {
            Err(Error::IterationLimitExceeded(r)) => {
                assert_eq!(r.iterations, 3);
                assert!(!r.converged);
                assert!(r.gap > 0.0);
            }
            other => panic!("expected iteration limit, got {other:?}"),
        }
    }

    #[test]
    fn frank_wolfe_agrees_on_interior_optimum() {
        let p = bits3(|x, y, z| [0.2, 0.05, 0.1, 0.15, 0.05, 0.25, 0.12, 0.08][x * 4 + y * 2 + z]);
        let c = build_constraints(&p, &["X"], &["Y"], &["Z"]).unwrap();
        let fw = SolverOptions {
            tol: 1e-7,
            method: Method::FrankWolfe,
            record_history: true,
            ..SolverOptions::default()
        };
        let a = minimize_cmi_with(&c, &fw).unwrap();
        let b = minimize_cmi(&c, 1e-10).unwrap();
        assert!(a.value - b.value <= 1e-7 + 1e-10);
        assert!(a.value >= b.value - 1e-10);
        assert!(a.history.windows(2).all(|w| w[1] <= w[0]));
    }

    #[test]
    fn golden_section_finds_minimum() {
        let m = golden_section(&mut |t: f64| (t - 0.3).powi(2), 1e-10);
        assert!((m - 0.3).abs() < 1e-9);
        let edge = golden_section(&mut |t: f64| -t, 1e-10);
        assert!(edge > 1.0 - 1e-9);
    }
}
