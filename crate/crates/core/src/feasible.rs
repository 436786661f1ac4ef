//! The polytope of joint distributions over `(X, Y, Z)` that share a given
//! distribution's `(X, Y)` and `(X, Z)` marginals.
//!
//! Tables over `(X, Y, Z)` are stored row-major, so entry `(x, y, z)` lives
//! at `(x * ny + y) * nz + z`. Each `x`-slice of the polytope is a
//! transportation polytope with row sums `P(x, .)` over `Y` and column sums
//! `P(x, .)` over `Z`.

use crate::error::{Error, Result};
use crate::table::{JointTable, Variable};
use crate::transport;

/// Max-norm tolerance on marginal residuals for a certified feasible point.
pub const FEASIBILITY_TOLERANCE: f64 = 1e-8;
/// Allowed disagreement between the two `X` marginals.
pub const CONSISTENCY_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Dims {
    pub nx: usize,
    pub ny: usize,
    pub nz: usize,
}

impl Dims {
    pub fn len(&self) -> usize {
        self.nx * self.ny * self.nz
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    #[inline]
    pub fn at(&self, x: usize, y: usize, z: usize) -> usize {
        (x * self.ny + y) * self.nz + z
    }
}

/// The fixed `(X, Y)` and `(X, Z)` marginals that define the polytope.
#[derive(Debug, Clone, PartialEq)]
pub struct MarginalConstraints {
    xy: JointTable,
    xz: JointTable,
}

impl MarginalConstraints {
    pub fn new(xy: JointTable, xz: JointTable) -> Result<Self> {
        if xy.variables().len() != 2 || xz.variables().len() != 2 {
            return Err(Error::AlphabetMismatch(
                "constraints need two-variable marginals".into(),
            ));
        }
        let (nx, ny) = (xy.shape()[0], xy.shape()[1]);
        let (nx2, nz) = (xz.shape()[0], xz.shape()[1]);
        if nx != nx2 {
            return Err(Error::AlphabetMismatch(format!(
                "target alphabets differ: {nx} vs {nx2}"
            )));
        }
        let px_y = row_sums(xy.probabilities(), nx, ny);
        let px_z = row_sums(xz.probabilities(), nx, nz);
        let deviation = max_abs_diff(&px_y, &px_z);
        if deviation > CONSISTENCY_TOLERANCE {
            return Err(Error::InconsistentMarginals { deviation });
        }
        Ok(Self { xy, xz })
    }

    /// Constraints generated by a table over exactly `(X, Y, Z)`.
    pub fn from_trivariate(p: &JointTable) -> Result<Self> {
        let names = p.names();
        if names.len() != 3 {
            return Err(Error::AlphabetMismatch(format!(
                "expected a table over three variables, got {}",
                names.len()
            )));
        }
        Self::new(
            p.project(&[names[0], names[1]])?,
            p.project(&[names[0], names[2]])?,
        )
    }

    pub fn xy(&self) -> &JointTable {
        &self.xy
    }

    pub fn xz(&self) -> &JointTable {
        &self.xz
    }

    pub fn dims(&self) -> Dims {
        Dims {
            nx: self.xy.shape()[0],
            ny: self.xy.shape()[1],
            nz: self.xz.shape()[1],
        }
    }

    /// The target marginal `P(x)`.
    pub fn px(&self) -> Vec<f64> {
        let d = self.dims();
        row_sums(self.xy.probabilities(), d.nx, d.ny)
    }

    /// Names of the target and the two sources.
    pub fn names(&self) -> [&str; 3] {
        let a = self.xy.names();
        let b = self.xz.names();
        [a[0], a[1], b[1]]
    }

    fn variables(&self) -> Vec<Variable> {
        vec![
            self.xy.variables()[0].clone(),
            self.xy.variables()[1].clone(),
            self.xz.variables()[1].clone(),
        ]
    }

    /// Max absolute deviation of the marginals of a flat `(X, Y, Z)` table.
    pub fn residual(&self, q: &[f64]) -> f64 {
        let d = self.dims();
        let mut qxy = vec![0.0; d.nx * d.ny];
        let mut qxz = vec![0.0; d.nx * d.nz];
        for x in 0..d.nx {
            for y in 0..d.ny {
                for z in 0..d.nz {
                    let p = q[d.at(x, y, z)];
                    qxy[x * d.ny + y] += p;
                    qxz[x * d.nz + z] += p;
                }
            }
        }
        max_abs_diff(&qxy, self.xy.probabilities()).max(max_abs_diff(&qxz, self.xz.probabilities()))
    }

    /// Number of free coordinates per non-empty `x`-slice: `(|Y_x| - 1)(|Z_x| - 1)`
    /// counting only states of positive mass.
    pub fn slice_dimensions(&self) -> Vec<usize> {
        let d = self.dims();
        (0..d.nx)
            .map(|x| {
                let ys = (0..d.ny)
                    .filter(|&y| self.xy.probabilities()[x * d.ny + y] > 0.0)
                    .count();
                let zs = (0..d.nz)
                    .filter(|&z| self.xz.probabilities()[x * d.nz + z] > 0.0)
                    .count();
                ys.saturating_sub(1) * zs.saturating_sub(1)
            })
            .collect()
    }
}

/// Marginals of `p` for the target and two (possibly composite, possibly
/// overlapping) sources.
pub fn build_constraints(
    p: &JointTable,
    target: &[&str],
    src1: &[&str],
    src2: &[&str],
) -> Result<MarginalConstraints> {
    MarginalConstraints::from_trivariate(&trivariate(p, target, src1, src2)?)
}

/// The joint distribution of `(target, src1, src2)` as a three-variable
/// table. Composite arguments are grouped; arguments may share members.
pub fn trivariate(
    p: &JointTable,
    target: &[&str],
    src1: &[&str],
    src2: &[&str],
) -> Result<JointTable> {
    p.compose(&[target, src1, src2])
}

/// A table certified to lie in the polytope.
#[derive(Debug, Clone, PartialEq)]
pub struct FeasiblePoint {
    table: JointTable,
    constraints: MarginalConstraints,
    residual: f64,
}

impl FeasiblePoint {
    pub fn new(table: JointTable, constraints: &MarginalConstraints) -> Result<Self> {
        let (ok, residual) = is_feasible(&table, constraints, FEASIBILITY_TOLERANCE)?;
        if !ok {
            return Err(Error::MarginalMismatch {
                deviation: residual,
            });
        }
        Ok(Self {
            table,
            constraints: constraints.clone(),
            residual,
        })
    }

    /// Wraps a flat `(X, Y, Z)` vector produced internally.
    pub(crate) fn from_flat(q: Vec<f64>, constraints: &MarginalConstraints) -> Result<Self> {
        let table = JointTable::new(constraints.variables(), q)?;
        Self::new(table, constraints)
    }

    pub fn table(&self) -> &JointTable {
        &self.table
    }

    pub fn probabilities(&self) -> &[f64] {
        self.table.probabilities()
    }

    pub fn constraints(&self) -> &MarginalConstraints {
        &self.constraints
    }

    pub fn residual(&self) -> f64 {
        self.residual
    }

    pub fn into_table(self) -> JointTable {
        self.table
    }
}

/// `Q(x, y, z) = P(x, y) P(x, z) / P(x)`, zero on empty slices.
pub fn independent_coupling(c: &MarginalConstraints) -> FeasiblePoint {
    let d = c.dims();
    let px = c.px();
    let pxy = c.xy.probabilities();
    let pxz = c.xz.probabilities();
    let mut q = vec![0.0; d.len()];
    for x in 0..d.nx {
        if px[x] <= 0.0 {
            continue;
        }
        for y in 0..d.ny {
            for z in 0..d.nz {
                q[d.at(x, y, z)] = pxy[x * d.ny + y] * pxz[x * d.nz + z] / px[x];
            }
        }
    }
    let residual = c.residual(&q);
    let table =
        JointTable::new(c.variables(), q).expect("coupling of valid marginals is a valid table");
    FeasiblePoint {
        table,
        constraints: c.clone(),
        residual,
    }
}

/// Whether `q` matches the constraint marginals to within `tol` in max norm.
/// The residual is returned either way.
pub fn is_feasible(q: &JointTable, c: &MarginalConstraints, tol: f64) -> Result<(bool, f64)> {
    let d = c.dims();
    let shape = q.shape();
    if shape != [d.nx, d.ny, d.nz] {
        return Err(Error::AlphabetMismatch(format!(
            "table shape {shape:?} vs constraints {:?}",
            [d.nx, d.ny, d.nz]
        )));
    }
    let residual = c.residual(q.probabilities());
    Ok((residual <= tol, residual))
}

/// Linear minimization oracle: a vertex `V` of the polytope minimizing
/// `sum gradient * V`. Each `x`-slice is an independent transportation
/// problem solved exactly.
pub fn lmo(gradient: &[f64], c: &MarginalConstraints) -> Result<FeasiblePoint> {
    let q = lmo_flat(gradient, c)?;
    FeasiblePoint::from_flat(q, c)
}

pub(crate) fn lmo_flat(gradient: &[f64], c: &MarginalConstraints) -> Result<Vec<f64>> {
    let d = c.dims();
    if gradient.len() != d.len() {
        return Err(Error::AlphabetMismatch(format!(
            "gradient has {} entries, expected {}",
            gradient.len(),
            d.len()
        )));
    }
    let pxy = c.xy.probabilities();
    let pxz = c.xz.probabilities();
    let mut q = vec![0.0; d.len()];
    let slice = d.ny * d.nz;
    for x in 0..d.nx {
        let supply = &pxy[x * d.ny..(x + 1) * d.ny];
        let demand = &pxz[x * d.nz..(x + 1) * d.nz];
        let plan = transport::solve(&gradient[x * slice..(x + 1) * slice], supply, demand)?;
        q[x * slice..(x + 1) * slice].copy_from_slice(&plan);
    }
    Ok(q)
}

/// Lifts `q` to a table over `(X, Y, Z, Z')` with
/// `Q'(x, y, z, z') = Q(x, y, z) P'(z' | x, z)`.
///
/// The result matches `p_full`'s `(X, Y)` and `(X, Z, Z')` marginals and makes
/// `Z'` conditionally independent of `Y` given `(X, Z)`.
pub fn ci_lift(q: &FeasiblePoint, p_full: &JointTable) -> Result<JointTable> {
    let (d, k) = check_lift_base(q, p_full, [0, 1, 2])?;
    let names = p_full.names();
    // P(x, z, z') laid out as (x, z, z').
    let pxzz = p_full.project(&[names[0], names[2], names[3]])?;
    let pxzz = pxzz.probabilities();
    let qv = q.probabilities();
    let mut out = vec![0.0; d.len() * k];
    for x in 0..d.nx {
        for z in 0..d.nz {
            let base = (x * d.nz + z) * k;
            let pxz: f64 = pxzz[base..base + k].iter().sum();
            if pxz <= 0.0 {
                continue;
            }
            for y in 0..d.ny {
                let qxyz = qv[d.at(x, y, z)];
                for zp in 0..k {
                    out[d.at(x, y, z) * k + zp] = qxyz * pxzz[base + zp] / pxz;
                }
            }
        }
    }
    JointTable::new(p_full.variables().to_vec(), out)
}

/// Lifts `q` to a table over `(X, Y, Y', Z)` with
/// `Q'(x, y, y', z) = Q(x, y, z) P'(x, y, y') / P(x, y)`.
///
/// The result matches `p_full`'s `(X, Y, Y')` and `(X, Z)` marginals and makes
/// `Y'` conditionally independent of `Z` given `(X, Y)`.
pub fn si_lift(q: &FeasiblePoint, p_full: &JointTable) -> Result<JointTable> {
    let (d, k) = check_lift_base(q, p_full, [0, 1, 3])?;
    let names = p_full.names();
    let pxyy = p_full.project(&[names[0], names[1], names[2]])?;
    let pxyy = pxyy.probabilities();
    let qv = q.probabilities();
    // Output layout (x, y, y', z).
    let mut out = vec![0.0; d.len() * k];
    for x in 0..d.nx {
        for y in 0..d.ny {
            let base = (x * d.ny + y) * k;
            let pxy: f64 = pxyy[base..base + k].iter().sum();
            if pxy <= 0.0 {
                continue;
            }
            for yp in 0..k {
                let w = pxyy[base + yp] / pxy;
                for z in 0..d.nz {
                    out[((x * d.ny + y) * k + yp) * d.nz + z] = qv[d.at(x, y, z)] * w;
                }
            }
        }
    }
    JointTable::new(p_full.variables().to_vec(), out)
}

/// Checks that `p_full` has four variables, that the variables at `base`
/// carry `q`'s alphabets, and that `q` is feasible for their marginals.
/// Returns `q`'s dims and the extra variable's alphabet size.
fn check_lift_base(
    q: &FeasiblePoint,
    p_full: &JointTable,
    base: [usize; 3],
) -> Result<(Dims, usize)> {
    let shape = p_full.shape();
    if shape.len() != 4 {
        return Err(Error::AlphabetMismatch(format!(
            "lift needs a four-variable table, got {}",
            shape.len()
        )));
    }
    let d = q.constraints().dims();
    if [shape[base[0]], shape[base[1]], shape[base[2]]] != [d.nx, d.ny, d.nz] {
        return Err(Error::AlphabetMismatch(format!(
            "table shape {shape:?} does not extend {:?}",
            [d.nx, d.ny, d.nz]
        )));
    }
    let extra = (0..4)
        .find(|i| !base.contains(i))
        .expect("one extra variable");
    let names = p_full.names();
    let p3 = p_full.project(&[names[base[0]], names[base[1]], names[base[2]]])?;
    let c = MarginalConstraints::from_trivariate(&p3)?;
    let deviation = c.residual(q.probabilities());
    if deviation > FEASIBILITY_TOLERANCE {
        return Err(Error::MarginalMismatch { deviation });
    }
    Ok((d, shape[extra]))
}

fn row_sums(flat: &[f64], rows: usize, cols: usize) -> Vec<f64> {
    (0..rows)
        .map(|r| flat[r * cols..(r + 1) * cols].iter().sum())
        .collect()
}

fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}
