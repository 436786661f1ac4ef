//! Dense joint probability tables and the classical information measures on
//! them. Every quantity is reported in bits.
//!
//! Variables are addressed by name. Subsets of variables are passed as
//! `&[&str]`; a subset with several members acts as one composite variable.

use std::collections::HashSet;
use std::fmt;

use crate::error::{Error, Result};

/// Entries below this are treated as clamped rounding noise.
pub const NEGATIVE_MASS_TOLERANCE: f64 = 1e-12;
/// Allowed deviation of the raw total mass from 1.
pub const NORMALIZATION_TOLERANCE: f64 = 1e-6;
/// Conditioning states with at most this much mass are skipped.
pub const CONDITIONING_CUTOFF: f64 = 1e-15;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Variable {
    name: String,
    alphabet_size: usize,
}

impl Variable {
    pub fn new(name: impl Into<String>, alphabet_size: usize) -> Result<Self> {
        let name = name.into();
        if name.is_empty() {
            return Err(Error::InvalidVariable("empty name".into()));
        }
        if alphabet_size == 0 {
            return Err(Error::InvalidVariable(format!(
                "`{name}` has an empty alphabet"
            )));
        }
        Ok(Self {
            name,
            alphabet_size,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn alphabet_size(&self) -> usize {
        self.alphabet_size
    }
}

/// Checks a raw probability vector and rescales it to sum exactly to one.
///
/// Entries in `[-1e-12, 0)` are clamped to zero; anything more negative is
/// rejected, as is a total mass further than `1e-6` from one.
pub fn validate_normalize(raw: &[f64]) -> Result<Vec<f64>> {
    let mut out = Vec::with_capacity(raw.len());
    for (index, &value) in raw.iter().enumerate() {
        if !value.is_finite() || value < -NEGATIVE_MASS_TOLERANCE {
            return Err(Error::NegativeMass { index, value });
        }
        out.push(value.max(0.0));
    }
    let sum: f64 = out.iter().sum();
    if sum.is_nan() || (sum - 1.0).abs() > NORMALIZATION_TOLERANCE {
        return Err(Error::NotNormalized { sum });
    }
    for p in &mut out {
        *p /= sum;
    }
    Ok(out)
}

/// Shannon entropy in bits of a (not necessarily normalized) mass vector,
/// using `0 log 0 = 0`.
pub fn entropy_bits(masses: &[f64]) -> f64 {
    let h: f64 = masses
        .iter()
        .filter(|&&p| p > 0.0)
        .map(|&p| -p * p.log2())
        .sum();
    h.max(0.0)
}

/// A probability table over an ordered tuple of finite variables, stored
/// row-major with the last variable varying fastest.
#[derive(Debug, Clone, PartialEq)]
pub struct JointTable {
    vars: Vec<Variable>,
    probs: Vec<f64>,
}

impl JointTable {
    pub fn new(vars: Vec<Variable>, raw: Vec<f64>) -> Result<Self> {
        check_unique_names(&vars)?;
        let expected = state_count(&vars);
        if raw.len() != expected {
            return Err(Error::ShapeMismatch {
                expected,
                got: raw.len(),
            });
        }
        let probs = validate_normalize(&raw)?;
        Ok(Self { vars, probs })
    }

    /// Builds a table by evaluating `f` on every joint state.
    pub fn from_fn(vars: Vec<Variable>, mut f: impl FnMut(&[usize]) -> f64) -> Result<Self> {
        let shape: Vec<usize> = vars.iter().map(Variable::alphabet_size).collect();
        let raw = StateIter::new(&shape).map(|s| f(&s)).collect();
        Self::new(vars, raw)
    }

    /// Convenience constructor from `(name, alphabet_size)` pairs.
    pub fn with_shape(spec: &[(&str, usize)], raw: Vec<f64>) -> Result<Self> {
        let vars = spec
            .iter()
            .map(|&(n, k)| Variable::new(n, k))
            .collect::<Result<Vec<_>>>()?;
        Self::new(vars, raw)
    }

    pub fn variables(&self) -> &[Variable] {
        &self.vars
    }

    pub fn names(&self) -> Vec<&str> {
        self.vars.iter().map(Variable::name).collect()
    }

    pub fn shape(&self) -> Vec<usize> {
        self.vars.iter().map(Variable::alphabet_size).collect()
    }

    pub fn probabilities(&self) -> &[f64] {
        &self.probs
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    pub fn index_of(&self, name: &str) -> Result<usize> {
        self.vars
            .iter()
            .position(|v| v.name == name)
            .ok_or_else(|| Error::UnknownVariable(name.to_string()))
    }

    /// Probability of one joint state.
    pub fn prob(&self, state: &[usize]) -> f64 {
        self.probs[flat_index(&self.shape(), state)]
    }

    /// Iterates over `(state, probability)` in storage order.
    pub fn iter(&self) -> impl Iterator<Item = (Vec<usize>, f64)> + '_ {
        StateIter::new(&self.shape()).zip(self.probs.iter().copied())
    }

    fn resolve(&self, names: &[&str]) -> Result<Vec<usize>> {
        names.iter().map(|n| self.index_of(n)).collect()
    }

    /// Sums out every variable not in `keep`. Kept variables retain the order
    /// they have in `self`.
    pub fn marginalize(&self, keep: &[&str]) -> Result<JointTable> {
        if keep.is_empty() {
            return Err(Error::OverlappingArguments(
                "marginalize needs at least one variable".into(),
            ));
        }
        let mut idx = self.resolve(keep)?;
        ensure_distinct(&idx, keep)?;
        idx.sort_unstable();
        self.project_indices(&idx)
    }

    /// Marginal over `order`, with variables laid out in exactly that order.
    pub fn project(&self, order: &[&str]) -> Result<JointTable> {
        let idx = self.resolve(order)?;
        ensure_distinct(&idx, order)?;
        if idx.is_empty() {
            return Err(Error::OverlappingArguments("empty projection".into()));
        }
        self.project_indices(&idx)
    }

    fn project_indices(&self, idx: &[usize]) -> Result<JointTable> {
        let vars: Vec<Variable> = idx.iter().map(|&i| self.vars[i].clone()).collect();
        let probs = self.marginal_masses(idx);
        Ok(JointTable { vars, probs })
    }

    /// Marginal masses over the variables at `idx` (in that order, repeats
    /// not allowed), flattened row-major.
    pub(crate) fn marginal_masses(&self, idx: &[usize]) -> Vec<f64> {
        let shape = self.shape();
        let sub_shape: Vec<usize> = idx.iter().map(|&i| shape[i]).collect();
        let sub_strides = strides(&sub_shape);
        let mut out = vec![0.0; sub_shape.iter().product()];
        for (state, p) in StateIter::new(&shape).zip(&self.probs) {
            if *p == 0.0 {
                continue;
            }
            let k: usize = idx
                .iter()
                .zip(&sub_strides)
                .map(|(&i, &s)| state[i] * s)
                .sum();
            out[k] += p;
        }
        out
    }

    /// Joint distribution of a tuple of composite variables. Blocks may
    /// share members; each block becomes one variable whose states enumerate
    /// the member states row-major in the order listed.
    pub fn compose(&self, blocks: &[&[&str]]) -> Result<JointTable> {
        if blocks.is_empty() {
            return Err(Error::OverlappingArguments("no blocks given".into()));
        }
        let shape = self.shape();
        let mut block_idx = Vec::with_capacity(blocks.len());
        let mut vars = Vec::with_capacity(blocks.len());
        let mut taken = HashSet::new();
        for block in blocks {
            if block.is_empty() {
                return Err(Error::OverlappingArguments("empty block".into()));
            }
            let idx = self.resolve(block)?;
            ensure_distinct(&idx, block)?;
            let size = idx.iter().map(|&i| shape[i]).product();
            let mut name = block.join(",");
            while !taken.insert(name.clone()) {
                name.push('\'');
            }
            vars.push(Variable::new(name, size)?);
            block_idx.push(idx);
        }
        let out_shape: Vec<usize> = vars.iter().map(Variable::alphabet_size).collect();
        let out_strides = strides(&out_shape);
        let mut probs = vec![0.0; out_shape.iter().product()];
        for (state, p) in StateIter::new(&shape).zip(&self.probs) {
            if *p == 0.0 {
                continue;
            }
            let mut k = 0;
            for (idx, stride) in block_idx.iter().zip(&out_strides) {
                let mut code = 0;
                for &i in idx {
                    code = code * shape[i] + state[i];
                }
                k += code * stride;
            }
            probs[k] += p;
        }
        Ok(JointTable { vars, probs })
    }

    /// Regroups the variables into composite variables. `groups` must be a
    /// partition of the table's variables; the result is a relabeling.
    pub fn group_variables(&self, groups: &[&[&str]]) -> Result<JointTable> {
        let mut seen = HashSet::new();
        for g in groups {
            if g.is_empty() {
                return Err(Error::NotAPartition("empty group".into()));
            }
            for name in *g {
                self.index_of(name)?;
                if !seen.insert(*name) {
                    return Err(Error::NotAPartition(format!("`{name}` appears twice")));
                }
            }
        }
        if seen.len() != self.vars.len() {
            let missing: Vec<&str> = self
                .names()
                .into_iter()
                .filter(|n| !seen.contains(n))
                .collect();
            return Err(Error::NotAPartition(format!(
                "not covered: {}",
                missing.join(", ")
            )));
        }
        self.compose(groups)
    }

    /// Appends a variable that is a deterministic function of the existing
    /// state.
    pub fn with_derived(&self, var: Variable, f: impl Fn(&[usize]) -> usize) -> Result<JointTable> {
        let k = var.alphabet_size();
        let mut vars = self.vars.clone();
        vars.push(var);
        check_unique_names(&vars)?;
        let mut probs = vec![0.0; self.probs.len() * k];
        for (flat, (state, p)) in self.iter().enumerate() {
            let value = f(&state);
            if value >= k {
                return Err(Error::InvalidVariable(format!(
                    "derived value {value} outside alphabet of size {k}"
                )));
            }
            probs[flat * k + value] = p;
        }
        Ok(JointTable { vars, probs })
    }

    /// Entropy of the full table.
    pub fn entropy(&self) -> f64 {
        entropy_bits(&self.probs)
    }

    /// Entropy of the marginal over `vars` (empty subset has entropy 0).
    pub fn entropy_of(&self, vars: &[&str]) -> Result<f64> {
        if vars.is_empty() {
            return Ok(0.0);
        }
        let idx = self.resolve(vars)?;
        ensure_distinct(&idx, vars)?;
        Ok(entropy_bits(&self.marginal_masses(&idx)))
    }

    /// `H(target | given)` as the `p(given)`-weighted average of the
    /// conditional entropies.
    pub fn conditional_entropy(&self, target: &[&str], given: &[&str]) -> Result<f64> {
        let (t, g) = self.disjoint2(target, given)?;
        let nt: usize = self.size_of(&t);
        let joint = self.marginal_masses(&concat(&[&g, &t]));
        let h = joint
            .chunks(nt)
            .map(|row| {
                let pg: f64 = row.iter().sum();
                if pg <= CONDITIONING_CUTOFF {
                    0.0
                } else {
                    let h: f64 = row
                        .iter()
                        .filter(|&&p| p > 0.0)
                        .map(|&p| -p * (p / pg).log2())
                        .sum();
                    h
                }
            })
            .sum::<f64>();
        Ok(h.max(0.0))
    }

    /// `MI(a : b) = H(a) + H(b) - H(a, b)`.
    pub fn mutual_information(&self, a: &[&str], b: &[&str]) -> Result<f64> {
        let (ia, ib) = self.disjoint2(a, b)?;
        let ha = entropy_bits(&self.marginal_masses(&ia));
        let hb = entropy_bits(&self.marginal_masses(&ib));
        let hab = entropy_bits(&self.marginal_masses(&concat(&[&ia, &ib])));
        Ok(ha + hb - hab)
    }

    /// `MI(a : b | c)` as the `p(c)`-weighted sum of per-state mutual
    /// informations. An empty `c` reduces to `MI(a : b)`.
    pub fn conditional_mutual_information(
        &self,
        a: &[&str],
        b: &[&str],
        c: &[&str],
    ) -> Result<f64> {
        let (ia, ib, ic) = self.disjoint3(a, b, c)?;
        let (na, nb) = (self.size_of(&ia), self.size_of(&ib));
        let joint = self.marginal_masses(&concat(&[&ic, &ia, &ib]));
        Ok(joint
            .chunks(na * nb)
            .map(|slice| slice_mi(slice, na, nb))
            .sum())
    }

    /// `CoI(a; b; c) = MI(a : b) - MI(a : b | c)`.
    pub fn coinformation(&self, a: &[&str], b: &[&str], c: &[&str]) -> Result<f64> {
        Ok(self.mutual_information(a, b)? - self.conditional_mutual_information(a, b, c)?)
    }

    /// `CoI(a; b; c | given)`: the `p(given)`-weighted sum of the
    /// coinformations of the conditional tables.
    pub fn conditional_coinformation(
        &self,
        a: &[&str],
        b: &[&str],
        c: &[&str],
        given: &[&str],
    ) -> Result<f64> {
        let (ia, ib, ic) = self.disjoint3(a, b, c)?;
        let ig = self.resolve(given)?;
        if ig
            .iter()
            .any(|i| ia.contains(i) || ib.contains(i) || ic.contains(i))
        {
            return Err(Error::OverlappingArguments(
                "conditioning set overlaps the arguments".into(),
            ));
        }
        ensure_distinct(&ig, given)?;
        let (na, nb, nc) = (self.size_of(&ia), self.size_of(&ib), self.size_of(&ic));
        let joint = self.marginal_masses(&concat(&[&ig, &ia, &ib, &ic]));
        let mut total = 0.0;
        for slice in joint.chunks(na * nb * nc) {
            let pg: f64 = slice.iter().sum();
            if pg <= CONDITIONING_CUTOFF {
                continue;
            }
            // CoI = MI(a:b) - MI(a:b|c) on the slice, masses unnormalized.
            let mut ab = vec![0.0; na * nb];
            let mut cab = vec![0.0; nc * na * nb];
            for i in 0..na {
                for j in 0..nb {
                    for k in 0..nc {
                        let p = slice[(i * nb + j) * nc + k];
                        ab[i * nb + j] += p;
                        cab[(k * na + i) * nb + j] += p;
                    }
                }
            }
            let mi_ab = slice_mi(&ab, na, nb);
            let cmi: f64 = cab.chunks(na * nb).map(|s| slice_mi(s, na, nb)).sum();
            total += mi_ab - cmi;
        }
        Ok(total)
    }

    fn size_of(&self, idx: &[usize]) -> usize {
        idx.iter().map(|&i| self.vars[i].alphabet_size).product()
    }

    fn disjoint2(&self, a: &[&str], b: &[&str]) -> Result<(Vec<usize>, Vec<usize>)> {
        let ia = self.resolve(a)?;
        let ib = self.resolve(b)?;
        check_disjoint(&[(&ia, a), (&ib, b)])?;
        Ok((ia, ib))
    }

    fn disjoint3(
        &self,
        a: &[&str],
        b: &[&str],
        c: &[&str],
    ) -> Result<(Vec<usize>, Vec<usize>, Vec<usize>)> {
        let ia = self.resolve(a)?;
        let ib = self.resolve(b)?;
        let ic = self.resolve(c)?;
        check_disjoint(&[(&ia, a), (&ib, b), (&ic, c)])?;
        Ok((ia, ib, ic))
    }
}

impl fmt::Display for JointTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{}", self.names().join(" "))?;
        for (state, p) in self.iter() {
            if p > 0.0 {
                let s: Vec<String> = state.iter().map(usize::to_string).collect();
                writeln!(f, "{}  {p}", s.join(" "))?;
            }
        }
        Ok(())
    }
}

/// `p(c) * MI(a:b | c)` for one unnormalized `na x nb` slice of mass `p(c)`.
fn slice_mi(slice: &[f64], na: usize, nb: usize) -> f64 {
    let total: f64 = slice.iter().sum();
    if total <= CONDITIONING_CUTOFF {
        return 0.0;
    }
    let mut pa = vec![0.0; na];
    let mut pb = vec![0.0; nb];
    for i in 0..na {
        for j in 0..nb {
            let p = slice[i * nb + j];
            pa[i] += p;
            pb[j] += p;
        }
    }
    let mut mi = 0.0;
    for i in 0..na {
        for j in 0..nb {
            let p = slice[i * nb + j];
            if p > 0.0 {
                mi += p * (p * total / (pa[i] * pb[j])).log2();
            }
        }
    }
    mi
}

fn check_unique_names(vars: &[Variable]) -> Result<()> {
    let mut seen = HashSet::new();
    for v in vars {
        if !seen.insert(v.name()) {
            return Err(Error::InvalidVariable(format!(
                "duplicate variable name `{}`",
                v.name()
            )));
        }
    }
    Ok(())
}

fn ensure_distinct(idx: &[usize], names: &[&str]) -> Result<()> {
    let set: HashSet<_> = idx.iter().collect();
    if set.len() != idx.len() {
        return Err(Error::OverlappingArguments(format!(
            "repeated variable in [{}]",
            names.join(",")
        )));
    }
    Ok(())
}

fn check_disjoint(args: &[(&Vec<usize>, &[&str])]) -> Result<()> {
    let mut seen = HashSet::new();
    for (idx, names) in args {
        ensure_distinct(idx, names)?;
        for i in idx.iter() {
            if !seen.insert(*i) {
                let all: Vec<String> = args.iter().map(|(_, n)| n.join(",")).collect();
                return Err(Error::OverlappingArguments(format!(
                    "arguments ({}) share a variable",
                    all.join(" | ")
                )));
            }
        }
    }
    Ok(())
}

fn concat(parts: &[&[usize]]) -> Vec<usize> {
    parts.iter().flat_map(|p| p.iter().copied()).collect()
}

fn state_count(vars: &[Variable]) -> usize {
    vars.iter().map(Variable::alphabet_size).product()
}

pub(crate) fn strides(shape: &[usize]) -> Vec<usize> {
    let mut s = vec![1; shape.len()];
    for i in (0..shape.len().saturating_sub(1)).rev() {
        s[i] = s[i + 1] * shape[i + 1];
    }
    s
}

pub(crate) fn flat_index(shape: &[usize], state: &[usize]) -> usize {
    state.iter().zip(shape).fold(0, |acc, (&s, &n)| acc * n + s)
}

/// Odometer over all joint states of a shape, last coordinate fastest.
pub struct StateIter {
    shape: Vec<usize>,
    next: Option<Vec<usize>>,
}

impl StateIter {
    pub fn new(shape: &[usize]) -> Self {
        let next = if shape.iter().all(|&n| n > 0) {
            Some(vec![0; shape.len()])
        } else {
            None
        };
        Self {
            shape: shape.to_vec(),
            next,
        }
    }
}

impl Iterator for StateIter {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        let current = self.next.take()?;
        let mut succ = current.clone();
        for i in (0..succ.len()).rev() {
            succ[i] += 1;
            if succ[i] < self.shape[i] {
                self.next = Some(succ);
                return Some(current);
            }
            succ[i] = 0;
        }
        Some(current)
    }
}
