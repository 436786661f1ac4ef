//! The partial-information lattice of antichains over `n <= 4` sources.
//!
//! An antichain is a family of non-empty source subsets none of which
//! contains another. `a ⪯ b` holds when every member of `b` contains some
//! member of `a`. A redundancy function `I_cap` on the nodes determines the
//! partial information `I_partial` through Möbius inversion:
//! `I_cap(α) = Σ_{β ⪯ α} I_partial(β)`.

use std::cmp::{Ordering, Reverse};
use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::solver::decompose;
use crate::table::{JointTable, Variable};

/// Largest supported number of sources.
pub const MAX_SOURCES: usize = 4;

/// A non-empty set of source indices from `1..=4`, stored as a bit mask.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SourceSet(u8);

impl SourceSet {
    pub fn new(indices: &[usize]) -> Result<Self> {
        let mut mask = 0u8;
        for &i in indices {
            if !(1..=MAX_SOURCES).contains(&i) {
                return Err(Error::InvalidAntichain(format!(
                    "source index {i} outside 1..={MAX_SOURCES}"
                )));
            }
            mask |= 1 << (i - 1);
        }
        if mask == 0 {
            return Err(Error::InvalidAntichain("empty source set".into()));
        }
        Ok(Self(mask))
    }

    fn from_mask(mask: u8) -> Self {
        debug_assert!(mask != 0 && mask < 1 << MAX_SOURCES);
        Self(mask)
    }

    /// Source indices in increasing order.
    pub fn indices(self) -> Vec<usize> {
        (0..MAX_SOURCES)
            .filter(|b| self.0 >> b & 1 == 1)
            .map(|b| b + 1)
            .collect()
    }

    pub fn size(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_subset(self, other: SourceSet) -> bool {
        self.0 & !other.0 == 0
    }

    /// Largest source index in the set.
    pub fn max_index(self) -> usize {
        8 - self.0.leading_zeros() as usize
    }

    /// Every non-empty subset of `{1..n}` in canonical order.
    pub fn all(n: usize) -> Vec<SourceSet> {
        let mut sets: Vec<_> = (1..1u8 << n).map(SourceSet::from_mask).collect();
        sets.sort();
        sets
    }
}

/// Smaller sets first, then lexicographic on the sorted indices.
impl Ord for SourceSet {
    fn cmp(&self, other: &Self) -> Ordering {
        self.size()
            .cmp(&other.size())
            .then_with(|| self.indices().cmp(&other.indices()))
    }
}

impl PartialOrd for SourceSet {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for SourceSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.indices().iter().try_for_each(|i| write!(f, "{i}"))
    }
}

/// A node of the lattice. Members are kept in canonical order, so equal
/// antichains compare equal.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Antichain(Vec<SourceSet>);

impl Antichain {
    pub fn new(mut members: Vec<SourceSet>) -> Result<Self> {
        if members.is_empty() {
            return Err(Error::InvalidAntichain("no members".into()));
        }
        members.sort();
        for (i, a) in members.iter().enumerate() {
            for b in &members[i + 1..] {
                if a.is_subset(*b) {
                    return Err(Error::InvalidAntichain(format!("{a} is contained in {b}")));
                }
            }
        }
        Ok(Self(members))
    }

    /// Builds an antichain from index lists, e.g. `&[&[1], &[2, 3]]`.
    pub fn from_indices(members: &[&[usize]]) -> Result<Self> {
        members
            .iter()
            .map(|m| SourceSet::new(m))
            .collect::<Result<_>>()
            .and_then(Self::new)
    }

    pub fn members(&self) -> &[SourceSet] {
        &self.0
    }

    /// Largest source index mentioned.
    pub fn max_index(&self) -> usize {
        self.0.iter().map(|s| s.max_index()).max().unwrap_or(0)
    }

    /// `self ⪯ other`: every member of `other` contains a member of `self`.
    pub fn below(&self, other: &Antichain) -> bool {
        other
            .0
            .iter()
            .all(|b| self.0.iter().any(|a| a.is_subset(*b)))
    }
}

pub fn below(a: &Antichain, b: &Antichain) -> bool {
    a.below(b)
}

impl fmt::Display for Antichain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, m) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(";")?;
            }
            write!(f, "{m}")?;
        }
        f.write_str("}")
    }
}

/// Parses the display form, e.g. `{1;23}`. Braces are optional.
impl FromStr for Antichain {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let body = s.trim().trim_start_matches('{').trim_end_matches('}');
        body.split(';')
            .map(|m| {
                let digits = m
                    .trim()
                    .chars()
                    .map(|c| c.to_digit(10).map(|d| d as usize))
                    .collect::<Option<Vec<_>>>()
                    .ok_or_else(|| Error::InvalidAntichain(format!("bad member `{m}` in `{s}`")))?;
                SourceSet::new(&digits)
            })
            .collect::<Result<_>>()
            .and_then(Antichain::new)
    }
}

fn check_n(n: usize) -> Result<()> {
    if (1..=MAX_SOURCES).contains(&n) {
        Ok(())
    } else {
        Err(Error::NTooLarge(n))
    }
}

/// All antichains over `n` sources, from the top of the lattice down: by
/// decreasing down-set size, ties broken by canonical order.
pub fn antichains(n: usize) -> Result<Vec<Antichain>> {
    Ok(PiLattice::new(n)?.nodes)
}

fn enumerate(n: usize) -> Vec<Antichain> {
    let sets = SourceSet::all(n);
    (1u32..1 << sets.len())
        .filter_map(|family| {
            let members: Vec<_> = sets
                .iter()
                .enumerate()
                .filter(|(i, _)| family >> i & 1 == 1)
                .map(|(_, s)| *s)
                .collect();
            Antichain::new(members).ok()
        })
        .collect()
}

/// The lattice for a fixed number of sources, with the strict down-set of
/// every node precomputed.
#[derive(Debug, Clone)]
pub struct PiLattice {
    n: usize,
    nodes: Vec<Antichain>,
    index: HashMap<Antichain, usize>,
    strictly_below: Vec<Vec<usize>>,
}

impl PiLattice {
    pub fn new(n: usize) -> Result<Self> {
        check_n(n)?;
        let mut nodes = enumerate(n);
        let down_size =
            |a: &Antichain, all: &[Antichain]| all.iter().filter(|b| b.below(a)).count();
        let sizes: HashMap<Antichain, usize> = nodes
            .iter()
            .map(|a| (a.clone(), down_size(a, &nodes)))
            .collect();
        nodes.sort_by_key(|a| (Reverse(sizes[a]), a.clone()));
        let index = nodes
            .iter()
            .cloned()
            .enumerate()
            .map(|(i, a)| (a, i))
            .collect();
        let strictly_below = nodes
            .iter()
            .map(|a| {
                (0..nodes.len())
                    .filter(|&j| nodes[j] != *a && nodes[j].below(a))
                    .collect()
            })
            .collect();
        Ok(Self {
            n,
            nodes,
            index,
            strictly_below,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn nodes(&self) -> &[Antichain] {
        &self.nodes
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn position(&self, a: &Antichain) -> Option<usize> {
        self.index.get(a).copied()
    }

    /// `nodes[i] ⪯ nodes[j]`.
    pub fn leq(&self, i: usize, j: usize) -> bool {
        i == j || self.strictly_below[j].binary_search(&i).is_ok()
    }

    /// Indices of the nodes strictly below `nodes[i]`.
    pub fn strictly_below(&self, i: usize) -> &[usize] {
        &self.strictly_below[i]
    }

    /// Nodes in an order where everything below a node comes before it.
    fn bottom_up(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.nodes.len()).rev()
    }

    fn values(&self, f: &RedundancyAssignment) -> Result<Vec<f64>> {
        self.nodes
            .iter()
            .map(|a| f.get(a).ok_or_else(|| Error::MissingNode(a.to_string())))
            .collect()
    }

    fn assignment(&self, values: Vec<f64>) -> RedundancyAssignment {
        self.nodes.iter().cloned().zip(values).collect()
    }
}

/// A value in bits for each antichain.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RedundancyAssignment(BTreeMap<Antichain, f64>);

impl RedundancyAssignment {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, a: Antichain, bits: f64) -> Option<f64> {
        self.0.insert(a, bits)
    }

    pub fn get(&self, a: &Antichain) -> Option<f64> {
        self.0.get(a).copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Antichain, f64)> {
        self.0.iter().map(|(a, v)| (a, *v))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl FromIterator<(Antichain, f64)> for RedundancyAssignment {
    fn from_iter<I: IntoIterator<Item = (Antichain, f64)>>(iter: I) -> Self {
        Self(iter.into_iter().collect())
    }
}

/// Partial information from redundancy, by subtracting the already inverted
/// values of each strict down-set.
pub fn mobius_inversion(
    lat: &PiLattice,
    icap: &RedundancyAssignment,
) -> Result<RedundancyAssignment> {
    let cap = lat.values(icap)?;
    let mut partial = vec![0.0; lat.len()];
    for i in lat.bottom_up() {
        partial[i] = cap[i]
            - lat
                .strictly_below(i)
                .iter()
                .map(|&j| partial[j])
                .sum::<f64>();
    }
    Ok(lat.assignment(partial))
}

/// Inverse of [`mobius_inversion`]: sums partial information over down-sets.
pub fn cumulative_sum(
    lat: &PiLattice,
    partial: &RedundancyAssignment,
) -> Result<RedundancyAssignment> {
    let part = lat.values(partial)?;
    let cap = (0..lat.len())
        .map(|i| part[i] + lat.strictly_below(i).iter().map(|&j| part[j]).sum::<f64>())
        .collect();
    Ok(lat.assignment(cap))
}

/// A finding of [`check_wb_axioms`].
#[derive(Debug, Clone, PartialEq)]
pub enum AxiomViolation {
    MissingNode(Antichain),
    MissingInformation(SourceSet),
    SelfRedundancy {
        set: SourceSet,
        icap: f64,
        mi: f64,
    },
    Monotonicity {
        lower: Antichain,
        upper: Antichain,
        lower_value: f64,
        upper_value: f64,
    },
}

impl fmt::Display for AxiomViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::MissingNode(a) => write!(f, "no redundancy value for {a}"),
            Self::MissingInformation(s) => write!(f, "no mutual information for source set {s}"),
            Self::SelfRedundancy { set, icap, mi } => {
                write!(
                    f,
                    "self-redundancy: I_cap({{{set}}}) = {icap} but MI = {mi}"
                )
            }
            Self::Monotonicity {
                lower,
                upper,
                lower_value,
                upper_value,
            } => write!(
                f,
                "monotonicity: {lower} = {lower_value} exceeds {upper} = {upper_value}"
            ),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct AxiomReport {
    pub checked_pairs: usize,
    pub violations: Vec<AxiomViolation>,
}

impl AxiomReport {
    pub fn passes(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks self-redundancy on singleton antichains against `mi_values` and
/// monotonicity along the lattice order, both within `tol`. Symmetry holds
/// by construction.
pub fn check_wb_axioms(
    lat: &PiLattice,
    icap: &RedundancyAssignment,
    mi_values: &BTreeMap<SourceSet, f64>,
    tol: f64,
) -> AxiomReport {
    let mut report = AxiomReport::default();
    let values: Vec<Option<f64>> = lat.nodes().iter().map(|a| icap.get(a)).collect();
    for (a, v) in lat.nodes().iter().zip(&values) {
        let Some(v) = v else {
            report
                .violations
                .push(AxiomViolation::MissingNode(a.clone()));
            continue;
        };
        if let [set] = a.members() {
            match mi_values.get(set) {
                None => report
                    .violations
                    .push(AxiomViolation::MissingInformation(*set)),
                Some(&mi) if (v - mi).abs() > tol => {
                    report.violations.push(AxiomViolation::SelfRedundancy {
                        set: *set,
                        icap: *v,
                        mi,
                    })
                }
                Some(_) => {}
            }
        }
    }
    for j in 0..lat.len() {
        for &i in lat.strictly_below(j) {
            let (Some(lo), Some(hi)) = (values[i], values[j]) else {
                continue;
            };
            report.checked_pairs += 1;
            if lo > hi + tol {
                report.violations.push(AxiomViolation::Monotonicity {
                    lower: lat.nodes()[i].clone(),
                    upper: lat.nodes()[j].clone(),
                    lower_value: lo,
                    upper_value: hi,
                });
            }
        }
    }
    report
}

/// Nodes whose partial information is below `-tol`.
pub fn local_positivity_violations(
    partial: &RedundancyAssignment,
    tol: f64,
) -> Vec<(Antichain, f64)> {
    partial
        .iter()
        .filter(|(_, v)| *v < -tol)
        .map(|(a, v)| (a.clone(), v))
        .collect()
}

/// `MI(target : union of sources in A)` for every non-empty subset `A` of
/// the given sources. Source `i` is `sources[i - 1]`.
pub fn source_informations(
    p: &JointTable,
    target: &[&str],
    sources: &[&[&str]],
) -> Result<BTreeMap<SourceSet, f64>> {
    check_n(sources.len())?;
    SourceSet::all(sources.len())
        .into_iter()
        .map(|set| {
            let mut names: Vec<&str> = Vec::new();
            for i in set.indices() {
                for name in sources[i - 1] {
                    if !names.contains(name) {
                        names.push(name);
                    }
                }
            }
            Ok((set, p.mutual_information(target, &names)?))
        })
        .collect()
}

/// Redundancy on the two-source lattice induced by the bivariate
/// decomposition: shared information at `{1;2}`, mutual informations
/// elsewhere.
pub fn bivariate_icap(
    p: &JointTable,
    target: &[&str],
    src1: &[&str],
    src2: &[&str],
    tol: f64,
) -> Result<RedundancyAssignment> {
    let d = decompose(p, target, src1, src2, tol)?;
    let node = |m: &[&[usize]]| Antichain::from_indices(m).expect("valid two-source antichain");
    Ok([
        (node(&[&[1], &[2]]), d.si),
        (node(&[&[1]]), d.mi_xy),
        (node(&[&[2]]), d.mi_xz),
        (node(&[&[1, 2]]), d.mi_total),
    ]
    .into_iter()
    .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Quantity {
    Redundancy,
    Partial,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    Equal,
    AtMost,
}

/// One derived fact about the three-source XOR construction.
#[derive(Debug, Clone, PartialEq)]
pub struct LedgerEntry {
    pub quantity: Quantity,
    pub node: Antichain,
    pub relation: Relation,
    pub bits: f64,
    pub reason: String,
}

impl fmt::Display for LedgerEntry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let q = match self.quantity {
            Quantity::Redundancy => "I_∩",
            Quantity::Partial => "I_∂",
        };
        let r = match self.relation {
            Relation::Equal => "=",
            Relation::AtMost => "≤",
        };
        write!(
            f,
            "{q}(X:{}) {r} {} bit  [{}]",
            self.node,
            signed(self.bits),
            self.reason
        )
    }
}

/// Shortest round-trip form with a typographic minus sign.
pub fn signed(bits: f64) -> String {
    let bits = if bits == 0.0 { 0.0 } else { bits };
    if bits < 0.0 {
        format!("−{}", -bits)
    } else {
        bits.to_string()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    LocalPositivityViolated,
    Inconclusive,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::LocalPositivityViolated => "local positivity violated",
            Self::Inconclusive => "inconclusive",
        })
    }
}

/// The three-source impossibility argument, carried out on the actual
/// distribution `Y1, Y2` uniform, `Y3 = Y1 xor Y2`, `X = (Y1, Y2, Y3)`.
#[derive(Debug, Clone)]
pub struct NogoCertificate {
    pub table: JointTable,
    pub ledger: Vec<LedgerEntry>,
    /// Upper bound on `I_partial` at `{12;13;23}`.
    pub bound: f64,
    pub verdict: Verdict,
    /// A full redundancy function meeting every forced value; it satisfies
    /// the axioms on the three-source lattice.
    pub completion: RedundancyAssignment,
    pub completion_partial: RedundancyAssignment,
    pub mi_values: BTreeMap<SourceSet, f64>,
}

pub fn nogo_certificate() -> NogoCertificate {
    build_nogo().expect("the XOR construction is well formed")
}

fn build_nogo() -> Result<NogoCertificate> {
    let bit = |name: &str| Variable::new(name, 2);
    let base = JointTable::from_fn(vec![bit("Y1")?, bit("Y2")?], |_| 0.25)?;
    let table = base
        .with_derived(bit("Y3")?, |s| s[0] ^ s[1])?
        .with_derived(Variable::new("X", 8)?, |s| s[0] * 4 + s[1] * 2 + s[2])?;
    let y = ["Y1", "Y2", "Y3"];
    let sources: Vec<&[&str]> = y.iter().map(std::slice::from_ref).collect();
    let mi_values = source_informations(&table, &["X"], &sources)?;
    let lat = PiLattice::new(3)?;
    let node = |m: &[&[usize]]| Antichain::from_indices(m);

    let mut ledger = Vec::new();
    let mut cap: BTreeMap<Antichain, f64> = BTreeMap::new();
    let mut partial: BTreeMap<Antichain, f64> = BTreeMap::new();
    let pairs = [(1, 2), (1, 3), (2, 3)];

    for (i, j) in pairs {
        let (yi, yj) = (y[i - 1], y[j - 1]);
        let mi = table.mutual_information(&[yi], &[yj])?;
        let relabel = table
            .conditional_entropy(&["X"], &[yi, yj])?
            .max(table.conditional_entropy(&[yi, yj], &["X"])?);
        let a = node(&[&[i], &[j]])?;
        cap.insert(a.clone(), mi);
        ledger.push(LedgerEntry {
            quantity: Quantity::Redundancy,
            node: a,
            relation: Relation::Equal,
            bits: mi,
            reason: format!(
                "identity gives MI({yi}:{yj}); X relabels ({yi},{yj}) since max(H(X|{yi}{yj}), H({yi}{yj}|X)) = {relabel}"
            ),
        });
    }

    let bottom = node(&[&[1], &[2], &[3]])?;
    let floor = pairs
        .iter()
        .map(|&(i, j)| cap[&node(&[&[i], &[j]]).expect("pair")])
        .fold(f64::INFINITY, f64::min);
    cap.insert(bottom.clone(), floor);
    ledger.push(LedgerEntry {
        quantity: Quantity::Redundancy,
        node: bottom.clone(),
        relation: Relation::Equal,
        bits: floor,
        reason: "monotonicity below every pair, and non-negativity".into(),
    });

    let settle =
        |a: &Antichain, cap: &BTreeMap<Antichain, f64>, partial: &mut BTreeMap<Antichain, f64>| {
            let i = lat.position(a).expect("node of the three-source lattice");
            let below: f64 = lat
                .strictly_below(i)
                .iter()
                .map(|&j| partial[&lat.nodes()[j]])
                .sum();
            let v = cap[a] - below;
            partial.insert(a.clone(), v);
            v
        };

    for a in std::iter::once(bottom.clone()).chain(
        pairs
            .iter()
            .map(|&(i, j)| node(&[&[i], &[j]]).expect("pair")),
    ) {
        let v = settle(&a, &cap, &mut partial);
        ledger.push(LedgerEntry {
            quantity: Quantity::Partial,
            node: a,
            relation: Relation::Equal,
            bits: v,
            reason: "Möbius inversion over the lower two levels".into(),
        });
    }

    for (i, j, k) in [(1, 2, 3), (2, 1, 3), (3, 1, 2)] {
        let mi = table.mutual_information(&[y[i - 1]], &[y[j - 1], y[k - 1]])?;
        let a = node(&[&[i], &[j, k]])?;
        cap.insert(a.clone(), mi);
        ledger.push(LedgerEntry {
            quantity: Quantity::Redundancy,
            node: a.clone(),
            relation: Relation::Equal,
            bits: mi,
            reason: format!("identity gives MI({}:{}{})", y[i - 1], y[j - 1], y[k - 1]),
        });
        let v = settle(&a, &cap, &mut partial);
        ledger.push(LedgerEntry {
            quantity: Quantity::Partial,
            node: a,
            relation: Relation::Equal,
            bits: v,
            reason: "Möbius inversion, everything below vanishes".into(),
        });
    }

    let top = node(&[&[1, 2], &[1, 3], &[2, 3]])?;
    let ceiling = mi_values[&SourceSet::new(&[1, 2, 3])?];
    cap.insert(top.clone(), ceiling);
    ledger.push(LedgerEntry {
        quantity: Quantity::Redundancy,
        node: top.clone(),
        relation: Relation::AtMost,
        bits: ceiling,
        reason: "monotonicity below {123}, self-redundancy MI(X:Y1Y2Y3)".into(),
    });
    let bound = settle(&top, &cap, &mut partial);
    ledger.push(LedgerEntry {
        quantity: Quantity::Partial,
        node: top,
        relation: Relation::AtMost,
        bits: bound,
        reason: format!("{ceiling} bit minus the three unit terms below"),
    });

    let completion: RedundancyAssignment = lat
        .nodes()
        .iter()
        .map(|a| {
            let v = cap.get(a).copied().unwrap_or_else(|| {
                a.members()
                    .iter()
                    .map(|s| mi_values[s])
                    .fold(f64::INFINITY, f64::min)
            });
            (a.clone(), v)
        })
        .collect();
    let completion_partial = mobius_inversion(&lat, &completion)?;

    Ok(NogoCertificate {
        table,
        ledger,
        bound,
        verdict: if bound < 0.0 {
            Verdict::LocalPositivityViolated
        } else {
            Verdict::Inconclusive
        },
        completion,
        completion_partial,
        mi_values,
    })
}
