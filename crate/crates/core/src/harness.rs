//! Randomized sweeps and curated examples for the monotonicity behaviour of
//! the decomposition.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1};

use crate::error::{Error, Result};
use crate::feasible::{build_constraints, trivariate};
use crate::par::{self, Execution};
use crate::solver::{decompose_with, minimize_cmi_with, SolverOptions};
use crate::table::{JointTable, Variable};

pub const MAX_SAMPLE_STATES: usize = 10_000;

/// A flat Dirichlet draw over the joint simplex of variables `V1, V2, ...`.
pub fn sample_distribution(shape: &[usize], seed: u64) -> Result<JointTable> {
    let names: Vec<String> = (1..=shape.len()).map(|i| format!("V{i}")).collect();
    let spec: Vec<(&str, usize)> = names
        .iter()
        .map(String::as_str)
        .zip(shape.iter().copied())
        .collect();
    sample_named(&spec, seed)
}

/// Like [`sample_distribution`] with chosen variable names.
pub fn sample_named(spec: &[(&str, usize)], seed: u64) -> Result<JointTable> {
    let states = spec
        .iter()
        .try_fold(1usize, |acc, (_, k)| acc.checked_mul(*k))
        .filter(|&n| n <= MAX_SAMPLE_STATES)
        .ok_or_else(|| {
            Error::ShapeTooLarge(
                spec.iter()
                    .map(|(_, k)| *k)
                    .fold(1usize, usize::saturating_mul),
            )
        })?;
    let vars = spec
        .iter()
        .map(|(name, k)| Variable::new(*name, *k))
        .collect::<Result<Vec<_>>>()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let draws: Vec<f64> = (0..states).map(|_| Exp1.sample(&mut rng)).collect();
    let total: f64 = draws.iter().sum();
    JointTable::new(vars, draws.into_iter().map(|d| d / total).collect())
}

/// Settings shared by the randomized sweeps. Trial `i` samples with seed
/// `seed + i`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sweep {
    pub trials: usize,
    pub seed: u64,
    pub tol: f64,
    pub alphabet: usize,
    pub solver: SolverOptions,
    pub execution: Execution,
}

impl Sweep {
    pub fn new(trials: usize, seed: u64, tol: f64) -> Self {
        Self {
            trials,
            seed,
            tol,
            alphabet: 2,
            solver: SolverOptions::default(),
            execution: Execution::default(),
        }
    }

    /// Violations are counted only beyond this.
    pub fn margin(&self) -> f64 {
        self.tol + 2.0 * self.solver.tol
    }

    fn shape<'a>(&self, names: &[&'a str]) -> Vec<(&'a str, usize)> {
        names.iter().map(|n| (*n, self.alphabet)).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Pass,
    Fail,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Violation {
    pub seed: u64,
    pub quantities: Vec<(&'static str, f64)>,
    /// How far the inequality is broken, in bits.
    pub amount: f64,
    pub probabilities: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrialFailure {
    pub seed: u64,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrialReport {
    pub name: &'static str,
    pub statement: &'static str,
    pub trial_count: usize,
    pub tolerance: f64,
    pub violations: Vec<Violation>,
    /// Solver errors; any of these makes the verdict a failure.
    pub failures: Vec<TrialFailure>,
    /// Largest amount by which any trial broke the inequality, or 0.
    pub max_violation: f64,
    pub verdict: Verdict,
}

impl TrialReport {
    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }
}

/// A trial's quantities and the signed amount by which it breaks the
/// property; non-positive means it holds.
struct Outcome {
    quantities: Vec<(&'static str, f64)>,
    amount: f64,
}

fn sweep(
    s: &Sweep,
    name: &'static str,
    statement: &'static str,
    names: &[&str],
    trial: impl Fn(&JointTable) -> Result<Outcome> + Sync + Send,
) -> TrialReport {
    let spec = s.shape(names);
    let outcomes = par::map_range(s.trials, s.execution, |i| {
        let seed = s.seed.wrapping_add(i as u64);
        let run = sample_named(&spec, seed).and_then(|p| Ok((trial(&p)?, p)));
        (seed, run)
    });
    let tolerance = s.margin();
    let mut report = TrialReport {
        name,
        statement,
        trial_count: s.trials,
        tolerance,
        violations: Vec::new(),
        failures: Vec::new(),
        max_violation: 0.0,
        verdict: Verdict::Pass,
    };
    for (seed, run) in outcomes {
        match run {
            Ok((o, p)) => {
                report.max_violation = report.max_violation.max(o.amount);
                if o.amount > tolerance {
                    report.violations.push(Violation {
                        seed,
                        quantities: o.quantities,
                        amount: o.amount,
                        probabilities: p.probabilities().to_vec(),
                    });
                }
            }
            Err(e) => report.failures.push(TrialFailure {
                seed,
                message: e.to_string(),
            }),
        }
    }
    if report.max_violation > tolerance || !report.failures.is_empty() {
        report.verdict = Verdict::Fail;
    }
    report
}

/// `UI(target : src \ other) = min MI_Q(target : src | other)`.
pub fn unique_information(
    p: &JointTable,
    target: &[&str],
    src: &[&str],
    other: &[&str],
    opts: &SolverOptions,
) -> Result<f64> {
    let c = build_constraints(p, target, src, other)?;
    Ok(minimize_cmi_with(&c, opts)?.value)
}

/// `SI(target : a ; b) = MI(target : b) - UI(target : b \ a)`.
pub fn shared_information(
    p: &JointTable,
    target: &[&str],
    a: &[&str],
    b: &[&str],
    opts: &SolverOptions,
) -> Result<f64> {
    let t = trivariate(p, target, a, b)?;
    let n = t.names();
    Ok(t.mutual_information(&[n[0]], &[n[2]])? - unique_information(p, target, b, a, opts)?)
}

/// The three unique-information inequalities on random tables over
/// `(X, E, Y, Z)`, where `E` enlarges the excluded source, the included
/// source, and the target in turn.
pub fn check_ui_monotonicity(s: &Sweep) -> [TrialReport; 3] {
    let names = ["X", "E", "Y", "Z"];
    let o = s.solver;
    let base = move |p: &JointTable| unique_information(p, &["X"], &["Y"], &["Z"], &o);
    [
        sweep(
            s,
            "ui-exclude",
            "UI(X:Y\\(Z,E)) <= UI(X:Y\\Z)",
            &names,
            |p| {
                let lhs = unique_information(p, &["X"], &["Y"], &["Z", "E"], &o)?;
                let rhs = base(p)?;
                Ok(Outcome {
                    quantities: vec![("ui_y_minus_ze", lhs), ("ui_y_minus_z", rhs)],
                    amount: lhs - rhs,
                })
            },
        ),
        sweep(
            s,
            "ui-include",
            "UI(X:(Y,E)\\Z) >= UI(X:Y\\Z)",
            &names,
            |p| {
                let lhs = unique_information(p, &["X"], &["Y", "E"], &["Z"], &o)?;
                let rhs = base(p)?;
                Ok(Outcome {
                    quantities: vec![("ui_ye_minus_z", lhs), ("ui_y_minus_z", rhs)],
                    amount: rhs - lhs,
                })
            },
        ),
        sweep(
            s,
            "ui-target",
            "UI((X,E):Y\\Z) >= UI(X:Y\\Z)",
            &names,
            |p| {
                let lhs = unique_information(p, &["X", "E"], &["Y"], &["Z"], &o)?;
                let rhs = base(p)?;
                Ok(Outcome {
                    quantities: vec![("ui_xe", lhs), ("ui_x", rhs)],
                    amount: rhs - lhs,
                })
            },
        ),
    ]
}

pub fn check_si_right_monotonicity(s: &Sweep) -> TrialReport {
    let o = s.solver;
    sweep(
        s,
        "si-right",
        "SI(X:(Y,E);Z) >= SI(X:Y;Z)",
        &["X", "E", "Y", "Z"],
        |p| {
            let lhs = shared_information(p, &["X"], &["Y", "E"], &["Z"], &o)?;
            let rhs = shared_information(p, &["X"], &["Y"], &["Z"], &o)?;
            Ok(Outcome {
                quantities: vec![("si_ye", lhs), ("si_y", rhs)],
                amount: rhs - lhs,
            })
        },
    )
}

/// `SI((Y,Z):Y;Z) = MI(Y:Z)` and `CI((Y,Z):Y;Z) = 0` on random pairs.
pub fn identity_axiom_check(s: &Sweep) -> TrialReport {
    let o = s.solver;
    sweep(
        s,
        "identity",
        "SI((Y,Z):Y;Z) = MI(Y:Z), CI((Y,Z):Y;Z) = 0",
        &["Y", "Z"],
        |p| {
            let d = decompose_with(p, &["Y", "Z"], &["Y"], &["Z"], &o)?;
            let mi = p.mutual_information(&["Y"], &["Z"])?;
            Ok(Outcome {
                quantities: vec![("si", d.si), ("mi_yz", mi), ("ci", d.ci)],
                amount: (d.si - mi).abs().max(d.ci.abs()),
            })
        },
    )
}

/// Evidence for the pairwise unique-information inequality; a failing
/// verdict here is a finding, not a defect.
pub fn conjecture_scan(s: &Sweep) -> TrialReport {
    let o = s.solver;
    sweep(
        s,
        "conjecture",
        "UI(X:Y\\(Z,W)) + UI(X:Z\\(Y,W)) <= UI(X:(Y,Z)\\W)",
        &["X", "Y", "Z", "W"],
        |p| {
            let a = unique_information(p, &["X"], &["Y"], &["Z", "W"], &o)?;
            let b = unique_information(p, &["X"], &["Z"], &["Y", "W"], &o)?;
            let rhs = unique_information(p, &["X"], &["Y", "Z"], &["W"], &o)?;
            Ok(Outcome {
                quantities: vec![("ui_y", a), ("ui_z", b), ("ui_yz", rhs)],
                amount: a + b - rhs,
            })
        },
    )
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConsistencyReport {
    pub si: f64,
    pub ui_y: f64,
    pub ui_z: f64,
    pub ci: f64,
    pub coinformation: f64,
    /// `|MI(X:Y) - si - ui_y|`, `|MI(X:Z) - si - ui_z|`,
    /// `|MI(X:(Y,Z)) - si - ui_y - ui_z - ci|` and `|si - ci - CoI|`.
    pub residuals: [f64; 4],
    pub tolerance: f64,
    pub passed: bool,
}

impl ConsistencyReport {
    pub fn max_residual(&self) -> f64 {
        self.residuals.iter().copied().fold(0.0, f64::max)
    }
}

pub fn consistency_check(
    p: &JointTable,
    target: &[&str],
    src1: &[&str],
    src2: &[&str],
    tol: f64,
    opts: &SolverOptions,
) -> Result<ConsistencyReport> {
    let d = decompose_with(p, target, src1, src2, opts)?;
    let t = trivariate(p, target, src1, src2)?;
    let n = t.names();
    let coinformation = t.coinformation(&[n[0]], &[n[1]], &[n[2]])?;
    let residuals = [
        (d.mi_xy - d.si - d.ui_y).abs(),
        (d.mi_xz - d.si - d.ui_z).abs(),
        (d.mi_total - d.si - d.ui_y - d.ui_z - d.ci).abs(),
        (d.si - d.ci - coinformation).abs(),
    ];
    let tolerance = tol + 2.0 * opts.tol;
    Ok(ConsistencyReport {
        si: d.si,
        ui_y: d.ui_y,
        ui_z: d.ui_z,
        ci: d.ci,
        coinformation,
        residuals,
        tolerance,
        passed: residuals.iter().all(|r| *r <= tolerance),
    })
}

pub fn consistency_sweep(s: &Sweep) -> TrialReport {
    let o = s.solver;
    let tol = s.tol;
    sweep(
        s,
        "consistency",
        "MI(X:Z) = si + ui_z, si - ci = CoI(X;Y;Z)",
        &["X", "Y", "Z"],
        |p| {
            let r = consistency_check(p, &["X"], &["Y"], &["Z"], tol, &o)?;
            Ok(Outcome {
                quantities: vec![
                    ("si", r.si),
                    ("ui_y", r.ui_y),
                    ("ui_z", r.ui_z),
                    ("ci", r.ci),
                    ("coinformation", r.coinformation),
                ],
                amount: r.max_residual(),
            })
        },
    )
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Comparison {
    Greater,
    Less,
    Equal,
}

/// One curated relation between two computed quantities.
#[derive(Debug, Clone, PartialEq)]
pub struct Relation {
    pub lhs_label: &'static str,
    pub lhs: f64,
    pub comparison: Comparison,
    pub rhs_label: &'static str,
    pub rhs: f64,
    /// `lhs - rhs` for strict relations, `|lhs - rhs|` for equalities.
    pub margin: f64,
    pub holds: bool,
}

impl Relation {
    fn new(
        lhs_label: &'static str,
        lhs: f64,
        comparison: Comparison,
        rhs_label: &'static str,
        rhs: f64,
        tol: f64,
    ) -> Self {
        let (margin, holds) = match comparison {
            Comparison::Greater => (lhs - rhs, lhs - rhs > tol),
            Comparison::Less => (rhs - lhs, rhs - lhs > tol),
            Comparison::Equal => ((lhs - rhs).abs(), (lhs - rhs).abs() <= tol),
        };
        Self {
            lhs_label,
            lhs,
            comparison,
            rhs_label,
            rhs,
            margin,
            holds,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CounterexampleReport {
    pub name: &'static str,
    pub relations: Vec<Relation>,
}

impl CounterexampleReport {
    pub fn passed(&self) -> bool {
        self.relations.iter().all(|r| r.holds)
    }
}

fn bits(names: &[&str]) -> Result<Vec<Variable>> {
    names.iter().map(|n| Variable::new(*n, 2)).collect()
}

type Derived<'a> = (&'a str, fn(&[usize]) -> usize);

/// Uniform independent bits `names[..k]`, followed by derived bits.
fn boolean_table(free: &[&str], derived: &[Derived]) -> Result<JointTable> {
    let mass = 0.5f64.powi(free.len() as i32);
    derived.iter().try_fold(
        JointTable::from_fn(bits(free)?, |_| mass)?,
        |t, (name, f)| t.with_derived(Variable::new(*name, 2)?, f),
    )
}

/// The AND gate: shared information about the output is positive, yet the
/// shared information about the full triple equals `MI(X:Y) = 0`.
pub fn left_monotonicity_counterexample(opts: &SolverOptions) -> Result<CounterexampleReport> {
    let p = boolean_table(&["X", "Y"], &[("Z", |s| s[0] & s[1])])?;
    let tol = opts.tol.max(1e-6);
    let si_and = shared_information(&p, &["Z"], &["X"], &["Y"], opts)?;
    let si_xy = shared_information(&p, &["X", "Y"], &["X"], &["Y"], opts)?;
    let si_full = shared_information(&p, &["Z", "X", "Y"], &["X"], &["Y"], opts)?;
    let mi = p.mutual_information(&["X"], &["Y"])?;
    Ok(CounterexampleReport {
        name: "left-monotonicity",
        relations: vec![
            Relation::new(
                "SI(Z:X;Y)",
                si_and,
                Comparison::Greater,
                "SI((Z,X,Y):X;Y)",
                si_full,
                tol,
            ),
            Relation::new(
                "SI((X,Y):X;Y)",
                si_xy,
                Comparison::Equal,
                "MI(X:Y)",
                mi,
                tol,
            ),
            Relation::new(
                "SI((Z,X,Y):X;Y)",
                si_full,
                Comparison::Equal,
                "MI(X:Y)",
                mi,
                tol,
            ),
        ],
    })
}

fn complementary_information(
    p: &JointTable,
    target: &[&str],
    a: &[&str],
    b: &[&str],
    opts: &SolverOptions,
) -> Result<f64> {
    Ok(decompose_with(p, target, a, b, opts)?.ci)
}

/// Enlarging a source can raise or lower complementary information, and
/// enlarging the target can remove it.
pub fn ci_counterexamples(opts: &SolverOptions) -> Result<CounterexampleReport> {
    let tol = opts.tol.max(1e-6);
    let ci = |p: &JointTable, t: &[&str], a: &[&str], b: &[&str]| {
        complementary_information(p, t, a, b, opts)
    };

    let bystander = boolean_table(&["Y'", "Y", "Z"], &[("X", |s| s[0] ^ s[2])])?;
    let ci_pair = ci(&bystander, &["X"], &["Y", "Y'"], &["Z"])?;
    let ci_prime = ci(&bystander, &["X"], &["Y'"], &["Z"])?;
    let ci_y = ci(&bystander, &["X"], &["Y"], &["Z"])?;

    let xor = boolean_table(&["Y", "Z"], &[("X", |s| s[0] ^ s[1])])?;
    let ci_xor = ci(&xor, &["X"], &["Y"], &["Z"])?;
    let ci_yz_z = ci(&xor, &["X"], &["Y", "Z"], &["Z"])?;
    let ci_identity = ci(&xor, &["Y", "Z"], &["Y"], &["Z"])?;
    let ci_triple = ci(&xor, &["X", "Y", "Z"], &["Y"], &["Z"])?;

    Ok(CounterexampleReport {
        name: "ci-counterexamples",
        relations: vec![
            Relation::new(
                "CI(X:(Y,Y');Z)",
                ci_pair,
                Comparison::Greater,
                "CI(X:Y;Z)",
                ci_y,
                tol,
            ),
            Relation::new(
                "CI(X:Y';Z)",
                ci_prime,
                Comparison::Equal,
                "CI(X:(Y,Y');Z)",
                ci_pair,
                tol,
            ),
            Relation::new(
                "CI(X:Y;Z)",
                ci_xor,
                Comparison::Greater,
                "CI(X:(Y,Z);Z)",
                ci_yz_z,
                tol,
            ),
            Relation::new(
                "CI((Y,Z):Y;Z)",
                ci_identity,
                Comparison::Equal,
                "0",
                0.0,
                tol,
            ),
            Relation::new(
                "CI(X:Y;Z)",
                ci_xor,
                Comparison::Greater,
                "CI((X,Y,Z):Y;Z)",
                ci_triple,
                tol,
            ),
        ],
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sampler_is_deterministic_and_normalized() {
        let a = sample_distribution(&[2, 3, 2], 11).unwrap();
        let b = sample_distribution(&[2, 3, 2], 11).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, sample_distribution(&[2, 3, 2], 12).unwrap());
        assert!(crate::table::validate_normalize(a.probabilities()).is_ok());
        assert!(matches!(
            sample_distribution(&[100, 101], 0),
            Err(Error::ShapeTooLarge(10100))
        ));
    }

    #[test]
    fn sampler_mean_is_uniform() {
        let n = 10_000;
        let mut mean = [0.0; 4];
        for seed in 0..n {
            let t = sample_distribution(&[2, 2], seed).unwrap();
            mean.iter_mut()
                .zip(t.probabilities())
                .for_each(|(m, p)| *m += p / n as f64);
        }
        assert!(
            mean.iter().all(|m| (m - 0.25).abs() < 0.25 * 0.02),
            "{mean:?}"
        );
    }

    #[test]
    fn dummy_variables_change_nothing() {
        let p = sample_named(&[("X", 2), ("Y", 2), ("Z", 2)], 5).unwrap();
        let p = p
            .with_derived(Variable::new("E", 2).unwrap(), |_| 0)
            .unwrap();
        let o = SolverOptions::default();
        let ui = unique_information(&p, &["X"], &["Y"], &["Z"], &o).unwrap();
        assert!(
            (unique_information(&p, &["X"], &["Y"], &["Z", "E"], &o).unwrap() - ui).abs() < 1e-8
        );
        assert!(
            (unique_information(&p, &["X"], &["Y", "E"], &["Z"], &o).unwrap() - ui).abs() < 1e-8
        );
        let si = shared_information(&p, &["X"], &["Y"], &["Z"], &o).unwrap();
        assert!(
            (shared_information(&p, &["X"], &["Y", "E"], &["Z"], &o).unwrap() - si).abs() < 1e-8
        );
        let copy = p
            .with_derived(Variable::new("Y2", 2).unwrap(), |s| s[1])
            .unwrap();
        assert!(
            (shared_information(&copy, &["X"], &["Y", "Y2"], &["Z"], &o).unwrap() - si).abs()
                < 1e-8
        );
    }

    #[test]
    fn curated_examples() {
        let o = SolverOptions::default();
        let left = left_monotonicity_counterexample(&o).unwrap();
        assert!(left.passed(), "{left:?}");
        assert!((left.relations[0].margin - 0.311).abs() < 1e-3);
        let ci = ci_counterexamples(&o).unwrap();
        assert!(ci.passed(), "{ci:?}");
        assert!(ci
            .relations
            .iter()
            .filter(|r| r.comparison == Comparison::Greater)
            .all(|r| r.margin > 0.99));
    }

    #[test]
    fn small_sweeps_pass() {
        let s = Sweep::new(20, 3, 1e-4);
        assert!(check_ui_monotonicity(&s).iter().all(TrialReport::passed));
        assert!(check_si_right_monotonicity(&s).passed());
        assert!(identity_axiom_check(&s).passed());
        assert!(consistency_sweep(&s).passed());
        assert_eq!(conjecture_scan(&s).trial_count, 20);
    }

    #[test]
    fn consistency_examples() {
        let o = SolverOptions::default();
        let xor = boolean_table(&["Y", "Z"], &[("X", |s| s[0] ^ s[1])]).unwrap();
        let r = consistency_check(&xor, &["X"], &["Y"], &["Z"], 1e-6, &o).unwrap();
        assert!(r.passed && (r.coinformation + 1.0).abs() < 1e-12);
        let copy = boolean_table(&["X"], &[("Y", |s| s[0]), ("Z", |s| s[0])]).unwrap();
        let r = consistency_check(&copy, &["X"], &["Y"], &["Z"], 1e-6, &o).unwrap();
        assert!(r.passed && (r.si - r.ci - 1.0).abs() < 1e-6);
    }
}
