//! Command-line front end. The binary only parses arguments and forwards
//! to [`run`], which returns the text to print and the exit code.

use std::collections::HashSet;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Deserialize;
use serde_json::{json, Map, Value};

use crate::error::{Error, Result};
use crate::harness::{self, CounterexampleReport, Sweep, TrialReport};
use crate::lattice::{self, signed, NogoCertificate, Quantity, Relation};
use crate::par::Execution;
use crate::solver::{brute_force_decompose, decompose_with, Decomposition, Method, SolverOptions};
use crate::table::{JointTable, Variable};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_SOLVER: i32 = 3;
pub const EXIT_DIMENSION: i32 = 4;
pub const EXIT_VIOLATION: i32 = 5;

pub const DEFAULT_CLI_TOL: f64 = 1e-7;

#[derive(Debug, Parser)]
#[command(
    name = "pidkit",
    version,
    about = "Unique, shared and complementary information of discrete distributions"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Decompose MI(target : (src1, src2)) for a distribution file.
    Compute(ComputeArgs),
    /// Compare the solver with the grid-search oracle.
    Oracle(OracleArgs),
    /// Print the three-source local positivity ledger.
    Nogo(NogoArgs),
    /// Run randomized property sweeps and curated examples.
    Properties(PropertiesArgs),
}

#[derive(Debug, Args)]
pub struct SplitArgs {
    /// Distribution file (JSON).
    pub file: PathBuf,
    /// Target variables, comma separated. Defaults to the first variable.
    #[arg(long)]
    pub target: Option<String>,
    /// First source, comma separated. Defaults to the second variable.
    #[arg(long)]
    pub src1: Option<String>,
    /// Second source, comma separated. Defaults to the third variable.
    #[arg(long)]
    pub src2: Option<String>,
    /// Solver tolerance on the certified gap, in bits.
    #[arg(long, default_value_t = DEFAULT_CLI_TOL)]
    pub tol: f64,
    /// Emit canonical JSON.
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    CentralPath,
    FrankWolfe,
}

impl From<MethodArg> for Method {
    fn from(m: MethodArg) -> Self {
        match m {
            MethodArg::CentralPath => Method::CentralPath,
            MethodArg::FrankWolfe => Method::FrankWolfe,
        }
    }
}

#[derive(Debug, Args)]
pub struct ComputeArgs {
    #[command(flatten)]
    pub split: SplitArgs,
    #[arg(long, value_enum, default_value_t = MethodArg::CentralPath)]
    pub method: MethodArg,
}

#[derive(Debug, Args)]
pub struct OracleArgs {
    #[command(flatten)]
    pub split: SplitArgs,
    /// Grid spacing along each free coordinate.
    #[arg(long, default_value_t = 1e-3)]
    pub resolution: f64,
}

#[derive(Debug, Args)]
pub struct NogoArgs {
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    UiMono,
    SiMono,
    Identity,
    Counterexamples,
    Conjecture,
    Consistency,
    All,
}

#[derive(Debug, Args)]
pub struct PropertiesArgs {
    #[arg(long, value_enum, default_value_t = Suite::All)]
    pub suite: Suite,
    #[arg(long, default_value_t = 1000)]
    pub trials: usize,
    #[arg(long, env = "PID_SEED", default_value_t = 0)]
    pub seed: u64,
    /// Violation tolerance in bits; twice the solver tolerance is added.
    #[arg(long, default_value_t = 1e-4)]
    pub tol: f64,
    /// Solver tolerance for each decomposition.
    #[arg(long, default_value_t = 1e-9)]
    pub solver_tol: f64,
    /// Use ternary instead of binary alphabets in the random sweeps.
    #[arg(long)]
    pub wide: bool,
    /// Run trials on one thread.
    #[arg(long)]
    pub sequential: bool,
    #[arg(long)]
    pub json: bool,
}

/// What a command prints and how the process should exit.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub stdout: String,
    pub stderr: String,
    pub code: i32,
}

impl Outcome {
    fn ok(stdout: String) -> Self {
        Self {
            stdout,
            stderr: String::new(),
            code: EXIT_OK,
        }
    }

    fn error(e: &Error) -> Self {
        Self {
            stdout: String::new(),
            stderr: format!("error: {e}\n"),
            code: exit_code(e),
        }
    }
}

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::IterationLimitExceeded(_) => EXIT_SOLVER,
        Error::DimensionTooLarge { .. } => EXIT_DIMENSION,
        _ => EXIT_INPUT,
    }
}

pub fn run(cli: &Cli) -> Outcome {
    let result = match &cli.command {
        Command::Compute(a) => compute(a),
        Command::Oracle(a) => oracle(a),
        Command::Nogo(a) => Ok(nogo(a)),
        Command::Properties(a) => properties(a),
    };
    result.unwrap_or_else(|e| Outcome::error(&e))
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct DistributionFile {
    variables: Vec<VariableEntry>,
    probabilities: Vec<Entry>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct VariableEntry {
    name: String,
    alphabet_size: usize,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct Entry {
    state: Vec<usize>,
    p: f64,
}

/// Reads a distribution file. Unlisted states have probability zero.
pub fn parse_distribution(path: &Path) -> Result<JointTable> {
    let text = std::fs::read_to_string(path)?;
    parse_distribution_str(&text)
}

/// Parses the distribution file format:
///
/// ```json
/// {
///   "variables": [{"name": "X", "alphabet_size": 2}, {"name": "Y", "alphabet_size": 2}],
///   "probabilities": [{"state": [0, 0], "p": 0.5}, {"state": [1, 1], "p": 0.5}]
/// }
/// ```
pub fn parse_distribution_str(text: &str) -> Result<JointTable> {
    let file: DistributionFile =
        serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    let vars = file
        .variables
        .iter()
        .map(|v| Variable::new(v.name.clone(), v.alphabet_size))
        .collect::<Result<Vec<_>>>()?;
    let shape: Vec<usize> = vars.iter().map(Variable::alphabet_size).collect();
    let mut raw = vec![0.0; shape.iter().product()];
    let mut seen = HashSet::new();
    for entry in &file.probabilities {
        if entry.state.len() != shape.len() {
            return Err(Error::Parse(format!(
                "state {:?} has {} indices, expected {}",
                entry.state,
                entry.state.len(),
                shape.len()
            )));
        }
        if let Some((i, s)) = entry
            .state
            .iter()
            .zip(&shape)
            .enumerate()
            .find(|(_, (s, k))| s >= k)
            .map(|(i, (s, _))| (i, s))
        {
            return Err(Error::Parse(format!(
                "state {:?}: index {s} out of range for `{}`",
                entry.state,
                vars[i].name()
            )));
        }
        if !seen.insert(entry.state.clone()) {
            return Err(Error::DuplicateState(entry.state.clone()));
        }
        let flat = entry
            .state
            .iter()
            .zip(&shape)
            .fold(0, |acc, (s, k)| acc * k + s);
        raw[flat] = entry.p;
    }
    JointTable::new(vars, raw)
}

struct Split {
    target: Vec<String>,
    src1: Vec<String>,
    src2: Vec<String>,
}

impl Split {
    fn resolve(a: &SplitArgs, p: &JointTable) -> Result<Self> {
        let names = p.names();
        let pick = |arg: &Option<String>, i: usize, flag: &str| -> Result<Vec<String>> {
            match arg {
                Some(list) => Ok(list.split(',').map(|s| s.trim().to_string()).collect()),
                None => names
                    .get(i)
                    .filter(|_| names.len() == 3)
                    .map(|n| vec![n.to_string()])
                    .ok_or_else(|| {
                        Error::Parse(format!(
                            "--{flag} is required unless the file has exactly three variables"
                        ))
                    }),
            }
        };
        Ok(Self {
            target: pick(&a.target, 0, "target")?,
            src1: pick(&a.src1, 1, "src1")?,
            src2: pick(&a.src2, 2, "src2")?,
        })
    }

    fn refs(&self) -> [Vec<&str>; 3] {
        [&self.target, &self.src1, &self.src2].map(|v| v.iter().map(String::as_str).collect())
    }

    fn json(&self) -> Value {
        json!({ "target": self.target, "src1": self.src1, "src2": self.src2 })
    }

    fn human(&self) -> String {
        format!(
            "{} : {} ; {}",
            self.target.join(","),
            self.src1.join(","),
            self.src2.join(",")
        )
    }
}

fn solver_options(tol: f64, method: Method) -> Result<SolverOptions> {
    if !(tol > 0.0 && tol.is_finite()) {
        return Err(Error::Parse(format!(
            "tolerance must be positive, got {tol}"
        )));
    }
    Ok(SolverOptions {
        method,
        ..SolverOptions::with_tol(tol)
    })
}

fn compute(a: &ComputeArgs) -> Result<Outcome> {
    let p = parse_distribution(&a.split.file)?;
    let split = Split::resolve(&a.split, &p)?;
    let [t, s1, s2] = split.refs();
    let opts = solver_options(a.split.tol, a.method.into())?;
    let d = decompose_with(&p, &t, &s1, &s2, &opts)?;
    let out = if a.split.json {
        let mut v = json!({
            "command": "compute",
            "tol": num(a.split.tol),
            "decomposition": decomposition_json(&d),
        });
        merge(&mut v, split.json());
        render_json(&v)
    } else {
        let mut s = format!("decomposition of {}\n", split.human());
        s.push_str(&decomposition_table(&d));
        s
    };
    Ok(Outcome::ok(out))
}

fn oracle(a: &OracleArgs) -> Result<Outcome> {
    if !(a.resolution > 0.0 && a.resolution <= 1.0) {
        return Err(Error::Parse(format!(
            "resolution must lie in (0, 1], got {}",
            a.resolution
        )));
    }
    let p = parse_distribution(&a.split.file)?;
    let split = Split::resolve(&a.split, &p)?;
    let [t, s1, s2] = split.refs();
    let oracle = brute_force_decompose(&p, &t, &s1, &s2, a.resolution)?;
    let solver = decompose_with(
        &p,
        &t,
        &s1,
        &s2,
        &solver_options(a.split.tol, Method::CentralPath)?,
    )?;
    let discrepancy = solver
        .clamped()
        .iter()
        .zip(oracle.clamped())
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    let out = if a.split.json {
        let mut v = json!({
            "command": "oracle",
            "resolution": num(a.resolution),
            "tol": num(a.split.tol),
            "solver": decomposition_json(&solver),
            "oracle": decomposition_json(&oracle),
            "max_discrepancy": num(discrepancy),
        });
        merge(&mut v, split.json());
        render_json(&v)
    } else {
        let mut s = format!("{:<14}{:>24}{:>24}\n", "quantity", "solver", "oracle");
        for (name, (x, y)) in ["si", "ui_y", "ui_z", "ci"]
            .iter()
            .zip(solver.clamped().into_iter().zip(oracle.clamped()))
        {
            let _ = writeln!(s, "{name:<14}{x:>24.17}{y:>24.17}");
        }
        let _ = writeln!(
            s,
            "max discrepancy {discrepancy:e} bit (resolution {})",
            a.resolution
        );
        s
    };
    Ok(Outcome::ok(out))
}

fn nogo(a: &NogoArgs) -> Outcome {
    let cert = lattice::nogo_certificate();
    Outcome::ok(if a.json {
        render_json(&nogo_json(&cert))
    } else {
        nogo_human(&cert)
    })
}

fn source_label(set: lattice::SourceSet) -> String {
    let names: Vec<String> = set.indices().iter().map(|i| format!("Y{i}")).collect();
    if names.len() == 1 {
        names[0].clone()
    } else {
        format!("{{{}}}", names.join(","))
    }
}

fn nogo_human(cert: &NogoCertificate) -> String {
    let mut s =
        String::from("Y1, Y2 uniform independent bits, Y3 = Y1 xor Y2, X = (Y1, Y2, Y3)\n\n");
    for (set, mi) in &cert.mi_values {
        let _ = writeln!(s, "MI(X:{}) = {} bit", source_label(*set), signed(*mi));
    }
    s.push('\n');
    for entry in &cert.ledger {
        let _ = writeln!(s, "{entry}");
    }
    let _ = writeln!(s, "\nI_∂(top) ≤ {} bit", signed(cert.bound));
    let _ = writeln!(s, "verdict: {}", cert.verdict);
    s
}

fn nogo_json(cert: &NogoCertificate) -> Value {
    let mi: Map<String, Value> = cert
        .mi_values
        .iter()
        .map(|(set, v)| (set.to_string(), num(*v)))
        .collect();
    let ledger: Vec<Value> = cert
        .ledger
        .iter()
        .map(|e| {
            json!({
                "quantity": match e.quantity { Quantity::Redundancy => "redundancy", Quantity::Partial => "partial" },
                "node": e.node.to_string(),
                "relation": match e.relation { Relation::Equal => "=", Relation::AtMost => "<=" },
                "bits": num(e.bits),
                "reason": e.reason,
            })
        })
        .collect();
    let assignment = |a: &lattice::RedundancyAssignment| -> Map<String, Value> {
        a.iter().map(|(k, v)| (k.to_string(), num(v))).collect()
    };
    json!({
        "command": "nogo",
        "mutual_information": mi,
        "ledger": ledger,
        "bound": num(cert.bound),
        "verdict": cert.verdict.to_string(),
        "completion": assignment(&cert.completion),
        "completion_partial": assignment(&cert.completion_partial),
    })
}

struct SuiteRun {
    sweeps: Vec<(TrialReport, bool)>,
    curated: Vec<CounterexampleReport>,
}

impl SuiteRun {
    fn passed(&self) -> bool {
        self.sweeps
            .iter()
            .all(|(r, asserted)| !asserted || r.passed())
            && self.curated.iter().all(|c| c.passed())
    }
}

fn properties(a: &PropertiesArgs) -> Result<Outcome> {
    if a.trials == 0 {
        return Err(Error::Parse("--trials must be at least 1".into()));
    }
    if !(a.tol >= 0.0 && a.tol.is_finite()) {
        return Err(Error::Parse(format!(
            "--tol must be non-negative, got {}",
            a.tol
        )));
    }
    let mut sweep = Sweep::new(a.trials, a.seed, a.tol);
    sweep.solver = solver_options(a.solver_tol, Method::CentralPath)?;
    sweep.alphabet = if a.wide { 3 } else { 2 };
    sweep.execution = if a.sequential {
        Execution::Sequential
    } else {
        Execution::Parallel
    };
    let wants = |s: Suite| a.suite == s || a.suite == Suite::All;

    let mut run = SuiteRun {
        sweeps: Vec::new(),
        curated: Vec::new(),
    };
    if wants(Suite::UiMono) {
        run.sweeps.extend(
            harness::check_ui_monotonicity(&sweep)
                .into_iter()
                .map(|r| (r, true)),
        );
    }
    if wants(Suite::SiMono) {
        run.sweeps
            .push((harness::check_si_right_monotonicity(&sweep), true));
    }
    if wants(Suite::Identity) {
        run.sweeps
            .push((harness::identity_axiom_check(&sweep), true));
    }
    if wants(Suite::Consistency) {
        run.sweeps.push((harness::consistency_sweep(&sweep), true));
    }
    if wants(Suite::Conjecture) {
        run.sweeps.push((harness::conjecture_scan(&sweep), false));
    }
    if wants(Suite::Counterexamples) {
        run.curated
            .push(harness::left_monotonicity_counterexample(&sweep.solver)?);
        run.curated
            .push(harness::ci_counterexamples(&sweep.solver)?);
    }

    let passed = run.passed();
    let stdout = if a.json {
        render_json(&json!({
            "command": "properties",
            "suite": format!("{:?}", a.suite).to_lowercase(),
            "trials": a.trials,
            "seed": a.seed,
            "tol": num(a.tol),
            "solver_tol": num(a.solver_tol),
            "alphabet": sweep.alphabet,
            "sweeps": run.sweeps.iter().map(|(r, asserted)| trial_json(r, *asserted)).collect::<Vec<_>>(),
            "counterexamples": run.curated.iter().map(counterexample_json).collect::<Vec<_>>(),
            "passed": passed,
        }))
    } else {
        properties_human(&run, passed)
    };
    Ok(Outcome {
        stdout,
        stderr: String::new(),
        code: if passed { EXIT_OK } else { EXIT_VIOLATION },
    })
}

fn properties_human(run: &SuiteRun, passed: bool) -> String {
    let mut s = String::new();
    for (r, asserted) in &run.sweeps {
        let status = match (asserted, r.passed()) {
            (false, _) => "REPORT",
            (true, true) => "PASS",
            (true, false) => "FAIL",
        };
        let _ = writeln!(
            s,
            "{status:<7}{:<13}{:>6} trials  {:>3} violations  max {:+.3e}  {}",
            r.name,
            r.trial_count,
            r.violations.len(),
            r.max_violation,
            r.statement
        );
        for v in r.violations.iter().take(5) {
            let q: Vec<String> = v
                .quantities
                .iter()
                .map(|(k, x)| format!("{k}={x:.9}"))
                .collect();
            let _ = writeln!(
                s,
                "         seed {} by {:.3e}: {}",
                v.seed,
                v.amount,
                q.join(" ")
            );
        }
        for f in &r.failures {
            let _ = writeln!(s, "         seed {} failed: {}", f.seed, f.message);
        }
    }
    for c in &run.curated {
        let _ = writeln!(
            s,
            "{:<7}{}",
            if c.passed() { "PASS" } else { "FAIL" },
            c.name
        );
        for r in &c.relations {
            let op = match r.comparison {
                harness::Comparison::Greater => ">",
                harness::Comparison::Less => "<",
                harness::Comparison::Equal => "=",
            };
            let _ = writeln!(
                s,
                "         {} = {:.6} {op} {} = {:.6}  (margin {:.6})",
                r.lhs_label, r.lhs, r.rhs_label, r.rhs, r.margin
            );
        }
    }
    let _ = writeln!(
        s,
        "{}",
        if passed {
            "all asserted properties hold"
        } else {
            "asserted property violated"
        }
    );
    s
}

fn trial_json(r: &TrialReport, asserted: bool) -> Value {
    json!({
        "name": r.name,
        "statement": r.statement,
        "asserted": asserted,
        "trial_count": r.trial_count,
        "tolerance": num(r.tolerance),
        "max_violation": num(r.max_violation),
        "verdict": if r.passed() { "pass" } else { "fail" },
        "violations": r.violations.iter().map(|v| json!({
            "seed": v.seed,
            "amount": num(v.amount),
            "quantities": v.quantities.iter().map(|(k, x)| (k.to_string(), num(*x))).collect::<Map<_, _>>(),
            "probabilities": v.probabilities.iter().map(|x| num(*x)).collect::<Vec<_>>(),
        })).collect::<Vec<_>>(),
        "failures": r.failures.iter().map(|f| json!({ "seed": f.seed, "message": f.message })).collect::<Vec<_>>(),
    })
}

fn counterexample_json(c: &CounterexampleReport) -> Value {
    json!({
        "name": c.name,
        "passed": c.passed(),
        "relations": c.relations.iter().map(|r| json!({
            "lhs": r.lhs_label,
            "lhs_bits": num(r.lhs),
            "comparison": format!("{:?}", r.comparison).to_lowercase(),
            "rhs": r.rhs_label,
            "rhs_bits": num(r.rhs),
            "margin": num(r.margin),
            "holds": r.holds,
        })).collect::<Vec<_>>(),
    })
}

fn decomposition_json(d: &Decomposition) -> Value {
    let [si, ui_y, ui_z, ci] = d.clamped();
    json!({
        "mi_total": num(d.mi_total),
        "mi_xy": num(d.mi_xy),
        "mi_xz": num(d.mi_xz),
        "si": num(si),
        "ui_y": num(ui_y),
        "ui_z": num(ui_z),
        "ci": num(ci),
        "consistency_residual": num(d.consistency_residual),
        "gap_y": num(d.gap_y),
        "gap_z": num(d.gap_z),
        "iterations_y": d.iterations_y,
        "iterations_z": d.iterations_z,
    })
}

fn decomposition_table(d: &Decomposition) -> String {
    let [si, ui_y, ui_z, ci] = d.clamped();
    let rows = [
        ("mi_total", d.mi_total),
        ("si", si),
        ("ui_y", ui_y),
        ("ui_z", ui_z),
        ("ci", ci),
        ("consistency_residual", d.consistency_residual),
        ("gap_y", d.gap_y),
        ("gap_z", d.gap_z),
    ];
    let mut s = String::new();
    for (name, v) in rows {
        let _ = writeln!(s, "{name:<22}{v:>24.17}");
    }
    let _ = writeln!(
        s,
        "{:<22}{:>24}",
        "iterations",
        format!("{} / {}", d.iterations_y, d.iterations_z)
    );
    s
}

fn merge(v: &mut Value, extra: Value) {
    if let (Value::Object(a), Value::Object(b)) = (v, extra) {
        a.extend(b);
    }
}

/// A JSON number with 17 significant digits; non-finite values become null.
pub fn num(x: f64) -> Value {
    if !x.is_finite() {
        return Value::Null;
    }
    let x = if x == 0.0 { 0.0 } else { x };
    let text = format!("{x:.16e}");
    Value::Number(
        text.parse()
            .expect("formatted float is a valid JSON number"),
    )
}

/// Pretty JSON with sorted keys and a trailing newline.
pub fn render_json(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("JSON values always serialize");
    s.push('\n');
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    const AND: &str = r#"{
        "variables": [{"name": "X", "alphabet_size": 2}, {"name": "Y", "alphabet_size": 2}, {"name": "Z", "alphabet_size": 2}],
        "probabilities": [
            {"state": [0, 0, 0], "p": 0.25}, {"state": [0, 1, 0], "p": 0.25},
            {"state": [1, 0, 0], "p": 0.25}, {"state": [1, 1, 1], "p": 0.25}
        ]
    }"#;

    #[test]
    fn parses_sparse_entries() {
        let p = parse_distribution_str(AND).unwrap();
        assert_eq!(p.names(), ["X", "Y", "Z"]);
        assert_eq!(p.prob(&[1, 1, 1]), 0.25);
        assert_eq!(p.prob(&[1, 1, 0]), 0.0);
    }

    #[test]
    fn rejects_bad_files() {
        let dup = AND.replace("[0, 1, 0]", "[0, 0, 0]");
        assert!(
            matches!(parse_distribution_str(&dup), Err(Error::DuplicateState(s)) if s == [0, 0, 0])
        );
        let short = AND.replace(
            "\"p\": 0.25}, {\"state\": [0, 1, 0]",
            "\"p\": 0.15}, {\"state\": [0, 1, 0]",
        );
        assert!(matches!(
            parse_distribution_str(&short),
            Err(Error::NotNormalized { .. })
        ));
        let negative = AND.replacen("0.25", "-0.25", 1);
        assert!(matches!(
            parse_distribution_str(&negative),
            Err(Error::NegativeMass { .. })
        ));
        let range = AND.replace("[1, 1, 1]", "[1, 2, 1]");
        assert!(matches!(
            parse_distribution_str(&range),
            Err(Error::Parse(_))
        ));
        assert!(matches!(parse_distribution_str("{"), Err(Error::Parse(_))));
    }

    #[test]
    fn numbers_have_seventeen_digits() {
        assert_eq!(num(0.1).to_string(), "1.0000000000000001e-1");
        assert_eq!(num(-0.0).to_string(), "0.0000000000000000e+0");
        assert_eq!(num(f64::NAN), Value::Null);
        let x = 0.311_278_124_459_132_8;
        assert_eq!(num(x).to_string().parse::<f64>().unwrap(), x);
    }

    #[test]
    fn asserted_failures_decide_the_run() {
        let failing = TrialReport {
            name: "t",
            statement: "s",
            trial_count: 1,
            tolerance: 0.0,
            violations: Vec::new(),
            failures: Vec::new(),
            max_violation: 1.0,
            verdict: harness::Verdict::Fail,
        };
        let reported = SuiteRun {
            sweeps: vec![(failing.clone(), false)],
            curated: Vec::new(),
        };
        assert!(reported.passed());
        let asserted = SuiteRun {
            sweeps: vec![(failing, true)],
            curated: Vec::new(),
        };
        assert!(!asserted.passed());
        assert!(properties_human(&asserted, false).contains("FAIL"));
    }

    #[test]
    fn exit_codes() {
        assert_eq!(exit_code(&Error::UnknownVariable("Q".into())), EXIT_INPUT);
        assert_eq!(
            exit_code(&Error::DimensionTooLarge { dims: 9, max: 4 }),
            EXIT_DIMENSION
        );
    }
}
