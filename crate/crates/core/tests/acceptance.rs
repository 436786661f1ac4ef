//! End-to-end acceptance checks. Each criterion prints one line; the process
//! fails if any criterion fails.

use std::collections::HashMap;
use std::process::Command;
use std::time::{Duration, Instant};

use clap::Parser;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use pidkit::cli::{run, Cli};
use pidkit::harness::{check_si_right_monotonicity, check_ui_monotonicity, sample_named, Sweep};
use pidkit::lattice::{antichains, cumulative_sum, mobius_inversion, nogo_certificate, PiLattice};
use pidkit::solver::gradient;
use pidkit::{
    brute_force_decompose, build_constraints, decompose, FeasiblePoint, JointTable, Variable,
};

type Check = fn() -> Result<String, String>;

fn main() {
    let criteria: [(&str, Check); 10] = [
        ("AND gate", and_gate),
        ("XOR", xor),
        ("identity configuration", identity),
        ("no-go certificate", nogo),
        ("lemma sweeps", lemma_sweeps),
        ("oracle equivalence", oracle),
        ("gradient check", gradient_check),
        ("decomposition consistency", consistency),
        ("lattice", lattice),
        ("determinism", determinism),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = check();
        let elapsed = start.elapsed().as_secs_f64();
        match result {
            Ok(detail) => println!(
                "criterion {:>2} PASS  {name}: {detail} [{elapsed:.2}s]",
                i + 1
            ),
            Err(detail) => {
                failed += 1;
                println!(
                    "criterion {:>2} FAIL  {name}: {detail} [{elapsed:.2}s]",
                    i + 1
                );
            }
        }
    }
    println!(
        "{} of {} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(start: Instant, limit: Duration) -> Result<(), String> {
    ensure(start.elapsed() < limit, || {
        format!("took {:?}, limit {limit:?}", start.elapsed())
    })
}

fn bits(names: &[&str], f: impl Fn(&[usize]) -> f64) -> JointTable {
    JointTable::from_fn(
        names
            .iter()
            .map(|n| Variable::new(*n, 2).unwrap())
            .collect(),
        f,
    )
    .unwrap()
}

/// Entropy in bits of the marginal on variable positions `keep`, summed
/// directly over the table's states.
fn entropy(p: &JointTable, keep: &[usize]) -> f64 {
    let mut masses: HashMap<Vec<usize>, f64> = HashMap::new();
    for (state, mass) in p.iter() {
        *masses
            .entry(keep.iter().map(|&i| state[i]).collect())
            .or_default() += mass;
    }
    masses
        .values()
        .filter(|m| **m > 0.0)
        .map(|m| -m * m.log2())
        .sum()
}

fn mi(p: &JointTable, a: &[usize], b: &[usize]) -> f64 {
    entropy(p, a) + entropy(p, b) - entropy(p, &[a, b].concat())
}

fn and_gate() -> Result<String, String> {
    let start = Instant::now();
    let p = bits(&["X", "Y", "Z"], |s| {
        if s[2] == s[0] & s[1] {
            0.25
        } else {
            0.0
        }
    });
    let d = decompose(&p, &["Z"], &["X"], &["Y"], 1e-9).map_err(|e| e.to_string())?;
    within(start, Duration::from_secs(1))?;
    let detail = format!("si = {:.6}, ui = {:.1e} / {:.1e}", d.si, d.ui_y, d.ui_z);
    ensure((d.si - 0.311).abs() <= 1e-3, || detail.clone())?;
    ensure(d.ui_y.abs() <= 1e-4 && d.ui_z.abs() <= 1e-4, || {
        detail.clone()
    })?;
    Ok(detail)
}

fn xor() -> Result<String, String> {
    let start = Instant::now();
    let p = bits(&["X", "Y", "Z"], |s| {
        if s[0] == s[1] ^ s[2] {
            0.25
        } else {
            0.0
        }
    });
    let d = decompose(&p, &["X"], &["Y"], &["Z"], 1e-9).map_err(|e| e.to_string())?;
    within(start, Duration::from_secs(1))?;
    let detail = format!(
        "ci = {:.6}, si = {:.1e}, ui = {:.1e} / {:.1e}",
        d.ci, d.si, d.ui_y, d.ui_z
    );
    ensure((d.ci - 1.0).abs() <= 1e-4, || detail.clone())?;
    ensure(
        [d.si, d.ui_y, d.ui_z].iter().all(|v| v.abs() <= 1e-4),
        || detail.clone(),
    )?;
    Ok(detail)
}

fn identity() -> Result<String, String> {
    let start = Instant::now();
    let mut worst = 0.0f64;
    for seed in 0..200 {
        let p = sample_named(&[("Y", 2), ("Z", 2)], seed).map_err(|e| e.to_string())?;
        let d = decompose(&p, &["Y", "Z"], &["Y"], &["Z"], 1e-9).map_err(|e| e.to_string())?;
        let err = (d.si - mi(&p, &[0], &[1])).abs().max(d.ci.abs());
        worst = worst.max(err);
        ensure(err <= 1e-4, || {
            format!("seed {seed}: si = {}, ci = {}", d.si, d.ci)
        })?;
    }
    within(start, Duration::from_secs(120))?;
    Ok(format!("200 tables, worst deviation {worst:.1e} bit"))
}

fn nogo() -> Result<String, String> {
    let start = Instant::now();
    let out = run(&Cli::parse_from(["pidkit", "nogo"]));
    let cert = nogo_certificate();
    within(start, Duration::from_secs(1))?;
    ensure(out.code == 0, || format!("exit code {}", out.code))?;
    for line in [
        "MI(X:{Y1,Y2,Y3}) = 2 bit",
        "I_∂(X:{1;23}) = 1 bit",
        "I_∂(X:{2;13}) = 1 bit",
        "I_∂(X:{3;12}) = 1 bit",
        "I_∂(top) ≤ −1 bit",
    ] {
        ensure(out.stdout.contains(line), || {
            format!("ledger lacks `{line}`")
        })?;
    }
    ensure(cert.bound == -1.0, || format!("bound {}", cert.bound))?;
    let x = cert.table.index_of("X").map_err(|e| e.to_string())?;
    let ys: Vec<usize> = ["Y1", "Y2", "Y3"]
        .iter()
        .map(|n| cert.table.index_of(n).unwrap())
        .collect();
    let independent = mi(&cert.table, &[x], &ys);
    let reported = cert.mi_values.values().last().copied().unwrap_or(f64::NAN);
    ensure(independent == 2.0 && reported == independent, || {
        format!("MI(X:Y1Y2Y3) reported {reported}, recomputed {independent}")
    })?;
    Ok(format!(
        "{} ledger entries, bound {} bit",
        cert.ledger.len(),
        cert.bound
    ))
}

fn lemma_sweeps() -> Result<String, String> {
    let start = Instant::now();
    let sweep = Sweep::new(1000, 20_240_101, 1e-4);
    let mut reports = check_ui_monotonicity(&sweep).to_vec();
    reports.push(check_si_right_monotonicity(&sweep));
    within(start, Duration::from_secs(600))?;
    let summary: Vec<String> = reports
        .iter()
        .map(|r| {
            format!(
                "{} {}/{} max {:.1e}",
                r.name,
                r.violations.len() + r.failures.len(),
                r.trial_count,
                r.max_violation
            )
        })
        .collect();
    ensure(reports.iter().all(|r| r.passed()), || summary.join(", "))?;
    Ok(summary.join(", "))
}

fn oracle() -> Result<String, String> {
    let start = Instant::now();
    let mut worst = 0.0f64;
    for seed in 0..50 {
        let p = sample_named(&[("X", 2), ("Y", 2), ("Z", 2)], 1000 + seed)
            .map_err(|e| e.to_string())?;
        let o =
            brute_force_decompose(&p, &["X"], &["Y"], &["Z"], 1e-3).map_err(|e| e.to_string())?;
        let d = decompose(&p, &["X"], &["Y"], &["Z"], 1e-9).map_err(|e| e.to_string())?;
        let gap = d
            .clamped()
            .iter()
            .zip(o.clamped())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        worst = worst.max(gap);
        ensure(gap <= 1e-3, || {
            format!("seed {}: discrepancy {gap}", 1000 + seed)
        })?;
    }
    within(start, Duration::from_secs(300))?;
    Ok(format!("50 tables, worst discrepancy {worst:.1e} bit"))
}

fn gradient_check() -> Result<String, String> {
    let (nx, ny, nz) = (3, 3, 3);
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    let mut worst = 0.0f64;
    for seed in 0..100 {
        let p = sample_named(&[("X", nx), ("Y", ny), ("Z", nz)], 5000 + seed)
            .map_err(|e| e.to_string())?;
        let c = build_constraints(&p, &["X"], &["Y"], &["Z"]).map_err(|e| e.to_string())?;
        let g = gradient(&FeasiblePoint::new(p.clone(), &c).map_err(|e| e.to_string())?);
        // Random combination of 2x2 cycles, which keep both marginals fixed.
        let mut dir = vec![0.0; nx * ny * nz];
        let at = |x: usize, y: usize, z: usize| (x * ny + y) * nz + z;
        for x in 0..nx {
            for y in 1..ny {
                for z in 1..nz {
                    let w: f64 = rng.random_range(-1.0..1.0);
                    dir[at(x, 0, 0)] += w;
                    dir[at(x, y, z)] += w;
                    dir[at(x, 0, z)] -= w;
                    dir[at(x, y, 0)] -= w;
                }
            }
        }
        let f = |t: f64| {
            let q: Vec<f64> = p
                .probabilities()
                .iter()
                .zip(&dir)
                .map(|(a, d)| a + t * d)
                .collect();
            let q = JointTable::new(p.variables().to_vec(), q).unwrap();
            entropy(&q, &[0, 2]) + entropy(&q, &[1, 2])
                - entropy(&q, &[2])
                - entropy(&q, &[0, 1, 2])
        };
        let scale = dir.iter().map(|d| d.abs()).fold(0.0, f64::max);
        let h = 1e-4
            * p.probabilities()
                .iter()
                .cloned()
                .fold(f64::INFINITY, f64::min)
            / scale;
        let numeric = (f(h) - f(-h)) / (2.0 * h);
        let analytic: f64 = g.iter().zip(&dir).map(|(a, b)| a * b).sum();
        let rel = (numeric - analytic).abs() / analytic.abs();
        worst = worst.max(rel);
        ensure(rel <= 1e-4, || {
            format!(
                "seed {}: analytic {analytic}, numeric {numeric}",
                5000 + seed
            )
        })?;
    }
    Ok(format!("100 points, worst relative error {worst:.1e}"))
}

fn consistency() -> Result<String, String> {
    let tol = 1e-9;
    let bound = 2.0 * tol + 1e-6;
    let mut worst = 0.0f64;
    for seed in 0..500 {
        let p = sample_named(&[("X", 2), ("Y", 2), ("Z", 2)], 9000 + seed)
            .map_err(|e| e.to_string())?;
        let d = decompose(&p, &["X"], &["Y"], &["Z"], tol).map_err(|e| e.to_string())?;
        let coi = mi(&p, &[0], &[1]) + mi(&p, &[0], &[2]) - mi(&p, &[0], &[1, 2]);
        let r1 = (mi(&p, &[0], &[2]) - d.si - d.ui_z).abs();
        let r2 = (d.si - d.ci - coi).abs();
        worst = worst.max(r1).max(r2);
        ensure(r1 <= bound && r2 <= bound, || {
            format!("seed {}: residuals {r1:e}, {r2:e}", 9000 + seed)
        })?;
    }
    Ok(format!("500 tables, worst residual {worst:.1e} bit"))
}

/// Antichains of non-empty sets, counted as monotone Boolean functions on
/// `n` inputs minus the two constant functions.
fn monotone_function_count(n: usize) -> usize {
    let points = 1usize << n;
    (0u64..1 << points)
        .filter(|table| {
            (0..points).all(|a| (0..points).all(|b| a & b != a || table >> a & 1 <= table >> b & 1))
        })
        .count()
        - 2
}

fn lattice() -> Result<String, String> {
    let counts: Vec<usize> = (1..=4)
        .map(|n| antichains(n).map(|a| a.len()).unwrap_or(0))
        .collect();
    ensure(counts == [1, 4, 18, 166], || format!("counts {counts:?}"))?;
    let oracle: Vec<usize> = (1..=4).map(monotone_function_count).collect();
    ensure(counts == oracle, || {
        format!("counts {counts:?}, oracle {oracle:?}")
    })?;
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut worst = 0.0f64;
    for n in 1..=4 {
        let lat = PiLattice::new(n).map_err(|e| e.to_string())?;
        for _ in 0..25 {
            let icap = lat
                .nodes()
                .iter()
                .map(|a| (a.clone(), rng.random_range(-3.0..3.0)))
                .collect();
            let partial = mobius_inversion(&lat, &icap).map_err(|e| e.to_string())?;
            let back = cumulative_sum(&lat, &partial).map_err(|e| e.to_string())?;
            for (a, v) in icap.iter() {
                worst = worst.max((back.get(a).unwrap() - v).abs());
            }
        }
    }
    ensure(worst <= 1e-10, || format!("round-trip error {worst:e}"))?;
    Ok(format!("counts {counts:?}, round-trip error {worst:.1e}"))
}

fn determinism() -> Result<String, String> {
    let data = concat!(env!("CARGO_MANIFEST_DIR"), "/data/and.json");
    let invocations: [&[&str]; 3] = [
        &[
            "properties",
            "--suite",
            "all",
            "--trials",
            "50",
            "--seed",
            "7",
            "--json",
        ],
        &[
            "compute", data, "--target", "Z", "--src1", "X", "--src2", "Y", "--json",
        ],
        &["nogo", "--json"],
    ];
    for args in invocations {
        let runs: Vec<Vec<u8>> = (0..2)
            .map(|_| {
                Command::new(env!("CARGO_BIN_EXE_pidkit"))
                    .args(args)
                    .env_remove("PID_SEED")
                    .output()
                    .map(|o| o.stdout)
                    .map_err(|e| e.to_string())
            })
            .collect::<Result<_, _>>()?;
        ensure(!runs[0].is_empty() && runs[0] == runs[1], || {
            format!("`{}` differs between runs", args.join(" "))
        })?;
    }
    Ok(format!("{} invocations byte-identical", invocations.len()))
}
