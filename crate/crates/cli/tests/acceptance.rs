//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any
//! criterion fails.

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::Command;
use std::time::Instant;

use kaczmarz::dyadic::convolve;
use kaczmarz::experiments::strong::{mix_seed, random_function};
use kaczmarz::experiments::verification::{
    check_dirichlet_dyadic, check_gat, check_kaczmarz_reordering, check_rho_involution, check_skvortsov,
    last_block_variation,
};
use kaczmarz::experiments::{
    divergence_report, lemma3_sweep, partition_check, proof_estimate_ratios, simon_suite, theorem1_ratio_suite,
    CorpusSpec, CounterexampleSpec, ExperimentReport,
};
use kaczmarz::hardy::conjugate_transform;
use kaczmarz::kernels::{fejer_kernel, fejer_l1_sweep};
use kaczmarz::means::{fejer_mean_direct, SpectralMeans};
use kaczmarz::{Exponent, GroupPoint, System};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

const SEED: u64 = 20_240_601;
const GROWTH_LIMIT: f64 = 0.25;

fn verdict(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn kernel_identities() -> Outcome {
    let c = check_skvortsov(7).map_err(err)?;
    verdict(c.passed() && c.cases == 64, format!("{} of {} n at resolution 7 exact", c.cases - c.failures, c.cases))
}

fn closed_forms() -> Outcome {
    let d = check_dirichlet_dyadic(10).map_err(err)?;
    let g = check_gat(10).map_err(err)?;
    verdict(
        d.passed() && g.passed(),
        format!("dyadic Dirichlet {}/{}, Gát {}/{} exact for N <= 10", d.cases - d.failures, d.cases, g.cases - g.failures, g.cases),
    )
}

fn system_equivalence() -> Outcome {
    let k = check_kaczmarz_reordering(10).map_err(err)?;
    let r = check_rho_involution(16).map_err(err)?;
    verdict(
        k.passed() && r.passed(),
        format!("κ_n = w_ρ(n) for {} n; ρ block involution for {} n", k.cases - k.failures, r.cases - r.failures),
    )
}

fn mean_equivalence() -> Outcome {
    let n_res = 5;
    let mut compared = 0u64;
    for trial in 0..100u64 {
        let f = random_function(n_res, mix_seed(SEED, &[4, trial])).map_err(err)?;
        for system in System::ALL {
            let means = SpectralMeans::new(system, &f);
            for n in 1..=1u64 << n_res {
                let multiplier = means.fejer_mean(n).map_err(err)?;
                let direct = fejer_mean_direct(system, n, &f).map_err(err)?;
                let conv = convolve(&f, &fejer_kernel(system, n, n_res).map_err(err)?).map_err(err)?;
                if multiplier != direct || multiplier != conv {
                    return Err(format!("{system} n = {n} trial {trial} disagree"));
                }
                compared += 1;
            }
        }
    }
    Ok(format!("{compared} (f, system, n) cases agree exactly"))
}

fn fejer_l1() -> Outcome {
    let sweep = fejer_l1_sweep(System::Kaczmarz, 1 << 10).map_err(err)?;
    let v = last_block_variation(&sweep.block_maxima).ok_or("fewer than two complete blocks")?;
    let global = kaczmarz::exact::rational_to_f64(&sweep.global_max);
    verdict(
        v < 0.10,
        format!("last two block maxima differ by {:.2}%; global max {global:.6} at n = {}", 100.0 * v, sweep.argmax),
    )
}

fn corpus(trials: u64) -> CorpusSpec {
    CorpusSpec { trials, seed: SEED, include_counterexample: true, include_constant: true }
}

type Suite = fn(Exponent, u32, CorpusSpec) -> kaczmarz::Result<kaczmarz::experiments::RatioSuite>;

fn growth_suite(suite: Suite, ps: [Exponent; 2], resolutions: &[u32]) -> Outcome {
    let mut parts = Vec::new();
    let mut ok = true;
    for p in ps {
        let mut maxima = BTreeMap::new();
        let mut instances = 0;
        for &n in resolutions {
            let s = suite(p, n, corpus(100)).map_err(err)?;
            ok &= s.final_ratios.iter().all(|r| r.is_finite()) && s.report.all_checks_pass();
            instances = instances.max(s.final_ratios.len());
            maxima.insert(n, s.max_ratio());
        }
        let first = maxima[&resolutions[0]];
        let last = maxima[resolutions.last().expect("resolutions")];
        let growth = last / first - 1.0;
        ok &= growth < GROWTH_LIMIT;
        let shown: Vec<String> = maxima.iter().map(|(n, m)| format!("N={n}: {m:.4}")).collect();
        parts.push(format!("p={p} ({instances} instances) max {}; growth {:+.1}%", shown.join(", "), 100.0 * growth));
    }
    verdict(ok, parts.join("; "))
}

fn theorem1() -> Outcome {
    growth_suite(theorem1_ratio_suite, [Exponent::half(), Exponent::quarter()], &[5, 6, 7])
}

fn theorem2() -> Outcome {
    let r = divergence_report(&CounterexampleSpec::default()).map_err(err)?;
    let failed: Vec<&str> = r.checks.iter().filter(|c| !c.passed).map(|c| c.name.as_str()).collect();
    let totals: Vec<f64> = (0..4)
        .map(|k| r.metadata.get(&format!("block_total_{k}")).and_then(|v| v.parse().ok()).unwrap_or(f64::NAN))
        .collect();
    let cumulative_up = totals.iter().all(|t| *t > 0.0);
    let monotone = totals.windows(2).all(|w| w[1] > w[0]);
    let shown: Vec<String> = totals.iter().map(|t| format!("{t:.4}")).collect();
    verdict(
        failed.is_empty() && cumulative_up && monotone,
        format!(
            "exact checks {}; block totals [{}] {}",
            if failed.is_empty() { "all pass".to_string() } else { format!("failed: {}", failed.join(",")) },
            shown.join(", "),
            if monotone { "increase with k" } else { "not monotone in k" }
        ),
    )
}

fn conjugate_commutation() -> Outcome {
    let n_res = 5;
    for trial in 0..50u64 {
        let f = random_function(n_res, mix_seed(SEED, &[8, trial])).map_err(err)?;
        let t_bits = mix_seed(SEED, &[9, trial]) & ((1 << (n_res + 1)) - 1);
        let t = GroupPoint::new(t_bits, n_res + 1).map_err(err)?;
        let conj = conjugate_transform(&f, t).map_err(err)?;
        let means = SpectralMeans::new(System::Kaczmarz, &f);
        let conj_means = SpectralMeans::new(System::Kaczmarz, &conj);
        for m in 1..=1u64 << n_res {
            let lhs = conjugate_transform(&means.fejer_mean(m).map_err(err)?, t).map_err(err)?;
            if lhs != conj_means.fejer_mean(m).map_err(err)? {
                return Err(format!("trial {trial}, m = {m} differ"));
            }
        }
    }
    Ok("50 (f, t) pairs, all m <= 32 exact".into())
}

fn lemma3_estimates() -> Outcome {
    let l = lemma3_sweep(3, &[4, 5]).map_err(err)?;
    let e = proof_estimate_ratios(3, 8, 32).map_err(err)?;
    let m = |r: &ExperimentReport, k: &str| r.metadata.get(k).cloned().unwrap_or_default();
    verdict(
        l.all_checks_pass() && e.all_checks_pass(),
        format!(
            "constant on every set; constants: lemma {} ({} rows), L1 {}, L2 {}, L3 {} ({} rows)",
            m(&l, "empirical_constant"),
            l.rows.len(),
            m(&e, "empirical_constant_L1"),
            m(&e, "empirical_constant_L2"),
            m(&e, "empirical_constant_L3"),
            e.rows.len()
        ),
    )
}

fn partitions() -> Outcome {
    for n in 1..=10 {
        if !partition_check(n).map_err(err)?.all_checks_pass() {
            return Err(format!("partition fails at N = {n}"));
        }
    }
    Ok("rings, J_t^l and J_N^(k,l) exact for N = 1..10".into())
}

fn simon() -> Outcome {
    growth_suite(simon_suite, [Exponent::half(), Exponent::new(3, 4).expect("3/4")], &[5, 7])
}

fn run_cli(dir: &std::path::Path, name: &str, workers: &str, args: &[&str]) -> Result<Vec<u8>, String> {
    let out = dir.join(name);
    let status = Command::new(env!("CARGO_BIN_EXE_kaczmarz"))
        .args(args)
        .arg("--output")
        .arg(&out)
        .env("KACZMARZ_WORKERS", workers)
        .output()
        .map_err(err)?;
    if !status.status.success() {
        return Err(format!("{args:?} exited with {}", status.status));
    }
    std::fs::read(&out).map_err(err)
}

fn determinism() -> Outcome {
    let dir: PathBuf = std::env::temp_dir().join(format!("kaczmarz-acceptance-{}", std::process::id()));
    std::fs::create_dir_all(&dir).map_err(err)?;
    let configs: [&[&str]; 3] = [
        &["theorem1", "--resolution", "5", "--trials", "20", "--seed", "7", "--format", "json"],
        &["atoms", "--resolution", "5", "--trials", "10", "--n-max", "32", "--seed", "7"],
        &["theorem2", "--format", "json"],
    ];
    let mut compared = 0;
    for (i, args) in configs.iter().enumerate() {
        let a = run_cli(&dir, &format!("{i}-a"), "1", args)?;
        let b = run_cli(&dir, &format!("{i}-b"), "3", args)?;
        if a != b || a.is_empty() {
            return Err(format!("{args:?} differs between runs"));
        }
        compared += a.len();
    }
    let _ = std::fs::remove_dir_all(&dir);
    Ok(format!("3 configurations byte-identical across runs ({compared} bytes)"))
}

fn main() {
    let criteria: [Criterion; 12] = [
        ("kernel identity suite", kernel_identities),
        ("closed forms", closed_forms),
        ("system equivalence", system_equivalence),
        ("mean equivalence", mean_equivalence),
        ("Fejér kernel L1 norms", fejer_l1),
        ("strong Fejér ratio suite", theorem1),
        ("divergence construction", theorem2),
        ("conjugate commutation", conjugate_commutation),
        ("kernel integral estimates", lemma3_estimates),
        ("partitions", partitions),
        ("strong partial-sum ratio suite", simon),
        ("determinism", determinism),
    ];
    let mut failures = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = run();
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS {:>2} {name}: {detail} [{secs:.1}s]", i + 1),
            Err(detail) => {
                failures += 1;
                println!("FAIL {:>2} {name}: {detail} [{secs:.1}s]", i + 1);
            }
        }
    }
    println!("{} of {} criteria pass", criteria.len() - failures, criteria.len());
    if failures > 0 {
        std::process::exit(1);
    }
}
