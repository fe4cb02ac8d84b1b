//! Strong summation sums for Fejér means and partial sums, their ratio
//! suites over a random corpus, and the atom transfer harness.

use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::counterexample::{build_counterexample, CounterexampleSpec};
use super::report::{Column, ColumnKind, ExperimentReport, Value};
use crate::dyadic::{DyadicFunction, DyadicInterval};
use crate::error::{Error, Result};
use crate::exact::Exponent;
use crate::hardy::{hardy_norm_pow, lp_norm_pow, random_atom, validate_atom};
use crate::means::SpectralMeans;
use crate::walsh::System;

/// SplitMix64 finalizer, used to derive independent per-instance seeds.
type Scored = (f64, Vec<f64>);
type AtomRow = (bool, bool, Vec<(f64, bool)>);

pub fn mix_seed(seed: u64, parts: &[u64]) -> u64 {
    let mut z = seed;
    for &p in parts {
        z = z.wrapping_add(0x9E37_79B9_7F4A_7C15).wrapping_add(p);
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^= z >> 31;
    }
    z
}

fn check_n(f: &DyadicFunction, n: u64) -> Result<()> {
    if n == 0 || n > 1u64 << f.resolution() {
        return Err(Error::invalid(format!(
            "n = {n} outside 1..=2^{}",
            f.resolution()
        )));
    }
    Ok(())
}

/// `1 / max(1, log2 n)^{⌊p + 1/2⌋}`.
pub fn log_prefactor(p: Exponent, n: u64) -> f64 {
    let e = (2 * p.numer() as u128 + p.denom() as u128) / (2 * p.denom() as u128);
    if e == 0 {
        return 1.0;
    }
    (n as f64).log2().max(1.0).powi(-(e.min(i32::MAX as u128) as i32))
}

/// Running sums `Σ_{m<=k} ∥σ^κ_m f∥_{H_p}^p / m^{2-2p}` for `k = 1..=n`,
/// without the logarithmic prefactor.
pub fn strong_fejer_prefix(f: &DyadicFunction, p: Exponent, n: u64) -> Result<Vec<f64>> {
    check_n(f, n)?;
    let means = SpectralMeans::new(System::Kaczmarz, f);
    let pv = p.value();
    let mut total = 0.0;
    let mut out = Vec::with_capacity(n as usize);
    for m in 1..=n {
        let h = hardy_norm_pow(&means.fejer_mean(m)?, pv)?;
        total += h / (m as f64).powf(2.0 - 2.0 * pv);
        out.push(total);
    }
    Ok(out)
}

/// `(1/log^{⌊p+1/2⌋} n) Σ_{m=1}^{n} ∥σ^κ_m f∥_{H_p}^p / m^{2-2p}` for
/// `0 < p <= 1/2`, with `log = log2` floored at one.
pub fn strong_fejer_sum(f: &DyadicFunction, p: Exponent, n: u64) -> Result<f64> {
    if !p.le_ratio(1, 2) {
        return Err(Error::invalid(format!("strong Fejér sum needs 0 < p <= 1/2, got {p}")));
    }
    let prefix = strong_fejer_prefix(f, p, n)?;
    Ok(prefix[n as usize - 1] * log_prefactor(p, n))
}

/// Running sums `Σ_{k<=j} ∥S^κ_k f∥_p^p / k^{2-p}` for `j = 1..=n`.
pub fn strong_partial_prefix(f: &DyadicFunction, p: Exponent, n: u64) -> Result<Vec<f64>> {
    check_n(f, n)?;
    let means = SpectralMeans::new(System::Kaczmarz, f);
    let pv = p.value();
    let mut total = 0.0;
    let mut out = Vec::with_capacity(n as usize);
    for k in 1..=n {
        let v = lp_norm_pow(&means.partial_sum(k)?, pv)?;
        total += v / (k as f64).powf(2.0 - pv);
        out.push(total);
    }
    Ok(out)
}

/// `Σ_{k=1}^{n} ∥S^κ_k f∥_p^p / k^{2-p}` for `0 < p < 1`.
pub fn strong_partial_sum(f: &DyadicFunction, p: Exponent, n: u64) -> Result<f64> {
    if !p.lt_ratio(1, 1) {
        return Err(Error::invalid(format!("strong partial sum needs 0 < p < 1, got {p}")));
    }
    Ok(strong_partial_prefix(f, p, n)?[n as usize - 1])
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CorpusKind {
    Atom,
    Function,
    Counterexample,
    Constant,
}

impl CorpusKind {
    pub fn name(&self) -> &'static str {
        match self {
            CorpusKind::Atom => "atom",
            CorpusKind::Function => "function",
            CorpusKind::Counterexample => "counterexample",
            CorpusKind::Constant => "constant",
        }
    }
}

#[derive(Clone, Debug)]
pub struct CorpusItem {
    pub kind: CorpusKind,
    pub trial: u64,
    pub rank: Option<u32>,
    pub f: DyadicFunction,
}

/// Which instances a ratio suite runs over.
#[derive(Clone, Copy, Debug)]
pub struct CorpusSpec {
    pub trials: u64,
    pub seed: u64,
    pub include_counterexample: bool,
    pub include_constant: bool,
}

/// A random function with values `k/16`, `k` uniform in `[-64, 64]`.
pub fn random_function(resolution: u32, seed: u64) -> Result<DyadicFunction> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let len = 1usize << resolution;
    let values = (0..len).map(|_| BigRational::new(rng.random_range(-64i64..=64).into(), 16.into())).collect();
    DyadicFunction::new(resolution, values)
}

/// `trials` random `p`-atoms on `I_r` (`r = trial mod N`), `trials` random
/// functions, and optionally the default counterexample truncated to `N`
/// and the constant one.
pub fn build_corpus(p: Exponent, resolution: u32, spec: CorpusSpec) -> Result<Vec<CorpusItem>> {
    let mut out = Vec::new();
    if spec.include_constant {
        out.push(CorpusItem {
            kind: CorpusKind::Constant,
            trial: 0,
            rank: None,
            f: DyadicFunction::one(resolution)?,
        });
    }
    for trial in 0..spec.trials {
        let rank = if resolution == 0 { 0 } else { (trial % resolution as u64) as u32 };
        let seed = mix_seed(spec.seed, &[1, resolution as u64, trial]);
        out.push(CorpusItem {
            kind: CorpusKind::Atom,
            trial,
            rank: Some(rank),
            f: random_atom(p, resolution, rank, seed)?,
        });
    }
    for trial in 0..spec.trials {
        let seed = mix_seed(spec.seed, &[2, resolution as u64, trial]);
        out.push(CorpusItem {
            kind: CorpusKind::Function,
            trial,
            rank: None,
            f: random_function(resolution, seed)?,
        });
    }
    if spec.include_counterexample {
        let base = CounterexampleSpec::default();
        let orders: Vec<u32> = base.alpha_orders.iter().copied().filter(|a| *a < resolution).collect();
        if !orders.is_empty() {
            let cspec = CounterexampleSpec { alpha_orders: orders, ..base };
            let ce = build_counterexample(&cspec)?;
            let f = ce.f.representative().refine(resolution)?;
            out.push(CorpusItem {
                kind: CorpusKind::Counterexample,
                trial: 0,
                rank: None,
                f,
            });
        }
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StrongSum {
    /// Fejér means in `H_p`, weight `m^{2-2p}`, log prefactor.
    Fejer,
    /// Partial sums in `L_p`, weight `k^{2-p}`.
    Partial,
}

/// Ratios of a strong sum to `∥f∥_{H_p}^p` over a corpus.
#[derive(Clone, Debug)]
pub struct RatioSuite {
    pub report: ExperimentReport,
    /// Ratio at `n = 2^N` for each nondegenerate instance, in corpus order.
    pub final_ratios: Vec<f64>,
    pub skipped: u64,
}

impl RatioSuite {
    pub fn max_ratio(&self) -> f64 {
        self.final_ratios.iter().copied().fold(f64::NAN, f64::max)
    }

    pub fn min_ratio(&self) -> f64 {
        self.final_ratios.iter().copied().fold(f64::NAN, f64::min)
    }
}

fn ratio_columns() -> Vec<Column> {
    vec![
        Column::new("resolution", ColumnKind::Int),
        Column::new("p", ColumnKind::Exact),
        Column::new("kind", ColumnKind::Label),
        Column::new("trial", ColumnKind::Int),
        Column::new("rank", ColumnKind::Int),
        Column::new("n", ColumnKind::Int),
        Column::new("hardy_pow", ColumnKind::Float),
        Column::new("strong_sum", ColumnKind::Float),
        Column::new("ratio", ColumnKind::Float),
    ]
}

/// Runs a strong-sum ratio suite at one resolution, one row per instance
/// and dyadic prefix `n = 1, 2, 4, …, 2^N`.
pub fn ratio_suite(kind: StrongSum, p: Exponent, resolution: u32, corpus: CorpusSpec) -> Result<RatioSuite> {
    match kind {
        StrongSum::Fejer if !p.le_ratio(1, 2) => {
            return Err(Error::invalid(format!("Fejér suite needs 0 < p <= 1/2, got {p}")))
        }
        StrongSum::Partial if !p.lt_ratio(1, 1) => {
            return Err(Error::invalid(format!("partial-sum suite needs 0 < p < 1, got {p}")))
        }
        _ => {}
    }
    let items = build_corpus(p, resolution, corpus)?;
    let n_top = 1u64 << resolution;
    let pv = p.value();
    let results: Vec<Result<Option<Scored>>> = items
        .par_iter()
        .map(|item| {
            let h = hardy_norm_pow(&item.f, pv)?;
            if h == 0.0 {
                return Ok(None);
            }
            let prefix = match kind {
                StrongSum::Fejer => strong_fejer_prefix(&item.f, p, n_top)?,
                StrongSum::Partial => strong_partial_prefix(&item.f, p, n_top)?,
            };
            Ok(Some((h, prefix)))
        })
        .collect();

    let name = match kind {
        StrongSum::Fejer => "theorem1",
        StrongSum::Partial => "simon",
    };
    let mut report = ExperimentReport::new(name, ratio_columns());
    let mut final_ratios = Vec::new();
    let mut skipped = 0u64;
    for (item, res) in items.iter().zip(results) {
        let Some((h, prefix)) = res? else {
            skipped += 1;
            continue;
        };
        let mut n = 1u64;
        loop {
            let raw = prefix[n as usize - 1];
            let sum = match kind {
                StrongSum::Fejer => raw * log_prefactor(p, n),
                StrongSum::Partial => raw,
            };
            let ratio = sum / h;
            report.push(vec![
                Value::Int(resolution as i64),
                Value::Exact(p.to_rational()),
                item.kind.name().into(),
                Value::Int(item.trial as i64),
                item.rank.map(|r| r as i64).into(),
                Value::Int(n as i64),
                h.into(),
                sum.into(),
                ratio.into(),
            ])?;
            if n == n_top {
                final_ratios.push(ratio);
                break;
            }
            n *= 2;
        }
    }
    let mut suite = RatioSuite { report, final_ratios, skipped };
    let (max, min) = (suite.max_ratio(), suite.min_ratio());
    let finite = suite.final_ratios.iter().all(|r| r.is_finite());
    suite
        .report
        .meta("resolution", resolution)
        .meta("p", p)
        .meta("trials", corpus.trials)
        .meta("seed", corpus.seed)
        .meta("skipped_degenerate", skipped)
        .meta("instances", suite.final_ratios.len())
        .meta("max_ratio", super::report::format_float(max))
        .meta("min_ratio", super::report::format_float(min));
    suite.report.check("ratios_finite", finite, format!("max {max}, min {min}"));
    Ok(suite)
}

pub fn theorem1_ratio_suite(p: Exponent, resolution: u32, corpus: CorpusSpec) -> Result<RatioSuite> {
    ratio_suite(StrongSum::Fejer, p, resolution, corpus)
}

pub fn simon_suite(p: Exponent, resolution: u32, corpus: CorpusSpec) -> Result<RatioSuite> {
    ratio_suite(StrongSum::Partial, p, resolution, corpus)
}

/// For random atoms on `I_r` and each `m <= n_max`, the integral of
/// `|σ^κ_m a|^p` over the complement of `I_r`; also checks exactly that
/// `σ^κ_m a = 0` for `m <= 2^r` and that every atom is valid.
pub fn atom_transfer_check(
    p: Exponent,
    resolution: u32,
    trials: u64,
    n_max: u64,
    seed: u64,
) -> Result<ExperimentReport> {
    if !p.le_ratio(1, 2) {
        return Err(Error::invalid(format!("atom transfer needs 0 < p <= 1/2, got {p}")));
    }
    if n_max == 0 || n_max > 1u64 << resolution {
        return Err(Error::invalid(format!("n_max = {n_max} outside 1..=2^{resolution}")));
    }
    let pv = p.value();
    let mut atoms = Vec::new();
    for trial in 0..trials {
        let rank = if resolution == 0 { 0 } else { (trial % resolution as u64) as u32 };
        let a = random_atom(p, resolution, rank, mix_seed(seed, &[3, resolution as u64, trial]))?;
        atoms.push((trial, rank, a));
    }
    let rows: Vec<Result<AtomRow>> = atoms
        .par_iter()
        .map(|(_, rank, a)| {
            let interval = DyadicInterval::at_origin(*rank, resolution)?;
            let valid = validate_atom(a, &interval, p)?.valid;
            let means = SpectralMeans::new(System::Kaczmarz, a);
            let mut vanish = true;
            let mut per_m = Vec::with_capacity(n_max as usize);
            for m in 1..=n_max {
                let s = means.fejer_mean(m)?;
                let zero = s.is_zero();
                if m <= 1u64 << rank && !zero {
                    vanish = false;
                }
                let mut total = 0.0;
                for bits in 0..s.len() as u64 {
                    if !interval.contains_bits(bits) && !s.is_zero_at(bits) {
                        total += s.value_f64(bits).abs().powf(pv);
                    }
                }
                per_m.push((total / s.len() as f64, zero));
            }
            Ok((valid, vanish, per_m))
        })
        .collect();

    let mut report = ExperimentReport::new(
        "atoms",
        vec![
            Column::new("trial", ColumnKind::Int),
            Column::new("rank", ColumnKind::Int),
            Column::new("m", ColumnKind::Int),
            Column::new("outside_integral", ColumnKind::Float),
            Column::new("mean_is_zero", ColumnKind::Bool),
        ],
    );
    let mut all_valid = true;
    let mut all_vanish = true;
    let mut max = 0.0f64;
    for ((trial, rank, _), res) in atoms.iter().zip(rows) {
        let (valid, vanish, per_m) = res?;
        all_valid &= valid;
        all_vanish &= vanish;
        for (i, (integral, zero)) in per_m.into_iter().enumerate() {
            max = max.max(integral);
            report.push(vec![
                Value::Int(*trial as i64),
                Value::Int(*rank as i64),
                Value::Int(i as i64 + 1),
                integral.into(),
                zero.into(),
            ])?;
        }
    }
    report
        .meta("p", p)
        .meta("resolution", resolution)
        .meta("trials", trials)
        .meta("n_max", n_max)
        .meta("seed", seed)
        .meta("max_outside_integral", super::report::format_float(max));
    report.check("atoms_valid", all_valid, "every random atom passes the exact atom conditions");
    report.check(
        "low_means_vanish",
        all_vanish,
        "σ_m a = 0 exactly for m <= 2^rank",
    );
    report.check("finite", max.is_finite(), format!("max {max}"));
    Ok(report)
}
