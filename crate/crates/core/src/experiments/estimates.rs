//! Kernel integrals over `I_N` on the pieces of `Ī_N`: the rings
//! `I_j \ I_{j+1}`, the sets `J_t^l` and `J_N^{k,l}`, with exact ratios
//! against the stated bounds.
//!
//! Every set here is a union of cosets of `I_N`, so membership only looks
//! at the first `N` coordinates.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use rayon::prelude::*;

use super::report::{format_float, Column, ColumnKind, ExperimentReport, Value};
use crate::dyadic::{low_mask, tau_bits, DyadicFunction};
use crate::error::{Error, Result};
use crate::exact::{pow2, rational_to_f64};
use crate::kernels::{fejer_numerator, skvortsov_terms};
use crate::walsh::{order, System};

/// Largest `N` for which the partition checks enumerate points.
pub const MAX_PARTITION_RESOLUTION: u32 = 20;

/// `x ∈ I_j \ I_{j+1}`.
pub fn in_ring(n: u32, j: u32, bits: u64) -> bool {
    let x = bits & low_mask(n);
    j < n && x != 0 && x.trailing_zeros() == j
}

/// `x ∈ J_t^l`: `x_t = x_l = 1`, all other coordinates below `l` zero; for
/// `l = N` the single coset `I_N(e_t)`.
pub fn in_j_ring(n: u32, t: u32, l: u32, bits: u64) -> bool {
    if t >= l || l > n {
        return false;
    }
    let x = bits & low_mask(n);
    if l == n {
        x == 1 << t
    } else {
        x & low_mask(l + 1) == (1 << t) | (1 << l)
    }
}

/// `x ∈ J_N^{k,l}`: `x_k = x_l = 1`, zero strictly between and above `l`,
/// free below `k`; `k = -1` means `x = e_l` on the first `N` coordinates.
pub fn in_j_block(n: u32, k: i32, l: u32, bits: u64) -> bool {
    if l >= n || k < -1 || k >= l as i32 {
        return false;
    }
    let x = bits & low_mask(n);
    if k < 0 {
        x == 1 << l
    } else {
        let k = k as u32;
        x >> k == (1 << (l - k)) | 1
    }
}

fn members(n: u32, pred: impl Fn(u64) -> bool) -> Vec<u64> {
    (0..1u64 << n).filter(|&x| pred(x)).collect()
}

/// Exact ratio of a kernel integral against its bound, evaluated at every
/// coset of `I_N` inside the set.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SetRatio {
    pub members: usize,
    pub min_integral: BigRational,
    pub max_integral: BigRational,
    pub bound: BigRational,
}

impl SetRatio {
    pub fn ratio(&self) -> BigRational {
        &self.max_integral / &self.bound
    }

    pub fn ratio_f64(&self) -> f64 {
        rational_to_f64(&self.ratio())
    }

    /// The integral takes a single value on the set.
    pub fn constant(&self) -> bool {
        self.min_integral == self.max_integral
    }
}

fn summarize(integrals: impl IntoIterator<Item = BigRational>, bound: BigRational) -> Result<SetRatio> {
    let mut it = integrals.into_iter();
    let first = it.next().ok_or_else(|| Error::invalid("empty set"))?;
    let (mut min, mut max) = (first.clone(), first);
    let mut count = 1;
    for v in it {
        count += 1;
        if v < min {
            min = v.clone();
        }
        if v > max {
            max = v;
        }
    }
    Ok(SetRatio { members: count, min_integral: min, max_integral: max, bound })
}

/// `∫_{I_N} |n K^w_n(τ_A(x + t))| dt` from the integer values of `n K^w_n`
/// at resolution `A + 1`.
fn lemma3_integral(numer: &[i64], n_res: u32, a: u32, x: u64) -> BigRational {
    let shifts = 1u64 << (a + 1 - n_res);
    let total: i64 = (0..shifts)
        .map(|s| numer[tau_bits(a, x ^ (s << n_res)) as usize].abs())
        .sum();
    BigRational::new(BigInt::from(total), BigInt::from(1u64 << (a + 1)))
}

fn lemma3_check(n: u64, n_res: u32, a: u32, m: i32, l: u32) -> Result<()> {
    if a <= n_res {
        return Err(Error::invalid(format!("need A > N, got A = {a}, N = {n_res}")));
    }
    if a + 1 > 30 {
        return Err(Error::ResolutionTooLarge(a + 1));
    }
    if n == 0 || n >= 2u64 << a {
        return Err(Error::invalid(format!("need 0 < n < 2^(A+1), got n = {n}")));
    }
    if l >= n_res || m < -1 || m >= l as i32 {
        return Err(Error::invalid(format!("J_N^(m,l) with m = {m}, l = {l} at N = {n_res} is empty")));
    }
    Ok(())
}

/// `2^A / 2^{m+l}`
fn lemma3_bound(a: u32, m: i32, l: u32) -> BigRational {
    pow2(a as i64 - m as i64 - l as i64)
}

fn lemma3_from_numer(numer: &[i64], n_res: u32, a: u32, m: i32, l: u32) -> Result<SetRatio> {
    let pts = members(n_res, |x| in_j_block(n_res, m, l, x));
    summarize(pts.into_iter().map(|x| lemma3_integral(numer, n_res, a, x)), lemma3_bound(a, m, l))
}

/// The integral of `n|K^w_n ∘ τ_A|` over `x + I_N` against `2^A/2^{m+l}`,
/// at every coset of `J_N^{m,l}`.
pub fn lemma3_ratio(n: u64, n_res: u32, a: u32, m: i32, l: u32) -> Result<SetRatio> {
    lemma3_check(n, n_res, a, m, l)?;
    let numer = fejer_numerator(System::Paley, n, a + 1);
    lemma3_from_numer(&numer, n_res, a, m, l)
}

fn block_pairs(n_res: u32) -> Vec<(i32, u32)> {
    (0..n_res).flat_map(|l| (-1..l as i32).map(move |m| (m, l))).collect()
}

/// Every `n < 2^{A+1}` and every nonempty `J_N^{m,l}`, for each `A`.
pub fn lemma3_sweep(n_res: u32, a_values: &[u32]) -> Result<ExperimentReport> {
    let mut report = ExperimentReport::new(
        "lemma3",
        vec![
            Column::new("A", ColumnKind::Int),
            Column::new("n", ColumnKind::Int),
            Column::new("m", ColumnKind::Int),
            Column::new("l", ColumnKind::Int),
            Column::new("members", ColumnKind::Int),
            Column::new("integral", ColumnKind::Exact),
            Column::new("bound", ColumnKind::Exact),
            Column::new("ratio", ColumnKind::Exact),
            Column::new("ratio_f64", ColumnKind::Float),
            Column::new("constant", ColumnKind::Bool),
        ],
    );
    let pairs = block_pairs(n_res);
    let mut max_ratio = BigRational::zero();
    let mut all_constant = true;
    for &a in a_values {
        lemma3_check(1, n_res, a, -1, 0)?;
        let len = 1usize << (a + 1);
        // n K_n = Σ_{k=1}^{n} D_k, built up one n at a time
        let mut d = vec![0i64; len];
        let mut numer = vec![0i64; len];
        let mut kernels = Vec::with_capacity(len - 1);
        for k in 0..(len as u64 - 1) {
            for (bits, (dv, nv)) in d.iter_mut().zip(numer.iter_mut()).enumerate() {
                *dv += i64::from(System::Paley.sign(k, bits as u64));
                *nv += *dv;
            }
            kernels.push(numer.clone());
        }
        let rows = kernels
            .par_iter()
            .enumerate()
            .map(|(i, numer)| {
                pairs
                    .iter()
                    .map(|&(m, l)| Ok((i as u64 + 1, m, l, lemma3_from_numer(numer, n_res, a, m, l)?)))
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        for (n, m, l, r) in rows.into_iter().flatten() {
            let ratio = r.ratio();
            all_constant &= r.constant();
            if ratio > max_ratio {
                max_ratio = ratio.clone();
            }
            report.push(vec![
                Value::Int(a as i64),
                Value::Int(n as i64),
                Value::Int(m as i64),
                Value::Int(l as i64),
                Value::Int(r.members as i64),
                r.max_integral.clone().into(),
                r.bound.clone().into(),
                ratio.clone().into(),
                rational_to_f64(&ratio).into(),
                r.constant().into(),
            ])?;
        }
    }
    report
        .meta("N", n_res)
        .meta("A_values", a_values.iter().map(u32::to_string).collect::<Vec<_>>().join(","))
        .meta("empirical_constant", &max_ratio)
        .meta("empirical_constant_f64", format_float(rational_to_f64(&max_ratio)));
    report.check("constant_on_sets", all_constant, "the integral is constant on every J_N^(m,l)");
    report.check("ratios_finite", rational_to_f64(&max_ratio).is_finite(), "every ratio is finite");
    Ok(report)
}

/// `2^{-R} Σ_{s ∈ I_N} |L(x + s)|` at the function's resolution `R`.
fn local_integral(f: &DyadicFunction, n_res: u32, x: u64) -> BigRational {
    let res = f.resolution();
    let shifts = 1u64 << (res - n_res);
    let mut total = BigRational::zero();
    for s in 0..shifts {
        total += f.value_at(x ^ (s << n_res)).abs();
    }
    total / BigRational::from_integer(BigInt::from(1u8) << res)
}

/// Which piece of `Ī_N` an estimate is evaluated on.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EstimateSet {
    /// `I_j \ I_{j+1}`, for `L^1`.
    Ring { j: u32 },
    /// `J_t^l`, `l <= N`, for `L^2`.
    JRing { t: u32, l: u32 },
    /// `J_N^{k,l}`, for `L^3`.
    JBlock { k: i32, l: u32 },
}

impl EstimateSet {
    pub fn term(&self) -> usize {
        match self {
            EstimateSet::Ring { .. } => 1,
            EstimateSet::JRing { .. } => 2,
            EstimateSet::JBlock { .. } => 3,
        }
    }

    pub fn contains(&self, n_res: u32, bits: u64) -> bool {
        match *self {
            EstimateSet::Ring { j } => in_ring(n_res, j, bits),
            EstimateSet::JRing { t, l } => in_j_ring(n_res, t, l, bits),
            EstimateSet::JBlock { k, l } => in_j_block(n_res, k, l, bits),
        }
    }

    /// Index pair as `(first, second)`; rings have no second index.
    fn indices(&self) -> (i64, Option<i64>) {
        match *self {
            EstimateSet::Ring { j } => (j as i64, None),
            EstimateSet::JRing { t, l } => (t as i64, Some(l as i64)),
            EstimateSet::JBlock { k, l } => (k as i64, Some(l as i64)),
        }
    }

    /// The bound without its constant.
    pub fn bound(&self, n_res: u32, m: u64) -> Result<BigRational> {
        let inv_m = BigRational::new(1.into(), m.into());
        let nn = n_res as i64;
        let b = match *self {
            EstimateSet::Ring { j } => pow2(2 * j as i64 - nn),
            EstimateSet::JRing { t, l } if l < n_res => {
                let (t, l) = (t as i64, l as i64);
                (pow2(2 * t) + pow2(2 * l - t)) * pow2(-nn)
            }
            EstimateSet::JRing { t, .. } => {
                let t = t as i64;
                pow2(2 * t - nn) + pow2(nn - t) + pow2(order(m)? as i64 - t)
            }
            EstimateSet::JBlock { k, l } => pow2(order(m)? as i64 - l as i64 - k as i64),
        };
        Ok(b * inv_m)
    }
}

/// All pieces used for the three estimates at `N`.
pub fn estimate_sets(n_res: u32) -> Vec<EstimateSet> {
    let mut out: Vec<EstimateSet> = (0..n_res).map(|j| EstimateSet::Ring { j }).collect();
    for t in 0..n_res {
        for l in t + 1..=n_res {
            out.push(EstimateSet::JRing { t, l });
        }
    }
    out.extend(block_pairs(n_res).into_iter().map(|(k, l)| EstimateSet::JBlock { k, l }));
    out
}

/// `∫_{I_N}|L_m^i(x + s)| dμ(s)` against the bound, over the cosets of a set.
pub fn estimate_ratio(set: EstimateSet, n_res: u32, m: u64) -> Result<SetRatio> {
    let res = n_res.max(order(m)? + 1);
    let terms = skvortsov_terms(m, res)?;
    estimate_from_term(terms.term(set.term()), set, n_res, m)
}

fn estimate_from_term(term: &DyadicFunction, set: EstimateSet, n_res: u32, m: u64) -> Result<SetRatio> {
    let pts = members(n_res, |x| set.contains(n_res, x));
    summarize(pts.into_iter().map(|x| local_integral(term, n_res, x)), set.bound(n_res, m)?)
}

/// Ratios for every `m` in `(m_lo, m_hi]` and every piece of `Ī_N`.
pub fn proof_estimate_ratios(n_res: u32, m_lo: u64, m_hi: u64) -> Result<ExperimentReport> {
    if n_res == 0 || n_res > MAX_PARTITION_RESOLUTION {
        return Err(Error::invalid(format!("N = {n_res} outside 1..={MAX_PARTITION_RESOLUTION}")));
    }
    if m_lo < 1u64 << n_res || m_hi <= m_lo {
        return Err(Error::invalid(format!("need 2^N <= m_lo < m_hi, got ({m_lo}, {m_hi}] at N = {n_res}")));
    }
    if order(m_hi)? + 1 > 24 {
        return Err(Error::ResolutionTooLarge(order(m_hi)? + 1));
    }
    let sets = estimate_sets(n_res);
    let per_m = (m_lo + 1..=m_hi)
        .into_par_iter()
        .map(|m| {
            let res = n_res.max(order(m)? + 1);
            let terms = skvortsov_terms(m, res)?;
            sets.iter()
                .map(|&set| Ok((m, set, estimate_from_term(terms.term(set.term()), set, n_res, m)?)))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    let mut rows: Vec<_> = per_m.into_iter().flatten().collect();
    rows.sort_by_key(|(m, set, _)| (set.term(), *m));

    let mut report = ExperimentReport::new(
        "estimates",
        vec![
            Column::new("term", ColumnKind::Int),
            Column::new("first", ColumnKind::Int),
            Column::new("second", ColumnKind::Int),
            Column::new("m", ColumnKind::Int),
            Column::new("members", ColumnKind::Int),
            Column::new("integral", ColumnKind::Exact),
            Column::new("bound", ColumnKind::Exact),
            Column::new("ratio", ColumnKind::Exact),
            Column::new("ratio_f64", ColumnKind::Float),
            Column::new("constant", ColumnKind::Bool),
        ],
    );
    let mut maxima = [BigRational::zero(), BigRational::zero(), BigRational::zero()];
    let mut all_constant = true;
    for (m, set, r) in &rows {
        let ratio = r.ratio();
        let slot = &mut maxima[set.term() - 1];
        if ratio > *slot {
            *slot = ratio.clone();
        }
        all_constant &= r.constant();
        let (first, second) = set.indices();
        report.push(vec![
            Value::Int(set.term() as i64),
            Value::Int(first),
            second.into(),
            Value::Int(*m as i64),
            Value::Int(r.members as i64),
            r.max_integral.clone().into(),
            r.bound.clone().into(),
            ratio.clone().into(),
            rational_to_f64(&ratio).into(),
            r.constant().into(),
        ])?;
    }
    report.meta("N", n_res).meta("m_range", format!("({m_lo}, {m_hi}]"));
    for (i, max) in maxima.iter().enumerate() {
        report
            .meta(format!("empirical_constant_L{}", i + 1), max)
            .meta(format!("empirical_constant_L{}_f64", i + 1), format_float(rational_to_f64(max)));
    }
    report.check("constant_on_sets", all_constant, "each integral is constant on its set");
    report.check(
        "ratios_finite",
        maxima.iter().all(|m| rational_to_f64(m).is_finite()),
        "every ratio is finite",
    );
    Ok(report)
}

/// Coverage counts of a family of sets over a universe of points.
fn coverage(n_res: u32, universe: impl Fn(u64) -> bool, family: &[Box<dyn Fn(u64) -> bool + '_>]) -> (bool, u64) {
    let mut ok = true;
    let mut covered = 0u64;
    for x in 0..1u64 << n_res {
        let hits = family.iter().filter(|f| f(x)).count();
        if universe(x) {
            ok &= hits == 1;
            covered += 1;
        } else {
            ok &= hits == 0;
        }
    }
    (ok, covered)
}

/// Exhaustive check that the rings partition `Ī_N`, the sets `J_t^l`
/// partition each ring, and the sets `J_N^{k,l}` partition `Ī_N`.
pub fn partition_check(n_res: u32) -> Result<ExperimentReport> {
    if n_res == 0 || n_res > MAX_PARTITION_RESOLUTION {
        return Err(Error::invalid(format!("N = {n_res} outside 1..={MAX_PARTITION_RESOLUTION}")));
    }
    let mut report = ExperimentReport::new(
        "partitions",
        vec![
            Column::new("family", ColumnKind::Label),
            Column::new("index", ColumnKind::Int),
            Column::new("sets", ColumnKind::Int),
            Column::new("points", ColumnKind::Int),
            Column::new("expected_points", ColumnKind::Int),
            Column::new("partition", ColumnKind::Bool),
        ],
    );
    let complement = |x: u64| x & low_mask(n_res) != 0;
    let expected = (1u64 << n_res) - 1;

    let rings: Vec<Box<dyn Fn(u64) -> bool>> = (0..n_res)
        .map(|j| Box::new(move |x| in_ring(n_res, j, x)) as Box<dyn Fn(u64) -> bool>)
        .collect();
    let (ok, pts) = coverage(n_res, complement, &rings);
    let mut all_ok = ok && pts == expected;
    report.push(vec!["rings".into(), Value::Empty, Value::Int(n_res as i64), Value::Int(pts as i64), Value::Int(expected as i64), (ok && pts == expected).into()])?;

    for t in 0..n_res {
        let family: Vec<Box<dyn Fn(u64) -> bool>> = (t + 1..=n_res)
            .map(|l| Box::new(move |x| in_j_ring(n_res, t, l, x)) as Box<dyn Fn(u64) -> bool>)
            .collect();
        let (ok, pts) = coverage(n_res, |x| in_ring(n_res, t, x), &family);
        let want = 1u64 << (n_res - t - 1);
        all_ok &= ok && pts == want;
        report.push(vec![
            "j_ring".into(),
            Value::Int(t as i64),
            Value::Int(family.len() as i64),
            Value::Int(pts as i64),
            Value::Int(want as i64),
            (ok && pts == want).into(),
        ])?;
    }

    let blocks: Vec<Box<dyn Fn(u64) -> bool>> = block_pairs(n_res)
        .into_iter()
        .map(|(k, l)| Box::new(move |x| in_j_block(n_res, k, l, x)) as Box<dyn Fn(u64) -> bool>)
        .collect();
    let (ok, pts) = coverage(n_res, complement, &blocks);
    all_ok &= ok && pts == expected;
    report.push(vec![
        "j_block".into(),
        Value::Empty,
        Value::Int(blocks.len() as i64),
        Value::Int(pts as i64),
        Value::Int(expected as i64),
        (ok && pts == expected).into(),
    ])?;

    report.meta("N", n_res);
    report.check("partitions_exact", all_ok, "every family is disjoint and covers its target exactly");
    Ok(report)
}
