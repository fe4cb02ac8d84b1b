//! The divergence construction: `F = Σ_k λ_k a_k` with dyadic-block atoms,
//! its Kaczmarz spectrum, and the weak-type series `Σ ∥σ_n F∥^p / Φ(n)`
//! along `n ≡ 5 (mod 8)`.
//!
//! With `Φ(n) = n^e` every coefficient is `2^c` for a rational `c`, so `F`
//! is stored as `Σ_r 2^r G_r` over distinct fractional parts `r ∈ [0, 1)`
//! with rational `G_r`. Powers `2^r` with distinct such `r` are linearly
//! independent over the rationals, so a linear identity holds for `F` iff it
//! holds for every `G_r`.

use std::collections::BTreeMap;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;

use super::report::{format_float, Column, ColumnKind, ExperimentReport, Value};
use crate::dyadic::{DyadicFunction, DyadicInterval};
use crate::error::{Error, Result};
use crate::exact::{pow2, rational_to_f64, Exponent};
use crate::hardy::{validate_scaled_atom, weak_lp_norm_pow, weak_lp_norm_pow_values};
use crate::kernels::{dirichlet, dirichlet_dyadic_closed, fejer_kernel};
use crate::means::SpectralMeans;
use crate::walsh::{kaczmarz_spectrum, System};

/// Largest resolution the construction will allocate.
pub const MAX_COUNTEREXAMPLE_RESOLUTION: u32 = 16;

fn split_log2(c: &BigRational) -> (i64, BigRational) {
    let fl = c.floor();
    let frac = c - &fl;
    (fl.to_integer().to_i64().expect("exponent fits i64"), frac)
}

/// `Σ_r 2^r G_r`, keyed by `r ∈ [0, 1)`; parts are never zero.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SurdFunction {
    resolution: u32,
    parts: BTreeMap<BigRational, DyadicFunction>,
}

impl SurdFunction {
    pub fn zero(resolution: u32) -> Result<Self> {
        DyadicFunction::zero(resolution)?;
        Ok(SurdFunction { resolution, parts: BTreeMap::new() })
    }

    pub fn resolution(&self) -> u32 {
        self.resolution
    }

    /// Adds `2^c g`.
    pub fn add_scaled(&mut self, log2_scale: &BigRational, g: &DyadicFunction) -> Result<()> {
        if g.resolution() != self.resolution {
            return Err(Error::ResolutionMismatch { left: self.resolution, right: g.resolution() });
        }
        let (int, frac) = split_log2(log2_scale);
        let term = g.scale(&pow2(int));
        let sum = match self.parts.remove(&frac) {
            Some(old) => old.checked_add(&term)?,
            None => term,
        };
        if !sum.is_zero() {
            self.parts.insert(frac, sum);
        }
        Ok(())
    }

    pub fn parts(&self) -> impl Iterator<Item = (&BigRational, &DyadicFunction)> {
        self.parts.iter()
    }

    pub fn part(&self, frac: &BigRational) -> Option<&DyadicFunction> {
        self.parts.get(frac)
    }

    pub fn is_zero(&self) -> bool {
        self.parts.is_empty()
    }

    pub fn is_zero_at(&self, bits: u64) -> bool {
        self.parts.values().all(|g| g.is_zero_at(bits))
    }

    /// The only part, when there is exactly one.
    pub fn single_class(&self) -> Option<(&BigRational, &DyadicFunction)> {
        let mut it = self.parts.iter();
        match (it.next(), it.next()) {
            (Some(only), None) => Some(only),
            _ => None,
        }
    }

    /// Applies a rational-linear operator to every part.
    pub fn map_linear(&self, op: impl Fn(&DyadicFunction) -> Result<DyadicFunction>) -> Result<Self> {
        let mut parts = BTreeMap::new();
        let mut resolution = self.resolution;
        for (r, g) in &self.parts {
            let h = op(g)?;
            resolution = h.resolution();
            if !h.is_zero() {
                parts.insert(r.clone(), h);
            }
        }
        Ok(SurdFunction { resolution, parts })
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self> {
        let mut out = self.clone();
        for (r, g) in &other.parts {
            out.add_scaled(r, &g.neg())?;
        }
        Ok(out)
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        let mut out = self.clone();
        for (r, g) in &other.parts {
            out.add_scaled(r, g)?;
        }
        Ok(out)
    }

    pub fn values_f64(&self) -> Vec<f64> {
        let mut out = vec![0.0; 1usize << self.resolution];
        for (r, g) in &self.parts {
            let s = rational_to_f64(r).exp2();
            for (i, v) in out.iter_mut().enumerate() {
                *v += s * g.value_f64(i as u64);
            }
        }
        out
    }

    /// A rational function proportional to `F` when there is one class,
    /// otherwise a rational approximation accurate to about 2^-60 per part.
    pub fn representative(&self) -> DyadicFunction {
        if let Some((_, g)) = self.single_class() {
            return g.clone();
        }
        let mut out = DyadicFunction::zero(self.resolution).expect("validated resolution");
        for (r, g) in &self.parts {
            let s = (rational_to_f64(r).exp2() * 2f64.powi(60)).round();
            let q = BigRational::new(BigInt::from(s as u64), BigInt::one() << 60);
            out = out.checked_add(&g.scale(&q)).expect("same resolution");
        }
        out
    }

    /// `∥F∥_{L_{p,∞}}^p`; exact level sets when there is one class.
    pub fn weak_lp_norm_pow(&self, p: f64) -> Result<f64> {
        match self.single_class() {
            Some((r, g)) => Ok(weak_lp_norm_pow(g, p)? * (rational_to_f64(r) * p).exp2()),
            None if self.parts.is_empty() => Ok(0.0),
            None => weak_lp_norm_pow_values(&self.values_f64(), p),
        }
    }
}

/// Parameters of the construction: `Φ(n) = n^e`, orders `|α_k|`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CounterexampleSpec {
    pub p: Exponent,
    pub phi_exponent: Exponent,
    pub alpha_orders: Vec<u32>,
}

impl Default for CounterexampleSpec {
    /// `p = 1/4`, `Φ(n) = n^{3/4}`, `|α_k| = 2k + 2` for `k <= 3`.
    fn default() -> Self {
        CounterexampleSpec {
            p: Exponent::quarter(),
            phi_exponent: Exponent::new(3, 4).expect("positive"),
            alpha_orders: (0..=3).map(|k| 2 * k + 2).collect(),
        }
    }
}

impl CounterexampleSpec {
    /// Orders `2k + 2` for `k <= k_max`.
    pub fn default_orders(k_max: u32) -> Vec<u32> {
        (0..=k_max).map(|k| 2 * k + 2).collect()
    }

    pub fn k_max(&self) -> Option<usize> {
        self.alpha_orders.len().checked_sub(1)
    }

    pub fn resolution(&self) -> u32 {
        self.alpha_orders.last().map_or(3, |a| a + 1).max(3)
    }

    pub fn validate(&self) -> Result<()> {
        if !self.p.lt_ratio(1, 2) {
            return Err(Error::invalid(format!("construction needs 0 < p < 1/2, got {}", self.p)));
        }
        // Φ(2^k) = o(2^{k(2-2p)}) for a power law means e < 2 - 2p
        let limit = BigRational::from_integer(2.into()) - self.p.to_rational() * BigRational::from_integer(2.into());
        if self.phi_exponent.to_rational() >= limit {
            return Err(Error::invalid(format!(
                "Φ(n) = n^{} grows too fast: need exponent < 2 - 2p = {}",
                self.phi_exponent, limit
            )));
        }
        for w in self.alpha_orders.windows(2) {
            if w[1] <= w[0] {
                return Err(Error::invalid("alpha orders must be strictly increasing"));
            }
        }
        if let Some(a) = self.alpha_orders.iter().find(|&&a| a < 2) {
            return Err(Error::invalid(format!("alpha order {a} is below 2")));
        }
        if self.resolution() > MAX_COUNTEREXAMPLE_RESOLUTION {
            return Err(Error::ResolutionTooLarge(self.resolution()));
        }
        Ok(())
    }

    /// `log2 Φ(n)` for `n = 2^j`.
    fn log2_phi_dyadic(&self, j: u32) -> BigRational {
        self.phi_exponent.to_rational() * BigRational::from_integer(j.into())
    }

    pub fn phi(&self, n: u64) -> f64 {
        (n as f64).powf(self.phi_exponent.value())
    }

    /// `log2 Φ^{1/(2p)}(2^{a+1})`: the block coefficient of `F`.
    pub fn log2_block_coeff(&self, a: u32) -> BigRational {
        self.log2_phi_dyadic(a + 1) * self.p.reciprocal() / BigRational::from_integer(2.into())
    }

    /// `log2 λ_k = log2 Φ^{1/(2p)}(2^{a+1}) - a(1/p - 1)`.
    pub fn log2_lambda(&self, a: u32) -> BigRational {
        self.log2_block_coeff(a) - self.log2_atom_scale(a)
    }

    /// `log2` of the atom prefactor `2^{a(1/p - 1)}`.
    pub fn log2_atom_scale(&self, a: u32) -> BigRational {
        BigRational::from_integer(a.into()) * (self.p.reciprocal() - BigRational::one())
    }

    /// `Σ_k Φ^{1/2}(2^{a_k+1}) / 2^{a_k(1-p)}`, finite by construction.
    pub fn summability_proxy(&self) -> f64 {
        let p = self.p.value();
        self.alpha_orders
            .iter()
            .map(|&a| (self.phi_exponent.value() * (a + 1) as f64 / 2.0 - a as f64 * (1.0 - p)).exp2())
            .sum()
    }
}

/// Parses a comma-separated list of orders such as `2,4,6,8`.
pub fn parse_orders(s: &str) -> Result<Vec<u32>> {
    if s.len() > 4096 {
        return Err(Error::Parse("order list too long".into()));
    }
    let t = s.trim();
    if t.is_empty() {
        return Ok(Vec::new());
    }
    t.split(',')
        .map(|part| {
            let part = part.trim();
            u32::from_str(part).map_err(|e| Error::Parse(format!("order {part:?}: {e}")))
        })
        .collect()
}

#[derive(Clone, Debug)]
pub struct Counterexample {
    pub spec: CounterexampleSpec,
    pub resolution: u32,
    pub f: SurdFunction,
    /// `log2 λ_k`
    pub lambda_log2: Vec<BigRational>,
    /// `(log2 s_k, D_{2^{a+1}} - D_{2^a})` with `a_k = 2^{s_k}` times the
    /// difference.
    pub atoms: Vec<(BigRational, DyadicFunction)>,
}

/// `D_{2^{a+1}} - D_{2^a}`, whose spectrum in either system is the
/// indicator of the block `[2^a, 2^{a+1})`.
fn block_difference(a: u32, resolution: u32) -> Result<DyadicFunction> {
    dirichlet_dyadic_closed(a + 1, resolution)?.checked_sub(&dirichlet_dyadic_closed(a, resolution)?)
}

pub fn build_counterexample(spec: &CounterexampleSpec) -> Result<Counterexample> {
    spec.validate()?;
    let resolution = spec.resolution();
    let mut f = SurdFunction::zero(resolution)?;
    let mut lambda_log2 = Vec::new();
    let mut atoms = Vec::new();
    for &a in &spec.alpha_orders {
        let diff = block_difference(a, resolution)?;
        let lam = spec.log2_lambda(a);
        let s = spec.log2_atom_scale(a);
        // λ_k a_k = 2^{log λ + s} (D_{2^{a+1}} - D_{2^a})
        f.add_scaled(&(&lam + &s), &diff)?;
        lambda_log2.push(lam);
        atoms.push((s, diff));
    }
    Ok(Counterexample {
        spec: spec.clone(),
        resolution,
        f,
        lambda_log2,
        atoms,
    })
}

impl Counterexample {
    /// Every `a_k` is a `p`-atom on `I_{|α_k|}`.
    pub fn atoms_valid(&self) -> Result<bool> {
        for ((s, diff), &a) in self.atoms.iter().zip(&self.spec.alpha_orders) {
            let interval = DyadicInterval::at_origin(a, self.resolution)?;
            if !validate_scaled_atom(diff, s, &interval, self.spec.p)?.valid {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// The Kaczmarz spectrum is `Φ^{1/2p}(2^{a+1})` on each block and zero
    /// elsewhere, checked per class.
    pub fn spectrum_matches(&self) -> Result<bool> {
        let len = 1u64 << self.resolution;
        let mut expected: BTreeMap<BigRational, Vec<BigRational>> = BTreeMap::new();
        for &a in &self.spec.alpha_orders {
            let (int, frac) = split_log2(&self.spec.log2_block_coeff(a));
            let coeffs = expected.entry(frac).or_insert_with(|| vec![BigRational::zero(); len as usize]);
            for j in 1u64 << a..2u64 << a {
                coeffs[j as usize] = pow2(int);
            }
        }
        if expected.len() != self.f.parts.len() {
            return Ok(false);
        }
        for (frac, coeffs) in &expected {
            let Some(g) = self.f.part(frac) else {
                return Ok(false);
            };
            if kaczmarz_spectrum(g).coeffs() != *coeffs {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

/// `n ∈ (2^A, 2^{A+1})` with binary digits 0 and 2 set and digit 1 clear.
pub fn a02_range(a: u32) -> Result<Vec<u64>> {
    if !(2..=62).contains(&a) {
        return Err(Error::invalid(format!("A = {a} outside 2..=62")));
    }
    let lo = 1u64 << a;
    let hi = 2u64 << a;
    Ok((lo + 1..hi).filter(|n| n % 8 == 5).collect())
}

/// Points of `I_2(e_0 + e_1)`: both lowest coordinates equal to one.
fn corner_points(resolution: u32) -> impl Iterator<Item = u64> {
    (0..1u64 << resolution).filter(|b| b & 3 == 3)
}

/// Vanishing of `D_{2^n}`, `K^κ_{2^n}` and `K^κ_{2^{n+1}} - K^κ_{2^n}` on
/// `I_2(e_0 + e_1)` for `2 <= n <= N - 1`.
pub fn corner_vanishing(resolution: u32) -> Result<bool> {
    for n in 2..resolution {
        let d = dirichlet(System::Kaczmarz, 1 << n, resolution)?;
        let k = fejer_kernel(System::Kaczmarz, 1 << n, resolution)?;
        let k2 = fejer_kernel(System::Kaczmarz, 2 << n, resolution)?;
        let diff = k2.checked_sub(&k)?;
        if !corner_points(resolution).all(|b| d.is_zero_at(b) && k.is_zero_at(b) && diff.is_zero_at(b)) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// `Σ_{j=1}^{n-2^A} Σ_{i<j} κ_{2^A+i}(x) = Σ_{i<n-2^A} (n-2^A-i) κ_{2^A+i}(x)`.
pub fn block_double_sum(a: u32, n: u64, resolution: u32) -> Result<Vec<i64>> {
    let base = 1u64 << a;
    if n <= base || n >= 2 * base || a + 1 > resolution {
        return Err(Error::invalid(format!("n = {n} outside (2^{a}, 2^{}) at resolution {resolution}", a + 1)));
    }
    let r = n - base;
    let mut out = vec![0i64; 1usize << resolution];
    for i in 0..r {
        let w = (r - i) as i64;
        for (bits, v) in out.iter_mut().enumerate() {
            *v += w * i64::from(System::Kaczmarz.sign(base + i, bits as u64));
        }
    }
    Ok(out)
}

/// One row of the divergence series.
#[derive(Clone, Debug)]
pub struct DivergenceRow {
    pub k: usize,
    pub order: u32,
    pub n: u64,
    /// `∥σ_n F∥_{L_{p,∞}}^p`
    pub weak: f64,
    pub block_ratio: f64,
    pub block_sum: f64,
    pub cumulative: f64,
    pub lower_bound: f64,
    pub min_double_sum: i64,
    pub iii_vanishes: bool,
    pub iv1_vanishes: bool,
    pub split_exact: bool,
    pub iv2_bound: bool,
}

fn row_for(ce: &Counterexample, means: &[(BigRational, SpectralMeans)], k: usize, n: u64) -> Result<DivergenceRow> {
    let spec = &ce.spec;
    let res = ce.resolution;
    let a = spec.alpha_orders[k];
    let base = 1u64 << a;
    let p = spec.p.value();
    let inv_n = BigRational::new(BigInt::one(), BigInt::from(n));

    // σ_n F and the split III + IV_1 + IV_2, class by class
    let mut sigma = SurdFunction::zero(res)?;
    let mut iii = SurdFunction::zero(res)?;
    for (r, m) in means {
        sigma.add_scaled(r, &m.fejer_mean(n)?)?;
        let mut acc = DyadicFunction::zero(res)?;
        for j in 1..=base {
            acc = acc.checked_add(&m.partial_sum(j)?)?;
        }
        iii.add_scaled(r, &acc.scale(&inv_n))?;
    }
    let mut iv1 = SurdFunction::zero(res)?;
    let rest = BigRational::new(BigInt::from(n - base), BigInt::from(n));
    for &b in &spec.alpha_orders[..k] {
        iv1.add_scaled(&spec.log2_block_coeff(b), &block_difference(b, res)?.scale(&rest))?;
    }
    let double = block_double_sum(a, n, res)?;
    let double_f = DyadicFunction::from_int_fn(res, |bits| double[bits as usize])?;
    let mut iv2 = SurdFunction::zero(res)?;
    iv2.add_scaled(&spec.log2_block_coeff(a), &double_f.scale(&inv_n))?;
    let split_exact = iii.checked_add(&iv1)?.checked_add(&iv2)? == sigma;

    let iii_vanishes = corner_points(res).all(|b| iii.is_zero_at(b));
    let iv1_vanishes = corner_points(res).all(|b| iv1.is_zero_at(b));
    let min_double_sum = double.iter().map(|v| v.abs()).min().unwrap_or(0);

    // on the corner σ_n F = IV_2, a single class
    let (int, frac) = split_log2(&spec.log2_block_coeff(a));
    let floor = pow2(int - (a as i64 + 1));
    let iv2_bound = split_exact
        && iii_vanishes
        && iv1_vanishes
        && iv2
            .part(&frac)
            .is_some_and(|g| corner_points(res).all(|b| g.value_at(b).abs() >= floor));

    let weak = sigma.weak_lp_norm_pow(p)?;
    let log2_half_phi = rational_to_f64(&spec.log2_phi_dyadic(a + 1)) / 2.0;
    let block_ratio = weak * (p * (a + 1) as f64 - log2_half_phi).exp2();
    let lower_bound = ((1.0 - p) * (a + 1) as f64 - log2_half_phi).exp2();
    Ok(DivergenceRow {
        k,
        order: a,
        n,
        weak,
        block_ratio,
        block_sum: 0.0,
        cumulative: 0.0,
        lower_bound,
        min_double_sum,
        iii_vanishes,
        iv1_vanishes,
        split_exact,
        iv2_bound,
    })
}

/// The divergence rows for every block, with running sums filled in.
pub fn divergence_rows(ce: &Counterexample) -> Result<Vec<DivergenceRow>> {
    let means: Vec<(BigRational, SpectralMeans)> = ce
        .f
        .parts()
        .map(|(r, g)| (r.clone(), SpectralMeans::new(System::Kaczmarz, g)))
        .collect();
    let mut tasks = Vec::new();
    for (k, &a) in ce.spec.alpha_orders.iter().enumerate() {
        for n in a02_range(a)? {
            tasks.push((k, n));
        }
    }
    let mut rows = tasks
        .par_iter()
        .map(|&(k, n)| row_for(ce, &means, k, n))
        .collect::<Result<Vec<_>>>()?;
    let mut cumulative = 0.0;
    let mut block = 0.0;
    let mut current = usize::MAX;
    for row in &mut rows {
        if row.k != current {
            current = row.k;
            block = 0.0;
        }
        let term = row.weak / ce.spec.phi(row.n);
        block += term;
        cumulative += term;
        row.block_sum = block;
        row.cumulative = cumulative;
    }
    Ok(rows)
}

/// Per-block totals `Σ_{n ∈ block} W(n)/Φ(n)` in block order.
pub fn block_totals(rows: &[DivergenceRow]) -> Vec<(usize, f64)> {
    let mut out: Vec<(usize, f64)> = Vec::new();
    for row in rows {
        match out.last_mut() {
            Some((k, total)) if *k == row.k => *total = row.block_sum,
            _ => out.push((row.k, row.block_sum)),
        }
    }
    out
}

pub fn divergence_report(spec: &CounterexampleSpec) -> Result<ExperimentReport> {
    let ce = build_counterexample(spec)?;
    let rows = divergence_rows(&ce)?;
    let mut report = ExperimentReport::new(
        "theorem2",
        vec![
            Column::new("k", ColumnKind::Int),
            Column::new("order", ColumnKind::Int),
            Column::new("n", ColumnKind::Int),
            Column::new("weak_pow", ColumnKind::Float),
            Column::new("block_ratio", ColumnKind::Float),
            Column::new("block_sum", ColumnKind::Float),
            Column::new("cumulative", ColumnKind::Float),
            Column::new("block_lower_bound", ColumnKind::Float),
            Column::new("min_double_sum", ColumnKind::Int),
            Column::new("iii_vanishes", ColumnKind::Bool),
            Column::new("iv1_vanishes", ColumnKind::Bool),
        ],
    );
    for r in &rows {
        report.push(vec![
            Value::Int(r.k as i64),
            Value::Int(r.order as i64),
            Value::Int(r.n as i64),
            r.weak.into(),
            r.block_ratio.into(),
            r.block_sum.into(),
            r.cumulative.into(),
            r.lower_bound.into(),
            Value::Int(r.min_double_sum),
            r.iii_vanishes.into(),
            r.iv1_vanishes.into(),
        ])?;
    }
    let lambdas: Vec<String> = ce.lambda_log2.iter().map(|l| format!("2^({l})")).collect();
    report
        .meta("p", spec.p)
        .meta("phi", format!("n^({})", spec.phi_exponent))
        .meta(
            "alpha_orders",
            spec.alpha_orders.iter().map(u32::to_string).collect::<Vec<_>>().join(","),
        )
        .meta("resolution", ce.resolution)
        .meta("lambdas", lambdas.join(","))
        .meta("summability_proxy", format_float(spec.summability_proxy()));

    let totals = block_totals(&rows);
    for (k, t) in &totals {
        report.meta(format!("block_total_{k}"), format_float(*t));
    }
    report.check("atoms_valid", ce.atoms_valid()?, "every a_k is a p-atom on I_|α_k|");
    report.check("spectrum_shape", ce.spectrum_matches()?, "Kaczmarz spectrum is block-constant and zero off the blocks");
    report.check("corner_vanishing_identities", corner_vanishing(ce.resolution)?, "D_(2^n), K_(2^n) and their increments vanish on I_2(e0+e1)");
    report.check("iii_vanishes", rows.iter().all(|r| r.iii_vanishes), "the first Cesàro part vanishes on I_2(e0+e1)");
    report.check("iv1_vanishes", rows.iter().all(|r| r.iv1_vanishes), "the earlier-block part vanishes on I_2(e0+e1)");
    report.check("split_exact", rows.iter().all(|r| r.split_exact), "σ_n F = III + IV_1 + IV_2 everywhere");
    report.check("double_sum_at_least_one", rows.iter().all(|r| r.min_double_sum >= 1), "min |double sum| over G is >= 1");
    report.check("iv2_lower_bound", rows.iter().all(|r| r.iv2_bound), "|σ_n F| >= Φ^(1/2p)(2^(a+1))/2^(a+1) on I_2(e0+e1)");
    report.check("ratios_positive", rows.iter().all(|r| r.block_ratio > 0.0), "every weak-norm ratio is positive");
    report.check("cumulative_increasing", rows.iter().all(|r| r.weak > 0.0), "the cumulative series grows across blocks");
    let monotone = totals.windows(2).all(|w| w[1].1 > w[0].1);
    report.meta("block_totals_monotone", monotone);
    Ok(report)
}
