//! Dyadic martingales at finite resolution, the martingale maximal function,
//! `H_p`, `L_p` and weak `L_p` norms, `p`-atoms and conjugate transforms.
//!
//! Everything up to `f*`, `|f|` and level-set measures is exact. Norms are
//! floats: each value is converted once, raised to `p`, and accumulated in
//! index order.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::dyadic::{low_mask, DyadicFunction, DyadicInterval, GroupPoint};
use crate::error::{Error, Result};
use crate::exact::{ratio_to_f64, Exponent};
use crate::walsh::rademacher;

/// `(f^{(0)}, …, f^{(N)})`, level `n` constant on rank-`n` intervals.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DyadicMartingale {
    levels: Vec<DyadicFunction>,
}

impl DyadicMartingale {
    /// Wraps explicit levels, checking the martingale property exactly.
    pub fn from_levels(levels: Vec<DyadicFunction>) -> Result<Self> {
        let m = DyadicMartingale { levels };
        let Some(top) = m.levels.last() else {
            return Err(Error::invalid("a martingale needs at least one level"));
        };
        let n = top.resolution();
        if m.levels.len() != n as usize + 1 {
            return Err(Error::invalid(format!(
                "resolution {n} needs {} levels, got {}",
                n + 1,
                m.levels.len()
            )));
        }
        for l in &m.levels {
            if l.resolution() != n {
                return Err(Error::ResolutionMismatch { left: l.resolution(), right: n });
            }
        }
        if !m.is_consistent() {
            return Err(Error::invalid("levels do not form a martingale"));
        }
        Ok(m)
    }

    pub fn resolution(&self) -> u32 {
        self.levels.len() as u32 - 1
    }

    pub fn levels(&self) -> &[DyadicFunction] {
        &self.levels
    }

    pub fn level(&self, n: u32) -> Option<&DyadicFunction> {
        self.levels.get(n as usize)
    }

    /// `f^{(N)}`, which determines the martingale.
    pub fn terminal(&self) -> &DyadicFunction {
        self.levels.last().expect("nonempty")
    }

    /// `E_n f^{(n+1)} = f^{(n)}` for every `n < N`, and every level is
    /// measurable at its rank.
    pub fn is_consistent(&self) -> bool {
        self.levels.iter().enumerate().all(|(n, level)| {
            let n = n as u32;
            level.conditional_expectation(n).ok().as_ref() == Some(level)
                && (n == 0
                    || level.conditional_expectation(n - 1).ok().as_ref()
                        == Some(&self.levels[n as usize - 1]))
        })
    }

    /// Differences `d_n = f^{(n)} - f^{(n-1)}` with `f^{(-1)} = 0`.
    pub fn differences(&self) -> Result<Vec<DyadicFunction>> {
        let mut out = Vec::with_capacity(self.levels.len());
        out.push(self.levels[0].clone());
        for w in self.levels.windows(2) {
            out.push(w[1].checked_sub(&w[0])?);
        }
        Ok(out)
    }
}

pub fn martingale_of(f: &DyadicFunction) -> DyadicMartingale {
    let levels = (0..=f.resolution())
        .map(|n| f.conditional_expectation(n).expect("rank within resolution"))
        .collect();
    DyadicMartingale { levels }
}

/// Pointwise `max_n |f^{(n)}|` over the stored levels.
pub fn maximal_function(m: &DyadicMartingale) -> DyadicFunction {
    let res = m.resolution();
    let mut best = vec![BigRational::zero(); 1usize << res];
    for level in m.levels() {
        for (i, b) in best.iter_mut().enumerate() {
            let v = level.value_at(i as u64).abs();
            if v > *b {
                *b = v;
            }
        }
    }
    DyadicFunction::new(res, best).expect("resolution already validated")
}

/// `f*` straight from `f`, using integer block sums: with common
/// denominator `d`, `f^{(n)}(x) = s_n(x) 2^n / (d 2^N)` where `s_n(x)` is the
/// numerator sum over the rank-`n` interval containing `x`.
pub fn maximal_of(f: &DyadicFunction) -> DyadicFunction {
    let res = f.resolution();
    let mut sums = f.numer().to_vec();
    let mut best: Vec<BigInt> = sums.iter().map(|s| s.abs() << res).collect();
    for rank in (0..res).rev() {
        let step = 1usize << rank;
        for i in 0..sums.len() {
            if i & step == 0 {
                let s = &sums[i] + &sums[i | step];
                sums[i | step] = s.clone();
                sums[i] = s;
            }
        }
        for (b, s) in best.iter_mut().zip(&sums) {
            let v = s.abs() << rank;
            if v > *b {
                *b = v;
            }
        }
    }
    DyadicFunction::from_parts(res, best, f.denom() << res)
}

fn check_p(p: f64) -> Result<()> {
    if !(p.is_finite() && p > 0.0) {
        return Err(Error::invalid(format!("norm exponent must be positive, got {p}")));
    }
    Ok(())
}

/// `(1/len) Σ v_i^p`, summed in index order.
fn mean_pow(values: impl Iterator<Item = f64>, len: usize, p: f64) -> f64 {
    let mut total = 0.0;
    for v in values {
        if v != 0.0 {
            total += v.abs().powf(p);
        }
    }
    total / len as f64
}

fn abs_values_f64(f: &DyadicFunction) -> impl Iterator<Item = f64> + '_ {
    f.numer().iter().map(move |n| ratio_to_f64(n, f.denom()))
}

/// `∥f∥_{H_p}^p = ∫ (f*)^p dμ`.
pub fn hardy_norm_pow(f: &DyadicFunction, p: f64) -> Result<f64> {
    check_p(p)?;
    let star = maximal_of(f);
    Ok(mean_pow(abs_values_f64(&star), star.len(), p))
}

pub fn hardy_norm(f: &DyadicFunction, p: f64) -> Result<f64> {
    Ok(hardy_norm_pow(f, p)?.powf(1.0 / p))
}

pub fn lp_norm_pow(f: &DyadicFunction, p: f64) -> Result<f64> {
    check_p(p)?;
    Ok(mean_pow(abs_values_f64(f), f.len(), p))
}

pub fn lp_norm(f: &DyadicFunction, p: f64) -> Result<f64> {
    Ok(lp_norm_pow(f, p)?.powf(1.0 / p))
}

/// `(∥f∥_{L_{p,∞}})^p = max_v v^p μ(|f| ≥ v)` over the distinct values of
/// `|f|`, with the level sets counted exactly.
pub fn weak_lp_norm_pow(f: &DyadicFunction, p: f64) -> Result<f64> {
    check_p(p)?;
    let mut mags: Vec<BigInt> = f.numer().iter().map(|n| n.abs()).collect();
    mags.sort_unstable_by(|a, b| b.cmp(a));
    let len = mags.len() as f64;
    let mut best: f64 = 0.0;
    let mut i = 0;
    while i < mags.len() && !mags[i].is_zero() {
        let mut j = i + 1;
        while j < mags.len() && mags[j] == mags[i] {
            j += 1;
        }
        let v = ratio_to_f64(&mags[i], f.denom());
        best = best.max(v.powf(p) * (j as f64 / len));
        i = j;
    }
    Ok(best)
}

pub fn weak_lp_norm(f: &DyadicFunction, p: f64) -> Result<f64> {
    Ok(weak_lp_norm_pow(f, p)?.powf(1.0 / p))
}

/// `(1/len) Σ |v_i|^p` for plain float samples on a uniform grid.
pub fn lp_norm_pow_values(values: &[f64], p: f64) -> Result<f64> {
    check_p(p)?;
    Ok(mean_pow(values.iter().copied(), values.len(), p))
}

/// Weak `L_p` quasi-norm to the `p` for float samples on a uniform grid.
pub fn weak_lp_norm_pow_values(values: &[f64], p: f64) -> Result<f64> {
    check_p(p)?;
    let mut mags: Vec<f64> = values.iter().map(|v| v.abs()).collect();
    mags.sort_unstable_by(|a, b| b.total_cmp(a));
    let len = mags.len() as f64;
    let mut best: f64 = 0.0;
    let mut i = 0;
    while i < mags.len() && mags[i] > 0.0 {
        let mut j = i + 1;
        while j < mags.len() && mags[j] == mags[i] {
            j += 1;
        }
        best = best.max(mags[i].powf(p) * (j as f64 / len));
        i = j;
    }
    Ok(best)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum AtomViolation {
    /// `∫_I a ≠ 0`
    NonzeroMean,
    /// `∥a∥_∞ > μ(I)^{-1/p}`
    SupBound,
    /// `a ≠ 0` somewhere outside `I`
    Support,
}

impl fmt::Display for AtomViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            AtomViolation::NonzeroMean => "nonzero mean",
            AtomViolation::SupBound => "sup bound",
            AtomViolation::Support => "support",
        })
    }
}

#[derive(Clone, Debug)]
pub struct AtomCertificate {
    pub atom: DyadicFunction,
    pub interval: DyadicInterval,
    pub exponent: Exponent,
    pub valid: bool,
    pub violations: Vec<AtomViolation>,
}

/// Decides `m <= 2^e` exactly for `m >= 0` and rational `e = u/v`, as
/// `m^v <= 2^u`.
pub(crate) fn le_pow2(m: &BigRational, e: &BigRational) -> bool {
    if m.is_zero() {
        return true;
    }
    let v = e.denom().to_u32();
    let u = e.numer();
    match v {
        Some(v) if v <= 4096 && u.abs() < BigInt::from(1u32 << 20) => {
            let u = u.to_i64().expect("bounded");
            let lhs = BigRational::new(num_traits::pow(m.numer().clone(), v as usize), num_traits::pow(m.denom().clone(), v as usize));
            lhs <= crate::exact::pow2(u)
        }
        _ => {
            let lhs = crate::exact::rational_to_f64(m).log2();
            lhs <= crate::exact::rational_to_f64(e)
        }
    }
}

fn certify(
    a: &DyadicFunction,
    interval: &DyadicInterval,
    p: Exponent,
    scale_log2: &BigRational,
) -> AtomCertificate {
    let mut violations = Vec::new();
    let mut inside = BigInt::zero();
    let mut outside_nonzero = false;
    for (bits, n) in a.numer().iter().enumerate() {
        if interval.contains_bits(bits as u64) {
            inside += n;
        } else if !n.is_zero() {
            outside_nonzero = true;
        }
    }
    if !inside.is_zero() {
        violations.push(AtomViolation::NonzeroMean);
    }
    // 2^s |a| <= 2^{rank/p}
    let bound = BigRational::from_integer(interval.rank().into()) * p.reciprocal() - scale_log2;
    if !le_pow2(&a.max_abs(), &bound) {
        violations.push(AtomViolation::SupBound);
    }
    if outside_nonzero {
        violations.push(AtomViolation::Support);
    }
    AtomCertificate {
        atom: a.clone(),
        interval: *interval,
        exponent: p,
        valid: violations.is_empty(),
        violations,
    }
}

/// Checks the three `p`-atom conditions exactly.
pub fn validate_atom(a: &DyadicFunction, interval: &DyadicInterval, p: Exponent) -> Result<AtomCertificate> {
    check_interval(a, interval)?;
    Ok(certify(a, interval, p, &BigRational::zero()))
}

/// Validates the atom `2^s g` for a rational exponent `s` without forming
/// the (possibly irrational) product.
pub fn validate_scaled_atom(
    g: &DyadicFunction,
    scale_log2: &BigRational,
    interval: &DyadicInterval,
    p: Exponent,
) -> Result<AtomCertificate> {
    check_interval(g, interval)?;
    Ok(certify(g, interval, p, scale_log2))
}

fn check_interval(a: &DyadicFunction, interval: &DyadicInterval) -> Result<()> {
    if interval.rank() > a.resolution() || interval.center().resolution() != a.resolution() {
        return Err(Error::ResolutionMismatch {
            left: a.resolution(),
            right: interval.center().resolution(),
        });
    }
    Ok(())
}

const ATOM_GRID: i64 = 1 << 8;

/// A random `p`-atom supported on `I_rank(0)`, deterministic per seed.
///
/// Cell values are `B k / 256` with `B = 2^{⌊rank/p⌋}` and `k` uniform in
/// `[-256, 256]`; the mean over the interval is then removed and the result
/// rescaled back under `B` if needed. For `rank = N` the interval is one
/// cell and the atom is zero.
pub fn random_atom(p: Exponent, resolution: u32, rank: u32, seed: u64) -> Result<DyadicFunction> {
    if rank > resolution {
        return Err(Error::insufficient(format!("atom on I_{rank}"), rank, resolution));
    }
    let len = 1usize << resolution;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let bound_exp = (BigRational::from_integer(rank.into()) * p.reciprocal()).floor().to_integer();
    let bound = BigInt::one() << bound_exp.to_u64().expect("nonnegative");
    let mask = low_mask(rank);
    let cells = 1i64 << (resolution - rank);
    let mut k = vec![0i64; len];
    let mut total = 0i64;
    for (bits, slot) in k.iter_mut().enumerate() {
        if bits as u64 & mask == 0 {
            *slot = rng.random_range(-ATOM_GRID..=ATOM_GRID);
            total += *slot;
        }
    }
    // k - total/cells, over the common denominator `cells`
    let centered: Vec<i64> = k
        .iter()
        .enumerate()
        .map(|(bits, &v)| if bits as u64 & mask == 0 { v * cells - total } else { 0 })
        .collect();
    let peak = centered.iter().map(|v| v.abs()).max().unwrap_or(0);
    let limit = ATOM_GRID * cells;
    let denom = if peak > limit { peak } else { limit };
    let numer = centered.into_iter().map(|v| BigInt::from(v) * &bound).collect();
    let denom = BigInt::from(denom);
    Ok(DyadicFunction::from_parts(resolution, numer, denom))
}

/// `f̃^{(t)} = Σ_{n=0}^{N} r_n(t) (f_n - f_{n-1})`, built from the martingale
/// differences of `f`. The sum reaches `r_N(t)`, so `t` needs resolution
/// at least `N + 1`.
pub fn conjugate_transform(f: &DyadicFunction, t: GroupPoint) -> Result<DyadicFunction> {
    let n = f.resolution();
    if t.resolution() < n + 1 {
        return Err(Error::insufficient("conjugate transform parameter", n + 1, t.resolution()));
    }
    let diffs = martingale_of(f).differences()?;
    let mut out = DyadicFunction::zero(n)?;
    for (k, d) in diffs.iter().enumerate() {
        let term = if rademacher(k as u32, t)? < 0 { d.neg() } else { d.clone() };
        out = out.checked_add(&term)?;
    }
    Ok(out)
}

/// Same transform as a sign pattern on the Paley spectrum: `\hat f(0)` gets
/// `r_0(t)` and the block `[2^{A-1}, 2^A)` gets `r_A(t)`.
pub fn conjugate_transform_spectral(f: &DyadicFunction, t: GroupPoint) -> Result<DyadicFunction> {
    let n = f.resolution();
    if t.resolution() < n + 1 {
        return Err(Error::insufficient("conjugate transform parameter", n + 1, t.resolution()));
    }
    let mut numer = crate::walsh::analyze(f).exact().clone().into_parts();
    for (k, c) in numer.0.iter_mut().enumerate() {
        let level = if k == 0 { 0 } else { 64 - (k as u64).leading_zeros() };
        if rademacher(level, t)? < 0 {
            *c = -&*c;
        }
    }
    crate::walsh::fwht_in_place(&mut numer.0);
    Ok(DyadicFunction::from_parts(n, numer.0, numer.1))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dyadic::convolve;
    use crate::kernels::{dirichlet, dirichlet_dyadic_closed};
    use crate::walsh::{system_function, System};

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    fn sample(resolution: u32, salt: i64) -> DyadicFunction {
        DyadicFunction::new(
            resolution,
            (0..1i64 << resolution)
                .map(|i| q((i * 29 + salt * 7) % 13 - 6, 1 + (i + salt) % 4))
                .collect(),
        )
        .unwrap()
    }

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() <= 1e-12 * a.abs().max(b.abs()).max(1.0)
    }

    #[test]
    fn martingale_examples() {
        let c = DyadicFunction::constant(3, &q(-5, 3)).unwrap();
        let m = martingale_of(&c);
        assert!(m.levels().iter().all(|l| *l == c));
        let r0 = system_function(System::Paley, 1, 3).unwrap();
        let m = martingale_of(&r0);
        assert!(m.levels()[0].is_zero());
        assert!(m.levels()[1..].iter().all(|l| *l == r0));
        assert!(m.is_consistent());
        let f = sample(4, 1);
        let m = martingale_of(&f);
        assert_eq!(m.terminal(), &f);
        for n in 0..=4 {
            let conv = convolve(&f, &dirichlet_dyadic_closed(n, 4).unwrap()).unwrap();
            assert_eq!(m.level(n).unwrap(), &conv);
        }
        assert!(DyadicMartingale::from_levels(m.levels().to_vec()).is_ok());
        let mut bad = m.levels().to_vec();
        bad[2] = f.clone();
        assert!(DyadicMartingale::from_levels(bad).is_err());
    }

    #[test]
    fn maximal_examples() {
        let c = DyadicFunction::constant(3, &q(-2, 7)).unwrap();
        assert_eq!(maximal_of(&c), c.abs());
        let r0 = system_function(System::Paley, 1, 3).unwrap();
        assert_eq!(maximal_of(&r0), DyadicFunction::one(3).unwrap());
        // D_4 at N = 3: levels are 1, 2·1_{I_1}, 4·1_{I_2}, 4·1_{I_2}
        let d4 = dirichlet(System::Paley, 4, 3).unwrap();
        let star = maximal_of(&d4);
        let expect = [4, 1, 2, 1, 4, 1, 2, 1];
        for (bits, e) in expect.iter().enumerate() {
            assert_eq!(star.value_at(bits as u64), q(*e, 1));
        }
    }

    #[test]
    fn fast_maximal_matches_levels() {
        for salt in 0..5 {
            let f = sample(5, salt);
            assert_eq!(maximal_of(&f), maximal_function(&martingale_of(&f)));
        }
    }

    #[test]
    fn norm_examples() {
        let one = DyadicFunction::one(3).unwrap();
        let r0 = system_function(System::Paley, 1, 3).unwrap();
        for p in [0.25, 0.5, 1.0, 2.0] {
            assert!(close(hardy_norm(&one, p).unwrap(), 1.0));
            assert!(close(hardy_norm(&r0, p).unwrap(), 1.0));
            assert!(close(lp_norm(&r0, p).unwrap(), 1.0));
            assert!(close(weak_lp_norm(&r0, p).unwrap(), 1.0));
            let two_i1 = DyadicFunction::indicator(3, &DyadicInterval::at_origin(1, 3).unwrap())
                .unwrap()
                .scale(&q(2, 1));
            let expect = 2.0 * 0.5f64.powf(1.0 / p);
            assert!(close(lp_norm(&two_i1, p).unwrap(), expect));
            assert!(close(weak_lp_norm(&two_i1, p).unwrap(), expect));
            for a in 0..=3u32 {
                let d = dirichlet_dyadic_closed(a, 3).unwrap();
                let expect = 2f64.powi(a as i32) * 2f64.powf(-(a as f64) / p);
                assert!(close(lp_norm(&d, p).unwrap(), expect));
            }
        }
        // D_4 at N = 3, p = 1/2, from the exact f* by the formula
        let d4 = dirichlet(System::Paley, 4, 3).unwrap();
        let oracle: f64 = [4.0f64, 1.0, 2.0, 1.0, 4.0, 1.0, 2.0, 1.0]
            .iter()
            .map(|v| v.sqrt())
            .sum::<f64>()
            / 8.0;
        assert!(close(hardy_norm_pow(&d4, 0.5).unwrap(), oracle));
        assert!(hardy_norm(&d4, 0.0).is_err());
        assert!(hardy_norm(&d4, f64::NAN).is_err());
    }

    #[test]
    fn weak_norm_brute_force() {
        // sup over thresholds λ of λ μ(|f| > λ)^{1/p}, approached from below
        for salt in 0..4 {
            let f = sample(4, salt);
            let vals: Vec<f64> = f.values_f64().iter().map(|v| v.abs()).collect();
            for p in [0.25, 0.5, 1.0] {
                let mut oracle: f64 = 0.0;
                for &v in &vals {
                    let lam = v * (1.0 - 1e-12);
                    let mu = vals.iter().filter(|&&w| w > lam).count() as f64 / 16.0;
                    oracle = oracle.max(lam * mu.powf(1.0 / p));
                }
                let w = weak_lp_norm(&f, p).unwrap();
                assert!((w - oracle).abs() <= 1e-9 * w.max(1.0));
                assert!(close(weak_lp_norm_pow_values(&f.values_f64(), p).unwrap(), w.powf(p)));
                assert!(close(lp_norm_pow_values(&f.values_f64(), p).unwrap(), lp_norm_pow(&f, p).unwrap()));
            }
        }
    }

    #[test]
    fn atom_examples() {
        let g = DyadicInterval::at_origin(0, 3).unwrap();
        let r0 = system_function(System::Paley, 1, 3).unwrap();
        for p in [Exponent::half(), Exponent::quarter(), Exponent::new(1, 1).unwrap()] {
            assert!(validate_atom(&r0, &g, p).unwrap().valid);
        }
        let one = DyadicFunction::one(3).unwrap();
        let cert = validate_atom(&one, &g, Exponent::half()).unwrap();
        assert!(!cert.valid);
        assert_eq!(cert.violations, vec![AtomViolation::NonzeroMean]);
        // 2^{A(1/p-1)} (D_{2^{A+1}} - D_{2^A}) on I_A
        let p = Exponent::quarter();
        for a in 0..=3u32 {
            let d = dirichlet_dyadic_closed(a + 1, 5)
                .unwrap()
                .checked_sub(&dirichlet_dyadic_closed(a, 5).unwrap())
                .unwrap();
            let atom = d.scale(&crate::exact::pow2(3 * a as i64));
            let i = DyadicInterval::at_origin(a, 5).unwrap();
            assert!(validate_atom(&atom, &i, p).unwrap().valid, "A={a}");
            let too_big = atom.scale(&q(2, 1));
            assert_eq!(validate_atom(&too_big, &i, p).unwrap().violations, vec![AtomViolation::SupBound]);
            assert!(validate_scaled_atom(&d, &BigRational::from_integer((3 * a).into()), &i, p).unwrap().valid);
            let nudged = BigRational::from_integer((3 * a).into()) + q(1, 7);
            assert!(!validate_scaled_atom(&d, &nudged, &i, p).unwrap().valid);
        }
        let i1 = DyadicInterval::at_origin(1, 3).unwrap();
        let cert = validate_atom(&r0, &i1, Exponent::half()).unwrap();
        assert!(cert.violations.contains(&AtomViolation::Support));
    }

    #[test]
    fn le_pow2_is_exact() {
        assert!(le_pow2(&q(4, 1), &q(2, 1)));
        assert!(!le_pow2(&q(4, 1), &q(19, 10)));
        // sqrt(2) ≈ 1.41421356
        assert!(le_pow2(&q(141421, 100000), &q(1, 2)));
        assert!(!le_pow2(&q(141422, 100000), &q(1, 2)));
        assert!(le_pow2(&q(1, 8), &q(-3, 1)));
        assert!(!le_pow2(&q(1, 7), &q(-3, 1)));
    }

    #[test]
    fn random_atoms() {
        for p in [Exponent::half(), Exponent::quarter(), Exponent::new(3, 4).unwrap()] {
            for rank in 0..=5u32 {
                for seed in 0..5u64 {
                    let a = random_atom(p, 5, rank, seed).unwrap();
                    let i = DyadicInterval::at_origin(rank, 5).unwrap();
                    let cert = validate_atom(&a, &i, p).unwrap();
                    assert!(cert.valid, "p={p} rank={rank} seed={seed}: {:?}", cert.violations);
                    assert_eq!(a, random_atom(p, 5, rank, seed).unwrap());
                    if rank == 5 {
                        assert!(a.is_zero());
                    }
                    if rank == 4 {
                        // the two cells of I_4 carry opposite values
                        assert_eq!(a.value_at(0), -a.value_at(16));
                    }
                }
            }
        }
        assert_ne!(
            random_atom(Exponent::half(), 5, 2, 1).unwrap(),
            random_atom(Exponent::half(), 5, 2, 2).unwrap()
        );
        assert!(random_atom(Exponent::half(), 3, 4, 0).is_err());
    }

    #[test]
    fn conjugate_examples() {
        let f = sample(4, 2);
        let zero = GroupPoint::zero(5).unwrap();
        assert_eq!(conjugate_transform(&f, zero).unwrap(), f);
        let r0 = system_function(System::Paley, 1, 3).unwrap();
        let t = GroupPoint::unit(1, 4).unwrap();
        assert_eq!(conjugate_transform(&r0, t).unwrap(), r0.neg());
        let t = GroupPoint::unit(0, 4).unwrap();
        assert_eq!(conjugate_transform(&r0, t).unwrap(), r0);
        assert!(conjugate_transform(&r0, GroupPoint::zero(3).unwrap()).is_err());
    }

    #[test]
    fn conjugate_forms_agree_and_invert() {
        for salt in 0..3 {
            let f = sample(4, salt);
            for bits in 0..32u64 {
                let t = GroupPoint::new(bits, 5).unwrap();
                let c = conjugate_transform(&f, t).unwrap();
                assert_eq!(c, conjugate_transform_spectral(&f, t).unwrap());
                assert_eq!(conjugate_transform(&c, t).unwrap(), f);
            }
        }
    }
}
