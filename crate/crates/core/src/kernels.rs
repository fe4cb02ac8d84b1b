//! Dirichlet and Fejér kernels for both Walsh systems.
//!
//! Kernels are built by direct summation of system functions. The dyadic
//! closed forms, Gát's formula for `K^w_{2^A}` and Skvortsov's decomposition
//! of `n K^κ_n` are separate constructions, so each equality between them is
//! a genuine check.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::dyadic::{low_mask, DyadicFunction};
use crate::error::{Error, Result};
use crate::walsh::{order, System};

fn check_kernel_order(what: &str, n: u64, resolution: u32) -> Result<()> {
    if resolution > crate::dyadic::MAX_FUNCTION_RESOLUTION {
        return Err(Error::ResolutionTooLarge(resolution));
    }
    if n > 1u64 << resolution {
        let needed = if n <= 1 { 0 } else { order(n - 1)? + 1 };
        return Err(Error::insufficient(format!("{what} of order {n}"), needed, resolution));
    }
    Ok(())
}

/// Integer values of `D_n` by running summation.
fn dirichlet_values(system: System, n: u64, resolution: u32) -> Vec<i64> {
    let mut d = vec![0i64; 1 << resolution];
    for k in 0..n {
        for (bits, v) in d.iter_mut().enumerate() {
            *v += i64::from(system.sign(k, bits as u64));
        }
    }
    d
}

/// Integer values of `n K_n = Σ_{k=1}^{n} D_k`.
pub(crate) fn fejer_numerator(system: System, n: u64, resolution: u32) -> Vec<i64> {
    let len = 1usize << resolution;
    let mut d = vec![0i64; len];
    let mut total = vec![0i64; len];
    for k in 0..n {
        for bits in 0..len {
            d[bits] += i64::from(system.sign(k, bits as u64));
            total[bits] += d[bits];
        }
    }
    total
}

/// `D_n = Σ_{k<n} α_k`, with `D_0 = 0`.
pub fn dirichlet(system: System, n: u64, resolution: u32) -> Result<DyadicFunction> {
    check_kernel_order("Dirichlet kernel", n, resolution)?;
    DyadicFunction::from_integers(resolution, dirichlet_values(system, n, resolution))
}

/// `D_{2^A} = 2^A · 1_{I_A}`.
pub fn dirichlet_dyadic_closed(a: u32, resolution: u32) -> Result<DyadicFunction> {
    if a > resolution {
        return Err(Error::insufficient(format!("D_(2^{a})"), a, resolution));
    }
    let mask = low_mask(a);
    DyadicFunction::from_int_fn(resolution, |bits| {
        if bits & mask == 0 {
            1 << a
        } else {
            0
        }
    })
}

/// `K_n = (1/n) Σ_{k=1}^{n} D_k`.
pub fn fejer_kernel(system: System, n: u64, resolution: u32) -> Result<DyadicFunction> {
    if n == 0 {
        return Err(Error::invalid("K_0 is undefined"));
    }
    check_kernel_order("Fejér kernel", n, resolution)?;
    let numer = fejer_numerator(system, n, resolution)
        .into_iter()
        .map(BigInt::from)
        .collect();
    Ok(DyadicFunction::from_parts(resolution, numer, BigInt::from(n)))
}

/// Gát's closed form for `K^w_{2^A}`: `(2^A+1)/2` on `I_A`; on
/// `I_t \ I_{t+1}` (`t < A`) it is `2^{t-1}` when `x - x_t e_t ∈ I_A` and
/// `0` otherwise.
pub fn fejer_dyadic_walsh_closed(a: u32, resolution: u32) -> Result<DyadicFunction> {
    if a >= resolution {
        return Err(Error::insufficient(
            format!("closed form of K_(2^{a})"),
            a + 1,
            resolution,
        ));
    }
    let mask = low_mask(a);
    let values = (0..1u64 << resolution)
        .map(|bits| {
            if bits & mask == 0 {
                return BigRational::new(BigInt::from((1u64 << a) + 1), BigInt::from(2));
            }
            let t = bits.trailing_zeros();
            if (bits & !(1u64 << t)) & mask == 0 {
                // 2^{t-1}, which is 1/2 at t = 0
                BigRational::new(BigInt::one() << t, BigInt::from(2))
            } else {
                BigRational::zero()
            }
        })
        .collect();
    DyadicFunction::new(resolution, values)
}

/// The three parts of Skvortsov's decomposition of `K^κ_n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KernelTriple {
    /// `(1/n)(1 + Σ_{i<|n|} 2^i D_{2^i})`
    pub l1: DyadicFunction,
    /// `(1/n) Σ_{i<|n|} 2^i r_i · (K^w_{2^i} ∘ τ_i)`
    pub l2: DyadicFunction,
    /// `((n - 2^{|n|})/n)(D_{2^{|n|}} + r_{|n|} · (K^w_{n-2^{|n|}} ∘ τ_{|n|}))`
    pub l3: DyadicFunction,
}

impl KernelTriple {
    pub fn sum(&self) -> DyadicFunction {
        self.l1
            .checked_add(&self.l2)
            .and_then(|s| s.checked_add(&self.l3))
            .expect("kernel terms share one resolution")
    }

    pub fn term(&self, i: usize) -> &DyadicFunction {
        match i {
            1 => &self.l1,
            2 => &self.l2,
            3 => &self.l3,
            _ => panic!("kernel term index {i} outside 1..=3"),
        }
    }
}

fn rademacher_sign(k: u32) -> impl Fn(u64) -> i8 {
    move |bits| if (bits >> k) & 1 == 1 { -1 } else { 1 }
}

/// Skvortsov's decomposition of `K^κ_n`, with the constant term folded
/// into `L1`.
pub fn skvortsov_terms(n: u64, resolution: u32) -> Result<KernelTriple> {
    let a = order(n)?;
    if a + 1 > resolution {
        return Err(Error::insufficient(
            format!("Skvortsov terms of order {n}"),
            a + 1,
            resolution,
        ));
    }
    let inv_n = BigRational::new(BigInt::one(), BigInt::from(n));

    let mut l1 = DyadicFunction::one(resolution)?;
    for i in 0..a {
        let term = dirichlet_dyadic_closed(i, resolution)?.scale(&pow2_int(i));
        l1 = l1.checked_add(&term)?;
    }
    let l1 = l1.scale(&inv_n);

    let mut l2 = DyadicFunction::zero(resolution)?;
    for i in 0..a {
        let k = fejer_kernel(System::Paley, 1 << i, resolution)?
            .compose_tau(i)?
            .mul_sign(rademacher_sign(i))
            .scale(&pow2_int(i));
        l2 = l2.checked_add(&k)?;
    }
    let l2 = l2.scale(&inv_n);

    let rest = n - (1u64 << a);
    let l3 = if rest == 0 {
        DyadicFunction::zero(resolution)?
    } else {
        let k = fejer_kernel(System::Paley, rest, resolution)?
            .compose_tau(a)?
            .mul_sign(rademacher_sign(a));
        dirichlet_dyadic_closed(a, resolution)?
            .checked_add(&k)?
            .scale(&BigRational::new(BigInt::from(rest), BigInt::from(n)))
    };

    Ok(KernelTriple { l1, l2, l3 })
}

fn pow2_int(i: u32) -> BigRational {
    BigRational::from_integer(BigInt::one() << i)
}

/// `‖f‖_1 = ∫ |f| dμ`, exact.
pub fn l1_norm(f: &DyadicFunction) -> BigRational {
    f.abs().integrate()
}

/// `‖K_n‖_1` for every `1 <= n <= n_max`, with maxima per dyadic block
/// `[2^A, 2^{A+1})`.
#[derive(Clone, Debug)]
pub struct FejerL1Sweep {
    pub system: System,
    pub resolution: u32,
    /// `norms[n - 1] = ‖K_n‖_1`
    pub norms: Vec<BigRational>,
    /// `(A, max_{n ∈ [2^A, 2^{A+1})} ‖K_n‖_1)` for blocks lying fully in range.
    pub block_maxima: Vec<(u32, BigRational)>,
    pub global_max: BigRational,
    pub argmax: u64,
}

impl FejerL1Sweep {
    pub fn norm(&self, n: u64) -> &BigRational {
        &self.norms[(n - 1) as usize]
    }
}

/// Incremental sweep of `‖K_n‖_1`, `1 <= n <= n_max`, at the smallest
/// resolution resolving every kernel in range.
pub fn fejer_l1_sweep(system: System, n_max: u64) -> Result<FejerL1Sweep> {
    if n_max == 0 {
        return Err(Error::invalid("empty Fejér sweep"));
    }
    let resolution = if n_max == 1 { 0 } else { order(n_max - 1)? + 1 };
    if resolution > crate::dyadic::MAX_FUNCTION_RESOLUTION {
        return Err(Error::ResolutionTooLarge(resolution));
    }
    let len = 1usize << resolution;
    let mut d = vec![0i64; len];
    let mut total = vec![0i64; len];
    let mut norms = Vec::with_capacity(n_max as usize);
    for n in 1..=n_max {
        let k = n - 1;
        let mut abs_sum: i64 = 0;
        for bits in 0..len {
            d[bits] += i64::from(system.sign(k, bits as u64));
            total[bits] += d[bits];
            abs_sum += total[bits].abs();
        }
        norms.push(BigRational::new(
            BigInt::from(abs_sum),
            BigInt::from(n) << resolution,
        ));
    }

    let mut block_maxima = Vec::new();
    let mut a = 0u32;
    while (2u64 << a) - 1 <= n_max {
        let lo = 1u64 << a;
        let hi = (2u64 << a) - 1;
        let m = (lo..=hi)
            .map(|n| &norms[(n - 1) as usize])
            .max()
            .cloned()
            .expect("nonempty block");
        block_maxima.push((a, m));
        a += 1;
    }
    let (argmax, global_max) = norms
        .iter()
        .enumerate()
        .max_by(|x, y| x.1.cmp(y.1).then(y.0.cmp(&x.0)))
        .map(|(i, v)| (i as u64 + 1, v.clone()))
        .expect("nonempty sweep");

    Ok(FejerL1Sweep {
        system,
        resolution,
        norms,
        block_maxima,
        global_max,
        argmax,
    })
}

/// `true` when all values of `f` are nonnegative.
pub fn is_nonnegative(f: &DyadicFunction) -> bool {
    f.numer().iter().all(|n| !n.is_negative())
}
