//! Rademacher, Walsh–Paley and Walsh–Kaczmarz functions, and exact Paley
//! spectra through an in-place Walsh–Hadamard butterfly.
//!
//! The Kaczmarz system is a reordering of the Paley system inside every
//! dyadic block `[2^A, 2^{A+1})`: `κ_n = w_{ρ(n)}` where `ρ` reverses the
//! `A` digits below the leading one. [`walsh_kaczmarz`] evaluates through
//! Skvortsov's relation instead, so the two routes check each other.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;

use crate::dyadic::{low_mask, reverse_bits, tau_bits, DyadicFunction, GroupPoint};
use crate::error::{Error, Result};
use crate::exact::ExactVec;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum System {
    Paley,
    Kaczmarz,
}

impl System {
    pub const ALL: [System; 2] = [System::Paley, System::Kaczmarz];

    pub fn name(&self) -> &'static str {
        match self {
            System::Paley => "paley",
            System::Kaczmarz => "kaczmarz",
        }
    }

    /// Paley index carrying the `k`-th function of this system.
    pub fn paley_index(&self, k: u64) -> u64 {
        match self {
            System::Paley => k,
            System::Kaczmarz => kaczmarz_rho(k),
        }
    }

    /// `α_n(x)` for the cell with bit pattern `bits`.
    pub(crate) fn sign(&self, n: u64, bits: u64) -> i8 {
        match self {
            System::Paley => paley_sign(n, bits),
            System::Kaczmarz => kaczmarz_sign(n, bits),
        }
    }
}

impl fmt::Display for System {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for System {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "paley" | "w" => Ok(System::Paley),
            "kaczmarz" | "kappa" => Ok(System::Kaczmarz),
            other => Err(Error::Parse(format!("unknown system {other:?}"))),
        }
    }
}

/// `|n|`, the position of the leading binary digit.
pub fn order(n: u64) -> Result<u32> {
    if n == 0 {
        return Err(Error::invalid("|0| is undefined"));
    }
    Ok(63 - n.leading_zeros())
}

/// Smallest resolution at which the index `n` is addressable, i.e. with
/// `n < 2^N`.
pub(crate) fn index_resolution(n: u64) -> u32 {
    64 - n.leading_zeros()
}

fn check_index(n: u64, resolution: u32) -> Result<()> {
    if resolution < 64 && n >> resolution != 0 {
        return Err(Error::insufficient(
            format!("system function of index {n}"),
            index_resolution(n),
            resolution,
        ));
    }
    Ok(())
}

#[inline]
fn parity_sign(bits: u64) -> i8 {
    if bits.count_ones().is_multiple_of(2) {
        1
    } else {
        -1
    }
}

#[inline]
pub(crate) fn paley_sign(n: u64, bits: u64) -> i8 {
    parity_sign(n & bits)
}

/// `κ_n(x) = r_{|n|}(x) · w_{n - 2^{|n|}}(τ_{|n|}(x))`.
#[inline]
pub(crate) fn kaczmarz_sign(n: u64, bits: u64) -> i8 {
    if n == 0 {
        return 1;
    }
    let a = 63 - n.leading_zeros();
    let lead = if (bits >> a) & 1 == 1 { -1 } else { 1 };
    lead * paley_sign(n & low_mask(a), tau_bits(a, bits))
}

/// `r_k(x) = (-1)^{x_k}`.
pub fn rademacher(k: u32, t: GroupPoint) -> Result<i8> {
    Ok(if t.coordinate(k)? == 1 { -1 } else { 1 })
}

/// `w_n(x) = (-1)^{popcount(n AND x)}`.
pub fn walsh_paley(n: u64, t: GroupPoint) -> Result<i8> {
    check_index(n, t.resolution())?;
    Ok(paley_sign(n, t.bits()))
}

/// `κ_n(x)` through Skvortsov's relation.
pub fn walsh_kaczmarz(n: u64, t: GroupPoint) -> Result<i8> {
    check_index(n, t.resolution())?;
    Ok(kaczmarz_sign(n, t.bits()))
}

/// `ρ(0) = 0`, `ρ(n) = 2^{|n|} + reverse_{|n|}(n - 2^{|n|})`, so that
/// `κ_n = w_{ρ(n)}`.
pub fn kaczmarz_rho(n: u64) -> u64 {
    if n == 0 {
        return 0;
    }
    let a = 63 - n.leading_zeros();
    (1u64 << a) | reverse_bits(n, a)
}

/// The system function `α_n` as a dyadic function of the given resolution.
pub fn system_function(system: System, n: u64, resolution: u32) -> Result<DyadicFunction> {
    check_index(n, resolution)?;
    DyadicFunction::from_int_fn(resolution, |bits| i64::from(system.sign(n, bits)))
}

/// Fourier coefficients of a function in one of the two Walsh systems:
/// `coeffs[k] = ∫ f α_k dμ`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Spectrum {
    system: System,
    resolution: u32,
    coeffs: ExactVec,
}

/// The Paley-ordered spectrum.
pub type PaleySpectrum = Spectrum;

impl Spectrum {
    pub fn new(system: System, resolution: u32, coeffs: Vec<BigRational>) -> Result<Self> {
        let f = DyadicFunction::new(resolution, coeffs)?;
        Ok(Spectrum {
            system,
            resolution,
            coeffs: f.exact().clone(),
        })
    }

    /// A single unit coefficient at index `k`.
    pub fn unit(system: System, k: u64, resolution: u32) -> Result<Self> {
        check_index(k, resolution)?;
        let coeffs = ExactVec::from_ints((0..1u64 << resolution).map(|i| i64::from(i == k)));
        Ok(Spectrum {
            system,
            resolution,
            coeffs,
        })
    }

    pub fn system(&self) -> System {
        self.system
    }

    pub fn resolution(&self) -> u32 {
        self.resolution
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn coeff(&self, k: u64) -> BigRational {
        self.coeffs.get(k as usize)
    }

    pub fn coeffs(&self) -> Vec<BigRational> {
        (0..self.len()).map(|i| self.coeffs.get(i)).collect()
    }

    pub fn is_zero_at(&self, k: u64) -> bool {
        self.coeffs.is_zero_at(k as usize)
    }

    pub(crate) fn exact(&self) -> &ExactVec {
        &self.coeffs
    }

    /// Reindexes to the Paley ordering.
    pub fn to_paley(&self) -> Spectrum {
        match self.system {
            System::Paley => self.clone(),
            System::Kaczmarz => self.permuted(System::Paley),
        }
    }

    fn permuted(&self, target: System) -> Spectrum {
        // ρ is an involution, so the same permutation maps both ways
        let numer = (0..self.len() as u64)
            .map(|k| self.coeffs.numer()[kaczmarz_rho(k) as usize].clone())
            .collect();
        Spectrum {
            system: target,
            resolution: self.resolution,
            coeffs: ExactVec::from_parts(numer, self.coeffs.denom().clone()),
        }
    }

    /// Sum of squared coefficients (Parseval side).
    pub fn energy(&self) -> BigRational {
        self.coeffs.pointwise_mul(&self.coeffs).sum()
    }
}

/// Unnormalized in-place Walsh–Hadamard butterfly over `2^N` entries.
pub(crate) fn fwht_in_place(data: &mut [BigInt]) {
    let n = data.len();
    debug_assert!(n.is_power_of_two());
    let mut half = 1;
    while half < n {
        for block in (0..n).step_by(2 * half) {
            for i in block..block + half {
                let (lo, hi) = data.split_at_mut(i + half);
                let a = &lo[i];
                let b = &hi[0];
                let sum = a + b;
                let diff = a - b;
                lo[i] = sum;
                hi[0] = diff;
            }
        }
        half *= 2;
    }
}

/// Paley spectrum via the fast transform: `O(N·2^N)` big-integer
/// butterflies followed by one exact division by `2^N`.
pub fn analyze(f: &DyadicFunction) -> Spectrum {
    let mut numer = f.numer().to_vec();
    fwht_in_place(&mut numer);
    let denom = f.denom() << f.resolution();
    Spectrum {
        system: System::Paley,
        resolution: f.resolution(),
        coeffs: ExactVec::from_parts(numer, denom),
    }
}

/// Inverse of [`analyze`] (and of [`kaczmarz_spectrum`]).
pub fn synthesize(s: &Spectrum) -> DyadicFunction {
    let paley = s.to_paley();
    let (mut numer, denom) = paley.coeffs.into_parts();
    fwht_in_place(&mut numer);
    DyadicFunction::from_parts(paley.resolution, numer, denom)
}

/// Kaczmarz coefficients `∫ f κ_k dμ`, read off the Paley spectrum via ρ.
pub fn kaczmarz_spectrum(f: &DyadicFunction) -> Spectrum {
    analyze(f).permuted(System::Kaczmarz)
}

/// Spectrum of `f` in the requested system.
pub fn spectrum(system: System, f: &DyadicFunction) -> Spectrum {
    match system {
        System::Paley => analyze(f),
        System::Kaczmarz => kaczmarz_spectrum(f),
    }
}
