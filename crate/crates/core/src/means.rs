//! Partial sums and Fejér means for both systems.
//!
//! Means are computed as spectral multipliers on the Paley spectrum: the
//! `k`-th function of the chosen system sits at Paley index `ρ(k)` (or `k`).
//! `σ_n` is the multiplier `(n-k)/n` for `k < n`, which is the Cesàro
//! average `(1/n) Σ_{j=1}^{n} S_j` since `S_0 = 0`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};

use crate::dyadic::DyadicFunction;
use crate::error::{Error, Result};
use crate::exact::ExactVec;
use crate::walsh::{analyze, fwht_in_place, System};

/// Precomputed Paley spectrum of one function, from which any partial sum
/// or Fejér mean in either system costs one inverse transform.
#[derive(Clone, Debug)]
pub struct SpectralMeans {
    system: System,
    resolution: u32,
    numer: Vec<BigInt>,
    denom: BigInt,
}

impl SpectralMeans {
    pub fn new(system: System, f: &DyadicFunction) -> Self {
        let (numer, denom) = analyze(f).exact().clone().into_parts();
        SpectralMeans {
            system,
            resolution: f.resolution(),
            numer,
            denom,
        }
    }

    pub fn system(&self) -> System {
        self.system
    }

    pub fn resolution(&self) -> u32 {
        self.resolution
    }

    fn max_index(&self) -> u64 {
        1u64 << self.resolution
    }

    fn check(&self, what: &str, n: u64) -> Result<()> {
        if n > self.max_index() {
            let needed = 64 - (n - 1).leading_zeros();
            return Err(Error::insufficient(format!("{what} of order {n}"), needed, self.resolution));
        }
        Ok(())
    }

    fn synthesize_masked(&self, weights: impl Fn(u64) -> Option<BigInt>, denom: BigInt) -> DyadicFunction {
        let mut coeffs = vec![BigInt::zero(); self.numer.len()];
        for k in 0..self.max_index() {
            if let Some(w) = weights(k) {
                let idx = self.system.paley_index(k) as usize;
                if !self.numer[idx].is_zero() {
                    coeffs[idx] = &self.numer[idx] * w;
                }
            }
        }
        fwht_in_place(&mut coeffs);
        DyadicFunction::from_parts(self.resolution, coeffs, denom)
    }

    /// `S_j f = Σ_{k<j} \hat f(k) α_k`.
    pub fn partial_sum(&self, j: u64) -> Result<DyadicFunction> {
        self.check("partial sum", j)?;
        Ok(self.synthesize_masked(
            |k| (k < j).then(|| BigInt::from(1)),
            self.denom.clone(),
        ))
    }

    /// `σ_n f = Σ_{k<n} ((n-k)/n) \hat f(k) α_k`.
    pub fn fejer_mean(&self, n: u64) -> Result<DyadicFunction> {
        if n == 0 {
            return Err(Error::invalid("σ_0 is undefined"));
        }
        self.check("Fejér mean", n)?;
        Ok(self.synthesize_masked(
            |k| (k < n).then(|| BigInt::from(n - k)),
            &self.denom * BigInt::from(n),
        ))
    }
}

pub fn partial_sum(system: System, j: u64, f: &DyadicFunction) -> Result<DyadicFunction> {
    SpectralMeans::new(system, f).partial_sum(j)
}

pub fn fejer_mean(system: System, n: u64, f: &DyadicFunction) -> Result<DyadicFunction> {
    SpectralMeans::new(system, f).fejer_mean(n)
}

/// Reference Cesàro average `(1/n) Σ_{j=0}^{n} S_j f`, summing the partial
/// sums one by one.
pub fn fejer_mean_direct(system: System, n: u64, f: &DyadicFunction) -> Result<DyadicFunction> {
    if n == 0 {
        return Err(Error::invalid("σ_0 is undefined"));
    }
    let means = SpectralMeans::new(system, f);
    let mut total = DyadicFunction::zero(f.resolution())?;
    for j in 0..=n {
        total = total.checked_add(&means.partial_sum(j)?)?;
    }
    Ok(total.scale(&BigRational::new(1.into(), BigInt::from(n))))
}

/// `max_{1<=n<=n_max} |σ^κ_n f| / weight(n)`, pointwise.
pub fn weighted_max_fejer(
    f: &DyadicFunction,
    weight: impl Fn(u64) -> BigRational,
    n_max: u64,
) -> Result<DyadicFunction> {
    if n_max == 0 {
        return Err(Error::invalid("weighted maximal operator needs n_max >= 1"));
    }
    let means = SpectralMeans::new(System::Kaczmarz, f);
    let mut best: Vec<BigRational> = vec![BigRational::zero(); f.len()];
    for n in 1..=n_max {
        let w = weight(n);
        if !w.is_positive() {
            return Err(Error::invalid(format!("weight({n}) = {w} is not positive")));
        }
        let sigma = means.fejer_mean(n)?;
        for (i, b) in best.iter_mut().enumerate() {
            let v = sigma.value_at(i as u64).abs() / &w;
            if v > *b {
                *b = v;
            }
        }
    }
    Ok(DyadicFunction::from_exact(
        f.resolution(),
        ExactVec::from_rationals(&best),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dyadic::convolve;
    use crate::kernels::{dirichlet_dyadic_closed, fejer_kernel};
    use crate::walsh::system_function;
    use num_traits::One;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    fn sample(resolution: u32, salt: i64) -> DyadicFunction {
        DyadicFunction::new(
            resolution,
            (0..1i64 << resolution)
                .map(|i| q((i * 37 + salt) % 17 - 8, 1 + (i + salt) % 5))
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn partial_sum_examples() {
        let f = sample(3, 1);
        for system in System::ALL {
            assert!(partial_sum(system, 0, &f).unwrap().is_zero());
            assert_eq!(partial_sum(system, 8, &f).unwrap(), f);
            assert!(partial_sum(system, 9, &f).is_err());
        }
        let k1 = system_function(System::Kaczmarz, 1, 3).unwrap();
        assert!(partial_sum(System::Kaczmarz, 1, &k1).unwrap().is_zero());
        assert_eq!(partial_sum(System::Kaczmarz, 2, &k1).unwrap(), k1);
    }

    #[test]
    fn dyadic_partial_sums_are_conditional_expectations() {
        let f = sample(4, 3);
        for system in System::ALL {
            for n in 0..=4u32 {
                let s = partial_sum(system, 1 << n, &f).unwrap();
                assert_eq!(s, convolve(&f, &dirichlet_dyadic_closed(n, 4).unwrap()).unwrap());
                assert_eq!(s, f.conditional_expectation(n).unwrap());
            }
        }
    }

    #[test]
    fn fejer_examples() {
        let one = DyadicFunction::one(3).unwrap();
        for system in System::ALL {
            for n in 1..=8 {
                assert_eq!(fejer_mean(system, n, &one).unwrap(), one);
            }
        }
        let w5 = system_function(System::Paley, 5, 3).unwrap();
        assert_eq!(fejer_mean(System::Paley, 8, &w5).unwrap(), w5.scale(&q(3, 8)));
        assert_eq!(fejer_mean_direct(System::Paley, 8, &w5).unwrap(), w5.scale(&q(3, 8)));
        let k1 = system_function(System::Kaczmarz, 1, 3).unwrap();
        assert_eq!(fejer_mean(System::Kaczmarz, 2, &k1).unwrap(), k1.scale(&q(1, 2)));
        assert_eq!(fejer_mean_direct(System::Kaczmarz, 2, &k1).unwrap(), k1.scale(&q(1, 2)));
        assert!(fejer_mean(System::Paley, 0, &one).is_err());
    }

    #[test]
    fn three_forms_agree() {
        for salt in 0..3 {
            let f = sample(4, salt);
            for system in System::ALL {
                for n in 1..=16u64 {
                    let spectral = fejer_mean(system, n, &f).unwrap();
                    assert_eq!(spectral, fejer_mean_direct(system, n, &f).unwrap());
                    let conv = convolve(&f, &fejer_kernel(system, n, 4).unwrap()).unwrap();
                    assert_eq!(spectral, conv, "system={system} n={n}");
                }
            }
        }
    }

    #[test]
    fn weighted_max_examples() {
        let one = DyadicFunction::one(3).unwrap();
        let m = weighted_max_fejer(&one, |_| BigRational::one(), 8).unwrap();
        assert_eq!(m, one);
        let f = sample(3, 2);
        let m = weighted_max_fejer(&f, |_| q(2, 1), 1).unwrap();
        let expect = f.integrate().abs() / q(2, 1);
        assert!((0..8).all(|b| m.value_at(b) == expect));
        assert!(weighted_max_fejer(&f, |n| q(n as i64 - 2, 1), 3).is_err());
    }
}
