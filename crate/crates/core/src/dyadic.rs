//! The Walsh group at finite resolution.
//!
//! A point of resolution `N` is an `N`-bit pattern whose bit `i` is the
//! coordinate `x_i` (so `x_0` is the least significant bit). Addition is
//! coordinate-wise mod 2, i.e. XOR. A [`DyadicFunction`] of resolution `N`
//! is constant on every rank-`N` dyadic interval and therefore stored as
//! `2^N` exact rationals indexed by the bit pattern.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::exact::ExactVec;

/// Largest resolution a [`DyadicFunction`] may have (`2^24` cells).
pub const MAX_FUNCTION_RESOLUTION: u32 = 24;

/// Largest resolution a bare [`GroupPoint`] may have.
pub const MAX_POINT_RESOLUTION: u32 = 63;

pub(crate) fn low_mask(width: u32) -> u64 {
    if width >= 64 {
        u64::MAX
    } else {
        (1u64 << width) - 1
    }
}

/// Reverses the lowest `width` bits of `value`; higher bits are dropped.
pub fn reverse_bits(value: u64, width: u32) -> u64 {
    if width == 0 {
        0
    } else {
        (value & low_mask(width)).reverse_bits() >> (64 - width)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GroupPoint {
    bits: u64,
    resolution: u32,
}

impl GroupPoint {
    pub fn new(bits: u64, resolution: u32) -> Result<Self> {
        if resolution > MAX_POINT_RESOLUTION {
            return Err(Error::ResolutionTooLarge(resolution));
        }
        if bits & !low_mask(resolution) != 0 {
            return Err(Error::invalid(format!(
                "bit pattern {bits:#b} does not fit resolution {resolution}"
            )));
        }
        Ok(GroupPoint { bits, resolution })
    }

    /// The null element.
    pub fn zero(resolution: u32) -> Result<Self> {
        GroupPoint::new(0, resolution)
    }

    /// `e_n`: the point whose only nonzero coordinate is `x_n`.
    pub fn unit(n: u32, resolution: u32) -> Result<Self> {
        if n >= resolution {
            return Err(Error::insufficient(format!("e_{n}"), n + 1, resolution));
        }
        GroupPoint::new(1 << n, resolution)
    }

    pub fn bits(&self) -> u64 {
        self.bits
    }

    pub fn resolution(&self) -> u32 {
        self.resolution
    }

    pub fn coordinate(&self, k: u32) -> Result<u8> {
        if k >= self.resolution {
            return Err(Error::insufficient(
                format!("coordinate x_{k}"),
                k + 1,
                self.resolution,
            ));
        }
        Ok(((self.bits >> k) & 1) as u8)
    }

    /// Every point of the given resolution, in bit-pattern order.
    pub fn all(resolution: u32) -> Result<impl Iterator<Item = GroupPoint>> {
        if resolution > MAX_FUNCTION_RESOLUTION {
            return Err(Error::ResolutionTooLarge(resolution));
        }
        Ok((0..1u64 << resolution).map(move |bits| GroupPoint { bits, resolution }))
    }
}

impl fmt::Display for GroupPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        // coordinates in paper order, x_0 first
        for k in 0..self.resolution {
            write!(f, "{}", (self.bits >> k) & 1)?;
        }
        Ok(())
    }
}

pub fn point_add(t: GroupPoint, u: GroupPoint) -> Result<GroupPoint> {
    if t.resolution != u.resolution {
        return Err(Error::ResolutionMismatch {
            left: t.resolution,
            right: u.resolution,
        });
    }
    Ok(GroupPoint {
        bits: t.bits ^ u.bits,
        resolution: t.resolution,
    })
}

/// Bit-level `tau_A`: reverse the lowest `a` coordinates, keep the rest.
pub(crate) fn tau_bits(a: u32, bits: u64) -> u64 {
    (bits & !low_mask(a)) | reverse_bits(bits, a)
}

/// `tau_A(x) = (x_{A-1}, ..., x_0, x_A, x_{A+1}, ...)`.
pub fn tau(a: u32, t: GroupPoint) -> Result<GroupPoint> {
    if a > t.resolution {
        return Err(Error::insufficient(format!("tau_{a}"), a, t.resolution));
    }
    Ok(GroupPoint {
        bits: tau_bits(a, t.bits),
        resolution: t.resolution,
    })
}

/// `I_rank(center)`: all points agreeing with `center` in the first `rank`
/// coordinates.
#[derive(Clone, Copy, Debug)]
pub struct DyadicInterval {
    rank: u32,
    center: GroupPoint,
}

impl DyadicInterval {
    pub fn new(rank: u32, center: GroupPoint) -> Result<Self> {
        if rank > center.resolution {
            return Err(Error::insufficient(
                format!("I_{rank}"),
                rank,
                center.resolution,
            ));
        }
        Ok(DyadicInterval { rank, center })
    }

    /// `I_rank = I_rank(0)` with a center of the given resolution.
    pub fn at_origin(rank: u32, resolution: u32) -> Result<Self> {
        DyadicInterval::new(rank, GroupPoint::zero(resolution)?)
    }

    pub fn rank(&self) -> u32 {
        self.rank
    }

    pub fn center(&self) -> GroupPoint {
        self.center
    }

    /// `mu(I) = 2^{-rank}`.
    pub fn measure(&self) -> BigRational {
        BigRational::new(BigInt::one(), BigInt::one() << self.rank)
    }

    pub(crate) fn contains_bits(&self, bits: u64) -> bool {
        (bits ^ self.center.bits) & low_mask(self.rank) == 0
    }

    pub fn contains(&self, t: GroupPoint) -> Result<bool> {
        in_interval(t, self)
    }
}

impl PartialEq for DyadicInterval {
    fn eq(&self, other: &Self) -> bool {
        self.rank == other.rank
            && (self.center.bits ^ other.center.bits) & low_mask(self.rank) == 0
    }
}

impl Eq for DyadicInterval {}

pub fn in_interval(t: GroupPoint, interval: &DyadicInterval) -> Result<bool> {
    if interval.rank > t.resolution {
        return Err(Error::insufficient(
            format!("membership in I_{}", interval.rank),
            interval.rank,
            t.resolution,
        ));
    }
    Ok(interval.contains_bits(t.bits))
}

/// A function on the Walsh group, constant on rank-`N` dyadic intervals.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct DyadicFunction {
    resolution: u32,
    data: ExactVec,
}

fn check_resolution(resolution: u32) -> Result<usize> {
    if resolution > MAX_FUNCTION_RESOLUTION {
        return Err(Error::ResolutionTooLarge(resolution));
    }
    Ok(1usize << resolution)
}

impl DyadicFunction {
    pub fn new(resolution: u32, values: Vec<BigRational>) -> Result<Self> {
        let len = check_resolution(resolution)?;
        if values.len() != len {
            return Err(Error::invalid(format!(
                "resolution {resolution} needs {len} values, got {}",
                values.len()
            )));
        }
        Ok(DyadicFunction {
            resolution,
            data: ExactVec::from_rationals(&values),
        })
    }

    pub fn from_integers(resolution: u32, values: Vec<i64>) -> Result<Self> {
        let len = check_resolution(resolution)?;
        if values.len() != len {
            return Err(Error::invalid(format!(
                "resolution {resolution} needs {len} values, got {}",
                values.len()
            )));
        }
        Ok(DyadicFunction {
            resolution,
            data: ExactVec::from_ints(values),
        })
    }

    /// Builds a function from an integer-valued rule on bit patterns.
    pub fn from_int_fn(resolution: u32, f: impl Fn(u64) -> i64) -> Result<Self> {
        let len = check_resolution(resolution)?;
        Ok(DyadicFunction {
            resolution,
            data: ExactVec::from_ints((0..len as u64).map(f)),
        })
    }

    pub(crate) fn from_exact(resolution: u32, data: ExactVec) -> Self {
        debug_assert_eq!(data.len(), 1usize << resolution);
        DyadicFunction { resolution, data }
    }

    pub(crate) fn from_parts(resolution: u32, numer: Vec<BigInt>, denom: BigInt) -> Self {
        DyadicFunction::from_exact(resolution, ExactVec::from_parts(numer, denom))
    }

    pub fn zero(resolution: u32) -> Result<Self> {
        let len = check_resolution(resolution)?;
        Ok(DyadicFunction {
            resolution,
            data: ExactVec::zeros(len),
        })
    }

    pub fn constant(resolution: u32, c: &BigRational) -> Result<Self> {
        let len = check_resolution(resolution)?;
        Ok(DyadicFunction {
            resolution,
            data: ExactVec::from_parts(vec![c.numer().clone(); len], c.denom().clone()),
        })
    }

    pub fn one(resolution: u32) -> Result<Self> {
        DyadicFunction::constant(resolution, &BigRational::one())
    }

    /// The indicator of a dyadic interval.
    pub fn indicator(resolution: u32, interval: &DyadicInterval) -> Result<Self> {
        if interval.rank > resolution {
            return Err(Error::insufficient(
                format!("indicator of I_{}", interval.rank),
                interval.rank,
                resolution,
            ));
        }
        DyadicFunction::from_int_fn(resolution, |bits| {
            i64::from(interval.contains_bits(bits))
        })
    }

    pub fn resolution(&self) -> u32 {
        self.resolution
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub(crate) fn exact(&self) -> &ExactVec {
        &self.data
    }

    pub(crate) fn numer(&self) -> &[BigInt] {
        self.data.numer()
    }

    pub(crate) fn denom(&self) -> &BigInt {
        self.data.denom()
    }

    pub fn value(&self, t: GroupPoint) -> Result<BigRational> {
        if t.resolution != self.resolution {
            return Err(Error::ResolutionMismatch {
                left: self.resolution,
                right: t.resolution,
            });
        }
        Ok(self.data.get(t.bits as usize))
    }

    /// Value at the cell with the given bit pattern.
    pub fn value_at(&self, bits: u64) -> BigRational {
        self.data.get(bits as usize)
    }

    pub fn value_f64(&self, bits: u64) -> f64 {
        self.data.get_f64(bits as usize)
    }

    pub fn values(&self) -> Vec<BigRational> {
        (0..self.len()).map(|i| self.data.get(i)).collect()
    }

    pub fn values_f64(&self) -> Vec<f64> {
        (0..self.len()).map(|i| self.data.get_f64(i)).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.is_zero()
    }

    pub fn is_zero_at(&self, bits: u64) -> bool {
        self.data.is_zero_at(bits as usize)
    }

    fn same_resolution(&self, other: &Self) -> Result<()> {
        if self.resolution != other.resolution {
            return Err(Error::ResolutionMismatch {
                left: self.resolution,
                right: other.resolution,
            });
        }
        Ok(())
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        self.same_resolution(other)?;
        Ok(DyadicFunction::from_exact(
            self.resolution,
            self.data.combine(&other.data, |a, b| a + b),
        ))
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self> {
        self.same_resolution(other)?;
        Ok(DyadicFunction::from_exact(
            self.resolution,
            self.data.combine(&other.data, |a, b| a - b),
        ))
    }

    /// Pointwise product.
    pub fn checked_mul(&self, other: &Self) -> Result<Self> {
        self.same_resolution(other)?;
        Ok(DyadicFunction::from_exact(
            self.resolution,
            self.data.pointwise_mul(&other.data),
        ))
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        DyadicFunction::from_exact(self.resolution, self.data.scale(c))
    }

    pub fn neg(&self) -> Self {
        DyadicFunction::from_exact(self.resolution, self.data.map_numer(|n| -n))
    }

    pub fn abs(&self) -> Self {
        DyadicFunction::from_exact(self.resolution, self.data.map_numer(|n| n.abs()))
    }

    /// Multiplies each cell by the sign `s(bits) ∈ {-1, +1}`.
    pub fn mul_sign(&self, s: impl Fn(u64) -> i8) -> Self {
        let numer = self
            .numer()
            .iter()
            .enumerate()
            .map(|(i, n)| if s(i as u64) < 0 { -n } else { n.clone() })
            .collect();
        DyadicFunction::from_parts(self.resolution, numer, self.denom().clone())
    }

    /// `x ↦ f(map(x))` for a map on bit patterns of this resolution.
    pub fn compose(&self, map: impl Fn(u64) -> u64) -> Self {
        let numer = (0..self.len() as u64)
            .map(|bits| self.numer()[map(bits) as usize].clone())
            .collect();
        DyadicFunction::from_parts(self.resolution, numer, self.denom().clone())
    }

    /// `f ∘ tau_A`.
    pub fn compose_tau(&self, a: u32) -> Result<Self> {
        if a > self.resolution {
            return Err(Error::insufficient(format!("tau_{a}"), a, self.resolution));
        }
        Ok(self.compose(|bits| tau_bits(a, bits)))
    }

    /// `sup |f|`.
    pub fn max_abs(&self) -> BigRational {
        let m = self
            .numer()
            .iter()
            .map(|n| n.abs())
            .max()
            .unwrap_or_default();
        BigRational::new(m, self.denom().clone())
    }

    /// `∫_G f dμ` at this resolution.
    pub fn integrate(&self) -> BigRational {
        integrate(self)
    }

    /// Average over the rank-`rank` dyadic interval containing each point.
    pub fn conditional_expectation(&self, rank: u32) -> Result<Self> {
        if rank > self.resolution {
            return Err(Error::insufficient(
                format!("rank-{rank} conditional expectation"),
                rank,
                self.resolution,
            ));
        }
        let mut sums = self.numer().to_vec();
        for bit in (rank..self.resolution).rev() {
            let step = 1usize << bit;
            for i in 0..sums.len() {
                if i & step == 0 {
                    let s = &sums[i] + &sums[i | step];
                    sums[i | step] = s.clone();
                    sums[i] = s;
                }
            }
        }
        let denom = self.denom() << (self.resolution - rank);
        Ok(DyadicFunction::from_parts(self.resolution, sums, denom))
    }

    pub fn refine(&self, resolution: u32) -> Result<Self> {
        refine(self, resolution)
    }
}

impl fmt::Display for DyadicFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for i in 0..self.len() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{}", self.data.get(i))?;
        }
        write!(f, "]")
    }
}

/// `(1/2^N) Σ_t f(t)`, exact.
pub fn integrate(f: &DyadicFunction) -> BigRational {
    f.data.sum() / BigRational::from_integer(BigInt::one() << f.resolution)
}

/// Group convolution `(f*g)(x) = (1/2^N) Σ_u f(u) g(x ⊕ u)` by direct
/// summation.
pub fn convolve(f: &DyadicFunction, g: &DyadicFunction) -> Result<DyadicFunction> {
    f.same_resolution(g)?;
    let len = f.len();
    let fnum = f.numer();
    let gnum = g.numer();
    let numer = (0..len)
        .map(|x| {
            fnum.iter()
                .enumerate()
                .filter(|(_, a)| !a.is_zero())
                .map(|(u, a)| a * &gnum[x ^ u])
                .sum::<BigInt>()
        })
        .collect();
    let denom = (f.denom() * g.denom()) << f.resolution;
    Ok(DyadicFunction::from_parts(f.resolution, numer, denom))
}

/// Re-expresses `f` at a finer resolution without changing it as a
/// function on `G`.
pub fn refine(f: &DyadicFunction, resolution: u32) -> Result<DyadicFunction> {
    if resolution < f.resolution {
        return Err(Error::invalid(format!(
            "cannot refine resolution {} down to {resolution}",
            f.resolution
        )));
    }
    check_resolution(resolution)?;
    let mask = low_mask(f.resolution);
    let numer = (0..1u64 << resolution)
        .map(|bits| f.numer()[(bits & mask) as usize].clone())
        .collect();
    Ok(DyadicFunction::from_parts(
        resolution,
        numer,
        f.denom().clone(),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pt(bits: u64, n: u32) -> GroupPoint {
        GroupPoint::new(bits, n).unwrap()
    }

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn point_addition() {
        assert_eq!(point_add(pt(0b0101, 4), pt(0b0011, 4)).unwrap(), pt(0b0110, 4));
        let t = pt(0b1011, 4);
        assert_eq!(point_add(t, t).unwrap(), pt(0, 4));
        assert_eq!(point_add(t, pt(0, 4)).unwrap(), t);
        assert!(matches!(
            point_add(pt(1, 3), pt(1, 4)),
            Err(Error::ResolutionMismatch { .. })
        ));
    }

    #[test]
    fn group_axioms_exhaustive() {
        for n in 0..=6 {
            let pts: Vec<_> = GroupPoint::all(n).unwrap().collect();
            let zero = GroupPoint::zero(n).unwrap();
            for &a in &pts {
                assert_eq!(point_add(a, zero).unwrap(), a);
                assert_eq!(point_add(a, a).unwrap(), zero);
                for &b in &pts {
                    let ab = point_add(a, b).unwrap();
                    assert_eq!(ab, point_add(b, a).unwrap());
                    for &c in pts.iter().step_by(5) {
                        assert_eq!(
                            point_add(ab, c).unwrap(),
                            point_add(a, point_add(b, c).unwrap()).unwrap()
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn tau_examples() {
        assert_eq!(tau(3, pt(0b0001, 4)).unwrap(), pt(0b0100, 4));
        assert_eq!(tau(0, pt(0b1011, 4)).unwrap(), pt(0b1011, 4));
        assert_eq!(tau(2, pt(0b0110, 4)).unwrap(), pt(0b0101, 4));
        assert!(tau(5, pt(0, 4)).is_err());
    }

    #[test]
    fn tau_matches_coordinate_formula() {
        // tau_A(x)_k = x_{A-1-k} for k < A, x_k otherwise
        for n in 0..=8u32 {
            for a in 0..=n {
                for t in GroupPoint::all(n).unwrap() {
                    let image = tau(a, t).unwrap();
                    for k in 0..n {
                        let src = if k < a { a - 1 - k } else { k };
                        assert_eq!(image.coordinate(k).unwrap(), t.coordinate(src).unwrap());
                    }
                    assert_eq!(tau(a, image).unwrap(), t);
                }
            }
        }
    }

    #[test]
    fn interval_membership() {
        let t = pt(0b1010, 4);
        assert!(DyadicInterval::at_origin(0, 4).unwrap().contains(t).unwrap());
        for n in 0..=4 {
            let i = DyadicInterval::at_origin(n, 4).unwrap();
            assert!(i.contains(pt(0, 4)).unwrap());
        }
        let i1 = DyadicInterval::at_origin(1, 3).unwrap();
        assert!(!i1.contains(GroupPoint::unit(0, 3).unwrap()).unwrap());
        assert!(in_interval(pt(0, 2), &DyadicInterval::at_origin(3, 3).unwrap()).is_err());
        assert_eq!(i1.measure(), q(1, 2));
        // only the first `rank` coordinates of the center matter
        let a = DyadicInterval::new(2, pt(0b101, 3)).unwrap();
        let b = DyadicInterval::new(2, pt(0b001, 3)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn integration() {
        assert_eq!(DyadicFunction::one(3).unwrap().integrate(), q(1, 1));
        let r0 = DyadicFunction::from_int_fn(3, |b| if b & 1 == 1 { -1 } else { 1 }).unwrap();
        assert_eq!(r0.integrate(), q(0, 1));
        let d4 = DyadicFunction::indicator(4, &DyadicInterval::at_origin(2, 4).unwrap())
            .unwrap()
            .scale(&q(4, 1));
        assert_eq!(d4.integrate(), q(1, 1));
    }

    #[test]
    fn convolution_units() {
        let f = DyadicFunction::new(3, (0..8).map(|i| q(i * i - 3, i + 1)).collect()).unwrap();
        let delta = DyadicFunction::from_int_fn(3, |b| if b == 0 { 8 } else { 0 }).unwrap();
        assert_eq!(convolve(&f, &delta).unwrap(), f);
        let one = DyadicFunction::one(3).unwrap();
        assert_eq!(
            convolve(&one, &f).unwrap(),
            DyadicFunction::constant(3, &f.integrate()).unwrap()
        );
        assert!(convolve(&f, &DyadicFunction::one(2).unwrap()).is_err());
    }

    #[test]
    fn convolution_with_dyadic_dirichlet_is_interval_average() {
        let f = DyadicFunction::new(3, (0..8).map(|i| q(3 * i - 7, 1 + i % 3)).collect()).unwrap();
        for n in 0..=3u32 {
            let d = DyadicFunction::indicator(3, &DyadicInterval::at_origin(n, 3).unwrap())
                .unwrap()
                .scale(&BigRational::from_integer(BigInt::one() << n));
            // brute-force interval averages
            let expect: Vec<BigRational> = (0..8u64)
                .map(|x| {
                    let iv = DyadicInterval::new(n, pt(x, 3)).unwrap();
                    let cells: Vec<u64> = (0..8).filter(|&y| iv.contains_bits(y)).collect();
                    cells.iter().map(|&y| f.value_at(y)).sum::<BigRational>()
                        / BigRational::from_integer(cells.len().into())
                })
                .collect();
            let expect = DyadicFunction::new(3, expect).unwrap();
            assert_eq!(convolve(&f, &d).unwrap(), expect);
            assert_eq!(f.conditional_expectation(n).unwrap(), expect);
        }
    }

    #[test]
    fn refinement() {
        let f = DyadicFunction::new(2, vec![q(1, 2), q(-1, 3), q(0, 1), q(5, 1)]).unwrap();
        assert_eq!(refine(&f, 2).unwrap(), f);
        let one = DyadicFunction::one(1).unwrap();
        assert_eq!(refine(&one, 3).unwrap(), DyadicFunction::one(3).unwrap());
        let g = refine(&f, 5).unwrap();
        assert_eq!(g.integrate(), f.integrate());
        for bits in 0..32u64 {
            assert_eq!(g.value_at(bits), f.value_at(bits & 3));
        }
        assert!(refine(&f, 1).is_err());
    }

    #[test]
    fn rejects_bad_shapes() {
        assert!(DyadicFunction::from_integers(2, vec![1, 2, 3]).is_err());
        assert!(GroupPoint::new(8, 3).is_err());
        assert!(DyadicFunction::zero(MAX_FUNCTION_RESOLUTION + 1).is_err());
    }
}
