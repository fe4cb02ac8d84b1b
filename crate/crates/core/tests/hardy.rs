use kaczmarz::hardy::{
    conjugate_transform, conjugate_transform_spectral, hardy_norm_pow, lp_norm_pow, martingale_of, maximal_function,
    maximal_of, random_atom, validate_atom, weak_lp_norm_pow,
};
use kaczmarz::{DyadicFunction, DyadicInterval, Exponent, GroupPoint};
use num_rational::BigRational;
use proptest::prelude::*;

fn function(res: u32) -> impl Strategy<Value = DyadicFunction> {
    prop::collection::vec((-40i64..=40, 1i64..=9), 1 << res).prop_map(move |v| {
        DyadicFunction::new(res, v.into_iter().map(|(n, d)| BigRational::new(n.into(), d.into())).collect()).unwrap()
    })
}

fn exponent() -> impl Strategy<Value = Exponent> {
    (1u64..=4, 2u64..=8).prop_filter_map("p <= 1", |(n, d)| (n <= d).then(|| Exponent::new(n, d).unwrap()))
}

/// `sup_y y^p μ(|f| >= y)` by scanning every candidate level.
fn weak_oracle(values: &[f64], p: f64) -> f64 {
    values
        .iter()
        .map(|&y| {
            let y = y.abs();
            let count = values.iter().filter(|v| v.abs() >= y).count();
            y.powf(p) * count as f64 / values.len() as f64
        })
        .fold(0.0, f64::max)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn maximal_function_routes_agree(f in function(5)) {
        prop_assert_eq!(maximal_of(&f), maximal_function(&martingale_of(&f)));
    }

    #[test]
    fn norm_ordering(f in function(4), p in exponent()) {
        let pv = p.value();
        let lp = lp_norm_pow(&f, pv).unwrap();
        let weak = weak_lp_norm_pow(&f, pv).unwrap();
        let hardy = hardy_norm_pow(&f, pv).unwrap();
        prop_assert!(weak <= lp * (1.0 + 1e-12));
        prop_assert!(lp <= hardy * (1.0 + 1e-12));
        prop_assert!((weak - weak_oracle(&f.values_f64(), pv)).abs() <= 1e-12 * weak.max(1.0));
    }

    #[test]
    fn random_atoms_are_atoms(p in exponent(), res in 1u32..=6, rank_seed in any::<u32>(), seed in any::<u64>()) {
        let rank = rank_seed % (res + 1);
        let a = random_atom(p, res, rank, seed).unwrap();
        let interval = DyadicInterval::at_origin(rank, res).unwrap();
        prop_assert!(validate_atom(&a, &interval, p).unwrap().valid);
    }

    #[test]
    fn conjugate_routes_agree_and_invert(f in function(4), bits in 0u64..32) {
        let t = GroupPoint::new(bits, 5).unwrap();
        let c = conjugate_transform(&f, t).unwrap();
        prop_assert_eq!(&c, &conjugate_transform_spectral(&f, t).unwrap());
        prop_assert_eq!(conjugate_transform(&c, t).unwrap(), f);
    }

    #[test]
    fn martingale_levels_are_consistent(f in function(4)) {
        let m = martingale_of(&f);
        prop_assert!(m.is_consistent());
        prop_assert_eq!(m.terminal(), &f);
        let diffs = m.differences().unwrap();
        let mut sum = DyadicFunction::zero(4).unwrap();
        for d in &diffs {
            sum = sum.checked_add(d).unwrap();
        }
        prop_assert_eq!(sum, f);
    }
}

#[test]
fn atom_violations_are_reported() {
    let p = Exponent::half();
    let interval = DyadicInterval::at_origin(1, 3).unwrap();
    // nonzero mean
    let bump = DyadicFunction::indicator(3, &interval).unwrap();
    assert!(!validate_atom(&bump, &interval, p).unwrap().valid);
    // support leaks outside I_1
    let leak = DyadicFunction::from_integers(3, vec![1, 0, -1, 0, 0, 1, 0, -1]).unwrap();
    assert!(!validate_atom(&leak, &interval, p).unwrap().valid);
}
