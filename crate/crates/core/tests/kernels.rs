use kaczmarz::kernels::{
    dirichlet, dirichlet_dyadic_closed, fejer_dyadic_walsh_closed, fejer_kernel, is_nonnegative, skvortsov_terms,
};
use kaczmarz::walsh::{kaczmarz_rho, order, walsh_kaczmarz, walsh_paley};
use kaczmarz::{GroupPoint, System};
use num_rational::BigRational;
use proptest::prelude::*;

fn one() -> BigRational {
    BigRational::from_integer(1.into())
}

proptest! {
    #[test]
    fn kaczmarz_is_reordered_paley(n in 1u64..1 << 12, bits in any::<u64>()) {
        let res = order(n).unwrap() + 1;
        let t = GroupPoint::new(bits & ((1 << res) - 1), res).unwrap();
        prop_assert_eq!(walsh_kaczmarz(n, t).unwrap(), walsh_paley(kaczmarz_rho(n), t).unwrap());
    }

    #[test]
    fn rho_is_block_involution(n in 1u64..u64::MAX >> 1) {
        let r = kaczmarz_rho(n);
        prop_assert_eq!(order(r).unwrap(), order(n).unwrap());
        prop_assert_eq!(kaczmarz_rho(r), n);
    }

    #[test]
    fn fejer_kernel_has_unit_integral(n in 1u64..=64, system in prop::sample::select(System::ALL.to_vec())) {
        prop_assert_eq!(fejer_kernel(system, n, 6).unwrap().integrate(), one());
    }

    #[test]
    fn dirichlet_has_unit_integral(n in 1u64..=64, system in prop::sample::select(System::ALL.to_vec())) {
        prop_assert_eq!(dirichlet(system, n, 6).unwrap().integrate(), one());
    }

    #[test]
    fn skvortsov_sum_is_kaczmarz_kernel(n in 1u64..=128) {
        let res = order(n).unwrap() + 1;
        let k = fejer_kernel(System::Kaczmarz, n, res).unwrap();
        prop_assert_eq!(skvortsov_terms(n, res).unwrap().sum(), k);
    }
}

#[test]
fn dyadic_kernels_in_both_systems() {
    for res in 1..=8 {
        for a in 0..res {
            let closed = dirichlet_dyadic_closed(a, res).unwrap();
            for system in System::ALL {
                assert_eq!(dirichlet(system, 1 << a, res).unwrap(), closed);
            }
            let k = fejer_kernel(System::Paley, 1 << a, res).unwrap();
            assert_eq!(k, fejer_dyadic_walsh_closed(a, res).unwrap());
            assert!(is_nonnegative(&k));
        }
    }
}

#[test]
fn kaczmarz_kernels_take_negative_values() {
    assert!((3..32).any(|n| !is_nonnegative(&fejer_kernel(System::Kaczmarz, n, 5).unwrap())));
}
