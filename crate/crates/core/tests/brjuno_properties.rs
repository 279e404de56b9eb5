use brjuno::brjuno::{self as bj, fibonacci_tail, TailKind};
use brjuno::cf;
use brjuno::grid;
use brjuno::{AlphaSpec, Rational};
use proptest::prelude::*;

fn surd() -> impl Strategy<Value = AlphaSpec> {
    (
        prop::collection::vec(1i64..=9, 0..4),
        prop::collection::vec(1i64..=6, 1..4),
    )
        .prop_map(|(pre, per)| {
            let mut digits = vec![0];
            digits.extend(pre);
            AlphaSpec::periodic(&digits, &per).unwrap()
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn both_rational_expansions_give_the_same_truncated_sum(q in 1i64..=1000, p in 0i64..1000) {
        let r = Rational::new(p % q, q).unwrap();
        let (a, b) = bj::phi_trunc_both(&r);
        prop_assert!((a - b).abs() <= 1e-12 * a.abs().max(1.0), "{} {} {}", r, a, b);
    }

    #[test]
    fn nearest_integer_sum_is_symmetric(x in surd()) {
        let y = grid::reflect(&x).unwrap();
        let a = bj::phi_tilde(&x, 1e-10).unwrap();
        let b = bj::phi_tilde(&y, 1e-10).unwrap();
        prop_assert!((a.value - b.value).abs() <= 2.0 * (a.tail_bound + b.tail_bound) + 1e-13);
    }

    #[test]
    fn surd_sums_are_certified(x in surd()) {
        let v = bj::phi(&x, 1e-9).unwrap();
        prop_assert_eq!(v.tail_kind, TailKind::Certified);
        prop_assert!(v.tail_bound <= 1e-9 && v.value > 0.0);
    }

    #[test]
    fn partial_sums_increase_to_the_sum(x in surd()) {
        let e = cf::expand_gauss(&x, 40).unwrap();
        let sums = bj::partial_sums(&e, 39).unwrap();
        prop_assert!(sums.windows(2).all(|w| w[1] >= w[0]));
        let full = bj::phi(&x, 1e-12).unwrap();
        prop_assert!(sums[39] <= full.value + 1e-12);
        prop_assert!(full.value - sums[39] <= 1e-6);
    }
}

#[test]
fn golden_and_silver_sums() {
    // constant tails: every α_k equals α, so Φ = log(1/α)/(1 − α)
    for (spec, alpha) in [
        (AlphaSpec::golden(), (5f64.sqrt() - 1.0) / 2.0),
        (AlphaSpec::silver(), 2f64.sqrt() - 1.0),
    ] {
        let v = bj::phi(&spec, 1e-12).unwrap();
        let want = -alpha.ln() / (1.0 - alpha);
        assert!((v.value - want).abs() < 1e-11, "{} {want}", v.value);
    }
}

#[test]
fn fast_digit_growth_is_flagged() {
    let x = "cf:[0;2,4,16,256,65536,4294967296,...]"
        .parse::<AlphaSpec>()
        .unwrap();
    let v = bj::brjuno_sum(&x, brjuno::CfFlavor::Gauss, 1e-8, 256).unwrap();
    assert_eq!(v.tail_kind, TailKind::FibonacciMajorant);
    assert!(!v.converged(1e-8));
    assert!(bj::phi(&x, 1e-8).is_err());
}

#[test]
fn fibonacci_tail_decreases_to_zero() {
    let tails: Vec<f64> = (1..60).map(|n| fibonacci_tail(n, 2.0)).collect();
    assert!(tails.windows(2).all(|w| w[1] < w[0]));
    assert!(tails[58] < 1e-9);
}
