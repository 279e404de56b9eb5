#![allow(dead_code)]

use brjuno::AlphaSpec;
use rand::Rng;

/// `[0; a_1, …, a_k | b_1, …, b_l]` with digits in `1..=max_digit`.
pub fn random_surd<R: Rng>(rng: &mut R, max_digit: i64) -> AlphaSpec {
    let pre_len = rng.random_range(0..=4);
    let per_len = rng.random_range(1..=3);
    let mut pre = vec![0i64];
    pre.extend((0..pre_len).map(|_| rng.random_range(1..=max_digit)));
    let period: Vec<i64> = (0..per_len)
        .map(|_| rng.random_range(1..=max_digit))
        .collect();
    AlphaSpec::periodic(&pre, &period).expect("valid digits")
}
