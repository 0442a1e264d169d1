//! Numeric plumbing shared by the statistics modules: correctly rounded
//! big-integer/big-rational to f64 conversion, compensated float summation,
//! and divide-and-conquer summation of exact fractions.
//!
//! The conversions matter: residuals in this crate are differences of
//! near-equal quantities whose exact parts are kept as big integers or
//! rationals until the last moment, so the final rounding step must not
//! introduce more than half an ulp of error.

use num_bigint::{BigInt, BigUint, Sign};
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// 2^e as an f64. Exact for all e where the result is normal; saturates to
/// infinity / zero outside the representable range.
pub fn exp2i(e: i64) -> f64 {
    if e >= 1024 {
        f64::INFINITY
    } else if e >= -1022 {
        f64::from_bits(((e + 1023) as u64) << 52)
    } else if e >= -1074 {
        // subnormal range
        f64::from_bits(1u64 << (e + 1074))
    } else {
        0.0
    }
}

/// Round a 54-bit-or-shorter magnitude plus sticky information to f64,
/// then scale by 2^exp. `top` must satisfy top < 2^54. Round half to even.
fn assemble(top: u64, sticky: bool, exp: i64, negative: bool) -> f64 {
    debug_assert!(top < (1 << 54));
    let (mantissa, exp) = if top >= (1 << 53) {
        let round_bit = top & 1;
        let mut m = top >> 1;
        if round_bit == 1 && (sticky || (m & 1) == 1) {
            m += 1; // may round up to 2^53, which is still exactly representable
        }
        (m, exp + 1)
    } else {
        // top fits in 53 bits; sticky can only matter when top is exactly at a
        // halfway point, which cannot happen here because no bits were dropped.
        (top, exp)
    };
    let v = (mantissa as f64) * exp2i(exp);
    if negative {
        -v
    } else {
        v
    }
}

/// Correctly rounded conversion of a big unsigned integer to f64.
pub fn biguint_to_f64(x: &BigUint) -> f64 {
    let bits = x.bits();
    if bits <= 53 {
        return u64::try_from(x).map(|v| v as f64).unwrap_or(0.0);
    }
    let shift = bits - 54;
    let top = u64::try_from(&(x >> shift)).unwrap();
    let sticky = (x & ((BigUint::one() << shift) - 1u32)) != BigUint::zero();
    assemble(top, sticky, shift as i64, false)
}

/// Correctly rounded conversion of a big signed integer to f64.
pub fn bigint_to_f64(x: &BigInt) -> f64 {
    let v = biguint_to_f64(x.magnitude());
    if x.sign() == Sign::Minus {
        -v
    } else {
        v
    }
}

/// Correctly rounded conversion of num/den to f64. `den` must be nonzero;
/// the fraction need not be reduced. Sign may sit on either component.
pub fn fraction_to_f64(num: &BigInt, den: &BigInt) -> f64 {
    assert!(!den.is_zero(), "fraction_to_f64: zero denominator");
    if num.is_zero() {
        return 0.0;
    }
    let negative = num.is_negative() != den.is_negative();
    let n = num.magnitude();
    let d = den.magnitude();
    let nb = n.bits() as i64;
    let db = d.bits() as i64;
    // Scale so the integer quotient carries at least 55 significant bits.
    let shift = db - nb + 55;
    let (q, r) = if shift >= 0 {
        let scaled = n << (shift as u64);
        num_integer::Integer::div_rem(&scaled, d)
    } else {
        let scaled = d << ((-shift) as u64);
        num_integer::Integer::div_rem(n, &scaled)
    };
    // q has 54..=56 bits; fold excess bits into sticky via assemble on the top 54.
    let qb = q.bits();
    debug_assert!(qb >= 54);
    let drop = qb - 54;
    let top = u64::try_from(&(&q >> drop)).unwrap();
    let sticky = !r.is_zero() || (drop > 0 && (&q & ((BigUint::one() << drop) - 1u32)) != BigUint::zero());
    assemble(top, sticky, drop as i64 - shift, negative)
}

/// Correctly rounded conversion of a big rational (reduced or not) to f64.
pub fn rational_to_f64(r: &BigRational) -> f64 {
    fraction_to_f64(r.numer(), r.denom())
}

/// Kahan-compensated sum. Keeps absolute error near machine epsilon of the
/// total magnitude regardless of term count.
pub fn kahan_sum(values: impl IntoIterator<Item = f64>) -> f64 {
    let mut sum = 0.0f64;
    let mut c = 0.0f64;
    for v in values {
        let y = v - c;
        let t = sum + y;
        c = (t - sum) - y;
        sum = t;
    }
    sum
}

/// Sum of exact fractions by divide and conquer, without intermediate gcd
/// reduction. Balanced splitting keeps the bignum multiplications near the
/// top of the tree where fast multiplication pays off; a final reduction is
/// only attempted while the denominator stays below `reduce_bit_limit` bits
/// (harmonic-type denominators grow to hundreds of kilobits where a gcd
/// would dominate the runtime, and downstream consumers accept raw ratios).
pub fn sum_fractions(terms: &[(BigInt, BigInt)], reduce_bit_limit: u64) -> BigRational {
    fn rec(t: &[(BigInt, BigInt)]) -> (BigInt, BigInt) {
        match t.len() {
            0 => (BigInt::zero(), BigInt::one()),
            1 => t[0].clone(),
            len => {
                let (l, r) = t.split_at(len / 2);
                let (an, ad) = rec(l);
                let (bn, bd) = rec(r);
                (&an * &bd + &bn * &ad, ad * bd)
            }
        }
    }
    let (num, den) = rec(terms);
    debug_assert!(!den.is_zero());
    if den.bits() <= reduce_bit_limit {
        BigRational::new(num, den)
    } else {
        BigRational::new_raw(num, den)
    }
}

/// Natural log of a u64, as f64.
pub fn ln_u64(n: u64) -> f64 {
    (n as f64).ln()
}

/// Deterministic primality by trial division (6k±1 wheel). Fine for the
/// sizes this crate accepts as field characteristics (< 2^31).
pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n % 2 == 0 {
        return n == 2;
    }
    if n % 3 == 0 {
        return n == 3;
    }
    let mut d = 5u64;
    while d * d <= n {
        if n % d == 0 || n % (d + 2) == 0 {
            return false;
        }
        d += 6;
    }
    true
}

/// Distinct prime factors of n, ascending. n = 0 or 1 yields an empty list.
pub fn distinct_prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut push = |p: u64, n: &mut u64| {
        out.push(p);
        while *n % p == 0 {
            *n /= p;
        }
    };
    if n % 2 == 0 {
        push(2, &mut n);
    }
    let mut d = 3u64;
    while d * d <= n {
        if n % d == 0 {
            push(d, &mut n);
        }
        d += 2;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::FromPrimitive;

    #[test]
    fn exp2i_matches_powi() {
        // powi itself underflows to zero inside the subnormal range, so the
        // comparison stops at the normal boundary; subnormals get bit-level checks.
        for e in -1022i64..1020 {
            assert_eq!(exp2i(e), 2.0f64.powi(e as i32), "e={e}");
        }
        assert_eq!(exp2i(-1074), f64::from_bits(1)); // smallest subnormal
        assert_eq!(exp2i(-1074) / 2.0, 0.0);
        assert_eq!(exp2i(-1023), exp2i(-1022) / 2.0);
        assert_eq!(exp2i(5000), f64::INFINITY);
        assert_eq!(exp2i(-5000), 0.0);
    }

    #[test]
    fn biguint_round_trips_exact_doubles() {
        for v in [0u64, 1, 2, 12345, (1 << 53) - 1, 1 << 53, 1 << 60] {
            let b = BigUint::from(v);
            assert_eq!(biguint_to_f64(&b), v as f64, "v={v}");
        }
    }

    #[test]
    fn biguint_rounds_half_to_even() {
        // 2^54 + 2 is exactly representable; 2^54 + 1 must round down to 2^54
        // (tie, even), while 2^54 + 3 rounds up to 2^54 + 4.
        let base = BigUint::from(1u64 << 54);
        assert_eq!(biguint_to_f64(&(&base + 1u32)), (1u64 << 54) as f64);
        assert_eq!(biguint_to_f64(&(&base + 2u32)), ((1u64 << 54) + 2) as f64);
        assert_eq!(biguint_to_f64(&(&base + 3u32)), ((1u64 << 54) + 4) as f64);
        // With any bit set below, the tie breaks upward.
        let x = (BigUint::from(1u64 << 54) + 1u32) * BigUint::from(1u64 << 30) + 1u32;
        let expect = ((1u64 << 54) + 2) as f64 * 2.0f64.powi(30);
        assert_eq!(biguint_to_f64(&x), expect);
    }

    #[test]
    fn fractions_match_native_division() {
        // For fractions of small integers the correctly rounded result is
        // exactly what hardware division produces.
        let cases: &[(i64, i64)] = &[
            (1, 3),
            (2, 3),
            (-7, 11),
            (355, 113),
            (1, 10),
            (123456789, 987654321),
            (-1, 7),
            (997, 331),
        ];
        for &(n, d) in cases {
            let r = BigRational::new(BigInt::from(n), BigInt::from(d));
            assert_eq!(rational_to_f64(&r), (n as f64) / (d as f64), "{n}/{d}");
        }
    }

    #[test]
    fn fractions_handle_huge_operands() {
        // (2^200 + 1) / 2^200 rounds to 1.0; (2^200 + 2^147) / 2^200 = 1 + 2^-53
        // is the tie and rounds to even (1.0); one more low bit pushes it up.
        let big: BigInt = BigInt::from(1u8) << 200;
        let one = rational_to_f64(&BigRational::new((&big) + 1, big.clone()));
        assert_eq!(one, 1.0);
        let tie = rational_to_f64(&BigRational::new((&big) + (BigInt::from(1u8) << 147), big.clone()));
        assert_eq!(tie, 1.0);
        let up = rational_to_f64(&BigRational::new(
            (&big) + (BigInt::from(1u8) << 147) + 1,
            big.clone(),
        ));
        assert_eq!(up, 1.0 + 2.0f64.powi(-52));
    }

    #[test]
    fn unreduced_fractions_convert_the_same() {
        let a = BigRational::new_raw(BigInt::from(25), BigInt::from(35));
        let b = BigRational::new(BigInt::from(5), BigInt::from(7));
        assert_eq!(rational_to_f64(&a), rational_to_f64(&b));
    }

    #[test]
    fn kahan_beats_naive_on_adversarial_input() {
        // 1 followed by 2^26 copies of 2^-53 sums to 1 + 2^-27 exactly in
        // compensated arithmetic; naive summation loses every small term.
        let n = 1u64 << 26;
        let small = 2.0f64.powi(-53);
        let total = kahan_sum(std::iter::once(1.0).chain((0..n).map(|_| small)));
        let expect = 1.0 + (n as f64) * small;
        assert!((total - expect).abs() < 1e-15, "{total} vs {expect}");
    }

    #[test]
    fn sum_fractions_small_cases() {
        // 1/1 + 1/2 + 1/3 = 11/6
        let terms: Vec<(BigInt, BigInt)> = (1..=3)
            .map(|d| (BigInt::one(), BigInt::from(d)))
            .collect();
        let s = sum_fractions(&terms, 1 << 20);
        assert_eq!(s, BigRational::new(BigInt::from(11), BigInt::from(6)));
        let empty = sum_fractions(&[], 1 << 20);
        assert_eq!(empty, BigRational::from_i64(0).unwrap());
    }

    #[test]
    fn primality_and_factorization() {
        assert!(is_prime_u64(2));
        assert!(is_prime_u64(3));
        assert!(is_prime_u64(2147483629)); // largest prime below 2^31 - 1 territory
        assert!(!is_prime_u64(1));
        assert!(!is_prime_u64(0));
        assert!(!is_prime_u64(65535));
        assert!(is_prime_u64(65537));
        assert_eq!(distinct_prime_factors(65535), vec![3, 5, 17, 257]);
        assert_eq!(distinct_prime_factors(12), vec![2, 3]);
        assert_eq!(distinct_prime_factors(1), Vec::<u64>::new());
        assert_eq!(distinct_prime_factors(97), vec![97]);
    }

    #[test]
    fn sum_fractions_matches_sequential_fold() {
        let terms: Vec<(BigInt, BigInt)> = (1..=200)
            .map(|m| (BigInt::from(m % 7 - 3), BigInt::from(m * m + 1)))
            .collect();
        let fast = sum_fractions(&terms, u64::MAX);
        let slow = terms
            .iter()
            .fold(BigRational::zero(), |acc, (n, d)| {
                acc + BigRational::new(n.clone(), d.clone())
            });
        assert_eq!(fast, slow);
    }
}
