//! Truncated power series with exact rational coefficients, and the
//! generating function for degree-wise sums of the weighted
//! excess-multiplicity statistic. Everything is exact: a coefficient of
//! u^n here is the literal sum of the statistic over all q^n monic
//! polynomials of degree n, which the brute-force oracle can confirm term
//! by term.

use crate::error::Result;
use crate::factor::factor;
use crate::field::FieldContext;
use crate::poly::Poly;
use crate::prime_count::PrimeCountTable;
use crate::stats::{a_weighted, Weight};
use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Zero};

/// Power series modulo u^(order+1), coefficients exact rationals.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TruncatedSeries {
    coeffs: Vec<BigRational>, // length order + 1
}

impl TruncatedSeries {
    pub fn zero(order: usize) -> Self {
        TruncatedSeries { coeffs: vec![BigRational::zero(); order + 1] }
    }

    pub fn one(order: usize) -> Self {
        let mut s = Self::zero(order);
        s.coeffs[0] = BigRational::one();
        s
    }

    pub fn from_coeffs(coeffs: Vec<BigRational>) -> Self {
        assert!(!coeffs.is_empty());
        TruncatedSeries { coeffs }
    }

    /// Truncation order: terms u^0 through u^order are tracked.
    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeff(&self, i: usize) -> &BigRational {
        &self.coeffs[i]
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    fn same_order(&self, other: &Self) {
        assert_eq!(self.order(), other.order(), "series orders must match");
    }

    pub fn add(&self, other: &Self) -> Self {
        self.same_order(other);
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| a + b)
            .collect();
        TruncatedSeries { coeffs }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.same_order(other);
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| a - b)
            .collect();
        TruncatedSeries { coeffs }
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        TruncatedSeries { coeffs: self.coeffs.iter().map(|a| a * c).collect() }
    }

    /// Multiply by u^k, dropping what overflows the truncation order.
    pub fn shift(&self, k: usize) -> Self {
        let mut out = Self::zero(self.order());
        for i in k..=self.order() {
            out.coeffs[i] = self.coeffs[i - k].clone();
        }
        out
    }

    pub fn mul(&self, other: &Self) -> Self {
        self.same_order(other);
        let n = self.coeffs.len();
        let mut out = vec![BigRational::zero(); n];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().take(n - i).enumerate() {
                if !b.is_zero() {
                    out[i + j] += a * b;
                }
            }
        }
        TruncatedSeries { coeffs: out }
    }

    /// Multiplicative inverse; the constant term must be nonzero.
    pub fn recip(&self) -> Self {
        assert!(!self.coeffs[0].is_zero(), "cannot invert a series with zero constant term");
        let n = self.coeffs.len();
        let inv0 = self.coeffs[0].recip();
        let mut out = vec![BigRational::zero(); n];
        out[0] = inv0.clone();
        for i in 1..n {
            let mut acc = BigRational::zero();
            for j in 1..=i {
                if !self.coeffs[j].is_zero() {
                    acc += &self.coeffs[j] * &out[i - j];
                }
            }
            out[i] = -acc * &inv0;
        }
        TruncatedSeries { coeffs: out }
    }

    /// Binary powering with an arbitrarily large exponent.
    pub fn pow(&self, exp: &BigUint) -> Self {
        let mut result = Self::one(self.order());
        let mut sq = self.clone();
        let bits = exp.bits();
        for i in 0..bits {
            if exp.bit(i) {
                result = result.mul(&sq);
            }
            if i + 1 < bits {
                sq = sq.mul(&sq);
            }
        }
        result
    }
}

/// The zeta-like series sum_m q^m u^m: coefficient m counts monic
/// polynomials of degree m.
pub fn zeta_series(q: u64, order: usize) -> TruncatedSeries {
    let mut coeffs = Vec::with_capacity(order + 1);
    let mut pw = BigInt::one();
    for _ in 0..=order {
        coeffs.push(BigRational::from(pw.clone()));
        pw *= q;
    }
    TruncatedSeries::from_coeffs(coeffs)
}

/// sum_d pi(d) u^((k+1) d) sum_j g(d)^j u^(j d): the per-irreducible layer
/// of the weighted excess-multiplicity sum, before tensoring with the free
/// cofactor.
pub fn weighted_excess_series(
    table: &PrimeCountTable,
    weight: &Weight,
    k: u32,
    order: usize,
) -> TruncatedSeries {
    let mut out = TruncatedSeries::zero(order);
    let start = (k as usize) + 1;
    let mut d = 1usize;
    while start * d <= order {
        let pi = BigRational::from(BigInt::from(table.count(d).clone()));
        let g = weight.eval(d);
        let mut gpow = BigRational::one();
        let mut m = start * d;
        while m <= order {
            out.coeffs[m] += &pi * &gpow;
            gpow *= &g;
            m += d;
        }
        d += 1;
    }
    out
}

/// Generating function whose u^n coefficient equals the sum over all monic
/// f of degree n of the weighted excess-multiplicity statistic with
/// parameters (weight, k).
pub fn a_series(
    table: &PrimeCountTable,
    weight: &Weight,
    k: u32,
    order: usize,
) -> TruncatedSeries {
    zeta_series(table.q(), order).mul(&weighted_excess_series(table, weight, k, order))
}

/// The same coefficients by brute force: factor every monic polynomial of
/// each degree up to the order and add up the statistic. Exponential;
/// serves as the oracle for `a_series`.
pub fn a_series_brute(
    ctx: &FieldContext,
    weight: &Weight,
    k: u32,
    order: usize,
) -> Result<TruncatedSeries> {
    let q = ctx.q();
    let mut out = TruncatedSeries::zero(order);
    for n in 1..=order {
        let count = q
            .checked_pow(n as u32)
            .filter(|&t| t <= 1 << 26)
            .ok_or_else(|| crate::error::capacity("brute series sweep exceeds the 2^26 budget"))?;
        let mut total = BigRational::zero();
        for idx in 0..count {
            let f = Poly::monic_by_index(ctx, n, idx);
            total += a_weighted(&factor(ctx, &f, 0)?, weight, k);
        }
        out.coeffs[n] = total;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn ring_operations() {
        let a = TruncatedSeries::from_coeffs(vec![rat(1, 1), rat(2, 1), rat(3, 1)]);
        let b = TruncatedSeries::from_coeffs(vec![rat(1, 2), rat(0, 1), rat(-1, 1)]);
        assert_eq!(a.add(&b).coeffs(), &[rat(3, 2), rat(2, 1), rat(2, 1)]);
        assert_eq!(a.sub(&b).coeffs(), &[rat(1, 2), rat(2, 1), rat(4, 1)]);
        // (1 + 2u + 3u^2)(1/2 - u^2) = 1/2 + u + u^2/2 truncated at u^2
        assert_eq!(a.mul(&b).coeffs(), &[rat(1, 2), rat(1, 1), rat(1, 2)]);
        assert_eq!(a.shift(1).coeffs(), &[rat(0, 1), rat(1, 1), rat(2, 1)]);
        assert_eq!(a.scale(&rat(2, 1)).coeffs(), &[rat(2, 1), rat(4, 1), rat(6, 1)]);
    }

    #[test]
    fn recip_and_pow_invert() {
        // geometric series: 1/(1 - u) = 1 + u + u^2 + ...
        let one_minus_u = TruncatedSeries::from_coeffs(vec![
            rat(1, 1),
            rat(-1, 1),
            rat(0, 1),
            rat(0, 1),
            rat(0, 1),
        ]);
        let geo = one_minus_u.recip();
        assert!(geo.coeffs().iter().all(|c| c == &rat(1, 1)));
        assert_eq!(one_minus_u.mul(&geo), TruncatedSeries::one(4));

        let p = one_minus_u.pow(&BigUint::from(3u32));
        // (1-u)^3 = 1 - 3u + 3u^2 - u^3
        assert_eq!(
            p.coeffs(),
            &[rat(1, 1), rat(-3, 1), rat(3, 1), rat(-1, 1), rat(0, 1)]
        );
        assert_eq!(p.pow(&BigUint::from(0u32)), TruncatedSeries::one(4));
    }

    #[test]
    fn zeta_counts_monics() {
        let z = zeta_series(3, 4);
        assert_eq!(z.coeff(0), &rat(1, 1));
        assert_eq!(z.coeff(3), &rat(27, 1));
    }

    #[test]
    fn excess_layer_spot_values() {
        let table = PrimeCountTable::new(2, 8);
        let b = weighted_excess_series(&table, &Weight::minus_one(), 1, 8);
        assert_eq!(b.coeff(0), &rat(0, 1));
        assert_eq!(b.coeff(1), &rat(0, 1));
        assert_eq!(b.coeff(2), &rat(2, 1)); // pi(1) = 2 at u^(2*1)
        assert_eq!(b.coeff(3), &rat(-2, 1)); // j = 1 layer of degree-1 irreducibles

        let a = a_series(&table, &Weight::minus_one(), 1, 8);
        assert_eq!(a.coeff(2), &rat(2, 1));
        assert_eq!(a.coeff(3), &rat(2, 1));
    }

    #[test]
    fn series_matches_brute_force() {
        for (q, order) in [(2u64, 10usize), (3, 6)] {
            let ctx = FieldContext::new(q, 1).unwrap();
            let table = PrimeCountTable::new(q, order);
            for k in 1..=3u32 {
                for weight in [
                    Weight::minus_one(),
                    Weight::Const(rat(1, 1)),
                    Weight::Const(rat(1, 2)),
                ] {
                    let fast = a_series(&table, &weight, k, order);
                    let brute = a_series_brute(&ctx, &weight, k, order).unwrap();
                    assert_eq!(fast, brute, "q={q} k={k}");
                }
            }
        }
    }
}
