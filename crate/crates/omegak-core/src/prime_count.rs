//! Counting monic irreducibles over F_q: the exact Moebius-inversion count
//! pi_q(d) = (1/d) sum_{e | d} mu(d/e) q^e, tables of these counts, the
//! Gauss identity sum_{d | n} d pi_q(d) = q^n that validates them, explicit
//! enumeration of small-degree irreducibles, and the exact partial sums
//! sum_{d <= n} pi_q(d) q^(-d) whose drift against ln n pins down the
//! field's analogue of the Mertens constant.

use crate::error::{capacity, domain, Result};
use crate::factor::is_irreducible;
use crate::field::FieldContext;
use crate::poly::Poly;
use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{Signed, Zero};

/// Moebius function by trial division.
fn mobius(n: u64) -> i64 {
    debug_assert!(n >= 1);
    let mut m = n;
    let mut sign = 1i64;
    let mut p = 2u64;
    while p * p <= m {
        if m % p == 0 {
            m /= p;
            if m % p == 0 {
                return 0;
            }
            sign = -sign;
        }
        p += 1;
    }
    if m > 1 {
        sign = -sign;
    }
    sign
}

/// Number of monic irreducibles of degree exactly n over F_q.
pub fn pi_exact(q: u64, n: usize) -> BigUint {
    assert!(n >= 1, "degree must be positive");
    let n = n as u64;
    let mut total = BigInt::zero();
    for d in 1..=n {
        if n % d == 0 {
            let mu = mobius(n / d);
            if mu != 0 {
                let term = BigInt::from(q).pow(d as u32);
                total += term * mu;
            }
        }
    }
    let (quot, rem) = num_integer::Integer::div_rem(&total, &BigInt::from(n));
    assert!(rem.is_zero() && !quot.is_negative(), "inversion must divide evenly");
    quot.to_biguint().unwrap()
}

/// Precomputed pi_q(d) for d = 1..=max_degree.
#[derive(Debug, Clone)]
pub struct PrimeCountTable {
    q: u64,
    counts: Vec<BigUint>,
}

impl PrimeCountTable {
    pub fn new(q: u64, max_degree: usize) -> Self {
        let counts = (1..=max_degree).map(|d| pi_exact(q, d)).collect();
        PrimeCountTable { q, counts }
    }

    pub fn q(&self) -> u64 {
        self.q
    }

    pub fn max_degree(&self) -> usize {
        self.counts.len()
    }

    pub fn count(&self, d: usize) -> &BigUint {
        &self.counts[d - 1]
    }

    /// Check sum_{d | n} d pi_q(d) = q^n for every n in the table. Every
    /// count participates in at least the n = d instance, so a corrupted
    /// entry cannot hide.
    pub fn gauss_identity_holds(&self) -> bool {
        for n in 1..=self.max_degree() {
            let mut lhs = BigUint::zero();
            for d in 1..=n {
                if n % d == 0 {
                    lhs += self.count(d) * BigUint::from(d);
                }
            }
            if lhs != BigUint::from(self.q).pow(n as u32) {
                return false;
            }
        }
        true
    }

    /// Corrupt one entry (testing hook for self-diagnosis paths).
    pub fn corrupt_for_testing(&mut self) {
        if let Some(c) = self.counts.last_mut() {
            *c += 1u32;
        }
    }
}

/// All monic irreducibles of degree <= max_degree in canonical order.
/// Enumeration visits every monic polynomial of each degree, so the total
/// q + q^2 + ... + q^max_degree is capped at 2^26.
pub fn irreducibles_up_to(ctx: &FieldContext, max_degree: usize) -> Result<Vec<Poly>> {
    if max_degree == 0 {
        return Err(domain("need a positive degree bound"));
    }
    let q = ctx.q();
    let mut budget: u64 = 0;
    for d in 1..=max_degree {
        let size = q
            .checked_pow(d as u32)
            .filter(|s| s + budget <= 1 << 26)
            .ok_or_else(|| {
                capacity(format!(
                    "enumerating monic polynomials up to degree {max_degree} over a field of \
                     size {q} exceeds the 2^26 budget"
                ))
            })?;
        budget += size;
    }
    let mut out = Vec::new();
    for d in 1..=max_degree {
        for idx in 0..q.pow(d as u32) {
            let f = Poly::monic_by_index(ctx, d, idx);
            if is_irreducible(ctx, &f)? {
                out.push(f);
            }
        }
    }
    out.sort_by(|a, b| a.canonical_cmp(b));
    Ok(out)
}

/// Exact partial sum sum_{d <= n} pi_q(d) q^(-d). As n grows this tracks
/// ln n plus a q-dependent constant.
pub fn mertens_exact(table: &PrimeCountTable, n: usize) -> BigRational {
    assert!(n >= 1 && n <= table.max_degree());
    let q = BigUint::from(table.q);
    // common denominator q^n: numerator sum pi(d) q^(n-d)
    let mut num = BigUint::zero();
    for d in 1..=n {
        num += table.count(d) * q.pow((n - d) as u32);
    }
    BigRational::new(BigInt::from(num), BigInt::from(q.pow(n as u32)))
}
