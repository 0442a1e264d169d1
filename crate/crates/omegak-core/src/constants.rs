//! The limit constants that appear in the moment asymptotics, computed from
//! truncated sums over irreducibles with rigorous tail bounds, plus the
//! exact harmonic-type sums whose decay the error analysis rests on.
//!
//! Design rule: anything that is a finite sum of rationals is computed in
//! exact arithmetic and carried as a `BigRational` next to its f64 image,
//! so that algebraic identities between constants can be tested for exact
//! equality rather than to a tolerance. Tail bounds cover both series
//! truncation and the final rounding to f64.

use crate::numeric::{kahan_sum, rational_to_f64, sum_fractions};
use crate::prime_count::PrimeCountTable;
use crate::stats::Weight;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

/// Euler-Mascheroni constant, correct to the last f64 bit.
pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_860_6;

/// pi^2, correct to the last f64 bit.
pub const PI_SQUARED: f64 = 9.869_604_401_089_358;

const EPS: f64 = f64::EPSILON;

/// A numerical constant together with everything needed to trust it: a
/// rigorous bound on truncation-plus-rounding error, the number of
/// irreducible-degree terms summed, and the exact rational value whenever
/// the defining expression is a finite rational sum.
#[derive(Debug, Clone)]
pub struct ConstantValue {
    pub name: String,
    pub value: f64,
    pub exact: Option<BigRational>,
    pub tail_bound: f64,
    pub terms_used: usize,
}

impl ConstantValue {
    fn from_exact(name: &str, exact: BigRational, tail: f64, terms: usize) -> Self {
        let value = rational_to_f64(&exact);
        ConstantValue {
            name: name.to_string(),
            value,
            exact: Some(exact),
            tail_bound: tail + value.abs() * 2.0 * EPS,
            terms_used: terms,
        }
    }
}

fn mul_bound(va: f64, ta: f64, vb: f64, tb: f64) -> f64 {
    va.abs() * tb + vb.abs() * ta + ta * tb + 4.0 * EPS * (va * vb).abs()
}

/// Factory for the q-dependent constants; `terms` is the truncation depth
/// of every sum over irreducible degrees (default 80, far past where the
/// tails drop below 1e-12 even at q = 2).
pub struct Constants {
    table: PrimeCountTable,
}

impl Constants {
    pub fn new(q: u64) -> Self {
        Self::with_terms(q, 80)
    }

    pub fn with_terms(q: u64, terms: usize) -> Self {
        assert!(terms >= 4, "need at least a few terms for the tail bounds to hold");
        Constants { table: PrimeCountTable::new(q, terms) }
    }

    pub fn q(&self) -> u64 {
        self.table.q()
    }

    pub fn terms(&self) -> usize {
        self.table.max_degree()
    }

    pub fn gamma() -> ConstantValue {
        ConstantValue {
            name: "euler_gamma".into(),
            value: EULER_GAMMA,
            exact: None,
            tail_bound: 1e-16,
            terms_used: 0,
        }
    }

    pub fn pi_squared() -> ConstantValue {
        ConstantValue {
            name: "pi_squared".into(),
            value: PI_SQUARED,
            exact: None,
            tail_bound: 2e-15,
            terms_used: 0,
        }
    }

    /// sum_r (r pi(r) - q^r) / (r q^r): the correction separating this
    /// field's Mertens-type constant from Euler's gamma. Each term is at
    /// most (2/r) q^(-r/2) in size.
    pub fn c1(&self) -> ConstantValue {
        let q = self.q();
        let r = self.terms();
        let mut total = BigRational::zero();
        for d in 1..=r {
            let qd = BigInt::from(q).pow(d as u32);
            let num = BigInt::from(self.table.count(d).clone()) * d - &qd;
            total += BigRational::new(num, qd * d);
        }
        let tail = tail_geometric(q, r, 0.5) * 2.0 / (r as f64 + 1.0);
        ConstantValue::from_exact("c1", total, tail, r)
    }

    /// The constant term of sum_{d <= n} pi(d) q^(-d) - ln n as n grows.
    pub fn a1(&self) -> ConstantValue {
        let c1 = self.c1();
        ConstantValue {
            name: "a1".into(),
            value: EULER_GAMMA + c1.value,
            exact: None,
            tail_bound: 1e-16 + c1.tail_bound + 2.0 * EPS,
            terms_used: c1.terms_used,
        }
    }

    /// L(m) = sum_r pi(r) q^(-rm), convergent for m >= 2.
    pub fn l_value(&self, m: u32) -> ConstantValue {
        assert!(m >= 2, "the L sum diverges for m < 2");
        let q = self.q();
        let r = self.terms();
        let mut total = BigRational::zero();
        for d in 1..=r {
            total += BigRational::new(
                BigInt::from(self.table.count(d).clone()),
                BigInt::from(q).pow(d as u32 * m),
            );
        }
        // pi(r) <= q^r / r, so the tail terms are below q^(-r(m-1))
        let tail = 2.0 * tail_geometric(q, r, (m - 1) as f64);
        ConstantValue::from_exact(&format!("L{m}"), total, tail, r)
    }

    /// C_{g,k} = sum_r pi(r) / (q^(rk) (q^r - g(r))), the density constant
    /// of the weighted excess-multiplicity sums; requires |g(r)| <= q^(r/2).
    pub fn c_weighted(&self, weight: &Weight, k: u32) -> ConstantValue {
        assert!(k >= 1);
        let q = self.q();
        let r = self.terms();
        let mut total = BigRational::zero();
        for d in 1..=r {
            let g = weight.eval(d);
            let qd = BigRational::from(BigInt::from(q).pow(d as u32));
            assert!(
                &g * &g <= qd,
                "weight must stay within the square-root bound"
            );
            let pi = BigRational::from(BigInt::from(self.table.count(d).clone()));
            let denom = BigRational::from(BigInt::from(q).pow(d as u32 * k)) * (qd - g);
            total += pi / denom;
        }
        // with |g| <= q^(r/2) the tail terms are below q^(-rk)/(1 - q^(-1/2))
        let tail =
            tail_geometric(q, r, k as f64) / ((1.0 - (q as f64).powf(-0.5)) * (r as f64 + 1.0));
        ConstantValue::from_exact(&format!("C{k}"), total, tail, r)
    }

    /// Coefficient of ln n in the second-moment main term at k = 1.
    pub fn c2(&self) -> ConstantValue {
        let a1 = self.a1();
        let l2 = self.l_value(2);
        ConstantValue {
            name: "c2".into(),
            value: 1.0 + 2.0 * a1.value - 2.0 * l2.value,
            exact: None,
            tail_bound: 2.0 * a1.tail_bound + 2.0 * l2.tail_bound + 8.0 * EPS,
            terms_used: self.terms(),
        }
    }

    /// Constant term of the second-moment main term at k = 1.
    pub fn c3(&self) -> ConstantValue {
        let a1 = self.a1();
        let l2 = self.l_value(2);
        let l3 = self.l_value(3);
        let l4 = self.l_value(4);
        let left = (a1.value - 2.0 * l2.value, a1.tail_bound + 2.0 * l2.tail_bound);
        let right = (a1.value + 1.0, a1.tail_bound);
        let prod = left.0 * right.0;
        let prod_tail = mul_bound(left.0, left.1, right.0, right.1);
        let l2sq = l2.value * l2.value;
        let l2sq_tail = mul_bound(l2.value, l2.tail_bound, l2.value, l2.tail_bound);
        let value = prod - PI_SQUARED / 6.0 + l2sq + 2.0 * l3.value - l4.value;
        ConstantValue {
            name: "c3".into(),
            value,
            exact: None,
            tail_bound: prod_tail
                + 2e-15 / 6.0
                + l2sq_tail
                + 2.0 * l3.tail_bound
                + l4.tail_bound
                + 16.0 * EPS * value.abs().max(1.0),
            terms_used: self.terms(),
        }
    }

    /// Leading constant of the second moment for k >= 2:
    /// mu (mu + 1) - L(2k) + 2 L(2k+1) - L(2k+2) with mu = L(k) - L(k+1).
    pub fn ck_prime(&self, k: u32) -> ConstantValue {
        assert!(k >= 2);
        let lk = self.l_value(k);
        let lk1 = self.l_value(k + 1);
        let l2k = self.l_value(2 * k);
        let l2k1 = self.l_value(2 * k + 1);
        let l2k2 = self.l_value(2 * k + 2);
        let mu = lk.exact.clone().unwrap() - lk1.exact.clone().unwrap();
        let exact = &mu * (&mu + BigRational::one()) - l2k.exact.unwrap()
            + BigRational::from(BigInt::from(2)) * l2k1.exact.unwrap()
            - l2k2.exact.unwrap();
        let mu_tail = lk.tail_bound + lk1.tail_bound;
        let mu_f = rational_to_f64(&mu);
        let tail = mul_bound(mu_f, mu_tail, mu_f + 1.0, mu_tail)
            + l2k.tail_bound
            + 2.0 * l2k1.tail_bound
            + l2k2.tail_bound;
        ConstantValue::from_exact(&format!("c{k}_prime"), exact, tail, self.terms())
    }
}

/// Upper bound for sum_{r > R} q^(-r s) = q^(-(R+1) s) / (1 - q^(-s)).
fn tail_geometric(q: u64, r: usize, s: f64) -> f64 {
    let ratio = (q as f64).powf(-s);
    ratio.powi(r as i32 + 1) / (1.0 - ratio)
}

/// Exact and floating pieces of the three harmonic-type sums of length n
/// that drive the error terms, with their asymptotic leads subtracted.
#[derive(Debug, Clone)]
pub struct HarmonicRow {
    pub n: usize,
    /// sum 1/(m (n-m)), exact
    pub s1: BigRational,
    /// sum 1/(m^2 (n-m)), exact
    pub s2: BigRational,
    /// sum q^(-m/2)/(m (n-m))
    pub s3: f64,
    pub s1_residual: f64,
    pub s2_residual: f64,
    pub s3_residual: f64,
}

/// The bit size below which `sum_fractions` keeps denominators reduced.
const REDUCE_LIMIT: u64 = 100_000;

pub fn harmonic_row(q: u64, n: usize) -> HarmonicRow {
    assert!(n >= 2);
    let terms1: Vec<(BigInt, BigInt)> = (1..n)
        .map(|m| (BigInt::one(), BigInt::from(m) * BigInt::from(n - m)))
        .collect();
    let terms2: Vec<(BigInt, BigInt)> = (1..n)
        .map(|m| {
            (
                BigInt::one(),
                BigInt::from(m) * BigInt::from(m) * BigInt::from(n - m),
            )
        })
        .collect();
    let s1 = sum_fractions(&terms1, REDUCE_LIMIT);
    let s2 = sum_fractions(&terms2, REDUCE_LIMIT);
    let sqrt_q = (q as f64).sqrt();
    let s3 = kahan_sum((1..n).map(|m| {
        sqrt_q.powi(-(m as i32)) / (m as f64 * (n - m) as f64)
    }));
    let nf = n as f64;
    let ln_n = nf.ln();
    let s1_f = rational_to_f64(&s1);
    let s2_f = rational_to_f64(&s2);
    HarmonicRow {
        n,
        s1_residual: s1_f - (2.0 * ln_n / nf + 2.0 * EULER_GAMMA / nf),
        s2_residual: s2_f - (PI_SQUARED / 6.0 / nf + 2.0 * ln_n / (nf * nf)),
        s3_residual: s3 - (1.0 + 1.0 / (sqrt_q - 1.0)).ln() / nf,
        s1,
        s2,
        s3,
    }
}

/// The first harmonic sum telescopes exactly: sum 1/(m(n-m)) = (2/n) H_{n-1}.
pub fn harmonic_identity_holds(n: usize) -> bool {
    let row = harmonic_row(2, n);
    let terms: Vec<(BigInt, BigInt)> = (1..n).map(|m| (BigInt::one(), BigInt::from(m))).collect();
    let h = sum_fractions(&terms, REDUCE_LIMIT);
    row.s1 == h * BigRational::new(BigInt::from(2), BigInt::from(n))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gamma_against_harmonic_oracle() {
        // H_N - ln N - 1/(2N) + 1/(12 N^2) converges to gamma like N^(-4)
        let n = 1_000_000u64;
        let h = kahan_sum((1..=n).map(|m| 1.0 / m as f64));
        let oracle = h - (n as f64).ln() - 0.5 / n as f64 + 1.0 / (12.0 * (n as f64).powi(2));
        assert!((EULER_GAMMA - oracle).abs() < 1e-12, "oracle gave {oracle}");
    }

    #[test]
    fn pi_squared_against_std() {
        assert!((PI_SQUARED - std::f64::consts::PI * std::f64::consts::PI).abs() < 4e-15);
    }

    #[test]
    fn l2_truncated_spot_value() {
        let c = Constants::with_terms(2, 6);
        let l2 = c.l_value(2);
        assert_eq!(
            l2.exact.unwrap(),
            BigRational::new(BigInt::from(2513), BigInt::from(4096))
        );
        assert_eq!(l2.terms_used, 6);
    }

    #[test]
    fn approximate_magnitudes() {
        let c = Constants::new(2);
        let a1 = c.a1();
        assert!((a1.value - 0.12).abs() < 0.02, "a1 = {}", a1.value);
        let l2 = c.l_value(2);
        assert!((l2.value - 0.615).abs() < 0.005, "L2 = {}", l2.value);
        assert!(a1.tail_bound < 1e-11);
        assert!(l2.tail_bound < 1e-12);
        assert!(c.c2().tail_bound < 1e-10);
        assert!(c.c3().tail_bound < 1e-10);
        assert!(c.ck_prime(2).tail_bound < 1e-10);
    }

    #[test]
    fn identities_hold_exactly() {
        for q in [2u64, 3, 9] {
            let c = Constants::with_terms(q, 40);
            let w = Weight::minus_one();
            // C_1 + C_2 telescopes to L(2) term by term
            let lhs = c.c_weighted(&w, 1).exact.unwrap() + c.c_weighted(&w, 2).exact.unwrap();
            assert_eq!(lhs, c.l_value(2).exact.unwrap(), "q={q}");
            // C_{k-1} - C_{k+1} = L(k) - L(k+1), again term by term
            for k in 2..=4u32 {
                let lhs = c.c_weighted(&w, k - 1).exact.unwrap()
                    - c.c_weighted(&w, k + 1).exact.unwrap();
                let rhs = c.l_value(k).exact.unwrap() - c.l_value(k + 1).exact.unwrap();
                assert_eq!(lhs, rhs, "q={q} k={k}");
            }
        }
    }

    #[test]
    fn truncation_is_cauchy() {
        // doubling the depth moves nothing by more than the claimed tails
        let shallow = Constants::with_terms(2, 40);
        let deep = Constants::with_terms(2, 80);
        assert!((shallow.c1().value - deep.c1().value).abs() <= shallow.c1().tail_bound);
        assert!(
            (shallow.l_value(2).value - deep.l_value(2).value).abs()
                <= shallow.l_value(2).tail_bound
        );
        assert!((shallow.c3().value - deep.c3().value).abs() <= shallow.c3().tail_bound);
    }

    #[test]
    fn harmonic_rows_and_identity() {
        // n = 4: 1/(1*3) + 1/(2*2) + 1/(3*1) = 11/12
        let row = harmonic_row(2, 4);
        assert_eq!(
            row.s1,
            BigRational::new(BigInt::from(11), BigInt::from(12))
        );
        for n in [2usize, 3, 10, 97, 500] {
            assert!(harmonic_identity_holds(n), "n={n}");
        }
        // residuals shrink like 1/n^2 (up to the log factor)
        for n in [50usize, 200, 1000] {
            let row = harmonic_row(2, n);
            let scale = (n * n) as f64;
            assert!(row.s1_residual.abs() * scale < 10.0, "s1 at n={n}");
            assert!(row.s2_residual.abs() * scale < 10.0, "s2 at n={n}");
            assert!(row.s3_residual.abs() * scale < 10.0, "s3 at n={n}");
        }
    }

    #[test]
    fn weighted_constant_rejects_oversized_weights() {
        let c = Constants::with_terms(2, 10);
        let too_big = Weight::Const(BigRational::from(BigInt::from(3)));
        let result = std::panic::catch_unwind(std::panic::AssertUnwindSafe(|| {
            c.c_weighted(&too_big, 1)
        }));
        assert!(result.is_err());
    }
}
