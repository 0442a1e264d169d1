//! Statistics of the factor-multiplicity profile over all monic polynomials
//! of a fixed degree. For a monic f and k >= 1, omega_k(f) counts the
//! distinct monic irreducible factors dividing f with multiplicity exactly
//! k; omega_0 here denotes the plain count of distinct factors. The module
//! offers three independent routes to the same numbers, kept separate so
//! they can check each other:
//!
//! * brute enumeration of all q^n monic polynomials (exact, exponential);
//! * closed-form first and second moments by inclusion-exclusion over
//!   irreducible divisors (exact, polynomial time);
//! * truncated generating functions in u with integer coefficients, both
//!   for the moments' census cousins (the number of f with omega_k = 0 or
//!   = 1) and for weighted sums over factors of high multiplicity.

use crate::error::{capacity, domain, Result};
use crate::factor::{multiplicity_spectrum, Factorization, Spectrum};
use crate::field::FieldContext;
use crate::gf2;
use crate::poly::Poly;
use crate::prime_count::PrimeCountTable;
use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// The multiplicity profile of one polynomial: how many distinct irreducible
/// factors it has at each exact multiplicity.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OmegaProfile {
    spec: Spectrum,
}

impl OmegaProfile {
    pub fn from_spectrum(spec: Spectrum) -> Self {
        OmegaProfile { spec }
    }

    /// Total number of distinct irreducible factors.
    pub fn omega(&self) -> u64 {
        self.spec.iter().map(|&(_, c)| c).sum()
    }

    /// Number of distinct factors with multiplicity exactly k (k >= 1).
    pub fn omega_k(&self, k: u32) -> u64 {
        self.spec
            .binary_search_by_key(&k, |&(m, _)| m)
            .map(|i| self.spec[i].1)
            .unwrap_or(0)
    }

    pub fn spectrum(&self) -> &Spectrum {
        &self.spec
    }
}

/// Profile read off a completed factorization.
pub fn omega_profile(fac: &Factorization) -> OmegaProfile {
    OmegaProfile { spec: fac.spectrum() }
}

/// Profile computed directly (squarefree + distinct-degree splitting only,
/// no equal-degree stage, no randomness).
pub fn profile(ctx: &FieldContext, f: &Poly) -> Result<OmegaProfile> {
    Ok(OmegaProfile { spec: multiplicity_spectrum(ctx, f)? })
}

fn t_count(q: &BigUint, m: i64) -> BigUint {
    if m >= 0 {
        q.pow(m as u32)
    } else {
        BigUint::zero()
    }
}

/// Number of monic f of degree n divisible by l^k but not l^(k+1), for one
/// fixed monic irreducible l of degree d: q^(n-kd) - q^(n-(k+1)d), with
/// powers of negative exponent read as zero.
pub fn exact_divisibility_count(q: u64, n: usize, d: usize, k: u32) -> BigUint {
    let q = BigUint::from(q);
    let (n, d, k) = (n as i64, d as i64, k as i64);
    t_count(&q, n - k * d) - t_count(&q, n - (k + 1) * d)
}

/// Sum of omega_k(f) over all monic f of degree n (k = 0 means the plain
/// distinct-factor count omega).
pub fn first_moment_exact(table: &PrimeCountTable, n: usize, k: u32) -> BigUint {
    let q = BigUint::from(table.q());
    let mut total = BigUint::zero();
    if k == 0 {
        for d in 1..=n.min(table.max_degree()) {
            total += table.count(d) * q.pow((n - d) as u32);
        }
    } else {
        let mut d = 1usize;
        while d * k as usize <= n {
            let (ni, di, ki) = (n as i64, d as i64, k as i64);
            let exact = t_count(&q, ni - ki * di) - t_count(&q, ni - (ki + 1) * di);
            total += table.count(d) * exact;
            d += 1;
        }
    }
    total
}

/// Sum of omega_k(f)^2 over all monic f of degree n, for k >= 1. Splits the
/// square into the diagonal (the first moment) plus ordered pairs of
/// distinct irreducibles, counted by inclusion-exclusion on the four ways
/// the two multiplicities can overshoot k.
pub fn second_moment_exact(table: &PrimeCountTable, n: usize, k: u32) -> Result<BigUint> {
    if k == 0 {
        return Err(domain("second moment is computed for multiplicities k >= 1"));
    }
    let q = BigUint::from(table.q());
    let ki = k as i64;
    let ni = n as i64;
    let mut total = BigInt::from(first_moment_exact(table, n, k));
    let dmax = n / k as usize;
    for d1 in 1..=dmax {
        for d2 in 1..=dmax {
            let (a, b) = (d1 as i64, d2 as i64);
            let pair = BigInt::from(t_count(&q, ni - ki * (a + b)))
                - BigInt::from(t_count(&q, ni - (ki + 1) * a - ki * b))
                - BigInt::from(t_count(&q, ni - ki * a - (ki + 1) * b))
                + BigInt::from(t_count(&q, ni - (ki + 1) * (a + b)));
            if pair.is_zero() {
                continue;
            }
            let mut coeff = BigInt::from(table.count(d1) * table.count(d2));
            if d1 == d2 {
                coeff -= BigInt::from(table.count(d1).clone());
            }
            total += coeff * pair;
        }
    }
    assert!(!total.is_negative());
    Ok(total.to_biguint().unwrap())
}

/// Exhaustive census over all q^n monic polynomials of degree n: for every
/// multiplicity k (row 0 holds plain omega) the histogram of values, plus
/// running first and second power sums.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CensusTable {
    q: u64,
    n: usize,
    total: u64,
    hist: Vec<Vec<u64>>, // hist[k][v], 0 <= k <= n, 0 <= v <= n
    sum: Vec<u64>,
    sum_sq: Vec<u64>,
}

impl CensusTable {
    pub fn q(&self) -> u64 {
        self.q
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    /// Number of monic f of degree n with omega_k(f) = v (k = 0 reads omega).
    pub fn count(&self, k: u32, v: u64) -> u64 {
        let k = k as usize;
        if k > self.n || v > self.n as u64 {
            return if v == 0 && k > self.n { self.total } else { 0 };
        }
        self.hist[k][v as usize]
    }

    pub fn moment1(&self, k: u32) -> u64 {
        self.sum.get(k as usize).copied().unwrap_or(0)
    }

    pub fn moment2(&self, k: u32) -> u64 {
        self.sum_sq.get(k as usize).copied().unwrap_or(0)
    }
}

struct CensusAcc {
    hist: Vec<Vec<u64>>,
    sum: Vec<u64>,
    sum_sq: Vec<u64>,
}

impl CensusAcc {
    fn new(n: usize) -> Self {
        CensusAcc {
            hist: vec![vec![0u64; n + 1]; n + 1],
            sum: vec![0u64; n + 1],
            sum_sq: vec![0u64; n + 1],
        }
    }

    fn record(&mut self, spec: &Spectrum) {
        let omega: u64 = spec.iter().map(|&(_, c)| c).sum();
        self.hist[0][omega as usize] += 1;
        self.sum[0] += omega;
        self.sum_sq[0] += omega * omega;
        for &(m, c) in spec {
            self.hist[m as usize][c as usize] += 1;
            self.sum[m as usize] += c;
            self.sum_sq[m as usize] += c * c;
        }
    }

    fn merge(mut self, other: CensusAcc) -> CensusAcc {
        for (row, orow) in self.hist.iter_mut().zip(other.hist) {
            for (a, b) in row.iter_mut().zip(orow) {
                *a += b;
            }
        }
        for (a, b) in self.sum.iter_mut().zip(other.sum) {
            *a += b;
        }
        for (a, b) in self.sum_sq.iter_mut().zip(other.sum_sq) {
            *a += b;
        }
        self
    }

    fn finish(mut self, q: u64, n: usize, total: u64) -> CensusTable {
        // rows only saw polynomials with omega_k >= 1; the rest sit at zero
        for k in 1..=n {
            let seen: u64 = self.hist[k][1..].iter().sum();
            self.hist[k][0] = total - seen;
        }
        if n >= 1 {
            let seen: u64 = self.hist[0][1..].iter().sum();
            self.hist[0][0] = total - seen;
        }
        CensusTable { q, n, total, hist: self.hist, sum: self.sum, sum_sq: self.sum_sq }
    }
}

fn census_guard(ctx: &FieldContext, n: usize) -> Result<u64> {
    if n == 0 {
        return Err(domain("census needs degree n >= 1"));
    }
    ctx.q()
        .checked_pow(n as u32)
        .filter(|&t| t <= 1 << 26)
        .ok_or_else(|| {
            capacity(format!(
                "census over q^n = {}^{} monic polynomials exceeds the 2^26 budget",
                ctx.q(),
                n
            ))
        })
}

fn spectrum_of_index(ctx: &FieldContext, n: usize, idx: u64) -> Spectrum {
    if ctx.q() == 2 {
        gf2::spectrum_g2(&gf2::G2::monic_by_index(n, idx))
    } else {
        let f = Poly::monic_by_index(ctx, n, idx);
        crate::factor::spectrum_generic(ctx, &f).expect("monic by construction")
    }
}

/// Census by full enumeration, sequentially.
pub fn brute_census_sequential(ctx: &FieldContext, n: usize) -> Result<CensusTable> {
    let total = census_guard(ctx, n)?;
    let mut acc = CensusAcc::new(n);
    for idx in 0..total {
        acc.record(&spectrum_of_index(ctx, n, idx));
    }
    Ok(acc.finish(ctx.q(), n, total))
}

/// Census by full enumeration; runs on the rayon pool when the `parallel`
/// feature is enabled. The merge is a componentwise sum, so the result is
/// identical whatever the chunking.
#[cfg(feature = "parallel")]
pub fn brute_census(ctx: &FieldContext, n: usize) -> Result<CensusTable> {
    use rayon::prelude::*;
    let total = census_guard(ctx, n)?;
    let acc = (0..total)
        .into_par_iter()
        .fold(
            || CensusAcc::new(n),
            |mut acc, idx| {
                acc.record(&spectrum_of_index(ctx, n, idx));
                acc
            },
        )
        .reduce(|| CensusAcc::new(n), CensusAcc::merge);
    Ok(acc.finish(ctx.q(), n, total))
}

#[cfg(not(feature = "parallel"))]
pub fn brute_census(ctx: &FieldContext, n: usize) -> Result<CensusTable> {
    brute_census_sequential(ctx, n)
}

// Truncated integer power series, coefficient vectors of fixed length n+1.

fn ser_mul(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    let n = a.len();
    let mut out = vec![BigInt::zero(); n];
    for (i, ai) in a.iter().enumerate() {
        if ai.is_zero() {
            continue;
        }
        for (j, bj) in b.iter().take(n - i).enumerate() {
            if !bj.is_zero() {
                out[i + j] += ai * bj;
            }
        }
    }
    out
}

fn ser_pow(base: &[BigInt], exp: &BigUint) -> Vec<BigInt> {
    let n = base.len();
    let mut result = vec![BigInt::zero(); n];
    result[0] = BigInt::one();
    let mut sq = base.to_vec();
    let bits = exp.bits();
    for i in 0..bits {
        if exp.bit(i) {
            result = ser_mul(&result, &sq);
        }
        if i + 1 < bits {
            sq = ser_mul(&sq, &sq);
        }
    }
    result
}

/// Reciprocal of a series with constant term 1.
fn ser_recip(a: &[BigInt]) -> Vec<BigInt> {
    let n = a.len();
    assert!(a[0].is_one());
    let mut out = vec![BigInt::zero(); n];
    out[0] = BigInt::one();
    for i in 1..n {
        let mut acc = BigInt::zero();
        for j in 1..=i {
            if !a[j].is_zero() {
                acc += &a[j] * &out[i - j];
            }
        }
        out[i] = -acc;
    }
    out
}

/// 1 - u^(k d) + u^((k+1) d), truncated.
fn trinomial(n: usize, k: u32, d: usize) -> Vec<BigInt> {
    let mut t = vec![BigInt::zero(); n + 1];
    t[0] = BigInt::one();
    let kd = k as usize * d;
    if kd <= n {
        t[kd] -= 1;
    }
    if kd + d <= n {
        t[kd + d] += 1;
    }
    t
}

/// Number of monic f of degree n with omega_k(f) equal to `value`, for
/// k >= 2 and value 0 or 1, by expanding the Euler product over monic
/// irreducibles with the multiplicity-k term removed (value 0) or singled
/// out (value 1). Runs in polynomial time; no enumeration.
pub fn count_value_census(
    table: &PrimeCountTable,
    n: usize,
    k: u32,
    value: u64,
) -> Result<BigUint> {
    if k < 2 {
        return Err(domain("value census applies to multiplicities k >= 2"));
    }
    if value > 1 {
        return Err(domain("value census covers the values 0 and 1"));
    }
    if n > table.max_degree() {
        return Err(domain("count table is too short for this degree"));
    }
    let q = table.q();
    // base: the full zeta series sum q^m u^m,
    // shaped by one trinomial factor per irreducible degree
    let mut g = Vec::with_capacity(n + 1);
    let mut pw = BigInt::one();
    for _ in 0..=n {
        g.push(pw.clone());
        pw *= q;
    }
    let dmax = n / k as usize;
    for d in 1..=dmax {
        let tri = ser_pow(&trinomial(n, k, d), table.count(d));
        g = ser_mul(&g, &tri);
    }
    let coeff = if value == 0 {
        g[n].clone()
    } else {
        // mark one irreducible as the unique multiplicity-k factor
        let mut marker = vec![BigInt::zero(); n + 1];
        for d in 1..=dmax {
            let mut num = vec![BigInt::zero(); n + 1];
            let kd = k as usize * d;
            num[kd] += 1;
            if kd + d <= n {
                num[kd + d] -= 1;
            }
            let frac = ser_mul(&num, &ser_recip(&trinomial(n, k, d)));
            let pi = BigInt::from(table.count(d).clone());
            for (m, f) in marker.iter_mut().zip(frac) {
                *m += &pi * f;
            }
        }
        ser_mul(&g, &marker)[n].clone()
    };
    assert!(!coeff.is_negative());
    Ok(coeff.to_biguint().unwrap())
}

/// Weight attached to irreducibles by degree when summing over factors of
/// high multiplicity.
#[derive(Clone)]
pub enum Weight {
    Const(BigRational),
    PerDegree(fn(usize) -> BigRational),
}

impl Weight {
    pub fn eval(&self, d: usize) -> BigRational {
        match self {
            Weight::Const(c) => c.clone(),
            Weight::PerDegree(f) => f(d),
        }
    }

    pub fn minus_one() -> Self {
        Weight::Const(-BigRational::one())
    }
}

/// The weighted excess-multiplicity sum of a factored polynomial: for every
/// irreducible factor l with multiplicity m >= k + 1, add
/// 1 + g(deg l) + g(deg l)^2 + ... + g(deg l)^(m - k - 1).
pub fn a_weighted(fac: &Factorization, weight: &Weight, k: u32) -> BigRational {
    let mut total = BigRational::zero();
    for (l, m) in fac.factors() {
        if *m >= k + 1 {
            let g = weight.eval(l.degree().unwrap());
            let mut pw = BigRational::one();
            for _ in 0..(*m - k) {
                total += &pw;
                pw *= &g;
            }
        }
    }
    total
}

/// For g = -1 the telescoping a_{g,1} + a_{g,2} counts exactly the factors
/// of multiplicity >= 2, so omega_1 = omega - a_{g,1} - a_{g,2} holds for
/// every single polynomial. Verifies that identity over all of degree n.
pub fn omega1_decomposition_check(ctx: &FieldContext, n: usize) -> Result<bool> {
    let total = census_guard(ctx, n)?;
    let minus_one = Weight::minus_one();
    for idx in 0..total {
        let f = Poly::monic_by_index(ctx, n, idx);
        let fac = crate::factor::factor(ctx, &f, 0)?;
        let prof = omega_profile(&fac);
        let lhs = BigRational::from(BigInt::from(prof.omega_k(1)));
        let rhs = BigRational::from(BigInt::from(prof.omega()))
            - a_weighted(&fac, &minus_one, 1)
            - a_weighted(&fac, &minus_one, 2);
        if lhs != rhs {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Which power sum a moment row reports.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MomentOrder {
    First,
    Second,
}

/// One row of a moment sweep: the exact power sum, the closed-form main
/// term, and their difference both raw and normalized by the expected error
/// scale.
#[derive(Debug, Clone)]
pub struct MomentRow {
    pub n: usize,
    pub exact: BigUint,
    pub main_term: f64,
    pub residual: f64,
    /// The error scale the residual is divided by.
    pub scale: f64,
    pub normalized_residual: f64,
}

/// exact - main, evaluated in exact rational arithmetic before the final
/// rounding, so enormous near-cancelling values survive.
pub fn residual_from_exact(exact: &BigUint, main: f64) -> f64 {
    let approx = BigRational::from_float(main).expect("finite main term");
    let diff = BigRational::from(BigInt::from(exact.clone())) - approx;
    crate::numeric::fraction_to_f64(diff.numer(), diff.denom())
}

impl MomentRow {
    pub(crate) fn new(n: usize, exact: BigUint, main_term: f64, scale: f64) -> Self {
        let residual = residual_from_exact(&exact, main_term);
        MomentRow { n, exact, main_term, residual, scale, normalized_residual: residual / scale }
    }

    /// For main terms of the form c q^n with rational c: the rounding of c
    /// to f64 alone costs about 2^-53 q^n, which dwarfs the genuine residual
    /// scale n q^(n/k) once n is large, so the subtraction must happen on
    /// the rational side.
    fn with_rational_main(n: usize, exact: BigUint, c: BigRational, q: u64, scale: f64) -> Self {
        let main_rat = c * BigRational::from(BigInt::from(q).pow(n as u32));
        let diff = BigRational::from(BigInt::from(exact.clone())) - &main_rat;
        let residual = crate::numeric::fraction_to_f64(diff.numer(), diff.denom());
        MomentRow {
            n,
            exact,
            main_term: crate::numeric::rational_to_f64(&main_rat),
            residual,
            scale,
            normalized_residual: residual / scale,
        }
    }
}

/// Exact moment with its asymptotic main term and normalized residual; the
/// constants bundle supplies the q-dependent coefficients.
pub fn moment_row(
    table: &PrimeCountTable,
    consts: &crate::constants::Constants,
    n: usize,
    k: u32,
    order: MomentOrder,
) -> Result<MomentRow> {
    assert_eq!(table.q(), consts.q());
    let q = table.q() as f64;
    let qn = q.powi(n as i32);
    let ln_n = (n as f64).ln();
    let nf = n as f64;
    match order {
        MomentOrder::First => {
            let exact = first_moment_exact(table, n, k);
            if k == 0 {
                let main = qn * (ln_n + consts.a1().value);
                Ok(MomentRow::new(n, exact, main, qn / nf))
            } else if k == 1 {
                let main = qn * (ln_n + consts.a1().value - consts.l_value(2).value);
                Ok(MomentRow::new(n, exact, main, qn / nf))
            } else {
                let c = consts.l_value(k).exact.unwrap() - consts.l_value(k + 1).exact.unwrap();
                let scale = nf * q.powf(nf / k as f64);
                Ok(MomentRow::with_rational_main(n, exact, c, table.q(), scale))
            }
        }
        MomentOrder::Second => {
            let exact = second_moment_exact(table, n, k)?;
            if k == 1 {
                let main = qn * (ln_n * ln_n + consts.c2().value * ln_n + consts.c3().value);
                Ok(MomentRow::new(n, exact, main, qn * ln_n / nf))
            } else {
                let c = consts.ck_prime(k).exact.unwrap();
                let scale = nf * q.powf(nf / k as f64);
                Ok(MomentRow::with_rational_main(n, exact, c, table.q(), scale))
            }
        }
    }
}
