//! Built-in consistency checks: every major computation is recomputed by an
//! independent route and compared. One line per check; the first failing
//! check is named on stderr and the process exits with code 5.

use crate::FaultArg;
use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use omegak_core::constants::{harmonic_identity_holds, Constants};
use omegak_core::dist::{self, Mode, Statistic};
use omegak_core::factor::{factor, is_irreducible};
use omegak_core::field::FieldContext;
use omegak_core::poly::Poly;
use omegak_core::prime_count::{mertens_exact, pi_exact, PrimeCountTable};
use omegak_core::series::{a_series, a_series_brute};
use omegak_core::stats::{
    brute_census, brute_census_sequential, count_value_census, first_moment_exact,
    omega1_decomposition_check, second_moment_exact, Weight,
};

fn field_axioms() -> bool {
    for (p, e) in [(2u64, 1u32), (3, 1), (5, 1), (2, 2), (3, 2)] {
        let ctx = match FieldContext::new(p, e) {
            Ok(c) => c,
            Err(_) => return false,
        };
        let els: Vec<_> = ctx.elements().collect();
        for &a in &els {
            if ctx.add(a, ctx.zero()) != a || ctx.mul(a, ctx.one()) != a {
                return false;
            }
            if ctx.add(a, ctx.neg(a)) != ctx.zero() {
                return false;
            }
            if a != ctx.zero() {
                match ctx.inv(a) {
                    Ok(ai) => {
                        if ctx.mul(a, ai) != ctx.one() {
                            return false;
                        }
                    }
                    Err(_) => return false,
                }
            }
            for &b in &els {
                if ctx.add(a, b) != ctx.add(b, a) || ctx.mul(a, b) != ctx.mul(b, a) {
                    return false;
                }
                for &c in &els {
                    if ctx.mul(a, ctx.add(b, c)) != ctx.add(ctx.mul(a, b), ctx.mul(a, c)) {
                        return false;
                    }
                    if ctx.mul(ctx.mul(a, b), c) != ctx.mul(a, ctx.mul(b, c)) {
                        return false;
                    }
                }
            }
        }
    }
    true
}

fn factor_roundtrip() -> bool {
    for (p, maxd) in [(2u64, 7usize), (3, 4)] {
        let ctx = FieldContext::new(p, 1).unwrap();
        for d in 1..=maxd {
            for idx in 0..p.pow(d as u32) {
                let f = Poly::monic_by_index(&ctx, d, idx);
                let fac = match factor(&ctx, &f, 1) {
                    Ok(fac) => fac,
                    Err(_) => return false,
                };
                if fac.product(&ctx) != f {
                    return false;
                }
                for (g, m) in fac.factors() {
                    if *m < 1 || !is_irreducible(&ctx, g).unwrap_or(false) {
                        return false;
                    }
                }
            }
        }
    }
    true
}

fn irreducible_count() -> bool {
    for (p, maxd) in [(2u64, 7usize), (3, 4)] {
        let ctx = FieldContext::new(p, 1).unwrap();
        for d in 1..=maxd {
            let mut count = 0u64;
            for idx in 0..p.pow(d as u32) {
                let f = Poly::monic_by_index(&ctx, d, idx);
                if is_irreducible(&ctx, &f).unwrap() {
                    count += 1;
                }
            }
            if BigUint::from(count) != pi_exact(p, d) {
                return false;
            }
        }
    }
    true
}

fn gauss_identity(fault: Option<FaultArg>) -> bool {
    let mut t2 = PrimeCountTable::new(2, 40);
    if matches!(fault, Some(FaultArg::PiTable)) {
        t2.corrupt_for_testing();
    }
    t2.gauss_identity_holds() && PrimeCountTable::new(3, 30).gauss_identity_holds()
}

fn moments_brute() -> bool {
    let ctx = FieldContext::new(2, 1).unwrap();
    let table = PrimeCountTable::new(2, 9);
    for n in 1..=9usize {
        let census = match brute_census_sequential(&ctx, n) {
            Ok(c) => c,
            Err(_) => return false,
        };
        for k in 0..=3u32 {
            if first_moment_exact(&table, n, k) != BigUint::from(census.moment1(k)) {
                return false;
            }
            if k >= 1
                && second_moment_exact(&table, n, k).unwrap() != BigUint::from(census.moment2(k))
            {
                return false;
            }
        }
    }
    true
}

fn census_series_vs_brute() -> bool {
    let ctx = FieldContext::new(2, 1).unwrap();
    let table = PrimeCountTable::new(2, 9);
    for n in 2..=9usize {
        let census = brute_census_sequential(&ctx, n).unwrap();
        for k in 2..=3u32 {
            for value in 0..=1u64 {
                let fast = match count_value_census(&table, n, k, value) {
                    Ok(c) => c,
                    Err(_) => return false,
                };
                if fast != BigUint::from(census.count(k, value)) {
                    return false;
                }
            }
        }
    }
    true
}

fn a_series_vs_brute() -> bool {
    let ctx = FieldContext::new(2, 1).unwrap();
    let table = PrimeCountTable::new(2, 8);
    for k in 1..=2u32 {
        for w in [
            Weight::minus_one(),
            Weight::Const(BigRational::new(BigInt::from(1), BigInt::from(2))),
        ] {
            let fast = a_series(&table, &w, k, 8);
            let brute = match a_series_brute(&ctx, &w, k, 8) {
                Ok(b) => b,
                Err(_) => return false,
            };
            if fast != brute {
                return false;
            }
        }
    }
    true
}

fn omega1_decomposition() -> bool {
    let ctx2 = FieldContext::new(2, 1).unwrap();
    let ctx3 = FieldContext::new(3, 1).unwrap();
    (1..=8).all(|n| omega1_decomposition_check(&ctx2, n).unwrap_or(false))
        && (1..=5).all(|n| omega1_decomposition_check(&ctx3, n).unwrap_or(false))
}

fn constants_identities() -> bool {
    for q in [2u64, 3] {
        let c = Constants::with_terms(q, 40);
        let w = Weight::minus_one();
        let lhs = c.c_weighted(&w, 1).exact.unwrap() + c.c_weighted(&w, 2).exact.unwrap();
        if lhs != c.l_value(2).exact.unwrap() {
            return false;
        }
        for k in 2..=3u32 {
            let lhs =
                c.c_weighted(&w, k - 1).exact.unwrap() - c.c_weighted(&w, k + 1).exact.unwrap();
            let rhs = c.l_value(k).exact.unwrap() - c.l_value(k + 1).exact.unwrap();
            if lhs != rhs {
                return false;
            }
        }
    }
    true
}

fn mertens_consistency() -> bool {
    // the drift of the partial sums against ln n lands on a1 within O(1/n)
    let consts = Constants::new(2);
    let a1 = consts.a1().value;
    let table = PrimeCountTable::new(2, 100);
    let sum = omegak_core::numeric::rational_to_f64(&mertens_exact(&table, 100));
    (sum - (100f64).ln() - a1).abs() < 6e-3
}

fn phi_cdf_check() -> bool {
    if (dist::phi_cdf(0.0) - 0.5).abs() > 1e-15 {
        return false;
    }
    if (dist::phi_cdf(1.9599639845400545) - 0.975).abs() > 1e-9 {
        return false;
    }
    if (dist::phi_cdf(1.0) - 0.8413447460685429).abs() > 1e-12 {
        return false;
    }
    let mut prev = 0.0;
    for i in -70..=70 {
        let t = i as f64 / 10.0;
        let v = dist::phi_cdf(t);
        if (v + dist::phi_cdf(-t) - 1.0).abs() > 1e-15 || v < prev {
            return false;
        }
        prev = v;
    }
    true
}

fn harmonic_identity() -> bool {
    [10usize, 137, 1000].iter().all(|&n| harmonic_identity_holds(n))
}

fn variance_consistency() -> bool {
    let ctx = FieldContext::new(2, 1).unwrap();
    let table = PrimeCountTable::new(2, 10);
    let consts = Constants::new(2);
    let n = 10usize;
    let row = match dist::variance_report(&table, &consts, n) {
        Ok(r) => r,
        Err(_) => return false,
    };
    let census = brute_census_sequential(&ctx, n).unwrap();
    let ln_n = (n as f64).ln();
    let direct: f64 = (0..=n as u64)
        .map(|v| census.count(1, v) as f64 * (v as f64 - ln_n).powi(2))
        .sum();
    (row.sum - direct).abs() <= 1e-9 * direct.abs()
}

fn parallel_consistency() -> bool {
    let ctx = FieldContext::new(2, 1).unwrap();
    let a = brute_census(&ctx, 12).unwrap();
    let b = brute_census_sequential(&ctx, 12).unwrap();
    if a != b {
        return false;
    }
    let mode = Mode::Sample { count: 500, seed: 9 };
    let p = dist::empirical_cdf(&ctx, 32, Statistic::Omega1, mode).unwrap();
    let s = dist::empirical_cdf_sequential(&ctx, 32, Statistic::Omega1, mode).unwrap();
    p == s
}

pub(crate) fn run(fault: Option<FaultArg>) -> i32 {
    let mut first_fail: Option<&'static str> = None;
    let mut check = |name: &'static str, ok: bool| {
        if ok {
            println!("ok {name}");
        } else {
            println!("FAIL {name}");
            if first_fail.is_none() {
                first_fail = Some(name);
            }
        }
    };
    check("field-axioms", field_axioms());
    check("factor-roundtrip", factor_roundtrip());
    check("irreducible-count", irreducible_count());
    check("gauss-identity", gauss_identity(fault));
    check("moments-brute", moments_brute());
    check("census-series-vs-brute", census_series_vs_brute());
    check("a-series-vs-brute", a_series_vs_brute());
    check("omega1-decomposition", omega1_decomposition());
    check("constants-identities", constants_identities());
    check("mertens-consistency", mertens_consistency());
    check("phi-cdf", phi_cdf_check());
    check("harmonic-identity", harmonic_identity());
    check("variance-consistency", variance_consistency());
    check("parallel-consistency", parallel_consistency());
    match first_fail {
        Some(name) => {
            eprintln!("first failure: {name}");
            5
        }
        None => 0,
    }
}
