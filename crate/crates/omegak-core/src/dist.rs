//! Distributional behaviour of the factor-count statistics: the standard
//! normal CDF, empirical distribution functions of the standardized counts
//! (by full enumeration or by seeded sampling), Kolmogorov-Smirnov
//! distances, the count of polynomials violating the normal order, and the
//! exact centered second moment.
//!
//! Both statistics take at most n + 1 integer values at degree n, so an
//! empirical CDF is stored as a short list of (point, weight) atoms rather
//! than raw samples; full enumeration over 2^26 polynomials produces a few
//! dozen atoms. Sampling keys the RNG on the base seed and selects one
//! cipher stream per sample index, so results are identical however the
//! work is chunked and distinct seeds share no samples.

use crate::constants::Constants;
use crate::error::{capacity, domain, Result};
use crate::factor::Spectrum;
use crate::field::FieldContext;
use crate::gf2;
use crate::numeric::biguint_to_f64;
use crate::poly::Poly;
use crate::prime_count::PrimeCountTable;
use crate::stats::{first_moment_exact, second_moment_exact};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Standard normal CDF. Power series around zero up to |t| = 6, asymptotic
/// tail expansion beyond; symmetric by construction.
pub fn phi_cdf(t: f64) -> f64 {
    if t < 0.0 {
        return 1.0 - phi_cdf(-t);
    }
    let pdf = (-0.5 * t * t).exp() / (2.0 * std::f64::consts::PI).sqrt();
    if t <= 6.0 {
        // Phi(t) = 1/2 + pdf(t) * sum_k t^(2k+1) / (1 * 3 * ... * (2k+1)),
        // every summand positive, no cancellation
        let mut term = t;
        let mut sum = t;
        let mut k = 1u32;
        loop {
            term *= t * t / (2 * k + 1) as f64;
            let next = sum + term;
            if next == sum || k > 400 {
                break;
            }
            sum = next;
            k += 1;
        }
        0.5 + pdf * sum
    } else {
        // upper tail: Q(t) = pdf(t)/t * (1 - 1/t^2 + 3/t^4 - 15/t^6 + ...),
        // truncated before the smallest term
        let mut sum = 1.0;
        let mut term = 1.0;
        let mut k = 1i32;
        loop {
            let next = term * (-(2.0 * k as f64 - 1.0)) / (t * t);
            if next.abs() >= term.abs() || k > 60 {
                break;
            }
            term = next;
            sum += term;
            k += 1;
        }
        1.0 - pdf / t * sum
    }
}

/// Which per-polynomial count is standardized.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Statistic {
    /// Distinct irreducible factors, any multiplicity.
    Omega,
    /// Distinct irreducible factors of multiplicity exactly one.
    Omega1,
}

impl Statistic {
    fn of(self, spec: &Spectrum) -> u64 {
        match self {
            Statistic::Omega => spec.iter().map(|&(_, c)| c).sum(),
            Statistic::Omega1 => spec
                .iter()
                .find(|&&(m, _)| m == 1)
                .map(|&(_, c)| c)
                .unwrap_or(0),
        }
    }
}

/// How the population is traversed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    /// Every monic polynomial of the degree, exactly.
    Full,
    /// `count` polynomials drawn uniformly, one RNG stream per index.
    Sample { count: u64, seed: u64 },
}

/// Empirical distribution of a standardized statistic, stored as sorted
/// (value, weight) atoms.
#[derive(Debug, Clone, PartialEq)]
pub struct EmpiricalCdf {
    points: Vec<(f64, u64)>,
    total: u64,
}

impl EmpiricalCdf {
    fn from_atoms(mut points: Vec<(f64, u64)>) -> Self {
        points.sort_by(|a, b| a.0.total_cmp(&b.0));
        points.dedup_by(|hi, lo| {
            if hi.0 == lo.0 {
                lo.1 += hi.1;
                true
            } else {
                false
            }
        });
        let total = points.iter().map(|&(_, w)| w).sum();
        EmpiricalCdf { points, total }
    }

    pub fn points(&self) -> &[(f64, u64)] {
        &self.points
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    /// Kolmogorov-Smirnov distance to the standard normal, evaluating both
    /// sides of every jump.
    pub fn ks_distance(&self) -> f64 {
        let mut cum = 0u64;
        let mut worst = 0.0f64;
        for &(x, w) in &self.points {
            let phi = phi_cdf(x);
            let lo = cum as f64 / self.total as f64;
            cum += w;
            let hi = cum as f64 / self.total as f64;
            worst = worst.max(phi - lo).max(hi - phi);
        }
        worst
    }

    /// |F(a) - Phi(a)| at one point, F right-continuous.
    pub fn discrepancy_at(&self, a: f64) -> f64 {
        let mut cum = 0u64;
        for &(x, w) in &self.points {
            if x <= a {
                cum += w;
            } else {
                break;
            }
        }
        (cum as f64 / self.total as f64 - phi_cdf(a)).abs()
    }
}

fn standardize(stat: u64, degree: usize) -> f64 {
    let ln_n = (degree as f64).ln();
    (stat as f64 - ln_n) / ln_n.sqrt()
}

fn full_budget(q: u64, lo: usize, hi: usize) -> Result<u64> {
    let mut total = 0u64;
    for m in lo..=hi {
        total = q
            .checked_pow(m as u32)
            .and_then(|s| s.checked_add(total))
            .filter(|&t| t <= 1 << 26)
            .ok_or_else(|| {
                capacity(format!(
                    "full enumeration over degrees {lo}..={hi} at q = {q} exceeds the 2^26 budget"
                ))
            })?;
    }
    Ok(total)
}

fn spectrum_of_index(ctx: &FieldContext, n: usize, idx: u64) -> Spectrum {
    if ctx.q() == 2 {
        gf2::spectrum_g2(&gf2::G2::monic_by_index(n, idx))
    } else {
        let f = Poly::monic_by_index(ctx, n, idx);
        crate::factor::spectrum_generic(ctx, &f).expect("monic by construction")
    }
}

fn random_spectrum(ctx: &FieldContext, n: usize, rng: &mut ChaCha8Rng) -> Spectrum {
    if ctx.q() == 2 {
        gf2::spectrum_g2(&gf2::G2::random_monic(n, rng))
    } else {
        let q = ctx.q();
        let coeffs = (0..n).map(|_| ctx.el(rng.gen_range(0..q))).collect();
        let mut f = Poly::from_elements(coeffs);
        f = f.add(ctx, &Poly::monic_by_index(ctx, n, 0));
        crate::factor::spectrum_generic(ctx, &f).expect("monic by construction")
    }
}

/// Histogram of a statistic's raw values at one degree; index = value.
fn value_histogram(
    ctx: &FieldContext,
    n: usize,
    stat: Statistic,
    mode: Mode,
    parallel: bool,
) -> Result<Vec<u64>> {
    if n < 2 {
        return Err(domain("distribution statistics need degree n >= 2"));
    }
    let merge = |mut a: Vec<u64>, b: Vec<u64>| {
        for (x, y) in a.iter_mut().zip(b) {
            *x += y;
        }
        a
    };
    match mode {
        Mode::Full => {
            let total = full_budget(ctx.q(), n, n)?;
            let body = |idx: u64, hist: &mut Vec<u64>| {
                let v = stat.of(&spectrum_of_index(ctx, n, idx));
                hist[v as usize] += 1;
            };
            run_indexed(total, n + 1, parallel, merge, body)
        }
        Mode::Sample { count, seed } => {
            if count == 0 {
                return Err(domain("sample count must be positive"));
            }
            let body = |i: u64, hist: &mut Vec<u64>| {
                // one ChaCha stream per sample index: adding the index to the
                // seed instead would make adjacent base seeds share almost all
                // of their samples
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                rng.set_stream(i);
                let v = stat.of(&random_spectrum(ctx, n, &mut rng));
                hist[v as usize] += 1;
            };
            run_indexed(count, n + 1, parallel, merge, body)
        }
    }
}

#[cfg(feature = "parallel")]
fn run_indexed<B, M>(
    count: u64,
    hist_len: usize,
    parallel: bool,
    merge: M,
    body: B,
) -> Result<Vec<u64>>
where
    B: Fn(u64, &mut Vec<u64>) + Sync,
    M: Fn(Vec<u64>, Vec<u64>) -> Vec<u64> + Sync + Send,
{
    if !parallel {
        let mut hist = vec![0u64; hist_len];
        for i in 0..count {
            body(i, &mut hist);
        }
        return Ok(hist);
    }
    use rayon::prelude::*;
    Ok((0..count)
        .into_par_iter()
        .fold(
            || vec![0u64; hist_len],
            |mut hist, i| {
                body(i, &mut hist);
                hist
            },
        )
        .reduce(|| vec![0u64; hist_len], merge))
}

#[cfg(not(feature = "parallel"))]
fn run_indexed<B, M>(
    count: u64,
    hist_len: usize,
    _parallel: bool,
    _merge: M,
    body: B,
) -> Result<Vec<u64>>
where
    B: Fn(u64, &mut Vec<u64>) + Sync,
    M: Fn(Vec<u64>, Vec<u64>) -> Vec<u64> + Sync + Send,
{
    let mut hist = vec![0u64; hist_len];
    for i in 0..count {
        body(i, &mut hist);
    }
    Ok(hist)
}

fn cdf_single(ctx: &FieldContext, n: usize, stat: Statistic, mode: Mode, parallel: bool) -> Result<EmpiricalCdf> {
    let hist = value_histogram(ctx, n, stat, mode, parallel)?;
    let atoms = hist
        .into_iter()
        .enumerate()
        .filter(|&(_, w)| w > 0)
        .map(|(v, w)| (standardize(v as u64, n), w))
        .collect();
    Ok(EmpiricalCdf::from_atoms(atoms))
}

/// Empirical CDF of the standardized statistic at degree n.
pub fn empirical_cdf(ctx: &FieldContext, n: usize, stat: Statistic, mode: Mode) -> Result<EmpiricalCdf> {
    cdf_single(ctx, n, stat, mode, true)
}

pub fn empirical_cdf_sequential(
    ctx: &FieldContext,
    n: usize,
    stat: Statistic,
    mode: Mode,
) -> Result<EmpiricalCdf> {
    cdf_single(ctx, n, stat, mode, false)
}

/// Degree m on 2..=n with probability proportional to q^m.
fn sample_degree(q: u64, n: usize, rng: &mut ChaCha8Rng) -> usize {
    for m in (3..=n).rev() {
        // P(m | degree <= m) = (1 - 1/q) / (1 - q^(1-m))
        let p = (1.0 - 1.0 / q as f64) / (1.0 - (q as f64).powi(1 - m as i32));
        if rng.gen::<f64>() < p {
            return m;
        }
    }
    2
}

/// Empirical CDF pooled over all degrees 2..=n, each degree m carrying
/// weight q^m (full mode realizes the weights by enumeration; sample mode
/// draws the degree first with matching probabilities). Standardization
/// uses each polynomial's own degree.
pub fn empirical_cdf_aggregate(
    ctx: &FieldContext,
    n: usize,
    stat: Statistic,
    mode: Mode,
) -> Result<EmpiricalCdf> {
    if n < 2 {
        return Err(domain("aggregate distribution needs n >= 2"));
    }
    match mode {
        Mode::Full => {
            full_budget(ctx.q(), 2, n)?;
            let mut atoms = Vec::new();
            for m in 2..=n {
                let hist = value_histogram(ctx, m, stat, Mode::Full, true)?;
                atoms.extend(
                    hist.into_iter()
                        .enumerate()
                        .filter(|&(_, w)| w > 0)
                        .map(|(v, w)| (standardize(v as u64, m), w)),
                );
            }
            Ok(EmpiricalCdf::from_atoms(atoms))
        }
        Mode::Sample { count, seed } => {
            if count == 0 {
                return Err(domain("sample count must be positive"));
            }
            let merge = |mut a: Vec<u64>, b: Vec<u64>| {
                for (x, y) in a.iter_mut().zip(b) {
                    *x += y;
                }
                a
            };
            // flat histogram over (degree, value): index = degree * (n+1) + value
            let body = |i: u64, hist: &mut Vec<u64>| {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                rng.set_stream(i);
                let m = sample_degree(ctx.q(), n, &mut rng);
                let v = stat.of(&random_spectrum(ctx, m, &mut rng));
                hist[m * (n + 1) + v as usize] += 1;
            };
            let hist = run_indexed(count, (n + 1) * (n + 1), true, merge, body)?;
            let atoms = hist
                .into_iter()
                .enumerate()
                .filter(|&(_, w)| w > 0)
                .map(|(i, w)| (standardize((i % (n + 1)) as u64, i / (n + 1)), w))
                .collect();
            Ok(EmpiricalCdf::from_atoms(atoms))
        }
    }
}

/// How often the statistic strays at least (ln n)^(1/2 + epsilon) from ln n.
#[derive(Debug, Clone)]
pub struct NormalOrderRow {
    pub n: usize,
    pub total: u64,
    pub exceptional: u64,
    pub fraction: f64,
    pub threshold: f64,
}

pub fn normal_order_report(
    ctx: &FieldContext,
    n: usize,
    stat: Statistic,
    mode: Mode,
    epsilon: f64,
) -> Result<NormalOrderRow> {
    if !(epsilon > 0.0 && epsilon < 0.5) {
        return Err(domain("epsilon must lie in (0, 1/2)"));
    }
    let hist = value_histogram(ctx, n, stat, mode, true)?;
    let ln_n = (n as f64).ln();
    let threshold = ln_n.powf(0.5 + epsilon);
    let mut total = 0u64;
    let mut exceptional = 0u64;
    for (v, w) in hist.into_iter().enumerate() {
        total += w;
        if (v as f64 - ln_n).abs() >= threshold {
            exceptional += w;
        }
    }
    Ok(NormalOrderRow {
        n,
        total,
        exceptional,
        fraction: exceptional as f64 / total as f64,
        threshold,
    })
}

/// Exact centered sum: sum over monic f of degree n of
/// (omega_1(f) - ln n)^2, against its main term q^n (ln n + c3).
#[derive(Debug, Clone)]
pub struct VarianceRow {
    pub n: usize,
    pub sum: f64,
    pub main_term: f64,
    pub residual: f64,
    pub normalized_residual: f64,
}

pub fn variance_report(table: &PrimeCountTable, consts: &Constants, n: usize) -> Result<VarianceRow> {
    assert_eq!(table.q(), consts.q());
    let s1 = first_moment_exact(table, n, 1);
    let s2 = second_moment_exact(table, n, 1)?;
    let q = table.q() as f64;
    let qn = q.powi(n as i32);
    let ln_n = (n as f64).ln();
    // the cross and square terms carry ln n, so assemble in f64 from the
    // correctly rounded exact moments
    let sum = biguint_to_f64(&s2) - 2.0 * ln_n * biguint_to_f64(&s1) + qn * ln_n * ln_n;
    let main_term = qn * (ln_n + consts.c3().value);
    let residual = sum - main_term;
    Ok(VarianceRow {
        n,
        sum,
        main_term,
        residual,
        normalized_residual: residual / (qn * ln_n / n as f64),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stats::brute_census_sequential;

    #[test]
    fn phi_spot_values() {
        assert_eq!(phi_cdf(0.0), 0.5);
        assert!((phi_cdf(1.9599639845400545) - 0.975).abs() < 1e-9);
        assert!((phi_cdf(1.0) - 0.8413447460685429).abs() < 1e-12);
        assert!((phi_cdf(-1.0) - (1.0 - 0.8413447460685429)).abs() < 1e-12);
        assert!((phi_cdf(3.0) - 0.9986501019683699).abs() < 1e-12);
        // far tail against a published value of Q(7); recovering the tail
        // through 1 - Phi costs ~1e-16 absolute, so ~1e-4 relative here
        let q7 = 1.0 - phi_cdf(7.0);
        assert!((q7 / 1.279812543885835e-12 - 1.0).abs() < 2e-4);
        // symmetry and monotonicity on a grid
        let mut prev = 0.0;
        for i in -80..=80 {
            let t = i as f64 / 10.0;
            let v = phi_cdf(t);
            assert!((v + phi_cdf(-t) - 1.0).abs() < 1e-15);
            assert!(v >= prev);
            prev = v;
        }
    }

    #[test]
    fn full_mode_matches_census() {
        let ctx = FieldContext::new(2, 1).unwrap();
        let n = 8;
        let census = brute_census_sequential(&ctx, n).unwrap();
        let cdf = empirical_cdf(&ctx, n, Statistic::Omega1, Mode::Full).unwrap();
        assert_eq!(cdf.total(), census.total());
        for &(x, w) in cdf.points() {
            let ln_n = (n as f64).ln();
            let v = (x * ln_n.sqrt() + ln_n).round() as u64;
            assert_eq!(w, census.count(1, v), "atom at value {v}");
        }
    }

    #[test]
    fn parallel_and_sequential_agree() {
        let ctx = FieldContext::new(3, 1).unwrap();
        for mode in [Mode::Full, Mode::Sample { count: 500, seed: 42 }] {
            let a = empirical_cdf(&ctx, 7, Statistic::Omega, mode).unwrap();
            let b = empirical_cdf_sequential(&ctx, 7, Statistic::Omega, mode).unwrap();
            assert_eq!(a, b);
        }
    }

    #[test]
    fn sampling_is_reproducible_and_seed_sensitive() {
        let ctx = FieldContext::new(2, 1).unwrap();
        let mode = Mode::Sample { count: 2000, seed: 7 };
        let a = empirical_cdf(&ctx, 64, Statistic::Omega1, mode).unwrap();
        let b = empirical_cdf(&ctx, 64, Statistic::Omega1, mode).unwrap();
        assert_eq!(a, b);
        let c = empirical_cdf(&ctx, 64, Statistic::Omega1, Mode::Sample { count: 2000, seed: 8 })
            .unwrap();
        assert_ne!(a, c);
        assert_eq!(a.total(), 2000);
    }

    #[test]
    fn ks_distance_hand_case() {
        // single atom at 0 with weight 1: F jumps 0 -> 1 at 0, Phi(0) = 0.5
        let cdf = EmpiricalCdf::from_atoms(vec![(0.0, 1)]);
        assert!((cdf.ks_distance() - 0.5).abs() < 1e-15);
        // two atoms at +-1: worst gap is Phi(-1) below, mirrored above
        let cdf = EmpiricalCdf::from_atoms(vec![(-1.0, 1), (1.0, 1)]);
        let expect = 0.5 - phi_cdf(-1.0);
        assert!((cdf.ks_distance() - expect).abs() < 1e-15);
    }

    #[test]
    fn ks_is_moderate_at_degree_64() {
        let ctx = FieldContext::new(2, 1).unwrap();
        let cdf = empirical_cdf(
            &ctx,
            64,
            Statistic::Omega1,
            Mode::Sample { count: 4000, seed: 1 },
        )
        .unwrap();
        let ks = cdf.ks_distance();
        assert!(ks > 0.02 && ks < 0.45, "ks = {ks}");
    }

    #[test]
    fn aggregate_pools_expected_weight() {
        let ctx = FieldContext::new(2, 1).unwrap();
        let cdf = empirical_cdf_aggregate(&ctx, 6, Statistic::Omega, Mode::Full).unwrap();
        // 2^2 + ... + 2^6 = 124
        assert_eq!(cdf.total(), 124);
        let sampled = empirical_cdf_aggregate(
            &ctx,
            6,
            Statistic::Omega,
            Mode::Sample { count: 3000, seed: 3 },
        )
        .unwrap();
        assert_eq!(sampled.total(), 3000);
    }

    #[test]
    fn sampled_degrees_follow_geometric_weights() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let n = 10;
        let mut counts = vec![0u64; n + 1];
        for _ in 0..40_000 {
            counts[sample_degree(2, n, &mut rng)] += 1;
        }
        // P(degree = n) = 2^n / (2^(n+1) - 4) is just over 1/2
        let top = counts[n] as f64 / 40_000.0;
        assert!((top - 0.502).abs() < 0.015, "top fraction {top}");
        let ratio = counts[n] as f64 / counts[n - 1] as f64;
        assert!((ratio - 2.0).abs() < 0.2, "ratio {ratio}");
    }

    #[test]
    fn normal_order_matches_census() {
        let ctx = FieldContext::new(2, 1).unwrap();
        let n = 10;
        let eps = 0.1;
        let row =
            normal_order_report(&ctx, n, Statistic::Omega1, Mode::Full, eps).unwrap();
        let census = brute_census_sequential(&ctx, n).unwrap();
        let ln_n = (n as f64).ln();
        let threshold = ln_n.powf(0.5 + eps);
        let mut expect = 0u64;
        for v in 0..=n as u64 {
            if (v as f64 - ln_n).abs() >= threshold {
                expect += census.count(1, v);
            }
        }
        assert_eq!(row.exceptional, expect);
        assert_eq!(row.total, 1024);
        assert!(row.fraction < 0.5);
    }

    #[test]
    fn variance_row_matches_census() {
        let ctx = FieldContext::new(2, 1).unwrap();
        let table = PrimeCountTable::new(2, 11);
        let consts = Constants::new(2);
        for n in [8usize, 11] {
            let row = variance_report(&table, &consts, n).unwrap();
            let census = brute_census_sequential(&ctx, n).unwrap();
            let ln_n = (n as f64).ln();
            let direct: f64 = (0..=n as u64)
                .map(|v| census.count(1, v) as f64 * (v as f64 - ln_n).powi(2))
                .sum();
            assert!(
                (row.sum - direct).abs() <= 1e-9 * direct.abs(),
                "n={n}: {} vs {direct}",
                row.sum
            );
        }
    }

    #[test]
    fn domain_guards() {
        let ctx = FieldContext::new(2, 1).unwrap();
        assert!(empirical_cdf(&ctx, 1, Statistic::Omega, Mode::Full).is_err());
        assert!(
            empirical_cdf(&ctx, 8, Statistic::Omega, Mode::Sample { count: 0, seed: 0 }).is_err()
        );
        assert!(
            normal_order_report(&ctx, 8, Statistic::Omega, Mode::Full, 0.7).is_err()
        );
        let big = FieldContext::new(2, 1).unwrap();
        assert!(empirical_cdf(&big, 30, Statistic::Omega, Mode::Full).is_err());
    }
}
