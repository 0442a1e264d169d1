//! Command-line front end: exact tables, asymptotic comparisons, and
//! distributional experiments for the fixed-multiplicity factor-count
//! statistics over F_q[t]. Tabular subcommands write CSV with a header row
//! to stdout; `constants` writes JSON. Exit codes: 0 success, 2 usage,
//! 3 capacity exceeded, 4 domain error, 5 self-test or validation failure.

mod selftest;

use clap::{Parser, Subcommand, ValueEnum};
use num_bigint::BigInt;
use num_rational::BigRational;
use omegak_core::constants::Constants;
use omegak_core::dist::{self, Mode, Statistic};
use omegak_core::error::Error;
use omegak_core::factor;
use omegak_core::field::FieldContext;
use omegak_core::numeric::{fraction_to_f64, rational_to_f64};
use omegak_core::poly::Poly;
use omegak_core::prime_count::{mertens_exact, pi_exact, PrimeCountTable};
use omegak_core::series;
use omegak_core::stats::{self, MomentOrder, Weight};
use std::str::FromStr;

#[derive(Parser)]
#[command(
    name = "omegak",
    version,
    about = "statistics of fixed-multiplicity irreducible factor counts in F_q[t]",
    after_help = "Exit codes: 0 success, 2 usage, 3 capacity exceeded, \
                  4 domain error, 5 self-test or comparison failure."
)]
struct Cli {
    /// Worker threads for data-parallel paths (default: all cores, or OMEGAK_THREADS)
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum StatArg {
    Omega,
    Omega1,
}

impl From<StatArg> for Statistic {
    fn from(s: StatArg) -> Statistic {
        match s {
            StatArg::Omega => Statistic::Omega,
            StatArg::Omega1 => Statistic::Omega1,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    Exact,
    Brute,
    Asymptotic,
}

#[derive(Clone, Copy, ValueEnum)]
pub(crate) enum FaultArg {
    /// Corrupt the irreducible-count table before the consistency checks.
    PiTable,
}

#[derive(Subcommand)]
enum Command {
    /// Describe the coefficient field for a given q = p or p^e.
    Field {
        #[arg(long, default_value = "2")]
        q: String,
    },
    /// Factor a monic polynomial into irreducibles (CSV: irreducible,multiplicity).
    Factor {
        #[arg(long, default_value = "2")]
        q: String,
        /// Comma-separated coefficients, constant term first, e.g. "0,1,1".
        #[arg(long)]
        poly: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Count monic irreducibles per degree (CSV: degree,count).
    Pi {
        #[arg(long, default_value = "2")]
        q: String,
        #[arg(long)]
        max_degree: usize,
    },
    /// Partial sums of pi(d) q^(-d) against ln n, for each n up to the
    /// given one (CSV: n,sum,residual).
    Mertens {
        #[arg(long, default_value = "2")]
        q: String,
        #[arg(long)]
        n: usize,
    },
    /// Exact moment sweeps against their main terms
    /// (CSV: n,exact,main_term,residual,normalized_residual).
    Moments {
        #[arg(long, default_value = "2")]
        q: String,
        /// Multiplicity under study; 0 means the plain distinct-factor count.
        #[arg(long)]
        k: u32,
        /// 1 for the first moment, 2 for the second.
        #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u8).range(1..=2))]
        order: u8,
        /// Degree sweep, inclusive, as A:B.
        #[arg(long)]
        n_range: String,
        /// exact: closed form; brute: full enumeration; asymptotic: main term only.
        #[arg(long, value_enum, default_value_t = MethodArg::Exact)]
        method: MethodArg,
        #[arg(long)]
        terms: Option<usize>,
        #[arg(long, default_value = "csv", value_parser = ["csv"])]
        out: String,
    },
    /// How many monic polynomials of degree n have a given count value 0
    /// or 1, for k >= 2 (CSV: n,k,value,count,fraction).
    Census {
        #[arg(long, default_value = "2")]
        q: String,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: u32,
        #[arg(long)]
        value: u64,
    },
    /// The limit constants with tail bounds, as JSON.
    Constants {
        #[arg(long, default_value = "2")]
        q: String,
        #[arg(long)]
        terms: Option<usize>,
        #[arg(long, default_value = "json", value_parser = ["json"])]
        out: String,
    },
    /// Exact generating-series coefficients of the weighted
    /// excess-multiplicity sums against their main terms
    /// (CSV: n,coeff_num,coeff_den,main_term,normalized_residual).
    Series {
        #[arg(long, default_value = "2")]
        q: String,
        #[arg(long)]
        k: u32,
        /// Constant weight, typically -1, 0 or 1; any integer or num/den
        /// rational with g^2 <= q is accepted.
        #[arg(long, default_value = "-1", allow_hyphen_values = true)]
        g: String,
        /// Largest degree to emit; the series is computed to this order.
        #[arg(long = "N")]
        order: usize,
        /// Recompute every coefficient by brute-force factorization and fail on mismatch.
        #[arg(long)]
        compare_brute: bool,
        #[arg(long)]
        terms: Option<usize>,
    },
    /// Empirical distribution of the standardized count against the normal
    /// law (CSV: a,ecdf,phi,gap; the KS distance goes to stderr).
    ErdosKac {
        #[arg(long, default_value = "2")]
        q: String,
        #[arg(long)]
        n: usize,
        /// Draw this many seeded samples instead of enumerating every polynomial.
        #[arg(long)]
        samples: Option<u64>,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, value_enum, default_value_t = StatArg::Omega1)]
        stat: StatArg,
        /// Pool degrees 2..=n, weighting degree m by q^m.
        #[arg(long)]
        aggregate: bool,
        #[arg(long, default_value = "csv", value_parser = ["csv"])]
        out: String,
    },
    /// Count polynomials of degree n whose statistic strays from ln n by
    /// at least (ln n)^(1/2 + epsilon-prime) (CSV: n,total,count,fraction).
    NormalOrder {
        #[arg(long, default_value = "2")]
        q: String,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0.1)]
        epsilon_prime: f64,
        #[arg(long, value_enum, default_value_t = StatArg::Omega1)]
        stat: StatArg,
        /// Draw this many seeded samples instead of enumerating every polynomial.
        #[arg(long)]
        samples: Option<u64>,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
    /// Exact centered second moment of the multiplicity-one count at
    /// degree n (CSV: n,sum,main_term,residual,normalized).
    Variance {
        #[arg(long, default_value = "2")]
        q: String,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        terms: Option<usize>,
    },
    /// Run the built-in consistency checks; exits 5 on the first failure.
    Selftest {
        /// Deliberately break an internal table to prove the checks can fail.
        #[arg(long, value_enum)]
        inject_fault: Option<FaultArg>,
    },
}

fn fx(x: f64) -> String {
    format!("{x:.16e}")
}

fn parse_q(s: &str) -> Result<(u64, u32), Error> {
    let parts: Vec<&str> = s.split('^').collect();
    let bad = || Error::Domain(format!("cannot read '{s}' as p or p^e"));
    match parts.as_slice() {
        [v] => {
            let v: u64 = v.trim().parse().map_err(|_| bad())?;
            if v < 2 {
                return Err(bad());
            }
            // a prime power written out in full, e.g. 9 for 3^2, is accepted
            let mut p = v;
            for d in 2u64.. {
                if d.saturating_mul(d) > v {
                    break;
                }
                if v % d == 0 {
                    p = d;
                    break;
                }
            }
            let mut e = 0u32;
            let mut m = v;
            while m % p == 0 {
                m /= p;
                e += 1;
            }
            if m != 1 {
                return Err(Error::Domain(format!("q = {v} is not a prime power")));
            }
            Ok((p, e))
        }
        [p, e] => Ok((
            p.trim().parse().map_err(|_| bad())?,
            e.trim().parse().map_err(|_| bad())?,
        )),
        _ => Err(bad()),
    }
}

fn context(q: &str) -> Result<FieldContext, Error> {
    let (p, e) = parse_q(q)?;
    FieldContext::new(p, e)
}

fn parse_range(s: &str) -> Result<(usize, usize), Error> {
    let bad = || Error::Domain(format!("cannot read '{s}' as a range A:B"));
    let (a, b) = s.split_once(':').ok_or_else(bad)?;
    let lo: usize = a.trim().parse().map_err(|_| bad())?;
    let hi: usize = b.trim().parse().map_err(|_| bad())?;
    if lo == 0 || hi < lo {
        return Err(bad());
    }
    Ok((lo, hi))
}

fn parse_weight(s: &str) -> Result<BigRational, Error> {
    let bad = || Error::Domain(format!("cannot read '{s}' as an integer or num/den rational"));
    let s = s.trim();
    if let Some((n, d)) = s.split_once('/') {
        let num = BigInt::from_str(n.trim()).map_err(|_| bad())?;
        let den = BigInt::from_str(d.trim()).map_err(|_| bad())?;
        if den == BigInt::from(0) {
            return Err(bad());
        }
        Ok(BigRational::new(num, den))
    } else {
        Ok(BigRational::from(BigInt::from_str(s).map_err(|_| bad())?))
    }
}

fn terms_or_default(arg: Option<usize>) -> usize {
    arg.or_else(|| {
        std::env::var("OMEGAK_TERMS")
            .ok()
            .and_then(|v| v.parse().ok())
    })
    .unwrap_or(80)
}

fn mode_of(samples: Option<u64>, seed: u64) -> Mode {
    match samples {
        None => Mode::Full,
        Some(count) => Mode::Sample { count, seed },
    }
}

fn csv_quote(text: &str) -> String {
    format!("\"{text}\"")
}

fn run(command: Command) -> Result<(), Error> {
    match command {
        Command::Field { q } => {
            let ctx = context(&q)?;
            println!("q = {}", ctx.q());
            println!("p = {}", ctx.p());
            println!("e = {}", ctx.e());
            if let Some(modulus) = ctx.modulus() {
                let text: Vec<String> = modulus.iter().map(u64::to_string).collect();
                println!("modulus = {}", text.join(","));
            }
            Ok(())
        }
        Command::Factor { q, poly, seed } => {
            let ctx = context(&q)?;
            let f = Poly::parse(&ctx, &poly)?;
            let fac = factor::factor(&ctx, &f, seed)?;
            println!("irreducible,multiplicity");
            for (g, m) in fac.factors() {
                println!("{},{m}", csv_quote(&g.to_text()));
            }
            Ok(())
        }
        Command::Pi { q, max_degree } => {
            let ctx = context(&q)?;
            println!("degree,count");
            for d in 1..=max_degree {
                println!("{d},{}", pi_exact(ctx.q(), d));
            }
            Ok(())
        }
        Command::Mertens { q, n: max } => {
            let ctx = context(&q)?;
            let table = PrimeCountTable::new(ctx.q(), max);
            println!("n,sum,residual");
            for n in 1..=max {
                let sum = rational_to_f64(&mertens_exact(&table, n));
                let residual = sum - (n as f64).ln();
                println!("{n},{},{}", fx(sum), fx(residual));
            }
            Ok(())
        }
        Command::Moments { q, k, order, n_range, method, terms, out: _ } => {
            let ctx = context(&q)?;
            let (lo, hi) = parse_range(&n_range)?;
            let order = if order == 1 { MomentOrder::First } else { MomentOrder::Second };
            if order == MomentOrder::Second && k == 0 {
                return Err(Error::Domain(
                    "second moment is computed for multiplicities k >= 1".into(),
                ));
            }
            let table = PrimeCountTable::new(ctx.q(), hi);
            let consts = Constants::with_terms(ctx.q(), terms_or_default(terms));
            let mut lines = Vec::with_capacity(hi - lo + 1);
            for n in lo..=hi {
                let row = stats::moment_row(&table, &consts, n, k, order)?;
                lines.push(match method {
                    MethodArg::Exact => format!(
                        "{n},{},{},{},{}",
                        row.exact,
                        fx(row.main_term),
                        fx(row.residual),
                        fx(row.normalized_residual)
                    ),
                    MethodArg::Brute => {
                        let census = stats::brute_census(&ctx, n)?;
                        let brute = match order {
                            MomentOrder::First => census.moment1(k),
                            MomentOrder::Second => census.moment2(k),
                        };
                        let residual =
                            stats::residual_from_exact(&brute.into(), row.main_term);
                        format!(
                            "{n},{brute},{},{},{}",
                            fx(row.main_term),
                            fx(residual),
                            fx(residual / row.scale)
                        )
                    }
                    MethodArg::Asymptotic => format!("{n},,{},,", fx(row.main_term)),
                });
            }
            println!("n,exact,main_term,residual,normalized_residual");
            for line in lines {
                println!("{line}");
            }
            Ok(())
        }
        Command::Census { q, n, k, value } => {
            let ctx = context(&q)?;
            if k < 2 {
                return Err(Error::Domain("value census applies to multiplicities k >= 2".into()));
            }
            if value > 1 {
                return Err(Error::Domain("value census covers the values 0 and 1".into()));
            }
            let table = PrimeCountTable::new(ctx.q(), n);
            let count = stats::count_value_census(&table, n, k, value)?;
            let qn = BigInt::from(ctx.q()).pow(n as u32);
            let fraction = fraction_to_f64(&BigInt::from(count.clone()), &qn);
            println!("n,k,value,count,fraction");
            println!("{n},{k},{value},{count},{}", fx(fraction));
            Ok(())
        }
        Command::Constants { q, terms, out: _ } => {
            let ctx = context(&q)?;
            let consts = Constants::with_terms(ctx.q(), terms_or_default(terms));
            let mut out = serde_json::Map::new();
            let mut put = |c: omegak_core::constants::ConstantValue| {
                out.insert(
                    c.name.clone(),
                    serde_json::json!({
                        "value": c.value,
                        "tail_bound": c.tail_bound,
                        "terms_used": c.terms_used,
                    }),
                );
            };
            put(Constants::gamma());
            put(Constants::pi_squared());
            put(consts.c1());
            put(consts.a1());
            for m in 2..=4 {
                put(consts.l_value(m));
            }
            let minus_one = Weight::minus_one();
            for k in 1..=4 {
                put(consts.c_weighted(&minus_one, k));
            }
            put(consts.c2());
            put(consts.c3());
            for k in 2..=4 {
                put(consts.ck_prime(k));
            }
            println!("{}", serde_json::to_string_pretty(&serde_json::Value::Object(out)).unwrap());
            Ok(())
        }
        Command::Series { q, k, g, order, compare_brute, terms } => {
            let ctx = context(&q)?;
            let w = parse_weight(&g)?;
            if &w * &w > BigRational::from(BigInt::from(ctx.q())) {
                return Err(Error::Domain(
                    "weight w must satisfy w^2 <= q for the constants to converge".into(),
                ));
            }
            if k == 0 {
                return Err(Error::Domain("series needs k >= 1".into()));
            }
            let table = PrimeCountTable::new(ctx.q(), order);
            let wt = Weight::Const(w);
            let fast = series::a_series(&table, &wt, k, order);
            if compare_brute {
                let brute = series::a_series_brute(&ctx, &wt, k, order)?;
                if fast != brute {
                    eprintln!("series mismatch: generating function disagrees with enumeration");
                    std::process::exit(5);
                }
            }
            let consts = Constants::with_terms(ctx.q(), terms_or_default(terms));
            let c = consts.c_weighted(&wt, k).value;
            let qf = ctx.q() as f64;
            println!("n,coeff_num,coeff_den,main_term,normalized_residual");
            for n in 1..=order {
                let coeff = fast.coeff(n);
                let main = c * qf.powi(n as i32);
                let residual = rational_to_f64(
                    &(coeff - BigRational::from_float(main).expect("finite main term")),
                );
                let scale = n as f64 * qf.powf(n as f64 / (k + 1) as f64);
                println!(
                    "{n},{},{},{},{}",
                    coeff.numer(),
                    coeff.denom(),
                    fx(main),
                    fx(residual / scale)
                );
            }
            Ok(())
        }
        Command::ErdosKac { q, n, samples, seed, stat, aggregate, out: _ } => {
            let ctx = context(&q)?;
            let mode = mode_of(samples, seed);
            let cdf = if aggregate {
                dist::empirical_cdf_aggregate(&ctx, n, stat.into(), mode)?
            } else {
                dist::empirical_cdf(&ctx, n, stat.into(), mode)?
            };
            println!("a,ecdf,phi,gap");
            let total = cdf.total() as f64;
            let mut cum = 0u64;
            for &(x, wgt) in cdf.points() {
                let phi = dist::phi_cdf(x);
                let lo = cum as f64 / total;
                cum += wgt;
                let hi = cum as f64 / total;
                let gap = (phi - lo).max(hi - phi);
                println!("{},{},{},{}", fx(x), fx(hi), fx(phi), fx(gap));
            }
            eprintln!("ks = {}", fx(cdf.ks_distance()));
            Ok(())
        }
        Command::NormalOrder { q, n, epsilon_prime, stat, samples, seed } => {
            let ctx = context(&q)?;
            let row = dist::normal_order_report(
                &ctx,
                n,
                stat.into(),
                mode_of(samples, seed),
                epsilon_prime,
            )?;
            println!("n,total,count,fraction");
            println!("{n},{},{},{}", row.total, row.exceptional, fx(row.fraction));
            Ok(())
        }
        Command::Variance { q, n, terms } => {
            let ctx = context(&q)?;
            let table = PrimeCountTable::new(ctx.q(), n);
            let consts = Constants::with_terms(ctx.q(), terms_or_default(terms));
            let row = dist::variance_report(&table, &consts, n)?;
            println!("n,sum,main_term,residual,normalized");
            println!(
                "{n},{},{},{},{}",
                fx(row.sum),
                fx(row.main_term),
                fx(row.residual),
                fx(row.normalized_residual)
            );
            Ok(())
        }
        Command::Selftest { inject_fault } => {
            let code = selftest::run(inject_fault);
            if code != 0 {
                std::process::exit(code);
            }
            Ok(())
        }
    }
}

fn main() {
    // die quietly when the downstream consumer closes the pipe, as
    // line-oriented tools are expected to
    #[cfg(unix)]
    unsafe {
        libc::signal(libc::SIGPIPE, libc::SIG_DFL);
    }
    let cli = Cli::parse();
    let threads = cli.threads.or_else(|| {
        std::env::var("OMEGAK_THREADS")
            .ok()
            .and_then(|v| v.parse().ok())
    });
    if let Some(t) = threads {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(t).build_global();
    }
    if let Err(e) = run(cli.command) {
        eprintln!("error: {e}");
        let code = match e {
            Error::Capacity(_) => 3,
            Error::Domain(_) => 4,
        };
        std::process::exit(code);
    }
}
