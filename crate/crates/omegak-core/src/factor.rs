//! Factorization of monic polynomials over F_q: squarefree decomposition
//! (characteristic-aware, with p-th-root descent when the derivative
//! vanishes), distinct-degree splitting, and seeded equal-degree splitting
//! (Cantor-Zassenhaus; trace-map variant in characteristic 2).
//!
//! Randomness only steers the internal search for splitters: the returned
//! factor list is sorted canonically, so the output is independent of the
//! seed. Statistics that need only factor *counts* use
//! [`multiplicity_spectrum`], which stops after distinct-degree splitting
//! (a degree-d block of total degree m contains exactly m/d irreducibles)
//! and therefore needs no randomness at all.

use crate::error::{domain, Result};
use crate::field::FieldContext;
use crate::gf2;
use crate::numeric::distinct_prime_factors;
use crate::poly::Poly;
use num_bigint::BigUint;
use num_traits::One;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Multiplicity -> number of distinct monic irreducible factors with exactly
/// that multiplicity; sorted by multiplicity, counts nonzero.
pub type Spectrum = Vec<(u32, u64)>;

/// A complete factorization into monic irreducibles with multiplicities,
/// sorted canonically (degree, then coefficients from the constant term up).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Factorization {
    factors: Vec<(Poly, u32)>,
}

impl Factorization {
    pub fn factors(&self) -> &[(Poly, u32)] {
        &self.factors
    }

    pub fn product(&self, ctx: &FieldContext) -> Poly {
        let mut acc = Poly::one(ctx);
        for (g, m) in &self.factors {
            for _ in 0..*m {
                acc = acc.mul(ctx, g);
            }
        }
        acc
    }

    /// Total degree, counted with multiplicity.
    pub fn degree(&self) -> usize {
        self.factors
            .iter()
            .map(|(g, m)| g.degree().unwrap_or(0) * (*m as usize))
            .sum()
    }

    pub fn spectrum(&self) -> Spectrum {
        let mut spec = Spectrum::new();
        for (_, m) in &self.factors {
            merge_count(&mut spec, *m, 1);
        }
        spec
    }
}

pub(crate) fn merge_count(spec: &mut Spectrum, mult: u32, count: u64) {
    match spec.binary_search_by_key(&mult, |&(m, _)| m) {
        Ok(i) => spec[i].1 += count,
        Err(i) => spec.insert(i, (mult, count)),
    }
}

fn require_monic(f: &Poly) -> Result<()> {
    if f.is_zero() {
        return Err(domain("the zero polynomial has no factorization"));
    }
    if !f.is_monic() {
        return Err(domain("polynomial must be monic"));
    }
    Ok(())
}

/// Deterministic irreducibility test: f of degree d is irreducible iff
/// x^(q^d) = x (mod f) and gcd(x^(q^(d/r)) - x, f) = 1 for every prime r | d.
pub fn is_irreducible(ctx: &FieldContext, f: &Poly) -> Result<bool> {
    require_monic(f)?;
    let d = f.degree().unwrap();
    if d == 0 {
        return Ok(false);
    }
    if d == 1 {
        return Ok(true);
    }
    let x = Poly::x(ctx);
    let mut checkpoints: Vec<usize> = distinct_prime_factors(d as u64)
        .iter()
        .map(|&r| d / r as usize)
        .collect();
    checkpoints.sort_unstable();
    let mut h = x.rem(ctx, f);
    for step in 1..=d {
        h = h.pow_mod(ctx, ctx.q(), f); // h = x^(q^step) mod f
        if checkpoints.binary_search(&step).is_ok() {
            let g = h.sub(ctx, &x).gcd(ctx, f);
            if g.degree() != Some(0) {
                return Ok(false);
            }
        }
        if step == d {
            return Ok(h == x.rem(ctx, f));
        }
    }
    unreachable!()
}

/// Coefficient-wise p-th root of a polynomial whose exponents are all
/// divisible by p (i.e. one with zero derivative): g with g^p = f.
fn pth_root(ctx: &FieldContext, f: &Poly) -> Poly {
    let p = ctx.p() as usize;
    let deg = f.degree().expect("pth_root of zero");
    debug_assert_eq!(deg % p, 0);
    let mut out = Vec::with_capacity(deg / p + 1);
    for i in 0..=deg / p {
        out.push(ctx.pth_root(f.coeff(i * p)));
    }
    Poly::from_elements(out)
}

fn squarefree_inner(ctx: &FieldContext, f: Poly, mult: u32, out: &mut Vec<(Poly, u32)>) {
    debug_assert!(f.is_monic() && f.degree().unwrap() >= 1);
    let p = ctx.p() as u32;
    let fp = f.derivative(ctx);
    if fp.is_zero() {
        // f = g^p with g recoverable coefficient-wise
        let g = pth_root(ctx, &f);
        squarefree_inner(ctx, g, mult * p, out);
        return;
    }
    let mut c = f.gcd(ctx, &fp);
    let mut w = f.divrem(ctx, &c).0;
    let mut i = 1u32;
    // peel factors whose multiplicity is not divisible by p
    while !w.is_one() {
        let y = w.gcd(ctx, &c);
        let part = w.divrem(ctx, &y).0;
        if part.degree().unwrap_or(0) >= 1 {
            out.push((part, mult * i));
        }
        c = c.divrem(ctx, &y).0;
        w = y;
        i += 1;
    }
    // what remains of c collects the multiplicity-divisible-by-p part, a p-th power
    if c.degree().unwrap_or(0) >= 1 {
        let g = pth_root(ctx, &c);
        squarefree_inner(ctx, g, mult * p, out);
    }
}

/// Squarefree decomposition f = prod g_i^{m_i} with the g_i squarefree,
/// monic, and pairwise coprime; pairs sorted by multiplicity. A constant f
/// decomposes into the empty product.
pub fn squarefree_decomposition(ctx: &FieldContext, f: &Poly) -> Result<Vec<(Poly, u32)>> {
    require_monic(f)?;
    let mut out = Vec::new();
    if f.degree().unwrap() >= 1 {
        squarefree_inner(ctx, f.clone(), 1, &mut out);
    }
    out.sort_by_key(|&(_, m)| m);
    Ok(out)
}

/// Distinct-degree splitting of a monic squarefree g: pairs (block, d) where
/// block is the product of all irreducible factors of degree exactly d.
fn distinct_degree_blocks(ctx: &FieldContext, g: &Poly) -> Vec<(Poly, usize)> {
    let mut out = Vec::new();
    let mut rem = g.clone();
    let x = Poly::x(ctx);
    let mut h = x.rem(ctx, &rem);
    let mut d = 0usize;
    loop {
        let dr = rem.degree().unwrap_or(0);
        if dr == 0 {
            break;
        }
        d += 1;
        if 2 * d > dr {
            // nothing of degree <= dr/2 remains, so rem is irreducible
            out.push((rem.clone(), dr));
            break;
        }
        h = h.pow_mod(ctx, ctx.q(), &rem); // x^(q^d) mod rem
        let block = h.sub(ctx, &x).gcd(ctx, &rem);
        if block.degree().unwrap_or(0) >= 1 {
            rem = rem.divrem(ctx, &block).0;
            h = h.rem(ctx, &rem);
            out.push((block, d));
        }
    }
    out
}

fn random_poly_below(ctx: &FieldContext, deg: usize, rng: &mut ChaCha8Rng) -> Poly {
    let q = ctx.q();
    Poly::from_elements((0..deg).map(|_| ctx.el(rng.gen_range(0..q))).collect())
}

/// Split a monic product of r >= 1 distinct irreducibles, all of degree d,
/// into the individual factors (Cantor-Zassenhaus).
fn equal_degree_factors(ctx: &FieldContext, f: Poly, d: usize, rng: &mut ChaCha8Rng) -> Vec<Poly> {
    let q = ctx.q();
    let mut done = Vec::new();
    let mut todo = vec![f];
    while let Some(cur) = todo.pop() {
        let dc = cur.degree().unwrap();
        if dc == d {
            done.push(cur);
            continue;
        }
        let split = loop {
            let a = random_poly_below(ctx, dc, rng);
            if a.degree().unwrap_or(0) < 1 {
                continue;
            }
            let lucky = a.gcd(ctx, &cur);
            let cand = if lucky.degree().unwrap() >= 1 {
                lucky
            } else if ctx.p() == 2 {
                // trace map to F_2: sum of a^(2^i) over i < e*d
                let reps = ctx.e() as usize * d;
                let mut term = a.rem(ctx, &cur);
                let mut trace = Poly::zero();
                for _ in 0..reps {
                    trace = trace.add(ctx, &term);
                    term = term.mul(ctx, &term).rem(ctx, &cur);
                }
                trace.gcd(ctx, &cur)
            } else {
                let exp = (BigUint::from(q).pow(d as u32) - BigUint::one()) / BigUint::from(2u32);
                let b = a.pow_mod_big(ctx, &exp, &cur);
                b.sub(ctx, &Poly::one(ctx)).gcd(ctx, &cur)
            };
            let dg = cand.degree().unwrap_or(0);
            if dg >= 1 && dg < dc {
                break cand;
            }
        };
        let other = cur.divrem(ctx, &split).0;
        todo.push(split);
        todo.push(other);
    }
    done
}

pub(crate) fn factor_generic(ctx: &FieldContext, f: &Poly, seed: u64) -> Result<Factorization> {
    require_monic(f)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut factors: Vec<(Poly, u32)> = Vec::new();
    for (part, mult) in squarefree_decomposition(ctx, f)? {
        for (block, d) in distinct_degree_blocks(ctx, &part) {
            for irr in equal_degree_factors(ctx, block, d, &mut rng) {
                factors.push((irr, mult));
            }
        }
    }
    factors.sort_by(|(a, _), (b, _)| a.canonical_cmp(b));
    Ok(Factorization { factors })
}

pub(crate) fn spectrum_generic(ctx: &FieldContext, f: &Poly) -> Result<Spectrum> {
    require_monic(f)?;
    let mut spec = Spectrum::new();
    for (part, mult) in squarefree_decomposition(ctx, f)? {
        for (block, d) in distinct_degree_blocks(ctx, &part) {
            merge_count(&mut spec, mult, (block.degree().unwrap() / d) as u64);
        }
    }
    Ok(spec)
}

/// Factor a monic f into irreducibles. The seed drives the equal-degree
/// search only; the canonical ordering of the result hides it.
pub fn factor(ctx: &FieldContext, f: &Poly, seed: u64) -> Result<Factorization> {
    if ctx.q() == 2 {
        require_monic(f)?;
        let mut factors = gf2::factor_packed(f, seed);
        factors.sort_by(|(a, _), (b, _)| a.canonical_cmp(b));
        return Ok(Factorization { factors });
    }
    factor_generic(ctx, f, seed)
}

/// Multiplicity spectrum of f without equal-degree splitting (deterministic,
/// no randomness involved).
pub fn multiplicity_spectrum(ctx: &FieldContext, f: &Poly) -> Result<Spectrum> {
    if ctx.q() == 2 {
        require_monic(f)?;
        return Ok(gf2::spectrum_packed(f));
    }
    spectrum_generic(ctx, f)
}
