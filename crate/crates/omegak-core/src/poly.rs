//! Dense polynomials over F_q with canonical (trailing-zero-free) coefficient
//! vectors, low degree first. The zero polynomial is the empty vector and has
//! degree None. All arithmetic takes the owning `FieldContext` explicitly.

use crate::error::{domain, Result};
use crate::field::{FieldContext, FieldElement};
use num_bigint::BigUint;
use std::cmp::Ordering;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Poly {
    coeffs: Vec<FieldElement>,
}

impl Poly {
    pub fn zero() -> Poly {
        Poly { coeffs: Vec::new() }
    }

    pub fn one(ctx: &FieldContext) -> Poly {
        Poly {
            coeffs: vec![ctx.one()],
        }
    }

    pub fn x(ctx: &FieldContext) -> Poly {
        Poly {
            coeffs: vec![ctx.zero(), ctx.one()],
        }
    }

    pub fn constant(c: FieldElement) -> Poly {
        let mut p = Poly { coeffs: vec![c] };
        p.trim();
        p
    }

    /// Build from coefficient element indices, low degree first, validating
    /// each index against the field order. Trailing zeros are trimmed.
    pub fn from_indices(ctx: &FieldContext, indices: &[u64]) -> Result<Poly> {
        let mut coeffs = Vec::with_capacity(indices.len());
        for &i in indices {
            coeffs.push(ctx.element(i)?);
        }
        let mut p = Poly { coeffs };
        p.trim();
        Ok(p)
    }

    pub(crate) fn from_elements(coeffs: Vec<FieldElement>) -> Poly {
        let mut p = Poly { coeffs };
        p.trim();
        p
    }

    /// The monic polynomial of degree n whose n low coefficients are the
    /// base-q digits of `index` (digit i = coefficient of t^i). Enumerating
    /// index over [0, q^n) walks all of M_n.
    pub fn monic_by_index(ctx: &FieldContext, n: usize, index: u64) -> Poly {
        let q = ctx.q();
        let mut coeffs = Vec::with_capacity(n + 1);
        let mut v = index;
        for _ in 0..n {
            coeffs.push(ctx.el(v % q));
            v /= q;
        }
        debug_assert_eq!(v, 0, "index out of range for M_n");
        coeffs.push(ctx.one());
        Poly { coeffs }
    }

    fn trim(&mut self) {
        while self
            .coeffs
            .last()
            .map(|c| c.index() == 0)
            .unwrap_or(false)
        {
            self.coeffs.pop();
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree as Option: None is the zero polynomial's sentinel.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn coeffs(&self) -> &[FieldElement] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> FieldElement {
        self.coeffs.get(i).copied().unwrap_or(FieldElement(0))
    }

    pub fn leading(&self) -> Option<FieldElement> {
        self.coeffs.last().copied()
    }

    pub fn is_monic(&self) -> bool {
        self.leading().map(|c| c.index() == 1).unwrap_or(false)
    }

    pub fn is_one(&self) -> bool {
        self.coeffs.len() == 1 && self.coeffs[0].index() == 1
    }

    pub fn add(&self, ctx: &FieldContext, other: &Poly) -> Poly {
        let n = self.coeffs.len().max(other.coeffs.len());
        let mut out = Vec::with_capacity(n);
        for i in 0..n {
            out.push(ctx.add(self.coeff(i), other.coeff(i)));
        }
        Poly::from_elements(out)
    }

    pub fn neg(&self, ctx: &FieldContext) -> Poly {
        Poly {
            coeffs: self.coeffs.iter().map(|&c| ctx.neg(c)).collect(),
        }
    }

    pub fn sub(&self, ctx: &FieldContext, other: &Poly) -> Poly {
        let n = self.coeffs.len().max(other.coeffs.len());
        let mut out = Vec::with_capacity(n);
        for i in 0..n {
            out.push(ctx.sub(self.coeff(i), other.coeff(i)));
        }
        Poly::from_elements(out)
    }

    pub fn mul(&self, ctx: &FieldContext, other: &Poly) -> Poly {
        if self.is_zero() || other.is_zero() {
            return Poly::zero();
        }
        let mut out = vec![ctx.zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a.index() == 0 {
                continue;
            }
            for (j, &b) in other.coeffs.iter().enumerate() {
                out[i + j] = ctx.add(out[i + j], ctx.mul(a, b));
            }
        }
        Poly::from_elements(out)
    }

    pub fn scale(&self, ctx: &FieldContext, c: FieldElement) -> Poly {
        Poly::from_elements(self.coeffs.iter().map(|&a| ctx.mul(a, c)).collect())
    }

    /// Quotient and remainder. Panics on a zero divisor (an internal-misuse
    /// condition; public entry points validate their inputs first).
    pub fn divrem(&self, ctx: &FieldContext, den: &Poly) -> (Poly, Poly) {
        assert!(!den.is_zero(), "division by the zero polynomial");
        let dlen = den.coeffs.len();
        if self.coeffs.len() < dlen {
            return (Poly::zero(), self.clone());
        }
        let lead_inv = ctx.inv(*den.coeffs.last().unwrap()).unwrap();
        let mut rem = self.coeffs.clone();
        let mut quot = vec![ctx.zero(); rem.len() - dlen + 1];
        for i in (dlen - 1..rem.len()).rev() {
            let c = rem[i];
            if c.index() == 0 {
                continue;
            }
            let qc = ctx.mul(c, lead_inv);
            let base = i + 1 - dlen;
            quot[base] = qc;
            for (j, &d) in den.coeffs.iter().enumerate() {
                rem[base + j] = ctx.sub(rem[base + j], ctx.mul(qc, d));
            }
        }
        rem.truncate(dlen - 1);
        (Poly::from_elements(quot), Poly::from_elements(rem))
    }

    pub fn rem(&self, ctx: &FieldContext, den: &Poly) -> Poly {
        self.divrem(ctx, den).1
    }

    pub fn make_monic(&self, ctx: &FieldContext) -> Poly {
        match self.leading() {
            None => Poly::zero(),
            Some(l) if l.index() == 1 => self.clone(),
            Some(l) => self.scale(ctx, ctx.inv(l).unwrap()),
        }
    }

    /// Monic gcd by the Euclidean algorithm. gcd(0, 0) = 0.
    pub fn gcd(&self, ctx: &FieldContext, other: &Poly) -> Poly {
        let mut a = self.clone();
        let mut b = other.clone();
        while !b.is_zero() {
            let r = a.rem(ctx, &b);
            a = b;
            b = r;
        }
        a.make_monic(ctx)
    }

    /// Formal derivative; the scalar i acts through i mod p.
    pub fn derivative(&self, ctx: &FieldContext) -> Poly {
        if self.coeffs.len() <= 1 {
            return Poly::zero();
        }
        let p = ctx.p();
        let mut out = Vec::with_capacity(self.coeffs.len() - 1);
        for (i, &c) in self.coeffs.iter().enumerate().skip(1) {
            let scalar = ctx.el((i as u64) % p);
            out.push(ctx.mul(c, scalar));
        }
        Poly::from_elements(out)
    }

    /// self^exp mod m, small exponent.
    pub fn pow_mod(&self, ctx: &FieldContext, exp: u64, m: &Poly) -> Poly {
        let mut base = self.rem(ctx, m);
        let mut acc = Poly::one(ctx).rem(ctx, m);
        let mut e = exp;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(ctx, &base).rem(ctx, m);
            }
            base = base.mul(ctx, &base).rem(ctx, m);
            e >>= 1;
        }
        acc
    }

    /// self^exp mod m, big exponent (used by equal-degree splitting where the
    /// exponent is (q^d - 1)/2).
    pub fn pow_mod_big(&self, ctx: &FieldContext, exp: &BigUint, m: &Poly) -> Poly {
        let mut acc = Poly::one(ctx).rem(ctx, m);
        if exp.bits() == 0 {
            return acc;
        }
        let mut base = self.rem(ctx, m);
        for i in 0..exp.bits() {
            if exp.bit(i) {
                acc = acc.mul(ctx, &base).rem(ctx, m);
            }
            if i + 1 < exp.bits() {
                base = base.mul(ctx, &base).rem(ctx, m);
            }
        }
        acc
    }

    /// Canonical order: degree first, then coefficients compared from the
    /// constant term upward. This is the order factor lists and irreducible
    /// enumerations are reported in.
    pub fn canonical_cmp(&self, other: &Poly) -> Ordering {
        self.coeffs
            .len()
            .cmp(&other.coeffs.len())
            .then_with(|| self.coeffs.cmp(&other.coeffs))
    }

    /// Render in the text format the CLI accepts: coefficient indices,
    /// low degree first, comma separated. The zero polynomial is "0".
    pub fn to_text(&self) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        self.coeffs
            .iter()
            .map(|c| c.index().to_string())
            .collect::<Vec<_>>()
            .join(",")
    }

    /// Parse the text format, validating indices against the field.
    pub fn parse(ctx: &FieldContext, text: &str) -> Result<Poly> {
        let mut indices = Vec::new();
        for part in text.split(',') {
            let part = part.trim();
            let v: u64 = part
                .parse()
                .map_err(|_| domain(format!("bad coefficient index {part:?}")))?;
            indices.push(v);
        }
        Poly::from_indices(ctx, &indices)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn f2() -> FieldContext {
        FieldContext::new(2, 1).unwrap()
    }

    fn f3() -> FieldContext {
        FieldContext::new(3, 1).unwrap()
    }

    fn random_poly(ctx: &FieldContext, deg: usize, rng: &mut ChaCha8Rng) -> Poly {
        let coeffs: Vec<FieldElement> = (0..=deg)
            .map(|_| ctx.el(rng.gen_range(0..ctx.q())))
            .collect();
        Poly::from_elements(coeffs)
    }

    #[test]
    fn zero_and_degree_conventions() {
        let ctx = f2();
        assert_eq!(Poly::zero().degree(), None);
        assert_eq!(Poly::one(&ctx).degree(), Some(0));
        assert_eq!(Poly::x(&ctx).degree(), Some(1));
        assert_eq!(Poly::from_indices(&ctx, &[0, 0, 0]).unwrap(), Poly::zero());
        assert!(Poly::from_indices(&ctx, &[1, 2]).is_err()); // 2 not a valid F_2 index
    }

    #[test]
    fn multiplication_known_values() {
        let ctx = f2();
        // (t + 1)^2 = t^2 + 1 in characteristic 2
        let t1 = Poly::from_indices(&ctx, &[1, 1]).unwrap();
        let sq = t1.mul(&ctx, &t1);
        assert_eq!(sq, Poly::from_indices(&ctx, &[1, 0, 1]).unwrap());

        let ctx3 = f3();
        // (t + 1)(t + 2) = t^2 + 2 over F_3
        let a = Poly::from_indices(&ctx3, &[1, 1]).unwrap();
        let b = Poly::from_indices(&ctx3, &[2, 1]).unwrap();
        assert_eq!(a.mul(&ctx3, &b), Poly::from_indices(&ctx3, &[2, 0, 1]).unwrap());
    }

    #[test]
    fn divrem_round_trips_randomly() {
        for (p, e) in [(2u64, 1u32), (3, 1), (2, 2), (5, 1), (3, 2)] {
            let ctx = FieldContext::new(p, e).unwrap();
            let mut rng = ChaCha8Rng::seed_from_u64(7 + p + e as u64);
            for _ in 0..200 {
                let a = random_poly(&ctx, rng.gen_range(0..12), &mut rng);
                let mut b = random_poly(&ctx, rng.gen_range(0..6), &mut rng);
                if b.is_zero() {
                    b = Poly::one(&ctx);
                }
                let (q, r) = a.divrem(&ctx, &b);
                assert!(r.degree().unwrap_or(0) < b.degree().unwrap() || r.is_zero() || b.degree() == Some(0));
                assert_eq!(q.mul(&ctx, &b).add(&ctx, &r), a);
            }
        }
    }

    #[test]
    fn gcd_known_and_properties() {
        let ctx = f3();
        // gcd(t^2 - 1, t^2 + t - 2) = t - 1 = t + 2 (monic)
        let a = Poly::from_indices(&ctx, &[2, 0, 1]).unwrap(); // t^2 + 2 = t^2 - 1
        let b = Poly::from_indices(&ctx, &[1, 1, 1]).unwrap(); // t^2 + t + 1 = (t-1)^2
        let g = a.gcd(&ctx, &b);
        assert_eq!(g, Poly::from_indices(&ctx, &[2, 1]).unwrap());
        // gcd with zero returns the monic normalization of the other side
        let c = Poly::from_indices(&ctx, &[0, 2]).unwrap(); // 2t
        assert_eq!(c.gcd(&ctx, &Poly::zero()), Poly::x(&ctx));
        assert_eq!(Poly::zero().gcd(&ctx, &Poly::zero()), Poly::zero());
    }

    #[test]
    fn derivative_rules() {
        let ctx = f3();
        // d/dt (t^3 + 2t^2 + t + 1) = 3t^2 + 4t + 1 = t + 1 over F_3
        let f = Poly::from_indices(&ctx, &[1, 1, 2, 1]).unwrap();
        assert_eq!(f.derivative(&ctx), Poly::from_indices(&ctx, &[1, 1]).unwrap());
        // characteristic-2 polynomials in t^2 have zero derivative
        let ctx2 = f2();
        let g = Poly::from_indices(&ctx2, &[1, 0, 1, 0, 1]).unwrap();
        assert_eq!(g.derivative(&ctx2), Poly::zero());
    }

    #[test]
    fn pow_mod_matches_naive() {
        let ctx = f3();
        let m = Poly::from_indices(&ctx, &[1, 0, 0, 1]).unwrap(); // t^3 + 1
        let b = Poly::from_indices(&ctx, &[2, 1]).unwrap();
        let mut naive = Poly::one(&ctx);
        for e in 0..40u64 {
            assert_eq!(b.pow_mod(&ctx, e, &m), naive.rem(&ctx, &m), "exp {e}");
            assert_eq!(
                b.pow_mod_big(&ctx, &BigUint::from(e), &m),
                naive.rem(&ctx, &m)
            );
            naive = naive.mul(&ctx, &b);
        }
    }

    #[test]
    fn text_round_trip_and_order() {
        let ctx = f2();
        let f = Poly::parse(&ctx, "0,1,1").unwrap();
        assert_eq!(f.to_text(), "0,1,1");
        assert_eq!(f.degree(), Some(2));
        assert_eq!(Poly::parse(&ctx, "0").unwrap(), Poly::zero());
        assert!(Poly::parse(&ctx, "0,x").is_err());
        assert!(Poly::parse(&ctx, "0,7").is_err());

        // canonical order: degree, then constant-term-first lexicographic
        let t = Poly::parse(&ctx, "0,1").unwrap();
        let t1 = Poly::parse(&ctx, "1,1").unwrap();
        let quad = Poly::parse(&ctx, "1,1,1").unwrap();
        assert_eq!(t.canonical_cmp(&t1), Ordering::Less);
        assert_eq!(t1.canonical_cmp(&quad), Ordering::Less);
        assert_eq!(quad.canonical_cmp(&quad), Ordering::Equal);
    }

    #[test]
    fn monic_enumeration_covers_m_n() {
        let ctx = f3();
        let n = 3;
        let total = ctx.q().pow(n as u32);
        let mut seen = std::collections::HashSet::new();
        for i in 0..total {
            let f = Poly::monic_by_index(&ctx, n, i);
            assert!(f.is_monic());
            assert_eq!(f.degree(), Some(n));
            seen.insert(f);
        }
        assert_eq!(seen.len(), total as usize);
    }
}
