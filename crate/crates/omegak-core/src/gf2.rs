//! Bit-packed arithmetic and factorization for F_2[t]. A polynomial is a
//! `Vec<u64>` with bit i of word j holding the coefficient of t^(64j+i),
//! which turns multiplication into shift-xors, squaring into a bit spread,
//! and the Frobenius p-th root into a bit compress. The factor pipeline
//! mirrors the generic one (squarefree split, distinct-degree split,
//! trace-map equal-degree split) but runs a couple of orders of magnitude
//! faster, which the exhaustive censuses and the degree-256 sampling need.

use crate::factor::{merge_count, Spectrum};
use crate::field::FieldElement;
use crate::poly::Poly;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Packed polynomial over F_2; invariant: no trailing zero words.
#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct G2 {
    w: Vec<u64>,
}

fn spread(x: u32) -> u64 {
    // interleave a zero bit after every bit of x
    let mut v = x as u64;
    v = (v | (v << 16)) & 0x0000_ffff_0000_ffff;
    v = (v | (v << 8)) & 0x00ff_00ff_00ff_00ff;
    v = (v | (v << 4)) & 0x0f0f_0f0f_0f0f_0f0f;
    v = (v | (v << 2)) & 0x3333_3333_3333_3333;
    v = (v | (v << 1)) & 0x5555_5555_5555_5555;
    v
}

fn compress(x: u64) -> u32 {
    // keep the bits at even positions, packed together (inverse of spread)
    let mut v = x & 0x5555_5555_5555_5555;
    v = (v | (v >> 1)) & 0x3333_3333_3333_3333;
    v = (v | (v >> 2)) & 0x0f0f_0f0f_0f0f_0f0f;
    v = (v | (v >> 4)) & 0x00ff_00ff_00ff_00ff;
    v = (v | (v >> 8)) & 0x0000_ffff_0000_ffff;
    v = (v | (v >> 16)) & 0x0000_0000_ffff_ffff;
    v as u32
}

fn xor_shifted(out: &mut [u64], src: &[u64], shift: usize) {
    let ws = shift / 64;
    let bs = shift % 64;
    if bs == 0 {
        for (j, &s) in src.iter().enumerate() {
            out[ws + j] ^= s;
        }
    } else {
        let mut carry = 0u64;
        for (j, &s) in src.iter().enumerate() {
            out[ws + j] ^= (s << bs) | carry;
            carry = s >> (64 - bs);
        }
        if carry != 0 {
            out[ws + src.len()] ^= carry;
        }
    }
}

impl G2 {
    pub(crate) fn zero() -> Self {
        G2 { w: Vec::new() }
    }

    fn from_words(mut w: Vec<u64>) -> Self {
        while w.last() == Some(&0) {
            w.pop();
        }
        G2 { w }
    }

    fn x() -> Self {
        G2 { w: vec![2] }
    }

    pub(crate) fn is_zero(&self) -> bool {
        self.w.is_empty()
    }

    fn is_one(&self) -> bool {
        self.w == [1]
    }

    pub(crate) fn deg(&self) -> Option<usize> {
        let top = self.w.last()?;
        Some((self.w.len() - 1) * 64 + 63 - top.leading_zeros() as usize)
    }

    pub(crate) fn from_poly(f: &Poly) -> Self {
        let mut w = vec![0u64; f.coeffs().len() / 64 + 1];
        for (i, c) in f.coeffs().iter().enumerate() {
            if c.index() != 0 {
                w[i / 64] |= 1 << (i % 64);
            }
        }
        G2::from_words(w)
    }

    pub(crate) fn to_poly(&self) -> Poly {
        let deg = match self.deg() {
            None => return Poly::zero(),
            Some(d) => d,
        };
        let mut coeffs = Vec::with_capacity(deg + 1);
        for i in 0..=deg {
            let bit = (self.w[i / 64] >> (i % 64)) & 1;
            coeffs.push(FieldElement(bit as u32));
        }
        Poly::from_elements(coeffs)
    }

    /// Monic of degree n whose low coefficients are the bits of index.
    pub(crate) fn monic_by_index(n: usize, index: u64) -> Self {
        debug_assert!(n >= 64 || index < (1u64 << n));
        let mut w = vec![0u64; n / 64 + 1];
        w[0] = index;
        w[n / 64] |= 1 << (n % 64);
        G2::from_words(w)
    }

    /// Uniformly random monic polynomial of degree n.
    pub(crate) fn random_monic(n: usize, rng: &mut ChaCha8Rng) -> Self {
        let mut w = vec![0u64; n / 64 + 1];
        for word in w.iter_mut().take(n / 64) {
            *word = rng.gen();
        }
        if n % 64 > 0 {
            w[n / 64] = rng.gen::<u64>() & ((1 << (n % 64)) - 1);
        }
        w[n / 64] |= 1 << (n % 64);
        G2 { w }
    }

    fn add(&self, other: &G2) -> G2 {
        let mut w = vec![0u64; self.w.len().max(other.w.len())];
        w[..self.w.len()].copy_from_slice(&self.w);
        for (j, &s) in other.w.iter().enumerate() {
            w[j] ^= s;
        }
        G2::from_words(w)
    }

    #[cfg(test)]
    fn mul(&self, other: &G2) -> G2 {
        let (da, db) = match (self.deg(), other.deg()) {
            (Some(a), Some(b)) => (a, b),
            _ => return G2::zero(),
        };
        let mut out = vec![0u64; (da + db) / 64 + 1];
        for (i, &wa) in self.w.iter().enumerate() {
            let mut bits = wa;
            while bits != 0 {
                let b = bits.trailing_zeros() as usize;
                xor_shifted(&mut out, &other.w, i * 64 + b);
                bits &= bits - 1;
            }
        }
        G2::from_words(out)
    }

    fn square(&self) -> G2 {
        let mut out = Vec::with_capacity(self.w.len() * 2);
        for &w in &self.w {
            out.push(spread(w as u32));
            out.push(spread((w >> 32) as u32));
        }
        G2::from_words(out)
    }

    /// Square root of a polynomial in t^2 (all odd coefficients zero).
    fn sqrt(&self) -> G2 {
        let mut out = Vec::with_capacity(self.w.len() / 2 + 1);
        for pair in self.w.chunks(2) {
            let lo = compress(pair[0]) as u64;
            let hi = if pair.len() == 2 { compress(pair[1]) as u64 } else { 0 };
            out.push(lo | (hi << 32));
        }
        G2::from_words(out)
    }

    fn derivative(&self) -> G2 {
        // coefficient j of f' is coefficient j+1 of f, for even j
        let mut out = vec![0u64; self.w.len()];
        for i in 0..self.w.len() {
            let mut v = self.w[i] >> 1;
            if i + 1 < self.w.len() {
                v |= self.w[i + 1] << 63;
            }
            out[i] = v & 0x5555_5555_5555_5555;
        }
        G2::from_words(out)
    }

    fn rem(&self, f: &G2) -> G2 {
        let df = f.deg().expect("division by zero");
        let mut r = self.clone();
        while let Some(dr) = r.deg() {
            if dr < df {
                break;
            }
            xor_shifted(&mut r.w, &f.w, dr - df);
            while r.w.last() == Some(&0) {
                r.w.pop();
            }
        }
        r
    }

    fn divrem(&self, f: &G2) -> (G2, G2) {
        let df = f.deg().expect("division by zero");
        let mut r = self.clone();
        let dq = match self.deg() {
            Some(d) if d >= df => d - df,
            _ => return (G2::zero(), r),
        };
        let mut q = vec![0u64; dq / 64 + 1];
        while let Some(dr) = r.deg() {
            if dr < df {
                break;
            }
            let shift = dr - df;
            q[shift / 64] |= 1 << (shift % 64);
            xor_shifted(&mut r.w, &f.w, shift);
            while r.w.last() == Some(&0) {
                r.w.pop();
            }
        }
        (G2::from_words(q), r)
    }

    fn gcd(&self, other: &G2) -> G2 {
        let mut a = self.clone();
        let mut b = other.clone();
        while !b.is_zero() {
            let r = a.rem(&b);
            a = b;
            b = r;
        }
        a
    }
}

fn squarefree_inner(f: G2, mult: u32, out: &mut Vec<(G2, u32)>) {
    let fp = f.derivative();
    if fp.is_zero() {
        squarefree_inner(f.sqrt(), mult * 2, out);
        return;
    }
    let mut c = f.gcd(&fp);
    let mut w = f.divrem(&c).0;
    let mut i = 1u32;
    while !w.is_one() {
        let y = w.gcd(&c);
        let part = w.divrem(&y).0;
        if part.deg().unwrap_or(0) >= 1 {
            out.push((part, mult * i));
        }
        c = c.divrem(&y).0;
        w = y;
        i += 1;
    }
    if c.deg().unwrap_or(0) >= 1 {
        squarefree_inner(c.sqrt(), mult * 2, out);
    }
}

fn squarefree(f: &G2) -> Vec<(G2, u32)> {
    let mut out = Vec::new();
    if f.deg().unwrap_or(0) >= 1 {
        squarefree_inner(f.clone(), 1, &mut out);
    }
    out
}

fn distinct_degree_blocks(g: &G2) -> Vec<(G2, usize)> {
    let mut out = Vec::new();
    let mut rem = g.clone();
    let x = G2::x();
    let mut h = x.rem(&rem);
    let mut d = 0usize;
    loop {
        let dr = rem.deg().unwrap_or(0);
        if dr == 0 {
            break;
        }
        d += 1;
        if 2 * d > dr {
            out.push((rem, dr));
            break;
        }
        h = h.square().rem(&rem);
        let block = h.add(&x).gcd(&rem);
        if block.deg().unwrap_or(0) >= 1 {
            rem = rem.divrem(&block).0;
            h = h.rem(&rem);
            out.push((block, d));
        }
    }
    out
}

fn random_below(deg: usize, rng: &mut ChaCha8Rng) -> G2 {
    let mut w = vec![0u64; (deg + 63) / 64];
    for word in w.iter_mut() {
        *word = rng.gen();
    }
    if deg % 64 > 0 {
        let last = w.len() - 1;
        w[last] &= (1 << (deg % 64)) - 1;
    }
    G2::from_words(w)
}

fn equal_degree_factors(f: G2, d: usize, rng: &mut ChaCha8Rng) -> Vec<G2> {
    let mut done = Vec::new();
    let mut todo = vec![f];
    while let Some(cur) = todo.pop() {
        let dc = cur.deg().unwrap();
        if dc == d {
            done.push(cur);
            continue;
        }
        let split = loop {
            let a = random_below(dc, rng);
            if a.deg().unwrap_or(0) < 1 {
                continue;
            }
            let lucky = a.gcd(&cur);
            let cand = if lucky.deg().unwrap() >= 1 {
                lucky
            } else {
                // trace map into F_2: sum of a^(2^i) for i < d
                let mut term = a.rem(&cur);
                let mut trace = G2::zero();
                for _ in 0..d {
                    trace = trace.add(&term);
                    term = term.square().rem(&cur);
                }
                trace.gcd(&cur)
            };
            let dg = cand.deg().unwrap_or(0);
            if dg >= 1 && dg < dc {
                break cand;
            }
        };
        let other = cur.divrem(&split).0;
        todo.push(split);
        todo.push(other);
    }
    done
}

/// Full factorization of a monic f over F_2; pairs are unsorted.
pub(crate) fn factor_packed(f: &Poly, seed: u64) -> Vec<(Poly, u32)> {
    let packed = G2::from_poly(f);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();
    for (part, mult) in squarefree(&packed) {
        for (block, d) in distinct_degree_blocks(&part) {
            for irr in equal_degree_factors(block, d, &mut rng) {
                out.push((irr.to_poly(), mult));
            }
        }
    }
    out
}

pub(crate) fn spectrum_packed(f: &Poly) -> Spectrum {
    spectrum_g2(&G2::from_poly(f))
}

/// Multiplicity spectrum without equal-degree splitting.
pub(crate) fn spectrum_g2(f: &G2) -> Spectrum {
    let mut spec = Spectrum::new();
    for (part, mult) in squarefree(f) {
        for (block, d) in distinct_degree_blocks(&part) {
            merge_count(&mut spec, mult, (block.deg().unwrap() / d) as u64);
        }
    }
    spec
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::factor::{factor_generic, spectrum_generic};
    use crate::field::FieldContext;

    fn ctx2() -> FieldContext {
        FieldContext::new(2, 1).unwrap()
    }

    #[test]
    fn pack_round_trip() {
        let ctx = ctx2();
        for n in 0..10 {
            for idx in 0..1u64 << n {
                let f = Poly::monic_by_index(&ctx, n, idx);
                assert_eq!(G2::from_poly(&f).to_poly(), f);
                assert_eq!(G2::monic_by_index(n, idx).to_poly(), f);
            }
        }
        // degrees spanning word boundaries
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for n in [63usize, 64, 65, 127, 128, 200] {
            let g = G2::random_monic(n, &mut rng);
            assert_eq!(g.deg(), Some(n));
            assert_eq!(G2::from_poly(&g.to_poly()), g);
        }
    }

    #[test]
    fn arithmetic_matches_generic() {
        let ctx = ctx2();
        let mut rng = ChaCha8Rng::seed_from_u64(2024);
        for _ in 0..200 {
            let da = rng.gen_range(0..180);
            let db = rng.gen_range(1..140);
            let a = G2::random_monic(da, &mut rng);
            let b = G2::random_monic(db, &mut rng);
            let (pa, pb) = (a.to_poly(), b.to_poly());
            assert_eq!(a.mul(&b).to_poly(), pa.mul(&ctx, &pb));
            assert_eq!(a.add(&b).to_poly(), pa.add(&ctx, &pb));
            assert_eq!(a.square().to_poly(), pa.mul(&ctx, &pa));
            let (q, r) = a.divrem(&b);
            let (pq, pr) = pa.divrem(&ctx, &pb);
            assert_eq!(q.to_poly(), pq);
            assert_eq!(r.to_poly(), pr);
            assert_eq!(a.gcd(&b).to_poly(), pa.gcd(&ctx, &pb));
            assert_eq!(a.derivative().to_poly(), pa.derivative(&ctx));
        }
    }

    #[test]
    fn sqrt_inverts_square() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for n in [1usize, 5, 31, 32, 33, 64, 100, 150] {
            let a = G2::random_monic(n, &mut rng);
            assert_eq!(a.square().sqrt(), a);
        }
    }

    #[test]
    fn factor_matches_generic_exhaustive() {
        let ctx = ctx2();
        for n in 1..=10 {
            for idx in 0..1u64 << n {
                let f = Poly::monic_by_index(&ctx, n, idx);
                let mut packed = factor_packed(&f, 5);
                packed.sort_by(|(a, _), (b, _)| a.canonical_cmp(b));
                let generic = factor_generic(&ctx, &f, 11).unwrap();
                assert_eq!(packed, generic.factors(), "disagree on {}", f.to_text());
                assert_eq!(
                    spectrum_packed(&f),
                    spectrum_generic(&ctx, &f).unwrap(),
                    "spectrum disagrees on {}",
                    f.to_text()
                );
            }
        }
    }

    #[test]
    fn factor_matches_generic_large_random() {
        let ctx = ctx2();
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        for _ in 0..12 {
            // products of small factors force deep multiplicity towers
            let mut f = G2::random_monic(rng.gen_range(20..40), &mut rng);
            let small = G2::monic_by_index(1, rng.gen_range(0..2));
            for _ in 0..rng.gen_range(0..5) {
                f = f.mul(&small);
            }
            let fp = f.to_poly();
            let mut packed = factor_packed(&fp, 1);
            packed.sort_by(|(a, _), (b, _)| a.canonical_cmp(b));
            let generic = factor_generic(&ctx, &fp, 2).unwrap();
            assert_eq!(packed, generic.factors());
        }
    }

    #[test]
    fn spectrum_at_degree_256_matches_full_factorization() {
        let mut rng = ChaCha8Rng::seed_from_u64(64);
        for round in 0..5 {
            let f = G2::random_monic(256, &mut rng);
            let spec = spectrum_g2(&f);
            let factors = factor_packed(&f.to_poly(), round);
            let mut from_factors = Spectrum::new();
            let mut total = 0usize;
            for (g, m) in &factors {
                merge_count(&mut from_factors, *m, 1);
                total += g.degree().unwrap() * *m as usize;
            }
            assert_eq!(total, 256);
            assert_eq!(spec, from_factors);
        }
    }
}
