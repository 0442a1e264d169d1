//! Finite field contexts F_q, q = p^e.
//!
//! Elements are indices in [0, q). For prime fields the index is the residue
//! itself; for extensions the index encodes the base-p digits of the
//! coordinate vector over F_p, digit i being the coefficient of x^i in the
//! residue-class representative modulo the field's defining polynomial.
//!
//! Construction is deterministic: p is checked prime by trial division, and
//! for e > 1 the defining modulus is the lexicographically smallest monic
//! irreducible of degree e over F_p (coefficient tuples compared from the
//! constant term upward). Multiplication in extension fields goes through
//! exp/log tables over a fixed generator, so q is capped at 2^16 there;
//! prime fields work with p < 2^31 directly.

use crate::error::{capacity, domain, Result};
use crate::numeric::{distinct_prime_factors, is_prime_u64};

/// One element of F_q, stored as its index in [0, q). Only meaningful
/// together with the `FieldContext` that produced it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FieldElement(pub(crate) u32);

impl FieldElement {
    pub fn index(self) -> u64 {
        self.0 as u64
    }
}

impl std::fmt::Display for FieldElement {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.0)
    }
}

enum Repr {
    /// e = 1: indices are residues mod p.
    Prime,
    /// e > 1: table-based arithmetic. `exp[i]` is the index of g^i for a
    /// fixed generator g; `log[idx]` inverts that (log[0] is a sentinel).
    Ext {
        modulus: Vec<u64>,
        exp: Vec<u32>,
        log: Vec<u32>,
    },
}

pub struct FieldContext {
    p: u64,
    e: u32,
    q: u64,
    repr: Repr,
}

impl FieldContext {
    /// Build F_{p^e}. Errors: composite or undersized p, e = 0 (domain);
    /// p >= 2^31 for prime fields or p^e > 2^16 for extensions (capacity).
    pub fn new(p: u64, e: u32) -> Result<FieldContext> {
        if e == 0 {
            return Err(domain("field extension degree e must be at least 1"));
        }
        if !is_prime_u64(p) {
            return Err(domain(format!("characteristic {p} is not prime")));
        }
        if e == 1 {
            if p >= 1 << 31 {
                return Err(capacity(format!(
                    "prime field characteristic {p} exceeds 2^31 - 1"
                )));
            }
            return Ok(FieldContext {
                p,
                e,
                q: p,
                repr: Repr::Prime,
            });
        }
        let q = p
            .checked_pow(e)
            .filter(|&q| q <= 1 << 16)
            .ok_or_else(|| capacity(format!("extension field order {p}^{e} exceeds 2^16")))?;
        let modulus = smallest_irreducible(p, e);
        let (exp, log) = build_tables(p, e, q, &modulus);
        Ok(FieldContext {
            p,
            e,
            q,
            repr: Repr::Ext { modulus, exp, log },
        })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn e(&self) -> u32 {
        self.e
    }

    pub fn q(&self) -> u64 {
        self.q
    }

    /// Defining modulus for e > 1 (coefficients over F_p, low degree first,
    /// length e + 1, leading coefficient 1). None for prime fields.
    pub fn modulus(&self) -> Option<&[u64]> {
        match &self.repr {
            Repr::Prime => None,
            Repr::Ext { modulus, .. } => Some(modulus),
        }
    }

    pub fn zero(&self) -> FieldElement {
        FieldElement(0)
    }

    pub fn one(&self) -> FieldElement {
        FieldElement(1)
    }

    /// Checked element constructor: index must be < q.
    pub fn element(&self, index: u64) -> Result<FieldElement> {
        if index < self.q {
            Ok(FieldElement(index as u32))
        } else {
            Err(domain(format!(
                "element index {index} out of range for field of order {}",
                self.q
            )))
        }
    }

    pub(crate) fn el(&self, index: u64) -> FieldElement {
        debug_assert!(index < self.q);
        FieldElement(index as u32)
    }

    pub fn elements(&self) -> impl Iterator<Item = FieldElement> {
        (0..self.q as u32).map(FieldElement)
    }

    pub fn add(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        match &self.repr {
            Repr::Prime => FieldElement(((a.0 as u64 + b.0 as u64) % self.p) as u32),
            Repr::Ext { .. } => {
                // digit-wise addition mod p; no carries between digits
                let p = self.p as u32;
                let (mut x, mut y) = (a.0, b.0);
                let mut out = 0u32;
                let mut weight = 1u32;
                for _ in 0..self.e {
                    out += weight * ((x % p + y % p) % p);
                    x /= p;
                    y /= p;
                    weight *= p;
                }
                FieldElement(out)
            }
        }
    }

    pub fn neg(&self, a: FieldElement) -> FieldElement {
        match &self.repr {
            Repr::Prime => {
                if a.0 == 0 {
                    a
                } else {
                    FieldElement((self.p - a.0 as u64) as u32)
                }
            }
            Repr::Ext { .. } => {
                let p = self.p as u32;
                let mut x = a.0;
                let mut out = 0u32;
                let mut weight = 1u32;
                for _ in 0..self.e {
                    let d = x % p;
                    out += weight * if d == 0 { 0 } else { p - d };
                    x /= p;
                    weight *= p;
                }
                FieldElement(out)
            }
        }
    }

    pub fn sub(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        self.add(a, self.neg(b))
    }

    pub fn mul(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        match &self.repr {
            Repr::Prime => FieldElement(((a.0 as u64 * b.0 as u64) % self.p) as u32),
            Repr::Ext { exp, log, .. } => {
                if a.0 == 0 || b.0 == 0 {
                    return FieldElement(0);
                }
                let m = self.q - 1;
                let i = (log[a.0 as usize] as u64 + log[b.0 as usize] as u64) % m;
                FieldElement(exp[i as usize])
            }
        }
    }

    /// Multiplicative inverse. Domain error on zero.
    pub fn inv(&self, a: FieldElement) -> Result<FieldElement> {
        if a.0 == 0 {
            return Err(domain("inverse of zero"));
        }
        match &self.repr {
            Repr::Prime => Ok(self.pow(a, self.p - 2)),
            Repr::Ext { exp, log, .. } => {
                let m = self.q - 1;
                let i = (m - log[a.0 as usize] as u64) % m;
                Ok(FieldElement(exp[i as usize]))
            }
        }
    }

    /// a^m by square-and-multiply. pow(a, 0) = 1 for every a, including 0.
    pub fn pow(&self, a: FieldElement, mut m: u64) -> FieldElement {
        let mut base = a;
        let mut acc = self.one();
        while m > 0 {
            if m & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            m >>= 1;
        }
        acc
    }

    /// Inverse Frobenius: the unique b with b^p = a, namely a^(q/p).
    pub fn pth_root(&self, a: FieldElement) -> FieldElement {
        self.pow(a, self.q / self.p)
    }
}

// ---- construction helpers: minimal F_p[x] arithmetic on Vec<u64> ----
// Only used while building extension contexts, so clarity over speed.

fn fp_trim(v: &mut Vec<u64>) {
    while v.last() == Some(&0) {
        v.pop();
    }
}

fn fp_mul(p: u64, a: &[u64], b: &[u64]) -> Vec<u64> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![0u64; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            out[i + j] = (out[i + j] + x * y) % p;
        }
    }
    fp_trim(&mut out);
    out
}

/// Remainder of a by monic b.
fn fp_rem(p: u64, a: &[u64], b: &[u64]) -> Vec<u64> {
    debug_assert_eq!(*b.last().unwrap(), 1);
    let mut r = a.to_vec();
    while r.len() >= b.len() {
        let lead = *r.last().unwrap();
        if lead != 0 {
            let shift = r.len() - b.len();
            for (i, &c) in b.iter().enumerate() {
                let sub = (lead * c) % p;
                let idx = shift + i;
                r[idx] = (r[idx] + p - sub) % p;
            }
        }
        r.pop();
        fp_trim(&mut r);
        if r.len() < b.len() {
            break;
        }
    }
    r
}

/// Trial-division irreducibility for the small degrees used during field
/// construction: f (monic, degree e) is reducible iff some monic polynomial
/// of degree 1..=e/2 divides it.
fn fp_is_irreducible(p: u64, f: &[u64]) -> bool {
    let e = f.len() - 1;
    for d in 1..=e / 2 {
        let mut div = vec![0u64; d + 1];
        div[d] = 1;
        loop {
            if fp_rem(p, f, &div).is_empty() {
                return false;
            }
            // next monic candidate of degree d (odometer over low coefficients)
            let mut i = 0;
            loop {
                if i == d {
                    break;
                }
                div[i] += 1;
                if div[i] < p {
                    break;
                }
                div[i] = 0;
                i += 1;
            }
            if i == d {
                break;
            }
        }
    }
    true
}

/// Lexicographically smallest monic irreducible of degree e over F_p, where
/// coefficient tuples (c_0, ..., c_{e-1}) are compared from the constant
/// term upward.
fn smallest_irreducible(p: u64, e: u32) -> Vec<u64> {
    let e = e as usize;
    let total = p.pow(e as u32);
    for raw in 0..total {
        let mut coeffs = vec![0u64; e + 1];
        coeffs[e] = 1;
        let mut v = raw;
        // c_{e-1} varies fastest so that (c_0, ..., c_{e-1}) ascends lexicographically
        for i in (0..e).rev() {
            coeffs[i] = v % p;
            v /= p;
        }
        if fp_is_irreducible(p, &coeffs) {
            return coeffs;
        }
    }
    unreachable!("an irreducible of every degree exists over every finite field")
}

fn digits_to_index(p: u64, digits: &[u64]) -> u32 {
    let mut idx = 0u64;
    for &d in digits.iter().rev() {
        idx = idx * p + d;
    }
    idx as u32
}

fn index_to_digits(p: u64, e: u32, mut idx: u64) -> Vec<u64> {
    let mut out = vec![0u64; e as usize];
    for slot in out.iter_mut() {
        *slot = idx % p;
        idx /= p;
    }
    out
}

/// Build exp/log tables: find a generator of the multiplicative group by
/// order checking against the prime factorization of q - 1, then tabulate
/// its powers via residue-polynomial multiplication.
fn build_tables(p: u64, e: u32, q: u64, modulus: &[u64]) -> (Vec<u32>, Vec<u32>) {
    let mul_idx = |a: u32, b: u32| -> u32 {
        let da = index_to_digits(p, e, a as u64);
        let db = index_to_digits(p, e, b as u64);
        let prod = fp_mul(p, &da, &db);
        let red = fp_rem(p, &prod, modulus);
        let mut padded = red;
        padded.resize(e as usize, 0);
        digits_to_index(p, &padded)
    };
    let pow_idx = |mut a: u32, mut m: u64| -> u32 {
        let mut acc = 1u32;
        while m > 0 {
            if m & 1 == 1 {
                acc = mul_idx(acc, a);
            }
            a = mul_idx(a, a);
            m >>= 1;
        }
        acc
    };
    let group = q - 1;
    let factors = distinct_prime_factors(group);
    let generator = (2..q)
        .map(|i| i as u32)
        .find(|&g| factors.iter().all(|&r| pow_idx(g, group / r) != 1))
        .expect("multiplicative group of a finite field is cyclic");

    let mut exp = vec![0u32; group as usize];
    let mut log = vec![u32::MAX; q as usize];
    let mut acc = 1u32;
    for (i, slot) in exp.iter_mut().enumerate() {
        *slot = acc;
        log[acc as usize] = i as u32;
        acc = mul_idx(acc, generator);
    }
    debug_assert_eq!(acc, 1, "generator order must be q - 1");
    (exp, log)
}
