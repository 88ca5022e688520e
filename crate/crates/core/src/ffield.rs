//! Arithmetic in F_{p^k} for small prime powers.
//!
//! Every field is built deterministically: the modulus is the
//! lexicographically smallest monic irreducible polynomial of its degree
//! (coefficients compared low-to-high), so downstream permutation groups
//! come out bit-identical across runs. Elements carry a fixed total order
//! (the base-p integer index of the coefficient vector) which defines
//! canonical point numbering for group actions.

use crate::numtheory::{self, Natural};
use num_traits::Zero;
use thiserror::Error;

/// Construction cap: fields larger than this are out of desk scale.
pub const FIELD_SIZE_CAP: u64 = 1 << 20;

#[derive(Debug, Error)]
pub enum FieldError {
    #[error("field size exceeds cap 2^20")]
    CapExceeded,
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("division by zero")]
    DivisionByZero,
    #[error("elements belong to different fields")]
    FieldMismatch,
    #[error("{e} does not divide the unit group order {order}")]
    NotADivisor { e: Natural, order: u64 },
    #[error("field has no nontrivial unit")]
    NoUnits,
    #[error(transparent)]
    Factor(#[from] numtheory::FactorError),
}

/// The field F_{p^k}, elements represented modulo a canonical irreducible.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Field {
    p: u64,
    k: u32,
    /// Monic modulus, coefficients low-to-high, length k + 1.
    modulus: Vec<u64>,
}

/// An element of some F_{p^k}: reduced coefficient vector of length k.
///
/// Owner identity is (p, k); the modulus is canonical given those.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FieldElement {
    p: u64,
    k: u32,
    coeffs: Vec<u64>,
}

impl Field {
    /// Builds F_{p^k} with the canonical modulus.
    pub fn new(p: u64, k: u32) -> Result<Field, FieldError> {
        if !numtheory::is_prime_u64(p) {
            return Err(FieldError::NotPrime(p));
        }
        assert!(k >= 1, "extension degree must be positive");
        let mut size: u64 = 1;
        for _ in 0..k {
            size = size
                .checked_mul(p)
                .filter(|&s| s <= FIELD_SIZE_CAP)
                .ok_or(FieldError::CapExceeded)?;
        }
        let modulus = smallest_irreducible(p, k);
        Ok(Field { p, k, modulus })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    /// p^k as u64 (fits by the construction cap).
    pub fn size(&self) -> u64 {
        self.p.pow(self.k)
    }

    pub fn modulus(&self) -> &[u64] {
        &self.modulus
    }

    pub fn zero(&self) -> FieldElement {
        FieldElement {
            p: self.p,
            k: self.k,
            coeffs: vec![0; self.k as usize],
        }
    }

    pub fn one(&self) -> FieldElement {
        self.from_index(1)
    }

    /// The class of x, a root of the modulus.
    pub fn gen_x(&self) -> FieldElement {
        if self.k == 1 {
            // x reduces to the constant -c0 mod p
            let c0 = self.modulus[0];
            self.from_index((self.p - c0) % self.p)
        } else {
            self.from_index(self.p)
        }
    }

    /// Element with the given canonical index (base-p digits, x^0 least
    /// significant). Inverse of [`Field::index_of`].
    pub fn from_index(&self, mut idx: u64) -> FieldElement {
        debug_assert!(idx < self.size());
        let mut coeffs = vec![0u64; self.k as usize];
        for c in coeffs.iter_mut() {
            *c = idx % self.p;
            idx /= self.p;
        }
        FieldElement {
            p: self.p,
            k: self.k,
            coeffs,
        }
    }

    pub fn index_of(&self, a: &FieldElement) -> u64 {
        let mut idx = 0u64;
        for &c in a.coeffs.iter().rev() {
            idx = idx * self.p + c;
        }
        idx
    }

    pub fn element(&self, coeffs: &[u64]) -> FieldElement {
        let mut v = vec![0u64; self.k as usize];
        for (i, &c) in coeffs.iter().enumerate().take(self.k as usize) {
            v[i] = c % self.p;
        }
        FieldElement {
            p: self.p,
            k: self.k,
            coeffs: v,
        }
    }

    fn check_owner(&self, a: &FieldElement) -> Result<(), FieldError> {
        if a.p != self.p || a.k != self.k {
            return Err(FieldError::FieldMismatch);
        }
        Ok(())
    }

    pub fn add(&self, a: &FieldElement, b: &FieldElement) -> Result<FieldElement, FieldError> {
        self.check_owner(a)?;
        self.check_owner(b)?;
        let coeffs = a
            .coeffs
            .iter()
            .zip(&b.coeffs)
            .map(|(&x, &y)| (x + y) % self.p)
            .collect();
        Ok(FieldElement {
            p: self.p,
            k: self.k,
            coeffs,
        })
    }

    pub fn sub(&self, a: &FieldElement, b: &FieldElement) -> Result<FieldElement, FieldError> {
        self.check_owner(a)?;
        self.check_owner(b)?;
        let coeffs = a
            .coeffs
            .iter()
            .zip(&b.coeffs)
            .map(|(&x, &y)| (x + self.p - y) % self.p)
            .collect();
        Ok(FieldElement {
            p: self.p,
            k: self.k,
            coeffs,
        })
    }

    pub fn neg(&self, a: &FieldElement) -> Result<FieldElement, FieldError> {
        self.sub(&self.zero(), a)
    }

    pub fn mul(&self, a: &FieldElement, b: &FieldElement) -> Result<FieldElement, FieldError> {
        self.check_owner(a)?;
        self.check_owner(b)?;
        let prod = poly_mul(&a.coeffs, &b.coeffs, self.p);
        let red = poly_rem(&prod, &self.modulus, self.p);
        Ok(self.element(&red))
    }

    pub fn pow(&self, a: &FieldElement, e: &Natural) -> Result<FieldElement, FieldError> {
        self.check_owner(a)?;
        if e.is_zero() {
            return Ok(self.one());
        }
        let mut acc = self.one();
        let mut base = a.clone();
        let bits = e.bits();
        for i in 0..bits {
            if e.bit(i) {
                acc = self.mul(&acc, &base)?;
            }
            if i + 1 < bits {
                base = self.mul(&base, &base)?;
            }
        }
        Ok(acc)
    }

    pub fn inv(&self, a: &FieldElement) -> Result<FieldElement, FieldError> {
        self.check_owner(a)?;
        if a.is_zero() {
            return Err(FieldError::DivisionByZero);
        }
        self.pow(a, &Natural::from(self.size() - 2))
    }

    pub fn div(&self, a: &FieldElement, b: &FieldElement) -> Result<FieldElement, FieldError> {
        let bi = self.inv(b)?;
        self.mul(a, &bi)
    }

    /// a^(p^j): the j-th Frobenius power.
    pub fn frobenius(&self, a: &FieldElement, j: u32) -> Result<FieldElement, FieldError> {
        let mut out = a.clone();
        for _ in 0..j {
            out = self.pow(&out, &Natural::from(self.p))?;
        }
        Ok(out)
    }

    /// Smallest element (in the canonical order) of multiplicative order
    /// exactly p^k - 1, certified against every prime divisor of p^k - 1.
    pub fn primitive_element(&self) -> Result<FieldElement, FieldError> {
        let q = self.size();
        if q < 3 {
            return Err(FieldError::NoUnits);
        }
        let group_order = Natural::from(q - 1);
        let f = numtheory::factorize(&group_order, numtheory::DEFAULT_RHO_STEPS)?;
        let cofactors: Vec<Natural> = f.primes().map(|r| &group_order / r).collect();
        'candidate: for idx in 2..q {
            let g = self.from_index(idx);
            for c in &cofactors {
                if self.pow(&g, c)?.is_one_elem() {
                    continue 'candidate;
                }
            }
            return Ok(g);
        }
        unreachable!("F_q^x is cyclic, a generator exists");
    }

    /// Generator of the unique multiplicative subgroup of order e.
    pub fn unit_subgroup_generator(&self, e: &Natural) -> Result<FieldElement, FieldError> {
        let q = self.size();
        let group_order = Natural::from(q - 1);
        if e.is_zero() || !(&group_order % e).is_zero() {
            return Err(FieldError::NotADivisor {
                e: e.clone(),
                order: q - 1,
            });
        }
        if e == &Natural::from(1u32) {
            return Ok(self.one());
        }
        let g = self.primitive_element()?;
        self.pow(&g, &(&group_order / e))
    }

    /// All elements in canonical index order.
    pub fn elements(&self) -> impl Iterator<Item = FieldElement> + '_ {
        (0..self.size()).map(move |i| self.from_index(i))
    }
}

impl FieldElement {
    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0)
    }

    pub fn is_one_elem(&self) -> bool {
        self.coeffs[0] == 1 && self.coeffs[1..].iter().all(|&c| c == 0)
    }

    pub fn coeffs(&self) -> &[u64] {
        &self.coeffs
    }
}

// --- dense polynomial helpers over F_p, coefficients low-to-high ---

fn poly_trim(a: &mut Vec<u64>) {
    while a.len() > 1 && *a.last().unwrap() == 0 {
        a.pop();
    }
}

fn poly_is_zero(a: &[u64]) -> bool {
    a.iter().all(|&c| c == 0)
}

fn poly_mul(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let mut out = vec![0u64; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            out[i + j] = (out[i + j] + x * y) % p;
        }
    }
    out
}

fn poly_rem(a: &[u64], m: &[u64], p: u64) -> Vec<u64> {
    let mut r: Vec<u64> = a.to_vec();
    poly_trim(&mut r);
    let dm = m.len() - 1;
    let lead_inv = mod_inv(m[dm], p);
    while r.len() > dm && !poly_is_zero(&r) {
        let dr = r.len() - 1;
        let coef = (r[dr] * lead_inv) % p;
        if coef != 0 {
            for i in 0..=dm {
                let idx = dr - dm + i;
                let sub = coef * m[i] % p;
                r[idx] = (r[idx] + p - sub) % p;
            }
        } else {
            r[dr] = 0;
        }
        poly_trim(&mut r);
        if r.len() == 1 {
            break;
        }
    }
    r
}

fn mod_inv(a: u64, p: u64) -> u64 {
    mod_pow(a % p, p - 2, p)
}

fn mod_pow(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut acc = 1u64;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * b % m;
        }
        b = b * b % m;
        e >>= 1;
    }
    acc
}

fn poly_gcd(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let mut x = a.to_vec();
    let mut y = b.to_vec();
    poly_trim(&mut x);
    poly_trim(&mut y);
    while !poly_is_zero(&y) {
        let r = poly_rem(&x, &y, p);
        x = y;
        y = r;
    }
    x
}

/// x^(p^j) mod m, via j successive p-th powers.
fn frobenius_of_x(m: &[u64], p: u64, j: u32) -> Vec<u64> {
    let mut acc = vec![0, 1];
    for _ in 0..j {
        acc = poly_powmod(&acc, p, m, p);
    }
    acc
}

fn poly_powmod(base: &[u64], mut e: u64, m: &[u64], p: u64) -> Vec<u64> {
    let mut acc = vec![1u64];
    let mut b = poly_rem(base, m, p);
    while e > 0 {
        if e & 1 == 1 {
            acc = poly_rem(&poly_mul(&acc, &b, p), m, p);
        }
        b = poly_rem(&poly_mul(&b, &b, p), m, p);
        e >>= 1;
    }
    acc
}

fn is_irreducible(m: &[u64], p: u64) -> bool {
    let k = (m.len() - 1) as u32;
    if k == 1 {
        return true;
    }
    // x^(p^k) == x mod m
    let xq = frobenius_of_x(m, p, k);
    let x = vec![0u64, 1];
    let mut diff = poly_sub(&xq, &x, p);
    poly_trim(&mut diff);
    if !poly_is_zero(&diff) {
        return false;
    }
    // gcd(x^(p^(k/r)) - x, m) == 1 for every prime r | k
    let mut kk = k;
    let mut prime_divs = Vec::new();
    let mut d = 2;
    while d * d <= kk {
        if kk.is_multiple_of(d) {
            prime_divs.push(d);
            while kk.is_multiple_of(d) {
                kk /= d;
            }
        }
        d += 1;
    }
    if kk > 1 {
        prime_divs.push(kk);
    }
    for r in prime_divs {
        let xe = frobenius_of_x(m, p, k / r);
        let mut diff = poly_sub(&xe, &x, p);
        poly_trim(&mut diff);
        if poly_is_zero(&diff) {
            return false;
        }
        let g = poly_gcd(&diff, m, p);
        if g.len() != 1 {
            return false;
        }
    }
    true
}

fn poly_sub(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let n = a.len().max(b.len());
    let mut out = vec![0u64; n];
    for i in 0..n {
        let x = a.get(i).copied().unwrap_or(0);
        let y = b.get(i).copied().unwrap_or(0);
        out[i] = (x + p - y) % p;
    }
    out
}

/// Lexicographically smallest (low coefficient compared first) monic
/// irreducible of degree k over F_p.
fn smallest_irreducible(p: u64, k: u32) -> Vec<u64> {
    let total = p.pow(k);
    for m in 0..total {
        // low coefficients are the most significant digits of m, so
        // ascending m enumerates (c_0, c_1, ...) lexicographically
        let mut candidate = vec![0u64; k as usize + 1];
        candidate[k as usize] = 1;
        let mut rest = m;
        for i in (0..k as usize).rev() {
            candidate[k as usize - 1 - i] = rest % p;
            rest /= p;
        }
        if is_irreducible(&candidate, p) {
            return candidate;
        }
    }
    unreachable!("irreducible polynomials of every degree exist over F_p");
}
