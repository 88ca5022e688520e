//! Exact integer arithmetic: primality, factorization, multiplicative
//! orders and generalized repunit values.
//!
//! Primality is deterministic below 2^64 (fixed Miller-Rabin witness set)
//! and probabilistic above (keyed strong-probable-prime rounds plus one
//! strong Lucas round), so every verdict carries its method.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use serde::{Deserialize, Serialize};
use std::sync::OnceLock;
use thiserror::Error;

/// Arbitrary-precision nonnegative integer used throughout the crate.
pub type Natural = BigUint;

/// Convenience constructor for small constants.
pub fn nat(n: u64) -> Natural {
    Natural::from(n)
}

/// Witnesses proving primality for every n < 3.3 * 10^24, hence for all u64.
const U64_WITNESSES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];

/// Default number of probabilistic rounds above the deterministic range.
pub const DEFAULT_SPRP_ROUNDS: u32 = 64;

/// Default Pollard rho step budget.
pub const DEFAULT_RHO_STEPS: u64 = 100_000_000;

/// Trial division bound used before switching to rho.
const TRIAL_DIVISION_BOUND: u64 = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PrimalityMethod {
    Deterministic,
    Probabilistic,
}

/// Outcome of a primality test, tagged with how it was reached.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PrimalityVerdict {
    pub is_prime: bool,
    pub method: PrimalityMethod,
    /// Strong-probable-prime rounds performed; 0 on the deterministic path.
    pub rounds: u32,
}

impl PrimalityVerdict {
    fn deterministic(is_prime: bool) -> Self {
        PrimalityVerdict {
            is_prime,
            method: PrimalityMethod::Deterministic,
            rounds: 0,
        }
    }
}

/// Complete factorization, factors ascending by prime.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Factorization {
    pub factors: Vec<(Natural, u32)>,
}

impl Factorization {
    /// Multiplies the factorization back out.
    pub fn value(&self) -> Natural {
        let mut acc = Natural::one();
        for (p, a) in &self.factors {
            acc *= p.pow(*a);
        }
        acc
    }

    pub fn primes(&self) -> impl Iterator<Item = &Natural> {
        self.factors.iter().map(|(p, _)| p)
    }
}

#[derive(Debug, Error)]
pub enum FactorError {
    #[error("factorization budget exhausted; cofactor {cofactor} unresolved")]
    BudgetExhausted {
        partial: Vec<(Natural, u32)>,
        cofactor: Natural,
    },
    #[error("factorize requires n >= 2, got {0}")]
    TooSmall(Natural),
}

#[derive(Debug, Error)]
pub enum OrderError {
    #[error("multiplicative order undefined: gcd({p}, {e}) > 1")]
    NotCoprime { p: Natural, e: Natural },
    #[error(transparent)]
    Factor(#[from] FactorError),
}

fn mulmod_u64(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn powmod_u64(mut base: u64, mut exp: u64, m: u64) -> u64 {
    if m == 1 {
        return 0;
    }
    let mut acc = 1u64;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mulmod_u64(acc, base, m);
        }
        base = mulmod_u64(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Deterministic Miller-Rabin for u64 inputs.
pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n == p {
            return true;
        }
        if n.is_multiple_of(p) {
            return false;
        }
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'witness: for &a in U64_WITNESSES.iter() {
        let mut x = powmod_u64(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mulmod_u64(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// One strong-probable-prime round to base `a` for odd n > 2.
fn sprp_round(n: &BigUint, d: &BigUint, s: u64, a: &BigUint) -> bool {
    let n_minus_1 = n - 1u32;
    let mut x = a.modpow(d, n);
    if x.is_one() || x == n_minus_1 {
        return true;
    }
    for _ in 1..s {
        x = (&x * &x) % n;
        if x == n_minus_1 {
            return true;
        }
    }
    false
}

fn jacobi(a: &BigInt, n: &BigInt) -> i32 {
    // n odd positive
    let mut a = a.mod_floor(n);
    let mut n = n.clone();
    let mut result = 1i32;
    while !a.is_zero() {
        while a.is_even() {
            a >>= 1;
            let r = (&n % 8u32).to_u32().unwrap();
            if r == 3 || r == 5 {
                result = -result;
            }
        }
        std::mem::swap(&mut a, &mut n);
        if (&a % 4u32).to_u32().unwrap() == 3 && (&n % 4u32).to_u32().unwrap() == 3 {
            result = -result;
        }
        a = a.mod_floor(&n);
    }
    if n.is_one() {
        result
    } else {
        0
    }
}

/// Strong Lucas probable-prime round with Selfridge parameter selection.
/// Returns false only for proven composites.
fn strong_lucas_round(n: &BigUint) -> bool {
    let n_int = BigInt::from(n.clone());
    // Selfridge method A: D = 5, -7, 9, -11, ... with (D/n) = -1.
    let mut d_abs: i64 = 5;
    let mut sign: i64 = 1;
    let d = loop {
        let d_candidate = BigInt::from(d_abs * sign);
        match jacobi(&d_candidate, &n_int) {
            -1 => break d_candidate,
            0 => {
                // gcd(D, n) > 1; composite unless n == |D| itself.
                let g = BigInt::from(d_abs).gcd(&n_int);
                if g != n_int || n_int != BigInt::from(d_abs) {
                    return false;
                }
                return true;
            }
            _ => {}
        }
        if d_abs == 13 && n.sqrt().pow(2) == *n {
            return false; // perfect square, no valid D exists
        }
        d_abs += 2;
        sign = -sign;
    };
    // P = 1, Q = (1 - D) / 4
    let q: BigInt = (BigInt::one() - &d) / 4;

    // n + 1 = t * 2^s with t odd
    let n_plus_1 = n + 1u32;
    let s = n_plus_1.trailing_zeros().unwrap_or(0);
    let t = &n_plus_1 >> s;

    let modn = |x: &BigInt| -> BigInt { x.mod_floor(&n_int) };
    let inv2 = {
        // n odd, so 2^{-1} = (n + 1) / 2
        BigInt::from((n + 1u32) >> 1)
    };

    // Binary Lucas chain computing U_t, V_t (P = 1).
    let mut u = BigInt::one();
    let mut v = BigInt::one(); // U_1 = 1, V_1 = P = 1
    let mut qk = q.clone(); // Q^1
    let bits = t.bits();
    for i in (0..bits - 1).rev() {
        // double: (U, V)_k -> (U, V)_{2k}
        u = modn(&(&u * &v));
        v = modn(&(&v * &v - 2 * &qk));
        qk = modn(&(&qk * &qk));
        if t.bit(i) {
            // increment: 2k -> 2k + 1
            let u_next = modn(&(&(&u + &v) * &inv2));
            let v_next = modn(&(&(&d * &u + &v) * &inv2));
            u = u_next;
            v = v_next;
            qk = modn(&(&qk * &q));
        }
    }

    if u.is_zero() || v.is_zero() {
        return true;
    }
    for _ in 1..s {
        v = modn(&(&v * &v - 2 * &qk));
        if v.is_zero() {
            return true;
        }
        qk = modn(&(&qk * &qk));
    }
    false
}

fn sprp_bases(n: &BigUint, seed: u64, rounds: u32) -> Vec<BigUint> {
    // Bases keyed on (seed, n) so the verdict is reproducible for a fixed seed.
    let mut h = seed ^ 0x9e37_79b9_7f4a_7c15;
    for limb in n.to_u64_digits() {
        h = h.rotate_left(23) ^ limb.wrapping_mul(0xff51_afd7_ed55_8ccd);
    }
    let mut rng = ChaCha12Rng::seed_from_u64(h);
    let top = n - 3u32;
    (0..rounds)
        .map(|_| {
            // uniform in [2, n - 2]
            let r: BigUint = rng.gen_biguint_below(&top);
            r + 2u32
        })
        .collect()
}

trait BigUintRand {
    fn gen_biguint_below(&mut self, bound: &BigUint) -> BigUint;
}

impl<R: Rng> BigUintRand for R {
    fn gen_biguint_below(&mut self, bound: &BigUint) -> BigUint {
        let bits = bound.bits();
        loop {
            let n64 = bits.div_ceil(64) as usize;
            let mut limbs = vec![0u64; n64];
            for limb in limbs.iter_mut() {
                *limb = self.gen();
            }
            let excess = (n64 as u64) * 64 - bits;
            if excess > 0 && n64 > 0 {
                limbs[n64 - 1] >>= excess;
            }
            let candidate = BigUint::from_slice(
                &limbs
                    .iter()
                    .flat_map(|l| [(l & 0xffff_ffff) as u32, (l >> 32) as u32])
                    .collect::<Vec<_>>(),
            );
            if &candidate < bound {
                return candidate;
            }
        }
    }
}

/// Primality test: deterministic below 2^64, keyed probabilistic rounds above.
pub fn is_prime(n: &Natural) -> PrimalityVerdict {
    is_prime_seeded(n, 0)
}

/// As [`is_prime`], but the probabilistic bases are drawn from `seed`.
/// Re-verification passes use a distinct seed to get fresh randomness.
pub fn is_prime_seeded(n: &Natural, seed: u64) -> PrimalityVerdict {
    if let Some(n64) = n.to_u64() {
        return PrimalityVerdict::deterministic(is_prime_u64(n64));
    }
    // n >= 2^64 here, in particular odd/even split is meaningful.
    if n.is_even() {
        return PrimalityVerdict::deterministic(false);
    }
    for p in small_primes().iter().take(200) {
        if (n % *p).is_zero() {
            return PrimalityVerdict::deterministic(false);
        }
    }
    let rounds = DEFAULT_SPRP_ROUNDS;
    let n_minus_1 = n - 1u32;
    let s = n_minus_1.trailing_zeros().unwrap();
    let d = &n_minus_1 >> s;
    for a in sprp_bases(n, seed, rounds) {
        if !sprp_round(n, &d, s, &a) {
            return PrimalityVerdict {
                is_prime: false,
                method: PrimalityMethod::Probabilistic,
                rounds,
            };
        }
    }
    let lucas_ok = strong_lucas_round(n);
    PrimalityVerdict {
        is_prime: lucas_ok,
        method: PrimalityMethod::Probabilistic,
        rounds,
    }
}

fn small_primes() -> &'static [u64] {
    static PRIMES: OnceLock<Vec<u64>> = OnceLock::new();
    PRIMES.get_or_init(|| sieve_primes(TRIAL_DIVISION_BOUND))
}

/// Primes up to `bound` inclusive, by sieve of Eratosthenes.
pub fn sieve_primes(bound: u64) -> Vec<u64> {
    let bound = bound as usize;
    let mut composite = vec![false; bound + 1];
    let mut primes = Vec::new();
    for i in 2..=bound {
        if !composite[i] {
            primes.push(i as u64);
            let mut j = i * i;
            while j <= bound {
                composite[j] = true;
                j += i;
            }
        }
    }
    primes
}

/// Pollard rho (Brent variant) on u64; returns a nontrivial factor or None
/// if the step budget ran out. Deducts consumed steps from `budget`.
fn rho_u64(n: u64, budget: &mut u64) -> Option<u64> {
    if n.is_multiple_of(2) {
        return Some(2);
    }
    for c in 1..64u64 {
        let f = |x: u64| (mulmod_u64(x, x, n) + c) % n;
        let mut x = 2u64;
        let mut y = 2u64;
        let mut d = 1u64;
        while d == 1 {
            if *budget == 0 {
                return None;
            }
            *budget -= 1;
            x = f(x);
            y = f(f(y));
            d = x.abs_diff(y).gcd(&n);
        }
        if d != n {
            return Some(d);
        }
    }
    None
}

fn rho_big(n: &BigUint, budget: &mut u64) -> Option<BigUint> {
    if n.is_even() {
        return Some(BigUint::from(2u32));
    }
    let one = BigUint::one();
    for c in 1u32..32 {
        let c_big = BigUint::from(c);
        let f = |x: &BigUint| (x * x + &c_big) % n;
        let mut x = BigUint::from(2u32);
        let mut y = x.clone();
        loop {
            if *budget == 0 {
                return None;
            }
            // batch 128 iterations per gcd to amortize
            let mut prod = one.clone();
            let x_saved = x.clone();
            let y_saved = y.clone();
            let batch = (*budget).min(128);
            for _ in 0..batch {
                x = f(&x);
                y = f(&f(&y));
                let diff = if x > y { &x - &y } else { &y - &x };
                if !diff.is_zero() {
                    prod = (prod * diff) % n;
                }
            }
            *budget -= batch;
            let d = prod.gcd(n);
            if d.is_one() {
                continue;
            }
            if &d != n {
                return Some(d);
            }
            // backtrack one by one
            let mut x = x_saved;
            let mut y = y_saved;
            for _ in 0..batch {
                x = f(&x);
                y = f(&f(&y));
                let diff = if x > y { &x - &y } else { &y - &x };
                let d = diff.gcd(n);
                if !d.is_one() {
                    if &d != n {
                        return Some(d);
                    }
                    break; // cycle degenerate for this c, try next
                }
            }
            break;
        }
    }
    None
}

/// Complete factorization of n >= 2 within the given rho step budget.
pub fn factorize(n: &Natural, rho_steps: u64) -> Result<Factorization, FactorError> {
    if n < &nat(2) {
        return Err(FactorError::TooSmall(n.clone()));
    }
    let mut found: Vec<Natural> = Vec::new();
    let mut remaining = n.clone();

    // Trial division by primes up to 10^6.
    if let Some(mut small) = remaining.to_u64() {
        // pure u64 path
        for &p in small_primes() {
            if p * p > small {
                break;
            }
            while small % p == 0 {
                found.push(nat(p));
                small /= p;
            }
        }
        remaining = nat(small);
    } else {
        for &p in small_primes() {
            while (&remaining % p).is_zero() {
                found.push(nat(p));
                remaining /= p;
                if remaining.to_u64().is_some() {
                    break;
                }
            }
            if remaining.to_u64().is_some() {
                break;
            }
        }
        if let Some(mut small) = remaining.to_u64() {
            for &p in small_primes() {
                if p * p > small {
                    break;
                }
                while small % p == 0 {
                    found.push(nat(p));
                    small /= p;
                }
            }
            remaining = nat(small);
        }
    }

    // Rho phase on whatever composite cofactors remain.
    let mut budget = rho_steps;
    let mut stack: Vec<Natural> = Vec::new();
    if !remaining.is_one() {
        stack.push(remaining);
    }
    while let Some(m) = stack.pop() {
        if is_prime(&m).is_prime {
            found.push(m);
            continue;
        }
        // perfect power check is cheap and defeats rho-hard inputs like p^2
        if let Some((root, k)) = perfect_power(&m) {
            for _ in 0..k {
                stack.push(root.clone());
            }
            continue;
        }
        let split = if let Some(m64) = m.to_u64() {
            rho_u64(m64, &mut budget).map(Natural::from)
        } else {
            rho_big(&m, &mut budget)
        };
        match split {
            Some(d) => {
                let q = &m / &d;
                stack.push(d);
                stack.push(q);
            }
            None => {
                found.sort();
                let partial = group_factors(found);
                return Err(FactorError::BudgetExhausted {
                    partial,
                    cofactor: m,
                });
            }
        }
    }
    found.sort();
    Ok(Factorization {
        factors: group_factors(found),
    })
}

fn group_factors(sorted: Vec<Natural>) -> Vec<(Natural, u32)> {
    let mut out: Vec<(Natural, u32)> = Vec::new();
    for p in sorted {
        match out.last_mut() {
            Some((q, a)) if *q == p => *a += 1,
            _ => out.push((p, 1)),
        }
    }
    out
}

/// Largest-exponent representation n = b^k with k >= 2, if one exists.
fn perfect_power(n: &Natural) -> Option<(Natural, u32)> {
    let bits = n.bits() as u32;
    for k in (2..=bits).rev() {
        let root = n.nth_root(k);
        if root.pow(k) == *n {
            return Some((root, k));
        }
    }
    None
}

/// Euler's totient from a factorization.
pub fn euler_phi(f: &Factorization) -> Natural {
    let mut phi = Natural::one();
    for (p, a) in &f.factors {
        phi *= p.pow(a - 1) * (p - 1u32);
    }
    phi
}

/// Smallest l >= 1 with p^l = 1 mod e. Convention: e = 1 returns 1.
pub fn multiplicative_order(p: &Natural, e: &Natural) -> Result<Natural, OrderError> {
    if e.is_one() {
        return Ok(Natural::one());
    }
    if !p.gcd(e).is_one() {
        return Err(OrderError::NotCoprime {
            p: p.clone(),
            e: e.clone(),
        });
    }
    let phi = euler_phi(&factorize(e, DEFAULT_RHO_STEPS)?);
    if phi.is_one() {
        return Ok(Natural::one());
    }
    let phi_factors = factorize(&phi, DEFAULT_RHO_STEPS)?;
    let mut order = phi;
    for (r, _) in &phi_factors.factors {
        while (&order % r).is_zero() && p.modpow(&(&order / r), e).is_one() {
            order /= r;
        }
    }
    Ok(order)
}

/// (q^r - 1) / (q - 1) = 1 + q + ... + q^(r-1), exactly.
///
/// Requires q >= 2 and r >= 1.
pub fn repunit_value(q: &Natural, r: &Natural) -> Natural {
    assert!(q >= &nat(2), "repunit base must be >= 2");
    assert!(!r.is_zero(), "repunit exponent must be >= 1");
    let r32 = r
        .to_u32()
        .expect("repunit exponent out of desk-scale range");
    (q.pow(r32) - 1u32) / (q - 1u32)
}

/// Writes n = p^k with p prime if possible.
pub fn is_prime_power(n: &Natural) -> Option<(Natural, u32)> {
    if n < &nat(2) {
        return None;
    }
    let bits = n.bits() as u32;
    for k in (1..=bits).rev() {
        let root = n.nth_root(k);
        if root.pow(k) == *n && is_prime(&root).is_prime {
            return Some((root, k));
        }
    }
    None
}
