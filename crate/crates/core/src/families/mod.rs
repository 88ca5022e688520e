//! Rank-1 families, their Borel-subgroup second maximals, and the
//! generator-count formulas: k/l <= d(M) <= k/l + 1 where l is the
//! multiplicative order of p modulo the torus part order e.

mod construct;

pub use construct::{
    agl1, borel_maximal, l2_borel, psl2, suzuki, BorelMaximal, MarkedBorel, AGL1_Q_CAP, PSL2_Q_CAP,
};

use crate::numtheory::{self, nat, Natural};
use crate::permgroup::{
    d_exact, verify_chain, ChainReport, DExactError, GroupError, MaximalityError, PermError,
};
use crate::{ffield, permgroup};
use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    L2,
    Sz,
    Ree,
    Agl1,
}

impl Family {
    pub fn name(&self) -> &'static str {
        match self {
            Family::L2 => "l2",
            Family::Sz => "sz",
            Family::Ree => "ree",
            Family::Agl1 => "agl1",
        }
    }
}

impl std::str::FromStr for Family {
    type Err = String;
    fn from_str(s: &str) -> Result<Family, String> {
        match s.to_ascii_lowercase().as_str() {
            "l2" => Ok(Family::L2),
            "sz" | "suzuki" => Ok(Family::Sz),
            "ree" => Ok(Family::Ree),
            "agl1" => Ok(Family::Agl1),
            other => Err(format!("unknown family '{other}'")),
        }
    }
}

#[derive(Debug, Error)]
pub enum FamiliesError {
    #[error("unsupported construction: {0}")]
    Unsupported(String),
    #[error("family constraint violated: {0}")]
    FamilyConstraintViolated(String),
    #[error("{0} is not a prime divisor of the torus order")]
    NotPrimeIndex(u64),
    #[error("{e} does not divide {modulus}")]
    NotADivisor { e: Natural, modulus: Natural },
    #[error("construction invariant failed: {0}")]
    ConstructionInvariant(String),
    #[error("trichotomy violated at p={p}, k={k}, s={s}: (p^k-1)/(p^l-1) = {value} with l={ell}")]
    TrichotomyViolated {
        p: Natural,
        k: u32,
        s: Natural,
        ell: Natural,
        value: Natural,
    },
    #[error("2^{0} - 1 is not prime")]
    NotMersenne(u32),
    #[error("k = {0} exceeds the full-verification cap 7")]
    ScaleExceeded(u32),
    #[error(transparent)]
    Field(#[from] ffield::FieldError),
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error(transparent)]
    Perm(#[from] PermError),
    #[error(transparent)]
    Maximality(#[from] MaximalityError),
    #[error(transparent)]
    Order(#[from] numtheory::OrderError),
    #[error(transparent)]
    DExact(#[from] DExactError),
    #[error(transparent)]
    Chain(#[from] permgroup::ChainError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TrichotomyCase {
    KEqEll,
    KEq2Ell,
    PrimeCase,
}

impl TrichotomyCase {
    pub fn name(&self) -> &'static str {
        match self {
            TrichotomyCase::KEqEll => "k_eq_ell",
            TrichotomyCase::KEq2Ell => "k_eq_2ell",
            TrichotomyCase::PrimeCase => "prime_case",
        }
    }
}

/// The bound data k/l <= d(M) <= k/l + 1, with an optional oracle value.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BoundReport {
    pub family: Option<Family>,
    #[serde(with = "crate::ser::natstr")]
    pub p: Natural,
    pub k: u32,
    #[serde(with = "crate::ser::natstr")]
    pub e: Natural,
    #[serde(with = "crate::ser::natstr_opt", default)]
    pub s: Option<Natural>,
    #[serde(with = "crate::ser::natstr")]
    pub ell: Natural,
    pub lower: u32,
    pub upper: u32,
    pub trichotomy_case: Option<TrichotomyCase>,
    /// d(M) from the oracle, when it certified an exact value.
    pub oracle_exact: Option<u32>,
    /// Randomized witness size when the oracle could not certify; the
    /// exact value is then undetermined, never silently resolved.
    pub oracle_upper: Option<u32>,
}

impl BoundReport {
    pub fn brackets(&self, d: u32) -> bool {
        self.lower <= d && d <= self.upper
    }
}

/// Bounds for M = F_q.E <= AGL_1(q) with |E| = e dividing q - 1:
/// l = ord_e(p), and k/l <= d(M) <= k/l + 1.
pub fn dm_formula_agl(p: &Natural, k: u32, e: &Natural) -> Result<BoundReport, FamiliesError> {
    if !numtheory::is_prime(p).is_prime {
        return Err(FamiliesError::FamilyConstraintViolated(format!(
            "p = {p} is not prime"
        )));
    }
    if k == 0 {
        return Err(FamiliesError::FamilyConstraintViolated(
            "k must be >= 1".into(),
        ));
    }
    let q_minus_1 = p.pow(k) - 1u32;
    if e.is_zero() || !(&q_minus_1 % e).is_zero() {
        return Err(FamiliesError::NotADivisor {
            e: e.clone(),
            modulus: q_minus_1,
        });
    }
    let ell = numtheory::multiplicative_order(p, e)?;
    let ell_u = ell.to_u32().expect("l <= k");
    // e | p^k - 1 forces l | k; guarded anyway
    if !k.is_multiple_of(ell_u) {
        return Err(FamiliesError::ConstructionInvariant(format!(
            "l = {ell_u} does not divide k = {k}"
        )));
    }
    let lower = k / ell_u;
    Ok(BoundReport {
        family: Some(Family::Agl1),
        p: p.clone(),
        k,
        e: e.clone(),
        s: None,
        ell,
        lower,
        upper: lower + 1,
        trichotomy_case: None,
        oracle_exact: None,
        oracle_upper: None,
    })
}

fn torus_divisor(family: Family, p: &Natural, k: u32) -> Result<u64, FamiliesError> {
    match family {
        Family::L2 => {
            let q = p.pow(k);
            if q < nat(4) {
                return Err(FamiliesError::FamilyConstraintViolated(
                    "L2(q) requires q >= 4".into(),
                ));
            }
            Ok(if (&q % 2u32).is_zero() { 1 } else { 2 })
        }
        Family::Sz => {
            if p != &nat(2) || k < 3 || k.is_multiple_of(2) {
                return Err(FamiliesError::FamilyConstraintViolated(
                    "Sz(q) requires q = 2^k with k odd, k >= 3".into(),
                ));
            }
            Ok(1)
        }
        Family::Ree => {
            // 2G2(3) is not simple; k = 1 is rejected
            if p != &nat(3) || k < 3 || k.is_multiple_of(2) {
                return Err(FamiliesError::FamilyConstraintViolated(
                    "Ree(q) requires q = 3^k with k odd, k >= 3".into(),
                ));
            }
            Ok(1)
        }
        Family::Agl1 => Ok(1),
    }
}

/// Bounds for the Borel second maximal M = U.e of index s, where
/// e = (q - 1)/(d s), plus the trichotomy case.
pub fn dm_formula_borel(
    family: Family,
    p: &Natural,
    k: u32,
    s: &Natural,
) -> Result<BoundReport, FamiliesError> {
    if !numtheory::is_prime(p).is_prime {
        return Err(FamiliesError::FamilyConstraintViolated(format!(
            "p = {p} is not prime"
        )));
    }
    let d = torus_divisor(family, p, k)?;
    let torus_order = (p.pow(k) - 1u32) / Natural::from(d);
    if s.is_zero() || !(&torus_order % s).is_zero() || !numtheory::is_prime(s).is_prime {
        return Err(FamiliesError::NotADivisor {
            e: s.clone(),
            modulus: torus_order,
        });
    }
    let e = &torus_order / s;
    let case = arb_trichotomy(p, k, s, d)?;
    let mut report = dm_formula_agl(p, k, &e)?;
    report.family = Some(family);
    report.s = Some(s.clone());
    report.trichotomy_case = Some(case);
    Ok(report)
}

/// Either k equals l or 2l (whence d(M) <= 3), or (p^k-1)/(p^l-1) = s is
/// prime. Returns `TrichotomyViolated` only on a genuine counterexample.
pub fn arb_trichotomy(
    p: &Natural,
    k: u32,
    s: &Natural,
    d: u64,
) -> Result<TrichotomyCase, FamiliesError> {
    let q_minus_1 = p.pow(k) - 1u32;
    let ds = Natural::from(d) * s;
    if !(&q_minus_1 % &ds).is_zero() {
        return Err(FamiliesError::NotADivisor {
            e: ds,
            modulus: q_minus_1,
        });
    }
    let e = &q_minus_1 / &ds;
    let ell = numtheory::multiplicative_order(p, &e)?;
    let ell_u = ell.to_u32().expect("l <= k");
    if k == ell_u {
        return Ok(TrichotomyCase::KEqEll);
    }
    if k == 2 * ell_u {
        return Ok(TrichotomyCase::KEq2Ell);
    }
    let value = &q_minus_1 / (p.pow(ell_u) - 1u32);
    if &value == s && numtheory::is_prime(&value).is_prime {
        Ok(TrichotomyCase::PrimeCase)
    } else {
        Err(FamiliesError::TrichotomyViolated {
            p: p.clone(),
            k,
            s: s.clone(),
            ell,
            value,
        })
    }
}

/// The Schreier index inequality d(B) - 1 <= [M : B] (d(M) - 1), for a
/// subgroup B of index [M : B] in M.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SchreierCheck {
    pub holds: bool,
    /// index (d_sup - 1) - (d_sub - 1); negative iff the inequality fails.
    pub slack: String,
}

pub fn schreier_check(d_sub: &Natural, index: &Natural, d_sup: &Natural) -> SchreierCheck {
    let one = BigInt::one();
    let lhs = BigInt::from(d_sub.clone()) - &one;
    let rhs = BigInt::from(index.clone()) * (BigInt::from(d_sup.clone()) - &one);
    let slack = rhs - lhs;
    SchreierCheck {
        holds: !slack.is_negative(),
        slack: slack.to_string(),
    }
}

/// Report for the chain (Z_2)^k < B < L_2(2^k) when 2^k - 1 is prime.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MersenneChain {
    pub k: u32,
    pub chain: ChainReport,
    pub d_of_m: u32,
}

/// Verifies both maximality links of (Z_2)^k < B < L_2(2^k) and computes
/// d(M) = k exactly. Requires 2^k - 1 prime and k <= 7.
pub fn mersenne_second_maximal(k: u32) -> Result<MersenneChain, FamiliesError> {
    if k < 2 || !numtheory::is_prime_u64((1u64 << k) - 1) {
        return Err(FamiliesError::NotMersenne(k));
    }
    if k > 7 {
        return Err(FamiliesError::ScaleExceeded(k));
    }
    let q = 1u64 << k;
    let mb = l2_borel(q)?;
    let s = q - 1; // prime, so M = U.1 = U
    let m = borel_maximal(&mb, s)?;
    debug_assert_eq!(m.e, 1);
    let chain = verify_chain(
        &[m.group.clone(), mb.borel.clone(), mb.ambient.clone()],
        &[],
    )?;
    let d = d_exact(&m.group, permgroup::D_CAP_MAX)?;
    Ok(MersenneChain {
        k,
        chain,
        d_of_m: d.d as u32,
    })
}

/// Every (family, p, k, s) with p^k <= max_q and s a prime divisor of
/// the torus order (q - 1)/d, in canonical order. This is the scan grid
/// for the trichotomy and bound sweeps.
pub fn trichotomy_grid(max_q: u64) -> Vec<(Family, u64, u32, u64)> {
    let mut out = Vec::new();
    for p in numtheory::sieve_primes(max_q) {
        let mut k = 1u32;
        let mut q = p;
        loop {
            for family in [Family::L2, Family::Sz, Family::Ree] {
                let valid = match family {
                    Family::L2 => q >= 4,
                    Family::Sz => p == 2 && k >= 3 && k % 2 == 1,
                    Family::Ree => p == 3 && k >= 3 && k % 2 == 1,
                    Family::Agl1 => false,
                };
                if !valid {
                    continue;
                }
                let d = if family == Family::L2 && q % 2 == 1 {
                    2
                } else {
                    1
                };
                for s in prime_divisors_u64((q - 1) / d) {
                    out.push((family, p, k, s));
                }
            }
            match q.checked_mul(p).filter(|&next| next <= max_q) {
                Some(next) => {
                    q = next;
                    k += 1;
                }
                None => break,
            }
        }
    }
    out
}

fn prime_divisors_u64(n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut m = n;
    let mut d = 2;
    while d * d <= m {
        if m.is_multiple_of(d) {
            out.push(d);
            while m.is_multiple_of(d) {
                m /= d;
            }
        }
        d += 1;
    }
    if m > 1 {
        out.push(m);
    }
    out
}

/// The chain (S_2)^6.S_4 < S_2 wr PGL_2(5) < S_2 wr S_6 < S_12, with its
/// per-link assumptions and the base group (S_2)^6.
#[derive(Debug, Clone)]
pub struct ThirdMaximalChain {
    /// Ascending: M, the two wreath products, S_12.
    pub chain: Vec<permgroup::PermGroup>,
    pub assumptions: Vec<(usize, String)>,
    pub base: permgroup::PermGroup,
}

/// Builds the chain on the six pairs {2i, 2i+1}; the two lower links are
/// sweep-checkable and the top link carries a classification citation.
pub fn third_maximal_chain_s12() -> Result<ThirdMaximalChain, FamiliesError> {
    use permgroup::{Perm, PermGroup};
    let n = 12usize;
    // a top permutation of the 6 pairs, lifted to the 12 points
    let lift = |top: &Perm| -> Perm {
        let mut images = vec![0u32; n];
        for i in 0..6u32 {
            let img = top.apply(i);
            images[(2 * i) as usize] = 2 * img;
            images[(2 * i + 1) as usize] = 2 * img + 1;
        }
        Perm::from_images(images).expect("lift of a bijection")
    };
    let swap = Perm::from_cycles(n, &[&[0, 1]])?;

    // PGL_2(5) on the six pair labels 0 = infinity, 1 + t = t
    let pgl_top = vec![
        Perm::from_cycles(6, &[&[1, 2, 3, 4, 5]])?,
        Perm::from_cycles(6, &[&[2, 3, 5, 4]])?,
        Perm::from_cycles(6, &[&[0, 1], &[3, 4]])?,
    ];
    let pgl = PermGroup::from_generators(6, pgl_top.clone())?;
    if pgl.order() != &nat(120) {
        return Err(FamiliesError::ConstructionInvariant(
            "PGL2(5) should have order 120".into(),
        ));
    }

    // deterministic S4 inside PGL2(5): first generator pair (in element
    // order) spanning a subgroup of order 24
    let elements = pgl.elements();
    let mut s4_top: Option<(Perm, Perm)> = None;
    'search: for a in &elements {
        for b in &elements {
            if PermGroup::trivial(6)
                .closure_with(&[a.clone(), b.clone()])
                .order()
                == &nat(24)
            {
                s4_top = Some((a.clone(), b.clone()));
                break 'search;
            }
        }
    }
    let (s4_a, s4_b) = s4_top.ok_or_else(|| {
        FamiliesError::ConstructionInvariant("PGL2(5) contains S4 subgroups".into())
    })?;

    let s6_top = [
        Perm::from_cycles(6, &[&[0, 1]])?,
        Perm::from_cycles(6, &[&(0..6).collect::<Vec<u32>>()])?,
    ];

    let m = PermGroup::from_generators(n, vec![swap.clone(), lift(&s4_a), lift(&s4_b)])?;
    let wr_pgl = PermGroup::from_generators(
        n,
        std::iter::once(swap.clone())
            .chain(pgl_top.iter().map(&lift))
            .collect(),
    )?;
    let wr_s6 = PermGroup::from_generators(
        n,
        std::iter::once(swap.clone())
            .chain(s6_top.iter().map(&lift))
            .collect(),
    )?;
    let s12 = {
        let t = Perm::from_cycles(n, &[&[0, 1]])?;
        let c = Perm::from_cycles(n, &[&(0..n as u32).collect::<Vec<u32>>()])?;
        PermGroup::from_generators(n, vec![t, c])?
    };
    for (g, expected) in [(&m, 1536u64), (&wr_pgl, 7680), (&wr_s6, 46080)] {
        if g.order() != &Natural::from(expected) {
            return Err(FamiliesError::ConstructionInvariant(format!(
                "chain group should have order {expected}, got {}",
                g.order()
            )));
        }
    }
    let base = {
        let swaps: Vec<Perm> = (0..6)
            .map(|i| Perm::from_cycles(n, &[&[2 * i, 2 * i + 1]]).expect("pair swap"))
            .collect();
        PermGroup::from_generators(n, swaps)?
    };
    let assumptions = vec![(
        2usize,
        "Liebeck-Praeger-Saxl classification: the imprimitive wreath product S2 wr S6 is maximal in S12"
            .to_string(),
    )];
    Ok(ThirdMaximalChain {
        chain: vec![m, wr_pgl, wr_s6, s12],
        assumptions,
        base,
    })
}

/// Oracle pass: build M = U.e inside the marked Borel and run d_exact,
/// recording either the certified value or the undetermined upper bound.
pub fn attach_oracle(
    report: &mut BoundReport,
    mb: &MarkedBorel,
    e: u64,
) -> Result<(), FamiliesError> {
    let m = mb.torus_power_subgroup(e)?;
    match d_exact(&m, permgroup::D_CAP_MAX) {
        Ok(res) => {
            report.oracle_exact = Some(res.d as u32);
            Ok(())
        }
        Err(DExactError::ScaleExceeded {
            randomized_upper, ..
        }) => {
            report.oracle_upper = randomized_upper.map(|u| u as u32);
            Ok(())
        }
        Err(e) => Err(e.into()),
    }
}
