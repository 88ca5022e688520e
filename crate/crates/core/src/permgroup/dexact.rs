//! Exact minimal generator counts.
//!
//! `d_lower_bound` is the elementary-abelian quotient rank: for each prime
//! p dividing |G/G'|, the p-rank of G/G'G^p. `d_exact` finds the least d
//! such that some d-tuple generates, certifying the lower side either by
//! that rank bound, by non-cyclicity (d = 1 refutations), or by an
//! exhaustive pruned tuple search over a small-group multiplication
//! structure.
//!
//! Search strategy for the exhaustive phase: the first tuple entry ranges
//! over conjugacy class representatives only (generation is invariant
//! under conjugating a whole tuple); each later entry skips the right
//! cosets of the partial closure already tried (<H, hy> = <H, y>); and
//! subgroup nodes are memoized, so the tree visits each intermediate
//! subgroup once per remaining depth.

use super::group::PermGroup;
use super::perm::Perm;
use crate::numtheory::Natural;
use num_traits::ToPrimitive;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use serde::{Deserialize, Serialize};
use std::collections::HashMap;
use thiserror::Error;

/// Exhaustive tuple searches refuse groups larger than this.
pub const EXHAUSTIVE_ORDER_CAP: u64 = 100_000;
/// The index-based engine materializes groups up to this order.
pub const ENGINE_ORDER_CAP: u64 = 8_192;
/// d_lower_bound order cap.
pub const LOWER_BOUND_ORDER_CAP: u64 = 1_000_000;
/// Largest admissible d_cap.
pub const D_CAP_MAX: usize = 8;

const RANDOM_ATTEMPTS: usize = 512;
const RANDOM_ATTEMPTS_ABELIAN: usize = 20_000;
const D_EXACT_SEED: u64 = 0x5eed_0001;

#[derive(Debug, Error)]
pub enum DExactError {
    #[error("d_cap {0} exceeds the supported maximum {D_CAP_MAX}")]
    CapTooLarge(usize),
    #[error("no tuple of size <= {d_cap} generates")]
    CapExceeded { d_cap: usize },
    #[error("group order {order} too large for the exhaustive phase")]
    ScaleExceeded {
        order: Natural,
        randomized_upper: Option<usize>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DCertificate {
    /// d(1) = 0 by convention.
    TrivialGroup,
    /// Abelian group: d equals the elementary-abelian quotient rank.
    AbelianRank,
    /// Witness size met d_lower_bound (or 2 with a non-abelian group).
    LowerBoundMet,
    /// Every smaller tuple size was exhaustively refuted.
    Exhaustive,
}

#[derive(Debug, Clone)]
pub struct DExact {
    pub d: usize,
    pub witness: Vec<Perm>,
    pub certificate: DCertificate,
}

/// max over primes p | |G/G'| of the p-rank of G/G'G^p; always <= d(G).
/// Returns 1 for nontrivial perfect groups and 0 for the trivial group.
pub fn d_lower_bound(g: &PermGroup) -> Result<usize, DExactError> {
    let order = g
        .order_u64()
        .filter(|&o| o <= LOWER_BOUND_ORDER_CAP)
        .ok_or_else(|| DExactError::ScaleExceeded {
            order: g.order().clone(),
            randomized_upper: None,
        })?;
    if order == 1 {
        return Ok(0);
    }
    let derived = g.derived_subgroup();
    let ab_order = (g.order() / derived.order()).to_u64().expect("index fits");
    if ab_order == 1 {
        return Ok(1);
    }
    let mut best = 1usize;
    let mut m = ab_order;
    let mut p = 2u64;
    let mut primes = Vec::new();
    while p * p <= m {
        if m.is_multiple_of(p) {
            primes.push(p);
            while m.is_multiple_of(p) {
                m /= p;
            }
        }
        p += 1;
    }
    if m > 1 {
        primes.push(m);
    }
    for p in primes {
        // G'G^p: contains G' and, modulo G', is generated by generator
        // p-th powers (the quotient is abelian, so no further closure is
        // needed and the subgroup is automatically normal).
        let mut gens: Vec<Perm> = derived.generators().to_vec();
        for x in g.generators() {
            gens.push(x.power(p));
        }
        let k = PermGroup::trivial(g.degree()).closure_with(&gens);
        let index = (g.order() / k.order()).to_u64().expect("index fits");
        let mut rank = 0usize;
        let mut idx = index;
        while idx > 1 {
            debug_assert_eq!(idx % p, 0, "index of G'G^p must be a p-power");
            idx /= p;
            rank += 1;
        }
        best = best.max(rank);
    }
    Ok(best)
}

/// The least d <= d_cap such that some d-tuple generates, with a witness.
pub fn d_exact(g: &PermGroup, d_cap: usize) -> Result<DExact, DExactError> {
    if d_cap > D_CAP_MAX {
        return Err(DExactError::CapTooLarge(d_cap));
    }
    if g.is_trivial() {
        return Ok(DExact {
            d: 0,
            witness: Vec::new(),
            certificate: DCertificate::TrivialGroup,
        });
    }

    let lb = if g.order_u64().is_some_and(|o| o <= LOWER_BOUND_ORDER_CAP) {
        d_lower_bound(g)?
    } else {
        1
    };
    if lb > d_cap {
        return Err(DExactError::CapExceeded { d_cap });
    }

    let abelian = g.is_abelian();
    let mut rng = ChaCha12Rng::seed_from_u64(D_EXACT_SEED);

    if abelian {
        // d equals the rank bound exactly for abelian groups.
        for _ in 0..RANDOM_ATTEMPTS_ABELIAN {
            let tuple: Vec<Perm> = (0..lb).map(|_| g.random_element(&mut rng)).collect();
            if g.is_generated_by(&tuple) {
                return Ok(DExact {
                    d: lb,
                    witness: tuple,
                    certificate: DCertificate::AbelianRank,
                });
            }
        }
        // fall through to the generic search in the (practically
        // unreachable) event randomization missed
    }

    // non-cyclic groups need at least 2 generators
    let effective_lb = if !abelian { lb.max(2) } else { lb };
    if effective_lb > d_cap {
        return Err(DExactError::CapExceeded { d_cap });
    }

    // randomized upper-bound witness search, cheapest first
    let mut upper: Option<(usize, Vec<Perm>)> = None;
    for t in effective_lb..=d_cap {
        for _ in 0..RANDOM_ATTEMPTS {
            let tuple: Vec<Perm> = (0..t).map(|_| g.random_element(&mut rng)).collect();
            if g.is_generated_by(&tuple) {
                upper = Some((t, tuple));
                break;
            }
        }
        if upper.is_some() {
            break;
        }
    }

    if let Some((t, witness)) = &upper {
        if *t == effective_lb {
            // lb met, or d = 1 refuted outright by non-cyclicity
            let certificate = if abelian {
                DCertificate::AbelianRank
            } else {
                DCertificate::LowerBoundMet
            };
            return Ok(DExact {
                d: *t,
                witness: witness.clone(),
                certificate,
            });
        }
    }

    // exhaustive phase: find-or-refute each level from effective_lb up
    let order = g
        .order_u64()
        .filter(|&o| o <= EXHAUSTIVE_ORDER_CAP)
        .ok_or_else(|| DExactError::ScaleExceeded {
            order: g.order().clone(),
            randomized_upper: upper.as_ref().map(|(t, _)| *t),
        })?;

    let top = match &upper {
        Some((t, _)) => t - 1,
        None => d_cap,
    };

    for t in effective_lb..=top {
        if t == 1 {
            // cyclic scan: some element of order |G|
            if let Some(w) = cyclic_generator(g) {
                return Ok(DExact {
                    d: 1,
                    witness: vec![w],
                    certificate: DCertificate::Exhaustive,
                });
            }
            continue;
        }
        if order > ENGINE_ORDER_CAP {
            return Err(DExactError::ScaleExceeded {
                order: g.order().clone(),
                randomized_upper: upper.as_ref().map(|(t, _)| *t),
            });
        }
        let engine = SmallGroup::build(g);
        if let Some(witness) = engine.search_level(t) {
            return Ok(DExact {
                d: t,
                witness,
                certificate: DCertificate::Exhaustive,
            });
        }
    }

    match upper {
        Some((t, witness)) => Ok(DExact {
            d: t,
            witness,
            certificate: DCertificate::Exhaustive,
        }),
        None => Err(DExactError::CapExceeded { d_cap }),
    }
}

fn cyclic_generator(g: &PermGroup) -> Option<Perm> {
    if !g.is_abelian() {
        return None;
    }
    let target = g.order().clone();
    let mut found = None;
    g.for_each_element(|el| {
        if el.order() == target {
            found = Some(el.clone());
            false
        } else {
            true
        }
    });
    found
}

// --- index-based small group engine ---

#[derive(Clone, PartialEq, Eq, Hash)]
struct BitSet {
    words: Vec<u64>,
    count: u32,
}

impl BitSet {
    fn new(n: usize) -> BitSet {
        BitSet {
            words: vec![0; n.div_ceil(64)],
            count: 0,
        }
    }

    #[inline]
    fn contains(&self, i: u32) -> bool {
        self.words[(i >> 6) as usize] & (1u64 << (i & 63)) != 0
    }

    #[inline]
    fn insert(&mut self, i: u32) -> bool {
        let w = &mut self.words[(i >> 6) as usize];
        let bit = 1u64 << (i & 63);
        if *w & bit == 0 {
            *w |= bit;
            self.count += 1;
            true
        } else {
            false
        }
    }

    fn iter(&self) -> impl Iterator<Item = u32> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &w)| {
            let mut bits = w;
            std::iter::from_fn(move || {
                if bits == 0 {
                    None
                } else {
                    let b = bits.trailing_zeros();
                    bits &= bits - 1;
                    Some((wi as u32) * 64 + b)
                }
            })
        })
    }
}

/// Element-indexed view of a group of order <= ENGINE_ORDER_CAP.
/// Products are computed through base images, so multiplying two indices
/// costs O(|base|) array lookups.
struct SmallGroup {
    n: u32,
    elements: Vec<Perm>,
    base: Vec<u32>,
    strides: Vec<u64>,
    /// dense composite-key table, or a hash map fallback
    dense: Option<Vec<u32>>,
    sparse: HashMap<u64, u32>,
    inv: Vec<u32>,
    gen_idx: Vec<u32>,
    class_reps: Vec<u32>,
}

impl SmallGroup {
    fn build(g: &PermGroup) -> SmallGroup {
        let mut elements = g.elements();
        elements.sort_unstable();
        // identity has the lexicographically least image vector
        debug_assert!(elements[0].is_identity());
        let n = elements.len() as u32;
        let base = g.base();
        let degree = g.degree() as u64;
        let mut strides = Vec::with_capacity(base.len());
        let mut acc = 1u64;
        let mut dense_ok = true;
        for _ in &base {
            strides.push(acc);
            acc = acc.saturating_mul(degree);
            if acc > (1 << 26) {
                dense_ok = false;
            }
        }
        let mut dense = if dense_ok {
            Some(vec![u32::MAX; acc as usize])
        } else {
            None
        };
        let mut sparse = HashMap::new();
        for (i, el) in elements.iter().enumerate() {
            let key = Self::key_parts(&base, &strides, |pt| el.apply(pt));
            match &mut dense {
                Some(table) => table[key as usize] = i as u32,
                None => {
                    sparse.insert(key, i as u32);
                }
            }
        }
        let mut sg = SmallGroup {
            n,
            elements,
            base,
            strides,
            dense,
            sparse,
            inv: Vec::new(),
            gen_idx: Vec::new(),
            class_reps: Vec::new(),
        };
        sg.inv = (0..n)
            .map(|i| sg.index_of(&sg.elements[i as usize].inverse()))
            .collect();
        sg.gen_idx = g.generators().iter().map(|p| sg.index_of(p)).collect();
        sg.class_reps = sg.compute_class_reps();
        sg
    }

    fn key_parts(base: &[u32], strides: &[u64], img: impl Fn(u32) -> u32) -> u64 {
        base.iter()
            .zip(strides)
            .map(|(&b, &s)| img(b) as u64 * s)
            .sum()
    }

    fn index_of(&self, p: &Perm) -> u32 {
        let key = Self::key_parts(&self.base, &self.strides, |pt| p.apply(pt));
        match &self.dense {
            Some(table) => table[key as usize],
            None => self.sparse[&key],
        }
    }

    /// index of elements[a] * elements[b] (a first, then b)
    #[inline]
    fn prod(&self, a: u32, b: u32) -> u32 {
        let pa = &self.elements[a as usize];
        let pb = &self.elements[b as usize];
        let key = self
            .base
            .iter()
            .zip(&self.strides)
            .map(|(&pt, &s)| pb.apply(pa.apply(pt)) as u64 * s)
            .sum::<u64>();
        match &self.dense {
            Some(table) => table[key as usize],
            None => self.sparse[&key],
        }
    }

    fn compute_class_reps(&self) -> Vec<u32> {
        let mut seen = BitSet::new(self.n as usize);
        let mut reps = Vec::new();
        for x in 0..self.n {
            if seen.contains(x) {
                continue;
            }
            reps.push(x);
            // orbit of x under conjugation by the group generators
            let mut queue = vec![x];
            seen.insert(x);
            while let Some(y) = queue.pop() {
                for &gi in &self.gen_idx {
                    let c = self.prod(self.prod(self.inv[gi as usize], y), gi);
                    if seen.insert(c) {
                        queue.push(c);
                    }
                }
            }
        }
        reps
    }

    /// Subgroup generated by the given element indices (BFS from the
    /// identity under right multiplication).
    fn closure(&self, gens: &[u32]) -> BitSet {
        let mut set = BitSet::new(self.n as usize);
        set.insert(0);
        let mut queue = vec![0u32];
        while let Some(x) = queue.pop() {
            for &gi in gens {
                let y = self.prod(x, gi);
                if set.insert(y) {
                    queue.push(y);
                }
            }
        }
        set
    }

    /// Finds a generating tuple of size exactly `t >= 2`, or refutes.
    fn search_level(&self, t: usize) -> Option<Vec<Perm>> {
        let mut memo: HashMap<Vec<u64>, u8> = HashMap::new();
        for &c in &self.class_reps {
            if c == 0 {
                continue; // identity never helps at the first slot
            }
            let gens = vec![c];
            let set = self.closure(&gens);
            if let Some(mut tail) = self.reach(&set, &gens, t - 1, &mut memo) {
                tail.insert(0, c);
                return Some(
                    tail.into_iter()
                        .map(|i| self.elements[i as usize].clone())
                        .collect(),
                );
            }
        }
        None
    }

    /// Can `h` be extended to the full group with at most `j` more
    /// elements? Returns the extension on success.
    fn reach(
        &self,
        h: &BitSet,
        h_gens: &[u32],
        j: usize,
        memo: &mut HashMap<Vec<u64>, u8>,
    ) -> Option<Vec<u32>> {
        if h.count == self.n {
            // pad the remaining slots with the identity
            return Some(vec![0; j]);
        }
        if j == 0 {
            return None;
        }
        if let Some(&refuted) = memo.get(&h.words) {
            if refuted as usize >= j {
                return None;
            }
        }
        let mut marked = h.clone();
        for y in 1..self.n {
            if marked.contains(y) {
                continue;
            }
            let mut gens = h_gens.to_vec();
            gens.push(y);
            let set = self.closure(&gens);
            if let Some(mut tail) = self.reach(&set, &gens, j - 1, memo) {
                tail.insert(0, y);
                return Some(tail);
            }
            // skip the whole right coset H*y: <H, hy> = <H, y>
            for hh in h.iter() {
                marked.insert(self.prod(hh, y));
            }
        }
        let entry = memo.entry(h.words.clone()).or_insert(0);
        *entry = (*entry).max(j as u8);
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numtheory::nat;
    use std::collections::HashSet;

    fn sym(n: usize) -> PermGroup {
        let t = Perm::from_cycles(n, &[&[0, 1]]).unwrap();
        let c = Perm::from_cycles(n, &[&(0..n as u32).collect::<Vec<_>>()]).unwrap();
        PermGroup::from_generators(n, vec![t, c]).unwrap()
    }

    fn elementary_abelian_2_5() -> PermGroup {
        // five commuting double transpositions on 10 points
        let gens: Vec<Perm> = (0..5)
            .map(|i| Perm::from_cycles(10, &[&[2 * i, 2 * i + 1]]).unwrap())
            .collect();
        PermGroup::from_generators(10, gens).unwrap()
    }

    /// Independent oracle: smallest d by brute force over all tuples,
    /// with plain hash-set closure (no stabilizer chains).
    fn brute_d(g: &PermGroup, cap: usize) -> usize {
        let elements = g.elements();
        let target = elements.len();
        if target == 1 {
            return 0;
        }
        fn closure_size(gens: &[&Perm]) -> usize {
            let degree = gens[0].degree();
            let mut set = HashSet::new();
            set.insert(Perm::identity(degree));
            let mut queue = vec![Perm::identity(degree)];
            while let Some(x) = queue.pop() {
                for g in gens {
                    let y = x.then(g);
                    if set.insert(y.clone()) {
                        queue.push(y);
                    }
                }
            }
            set.len()
        }
        for d in 1..=cap {
            let mut idx = vec![0usize; d];
            loop {
                let tuple: Vec<&Perm> = idx.iter().map(|&i| &elements[i]).collect();
                if closure_size(&tuple) == target {
                    return d;
                }
                // odometer
                let mut pos = 0;
                loop {
                    idx[pos] += 1;
                    if idx[pos] < elements.len() {
                        break;
                    }
                    idx[pos] = 0;
                    pos += 1;
                    if pos == d {
                        break;
                    }
                }
                if pos == d {
                    break;
                }
            }
        }
        unreachable!("cap too small for brute force")
    }

    #[test]
    fn trivial_group_needs_zero() {
        let g = PermGroup::trivial(3);
        let r = d_exact(&g, 4).unwrap();
        assert_eq!(r.d, 0);
        assert!(r.witness.is_empty());
    }

    #[test]
    fn elementary_abelian_rank_five() {
        let g = elementary_abelian_2_5();
        assert_eq!(g.order(), &nat(32));
        assert_eq!(d_lower_bound(&g).unwrap(), 5);
        let r = d_exact(&g, 6).unwrap();
        assert_eq!(r.d, 5);
        assert!(g.is_generated_by(&r.witness));
        assert_eq!(r.witness.len(), 5);
    }

    #[test]
    fn s4_lower_bound_is_one_exact_two() {
        let g = sym(4);
        assert_eq!(d_lower_bound(&g).unwrap(), 1);
        let r = d_exact(&g, 4).unwrap();
        assert_eq!(r.d, 2);
        assert!(g.is_generated_by(&r.witness));
    }

    #[test]
    fn exact_matches_brute_force_on_small_groups() {
        // groups small enough for the independent oracle
        let c6 = PermGroup::from_generators(
            6,
            vec![Perm::from_cycles(6, &[&[0, 1, 2, 3, 4, 5]]).unwrap()],
        )
        .unwrap();
        let v4 = PermGroup::from_generators(
            4,
            vec![
                Perm::from_cycles(4, &[&[0, 1], &[2, 3]]).unwrap(),
                Perm::from_cycles(4, &[&[0, 2], &[1, 3]]).unwrap(),
            ],
        )
        .unwrap();
        let s3 = sym(3);
        let a4 = PermGroup::from_generators(
            4,
            vec![
                Perm::from_cycles(4, &[&[0, 1, 2]]).unwrap(),
                Perm::from_cycles(4, &[&[1, 2, 3]]).unwrap(),
            ],
        )
        .unwrap();
        let d8 = PermGroup::from_generators(
            4,
            vec![
                Perm::from_cycles(4, &[&[0, 1, 2, 3]]).unwrap(),
                Perm::from_cycles(4, &[&[1, 3]]).unwrap(),
            ],
        )
        .unwrap();
        for g in [c6, v4, s3, a4, d8] {
            let expected = brute_d(&g, 3);
            let got = d_exact(&g, 4).unwrap();
            assert_eq!(got.d, expected, "order {}", g.order());
            assert!(g.is_generated_by(&got.witness));
        }
    }

    #[test]
    fn dihedral_16_needs_two() {
        let d16 = PermGroup::from_generators(
            8,
            vec![
                Perm::from_cycles(8, &[&[0, 1, 2, 3, 4, 5, 6, 7]]).unwrap(),
                Perm::from_cycles(8, &[&[1, 7], &[2, 6], &[3, 5]]).unwrap(),
            ],
        )
        .unwrap();
        let r = d_exact(&d16, 4).unwrap();
        assert_eq!(r.d, 2);
    }

    #[test]
    fn lower_bound_never_exceeds_exact() {
        for g in [sym(4), sym(5), elementary_abelian_2_5()] {
            let lb = d_lower_bound(&g).unwrap();
            let ex = d_exact(&g, 6).unwrap();
            assert!(lb <= ex.d);
        }
    }

    #[test]
    fn cap_exceeded_when_too_small() {
        let g = elementary_abelian_2_5();
        assert!(matches!(
            d_exact(&g, 3),
            Err(DExactError::CapExceeded { .. })
        ));
    }
}
