//! Stabilizer chains (base and strong generating set) for permutation
//! groups, built with a deterministic incremental Schreier-Sims.
//!
//! Orbits are extended incrementally and coset representatives are never
//! replaced once discovered, so a fixed generator sequence always
//! reconstructs the identical chain, element enumeration order, and
//! serialized form.

use super::perm::{Perm, PermError};
use crate::numtheory::Natural;
use num_traits::{One, ToPrimitive};
use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Hard degree cap for chain construction.
pub const DEGREE_CAP: usize = 100_000;

#[derive(Debug, Error)]
pub enum GroupError {
    #[error(transparent)]
    Perm(#[from] PermError),
    #[error("degree {0} exceeds cap {DEGREE_CAP}")]
    DegreeTooLarge(usize),
    #[error("generator degree {0} does not match group degree {1}")]
    DegreeMismatch(usize, usize),
}

#[derive(Debug, Clone)]
struct Level {
    point: u32,
    gens: Vec<Perm>,
    /// Orbit of `point` in discovery order; orbit[0] == point.
    orbit: Vec<u32>,
    /// Position in `orbit` per point, or u32::MAX.
    orbit_pos: Vec<u32>,
    /// reps[i] maps `point` to orbit[i].
    reps: Vec<Perm>,
    /// Inverses of reps, kept alongside for sifting.
    rep_invs: Vec<Perm>,
    /// Pairs (orbit index < orbit_done, gen index < gens_done) already
    /// processed as Schreier generators.
    orbit_done: usize,
    gens_done: usize,
}

impl Level {
    fn new(degree: usize, point: u32) -> Level {
        Level {
            point,
            gens: Vec::new(),
            orbit: vec![point],
            orbit_pos: {
                let mut v = vec![u32::MAX; degree];
                v[point as usize] = 0;
                v
            },
            reps: vec![Perm::identity(degree)],
            rep_invs: vec![Perm::identity(degree)],
            orbit_done: 0,
            gens_done: 0,
        }
    }

    /// Extends the orbit to closure under the current generator set.
    fn close_orbit(&mut self) {
        let mut i = 0;
        while i < self.orbit.len() {
            let pt = self.orbit[i];
            for g in &self.gens {
                let img = g.apply(pt);
                if self.orbit_pos[img as usize] == u32::MAX {
                    self.orbit_pos[img as usize] = self.orbit.len() as u32;
                    self.orbit.push(img);
                    let rep = self.reps[i].then(g);
                    self.rep_invs.push(rep.inverse());
                    self.reps.push(rep);
                }
            }
            i += 1;
        }
    }
}

/// A permutation group with base, strong generating set and exact order.
#[derive(Debug, Clone)]
pub struct PermGroup {
    degree: usize,
    gens: Vec<Perm>,
    chain: Vec<Level>,
    order: Natural,
}

impl PermGroup {
    /// The trivial group on `degree` points.
    pub fn trivial(degree: usize) -> PermGroup {
        PermGroup {
            degree,
            gens: Vec::new(),
            chain: Vec::new(),
            order: Natural::one(),
        }
    }

    /// Builds the group generated by `gens`, reconstructing a chain
    /// deterministic in the generator sequence.
    pub fn from_generators(degree: usize, gens: Vec<Perm>) -> Result<PermGroup, GroupError> {
        if degree > DEGREE_CAP {
            return Err(GroupError::DegreeTooLarge(degree));
        }
        let mut g = PermGroup::trivial(degree);
        for gen in gens {
            if gen.degree() != degree {
                return Err(GroupError::DegreeMismatch(gen.degree(), degree));
            }
            g.insert_generator(gen);
        }
        Ok(g)
    }

    /// Group generated by this group's generators plus `extra`.
    pub fn closure_with(&self, extra: &[Perm]) -> PermGroup {
        let mut g = self.clone();
        for e in extra {
            debug_assert_eq!(e.degree(), self.degree);
            g.insert_generator(e.clone());
        }
        g
    }

    /// As [`closure_with`], but stops early once `target` order is
    /// reached. The chain order never overshoots the generated group, so
    /// hitting `target` certifies equality whenever the closure is known
    /// to lie inside a group of that order.
    pub fn closure_reaches(&self, extra: &[Perm], target: &Natural) -> bool {
        let mut g = self.clone();
        if &g.order == target {
            return true;
        }
        for e in extra {
            g.insert_generator(e.clone());
            if &g.order == target {
                return true;
            }
        }
        &g.order == target
    }

    fn insert_generator(&mut self, gen: Perm) {
        if gen.is_identity() {
            return;
        }
        if !self.gens.contains(&gen) {
            self.gens.push(gen.clone());
        }
        let (residue, stop) = self.sift_from(&gen, 0);
        if residue.is_identity() {
            return;
        }
        self.add_strong(0, stop, residue);
        self.drain_pending();
        self.recompute_order();
    }

    fn recompute_order(&mut self) {
        let mut order = Natural::one();
        for level in &self.chain {
            order *= Natural::from(level.orbit.len() as u64);
        }
        self.order = order;
    }

    /// Installs a strong generator at every level it is eligible for: it
    /// fixes the base points of levels < `first` .. < `last`, so it
    /// belongs to the stabilizer groups of levels first..=last. Skipping
    /// intermediate levels would leave their orbits too small.
    fn add_strong(&mut self, first: usize, last: usize, g: Perm) {
        debug_assert!(!g.is_identity());
        for i in first..=last {
            if i == self.chain.len() {
                let base = g.smallest_moved_point().expect("non-identity");
                self.chain.push(Level::new(self.degree, base));
            }
            self.chain[i].gens.push(g.clone());
            self.chain[i].close_orbit();
        }
    }

    /// Processes outstanding Schreier generators level by level until the
    /// whole chain is verified (every orbit point x generator pair sifts
    /// to the identity).
    fn drain_pending(&mut self) {
        loop {
            let Some(level) = (0..self.chain.len()).find(|&l| {
                let lv = &self.chain[l];
                lv.orbit_done < lv.orbit.len() || lv.gens_done < lv.gens.len()
            }) else {
                return;
            };
            let (orbit_len, gens_len, orbit_done, gens_done) = {
                let lv = &self.chain[level];
                (lv.orbit.len(), lv.gens.len(), lv.orbit_done, lv.gens_done)
            };
            // pairs not yet covered: new orbit points against all gens,
            // old orbit points against new gens
            let mut pending: Vec<(usize, usize)> = Vec::new();
            for i in 0..orbit_len {
                let j_start = if i < orbit_done { gens_done } else { 0 };
                for j in j_start..gens_len {
                    pending.push((i, j));
                }
            }
            {
                let lv = &mut self.chain[level];
                lv.orbit_done = orbit_len;
                lv.gens_done = gens_len;
            }
            for (i, j) in pending {
                let schreier = {
                    let lv = &self.chain[level];
                    let img = lv.gens[j].apply(lv.orbit[i]);
                    let pos = lv.orbit_pos[img as usize] as usize;
                    lv.reps[i].then(&lv.gens[j]).then(&lv.rep_invs[pos])
                };
                if schreier.is_identity() {
                    continue;
                }
                let (residue, stop) = self.sift_from(&schreier, level + 1);
                if !residue.is_identity() {
                    // the residue fixes the bases of levels level+1..stop;
                    // deeper levels only grow, so pairs processed earlier
                    // remain sifted
                    self.add_strong(level + 1, stop, residue);
                }
            }
        }
    }

    /// Sifts `g` through levels starting at `start`; returns the residue
    /// and the level where sifting stopped.
    fn sift_from(&self, g: &Perm, start: usize) -> (Perm, usize) {
        let mut h = g.clone();
        for l in start..self.chain.len() {
            let lv = &self.chain[l];
            let img = h.apply(lv.point);
            let pos = lv.orbit_pos[img as usize];
            if pos == u32::MAX {
                return (h, l);
            }
            h = h.then(&lv.rep_invs[pos as usize]);
        }
        (h, self.chain.len())
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn generators(&self) -> &[Perm] {
        &self.gens
    }

    pub fn order(&self) -> &Natural {
        &self.order
    }

    pub fn order_u64(&self) -> Option<u64> {
        self.order.to_u64()
    }

    pub fn is_trivial(&self) -> bool {
        self.order.is_one()
    }

    /// Base points of the stabilizer chain.
    pub fn base(&self) -> Vec<u32> {
        self.chain.iter().map(|l| l.point).collect()
    }

    /// Strong generating set (concatenated level generators).
    pub fn strong_generators(&self) -> Vec<Perm> {
        let mut out = Vec::new();
        for l in &self.chain {
            for g in &l.gens {
                if !out.contains(g) {
                    out.push(g.clone());
                }
            }
        }
        out
    }

    pub fn contains(&self, g: &Perm) -> bool {
        if g.degree() != self.degree {
            return false;
        }
        let (residue, _) = self.sift_from(g, 0);
        residue.is_identity()
    }

    /// True iff the closure of `sub_gens` equals this whole group.
    /// Intended for `sub_gens` drawn from elements of the group.
    pub fn is_generated_by(&self, sub_gens: &[Perm]) -> bool {
        PermGroup::trivial(self.degree).closure_reaches(sub_gens, &self.order)
    }

    /// True iff every generator of `other` lies in this group.
    pub fn contains_group(&self, other: &PermGroup) -> bool {
        other.degree == self.degree && other.gens.iter().all(|g| self.contains(g))
    }

    /// Orbit of a point under the whole group, in discovery order.
    pub fn orbit_of(&self, pt: u32) -> Vec<u32> {
        let mut seen = vec![false; self.degree];
        let mut orbit = vec![pt];
        seen[pt as usize] = true;
        let mut i = 0;
        while i < orbit.len() {
            for g in &self.gens {
                let img = g.apply(orbit[i]);
                if !seen[img as usize] {
                    seen[img as usize] = true;
                    orbit.push(img);
                }
            }
            i += 1;
        }
        orbit
    }

    /// Visits every element exactly once, in the deterministic chain
    /// order. The callback returns false to stop early.
    pub fn for_each_element(&self, mut f: impl FnMut(&Perm) -> bool) {
        let id = Perm::identity(self.degree);
        self.enum_rec(self.chain.len(), &id, &mut f);
    }

    fn enum_rec(&self, level: usize, suffix: &Perm, f: &mut impl FnMut(&Perm) -> bool) -> bool {
        if level == 0 {
            return f(suffix);
        }
        let lv = &self.chain[level - 1];
        for rep in &lv.reps {
            // element = (deeper part) * rep, built deepest-level-first
            let g = suffix.then(rep);
            if !self.enum_rec(level - 1, &g, f) {
                return false;
            }
        }
        true
    }

    /// All elements, materialized. Caller is responsible for scale.
    pub fn elements(&self) -> Vec<Perm> {
        let mut out = Vec::new();
        self.for_each_element(|g| {
            out.push(g.clone());
            true
        });
        out
    }

    /// Exactly uniform random element: product of uniformly chosen coset
    /// representatives down the chain.
    pub fn random_element<R: Rng>(&self, rng: &mut R) -> Perm {
        let mut g = Perm::identity(self.degree);
        for lv in self.chain.iter().rev() {
            let idx = rng.gen_range(0..lv.reps.len());
            g = g.then(&lv.reps[idx]);
        }
        g
    }

    /// Right coset representatives of `h` in this group (h must be a
    /// subgroup). The identity coset comes first.
    pub fn right_coset_reps(&self, h: &PermGroup) -> Vec<Perm> {
        let mut reps: Vec<Perm> = vec![Perm::identity(self.degree)];
        let mut i = 0;
        while i < reps.len() {
            for g in &self.gens {
                let cand = reps[i].then(g);
                if !reps.iter().any(|r| h.contains(&cand.then(&r.inverse()))) {
                    reps.push(cand);
                }
            }
            i += 1;
        }
        reps
    }

    /// Normal closure of `seeds` in this group.
    pub fn normal_closure(&self, seeds: &[Perm]) -> PermGroup {
        let mut n = PermGroup::trivial(self.degree).closure_with(seeds);
        loop {
            let mut new_gens = Vec::new();
            for s in n.generators() {
                for x in &self.gens {
                    let conj = s.conjugate_by(x);
                    if !n.contains(&conj) {
                        new_gens.push(conj);
                    }
                }
            }
            if new_gens.is_empty() {
                return n;
            }
            n = n.closure_with(&new_gens);
        }
    }

    /// Derived subgroup: normal closure of generator commutators.
    pub fn derived_subgroup(&self) -> PermGroup {
        let mut comms = Vec::new();
        for (i, a) in self.gens.iter().enumerate() {
            for b in &self.gens[i + 1..] {
                let c = a.commutator(b);
                if !c.is_identity() {
                    comms.push(c);
                }
            }
        }
        self.normal_closure(&comms)
    }

    pub fn is_abelian(&self) -> bool {
        for (i, a) in self.gens.iter().enumerate() {
            for b in &self.gens[i + 1..] {
                if !a.commutator(b).is_identity() {
                    return false;
                }
            }
        }
        true
    }

    /// True iff the group moves every point of `points` transitively.
    pub fn is_transitive_on(&self, points: &[u32]) -> bool {
        if points.is_empty() {
            return true;
        }
        let orbit = self.orbit_of(points[0]);
        orbit.len() == points.len() && points.iter().all(|p| orbit.contains(p))
    }
}

/// Serialized form: degree, generator image vectors, order (decimal).
#[derive(Debug, Serialize, Deserialize)]
pub struct GroupDoc {
    pub degree: usize,
    pub generators: Vec<Vec<u32>>,
    pub order: String,
}

impl PermGroup {
    pub fn to_doc(&self) -> GroupDoc {
        GroupDoc {
            degree: self.degree,
            generators: self.gens.iter().map(|g| g.images().to_vec()).collect(),
            order: self.order.to_string(),
        }
    }

    pub fn from_doc(doc: &GroupDoc) -> Result<PermGroup, GroupError> {
        let gens: Result<Vec<Perm>, PermError> = doc
            .generators
            .iter()
            .map(|v| Perm::from_images(v.clone()))
            .collect();
        PermGroup::from_generators(doc.degree, gens?)
    }
}
