//! Finite modules over F_p given by acting matrices: submodule lattices,
//! maximal-submodule counting against the radical bound, the fully
//! deleted permutation module, and cyclic-generator search.
//!
//! The radical is taken as the intersection of the enumerated maximal
//! submodules. At this scale the brute-force definition is the most
//! trustworthy oracle, and the counting bound is stated exactly about
//! that intersection's quotient.

mod catalogue;
mod linalg;

pub use catalogue::{sn_maximal_catalogue, CatalogueEntry};
pub use linalg::{Matrix, Vector};

use crate::numtheory::{self, Natural};
use crate::permgroup::Perm;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Vector-enumeration cap: p^dim must stay below this.
pub const VECTOR_SPACE_CAP: u64 = 1 << 16;
/// Lattice-size guard for pathological inputs.
pub const SUBMODULE_COUNT_CAP: usize = 200_000;

#[derive(Debug, Error)]
pub enum ModlatError {
    #[error("p^dim = {0} exceeds the enumeration cap 2^16")]
    CapExceeded(String),
    #[error("submodule lattice exceeds {SUBMODULE_COUNT_CAP} members")]
    LatticeTooLarge,
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("actor matrix has wrong shape: expected {dim}x{dim}")]
    BadActor { dim: usize },
    #[error("fully deleted module requires n >= 3, got {0}")]
    BadDegree(usize),
}

/// A finite F_p-module: dimension plus the acting matrices (images of
/// the algebra or group generators), rows = images of basis vectors.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FpModule {
    pub p: u64,
    pub dim: usize,
    pub actors: Vec<Matrix>,
}

impl FpModule {
    pub fn new(p: u64, dim: usize, actors: Vec<Matrix>) -> Result<FpModule, ModlatError> {
        if !numtheory::is_prime_u64(p) {
            return Err(ModlatError::NotPrime(p));
        }
        for a in &actors {
            if a.len() != dim || a.iter().any(|row| row.len() != dim) {
                return Err(ModlatError::BadActor { dim });
            }
        }
        let actors = actors
            .into_iter()
            .map(|a| {
                a.into_iter()
                    .map(|row| row.into_iter().map(|x| x % p).collect())
                    .collect()
            })
            .collect();
        Ok(FpModule { p, dim, actors })
    }

    fn check_cap(&self) -> Result<u64, ModlatError> {
        let mut size = 1u64;
        for _ in 0..self.dim {
            size = size
                .checked_mul(self.p)
                .filter(|&s| s <= VECTOR_SPACE_CAP)
                .ok_or_else(|| ModlatError::CapExceeded(format!("{}^{}", self.p, self.dim)))?;
        }
        Ok(size)
    }
}

/// An actor-invariant subspace, held as a canonical echelon basis.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Submodule {
    pub basis: Matrix,
}

impl Submodule {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn contains(&self, other: &Submodule, p: u64) -> bool {
        linalg::contains_space(&self.basis, &other.basis, p)
    }
}

/// The cyclic submodule generated by v under the given actors (the
/// module itself is closed under the identity, so v is included).
fn spin(v: &[u64], actors: &[Matrix], p: u64) -> Matrix {
    let mut basis: Matrix = Vec::new();
    linalg::extend_basis(&mut basis, v, p);
    loop {
        let mut grew = false;
        let snapshot = basis.clone();
        for b in &snapshot {
            for a in actors {
                let img = linalg::apply(b, a, p);
                if linalg::extend_basis(&mut basis, &img, p) {
                    grew = true;
                }
            }
        }
        if !grew {
            return basis;
        }
    }
}

/// Every actor-invariant subspace, canonical and sorted; includes the
/// zero and full submodules.
pub fn all_submodules(module: &FpModule) -> Result<Vec<Submodule>, ModlatError> {
    let size = module.check_cap()?;
    let p = module.p;
    let mut seen: std::collections::HashSet<Matrix> = std::collections::HashSet::new();
    seen.insert(Vec::new()); // zero module
                             // cyclic submodules seed the lattice
    for idx in 1..size {
        let v = linalg::vector_from_index(idx, module.dim, p);
        let cyc = spin(&v, &module.actors, p);
        seen.insert(cyc);
        if seen.len() > SUBMODULE_COUNT_CAP {
            return Err(ModlatError::LatticeTooLarge);
        }
    }
    // close under pairwise joins
    let mut items: Vec<Matrix> = seen.iter().cloned().collect();
    loop {
        let mut new_items = Vec::new();
        for i in 0..items.len() {
            for j in i + 1..items.len() {
                let joined = linalg::join(&items[i], &items[j], p);
                if !seen.contains(&joined) {
                    seen.insert(joined.clone());
                    new_items.push(joined);
                    if seen.len() > SUBMODULE_COUNT_CAP {
                        return Err(ModlatError::LatticeTooLarge);
                    }
                }
            }
        }
        if new_items.is_empty() {
            break;
        }
        items.extend(new_items);
    }
    let mut out: Vec<Submodule> = seen.into_iter().map(|basis| Submodule { basis }).collect();
    out.sort_by(|a, b| (a.dim(), &a.basis).cmp(&(b.dim(), &b.basis)));
    Ok(out)
}

/// Maximal elements of the proper-submodule poset.
pub fn maximal_submodules(module: &FpModule) -> Result<Vec<Submodule>, ModlatError> {
    let all = all_submodules(module)?;
    let full_dim = module.dim;
    let proper: Vec<&Submodule> = all.iter().filter(|s| s.dim() < full_dim).collect();
    let mut out = Vec::new();
    'outer: for s in &proper {
        for t in &proper {
            if t.dim() > s.dim() && t.contains(s, module.p) {
                continue 'outer;
            }
        }
        out.push((*s).clone());
    }
    Ok(out)
}

/// Jacobson radical: intersection of all maximal submodules (the whole
/// module if there are none, which happens only for the zero module).
pub fn radical(module: &FpModule) -> Result<Submodule, ModlatError> {
    let maximals = maximal_submodules(module)?;
    let full: Matrix = (0..module.dim)
        .map(|i| {
            let mut row = vec![0u64; module.dim];
            row[i] = 1;
            row
        })
        .collect();
    let mut acc = full;
    for m in &maximals {
        acc = linalg::intersect(&acc, &m.basis, module.dim, module.p);
    }
    Ok(Submodule { basis: acc })
}

/// The counting bound: at most |M/JM| - 1 maximal submodules.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SubmoduleCountReport {
    pub p: u64,
    pub dim: usize,
    pub num_maximal: usize,
    pub radical_dim: usize,
    #[serde(with = "crate::ser::natstr")]
    pub quotient_size: Natural,
    #[serde(with = "crate::ser::natstr")]
    pub bound: Natural,
    pub satisfied: bool,
}

pub fn check_maximal_count_bound(module: &FpModule) -> Result<SubmoduleCountReport, ModlatError> {
    let maximals = maximal_submodules(module)?;
    let rad = radical(module)?;
    let quotient_size = Natural::from(module.p).pow((module.dim - rad.dim()) as u32);
    let bound = &quotient_size - 1u32;
    let satisfied = Natural::from(maximals.len() as u64) <= bound;
    Ok(SubmoduleCountReport {
        p: module.p,
        dim: module.dim,
        num_maximal: maximals.len(),
        radical_dim: rad.dim(),
        quotient_size,
        bound,
        satisfied,
    })
}

/// Matrix of a permutation acting on the fully deleted module for S_n.
///
/// The permutation module F_p^n has the zero-sum submodule U (basis
/// u_i = e_i - e_{i+1}) and the constants W; the fully deleted module is
/// U/(U ∩ W), of dimension n - 2 when p | n and n - 1 otherwise.
pub fn fully_deleted_actor(n: usize, p: u64, perm: &Perm) -> Result<Matrix, ModlatError> {
    if n < 3 {
        return Err(ModlatError::BadDegree(n));
    }
    assert_eq!(perm.degree(), n, "permutation degree must be n");
    // action on U in the u-basis: u_i maps to e_{sigma(i)} - e_{sigma(i+1)},
    // whose u-coordinates are the partial sums of its entries
    let dim_u = n - 1;
    let mut mat_u: Matrix = Vec::with_capacity(dim_u);
    for i in 0..dim_u {
        let mut vec_n = vec![0i64; n];
        vec_n[perm.apply(i as u32) as usize] += 1;
        vec_n[perm.apply(i as u32 + 1) as usize] -= 1;
        let mut coords = vec![0u64; dim_u];
        let mut acc: i64 = 0;
        for j in 0..dim_u {
            acc += vec_n[j];
            coords[j] = acc.rem_euclid(p as i64) as u64;
        }
        mat_u.push(coords);
    }
    if !(n as u64).is_multiple_of(p) {
        return Ok(mat_u);
    }
    // p | n: quotient U by the constant vector (1,...,1), whose
    // u-coordinates are (1, 2, ..., n-1) mod p
    let w: Vector = (1..=dim_u as u64).map(|i| i % p).collect();
    Ok(quotient_matrix(&mat_u, &w, p))
}

/// Matrix of the induced action on V/<w> for an invariant line <w>.
fn quotient_matrix(mat: &Matrix, w: &[u64], p: u64) -> Matrix {
    let dim = w.len();
    let w_basis = linalg::rref(&[w.to_vec()], p);
    let pivot = w_basis[0].iter().position(|&x| x != 0).expect("w nonzero");
    let keep: Vec<usize> = (0..dim).filter(|&j| j != pivot).collect();
    // reduce a vector modulo <w>, then drop the pivot coordinate
    let project = |v: &[u64]| -> Vector {
        let r = linalg::reduce(v, &w_basis, p);
        keep.iter().map(|&j| r[j]).collect()
    };
    let mut out = Vec::with_capacity(dim - 1);
    for &i in &keep {
        // image of the i-th (kept) basis vector of the quotient
        out.push(project(&mat[i]));
    }
    out
}

/// The fully deleted module with actors for the standard S_n generators
/// (the transposition (0 1) and the n-cycle).
pub fn fully_deleted_module(n: usize, p: u64) -> Result<FpModule, ModlatError> {
    if n < 3 {
        return Err(ModlatError::BadDegree(n));
    }
    if !numtheory::is_prime_u64(p) {
        return Err(ModlatError::NotPrime(p));
    }
    let t = Perm::from_cycles(n, &[&[0, 1]]).expect("transposition");
    let c = Perm::from_cycles(n, &[&(0..n as u32).collect::<Vec<_>>()]).expect("n-cycle");
    let actors = vec![
        fully_deleted_actor(n, p, &t)?,
        fully_deleted_actor(n, p, &c)?,
    ];
    let dim = actors[0].len();
    FpModule::new(p, dim, actors)
}

/// Seeded random modules for bound sweeps: p in {2, 3}, dim <= 4,
/// 1..=3 uniformly random actor matrices each.
pub fn random_modules(seed: u64, count: usize) -> Vec<FpModule> {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let p: u64 = if rng.gen_bool(0.5) { 2 } else { 3 };
            let dim = rng.gen_range(1..=4usize);
            let n_actors = rng.gen_range(1..=3usize);
            let actors: Vec<Matrix> = (0..n_actors)
                .map(|_| {
                    (0..dim)
                        .map(|_| (0..dim).map(|_| rng.gen_range(0..p)).collect())
                        .collect()
                })
                .collect();
            FpModule::new(p, dim, actors).expect("p prime, shapes consistent")
        })
        .collect()
}

/// Searches for a vector whose orbit span under the subalgebra generated
/// by `actors_subset` is the whole module; exhaustive over all p^dim
/// vectors, returning the lowest one in the fixed enumeration order.
pub fn is_cyclic_module(
    module: &FpModule,
    actors_subset: &[Matrix],
) -> Result<Option<Vector>, ModlatError> {
    let size = module.check_cap()?;
    if module.dim == 0 {
        return Ok(Some(Vec::new()));
    }
    let p = module.p;
    let dim = module.dim;
    let found = (1..size).into_par_iter().find_first(|&idx| {
        let v = linalg::vector_from_index(idx, dim, p);
        spin(&v, actors_subset, p).len() == dim
    });
    Ok(found.map(|idx| linalg::vector_from_index(idx, dim, p)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};

    fn trivial_module(p: u64, dim: usize) -> FpModule {
        let id: Matrix = (0..dim)
            .map(|i| {
                let mut row = vec![0u64; dim];
                row[i] = 1;
                row
            })
            .collect();
        FpModule::new(p, dim, vec![id]).unwrap()
    }

    #[test]
    fn trivial_action_dim2_has_five_subspaces() {
        let m = trivial_module(2, 2);
        let subs = all_submodules(&m).unwrap();
        assert_eq!(subs.len(), 5); // 0, three lines, full
    }

    #[test]
    fn swap_action_has_four_invariant_subspaces() {
        // single actor: coordinate swap on F_2^2; the two coordinate lines
        // are exchanged, so only the diagonal line survives
        let swap: Matrix = vec![vec![0, 1], vec![1, 0]];
        let m = FpModule::new(2, 2, vec![swap]).unwrap();
        let subs = all_submodules(&m).unwrap();
        assert_eq!(subs.len(), 3); // 0, diagonal, full
        let maxes = maximal_submodules(&m).unwrap();
        assert_eq!(maxes.len(), 1);
        assert_eq!(maxes[0].basis, vec![vec![1, 1]]);
    }

    #[test]
    fn cap_exceeded() {
        let m = trivial_module(2, 17);
        assert!(matches!(
            all_submodules(&m),
            Err(ModlatError::CapExceeded(_))
        ));
    }

    #[test]
    fn hyperplane_count_for_trivial_action() {
        let m = trivial_module(2, 3);
        let maxes = maximal_submodules(&m).unwrap();
        assert_eq!(maxes.len(), 7);
        let rad = radical(&m).unwrap();
        assert_eq!(rad.dim(), 0);
    }

    #[test]
    fn simple_module_unique_maximal_is_zero() {
        // cyclic rotation plus swap on F_2^2 is irreducible... use the
        // 2-dimensional simple module for S_3 over F_2: actors from the
        // fully deleted module of S_3
        let m = fully_deleted_module(3, 2).unwrap();
        assert_eq!(m.dim, 2);
        let maxes = maximal_submodules(&m).unwrap();
        assert_eq!(maxes.len(), 1);
        assert_eq!(maxes[0].dim(), 0);
        assert_eq!(radical(&m).unwrap().dim(), 0);
    }

    #[test]
    fn zero_module_edge() {
        let m = FpModule::new(2, 0, vec![]).unwrap();
        assert_eq!(maximal_submodules(&m).unwrap().len(), 0);
        assert_eq!(radical(&m).unwrap().dim(), 0);
        let report = check_maximal_count_bound(&m).unwrap();
        assert!(report.satisfied);
    }

    #[test]
    fn unipotent_actor_radical() {
        // u = I + N with N the nilpotent single Jordan step over F_2:
        // the radical is the image of N, of dimension 1
        let u: Matrix = vec![vec![1, 1], vec![0, 1]];
        let m = FpModule::new(2, 2, vec![u]).unwrap();
        let rad = radical(&m).unwrap();
        assert_eq!(rad.dim(), 1);
        assert_eq!(rad.basis, vec![vec![0, 1]]);
        let report = check_maximal_count_bound(&m).unwrap();
        assert_eq!(report.num_maximal, 1);
        assert!(report.satisfied);
    }

    #[test]
    fn bound_is_tight_for_trivial_f2_action() {
        for dim in 1..=4 {
            let m = trivial_module(2, dim);
            let report = check_maximal_count_bound(&m).unwrap();
            assert_eq!(report.num_maximal as u64, (1u64 << dim) - 1);
            assert_eq!(report.bound, Natural::from((1u64 << dim) - 1));
            assert!(report.satisfied);
        }
    }

    #[test]
    fn two_nonisomorphic_simples() {
        // actor diag(1, 0): summands F_2 with identity and zero action
        let a: Matrix = vec![vec![1, 0], vec![0, 0]];
        let m = FpModule::new(2, 2, vec![a]).unwrap();
        let report = check_maximal_count_bound(&m).unwrap();
        assert_eq!(report.num_maximal, 2);
        assert_eq!(report.bound, Natural::from(3u32));
        assert!(report.satisfied);
    }

    #[test]
    fn every_maximal_contains_radical() {
        let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(99);
        for _ in 0..40 {
            let p = if rng.gen_bool(0.5) { 2 } else { 3 };
            let dim = rng.gen_range(1..=3usize);
            let n_actors = rng.gen_range(1..=2usize);
            let actors: Vec<Matrix> = (0..n_actors)
                .map(|_| {
                    (0..dim)
                        .map(|_| (0..dim).map(|_| rng.gen_range(0..p)).collect())
                        .collect()
                })
                .collect();
            let m = FpModule::new(p, dim, actors).unwrap();
            let rad = radical(&m).unwrap();
            for mx in maximal_submodules(&m).unwrap() {
                assert!(mx.contains(&rad, p));
            }
        }
    }

    #[test]
    fn fdp_dimensions() {
        assert_eq!(fully_deleted_module(6, 2).unwrap().dim, 4); // p | n
        assert_eq!(fully_deleted_module(5, 3).unwrap().dim, 4);
        assert_eq!(fully_deleted_module(5, 5).unwrap().dim, 3); // p | n
        assert_eq!(fully_deleted_module(7, 7).unwrap().dim, 5);
    }

    #[test]
    fn fdp_actors_are_invertible_and_respect_composition() {
        // sanity for the right-action convention: actor(s)·actor(t) = actor(st)
        for (n, p) in [(5usize, 2u64), (6, 3), (6, 2)] {
            let s = Perm::from_cycles(n, &[&[0, 1]]).unwrap();
            let t = Perm::from_cycles(n, &[&(0..n as u32).collect::<Vec<_>>()]).unwrap();
            let ms = fully_deleted_actor(n, p, &s).unwrap();
            let mt = fully_deleted_actor(n, p, &t).unwrap();
            let mst = fully_deleted_actor(n, p, &s.then(&t)).unwrap();
            let dim = ms.len();
            for idx in 0..p.pow(dim as u32) {
                let v = linalg::vector_from_index(idx, dim, p);
                let lhs = linalg::apply(&linalg::apply(&v, &ms, p), &mt, p);
                let rhs = linalg::apply(&v, &mst, p);
                assert_eq!(lhs, rhs);
            }
        }
    }

    #[test]
    fn trivial_action_not_cyclic_in_dim_2() {
        let m = trivial_module(3, 2);
        let id: Matrix = vec![vec![1, 0], vec![0, 1]];
        assert_eq!(is_cyclic_module(&m, &[id]).unwrap(), None);
    }

    #[test]
    fn fdp_s5_cyclic_for_point_stabilizer() {
        // H = S_4 fixing point 4, acting on the fully deleted module of
        // S_5 over F_2
        let module = fully_deleted_module(5, 2).unwrap();
        let gens = [
            Perm::from_cycles(5, &[&[0, 1]]).unwrap(),
            Perm::from_cycles(5, &[&[0, 1, 2, 3]]).unwrap(),
        ];
        let actors: Vec<Matrix> = gens
            .iter()
            .map(|g| fully_deleted_actor(5, 2, g).unwrap())
            .collect();
        let gen = is_cyclic_module(&module, &actors).unwrap();
        assert!(gen.is_some());
    }

    #[test]
    fn irreducible_module_cyclic_from_any_vector() {
        let m = fully_deleted_module(3, 2).unwrap();
        let found = is_cyclic_module(&m, &m.actors).unwrap().unwrap();
        // deterministic first hit: the lowest generating vector
        assert_eq!(found, vec![1, 0]);
    }
}
