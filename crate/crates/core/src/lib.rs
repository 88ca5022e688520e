//! Verification and search toolkit around minimal generator counts of deep
//! subgroups in rank-1 groups of Lie type, generalized repunit primes, and
//! finite module structure.
//!
//! The crate is organised as six largely independent layers:
//!
//! - [`numtheory`]: exact primality, factorization, multiplicative orders.
//! - [`starsearch`]: the (r, q) repunit-prime grid scanner and Mersenne
//!   exponent scan.
//! - [`ffield`]: small finite fields F_{p^k} with canonical moduli.
//! - [`permgroup`]: permutation groups with stabilizer chains, exact
//!   minimal generator counts, maximality certification and random
//!   generation estimates.
//! - [`families`]: the rank-1 families L2 / Sz / AGL1, their Borel
//!   subgroups, and the generator-count bound formulas.
//! - [`modlat`]: finite F_p-modules, submodule lattices and the maximal
//!   submodule counting bound.

pub mod families;
pub mod ffield;
pub mod modlat;
pub mod numtheory;
pub mod permgroup;
pub(crate) mod ser;
pub mod starsearch;

pub use families::{BorelMaximal, BoundReport, Family, MarkedBorel, TrichotomyCase};
pub use ffield::{Field, FieldElement};
pub use modlat::{FpModule, Submodule, SubmoduleCountReport};
pub use numtheory::{Factorization, Natural, PrimalityVerdict};
pub use permgroup::{ChainReport, GenEstimate, LinkVerdict, NuEstimate, Perm, PermGroup};
pub use starsearch::{GroupInstanceSpec, StarReport, StarWitness};
