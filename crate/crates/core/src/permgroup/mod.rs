//! Permutation group kernel: stabilizer chains, membership, order,
//! generation testing, exact minimal generator counts, maximality
//! certification and random generation estimates.

mod dexact;
mod group;
mod maximality;
mod perm;
mod random;

pub use dexact::{
    d_exact, d_lower_bound, DCertificate, DExact, DExactError, D_CAP_MAX, ENGINE_ORDER_CAP,
    EXHAUSTIVE_ORDER_CAP,
};
pub use group::{GroupDoc, GroupError, PermGroup, DEGREE_CAP};
pub use maximality::{
    is_maximal, verify_chain, ChainError, ChainLink, ChainReport, LinkVerdict, MaximalityError,
    MaximalityMethod, SWEEP_ORDER_CAP,
};
pub use perm::{Perm, PermError};
pub use random::{
    estimate_generation_probability, estimate_nu, nu_threshold, GenEstimate, NuError, NuEstimate,
};
