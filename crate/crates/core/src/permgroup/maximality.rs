//! Maximality certification for subgroup links, and chain verification.
//!
//! Two certification routes: an element sweep (every element outside H,
//! taken one per right coset, must close H up to G) and primitivity of
//! the coset action when H is a point stabilizer of a transitive action.

use super::group::PermGroup;
use crate::numtheory::Natural;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Element sweeps are capped at this group order.
pub const SWEEP_ORDER_CAP: u64 = 100_000;

#[derive(Debug, Error)]
pub enum MaximalityError {
    #[error("H is not a subgroup of G")]
    NotASubgroup,
    #[error("H equals G; maximality undefined for improper subgroups")]
    NotProper,
    #[error("group order {0} exceeds the sweep cap {SWEEP_ORDER_CAP}")]
    ScaleExceeded(Natural),
    #[error("H is not a point stabilizer of a transitive action of G")]
    NotPointStabilizer,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MaximalityMethod {
    Sweep,
    Primitivity,
    Auto,
}

/// Per-link verdict. `Assumed` carries the citation justifying the link.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum LinkVerdict {
    Verified { method: MaximalityMethod },
    Refuted,
    Assumed { citation: String },
    Failed { error: String },
}

impl LinkVerdict {
    pub fn is_ok(&self) -> bool {
        matches!(
            self,
            LinkVerdict::Verified { .. } | LinkVerdict::Assumed { .. }
        )
    }
}

/// Decides whether `h` is maximal in `g`.
pub fn is_maximal(
    h: &PermGroup,
    g: &PermGroup,
    method: MaximalityMethod,
) -> Result<LinkVerdict, MaximalityError> {
    if !g.contains_group(h) {
        return Err(MaximalityError::NotASubgroup);
    }
    if h.order() == g.order() {
        return Err(MaximalityError::NotProper);
    }
    match method {
        MaximalityMethod::Sweep => sweep(h, g),
        MaximalityMethod::Primitivity => {
            let alpha = stabilized_point(h, g).ok_or(MaximalityError::NotPointStabilizer)?;
            primitivity(g, alpha)
        }
        MaximalityMethod::Auto => {
            if let Some(alpha) = stabilized_point(h, g) {
                primitivity(g, alpha)
            } else if g.order_u64().is_some_and(|o| o <= SWEEP_ORDER_CAP) {
                sweep(h, g)
            } else {
                Ok(LinkVerdict::Assumed {
                    citation: String::new(),
                })
            }
        }
    }
}

/// Sweep: maximal iff <H, x> = G for every x in G \ H. Elements in the
/// same right coset Hx give the same closure, so one representative per
/// coset suffices; representatives are checked in parallel and the
/// verdict is their conjunction, independent of scheduling.
fn sweep(h: &PermGroup, g: &PermGroup) -> Result<LinkVerdict, MaximalityError> {
    use rayon::prelude::*;
    let order = g.order_u64().filter(|&o| o <= SWEEP_ORDER_CAP);
    if order.is_none() {
        return Err(MaximalityError::ScaleExceeded(g.order().clone()));
    }
    let reps = g.right_coset_reps(h);
    let all_close = reps
        .par_iter()
        .filter(|rep| !h.contains(rep))
        .all(|rep| h.closure_reaches(std::slice::from_ref(rep), g.order()));
    if all_close {
        Ok(LinkVerdict::Verified {
            method: MaximalityMethod::Sweep,
        })
    } else {
        Ok(LinkVerdict::Refuted)
    }
}

/// A point fixed by every generator of `h` such that h is the full
/// stabilizer of that point in a transitive `g`-orbit.
fn stabilized_point(h: &PermGroup, g: &PermGroup) -> Option<u32> {
    'point: for pt in 0..g.degree() as u32 {
        for gen in h.generators() {
            if gen.apply(pt) != pt {
                continue 'point;
            }
        }
        let orbit = g.orbit_of(pt);
        if orbit.len() < 2 {
            continue;
        }
        if Natural::from(orbit.len() as u64) * h.order() == *g.order() {
            return Some(pt);
        }
    }
    None
}

/// Point stabilizer is maximal iff the action on the orbit of alpha is
/// primitive: the minimal block containing {alpha, beta} is the whole
/// orbit for every beta.
fn primitivity(g: &PermGroup, alpha: u32) -> Result<LinkVerdict, MaximalityError> {
    let orbit = g.orbit_of(alpha);
    let orbit_len = orbit.len();
    for &beta in orbit.iter().skip(1) {
        let block = minimal_block(g, alpha, beta);
        if block != orbit_len {
            return Ok(LinkVerdict::Refuted);
        }
    }
    Ok(LinkVerdict::Verified {
        method: MaximalityMethod::Primitivity,
    })
}

/// Size of the minimal block containing {alpha, beta} (union-find on the
/// congruence generated by identifying the pair).
fn minimal_block(g: &PermGroup, alpha: u32, beta: u32) -> usize {
    let n = g.degree();
    let mut parent: Vec<u32> = (0..n as u32).collect();
    fn find(parent: &mut [u32], mut x: u32) -> u32 {
        while parent[x as usize] != x {
            parent[x as usize] = parent[parent[x as usize] as usize];
            x = parent[x as usize];
        }
        x
    }
    let mut queue: Vec<(u32, u32)> = vec![(alpha, beta)];
    parent[beta as usize] = alpha;
    while let Some((a, b)) = queue.pop() {
        for gen in g.generators() {
            let ga = gen.apply(a);
            let gb = gen.apply(b);
            let ra = find(&mut parent, ga);
            let rb = find(&mut parent, gb);
            if ra != rb {
                parent[rb as usize] = ra;
                queue.push((ra, rb));
            }
        }
    }
    // block of alpha = its congruence class within the orbit
    let root = find(&mut parent, alpha);
    let orbit = g.orbit_of(alpha);
    orbit
        .iter()
        .filter(|&&p| find(&mut parent, p) == root)
        .count()
}

/// One verified / refuted / assumed entry per link of a subgroup chain.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ChainLink {
    /// Order of the smaller group of the link.
    pub sub_order: String,
    /// Index of the smaller group in the larger.
    pub index: String,
    pub verdict: LinkVerdict,
}

/// Report for an ascending chain of subgroups.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ChainReport {
    /// Orders bottom (deepest subgroup) to top (ambient group).
    pub orders: Vec<String>,
    pub links: Vec<ChainLink>,
    /// Number of links, i.e. the depth the chain claims.
    pub depth_claimed: usize,
    /// True when every link is verified or assumed.
    pub depth_confirmed: bool,
}

#[derive(Debug, Error)]
pub enum ChainError {
    #[error("chain must have between 2 and 5 groups, got {0}")]
    BadLength(usize),
    #[error("group {0} is not a subgroup of group {1}")]
    NotNested(usize, usize),
}

/// Verifies an ascending chain bottom-to-top. `assumptions` maps link
/// index (0 = deepest link) to a citation; those links are recorded as
/// assumed without running a certification. Per-link errors are captured
/// in the report without aborting remaining links.
pub fn verify_chain(
    chain: &[PermGroup],
    assumptions: &[(usize, String)],
) -> Result<ChainReport, ChainError> {
    if chain.len() < 2 || chain.len() > 5 {
        return Err(ChainError::BadLength(chain.len()));
    }
    for i in 0..chain.len() - 1 {
        if !chain[i + 1].contains_group(&chain[i]) {
            return Err(ChainError::NotNested(i, i + 1));
        }
    }
    let mut links = Vec::new();
    for i in 0..chain.len() - 1 {
        let sub = &chain[i];
        let sup = &chain[i + 1];
        let verdict = match assumptions.iter().find(|(idx, _)| *idx == i) {
            Some((_, citation)) => LinkVerdict::Assumed {
                citation: citation.clone(),
            },
            None => match is_maximal(sub, sup, MaximalityMethod::Auto) {
                Ok(v) => v,
                Err(e) => LinkVerdict::Failed {
                    error: e.to_string(),
                },
            },
        };
        links.push(ChainLink {
            sub_order: sub.order().to_string(),
            index: (sup.order() / sub.order()).to_string(),
            verdict,
        });
    }
    let depth_claimed = links.len();
    let depth_confirmed = links.iter().all(|l| l.verdict.is_ok());
    Ok(ChainReport {
        orders: chain.iter().map(|g| g.order().to_string()).collect(),
        links,
        depth_claimed,
        depth_confirmed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numtheory::nat;
    use crate::permgroup::Perm;

    fn sym(n: usize) -> PermGroup {
        let t = Perm::from_cycles(n, &[&[0, 1]]).unwrap();
        let c = Perm::from_cycles(n, &[&(0..n as u32).collect::<Vec<_>>()]).unwrap();
        PermGroup::from_generators(n, vec![t, c]).unwrap()
    }

    fn alt(n: usize) -> PermGroup {
        let a = Perm::from_cycles(n, &[&[0, 1, 2]]).unwrap();
        let b = if n % 2 == 1 {
            Perm::from_cycles(n, &[&(0..n as u32).collect::<Vec<_>>()]).unwrap()
        } else {
            Perm::from_cycles(n, &[&(1..n as u32).collect::<Vec<_>>()]).unwrap()
        };
        PermGroup::from_generators(n, vec![a, b]).unwrap()
    }

    #[test]
    fn alternating_in_symmetric_is_maximal() {
        for n in 4..=6 {
            let v = is_maximal(&alt(n), &sym(n), MaximalityMethod::Sweep).unwrap();
            assert!(matches!(v, LinkVerdict::Verified { .. }), "A{n} < S{n}");
        }
    }

    #[test]
    fn cyclic_4_not_maximal_in_s4() {
        let c4 =
            PermGroup::from_generators(4, vec![Perm::from_cycles(4, &[&[0, 1, 2, 3]]).unwrap()])
                .unwrap();
        let v = is_maximal(&c4, &sym(4), MaximalityMethod::Sweep).unwrap();
        assert_eq!(v, LinkVerdict::Refuted); // contained in D8
    }

    #[test]
    fn point_stabilizer_primitivity_agrees_with_sweep() {
        // S5 acting naturally; S4 = stabilizer of point 4
        let s5 = sym(5);
        let s4_in_s5 = PermGroup::from_generators(
            5,
            vec![
                Perm::from_cycles(5, &[&[0, 1]]).unwrap(),
                Perm::from_cycles(5, &[&[0, 1, 2, 3]]).unwrap(),
            ],
        )
        .unwrap();
        let by_sweep = is_maximal(&s4_in_s5, &s5, MaximalityMethod::Sweep).unwrap();
        let by_prim = is_maximal(&s4_in_s5, &s5, MaximalityMethod::Primitivity).unwrap();
        assert!(matches!(by_sweep, LinkVerdict::Verified { .. }));
        assert!(matches!(by_prim, LinkVerdict::Verified { .. }));
    }

    #[test]
    fn imprimitive_stabilizer_refuted() {
        // D8 acting on the square 0-1-2-3: stabilizer of a vertex is not
        // maximal-via-primitivity (diagonal pairs form blocks)
        let d8 = PermGroup::from_generators(
            4,
            vec![
                Perm::from_cycles(4, &[&[0, 1, 2, 3]]).unwrap(),
                Perm::from_cycles(4, &[&[1, 3]]).unwrap(),
            ],
        )
        .unwrap();
        assert_eq!(d8.order(), &nat(8));
        let stab =
            PermGroup::from_generators(4, vec![Perm::from_cycles(4, &[&[1, 3]]).unwrap()]).unwrap();
        let v = is_maximal(&stab, &d8, MaximalityMethod::Primitivity).unwrap();
        assert_eq!(v, LinkVerdict::Refuted);
        // and the sweep agrees
        let v2 = is_maximal(&stab, &d8, MaximalityMethod::Sweep).unwrap();
        assert_eq!(v2, LinkVerdict::Refuted);
    }

    #[test]
    fn not_a_subgroup_is_an_error() {
        let s4 = sym(4);
        let c5 =
            PermGroup::from_generators(5, vec![Perm::from_cycles(5, &[&[0, 1, 2, 3, 4]]).unwrap()])
                .unwrap();
        assert!(matches!(
            is_maximal(&c5, &s4, MaximalityMethod::Sweep),
            Err(MaximalityError::NotASubgroup)
        ));
    }

    #[test]
    fn chain_a4_s4_s5() {
        let a4_in_s5 = PermGroup::from_generators(
            5,
            vec![
                Perm::from_cycles(5, &[&[0, 1, 2]]).unwrap(),
                Perm::from_cycles(5, &[&[1, 2, 3]]).unwrap(),
            ],
        )
        .unwrap();
        let s4_in_s5 = PermGroup::from_generators(
            5,
            vec![
                Perm::from_cycles(5, &[&[0, 1]]).unwrap(),
                Perm::from_cycles(5, &[&[0, 1, 2, 3]]).unwrap(),
            ],
        )
        .unwrap();
        let report = verify_chain(&[a4_in_s5, s4_in_s5, sym(5)], &[]).unwrap();
        assert_eq!(report.depth_claimed, 2);
        assert!(report.depth_confirmed);
        assert_eq!(report.links[0].index, "2");
        assert_eq!(report.links[1].index, "5");
    }

    #[test]
    fn chain_indices_multiply_to_total_index() {
        let a4_in_s5 = PermGroup::from_generators(
            5,
            vec![
                Perm::from_cycles(5, &[&[0, 1, 2]]).unwrap(),
                Perm::from_cycles(5, &[&[1, 2, 3]]).unwrap(),
            ],
        )
        .unwrap();
        let s4_in_s5 = PermGroup::from_generators(
            5,
            vec![
                Perm::from_cycles(5, &[&[0, 1]]).unwrap(),
                Perm::from_cycles(5, &[&[0, 1, 2, 3]]).unwrap(),
            ],
        )
        .unwrap();
        let bottom = a4_in_s5.order().clone();
        let top = sym(5).order().clone();
        let report = verify_chain(&[a4_in_s5, s4_in_s5, sym(5)], &[]).unwrap();
        let product: Natural = report
            .links
            .iter()
            .map(|l| l.index.parse::<Natural>().unwrap())
            .product();
        assert_eq!(product, top / bottom);
    }

    #[test]
    fn assumed_link_carries_citation() {
        let report = verify_chain(
            &[alt(5), sym(5)],
            &[(0, "index-2 subgroups are maximal".to_string())],
        )
        .unwrap();
        assert!(matches!(
            &report.links[0].verdict,
            LinkVerdict::Assumed { citation } if citation.contains("index-2")
        ));
        assert!(report.depth_confirmed);
    }
}
