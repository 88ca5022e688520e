//! Built-in representatives of the maximal subgroup classes of S_n for
//! n in 5..=8. The data is embedded but never trusted: every entry is
//! re-verified maximal by an element sweep at load time, and the two
//! S_5 classes inside S_6 are distinguished by orbit structure.

use crate::families::FamiliesError;
use crate::numtheory::Natural;
use crate::permgroup::{is_maximal, LinkVerdict, MaximalityMethod, Perm, PermGroup};

#[derive(Debug, Clone)]
pub struct CatalogueEntry {
    pub name: String,
    pub group: PermGroup,
    pub transitive: bool,
}

fn sym(n: usize) -> PermGroup {
    let t = Perm::from_cycles(n, &[&[0, 1]]).unwrap();
    let c = Perm::from_cycles(n, &[&(0..n as u32).collect::<Vec<_>>()]).unwrap();
    PermGroup::from_generators(n, vec![t, c]).unwrap()
}

fn alternating_gens(n: u32) -> Vec<Vec<Vec<u32>>> {
    let three = vec![vec![0, 1, 2]];
    let cycle = if n % 2 == 1 {
        vec![(0..n).collect::<Vec<u32>>()]
    } else {
        vec![(1..n).collect::<Vec<u32>>()]
    };
    vec![three, cycle]
}

fn sk_x_sm_gens(k: u32, n: u32) -> Vec<Vec<Vec<u32>>> {
    // S_k on {0..k-1} times S_{n-k} on {k..n-1}
    let mut gens = Vec::new();
    if k >= 2 {
        gens.push(vec![vec![0, 1]]);
    }
    if k >= 3 {
        gens.push(vec![(0..k).collect::<Vec<u32>>()]);
    }
    if n - k >= 2 {
        gens.push(vec![vec![k, k + 1]]);
    }
    if n - k >= 3 {
        gens.push(vec![(k..n).collect::<Vec<u32>>()]);
    }
    gens
}

fn wreath_gens(t: u32, m: u32) -> Vec<Vec<Vec<u32>>> {
    // S_t wr S_m on t*m points in blocks {0..t-1}, {t..2t-1}, ...
    let mut gens = Vec::new();
    gens.push(vec![vec![0, 1]]);
    if t >= 3 {
        gens.push(vec![(0..t).collect::<Vec<u32>>()]);
    }
    // top transposition: swap block 0 and block 1
    gens.push((0..t).map(|i| vec![i, i + t]).collect());
    if m >= 3 {
        // top m-cycle: block i -> block i+1
        gens.push(
            (0..t)
                .map(|i| (0..m).map(|b| b * t + i).collect())
                .collect(),
        );
    }
    gens
}

fn factorial(n: u32) -> u64 {
    (1..=n as u64).product()
}

/// (name, expected order, cycles per generator)
type RawEntry = (String, u64, Vec<Vec<Vec<u32>>>);

fn raw_entries(n: usize) -> Vec<RawEntry> {
    let n32 = n as u32;
    let mut out: Vec<RawEntry> = Vec::new();
    out.push((format!("A{n}"), factorial(n32) / 2, alternating_gens(n32)));
    for k in 1..=(n32 - 1) / 2 {
        let name = if k == 1 {
            format!("S{}", n - 1)
        } else {
            format!("S{} x S{}", k, n32 - k)
        };
        out.push((
            name,
            factorial(k) * factorial(n32 - k),
            sk_x_sm_gens(k, n32),
        ));
    }
    match n {
        5 => {
            out.push((
                "AGL1(5)".into(),
                20,
                vec![vec![vec![0, 1, 2, 3, 4]], vec![vec![1, 2, 4, 3]]],
            ));
        }
        6 => {
            out.push(("S3 wr S2".into(), 72, wreath_gens(3, 2)));
            out.push(("S2 wr S3".into(), 48, wreath_gens(2, 3)));
            // PGL2(5) acting on the 6 points of the projective line
            out.push((
                "S5 (PGL2(5), transitive)".into(),
                120,
                vec![
                    vec![vec![1, 2, 3, 4, 5]],
                    vec![vec![2, 3, 5, 4]],
                    vec![vec![0, 1], vec![3, 4]],
                ],
            ));
        }
        7 => {
            out.push((
                "AGL1(7)".into(),
                42,
                vec![
                    vec![vec![0, 1, 2, 3, 4, 5, 6]],
                    vec![vec![1, 3, 2, 6, 4, 5]],
                ],
            ));
        }
        8 => {
            out.push(("S4 wr S2".into(), 1152, wreath_gens(4, 2)));
            out.push(("S2 wr S4".into(), 384, wreath_gens(2, 4)));
            out.push((
                "PGL2(7)".into(),
                336,
                vec![
                    vec![vec![1, 2, 3, 4, 5, 6, 7]],
                    vec![vec![2, 4, 3, 7, 5, 6]],
                    vec![vec![0, 1], vec![3, 5], vec![4, 6]],
                ],
            ));
        }
        _ => {}
    }
    out
}

/// One sweep-verified representative per conjugacy class of maximal
/// subgroups of S_n, n in 5..=8.
pub fn sn_maximal_catalogue(n: usize) -> Result<Vec<CatalogueEntry>, FamiliesError> {
    if !(5..=8).contains(&n) {
        return Err(FamiliesError::Unsupported(format!(
            "catalogue covers S_n for n in 5..=8, not n = {n}"
        )));
    }
    let ambient = sym(n);
    let mut entries = Vec::new();
    for (name, expected_order, cycle_sets) in raw_entries(n) {
        let gens: Result<Vec<Perm>, _> = cycle_sets
            .iter()
            .map(|cycles| {
                let borrowed: Vec<&[u32]> = cycles.iter().map(|c| c.as_slice()).collect();
                Perm::from_cycles(n, &borrowed)
            })
            .collect();
        let group = PermGroup::from_generators(n, gens?)?;
        if group.order() != &Natural::from(expected_order) {
            return Err(FamiliesError::ConstructionInvariant(format!(
                "catalogue entry {name}: expected order {expected_order}, got {}",
                group.order()
            )));
        }
        let verdict = is_maximal(&group, &ambient, MaximalityMethod::Sweep)?;
        if verdict
            != (LinkVerdict::Verified {
                method: MaximalityMethod::Sweep,
            })
        {
            return Err(FamiliesError::ConstructionInvariant(format!(
                "catalogue entry {name} failed its load-time maximality sweep"
            )));
        }
        let transitive = group.orbit_of(0).len() == n;
        entries.push(CatalogueEntry {
            name,
            group,
            transitive,
        });
    }
    if n == 6 {
        // the two order-120 classes must be distinguished by transitivity
        let s5s: Vec<&CatalogueEntry> = entries
            .iter()
            .filter(|e| e.group.order() == &Natural::from(120u32))
            .collect();
        if s5s.len() != 2 || s5s[0].transitive == s5s[1].transitive {
            return Err(FamiliesError::ConstructionInvariant(
                "S6 catalogue must carry one transitive and one intransitive S5".into(),
            ));
        }
    }
    Ok(entries)
}
