//! Grid scanner for repunit-prime witnesses: pairs (r, q) with r prime,
//! q a prime power, and (q^r - 1)/(q - 1) prime.
//!
//! The grid is walked in canonical order (r outer ascending over primes,
//! q inner ascending over prime powers); cells are independent work items
//! and results are merged back in grid order, so a completed report is
//! identical for any worker count. Composites below 2^64 carry a verified
//! nontrivial factor.

use crate::families::Family;
use crate::numtheory::{
    self, is_prime_seeded, nat, repunit_value, Natural, PrimalityMethod, PrimalityVerdict,
};
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::time::{Duration, Instant};
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScanBudget {
    Unlimited,
    WallTime(Duration),
}

#[derive(Debug, Error)]
pub enum StarError {
    #[error("scan budget exhausted after {} of {} cells", partial.completed_cells(), partial.total_cells())]
    BudgetExhausted { partial: Box<StarReport> },
    #[error("grid bounds must satisfy r_max >= 2 and q_max >= 2")]
    BadGrid,
    #[error("checkpoint grid ({0}, {1}) does not match requested grid")]
    CheckpointMismatch(u64, u64),
    #[error("witness does not induce an integral torus order e")]
    NotApplicable,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CellVerdict {
    Prime,
    Composite,
}

/// One grid cell: the verdict for (q^r - 1)/(q - 1).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StarCell {
    pub r: u64,
    pub q_p: u64,
    pub q_k: u32,
    pub q: u64,
    pub repunit_decimal_length: usize,
    pub verdict: CellVerdict,
    pub method: PrimalityMethod,
    /// Verified nontrivial factor for composite values below 2^64.
    #[serde(with = "crate::ser::natstr_opt", default)]
    pub factor: Option<Natural>,
}

/// Scan summary for one prime r.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StarRow {
    pub r: u64,
    pub smallest_witness_q: Option<u64>,
    pub witness_count: u64,
    pub composites_checked: u64,
    pub complete: bool,
    pub cells: Vec<StarCell>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StarReport {
    pub r_max: u64,
    pub q_max: u64,
    pub complete: bool,
    /// Last fully completed cell (r, q) in canonical grid order.
    pub high_water: Option<(u64, u64)>,
    pub rows: Vec<StarRow>,
    /// Wall time is provenance, not payload; excluded from serialization
    /// so reports stay byte-identical across runs and worker counts.
    #[serde(skip)]
    pub wall_time: Duration,
}

impl StarReport {
    pub fn completed_cells(&self) -> usize {
        self.rows.iter().map(|r| r.cells.len()).sum()
    }

    pub fn total_cells(&self) -> usize {
        let qs = prime_powers_upto(self.q_max).len();
        self.rows.len() * qs
    }

    /// All witnesses, in canonical grid order.
    pub fn witnesses(&self) -> Vec<StarWitness> {
        let mut out = Vec::new();
        for row in &self.rows {
            for cell in &row.cells {
                if cell.verdict == CellVerdict::Prime {
                    out.push(StarWitness::from_cell(cell));
                }
            }
        }
        out
    }
}

/// A witness to the grid question: r prime, q = p^k a prime power, and
/// the repunit (q^r - 1)/(q - 1) prime.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StarWitness {
    #[serde(with = "crate::ser::natstr")]
    pub r: Natural,
    #[serde(with = "crate::ser::natstr")]
    pub q_p: Natural,
    pub q_k: u32,
    #[serde(with = "crate::ser::natstr")]
    pub q_value: Natural,
    #[serde(with = "crate::ser::natstr")]
    pub repunit: Natural,
    pub verdict: PrimalityVerdict,
}

impl StarWitness {
    fn from_cell(cell: &StarCell) -> StarWitness {
        StarWitness {
            r: nat(cell.r),
            q_p: nat(cell.q_p),
            q_k: cell.q_k,
            q_value: nat(cell.q),
            repunit: repunit_value(&nat(cell.q), &nat(cell.r)),
            verdict: PrimalityVerdict {
                is_prime: true,
                method: cell.method,
                rounds: if cell.method == PrimalityMethod::Probabilistic {
                    numtheory::DEFAULT_SPRP_ROUNDS
                } else {
                    0
                },
            },
        }
    }

    /// Independent re-verification: recompute the repunit and re-test
    /// primality with fresh randomness from `seed`.
    pub fn reverify(&self, seed: u64) -> bool {
        if !numtheory::is_prime(&self.q_p).is_prime {
            return false;
        }
        if self.q_p.pow(self.q_k) != self.q_value {
            return false;
        }
        if !numtheory::is_prime(&self.r).is_prime {
            return false;
        }
        let value = repunit_value(&self.q_value, &self.r);
        value == self.repunit && is_prime_seeded(&value, seed).is_prime
    }
}

/// The L2 instance induced by a witness: q0 = p^l and r give the group
/// L_2(p^(l r)) whose Borel has a maximal subgroup of prime index
/// s = repunit, with torus part of order e = (p^k - 1)/(d s).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GroupInstanceSpec {
    #[serde(with = "crate::ser::natstr")]
    pub p: Natural,
    pub k: u32,
    pub ell: u32,
    #[serde(with = "crate::ser::natstr")]
    pub s: Natural,
    #[serde(with = "crate::ser::natstr")]
    pub e: Natural,
    pub family: Family,
}

pub fn witness_to_group_instance(w: &StarWitness) -> Result<GroupInstanceSpec, StarError> {
    let ell = w.q_k;
    let r = w.r.to_u32().ok_or(StarError::NotApplicable)?;
    let k = ell.checked_mul(r).ok_or(StarError::NotApplicable)?;
    let q_full = w.q_p.pow(k) - 1u32;
    let d: u32 = if w.q_p.is_even() { 1 } else { 2 };
    let ds = Natural::from(d) * &w.repunit;
    let (e, rem) = q_full.div_rem(&ds);
    if !rem.is_zero() {
        return Err(StarError::NotApplicable);
    }
    Ok(GroupInstanceSpec {
        p: w.q_p.clone(),
        k,
        ell,
        s: w.repunit.clone(),
        e,
        family: Family::L2,
    })
}

/// Prime powers <= bound, ascending.
pub fn prime_powers_upto(bound: u64) -> Vec<(u64, u64, u32)> {
    let mut out = Vec::new();
    for n in 2..=bound {
        if let Some((p, k)) = is_prime_power_u64(n) {
            out.push((n, p, k));
        }
    }
    out
}

fn is_prime_power_u64(n: u64) -> Option<(u64, u32)> {
    numtheory::is_prime_power(&nat(n)).map(|(p, k)| (p.to_u64().expect("p <= n"), k))
}

fn compute_cell(r: u64, q: u64, q_p: u64, q_k: u32) -> StarCell {
    let value = repunit_value(&nat(q), &nat(r));
    let verdict = numtheory::is_prime(&value);
    let factor = if !verdict.is_prime {
        value.to_u64().map(|v| nat(nontrivial_factor_u64(v)))
    } else {
        None
    };
    StarCell {
        r,
        q_p,
        q_k,
        q,
        repunit_decimal_length: value.to_string().len(),
        verdict: if verdict.is_prime {
            CellVerdict::Prime
        } else {
            CellVerdict::Composite
        },
        method: verdict.method,
        factor,
    }
}

/// A nontrivial factor of a composite u64.
fn nontrivial_factor_u64(n: u64) -> u64 {
    debug_assert!(n >= 4);
    match numtheory::factorize(&nat(n), numtheory::DEFAULT_RHO_STEPS) {
        Ok(f) => f.factors[0].0.to_u64().expect("factor of a u64"),
        Err(numtheory::FactorError::BudgetExhausted { partial, .. }) => partial
            .first()
            .map(|(p, _)| p.to_u64().expect("factor of a u64"))
            .expect("trial division finds a factor of any 64-bit composite in budget"),
        Err(e) => unreachable!("composite >= 4: {e}"),
    }
}

/// Scan checkpoint: the completed prefix of the canonical cell order.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ScanCheckpoint {
    pub schema_version: u32,
    pub r_max: u64,
    pub q_max: u64,
    pub last_cell: Option<(u64, u64)>,
    pub cells: Vec<StarCell>,
}

/// Scans every (prime r <= r_max) x (prime power q <= q_max) cell.
/// Deterministic for a fixed grid regardless of worker count. On budget
/// exhaustion the partial report (with flagged incomplete rows and the
/// high-water cell) travels in the error.
pub fn scan_star(r_max: u64, q_max: u64, budget: ScanBudget) -> Result<StarReport, StarError> {
    scan_star_resumable(r_max, q_max, budget, None)
}

pub fn scan_star_resumable(
    r_max: u64,
    q_max: u64,
    budget: ScanBudget,
    resume: Option<&ScanCheckpoint>,
) -> Result<StarReport, StarError> {
    if r_max < 2 || q_max < 2 {
        return Err(StarError::BadGrid);
    }
    let started = Instant::now();
    let primes_r: Vec<u64> = numtheory::sieve_primes(r_max);
    let qs = prime_powers_upto(q_max);
    let grid: Vec<(u64, u64, u64, u32)> = primes_r
        .iter()
        .flat_map(|&r| qs.iter().map(move |&(q, p, k)| (r, q, p, k)))
        .collect();

    let mut prefix: Vec<StarCell> = Vec::new();
    if let Some(cp) = resume {
        if cp.r_max != r_max || cp.q_max != q_max {
            return Err(StarError::CheckpointMismatch(cp.r_max, cp.q_max));
        }
        prefix = cp.cells.clone();
        prefix.truncate(grid.len());
    }

    let deadline = match budget {
        ScanBudget::Unlimited => None,
        ScanBudget::WallTime(d) => Some(started + d),
    };

    let computed: Vec<Option<StarCell>> = grid[prefix.len()..]
        .par_iter()
        .map(|&(r, q, p, k)| {
            if deadline.is_some_and(|d| Instant::now() >= d) {
                return None;
            }
            Some(compute_cell(r, q, p, k))
        })
        .collect();

    let mut cells: Vec<Option<StarCell>> = prefix.into_iter().map(Some).collect();
    cells.extend(computed);

    // completed prefix in canonical order determines the high-water mark
    let done_prefix = cells.iter().take_while(|c| c.is_some()).count();
    let complete = done_prefix == grid.len() && cells.iter().all(|c| c.is_some());
    let high_water = if done_prefix > 0 {
        let (r, q, _, _) = grid[done_prefix - 1];
        Some((r, q))
    } else {
        None
    };

    let mut rows: Vec<StarRow> = Vec::with_capacity(primes_r.len());
    for (ri, &r) in primes_r.iter().enumerate() {
        let mut row_cells = Vec::new();
        let mut row_complete = true;
        for qi in 0..qs.len() {
            match &cells[ri * qs.len() + qi] {
                Some(c) => row_cells.push(c.clone()),
                None => row_complete = false,
            }
        }
        let smallest_witness_q = row_cells
            .iter()
            .find(|c| c.verdict == CellVerdict::Prime)
            .map(|c| c.q);
        let witness_count = row_cells
            .iter()
            .filter(|c| c.verdict == CellVerdict::Prime)
            .count() as u64;
        let composites_checked = row_cells
            .iter()
            .filter(|c| c.verdict == CellVerdict::Composite)
            .count() as u64;
        rows.push(StarRow {
            r,
            smallest_witness_q,
            witness_count,
            composites_checked,
            complete: row_complete,
            cells: row_cells,
        });
    }

    let report = StarReport {
        r_max,
        q_max,
        complete,
        high_water,
        rows,
        wall_time: started.elapsed(),
    };
    if complete {
        Ok(report)
    } else {
        Err(StarError::BudgetExhausted {
            partial: Box::new(report),
        })
    }
}

/// Checkpoint for the completed canonical prefix of a (partial) report.
pub fn checkpoint_of(report: &StarReport) -> ScanCheckpoint {
    let mut cells = Vec::new();
    'outer: for row in &report.rows {
        if !row.complete {
            // a later row may still hold out-of-prefix cells; the
            // checkpoint keeps only the contiguous prefix
            for c in &row.cells {
                if report
                    .high_water
                    .is_some_and(|(hr, hq)| (c.r, c.q) <= (hr, hq))
                {
                    cells.push(c.clone());
                } else {
                    break 'outer;
                }
            }
            break;
        }
        cells.extend(row.cells.iter().cloned());
    }
    ScanCheckpoint {
        schema_version: 1,
        r_max: report.r_max,
        q_max: report.q_max,
        last_cell: report.high_water,
        cells,
    }
}

/// All primes k <= k_max with 2^k - 1 prime, ascending.
pub fn mersenne_exponents(k_max: u64) -> Vec<u64> {
    numtheory::sieve_primes(k_max)
        .into_iter()
        .filter(|&k| {
            let m = (Natural::from(1u32) << (k as usize)) - 1u32;
            numtheory::is_prime(&m).is_prime
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_grid_rows() {
        let rep = scan_star(3, 2, ScanBudget::Unlimited).unwrap();
        assert_eq!(rep.rows.len(), 2);
        // r = 2: 1 + 2 = 3 prime; r = 3: 1 + 2 + 4 = 7 prime
        assert_eq!(rep.rows[0].r, 2);
        assert_eq!(rep.rows[0].smallest_witness_q, Some(2));
        assert_eq!(rep.rows[1].r, 3);
        assert_eq!(rep.rows[1].smallest_witness_q, Some(2));
        assert!(rep.complete);
    }

    #[test]
    fn composites_recorded_with_factors() {
        let rep = scan_star(5, 4, ScanBudget::Unlimited).unwrap();
        let row5 = rep.rows.iter().find(|r| r.r == 5).unwrap();
        assert_eq!(row5.smallest_witness_q, Some(2)); // 31
                                                      // (5,3) -> 121 = 11^2 and (5,4) -> 341 = 11 * 31 composite
        let c3 = row5.cells.iter().find(|c| c.q == 3).unwrap();
        assert_eq!(c3.verdict, CellVerdict::Composite);
        assert_eq!(c3.factor, Some(nat(11)));
        let c4 = row5.cells.iter().find(|c| c.q == 4).unwrap();
        assert_eq!(c4.verdict, CellVerdict::Composite);
        assert_eq!(c4.factor, Some(nat(11)));
        assert_eq!(row5.composites_checked, 2);
    }

    #[test]
    fn zero_budget_exhausts_with_flagged_rows() {
        match scan_star(2, 2, ScanBudget::WallTime(Duration::ZERO)) {
            Err(StarError::BudgetExhausted { partial }) => {
                assert!(!partial.complete);
                assert!(partial.rows.iter().all(|r| !r.complete));
                assert_eq!(partial.high_water, None);
            }
            other => panic!("expected exhaustion, got {other:?}"),
        }
    }

    #[test]
    fn deterministic_across_worker_counts() {
        let full = scan_star(13, 50, ScanBudget::Unlimited).unwrap();
        for threads in [1usize, 2, 8] {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .unwrap();
            let rep = pool.install(|| scan_star(13, 50, ScanBudget::Unlimited).unwrap());
            assert_eq!(
                serde_json::to_string(&rep.rows).unwrap(),
                serde_json::to_string(&full.rows).unwrap(),
                "threads = {threads}"
            );
        }
    }

    #[test]
    fn checkpoint_resume_consistent() {
        let full = scan_star(7, 10, ScanBudget::Unlimited).unwrap();
        // simulate an interrupted scan: prefix of 5 cells
        let mut cp = checkpoint_of(&full);
        cp.cells.truncate(5);
        cp.last_cell = Some((cp.cells[4].r, cp.cells[4].q));
        let resumed = scan_star_resumable(7, 10, ScanBudget::Unlimited, Some(&cp)).unwrap();
        assert_eq!(
            serde_json::to_string(&resumed.rows).unwrap(),
            serde_json::to_string(&full.rows).unwrap()
        );
        assert!(matches!(
            scan_star_resumable(8, 10, ScanBudget::Unlimited, Some(&cp)),
            Err(StarError::CheckpointMismatch(7, 10))
        ));
    }

    #[test]
    fn witnesses_reverify() {
        let rep = scan_star(13, 30, ScanBudget::Unlimited).unwrap();
        let witnesses = rep.witnesses();
        assert!(!witnesses.is_empty());
        for w in &witnesses {
            assert!(
                w.reverify(0xf4e5),
                "witness {:?}",
                (w.r.clone(), w.q_value.clone())
            );
        }
    }

    #[test]
    fn composite_factors_divide() {
        let rep = scan_star(11, 20, ScanBudget::Unlimited).unwrap();
        for row in &rep.rows {
            for c in &row.cells {
                if let Some(f) = &c.factor {
                    let value = repunit_value(&nat(c.q), &nat(c.r));
                    assert!(f > &nat(1) && f < &value);
                    assert!((value % f).is_zero());
                }
            }
        }
    }

    #[test]
    fn mersenne_exponent_examples() {
        assert_eq!(mersenne_exponents(7), vec![2, 3, 5, 7]);
        assert_eq!(mersenne_exponents(12), vec![2, 3, 5, 7]); // 2047 = 23 * 89
        assert_eq!(mersenne_exponents(2), vec![2]);
    }

    #[test]
    fn mersenne_matches_q2_column() {
        let rep = scan_star(13, 2, ScanBudget::Unlimited).unwrap();
        let col: Vec<u64> = rep
            .rows
            .iter()
            .filter(|row| row.smallest_witness_q == Some(2))
            .map(|row| row.r)
            .collect();
        assert_eq!(col, mersenne_exponents(13));
    }

    #[test]
    fn witness_instance_examples() {
        let make = |r: u64, p: u64, k: u32, repunit: u64| StarWitness {
            r: nat(r),
            q_p: nat(p),
            q_k: k,
            q_value: nat(p).pow(k),
            repunit: nat(repunit),
            verdict: PrimalityVerdict {
                is_prime: true,
                method: PrimalityMethod::Deterministic,
                rounds: 0,
            },
        };
        let g = witness_to_group_instance(&make(5, 2, 1, 31)).unwrap();
        assert_eq!((g.k, g.ell, g.e.clone()), (5, 1, nat(1)));
        let g = witness_to_group_instance(&make(3, 3, 1, 13)).unwrap();
        assert_eq!((g.k, g.ell, g.e.clone()), (3, 1, nat(1)));
        let g = witness_to_group_instance(&make(3, 5, 1, 31)).unwrap();
        assert_eq!((g.k, g.ell, g.e.clone()), (3, 1, nat(2)));
    }

    #[test]
    fn witness_round_trip_matches_lemma_lower_bound() {
        // every witness from a real scan induces an L2 instance whose
        // formula lower bound is exactly r
        let rep = scan_star(7, 20, ScanBudget::Unlimited).unwrap();
        for w in rep.witnesses() {
            let inst = witness_to_group_instance(&w).unwrap();
            let report =
                crate::families::dm_formula_borel(Family::L2, &inst.p, inst.k, &inst.s).unwrap();
            let r = w.r.to_u64().unwrap() as u32;
            assert_eq!(report.lower, r, "witness (r={}, q={})", w.r, w.q_value);
            assert_eq!(report.e, inst.e);
        }
    }
}
