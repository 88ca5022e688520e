//! Acceptance suite: one test per criterion, each printing a PASS line
//! with its key numbers (run with `--nocapture` to see them).
//!
//! Run: cargo test -p secondmax --test acceptance

use num_traits::{One, ToPrimitive, Zero};
use secondmax::families::{
    agl1, arb_trichotomy, borel_maximal, dm_formula_agl, dm_formula_borel, l2_borel,
    mersenne_second_maximal, schreier_check, suzuki, third_maximal_chain_s12, trichotomy_grid,
    Family, TrichotomyCase,
};
use secondmax::modlat::{
    check_maximal_count_bound, fully_deleted_actor, fully_deleted_module, is_cyclic_module,
    random_modules, sn_maximal_catalogue, FpModule, Matrix,
};
use secondmax::numtheory::{self, nat, Natural};
use secondmax::permgroup::{
    d_exact, d_lower_bound, estimate_generation_probability, estimate_nu, nu_threshold,
    verify_chain, LinkVerdict, Perm, PermGroup,
};
use secondmax::starsearch::{mersenne_exponents, scan_star, CellVerdict, ScanBudget};
use std::collections::HashSet;
use std::time::Instant;

const ACCEPTANCE_SEED: u64 = 20240817;

fn report(criterion: &str, started: Instant, detail: String) {
    println!(
        "criterion {criterion}: PASS ({:.2}s) - {detail}",
        started.elapsed().as_secs_f64()
    );
}

/// Independent strong-probable-prime check, separate from the library
/// implementation: plain BigUint square-and-multiply rounds to the first
/// 40 prime bases.
fn independent_sprp(n: &Natural) -> bool {
    if n < &nat(3) {
        return *n == nat(2);
    }
    if (n % 2u32).is_zero() {
        return false;
    }
    let n_minus_1 = n - 1u32;
    let s = n_minus_1.trailing_zeros().unwrap();
    let d = &n_minus_1 >> s;
    'base: for a in numtheory::sieve_primes(200) {
        let a = nat(a);
        if &a >= n {
            break;
        }
        let mut x = a.modpow(&d, n);
        if x.is_one() || x == n_minus_1 {
            continue;
        }
        for _ in 1..s {
            x = (&x * &x) % n;
            if x == n_minus_1 {
                continue 'base;
            }
        }
        return false;
    }
    true
}

#[test]
fn c01_mersenne_scan() {
    let started = Instant::now();
    let exponents = mersenne_exponents(130);
    assert_eq!(
        exponents,
        vec![2, 3, 5, 7, 13, 17, 19, 31, 61, 89, 107, 127],
        "Mersenne exponents up to 130"
    );
    // re-verify every exponent with the independent implementation; the
    // values with 2^k - 1 < 2^64 additionally went through the
    // deterministic witness path inside the library
    for &k in &exponents {
        let m = (Natural::one() << (k as usize)) - 1u32;
        assert!(independent_sprp(&m), "independent SPRP rejects 2^{k} - 1");
    }
    // and no excluded exponent sneaks past the independent check wrongly
    for k in [
        11u64, 23, 29, 37, 41, 43, 47, 53, 59, 67, 71, 73, 79, 83, 97, 101, 103, 109, 113,
    ] {
        let m = (Natural::one() << (k as usize)) - 1u32;
        assert!(!independent_sprp(&m), "2^{k} - 1 is composite");
    }
    let elapsed = started.elapsed();
    assert!(
        elapsed.as_secs_f64() < 5.0,
        "runtime budget 5 s, took {elapsed:?}"
    );
    report(
        "1",
        started,
        format!(
            "{} exponents, all independently re-verified",
            exponents.len()
        ),
    );
}

#[test]
fn c02_mersenne_chains() {
    let started = Instant::now();
    let mut details = Vec::new();
    for k in [2u32, 3, 5, 7] {
        let r = mersenne_second_maximal(k).unwrap();
        assert_eq!(r.d_of_m, k, "d(M) = k for k = {k}");
        assert_eq!(r.chain.links.len(), 2);
        for (i, link) in r.chain.links.iter().enumerate() {
            assert!(
                matches!(link.verdict, LinkVerdict::Verified { .. }),
                "link {i} of k = {k} must be verified, got {:?}",
                link.verdict
            );
        }
        assert!(r.chain.depth_confirmed);
        details.push(format!(
            "k={k}: orders {:?}, d={}",
            r.chain.orders, r.d_of_m
        ));
    }
    let elapsed = started.elapsed();
    assert!(
        elapsed.as_secs_f64() < 120.0,
        "runtime budget 2 min, took {elapsed:?}"
    );
    report("2", started, details.join("; "));
}

fn divisors(n: u64) -> Vec<u64> {
    let mut out: Vec<u64> = (1..=n).filter(|d| n.is_multiple_of(*d)).collect();
    out.sort();
    out
}

fn prime_powers_upto(bound: u64) -> Vec<(u64, u64, u32)> {
    (2..=bound)
        .filter_map(|q| {
            numtheory::is_prime_power(&nat(q)).map(|(p, k)| (q, p.to_u64().unwrap(), k))
        })
        .collect()
}

#[test]
fn c03_agl_bracket_exhaustive() {
    let started = Instant::now();
    let mut cells = 0usize;
    let mut exact_hits_lower = 0usize;
    let mut exact_hits_upper = 0usize;
    for (q, p, k) in prime_powers_upto(256) {
        if q < 3 {
            // AGL_1(2) degenerates to Z_2: only e = 1, M = Z_2, d = 1
            let report = dm_formula_agl(&nat(p), k, &nat(1)).unwrap();
            assert!(report.brackets(1));
            cells += 1;
            continue;
        }
        let mb = agl1(q).unwrap();
        for e in divisors(q - 1) {
            let report = dm_formula_agl(&nat(p), k, &nat(e)).unwrap();
            let m = mb.torus_power_subgroup(e).unwrap();
            assert_eq!(m.order(), &(nat(q) * nat(e)), "|M| = q e at q={q}, e={e}");
            let d = d_exact(&m, 8)
                .unwrap_or_else(|err| panic!("d_exact must certify at q={q}, e={e}: {err}"));
            assert!(
                report.brackets(d.d as u32),
                "bracket violated at q={q} e={e}: d={} outside [{}, {}]",
                d.d,
                report.lower,
                report.upper
            );
            if d.d as u32 == report.lower {
                exact_hits_lower += 1;
            } else {
                exact_hits_upper += 1;
            }
            cells += 1;
        }
    }
    let elapsed = started.elapsed();
    assert!(
        elapsed.as_secs_f64() < 600.0,
        "runtime budget 10 min, took {elapsed:?}"
    );
    report(
        "3",
        started,
        format!(
            "{cells} cells, zero violations; d hit the lower bound {exact_hits_lower}x, the upper {exact_hits_upper}x"
        ),
    );
}

#[test]
fn c04_borel_bracket() {
    let started = Instant::now();
    let mut cells = 0usize;
    for (q, p, k) in prime_powers_upto(256) {
        if q < 4 {
            continue; // L2(2), L2(3) are not simple
        }
        let d_div = if q % 2 == 1 { 2 } else { 1 };
        let torus = (q - 1) / d_div;
        let mut mb = None;
        for s in divisors(torus)
            .into_iter()
            .filter(|&s| numtheory::is_prime_u64(s))
        {
            let report = dm_formula_borel(Family::L2, &nat(p), k, &nat(s)).unwrap();
            let mb = mb.get_or_insert_with(|| l2_borel(q).unwrap());
            let bm = borel_maximal(mb, s).unwrap();
            assert!(
                matches!(bm.maximality, Some(LinkVerdict::Verified { .. })),
                "M = U.{} must sweep-verify maximal in B at q={q}",
                bm.e
            );
            let d = d_exact(&bm.group, 8)
                .unwrap_or_else(|err| panic!("d_exact must certify at q={q}, s={s}: {err}"));
            assert!(
                report.brackets(d.d as u32),
                "bracket violated at L2({q}), s={s}: d={} outside [{}, {}]",
                d.d,
                report.lower,
                report.upper
            );
            cells += 1;
        }
    }
    // Sz(8) with s = 7: d(M) in {3, 4}
    let sz = suzuki(8).unwrap();
    let bm = borel_maximal(&sz, 7).unwrap();
    assert!(matches!(bm.maximality, Some(LinkVerdict::Verified { .. })));
    let d = d_exact(&bm.group, 8).unwrap();
    assert!(
        (3..=4).contains(&d.d),
        "d(M) for Sz(8), s = 7 must lie in {{3, 4}}, got {}",
        d.d
    );
    let report_sz = dm_formula_borel(Family::Sz, &nat(2), 3, &nat(7)).unwrap();
    assert!(report_sz.brackets(d.d as u32));
    cells += 1;
    report(
        "4",
        started,
        format!("{cells} Borel cells, zero violations"),
    );
}

#[test]
fn c05_trichotomy_exhaustive() {
    let started = Instant::now();
    let grid = trichotomy_grid(4096);
    assert!(!grid.is_empty());
    let mut case_counts = [0usize; 3];
    for &(family, p, k, s) in &grid {
        let d = match family {
            Family::L2 => {
                if p == 2 {
                    1
                } else {
                    2
                }
            }
            _ => 1,
        };
        let p_n = nat(p);
        let s_n = nat(s);
        // recompute the case conditions independently of the library path
        let q_minus_1 = p_n.pow(k) - 1u32;
        let e = &q_minus_1 / (nat(d) * &s_n);
        let ell = numtheory::multiplicative_order(&p_n, &e)
            .unwrap()
            .to_u32()
            .unwrap();
        let case = arb_trichotomy(&p_n, k, &s_n, d).unwrap_or_else(|err| {
            panic!("trichotomy violated at family={family:?} p={p} k={k} s={s}: {err}")
        });
        match case {
            TrichotomyCase::KEqEll => {
                assert_eq!(k, ell);
                case_counts[0] += 1;
            }
            TrichotomyCase::KEq2Ell => {
                assert_eq!(k, 2 * ell);
                case_counts[1] += 1;
            }
            TrichotomyCase::PrimeCase => {
                assert!(k != ell && k != 2 * ell);
                let value = &q_minus_1 / (p_n.pow(ell) - 1u32);
                assert_eq!(value, s_n, "prime case value equals s at p={p} k={k} s={s}");
                assert!(numtheory::is_prime(&value).is_prime);
                case_counts[2] += 1;
            }
        }
    }
    report(
        "5",
        started,
        format!(
            "{} cases (k=l: {}, k=2l: {}, prime: {}), zero violations",
            grid.len(),
            case_counts[0],
            case_counts[1],
            case_counts[2]
        ),
    );
}

fn identity_module(p: u64, dim: usize) -> FpModule {
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
fn c06_submodule_bound() {
    let started = Instant::now();
    // best possible: trivial action over F_2 meets the bound exactly
    for dim in 1..=4usize {
        let r = check_maximal_count_bound(&identity_module(2, dim)).unwrap();
        let expected = (1u64 << dim) - 1;
        assert_eq!(r.num_maximal as u64, expected, "trivial F_2 dim {dim}");
        assert_eq!(r.bound, nat(expected));
        assert!(r.satisfied);
    }
    // 200 seeded random modules
    let modules = random_modules(ACCEPTANCE_SEED, 200);
    assert_eq!(modules.len(), 200);
    for (i, m) in modules.iter().enumerate() {
        let r = check_maximal_count_bound(m).unwrap();
        assert!(
            r.satisfied,
            "bound violated on random module #{i} (p={}, dim={})",
            m.p, m.dim
        );
    }
    let elapsed = started.elapsed();
    assert!(
        elapsed.as_secs_f64() < 60.0,
        "runtime budget 1 min, took {elapsed:?}"
    );
    report(
        "6",
        started,
        "4 tight trivial cases + 200 random modules, all within bound".into(),
    );
}

#[test]
fn c07_fdp_cyclic() {
    let started = Instant::now();
    let mut checked = 0usize;
    for n in [5usize, 6, 7] {
        let catalogue = sn_maximal_catalogue(n).unwrap();
        for p in [2u64, 3, 5] {
            let module = fully_deleted_module(n, p).unwrap();
            let expected_dim = if (n as u64).is_multiple_of(p) {
                n - 2
            } else {
                n - 1
            };
            assert_eq!(module.dim, expected_dim, "dimension rule at n={n}, p={p}");
            for entry in &catalogue {
                let actors: Vec<Matrix> = entry
                    .group
                    .generators()
                    .iter()
                    .map(|g| fully_deleted_actor(n, p, g).unwrap())
                    .collect();
                let gen = is_cyclic_module(&module, &actors).unwrap();
                assert!(
                    gen.is_some(),
                    "no cyclic generator under {} for S_{n} over F_{p}",
                    entry.name
                );
                checked += 1;
            }
        }
    }
    report(
        "7",
        started,
        format!("{checked} (n, p, H) triples, every module cyclic"),
    );
}

#[test]
fn c08_schreier_chain() {
    let started = Instant::now();
    let t = third_maximal_chain_s12().unwrap();
    let (chain, assumptions, base) = (t.chain, t.assumptions, t.base);
    assert_eq!(
        chain
            .iter()
            .map(|g| g.order().to_string())
            .collect::<Vec<_>>(),
        vec!["1536", "7680", "46080", "479001600"]
    );
    let report_chain = verify_chain(&chain, &assumptions).unwrap();
    assert!(
        matches!(report_chain.links[0].verdict, LinkVerdict::Verified { .. }),
        "(S2)^6.S4 < S2 wr PGL2(5) must sweep-verify"
    );
    assert!(
        matches!(report_chain.links[1].verdict, LinkVerdict::Verified { .. }),
        "S2 wr PGL2(5) < S2 wr S6 must sweep-verify"
    );
    match &report_chain.links[2].verdict {
        LinkVerdict::Assumed { citation } => assert!(!citation.is_empty()),
        other => panic!("top link must be assumed with citation, got {other:?}"),
    }
    // d((S_2)^6) = 6 and the Schreier inequality with index 24
    let d_base = d_exact(&base, 8).unwrap();
    assert_eq!(d_base.d, 6);
    assert_eq!(d_lower_bound(&base).unwrap(), 6);
    let d_m = d_exact(&chain[0], 8).unwrap();
    let check = schreier_check(&nat(6), &nat(24), &nat(d_m.d as u64));
    assert!(
        check.holds,
        "d(B) - 1 <= 24 (d(M) - 1) with d(M) = {}",
        d_m.d
    );
    assert!(d_m.d >= 2);
    let elapsed = started.elapsed();
    assert!(
        elapsed.as_secs_f64() < 300.0,
        "runtime budget 5 min, took {elapsed:?}"
    );
    report(
        "8",
        started,
        format!(
            "links verified/verified/assumed, d(base) = 6, d(M) = {}",
            d_m.d
        ),
    );
}

/// Hash-set closure, independent of the stabilizer-chain machinery.
fn hash_closure_size(degree: usize, gens: &[&Perm]) -> usize {
    let mut set = HashSet::new();
    set.insert(Perm::identity(degree));
    let mut frontier = vec![Perm::identity(degree)];
    while let Some(x) = frontier.pop() {
        for g in gens {
            let y = x.then(g);
            if set.insert(y.clone()) {
                frontier.push(y);
            }
        }
    }
    set.len()
}

#[test]
fn c09_random_generation() {
    let started = Instant::now();
    // exact P(L2(8), 2) by complete enumeration over ordered pairs,
    // using the independent hash closure
    let g = secondmax::families::psl2(8).unwrap();
    let order = g.order_u64().unwrap() as usize;
    assert_eq!(order, 504);
    let elements = g.elements();
    let mut generating_unordered = 0u64;
    let mut generating_diagonal = 0u64;
    for i in 0..order {
        for j in i..order {
            let size = hash_closure_size(9, &[&elements[i], &elements[j]]);
            if size == order {
                if i == j {
                    generating_diagonal += 1;
                } else {
                    generating_unordered += 1;
                }
            }
        }
    }
    let ordered_successes = 2 * generating_unordered + generating_diagonal;
    let exact = ordered_successes as f64 / (order * order) as f64;

    let est = estimate_generation_probability(&g, 2, 10_000, ACCEPTANCE_SEED);
    assert!(
        (est.estimate - exact).abs() <= 3.0 * est.std_error,
        "estimate {} vs exact {exact} beyond 3 se ({})",
        est.estimate,
        est.std_error
    );

    // battery: nu_hat >= d_exact, and P(G, k) monotone within 3 sigma
    let battery: Vec<(&str, PermGroup)> = vec![
        ("cyclic(2)", {
            let c = Perm::from_cycles(2, &[&[0, 1]]).unwrap();
            PermGroup::from_generators(2, vec![c]).unwrap()
        }),
        ("cyclic(6)", {
            let c = Perm::from_cycles(6, &[&[0, 1, 2, 3, 4, 5]]).unwrap();
            PermGroup::from_generators(6, vec![c]).unwrap()
        }),
        ("elab(2,5)", {
            let gens: Vec<Perm> = (0..5)
                .map(|i| Perm::from_cycles(10, &[&[2 * i, 2 * i + 1]]).unwrap())
                .collect();
            PermGroup::from_generators(10, gens).unwrap()
        }),
        ("sym(4)", {
            let t = Perm::from_cycles(4, &[&[0, 1]]).unwrap();
            let c = Perm::from_cycles(4, &[&[0, 1, 2, 3]]).unwrap();
            PermGroup::from_generators(4, vec![t, c]).unwrap()
        }),
        ("l2(8)", g.clone()),
        ("agl1(16)", agl1(16).unwrap().borel),
    ];
    let mut nu_summary = Vec::new();
    for (name, group) in &battery {
        let d = d_exact(group, 8).unwrap().d;
        let nu = estimate_nu(group, 4000, ACCEPTANCE_SEED ^ 0xabcd, 16).unwrap();
        assert!(nu.nu_hat >= d, "{name}: nu_hat {} < d {d}", nu.nu_hat);
        // the last table entry crossed the threshold
        assert!(nu.table.last().unwrap().estimate >= nu_threshold());
        // monotone within 3 sigma per adjacent pair
        for w in nu.table.windows(2) {
            let tolerance = 3.0 * (w[0].std_error.powi(2) + w[1].std_error.powi(2)).sqrt();
            assert!(
                w[1].estimate >= w[0].estimate - tolerance,
                "{name}: P at k={} dropped beyond 3 sigma",
                w[1].k
            );
        }
        nu_summary.push(format!("{name}: d={d}, nu_hat={}", nu.nu_hat));
    }
    report(
        "9",
        started,
        format!(
            "P(L2(8), 2) exact {exact:.4} vs estimate {:.4} (se {:.4}); {}",
            est.estimate,
            est.std_error,
            nu_summary.join(", ")
        ),
    );
}

#[test]
fn c10_scan_consistency() {
    let started = Instant::now();
    let reference = scan_star(13, 100, ScanBudget::Unlimited).unwrap();
    let reference_bytes = serde_json::to_string(&reference).unwrap();
    for threads in [1usize, 8] {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap();
        let rep = pool.install(|| scan_star(13, 100, ScanBudget::Unlimited).unwrap());
        assert_eq!(
            serde_json::to_string(&rep).unwrap(),
            reference_bytes,
            "scan bytes differ at {threads} workers"
        );
    }
    // every witness re-verifies with fresh randomness
    let witnesses = reference.witnesses();
    assert!(!witnesses.is_empty());
    for w in &witnesses {
        assert!(
            w.reverify(ACCEPTANCE_SEED ^ 0x77),
            "witness (r={}, q={}) failed re-verification",
            w.r,
            w.q_value
        );
    }
    // every composite below 2^64 carries a verified nontrivial factor
    let mut factored = 0usize;
    for row in &reference.rows {
        for cell in &row.cells {
            if cell.verdict == CellVerdict::Composite {
                let value = numtheory::repunit_value(&nat(cell.q), &nat(cell.r));
                if value.to_u64().is_some() {
                    let f = cell.factor.as_ref().unwrap_or_else(|| {
                        panic!("composite ({}, {}) lacks a factor", cell.r, cell.q)
                    });
                    assert!(f > &Natural::one() && f < &value);
                    assert!((&value % f).is_zero(), "stored factor must divide");
                    factored += 1;
                }
            }
        }
    }
    report(
        "10",
        started,
        format!(
            "byte-identical at 1 and 8 workers; {} witnesses re-verified; {factored} composites carry dividing factors",
            witnesses.len()
        ),
    );
}
