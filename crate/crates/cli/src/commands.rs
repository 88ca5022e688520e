//! Subcommand implementations.

use crate::output::{envelope, Format, Sink};
use crate::{CliError, RunConfig};
use clap::Subcommand;
use num_traits::ToPrimitive;
use secondmax::families::{
    self, agl1, attach_oracle, borel_maximal, dm_formula_agl, dm_formula_borel, l2_borel,
    mersenne_second_maximal, psl2, schreier_check, suzuki, BoundReport, Family,
};
use secondmax::modlat::{
    self, check_maximal_count_bound, fully_deleted_actor, fully_deleted_module, is_cyclic_module,
    sn_maximal_catalogue, FpModule, Matrix,
};
use secondmax::numtheory::Natural;
use secondmax::permgroup::{estimate_nu, verify_chain, GroupDoc, LinkVerdict, Perm, PermGroup};
use secondmax::starsearch::{
    checkpoint_of, mersenne_exponents, scan_star_resumable, ScanBudget, ScanCheckpoint, StarError,
    StarReport,
};
use serde::{Deserialize, Serialize};
use serde_json::json;
use std::time::Duration;

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Scan primes r <= r-max against prime powers q <= q-max for prime
    /// repunit values (q^r - 1)/(q - 1)
    StarScan {
        #[arg(long, value_name = "N")]
        r_max: u64,
        #[arg(long, value_name = "N")]
        q_max: u64,
        /// Wall-time budget in seconds (fractions allowed)
        #[arg(long)]
        budget_secs: Option<f64>,
        /// Checkpoint file: resumed when present, rewritten after the run
        #[arg(long)]
        checkpoint: Option<std::path::PathBuf>,
    },
    /// Mersenne exponent scan: primes k <= k-max with 2^k - 1 prime
    Mersenne {
        #[arg(long, value_name = "N")]
        k_max: u64,
    },
    /// Generator-count bounds for M = F_q.E inside AGL_1(q), q = p^k
    DmAgl {
        #[arg(long)]
        p: String,
        #[arg(long)]
        k: u32,
        #[arg(long)]
        e: String,
        /// Also construct M and certify d(M) exactly where feasible
        #[arg(long)]
        oracle: bool,
    },
    /// Generator-count bounds for the Borel second maximal M = U.e of
    /// prime index s (families: l2, sz, ree)
    DmBorel {
        #[arg(long)]
        family: Family,
        #[arg(long)]
        p: String,
        #[arg(long)]
        k: u32,
        #[arg(long)]
        s: String,
        #[arg(long)]
        oracle: bool,
    },
    /// Exhaustive trichotomy check over all valid (family, p, k, s) with
    /// p^k <= max-q
    TrichotomyScan {
        #[arg(long, value_name = "N")]
        max_q: u64,
    },
    /// Verify (Z_2)^k < B < L_2(2^k) and d(M) = k for a Mersenne exponent
    VerifyMersenneChain {
        #[arg(long)]
        k: u32,
    },
    /// Verify the maximality links of a subgroup chain
    VerifyChain {
        /// JSON chain document (ascending groups, optional assumptions)
        #[arg(long, conflicts_with = "builtin")]
        file: Option<std::path::PathBuf>,
        /// Built-in chain: "schreier-s12"
        #[arg(long)]
        builtin: Option<String>,
    },
    /// Maximal-submodule counting against the |M/JM| - 1 bound
    SubmoduleBound {
        /// trivial | random | fdp
        #[arg(long)]
        kind: String,
        #[arg(long)]
        p: Option<u64>,
        #[arg(long)]
        dim: Option<usize>,
        #[arg(long)]
        n: Option<usize>,
        /// Number of seeded random modules (kind = random)
        #[arg(long, default_value_t = 200)]
        count: usize,
    },
    /// Cyclic-generator search for the fully deleted module under every
    /// catalogued maximal subgroup of S_n
    FdpCyclic {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        p: u64,
        /// Restrict to one catalogue entry by name
        #[arg(long)]
        subgroup: Option<String>,
    },
    /// Monte-Carlo estimate of nu(G): least k with P(G, k) >= 1/e
    NuEstimate {
        /// sym(n) | alt(n) | cyclic(n) | elab(p,k) | l2(q) | sz(q) |
        /// agl1(q) | file:PATH
        #[arg(long)]
        group: String,
        #[arg(long, default_value_t = 10_000)]
        trials: u64,
        #[arg(long, default_value_t = 16)]
        k_cap: usize,
    },
    /// The Schreier index inequality d_sub - 1 <= index (d_sup - 1)
    SchreierCheck {
        #[arg(long)]
        d_sub: String,
        #[arg(long)]
        index: String,
        #[arg(long)]
        d_sup: String,
    },
}

fn parse_nat(s: &str, what: &str) -> Result<Natural, CliError> {
    s.parse()
        .map_err(|_| CliError::Usage(format!("{what} must be a nonnegative integer, got '{s}'")))
}

fn fam_err(e: families::FamiliesError) -> CliError {
    match e {
        families::FamiliesError::TrichotomyViolated { .. } => CliError::Refuted(e.to_string()),
        _ => CliError::Resource(e.to_string()),
    }
}

pub fn run(cmd: &Command, config: &RunConfig) -> Result<(), CliError> {
    match cmd {
        Command::StarScan {
            r_max,
            q_max,
            budget_secs,
            checkpoint,
        } => star_scan(config, *r_max, *q_max, *budget_secs, checkpoint.as_deref()),
        Command::Mersenne { k_max } => mersenne(config, *k_max),
        Command::DmAgl { p, k, e, oracle } => dm_agl(config, p, *k, e, *oracle),
        Command::DmBorel {
            family,
            p,
            k,
            s,
            oracle,
        } => dm_borel(config, *family, p, *k, s, *oracle),
        Command::TrichotomyScan { max_q } => trichotomy_scan(config, *max_q),
        Command::VerifyMersenneChain { k } => verify_mersenne(config, *k),
        Command::VerifyChain { file, builtin } => {
            verify_chain_cmd(config, file.as_deref(), builtin.as_deref())
        }
        Command::SubmoduleBound {
            kind,
            p,
            dim,
            n,
            count,
        } => submodule_bound(config, kind, *p, *dim, *n, *count),
        Command::FdpCyclic { n, p, subgroup } => fdp_cyclic(config, *n, *p, subgroup.as_deref()),
        Command::NuEstimate {
            group,
            trials,
            k_cap,
        } => nu_estimate(config, group, *trials, *k_cap),
        Command::SchreierCheck {
            d_sub,
            index,
            d_sup,
        } => schreier_cmd(config, d_sub, index, d_sup),
    }
}

// --- star-scan ---

fn star_scan(
    config: &RunConfig,
    r_max: u64,
    q_max: u64,
    budget_secs: Option<f64>,
    checkpoint: Option<&std::path::Path>,
) -> Result<(), CliError> {
    let budget = match budget_secs {
        Some(s) if s < 0.0 => return Err(CliError::Usage("budget must be nonnegative".into())),
        Some(s) => ScanBudget::WallTime(Duration::from_secs_f64(s)),
        None => ScanBudget::Unlimited,
    };
    let resume: Option<ScanCheckpoint> = match checkpoint {
        Some(path) if path.exists() => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| CliError::Resource(format!("checkpoint read: {e}")))?;
            Some(
                serde_json::from_str(&text)
                    .map_err(|e| CliError::Resource(format!("checkpoint parse: {e}")))?,
            )
        }
        _ => None,
    };
    let result = scan_star_resumable(r_max, q_max, budget, resume.as_ref());
    let (report, exhausted) = match result {
        Ok(report) => (report, false),
        Err(StarError::BudgetExhausted { partial }) => (*partial, true),
        Err(e) => return Err(CliError::Usage(e.to_string())),
    };
    if let Some(path) = checkpoint {
        let cp = checkpoint_of(&report);
        let text = serde_json::to_string(&cp)
            .map_err(|e| CliError::Resource(format!("checkpoint serialize: {e}")))?;
        std::fs::write(path, text)
            .map_err(|e| CliError::Resource(format!("checkpoint write: {e}")))?;
    }
    emit_star_report(config, &report, r_max, q_max)?;
    if exhausted {
        return Err(CliError::Resource(format!(
            "budget exhausted; high water {:?}; partial report emitted",
            report.high_water
        )));
    }
    Ok(())
}

fn emit_star_report(
    config: &RunConfig,
    report: &StarReport,
    r_max: u64,
    q_max: u64,
) -> Result<(), CliError> {
    let mut sink = Sink::new(config)?;
    match config.format {
        Format::Jsonl => {
            for row in &report.rows {
                sink.json(row)?;
            }
        }
        Format::Json => {
            let env = envelope(
                "star-scan",
                json!({"r_max": r_max, "q_max": q_max}),
                config.seed,
                report,
            );
            sink.json(&env)?;
        }
        Format::Csv => {
            sink.line("r,q_p,q_k,repunit_decimal_length,verdict,method")?;
            for row in &report.rows {
                for c in &row.cells {
                    sink.line(&format!(
                        "{},{},{},{},{},{}",
                        c.r,
                        c.q_p,
                        c.q_k,
                        c.repunit_decimal_length,
                        match c.verdict {
                            secondmax::starsearch::CellVerdict::Prime => "prime",
                            secondmax::starsearch::CellVerdict::Composite => "composite",
                        },
                        match c.method {
                            secondmax::numtheory::PrimalityMethod::Deterministic => "deterministic",
                            secondmax::numtheory::PrimalityMethod::Probabilistic => "probabilistic",
                        }
                    ))?;
                }
            }
        }
        Format::Text => {
            sink.line(&format!(
                "star scan r <= {r_max}, q <= {q_max} ({:.2?})",
                report.wall_time
            ))?;
            for row in &report.rows {
                let witness = match row.smallest_witness_q {
                    Some(q) => format!("smallest q = {q}"),
                    None => "no witness".to_string(),
                };
                sink.line(&format!(
                    "r = {:>4}: {witness}, {} witnesses, {} composites{}",
                    row.r,
                    row.witness_count,
                    row.composites_checked,
                    if row.complete { "" } else { " [incomplete]" }
                ))?;
            }
        }
    }
    Ok(())
}

// --- mersenne ---

fn mersenne(config: &RunConfig, k_max: u64) -> Result<(), CliError> {
    if k_max < 2 {
        return Err(CliError::Usage("k-max must be >= 2".into()));
    }
    let exponents = mersenne_exponents(k_max);
    let mut sink = Sink::new(config)?;
    match config.format {
        Format::Json => sink.json(&envelope(
            "mersenne",
            json!({"k_max": k_max}),
            config.seed,
            json!({ "exponents": exponents }),
        ))?,
        Format::Jsonl => {
            for k in &exponents {
                sink.json(&json!({ "k": k }))?;
            }
        }
        Format::Csv => {
            sink.line("k")?;
            for k in &exponents {
                sink.line(&k.to_string())?;
            }
        }
        Format::Text => {
            sink.line(&format!(
                "Mersenne exponents k <= {k_max}: {}",
                exponents
                    .iter()
                    .map(|k| k.to_string())
                    .collect::<Vec<_>>()
                    .join(", ")
            ))?;
        }
    }
    Ok(())
}

// --- dm-agl / dm-borel ---

fn bound_csv_row(r: &BoundReport) -> String {
    format!(
        "{},{},{},{},{},{},{},{},{},{}",
        r.family.map(|f| f.name()).unwrap_or(""),
        r.p,
        r.k,
        r.e,
        r.s.as_ref().map(|s| s.to_string()).unwrap_or_default(),
        r.ell,
        r.lower,
        r.upper,
        r.oracle_exact.map(|d| d.to_string()).unwrap_or_default(),
        r.trichotomy_case.map(|c| c.name()).unwrap_or("")
    )
}

const BOUND_CSV_HEADER: &str = "family,p,k,e,s,ell,lower,upper,exact,case";

fn emit_bound_reports(
    config: &RunConfig,
    command: &'static str,
    params: serde_json::Value,
    reports: &[BoundReport],
) -> Result<(), CliError> {
    let mut sink = Sink::new(config)?;
    match config.format {
        Format::Json => {
            sink.json(&envelope(command, params, config.seed, reports))?;
        }
        Format::Jsonl => {
            for r in reports {
                sink.json(r)?;
            }
        }
        Format::Csv => {
            sink.line(BOUND_CSV_HEADER)?;
            for r in reports {
                sink.line(&bound_csv_row(r))?;
            }
        }
        Format::Text => {
            for r in reports {
                let oracle = match (r.oracle_exact, r.oracle_upper) {
                    (Some(d), _) => format!(", d = {d} (certified)"),
                    (None, Some(u)) => format!(", d <= {u} (exact undetermined)"),
                    _ => String::new(),
                };
                sink.line(&format!(
                    "{} p={} k={} e={} ell={}: {} <= d(M) <= {}{}{}",
                    r.family.map(|f| f.name()).unwrap_or("agl1"),
                    r.p,
                    r.k,
                    r.e,
                    r.ell,
                    r.lower,
                    r.upper,
                    r.trichotomy_case
                        .map(|c| format!(" [{}]", c.name()))
                        .unwrap_or_default(),
                    oracle
                ))?;
            }
        }
    }
    Ok(())
}

fn dm_agl(config: &RunConfig, p: &str, k: u32, e: &str, oracle: bool) -> Result<(), CliError> {
    let p_n = parse_nat(p, "p")?;
    let e_n = parse_nat(e, "e")?;
    let mut report = dm_formula_agl(&p_n, k, &e_n).map_err(fam_err)?;
    if oracle {
        let q = p_n
            .pow(k)
            .to_u64()
            .filter(|&q| q <= families::AGL1_Q_CAP)
            .ok_or_else(|| CliError::Resource("oracle requires p^k <= 4096".into()))?;
        let mb = agl1(q).map_err(fam_err)?;
        let e_small = e_n.to_u64().expect("e <= q - 1");
        attach_oracle(&mut report, &mb, e_small).map_err(fam_err)?;
    }
    let params = json!({"p": p, "k": k, "e": e, "oracle": oracle});
    emit_bound_reports(config, "dm-agl", params, std::slice::from_ref(&report))?;
    if let Some(d) = report.oracle_exact {
        if !report.brackets(d) {
            return Err(CliError::Refuted(format!(
                "bound violated: d = {d} outside [{}, {}]",
                report.lower, report.upper
            )));
        }
    }
    Ok(())
}

fn dm_borel(
    config: &RunConfig,
    family: Family,
    p: &str,
    k: u32,
    s: &str,
    oracle: bool,
) -> Result<(), CliError> {
    let p_n = parse_nat(p, "p")?;
    let s_n = parse_nat(s, "s")?;
    let mut report = dm_formula_borel(family, &p_n, k, &s_n).map_err(fam_err)?;
    if oracle {
        let q = p_n
            .pow(k)
            .to_u64()
            .ok_or_else(|| CliError::Resource("oracle requires a small prime power".into()))?;
        let mb = match family {
            Family::L2 => l2_borel(q).map_err(fam_err)?,
            Family::Sz => suzuki(q).map_err(fam_err)?,
            _ => {
                return Err(CliError::Resource(
                    "oracle constructions exist for the l2 and sz families only".into(),
                ))
            }
        };
        let s_small = s_n.to_u64().expect("s <= q - 1");
        let bm = borel_maximal(&mb, s_small).map_err(fam_err)?;
        if matches!(bm.maximality, Some(LinkVerdict::Refuted)) {
            return Err(CliError::Refuted(
                "M failed its maximality sweep in B".into(),
            ));
        }
        attach_oracle(&mut report, &mb, bm.e).map_err(fam_err)?;
    }
    let params = json!({
        "family": family.name(), "p": p, "k": k, "s": s, "oracle": oracle
    });
    emit_bound_reports(config, "dm-borel", params, std::slice::from_ref(&report))?;
    if let Some(d) = report.oracle_exact {
        if !report.brackets(d) {
            return Err(CliError::Refuted(format!(
                "bound violated: d = {d} outside [{}, {}]",
                report.lower, report.upper
            )));
        }
    }
    Ok(())
}

// --- trichotomy-scan ---

fn trichotomy_scan(config: &RunConfig, max_q: u64) -> Result<(), CliError> {
    if max_q < 4 {
        return Err(CliError::Usage("max-q must be >= 4".into()));
    }
    let mut reports = Vec::new();
    for (family, p, k, s) in families::trichotomy_grid(max_q) {
        let report =
            dm_formula_borel(family, &Natural::from(p), k, &Natural::from(s)).map_err(fam_err)?;
        reports.push(report);
    }
    let params = json!({"max_q": max_q, "cases": reports.len()});
    emit_bound_reports(config, "trichotomy-scan", params, &reports)
}

// --- verify-mersenne-chain / verify-chain ---

fn verify_mersenne(config: &RunConfig, k: u32) -> Result<(), CliError> {
    let result = mersenne_second_maximal(k).map_err(fam_err)?;
    let mut sink = Sink::new(config)?;
    match config.format {
        Format::Text => {
            sink.line(&format!(
                "chain orders {:?}, links {}, d(M) = {}",
                result.chain.orders,
                result
                    .chain
                    .links
                    .iter()
                    .map(|l| format!("{:?}", l.verdict))
                    .collect::<Vec<_>>()
                    .join(" / "),
                result.d_of_m
            ))?;
        }
        _ => {
            sink.json(&envelope(
                "verify-mersenne-chain",
                json!({"k": k}),
                config.seed,
                &result,
            ))?;
        }
    }
    if !result.chain.depth_confirmed {
        return Err(CliError::Refuted("a maximality link was refuted".into()));
    }
    if result.d_of_m != k {
        return Err(CliError::Refuted(format!(
            "d(M) = {} differs from k = {k}",
            result.d_of_m
        )));
    }
    Ok(())
}

#[derive(Deserialize)]
struct ChainFileGroup {
    #[allow(dead_code)]
    name: Option<String>,
    generators: Vec<Vec<u32>>,
}

#[derive(Deserialize)]
struct ChainFile {
    degree: usize,
    groups: Vec<ChainFileGroup>,
    #[serde(default)]
    assumptions: Vec<ChainFileAssumption>,
}

#[derive(Deserialize)]
struct ChainFileAssumption {
    link: usize,
    citation: String,
}

fn verify_chain_cmd(
    config: &RunConfig,
    file: Option<&std::path::Path>,
    builtin: Option<&str>,
) -> Result<(), CliError> {
    let (chain, assumptions) = match (file, builtin) {
        (Some(path), None) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| CliError::Resource(format!("chain file: {e}")))?;
            let doc: ChainFile = serde_json::from_str(&text)
                .map_err(|e| CliError::Usage(format!("chain file parse: {e}")))?;
            let mut groups = Vec::new();
            for g in &doc.groups {
                let gens: Result<Vec<Perm>, _> = g
                    .generators
                    .iter()
                    .map(|v| Perm::from_images(v.clone()))
                    .collect();
                let gens = gens.map_err(|e| CliError::Usage(e.to_string()))?;
                groups.push(
                    PermGroup::from_generators(doc.degree, gens)
                        .map_err(|e| CliError::Usage(e.to_string()))?,
                );
            }
            let assumptions = doc
                .assumptions
                .into_iter()
                .map(|a| (a.link, a.citation))
                .collect();
            (groups, assumptions)
        }
        (None, Some("schreier-s12")) => {
            let t = families::third_maximal_chain_s12().map_err(fam_err)?;
            (t.chain, t.assumptions)
        }
        (None, Some(other)) => {
            return Err(CliError::Usage(format!("unknown builtin chain '{other}'")))
        }
        _ => {
            return Err(CliError::Usage(
                "provide exactly one of --file or --builtin".into(),
            ))
        }
    };
    let report = verify_chain(&chain, &assumptions).map_err(|e| CliError::Usage(e.to_string()))?;
    let mut sink = Sink::new(config)?;
    match config.format {
        Format::Text => {
            sink.line(&format!("orders: {:?}", report.orders))?;
            for (i, link) in report.links.iter().enumerate() {
                sink.line(&format!(
                    "link {i}: index {} -> {:?}",
                    link.index, link.verdict
                ))?;
            }
            sink.line(&format!(
                "depth {} {}",
                report.depth_claimed,
                if report.depth_confirmed {
                    "confirmed"
                } else {
                    "NOT confirmed"
                }
            ))?;
        }
        _ => sink.json(&envelope(
            "verify-chain",
            json!({"levels": report.orders.len()}),
            config.seed,
            &report,
        ))?,
    }
    if report
        .links
        .iter()
        .any(|l| matches!(l.verdict, LinkVerdict::Refuted))
    {
        return Err(CliError::Refuted("a maximality link was refuted".into()));
    }
    if report
        .links
        .iter()
        .any(|l| matches!(l.verdict, LinkVerdict::Failed { .. }))
    {
        return Err(CliError::Resource(
            "a maximality link could not be decided".into(),
        ));
    }
    Ok(())
}

// --- submodule-bound ---

#[derive(Serialize)]
struct BoundRow {
    label: String,
    #[serde(flatten)]
    report: modlat::SubmoduleCountReport,
}

fn submodule_bound(
    config: &RunConfig,
    kind: &str,
    p: Option<u64>,
    dim: Option<usize>,
    n: Option<usize>,
    count: usize,
) -> Result<(), CliError> {
    let mod_err = |e: modlat::ModlatError| CliError::Resource(e.to_string());
    let mut rows: Vec<BoundRow> = Vec::new();
    match kind {
        "trivial" => {
            let p = p.ok_or_else(|| CliError::Usage("trivial needs --p".into()))?;
            let dim = dim.ok_or_else(|| CliError::Usage("trivial needs --dim".into()))?;
            let module = identity_module(p, dim).map_err(mod_err)?;
            let report = check_maximal_count_bound(&module).map_err(mod_err)?;
            rows.push(BoundRow {
                label: format!("trivial p={p} dim={dim}"),
                report,
            });
        }
        "random" => {
            for (i, module) in modlat::random_modules(config.seed, count)
                .into_iter()
                .enumerate()
            {
                let report = check_maximal_count_bound(&module).map_err(mod_err)?;
                rows.push(BoundRow {
                    label: format!("random #{i} p={} dim={}", module.p, module.dim),
                    report,
                });
            }
        }
        "fdp" => {
            let p = p.ok_or_else(|| CliError::Usage("fdp needs --p".into()))?;
            let n = n.ok_or_else(|| CliError::Usage("fdp needs --n".into()))?;
            let module = fully_deleted_module(n, p).map_err(mod_err)?;
            let report = check_maximal_count_bound(&module).map_err(mod_err)?;
            rows.push(BoundRow {
                label: format!("fdp n={n} p={p}"),
                report,
            });
        }
        other => {
            return Err(CliError::Usage(format!(
                "unknown kind '{other}'; expected trivial | random | fdp"
            )))
        }
    }
    let mut sink = Sink::new(config)?;
    match config.format {
        Format::Json => sink.json(&envelope(
            "submodule-bound",
            json!({"kind": kind, "count": rows.len()}),
            config.seed,
            &rows,
        ))?,
        Format::Jsonl => {
            for row in &rows {
                sink.json(row)?;
            }
        }
        Format::Csv => {
            sink.line("label,p,dim,num_maximal,radical_dim,bound,satisfied")?;
            for row in &rows {
                sink.line(&format!(
                    "{},{},{},{},{},{},{}",
                    row.label,
                    row.report.p,
                    row.report.dim,
                    row.report.num_maximal,
                    row.report.radical_dim,
                    row.report.bound,
                    row.report.satisfied
                ))?;
            }
        }
        Format::Text => {
            for row in &rows {
                sink.line(&format!(
                    "{}: {} maximal submodules, bound {}, {}",
                    row.label,
                    row.report.num_maximal,
                    row.report.bound,
                    if row.report.satisfied {
                        "ok"
                    } else {
                        "VIOLATED"
                    }
                ))?;
            }
        }
    }
    if let Some(bad) = rows.iter().find(|r| !r.report.satisfied) {
        return Err(CliError::Refuted(format!(
            "maximal-submodule bound violated for {}",
            bad.label
        )));
    }
    Ok(())
}

fn identity_module(p: u64, dim: usize) -> Result<FpModule, modlat::ModlatError> {
    let id: Matrix = (0..dim)
        .map(|i| {
            let mut row = vec![0u64; dim];
            row[i] = 1;
            row
        })
        .collect();
    FpModule::new(p, dim, vec![id])
}

// --- fdp-cyclic ---

#[derive(Serialize)]
struct FdpRow {
    subgroup: String,
    order: String,
    transitive: bool,
    found: bool,
    generator: Option<Vec<u64>>,
}

fn fdp_cyclic(
    config: &RunConfig,
    n: usize,
    p: u64,
    subgroup: Option<&str>,
) -> Result<(), CliError> {
    let mod_err = |e: modlat::ModlatError| CliError::Resource(e.to_string());
    let module = fully_deleted_module(n, p).map_err(mod_err)?;
    let catalogue = sn_maximal_catalogue(n).map_err(fam_err)?;
    let mut rows = Vec::new();
    for entry in &catalogue {
        if let Some(name) = subgroup {
            if entry.name != name {
                continue;
            }
        }
        let actors: Result<Vec<Matrix>, _> = entry
            .group
            .generators()
            .iter()
            .map(|g| fully_deleted_actor(n, p, g))
            .collect();
        let actors = actors.map_err(mod_err)?;
        let generator = is_cyclic_module(&module, &actors).map_err(mod_err)?;
        rows.push(FdpRow {
            subgroup: entry.name.clone(),
            order: entry.group.order().to_string(),
            transitive: entry.transitive,
            found: generator.is_some(),
            generator,
        });
    }
    if rows.is_empty() {
        return Err(CliError::Usage(format!(
            "no catalogue entry named '{}' in S_{n}",
            subgroup.unwrap_or("")
        )));
    }
    let mut sink = Sink::new(config)?;
    match config.format {
        Format::Json => sink.json(&envelope(
            "fdp-cyclic",
            json!({"n": n, "p": p, "dim": module.dim}),
            config.seed,
            &rows,
        ))?,
        Format::Jsonl => {
            for row in &rows {
                sink.json(row)?;
            }
        }
        Format::Csv => {
            sink.line("subgroup,order,transitive,found")?;
            for row in &rows {
                sink.line(&format!(
                    "{},{},{},{}",
                    row.subgroup, row.order, row.transitive, row.found
                ))?;
            }
        }
        Format::Text => {
            sink.line(&format!(
                "fully deleted module for S_{n} over F_{p}: dim {}",
                module.dim
            ))?;
            for row in &rows {
                sink.line(&format!(
                    "{} (order {}): {}",
                    row.subgroup,
                    row.order,
                    match &row.generator {
                        Some(v) => format!("cyclic generator {v:?}"),
                        None => "NO cyclic generator".to_string(),
                    }
                ))?;
            }
        }
    }
    if let Some(bad) = rows.iter().find(|r| !r.found) {
        return Err(CliError::Refuted(format!(
            "no cyclic generator under {} for S_{n} over F_{p}",
            bad.subgroup
        )));
    }
    Ok(())
}

// --- nu-estimate ---

/// Builds one of the named test groups.
pub fn parse_group_spec(spec: &str) -> Result<PermGroup, CliError> {
    let usage = || {
        CliError::Usage(format!(
            "bad group spec '{spec}'; expected sym(n), alt(n), cyclic(n), elab(p,k), l2(q), sz(q), agl1(q), or file:PATH"
        ))
    };
    if let Some(path) = spec.strip_prefix("file:") {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Resource(format!("group file: {e}")))?;
        let doc: GroupDoc = serde_json::from_str(&text)
            .map_err(|e| CliError::Usage(format!("group file parse: {e}")))?;
        return PermGroup::from_doc(&doc).map_err(|e| CliError::Usage(e.to_string()));
    }
    let (name, args) = spec
        .split_once('(')
        .and_then(|(n, rest)| rest.strip_suffix(')').map(|a| (n, a)))
        .ok_or_else(usage)?;
    let nums: Vec<u64> = args
        .split(',')
        .map(|a| a.trim().parse::<u64>())
        .collect::<Result<_, _>>()
        .map_err(|_| usage())?;
    let ge = |e: families::FamiliesError| CliError::Resource(e.to_string());
    match (name, nums.as_slice()) {
        ("sym", [n]) if *n >= 2 => {
            let n = *n as usize;
            let t = Perm::from_cycles(n, &[&[0, 1]]).unwrap();
            let c = Perm::from_cycles(n, &[&(0..n as u32).collect::<Vec<_>>()]).unwrap();
            PermGroup::from_generators(n, vec![t, c]).map_err(|e| CliError::Usage(e.to_string()))
        }
        ("alt", [n]) if *n >= 3 => {
            let n = *n as usize;
            let a = Perm::from_cycles(n, &[&[0, 1, 2]]).unwrap();
            let b = if n % 2 == 1 {
                Perm::from_cycles(n, &[&(0..n as u32).collect::<Vec<_>>()]).unwrap()
            } else {
                Perm::from_cycles(n, &[&(1..n as u32).collect::<Vec<_>>()]).unwrap()
            };
            PermGroup::from_generators(n, vec![a, b]).map_err(|e| CliError::Usage(e.to_string()))
        }
        ("cyclic", [n]) if *n >= 1 => {
            let n = *n as usize;
            let c = Perm::from_cycles(n, &[&(0..n as u32).collect::<Vec<_>>()]).unwrap();
            PermGroup::from_generators(n, vec![c]).map_err(|e| CliError::Usage(e.to_string()))
        }
        ("elab", [p, k]) => {
            if !secondmax::numtheory::is_prime_u64(*p) {
                return Err(usage());
            }
            let p = *p as usize;
            let k = *k as usize;
            let degree = p * k;
            let gens: Vec<Perm> = (0..k)
                .map(|i| {
                    let cycle: Vec<u32> = (0..p as u32).map(|j| (i * p) as u32 + j).collect();
                    Perm::from_cycles(degree, &[&cycle]).unwrap()
                })
                .collect();
            PermGroup::from_generators(degree, gens).map_err(|e| CliError::Usage(e.to_string()))
        }
        ("l2", [q]) => psl2(*q).map_err(ge),
        ("sz", [q]) => suzuki(*q).map(|mb| mb.ambient).map_err(ge),
        ("agl1", [q]) => agl1(*q).map(|mb| mb.borel).map_err(ge),
        _ => Err(usage()),
    }
}

fn nu_estimate(config: &RunConfig, group: &str, trials: u64, k_cap: usize) -> Result<(), CliError> {
    if trials == 0 || k_cap == 0 || k_cap > 16 {
        return Err(CliError::Usage(
            "need trials >= 1 and 1 <= k-cap <= 16".into(),
        ));
    }
    let g = parse_group_spec(group)?;
    let estimate = estimate_nu(&g, trials, config.seed, k_cap)
        .map_err(|e| CliError::Resource(e.to_string()))?;
    let mut sink = Sink::new(config)?;
    match config.format {
        Format::Text => {
            sink.line(&format!(
                "group {} (order {}), nu_hat = {}",
                group, estimate.group_order, estimate.nu_hat
            ))?;
            for row in &estimate.table {
                sink.line(&format!(
                    "k = {:>2}: {}/{} = {:.4} (se {:.4})",
                    row.k, row.successes, row.trials, row.estimate, row.std_error
                ))?;
            }
        }
        _ => sink.json(&envelope(
            "nu-estimate",
            json!({"group": group, "trials": trials, "k_cap": k_cap}),
            config.seed,
            &estimate,
        ))?,
    }
    Ok(())
}

// --- schreier-check ---

fn schreier_cmd(config: &RunConfig, d_sub: &str, index: &str, d_sup: &str) -> Result<(), CliError> {
    let d_sub_n = parse_nat(d_sub, "d-sub")?;
    let index_n = parse_nat(index, "index")?;
    let d_sup_n = parse_nat(d_sup, "d-sup")?;
    let check = schreier_check(&d_sub_n, &index_n, &d_sup_n);
    let mut sink = Sink::new(config)?;
    match config.format {
        Format::Text => sink.line(&format!(
            "{} - 1 <= {} * ({} - 1): {} (slack {})",
            d_sub, index, d_sup, check.holds, check.slack
        ))?,
        _ => sink.json(&envelope(
            "schreier-check",
            json!({"d_sub": d_sub, "index": index, "d_sup": d_sup}),
            config.seed,
            &check,
        ))?,
    }
    if !check.holds {
        return Err(CliError::Refuted(format!(
            "Schreier inequality fails with slack {}",
            check.slack
        )));
    }
    Ok(())
}
