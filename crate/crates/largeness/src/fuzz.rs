//! Seeded self-check campaigns.
//!
//! Instance `i` of a campaign draws from its own ChaCha stream, so a
//! campaign's report depends only on `(seed, count)`, not on how the work is
//! spread over threads.

use std::sync::Arc;

use largeness_core::chain::{lift_chain, validate_chain_structure, ChainCertificate, CrParams};
use largeness_core::largeness::{find_pws_witness, find_syndetic_witness, find_thick_witness, Scope};
use largeness_core::lift::{ap_pair_set, build_lifted_matrix, lift_witness, PairBox, PairMatrix};
use largeness_core::validate;
use largeness_core::witness::{find_cr_witness, find_j_witness, translate_witness, SeqFamily};
use largeness_core::{Elem, ElemRange, FiniteTable, GroundSet, Matrix, Result, Semigroup};
use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde_json::{json, Value as Json};

use crate::error::{CliError, CliResult};

pub const DEFAULT_SEED: u64 = 0x5eed_1a7e;

pub const CAMPAIGNS: &[&str] = &["transfer", "witness", "chain", "translation"];

/// Failures listed per campaign; the count is always exact.
const MAX_LISTED: usize = 20;

pub struct CampaignReport {
    pub name: &'static str,
    pub instances: usize,
    /// Instances where there was something to check (e.g. a base witness existed).
    pub checked: usize,
    pub failures: usize,
    pub first_failures: Vec<String>,
}

pub struct FuzzReport {
    pub seed: u64,
    pub campaigns: Vec<CampaignReport>,
}

impl FuzzReport {
    pub fn failures(&self) -> usize {
        self.campaigns.iter().map(|c| c.failures).sum()
    }

    pub fn to_json(&self) -> Json {
        let campaigns: Vec<Json> = self
            .campaigns
            .iter()
            .map(|c| {
                json!({
                    "campaign": c.name,
                    "instances": c.instances,
                    "checked": c.checked,
                    "failures": c.failures,
                    "first_failures": c.first_failures,
                })
            })
            .collect();
        json!({ "seed": self.seed, "campaigns": campaigns, "failures": self.failures() })
    }
}

enum Instance {
    Passed,
    Skipped,
    Failed(String),
}

pub fn run(campaign: &str, seed: u64, count: usize) -> CliResult<FuzzReport> {
    let names: Vec<&'static str> = match campaign {
        "all" => CAMPAIGNS.to_vec(),
        other => vec![*CAMPAIGNS
            .iter()
            .find(|&&c| c == other)
            .ok_or_else(|| CliError::Input(format!("unknown campaign {other:?}; known: all, {}", CAMPAIGNS.join(", "))))?],
    };
    let campaigns = names.into_iter().map(|name| run_one(name, seed, count)).collect();
    Ok(FuzzReport { seed, campaigns })
}

fn run_one(name: &'static str, seed: u64, count: usize) -> CampaignReport {
    let id = CAMPAIGNS.iter().position(|&c| c == name).expect("known campaign") as u64;
    let body: fn(&mut ChaCha8Rng) -> Result<Instance> = match name {
        "transfer" => transfer_instance,
        "witness" => witness_instance,
        "chain" => chain_instance,
        _ => translation_instance,
    };
    let outcomes: Vec<Instance> = (0..count)
        .into_par_iter()
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream((id << 40) | i as u64);
            body(&mut rng).unwrap_or_else(|e| Instance::Failed(format!("instance {i}: {e}")))
        })
        .collect();
    let mut report = CampaignReport { name, instances: count, checked: 0, failures: 0, first_failures: Vec::new() };
    for (i, o) in outcomes.into_iter().enumerate() {
        match o {
            Instance::Passed => report.checked += 1,
            Instance::Skipped => {}
            Instance::Failed(msg) => {
                report.checked += 1;
                report.failures += 1;
                if report.first_failures.len() < MAX_LISTED {
                    report.first_failures.push(format!("instance {i}: {msg}"));
                }
            }
        }
    }
    report
}

fn check(ok: bool, what: impl FnOnce() -> String) -> Instance {
    if ok {
        Instance::Passed
    } else {
        Instance::Failed(what())
    }
}

fn subset(rng: &mut ChaCha8Rng, sg: &Arc<Semigroup>, size: usize) -> GroundSet {
    let n = sg.size() as usize;
    let picks = sample(rng, n, size.min(n));
    GroundSet::from_elems(sg, picks.iter().map(|i| Elem(i as u32))).expect("codes in range")
}

fn dense_subset(rng: &mut ChaCha8Rng, sg: &Arc<Semigroup>) -> GroundSet {
    let p = rng.gen_range(0.25..0.9);
    GroundSet::from_predicate(sg, |_| rng.gen_bool(p))
}

fn element(rng: &mut ChaCha8Rng, sg: &Semigroup) -> Elem {
    Elem(rng.gen_range(0..sg.size()))
}

fn matrix(rng: &mut ChaCha8Rng, sg: &Arc<Semigroup>, rows: usize, cols: usize) -> Matrix {
    Matrix::from_fn(sg, rows, cols, |_, _| element(rng, sg)).expect("valid shape")
}

/// Small commutative semigroups given by tables: max, min, the null
/// semigroup and addition capped at `m − 1`.
fn table_semigroup(rng: &mut ChaCha8Rng, m: u32) -> Semigroup {
    let op: fn(u32, u32, u32) -> u32 = match rng.gen_range(0..4) {
        0 => |x, y, _| x.max(y),
        1 => |x, y, _| x.min(y),
        2 => |_, _, _| 0,
        _ => |x, y, m| (x + y).min(m - 1),
    };
    let rows: Vec<Vec<u32>> = (0..m).map(|x| (0..m).map(|y| op(x, y, m)).collect()).collect();
    Semigroup::finite_table(FiniteTable::from_rows(&rows).expect("square")).expect("commutative semigroup")
}

fn any_semigroup(rng: &mut ChaCha8Rng) -> Semigroup {
    match rng.gen_range(0..5) {
        0 => Semigroup::cyclic(rng.gen_range(2..=10)),
        1 => Semigroup::nat_window(1, rng.gen_range(10..=40)).expect("window"),
        2 => Semigroup::product(Semigroup::cyclic(rng.gen_range(2..=4)), Semigroup::cyclic(rng.gen_range(2..=4))).expect("small"),
        3 => {
            let m = rng.gen_range(2..=6);
            table_semigroup(rng, m)
        }
        _ => Semigroup::product(Semigroup::nat_window(1, 8).expect("window"), Semigroup::cyclic(3)).expect("small"),
    }
}

fn transfer_instance(rng: &mut ChaCha8Rng) -> Result<Instance> {
    let m: u32 = rng.gen_range(4..=12);
    let sg = Arc::new(Semigroup::cyclic(m));
    let (r, n, steps) = (rng.gen_range(1..=4), rng.gen_range(1..=3), rng.gen_range(1..=3));
    let size = rng.gen_range(m.div_ceil(3)..=m) as usize;
    let a = subset(rng, &sg, size);
    let mp = PairMatrix::new(matrix(rng, &sg, r, n), matrix(rng, &sg, r, n))?;
    let s = element(rng, &sg);
    let lifted = build_lifted_matrix(&mp, s, steps)?;
    let Some(base) = find_cr_witness(&a, &lifted, ElemRange::all(&sg))? else {
        return Ok(Instance::Skipped);
    };
    let pw = lift_witness(&mp, s, steps, &a, base)?;
    let c = ap_pair_set(&a, steps, PairBox::all(&sg))?;
    let product = c.product().clone();
    let pm = mp.to_product_matrix(&product)?;
    let verdict = validate::check_cr_witness(&c.set, &pm, pw.alpha, product.join(pw.a, pw.scaled_s));
    Ok(check(verdict.is_ok(), || format!("Z_{m}, L = {steps}: {verdict:?}")))
}

fn witness_instance(rng: &mut ChaCha8Rng) -> Result<Instance> {
    let sg = Arc::new(any_semigroup(rng));
    let a = dense_subset(rng, &sg);
    let probe_len = rng.gen_range(1..=3);
    let probe: Vec<Elem> = (0..probe_len).map(|_| element(rng, &sg)).collect();
    Ok(match rng.gen_range(0..5) {
        0 => {
            let scope = Scope::default_for(&sg);
            match find_syndetic_witness(&a, rng.gen_range(1..=4), &scope)? {
                Some(w) => {
                    let target = scope.target.iter().map(|i| Elem(i as u32));
                    let v = validate::check_cover(&a, &w.shifts, target);
                    check(v.is_ok(), || format!("syndetic: {v:?}"))
                }
                None => Instance::Skipped,
            }
        }
        1 => match find_thick_witness(&a, &probe)? {
            Some(w) => {
                let v = validate::check_thick(&a, &probe, w.x);
                check(v.is_ok(), || format!("thick: {v:?}"))
            }
            None => Instance::Skipped,
        },
        2 => match find_pws_witness(&a, rng.gen_range(1..=3), &probe, &Scope::default_for(&sg))? {
            Some(w) => {
                let v = validate::check_pws(&a, &w.shifts, &probe, w.inner.x);
                check(v.is_ok(), || format!("pws: {v:?}"))
            }
            None => Instance::Skipped,
        },
        3 => {
            let count = rng.gen_range(1..=3);
            let len = rng.gen_range(1..=6);
            let seqs: Vec<Vec<Elem>> = (0..count).map(|_| (0..len).map(|_| element(rng, &sg)).collect()).collect();
            let family = SeqFamily::from_sequences(&sg, seqs)?;
            match find_j_witness(&a, &family, ElemRange::all(&sg))? {
                Some(w) => {
                    let v = validate::check_j_witness(&a, family.sequences(), w.a, w.h);
                    check(v.is_ok(), || format!("j: {v:?}"))
                }
                None => Instance::Skipped,
            }
        }
        _ => {
            let (r, n) = (rng.gen_range(1..=4), rng.gen_range(1..=3));
            let m = matrix(rng, &sg, r, n);
            match find_cr_witness(&a, &m, ElemRange::all(&sg))? {
                Some(w) => {
                    let v = validate::check_cr_witness(&a, &m, w.alpha, w.s);
                    check(v.is_ok(), || format!("cr: {v:?}"))
                }
                None => Instance::Skipped,
            }
        }
    })
}

/// A decreasing chain with a complete shift map on a semigroup of order at
/// most 8.
pub fn random_chain(rng: &mut ChaCha8Rng) -> Result<ChainCertificate> {
    let len = rng.gen_range(1..=4usize);
    let (sg, sets) = match rng.gen_range(0..3) {
        0 => {
            // subgroups d·Z_m along a divisor chain
            let m = rng.gen_range(2..=8u32);
            let sg = Arc::new(Semigroup::cyclic(m));
            let mut d = 1;
            let mut sets = Vec::with_capacity(len);
            for _ in 0..len {
                let multiples: Vec<u32> = (1..=m).filter(|k| m % k == 0 && k % d == 0).collect();
                d = multiples[rng.gen_range(0..multiples.len())];
                sets.push(GroundSet::from_predicate(&sg, |x| x.0 % d == 0));
            }
            (sg, sets)
        }
        1 => {
            // upper sets [k, m) of the max semilattice
            let m = rng.gen_range(2..=8u32);
            let rows: Vec<Vec<u32>> = (0..m).map(|x| (0..m).map(|y| x.max(y)).collect()).collect();
            let sg = Arc::new(Semigroup::finite_table(FiniteTable::from_rows(&rows)?)?);
            let mut k = 0;
            let mut sets = Vec::with_capacity(len);
            for _ in 0..len {
                k = rng.gen_range(k..=m);
                sets.push(GroundSet::from_predicate(&sg, |x| x.0 >= k));
            }
            (sg, sets)
        }
        _ => {
            let sg = Arc::new(match rng.gen_range(0..3) {
                0 => Semigroup::cyclic(rng.gen_range(2..=8)),
                1 => Semigroup::product(Semigroup::cyclic(2), Semigroup::cyclic(4))?,
                _ => {
                    let m = rng.gen_range(2..=8);
                    table_semigroup(rng, m)
                }
            });
            let mut sets = vec![dense_subset(rng, &sg)];
            for _ in 1..len {
                let prev = sets.last().expect("non-empty").clone();
                sets.push(GroundSet::from_predicate(&sg, |x| prev.contains(x) && rng.gen_bool(0.6)));
            }
            (sg, sets)
        }
    };
    let mut cert = ChainCertificate::new(sets, Default::default(), CrParams::default())?;
    if !cert.search_shifts().is_empty() {
        // an empty last level satisfies every shift condition
        let mut sets = cert.sets.clone();
        if sets.len() == 4 {
            sets.pop();
        }
        sets.push(GroundSet::empty(&sg));
        cert = ChainCertificate::new(sets, Default::default(), CrParams::default())?;
        let unresolved = cert.search_shifts();
        debug_assert!(unresolved.is_empty());
    }
    Ok(cert)
}

fn chain_instance(rng: &mut ChaCha8Rng) -> Result<Instance> {
    let cert = random_chain(rng)?;
    let a_side = validate_chain_structure(&cert, cert.level(1))?;
    if !(a_side.containment_ok() && a_side.shift_ok()) {
        return Ok(Instance::Failed("generated chain does not validate".into()));
    }
    let steps = rng.gen_range(1..=2);
    let lifted = lift_chain(&cert, steps, PairBox::all(cert.semigroup()))?;
    let b_side = validate_chain_structure(&lifted.cert, lifted.cert.level(1))?;
    Ok(check(lifted.verified() && b_side.containment_ok() && b_side.shift_ok(), || {
        format!(
            "lifted chain fails: {} gaps, {} failed inclusions, B-side decrease {:?}, shift failures {}",
            lifted.gaps.len(),
            lifted.checks.iter().filter(|c| !c.holds).count(),
            b_side.decrease_violations,
            b_side.shift_failures.len()
        )
    }))
}

fn translation_instance(rng: &mut ChaCha8Rng) -> Result<Instance> {
    let m: u32 = rng.gen_range(2..=12);
    let sg = Arc::new(Semigroup::cyclic(m));
    let (r, n) = (rng.gen_range(1..=4usize), rng.gen_range(1..=3usize));
    let mat = matrix(rng, &sg, r, n);
    // plant a witness so every instance has one
    let alpha = rng.gen_range(1..1u64 << r);
    let s = element(rng, &sg);
    let mut a = dense_subset(rng, &sg);
    for j in 0..n {
        let col = mat.row_sum(alpha, j)?.expect("total");
        a.insert(sg.sum(s, col).expect("total"))?;
    }
    let w = find_cr_witness(&a, &mat, ElemRange::all(&sg))?.expect("planted witness");
    let t = element(rng, &sg);
    let moved = translate_witness(w, t, &mat, &a)?;
    let v = validate::check_cr_witness(&a.translate(t)?, &mat, moved.alpha, moved.s);
    Ok(check(v.is_ok(), || format!("Z_{m}, t = {}: {v:?}", t.0)))
}
