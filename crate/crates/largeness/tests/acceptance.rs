//! Acceptance gate. Runs every criterion, prints one PASS/FAIL line each and
//! exits non-zero if any failed. The checks lean on test-local arithmetic
//! (plain `%` on Z_m, integer sums on windows, raw tables) rather than on the
//! library's own validators.

use std::collections::BTreeMap;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::{Path, PathBuf};
use std::process::Command;
use std::sync::Arc;
use std::time::{Duration, Instant};

use largeness_core::chain::{lift_chain, validate_chain_structure, ChainCertificate, CrParams};
use largeness_core::largeness::{find_pws_witness, find_syndetic_witness, find_thick_witness, Scope};
use largeness_core::lift::{ap_pair_set, build_lifted_matrix, lift_witness, PairBox, PairMatrix};
use largeness_core::vdw::{vdw_check, VdwVerdict};
use largeness_core::witness::{
    check_cr_full, find_cr_witness, find_j_witness, translate_witness, CrWitness, SeqFamily, Verdict,
};
use largeness_core::{validate, Elem, ElemRange, FiniteTable, GroundSet, Matrix, Semigroup};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::Value as Json;

type Check = fn() -> Result<String, String>;

fn main() {
    let criteria: [(&str, u64, Check); 9] = [
        ("concat-exactness", 10, concat_exactness),
        ("transfer-soundness", 60_000, transfer_soundness),
        ("witness-soundness", 60_000, witness_soundness),
        ("vdw-desk-check", 1_000, vdw_desk_check),
        ("cr-full-exactness", 5_000, cr_full_exactness),
        ("monotonicity", 30_000, monotonicity),
        ("chain-transfer", 60_000, chain_transfer),
        ("translation-invariance", 10_000, translation_invariance),
        ("determinism", 120_000, determinism),
    ];
    let filter: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let mut failed = 0;
    for (i, (name, limit_ms, check)) in criteria.iter().enumerate() {
        if !filter.is_empty() && !filter.iter().any(|f| name.contains(f.as_str())) {
            continue;
        }
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|p| {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        let elapsed = start.elapsed();
        let limit = Duration::from_millis(*limit_ms);
        let (ok, detail) = match outcome {
            Ok(d) if elapsed < limit => (true, d),
            Ok(d) => (false, format!("{d}; too slow")),
            Err(d) => (false, d),
        };
        failed += usize::from(!ok);
        println!(
            "[{}] {} {:<24} {:>10.3} ms (limit {} ms)  {}",
            i + 1,
            if ok { "PASS" } else { "FAIL" },
            name,
            elapsed.as_secs_f64() * 1e3,
            limit_ms,
            detail
        );
    }
    if failed > 0 {
        println!("acceptance: {failed} criterion(s) failed");
        std::process::exit(1);
    }
    println!("acceptance: all criteria passed");
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn lib<T, E: std::fmt::Display>(r: Result<T, E>) -> Result<T, String> {
    r.map_err(|e| e.to_string())
}

// ---------------------------------------------------------------------------
// Test-local arithmetic.

/// Independent model of the semigroups used below, on element indices.
#[derive(Clone)]
enum Model {
    Cyclic(u32),
    Window { lo: u32, hi: u32 },
    Table(Vec<Vec<u32>>),
}

impl Model {
    fn size(&self) -> u32 {
        match self {
            Model::Cyclic(m) => *m,
            Model::Window { lo, hi } => hi - lo + 1,
            Model::Table(t) => t.len() as u32,
        }
    }

    fn add(&self, x: u32, y: u32) -> Option<u32> {
        match self {
            Model::Cyclic(m) => Some((x + y) % m),
            Model::Window { lo, hi } => {
                let v = (lo + x) + (lo + y);
                (v <= *hi).then(|| v - lo)
            }
            Model::Table(t) => Some(t[x as usize][y as usize]),
        }
    }

    fn sum(&self, start: u32, terms: impl IntoIterator<Item = u32>) -> Option<u32> {
        terms.into_iter().try_fold(start, |acc, t| self.add(acc, t))
    }

    fn build(&self) -> Arc<Semigroup> {
        Arc::new(match self {
            Model::Cyclic(m) => Semigroup::cyclic(*m),
            Model::Window { lo, hi } => Semigroup::nat_window(*lo as u64, *hi as u64).unwrap(),
            Model::Table(t) => Semigroup::finite_table(FiniteTable::from_rows(t).unwrap()).unwrap(),
        })
    }
}

fn mask_rows(alpha: u64) -> impl Iterator<Item = usize> {
    (0..64).filter(move |i| alpha >> i & 1 == 1)
}

/// `s + Σ_{i∈α} M_ij ∈ A` for every column, computed from raw rows.
fn oracle_cr(model: &Model, a: &[bool], rows: &[Vec<u32>], alpha: u64, s: u32) -> bool {
    let r = rows.len();
    if alpha == 0 || alpha >> r != 0 {
        return false;
    }
    (0..rows[0].len()).all(|j| {
        let col = mask_rows(alpha).map(|i| rows[i][j]);
        // sum the column first, then add s, as in s + Σ
        let total = {
            let mut it = col;
            let first = it.next().unwrap();
            it.try_fold(first, |acc, v| model.add(acc, v))
        };
        total.and_then(|t| model.add(s, t)).is_some_and(|v| a[v as usize])
    })
}

fn oracle_has_witness(model: &Model, a: &[bool], rows: &[Vec<u32>]) -> bool {
    let r = rows.len();
    (1..1u64 << r).any(|alpha| (0..model.size()).any(|s| oracle_cr(model, a, rows, alpha, s)))
}

/// All `r × n` matrices over Z_m, lexicographic over row-major entries.
fn all_matrices(m: u32, r: usize, n: usize) -> impl Iterator<Item = Vec<Vec<u32>>> {
    let cells = r * n;
    let total = (m as u64).pow(cells as u32);
    (0..total).map(move |mut k| {
        let mut flat = vec![0u32; cells];
        for c in (0..cells).rev() {
            flat[c] = (k % m as u64) as u32;
            k /= m as u64;
        }
        flat.chunks(n).map(<[u32]>::to_vec).collect()
    })
}

/// First matrix without a witness, if any.
fn oracle_full(m: u32, a: &[bool], n: usize, r: usize) -> Option<Vec<Vec<u32>>> {
    let model = Model::Cyclic(m);
    all_matrices(m, r, n).find(|rows| !oracle_has_witness(&model, a, rows))
}

fn set_of(sg: &Arc<Semigroup>, a: &[bool]) -> GroundSet {
    GroundSet::from_elems(sg, (0..a.len() as u32).filter(|&i| a[i as usize]).map(Elem)).unwrap()
}

fn matrix_of(sg: &Arc<Semigroup>, rows: &[Vec<u32>]) -> Matrix {
    let rows: Vec<Vec<Elem>> = rows.iter().map(|r| r.iter().map(|&x| Elem(x)).collect()).collect();
    Matrix::from_rows(sg, &rows).unwrap()
}

fn rows_of(m: &Matrix) -> Vec<Vec<u32>> {
    (0..m.rows()).map(|i| m.row(i).iter().map(|e| e.0).collect()).collect()
}

fn random_set(rng: &mut ChaCha8Rng, size: u32, min_len: usize) -> Vec<bool> {
    let p: f64 = rng.gen_range(0.2..0.9);
    let mut a: Vec<bool> = (0..size).map(|_| rng.gen_bool(p)).collect();
    let mut idx: Vec<usize> = (0..size as usize).collect();
    idx.shuffle(rng);
    for i in idx {
        if a.iter().filter(|&&b| b).count() >= min_len {
            break;
        }
        a[i] = true;
    }
    a
}

fn random_rows(rng: &mut ChaCha8Rng, size: u32, r: usize, n: usize) -> Vec<Vec<u32>> {
    (0..r).map(|_| (0..n).map(|_| rng.gen_range(0..size)).collect()).collect()
}

fn rng_for(tag: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(0xacce_97a0 ^ tag)
}

// ---------------------------------------------------------------------------

fn demos() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("demos")
}

fn concat_exactness() -> Result<String, String> {
    let expected: Json = serde_json::json!([[3, 6, 5, 8, 9, 1, 6], [7, 4, 6, 8, 3, 5, 9], [1, 3, 7, 9, 2, 1, 8]]);
    let mut loader = largeness::io::Loader::new();
    let mut inputs = BTreeMap::new();
    let docs: Vec<Json> = ["cat_A.json", "cat_B.json", "cat_C.json"]
        .iter()
        .map(|f| loader.load(&demos().join(f)))
        .collect::<Result<_, _>>()
        .map_err(|e| e.to_string())?;
    inputs.insert("matrices".to_string(), Json::Array(docs));
    let inv = largeness::Invocation { subcommand: "concat".into(), inputs, bounds: serde_json::json!({}) };
    let out = lib(largeness::execute(&inv))?;
    ensure(out.status.exit_code() == 0, || format!("exit {}", out.status.exit_code()))?;
    ensure(out.result["entries"] == expected, || format!("got {}", out.result["entries"]))?;
    ensure(out.result["rows"] == 3 && out.result["cols"] == 7, || "shape is not 3x7".into())?;
    Ok("A⌢B⌢C matches the 3x7 matrix entry for entry".into())
}

fn transfer_soundness() -> Result<String, String> {
    let mut rng = rng_for(2);
    let instances = 600;
    let mut found = 0;
    for inst in 0..instances {
        let m = rng.gen_range(4..=12u32);
        let r = rng.gen_range(1..=4usize);
        let n = rng.gen_range(1..=3usize);
        let steps = rng.gen_range(1..=3usize);
        let a = random_set(&mut rng, m, m.div_ceil(3) as usize);
        let m1 = random_rows(&mut rng, m, r, n);
        let m2 = random_rows(&mut rng, m, r, n);
        let s = rng.gen_range(0..m);
        let model = Model::Cyclic(m);
        let sg = model.build();
        let set = set_of(&sg, &a);
        let mp = lib(PairMatrix::new(matrix_of(&sg, &m1), matrix_of(&sg, &m2)))?;
        let lifted = lib(build_lifted_matrix(&mp, Elem(s), steps))?;
        // block k, column j: M1_ij + k(s + M2_ij)
        let expect: Vec<Vec<u32>> = (0..r)
            .map(|i| {
                (0..=steps as u32)
                    .flat_map(|k| {
                        let (m1, m2) = (&m1, &m2);
                        (0..n).map(move |j| (m1[i][j] + k * (s + m2[i][j])) % m)
                    })
                    .collect()
            })
            .collect();
        ensure(rows_of(&lifted) == expect, || format!("instance {inst}: lifted matrix differs"))?;
        let Some(base) = lib(find_cr_witness(&set, &lifted, ElemRange::all(&sg)))? else {
            continue;
        };
        found += 1;
        ensure(oracle_cr(&model, &a, &expect, base.alpha, base.s.0), || format!("instance {inst}: base witness invalid"))?;
        let pw = lib(lift_witness(&mp, Elem(s), steps, &set, base))?;
        let count = base.alpha.count_ones();
        ensure(pw.alpha == base.alpha && pw.a == base.s && pw.scaled_s.0 == count * s % m, || {
            format!("instance {inst}: shift is not (a, |α|s)")
        })?;
        let ap = lib(ap_pair_set(&set, steps, PairBox::all(&sg)))?;
        for j in 0..n {
            let x = (base.s.0 + mask_rows(base.alpha).map(|i| m1[i][j]).sum::<u32>()) % m;
            let d = (count * s + mask_rows(base.alpha).map(|i| m2[i][j]).sum::<u32>()) % m;
            ensure(pw.pairs[j] == (Elem(x), Elem(d)), || format!("instance {inst}: column {j} pair differs"))?;
            ensure((0..=steps as u32).all(|k| a[((x + k * d) % m) as usize]), || {
                format!("instance {inst}: ({x}, {d}) is not an AP pair of A")
            })?;
            ensure(ap.contains(Elem(x), Elem(d)), || format!("instance {inst}: ({x}, {d}) missing from ap_pair_set"))?;
        }
    }
    ensure(found > 0, || "no base witness in any instance".into())?;
    Ok(format!("{found}/{instances} instances had a base witness; all lifted witnesses valid"))
}

fn witness_soundness() -> Result<String, String> {
    let mut rng = rng_for(3);
    let instances = 1200;
    let mut emitted = [0usize; 5];
    for inst in 0..instances {
        let model = if rng.gen_bool(0.6) {
            Model::Cyclic(rng.gen_range(2..=12))
        } else {
            let lo = rng.gen_range(1..=3);
            Model::Window { lo, hi: lo + rng.gen_range(8..=30) }
        };
        let size = model.size();
        let sg = model.build();
        let a = random_set(&mut rng, size, 1);
        let set = set_of(&sg, &a);
        let fail = |what: &str| format!("instance {inst}: {what} witness rejected");

        let scope = Scope::default_for(&sg);
        if let Some(w) = lib(find_syndetic_witness(&set, 3, &scope))? {
            emitted[0] += 1;
            let ok = scope.target.iter().all(|y| {
                w.shifts.iter().any(|t| model.add(t.0, y as u32).is_some_and(|v| a[v as usize]))
            });
            ensure(ok && !w.shifts.is_empty() && w.shifts.len() <= 3, || fail("syndetic"))?;
            lib(validate::check_cover(&set, &w.shifts, scope.target.iter().map(|y| Elem(y as u32))))?;
        }

        let probe: Vec<Elem> = {
            let mut p: Vec<u32> = (0..size).collect();
            p.shuffle(&mut rng);
            p.truncate(rng.gen_range(1..=3));
            p.sort();
            p.into_iter().map(Elem).collect()
        };
        if let Some(w) = lib(find_thick_witness(&set, &probe))? {
            emitted[1] += 1;
            let ok = probe.iter().all(|e| model.add(e.0, w.x.0).is_some_and(|v| a[v as usize]));
            ensure(ok, || fail("thick"))?;
            lib(validate::check_thick(&set, &probe, w.x))?;
        }

        if let Some(w) = lib(find_pws_witness(&set, 3, &probe, &scope))? {
            emitted[2] += 1;
            let ok = probe.iter().all(|e| {
                w.shifts.iter().any(|t| {
                    model.sum(t.0, [e.0, w.inner.x.0]).is_some_and(|v| a[v as usize])
                })
            });
            ensure(ok && w.shifts.len() <= 3, || fail("pws"))?;
            lib(validate::check_pws(&set, &w.shifts, &probe, w.inner.x))?;
        }

        let horizon = rng.gen_range(1..=4usize);
        let seqs: Vec<Vec<u32>> = (0..rng.gen_range(1..=3))
            .map(|_| (0..horizon).map(|_| rng.gen_range(0..size.min(6))).collect())
            .collect();
        let fam = lib(SeqFamily::new(&sg, seqs.iter().map(|f| f.iter().map(|&x| Elem(x)).collect()).collect(), horizon))?;
        if let Some(w) = lib(find_j_witness(&set, &fam, ElemRange::all(&sg)))? {
            emitted[3] += 1;
            let ok = w.h != 0
                && w.h >> horizon == 0
                && seqs.iter().all(|f| {
                    let mut it = mask_rows(w.h).map(|n| f[n]);
                    let first = it.next().unwrap();
                    it.try_fold(first, |acc, v| model.add(acc, v))
                        .and_then(|t| model.add(w.a.0, t))
                        .is_some_and(|v| a[v as usize])
                });
            ensure(ok, || fail("J"))?;
            lib(validate::check_j_witness(&set, fam.sequences(), w.a, w.h))?;
        }

        let r = rng.gen_range(1..=3usize);
        let n = rng.gen_range(1..=3);
        let rows = random_rows(&mut rng, size.min(6), r, n);
        let mat = matrix_of(&sg, &rows);
        if let Some(w) = lib(find_cr_witness(&set, &mat, ElemRange::all(&sg)))? {
            emitted[4] += 1;
            ensure(oracle_cr(&model, &a, &rows, w.alpha, w.s.0), || fail("CR"))?;
            lib(validate::check_cr_witness(&set, &mat, w.alpha, w.s))?;
        }
    }
    let total: usize = emitted.iter().sum();
    ensure(emitted.iter().all(|&c| c > 0), || format!("some searcher never emitted: {emitted:?}"))?;
    Ok(format!(
        "{instances} instances, {total} witnesses (syndetic {}, thick {}, pws {}, J {}, CR {}) all valid",
        emitted[0], emitted[1], emitted[2], emitted[3], emitted[4]
    ))
}

fn vdw_desk_check() -> Result<String, String> {
    fn mono_3ap(c: u32, len: u32) -> bool {
        let colour = |i: u32| c >> i & 1;
        (0..len).any(|a| (1..len).any(|d| a + 2 * d < len && colour(a) == colour(a + d) && colour(a) == colour(a + 2 * d)))
    }
    let free9 = (0..1u32 << 9).filter(|&c| !mono_3ap(c, 9)).count();
    let free8 = (0..1u32 << 8).filter(|&c| !mono_3ap(c, 8)).count();
    ensure(free9 == 0, || format!("oracle: {free9} colourings of [1,9] avoid 3-APs"))?;
    ensure(free8 > 0, || "oracle: no colouring of [1,8] avoids 3-APs".into())?;
    ensure(lib(vdw_check(3, 2, 9, u128::MAX))? == VdwVerdict::Holds, || "vdw_check(3,2,9) does not hold".into())?;
    match lib(vdw_check(3, 2, 8, u128::MAX))? {
        VdwVerdict::Counterexample(c) => {
            let bits = c.iter().enumerate().fold(0u32, |acc, (i, &x)| acc | (x as u32) << i);
            ensure(c.len() == 8 && c.iter().all(|&x| x < 2) && !mono_3ap(bits, 8), || {
                format!("counterexample {c:?} is not 3-AP free")
            })?;
            Ok(format!("all 512 colourings of [1,9] have a mono 3-AP; {free8} of [1,8] do not, e.g. {c:?}"))
        }
        VdwVerdict::Holds => Err("vdw_check(3,2,8) claims to hold".into()),
    }
}

fn cr_full_exactness() -> Result<String, String> {
    let mut notes = Vec::new();
    let mut bad = Vec::new();
    let z4 = Arc::new(Semigroup::cyclic(4));
    let a = [true, false, true, false];
    let set = set_of(&z4, &a);
    for r in 1..=3 {
        let verdict = lib(check_cr_full(&set, 2, r, u128::MAX))?;
        let oracle = oracle_full(4, &a, 2, r);
        ensure(verdict.holds() == oracle.is_none(), || format!("Z4 r={r}: library and oracle disagree"))?;
        match verdict {
            Verdict::Fails { counterexample, .. } => {
                let rows = rows_of(&counterexample);
                let parity = rows.iter().all(|row| (row[0] + row[1]) % 2 == 1);
                if parity && Some(&rows) == oracle.as_ref() {
                    notes.push(format!("Z4 r={r}: fails at {rows:?}"));
                } else {
                    bad.push(format!("Z4 r={r}: counterexample {rows:?} is not a parity one"));
                }
            }
            Verdict::Holds => bad.push(format!(
                "Z4 r={r}: holds (oracle agrees: some nonempty row set always has column sums of equal parity)"
            )),
        }
    }
    let z3 = Arc::new(Semigroup::cyclic(3));
    let full = set_of(&z3, &[true; 3]);
    for n in 1..=3 {
        let holds = lib(check_cr_full(&full, n, 1, u128::MAX))?.holds();
        let oracle = oracle_full(3, &[true; 3], n, 1).is_none();
        if !(holds && oracle) {
            bad.push(format!("Z3 full n={n}: library {holds}, oracle {oracle}"));
        }
    }
    notes.push("Z3 full holds at r=1, n=1..3".into());
    if bad.is_empty() {
        Ok(notes.join("; "))
    } else {
        Err(format!("{}; passing parts: {}", bad.join("; "), notes.join("; ")))
    }
}

fn monotonicity() -> Result<String, String> {
    let mut sweeps = 0;
    for m in [2u32, 3] {
        let sg = Arc::new(Semigroup::cyclic(m));
        let subsets: Vec<Vec<bool>> = (0..1u32 << m).map(|b| (0..m).map(|i| b >> i & 1 == 1).collect()).collect();
        // holds[set][n][r]
        let mut holds = vec![[[false; 4]; 4]; subsets.len()];
        for (k, a) in subsets.iter().enumerate() {
            let set = set_of(&sg, a);
            for n in 1..=3 {
                for r in 1..=3 {
                    let v = lib(check_cr_full(&set, n, r, u128::MAX))?.holds();
                    ensure(v == oracle_full(m, a, n, r).is_none(), || format!("Z{m} {a:?} n={n} r={r}: oracle disagrees"))?;
                    holds[k][n][r] = v;
                    sweeps += 1;
                }
            }
        }
        for k in 0..subsets.len() {
            for n in 1..=3 {
                for r in 1..=3 {
                    let h = holds[k][n][r];
                    if r < 3 {
                        ensure(!h || holds[k][n][r + 1], || format!("Z{m} set {k}: row monotonicity broken at n={n} r={r}"))?;
                    }
                    if n > 1 {
                        ensure(!h || holds[k][n - 1][r], || format!("Z{m} set {k}: column monotonicity broken at n={n} r={r}"))?;
                    }
                    for (j, b) in subsets.iter().enumerate() {
                        let sup = subsets[k].iter().zip(b).all(|(&x, &y)| !x || y);
                        ensure(!sup || !h || holds[j][n][r], || format!("Z{m}: superset monotonicity broken {k} -> {j}"))?;
                    }
                }
            }
        }
    }
    Ok(format!("{sweeps} exhaustive verdicts over Z2 and Z3, zero violations"))
}

/// Structurally valid chains: subgroup chains of Z_m, upset chains of
/// max/min semilattices, and random decreasing chains whose shifts resolve.
fn random_chain(rng: &mut ChaCha8Rng) -> (Model, Vec<Vec<bool>>) {
    let len = rng.gen_range(1..=4usize);
    loop {
        let m = rng.gen_range(2..=8u32);
        match rng.gen_range(0..3) {
            0 => {
                let mut d = 1;
                let mut sets = Vec::new();
                for _ in 0..len {
                    let next: Vec<u32> = (d..=m).filter(|e| m % e == 0 && e % d == 0).collect();
                    d = *next.choose(rng).unwrap();
                    sets.push((0..m).map(|x| x % d == 0).collect());
                }
                return (Model::Cyclic(m), sets);
            }
            1 => {
                let use_max = rng.gen_bool(0.5);
                let t = (0..m).map(|x| (0..m).map(|y| if use_max { x.max(y) } else { x.min(y) }).collect()).collect();
                let mut cut = 0;
                let mut sets = Vec::new();
                for _ in 0..len {
                    cut = rng.gen_range(cut..=m);
                    // upsets for max, downsets for min
                    sets.push((0..m).map(|x| if use_max { x >= cut } else { x < m - cut }).collect());
                }
                return (Model::Table(t), sets);
            }
            _ => {
                let model = Model::Cyclic(m);
                let mut sets: Vec<Vec<bool>> = vec![random_set(rng, m, 1)];
                for _ in 1..len {
                    let prev = sets.last().unwrap().clone();
                    sets.push(prev.iter().map(|&x| x && rng.gen_bool(0.6)).collect());
                }
                if shift_map_for(&model, &sets).is_some() {
                    return (model, sets);
                }
            }
        }
    }
}

/// Least valid level for every `(n, x)`, or `None` if some entry has none.
fn shift_map_for(model: &Model, sets: &[Vec<bool>]) -> Option<BTreeMap<(usize, u32), usize>> {
    let mut map = BTreeMap::new();
    for (n, c) in sets.iter().enumerate() {
        for x in (0..model.size()).filter(|&x| c[x as usize]) {
            let m = (0..sets.len()).find(|&m| {
                (0..model.size()).filter(|&y| sets[m][y as usize]).all(|y| model.add(x, y).is_some_and(|v| c[v as usize]))
            })?;
            map.insert((n + 1, x), m + 1);
        }
    }
    Some(map)
}

fn chain_transfer() -> Result<String, String> {
    let mut rng = rng_for(7);
    let certs = 150;
    let mut lifted_checks = 0usize;
    for inst in 0..certs {
        let (model, sets) = random_chain(&mut rng);
        let steps = rng.gen_range(1..=2usize);
        let map = shift_map_for(&model, &sets).ok_or_else(|| format!("instance {inst}: generator produced an invalid chain"))?;
        let sg = model.build();
        let levels: Vec<GroundSet> = sets.iter().map(|c| set_of(&sg, c)).collect();
        let shift_map = map.iter().map(|(&(n, x), &m)| ((n, Elem(x)), m)).collect();
        let cert = lib(ChainCertificate::new(levels.clone(), shift_map, CrParams::default()))?;
        let base = levels[0].clone();
        let report = lib(validate_chain_structure(&cert, &base))?;
        ensure(report.containment_ok() && report.shift_ok(), || format!("instance {inst}: input chain rejected"))?;

        let lifted = lib(lift_chain(&cert, steps, PairBox::all(&sg)))?;
        let b_base = lifted.cert.level(1).clone();
        let b_report = lib(validate_chain_structure(&lifted.cert, &b_base))?;
        ensure(b_report.containment_ok(), || format!("instance {inst}: lifted chain is not decreasing"))?;
        ensure(b_report.shift_ok(), || format!("instance {inst}: lifted shift map fails"))?;
        ensure(lifted.verified(), || format!("instance {inst}: lift_chain reports unverified shifts"))?;

        // oracle: B_i from scratch, decrease, and the lifted shift inclusions
        let size = model.size();
        let b: Vec<Vec<(u32, u32)>> = sets
            .iter()
            .map(|c| {
                let mut pairs = Vec::new();
                for x in 0..size {
                    for d in 0..size {
                        let mut t = Some(x);
                        let ok = (0..=steps).all(|k| {
                            let cur = t;
                            if k < steps {
                                t = cur.and_then(|v| model.add(v, d));
                            }
                            cur.is_some_and(|v| c[v as usize])
                        });
                        if ok {
                            pairs.push((x, d));
                        }
                    }
                }
                pairs
            })
            .collect();
        let product = lifted.cert.semigroup().clone();
        for (i, bi) in b.iter().enumerate() {
            let got: Vec<(u32, u32)> = lifted.cert.level(i + 1).members().map(|e| {
                let (x, d) = product.split(e);
                (x.0, d.0)
            }).collect();
            ensure(&got == bi, || format!("instance {inst}: B_{} differs from the oracle", i + 1))?;
            if i > 0 {
                ensure(bi.iter().all(|p| b[i - 1].contains(p)), || format!("instance {inst}: oracle B not decreasing"))?;
            }
        }
        for n in 1..=b.len() {
            for &(x, d) in &b[n - 1] {
                let level = *lifted
                    .cert
                    .shift_map
                    .get(&(n, product.join(Elem(x), Elem(d))))
                    .ok_or_else(|| format!("instance {inst}: no lifted shift for ({x}, {d}) at level {n}"))?;
                let ok = b[level - 1].iter().all(|&(x1, d1)| {
                    b[n - 1].contains(&(model.add(x, x1).unwrap(), model.add(d, d1).unwrap()))
                });
                ensure(ok, || format!("instance {inst}: B_{level} not inside -({x}, {d}) + B_{n}"))?;
                lifted_checks += 1;
            }
        }
    }
    Ok(format!("{certs} certificates, {lifted_checks} lifted shift inclusions checked, all hold"))
}

fn translation_invariance() -> Result<String, String> {
    let mut rng = rng_for(8);
    let instances = 200;
    for inst in 0..instances {
        let m = rng.gen_range(2..=12u32);
        let sg = Arc::new(Semigroup::cyclic(m));
        let r = rng.gen_range(1..=4usize);
        let n = rng.gen_range(1..=3usize);
        let rows = random_rows(&mut rng, m, r, n);
        let alpha = rng.gen_range(1..1u64 << r);
        let s = rng.gen_range(0..m);
        let t = rng.gen_range(0..m);
        let mut a: Vec<bool> = (0..m).map(|_| rng.gen_bool(0.3)).collect();
        for j in 0..n {
            a[((s + mask_rows(alpha).map(|i| rows[i][j]).sum::<u32>()) % m) as usize] = true;
        }
        let set = set_of(&sg, &a);
        let mat = matrix_of(&sg, &rows);
        let moved = lib(translate_witness(CrWitness { alpha, s: Elem(s) }, Elem(t), &mat, &set))?;
        ensure(moved.alpha == alpha && moved.s.0 == (s + t) % m, || format!("instance {inst}: moved witness is not (α, t + s)"))?;
        let shifted: Vec<bool> = (0..m).map(|y| a[((y + m - t) % m) as usize]).collect();
        ensure(oracle_cr(&Model::Cyclic(m), &shifted, &rows, moved.alpha, moved.s.0), || {
            format!("instance {inst}: moved witness fails on t + A")
        })?;
    }
    Ok(format!("{instances} planted witnesses moved to t + A and re-validated"))
}

#[derive(serde::Deserialize)]
struct Entry {
    name: String,
    args: Vec<String>,
}

fn run_suite(workers: Option<usize>) -> Result<Vec<(String, i32, Vec<u8>)>, String> {
    let dir = demos();
    let suite: Vec<Entry> = serde_json::from_str(&std::fs::read_to_string(dir.join("suite.json")).map_err(|e| e.to_string())?)
        .map_err(|e| e.to_string())?;
    suite
        .iter()
        .map(|e| {
            let mut cmd = Command::new(env!("CARGO_BIN_EXE_largeness"));
            cmd.current_dir(&dir).env_remove("LARGENESS_COST_GUARD");
            if let Some(w) = workers {
                cmd.arg("--workers").arg(w.to_string());
            }
            let out = cmd.args(&e.args).output().map_err(|err| err.to_string())?;
            Ok((e.name.clone(), out.status.code().unwrap_or(-1), out.stdout))
        })
        .collect()
}

fn determinism() -> Result<String, String> {
    let first = run_suite(None)?;
    let second = run_suite(None)?;
    let one = run_suite(Some(1))?;
    let eight = run_suite(Some(8))?;
    for (label, other) in [("second run", &second), ("--workers 1", &one), ("--workers 8", &eight)] {
        for (a, b) in first.iter().zip(other.iter()) {
            ensure(a == b, || format!("{}: {label} differs", a.0))?;
        }
    }
    let records = first.iter().filter(|(_, _, out)| !out.is_empty()).count();
    Ok(format!("{} demos ({records} records) byte-identical across 2 runs and 1 vs 8 workers", first.len()))
}
