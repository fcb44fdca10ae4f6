//! Subcommand bodies. Every command is a function of its resolved input
//! documents and a bounds object, nothing else, so a record carrying both can
//! be re-run exactly.
//!
//! A command produces a result payload; [`verify`] then re-checks the
//! payload's witness from the JSON alone with the library's validators,
//! which is the same check `largeness validate --record` performs.

use std::collections::BTreeMap;
use std::sync::Arc;

use largeness_core::chain::{lift_chain, validate_chain_structure, ChainCertificate, CrEvidence};
use largeness_core::largeness::{find_pws_witness, find_syndetic_witness, find_thick_witness, Scope};
use largeness_core::lift::ap_pair_set;
use largeness_core::subsets::mask_indices;
use largeness_core::validate;
use largeness_core::vdw::{has_monochromatic_ap, vdw_check, VdwVerdict};
use largeness_core::witness::{extract_ap, find_cr_witness, find_j_witness, generator_matrix, Degree, Verdict};
use largeness_core::{Elem, GroundSet, Matrix, Semigroup};
use serde_json::{json, Value as Json};

use crate::error::{CliError, CliResult};
use crate::io::*;
use crate::{fuzz, parallel};

/// Everything a command depends on.
#[derive(Clone, Debug, PartialEq)]
pub struct Invocation {
    pub subcommand: String,
    /// Resolved input documents by role.
    pub inputs: BTreeMap<String, Json>,
    pub bounds: Json,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    /// Witness found or check holds.
    Found,
    /// Negative answer that is exact on a finite universe.
    ProvenNegative,
    /// Negative answer relative to a window, horizon or search bound.
    BoundedNegative,
}

impl Status {
    pub fn exit_code(self) -> i32 {
        match self {
            Status::Found => 0,
            Status::ProvenNegative => 1,
            Status::BoundedNegative => 2,
        }
    }
}

pub struct Outcome {
    pub result: Json,
    pub status: Status,
    /// `Some(ok)` when the payload carries something checkable.
    pub validated: Option<bool>,
    pub summary: String,
}

pub const SUBCOMMANDS: &[&str] = &[
    "syndetic",
    "thick",
    "pws",
    "j-witness",
    "cr-witness",
    "cr-check",
    "cr-degree",
    "extract-ap",
    "concat",
    "lift",
    "ap-pairs",
    "chain-validate",
    "chain-lift",
    "vdw",
    "validate",
    "fuzz",
];

pub fn execute(inv: &Invocation) -> CliResult<Outcome> {
    let (result, status, summary) = match inv.subcommand.as_str() {
        "syndetic" => syndetic(inv)?,
        "thick" => thick(inv)?,
        "pws" => pws(inv)?,
        "j-witness" => j_witness(inv)?,
        "cr-witness" => cr_witness(inv)?,
        "cr-check" => cr_check(inv)?,
        "cr-degree" => cr_degree(inv)?,
        "extract-ap" => extract(inv)?,
        "concat" => concat(inv)?,
        "lift" => lift(inv)?,
        "ap-pairs" => ap_pairs(inv)?,
        "chain-validate" => chain_validate(inv)?,
        "chain-lift" => chain_lift_cmd(inv)?,
        "vdw" => vdw(inv)?,
        "fuzz" => fuzz_cmd(inv)?,
        "validate" => return validate_record(inv),
        other => return Err(CliError::Input(format!("unknown subcommand {other:?}"))),
    };
    let validated = verify(inv, &result)?;
    Ok(Outcome { result, status, validated, summary })
}

type Body = (Json, Status, String);

fn input<'a>(inv: &'a Invocation, role: &str) -> CliResult<&'a Json> {
    inv.inputs.get(role).ok_or_else(|| CliError::Input(format!("missing input {role:?}")))
}

fn bound<'a>(inv: &'a Invocation, key: &str) -> Option<&'a Json> {
    inv.bounds.get(key).filter(|v| !v.is_null())
}

fn bound_usize(inv: &Invocation, key: &str) -> CliResult<usize> {
    bound(inv, key)
        .and_then(Json::as_u64)
        .map(|v| v as usize)
        .ok_or_else(|| CliError::Input(format!("bound {key:?} must be a non-negative integer")))
}

fn bound_guard(inv: &Invocation) -> CliResult<u128> {
    match bound(inv, "guard") {
        None => Ok(u128::MAX),
        Some(v) => v
            .as_u64()
            .map(u128::from)
            .or_else(|| v.as_str().and_then(|s| s.parse().ok()))
            .ok_or_else(|| CliError::Input(format!("guard must be an integer, got {v}"))),
    }
}

pub fn guard_json(guard: Option<u128>) -> Json {
    match guard {
        None => Json::Null,
        Some(g) => match u64::try_from(g) {
            Ok(v) => json!(v),
            Err(_) => json!(g.to_string()),
        },
    }
}

fn not_found(scope: &str) -> Json {
    json!({ "result": "not_found", "scope": scope })
}

fn negative(exact: bool) -> Status {
    if exact {
        Status::ProvenNegative
    } else {
        Status::BoundedNegative
    }
}

fn scope_word(sg: &Semigroup, exact: bool) -> &'static str {
    if exact {
        "universe"
    } else if sg.is_total() {
        "bounds"
    } else {
        "window"
    }
}

fn alpha_json(alpha: u64) -> Json {
    json!(mask_indices(alpha).collect::<Vec<_>>())
}

fn alpha_from_json(v: &Json) -> CliResult<u64> {
    let rows = v.as_array().ok_or_else(|| CliError::Input("alpha must be a list of row numbers".into()))?;
    let mut mask = 0u64;
    for r in rows {
        match r.as_u64() {
            Some(i @ 1..=63) => mask |= 1 << (i - 1),
            _ => return Err(CliError::Input(format!("bad row number {r}"))),
        }
    }
    Ok(mask)
}

fn codes(bits: impl IntoIterator<Item = usize>) -> Vec<Elem> {
    bits.into_iter().map(|i| Elem(i as u32)).collect()
}

fn scope_for(sg: &Semigroup, inv: &Invocation) -> CliResult<Scope> {
    Ok(match bound(inv, "shift_limit").and_then(Json::as_u64) {
        Some(limit) => Scope::window_limit(sg, limit)?,
        None => Scope::default_for(sg),
    })
}

fn scope_json(sg: &Semigroup, scope: &Scope) -> Json {
    let target = match (scope.target.first(), scope.target.iter().last()) {
        (Some(lo), Some(hi)) => json!([elem_to_json(sg, Elem(lo as u32)), elem_to_json(sg, Elem(hi as u32))]),
        _ => Json::Null,
    };
    json!({
        "whole": scope.is_whole(sg),
        "shift_count": scope.shifts.len(),
        "target": target,
        "target_size": scope.target.count(),
    })
}

/// Largest distance between consecutive members of a window set.
fn max_gap(set: &GroundSet) -> Json {
    if set.semigroup().as_window().is_none() {
        return Json::Null;
    }
    let codes: Vec<u32> = set.members().map(|e| e.0).collect();
    codes.windows(2).map(|w| w[1] - w[0]).max().map_or(Json::Null, |g| json!(g))
}

fn default_probe(sg: &Semigroup, inv: &Invocation) -> CliResult<Vec<Elem>> {
    if let Some(w) = sg.as_window() {
        let len = bound_usize(inv, "probe_len")? as u64;
        if len == 0 {
            return Err(CliError::Input("probe length must be at least 1".into()));
        }
        return (w.lo..w.lo + len)
            .map(|v| sg.nat(v).ok_or_else(|| CliError::Input(format!("probe value {v} is outside the window"))))
            .collect();
    }
    if sg.is_total() {
        return Ok(sg.elements().collect());
    }
    Err(CliError::Input("this semigroup needs an explicit --probe".into()))
}

fn probe_for(set: &GroundSet, inv: &Invocation) -> CliResult<Vec<Elem>> {
    match inv.inputs.get("probe") {
        Some(doc) => probe_from_doc(set.semigroup(), doc),
        None => default_probe(set.semigroup(), inv),
    }
}

fn syndetic(inv: &Invocation) -> CliResult<Body> {
    let a = set_from_doc(input(inv, "set")?)?;
    let sg = a.semigroup().clone();
    let scope = scope_for(&sg, inv)?;
    let max_card = bound_usize(inv, "max_card")?;
    // covers only grow with F, so a cap below |S| is a bound, not a proof
    let exact = scope.is_whole(&sg) && max_card >= sg.size() as usize;
    Ok(match find_syndetic_witness(&a, max_card, &scope)? {
        Some(w) => {
            let summary = format!("syndetic: F = {} ({} shifts)", elems_to_json(&sg, w.shifts.iter().copied()), w.shifts.len());
            let result = json!({
                "kind": "syndetic",
                "F": elems_to_json(&sg, w.shifts.iter().copied()),
                "window": window_json(&sg),
                "scope": scope_json(&sg, &scope),
                "uncovered_tail": elems_to_json(&sg, w.uncovered_tail.iter().copied()),
                "max_gap": max_gap(&a),
            });
            (result, Status::Found, summary)
        }
        None => (
            not_found(scope_word(&sg, exact)),
            negative(exact),
            format!("syndetic: no cover with at most {max_card} shifts ({})", scope_word(&sg, exact)),
        ),
    })
}

fn thick(inv: &Invocation) -> CliResult<Body> {
    let a = set_from_doc(input(inv, "set")?)?;
    let sg = a.semigroup().clone();
    let probe = probe_for(&a, inv)?;
    let exact = sg.is_total();
    Ok(match find_thick_witness(&a, &probe)? {
        Some(w) => (
            json!({
                "kind": "thick",
                "E": elems_to_json(&sg, w.probe.iter().copied()),
                "x": elem_to_json(&sg, w.x),
                "window": window_json(&sg),
            }),
            Status::Found,
            format!("thick: E + {} lies in A", elem_to_json(&sg, w.x)),
        ),
        None => (not_found(scope_word(&sg, exact)), negative(exact), format!("thick: no x ({})", scope_word(&sg, exact))),
    })
}

fn pws(inv: &Invocation) -> CliResult<Body> {
    let a = set_from_doc(input(inv, "set")?)?;
    let sg = a.semigroup().clone();
    let probe = probe_for(&a, inv)?;
    let scope = scope_for(&sg, inv)?;
    let max_card = bound_usize(inv, "max_card")?;
    let exact = sg.is_total() && scope.is_whole(&sg) && max_card >= sg.size() as usize;
    Ok(match find_pws_witness(&a, max_card, &probe, &scope)? {
        Some(w) => (
            json!({
                "kind": "pws",
                "F": elems_to_json(&sg, w.shifts.iter().copied()),
                "E": elems_to_json(&sg, w.inner.probe.iter().copied()),
                "x": elem_to_json(&sg, w.inner.x),
                "window": window_json(&sg),
            }),
            Status::Found,
            format!(
                "pws: F = {}, x = {}",
                elems_to_json(&sg, w.shifts.iter().copied()),
                elem_to_json(&sg, w.inner.x)
            ),
        ),
        None => (
            not_found(scope_word(&sg, exact)),
            negative(exact),
            format!("pws: nothing with at most {max_card} shifts ({})", scope_word(&sg, exact)),
        ),
    })
}

fn j_witness(inv: &Invocation) -> CliResult<Body> {
    let a = set_from_doc(input(inv, "set")?)?;
    let sg = a.semigroup().clone();
    let family = family_from_doc(&sg, input(inv, "sequences")?)?;
    let range = range_or_all(&sg, bound(inv, "a_range"))?;
    Ok(match find_j_witness(&a, &family, range)? {
        Some(w) => {
            let m = family.position_matrix();
            let sums: Vec<Json> = (0..m.cols())
                .map(|f| {
                    let col = m.row_sum(w.h, f).ok().flatten();
                    col.and_then(|c| sg.sum(w.a, c)).map_or(Json::Null, |v| elem_to_json(&sg, v))
                })
                .collect();
            (
                json!({
                    "kind": "j",
                    "a": elem_to_json(&sg, w.a),
                    "H": alpha_json(w.h),
                    "horizon": family.horizon(),
                    "sums": sums,
                    "window": window_json(&sg),
                }),
                Status::Found,
                format!("j-witness: a = {}, H = {}", elem_to_json(&sg, w.a), alpha_json(w.h)),
            )
        }
        None => (
            json!({ "result": "not_found", "scope": "horizon", "horizon": family.horizon() }),
            Status::BoundedNegative,
            format!("j-witness: none within horizon {}", family.horizon()),
        ),
    })
}

fn cr_witness(inv: &Invocation) -> CliResult<Body> {
    let a = set_from_doc(input(inv, "set")?)?;
    let m = matrix_from_doc(input(inv, "matrix")?)?;
    let sg = a.semigroup().clone();
    let range = range_or_all(&sg, bound(inv, "s_range"))?;
    let exact = sg.is_total() && range.covers(&sg);
    Ok(match find_cr_witness(&a, &m, range)? {
        Some(w) => {
            let sums: Vec<Elem> = (0..m.cols()).filter_map(|j| m.row_sum(w.alpha, j).ok().flatten()).collect();
            let landed: Vec<Elem> = sums.iter().filter_map(|&c| sg.sum(w.s, c)).collect();
            (
                json!({
                    "kind": "cr",
                    "alpha": alpha_json(w.alpha),
                    "s": elem_to_json(&sg, w.s),
                    "column_sums": elems_to_json(&sg, sums),
                    "landed": elems_to_json(&sg, landed),
                    "window": window_json(&sg),
                }),
                Status::Found,
                format!("cr-witness: alpha = {}, s = {}", alpha_json(w.alpha), elem_to_json(&sg, w.s)),
            )
        }
        None => (
            not_found(if exact { "universe" } else { "range" }),
            negative(exact),
            "cr-witness: no witness".into(),
        ),
    })
}

fn cr_check(inv: &Invocation) -> CliResult<Body> {
    let a = set_from_doc(input(inv, "set")?)?;
    let (n, r) = (bound_usize(inv, "n")?, bound_usize(inv, "r")?);
    let guard = bound_guard(inv)?;
    Ok(match parallel::check_cr_full(&a, n, r, guard)? {
        Verdict::Holds => (
            json!({ "verdict": "holds", "n": n, "r": r }),
            Status::Found,
            format!("cr-check: every {r}x{n} matrix has a witness"),
        ),
        Verdict::Fails { counterexample, index } => (
            json!({ "verdict": "fails", "n": n, "r": r, "index": index, "counterexample": matrix_to_json(&counterexample) }),
            Status::ProvenNegative,
            format!("cr-check: matrix #{index} has no witness: {}", matrix_to_json(&counterexample)["entries"]),
        ),
    })
}

fn cr_degree(inv: &Invocation) -> CliResult<Body> {
    let a = set_from_doc(input(inv, "set")?)?;
    let (n, r_max) = (bound_usize(inv, "n")?, bound_usize(inv, "r_max")?);
    let guard = bound_guard(inv)?;
    Ok(match parallel::cr_degree(&a, n, r_max, guard)? {
        Degree::Found(r) => (json!({ "degree": r, "n": n }), Status::Found, format!("cr-degree: r = {r} for n = {n}")),
        Degree::NotFoundUpTo(r) => (
            json!({ "degree": Json::Null, "not_found_up_to": r, "n": n }),
            Status::BoundedNegative,
            format!("cr-degree: no r <= {r} for n = {n}"),
        ),
    })
}

fn extract(inv: &Invocation) -> CliResult<Body> {
    let a = set_from_doc(input(inv, "set")?)?;
    let sg = a.semigroup().clone();
    let (n, r) = (bound_usize(inv, "n")?, bound_usize(inv, "r")?);
    let range = range_or_all(&sg, bound(inv, "s_range"))?;
    let exact = sg.is_total() && range.covers(&sg);
    Ok(match extract_ap(&a, n, r, range)? {
        Some(ap) => (
            json!({
                "kind": "ap",
                "alpha": alpha_json(ap.witness.alpha),
                "s": elem_to_json(&sg, ap.s),
                "d": ap.d,
                "terms": elems_to_json(&sg, ap.terms.iter().copied()),
                "window": window_json(&sg),
            }),
            Status::Found,
            format!("extract-ap: {}", elems_to_json(&sg, ap.terms.iter().copied())),
        ),
        None => (not_found(if exact { "universe" } else { "range" }), negative(exact), "extract-ap: no progression".into()),
    })
}

fn concat_inputs(inv: &Invocation) -> CliResult<Vec<Matrix>> {
    input(inv, "matrices")?
        .as_array()
        .ok_or_else(|| CliError::Input("matrices must be a list".into()))?
        .iter()
        .map(matrix_from_doc)
        .collect()
}

fn concat(inv: &Invocation) -> CliResult<Body> {
    let parts = concat_inputs(inv)?;
    let joined = Matrix::concat_all(&parts)?;
    let summary = format!("concat: {}x{} {}", joined.rows(), joined.cols(), matrix_to_json(&joined)["entries"]);
    Ok((matrix_to_json(&joined), Status::Found, summary))
}

fn lift(inv: &Invocation) -> CliResult<Body> {
    let a = set_from_doc(input(inv, "set")?)?;
    let mp = pair_matrix_from_doc(input(inv, "pair_matrix")?)?;
    let sg = a.semigroup().clone();
    let steps = bound_usize(inv, "steps")?;
    let s_range = range_or_all(&sg, bound(inv, "s_range"))?;
    let base_range = range_or_all(&sg, bound(inv, "base_range"))?;
    let search = parallel::lift_sweep(&a, &mp, steps, s_range, base_range)?;
    let Some(out) = search.outcome else {
        let result = json!({
            "result": "not_found",
            "scope": "bounds",
            "tried": search.tried,
            "overflow_at": search.overflow_at.map_or(Json::Null, |s| elem_to_json(&sg, s)),
        });
        return Ok((result, Status::BoundedNegative, format!("lift: no base witness for {} values of s", search.tried)));
    };
    let w = &out.witness;
    let mut memberships = Vec::new();
    for (j, &(x, d)) in w.pairs.iter().enumerate() {
        let mut term = Some(x);
        for k in 0..=steps {
            let t = term.expect("certified progression");
            memberships.push(format!(
                "column {}: {} + {k}*{} = {} in A",
                j + 1,
                elem_to_json(&sg, x),
                elem_to_json(&sg, d),
                elem_to_json(&sg, t)
            ));
            term = sg.sum(t, d);
        }
    }
    let result = json!({
        "kind": "lift",
        "s": elem_to_json(&sg, out.s),
        "lifted": matrix_to_json(&out.lifted),
        "base": { "alpha": alpha_json(out.base.alpha), "a": elem_to_json(&sg, out.base.s) },
        "pair_witness": {
            "alpha": alpha_json(w.alpha),
            "shift": [elem_to_json(&sg, w.a), elem_to_json(&sg, w.scaled_s)],
            "pairs": w.pairs.iter().map(|&(x, d)| json!([elem_to_json(&sg, x), elem_to_json(&sg, d)])).collect::<Vec<_>>(),
        },
        "box": box_to_json(&sg, out.bounds),
        "memberships": memberships,
        "window": window_json(&sg),
    });
    let summary = format!(
        "lift: s = {}, alpha = {}, shift = ({}, {})",
        elem_to_json(&sg, out.s),
        alpha_json(w.alpha),
        elem_to_json(&sg, w.a),
        elem_to_json(&sg, w.scaled_s)
    );
    Ok((result, Status::Found, summary))
}

fn ap_pairs(inv: &Invocation) -> CliResult<Body> {
    let a = set_from_doc(input(inv, "set")?)?;
    let sg = a.semigroup().clone();
    let steps = bound_usize(inv, "steps")?;
    let bx = box_from_json(&sg, bound(inv, "box"))?;
    let c = ap_pair_set(&a, steps, bx)?;
    let members: Vec<Json> = c
        .set
        .members()
        .map(|p| {
            let (x, d) = c.product().split(p);
            json!([elem_to_json(&sg, x), elem_to_json(&sg, d)])
        })
        .collect();
    let summary = format!("ap-pairs: {} pairs", members.len());
    Ok((json!({ "count": members.len(), "members": members, "box": box_to_json(&sg, bx) }), Status::Found, summary))
}

fn load_chain(inv: &Invocation) -> CliResult<(ChainCertificate, Json)> {
    let doc = input(inv, "certificate")?;
    let mut cert = chain_from_doc(doc, bound_guard(inv)?)?;
    if bound(inv, "search_shifts").and_then(Json::as_bool).unwrap_or(false) {
        let before = cert.shift_map.len();
        let unresolved = cert.search_shifts();
        let sg = cert.semigroup().clone();
        let info = json!({
            "filled": cert.shift_map.len() - before,
            "unresolved": unresolved.iter().map(|&(n, x)| json!([n, elem_to_json(&sg, x)])).collect::<Vec<_>>(),
        });
        return Ok((cert, info));
    }
    Ok((cert, Json::Null))
}

fn evidence_json(level: usize, e: &CrEvidence) -> Json {
    match e {
        CrEvidence::Exact { holds } => json!({ "level": level, "evidence": "exact", "holds": holds }),
        CrEvidence::Sampled { matrices, failures } => json!({
            "level": level,
            "evidence": "sampled",
            "matrices": matrices,
            "failures": failures.iter().map(|i| i + 1).collect::<Vec<_>>(),
        }),
        CrEvidence::Unchecked => json!({ "level": level, "evidence": "unchecked" }),
    }
}

fn chain_validate(inv: &Invocation) -> CliResult<Body> {
    let (cert, search) = load_chain(inv)?;
    let sg = cert.semigroup().clone();
    let base = match inv.inputs.get("set") {
        Some(doc) => set_from_doc(doc)?,
        None => cert.level(1).clone(),
    };
    let report = validate_chain_structure(&cert, &base)?;
    let cr = parallel::chain_cr_evidence(&cert.sets, &cert.cr)?;
    let cr_failed = cr.iter().any(|e| !matches!(e, CrEvidence::Unchecked) && !e.passed());
    let cr_unchecked = cr.iter().any(|e| matches!(e, CrEvidence::Unchecked));
    let exact_fail = !report.containment_ok() || !report.shift_ok() || cr_failed;
    let status = if exact_fail {
        negative(sg.is_total())
    } else if cr_unchecked {
        Status::BoundedNegative
    } else {
        Status::Found
    };
    let result = json!({
        "horizon": report.horizon,
        "window_relative": report.window_relative,
        "containment": {
            "ok": report.containment_ok(),
            "outside_base": report.outside_base.iter().map(|&(i, x)| json!([i, elem_to_json(&sg, x)])).collect::<Vec<_>>(),
            "decrease_violations": report.decrease_violations,
        },
        "shift": {
            "ok": report.shift_ok(),
            "checked": report.shift_checked,
            "failures": report.shift_failures.iter().map(|f| json!({
                "n": f.n, "x": elem_to_json(&sg, f.x), "m": f.m, "y": elem_to_json(&sg, f.y),
            })).collect::<Vec<_>>(),
            "missing": report.shift_missing.iter().map(|&(n, x)| json!([n, elem_to_json(&sg, x)])).collect::<Vec<_>>(),
        },
        "cr": cr.iter().enumerate().map(|(i, e)| evidence_json(i + 1, e)).collect::<Vec<_>>(),
        "search_shifts": search,
        "passed": status == Status::Found,
    });
    let summary = format!(
        "chain-validate: containment {}, shift {} ({} checked), CR {}",
        ok_word(report.containment_ok()),
        ok_word(report.shift_ok()),
        report.shift_checked,
        if cr_failed {
            "failed"
        } else if cr_unchecked {
            "unchecked"
        } else {
            "ok"
        }
    );
    Ok((result, status, summary))
}

fn ok_word(b: bool) -> &'static str {
    if b {
        "ok"
    } else {
        "FAILED"
    }
}

fn chain_lift_cmd(inv: &Invocation) -> CliResult<Body> {
    let (cert, search) = load_chain(inv)?;
    let sg = cert.semigroup().clone();
    let steps = bound_usize(inv, "steps")?;
    let bx = box_from_json(&sg, bound(inv, "box"))?;
    let a_side = validate_chain_structure(&cert, cert.level(1))?;
    let lifted = lift_chain(&cert, steps, bx)?;
    let product = lifted.cert.semigroup().clone();
    let b_side = validate_chain_structure(&lifted.cert, lifted.cert.level(1))?;
    let failed: Vec<Json> = lifted
        .checks
        .iter()
        .filter(|c| !c.holds)
        .map(|c| json!({ "n": c.n, "pair": elem_to_json(&product, c.pair), "level": c.level }))
        .collect();
    // On a window, B-side inclusions only make sense for pairs whose
    // translated progression stays inside; lift_chain checks exactly those.
    let total = sg.is_total();
    let b_shift_ok = if total { b_side.shift_ok() } else { lifted.checks.iter().all(|c| c.holds) };
    let verified = lifted.verified() && b_side.containment_ok() && b_shift_ok;
    let status = if verified { Status::Found } else { negative(total) };
    let result = json!({
        "steps": steps,
        "box": box_to_json(&sg, bx),
        "a_side": { "containment_ok": a_side.containment_ok(), "shift_ok": a_side.shift_ok() },
        "levels": lifted.cert.sets.iter().enumerate().map(|(i, b)| json!({ "level": i + 1, "size": b.len() })).collect::<Vec<_>>(),
        "certificate": chain_to_doc(&lifted.cert),
        "checks": lifted.checks.len(),
        "failed_checks": failed,
        "gaps": lifted.gaps.iter().map(|&(n, p, x)| json!({
            "n": n, "pair": elem_to_json(&product, p), "x": elem_to_json(&sg, x),
        })).collect::<Vec<_>>(),
        "b_side": {
            "decrease_ok": b_side.containment_ok(),
            "shift_ok": b_shift_ok,
            "shift_checked": b_side.shift_checked,
            "shift_domain": if total { "universe" } else { "progressions inside the window" },
            "leaving_window": if total { Json::Null } else { json!(b_side.shift_failures.len()) },
        },
        "search_shifts": search,
        "window_relative": !total,
        "verified": verified,
    });
    let summary = format!(
        "chain-lift: {} levels, {} shift inclusions checked, {}",
        lifted.cert.len(),
        lifted.checks.len(),
        if verified { "verified" } else { "NOT verified" }
    );
    Ok((result, status, summary))
}

fn vdw(inv: &Invocation) -> CliResult<Body> {
    let (k, c, upto) = (bound_usize(inv, "terms")?, bound_usize(inv, "colors")?, bound_usize(inv, "upto")?);
    let guard = bound_guard(inv)?;
    Ok(match vdw_check(k, c, upto, guard)? {
        VdwVerdict::Holds => (
            json!({ "verdict": "holds", "terms": k, "colors": c, "upto": upto }),
            Status::Found,
            format!("vdw: all colorings of [1,{upto}] with {c} colors contain a monochromatic {k}-AP"),
        ),
        VdwVerdict::Counterexample(col) => (
            json!({ "verdict": "counterexample", "terms": k, "colors": c, "upto": upto, "coloring": col }),
            Status::ProvenNegative,
            format!("vdw: coloring {col:?} of [1,{upto}] has no monochromatic {k}-AP"),
        ),
    })
}

fn fuzz_cmd(inv: &Invocation) -> CliResult<Body> {
    let campaign = bound(inv, "campaign").and_then(Json::as_str).unwrap_or("all").to_string();
    let seed = bound(inv, "seed").and_then(Json::as_u64).unwrap_or(fuzz::DEFAULT_SEED);
    let count = bound_usize(inv, "count")?;
    let report = fuzz::run(&campaign, seed, count)?;
    let failures = report.failures();
    let summary = format!("fuzz: {} campaign(s), {failures} failure(s)", report.campaigns.len());
    let status = if failures == 0 { Status::Found } else { Status::ProvenNegative };
    Ok((report.to_json(), status, summary))
}

fn validate_record(inv: &Invocation) -> CliResult<Outcome> {
    let record = input(inv, "record")?;
    let original = invocation_from_record(record)?;
    if original.subcommand == "validate" {
        return Err(CliError::Input("a validate record cannot be replayed again".into()));
    }
    let recorded = record.get("result").cloned().unwrap_or(Json::Null);
    let witness = verify(&original, &recorded)?;
    let replay = execute(&original)?;
    let identical = replay.result == recorded;
    let code_matches = record.get("exit_code").and_then(Json::as_i64) == Some(replay.status.exit_code() as i64);
    let ok = identical && code_matches && witness != Some(false);
    let result = json!({
        "replayed": original.subcommand,
        "result_identical": identical,
        "exit_code_identical": code_matches,
        "witness_valid": witness,
    });
    let summary = format!(
        "validate: replay {}, witness {}",
        if identical && code_matches { "identical" } else { "DIFFERS" },
        match witness {
            Some(true) => "valid",
            Some(false) => "INVALID",
            None => "not applicable",
        }
    );
    Ok(Outcome {
        result,
        status: if ok { Status::Found } else { Status::ProvenNegative },
        validated: Some(ok),
        summary,
    })
}

pub fn invocation_from_record(record: &Json) -> CliResult<Invocation> {
    let subcommand = record
        .get("subcommand")
        .and_then(Json::as_str)
        .ok_or_else(|| CliError::Input("record has no subcommand".into()))?
        .to_string();
    let inputs = match record.get("inputs") {
        Some(Json::Object(map)) => map.iter().map(|(k, v)| (k.clone(), v.clone())).collect(),
        Some(Json::Null) | None => BTreeMap::new(),
        Some(_) => return Err(CliError::Input("record inputs must be an object".into())),
    };
    let bounds = record.get("bounds").cloned().unwrap_or_else(|| json!({}));
    Ok(Invocation { subcommand, inputs, bounds })
}

/// Re-checks the witness in `result` against the inputs, reading only the
/// JSON payload. `None` when the payload has nothing to check.
pub fn verify(inv: &Invocation, result: &Json) -> CliResult<Option<bool>> {
    if result.get("result").and_then(Json::as_str) == Some("not_found") {
        return Ok(None);
    }
    let checked = match inv.subcommand.as_str() {
        "syndetic" => {
            let a = set_from_doc(input(inv, "set")?)?;
            let scope = scope_for(a.semigroup(), inv)?;
            let f = elems_from_json(a.semigroup(), &result["F"])?;
            validate::check_cover(&a, &f, codes(scope.target.iter())).is_ok()
        }
        "thick" => {
            let a = set_from_doc(input(inv, "set")?)?;
            let sg = a.semigroup();
            let e = elems_from_json(sg, &result["E"])?;
            e == probe_for(&a, inv)? && validate::check_thick(&a, &e, elem_from_json(sg, &result["x"])?).is_ok()
        }
        "pws" => {
            let a = set_from_doc(input(inv, "set")?)?;
            let sg = a.semigroup();
            let f = elems_from_json(sg, &result["F"])?;
            let e = elems_from_json(sg, &result["E"])?;
            e == probe_for(&a, inv)? && validate::check_pws(&a, &f, &e, elem_from_json(sg, &result["x"])?).is_ok()
        }
        "j-witness" => {
            let a = set_from_doc(input(inv, "set")?)?;
            let sg = a.semigroup().clone();
            let family = family_from_doc(&sg, input(inv, "sequences")?)?;
            let h = alpha_from_json(&result["H"])?;
            let x = elem_from_json(&sg, &result["a"])?;
            validate::check_j_witness(&a, family.sequences(), x, h).is_ok()
        }
        "cr-witness" => {
            let a = set_from_doc(input(inv, "set")?)?;
            let m = matrix_from_doc(input(inv, "matrix")?)?;
            let alpha = alpha_from_json(&result["alpha"])?;
            let s = elem_from_json(a.semigroup(), &result["s"])?;
            validate::check_cr_witness(&a, &m, alpha, s).is_ok()
        }
        "extract-ap" => {
            let a = set_from_doc(input(inv, "set")?)?;
            let sg = a.semigroup().clone();
            let (n, r) = (bound_usize(inv, "n")?, bound_usize(inv, "r")?);
            let alpha = alpha_from_json(&result["alpha"])?;
            let s = elem_from_json(&sg, &result["s"])?;
            let terms = elems_from_json(&sg, &result["terms"])?;
            let d = result["d"].as_u64().unwrap_or(0);
            let m = generator_matrix(&sg, n, r)?;
            validate::check_cr_witness(&a, &m, alpha, s).is_ok()
                && d == alpha.count_ones() as u64
                && terms.len() == n
                && terms.iter().all(|&t| a.contains(t))
                && ap_terms_match(&sg, s, d, &terms)
        }
        "cr-check" => match result["verdict"].as_str() {
            Some("fails") => {
                let a = set_from_doc(input(inv, "set")?)?;
                let mut doc = result["counterexample"].clone();
                doc["semigroup"] = input(inv, "set")?["semigroup"].clone();
                no_witness_exists(&a, &matrix_from_doc(&doc)?)
            }
            _ => return Ok(None),
        },
        "concat" => {
            let parts = concat_inputs(inv)?;
            let mut doc = result.clone();
            doc["semigroup"] = input(inv, "matrices")?[0]["semigroup"].clone();
            concat_matches(&parts, &matrix_from_doc(&doc)?)
        }
        "lift" => verify_lift(inv, result)?,
        "ap-pairs" => {
            let a = set_from_doc(input(inv, "set")?)?;
            let sg = a.semigroup().clone();
            let steps = bound_usize(inv, "steps")?;
            let bx = box_from_json(&sg, bound(inv, "box"))?;
            let members = result["members"].as_array().cloned().unwrap_or_default();
            let mut listed = 0u64;
            let mut ok = true;
            for p in &members {
                let x = elem_from_json(&sg, &p[0])?;
                let d = elem_from_json(&sg, &p[1])?;
                ok &= bx.contains(x, d) && validate::is_ap_pair(&a, steps, x, d);
                listed += 1;
            }
            let expected = bx
                .first
                .iter()
                .flat_map(|x| bx.second.iter().map(move |d| (x, d)))
                .filter(|&(x, d)| validate::is_ap_pair(&a, steps, x, d))
                .count() as u64;
            ok && listed == expected
        }
        "vdw" => match result["verdict"].as_str() {
            Some("counterexample") => {
                let k = bound_usize(inv, "terms")?;
                let c = bound_usize(inv, "colors")?;
                let col: Vec<u8> = serde_json::from_value(result["coloring"].clone())
                    .map_err(|e| CliError::Input(format!("bad coloring: {e}")))?;
                col.len() == bound_usize(inv, "upto")? && col.iter().all(|&x| (x as usize) < c) && !has_monochromatic_ap(&col, k)
            }
            _ => return Ok(None),
        },
        _ => return Ok(None),
    };
    Ok(Some(checked))
}

fn ap_terms_match(sg: &Semigroup, s: Elem, d: u64, terms: &[Elem]) -> bool {
    // s + j·d for j = 1..=n, with d read as an integer multiple of 1
    let one = match sg.as_window() {
        Some(_) => sg.nat(1),
        None => Some(Elem(1 % sg.size())),
    };
    let Some(one) = one else { return false };
    let Some(step) = sg.repeat_add(d, one).ok().flatten() else { return false };
    let mut cur = s;
    terms.iter().all(|&t| match sg.sum(cur, step) {
        Some(v) if v == t => {
            cur = v;
            true
        }
        _ => false,
    })
}

/// Brute force over every row set and shift.
fn no_witness_exists(a: &GroundSet, m: &Matrix) -> bool {
    let sg = a.semigroup();
    (1..1u64 << m.rows()).all(|alpha| sg.elements().all(|s| validate::check_cr_witness(a, m, alpha, s).is_err()))
}

fn concat_matches(parts: &[Matrix], joined: &Matrix) -> bool {
    let cols: usize = parts.iter().map(Matrix::cols).sum();
    if joined.cols() != cols || parts.iter().any(|p| p.rows() != joined.rows()) {
        return false;
    }
    let mut offset = 0;
    for p in parts {
        for i in 0..p.rows() {
            for j in 0..p.cols() {
                if joined.get(i, offset + j) != p.get(i, j) {
                    return false;
                }
            }
        }
        offset += p.cols();
    }
    true
}

fn verify_lift(inv: &Invocation, result: &Json) -> CliResult<bool> {
    let a = set_from_doc(input(inv, "set")?)?;
    let mp = pair_matrix_from_doc(input(inv, "pair_matrix")?)?;
    let sg: Arc<Semigroup> = a.semigroup().clone();
    let steps = bound_usize(inv, "steps")?;
    let pw = &result["pair_witness"];
    let alpha = alpha_from_json(&pw["alpha"])?;
    let shift = elems_from_json(&sg, &pw["shift"])?;
    let pairs = pw["pairs"].as_array().cloned().unwrap_or_default();
    let s = elem_from_json(&sg, &result["s"])?;
    if shift.len() != 2 || pairs.len() != mp.cols() || alpha == 0 {
        return Ok(false);
    }
    let Some(scaled) = sg.repeat_add(alpha.count_ones() as u64, s)? else {
        return Ok(false);
    };
    if scaled != shift[1] {
        return Ok(false);
    }
    for (j, p) in pairs.iter().enumerate() {
        let x = elem_from_json(&sg, &p[0])?;
        let d = elem_from_json(&sg, &p[1])?;
        let (Some(c1), Some(c2)) = (mp.first().row_sum(alpha, j)?, mp.second().row_sum(alpha, j)?) else {
            return Ok(false);
        };
        if sg.add(shift[0], c1)? != Some(x) || sg.add(shift[1], c2)? != Some(d) || !validate::is_ap_pair(&a, steps, x, d) {
            return Ok(false);
        }
    }
    Ok(true)
}
