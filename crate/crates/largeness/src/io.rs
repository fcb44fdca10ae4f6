//! JSON file formats shared by every subcommand.
//!
//! A semigroup is written inline or as a path (relative to the file that
//! mentions it) to a semigroup file. Loaded documents are stored with every
//! path resolved, so a record that embeds them can be replayed without the
//! original files.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use largeness_core::chain::{ChainCertificate, CrParams};
use largeness_core::lift::{PairBox, PairMatrix};
use largeness_core::semigroup::Shape;
use largeness_core::witness::{SeqFamily, DEFAULT_COST_GUARD};
use largeness_core::{Elem, ElemRange, FiniteTable, GroundSet, Matrix, Semigroup, Value};
use serde::Deserialize;
use serde_json::{json, Value as Json};
use sha2::{Digest, Sha256};

use crate::error::{CliError, CliResult};

#[derive(Deserialize, Clone, Debug)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SemigroupSpec {
    FiniteTable {
        order: u32,
        table: Vec<Vec<u32>>,
    },
    NatWindow {
        #[serde(default = "default_lo")]
        lo: u64,
        hi: u64,
    },
    Product {
        left: Box<SemigroupSpec>,
        right: Box<SemigroupSpec>,
    },
    Cyclic {
        order: u32,
    },
}

fn default_lo() -> u64 {
    1
}

impl SemigroupSpec {
    pub fn build(&self) -> CliResult<Semigroup> {
        Ok(match self {
            SemigroupSpec::FiniteTable { order, table } => {
                if table.len() != *order as usize {
                    return Err(CliError::Input(format!(
                        "finite_table declares order {order} but has {} rows",
                        table.len()
                    )));
                }
                Semigroup::finite_table(FiniteTable::from_rows(table)?)?
            }
            SemigroupSpec::NatWindow { lo, hi } => Semigroup::nat_window(*lo, *hi)?,
            SemigroupSpec::Product { left, right } => Semigroup::product(left.build()?, right.build()?)?,
            SemigroupSpec::Cyclic { order } => {
                if *order == 0 {
                    return Err(CliError::Input("cyclic order must be at least 1".into()));
                }
                Semigroup::cyclic(*order)
            }
        })
    }
}

pub fn semigroup_from_doc(doc: &Json) -> CliResult<Arc<Semigroup>> {
    let spec: SemigroupSpec = from_json(doc, "semigroup")?;
    Ok(Arc::new(spec.build()?))
}

fn from_json<T: serde::de::DeserializeOwned>(doc: &Json, what: &str) -> CliResult<T> {
    serde_json::from_value(doc.clone()).map_err(|e| CliError::Input(format!("malformed {what}: {e}")))
}

/// Reads input files, resolves semigroup references and hashes every byte
/// read, in the order read.
#[derive(Default)]
pub struct Loader {
    hasher: Sha256,
}

impl Loader {
    pub fn new() -> Self {
        Loader::default()
    }

    fn read(&mut self, path: &Path) -> CliResult<Json> {
        let bytes = fs::read(path).map_err(|source| CliError::Io { path: path.to_path_buf(), source })?;
        self.hasher.update((bytes.len() as u64).to_le_bytes());
        self.hasher.update(&bytes);
        serde_json::from_slice(&bytes).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
    }

    /// Loads a document and inlines every `"semigroup"` reference in it.
    pub fn load(&mut self, path: &Path) -> CliResult<Json> {
        let mut doc = self.read(path)?;
        let dir = parent(path);
        if let Some(sg) = doc.get_mut("semigroup") {
            *sg = self.resolve_semigroup(sg, &dir)?;
        }
        Ok(doc)
    }

    /// A semigroup file, or a document carrying one under `"semigroup"`.
    pub fn load_semigroup(&mut self, path: &Path) -> CliResult<Json> {
        let doc = self.read(path)?;
        let dir = parent(path);
        match doc.get("semigroup") {
            Some(inner) => self.resolve_semigroup(inner, &dir),
            None => self.resolve_semigroup(&doc, &dir),
        }
    }

    fn resolve_semigroup(&mut self, v: &Json, dir: &Path) -> CliResult<Json> {
        match v {
            Json::String(rel) => {
                let path = dir.join(rel);
                let doc = self.read(&path)?;
                self.resolve_semigroup(&doc, &parent(&path))
            }
            Json::Object(map) => {
                let mut out = map.clone();
                if map.get("kind").and_then(Json::as_str) == Some("product") {
                    for side in ["left", "right"] {
                        let child = map
                            .get(side)
                            .ok_or_else(|| CliError::Input(format!("product semigroup without {side}")))?;
                        out.insert(side.into(), self.resolve_semigroup(child, dir)?);
                    }
                }
                Ok(Json::Object(out))
            }
            _ => Err(CliError::Input("a semigroup is an object or a path to one".into())),
        }
    }

    pub fn digest(&self) -> String {
        format!("sha256:{}", hex::encode(self.hasher.clone().finalize()))
    }
}

fn parent(path: &Path) -> PathBuf {
    path.parent().map(Path::to_path_buf).unwrap_or_default()
}

pub fn elem_from_json(sg: &Semigroup, v: &Json) -> CliResult<Elem> {
    Ok(sg.elem(&value_from_json(sg, v)?)?)
}

fn value_from_json(sg: &Semigroup, v: &Json) -> CliResult<Value> {
    match sg.shape() {
        Shape::Table(_) => v
            .as_u64()
            .and_then(|i| u32::try_from(i).ok())
            .map(Value::Index)
            .ok_or_else(|| CliError::Input(format!("{v} is not a table index"))),
        Shape::Window(_) => v.as_u64().map(Value::Nat).ok_or_else(|| CliError::Input(format!("{v} is not a natural number"))),
        Shape::Product(l, r) => match v.as_array().map(Vec::as_slice) {
            Some([a, b]) => Ok(Value::pair(value_from_json(l, a)?, value_from_json(r, b)?)),
            _ => Err(CliError::Input(format!("{v} is not a pair"))),
        },
    }
}

pub fn elem_to_json(sg: &Semigroup, e: Elem) -> Json {
    value_to_json(&sg.value(e))
}

fn value_to_json(v: &Value) -> Json {
    match v {
        Value::Index(i) => json!(i),
        Value::Nat(n) => json!(n),
        Value::Pair(a, b) => json!([value_to_json(a), value_to_json(b)]),
    }
}

pub fn elems_to_json(sg: &Semigroup, xs: impl IntoIterator<Item = Elem>) -> Json {
    Json::Array(xs.into_iter().map(|e| elem_to_json(sg, e)).collect())
}

pub fn elems_from_json(sg: &Semigroup, v: &Json) -> CliResult<Vec<Elem>> {
    v.as_array()
        .ok_or_else(|| CliError::Input(format!("expected an array of elements, got {v}")))?
        .iter()
        .map(|x| elem_from_json(sg, x))
        .collect()
}

pub fn matrix_to_json(m: &Matrix) -> Json {
    let sg = m.semigroup();
    let entries: Vec<Json> = (0..m.rows()).map(|i| elems_to_json(sg, m.row(i).iter().copied())).collect();
    json!({ "rows": m.rows(), "cols": m.cols(), "entries": entries })
}

fn grid_from_json(sg: &Arc<Semigroup>, v: &Json) -> CliResult<Matrix> {
    let rows = v
        .as_array()
        .ok_or_else(|| CliError::Input("matrix entries must be an array of rows".into()))?
        .iter()
        .map(|row| elems_from_json(sg, row))
        .collect::<CliResult<Vec<_>>>()?;
    Ok(Matrix::from_rows(sg, &rows)?)
}

fn field<'a>(doc: &'a Json, key: &str, what: &str) -> CliResult<&'a Json> {
    doc.get(key).ok_or_else(|| CliError::Input(format!("{what} has no \"{key}\" field")))
}

pub fn set_from_doc(doc: &Json) -> CliResult<GroundSet> {
    let sg = semigroup_from_doc(field(doc, "semigroup", "set file")?)?;
    let members = elems_from_json(&sg, field(doc, "members", "set file")?)?;
    Ok(GroundSet::from_elems(&sg, members)?)
}

pub fn set_to_doc(set: &GroundSet, sg_doc: &Json) -> Json {
    json!({ "semigroup": sg_doc, "members": elems_to_json(set.semigroup(), set.members()) })
}

pub fn matrix_from_doc(doc: &Json) -> CliResult<Matrix> {
    let sg = semigroup_from_doc(field(doc, "semigroup", "matrix file")?)?;
    let m = grid_from_json(&sg, field(doc, "entries", "matrix file")?)?;
    check_shape(doc, m.rows(), m.cols())?;
    Ok(m)
}

fn check_shape(doc: &Json, rows: usize, cols: usize) -> CliResult<()> {
    for (key, actual) in [("rows", rows), ("cols", cols)] {
        if let Some(declared) = doc.get(key) {
            if declared.as_u64() != Some(actual as u64) {
                return Err(CliError::Input(format!("declared {key} = {declared} but entries give {actual}")));
            }
        }
    }
    Ok(())
}

/// `{"semigroup": S, "entries": [[[a, b], ...], ...]}`: a matrix over `S × S`
/// written with the base semigroup and pair entries.
pub fn pair_matrix_from_doc(doc: &Json) -> CliResult<PairMatrix> {
    let sg = semigroup_from_doc(field(doc, "semigroup", "pair matrix file")?)?;
    let rows = field(doc, "entries", "pair matrix file")?
        .as_array()
        .ok_or_else(|| CliError::Input("pair matrix entries must be an array of rows".into()))?;
    let mut first = Vec::with_capacity(rows.len());
    let mut second = Vec::with_capacity(rows.len());
    for row in rows {
        let row = row.as_array().ok_or_else(|| CliError::Input("pair matrix row must be an array".into()))?;
        let mut r1 = Vec::with_capacity(row.len());
        let mut r2 = Vec::with_capacity(row.len());
        for cell in row {
            match cell.as_array().map(Vec::as_slice) {
                Some([a, b]) => {
                    r1.push(elem_from_json(&sg, a)?);
                    r2.push(elem_from_json(&sg, b)?);
                }
                _ => return Err(CliError::Input(format!("pair matrix entry {cell} is not a pair"))),
            }
        }
        first.push(r1);
        second.push(r2);
    }
    let mp = PairMatrix::new(Matrix::from_rows(&sg, &first)?, Matrix::from_rows(&sg, &second)?)?;
    check_shape(doc, mp.rows(), mp.cols())?;
    Ok(mp)
}

/// A bare array of elements or `{"elements": [...]}`.
pub fn probe_from_doc(sg: &Semigroup, doc: &Json) -> CliResult<Vec<Elem>> {
    let list = doc.get("elements").unwrap_or(doc);
    let probe = elems_from_json(sg, list)?;
    if probe.is_empty() {
        return Err(CliError::Input("probe set is empty".into()));
    }
    Ok(probe)
}

/// `{"sequences": [[...], ...], "horizon": m}`; the horizon defaults to the
/// shortest sequence.
pub fn family_from_doc(sg: &Arc<Semigroup>, doc: &Json) -> CliResult<SeqFamily> {
    let seqs = field(doc, "sequences", "sequence file")?
        .as_array()
        .ok_or_else(|| CliError::Input("sequences must be an array".into()))?
        .iter()
        .map(|s| elems_from_json(sg, s))
        .collect::<CliResult<Vec<_>>>()?;
    Ok(match doc.get("horizon").and_then(Json::as_u64) {
        Some(h) => SeqFamily::new(sg, seqs, h as usize)?,
        None => SeqFamily::from_sequences(sg, seqs)?,
    })
}

#[derive(Deserialize)]
struct ShiftEntry {
    n: usize,
    x: Json,
    m: usize,
}

#[derive(Deserialize, Default)]
#[serde(default)]
struct CrParamsDoc {
    n: Option<usize>,
    r: Option<usize>,
    full: Option<bool>,
    guard: Option<u128>,
    s_range: Option<Json>,
    panel: Vec<Json>,
}

/// `{"semigroup", "sets": [[...], ...], "shift_map": [{"n", "x", "m"}], "cr_params": {...}}`.
pub fn chain_from_doc(doc: &Json, guard: u128) -> CliResult<ChainCertificate> {
    let sg = semigroup_from_doc(field(doc, "semigroup", "chain certificate")?)?;
    let sets = field(doc, "sets", "chain certificate")?
        .as_array()
        .ok_or_else(|| CliError::Input("sets must be an array of member lists".into()))?
        .iter()
        .map(|members| Ok(GroundSet::from_elems(&sg, elems_from_json(&sg, members)?)?))
        .collect::<CliResult<Vec<_>>>()?;
    let entries: Vec<ShiftEntry> = match doc.get("shift_map") {
        Some(v) => from_json(v, "shift_map")?,
        None => Vec::new(),
    };
    let mut shift_map = BTreeMap::new();
    for e in entries {
        let x = elem_from_json(&sg, &e.x)?;
        if shift_map.insert((e.n, x), e.m).is_some() {
            return Err(CliError::Input(format!("duplicate shift entry for n = {}, x = {}", e.n, e.x)));
        }
    }
    let p: CrParamsDoc = match doc.get("cr_params") {
        Some(v) => from_json(v, "cr_params")?,
        None => CrParamsDoc::default(),
    };
    let cr = CrParams {
        n: p.n.unwrap_or(1),
        r: p.r.unwrap_or(1),
        s_range: p.s_range.as_ref().map(|v| range_from_json(&sg, v)).transpose()?,
        panel: p.panel.iter().map(|g| grid_from_json(&sg, g)).collect::<CliResult<_>>()?,
        full: p.full.unwrap_or(true),
        guard: p.guard.unwrap_or(guard),
    };
    Ok(ChainCertificate::new(sets, shift_map, cr)?)
}

pub fn chain_to_doc(cert: &ChainCertificate) -> Json {
    let sg = cert.semigroup();
    let sets: Vec<Json> = cert.sets.iter().map(|c| elems_to_json(sg, c.members())).collect();
    let shift_map: Vec<Json> = cert
        .shift_map
        .iter()
        .map(|(&(n, x), &m)| json!({ "n": n, "x": elem_to_json(sg, x), "m": m }))
        .collect();
    json!({ "sets": sets, "shift_map": shift_map })
}

/// `[lo, hi]` in element notation, inclusive, canonical order.
pub fn range_from_json(sg: &Semigroup, v: &Json) -> CliResult<ElemRange> {
    match v.as_array().map(Vec::as_slice) {
        Some([lo, hi]) => Ok(ElemRange::new(sg, elem_from_json(sg, lo)?, elem_from_json(sg, hi)?)?),
        _ => Err(CliError::Input(format!("a range is [lo, hi], got {v}"))),
    }
}

pub fn range_to_json(sg: &Semigroup, r: ElemRange) -> Json {
    json!([elem_to_json(sg, r.start), elem_to_json(sg, r.end)])
}

/// Optional range from bounds, defaulting to the whole universe.
pub fn range_or_all(sg: &Semigroup, v: Option<&Json>) -> CliResult<ElemRange> {
    match v {
        Some(Json::Null) | None => Ok(ElemRange::all(sg)),
        Some(v) => range_from_json(sg, v),
    }
}

pub fn box_from_json(sg: &Semigroup, v: Option<&Json>) -> CliResult<PairBox> {
    match v {
        Some(Json::Null) | None => Ok(PairBox::all(sg)),
        Some(v) => match v.as_array().map(Vec::as_slice) {
            Some([a, b]) => Ok(PairBox { first: range_from_json(sg, a)?, second: range_from_json(sg, b)? }),
            _ => Err(CliError::Input(format!("a box is [[a_lo, a_hi], [b_lo, b_hi]], got {v}"))),
        },
    }
}

pub fn box_to_json(sg: &Semigroup, b: PairBox) -> Json {
    json!([range_to_json(sg, b.first), range_to_json(sg, b.second)])
}

/// Description of the semigroup for reports: the window, if any.
pub fn window_json(sg: &Semigroup) -> Json {
    match sg.as_window() {
        Some(w) => json!({ "lo": w.lo, "hi": w.hi }),
        None => Json::Null,
    }
}

/// `LARGENESS_COST_GUARD`, else the library default.
pub fn default_guard() -> CliResult<u128> {
    match std::env::var("LARGENESS_COST_GUARD") {
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| CliError::Input(format!("LARGENESS_COST_GUARD must be a non-negative integer, got {v:?}"))),
        Err(_) => Ok(DEFAULT_COST_GUARD),
    }
}
