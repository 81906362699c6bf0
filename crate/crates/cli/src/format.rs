//! The algebra file: a JSON document holding a structure-constant table.
//!
//! ```text
//! {"field": {"char": 3},
//!  "basis": [{"label": "t0", "parity": 0}, ...],
//!  "symmetry": "super-anticommutative",
//!  "brackets": [[i, j, k, "c"], ...],
//!  "provenance": {...}, "blocks": {"tri": {"index": 0, "start": 0, "len": 5, "dims": [3, 2]}, ...},
//!  "jacobi": "pass"}
//! ```
//!
//! With `super-anticommutative` symmetry only `i < j` entries and odd diagonal
//! entries are stored; `none` stores every product.

use std::collections::BTreeMap;

use serde_json::{json, Map, Value};
use titsforge::construct::{check_blocks, Block, LieSuperAlgebra};
use titsforge::{AlgebraTable, Error, Field, Parity, Result, SparseVec, SuperSpace};

/// Upper bound on the basis size accepted by the parser.
pub const MAX_BASIS: usize = 1024;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Symmetry {
    SuperAnticommutative,
    None,
}

impl Symmetry {
    pub fn name(self) -> &'static str {
        match self {
            Symmetry::SuperAnticommutative => "super-anticommutative",
            Symmetry::None => "none",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct AlgebraFile {
    pub table: AlgebraTable,
    pub symmetry: Symmetry,
    pub provenance: Value,
    pub blocks: Vec<Block>,
    /// Jacobi verdict recorded at build time; analysis recomputes it.
    pub jacobi: Option<Value>,
}

impl AlgebraFile {
    pub fn from_algebra(a: &LieSuperAlgebra) -> AlgebraFile {
        AlgebraFile {
            table: a.table().clone(),
            symmetry: Symmetry::SuperAnticommutative,
            provenance: serde_json::to_value(a.provenance()).expect("provenance serializes"),
            blocks: a.blocks().to_vec(),
            jacobi: Some(a.jacobi().to_json(a.table())),
        }
    }

    /// A bare table; the symmetry is detected.
    pub fn from_table(table: AlgebraTable) -> AlgebraFile {
        let symmetry =
            if table.is_superanticommutative() { Symmetry::SuperAnticommutative } else { Symmetry::None };
        AlgebraFile { table, symmetry, provenance: Value::Null, blocks: Vec::new(), jacobi: None }
    }

    pub fn to_json(&self) -> Value {
        let t = &self.table;
        let f = t.field();
        let n = t.dim();
        let basis: Vec<Value> =
            (0..n).map(|i| json!({ "label": t.space().label(i), "parity": t.parity(i).bit() })).collect();
        let mut brackets = Vec::new();
        for i in 0..n {
            for j in 0..n {
                let keep = match self.symmetry {
                    Symmetry::None => true,
                    Symmetry::SuperAnticommutative => i < j || (i == j && t.parity(i).is_odd()),
                };
                if !keep {
                    continue;
                }
                for (k, c) in t.product(i, j).iter() {
                    brackets.push(json!([i, j, k, f.format(c)]));
                }
            }
        }
        let mut o = Map::new();
        o.insert("field".into(), json!({ "char": f.characteristic() }));
        o.insert("dims".into(), json!([t.dims().0, t.dims().1]));
        o.insert("basis".into(), Value::Array(basis));
        o.insert("symmetry".into(), json!(self.symmetry.name()));
        o.insert("brackets".into(), Value::Array(brackets));
        if !self.provenance.is_null() {
            o.insert("provenance".into(), self.provenance.clone());
        }
        if !self.blocks.is_empty() {
            let blocks: Map<String, Value> = self
                .blocks
                .iter()
                .enumerate()
                .map(|(k, b)| {
                    (b.name.clone(), json!({ "index": k, "start": b.start, "len": b.len, "dims": [b.dims.0, b.dims.1] }))
                })
                .collect();
            o.insert("blocks".into(), Value::Object(blocks));
        }
        if let Some(j) = &self.jacobi {
            o.insert("jacobi".into(), j.clone());
        }
        Value::Object(o)
    }

    pub fn emit(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.to_json()).expect("JSON serializes");
        s.push('\n');
        s
    }

    pub fn parse(text: &str) -> Result<AlgebraFile> {
        let v: Value = serde_json::from_str(text).map_err(|e| Error::Parse {
            location: format!("line {} column {}", e.line(), e.column()),
            message: e.to_string(),
        })?;
        from_value(&v)
    }
}

fn err(location: impl Into<String>, message: impl Into<String>) -> Error {
    Error::Parse { location: location.into(), message: message.into() }
}

fn usize_at(v: &Value, loc: &str) -> Result<usize> {
    v.as_u64().and_then(|x| usize::try_from(x).ok()).ok_or_else(|| err(loc, "expected a non-negative integer"))
}

const KEYS: [&str; 8] = ["field", "dims", "basis", "symmetry", "brackets", "provenance", "blocks", "jacobi"];

pub fn from_value(v: &Value) -> Result<AlgebraFile> {
    let top = v.as_object().ok_or_else(|| err("$", "expected an object"))?;
    if let Some(k) = top.keys().find(|k| !KEYS.contains(&k.as_str())) {
        return Err(err(format!("$.{k}"), "unknown key"));
    }
    let get = |k: &str| top.get(k).ok_or_else(|| err(format!("$.{k}"), "missing"));

    let fv = get("field")?;
    let ch = fv.get("char").ok_or_else(|| err("$.field.char", "missing"))?;
    let ch = ch.as_u64().ok_or_else(|| err("$.field.char", "expected a non-negative integer"))?;
    let f = Field::new(ch).map_err(|e| err("$.field.char", e.to_string()))?;

    let basis = get("basis")?.as_array().ok_or_else(|| err("$.basis", "expected an array"))?;
    if basis.len() > MAX_BASIS {
        return Err(err("$.basis", format!("{} basis vectors exceed the limit {MAX_BASIS}", basis.len())));
    }
    let mut labels = Vec::with_capacity(basis.len());
    for (i, b) in basis.iter().enumerate() {
        let loc = format!("$.basis[{i}]");
        let label = b.get("label").and_then(Value::as_str).ok_or_else(|| err(format!("{loc}.label"), "expected a string"))?;
        let bit = b.get("parity").and_then(Value::as_u64).ok_or_else(|| err(format!("{loc}.parity"), "expected 0 or 1"))?;
        let p = u8::try_from(bit).ok().and_then(|b| Parity::from_bit(b).ok()).ok_or_else(|| err(format!("{loc}.parity"), "expected 0 or 1"))?;
        labels.push((label.to_string(), p));
    }
    let space = SuperSpace::new(labels).map_err(|e| err("$.basis", e.to_string()))?;
    let n = space.dim();

    let symmetry = match top.get("symmetry") {
        None => Symmetry::SuperAnticommutative,
        Some(s) => match s.as_str() {
            Some("super-anticommutative") => Symmetry::SuperAnticommutative,
            Some("none") => Symmetry::None,
            _ => return Err(err("$.symmetry", "expected \"super-anticommutative\" or \"none\"")),
        },
    };

    let entries = get("brackets")?.as_array().ok_or_else(|| err("$.brackets", "expected an array"))?;
    let mut products: BTreeMap<(usize, usize), Vec<(usize, titsforge::Scalar)>> = BTreeMap::new();
    let mut seen = std::collections::HashSet::new();
    for (e, entry) in entries.iter().enumerate() {
        let loc = format!("$.brackets[{e}]");
        let a = entry.as_array().filter(|a| a.len() == 4).ok_or_else(|| err(&loc, "expected [i, j, k, \"scalar\"]"))?;
        let i = usize_at(&a[0], &format!("{loc}[0]"))?;
        let j = usize_at(&a[1], &format!("{loc}[1]"))?;
        let k = usize_at(&a[2], &format!("{loc}[2]"))?;
        for (x, slot) in [(i, 0), (j, 1), (k, 2)] {
            if x >= n {
                return Err(err(format!("{loc}[{slot}]"), format!("index {x} out of range for {n} basis vectors")));
            }
        }
        let s = a[3].as_str().ok_or_else(|| err(format!("{loc}[3]"), "expected a scalar string"))?;
        let c = f.parse(s).map_err(|e| err(format!("{loc}[3]"), e.to_string()))?;
        if symmetry == Symmetry::SuperAnticommutative && !(i < j || (i == j && space.parity(i).is_odd())) {
            return Err(err(&loc, "only i < j and odd diagonal entries are stored for a super-anticommutative table"));
        }
        if space.parity(k) != space.parity(i) + space.parity(j) {
            return Err(err(&loc, "product of these basis vectors has the wrong parity"));
        }
        if !seen.insert((i, j, k)) {
            return Err(err(&loc, "duplicate entry"));
        }
        if !f.is_zero(&c) {
            products.entry((i, j)).or_default().push((k, c));
        }
    }
    let mut table = AlgebraTable::new(f, space);
    for ((i, j), pairs) in products {
        let v = SparseVec::from_pairs(f, pairs);
        if symmetry == Symmetry::SuperAnticommutative && i != j {
            let back = if table.koszul(i, j) { v.clone() } else { v.neg(f) };
            table.set(j, i, back).map_err(|e| err("$.brackets", e.to_string()))?;
        }
        table.set(i, j, v).map_err(|e| err("$.brackets", e.to_string()))?;
    }

    if let Some(d) = top.get("dims") {
        let want = d.as_array().filter(|a| a.len() == 2).and_then(|a| Some((a[0].as_u64()?, a[1].as_u64()?)));
        let have = table.dims();
        if want != Some((have.0 as u64, have.1 as u64)) {
            return Err(err("$.dims", format!("does not match the basis, which has dims [{}, {}]", have.0, have.1)));
        }
    }

    let provenance = top.get("provenance").cloned().unwrap_or(Value::Null);
    let mut blocks = Vec::new();
    if let Some(b) = top.get("blocks") {
        let mut indexed = Vec::new();
        let obj = b.as_object().ok_or_else(|| err("$.blocks", "expected an object"))?;
        for (name, bv) in obj {
            let loc = format!("$.blocks.{name}");
            let start = usize_at(bv.get("start").unwrap_or(&Value::Null), &format!("{loc}.start"))?;
            let len = usize_at(bv.get("len").unwrap_or(&Value::Null), &format!("{loc}.len"))?;
            let dims = bv
                .get("dims")
                .and_then(Value::as_array)
                .filter(|a| a.len() == 2)
                .and_then(|a| Some((usize::try_from(a[0].as_u64()?).ok()?, usize::try_from(a[1].as_u64()?).ok()?)))
                .ok_or_else(|| err(format!("{loc}.dims"), "expected [even, odd]"))?;
            let index = match bv.get("index") {
                Some(i) => usize_at(i, &format!("{loc}.index"))?,
                None => usize::MAX,
            };
            indexed.push((index, Block { name: name.clone(), start, len, dims }));
        }
        indexed.sort_by_key(|(index, b)| (b.start, *index, b.len));
        blocks = indexed.into_iter().map(|(_, b)| b).collect();
        check_blocks(&table, &blocks).map_err(|e| err("$.blocks", e.to_string()))?;
    }
    let jacobi = top.get("jacobi").cloned();
    Ok(AlgebraFile { table, symmetry, provenance, blocks, jacobi })
}

#[cfg(test)]
mod tests {
    use super::*;
    use titsforge::composition::{composition_make, para_hurwitz, CompositionKind};
    use titsforge::construct::g_build;

    fn sample() -> AlgebraFile {
        let f = Field::Prime(3);
        let s = para_hurwitz(&composition_make(CompositionKind::B12, f).unwrap());
        let u = para_hurwitz(&composition_make(CompositionKind::Binarion, f).unwrap());
        AlgebraFile::from_algebra(&g_build(&u, &s).unwrap())
    }

    #[test]
    fn round_trip() {
        let a = sample();
        let text = a.emit();
        let b = AlgebraFile::parse(&text).unwrap();
        assert_eq!(a, b);
        assert_eq!(text, b.emit());
    }

    #[test]
    fn general_table_round_trip() {
        let f = Field::Rational;
        let mut t = AlgebraTable::new(f, SuperSpace::even(["a", "b"]).unwrap());
        t.set(0, 0, SparseVec::single(1, f.parse("3/2").unwrap())).unwrap();
        t.set(1, 0, SparseVec::single(0, f.parse("-7").unwrap())).unwrap();
        let a = AlgebraFile::from_table(t);
        assert_eq!(a.symmetry, Symmetry::None);
        assert_eq!(AlgebraFile::parse(&a.emit()).unwrap(), a);
    }

    #[test]
    fn errors_carry_locations() {
        let cases = [
            ("{", "line"),
            ("[]", "$"),
            (r#"{"field":{"char":4},"basis":[],"brackets":[]}"#, "$.field.char"),
            (r#"{"field":{"char":3},"basis":[{"label":"x","parity":2}],"brackets":[]}"#, "$.basis[0].parity"),
            (r#"{"field":{"char":3},"basis":[{"label":"x","parity":0}],"brackets":[[0,1,0,"1"]]}"#, "$.brackets[0][1]"),
            (r#"{"field":{"char":0},"basis":[{"label":"x","parity":0},{"label":"y","parity":0}],"brackets":[[0,1,0,"1/0"]]}"#, "$.brackets[0][3]"),
            (r#"{"field":{"char":0},"basis":[{"label":"x","parity":0},{"label":"y","parity":0}],"brackets":[[1,0,0,"1"]]}"#, "$.brackets[0]"),
            (r#"{"field":{"char":0},"basis":[{"label":"x","parity":0},{"label":"y","parity":1}],"brackets":[[0,1,0,"1"]]}"#, "$.brackets[0]"),
            (r#"{"field":{"char":0},"basis":[],"brackets":[],"extra":1}"#, "$.extra"),
        ];
        for (text, loc) in cases {
            match AlgebraFile::parse(text) {
                Err(Error::Parse { location, .. }) => assert!(location.starts_with(loc), "{text}: {location}"),
                other => panic!("{text}: {other:?}"),
            }
        }
    }
}
