//! JSON interchange format for instances and allocations.
//!
//! Documents are written with sorted keys, values as exact `"p/q"`
//! strings and items referred to by label, so files are byte-stable.

use std::fs;
use std::path::Path;

use serde_json::{json, Map, Value};

use super::Instance;
use crate::error::{Error, Result};
use crate::rational::Rational;
use crate::setsystem::{Bundle, Category, ConstraintSpec};
use crate::solvers::Allocation;
use crate::valuations::{AdditiveValuation, LexPreference, ValuationProfile};

fn labels(instance: &Instance, b: Bundle) -> Value {
    Value::Array(b.iter().map(|g| Value::String(instance.label(g))).collect())
}

fn spec_to_json(instance: &Instance, spec: &ConstraintSpec) -> Value {
    match spec {
        ConstraintSpec::Uniform { capacity } => json!({"type": "uniform", "capacity": capacity}),
        ConstraintSpec::Partition { categories } => json!({
            "type": "partition",
            "categories": categories
                .iter()
                .map(|c| json!({"items": labels(instance, c.items), "capacity": c.capacity}))
                .collect::<Vec<_>>(),
        }),
        ConstraintSpec::Truncation { base, rank } => json!({
            "type": "truncation",
            "base": spec_to_json(instance, base),
            "rank": rank,
        }),
        ConstraintSpec::Explicit { generators } => json!({
            "type": "explicit",
            "generators": generators.iter().map(|g| labels(instance, *g)).collect::<Vec<_>>(),
        }),
    }
}

pub fn instance_to_json(instance: &Instance) -> Value {
    let mut doc = Map::new();
    doc.insert("items".into(), json!(instance.labels()));
    doc.insert("agents".into(), json!(instance.agents()));
    doc.insert("mode".into(), json!(instance.profile().mode()));
    doc.insert("constraint".into(), spec_to_json(instance, instance.spec()));
    doc.insert("metadata".into(), json!(instance.metadata));
    match instance.profile() {
        ValuationProfile::Additive(vals) => {
            let rows: Vec<Vec<String>> =
                vals.iter().map(|v| v.values().iter().map(Rational::to_string).collect()).collect();
            doc.insert("valuations".into(), json!(rows));
        }
        ValuationProfile::Lexicographic(prefs) => {
            let rows: Vec<Vec<String>> =
                prefs.iter().map(|p| p.order().iter().map(|&g| instance.label(g)).collect()).collect();
            doc.insert("orders".into(), json!(rows));
        }
    }
    Value::Object(doc)
}

pub fn alloc_to_json(instance: &Instance, alloc: &Allocation) -> Value {
    json!({
        "bundles": alloc.bundles.iter().map(|b| labels(instance, *b)).collect::<Vec<_>>(),
        "unallocated": labels(instance, alloc.unallocated),
    })
}

/// Field accessors that report the JSON path of whatever is wrong.
struct Cursor<'a> {
    value: &'a Value,
    path: String,
}

impl<'a> Cursor<'a> {
    fn root(value: &'a Value) -> Self {
        Cursor { value, path: "$".into() }
    }

    fn err(&self, msg: impl Into<String>) -> Error {
        Error::parse(self.path.clone(), msg)
    }

    fn field(&self, key: &str) -> Result<Cursor<'a>> {
        let obj = self.value.as_object().ok_or_else(|| self.err("expected an object"))?;
        let value = obj.get(key).ok_or_else(|| self.err(format!("missing field {key:?}")))?;
        Ok(Cursor { value, path: format!("{}.{key}", self.path) })
    }

    fn opt_field(&self, key: &str) -> Result<Option<Cursor<'a>>> {
        let obj = self.value.as_object().ok_or_else(|| self.err("expected an object"))?;
        Ok(obj.get(key).map(|value| Cursor { value, path: format!("{}.{key}", self.path) }))
    }

    fn items(&self) -> Result<Vec<Cursor<'a>>> {
        let arr = self.value.as_array().ok_or_else(|| self.err("expected an array"))?;
        Ok(arr
            .iter()
            .enumerate()
            .map(|(i, value)| Cursor { value, path: format!("{}[{i}]", self.path) })
            .collect())
    }

    fn str(&self) -> Result<&'a str> {
        self.value.as_str().ok_or_else(|| self.err("expected a string"))
    }

    fn usize(&self) -> Result<usize> {
        self.value
            .as_u64()
            .and_then(|x| usize::try_from(x).ok())
            .ok_or_else(|| self.err("expected a nonnegative integer"))
    }

    fn rational(&self) -> Result<Rational> {
        match self.value {
            Value::String(s) => s.parse().map_err(|e| self.err(format!("{e}"))),
            Value::Number(n) if n.is_i64() => Ok(Rational::from(n.as_i64().unwrap_or_default())),
            _ => Err(self.err("expected an exact rational such as \"3/2\"")),
        }
    }

    fn bundle(&self, instance_labels: &dyn Fn(&str) -> Option<usize>) -> Result<Bundle> {
        let mut b = Bundle::empty();
        for c in self.items()? {
            let l = c.str()?;
            let g = instance_labels(l).ok_or_else(|| c.err(format!("unknown item {l:?}")))?;
            let item = crate::setsystem::ItemId(g);
            if b.contains(item) {
                return Err(c.err(format!("item {l:?} listed twice")));
            }
            b.insert(item);
        }
        Ok(b)
    }
}

fn spec_from_json(c: &Cursor<'_>, lookup: &dyn Fn(&str) -> Option<usize>) -> Result<ConstraintSpec> {
    let kind = c.field("type")?;
    Ok(match kind.str()? {
        "uniform" => ConstraintSpec::Uniform { capacity: c.field("capacity")?.usize()? },
        "partition" => ConstraintSpec::Partition {
            categories: c
                .field("categories")?
                .items()?
                .iter()
                .map(|cat| {
                    Ok(Category {
                        items: cat.field("items")?.bundle(lookup)?,
                        capacity: cat.field("capacity")?.usize()?,
                    })
                })
                .collect::<Result<_>>()?,
        },
        "truncation" => ConstraintSpec::Truncation {
            base: Box::new(spec_from_json(&c.field("base")?, lookup)?),
            rank: c.field("rank")?.usize()?,
        },
        "explicit" => ConstraintSpec::Explicit {
            generators: c
                .field("generators")?
                .items()?
                .iter()
                .map(|g| g.bundle(lookup))
                .collect::<Result<_>>()?,
        },
        other => {
            return Err(kind.err(format!(
                "unknown constraint type {other:?} (uniform, partition, truncation, explicit)"
            )))
        }
    })
}

fn located(path: &str, e: Error) -> Error {
    match e {
        Error::Parse { .. } | Error::Io(_) => e,
        other => Error::parse(path, other.to_string()),
    }
}

pub fn instance_from_json(doc: &Value) -> Result<Instance> {
    let root = Cursor::root(doc);
    let item_labels: Vec<String> =
        root.field("items")?.items()?.iter().map(|c| c.str().map(str::to_owned)).collect::<Result<_>>()?;
    let lookup = |l: &str| item_labels.iter().position(|x| x == l);
    let agents_c = root.field("agents")?;
    let agents = agents_c.usize()?;
    let mode_c = root.field("mode")?;
    let profile = match mode_c.str()? {
        "additive" => {
            let rows_c = root.field("valuations")?;
            let rows = rows_c.items()?;
            if rows.len() != agents {
                return Err(rows_c.err(format!("{} rows for {agents} agents", rows.len())));
            }
            let mut vals = Vec::with_capacity(agents);
            for row in rows {
                let values: Vec<Rational> = row.items()?.iter().map(Cursor::rational).collect::<Result<_>>()?;
                if values.len() != item_labels.len() {
                    return Err(row.err(format!("{} values for {} items", values.len(), item_labels.len())));
                }
                vals.push(AdditiveValuation::new(values).map_err(|e| located(&row.path, e))?);
            }
            ValuationProfile::Additive(vals)
        }
        "lex" => {
            let rows_c = root.field("orders")?;
            let rows = rows_c.items()?;
            if rows.len() != agents {
                return Err(rows_c.err(format!("{} orders for {agents} agents", rows.len())));
            }
            let mut prefs = Vec::with_capacity(agents);
            for row in rows {
                let order = row
                    .items()?
                    .iter()
                    .map(|c| {
                        let l = c.str()?;
                        lookup(l)
                            .map(crate::setsystem::ItemId)
                            .ok_or_else(|| c.err(format!("unknown item {l:?}")))
                    })
                    .collect::<Result<Vec<_>>>()?;
                prefs.push(LexPreference::new(order).map_err(|e| located(&row.path, e))?);
            }
            ValuationProfile::Lexicographic(prefs)
        }
        other => return Err(mode_c.err(format!("unknown mode {other:?} (additive, lex)"))),
    };
    let spec_c = root.field("constraint")?;
    let spec = spec_from_json(&spec_c, &lookup)?;
    let metadata = match root.opt_field("metadata")? {
        Some(c) => c.str()?.to_owned(),
        None => String::new(),
    };
    Instance::new(item_labels.clone(), profile, spec, metadata).map_err(|e| located("$", e))
}

pub fn alloc_from_json(instance: &Instance, doc: &Value) -> Result<Allocation> {
    let root = Cursor::root(doc);
    let lookup = |l: &str| instance.item(l).map(|g| g.0);
    let bundles_c = root.field("bundles")?;
    let bundles: Vec<Bundle> =
        bundles_c.items()?.iter().map(|b| b.bundle(&lookup)).collect::<Result<_>>()?;
    if bundles.len() != instance.agents() {
        return Err(bundles_c.err(format!(
            "{} bundles for {} agents",
            bundles.len(),
            instance.agents()
        )));
    }
    let unallocated = match root.opt_field("unallocated")? {
        Some(c) => c.bundle(&lookup)?,
        None => Allocation::from_bundles(bundles.clone(), instance.items()).unallocated,
    };
    let alloc = Allocation { bundles, unallocated };
    let covered = alloc.allocated().union(alloc.unallocated);
    if covered != instance.system().universe() {
        return Err(Error::parse(
            "$",
            format!("items {} are neither allocated nor unallocated", instance.show(instance.system().universe().difference(covered))),
        ));
    }
    alloc.validate(instance).map_err(|e| located("$", e))?;
    Ok(alloc)
}

fn to_text(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("JSON values always serialize");
    s.push('\n');
    s
}

fn read_json(path: &Path) -> Result<Value> {
    let text = fs::read_to_string(path)?;
    serde_json::from_str(&text).map_err(|e| {
        Error::parse(format!("{}:{}:{}", path.display(), e.line(), e.column()), e.to_string())
    })
}

fn with_file(path: &Path, e: Error) -> Error {
    match e {
        Error::Parse { location, message } => Error::Parse { location: format!("{}: {location}", path.display()), message },
        other => other,
    }
}

pub fn load(path: impl AsRef<Path>) -> Result<Instance> {
    let path = path.as_ref();
    let doc = read_json(path)?;
    instance_from_json(&doc).map_err(|e| with_file(path, e))
}

pub fn save(instance: &Instance, path: impl AsRef<Path>) -> Result<()> {
    fs::write(path, to_text(&instance_to_json(instance)))?;
    Ok(())
}

pub fn load_alloc(instance: &Instance, path: impl AsRef<Path>) -> Result<Allocation> {
    let path = path.as_ref();
    let doc = read_json(path)?;
    alloc_from_json(instance, &doc).map_err(|e| with_file(path, e))
}

pub fn save_alloc(instance: &Instance, alloc: &Allocation, path: impl AsRef<Path>) -> Result<()> {
    fs::write(path, to_text(&alloc_to_json(instance, alloc)))?;
    Ok(())
}
