//! Seeded random instances.

use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::Instance;
use crate::error::{Error, Result};
use crate::rational::Rational;
use crate::setsystem::{Bundle, Category, ConstraintSpec, ItemId, SetSystem};
use crate::valuations::{AdditiveValuation, LexPreference, ValuationProfile};

/// Largest universe for which explicit families are generated, so that
/// they remain classifiable.
pub const MAX_EXPLICIT_ITEMS: usize = 16;

/// Values are drawn from this many equal steps across the value range.
const VALUE_STEPS: i64 = 60;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpecKind {
    Uniform,
    Partition,
    TruncationOfPartition,
    /// Downward closure of 2 to 4 random generators.
    Explicit,
}

impl SpecKind {
    pub fn is_matroid(self) -> bool {
        !matches!(self, SpecKind::Explicit)
    }
}

impl fmt::Display for SpecKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SpecKind::Uniform => "uniform",
            SpecKind::Partition => "partition",
            SpecKind::TruncationOfPartition => "truncation",
            SpecKind::Explicit => "explicit",
        })
    }
}

impl FromStr for SpecKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "uniform" => SpecKind::Uniform,
            "partition" => SpecKind::Partition,
            "truncation" => SpecKind::TruncationOfPartition,
            "explicit" => SpecKind::Explicit,
            _ => {
                return Err(Error::Domain(format!(
                    "unknown constraint kind {s:?} (uniform, partition, truncation, explicit)"
                )))
            }
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ValuationClass {
    Additive,
    Identical,
    Binary,
    IdenticalBinary,
    /// Every value is 1 or `a`.
    TwoValued(Rational),
    Lexicographic,
}

impl fmt::Display for ValuationClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ValuationClass::Additive => f.write_str("additive"),
            ValuationClass::Identical => f.write_str("identical"),
            ValuationClass::Binary => f.write_str("binary"),
            ValuationClass::IdenticalBinary => f.write_str("identical_binary"),
            ValuationClass::TwoValued(a) => write!(f, "two_valued:{a}"),
            ValuationClass::Lexicographic => f.write_str("lexicographic"),
        }
    }
}

impl FromStr for ValuationClass {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "additive" => ValuationClass::Additive,
            "identical" => ValuationClass::Identical,
            "binary" => ValuationClass::Binary,
            "identical_binary" => ValuationClass::IdenticalBinary,
            "lexicographic" | "lex" => ValuationClass::Lexicographic,
            _ => match s.strip_prefix("two_valued:") {
                Some(a) => ValuationClass::TwoValued(
                    a.parse().map_err(|e| Error::Domain(format!("bad value {a:?}: {e}")))?,
                ),
                None => {
                    return Err(Error::Domain(format!(
                        "unknown valuation class {s:?} (additive, identical, binary, \
                         identical_binary, two_valued:A, lexicographic)"
                    )))
                }
            },
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GeneratorParams {
    pub seed: u64,
    pub n: usize,
    pub m: usize,
    pub spec_kind: SpecKind,
    pub valuation_class: ValuationClass,
    /// Inclusive bounds for additive values.
    pub value_range: (Rational, Rational),
}

impl GeneratorParams {
    pub fn new(seed: u64, n: usize, m: usize, spec_kind: SpecKind, valuation_class: ValuationClass) -> Self {
        GeneratorParams {
            seed,
            n,
            m,
            spec_kind,
            valuation_class,
            value_range: (Rational::zero(), Rational::from(10)),
        }
    }
}

/// 2 to 4 generators, each a uniformly sized random subset of at most
/// `m - 1` items.
pub fn random_explicit_family<R: Rng + ?Sized>(rng: &mut R, m: usize) -> Vec<Bundle> {
    let count = rng.gen_range(2..=4);
    let mut items: Vec<usize> = (0..m).collect();
    (0..count)
        .map(|_| {
            items.shuffle(rng);
            let size = if m <= 1 { 0 } else { rng.gen_range(1..m) };
            items[..size].iter().map(|&g| ItemId(g)).collect()
        })
        .collect()
}

/// Greedily adds items in random order while the set stays independent,
/// stopping at `size` items if given.
pub fn random_independent_set<R: Rng + ?Sized>(
    rng: &mut R,
    system: &SetSystem,
    size: Option<usize>,
) -> Bundle {
    let mut order: Vec<usize> = (0..system.items()).collect();
    order.shuffle(rng);
    let limit = size.unwrap_or(usize::MAX);
    let mut s = Bundle::empty();
    for g in order {
        if s.len() >= limit {
            break;
        }
        let next = s.with(ItemId(g));
        if system.spec().contains(next) {
            s = next;
        }
    }
    s
}

fn random_partition<R: Rng + ?Sized>(rng: &mut R, m: usize) -> Vec<Category> {
    let parts = rng.gen_range(1..=m.clamp(1, 3));
    let mut cats = vec![Bundle::empty(); parts];
    for g in 0..m {
        cats[rng.gen_range(0..parts)].insert(ItemId(g));
    }
    cats.into_iter()
        .filter(|c| !c.is_empty())
        .map(|items| Category { items, capacity: rng.gen_range(1..=items.len()) })
        .collect()
}

fn random_spec<R: Rng + ?Sized>(rng: &mut R, kind: SpecKind, m: usize) -> ConstraintSpec {
    match kind {
        SpecKind::Uniform => ConstraintSpec::Uniform { capacity: rng.gen_range(1..=m.max(1)) },
        SpecKind::Partition => ConstraintSpec::Partition { categories: random_partition(rng, m) },
        SpecKind::TruncationOfPartition => ConstraintSpec::Truncation {
            base: Box::new(ConstraintSpec::Partition { categories: random_partition(rng, m) }),
            rank: rng.gen_range(1..=m.max(1)),
        },
        SpecKind::Explicit => ConstraintSpec::Explicit { generators: random_explicit_family(rng, m) },
    }
}

fn random_row<R: Rng + ?Sized>(rng: &mut R, m: usize, class: &ValuationClass, range: &(Rational, Rational)) -> Vec<Rational> {
    let (lo, hi) = range;
    let width = hi - lo;
    (0..m)
        .map(|_| match class {
            ValuationClass::Binary | ValuationClass::IdenticalBinary => {
                Rational::from(rng.gen_range(0..=1i64))
            }
            ValuationClass::TwoValued(a) => {
                if rng.gen_bool(0.5) {
                    a.clone()
                } else {
                    Rational::one()
                }
            }
            _ => lo + &(&width * &Rational::new(rng.gen_range(0..=VALUE_STEPS), VALUE_STEPS)),
        })
        .collect()
}

/// Deterministic in `params`: the same parameters always give the same
/// instance.
pub fn gen_random(params: &GeneratorParams) -> Result<Instance> {
    let GeneratorParams { seed, n, m, spec_kind, ref valuation_class, ref value_range } = *params;
    if n == 0 {
        return Err(Error::Domain("need at least one agent".into()));
    }
    if spec_kind == SpecKind::Explicit && m > MAX_EXPLICIT_ITEMS {
        return Err(Error::Resource(format!(
            "explicit families are limited to {MAX_EXPLICIT_ITEMS} items, got {m}"
        )));
    }
    if value_range.0.is_negative() || value_range.0 > value_range.1 {
        return Err(Error::Domain(format!(
            "value range [{}, {}] must be nonnegative and ordered",
            value_range.0, value_range.1
        )));
    }
    if let ValuationClass::TwoValued(a) = valuation_class {
        if !a.is_positive() {
            return Err(Error::Domain(format!("two-valued class needs a > 0, got {a}")));
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let spec = random_spec(&mut rng, spec_kind, m);
    let profile = match valuation_class {
        ValuationClass::Lexicographic => {
            let mut prefs = Vec::with_capacity(n);
            for _ in 0..n {
                let mut order: Vec<ItemId> = (0..m).map(ItemId).collect();
                order.shuffle(&mut rng);
                prefs.push(LexPreference::new(order)?);
            }
            ValuationProfile::Lexicographic(prefs)
        }
        ValuationClass::Identical | ValuationClass::IdenticalBinary => {
            let v = AdditiveValuation::new(random_row(&mut rng, m, valuation_class, value_range))?;
            ValuationProfile::Additive(vec![v; n])
        }
        _ => {
            let mut vals = Vec::with_capacity(n);
            for _ in 0..n {
                vals.push(AdditiveValuation::new(random_row(&mut rng, m, valuation_class, value_range))?);
            }
            ValuationProfile::Additive(vals)
        }
    };
    Instance::new(
        Instance::default_labels(m),
        profile,
        spec,
        format!("random seed={seed} n={n} m={m} spec={spec_kind} vals={valuation_class}"),
    )
}
