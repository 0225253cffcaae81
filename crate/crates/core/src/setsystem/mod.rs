//! Independence systems over a small item universe.
//!
//! Bundles are bitsets. Real items occupy indices `0..m` with `m ≤ 64`;
//! indices from [`DUMMY_BASE`] upward are reserved for the zero-value
//! padding items used by exchange arguments, and never leave this crate's
//! internal search routines.

mod classify;
mod exchange;

use std::fmt;

use crate::error::{Error, Result};

pub use classify::{classify, ClassificationReport, ClassifyLimits, Extendibility, Witness};
pub use exchange::exchange_bijection;

/// Largest supported universe.
pub const MAX_ITEMS: usize = 64;
/// First index used for padding items.
pub const DUMMY_BASE: usize = 64;

const REAL_MASK: u128 = (1u128 << DUMMY_BASE) - 1;

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ItemId(pub usize);

impl ItemId {
    pub fn index(self) -> usize {
        self.0
    }

    pub fn is_dummy(self) -> bool {
        self.0 >= DUMMY_BASE
    }

    pub fn dummy(k: usize) -> ItemId {
        ItemId(DUMMY_BASE + k)
    }
}

impl fmt::Debug for ItemId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_dummy() {
            write!(f, "d{}", self.0 - DUMMY_BASE)
        } else {
            write!(f, "#{}", self.0)
        }
    }
}

/// A set of items, stored as a bitset.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Default, PartialOrd, Ord)]
pub struct Bundle(u128);

impl Bundle {
    pub const fn empty() -> Self {
        Bundle(0)
    }

    pub const fn from_mask(mask: u128) -> Self {
        Bundle(mask)
    }

    /// All real items `0..m`.
    pub fn full(m: usize) -> Self {
        assert!(m <= MAX_ITEMS);
        if m == 0 {
            Bundle(0)
        } else {
            Bundle(REAL_MASK >> (MAX_ITEMS - m))
        }
    }

    pub fn from_indices(indices: &[usize]) -> Self {
        indices.iter().map(|&i| ItemId(i)).collect()
    }

    pub fn mask(self) -> u128 {
        self.0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn contains(self, item: ItemId) -> bool {
        item.0 < 128 && self.0 >> item.0 & 1 == 1
    }

    pub fn insert(&mut self, item: ItemId) {
        assert!(item.0 < 128, "item index {} out of range", item.0);
        self.0 |= 1 << item.0;
    }

    pub fn remove(&mut self, item: ItemId) {
        if item.0 < 128 {
            self.0 &= !(1 << item.0);
        }
    }

    #[must_use]
    pub fn with(mut self, item: ItemId) -> Self {
        self.insert(item);
        self
    }

    #[must_use]
    pub fn without(mut self, item: ItemId) -> Self {
        self.remove(item);
        self
    }

    pub fn union(self, other: Bundle) -> Bundle {
        Bundle(self.0 | other.0)
    }

    pub fn intersection(self, other: Bundle) -> Bundle {
        Bundle(self.0 & other.0)
    }

    pub fn difference(self, other: Bundle) -> Bundle {
        Bundle(self.0 & !other.0)
    }

    pub fn is_subset_of(self, other: Bundle) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn is_disjoint(self, other: Bundle) -> bool {
        self.0 & other.0 == 0
    }

    /// Real items only.
    pub fn real_part(self) -> Bundle {
        Bundle(self.0 & REAL_MASK)
    }

    pub fn has_dummies(self) -> bool {
        self.0 & !REAL_MASK != 0
    }

    /// Items in ascending index order.
    pub fn iter(self) -> BundleIter {
        BundleIter(self.0)
    }

    pub fn first(self) -> Option<ItemId> {
        self.iter().next()
    }
}

pub struct BundleIter(u128);

impl Iterator for BundleIter {
    type Item = ItemId;

    fn next(&mut self) -> Option<ItemId> {
        if self.0 == 0 {
            return None;
        }
        let i = self.0.trailing_zeros() as usize;
        self.0 &= self.0 - 1;
        Some(ItemId(i))
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let n = self.0.count_ones() as usize;
        (n, Some(n))
    }
}

impl ExactSizeIterator for BundleIter {}

impl IntoIterator for Bundle {
    type Item = ItemId;
    type IntoIter = BundleIter;

    fn into_iter(self) -> BundleIter {
        self.iter()
    }
}

impl FromIterator<ItemId> for Bundle {
    fn from_iter<I: IntoIterator<Item = ItemId>>(iter: I) -> Self {
        let mut b = Bundle::empty();
        for item in iter {
            b.insert(item);
        }
        b
    }
}

impl fmt::Debug for Bundle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

/// One category of a partition constraint.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Category {
    pub items: Bundle,
    pub capacity: usize,
}

/// Declarative description of an independence system.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ConstraintSpec {
    /// `|S| ≤ capacity`.
    Uniform { capacity: usize },
    /// `|S ∩ E_i| ≤ k_i` for every category.
    Partition { categories: Vec<Category> },
    /// The base family restricted to sets of size at most `rank`.
    Truncation { base: Box<ConstraintSpec>, rank: usize },
    /// Subsets of some generator (the union of the generators' power sets).
    Explicit { generators: Vec<Bundle> },
}

impl ConstraintSpec {
    /// Membership test on real items; the caller guarantees `s` lies in the
    /// universe.
    pub fn contains(&self, s: Bundle) -> bool {
        match self {
            ConstraintSpec::Uniform { capacity } => s.len() <= *capacity,
            ConstraintSpec::Partition { categories } => categories
                .iter()
                .all(|c| s.intersection(c.items).len() <= c.capacity),
            ConstraintSpec::Truncation { base, rank } => s.len() <= *rank && base.contains(s),
            ConstraintSpec::Explicit { generators } => {
                generators.iter().any(|g| s.is_subset_of(*g))
            }
        }
    }

    /// Uniform and partition constraints, and truncations of them, are
    /// matroids without needing a check.
    pub fn is_matroid_by_construction(&self) -> bool {
        match self {
            ConstraintSpec::Uniform { .. } | ConstraintSpec::Partition { .. } => true,
            ConstraintSpec::Truncation { base, .. } => base.is_matroid_by_construction(),
            ConstraintSpec::Explicit { .. } => false,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            ConstraintSpec::Uniform { .. } => "uniform",
            ConstraintSpec::Partition { .. } => "partition",
            ConstraintSpec::Truncation { .. } => "truncation",
            ConstraintSpec::Explicit { .. } => "explicit",
        }
    }

    fn validate(&self, m: usize) -> Result<()> {
        let universe = Bundle::full(m);
        match self {
            ConstraintSpec::Uniform { .. } => Ok(()),
            ConstraintSpec::Partition { categories } => {
                let mut seen = Bundle::empty();
                for (idx, c) in categories.iter().enumerate() {
                    if !c.items.is_subset_of(universe) {
                        return Err(Error::Domain(format!(
                            "partition category {idx} has items outside the universe"
                        )));
                    }
                    if !seen.is_disjoint(c.items) {
                        return Err(Error::Domain(format!(
                            "partition category {idx} overlaps an earlier category"
                        )));
                    }
                    seen = seen.union(c.items);
                }
                if seen != universe {
                    return Err(Error::Domain(format!(
                        "partition categories do not cover items {:?}",
                        universe.difference(seen)
                    )));
                }
                Ok(())
            }
            ConstraintSpec::Truncation { base, .. } => base.validate(m),
            ConstraintSpec::Explicit { generators } => {
                if generators.is_empty() {
                    return Err(Error::Domain(
                        "explicit family needs at least one generator".into(),
                    ));
                }
                for (idx, g) in generators.iter().enumerate() {
                    if !g.is_subset_of(universe) {
                        return Err(Error::Domain(format!(
                            "generator {idx} has items outside the universe"
                        )));
                    }
                }
                Ok(())
            }
        }
    }
}

/// Anything that can answer independence queries over a finite ground set.
pub trait IndependenceOracle {
    fn universe_size(&self) -> usize;

    /// Membership test; the caller guarantees `s` is inside the ground set
    /// (padding items are allowed where the oracle supports them).
    fn independent(&self, s: Bundle) -> bool;
}

/// A constraint spec bound to a universe of `m` items.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SetSystem {
    m: usize,
    spec: ConstraintSpec,
}

impl SetSystem {
    pub fn new(m: usize, spec: ConstraintSpec) -> Result<Self> {
        if m > MAX_ITEMS {
            return Err(Error::Resource(format!(
                "universe of {m} items exceeds the supported maximum of {MAX_ITEMS}"
            )));
        }
        spec.validate(m)?;
        Ok(SetSystem { m, spec })
    }

    pub fn items(&self) -> usize {
        self.m
    }

    pub fn spec(&self) -> &ConstraintSpec {
        &self.spec
    }

    pub fn universe(&self) -> Bundle {
        Bundle::full(self.m)
    }

    pub fn check_in_universe(&self, s: Bundle) -> Result<()> {
        if s.is_subset_of(self.universe()) {
            Ok(())
        } else {
            Err(Error::Domain(format!(
                "items {:?} are outside the universe of {} items",
                s.difference(self.universe()),
                self.m
            )))
        }
    }

    pub fn is_independent(&self, s: Bundle) -> Result<bool> {
        self.check_in_universe(s)?;
        Ok(self.spec.contains(s))
    }

    /// The same system with every padding item acting as a free element.
    pub fn padded(&self) -> Padded<'_> {
        Padded { inner: self }
    }
}

impl IndependenceOracle for SetSystem {
    fn universe_size(&self) -> usize {
        self.m
    }

    fn independent(&self, s: Bundle) -> bool {
        self.spec.contains(s.real_part())
    }
}

/// A system extended with zero-value padding items that never affect
/// independence. If the inner system is a matroid, so is the padded one.
#[derive(Clone, Copy, Debug)]
pub struct Padded<'a> {
    inner: &'a SetSystem,
}

impl IndependenceOracle for Padded<'_> {
    fn universe_size(&self) -> usize {
        self.inner.m
    }

    fn independent(&self, s: Bundle) -> bool {
        self.inner.spec.contains(s.real_part())
    }
}

/// Returns the smallest-index `x ∈ d ∖ c` with `c + x` independent, or
/// `None` when there is none (which proves the system is not a matroid).
pub fn augment(system: &SetSystem, c: Bundle, d: Bundle) -> Result<Option<ItemId>> {
    if !system.is_independent(c)? || !system.is_independent(d)? {
        return Err(Error::Contract("augment needs two independent sets".into()));
    }
    if d.len() <= c.len() {
        return Err(Error::Contract(format!(
            "augment needs |d| > |c|, got |c| = {}, |d| = {}",
            c.len(),
            d.len()
        )));
    }
    Ok(d.difference(c).iter().find(|&x| system.spec.contains(c.with(x))))
}

/// Extends `small` with fresh padding items until it has `target_size`
/// members.
///
/// # Panics
/// If `target_size < small.len()` or more than 64 padding items would be
/// needed.
pub fn pad_with_dummies(small: Bundle, target_size: usize) -> Bundle {
    assert!(
        target_size >= small.len(),
        "cannot pad a bundle of {} items down to {target_size}",
        small.len()
    );
    let mut out = small;
    let mut k = 0;
    while out.len() < target_size {
        assert!(k < 128 - DUMMY_BASE, "out of padding items");
        out.insert(ItemId::dummy(k));
        k += 1;
    }
    out
}
