//! Exhaustive structure classification: heredity, augmentation, and the
//! (strong) extendibility index.

use std::collections::HashSet;
use std::fmt;

use super::{Bundle, ConstraintSpec, ItemId, SetSystem};
use crate::error::{Error, Result};
use crate::exec::{self, Exec};

/// Caps on exhaustive enumeration.
#[derive(Debug, Clone, Copy)]
pub struct ClassifyLimits {
    /// Largest universe enumerated for uniform/partition specs.
    pub max_structured_items: usize,
    /// Largest independent family enumerated for explicit specs.
    pub max_family_size: usize,
    pub exec: Exec,
}

impl Default for ClassifyLimits {
    fn default() -> Self {
        ClassifyLimits {
            max_structured_items: 16,
            max_family_size: 1 << 16,
            exec: Exec::default(),
        }
    }
}

/// Least `p` for which an extension property holds, or a note that no
/// `p ≤ bound` works.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Extendibility {
    Exactly(usize),
    Exceeds(usize),
}

impl Extendibility {
    pub fn value(self) -> Option<usize> {
        match self {
            Extendibility::Exactly(p) => Some(p),
            Extendibility::Exceeds(_) => None,
        }
    }
}

impl fmt::Display for Extendibility {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Extendibility::Exactly(p) => write!(f, "{p}"),
            Extendibility::Exceeds(b) => write!(f, "none <= {b}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Witness {
    /// `set` is independent but `set - item` is not.
    Heredity { set: Bundle, item: ItemId },
    /// No element of `larger ∖ smaller` extends `smaller`.
    Augmentation { smaller: Bundle, larger: Bundle },
    /// Adding `h` to `d` while keeping `c` forces removing `required`
    /// elements of `d ∖ c`.
    Extension { c: Bundle, d: Bundle, h: Bundle, required: usize },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassificationReport {
    pub is_hereditary: bool,
    pub is_matroid: bool,
    pub min_extendibility: Extendibility,
    pub min_strong_extendibility: Extendibility,
    pub violation_witness: Option<Witness>,
    /// Number of independent sets enumerated.
    pub family_size: usize,
}

struct Family {
    members: Vec<u128>,
    lookup: Lookup,
}

enum Lookup {
    Table(Vec<bool>),
    Hashed(HashSet<u128>),
}

impl Family {
    fn new(m: usize, mut members: Vec<u128>) -> Family {
        members.sort_unstable_by_key(|&s| (s.count_ones(), s));
        members.dedup();
        let lookup = if m <= 20 {
            let mut t = vec![false; 1 << m];
            for &s in &members {
                t[s as usize] = true;
            }
            Lookup::Table(t)
        } else {
            Lookup::Hashed(members.iter().copied().collect())
        };
        Family { members, lookup }
    }

    fn contains(&self, s: u128) -> bool {
        match &self.lookup {
            Lookup::Table(t) => (s as usize) < t.len() && t[s as usize],
            Lookup::Hashed(h) => h.contains(&s),
        }
    }
}

fn family_masks(spec: &ConstraintSpec, m: usize, limits: &ClassifyLimits) -> Result<Vec<u128>> {
    match spec {
        ConstraintSpec::Uniform { .. } | ConstraintSpec::Partition { .. } => {
            if m > limits.max_structured_items {
                return Err(Error::Resource(format!(
                    "exhaustive classification enumerates all 2^{m} subsets; the cap is {} items",
                    limits.max_structured_items
                )));
            }
            Ok((0..1u128 << m)
                .filter(|&s| spec.contains(Bundle::from_mask(s)))
                .collect())
        }
        ConstraintSpec::Truncation { base, rank } => {
            let mut fam = family_masks(base, m, limits)?;
            fam.retain(|s| s.count_ones() as usize <= *rank);
            Ok(fam)
        }
        ConstraintSpec::Explicit { generators } => {
            let mut out = Vec::new();
            for g in generators {
                let subsets = 1u128.checked_shl(g.len() as u32).unwrap_or(u128::MAX);
                if subsets > limits.max_family_size as u128 {
                    return Err(Error::Resource(format!(
                        "a generator with {} items spans 2^{} subsets; the family cap is {}",
                        g.len(),
                        g.len(),
                        limits.max_family_size
                    )));
                }
                let full = g.mask();
                let mut sub = full;
                loop {
                    out.push(sub);
                    if sub == 0 {
                        break;
                    }
                    sub = (sub - 1) & full;
                }
            }
            out.sort_unstable();
            out.dedup();
            if out.len() > limits.max_family_size {
                return Err(Error::Resource(format!(
                    "family has {} independent sets; the cap is {}",
                    out.len(),
                    limits.max_family_size
                )));
            }
            Ok(out)
        }
    }
}

fn popcount(s: u128) -> usize {
    s.count_ones() as usize
}

fn heredity_witness(fam: &Family) -> Option<Witness> {
    if !fam.contains(0) {
        return Some(Witness::Heredity { set: Bundle::empty(), item: ItemId(0) });
    }
    fam.members.iter().find_map(|&s| {
        Bundle::from_mask(s)
            .iter()
            .find(|x| !fam.contains(s & !(1u128 << x.0)))
            .map(|item| Witness::Heredity { set: Bundle::from_mask(s), item })
    })
}

/// First pair `(C, D)`, `|D| = |C| + 1`, violating augmentation.
fn augmentation_witness(fam: &Family, exec: Exec) -> Option<Witness> {
    let mut levels: Vec<Vec<u128>> = Vec::new();
    for &s in &fam.members {
        let k = popcount(s);
        if levels.len() <= k {
            levels.resize(k + 1, Vec::new());
        }
        levels[k].push(s);
    }
    let pairs: Vec<(u128, usize)> = fam
        .members
        .iter()
        .map(|&c| (c, popcount(c) + 1))
        .filter(|&(_, k)| k < levels.len())
        .collect();
    exec::find_first(exec, pairs, |(c, k)| {
        levels[k].iter().find_map(|&d| {
            let mut rest = d & !c;
            while rest != 0 {
                let bit = rest & rest.wrapping_neg();
                if fam.contains(c | bit) {
                    return None;
                }
                rest &= rest - 1;
            }
            Some(Witness::Augmentation {
                smaller: Bundle::from_mask(c),
                larger: Bundle::from_mask(d),
            })
        })
    })
}

#[derive(Clone, Copy)]
struct Worst {
    need: usize,
    ratio: usize,
    c: u128,
    d: u128,
    h: u128,
}

#[derive(Default, Clone, Copy)]
struct ExtensionStats {
    weak: Option<Worst>,
    strong: Option<Worst>,
}

impl ExtensionStats {
    fn absorb(&mut self, other: ExtensionStats) {
        if let Some(w) = other.weak {
            if self.weak.is_none_or(|cur| w.need > cur.need) {
                self.weak = Some(w);
            }
        }
        if let Some(w) = other.strong {
            if self.strong.is_none_or(|cur| w.ratio > cur.ratio) {
                self.strong = Some(w);
            }
        }
    }
}

/// For a fixed `C`, the largest removal forced by any `(D, H)` with
/// `C ⊂ D`, `C ∪ H` independent, `H ∩ C = ∅`.
fn extension_stats_for(fam: &Family, c: u128) -> ExtensionStats {
    let supersets: Vec<u128> = fam
        .members
        .iter()
        .copied()
        .filter(|&s| s != c && s & c == c)
        .collect();
    let mut stats = ExtensionStats::default();
    for &t in &supersets {
        let h = t & !c;
        let h_len = popcount(h);
        for &d in &supersets {
            let need = if fam.contains(d | h) {
                0
            } else {
                let free = d & !c;
                let mut best = 0;
                let mut r = free;
                loop {
                    let k = popcount(r);
                    if k > best && fam.contains(c | r | h) {
                        best = k;
                    }
                    if r == 0 {
                        break;
                    }
                    r = (r - 1) & free;
                }
                popcount(free) - best
            };
            let ratio = need.div_ceil(h_len);
            let w = Worst { need, ratio, c, d, h };
            let mut one = ExtensionStats { weak: None, strong: Some(w) };
            if h_len == 1 {
                one.weak = Some(w);
            }
            stats.absorb(one);
        }
    }
    stats
}

/// Classifies the structure of `system` by exhaustive enumeration.
///
/// The extendibility indices quantify over every nested pair `C ⊂ D` of
/// independent sets and every addition `x` (or set `H`) compatible with
/// `C`; each is reported as the least `p ≥ 1` that works, or
/// [`Extendibility::Exceeds`] when no `p ≤ p_bound` does.
pub fn classify(
    system: &SetSystem,
    p_bound: usize,
    limits: &ClassifyLimits,
) -> Result<ClassificationReport> {
    if p_bound == 0 {
        return Err(Error::Contract("p_bound must be positive".into()));
    }
    let m = system.items();
    let fam = Family::new(m, family_masks(system.spec(), m, limits)?);

    let heredity = heredity_witness(&fam);
    let augmentation = augmentation_witness(&fam, limits.exec);

    let per_c = exec::map_ordered(limits.exec, fam.members.clone(), |c| {
        extension_stats_for(&fam, c)
    });
    let mut stats = ExtensionStats::default();
    for s in per_c {
        stats.absorb(s);
    }
    let weak = stats.weak.map_or(0, |w| w.need).max(1);
    let strong = stats.strong.map_or(0, |w| w.ratio).max(1);
    let bounded = |p: usize| {
        if p <= p_bound {
            Extendibility::Exactly(p)
        } else {
            Extendibility::Exceeds(p_bound)
        }
    };

    let is_hereditary = heredity.is_none();
    let is_matroid = is_hereditary && augmentation.is_none();
    let violation_witness = if heredity.is_some() {
        heredity
    } else if !is_matroid || strong > p_bound {
        match stats.strong {
            Some(w) if w.ratio > 1 => Some(Witness::Extension {
                c: Bundle::from_mask(w.c),
                d: Bundle::from_mask(w.d),
                h: Bundle::from_mask(w.h),
                required: w.need,
            }),
            _ => augmentation,
        }
    } else {
        None
    };

    Ok(ClassificationReport {
        is_hereditary,
        is_matroid,
        min_extendibility: bounded(weak),
        min_strong_extendibility: bounded(strong),
        violation_witness,
        family_size: fam.members.len(),
    })
}
