//! Additive and lexicographic valuation profiles.

use std::cmp::Ordering;

use crate::error::{Error, Result};
use crate::rational::Rational;
use crate::setsystem::{Bundle, ItemId};
use crate::solvers::Allocation;

/// Nonnegative per-item values; a bundle is worth the sum of its items.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AdditiveValuation {
    values: Vec<Rational>,
}

impl AdditiveValuation {
    pub fn new(values: Vec<Rational>) -> Result<Self> {
        if let Some((idx, v)) = values.iter().enumerate().find(|(_, v)| v.is_negative()) {
            return Err(Error::Domain(format!("item {idx} has negative value {v}")));
        }
        Ok(AdditiveValuation { values })
    }

    pub fn items(&self) -> usize {
        self.values.len()
    }

    pub fn values(&self) -> &[Rational] {
        &self.values
    }

    /// Value of a single item; padding items are worth nothing.
    pub fn item(&self, g: ItemId) -> &Rational {
        static ZERO: std::sync::OnceLock<Rational> = std::sync::OnceLock::new();
        if g.is_dummy() {
            return ZERO.get_or_init(Rational::zero);
        }
        &self.values[g.0]
    }
}

/// A strict ranking of all items, best first.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LexPreference {
    order: Vec<ItemId>,
    position: Vec<usize>,
}

impl LexPreference {
    pub fn new(order: Vec<ItemId>) -> Result<Self> {
        let m = order.len();
        let mut position = vec![usize::MAX; m];
        for (pos, g) in order.iter().enumerate() {
            if g.0 >= m || position[g.0] != usize::MAX {
                return Err(Error::Domain(format!(
                    "preference order is not a permutation of {m} items (at {g:?})"
                )));
            }
            position[g.0] = pos;
        }
        Ok(LexPreference { order, position })
    }

    pub fn order(&self) -> &[ItemId] {
        &self.order
    }

    /// Rank of `g`, 0 being the most preferred.
    pub fn rank(&self, g: ItemId) -> usize {
        self.position[g.0]
    }

    pub fn items(&self) -> usize {
        self.order.len()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ValuationProfile {
    Additive(Vec<AdditiveValuation>),
    Lexicographic(Vec<LexPreference>),
}

impl ValuationProfile {
    pub fn agents(&self) -> usize {
        match self {
            ValuationProfile::Additive(v) => v.len(),
            ValuationProfile::Lexicographic(p) => p.len(),
        }
    }

    pub fn mode(&self) -> &'static str {
        match self {
            ValuationProfile::Additive(_) => "additive",
            ValuationProfile::Lexicographic(_) => "lex",
        }
    }

    pub fn additive(&self) -> Option<&[AdditiveValuation]> {
        match self {
            ValuationProfile::Additive(v) => Some(v),
            ValuationProfile::Lexicographic(_) => None,
        }
    }

    pub fn lexicographic(&self) -> Option<&[LexPreference]> {
        match self {
            ValuationProfile::Lexicographic(p) => Some(p),
            ValuationProfile::Additive(_) => None,
        }
    }

    pub(crate) fn require_additive(&self, what: &str) -> Result<&[AdditiveValuation]> {
        self.additive().ok_or_else(|| Error::UnsupportedMode {
            mode: "lexicographic",
            what: what.to_string(),
        })
    }

    pub(crate) fn require_lexicographic(&self, what: &str) -> Result<&[LexPreference]> {
        self.lexicographic().ok_or_else(|| Error::UnsupportedMode {
            mode: "additive",
            what: what.to_string(),
        })
    }

    /// Items covered by every agent's valuation.
    pub fn items(&self) -> usize {
        match self {
            ValuationProfile::Additive(v) => v.first().map_or(0, AdditiveValuation::items),
            ValuationProfile::Lexicographic(p) => p.first().map_or(0, LexPreference::items),
        }
    }
}

/// `v(s)`, exact. Padding items count as zero.
pub fn value(v: &AdditiveValuation, s: Bundle) -> Result<Rational> {
    let real = s.real_part();
    if let Some(g) = real.iter().find(|g| g.0 >= v.items()) {
        return Err(Error::Domain(format!(
            "item {g:?} is outside a valuation over {} items",
            v.items()
        )));
    }
    Ok(real.iter().map(|g| &v.values[g.0]).sum())
}

/// Product of `v_i(A_i)` over the agents in `support` (all agents when
/// `None`).
pub fn nsw(profile: &ValuationProfile, alloc: &Allocation, support: Option<&[usize]>) -> Result<Rational> {
    let vals = profile.require_additive("Nash social welfare")?;
    if alloc.bundles.len() != vals.len() {
        return Err(Error::Domain(format!(
            "allocation has {} bundles for {} agents",
            alloc.bundles.len(),
            vals.len()
        )));
    }
    let all: Vec<usize> = (0..vals.len()).collect();
    let agents = support.unwrap_or(&all);
    let mut prod = Rational::one();
    for &i in agents {
        let v = vals
            .get(i)
            .ok_or_else(|| Error::Domain(format!("agent {i} does not exist")))?;
        prod = prod * value(v, alloc.bundles[i])?;
    }
    Ok(prod)
}

/// Lexicographic comparison: walking the ranking best first, the first
/// item held by exactly one bundle decides in that bundle's favour.
pub fn lex_compare(pref: &LexPreference, x: Bundle, y: Bundle) -> Ordering {
    for &g in &pref.order {
        match (x.contains(g), y.contains(g)) {
            (true, false) => return Ordering::Greater,
            (false, true) => return Ordering::Less,
            _ => {}
        }
    }
    Ordering::Equal
}

/// Structural flags of an additive profile.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProfileClass {
    pub identical: bool,
    /// Every value is 0 or 1.
    pub binary: bool,
    /// `Some(a)` when every value lies in `{1, a}` with `a > 1`.
    pub two_valued_a: Option<Rational>,
}

pub fn classify_profile(profile: &ValuationProfile) -> Result<ProfileClass> {
    let vals = profile.require_additive("profile classification")?;
    let identical = vals.windows(2).all(|w| w[0] == w[1]);
    let all = || vals.iter().flat_map(|v| v.values.iter());
    let one = Rational::one();
    let binary = all().all(|x| x.is_zero() || *x == one);
    let mut a: Option<&Rational> = None;
    let mut two_valued = !binary;
    for x in all() {
        if *x == one {
            continue;
        }
        if *x <= one {
            two_valued = false;
            break;
        }
        match a {
            None => a = Some(x),
            Some(prev) if prev == x => {}
            Some(_) => {
                two_valued = false;
                break;
            }
        }
    }
    let two_valued_a = if two_valued { a.cloned() } else { None };
    Ok(ProfileClass { identical, binary, two_valued_a })
}
