//! The worst-case constructions used to show the ratio bounds are tight.

use num_traits::ToPrimitive;

use super::Instance;
use crate::error::{Error, Result};
use crate::rational::Rational;
use crate::setsystem::{Bundle, Category, ConstraintSpec, ItemId};
use crate::solvers::{ItemOrder, TieBreak};
use crate::valuations::{AdditiveValuation, ValuationProfile};

fn identical(agents: usize, values: Vec<Rational>) -> Result<ValuationProfile> {
    let v = AdditiveValuation::new(values)?;
    Ok(ValuationProfile::Additive(vec![v; agents]))
}

/// One-based item labels to a bundle.
fn items(ix: &[usize]) -> Bundle {
    ix.iter().map(|&i| ItemId(i - 1)).collect()
}

/// Two agents, `2k + 2` items, at most `k + 1` items per bundle. Agent 1
/// values the first `k + 1` items at `2k + 1 - δ` and the rest at `k`;
/// agent 2 values the first `k + 1` at `k` and the rest at 0.
pub fn gen_lemma4(k: usize, delta: &Rational) -> Result<Instance> {
    if k == 0 {
        return Err(Error::Domain("k must be at least 1".into()));
    }
    if !delta.is_positive() || *delta >= Rational::one() {
        return Err(Error::Domain(format!("delta must lie in (0, 1), got {delta}")));
    }
    let kk = Rational::from(k as i64);
    let high = Rational::from(2 * k as i64 + 1) - delta;
    let m = 2 * k + 2;
    let row1 = (0..m).map(|g| if g <= k { high.clone() } else { kk.clone() }).collect();
    let row2 = (0..m).map(|g| if g <= k { kk.clone() } else { Rational::zero() }).collect();
    Instance::new(
        Instance::default_labels(m),
        ValuationProfile::Additive(vec![AdditiveValuation::new(row1)?, AdditiveValuation::new(row2)?]),
        ConstraintSpec::Uniform { capacity: k + 1 },
        format!("lemma4 k={k} delta={delta}"),
    )
}

/// Eight unit-valued items, two identical agents, and the family generated
/// by `{g1,g2}`, `{g1,g3,g4,g7,g8}`, `{g2,g3,g4,g7,g8}`, `{g3,…,g8}`.
pub fn gen_lemma5() -> Result<Instance> {
    let generators = vec![
        items(&[1, 2]),
        items(&[1, 3, 4, 7, 8]),
        items(&[2, 3, 4, 7, 8]),
        items(&[3, 4, 5, 6, 7, 8]),
    ];
    Instance::new(
        Instance::default_labels(8),
        identical(2, vec![Rational::one(); 8])?,
        ConstraintSpec::Explicit { generators },
        "lemma5",
    )
}

/// Six unit-valued items, two identical agents, and the family generated
/// by `{g1,g2}`, `{g1,g3,g4}`, `{g2,g3,g4}`, `{g3,g4,g5,g6}`.
///
/// The construction declares eight items but no generator mentions `g7` or
/// `g8`, so they are left out.
pub fn gen_lemma6() -> Result<Instance> {
    let generators =
        vec![items(&[1, 2]), items(&[1, 3, 4]), items(&[2, 3, 4]), items(&[3, 4, 5, 6])];
    Instance::new(
        Instance::default_labels(6),
        identical(2, vec![Rational::one(); 6])?,
        ConstraintSpec::Explicit { generators },
        "lemma6 (g7,g8 unreferenced and omitted)",
    )
}

/// `m = 1 + 1/δ` items, two identical agents, family generated by `{g1}`
/// and `{g2,…,gm}`. `v(g1) = 1 + δ`, every other item is worth `4δ`.
pub fn gen_lemma7(delta: &Rational) -> Result<Instance> {
    let inv = delta.recip();
    if !delta.is_positive() || !inv.is_integer() {
        return Err(Error::Domain(format!("1/delta must be a positive integer, got delta = {delta}")));
    }
    let q = inv
        .numer()
        .to_usize()
        .filter(|&q| q < 64)
        .ok_or_else(|| Error::Resource(format!("1/delta = {inv} gives too many items")))?;
    let m = q + 1;
    let mut values = vec![delta * &Rational::from(4); m];
    values[0] = Rational::one() + delta;
    let generators = vec![items(&[1]), (1..m).map(ItemId).collect()];
    Instance::new(
        Instance::default_labels(m),
        identical(2, values)?,
        ConstraintSpec::Explicit { generators },
        format!("lemma7 delta={delta}"),
    )
}

/// `3η` unit-valued items, two identical agents, partition matroid with
/// `C1 = {g1,…,g2η}` of capacity `η` and a singleton category for each
/// remaining item. Returned with the tie-break under which Round-Robin
/// realises the worst case.
pub fn gen_lemma8(eta: usize) -> Result<(Instance, TieBreak)> {
    if eta < 2 {
        return Err(Error::Domain(format!("eta must be at least 2, got {eta}")));
    }
    let m = 3 * eta;
    if m > 64 {
        return Err(Error::Resource(format!("eta = {eta} gives more than 64 items")));
    }
    let mut categories = vec![Category { items: Bundle::full(2 * eta), capacity: eta }];
    categories.extend(
        (2 * eta..m).map(|g| Category { items: Bundle::empty().with(ItemId(g)), capacity: 1 }),
    );
    let inst = Instance::new(
        Instance::default_labels(m),
        identical(2, vec![Rational::one(); m])?,
        ConstraintSpec::Partition { categories },
        format!("lemma8 eta={eta}"),
    )?;
    Ok((inst, lemma8_tie_break(eta)))
}

/// Agent 1 prefers `g2η+1,…,g3η` and then `g1,…,g2η`; agent 2 breaks ties
/// by index.
pub fn lemma8_tie_break(eta: usize) -> TieBreak {
    let m = 3 * eta;
    let first = (2 * eta..m).chain(0..2 * eta).map(ItemId).collect();
    TieBreak::PerAgent(vec![ItemOrder::Permutation(first), ItemOrder::ByIndex])
}
