use std::cmp::Ordering;

use super::Allocation;
use crate::error::{Error, Result};
use crate::instances::Instance;
use crate::setsystem::{Bundle, ItemId};
use crate::valuations::ValuationProfile;

/// How one agent breaks ties between equally valued items.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ItemOrder {
    ByIndex,
    /// Earlier items win ties. Must list every item exactly once.
    Permutation(Vec<ItemId>),
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub enum TieBreak {
    #[default]
    ByIndex,
    PerAgent(Vec<ItemOrder>),
}

fn tie_ranks(instance: &Instance, tie_break: &TieBreak) -> Result<Vec<Vec<usize>>> {
    let (n, m) = (instance.agents(), instance.items());
    let by_index: Vec<usize> = (0..m).collect();
    let orders: Vec<&ItemOrder> = match tie_break {
        TieBreak::ByIndex => vec![&ItemOrder::ByIndex; n],
        TieBreak::PerAgent(v) => {
            if v.len() != n {
                return Err(Error::Domain(format!(
                    "tie-break lists {} agents, instance has {n}",
                    v.len()
                )));
            }
            v.iter().collect()
        }
    };
    orders
        .into_iter()
        .enumerate()
        .map(|(i, o)| match o {
            ItemOrder::ByIndex => Ok(by_index.clone()),
            ItemOrder::Permutation(p) => {
                let mut rank = vec![usize::MAX; m];
                for (pos, g) in p.iter().enumerate() {
                    if g.0 >= m || rank[g.0] != usize::MAX {
                        return Err(Error::Domain(format!(
                            "tie-break for agent {} is not a permutation of the items",
                            i + 1
                        )));
                    }
                    rank[g.0] = pos;
                }
                if p.len() != m {
                    return Err(Error::Domain(format!(
                        "tie-break for agent {} lists {} of {m} items",
                        i + 1,
                        p.len()
                    )));
                }
                Ok(rank)
            }
        })
        .collect()
}

/// Round-Robin under a shared independence constraint.
///
/// Agents move in index order. On its turn an agent takes its most valued
/// remaining item that keeps its bundle independent (additive: highest
/// value, ties by the agent's tie-break order; lexicographic: best rank).
/// An agent with no such item leaves the rotation. Rounds continue until no
/// agent remains or no item is left.
pub fn round_robin(instance: &Instance, tie_break: &TieBreak) -> Result<Allocation> {
    let (n, m) = (instance.agents(), instance.items());
    let ranks = tie_ranks(instance, tie_break)?;
    let system = instance.system();
    let mut bundles = vec![Bundle::empty(); n];
    let mut remaining = Bundle::full(m);
    let mut active = vec![true; n];

    while !remaining.is_empty() && active.iter().any(|&a| a) {
        for i in 0..n {
            if !active[i] || remaining.is_empty() {
                continue;
            }
            let feasible = remaining
                .iter()
                .filter(|&g| system.spec().contains(bundles[i].with(g)));
            let pick = match instance.profile() {
                ValuationProfile::Additive(vals) => {
                    let v = &vals[i];
                    feasible.max_by(|&a, &b| {
                        v.item(a)
                            .cmp(v.item(b))
                            .then_with(|| ranks[i][b.0].cmp(&ranks[i][a.0]))
                    })
                }
                ValuationProfile::Lexicographic(prefs) => {
                    let p = &prefs[i];
                    feasible.min_by(|&a, &b| p.rank(a).cmp(&p.rank(b)).then(Ordering::Equal))
                }
            };
            match pick {
                Some(g) => {
                    bundles[i].insert(g);
                    remaining.remove(g);
                }
                None => active[i] = false,
            }
        }
    }
    Ok(Allocation { bundles, unallocated: remaining })
}
