use std::collections::BTreeMap;

use super::{Bundle, IndependenceOracle, ItemId};
use crate::error::{Error, Result};

/// Builds a bijection `σ: i → j` such that `i - z + σ(z)` and
/// `j + z - σ(z)` are independent for every `z ∈ i`.
///
/// Computed as a perfect matching in the bipartite graph whose edges are
/// exactly the valid swaps. Left vertices are processed in index order and
/// each prefers its smallest free neighbour, so the output is canonical.
/// For matroids a perfect matching always exists; failure is reported as
/// [`Error::NotMatroid`].
pub fn exchange_bijection<O>(oracle: &O, i: Bundle, j: Bundle) -> Result<BTreeMap<ItemId, ItemId>>
where
    O: IndependenceOracle + ?Sized,
{
    if i.len() != j.len() {
        return Err(Error::Contract(format!(
            "exchange needs equal sizes, got {} and {}",
            i.len(),
            j.len()
        )));
    }
    if !oracle.independent(i) || !oracle.independent(j) {
        return Err(Error::Contract("exchange needs two independent sets".into()));
    }
    let left: Vec<ItemId> = i.iter().collect();
    let right: Vec<ItemId> = j.iter().collect();
    let adj: Vec<Vec<usize>> = left
        .iter()
        .map(|&z| {
            right
                .iter()
                .enumerate()
                .filter(|&(_, &y)| swap_ok(oracle, i, j, z, y))
                .map(|(k, _)| k)
                .collect()
        })
        .collect();

    let mut owner: Vec<Option<usize>> = vec![None; right.len()];
    for u in 0..left.len() {
        if let Some(&v) = adj[u].iter().find(|&&v| owner[v].is_none()) {
            owner[v] = Some(u);
            continue;
        }
        let mut seen = vec![false; right.len()];
        if !augment_path(u, &adj, &mut owner, &mut seen) {
            return Err(Error::NotMatroid(format!(
                "no valid exchange partner for item {:?}",
                left[u]
            )));
        }
    }

    let sigma: BTreeMap<ItemId, ItemId> = owner
        .iter()
        .enumerate()
        .map(|(v, u)| (left[u.expect("perfect matching")], right[v]))
        .collect();
    debug_assert!(sigma.iter().all(|(&z, &y)| swap_ok(oracle, i, j, z, y)));
    Ok(sigma)
}

fn swap_ok<O: IndependenceOracle + ?Sized>(oracle: &O, i: Bundle, j: Bundle, z: ItemId, y: ItemId) -> bool {
    oracle.independent(i.without(z).with(y)) && oracle.independent(j.with(z).without(y))
}

fn augment_path(u: usize, adj: &[Vec<usize>], owner: &mut [Option<usize>], seen: &mut [bool]) -> bool {
    for &v in &adj[u] {
        if seen[v] {
            continue;
        }
        seen[v] = true;
        let free = match owner[v] {
            None => true,
            Some(w) => augment_path(w, adj, owner, seen),
        };
        if free {
            owner[v] = Some(u);
            return true;
        }
    }
    false
}
