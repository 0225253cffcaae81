//! NSW local search over single-item and bundle exchanges.

use super::enumerate::{Nsw, Weights};
use super::{Allocation, SwapCandidate};
use crate::error::{Error, Result};
use crate::instances::Instance;
use crate::rational::{ExtRational, Rational};
use crate::setsystem::{exchange_bijection, pad_with_dummies, Bundle, ItemId};
use crate::valuations::AdditiveValuation;

type Key = (usize, Nsw, usize);

fn key(weights: &Weights, a: &Allocation) -> Key {
    let (support, nsw) = Nsw::over_support(&weights.utilities(&a.bundles));
    (support, nsw, a.allocated_count())
}

fn real(g: ItemId) -> Option<ItemId> {
    (!g.is_dummy()).then_some(g)
}

fn rho(vi: &AdditiveValuation, vj: &AdditiveValuation, out: ItemId, inn: ItemId) -> ExtRational {
    let di = vi.item(inn) - vi.item(out);
    let dj = vj.item(inn) - vj.item(out);
    if dj.is_zero() {
        if di.is_zero() {
            ExtRational::Finite(Rational::zero())
        } else {
            ExtRational::Infinite
        }
    } else {
        ExtRational::Finite(di / dj)
    }
}

/// Exchange candidates between `receiver` and `giver` along a bijection
/// between their bundles.
///
/// The smaller bundle is padded with zero-value items, a bijection `φ`
/// from the receiver's (padded) bundle onto the giver's is built, and each
/// pair `(g, φ(g))` yields the swap "receiver gives `g`, gets `φ(g)`" with
/// `ρ = (v_r(φ(g)) - v_r(g)) / (v_g(φ(g)) - v_g(g))`. A zero denominator
/// gives `∞` (or `0` when the numerator is zero too). Requires a spec that
/// is a matroid by construction.
pub fn swap_candidates(
    instance: &Instance,
    alloc: &Allocation,
    receiver: usize,
    giver: usize,
) -> Result<Vec<SwapCandidate>> {
    let vals = instance.profile().require_additive("swap candidates")?;
    if !instance.spec().is_matroid_by_construction() {
        return Err(Error::NotMatroid(format!(
            "{} constraint is not a matroid by construction",
            instance.spec().kind()
        )));
    }
    let n = instance.agents();
    if receiver >= n || giver >= n || receiver == giver {
        return Err(Error::Domain(format!("invalid agent pair ({receiver}, {giver})")));
    }
    alloc.validate(instance)?;
    let (ai, aj) = (alloc.bundles[receiver], alloc.bundles[giver]);
    let size = ai.len().max(aj.len());
    let phi = exchange_bijection(
        &instance.system().padded(),
        pad_with_dummies(ai, size),
        pad_with_dummies(aj, size),
    )?;
    Ok(phi
        .into_iter()
        .map(|(g, h)| SwapCandidate {
            giver,
            receiver,
            out_item: real(g),
            in_item: real(h),
            rho: rho(&vals[receiver], &vals[giver], g, h),
        })
        .collect())
}

fn apply_swap(a: &Allocation, c: &SwapCandidate) -> Allocation {
    let mut b = a.clone();
    if let Some(g) = c.out_item {
        b.bundles[c.receiver].remove(g);
        b.bundles[c.giver].insert(g);
    }
    if let Some(h) = c.in_item {
        b.bundles[c.giver].remove(h);
        b.bundles[c.receiver].insert(h);
    }
    b
}

struct Search<'a> {
    instance: &'a Instance,
    weights: &'a Weights,
    current: Key,
    best: Option<(Key, Allocation)>,
}

impl Search<'_> {
    fn independent(&self, b: Bundle) -> bool {
        self.instance.spec().contains(b)
    }

    fn offer(&mut self, cand: Allocation) {
        let k = key(self.weights, &cand);
        let bar = self.best.as_ref().map_or(&self.current, |(bk, _)| bk);
        if k > *bar {
            self.best = Some((k, cand));
        }
    }

    fn transfers(&mut self, a: &Allocation) {
        let n = a.bundles.len();
        for s in 0..=n {
            let src = if s < n { a.bundles[s] } else { a.unallocated };
            for g in src.iter() {
                for t in (0..n).filter(|&t| t != s) {
                    if !self.independent(a.bundles[t].with(g)) {
                        continue;
                    }
                    let mut b = a.clone();
                    if s < n {
                        b.bundles[s].remove(g);
                    } else {
                        b.unallocated.remove(g);
                    }
                    b.bundles[t].insert(g);
                    self.offer(b);
                }
            }
        }
    }

    fn swaps(&mut self, a: &Allocation) {
        let n = a.bundles.len();
        for x in 0..n {
            for y in x + 1..=n {
                let by = if y < n { a.bundles[y] } else { a.unallocated };
                for g in a.bundles[x].iter() {
                    for h in by.iter() {
                        let nx = a.bundles[x].without(g).with(h);
                        let ny = by.without(h).with(g);
                        if !self.independent(nx) || (y < n && !self.independent(ny)) {
                            continue;
                        }
                        let mut b = a.clone();
                        b.bundles[x] = nx;
                        if y < n {
                            b.bundles[y] = ny;
                        } else {
                            b.unallocated = ny;
                        }
                        self.offer(b);
                    }
                }
            }
        }
    }

    fn rho_swaps(&mut self, a: &Allocation) -> Result<()> {
        let n = a.bundles.len();
        let vals = self.instance.profile().require_additive("local search")?;
        for (i, vi) in vals.iter().enumerate() {
            for j in (0..n).filter(|&j| j != i) {
                if a.bundles[j].is_empty() {
                    continue;
                }
                let cands = swap_candidates(self.instance, a, i, j)?;
                let mut pick: Option<&SwapCandidate> = None;
                for c in &cands {
                    let gain = match (c.in_item, c.out_item) {
                        (Some(h), out) => {
                            let lost = out.map_or(Rational::zero(), |g| vi.item(g).clone());
                            *vi.item(h) > lost
                        }
                        (None, _) => false,
                    };
                    if gain && pick.is_none_or(|p| c.rho > p.rho) {
                        pick = Some(c);
                    }
                }
                if let Some(c) = pick {
                    self.offer(apply_swap(a, c));
                }
            }
        }
        Ok(())
    }

    fn support_growth(&mut self, a: &Allocation) {
        let n = a.bundles.len();
        let utils = self.weights.utilities(&a.bundles);
        for z in (0..n).filter(|&z| utils[z] == 0) {
            for o in (0..n).filter(|&o| o != z) {
                for g in a.bundles[o].iter().filter(|&g| self.weights.per_agent[z][g.0] > 0) {
                    if !self.independent(Bundle::empty().with(g)) {
                        continue;
                    }
                    let mut b = a.clone();
                    b.bundles[o].remove(g);
                    b.unallocated = b.unallocated.union(b.bundles[z]);
                    b.bundles[z] = Bundle::empty().with(g);
                    self.offer(b);
                }
                if utils[o] > 0 {
                    let mut b = a.clone();
                    b.bundles.swap(z, o);
                    self.offer(b);
                }
            }
        }
    }
}

/// Hill climbing on the Max-NSW order (positive support, then Nash product
/// over the support, then allocated count).
///
/// Each round evaluates item transfers (including from the unallocated
/// pool), pairwise item swaps (including with the pool), bijection-guided
/// swaps at maximal `ρ` when the constraint is a matroid by construction, and
/// support-growing moves for zero-utility agents. The strictly best move is
/// applied, ties going to the first one generated. Stops at a local optimum
/// or after `max_rounds` moves.
pub fn local_search_nsw(instance: &Instance, start: Allocation, max_rounds: usize) -> Result<Allocation> {
    instance.profile().require_additive("local search")?;
    start.validate(instance)?;
    let weights = Weights::new(instance.profile())?;
    let matroid = instance.spec().is_matroid_by_construction();
    let mut a = start;
    for _ in 0..max_rounds {
        let mut s = Search { instance, weights: &weights, current: key(&weights, &a), best: None };
        s.transfers(&a);
        s.swaps(&a);
        if matroid {
            s.rho_swaps(&a)?;
        }
        s.support_growth(&a);
        match s.best {
            Some((_, next)) => a = next,
            None => break,
        }
    }
    debug_assert!(a.validate(instance).is_ok());
    Ok(a)
}
