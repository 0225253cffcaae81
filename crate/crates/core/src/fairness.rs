//! Envy and efficiency audits.

use std::cmp::Ordering;

use crate::error::Result;
use crate::instances::Instance;
use crate::rational::{ExtRational, Rational};
use crate::solvers::enumerate::{self, Ctx, State, Visitor, Weights};
use crate::solvers::{Allocation, SolveOptions};
use crate::valuations::{lex_compare, nsw, value, ValuationProfile};

/// Largest `α` for which an allocation is `α`-EF1, with the pair attaining it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Ef1Ratio {
    pub alpha: ExtRational,
    /// `(i, j)` minimising `α`; `None` when every pair is vacuous.
    pub worst_pair: Option<(usize, usize)>,
}

/// Exact EF1 ratio: the minimum over ordered pairs `i != j` of
/// `v_i(A_i) / (v_i(A_j) - max_{g in A_j} v_i(g))`.
///
/// A pair with `A_j` empty or a zero denominator is vacuous and contributes
/// `∞`. The result is not capped at 1.
pub fn ef1_alpha(instance: &Instance, alloc: &Allocation) -> Result<Ef1Ratio> {
    let vals = instance.profile().require_additive("EF1 ratio")?;
    alloc.validate(instance)?;
    let n = vals.len();
    let mut best = Ef1Ratio { alpha: ExtRational::Infinite, worst_pair: None };
    for (i, vi) in vals.iter().enumerate() {
        let own = value(vi, alloc.bundles[i])?;
        for j in (0..n).filter(|&j| j != i) {
            let other = alloc.bundles[j];
            let Some(top) = other.iter().map(|g| vi.item(g)).max() else {
                continue;
            };
            let rest = value(vi, other)? - top;
            if rest.is_zero() {
                continue;
            }
            let a = ExtRational::Finite(&own / &rest);
            if a < best.alpha {
                best = Ef1Ratio { alpha: a, worst_pair: Some((i, j)) };
            }
        }
    }
    Ok(best)
}

/// Envy-freeness: every agent weakly prefers its own bundle to every other.
pub fn is_ef(instance: &Instance, alloc: &Allocation) -> Result<bool> {
    alloc.validate(instance)?;
    let bundles = &alloc.bundles;
    let n = bundles.len();
    let pairs = || (0..n).flat_map(move |i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)));
    Ok(match instance.profile() {
        ValuationProfile::Additive(vals) => {
            for (i, j) in pairs() {
                if value(&vals[i], bundles[i])? < value(&vals[i], bundles[j])? {
                    return Ok(false);
                }
            }
            true
        }
        ValuationProfile::Lexicographic(prefs) => {
            pairs().all(|(i, j)| lex_compare(&prefs[i], bundles[i], bundles[j]) != Ordering::Less)
        }
    })
}

/// EF1 under lexicographic preferences: for every pair, `A_j` is empty or
/// dropping some item from it leaves a bundle `i` does not prefer to `A_i`.
pub fn is_ef1_lex(instance: &Instance, alloc: &Allocation) -> Result<bool> {
    let prefs = instance.profile().require_lexicographic("lexicographic EF1")?;
    alloc.validate(instance)?;
    let b = &alloc.bundles;
    let n = b.len();
    Ok((0..n).all(|i| {
        (0..n).filter(|&j| j != i).all(|j| {
            b[j].is_empty()
                || b[j]
                    .iter()
                    .any(|g| lex_compare(&prefs[i], b[i], b[j].without(g)) != Ordering::Less)
        })
    }))
}

struct Dominator {
    target: Vec<i128>,
    found: Option<Vec<u8>>,
}

impl Visitor for Dominator {
    type Output = Option<Vec<u8>>;

    fn prune(&self, ctx: &Ctx<'_>, st: &State) -> bool {
        (0..ctx.n).any(|i| st.util[i] + ctx.suffix[i][st.depth] < self.target[i])
    }

    fn leaf(&mut self, _ctx: &Ctx<'_>, st: &State) -> bool {
        let weakly = st.util.iter().zip(&self.target).all(|(u, t)| u >= t);
        if weakly && st.util != self.target {
            self.found = Some(st.assign.clone());
            return true;
        }
        false
    }

    fn finish(self) -> Option<Vec<u8>> {
        self.found
    }
}

/// Exhaustive Pareto-optimality check. Returns `(true, None)` or
/// `(false, Some(d))` where `d` is the first dominating allocation in
/// assignment-vector order.
pub fn is_pareto_optimal(
    instance: &Instance,
    alloc: &Allocation,
    opts: &SolveOptions,
) -> Result<(bool, Option<Allocation>)> {
    alloc.validate(instance)?;
    enumerate::check_budget(instance, opts.budget, "Pareto audit")?;
    let weights = Weights::new(instance.profile())?;
    let target = weights.utilities(&alloc.bundles);
    let ctx = Ctx::new(instance, &weights);
    let found =
        enumerate::run_find(&ctx, opts.exec, || Dominator { target: target.clone(), found: None });
    Ok(match found {
        Some(assign) => (false, Some(Allocation::from_assignment(instance.agents(), &assign))),
        None => (true, None),
    })
}

/// Everything the auditors can say about one allocation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AuditReport {
    /// `None` for lexicographic profiles.
    pub alpha_ef1: Option<ExtRational>,
    pub is_ef: bool,
    pub is_ef1: bool,
    pub is_po: bool,
    pub po_dominator: Option<Allocation>,
    pub worst_pair: Option<(usize, usize)>,
    /// Product of all agents' values; `None` for lexicographic profiles.
    pub nsw_value: Option<Rational>,
    pub complete: bool,
}

/// Runs every audit. The Pareto check is exhaustive and subject to
/// `opts.budget`.
pub fn audit(instance: &Instance, alloc: &Allocation, opts: &SolveOptions) -> Result<AuditReport> {
    alloc.validate(instance)?;
    let (alpha_ef1, worst_pair, is_ef1, nsw_value) = match instance.profile() {
        ValuationProfile::Additive(_) => {
            let r = ef1_alpha(instance, alloc)?;
            let ok = r.alpha >= Rational::one();
            (Some(r.alpha), r.worst_pair, ok, Some(nsw(instance.profile(), alloc, None)?))
        }
        ValuationProfile::Lexicographic(_) => (None, None, is_ef1_lex(instance, alloc)?, None),
    };
    let (is_po, po_dominator) = is_pareto_optimal(instance, alloc, opts)?;
    Ok(AuditReport {
        alpha_ef1,
        is_ef: is_ef(instance, alloc)?,
        is_ef1,
        is_po,
        po_dominator,
        worst_pair,
        nsw_value,
        complete: alloc.is_complete(instance.items()),
    })
}
