//! Exhaustive Max-NSW and leximin solvers.

use std::cmp::Ordering;

use super::enumerate::{self, Ctx, Nsw, State, Visitor, Weights};
use super::{Allocation, SolveOptions, SolveTrace, Stage};
use crate::error::Result;
use crate::instances::Instance;

/// Selection key of the Max-NSW order, compared lexicographically.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
struct NswKey {
    support: usize,
    nsw: Nsw,
    allocated: usize,
}

/// Tie counters among leaves with a given support size.
#[derive(Debug, Clone, Default)]
struct Level {
    leaves: u64,
    best: Option<(Nsw, u64, usize, u64)>,
}

impl Level {
    fn record(&mut self, nsw: &Nsw, allocated: usize, leaves: u64) {
        self.leaves += leaves;
        match &mut self.best {
            None => self.best = Some((nsw.clone(), 1, allocated, 1)),
            Some((p, ties, size, size_ties)) => match nsw.cmp(p) {
                Ordering::Greater => self.best = Some((nsw.clone(), 1, allocated, 1)),
                Ordering::Equal => {
                    *ties += 1;
                    match allocated.cmp(size) {
                        Ordering::Greater => {
                            *size = allocated;
                            *size_ties = 1;
                        }
                        Ordering::Equal => *size_ties += 1,
                        Ordering::Less => {}
                    }
                }
                Ordering::Less => {}
            },
        }
    }

    fn merge(&mut self, other: Level) {
        self.leaves += other.leaves;
        let Some((p, ties, size, size_ties)) = other.best else { return };
        match &mut self.best {
            None => self.best = Some((p, ties, size, size_ties)),
            Some((sp, sties, ssize, ssize_ties)) => match p.cmp(sp) {
                Ordering::Greater => self.best = Some((p, ties, size, size_ties)),
                Ordering::Equal => {
                    *sties += ties;
                    match size.cmp(ssize) {
                        Ordering::Greater => {
                            *ssize = size;
                            *ssize_ties = size_ties;
                        }
                        Ordering::Equal => *ssize_ties += size_ties,
                        Ordering::Less => {}
                    }
                }
                Ordering::Less => {}
            },
        }
    }
}

struct MaxNsw {
    best: Option<(NswKey, Vec<u8>)>,
    levels: Vec<Level>,
    leaves: u64,
}

impl Visitor for MaxNsw {
    type Output = MaxNsw;

    fn leaf(&mut self, _ctx: &Ctx<'_>, st: &State) -> bool {
        self.leaves += 1;
        let top = self.best.as_ref().map_or(0, |(k, _)| k.support);
        let support = st.util.iter().filter(|&&u| u > 0).count();
        if support < top {
            self.levels[support].leaves += 1;
            return false;
        }
        let (support, nsw) = Nsw::over_support(&st.util);
        self.levels[support].record(&nsw, st.allocated, 1);
        let key = NswKey { support, nsw, allocated: st.allocated };
        if self.best.as_ref().is_none_or(|(k, _)| key > *k) {
            self.best = Some((key, st.assign.clone()));
        }
        false
    }

    fn finish(self) -> Self {
        self
    }
}

/// Exhaustive Max-NSW with the selection order: largest positive support,
/// then largest Nash product over that support, then most items
/// allocated, then the smallest assignment vector (item 0's recipient
/// first, "unallocated" ranked after every agent).
pub fn solve_max_nsw(instance: &Instance, opts: &SolveOptions) -> Result<(Allocation, SolveTrace)> {
    instance.profile().require_additive("Max-NSW")?;
    enumerate::check_budget(instance, opts.budget, "Max-NSW")?;
    let weights = Weights::new(instance.profile())?;
    let ctx = Ctx::new(instance, &weights);
    let n = instance.agents();
    let parts = enumerate::run(&ctx, opts.exec, || MaxNsw {
        best: None,
        levels: vec![Level::default(); n + 1],
        leaves: 0,
    });

    let mut best: Option<(NswKey, Vec<u8>)> = None;
    let mut levels = vec![Level::default(); n + 1];
    let mut leaves = 0;
    for part in parts {
        leaves += part.leaves;
        for (acc, l) in levels.iter_mut().zip(part.levels) {
            acc.merge(l);
        }
        if let Some((k, a)) = part.best {
            if best.as_ref().is_none_or(|(bk, _)| k > *bk) {
                best = Some((k, a));
            }
        }
    }
    // The empty allocation is always feasible, so some leaf exists.
    let (key, assign) = best.expect("at least one feasible allocation");
    let alloc = Allocation::from_assignment(n, &assign);
    let level = &levels[key.support];
    let (_, nsw_ties, _, size_ties) = level.best.clone().expect("winner recorded");
    let stage_reached = if level.leaves == 1 {
        Stage::SupportMax
    } else if nsw_ties == 1 {
        Stage::NswMax
    } else if size_ties == 1 {
        Stage::SizeMax
    } else {
        Stage::Canonical
    };
    let utils = weights.utilities(&alloc.bundles);
    let positive_support = (0..n).filter(|&i| utils[i] > 0).collect();
    Ok((alloc, SolveTrace { positive_support, candidate_count: leaves, stage_reached }))
}

struct Leximin {
    best: Option<(Vec<i128>, Vec<u8>)>,
}

impl Visitor for Leximin {
    type Output = Option<(Vec<i128>, Vec<u8>)>;

    fn leaf(&mut self, _ctx: &Ctx<'_>, st: &State) -> bool {
        let mut sorted = st.util.clone();
        sorted.sort_unstable();
        if self.best.as_ref().is_none_or(|(k, _)| sorted > *k) {
            self.best = Some((sorted, st.assign.clone()));
        }
        false
    }

    fn finish(self) -> Self::Output {
        self.best
    }
}

/// Exhaustive leximin: maximises the ascending-sorted utility vector, ties
/// broken by the smallest assignment vector.
pub fn solve_leximin(instance: &Instance, opts: &SolveOptions) -> Result<Allocation> {
    instance.profile().require_additive("leximin")?;
    enumerate::check_budget(instance, opts.budget, "leximin")?;
    let weights = Weights::new(instance.profile())?;
    let ctx = Ctx::new(instance, &weights);
    let mut best: Option<(Vec<i128>, Vec<u8>)> = None;
    for (k, a) in enumerate::run(&ctx, opts.exec, || Leximin { best: None }).into_iter().flatten() {
        if best.as_ref().is_none_or(|(bk, _)| k > *bk) {
            best = Some((k, a));
        }
    }
    let (_, assign) = best.expect("at least one feasible allocation");
    Ok(Allocation::from_assignment(instance.agents(), &assign))
}
