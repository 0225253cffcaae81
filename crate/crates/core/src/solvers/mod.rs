//! Allocation solvers: exhaustive Max-NSW and leximin, constrained
//! Round-Robin, and an exchange-based NSW local search.

pub(crate) mod enumerate;
mod exhaustive;
mod local_search;
mod round_robin;

use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::instances::Instance;
use crate::rational::ExtRational;
use crate::setsystem::{Bundle, ItemId};

pub use exhaustive::{solve_leximin, solve_max_nsw};
pub use local_search::{local_search_nsw, swap_candidates};
pub use round_robin::{round_robin, ItemOrder, TieBreak};

/// `n` pairwise-disjoint bundles plus the items nobody received.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Allocation {
    pub bundles: Vec<Bundle>,
    pub unallocated: Bundle,
}

impl Allocation {
    pub fn new(bundles: Vec<Bundle>, unallocated: Bundle) -> Self {
        Allocation { bundles, unallocated }
    }

    /// Everything unallocated.
    pub fn empty(agents: usize, items: usize) -> Self {
        Allocation { bundles: vec![Bundle::empty(); agents], unallocated: Bundle::full(items) }
    }

    /// Bundles given explicitly; every other item is unallocated.
    pub fn from_bundles(bundles: Vec<Bundle>, items: usize) -> Self {
        let taken = bundles.iter().fold(Bundle::empty(), |acc, b| acc.union(*b));
        Allocation { bundles, unallocated: Bundle::full(items).difference(taken) }
    }

    /// Decodes an assignment vector: entry `g` is the agent receiving item
    /// `g`, or `agents` for "unallocated".
    pub fn from_assignment(agents: usize, assignment: &[u8]) -> Self {
        let mut bundles = vec![Bundle::empty(); agents];
        let mut unallocated = Bundle::empty();
        for (g, &a) in assignment.iter().enumerate() {
            let a = a as usize;
            if a < agents {
                bundles[a].insert(ItemId(g));
            } else {
                unallocated.insert(ItemId(g));
            }
        }
        Allocation { bundles, unallocated }
    }

    pub fn allocated(&self) -> Bundle {
        self.bundles.iter().fold(Bundle::empty(), |acc, b| acc.union(*b))
    }

    pub fn allocated_count(&self) -> usize {
        self.bundles.iter().map(|b| b.len()).sum()
    }

    pub fn is_complete(&self, items: usize) -> bool {
        self.allocated() == Bundle::full(items)
    }

    /// Checks arity, disjointness, universe membership, and independence of
    /// every bundle.
    pub fn validate(&self, instance: &Instance) -> Result<()> {
        if self.bundles.len() != instance.agents() {
            return Err(Error::Contract(format!(
                "allocation has {} bundles for {} agents",
                self.bundles.len(),
                instance.agents()
            )));
        }
        let system = instance.system();
        let mut seen = Bundle::empty();
        for (i, b) in self.bundles.iter().chain(std::iter::once(&self.unallocated)).enumerate() {
            system.check_in_universe(*b)?;
            if !seen.is_disjoint(*b) {
                return Err(Error::Contract(format!(
                    "items {} appear in more than one bundle",
                    instance.show(seen.intersection(*b))
                )));
            }
            seen = seen.union(*b);
            if i < self.bundles.len() && !system.is_independent(*b)? {
                return Err(Error::Contract(format!(
                    "bundle of agent {} {} is not independent",
                    i + 1,
                    instance.show(*b)
                )));
            }
        }
        Ok(())
    }
}

/// Limits for the exhaustive routines.
#[derive(Debug, Clone, Copy)]
pub struct SolveOptions {
    /// Largest admissible `(n + 1)^m`.
    pub budget: u64,
    pub exec: Exec,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions { budget: 10_000_000, exec: Exec::default() }
    }
}

/// Which level of the selection order singled out the returned allocation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stage {
    SupportMax,
    NswMax,
    SizeMax,
    Canonical,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SolveTrace {
    /// Agents with positive utility (0-based).
    pub positive_support: Vec<usize>,
    /// Feasible allocations enumerated.
    pub candidate_count: u64,
    pub stage_reached: Stage,
}

/// One bijection-guided exchange between two agents' bundles.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SwapCandidate {
    pub giver: usize,
    pub receiver: usize,
    /// Item the receiver hands back; `None` for a padding item.
    pub out_item: Option<ItemId>,
    /// Item the receiver obtains; `None` for a padding item.
    pub in_item: Option<ItemId>,
    pub rho: ExtRational,
}
