//! Pruned mixed-radix enumeration of feasible allocations.
//!
//! Items are assigned in index order; each goes to agent `0..n` or to the
//! "unallocated" slot `n`, so leaves are visited in increasing
//! assignment-vector order. A prefix whose bundle became dependent is cut,
//! which is sound because independence is hereditary. For parallel runs the
//! tree is split into ordered prefix chunks whose results are merged left to
//! right, making every result independent of the thread count.

use std::cmp::Ordering;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive};

use crate::error::{Error, Result};
use crate::exec::{self, Exec};
use crate::instances::Instance;
use crate::setsystem::{Bundle, ItemId, SetSystem};
use crate::valuations::ValuationProfile;

const MAX_SCALED_TOTAL: i128 = 1 << 62;
const TARGET_CHUNKS: u64 = 512;

/// Per-agent integer item weights.
///
/// Additive profiles are scaled by the common denominator of every value,
/// so comparisons of utilities (within or across agents) and of products
/// over equally sized supports are exact integer comparisons. Lexicographic
/// profiles use weight `2^(m-1-rank)`, whose bundle sums order bundles
/// exactly as the lexicographic preference does.
#[derive(Debug, Clone)]
pub(crate) struct Weights {
    pub per_agent: Vec<Vec<i128>>,
}

impl Weights {
    pub fn new(profile: &ValuationProfile) -> Result<Weights> {
        match profile {
            ValuationProfile::Additive(vals) => {
                let mut scale = BigInt::one();
                for v in vals {
                    for x in v.values() {
                        scale = scale.lcm(x.denom());
                    }
                }
                let mut per_agent = Vec::with_capacity(vals.len());
                for v in vals {
                    let mut row = Vec::with_capacity(v.items());
                    let mut total: i128 = 0;
                    for x in v.values() {
                        let w = (x.numer() * (&scale / x.denom()))
                            .to_i128()
                            .filter(|w| *w < MAX_SCALED_TOTAL);
                        let w = w.ok_or_else(too_large)?;
                        total += w;
                        if total >= MAX_SCALED_TOTAL {
                            return Err(too_large());
                        }
                        row.push(w);
                    }
                    per_agent.push(row);
                }
                Ok(Weights { per_agent })
            }
            ValuationProfile::Lexicographic(prefs) => Ok(Weights {
                per_agent: prefs
                    .iter()
                    .map(|p| {
                        let m = p.items();
                        (0..m).map(|g| 1i128 << (m - 1 - p.rank(ItemId(g)))).collect()
                    })
                    .collect(),
            }),
        }
    }

    pub fn utility(&self, agent: usize, b: Bundle) -> i128 {
        b.real_part().iter().map(|g| self.per_agent[agent][g.0]).sum()
    }

    pub fn utilities(&self, bundles: &[Bundle]) -> Vec<i128> {
        bundles.iter().enumerate().map(|(i, b)| self.utility(i, *b)).collect()
    }
}

fn too_large() -> Error {
    Error::Resource(
        "valuations are too large for exact enumeration after scaling to a common denominator"
            .into(),
    )
}

/// A nonnegative integer product. `Big` is only used past `i128::MAX`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) enum Nsw {
    Small(i128),
    Big(BigInt),
}

impl Nsw {
    /// Product of the positive entries of `utils`, with the number of them.
    pub fn over_support(utils: &[i128]) -> (usize, Nsw) {
        let mut support = 0;
        let mut acc = Nsw::Small(1);
        for &u in utils.iter().filter(|&&u| u > 0) {
            support += 1;
            acc = match acc {
                Nsw::Small(p) => match p.checked_mul(u) {
                    Some(q) => Nsw::Small(q),
                    None => Nsw::Big(BigInt::from(p) * u),
                },
                Nsw::Big(p) => Nsw::Big(p * u),
            };
        }
        (support, acc)
    }
}

impl PartialOrd for Nsw {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Nsw {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Nsw::Small(a), Nsw::Small(b)) => a.cmp(b),
            (Nsw::Small(_), Nsw::Big(_)) => Ordering::Less,
            (Nsw::Big(_), Nsw::Small(_)) => Ordering::Greater,
            (Nsw::Big(a), Nsw::Big(b)) => a.cmp(b),
        }
    }
}

/// Rejects instances whose search space `(n + 1)^m` exceeds `budget`.
pub(crate) fn check_budget(instance: &Instance, budget: u64, what: &str) -> Result<()> {
    let radix = instance.agents() as u128 + 1;
    let size = radix.checked_pow(instance.items() as u32);
    match size {
        Some(s) if s <= budget as u128 => Ok(()),
        _ => Err(Error::Resource(format!(
            "{what} would enumerate {}^{} assignments, over the budget of {budget}; \
             use local search for larger instances",
            radix,
            instance.items()
        ))),
    }
}

pub(crate) struct Ctx<'a> {
    pub system: &'a SetSystem,
    pub n: usize,
    pub m: usize,
    pub weights: &'a Weights,
    /// `suffix[i][k]`: total weight agent `i` could still gain from items `k..m`.
    pub suffix: Vec<Vec<i128>>,
}

impl<'a> Ctx<'a> {
    pub fn new(instance: &'a Instance, weights: &'a Weights) -> Ctx<'a> {
        let m = instance.items();
        let suffix = weights
            .per_agent
            .iter()
            .map(|row| {
                let mut s = vec![0i128; m + 1];
                for k in (0..m).rev() {
                    s[k] = s[k + 1] + row[k];
                }
                s
            })
            .collect();
        Ctx { system: instance.system(), n: instance.agents(), m, weights, suffix }
    }
}

pub(crate) struct State {
    pub assign: Vec<u8>,
    pub bundles: Vec<Bundle>,
    pub util: Vec<i128>,
    pub allocated: usize,
    pub depth: usize,
}

impl State {
    fn new(n: usize, m: usize) -> State {
        State {
            assign: vec![0; m],
            bundles: vec![Bundle::empty(); n],
            util: vec![0; n],
            allocated: 0,
            depth: 0,
        }
    }

    /// Tries to assign the next item to `choice`; returns false when the
    /// receiving bundle would become dependent.
    fn push(&mut self, ctx: &Ctx<'_>, choice: usize) -> bool {
        let g = self.depth;
        if choice < ctx.n {
            let next = self.bundles[choice].with(ItemId(g));
            if !ctx.system.spec().contains(next) {
                return false;
            }
            self.bundles[choice] = next;
            self.util[choice] += ctx.weights.per_agent[choice][g];
            self.allocated += 1;
        }
        self.assign[g] = choice as u8;
        self.depth += 1;
        true
    }

    fn pop(&mut self, ctx: &Ctx<'_>) {
        self.depth -= 1;
        let g = self.depth;
        let choice = self.assign[g] as usize;
        if choice < ctx.n {
            self.bundles[choice].remove(ItemId(g));
            self.util[choice] -= ctx.weights.per_agent[choice][g];
            self.allocated -= 1;
        }
    }
}

pub(crate) trait Visitor {
    type Output: Send;

    /// Whether the subtree below the current partial assignment can be
    /// skipped.
    fn prune(&self, _ctx: &Ctx<'_>, _state: &State) -> bool {
        false
    }

    /// Called on every complete feasible assignment; returning true stops
    /// the search of this chunk.
    fn leaf(&mut self, ctx: &Ctx<'_>, state: &State) -> bool;

    fn finish(self) -> Self::Output;
}

fn dfs<V: Visitor>(ctx: &Ctx<'_>, st: &mut State, v: &mut V) -> bool {
    if st.depth == ctx.m {
        return v.leaf(ctx, st);
    }
    for choice in 0..=ctx.n {
        if !st.push(ctx, choice) {
            continue;
        }
        let stop = !v.prune(ctx, st) && dfs(ctx, st, v);
        st.pop(ctx);
        if stop {
            return true;
        }
    }
    false
}

/// Feasible prefixes of the first `depth` items, in enumeration order.
fn prefixes(ctx: &Ctx<'_>, depth: usize) -> Vec<Vec<u8>> {
    fn rec(ctx: &Ctx<'_>, st: &mut State, depth: usize, out: &mut Vec<Vec<u8>>) {
        if st.depth == depth {
            out.push(st.assign[..depth].to_vec());
            return;
        }
        for choice in 0..=ctx.n {
            if st.push(ctx, choice) {
                rec(ctx, st, depth, out);
                st.pop(ctx);
            }
        }
    }
    let mut out = Vec::new();
    rec(ctx, &mut State::new(ctx.n, ctx.m), depth, &mut out);
    out
}

fn split_depth(ctx: &Ctx<'_>, exec: Exec) -> usize {
    if !exec.is_parallel() {
        return 0;
    }
    let radix = ctx.n as u64 + 1;
    let mut depth = 0;
    let mut chunks = 1u64;
    while depth < ctx.m && chunks < TARGET_CHUNKS {
        chunks = chunks.saturating_mul(radix);
        depth += 1;
    }
    depth
}

fn run_chunk<V: Visitor>(ctx: &Ctx<'_>, prefix: &[u8], mut v: V) -> V::Output {
    let mut st = State::new(ctx.n, ctx.m);
    for &c in prefix {
        let ok = st.push(ctx, c as usize);
        debug_assert!(ok, "prefixes are feasible");
        if v.prune(ctx, &st) {
            return v.finish();
        }
    }
    dfs(ctx, &mut st, &mut v);
    v.finish()
}

/// Runs a fresh visitor over each chunk and returns their outputs in
/// enumeration order.
pub(crate) fn run<V, F>(ctx: &Ctx<'_>, exec: Exec, make: F) -> Vec<V::Output>
where
    V: Visitor,
    F: Fn() -> V + Sync + Send,
{
    let chunks = prefixes(ctx, split_depth(ctx, exec));
    exec::map_ordered(exec, chunks, |p| run_chunk(ctx, &p, make()))
}

/// Returns the first `Some` output in enumeration order.
pub(crate) fn run_find<T, V, F>(ctx: &Ctx<'_>, exec: Exec, make: F) -> Option<T>
where
    T: Send,
    V: Visitor<Output = Option<T>>,
    F: Fn() -> V + Sync + Send,
{
    let chunks = prefixes(ctx, split_depth(ctx, exec));
    exec::find_first(exec, chunks, |p| run_chunk(ctx, &p, make()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instances::Instance;
    use crate::rational::Rational;
    use crate::setsystem::ConstraintSpec;
    use crate::valuations::AdditiveValuation;

    struct Collect(Vec<Vec<u8>>);

    impl Visitor for Collect {
        type Output = Vec<Vec<u8>>;
        fn leaf(&mut self, _: &Ctx<'_>, st: &State) -> bool {
            self.0.push(st.assign.clone());
            false
        }
        fn finish(self) -> Self::Output {
            self.0
        }
    }

    fn inst(n: usize, m: usize, k: usize) -> Instance {
        let v = AdditiveValuation::new(vec![Rational::one(); m]).unwrap();
        Instance::new(
            Instance::default_labels(m),
            ValuationProfile::Additive(vec![v; n]),
            ConstraintSpec::Uniform { capacity: k },
            "",
        )
        .unwrap()
    }

    #[test]
    fn leaves_in_order_and_pruned() {
        let instance = inst(2, 3, 1);
        let w = Weights::new(instance.profile()).unwrap();
        let ctx = Ctx::new(&instance, &w);
        for exec in [Exec::Sequential, Exec::Parallel] {
            let leaves: Vec<Vec<u8>> = run(&ctx, exec, || Collect(Vec::new())).concat();
            let mut sorted = leaves.clone();
            sorted.sort();
            assert_eq!(leaves, sorted);
            // brute force over 3^3 vectors with each agent holding ≤ 1 item
            let expected = (0..27u32)
                .map(|x| vec![(x / 9) as u8, (x / 3 % 3) as u8, (x % 3) as u8])
                .filter(|a| (0..2).all(|i| a.iter().filter(|&&c| c == i).count() <= 1))
                .count();
            assert_eq!(leaves.len(), expected);
        }
    }

    #[test]
    fn nsw_ordering_across_representations() {
        let (s, small) = Nsw::over_support(&[0, 3, 4]);
        assert_eq!((s, small.clone()), (2, Nsw::Small(12)));
        let (_, big) = Nsw::over_support(&[1 << 62, 1 << 62, 8]);
        assert!(matches!(big, Nsw::Big(_)));
        assert!(big > small);
        let (_, big2) = Nsw::over_support(&[1 << 62, 1 << 62, 9]);
        assert!(big2 > big);
    }

    #[test]
    fn budget_guard() {
        let instance = inst(3, 11, 11);
        assert!(check_budget(&instance, 10_000_000, "test").is_ok());
        let instance = inst(3, 12, 12);
        assert!(matches!(check_budget(&instance, 10_000_000, "test"), Err(Error::Resource(_))));
    }
}
