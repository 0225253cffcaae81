//! Brute-force reference implementations. Nothing here uses the library's
//! enumeration, scaling or classification code: every quantity is
//! recomputed from its definition over all subsets and all assignments.

#![allow(dead_code)]

use std::cmp::Ordering;

use fairalloc::{
    Allocation, Bundle, ConstraintSpec, ExtRational, Instance, ItemId, Rational, ValuationProfile,
};

pub fn independent(spec: &ConstraintSpec, mask: u64) -> bool {
    let size = mask.count_ones() as usize;
    match spec {
        ConstraintSpec::Uniform { capacity } => size <= *capacity,
        ConstraintSpec::Partition { categories } => categories
            .iter()
            .all(|c| (mask & c.items.mask() as u64).count_ones() as usize <= c.capacity),
        ConstraintSpec::Truncation { base, rank } => size <= *rank && independent(base, mask),
        ConstraintSpec::Explicit { generators } => {
            generators.iter().any(|g| mask & !(g.mask() as u64) == 0)
        }
    }
}

/// `table[s]` tells whether subset `s` of the `m` items is independent.
pub fn family(spec: &ConstraintSpec, m: usize) -> Vec<bool> {
    (0..1u64 << m).map(|s| independent(spec, s)).collect()
}

pub fn masks(a: &Allocation) -> Vec<u64> {
    a.bundles.iter().map(|b| b.mask() as u64).collect()
}

pub fn to_alloc(bundles: &[u64], m: usize) -> Allocation {
    Allocation::from_bundles(bundles.iter().map(|&b| Bundle::from_mask(b as u128)).collect(), m)
}

/// Calls `f` on the bundle masks of every feasible allocation (items may
/// stay unallocated).
pub fn for_each_allocation(inst: &Instance, mut f: impl FnMut(&[u64])) {
    let (n, m) = (inst.agents(), inst.items());
    let table = family(inst.spec(), m);
    let mut digits = vec![0usize; m];
    let mut bundles = vec![0u64; n];
    loop {
        bundles.iter_mut().for_each(|b| *b = 0);
        for (g, &d) in digits.iter().enumerate() {
            if d < n {
                bundles[d] |= 1 << g;
            }
        }
        if bundles.iter().all(|&b| table[b as usize]) {
            f(&bundles);
        }
        let mut k = 0;
        loop {
            if k == m {
                return;
            }
            digits[k] += 1;
            if digits[k] <= n {
                break;
            }
            digits[k] = 0;
            k += 1;
        }
    }
}

/// `values[i][s]`: agent `i`'s value for subset `s`, by summing items.
pub fn value_tables(inst: &Instance) -> Vec<Vec<Rational>> {
    let vals = inst.profile().additive().expect("additive profile");
    let m = inst.items();
    vals.iter()
        .map(|v| {
            (0..1u64 << m)
                .map(|s| {
                    (0..m)
                        .filter(|g| s >> g & 1 == 1)
                        .fold(Rational::zero(), |acc, g| acc + v.values()[g].clone())
                })
                .collect()
        })
        .collect()
}

pub fn lex_cmp(order: &[ItemId], x: u64, y: u64) -> Ordering {
    for g in order {
        let (a, b) = (x >> g.0 & 1, y >> g.0 & 1);
        if a != b {
            return a.cmp(&b);
        }
    }
    Ordering::Equal
}

#[derive(Debug, Clone)]
pub struct NswOptimum {
    pub support: usize,
    pub product: Rational,
    pub allocated: usize,
    /// Every allocation attaining the three keys above.
    pub allocations: Vec<Vec<u64>>,
}

/// Maximises (positive support, product over the support, items allocated).
pub fn max_nsw(inst: &Instance) -> NswOptimum {
    let vt = value_tables(inst);
    let mut best: Option<NswOptimum> = None;
    for_each_allocation(inst, |b| {
        let utils: Vec<&Rational> = b.iter().enumerate().map(|(i, &s)| &vt[i][s as usize]).collect();
        let support = utils.iter().filter(|u| u.is_positive()).count();
        let product = utils
            .iter()
            .filter(|u| u.is_positive())
            .fold(Rational::one(), |acc, u| acc * (*u).clone());
        let allocated = b.iter().map(|s| s.count_ones() as usize).sum();
        let key = (support, product.clone(), allocated);
        match &mut best {
            Some(o) => match key.cmp(&(o.support, o.product.clone(), o.allocated)) {
                Ordering::Greater => {
                    best = Some(NswOptimum { support, product, allocated, allocations: vec![b.to_vec()] })
                }
                Ordering::Equal => o.allocations.push(b.to_vec()),
                Ordering::Less => {}
            },
            None => {
                best = Some(NswOptimum { support, product, allocated, allocations: vec![b.to_vec()] })
            }
        }
    });
    best.expect("the empty allocation is feasible")
}

/// Largest ascending-sorted utility vector.
pub fn leximin_vector(inst: &Instance) -> Vec<Rational> {
    let vt = value_tables(inst);
    let mut best: Option<Vec<Rational>> = None;
    for_each_allocation(inst, |b| {
        let mut u: Vec<Rational> = b.iter().enumerate().map(|(i, &s)| vt[i][s as usize].clone()).collect();
        u.sort();
        if best.as_ref().is_none_or(|x| u > *x) {
            best = Some(u);
        }
    });
    best.expect("the empty allocation is feasible")
}

pub fn sorted_utilities(inst: &Instance, bundles: &[u64]) -> Vec<Rational> {
    let vt = value_tables(inst);
    let mut u: Vec<Rational> = bundles.iter().enumerate().map(|(i, &s)| vt[i][s as usize].clone()).collect();
    u.sort();
    u
}

/// Largest `α` such that for every `i != j` some `Z ⊆ A_j` with `|Z| ≤ 1`
/// has `v_i(A_i) ≥ α·v_i(A_j ∖ Z)`.
pub fn ef1_alpha(inst: &Instance, bundles: &[u64]) -> ExtRational {
    let vt = value_tables(inst);
    let n = bundles.len();
    let mut alpha = ExtRational::Infinite;
    for i in 0..n {
        let own = &vt[i][bundles[i] as usize];
        for j in (0..n).filter(|&j| j != i) {
            let aj = bundles[j];
            let mut removals = vec![aj];
            removals.extend((0..64).filter(|g| aj >> g & 1 == 1).map(|g| aj & !(1 << g)));
            let best = removals
                .into_iter()
                .map(|rest| {
                    let d = &vt[i][rest as usize];
                    if d.is_zero() {
                        ExtRational::Infinite
                    } else {
                        ExtRational::Finite(own / d)
                    }
                })
                .max()
                .expect("at least Z = ∅");
            alpha = alpha.min(best);
        }
    }
    alpha
}

/// Per-agent comparison of bundles, precomputed once per instance.
pub struct Judge<'a> {
    inst: &'a Instance,
    tables: Option<Vec<Vec<Rational>>>,
}

impl<'a> Judge<'a> {
    pub fn new(inst: &'a Instance) -> Self {
        let tables = inst.profile().additive().map(|_| value_tables(inst));
        Judge { inst, tables }
    }

    pub fn cmp(&self, agent: usize, x: u64, y: u64) -> Ordering {
        match (&self.tables, self.inst.profile()) {
            (Some(vt), _) => vt[agent][x as usize].cmp(&vt[agent][y as usize]),
            (None, ValuationProfile::Lexicographic(prefs)) => lex_cmp(prefs[agent].order(), x, y),
            (None, ValuationProfile::Additive(_)) => unreachable!(),
        }
    }

    /// Whether `x` leaves nobody worse off than `y` and somebody better off.
    pub fn dominates(&self, x: &[u64], y: &[u64]) -> bool {
        let mut strict = false;
        for i in 0..x.len() {
            match self.cmp(i, x[i], y[i]) {
                Ordering::Less => return false,
                Ordering::Greater => strict = true,
                Ordering::Equal => {}
            }
        }
        strict
    }
}

pub fn dominates(inst: &Instance, x: &[u64], y: &[u64]) -> bool {
    Judge::new(inst).dominates(x, y)
}

/// Some feasible allocation dominating `bundles`, if one exists.
pub fn dominator(inst: &Instance, bundles: &[u64]) -> Option<Vec<u64>> {
    let judge = Judge::new(inst);
    let mut found = None;
    for_each_allocation(inst, |b| {
        if found.is_none() && judge.dominates(b, bundles) {
            found = Some(b.to_vec());
        }
    });
    found
}

pub fn lex_ef1(inst: &Instance, bundles: &[u64]) -> bool {
    let prefs = inst.profile().lexicographic().expect("lexicographic profile");
    let n = bundles.len();
    (0..n).all(|i| {
        (0..n).filter(|&j| j != i).all(|j| {
            let aj = bundles[j];
            aj == 0
                || (0..64)
                    .filter(|g| aj >> g & 1 == 1)
                    .any(|g| lex_cmp(prefs[i].order(), bundles[i], aj & !(1 << g)) != Ordering::Less)
        })
    })
}

fn submasks(s: u64) -> impl Iterator<Item = u64> {
    let mut next = Some(s);
    std::iter::from_fn(move || {
        let cur = next?;
        next = if cur == 0 { None } else { Some((cur - 1) & s) };
        Some(cur)
    })
}

/// Augmentation property over every pair of members.
pub fn is_matroid(table: &[bool]) -> bool {
    let members: Vec<u64> = (0..table.len() as u64).filter(|&s| table[s as usize]).collect();
    members.iter().all(|&c| {
        members.iter().all(|&d| {
            d.count_ones() <= c.count_ones()
                || submasks(d & !c).any(|x| x.count_ones() == 1 && table[(c | x) as usize])
        })
    })
}

/// Smallest `p` (at least 1) for which the family is `p`-extendible, and the
/// smallest for which it is strongly `p`-extendible.
pub fn extendibility(table: &[bool], m: usize) -> (usize, usize) {
    let members: Vec<u64> = (0..1u64 << m).filter(|&s| table[s as usize]).collect();
    let full = (1u64 << m) - 1;
    let min_removal = |d: u64, c: u64, add: u64| {
        submasks(d & !c)
            .filter(|&y| table[((d & !y) | add) as usize])
            .map(|y| y.count_ones() as usize)
            .min()
            .expect("removing all of D minus C always works")
    };
    let (mut weak, mut strong) = (1, 1);
    for &c in &members {
        for &d in members.iter().filter(|&&d| d != c && d & c == c) {
            for x in (0..m).map(|g| 1u64 << g).filter(|&x| x & c == 0 && table[(c | x) as usize]) {
                weak = weak.max(min_removal(d, c, x));
            }
            for h in submasks(full & !c).filter(|&h| h != 0 && table[(c | h) as usize]) {
                let need = min_removal(d, c, h);
                let size = h.count_ones() as usize;
                strong = strong.max(need.div_ceil(size));
            }
        }
    }
    (weak, strong)
}
