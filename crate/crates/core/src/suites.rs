//! Seeded property suites checking each ratio bound on many instances.
//!
//! Every row is a deterministic function of its seed, so a suite run is
//! reproducible from `(count, base seed)` alone.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::exec::{self, Exec};
use crate::fairness::{ef1_alpha, is_ef1_lex, is_pareto_optimal};
use crate::instances::{
    gen_lemma4, gen_lemma5, gen_lemma6, gen_lemma7, gen_lemma8, gen_random, GeneratorParams,
    Instance, SpecKind, ValuationClass,
};
use crate::rational::{ratio, ExtRational, Rational};
use crate::setsystem::{classify, ClassifyLimits};
use crate::solvers::{round_robin, solve_leximin, solve_max_nsw, Allocation, SolveOptions, TieBreak};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    /// Max-NSW under matroids, additive values: `α ≥ 1/2` and PO.
    Theorem1,
    /// Leximin under matroids, identical values: EF1 and PO.
    Theorem2,
    /// Max-NSW under matroids, values in `{1, a}`: `α ≥ max(1/a², 1/2)` and PO.
    Theorem3,
    /// Max-NSW, identical binary values, strongly `p`-extendible systems: `α ≥ 1/p`.
    Theorem4,
    /// Max-NSW under arbitrary independence systems, additive values: `α ≥ 1/4` and PO.
    Theorem5,
    /// Round-Robin, lexicographic preferences, arbitrary systems: EF1 and PO.
    Theorem6,
    /// The worst-case constructions against their exact ratios.
    Lemmas,
}

pub const ALL_SUITES: [Suite; 7] = [
    Suite::Theorem1,
    Suite::Theorem2,
    Suite::Theorem3,
    Suite::Theorem4,
    Suite::Theorem5,
    Suite::Theorem6,
    Suite::Lemmas,
];

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Suite::Theorem1 => "theorem1",
            Suite::Theorem2 => "theorem2",
            Suite::Theorem3 => "theorem3",
            Suite::Theorem4 => "theorem4",
            Suite::Theorem5 => "theorem5",
            Suite::Theorem6 => "theorem6",
            Suite::Lemmas => "lemmas",
        })
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ALL_SUITES
            .into_iter()
            .find(|x| x.to_string() == s)
            .ok_or_else(|| Error::Domain(format!("unknown suite {s:?}")))
    }
}

/// Outcome on one instance.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SuiteRow {
    pub seed: u64,
    pub n: usize,
    pub m: usize,
    pub spec_kind: String,
    pub valuation_class: String,
    /// Exact EF1 ratio; `None` for lexicographic rows, which carry only
    /// the `ef1` verdict.
    pub alpha: Option<ExtRational>,
    pub ef1: bool,
    pub po: bool,
    pub bound: Rational,
    pub pass: bool,
}

#[derive(Debug, Clone)]
pub struct SuiteReport {
    pub suite: Suite,
    pub rows: Vec<SuiteRow>,
}

impl SuiteReport {
    pub fn violations(&self) -> usize {
        self.rows.iter().filter(|r| !r.pass).count()
    }

    fn alphas(&self) -> Vec<&ExtRational> {
        let mut a: Vec<_> = self.rows.iter().filter_map(|r| r.alpha.as_ref()).collect();
        a.sort();
        a
    }

    pub fn min_alpha(&self) -> Option<ExtRational> {
        self.alphas().first().map(|&a| a.clone())
    }

    /// Lower median.
    pub fn median_alpha(&self) -> Option<ExtRational> {
        let a = self.alphas();
        (!a.is_empty()).then(|| a[(a.len() - 1) / 2].clone())
    }

    /// Smallest bound any row was held to.
    pub fn min_bound(&self) -> Option<Rational> {
        self.rows.iter().map(|r| r.bound.clone()).min()
    }
}

const MATROID_KINDS: [SpecKind; 3] =
    [SpecKind::Uniform, SpecKind::Partition, SpecKind::TruncationOfPartition];

fn shape(seed: u64, max_m: usize) -> (ChaCha8Rng, usize, usize) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x0005_eed5_u64.rotate_left(40));
    let n = rng.gen_range(2..=3);
    let m = rng.gen_range(3..=max_m);
    (rng, n, m)
}

fn sequential() -> SolveOptions {
    SolveOptions { exec: Exec::Sequential, ..SolveOptions::default() }
}

/// One generated suite instance with the allocation under test.
#[derive(Debug, Clone)]
pub struct SuiteCase {
    pub instance: Instance,
    pub allocation: Allocation,
    pub bound: Rational,
    /// Whether the allocation must also be Pareto optimal.
    pub need_po: bool,
    pub spec_kind: String,
    pub valuation_class: String,
}

fn max_nsw(inst: &Instance) -> Result<Allocation> {
    Ok(solve_max_nsw(inst, &sequential())?.0)
}

fn case(
    instance: Instance,
    allocation: Allocation,
    bound: Rational,
    need_po: bool,
    spec_kind: impl ToString,
    valuation_class: impl ToString,
) -> SuiteCase {
    SuiteCase {
        instance,
        allocation,
        bound,
        need_po,
        spec_kind: spec_kind.to_string(),
        valuation_class: valuation_class.to_string(),
    }
}

/// Builds the instance for `seed` in a seeded suite and runs its solver.
pub fn suite_case(suite: Suite, seed: u64) -> Result<SuiteCase> {
    Ok(match suite {
        Suite::Theorem1 | Suite::Theorem2 | Suite::Theorem3 => {
            let (mut rng, n, m) = shape(seed, 8);
            let kind = MATROID_KINDS[rng.gen_range(0..MATROID_KINDS.len())];
            let (class, bound) = match suite {
                Suite::Theorem1 => (ValuationClass::Additive, ratio(1, 2)),
                Suite::Theorem2 => (ValuationClass::Identical, Rational::one()),
                _ => {
                    let a = [ratio(3, 2), ratio(2, 1), ratio(3, 1)][(seed % 3) as usize].clone();
                    let inv_sq = (&a * &a).recip();
                    (ValuationClass::TwoValued(a), inv_sq.max(ratio(1, 2)))
                }
            };
            let inst = gen_random(&GeneratorParams::new(seed, n, m, kind, class.clone()))?;
            let alloc = if suite == Suite::Theorem2 {
                solve_leximin(&inst, &sequential())?
            } else {
                max_nsw(&inst)?
            };
            case(inst, alloc, bound, true, kind, class)
        }
        Suite::Theorem4 => {
            let (mut rng, n, m) = shape(seed, 6);
            let kind = if rng.gen_bool(0.5) {
                SpecKind::Explicit
            } else {
                MATROID_KINDS[rng.gen_range(0..MATROID_KINDS.len())]
            };
            let class = ValuationClass::IdenticalBinary;
            let inst = gen_random(&GeneratorParams::new(seed, n, m, kind, class.clone()))?;
            let report = classify(
                inst.system(),
                m.max(1),
                &ClassifyLimits { exec: Exec::Sequential, ..ClassifyLimits::default() },
            )?;
            // No extension ever needs more than m removals.
            let p = report.min_strong_extendibility.value().unwrap_or(m.max(1));
            let alloc = max_nsw(&inst)?;
            case(inst, alloc, ratio(1, p as i64), false, kind, format!("{class} p={p}"))
        }
        Suite::Theorem5 => {
            let (_, n, m) = shape(seed, 8);
            let class = ValuationClass::Additive;
            let inst = gen_random(&GeneratorParams::new(seed, n, m, SpecKind::Explicit, class.clone()))?;
            let alloc = max_nsw(&inst)?;
            case(inst, alloc, ratio(1, 4), true, SpecKind::Explicit, class)
        }
        Suite::Theorem6 => {
            let (mut rng, n, m) = shape(seed, 7);
            let kind = if rng.gen_bool(0.5) {
                SpecKind::Explicit
            } else {
                MATROID_KINDS[rng.gen_range(0..MATROID_KINDS.len())]
            };
            let class = ValuationClass::Lexicographic;
            let inst = gen_random(&GeneratorParams::new(seed, n, m, kind, class.clone()))?;
            let alloc = round_robin(&inst, &TieBreak::ByIndex)?;
            case(inst, alloc, Rational::one(), true, kind, class)
        }
        Suite::Lemmas => {
            return Err(Error::Domain("the lemma suite has fixed cases; use lemma_cases".into()))
        }
    })
}

fn evaluate(seed: u64, c: &SuiteCase) -> Result<SuiteRow> {
    let inst = &c.instance;
    let (alpha, ef1) = match inst.profile().additive() {
        Some(_) => {
            let a = ef1_alpha(inst, &c.allocation)?.alpha;
            let ef1 = a >= Rational::one();
            (Some(a), ef1)
        }
        None => (None, is_ef1_lex(inst, &c.allocation)?),
    };
    let (po, _) = is_pareto_optimal(inst, &c.allocation, &sequential())?;
    let meets = match &alpha {
        Some(a) => *a >= c.bound,
        None => ef1,
    };
    Ok(SuiteRow {
        seed,
        n: inst.agents(),
        m: inst.items(),
        spec_kind: c.spec_kind.clone(),
        valuation_class: c.valuation_class.clone(),
        alpha,
        ef1,
        po,
        bound: c.bound.clone(),
        pass: meets && (po || !c.need_po),
    })
}

/// Exact ratio of the Lemma 4 construction at `(k, δ)`.
pub fn lemma4_alpha(k: usize, delta: &Rational) -> Rational {
    let k1 = Rational::from(k as i64 + 1);
    k1 / (Rational::from(2 * k as i64 + 1) - delta)
}

/// Exact ratio of the Lemma 7 construction at `δ`.
pub fn lemma7_alpha(delta: &Rational) -> Rational {
    (Rational::one() + delta) / (Rational::from(4) - &(delta * &Rational::from(4)))
}

/// Exact ratio of the Lemma 8 construction at `η`.
pub fn lemma8_alpha(eta: usize) -> Rational {
    ratio(eta as i64, 2 * eta as i64 - 1)
}

/// The worst-case constructions with their solver outputs; `bound` holds
/// the exact ratio each must attain.
pub fn lemma_cases() -> Result<Vec<SuiteCase>> {
    let tenth = ratio(1, 10);
    let mut cases = Vec::new();
    let mut push = |inst: Instance, alloc: Allocation, golden: Rational, need_po: bool| {
        let kind = inst.spec().kind();
        let label = inst.metadata.clone();
        cases.push(case(inst, alloc, golden, need_po, kind, label));
    };
    for k in 2..=4 {
        let inst = gen_lemma4(k, &tenth)?;
        let a = max_nsw(&inst)?;
        push(inst, a, lemma4_alpha(k, &tenth), true);
    }
    for (inst, golden) in [(gen_lemma5()?, ratio(2, 5)), (gen_lemma6()?, ratio(2, 3))] {
        let a = max_nsw(&inst)?;
        push(inst, a, golden, true);
    }
    for delta in [ratio(1, 4), tenth.clone()] {
        let inst = gen_lemma7(&delta)?;
        let a = max_nsw(&inst)?;
        push(inst, a, lemma7_alpha(&delta), true);
    }
    for eta in [2, 3] {
        let (inst, tb) = gen_lemma8(eta)?;
        let a = round_robin(&inst, &tb)?;
        push(inst, a, lemma8_alpha(eta), false);
    }
    Ok(cases)
}

fn lemma_rows() -> Result<Vec<SuiteRow>> {
    lemma_cases()?
        .iter()
        .enumerate()
        .map(|(idx, c)| {
            let mut r = evaluate(idx as u64, c)?;
            r.pass = r.alpha == Some(ExtRational::Finite(c.bound.clone())) && (r.po || !c.need_po);
            Ok(r)
        })
        .collect()
}

/// Runs `suite` on seeds `seed, seed + 1, …` (`count` of them). The lemma
/// suite ignores both and always runs its fixed constructions.
pub fn run_suite(suite: Suite, count: usize, seed: u64, exec: Exec) -> Result<SuiteReport> {
    let rows = if suite == Suite::Lemmas {
        lemma_rows()?
    } else {
        let seeds: Vec<u64> = (0..count as u64).map(|i| seed.wrapping_add(i)).collect();
        exec::map_ordered(exec, seeds, |s| evaluate(s, &suite_case(suite, s)?))
            .into_iter()
            .collect::<Result<Vec<_>>>()?
    };
    Ok(SuiteReport { suite, rows })
}
