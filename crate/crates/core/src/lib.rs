//! Exact fair allocation of indivisible items under independence-system
//! constraints.
//!
//! The crate is organised around a shared constraint system ([`SetSystem`])
//! that every agent's bundle must be independent in, exact rational
//! valuations ([`Rational`]), brute-force and greedy solvers, and auditors
//! for approximate envy-freeness and Pareto optimality. All arithmetic on
//! values, Nash products and envy ratios is exact.
//!
//! Enumeration-heavy routines (brute-force solvers, Pareto audits, structure
//! classification, property suites) run on rayon when the `parallel` feature
//! is enabled. Results never depend on the thread count: every reduction is
//! ordered and ties are broken canonically.

pub mod error;
pub mod exec;
pub mod fairness;
pub mod instances;
pub mod rational;
pub mod setsystem;
pub mod solvers;
pub mod suites;
pub mod valuations;

pub use error::{Error, Result};
pub use exec::Exec;
pub use fairness::{audit, ef1_alpha, is_ef, is_ef1_lex, is_pareto_optimal, AuditReport, Ef1Ratio};
pub use instances::{Instance, TieBreak};
pub use rational::{ExtRational, Rational};
pub use setsystem::{
    augment, classify, exchange_bijection, pad_with_dummies, Bundle, ClassificationReport,
    ClassifyLimits, ConstraintSpec, Extendibility, IndependenceOracle, ItemId, SetSystem,
    Witness,
};
pub use solvers::{
    local_search_nsw, round_robin, solve_leximin, solve_max_nsw, Allocation, SolveOptions,
    SolveTrace, Stage, SwapCandidate,
};
pub use valuations::{
    classify_profile, lex_compare, nsw, value, AdditiveValuation, LexPreference, ProfileClass,
    ValuationProfile,
};
