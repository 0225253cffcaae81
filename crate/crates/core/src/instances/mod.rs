//! Problem instances: the canonical worst-case constructions, seeded random
//! generators, and the JSON interchange format.

mod io;
mod lemmas;
mod random;

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::setsystem::{ConstraintSpec, ItemId, SetSystem};
use crate::valuations::ValuationProfile;

pub use crate::solvers::TieBreak;
pub use io::{alloc_from_json, alloc_to_json, instance_from_json, instance_to_json, load, load_alloc, save, save_alloc};
pub use lemmas::{gen_lemma4, gen_lemma5, gen_lemma6, gen_lemma7, gen_lemma8, lemma8_tie_break};
pub use random::{
    gen_random, random_explicit_family, random_independent_set, GeneratorParams, SpecKind,
    ValuationClass,
};

/// Items, agents, one valuation per agent, and the constraint every bundle
/// must satisfy.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Instance {
    labels: Vec<String>,
    index: HashMap<String, usize>,
    profile: ValuationProfile,
    system: SetSystem,
    pub metadata: String,
}

impl Instance {
    pub fn new(
        labels: Vec<String>,
        profile: ValuationProfile,
        spec: ConstraintSpec,
        metadata: impl Into<String>,
    ) -> Result<Self> {
        let m = labels.len();
        let mut index = HashMap::with_capacity(m);
        for (i, l) in labels.iter().enumerate() {
            if l.is_empty() {
                return Err(Error::Domain(format!("item {i} has an empty label")));
            }
            if index.insert(l.clone(), i).is_some() {
                return Err(Error::Domain(format!("duplicate item label {l:?}")));
            }
        }
        if profile.agents() == 0 {
            return Err(Error::Domain("an instance needs at least one agent".into()));
        }
        if profile.agents() > 250 {
            return Err(Error::Resource("more than 250 agents".into()));
        }
        let arity_ok = match &profile {
            ValuationProfile::Additive(v) => v.iter().all(|x| x.items() == m),
            ValuationProfile::Lexicographic(p) => p.iter().all(|x| x.items() == m),
        };
        if !arity_ok {
            return Err(Error::Domain(format!(
                "every valuation must cover exactly the {m} items"
            )));
        }
        let system = SetSystem::new(m, spec)?;
        Ok(Instance { labels, index, profile, system, metadata: metadata.into() })
    }

    /// `g1, …, gm`.
    pub fn default_labels(m: usize) -> Vec<String> {
        (1..=m).map(|i| format!("g{i}")).collect()
    }

    pub fn items(&self) -> usize {
        self.labels.len()
    }

    pub fn agents(&self) -> usize {
        self.profile.agents()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, g: ItemId) -> String {
        if g.is_dummy() {
            format!("d{}", g.0 - crate::setsystem::DUMMY_BASE)
        } else {
            self.labels[g.0].clone()
        }
    }

    pub fn item(&self, label: &str) -> Option<ItemId> {
        self.index.get(label).map(|&i| ItemId(i))
    }

    pub fn profile(&self) -> &ValuationProfile {
        &self.profile
    }

    pub fn system(&self) -> &SetSystem {
        &self.system
    }

    pub fn spec(&self) -> &ConstraintSpec {
        self.system.spec()
    }

    /// Renders a bundle as `{g1,g2}`.
    pub fn show(&self, b: crate::setsystem::Bundle) -> String {
        let names: Vec<String> = b.iter().map(|g| self.label(g)).collect();
        format!("{{{}}}", names.join(","))
    }
}
