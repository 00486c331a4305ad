//! Named scenarios: a state, a set of named projections and the claims made
//! about them, plus the concrete constructions shipped with the crate.

mod constraints;
mod file;
mod ghsz;
mod mixture;
mod rt;

use indexmap::IndexMap;
use serde::{Deserialize, Serialize};

pub use constraints::{enumerate_constraints, ConstraintSet, Enumeration, SignAssignment, SignEquation, Symbol};
pub use file::{load_scenario, parse_scenario, save_scenario, scenario_to_json};
pub use ghsz::{build_ghsz, verify_ghsz, ClaimOutcome, ClaimsReport};
pub use mixture::{
    build_mixture_counterexample, verify_mixture_counterexample, C3Outcome, MixtureCounterexample, MixtureReport,
};
pub use rt::{build_rt_analogue, RT_OVERLAP};

use crate::error::{Error, Result};
use crate::numerics::C64;
use crate::observables::{DensityOperator, Projection};

/// A claim declared by a scenario, checked by [`verify_ghsz`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Claim {
    Commute { a: String, b: String },
    Detect { t: String, e: String },
    Constraints { equations: Vec<SignEquation> },
}

#[derive(Clone, Debug, PartialEq)]
pub struct Scenario {
    pub name: String,
    state: DensityOperator,
    /// Present when the state was given as a pure vector.
    state_vector: Option<Vec<C64>>,
    observables: IndexMap<String, Projection>,
    pub claims: Vec<Claim>,
}

/// Maps `α`/`β` spellings onto the ASCII names used in scenario files.
fn normalize_name(name: &str) -> String {
    name.replace('α', "a")
        .replace('β', "b")
        .replace('ᵅ', "a")
        .replace('ᵝ', "b")
}

impl Scenario {
    pub fn new(name: impl Into<String>, state: DensityOperator) -> Self {
        Self {
            name: name.into(),
            state,
            state_vector: None,
            observables: IndexMap::new(),
            claims: Vec::new(),
        }
    }

    pub fn with_state_vector(mut self, psi: Vec<C64>) -> Self {
        self.state_vector = Some(psi);
        self
    }

    /// Adds an observable under its own name.
    pub fn add(&mut self, p: Projection) -> Result<()> {
        if p.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                left: self.dim(),
                right: p.dim(),
            });
        }
        let name = p.name().to_string();
        if self.observables.contains_key(&name) {
            return Err(Error::DuplicateName(name));
        }
        self.observables.insert(name, p);
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.state.dim()
    }

    pub fn state(&self) -> &DensityOperator {
        &self.state
    }

    pub fn state_vector(&self) -> Option<&[C64]> {
        self.state_vector.as_deref()
    }

    /// Replaces the state, dropping any stored pure vector.
    pub fn set_state(&mut self, state: DensityOperator) -> Result<()> {
        if state.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                left: self.dim(),
                right: state.dim(),
            });
        }
        self.state = state;
        self.state_vector = None;
        Ok(())
    }

    pub fn observables(&self) -> impl Iterator<Item = &Projection> {
        self.observables.values()
    }

    pub fn observable_names(&self) -> impl Iterator<Item = &str> {
        self.observables.keys().map(String::as_str)
    }

    /// Looks up an observable; `Gα` and `Ga` name the same entry.
    pub fn observable(&self, name: &str) -> Result<&Projection> {
        self.observables
            .get(name)
            .or_else(|| self.observables.get(&normalize_name(name)))
            .ok_or_else(|| Error::UnknownObservable(name.into()))
    }
}
