//! The learner side of the interaction: announced distributions over explicit
//! classifiers and the announce/update contract every algorithm implements.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{ManipulationGraph, VertexId};
use crate::hypothesis::{Hypothesis, HypothesisClass, Label};

/// Tolerance on the total announced mass.
pub const MASS_TOLERANCE: f64 = 1e-9;

/// What an atom of an announced distribution refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind", content = "index")]
pub enum AtomKind {
    /// The all-positive classifier `h⁺`.
    AllPositive,
    /// Class member `h^i`.
    Member(usize),
    /// A learner-internal classifier (e.g. an expert's SOA labeling).
    Expert(usize),
}

#[derive(Debug, Clone)]
pub struct Atom {
    pub kind: AtomKind,
    pub hypothesis: Hypothesis,
    pub mass: f64,
}

/// Finite-support distribution over explicit classifiers.
#[derive(Debug, Clone)]
pub struct ClassifierDistribution {
    atoms: Vec<Atom>,
    cumulative: Vec<f64>,
}

impl ClassifierDistribution {
    pub fn new(atoms: Vec<Atom>) -> Result<Self> {
        if atoms.is_empty() {
            return Err(Error::InvalidDistribution("empty support".into()));
        }
        let mut cumulative = Vec::with_capacity(atoms.len());
        let mut total = 0.0;
        for a in &atoms {
            if !a.mass.is_finite() || a.mass < 0.0 {
                return Err(Error::InvalidDistribution(format!(
                    "bad mass {} on {:?}",
                    a.mass, a.kind
                )));
            }
            total += a.mass;
            cumulative.push(total);
        }
        if (total - 1.0).abs() > MASS_TOLERANCE {
            return Err(Error::InvalidDistribution(format!("masses sum to {total}")));
        }
        Ok(ClassifierDistribution { atoms, cumulative })
    }

    pub fn point_mass(kind: AtomKind, hypothesis: Hypothesis) -> Self {
        Self::new(vec![Atom {
            kind,
            hypothesis,
            mass: 1.0,
        }])
        .expect("unit mass")
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn atom(&self, k: usize) -> &Atom {
        &self.atoms[k]
    }

    pub fn support_size(&self) -> usize {
        self.atoms.len()
    }

    /// Inverse-CDF draw for `u ∈ [0, 1)`; zero-mass atoms are never returned.
    pub fn sample(&self, u: f64) -> usize {
        let total = *self.cumulative.last().expect("nonempty");
        let target = u * total;
        let k = self.cumulative.partition_point(|&c| c <= target);
        let mut k = k.min(self.atoms.len() - 1);
        while self.atoms[k].mass == 0.0 && k > 0 {
            k -= 1;
        }
        k
    }

    /// Total mass on atoms satisfying `pred`.
    pub fn mass_where(&self, mut pred: impl FnMut(&Atom) -> bool) -> f64 {
        self.atoms.iter().filter(|a| pred(a)).map(|a| a.mass).sum()
    }
}

/// Pass/fail counters for named invariants.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct InvariantLog {
    pub checks: BTreeMap<String, u64>,
    pub violations: BTreeMap<String, u64>,
}

impl InvariantLog {
    pub fn record(&mut self, name: &str, ok: bool) {
        bump(&mut self.checks, name, 1);
        if !ok {
            bump(&mut self.violations, name, 1);
        }
    }

    pub fn merge(&mut self, other: &InvariantLog) {
        for (k, v) in &other.checks {
            *self.checks.entry(k.clone()).or_default() += v;
        }
        for (k, v) in &other.violations {
            *self.violations.entry(k.clone()).or_default() += v;
        }
    }

    pub fn total_violations(&self) -> u64 {
        self.violations.values().sum()
    }

    pub fn checks_of(&self, name: &str) -> u64 {
        self.checks.get(name).copied().unwrap_or(0)
    }

    pub fn violations_of(&self, name: &str) -> u64 {
        self.violations.get(name).copied().unwrap_or(0)
    }
}

// avoids allocating a key on the hot path
fn bump(map: &mut BTreeMap<String, u64>, name: &str, by: u64) {
    match map.get_mut(name) {
        Some(v) => *v += by,
        None => {
            map.insert(name.to_string(), by);
        }
    }
}

/// God-view facts available to learner self-audits after a round.
pub struct AuditContext<'a> {
    pub graph: &'a ManipulationGraph,
    pub class: &'a HypothesisClass,
    /// Index of a class member realizing the sequence, when one is known.
    pub target: Option<usize>,
    pub true_x: VertexId,
    pub true_y: Label,
}

pub trait Learner {
    fn name(&self) -> &'static str;

    /// The distribution `D_t` for the coming round.
    fn announce(&mut self) -> Result<&ClassifierDistribution>;

    /// Feedback for the atom drawn from the last announcement: the landed
    /// vertex `z_t` and the true label `y_t`.
    fn update(&mut self, sampled: usize, z: VertexId, y: Label) -> Result<()>;

    /// Per-round invariant checks from the god view. Default: none.
    fn audit(&mut self, _ctx: &AuditContext<'_>, _log: &mut InvariantLog) {}
}

#[cfg(test)]
mod tests {
    use super::*;

    fn atom(kind: AtomKind, mass: f64) -> Atom {
        Atom {
            kind,
            hypothesis: Hypothesis::all_positive(1),
            mass,
        }
    }

    #[test]
    fn rejects_bad_masses() {
        assert!(ClassifierDistribution::new(vec![]).is_err());
        assert!(ClassifierDistribution::new(vec![atom(AtomKind::AllPositive, 0.5)]).is_err());
        assert!(ClassifierDistribution::new(vec![
            atom(AtomKind::AllPositive, 1.5),
            atom(AtomKind::Member(0), -0.5)
        ])
        .is_err());
        assert!(ClassifierDistribution::new(vec![atom(AtomKind::AllPositive, f64::NAN)]).is_err());
    }

    #[test]
    fn sampling_follows_cumulative_mass() {
        let d = ClassifierDistribution::new(vec![
            atom(AtomKind::AllPositive, 0.25),
            atom(AtomKind::Member(0), 0.0),
            atom(AtomKind::Member(1), 0.75),
        ])
        .unwrap();
        assert_eq!(d.sample(0.0), 0);
        assert_eq!(d.sample(0.2499), 0);
        assert_eq!(d.sample(0.25), 2);
        assert_eq!(d.sample(0.9999), 2);
        assert!((d.mass_where(|a| a.kind != AtomKind::AllPositive) - 0.75).abs() < 1e-15);
    }
}
