//! Learners for realizable sequences: Uniform-Mix, Expert-Mix, the naive
//! cursor learner, and the size-based combination of the first and last.
//!
//! Uniform-Mix and Expert-Mix both mix an all-positive exploration classifier
//! `h⁺` with a randomized expert choice. When `h⁺` is played the agent never
//! moves, so `z_t = x_t` and the strategic loss of every candidate is known.

use std::collections::HashMap;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::graph::{ManipulationGraph, VertexId};
use crate::hypothesis::{Hypothesis, HypothesisClass, Label, LdimMemo, SoaState};
use crate::learner::{Atom, AtomKind, AuditContext, ClassifierDistribution, InvariantLog, Learner};

/// Relative tolerance for the exploration-round weight identity.
pub const WEIGHT_IDENTITY_TOLERANCE: f64 = 1e-12;

/// `min{1, sqrt(ln n / T)}`.
pub fn uniform_mix_probability(n: usize, horizon: usize) -> f64 {
    let t = horizon.max(1) as f64;
    ((n as f64).ln() / t).sqrt().min(1.0)
}

/// `min{1, sqrt(M ln(2Δ) / T)}`; `Δ` is floored at 1 so edgeless graphs get `ln 2`.
pub fn expert_mix_probability(mistake_bound: u32, max_degree: usize, horizon: usize) -> f64 {
    let t = horizon.max(1) as f64;
    let log_term = (2.0 * max_degree.max(1) as f64).ln();
    (f64::from(mistake_bound) * log_term / t).sqrt().min(1.0)
}

/// `pT + ((1-p)/p) ln n`.
pub fn uniform_mix_bound(n: usize, horizon: usize) -> f64 {
    let p = uniform_mix_probability(n, horizon);
    if p == 0.0 {
        return 0.0;
    }
    p * horizon as f64 + (1.0 - p) / p * (n as f64).ln()
}

/// `pT + (2(1-p)/p) M ln(2Δ)`.
pub fn expert_mix_bound(mistake_bound: u32, max_degree: usize, horizon: usize) -> f64 {
    let p = expert_mix_probability(mistake_bound, max_degree, horizon);
    if p == 0.0 {
        return 0.0;
    }
    let log_term = (2.0 * max_degree.max(1) as f64).ln();
    p * horizon as f64 + 2.0 * (1.0 - p) / p * f64::from(mistake_bound) * log_term
}

pub struct UniformMix {
    graph: Arc<ManipulationGraph>,
    class: Arc<HypothesisClass>,
    p: f64,
    version: Vec<usize>,
    in_version: Vec<bool>,
    all_positive: Hypothesis,
    cached: Option<ClassifierDistribution>,
    last_exploration: Option<(usize, usize, usize)>,
}

impl UniformMix {
    pub fn new(
        graph: Arc<ManipulationGraph>,
        class: Arc<HypothesisClass>,
        horizon: usize,
    ) -> Result<Self> {
        check_compatible(&graph, &class)?;
        let n = class.len();
        Ok(UniformMix {
            all_positive: Hypothesis::all_positive(graph.vertex_count()),
            p: uniform_mix_probability(n, horizon),
            version: (0..n).collect(),
            in_version: vec![true; n],
            graph,
            class,
            cached: None,
            last_exploration: None,
        })
    }

    pub fn exploration_probability(&self) -> f64 {
        self.p
    }

    pub fn version(&self) -> &[usize] {
        &self.version
    }

    pub fn contains(&self, i: usize) -> bool {
        self.in_version.get(i).copied().unwrap_or(false)
    }
}

impl Learner for UniformMix {
    fn name(&self) -> &'static str {
        "uniform_mix"
    }

    fn announce(&mut self) -> Result<&ClassifierDistribution> {
        if self.cached.is_none() {
            if self.version.is_empty() {
                return Err(Error::EmptyVersionSpace);
            }
            let mut atoms = Vec::with_capacity(self.version.len() + 1);
            if self.p > 0.0 {
                atoms.push(Atom {
                    kind: AtomKind::AllPositive,
                    hypothesis: self.all_positive.clone(),
                    mass: self.p,
                });
            }
            if self.p < 1.0 {
                let each = (1.0 - self.p) / self.version.len() as f64;
                atoms.extend(self.version.iter().map(|&i| Atom {
                    kind: AtomKind::Member(i),
                    hypothesis: self.class.member(i).clone(),
                    mass: each,
                }));
            }
            self.cached = Some(ClassifierDistribution::new(atoms)?);
        }
        Ok(self.cached.as_ref().expect("just built"))
    }

    fn update(&mut self, sampled: usize, z: VertexId, y: Label) -> Result<()> {
        self.last_exploration = None;
        let kind = self.cached.as_ref().map(|d| d.atom(sampled).kind);
        if kind != Some(AtomKind::AllPositive) {
            return Ok(());
        }
        // h⁺ was played, so z is the true agent.
        let before = self.version.len();
        let (graph, class) = (&self.graph, &self.class);
        let mut removed = 0;
        self.version.retain(|&i| {
            let keep = graph.strategic_loss_unchecked(class.member(i), z, y) == 0;
            if !keep {
                removed += 1;
            }
            keep
        });
        for i in 0..self.in_version.len() {
            self.in_version[i] = false;
        }
        for &i in &self.version {
            self.in_version[i] = true;
        }
        self.last_exploration = Some((before, removed, self.version.len()));
        if removed > 0 {
            self.cached = None;
        }
        Ok(())
    }

    fn audit(&mut self, ctx: &AuditContext<'_>, log: &mut InvariantLog) {
        if let Some(t) = ctx.target {
            log.record("uniform_mix_target_survives", self.contains(t));
        }
        if let Some((before, removed, after)) = self.last_exploration {
            // |V_{t+1}| = (1 - δ_t)|V_t| with δ_t the erring fraction
            log.record("uniform_mix_version_shrink", after + removed == before);
        }
    }
}

/// A node of the Expert-Mix forest: an SOA run on a mistake-forcing sequence.
#[derive(Debug, Clone)]
pub struct Expert {
    pub soa: SoaState,
    pub deployed: Hypothesis,
    pub weight: f64,
    /// Per-event weight multipliers since the root expert of weight 1.
    pub factors: Vec<f64>,
    pub merged: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExplorationRecord {
    pub total_before: f64,
    pub erring_weight: f64,
    pub total_after: f64,
}

impl ExplorationRecord {
    /// `δ_t`: weighted fraction of experts erring.
    pub fn erring_fraction(&self) -> f64 {
        self.erring_weight / self.total_before
    }

    /// `|W_{t+1} - W_t (1 - δ_t / 2)| / W_t`.
    pub fn identity_residual(&self) -> f64 {
        let predicted = self.total_before * (1.0 - self.erring_fraction() / 2.0);
        (self.total_after - predicted).abs() / self.total_before
    }
}

/// Expert-Mix over a base SOA learner.
///
/// An erring expert is replaced on exploration rounds as follows.
/// `y = -1`: one child `E(x, -1)` at half weight, `x` the smallest-id vertex of
/// `N[x_t]` that `h_E` labels positive and whose feed keeps the SOA version
/// space nonempty. `y = +1`: one child `E(x, +1)` per `x ∈ N[x_t]` whose feed is
/// consistent, sharing half the parent weight equally. An erring expert with no
/// consistent child keeps its history at half weight. Every branch removes
/// exactly half of the erring weight.
pub struct ExpertMix {
    graph: Arc<ManipulationGraph>,
    class: Arc<HypothesisClass>,
    p: f64,
    mistake_bound: u32,
    max_degree: usize,
    memo: LdimMemo,
    experts: Vec<Expert>,
    all_positive: Hypothesis,
    cached: Option<ClassifierDistribution>,
    last_exploration: Option<ExplorationRecord>,
    realizable_cache: Option<(usize, bool)>,
}

impl ExpertMix {
    pub fn new(
        graph: Arc<ManipulationGraph>,
        class: Arc<HypothesisClass>,
        horizon: usize,
    ) -> Result<Self> {
        check_compatible(&graph, &class)?;
        let mistake_bound = class.ldim_full();
        let max_degree = graph.max_degree();
        Self::with_probability(
            graph,
            class,
            expert_mix_probability(mistake_bound, max_degree, horizon),
        )
    }

    pub fn with_probability(
        graph: Arc<ManipulationGraph>,
        class: Arc<HypothesisClass>,
        p: f64,
    ) -> Result<Self> {
        check_compatible(&graph, &class)?;
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::InvalidParameter(format!(
                "exploration probability {p}"
            )));
        }
        let mut memo = LdimMemo::new(&class);
        let mistake_bound = memo
            .ldim(&class, &(0..class.len() as u32).collect::<Vec<_>>())
            .unwrap_or(0);
        let root = SoaState::new(Arc::clone(&class));
        let deployed = root.hypothesis_with(&mut memo)?;
        Ok(ExpertMix {
            all_positive: Hypothesis::all_positive(graph.vertex_count()),
            max_degree: graph.max_degree(),
            p,
            mistake_bound,
            memo,
            experts: vec![Expert {
                soa: root,
                deployed,
                weight: 1.0,
                factors: Vec::new(),
                merged: false,
            }],
            graph,
            class,
            cached: None,
            last_exploration: None,
            realizable_cache: None,
        })
    }

    pub fn exploration_probability(&self) -> f64 {
        self.p
    }

    pub fn mistake_bound(&self) -> u32 {
        self.mistake_bound
    }

    pub fn max_degree(&self) -> usize {
        self.max_degree
    }

    pub fn experts(&self) -> &[Expert] {
        &self.experts
    }

    pub fn total_weight(&self) -> f64 {
        self.experts.iter().map(|e| e.weight).sum()
    }

    pub fn last_exploration(&self) -> Option<ExplorationRecord> {
        self.last_exploration
    }

    fn errs(&self, h: &Hypothesis, x: VertexId, y: Label) -> bool {
        self.graph.strategic_loss_unchecked(h, x, y) == 1
    }

    fn spawn(
        &mut self,
        parent: &Expert,
        x: VertexId,
        y: Label,
        weight: f64,
        factor: f64,
    ) -> Result<Option<Expert>> {
        let soa = match parent.soa.feed(x, y) {
            Ok(s) => s,
            Err(Error::EmptyVersionSpace) => return Ok(None),
            Err(e) => return Err(e),
        };
        let deployed = soa.hypothesis_with(&mut self.memo)?;
        let mut factors = parent.factors.clone();
        factors.push(factor);
        Ok(Some(Expert {
            soa,
            deployed,
            weight,
            factors,
            merged: parent.merged,
        }))
    }

    fn explore(&mut self, x_t: VertexId, y: Label) -> Result<()> {
        let neighborhood = self.graph.closed_neighborhood(x_t)?;
        let total_before = self.total_weight();
        let mut erring_weight = 0.0;
        let old = std::mem::take(&mut self.experts);
        let mut next: Vec<Expert> = Vec::with_capacity(old.len());
        for e in old {
            if !self.errs(&e.deployed, x_t, y) {
                next.push(e);
                continue;
            }
            erring_weight += e.weight;
            let mut children = Vec::new();
            match y {
                Label::Neg => {
                    for &x in neighborhood
                        .iter()
                        .filter(|&&x| e.deployed.label(x).is_positive())
                    {
                        if let Some(c) = self.spawn(&e, x, Label::Neg, e.weight / 2.0, 0.5)? {
                            children.push(c);
                            break;
                        }
                    }
                }
                Label::Pos => {
                    let mut feeds = Vec::new();
                    for &x in &neighborhood {
                        if let Ok(s) = e.soa.feed(x, Label::Pos) {
                            feeds.push((x, s));
                        }
                    }
                    let k = feeds.len() as f64;
                    for (x, _) in feeds {
                        let f = 1.0 / (2.0 * k);
                        if let Some(c) = self.spawn(&e, x, Label::Pos, e.weight * f, f)? {
                            children.push(c);
                        }
                    }
                }
            }
            if children.is_empty() {
                let mut stalled = e;
                stalled.weight /= 2.0;
                stalled.factors.push(0.5);
                next.push(stalled);
            } else {
                next.extend(children);
            }
        }
        self.experts = merge_duplicates(next);
        self.last_exploration = Some(ExplorationRecord {
            total_before,
            erring_weight,
            total_after: self.total_weight(),
        });
        self.cached = None;
        self.realizable_cache = None;
        Ok(())
    }

    /// Replays the SOA from scratch over `history` and reports whether every
    /// pair was a mistake.
    fn forces_mistakes(&mut self, history: &[(VertexId, Label)]) -> bool {
        let mut s = SoaState::new(Arc::clone(&self.class));
        for &(x, y) in history {
            match s.predict_with(x, &mut self.memo) {
                Ok(pred) if pred != y => {}
                _ => return false,
            }
            s = match s.feed(x, y) {
                Ok(next) => next,
                Err(_) => return false,
            };
        }
        true
    }
}

fn merge_duplicates(experts: Vec<Expert>) -> Vec<Expert> {
    let mut index: HashMap<Vec<(VertexId, Label)>, usize> = HashMap::with_capacity(experts.len());
    let mut out: Vec<Expert> = Vec::with_capacity(experts.len());
    for e in experts {
        match index.get(e.soa.history()) {
            Some(&k) => {
                out[k].weight += e.weight;
                out[k].merged = true;
            }
            None => {
                index.insert(e.soa.history().to_vec(), out.len());
                out.push(e);
            }
        }
    }
    out
}

impl Learner for ExpertMix {
    fn name(&self) -> &'static str {
        "expert_mix"
    }

    fn announce(&mut self) -> Result<&ClassifierDistribution> {
        if self.cached.is_none() {
            let total = self.total_weight();
            let mut atoms = Vec::with_capacity(self.experts.len() + 1);
            if self.p > 0.0 {
                atoms.push(Atom {
                    kind: AtomKind::AllPositive,
                    hypothesis: self.all_positive.clone(),
                    mass: self.p,
                });
            }
            if self.p < 1.0 {
                atoms.extend(self.experts.iter().enumerate().map(|(j, e)| Atom {
                    kind: AtomKind::Expert(j),
                    hypothesis: e.deployed.clone(),
                    mass: (1.0 - self.p) * e.weight / total,
                }));
            }
            self.cached = Some(ClassifierDistribution::new(atoms)?);
        }
        Ok(self.cached.as_ref().expect("just built"))
    }

    fn update(&mut self, sampled: usize, z: VertexId, y: Label) -> Result<()> {
        self.last_exploration = None;
        let kind = self.cached.as_ref().map(|d| d.atom(sampled).kind);
        if kind == Some(AtomKind::AllPositive) {
            self.explore(z, y)?;
        }
        Ok(())
    }

    fn audit(&mut self, ctx: &AuditContext<'_>, log: &mut InvariantLog) {
        if let Some(rec) = self.last_exploration {
            log.record(
                "expert_mix_weight_identity",
                rec.identity_residual() <= WEIGHT_IDENTITY_TOLERANCE,
            );
        }
        log.record(
            "expert_mix_positive_weights",
            self.experts.iter().all(|e| e.weight > 0.0),
        );
        let replay_ok = self.experts.iter().filter(|e| !e.merged).all(|e| {
            let product: f64 = e.factors.iter().product();
            (product - e.weight).abs() <= 1e-12 * e.weight.max(f64::MIN_POSITIVE)
        });
        log.record("expert_mix_weight_replay", replay_ok);
        if let Some(t) = ctx.target {
            if let Some((cached_target, found)) = self.realizable_cache {
                if cached_target == t {
                    log.record("expert_mix_realizable_expert", found);
                    return;
                }
            }
            if self.class.len() <= 64 {
                let candidates: Vec<Vec<(VertexId, Label)>> = self
                    .experts
                    .iter()
                    .filter(|e| e.soa.version().contains(&(t as u32)))
                    .map(|e| e.soa.history().to_vec())
                    .collect();
                let found = candidates.iter().any(|h| self.forces_mistakes(h));
                self.realizable_cache = Some((t, found));
                log.record("expert_mix_realizable_expert", found);
            }
        }
    }
}

/// Plays `h^i` for the current cursor `i` and advances past each member that errs.
pub struct NaiveCursor {
    class: Arc<HypothesisClass>,
    cursor: usize,
    cached: Option<ClassifierDistribution>,
}

impl NaiveCursor {
    pub fn new(class: Arc<HypothesisClass>) -> Self {
        NaiveCursor {
            class,
            cursor: 0,
            cached: None,
        }
    }

    pub fn cursor(&self) -> usize {
        self.cursor
    }

    /// One round of the naive learner: the hypothesis it deploys now, given
    /// whether the previous deployment erred.
    pub fn step(&mut self, previous_erred: bool) -> Result<Hypothesis> {
        if previous_erred {
            self.advance()?;
        }
        Ok(self.class.member(self.cursor).clone())
    }

    fn advance(&mut self) -> Result<()> {
        if self.cursor + 1 >= self.class.len() {
            return Err(Error::EmptyVersionSpace);
        }
        self.cursor += 1;
        self.cached = None;
        Ok(())
    }
}

impl Learner for NaiveCursor {
    fn name(&self) -> &'static str {
        "naive"
    }

    fn announce(&mut self) -> Result<&ClassifierDistribution> {
        if self.cached.is_none() {
            let i = self.cursor;
            self.cached = Some(ClassifierDistribution::point_mass(
                AtomKind::Member(i),
                self.class.member(i).clone(),
            ));
        }
        Ok(self.cached.as_ref().expect("just built"))
    }

    fn update(&mut self, _sampled: usize, z: VertexId, y: Label) -> Result<()> {
        if self.class.member(self.cursor).label(z) != y {
            self.advance()?;
        }
        Ok(())
    }
}

/// Uniform-Mix when `sqrt(T ln n) <= n`, the naive cursor otherwise.
pub enum CombinedMin {
    UniformMix(UniformMix),
    Naive(NaiveCursor),
}

impl CombinedMin {
    pub fn new(
        graph: Arc<ManipulationGraph>,
        class: Arc<HypothesisClass>,
        horizon: usize,
    ) -> Result<Self> {
        let n = class.len() as f64;
        if (horizon as f64 * n.ln()).sqrt() <= n {
            Ok(CombinedMin::UniformMix(UniformMix::new(
                graph, class, horizon,
            )?))
        } else {
            check_compatible(&graph, &class)?;
            Ok(CombinedMin::Naive(NaiveCursor::new(class)))
        }
    }

    fn inner(&mut self) -> &mut dyn Learner {
        match self {
            CombinedMin::UniformMix(l) => l,
            CombinedMin::Naive(l) => l,
        }
    }
}

impl Learner for CombinedMin {
    fn name(&self) -> &'static str {
        "combined"
    }

    fn announce(&mut self) -> Result<&ClassifierDistribution> {
        self.inner().announce()
    }

    fn update(&mut self, sampled: usize, z: VertexId, y: Label) -> Result<()> {
        self.inner().update(sampled, z, y)
    }

    fn audit(&mut self, ctx: &AuditContext<'_>, log: &mut InvariantLog) {
        self.inner().audit(ctx, log)
    }
}

pub(crate) fn check_compatible(graph: &ManipulationGraph, class: &HypothesisClass) -> Result<()> {
    if graph.vertex_count() != class.vertex_count() {
        return Err(Error::LengthMismatch {
            expected: graph.vertex_count(),
            got: class.vertex_count(),
        });
    }
    Ok(())
}
