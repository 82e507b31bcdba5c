//! Instance builders and adversary strategies.
//!
//! Lower-bound layout on `n` pairs, 0-based ids:
//! `p_k = k − 1`, `u_k = n + k − 1` (k = 1..=n), `L = 2n`, `R = 2n + 1`,
//! `z = 2n + 2`. `u_i` is adjacent to every `p_j` with `j ≠ i` and to `L`;
//! `R` is adjacent to every `p_j` and to `z`. The `p` layer comes first so the
//! smallest-id tie-break picks the smallest `p` index.

use std::sync::Arc;

use rand::{Rng, RngCore};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{ManipulationGraph, VertexId};
use crate::hypothesis::{Hypothesis, HypothesisClass, Label};
use crate::learner::{Atom, AtomKind, ClassifierDistribution, InvariantLog, MASS_TOLERANCE};
use crate::realizable::check_compatible;

/// Vertex ids of one lower-bound gadget, possibly shifted inside a larger graph.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Figure1Layout {
    n: usize,
    offset: usize,
}

impl Figure1Layout {
    pub fn new(n: usize) -> Result<Self> {
        Self::at_offset(n, 0)
    }

    pub fn at_offset(n: usize, offset: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidParameter(format!(
                "lower-bound gadget needs n >= 2, got {n}"
            )));
        }
        Ok(Figure1Layout { n, offset })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn offset(&self) -> usize {
        self.offset
    }

    /// Vertices in one gadget: `2n + 3`.
    pub fn vertex_count(&self) -> usize {
        2 * self.n + 3
    }

    /// `p_k`, 1-based.
    pub fn p(&self, k: usize) -> VertexId {
        debug_assert!((1..=self.n).contains(&k));
        self.offset + k - 1
    }

    /// `u_k`, 1-based.
    pub fn u(&self, k: usize) -> VertexId {
        debug_assert!((1..=self.n).contains(&k));
        self.offset + self.n + k - 1
    }

    pub fn l(&self) -> VertexId {
        self.offset + 2 * self.n
    }

    pub fn r(&self) -> VertexId {
        self.offset + 2 * self.n + 1
    }

    pub fn z(&self) -> VertexId {
        self.offset + 2 * self.n + 2
    }

    /// The gadget graph alone (ids start at 0 regardless of the offset).
    pub fn graph(&self) -> ManipulationGraph {
        let local = Figure1Layout {
            n: self.n,
            offset: 0,
        };
        let mut edges = Vec::with_capacity(self.n * (self.n + 1) + 1);
        for i in 1..=self.n {
            for j in 1..=self.n {
                if i != j {
                    edges.push((local.u(i), local.p(j)));
                }
            }
            edges.push((local.l(), local.u(i)));
            edges.push((local.r(), local.p(i)));
        }
        edges.push((local.z(), local.r()));
        ManipulationGraph::from_edges(local.vertex_count(), &edges).expect("valid gadget")
    }

    /// `h^k` on the gadget alone: positive exactly on `p_k`.
    pub fn singleton(&self, k: usize) -> Hypothesis {
        let local = Figure1Layout {
            n: self.n,
            offset: 0,
        };
        Hypothesis::positive_on(self.vertex_count(), &[local.p(k)])
    }

    /// Smallest `k` with `f(p_k) = +1`.
    pub fn first_positive_p(&self, f: &Hypothesis) -> Option<usize> {
        (1..=self.n).find(|&k| f.label(self.p(k)).is_positive())
    }

    /// True iff `f` restricted to this gadget equals `h^k`.
    pub fn restricts_to_singleton(&self, f: &Hypothesis, k: usize) -> bool {
        (0..self.vertex_count()).all(|v| f.label(self.offset + v).is_positive() == (v == k - 1))
    }
}

/// Membership in the three "bad" sets of the lower-bound argument.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct SetFlags {
    pub a: bool,
    pub b: bool,
    pub c: bool,
}

impl SetFlags {
    /// Not in `A ∪ B ∪ C`.
    pub fn is_good(&self) -> bool {
        !(self.a || self.b || self.c)
    }
}

pub fn classify_sets(f: &Hypothesis, layout: &Figure1Layout) -> SetFlags {
    let pos = |v: VertexId| f.label(v).is_positive();
    let a = pos(layout.l()) || (1..=layout.n()).any(|i| pos(layout.u(i)));
    let b = pos(layout.r()) || pos(layout.z());
    let c = !b && (1..=layout.n()).all(|k| !pos(layout.p(k)));
    SetFlags { a, b, c }
}

/// Which rule the general adversary fired.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AdversaryCase {
    PunishA,
    PunishB,
    PunishC,
    Hidden,
}

/// An agent generator. Adversaries that read the announced distribution see
/// it before the classifier is sampled.
pub trait Adversary {
    fn name(&self) -> &'static str;

    fn reads_distribution(&self) -> bool;

    fn next_agent(
        &mut self,
        round: usize,
        announced: &ClassifierDistribution,
        rng: &mut dyn RngCore,
    ) -> Result<(VertexId, Label)>;

    /// Class member that realizes every emitted sequence, if any.
    fn target(&self) -> Option<usize> {
        None
    }

    /// Hidden indices (1-based, one per gadget) drawn at construction.
    fn hidden(&self) -> Vec<usize> {
        Vec::new()
    }

    /// God-view checks after the agent has responded to the sampled atom.
    fn audit(&mut self, _sampled: &Atom, _z: VertexId, _loss: u8, _log: &mut InvariantLog) {}
}

/// Plays `(u_{i*}, −1)` every round.
pub struct ProperAdversary {
    layout: Figure1Layout,
    hidden: usize,
    target: Option<usize>,
}

impl ProperAdversary {
    pub fn new(layout: Figure1Layout, class: &HypothesisClass, rng: &mut dyn RngCore) -> Self {
        let hidden = rng.gen_range(1..=layout.n());
        Self::with_hidden(layout, class, hidden)
    }

    pub fn with_hidden(layout: Figure1Layout, class: &HypothesisClass, hidden: usize) -> Self {
        let target = class
            .members()
            .iter()
            .position(|h| layout.restricts_to_singleton(h, hidden));
        ProperAdversary {
            layout,
            hidden,
            target,
        }
    }
}

impl Adversary for ProperAdversary {
    fn name(&self) -> &'static str {
        "proper"
    }

    fn reads_distribution(&self) -> bool {
        false
    }

    fn next_agent(
        &mut self,
        _: usize,
        _: &ClassifierDistribution,
        _: &mut dyn RngCore,
    ) -> Result<(VertexId, Label)> {
        Ok((self.layout.u(self.hidden), Label::Neg))
    }

    fn target(&self) -> Option<usize> {
        self.target
    }

    fn hidden(&self) -> Vec<usize> {
        vec![self.hidden]
    }
}

struct Gadget {
    layout: Figure1Layout,
    hidden: usize,
    /// Flags of class member `i` on this gadget.
    member_flags: Vec<SetFlags>,
}

#[derive(Debug, Clone, Copy)]
struct CaseFacts {
    case: AdversaryCase,
    gadget: usize,
    x: VertexId,
    y: Label,
    erring_mass: f64,
}

/// The distribution-reading lower-bound adversary, run independently on each
/// of `d` gadgets for consecutive blocks of `⌈T/d⌉` rounds.
pub struct GeneralAdversary {
    graph: Arc<ManipulationGraph>,
    gadgets: Vec<Gadget>,
    block: usize,
    gamma: f64,
    target: Option<usize>,
    last: Option<CaseFacts>,
    case_counts: [u64; 4],
}

impl GeneralAdversary {
    /// `γ = gamma_scale / sqrt(⌈T/d⌉)`; hidden indices drawn from `rng`.
    pub fn new(
        graph: Arc<ManipulationGraph>,
        class: &HypothesisClass,
        layouts: &[Figure1Layout],
        horizon: usize,
        gamma_scale: f64,
        rng: &mut dyn RngCore,
    ) -> Result<Self> {
        let hidden: Vec<usize> = layouts.iter().map(|l| rng.gen_range(1..=l.n())).collect();
        Self::with_hidden(graph, class, layouts, horizon, gamma_scale, &hidden)
    }

    pub fn with_hidden(
        graph: Arc<ManipulationGraph>,
        class: &HypothesisClass,
        layouts: &[Figure1Layout],
        horizon: usize,
        gamma_scale: f64,
        hidden: &[usize],
    ) -> Result<Self> {
        check_compatible(&graph, class)?;
        if layouts.is_empty() || layouts.len() != hidden.len() {
            return Err(Error::InvalidParameter(
                "one hidden index per gadget required".into(),
            ));
        }
        if horizon == 0 {
            return Err(Error::InvalidParameter("T must be at least 1".into()));
        }
        for l in layouts {
            if l.offset() + l.vertex_count() > graph.vertex_count() {
                return Err(Error::Incompatible(
                    "gadget does not fit in the graph".into(),
                ));
            }
        }
        let block = horizon.div_ceil(layouts.len());
        let gamma = gamma_scale / (block as f64).sqrt();
        if !(gamma > 0.0 && gamma <= 1.0) {
            return Err(Error::InvalidParameter(format!(
                "gamma = {gamma} outside (0, 1]"
            )));
        }
        let gadgets: Vec<Gadget> = layouts
            .iter()
            .zip(hidden)
            .map(|(&layout, &hidden)| Gadget {
                layout,
                hidden,
                member_flags: class
                    .members()
                    .iter()
                    .map(|h| classify_sets(h, &layout))
                    .collect(),
            })
            .collect();
        let target = class.members().iter().position(|h| {
            gadgets
                .iter()
                .all(|g| g.layout.restricts_to_singleton(h, g.hidden))
        });
        Ok(GeneralAdversary {
            graph,
            gadgets,
            block,
            gamma,
            target,
            last: None,
            case_counts: [0; 4],
        })
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn block_length(&self) -> usize {
        self.block
    }

    /// How often each case fired, in `A, B, C, hidden` order.
    pub fn case_counts(&self) -> [u64; 4] {
        self.case_counts
    }

    pub fn last_case(&self) -> Option<AdversaryCase> {
        self.last.map(|f| f.case)
    }

    fn flags(&self, g: usize, atom: &Atom) -> SetFlags {
        match atom.kind {
            AtomKind::Member(i) => self.gadgets[g].member_flags[i],
            _ => classify_sets(&atom.hypothesis, &self.gadgets[g].layout),
        }
    }
}

impl Adversary for GeneralAdversary {
    fn name(&self) -> &'static str {
        "general"
    }

    fn reads_distribution(&self) -> bool {
        true
    }

    fn next_agent(
        &mut self,
        round: usize,
        announced: &ClassifierDistribution,
        _: &mut dyn RngCore,
    ) -> Result<(VertexId, Label)> {
        let total: f64 = announced.atoms().iter().map(|a| a.mass).sum();
        if (total - 1.0).abs() > MASS_TOLERANCE {
            return Err(Error::InvalidDistribution(format!("masses sum to {total}")));
        }
        let g = (round / self.block).min(self.gadgets.len() - 1);
        let (mut da, mut db, mut dc) = (0.0, 0.0, 0.0);
        for atom in announced.atoms() {
            let f = self.flags(g, atom);
            if f.a {
                da += atom.mass;
            }
            if f.b {
                db += atom.mass;
            }
            if f.c {
                dc += atom.mass;
            }
        }
        let layout = self.gadgets[g].layout;
        let (case, x, y) = if da >= self.gamma {
            (AdversaryCase::PunishA, layout.l(), Label::Neg)
        } else if db >= self.gamma {
            (AdversaryCase::PunishB, layout.z(), Label::Neg)
        } else if dc >= self.gamma {
            (AdversaryCase::PunishC, layout.r(), Label::Pos)
        } else {
            (
                AdversaryCase::Hidden,
                layout.u(self.gadgets[g].hidden),
                Label::Neg,
            )
        };
        let erring_mass = if case == AdversaryCase::Hidden {
            0.0
        } else {
            announced.mass_where(|a| self.graph.strategic_loss_unchecked(&a.hypothesis, x, y) == 1)
        };
        self.case_counts[case as usize] += 1;
        self.last = Some(CaseFacts {
            case,
            gadget: g,
            x,
            y,
            erring_mass,
        });
        Ok((x, y))
    }

    fn target(&self) -> Option<usize> {
        self.target
    }

    fn hidden(&self) -> Vec<usize> {
        self.gadgets.iter().map(|g| g.hidden).collect()
    }

    fn audit(&mut self, sampled: &Atom, z: VertexId, loss: u8, log: &mut InvariantLog) {
        let Some(facts) = self.last else { return };
        if facts.case != AdversaryCase::Hidden {
            log.record(
                "adversary_case_mass",
                facts.erring_mass >= self.gamma - 1e-12,
            );
            return;
        }
        let gadget = &self.gadgets[facts.gadget];
        let flags = self.flags(facts.gadget, sampled);
        if !flags.is_good() {
            return;
        }
        if let Some(k) = gadget.layout.first_positive_p(&sampled.hypothesis) {
            if k != gadget.hidden {
                let trapped = z == gadget.layout.p(k) && loss == 1;
                log.record(
                    "adversary_hidden_trap",
                    trapped && facts.y == Label::Neg && facts.x == gadget.layout.u(gadget.hidden),
                );
            }
        }
    }
}

/// Uniform isolated point with a fair random label each round.
pub struct StochasticAdversary {
    points: Vec<VertexId>,
}

impl StochasticAdversary {
    pub fn new(points: Vec<VertexId>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::InvalidParameter(
                "stochastic adversary needs points".into(),
            ));
        }
        Ok(StochasticAdversary { points })
    }
}

impl Adversary for StochasticAdversary {
    fn name(&self) -> &'static str {
        "stochastic"
    }

    fn reads_distribution(&self) -> bool {
        false
    }

    fn next_agent(
        &mut self,
        _: usize,
        _: &ClassifierDistribution,
        rng: &mut dyn RngCore,
    ) -> Result<(VertexId, Label)> {
        let x = self.points[rng.gen_range(0..self.points.len())];
        Ok((x, Label::from(rng.gen::<bool>())))
    }
}

/// Oblivious realizable sequence: a hidden target member, uniform agent
/// vertices, labels equal to the target's outcome after the best response.
pub struct RandomRealizableAdversary {
    graph: Arc<ManipulationGraph>,
    target_hypothesis: Hypothesis,
    target: usize,
    /// Fixed sequence stream, independent of the trial, when set.
    own_rng: Option<rand_chacha::ChaCha8Rng>,
}

impl RandomRealizableAdversary {
    pub fn new(
        graph: Arc<ManipulationGraph>,
        class: &HypothesisClass,
        sequence_seed: Option<u64>,
        rng: &mut dyn RngCore,
    ) -> Result<Self> {
        use rand::SeedableRng;
        check_compatible(&graph, class)?;
        let mut own_rng = sequence_seed.map(rand_chacha::ChaCha8Rng::seed_from_u64);
        let target = match own_rng.as_mut() {
            Some(r) => r.gen_range(0..class.len()),
            None => rng.gen_range(0..class.len()),
        };
        Ok(RandomRealizableAdversary {
            graph,
            target_hypothesis: class.member(target).clone(),
            target,
            own_rng,
        })
    }
}

impl Adversary for RandomRealizableAdversary {
    fn name(&self) -> &'static str {
        "random_realizable"
    }

    fn reads_distribution(&self) -> bool {
        false
    }

    fn next_agent(
        &mut self,
        _: usize,
        _: &ClassifierDistribution,
        rng: &mut dyn RngCore,
    ) -> Result<(VertexId, Label)> {
        let n = self.graph.vertex_count();
        let x = match self.own_rng.as_mut() {
            Some(r) => r.gen_range(0..n),
            None => rng.gen_range(0..n),
        };
        let z = self
            .graph
            .best_response_unchecked(&self.target_hypothesis, x)
            .landed;
        Ok((x, self.target_hypothesis.label(z)))
    }

    fn target(&self) -> Option<usize> {
        Some(self.target)
    }
}

/// Adversary selection for an instance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum AdversarySpec {
    Proper,
    General {
        #[serde(default = "default_gamma_scale")]
        gamma_scale: f64,
    },
    Stochastic,
    RandomRealizable {
        #[serde(default)]
        sequence_seed: Option<u64>,
    },
}

pub fn default_gamma_scale() -> f64 {
    1.0
}

/// Component the composite instance's adversary plays in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CompositeArm {
    Realizable,
    Stochastic,
}

/// Realizable gadget when `min{n, T} ≥ sqrt(T ln n)`, else the stochastic part.
pub fn composite_arm(n: usize, horizon: usize) -> CompositeArm {
    let realizable = n.min(horizon) as f64;
    let agnostic = (horizon as f64 * (n as f64).ln()).sqrt();
    if realizable >= agnostic {
        CompositeArm::Realizable
    } else {
        CompositeArm::Stochastic
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum InstanceKind {
    Figure1 {
        layout: Figure1Layout,
    },
    DCopies {
        layouts: Vec<Figure1Layout>,
    },
    Composite {
        layout: Figure1Layout,
        points: Vec<VertexId>,
    },
    Stochastic {
        points: Vec<VertexId>,
    },
    Custom,
}

/// A graph, a hypothesis class over its vertices, and what kind of
/// construction produced them.
#[derive(Debug, Clone)]
pub struct Instance {
    pub graph: Arc<ManipulationGraph>,
    pub class: Arc<HypothesisClass>,
    pub kind: InstanceKind,
}

/// On-disk form of an instance.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct InstanceFile {
    pub graph: ManipulationGraph,
    pub class: HypothesisClass,
}

impl Instance {
    pub fn custom(graph: ManipulationGraph, class: HypothesisClass) -> Result<Self> {
        check_compatible(&graph, &class)?;
        Ok(Instance {
            graph: Arc::new(graph),
            class: Arc::new(class),
            kind: InstanceKind::Custom,
        })
    }

    pub fn to_file(&self) -> InstanceFile {
        InstanceFile {
            graph: (*self.graph).clone(),
            class: (*self.class).clone(),
        }
    }

    /// The adversary this instance is built for.
    pub fn default_adversary(&self) -> AdversarySpec {
        match self.kind {
            InstanceKind::Figure1 { .. }
            | InstanceKind::DCopies { .. }
            | InstanceKind::Composite { .. } => AdversarySpec::General {
                gamma_scale: default_gamma_scale(),
            },
            InstanceKind::Stochastic { .. } => AdversarySpec::Stochastic,
            InstanceKind::Custom => AdversarySpec::RandomRealizable {
                sequence_seed: None,
            },
        }
    }

    /// Builds a per-trial adversary; construction-time draws use `rng`.
    pub fn adversary(
        &self,
        spec: AdversarySpec,
        horizon: usize,
        rng: &mut dyn RngCore,
    ) -> Result<Box<dyn Adversary>> {
        let incompatible = |what: &str| {
            Error::Incompatible(format!("{what} adversary does not fit this instance"))
        };
        match (spec, &self.kind) {
            (AdversarySpec::Proper, InstanceKind::Figure1 { layout }) => {
                Ok(Box::new(ProperAdversary::new(*layout, &self.class, rng)))
            }
            (AdversarySpec::Proper, _) => Err(incompatible("proper")),
            (AdversarySpec::General { gamma_scale }, InstanceKind::Figure1 { layout }) => {
                Ok(Box::new(GeneralAdversary::new(
                    Arc::clone(&self.graph),
                    &self.class,
                    &[*layout],
                    horizon,
                    gamma_scale,
                    rng,
                )?))
            }
            (AdversarySpec::General { gamma_scale }, InstanceKind::DCopies { layouts }) => {
                Ok(Box::new(GeneralAdversary::new(
                    Arc::clone(&self.graph),
                    &self.class,
                    layouts,
                    horizon,
                    gamma_scale,
                    rng,
                )?))
            }
            (
                AdversarySpec::General { gamma_scale },
                InstanceKind::Composite { layout, points },
            ) => match composite_arm(layout.n(), horizon) {
                CompositeArm::Realizable => Ok(Box::new(GeneralAdversary::new(
                    Arc::clone(&self.graph),
                    &self.class,
                    &[*layout],
                    horizon,
                    gamma_scale,
                    rng,
                )?)),
                CompositeArm::Stochastic => Ok(Box::new(StochasticAdversary::new(points.clone())?)),
            },
            (AdversarySpec::General { .. }, _) => Err(incompatible("general")),
            (AdversarySpec::Stochastic, InstanceKind::Stochastic { points })
            | (AdversarySpec::Stochastic, InstanceKind::Composite { points, .. }) => {
                Ok(Box::new(StochasticAdversary::new(points.clone())?))
            }
            (AdversarySpec::Stochastic, _) => Ok(Box::new(StochasticAdversary::new(
                (0..self.graph.vertex_count()).collect(),
            )?)),
            (AdversarySpec::RandomRealizable { sequence_seed }, _) => {
                Ok(Box::new(RandomRealizableAdversary::new(
                    Arc::clone(&self.graph),
                    &self.class,
                    sequence_seed,
                    rng,
                )?))
            }
        }
    }
}

pub fn build_figure1(n: usize) -> Result<Instance> {
    let layout = Figure1Layout::new(n)?;
    Ok(Instance {
        graph: Arc::new(layout.graph()),
        class: Arc::new(HypothesisClass::figure1(n)?),
        kind: InstanceKind::Figure1 { layout },
    })
}

/// `d` disjoint gadgets with the product class of size `n^d`.
pub fn build_d_copies(n: usize, d: usize) -> Result<Instance> {
    if d == 1 {
        return build_figure1(n);
    }
    let base = build_figure1(n)?;
    let class = base.class.product_copies(d)?;
    let mut graph = (*base.graph).clone();
    for _ in 1..d {
        graph = graph.disjoint_union(&base.graph);
    }
    let width = 2 * n + 3;
    let layouts = (0..d)
        .map(|c| Figure1Layout::at_offset(n, c * width))
        .collect::<Result<Vec<_>>>()?;
    Ok(Instance {
        graph: Arc::new(graph),
        class: Arc::new(class),
        kind: InstanceKind::DCopies { layouts },
    })
}

/// `⌈log2 n⌉`, at least 1.
pub fn agnostic_points(n: usize) -> usize {
    (usize::BITS - (n.max(2) - 1).leading_zeros()) as usize
}

/// Edgeless `m`-point domain, `m = ⌈log2 n⌉`, with the first `n` labelings.
pub fn build_stochastic(n: usize) -> Result<Instance> {
    if n < 2 {
        return Err(Error::InvalidParameter(format!(
            "stochastic instance needs n >= 2, got {n}"
        )));
    }
    let m = agnostic_points(n);
    let points: Vec<VertexId> = (0..m).collect();
    Ok(Instance {
        graph: Arc::new(ManipulationGraph::edgeless(m)?),
        class: Arc::new(HypothesisClass::first_labelings(m, &points, n)?),
        kind: InstanceKind::Stochastic { points },
    })
}

/// Gadget on `n` pairs next to an edgeless `⌈log2 n⌉`-point domain; member
/// `i` is `h^{i+1}` on the gadget joined with the `i`-th labeling.
pub fn build_agnostic_composite(n: usize) -> Result<Instance> {
    let gadget = build_figure1(n)?;
    let side = build_stochastic(n)?;
    let graph = gadget.graph.disjoint_union(&side.graph);
    let class = HypothesisClass::union_extend(&gadget.class, &side.class)?;
    let layout = Figure1Layout::new(n)?;
    let offset = layout.vertex_count();
    let points = (0..side.graph.vertex_count()).map(|v| v + offset).collect();
    Ok(Instance {
        graph: Arc::new(graph),
        class: Arc::new(class),
        kind: InstanceKind::Composite { layout, points },
    })
}

/// Erdős–Rényi graph with maximum degree capped at `max_degree` (edges that
/// would exceed it are skipped) and `members` distinct random labelings.
pub fn build_random(
    vertices: usize,
    edge_probability: f64,
    max_degree: usize,
    members: usize,
    rng: &mut dyn RngCore,
) -> Result<Instance> {
    if vertices == 0 || members == 0 {
        return Err(Error::InvalidParameter(
            "random instance needs vertices and members".into(),
        ));
    }
    if !(0.0..=1.0).contains(&edge_probability) {
        return Err(Error::InvalidParameter(format!(
            "edge probability {edge_probability}"
        )));
    }
    if vertices < 63 && members as u64 > 1u64 << vertices {
        return Err(Error::InvalidParameter(format!(
            "{members} distinct labelings of {vertices} vertices"
        )));
    }
    let mut degree = vec![0usize; vertices];
    let mut edges = Vec::new();
    for a in 0..vertices {
        for b in a + 1..vertices {
            if rng.gen_bool(edge_probability) && degree[a] < max_degree && degree[b] < max_degree {
                degree[a] += 1;
                degree[b] += 1;
                edges.push((a, b));
            }
        }
    }
    let graph = ManipulationGraph::from_edges(vertices, &edges)?;
    let mut seen = std::collections::HashSet::new();
    let mut list = Vec::with_capacity(members);
    while list.len() < members {
        let labels: Vec<Label> = (0..vertices)
            .map(|_| Label::from(rng.gen::<bool>()))
            .collect();
        if seen.insert(labels.clone()) {
            list.push(Hypothesis::from_labels(labels));
        }
    }
    Instance::custom(graph, HypothesisClass::new(list)?)
}
