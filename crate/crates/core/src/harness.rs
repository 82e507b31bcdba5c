//! Seeded execution of the learner/agent interaction, god-view accounting,
//! multi-trial statistics, sweeps and the invariant suite.

use std::path::PathBuf;
use std::sync::Arc;

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::adversary::{self, Adversary, AdversarySpec, Instance, InstanceFile};
use crate::agnostic::{self, Exp3, ExploreHedge, Ftrl, FtrlParams};
use crate::error::{Error, Result};
use crate::graph::VertexId;
use crate::hypothesis::{Hypothesis, Label};
use crate::learner::{AtomKind, AuditContext, InvariantLog, Learner};
use crate::realizable::{self, CombinedMin, ExpertMix, NaiveCursor, UniformMix};

/// Version of the CSV and JSON output layouts.
pub const SCHEMA_VERSION: u32 = 1;

const LEARNER_STREAM: u64 = 0;
const ADVERSARY_STREAM: u64 = 1;

/// Independent generators for one trial.
pub struct TrialRngs {
    pub learner: ChaCha8Rng,
    pub adversary: ChaCha8Rng,
}

impl TrialRngs {
    /// Streams derived from `base_seed + trial`.
    pub fn new(base_seed: u64, trial: usize) -> Self {
        let seed = base_seed.wrapping_add(trial as u64);
        let mut learner = ChaCha8Rng::seed_from_u64(seed);
        learner.set_stream(LEARNER_STREAM);
        let mut adversary = ChaCha8Rng::seed_from_u64(seed);
        adversary.set_stream(ADVERSARY_STREAM);
        TrialRngs { learner, adversary }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RoundRecord {
    pub t: usize,
    pub x: VertexId,
    pub y: Label,
    pub support: usize,
    pub sampled: AtomKind,
    pub deployed: Vec<Label>,
    pub z: VertexId,
    pub prediction: Label,
    pub loss: u8,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialResult {
    pub trial: usize,
    pub seed: u64,
    pub hidden: Vec<usize>,
    pub target: Option<usize>,
    pub total_mistakes: u64,
    pub per_hypothesis_loss: Vec<u64>,
    pub regret: i64,
    /// Same regret recomputed from shifted losses.
    pub shifted_regret: i64,
    pub invariants: InvariantLog,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rounds: Option<Vec<RoundRecord>>,
}

/// One interaction of `horizon` rounds.
pub fn run_protocol(
    instance: &Instance,
    learner: &mut dyn Learner,
    adversary: &mut dyn Adversary,
    horizon: usize,
    rngs: &mut TrialRngs,
    emit_rounds: bool,
) -> Result<TrialResult> {
    let graph = &*instance.graph;
    let class = &*instance.class;
    let v = graph.vertex_count();
    let target = adversary.target();
    let mut log = InvariantLog::default();
    // agents seen, indexed by 2x + [y = +1]
    let mut agent_counts = vec![0u64; 2 * v];
    let mut mistakes = 0u64;
    let mut learner_shifted = 0i64;
    let mut rounds = emit_rounds.then(|| Vec::with_capacity(horizon));

    for t in 0..horizon {
        let dist = learner.announce()?;
        let (x, y) = adversary.next_agent(t, dist, &mut rngs.adversary)?;
        if x >= v {
            return Err(Error::InvalidVertex {
                vertex: x,
                vertex_count: v,
            });
        }
        let k = dist.sample(rngs.learner.gen::<f64>());
        let support = dist.support_size();
        let atom = dist.atom(k).clone();
        let h = &atom.hypothesis;
        let z = graph.best_response_unchecked(h, x).landed;
        let prediction = h.label(z);
        let loss = u8::from(prediction != y);
        mistakes += u64::from(loss);
        if graph.labels_all_negative_unchecked(h, x) {
            learner_shifted += if y.is_positive() { 1 } else { -1 };
        }
        agent_counts[2 * x + usize::from(y.is_positive())] += 1;

        learner.update(k, z, y)?;
        let ctx = AuditContext {
            graph,
            class,
            target,
            true_x: x,
            true_y: y,
        };
        learner.audit(&ctx, &mut log);
        adversary.audit(&atom, z, loss, &mut log);

        if let Some(r) = rounds.as_mut() {
            r.push(RoundRecord {
                t,
                x,
                y,
                support,
                sampled: atom.kind,
                deployed: h.labels().to_vec(),
                z,
                prediction,
                loss,
            });
        }
    }

    let mut per_hypothesis_loss = vec![0u64; class.len()];
    let mut per_hypothesis_shifted = vec![0i64; class.len()];
    for x in 0..v {
        for (yi, y) in [Label::Neg, Label::Pos].into_iter().enumerate() {
            let count = agent_counts[2 * x + yi];
            if count == 0 {
                continue;
            }
            for (i, h) in class.members().iter().enumerate() {
                per_hypothesis_loss[i] +=
                    count * u64::from(graph.strategic_loss_unchecked(h, x, y));
                if graph.labels_all_negative_unchecked(h, x) {
                    per_hypothesis_shifted[i] +=
                        count as i64 * if y.is_positive() { 1 } else { -1 };
                }
            }
        }
    }
    let best = per_hypothesis_loss.iter().copied().min().unwrap_or(0);
    let best_shifted = per_hypothesis_shifted.iter().copied().min().unwrap_or(0);
    let regret = mistakes as i64 - best as i64;
    let shifted_regret = learner_shifted - best_shifted;
    log.record("shift_invariance", regret == shifted_regret);
    if let Some(i) = target {
        log.record("adversary_realizable", per_hypothesis_loss[i] == 0);
    }

    Ok(TrialResult {
        trial: 0,
        seed: 0,
        hidden: adversary.hidden(),
        target,
        total_mistakes: mistakes,
        per_hypothesis_loss,
        regret,
        shifted_regret,
        invariants: log,
        rounds,
    })
}

/// Recomputes landed vertex, prediction and loss of every record.
pub fn replay_consistent(instance: &Instance, records: &[RoundRecord]) -> bool {
    records.iter().all(|r| {
        let h = Hypothesis::from_labels(r.deployed.clone());
        if h.len() != instance.graph.vertex_count() || r.x >= h.len() {
            return false;
        }
        let z = instance.graph.best_response_unchecked(&h, r.x).landed;
        let prediction = h.label(z);
        z == r.z && prediction == r.prediction && r.loss == u8::from(prediction != r.y)
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Execution {
    #[default]
    Parallel,
    Sequential,
}

/// Runs `trials` independent trials; results come back in trial order.
pub fn run_trials<F>(trials: usize, execution: Execution, run: F) -> Result<Vec<TrialResult>>
where
    F: Fn(usize) -> Result<TrialResult> + Sync + Send,
{
    match execution {
        #[cfg(feature = "parallel")]
        Execution::Parallel => {
            use rayon::prelude::*;
            (0..trials).into_par_iter().map(run).collect()
        }
        _ => (0..trials).map(run).collect(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Stats {
    pub mean: f64,
    /// Standard error of the mean (0 for a single value).
    pub se: f64,
    pub min: f64,
    pub max: f64,
}

impl Stats {
    pub fn of(values: &[f64]) -> Stats {
        let n = values.len() as f64;
        let mean = values.iter().sum::<f64>() / n;
        let se = if values.len() > 1 {
            let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
            (var / n).sqrt()
        } else {
            0.0
        };
        let min = values.iter().copied().fold(f64::INFINITY, f64::min);
        let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        Stats { mean, se, min, max }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "builder", rename_all = "snake_case")]
pub enum InstanceSpec {
    Figure1 {
        n: usize,
    },
    DCopies {
        n: usize,
        d: usize,
    },
    Composite {
        n: usize,
    },
    Stochastic {
        n: usize,
    },
    Random {
        vertices: usize,
        edge_probability: f64,
        max_degree: usize,
        members: usize,
        #[serde(default)]
        seed: u64,
    },
    File {
        path: PathBuf,
    },
}

impl InstanceSpec {
    pub fn build(&self) -> Result<Instance> {
        match self {
            InstanceSpec::Figure1 { n } => adversary::build_figure1(*n),
            InstanceSpec::DCopies { n, d } => adversary::build_d_copies(*n, *d),
            InstanceSpec::Composite { n } => adversary::build_agnostic_composite(*n),
            InstanceSpec::Stochastic { n } => adversary::build_stochastic(*n),
            InstanceSpec::Random {
                vertices,
                edge_probability,
                max_degree,
                members,
                seed,
            } => {
                let mut rng = ChaCha8Rng::seed_from_u64(*seed);
                adversary::build_random(
                    *vertices,
                    *edge_probability,
                    *max_degree,
                    *members,
                    &mut rng,
                )
            }
            InstanceSpec::File { path } => {
                let text = std::fs::read_to_string(path)
                    .map_err(|e| Error::InvalidParameter(format!("{}: {e}", path.display())))?;
                let file: InstanceFile = serde_json::from_str(&text)
                    .map_err(|e| Error::InvalidParameter(format!("{}: {e}", path.display())))?;
                Instance::custom(file.graph, file.class)
            }
        }
    }

    /// Copy with a sweep axis set to `value`.
    pub fn with_axis(&self, axis: SweepAxis, value: usize) -> Result<InstanceSpec> {
        let mut spec = self.clone();
        let bad = || Error::Incompatible(format!("axis {axis:?} does not apply to this instance"));
        match (axis, &mut spec) {
            (SweepAxis::N, InstanceSpec::Figure1 { n })
            | (SweepAxis::N, InstanceSpec::DCopies { n, .. })
            | (SweepAxis::N, InstanceSpec::Composite { n })
            | (SweepAxis::N, InstanceSpec::Stochastic { n }) => *n = value,
            (SweepAxis::N, InstanceSpec::Random { members, .. }) => *members = value,
            (SweepAxis::D, InstanceSpec::DCopies { d, .. }) => *d = value,
            (SweepAxis::T, _) => {}
            _ => return Err(bad()),
        }
        Ok(spec)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "snake_case")]
pub enum LearnerSpec {
    UniformMix,
    ExpertMix {
        #[serde(default)]
        p: Option<f64>,
    },
    Naive,
    CombinedMin,
    Ftrl {
        #[serde(default)]
        eta: Option<f64>,
        #[serde(default)]
        nu: Option<f64>,
        #[serde(default)]
        epsilon: Option<f64>,
    },
    Exp3 {
        #[serde(default)]
        rate: Option<f64>,
    },
    ExploreHedge {
        #[serde(default)]
        rho: Option<f64>,
        #[serde(default)]
        rate: Option<f64>,
    },
}

impl LearnerSpec {
    pub fn build(&self, instance: &Instance, horizon: usize) -> Result<Box<dyn Learner>> {
        let g = Arc::clone(&instance.graph);
        let c = Arc::clone(&instance.class);
        let n = c.len();
        Ok(match self {
            LearnerSpec::UniformMix => Box::new(UniformMix::new(g, c, horizon)?),
            LearnerSpec::ExpertMix { p: None } => Box::new(ExpertMix::new(g, c, horizon)?),
            LearnerSpec::ExpertMix { p: Some(p) } => {
                Box::new(ExpertMix::with_probability(g, c, *p)?)
            }
            LearnerSpec::Naive => Box::new(NaiveCursor::new(c)),
            LearnerSpec::CombinedMin => Box::new(CombinedMin::new(g, c, horizon)?),
            LearnerSpec::Ftrl { eta, nu, epsilon } => {
                let d = FtrlParams::defaults(n, horizon);
                let params = FtrlParams {
                    eta: eta.unwrap_or(d.eta),
                    nu: nu.unwrap_or(d.nu),
                    epsilon: epsilon.unwrap_or(d.epsilon),
                };
                Box::new(Ftrl::with_params(g, c, params)?)
            }
            LearnerSpec::Exp3 { rate } => Box::new(Exp3::with_rate(
                c,
                rate.unwrap_or_else(|| agnostic::exp3_rate(n, horizon)),
            )),
            LearnerSpec::ExploreHedge { rho, rate } => {
                let rho = rho.unwrap_or_else(|| agnostic::explore_rho(horizon));
                let rate = rate.unwrap_or_else(|| agnostic::hedge_rate(n, rho, horizon));
                Box::new(ExploreHedge::with_params(g, c, rho, rate)?)
            }
        })
    }

    /// The learner's guarantee at this point, where one is known.
    pub fn bound(&self, instance: &Instance, horizon: usize) -> Option<f64> {
        let n = instance.class.len();
        match self {
            LearnerSpec::UniformMix => Some(realizable::uniform_mix_bound(n, horizon)),
            LearnerSpec::ExpertMix { p: None } => Some(realizable::expert_mix_bound(
                instance.class.ldim_full(),
                instance.graph.max_degree(),
                horizon,
            )),
            LearnerSpec::Ftrl {
                eta: None,
                nu: None,
                epsilon: None,
            } => Some(agnostic::ftrl_bound(n, horizon)),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub instance: InstanceSpec,
    pub learner: LearnerSpec,
    #[serde(default)]
    pub adversary: Option<AdversarySpec>,
    #[serde(rename = "T")]
    pub horizon: usize,
    pub trials: usize,
    pub seed: u64,
    #[serde(default)]
    pub emit_rounds: bool,
    #[serde(default)]
    pub out: Option<PathBuf>,
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.horizon == 0 {
            return Err(Error::InvalidParameter("T must be at least 1".into()));
        }
        if self.trials == 0 {
            return Err(Error::InvalidParameter("trials must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub trials: usize,
    pub mistakes: Stats,
    pub regret: Stats,
    pub bound: Option<f64>,
    pub invariants: InvariantLog,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub schema_version: u32,
    pub config: ExperimentConfig,
    pub summary: Summary,
    pub results: Vec<TrialResult>,
}

pub fn summarize(results: &[TrialResult], bound: Option<f64>) -> Summary {
    let mistakes: Vec<f64> = results.iter().map(|r| r.total_mistakes as f64).collect();
    let regret: Vec<f64> = results.iter().map(|r| r.regret as f64).collect();
    let mut invariants = InvariantLog::default();
    for r in results {
        invariants.merge(&r.invariants);
    }
    Summary {
        trials: results.len(),
        mistakes: Stats::of(&mistakes),
        regret: Stats::of(&regret),
        bound,
        invariants,
    }
}

/// One trial of `config` on a prebuilt instance.
/// Builds the adversary and learner of `config` without playing a round.
pub fn check_config(config: &ExperimentConfig, instance: &Instance) -> Result<()> {
    let mut rngs = TrialRngs::new(config.seed, 0);
    let spec = config
        .adversary
        .unwrap_or_else(|| instance.default_adversary());
    instance.adversary(spec, config.horizon, &mut rngs.adversary)?;
    config.learner.build(instance, config.horizon)?;
    Ok(())
}

pub fn run_config_trial(
    config: &ExperimentConfig,
    instance: &Instance,
    trial: usize,
) -> Result<TrialResult> {
    let mut rngs = TrialRngs::new(config.seed, trial);
    let spec = config
        .adversary
        .unwrap_or_else(|| instance.default_adversary());
    let mut adversary = instance.adversary(spec, config.horizon, &mut rngs.adversary)?;
    let mut learner = config.learner.build(instance, config.horizon)?;
    let mut result = run_protocol(
        instance,
        learner.as_mut(),
        adversary.as_mut(),
        config.horizon,
        &mut rngs,
        config.emit_rounds,
    )?;
    result.trial = trial;
    result.seed = config.seed.wrapping_add(trial as u64);
    Ok(result)
}

pub fn run_config(config: &ExperimentConfig, execution: Execution) -> Result<RunReport> {
    config.validate()?;
    let instance = config.instance.build()?;
    let results = run_trials(config.trials, execution, |t| {
        run_config_trial(config, &instance, t)
    })?;
    let summary = summarize(&results, config.learner.bound(&instance, config.horizon));
    Ok(RunReport {
        schema_version: SCHEMA_VERSION,
        config: config.clone(),
        summary,
        results,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SweepAxis {
    #[serde(rename = "T")]
    T,
    N,
    D,
}

impl SweepAxis {
    pub fn label(&self) -> &'static str {
        match self {
            SweepAxis::T => "T",
            SweepAxis::N => "n",
            SweepAxis::D => "d",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub value: usize,
    pub summary: Summary,
}

/// The configurations a sweep runs, one per value, each checked with [`check_config`].
pub fn sweep_points(
    config: &ExperimentConfig,
    axis: SweepAxis,
    values: &[usize],
) -> Result<Vec<ExperimentConfig>> {
    if values.is_empty() || values.windows(2).any(|w| w[0] > w[1]) {
        return Err(Error::InvalidParameter(
            "sweep values must be nonempty and ascending".into(),
        ));
    }
    values
        .iter()
        .map(|&value| {
            let mut point = config.clone();
            point.instance = config.instance.with_axis(axis, value)?;
            if axis == SweepAxis::T {
                point.horizon = value;
            }
            point.emit_rounds = false;
            point.validate()?;
            check_config(&point, &point.instance.build()?)?;
            Ok(point)
        })
        .collect()
}

pub fn sweep(
    config: &ExperimentConfig,
    axis: SweepAxis,
    values: &[usize],
    execution: Execution,
) -> Result<Vec<SweepRow>> {
    sweep_points(config, axis, values)?
        .iter()
        .zip(values)
        .map(|(point, &value)| {
            let report = run_config(point, execution)?;
            Ok(SweepRow {
                value,
                summary: report.summary,
            })
        })
        .collect()
}

pub fn sweep_csv(axis: SweepAxis, rows: &[SweepRow]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let csv_err = |e: csv::Error| Error::InvalidParameter(format!("csv: {e}"));
    w.write_record([
        axis.label(),
        "mean_mistakes",
        "se_mistakes",
        "mean_regret",
        "se_regret",
        "bound_value",
        "schema_version",
    ])
    .map_err(csv_err)?;
    for row in rows {
        let s = &row.summary;
        w.write_record([
            row.value.to_string(),
            s.mistakes.mean.to_string(),
            s.mistakes.se.to_string(),
            s.regret.mean.to_string(),
            s.regret.se.to_string(),
            s.bound.map(|b| b.to_string()).unwrap_or_default(),
            SCHEMA_VERSION.to_string(),
        ])
        .map_err(csv_err)?;
    }
    let bytes = w
        .into_inner()
        .map_err(|e| Error::InvalidParameter(format!("csv: {e}")))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckLine {
    pub name: String,
    pub checks: u64,
    pub violations: u64,
}

impl CheckLine {
    pub fn passed(&self) -> bool {
        self.violations == 0 && self.checks > 0
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub schema_version: u32,
    pub lines: Vec<CheckLine>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.lines.iter().all(CheckLine::passed)
    }
}

fn random_probs(rng: &mut dyn RngCore, n: usize) -> Vec<f64> {
    let raw: Vec<f64> = (0..n).map(|_| rng.gen_range(0.01..1.0)).collect();
    let total: f64 = raw.iter().sum();
    raw.into_iter().map(|v| v / total).collect()
}

/// Brute-force estimator checks on `configs` random `(p, R, y)` draws:
/// unbiasedness within `1e-12` and second moment `1{R ≠ ∅}`.
pub fn check_estimator(rng: &mut dyn RngCore, configs: usize, log: &mut InvariantLog) {
    for _ in 0..configs {
        let n = rng.gen_range(1..=10);
        let p = random_probs(rng, n);
        let in_r: Vec<bool> = (0..n).map(|_| rng.gen_bool(0.5)).collect();
        let y = Label::from(rng.gen::<bool>());
        let estimates: Vec<Vec<f64>> = (0..n)
            .map(|j| agnostic::loss_estimate(&p, &in_r, j, y))
            .collect();
        let mut unbiased = true;
        for i in 0..n {
            let mean: f64 = (0..n).map(|j| p[j] * estimates[j][i]).sum();
            let truth = if in_r[i] { y.sign() } else { 0.0 };
            unbiased &= (mean - truth).abs() <= 1e-12;
        }
        log.record("estimator_unbiased", unbiased);
        let second: f64 = (0..n)
            .map(|j| p[j] * (0..n).map(|i| p[i] * estimates[j][i].powi(2)).sum::<f64>())
            .sum();
        let expected = if in_r.iter().any(|&r| r) { 1.0 } else { 0.0 };
        log.record(
            "estimator_second_moment",
            (second - expected).abs() <= 1e-12,
        );
    }
}

/// Searches random cumulative losses and single-outcome estimates for a
/// stability violation under `params`; returns the first offending pair.
pub fn find_stability_violation(
    params: &FtrlParams,
    n: usize,
    attempts: usize,
    rng: &mut dyn RngCore,
) -> Result<Option<(Vec<f64>, Vec<f64>)>> {
    for _ in 0..attempts {
        let d: Vec<f64> = (0..n).map(|_| rng.gen_range(-20.0..20.0)).collect();
        let prev = agnostic::ftrl_solve(&d, params)?;
        let i = rng.gen_range(0..n);
        let mut in_r = vec![false; n];
        in_r[i] = true;
        let est = agnostic::loss_estimate(&prev, &in_r, i, Label::Neg);
        let next_d: Vec<f64> = d.iter().zip(&est).map(|(a, b)| a + b).collect();
        let next = agnostic::ftrl_solve(&next_d, params)?;
        if !agnostic::stability_violations(&prev, &next, agnostic::STABILITY_TOLERANCE).is_empty() {
            return Ok(Some((prev, next)));
        }
    }
    Ok(None)
}

/// The invariant suite on small randomized instances.
pub fn verify_invariants(seed: u64, execution: Execution) -> Result<VerifyReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut log = InvariantLog::default();
    check_estimator(&mut rng, 1000, &mut log);

    for _ in 0..200 {
        let n = rng.gen_range(2..=8);
        let d: Vec<f64> = (0..n).map(|_| rng.gen_range(-100.0..100.0)).collect();
        let params = FtrlParams::defaults(n, rng.gen_range(10..5000));
        let p = agnostic::ftrl_solve(&d, &params)?;
        log.record(
            "ftrl_solver_kkt",
            agnostic::kkt_residual(&d, &p, &params) <= 1e-9,
        );
    }

    let fault = FtrlParams {
        nu: 1.0,
        ..FtrlParams::defaults(8, 100)
    };
    let found = find_stability_violation(&fault, 8, 2000, &mut rng)?;
    log.record("stability_fault_detected", found.is_some());

    let runs: Vec<ExperimentConfig> = vec![
        config(
            InstanceSpec::Figure1 { n: 6 },
            LearnerSpec::UniformMix,
            Some(AdversarySpec::Proper),
            256,
        ),
        config(
            InstanceSpec::Figure1 { n: 6 },
            LearnerSpec::UniformMix,
            None,
            256,
        ),
        config(
            InstanceSpec::Figure1 { n: 5 },
            LearnerSpec::ExpertMix { p: None },
            None,
            256,
        ),
        config(
            InstanceSpec::Random {
                vertices: 10,
                edge_probability: 0.3,
                max_degree: 4,
                members: 16,
                seed,
            },
            LearnerSpec::ExpertMix { p: None },
            None,
            256,
        ),
        config(
            InstanceSpec::DCopies { n: 2, d: 2 },
            LearnerSpec::ExpertMix { p: None },
            None,
            256,
        ),
        config(
            InstanceSpec::Stochastic { n: 8 },
            LearnerSpec::Ftrl {
                eta: None,
                nu: None,
                epsilon: None,
            },
            None,
            512,
        ),
        config(
            InstanceSpec::Composite { n: 4 },
            LearnerSpec::Ftrl {
                eta: None,
                nu: None,
                epsilon: None,
            },
            None,
            512,
        ),
        config(
            InstanceSpec::Figure1 { n: 6 },
            LearnerSpec::Ftrl {
                eta: None,
                nu: None,
                epsilon: None,
            },
            None,
            256,
        ),
        config(
            InstanceSpec::Stochastic { n: 8 },
            LearnerSpec::Exp3 { rate: None },
            None,
            256,
        ),
        config(
            InstanceSpec::Stochastic { n: 8 },
            LearnerSpec::ExploreHedge {
                rho: None,
                rate: None,
            },
            None,
            256,
        ),
    ];
    for (k, mut c) in runs.into_iter().enumerate() {
        c.seed = seed.wrapping_add(1000 * k as u64);
        let report = run_config(&c, execution)?;
        log.merge(&report.summary.invariants);
    }

    let lines = log
        .checks
        .iter()
        .map(|(name, &checks)| CheckLine {
            name: name.clone(),
            checks,
            violations: log.violations_of(name),
        })
        .collect();
    Ok(VerifyReport {
        schema_version: SCHEMA_VERSION,
        lines,
    })
}

fn config(
    instance: InstanceSpec,
    learner: LearnerSpec,
    adversary: Option<AdversarySpec>,
    horizon: usize,
) -> ExperimentConfig {
    ExperimentConfig {
        instance,
        learner,
        adversary,
        horizon,
        trials: 4,
        seed: 0,
        emit_rounds: false,
        out: None,
    }
}
