//! Learners for agnostic sequences.
//!
//! The main learner runs FTRL over the ε-shrunk simplex with regularizer
//! `(1/η) Σ p ln p − (1/ν) Σ ln p`, fed by an importance-weighted estimate of
//! the shifted loss `d_t(i) = y_t · 1{h^i ∈ R_t}`. `R_t` is the set of members
//! labeling all of `N[x_t]` negative; the learner sees it exactly when the
//! deployed member labels the landed vertex negative, because that only happens
//! when the agent did not move.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::graph::{ManipulationGraph, VertexId};
use crate::hypothesis::{Hypothesis, HypothesisClass, Label};
use crate::learner::{Atom, AtomKind, AuditContext, ClassifierDistribution, InvariantLog, Learner};
use crate::realizable::check_compatible;

/// Slack allowed on `p_{t+1}(i) ≤ 2 p_t(i)`.
pub const STABILITY_TOLERANCE: f64 = 1e-8;

const MAX_OUTER_ITERATIONS: usize = 200;
const MAX_INNER_ITERATIONS: usize = 200;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FtrlParams {
    pub eta: f64,
    pub nu: f64,
    pub epsilon: f64,
}

impl FtrlParams {
    /// `η = sqrt(ln n / T)`, `ν = 1/16`, `ε = 1/(nT)`.
    pub fn defaults(n: usize, horizon: usize) -> Self {
        let t = horizon.max(1) as f64;
        let n = n as f64;
        FtrlParams {
            eta: (n.ln() / t).sqrt(),
            nu: 1.0 / 16.0,
            epsilon: 1.0 / (n * t),
        }
    }

    fn validate(&self, n: usize) -> Result<()> {
        if n == 0 {
            return Err(Error::InvalidParameter("FTRL needs n >= 1".into()));
        }
        if n == 1 {
            return Ok(());
        }
        let ok = self.eta.is_finite() && self.eta > 0.0 && self.nu.is_finite() && self.nu > 0.0;
        if !ok {
            return Err(Error::InvalidParameter(format!(
                "eta={} nu={}",
                self.eta, self.nu
            )));
        }
        if !(self.epsilon > 0.0 && (n as f64) * self.epsilon < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "epsilon={} with n={n}",
                self.epsilon
            )));
        }
        Ok(())
    }

    /// Gradient of the per-coordinate objective at `p`.
    fn grad(&self, d: f64, p: f64) -> f64 {
        d + (p.ln() + 1.0) / self.eta - 1.0 / (self.nu * p)
    }

    fn curvature(&self, p: f64) -> f64 {
        1.0 / (self.eta * p) + 1.0 / (self.nu * p * p)
    }
}

/// `(1/η) ln n + ηT + (n/ν) ln(1/ε)` at the default parameters.
pub fn ftrl_bound(n: usize, horizon: usize) -> f64 {
    let p = FtrlParams::defaults(n, horizon);
    let explore = if n > 1 {
        (n as f64).ln() / p.eta + p.eta * horizon as f64
    } else {
        0.0
    };
    explore + n as f64 / p.nu * (1.0 / p.epsilon).ln()
}

/// `argmin_{p ∈ Δ_{n,ε}} ⟨D, p⟩ + (1/η) Σ p ln p − (1/ν) Σ ln p`.
pub fn ftrl_solve(cumulative: &[f64], params: &FtrlParams) -> Result<Vec<f64>> {
    FtrlSolver::default().solve(cumulative, params)
}

/// Dual solver for the FTRL step, warm-started across calls.
///
/// For a multiplier `λ` each coordinate solves `g_i(p) + λ = 0`, where
/// `g_i` is strictly increasing, and is clamped below at `ε`. The clamped sum
/// is decreasing in `λ`; a safeguarded Newton iteration on `λ` finds the
/// point where it equals one.
#[derive(Debug, Clone, Default)]
pub struct FtrlSolver {
    lambda: Option<f64>,
    log_p: Vec<f64>,
}

impl FtrlSolver {
    pub fn solve(&mut self, cumulative: &[f64], params: &FtrlParams) -> Result<Vec<f64>> {
        let n = cumulative.len();
        params.validate(n)?;
        if cumulative.iter().any(|d| !d.is_finite()) {
            return Err(Error::Solver("non-finite cumulative loss".into()));
        }
        if n == 1 {
            return Ok(vec![1.0]);
        }
        if self.log_p.len() != n {
            self.log_p = vec![-(n as f64).ln(); n];
            self.lambda = None;
        }
        let uniform = 1.0 / n as f64;
        let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
        let mut lo_unit = f64::NEG_INFINITY;
        for &d in cumulative {
            let g = params.grad(d, uniform);
            lo = lo.min(-g);
            hi = hi.max(-g);
            // no coordinate exceeds 1 at the solution
            lo_unit = lo_unit.max(-params.grad(d, 1.0));
        }
        if lo == hi {
            return Ok(vec![uniform; n]);
        }
        lo = lo.max(lo_unit);
        let mut probs = vec![0.0; n];
        let mut lambda = match self.lambda {
            Some(l) if l > lo && l < hi => l,
            _ => 0.5 * (lo + hi),
        };
        for _ in 0..MAX_OUTER_ITERATIONS {
            let (sum, slope) = self.evaluate(cumulative, params, lambda, &mut probs);
            let excess = sum - 1.0;
            if excess.abs() <= 1e-14 {
                self.lambda = Some(lambda);
                return Ok(probs);
            }
            if excess > 0.0 {
                lo = lambda;
            } else {
                hi = lambda;
            }
            // Newton on ln S: the sum is close to exponential in λ far from the root
            let newton = if slope < 0.0 {
                lambda - sum * sum.ln() / slope
            } else {
                f64::NAN
            };
            let next = if newton > lo && newton < hi {
                newton
            } else {
                0.5 * (lo + hi)
            };
            if next == lambda || hi - lo <= f64::EPSILON * lambda.abs().max(1.0) {
                self.lambda = Some(lambda);
                if excess.abs() <= 1e-10 {
                    return Ok(probs);
                }
                break;
            }
            lambda = next;
        }
        Err(Error::Solver(format!(
            "dual iteration did not converge (n={n})"
        )))
    }

    /// Fills `probs` for multiplier `lambda`; returns the sum and its derivative in `λ`.
    fn evaluate(
        &mut self,
        cumulative: &[f64],
        params: &FtrlParams,
        lambda: f64,
        probs: &mut [f64],
    ) -> (f64, f64) {
        let log_eps = params.epsilon.ln();
        let mut sum = 0.0;
        let mut slope = 0.0;
        for (i, &d) in cumulative.iter().enumerate() {
            let c = -lambda - d - 1.0 / params.eta;
            match solve_coordinate(c, params, log_eps, self.log_p[i]) {
                None => {
                    probs[i] = params.epsilon;
                }
                Some(u) => {
                    self.log_p[i] = u;
                    let p = u.exp();
                    probs[i] = p;
                    slope -= 1.0 / params.curvature(p);
                }
            }
            sum += probs[i];
        }
        (sum, slope)
    }
}

/// Root in `u = ln p` of `u/η − e^{−u}/ν = c`, or `None` when it lies at or
/// below `ln ε` (the coordinate is clamped).
fn solve_coordinate(c: f64, params: &FtrlParams, log_eps: f64, warm: f64) -> Option<f64> {
    let f = |u: f64| u / params.eta - (-u).exp() / params.nu - c;
    if f(log_eps) >= 0.0 {
        return None;
    }
    let mut lo = log_eps.max((params.eta * c).min(0.0) - 1.0);
    let mut hi = (params.eta * (c + 1.0 / params.nu)).max(0.0) + 1.0;
    if f(lo) >= 0.0 {
        lo = log_eps;
    }
    let mut u = if warm > lo && warm < hi {
        warm
    } else {
        0.5 * (lo + hi)
    };
    for _ in 0..MAX_INNER_ITERATIONS {
        let fu = f(u);
        if fu == 0.0 {
            return Some(u);
        }
        if fu > 0.0 {
            hi = u;
        } else {
            lo = u;
        }
        let deriv = 1.0 / params.eta + (-u).exp() / params.nu;
        let newton = u - fu / deriv;
        let next = if newton > lo && newton < hi {
            newton
        } else {
            0.5 * (lo + hi)
        };
        if (next - u).abs() <= 4.0 * f64::EPSILON * u.abs().max(1.0) {
            return Some(next);
        }
        u = next;
    }
    Some(u)
}

/// Largest scaled stationarity/feasibility violation of `probs` for the FTRL
/// objective with cumulative loss `cumulative`. Stationarity gaps are divided
/// by the local curvature, so the result is in probability units.
pub fn kkt_residual(cumulative: &[f64], probs: &[f64], params: &FtrlParams) -> f64 {
    let n = probs.len();
    if n == 1 {
        return (probs[0] - 1.0).abs();
    }
    let tol = params.epsilon * (1.0 + 1e-9);
    let free: Vec<usize> = (0..n).filter(|&i| probs[i] > tol).collect();
    let mut worst = (probs.iter().sum::<f64>() - 1.0).abs();
    for &p in probs {
        worst = worst.max(params.epsilon - p);
    }
    if free.is_empty() {
        return worst;
    }
    // multiplier from the free coordinates, weighted by inverse curvature
    let (mut num, mut den) = (0.0, 0.0);
    for &i in &free {
        let w = 1.0 / params.curvature(probs[i]);
        num -= w * params.grad(cumulative[i], probs[i]);
        den += w;
    }
    let lambda = num / den;
    for i in 0..n {
        let gap = params.grad(cumulative[i], probs[i]) + lambda;
        let scaled = gap / params.curvature(probs[i]);
        if free.contains(&i) {
            worst = worst.max(scaled.abs());
        } else {
            // clamped coordinates need a nonnegative bound multiplier
            worst = worst.max(-scaled);
        }
    }
    worst
}

/// `R_t` membership for agent vertex `x`.
pub fn r_membership(
    graph: &ManipulationGraph,
    class: &HypothesisClass,
    x: VertexId,
) -> Result<Vec<bool>> {
    class
        .members()
        .iter()
        .map(|h| graph.labels_all_negative(h, x))
        .collect()
}

/// `d_t(i) = y · 1{h^i ∈ R_t}`.
pub fn shifted_loss(
    graph: &ManipulationGraph,
    class: &HypothesisClass,
    x: VertexId,
    y: Label,
) -> Result<Vec<i32>> {
    let sign = if y.is_positive() { 1 } else { -1 };
    Ok(r_membership(graph, class, x)?
        .into_iter()
        .map(|r| if r { sign } else { 0 })
        .collect())
}

/// `d̂_t(i) = 1{h_t ∈ R_t} 1{h^i ∈ R_t} y_t / q_t`, `q_t = Σ_{i ∈ R_t} p_t(i)`.
pub fn loss_estimate(probs: &[f64], in_r: &[bool], sampled: usize, y: Label) -> Vec<f64> {
    if !in_r[sampled] {
        return vec![0.0; probs.len()];
    }
    let q: f64 = probs
        .iter()
        .zip(in_r)
        .filter(|(_, &r)| r)
        .map(|(p, _)| p)
        .sum();
    let value = y.sign() / q;
    in_r.iter().map(|&r| if r { value } else { 0.0 }).collect()
}

/// Indices where `next(i) > 2 prev(i) + tolerance`.
pub fn stability_violations(prev: &[f64], next: &[f64], tolerance: f64) -> Vec<usize> {
    (0..prev.len())
        .filter(|&i| next[i] > 2.0 * prev[i] + tolerance)
        .collect()
}

fn member_atoms<'a>(
    class: &'a HypothesisClass,
    probs: &'a [f64],
    scale: f64,
) -> impl Iterator<Item = Atom> + 'a {
    probs.iter().enumerate().map(move |(i, &p)| Atom {
        kind: AtomKind::Member(i),
        hypothesis: class.member(i).clone(),
        mass: scale * p,
    })
}

/// Member index of atom `k` in a distribution built by this module.
fn sampled_member(dist: Option<&ClassifierDistribution>, k: usize) -> Result<Option<usize>> {
    let dist = dist.ok_or_else(|| Error::InvalidDistribution("update before announce".into()))?;
    match dist.atoms().get(k).map(|a| a.kind) {
        Some(AtomKind::Member(i)) => Ok(Some(i)),
        Some(_) => Ok(None),
        None => Err(Error::InvalidDistribution(format!("no atom {k}"))),
    }
}

#[derive(Debug, Clone, Copy, Default)]
struct FtrlRoundFacts {
    sampled: usize,
    z: VertexId,
    max_ratio: f64,
    stable: bool,
    second_moment_ok: Option<bool>,
}

/// FTRL with entropy plus log-barrier regularization over `Δ_{n,ε}`.
pub struct Ftrl {
    graph: Arc<ManipulationGraph>,
    class: Arc<HypothesisClass>,
    params: FtrlParams,
    solver: FtrlSolver,
    cumulative: Vec<f64>,
    probs: Vec<f64>,
    cached: Option<ClassifierDistribution>,
    last: Option<FtrlRoundFacts>,
    rounds: u64,
}

impl Ftrl {
    pub fn new(
        graph: Arc<ManipulationGraph>,
        class: Arc<HypothesisClass>,
        horizon: usize,
    ) -> Result<Self> {
        let params = FtrlParams::defaults(class.len(), horizon);
        Self::with_params(graph, class, params)
    }

    pub fn with_params(
        graph: Arc<ManipulationGraph>,
        class: Arc<HypothesisClass>,
        params: FtrlParams,
    ) -> Result<Self> {
        check_compatible(&graph, &class)?;
        let n = class.len();
        params.validate(n)?;
        let cumulative = vec![0.0; n];
        let mut solver = FtrlSolver::default();
        let probs = solver.solve(&cumulative, &params)?;
        Ok(Ftrl {
            graph,
            class,
            params,
            solver,
            cumulative,
            probs,
            cached: None,
            last: None,
            rounds: 0,
        })
    }

    pub fn params(&self) -> &FtrlParams {
        &self.params
    }

    pub fn probabilities(&self) -> &[f64] {
        &self.probs
    }

    pub fn cumulative(&self) -> &[f64] {
        &self.cumulative
    }

    pub fn rounds(&self) -> u64 {
        self.rounds
    }

    /// Largest `p_{t+1}(i) / p_t(i)` over the last update.
    pub fn last_ratio(&self) -> Option<f64> {
        self.last.map(|f| f.max_ratio)
    }
}

impl Learner for Ftrl {
    fn name(&self) -> &'static str {
        "ftrl"
    }

    fn announce(&mut self) -> Result<&ClassifierDistribution> {
        if self.cached.is_none() {
            let atoms: Vec<Atom> = member_atoms(&self.class, &self.probs, 1.0).collect();
            self.cached = Some(ClassifierDistribution::new(atoms)?);
        }
        Ok(self.cached.as_ref().expect("just built"))
    }

    fn update(&mut self, sampled: usize, z: VertexId, y: Label) -> Result<()> {
        let i = sampled_member(self.cached.as_ref(), sampled)?
            .ok_or_else(|| Error::InvalidDistribution("FTRL only deploys class members".into()))?;
        self.rounds += 1;
        let mut facts = FtrlRoundFacts {
            sampled: i,
            z,
            max_ratio: 1.0,
            stable: true,
            second_moment_ok: None,
        };
        if self.class.member(i).label(z).is_positive() {
            self.last = Some(facts);
            return Ok(());
        }
        // z = x_t and the deployed member is in R_t
        let in_r: Vec<bool> = self
            .class
            .members()
            .iter()
            .map(|h| self.graph.labels_all_negative_unchecked(h, z))
            .collect();
        assert!(
            in_r[i],
            "deployed member labels z negative but is not in R_t"
        );
        let estimate = loss_estimate(&self.probs, &in_r, i, y);
        let q: f64 = self
            .probs
            .iter()
            .zip(&in_r)
            .filter(|(_, &r)| r)
            .map(|(p, _)| p)
            .sum();
        assert!(q > 0.0, "q_t must be at least p_t(sampled) >= epsilon");
        let second: f64 = self
            .probs
            .iter()
            .zip(&estimate)
            .map(|(p, d)| p * d * d)
            .sum();
        facts.second_moment_ok = Some((second * q - 1.0).abs() <= 1e-9);

        for (c, d) in self.cumulative.iter_mut().zip(&estimate) {
            *c += d;
        }
        let next = self.solver.solve(&self.cumulative, &self.params)?;
        facts.max_ratio = next
            .iter()
            .zip(&self.probs)
            .map(|(a, b)| a / b)
            .fold(0.0, f64::max);
        facts.stable = stability_violations(&self.probs, &next, STABILITY_TOLERANCE).is_empty();
        self.probs = next;
        self.cached = None;
        self.last = Some(facts);
        Ok(())
    }

    fn audit(&mut self, ctx: &AuditContext<'_>, log: &mut InvariantLog) {
        let Some(facts) = self.last else { return };
        log.record("ftrl_stability", facts.stable);
        if let Some(ok) = facts.second_moment_ok {
            log.record("ftrl_second_moment_identity", ok);
        }
        let h = self.class.member(facts.sampled);
        let observed = !h.label(facts.z).is_positive();
        let truth = facts.z == ctx.true_x && ctx.graph.labels_all_negative_unchecked(h, ctx.true_x);
        log.record("ftrl_r_detection", observed == truth);
    }
}

/// Loss-based EXP3 over the class members.
pub struct Exp3 {
    class: Arc<HypothesisClass>,
    rate: f64,
    log_weights: Vec<f64>,
    probs: Vec<f64>,
    cached: Option<ClassifierDistribution>,
}

/// `sqrt(ln n / (nT))`.
pub fn exp3_rate(n: usize, horizon: usize) -> f64 {
    let n = n as f64;
    (n.ln() / (n * horizon.max(1) as f64)).sqrt()
}

impl Exp3 {
    pub fn new(class: Arc<HypothesisClass>, horizon: usize) -> Self {
        let rate = exp3_rate(class.len(), horizon);
        Self::with_rate(class, rate)
    }

    pub fn with_rate(class: Arc<HypothesisClass>, rate: f64) -> Self {
        let n = class.len();
        Exp3 {
            class,
            rate,
            log_weights: vec![0.0; n],
            probs: vec![1.0 / n as f64; n],
            cached: None,
        }
    }

    pub fn probabilities(&self) -> &[f64] {
        &self.probs
    }
}

fn softmax(log_weights: &mut [f64], probs: &mut [f64]) {
    let max = log_weights
        .iter()
        .copied()
        .fold(f64::NEG_INFINITY, f64::max);
    for w in log_weights.iter_mut() {
        *w -= max;
    }
    let total: f64 = log_weights.iter().map(|w| w.exp()).sum();
    for (p, w) in probs.iter_mut().zip(log_weights.iter()) {
        *p = w.exp() / total;
    }
}

impl Learner for Exp3 {
    fn name(&self) -> &'static str {
        "exp3"
    }

    fn announce(&mut self) -> Result<&ClassifierDistribution> {
        if self.cached.is_none() {
            let atoms: Vec<Atom> = member_atoms(&self.class, &self.probs, 1.0).collect();
            self.cached = Some(ClassifierDistribution::new(atoms)?);
        }
        Ok(self.cached.as_ref().expect("just built"))
    }

    fn update(&mut self, sampled: usize, z: VertexId, y: Label) -> Result<()> {
        let i = sampled_member(self.cached.as_ref(), sampled)?
            .ok_or_else(|| Error::InvalidDistribution("EXP3 only deploys class members".into()))?;
        if self.class.member(i).label(z) != y {
            self.log_weights[i] -= self.rate / self.probs[i];
            softmax(&mut self.log_weights, &mut self.probs);
            self.cached = None;
        }
        Ok(())
    }
}

/// Improper baseline: plays `h⁺` with probability `ρ` and feeds the resulting
/// full-information strategic losses to Hedge; otherwise plays a Hedge sample.
pub struct ExploreHedge {
    graph: Arc<ManipulationGraph>,
    class: Arc<HypothesisClass>,
    rho: f64,
    rate: f64,
    log_weights: Vec<f64>,
    probs: Vec<f64>,
    all_positive: Hypothesis,
    cached: Option<ClassifierDistribution>,
    explorations: u64,
}

/// `ρ = T^{-1/4}`.
pub fn explore_rho(horizon: usize) -> f64 {
    (horizon.max(1) as f64).powf(-0.25)
}

/// `sqrt(ln n / (ρT))`.
pub fn hedge_rate(n: usize, rho: f64, horizon: usize) -> f64 {
    ((n as f64).ln() / (rho * horizon.max(1) as f64)).sqrt()
}

impl ExploreHedge {
    pub fn new(
        graph: Arc<ManipulationGraph>,
        class: Arc<HypothesisClass>,
        horizon: usize,
    ) -> Result<Self> {
        let rho = explore_rho(horizon);
        let rate = hedge_rate(class.len(), rho, horizon);
        Self::with_params(graph, class, rho, rate)
    }

    pub fn with_params(
        graph: Arc<ManipulationGraph>,
        class: Arc<HypothesisClass>,
        rho: f64,
        rate: f64,
    ) -> Result<Self> {
        check_compatible(&graph, &class)?;
        let valid = rho > 0.0 && rho <= 1.0 && rate >= 0.0;
        if !valid {
            return Err(Error::InvalidParameter(format!("rho={rho} rate={rate}")));
        }
        let n = class.len();
        Ok(ExploreHedge {
            all_positive: Hypothesis::all_positive(graph.vertex_count()),
            graph,
            class,
            rho,
            rate,
            log_weights: vec![0.0; n],
            probs: vec![1.0 / n as f64; n],
            cached: None,
            explorations: 0,
        })
    }

    pub fn explorations(&self) -> u64 {
        self.explorations
    }

    pub fn probabilities(&self) -> &[f64] {
        &self.probs
    }
}

impl Learner for ExploreHedge {
    fn name(&self) -> &'static str {
        "explore_hedge"
    }

    fn announce(&mut self) -> Result<&ClassifierDistribution> {
        if self.cached.is_none() {
            let mut atoms = vec![Atom {
                kind: AtomKind::AllPositive,
                hypothesis: self.all_positive.clone(),
                mass: self.rho,
            }];
            if self.rho < 1.0 {
                atoms.extend(member_atoms(&self.class, &self.probs, 1.0 - self.rho));
            }
            self.cached = Some(ClassifierDistribution::new(atoms)?);
        }
        Ok(self.cached.as_ref().expect("just built"))
    }

    fn update(&mut self, sampled: usize, z: VertexId, y: Label) -> Result<()> {
        if sampled_member(self.cached.as_ref(), sampled)?.is_some() {
            return Ok(());
        }
        self.explorations += 1;
        for (i, h) in self.class.members().iter().enumerate() {
            let loss = self.graph.strategic_loss_unchecked(h, z, y);
            self.log_weights[i] -= self.rate * f64::from(loss);
        }
        softmax(&mut self.log_weights, &mut self.probs);
        self.cached = None;
        Ok(())
    }

    fn audit(&mut self, ctx: &AuditContext<'_>, log: &mut InvariantLog) {
        let _ = ctx;
        log.record(
            "explore_hedge_weights_finite",
            self.probs.iter().all(|p| p.is_finite()),
        );
    }
}
