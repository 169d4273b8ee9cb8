//! Factorization of a product hypervector into one entry per codebook.
//!
//! Two iterative methods share the same outer loop ([`orchestrate`]):
//!
//! * the resonator network unbinds the other factors' estimates from the
//!   target and projects the result through `S·Sᴴ` of its own codebook, then
//!   forces every element back onto the unit circle;
//! * the modern Hopfield network replaces the projection with a softmax over
//!   real-part similarities, followed by the same phase normalization.
//!
//! Attempts that fail to converge, or whose reconstruction falls below the
//! similarity threshold, are retried from a partly randomized start. After
//! `max_reinits` failures the threshold is lowered by `threshold_decrement`.

use std::collections::BTreeSet;
use std::sync::Arc;

use num_complex::Complex64;
use rand::{Rng, RngCore};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::phasor::{normalize_phase, random_phasor, similarity, Codebook, ComplexVector, DenseVector, Hypervector};
use crate::rng::HdcRng;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Resonator,
    Hopfield,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Method::Resonator => "resonator",
            Method::Hopfield => "hopfield",
        }
    }
}

impl std::str::FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "resonator" => Ok(Method::Resonator),
            "hopfield" => Ok(Method::Hopfield),
            other => Err(Error::InvalidConfig(format!("unknown factorizer method {other:?}"))),
        }
    }
}

/// Softmax inverse temperature applied to real-part similarities.
///
/// Equals `√d` at `d = 1024`, the usual `1/√d` scaling of raw inner products.
/// An exact query against 29 unit-circle states is restored with similarity
/// above 0.99 (see the calibration test below).
pub const DEFAULT_HOPFIELD_BETA: f64 = 32.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FactorizerConfig {
    pub method: Method,
    pub max_iterations: usize,
    /// Resonator only: iterations between convergence checks.
    pub check_interval: usize,
    /// Failed attempts allowed at one threshold before it is lowered.
    pub max_reinits: usize,
    pub threshold_initial: f64,
    pub threshold_decrement: f64,
    pub hopfield_converge_sim: f64,
    pub hopfield_beta: f64,
    pub reinit_reset_probability: f64,
    pub update: UpdateOrder,
}

/// How factor estimates are refreshed within one iteration.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum UpdateOrder {
    /// Every factor reads the estimates from before the iteration.
    Synchronous,
    /// Factors update in order and later factors read the fresh estimates.
    #[default]
    Sequential,
}

impl Default for FactorizerConfig {
    fn default() -> Self {
        Self {
            method: Method::Resonator,
            max_iterations: 50,
            check_interval: 10,
            max_reinits: 50,
            threshold_initial: 0.99,
            threshold_decrement: 0.01,
            hopfield_converge_sim: 0.75,
            hopfield_beta: DEFAULT_HOPFIELD_BETA,
            reinit_reset_probability: 0.5,
            update: UpdateOrder::Sequential,
        }
    }
}

impl FactorizerConfig {
    pub fn with_method(method: Method) -> Self {
        Self { method, ..Self::default() }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: &str| Err(Error::InvalidConfig(msg.to_string()));
        if !(self.threshold_decrement > 0.0
            && self.threshold_decrement < self.threshold_initial
            && self.threshold_initial <= 1.0)
        {
            return bad("need 0 < threshold_decrement < threshold_initial <= 1");
        }
        if self.max_iterations == 0 || self.check_interval == 0 || self.check_interval > self.max_iterations {
            return bad("need 1 <= check_interval <= max_iterations");
        }
        if self.max_reinits == 0 {
            return bad("max_reinits must be at least 1");
        }
        if !(0.0..=1.0).contains(&self.reinit_reset_probability) {
            return bad("reinit_reset_probability must lie in [0, 1]");
        }
        if self.hopfield_beta.is_nan() || self.hopfield_beta < 0.0 {
            return bad("hopfield_beta must be non-negative");
        }
        Ok(())
    }

    /// Acceptance threshold after `level` relaxations, floored at 0.
    pub fn threshold_at(&self, level: usize) -> f64 {
        (self.threshold_initial - level as f64 * self.threshold_decrement).max(0.0)
    }
}

/// Product hypervector and the codebooks it should factor over.
#[derive(Debug, Clone)]
pub struct FactorProblem {
    pub target: Hypervector,
    pub codebooks: Vec<Arc<Codebook>>,
    /// Optional first-attempt estimates, one per codebook.
    pub initial_estimates: Option<Vec<Hypervector>>,
}

impl FactorProblem {
    pub fn new(target: Hypervector, codebooks: Vec<Arc<Codebook>>) -> Result<Self> {
        let p = Self { target, codebooks, initial_estimates: None };
        p.validate()?;
        Ok(p)
    }

    /// Sets first-attempt estimates; non-unit inputs are phase-normalized.
    pub fn with_initial_estimates<V: ComplexVector>(mut self, estimates: &[V]) -> Result<Self> {
        if estimates.len() != self.codebooks.len() {
            return Err(Error::InvalidConfig(format!(
                "{} initial estimates for {} codebooks",
                estimates.len(),
                self.codebooks.len()
            )));
        }
        let d = self.target.dim();
        let mut out = Vec::with_capacity(estimates.len());
        for e in estimates {
            if e.dim() != d {
                return Err(Error::DimensionMismatch { expected: d, found: e.dim() });
            }
            out.push(normalize_phase(e));
        }
        self.initial_estimates = Some(out);
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        if self.codebooks.len() < 2 {
            return Err(Error::InvalidConfig("factorization needs at least two codebooks".into()));
        }
        let d = self.target.dim();
        for cb in &self.codebooks {
            if cb.dim() != d {
                return Err(Error::DimensionMismatch { expected: d, found: cb.dim() });
            }
        }
        Ok(())
    }

    pub fn factor_count(&self) -> usize {
        self.codebooks.len()
    }

    /// Bind of the indexed entries, one per codebook.
    pub fn reconstruct(&self, indices: &[usize]) -> Result<Hypervector> {
        let mut phases = vec![0.0; self.target.dim()];
        for (cb, &i) in self.codebooks.iter().zip(indices) {
            for (acc, p) in phases.iter_mut().zip(cb.entry(i)?.phases()) {
                *acc += p;
            }
        }
        Ok(Hypervector::from_phases(phases))
    }

    fn superposition_estimates(&self) -> Vec<Hypervector> {
        self.codebooks.iter().map(|cb| cb.superposition()).collect()
    }
}

/// Outcome of one attempt of either method.
#[derive(Debug, Clone, PartialEq)]
pub struct AttemptOutcome {
    pub converged: bool,
    /// Per-codebook argmax of `|similarity|` for the final estimates.
    pub indices: Vec<usize>,
    pub signs: Vec<i8>,
    pub factor_similarities: Vec<f64>,
    pub iterations: usize,
    pub estimates: Vec<Hypervector>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FactorResult {
    pub indices: Vec<usize>,
    pub signs: Vec<i8>,
    #[serde(skip)]
    pub reconstructed: Option<Hypervector>,
    pub similarity_to_target: f64,
    pub initializations_used: usize,
    pub iterations_last_attempt: usize,
    pub final_threshold: f64,
    pub factor_similarities: Vec<f64>,
}

impl FactorResult {
    pub fn first_attempt(&self) -> bool {
        self.initializations_used == 1
    }
}

/// One row of an attempt-level trace.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceRow {
    pub attempt: usize,
    pub iteration: usize,
    pub codebook: usize,
    pub index: usize,
    pub abs_sim: f64,
}

pub fn write_trace_csv<W: std::io::Write>(rows: &[TraceRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

/// Codebook entries in split real/imaginary row-major layout.
struct Packed {
    m: usize,
    d: usize,
    re: Vec<f64>,
    im: Vec<f64>,
}

impl Packed {
    fn new(cb: &Codebook) -> Self {
        let (m, d) = (cb.len(), cb.dim());
        let mut re = Vec::with_capacity(m * d);
        let mut im = Vec::with_capacity(m * d);
        for e in cb.entries() {
            re.extend(e.elements().iter().map(|z| z.re));
            im.extend(e.elements().iter().map(|z| z.im));
        }
        Self { m, d, re, im }
    }

    fn row(&self, k: usize) -> (&[f64], &[f64]) {
        let r = k * self.d..(k + 1) * self.d;
        (&self.re[r.clone()], &self.im[r])
    }

    /// `coeffs[k] = s_kᴴ q`.
    fn project_coeffs(&self, q: &Split, coeffs: &mut [Complex64]) {
        for (k, c) in coeffs.iter_mut().enumerate().take(self.m) {
            let (sr, si) = self.row(k);
            let (mut a, mut b) = (0.0, 0.0);
            for i in 0..self.d {
                a += sr[i] * q.re[i] + si[i] * q.im[i];
                b += sr[i] * q.im[i] - si[i] * q.re[i];
            }
            *c = Complex64::new(a, b);
        }
    }

    /// `out = Σ_k coeffs[k] s_k`.
    fn combine(&self, coeffs: &[Complex64], out: &mut Split) {
        out.re.iter_mut().for_each(|x| *x = 0.0);
        out.im.iter_mut().for_each(|x| *x = 0.0);
        for (k, c) in coeffs.iter().enumerate() {
            let (sr, si) = self.row(k);
            for i in 0..self.d {
                out.re[i] += c.re * sr[i] - c.im * si[i];
                out.im[i] += c.re * si[i] + c.im * sr[i];
            }
        }
    }

    /// Entry with the largest `|s_kᴴ v| / d`. Estimates may settle on any
    /// global phase of an entry, of which the anti-parallel one is a special
    /// case, so the match ignores that phase.
    fn best_match(&self, v: &Split) -> Match {
        let mut best = Match { index: 0, similarity: 0.0, magnitude: -1.0 };
        for k in 0..self.m {
            let (sr, si) = self.row(k);
            let (mut a, mut b) = (0.0, 0.0);
            for i in 0..self.d {
                a += sr[i] * v.re[i] + si[i] * v.im[i];
                b += sr[i] * v.im[i] - si[i] * v.re[i];
            }
            let (similarity, magnitude) = (a / self.d as f64, a.hypot(b) / self.d as f64);
            if magnitude > best.magnitude {
                best = Match { index: k, similarity, magnitude };
            }
        }
        best
    }
}

#[derive(Debug, Clone, Copy)]
struct Match {
    index: usize,
    /// Real-part similarity, whose sign gives the factor's sign.
    similarity: f64,
    magnitude: f64,
}

/// Unit phasor in split layout.
#[derive(Clone)]
struct Split {
    re: Vec<f64>,
    im: Vec<f64>,
}

impl Split {
    fn zeros(d: usize) -> Self {
        Self { re: vec![0.0; d], im: vec![0.0; d] }
    }

    fn from_vector<V: ComplexVector + ?Sized>(v: &V) -> Self {
        Self {
            re: v.elements().iter().map(|z| z.re).collect(),
            im: v.elements().iter().map(|z| z.im).collect(),
        }
    }

    fn to_hypervector(&self) -> Hypervector {
        Hypervector::from_phases(self.re.iter().zip(&self.im).map(|(&r, &i)| i.atan2(r)).collect())
    }

    fn normalize(&mut self) {
        for (r, i) in self.re.iter_mut().zip(self.im.iter_mut()) {
            let n = r.hypot(*i);
            if n == 0.0 {
                *r = 1.0;
                *i = 0.0;
            } else {
                *r /= n;
                *i /= n;
            }
        }
    }
}

/// Working state for one factorization problem.
struct Engine<'a> {
    problem: &'a FactorProblem,
    config: &'a FactorizerConfig,
    packed: Vec<Packed>,
    target: Split,
    d: usize,
}

impl<'a> Engine<'a> {
    fn new(problem: &'a FactorProblem, config: &'a FactorizerConfig) -> Self {
        Self {
            problem,
            config,
            packed: problem.codebooks.iter().map(|cb| Packed::new(cb)).collect(),
            target: Split::from_vector(&problem.target),
            d: problem.target.dim(),
        }
    }

    /// `q = p ⊙ Π_{g≠f} conj(est_g)`.
    fn unbind_others(&self, estimates: &[Split], f: usize, q: &mut Split) {
        q.re.copy_from_slice(&self.target.re);
        q.im.copy_from_slice(&self.target.im);
        for (g, e) in estimates.iter().enumerate() {
            if g == f {
                continue;
            }
            for i in 0..self.d {
                let (a, b) = (q.re[i], q.im[i]);
                let (c, s) = (e.re[i], -e.im[i]);
                q.re[i] = a * c - b * s;
                q.im[i] = a * s + b * c;
            }
        }
    }

    /// One update of every estimate.
    fn iterate(&self, estimates: &[Split], method: Method, beta: f64) -> Vec<Split> {
        if self.config.update == UpdateOrder::Sequential {
            let mut current = estimates.to_vec();
            for f in 0..current.len() {
                current[f] = self.update_one(&current, f, method, beta);
            }
            return current;
        }
        (0..estimates.len()).map(|f| self.update_one(estimates, f, method, beta)).collect()
    }

    fn update_one(&self, estimates: &[Split], f: usize, method: Method, beta: f64) -> Split {
        let packed = &self.packed[f];
        let mut q = Split::zeros(self.d);
        {
            self.unbind_others(estimates, f, &mut q);
            let mut coeffs = vec![Complex64::new(0.0, 0.0); packed.m];
            packed.project_coeffs(&q, &mut coeffs);
            if method == Method::Hopfield {
                softmax_weights(&mut coeffs, beta, self.d);
            }
            let mut out = Split::zeros(self.d);
            packed.combine(&coeffs, &mut out);
            out.normalize();
            out
        }
    }

    fn best_matches(&self, estimates: &[Split]) -> Vec<Match> {
        self.packed.iter().zip(estimates).map(|(p, e)| p.best_match(e)).collect()
    }

    fn run(&self, start: Vec<Split>, attempt: usize, trace: &mut Option<&mut Vec<TraceRow>>) -> AttemptOutcome {
        match self.config.method {
            Method::Resonator => self.run_resonator(start, attempt, trace),
            Method::Hopfield => self.run_hopfield(start, attempt, trace),
        }
    }

    fn record(&self, matches: &[Match], attempt: usize, iteration: usize, trace: &mut Option<&mut Vec<TraceRow>>) {
        if let Some(rows) = trace.as_deref_mut() {
            for (codebook, m) in matches.iter().enumerate() {
                rows.push(TraceRow { attempt, iteration, codebook, index: m.index, abs_sim: m.magnitude });
            }
        }
    }

    fn run_resonator(&self, mut estimates: Vec<Split>, attempt: usize, trace: &mut Option<&mut Vec<TraceRow>>) -> AttemptOutcome {
        let mut previous: Option<Vec<usize>> = None;
        let mut iterations = 0;
        let mut matches = self.best_matches(&estimates);
        while iterations < self.config.max_iterations {
            estimates = self.iterate(&estimates, Method::Resonator, 0.0);
            iterations += 1;
            if iterations % self.config.check_interval == 0 {
                matches = self.best_matches(&estimates);
                self.record(&matches, attempt, iterations, trace);
                let indices: Vec<usize> = matches.iter().map(|m| m.index).collect();
                if previous.as_ref() == Some(&indices) {
                    return self.outcome(true, matches, iterations, &estimates);
                }
                previous = Some(indices);
            }
        }
        if iterations % self.config.check_interval != 0 {
            matches = self.best_matches(&estimates);
        }
        self.outcome(false, matches, iterations, &estimates)
    }

    fn run_hopfield(&self, mut estimates: Vec<Split>, attempt: usize, trace: &mut Option<&mut Vec<TraceRow>>) -> AttemptOutcome {
        let mut matches = self.best_matches(&estimates);
        for iteration in 1..=self.config.max_iterations {
            estimates = self.iterate(&estimates, Method::Hopfield, self.config.hopfield_beta);
            matches = self.best_matches(&estimates);
            self.record(&matches, attempt, iteration, trace);
            if matches.iter().all(|m| m.magnitude >= self.config.hopfield_converge_sim) {
                return self.outcome(true, matches, iteration, &estimates);
            }
        }
        self.outcome(false, matches, self.config.max_iterations, &estimates)
    }

    /// Resolves signs so their product is `+1` by flipping the weakest
    /// anti-parallel match when needed.
    fn outcome(&self, converged: bool, matches: Vec<Match>, iterations: usize, estimates: &[Split]) -> AttemptOutcome {
        let indices: Vec<usize> = matches.iter().map(|m| m.index).collect();
        let factor_similarities: Vec<f64> = matches.iter().map(|m| m.magnitude).collect();
        let mut signs: Vec<i8> = matches.iter().map(|m| if m.similarity < 0.0 { -1 } else { 1 }).collect();
        if signs.iter().filter(|&&s| s < 0).count() % 2 == 1 {
            let weakest = (0..signs.len())
                .min_by(|&a, &b| factor_similarities[a].total_cmp(&factor_similarities[b]))
                .expect("at least two factors");
            signs[weakest] = -signs[weakest];
        }
        AttemptOutcome {
            converged,
            indices,
            signs,
            factor_similarities,
            iterations,
            estimates: estimates.iter().map(Split::to_hypervector).collect(),
        }
    }

    fn superposition(&self) -> Vec<Split> {
        self.problem.superposition_estimates().iter().map(Split::from_vector).collect()
    }

    fn first_estimates(&self) -> Vec<Split> {
        match &self.problem.initial_estimates {
            Some(init) => init.iter().map(Split::from_vector).collect(),
            None => self.superposition(),
        }
    }

    /// Resets each factor to a random phasor with the configured probability
    /// (at least one factor), the rest to the codebook superposition.
    fn reinit<R: RngCore + ?Sized>(&self, rng: &mut R) -> Vec<Split> {
        let f = self.packed.len();
        let mut random: Vec<bool> = (0..f).map(|_| rng.random_bool(self.config.reinit_reset_probability)).collect();
        if !random.iter().any(|&r| r) {
            random[rng.random_range(0..f)] = true;
        }
        let mut sup = self.superposition();
        for (slot, &r) in sup.iter_mut().zip(&random) {
            if r {
                *slot = Split::from_vector(&random_phasor(self.d, rng).expect("dimension is positive"));
            }
        }
        sup
    }
}

/// Replaces raw inner products with softmax weights over `β · Re(sim)`.
fn softmax_weights(coeffs: &mut [Complex64], beta: f64, d: usize) {
    let scores: Vec<f64> = coeffs.iter().map(|c| beta * c.re / d as f64).collect();
    let max = scores.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let exp: Vec<f64> = scores.iter().map(|s| (s - max).exp()).collect();
    let total: f64 = exp.iter().sum();
    for (c, e) in coeffs.iter_mut().zip(exp) {
        *c = Complex64::new(e / total, 0.0);
    }
}

fn to_split(problem: &FactorProblem, estimates: &[Hypervector]) -> Result<Vec<Split>> {
    if estimates.len() != problem.factor_count() {
        return Err(Error::InvalidConfig("one estimate per codebook required".into()));
    }
    for e in estimates {
        if e.dim() != problem.target.dim() {
            return Err(Error::DimensionMismatch { expected: problem.target.dim(), found: e.dim() });
        }
    }
    Ok(estimates.iter().map(Split::from_vector).collect())
}

/// One resonator update with the default update order.
pub fn resonator_iterate(problem: &FactorProblem, estimates: &[Hypervector]) -> Result<Vec<Hypervector>> {
    problem.validate()?;
    let config = FactorizerConfig::default();
    let engine = Engine::new(problem, &config);
    let next = engine.iterate(&to_split(problem, estimates)?, Method::Resonator, 0.0);
    Ok(next.iter().map(Split::to_hypervector).collect())
}

/// One Hopfield update with inverse temperature `beta`.
pub fn hopfield_iterate(problem: &FactorProblem, estimates: &[Hypervector], beta: f64) -> Result<Vec<Hypervector>> {
    problem.validate()?;
    let config = FactorizerConfig::default();
    let engine = Engine::new(problem, &config);
    let next = engine.iterate(&to_split(problem, estimates)?, Method::Hopfield, beta);
    Ok(next.iter().map(Split::to_hypervector).collect())
}

fn run_single(problem: &FactorProblem, config: &FactorizerConfig, method: Method) -> Result<AttemptOutcome> {
    problem.validate()?;
    config.validate()?;
    let config = FactorizerConfig { method, ..config.clone() };
    let engine = Engine::new(problem, &config);
    Ok(engine.run(engine.first_estimates(), 1, &mut None))
}

/// A single resonator attempt from the problem's first-attempt estimates.
pub fn resonator_run(problem: &FactorProblem, config: &FactorizerConfig) -> Result<AttemptOutcome> {
    run_single(problem, config, Method::Resonator)
}

/// A single Hopfield attempt from the problem's first-attempt estimates.
pub fn hopfield_run(problem: &FactorProblem, config: &FactorizerConfig) -> Result<AttemptOutcome> {
    run_single(problem, config, Method::Hopfield)
}

/// Runs attempts until one converges with a reconstruction at or above the
/// current threshold, relaxing the threshold as needed.
pub fn orchestrate<R: RngCore + ?Sized>(problem: &FactorProblem, config: &FactorizerConfig, rng: &mut R) -> Result<FactorResult> {
    orchestrate_traced(problem, config, rng, None)
}

pub fn orchestrate_traced<R: RngCore + ?Sized>(
    problem: &FactorProblem,
    config: &FactorizerConfig,
    rng: &mut R,
    mut trace: Option<&mut Vec<TraceRow>>,
) -> Result<FactorResult> {
    problem.validate()?;
    config.validate()?;
    let engine = Engine::new(problem, config);
    let mut estimates = engine.first_estimates();
    let mut level = 0;
    let mut failures_at_level = 0;
    let mut attempt = 0;
    let mut best: Option<(f64, AttemptOutcome)> = None;
    loop {
        attempt += 1;
        let threshold = config.threshold_at(level);
        let outcome = engine.run(estimates, attempt, &mut trace);
        let reconstructed = problem.reconstruct(&outcome.indices)?;
        let sim = similarity(&reconstructed, &problem.target)?;
        if outcome.converged && sim >= threshold {
            return Ok(finish(outcome, reconstructed, sim, attempt, threshold));
        }
        if best.as_ref().is_none_or(|(s, _)| sim > *s) {
            best = Some((sim, outcome));
        }
        failures_at_level += 1;
        if failures_at_level >= config.max_reinits {
            if threshold > 0.0 {
                level += 1;
                failures_at_level = 0;
            } else {
                // relaxation is exhausted: report the best reconstruction seen
                let (sim, outcome) = best.expect("at least one attempt ran");
                let reconstructed = problem.reconstruct(&outcome.indices)?;
                return Ok(finish(outcome, reconstructed, sim, attempt, sim.min(0.0)));
            }
        }
        estimates = engine.reinit(rng);
    }
}

fn finish(outcome: AttemptOutcome, reconstructed: Hypervector, sim: f64, attempts: usize, threshold: f64) -> FactorResult {
    FactorResult {
        indices: outcome.indices,
        signs: outcome.signs,
        reconstructed: Some(reconstructed),
        similarity_to_target: sim,
        initializations_used: attempts,
        iterations_last_attempt: outcome.iterations,
        final_threshold: threshold,
        factor_similarities: outcome.factor_similarities,
    }
}

/// Distinct accepted index tuples over `attempts` independent orchestrations.
pub fn enumerate_solutions<R: RngCore + ?Sized>(
    problem: &FactorProblem,
    config: &FactorizerConfig,
    rng: &mut R,
    attempts: usize,
) -> Result<BTreeSet<Vec<usize>>> {
    if attempts == 0 {
        return Err(Error::InvalidConfig("attempts must be at least 1".into()));
    }
    let mut found = BTreeSet::new();
    for _ in 0..attempts {
        let mut child = HdcRng::new(rng.next_u64());
        found.insert(orchestrate(problem, config, &mut child)?.indices);
    }
    Ok(found)
}

/// Brute-force argmax of `similarity(product, target)` over every index tuple.
pub fn brute_force_best(problem: &FactorProblem) -> Result<(Vec<usize>, f64)> {
    problem.validate()?;
    let sizes: Vec<usize> = problem.codebooks.iter().map(|cb| cb.len()).collect();
    let mut idx = vec![0usize; sizes.len()];
    let mut best = (idx.clone(), f64::NEG_INFINITY);
    loop {
        let s = similarity(&problem.reconstruct(&idx)?, &problem.target)?;
        if s > best.1 {
            best = (idx.clone(), s);
        }
        let mut pos = 0;
        loop {
            idx[pos] += 1;
            if idx[pos] < sizes[pos] {
                break;
            }
            idx[pos] = 0;
            pos += 1;
            if pos == sizes.len() {
                return Ok(best);
            }
        }
    }
}

/// Dense helper for callers holding non-unit estimates.
pub fn estimates_from_dense(vs: &[DenseVector]) -> Vec<Hypervector> {
    vs.iter().map(normalize_phase).collect()
}
