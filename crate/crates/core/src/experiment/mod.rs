//! Monte Carlo experiments on random digraphs and their reports.
//!
//! Trial `i` of a run draws its digraph from its own random stream:
//! `ChaCha8Rng::seed_from_u64(seed)` switched to stream `i`. Trials are
//! independent of scheduling, results are collected in trial order, and all
//! aggregation is sequential, so a report depends only on the configuration
//! and never on the number of workers.

mod report;
pub mod stats;

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use num_traits::{ToPrimitive, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::abelian_groups::{aut_order, enumerate_p_groups, sur_count, AbelianGroup, Partition};
use crate::cohen_lenstra::{cyclic_constant, q_p, q_total, CohenLenstraError};
use crate::integer_smith::{cokernel_mod, cokernel_prime_power};
use crate::random_digraph::{Digraph, DigraphError, EdgeModel};
use crate::sandpile::{total_sandpile, total_sandpile_via_row, SandpileError, SandpileGroup};

pub use report::{
    AuditSummary, BuildStamp, ExperimentReport, MomentSummary, OutcomeRow, RateSummary, Reference,
};
use stats::{mean_estimate, total_variation, wilson, OTHER, Z95, Z99};

pub const SCHEMA_VERSION: u32 = 1;
pub const DEFAULT_DEPTH: u32 = 6;
pub const DEFAULT_AUDIT_EVERY: u64 = 100;
/// Groups with at least this much theoretical mass are always listed.
pub const THEORY_LISTING_MASS: f64 = 1e-3;

pub const LARGE: &str = "large";
pub const INFINITE: &str = "infinite";
pub const NOT_STRONGLY_CONNECTED: &str = "not_strongly_connected";

#[derive(Debug, thiserror::Error)]
pub enum ExperimentError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("internal consistency failure: {0}")]
    Consistency(String),
    #[error(transparent)]
    Sandpile(#[from] SandpileError),
    #[error(transparent)]
    Digraph(#[from] DigraphError),
    #[error(transparent)]
    Theory(#[from] CohenLenstraError),
    #[error("could not read {path}: {message}")]
    Io { path: String, message: String },
}

impl ExperimentError {
    /// Whether this is a failed self-check rather than bad input.
    pub fn is_consistency_failure(&self) -> bool {
        matches!(
            self,
            ExperimentError::Consistency(_) | ExperimentError::Sandpile(SandpileError::Consistency(_))
        )
    }
}

fn default_depth() -> u32 {
    DEFAULT_DEPTH
}

fn default_audit_every() -> u64 {
    DEFAULT_AUDIT_EVERY
}

fn default_workers() -> usize {
    1
}

/// One experiment. `workers` only affects speed and is left out of reports.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub n: usize,
    pub trials: u64,
    pub model: EdgeModel,
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub primes: Option<BTreeSet<u64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub modulus: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub group: Option<AbelianGroup>,
    /// Exponents above this are reported as [`LARGE`] by distribution runs.
    #[serde(default = "default_depth")]
    pub depth: u32,
    /// Every trial whose index is a multiple of this is recomputed exactly.
    #[serde(default = "default_audit_every")]
    pub audit_every: u64,
    #[serde(default = "default_workers", skip_serializing)]
    pub workers: usize,
}

impl ExperimentConfig {
    pub fn new(n: usize, trials: u64, model: EdgeModel, seed: u64) -> Self {
        ExperimentConfig {
            n,
            trials,
            model,
            seed,
            primes: None,
            modulus: None,
            group: None,
            depth: DEFAULT_DEPTH,
            audit_every: DEFAULT_AUDIT_EVERY,
            workers: 1,
        }
    }

    pub fn with_primes(mut self, primes: &[u64]) -> Self {
        self.primes = Some(primes.iter().copied().collect());
        self
    }

    pub fn with_moment(mut self, modulus: u64, group: AbelianGroup) -> Self {
        self.modulus = Some(modulus);
        self.group = Some(group);
        self
    }

    pub fn with_workers(mut self, workers: usize) -> Self {
        self.workers = workers;
        self
    }

    pub fn from_json_file(path: &Path) -> Result<Self, ExperimentError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| ExperimentError::Io { path: path.display().to_string(), message: e.to_string() })?;
        let cfg: ExperimentConfig = serde_json::from_str(&text)
            .map_err(|e| ExperimentError::Config(format!("{}: {e}", path.display())))?;
        cfg.model.validate()?;
        Ok(cfg)
    }

    fn validate_common(&self) -> Result<(), ExperimentError> {
        if self.n < 2 {
            return Err(ExperimentError::Config(format!("n must be at least 2, got {}", self.n)));
        }
        if self.trials == 0 {
            return Err(ExperimentError::Config("trials must be at least 1".into()));
        }
        if self.workers == 0 {
            return Err(ExperimentError::Config("workers must be at least 1".into()));
        }
        if self.audit_every == 0 {
            return Err(ExperimentError::Config("audit_every must be at least 1".into()));
        }
        self.model.validate()?;
        Ok(())
    }

    fn validate_distribution(&self) -> Result<&BTreeSet<u64>, ExperimentError> {
        self.validate_common()?;
        if self.modulus.is_some() || self.group.is_some() {
            return Err(ExperimentError::Config("distribution runs take primes, not a modulus or group".into()));
        }
        let primes = self
            .primes
            .as_ref()
            .filter(|p| !p.is_empty())
            .ok_or_else(|| ExperimentError::Config("distribution runs need a nonempty prime set".into()))?;
        for &p in primes {
            if !crate::primes::is_prime(p) {
                return Err(ExperimentError::Config(format!("{p} is not prime")));
            }
            if p.checked_pow(self.depth + 1).is_none_or(|q| q >= 1 << 63) {
                return Err(ExperimentError::Config(format!("{p}^{} does not fit in 63 bits", self.depth + 1)));
            }
        }
        Ok(primes)
    }

    fn validate_moment(&self) -> Result<(u64, &AbelianGroup), ExperimentError> {
        self.validate_common()?;
        if self.primes.is_some() {
            return Err(ExperimentError::Config("moment runs take a modulus, not primes".into()));
        }
        let (Some(a), Some(g)) = (self.modulus, self.group.as_ref()) else {
            return Err(ExperimentError::Config("moment runs need both a modulus and a target group".into()));
        };
        if a == 0 || a >= 1 << 62 {
            return Err(ExperimentError::Config(format!("modulus {a} out of range")));
        }
        if !(num_bigint::BigUint::from(a) % g.exponent()).is_zero() {
            return Err(ExperimentError::Config(format!("exponent of {g} does not divide {a}")));
        }
        Ok((a, g))
    }

    fn validate_rate(&self) -> Result<(), ExperimentError> {
        self.validate_common()?;
        if self.primes.is_some() || self.modulus.is_some() || self.group.is_some() {
            return Err(ExperimentError::Config("event-rate runs take no primes, modulus or group".into()));
        }
        Ok(())
    }
}

/// Reads a model: `bernoulli` (edge probability `q`, default 1/2),
/// `uniform:K` (multiplicity uniform on `0..=K`), or a path to a JSON
/// [`EdgeModel`].
pub fn parse_model(spec: &str, q: Option<f64>) -> Result<EdgeModel, ExperimentError> {
    if spec == "bernoulli" {
        return Ok(EdgeModel::bernoulli(q.unwrap_or(0.5))?);
    }
    if q.is_some() {
        return Err(ExperimentError::Config("--q only applies to the bernoulli model".into()));
    }
    if let Some(k) = spec.strip_prefix("uniform:") {
        let k: u64 = k.parse().map_err(|_| ExperimentError::Config(format!("bad uniform bound {k:?}")))?;
        return Ok(EdgeModel::uniform(k)?);
    }
    let text = std::fs::read_to_string(spec)
        .map_err(|e| ExperimentError::Io { path: spec.to_string(), message: e.to_string() })?;
    let model: EdgeModel =
        serde_json::from_str(&text).map_err(|e| ExperimentError::Config(format!("{spec}: {e}")))?;
    model.validate()?;
    Ok(model)
}

/// The random stream of trial `index`.
pub fn trial_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// The digraph of trial `index`.
pub fn trial_digraph(cfg: &ExperimentConfig, index: u64) -> Digraph {
    cfg.model.sample_digraph(cfg.n, &mut trial_rng(cfg.seed, index))
}

fn run_trials<T, F>(cfg: &ExperimentConfig, f: F) -> Result<Vec<T>, ExperimentError>
where
    T: Send,
    F: Fn(u64, &Digraph) -> Result<T, ExperimentError> + Sync,
{
    let sampler = cfg.model.sampler();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.workers)
        .build()
        .map_err(|e| ExperimentError::Config(format!("thread pool: {e}")))?;
    pool.install(|| {
        (0..cfg.trials)
            .into_par_iter()
            .map(|i| {
                let g = sampler.sample_digraph(cfg.n, &mut trial_rng(cfg.seed, i));
                f(i, &g)
            })
            .collect()
    })
}

fn audited(cfg: &ExperimentConfig, index: u64) -> bool {
    index % cfg.audit_every == 0
}

/// Exact group for audits, deleting a different row than the fast paths.
fn audit_group(g: &Digraph) -> Result<SandpileGroup, ExperimentError> {
    Ok(total_sandpile_via_row(g, 0)?)
}

/// Classifies a digraph whose total group might be infinite.
fn pathological_bucket(g: &Digraph) -> Result<&'static str, ExperimentError> {
    Ok(match total_sandpile(g)? {
        SandpileGroup::Infinite { .. } => INFINITE,
        SandpileGroup::Finite(_) => NOT_STRONGLY_CONNECTED,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
enum DistOutcome {
    Group(AbelianGroup),
    Large,
    Bucket(&'static str),
}

impl DistOutcome {
    fn label(&self) -> String {
        match self {
            DistOutcome::Group(g) => g.to_string(),
            DistOutcome::Large => LARGE.into(),
            DistOutcome::Bucket(b) => (*b).into(),
        }
    }
}

/// Sylow part at the primes `P` from the elementary divisors modulo
/// `p^(depth+1)`; an exponent above `depth` makes the outcome [`LARGE`].
fn distribution_trial(cfg: &ExperimentConfig, primes: &BTreeSet<u64>, index: u64, g: &Digraph) -> Result<(DistOutcome, bool), ExperimentError> {
    if !g.is_strongly_connected() {
        return Ok((DistOutcome::Bucket(pathological_bucket(g)?), false));
    }
    let m = g.restricted_laplacian(g.n() - 1)?;
    let mut sylow = BTreeMap::new();
    let mut large = false;
    for &p in primes {
        let part = cokernel_prime_power(&m, p, cfg.depth + 1).map_err(|e| ExperimentError::Config(e.to_string()))?;
        large |= part.largest() > cfg.depth;
        sylow.insert(p, part);
    }
    let outcome = if large {
        DistOutcome::Large
    } else {
        DistOutcome::Group(AbelianGroup::from_sylow(sylow).expect("primes validated"))
    };
    if !audited(cfg, index) {
        return Ok((outcome, false));
    }
    let exact = audit_group(g)?;
    let Some(exact) = exact.finite() else {
        return Err(ExperimentError::Consistency(format!("trial {index}: strongly connected but infinite")));
    };
    let exact = exact.sylow_restrict(primes).map_err(|e| ExperimentError::Consistency(e.to_string()))?;
    let agrees = match &outcome {
        DistOutcome::Group(h) => *h == exact,
        _ => primes.iter().any(|&p| exact.sylow_at(p).largest() > cfg.depth),
    };
    if !agrees {
        return Err(ExperimentError::Consistency(format!(
            "trial {index}: fast path gave {} but exact Sylow part is {exact}",
            outcome.label()
        )));
    }
    Ok((outcome, true))
}

/// Every group with Sylow exponents at most `depth` at each prime of `P`,
/// with its limiting probability `∏ Q_p / (|G|·|Aut G|)`.
fn theory_table(primes: &BTreeSet<u64>, depth: u32) -> Result<Vec<(AbelianGroup, f64)>, ExperimentError> {
    let mut q = 1.0;
    let mut combos: Vec<BTreeMap<u64, Partition>> = vec![BTreeMap::new()];
    for &p in primes {
        q *= q_p(p, 1e-15)?.value_f64();
        let types: Vec<Partition> = enumerate_p_groups(p, depth)
            .map_err(|e| ExperimentError::Config(e.to_string()))?
            .into_iter()
            .filter(|lam| lam.largest() <= depth)
            .collect();
        combos = combos
            .into_iter()
            .flat_map(|m| {
                types.iter().map(move |lam| {
                    let mut m = m.clone();
                    m.insert(p, lam.clone());
                    m
                })
            })
            .collect();
    }
    Ok(combos
        .into_iter()
        .map(|m| {
            let g = AbelianGroup::from_sylow(m).expect("primes validated");
            let weight = (g.order() * aut_order(&g)).to_f64().unwrap_or(f64::INFINITY);
            (g, q / weight)
        })
        .collect())
}

/// Empirical law of the Sylow part of the total sandpile group at `P`,
/// against the Cohen-Lenstra limit.
pub fn run_distribution(cfg: &ExperimentConfig) -> Result<ExperimentReport, ExperimentError> {
    let primes = cfg.validate_distribution()?;
    let results = run_trials(cfg, |i, g| distribution_trial(cfg, primes, i, g))?;
    let trials = cfg.trials;
    let mut counts: BTreeMap<DistOutcome, u64> = BTreeMap::new();
    let mut audit = AuditSummary::default();
    for (outcome, was_audited) in results {
        *counts.entry(outcome).or_default() += 1;
        audit.audited += u64::from(was_audited);
    }
    let theory = theory_table(primes, cfg.depth)?;
    let theory_of: BTreeMap<&AbelianGroup, f64> = theory.iter().map(|(g, p)| (g, *p)).collect();
    for (g, p) in &theory {
        if *p >= THEORY_LISTING_MASS {
            counts.entry(DistOutcome::Group(g.clone())).or_default();
        }
    }
    let mut empirical = BTreeMap::new();
    let mut theory_map = BTreeMap::new();
    let mut outcomes = Vec::new();
    for (outcome, &count) in &counts {
        let frequency = count as f64 / trials as f64;
        let (group, reference) = match outcome {
            DistOutcome::Group(g) => (Some(g.clone()), theory_of.get(g).copied()),
            _ => (None, None),
        };
        let label = outcome.label();
        match (&group, reference) {
            (Some(_), Some(t)) => {
                theory_map.insert(label.clone(), t);
                *empirical.entry(label.clone()).or_default() += frequency;
            }
            _ => *empirical.entry(OTHER.to_string()).or_default() += frequency,
        }
        outcomes.push(OutcomeRow::new(label, group, count, trials, reference));
    }
    let tv = total_variation(&empirical, &theory_map);
    Ok(ExperimentReport {
        total_variation: Some(tv),
        outcomes,
        ..ExperimentReport::new("distribution", cfg, label_counts(&counts), audit)
    })
}

fn label_counts(counts: &BTreeMap<DistOutcome, u64>) -> BTreeMap<String, u64> {
    counts.iter().filter(|(_, &c)| c > 0).map(|(o, &c)| (o.label(), c)).collect()
}

/// Mean number of surjections from `S ⊗ Z/a` onto the target group, against
/// `1/|G|`.
pub fn run_moment(cfg: &ExperimentConfig) -> Result<ExperimentReport, ExperimentError> {
    let (a, target) = cfg.validate_moment()?;
    let results = run_trials(cfg, |i, g| {
        let m = g.restricted_laplacian(g.n() - 1)?;
        let reduced = cokernel_mod(&m, a).map_err(|e| ExperimentError::Config(e.to_string()))?;
        let surjections = sur_count(&reduced, target).to_f64().unwrap_or(f64::INFINITY);
        let label = if g.is_strongly_connected() { reduced.to_string() } else { pathological_bucket(g)?.to_string() };
        let was_audited = audited(cfg, i);
        if was_audited {
            let exact = audit_group(g)?.tensor_mod(a);
            if exact != reduced {
                return Err(ExperimentError::Consistency(format!(
                    "trial {i}: S ⊗ Z/{a} is {exact} but the fast path gave {reduced}"
                )));
            }
        }
        Ok((label, surjections, was_audited))
    })?;
    let mut counts: BTreeMap<String, u64> = BTreeMap::new();
    let mut values = Vec::with_capacity(results.len());
    let mut audit = AuditSummary::default();
    for (label, value, was_audited) in results {
        *counts.entry(label).or_default() += 1;
        values.push(value);
        audit.audited += u64::from(was_audited);
    }
    let estimate = mean_estimate(&values);
    let reference = 1.0 / target.order().to_f64().unwrap_or(f64::INFINITY);
    let deviation = estimate.mean - reference;
    let moment = MomentSummary {
        modulus: a,
        target: target.clone(),
        deviation,
        deviation_in_std_errors: (estimate.std_error > 0.0).then(|| deviation / estimate.std_error),
        estimate,
        reference,
    };
    Ok(ExperimentReport { moment: Some(moment), ..ExperimentReport::new("moment", cfg, counts, audit) })
}

/// Events whose frequency [`run_event_rates`] can estimate.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Event {
    /// Trivial total sandpile group.
    Coeulerian,
    /// Finite cyclic total sandpile group.
    Cyclic,
    /// Strongly connected with in-degree equal to out-degree everywhere.
    Eulerian,
    /// Total sandpile group with a free part.
    Infinite,
    NotStronglyConnected,
}

impl Event {
    pub const ALL: [Event; 5] =
        [Event::Coeulerian, Event::Cyclic, Event::Eulerian, Event::Infinite, Event::NotStronglyConnected];

    pub fn name(self) -> &'static str {
        match self {
            Event::Coeulerian => "coeulerian",
            Event::Cyclic => "cyclic",
            Event::Eulerian => "eulerian",
            Event::Infinite => "infinite",
            Event::NotStronglyConnected => "not_strongly_connected",
        }
    }

    pub fn parse(s: &str) -> Option<Event> {
        Event::ALL.into_iter().find(|e| e.name() == s)
    }
}

/// Limit references for an event: the proven bound on the limsup and the
/// conjectured exact limit, which coincide in value but not in status.
fn event_references(event: Event) -> Result<(Option<Reference>, Option<Reference>), ExperimentError> {
    let constant = match event {
        Event::Coeulerian => q_total(1e-9)?,
        Event::Cyclic => cyclic_constant(1e-8)?,
        _ => return Ok((None, None)),
    };
    let value = constant.value_f64();
    let tail_bound = constant.tail_f64();
    Ok((
        Some(Reference { value, tail_bound, status: "theorem: upper bound on the limsup".into() }),
        Some(Reference { value, tail_bound, status: "conjecture: exact limit".into() }),
    ))
}

fn group_class(s: &SandpileGroup) -> &'static str {
    match s {
        SandpileGroup::Infinite { .. } => INFINITE,
        g if g.is_trivial() => "trivial",
        g if g.is_cyclic() => "cyclic_nontrivial",
        _ => "noncyclic",
    }
}

/// Frequencies of several events, estimated from the same trials.
pub fn run_event_rates(cfg: &ExperimentConfig, events: &[Event]) -> Result<ExperimentReport, ExperimentError> {
    cfg.validate_rate()?;
    let results = run_trials(cfg, |i, g| {
        let s = total_sandpile(g)?;
        let strongly_connected = g.is_strongly_connected();
        let was_audited = audited(cfg, i);
        if was_audited {
            let exact = audit_group(g)?;
            if exact != s {
                return Err(ExperimentError::Consistency(format!(
                    "trial {i}: total group by row {} is not the one by row 0",
                    g.n() - 1
                )));
            }
        }
        let class = match (&s, strongly_connected) {
            (SandpileGroup::Finite(_), false) => NOT_STRONGLY_CONNECTED,
            _ => group_class(&s),
        };
        let hit = |e: Event| match e {
            Event::Coeulerian => s.is_trivial(),
            Event::Cyclic => s.is_cyclic(),
            Event::Eulerian => strongly_connected && g.is_balanced(),
            Event::Infinite => s.finite().is_none(),
            Event::NotStronglyConnected => !strongly_connected,
        };
        let hits: Vec<bool> = events.iter().map(|&e| hit(e)).collect();
        Ok((class, hits, was_audited))
    })?;
    let mut counts: BTreeMap<String, u64> = BTreeMap::new();
    let mut hits = vec![0u64; events.len()];
    let mut audit = AuditSummary::default();
    for (class, row, was_audited) in results {
        *counts.entry(class.to_string()).or_default() += 1;
        for (h, &x) in hits.iter_mut().zip(&row) {
            *h += u64::from(x);
        }
        audit.audited += u64::from(was_audited);
    }
    let trials = cfg.trials;
    let mut rates = Vec::new();
    for (&event, &count) in events.iter().zip(&hits) {
        let frequency = count as f64 / trials as f64;
        let ci95 = wilson(count, trials, Z95);
        let (bound, conjectured_limit) = event_references(event)?;
        let within_bound = bound.as_ref().map(|b| frequency <= b.value + 3.0 * ci95.half_width());
        rates.push(RateSummary {
            event,
            count,
            frequency,
            ci95,
            ci99: wilson(count, trials, Z99),
            bound,
            conjectured_limit,
            within_bound,
        });
    }
    Ok(ExperimentReport { rates, ..ExperimentReport::new("event_rate", cfg, counts, audit) })
}

/// Frequency of one event.
pub fn run_event_rate(cfg: &ExperimentConfig, event: Event) -> Result<ExperimentReport, ExperimentError> {
    run_event_rates(cfg, &[event])
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(n: usize, trials: u64, seed: u64) -> ExperimentConfig {
        ExperimentConfig::new(n, trials, EdgeModel::bernoulli(0.5).unwrap(), seed)
    }

    #[test]
    fn streams_are_per_trial() {
        let c = cfg(6, 3, 9);
        assert_eq!(trial_digraph(&c, 2), trial_digraph(&c, 2));
        assert_ne!(trial_digraph(&c, 1), trial_digraph(&c, 2));
    }

    #[test]
    fn distribution_counts_sum_to_trials() {
        let c = cfg(12, 60, 3).with_primes(&[2]).with_workers(2);
        let r = run_distribution(&c).unwrap();
        assert_eq!(r.counts.values().sum::<u64>(), 60);
        assert!(r.outcomes.iter().all(|o| o.ci95.contains(o.frequency)));
        assert_eq!(r.audit.audited, 1);
        let tv = r.total_variation.unwrap();
        assert!((0.0..=1.0).contains(&tv));
        let single = run_distribution(&cfg(12, 1, 3).with_primes(&[2])).unwrap();
        assert_eq!(single.counts.values().sum::<u64>(), 1);
        assert!(single.total_variation.is_some());
    }

    #[test]
    fn workers_do_not_change_reports() {
        let c = cfg(10, 40, 5).with_primes(&[2, 3]);
        let a = serde_json::to_string(&run_distribution(&c).unwrap()).unwrap();
        let b = serde_json::to_string(&run_distribution(&c.clone().with_workers(4)).unwrap()).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn trivial_target_moment_is_one() {
        let c = cfg(8, 30, 1).with_moment(2, AbelianGroup::trivial());
        let m = run_moment(&c).unwrap().moment.unwrap();
        assert_eq!((m.estimate.mean, m.estimate.std_error), (1.0, 0.0));
    }

    #[test]
    fn moment_rejects_bad_modulus() {
        let z4 = AbelianGroup::from_cyclic_orders(&[4]).unwrap();
        assert!(matches!(run_moment(&cfg(8, 3, 1).with_moment(2, z4)), Err(ExperimentError::Config(_))));
        assert!(matches!(run_distribution(&cfg(8, 3, 1)), Err(ExperimentError::Config(_))));
        assert!(matches!(run_distribution(&cfg(8, 0, 1).with_primes(&[2])), Err(ExperimentError::Config(_))));
    }

    #[test]
    fn rate_report_separates_bound_and_conjecture() {
        let c = cfg(10, 20, 2);
        let r = run_event_rates(&c, &Event::ALL).unwrap();
        assert_eq!(r.counts.values().sum::<u64>(), 20);
        let json = serde_json::to_value(&r).unwrap();
        let coeulerian = &json["rates"][0];
        assert_eq!(coeulerian["event"], "coeulerian");
        assert!(coeulerian["bound"]["status"].as_str().unwrap().starts_with("theorem"));
        assert!(coeulerian["conjectured_limit"]["status"].as_str().unwrap().starts_with("conjecture"));
        assert!(json["rates"][2]["bound"].is_null());
    }

    #[test]
    fn model_specs() {
        assert_eq!(parse_model("bernoulli", Some(0.3)).unwrap(), EdgeModel::bernoulli(0.3).unwrap());
        assert_eq!(parse_model("uniform:2", None).unwrap(), EdgeModel::uniform(2).unwrap());
        assert!(parse_model("uniform:x", None).is_err());
        assert!(parse_model("uniform:2", Some(0.5)).is_err());
        assert!(parse_model("/nonexistent/model.json", None).is_err());
    }
}
