use std::collections::BTreeMap;

use serde::Serialize;

use super::stats::{wilson, Interval, MeanEstimate, Z95, Z99};
use super::{Event, ExperimentConfig, SCHEMA_VERSION};
use crate::abelian_groups::AbelianGroup;

/// Identifies the code that produced a report. `git` is taken from the
/// `SANDPILE_LAB_GIT_DESCRIBE` environment variable at build time.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BuildStamp {
    pub package: &'static str,
    pub version: &'static str,
    pub git: &'static str,
}

impl BuildStamp {
    pub fn current() -> Self {
        BuildStamp {
            package: env!("CARGO_PKG_NAME"),
            version: env!("CARGO_PKG_VERSION"),
            git: option_env!("SANDPILE_LAB_GIT_DESCRIBE").unwrap_or("unknown"),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct AuditSummary {
    /// Trials recomputed by the exact path; any disagreement aborts the run.
    pub audited: u64,
}

/// One line of an outcome table.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OutcomeRow {
    pub outcome: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub group: Option<AbelianGroup>,
    pub count: u64,
    pub frequency: f64,
    pub ci95: Interval,
    pub ci99: Interval,
    /// Limiting probability, when the outcome is a group class.
    pub theory: Option<f64>,
    pub theory_in_ci99: Option<bool>,
}

impl OutcomeRow {
    pub(super) fn new(outcome: String, group: Option<AbelianGroup>, count: u64, trials: u64, theory: Option<f64>) -> Self {
        let ci99 = wilson(count, trials, Z99);
        OutcomeRow {
            outcome,
            group,
            count,
            frequency: count as f64 / trials as f64,
            ci95: wilson(count, trials, Z95),
            ci99,
            theory,
            theory_in_ci99: theory.map(|t| ci99.contains(t)),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MomentSummary {
    pub modulus: u64,
    pub target: AbelianGroup,
    pub estimate: MeanEstimate,
    /// `1/|G|`.
    pub reference: f64,
    pub deviation: f64,
    pub deviation_in_std_errors: Option<f64>,
}

/// A limiting value and the standing of the claim attached to it.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Reference {
    pub value: f64,
    pub tail_bound: f64,
    pub status: String,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RateSummary {
    pub event: Event,
    pub count: u64,
    pub frequency: f64,
    pub ci95: Interval,
    pub ci99: Interval,
    pub bound: Option<Reference>,
    pub conjectured_limit: Option<Reference>,
    /// `frequency ≤ bound + 3·(95% half-width)`.
    pub within_bound: Option<bool>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExperimentReport {
    pub schema_version: u32,
    pub experiment: &'static str,
    pub build: BuildStamp,
    pub config: ExperimentConfig,
    pub trials: u64,
    /// Trials per outcome class; sums to `trials`.
    pub counts: BTreeMap<String, u64>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub outcomes: Vec<OutcomeRow>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub total_variation: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub moment: Option<MomentSummary>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub rates: Vec<RateSummary>,
    pub audit: AuditSummary,
}

impl ExperimentReport {
    pub(super) fn new(
        experiment: &'static str,
        cfg: &ExperimentConfig,
        counts: BTreeMap<String, u64>,
        audit: AuditSummary,
    ) -> Self {
        ExperimentReport {
            schema_version: SCHEMA_VERSION,
            experiment,
            build: BuildStamp::current(),
            config: cfg.clone(),
            trials: cfg.trials,
            counts,
            outcomes: Vec::new(),
            total_variation: None,
            moment: None,
            rates: Vec::new(),
            audit,
        }
    }

    pub fn rate(&self, event: Event) -> Option<&RateSummary> {
        self.rates.iter().find(|r| r.event == event)
    }

    pub fn outcome(&self, label: &str) -> Option<&OutcomeRow> {
        self.outcomes.iter().find(|o| o.outcome == label)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("reports serialize");
        s.push('\n');
        s
    }

    /// Flat table: the outcome rows of a distribution run, the summary of a
    /// moment run, or one row per event of a rate run.
    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        let opt = |x: Option<f64>| x.map(|v| v.to_string()).unwrap_or_default();
        let result = (|| -> csv::Result<()> {
            if let Some(m) = &self.moment {
                w.write_record(["modulus", "target", "trials", "mean", "std_error", "ci95_low", "ci95_high", "reference"])?;
                w.write_record([
                    m.modulus.to_string(),
                    m.target.to_string(),
                    self.trials.to_string(),
                    m.estimate.mean.to_string(),
                    m.estimate.std_error.to_string(),
                    m.estimate.ci95.low.to_string(),
                    m.estimate.ci95.high.to_string(),
                    m.reference.to_string(),
                ])?;
            } else if !self.rates.is_empty() {
                w.write_record(["event", "count", "frequency", "ci95_low", "ci95_high", "bound", "conjectured_limit"])?;
                for r in &self.rates {
                    w.write_record([
                        r.event.name().to_string(),
                        r.count.to_string(),
                        r.frequency.to_string(),
                        r.ci95.low.to_string(),
                        r.ci95.high.to_string(),
                        opt(r.bound.as_ref().map(|b| b.value)),
                        opt(r.conjectured_limit.as_ref().map(|b| b.value)),
                    ])?;
                }
            } else {
                w.write_record(["outcome", "count", "frequency", "ci95_low", "ci95_high", "ci99_low", "ci99_high", "theory"])?;
                for o in &self.outcomes {
                    w.write_record([
                        o.outcome.clone(),
                        o.count.to_string(),
                        o.frequency.to_string(),
                        o.ci95.low.to_string(),
                        o.ci95.high.to_string(),
                        o.ci99.low.to_string(),
                        o.ci99.high.to_string(),
                        opt(o.theory),
                    ])?;
                }
            }
            Ok(())
        })();
        result.expect("writing to memory");
        String::from_utf8(w.into_inner().expect("flush to memory")).expect("utf-8")
    }
}
