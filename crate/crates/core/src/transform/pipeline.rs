use std::fmt;
use std::str::FromStr;

use serde::Serialize;
use sha2::{Digest, Sha256};
use thiserror::Error;

use super::ground::ground_traced;
use super::ntyxt::remove_ntyxt_traced;
use super::rplus::{rplus_traced, DEFAULT_PICK_CAP};
use super::xynft::{to_decent_xynft_traced, DEFAULT_FUEL};
use super::{require_standard, uniformize, Provenance, TransformError};
use crate::syntax::{print_tss, Term, Tss};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Stage {
    Ntyxt,
    Ground,
    Xynft,
    Uniform,
    Rplus,
}

impl Stage {
    pub const ALL: [Stage; 5] = [Stage::Ntyxt, Stage::Ground, Stage::Xynft, Stage::Uniform, Stage::Rplus];

    pub fn name(self) -> &'static str {
        match self {
            Stage::Ntyxt => "ntyxt",
            Stage::Ground => "ground",
            Stage::Xynft => "xynft",
            Stage::Uniform => "uniform",
            Stage::Rplus => "rplus",
        }
    }
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Stage {
    type Err = String;

    fn from_str(s: &str) -> Result<Stage, String> {
        Stage::ALL.into_iter().find(|st| st.name() == s).ok_or_else(|| format!("unknown stage `{s}`"))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{stage} stage: {error}")]
pub struct PipelineError {
    pub stage: Stage,
    #[source]
    pub error: TransformError,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct StageRecord {
    pub stage: Stage,
    pub input_digest: String,
    pub output_digest: String,
    pub rules_in: usize,
    pub rules_out: usize,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct PipelineTrace {
    pub stages: Vec<StageRecord>,
    pub provenance: Vec<Provenance>,
    pub fuel_exhausted: bool,
}

#[derive(Clone, Debug)]
pub struct PipelineOptions {
    pub universe: Option<Vec<Term>>,
    pub fuel: usize,
    pub pick_cap: u64,
}

impl Default for PipelineOptions {
    fn default() -> PipelineOptions {
        PipelineOptions { universe: None, fuel: DEFAULT_FUEL, pick_cap: DEFAULT_PICK_CAP }
    }
}

/// Hex SHA-256 of the printed specification.
pub fn digest(tss: &Tss) -> String {
    Sha256::digest(print_tss(tss).as_bytes()).iter().map(|b| format!("{b:02x}")).collect()
}

/// Runs every stage in order, stopping after `last`.
pub fn plus_pipeline(tss: &Tss, opts: &PipelineOptions) -> Result<(Tss, PipelineTrace), PipelineError> {
    run_until(tss, opts, Stage::Rplus)
}

pub(crate) fn run_until(tss: &Tss, opts: &PipelineOptions, last: Stage) -> Result<(Tss, PipelineTrace), PipelineError> {
    let mut trace = PipelineTrace::default();
    let mut cur = tss.clone();
    require_standard(&cur).map_err(|error| PipelineError { stage: Stage::Ntyxt, error })?;
    for stage in Stage::ALL {
        let at = |error| PipelineError { stage, error };
        let (next, prov) = match stage {
            Stage::Ntyxt => remove_ntyxt_traced(&cur).map_err(at)?,
            Stage::Ground => ground_traced(&cur, opts.universe.as_deref()).map_err(at)?,
            Stage::Xynft => {
                let (out, prov) = to_decent_xynft_traced(&cur, opts.fuel).map_err(at)?;
                trace.fuel_exhausted |= out.fuel_exhausted;
                (out.tss, prov)
            }
            Stage::Uniform => (uniformize(&cur).map_err(at)?, Vec::new()),
            Stage::Rplus => rplus_traced(&cur, opts.pick_cap).map_err(at)?,
        };
        trace.stages.push(StageRecord {
            stage,
            input_digest: digest(&cur),
            output_digest: digest(&next),
            rules_in: cur.rules.len(),
            rules_out: next.rules.len(),
        });
        trace.provenance.extend(prov);
        cur = next;
        if stage == last {
            break;
        }
    }
    Ok((cur, trace))
}

/// Runs the pipeline up to and including `last`.
pub fn run_stages(tss: &Tss, opts: &PipelineOptions, last: Stage) -> Result<(Tss, PipelineTrace), PipelineError> {
    run_until(tss, opts, last)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::load;
    use crate::parse_tss;

    #[test]
    fn stages_run_in_order() {
        let (out, trace) = plus_pipeline(&load("bpa"), &PipelineOptions::default()).unwrap();
        let names: Vec<Stage> = trace.stages.iter().map(|s| s.stage).collect();
        assert_eq!(names, Stage::ALL);
        assert_eq!(trace.stages[0].input_digest, digest(&load("bpa")));
        assert_eq!(trace.stages[4].output_digest, digest(&out));
        assert!(out.rules.iter().any(|r| r.conclusion.to_string() == "eps -/a->" && r.premises.is_empty()));
        assert!(!trace.fuel_exhausted);
    }

    #[test]
    fn rejections_name_their_stage() {
        let e = plus_pipeline(&load("no-lookahead"), &PipelineOptions::default()).unwrap_err();
        assert_eq!(e.stage, Stage::Ntyxt);
        assert!(matches!(e.error, TransformError::Lookahead(_)));
        let e = plus_pipeline(&load("decency-needed"), &PipelineOptions::default()).unwrap_err();
        assert_eq!(e.stage, Stage::Ground);
        assert!(matches!(e.error, TransformError::NoUniverse(_)));
    }

    #[test]
    fn processed_input_only_gains_negative_rules() {
        let tss = load("closure");
        let (out, trace) = plus_pipeline(&tss, &PipelineOptions::default()).unwrap();
        for rec in &trace.stages[..4] {
            assert_eq!(rec.rules_in, rec.rules_out, "{:?}", rec.stage);
        }
        assert_eq!(out.rules.len(), tss.rules.len() + 4);
        let again = parse_tss(&print_tss(&out)).unwrap();
        assert_eq!(again.rules.len(), out.rules.len());
    }
}
