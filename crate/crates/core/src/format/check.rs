use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::Serialize;
use thiserror::Error;

use super::classify::{classify, RuleClass};
use super::lambda::{all_positions, ArgPos, Lambda};
use super::occurrence::OccurrenceReport;
use crate::syntax::{Rule, Tss, Var};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Format {
    NtyftNtyxt,
    TyftTyxt,
    ReadySimulation,
    ReadyTrace,
    Readiness,
    FailureTrace,
    PartialTrace,
    DeSimone,
    Gsos,
}

impl Format {
    pub const ALL: [Format; 9] = [
        Format::NtyftNtyxt,
        Format::TyftTyxt,
        Format::ReadySimulation,
        Format::ReadyTrace,
        Format::Readiness,
        Format::FailureTrace,
        Format::PartialTrace,
        Format::DeSimone,
        Format::Gsos,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Format::NtyftNtyxt => "ntyft-ntyxt",
            Format::TyftTyxt => "tyft-tyxt",
            Format::ReadySimulation => "ready-simulation",
            Format::ReadyTrace => "ready-trace",
            Format::Readiness => "readiness",
            Format::FailureTrace => "failure-trace",
            Format::PartialTrace => "partial-trace",
            Format::DeSimone => "de-simone",
            Format::Gsos => "gsos",
        }
    }

    fn safety(self) -> Option<Safety> {
        match self {
            Format::ReadyTrace => Some(Safety::ReadyTrace),
            Format::Readiness => Some(Safety::Readiness),
            Format::FailureTrace | Format::PartialTrace | Format::DeSimone => Some(Safety::FailureTrace),
            _ => None,
        }
    }
}

impl fmt::Display for Format {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("unknown format `{0}`")]
pub struct UnknownFormat(pub String);

impl FromStr for Format {
    type Err = UnknownFormat;

    fn from_str(s: &str) -> Result<Format, UnknownFormat> {
        Format::ALL.into_iter().find(|f| f.name() == s).ok_or_else(|| UnknownFormat(s.to_string()))
    }
}

/// The three levels of safety a rule can satisfy with respect to liquid positions.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub enum Safety {
    ReadyTrace,
    Readiness,
    FailureTrace,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub enum Clause {
    NotNtyftNtyxt,
    NotStandard,
    NotPositive,
    NotNxyft,
    Lookahead,
    FreeVariable,
    PropagatedTwice,
    PropagatedAtFrozenPosition,
    PropagatedAndPolled,
    PolledTwice,
    PolledAtFrozenPosition,
    PolledInNegativePremise,
    PolledInPositivePremise,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub rule: String,
    pub var: Option<Var>,
    pub clause: Clause,
    pub reason: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.rule, self.reason)
    }
}

fn violation(rule: &Rule, var: Option<&Var>, clause: Clause, reason: String) -> Violation {
    Violation { rule: rule.name.clone(), var: var.cloned(), clause, reason }
}

/// Checks one rule for the given safety level under `lambda`.
pub fn rule_safety(rule: &Rule, lambda: &Lambda, level: Safety) -> Vec<Violation> {
    let mut out = Vec::new();
    if !super::classify::has_no_lookahead(rule) {
        out.push(violation(rule, None, Clause::Lookahead, "a premise target occurs in a premise source".into()));
        return out;
    }
    let rep = OccurrenceReport::new(rule, lambda);
    for x in &rep.floating {
        let propagated: Vec<_> = rep.propagated(x).collect();
        let polled: Vec<_> = rep.polled(x).collect();
        if rule.is_standard() {
            if propagated.len() > 1 {
                out.push(violation(rule, Some(x), Clause::PropagatedTwice, format!("{x} is propagated more than once")));
            }
            if propagated.iter().any(|o| !o.liquid) {
                out.push(violation(rule, Some(x), Clause::PropagatedAtFrozenPosition, format!("{x} is propagated at a frozen position")));
            }
            if level >= Safety::Readiness && !propagated.is_empty() && !polled.is_empty() {
                out.push(violation(rule, Some(x), Clause::PropagatedAndPolled, format!("{x} is both propagated and polled")));
            }
            if level >= Safety::FailureTrace {
                if polled.len() > 1 {
                    out.push(violation(rule, Some(x), Clause::PolledTwice, format!("{x} is polled more than once")));
                }
                if polled.iter().any(|o| !o.liquid) {
                    out.push(violation(rule, Some(x), Clause::PolledAtFrozenPosition, format!("{x} is polled at a frozen position")));
                }
                if polled.iter().any(|o| o.in_negative_premise()) {
                    out.push(violation(rule, Some(x), Clause::PolledInNegativePremise, format!("{x} is polled in negative premises")));
                }
            }
        } else if level >= Safety::FailureTrace {
            if polled.iter().any(|o| !o.liquid) {
                out.push(violation(rule, Some(x), Clause::PolledAtFrozenPosition, format!("{x} is polled at a frozen position")));
            }
            if polled.iter().any(|o| !o.in_negative_premise()) {
                out.push(violation(rule, Some(x), Clause::PolledInPositivePremise, format!("{x} is polled in positive premises")));
            }
        }
    }
    out
}

/// Positions that must be liquid given the variables floating under `lambda`.
fn demands(tss: &Tss, lambda: &Lambda, level: Safety) -> BTreeSet<ArgPos> {
    let mut out = BTreeSet::new();
    for r in &tss.rules {
        let rep = OccurrenceReport::new(r, lambda);
        for o in &rep.occurrences {
            if !rep.floating.contains(&o.var) {
                continue;
            }
            let needed = if r.is_standard() {
                o.is_propagated() || (level >= Safety::FailureTrace && o.is_polled())
            } else {
                level >= Safety::FailureTrace && o.is_polled()
            };
            if needed {
                out.extend(o.positions.iter().cloned());
            }
        }
    }
    out
}

/// Smallest set of liquid positions meeting the liquidity demands of `level`.
///
/// Every Λ for which the rules are safe contains this set, and enlarging Λ only
/// adds floating variables, so the rules are safe for some Λ iff they are safe for this one.
pub fn lambda0(tss: &Tss, level: Safety) -> Lambda {
    let mut lambda = Lambda::empty();
    loop {
        let mut changed = false;
        for p in demands(tss, &lambda, level) {
            changed |= lambda.insert(p);
        }
        if !changed {
            return lambda;
        }
    }
}

pub const EXHAUSTIVE_LIMIT: usize = 20;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("exhaustive search over {0} argument positions exceeds the limit of {EXHAUSTIVE_LIMIT}")]
pub struct TooManyPositions(pub usize);

/// All subset-minimal Λ for which every rule is safe at `level`.
pub fn minimal_lambdas(tss: &Tss, level: Safety) -> Result<Vec<Lambda>, TooManyPositions> {
    let positions = all_positions(&tss.signature);
    let n = positions.len();
    if n > EXHAUSTIVE_LIMIT {
        return Err(TooManyPositions(n));
    }
    let mut masks: Vec<u32> = (0..1u32 << n).collect();
    masks.sort_by_key(|m| (m.count_ones(), *m));
    let mut found: Vec<u32> = Vec::new();
    for m in masks {
        if found.iter().any(|&f| f & m == f) {
            continue;
        }
        let lambda: Lambda = (0..n).filter(|i| m & (1 << i) != 0).map(|i| positions[i].clone()).collect();
        if tss.rules.iter().all(|r| rule_safety(r, &lambda, level).is_empty()) {
            found.push(m);
        }
    }
    Ok(found
        .into_iter()
        .map(|m| (0..n).filter(|i| m & (1 << i) != 0).map(|i| positions[i].clone()).collect())
        .collect())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum LambdaMode {
    /// Least fixpoint of the liquidity demands, with exhaustive search as a cross-check on failure.
    Auto,
    Exhaustive,
    /// Liquidity flags from the `sig` lines; undeclared positions are frozen.
    Declared,
    Given(Lambda),
}

#[derive(Clone, Debug, Serialize)]
pub struct FormatReport {
    pub format: Format,
    pub holds: bool,
    pub lambda: Option<Lambda>,
    pub minimal_lambdas: Vec<Lambda>,
    pub violations: Vec<Violation>,
    /// Demanded positions that the declared flags leave frozen.
    pub undeclared_demands: Vec<ArgPos>,
    pub rule_classes: Vec<(String, RuleClass)>,
}

fn shape_violations(tss: &Tss, fmt: Format, classes: &[RuleClass]) -> Vec<Violation> {
    let mut out = Vec::new();
    for (r, c) in tss.rules.iter().zip(classes) {
        if !(c.ntyft || c.ntyxt) {
            out.push(violation(r, None, Clause::NotNtyftNtyxt, "rule is neither ntyft nor ntyxt".into()));
        }
        let needs_positive = matches!(fmt, Format::TyftTyxt | Format::PartialTrace | Format::DeSimone);
        if needs_positive && !r.is_positive() {
            out.push(violation(r, None, Clause::NotPositive, "rule has a negative premise or conclusion".into()));
        }
        if matches!(fmt, Format::Gsos | Format::DeSimone) {
            if !c.standard {
                out.push(violation(r, None, Clause::NotStandard, "rule has a negative conclusion".into()));
            }
            if !c.nxyft {
                out.push(violation(r, None, Clause::NotNxyft, "rule is not nxyft".into()));
            }
            if !c.no_lookahead {
                out.push(violation(r, None, Clause::Lookahead, "a premise target occurs in a premise source".into()));
            }
            if !c.no_free_vars {
                out.push(violation(r, None, Clause::FreeVariable, "rule has free variables".into()));
            }
        }
        if fmt == Format::ReadySimulation && !c.no_lookahead {
            out.push(violation(r, None, Clause::Lookahead, "a premise target occurs in a premise source".into()));
        }
    }
    out
}

fn safety_violations(tss: &Tss, lambda: &Lambda, level: Safety) -> Vec<Violation> {
    tss.rules.iter().flat_map(|r| rule_safety(r, lambda, level)).collect()
}

/// Decides membership of `tss` in `fmt`.
pub fn check_format(tss: &Tss, fmt: Format, mode: &LambdaMode) -> Result<FormatReport, TooManyPositions> {
    let classes: Vec<RuleClass> = tss.rules.iter().map(classify).collect();
    let mut report = FormatReport {
        format: fmt,
        holds: false,
        lambda: None,
        minimal_lambdas: Vec::new(),
        violations: shape_violations(tss, fmt, &classes),
        undeclared_demands: Vec::new(),
        rule_classes: tss.rules.iter().map(|r| r.name.clone()).zip(classes).collect(),
    };
    let Some(level) = fmt.safety() else {
        report.holds = report.violations.is_empty();
        return Ok(report);
    };
    let chosen = if fmt == Format::DeSimone {
        Lambda::universal(&tss.signature)
    } else {
        match mode {
            LambdaMode::Auto => {
                let l0 = lambda0(tss, level);
                if safety_violations(tss, &l0, level).is_empty() {
                    l0
                } else {
                    match minimal_lambdas(tss, level) {
                        Ok(found) if !found.is_empty() => {
                            report.minimal_lambdas = found.clone();
                            found[0].clone()
                        }
                        _ => l0,
                    }
                }
            }
            LambdaMode::Exhaustive => {
                let found = minimal_lambdas(tss, level)?;
                report.minimal_lambdas = found.clone();
                found.into_iter().next().unwrap_or_else(|| lambda0(tss, level))
            }
            LambdaMode::Declared => {
                let declared = Lambda::declared(&tss.signature);
                report.undeclared_demands =
                    lambda0(tss, level).iter().filter(|p| !declared.contains(p)).cloned().collect();
                declared
            }
            LambdaMode::Given(l) => l.clone(),
        }
    };
    report.violations.extend(safety_violations(tss, &chosen, level));
    report.holds = report.violations.is_empty();
    report.lambda = Some(chosen);
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::load;

    fn report(name: &str, fmt: Format) -> FormatReport {
        check_format(&load(name), fmt, &LambdaMode::Auto).unwrap()
    }

    #[test]
    fn bpa_is_failure_trace_with_first_sequencing_argument_liquid() {
        let r = report("bpa", Format::FailureTrace);
        assert!(r.holds, "{:?}", r.violations);
        assert_eq!(r.lambda.unwrap().to_string(), "{(.,1)}");
        assert!(report("bpa", Format::PartialTrace).holds);
        assert!(report("bpa", Format::DeSimone).holds);
        assert!(report("bpa", Format::Gsos).holds);
    }

    #[test]
    fn priority_is_ready_trace_but_not_readiness() {
        assert!(report("priority", Format::ReadyTrace).holds);
        let r = report("priority", Format::Readiness);
        assert!(!r.holds);
        assert!(r.violations.iter().any(|v| v.clause == Clause::PropagatedAndPolled && v.rule == "prio[v=c]"));
    }

    #[test]
    fn table_verdicts() {
        let ip = report("initial-priority", Format::FailureTrace);
        assert!(ip.holds);
        assert!(!ip.lambda.unwrap().contains(&ArgPos::new("ith", 0)));
        let k = report("kleene", Format::FailureTrace);
        assert!(k.holds);
        assert!(!k.lambda.unwrap().contains(&ArgPos::new("*", 0)));
        assert!(report("bpa0-seq", Format::Readiness).holds);
        let ft = report("bpa0-seq", Format::FailureTrace);
        assert!(!ft.holds);
        assert!(ft.violations.iter().any(|v| v.clause == Clause::PolledInNegativePremise));
        assert!(report("refinement", Format::Readiness).holds);
        assert!(!report("ex7", Format::PartialTrace).holds);
    }

    #[test]
    fn counterexamples_fail_their_formats() {
        assert!(!report("lookahead", Format::ReadySimulation).holds);
        assert!(!report("ex2", Format::ReadyTrace).holds);
        assert!(!report("ex2-nonliquid-a", Format::ReadyTrace).holds);
        assert!(!report("ex2-nonliquid-b", Format::ReadyTrace).holds);
        assert!(report("ex3", Format::ReadyTrace).holds);
        assert!(!report("ex3", Format::Readiness).holds);
        assert!(report("ex4", Format::Readiness).holds);
        assert!(!report("ex4", Format::FailureTrace).holds);
        assert!(report("ex5", Format::Readiness).holds);
        assert!(!report("ex5", Format::FailureTrace).holds);
        assert!(!report("ex6", Format::FailureTrace).holds);
    }

    #[test]
    fn declared_liquidity_is_checked_as_given() {
        let r = check_format(&load("ex2-nonliquid-a"), Format::ReadyTrace, &LambdaMode::Declared).unwrap();
        assert!(r.violations.iter().any(|v| v.clause == Clause::PropagatedAtFrozenPosition));
        assert!(r.undeclared_demands.contains(&ArgPos::new("h", 0)));
    }

    #[test]
    fn exhaustive_search_agrees_with_the_fixpoint() {
        for name in ["bpa", "priority", "kleene", "ex3"] {
            let tss = load(name);
            for level in [Safety::ReadyTrace, Safety::Readiness, Safety::FailureTrace] {
                let l0 = lambda0(&tss, level);
                let ok = tss.rules.iter().all(|r| rule_safety(r, &l0, level).is_empty());
                let found = minimal_lambdas(&tss, level).unwrap();
                assert_eq!(ok, !found.is_empty(), "{name} {level:?}");
                if ok {
                    assert_eq!(found, vec![l0]);
                }
            }
        }
    }
}
