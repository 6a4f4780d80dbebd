//! The acceptance suite: one runner per criterion, each a list of named
//! checks with a verdict and a short detail line.

pub mod props;

use std::collections::BTreeSet;
use std::time::Instant;

use serde::Serialize;

use crate::decompose::{format_tags, fuzz_precongruence, inverse, FuzzOptions, PrecongruenceOptions};
use crate::fixtures::load;
use crate::format::{check_conservative_syntactic, check_format, ArgPos, Clause, Format, FormatReport, LambdaMode};
use crate::observe::{decorated_traces, preorder_holds, DecoratedKind, Formula, Sublanguage};
use crate::semantics::{
    build_lts, check_conservative_semantic, ground_program, standard_provable, supported_provable, ws_provable, GroundOptions, LtsFragment,
};
use crate::syntax::{alpha_key, parse_literal, parse_term, parse_tss, Action, Rule, Term, Tss, Var};
use crate::transform::{plus_pipeline, rplus_unchecked, PipelineOptions, Stage, TransformError, DEFAULT_PICK_CAP};
use props::{Case, CaseResult};

pub const CRITERIA: [(u8, &str); 8] = [
    (1, "format verdicts of the application and counterexample specifications"),
    (2, "plus construction of the closure example"),
    (3, "decomposition of the inverse example"),
    (4, "divergences between provability notions"),
    (5, "counterexample separations"),
    (6, "application separations"),
    (7, "randomized property suites"),
    (8, "conservative extension"),
];

pub const DEFAULT_SEED: u64 = 20_240_611;

#[derive(Clone, Debug)]
pub struct AcceptanceOptions {
    pub seed: u64,
    /// Cases per randomized suite.
    pub cases: usize,
}

impl Default for AcceptanceOptions {
    fn default() -> AcceptanceOptions {
        AcceptanceOptions { seed: DEFAULT_SEED, cases: 200 }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct CriterionResult {
    pub id: u8,
    pub title: &'static str,
    pub passed: bool,
    pub checks: Vec<CheckResult>,
    pub seconds: f64,
}

impl CriterionResult {
    pub fn failures(&self) -> impl Iterator<Item = &CheckResult> {
        self.checks.iter().filter(|c| !c.passed)
    }

    /// One summary line.
    pub fn line(&self) -> String {
        let verdict = if self.passed { "PASS" } else { "FAIL" };
        let ok = self.checks.iter().filter(|c| c.passed).count();
        format!("{verdict} criterion {}: {} ({ok}/{} checks, {:.1}s)", self.id, self.title, self.checks.len(), self.seconds)
    }
}

type Outcome = Result<String, String>;

#[derive(Default)]
struct Checks(Vec<CheckResult>);

impl Checks {
    fn run(&mut self, name: impl Into<String>, f: impl FnOnce() -> Outcome) {
        let (passed, detail) = match f() {
            Ok(d) => (true, d),
            Err(d) => (false, d),
        };
        self.0.push(CheckResult { name: name.into(), passed, detail });
    }
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn term(tss: &Tss, s: &str) -> Result<Term, String> {
    parse_term(s, &tss.signature).map_err(|e| format!("{s}: {e}"))
}

fn lang(s: &str) -> Sublanguage {
    s.parse().expect("known language name")
}

fn word(s: &str) -> Vec<Action> {
    s.chars().map(|c| Action::new(c.to_string())).collect()
}

pub fn run_criterion(id: u8, opts: &AcceptanceOptions) -> CriterionResult {
    let start = Instant::now();
    let mut checks = Checks::default();
    match id {
        1 => format_verdicts(&mut checks),
        2 => closure_plus(&mut checks),
        3 => inverse_example(&mut checks),
        4 => provability_divergences(&mut checks),
        5 => counterexamples(&mut checks),
        6 => applications(&mut checks),
        7 => properties(&mut checks, opts),
        8 => conservativity(&mut checks),
        _ => checks.run("criterion", || Err(format!("no criterion {id}"))),
    }
    let title = CRITERIA.iter().find(|(i, _)| *i == id).map_or("unknown", |(_, t)| t);
    let passed = !checks.0.is_empty() && checks.0.iter().all(|c| c.passed);
    CriterionResult { id, title, passed, checks: checks.0, seconds: start.elapsed().as_secs_f64() }
}

pub fn run_all(opts: &AcceptanceOptions) -> Vec<CriterionResult> {
    CRITERIA.iter().map(|(id, _)| run_criterion(*id, opts)).collect()
}

fn report(name: &str, fmt: Format) -> Result<FormatReport, String> {
    check_format(&load(name), fmt, &LambdaMode::Auto).map_err(|e| e.to_string())
}

fn lambda_of(r: &FormatReport) -> String {
    r.lambda.as_ref().map_or_else(|| "-".into(), ToString::to_string)
}

fn format_verdicts(c: &mut Checks) {
    c.run("bpa: failure-trace with (.,1) liquid", || {
        let r = report("bpa", Format::FailureTrace)?;
        ensure(r.holds, || format!("{:?}", r.violations))?;
        ensure(lambda_of(&r) == "{(.,1)}", || format!("liquid set {}", lambda_of(&r)))?;
        Ok(format!("liquid {}", lambda_of(&r)))
    });
    c.run("priority: ready-trace yes, readiness no", || {
        ensure(report("priority", Format::ReadyTrace)?.holds, || "not ready-trace".into())?;
        let r = report("priority", Format::Readiness)?;
        ensure(!r.holds, || "readiness holds".into())?;
        let v = r.violations.iter().find(|v| v.clause == Clause::PropagatedAndPolled).ok_or("no propagated and polled violation")?;
        Ok(format!("readiness fails at {}: {}", v.rule, v.reason))
    });
    c.run("initial-priority: failure-trace with ith frozen", || {
        let r = report("initial-priority", Format::FailureTrace)?;
        ensure(r.holds, || format!("{:?}", r.violations))?;
        ensure(!r.lambda.as_ref().is_some_and(|l| l.contains(&ArgPos::new("ith", 0))), || "ith liquid".into())?;
        Ok(format!("liquid {}", lambda_of(&r)))
    });
    c.run("kleene: failure-trace with (*,1) frozen", || {
        let r = report("kleene", Format::FailureTrace)?;
        ensure(r.holds, || format!("{:?}", r.violations))?;
        ensure(!r.lambda.as_ref().is_some_and(|l| l.contains(&ArgPos::new("*", 0))), || "(*,1) liquid".into())?;
        Ok(format!("liquid {}", lambda_of(&r)))
    });
    c.run("bpa0-seq: readiness yes, failure-trace no", || {
        ensure(report("bpa0-seq", Format::Readiness)?.holds, || "not readiness".into())?;
        let r = report("bpa0-seq", Format::FailureTrace)?;
        ensure(!r.holds, || "failure-trace holds".into())?;
        let v = r.violations.iter().find(|v| v.clause == Clause::PolledInNegativePremise).ok_or("no negative polling violation")?;
        Ok(format!("failure-trace fails at {}: {}", v.rule, v.reason))
    });
    c.run("refinement: readiness yes", || {
        let r = report("refinement", Format::Readiness)?;
        ensure(r.holds, || format!("{:?}", r.violations))?;
        Ok(format!("liquid {}", lambda_of(&r)))
    });
    c.run("ex7: partial-trace no", || {
        let r = report("ex7", Format::PartialTrace)?;
        ensure(!r.holds, || "partial-trace holds".into())?;
        ensure(r.violations.iter().any(|v| v.clause == Clause::NotPositive && v.rule == "fc"), || format!("{:?}", r.violations))?;
        Ok("rule fc has a negative premise".into())
    });
}

fn closure_plus(c: &mut Checks) {
    c.run("closure: input plus four negative rules up to renaming", || {
        let tss = load("closure");
        let (out, _) = plus_pipeline(&tss, &PipelineOptions::default()).map_err(|e| e.to_string())?;
        let want = parse_tss(
            "sig c/0 f/2\nact a b\n\
             rule n1: |- c -/b->\n\
             rule n2: |- f(x1,x2) -/a->\n\
             rule n3: x1 -/a->, x2 -/a-> |- f(x1,x2) -/b->\n\
             rule n4: x1 -/a->, x1 -b-> z |- f(x1,x2) -/b->\n",
        )
        .map_err(|e| e.to_string())?;
        let keys = |rules: &[Rule]| rules.iter().map(alpha_key).collect::<BTreeSet<_>>();
        let mut expected = keys(&tss.rules);
        expected.extend(keys(&want.rules));
        let got = keys(&out.rules);
        ensure(got == expected, || {
            let extra: Vec<String> = out.rules.iter().filter(|r| !expected.contains(&alpha_key(r))).map(ToString::to_string).collect();
            format!("{} rules, unexpected: {}", out.rules.len(), extra.join("; "))
        })?;
        Ok(format!("{} rules", out.rules.len()))
    });
}

fn inverse_example(c: &mut Checks) {
    c.run("inverse of <b><a>tt through f(f(x))", || {
        let p = load("inverse");
        let t = term(&p, "f(f(x))")?;
        let f: Formula = "<b><a>tt".parse().map_err(|e| format!("{e}"))?;
        let got = inverse(&p, &t, &f).map_err(|e| e.to_string())?;
        ensure(got.len() == 1, || format!("{} decompositions", got.len()))?;
        let want: Formula = "<b><b>tt".parse().map_err(|e| format!("{e}"))?;
        let x = got[0].get(&Var::new("x")).normalize();
        ensure(x == want, || format!("x := {x}"))?;
        Ok(got[0].lines(&t).join("; "))
    });
}

fn provability_divergences(c: &mut Checks) {
    let ground = |tss: &Tss, roots: &[&str], depth: usize| -> Result<_, String> {
        let roots = roots.iter().map(|s| term(tss, s)).collect::<Result<Vec<_>, _>>()?;
        ground_program(tss, &roots, &GroundOptions::depth(depth)).map_err(|e| e.to_string())
    };
    let refusal = |tss: &Tss, t: &str| -> Result<_, String> { Ok((term(tss, t)?, Action::new("a"))) };
    for (name, root) in [
        ("no-free-variables", "c"),
        ("no-free-variables-ntyft", "c"),
        ("no-free-variables-free", "c"),
        ("no-free-variables-lookahead", "f(c)"),
    ] {
        c.run(format!("{name}: ws refuses a at {root}, supported does not"), || {
            let tss = load(name);
            let g = ground(&tss, &[root], 3)?;
            let pair = refusal(&tss, root)?;
            ensure(ws_provable(&g).negative.contains(&pair), || "ws does not refuse".into())?;
            ensure(!supported_provable(&g).negative.contains(&pair), || "supported refuses".into())?;
            Ok(format!("{root} -/a-> only under ws"))
        });
    }
    c.run("decency-needed: naive plus clashes, pipeline rejects", || {
        let tss = load("decency-needed");
        let lit = |s: &str| parse_literal(s, &tss).map_err(|e| e.to_string());
        let st = standard_provable(&ground(&tss, &["a", "c"], 2)?);
        ensure(st.contains(&lit("c -a-> eps")?), || "c -a-> eps not provable".into())?;
        let naive = rplus_unchecked(&tss, DEFAULT_PICK_CAP).map_err(|e| e.to_string())?;
        let st = standard_provable(&ground(&naive, &["a", "c"], 2)?);
        ensure(st.contains(&lit("c -a-> eps")?) && st.contains(&lit("c -/a->")?), || "naive construction does not clash".into())?;
        let e = plus_pipeline(&tss, &PipelineOptions::default()).err().ok_or("pipeline accepted the input")?;
        ensure(e.stage == Stage::Ground, || format!("rejected at {}", e.stage))?;
        Ok(format!("naive construction proves c -a-> eps and c -/a->; pipeline: {e}"))
    });
    c.run("no-lookahead: pipeline rejects at the lookahead check", || {
        let e = plus_pipeline(&load("no-lookahead"), &PipelineOptions::default()).err().ok_or("pipeline accepted the input")?;
        ensure(e.stage == Stage::Ntyxt && matches!(e.error, TransformError::Lookahead(_)), || e.to_string())?;
        Ok(e.to_string())
    });
}

struct Frag {
    tss: Tss,
    lts: LtsFragment,
}

impl Frag {
    fn new(name: &str, roots: &[&str], depth: usize) -> Result<Frag, String> {
        let tss = load(name);
        let roots = roots.iter().map(|s| term(&tss, s)).collect::<Result<Vec<_>, _>>()?;
        let lts = build_lts(&tss, &roots, depth).map_err(|e| e.to_string())?;
        Ok(Frag { tss, lts })
    }

    fn t(&self, s: &str) -> Result<Term, String> {
        term(&self.tss, s)
    }

    fn below(&self, p: &str, q: &str, n: &str, depth: usize) -> Result<bool, String> {
        preorder_holds(&self.lts, &self.t(p)?, &self.t(q)?, &lang(n), depth).map_err(|e| e.to_string())
    }

    fn equal(&self, p: &str, q: &str, n: &str, depth: usize) -> Result<bool, String> {
        Ok(self.below(p, q, n, depth)? && self.below(q, p, n, depth)?)
    }

    fn has(&self, p: &str, kind: DecoratedKind, w: &str) -> Result<bool, String> {
        let w = word(w);
        let got = decorated_traces(&self.lts, &self.t(p)?, kind, w.len()).map_err(|e| e.to_string())?;
        Ok(got.iter().any(|d| d.actions == w))
    }

    /// `w` is a trace or completed trace of `p` but not of `q`.
    fn separates(&self, p: &str, q: &str, kind: DecoratedKind, w: &str) -> Result<(), String> {
        ensure(self.has(p, kind, w)?, || format!("{w} missing from {p}"))?;
        ensure(!self.has(q, kind, w)?, || format!("{w} present in {q}"))
    }
}

fn counterexamples(c: &mut Checks) {
    c.run("lookahead: f(b.d) not CT-below f(b.c+b.d) though b.d RS-below b.c+b.d", || {
        let fr = Frag::new("lookahead", &["b.d", "b.c+b.d", "f(b.d)", "f(b.c+b.d)"], 6)?;
        ensure(fr.below("b.d", "b.c+b.d", "RS", 4)?, || "not RS-below".into())?;
        ensure(!fr.below("f(b.d)", "f(b.c+b.d)", "CT", 4)?, || "CT-below".into())?;
        fr.separates("f(b.d)", "f(b.c+b.d)", DecoratedKind::Completed, "")?;
        Ok("the empty completed trace separates".into())
    });
    for (name, w) in [("ex2", "abd"), ("ex2-nonliquid-a", "abd"), ("ex2-nonliquid-b", "aabd")] {
        c.run(format!("{name}: {w} separates the f-images of an RT-related pair"), || {
            let (p, q) = ("a.(b.c+b.d)", "a.b.c+a.b.d");
            let fr = Frag::new(name, &[p, q, "f(a.(b.c+b.d))", "f(a.b.c+a.b.d)"], 6)?;
            ensure(fr.below(p, q, "RT", 4)?, || "not RT-below".into())?;
            fr.separates("f(a.(b.c+b.d))", "f(a.b.c+a.b.d)", DecoratedKind::Trace, w)?;
            ensure(!fr.below("f(a.(b.c+b.d))", "f(a.b.c+a.b.d)", "T", 4)?, || "T-below".into())?;
            Ok(format!("{w} is a trace of f(a.(b.c+b.d)) only"))
        });
    }
    let ft_pair = ("a.(b+c)+a.b+a.c", "a.b+a.c");
    let cases: [(&str, (&str, &str), [&str; 2], DecoratedKind, &str); 5] = [
        ("ex3", ("a.(b+c.d)+a.c", "a.(b+c)+a.c.d"), ["R", "F"], DecoratedKind::Trace, "abcd"),
        ("ex3", ft_pair, ["FT", "F"], DecoratedKind::Trace, "abc"),
        ("ex4", ft_pair, ["FT", "F"], DecoratedKind::Trace, "ad"),
        ("ex5", ft_pair, ["FT", "F"], DecoratedKind::Completed, "a"),
        ("ex6", ft_pair, ["FT", "F"], DecoratedKind::Trace, "ad"),
    ];
    for (name, (p, q), langs, kind, w) in cases {
        c.run(format!("{name}: {p} and {q} are {}- and {}-equal, {w} separates their f-images", langs[0], langs[1]), || {
            let (fp, fq) = (format!("f({p})"), format!("f({q})"));
            let fr = Frag::new(name, &[p, q, &fp, &fq], 7)?;
            for n in langs {
                ensure(fr.equal(p, q, n, 4)?, || format!("not {n}-equal"))?;
            }
            fr.separates(&fp, &fq, kind, w)?;
            let coarse = if kind == DecoratedKind::Completed { "CT" } else { "T" };
            ensure(!fr.equal(&fp, &fq, coarse, 4)?, || format!("f-images are {coarse}-equal"))?;
            Ok(format!("{w} is a {} of {fp} only", if kind == DecoratedKind::Completed { "completed trace" } else { "trace" }))
        });
    }
    c.run("ex7: c separates f(a) from f(a+b) though a T-below a+b", || {
        let fr = Frag::new("ex7", &["a", "a+b", "f(a)", "f(a+b)"], 5)?;
        ensure(fr.below("a", "a+b", "T", 4)?, || "not T-below".into())?;
        fr.separates("f(a)", "f(a+b)", DecoratedKind::Trace, "c")?;
        ensure(!fr.below("f(a)", "f(a+b)", "T", 4)?, || "T-below".into())?;
        Ok("c is a trace of f(a) only".into())
    });
}

fn applications(c: &mut Checks) {
    c.run("priority: acd separates th(a.(b+c)+a.c.d) from th(a.(b+c.d)+a.c)", || {
        let (p, q) = ("a.(b+c)+a.c.d", "a.(b+c.d)+a.c");
        let (tp, tq) = (format!("th({p})"), format!("th({q})"));
        let fr = Frag::new("priority", &[p, q, &tp, &tq], 6)?;
        ensure(fr.equal(p, q, "R", 4)?, || "arguments not R-equal".into())?;
        fr.separates(&tp, &tq, DecoratedKind::Trace, "acd")?;
        Ok(format!("acd is a trace of {tp} only"))
    });
    c.run("priority: failure trace {} a {c} d {} separates th(a.b+a.(c+d)+a.(b+c+d)) from th(a.b+a.(c+d))", || {
        let (p, q) = ("a.b+a.(c+d)+a.(b+c+d)", "a.b+a.(c+d)");
        let (tp, tq) = (format!("th({p})"), format!("th({q})"));
        let fr = Frag::new("priority", &[p, q, &tp, &tq], 6)?;
        ensure(fr.equal(p, q, "FT", 4)?, || "arguments not FT-equal".into())?;
        let want = [BTreeSet::new(), BTreeSet::from([Action::new("c")]), BTreeSet::new()];
        let has = |s: &str| -> Result<bool, String> {
            let got = decorated_traces(&fr.lts, &fr.t(s)?, DecoratedKind::FailureTrace, 2).map_err(|e| e.to_string())?;
            Ok(got.iter().any(|d| d.actions == word("ad") && d.sets.len() == 3 && d.sets.iter().zip(&want).all(|(max, x)| x.is_subset(max))))
        };
        ensure(has(&tp)?, || format!("missing from {tp}"))?;
        ensure(!has(&tq)?, || format!("present in {tq}"))?;
        ensure(!fr.equal(&tp, &tq, "FT", 4)?, || "images FT-equal".into())?;
        Ok(format!("failure trace of {tp} only"))
    });
    c.run("sequencing: (a,{b}) is a failure pair of (a;(b+c)+a;c+a);b only", || {
        let (p, q) = ("a;(b+c)+a;c+a", "a;(b+c)+a");
        let (sp, sq) = (format!("({p});b"), format!("({q});b"));
        let fr = Frag::new("bpa0-seq", &[p, q, &sp, &sq], 6)?;
        ensure(fr.equal(p, q, "F", 4)?, || "arguments not F-equal".into())?;
        let has = |s: &str| -> Result<bool, String> {
            let got = decorated_traces(&fr.lts, &fr.t(s)?, DecoratedKind::FailurePair, 1).map_err(|e| e.to_string())?;
            Ok(got.iter().any(|d| d.actions == word("a") && d.sets.first().is_some_and(|x| x.contains(&Action::new("b")))))
        };
        ensure(has(&sp)?, || format!("missing from {sp}"))?;
        ensure(!has(&sq)?, || format!("present in {sq}"))?;
        Ok(format!("failure pair of {sp} only"))
    });
}

fn suite(c: &mut Checks, name: &str, seed: u64, cases: usize, case: fn(u64) -> CaseResult) {
    c.run(name, || {
        let mut skipped = 0;
        for i in 0..cases as u64 {
            match case(seed.wrapping_add(i)).map_err(|e| format!("seed {}: {e}", seed.wrapping_add(i)))? {
                Case::Checked => {}
                Case::Skipped(_) => skipped += 1,
            }
        }
        ensure(skipped * 4 <= cases, || format!("{skipped} of {cases} cases skipped"))?;
        Ok(format!("{} cases checked, {skipped} skipped", cases - skipped))
    });
}

/// The table fixtures and the format each is certified in.
pub const CERTIFIED: [(&str, Format); 6] = [
    ("bpa", Format::FailureTrace),
    ("priority", Format::ReadyTrace),
    ("initial-priority", Format::FailureTrace),
    ("kleene", Format::FailureTrace),
    ("bpa0-seq", Format::Readiness),
    ("refinement", Format::Readiness),
];

/// Small fuzz budget used by the acceptance suite.
pub fn fuzz_budget(seed: u64, symmetric: bool) -> FuzzOptions {
    FuzzOptions {
        seed,
        terms: 6,
        contexts: 3,
        check: PrecongruenceOptions { depth: 4, symmetric, max_instances: 15, ..PrecongruenceOptions::default() },
        ..FuzzOptions::default()
    }
}

fn fuzz_suite(c: &mut Checks, name: &str, cases: usize, runs: Vec<(&'static str, Sublanguage, FuzzOptions)>) {
    c.run(name, || {
        let mut checked = 0;
        let mut related = 0;
        for (fixture, n, opts) in runs {
            let out = fuzz_precongruence(&load(fixture), &n, &opts).map_err(|e| format!("{fixture} {n}: {e}"))?;
            if let Some(v) = out.violation {
                return Err(format!("{fixture} {n}: {} versus {} in context {}", v.left, v.right, v.context));
            }
            checked += out.checked;
            related += out.related;
        }
        ensure(checked >= cases, || format!("only {checked} instances checked"))?;
        Ok(format!("{checked} instances over {related} related pairs"))
    });
}

fn properties(c: &mut Checks, opts: &AcceptanceOptions) {
    let (seed, n) = (opts.seed, opts.cases);
    suite(c, "decompositions agree with direct satisfaction", seed, n, props::inverse_agreement_case);
    suite(c, "preorder hierarchy on acyclic fragments", seed, n, props::hierarchy_case);
    suite(c, "supported equals ws on decent xynft", seed, n, props::supported_is_ws_case);
    suite(c, "standard on the plus construction equals supported", seed, n, props::plus_is_supported_case);
    suite(c, "formats survive every pipeline stage", seed, n, props::format_preservation_case);
    c.run("formats survive every pipeline stage on the fixtures", || {
        let mut done = 0;
        for (name, _) in crate::fixtures::FIXTURES {
            let tss = load(name);
            if plus_pipeline(&tss, &PipelineOptions::default()).is_err() {
                continue;
            }
            props::format_preservation(&tss).map_err(|e| format!("{name}: {e}"))?;
            done += 1;
        }
        Ok(format!("{done} fixtures"))
    });
    suite(c, "ws relations are consistent", seed, n, props::ws_consistency_case);
    let mut runs = Vec::new();
    for (name, fmt) in CERTIFIED {
        for n in format_tags(fmt) {
            runs.push((name, n, fuzz_budget(seed, false)));
        }
    }
    fuzz_suite(c, "precongruence fuzz in the certified formats", n, runs);
    let partial: Vec<_> = CERTIFIED
        .iter()
        .filter(|(name, _)| check_format(&load(name), Format::PartialTrace, &LambdaMode::Auto).is_ok_and(|r| r.holds))
        .map(|(name, _)| (*name, Sublanguage::T, FuzzOptions { contexts: 5, ..fuzz_budget(seed, false) }))
        .collect();
    fuzz_suite(c, "trace preorder fuzz on partial-trace fixtures", n, partial);
    let ft: Vec<_> = CERTIFIED
        .iter()
        .filter(|(name, _)| check_format(&load(name), Format::FailureTrace, &LambdaMode::Auto).is_ok_and(|r| r.holds))
        .map(|(name, _)| (*name, Sublanguage::T, fuzz_budget(seed, true)))
        .collect();
    fuzz_suite(c, "trace equivalence fuzz on failure-trace fixtures", n, ft);
}

fn conservativity(c: &mut Checks) {
    let bpa = load("bpa");
    c.run("syntactic criterion accepts bpa over itself and with priority", || {
        for ext in ["bpa", "priority"] {
            let r = check_conservative_syntactic(&bpa, &load(ext));
            ensure(r.holds, || format!("{ext}: {:?}", r.problems))?;
        }
        Ok("accepted".into())
    });
    c.run("syntactic criterion rejects a tampered priority extension", || {
        let tampered = tampered()?;
        let r = check_conservative_syntactic(&bpa, &tampered);
        ensure(!r.holds, || "accepted".into())?;
        Ok(r.problems.join("; "))
    });
    let bpa0 = load("bpa0-seq");
    let bases = [
        (&bpa, vec!["(a+b).c", "a.(b+c)+a.c.d", "a.b+a.(c+d)+a.(b+c+d)", "(a+eps).b"]),
        (&bpa0, vec!["(a+b);c", "a;(b+c)+a;c+a", "(a;(b+c)+a);b"]),
    ];
    for (name, _) in crate::fixtures::FIXTURES {
        let ext = load(name);
        for (base, roots) in &bases {
            if *name == "bpa" || *name == "bpa0-seq" || !base.signature.is_subset_of(&ext.signature) || !base.rules.iter().all(|r| ext.rules.iter().any(|s| alpha_key(s) == alpha_key(r))) {
                continue;
            }
            c.run(format!("{name}: ws agrees with its base on base literals"), || {
                let roots = roots.iter().map(|s| term(base, s)).collect::<Result<Vec<_>, _>>()?;
                let v = check_conservative_semantic(base, &ext, &roots, 4).map_err(|e| e.to_string())?;
                ensure(v.agrees, || format!("differs on {:?}", v.counterexample.map(|l| l.to_string())))?;
                Ok(format!("{} pairs compared", v.compared))
            });
        }
    }
    c.run("semantic check exposes the tampered extension", || {
        let tampered = tampered()?;
        let roots = ["(a+b).c", "c+d"].iter().map(|s| term(&bpa, s)).collect::<Result<Vec<_>, _>>()?;
        let v = check_conservative_semantic(&bpa, &tampered, &roots, 4).map_err(|e| e.to_string())?;
        ensure(!v.agrees, || "agrees".into())?;
        Ok(format!("differs on {}", v.counterexample.map_or_else(String::new, |l| l.to_string())))
    });
}

/// Priority plus a rule whose source is headed by a base symbol.
fn tampered() -> Result<Tss, String> {
    let p = load("priority");
    let extra = parse_tss("sig +/2 th/1\nact c d\nrule tamper: x1 -c-> y |- x1+x2 -d-> th(y)").map_err(|e| e.to_string())?;
    let mut rules = p.rules.clone();
    rules.extend(extra.rules);
    Ok(p.with_rules(rules))
}
