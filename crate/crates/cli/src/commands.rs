use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::{json, Value};
use thiserror::Error;

use ruleform::acceptance::{run_criterion, AcceptanceOptions, CRITERIA};
use ruleform::decompose::{closed_terms, fuzz_precongruence, Decomposer, FuzzOptions, Polarity, PrecongruenceOptions};
use ruleform::fixtures::{self, FIXTURES};
use ruleform::format::{check_conservative_syntactic, check_format, Format, LambdaMode};
use ruleform::observe::{preorder_holds, satisfies, Formula, Sublanguage, Truth};
use ruleform::semantics::{build_lts, build_lts_with, check_conservative_semantic, GroundOptions, Notion, PairStatus};
use ruleform::transform::{run_stages, PipelineOptions, Stage};
use ruleform::{parse_term, parse_tss, print_tss, Action, Term, Tss};

use crate::{cache, Command, ConservativeArgs, FixturesCommand, LambdaArg, Out};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{0}")]
    Input(String),
    #[error("{0}")]
    Failed(String),
}

fn input(e: impl ToString) -> CliError {
    CliError::Input(e.to_string())
}

fn failed(e: impl ToString) -> CliError {
    CliError::Failed(e.to_string())
}

/// What a command produced: a verdict, a text rendering and a JSON document.
pub struct Report {
    pub ok: bool,
    pub text: String,
    pub json: Value,
}

impl Report {
    fn new(ok: bool, text: String, json: impl Serialize) -> Report {
        Report { ok, text, json: serde_json::to_value(json).expect("report serializes") }
    }

    pub fn print(&self, out: Out) {
        match out {
            Out::Text => print!("{}", self.text),
            Out::Json => println!("{}", serde_json::to_string_pretty(&self.json).expect("report serializes")),
        }
    }
}

/// Reads a specification; `@name` selects a built-in fixture.
fn load(path: &Path) -> Result<Tss, CliError> {
    let shown = path.to_string_lossy();
    if let Some(name) = shown.strip_prefix('@') {
        let src = fixtures::source(name).ok_or_else(|| input(format!("no fixture named {name}")))?;
        return parse_tss(src).map_err(|e| input(format!("{name}: {e}")));
    }
    let src = fs::read_to_string(path).map_err(|source| CliError::Io { path: path.to_owned(), source })?;
    parse_tss(&src).map_err(|e| input(format!("{shown}: {e}")))
}

fn term(tss: &Tss, s: &str) -> Result<Term, CliError> {
    parse_term(s, &tss.signature).map_err(|e| input(format!("term `{s}`: {e}")))
}

fn formula(s: &str) -> Result<Formula, CliError> {
    s.parse().map_err(|e| input(format!("formula `{s}`: {e}")))
}

fn language(s: &str) -> Result<Sublanguage, CliError> {
    s.parse().map_err(input)
}

pub fn run(cmd: Command, _out: Out) -> Result<Report, CliError> {
    match cmd {
        Command::Check { format, lambda, file } => check(&format, lambda, &file),
        Command::Transform { stage, universe, fuel, trace, file } => transform(&stage, universe.as_deref(), fuel, trace.as_deref(), &file),
        Command::Lts { roots, depth, notion, file } => lts(&roots, depth, &notion, &file),
        Command::Compare { notion, depth, left, right, file } => compare(&notion, depth, &left, &right, &file),
        Command::Sat { formula, term, depth, file } => sat(&formula, &term, depth, &file),
        Command::Ruloids { term, action, neg, file } => ruloids(&term, &action, neg, &file),
        Command::Decompose { term, formula, file } => decompose(&term, &formula, &file),
        Command::Conservative(args) => conservative(&args),
        Command::FuzzPrecongruence { notion, depth, seed, terms, contexts, max_instances, symmetric, file } => {
            let opts = FuzzOptions {
                seed,
                terms,
                contexts,
                check: PrecongruenceOptions { depth, symmetric, max_instances, ..PrecongruenceOptions::default() },
                ..FuzzOptions::default()
            };
            fuzz(&notion, &opts, &file)
        }
        Command::Fixtures { action } => fixtures_cmd(action),
    }
}

fn check(name: &str, lambda: LambdaArg, file: &Path) -> Result<Report, CliError> {
    let tss = load(file)?;
    let fmt: Format = name.parse().map_err(input)?;
    let mode = match lambda {
        LambdaArg::Auto => LambdaMode::Auto,
        LambdaArg::Exhaustive => LambdaMode::Exhaustive,
        LambdaArg::Declared => LambdaMode::Declared,
    };
    let r = check_format(&tss, fmt, &mode).map_err(failed)?;
    let mut text = format!("{fmt} format: {}\n", if r.holds { "holds" } else { "does not hold" });
    if let Some(l) = &r.lambda {
        writeln!(text, "liquid positions: {l}").unwrap();
    }
    for v in &r.violations {
        let var = v.var.as_ref().map_or_else(String::new, |x| format!(" ({x})"));
        writeln!(text, "  rule {}{var}: {:?}: {}", v.rule, v.clause, v.reason).unwrap();
    }
    if !r.undeclared_demands.is_empty() {
        let shown: Vec<String> = r.undeclared_demands.iter().map(ToString::to_string).collect();
        writeln!(text, "  liquid but not declared: {}", shown.join(", ")).unwrap();
    }
    Ok(Report::new(r.holds, text, &r))
}

fn read_universe(tss: &Tss, path: &Path) -> Result<Vec<Term>, CliError> {
    let src = fs::read_to_string(path).map_err(|source| CliError::Io { path: path.to_owned(), source })?;
    src.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#')).map(|l| term(tss, l)).collect()
}

fn transform(stage: &str, universe: Option<&Path>, fuel: Option<usize>, trace: Option<&Path>, file: &Path) -> Result<Report, CliError> {
    let tss = load(file)?;
    let last = if stage == "plus" { Stage::Rplus } else { stage.parse().map_err(input)? };
    let mut opts = PipelineOptions::default();
    if let Some(u) = universe {
        opts.universe = Some(read_universe(&tss, u)?);
    }
    if let Some(f) = fuel {
        opts.fuel = f;
    }
    let (out, tr) = run_stages(&tss, &opts, last).map_err(failed)?;
    if let Some(p) = trace {
        let doc = serde_json::to_string_pretty(&tr).expect("trace serializes");
        fs::write(p, doc + "\n").map_err(|source| CliError::Io { path: p.to_owned(), source })?;
    }
    let printed = print_tss(&out);
    Ok(Report::new(true, printed.clone(), json!({ "stage": last, "tss": printed, "trace": tr })))
}

fn lts(roots: &[String], depth: usize, notion: &str, file: &Path) -> Result<Report, CliError> {
    let tss = load(file)?;
    let notion: Notion = notion.parse().map_err(input)?;
    let roots = roots.iter().map(|r| term(&tss, r)).collect::<Result<Vec<_>, _>>()?;
    let frag = build_lts_with(&tss, &roots, &GroundOptions::depth(depth), notion).map_err(failed)?;
    let rel = &frag.relation;
    let mut text = format!("states: {}\n", frag.states.len());
    for (t, a, u) in &rel.positive {
        writeln!(text, "{t} -{a}-> {u}").unwrap();
    }
    for (t, a) in &rel.negative {
        writeln!(text, "{t} -/{a}->").unwrap();
    }
    for (t, a) in &rel.unknown {
        writeln!(text, "{t} -{a}-> ?").unwrap();
    }
    for t in &frag.frontier {
        writeln!(text, "frontier {t}").unwrap();
    }
    let conflicts: Vec<(&Term, &Action)> = rel.negative.iter().filter(|(t, a)| rel.status(t, a) == PairStatus::Conflict).map(|(t, a)| (t, a)).collect();
    for (t, a) in &conflicts {
        writeln!(text, "conflict {t} {a}").unwrap();
    }
    Ok(Report::new(conflicts.is_empty(), text, &frag))
}

fn compare(notion: &str, depth: usize, left: &str, right: &str, file: &Path) -> Result<Report, CliError> {
    let tss = load(file)?;
    let n = language(notion)?;
    let (p, q) = (term(&tss, left)?, term(&tss, right)?);
    let frag = build_lts(&tss, &[p.clone(), q.clone()], depth + 1).map_err(failed)?;
    let holds = preorder_holds(&frag, &p, &q, &n, depth).map_err(failed)?;
    let converse = preorder_holds(&frag, &q, &p, &n, depth).map_err(failed)?;
    let text = format!("{p} below {q} for {n} at depth {depth}: {}\nconverse: {}\n", yes(holds), yes(converse));
    Ok(Report::new(holds, text, json!({ "notion": n, "depth": depth, "left": p, "right": q, "holds": holds, "converse": converse })))
}

fn yes(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

fn sat(f: &str, t: &str, depth: usize, file: &Path) -> Result<Report, CliError> {
    let tss = load(file)?;
    let f = formula(f)?;
    let p = term(&tss, t)?;
    let frag = build_lts(&tss, std::slice::from_ref(&p), depth).map_err(failed)?;
    let truth = satisfies(&frag, &p, &f).map_err(failed)?;
    if truth == Truth::Indeterminate {
        return Err(failed(format!("{p} reaches the fragment bound before {f} is decided; raise --depth")));
    }
    let holds = truth == Truth::True;
    Ok(Report::new(holds, format!("{p} satisfies {f}: {}\n", yes(holds)), json!({ "term": p, "formula": f, "holds": holds })))
}

fn decomposer(tss: &Tss) -> Result<Decomposer, CliError> {
    Decomposer::from_plus(cache::plus(tss)?).map_err(failed)
}

fn ruloids(t: &str, a: &str, neg: bool, file: &Path) -> Result<Report, CliError> {
    let tss = load(file)?;
    let t = term(&tss, t)?;
    let a = Action::new(a);
    if !tss.has_action(&a) {
        return Err(input(format!("unknown action `{a}`")));
    }
    let pol = if neg { Polarity::Negative } else { Polarity::Positive };
    let found = decomposer(&tss)?.ruloids(&t, &a, pol).map_err(failed)?;
    let mut text = String::new();
    for r in &found {
        writeln!(text, "{r}    [{}]", r.provenance).unwrap();
    }
    if found.is_empty() {
        text.push_str("no ruloids\n");
    }
    Ok(Report::new(true, text, &found))
}

fn decompose(t: &str, f: &str, file: &Path) -> Result<Report, CliError> {
    let tss = load(file)?;
    let t = term(&tss, t)?;
    let f = formula(f)?;
    let found = decomposer(&tss)?.inverse(&t, &f).map_err(failed)?;
    let blocks: Vec<String> = found.iter().map(|d| d.lines(&t).join("\n") + "\n").collect();
    let text = if blocks.is_empty() { "no decompositions\n".to_string() } else { blocks.join("\n") };
    Ok(Report::new(true, text, json!({ "term": t, "formula": f, "decompositions": found })))
}

fn conservative(args: &ConservativeArgs) -> Result<Report, CliError> {
    let base = load(&args.base)?;
    let ext = load(&args.file)?;
    if args.syntactic {
        let r = check_conservative_syntactic(&base, &ext);
        let mut text = format!("conservative extension (syntactic): {}\n", yes(r.holds));
        for p in &r.problems {
            writeln!(text, "  {p}").unwrap();
        }
        return Ok(Report::new(r.holds, text, &r));
    }
    let roots = if args.roots.is_empty() {
        closed_terms(&base.signature, 2, 12)
    } else {
        args.roots.iter().map(|r| term(&base, r)).collect::<Result<Vec<_>, _>>()?
    };
    let v = check_conservative_semantic(&base, &ext, &roots, args.depth).map_err(failed)?;
    let mut text = format!("conservative extension (semantic, depth {}): {}\ncompared pairs: {}\n", args.depth, yes(v.agrees), v.compared);
    if let Some(l) = &v.counterexample {
        writeln!(text, "differs on {l}").unwrap();
    }
    Ok(Report::new(v.agrees, text, &v))
}

fn fuzz(notion: &str, opts: &FuzzOptions, file: &Path) -> Result<Report, CliError> {
    let tss = load(file)?;
    let n = language(notion)?;
    let out = fuzz_precongruence(&tss, &n, opts).map_err(failed)?;
    let mut text = format!(
        "{n} precongruence fuzz, seed {}: {}\nrelated pairs: {}, unrelated: {}, instances checked: {}\n",
        opts.seed,
        if out.passed() { "passed" } else { "violated" },
        out.related,
        out.unrelated,
        out.checked
    );
    if let Some(v) = &out.violation {
        writeln!(text, "context {}: {} is not below {}", v.context, v.left, v.right).unwrap();
        for (x, l, r) in &v.sigma {
            writeln!(text, "  {x}: {l} vs {r}").unwrap();
        }
    }
    Ok(Report::new(out.passed(), text, json!({ "notion": n, "seed": opts.seed, "outcome": out })))
}

fn fixtures_cmd(action: FixturesCommand) -> Result<Report, CliError> {
    match action {
        FixturesCommand::List => {
            let names: Vec<&str> = FIXTURES.iter().map(|(n, _)| *n).collect();
            Ok(Report::new(true, names.join("\n") + "\n", &names))
        }
        FixturesCommand::Show { name } => {
            let src = fixtures::source(&name).ok_or_else(|| input(format!("no fixture named {name}")))?;
            Ok(Report::new(true, src.to_string(), json!({ "name": name, "source": src })))
        }
        FixturesCommand::Run { criterion, seed, cases } => {
            let mut opts = AcceptanceOptions::default();
            if let Some(s) = seed {
                opts.seed = s;
            }
            if let Some(c) = cases {
                opts.cases = c;
            }
            let ids: Vec<u8> = match criterion {
                Some(id) if CRITERIA.iter().any(|(i, _)| *i == id) => vec![id],
                Some(id) => return Err(input(format!("no criterion {id}"))),
                None => CRITERIA.iter().map(|(i, _)| *i).collect(),
            };
            let results: Vec<_> = ids.into_iter().map(|id| run_criterion(id, &opts)).collect();
            let mut text = String::new();
            for r in &results {
                writeln!(text, "{}", r.line()).unwrap();
                for c in r.failures() {
                    writeln!(text, "    failed: {}: {}", c.name, c.detail).unwrap();
                }
            }
            let ok = results.iter().all(|r| r.passed);
            Ok(Report::new(ok, text, json!({ "seed": opts.seed, "cases": opts.cases, "criteria": results })))
        }
    }
}
