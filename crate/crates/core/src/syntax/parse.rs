//! Line-oriented text format for specifications.
//!
//! ```text
//! sig +/2 .[liquid frozen] a/0 eps/0
//! act a b sqrt
//! ord c < b
//! rule alt1: x1 -$v-> y |- x1+x2 -$v-> y
//! rule seq1: x1 -$v-> y |- x1.x2 -$v-> y.x2 if $v != sqrt
//! ```
//!
//! `$v` ranges over the declared actions. A metavariable that occurs only in
//! negative premises is quantified per premise, so
//! `x -$v-> y, x -/$w-> |- th(x) -$v-> th(y) if $v < $w` yields one rule per `$v`
//! carrying a negative premise for every `$w` above it.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

use super::rule::{Instantiation, Literal, Rule};
use super::term::{Action, Symbol, Term, Var, OP_CHARS};
use super::tss::{ActionOrder, FunctionDecl, Signature, Tss};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseErrorKind {
    #[error("syntax error: {0}")]
    Syntax(String),
    #[error("undeclared function symbol `{0}`")]
    UndeclaredSymbol(String),
    #[error("`{symbol}` has arity {expected} but is applied to {found} arguments")]
    ArityMismatch { symbol: String, expected: usize, found: usize },
    #[error("undeclared action `{0}`")]
    UndeclaredAction(String),
    #[error("metavariable `${0}` does not occur in the rule")]
    UnknownMetavariable(String),
    #[error("side condition uses `<` but no `ord` line was given")]
    NoOrdering,
    #[error("the action ordering is cyclic")]
    CyclicOrdering,
    #[error("function symbol `{0}` declared twice")]
    DuplicateSymbol(String),
    #[error("condition relates metavariables of different negative premises")]
    CrossPremiseCondition,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}: {kind}")]
pub struct ParseError {
    pub line: usize,
    pub kind: ParseErrorKind,
}

fn err<T>(line: usize, kind: ParseErrorKind) -> Result<T, ParseError> {
    Err(ParseError { line, kind })
}

fn syntax<T>(line: usize, msg: impl Into<String>) -> Result<T, ParseError> {
    err(line, ParseErrorKind::Syntax(msg.into()))
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Ident(String),
    Op(String),
    LParen,
    RParen,
    LBracket,
    RBracket,
    Comma,
    Slash,
    Arrow { neg: bool, label: String },
    Turnstile,
    Lt,
    Gt,
    Neq,
    Eq,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Ident(s) | Tok::Op(s) => write!(f, "`{s}`"),
            Tok::LParen => f.write_str("`(`"),
            Tok::RParen => f.write_str("`)`"),
            Tok::LBracket => f.write_str("`[`"),
            Tok::RBracket => f.write_str("`]`"),
            Tok::Comma => f.write_str("`,`"),
            Tok::Slash => f.write_str("`/`"),
            Tok::Arrow { neg: false, label } => write!(f, "`-{label}->`"),
            Tok::Arrow { neg: true, label } => write!(f, "`-/{label}->`"),
            Tok::Turnstile => f.write_str("`|-`"),
            Tok::Lt => f.write_str("`<`"),
            Tok::Gt => f.write_str("`>`"),
            Tok::Neq => f.write_str("`!=`"),
            Tok::Eq => f.write_str("`=`"),
        }
    }
}

fn is_ident_char(c: char) -> bool {
    c.is_alphanumeric() || c == '_' || c == '\'' || c == '$'
}

fn lex(src: &str, line: usize) -> Result<Vec<Tok>, ParseError> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        match c {
            _ if c.is_whitespace() => i += 1,
            '(' => {
                out.push(Tok::LParen);
                i += 1;
            }
            ')' => {
                out.push(Tok::RParen);
                i += 1;
            }
            '[' => {
                out.push(Tok::LBracket);
                i += 1;
            }
            ']' => {
                out.push(Tok::RBracket);
                i += 1;
            }
            ',' => {
                out.push(Tok::Comma);
                i += 1;
            }
            '/' => {
                out.push(Tok::Slash);
                i += 1;
            }
            '<' => {
                out.push(Tok::Lt);
                i += 1;
            }
            '>' => {
                out.push(Tok::Gt);
                i += 1;
            }
            '=' => {
                out.push(Tok::Eq);
                i += 1;
            }
            '!' if chars.get(i + 1) == Some(&'=') => {
                out.push(Tok::Neq);
                i += 2;
            }
            '|' if chars.get(i + 1) == Some(&'-') => {
                out.push(Tok::Turnstile);
                i += 2;
            }
            '-' => {
                let neg = chars.get(i + 1) == Some(&'/');
                let start = if neg { i + 2 } else { i + 1 };
                let mut j = start;
                while j + 1 < chars.len() && !(chars[j] == '-' && chars[j + 1] == '>') {
                    j += 1;
                }
                if j + 1 >= chars.len() {
                    return syntax(line, "unterminated arrow");
                }
                let label: String = chars[start..j].iter().collect::<String>().trim().to_string();
                if label.is_empty() || !label.chars().all(is_ident_char) {
                    return syntax(line, format!("bad action label `{label}`"));
                }
                out.push(Tok::Arrow { neg, label });
                i = j + 2;
            }
            _ if OP_CHARS.contains(&c) => {
                let mut j = i;
                while j < chars.len() && OP_CHARS.contains(&chars[j]) {
                    j += 1;
                }
                out.push(Tok::Op(chars[i..j].iter().collect()));
                i = j;
            }
            _ if is_ident_char(c) => {
                let mut j = i;
                while j < chars.len() && is_ident_char(chars[j]) {
                    j += 1;
                }
                out.push(Tok::Ident(chars[i..j].iter().collect()));
                i = j;
            }
            _ => return syntax(line, format!("unexpected character `{c}`")),
        }
    }
    Ok(out)
}

/// A term before names are resolved; `args == None` means no parentheses.
#[derive(Clone, Debug)]
struct RawTerm {
    name: String,
    args: Option<Vec<RawTerm>>,
}

#[derive(Clone, Debug)]
struct RawLit {
    source: RawTerm,
    neg: bool,
    label: String,
    target: Option<RawTerm>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum CondOp {
    Neq,
    Eq,
    Lt,
    Gt,
}

#[derive(Clone, Debug)]
struct RawCond {
    lhs: String,
    op: CondOp,
    rhs: String,
}

#[derive(Clone, Debug)]
struct RawRule {
    line: usize,
    name: String,
    premises: Vec<RawLit>,
    conclusion: RawLit,
    conds: Vec<RawCond>,
}

struct Cursor<'a> {
    toks: &'a [Tok],
    pos: usize,
    line: usize,
}

impl<'a> Cursor<'a> {
    fn peek(&self) -> Option<&'a Tok> {
        self.toks.get(self.pos)
    }

    fn bump(&mut self) -> Option<&'a Tok> {
        let t = self.toks.get(self.pos);
        self.pos += 1;
        t
    }

    fn expect(&mut self, want: &Tok) -> Result<(), ParseError> {
        match self.bump() {
            Some(t) if t == want => Ok(()),
            Some(t) => syntax(self.line, format!("expected {want}, found {t}")),
            None => syntax(self.line, format!("expected {want}, found end of line")),
        }
    }

    fn at_end(&self) -> bool {
        self.pos >= self.toks.len()
    }

    fn term(&mut self, min_prec: u8) -> Result<RawTerm, ParseError> {
        let mut lhs = self.atom()?;
        while let Some(Tok::Op(op)) = self.peek() {
            let prec = Symbol::new(op).precedence();
            if prec < min_prec {
                break;
            }
            self.bump();
            let rhs = self.term(prec + 1)?;
            lhs = RawTerm { name: op.clone(), args: Some(vec![lhs, rhs]) };
        }
        Ok(lhs)
    }

    fn atom(&mut self) -> Result<RawTerm, ParseError> {
        match self.bump() {
            Some(Tok::LParen) => {
                let t = self.term(0)?;
                self.expect(&Tok::RParen)?;
                Ok(t)
            }
            Some(Tok::Ident(name)) | Some(Tok::Op(name)) => {
                let is_op = name.chars().all(|c| OP_CHARS.contains(&c));
                if self.peek() == Some(&Tok::LParen) {
                    self.bump();
                    let mut args = Vec::new();
                    if self.peek() == Some(&Tok::RParen) {
                        self.bump();
                    } else {
                        loop {
                            args.push(self.term(0)?);
                            match self.bump() {
                                Some(Tok::Comma) => continue,
                                Some(Tok::RParen) => break,
                                _ => return syntax(self.line, "expected `,` or `)` in argument list"),
                            }
                        }
                    }
                    Ok(RawTerm { name: name.clone(), args: Some(args) })
                } else if is_op {
                    syntax(self.line, format!("operator `{name}` used without operands"))
                } else {
                    Ok(RawTerm { name: name.clone(), args: None })
                }
            }
            Some(t) => syntax(self.line, format!("expected a term, found {t}")),
            None => syntax(self.line, "expected a term, found end of line"),
        }
    }

    fn literal(&mut self) -> Result<RawLit, ParseError> {
        let source = self.term(0)?;
        match self.bump() {
            Some(Tok::Arrow { neg: true, label }) => Ok(RawLit { source, neg: true, label: label.clone(), target: None }),
            Some(Tok::Arrow { neg: false, label }) => {
                let target = self.term(0)?;
                Ok(RawLit { source, neg: false, label: label.clone(), target: Some(target) })
            }
            _ => syntax(self.line, "expected a transition arrow"),
        }
    }

    fn cond(&mut self) -> Result<RawCond, ParseError> {
        let lhs = self.label()?;
        let op = match self.bump() {
            Some(Tok::Neq) => CondOp::Neq,
            Some(Tok::Eq) => CondOp::Eq,
            Some(Tok::Lt) => CondOp::Lt,
            Some(Tok::Gt) => CondOp::Gt,
            _ => return syntax(self.line, "expected `!=`, `=`, `<` or `>` in side condition"),
        };
        let rhs = self.label()?;
        Ok(RawCond { lhs, op, rhs })
    }

    fn label(&mut self) -> Result<String, ParseError> {
        match self.bump() {
            Some(Tok::Ident(s)) => Ok(s.clone()),
            _ => syntax(self.line, "expected an action or metavariable"),
        }
    }
}

fn parse_rule_body(name: &str, body: &str, line: usize) -> Result<RawRule, ParseError> {
    let toks = lex(body, line)?;
    let mut cur = Cursor { toks: &toks, pos: 0, line };
    let mut premises = Vec::new();
    if cur.peek() != Some(&Tok::Turnstile) {
        loop {
            premises.push(cur.literal()?);
            match cur.bump() {
                Some(Tok::Comma) => continue,
                Some(Tok::Turnstile) => break,
                _ => return syntax(line, "expected `,` or `|-` after a premise"),
            }
        }
    } else {
        cur.bump();
    }
    let conclusion = cur.literal()?;
    let mut conds = Vec::new();
    if let Some(Tok::Ident(kw)) = cur.peek() {
        if kw == "if" {
            cur.bump();
            loop {
                conds.push(cur.cond()?);
                if cur.peek() == Some(&Tok::Comma) {
                    cur.bump();
                } else {
                    break;
                }
            }
        }
    }
    if !cur.at_end() {
        return syntax(line, format!("unexpected {}", cur.peek().map(|t| t.to_string()).unwrap_or_default()));
    }
    Ok(RawRule { line, name: name.to_string(), premises, conclusion, conds })
}

fn metavars(s: &str, out: &mut BTreeSet<String>) {
    let mut rest = s;
    while let Some(i) = rest.find('$') {
        let tail = &rest[i + 1..];
        let len = tail.find(|c: char| !c.is_ascii_alphanumeric()).unwrap_or(tail.len());
        out.insert(tail[..len].to_string());
        rest = &tail[len..];
    }
}

fn term_metavars(t: &RawTerm, out: &mut BTreeSet<String>) {
    metavars(&t.name, out);
    for a in t.args.iter().flatten() {
        term_metavars(a, out);
    }
}

fn lit_metavars(l: &RawLit) -> BTreeSet<String> {
    let mut out = BTreeSet::new();
    term_metavars(&l.source, &mut out);
    metavars(&l.label, &mut out);
    if let Some(t) = &l.target {
        term_metavars(t, &mut out);
    }
    out
}

fn cond_metavars(c: &RawCond) -> BTreeSet<String> {
    let mut out = BTreeSet::new();
    metavars(&c.lhs, &mut out);
    metavars(&c.rhs, &mut out);
    out
}

type Env = BTreeMap<String, Action>;

fn substitute(s: &str, env: &Env) -> String {
    let mut out = String::new();
    let mut rest = s;
    while let Some(i) = rest.find('$') {
        out.push_str(&rest[..i]);
        let tail = &rest[i + 1..];
        let len = tail.find(|c: char| !c.is_ascii_alphanumeric()).unwrap_or(tail.len());
        match env.get(&tail[..len]) {
            Some(a) => out.push_str(a.as_str()),
            None => {
                out.push('$');
                out.push_str(&tail[..len]);
            }
        }
        rest = &tail[len..];
    }
    out.push_str(rest);
    out
}

struct Elaborator<'a> {
    sig: &'a Signature,
    actions: &'a [Action],
    order: &'a ActionOrder,
    line: usize,
}

impl Elaborator<'_> {
    fn resolve(&self, t: &RawTerm, env: &Env) -> Result<Term, ParseError> {
        let name = substitute(&t.name, env);
        if name.contains('$') {
            return err(self.line, ParseErrorKind::Syntax(format!("unbound metavariable in `{name}`")));
        }
        let sym = Symbol::new(&name);
        match &t.args {
            None => match self.sig.arity(&sym) {
                Some(0) => Ok(Term::App(sym, Vec::new())),
                Some(n) => err(self.line, ParseErrorKind::ArityMismatch { symbol: name, expected: n, found: 0 }),
                None if t.name.contains('$') => err(self.line, ParseErrorKind::UndeclaredSymbol(name)),
                None => Ok(Term::Var(Var::new(name))),
            },
            Some(args) => {
                let Some(n) = self.sig.arity(&sym) else {
                    return err(self.line, ParseErrorKind::UndeclaredSymbol(name));
                };
                if n != args.len() {
                    return err(self.line, ParseErrorKind::ArityMismatch { symbol: name, expected: n, found: args.len() });
                }
                let args = args.iter().map(|a| self.resolve(a, env)).collect::<Result<_, _>>()?;
                Ok(Term::App(sym, args))
            }
        }
    }

    fn action(&self, label: &str, env: &Env) -> Result<Action, ParseError> {
        let name = substitute(label, env);
        let a = Action::new(&name);
        if self.actions.contains(&a) {
            Ok(a)
        } else {
            err(self.line, ParseErrorKind::UndeclaredAction(name))
        }
    }

    fn literal(&self, l: &RawLit, env: &Env) -> Result<Literal, ParseError> {
        let source = self.resolve(&l.source, env)?;
        let action = self.action(&l.label, env)?;
        Ok(match &l.target {
            None => Literal::Neg { source, action },
            Some(t) => Literal::Pos { source, action, target: self.resolve(t, env)? },
        })
    }

    fn operand(&self, s: &str, env: &Env) -> Action {
        Action::new(substitute(s, env))
    }

    fn holds(&self, c: &RawCond, env: &Env) -> Result<bool, ParseError> {
        let l = self.operand(&c.lhs, env);
        let r = self.operand(&c.rhs, env);
        Ok(match c.op {
            CondOp::Neq => l != r,
            CondOp::Eq => l == r,
            CondOp::Lt | CondOp::Gt if self.order.is_empty() => return err(self.line, ParseErrorKind::NoOrdering),
            CondOp::Lt => self.order.less(&l, &r),
            CondOp::Gt => self.order.less(&r, &l),
        })
    }

    /// All assignments of `vars` over the actions, extending `base`.
    fn assignments(&self, vars: &BTreeSet<String>, base: &Env) -> Vec<Env> {
        let mut envs = vec![base.clone()];
        for v in vars {
            envs = envs
                .into_iter()
                .flat_map(|e| {
                    self.actions.iter().map(move |a| {
                        let mut e = e.clone();
                        e.insert(v.clone(), a.clone());
                        e
                    })
                })
                .collect();
        }
        envs
    }

    fn rule(&self, raw: &RawRule) -> Result<Vec<Rule>, ParseError> {
        let mut global = lit_metavars(&raw.conclusion);
        for p in raw.premises.iter().filter(|p| !p.neg) {
            global.extend(lit_metavars(p));
        }
        let locals: Vec<BTreeSet<String>> = raw
            .premises
            .iter()
            .map(|p| if p.neg { lit_metavars(p).difference(&global).cloned().collect() } else { BTreeSet::new() })
            .collect();
        let mut global_conds = Vec::new();
        let mut local_conds: Vec<Vec<&RawCond>> = vec![Vec::new(); raw.premises.len()];
        for c in &raw.conds {
            let vars = cond_metavars(c);
            let outside: BTreeSet<String> = vars.difference(&global).cloned().collect();
            if outside.is_empty() {
                global_conds.push(c);
                continue;
            }
            let owners: Vec<usize> = (0..raw.premises.len()).filter(|&i| !locals[i].is_disjoint(&outside)).collect();
            if owners.is_empty() {
                let v = outside.into_iter().next().unwrap_or_default();
                return err(raw.line, ParseErrorKind::UnknownMetavariable(v));
            }
            for &i in &owners {
                if !outside.is_subset(&locals[i]) {
                    return err(raw.line, ParseErrorKind::CrossPremiseCondition);
                }
                local_conds[i].push(c);
            }
        }
        let mut rules = Vec::new();
        for env in self.assignments(&global, &Env::new()) {
            let mut keep = true;
            for c in &global_conds {
                keep &= self.holds(c, &env)?;
            }
            if !keep {
                continue;
            }
            let mut premises = BTreeSet::new();
            for (i, p) in raw.premises.iter().enumerate() {
                for local in self.assignments(&locals[i], &env) {
                    let mut ok = true;
                    for c in &local_conds[i] {
                        ok &= self.holds(c, &local)?;
                    }
                    if ok {
                        premises.insert(self.literal(p, &local)?);
                    }
                }
            }
            let conclusion = self.literal(&raw.conclusion, &env)?;
            let (name, origin) = if global.is_empty() {
                (raw.name.clone(), None)
            } else {
                let bindings: Vec<(String, Action)> = env.iter().map(|(k, v)| (k.clone(), v.clone())).collect();
                let tag = bindings.iter().map(|(k, v)| format!("{k}={v}")).collect::<Vec<_>>().join(",");
                (format!("{}[{tag}]", raw.name), Some(Instantiation { template: raw.name.clone(), bindings }))
            };
            rules.push(Rule { name, premises, conclusion, origin });
        }
        Ok(rules)
    }
}

fn parse_sig(toks: &[Tok], line: usize, sig: &mut Signature) -> Result<(), ParseError> {
    let mut cur = Cursor { toks, pos: 0, line };
    while !cur.at_end() {
        let name = match cur.bump() {
            Some(Tok::Ident(s)) | Some(Tok::Op(s)) => s.clone(),
            _ => return syntax(line, "expected a symbol name"),
        };
        if name.starts_with('_') || name.contains('$') {
            return syntax(line, format!("`{name}` is reserved"));
        }
        cur.expect(&Tok::Slash)?;
        let arity = match cur.bump() {
            Some(Tok::Ident(n)) => n.parse::<usize>().map_err(|_| ParseError {
                line,
                kind: ParseErrorKind::Syntax(format!("bad arity `{n}`")),
            })?,
            _ => return syntax(line, "expected an arity"),
        };
        let mut liquidity = None;
        if cur.peek() == Some(&Tok::LBracket) {
            cur.bump();
            let mut flags = Vec::new();
            loop {
                match cur.bump() {
                    Some(Tok::RBracket) => break,
                    Some(Tok::Ident(w)) if w == "liquid" => flags.push(true),
                    Some(Tok::Ident(w)) if w == "frozen" => flags.push(false),
                    _ => return syntax(line, "expected `liquid`, `frozen` or `]`"),
                }
            }
            if flags.len() != arity {
                return syntax(line, format!("`{name}` has arity {arity} but {} liquidity flags", flags.len()));
            }
            liquidity = Some(flags);
        }
        let decl = FunctionDecl { name: Symbol::new(&name), arity, liquidity };
        if sig.declare(decl).is_some() {
            return err(line, ParseErrorKind::DuplicateSymbol(name));
        }
    }
    Ok(())
}

fn parse_ord(toks: &[Tok], line: usize, pairs: &mut Vec<(Action, Action)>) -> Result<(), ParseError> {
    let mut cur = Cursor { toks, pos: 0, line };
    let mut prev = cur.label()?;
    while !cur.at_end() {
        let op = cur.bump().cloned();
        let next = cur.label()?;
        match op {
            Some(Tok::Lt) => pairs.push((Action::new(&prev), Action::new(&next))),
            Some(Tok::Gt) => pairs.push((Action::new(&next), Action::new(&prev))),
            _ => return syntax(line, "expected `<` or `>` in ordering"),
        }
        prev = next;
    }
    Ok(())
}

/// Parses and elaborates a specification.
pub fn parse_tss(src: &str) -> Result<Tss, ParseError> {
    let mut sig = Signature::new();
    let mut actions: Vec<Action> = Vec::new();
    let mut pairs = Vec::new();
    let mut raw_rules = Vec::new();
    for (idx, raw_line) in src.lines().enumerate() {
        let line = idx + 1;
        let text = raw_line.split('#').next().unwrap_or("").trim();
        if text.is_empty() {
            continue;
        }
        let (kw, rest) = text.split_once(char::is_whitespace).unwrap_or((text, ""));
        match kw {
            "sig" => parse_sig(&lex(rest, line)?, line, &mut sig)?,
            "act" => {
                for a in rest.split_whitespace() {
                    if !a.chars().all(is_ident_char) || a.contains('$') {
                        return syntax(line, format!("bad action name `{a}`"));
                    }
                    let a = Action::new(a);
                    if !actions.contains(&a) {
                        actions.push(a);
                    }
                }
            }
            "ord" => parse_ord(&lex(rest, line)?, line, &mut pairs)?,
            "rule" => {
                let Some((name, body)) = rest.split_once(':') else {
                    return syntax(line, "expected `rule NAME: ...`");
                };
                let name = name.trim();
                if name.is_empty() || name.contains(char::is_whitespace) {
                    return syntax(line, "bad rule name");
                }
                raw_rules.push(parse_rule_body(name, body, line)?);
            }
            _ => return syntax(line, format!("unknown directive `{kw}`")),
        }
    }
    for (lo, hi) in &pairs {
        for a in [lo, hi] {
            if !actions.contains(a) {
                return err(0, ParseErrorKind::UndeclaredAction(a.to_string()));
            }
        }
    }
    let order = ActionOrder::new(pairs).ok_or(ParseError { line: 0, kind: ParseErrorKind::CyclicOrdering })?;
    let mut rules = Vec::new();
    for raw in &raw_rules {
        let el = Elaborator { sig: &sig, actions: &actions, order: &order, line: raw.line };
        rules.extend(el.rule(raw)?);
    }
    Ok(Tss { signature: sig, actions, order, rules, universe_relative: false })
}

/// Parses a single term; undeclared nullary names are variables.
pub fn parse_term(src: &str, sig: &Signature) -> Result<Term, ParseError> {
    let toks = lex(src, 1)?;
    let mut cur = Cursor { toks: &toks, pos: 0, line: 1 };
    let raw = cur.term(0)?;
    if !cur.at_end() {
        return syntax(1, "trailing input after term");
    }
    let el = Elaborator { sig, actions: &[], order: &ActionOrder::default(), line: 1 };
    el.resolve(&raw, &Env::new())
}

/// Parses a literal `t -a-> u` or `t -/a->`.
pub fn parse_literal(src: &str, tss: &Tss) -> Result<Literal, ParseError> {
    let toks = lex(src, 1)?;
    let mut cur = Cursor { toks: &toks, pos: 0, line: 1 };
    let raw = cur.literal()?;
    if !cur.at_end() {
        return syntax(1, "trailing input after literal");
    }
    let el = Elaborator { sig: &tss.signature, actions: &tss.actions, order: &tss.order, line: 1 };
    el.literal(&raw, &Env::new())
}
