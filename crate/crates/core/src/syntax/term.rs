use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use serde::{Serialize, Serializer};

macro_rules! name_type {
    ($(#[$meta:meta])* $name:ident) => {
        $(#[$meta])*
        #[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
        pub struct $name(Arc<str>);

        impl $name {
            pub fn new(name: impl AsRef<str>) -> Self {
                $name(Arc::from(name.as_ref()))
            }

            pub fn as_str(&self) -> &str {
                &self.0
            }
        }

        impl fmt::Debug for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                write!(f, "{}", self.0)
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(&self.0)
            }
        }

        impl Serialize for $name {
            fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
                s.serialize_str(&self.0)
            }
        }

        impl From<&str> for $name {
            fn from(s: &str) -> Self {
                $name::new(s)
            }
        }
    };
}

name_type!(
    /// A function symbol of the signature.
    Symbol
);
name_type!(
    /// A term variable.
    Var
);
name_type!(
    /// An action label. The termination label is spelled `sqrt`.
    Action
);

impl Action {
    pub fn is_termination(&self) -> bool {
        self.as_str() == "sqrt"
    }
}

/// Characters that make up infix operator symbols.
pub(crate) const OP_CHARS: &[char] = &['+', '.', '*', ';'];

impl Symbol {
    /// Binary symbols spelled with operator characters print infix.
    pub fn is_operator(&self) -> bool {
        !self.0.is_empty() && self.0.chars().all(|c| OP_CHARS.contains(&c))
    }

    pub(crate) fn precedence(&self) -> u8 {
        match self.as_str() {
            "+" => 1,
            ";" => 2,
            "*" => 4,
            _ => 3,
        }
    }
}

/// Position of a subterm, as the list of argument indices (0-based) from the root.
pub type Path = Vec<usize>;

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Term {
    Var(Var),
    App(Symbol, Vec<Term>),
}

impl Term {
    pub fn var(name: impl AsRef<str>) -> Term {
        Term::Var(Var::new(name))
    }

    pub fn constant(name: impl AsRef<str>) -> Term {
        Term::App(Symbol::new(name), Vec::new())
    }

    pub fn app(name: impl AsRef<str>, args: Vec<Term>) -> Term {
        Term::App(Symbol::new(name), args)
    }

    pub fn as_var(&self) -> Option<&Var> {
        match self {
            Term::Var(v) => Some(v),
            Term::App(..) => None,
        }
    }

    pub fn is_var(&self) -> bool {
        matches!(self, Term::Var(_))
    }

    pub fn head(&self) -> Option<&Symbol> {
        match self {
            Term::App(f, _) => Some(f),
            Term::Var(_) => None,
        }
    }

    pub fn args(&self) -> &[Term] {
        match self {
            Term::App(_, args) => args,
            Term::Var(_) => &[],
        }
    }

    pub fn is_closed(&self) -> bool {
        match self {
            Term::Var(_) => false,
            Term::App(_, args) => args.iter().all(Term::is_closed),
        }
    }

    pub fn vars(&self) -> BTreeSet<Var> {
        let mut out = BTreeSet::new();
        self.collect_vars(&mut out);
        out
    }

    pub(crate) fn collect_vars(&self, out: &mut BTreeSet<Var>) {
        match self {
            Term::Var(v) => {
                out.insert(v.clone());
            }
            Term::App(_, args) => args.iter().for_each(|a| a.collect_vars(out)),
        }
    }

    pub fn contains_var(&self, v: &Var) -> bool {
        match self {
            Term::Var(w) => w == v,
            Term::App(_, args) => args.iter().any(|a| a.contains_var(v)),
        }
    }

    /// Every variable occurrence with its path, left to right.
    pub fn var_occurrences(&self) -> Vec<(Path, Var)> {
        let mut out = Vec::new();
        let mut path = Vec::new();
        self.walk_vars(&mut path, &mut out);
        out
    }

    fn walk_vars(&self, path: &mut Path, out: &mut Vec<(Path, Var)>) {
        match self {
            Term::Var(v) => out.push((path.clone(), v.clone())),
            Term::App(_, args) => {
                for (i, a) in args.iter().enumerate() {
                    path.push(i);
                    a.walk_vars(path, out);
                    path.pop();
                }
            }
        }
    }

    pub fn occurrences_of(&self, v: &Var) -> Vec<Path> {
        self.var_occurrences()
            .into_iter()
            .filter(|(_, w)| w == v)
            .map(|(p, _)| p)
            .collect()
    }

    pub fn at(&self, path: &[usize]) -> Option<&Term> {
        match path.split_first() {
            None => Some(self),
            Some((&i, rest)) => self.args().get(i)?.at(rest),
        }
    }

    /// Number of function symbol occurrences.
    pub fn symbol_count(&self) -> usize {
        match self {
            Term::Var(_) => 0,
            Term::App(_, args) => 1 + args.iter().map(Term::symbol_count).sum::<usize>(),
        }
    }

    pub fn symbols(&self) -> BTreeSet<Symbol> {
        let mut out = BTreeSet::new();
        self.collect_symbols(&mut out);
        out
    }

    fn collect_symbols(&self, out: &mut BTreeSet<Symbol>) {
        if let Term::App(f, args) = self {
            out.insert(f.clone());
            args.iter().for_each(|a| a.collect_symbols(out));
        }
    }

    pub fn height(&self) -> usize {
        match self {
            Term::Var(_) => 0,
            Term::App(_, args) => 1 + args.iter().map(Term::height).max().unwrap_or(0),
        }
    }

    pub fn size(&self) -> usize {
        1 + self.args().iter().map(Term::size).sum::<usize>()
    }

    /// All subterms, including the term itself.
    pub fn subterms(&self) -> Vec<&Term> {
        let mut out = vec![self];
        let mut i = 0;
        while i < out.len() {
            let t = out[i];
            out.extend(t.args());
            i += 1;
        }
        out
    }

    /// Source of an ntyft rule: one symbol applied to distinct variables.
    pub fn is_flat_pattern(&self) -> bool {
        match self {
            Term::Var(_) => false,
            Term::App(_, args) => {
                let vars: BTreeSet<_> = args.iter().filter_map(Term::as_var).collect();
                vars.len() == args.len()
            }
        }
    }

    fn fmt_prec(&self, f: &mut fmt::Formatter<'_>, outer: u8, right: bool) -> fmt::Result {
        match self {
            Term::Var(v) => write!(f, "{v}"),
            Term::App(s, args) if s.is_operator() && args.len() == 2 => {
                let p = s.precedence();
                let paren = p < outer || (p == outer && right);
                if paren {
                    f.write_str("(")?;
                }
                args[0].fmt_prec(f, p, false)?;
                write!(f, "{s}")?;
                args[1].fmt_prec(f, p, true)?;
                if paren {
                    f.write_str(")")?;
                }
                Ok(())
            }
            Term::App(s, args) if args.is_empty() => write!(f, "{s}"),
            Term::App(s, args) => {
                write!(f, "{s}(")?;
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        f.write_str(",")?;
                    }
                    a.fmt_prec(f, 0, false)?;
                }
                f.write_str(")")
            }
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_prec(f, 0, false)
    }
}

impl fmt::Debug for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl Serialize for Term {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn seq(a: Term, b: Term) -> Term {
        Term::app(".", vec![a, b])
    }

    #[test]
    fn infix_printing_is_minimal_and_left_associative() {
        let a = Term::constant("a");
        let b = Term::constant("b");
        let c = Term::constant("c");
        let sum = Term::app("+", vec![a.clone(), b.clone()]);
        assert_eq!(seq(sum.clone(), c.clone()).to_string(), "(a+b).c");
        assert_eq!(seq(seq(a.clone(), b.clone()), c.clone()).to_string(), "a.b.c");
        assert_eq!(seq(a.clone(), seq(b.clone(), c.clone())).to_string(), "a.(b.c)");
        assert_eq!(Term::app("+", vec![seq(a, b), c]).to_string(), "a.b+c");
    }

    #[test]
    fn occurrences_and_paths() {
        let t = Term::app("f", vec![Term::var("x"), Term::app("g", vec![Term::var("x")])]);
        assert_eq!(t.occurrences_of(&Var::new("x")), vec![vec![0], vec![1, 0]]);
        assert_eq!(t.at(&[1, 0]), Some(&Term::var("x")));
        assert_eq!(t.symbol_count(), 2);
        assert!(!t.is_flat_pattern());
    }
}
