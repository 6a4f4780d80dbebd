use std::collections::BTreeSet;
use std::fmt;

use serde::{Serialize, Serializer};

use crate::syntax::{Path, Signature, Symbol, Term};

/// An argument position of a function symbol. `index` is 0-based; display is 1-based.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ArgPos {
    pub symbol: Symbol,
    pub index: usize,
}

impl ArgPos {
    pub fn new(symbol: impl Into<Symbol>, index: usize) -> ArgPos {
        ArgPos { symbol: symbol.into(), index }
    }
}

impl fmt::Display for ArgPos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.symbol, self.index + 1)
    }
}

impl fmt::Debug for ArgPos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl Serialize for ArgPos {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// The set of liquid argument positions; all others are frozen.
#[derive(Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct Lambda(BTreeSet<ArgPos>);

impl Lambda {
    pub fn empty() -> Lambda {
        Lambda::default()
    }

    /// Every argument position of the signature.
    pub fn universal(sig: &Signature) -> Lambda {
        Lambda(all_positions(sig).into_iter().collect())
    }

    /// Positions declared liquid in the signature; undeclared ones are frozen.
    pub fn declared(sig: &Signature) -> Lambda {
        let mut out = BTreeSet::new();
        for d in sig.iter() {
            if let Some(flags) = &d.liquidity {
                for (i, &l) in flags.iter().enumerate() {
                    if l {
                        out.insert(ArgPos { symbol: d.name.clone(), index: i });
                    }
                }
            }
        }
        Lambda(out)
    }

    pub fn is_liquid(&self, f: &Symbol, i: usize) -> bool {
        self.0.iter().any(|p| &p.symbol == f && p.index == i)
    }

    pub fn insert(&mut self, p: ArgPos) -> bool {
        self.0.insert(p)
    }

    pub fn contains(&self, p: &ArgPos) -> bool {
        self.0.contains(p)
    }

    pub fn iter(&self) -> impl Iterator<Item = &ArgPos> {
        self.0.iter()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_subset(&self, other: &Lambda) -> bool {
        self.0.is_subset(&other.0)
    }
}

impl FromIterator<ArgPos> for Lambda {
    fn from_iter<I: IntoIterator<Item = ArgPos>>(iter: I) -> Lambda {
        Lambda(iter.into_iter().collect())
    }
}

impl fmt::Display for Lambda {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, p) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{p}")?;
        }
        f.write_str("}")
    }
}

impl fmt::Debug for Lambda {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

pub fn all_positions(sig: &Signature) -> Vec<ArgPos> {
    sig.iter()
        .flat_map(|d| (0..d.arity).map(move |i| ArgPos { symbol: d.name.clone(), index: i }))
        .collect()
}

/// The argument positions passed on the way from the root of `t` to `path`.
pub fn positions_along(t: &Term, path: &[usize]) -> Vec<ArgPos> {
    let mut out = Vec::new();
    let mut cur = t;
    for &i in path {
        match cur {
            Term::App(f, args) if i < args.len() => {
                out.push(ArgPos { symbol: f.clone(), index: i });
                cur = &args[i];
            }
            _ => break,
        }
    }
    out
}

/// True if every step from the root of `t` to `path` goes through a liquid argument.
/// The empty path (the term itself) is liquid.
pub fn liquid_occurrence(t: &Term, path: &Path, lambda: &Lambda) -> bool {
    positions_along(t, path).iter().all(|p| lambda.contains(p))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn liquidity_follows_the_path() {
        let t = Term::app(".", vec![Term::var("y"), Term::app("*", vec![Term::var("x1"), Term::var("x2")])]);
        let l: Lambda = [ArgPos::new(".", 0), ArgPos::new(".", 1)].into_iter().collect();
        assert!(liquid_occurrence(&t, &vec![0], &l));
        assert!(!liquid_occurrence(&t, &vec![1, 0], &l));
        assert!(liquid_occurrence(&Term::var("x"), &vec![], &Lambda::empty()));
        assert_eq!(l.to_string(), "{(.,1), (.,2)}");
    }
}
