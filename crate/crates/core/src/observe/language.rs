use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::{Serialize, Serializer};

use super::Formula;
use crate::syntax::Action;

/// The observation languages, their conjunctive closures, and trace
/// formulas conjoined with refusals.
#[derive(Clone, PartialEq, Eq, Hash)]
pub enum Sublanguage {
    T,
    CT,
    F,
    R,
    FT,
    RT,
    /// n-nested simulation; `Nested(1)` is plain simulation.
    Nested(u32),
    RS,
    B,
    Conjunctive(Box<Sublanguage>),
    TracesWithRefusals,
}

impl Sublanguage {
    pub const BASIC: [Sublanguage; 10] = [
        Sublanguage::T,
        Sublanguage::CT,
        Sublanguage::F,
        Sublanguage::R,
        Sublanguage::FT,
        Sublanguage::RT,
        Sublanguage::Nested(1),
        Sublanguage::Nested(2),
        Sublanguage::RS,
        Sublanguage::B,
    ];

    pub fn conjunctive(self) -> Sublanguage {
        match self {
            Sublanguage::Conjunctive(_) | Sublanguage::TracesWithRefusals => self,
            n => Sublanguage::Conjunctive(Box::new(n)),
        }
    }

    /// Grammar check on a normalized formula over the action set `actions`.
    pub fn contains(&self, f: &Formula, actions: &[Action]) -> bool {
        use Sublanguage::*;
        let step = |g: &Formula| self.contains(g, actions);
        match (self, f) {
            (Conjunctive(n), f) => n.contains(f, actions) || conj_closed(n, f, actions),
            (TracesWithRefusals, f) => f.conjuncts().iter().all(|g| matches!(g, Formula::Cannot(_)) || T.contains(g, actions)),
            (_, Formula::Top) => true,
            (_, Formula::Prefix(_, g)) => step(g),
            (T, _) => false,
            (CT, f) => {
                let all: BTreeSet<&Action> = actions.iter().collect();
                refusals_only(f) && cannots(f) == all
            }
            (F, f) => refusals_only(f),
            (R, f) => f.conjuncts().iter().all(|g| matches!(g, Formula::Cannot(_)) || is_ready(g)),
            (FT, f) => {
                let rest: Vec<&Formula> = f.conjuncts().iter().filter(|g| !matches!(g, Formula::Cannot(_))).collect();
                rest.len() <= 1 && rest.iter().all(|g| matches!(g, Formula::Prefix(..)) && step(g))
            }
            (RT, f) => {
                let mut deep = 0;
                for g in f.conjuncts() {
                    match g {
                        Formula::Cannot(_) => {}
                        g if is_ready(g) => {}
                        Formula::Prefix(_, h) if step(h) => deep += 1,
                        _ => return false,
                    }
                }
                deep <= 1
            }
            (Nested(n), Formula::Neg(g)) => *n >= 2 && Nested(n - 1).contains(g, actions),
            (Nested(_), Formula::Conj(items)) => items.iter().all(step),
            (Nested(_), _) => false,
            (RS, Formula::Cannot(_)) => true,
            (RS, Formula::Conj(items)) => items.iter().all(step),
            (RS, _) => false,
            (B, Formula::Neg(g)) => step(g),
            (B, Formula::Conj(items)) => items.iter().all(step),
            (B, _) => false,
        }
    }
}

fn is_ready(g: &Formula) -> bool {
    matches!(g, Formula::Prefix(_, h) if **h == Formula::Top)
}

fn refusals_only(f: &Formula) -> bool {
    f.conjuncts().iter().all(|g| matches!(g, Formula::Cannot(_)))
}

fn cannots(f: &Formula) -> BTreeSet<&Action> {
    f.conjuncts()
        .iter()
        .filter_map(|g| match g {
            Formula::Cannot(a) => Some(a),
            _ => None,
        })
        .collect()
}

/// Splits the conjuncts into the refusals, kept together, and everything
/// else, taken one at a time.
fn conj_closed(n: &Sublanguage, f: &Formula, actions: &[Action]) -> bool {
    let refusals: Vec<Formula> = f.conjuncts().iter().filter(|g| matches!(g, Formula::Cannot(_))).cloned().collect();
    let refusal_ok = refusals.is_empty() || n.contains(&Formula::and(refusals), actions);
    refusal_ok && f.conjuncts().iter().filter(|g| !matches!(g, Formula::Cannot(_))).all(|g| n.contains(g, actions))
}

impl fmt::Display for Sublanguage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Sublanguage::T => f.write_str("T"),
            Sublanguage::CT => f.write_str("CT"),
            Sublanguage::F => f.write_str("F"),
            Sublanguage::R => f.write_str("R"),
            Sublanguage::FT => f.write_str("FT"),
            Sublanguage::RT => f.write_str("RT"),
            Sublanguage::Nested(n) => write!(f, "{n}S"),
            Sublanguage::RS => f.write_str("RS"),
            Sublanguage::B => f.write_str("B"),
            Sublanguage::Conjunctive(n) => write!(f, "{n}^"),
            Sublanguage::TracesWithRefusals => f.write_str("T^~"),
        }
    }
}

impl fmt::Debug for Sublanguage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl Serialize for Sublanguage {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl FromStr for Sublanguage {
    type Err = String;

    fn from_str(s: &str) -> Result<Sublanguage, String> {
        if s == "T^~" {
            return Ok(Sublanguage::TracesWithRefusals);
        }
        if let Some(inner) = s.strip_suffix('^') {
            return Ok(inner.parse::<Sublanguage>()?.conjunctive());
        }
        Ok(match s {
            "T" => Sublanguage::T,
            "CT" => Sublanguage::CT,
            "F" => Sublanguage::F,
            "R" => Sublanguage::R,
            "FT" => Sublanguage::FT,
            "RT" => Sublanguage::RT,
            "RS" => Sublanguage::RS,
            "B" => Sublanguage::B,
            _ => match s.strip_suffix('S').and_then(|n| n.parse::<u32>().ok()) {
                Some(n) if n >= 1 => Sublanguage::Nested(n),
                _ => return Err(format!("unknown sublanguage `{s}`")),
            },
        })
    }
}
