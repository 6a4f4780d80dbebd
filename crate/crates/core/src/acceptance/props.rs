//! Single seeded cases of the randomized property suites. Each returns
//! whether the case was checked or skipped, or a description of the failure.

use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::decompose::{check_inverse_images, closed_terms, DecomposeError};
use crate::format::{check_format, Format, LambdaMode};
use crate::gen::{random_acyclic, random_closed_term, random_open_term, random_rs_formula, random_tss, TssShape};
use crate::observe::{preorder_holds, Sublanguage};
use crate::semantics::{build_lts, ground_program, standard_provable, supported_provable, ws_provable, GroundOptions, SemanticsError};
use crate::syntax::{Literal, Term, Tss};
use crate::transform::{plus_pipeline, run_stages, PipelineOptions, Stage};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Case {
    Checked,
    Skipped(String),
}

pub type CaseResult = Result<Case, String>;

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn roots(rng: &mut ChaCha8Rng, tss: &Tss, n: usize) -> Vec<Term> {
    let set: BTreeSet<Term> = (0..n).map(|_| random_closed_term(rng, &tss.signature, 2)).collect();
    set.into_iter().collect()
}

fn semantics_skip(e: SemanticsError) -> CaseResult {
    match e {
        SemanticsError::Explosion { .. } => Ok(Case::Skipped(e.to_string())),
        e => Err(e.to_string()),
    }
}

/// Brute-force agreement of a random term, formula and substitution universe with their decompositions.
pub fn inverse_agreement_case(seed: u64) -> CaseResult {
    let mut rng = rng(seed);
    let tss = random_tss(&mut rng, &TssShape::default());
    let t = random_open_term(&mut rng, &tss.signature, 2, 3);
    let f = random_rs_formula(&mut rng, &tss.actions, 2);
    let mut universe = closed_terms(&tss.signature, 2, 200);
    universe.shuffle(&mut rng);
    universe.truncate(4);
    match check_inverse_images(&tss, &t, &f, &universe, 6) {
        Ok(c) => match c.mismatch {
            Some(m) => Err(format!("{t} against {f}: {m:?}")),
            None if c.checked == 0 => Ok(Case::Skipped("no conclusive substitution".into())),
            None => Ok(Case::Checked),
        },
        Err(DecomposeError::Explosion { what, cap }) => Ok(Case::Skipped(format!("{what} above {cap}"))),
        Err(e) => Err(format!("{t} against {f}: {e}")),
    }
}

/// Finer preorder first; each must imply the second on every pair of states.
pub const HIERARCHY: [(&str, &str); 11] = [
    ("B", "2S"),
    ("2S", "RS"),
    ("RS", "1S"),
    ("RS", "RT"),
    ("RT", "R"),
    ("RT", "FT"),
    ("R", "F"),
    ("FT", "F"),
    ("F", "CT"),
    ("CT", "T"),
    ("1S", "T"),
];

/// The inclusions between the preorders on a random acyclic fragment.
pub fn hierarchy_case(seed: u64) -> CaseResult {
    let mut rng = rng(seed);
    let tss = random_acyclic(&mut rng, 5, 2, 0.45);
    let states: Vec<Term> = tss.signature.iter().map(|d| Term::App(d.name.clone(), Vec::new())).collect();
    let lts = build_lts(&tss, &states, 6).map_err(|e| e.to_string())?;
    for (fine, coarse) in HIERARCHY {
        let (fine_l, coarse_l): (Sublanguage, Sublanguage) = (fine.parse().map_err(|e| format!("{e:?}"))?, coarse.parse().map_err(|e| format!("{e:?}"))?);
        for p in &states {
            for q in &states {
                let hf = preorder_holds(&lts, p, q, &fine_l, 5).map_err(|e| e.to_string())?;
                if hf && !preorder_holds(&lts, p, q, &coarse_l, 5).map_err(|e| e.to_string())? {
                    return Err(format!("{p} below {q} for {fine} but not for {coarse}"));
                }
            }
        }
    }
    Ok(Case::Checked)
}

/// Supported and well-supported provability coincide on a random decent xynft specification.
pub fn supported_is_ws_case(seed: u64) -> CaseResult {
    let mut rng = rng(seed);
    let tss = random_tss(&mut rng, &TssShape::default());
    let roots = roots(&mut rng, &tss, 2);
    let g = match ground_program(&tss, &roots, &GroundOptions::depth(3)) {
        Ok(g) => g,
        Err(e) => return semantics_skip(e),
    };
    let (s, ws) = (supported_provable(&g), ws_provable(&g));
    if s.literals() != ws.literals() {
        let diff: Vec<String> = s.literals().symmetric_difference(&ws.literals()).take(3).map(ToString::to_string).collect();
        return Err(format!("supported and ws differ on {}", diff.join(", ")));
    }
    Ok(Case::Checked)
}

/// Standard provability from the plus construction equals supported provability from the input.
pub fn plus_is_supported_case(seed: u64) -> CaseResult {
    let mut rng = rng(seed);
    let tss = random_tss(&mut rng, &TssShape::default());
    let roots = roots(&mut rng, &tss, 2);
    let (plus, _) = plus_pipeline(&tss, &PipelineOptions::default()).map_err(|e| e.to_string())?;
    let opts = GroundOptions::depth(3);
    let (g, gp) = match (ground_program(&tss, &roots, &opts), ground_program(&plus, &roots, &opts)) {
        (Ok(g), Ok(gp)) => (g, gp),
        (Err(e), _) | (_, Err(e)) => return semantics_skip(e),
    };
    let supported = supported_provable(&g);
    let tainted: BTreeSet<_> = g.tainted.union(&gp.tainted).cloned().collect();
    let keep = |l: &Literal| !tainted.contains(&(l.source().clone(), l.action().clone()));
    let want: BTreeSet<Literal> = supported.literals().into_iter().filter(keep).collect();
    let got: BTreeSet<Literal> = standard_provable(&gp).into_iter().filter(|l| g.universe.contains(l.source())).filter(keep).collect();
    if want != got {
        let diff: Vec<String> = want.symmetric_difference(&got).take(3).map(ToString::to_string).collect();
        return Err(format!("standard on the plus construction differs on {}", diff.join(", ")));
    }
    Ok(Case::Checked)
}

const PRESERVED: [Format; 5] = [Format::NtyftNtyxt, Format::ReadySimulation, Format::ReadyTrace, Format::Readiness, Format::FailureTrace];

/// Every format the input satisfies holds after every pipeline stage.
pub fn format_preservation(tss: &Tss) -> CaseResult {
    let held: Vec<Format> = PRESERVED.into_iter().filter(|&f| check_format(tss, f, &LambdaMode::Auto).is_ok_and(|r| r.holds)).collect();
    for stage in Stage::ALL {
        let (out, _) = run_stages(tss, &PipelineOptions::default(), stage).map_err(|e| e.to_string())?;
        for &f in &held {
            let r = check_format(&out, f, &LambdaMode::Auto).map_err(|e| e.to_string())?;
            if !r.holds {
                return Err(format!("{f} lost after the {stage} stage: {:?}", r.violations.first()));
            }
        }
    }
    Ok(Case::Checked)
}

pub fn format_preservation_case(seed: u64) -> CaseResult {
    format_preservation(&random_tss(&mut rng(seed), &TssShape::default()))
}

/// The well-supported relation never proves a literal together with one denying it.
pub fn ws_consistency_case(seed: u64) -> CaseResult {
    let mut rng = rng(seed);
    let shape = TssShape { max_premises: 3, ..TssShape::default() };
    let tss = random_tss(&mut rng, &shape);
    let roots = roots(&mut rng, &tss, 3);
    let g = match ground_program(&tss, &roots, &GroundOptions::depth(3)) {
        Ok(g) => g,
        Err(e) => return semantics_skip(e),
    };
    if ws_provable(&g).is_consistent() {
        Ok(Case::Checked)
    } else {
        Err("ws relation proves a denying pair".into())
    }
}
