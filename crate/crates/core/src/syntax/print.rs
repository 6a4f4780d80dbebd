use std::fmt::Write;

use super::tss::Tss;

/// Renders a specification in the text format accepted by [`super::parse_tss`].
pub fn print_tss(tss: &Tss) -> String {
    let mut out = String::new();
    if tss.universe_relative {
        out.push_str("# universe-relative\n");
    }
    for d in tss.signature.iter() {
        let _ = write!(out, "sig {}/{}", d.name, d.arity);
        if let Some(flags) = &d.liquidity {
            let words: Vec<&str> = flags.iter().map(|&l| if l { "liquid" } else { "frozen" }).collect();
            let _ = write!(out, " [{}]", words.join(" "));
        }
        out.push('\n');
    }
    if !tss.actions.is_empty() {
        let names: Vec<&str> = tss.actions.iter().map(|a| a.as_str()).collect();
        let _ = writeln!(out, "act {}", names.join(" "));
    }
    for (lo, hi) in tss.order.declared() {
        let _ = writeln!(out, "ord {lo} < {hi}");
    }
    for r in &tss.rules {
        let _ = writeln!(out, "{r}");
    }
    out
}
