//! Answer-set program generation.
//!
//! Programs use clingo surface syntax: choice rules with a `= 1` bound,
//! conditional literals, `;`-separated bodies and term pooling. Statements
//! are laid out facts first, then rules, then integrity constraints.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;
use core::fmt::Write as _;

use crate::calculus::{is_valid_token, Calculus, Tier};
use crate::network::NormalizedNetwork;
use crate::relation::{RelationIndex, RelationSet};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Variant {
    Gen0,
    Gen1,
    Gen2,
    Gen3,
}

impl Variant {
    pub const ALL: [Variant; 4] = [Variant::Gen0, Variant::Gen1, Variant::Gen2, Variant::Gen3];

    /// Lowercase tag used in file names.
    pub fn tag(self) -> &'static str {
        match self {
            Variant::Gen0 => "gen0",
            Variant::Gen1 => "gen1",
            Variant::Gen2 => "gen2",
            Variant::Gen3 => "gen3",
        }
    }

    pub fn parse(s: &str) -> Option<Variant> {
        Variant::ALL
            .into_iter()
            .find(|v| v.tag().eq_ignore_ascii_case(s))
    }

    pub fn required_tier(self) -> Tier {
        match self {
            Variant::Gen0 => Tier::Gen0,
            Variant::Gen1 => Tier::Gen1,
            Variant::Gen2 | Variant::Gen3 => Tier::Gen2,
        }
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Variant::Gen0 => "GEN0",
            Variant::Gen1 => "GEN1",
            Variant::Gen2 => "GEN2",
            Variant::Gen3 => "GEN3",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum EmitError {
    Ineligible { variant: Variant, missing: &'static str },
    NoColors,
    BadColor(String),
}

impl fmt::Display for EmitError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EmitError::Ineligible { variant, missing } => {
                write!(f, "{variant} encoding requires {missing}")
            }
            EmitError::NoColors => f.write_str("at least one color is required"),
            EmitError::BadColor(c) => write!(f, "`{c}` is not a valid color constant"),
        }
    }
}

impl core::error::Error for EmitError {}

/// A generated program. The theory holds everything derived from the
/// calculus; the instance holds `element/1` and `constraint/3` facts.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AspProgram {
    pub variant: Variant,
    pub theory: String,
    pub instance: Option<String>,
    pub fact_count: usize,
    pub rule_count: usize,
}

impl AspProgram {
    /// Theory followed by the instance, if any.
    pub fn text(&self) -> String {
        let mut s = self.theory.clone();
        if let Some(inst) = &self.instance {
            s.push_str(inst);
        }
        s
    }

    /// Number of pooled `table/3` facts.
    pub fn table_fact_count(&self) -> usize {
        statements(&self.theory)
            .iter()
            .filter(|s| s.starts_with("table("))
            .count()
    }
}

#[derive(Default)]
struct Builder {
    header: Vec<String>,
    facts: Vec<String>,
    rules: Vec<String>,
    constraints: Vec<String>,
}

impl Builder {
    fn render(&self) -> String {
        let mut out = String::new();
        for h in &self.header {
            let _ = writeln!(out, "% {h}");
        }
        for s in self.facts.iter().chain(&self.rules).chain(&self.constraints) {
            out.push_str(s);
            out.push('\n');
        }
        out
    }
}

/// ASP constants for every relation: names already starting with a
/// lowercase letter are kept, others are lowercased when that stays unique
/// and quoted otherwise.
fn relation_terms(calc: &Calculus) -> Vec<String> {
    let names = calc.relation_names();
    let lowered: Vec<String> = names.iter().map(|n| n.to_ascii_lowercase()).collect();
    names
        .iter()
        .enumerate()
        .map(|(i, n)| {
            if n.as_bytes()[0].is_ascii_lowercase() {
                return n.clone();
            }
            let low = &lowered[i];
            let clash = names
                .iter()
                .enumerate()
                .any(|(j, m)| j != i && (m == low || lowered[j] == *low));
            if low.as_bytes()[0].is_ascii_lowercase() && !clash {
                low.clone()
            } else {
                format!("\"{n}\"")
            }
        })
        .collect()
}

fn pool(terms: &[String], members: impl IntoIterator<Item = RelationIndex>) -> String {
    let parts: Vec<&str> = members
        .into_iter()
        .map(|m| terms[m as usize].as_str())
        .collect();
    format!("({})", parts.join(";"))
}

fn check_tier(calc: &Calculus, variant: Variant) -> Result<(), EmitError> {
    let profile = calc.classify();
    let missing = match variant.required_tier() {
        Tier::Gen0 => None,
        Tier::Gen1 if !profile.involution => Some("involution of converse"),
        Tier::Gen2 if !profile.involution => Some("involution of converse and the identity law"),
        Tier::Gen2 if !profile.identity_law => Some("an identity relation satisfying the identity law"),
        _ => None,
    };
    match missing {
        Some(missing) => Err(EmitError::Ineligible { variant, missing }),
        None => Ok(()),
    }
}

/// Generates the encoding of `variant` for `calc`, plus instance facts when
/// a network is given.
pub fn emit(
    calc: &Calculus,
    net: Option<&NormalizedNetwork>,
    variant: Variant,
) -> Result<AspProgram, EmitError> {
    check_tier(calc, variant)?;
    let terms = relation_terms(calc);
    let id = calc.identity().map(|i| terms[i as usize].clone());
    let ordered = variant != Variant::Gen0;
    let mut b = Builder::default();

    b.header.push(format!("{} {} encoding", calc.name(), variant));
    if variant == Variant::Gen3 {
        b.header
            .push("composition table enforced by the native propagator; no table/3 constraints".into());
    }

    let all: Vec<RelationIndex> = (0..calc.relation_count() as RelationIndex).collect();
    b.facts.push(format!(
        "relation({}).",
        all.iter()
            .map(|&i| terms[i as usize].as_str())
            .collect::<Vec<_>>()
            .join("; ")
    ));
    if variant != Variant::Gen3 {
        let skip_identity = variant == Variant::Gen2;
        for &r in &all {
            for &s in &all {
                if skip_identity && (Some(r) == calc.identity() || Some(s) == calc.identity()) {
                    continue;
                }
                b.facts.push(format!(
                    "table({}, {}, {}).",
                    terms[r as usize],
                    terms[s as usize],
                    pool(&terms, calc.cell_listing(r, s).iter().copied())
                ));
            }
        }
    }

    let guard = if ordered { "X < Y" } else { "X != Y" };
    b.rules.push(format!(
        "{{true(X,R,Y) : relation(R)}} = 1 :- element(X); element(Y); {guard}."
    ));
    if let Some(id) = &id {
        b.rules.push(format!("true(X,{id},X) :- element(X)."));
    }
    if ordered {
        for &r in &all {
            let c = calc.converse(r);
            if c != r {
                b.rules.push(format!(
                    "true(Y,{},X) :- true(X,{},Y), X < Y.",
                    terms[c as usize], terms[r as usize]
                ));
            }
        }
    }

    match variant {
        Variant::Gen0 => b.constraints.push(
            ":- true(X,R1,Y); true(Y,R2,Z); not true(X,Rout,Z) : table(R1,R2,Rout).".into(),
        ),
        Variant::Gen1 => b.constraints.push(
            ":- true(X,R1,Y); X < Y; true(Y,R2,Z); Y < Z; not true(X,Rout,Z) : table(R1,R2,Rout)."
                .into(),
        ),
        Variant::Gen2 => {
            let id = id.as_deref().expect("eligible calculus has identity");
            b.constraints
                .push(format!(":- true(X,{id},Y); true(Y,R,Z); not true(X,R,Z); Y < Z."));
            b.constraints
                .push(format!(":- true(X,R,Y); true(Y,{id},Z); not true(X,R,Z); X < Y."));
            b.constraints.push(format!(
                ":- true(X,R1,Y); X < Y; true(Y,R2,Z); Y < Z; R1!={id}; R2!={id}; not true(X,Rout,Z) : table(R1,R2,Rout)."
            ));
        }
        Variant::Gen3 => {}
    }
    if net.is_some() {
        b.constraints
            .push(":- constraint(X,_,Y); not true(X,R,Y) : constraint(X,R,Y).".into());
    }

    let mut fact_count = b.facts.len();
    let rule_count = b.rules.len() + b.constraints.len();
    let theory = b.render();
    let instance = net.map(|net| {
        let inst = instance_facts(calc, &terms, net);
        fact_count += inst.len();
        let mut s = String::new();
        for line in inst {
            s.push_str(&line);
            s.push('\n');
        }
        s
    });
    Ok(AspProgram {
        variant,
        theory,
        instance,
        fact_count,
        rule_count,
    })
}

fn instance_facts(calc: &Calculus, terms: &[String], net: &NormalizedNetwork) -> Vec<String> {
    let mut out: Vec<String> = (0..net.len()).map(|i| format!("element({i}).")).collect();
    for (&(x, y), &set) in &net.constraints {
        if set.is_empty() {
            // no relation is possible, so the constraint rule always fires
            out.push(format!("constraint({x}, empty, {y})."));
        } else {
            out.push(format!("constraint({x}, {}, {y}).", pool(terms, set)));
        }
    }
    for &x in &net.self_conflicts {
        out.push(format!("constraint({x}, empty, {x})."));
    }
    let _ = calc;
    out
}

pub fn emit_gen0(calc: &Calculus, net: Option<&NormalizedNetwork>) -> Result<AspProgram, EmitError> {
    emit(calc, net, Variant::Gen0)
}

pub fn emit_gen1(calc: &Calculus, net: Option<&NormalizedNetwork>) -> Result<AspProgram, EmitError> {
    emit(calc, net, Variant::Gen1)
}

pub fn emit_gen2(calc: &Calculus, net: Option<&NormalizedNetwork>) -> Result<AspProgram, EmitError> {
    emit(calc, net, Variant::Gen2)
}

pub fn emit_gen3(calc: &Calculus, net: Option<&NormalizedNetwork>) -> Result<AspProgram, EmitError> {
    emit(calc, net, Variant::Gen3)
}

/// `red`, `green`, `blue`, then `c4`, `c5`, ...
pub fn default_colors(k: usize) -> Vec<String> {
    (0..k)
        .map(|i| match i {
            0 => "red".to_string(),
            1 => "green".to_string(),
            2 => "blue".to_string(),
            _ => format!("c{}", i + 1),
        })
        .collect()
}

/// Coloring program over the arcs induced by `overlap`; identity arcs are
/// restricted to distinct elements.
pub fn emit_coloring(
    calc: &Calculus,
    overlap: RelationSet,
    colors: &[String],
) -> Result<String, EmitError> {
    if colors.is_empty() {
        return Err(EmitError::NoColors);
    }
    for c in colors {
        if !is_valid_token(c) || !c.as_bytes()[0].is_ascii_lowercase() {
            return Err(EmitError::BadColor(c.clone()));
        }
    }
    let terms = relation_terms(calc);
    let mut out = String::new();
    let arc_names: Vec<&str> = overlap.iter().map(|r| terms[r as usize].as_str()).collect();
    let _ = writeln!(out, "% {}-coloring of elements related by {}", colors.len(), arc_names.join(", "));
    let _ = writeln!(out, "color({}).", colors.join("; "));
    out.push_str("{hasColor(X,C) : color(C)} = 1 :- element(X).\n");
    out.push_str(":- arc(V1, V2), hasColor(V1, X), hasColor(V2, Y), X=Y.\n");
    out.push_str("arc(V2, V1):- arc(V1, V2).\n");
    for r in overlap {
        let t = &terms[r as usize];
        if Some(r) == calc.identity() {
            let _ = writeln!(out, "arc(V1, V2):-true(V1,{t},V2), V1!=V2.");
        } else {
            let _ = writeln!(out, "arc(V1, V2):-true(V1,{t},V2).");
        }
    }
    Ok(out)
}

fn strip_comments(text: &str) -> String {
    text.lines()
        .map(|l| match l.find('%') {
            Some(i) => &l[..i],
            None => l,
        })
        .collect::<Vec<_>>()
        .join("\n")
}

/// Statements of a program with comments removed and all whitespace
/// deleted, each ending in `.`.
pub fn statements(text: &str) -> Vec<String> {
    split(text, false)
}

fn split(text: &str, keep_spaces: bool) -> Vec<String> {
    let src = strip_comments(text);
    let bytes = src.as_bytes();
    let mut out = Vec::new();
    let mut cur = String::new();
    for (i, ch) in src.char_indices() {
        if ch.is_whitespace() {
            if keep_spaces && !cur.is_empty() && !cur.ends_with(' ') {
                cur.push(' ');
            }
            continue;
        }
        cur.push(ch);
        if ch == '.' {
            let next = bytes.get(i + 1).copied();
            let prev = if i > 0 { bytes.get(i - 1).copied() } else { None };
            let is_range = next == Some(b'.') || prev == Some(b'.');
            if !is_range && next.is_none_or(|b| b.is_ascii_whitespace() || b == b'%') {
                out.push(core::mem::take(&mut cur));
            }
        }
    }
    out
}

/// A predicate used in a rule body that nothing defines.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LintIssue {
    pub predicate: String,
    pub arity: usize,
    pub statement: String,
}

/// Atoms `name(args)` in `s` with their arities, in order of appearance.
fn atoms(s: &str) -> Vec<(String, usize, usize)> {
    let b = s.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < b.len() {
        let starts = b[i].is_ascii_lowercase()
            && (i == 0 || !(b[i - 1].is_ascii_alphanumeric() || b[i - 1] == b'_' || b[i - 1] == b'"'));
        if !starts {
            i += 1;
            continue;
        }
        let begin = i;
        while i < b.len() && (b[i].is_ascii_alphanumeric() || b[i] == b'_') {
            i += 1;
        }
        if i < b.len() && b[i] == b'(' {
            let name = &s[begin..i];
            let mut depth = 0;
            let mut arity = 1;
            let mut in_str = false;
            while i < b.len() {
                match b[i] {
                    b'"' => in_str = !in_str,
                    b'(' if !in_str => depth += 1,
                    b')' if !in_str => {
                        depth -= 1;
                        if depth == 0 {
                            break;
                        }
                    }
                    b',' if !in_str && depth == 1 => arity += 1,
                    _ => {}
                }
                i += 1;
            }
            if name != "not" {
                out.push((name.to_string(), arity, begin));
            }
        }
    }
    out
}

/// Checks that every predicate referenced in a body is defined by a fact or
/// rule head, or listed in `external`.
pub fn lint(text: &str, external: &[(&str, usize)]) -> Vec<LintIssue> {
    let stmts = split(text, true);
    let mut defined: Vec<(String, usize)> = external.iter().map(|&(n, a)| (n.to_string(), a)).collect();
    let mut referenced: Vec<(String, usize, String)> = Vec::new();
    for s in &stmts {
        let (head, body) = match s.find(":-") {
            Some(i) => (&s[..i], &s[i + 2..]),
            None => (s.as_str(), ""),
        };
        let head_atoms = atoms(head);
        // in a choice head only the first atom is defined; the rest are conditions
        for (k, (name, arity, _)) in head_atoms.into_iter().enumerate() {
            if k == 0 || !head.starts_with('{') {
                defined.push((name, arity));
            } else {
                referenced.push((name, arity, s.clone()));
            }
        }
        for (name, arity, _) in atoms(body) {
            referenced.push((name, arity, s.clone()));
        }
    }
    let mut issues: Vec<LintIssue> = Vec::new();
    for (name, arity, stmt) in referenced {
        let known = defined.iter().any(|(n, a)| *n == name && *a == arity);
        if !known && !issues.iter().any(|i| i.predicate == name && i.arity == arity) {
            issues.push(LintIssue {
                predicate: name,
                arity,
                statement: stmt,
            });
        }
    }
    issues
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::network::{normalize, ConstraintNetwork};
    use alloc::vec;

    fn has(program: &str, stmt: &str) -> bool {
        let want = statements(stmt);
        assert_eq!(want.len(), 1, "{stmt}");
        statements(program).contains(&want[0])
    }

    fn symmetric() -> Calculus {
        Calculus::from_parts("sym", vec!["a".into(), "b".into()], None, vec![0, 1], vec![vec![0, 1]; 4])
    }

    fn cyclic() -> Calculus {
        Calculus::from_parts("cyc", vec!["a".into(), "b".into(), "c".into()], None, vec![1, 2, 0], vec![vec![0, 1, 2]; 9])
    }

    #[test]
    fn gen0_first_row_and_choice() {
        let p = emit_gen0(&Calculus::rcc5(), None).unwrap();
        let t = p.text();
        assert!(has(&t, "{true(X,R,Y) : relation(R)} = 1 :- element(X); element(Y); X != Y."));
        assert!(has(&t, "table(dr, eq, (dr))."));
        assert!(has(&t, "table(dr, dr, (eq;po;pp;ppi;dr))."));
        assert!(has(&t, "true(X,eq,X) :- element(X)."));
        assert!(!t.contains("element(0)"));
        assert!(!t.contains("constraint("));
        assert!(p.instance.is_none());
        assert_eq!(p.table_fact_count(), 25);
    }

    #[test]
    fn gen1_converse_rules() {
        let t = emit_gen1(&Calculus::rcc5(), None).unwrap().text();
        assert!(has(&t, "true(Y,ppi,X) :- true(X,pp,Y), X < Y."));
        assert!(has(&t, "true(Y,pp,X) :- true(X,ppi,Y), X < Y."));
        assert_eq!(t.matches(":- true(X,").count(), 3);

        let sym = emit_gen1(&symmetric(), None).unwrap().text();
        assert!(!statements(&sym).iter().any(|s| s.starts_with("true(Y,")));
        assert!(matches!(
            emit_gen1(&cyclic(), None),
            Err(EmitError::Ineligible { missing, .. }) if missing.contains("involution")
        ));
    }

    #[test]
    fn gen2_drops_identity_cells() {
        let p = emit_gen2(&Calculus::rcc5(), None).unwrap();
        let t = p.text();
        assert!(has(&t, ":- true(X,eq,Y); true(Y,R,Z); not true(X,R,Z); Y < Z."));
        assert_eq!(p.table_fact_count(), 16);
        assert!(!t.contains("table(eq,") && !t.contains(", eq, ("));
        assert!(emit_gen2(&symmetric(), None).is_err());
    }

    #[test]
    fn gen3_has_no_table_constraint() {
        let g3 = emit_gen3(&Calculus::rcc5(), None).unwrap();
        let g2 = emit_gen2(&Calculus::rcc5(), None).unwrap();
        assert!(!g3.text().contains("table(R1,R2,Rout)"));
        assert_eq!(g3.table_fact_count(), 0);
        assert!(has(&g3.text(), "true(Y,ppi,X) :- true(X,pp,Y), X < Y."));
        assert!(has(&g3.text(), "{true(X,R,Y) : relation(R)} = 1 :- element(X); element(Y); X < Y."));
        assert!(g3.rule_count < g2.rule_count + g2.fact_count);
        assert!(emit_gen3(&symmetric(), None).is_err());
    }

    #[test]
    fn counts_match_text() {
        let calc = Calculus::rcc5();
        let mut net = ConstraintNetwork::with_elements(3);
        net.add(0, 1, &["pp"]).add(2, 1, &["po", "dr"]);
        let net = normalize(&net, &calc).unwrap();
        for v in Variant::ALL {
            let p = emit(&calc, Some(&net), v).unwrap();
            let stmts = statements(&p.text());
            let facts = stmts.iter().filter(|s| !s.contains(":-")).count();
            assert_eq!(facts, p.fact_count, "{v}");
            assert_eq!(stmts.len() - facts, p.rule_count, "{v}");
            let inst = p.instance.as_ref().unwrap();
            assert!(inst.contains("element(2)."));
            assert!(inst.contains("constraint(1, (dr;po), 2)."));
            assert!(lint(&p.text(), &[]).is_empty(), "{v}: {:?}", lint(&p.text(), &[]));
        }
    }

    #[test]
    fn deterministic_output() {
        let calc = Calculus::rcc5();
        for v in Variant::ALL {
            assert_eq!(emit(&calc, None, v).unwrap(), emit(&calc, None, v).unwrap());
        }
    }

    #[test]
    fn coloring_fragment() {
        let calc = Calculus::rcc5();
        let overlap: RelationSet = ["eq", "po", "pp", "ppi"].iter().map(|s| calc.relation_index(s).unwrap()).collect();
        let frag = emit_coloring(&calc, overlap, &default_colors(3)).unwrap();
        assert!(has(&frag, "color(red; green; blue)."));
        assert!(has(&frag, "arc(V1, V2):-true(V1,eq,V2), V1!=V2."));
        assert!(has(&frag, "arc(V1, V2):-true(V1,ppi,V2)."));
        assert!(!frag.contains("ppc"));

        let one = emit_coloring(&calc, overlap, &default_colors(1)).unwrap();
        assert!(has(&one, "color(red)."));
        assert_eq!(emit_coloring(&calc, overlap, &[]), Err(EmitError::NoColors));
        assert!(emit_coloring(&calc, overlap, &["Red".into()]).is_err());

        let theory = emit_gen2(&calc, None).unwrap().text();
        let combined = format!("{theory}{frag}element(0).\nelement(1).\n");
        assert!(lint(&combined, &[]).is_empty());
        assert_eq!(lint(&format!("{theory}{frag}"), &[]).len(), 1);
    }

    #[test]
    fn uppercase_relation_names_become_constants() {
        let c = Calculus::from_parts("u", vec!["DR".into(), "dr".into()], None, vec![0, 1], vec![vec![0, 1]; 4]);
        let t = emit_gen0(&c, None).unwrap().text();
        assert!(t.contains("relation(\"DR\"; dr)."));
        let c = Calculus::from_parts("u", vec!["PO".into()], None, vec![0], vec![vec![0]]);
        assert!(emit_gen0(&c, None).unwrap().text().contains("relation(po)."));
    }

    #[test]
    fn statement_splitting() {
        let s = statements("a(1..3).\n% note. here\nb :- a(X),\n   X < 2.\n");
        assert_eq!(s, ["a(1..3).", "b:-a(X),X<2."]);
    }
}
