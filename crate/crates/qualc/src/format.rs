//! Calculus specification and constraint-network text formats.
//!
//! A calculus file:
//!
//! ```text
//! calculus rcc5
//! relations dr eq po pp ppi
//! identity eq
//! converse
//! pp :: ppi
//! ...
//! composition
//! dr : po :: ( dr po pp )
//! ...
//! ```
//!
//! A network file starts with `<maxIndex> # comment`, lists constraints as
//! `i j ( rel ... )` and ends with a line holding a single `.`.

use std::fmt;

use qualc_core::calculus::{is_valid_token, Diagnostic};
use qualc_core::{Calculus, ConstraintNetwork, RelationIndex, MAX_RELATIONS};

/// Position and description of a syntax or consistency error. Lines and
/// columns are 1-based.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
    pub text: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}: {}", self.line, self.column, self.message)?;
        if !self.text.is_empty() {
            write!(f, " (`{}`)", self.text)?;
        }
        Ok(())
    }
}

impl std::error::Error for ParseError {}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Tok<'a> {
    Word(&'a str),
    Open,
    Close,
    Colon,
    DoubleColon,
}

impl Tok<'_> {
    fn text(&self) -> &str {
        match self {
            Tok::Word(w) => w,
            Tok::Open => "(",
            Tok::Close => ")",
            Tok::Colon => ":",
            Tok::DoubleColon => "::",
        }
    }
}

/// Words of a parenthesised group with their token positions, and the
/// index after the closing parenthesis.
type Group<'a> = (Vec<(usize, &'a str)>, usize);

struct Line<'a> {
    number: usize,
    raw: &'a str,
    toks: Vec<(usize, Tok<'a>)>,
}

impl<'a> Line<'a> {
    fn error(&self, column: usize, message: impl Into<String>, text: &str) -> ParseError {
        ParseError {
            line: self.number,
            column,
            message: message.into(),
            text: text.to_string(),
        }
    }

    fn error_at(&self, i: usize, message: impl Into<String>) -> ParseError {
        match self.toks.get(i) {
            Some(&(col, tok)) => self.error(col, message, tok.text()),
            None => self.error(self.raw.trim_end().chars().count() + 1, message, ""),
        }
    }

    fn word(&self, i: usize, what: &str) -> Result<&'a str, ParseError> {
        match self.toks.get(i) {
            Some(&(_, Tok::Word(w))) => Ok(w),
            _ => Err(self.error_at(i, format!("expected {what}"))),
        }
    }

    fn expect(&self, i: usize, want: Tok<'_>) -> Result<(), ParseError> {
        match self.toks.get(i) {
            Some(&(_, t)) if t == want => Ok(()),
            _ => Err(self.error_at(i, format!("expected `{}`", want.text()))),
        }
    }

    fn end(&self, i: usize) -> Result<(), ParseError> {
        if i < self.toks.len() {
            Err(self.error_at(i, "unexpected trailing input"))
        } else {
            Ok(())
        }
    }

    /// `( w ... )` starting at token `i`; returns the words with their token
    /// positions and the index after `)`.
    fn group(&self, i: usize) -> Result<Group<'a>, ParseError> {
        self.expect(i, Tok::Open)?;
        let mut words = Vec::new();
        let mut j = i + 1;
        loop {
            match self.toks.get(j) {
                Some((_, Tok::Close)) => return Ok((words, j + 1)),
                Some(&(_, Tok::Word(w))) => words.push((j, w)),
                _ => return Err(self.error_at(j, "expected relation name or `)`")),
            }
            j += 1;
        }
    }
}

/// Splits into non-blank lines with `#` comments removed.
fn lex(text: &str) -> Result<Vec<Line<'_>>, ParseError> {
    let mut out = Vec::new();
    for (n, raw) in text.lines().enumerate() {
        let body = raw.split('#').next().unwrap_or("");
        let mut toks = Vec::new();
        let mut chars = body.char_indices().peekable();
        while let Some(&(i, c)) = chars.peek() {
            let col = body[..i].chars().count() + 1;
            if c.is_whitespace() {
                chars.next();
            } else if c == '(' {
                chars.next();
                toks.push((col, Tok::Open));
            } else if c == ')' {
                chars.next();
                toks.push((col, Tok::Close));
            } else if c == ':' {
                chars.next();
                if chars.peek().is_some_and(|&(_, d)| d == ':') {
                    chars.next();
                    toks.push((col, Tok::DoubleColon));
                } else {
                    toks.push((col, Tok::Colon));
                }
            } else if c.is_ascii_alphanumeric() || c == '_' || c == '-' || c == '.' {
                let start = i;
                let mut end = i;
                while let Some(&(j, d)) = chars.peek() {
                    if d.is_ascii_alphanumeric() || d == '_' || d == '-' || d == '.' {
                        end = j + d.len_utf8();
                        chars.next();
                    } else {
                        break;
                    }
                }
                toks.push((col, Tok::Word(&body[start..end])));
            } else {
                return Err(ParseError {
                    line: n + 1,
                    column: col,
                    message: format!("unexpected character `{c}`"),
                    text: c.to_string(),
                });
            }
        }
        if !toks.is_empty() {
            out.push(Line {
                number: n + 1,
                raw,
                toks,
            });
        }
    }
    Ok(out)
}

fn eof_error(text: &str, message: impl Into<String>) -> ParseError {
    ParseError {
        line: text.lines().count().max(1),
        column: 1,
        message: message.into(),
        text: String::new(),
    }
}

fn relation_token<'a>(line: &Line<'a>, i: usize, names: &[String]) -> Result<RelationIndex, ParseError> {
    let w = line.word(i, "relation name")?;
    names
        .iter()
        .position(|n| n == w)
        .map(|p| p as RelationIndex)
        .ok_or_else(|| line.error_at(i, format!("unknown relation `{w}`")))
}

/// Parses a calculus specification. The result always passes
/// [`Calculus::validate`].
pub fn parse_calculus_spec(text: &str) -> Result<Calculus, ParseError> {
    let lines = lex(text)?;
    let mut it = lines.iter().peekable();

    let head = it.next().ok_or_else(|| eof_error(text, "expected `calculus <name>`"))?;
    if head.word(0, "`calculus`")? != "calculus" {
        return Err(head.error_at(0, "expected `calculus <name>`"));
    }
    let name = head.word(1, "calculus name")?.to_string();
    head.end(2)?;

    let rel = it.next().ok_or_else(|| eof_error(text, "expected `relations ...`"))?;
    if rel.word(0, "`relations`")? != "relations" {
        return Err(rel.error_at(0, "expected `relations ...`"));
    }
    let mut names: Vec<String> = Vec::new();
    for i in 1..rel.toks.len() {
        let w = rel.word(i, "relation name")?;
        if !is_valid_token(w) {
            return Err(rel.error_at(i, "relation names use letters, digits and `_`"));
        }
        if names.iter().any(|n| n == w) {
            return Err(rel.error_at(i, format!("relation `{w}` declared twice")));
        }
        names.push(w.to_string());
    }
    if names.is_empty() {
        return Err(rel.error_at(1, "expected at least one relation"));
    }
    if names.len() > MAX_RELATIONS {
        return Err(rel.error_at(
            MAX_RELATIONS + 1,
            format!("{} relations declared, at most {MAX_RELATIONS} supported", names.len()),
        ));
    }
    let n = names.len();

    let mut identity = None;
    let mut identity_line = rel.number;
    if let Some(l) = it.peek() {
        if l.toks[0].1 == Tok::Word("identity") {
            identity = Some(relation_token(l, 1, &names)?);
            l.end(2)?;
            identity_line = l.number;
            it.next();
        }
    }

    let conv_head = it.next().ok_or_else(|| eof_error(text, "expected `converse` section"))?;
    if conv_head.toks.len() != 1 || conv_head.toks[0].1 != Tok::Word("converse") {
        return Err(conv_head.error_at(0, "expected `converse` section"));
    }
    let mut converse: Vec<Option<RelationIndex>> = vec![None; n];
    while let Some(l) = it.peek() {
        if l.toks[0].1 == Tok::Word("composition") {
            break;
        }
        let a = relation_token(l, 0, &names)?;
        l.expect(1, Tok::DoubleColon)?;
        let b = relation_token(l, 2, &names)?;
        l.end(3)?;
        if converse[a as usize].is_some() {
            return Err(l.error_at(0, format!("converse of `{}` given twice", names[a as usize])));
        }
        converse[a as usize] = Some(b);
        it.next();
    }
    if let Some(missing) = converse.iter().position(Option::is_none) {
        let at = it.peek().map(|l| l.number).unwrap_or(conv_head.number);
        return Err(ParseError {
            line: at,
            column: 1,
            message: format!("missing converse for `{}`", names[missing]),
            text: String::new(),
        });
    }
    let converse: Vec<RelationIndex> = converse.into_iter().map(Option::unwrap).collect();

    let comp_head = it.next().ok_or_else(|| eof_error(text, "expected `composition` section"))?;
    comp_head.end(1)?;
    let mut table: Vec<Option<(Vec<RelationIndex>, usize)>> = vec![None; n * n];
    for l in it {
        let a = relation_token(l, 0, &names)?;
        l.expect(1, Tok::Colon)?;
        let b = relation_token(l, 2, &names)?;
        l.expect(3, Tok::DoubleColon)?;
        let (words, next) = l.group(4)?;
        l.end(next)?;
        let mut cell = Vec::with_capacity(words.len());
        for (pos, _) in words {
            cell.push(relation_token(l, pos, &names)?);
        }
        let slot = &mut table[a as usize * n + b as usize];
        if slot.is_some() {
            return Err(l.error_at(
                0,
                format!("duplicate composition line for ({}, {})", names[a as usize], names[b as usize]),
            ));
        }
        *slot = Some((cell, l.number));
    }
    if let Some(k) = table.iter().position(Option::is_none) {
        return Err(eof_error(
            text,
            format!("missing composition line for ({}, {})", names[k / n], names[k % n]),
        ));
    }
    let cell_lines: Vec<usize> = table.iter().map(|c| c.as_ref().unwrap().1).collect();
    let table: Vec<Vec<RelationIndex>> = table.into_iter().map(|c| c.unwrap().0).collect();

    let calc = Calculus::from_parts(name, names, identity, converse, table);
    if let Some(d) = calc.validate().into_iter().next() {
        let line = match &d {
            Diagnostic::EmptyCell { row, col }
            | Diagnostic::DuplicateCellMember { row, col, .. }
            | Diagnostic::CellOutOfRange { row, col, .. } => cell_lines[row * n + col],
            Diagnostic::IdentityOutOfRange { .. } | Diagnostic::IdentityNotSelfConverse { .. } => identity_line,
            _ => conv_head.number,
        };
        return Err(ParseError {
            line,
            column: 1,
            message: d.to_string(),
            text: String::new(),
        });
    }
    Ok(calc)
}

/// Canonical text form; cells keep their member order.
pub fn write_calculus_spec(calc: &Calculus) -> String {
    let names = calc.relation_names();
    let mut out = format!("calculus {}\nrelations {}\n", calc.name(), names.join(" "));
    if let Some(id) = calc.identity() {
        out.push_str(&format!("identity {}\n", names[id as usize]));
    }
    out.push_str("\nconverse\n");
    for (i, n) in names.iter().enumerate() {
        out.push_str(&format!("{n} :: {}\n", names[calc.converse(i as RelationIndex) as usize]));
    }
    out.push_str("\ncomposition\n");
    for r in 0..names.len() {
        for s in 0..names.len() {
            let cell: Vec<&str> = calc
                .cell_listing(r as RelationIndex, s as RelationIndex)
                .iter()
                .map(|&m| names[m as usize].as_str())
                .collect();
            out.push_str(&format!("{} : {} :: ( {} )\n", names[r], names[s], cell.join(" ")));
        }
    }
    out
}

/// Parses a network file. Elements are named `0..=maxIndex`; relation names
/// are kept as written and resolved on normalization.
pub fn parse_network(text: &str) -> Result<ConstraintNetwork, ParseError> {
    let lines = lex(text)?;
    let mut it = lines.iter();
    let head = it.next().ok_or_else(|| eof_error(text, "expected `<maxIndex> # comment` header"))?;
    let max = parse_index(head, 0, "maximum element index")?;
    head.end(1)?;
    let mut net = ConstraintNetwork::with_elements(max + 1);
    for l in it.by_ref() {
        if l.toks.len() == 1 && l.toks[0].1 == Tok::Word(".") {
            return match it.next() {
                Some(extra) => Err(extra.error_at(0, "content after terminator `.`")),
                None => Ok(net),
            };
        }
        let x = parse_index(l, 0, "element index")?;
        let y = parse_index(l, 1, "element index")?;
        for (i, v) in [(0, x), (1, y)] {
            if v > max {
                return Err(l.error_at(i, format!("element index {v} exceeds maximum {max}")));
            }
        }
        let (words, next) = l.group(2)?;
        l.end(next)?;
        let mut rels = Vec::with_capacity(words.len());
        for (pos, w) in words {
            if !is_valid_token(w) {
                return Err(l.error_at(pos, "invalid relation name"));
            }
            rels.push(w);
        }
        net.add(x, y, &rels);
    }
    Err(eof_error(text, "missing terminator `.`"))
}

fn parse_index(line: &Line<'_>, i: usize, what: &str) -> Result<usize, ParseError> {
    let w = line.word(i, what)?;
    w.parse::<usize>()
        .map_err(|_| line.error_at(i, format!("expected {what}")))
}

/// Network text with `comment` after the header. A network without
/// elements is written with a single element, since the header holds the
/// maximum index.
pub fn write_network(net: &ConstraintNetwork, comment: &str) -> String {
    let max = net.len().saturating_sub(1);
    let comment = comment.replace(['\n', '\r'], " ");
    let mut out = if comment.is_empty() {
        format!("{max}\n")
    } else {
        format!("{max} # {comment}\n")
    };
    for c in &net.constraints {
        out.push_str(&format!("{} {} ( {} )\n", c.x, c.y, c.relations.join(" ")));
    }
    out.push_str(".\n");
    out
}
