//! The algebra of a binary qualitative calculus: base relations, converse,
//! optional identity and the weak composition table.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::relation::{RelationIndex, RelationSet, MAX_RELATIONS};

/// A binary qualitative calculus.
///
/// Relations are identified by their declaration index, which also fixes
/// every iteration order downstream. The composition table is stored twice:
/// as bitsets for reasoning and as member listings in the order they were
/// written, so that generated text reproduces the source layout.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Calculus {
    name: String,
    relations: Vec<String>,
    identity: Option<RelationIndex>,
    converse: Vec<RelationIndex>,
    cells: Vec<RelationSet>,
    listing: Vec<Vec<RelationIndex>>,
}

/// Which encoding tier a calculus is eligible for.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Tier {
    Gen0,
    Gen1,
    Gen2,
}

impl Tier {
    pub fn as_str(self) -> &'static str {
        match self {
            Tier::Gen0 => "GEN0",
            Tier::Gen1 => "GEN1",
            Tier::Gen2 => "GEN2",
        }
    }
}

impl fmt::Display for Tier {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Result of checking `r ⋄ id = {r}` and `id ⋄ r = {r}` for every relation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IdentityLaw {
    pub per_relation: Vec<bool>,
    pub overall: bool,
}

/// Algebraic properties that select an encoding tier.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct AlgebraicProfile {
    pub involution: bool,
    pub identity_law: bool,
    pub all_symmetric: bool,
    pub tier: Tier,
}

/// A violated structural invariant of a [`Calculus`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Diagnostic {
    NoRelations,
    TooManyRelations { count: usize },
    InvalidName { index: usize },
    DuplicateName { first: usize, second: usize },
    ConverseLength { expected: usize, found: usize },
    ConverseOutOfRange { relation: usize, target: usize },
    ConverseNotBijection { image: usize, sources: Vec<usize> },
    IdentityOutOfRange { identity: usize },
    IdentityNotSelfConverse { identity: usize, converse: usize },
    TableShape { expected: usize, found: usize },
    CellOutOfRange { row: usize, col: usize, member: usize },
    DuplicateCellMember { row: usize, col: usize, member: usize },
    EmptyCell { row: usize, col: usize },
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Diagnostic::NoRelations => write!(f, "calculus declares no relations"),
            Diagnostic::TooManyRelations { count } => write!(
                f,
                "too many relations: {count} declared, at most {MAX_RELATIONS} supported"
            ),
            Diagnostic::InvalidName { index } => {
                write!(f, "relation {index} has an invalid name")
            }
            Diagnostic::DuplicateName { first, second } => {
                write!(f, "relations {first} and {second} share a name")
            }
            Diagnostic::ConverseLength { expected, found } => write!(
                f,
                "converse map has {found} entries, expected {expected}"
            ),
            Diagnostic::ConverseOutOfRange { relation, target } => write!(
                f,
                "converse of relation {relation} points to unknown relation {target}"
            ),
            Diagnostic::ConverseNotBijection { image, sources } => write!(
                f,
                "converse not a bijection: relations {sources:?} all map to {image}"
            ),
            Diagnostic::IdentityOutOfRange { identity } => {
                write!(f, "identity relation {identity} is not declared")
            }
            Diagnostic::IdentityNotSelfConverse { identity, converse } => write!(
                f,
                "identity relation {identity} has converse {converse}, expected itself"
            ),
            Diagnostic::TableShape { expected, found } => write!(
                f,
                "composition table has {found} cells, expected {expected}"
            ),
            Diagnostic::CellOutOfRange { row, col, member } => write!(
                f,
                "composition cell ({row}, {col}) names unknown relation {member}"
            ),
            Diagnostic::DuplicateCellMember { row, col, member } => write!(
                f,
                "composition cell ({row}, {col}) lists relation {member} twice"
            ),
            Diagnostic::EmptyCell { row, col } => {
                write!(f, "empty composition cell ({row}, {col})")
            }
        }
    }
}

/// A calculus that failed [`Calculus::validate`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InvalidCalculus {
    pub diagnostics: Vec<Diagnostic>,
}

impl fmt::Display for InvalidCalculus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("invalid calculus")?;
        for (i, d) in self.diagnostics.iter().enumerate() {
            f.write_str(if i == 0 { ": " } else { "; " })?;
            write!(f, "{d}")?;
        }
        Ok(())
    }
}

impl core::error::Error for InvalidCalculus {}

/// Relation names are non-empty runs of ASCII letters, digits and underscores.
pub fn is_valid_token(s: &str) -> bool {
    !s.is_empty() && s.bytes().all(|b| b.is_ascii_alphanumeric() || b == b'_')
}

impl Calculus {
    /// Assembles a calculus without checking it. `table` is row-major with
    /// `relations.len()²` cells, each listing its members in written order.
    pub fn from_parts(
        name: impl Into<String>,
        relations: Vec<String>,
        identity: Option<RelationIndex>,
        converse: Vec<RelationIndex>,
        table: Vec<Vec<RelationIndex>>,
    ) -> Self {
        let cells = table
            .iter()
            .map(|cell| {
                cell.iter()
                    .filter(|&&m| (m as usize) < MAX_RELATIONS)
                    .copied()
                    .collect()
            })
            .collect();
        Calculus {
            name: name.into(),
            relations,
            identity,
            converse,
            cells,
            listing: table,
        }
    }

    /// Like [`Calculus::from_parts`] but rejects calculi with diagnostics.
    pub fn new(
        name: impl Into<String>,
        relations: Vec<String>,
        identity: Option<RelationIndex>,
        converse: Vec<RelationIndex>,
        table: Vec<Vec<RelationIndex>>,
    ) -> Result<Self, InvalidCalculus> {
        let calc = Self::from_parts(name, relations, identity, converse, table);
        let diagnostics = calc.validate();
        if diagnostics.is_empty() {
            Ok(calc)
        } else {
            Err(InvalidCalculus { diagnostics })
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn relation_count(&self) -> usize {
        self.relations.len()
    }

    pub fn relation_names(&self) -> &[String] {
        &self.relations
    }

    pub fn relation_name(&self, index: RelationIndex) -> &str {
        &self.relations[index as usize]
    }

    pub fn relation_index(&self, name: &str) -> Option<RelationIndex> {
        self.relations
            .iter()
            .position(|r| r == name)
            .map(|i| i as RelationIndex)
    }

    pub fn identity(&self) -> Option<RelationIndex> {
        self.identity
    }

    pub fn converse(&self, index: RelationIndex) -> RelationIndex {
        self.converse[index as usize]
    }

    pub fn converse_map(&self) -> &[RelationIndex] {
        &self.converse
    }

    /// Every base relation.
    pub fn universe(&self) -> RelationSet {
        RelationSet::full(self.relations.len())
    }

    /// Composition table cell for a pair of base relations.
    #[inline]
    pub fn cell(&self, row: RelationIndex, col: RelationIndex) -> RelationSet {
        self.cells[row as usize * self.relations.len() + col as usize]
    }

    /// Members of a cell in the order they were written.
    pub fn cell_listing(&self, row: RelationIndex, col: RelationIndex) -> &[RelationIndex] {
        &self.listing[row as usize * self.relations.len() + col as usize]
    }

    /// Set of relation names, in declaration order.
    pub fn set_names(&self, set: RelationSet) -> Vec<&str> {
        set.iter().map(|i| self.relation_name(i)).collect()
    }

    /// Composition lifted to sets: the union of the table cells over all
    /// member pairs.
    pub fn compose(&self, r: RelationSet, s: RelationSet) -> RelationSet {
        let mut out = RelationSet::EMPTY;
        for a in r {
            for b in s {
                out |= self.cell(a, b);
            }
        }
        out
    }

    /// Elementwise converse of a set.
    pub fn converse_set(&self, r: RelationSet) -> RelationSet {
        r.iter().map(|i| self.converse(i)).collect()
    }

    /// Checks every structural invariant; an empty list means the calculus
    /// is well formed.
    pub fn validate(&self) -> Vec<Diagnostic> {
        let mut diags = Vec::new();
        let n = self.relations.len();
        if n == 0 {
            diags.push(Diagnostic::NoRelations);
        }
        if n > MAX_RELATIONS {
            diags.push(Diagnostic::TooManyRelations { count: n });
            return diags;
        }
        for (i, name) in self.relations.iter().enumerate() {
            if !is_valid_token(name) {
                diags.push(Diagnostic::InvalidName { index: i });
            }
            if let Some(j) = self.relations[..i].iter().position(|o| o == name) {
                diags.push(Diagnostic::DuplicateName { first: j, second: i });
            }
        }

        if self.converse.len() != n {
            diags.push(Diagnostic::ConverseLength {
                expected: n,
                found: self.converse.len(),
            });
        } else {
            let mut sources: Vec<Vec<usize>> = vec![Vec::new(); n];
            for (i, &c) in self.converse.iter().enumerate() {
                if (c as usize) < n {
                    sources[c as usize].push(i);
                } else {
                    diags.push(Diagnostic::ConverseOutOfRange {
                        relation: i,
                        target: c as usize,
                    });
                }
            }
            for (image, s) in sources.into_iter().enumerate() {
                if s.len() > 1 {
                    diags.push(Diagnostic::ConverseNotBijection { image, sources: s });
                }
            }
        }

        if let Some(id) = self.identity {
            if id as usize >= n {
                diags.push(Diagnostic::IdentityOutOfRange {
                    identity: id as usize,
                });
            } else if let Some(&c) = self.converse.get(id as usize) {
                if c != id {
                    diags.push(Diagnostic::IdentityNotSelfConverse {
                        identity: id as usize,
                        converse: c as usize,
                    });
                }
            }
        }

        if self.listing.len() != n * n {
            diags.push(Diagnostic::TableShape {
                expected: n * n,
                found: self.listing.len(),
            });
            return diags;
        }
        for (k, cell) in self.listing.iter().enumerate() {
            let (row, col) = (k / n.max(1), k % n.max(1));
            if cell.is_empty() {
                diags.push(Diagnostic::EmptyCell { row, col });
            }
            for (j, &m) in cell.iter().enumerate() {
                if m as usize >= n {
                    diags.push(Diagnostic::CellOutOfRange {
                        row,
                        col,
                        member: m as usize,
                    });
                } else if cell[..j].contains(&m) {
                    diags.push(Diagnostic::DuplicateCellMember {
                        row,
                        col,
                        member: m as usize,
                    });
                }
            }
        }
        diags
    }

    /// True iff the converse of every relation's converse is the relation.
    pub fn detect_involution(&self) -> bool {
        (0..self.relations.len()).all(|i| {
            let c = self.converse[i];
            self.converse[c as usize] as usize == i
        })
    }

    /// Checks the identity law on both sides of the identity relation.
    pub fn detect_identity_law(&self) -> IdentityLaw {
        let n = self.relations.len();
        let Some(id) = self.identity else {
            return IdentityLaw {
                per_relation: vec![false; n],
                overall: false,
            };
        };
        let per_relation: Vec<bool> = (0..n as RelationIndex)
            .map(|r| {
                let expected = RelationSet::singleton(r);
                self.cell(r, id) == expected && self.cell(id, r) == expected
            })
            .collect();
        let overall = per_relation.iter().all(|&b| b);
        IdentityLaw {
            per_relation,
            overall,
        }
    }

    /// True iff every relation is its own converse.
    pub fn all_symmetric(&self) -> bool {
        self.converse
            .iter()
            .enumerate()
            .all(|(i, &c)| c as usize == i)
    }

    pub fn classify(&self) -> AlgebraicProfile {
        let involution = self.detect_involution();
        let identity_law = self.detect_identity_law().overall;
        let tier = if involution && identity_law {
            Tier::Gen2
        } else if involution {
            Tier::Gen1
        } else {
            Tier::Gen0
        };
        AlgebraicProfile {
            involution,
            identity_law,
            all_symmetric: self.all_symmetric(),
            tier,
        }
    }

    /// RCC-5 with relations declared as `dr eq po pp ppi`.
    pub fn rcc5() -> Self {
        const DR: u8 = 0;
        const EQ: u8 = 1;
        const PO: u8 = 2;
        const PP: u8 = 3;
        const PPI: u8 = 4;
        let all = || vec![EQ, PO, PP, PPI, DR];
        let table = vec![
            // dr
            all(),
            vec![DR],
            vec![DR, PO, PP],
            vec![DR, PO, PP],
            vec![DR],
            // eq
            vec![DR],
            vec![EQ],
            vec![PO],
            vec![PP],
            vec![PPI],
            // po
            vec![DR, PO, PPI],
            vec![PO],
            all(),
            vec![PO, PP],
            vec![DR, PO, PPI],
            // pp
            vec![DR],
            vec![PP],
            vec![DR, PO, PP],
            vec![PP],
            all(),
            // ppi
            vec![DR, PO, PPI],
            vec![PPI],
            vec![PO, PPI],
            vec![EQ, PO, PP, PPI],
            vec![PPI],
        ];
        let names = ["dr", "eq", "po", "pp", "ppi"]
            .iter()
            .map(|s| String::from(*s))
            .collect();
        Calculus::from_parts("rcc5", names, Some(EQ), vec![DR, EQ, PO, PPI, PP], table)
    }
}
