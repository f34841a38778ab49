//! Constraint networks and their normalization against a calculus.

use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use crate::calculus::Calculus;
use crate::relation::RelationSet;

/// One input constraint `R(x, y)`; relation names are resolved against a
/// calculus during normalization.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Constraint {
    pub x: usize,
    pub y: usize,
    pub relations: Vec<String>,
}

/// Elements plus disjunctive constraints between them.
///
/// Element identity is positional: element `i` sorts before element `j`
/// iff `i < j`.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct ConstraintNetwork {
    pub elements: Vec<String>,
    pub constraints: Vec<Constraint>,
}

impl ConstraintNetwork {
    /// `count` elements named by their indices.
    pub fn with_elements(count: usize) -> Self {
        ConstraintNetwork {
            elements: (0..count).map(|i| i.to_string()).collect(),
            constraints: Vec::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn add(&mut self, x: usize, y: usize, relations: &[&str]) -> &mut Self {
        self.constraints.push(Constraint {
            x,
            y,
            relations: relations.iter().map(|s| s.to_string()).collect(),
        });
        self
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum NetworkError {
    UnknownRelation { token: String, x: usize, y: usize },
    UnknownElement { element: usize, count: usize },
    /// `(x, x)` constraint in a calculus without an identity relation.
    SelfPairWithoutIdentity { element: usize },
}

impl fmt::Display for NetworkError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NetworkError::UnknownRelation { token, x, y } => {
                write!(f, "unknown relation `{token}` in constraint ({x}, {y})")
            }
            NetworkError::UnknownElement { element, count } => write!(
                f,
                "constraint references element {element} but the network has {count}"
            ),
            NetworkError::SelfPairWithoutIdentity { element } => write!(
                f,
                "constraint on ({element}, {element}) but the calculus has no identity relation"
            ),
        }
    }
}

impl core::error::Error for NetworkError {}

/// A network with at most one constraint per unordered pair, stored with
/// the smaller element first.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct NormalizedNetwork {
    pub elements: Vec<String>,
    pub constraints: BTreeMap<(usize, usize), RelationSet>,
    /// Elements with a self-pair constraint that excludes the identity.
    pub self_conflicts: Vec<usize>,
    /// Set when some pair's constraints intersect to nothing or a self-pair
    /// excludes the identity relation.
    pub inconsistent: bool,
}

impl NormalizedNetwork {
    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    /// An unconstrained network of `count` index-named elements.
    pub fn unconstrained(count: usize) -> Self {
        NormalizedNetwork {
            elements: (0..count).map(|i| i.to_string()).collect(),
            ..Default::default()
        }
    }

    /// Constraint on an ordered pair, derived through the converse when the
    /// pair is stored the other way round. `None` means unconstrained.
    pub fn get(&self, calc: &Calculus, x: usize, y: usize) -> Option<RelationSet> {
        if x < y {
            self.constraints.get(&(x, y)).copied()
        } else {
            self.constraints
                .get(&(y, x))
                .map(|&s| calc.converse_set(s))
        }
    }

    /// Back to the name-based form, e.g. for writing.
    pub fn to_network(&self, calc: &Calculus) -> ConstraintNetwork {
        let constraints = self
            .constraints
            .iter()
            .map(|(&(x, y), &set)| Constraint {
                x,
                y,
                relations: calc.set_names(set).into_iter().map(String::from).collect(),
            })
            .chain(self.self_conflicts.iter().map(|&x| Constraint {
                x,
                y: x,
                relations: Vec::new(),
            }))
            .collect();
        ConstraintNetwork {
            elements: self.elements.clone(),
            constraints,
        }
    }
}

/// Folds `(y, x)` constraints onto `(x, y)` through the converse,
/// intersects repeated constraints and checks self-pairs against identity.
pub fn normalize(
    net: &ConstraintNetwork,
    calc: &Calculus,
) -> Result<NormalizedNetwork, NetworkError> {
    let count = net.elements.len();
    let mut out = NormalizedNetwork {
        elements: net.elements.clone(),
        constraints: BTreeMap::new(),
        self_conflicts: Vec::new(),
        inconsistent: false,
    };
    for c in &net.constraints {
        for &e in &[c.x, c.y] {
            if e >= count {
                return Err(NetworkError::UnknownElement { element: e, count });
            }
        }
        let mut set = RelationSet::EMPTY;
        for token in &c.relations {
            let idx = calc
                .relation_index(token)
                .ok_or_else(|| NetworkError::UnknownRelation {
                    token: token.clone(),
                    x: c.x,
                    y: c.y,
                })?;
            set.insert(idx);
        }
        if c.x == c.y {
            match calc.identity() {
                Some(id) => {
                    if !set.contains(id) {
                        out.inconsistent = true;
                        if !out.self_conflicts.contains(&c.x) {
                            out.self_conflicts.push(c.x);
                        }
                    }
                }
                None => return Err(NetworkError::SelfPairWithoutIdentity { element: c.x }),
            }
            continue;
        }
        let (key, set) = if c.x < c.y {
            ((c.x, c.y), set)
        } else {
            ((c.y, c.x), calc.converse_set(set))
        };
        let slot = out.constraints.entry(key).or_insert(calc.universe());
        *slot &= set;
        if slot.is_empty() {
            out.inconsistent = true;
        }
    }
    Ok(out)
}
