//! Exhaustive enumeration, kept independent of the search engine so it can
//! serve as a test oracle.

use alloc::vec::Vec;
use core::fmt;

use super::{verify, Assignment, SolveResult, Stats, Status};
use crate::calculus::Calculus;
use crate::network::NormalizedNetwork;
use crate::relation::RelationIndex;

pub const DEFAULT_CANDIDATE_BOUND: u64 = 10_000_000;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BruteForceError {
    /// `candidates` is `None` when the count overflows `u64`.
    TooLarge { candidates: Option<u64>, bound: u64 },
}

impl fmt::Display for BruteForceError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BruteForceError::TooLarge {
                candidates: Some(c),
                bound,
            } => write!(f, "{c} candidate assignments exceed the bound of {bound}"),
            BruteForceError::TooLarge { candidates: None, bound } => {
                write!(f, "candidate count overflows; bound is {bound}")
            }
        }
    }
}

impl core::error::Error for BruteForceError {}

/// Pairs that receive an independent value: unordered pairs when the
/// converse is an involution (the reverse is derived), ordered pairs
/// otherwise.
fn slots(calc: &Calculus, n: usize) -> (Vec<(usize, usize)>, bool) {
    let involutive = calc.detect_involution();
    let mut slots = Vec::new();
    for x in 0..n {
        for y in 0..n {
            if x < y || (!involutive && x != y) {
                slots.push((x, y));
            }
        }
    }
    (slots, involutive)
}

fn enumerate(
    calc: &Calculus,
    net: &NormalizedNetwork,
    bound: u64,
    mut visit: impl FnMut(Assignment) -> bool,
) -> Result<u64, BruteForceError> {
    let n = net.len();
    let (slots, involutive) = slots(calc, n);
    let base = calc.relation_count() as u64;
    let candidates = u32::try_from(slots.len())
        .ok()
        .and_then(|e| base.checked_pow(e));
    match candidates {
        Some(c) if c <= bound => {}
        _ => return Err(BruteForceError::TooLarge { candidates, bound }),
    }

    let mut digits: Vec<RelationIndex> = alloc::vec![0; slots.len()];
    let mut examined = 0u64;
    loop {
        examined += 1;
        let mut a = Assignment::new(n);
        for (&(x, y), &r) in slots.iter().zip(&digits) {
            a.set(x, y, r);
            if involutive {
                a.set(y, x, calc.converse(r));
            }
        }
        if verify(calc, net, &a).ok && !visit(a) {
            return Ok(examined);
        }
        // odometer, last slot fastest
        let mut i = digits.len();
        loop {
            if i == 0 {
                return Ok(examined);
            }
            i -= 1;
            digits[i] += 1;
            if (digits[i] as u64) < base {
                break;
            }
            digits[i] = 0;
        }
    }
}

/// Every model, in odometer order.
pub fn brute_force_models(
    calc: &Calculus,
    net: &NormalizedNetwork,
    bound: u64,
) -> Result<Vec<Assignment>, BruteForceError> {
    let mut out = Vec::new();
    enumerate(calc, net, bound, |a| {
        out.push(a);
        true
    })?;
    Ok(out)
}

/// Decides model existence by enumerating every candidate assignment.
pub fn brute_force(
    calc: &Calculus,
    net: &NormalizedNetwork,
    bound: u64,
) -> Result<SolveResult, BruteForceError> {
    let mut found = None;
    let examined = enumerate(calc, net, bound, |a| {
        found = Some(a);
        false
    })?;
    let stats = Stats {
        decisions: examined,
        peak_pair_count: slots(calc, net.len()).0.len() as u64,
        ..Default::default()
    };
    Ok(SolveResult {
        status: if found.is_some() {
            Status::Sat
        } else {
            Status::Unsat
        },
        models: found.iter().cloned().collect(),
        model: found,
        stats,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::network::{normalize, ConstraintNetwork};
    use alloc::string::String;
    use alloc::vec;

    #[test]
    fn three_element_unsat() {
        let c = Calculus::rcc5();
        let mut net = ConstraintNetwork::with_elements(3);
        net.add(0, 1, &["pp"]).add(1, 2, &["pp"]).add(0, 2, &["dr"]);
        let n = normalize(&net, &c).unwrap();
        let r = brute_force(&c, &n, DEFAULT_CANDIDATE_BOUND).unwrap();
        assert_eq!(r.status, Status::Unsat);
        assert_eq!(r.stats.decisions, 125);
    }

    #[test]
    fn single_pair_sat() {
        let c = Calculus::rcc5();
        let mut net = ConstraintNetwork::with_elements(2);
        net.add(0, 1, &["po"]);
        let n = normalize(&net, &c).unwrap();
        let r = brute_force(&c, &n, DEFAULT_CANDIDATE_BOUND).unwrap();
        assert_eq!(r.status, Status::Sat);
        assert!(verify(&c, &n, r.model.as_ref().unwrap()).ok);
    }

    #[test]
    fn one_relation_calculus() {
        let names = vec![String::from("all")];
        let yes = Calculus::from_parts("one", names.clone(), None, vec![0], vec![vec![0]]);
        for n in 0..5 {
            let net = NormalizedNetwork::unconstrained(n);
            let r = brute_force(&yes, &net, DEFAULT_CANDIDATE_BOUND).unwrap();
            assert_eq!(r.status, Status::Sat);
        }
        // a cell without `all` forbids every triangle, so three elements fail
        let no = Calculus::from_parts("none", vec![String::from("a"), String::from("b")], None, vec![0, 1], vec![vec![1], vec![1], vec![1], vec![1]]);
        let mut net = ConstraintNetwork::with_elements(3);
        net.add(0, 1, &["a"]).add(1, 2, &["a"]).add(0, 2, &["a"]);
        let n = normalize(&net, &no).unwrap();
        assert_eq!(brute_force(&no, &n, DEFAULT_CANDIDATE_BOUND).unwrap().status, Status::Unsat);
    }

    #[test]
    fn refuses_oversized_inputs() {
        let c = Calculus::rcc5();
        let net = NormalizedNetwork::unconstrained(8);
        assert!(matches!(
            brute_force(&c, &net, DEFAULT_CANDIDATE_BOUND),
            Err(BruteForceError::TooLarge { .. })
        ));
    }
}
